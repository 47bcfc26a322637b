//! wasm-bindgen entry points for the browser demo. Each returns a JSON
//! string for the page script to draw.

use wasm_bindgen::prelude::*;

pub mod demo;

fn to_js<T: serde::Serialize>(r: bearguard_core::Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn segment_rates(
    p: f64,
    segment_length: usize,
    segments: u32,
    seed: u32,
) -> Result<String, JsError> {
    to_js(demo::segment_rates(
        p,
        segment_length,
        u64::from(segments),
        u64::from(seed),
    ))
}

#[wasm_bindgen]
pub fn power_profile(
    duty_cycle: f64,
    panel_w: f64,
    derating: f64,
    day_fraction: f64,
    horizon_days: f64,
) -> Result<String, JsError> {
    to_js(demo::power_profile(
        duty_cycle,
        panel_w,
        derating,
        day_fraction,
        horizon_days,
    ))
}

/// Pass `NaN` for `human_x` to leave the person out.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn approach(
    horizontal_fov: f64,
    max_detection_range: f64,
    start_x: f64,
    start_y: f64,
    end_x: f64,
    end_y: f64,
    human_x: f64,
    human_y: f64,
    seed: u32,
) -> Result<String, JsError> {
    let human = (!human_x.is_nan()).then_some((human_x, human_y));
    to_js(demo::approach(
        horizontal_fov,
        max_detection_range,
        (start_x, start_y),
        (end_x, end_y),
        human,
        u64::from(seed),
    ))
}
