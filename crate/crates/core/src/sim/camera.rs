use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundingBox, FRAME_SIZE};

/// Ground-plane camera at the origin looking down +x; +y is to the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraSpec {
    /// degrees
    pub horizontal_fov: f64,
    /// degrees
    pub vertical_fov: f64,
    /// meters
    pub max_detection_range: f64,
    /// frames per second
    pub frame_rate: f64,
}

impl Default for CameraSpec {
    fn default() -> Self {
        CameraSpec {
            horizontal_fov: 90.0,
            vertical_fov: 60.0,
            max_detection_range: 25.0,
            frame_rate: 10.0,
        }
    }
}

// Absorbs rounding in atan2 so that points exactly on the FoV edge count as
// inside.
const ANGLE_EPS: f64 = 1e-12;

impl CameraSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, fov) in [
            ("horizontal_fov", self.horizontal_fov),
            ("vertical_fov", self.vertical_fov),
        ] {
            if !(fov > 0.0 && fov < 180.0) {
                return Err(Error::Config(format!("{name} {fov} outside (0, 180)")));
            }
        }
        if !(self.max_detection_range.is_finite() && self.max_detection_range > 0.0) {
            return Err(Error::Config("max_detection_range must be positive".into()));
        }
        if !(self.frame_rate.is_finite() && self.frame_rate > 0.0) {
            return Err(Error::Config("frame_rate must be positive".into()));
        }
        Ok(())
    }

    /// Focal length in pixels of the 224-wide model frame.
    fn focal_px(&self) -> f64 {
        (FRAME_SIZE / 2.0) / (self.horizontal_fov.to_radians() / 2.0).tan()
    }

    /// Image box of an object of diameter `size` at ground position `pos`,
    /// clipped to the frame. `None` when the object is not visible.
    pub fn project(&self, pos: (f64, f64), size: f64) -> Option<BoundingBox> {
        if !visible(self, pos) {
            return None;
        }
        let (x, y) = pos;
        let range = x.hypot(y).max(1e-6);
        let azimuth = y.atan2(x);
        let f = self.focal_px();
        let center = FRAME_SIZE / 2.0 - f * azimuth.tan();
        let side = (f * size / range).clamp(2.0, FRAME_SIZE);

        let span = |c: f64| {
            let lo = (c - side / 2.0).clamp(0.0, FRAME_SIZE - 1.0);
            let hi = (c + side / 2.0).clamp(lo + 1.0, FRAME_SIZE);
            (lo, hi - lo)
        };
        let (bx, bw) = span(center);
        let (by, bh) = span(FRAME_SIZE / 2.0);
        BoundingBox::new(bx, by, bw, bh).ok()
    }
}

/// True iff `pos` is within range and inside the horizontal field of view.
/// Both limits are inclusive.
pub fn visible(camera: &CameraSpec, pos: (f64, f64)) -> bool {
    let (x, y) = pos;
    if x.hypot(y) > camera.max_detection_range {
        return false;
    }
    let half = (camera.horizontal_fov / 2.0).to_radians();
    y.atan2(x).abs() <= half + ANGLE_EPS
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visibility_examples() {
        let cam = CameraSpec::default();
        assert!(visible(&cam, (10.0, 0.0)));
        assert!(!visible(&cam, (0.0, 10.0)));
        assert!(visible(&cam, (10.0, 10.0)));
        assert!(visible(&cam, (10.0, -10.0)));
        assert!(!visible(&cam, (-10.0, 0.0)));
        assert!(!visible(&cam, (25.1, 0.0)));
        assert!(visible(&cam, (25.0, 0.0)));
    }

    #[test]
    fn projection_is_centered_and_shrinks_with_range() {
        let cam = CameraSpec::default();
        let near = cam.project((5.0, 0.0), 1.5).unwrap();
        let far = cam.project((20.0, 0.0), 1.5).unwrap();
        assert!((near.x() + near.w() / 2.0 - 112.0).abs() < 1e-9);
        assert!(near.w() > far.w());
        // left of the axis maps to the left half of the image
        let left = cam.project((10.0, 5.0), 1.5).unwrap();
        assert!(left.x() + left.w() < 112.0);
        assert!(cam.project((30.0, 0.0), 1.5).is_none());
    }

    #[test]
    fn projection_at_fov_edge_stays_in_frame() {
        let cam = CameraSpec::default();
        let b = cam.project((10.0, 10.0), 1.5).unwrap();
        assert!(b.w() >= 1.0 && b.x() >= 0.0);
        let touching = cam.project((0.0, 0.0), 1.5).unwrap();
        assert_eq!(touching.w(), FRAME_SIZE);
    }

    #[test]
    fn rejects_degenerate_fov() {
        let cam = CameraSpec {
            horizontal_fov: 180.0,
            ..Default::default()
        };
        assert!(cam.validate().is_err());
    }
}
