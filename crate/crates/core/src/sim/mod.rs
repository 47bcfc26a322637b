//! Geometric scenario engine: tracks on a ground plane, a camera with a
//! finite field of view, and a seeded synthetic detector.
//!
//! The detector samples every frame independently. Real detector errors are
//! correlated across neighbouring frames, so segment-level rates from this
//! engine follow the independent-frame law `1 - (1 - p)^n`.

mod camera;
mod montecarlo;
mod pipeline;
mod scenario;

pub use camera::{visible, CameraSpec};
pub use montecarlo::{per_frame_rate_for, segment_rate_closed_form, MisidExperiment, MisidTally};
pub use pipeline::{run_pipeline, EventCounts, PipelineOutput};
pub use scenario::{
    render_frames, ConfidenceDist, DetectorProfile, EntityTrack, FrameRenderer, RenderedFrame,
    Scenario, Waypoint,
};
