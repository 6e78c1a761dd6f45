//! Desk-scale simulator for indoor visible-light communication links.
//!
//! Models Lambertian LED emitters and photodetectors in a rectangular room
//! and computes, from the link geometry up:
//!
//! - **Emitter radiometry**: Lambertian order from the semi-angle at half
//!   power, and the normalized radiant intensity profile.
//! - **LOS channel gains**: the DC transfer function per emitter–detector
//!   link with field-of-view cutoff, assembled into MIMO channel matrices.
//! - **Received-power maps**: sweeps over a working-plane grid, coverage
//!   metrics, and per-point co-channel interference — the wide-vs-narrow
//!   beam tradeoff made measurable.
//! - **Impulse responses**: single-bounce ray tracing over discretized room
//!   surfaces, yielding the LOS spike plus the diffuse reflected tail.
//! - **Scenario files**: JSON scenario documents with validation and
//!   canonical emission, plus four built-in reference presets.
//!
//! All internal angles are radians and all outputs are deterministic:
//! the same inputs produce byte-identical CSV artifacts.

pub mod channel;
pub mod error;
pub mod format;
pub mod geometry;
pub mod io;
pub mod lambertian;
pub mod powermap;
pub mod raytrace;
pub mod scenario;

pub use channel::{
    channel_matrix, los_gain, received_power, ChannelMatrix, LedSource, Photodetector,
};
pub use error::{Result, SimError};
pub use format::{fmt_scientific, fmt_sig};
pub use geometry::{angle_between, link_geometry, LinkGeometry, Pose, Vec3};
pub use io::{emit_scenario, parse_scenario};
pub use lambertian::{lambertian_order, radiant_intensity, LambertianPattern};
pub use powermap::{
    coverage_metrics, interference_map, sweep_plane, watts_to_dbm, CoverageMetrics, GridSpec,
    InterferenceMap, InterferencePoint, PowerMap,
};
pub use raytrace::{
    discretize_surfaces, impulse_response, ImpulseResponse, SurfacePatch, DEFAULT_BIN_WIDTH_S,
    DEFAULT_PATCH_SIZE_M, SPEED_OF_LIGHT,
};
pub use scenario::{
    preset_scenario, Room, Scenario, ScenarioPreset, Surface, SurfaceReflectivity,
    DEFAULT_DETECTOR_AREA_M2, DEFAULT_FOV_RAD, DEFAULT_REFLECTIVITY, DEFAULT_TX_POWER_W,
};
