//! Vector math and link geometry.
//!
//! A link between an emitter and a detector is described by three scalars:
//! the irradiance angle at the emitter (between the emitter normal and the
//! emitter→detector direction), the incidence angle at the detector (between
//! the detector normal and the detector→emitter direction), and the
//! line-of-sight distance. Everything downstream — channel gains, power
//! sweeps, bounce paths — is built on these.
//!
//! Coordinates are right-handed with z up: the floor lies at z = 0 and the
//! ceiling at z = room height. Angles are radians throughout the library;
//! degrees appear only at the file/CLI boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Tolerance for accepting a vector as unit length.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// A point or direction in 3-space, in meters for positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    /// Unit +z, the facing of an upward-looking detector.
    pub const UP: Vec3 = Vec3::new(0.0, 0.0, 1.0);
    /// Unit −z, the facing of a ceiling-mounted LED.
    pub const DOWN: Vec3 = Vec3::new(0.0, 0.0, -1.0);

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector in this direction, or an error for the zero vector.
    pub fn normalized(self) -> Result<Vec3> {
        let n = self.norm();
        if n == 0.0 {
            return Err(SimError::degenerate("cannot normalize the zero vector"));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn is_unit(self) -> bool {
        self.is_finite() && (self.norm() - 1.0).abs() <= UNIT_TOLERANCE
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }
}

/// Position plus facing direction of an emitter or detector.
///
/// The normal is validated to unit length at construction, so every `Pose`
/// in circulation satisfies |normal| = 1 within [`UNIT_TOLERANCE`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    position: Vec3,
    normal: Vec3,
}

impl Pose {
    /// Build a pose from a position and a unit normal.
    pub fn new(position: Vec3, normal: Vec3) -> Result<Self> {
        if !position.is_finite() {
            return Err(SimError::invalid("pose position must be finite"));
        }
        if !normal.is_unit() {
            return Err(SimError::invalid(format!(
                "pose normal must be a unit vector, got length {:.12}",
                normal.norm()
            )));
        }
        Ok(Self { position, normal })
    }

    pub fn position(&self) -> Vec3 {
        self.position
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }
}

/// The three scalars of a line-of-sight link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Irradiance angle at the emitter, radians in [0, π].
    pub irradiance_angle: f64,
    /// Incidence angle at the detector, radians in [0, π].
    pub incidence_angle: f64,
    /// Line-of-sight distance, meters, > 0.
    pub distance: f64,
}

/// Angle between two unit vectors, radians in [0, π].
///
/// The dot product is clamped to [-1, 1] before `acos` so collinear inputs
/// that round a hair outside the interval cannot produce NaN.
pub fn angle_between(u: Vec3, v: Vec3) -> Result<f64> {
    if !u.is_unit() || !v.is_unit() {
        return Err(SimError::invalid(format!(
            "angle_between requires unit vectors, got lengths {:.12} and {:.12}",
            u.norm(),
            v.norm()
        )));
    }
    Ok(u.dot(v).clamp(-1.0, 1.0).acos())
}

/// Extract the irradiance angle, incidence angle, and distance of the link
/// from `tx` to `rx`.
///
/// The irradiance angle is measured between the emitter normal and the
/// emitter→detector direction; the incidence angle between the detector
/// normal and the detector→emitter direction.
pub fn link_geometry(tx: &Pose, rx: &Pose) -> Result<LinkGeometry> {
    let offset = rx.position - tx.position;
    let distance = offset.norm();
    if distance == 0.0 {
        return Err(SimError::degenerate(
            "emitter and detector positions coincide",
        ));
    }
    let dir_tx_to_rx = offset.scale(1.0 / distance);
    let dir_rx_to_tx = dir_tx_to_rx.scale(-1.0);
    Ok(LinkGeometry {
        irradiance_angle: angle_between(tx.normal, dir_tx_to_rx)?,
        incidence_angle: angle_between(rx.normal, dir_rx_to_tx)?,
        distance,
    })
}
