//! Lambertian emitter radiometry.
//!
//! An LED is modeled as a generalized Lambertian source: its radiant
//! intensity falls off as cos^m of the angle from the beam axis, where the
//! order m is fixed by the semi-angle at half power. Small semi-angles give
//! large orders and tightly collimated beams; the preset angles of 4° to 8°
//! correspond to orders between roughly 284 and 71.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Result, SimError};

/// Emission pattern of a generalized Lambertian source.
///
/// Constructed only from the semi-angle; the order is always derived, so the
/// two fields cannot disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambertianPattern {
    semi_angle: f64,
    order: f64,
}

impl LambertianPattern {
    /// Build a pattern from the semi-angle at half power, radians in (0, π/2).
    pub fn from_semi_angle(semi_angle: f64) -> Result<Self> {
        let order = lambertian_order(semi_angle)?;
        Ok(Self { semi_angle, order })
    }

    /// Semi-angle at half power, radians.
    pub fn semi_angle(&self) -> f64 {
        self.semi_angle
    }

    /// Lambertian order m.
    pub fn order(&self) -> f64 {
        self.order
    }
}

/// Lambertian order m from the semi-angle at half power:
///
/// ```text
/// m = -ln 2 / ln(cos(semi_angle))
/// ```
///
/// Strictly decreasing in the semi-angle; m = 1 at 60°.
pub fn lambertian_order(semi_angle: f64) -> Result<f64> {
    if !semi_angle.is_finite() || semi_angle <= 0.0 || semi_angle >= FRAC_PI_2 {
        return Err(SimError::domain(format!(
            "semi-angle must lie strictly between 0 and \u{3c0}/2 rad, got {semi_angle}"
        )));
    }
    Ok(-std::f64::consts::LN_2 / semi_angle.cos().ln())
}

/// Radiant intensity R(θ) of the pattern, per steradian, normalized so the
/// forward-hemisphere integral is one:
///
/// ```text
/// R(θ) = (m + 1) · cos^m(θ) / 2π    for 0 ≤ θ < π/2
/// R(θ) = 0                          for θ ≥ π/2
/// ```
///
/// The source radiates only into its forward hemisphere, so angles at or
/// beyond π/2 return zero rather than raising a negative cosine to a
/// non-integer power.
pub fn radiant_intensity(pattern: &LambertianPattern, theta: f64) -> f64 {
    let scale = (pattern.order + 1.0) / (2.0 * PI);
    scale * cos_pow(theta, pattern.order)
}

/// cos^m(θ) evaluated as exp(m · ln cos θ), which stays accurate for the
/// large orders of narrow beams (m ≈ 284 at a 4° semi-angle). Zero at and
/// beyond π/2.
pub(crate) fn cos_pow(theta: f64, order: f64) -> f64 {
    if theta >= FRAC_PI_2 {
        return 0.0;
    }
    cos_pow_from_cos(theta.cos(), order)
}

/// cos^m from an already-computed cosine; nonpositive cosines map to zero.
pub(crate) fn cos_pow_from_cos(cos_theta: f64, order: f64) -> f64 {
    if cos_theta <= 0.0 {
        return 0.0;
    }
    if cos_theta >= 1.0 {
        return 1.0;
    }
    (order * cos_theta.ln()).exp()
}
