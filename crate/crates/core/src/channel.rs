//! Line-of-sight channel gains and the MIMO channel matrix.
//!
//! The DC gain of a single emitter–detector link is
//!
//! ```text
//! h = (m + 1) · A · cos^m(θ) · cos(φ) / (2π · d²)
//! ```
//!
//! when the incidence angle φ lies inside the detector's field of view and
//! both angles are below π/2, and zero otherwise. Stacking the gain of every
//! (detector, emitter) pair gives the MIMO channel matrix; received optical
//! power follows by superposition of per-link contributions.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use crate::error::{Result, SimError};
use crate::format::fmt_scientific;
use crate::geometry::{link_geometry, Pose};
use crate::lambertian::{cos_pow, LambertianPattern};

/// An LED transmitter: where it sits, how it radiates, how much it emits.
#[derive(Debug, Clone, PartialEq)]
pub struct LedSource {
    pub pose: Pose,
    pub pattern: LambertianPattern,
    /// Transmitted optical power, watts.
    pub tx_power: f64,
}

impl LedSource {
    pub fn new(pose: Pose, pattern: LambertianPattern, tx_power: f64) -> Result<Self> {
        if !tx_power.is_finite() || tx_power <= 0.0 {
            return Err(SimError::invalid(format!(
                "LED power must be positive, got {tx_power}"
            )));
        }
        Ok(Self {
            pose,
            pattern,
            tx_power,
        })
    }
}

/// A photodetector: position, facing, active area, and acceptance cone.
#[derive(Debug, Clone, PartialEq)]
pub struct Photodetector {
    pub pose: Pose,
    /// Active area, square meters.
    pub area: f64,
    /// Field-of-view half-angle, radians in (0, π/2].
    pub fov: f64,
}

impl Photodetector {
    pub fn new(pose: Pose, area: f64, fov: f64) -> Result<Self> {
        if !area.is_finite() || area <= 0.0 {
            return Err(SimError::invalid(format!(
                "detector area must be positive, got {area}"
            )));
        }
        if !fov.is_finite() || fov <= 0.0 || fov > FRAC_PI_2 {
            return Err(SimError::invalid(format!(
                "detector FOV must lie in (0, \u{3c0}/2] rad, got {fov}"
            )));
        }
        Ok(Self { pose, area, fov })
    }
}

/// Nonnegative DC gains for every (detector, emitter) pair, row per detector.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    n_rx: usize,
    n_tx: usize,
    /// Row-major: `gains[rx * n_tx + tx]`.
    gains: Vec<f64>,
}

impl ChannelMatrix {
    pub fn new(n_rx: usize, n_tx: usize, gains: Vec<f64>) -> Result<Self> {
        if n_rx == 0 || n_tx == 0 || gains.len() != n_rx * n_tx {
            return Err(SimError::invalid(format!(
                "channel matrix dimensions {n_rx}x{n_tx} do not match {} gains",
                gains.len()
            )));
        }
        if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(SimError::invalid(
                "channel gains must be finite and nonnegative",
            ));
        }
        Ok(Self { n_rx, n_tx, gains })
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn gain(&self, rx: usize, tx: usize) -> f64 {
        self.gains[rx * self.n_tx + tx]
    }

    /// One detector's row of gains.
    pub fn row(&self, rx: usize) -> &[f64] {
        &self.gains[rx * self.n_tx..(rx + 1) * self.n_tx]
    }

    /// Write the matrix as CSV: header `rx_index,tx_0,...`, one row per
    /// detector, gains in scientific notation with 9 significant digits.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        write!(out, "rx_index")?;
        for tx in 0..self.n_tx {
            write!(out, ",tx_{tx}")?;
        }
        writeln!(out)?;
        for rx in 0..self.n_rx {
            write!(out, "{rx}")?;
            for tx in 0..self.n_tx {
                write!(out, ",{}", fmt_scientific(self.gain(rx, tx)))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// DC gain of the line-of-sight link from `tx` to `rx`.
///
/// Zero when the incidence angle exceeds the detector FOV or either angle
/// reaches π/2; the FOV boundary itself is accepted, so the gain is
/// continuous from below at φ = fov.
pub fn los_gain(tx: &LedSource, rx: &Photodetector) -> Result<f64> {
    let link = link_geometry(&tx.pose, &rx.pose)?;
    let theta = link.irradiance_angle;
    let phi = link.incidence_angle;
    if phi > rx.fov || theta >= FRAC_PI_2 || phi >= FRAC_PI_2 {
        return Ok(0.0);
    }
    let m = tx.pattern.order();
    let gain = (m + 1.0) * rx.area * cos_pow(theta, m) * phi.cos()
        / (2.0 * PI * link.distance * link.distance);
    Ok(gain)
}

/// Assemble the channel matrix over all emitter/detector pairs:
/// `gains[i][j] = los_gain(leds[j], pds[i])`.
pub fn channel_matrix(leds: &[LedSource], pds: &[Photodetector]) -> Result<ChannelMatrix> {
    if leds.is_empty() {
        return Err(SimError::invalid(
            "channel matrix requires at least one LED",
        ));
    }
    if pds.is_empty() {
        return Err(SimError::invalid(
            "channel matrix requires at least one detector",
        ));
    }
    let mut gains = Vec::with_capacity(leds.len() * pds.len());
    for pd in pds {
        for led in leds {
            gains.push(los_gain(led, pd)?);
        }
    }
    ChannelMatrix::new(pds.len(), leds.len(), gains)
}

/// Received optical power per detector: `P_rx[i] = Σ_j gains[i][j] · P_tx[j]`,
/// summed in emitter index order.
pub fn received_power(leds: &[LedSource], matrix: &ChannelMatrix) -> Result<Vec<f64>> {
    if leds.len() != matrix.n_tx {
        return Err(SimError::invalid(format!(
            "LED count {} does not match matrix width {}",
            leds.len(),
            matrix.n_tx
        )));
    }
    let powers = (0..matrix.n_rx)
        .map(|rx| {
            matrix
                .row(rx)
                .iter()
                .zip(leds)
                .map(|(g, led)| g * led.tx_power)
                .sum()
        })
        .collect();
    Ok(powers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;

    // Reference axial gain for d = 2.25 m, m = 1, A = 1e-4 m²:
    // h = 2·1e-4 / (2π·2.25²) = 1e-4 / (π·5.0625), evaluated with 50-digit
    // decimal arithmetic.
    const AXIAL_GAIN: f64 = 6.28760269005019e-6;

    fn pose(p: (f64, f64, f64), n: Vec3) -> Pose {
        Pose::new(Vec3::new(p.0, p.1, p.2), n).unwrap()
    }

    fn ideal_led(p: (f64, f64, f64)) -> LedSource {
        let pattern = LambertianPattern::from_semi_angle(60.0f64.to_radians()).unwrap();
        LedSource::new(pose(p, Vec3::DOWN), pattern, 1.0).unwrap()
    }

    fn default_pd(p: (f64, f64, f64)) -> Photodetector {
        Photodetector::new(pose(p, Vec3::UP), 1e-4, FRAC_PI_2).unwrap()
    }

    #[test]
    fn axial_gain_matches_reference() {
        let led = ideal_led((2.0, 2.0, 3.0));
        let pd = default_pd((2.0, 2.0, 0.75));
        let h = los_gain(&led, &pd).unwrap();
        assert!(
            ((h - AXIAL_GAIN) / AXIAL_GAIN).abs() < 1e-9,
            "axial gain = {h:e}"
        );
    }

    #[test]
    fn gain_zero_outside_fov() {
        // phi = 70°, fov = 60°: detector tilted 70° away from the link axis.
        let led = ideal_led((0.0, 0.0, 1.0));
        let tilt = 70.0f64.to_radians();
        let normal = Vec3::new(tilt.sin(), 0.0, tilt.cos());
        let pd_pose = Pose::new(Vec3::new(0.0, 0.0, 0.0), normal).unwrap();
        let pd = Photodetector::new(pd_pose, 1e-4, 60.0f64.to_radians()).unwrap();
        assert_eq!(los_gain(&led, &pd).unwrap(), 0.0);
    }

    #[test]
    fn gain_zero_at_ninety_degree_irradiance() {
        // Detector in the emitter's plane: theta = 90°.
        let led = ideal_led((0.0, 0.0, 1.0));
        let pd_pose = Pose::new(Vec3::new(1.0, 0.0, 1.0), Vec3::new(-1.0, 0.0, 0.0)).unwrap();
        let pd = Photodetector::new(pd_pose, 1e-4, FRAC_PI_2).unwrap();
        assert_eq!(los_gain(&led, &pd).unwrap(), 0.0);
    }

    #[test]
    fn gain_continuous_at_fov_boundary() {
        // Pin the FOV to the link's exact incidence angle so phi = fov
        // bit-for-bit: the nonzero branch applies; any smaller FOV cuts off.
        let led = ideal_led((0.0, 0.0, 1.0));
        let rx_pose = pose((1.0, 0.0, 0.0), Vec3::UP);
        let link = link_geometry(&led.pose, &rx_pose).unwrap();
        let phi = link.incidence_angle; // ≈ 45°

        let at = Photodetector::new(rx_pose, 1e-4, phi).unwrap();
        let h_at = los_gain(&led, &at).unwrap();
        assert!(h_at > 0.0);
        // Closed-form nonzero branch at phi = fov.
        let expected = 2.0 * 1e-4 * link.irradiance_angle.cos() * phi.cos()
            / (2.0 * PI * link.distance * link.distance);
        assert!(((h_at - expected) / expected).abs() < 1e-12);

        let beyond = Photodetector::new(rx_pose, 1e-4, phi * (1.0 - 1e-12)).unwrap();
        assert_eq!(los_gain(&led, &beyond).unwrap(), 0.0);
    }

    #[test]
    fn gain_coincident_positions_error() {
        let led = ideal_led((1.0, 1.0, 1.0));
        let pd = default_pd((1.0, 1.0, 1.0));
        assert!(matches!(
            los_gain(&led, &pd),
            Err(SimError::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn inverse_square_law() {
        let led = ideal_led((0.0, 0.0, 5.0));
        let mut products = Vec::new();
        for d in [1.0, 2.25, 4.0] {
            let pd = default_pd((0.0, 0.0, 5.0 - d));
            let h = los_gain(&led, &pd).unwrap();
            products.push(h * d * d);
        }
        for p in &products[1..] {
            assert!(((p - products[0]) / products[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn gain_linear_in_area() {
        let led = ideal_led((0.4, 0.2, 2.8));
        let p = (1.3, 1.9, 0.75);
        let small = Photodetector::new(pose(p, Vec3::UP), 1e-4, FRAC_PI_2).unwrap();
        let large = Photodetector::new(pose(p, Vec3::UP), 3.7e-4, FRAC_PI_2).unwrap();
        let h_small = los_gain(&led, &small).unwrap();
        let h_large = los_gain(&led, &large).unwrap();
        assert!(((h_large / h_small - 3.7) / 3.7).abs() < 1e-12);
    }

    #[test]
    fn singleton_matrix_equals_los_gain() {
        let led = ideal_led((2.0, 2.0, 3.0));
        let pd = default_pd((1.0, 1.5, 0.75));
        let h = los_gain(&led, &pd).unwrap();
        let m = channel_matrix(&[led], &[pd]).unwrap();
        assert_eq!(m.n_rx(), 1);
        assert_eq!(m.n_tx(), 1);
        assert_eq!(m.gain(0, 0), h);
    }

    #[test]
    fn empty_lists_rejected() {
        let led = ideal_led((2.0, 2.0, 3.0));
        let pd = default_pd((1.0, 1.5, 0.75));
        assert!(channel_matrix(&[], std::slice::from_ref(&pd)).is_err());
        assert!(channel_matrix(&[led], &[]).is_err());
    }

    #[test]
    fn tiny_fov_offaxis_matrix_is_zero() {
        // No axially aligned pair and an epsilon FOV: every entry cut off,
        // so every detector receives nothing.
        let leds = vec![ideal_led((1.0, 1.0, 3.0)), ideal_led((3.0, 3.0, 3.0))];
        let fov = 1e-6;
        let pds = vec![
            Photodetector::new(pose((2.0, 1.0, 0.75), Vec3::UP), 1e-4, fov).unwrap(),
            Photodetector::new(pose((1.0, 2.0, 0.75), Vec3::UP), 1e-4, fov).unwrap(),
        ];
        let m = channel_matrix(&leds, &pds).unwrap();
        for rx in 0..2 {
            for tx in 0..2 {
                assert_eq!(m.gain(rx, tx), 0.0);
            }
        }
        assert_eq!(received_power(&leds, &m).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn preset_matrix_is_four_by_four_nonnegative() {
        let scenario =
            crate::scenario::preset_scenario(&crate::scenario::ScenarioPreset::TABLE1[3]).unwrap();
        let m = channel_matrix(&scenario.leds, &scenario.pds).unwrap();
        assert_eq!((m.n_rx(), m.n_tx()), (4, 4));
        for rx in 0..4 {
            for tx in 0..4 {
                assert!(m.gain(rx, tx) >= 0.0);
            }
        }
        // Each detector sits nearest its same-index LED in the preset layout.
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(m.gain(i, i) > m.gain(i, j));
                }
            }
        }
    }

    #[test]
    fn received_power_single_link() {
        let led = ideal_led((2.0, 2.0, 3.0));
        let pd = default_pd((2.0, 2.0, 0.75));
        let m = channel_matrix(std::slice::from_ref(&led), &[pd]).unwrap();
        let p = received_power(&[led], &m).unwrap();
        assert_eq!(p.len(), 1);
        assert!(((p[0] - AXIAL_GAIN) / AXIAL_GAIN).abs() < 1e-9);
    }

    #[test]
    fn received_power_scales_with_tx_power() {
        let pattern = LambertianPattern::from_semi_angle(60.0f64.to_radians()).unwrap();
        let single = |w: f64| {
            let led = LedSource::new(pose((2.0, 2.0, 3.0), Vec3::DOWN), pattern, w).unwrap();
            let pd = default_pd((1.0, 2.5, 0.75));
            let m = channel_matrix(std::slice::from_ref(&led), &[pd]).unwrap();
            received_power(&[led], &m).unwrap()[0]
        };
        let p1 = single(1.0);
        let p2 = single(2.0);
        assert!(((p2 - 2.0 * p1) / (2.0 * p1)).abs() < 1e-12);
    }

    #[test]
    fn received_power_dimension_mismatch() {
        let led = ideal_led((2.0, 2.0, 3.0));
        let pd = default_pd((2.0, 2.0, 0.75));
        let m = channel_matrix(std::slice::from_ref(&led), &[pd]).unwrap();
        assert!(matches!(
            received_power(&[led.clone(), led], &m),
            Err(SimError::InvalidArgument(_))
        ));
    }

    #[test]
    fn matrix_csv_shape() {
        let leds = vec![ideal_led((1.25, 1.25, 3.0)), ideal_led((2.75, 2.75, 3.0))];
        let pds = vec![
            default_pd((1.75, 1.75, 0.75)),
            default_pd((2.25, 2.25, 0.75)),
        ];
        let m = channel_matrix(&leds, &pds).unwrap();
        let csv = m.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rx_index,tx_0,tx_1");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,"));
        assert!(lines[2].starts_with("1,"));
    }
}
