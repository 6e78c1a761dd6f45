//! First-order ray-traced impulse response.
//!
//! The room's six surfaces are tiled into small diffuse patches. Each patch
//! picks up power from the emitter on the first leg, re-emits it as an ideal
//! Lambertian reflector scaled by its reflectivity, and delivers a share to
//! the detector on the second leg. Binning each contribution by total path
//! delay produces the classic indoor optical response: a sharp line-of-sight
//! spike followed by a broad reflected tail.

use std::f64::consts::PI;
use std::io::Write;

use crate::channel::los_gain;
use crate::error::{Result, SimError};
use crate::format::fmt_sig;
use crate::geometry::{link_geometry, Vec3};
use crate::lambertian::cos_pow_from_cos;
use crate::scenario::{Room, Scenario, Surface};

/// Propagation speed used for all delay computations, m/s. Fixed so bin
/// indices are reproducible bit-exactly across implementations.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Default patch side for surface discretization, meters.
pub const DEFAULT_PATCH_SIZE_M: f64 = 0.05;
/// Default impulse-response bin width, seconds (0.2 ns ≈ 6 cm of path).
pub const DEFAULT_BIN_WIDTH_S: f64 = 0.2e-9;

/// Midpoint-rule resolution inside each patch. Narrow beams concentrate the
/// wall integrand into layers a few centimeters wide, which single-point
/// patch sampling cannot resolve at practical patch sizes; a 4×4 rule per
/// patch keeps the refinement study convergent.
const PATCH_SUBDIVISION: usize = 4;

/// One diffuse reflector tile on a room surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePatch {
    /// Patch center, meters.
    pub center: Vec3,
    /// Unit normal pointing into the room.
    pub normal: Vec3,
    /// Patch area, square meters.
    pub area: f64,
    /// Diffuse reflectivity in [0, 1].
    pub reflectivity: f64,
}

/// Patch plus its in-surface frame, for sub-element placement.
struct TiledPatch {
    patch: SurfacePatch,
    axis_u: Vec3,
    axis_v: Vec3,
    side_u: f64,
    side_v: f64,
}

/// Time-binned first-order channel response plus the LOS impulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    bin_width: f64,
    /// Time origin of bin 0; equals the LOS delay.
    t_start: f64,
    bins: Vec<f64>,
    los_gain: f64,
    los_delay: f64,
}

impl ImpulseResponse {
    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    /// Per-bin reflected gains; bin b covers
    /// [t_start + b·bin_width, t_start + (b+1)·bin_width).
    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    pub fn los_gain(&self) -> f64 {
        self.los_gain
    }

    pub fn los_delay(&self) -> f64 {
        self.los_delay
    }

    /// Center time of bin `b`, seconds.
    pub fn bin_center(&self, b: usize) -> f64 {
        self.t_start + (b as f64 + 0.5) * self.bin_width
    }

    /// LOS gain plus the sum of every reflected bin, in bin order.
    pub fn total_gain(&self) -> f64 {
        self.los_gain + self.nlos_gain()
    }

    /// Sum of the reflected bins only.
    pub fn nlos_gain(&self) -> f64 {
        self.bins.iter().sum()
    }

    /// Gain-weighted RMS spread of the reflected tail around its mean delay,
    /// using bin centers. `None` when there is no reflected energy.
    pub fn rms_delay_spread(&self) -> Option<f64> {
        let total = self.nlos_gain();
        if total <= 0.0 {
            return None;
        }
        let mean = self
            .bins
            .iter()
            .enumerate()
            .map(|(b, h)| h * self.bin_center(b))
            .sum::<f64>()
            / total;
        let var = self
            .bins
            .iter()
            .enumerate()
            .map(|(b, h)| {
                let dt = self.bin_center(b) - mean;
                h * dt * dt
            })
            .sum::<f64>()
            / total;
        Some(var.sqrt())
    }

    /// Write as CSV: header `t_ns,h`, first row the LOS impulse, then one
    /// row per non-empty bin at bin-center time.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "t_ns,h")?;
        writeln!(
            out,
            "{},{}",
            fmt_sig(self.los_delay * 1e9),
            fmt_sig(self.los_gain)
        )?;
        for (b, h) in self.bins.iter().enumerate() {
            if *h > 0.0 {
                writeln!(out, "{},{}", fmt_sig(self.bin_center(b) * 1e9), fmt_sig(*h))?;
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Cells along one axis: full patches of `patch` with the last cell clipped
/// to `len`, so the cells always partition [0, len] exactly.
fn tile_count(len: f64, patch: f64) -> usize {
    let n = ((len / patch).ceil() as usize).max(1);
    if n > 1 && (n - 1) as f64 * patch >= len {
        n - 1
    } else {
        n
    }
}

/// Tile all six surfaces; patches ordered surface by surface (floor,
/// ceiling, x walls, y walls), row-major within each surface, so
/// accumulation order is deterministic.
fn tiled_surfaces(room: &Room, patch_size: f64) -> Result<Vec<TiledPatch>> {
    let min_dim = room.size_x.min(room.size_y).min(room.size_z);
    if !patch_size.is_finite() || patch_size <= 0.0 || patch_size > min_dim {
        return Err(SimError::invalid(format!(
            "patch size must lie in (0, {min_dim}], got {patch_size}"
        )));
    }

    // Per surface: origin, in-surface axes, extents, inward normal.
    struct Face {
        surface: Surface,
        origin: Vec3,
        axis_u: Vec3,
        axis_v: Vec3,
        u_len: f64,
        v_len: f64,
        normal: Vec3,
    }
    let x_axis = Vec3::new(1.0, 0.0, 0.0);
    let y_axis = Vec3::new(0.0, 1.0, 0.0);
    let z_axis = Vec3::new(0.0, 0.0, 1.0);
    let faces = [
        Face {
            surface: Surface::Floor,
            origin: Vec3::ZERO,
            axis_u: x_axis,
            axis_v: y_axis,
            u_len: room.size_x,
            v_len: room.size_y,
            normal: z_axis,
        },
        Face {
            surface: Surface::Ceiling,
            origin: Vec3::new(0.0, 0.0, room.size_z),
            axis_u: x_axis,
            axis_v: y_axis,
            u_len: room.size_x,
            v_len: room.size_y,
            normal: Vec3::new(0.0, 0.0, -1.0),
        },
        Face {
            surface: Surface::WallX0,
            origin: Vec3::ZERO,
            axis_u: y_axis,
            axis_v: z_axis,
            u_len: room.size_y,
            v_len: room.size_z,
            normal: x_axis,
        },
        Face {
            surface: Surface::WallX1,
            origin: Vec3::new(room.size_x, 0.0, 0.0),
            axis_u: y_axis,
            axis_v: z_axis,
            u_len: room.size_y,
            v_len: room.size_z,
            normal: Vec3::new(-1.0, 0.0, 0.0),
        },
        Face {
            surface: Surface::WallY0,
            origin: Vec3::ZERO,
            axis_u: x_axis,
            axis_v: z_axis,
            u_len: room.size_x,
            v_len: room.size_z,
            normal: y_axis,
        },
        Face {
            surface: Surface::WallY1,
            origin: Vec3::new(0.0, room.size_y, 0.0),
            axis_u: x_axis,
            axis_v: z_axis,
            u_len: room.size_x,
            v_len: room.size_z,
            normal: Vec3::new(0.0, -1.0, 0.0),
        },
    ];

    let mut patches = Vec::new();
    for face in faces {
        let rho = room.reflectivity.get(face.surface);
        let nu = tile_count(face.u_len, patch_size);
        let nv = tile_count(face.v_len, patch_size);
        for kv in 0..nv {
            let v0 = kv as f64 * patch_size;
            let v1 = ((kv + 1) as f64 * patch_size).min(face.v_len);
            for ku in 0..nu {
                let u0 = ku as f64 * patch_size;
                let u1 = ((ku + 1) as f64 * patch_size).min(face.u_len);
                let center = face.origin
                    + face.axis_u.scale((u0 + u1) / 2.0)
                    + face.axis_v.scale((v0 + v1) / 2.0);
                patches.push(TiledPatch {
                    patch: SurfacePatch {
                        center,
                        normal: face.normal,
                        area: (u1 - u0) * (v1 - v0),
                        reflectivity: rho,
                    },
                    axis_u: face.axis_u,
                    axis_v: face.axis_v,
                    side_u: u1 - u0,
                    side_v: v1 - v0,
                });
            }
        }
    }
    Ok(patches)
}

/// Tile the six room surfaces with square patches of side ≤ `patch_size`
/// (edge patches clip to the room extent). Normals point into the room.
pub fn discretize_surfaces(room: &Room, patch_size: f64) -> Result<Vec<SurfacePatch>> {
    Ok(tiled_surfaces(room, patch_size)?
        .into_iter()
        .map(|t| t.patch)
        .collect())
}

/// Trace the (tx, rx) impulse response: the LOS impulse plus every
/// single-bounce patch contribution accumulated into delay bins.
///
/// Per reflector element, with the emitter pattern on the first leg and
/// ideal Lambertian re-emission on the second:
///
/// ```text
/// h_k = [(m+1)·cos^m(θ_tx)·cos(φ_in) / 2π·d₁²]
///       · ρ_k · ΔA_k
///       · [cos(θ_out)·cos(φ_rx)·A / π·d₂²]
/// ```
///
/// Each patch integrates by a 4×4 midpoint rule over its area, every
/// sub-element binned at its own delay. Cosines clamp to zero, so elements
/// behind either endpoint drop out; the receiver FOV test applies to the
/// patch→receiver leg. Delays (d₁ + d₂)/c bin relative to the LOS delay.
pub fn impulse_response(
    scenario: &Scenario,
    tx_index: usize,
    rx_index: usize,
    patch_size: f64,
    bin_width: f64,
) -> Result<ImpulseResponse> {
    let led = scenario.leds.get(tx_index).ok_or_else(|| {
        SimError::invalid(format!(
            "tx index {tx_index} out of range for {} LEDs",
            scenario.leds.len()
        ))
    })?;
    let pd = scenario.pds.get(rx_index).ok_or_else(|| {
        SimError::invalid(format!(
            "rx index {rx_index} out of range for {} detectors",
            scenario.pds.len()
        ))
    })?;
    if !bin_width.is_finite() || bin_width <= 0.0 {
        return Err(SimError::invalid(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }

    let los = los_gain(led, pd)?;
    let los_delay = link_geometry(&led.pose, &pd.pose)?.distance / SPEED_OF_LIGHT;

    let tiles = tiled_surfaces(&scenario.room, patch_size)?;
    let m = led.pattern.order();
    let tx_pos = led.pose.position();
    let tx_normal = led.pose.normal();
    let rx_pos = pd.pose.position();
    let rx_normal = pd.pose.normal();

    let sub = PATCH_SUBDIVISION as f64;
    let mut bins: Vec<f64> = Vec::new();
    for tile in &tiles {
        let patch = &tile.patch;
        let element_area = patch.area / (sub * sub);
        let weight = patch.reflectivity * element_area;
        if weight == 0.0 {
            continue;
        }
        for su in 0..PATCH_SUBDIVISION {
            let fu = ((su as f64 + 0.5) / sub - 0.5) * tile.side_u;
            for sv in 0..PATCH_SUBDIVISION {
                let fv = ((sv as f64 + 0.5) / sub - 0.5) * tile.side_v;
                let center = patch.center + tile.axis_u.scale(fu) + tile.axis_v.scale(fv);

                let v1 = center - tx_pos;
                let d1 = v1.norm();
                if d1 == 0.0 {
                    continue; // element coincides with the emitter: measure zero
                }
                let cos_theta_tx = tx_normal.dot(v1) / d1;
                let cos_phi_in = -patch.normal.dot(v1) / d1;
                if cos_theta_tx <= 0.0 || cos_phi_in <= 0.0 {
                    continue;
                }

                let v2 = rx_pos - center;
                let d2 = v2.norm();
                if d2 == 0.0 {
                    continue;
                }
                let cos_theta_out = patch.normal.dot(v2) / d2;
                let cos_phi_rx = -rx_normal.dot(v2) / d2;
                if cos_theta_out <= 0.0 || cos_phi_rx <= 0.0 {
                    continue;
                }
                let phi_rx = cos_phi_rx.clamp(-1.0, 1.0).acos();
                if phi_rx > pd.fov {
                    continue;
                }

                let first_leg = (m + 1.0) * cos_pow_from_cos(cos_theta_tx, m) * cos_phi_in
                    / (2.0 * PI * d1 * d1);
                let second_leg = cos_theta_out * cos_phi_rx * pd.area / (PI * d2 * d2);
                let h = first_leg * weight * second_leg;
                if h <= 0.0 {
                    continue;
                }

                let delay = (d1 + d2) / SPEED_OF_LIGHT;
                let rel = (delay - los_delay).max(0.0);
                let bin = (rel / bin_width).floor() as usize;
                if bins.len() <= bin {
                    bins.resize(bin + 1, 0.0);
                }
                bins[bin] += h;
            }
        }
    }

    Ok(ImpulseResponse {
        bin_width,
        t_start: los_delay,
        bins,
        los_gain: los,
        los_delay,
    })
}
