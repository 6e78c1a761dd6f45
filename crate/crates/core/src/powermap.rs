//! Received-power maps over the working plane, coverage metrics, and
//! co-channel interference.
//!
//! A sweep places a probe detector (default area and field of view, facing
//! straight up) at every node of a regular grid spanning the full floor
//! extent at the working-plane height, and records the superposed received
//! power from all LEDs. Narrow beams concentrate power into small bright
//! discs under each LED; wide beams cover more of the plane but overlap, so
//! the same sweep also yields a per-point dominant LED and an interference
//! ratio — the two sides of the coverage/interference tradeoff.

use std::io::Write;

use crate::channel::{los_gain, Photodetector};
use crate::error::{Result, SimError};
use crate::format::fmt_sig;
use crate::geometry::{Pose, Vec3};
use crate::scenario::{Scenario, DEFAULT_DETECTOR_AREA_M2, DEFAULT_FOV_RAD};

/// Regular evaluation grid over the working plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// 81×81: 0.05 m steps across the reference 4 m room.
    pub const DEFAULT: GridSpec = GridSpec { nx: 81, ny: 81 };

    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(SimError::invalid(format!(
                "grid must be at least 2x2, got {nx}x{ny}"
            )));
        }
        Ok(Self { nx, ny })
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Received power at every grid node, row-major with x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMap {
    grid: GridSpec,
    size_x: f64,
    size_y: f64,
    plane_z: f64,
    values: Vec<f64>,
}

/// 10·log10(P / 1 mW); zero power maps to the −∞ sentinel.
pub fn watts_to_dbm(p: f64) -> f64 {
    if p == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (p / 1e-3).log10()
    }
}

impl PowerMap {
    fn new(
        grid: GridSpec,
        size_x: f64,
        size_y: f64,
        plane_z: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != grid.nx * grid.ny {
            return Err(SimError::invalid(format!(
                "power map needs {} values for a {}x{} grid, got {}",
                grid.nx * grid.ny,
                grid.nx,
                grid.ny,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(SimError::invalid(
                "power map values must be finite and nonnegative",
            ));
        }
        Ok(Self {
            grid,
            size_x,
            size_y,
            plane_z,
            values,
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn plane_z(&self) -> f64 {
        self.plane_z
    }

    /// x coordinate of grid column `i`.
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.size_x / (self.grid.nx - 1) as f64
    }

    /// y coordinate of grid row `j`.
    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.size_y / (self.grid.ny - 1) as f64
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Grid points in CSV order: x fastest, then y.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.grid.ny).flat_map(move |j| {
            (0..self.grid.nx).map(move |i| (self.x(i), self.y(j), self.value(i, j)))
        })
    }

    /// Bilinear interpolation at an arbitrary in-plane point.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=self.size_x).contains(&x) || !(0.0..=self.size_y).contains(&y) {
            return Err(SimError::invalid(format!(
                "sample point ({x}, {y}) outside the mapped plane"
            )));
        }
        let fx = x / self.size_x * (self.grid.nx - 1) as f64;
        let fy = y / self.size_y * (self.grid.ny - 1) as f64;
        let i0 = (fx.floor() as usize).min(self.grid.nx - 2);
        let j0 = (fy.floor() as usize).min(self.grid.ny - 2);
        let tx = fx - i0 as f64;
        let ty = fy - j0 as f64;
        let v00 = self.value(i0, j0);
        let v10 = self.value(i0 + 1, j0);
        let v01 = self.value(i0, j0 + 1);
        let v11 = self.value(i0 + 1, j0 + 1);
        Ok(v00 * (1.0 - tx) * (1.0 - ty)
            + v10 * tx * (1.0 - ty)
            + v01 * (1.0 - tx) * ty
            + v11 * tx * ty)
    }

    /// Write as CSV: `x_m,y_m,p_w,p_dbm`, one row per grid point with x
    /// fastest, 9 significant digits, empty dBm field for zero power.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "x_m,y_m,p_w,p_dbm")?;
        for (x, y, p) in self.points() {
            let dbm = if p == 0.0 {
                String::new()
            } else {
                fmt_sig(watts_to_dbm(p))
            };
            writeln!(out, "{},{},{},{}", fmt_sig(x), fmt_sig(y), fmt_sig(p), dbm)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    /// Read a map previously written by [`PowerMap::write_csv`]. The plane
    /// height is not recorded in the CSV and reads back as zero.
    pub fn read_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "x_m,y_m,p_w,p_dbm")) => {}
            Some((_, other)) => {
                return Err(SimError::Parse(format!(
                    "line 1: expected header `x_m,y_m,p_w,p_dbm`, got `{other}`"
                )))
            }
            None => return Err(SimError::Parse("empty power-map CSV".into())),
        }

        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        for (idx, line) in lines {
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(SimError::Parse(format!(
                    "line {lineno}: expected 4 fields, got {}",
                    fields.len()
                )));
            }
            let parse = |name: &str, s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| SimError::Parse(format!("line {lineno}: bad {name} value `{s}`")))
            };
            xs.push(parse("x_m", fields[0])?);
            ys.push(parse("y_m", fields[1])?);
            values.push(parse("p_w", fields[2])?);
            // p_dbm is derived from p_w; ignore it (it is empty for zero power).
        }
        if values.is_empty() {
            return Err(SimError::Parse("power-map CSV has no data rows".into()));
        }

        // Rows are x-fastest, so the first row of constant y spans one grid row.
        let y0 = ys[0];
        let nx = ys.iter().take_while(|y| **y == y0).count();
        if nx < 2 || !values.len().is_multiple_of(nx) {
            return Err(SimError::Parse(format!(
                "power-map CSV rows do not form a grid (inferred nx = {nx}, {} rows)",
                values.len()
            )));
        }
        let ny = values.len() / nx;
        let grid = GridSpec::new(nx, ny)?;
        let size_x = xs[nx - 1];
        let size_y = ys[values.len() - 1];
        PowerMap::new(grid, size_x, size_y, 0.0, values)
    }
}

/// Probe detector used at every sweep point: defaults, facing straight up.
fn probe_detector(x: f64, y: f64, z: f64) -> Result<Photodetector> {
    Photodetector::new(
        Pose::new(Vec3::new(x, y, z), Vec3::UP)?,
        DEFAULT_DETECTOR_AREA_M2,
        DEFAULT_FOV_RAD,
    )
}

/// Received power from one probe position, summed over LEDs in index order.
fn probe_power(scenario: &Scenario, x: f64, y: f64) -> Result<f64> {
    let probe = probe_detector(x, y, scenario.plane_z)?;
    let mut total = 0.0;
    for led in &scenario.leds {
        total += led.tx_power * los_gain(led, &probe)?;
    }
    Ok(total)
}

/// Sweep the channel model across the working plane.
pub fn sweep_plane(scenario: &Scenario, grid: &GridSpec) -> Result<PowerMap> {
    let room = &scenario.room;
    let mut values = Vec::with_capacity(grid.nx * grid.ny);
    for j in 0..grid.ny {
        let y = j as f64 * room.size_y / (grid.ny - 1) as f64;
        for i in 0..grid.nx {
            let x = i as f64 * room.size_x / (grid.nx - 1) as f64;
            values.push(probe_power(scenario, x, y)?);
        }
    }
    PowerMap::new(*grid, room.size_x, room.size_y, scenario.plane_z, values)
}

/// Summary statistics of a power map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageMetrics {
    /// Largest received power on the grid, watts.
    pub peak_w: f64,
    /// Peak in dBm (−∞ when the map is all zero).
    pub peak_dbm: f64,
    /// Smallest received power on the grid, watts.
    pub min_w: f64,
    /// 10·log10(peak/min); +∞ when the minimum is zero, 0 for an all-zero map.
    pub dynamic_range_db: f64,
    /// Fraction of grid points within the relative threshold of the peak.
    pub covered_fraction: f64,
    /// Set when every grid point is zero, leaving the peak undefined.
    pub all_zero: bool,
}

/// Coverage statistics at a relative threshold below the peak, in dB ≥ 0.
pub fn coverage_metrics(map: &PowerMap, relative_threshold_db: f64) -> Result<CoverageMetrics> {
    if !relative_threshold_db.is_finite() || relative_threshold_db < 0.0 {
        return Err(SimError::invalid(format!(
            "relative threshold must be ≥ 0 dB, got {relative_threshold_db}"
        )));
    }
    let peak_w = map.values().iter().cloned().fold(0.0f64, f64::max);
    let min_w = map.values().iter().cloned().fold(f64::INFINITY, f64::min);
    if peak_w == 0.0 {
        return Ok(CoverageMetrics {
            peak_w: 0.0,
            peak_dbm: f64::NEG_INFINITY,
            min_w: 0.0,
            dynamic_range_db: 0.0,
            covered_fraction: 0.0,
            all_zero: true,
        });
    }
    let cutoff = peak_w * 10f64.powf(-relative_threshold_db / 10.0);
    let covered = map.values().iter().filter(|p| **p >= cutoff).count();
    let dynamic_range_db = if min_w == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak_w / min_w).log10()
    };
    Ok(CoverageMetrics {
        peak_w,
        peak_dbm: watts_to_dbm(peak_w),
        min_w,
        dynamic_range_db,
        covered_fraction: covered as f64 / map.values().len() as f64,
        all_zero: false,
    })
}

/// Dominant LED and interference ratio at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferencePoint {
    /// Index of the LED delivering the most power; ties break to the lowest
    /// index.
    pub dominant_tx: usize,
    /// (total − dominant) / dominant; `None` when the dominant power is zero.
    pub ratio: Option<f64>,
}

/// Per-point dominant-LED and interference-ratio map.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceMap {
    grid: GridSpec,
    size_x: f64,
    size_y: f64,
    plane_z: f64,
    points: Vec<InterferencePoint>,
}

impl InterferenceMap {
    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn point(&self, i: usize, j: usize) -> InterferencePoint {
        self.points[j * self.grid.nx + i]
    }

    pub fn points(&self) -> &[InterferencePoint] {
        &self.points
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.size_x / (self.grid.nx - 1) as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        j as f64 * self.size_y / (self.grid.ny - 1) as f64
    }

    /// Mean interference ratio over the grid points where it is defined,
    /// accumulated in index order; `None` when no point has a defined ratio.
    pub fn mean_ratio(&self) -> Option<f64> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for p in &self.points {
            if let Some(r) = p.ratio {
                sum += r;
                count += 1;
            }
        }
        (count > 0).then(|| sum / count as f64)
    }

    /// Write as CSV: `x_m,y_m,dominant_tx,interference_ratio`, x fastest,
    /// empty ratio field where the ratio is undefined.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "x_m,y_m,dominant_tx,interference_ratio")?;
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                let p = self.point(i, j);
                let ratio = p.ratio.map(fmt_sig).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{}",
                    fmt_sig(self.x(i)),
                    fmt_sig(self.y(j)),
                    p.dominant_tx,
                    ratio
                )?;
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

/// Map each grid point to its dominant LED and interference ratio.
pub fn interference_map(scenario: &Scenario, grid: &GridSpec) -> Result<InterferenceMap> {
    if scenario.leds.len() < 2 {
        return Err(SimError::invalid(
            "interference map requires at least two LEDs",
        ));
    }
    let room = &scenario.room;
    let mut points = Vec::with_capacity(grid.nx * grid.ny);
    for j in 0..grid.ny {
        let y = j as f64 * room.size_y / (grid.ny - 1) as f64;
        for i in 0..grid.nx {
            let x = i as f64 * room.size_x / (grid.nx - 1) as f64;
            let probe = probe_detector(x, y, scenario.plane_z)?;
            let mut total = 0.0;
            let mut dominant_tx = 0usize;
            let mut dominant_power = f64::NEG_INFINITY;
            for (idx, led) in scenario.leds.iter().enumerate() {
                let p = led.tx_power * los_gain(led, &probe)?;
                total += p;
                if p > dominant_power {
                    dominant_power = p;
                    dominant_tx = idx;
                }
            }
            let ratio = (dominant_power > 0.0).then(|| total / dominant_power - 1.0);
            points.push(InterferencePoint { dominant_tx, ratio });
        }
    }
    Ok(InterferenceMap {
        grid: *grid,
        size_x: room.size_x,
        size_y: room.size_y,
        plane_z: scenario.plane_z,
        points,
    })
}
