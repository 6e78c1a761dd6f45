//! Rooms, scenarios, and the built-in reference presets.
//!
//! A scenario is a rectangular room with reflective surfaces, a set of
//! ceiling LEDs, an optional set of fixed photodetectors, and the height of
//! the working plane over which power maps are swept. The four presets
//! reproduce the reference room: 4 m × 4 m × 3 m, four LEDs in a centered
//! 2×2 square 1.5 m apart on the ceiling, four detectors 0.5 m apart on the
//! working plane 2.25 m below, with semi-angles of 4°, 5°, 7°, and 8°.

use std::f64::consts::FRAC_PI_2;

use crate::channel::{LedSource, Photodetector};
use crate::error::{Result, SimError};
use crate::geometry::{Pose, Vec3};
use crate::lambertian::LambertianPattern;

/// Transmit power assumed when a scenario does not specify one, watts.
pub const DEFAULT_TX_POWER_W: f64 = 1.0;
/// Detector area assumed when unspecified: 1 cm².
pub const DEFAULT_DETECTOR_AREA_M2: f64 = 1e-4;
/// Detector field of view assumed when unspecified: 90°, i.e. no cutoff.
pub const DEFAULT_FOV_RAD: f64 = FRAC_PI_2;
/// Surface reflectivity assumed when unspecified.
pub const DEFAULT_REFLECTIVITY: f64 = 0.8;

/// The six surfaces of a rectangular room.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Surface {
    Floor,
    Ceiling,
    /// Wall in the x = 0 plane.
    WallX0,
    /// Wall in the x = size_x plane.
    WallX1,
    /// Wall in the y = 0 plane.
    WallY0,
    /// Wall in the y = size_y plane.
    WallY1,
}

impl Surface {
    pub const ALL: [Surface; 6] = [
        Surface::Floor,
        Surface::Ceiling,
        Surface::WallX0,
        Surface::WallX1,
        Surface::WallY0,
        Surface::WallY1,
    ];
}

/// Per-surface diffuse reflectivity, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceReflectivity {
    pub floor: f64,
    pub ceiling: f64,
    pub wall_x0: f64,
    pub wall_x1: f64,
    pub wall_y0: f64,
    pub wall_y1: f64,
}

impl SurfaceReflectivity {
    /// The same reflectivity on all six surfaces.
    pub fn uniform(rho: f64) -> Self {
        Self {
            floor: rho,
            ceiling: rho,
            wall_x0: rho,
            wall_x1: rho,
            wall_y0: rho,
            wall_y1: rho,
        }
    }

    pub fn get(&self, surface: Surface) -> f64 {
        match surface {
            Surface::Floor => self.floor,
            Surface::Ceiling => self.ceiling,
            Surface::WallX0 => self.wall_x0,
            Surface::WallX1 => self.wall_x1,
            Surface::WallY0 => self.wall_y0,
            Surface::WallY1 => self.wall_y1,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, rho) in [
            ("floor", self.floor),
            ("ceiling", self.ceiling),
            ("wall_x0", self.wall_x0),
            ("wall_x1", self.wall_x1),
            ("wall_y0", self.wall_y0),
            ("wall_y1", self.wall_y1),
        ] {
            if !rho.is_finite() || !(0.0..=1.0).contains(&rho) {
                return Err(SimError::validation(
                    format!("room.reflectivity.{name}"),
                    format!("reflectivity must lie in [0, 1], got {rho}"),
                ));
            }
        }
        Ok(())
    }
}

impl Default for SurfaceReflectivity {
    fn default() -> Self {
        Self::uniform(DEFAULT_REFLECTIVITY)
    }
}

/// A rectangular room with the floor at z = 0 and the ceiling at z = size_z.
#[derive(Debug, Clone, PartialEq)]
pub struct Room {
    pub size_x: f64,
    pub size_y: f64,
    pub size_z: f64,
    pub reflectivity: SurfaceReflectivity,
}

impl Room {
    pub fn new(
        size_x: f64,
        size_y: f64,
        size_z: f64,
        reflectivity: SurfaceReflectivity,
    ) -> Result<Self> {
        for (name, v) in [("size_x", size_x), ("size_y", size_y), ("size_z", size_z)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(SimError::validation(
                    format!("room.{name}"),
                    format!("room dimension must be positive, got {v}"),
                ));
            }
        }
        reflectivity.validate()?;
        Ok(Self {
            size_x,
            size_y,
            size_z,
            reflectivity,
        })
    }

    /// True when the point lies inside the box, componentwise in [0, size].
    pub fn contains(&self, p: Vec3) -> bool {
        (0.0..=self.size_x).contains(&p.x)
            && (0.0..=self.size_y).contains(&p.y)
            && (0.0..=self.size_z).contains(&p.z)
    }
}

/// A complete simulation scenario.
///
/// `pds` is the fixed detector list used by channel-matrix and
/// impulse-response runs; plane sweeps ignore it and place their own probe
/// detectors, so it may be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub room: Room,
    pub leds: Vec<LedSource>,
    pub pds: Vec<Photodetector>,
    /// Height of the working plane for power-map sweeps, meters.
    pub plane_z: f64,
}

impl Scenario {
    pub fn new(
        room: Room,
        leds: Vec<LedSource>,
        pds: Vec<Photodetector>,
        plane_z: f64,
    ) -> Result<Self> {
        if leds.is_empty() {
            return Err(SimError::validation(
                "leds",
                "scenario needs at least one LED",
            ));
        }
        for (i, led) in leds.iter().enumerate() {
            if !room.contains(led.pose.position()) {
                return Err(SimError::validation(
                    format!("leds[{i}].position"),
                    "LED position lies outside the room",
                ));
            }
        }
        for (i, pd) in pds.iter().enumerate() {
            if !room.contains(pd.pose.position()) {
                return Err(SimError::validation(
                    format!("pds[{i}].position"),
                    "detector position lies outside the room",
                ));
            }
        }
        if !plane_z.is_finite() || !(0.0..=room.size_z).contains(&plane_z) {
            return Err(SimError::validation(
                "plane_z",
                format!(
                    "plane height must lie in [0, {}], got {plane_z}",
                    room.size_z
                ),
            ));
        }
        Ok(Self {
            room,
            leds,
            pds,
            plane_z,
        })
    }
}

/// One row of the built-in simulation-parameter table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioPreset {
    /// Side of the centered 2×2 LED square, meters.
    pub led_spacing: f64,
    /// LED semi-angle at half power, degrees.
    pub irradiance_angle_deg: f64,
    /// Side of the centered 2×2 detector square, meters.
    pub detector_spacing: f64,
}

impl ScenarioPreset {
    /// The four built-in rows, ordered by semi-angle: 4°, 5°, 7°, 8°.
    pub const TABLE1: [ScenarioPreset; 4] = [
        ScenarioPreset::row(1.5, 4.0, 0.5),
        ScenarioPreset::row(1.5, 5.0, 0.5),
        ScenarioPreset::row(1.5, 7.0, 0.5),
        ScenarioPreset::row(1.5, 8.0, 0.5),
    ];

    const fn row(led_spacing: f64, irradiance_angle_deg: f64, detector_spacing: f64) -> Self {
        Self {
            led_spacing,
            irradiance_angle_deg,
            detector_spacing,
        }
    }

    /// Preset name as accepted on the command line, e.g. `table1:4deg`.
    pub fn name(&self) -> String {
        format!("table1:{}deg", self.irradiance_angle_deg)
    }

    /// Look up a preset by name. Unknown names are invalid arguments.
    pub fn by_name(name: &str) -> Result<Self> {
        Self::TABLE1
            .iter()
            .find(|p| p.name() == name)
            .copied()
            .ok_or_else(|| {
                SimError::invalid(format!(
                    "unknown preset `{name}` (expected one of: {})",
                    Self::TABLE1.map(|p| p.name()).join(", ")
                ))
            })
    }
}

// Reference room for the presets.
const PRESET_ROOM_X: f64 = 4.0;
const PRESET_ROOM_Y: f64 = 4.0;
const PRESET_ROOM_Z: f64 = 3.0;
/// Working plane 2.25 m below the ceiling LEDs.
const PRESET_PLANE_Z: f64 = 0.75;

/// Build the room scenario for a preset row: four downward LEDs in a
/// centered square on the ceiling, four upward detectors in a centered
/// square on the working plane, defaults everywhere else.
pub fn preset_scenario(preset: &ScenarioPreset) -> Result<Scenario> {
    let room = Room::new(
        PRESET_ROOM_X,
        PRESET_ROOM_Y,
        PRESET_ROOM_Z,
        SurfaceReflectivity::default(),
    )?;
    let pattern = LambertianPattern::from_semi_angle(preset.irradiance_angle_deg.to_radians())?;

    let cx = room.size_x / 2.0;
    let cy = room.size_y / 2.0;
    let corners = |half: f64| {
        [
            (cx - half, cy - half),
            (cx - half, cy + half),
            (cx + half, cy - half),
            (cx + half, cy + half),
        ]
    };

    let leds = corners(preset.led_spacing / 2.0)
        .iter()
        .map(|&(x, y)| {
            let pose = Pose::new(Vec3::new(x, y, PRESET_ROOM_Z), Vec3::DOWN)?;
            LedSource::new(pose, pattern, DEFAULT_TX_POWER_W)
        })
        .collect::<Result<Vec<_>>>()?;

    let pds = corners(preset.detector_spacing / 2.0)
        .iter()
        .map(|&(x, y)| {
            let pose = Pose::new(Vec3::new(x, y, PRESET_PLANE_Z), Vec3::UP)?;
            Photodetector::new(pose, DEFAULT_DETECTOR_AREA_M2, DEFAULT_FOV_RAD)
        })
        .collect::<Result<Vec<_>>>()?;

    Scenario::new(room, leds, pds, PRESET_PLANE_Z)
}
