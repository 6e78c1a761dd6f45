//! Scenario files: JSON parsing with field-level validation, and canonical
//! emission.
//!
//! The document schema mirrors the scenario types; angles are degrees in
//! files and radians in the library. Omitted optional fields take the
//! documented defaults (1 W per LED, 1 cm² detectors, 90° FOV, reflectivity
//! 0.8, LED normals down, detector normals up). Emission is canonical:
//! alphabetical keys, fixed layout, 9 significant digits — two emits of the
//! same scenario are byte-identical, and parsing an emitted document
//! restores the scenario exactly whenever its parameters are representable
//! in 9 significant digits (the presets and any hand-written file are).

use serde::Deserialize;
use std::fmt::Write as _;

use crate::channel::{LedSource, Photodetector};
use crate::error::{Result, SimError};
use crate::format::fmt_sig;
use crate::geometry::{Pose, Vec3};
use crate::lambertian::LambertianPattern;
use crate::scenario::{
    Room, Scenario, SurfaceReflectivity, DEFAULT_DETECTOR_AREA_M2, DEFAULT_FOV_RAD,
    DEFAULT_REFLECTIVITY, DEFAULT_TX_POWER_W,
};

fn default_rho() -> f64 {
    DEFAULT_REFLECTIVITY
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReflectivityDoc {
    #[serde(default = "default_rho")]
    ceiling: f64,
    #[serde(default = "default_rho")]
    floor: f64,
    #[serde(default = "default_rho")]
    wall_x0: f64,
    #[serde(default = "default_rho")]
    wall_x1: f64,
    #[serde(default = "default_rho")]
    wall_y0: f64,
    #[serde(default = "default_rho")]
    wall_y1: f64,
}

impl Default for ReflectivityDoc {
    fn default() -> Self {
        Self {
            ceiling: DEFAULT_REFLECTIVITY,
            floor: DEFAULT_REFLECTIVITY,
            wall_x0: DEFAULT_REFLECTIVITY,
            wall_x1: DEFAULT_REFLECTIVITY,
            wall_y0: DEFAULT_REFLECTIVITY,
            wall_y1: DEFAULT_REFLECTIVITY,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomDoc {
    size_x: f64,
    size_y: f64,
    size_z: f64,
    #[serde(default)]
    reflectivity: ReflectivityDoc,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LedDoc {
    position: [f64; 3],
    #[serde(default)]
    normal: Option<[f64; 3]>,
    semi_angle_deg: f64,
    #[serde(default)]
    tx_power_w: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PdDoc {
    position: [f64; 3],
    #[serde(default)]
    normal: Option<[f64; 3]>,
    #[serde(default)]
    area_m2: Option<f64>,
    #[serde(default)]
    fov_deg: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    room: RoomDoc,
    leds: Vec<LedDoc>,
    #[serde(default)]
    pds: Vec<PdDoc>,
    plane_z: f64,
}

fn vec3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

/// Rewrap a constructor error with the document field it came from.
fn field_err(field: String, err: SimError) -> SimError {
    let message = match err {
        SimError::Validation { message, .. } => message,
        SimError::InvalidArgument(m)
        | SimError::OutOfDomain(m)
        | SimError::DegenerateGeometry(m) => m,
        other => other.to_string(),
    };
    SimError::validation(field, message)
}

/// Parse a UTF-8 scenario document into a validated [`Scenario`].
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc =
        serde_json::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;

    let refl = SurfaceReflectivity {
        floor: doc.room.reflectivity.floor,
        ceiling: doc.room.reflectivity.ceiling,
        wall_x0: doc.room.reflectivity.wall_x0,
        wall_x1: doc.room.reflectivity.wall_x1,
        wall_y0: doc.room.reflectivity.wall_y0,
        wall_y1: doc.room.reflectivity.wall_y1,
    };
    let room = Room::new(doc.room.size_x, doc.room.size_y, doc.room.size_z, refl)?;

    let mut leds = Vec::with_capacity(doc.leds.len());
    for (i, led) in doc.leds.iter().enumerate() {
        let normal = led.normal.map(vec3).unwrap_or(Vec3::DOWN);
        let pose = Pose::new(vec3(led.position), normal)
            .map_err(|e| field_err(format!("leds[{i}].normal"), e))?;
        let pattern = LambertianPattern::from_semi_angle(led.semi_angle_deg.to_radians())
            .map_err(|e| field_err(format!("leds[{i}].semi_angle_deg"), e))?;
        let power = led.tx_power_w.unwrap_or(DEFAULT_TX_POWER_W);
        leds.push(
            LedSource::new(pose, pattern, power)
                .map_err(|e| field_err(format!("leds[{i}].tx_power_w"), e))?,
        );
    }

    let mut pds = Vec::with_capacity(doc.pds.len());
    for (i, pd) in doc.pds.iter().enumerate() {
        let normal = pd.normal.map(vec3).unwrap_or(Vec3::UP);
        let pose = Pose::new(vec3(pd.position), normal)
            .map_err(|e| field_err(format!("pds[{i}].normal"), e))?;
        let area = pd.area_m2.unwrap_or(DEFAULT_DETECTOR_AREA_M2);
        let fov = pd.fov_deg.map(f64::to_radians).unwrap_or(DEFAULT_FOV_RAD);
        pds.push(
            Photodetector::new(pose, area, fov).map_err(|e| field_err(format!("pds[{i}]"), e))?,
        );
    }

    Scenario::new(room, leds, pds, doc.plane_z)
}

fn fmt_vec3(v: Vec3) -> String {
    format!("[{}, {}, {}]", fmt_sig(v.x), fmt_sig(v.y), fmt_sig(v.z))
}

/// Emit the canonical scenario document. Keys are alphabetical at every
/// level, numbers carry 9 significant digits, and all defaults are written
/// out explicitly.
pub fn emit_scenario(scenario: &Scenario) -> String {
    let mut out = String::new();
    out.push_str("{\n");

    out.push_str("  \"leds\": [\n");
    for (i, led) in scenario.leds.iter().enumerate() {
        let comma = if i + 1 < scenario.leds.len() { "," } else { "" };
        writeln!(out, "    {{").unwrap();
        writeln!(out, "      \"normal\": {},", fmt_vec3(led.pose.normal())).unwrap();
        writeln!(
            out,
            "      \"position\": {},",
            fmt_vec3(led.pose.position())
        )
        .unwrap();
        writeln!(
            out,
            "      \"semi_angle_deg\": {},",
            fmt_sig(led.pattern.semi_angle().to_degrees())
        )
        .unwrap();
        writeln!(out, "      \"tx_power_w\": {}", fmt_sig(led.tx_power)).unwrap();
        writeln!(out, "    }}{comma}").unwrap();
    }
    out.push_str("  ],\n");

    out.push_str("  \"pds\": [");
    if scenario.pds.is_empty() {
        out.push_str("],\n");
    } else {
        out.push('\n');
        for (i, pd) in scenario.pds.iter().enumerate() {
            let comma = if i + 1 < scenario.pds.len() { "," } else { "" };
            writeln!(out, "    {{").unwrap();
            writeln!(out, "      \"area_m2\": {},", fmt_sig(pd.area)).unwrap();
            writeln!(out, "      \"fov_deg\": {},", fmt_sig(pd.fov.to_degrees())).unwrap();
            writeln!(out, "      \"normal\": {},", fmt_vec3(pd.pose.normal())).unwrap();
            writeln!(out, "      \"position\": {}", fmt_vec3(pd.pose.position())).unwrap();
            writeln!(out, "    }}{comma}").unwrap();
        }
        out.push_str("  ],\n");
    }

    writeln!(out, "  \"plane_z\": {},", fmt_sig(scenario.plane_z)).unwrap();

    out.push_str("  \"room\": {\n");
    out.push_str("    \"reflectivity\": {\n");
    let r = &scenario.room.reflectivity;
    writeln!(out, "      \"ceiling\": {},", fmt_sig(r.ceiling)).unwrap();
    writeln!(out, "      \"floor\": {},", fmt_sig(r.floor)).unwrap();
    writeln!(out, "      \"wall_x0\": {},", fmt_sig(r.wall_x0)).unwrap();
    writeln!(out, "      \"wall_x1\": {},", fmt_sig(r.wall_x1)).unwrap();
    writeln!(out, "      \"wall_y0\": {},", fmt_sig(r.wall_y0)).unwrap();
    writeln!(out, "      \"wall_y1\": {}", fmt_sig(r.wall_y1)).unwrap();
    out.push_str("    },\n");
    writeln!(out, "    \"size_x\": {},", fmt_sig(scenario.room.size_x)).unwrap();
    writeln!(out, "    \"size_y\": {},", fmt_sig(scenario.room.size_y)).unwrap();
    writeln!(out, "    \"size_z\": {}", fmt_sig(scenario.room.size_z)).unwrap();
    out.push_str("  }\n");
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{preset_scenario, ScenarioPreset};

    #[test]
    fn minimal_document_takes_defaults() {
        let text = r#"{
            "room": {"size_x": 4.0, "size_y": 4.0, "size_z": 3.0},
            "leds": [{"position": [2.0, 2.0, 3.0], "semi_angle_deg": 60.0}],
            "plane_z": 0.75
        }"#;
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.leds.len(), 1);
        assert_eq!(s.leds[0].tx_power, DEFAULT_TX_POWER_W);
        assert_eq!(s.leds[0].pose.normal(), Vec3::DOWN);
        assert_eq!(s.room.reflectivity.floor, DEFAULT_REFLECTIVITY);
        assert!(s.pds.is_empty());
    }

    #[test]
    fn pd_defaults_applied() {
        let text = r#"{
            "room": {"size_x": 4.0, "size_y": 4.0, "size_z": 3.0},
            "leds": [{"position": [2.0, 2.0, 3.0], "semi_angle_deg": 60.0}],
            "pds": [{"position": [2.0, 2.0, 0.75]}],
            "plane_z": 0.75
        }"#;
        let s = parse_scenario(text).unwrap();
        assert_eq!(s.pds[0].area, DEFAULT_DETECTOR_AREA_M2);
        assert_eq!(s.pds[0].fov, DEFAULT_FOV_RAD);
        assert_eq!(s.pds[0].pose.normal(), Vec3::UP);
    }

    #[test]
    fn semi_angle_out_of_domain_names_the_field() {
        let text = r#"{
            "room": {"size_x": 4.0, "size_y": 4.0, "size_z": 3.0},
            "leds": [{"position": [2.0, 2.0, 3.0], "semi_angle_deg": 95.0}],
            "plane_z": 0.75
        }"#;
        match parse_scenario(text) {
            Err(SimError::Validation { field, .. }) => {
                assert_eq!(field, "leds[0].semi_angle_deg")
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn led_outside_room_rejected() {
        let text = r#"{
            "room": {"size_x": 4.0, "size_y": 4.0, "size_z": 3.0},
            "leds": [{"position": [2.0, 2.0, 3.5], "semi_angle_deg": 60.0}],
            "plane_z": 0.75
        }"#;
        match parse_scenario(text) {
            Err(SimError::Validation { field, .. }) => assert_eq!(field, "leds[0].position"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_syntax_is_a_parse_error() {
        match parse_scenario("{ not json") {
            Err(SimError::Parse(msg)) => assert!(msg.contains("line"), "message: {msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{
            "room": {"size_x": 4.0, "size_y": 4.0, "size_z": 3.0, "height": 2.0},
            "leds": [{"position": [2.0, 2.0, 3.0], "semi_angle_deg": 60.0}],
            "plane_z": 0.75
        }"#;
        assert!(matches!(parse_scenario(text), Err(SimError::Parse(_))));
    }

    #[test]
    fn presets_round_trip_exactly() {
        for preset in ScenarioPreset::TABLE1 {
            let scenario = preset_scenario(&preset).unwrap();
            let doc = emit_scenario(&scenario);
            let parsed = parse_scenario(&doc).unwrap();
            assert_eq!(parsed, scenario, "round trip for {}", preset.name());
        }
    }

    #[test]
    fn emission_is_canonical() {
        let scenario = preset_scenario(&ScenarioPreset::TABLE1[0]).unwrap();
        let a = emit_scenario(&scenario);
        let b = emit_scenario(&scenario);
        assert_eq!(a, b);
        // Defaults appear explicitly.
        assert!(a.contains("\"tx_power_w\": 1.00000000"));
        assert!(a.contains("\"fov_deg\": 90.0000000"));
        assert!(a.contains("\"ceiling\": 0.800000000"));
    }

    #[test]
    fn emitted_document_is_valid_json() {
        let scenario = preset_scenario(&ScenarioPreset::TABLE1[2]).unwrap();
        let doc = emit_scenario(&scenario);
        let value: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert!(value.get("room").is_some());
    }
}
