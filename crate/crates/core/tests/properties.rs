//! Property tests for the library invariants: geometric invariance under
//! rigid motions, superposition, smoothness under grid refinement, tail
//! spread of the ray-traced response, and canonical-emission idempotence.

use proptest::prelude::*;

use vlcsim_core::*;

fn vec3(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3::new(x, y, z)
}

/// Rodrigues rotation of `v` around unit `axis` by `angle`.
fn rotate(v: Vec3, axis: Vec3, angle: f64) -> Vec3 {
    let (sin, cos) = angle.sin_cos();
    let cross = axis.cross(v);
    let dot = axis.dot(v);
    v.scale(cos) + cross.scale(sin) + axis.scale(dot * (1.0 - cos))
}

fn unit_vector() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, az)| {
        let r = (1.0 - z * z).sqrt();
        vec3(r * az.cos(), r * az.sin(), z)
    })
}

fn position() -> impl Strategy<Value = Vec3> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(x, y, z)| vec3(x, y, z))
}

proptest! {
    /// Irradiance and incidence angles are invariant under rigid motions of
    /// the whole scene.
    #[test]
    fn link_angles_invariant_under_rigid_transforms(
        tx_pos in position(),
        rx_pos in position(),
        tx_n in unit_vector(),
        rx_n in unit_vector(),
        axis in unit_vector(),
        angle in 0.0f64..std::f64::consts::TAU,
        shift in position(),
    ) {
        prop_assume!((rx_pos - tx_pos).norm() > 1e-3);

        let tx = Pose::new(tx_pos, tx_n).unwrap();
        let rx = Pose::new(rx_pos, rx_n).unwrap();
        let original = link_geometry(&tx, &rx).unwrap();

        let move_point = |p: Vec3| rotate(p, axis, angle) + shift;
        let move_dir = |n: Vec3| rotate(n, axis, angle);
        let tx2 = Pose::new(move_point(tx_pos), move_dir(tx_n)).unwrap();
        let rx2 = Pose::new(move_point(rx_pos), move_dir(rx_n)).unwrap();
        let moved = link_geometry(&tx2, &rx2).unwrap();

        prop_assert!((original.irradiance_angle - moved.irradiance_angle).abs() < 1e-9);
        prop_assert!((original.incidence_angle - moved.incidence_angle).abs() < 1e-9);
        prop_assert!((original.distance - moved.distance).abs() < 1e-9);
    }

    /// LOS gain is nonnegative for every valid link.
    #[test]
    fn los_gain_nonnegative(
        tx_pos in position(),
        rx_pos in position(),
        tx_n in unit_vector(),
        rx_n in unit_vector(),
        semi_deg in 1.0f64..89.0,
        area in 1e-6f64..1e-2,
        fov_deg in 1.0f64..90.0,
    ) {
        prop_assume!((rx_pos - tx_pos).norm() > 1e-6);
        let pattern = LambertianPattern::from_semi_angle(semi_deg.to_radians()).unwrap();
        let led = LedSource::new(Pose::new(tx_pos, tx_n).unwrap(), pattern, 1.0).unwrap();
        let pd = Photodetector::new(
            Pose::new(rx_pos, rx_n).unwrap(),
            area,
            fov_deg.to_radians(),
        )
        .unwrap();
        let h = los_gain(&led, &pd).unwrap();
        prop_assert!(h.is_finite());
        prop_assert!(h >= 0.0);
    }

    /// Received power superposes: the union of two LED sets delivers the sum
    /// of what each set delivers alone.
    #[test]
    fn received_power_superposition(
        xs in prop::collection::vec((0.5f64..3.5, 0.5f64..3.5, 2.0f64..3.0), 2..6),
        split in 1usize..3,
        pd_xy in (0.5f64..3.5, 0.5f64..3.5),
    ) {
        prop_assume!(split < xs.len());
        let pattern = LambertianPattern::from_semi_angle(50.0f64.to_radians()).unwrap();
        let leds: Vec<LedSource> = xs
            .iter()
            .map(|&(x, y, z)| {
                LedSource::new(Pose::new(vec3(x, y, z), Vec3::DOWN).unwrap(), pattern, 2.5).unwrap()
            })
            .collect();
        let pd = Photodetector::new(
            Pose::new(vec3(pd_xy.0, pd_xy.1, 0.75), Vec3::UP).unwrap(),
            1e-4,
            std::f64::consts::FRAC_PI_2,
        )
        .unwrap();

        let first = &leds[..split];
        let second = &leds[split..];
        let pd_slice = std::slice::from_ref(&pd);
        let p_first = received_power(first, &channel_matrix(first, pd_slice).unwrap()).unwrap()[0];
        let p_second = received_power(second, &channel_matrix(second, pd_slice).unwrap()).unwrap()[0];
        let p_all = received_power(&leds, &channel_matrix(&leds, &[pd]).unwrap()).unwrap()[0];

        let sum = p_first + p_second;
        prop_assert!((p_all - sum).abs() <= 1e-12 * sum.abs().max(1e-300));
    }
}

proptest! {
    /// Emission is a canonical form: re-emitting a parsed emission
    /// reproduces the bytes, even when the original scenario carried
    /// full-precision values.
    #[test]
    fn emission_is_idempotent(
        led_x in 0.0f64..4.0,
        led_y in 0.0f64..4.0,
        semi_deg in 1.0f64..89.0,
        power in 0.1f64..10.0,
        plane in 0.0f64..3.0,
    ) {
        let pattern = LambertianPattern::from_semi_angle(semi_deg.to_radians()).unwrap();
        let room = Room::new(4.0, 4.0, 3.0, SurfaceReflectivity::default()).unwrap();
        let led = LedSource::new(
            Pose::new(vec3(led_x, led_y, 3.0), Vec3::DOWN).unwrap(),
            pattern,
            power,
        )
        .unwrap();
        let scenario = Scenario::new(room, vec![led], vec![], plane).unwrap();

        let first = emit_scenario(&scenario);
        let reparsed = parse_scenario(&first).unwrap();
        let second = emit_scenario(&reparsed);
        prop_assert_eq!(first, second);
    }
}

#[test]
fn grid_refinement_is_smooth_for_wide_beams() {
    // Doubling the grid moves interpolated samples by far less than 0.5%
    // when the beam is wide enough for bilinear interpolation to track.
    let text = r#"{
        "room": {"size_x": 4.0, "size_y": 4.0, "size_z": 3.0},
        "leds": [{"position": [2.0, 2.0, 3.0], "semi_angle_deg": 60.0}],
        "plane_z": 0.75
    }"#;
    let scenario = parse_scenario(text).unwrap();
    let coarse = sweep_plane(&scenario, &GridSpec::DEFAULT).unwrap();
    let fine = sweep_plane(&scenario, &GridSpec::new(161, 161).unwrap()).unwrap();
    for gx in 0..40 {
        for gy in 0..40 {
            let x = 0.0137 + gx as f64 * 0.0987;
            let y = 0.0213 + gy as f64 * 0.0987;
            let a = coarse.sample_bilinear(x, y).unwrap();
            let b = fine.sample_bilinear(x, y).unwrap();
            assert!(
                ((a - b) / b).abs() < 0.005,
                "interpolated power moved {:.3}% at ({x}, {y})",
                ((a - b) / b).abs() * 100.0
            );
        }
    }
}

#[test]
fn grid_refinement_bounded_for_presets() {
    // The narrow presets change by well under 5% of peak at any probe point;
    // relative changes at the beam flanks are larger because cos^m walls are
    // steeper than any practical grid.
    for preset in &ScenarioPreset::TABLE1 {
        let scenario = preset_scenario(preset).unwrap();
        let coarse = sweep_plane(&scenario, &GridSpec::DEFAULT).unwrap();
        let fine = sweep_plane(&scenario, &GridSpec::new(161, 161).unwrap()).unwrap();
        let peak = coarse.values().iter().cloned().fold(0.0f64, f64::max);
        for gx in 0..40 {
            for gy in 0..40 {
                let x = 0.0137 + gx as f64 * 0.0987;
                let y = 0.0213 + gy as f64 * 0.0987;
                let a = coarse.sample_bilinear(x, y).unwrap();
                let b = fine.sample_bilinear(x, y).unwrap();
                assert!(
                    (a - b).abs() / peak < 0.03,
                    "{}: grid change {:.3}% of peak at ({x}, {y})",
                    preset.name(),
                    (a - b).abs() / peak * 100.0
                );
            }
        }
    }
}

#[test]
fn reflected_tail_spread_across_presets() {
    // The diffuse tail spans multiple delay bins for the wider presets. The
    // 4° beam is quasi-collimated and its tail spread lands just under one
    // bin; pin it so the boundary is tracked.
    let spreads: Vec<f64> = ScenarioPreset::TABLE1
        .iter()
        .map(|preset| {
            let s = preset_scenario(preset).unwrap();
            let ir = impulse_response(&s, 0, 0, DEFAULT_PATCH_SIZE_M, DEFAULT_BIN_WIDTH_S).unwrap();
            ir.rms_delay_spread().unwrap()
        })
        .collect();

    for (i, spread) in spreads.iter().enumerate().skip(1) {
        assert!(
            *spread > DEFAULT_BIN_WIDTH_S,
            "preset {} tail spread {spread:e} not broader than one bin",
            ScenarioPreset::TABLE1[i].name()
        );
    }
    assert!(spreads[0] > 0.9 * DEFAULT_BIN_WIDTH_S && spreads[0] < DEFAULT_BIN_WIDTH_S);
    // Wider beams light more of the walls, broadening the tail.
    for pair in spreads.windows(2) {
        assert!(pair[0] < pair[1]);
    }
}

#[test]
fn narrow_beam_concentration() {
    // The 4° preset concentrates plane power into tight discs under the
    // LEDs. The cos^{m+1} tail puts 81.8% (frozen; the closed form
    // 1 − cos^{m+1}(atan(r/2.25)) agrees) inside 0.25 m of
    // the sub-LED points, and better than 99% inside 0.45 m.
    let scenario = preset_scenario(&ScenarioPreset::TABLE1[0]).unwrap();
    let map = sweep_plane(&scenario, &GridSpec::DEFAULT).unwrap();
    let led_xy: Vec<(f64, f64)> = scenario
        .leds
        .iter()
        .map(|l| (l.pose.position().x, l.pose.position().y))
        .collect();

    let total: f64 = map.points().map(|(_, _, p)| p).sum();
    let within = |radius: f64| -> f64 {
        map.points()
            .filter(|(x, y, _)| {
                led_xy
                    .iter()
                    .any(|(lx, ly)| ((x - lx).powi(2) + (y - ly).powi(2)).sqrt() <= radius)
            })
            .map(|(_, _, p)| p)
            .sum::<f64>()
            / total
    };

    let quarter = within(0.25);
    assert!((quarter - 0.818).abs() < 0.02, "0.25 m capture = {quarter}");
    assert!(within(0.45) >= 0.99);
}

#[test]
fn dbm_conversion_sentinels() {
    assert_eq!(watts_to_dbm(1e-3), 0.0);
    assert_eq!(watts_to_dbm(0.0), f64::NEG_INFINITY);
    assert!((watts_to_dbm(1.0) - 30.0).abs() < 1e-12);
}
