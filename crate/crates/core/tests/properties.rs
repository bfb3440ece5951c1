//! Property tests for the algebraic invariants of the processing chain.

use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

use vitalwave_core::clutter::remove_static;
use vitalwave_core::config::RadarConfig;
use vitalwave_core::cube::AdcCube;
use vitalwave_core::phase::{dacm, IqSeries};
use vitalwave_core::scene::{synthesize, SceneSpec, TargetSpec, VitalModel};
use vitalwave_core::steering::{angle_steering, beat_to_range, range_steering, range_to_beat};

fn small_config() -> RadarConfig {
    RadarConfig {
        nf: 8,
        ns: 12,
        nv: 2,
        ..RadarConfig::default()
    }
}

fn human(range_m: f64, theta_rad: f64, amplitude: f64) -> TargetSpec {
    TargetSpec {
        range_m,
        theta_rad,
        amplitude,
        vital: Some(VitalModel {
            f_r_hz: 0.25,
            f_h_hz: 1.2,
            m_r_m: vec![1.5e-3],
            m_h_m: vec![3e-4],
        }),
    }
}

proptest! {
    #[test]
    fn steering_vectors_unit_modulus_and_norm(theta in -1.5f64..1.5, range in 0.1f64..4.5) {
        let nv = 8;
        let nf = 24;
        let a = angle_steering(theta, nv).unwrap();
        for e in &a {
            prop_assert!((e.norm() - 1.0).abs() < 1e-12);
        }
        let norm_sq: f64 = a.iter().map(|e| e.norm_sqr()).sum();
        prop_assert!((norm_sq - nv as f64).abs() < 1e-9);

        let omega = range_to_beat(range, 60.0e12);
        let s = range_steering(omega, 0.25e-6, nf).unwrap();
        for e in &s {
            prop_assert!((e.norm() - 1.0).abs() < 1e-12);
        }
        let norm_sq: f64 = s.iter().map(|e| e.norm_sqr()).sum();
        prop_assert!((norm_sq - nf as f64).abs() < 1e-9);
    }

    #[test]
    fn angle_steering_conjugate_symmetric(theta in 0.0f64..1.5) {
        let pos = angle_steering(theta, 6).unwrap();
        let neg = angle_steering(-theta, 6).unwrap();
        for (p, n) in pos.iter().zip(&neg) {
            prop_assert!((p.conj() - n).norm() < 1e-12);
        }
    }

    #[test]
    fn beat_range_round_trip(range in 1e-3f64..100.0, slope in 1e10f64..1e14) {
        let omega = range_to_beat(range, slope);
        let back = beat_to_range(omega, slope);
        prop_assert!((back - range).abs() <= 1e-12 * range);
    }

    #[test]
    fn dacm_increments_invariant_under_rotation(
        rotation in 0.0f64..(2.0 * PI),
        amp in 0.1f64..10.0,
        seed in 0u64..1000,
    ) {
        // A wandering arc; the demodulated increments must not change when
        // the whole arc is rotated by a global phase.
        let values: Vec<Complex64> = (0..48)
            .map(|m| {
                let phi = 1.1 * ((m as f64 + seed as f64) * 0.37).sin();
                Complex64::new(amp * phi.cos(), amp * phi.sin())
            })
            .collect();
        let rot = Complex64::new(rotation.cos(), rotation.sin());
        let base = IqSeries { values: values.clone(), omega_b: 0.0, theta_rad: 0.0 };
        let turned = IqSeries {
            values: values.iter().map(|z| z * rot).collect(),
            omega_b: 0.0,
            theta_rad: 0.0,
        };
        let a = dacm(&base, 0.05).unwrap();
        let b = dacm(&turned, 0.05).unwrap();
        for (wa, wb) in a.values.windows(2).zip(b.values.windows(2)) {
            prop_assert!(((wa[1] - wa[0]) - (wb[1] - wb[0])).abs() < 1e-12);
        }
    }

    #[test]
    fn synthesis_superposition(
        r1 in 0.3f64..4.0,
        r2 in 0.3f64..4.0,
        th1 in -1.2f64..1.2,
        th2 in -1.2f64..1.2,
        a2 in 0.1f64..20.0,
    ) {
        let cfg = small_config();
        let scene_a = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![human(r1, th1, 1.0)],
        };
        let clutter_only = TargetSpec { range_m: r2, theta_rad: th2, amplitude: a2, vital: None };
        let mut ghost = human(r2, th2, 0.0);
        ghost.amplitude = 0.0;
        let scene_b = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![clutter_only.clone(), ghost],
        };
        let combined = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![human(r1, th1, 1.0), clutter_only],
        };
        let ca = synthesize(&scene_a, &cfg).unwrap();
        let cb = synthesize(&scene_b, &cfg).unwrap();
        let cc = synthesize(&combined, &cfg).unwrap();
        for ((x, y), z) in ca.data().iter().zip(cb.data()).zip(cc.data()) {
            prop_assert!((x + y - z).norm() < 1e-12);
        }
    }

    #[test]
    fn clutter_removal_linear_in_input(seedx in 0u64..50, window in 1usize..12) {
        let cfg = small_config();
        let fill = |seed: u64| {
            let mut cube = AdcCube::zeroed(cfg.clone()).unwrap();
            for (i, z) in cube.data_mut().iter_mut().enumerate() {
                let p = (i as f64 + seed as f64 * 13.7) * 0.61;
                *z = Complex64::new(p.sin(), (p * 1.7).cos());
            }
            cube
        };
        let a = fill(seedx);
        let b = fill(seedx + 1);
        let mut sum = a.clone();
        for (z, w) in sum.data_mut().iter_mut().zip(b.data()) {
            *z += w;
        }
        let fa = remove_static(&a, window).unwrap();
        let fb = remove_static(&b, window).unwrap();
        let fs = remove_static(&sum, window).unwrap();
        for ((x, y), z) in fa.data().iter().zip(fb.data()).zip(fs.data()) {
            prop_assert!((x + y - z).norm() < 1e-10);
        }
    }

    #[test]
    fn cube_file_round_trip(seed in 0u64..100) {
        // f32 storage: values already representable in f32 survive exactly.
        let cfg = small_config();
        let mut cube = AdcCube::zeroed(cfg.clone()).unwrap();
        for (i, z) in cube.data_mut().iter_mut().enumerate() {
            let v = ((i as u64 * 2654435761 + seed) % 1000) as f64 / 8.0;
            *z = Complex64::new(v as f32 as f64, (-v * 0.5) as f32 as f64);
        }
        let mut buf = Vec::new();
        cube.write_to(&mut buf).unwrap();
        let back = AdcCube::read_from(&mut buf.as_slice(), cfg).unwrap();
        prop_assert_eq!(back, cube);
    }
}
