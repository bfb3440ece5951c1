//! Scene description and ADC cube synthesis.
//!
//! A scene is a set of point targets: static clutter points plus exactly one
//! human whose range is modulated by a harmonic chest-displacement model.
//! Synthesis provides the ground truth every downstream estimator is tested
//! against.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::config::RadarConfig;
use crate::cube::AdcCube;
use crate::error::{Error, Result};
use crate::steering::{cis, range_to_beat};

/// Harmonic chest-displacement model: `L` harmonics each for respiration
/// and heartbeat, amplitudes in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitalModel {
    /// Respiration fundamental (Hz).
    pub f_r_hz: f64,
    /// Heartbeat fundamental (Hz).
    pub f_h_hz: f64,
    /// Respiration harmonic displacement amplitudes (m), length `L`.
    pub m_r_m: Vec<f64>,
    /// Heartbeat harmonic displacement amplitudes (m), length `L`.
    pub m_h_m: Vec<f64>,
}

impl VitalModel {
    /// Number of modeled harmonics per source.
    pub fn harmonic_count(&self) -> usize {
        self.m_r_m.len()
    }

    pub fn validate(&self, ts_s: f64) -> Result<()> {
        if self.m_r_m.is_empty() || self.m_r_m.len() != self.m_h_m.len() {
            return Err(Error::Scene(format!(
                "harmonic amplitude lists must be non-empty and equal length, got {} and {}",
                self.m_r_m.len(),
                self.m_h_m.len()
            )));
        }
        if !(self.f_r_hz.is_finite() && self.f_h_hz.is_finite()) || self.f_r_hz <= 0.0 {
            return Err(Error::Scene("fundamentals must be finite and positive".into()));
        }
        if self.f_r_hz >= self.f_h_hz {
            return Err(Error::Scene(format!(
                "respiration fundamental {} Hz must lie below heartbeat fundamental {} Hz",
                self.f_r_hz, self.f_h_hz
            )));
        }
        let nyquist = 0.5 / ts_s;
        if self.f_h_hz >= nyquist {
            return Err(Error::Scene(format!(
                "heartbeat fundamental {} Hz at or above slow-time Nyquist {} Hz",
                self.f_h_hz, nyquist
            )));
        }
        if self
            .m_r_m
            .iter()
            .chain(self.m_h_m.iter())
            .any(|a| !a.is_finite() || *a < 0.0)
        {
            return Err(Error::Scene("harmonic amplitudes must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// One point target. `vital` present means a human; absent means static
/// clutter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    /// Nominal range (m).
    pub range_m: f64,
    /// Azimuth (rad), in [-pi/2, pi/2].
    pub theta_rad: f64,
    /// Dimensionless reflectivity.
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vital: Option<VitalModel>,
}

/// Declarative scene: targets, complex noise level, RNG seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    /// Standard deviation of the complex noise per sample
    /// (`E[|w|^2] = noise_sigma^2`).
    pub noise_sigma: f64,
    /// Seed for the reproducible noise stream.
    pub seed: u64,
    pub targets: Vec<TargetSpec>,
}

impl SceneSpec {
    pub fn validate(&self, config: &RadarConfig) -> Result<()> {
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Scene("noise_sigma must be finite and >= 0".into()));
        }
        let humans = self.targets.iter().filter(|t| t.vital.is_some()).count();
        if humans != 1 {
            return Err(Error::Scene(format!(
                "scene must contain exactly one human target, found {humans}"
            )));
        }
        let max_range = config.unambiguous_range_m(1);
        for (i, t) in self.targets.iter().enumerate() {
            if !(t.range_m.is_finite() && t.range_m > 0.0 && t.range_m < max_range) {
                return Err(Error::Scene(format!(
                    "target {i} range {} m outside (0, {max_range:.3}) m",
                    t.range_m
                )));
            }
            if !t.theta_rad.is_finite() || t.theta_rad.abs() > PI / 2.0 {
                return Err(Error::Scene(format!(
                    "target {i} azimuth {} rad outside [-pi/2, pi/2]",
                    t.theta_rad
                )));
            }
            if !t.amplitude.is_finite() {
                return Err(Error::Scene(format!("target {i} amplitude not finite")));
            }
            if let Some(vital) = &t.vital {
                vital.validate(config.ts_s)?;
            }
        }
        Ok(())
    }

    /// The human target. Call only on validated scenes.
    pub fn human(&self) -> &TargetSpec {
        self.targets
            .iter()
            .find(|t| t.vital.is_some())
            .expect("validated scene has a human target")
    }
}

/// Chest displacement at time `t >= 0` (m):
/// `sum_l m_r[l]*cos(l*2*pi*f_r*t) + sum_l m_h[l]*cos(l*2*pi*f_h*t)`.
pub fn displacement(vital: &VitalModel, t_s: f64) -> f64 {
    let mut x = 0.0;
    for (l, amp) in vital.m_r_m.iter().enumerate() {
        x += amp * ((l + 1) as f64 * 2.0 * PI * vital.f_r_hz * t_s).cos();
    }
    for (l, amp) in vital.m_h_m.iter().enumerate() {
        x += amp * ((l + 1) as f64 * 2.0 * PI * vital.f_h_hz * t_s).cos();
    }
    x
}

/// Synthesize the ADC cube for a scene.
///
/// Sample model per target:
/// `A * exp(j*(n*omega_b(R_m)*Tf + (4*pi/lambda0)*R_m)) * exp(j*2*pi*(d/lambda)*v*sin(theta))`
/// where `R_m = range + displacement(m*Ts)` for the human and the nominal
/// range for clutter. The beat frequency uses the instantaneous range, so
/// the synthesized truth is slightly richer than the constant-beat model
/// the estimators assume. Noise is circular complex Gaussian with standard
/// deviation `noise_sigma`, drawn from a per-frame stream derived from
/// `(seed, m)`.
pub fn synthesize(scene: &SceneSpec, config: &RadarConfig) -> Result<AdcCube> {
    scene.validate(config)?;
    let mut cube = AdcCube::zeroed(config.clone())?;
    let four_pi_over_lambda = 4.0 * PI / config.lambda0_m();

    for target in &scene.targets {
        let antenna_step = 2.0 * PI * config.d_over_lambda * target.theta_rad.sin();
        for m in 0..config.ns {
            let t = m as f64 * config.ts_s;
            let range = match &target.vital {
                Some(vital) => target.range_m + displacement(vital, t),
                None => target.range_m,
            };
            let omega_b = range_to_beat(range, config.slope_hz_per_s);
            let base = cis(four_pi_over_lambda * range) * target.amplitude;
            let fast_step = cis(omega_b * config.tf_s);
            for v in 0..config.nv {
                let start = cube.index(m, v, 0);
                let mut phasor = base * cis(v as f64 * antenna_step);
                let row = &mut cube.data_mut()[start..start + config.nf];
                for sample in row.iter_mut() {
                    *sample += phasor;
                    phasor *= fast_step;
                }
            }
        }
    }

    if scene.noise_sigma > 0.0 {
        let component_sigma = scene.noise_sigma / std::f64::consts::SQRT_2;
        for m in 0..config.ns {
            let mut rng = frame_rng(scene.seed, m);
            let start = cube.index(m, 0, 0);
            let row = &mut cube.data_mut()[start..start + config.nv * config.nf];
            for sample in row.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *sample += Complex64::new(re * component_sigma, im * component_sigma);
            }
        }
    }

    Ok(cube)
}

/// Noise stream for frame `m`: one ChaCha stream per frame so frames can be
/// generated independently without changing the result.
fn frame_rng(seed: u64, m: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(m as u64 + 1);
    rng
}

/// Scene document as stored on disk: the scene plus an optional radar
/// configuration override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radar: Option<RadarConfig>,
    pub scene: SceneSpec,
}

impl SceneFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Scene(format!("parse error: {e}")))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scene serializes")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_file(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_toml_string())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_config() -> RadarConfig {
        RadarConfig {
            nf: 16,
            ns: 8,
            nv: 2,
            ..RadarConfig::default()
        }
    }

    fn human(range_m: f64, theta_rad: f64, vital: VitalModel) -> TargetSpec {
        TargetSpec {
            range_m,
            theta_rad,
            amplitude: 1.0,
            vital: Some(vital),
        }
    }

    fn quiet_vital() -> VitalModel {
        VitalModel {
            f_r_hz: 0.25,
            f_h_hz: 1.2,
            m_r_m: vec![0.0],
            m_h_m: vec![0.0],
        }
    }

    #[test]
    fn displacement_zero_amplitudes() {
        assert_eq!(displacement(&quiet_vital(), 3.7), 0.0);
    }

    #[test]
    fn displacement_single_harmonic_quadrature() {
        let vital = VitalModel {
            f_r_hz: 0.25,
            f_h_hz: 1.2,
            m_r_m: vec![1e-3],
            m_h_m: vec![0.0],
        };
        assert_relative_eq!(displacement(&vital, 0.0), 1e-3, max_relative = 1e-15);
        // Quarter period of 0.25 Hz is 1 s: cos(pi/2) = 0.
        assert!(displacement(&vital, 1.0).abs() < 1e-18);
        assert_relative_eq!(displacement(&vital, 2.0), -1e-3, max_relative = 1e-12);
    }

    #[test]
    fn displacement_matches_term_by_term_oracle() {
        let vital = VitalModel {
            f_r_hz: 0.3,
            f_h_hz: 1.2,
            m_r_m: vec![1e-3, 3e-4],
            m_h_m: vec![1e-4, 0.0],
        };
        let t = 0.7;
        // Independent scalar evaluation, term by term.
        let expect = 1e-3 * (2.0 * PI * 0.3 * t).cos()
            + 3e-4 * (2.0 * 2.0 * PI * 0.3 * t).cos()
            + 1e-4 * (2.0 * PI * 1.2 * t).cos();
        assert_relative_eq!(displacement(&vital, t), expect, max_relative = 1e-14);
    }

    #[test]
    fn static_scene_frames_identical() {
        let cfg = small_config();
        let scene = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![
                human(1.0, 0.2, quiet_vital()),
                TargetSpec {
                    range_m: 2.0,
                    theta_rad: -0.4,
                    amplitude: 3.0,
                    vital: None,
                },
            ],
        };
        let cube = synthesize(&scene, &cfg).unwrap();
        let first = cube.frame(0).to_vec();
        for m in 1..cfg.ns {
            for (a, b) in cube.frame(m).iter().zip(&first) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_vital_amplitudes_match_static_target() {
        let cfg = small_config();
        let as_human = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![human(1.3, 0.1, quiet_vital())],
        };
        // Same point as clutter, with a zero-amplitude human far away to
        // satisfy the one-human invariant; its contribution is subtracted.
        let mut ghost = human(2.6, -0.5, quiet_vital());
        ghost.amplitude = 0.0;
        let as_static = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![
                TargetSpec {
                    range_m: 1.3,
                    theta_rad: 0.1,
                    amplitude: 1.0,
                    vital: None,
                },
                ghost,
            ],
        };
        let a = synthesize(&as_human, &cfg).unwrap();
        let b = synthesize(&as_static, &cfg).unwrap();
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn fast_time_spectrum_peaks_at_beat_bin() {
        // Human at 1.0 m: f_b = 2*S*R/c ~ 400 kHz, bin f_b*Nf*Tf.
        let cfg = RadarConfig {
            nf: 64,
            ns: 4,
            nv: 1,
            ..RadarConfig::default()
        };
        let scene = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![human(1.0, 0.0, quiet_vital())],
        };
        let cube = synthesize(&scene, &cfg).unwrap();
        let f_b = 2.0 * cfg.slope_hz_per_s * 1.0 / crate::config::SPEED_OF_LIGHT;
        let expect_bin = (f_b * cfg.nf as f64 * cfg.tf_s).round() as usize;
        // Plain DFT of the first frame's fast-time row.
        let row = &cube.frame(0)[0..cfg.nf];
        let mut best = (0usize, 0.0f64);
        for k in 0..cfg.nf {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, z) in row.iter().enumerate() {
                acc += z * cis(-2.0 * PI * k as f64 * n as f64 / cfg.nf as f64);
            }
            if acc.norm() > best.1 {
                best = (k, acc.norm());
            }
        }
        assert_eq!(best.0, expect_bin, "peak bin {} expected {}", best.0, expect_bin);
    }

    #[test]
    fn carrier_phase_tracks_displacement_at_first_fast_time_sample() {
        let cfg = small_config();
        let vital = VitalModel {
            f_r_hz: 0.25,
            f_h_hz: 1.2,
            m_r_m: vec![2e-3],
            m_h_m: vec![3e-4],
        };
        let scene = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![human(1.0, 0.0, vital.clone())],
        };
        let cube = synthesize(&scene, &cfg).unwrap();
        let four_pi_over_lambda = 4.0 * PI / cfg.lambda0_m();
        for m in 1..cfg.ns {
            let got = (cube.get(m, 0, 0) * cube.get(0, 0, 0).conj()).arg();
            let want = four_pi_over_lambda
                * (displacement(&vital, m as f64 * cfg.ts_s) - displacement(&vital, 0.0));
            // Compare modulo 2*pi.
            let diff = (got - want).rem_euclid(2.0 * PI);
            let diff = diff.min(2.0 * PI - diff);
            assert!(diff < 1e-9, "frame {m}: got {got}, want {want}");
        }
    }

    #[test]
    fn noise_is_seed_reproducible() {
        let cfg = small_config();
        let mut scene = SceneSpec {
            noise_sigma: 0.5,
            seed: 42,
            targets: vec![human(1.0, 0.0, quiet_vital())],
        };
        let a = synthesize(&scene, &cfg).unwrap();
        let b = synthesize(&scene, &cfg).unwrap();
        assert_eq!(a, b);
        scene.seed = 43;
        let c = synthesize(&scene, &cfg).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_invalid_scenes() {
        let cfg = small_config();
        // No human.
        let scene = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![TargetSpec {
                range_m: 1.0,
                theta_rad: 0.0,
                amplitude: 1.0,
                vital: None,
            }],
        };
        assert!(synthesize(&scene, &cfg).is_err());
        // Two humans.
        let scene = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![human(1.0, 0.0, quiet_vital()), human(2.0, 0.0, quiet_vital())],
        };
        assert!(synthesize(&scene, &cfg).is_err());
        // Range beyond the unambiguous limit.
        let scene = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![human(cfg.unambiguous_range_m(1) + 1.0, 0.0, quiet_vital())],
        };
        assert!(synthesize(&scene, &cfg).is_err());
        // Heartbeat above slow-time Nyquist.
        let bad = VitalModel {
            f_h_hz: 11.0,
            ..quiet_vital()
        };
        let scene = SceneSpec {
            noise_sigma: 0.0,
            seed: 0,
            targets: vec![human(1.0, 0.0, bad)],
        };
        assert!(synthesize(&scene, &cfg).is_err());
    }

    #[test]
    fn scene_file_round_trip() {
        let doc = SceneFile {
            radar: Some(small_config()),
            scene: SceneSpec {
                noise_sigma: 0.01,
                seed: 7,
                targets: vec![
                    human(
                        1.0,
                        0.0,
                        VitalModel {
                            f_r_hz: 0.25,
                            f_h_hz: 1.2,
                            m_r_m: vec![2e-3, 6e-4],
                            m_h_m: vec![4e-4, 2e-4],
                        },
                    ),
                    TargetSpec {
                        range_m: 2.5,
                        theta_rad: 0.3,
                        amplitude: 10.0,
                        vital: None,
                    },
                ],
            },
        };
        let text = doc.to_toml_string();
        let back = SceneFile::from_toml_str(&text).unwrap();
        assert_eq!(back, doc);
    }
}
