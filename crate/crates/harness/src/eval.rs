//! Monte-Carlo evaluation of the estimators against simulated ground truth.
//!
//! Each trial draws scene parameters from a declarative distribution,
//! simulates a multi-minute session, slides the estimation window across
//! it, and scores both estimators with the breathing-rate and heart-rate
//! accuracy definitions (errors under 3 BPM and 5 BPM respectively).

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use vitalwave_core::error::{Error, Result};
use vitalwave_core::hmusic::{HmusicConfig, VitalEstimate};
use vitalwave_core::scene::{synthesize, SceneSpec, TargetSpec, VitalModel};
use vitalwave_core::steering::range_to_beat;
use vitalwave_core::RadarConfig;

use crate::pipeline::{run_pipeline, PipelineConfig};

/// Breathing-rate accuracy threshold (breaths per minute).
pub const RR_THRESHOLD_BPM: f64 = 3.0;
/// Heart-rate accuracy threshold (beats per minute).
pub const HR_THRESHOLD_BPM: f64 = 5.0;

/// Error percentiles reported alongside the accuracies.
pub const REPORT_PERCENTILES: [f64; 9] = [50.0, 75.0, 80.0, 85.0, 88.0, 89.0, 90.0, 95.0, 99.0];

/// Declarative scene distribution; ranges are inclusive `[lo, hi]`.
///
/// Scalar fields precede the nested tables so the document serializes as
/// valid TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DistSpec {
    /// Respiration fundamental band (Hz).
    pub f_r_hz: (f64, f64),
    /// Heartbeat fundamental band (Hz).
    pub f_h_hz: (f64, f64),
    /// Human range (m).
    pub range_m: (f64, f64),
    /// Human azimuth (degrees).
    pub theta_deg: (f64, f64),
    /// Per-sample SNR of the human return (dB).
    pub snr_db: (f64, f64),
    /// Respiration fundamental displacement (m).
    pub resp_amp_m: (f64, f64),
    /// Amplitude ratio of harmonic `l+1` to harmonic `l` for respiration.
    pub resp_decay: f64,
    /// Heartbeat fundamental displacement (m).
    pub heart_amp_m: (f64, f64),
    /// Amplitude ratio of harmonic `l+1` to harmonic `l` for heartbeat.
    pub heart_decay: f64,
    /// Harmonics per source in the simulated displacement.
    pub sim_harmonics: usize,
    /// Clutter amplitude as a multiple of the human amplitude.
    pub clutter_amp_ratio: (f64, f64),
    pub clutter_range_m: (f64, f64),
    pub clutter_theta_deg: (f64, f64),
    /// Force a respiration harmonic into the heartbeat band with at least
    /// the heartbeat's displacement amplitude.
    pub adversarial: bool,
    /// Slow-time samples per simulated session.
    pub session_samples: usize,
    /// Estimation window length (slow-time samples).
    pub window_len: usize,
    /// Slide between estimation windows (slow-time samples).
    pub window_stride: usize,
    /// Fast-time decimation for localization.
    pub locate_stride: usize,
    pub radar: RadarConfig,
    pub hmusic: HmusicConfig,
}

impl Default for DistSpec {
    fn default() -> Self {
        Self {
            f_r_hz: (0.15, 0.5),
            f_h_hz: (0.9, 1.8),
            range_m: (0.5, 3.0),
            theta_deg: (-45.0, 45.0),
            snr_db: (15.0, 25.0),
            resp_amp_m: (1.0e-3, 3.0e-3),
            resp_decay: 0.3,
            heart_amp_m: (2.0e-4, 5.0e-4),
            heart_decay: 0.5,
            sim_harmonics: 2,
            clutter_amp_ratio: (1.0, 10.0),
            clutter_range_m: (0.4, 4.0),
            clutter_theta_deg: (-60.0, 60.0),
            adversarial: false,
            session_samples: 2400,
            window_len: 256,
            window_stride: 20,
            locate_stride: 1,
            radar: RadarConfig::coarse(),
            hmusic: HmusicConfig::default(),
        }
    }
}

impl DistSpec {
    /// Distribution where the third respiration harmonic lands in the
    /// heartbeat band with at least the heartbeat's amplitude.
    ///
    /// The longer window resolves the true heartbeat from the interfering
    /// harmonic, which the sampling keeps at least 0.25 Hz away so that a
    /// harmonic pick is unambiguously an error.
    pub fn adversarial() -> Self {
        Self {
            f_r_hz: (0.35, 0.45),
            f_h_hz: (0.9, 1.8),
            sim_harmonics: 3,
            adversarial: true,
            hmusic: HmusicConfig {
                harmonics: 3,
                window_len: 128,
                ..HmusicConfig::default()
            },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        let ordered = [
            ("f_r_hz", self.f_r_hz),
            ("f_h_hz", self.f_h_hz),
            ("range_m", self.range_m),
            ("theta_deg", self.theta_deg),
            ("snr_db", self.snr_db),
            ("resp_amp_m", self.resp_amp_m),
            ("heart_amp_m", self.heart_amp_m),
            ("clutter_amp_ratio", self.clutter_amp_ratio),
            ("clutter_range_m", self.clutter_range_m),
            ("clutter_theta_deg", self.clutter_theta_deg),
        ];
        for (name, (lo, hi)) in ordered {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!("distribution range {name} invalid: [{lo}, {hi}]")));
            }
        }
        if self.sim_harmonics == 0 {
            return Err(Error::Config("sim_harmonics must be >= 1".into()));
        }
        if self.window_len > self.session_samples {
            return Err(Error::Config(format!(
                "window_len {} exceeds session_samples {}",
                self.window_len, self.session_samples
            )));
        }
        if self.window_stride == 0 || self.locate_stride == 0 {
            return Err(Error::Config("strides must be >= 1".into()));
        }
        self.hmusic.validate(self.window_len, self.radar.ts_s)?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self =
            toml::from_str(text).map_err(|e| Error::Config(format!("distribution parse error: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("distribution serializes")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }
}

/// Estimates of both methods for one window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodEstimates {
    pub hmusic: VitalEstimate,
    pub fft: VitalEstimate,
}

/// One estimation window of one simulated scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialResult {
    pub scene_id: u64,
    /// First slow-time sample of the window within the session.
    pub window_start: usize,
    pub truth_rr_bpm: f64,
    pub truth_hr_bpm: f64,
    pub est: MethodEstimates,
    /// Chebyshev distance, in grid cells, between the localization argmax
    /// and the cell nearest the true position.
    pub loc_error_cells: u32,
    /// Per-sample SNR of the human return (dB).
    pub snr_db: f64,
}

/// Accuracy and error percentiles for one method.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodAccuracy {
    /// Fraction of windows with breathing-rate error under 3 BPM.
    pub rr_accuracy: f64,
    /// Fraction of windows with heart-rate error under 5 BPM.
    pub hr_accuracy: f64,
    pub rr_error_percentiles_bpm: Vec<PercentilePoint>,
    pub hr_error_percentiles_bpm: Vec<PercentilePoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PercentilePoint {
    pub percentile: f64,
    pub error_bpm: f64,
}

/// Aggregate report over all trials and windows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub seed: u64,
    pub n_trials: usize,
    pub n_windows: usize,
    pub rr_threshold_bpm: f64,
    pub hr_threshold_bpm: f64,
    pub hmusic: MethodAccuracy,
    pub fft: MethodAccuracy,
}

impl AccuracyReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Percentile table as `method,metric,percentile,error_bpm` CSV.
    pub fn percentile_csv(&self) -> String {
        let mut out = String::from("method,metric,percentile,error_bpm\n");
        for (method, acc) in [("hmusic", &self.hmusic), ("fft", &self.fft)] {
            for p in &acc.rr_error_percentiles_bpm {
                out.push_str(&format!("{method},rr,{},{}\n", p.percentile, p.error_bpm));
            }
            for p in &acc.hr_error_percentiles_bpm {
                out.push_str(&format!("{method},hr,{},{}\n", p.percentile, p.error_bpm));
            }
        }
        out
    }
}

fn uniform(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.0 == range.1 {
        range.0
    } else {
        rng.random_range(range.0..=range.1)
    }
}

/// Draw one scene from the distribution. Returns the scene and the human's
/// vital model.
fn sample_scene(dist: &DistSpec, rng: &mut ChaCha8Rng) -> (SceneSpec, VitalModel, f64) {
    let f_r = uniform(rng, dist.f_r_hz);
    let mut f_h = uniform(rng, dist.f_h_hz);
    if dist.adversarial {
        // Keep the truth separated from the interfering respiration
        // harmonics so a harmonic pick is unambiguously an error and the
        // two stay resolvable within the observation window.
        for _ in 0..200 {
            if (f_h - 3.0 * f_r).abs() >= 0.25 && (f_h - 2.0 * f_r).abs() >= 0.25 {
                break;
            }
            f_h = uniform(rng, dist.f_h_hz);
        }
    }

    let resp_fund = uniform(rng, dist.resp_amp_m);
    let heart_fund = uniform(rng, dist.heart_amp_m);
    let mut m_r_m: Vec<f64> = (0..dist.sim_harmonics)
        .map(|l| resp_fund * dist.resp_decay.powi(l as i32))
        .collect();
    let m_h_m: Vec<f64> = (0..dist.sim_harmonics)
        .map(|l| heart_fund * dist.heart_decay.powi(l as i32))
        .collect();
    if dist.adversarial && dist.sim_harmonics >= 3 {
        // Third respiration harmonic at or above the heartbeat fundamental.
        m_r_m[2] = heart_fund * uniform(rng, (1.0, 1.5));
    }

    let snr_db = uniform(rng, dist.snr_db);
    let amplitude = 1.0;
    let noise_sigma = amplitude / 10f64.powf(snr_db / 20.0);

    let human = TargetSpec {
        range_m: uniform(rng, dist.range_m),
        theta_rad: uniform(rng, dist.theta_deg).to_radians(),
        amplitude,
        vital: Some(VitalModel {
            f_r_hz: f_r,
            f_h_hz: f_h,
            m_r_m,
            m_h_m,
        }),
    };
    let vital = human.vital.clone().unwrap();
    let clutter = TargetSpec {
        range_m: uniform(rng, dist.clutter_range_m),
        theta_rad: uniform(rng, dist.clutter_theta_deg).to_radians(),
        amplitude: amplitude * uniform(rng, dist.clutter_amp_ratio),
        vital: None,
    };
    let scene = SceneSpec {
        noise_sigma,
        seed: rng.random(),
        targets: vec![human, clutter],
    };
    (scene, vital, snr_db)
}

/// Run one simulated session and score every estimation window.
fn run_trial(dist: &DistSpec, master_seed: u64, trial: u64) -> Result<Vec<TrialResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial + 1);
    let (scene, vital, snr_db) = sample_scene(dist, &mut rng);

    let session_cfg = dist.radar.with_ns(dist.session_samples);
    let cube = synthesize(&scene, &session_cfg)?;

    let window_cfg = dist.radar.with_ns(dist.window_len);
    let mut opts = PipelineConfig::for_radar(&window_cfg, dist.locate_stride);
    opts.hmusic = dist.hmusic.clone();

    // Localize on the first window; the target is static, so later windows
    // reuse the bin.
    let first = cube.slice_frames(0, dist.window_len)?;
    let out0 = run_pipeline(&first, &opts, None)?;
    let human = scene.human();
    let loc_error_cells = {
        let spectrum = out0.loc_spectrum.as_ref().expect("localized first window");
        let (ti, oi) = spectrum.argmax_indices();
        let (tti, toi) = spectrum.nearest_cell(
            human.theta_rad,
            range_to_beat(human.range_m, session_cfg.slope_hz_per_s),
        );
        (ti as i64 - tti as i64)
            .unsigned_abs()
            .max((oi as i64 - toi as i64).unsigned_abs()) as u32
    };

    let truth_rr_bpm = 60.0 * vital.f_r_hz;
    let truth_hr_bpm = 60.0 * vital.f_h_hz;
    let mut results = Vec::new();
    let mut push = |window_start: usize, hm: VitalEstimate, fft: VitalEstimate| {
        results.push(TrialResult {
            scene_id: trial,
            window_start,
            truth_rr_bpm,
            truth_hr_bpm,
            est: MethodEstimates { hmusic: hm, fft },
            loc_error_cells,
            snr_db,
        });
    };
    push(0, out0.hmusic, out0.fft);

    let mut start = dist.window_stride;
    while start + dist.window_len <= dist.session_samples {
        let window = cube.slice_frames(start, dist.window_len)?;
        let out = run_pipeline(&window, &opts, Some(out0.localization))?;
        push(start, out.hmusic, out.fft);
        start += dist.window_stride;
    }
    Ok(results)
}

fn percentile_curve(errors: &[f64]) -> Vec<PercentilePoint> {
    let mut sorted = errors.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    REPORT_PERCENTILES
        .iter()
        .map(|&p| {
            let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
            let idx = rank.clamp(1, sorted.len()) - 1;
            PercentilePoint {
                percentile: p,
                error_bpm: sorted[idx],
            }
        })
        .collect()
}

fn score_method(results: &[TrialResult], pick: impl Fn(&TrialResult) -> &VitalEstimate) -> MethodAccuracy {
    let rr_errors: Vec<f64> = results
        .iter()
        .map(|r| (pick(r).rr_bpm - r.truth_rr_bpm).abs())
        .collect();
    let hr_errors: Vec<f64> = results
        .iter()
        .map(|r| (pick(r).hr_bpm - r.truth_hr_bpm).abs())
        .collect();
    let n = results.len() as f64;
    MethodAccuracy {
        rr_accuracy: rr_errors.iter().filter(|e| **e < RR_THRESHOLD_BPM).count() as f64 / n,
        hr_accuracy: hr_errors.iter().filter(|e| **e < HR_THRESHOLD_BPM).count() as f64 / n,
        rr_error_percentiles_bpm: percentile_curve(&rr_errors),
        hr_error_percentiles_bpm: percentile_curve(&hr_errors),
    }
}

/// Evaluate both estimators over `n_trials` scenes drawn from `dist`.
///
/// Deterministic in `(dist, n_trials, seed)`: per-trial parameter streams
/// are derived from the seed and the trial index, trials are aggregated in
/// index order.
pub fn evaluate(
    dist: &DistSpec,
    n_trials: usize,
    seed: u64,
) -> Result<(AccuracyReport, Vec<TrialResult>)> {
    if n_trials == 0 {
        return Err(Error::Config("n_trials must be >= 1".into()));
    }
    dist.validate()?;

    let per_trial: Vec<Vec<TrialResult>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|trial| run_trial(dist, seed, trial))
        .collect::<Result<_>>()?;
    let results: Vec<TrialResult> = per_trial.into_iter().flatten().collect();

    let report = AccuracyReport {
        seed,
        n_trials,
        n_windows: results.len(),
        rr_threshold_bpm: RR_THRESHOLD_BPM,
        hr_threshold_bpm: HR_THRESHOLD_BPM,
        hmusic: score_method(&results, |r| &r.est.hmusic),
        fft: score_method(&results, |r| &r.est.fft),
    };
    Ok((report, results))
}
