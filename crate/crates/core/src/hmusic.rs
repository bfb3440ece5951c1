//! Harmonic MUSIC estimation of respiration and heartbeat fundamentals,
//! plus an FFT baseline.
//!
//! The demodulated phase series is modeled as two harmonic sources. A
//! sliding-window covariance is eigendecomposed; candidate fundamentals are
//! scored by projecting a whole stack of harmonics per source onto the
//! noise subspace. Scoring stacks instead of single sinusoids is what lets
//! the search reject respiration harmonics that land inside the heartbeat
//! band: a candidate sitting on such a harmonic still has its own higher
//! harmonics deep in the noise subspace.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::eig::hermitian_eigen_desc;
use crate::error::{Error, Result};
use crate::phase::PhaseSeries;
use crate::steering::cis;

/// Search settings for the vital-sign estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmusicConfig {
    /// Observation window length `M` (samples).
    pub window_len: usize,
    /// Modeled harmonics per source `L`.
    pub harmonics: usize,
    /// Respiration search band (Hz).
    pub resp_band_hz: (f64, f64),
    /// Heartbeat search band (Hz).
    pub heart_band_hz: (f64, f64),
    /// Search grid step (Hz).
    pub grid_step_hz: f64,
}

impl Default for HmusicConfig {
    fn default() -> Self {
        Self {
            window_len: 64,
            harmonics: 2,
            resp_band_hz: (0.1, 0.6),
            heart_band_hz: (0.8, 2.0),
            grid_step_hz: 0.01,
        }
    }
}

impl HmusicConfig {
    pub fn validate(&self, series_len: usize, ts_s: f64) -> Result<()> {
        if self.harmonics == 0 {
            return Err(Error::Hmusic("harmonic count must be >= 1".into()));
        }
        if 2 * self.harmonics >= self.window_len {
            return Err(Error::Hmusic(format!(
                "window length {} must exceed twice the harmonic count {}",
                self.window_len, self.harmonics
            )));
        }
        if self.window_len > series_len {
            return Err(Error::Hmusic(format!(
                "window length {} exceeds series length {series_len}",
                self.window_len
            )));
        }
        let (r_lo, r_hi) = self.resp_band_hz;
        let (h_lo, h_hi) = self.heart_band_hz;
        if !(r_lo > 0.0 && r_lo < r_hi && h_lo < h_hi) {
            return Err(Error::Hmusic("bands must be ordered and positive".into()));
        }
        if r_hi > h_lo {
            return Err(Error::Hmusic(format!(
                "respiration band must end at or below the heartbeat band ({r_hi} > {h_lo})"
            )));
        }
        let nyquist = 0.5 / ts_s;
        if self.harmonics as f64 * h_hi >= nyquist {
            return Err(Error::Hmusic(format!(
                "highest modeled harmonic {} Hz reaches the slow-time Nyquist {nyquist} Hz",
                self.harmonics as f64 * h_hi
            )));
        }
        if !(self.grid_step_hz.is_finite() && self.grid_step_hz > 0.0) {
            return Err(Error::Hmusic("grid step must be positive".into()));
        }
        Ok(())
    }
}

/// Which estimator produced a [`VitalEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Hmusic,
    Fft,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Hmusic => write!(f, "hmusic"),
            Method::Fft => write!(f, "fft"),
        }
    }
}

/// Estimated respiration and heartbeat fundamentals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitalEstimate {
    pub f_r_hz: f64,
    pub f_h_hz: f64,
    pub rr_bpm: f64,
    pub hr_bpm: f64,
    /// Spectrum value at the joint argmax.
    pub peak_value: f64,
    pub method: Method,
    /// Set when the respiration peak is under 5x the band median.
    pub resp_low_confidence: bool,
    /// Set when the heartbeat peak is under 5x the band median.
    pub heart_low_confidence: bool,
}

/// Per-source pseudo-spectra of the harmonic MUSIC search.
///
/// The joint objective `1 / (d_r(f_r) + d_h(f_h))` is separable, so only
/// the per-source noise-subspace distances are stored; the joint surface is
/// available through [`HmusicSpectrum::joint_value`].
#[derive(Debug, Clone)]
pub struct HmusicSpectrum {
    pub resp_freqs_hz: Vec<f64>,
    pub heart_freqs_hz: Vec<f64>,
    /// `||Z_r(f)^H G||_F^2` per respiration grid frequency.
    pub resp_penalty: Vec<f64>,
    /// `||Z_h(f)^H G||_F^2` per heartbeat grid frequency.
    pub heart_penalty: Vec<f64>,
    floor: f64,
}

impl HmusicSpectrum {
    pub fn joint_value(&self, resp_idx: usize, heart_idx: usize) -> f64 {
        1.0 / (self.resp_penalty[resp_idx] + self.heart_penalty[heart_idx]).max(self.floor)
    }

    /// Exhaustive joint argmax; ties break toward lower respiration
    /// frequency, then lower heartbeat frequency.
    pub fn joint_argmax(&self) -> (usize, usize) {
        let mut best = (0usize, 0usize);
        let mut best_val = f64::NEG_INFINITY;
        for ri in 0..self.resp_freqs_hz.len() {
            for hi in 0..self.heart_freqs_hz.len() {
                let v = self.joint_value(ri, hi);
                if v > best_val {
                    best = (ri, hi);
                    best_val = v;
                }
            }
        }
        best
    }

    /// Per-source pseudo-spectrum values `1 / penalty`.
    pub fn source_values(&self, penalties: &[f64]) -> Vec<f64> {
        penalties.iter().map(|p| 1.0 / p.max(self.floor)).collect()
    }

    /// Dump one source as `f_hz,value` CSV rows.
    pub fn write_source_csv(
        &self,
        writer: &mut impl Write,
        freqs: &[f64],
        penalties: &[f64],
        header: &str,
    ) -> std::io::Result<()> {
        writeln!(writer, "{header},value")?;
        for (f, p) in freqs.iter().zip(penalties) {
            writeln!(writer, "{f},{}", 1.0 / p.max(self.floor))?;
        }
        Ok(())
    }

    pub fn write_resp_csv(&self, writer: &mut impl Write) -> std::io::Result<()> {
        self.write_source_csv(writer, &self.resp_freqs_hz, &self.resp_penalty, "f_r_hz")
    }

    pub fn write_heart_csv(&self, writer: &mut impl Write) -> std::io::Result<()> {
        self.write_source_csv(writer, &self.heart_freqs_hz, &self.heart_penalty, "f_h_hz")
    }
}

/// Harmonic observation matrix: column `l` (1-based) is
/// `[1, e^{j*l*omega}, e^{j*2*l*omega}, ..., e^{j*(M-1)*l*omega}]`.
///
/// `omega` is in radians per sample; every modeled harmonic must stay below
/// the Nyquist rate (`omega * harmonics < pi`).
pub fn harmonic_matrix(
    omega: f64,
    harmonics: usize,
    window_len: usize,
) -> Result<DMatrix<Complex64>> {
    if !(omega > 0.0 && omega * (harmonics as f64) < std::f64::consts::PI) {
        return Err(Error::Hmusic(format!(
            "harmonic {harmonics} of omega {omega} rad/sample reaches Nyquist"
        )));
    }
    Ok(DMatrix::from_fn(window_len, harmonics, |m, l| {
        cis((l + 1) as f64 * omega * m as f64)
    }))
}

/// One-sided (analytic) extension of a real series.
///
/// The spectrum is made single-sided by zeroing negative frequencies and
/// doubling the interior positive bins, so each real sinusoid becomes one
/// complex exponential.
pub fn analytic_signal(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    for (k, z) in buf.iter_mut().enumerate() {
        if k == 0 || (n % 2 == 0 && k == half) {
            // DC and (for even n) Nyquist stay untouched.
        } else if k < (n + 1) / 2 || (n % 2 == 0 && k < half) {
            *z *= 2.0;
        } else {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for z in buf.iter_mut() {
        *z *= scale;
    }
    buf
}

/// Demeaned complex observation the window covariance is built from.
///
/// The windows in [`window_covariance`] are assembled newest-sample-first,
/// which maps a forward-rotating exponential onto `z(-omega)`; conjugating
/// the analytic series restores alignment with the forward harmonic atoms
/// of [`harmonic_matrix`]. The mean is removed first so the DC offset of
/// the accumulated phase does not consume a signal-subspace dimension.
pub fn vital_observation(x: &PhaseSeries) -> Vec<Complex64> {
    let mean = x.values.iter().sum::<f64>() / x.values.len().max(1) as f64;
    let centered: Vec<f64> = x.values.iter().map(|v| v - mean).collect();
    analytic_signal(&centered).iter().map(|z| z.conj()).collect()
}

/// Average the outer products of all `len - M + 1` sliding windows, each
/// window ordered `[x_m, x_{m-1}, ..., x_{m-M+1}]`. Hermitian-symmetrized.
pub fn window_covariance(x: &[Complex64], window_len: usize) -> Result<DMatrix<Complex64>> {
    let n = x.len();
    if window_len == 0 || window_len > n {
        return Err(Error::Hmusic(format!(
            "window length {window_len} outside [1, {n}]"
        )));
    }
    let m = window_len;
    let count = n - m + 1;
    let mut r = DMatrix::<Complex64>::zeros(m, m);
    for last in (m - 1)..n {
        for i in 0..m {
            let xi = x[last - i];
            for j in 0..m {
                r[(i, j)] += xi * x[last - j].conj();
            }
        }
    }
    r /= Complex64::new(count as f64, 0.0);
    Ok((r.clone() + r.adjoint()).scale(0.5))
}

fn band_grid(band: (f64, f64), step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let f = band.0 + k as f64 * step;
        if f > band.1 + 1e-12 {
            break;
        }
        grid.push(f);
        k += 1;
    }
    grid
}

/// Index of the smallest value; ties break toward the smaller index.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn low_confidence(values: &[f64]) -> bool {
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    peak < 5.0 * median
}

/// Harmonic MUSIC estimate of both fundamentals.
///
/// The window covariance of the (demeaned, analytic) phase series is
/// eigendecomposed with eigenvalues descending; the noise subspace `G`
/// spans eigenvectors `2L+1 .. M`. Each candidate fundamental is scored by
/// `||Z_q(f)^H G||_F^2` and the joint spectrum `1 / (d_r + d_h)` is
/// maximized, which separates into independent per-source minimizations.
pub fn hmusic_estimate(
    x: &PhaseSeries,
    cfg: &HmusicConfig,
) -> Result<(VitalEstimate, HmusicSpectrum)> {
    cfg.validate(x.values.len(), x.ts_s)?;
    let m = cfg.window_len;
    let signal_dim = 2 * cfg.harmonics;

    let obs = vital_observation(x);
    let cov = window_covariance(&obs, m)?;
    let eig = hermitian_eigen_desc(cov);
    if !(eig.eigenvalues[0].is_finite() && eig.eigenvalues[0] > 0.0) {
        return Err(Error::Hmusic("degenerate covariance, no signal energy".into()));
    }
    let rank = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-8 * eig.eigenvalues[0])
        .count();
    if rank < signal_dim {
        return Err(Error::Hmusic(format!(
            "insufficient signal dimension: covariance rank {rank} < {signal_dim}"
        )));
    }
    let noise = eig.eigenvectors.columns(signal_dim, m - signal_dim).into_owned();

    let resp_freqs = band_grid(cfg.resp_band_hz, cfg.grid_step_hz);
    let heart_freqs = band_grid(cfg.heart_band_hz, cfg.grid_step_hz);
    if resp_freqs.is_empty() || heart_freqs.is_empty() {
        return Err(Error::Hmusic("empty search band".into()));
    }
    let penalty = |f_hz: f64| -> Result<f64> {
        let omega = 2.0 * std::f64::consts::PI * f_hz * x.ts_s;
        let z = harmonic_matrix(omega, cfg.harmonics, m)?;
        Ok((z.adjoint() * &noise).norm_squared())
    };
    let resp_penalty: Vec<f64> = resp_freqs.iter().map(|&f| penalty(f)).collect::<Result<_>>()?;
    let heart_penalty: Vec<f64> =
        heart_freqs.iter().map(|&f| penalty(f)).collect::<Result<_>>()?;

    let spectrum = HmusicSpectrum {
        resp_freqs_hz: resp_freqs,
        heart_freqs_hz: heart_freqs,
        resp_penalty,
        heart_penalty,
        floor: 1e-30 * (signal_dim * m) as f64,
    };
    // Separable objective: the joint argmax is the pair of per-source
    // minima.
    let ri = argmin(&spectrum.resp_penalty);
    let hi = argmin(&spectrum.heart_penalty);
    let f_r = spectrum.resp_freqs_hz[ri];
    let f_h = spectrum.heart_freqs_hz[hi];

    let estimate = VitalEstimate {
        f_r_hz: f_r,
        f_h_hz: f_h,
        rr_bpm: 60.0 * f_r,
        hr_bpm: 60.0 * f_h,
        peak_value: spectrum.joint_value(ri, hi),
        method: Method::Hmusic,
        resp_low_confidence: low_confidence(&spectrum.source_values(&spectrum.resp_penalty)),
        heart_low_confidence: low_confidence(&spectrum.source_values(&spectrum.heart_penalty)),
    };
    Ok((estimate, spectrum))
}

/// FFT baseline: band-limited argmax of the zero-padded magnitude spectrum.
pub fn fft_baseline(x: &PhaseSeries, cfg: &HmusicConfig) -> Result<VitalEstimate> {
    cfg.validate(x.values.len(), x.ts_s)?;
    let n = x.values.len();
    let mean = x.values.iter().sum::<f64>() / n as f64;
    // Zero-pad so the bin spacing is at least as fine as the search grid.
    let min_len = (1.0 / (cfg.grid_step_hz * x.ts_s)).ceil() as usize;
    let nfft = min_len.max(2 * n).next_power_of_two();
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for (b, v) in buf.iter_mut().zip(&x.values) {
        *b = Complex64::new(v - mean, 0.0);
    }
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let bin_hz = 1.0 / (nfft as f64 * x.ts_s);

    let band_peak = |band: (f64, f64)| -> Result<(f64, f64, bool)> {
        let lo = (band.0 / bin_hz).ceil() as usize;
        let hi = ((band.1 / bin_hz).floor() as usize).min(nfft / 2);
        if lo > hi {
            return Err(Error::Hmusic(format!(
                "band {band:?} Hz contains no spectrum bins"
            )));
        }
        let mags: Vec<f64> = (lo..=hi).map(|k| buf[k].norm()).collect();
        let mut peak = 0usize;
        for (i, v) in mags.iter().enumerate() {
            if *v > mags[peak] {
                peak = i;
            }
        }
        Ok((
            (lo + peak) as f64 * bin_hz,
            mags[peak],
            low_confidence(&mags),
        ))
    };
    let (f_r, resp_mag, resp_low) = band_peak(cfg.resp_band_hz)?;
    let (f_h, heart_mag, heart_low) = band_peak(cfg.heart_band_hz)?;

    Ok(VitalEstimate {
        f_r_hz: f_r,
        f_h_hz: f_h,
        rr_bpm: 60.0 * f_r,
        hr_bpm: 60.0 * f_h,
        peak_value: resp_mag + heart_mag,
        method: Method::Fft,
        resp_low_confidence: resp_low,
        heart_low_confidence: heart_low,
    })
}
