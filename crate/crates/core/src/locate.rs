//! Range-azimuth localization with 2D MUSIC on the space-time covariance.
//!
//! Each clutter-removed frame is flattened into a space-time vector
//! (antenna-major, fast time inner), an autocorrelation matrix is averaged
//! over frames, and the pseudo-spectrum is scanned over a steering-vector
//! grid `V(theta, omega) = a(theta) kron s(omega)`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::RadarConfig;
use crate::cube::AdcCube;
use crate::eig::hermitian_eigen_desc;
use crate::error::{Error, Result};
use crate::steering::{angle_steering_spaced, beat_to_range, cis, range_to_beat};

/// Averaged space-time autocorrelation matrix.
///
/// `nf` is the effective fast-time sample count after decimation by
/// `stride`; the matrix is `(nv * nf)` square.
#[derive(Debug, Clone)]
pub struct SpaceTimeCov {
    pub matrix: DMatrix<Complex64>,
    pub nframes_averaged: usize,
    pub nv: usize,
    pub nf: usize,
    pub stride: usize,
}

impl SpaceTimeCov {
    pub fn dim(&self) -> usize {
        self.nv * self.nf
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }
}

/// Estimated range-azimuth bin.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RangeAngle {
    /// Beat angular frequency (rad/s).
    pub omega_b: f64,
    /// Azimuth (rad).
    pub theta_rad: f64,
    /// Range derived from the beat frequency (m).
    pub range_m: f64,
}

impl RangeAngle {
    pub fn from_beat(omega_b: f64, theta_rad: f64, slope_hz_per_s: f64) -> Self {
        Self {
            omega_b,
            theta_rad,
            range_m: beat_to_range(omega_b, slope_hz_per_s),
        }
    }
}

/// MUSIC pseudo-spectrum sampled on a `(theta, omega)` grid.
#[derive(Debug, Clone)]
pub struct PseudoSpectrum2D {
    pub theta_grid_rad: Vec<f64>,
    /// Beat angular frequencies (rad/s).
    pub omega_grid: Vec<f64>,
    /// Row-major values, theta outer: `values[ti * omega_len + oi]`.
    pub values: Vec<f64>,
    /// Fast-time decimation factor the covariance was built with.
    pub stride: usize,
    /// Chirp slope used to convert beat frequencies to ranges.
    pub slope_hz_per_s: f64,
}

impl PseudoSpectrum2D {
    #[inline]
    pub fn value(&self, theta_idx: usize, omega_idx: usize) -> f64 {
        self.values[theta_idx * self.omega_grid.len() + omega_idx]
    }

    /// Grid indices of the maximum. Ties break toward smaller range, then
    /// smaller absolute azimuth.
    pub fn argmax_indices(&self) -> (usize, usize) {
        let mut best = (0usize, 0usize);
        let mut best_val = f64::NEG_INFINITY;
        for ti in 0..self.theta_grid_rad.len() {
            for oi in 0..self.omega_grid.len() {
                let v = self.value(ti, oi);
                let better = v > best_val
                    || (v == best_val
                        && (self.omega_grid[oi] < self.omega_grid[best.1]
                            || (self.omega_grid[oi] == self.omega_grid[best.1]
                                && self.theta_grid_rad[ti].abs()
                                    < self.theta_grid_rad[best.0].abs())));
                if better {
                    best = (ti, oi);
                    best_val = v;
                }
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn median(&self) -> f64 {
        let mut sorted = self.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted[sorted.len() / 2]
    }

    /// Peak prominence over the spectrum floor; low values mean no target.
    pub fn peak_to_median(&self) -> f64 {
        self.max() / self.median().max(f64::MIN_POSITIVE)
    }

    /// Grid indices closest to a `(theta, omega)` point.
    pub fn nearest_cell(&self, theta_rad: f64, omega_b: f64) -> (usize, usize) {
        let ti = nearest_index(&self.theta_grid_rad, theta_rad);
        let oi = nearest_index(&self.omega_grid, omega_b);
        (ti, oi)
    }

    /// Dump as `theta,omega,range_m,value` CSV rows.
    pub fn write_csv(&self, writer: &mut impl Write) -> std::io::Result<()> {
        writeln!(writer, "theta,omega,range_m,value")?;
        for (ti, theta) in self.theta_grid_rad.iter().enumerate() {
            for (oi, omega) in self.omega_grid.iter().enumerate() {
                writeln!(
                    writer,
                    "{theta},{omega},{},{}",
                    beat_to_range(*omega, self.slope_hz_per_s),
                    self.value(ti, oi)
                )?;
            }
        }
        Ok(())
    }
}

fn nearest_index(grid: &[f64], x: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, g) in grid.iter().enumerate() {
        let d = (g - x).abs();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Search grids and decimation settings for [`music_2d`].
#[derive(Debug, Clone)]
pub struct LocateConfig {
    pub theta_grid_rad: Vec<f64>,
    pub range_grid_m: Vec<f64>,
    pub n_sources: usize,
    /// Fast-time decimation stride applied when building the covariance.
    pub stride: usize,
}

impl LocateConfig {
    /// Default grids for a radar configuration: azimuth -60..60 degrees in
    /// 1 degree steps, range from 0.2 m up to 5 m (clamped just below the
    /// decimation-limited unambiguous range) in half-resolution steps.
    pub fn for_radar(config: &RadarConfig, stride: usize) -> Self {
        let theta_grid_rad = (-60..=60).map(|d| (d as f64).to_radians()).collect();
        let step = config.range_resolution_m() / 2.0;
        let hi = 5.0f64.min(0.98 * config.unambiguous_range_m(stride));
        let range_grid_m = range_grid(0.2, hi, step);
        Self {
            theta_grid_rad,
            range_grid_m,
            n_sources: 1,
            stride,
        }
    }

    pub fn omega_grid(&self, slope_hz_per_s: f64) -> Vec<f64> {
        self.range_grid_m
            .iter()
            .map(|&r| range_to_beat(r, slope_hz_per_s))
            .collect()
    }
}

/// Inclusive range grid `lo, lo + step, ...` up to `hi`.
pub fn range_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let r = lo + k as f64 * step;
        if r > hi + 1e-12 {
            break;
        }
        grid.push(r);
        k += 1;
    }
    grid
}

/// Flatten a `(v, n)` row-major frame into the space-time vector
/// `[y[0,0..nf], y[1,0..nf], ...]`, matching `a(theta) kron s(omega)`.
pub fn space_time_vector(frame: &[Complex64], nv: usize, nf: usize) -> Result<DVector<Complex64>> {
    if frame.len() != nv * nf {
        return Err(Error::Locate(format!(
            "frame length {} does not match nv*nf = {}",
            frame.len(),
            nv * nf
        )));
    }
    Ok(DVector::from_column_slice(frame))
}

/// Average `Y Y^H` over the selected frames at full fast-time rate.
pub fn estimate_cov(cube: &AdcCube, frames: &[usize]) -> Result<SpaceTimeCov> {
    estimate_cov_strided(cube, frames, 1)
}

/// Average `Y Y^H` over the selected frames, keeping every `stride`-th
/// fast-time sample. The result is Hermitian by construction
/// (`(R + R^H) / 2` after accumulation).
pub fn estimate_cov_strided(
    cube: &AdcCube,
    frames: &[usize],
    stride: usize,
) -> Result<SpaceTimeCov> {
    if frames.is_empty() {
        return Err(Error::Locate("empty frame set".into()));
    }
    if stride == 0 {
        return Err(Error::Locate("stride must be >= 1".into()));
    }
    let cfg = cube.config();
    if let Some(&bad) = frames.iter().find(|&&m| m >= cfg.ns) {
        return Err(Error::Locate(format!(
            "frame index {bad} out of range for ns = {}",
            cfg.ns
        )));
    }
    let nf_eff = cfg.nf.div_ceil(stride);
    let dim = cfg.nv * nf_eff;

    // Stack the selected frames' space-time vectors and form R = Y Y^H / F.
    let mut stacked = DMatrix::zeros(dim, frames.len());
    for (col, &m) in frames.iter().enumerate() {
        let frame = cube.frame(m);
        let mut row = 0usize;
        for v in 0..cfg.nv {
            for i in 0..nf_eff {
                stacked[(row, col)] = frame[v * cfg.nf + i * stride];
                row += 1;
            }
        }
    }
    let mut r = &stacked * stacked.adjoint();
    r /= Complex64::new(frames.len() as f64, 0.0);
    let r = (r.clone() + r.adjoint()).scale(0.5);

    Ok(SpaceTimeCov {
        matrix: r,
        nframes_averaged: frames.len(),
        nv: cfg.nv,
        nf: nf_eff,
        stride,
    })
}

/// Evaluate the 2D MUSIC pseudo-spectrum and return its argmax bin.
///
/// The covariance is eigendecomposed with eigenvalues descending; the noise
/// subspace is everything past the first `n_sources` eigenvectors. The
/// projection onto it is evaluated through the signal-subspace complement
/// `||V||^2 - ||V^H U_s||^2`, which equals `||V^H G||_F^2` because the
/// eigenvector basis is orthonormal.
pub fn music_2d(
    cov: &SpaceTimeCov,
    config: &RadarConfig,
    n_sources: usize,
    theta_grid: &[f64],
    omega_grid: &[f64],
) -> Result<(PseudoSpectrum2D, RangeAngle)> {
    let dim = cov.dim();
    if cov.matrix.nrows() != dim || cov.matrix.ncols() != dim {
        return Err(Error::Locate("covariance shape mismatch".into()));
    }
    if cov.nv != config.nv {
        return Err(Error::Locate(format!(
            "covariance antenna count {} does not match config nv {}",
            cov.nv, config.nv
        )));
    }
    if n_sources == 0 || n_sources >= dim {
        return Err(Error::Locate(format!(
            "n_sources {n_sources} outside [1, {})",
            dim
        )));
    }
    if theta_grid.is_empty() || omega_grid.is_empty() {
        return Err(Error::Locate("empty search grid".into()));
    }
    let trace = cov.trace();
    if !trace.is_finite() || trace <= 0.0 {
        return Err(Error::Locate(format!(
            "degenerate covariance (trace = {trace}), nothing to localize"
        )));
    }

    let eig = hermitian_eigen_desc(cov.matrix.clone());
    if eig.eigenvalues[0] <= 0.0 {
        return Err(Error::Locate("degenerate covariance (no positive eigenvalue)".into()));
    }
    let signal: Vec<DVector<Complex64>> = (0..n_sources)
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect();

    let dt = config.tf_s * cov.stride as f64;
    let nv = cov.nv;
    let nf = cov.nf;
    let norm_sq = dim as f64;
    // Spectrum floor keeps values finite when a steering vector lies exactly
    // in the signal subspace.
    let floor = norm_sq * 1e-30;

    // Per-omega partial projections of each signal eigenvector, folded over
    // fast time: partial[v] = sum_n conj(s_n) u[v*nf + n].
    let partials: Vec<Vec<Vec<Complex64>>> = omega_grid
        .par_iter()
        .map(|&omega| {
            let conj_s: Vec<Complex64> =
                (0..nf).map(|n| cis(-omega * n as f64 * dt)).collect();
            signal
                .iter()
                .map(|u| {
                    (0..nv)
                        .map(|v| {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for n in 0..nf {
                                acc += conj_s[n] * u[v * nf + n];
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut values = vec![0.0f64; theta_grid.len() * omega_grid.len()];
    for (ti, &theta) in theta_grid.iter().enumerate() {
        let a = angle_steering_spaced(theta, nv, config.d_over_lambda)?;
        let conj_a: Vec<Complex64> = a.iter().map(|z| z.conj()).collect();
        for oi in 0..omega_grid.len() {
            let mut captured = 0.0;
            for part in &partials[oi] {
                let mut proj = Complex64::new(0.0, 0.0);
                for v in 0..nv {
                    proj += conj_a[v] * part[v];
                }
                captured += proj.norm_sqr();
            }
            let denom = (norm_sq - captured).max(floor);
            values[ti * omega_grid.len() + oi] = 1.0 / denom;
        }
    }

    let spectrum = PseudoSpectrum2D {
        theta_grid_rad: theta_grid.to_vec(),
        omega_grid: omega_grid.to_vec(),
        values,
        stride: cov.stride,
        slope_hz_per_s: config.slope_hz_per_s,
    };
    let (ti, oi) = spectrum.argmax_indices();
    let estimate = RangeAngle::from_beat(
        spectrum.omega_grid[oi],
        spectrum.theta_grid_rad[ti],
        config.slope_hz_per_s,
    );
    Ok((spectrum, estimate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{synthesize, SceneSpec, TargetSpec, VitalModel};
    use crate::steering::{angle_steering, range_steering};

    fn small_config() -> RadarConfig {
        RadarConfig {
            nf: 16,
            ns: 32,
            nv: 4,
            ..RadarConfig::default()
        }
    }

    fn still_human(range_m: f64, theta_rad: f64, amplitude: f64) -> TargetSpec {
        TargetSpec {
            range_m,
            theta_rad,
            amplitude,
            vital: Some(VitalModel {
                f_r_hz: 0.25,
                f_h_hz: 1.2,
                m_r_m: vec![0.0],
                m_h_m: vec![0.0],
            }),
        }
    }

    #[test]
    fn space_time_vector_is_row_major_flatten() {
        let frame = [
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, 0.0),
        ];
        // Nv=1: identity reshape.
        let v = space_time_vector(&frame, 1, 4).unwrap();
        assert_eq!(v.as_slice(), &frame);
        // Nv=2, Nf=2, [[p,q],[r,s]] -> [p,q,r,s].
        let v = space_time_vector(&frame, 2, 2).unwrap();
        assert_eq!(v.as_slice(), &frame);
        assert!(space_time_vector(&frame, 2, 3).is_err());
    }

    #[test]
    fn space_time_vector_matches_kronecker_direction() {
        let nv = 3;
        let nf = 5;
        let theta = 0.4;
        let omega = range_to_beat(1.2, 60.0e12);
        let a = angle_steering(theta, nv).unwrap();
        let s = range_steering(omega, 0.25e-6, nf).unwrap();
        // Rank-1 frame a(theta) s(omega)^T flattened row-major.
        let mut frame = Vec::with_capacity(nv * nf);
        for av in &a {
            for sn in &s {
                frame.push(av * sn);
            }
        }
        let y = space_time_vector(&frame, nv, nf).unwrap();
        // Kronecker product a kron s has element (v*nf + n) = a_v * s_n.
        let mut kron = DVector::zeros(nv * nf);
        for v in 0..nv {
            for n in 0..nf {
                kron[v * nf + n] = a[v] * s[n];
            }
        }
        let cos_sim = (y.adjoint() * &kron)[(0, 0)].norm() / (y.norm() * kron.norm());
        assert!((1.0 - cos_sim) < 1e-12, "cosine similarity {cos_sim}");
    }

    #[test]
    fn single_frame_cov_is_rank_one_with_correct_trace() {
        let cfg = small_config();
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: 0.0,
                seed: 0,
                targets: vec![still_human(1.0, 0.2, 1.0)],
            },
            &cfg,
        )
        .unwrap();
        let cov = estimate_cov(&cube, &[3]).unwrap();
        let y = space_time_vector(cube.frame(3), cfg.nv, cfg.nf).unwrap();
        assert!((cov.trace() - y.norm_squared()).abs() < 1e-9 * y.norm_squared());
        let eig = hermitian_eigen_desc(cov.matrix.clone());
        assert!(eig.eigenvalues[1].abs() < 1e-10 * eig.eigenvalues[0]);
    }

    #[test]
    fn noiseless_static_target_cov_is_rank_one_over_all_frames() {
        let cfg = small_config();
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: 0.0,
                seed: 0,
                targets: vec![still_human(1.4, -0.3, 2.0)],
            },
            &cfg,
        )
        .unwrap();
        let frames: Vec<usize> = (0..cfg.ns).collect();
        let cov = estimate_cov(&cube, &frames).unwrap();
        let eig = hermitian_eigen_desc(cov.matrix.clone());
        assert!(eig.eigenvalues[1] < 1e-10 * eig.eigenvalues[0]);
    }

    #[test]
    fn noise_only_cov_statistics() {
        let cfg = RadarConfig {
            nf: 8,
            ns: 512,
            nv: 4,
            ..RadarConfig::default()
        };
        let sigma = 0.7;
        let mut human = still_human(1.0, 0.0, 1.0);
        human.amplitude = 0.0;
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: sigma,
                seed: 11,
                targets: vec![human],
            },
            &cfg,
        )
        .unwrap();
        let frames: Vec<usize> = (0..cfg.ns).collect();
        let cov = estimate_cov(&cube, &frames).unwrap();
        let per_cell = cov.trace() / cov.dim() as f64;
        assert!(
            (per_cell - sigma * sigma).abs() < 0.1 * sigma * sigma,
            "noise power estimate {per_cell} vs {}",
            sigma * sigma
        );
        let eig = hermitian_eigen_desc(cov.matrix.clone());
        let spread = eig.eigenvalues[0] / eig.eigenvalues[cov.dim() - 1];
        assert!(spread < 4.0, "eigenvalue spread {spread}");
    }

    #[test]
    fn empty_frame_set_rejected() {
        let cfg = small_config();
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: 0.0,
                seed: 0,
                targets: vec![still_human(1.0, 0.0, 1.0)],
            },
            &cfg,
        )
        .unwrap();
        assert!(estimate_cov(&cube, &[]).is_err());
        assert!(estimate_cov(&cube, &[cfg.ns]).is_err());
    }

    #[test]
    fn stride_reduces_dimension_and_is_recorded() {
        let cfg = small_config();
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: 0.0,
                seed: 0,
                targets: vec![still_human(1.0, 0.0, 1.0)],
            },
            &cfg,
        )
        .unwrap();
        let cov = estimate_cov_strided(&cube, &[0, 1], 4).unwrap();
        assert_eq!(cov.nf, 4);
        assert_eq!(cov.stride, 4);
        assert_eq!(cov.dim(), cfg.nv * 4);
    }

    #[test]
    fn on_grid_noiseless_target_localized_exactly() {
        let cfg = small_config();
        let truth_range = 1.0;
        let truth_theta = 0.0;
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: 0.0,
                seed: 0,
                targets: vec![still_human(truth_range, truth_theta, 1.0)],
            },
            &cfg,
        )
        .unwrap();
        let frames: Vec<usize> = (0..cfg.ns).collect();
        let cov = estimate_cov(&cube, &frames).unwrap();
        let theta_grid: Vec<f64> = (-6..=6).map(|d| (d as f64 * 10.0).to_radians()).collect();
        let range_grid_m = range_grid(0.2, 3.0, 0.02);
        let omega_grid: Vec<f64> = range_grid_m
            .iter()
            .map(|&r| range_to_beat(r, cfg.slope_hz_per_s))
            .collect();
        let (spectrum, est) = music_2d(&cov, &cfg, 1, &theta_grid, &omega_grid).unwrap();
        assert!((est.range_m - truth_range).abs() < 1e-9, "range {}", est.range_m);
        assert!((est.theta_rad - truth_theta).abs() < 1e-12);
        // A dominant peak.
        assert!(spectrum.peak_to_median() > 1e3);
        // All spectrum values positive and finite.
        assert!(spectrum.values.iter().all(|v| *v > 0.0 && v.is_finite()));
    }

    #[test]
    fn complement_evaluation_matches_explicit_noise_subspace() {
        let cfg = small_config();
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: 0.05,
                seed: 3,
                targets: vec![still_human(1.3, 0.25, 1.0)],
            },
            &cfg,
        )
        .unwrap();
        let frames: Vec<usize> = (0..cfg.ns).collect();
        let cov = estimate_cov(&cube, &frames).unwrap();
        let theta_grid = [-0.2, 0.0, 0.25, 0.4];
        let omega_grid: Vec<f64> = [0.8, 1.3, 2.0]
            .iter()
            .map(|&r| range_to_beat(r, cfg.slope_hz_per_s))
            .collect();
        let (spectrum, _) = music_2d(&cov, &cfg, 1, &theta_grid, &omega_grid).unwrap();

        // Independent route: explicit noise-subspace projection.
        let eig = hermitian_eigen_desc(cov.matrix.clone());
        let dim = cov.dim();
        let g = eig.eigenvectors.columns(1, dim - 1);
        for (ti, &theta) in theta_grid.iter().enumerate() {
            let a = angle_steering(theta, cfg.nv).unwrap();
            for (oi, &omega) in omega_grid.iter().enumerate() {
                let s = range_steering(omega, cfg.tf_s, cfg.nf).unwrap();
                let mut v = DVector::zeros(dim);
                for vi in 0..cfg.nv {
                    for n in 0..cfg.nf {
                        v[vi * cfg.nf + n] = a[vi] * s[n];
                    }
                }
                let direct = 1.0 / (g.adjoint() * &v).norm_squared();
                let fast = spectrum.value(ti, oi);
                assert!(
                    (direct - fast).abs() <= 1e-9 * direct.abs(),
                    "({ti},{oi}): {direct} vs {fast}"
                );
            }
        }
    }

    #[test]
    fn noise_only_spectrum_has_no_dominant_peak() {
        let cfg = RadarConfig {
            nf: 8,
            ns: 256,
            nv: 4,
            ..RadarConfig::default()
        };
        for seed in 0..20 {
            let mut human = still_human(1.0, 0.0, 1.0);
            human.amplitude = 0.0;
            let cube = synthesize(
                &SceneSpec {
                    noise_sigma: 1.0,
                    seed,
                    targets: vec![human],
                },
                &cfg,
            )
            .unwrap();
            let frames: Vec<usize> = (0..cfg.ns).collect();
            let cov = estimate_cov(&cube, &frames).unwrap();
            let lc = LocateConfig::for_radar(&cfg, 1);
            let omega_grid = lc.omega_grid(cfg.slope_hz_per_s);
            let (spectrum, _) =
                music_2d(&cov, &cfg, 1, &lc.theta_grid_rad, &omega_grid).unwrap();
            assert!(
                spectrum.peak_to_median() < 10.0,
                "seed {seed}: ratio {}",
                spectrum.peak_to_median()
            );
        }
    }

    #[test]
    fn scale_invariance_of_argmax() {
        let cfg = small_config();
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: 0.02,
                seed: 5,
                targets: vec![still_human(1.1, 0.15, 1.0)],
            },
            &cfg,
        )
        .unwrap();
        let frames: Vec<usize> = (0..cfg.ns).collect();
        let lc = LocateConfig::for_radar(&cfg, 1);
        let omega_grid = lc.omega_grid(cfg.slope_hz_per_s);
        let cov = estimate_cov(&cube, &frames).unwrap();
        let (s1, _) = music_2d(&cov, &cfg, 1, &lc.theta_grid_rad, &omega_grid).unwrap();
        let scaled = cube.scaled(Complex64::new(-2.5, 1.25));
        let cov2 = estimate_cov(&scaled, &frames).unwrap();
        let (s2, _) = music_2d(&cov2, &cfg, 1, &lc.theta_grid_rad, &omega_grid).unwrap();
        assert_eq!(s1.argmax_indices(), s2.argmax_indices());
    }

    #[test]
    fn degenerate_covariance_is_an_error() {
        let cfg = small_config();
        let cube = AdcCube::zeroed(cfg.clone()).unwrap();
        let frames: Vec<usize> = (0..cfg.ns).collect();
        let cov = estimate_cov(&cube, &frames).unwrap();
        let lc = LocateConfig::for_radar(&cfg, 1);
        let omega_grid = lc.omega_grid(cfg.slope_hz_per_s);
        let err = music_2d(&cov, &cfg, 1, &lc.theta_grid_rad, &omega_grid).unwrap_err();
        assert_eq!(err.stage(), "locate");
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let cfg = small_config();
        let cube = synthesize(
            &SceneSpec {
                noise_sigma: 0.1,
                seed: 21,
                targets: vec![still_human(1.0, 0.0, 1.0)],
            },
            &cfg,
        )
        .unwrap();
        let frames: Vec<usize> = (0..cfg.ns).collect();
        let cov = estimate_cov(&cube, &frames).unwrap();
        let eig = hermitian_eigen_desc(cov.matrix.clone());
        let sum: f64 = eig.eigenvalues.iter().sum();
        assert!((sum - cov.trace()).abs() <= 1e-9 * cov.trace());
        // Descending order and PSD within tolerance.
        for w in eig.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(eig.eigenvalues[cov.dim() - 1] >= -1e-8 * eig.eigenvalues[0]);
    }
}
