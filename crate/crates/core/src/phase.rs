//! Vital-bin phase extraction.
//!
//! Collapses each frame of the cube onto the located range-azimuth bin with
//! matched steering vectors, removes the DC offset of the resulting I/Q arc
//! with a least-squares circle fit, and demodulates the arc to a continuous
//! phase series by differentiate-and-cross-multiply (DACM) integration.

use std::io::Write;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::cube::AdcCube;
use crate::error::{Error, Result};
use crate::locate::RangeAngle;
use crate::steering::cis;

/// Complex slow-time series of the collapsed vital bin.
#[derive(Debug, Clone)]
pub struct IqSeries {
    pub values: Vec<Complex64>,
    /// Beat frequency the fast-time collapse was matched to (rad/s).
    pub omega_b: f64,
    /// Azimuth the antenna collapse was matched to (rad).
    pub theta_rad: f64,
}

/// Real demodulated phase over slow time (radians).
#[derive(Debug, Clone)]
pub struct PhaseSeries {
    pub values: Vec<f64>,
    /// Slow-time sample interval (s).
    pub ts_s: f64,
}

impl PhaseSeries {
    /// Dump as `t_s,phase_rad` CSV rows.
    pub fn write_csv(&self, writer: &mut impl Write) -> std::io::Result<()> {
        writeln!(writer, "t_s,phase_rad")?;
        for (m, x) in self.values.iter().enumerate() {
            writeln!(writer, "{},{}", m as f64 * self.ts_s, x)?;
        }
        Ok(())
    }
}

/// Matched fast-time collapse: `u_m[v] = (1/Nf) sum_n y_m[v,n] conj(s_n)`
/// with `s_n = exp(j*omega_b*n*Tf)`.
///
/// Returns one length-`nv` vector per frame.
pub fn collapse_fast_time(cube: &AdcCube, omega_b: f64) -> Result<Vec<Vec<Complex64>>> {
    let cfg = cube.config();
    if !omega_b.is_finite() || omega_b < 0.0 {
        return Err(Error::Phase(format!(
            "beat frequency {omega_b} rad/s must be non-negative"
        )));
    }
    let nyquist = std::f64::consts::PI / cfg.tf_s;
    if omega_b >= nyquist {
        return Err(Error::Phase(format!(
            "beat frequency {omega_b} rad/s at or above fast-time Nyquist {nyquist}"
        )));
    }
    let conj_s: Vec<Complex64> = (0..cfg.nf)
        .map(|n| cis(-omega_b * n as f64 * cfg.tf_s))
        .collect();
    let scale = 1.0 / cfg.nf as f64;
    let mut out = Vec::with_capacity(cfg.ns);
    for m in 0..cfg.ns {
        let frame = cube.frame(m);
        let mut per_antenna = Vec::with_capacity(cfg.nv);
        for v in 0..cfg.nv {
            let row = &frame[v * cfg.nf..(v + 1) * cfg.nf];
            let mut acc = Complex64::new(0.0, 0.0);
            for (z, s) in row.iter().zip(&conj_s) {
                acc += z * s;
            }
            per_antenna.push(acc * scale);
        }
        out.push(per_antenna);
    }
    Ok(out)
}

/// Matched antenna collapse at half-wavelength spacing:
/// `v_m = (1/Nv) a(theta)^H u_m`.
pub fn collapse_antennas(
    u_per_frame: &[Vec<Complex64>],
    theta_rad: f64,
) -> Result<Vec<Complex64>> {
    collapse_antennas_spaced(u_per_frame, theta_rad, 0.5)
}

/// Antenna collapse for arbitrary element spacing.
pub fn collapse_antennas_spaced(
    u_per_frame: &[Vec<Complex64>],
    theta_rad: f64,
    d_over_lambda: f64,
) -> Result<Vec<Complex64>> {
    let nv = u_per_frame.first().map(|u| u.len()).unwrap_or(0);
    if nv == 0 {
        return Err(Error::Phase("empty antenna collapse input".into()));
    }
    let a = crate::steering::angle_steering_spaced(theta_rad, nv, d_over_lambda)
        .map_err(|e| Error::Phase(e.to_string()))?;
    let scale = 1.0 / nv as f64;
    let mut out = Vec::with_capacity(u_per_frame.len());
    for (m, u) in u_per_frame.iter().enumerate() {
        if u.len() != nv {
            return Err(Error::Phase(format!(
                "frame {m} has {} antennas, expected {nv}",
                u.len()
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (av, uv) in a.iter().zip(u) {
            acc += av.conj() * uv;
        }
        out.push(acc * scale);
    }
    Ok(out)
}

/// Collapse a cube onto a located bin: fast time then antennas.
pub fn collapse_vital_bin(cube: &AdcCube, bin: &RangeAngle) -> Result<IqSeries> {
    let u = collapse_fast_time(cube, bin.omega_b)?;
    let values = collapse_antennas_spaced(&u, bin.theta_rad, cube.config().d_over_lambda)?;
    Ok(IqSeries {
        values,
        omega_b: bin.omega_b,
        theta_rad: bin.theta_rad,
    })
}

/// Least-squares circle fit (algebraic fit refined by one Gauss-Newton
/// step on the geometric residuals). Returns `(center, radius)`.
///
/// Fails on fewer than 3 points or a degenerate (collinear or zero-radius)
/// point set.
pub fn circle_fit(points: &[Complex64]) -> Result<(Complex64, f64)> {
    if points.len() < 3 {
        return Err(Error::Phase(format!(
            "circle fit needs at least 3 samples, got {}",
            points.len()
        )));
    }
    // Center the data for conditioning.
    let mean = points.iter().sum::<Complex64>() / points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|z| z.re - mean.re).collect();
    let ys: Vec<f64> = points.iter().map(|z| z.im - mean.im).collect();
    let scale: f64 = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| x * x + y * y)
        .sum::<f64>()
        / points.len() as f64)
        .sqrt();
    if scale == 0.0 {
        return Err(Error::Phase("degenerate circle fit: all samples identical".into()));
    }

    // Algebraic fit: x^2 + y^2 = 2*a*x + 2*b*y + c as linear least squares
    // via the 3x3 normal equations.
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for (x, y) in xs.iter().zip(&ys) {
        let row = Vector3::new(2.0 * x, 2.0 * y, 1.0);
        let rhs = x * x + y * y;
        ata += row * row.transpose();
        atb += row * rhs;
    }
    // Collinear inputs make the normal matrix near-singular.
    let sv = ata.svd(false, false).singular_values;
    if sv[2] <= 1e-12 * sv[0] {
        return Err(Error::Phase("degenerate circle fit: collinear samples".into()));
    }
    let solution = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::Phase("degenerate circle fit: collinear samples".into()))?;
    let mut cx = solution[0];
    let mut cy = solution[1];
    let mut r = (solution[2] + cx * cx + cy * cy).max(0.0).sqrt();
    if r <= 1e-12 * scale {
        return Err(Error::Phase("degenerate circle fit: zero radius".into()));
    }

    // One Gauss-Newton step on sum((|p - c| - r)^2).
    let mut jtj = Matrix3::<f64>::zeros();
    let mut jtr = Vector3::<f64>::zeros();
    let mut ok = true;
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - cx;
        let dy = y - cy;
        let dist = (dx * dx + dy * dy).sqrt();
        if dist <= 1e-12 * scale {
            ok = false;
            break;
        }
        let resid = dist - r;
        let jac = Vector3::new(-dx / dist, -dy / dist, -1.0);
        jtj += jac * jac.transpose();
        jtr += jac * resid;
    }
    if ok {
        if let Some(step) = jtj.lu().solve(&jtr) {
            let (nx, ny, nr) = (cx - step[0], cy - step[1], r - step[2]);
            if nr > 0.0 && nx.is_finite() && ny.is_finite() {
                cx = nx;
                cy = ny;
                r = nr;
            }
        }
    }

    Ok((Complex64::new(cx + mean.re, cy + mean.im), r))
}

/// Re-center the I/Q arc on the origin by subtracting the fitted circle
/// center.
pub fn remove_dc(iq: &IqSeries) -> Result<IqSeries> {
    let (center, _radius) = circle_fit(&iq.values)?;
    Ok(IqSeries {
        values: iq.values.iter().map(|z| z - center).collect(),
        omega_b: iq.omega_b,
        theta_rad: iq.theta_rad,
    })
}

/// DACM phase demodulation.
///
/// `x[0] = 0`, `x[m] = x[m-1] + (I_m*dQ_m - Q_m*dI_m) / (I_m^2 + Q_m^2)`
/// with backward differences. The output is an accumulated integral, so it
/// carries no 2*pi wrap discontinuities.
pub fn dacm(iq: &IqSeries, ts_s: f64) -> Result<PhaseSeries> {
    if let Some(idx) = iq.values.iter().position(|z| z.norm_sqr() == 0.0) {
        return Err(Error::Phase(format!("zero-magnitude sample at index {idx}")));
    }
    let mut values = Vec::with_capacity(iq.values.len());
    values.push(0.0);
    for m in 1..iq.values.len() {
        let z = iq.values[m];
        let dz = z - iq.values[m - 1];
        let increment = (z.re * dz.im - z.im * dz.re) / z.norm_sqr();
        values.push(values[m - 1] + increment);
    }
    Ok(PhaseSeries { values, ts_s })
}
