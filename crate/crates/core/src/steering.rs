//! Steering vectors and beat-frequency/range conversions.
//!
//! The angle steering vector across a uniform linear array and the
//! beat-frequency steering vector across fast-time samples are the atoms
//! every subspace search in this crate projects against.

use num_complex::Complex64;

use crate::config::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Unit-modulus phasor `exp(j*phase)`.
#[inline]
pub(crate) fn cis(phase: f64) -> Complex64 {
    Complex64::new(phase.cos(), phase.sin())
}

/// Angle steering vector for half-wavelength element spacing.
///
/// Element `v` is `exp(j*pi*v*sin(theta))`; element 0 is always `1 + 0j`.
pub fn angle_steering(theta_rad: f64, nv: usize) -> Result<Vec<Complex64>> {
    angle_steering_spaced(theta_rad, nv, 0.5)
}

/// Angle steering vector for arbitrary element spacing `d_over_lambda`.
///
/// Element `v` is `exp(j*2*pi*d_over_lambda*v*sin(theta))`.
pub fn angle_steering_spaced(
    theta_rad: f64,
    nv: usize,
    d_over_lambda: f64,
) -> Result<Vec<Complex64>> {
    if !theta_rad.is_finite() || theta_rad.abs() > std::f64::consts::FRAC_PI_2 {
        return Err(Error::Config(format!(
            "azimuth {theta_rad} rad outside [-pi/2, pi/2]"
        )));
    }
    let phase_step = 2.0 * std::f64::consts::PI * d_over_lambda * theta_rad.sin();
    Ok((0..nv).map(|v| cis(v as f64 * phase_step)).collect())
}

/// Beat-frequency steering vector across `nf` fast-time samples.
///
/// Element `n` is `exp(j*omega_b*n*tf)`.
pub fn range_steering(omega_b: f64, tf_s: f64, nf: usize) -> Result<Vec<Complex64>> {
    if !omega_b.is_finite() || omega_b < 0.0 {
        return Err(Error::Config(format!(
            "beat frequency {omega_b} rad/s must be non-negative"
        )));
    }
    let phase_step = omega_b * tf_s;
    Ok((0..nf).map(|n| cis(n as f64 * phase_step)).collect())
}

/// Target range for a beat angular frequency: `omega_b * c / (4*pi*S)`.
pub fn beat_to_range(omega_b: f64, slope_hz_per_s: f64) -> f64 {
    omega_b * SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * slope_hz_per_s)
}

/// Beat angular frequency of a target at `range_m`: `4*pi*S*R / c`.
pub fn range_to_beat(range_m: f64, slope_hz_per_s: f64) -> f64 {
    4.0 * std::f64::consts::PI * slope_hz_per_s * range_m / SPEED_OF_LIGHT
}
