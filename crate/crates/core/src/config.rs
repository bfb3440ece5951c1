//! Radar waveform, sampling, and antenna-array configuration.

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s), exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// FMCW waveform and sampling parameters shared by every stage.
///
/// Serialized as flat `key = value` text, one parameter per line, SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarConfig {
    /// Chirp start frequency (Hz).
    pub f0_hz: f64,
    /// Chirp slope (Hz/s).
    pub slope_hz_per_s: f64,
    /// Chirp duration (s).
    pub chirp_s: f64,
    /// Fast-time (ADC) sample interval within a chirp (s).
    pub tf_s: f64,
    /// Slow-time frame interval (s).
    pub ts_s: f64,
    /// Fast-time samples per chirp.
    pub nf: usize,
    /// Slow-time samples (frames) in the cube.
    pub ns: usize,
    /// Virtual antenna count of the uniform linear array.
    pub nv: usize,
    /// Antenna spacing as a fraction of the start-frequency wavelength.
    pub d_over_lambda: f64,
}

impl Default for RadarConfig {
    /// 60 GHz short-range preset: 60 MHz/us slope, 240 samples at 4 Msps
    /// per chirp (3600 MHz swept bandwidth), 50 ms frames, 256-frame
    /// estimation window, 8 virtual antennas at half-wavelength spacing.
    fn default() -> Self {
        Self {
            f0_hz: 60.0e9,
            slope_hz_per_s: 60.0e12,
            chirp_s: 66.66e-6,
            tf_s: 0.25e-6,
            ts_s: 50.0e-3,
            nf: 240,
            ns: 256,
            nv: 8,
            d_over_lambda: 0.5,
        }
    }
}

impl RadarConfig {
    /// Variant of the default preset with a reduced fast-time sample count.
    ///
    /// Same slope and sample rate, so the unambiguous range is unchanged;
    /// range resolution is coarser. Intended for large batch simulation
    /// studies where the full 240-sample space-time decomposition would
    /// dominate the runtime.
    pub fn coarse() -> Self {
        Self {
            nf: 32,
            ..Self::default()
        }
    }

    /// Wavelength at the chirp start frequency (m).
    pub fn lambda0_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.f0_hz
    }

    /// Swept bandwidth covered by the sampled portion of the chirp (Hz).
    pub fn bandwidth_hz(&self) -> f64 {
        self.slope_hz_per_s * self.nf as f64 * self.tf_s
    }

    /// Range resolution c / 2B (m).
    pub fn range_resolution_m(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth_hz())
    }

    /// Largest unambiguous range for the given fast-time stride (m).
    ///
    /// The beat frequency of a target must stay below the Nyquist rate of
    /// the (possibly decimated) fast-time sampling.
    pub fn unambiguous_range_m(&self, stride: usize) -> f64 {
        SPEED_OF_LIGHT / (4.0 * self.slope_hz_per_s * self.tf_s * stride as f64)
    }

    /// Slow-time Nyquist frequency 1 / 2Ts (Hz).
    pub fn slow_time_nyquist_hz(&self) -> f64 {
        0.5 / self.ts_s
    }

    /// Number of complex samples in one cube built from this config.
    pub fn sample_count(&self) -> usize {
        self.ns * self.nv * self.nf
    }

    /// Same configuration with a different frame count.
    pub fn with_ns(&self, ns: usize) -> Self {
        Self { ns, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("f0_hz", self.f0_hz),
            ("slope_hz_per_s", self.slope_hz_per_s),
            ("chirp_s", self.chirp_s),
            ("tf_s", self.tf_s),
            ("ts_s", self.ts_s),
            ("d_over_lambda", self.d_over_lambda),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be finite and positive, got {value}"
                )));
            }
        }
        if self.nf < 2 {
            return Err(Error::Config(format!("nf must be >= 2, got {}", self.nf)));
        }
        if self.ns < 2 {
            return Err(Error::Config(format!("ns must be >= 2, got {}", self.ns)));
        }
        if self.nv < 1 {
            return Err(Error::Config(format!("nv must be >= 1, got {}", self.nv)));
        }
        if self.nf as f64 * self.tf_s > self.chirp_s * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "fast-time samples do not fit inside the chirp: nf*tf = {:.3e} s > chirp_s = {:.3e} s",
                self.nf as f64 * self.tf_s,
                self.chirp_s
            )));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| Error::Config(format!("parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_file(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_toml_string())?;
        Ok(())
    }
}
