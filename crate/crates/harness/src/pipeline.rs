//! End-to-end processing of one estimation window.
//!
//! Order: static clutter removal, 2D MUSIC localization, matched collapse
//! of the located bin, DC offset removal, DACM demodulation, then the
//! harmonic MUSIC estimator alongside the FFT baseline. Every intermediate
//! product is returned to the caller.

use vitalwave_core::clutter::remove_static;
use vitalwave_core::cube::AdcCube;
use vitalwave_core::error::{Error, Result};
use vitalwave_core::hmusic::{fft_baseline, hmusic_estimate, HmusicConfig, HmusicSpectrum, VitalEstimate};
use vitalwave_core::locate::{estimate_cov_strided, music_2d, LocateConfig, PseudoSpectrum2D, RangeAngle};
use vitalwave_core::phase::{collapse_vital_bin, dacm, remove_dc, IqSeries, PhaseSeries};
use vitalwave_core::RadarConfig;

/// Settings for one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Clutter filter window; `None` uses the whole block.
    pub clutter_window: Option<usize>,
    pub locate: LocateConfig,
    pub hmusic: HmusicConfig,
    /// Localization peaks with a max/median ratio below this are treated
    /// as "no target" and abort the run.
    pub min_peak_to_median: f64,
}

impl PipelineConfig {
    pub fn for_radar(config: &RadarConfig, locate_stride: usize) -> Self {
        Self {
            clutter_window: None,
            locate: LocateConfig::for_radar(config, locate_stride),
            hmusic: HmusicConfig::default(),
            // Noise-only spectra sit near max/median = 1; a real target
            // centered between grid cells still reaches about 5.
            min_peak_to_median: 2.0,
        }
    }
}

/// Everything one window produces.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub localization: RangeAngle,
    /// Peak prominence of the localization spectrum; `None` when a known
    /// bin was supplied.
    pub peak_to_median: Option<f64>,
    /// Localization spectrum; `None` when a known bin was supplied.
    pub loc_spectrum: Option<PseudoSpectrum2D>,
    pub iq: IqSeries,
    pub phase: PhaseSeries,
    pub hmusic: VitalEstimate,
    pub hmusic_spectrum: HmusicSpectrum,
    pub fft: VitalEstimate,
}

/// Run the full chain on one cube. `known_bin` skips localization and
/// collapses onto the supplied bin instead (the target is assumed static
/// across windows of a session).
pub fn run_pipeline(
    cube: &AdcCube,
    opts: &PipelineConfig,
    known_bin: Option<RangeAngle>,
) -> Result<PipelineOutput> {
    let config = cube.config().clone();
    let window = opts.clutter_window.unwrap_or(config.ns);
    let cleaned = remove_static(cube, window)?;

    let (localization, peak_to_median, loc_spectrum) = match known_bin {
        Some(bin) => (bin, None, None),
        None => {
            let frames: Vec<usize> = (0..config.ns).collect();
            let cov = estimate_cov_strided(&cleaned, &frames, opts.locate.stride)?;
            let omega_grid = opts.locate.omega_grid(config.slope_hz_per_s);
            let (spectrum, bin) = music_2d(
                &cov,
                &config,
                opts.locate.n_sources,
                &opts.locate.theta_grid_rad,
                &omega_grid,
            )?;
            let ratio = spectrum.peak_to_median();
            if ratio < opts.min_peak_to_median {
                return Err(Error::Locate(format!(
                    "no dominant target: spectrum max/median {ratio:.2} below {:.2}",
                    opts.min_peak_to_median
                )));
            }
            (bin, Some(ratio), Some(spectrum))
        }
    };

    let iq = collapse_vital_bin(&cleaned, &localization)?;
    let centered = remove_dc(&iq)?;
    let phase = dacm(&centered, config.ts_s)?;
    let (hmusic, hmusic_spectrum) = hmusic_estimate(&phase, &opts.hmusic)?;
    let fft = fft_baseline(&phase, &opts.hmusic)?;

    Ok(PipelineOutput {
        localization,
        peak_to_median,
        loc_spectrum,
        iq,
        phase,
        hmusic,
        hmusic_spectrum,
        fft,
    })
}
