//! Command-line front end: simulate scenes, run the estimation pipeline,
//! evaluate accuracy over Monte-Carlo trials, and dump spectra for
//! plotting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use vitalwave_core::cube::AdcCube;
use vitalwave_core::error::Result;
use vitalwave_core::hmusic::VitalEstimate;
use vitalwave_core::locate::RangeAngle;
use vitalwave_core::scene::SceneFile;
use vitalwave_core::RadarConfig;
use vitalwave_harness::eval::{evaluate, DistSpec};
use vitalwave_harness::pipeline::{run_pipeline, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "vitalwave",
    version,
    about = "FMCW radar vital-sign simulation and estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize an ADC cube from a scene description
    Simulate {
        /// Scene TOML file
        scene: PathBuf,
        /// Output cube path
        #[arg(short, long)]
        output: PathBuf,
        /// Radar config TOML; overrides the scene file's [radar] table
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run the estimation pipeline over a cube, sliding the window
    Estimate {
        /// Input cube
        cube: PathBuf,
        /// JSON-lines output, one record per window (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Radar config TOML (waveform parameters; dimensions come from
        /// the cube header)
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for first-window spectra and phase CSV dumps
        #[arg(long)]
        dump_spectra: Option<PathBuf>,
        /// Estimation window length (slow-time samples)
        #[arg(long, default_value_t = 256)]
        window_len: usize,
        /// Slide between windows (slow-time samples)
        #[arg(long, default_value_t = 20)]
        window_stride: usize,
        /// Fast-time decimation for localization
        #[arg(long, default_value_t = 1)]
        locate_stride: usize,
    },
    /// Monte-Carlo evaluation of estimator accuracy
    Evaluate {
        /// Distribution TOML file
        dist: PathBuf,
        /// Number of simulated scenes
        #[arg(long)]
        trials: usize,
        /// Master seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report JSON output path
        #[arg(short, long)]
        output: PathBuf,
        /// Optional per-window results JSON-lines path
        #[arg(long)]
        results: Option<PathBuf>,
        /// Optional percentile-table CSV path
        #[arg(long)]
        percentiles: Option<PathBuf>,
    },
    /// Dump a pseudo-spectrum as CSV for external plotting
    Spectrum {
        /// Input cube
        cube: PathBuf,
        /// Which stage's spectrum to dump
        #[arg(long, value_enum)]
        stage: Stage,
        /// Radar config TOML
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output path (stage `locate`: CSV file; stage `hmusic`: directory
        /// receiving resp.csv and heart.csv). Stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Estimation window length (slow-time samples)
        #[arg(long, default_value_t = 256)]
        window_len: usize,
        /// Fast-time decimation for localization
        #[arg(long, default_value_t = 1)]
        locate_stride: usize,
    },
}

#[derive(ValueEnum, Clone, Copy)]
enum Stage {
    Locate,
    Hmusic,
}

/// One line of `estimate` output.
#[derive(Serialize)]
struct WindowRecord {
    window_start: usize,
    t_start_s: f64,
    localization: RangeAngle,
    #[serde(skip_serializing_if = "Option::is_none")]
    peak_to_median: Option<f64>,
    hmusic: VitalEstimate,
    fft: VitalEstimate,
}

fn load_radar(explicit: Option<&Path>, embedded: Option<RadarConfig>) -> Result<RadarConfig> {
    if let Some(path) = explicit {
        return RadarConfig::from_file(path);
    }
    if let Some(cfg) = embedded {
        cfg.validate()?;
        return Ok(cfg);
    }
    Ok(RadarConfig::default())
}

/// Load a cube, taking the dimensions from the file header and the
/// waveform parameters from `base`.
fn load_cube(path: &Path, base: &RadarConfig) -> Result<AdcCube> {
    let (ns, nv, nf) = AdcCube::peek_dims(path)?;
    let config = RadarConfig {
        ns,
        nv,
        nf,
        ..base.clone()
    };
    config.validate()?;
    AdcCube::load(path, config)
}

fn write_or_stdout(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, contents)?,
        None => print!("{contents}"),
    }
    Ok(())
}

fn cmd_simulate(scene_path: &Path, output: &Path, config: Option<&Path>) -> Result<()> {
    let doc = SceneFile::from_file(scene_path)?;
    let radar = load_radar(config, doc.radar.clone())?;
    let cube = vitalwave_core::scene::synthesize(&doc.scene, &radar)?;
    cube.save(output)?;
    let human = doc.scene.human();
    let snr = if doc.scene.noise_sigma > 0.0 {
        format!(
            ", human snr {:.1} dB",
            20.0 * (human.amplitude / doc.scene.noise_sigma).log10()
        )
    } else {
        ", noiseless".to_string()
    };
    println!(
        "wrote {}: {}x{}x{} samples{snr}",
        output.display(),
        radar.ns,
        radar.nv,
        radar.nf
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_estimate(
    cube_path: &Path,
    output: Option<&Path>,
    config: Option<&Path>,
    dump_spectra: Option<&Path>,
    window_len: usize,
    window_stride: usize,
    locate_stride: usize,
) -> Result<()> {
    let radar = load_radar(config, None)?;
    let cube = load_cube(cube_path, &radar)?;
    let session = cube.config().clone();
    let window_len = window_len.min(session.ns);

    let window_cfg = session.with_ns(window_len);
    let opts = PipelineConfig::for_radar(&window_cfg, locate_stride);

    let mut records = Vec::new();
    let first = cube.slice_frames(0, window_len)?;
    let out0 = run_pipeline(&first, &opts, None)?;

    if let Some(dir) = dump_spectra {
        fs::create_dir_all(dir)?;
        if let Some(spectrum) = &out0.loc_spectrum {
            let mut f = fs::File::create(dir.join("locate.csv"))?;
            spectrum.write_csv(&mut f)?;
        }
        let mut f = fs::File::create(dir.join("resp.csv"))?;
        out0.hmusic_spectrum.write_resp_csv(&mut f)?;
        let mut f = fs::File::create(dir.join("heart.csv"))?;
        out0.hmusic_spectrum.write_heart_csv(&mut f)?;
        let mut f = fs::File::create(dir.join("phase.csv"))?;
        out0.phase.write_csv(&mut f)?;
    }

    let localization = out0.localization;
    records.push(WindowRecord {
        window_start: 0,
        t_start_s: 0.0,
        localization,
        peak_to_median: out0.peak_to_median,
        hmusic: out0.hmusic,
        fft: out0.fft,
    });

    let mut start = window_stride;
    while start + window_len <= session.ns {
        let window = cube.slice_frames(start, window_len)?;
        let out = run_pipeline(&window, &opts, Some(localization))?;
        records.push(WindowRecord {
            window_start: start,
            t_start_s: start as f64 * session.ts_s,
            localization,
            peak_to_median: None,
            hmusic: out.hmusic,
            fft: out.fft,
        });
        start += window_stride;
    }

    let mut text = String::new();
    for record in &records {
        text.push_str(&serde_json::to_string(record).expect("record serializes"));
        text.push('\n');
    }
    write_or_stdout(output, &text)?;
    Ok(())
}

fn cmd_evaluate(
    dist_path: &Path,
    trials: usize,
    seed: u64,
    output: &Path,
    results_path: Option<&Path>,
    percentiles: Option<&Path>,
) -> Result<()> {
    let dist = DistSpec::from_file(dist_path)?;
    let (report, results) = evaluate(&dist, trials, seed)?;
    fs::write(output, report.to_json_pretty())?;
    if let Some(path) = results_path {
        let mut f = fs::File::create(path)?;
        for r in &results {
            writeln!(f, "{}", serde_json::to_string(r).expect("result serializes"))?;
        }
    }
    if let Some(path) = percentiles {
        fs::write(path, report.percentile_csv())?;
    }
    println!(
        "{} windows over {} trials: hmusic rr {:.3} hr {:.3} | fft rr {:.3} hr {:.3}",
        report.n_windows,
        report.n_trials,
        report.hmusic.rr_accuracy,
        report.hmusic.hr_accuracy,
        report.fft.rr_accuracy,
        report.fft.hr_accuracy
    );
    Ok(())
}

fn cmd_spectrum(
    cube_path: &Path,
    stage: Stage,
    config: Option<&Path>,
    output: Option<&Path>,
    window_len: usize,
    locate_stride: usize,
) -> Result<()> {
    let radar = load_radar(config, None)?;
    let cube = load_cube(cube_path, &radar)?;
    let window_len = window_len.min(cube.config().ns);
    let window_cfg = cube.config().with_ns(window_len);
    let opts = PipelineConfig::for_radar(&window_cfg, locate_stride);
    let first = cube.slice_frames(0, window_len)?;
    let out = run_pipeline(&first, &opts, None)?;

    match stage {
        Stage::Locate => {
            let spectrum = out.loc_spectrum.expect("pipeline localized");
            let mut buf = Vec::new();
            spectrum.write_csv(&mut buf)?;
            write_or_stdout(output, std::str::from_utf8(&buf).expect("csv is utf8"))?;
        }
        Stage::Hmusic => {
            let mut resp = Vec::new();
            out.hmusic_spectrum.write_resp_csv(&mut resp)?;
            let mut heart = Vec::new();
            out.hmusic_spectrum.write_heart_csv(&mut heart)?;
            match output {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    fs::write(dir.join("resp.csv"), &resp)?;
                    fs::write(dir.join("heart.csv"), &heart)?;
                }
                None => {
                    print!("{}", String::from_utf8(resp).expect("csv is utf8"));
                    println!();
                    print!("{}", String::from_utf8(heart).expect("csv is utf8"));
                }
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            scene,
            output,
            config,
        } => cmd_simulate(&scene, &output, config.as_deref()),
        Command::Estimate {
            cube,
            output,
            config,
            dump_spectra,
            window_len,
            window_stride,
            locate_stride,
        } => cmd_estimate(
            &cube,
            output.as_deref(),
            config.as_deref(),
            dump_spectra.as_deref(),
            window_len,
            window_stride,
            locate_stride,
        ),
        Command::Evaluate {
            dist,
            trials,
            seed,
            output,
            results,
            percentiles,
        } => cmd_evaluate(
            &dist,
            trials,
            seed,
            &output,
            results.as_deref(),
            percentiles.as_deref(),
        ),
        Command::Spectrum {
            cube,
            stage,
            config,
            output,
            window_len,
            locate_stride,
        } => cmd_spectrum(
            &cube,
            stage,
            config.as_deref(),
            output.as_deref(),
            window_len,
            locate_stride,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
