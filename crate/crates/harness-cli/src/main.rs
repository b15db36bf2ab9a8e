//! `resonator`: simulate plucked strings and struck bells, sweep solver
//! parameters, find stability boundaries, benchmark kernels, and inspect the
//! audio either pipeline produces.
//!
//! Exit codes: 0 success, 2 for a request that cannot succeed as stated
//! (bad config, bad flags), 3 for a simulation that diverged, 4 for
//! filesystem trouble.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use acoustics_io::read_wav;
use harness_cli::{
    default_dt_values, render_bell, render_string, run_sweep, stability_search, timing_benchmark,
    ArtifactSet, HarnessError, PeakMode, Solver, SweepParameter, SweepSpec, WindowPolicy,
};
use model_core::kv::KvFile;
use model_core::{BellConfig, StringConfig};
use spectral::{fft_magnitude, period_estimate};

#[derive(Parser)]
#[command(
    name = "resonator",
    version,
    about = "Plucked-string and bell experiments: simulate, sweep, time, render"
)]
struct Cli {
    /// Accepted for batch-script compatibility; every run is already
    /// deterministic and nothing draws randomness.
    #[arg(long, global = true)]
    seedless: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Fdm,
    Fem,
}

impl From<SolverArg> for Solver {
    fn from(arg: SolverArg) -> Solver {
        match arg {
            SolverArg::Fdm => Solver::Fdm,
            SolverArg::Fem => Solver::Fem,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum PeakArg {
    /// Loudest bin in the harmonic's search band.
    Raw,
    /// Parabolic fit through the peak bin and its neighbors.
    Parabolic,
}

impl From<PeakArg> for PeakMode {
    fn from(arg: PeakArg) -> PeakMode {
        match arg {
            PeakArg::Raw => PeakMode::RawBin,
            PeakArg::Parabolic => PeakMode::ParabolicInterpolation,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ParameterArg {
    Tension,
    Dt,
    NodeCount,
}

impl From<ParameterArg> for SweepParameter {
    fn from(arg: ParameterArg) -> SweepParameter {
        match arg {
            ParameterArg::Tension => SweepParameter::Tension,
            ParameterArg::Dt => SweepParameter::Dt,
            ParameterArg::NodeCount => SweepParameter::NodeCount,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a plucked string and render audio plus a harmonic table.
    SimulateString {
        /// String configuration file (key = value lines).
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::Fdm)]
        solver: SolverArg,
        /// Output directory for string-<solver>.wav / .csv.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// FFT window size in samples.
        #[arg(long, default_value_t = 4096)]
        window: usize,
        #[arg(long, value_enum, default_value_t = PeakArg::Parabolic)]
        peak: PeakArg,
        /// Average this many raw samples per emitted audio sample.
        #[arg(long, default_value_t = 1)]
        decimate: usize,
        /// Write only the WAV (default: both artifacts).
        #[arg(long)]
        wav: bool,
        /// Write only the CSV (default: both artifacts).
        #[arg(long)]
        csv: bool,
    },
    /// Synthesize a struck bell from its rim modes.
    SimulateBell {
        /// Bell configuration file (key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for bell.wav / bell-modes.csv.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Rim mode numbers to strike.
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
        ks: Vec<usize>,
        /// Length of the rendered tail in seconds.
        #[arg(long, default_value_t = 2.0)]
        duration: f64,
        /// Audio sample rate in Hz.
        #[arg(long, default_value_t = 44100.0)]
        rate: f64,
        /// Write only the WAV (default: both artifacts).
        #[arg(long)]
        wav: bool,
        /// Write only the CSV (default: both artifacts).
        #[arg(long)]
        csv: bool,
    },
    /// Run both solvers across a parameter range and tabulate harmonic errors.
    Sweep {
        /// Base string configuration; the swept key is overridden per point.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        parameter: ParameterArg,
        /// Explicit comma-separated values, strictly increasing.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// With --stop and --count: evenly spaced values instead of --values.
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SolverArg::Fdm, SolverArg::Fem])]
        solvers: Vec<SolverArg>,
        /// How many partials to track at each point.
        #[arg(long, default_value_t = 5)]
        harmonics: usize,
        #[arg(long, value_enum, default_value_t = PeakArg::Raw)]
        peak: PeakArg,
        /// FFT window size in samples at every point.
        #[arg(long, default_value_t = 4096)]
        window: usize,
        /// Hold the analyzed duration (seconds) fixed instead of the sample
        /// count, pinning the bin width across a dt sweep; overrides --window.
        #[arg(long)]
        window_seconds: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Bisect the largest stable time step inside a bracket.
    Stability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = SolverArg::Fdm)]
        solver: SolverArg,
        /// Time step known (or believed) stable.
        #[arg(long)]
        lo: f64,
        /// Time step known (or believed) unstable.
        #[arg(long)]
        hi: f64,
    },
    /// Median wall time of the full pipeline at each sweep point.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        parameter: ParameterArg,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        #[arg(long)]
        start: Option<f64>,
        #[arg(long)]
        stop: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SolverArg::Fdm, SolverArg::Fem])]
        solvers: Vec<SolverArg>,
        #[arg(long, default_value_t = 4096)]
        window: usize,
        /// Runs per point; the median is reported.
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Inspect a mono 16-bit WAV: dominant peak and optional spectrum CSV.
    Spectrum {
        #[arg(long)]
        wav: PathBuf,
        #[arg(long, default_value_t = 4096)]
        window: usize,
        /// Samples to skip before the window.
        #[arg(long, default_value_t = 0)]
        offset: usize,
        /// Directory to write spectrum.csv into (omit to skip the CSV).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn read_config_text(path: &Path) -> Result<KvFile, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(KvFile::parse(&text)?)
}

fn load_string_config(path: &Path) -> Result<StringConfig, HarnessError> {
    let mut kv = read_config_text(path)?;
    let config = StringConfig::from_kv(&mut kv)?;
    kv.reject_unused()?;
    config.validate()?;
    Ok(config)
}

fn load_bell_config(path: &Path) -> Result<BellConfig, HarnessError> {
    let mut kv = read_config_text(path)?;
    let config = BellConfig::from_kv(&mut kv)?;
    kv.reject_unused()?;
    config.validate()?;
    Ok(config)
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn uniform_spacing(values: &[f64]) -> bool {
    if values.len() < 2 {
        return false;
    }
    let d0 = values[1] - values[0];
    values
        .windows(2)
        .all(|w| ((w[1] - w[0]) - d0).abs() <= 1.0e-9 * d0.abs().max(f64::EPSILON))
}

fn linspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>, HarnessError> {
    if count < 2 || !(stop > start) {
        return Err(HarnessError::Unsupported(format!(
            "--start/--stop/--count need start < stop and count >= 2, \
             got ({start}, {stop}, {count})"
        )));
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Resolves the sweep grid from the mutually exclusive value flags. A dt
/// sweep may omit all of them and gets a log-spaced grid running up to just
/// under the tightest stability limit of the chosen solvers.
fn resolve_values(
    base: &StringConfig,
    parameter: SweepParameter,
    solvers: &[Solver],
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
) -> Result<Vec<f64>, HarnessError> {
    if values.is_some() && (start.is_some() || stop.is_some() || count.is_some()) {
        return Err(HarnessError::Unsupported(
            "give either --values or --start/--stop/--count, not both".into(),
        ));
    }
    let mut values = match (values, start, stop, count) {
        (Some(v), ..) => v,
        (None, Some(a), Some(b), Some(n)) => linspace(a, b, n)?,
        (None, None, None, None) if parameter == SweepParameter::Dt => {
            default_dt_values(base, solvers, 40)?
        }
        _ => {
            return Err(HarnessError::Unsupported(
                "give --values, or --start/--stop/--count together \
                 (a dt sweep can omit both to probe up to the stability limit)"
                    .into(),
            ));
        }
    };
    if parameter == SweepParameter::NodeCount {
        // evenly spaced node counts rarely land on integers; snap and dedupe
        for v in &mut values {
            *v = v.round();
        }
        values.dedup();
    }
    Ok(values)
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::SimulateString {
            config,
            solver,
            out,
            window,
            peak,
            decimate,
            wav,
            csv,
        } => {
            let config = load_string_config(&config)?;
            let solver = Solver::from(solver);
            let render = render_string(
                &config,
                solver,
                window,
                peak.into(),
                decimate,
                &out,
                ArtifactSet::from_flags(wav, csv),
            )?;
            let m = &render.measurement;
            println!(
                "{solver}: {} nodes, {} steps, listener 1 m above the midpoint",
                config.node_count, config.step_count
            );
            println!(
                "spectrum: {}-sample window after a {}-sample travel delay, {:.4} Hz bins",
                m.window_size, m.offset, m.bin_hz
            );
            for harmonic in 1..=m.peaks.len() {
                match m.measured_hz(harmonic) {
                    Some(f) => println!(
                        "  harmonic {harmonic}: {f:9.3} Hz (expected {:9.3} Hz, error {:.3}%)",
                        m.expected_hz[harmonic - 1],
                        100.0 * m.relative_error(harmonic),
                    ),
                    None => println!(
                        "  harmonic {harmonic}: not detected (expected {:9.3} Hz)",
                        m.expected_hz[harmonic - 1]
                    ),
                }
            }
            for path in [&render.wav_path, &render.csv_path].into_iter().flatten() {
                println!("wrote {}", path.display());
            }
            Ok(())
        }

        Command::SimulateBell {
            config,
            out,
            ks,
            duration,
            rate,
            wav,
            csv,
        } => {
            let config = load_bell_config(&config)?;
            let render = render_bell(
                &config,
                &ks,
                duration,
                rate,
                &out,
                ArtifactSet::from_flags(wav, csv),
            )?;
            println!("struck {} rim modes:", render.modes.len());
            for mode in &render.modes {
                println!(
                    "  k = {}: {:9.2} Hz, decay rate {:.3} 1/s",
                    mode.k, mode.frequency_hz, mode.attenuation
                );
            }
            for path in [&render.wav_path, &render.csv_path].into_iter().flatten() {
                println!("wrote {}", path.display());
            }
            Ok(())
        }

        Command::Sweep {
            config,
            parameter,
            values,
            start,
            stop,
            count,
            solvers,
            harmonics,
            peak,
            window,
            window_seconds,
            out,
        } => {
            let base = load_string_config(&config)?;
            let parameter = SweepParameter::from(parameter);
            let solvers: Vec<Solver> = solvers.into_iter().map(Solver::from).collect();
            let values = resolve_values(&base, parameter, &solvers, values, start, stop, count)?;
            let spec = SweepSpec {
                base,
                parameter,
                values,
                solvers,
                harmonics,
                peak_mode: peak.into(),
                window: match window_seconds {
                    Some(seconds) => WindowPolicy::FixedDuration { seconds },
                    None => WindowPolicy::FixedSamples(window),
                },
            };
            let report = run_sweep(&spec)?;
            ensure_dir(&out)?;
            let path = out.join(format!("sweep-{parameter}.csv"));
            write_text(&path, &report.to_csv())?;
            println!(
                "swept {} over {} values x {} solvers, tracking {} harmonics",
                parameter,
                spec.values.len(),
                spec.solvers.len(),
                spec.harmonics
            );
            for &solver in &spec.solvers {
                let (values, errors) = report.error_series(solver, 1);
                let worst = errors.iter().copied().fold(0.0, f64::max);
                let mean = errors.iter().sum::<f64>() / errors.len() as f64;
                println!(
                    "  {solver}: fundamental error mean {:.3}%, worst {:.3}%",
                    100.0 * mean,
                    100.0 * worst
                );
                // the periodicity scan needs a uniform grid of at least 8
                // points; log-spaced dt grids don't qualify
                if values.len() >= 8 && uniform_spacing(&values) {
                    if let Some(period) = period_estimate(&values, &errors) {
                        println!(
                            "    error oscillates with period {period:.3} in {parameter}: \
                             that is the FFT bin grid showing through, not physics"
                        );
                    }
                }
            }
            let diverged = report.rows.iter().filter(|r| r.diverged).count()
                / spec.harmonics.max(1);
            if diverged > 0 {
                println!("  {diverged} points diverged and carry error 1.0");
            }
            println!("wrote {}", path.display());
            Ok(())
        }

        Command::Stability {
            config,
            solver,
            lo,
            hi,
        } => {
            let config = load_string_config(&config)?;
            let solver = Solver::from(solver);
            let result = stability_search(&config, solver, (lo, hi))?;
            let c = config
                .wave_speed()
                .expect("validated config has a wave speed");
            let analytic = solver.analytic_dt_limit(c, config.dx());
            println!(
                "{solver}: largest stable dt = {:.6e} s ({} probes, boundary inside {:.3e})",
                result.dt_stable,
                result.probes,
                result.dt_unstable - result.dt_stable
            );
            println!(
                "analytic limit for this grid: {:.6e} s (measured/analytic = {:.6})",
                analytic,
                result.dt_stable / analytic
            );
            Ok(())
        }

        Command::Bench {
            config,
            parameter,
            values,
            start,
            stop,
            count,
            solvers,
            window,
            repeats,
            out,
        } => {
            if repeats < 3 {
                return Err(HarnessError::Unsupported(format!(
                    "a median needs at least 3 repeats, got {repeats}"
                )));
            }
            let base = load_string_config(&config)?;
            let parameter = SweepParameter::from(parameter);
            let solvers: Vec<Solver> = solvers.into_iter().map(Solver::from).collect();
            let values = resolve_values(&base, parameter, &solvers, values, start, stop, count)?;
            let spec = SweepSpec {
                base,
                parameter,
                values,
                solvers,
                harmonics: 1,
                peak_mode: PeakMode::RawBin,
                window: WindowPolicy::FixedSamples(window),
            };
            let report = timing_benchmark(&spec, repeats)?;
            ensure_dir(&out)?;
            let path = out.join(format!("bench-{parameter}.csv"));
            write_text(&path, &report.to_csv())?;
            println!(
                "{} on {} ({} profile, median of {} runs)",
                parameter, report.host, report.profile, report.repeats
            );
            for row in &report.rows {
                println!(
                    "  {} = {:<12.6} {}: {:.1} ms ({} nodes x {} steps)",
                    parameter,
                    row.value,
                    row.solver,
                    1.0e3 * row.median_wall_s,
                    row.node_count,
                    row.step_count
                );
            }
            println!("wrote {}", path.display());
            Ok(())
        }

        Command::Spectrum {
            wav,
            window,
            offset,
            out,
        } => {
            let audio = read_wav(&wav)?;
            let samples: Vec<f64> = audio.samples.iter().map(|&s| f64::from(s)).collect();
            if window < 2 || offset + window > samples.len() {
                return Err(HarnessError::Unsupported(format!(
                    "window of {window} samples at offset {offset} does not fit in the \
                     {}-sample file",
                    samples.len()
                )));
            }
            let spectrum = fft_magnitude(&samples, f64::from(audio.sample_rate), window, offset);
            let (bin, magnitude) = spectrum
                .magnitudes
                .iter()
                .copied()
                .enumerate()
                .skip(1)
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("window >= 2 leaves at least one non-DC bin");
            println!(
                "{}: {} samples at {} Hz",
                wav.display(),
                samples.len(),
                audio.sample_rate
            );
            println!(
                "dominant peak {:.3} Hz (bin {bin} of {}, magnitude {:.6e}, bin width {:.4} Hz)",
                bin as f64 * spectrum.bin_hz,
                spectrum.magnitudes.len(),
                magnitude,
                spectrum.bin_hz
            );
            if let Some(out) = out {
                ensure_dir(&out)?;
                let mut csv = String::from("frequency_hz,magnitude\n");
                for (i, &m) in spectrum.magnitudes.iter().enumerate() {
                    use std::fmt::Write;
                    writeln!(csv, "{:.8e},{m:.8e}", i as f64 * spectrum.bin_hz)
                        .expect("writing to a String cannot fail");
                }
                let path = out.join("spectrum.csv");
                write_text(&path, &csv)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}
