//! Experiment harness tying the solver, radiation, and analysis crates into
//! end-to-end runs: single simulations measured against the analytic series,
//! parameter sweeps fanned out across cores, stability-boundary bisection,
//! wall-clock benchmarks, and WAV/CSV rendering for both instrument models.
//!
//! Everything here is deterministic. Runs draw no randomness, sweeps preserve
//! input order regardless of scheduling, and wall-clock timings are kept out
//! of the data CSVs so identical requests produce identical bytes.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use acoustics_io::{
    decimate_mean, normalize, onset_delay_samples, quantize_pcm16, radiated_pressure_streaming,
    sample_rate_for, write_wav, AudioBuffer, PressureTrace, SilentSignal, WavError,
};
use bell_modal::{mode_table_csv, rim_modes, shell_coefficients, synthesize_bell, OverdampedMode};
use model_core::{BellConfig, ConfigError, Diverged, ListenerGeometry, StringConfig};
use spectral::{fft_magnitude, harmonic_peaks, relative_error, HarmonicPeak};
use string_analytic::harmonic_frequencies;
use string_fdm::{cfl_limit, FdmStepper};
use string_fem::{stability_limit, FemStepper};

pub use spectral::PeakMode;

/// Time-stepping scheme for the string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    /// Explicit finite differences on displacement.
    Fdm,
    /// Linear finite elements with a lumped-consistent mass matrix.
    Fem,
}

impl Solver {
    pub fn label(self) -> &'static str {
        match self {
            Solver::Fdm => "fdm",
            Solver::Fem => "fem",
        }
    }

    /// Largest stable time step predicted by the scheme's dispersion
    /// analysis, given the wave speed and grid spacing.
    pub fn analytic_dt_limit(self, wave_speed: f64, dx_m: f64) -> f64 {
        match self {
            Solver::Fdm => cfl_limit(wave_speed, dx_m),
            Solver::Fem => stability_limit(wave_speed, dx_m),
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fdm" => Ok(Solver::Fdm),
            "fem" => Ok(Solver::Fem),
            other => Err(format!("unknown solver {other:?}; expected fdm or fem")),
        }
    }
}

/// Any way a harness operation can fail. `exit_code` groups the variants the
/// way the CLI reports them: 2 for requests that can never succeed as stated,
/// 3 for runs that blew up, 4 for filesystem trouble.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Silent(#[from] SilentSignal),
    #[error(transparent)]
    Overdamped(#[from] OverdampedMode),
    #[error(
        "bracket ({lo:.6e}, {hi:.6e}) does not straddle the stability boundary: {detail}"
    )]
    BadBracket { lo: f64, hi: f64, detail: String },
    #[error(transparent)]
    Diverged(#[from] Diverged),
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Config(_)
            | HarnessError::Unsupported(_)
            | HarnessError::Silent(_)
            | HarnessError::Overdamped(_)
            | HarnessError::BadBracket { .. } => 2,
            HarnessError::Diverged(_) => 3,
            HarnessError::Wav(_) | HarnessError::Io { .. } => 4,
        }
    }
}

fn ensure_supported(config: &StringConfig, solver: Solver) -> Result<(), HarnessError> {
    if solver == Solver::Fem && config.damping != 0.0 {
        return Err(HarnessError::Unsupported(format!(
            "the finite-element solver has no damping term (damping = {} requested); \
             set damping = 0 or use the finite-difference solver",
            config.damping
        )));
    }
    Ok(())
}

/// Runs `config` under `solver` and records the pressure a listener one metre
/// above the string's midpoint would hear. The history is streamed row by
/// row, so memory stays flat no matter how long the run is.
pub fn simulate_pressure(
    config: &StringConfig,
    solver: Solver,
) -> Result<PressureTrace, HarnessError> {
    config.validate()?;
    ensure_supported(config, solver)?;
    let geometry = ListenerGeometry::above_middle(config.node_count);
    let trace = match solver {
        Solver::Fdm => radiated_pressure_streaming(&mut FdmStepper::new(config), &geometry)?,
        Solver::Fem => radiated_pressure_streaming(&mut FemStepper::new(config), &geometry)?,
    };
    Ok(trace)
}

/// One analyzed run: where the harmonic peaks landed relative to the
/// analytic series `n·f1` of the same configuration.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub solver: Solver,
    /// FFT bin width; every frequency below is quantized to this grid.
    pub bin_hz: f64,
    pub window_size: usize,
    /// Samples skipped before the window so it starts when sound arrives.
    pub offset: usize,
    /// Analytic `n·f1`, index 0 holding the fundamental.
    pub expected_hz: Vec<f64>,
    /// Detected peaks in the same order; `None` where no credible peak rose
    /// out of the local noise floor.
    pub peaks: Vec<Option<HarmonicPeak>>,
}

impl Measurement {
    /// Measured frequency of 1-based harmonic `n`, if it was detected.
    pub fn measured_hz(&self, harmonic: usize) -> Option<f64> {
        assert!(
            harmonic >= 1 && harmonic <= self.peaks.len(),
            "harmonic {harmonic} outside the tracked range 1..={}",
            self.peaks.len()
        );
        self.peaks[harmonic - 1].as_ref().map(|p| p.frequency_hz)
    }

    /// |measured − expected| / expected for 1-based harmonic `n`. A missed
    /// detection counts as 1.0, and gross outliers clamp there too, so the
    /// value is always in [0, 1].
    pub fn relative_error(&self, harmonic: usize) -> f64 {
        let expected = self.expected_hz[harmonic - 1];
        relative_error(self.measured_hz(harmonic), expected).min(1.0)
    }
}

fn measure_trace(
    trace: &PressureTrace,
    config: &StringConfig,
    solver: Solver,
    window_size: usize,
    peak_mode: PeakMode,
    harmonics: usize,
) -> Result<Measurement, HarnessError> {
    assert!(harmonics >= 1, "track at least one harmonic");
    let geometry = ListenerGeometry::above_middle(config.node_count);
    let offset = onset_delay_samples(&geometry, config.dt_s);
    if window_size < 2 || offset + window_size > trace.samples.len() {
        return Err(HarnessError::Unsupported(format!(
            "analysis window of {window_size} samples starting after the {offset}-sample \
             travel delay needs {} samples, but the run produced {}; \
             lengthen the run or shrink the window",
            offset + window_size,
            trace.samples.len()
        )));
    }
    let f1 = config
        .fundamental_hz()
        .expect("validated config has a fundamental");
    let spectrum = fft_magnitude(&trace.samples, trace.sample_rate_hz(), window_size, offset);
    let peaks = harmonic_peaks(&spectrum, f1, harmonics, peak_mode);
    Ok(Measurement {
        solver,
        bin_hz: spectrum.bin_hz,
        window_size,
        offset,
        expected_hz: harmonic_frequencies(f1, harmonics),
        peaks,
    })
}

/// Simulates, radiates, and peak-picks in one call. The analysis window
/// starts after the acoustic travel delay so it sees signal from sample one.
pub fn measure_run(
    config: &StringConfig,
    solver: Solver,
    window_size: usize,
    peak_mode: PeakMode,
    harmonics: usize,
) -> Result<Measurement, HarnessError> {
    let trace = simulate_pressure(config, solver)?;
    measure_trace(&trace, config, solver, window_size, peak_mode, harmonics)
}

/// Which scalar a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Tension,
    Dt,
    NodeCount,
}

impl SweepParameter {
    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::Tension => "tension",
            SweepParameter::Dt => "dt",
            SweepParameter::NodeCount => "node_count",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tension" => Ok(SweepParameter::Tension),
            "dt" => Ok(SweepParameter::Dt),
            "node_count" | "node-count" => Ok(SweepParameter::NodeCount),
            other => Err(format!(
                "unknown sweep parameter {other:?}; expected tension, dt, or node-count"
            )),
        }
    }
}

/// How wide the FFT window is at each sweep point.
///
/// `FixedSamples` holds the sample count constant, so runs with different
/// time steps are analyzed at different bin widths; the frequency estimates
/// then inherit a quantization that varies systematically across the sweep.
/// `FixedDuration` holds the analyzed time span constant instead, which pins
/// the bin width and removes that artifact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowPolicy {
    FixedSamples(usize),
    FixedDuration { seconds: f64 },
}

impl WindowPolicy {
    pub fn window_for(self, sample_rate_hz: f64) -> usize {
        match self {
            WindowPolicy::FixedSamples(n) => n,
            WindowPolicy::FixedDuration { seconds } => (seconds * sample_rate_hz).round() as usize,
        }
    }
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy::FixedSamples(4096)
    }
}

/// A full sweep request: run `base` with `parameter` set to each value, under
/// each solver, and track the first `harmonics` partials at every point.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: StringConfig,
    pub parameter: SweepParameter,
    /// Strictly increasing; for `NodeCount` each value must be a whole number.
    pub values: Vec<f64>,
    pub solvers: Vec<Solver>,
    pub harmonics: usize,
    pub peak_mode: PeakMode,
    pub window: WindowPolicy,
}

impl SweepSpec {
    /// The configuration actually run at one sweep point. A `Dt` sweep keeps
    /// the simulated duration fixed by adjusting the step count, so every
    /// point covers the same stretch of string motion.
    pub fn config_for(&self, value: f64) -> StringConfig {
        let mut config = self.base.clone();
        match self.parameter {
            SweepParameter::Tension => config.tension_n = value,
            SweepParameter::Dt => {
                config.dt_s = value;
                // duration spans step_count - 1 intervals, hence the +1
                config.step_count = (self.base.duration_s() / value).round() as usize + 1;
            }
            SweepParameter::NodeCount => config.node_count = value as usize,
        }
        config
    }

    /// Rejects requests that could never run: empty or non-increasing value
    /// lists, fractional node counts, repeated solvers, windows that do not
    /// fit in the simulated trace, and damped runs under the FEM scheme.
    /// Per-point instability is not an error here; it shows up as diverged
    /// rows in the report.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.values.is_empty() {
            return Err(HarnessError::Unsupported(
                "sweep needs at least one parameter value".into(),
            ));
        }
        if self.values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HarnessError::Unsupported(
                "sweep values must be strictly increasing".into(),
            ));
        }
        if self.solvers.is_empty() {
            return Err(HarnessError::Unsupported(
                "sweep needs at least one solver".into(),
            ));
        }
        for (i, s) in self.solvers.iter().enumerate() {
            if self.solvers[..i].contains(s) {
                return Err(HarnessError::Unsupported(format!(
                    "solver {s} listed more than once"
                )));
            }
        }
        if self.harmonics == 0 {
            return Err(HarnessError::Unsupported(
                "track at least one harmonic".into(),
            ));
        }
        match self.window {
            WindowPolicy::FixedSamples(n) if n < 2 => {
                return Err(HarnessError::Unsupported(
                    "analysis window needs at least 2 samples".into(),
                ));
            }
            WindowPolicy::FixedDuration { seconds } if !(seconds > 0.0) => {
                return Err(HarnessError::Unsupported(
                    "analysis window duration must be positive".into(),
                ));
            }
            _ => {}
        }
        if self.parameter == SweepParameter::NodeCount {
            if let Some(v) = self.values.iter().find(|v| v.fract() != 0.0 || **v < 0.0) {
                return Err(HarnessError::Unsupported(format!(
                    "node counts must be whole numbers, got {v}"
                )));
            }
        }
        for &value in &self.values {
            let config = self.config_for(value);
            config.validate()?;
            for &solver in &self.solvers {
                ensure_supported(&config, solver)?;
            }
            let geometry = ListenerGeometry::above_middle(config.node_count);
            let offset = onset_delay_samples(&geometry, config.dt_s);
            let window = self.window.window_for(config.sample_rate());
            if offset + window > config.step_count {
                return Err(HarnessError::Unsupported(format!(
                    "at {} = {value} the analysis window of {window} samples plus the \
                     {offset}-sample travel delay exceeds the {}-step run",
                    self.parameter, config.step_count
                )));
            }
        }
        Ok(())
    }
}

/// One (value, solver, harmonic) cell of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub solver: Solver,
    /// 1-based partial index.
    pub harmonic: usize,
    pub expected_hz: f64,
    pub measured_hz: Option<f64>,
    /// In [0, 1]; misses and diverged runs count as 1.0.
    pub relative_error: f64,
    pub bin_hz: f64,
    pub diverged: bool,
    /// Wall time of the whole point (simulate + analyze), repeated on each
    /// of the point's harmonic rows. Excluded from the CSV.
    pub wall_time_s: f64,
}

/// Sweep results in request order: values outermost, then solvers, then
/// harmonics.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// CSV with one row per (value, solver, harmonic). Wall-clock times are
    /// deliberately absent so identical sweeps give identical bytes; missing
    /// detections leave the measured field empty.
    pub fn to_csv(&self) -> String {
        use fmt::Write;
        let mut out = String::from(
            "parameter,value,solver,harmonic,expected_hz,measured_hz,relative_error,bin_hz,diverged\n",
        );
        for row in &self.rows {
            let measured = row
                .measured_hz
                .map(|f| format!("{f:.8e}"))
                .unwrap_or_default();
            writeln!(
                out,
                "{},{:.8e},{},{},{:.8e},{},{:.8e},{:.8e},{}",
                self.parameter,
                row.value,
                row.solver,
                row.harmonic,
                row.expected_hz,
                measured,
                row.relative_error,
                row.bin_hz,
                row.diverged,
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    /// (values, errors) for one solver and harmonic, in sweep order. This is
    /// the series the bin-quantization periodicity analysis runs on.
    pub fn error_series(&self, solver: Solver, harmonic: usize) -> (Vec<f64>, Vec<f64>) {
        let mut values = Vec::new();
        let mut errors = Vec::new();
        for row in &self.rows {
            if row.solver == solver && row.harmonic == harmonic {
                values.push(row.value);
                errors.push(row.relative_error);
            }
        }
        (values, errors)
    }
}

/// Runs every (value, solver) point of the sweep, in parallel, and collects
/// per-harmonic rows. Divergence at a point is recorded in its rows rather
/// than aborting the sweep; everything else fatal is caught by
/// [`SweepSpec::validate`] before any simulation starts.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport, HarnessError> {
    spec.validate()?;
    let jobs: Vec<(f64, Solver)> = spec
        .values
        .iter()
        .flat_map(|&value| spec.solvers.iter().map(move |&solver| (value, solver)))
        .collect();
    let outcomes: Vec<(f64, Solver, Result<Measurement, Diverged>, f64)> = jobs
        .par_iter()
        .map(|&(value, solver)| {
            let config = spec.config_for(value);
            let window = spec.window.window_for(config.sample_rate());
            let start = Instant::now();
            let result = match measure_run(&config, solver, window, spec.peak_mode, spec.harmonics)
            {
                Ok(m) => Ok(Ok(m)),
                Err(HarnessError::Diverged(d)) => Ok(Err(d)),
                Err(other) => Err(other),
            }?;
            Ok((value, solver, result, start.elapsed().as_secs_f64()))
        })
        .collect::<Result<_, HarnessError>>()?;

    let mut rows = Vec::with_capacity(outcomes.len() * spec.harmonics);
    for (value, solver, outcome, wall_time_s) in outcomes {
        match outcome {
            Ok(m) => {
                for harmonic in 1..=spec.harmonics {
                    rows.push(SweepRow {
                        value,
                        solver,
                        harmonic,
                        expected_hz: m.expected_hz[harmonic - 1],
                        measured_hz: m.measured_hz(harmonic),
                        relative_error: m.relative_error(harmonic),
                        bin_hz: m.bin_hz,
                        diverged: false,
                        wall_time_s,
                    });
                }
            }
            Err(_) => {
                let config = spec.config_for(value);
                let f1 = config
                    .fundamental_hz()
                    .expect("validated config has a fundamental");
                let window = spec.window.window_for(config.sample_rate());
                let bin_hz = config.sample_rate() / window as f64;
                for harmonic in 1..=spec.harmonics {
                    rows.push(SweepRow {
                        value,
                        solver,
                        harmonic,
                        expected_hz: harmonic as f64 * f1,
                        measured_hz: None,
                        relative_error: 1.0,
                        bin_hz,
                        diverged: true,
                        wall_time_s,
                    });
                }
            }
        }
    }
    Ok(SweepReport {
        parameter: spec.parameter,
        rows,
    })
}

/// Default grid for a `Dt` sweep: `count` log-spaced steps running from far
/// below to just under the tightest analytic stability limit among the
/// requested solvers, so the sweep traces accuracy degrading toward the
/// boundary without tripping over it.
pub fn default_dt_values(
    base: &StringConfig,
    solvers: &[Solver],
    count: usize,
) -> Result<Vec<f64>, HarnessError> {
    assert!(count >= 2, "need at least two sweep points, got {count}");
    base.validate()?;
    if solvers.is_empty() {
        return Err(HarnessError::Unsupported(
            "sweep needs at least one solver".into(),
        ));
    }
    let c = base.wave_speed().expect("validated config has a wave speed");
    let dx = base.dx();
    let limit = solvers
        .iter()
        .map(|s| s.analytic_dt_limit(c, dx))
        .fold(f64::INFINITY, f64::min);
    let lo = limit / 50.0;
    let hi = 0.95 * limit;
    let ratio = hi / lo;
    Ok((0..count)
        .map(|i| lo * ratio.powf(i as f64 / (count - 1) as f64))
        .collect())
}

const STABILITY_PROBE_SECONDS: f64 = 0.2;
const STABILITY_BISECTIONS: usize = 12;

/// Outcome of a stability bisection: the boundary lies inside
/// `(dt_stable, dt_unstable)`.
#[derive(Debug, Clone, Copy)]
pub struct StabilityResult {
    /// Largest probed step that ran 0.2 simulated seconds without diverging.
    pub dt_stable: f64,
    /// Smallest probed step that diverged.
    pub dt_unstable: f64,
    /// Total probe runs, bracket checks included.
    pub probes: usize,
}

fn runs_to_completion<S: model_core::DisplacementSource>(source: &mut S) -> bool {
    loop {
        match source.next_row() {
            Ok(Some(_)) => {}
            Ok(None) => return true,
            Err(_) => return false,
        }
    }
}

fn probe_survives(config: &StringConfig, solver: Solver, dt: f64) -> Result<bool, HarnessError> {
    let mut probe = config.clone();
    probe.dt_s = dt;
    probe.step_count = ((STABILITY_PROBE_SECONDS / dt).ceil() as usize).max(2);
    probe.validate()?;
    Ok(match solver {
        Solver::Fdm => runs_to_completion(&mut FdmStepper::new(&probe)),
        Solver::Fem => runs_to_completion(&mut FemStepper::new(&probe)),
    })
}

/// Bisects the empirical stability boundary of `solver` on `config`'s grid.
/// Each probe integrates 0.2 simulated seconds at the candidate step and
/// asks whether the run survived. The bracket must straddle the boundary:
/// `lo` stable, `hi` unstable. Twelve bisections narrow it to about 0.02% of
/// its width, far tighter than the boundary itself is sharp.
pub fn stability_search(
    config: &StringConfig,
    solver: Solver,
    bracket: (f64, f64),
) -> Result<StabilityResult, HarnessError> {
    config.validate()?;
    ensure_supported(config, solver)?;
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && lo < hi) {
        return Err(HarnessError::Unsupported(format!(
            "bracket must satisfy 0 < lo < hi, got ({lo:.6e}, {hi:.6e})"
        )));
    }
    if !probe_survives(config, solver, lo)? {
        return Err(HarnessError::BadBracket {
            lo,
            hi,
            detail: format!("dt = {lo:.6e} already diverges; lower the bottom of the bracket"),
        });
    }
    if probe_survives(config, solver, hi)? {
        return Err(HarnessError::BadBracket {
            lo,
            hi,
            detail: format!("dt = {hi:.6e} stays stable; raise the top of the bracket"),
        });
    }
    let mut probes = 2;
    for _ in 0..STABILITY_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if probe_survives(config, solver, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        probes += 1;
    }
    Ok(StabilityResult {
        dt_stable: lo,
        dt_unstable: hi,
        probes,
    })
}

/// Median wall time for one sweep point.
#[derive(Debug, Clone)]
pub struct TimingRow {
    pub value: f64,
    pub solver: Solver,
    pub node_count: usize,
    pub step_count: usize,
    pub median_wall_s: f64,
}

/// Benchmark results plus enough provenance to compare runs across machines
/// and build profiles.
#[derive(Debug, Clone)]
pub struct TimingReport {
    pub parameter: SweepParameter,
    pub host: String,
    pub profile: &'static str,
    pub repeats: usize,
    pub rows: Vec<TimingRow>,
}

impl TimingReport {
    /// CSV with `#`-prefixed provenance comments, then one row per point.
    /// This is the only artifact that records wall time, and nothing asserts
    /// on it: timings describe the machine that produced them.
    pub fn to_csv(&self) -> String {
        use fmt::Write;
        let mut out = String::new();
        writeln!(out, "# host: {}", self.host).unwrap();
        writeln!(out, "# profile: {}", self.profile).unwrap();
        writeln!(out, "# repeats: {}", self.repeats).unwrap();
        out.push_str("parameter,value,solver,nodes,steps,median_wall_s\n");
        for row in &self.rows {
            writeln!(
                out,
                "{},{:.8e},{},{},{},{:.6e}",
                self.parameter, row.value, row.solver, row.node_count, row.step_count,
                row.median_wall_s,
            )
            .unwrap();
        }
        out
    }
}

/// Times the full pipeline (simulate, radiate, analyze) at every sweep
/// point, reporting the median of `repeats` runs. Points run sequentially:
/// parallel repeats would contend for cores and corrupt each other's
/// numbers. A diverging point aborts the benchmark; bench specs should be
/// comfortably stable.
pub fn timing_benchmark(spec: &SweepSpec, repeats: usize) -> Result<TimingReport, HarnessError> {
    assert!(
        repeats >= 3,
        "a median needs at least 3 repeats, got {repeats}"
    );
    spec.validate()?;
    let mut rows = Vec::new();
    for &value in &spec.values {
        for &solver in &spec.solvers {
            let config = spec.config_for(value);
            let window = spec.window.window_for(config.sample_rate());
            let mut walls = Vec::with_capacity(repeats);
            for _ in 0..repeats {
                let start = Instant::now();
                measure_run(&config, solver, window, spec.peak_mode, spec.harmonics)?;
                walls.push(start.elapsed().as_secs_f64());
            }
            walls.sort_by(f64::total_cmp);
            let mid = walls.len() / 2;
            let median_wall_s = if walls.len() % 2 == 1 {
                walls[mid]
            } else {
                0.5 * (walls[mid - 1] + walls[mid])
            };
            rows.push(TimingRow {
                value,
                solver,
                node_count: config.node_count,
                step_count: config.step_count,
                median_wall_s,
            });
        }
    }
    Ok(TimingReport {
        parameter: spec.parameter,
        host: format!("{}-{}", std::env::consts::OS, std::env::consts::ARCH),
        profile: if cfg!(debug_assertions) {
            "debug"
        } else {
            "release"
        },
        repeats,
        rows,
    })
}

/// Which artifacts a render writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArtifactSet {
    pub wav: bool,
    pub csv: bool,
}

impl ArtifactSet {
    pub const BOTH: ArtifactSet = ArtifactSet {
        wav: true,
        csv: true,
    };

    /// CLI rule: naming neither artifact means both.
    pub fn from_flags(wav: bool, csv: bool) -> ArtifactSet {
        if !wav && !csv {
            ArtifactSet::BOTH
        } else {
            ArtifactSet { wav, csv }
        }
    }
}

/// Paths and analysis from one string render.
#[derive(Debug, Clone)]
pub struct StringRender {
    pub wav_path: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
    pub measurement: Measurement,
    /// Rate of the written audio, after decimation.
    pub sample_rate_hz: u32,
}

fn ensure_dir(dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn string_csv(m: &Measurement) -> String {
    use fmt::Write;
    let mut out =
        String::from("solver,window,bin_hz,harmonic,expected_hz,measured_hz,relative_error\n");
    for harmonic in 1..=m.peaks.len() {
        let measured = m
            .measured_hz(harmonic)
            .map(|f| format!("{f:.8e}"))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{:.8e},{},{:.8e},{},{:.8e}",
            m.solver,
            m.window_size,
            m.bin_hz,
            harmonic,
            m.expected_hz[harmonic - 1],
            measured,
            m.relative_error(harmonic),
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Simulates a plucked string and writes `string-<solver>.wav` and/or
/// `string-<solver>.csv` under `out_dir`. The CSV reports the first five
/// harmonics against the analytic series; the audio is the radiated pressure
/// decimated by `decimate` (block means), normalized to full scale, and
/// quantized to 16-bit PCM. The audio pipeline only runs when audio was
/// requested, so a CSV-only render of a silent configuration still succeeds.
pub fn render_string(
    config: &StringConfig,
    solver: Solver,
    window_size: usize,
    peak_mode: PeakMode,
    decimate: usize,
    out_dir: &Path,
    artifacts: ArtifactSet,
) -> Result<StringRender, HarnessError> {
    assert!(decimate >= 1, "decimation factor must be at least 1");
    let trace = simulate_pressure(config, solver)?;
    let measurement = measure_trace(&trace, config, solver, window_size, peak_mode, 5)?;
    let sample_rate_hz = sample_rate_for(config.dt_s, decimate);
    ensure_dir(out_dir)?;
    let mut wav_path = None;
    if artifacts.wav {
        let decimated = decimate_mean(&trace.samples, decimate);
        let normalized = normalize(&decimated)?;
        let buffer = AudioBuffer {
            samples: quantize_pcm16(&normalized),
            sample_rate: sample_rate_hz,
        };
        let path = out_dir.join(format!("string-{solver}.wav"));
        write_wav(&buffer, &path)?;
        wav_path = Some(path);
    }
    let mut csv_path = None;
    if artifacts.csv {
        let path = out_dir.join(format!("string-{solver}.csv"));
        write_text(&path, &string_csv(&measurement))?;
        csv_path = Some(path);
    }
    Ok(StringRender {
        wav_path,
        csv_path,
        measurement,
        sample_rate_hz,
    })
}

/// Paths and modal content from one bell render.
#[derive(Debug, Clone)]
pub struct BellRender {
    pub wav_path: Option<PathBuf>,
    pub csv_path: Option<PathBuf>,
    pub modes: Vec<bell_modal::BellMode>,
    pub sample_rate_hz: f64,
}

/// Renders the bell's rim modes `ks` struck with equal strength: a damped
/// sinusoid per mode, summed, normalized, and written as `bell.wav`, with
/// the modal frequency table as `bell-modes.csv`. Audio-only concerns
/// (aliasing, silence) are checked only when audio was requested.
pub fn render_bell(
    config: &BellConfig,
    ks: &[usize],
    duration_s: f64,
    sample_rate_hz: f64,
    out_dir: &Path,
    artifacts: ArtifactSet,
) -> Result<BellRender, HarnessError> {
    config.validate()?;
    if !(duration_s > 0.0) {
        return Err(HarnessError::Unsupported(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    if !(sample_rate_hz > 0.0) {
        return Err(HarnessError::Unsupported(format!(
            "sample rate must be positive, got {sample_rate_hz}"
        )));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0) {
        return Err(HarnessError::Unsupported(format!(
            "rim mode numbers start at k = 1, got {k}"
        )));
    }
    let coeffs = shell_coefficients(config);
    let modes = rim_modes(&coeffs, ks)?;
    ensure_dir(out_dir)?;
    let mut wav_path = None;
    if artifacts.wav {
        if let Some(m) = modes
            .iter()
            .find(|m| m.frequency_hz >= 0.5 * sample_rate_hz)
        {
            return Err(HarnessError::Unsupported(format!(
                "mode k = {} rings at {:.1} Hz, at or above the Nyquist frequency {:.1} Hz; \
                 raise the sample rate",
                m.k,
                m.frequency_hz,
                0.5 * sample_rate_hz
            )));
        }
        let strikes: Vec<_> = modes.iter().cloned().map(|m| (m, 1.0)).collect();
        let samples = synthesize_bell(&strikes, duration_s, sample_rate_hz);
        let normalized = normalize(&samples)?;
        let buffer = AudioBuffer {
            samples: quantize_pcm16(&normalized),
            sample_rate: sample_rate_hz.round() as u32,
        };
        let path = out_dir.join("bell.wav");
        write_wav(&buffer, &path)?;
        wav_path = Some(path);
    }
    let mut csv_path = None;
    if artifacts.csv {
        let path = out_dir.join("bell-modes.csv");
        write_text(&path, &mode_table_csv(&modes))?;
        csv_path = Some(path);
    }
    Ok(BellRender {
        wav_path,
        csv_path,
        modes,
        sample_rate_hz,
    })
}
