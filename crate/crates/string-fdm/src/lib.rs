//! Explicit finite-difference solver for the transverse wave equation on a
//! plucked string, with optional fluid damping.
//!
//! The string obeys `μ·∂²u/∂t² = T·∂²u/∂x² − σ·∂u/∂t` on `[0, L]` with both
//! ends clamped. Second-order central differences in space and time give the
//! update (σ = 0):
//!
//! ```text
//! u[n,k+1] = γ·(u[n−1,k] + u[n+1,k]) + 2(1−γ)·u[n,k] − u[n,k−1]
//! ```
//!
//! with the dimensionless Courant number squared `γ = c²Δt²/Δx²`. The scheme
//! is stable for `γ ≤ 1`, i.e. `Δt ≤ Δx/c` ([`cfl_limit`]), and at `γ = 1` it
//! propagates the exact d'Alembert solution along grid characteristics.
//!
//! Damping is discretized with a centered `σ·(u[n,k+1] − u[n,k−1])/(2Δt)`
//! term, which keeps the update explicit; collecting terms yields the
//! coefficients in [`FdmCoefficients`].
//!
//! A run starts from the triangular pluck at rest, encoded by repeating the
//! initial profile: `u[·,1] = u[·,0]`.

use model_core::{DisplacementSource, Diverged, StringConfig, WaveHistory};

/// Grouped update coefficients of the damped scheme:
///
/// ```text
/// gamma = T·Δt²/Δx²        (kg/m)
/// alpha = μ + σ·Δt/2       (kg/m)
/// theta = −μ + σ·Δt/2      (kg/m)
/// u[n,k+1] = (gamma/alpha)·(u[n−1,k] + u[n+1,k])
///          + (2(μ−gamma)/alpha)·u[n,k] + (theta/alpha)·u[n,k−1]
/// ```
///
/// With σ = 0 these collapse to `alpha = μ`, `theta = −μ` and the update
/// equals the undamped one with Courant² `gamma/alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdmCoefficients {
    pub gamma: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl FdmCoefficients {
    pub fn new(tension_n: f64, dx_m: f64, dt_s: f64, linear_density: f64, damping: f64) -> Self {
        Self {
            gamma: tension_n * dt_s * dt_s / (dx_m * dx_m),
            alpha: linear_density + damping * dt_s / 2.0,
            theta: -linear_density + damping * dt_s / 2.0,
        }
    }

    pub fn from_config(config: &StringConfig) -> Self {
        Self::new(
            config.tension_n,
            config.dx(),
            config.dt_s,
            config.linear_density,
            config.damping,
        )
    }

    /// Courant number squared `γ = c²Δt²/Δx²` of the undamped part.
    pub fn courant_squared(&self, linear_density: f64) -> f64 {
        self.gamma / linear_density
    }

    /// Weights `(w_side, w_center, w_prev)` of the three-point update.
    ///
    /// When `theta == -alpha` (σ = 0) the weights are built the way the
    /// undamped scheme writes them, so the damped step reduces to the
    /// undamped one bit for bit.
    fn kernel_weights(&self, linear_density: f64) -> (f64, f64, f64) {
        let side = self.gamma / self.alpha;
        if self.theta == -self.alpha {
            (side, 2.0 * (1.0 - side), -1.0)
        } else {
            (
                side,
                2.0 * (linear_density - self.gamma) / self.alpha,
                self.theta / self.alpha,
            )
        }
    }
}

/// Largest stable time step of the explicit scheme, `Δx/c`.
pub fn cfl_limit(wave_speed: f64, dx_m: f64) -> f64 {
    dx_m / wave_speed
}

/// Triangular pluck profile sampled on the grid: `h·x/x_p` up to the pluck
/// point, `h·(L−x)/(L−x_p)` beyond it. Both clamped endpoints are exactly
/// zero.
///
/// The descending branch measures `L−x` as grid distance from the right
/// clamp, `(node_count−1−i)·dx`, so a pluck at the exact midpoint of an
/// odd grid produces a bit-for-bit mirror-symmetric profile.
pub fn pluck_profile(config: &StringConfig) -> Vec<f64> {
    let n = config.node_count;
    let dx = config.dx();
    let xp = config.pluck_position_m;
    let h = config.pluck_amplitude_m;
    let l = config.length_m;
    let mut profile = vec![0.0; n];
    for (i, u) in profile.iter_mut().enumerate().take(n - 1).skip(1) {
        let x = i as f64 * dx;
        *u = if x <= xp {
            h * x / xp
        } else {
            h * ((n - 1 - i) as f64 * dx) / (l - xp)
        };
    }
    profile
}

fn step_kernel(prev: &[f64], curr: &[f64], weights: (f64, f64, f64), next: &mut [f64]) {
    let n = curr.len();
    debug_assert!(prev.len() == n && next.len() == n && n >= 3);
    let (side, center, lag) = weights;
    next[0] = 0.0;
    next[n - 1] = 0.0;
    for i in 1..n - 1 {
        next[i] = side * (curr[i - 1] + curr[i + 1]) + center * curr[i] + lag * prev[i];
    }
}

/// One undamped time step; `gamma` is the Courant number squared. Clamped
/// boundaries are written as exact zeros.
pub fn fdm_step_undamped(prev: &[f64], curr: &[f64], gamma: f64) -> Vec<f64> {
    let mut next = vec![0.0; curr.len()];
    step_kernel(prev, curr, (gamma, 2.0 * (1.0 - gamma), -1.0), &mut next);
    next
}

/// One damped time step using the grouped coefficients.
pub fn fdm_step_damped(
    prev: &[f64],
    curr: &[f64],
    coefficients: &FdmCoefficients,
    linear_density: f64,
) -> Vec<f64> {
    let mut next = vec![0.0; curr.len()];
    step_kernel(
        prev,
        curr,
        coefficients.kernel_weights(linear_density),
        &mut next,
    );
    next
}

/// Streaming solver state: holds three displacement rows and yields one row
/// per call, so second-scale runs never materialize a dense history.
///
/// Divergence is flagged the moment a row contains a non-finite value or
/// exceeds a million times the pluck amplitude.
pub struct FdmStepper {
    weights: (f64, f64, f64),
    threshold: f64,
    step_count: usize,
    dt_s: f64,
    dx_m: f64,
    emitted: usize,
    prev: Vec<f64>,
    curr: Vec<f64>,
    next: Vec<f64>,
}

impl FdmStepper {
    /// `config` must validate.
    pub fn new(config: &StringConfig) -> Self {
        config.validate().expect("valid string config");
        let coefficients = FdmCoefficients::from_config(config);
        let profile = pluck_profile(config);
        Self {
            weights: coefficients.kernel_weights(config.linear_density),
            threshold: 1e6 * config.pluck_amplitude_m,
            step_count: config.step_count,
            dt_s: config.dt_s,
            dx_m: config.dx(),
            emitted: 0,
            prev: profile.clone(),
            curr: profile,
            next: vec![0.0; config.node_count],
        }
    }
}

fn row_is_bad(row: &[f64], threshold: f64) -> bool {
    row.iter().any(|&v| !v.is_finite() || v.abs() > threshold)
}

impl DisplacementSource for FdmStepper {
    fn node_count(&self) -> usize {
        self.curr.len()
    }

    fn step_count(&self) -> usize {
        self.step_count
    }

    fn dt_s(&self) -> f64 {
        self.dt_s
    }

    fn dx_m(&self) -> f64 {
        self.dx_m
    }

    fn next_row(&mut self) -> Result<Option<&[f64]>, Diverged> {
        if self.emitted >= self.step_count {
            return Ok(None);
        }
        // Rows 0 and 1 are both the pluck profile (the string starts at
        // rest); every later row advances the recurrence once.
        let row: &[f64] = match self.emitted {
            0 => &self.prev,
            1 => &self.curr,
            _ => {
                step_kernel(&self.prev, &self.curr, self.weights, &mut self.next);
                if row_is_bad(&self.next, self.threshold) {
                    return Err(Diverged { step: self.emitted });
                }
                std::mem::swap(&mut self.prev, &mut self.curr);
                std::mem::swap(&mut self.curr, &mut self.next);
                &self.curr
            }
        };
        self.emitted += 1;
        Ok(Some(row))
    }
}

/// Runs the full scheme and returns the dense displacement history.
///
/// `config` must validate. Fails with the first bad step index if the run
/// diverges.
pub fn simulate_fdm(config: &StringConfig) -> Result<WaveHistory, Diverged> {
    let mut stepper = FdmStepper::new(config);
    let mut history = WaveHistory::zeroed(
        config.node_count,
        config.step_count,
        config.dt_s,
        config.dx(),
    );
    let mut k = 0;
    while let Some(row) = stepper.next_row()? {
        history.row_mut(k).copy_from_slice(row);
        k += 1;
    }
    debug_assert_eq!(k, config.step_count);
    Ok(history)
}

/// Discrete energy of step `k` (per unit grid spacing): forward-difference
/// kinetic term plus potential term over the segments,
///
/// ```text
/// E_k = Σₙ μ/2·((u[n,k+1] − u[n,k])/Δt)² + Σₙ T/2·((u[n+1,k] − u[n,k])/Δx)²
/// ```
///
/// The half-step velocity is paired with the whole-step potential, so for a
/// stable undamped run `E_k` oscillates at order `ω·Δt` around the exactly
/// conserved staggered invariant; what it must not do is trend. Needs row
/// `k+1`, so `k` must satisfy `k + 1 < step_count`.
pub fn discrete_energy(
    history: &WaveHistory,
    step: usize,
    tension_n: f64,
    linear_density: f64,
) -> f64 {
    assert!(step + 1 < history.step_count(), "energy needs row k+1");
    let dt = history.dt_s();
    let dx = history.dx_m();
    let row = history.row(step);
    let row_next = history.row(step + 1);
    let kinetic: f64 = row
        .iter()
        .zip(row_next)
        .map(|(&a, &b)| {
            let v = (b - a) / dt;
            v * v
        })
        .sum();
    let potential: f64 = row
        .windows(2)
        .map(|w| {
            let s = (w[1] - w[0]) / dx;
            s * s
        })
        .sum();
    0.5 * linear_density * kinetic + 0.5 * tension_n * potential
}
