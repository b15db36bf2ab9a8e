//! Finite-element solver for the clamped vibrating string.
//!
//! Linear (hat) elements on a uniform grid with the consistent mass matrix,
//! clamped ends, and explicit leapfrog time stepping:
//!
//! ```text
//! M y = K u_k          (tridiagonal solve)
//! u_{k+1} = 2 u_k - u_{k-1} - dt^2 y
//! ```
//!
//! The mass matrix is factored once per run; each step costs one tridiagonal
//! multiply and one forward/backward substitution, both O(N).
//!
//! There is no damped variant of this solver. Configurations with nonzero
//! damping are rejected up front.

use model_core::{Diverged, DisplacementSource, StringConfig, WaveHistory};
use string_fdm::pluck_profile;

/// Element mass matrix for a linear element of length `dx` carrying a string
/// of the given linear density: `(mu * dx / 6) * [[2, 1], [1, 2]]`.
pub fn local_mass(linear_density: f64, dx: f64) -> [[f64; 2]; 2] {
    let s = linear_density * dx / 6.0;
    [[2.0 * s, s], [s, 2.0 * s]]
}

/// Element stiffness matrix for a linear element of length `dx` under the
/// given tension: `(tension / dx) * [[1, -1], [-1, 1]]`.
pub fn local_stiffness(tension: f64, dx: f64) -> [[f64; 2]; 2] {
    let s = tension / dx;
    [[s, -s], [-s, s]]
}

/// Symmetric tridiagonal matrix stored by bands.
///
/// `sub[i]` is entry (i+1, i), `diag[i]` is (i, i), `sup[i]` is (i, i+1).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 2, "tridiagonal matrix needs at least two rows");
        Tridiagonal {
            sub: vec![0.0; n - 1],
            diag: vec![0.0; n],
            sup: vec![0.0; n - 1],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// out = A x.
    pub fn multiply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len();
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.sub[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.sup[i] * x[i + 1];
            }
            out[i] = acc;
        }
    }
}

/// Global mass and stiffness matrices for one configuration.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub mass: Tridiagonal,
    pub stiffness: Tridiagonal,
}

/// Assembles the free (unconstrained) global matrices by summing element
/// contributions over the `node_count - 1` elements of the uniform grid.
pub fn assemble_free(config: &StringConfig) -> GlobalSystem {
    let n = config.node_count;
    let dx = config.dx();
    let m_local = local_mass(config.linear_density, dx);
    let k_local = local_stiffness(config.tension_n, dx);
    let mut mass = Tridiagonal::zeros(n);
    let mut stiffness = Tridiagonal::zeros(n);
    for e in 0..n - 1 {
        mass.diag[e] += m_local[0][0];
        mass.diag[e + 1] += m_local[1][1];
        mass.sup[e] += m_local[0][1];
        mass.sub[e] += m_local[1][0];
        stiffness.diag[e] += k_local[0][0];
        stiffness.diag[e + 1] += k_local[1][1];
        stiffness.sup[e] += k_local[0][1];
        stiffness.sub[e] += k_local[1][0];
    }
    GlobalSystem { mass, stiffness }
}

/// Imposes the clamped ends on both matrices: first and last rows and columns
/// are zeroed and the corresponding diagonal entries set to one, so the
/// boundary equations decouple to the identity.
pub fn apply_clamped_boundary(system: &mut GlobalSystem) {
    for m in [&mut system.mass, &mut system.stiffness] {
        let n = m.len();
        m.diag[0] = 1.0;
        m.diag[n - 1] = 1.0;
        m.sup[0] = 0.0;
        m.sub[0] = 0.0;
        m.sup[n - 2] = 0.0;
        m.sub[n - 2] = 0.0;
    }
}

/// Assembled global matrices with the clamped boundary already imposed.
pub fn assemble_global(config: &StringConfig) -> GlobalSystem {
    let mut system = assemble_free(config);
    apply_clamped_boundary(&mut system);
    system
}

/// LU factorization of a tridiagonal matrix (the Thomas algorithm), computed
/// once and reused for every solve.
///
/// Valid for diagonally dominant matrices; the consistent mass matrix
/// (interior rows `(mu dx / 6) [1, 4, 1]`, boundary rows identity) qualifies,
/// so no pivoting is needed.
#[derive(Debug, Clone)]
pub struct TridiagonalFactor {
    sub: Vec<f64>,
    inv_pivot: Vec<f64>,
    c_prime: Vec<f64>,
}

impl TridiagonalFactor {
    pub fn new(matrix: &Tridiagonal) -> Self {
        let n = matrix.len();
        let mut inv_pivot = vec![0.0; n];
        let mut c_prime = vec![0.0; n - 1];
        let mut pivot = matrix.diag[0];
        assert!(pivot != 0.0, "singular tridiagonal matrix");
        inv_pivot[0] = 1.0 / pivot;
        for i in 1..n {
            c_prime[i - 1] = matrix.sup[i - 1] * inv_pivot[i - 1];
            pivot = matrix.diag[i] - matrix.sub[i - 1] * c_prime[i - 1];
            assert!(pivot != 0.0, "singular tridiagonal matrix");
            inv_pivot[i] = 1.0 / pivot;
        }
        TridiagonalFactor {
            sub: matrix.sub.clone(),
            inv_pivot,
            c_prime,
        }
    }

    /// Solves A x = r in place: on return `r` holds x.
    pub fn solve_in_place(&self, r: &mut [f64]) {
        let n = self.inv_pivot.len();
        assert_eq!(r.len(), n);
        r[0] *= self.inv_pivot[0];
        for i in 1..n {
            r[i] = (r[i] - self.sub[i - 1] * r[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            r[i] -= self.c_prime[i] * r[i + 1];
        }
    }
}

/// Stiffness matrix plus factored mass matrix plus time step: everything one
/// leapfrog step needs.
#[derive(Debug, Clone)]
pub struct FemOperator {
    pub stiffness: Tridiagonal,
    pub mass_factor: TridiagonalFactor,
    pub dt_s: f64,
}

impl FemOperator {
    pub fn new(system: &GlobalSystem, dt_s: f64) -> Self {
        FemOperator {
            stiffness: system.stiffness.clone(),
            mass_factor: TridiagonalFactor::new(&system.mass),
            dt_s,
        }
    }

    pub fn from_config(config: &StringConfig) -> Self {
        FemOperator::new(&assemble_global(config), config.dt_s)
    }
}

/// One leapfrog step: solve `M y = K curr`, then
/// `next = 2 curr - prev - dt^2 y`, with the clamped ends forced to zero
/// after the solve. `scratch` must have the same length as the rows; it is
/// overwritten.
pub fn fem_step_into(
    prev: &[f64],
    curr: &[f64],
    op: &FemOperator,
    scratch: &mut [f64],
    next: &mut [f64],
) {
    let n = curr.len();
    assert_eq!(prev.len(), n);
    assert_eq!(next.len(), n);
    op.stiffness.multiply(curr, scratch);
    op.mass_factor.solve_in_place(scratch);
    let dt2 = op.dt_s * op.dt_s;
    for i in 0..n {
        next[i] = 2.0 * curr[i] - prev[i] - dt2 * scratch[i];
    }
    next[0] = 0.0;
    next[n - 1] = 0.0;
}

/// Allocating wrapper around [`fem_step_into`].
pub fn fem_step(prev: &[f64], curr: &[f64], op: &FemOperator) -> Vec<f64> {
    let mut scratch = vec![0.0; curr.len()];
    let mut next = vec![0.0; curr.len()];
    fem_step_into(prev, curr, op, &mut scratch, &mut next);
    next
}

/// Largest stable time step for this solver on a grid of spacing `dx`:
/// `dx / (c * sqrt(3))`.
///
/// The consistent-mass semi-discrete dispersion relation is
/// `omega^2 = (6 c^2 / dx^2) (1 - cos(k dx)) / (2 + cos(k dx))`, whose
/// maximum over wavenumbers is `12 c^2 / dx^2` at `k dx = pi`. Leapfrog
/// requires `omega dt <= 2`, giving the bound above. The consistent mass
/// matrix couples neighbors, which raises the top of the spectrum and makes
/// this limit a factor `sqrt(3)` stricter than the finite-difference one.
pub fn stability_limit(wave_speed: f64, dx: f64) -> f64 {
    dx / (wave_speed * 3.0_f64.sqrt())
}

/// Discrete energy of a stored run at `step`:
/// `E = (1/2) v' M v + (1/2) u' K u` with the forward-difference velocity
/// `v = (u_{step+1} - u_step) / dt`. Requires `step + 1 < step_count`.
///
/// Like its finite-difference counterpart, this functional oscillates at
/// amplitude O(omega dt) around a conserved quantity because the velocity
/// lives at the half step; stability shows up as the absence of a secular
/// trend, not as pointwise constancy.
pub fn fem_energy(history: &WaveHistory, system: &GlobalSystem, step: usize) -> f64 {
    assert!(
        step + 1 < history.step_count(),
        "energy needs rows {step} and {}",
        step + 1
    );
    let n = history.node_count();
    let dt = history.dt_s();
    let u = history.row(step);
    let u_next = history.row(step + 1);
    let v: Vec<f64> = (0..n).map(|i| (u_next[i] - u[i]) / dt).collect();
    let mut mv = vec![0.0; n];
    system.mass.multiply(&v, &mut mv);
    let mut ku = vec![0.0; n];
    system.stiffness.multiply(u, &mut ku);
    let kinetic: f64 = v.iter().zip(&mv).map(|(a, b)| a * b).sum();
    let potential: f64 = u.iter().zip(&ku).map(|(a, b)| a * b).sum();
    0.5 * kinetic + 0.5 * potential
}

/// Streaming finite-element integrator. Emits the same rows `simulate_fem`
/// stores, one at a time, without holding the full history.
pub struct FemStepper {
    op: FemOperator,
    threshold: f64,
    node_count: usize,
    step_count: usize,
    dx_m: f64,
    emitted: usize,
    prev: Vec<f64>,
    curr: Vec<f64>,
    next: Vec<f64>,
    scratch: Vec<f64>,
}

impl FemStepper {
    /// The configuration must be undamped: this solver has no damping term,
    /// and silently ignoring `damping` would misreport the model.
    pub fn new(config: &StringConfig) -> Self {
        config.validate().expect("invalid configuration");
        assert!(
            config.damping == 0.0,
            "the finite-element solver has no damping term; set damping = 0"
        );
        let pluck = pluck_profile(config);
        FemStepper {
            op: FemOperator::from_config(config),
            threshold: 1.0e6 * config.pluck_amplitude_m,
            node_count: config.node_count,
            step_count: config.step_count,
            dx_m: config.dx(),
            emitted: 0,
            prev: pluck.clone(),
            curr: pluck,
            next: vec![0.0; config.node_count],
            scratch: vec![0.0; config.node_count],
        }
    }

    fn row_is_bad(&self) -> bool {
        self.next
            .iter()
            .any(|u| !u.is_finite() || u.abs() > self.threshold)
    }
}

impl DisplacementSource for FemStepper {
    fn node_count(&self) -> usize {
        self.node_count
    }

    fn step_count(&self) -> usize {
        self.step_count
    }

    fn dt_s(&self) -> f64 {
        self.op.dt_s
    }

    fn dx_m(&self) -> f64 {
        self.dx_m
    }

    fn next_row(&mut self) -> Result<Option<&[f64]>, Diverged> {
        if self.emitted >= self.step_count {
            return Ok(None);
        }
        let row: &[f64] = match self.emitted {
            0 => &self.prev,
            1 => &self.curr,
            _ => {
                fem_step_into(&self.prev, &self.curr, &self.op, &mut self.scratch, &mut self.next);
                if self.row_is_bad() {
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

/// Runs the finite-element solver for the whole configured duration and
/// stores every row. Row 0 and row 1 both hold the pluck profile (the string
/// is released from rest).
pub fn simulate_fem(config: &StringConfig) -> Result<WaveHistory, Diverged> {
    let mut stepper = FemStepper::new(config);
    let mut history = WaveHistory::zeroed(
        config.node_count,
        config.step_count,
        config.dt_s,
        config.dx(),
    );
    let mut step = 0;
    while let Some(row) = stepper.next_row()? {
        history.row_mut(step).copy_from_slice(row);
        step += 1;
    }
    debug_assert_eq!(step, config.step_count);
    Ok(history)
}
