//! Discrete biharmonic operator on a hemispherical surface grid.
//!
//! On the unit sphere the operator expands to eight partial-derivative
//! terms:
//!
//! ```text
//! ∇⁴u = u_θθθθ + 2cotθ·u_θθθ + ((cos²θ − 2)/sin²θ)·u_θθ + (cotθ/sin²θ)·u_θ
//!     + u_φφφφ/sin⁴θ + 2(1 + cos²θ)/sin⁴θ·u_φφ
//!     + 2/sin²θ·u_θθφφ − 2cotθ/sin²θ·u_θφφ
//! ```
//!
//! each approximated by second-order central differences on a θ×φ grid.
//! The grid covers `[theta_start, π/2] × [0, 2π)`: the azimuthal direction
//! wraps, the rim row θ = π/2 is a free edge (`∂u/∂θ = 0`, even ghost
//! reflection), and the pole θ = 0 is excluded because the coefficients
//! blow up there. The five-point θ footprint leaves the two rows nearest
//! the pole unevaluated; they are returned as zeros.

use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error(
        "grid touches the pole: theta must start at least one spacing ({spacing:.3e} rad) above 0, got {start:.3e}"
    )]
    TouchesPole { start: f64, spacing: f64 },
    #[error("{axis} needs at least {min} points, got {got}")]
    TooCoarse {
        axis: &'static str,
        got: usize,
        min: usize,
    },
}

/// Row-major θ×φ grid on the hemisphere with the rim row pinned to π/2.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalGrid {
    thetas: Vec<f64>,
    dtheta: f64,
    dphi: f64,
    n_phi: usize,
}

impl SphericalGrid {
    /// Uniform grid of `n_theta` colatitudes from `theta_start` to π/2
    /// inclusive and `n_phi` azimuths around the full circle.
    pub fn hemisphere(theta_start: f64, n_theta: usize, n_phi: usize) -> Result<Self, GridError> {
        if n_theta < 4 {
            return Err(GridError::TooCoarse {
                axis: "theta",
                got: n_theta,
                min: 4,
            });
        }
        if n_phi < 5 {
            return Err(GridError::TooCoarse {
                axis: "phi",
                got: n_phi,
                min: 5,
            });
        }
        let dtheta = (FRAC_PI_2 - theta_start) / (n_theta - 1) as f64;
        if !(theta_start >= dtheta && dtheta > 0.0) {
            return Err(GridError::TouchesPole {
                start: theta_start,
                spacing: dtheta,
            });
        }
        let mut thetas: Vec<f64> = (0..n_theta)
            .map(|i| theta_start + i as f64 * dtheta)
            .collect();
        thetas[n_theta - 1] = FRAC_PI_2;
        Ok(Self {
            thetas,
            dtheta,
            dphi: 2.0 * std::f64::consts::PI / n_phi as f64,
            n_phi,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn theta(&self, row: usize) -> f64 {
        self.thetas[row]
    }

    pub fn phi(&self, col: usize) -> f64 {
        col as f64 * self.dphi
    }

    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }

    pub fn dphi(&self) -> f64 {
        self.dphi
    }

    pub fn len(&self) -> usize {
        self.thetas.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        debug_assert!(row < self.n_theta() && col < self.n_phi);
        row * self.n_phi + col
    }

    /// Samples `f(θ, φ)` over the grid in row-major order.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut field = Vec::with_capacity(self.len());
        for &theta in &self.thetas {
            for col in 0..self.n_phi {
                field.push(f(theta, self.phi(col)));
            }
        }
        field
    }
}

/// Applies the discrete biharmonic to `field`; rows 0 and 1 of the output
/// are zero (no stencil support on the pole side).
pub fn biharmonic_apply(field: &[f64], grid: &SphericalGrid) -> Vec<f64> {
    assert_eq!(field.len(), grid.len(), "field does not match the grid");
    let n_theta = grid.n_theta();
    let n_phi = grid.n_phi();
    let last = n_theta - 1;

    // Even reflection across the rim row realizes the free edge; the row
    // index never drops below 0 because evaluation starts at row 2.
    let mirror = |row: usize| if row > last { 2 * last - row } else { row };
    let u = |row: usize, col: isize| {
        let col = (col.rem_euclid(n_phi as isize)) as usize;
        field[mirror(row) * n_phi + col]
    };

    let dt = grid.dtheta();
    let dp = grid.dphi();
    let (dt2, dt3, dt4) = (dt * dt, dt * dt * dt, dt * dt * dt * dt);
    let dp2 = dp * dp;
    let dp4 = dp2 * dp2;

    let mut out = vec![0.0; field.len()];
    for row in 2..n_theta {
        let theta = grid.theta(row);
        let (sin, cos) = theta.sin_cos();
        let cot = cos / sin;
        let s2 = sin * sin;
        let s4 = s2 * s2;

        for col in 0..n_phi as isize {
            let d1t = (u(row + 1, col) - u(row - 1, col)) / (2.0 * dt);
            let d2t = (u(row + 1, col) - 2.0 * u(row, col) + u(row - 1, col)) / dt2;
            // Five-point third derivative; the bracket is 2δθ³·u‴ + O(δθ⁵).
            let d3t = (u(row + 2, col) - u(row - 2, col)
                - 2.0 * (u(row + 1, col) - u(row - 1, col)))
                / (2.0 * dt3);
            let d4t = (u(row + 2, col) + u(row - 2, col)
                - 4.0 * u(row + 1, col)
                - 4.0 * u(row - 1, col)
                + 6.0 * u(row, col))
                / dt4;

            let d2p = (u(row, col + 1) - 2.0 * u(row, col) + u(row, col - 1)) / dp2;
            let d4p = (u(row, col + 2) + u(row, col - 2)
                - 4.0 * u(row, col + 1)
                - 4.0 * u(row, col - 1)
                + 6.0 * u(row, col))
                / dp4;

            let phi_second = |r: usize| u(r, col + 1) - 2.0 * u(r, col) + u(r, col - 1);
            let d1t2p = (phi_second(row + 1) - phi_second(row - 1)) / (2.0 * dp2 * dt);
            let d2t2p =
                (phi_second(row + 1) - 2.0 * phi_second(row) + phi_second(row - 1)) / (dp2 * dt2);

            out[row * n_phi + col as usize] = d4t
                + 2.0 * cot * d3t
                + (cos * cos - 2.0) / s2 * d2t
                + cot / s2 * d1t
                + d4p / s4
                + 2.0 * (1.0 + cos * cos) / s4 * d2p
                + 2.0 / s2 * d2t2p
                - 2.0 * cot / s2 * d1t2p;
        }
    }
    out
}
