//! Closed-form standing-wave solution of the ideal plucked string.
//!
//! A string fixed at both ends admits the modal solution
//!
//! ```text
//! u(x, t) = Σₙ Aₙ · cos(ωₙ t) · sin(nπx/L),   ωₙ = nπc/L
//! ```
//!
//! where the cosine time dependence encodes the pluck's zero initial
//! velocity. For the triangular pluck of height `h` at `x_p` the Fourier
//! coefficients have the closed form
//!
//! ```text
//! Aₙ = 2hL² / (π² n² x_p (L − x_p)) · sin(nπ x_p / L)
//! ```
//!
//! so a pluck at a rational fraction p/q of the length silences every mode
//! with `n` divisible by `q` (midpoint pluck: no even harmonics). This
//! module is the reference the discrete solvers are judged against: exact
//! harmonic frequencies `n·f₁` and exact displacement at any `(x, t)`.

use model_core::StringConfig;
use std::f64::consts::PI;

/// Modes kept when callers do not ask for a specific count. Coefficients
/// fall off as 1/n², so 50 modes reconstruct the triangle to a fraction
/// of a percent everywhere away from the kink.
pub const DEFAULT_MODE_COUNT: usize = 50;

/// `sin(π·z)` with exact argument reduction, so integral `z` maps to an
/// exact 0. The naive `(PI * z).sin()` leaves ~1e-16 residue at the node
/// positions, which would smear the exactly-silent harmonics of rational
/// pluck fractions (midpoint pluck: every even mode).
fn sin_pi(z: f64) -> f64 {
    let nearest = z.round();
    let reduced = (PI * (z - nearest)).sin();
    // sin(π(r + m)) = (-1)^m sin(πr)
    if (nearest as i64) % 2 == 0 {
        reduced
    } else {
        -reduced
    }
}

/// Truncated modal description of one plucked string.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalExpansion {
    length_m: f64,
    wave_speed: f64,
    /// `coefficients[i]` is `Aₙ` for mode `n = i + 1` (meters).
    coefficients: Vec<f64>,
}

impl ModalExpansion {
    pub fn mode_count(&self) -> usize {
        self.coefficients.len()
    }

    pub fn length_m(&self) -> f64 {
        self.length_m
    }

    pub fn wave_speed(&self) -> f64 {
        self.wave_speed
    }

    /// Amplitude `Aₙ` of mode `n` (1-based).
    pub fn coefficient(&self, n: usize) -> f64 {
        assert!(n >= 1 && n <= self.coefficients.len(), "mode {n} not kept");
        self.coefficients[n - 1]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Angular frequency `ωₙ = nπc/L` of mode `n` (1-based).
    pub fn omega(&self, n: usize) -> f64 {
        n as f64 * PI * self.wave_speed / self.length_m
    }

    /// Fundamental in hertz, `c / 2L`.
    pub fn fundamental_hz(&self) -> f64 {
        self.wave_speed / (2.0 * self.length_m)
    }
}

/// Modal coefficients of the triangular pluck described by `config`.
///
/// `config` must validate; `mode_count = 0` yields an empty expansion whose
/// displacement is identically zero.
pub fn modal_expansion(config: &StringConfig, mode_count: usize) -> ModalExpansion {
    config.validate().expect("valid string config");
    let length = config.length_m;
    let pluck = config.pluck_position_m;
    let height = config.pluck_amplitude_m;
    let front = 2.0 * height * length * length / (PI * PI * pluck * (length - pluck));
    let pluck_frac = pluck / length;
    let coefficients = (1..=mode_count)
        .map(|n| {
            let n = n as f64;
            front / (n * n) * sin_pi(n * pluck_frac)
        })
        .collect();
    ModalExpansion {
        length_m: length,
        wave_speed: config.wave_speed().expect("valid string config"),
        coefficients,
    }
}

/// Exact displacement of the truncated expansion at position `x`, time `t`.
pub fn displacement(expansion: &ModalExpansion, x: f64, t: f64) -> f64 {
    let length = expansion.length_m;
    let x_frac = x / length;
    let mut sum = 0.0;
    for (i, &a) in expansion.coefficients.iter().enumerate() {
        let n = (i + 1) as f64;
        let omega = n * PI * expansion.wave_speed / length;
        sum += a * (omega * t).cos() * sin_pi(n * x_frac);
    }
    sum
}

/// The exact harmonic ladder `[f₁, 2f₁, …, count·f₁]`.
pub fn harmonic_frequencies(fundamental_hz: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|n| n as f64 * fundamental_hz).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_string(pluck_frac: f64) -> StringConfig {
        StringConfig {
            length_m: 1.0,
            tension_n: 1.0,
            linear_density: 1.0,
            damping: 0.0,
            pluck_position_m: pluck_frac,
            pluck_amplitude_m: 1.0,
            node_count: 3,
            dt_s: 1e-3,
            step_count: 2,
        }
    }

    #[test]
    fn midpoint_fundamental_is_eight_over_pi_squared() {
        let expansion = modal_expansion(&unit_string(0.5), 4);
        assert_relative_eq!(expansion.coefficient(1), 8.0 / (PI * PI), max_relative = 1e-14);
        assert_eq!(expansion.coefficient(2), 0.0);
        // sin(3π/2) = -1: the third mode flips sign.
        assert_relative_eq!(
            expansion.coefficient(3),
            -8.0 / (9.0 * PI * PI),
            max_relative = 1e-14
        );
        assert_eq!(expansion.coefficient(4), 0.0);
    }

    #[test]
    fn empty_expansion_is_identically_zero() {
        let expansion = modal_expansion(&unit_string(0.3), 0);
        assert_eq!(expansion.mode_count(), 0);
        assert_eq!(displacement(&expansion, 0.4, 1.7), 0.0);
    }

    #[test]
    fn omega_ladder_matches_fundamental() {
        let config = model_core::presets::nylon_b3();
        let expansion = modal_expansion(&config, 5);
        let f1 = config.fundamental_hz().unwrap();
        for n in 1..=5 {
            assert_relative_eq!(
                expansion.omega(n),
                2.0 * PI * n as f64 * f1,
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(expansion.fundamental_hz(), f1, max_relative = 1e-15);
    }

    #[test]
    fn harmonic_ladder_is_integer_multiples() {
        assert_eq!(harmonic_frequencies(10.0, 3), vec![10.0, 20.0, 30.0]);
        assert!(harmonic_frequencies(10.0, 0).is_empty());
    }

    #[test]
    fn displacement_at_endpoints_is_zero() {
        let config = model_core::presets::sweep_reference();
        let expansion = modal_expansion(&config, DEFAULT_MODE_COUNT);
        for &t in &[0.0, 1e-3, 0.04] {
            assert_eq!(displacement(&expansion, 0.0, t), 0.0);
            assert_eq!(displacement(&expansion, config.length_m, t), 0.0);
        }
    }
}
