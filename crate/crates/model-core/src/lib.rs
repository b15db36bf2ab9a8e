//! Shared value types for simulating plucked strings and struck bells.
//!
//! This crate owns the configuration structs consumed by the solvers
//! (`StringConfig`, `BellConfig`, `ListenerGeometry`), the material table,
//! the dense displacement record (`WaveHistory`) produced by every string
//! solver, and the flat `key = value` config-file dialect used by the CLI.
//!
//! All quantities are SI: meters, seconds, newtons, kg/m for linear density,
//! kg/m³ for volume density, pascals for moduli. Configs are immutable value
//! types; derived quantities are recomputed on demand rather than cached.

mod config;
mod error;
pub mod kv;
mod material;
pub mod presets;
mod wave;

pub use config::{BellConfig, ListenerGeometry, StringConfig};
pub use error::{ConfigError, Diverged, DomainError, UnknownMaterial};
pub use material::{builtin_materials, material, Interval, Material, BUILTIN_MATERIALS};
pub use wave::{DisplacementSource, HistoryRows, WaveHistory};

/// Transverse wave speed `c = √(T/μ)` of an ideal string under tension
/// `T` (N) with linear density `μ` (kg/m).
///
/// # Errors
/// Both arguments must be finite and strictly positive.
pub fn wave_speed(tension_n: f64, linear_density: f64) -> Result<f64, DomainError> {
    error::require_positive("tension_n", tension_n)?;
    error::require_positive("linear_density", linear_density)?;
    Ok((tension_n / linear_density).sqrt())
}

/// Fundamental frequency `f₁ = (1/2L)·√(T/μ)` of an ideal string fixed at
/// both ends: the wave speed divided by the round-trip length.
///
/// # Errors
/// All arguments must be finite and strictly positive.
pub fn fundamental_frequency(
    length_m: f64,
    tension_n: f64,
    linear_density: f64,
) -> Result<f64, DomainError> {
    error::require_positive("length_m", length_m)?;
    Ok(wave_speed(tension_n, linear_density)? / (2.0 * length_m))
}

/// Bending rigidity `D = E·h³ / (12·(1 − ν²))` of a thin shell of thickness
/// `h` (m), Young's modulus `E` (Pa), and Poisson ratio `ν`.
///
/// # Errors
/// `E` and `h` must be finite and positive; `ν` must lie in `[0, 1)` so the
/// denominator stays positive.
pub fn bending_rigidity(
    youngs_modulus: f64,
    thickness_m: f64,
    poisson_ratio: f64,
) -> Result<f64, DomainError> {
    error::require_positive("youngs_modulus", youngs_modulus)?;
    error::require_positive("thickness_m", thickness_m)?;
    if !poisson_ratio.is_finite() || !(0.0..1.0).contains(&poisson_ratio) {
        return Err(DomainError::PoissonOutOfRange {
            value: poisson_ratio,
            limit: 1.0,
        });
    }
    let h = thickness_m;
    Ok(youngs_modulus * h * h * h / (12.0 * (1.0 - poisson_ratio * poisson_ratio)))
}
