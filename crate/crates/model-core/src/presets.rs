//! Named parameter sets used across the crate's demos, benchmarks, and
//! regression tests.
//!
//! Two real strings appear throughout: a nylon guitar string tuned to B3
//! (247 Hz) and a slightly lighter string used for the solver-comparison
//! experiments. Keeping them here pins the exact numbers in one place.

use crate::config::{BellConfig, StringConfig};

/// Nylon guitar string tuned to B3: 0.65 m at 60 N with μ = 5.82e-4 kg/m,
/// giving c = 321 m/s and f₁ = 247.0 Hz. Plucked 0.18 m from the nut,
/// simulated 1 s at 100 kHz on an 81-node grid.
pub fn nylon_b3() -> StringConfig {
    StringConfig {
        length_m: 0.65,
        tension_n: 60.0,
        linear_density: 5.82e-4,
        damping: 0.0,
        pluck_position_m: 0.18,
        pluck_amplitude_m: 3e-4,
        node_count: 81,
        dt_s: 1e-5,
        step_count: 100_000,
    }
}

/// Baseline for the parameter sweeps: 0.655 m, μ = 4.30e-4 kg/m, 42.86 N,
/// plucked 0.18 m from the end, 80 nodes, 1 s at 100 kHz.
pub fn sweep_reference() -> StringConfig {
    StringConfig {
        length_m: 0.655,
        tension_n: 42.86,
        linear_density: 4.3e-4,
        damping: 0.0,
        pluck_position_m: 0.18,
        pluck_amplitude_m: 3e-4,
        node_count: 80,
        dt_s: 1e-5,
        step_count: 100_000,
    }
}

/// [`sweep_reference`] plucked exactly at the string midpoint, which
/// suppresses every even harmonic.
pub fn midpoint_pluck() -> StringConfig {
    StringConfig {
        pluck_position_m: 0.655 / 2.0,
        ..sweep_reference()
    }
}

/// Damped B3 render: 45.02 N with σ = 1.3e-3 kg/(m·s), 3 s at
/// dt = 9.65e-6 s, so the tail audibly decays (time constant 2μ/σ ≈ 0.66 s).
pub fn damped_b3() -> StringConfig {
    StringConfig {
        length_m: 0.655,
        tension_n: 45.02,
        linear_density: 4.3e-4,
        damping: 1.3e-3,
        pluck_position_m: 0.18,
        pluck_amplitude_m: 3e-4,
        node_count: 80,
        dt_s: 9.65e-6,
        step_count: 310_881,
    }
}

/// Hand-bell-sized aluminum hemisphere: R = 4 cm, h = 0.8 mm, E = 62 GPa,
/// ν = 0.30, with damping matched to a real bell's ring-down
/// (σ = 10 kg/(m²·s)).
pub fn aluminum_bell() -> BellConfig {
    BellConfig {
        radius_m: 0.04,
        thickness_m: 8e-4,
        density: 2700.0,
        youngs_modulus: 6.2e10,
        poisson_ratio: 0.30,
        damping_sigma: 10.0,
    }
}
