//! Analytical model of a thin hemispherical shell (a hand bell).
//!
//! Transverse deflection separates as `w(θ)·h(φ)·T(t)`. The polar factor
//! solves a Legendre-type equation whose power-series coefficients obey a
//! two-term recurrence; demanding a finite polynomial quantizes the
//! separation constant to `Ω² = k(k+1)` with `k = n0 + m0`, and each `k`
//! rings at
//!
//! ```text
//! f_k = (1/2π)·√(α·k²(k+1)² − γ²),   α = D/(ρhR⁴),   γ = σ/(2ρh)
//! ```
//!
//! The crate exposes the coefficient pair, the mode catalogue (shape
//! polynomial, frequency, attenuation), damped additive synthesis, and a
//! discrete spherical biharmonic stencil ([`stencil`]) for desk-scale
//! experiments on the underlying operator.

use model_core::BellConfig;
use std::f64::consts::PI;

pub mod stencil;

pub use stencil::{biharmonic_apply, GridError, SphericalGrid};

/// Material/geometry summary of the shell equation of motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellCoefficients {
    /// Stiffness rate `α = D/(ρhR⁴)` in 1/s².
    pub alpha_stiff: f64,
    /// Attenuation `γ = σ/(2ρh)` in 1/s.
    pub gamma_att: f64,
}

/// Reduces a bell description to its two dynamic coefficients.
pub fn shell_coefficients(config: &BellConfig) -> ShellCoefficients {
    config.validate().expect("invalid bell config");
    let rigidity = config.bending_rigidity().expect("validated above");
    let areal_mass = config.density * config.thickness_m;
    ShellCoefficients {
        alpha_stiff: rigidity / (areal_mass * config.radius_m.powi(4)),
        gamma_att: config.damping_sigma / (2.0 * areal_mass),
    }
}

/// The damping rate exceeds the stiffness restoring rate for this mode, so
/// it relaxes without oscillating and has no real frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("mode k = {k} is overdamped: attenuation exceeds its stiffness rate")]
pub struct OverdampedMode {
    pub k: usize,
}

/// Ring frequency of mode `k` in Hz: `(1/2π)·√(α·k²(k+1)² − γ²)`.
pub fn mode_frequency(coeffs: &ShellCoefficients, k: usize) -> Result<f64, OverdampedMode> {
    assert!(k >= 1, "mode index starts at 1");
    let lambda = (k * (k + 1)) as f64;
    let radicand = coeffs.alpha_stiff * lambda * lambda - coeffs.gamma_att * coeffs.gamma_att;
    if radicand <= 0.0 {
        return Err(OverdampedMode { k });
    }
    Ok(radicand.sqrt() / (2.0 * PI))
}

/// Power-series coefficients `a_0..a_{n0}` of the polar shape polynomial.
///
/// The recurrence
///
/// ```text
/// a_{n+2} = a_n · (n² + n(2m0+1) + m0(m0+1) − k(k+1)) / ((n+2)(n+1))
/// ```
///
/// with `k = n0 + m0` couples only coefficients of equal parity, so the
/// seed must sit on the parity of `n0` and the other seed must be zero;
/// anything else is a contract violation. The numerator is integer
/// arithmetic, which makes the termination `a_{n0+2} = 0` exact rather
/// than a rounding accident.
pub fn legendre_coefficients(m0: usize, n0: usize, a0: f64, a1: f64) -> Vec<f64> {
    let even = n0 % 2 == 0;
    assert!(
        (a0 != 0.0) ^ (a1 != 0.0),
        "exactly one seed coefficient may be nonzero"
    );
    assert!(
        if even { a0 != 0.0 } else { a1 != 0.0 },
        "seed parity must match n0 = {n0}"
    );

    let mut coeffs = vec![0.0; n0 + 1];
    let start = if even { 0 } else { 1 };
    coeffs[start] = if even { a0 } else { a1 };

    let m = m0 as i64;
    let k = (n0 + m0) as i64;
    let mut n = start as i64;
    while n + 2 <= n0 as i64 {
        let numerator = n * n + n * (2 * m + 1) + m * (m + 1) - k * (k + 1);
        let denominator = (n + 2) * (n + 1);
        coeffs[(n + 2) as usize] =
            coeffs[n as usize] * numerator as f64 / denominator as f64;
        n += 2;
    }
    coeffs
}

/// One standing-wave mode of the shell.
///
/// `k = n0 + m0` fixes the frequency; `m0` and `n0` individually fix the
/// shape `(sinθ)^{m0}·p(cosθ)·cos(m0·φ)` with `p` the polynomial held in
/// `shape_coeffs` (low power first).
#[derive(Debug, Clone, PartialEq)]
pub struct BellMode {
    pub m0: usize,
    pub n0: usize,
    pub k: usize,
    /// Ω = √(k(k+1)), the quantized separation constant.
    pub omega_cap: f64,
    pub frequency_hz: f64,
    /// Envelope decay rate γ in 1/s.
    pub attenuation: f64,
    pub shape_coeffs: Vec<f64>,
}

impl BellMode {
    /// Builds the `(m0, n0)` mode under the given shell coefficients, with
    /// the conventional unit seed on the parity of `n0`.
    pub fn new(m0: usize, n0: usize, coeffs: &ShellCoefficients) -> Result<Self, OverdampedMode> {
        let k = m0 + n0;
        let frequency_hz = mode_frequency(coeffs, k)?;
        let (a0, a1) = if n0 % 2 == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
        Ok(Self {
            m0,
            n0,
            k,
            omega_cap: ((k * (k + 1)) as f64).sqrt(),
            frequency_hz,
            attenuation: coeffs.gamma_att,
            shape_coeffs: legendre_coefficients(m0, n0, a0, a1),
        })
    }
}

/// Rim-driven modes `(m0 = k, n0 = 0)` for each requested `k`; these are
/// the modes a strike near the free edge excites, and the set a frequency
/// table indexes by `k` alone.
pub fn rim_modes(coeffs: &ShellCoefficients, ks: &[usize]) -> Result<Vec<BellMode>, OverdampedMode> {
    ks.iter().map(|&k| BellMode::new(k, 0, coeffs)).collect()
}

/// Spatial deflection pattern at colatitude `theta`, azimuth `phi`.
pub fn mode_shape(mode: &BellMode, theta: f64, phi: f64) -> f64 {
    let x = theta.cos();
    let mut p = 0.0;
    for &a in mode.shape_coeffs.iter().rev() {
        p = p * x + a;
    }
    theta.sin().powi(mode.m0 as i32) * p * (mode.m0 as f64 * phi).cos()
}

/// Truncated shape series evaluated at the rim-side argument `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesAtOne {
    pub value: f64,
    /// Set when the partial sum left `[−10⁶, 10⁶]`; the series only
    /// terminates at quantized Ω, everywhere else this is a diverging
    /// partial sum, not a function value.
    pub saturated: bool,
}

/// Sums the even-seeded (`a0 = 1`) shape series at `x = 1` for an
/// arbitrary, not necessarily quantized, separation constant `omega`.
///
/// Scanning this over Ω locates the quantized modes as the values where
/// the series collapses to a polynomial; `truncation` caps the summed
/// power (and must be at least 2 for the recurrence to act).
pub fn p_at_one(m0: usize, omega: f64, truncation: usize) -> SeriesAtOne {
    assert!(truncation >= 2, "truncation must be at least 2");
    let omega_sq = omega * omega;
    let m = m0 as f64;
    let mut a = 1.0;
    let mut sum = a;
    let mut n = 0.0;
    while n + 2.0 <= truncation as f64 {
        a *= (n * n + n * (2.0 * m + 1.0) + m * (m + 1.0) - omega_sq) / ((n + 2.0) * (n + 1.0));
        sum += a;
        n += 2.0;
    }
    SeriesAtOne {
        value: sum,
        saturated: !sum.is_finite() || sum.abs() > 1e6,
    }
}

/// Damped additive synthesis: `Σ amp·e^{−γt}·cos(2πf t)` sampled at
/// `sample_rate_hz` for `duration_s`. Modes are summed in the order given,
/// so equal inputs give bit-equal output. Every mode must sit below the
/// Nyquist frequency.
pub fn synthesize_bell(
    modes: &[(BellMode, f64)],
    duration_s: f64,
    sample_rate_hz: f64,
) -> Vec<f64> {
    assert!(duration_s > 0.0 && duration_s.is_finite());
    assert!(sample_rate_hz > 0.0 && sample_rate_hz.is_finite());
    for (mode, _) in modes {
        assert!(
            mode.frequency_hz < sample_rate_hz / 2.0,
            "mode k = {} at {:.1} Hz aliases at sample rate {:.1} Hz",
            mode.k,
            mode.frequency_hz,
            sample_rate_hz
        );
    }

    let count = (duration_s * sample_rate_hz).round() as usize;
    let mut samples = vec![0.0; count];
    for (mode, amplitude) in modes {
        let omega = 2.0 * PI * mode.frequency_hz;
        let gamma = mode.attenuation;
        for (i, s) in samples.iter_mut().enumerate() {
            let t = i as f64 / sample_rate_hz;
            *s += amplitude * (-gamma * t).exp() * (omega * t).cos();
        }
    }
    samples
}

/// Mode table as CSV with header `m0,n0,k,frequency_hz,attenuation`.
pub fn mode_table_csv(modes: &[BellMode]) -> String {
    let mut out = String::from("m0,n0,k,frequency_hz,attenuation\n");
    for mode in modes {
        out.push_str(&format!(
            "{},{},{},{:.8e},{:.8e}\n",
            mode.m0, mode.n0, mode.k, mode.frequency_hz, mode.attenuation
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use model_core::presets::aluminum_bell;

    #[test]
    fn aluminum_coefficients_match_direct_arithmetic() {
        let config = aluminum_bell();
        let coeffs = shell_coefficients(&config);

        // Independent arithmetic from the raw constants.
        let rigidity = 6.2e10 * 8e-4_f64.powi(3) / (12.0 * (1.0 - 0.3 * 0.3));
        let areal = 2700.0 * 8e-4;
        assert_relative_eq!(rigidity, 2.9070, max_relative = 1e-4);
        assert_relative_eq!(
            coeffs.alpha_stiff,
            rigidity / (areal * 0.04f64.powi(4)),
            max_relative = 1e-12
        );
        assert_relative_eq!(coeffs.alpha_stiff, 5.2572e5, max_relative = 1e-4);
        assert_relative_eq!(coeffs.gamma_att, 10.0 / (2.0 * areal), max_relative = 1e-12);
        assert_relative_eq!(coeffs.gamma_att, 2.31481, max_relative = 1e-5);
    }

    #[test]
    fn lossless_shell_has_zero_attenuation() {
        let mut config = aluminum_bell();
        config.damping_sigma = 0.0;
        assert_eq!(shell_coefficients(&config).gamma_att, 0.0);
    }

    #[test]
    fn doubling_the_radius_divides_stiffness_by_sixteen() {
        let mut config = aluminum_bell();
        let small = shell_coefficients(&config);
        config.radius_m *= 2.0;
        let large = shell_coefficients(&config);
        assert_relative_eq!(large.alpha_stiff, small.alpha_stiff / 16.0, max_relative = 1e-12);
        assert_eq!(large.gamma_att, small.gamma_att);
    }

    #[test]
    fn aluminum_mode_frequencies_match_the_published_table() {
        let coeffs = shell_coefficients(&aluminum_bell());
        let expected = [(2, 692.0), (3, 1385.0), (4, 2308.0), (5, 3462.0)];
        for (k, table_hz) in expected {
            let f = mode_frequency(&coeffs, k).unwrap();
            assert!(
                (f - table_hz).abs() < 1.0,
                "k = {k}: {f:.2} Hz vs table {table_hz} Hz"
            );
        }
    }

    #[test]
    fn mode_frequency_is_monotone_in_k() {
        let coeffs = shell_coefficients(&aluminum_bell());
        let mut last = 0.0;
        for k in 1..=8 {
            let f = mode_frequency(&coeffs, k).unwrap();
            assert!(f > last, "k = {k}: {f} not above {last}");
            last = f;
        }
    }

    #[test]
    fn damping_barely_moves_the_frequencies() {
        let damped = shell_coefficients(&aluminum_bell());
        let mut lossless_config = aluminum_bell();
        lossless_config.damping_sigma = 0.0;
        let lossless = shell_coefficients(&lossless_config);
        for k in 1..=5 {
            let fd = mode_frequency(&damped, k).unwrap();
            let fl = mode_frequency(&lossless, k).unwrap();
            assert!(
                (fd - fl).abs() < 0.01,
                "k = {k}: damped {fd} vs lossless {fl}"
            );
        }
    }

    #[test]
    fn overdamped_mode_is_reported_with_its_index() {
        let coeffs = ShellCoefficients {
            alpha_stiff: 1.0,
            gamma_att: 10.0,
        };
        // k = 1: stiffness term 1·4 = 4 < γ² = 100.
        let err = mode_frequency(&coeffs, 1).unwrap_err();
        assert_eq!(err, OverdampedMode { k: 1 });
        assert!(err.to_string().contains("k = 1"));
        // A stiffer mode of the same shell oscillates fine.
        assert!(mode_frequency(&coeffs, 20).is_ok());
    }

    #[test]
    fn recurrence_reproduces_hand_computed_polynomials() {
        // m0 = 0, n0 = 2: a2 = a0·(0 + 0 + 0 − 6)/2 = −3.
        assert_eq!(legendre_coefficients(0, 2, 1.0, 0.0), vec![1.0, 0.0, -3.0]);
        // m0 = 0, n0 = 1: the seed already terminates (numerator 1+1−2 = 0).
        assert_eq!(legendre_coefficients(0, 1, 0.0, 1.0), vec![0.0, 1.0]);
        // n0 = 0 collapses to the seed alone.
        assert_eq!(legendre_coefficients(3, 0, 2.5, 0.0), vec![2.5]);
        // m0 = 1, n0 = 3 (k = 4): a3 = a1·(1 + 3 + 2 − 20)/6 = −7/3.
        let coeffs = legendre_coefficients(1, 3, 0.0, 1.0);
        assert_eq!(coeffs.len(), 4);
        assert_eq!(coeffs[0], 0.0);
        assert_eq!(coeffs[2], 0.0);
        assert_relative_eq!(coeffs[3], -7.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn termination_numerator_vanishes_exactly() {
        // The recurrence numerator at n = n0 is
        // n0² + n0(2m0+1) + m0(m0+1) − k(k+1) with k = n0 + m0, which is
        // identically zero; check the integer arithmetic over a small sweep
        // so a_{n0+2} = 0 is exact, not rounded.
        for m0 in 0..6i64 {
            for n0 in 0..8i64 {
                let k = n0 + m0;
                let numerator = n0 * n0 + n0 * (2 * m0 + 1) + m0 * (m0 + 1) - k * (k + 1);
                assert_eq!(numerator, 0, "m0 = {m0}, n0 = {n0}");
            }
        }
    }

    #[test]
    fn opposite_parity_coefficients_are_exactly_zero() {
        let coeffs = legendre_coefficients(2, 6, 1.0, 0.0);
        assert_eq!(coeffs.len(), 7);
        for n in (1..7).step_by(2) {
            assert_eq!(coeffs[n], 0.0, "odd coefficient a{n} leaked in");
        }
        let coeffs = legendre_coefficients(0, 5, 0.0, 1.0);
        for n in (0..6).step_by(2) {
            assert_eq!(coeffs[n], 0.0, "even coefficient a{n} leaked in");
        }
    }

    #[test]
    #[should_panic(expected = "parity")]
    fn even_rank_rejects_an_odd_seed() {
        legendre_coefficients(0, 2, 0.0, 1.0);
    }

    #[test]
    #[should_panic(expected = "parity")]
    fn odd_rank_rejects_an_even_seed() {
        legendre_coefficients(0, 3, 1.0, 0.0);
    }

    #[test]
    #[should_panic(expected = "exactly one seed")]
    fn double_seeding_is_rejected() {
        legendre_coefficients(0, 2, 1.0, 1.0);
    }

    #[test]
    fn shape_vanishes_at_the_fixed_top_for_azimuthal_modes() {
        let coeffs = shell_coefficients(&aluminum_bell());
        for m0 in 1..=4 {
            let mode = BellMode::new(m0, 0, &coeffs).unwrap();
            assert_eq!(mode_shape(&mode, 0.0, 0.7), 0.0, "m0 = {m0}");
        }
    }

    #[test]
    fn axisymmetric_shape_ignores_azimuth() {
        let coeffs = shell_coefficients(&aluminum_bell());
        let mode = BellMode::new(0, 2, &coeffs).unwrap();
        let at = |phi: f64| mode_shape(&mode, 0.9, phi);
        assert_eq!(at(0.0), at(1.3));
        assert_eq!(at(0.0), at(5.1));
    }

    #[test]
    fn rim_value_of_the_axisymmetric_mode_is_the_seed() {
        // (m0=0, n0=2) has p(x) = 1 − 3x²; at θ = π/2, x = cos θ ≈ 0 so the
        // shape is p(0) = a0 = 1.
        let coeffs = shell_coefficients(&aluminum_bell());
        let mode = BellMode::new(0, 2, &coeffs).unwrap();
        assert_relative_eq!(
            mode_shape(&mode, std::f64::consts::FRAC_PI_2, 0.0),
            1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn mode_catalogue_is_consistent() {
        let coeffs = shell_coefficients(&aluminum_bell());
        let mode = BellMode::new(2, 0, &coeffs).unwrap();
        assert_eq!(mode.k, 2);
        assert_relative_eq!(mode.omega_cap, 6.0f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(
            mode.frequency_hz,
            mode_frequency(&coeffs, 2).unwrap(),
            max_relative = 1e-15
        );
        assert_eq!(mode.attenuation, coeffs.gamma_att);
        assert_eq!(mode.shape_coeffs, vec![1.0]);
    }

    #[test]
    fn series_at_one_terminates_at_quantized_separation_constants() {
        // Ω = 0 kills the recurrence on the spot: p ≡ 1.
        let flat = p_at_one(0, 0.0, 50);
        assert_eq!(flat.value, 1.0);
        assert!(!flat.saturated);

        // Ω² = 6 (k = 2) leaves the polynomial 1 − 3x², so the sum at
        // x = 1 is −2; Ω itself is irrational, so later terms are rounding
        // dust rather than exact zeros.
        let quantized = p_at_one(0, 6.0f64.sqrt(), 50);
        assert_abs_diff_eq!(quantized.value, -2.0, epsilon = 1e-9);
        assert!(!quantized.saturated);
    }

    #[test]
    fn series_scan_crosses_zero_but_not_at_the_quantized_points() {
        // Scan Ω over [0, 12]. The truncated sum swings sign several
        // times; note the terminating Ω = √6 sits at value −2, not at a
        // zero, so the scan's crossings do not mark the quantized modes.
        let mut crossings = 0;
        let mut last = p_at_one(0, 0.0, 60).value;
        let steps = 240;
        for i in 1..=steps {
            let omega = 12.0 * i as f64 / steps as f64;
            let point = p_at_one(0, omega, 60);
            assert!(!point.saturated, "saturated at omega = {omega}");
            if point.value.signum() != last.signum() {
                crossings += 1;
            }
            last = point.value;
        }
        assert!(crossings >= 3, "only {crossings} sign changes");
    }

    #[test]
    fn runaway_series_is_flagged() {
        // Ω = 40: a2 = −800, a4 ≈ 1.06e5, a6 ≈ −5.6e6, so the partial sum
        // through n = 6 is ≈ −5.5e6 and trips the flag.
        let wild = p_at_one(0, 40.0, 6);
        assert!(wild.saturated, "value {} should saturate", wild.value);
        // The flag reflects the returned sum, not the journey: by n = 100
        // the alternating terms have cancelled back to moderate size.
        assert!(!p_at_one(0, 40.0, 100).saturated);
    }

    #[test]
    fn single_mode_envelope_decays_exponentially() {
        let coeffs = ShellCoefficients {
            alpha_stiff: 1.0e5,
            gamma_att: 2.0,
        };
        // Pick the k whose frequency divides the sample rate so cosine
        // peaks land exactly on samples.
        let k = 1;
        let mut mode = BellMode::new(k, 0, &coeffs).unwrap();
        mode.frequency_hz = 100.0;
        let rate = 1000.0;
        let samples = synthesize_bell(&[(mode, 1.0)], 1.0, rate);
        assert_eq!(samples.len(), 1000);
        assert_eq!(samples[0], 1.0);

        // cos(2π·100·t) = 1 every 10 samples; there the signal IS the
        // envelope, and at t = 1/γ = 0.5 s it has fallen to e⁻¹.
        assert_relative_eq!(samples[500], (-1.0f64).exp(), max_relative = 1e-12);
        for peak in (10..1000).step_by(10) {
            let ratio = samples[peak] / samples[peak - 10];
            assert_relative_eq!(ratio, (-2.0 * 0.01f64).exp(), max_relative = 1e-9);
        }
    }

    #[test]
    fn synthesis_is_bounded_by_the_amplitude_budget() {
        let coeffs = shell_coefficients(&aluminum_bell());
        let modes: Vec<(BellMode, f64)> = rim_modes(&coeffs, &[2, 3, 4, 5])
            .unwrap()
            .into_iter()
            .zip([0.5, 0.25, -0.2, 0.05])
            .collect();
        let budget: f64 = modes.iter().map(|(_, a)| a.abs()).sum();
        let samples = synthesize_bell(&modes, 0.5, 44100.0);
        assert_eq!(samples[0], modes.iter().map(|(_, a)| a).sum::<f64>());
        for (i, &s) in samples.iter().enumerate() {
            assert!(
                s.abs() <= budget * (1.0 + 1e-12),
                "sample {i} = {s} exceeds the t = 0 budget {budget}"
            );
        }
    }

    #[test]
    fn empty_mode_list_synthesizes_silence() {
        let samples = synthesize_bell(&[], 0.25, 44100.0);
        assert_eq!(samples.len(), 11025);
        assert!(samples.iter().all(|&s| s == 0.0));
    }

    #[test]
    #[should_panic(expected = "aliases")]
    fn modes_above_nyquist_are_a_contract_violation() {
        let coeffs = shell_coefficients(&aluminum_bell());
        let mode = BellMode::new(5, 0, &coeffs).unwrap(); // ≈ 3462 Hz
        synthesize_bell(&[(mode, 1.0)], 0.1, 6000.0);
    }

    #[test]
    fn synthesized_mode_peaks_at_its_own_frequency() {
        let coeffs = shell_coefficients(&aluminum_bell());
        let mode = BellMode::new(2, 0, &coeffs).unwrap();
        let f = mode.frequency_hz;
        let samples = synthesize_bell(&[(mode, 1.0)], 1.0, 44100.0);
        let spectrum = spectral::fft_magnitude(&samples, 44100.0, 4096, 0);
        let peak_bin = spectrum
            .magnitudes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        let expected_bin = (f / spectrum.bin_hz).round() as usize;
        assert_eq!(peak_bin, expected_bin, "peak at {peak_bin}, mode at {f} Hz");
    }

    #[test]
    fn mode_table_lists_one_row_per_mode() {
        let coeffs = shell_coefficients(&aluminum_bell());
        let modes = rim_modes(&coeffs, &[2, 3]).unwrap();
        let csv = mode_table_csv(&modes);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m0,n0,k,frequency_hz,attenuation");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("2,0,2,"));
        assert!(lines[2].starts_with("3,0,3,"));
        // Attenuation column repeats the shell's γ.
        for line in &lines[1..] {
            assert!(line.ends_with(&format!("{:.8e}", coeffs.gamma_att)));
        }
    }
}
