//! Spectral measurement of simulated audio: one-sided FFT magnitudes,
//! harmonic peak picking with a local noise gate, and a small periodicity
//! detector for error-versus-parameter curves.
//!
//! All analysis uses a rectangular window. That keeps bin magnitudes exactly
//! the Dirichlet-kernel response of each sinusoid, which the tests can pin,
//! at the cost of the usual sidelobe leakage; the peak picker's noise gate is
//! computed per search window so leakage from a loud neighbor does not
//! silence a real peak, and a missing harmonic is still reported as missing.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// One-sided magnitude spectrum of a single analysis window.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Unnormalized DFT magnitudes for bins `0 ..= window_size / 2`.
    pub magnitudes: Vec<f64>,
    /// Frequency step between bins: `sample_rate / window_size`.
    pub bin_hz: f64,
    /// Number of samples transformed.
    pub window_size: usize,
    /// Analysis window applied before the transform.
    pub window_kind: &'static str,
}

impl Spectrum {
    pub fn bin_count(&self) -> usize {
        self.magnitudes.len()
    }

    /// Center frequency of bin `k`.
    pub fn frequency_of_bin(&self, k: usize) -> f64 {
        k as f64 * self.bin_hz
    }

    /// Highest representable frequency, `sample_rate / 2`.
    pub fn nyquist_hz(&self) -> f64 {
        self.bin_hz * (self.window_size as f64) / 2.0
    }
}

/// Transforms `window_size` samples starting at `offset` and returns the
/// one-sided magnitude spectrum (`window_size / 2 + 1` bins).
///
/// The window must fit: `offset + window_size <= samples.len()`. Asking for
/// a window longer than the signal is a caller bug, not a measurement, so it
/// panics rather than returning a padded spectrum.
pub fn fft_magnitude(
    samples: &[f64],
    sample_rate_hz: f64,
    window_size: usize,
    offset: usize,
) -> Spectrum {
    assert!(window_size >= 2, "window of {window_size} samples");
    assert!(sample_rate_hz > 0.0, "sample rate {sample_rate_hz}");
    assert!(
        offset + window_size <= samples.len(),
        "window [{offset}, {}) exceeds the {}-sample signal",
        offset + window_size,
        samples.len()
    );
    let mut buffer: Vec<Complex<f64>> = samples[offset..offset + window_size]
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .collect();
    FftPlanner::new()
        .plan_fft_forward(window_size)
        .process(&mut buffer);
    let magnitudes = buffer[..window_size / 2 + 1]
        .iter()
        .map(|z| z.norm())
        .collect();
    Spectrum {
        magnitudes,
        bin_hz: sample_rate_hz / window_size as f64,
        window_size,
        window_kind: "rectangular",
    }
}

/// How a detected peak is converted to a frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakMode {
    /// Frequency of the peak bin itself. Quantized to the bin grid, which is
    /// exactly what a quantization-artifact study wants.
    RawBin,
    /// Parabolic interpolation through the peak bin and its neighbors,
    /// resolving frequency to a fraction of a bin.
    ParabolicInterpolation,
}

/// A detected spectral peak: its frequency reading and the magnitude of the
/// peak bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicPeak {
    pub frequency_hz: f64,
    pub magnitude: f64,
}

/// Minimum number of floor bins for the noise gate to be meaningful.
const FLOOR_BINS_MIN: usize = 8;

/// Measures the first `harmonic_count` harmonics of `fundamental_hz`.
///
/// Harmonic `n` is searched for in the band `n * f1 ± 0.35 * f1` (35% of the
/// harmonic spacing, so neighboring search bands never overlap). The
/// candidate is the loudest bin in the band that is a strict local maximum.
///
/// Presence is decided against a noise floor of ten times the median
/// magnitude of the band's bins, excluding the candidate's main lobe
/// (candidate ± 3 bins). The exclusion matters: a rectangular window smears
/// a half-bin-offset tone so badly that its own skirt holds the band median
/// above a tenth of the peak, and a floor computed over the whole band would
/// reject tones that are plainly there. With the lobe removed, a genuine
/// tone clears the floor at any bin offset, while a band containing nothing
/// but leakage from tones outside it stays well under ten times its own
/// level, so a truly missing harmonic is still reported missing.
///
/// When fewer than eight bins remain for the floor estimate (coarse spectra,
/// where the whole band spans a handful of bins), no meaningful floor
/// exists and the loudest strict local maximum is reported ungated.
///
/// Absent or out-of-band harmonics yield `None`; entry `i` of the result is
/// harmonic `i + 1`.
pub fn harmonic_peaks(
    spectrum: &Spectrum,
    fundamental_hz: f64,
    harmonic_count: usize,
    mode: PeakMode,
) -> Vec<Option<HarmonicPeak>> {
    assert!(fundamental_hz > 0.0, "fundamental {fundamental_hz} Hz");
    let bins = spectrum.bin_count();
    (1..=harmonic_count)
        .map(|n| {
            let center = n as f64 * fundamental_hz;
            let half_width = 0.35 * fundamental_hz;
            // Strict local maxima need both neighbors, so bins 0 and the
            // last bin can never host a peak.
            let lo = (((center - half_width) / spectrum.bin_hz).ceil() as usize).max(1);
            let hi_f = (center + half_width) / spectrum.bin_hz;
            if hi_f < lo as f64 || bins < 3 {
                return None;
            }
            let hi = (hi_f.floor() as usize).min(bins - 2);
            if hi < lo {
                return None;
            }
            let mut best: Option<(usize, f64)> = None;
            for k in lo..=hi {
                let mag = spectrum.magnitudes[k];
                let strict_max =
                    mag > spectrum.magnitudes[k - 1] && mag > spectrum.magnitudes[k + 1];
                if strict_max && best.is_none_or(|(_, m)| mag > m) {
                    best = Some((k, mag));
                }
            }
            let (k, mag) = best?;
            let floor_bins: Vec<f64> = (lo..=hi)
                .filter(|&j| j + 3 < k || j > k + 3)
                .map(|j| spectrum.magnitudes[j])
                .collect();
            if floor_bins.len() >= FLOOR_BINS_MIN && mag <= 10.0 * median(&floor_bins) {
                return None;
            }
            Some(HarmonicPeak {
                frequency_hz: peak_frequency(spectrum, k, mode),
                magnitude: mag,
            })
        })
        .collect()
}

fn peak_frequency(spectrum: &Spectrum, k: usize, mode: PeakMode) -> f64 {
    match mode {
        PeakMode::RawBin => spectrum.frequency_of_bin(k),
        PeakMode::ParabolicInterpolation => {
            let alpha = spectrum.magnitudes[k - 1];
            let beta = spectrum.magnitudes[k];
            let gamma = spectrum.magnitudes[k + 1];
            let denom = alpha - 2.0 * beta + gamma;
            let delta = if denom == 0.0 {
                0.0
            } else {
                (0.5 * (alpha - gamma) / denom).clamp(-0.5, 0.5)
            };
            (k as f64 + delta) * spectrum.bin_hz
        }
    }
}

fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite magnitudes"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Relative frequency error of a measured peak against the expected value.
/// A missing peak counts as a full miss: 1.0.
pub fn relative_error(measured_hz: Option<f64>, expected_hz: f64) -> f64 {
    assert!(expected_hz > 0.0, "expected {expected_hz} Hz");
    match measured_hz {
        Some(f) => (f - expected_hz).abs() / expected_hz,
        None => 1.0,
    }
}

/// Returns a copy of `samples` with its mean removed, so the DC bin does not
/// dwarf the harmonics of a one-sided (always positive) pressure trace.
pub fn zero_mean(samples: &[f64]) -> Vec<f64> {
    if samples.is_empty() {
        return Vec::new();
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.iter().map(|&x| x - mean).collect()
}

/// Detects a dominant periodicity in an error-versus-parameter curve.
///
/// `parameter_values` must be uniformly spaced and strictly monotone (it is
/// the sweep grid). The errors are linearly detrended, transformed with a
/// direct DFT, and the strongest component `k` in `1 ..= N/2` is kept only
/// if it rises above twice the median component magnitude; otherwise the
/// curve is judged aperiodic and the result is `None`. The returned period
/// is in parameter units: `N * spacing / k`.
pub fn period_estimate(parameter_values: &[f64], errors: &[f64]) -> Option<f64> {
    let n = parameter_values.len();
    assert_eq!(n, errors.len(), "parameter/error length mismatch");
    assert!(n >= 8, "need at least 8 sweep points, got {n}");
    let spacing = parameter_values[1] - parameter_values[0];
    assert!(spacing != 0.0, "zero parameter spacing");
    for w in parameter_values.windows(2) {
        let d = w[1] - w[0];
        assert!(
            (d - spacing).abs() <= 1e-9 * spacing.abs(),
            "sweep grid is not uniform: spacing {d} vs {spacing}"
        );
    }

    // Least-squares line through (index, error), subtracted off so a slow
    // drift does not masquerade as a long period.
    let nf = n as f64;
    let mean_i = (nf - 1.0) / 2.0;
    let mean_y = errors.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (i, &y) in errors.iter().enumerate() {
        let di = i as f64 - mean_i;
        cov += di * (y - mean_y);
        var += di * di;
    }
    let slope = cov / var;
    let detrended: Vec<f64> = errors
        .iter()
        .enumerate()
        .map(|(i, &y)| y - mean_y - slope * (i as f64 - mean_i))
        .collect();

    // Direct DFT; sweeps are a few dozen points, so O(N^2) is irrelevant.
    let half = n / 2;
    let mut magnitudes = Vec::with_capacity(half);
    for k in 1..=half {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, &y) in detrended.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (k * i) as f64 / nf;
            re += y * phase.cos();
            im += y * phase.sin();
        }
        magnitudes.push((re * re + im * im).sqrt());
    }
    let (best_k, best_mag) = magnitudes
        .iter()
        .enumerate()
        .map(|(i, &m)| (i + 1, m))
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite magnitudes"))?;
    if best_mag <= 0.0 || best_mag < 2.0 * median(&magnitudes) {
        return None;
    }
    Some(nf * spacing.abs() / best_k as f64)
}
