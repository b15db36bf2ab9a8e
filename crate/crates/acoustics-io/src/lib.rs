//! From solver output to sound: radiates a string's motion to a listener as
//! acoustic pressure, normalizes and quantizes the trace to 16-bit PCM, and
//! reads and writes mono WAV files.
//!
//! Radiation treats every grid node as a monopole source at distance
//! `R_n = sqrt(standoff^2 + (x_n - x_ref)^2)` from the listener:
//!
//! ```text
//! p(t) = sum_n  rho0 * c0 / (4 pi R_n) * v_n(t - R_n / c0)
//! ```
//!
//! with the node velocity `v_n` estimated by central differences (one-sided
//! at the first and last step). Retarded times fall between samples, so each
//! contribution is split linearly between the two adjacent output samples;
//! that is exactly linear interpolation of the delayed velocity, and it
//! avoids the zipper artifacts of nearest-sample rounding.

mod wav;

pub use wav::{parse_wav, read_wav, write_wav, AudioBuffer, WavError};

use model_core::{Diverged, DisplacementSource, ListenerGeometry, WaveHistory};

/// Acoustic pressure at the listener, one sample per solver step.
#[derive(Debug, Clone)]
pub struct PressureTrace {
    /// Pressure in pascals.
    pub samples: Vec<f64>,
    /// Sample spacing, equal to the solver step.
    pub dt_s: f64,
}

impl PressureTrace {
    /// Exact sample rate implied by the step size.
    pub fn sample_rate_hz(&self) -> f64 {
        1.0 / self.dt_s
    }
}

/// Nominal WAV sample rate for a solver step `dt_s` decimated by `factor`:
/// `round(1 / (dt_s * factor))`.
pub fn sample_rate_for(dt_s: f64, factor: usize) -> u32 {
    assert!(dt_s > 0.0 && factor > 0);
    (1.0 / (dt_s * factor as f64)).round() as u32
}

/// Per-node scatter weights for the retarded, 1/R-attenuated sum.
struct NodeTap {
    /// Whole-sample part of the delay.
    shift: usize,
    /// Weight applied at `step + shift`.
    w0: f64,
    /// Weight applied at `step + shift + 1`.
    w1: f64,
}

fn listener_taps(geometry: &ListenerGeometry, node_count: usize, dx_m: f64, dt_s: f64) -> Vec<NodeTap> {
    let x_ref = geometry.reference_index as f64 * dx_m;
    let mut warned = false;
    (0..node_count)
        .map(|i| {
            let r = f64::hypot(geometry.standoff_m, i as f64 * dx_m - x_ref);
            let delay = r / (geometry.sound_speed * dt_s);
            if delay < 1.0 && !warned {
                warned = true;
                eprintln!(
                    "note: listener is under one sample of travel time away \
                     (delay {delay:.3} samples); the sub-sample delay is \
                     interpolated against the at-rest state before the run"
                );
            }
            let shift = delay.floor() as usize;
            let frac = delay - shift as f64;
            let coeff = geometry.air_density * geometry.sound_speed / (4.0 * std::f64::consts::PI * r);
            NodeTap {
                shift,
                w0: coeff * (1.0 - frac),
                w1: coeff * frac,
            }
        })
        .collect()
}

/// Radiates a streaming solver run to the listener without storing the full
/// displacement history; only three rows are alive at a time.
///
/// The trace has exactly `step_count` samples. Contributions whose retarded
/// arrival falls past the end of the run are dropped: the recording stops
/// when the simulation does.
pub fn radiated_pressure_streaming<S: DisplacementSource>(
    source: &mut S,
    geometry: &ListenerGeometry,
) -> Result<PressureTrace, Diverged> {
    let nodes = source.node_count();
    let steps = source.step_count();
    let dt = source.dt_s();
    geometry
        .validate(nodes)
        .expect("listener geometry fits the grid");
    assert!(steps >= 2, "need at least two steps for a velocity estimate");

    let taps = listener_taps(geometry, nodes, source.dx_m(), dt);
    let mut pressure = vec![0.0; steps];
    let mut velocity = vec![0.0; nodes];

    let scatter = |step: usize, velocity: &[f64], pressure: &mut Vec<f64>| {
        for (tap, &v) in taps.iter().zip(velocity) {
            let j0 = step + tap.shift;
            if j0 < steps {
                pressure[j0] += tap.w0 * v;
            }
            let j1 = j0 + 1;
            if j1 < steps {
                pressure[j1] += tap.w1 * v;
            }
        }
    };

    // Ring of the last three rows; row k's central difference needs k-1 and
    // k+1, so row k+1's arrival triggers the scatter for step k.
    let mut ring: [Vec<f64>; 3] = [vec![0.0; nodes], vec![0.0; nodes], vec![0.0; nodes]];
    let mut seen = 0usize;
    while let Some(row) = source.next_row()? {
        ring[seen % 3].copy_from_slice(row);
        if seen == 1 {
            // One-sided start: v_0 = (u_1 - u_0) / dt.
            for i in 0..nodes {
                velocity[i] = (ring[1][i] - ring[0][i]) / dt;
            }
            scatter(0, &velocity, &mut pressure);
        } else if seen >= 2 {
            let newest = &ring[seen % 3];
            let oldest = &ring[(seen - 2) % 3];
            for i in 0..nodes {
                velocity[i] = (newest[i] - oldest[i]) / (2.0 * dt);
            }
            scatter(seen - 1, &velocity, &mut pressure);
        }
        seen += 1;
    }
    assert_eq!(seen, steps, "source ended early");

    // One-sided end: v_last = (u_last - u_{last-1}) / dt.
    let last = &ring[(steps - 1) % 3];
    let before = &ring[(steps - 2) % 3];
    for i in 0..nodes {
        velocity[i] = (last[i] - before[i]) / dt;
    }
    scatter(steps - 1, &velocity, &mut pressure);

    Ok(PressureTrace {
        samples: pressure,
        dt_s: dt,
    })
}

/// Radiates a stored history to the listener.
pub fn radiated_pressure(history: &WaveHistory, geometry: &ListenerGeometry) -> PressureTrace {
    let mut rows = history.source();
    radiated_pressure_streaming(&mut rows, geometry).expect("stored history cannot diverge")
}

/// Number of whole samples before anything can reach the listener:
/// `floor((standoff / c0) / dt)`. Useful for placing analysis windows after
/// the onset.
pub fn onset_delay_samples(geometry: &ListenerGeometry, dt_s: f64) -> usize {
    (geometry.standoff_m / (geometry.sound_speed * dt_s)).floor() as usize
}

/// The trace was identically zero, so there is no scale to normalize to.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("signal is silent: every sample is zero, nothing to normalize")]
pub struct SilentSignal;

/// Scales samples so the largest magnitude is exactly 1.
pub fn normalize(samples: &[f64]) -> Result<Vec<f64>, SilentSignal> {
    let max = samples.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    assert!(max.is_finite(), "non-finite sample in trace");
    if max == 0.0 {
        return Err(SilentSignal);
    }
    Ok(samples.iter().map(|&x| x / max).collect())
}

/// Quantizes normalized samples to 16-bit PCM as `floor(A * 32767)`, clamped
/// to the signed 16-bit range. Inputs must lie in [-1, 1].
pub fn quantize_pcm16(normalized: &[f64]) -> Vec<i16> {
    normalized
        .iter()
        .map(|&a| {
            assert!((-1.0..=1.0).contains(&a), "sample {a} outside [-1, 1]");
            ((a * 32767.0).floor() as i32).clamp(-32768, 32767) as i16
        })
        .collect()
}

/// Averages non-overlapping blocks of `factor` samples, dropping any partial
/// block at the end. Used to bring a 100 kHz simulation down to an audio
/// rate; the averaging acts as a crude anti-alias filter.
pub fn decimate_mean(samples: &[f64], factor: usize) -> Vec<f64> {
    assert!(factor > 0, "decimation factor must be at least 1");
    if factor == 1 {
        return samples.to_vec();
    }
    samples
        .chunks_exact(factor)
        .map(|block| block.iter().sum::<f64>() / factor as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn geometry(standoff: f64, reference: usize) -> ListenerGeometry {
        ListenerGeometry {
            standoff_m: standoff,
            reference_index: reference,
            air_density: 1.204,
            sound_speed: 343.0,
        }
    }

    fn history_from_rows(rows: &[Vec<f64>], dt: f64, dx: f64) -> WaveHistory {
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        WaveHistory::from_data(rows[0].len(), rows.len(), dt, dx, data)
    }

    /// Direct gather-formulation oracle: for every output sample, look up
    /// the linearly interpolated retarded velocity of every node.
    fn gather_oracle(history: &WaveHistory, geometry: &ListenerGeometry) -> Vec<f64> {
        let nodes = history.node_count();
        let steps = history.step_count();
        let dt = history.dt_s();
        let dx = history.dx_m();
        let mut velocity = vec![vec![0.0; nodes]; steps];
        for i in 0..nodes {
            velocity[0][i] = (history.value(1, i) - history.value(0, i)) / dt;
            velocity[steps - 1][i] =
                (history.value(steps - 1, i) - history.value(steps - 2, i)) / dt;
            for k in 1..steps - 1 {
                velocity[k][i] = (history.value(k + 1, i) - history.value(k - 1, i)) / (2.0 * dt);
            }
        }
        let x_ref = geometry.reference_index as f64 * dx;
        let mut pressure = vec![0.0; steps];
        for (k, p) in pressure.iter_mut().enumerate() {
            for i in 0..nodes {
                let r = f64::hypot(geometry.standoff_m, i as f64 * dx - x_ref);
                let delay = r / (geometry.sound_speed * dt);
                let shift = delay.floor() as usize;
                let frac = delay - shift as f64;
                let v_at = |idx: isize| -> f64 {
                    if idx < 0 {
                        0.0
                    } else {
                        velocity[idx as usize][i]
                    }
                };
                let k = k as isize;
                let retarded =
                    (1.0 - frac) * v_at(k - shift as isize) + frac * v_at(k - shift as isize - 1);
                *p += geometry.air_density * geometry.sound_speed
                    / (4.0 * std::f64::consts::PI * r)
                    * retarded;
            }
        }
        pressure
    }

    #[test]
    fn matches_the_direct_gather_formulation() {
        // Awkwardly spread delays: fractional parts cover (0, 1).
        let nodes = 5;
        let steps = 60;
        let dt = 1.0e-4;
        let dx = 0.2;
        let rows: Vec<Vec<f64>> = (0..steps)
            .map(|k| {
                (0..nodes)
                    .map(|i| 1e-4 * ((0.37 * k as f64 + 1.3 * i as f64).sin()))
                    .collect()
            })
            .collect();
        let history = history_from_rows(&rows, dt, dx);
        let geometry = geometry(0.5, 2);
        let trace = radiated_pressure(&history, &geometry);
        let oracle = gather_oracle(&history, &geometry);
        let scale = oracle.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        assert!(scale > 0.0);
        for (k, (got, want)) in trace.samples.iter().zip(&oracle).enumerate() {
            assert!(
                (got - want).abs() <= 1e-12 * scale,
                "sample {k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn constant_history_radiates_nothing() {
        let rows = vec![vec![1e-3, 2e-3, -1e-3]; 40];
        let history = history_from_rows(&rows, 1e-4, 0.1);
        let trace = radiated_pressure(&history, &geometry(1.0, 1));
        assert!(trace.samples.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn single_node_tone_has_the_closed_form_amplitude() {
        // One oscillating node: |p| peaks at rho0 c0 omega u0 / (4 pi R),
        // up to the central-difference factor sin(w dt)/(w dt) ~ 1 - 7e-6.
        let freq = 100.0;
        let dt = 1.0e-5;
        let u0 = 1.0e-3;
        let steps = 2000; // two periods
        let omega = 2.0 * std::f64::consts::PI * freq;
        let rows: Vec<Vec<f64>> = (0..steps)
            .map(|k| vec![u0 * (omega * k as f64 * dt).sin()])
            .collect();
        let history = history_from_rows(&rows, dt, 0.1);
        let listener = geometry(1.0, 0);
        let trace = radiated_pressure(&history, &listener);
        // Skip the delayed onset and the one-sided tail.
        let delay = onset_delay_samples(&listener, dt);
        let peak = trace.samples[delay + 2..steps - 2]
            .iter()
            .fold(0.0f64, |a, &p| a.max(p.abs()));
        let expected = 1.204 * 343.0 * omega * u0 / (4.0 * std::f64::consts::PI * 1.0);
        assert_relative_eq!(peak, expected, max_relative = 1e-3);
    }

    #[test]
    fn onset_respects_the_travel_time() {
        // The string is released at step 0 (rows 0 and 1 equal), so the
        // first nonzero velocity row is step 1 and nothing can arrive before
        // the standoff travel time on top of that.
        let mut config = model_core::presets::sweep_reference();
        config.step_count = 600;
        let history = string_fdm::simulate_fdm(&config).unwrap();
        let listener = ListenerGeometry::above_middle(config.node_count);
        let trace = radiated_pressure(&history, &listener);
        let first = trace
            .samples
            .iter()
            .position(|&p| p != 0.0)
            .expect("something must arrive");
        let floor_delay = onset_delay_samples(&listener, config.dt_s);
        assert!(
            first >= floor_delay,
            "pressure at {first}, travel floor {floor_delay}"
        );

        // Exactly which sample the onset lands on is not worth pinning: the
        // release velocity vanishes on the straight pluck segments (their
        // second difference is algebraically zero), so only rounding dust
        // radiates at the reference node's delay. The first substantial
        // arrival is the kink's, retarded by its own distance.
        let kink = config.pluck_position_m / history.dx_m();
        let expected = [kink.floor(), kink.ceil()]
            .iter()
            .map(|&node| {
                let d = (node - listener.reference_index as f64).abs() * history.dx_m();
                let r = listener.standoff_m.hypot(d);
                1 + (r / (listener.sound_speed * config.dt_s)).floor() as usize
            })
            .min()
            .unwrap();
        let max = trace.samples.iter().fold(0.0f64, |m, &p| m.max(p.abs()));
        let substantial = trace
            .samples
            .iter()
            .position(|&p| p.abs() > 1e-6 * max)
            .unwrap();
        assert_eq!(substantial, expected);
    }

    #[test]
    fn doubling_the_history_doubles_the_pressure_exactly() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|k| (0..4).map(|i| 1e-4 * ((k * 7 + i * 3) % 11) as f64).collect())
            .collect();
        let doubled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|&u| 2.0 * u).collect())
            .collect();
        let listener = geometry(0.8, 2);
        let base = radiated_pressure(&history_from_rows(&rows, 1e-4, 0.15), &listener);
        let twice = radiated_pressure(&history_from_rows(&doubled, 1e-4, 0.15), &listener);
        for (a, b) in base.samples.iter().zip(&twice.samples) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn sub_sample_listener_still_radiates() {
        // Delay under one sample: weights interpolate against rest.
        let rows = vec![
            vec![0.0],
            vec![0.0],
            vec![1e-3],
            vec![1e-3],
            vec![1e-3],
            vec![1e-3],
        ];
        let history = history_from_rows(&rows, 1e-3, 0.1);
        let listener = geometry(1e-4, 0);
        let trace = radiated_pressure(&history, &listener);
        assert!(trace.samples.iter().any(|&p| p != 0.0));
        // Shift 0: sample 1 sees its own velocity almost undiluted.
        let coeff = 1.204 * 343.0 / (4.0 * std::f64::consts::PI * 1e-4);
        let v1 = (1e-3 - 0.0) / (2.0 * 1e-3);
        assert_relative_eq!(trace.samples[1], coeff * v1, max_relative = 1e-2);
    }

    #[test]
    fn streaming_matches_dense() {
        let mut config = model_core::presets::sweep_reference();
        config.step_count = 400;
        let listener = ListenerGeometry::above_middle(config.node_count);
        let history = string_fdm::simulate_fdm(&config).unwrap();
        let dense = radiated_pressure(&history, &listener);
        let mut stepper = string_fdm::FdmStepper::new(&config);
        let streamed = radiated_pressure_streaming(&mut stepper, &listener).unwrap();
        assert_eq!(dense.samples, streamed.samples);
    }

    #[test]
    fn normalize_scales_peak_to_exactly_one() {
        let samples = vec![0.5, -2.0, 1.0, 0.0];
        let normalized = normalize(&samples).unwrap();
        assert_eq!(normalized, vec![0.25, -1.0, 0.5, 0.0]);
        let peak = normalized.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        assert_eq!(peak, 1.0);
    }

    #[test]
    fn normalize_rejects_silence() {
        assert_eq!(normalize(&[0.0, 0.0, -0.0]), Err(SilentSignal));
    }

    #[test]
    fn quantization_pins_the_contract_values() {
        let out = quantize_pcm16(&[1.0, 0.0, 0.5, -1.0, -0.25]);
        assert_eq!(out, vec![32767, 0, 16383, -32767, -8192]);
    }

    #[test]
    #[should_panic(expected = "outside [-1, 1]")]
    fn quantization_rejects_out_of_range() {
        quantize_pcm16(&[1.5]);
    }

    #[test]
    fn full_scale_after_normalize_and_quantize() {
        let samples = vec![1e-7, -3.4e-6, 2.2e-6, 9e-8];
        let pcm = quantize_pcm16(&normalize(&samples).unwrap());
        assert!(pcm.iter().any(|&s| s.unsigned_abs() >= 32000));
    }

    #[test]
    fn decimation_averages_whole_blocks_and_drops_the_tail() {
        assert_eq!(decimate_mean(&[1.0, 3.0, 5.0, 7.0], 2), vec![2.0, 6.0]);
        assert_eq!(decimate_mean(&[1.0, 3.0, 5.0], 2), vec![2.0]);
        let v = vec![4.0, 2.0];
        assert_eq!(decimate_mean(&v, 1), v);
        assert_eq!(sample_rate_for(1e-5, 1), 100_000);
        assert_eq!(sample_rate_for(1e-5, 2), 50_000);
        assert_eq!(sample_rate_for(9.65e-6, 1), 103_627);
    }
}
