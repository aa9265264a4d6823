//! Windowed population firing rates and the burst-based classification
//! rule used to read the emulated substrate's output.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Default analysis window, seconds.
pub const DEFAULT_WINDOW_S: f64 = 0.0025;

/// Thresholds driving the burst classifier. The published rule names the
/// four thresholds but not their values or the offset increment; the
/// defaults here are small relative to the hundreds-of-Hz rates the
/// 2.5 ms / 20-neuron formula produces, and every value is configurable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderThresholds {
    pub zero_hz: f64,
    pub diff_hz: f64,
    pub offset_hz: f64,
    pub offset_step_hz: f64,
    pub limit_hz: f64,
}

impl DecoderThresholds {
    pub fn validate(&self) -> Result<()> {
        if self.zero_hz < 0.0 || self.diff_hz < 0.0 {
            return Err(Error::InvalidParam {
                context: "zero and diff thresholds must be non-negative".into(),
            });
        }
        if !(self.offset_hz > 0.0) || !(self.offset_step_hz > 0.0) {
            return Err(Error::InvalidParam {
                context: "offset and offset step must be positive".into(),
            });
        }
        if !(self.limit_hz > self.offset_hz) {
            return Err(Error::InvalidParam {
                context: format!(
                    "limit ({}) must exceed offset ({})",
                    self.limit_hz, self.offset_hz
                ),
            });
        }
        Ok(())
    }
}

impl Default for DecoderThresholds {
    fn default() -> Self {
        DecoderThresholds {
            zero_hz: 1.0,
            diff_hz: 20.0,
            offset_hz: 10.0,
            offset_step_hz: 10.0,
            limit_hz: 100.0,
        }
    }
}

/// Per-window firing rates (Hz per neuron) for the two output populations.
#[derive(Clone, Debug, PartialEq)]
pub struct RateWindows {
    pub window_s: f64,
    pub n_neurons: usize,
    /// `rates[pop][window]`.
    pub rates: [Vec<f64>; 2],
}

impl RateWindows {
    pub fn n_windows(&self) -> usize {
        self.rates[0].len()
    }
}

/// Bin per-population spike times into fixed windows and convert counts to
/// rates: `count / (window_s * n_neurons)`.
///
/// Windows are half-open `[start, end)` with boundary spikes assigned to
/// the later window; the final window is closed so a spike at exactly
/// `trial_duration` still counts.
pub fn bin_rates(
    pop_spike_times: [&[f64]; 2],
    window_s: f64,
    n_neurons: usize,
    trial_duration: f64,
) -> Result<RateWindows> {
    if !(window_s > 0.0) || n_neurons == 0 || !(trial_duration > 0.0) {
        return Err(Error::InvalidParam {
            context: "window, neuron count, and duration must be positive".into(),
        });
    }
    let n_windows = libm::ceil(trial_duration / window_s) as usize;
    let mut rates = [vec![0.0f64; n_windows], vec![0.0f64; n_windows]];
    let per_spike = 1.0 / (window_s * n_neurons as f64);
    for (pop, times) in pop_spike_times.iter().enumerate() {
        for &t in *times {
            if !(0.0..=trial_duration).contains(&t) {
                return Err(Error::SpikeOutsideTrial {
                    t,
                    limit: trial_duration,
                });
            }
            let mut w = libm::floor(t / window_s) as usize;
            if w >= n_windows {
                w = n_windows - 1; // t == trial_duration
            }
            rates[pop][w] += per_spike;
        }
    }
    Ok(RateWindows {
        window_s,
        n_neurons,
        rates,
    })
}

/// Which branch of the burst rule produced the decision, and whether a
/// residual tie-break (deterministic class 0) fired.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BurstBranch {
    MaxRateDiff,
    BurstCount,
    OnlyActivePopulation,
    TotalSpikes,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurstDecision {
    pub class: u8,
    pub branch: BurstBranch,
    pub residual_tie: bool,
}

/// Burst-based classification over the rate windows:
///
/// 1. If both populations peak above `zero` and the peak difference is at
///    least `diff`, pick the population with the higher peak.
/// 2. Otherwise (both active, peaks close), count windows within `offset`
///    of each population's own peak; while the counts tie and the offset is
///    below `limit`, widen the offset by `offset_step` and recount; pick
///    the population with more burst windows.
/// 3. If only one population peaks above `zero`, pick it.
/// 4. Otherwise pick the population with more total spikes.
///
/// All residual ties resolve to class 0. Total over finite inputs.
pub fn classify_burst(rates: &RateWindows, th: &DecoderThresholds) -> u8 {
    classify_burst_detailed(rates, th).class
}

pub fn classify_burst_detailed(rates: &RateWindows, th: &DecoderThresholds) -> BurstDecision {
    let max0 = max_rate(&rates.rates[0]);
    let max1 = max_rate(&rates.rates[1]);

    if max0 > th.zero_hz && max1 > th.zero_hz {
        if libm::fabs(max0 - max1) >= th.diff_hz {
            return BurstDecision {
                class: u8::from(max1 > max0),
                branch: BurstBranch::MaxRateDiff,
                residual_tie: max0 == max1,
            };
        }
        let mut offset = th.offset_hz;
        let mut c0 = burst_windows(&rates.rates[0], max0 - offset);
        let mut c1 = burst_windows(&rates.rates[1], max1 - offset);
        while c0 == c1 && offset < th.limit_hz {
            offset += th.offset_step_hz;
            c0 = burst_windows(&rates.rates[0], max0 - offset);
            c1 = burst_windows(&rates.rates[1], max1 - offset);
        }
        BurstDecision {
            class: u8::from(c1 > c0),
            branch: BurstBranch::BurstCount,
            residual_tie: c0 == c1,
        }
    } else if max0 > th.zero_hz || max1 > th.zero_hz {
        BurstDecision {
            class: u8::from(max1 > th.zero_hz),
            branch: BurstBranch::OnlyActivePopulation,
            residual_tie: false,
        }
    } else {
        let t0: f64 = rates.rates[0].iter().sum();
        let t1: f64 = rates.rates[1].iter().sum();
        BurstDecision {
            class: u8::from(t1 > t0),
            branch: BurstBranch::TotalSpikes,
            residual_tie: t0 == t1,
        }
    }
}

fn max_rate(row: &[f64]) -> f64 {
    row.iter().fold(0.0f64, |acc, &r| if r > acc { r } else { acc })
}

fn burst_windows(row: &[f64], threshold: f64) -> usize {
    row.iter().filter(|&&r| r >= threshold).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn windows(rates0: Vec<f64>, rates1: Vec<f64>) -> RateWindows {
        RateWindows {
            window_s: DEFAULT_WINDOW_S,
            n_neurons: 20,
            rates: [rates0, rates1],
        }
    }

    fn thresholds(zero: f64, diff: f64) -> DecoderThresholds {
        DecoderThresholds {
            zero_hz: zero,
            diff_hz: diff,
            ..DecoderThresholds::default()
        }
    }

    #[test]
    fn rate_formula_exact() {
        // 10 spikes from one population inside one 2.5 ms window.
        let times: Vec<f64> = (0..10).map(|i| 0.0001 * i as f64).collect();
        let rw = bin_rates([&times, &[]], 0.0025, 20, 0.16).unwrap();
        assert_eq!(rw.n_windows(), 64);
        assert_eq!(rw.rates[0][0], 10.0 / (0.0025 * 20.0));
        assert_eq!(rw.rates[0][0], 200.0);
        assert!(rw.rates[0][1..].iter().all(|&r| r == 0.0));
        assert!(rw.rates[1].iter().all(|&r| r == 0.0));
    }

    #[test]
    fn empty_input_gives_zero_matrix() {
        let rw = bin_rates([&[], &[]], 0.0025, 20, 0.16).unwrap();
        assert!(rw.rates.iter().flatten().all(|&r| r == 0.0));
    }

    #[test]
    fn boundary_spikes() {
        // A spike exactly on a window edge belongs to the later window; a
        // spike at trial end lands in the final closed window.
        let rw = bin_rates([&[0.0025, 0.16], &[]], 0.0025, 20, 0.16).unwrap();
        assert_eq!(rw.rates[0][0], 0.0);
        assert_eq!(rw.rates[0][1], 20.0);
        assert_eq!(rw.rates[0][63], 20.0);
    }

    #[test]
    fn out_of_window_spike_is_an_error() {
        assert!(matches!(
            bin_rates([&[0.2], &[]], 0.0025, 20, 0.16),
            Err(Error::SpikeOutsideTrial { .. })
        ));
        assert!(matches!(
            bin_rates([&[], &[-0.01]], 0.0025, 20, 0.16),
            Err(Error::SpikeOutsideTrial { .. })
        ));
    }

    #[test]
    fn branch_max_rate_difference() {
        let rw = windows(vec![200.0, 0.0, 50.0, 0.0], vec![120.0, 110.0, 0.0, 0.0]);
        let d = classify_burst_detailed(&rw, &thresholds(20.0, 50.0));
        assert_eq!(d.class, 0);
        assert_eq!(d.branch, BurstBranch::MaxRateDiff);
        assert!(!d.residual_tie);
    }

    #[test]
    fn branch_only_active_population() {
        let rw = windows(vec![0.0, 0.0], vec![40.0, 0.0]);
        let d = classify_burst_detailed(&rw, &thresholds(20.0, 50.0));
        assert_eq!(d.class, 1);
        assert_eq!(d.branch, BurstBranch::OnlyActivePopulation);
    }

    #[test]
    fn branch_total_spikes() {
        // No window clears the zero threshold (single spikes at 20 Hz with
        // zero = 20), so the fall-back compares totals: 3 vs 7 spikes.
        let mut r0 = vec![0.0; 64];
        let mut r1 = vec![0.0; 64];
        r0[..3].fill(20.0);
        r1[10..17].fill(20.0);
        let d = classify_burst_detailed(&windows(r0, r1), &thresholds(20.0, 50.0));
        assert_eq!(d.class, 1);
        assert_eq!(d.branch, BurstBranch::TotalSpikes);
    }

    #[test]
    fn branch_burst_count_with_offset_widening() {
        // Peaks within diff of each other; population 1 sustains more
        // windows near its peak.
        let r0 = vec![100.0, 10.0, 10.0, 10.0];
        let r1 = vec![95.0, 95.0, 95.0, 10.0];
        let d = classify_burst_detailed(&windows(r0, r1), &thresholds(1.0, 50.0));
        assert_eq!(d.branch, BurstBranch::BurstCount);
        assert_eq!(d.class, 1);
    }

    #[test]
    fn all_silent_ties_to_class_zero() {
        let d = classify_burst_detailed(&windows(vec![0.0; 4], vec![0.0; 4]), &DecoderThresholds::default());
        assert_eq!(d.class, 0);
        assert!(d.residual_tie);
    }

    #[test]
    fn determinism() {
        let rw = windows(vec![30.0, 40.0, 10.0, 0.0], vec![35.0, 20.0, 25.0, 5.0]);
        let th = DecoderThresholds::default();
        let first = classify_burst(&rw, &th);
        for _ in 0..10 {
            assert_eq!(classify_burst(&rw, &th), first);
        }
    }

    #[test]
    fn threshold_validation() {
        assert!(DecoderThresholds::default().validate().is_ok());
        let bad = DecoderThresholds {
            limit_hz: 5.0,
            ..DecoderThresholds::default()
        };
        assert!(bad.validate().is_err());
    }
}
