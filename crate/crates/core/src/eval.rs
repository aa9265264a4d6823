//! Metrics, cross-validated evaluation, and repeated-inference statistics
//! for the emulated substrate.

use alloc::string::String;
use alloc::vec::Vec;

use crate::data::{stratified_kfold, zscore_apply, zscore_fit, Dataset};
use crate::decode::{bin_rates, classify_burst, DecoderThresholds};
use crate::hwemu::{build_network, run_trial, BuildParams, ChipNetwork, EmuRunParams, MismatchConfig};
use crate::encoder::SpikeEventList;
use crate::quant::QuantizedWeights;
use crate::{Error, Result};

/// Binary classification metrics with class 1 ("hard") as the positive
/// class. `degenerate` flags any zero-division case that was reported as 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// `confusion[actual][predicted]`.
    pub confusion: [[u32; 2]; 2],
    pub degenerate: bool,
}

pub fn compute_metrics(y_true: &[u8], y_pred: &[u8]) -> Result<Metrics> {
    if y_true.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let mut confusion = [[0u32; 2]; 2];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        if t > 1 || p > 1 {
            return Err(Error::LabelOutOfRange {
                row: 0,
                value: t.max(p) as f64,
            });
        }
        confusion[t as usize][p as usize] += 1;
    }
    let tp = confusion[1][1] as f64;
    let fp = confusion[0][1] as f64;
    let fn_ = confusion[1][0] as f64;
    let tn = confusion[0][0] as f64;
    let n = tp + fp + fn_ + tn;

    let mut degenerate = false;
    let mut ratio = |num: f64, den: f64| -> f64 {
        if den == 0.0 {
            degenerate = true;
            0.0
        } else {
            num / den
        }
    };
    let accuracy = (tp + tn) / n;
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = ratio(2.0 * precision * recall, precision + recall);
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        f1,
        confusion,
        degenerate,
    })
}

/// Mean or spread of the four headline metrics across folds or repeats.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricSummary {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn summarize(per_run: &[Metrics]) -> (MetricSummary, MetricSummary) {
    let n = per_run.len() as f64;
    let mut mean = MetricSummary::default();
    for m in per_run {
        mean.accuracy += m.accuracy;
        mean.precision += m.precision;
        mean.recall += m.recall;
        mean.f1 += m.f1;
    }
    mean.accuracy /= n;
    mean.precision /= n;
    mean.recall /= n;
    mean.f1 /= n;
    let mut var = MetricSummary::default();
    for m in per_run {
        var.accuracy += (m.accuracy - mean.accuracy) * (m.accuracy - mean.accuracy);
        var.precision += (m.precision - mean.precision) * (m.precision - mean.precision);
        var.recall += (m.recall - mean.recall) * (m.recall - mean.recall);
        var.f1 += (m.f1 - mean.f1) * (m.f1 - mean.f1);
    }
    let std = MetricSummary {
        accuracy: libm::sqrt(var.accuracy / n),
        precision: libm::sqrt(var.precision / n),
        recall: libm::sqrt(var.recall / n),
        f1: libm::sqrt(var.f1 / n),
    };
    (mean, std)
}

/// A trained per-fold model: maps a normalized feature vector to a class.
pub trait FoldModel {
    fn predict(&self, features: &[f64; 5]) -> u8;
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvResult {
    pub per_fold: Vec<Metrics>,
    pub mean: MetricSummary,
    pub std: MetricSummary,
    pub seed: u64,
    /// Echo of the evaluated configuration, for result files.
    pub config: String,
}

/// Stratified k-fold evaluation. Per fold: fit z-score statistics on the
/// training split only, normalize both splits with them, hand the
/// normalized training split to the factory, and score the returned model
/// on the held-out split.
pub fn run_cv<M, F>(factory: F, ds: &Dataset, k: usize, seed: u64, config: &str) -> Result<CvResult>
where
    M: FoldModel,
    F: Fn(&Dataset, u64) -> Result<M>,
{
    let folds = stratified_kfold(ds, k, seed)?;
    let mut per_fold = Vec::with_capacity(k);
    for fold in &folds {
        let train = ds.subset(&fold.train);
        let test = ds.subset(&fold.test);
        let params = zscore_fit(&train)?;
        let train_n = zscore_apply(&train, &params);
        let test_n = zscore_apply(&test, &params);
        let model = factory(&train_n, seed)?;
        let y_true: Vec<u8> = test_n.labels();
        let y_pred: Vec<u8> = test_n.records.iter().map(|r| model.predict(&r.features())).collect();
        per_fold.push(compute_metrics(&y_true, &y_pred)?);
    }
    let (mean, std) = summarize(&per_fold);
    Ok(CvResult {
        per_fold,
        mean,
        std,
        seed,
        config: String::from(config),
    })
}

/// Decode one emulator trial: restrict output spikes to the stimulus
/// window, bin them, and apply the burst rule.
pub fn emulate_predict(
    net: &ChipNetwork,
    events: &SpikeEventList,
    run: &EmuRunParams,
    window_s: f64,
    thresholds: &DecoderThresholds,
) -> Result<u8> {
    let out = run_trial(net, events, run)?;
    let t0 = out.population_times(0, run.trial_duration);
    let t1 = out.population_times(1, run.trial_duration);
    let rates = bin_rates([&t0, &t1], window_s, net.n_per_pop, run.trial_duration)?;
    Ok(classify_burst(&rates, thresholds))
}

/// Configuration for repeated emulated inference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HwEvalConfig {
    pub n_trials: usize,
    pub mismatch: MismatchConfig,
    pub build: BuildParams,
    pub run: EmuRunParams,
    pub thresholds: DecoderThresholds,
    pub window_s: f64,
}

impl Default for HwEvalConfig {
    fn default() -> Self {
        HwEvalConfig {
            n_trials: 5,
            mismatch: MismatchConfig::default(),
            build: BuildParams::default(),
            run: EmuRunParams::default(),
            thresholds: DecoderThresholds::default(),
            window_s: crate::decode::DEFAULT_WINDOW_S,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HwEvalResult {
    pub per_trial: Vec<Metrics>,
    pub mean: MetricSummary,
    pub std: MetricSummary,
    /// Mismatch seed used by each repetition.
    pub seeds: Vec<u64>,
}

/// Repeated inference on the emulated substrate: for each repetition the
/// network is rebuilt with a fresh mismatch seed (base seed + index) and
/// every encoded trial is replayed and decoded.
pub fn hw_eval(
    qw: &QuantizedWeights,
    trials: &[(SpikeEventList, u8)],
    cfg: &HwEvalConfig,
) -> Result<HwEvalResult> {
    if trials.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if cfg.n_trials == 0 {
        return Err(Error::InvalidParam {
            context: "n_trials must be >= 1".into(),
        });
    }
    cfg.thresholds.validate()?;
    let seeds: Vec<u64> = (0..cfg.n_trials as u64).map(|i| cfg.mismatch.seed.wrapping_add(i)).collect();
    let mut per_trial = Vec::with_capacity(cfg.n_trials);
    for &seed in &seeds {
        let mismatch = MismatchConfig { seed, ..cfg.mismatch };
        let net = build_network(qw, &mismatch, &cfg.build)?;
        let mut y_true = Vec::with_capacity(trials.len());
        let mut y_pred = Vec::with_capacity(trials.len());
        for (events, label) in trials {
            y_pred.push(emulate_predict(&net, events, &cfg.run, cfg.window_s, &cfg.thresholds)?);
            y_true.push(*label);
        }
        per_trial.push(compute_metrics(&y_true, &y_pred)?);
    }
    let (mean, std) = summarize(&per_trial);
    Ok(HwEvalResult {
        per_trial,
        mean,
        std,
        seeds,
    })
}
