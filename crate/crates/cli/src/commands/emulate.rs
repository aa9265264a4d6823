use std::collections::BTreeMap;
use std::path::Path;

use spikeload_core::decode::{bin_rates, classify_burst};
use spikeload_core::eval::{compute_metrics, summarize, Metrics};
use spikeload_core::hwemu::{build_network, run_trial, MismatchConfig, TrialOutput};

use crate::config::{write_config_sidecar, RunConfig};
use crate::error::{CmdError, CmdResult};
use crate::formats::{self, EmulateRepeat, EmulateResultFile, MetricsJson, SummaryJson};
use crate::jobs::par_map;

/// Replay encoded trials through freshly built mismatched networks, one
/// network per repetition (seed = mismatch_seed + repeat index), and
/// decode population bursts into predictions. Metrics require `--labels`.
#[allow(clippy::too_many_arguments)]
pub fn run_emulate(
    qmodel: &Path,
    events_path: &Path,
    labels: Option<&Path>,
    mismatch_cv: Option<f64>,
    trials_flag: Option<usize>,
    out: &Path,
    out_spikes: Option<&Path>,
    dump_network: Option<&Path>,
    jobs: usize,
    config: Option<&Path>,
) -> CmdResult<()> {
    let mut cfg = RunConfig::load(config)?;
    let setup = super::resolve_emulator(&mut cfg, mismatch_cv, trials_flag)?;
    cfg.set_u64("jobs", jobs as u64);

    let qw = formats::read_quant(qmodel)?.to_weights();
    let trials = formats::read_event_file(events_path)?;
    if trials.is_empty() {
        return Err(CmdError::Data(format!("{}: no trials", events_path.display())));
    }
    let trial_ids: Vec<String> = trials.iter().map(|(id, _)| id.clone()).collect();

    let label_map: Option<BTreeMap<String, u8>> = match labels {
        None => None,
        Some(path) => {
            let ds = super::load_features(path)?;
            Some(ds.records.iter().map(|r| (r.trial_id.clone(), r.label)).collect())
        }
    };
    let y_true: Option<Vec<u8>> = match &label_map {
        None => None,
        Some(map) => Some(
            trial_ids
                .iter()
                .map(|id| {
                    map.get(id).copied().ok_or_else(|| {
                        CmdError::Data(format!("trial `{id}` missing from the labels CSV"))
                    })
                })
                .collect::<CmdResult<Vec<u8>>>()?,
        ),
    };

    let seeds: Vec<u64> = (0..setup.n_trials as u64)
        .map(|i| setup.mismatch.seed.wrapping_add(i))
        .collect();

    let repeats: Vec<CmdResult<(Vec<u8>, Vec<TrialOutput>)>> = par_map(jobs, seeds.clone(), |seed| {
        let mismatch = MismatchConfig { seed, ..setup.mismatch };
        let net = build_network(&qw, &mismatch, &setup.build)?;
        let mut predictions = Vec::with_capacity(trials.len());
        let mut outputs = Vec::with_capacity(trials.len());
        for (_, events) in &trials {
            let output = run_trial(&net, events, &setup.run)?;
            let t0 = output.population_times(0, setup.run.trial_duration);
            let t1 = output.population_times(1, setup.run.trial_duration);
            let rates = bin_rates([&t0, &t1], setup.window_s, net.n_per_pop, setup.run.trial_duration)?;
            predictions.push(classify_burst(&rates, &setup.thresholds));
            outputs.push(output);
        }
        Ok((predictions, outputs))
    });
    let repeats = repeats.into_iter().collect::<CmdResult<Vec<_>>>()?;

    let mut repeat_entries = Vec::with_capacity(repeats.len());
    let mut per_repeat_metrics: Vec<Metrics> = Vec::new();
    for (i, (predictions, _)) in repeats.iter().enumerate() {
        let metrics = match &y_true {
            None => None,
            Some(y) => {
                let m = compute_metrics(y, predictions)?;
                println!(
                    "repeat {i} (mismatch seed {}): accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4}",
                    seeds[i], m.accuracy, m.precision, m.recall, m.f1
                );
                per_repeat_metrics.push(m);
                Some(MetricsJson::from(&m))
            }
        };
        repeat_entries.push(EmulateRepeat {
            seed: seeds[i],
            predictions: predictions.clone(),
            metrics,
        });
    }
    let (mean, std) = if per_repeat_metrics.is_empty() {
        (None, None)
    } else {
        let (mean, std) = summarize(&per_repeat_metrics);
        println!("mean accuracy {:.4} +/- {:.4}", mean.accuracy, std.accuracy);
        (Some(SummaryJson::from(&mean)), Some(SummaryJson::from(&std)))
    };

    if let Some(path) = out_spikes {
        // Repeat-major: one line per (repeat, trial), in order.
        let mut text = String::new();
        for (_, outputs) in &repeats {
            for output in outputs {
                text.push_str(&formats::trial_output_line(output));
                text.push('\n');
            }
        }
        formats::write_string(path, &text)?;
    }
    if let Some(path) = dump_network {
        let dumps: Vec<formats::NetworkDump> = seeds
            .iter()
            .map(|&seed| {
                let mismatch = MismatchConfig { seed, ..setup.mismatch };
                build_network(&qw, &mismatch, &setup.build).map(|net| formats::dump_network(&net, seed))
            })
            .collect::<Result<_, _>>()?;
        formats::write_json_pretty(path, &dumps)?;
    }

    let result = EmulateResultFile {
        kind: "emulate".into(),
        config: cfg.as_json(),
        trial_ids,
        repeats: repeat_entries,
        mean,
        std,
    };
    formats::write_json_pretty(out, &result)?;
    write_config_sidecar(out, &cfg)?;
    println!(
        "emulated {} trials x {} repeats -> {}",
        trials.len(),
        setup.n_trials,
        out.display()
    );
    Ok(())
}
