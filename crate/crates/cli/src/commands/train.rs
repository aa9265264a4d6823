use std::path::Path;

use spikeload_core::data::{stratified_kfold, zscore_apply, zscore_fit};
use spikeload_core::eval::{compute_metrics, summarize, FoldModel, Metrics};
use spikeload_core::grid::fit_grid_point;
use spikeload_core::snn::SnnClassifier;

use crate::config::{write_config_sidecar, RunConfig};
use crate::error::{CmdError, CmdResult};
use crate::formats::{self, MetricsJson, ModelFile, SummaryJson, TrainResultFile};

/// Cross-validate one configuration and persist the best fold's model
/// (the fold selected for deployment) plus the per-fold metrics.
pub fn run_train(
    arch: &str,
    input: &Path,
    config: Option<&Path>,
    out_model: &Path,
) -> CmdResult<()> {
    let mut cfg = RunConfig::load(config)?;
    let arch = super::parse_arch(arch)?;
    let (point, seed, k) = super::resolve_snn_point(&mut cfg, arch, None)?;

    let parsed = formats::load_feature_csv(input)?;
    let ds = parsed.dataset;
    println!(
        "loaded {} records from {} ({} rows dropped)",
        ds.len(),
        input.display(),
        parsed.dropped_rows
    );

    let folds = stratified_kfold(&ds, k, seed)?;
    let mut per_fold: Vec<Metrics> = Vec::with_capacity(k);
    let mut best: Option<(usize, f64, SnnClassifier)> = None;
    for (fold_idx, fold) in folds.iter().enumerate() {
        let train = ds.subset(&fold.train);
        let test = ds.subset(&fold.test);
        let norm = zscore_fit(&train)?;
        let train_n = zscore_apply(&train, &norm);
        let test_n = zscore_apply(&test, &norm);
        let clf = fit_grid_point(&train_n, &point, seed)?;
        let y_true = test_n.labels();
        let y_pred: Vec<u8> = test_n.records.iter().map(|r| clf.predict(&r.features())).collect();
        let metrics = compute_metrics(&y_true, &y_pred)?;
        println!(
            "fold {fold_idx}: accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4}",
            metrics.accuracy, metrics.precision, metrics.recall, metrics.f1
        );
        let better = match &best {
            None => true,
            Some((_, acc, _)) => metrics.accuracy > *acc,
        };
        if better {
            best = Some((fold_idx, metrics.accuracy, clf));
        }
        per_fold.push(metrics);
    }
    let (mean, std) = summarize(&per_fold);
    let (best_fold, _, best_clf) = best.ok_or_else(|| CmdError::Numeric("no folds evaluated".into()))?;
    println!(
        "mean accuracy {:.4} +/- {:.4}; deploying fold {best_fold}",
        mean.accuracy, std.accuracy
    );

    let model_file = ModelFile::from_model(&best_clf.model, point.tau, seed);
    formats::write_json_pretty(out_model, &model_file)?;

    let result = TrainResultFile {
        kind: "train_cv".into(),
        config: cfg.as_json(),
        arch: model_file.arch.clone(),
        per_fold: per_fold.iter().map(MetricsJson::from).collect(),
        mean: SummaryJson::from(&mean),
        std: SummaryJson::from(&std),
        seed,
        best_fold,
        dropped_rows: parsed.dropped_rows,
    };
    let mut metrics_path = out_model.as_os_str().to_owned();
    metrics_path.push(".metrics.json");
    formats::write_json_pretty(Path::new(&metrics_path), &result)?;
    write_config_sidecar(out_model, &cfg)?;
    Ok(())
}
