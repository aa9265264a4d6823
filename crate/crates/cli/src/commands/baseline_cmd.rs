use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use spikeload_core::baseline::{train_logreg, C_GRID};
use spikeload_core::eval::run_cv;

use crate::config::{write_config_sidecar, RunConfig};
use crate::error::{CmdError, CmdResult};
use crate::formats::{self, BaselineEntry, BaselineResultFile, MetricsJson, SummaryJson};

/// Logistic-regression reference: grid search over the inverse
/// regularization strength with stratified k-fold CV.
pub fn run_baseline(input: &Path, config: Option<&Path>, out: &Path) -> CmdResult<()> {
    let mut cfg = RunConfig::load(config)?;
    let c_grid = cfg.f64_list_or("baseline.c_grid", &C_GRID)?;
    let max_iter = cfg.usize_or("baseline.max_iter", 5000)?;
    let tol = cfg.f64_or("baseline.tol", 1e-8)?;
    let k = cfg.usize_or("baseline.k_folds", 5)?;
    let seed = cfg.u64_or("baseline.seed", 0)?;
    cfg.set("baseline.c_grid", serde_json::json!(c_grid));
    cfg.set_u64("baseline.max_iter", max_iter as u64);
    cfg.set_f64("baseline.tol", tol);
    cfg.set_u64("baseline.k_folds", k as u64);
    cfg.set_u64("baseline.seed", seed);

    let ds = super::load_features(input)?;

    let mut entries = Vec::with_capacity(c_grid.len());
    for &c in &c_grid {
        let converged = AtomicUsize::new(0);
        let cv = run_cv(
            |train, _| {
                let fit = train_logreg(train, c, max_iter, tol)?;
                if fit.converged {
                    converged.fetch_add(1, Ordering::Relaxed);
                }
                Ok(fit.model)
            },
            &ds,
            k,
            seed,
            &format!("logreg C={c}"),
        )?;
        println!(
            "C {c:>7}: accuracy {:.4} +/- {:.4} (f1 {:.4}, {}/{k} folds converged)",
            cv.mean.accuracy,
            cv.std.accuracy,
            cv.mean.f1,
            converged.load(Ordering::Relaxed)
        );
        entries.push(BaselineEntry {
            c,
            per_fold: cv.per_fold.iter().map(MetricsJson::from).collect(),
            mean: SummaryJson::from(&cv.mean),
            std: SummaryJson::from(&cv.std),
            converged_folds: converged.load(Ordering::Relaxed),
        });
    }

    // Ties keep the first (most regularized) grid entry.
    let best = entries
        .iter()
        .fold(None::<&BaselineEntry>, |best, e| match best {
            Some(b) if e.mean.accuracy <= b.mean.accuracy => Some(b),
            _ => Some(e),
        })
        .ok_or_else(|| CmdError::Config("baseline.c_grid is empty".into()))?
        .clone();
    println!("best C = {} with accuracy {:.4}", best.c, best.mean.accuracy);

    let result = BaselineResultFile {
        kind: "baseline".into(),
        config: cfg.as_json(),
        per_c: entries,
        best_c: best.c,
        best: best.mean,
        best_std: best.std,
    };
    formats::write_json_pretty(out, &result)?;
    write_config_sidecar(out, &cfg)?;
    Ok(())
}
