use std::path::Path;

use serde_json::Value;

use crate::error::{CmdError, CmdResult};
use crate::formats::{self, ReportRow};

/// Merge result files (train, baseline, emulate, quantize) into one table,
/// CSV plus a JSON mirror.
pub fn run_report(results: &[std::path::PathBuf], out: &Path) -> CmdResult<()> {
    let mut rows = Vec::new();
    for path in results {
        let text = formats::read_to_string(path)?;
        let value: Value = serde_json::from_str(&text)
            .map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))?;
        let kind = value
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| CmdError::Data(format!("{}: missing `kind` field", path.display())))?;
        let source = path.display().to_string();
        match kind {
            "train_cv" => {
                let arch = value.get("arch").and_then(Value::as_str).unwrap_or("?");
                rows.push(summary_row(&source, &format!("snn-{arch}"), &value, "mean", "std")?);
            }
            "baseline" => {
                let best_c = value.get("best_c").and_then(Value::as_f64).unwrap_or(f64::NAN);
                rows.push(summary_row(
                    &source,
                    &format!("logreg-C{best_c}"),
                    &value,
                    "best",
                    "best_std",
                )?);
            }
            "emulate" => {
                if value.get("mean").is_some_and(|m| !m.is_null()) {
                    rows.push(summary_row(&source, "emulated-int3", &value, "mean", "std")?);
                } else {
                    println!("note: {source} has no labels, skipping metrics row");
                }
            }
            "quantize" => {
                for (field, model) in [("float_metrics", "single-float"), ("int3_metrics", "single-int3")] {
                    if let Some(m) = value.get(field).filter(|m| !m.is_null()) {
                        rows.push(ReportRow {
                            source: source.clone(),
                            model: model.into(),
                            accuracy: num(m, "accuracy"),
                            accuracy_std: 0.0,
                            f1: num(m, "f1"),
                            f1_std: 0.0,
                            precision: num(m, "precision"),
                            precision_std: 0.0,
                            recall: num(m, "recall"),
                            recall_std: 0.0,
                        });
                    }
                }
            }
            other => {
                return Err(CmdError::Data(format!(
                    "{}: unsupported result kind `{other}`",
                    path.display()
                )))
            }
        }
    }

    let csv = formats::report_csv(&rows);
    formats::write_string(out, &csv)?;
    let mut json_path = out.as_os_str().to_owned();
    json_path.push(".json");
    formats::write_json_pretty(Path::new(&json_path), &rows)?;
    print!("{csv}");
    Ok(())
}

fn num(value: &Value, key: &str) -> f64 {
    value.get(key).and_then(Value::as_f64).unwrap_or(f64::NAN)
}

fn summary_row(
    source: &str,
    model: &str,
    value: &Value,
    mean_key: &str,
    std_key: &str,
) -> CmdResult<ReportRow> {
    let mean = value
        .get(mean_key)
        .ok_or_else(|| CmdError::Data(format!("{source}: missing `{mean_key}`")))?;
    let std = value
        .get(std_key)
        .ok_or_else(|| CmdError::Data(format!("{source}: missing `{std_key}`")))?;
    Ok(ReportRow {
        source: source.to_string(),
        model: model.to_string(),
        accuracy: num(mean, "accuracy"),
        accuracy_std: num(std, "accuracy"),
        f1: num(mean, "f1"),
        f1_std: num(std, "f1"),
        precision: num(mean, "precision"),
        precision_std: num(std, "precision"),
        recall: num(mean, "recall"),
        recall_std: num(std, "recall"),
    })
}
