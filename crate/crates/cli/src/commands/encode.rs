use std::path::Path;

use spikeload_core::data::{zscore_apply, zscore_fit};
use spikeload_core::encoder::{completeness, encode, raster_to_events, LifEncoderParams};

use crate::config::{write_config_sidecar, RunConfig};
use crate::error::CmdResult;
use crate::formats::{self, CompletenessEntry, CompletenessReportFile, NormFile};

/// Encode a feature CSV into the spike-event file plus a completeness
/// report. By default the features are z-scored against the input file
/// itself; pass `--no-normalize` when the CSV is already normalized.
pub fn run_encode(
    input: &Path,
    tau: Option<f64>,
    out: &Path,
    no_normalize: bool,
    config: Option<&Path>,
) -> CmdResult<()> {
    let mut cfg = RunConfig::load(config)?;
    let tau = match tau {
        Some(t) => t,
        None => cfg.f64_or("encoder.tau", 31.0)?,
    };
    let normalize = if no_normalize {
        false
    } else {
        cfg.bool_or("encoder.normalize", true)?
    };
    cfg.set_f64("encoder.tau", tau);
    cfg.set_bool("encoder.normalize", normalize);

    let params = LifEncoderParams::with_tau(tau);
    params.validate()?;

    let ds = super::load_features(input)?;
    let ds = if normalize {
        let norm = zscore_fit(&ds)?;
        let mut norm_path = out.as_os_str().to_owned();
        norm_path.push(".norm.json");
        formats::write_json_pretty(Path::new(&norm_path), &NormFile::from(&norm))?;
        zscore_apply(&ds, &norm)
    } else {
        ds
    };

    let mut trials = Vec::with_capacity(ds.len());
    let mut entries = Vec::with_capacity(ds.len());
    for r in &ds.records {
        let raster = encode(&r.features(), &params);
        let report = completeness(&raster);
        entries.push(CompletenessEntry {
            trial_id: r.trial_id.clone(),
            across_units_per_step: report.across_units_per_step,
            per_unit_per_step: report.per_unit_per_step,
            per_unit_any: report.per_unit_any,
            any_spike: report.any_spike,
        });
        trials.push((r.trial_id.clone(), raster_to_events(&raster)));
    }
    formats::write_event_file(out, &trials)?;

    let report = CompletenessReportFile {
        kind: "completeness".into(),
        config: cfg.as_json(),
        n_trials: entries.len(),
        n_complete_across_units: entries.iter().filter(|e| e.across_units_per_step).count(),
        n_complete_per_unit: entries.iter().filter(|e| e.per_unit_per_step).count(),
        n_with_all_units_active: entries.iter().filter(|e| e.per_unit_any).count(),
        n_with_any_spike: entries.iter().filter(|e| e.any_spike).count(),
        trials: entries,
    };
    let mut report_path = out.as_os_str().to_owned();
    report_path.push(".completeness.json");
    formats::write_json_pretty(Path::new(&report_path), &report)?;
    write_config_sidecar(out, &cfg)?;

    println!(
        "encoded {} trials at tau {} -> {} ({} complete across units, {} with all units active)",
        report.n_trials,
        tau,
        out.display(),
        report.n_complete_across_units,
        report.n_with_all_units_active
    );
    Ok(())
}
