use std::path::Path;

use spikeload_core::grid::{rank_results, score_grid_point, GridSpace};
use spikeload_core::snn::Arch;

use crate::config::{write_config_sidecar, RunConfig};
use crate::error::{CmdError, CmdResult};
use crate::formats::{self, GridResultFile, GridRow};
use crate::jobs::par_map;

/// Exhaustive search over the configured space (defaults to the published
/// grids), parallel across configurations when `--jobs > 1`.
pub fn run_grid_search(
    arch: &str,
    input: &Path,
    space: Option<&Path>,
    out: &Path,
    jobs: usize,
    config: Option<&Path>,
) -> CmdResult<()> {
    if space.is_some() && config.is_some() {
        return Err(CmdError::Config(
            "pass either --space or --config, not both".into(),
        ));
    }
    let mut cfg = RunConfig::load(space.or(config))?;
    let arch = super::parse_arch(arch)?;

    let defaults = match arch {
        Arch::Single => GridSpace::single_layer_default(),
        Arch::Hidden => GridSpace::hidden_default(),
    };
    let space = GridSpace {
        arch,
        taus: cfg.f64_list_or("grid.taus", &defaults.taus)?,
        etas: cfg.f64_list_or("grid.etas", &defaults.etas)?,
        epoch_counts: cfg.usize_list_or("grid.epochs", &defaults.epoch_counts)?,
        gammas: cfg.f64_list_or("grid.gammas", &defaults.gammas)?,
        betas: cfg.f64_list_or("grid.betas", &defaults.betas)?,
        fc1_means: cfg.f64_list_or("grid.fc1_means", &defaults.fc1_means)?,
        p_conns: cfg.f64_list_or("grid.p_conns", &defaults.p_conns)?,
        hidden_scales: cfg.usize_list_or("grid.hidden_scales", &defaults.hidden_scales)?,
    };
    // Published seed protocols: 12 seeds for the single layer, {0, 21, 42}
    // for the hidden models.
    let default_seeds: Vec<u64> = match arch {
        Arch::Single => (0..12).collect(),
        Arch::Hidden => vec![0, 21, 42],
    };
    let seeds = cfg.u64_list_or("grid.seeds", &default_seeds)?;
    let k = cfg.usize_or("snn.k_folds", 5)?;
    cfg.set("grid.taus", serde_json::json!(space.taus));
    cfg.set("grid.etas", serde_json::json!(space.etas));
    cfg.set("grid.epochs", serde_json::json!(space.epoch_counts));
    cfg.set("grid.gammas", serde_json::json!(space.gammas));
    cfg.set("grid.betas", serde_json::json!(space.betas));
    cfg.set("grid.fc1_means", serde_json::json!(space.fc1_means));
    cfg.set("grid.p_conns", serde_json::json!(space.p_conns));
    cfg.set("grid.hidden_scales", serde_json::json!(space.hidden_scales));
    cfg.set("grid.seeds", serde_json::json!(seeds));
    cfg.set_u64("snn.k_folds", k as u64);
    cfg.set_u64("jobs", jobs as u64);

    let ds = super::load_features(input)?;
    let points = space.points();
    if points.is_empty() {
        return Err(CmdError::Config("grid space is empty".into()));
    }
    println!(
        "searching {} configurations x {} seeds x {k} folds (jobs = {jobs})",
        points.len(),
        seeds.len()
    );

    let scored = par_map(jobs, points, |point| score_grid_point(&point, &ds, k, &seeds));
    let mut results = scored.into_iter().collect::<Result<Vec<_>, _>>()?;
    rank_results(&mut results);

    let rows: Vec<GridRow> = results
        .iter()
        .enumerate()
        .map(|(i, r)| GridRow {
            rank: i + 1,
            arch: match r.point.arch() {
                Arch::Single => "single".into(),
                Arch::Hidden => "hidden".into(),
            },
            tau: r.point.tau,
            eta: r.point.eta,
            epochs: r.point.epochs,
            gamma: r.point.gamma,
            beta: r.point.beta,
            fc1_mean: r.point.hidden.map(|h| h.fc1_mean),
            p_conn: r.point.hidden.map(|h| h.p_conn),
            hidden_scale: r.point.hidden.map(|h| h.hidden_scale),
            mean_accuracy: r.mean_accuracy,
            std_accuracy: r.std_accuracy,
            per_seed_accuracy: r.per_seed_accuracy.clone(),
        })
        .collect();

    for row in rows.iter().take(5) {
        println!(
            "rank {}: tau {} eta {} epochs {} gamma {} beta {}{} -> {:.4} +/- {:.4}",
            row.rank,
            row.tau,
            row.eta,
            row.epochs,
            row.gamma,
            row.beta,
            match (row.fc1_mean, row.p_conn, row.hidden_scale) {
                (Some(m), Some(p), Some(s)) => format!(" fc1_mean {m} p_conn {p} scale {s}x"),
                _ => String::new(),
            },
            row.mean_accuracy,
            row.std_accuracy
        );
    }

    if out.extension().is_some_and(|e| e == "csv") {
        let mut text = String::from(
            "rank,arch,tau,eta,epochs,gamma,beta,fc1_mean,p_conn,hidden_scale,mean_accuracy,std_accuracy,per_seed_accuracy\n",
        );
        for r in &rows {
            let per_seed: Vec<String> = r.per_seed_accuracy.iter().map(f64::to_string).collect();
            text.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.rank,
                r.arch,
                r.tau,
                r.eta,
                r.epochs,
                r.gamma,
                r.beta,
                r.fc1_mean.map(|v| v.to_string()).unwrap_or_default(),
                r.p_conn.map(|v| v.to_string()).unwrap_or_default(),
                r.hidden_scale.map(|v| v.to_string()).unwrap_or_default(),
                r.mean_accuracy,
                r.std_accuracy,
                per_seed.join(";")
            ));
        }
        formats::write_string(out, &text)?;
    } else {
        let file = GridResultFile {
            kind: "grid_search".into(),
            config: cfg.as_json(),
            k_folds: k,
            seeds: seeds.clone(),
            rows,
        };
        formats::write_json_pretty(out, &file)?;
    }
    write_config_sidecar(out, &cfg)?;
    Ok(())
}
