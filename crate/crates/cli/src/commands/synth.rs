use std::path::Path;

use spikeload_core::data::generate_synthetic;

use crate::config::{write_config_sidecar, RunConfig};
use crate::error::CmdResult;
use crate::formats;

pub fn run_synth_data(
    n: Option<u64>,
    separation: Option<f64>,
    seed: Option<u64>,
    out: &Path,
    config: Option<&Path>,
) -> CmdResult<()> {
    let mut cfg = RunConfig::load(config)?;
    let n = match n {
        Some(v) => v,
        None => cfg.u64_or("data.n", 200)?,
    };
    let separation = match separation {
        Some(v) => v,
        None => cfg.f64_or("data.separation", 3.0)?,
    };
    let seed = match seed {
        Some(v) => v,
        None => cfg.u64_or("data.seed", 0)?,
    };
    cfg.set_u64("data.n", n);
    cfg.set_f64("data.separation", separation);
    cfg.set_u64("data.seed", seed);

    let ds = generate_synthetic(n as usize, separation, seed)?;
    formats::write_feature_csv(out, &ds)?;
    write_config_sidecar(out, &cfg)?;
    let counts = ds.class_counts();
    println!(
        "wrote {} records ({} easy / {} hard) to {}",
        ds.len(),
        counts[0],
        counts[1],
        out.display()
    );
    Ok(())
}
