//! One module per subcommand, plus shared parameter-resolution helpers.

mod baseline_cmd;
mod emulate;
mod encode;
mod grid_cmd;
mod quantize;
mod report;
mod synth;
mod train;

pub use baseline_cmd::run_baseline;
pub use emulate::run_emulate;
pub use encode::run_encode;
pub use grid_cmd::run_grid_search;
pub use quantize::run_quantize;
pub use report::run_report;
pub use synth::run_synth_data;
pub use train::run_train;

use std::path::Path;

use spikeload_core::data::{Dataset, ParsedCsv};
use spikeload_core::decode::DecoderThresholds;
use spikeload_core::grid::{GridPoint, HiddenPoint};
use spikeload_core::hwemu::{BuildParams, EmuRunParams, MismatchConfig};
use spikeload_core::snn::Arch;

use crate::config::RunConfig;
use crate::error::{CmdError, CmdResult};
use crate::formats;

/// Load a feature CSV, reporting the dropped-row counter on stdout.
pub(crate) fn load_features(path: &Path) -> CmdResult<Dataset> {
    let ParsedCsv { dataset, dropped_rows } = formats::load_feature_csv(path)?;
    println!(
        "loaded {} records from {} ({} rows dropped)",
        dataset.len(),
        path.display(),
        dropped_rows
    );
    Ok(dataset)
}

pub(crate) fn parse_arch(arch: &str) -> CmdResult<Arch> {
    match arch {
        "single" => Ok(Arch::Single),
        "hidden" => Ok(Arch::Hidden),
        other => Err(CmdError::Config(format!(
            "arch must be `single` or `hidden`, got `{other}`"
        ))),
    }
}

/// Resolve the SNN training configuration (defaults < config file < flags)
/// and record the resolved values back into `cfg` for the sidecar.
pub(crate) fn resolve_snn_point(
    cfg: &mut RunConfig,
    arch: Arch,
    tau_flag: Option<f64>,
) -> CmdResult<(GridPoint, u64, usize)> {
    let tau = match tau_flag {
        Some(t) => t,
        None => cfg.f64_or("snn.tau", 31.0)?,
    };
    let eta = cfg.f64_or("snn.eta", 0.01)?;
    let epochs = cfg.usize_or("snn.epochs", 25)?;
    let gamma = cfg.f64_or("snn.gamma", 0.01)?;
    let beta = cfg.f64_or("snn.beta", 0.9)?;
    let seed = cfg.u64_or("snn.seed", 31)?;
    let k = cfg.usize_or("snn.k_folds", 5)?;
    let hidden = match arch {
        Arch::Single => None,
        Arch::Hidden => Some(HiddenPoint {
            fc1_mean: cfg.f64_or("snn.fc1_mean", 0.5)?,
            p_conn: cfg.f64_or("snn.p_conn", 0.5)?,
            hidden_scale: cfg.usize_or("snn.hidden_scale", 10)?,
        }),
    };
    let point = GridPoint {
        tau,
        eta,
        epochs,
        gamma,
        beta,
        hidden,
    };

    cfg.set_str("snn.arch", if matches!(arch, Arch::Single) { "single" } else { "hidden" });
    cfg.set_f64("snn.tau", tau);
    cfg.set_f64("snn.eta", eta);
    cfg.set_u64("snn.epochs", epochs as u64);
    cfg.set_f64("snn.gamma", gamma);
    cfg.set_f64("snn.beta", beta);
    cfg.set_u64("snn.seed", seed);
    cfg.set_u64("snn.k_folds", k as u64);
    if let Some(h) = &hidden {
        cfg.set_f64("snn.fc1_mean", h.fc1_mean);
        cfg.set_f64("snn.p_conn", h.p_conn);
        cfg.set_u64("snn.hidden_scale", h.hidden_scale as u64);
    }
    Ok((point, seed, k))
}

pub(crate) struct EmulatorSetup {
    pub build: BuildParams,
    pub run: EmuRunParams,
    pub mismatch: MismatchConfig,
    pub n_trials: usize,
    pub thresholds: DecoderThresholds,
    pub window_s: f64,
}

/// Resolve emulator, mismatch, and decoder parameters, recording the
/// resolved values for the sidecar.
pub(crate) fn resolve_emulator(
    cfg: &mut RunConfig,
    mismatch_cv_flag: Option<f64>,
    trials_flag: Option<usize>,
) -> CmdResult<EmulatorSetup> {
    let defaults = BuildParams::default();
    let build = BuildParams {
        base_efficacy: cfg.f64_or("emulator.base_efficacy", defaults.base_efficacy)?,
        gabab_efficacy: cfg.f64_or("emulator.gabab_efficacy", defaults.gabab_efficacy)?,
        tau_m: cfg.f64_or("emulator.tau_m_s", defaults.tau_m)?,
        tau_ampa: cfg.f64_or("emulator.tau_ampa_s", defaults.tau_ampa)?,
        tau_gabaa: cfg.f64_or("emulator.tau_gabaa_s", defaults.tau_gabaa)?,
        tau_gabab: cfg.f64_or("emulator.tau_gabab_s", defaults.tau_gabab)?,
        v_th: cfg.f64_or("emulator.v_th", defaults.v_th)?,
        refractory_s: cfg.f64_or("emulator.refractory_s", defaults.refractory_s)?,
    };
    let run_defaults = EmuRunParams::default();
    let run = EmuRunParams {
        trial_duration: cfg.f64_or("emulator.trial_duration_s", run_defaults.trial_duration)?,
        pre_buffer: cfg.f64_or("emulator.pre_buffer_s", run_defaults.pre_buffer)?,
        post_buffer: cfg.f64_or("emulator.post_buffer_s", run_defaults.post_buffer)?,
        sim_dt: cfg.f64_or("emulator.sim_dt_s", run_defaults.sim_dt)?,
    };
    let (cv_weight, cv_tau) = match mismatch_cv_flag {
        Some(cv) => (cv, cv),
        None => (
            cfg.f64_or("emulator.mismatch_cv_weight", 0.2)?,
            cfg.f64_or("emulator.mismatch_cv_tau", 0.2)?,
        ),
    };
    let mismatch = MismatchConfig {
        cv_weight,
        cv_tau,
        seed: cfg.u64_or("emulator.mismatch_seed", 0)?,
    };
    let n_trials = match trials_flag {
        Some(n) => n,
        None => cfg.usize_or("emulator.trials", 5)?,
    };
    let th_defaults = DecoderThresholds::default();
    let thresholds = DecoderThresholds {
        zero_hz: cfg.f64_or("decoder.zero_hz", th_defaults.zero_hz)?,
        diff_hz: cfg.f64_or("decoder.diff_hz", th_defaults.diff_hz)?,
        offset_hz: cfg.f64_or("decoder.offset_hz", th_defaults.offset_hz)?,
        offset_step_hz: cfg.f64_or("decoder.offset_step_hz", th_defaults.offset_step_hz)?,
        limit_hz: cfg.f64_or("decoder.limit_hz", th_defaults.limit_hz)?,
    };
    thresholds.validate()?;
    let window_s = cfg.f64_or("decoder.window_s", spikeload_core::decode::DEFAULT_WINDOW_S)?;

    cfg.set_f64("emulator.base_efficacy", build.base_efficacy);
    cfg.set_f64("emulator.gabab_efficacy", build.gabab_efficacy);
    cfg.set_f64("emulator.tau_m_s", build.tau_m);
    cfg.set_f64("emulator.tau_ampa_s", build.tau_ampa);
    cfg.set_f64("emulator.tau_gabaa_s", build.tau_gabaa);
    cfg.set_f64("emulator.tau_gabab_s", build.tau_gabab);
    cfg.set_f64("emulator.v_th", build.v_th);
    cfg.set_f64("emulator.refractory_s", build.refractory_s);
    cfg.set_f64("emulator.trial_duration_s", run.trial_duration);
    cfg.set_f64("emulator.pre_buffer_s", run.pre_buffer);
    cfg.set_f64("emulator.post_buffer_s", run.post_buffer);
    cfg.set_f64("emulator.sim_dt_s", run.sim_dt);
    cfg.set_f64("emulator.mismatch_cv_weight", mismatch.cv_weight);
    cfg.set_f64("emulator.mismatch_cv_tau", mismatch.cv_tau);
    cfg.set_u64("emulator.mismatch_seed", mismatch.seed);
    cfg.set_u64("emulator.trials", n_trials as u64);
    cfg.set_f64("decoder.zero_hz", thresholds.zero_hz);
    cfg.set_f64("decoder.diff_hz", thresholds.diff_hz);
    cfg.set_f64("decoder.offset_hz", thresholds.offset_hz);
    cfg.set_f64("decoder.offset_step_hz", thresholds.offset_step_hz);
    cfg.set_f64("decoder.limit_hz", thresholds.limit_hz);
    cfg.set_f64("decoder.window_s", window_s);

    Ok(EmulatorSetup {
        build,
        run,
        mismatch,
        n_trials,
        thresholds,
        window_s,
    })
}
