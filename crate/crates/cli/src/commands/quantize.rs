use std::path::Path;

use spikeload_core::data::{zscore_apply, zscore_fit};
use spikeload_core::encoder::{encode, LifEncoderParams, SpikeRaster};
use spikeload_core::eval::{compute_metrics, FoldModel};
use spikeload_core::quant::{evaluate_quantized, finetune_quantized, quantize_int3};
use spikeload_core::snn::{SnnClassifier, SnnModel, TrainConfig};

use crate::config::{write_config_sidecar, RunConfig};
use crate::error::{CmdError, CmdResult};
use crate::formats::{self, MetricsJson, QuantCompareFile, QuantFile};

/// Quantize a trained model's plastic layer to int3 and write the
/// quantized-model file plus a float-vs-int3 comparison. With `--in` the
/// comparison includes accuracies on that dataset (single-layer models);
/// `--finetune` additionally runs the quantization-aware delta-rule pass.
pub fn run_quantize(
    model_path: &Path,
    out: &Path,
    input: Option<&Path>,
    finetune: bool,
    config: Option<&Path>,
) -> CmdResult<()> {
    let mut cfg = RunConfig::load(config)?;
    let model_file = formats::read_model(model_path)?;
    let model = model_file.to_model()?;
    cfg.set_bool("quant.finetune", finetune);

    let enc = LifEncoderParams::with_tau(model_file.tau_encoder);
    enc.validate()?;
    let out_params = *model.out_params();

    // Normalized dataset for evaluation / fine-tuning, when provided.
    let data = match input {
        None => None,
        Some(path) => {
            let ds = super::load_features(path)?;
            let norm = zscore_fit(&ds)?;
            Some(zscore_apply(&ds, &norm))
        }
    };

    let float_w = model_file.w.clone();
    let mut qw = quantize_int3(&float_w)?;

    if finetune {
        let ds = data.as_ref().ok_or_else(|| {
            CmdError::Config("--finetune needs --in <features csv> for the delta-rule pass".into())
        })?;
        if !matches!(model, SnnModel::Single(_)) {
            return Err(CmdError::Config("--finetune supports single-layer models".into()));
        }
        let epochs = cfg.usize_or("quant.finetune_epochs", 10)?;
        cfg.set_u64("quant.finetune_epochs", epochs as u64);
        let eta = cfg.f64_or("snn.eta", 0.01)?;
        let trials: Vec<(SpikeRaster, u8)> = ds
            .records
            .iter()
            .map(|r| (encode(&r.features(), &enc), r.label))
            .collect();
        let mut shadow = float_w.clone();
        qw = finetune_quantized(
            &mut shadow,
            &out_params,
            &trials,
            &TrainConfig::new(eta, epochs, model_file.seed, model_file.tau_encoder),
        )?;
        println!("fine-tuned for {epochs} epochs on {} trials", trials.len());
    }

    formats::write_json_pretty(out, &QuantFile::from(&qw))?;

    let mut max_err = 0.0f64;
    for (frow, qrow) in float_w.iter().zip(&qw.w_int) {
        for (f, q) in frow.iter().zip(qrow) {
            max_err = max_err.max((f - *q as f64 / qw.scale).abs());
        }
    }

    let (float_metrics, int3_metrics) = match (&data, &model) {
        (Some(ds), SnnModel::Single(_)) => {
            let clf = SnnClassifier {
                model: model.clone(),
                enc: enc.clone(),
            };
            let y_true = ds.labels();
            let y_pred: Vec<u8> = ds.records.iter().map(|r| clf.predict(&r.features())).collect();
            let fm = compute_metrics(&y_true, &y_pred)?;
            let qm = evaluate_quantized(&qw, &out_params, &enc, ds)?;
            println!(
                "float accuracy {:.4} -> int3 accuracy {:.4} (drop {:+.4})",
                fm.accuracy,
                qm.accuracy,
                fm.accuracy - qm.accuracy
            );
            (Some(MetricsJson::from(&fm)), Some(MetricsJson::from(&qm)))
        }
        _ => (None, None),
    };

    let compare = QuantCompareFile {
        kind: "quantize".into(),
        config: cfg.as_json(),
        w_float: float_w,
        w_int: qw.w_int.clone(),
        scale: qw.scale,
        max_dequant_err: max_err,
        float_metrics,
        int3_metrics,
    };
    let mut compare_path = out.as_os_str().to_owned();
    compare_path.push(".compare.json");
    formats::write_json_pretty(Path::new(&compare_path), &compare)?;
    write_config_sidecar(out, &cfg)?;

    println!("w_int = {:?} (scale {})", qw.w_int, qw.scale);
    Ok(())
}
