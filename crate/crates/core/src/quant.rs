//! Int3 quantization of trained weights and evaluation of the frozen
//! quantized model.

use alloc::format;
use alloc::vec::Vec;

use crate::data::Dataset;
use crate::encoder::{encode, LifEncoderParams};
use crate::eval::{compute_metrics, Metrics};
use crate::snn::{delta_update, one_hot, OutputLifParams, SingleLayerNet, SnnModel, TrainConfig};
use crate::{Error, Result};

/// Signed 3-bit weight matrix plus the float-to-int scale retained for
/// diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizedWeights {
    pub w_int: Vec<Vec<i8>>,
    pub scale: f64,
}

impl QuantizedWeights {
    pub fn rows(&self) -> usize {
        self.w_int.len()
    }

    pub fn cols(&self) -> usize {
        self.w_int.first().map_or(0, Vec::len)
    }

    /// The integer weights viewed as reals, for running the software
    /// forward pass.
    pub fn as_float(&self) -> Vec<Vec<f64>> {
        self.w_int
            .iter()
            .map(|row| row.iter().map(|&v| v as f64).collect())
            .collect()
    }
}

/// Linearly scale a float matrix so its largest magnitude maps to 3, round
/// half-away-from-zero, and clip to [-3, 3]. Per-matrix scale.
pub fn quantize_int3(w: &[Vec<f64>]) -> Result<QuantizedWeights> {
    let mut max_abs = 0.0f64;
    for row in w {
        for &v in row {
            if !v.is_finite() {
                return Err(Error::InvalidParam {
                    context: format!("non-finite weight {v}"),
                });
            }
            let a = libm::fabs(v);
            if a > max_abs {
                max_abs = a;
            }
        }
    }
    if max_abs == 0.0 {
        return Err(Error::AllZeroWeights);
    }
    let scale = 3.0 / max_abs;
    let w_int = w
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| {
                    let q = libm::round(v * scale);
                    q.clamp(-3.0, 3.0) as i8
                })
                .collect()
        })
        .collect();
    Ok(QuantizedWeights { w_int, scale })
}

/// Class prediction of the quantized single-layer model on one raster.
pub fn predict_quantized(qw: &QuantizedWeights, out: &OutputLifParams, raster: &crate::encoder::SpikeRaster) -> Result<u8> {
    let net = SnnModel::Single(SingleLayerNet {
        w: qw.as_float(),
        out: *out,
    });
    Ok(net.forward(raster)?.class)
}

/// Run the spiking forward pass with the integer weights (as reals) frozen
/// and score against the dataset labels. `ds` must already be normalized
/// the same way the float model's inputs were.
pub fn evaluate_quantized(
    qw: &QuantizedWeights,
    out: &OutputLifParams,
    enc: &LifEncoderParams,
    ds: &Dataset,
) -> Result<Metrics> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if qw.rows() != 2 {
        return Err(Error::ShapeMismatch {
            context: format!("quantized matrix has {} rows, expected 2", qw.rows()),
        });
    }
    let mut y_true = Vec::with_capacity(ds.len());
    let mut y_pred = Vec::with_capacity(ds.len());
    for r in &ds.records {
        let raster = encode(&r.features(), enc);
        y_pred.push(predict_quantized(qw, out, &raster)?);
        y_true.push(r.label);
    }
    compute_metrics(&y_true, &y_pred)
}

/// Optional quantization-aware fine-tune: delta updates accumulate on a
/// float shadow of the weights while the forward pass always runs the
/// re-quantized integers. Returns the final quantized weights.
pub fn finetune_quantized(
    shadow: &mut [Vec<f64>],
    out: &OutputLifParams,
    trials: &[(crate::encoder::SpikeRaster, u8)],
    cfg: &TrainConfig,
) -> Result<QuantizedWeights> {
    cfg.validate()?;
    if trials.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = crate::rng::Rng::new(cfg.seed);
    let mut order: Vec<usize> = (0..trials.len()).collect();
    let mut qw = quantize_int3(shadow)?;
    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        let net = SnnModel::Single(SingleLayerNet {
            w: qw.as_float(),
            out: *out,
        });
        for &idx in &order {
            let (raster, label) = &trials[idx];
            let (pred, rates) = net.forward_detail(raster)?;
            delta_update(shadow, &rates, &one_hot(*label), &pred.probs, cfg.eta);
        }
        qw = quantize_int3(shadow)?;
    }
    Ok(qw)
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use crate::rng::Rng;
    use alloc::vec::Vec;

    fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
        (0..rows)
            .map(|_| (0..cols).map(|_| rng.normal() * libm::exp(2.0 * rng.normal())).collect())
            .collect()
    }

    /// Range, sign preservation, monotonicity, and idempotence over random
    /// matrices (the invariant set pinned by acceptance).
    #[test]
    fn quantization_invariants_on_random_matrices() {
        let mut rng = Rng::new(0xda7a);
        for _ in 0..1000 {
            let rows = 1 + rng.below(3);
            let cols = 1 + rng.below(6);
            let w = random_matrix(&mut rng, rows, cols);
            let qw = match quantize_int3(&w) {
                Ok(q) => q,
                Err(Error::AllZeroWeights) => continue,
                Err(e) => panic!("unexpected error {e:?}"),
            };

            let mut attains_3 = false;
            for (r, row) in qw.w_int.iter().enumerate() {
                for (c, &q) in row.iter().enumerate() {
                    assert!((-3..=3).contains(&q), "range");
                    let v = w[r][c];
                    assert!(q == 0 || (q > 0) == (v > 0.0), "sign preservation");
                    if q.abs() == 3 {
                        attains_3 = true;
                    }
                }
            }
            assert!(attains_3, "max-magnitude entry must hit +/-3");

            // Monotone: flatten and compare all pairs.
            let flat_w: Vec<f64> = w.iter().flatten().copied().collect();
            let flat_q: Vec<i8> = qw.w_int.iter().flatten().copied().collect();
            for i in 0..flat_w.len() {
                for j in 0..flat_w.len() {
                    if flat_w[i] >= flat_w[j] {
                        assert!(flat_q[i] >= flat_q[j], "monotonicity");
                    }
                }
            }

            // Idempotence: quantizing the integers reproduces them.
            let again = quantize_int3(&qw.as_float()).unwrap();
            assert_eq!(again.w_int, qw.w_int, "idempotence");
        }
    }
}
