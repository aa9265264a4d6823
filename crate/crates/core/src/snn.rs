//! Single-layer and hidden-layer spiking classifiers with mutual-inhibition
//! winner-take-all outputs, trained online by the delta rule.
//!
//! Output (and hidden) neurons use the decay-form update
//! `V <- beta * V + I`, firing at `V >= theta_out` and resetting to zero.
//! The two output neurons inhibit each other with the previous step's
//! spikes through the fixed matrix `[[0, -gamma], [-gamma, 0]]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::encoder::SpikeRaster;
use crate::rng::Rng;
use crate::{Error, Result};

/// Standard deviation of the trainable-layer weight initialization.
const INIT_STD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arch {
    Single,
    Hidden,
}

/// Output-layer neuron constants: membrane decay `beta`, spike threshold,
/// and mutual inhibition strength `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputLifParams {
    pub beta: f64,
    pub theta_out: f64,
    pub gamma: f64,
}

impl OutputLifParams {
    pub fn new(beta: f64, gamma: f64) -> Self {
        OutputLifParams {
            beta,
            theta_out: 1.0,
            gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParam {
                context: format!("beta must lie in (0, 1), got {}", self.beta),
            });
        }
        if !(self.theta_out > 0.0) {
            return Err(Error::InvalidParam {
                context: format!("theta_out must be positive, got {}", self.theta_out),
            });
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidParam {
                context: format!("gamma must lie in [0, 1], got {}", self.gamma),
            });
        }
        Ok(())
    }
}

impl Default for OutputLifParams {
    fn default() -> Self {
        OutputLifParams::new(0.9, 0.01)
    }
}

/// Two output neurons wired straight to the five inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleLayerNet {
    /// 2 x n_inputs.
    pub w: Vec<Vec<f64>>,
    pub out: OutputLifParams,
}

impl SingleLayerNet {
    /// Small symmetric init, N(0, 0.1^2), seed-controlled.
    pub fn init(n_inputs: usize, out: OutputLifParams, seed: u64) -> Self {
        let mut rng = Rng::new(seed);
        let w = (0..2)
            .map(|_| (0..n_inputs).map(|_| INIT_STD * rng.normal()).collect())
            .collect();
        SingleLayerNet { w, out }
    }

    pub fn n_inputs(&self) -> usize {
        self.w[0].len()
    }
}

/// Frozen sparse projection into a hidden spiking layer, plus a trainable
/// 2 x H readout.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenNet {
    /// H x n_inputs, entries zeroed where `mask` is false and kept frozen.
    pub w_fixed: Vec<Vec<f64>>,
    pub mask: Vec<Vec<bool>>,
    /// 2 x H trainable readout.
    pub w_out: Vec<Vec<f64>>,
    pub hidden_scale: usize,
    pub fc1_mean: f64,
    pub p_conn: f64,
    pub out: OutputLifParams,
}

impl HiddenNet {
    pub fn init(
        n_inputs: usize,
        hidden_scale: usize,
        fc1_mean: f64,
        p_conn: f64,
        out: OutputLifParams,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = Rng::new(seed);
        let (w_fixed, mask) = sample_hidden_weights(&mut rng, n_inputs, hidden_scale, fc1_mean, p_conn)?;
        let hidden = hidden_scale * n_inputs;
        let w_out = (0..2)
            .map(|_| (0..hidden).map(|_| INIT_STD * rng.normal()).collect())
            .collect();
        Ok(HiddenNet {
            w_fixed,
            mask,
            w_out,
            hidden_scale,
            fc1_mean,
            p_conn,
            out,
        })
    }

    pub fn hidden_units(&self) -> usize {
        self.w_fixed.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.w_fixed[0].len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SnnModel {
    Single(SingleLayerNet),
    Hidden(HiddenNet),
}

impl SnnModel {
    pub fn arch(&self) -> Arch {
        match self {
            SnnModel::Single(_) => Arch::Single,
            SnnModel::Hidden(_) => Arch::Hidden,
        }
    }

    pub fn out_params(&self) -> &OutputLifParams {
        match self {
            SnnModel::Single(net) => &net.out,
            SnnModel::Hidden(net) => &net.out,
        }
    }

    pub fn forward(&self, raster: &SpikeRaster) -> Result<Prediction> {
        Ok(self.forward_detail(raster)?.0)
    }

    /// Forward pass returning the prediction together with the presynaptic
    /// rate vector of the trainable layer (input rates for the single
    /// layer, hidden rates otherwise), which feeds the delta update.
    pub fn forward_detail(&self, raster: &SpikeRaster) -> Result<(Prediction, Vec<f64>)> {
        match self {
            SnnModel::Single(net) => {
                if raster.units() != net.n_inputs() {
                    return Err(Error::ShapeMismatch {
                        context: format!(
                            "raster has {} units, net expects {}",
                            raster.units(),
                            net.n_inputs()
                        ),
                    });
                }
                let pred = output_layer(&net.w, raster, &net.out);
                Ok((pred, raster.unit_rates()))
            }
            SnnModel::Hidden(net) => {
                if raster.units() != net.n_inputs() {
                    return Err(Error::ShapeMismatch {
                        context: format!(
                            "raster has {} units, net expects {}",
                            raster.units(),
                            net.n_inputs()
                        ),
                    });
                }
                let hidden = hidden_layer(&net.w_fixed, raster, &net.out);
                let pred = output_layer(&net.w_out, &hidden, &net.out);
                Ok((pred, hidden.unit_rates()))
            }
        }
    }

    fn trainable_weights_mut(&mut self) -> &mut Vec<Vec<f64>> {
        match self {
            SnnModel::Single(net) => &mut net.w,
            SnnModel::Hidden(net) => &mut net.w_out,
        }
    }
}

/// Spike-count readout of one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub out_counts: [u32; 2],
    /// Softmax over the spike counts.
    pub probs: [f64; 2],
    /// Argmax of the counts; ties resolve to class 0.
    pub class: u8,
}

/// Frozen projection weights plus their binary connection mask.
pub type HiddenWeights = (Vec<Vec<f64>>, Vec<Vec<bool>>);

/// Draw the frozen hidden projection: entries from
/// `N(fc1_mean, (0.2 * fc1_mean)^2)`, then an independent Bernoulli(p_conn)
/// mask. Masked entries are exactly zero.
pub fn init_hidden_weights(
    n_inputs: usize,
    hidden_scale: usize,
    fc1_mean: f64,
    p_conn: f64,
    seed: u64,
) -> Result<HiddenWeights> {
    let mut rng = Rng::new(seed);
    sample_hidden_weights(&mut rng, n_inputs, hidden_scale, fc1_mean, p_conn)
}

fn sample_hidden_weights(
    rng: &mut Rng,
    n_inputs: usize,
    hidden_scale: usize,
    fc1_mean: f64,
    p_conn: f64,
) -> Result<HiddenWeights> {
    if !(fc1_mean > 0.0) {
        return Err(Error::InvalidParam {
            context: format!("fc1_mean must be positive, got {fc1_mean}"),
        });
    }
    if !(p_conn > 0.0 && p_conn <= 1.0) {
        return Err(Error::InvalidParam {
            context: format!("p_conn must lie in (0, 1], got {p_conn}"),
        });
    }
    if hidden_scale == 0 || n_inputs == 0 {
        return Err(Error::InvalidParam {
            context: "hidden_scale and n_inputs must be positive".into(),
        });
    }
    let hidden = hidden_scale * n_inputs;
    let std = 0.2 * fc1_mean;
    let mut w: Vec<Vec<f64>> = (0..hidden)
        .map(|_| (0..n_inputs).map(|_| rng.normal_scaled(fc1_mean, std)).collect())
        .collect();
    let mask: Vec<Vec<bool>> = (0..hidden)
        .map(|_| (0..n_inputs).map(|_| rng.bernoulli(p_conn)).collect())
        .collect();
    for (wrow, mrow) in w.iter_mut().zip(&mask) {
        for (v, &m) in wrow.iter_mut().zip(mrow) {
            if !m {
                *v = 0.0;
            }
        }
    }
    Ok((w, mask))
}

/// Hidden spiking layer: same decay-form LIF as the outputs, no lateral
/// inhibition among hidden units.
fn hidden_layer(w: &[Vec<f64>], raster: &SpikeRaster, out: &OutputLifParams) -> SpikeRaster {
    let steps = raster.steps();
    let hidden = w.len();
    let mut spikes = SpikeRaster::zeros(hidden, steps);
    let mut v = vec![0.0f64; hidden];
    for t in 0..steps {
        for (h, vh) in v.iter_mut().enumerate() {
            let mut current = 0.0;
            for (j, wj) in w[h].iter().enumerate() {
                if raster.get(j, t) {
                    current += wj;
                }
            }
            *vh = out.beta * *vh + current;
            if *vh >= out.theta_out {
                spikes.set(h, t, true);
                *vh = 0.0;
            }
        }
    }
    spikes
}

/// Two-neuron WTA output layer over a presynaptic raster.
fn output_layer(w: &[Vec<f64>], pre: &SpikeRaster, out: &OutputLifParams) -> Prediction {
    let steps = pre.steps();
    let mut v = [0.0f64; 2];
    let mut prev = [false; 2];
    let mut counts = [0u32; 2];
    for t in 0..steps {
        let mut input = [0.0f64; 2];
        for i in 0..2 {
            let mut current = 0.0;
            for (j, wj) in w[i].iter().enumerate() {
                if pre.get(j, t) {
                    current += wj;
                }
            }
            if prev[1 - i] {
                current -= out.gamma;
            }
            input[i] = current;
        }
        let mut spk = [false; 2];
        for i in 0..2 {
            v[i] = out.beta * v[i] + input[i];
            if v[i] >= out.theta_out {
                spk[i] = true;
                v[i] = 0.0;
                counts[i] += 1;
            }
        }
        prev = spk;
    }
    Prediction {
        out_counts: counts,
        probs: softmax2(counts[0] as f64, counts[1] as f64),
        class: u8::from(counts[1] > counts[0]),
    }
}

pub fn softmax2(a: f64, b: f64) -> [f64; 2] {
    let m = if a >= b { a } else { b };
    let ea = libm::exp(a - m);
    let eb = libm::exp(b - m);
    [ea / (ea + eb), eb / (ea + eb)]
}

/// Delta-rule update `w[i][j] += eta * (y_true[i] - y_pred[i]) * x[j]`,
/// where `x` is the presynaptic rate vector.
pub fn delta_update(w: &mut [Vec<f64>], x: &[f64], y_true: &[f64; 2], y_pred: &[f64; 2], eta: f64) {
    for i in 0..2 {
        let err = eta * (y_true[i] - y_pred[i]);
        for (wj, xj) in w[i].iter_mut().zip(x) {
            *wj += err * xj;
        }
    }
}

/// Online training configuration. `batch_size` is fixed at 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub eta: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Encoder time constant used to produce the rasters; carried along so
    /// that serialized models record the full inference recipe.
    pub tau_encoder: f64,
}

impl TrainConfig {
    pub fn new(eta: f64, epochs: usize, seed: u64, tau_encoder: f64) -> Self {
        TrainConfig {
            eta,
            epochs,
            batch_size: 1,
            seed,
            tau_encoder,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) {
            return Err(Error::InvalidParam {
                context: format!("eta must be positive, got {}", self.eta),
            });
        }
        if self.batch_size != 1 {
            return Err(Error::InvalidParam {
                context: format!("batch_size is fixed at 1, got {}", self.batch_size),
            });
        }
        Ok(())
    }
}

/// Train the model's plastic layer online: per epoch, visit trials in a
/// seed-determined shuffled order, forward then delta-update. Frozen
/// layers are untouched; deterministic per (seed, trial order).
pub fn train(model: &mut SnnModel, trials: &[(SpikeRaster, u8)], cfg: &TrainConfig) -> Result<()> {
    cfg.validate()?;
    if trials.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut rng = Rng::new(cfg.seed);
    let mut order: Vec<usize> = (0..trials.len()).collect();
    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for &idx in &order {
            let (raster, label) = &trials[idx];
            let (pred, rates) = model.forward_detail(raster)?;
            let y_true = one_hot(*label);
            delta_update(model.trainable_weights_mut(), &rates, &y_true, &pred.probs, cfg.eta);
        }
    }
    Ok(())
}

pub fn one_hot(label: u8) -> [f64; 2] {
    if label == 0 {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

/// A trained model bundled with its encoder parameters, predicting
/// straight from normalized feature vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct SnnClassifier {
    pub model: SnnModel,
    pub enc: crate::encoder::LifEncoderParams,
}

impl crate::eval::FoldModel for SnnClassifier {
    fn predict(&self, features: &[f64; 5]) -> u8 {
        let raster = crate::encoder::encode(features, &self.enc);
        // Shape is fixed at 5 inputs here, so forward cannot fail.
        self.model.forward(&raster).map(|p| p.class).unwrap_or(0)
    }
}
