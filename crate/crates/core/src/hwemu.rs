//! Software emulator of the mixed-signal substrate: quantized weights
//! expand into typed parallel synapses (AMPA fast-excitatory, GABA-A
//! fast-inhibitory) onto two 20-neuron output populations on separate
//! cores, cross-coupled by slow GABA-B lateral inhibition, with
//! configurable device mismatch on efficacies and time constants.
//!
//! Neurons are current-based LIF with exponential synaptic kernels,
//! integrated by fixed-step forward Euler. This reproduces the dynamics
//! the classification pipeline depends on (fast excitation / fast
//! inhibition / slow cross-inhibition); it makes no claim about the
//! silicon's full adaptive-exponential circuits, whose parameters are not
//! public.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::encoder::SpikeEventList;
use crate::quant::QuantizedWeights;
use crate::rng::Rng;
use crate::{Error, Result};

/// Neurons per output population, one population per class.
pub const POPULATION_SIZE: usize = 20;
/// Input spike generators, one per feature.
pub const GENERATOR_COUNT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynKind {
    /// Fast excitatory.
    Ampa,
    /// Fast inhibitory.
    GabaA,
    /// Slow inhibitory (population cross-coupling).
    GabaB,
}

impl SynKind {
    pub fn sign(self) -> i8 {
        match self {
            SynKind::Ampa => 1,
            SynKind::GabaA | SynKind::GabaB => -1,
        }
    }
}

/// Synapse kind with its kernel time constant and sign.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynapseType {
    pub kind: SynKind,
    pub tau_syn: f64,
    pub sign: i8,
}

impl SynapseType {
    pub fn of(kind: SynKind, build: &BuildParams) -> Self {
        let tau_syn = match kind {
            SynKind::Ampa => build.tau_ampa,
            SynKind::GabaA => build.tau_gabaa,
            SynKind::GabaB => build.tau_gabab,
        };
        SynapseType {
            kind,
            tau_syn,
            sign: kind.sign(),
        }
    }
}

/// Presynaptic endpoint: an input spike generator or an on-chip neuron.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pre {
    Generator(u8),
    Neuron(u16),
}

/// Flattened synapse view for audits and network dumps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Synapse {
    pub pre: Pre,
    pub post: u16,
    pub kind: SynKind,
    pub efficacy: f64,
}

/// Per-neuron time constants, post-mismatch. Seconds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuronParams {
    pub tau_m: f64,
    pub tau_ampa: f64,
    pub tau_gabaa: f64,
    pub tau_gabab: f64,
}

/// Emulator constants: nominal time constants, synaptic efficacies, spike
/// threshold (dimensionless membrane units, rest = 0), and refractory
/// period.
///
/// Two reference efficacies are provided. [`CALIBRATED_100HZ_EFFICACY`] is
/// the output of [`calibrate_base_efficacy`] (one output spike per ten
/// inputs under sustained 100 Hz drive). Trial replays, however, deliver
/// one to three near-coincident volleys per feature, and under the fast
/// kernels a single volley peaks at only ~0.16 of its total charge, so the
/// sustained-drive value leaves a weight-3 volley just below threshold and
/// mutes whole populations. The default is therefore
/// [`DEFAULT_BASE_EFFICACY`], set so that a weight-2 volley reaches
/// threshold while a weight-1 volley does not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildParams {
    pub base_efficacy: f64,
    /// Efficacy of each cross-population GABA-B synapse.
    pub gabab_efficacy: f64,
    pub tau_m: f64,
    pub tau_ampa: f64,
    pub tau_gabaa: f64,
    pub tau_gabab: f64,
    pub v_th: f64,
    pub refractory_s: f64,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams {
            base_efficacy: DEFAULT_BASE_EFFICACY,
            gabab_efficacy: DEFAULT_BASE_EFFICACY,
            tau_m: 0.020,
            tau_ampa: 0.005,
            tau_gabaa: 0.005,
            tau_gabab: 0.100,
            v_th: 1.0,
            refractory_s: 0.001,
        }
    }
}

/// Volley-responsive synaptic efficacy: two coincident inputs through one
/// connection cross the spike threshold, one does not.
pub const DEFAULT_BASE_EFFICACY: f64 = 3.2;

/// One AMPA synapse at 100 Hz yields ~10 output spikes per second (see
/// [`calibrate_base_efficacy`], pinned by test).
pub const CALIBRATED_100HZ_EFFICACY: f64 = 1.9378758958583289;

/// Multiplicative Gaussian device mismatch: coefficients of variation for
/// synaptic efficacies and for neuron/synapse time constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MismatchConfig {
    pub cv_weight: f64,
    pub cv_tau: f64,
    pub seed: u64,
}

impl MismatchConfig {
    pub fn none(seed: u64) -> Self {
        MismatchConfig {
            cv_weight: 0.0,
            cv_tau: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.cv_weight) || !(0.0..1.0).contains(&self.cv_tau) {
            return Err(Error::InvalidParam {
                context: format!(
                    "mismatch CVs must lie in [0, 1), got {} / {}",
                    self.cv_weight, self.cv_tau
                ),
            });
        }
        Ok(())
    }
}

impl Default for MismatchConfig {
    fn default() -> Self {
        MismatchConfig {
            cv_weight: 0.2,
            cv_tau: 0.2,
            seed: 0,
        }
    }
}

/// Trial replay timing: stimulus duration plus relaxation buffers on both
/// sides, integrated at `sim_dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmuRunParams {
    pub trial_duration: f64,
    pub pre_buffer: f64,
    pub post_buffer: f64,
    pub sim_dt: f64,
}

impl Default for EmuRunParams {
    fn default() -> Self {
        EmuRunParams {
            trial_duration: 0.16,
            pre_buffer: 0.5,
            post_buffer: 0.5,
            sim_dt: 1e-4,
        }
    }
}

impl EmuRunParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.trial_duration > 0.0)
            || !(self.pre_buffer > 0.0)
            || !(self.post_buffer > 0.0)
            || !(self.sim_dt > 0.0)
        {
            return Err(Error::InvalidParam {
                context: "all emulator timing parameters must be positive".into(),
            });
        }
        if self.sim_dt > 1e-3 {
            return Err(Error::InvalidParam {
                context: format!("sim_dt must be <= 1e-3 s, got {}", self.sim_dt),
            });
        }
        Ok(())
    }
}

/// Synapses from one generator, grouped for fast event delivery.
#[derive(Clone, Debug, PartialEq)]
pub struct GenSynapse {
    pub post: u16,
    pub kind: SynKind,
    pub efficacy: f64,
}

/// Cross-population GABA-B synapse from an on-chip neuron.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSynapse {
    pub post: u16,
    pub efficacy: f64,
}

/// Immutable expanded network. Neuron ids are global; population `p`
/// occupies ids `[p * n_per_pop, (p + 1) * n_per_pop)` (separate cores on
/// the target device).
#[derive(Clone, Debug, PartialEq)]
pub struct ChipNetwork {
    pub n_per_pop: usize,
    pub n_populations: usize,
    pub neurons: Vec<NeuronParams>,
    /// Indexed by generator: all feed-forward synapses from that input.
    pub gen_synapses: Vec<Vec<GenSynapse>>,
    /// Indexed by presynaptic neuron: all GABA-B cross synapses.
    pub cross_synapses: Vec<Vec<CrossSynapse>>,
    pub v_th: f64,
    pub refractory_s: f64,
}

impl ChipNetwork {
    pub fn n_neurons(&self) -> usize {
        self.neurons.len()
    }

    pub fn population_of(&self, neuron: usize) -> usize {
        neuron / self.n_per_pop
    }

    /// Flattened (pre, post, type, efficacy) list for dumps and audits.
    pub fn synapses(&self) -> Vec<Synapse> {
        let mut out = Vec::new();
        for (g, syns) in self.gen_synapses.iter().enumerate() {
            for s in syns {
                out.push(Synapse {
                    pre: Pre::Generator(g as u8),
                    post: s.post,
                    kind: s.kind,
                    efficacy: s.efficacy,
                });
            }
        }
        for (n, syns) in self.cross_synapses.iter().enumerate() {
            for s in syns {
                out.push(Synapse {
                    pre: Pre::Neuron(n as u16),
                    post: s.post,
                    kind: SynKind::GabaB,
                    efficacy: s.efficacy,
                });
            }
        }
        out
    }
}

/// Expand a 2 x 5 integer weight matrix into the chip network.
///
/// Entry `w[i][j] = +n` becomes `n` parallel AMPA synapses from generator
/// `j` onto every neuron of population `i`; `-n` becomes `n` GABA-A
/// synapses. Every cross-population neuron pair is joined by one GABA-B
/// synapse. Mismatch multiplies each efficacy by `1 + N(0, cv_weight)`
/// (floored at zero) and each per-neuron time constant by
/// `1 + N(0, cv_tau)` (floored at a tenth of nominal). Deterministic per
/// seed: draws run neurons first, then generator synapses in (population,
/// feature, neuron, parallel-index) order, then GABA-B in (pre, post)
/// order.
pub fn build_network(qw: &QuantizedWeights, mm: &MismatchConfig, build: &BuildParams) -> Result<ChipNetwork> {
    mm.validate()?;
    if qw.rows() != 2 || qw.cols() != GENERATOR_COUNT {
        return Err(Error::ShapeMismatch {
            context: format!(
                "chip mapping needs a 2 x {GENERATOR_COUNT} matrix, got {} x {}",
                qw.rows(),
                qw.cols()
            ),
        });
    }
    let mut rng = Rng::new(mm.seed);
    let n_neurons = 2 * POPULATION_SIZE;

    let jitter_tau = |rng: &mut Rng, nominal: f64, cv: f64| -> f64 {
        let factor = 1.0 + cv * rng.normal();
        nominal * if factor < 0.1 { 0.1 } else { factor }
    };
    let neurons: Vec<NeuronParams> = (0..n_neurons)
        .map(|_| NeuronParams {
            tau_m: jitter_tau(&mut rng, build.tau_m, mm.cv_tau),
            tau_ampa: jitter_tau(&mut rng, build.tau_ampa, mm.cv_tau),
            tau_gabaa: jitter_tau(&mut rng, build.tau_gabaa, mm.cv_tau),
            tau_gabab: jitter_tau(&mut rng, build.tau_gabab, mm.cv_tau),
        })
        .collect();

    let jitter_eff = |rng: &mut Rng, nominal: f64, cv: f64| -> f64 {
        let e = nominal * (1.0 + cv * rng.normal());
        if e < 0.0 {
            0.0
        } else {
            e
        }
    };

    let mut gen_synapses: Vec<Vec<GenSynapse>> = vec![Vec::new(); GENERATOR_COUNT];
    for pop in 0..2usize {
        for (feature, synapses) in gen_synapses.iter_mut().enumerate() {
            let w = qw.w_int[pop][feature];
            if w == 0 {
                continue;
            }
            let kind = if w > 0 { SynKind::Ampa } else { SynKind::GabaA };
            let parallel = w.unsigned_abs() as usize;
            for neuron in 0..POPULATION_SIZE {
                let post = (pop * POPULATION_SIZE + neuron) as u16;
                for _ in 0..parallel {
                    synapses.push(GenSynapse {
                        post,
                        kind,
                        efficacy: jitter_eff(&mut rng, build.base_efficacy, mm.cv_weight),
                    });
                }
            }
        }
    }

    let mut cross_synapses: Vec<Vec<CrossSynapse>> = vec![Vec::new(); n_neurons];
    for (pre, targets) in cross_synapses.iter_mut().enumerate() {
        let pre_pop = pre / POPULATION_SIZE;
        let other = 1 - pre_pop;
        for neuron in 0..POPULATION_SIZE {
            let post = (other * POPULATION_SIZE + neuron) as u16;
            targets.push(CrossSynapse {
                post,
                efficacy: jitter_eff(&mut rng, build.gabab_efficacy, mm.cv_weight),
            });
        }
    }

    Ok(ChipNetwork {
        n_per_pop: POPULATION_SIZE,
        n_populations: 2,
        neurons,
        gen_synapses,
        cross_synapses,
        v_th: build.v_th,
        refractory_s: build.refractory_s,
    })
}

/// One recorded output spike, timestamped relative to stimulus onset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutputSpike {
    pub pop: u8,
    pub neuron: u16,
    pub t_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrialOutput {
    pub spikes: Vec<OutputSpike>,
}

impl TrialOutput {
    /// Spike times of one population restricted to the stimulus window.
    pub fn population_times(&self, pop: u8, trial_duration: f64) -> Vec<f64> {
        self.spikes
            .iter()
            .filter(|s| s.pop == pop && s.t_s >= 0.0 && s.t_s <= trial_duration)
            .map(|s| s.t_s)
            .collect()
    }
}

/// Replay one trial's input events through the network.
///
/// Fixed-step Euler over pre-buffer + stimulus + post-buffer. Input events
/// are injected at their timestamps (offset by the pre-buffer); GABA-B
/// spikes propagate with one-step delay. Spike times in the result are
/// relative to stimulus onset, so buffer activity shows up as negative or
/// beyond-duration timestamps.
pub fn run_trial(net: &ChipNetwork, events: &SpikeEventList, params: &EmuRunParams) -> Result<TrialOutput> {
    params.validate()?;
    let dt = params.sim_dt;
    let total_steps = libm::round((params.pre_buffer + params.trial_duration + params.post_buffer) / dt) as usize;

    // Event schedule: step index -> generators firing there.
    let mut schedule: Vec<(usize, u8)> = Vec::with_capacity(events.events.len());
    for ev in &events.events {
        if !(ev.time_s > 0.0 && ev.time_s <= params.trial_duration) {
            return Err(Error::EventOutsideWindow {
                t: ev.time_s,
                limit: params.trial_duration,
            });
        }
        if ev.unit >= net.gen_synapses.len() {
            return Err(Error::ShapeMismatch {
                context: format!("event unit {} but network has {} generators", ev.unit, net.gen_synapses.len()),
            });
        }
        let step = libm::round((params.pre_buffer + ev.time_s) / dt) as usize;
        schedule.push((step, ev.unit as u8));
    }
    schedule.sort_unstable();

    let n = net.n_neurons();
    let mut v = vec![0.0f64; n];
    let mut g_ampa = vec![0.0f64; n];
    let mut g_gabaa = vec![0.0f64; n];
    let mut g_gabab = vec![0.0f64; n];
    let mut refr = vec![0u32; n];
    let refr_steps = libm::round(net.refractory_s / dt) as u32;

    // Per-neuron Euler factors. Every time constant must resolve over at
    // least one step or the explicit update oscillates.
    for (i, p) in net.neurons.iter().enumerate() {
        let min_tau = p.tau_m.min(p.tau_ampa).min(p.tau_gabaa).min(p.tau_gabab);
        if !(min_tau > dt) {
            return Err(Error::InvalidParam {
                context: format!(
                    "neuron {i}: time constant {min_tau} s does not resolve at sim_dt {dt} s"
                ),
            });
        }
    }
    let decay_a: Vec<f64> = net.neurons.iter().map(|p| 1.0 - dt / p.tau_ampa).collect();
    let decay_ga: Vec<f64> = net.neurons.iter().map(|p| 1.0 - dt / p.tau_gabaa).collect();
    let decay_gb: Vec<f64> = net.neurons.iter().map(|p| 1.0 - dt / p.tau_gabab).collect();
    let vm_gain: Vec<f64> = net.neurons.iter().map(|p| dt / p.tau_m).collect();

    let mut spikes = Vec::new();
    let mut fired_prev: Vec<u16> = Vec::new();
    let mut fired_now: Vec<u16> = Vec::new();
    let mut cursor = 0usize;

    for step in 0..total_steps {
        // Lateral inhibition from the previous step's spikes.
        for &src in &fired_prev {
            for syn in &net.cross_synapses[src as usize] {
                g_gabab[syn.post as usize] += syn.efficacy;
            }
        }

        // Input events landing on this step.
        while cursor < schedule.len() && schedule[cursor].0 == step {
            let generator = schedule[cursor].1 as usize;
            for syn in &net.gen_synapses[generator] {
                match syn.kind {
                    SynKind::Ampa => g_ampa[syn.post as usize] += syn.efficacy,
                    SynKind::GabaA => g_gabaa[syn.post as usize] += syn.efficacy,
                    SynKind::GabaB => g_gabab[syn.post as usize] += syn.efficacy,
                }
            }
            cursor += 1;
        }

        fired_now.clear();
        for i in 0..n {
            if refr[i] > 0 {
                refr[i] -= 1;
                v[i] = 0.0;
            } else {
                let current = g_ampa[i] - g_gabaa[i] - g_gabab[i];
                v[i] += vm_gain[i] * (current - v[i]);
                if v[i] >= net.v_th {
                    v[i] = 0.0;
                    refr[i] = refr_steps;
                    fired_now.push(i as u16);
                    spikes.push(OutputSpike {
                        pop: net.population_of(i) as u8,
                        neuron: i as u16,
                        t_s: step as f64 * dt - params.pre_buffer,
                    });
                }
            }
            g_ampa[i] *= decay_a[i];
            g_gabaa[i] *= decay_ga[i];
            g_gabab[i] *= decay_gb[i];
        }
        core::mem::swap(&mut fired_prev, &mut fired_now);
    }

    Ok(TrialOutput { spikes })
}

/// Run the same input through freshly built networks, one per seed, so the
/// outputs carry independent mismatch draws.
pub fn repeat_trials<F>(
    mut builder: F,
    events: &SpikeEventList,
    params: &EmuRunParams,
    seeds: &[u64],
) -> Result<Vec<TrialOutput>>
where
    F: FnMut(u64) -> Result<ChipNetwork>,
{
    seeds
        .iter()
        .map(|&seed| run_trial(&builder(seed)?, events, params))
        .collect()
}

/// Single-neuron rig: one AMPA synapse of the given efficacy, driven at
/// 100 Hz for one second. Returns the output spike count.
pub fn calibration_spike_count(efficacy: f64, build: &BuildParams) -> usize {
    let net = ChipNetwork {
        n_per_pop: 1,
        n_populations: 1,
        neurons: vec![NeuronParams {
            tau_m: build.tau_m,
            tau_ampa: build.tau_ampa,
            tau_gabaa: build.tau_gabaa,
            tau_gabab: build.tau_gabab,
        }],
        gen_synapses: vec![vec![GenSynapse {
            post: 0,
            kind: SynKind::Ampa,
            efficacy,
        }]],
        cross_synapses: vec![Vec::new()],
        v_th: build.v_th,
        refractory_s: build.refractory_s,
    };
    let events = SpikeEventList {
        events: (0..100)
            .map(|k| crate::encoder::SpikeEvent {
                unit: 0,
                time_s: (k as f64 + 1.0) * 0.01,
            })
            .collect(),
    };
    let params = EmuRunParams {
        trial_duration: 1.0,
        pre_buffer: 0.05,
        post_buffer: 0.05,
        sim_dt: 1e-4,
    };
    run_trial(&net, &events, &params).map(|out| out.spikes.len()).unwrap_or(0)
}

/// Find the smallest AMPA efficacy at which 100 presynaptic spikes per
/// second elicit at least ten output spikes (one per ten inputs). Bisection
/// on the monotone spike count; deterministic.
pub fn calibrate_base_efficacy(build: &BuildParams) -> f64 {
    let target = 10usize;
    let mut lo = 1e-3f64;
    let mut hi = 100.0f64;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if calibration_spike_count(mid, build) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
