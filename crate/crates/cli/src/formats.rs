//! On-disk formats: the feature CSV, spike-event JSONL, model and
//! quantized-model JSON, network dumps, output spikes, and the result
//! files consumed by `report`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use spikeload_core::data::{feature_csv_string, parse_feature_csv, Dataset, NormalizationParams, ParsedCsv};
use spikeload_core::encoder::{SpikeEvent, SpikeEventList};
use spikeload_core::eval::{Metrics, MetricSummary};
use spikeload_core::hwemu::{ChipNetwork, Pre, SynKind, TrialOutput};
use spikeload_core::quant::QuantizedWeights;
use spikeload_core::snn::{Arch, HiddenNet, OutputLifParams, SingleLayerNet, SnnModel};

use crate::error::{CmdError, CmdResult};

pub fn read_to_string(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| CmdError::io(path, e))
}

pub fn write_string(path: &Path, text: &str) -> CmdResult<()> {
    fs::write(path, text).map_err(|e| CmdError::io(path, e))
}

pub fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> CmdResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CmdError::Numeric(e.to_string()))?;
    write_string(path, &(text + "\n"))
}

// ---------------------------------------------------------------------------
// Feature CSV
// ---------------------------------------------------------------------------

pub fn load_feature_csv(path: &Path) -> CmdResult<ParsedCsv> {
    let text = read_to_string(path)?;
    Ok(parse_feature_csv(&text)?)
}

pub fn write_feature_csv(path: &Path, ds: &Dataset) -> CmdResult<()> {
    write_string(path, &feature_csv_string(ds))
}

// ---------------------------------------------------------------------------
// Spike-event file: one JSON object per trial, times with six decimals
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Deserialize)]
struct EventLine {
    trial_id: String,
    units: Vec<usize>,
    times_s: Vec<f64>,
}

pub fn events_to_line(trial_id: &str, events: &SpikeEventList) -> String {
    let id = serde_json::to_string(trial_id).expect("string serializes");
    let units: Vec<String> = events.events.iter().map(|e| e.unit.to_string()).collect();
    let times: Vec<String> = events.events.iter().map(|e| format!("{:.6}", e.time_s)).collect();
    format!(
        "{{\"trial_id\":{id},\"units\":[{}],\"times_s\":[{}]}}",
        units.join(","),
        times.join(",")
    )
}

pub fn write_event_file(path: &Path, trials: &[(String, SpikeEventList)]) -> CmdResult<()> {
    let mut out = String::new();
    for (trial_id, events) in trials {
        out.push_str(&events_to_line(trial_id, events));
        out.push('\n');
    }
    write_string(path, &out)
}

pub fn read_event_file(path: &Path) -> CmdResult<Vec<(String, SpikeEventList)>> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: EventLine = serde_json::from_str(line)
            .map_err(|e| CmdError::Data(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        if parsed.units.len() != parsed.times_s.len() {
            return Err(CmdError::Data(format!(
                "{}:{}: units/times_s lengths differ",
                path.display(),
                lineno + 1
            )));
        }
        let events = SpikeEventList {
            events: parsed
                .units
                .iter()
                .zip(&parsed.times_s)
                .map(|(&unit, &time_s)| SpikeEvent { unit, time_s })
                .collect(),
        };
        out.push((parsed.trial_id, events));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub arch: String,
    /// Trainable layer, row-major: 2 x 5 for `single`, 2 x H for `hidden`.
    pub w: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_fixed: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<Vec<u8>>>,
    pub beta: f64,
    pub gamma: f64,
    pub theta_out: f64,
    pub tau_encoder: f64,
    pub seed: u64,
}

impl ModelFile {
    pub fn from_model(model: &SnnModel, tau_encoder: f64, seed: u64) -> ModelFile {
        let out = model.out_params();
        match model {
            SnnModel::Single(net) => ModelFile {
                arch: "single".into(),
                w: net.w.clone(),
                w_fixed: None,
                mask: None,
                beta: out.beta,
                gamma: out.gamma,
                theta_out: out.theta_out,
                tau_encoder,
                seed,
            },
            SnnModel::Hidden(net) => ModelFile {
                arch: "hidden".into(),
                w: net.w_out.clone(),
                w_fixed: Some(net.w_fixed.clone()),
                mask: Some(
                    net.mask
                        .iter()
                        .map(|row| row.iter().map(|&m| u8::from(m)).collect())
                        .collect(),
                ),
                beta: out.beta,
                gamma: out.gamma,
                theta_out: out.theta_out,
                tau_encoder,
                seed,
            },
        }
    }

    pub fn to_model(&self) -> CmdResult<SnnModel> {
        let out = OutputLifParams {
            beta: self.beta,
            theta_out: self.theta_out,
            gamma: self.gamma,
        };
        match self.arch.as_str() {
            "single" => Ok(SnnModel::Single(SingleLayerNet { w: self.w.clone(), out })),
            "hidden" => {
                let w_fixed = self
                    .w_fixed
                    .clone()
                    .ok_or_else(|| CmdError::Data("hidden model lacks w_fixed".into()))?;
                let mask_u8 = self
                    .mask
                    .clone()
                    .ok_or_else(|| CmdError::Data("hidden model lacks mask".into()))?;
                let mask: Vec<Vec<bool>> = mask_u8
                    .iter()
                    .map(|row| row.iter().map(|&m| m != 0).collect())
                    .collect();
                let hidden_units = w_fixed.len();
                let n_inputs = w_fixed.first().map_or(0, Vec::len);
                let hidden_scale = hidden_units.checked_div(n_inputs).unwrap_or(0);
                Ok(SnnModel::Hidden(HiddenNet {
                    w_fixed,
                    mask,
                    w_out: self.w.clone(),
                    hidden_scale,
                    fc1_mean: 0.0,
                    p_conn: 0.0,
                    out,
                }))
            }
            other => Err(CmdError::Data(format!("unknown arch `{other}`"))),
        }
    }

    pub fn arch_enum(&self) -> CmdResult<Arch> {
        match self.arch.as_str() {
            "single" => Ok(Arch::Single),
            "hidden" => Ok(Arch::Hidden),
            other => Err(CmdError::Data(format!("unknown arch `{other}`"))),
        }
    }
}

pub fn read_model(path: &Path) -> CmdResult<ModelFile> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Quantized-model file
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantFile {
    pub w_int: Vec<Vec<i8>>,
    pub scale: f64,
}

impl From<&QuantizedWeights> for QuantFile {
    fn from(qw: &QuantizedWeights) -> Self {
        QuantFile {
            w_int: qw.w_int.clone(),
            scale: qw.scale,
        }
    }
}

impl QuantFile {
    pub fn to_weights(&self) -> QuantizedWeights {
        QuantizedWeights {
            w_int: self.w_int.clone(),
            scale: self.scale,
        }
    }
}

pub fn read_quant(path: &Path) -> CmdResult<QuantFile> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CmdError::Data(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Normalization sidecar
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormFile {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl From<&NormalizationParams> for NormFile {
    fn from(p: &NormalizationParams) -> Self {
        NormFile {
            mean: p.mean.to_vec(),
            std: p.std.to_vec(),
        }
    }
}

// ---------------------------------------------------------------------------
// Metrics / results
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricsJson {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: [[u32; 2]; 2],
    pub degenerate: bool,
}

impl From<&Metrics> for MetricsJson {
    fn from(m: &Metrics) -> Self {
        MetricsJson {
            accuracy: m.accuracy,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            confusion: m.confusion,
            degenerate: m.degenerate,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SummaryJson {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<&MetricSummary> for SummaryJson {
    fn from(s: &MetricSummary) -> Self {
        SummaryJson {
            accuracy: s.accuracy,
            precision: s.precision,
            recall: s.recall,
            f1: s.f1,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainResultFile {
    pub kind: String,
    pub config: Value,
    pub arch: String,
    pub per_fold: Vec<MetricsJson>,
    pub mean: SummaryJson,
    pub std: SummaryJson,
    pub seed: u64,
    pub best_fold: usize,
    pub dropped_rows: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub c: f64,
    pub per_fold: Vec<MetricsJson>,
    pub mean: SummaryJson,
    pub std: SummaryJson,
    pub converged_folds: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BaselineResultFile {
    pub kind: String,
    pub config: Value,
    pub per_c: Vec<BaselineEntry>,
    pub best_c: f64,
    pub best: SummaryJson,
    pub best_std: SummaryJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmulateRepeat {
    pub seed: u64,
    pub predictions: Vec<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EmulateResultFile {
    pub kind: String,
    pub config: Value,
    pub trial_ids: Vec<String>,
    pub repeats: Vec<EmulateRepeat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<SummaryJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std: Option<SummaryJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantCompareFile {
    pub kind: String,
    pub config: Value,
    pub w_float: Vec<Vec<f64>>,
    pub w_int: Vec<Vec<i8>>,
    pub scale: f64,
    /// max |w - w_int/scale| over all entries.
    pub max_dequant_err: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub float_metrics: Option<MetricsJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub int3_metrics: Option<MetricsJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridRow {
    pub rank: usize,
    pub arch: String,
    pub tau: f64,
    pub eta: f64,
    pub epochs: usize,
    pub gamma: f64,
    pub beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fc1_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_conn: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hidden_scale: Option<usize>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub per_seed_accuracy: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridResultFile {
    pub kind: String,
    pub config: Value,
    pub k_folds: usize,
    pub seeds: Vec<u64>,
    pub rows: Vec<GridRow>,
}

// ---------------------------------------------------------------------------
// Completeness report
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletenessEntry {
    pub trial_id: String,
    pub across_units_per_step: bool,
    pub per_unit_per_step: bool,
    pub per_unit_any: bool,
    pub any_spike: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompletenessReportFile {
    pub kind: String,
    pub config: Value,
    pub trials: Vec<CompletenessEntry>,
    pub n_trials: usize,
    pub n_complete_across_units: usize,
    pub n_complete_per_unit: usize,
    pub n_with_all_units_active: usize,
    pub n_with_any_spike: usize,
}

// ---------------------------------------------------------------------------
// Network dump and output spikes
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NeuronDump {
    pub id: usize,
    pub tau_m_s: f64,
    pub tau_ampa_s: f64,
    pub tau_gabaa_s: f64,
    pub tau_gabab_s: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PopulationDump {
    pub pop: usize,
    pub core: usize,
    pub neurons: Vec<NeuronDump>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SynapseDump {
    pub pre: String,
    pub post: u16,
    #[serde(rename = "type")]
    pub kind: String,
    pub efficacy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkDump {
    pub mismatch_seed: u64,
    pub v_th: f64,
    pub refractory_s: f64,
    pub populations: Vec<PopulationDump>,
    pub synapses: Vec<SynapseDump>,
}

pub fn dump_network(net: &ChipNetwork, mismatch_seed: u64) -> NetworkDump {
    let populations = (0..net.n_populations)
        .map(|pop| PopulationDump {
            pop,
            core: pop + 1,
            neurons: (pop * net.n_per_pop..(pop + 1) * net.n_per_pop)
                .map(|id| {
                    let p = net.neurons[id];
                    NeuronDump {
                        id,
                        tau_m_s: p.tau_m,
                        tau_ampa_s: p.tau_ampa,
                        tau_gabaa_s: p.tau_gabaa,
                        tau_gabab_s: p.tau_gabab,
                    }
                })
                .collect(),
        })
        .collect();
    let synapses = net
        .synapses()
        .iter()
        .map(|s| SynapseDump {
            pre: match s.pre {
                Pre::Generator(g) => format!("gen:{g}"),
                Pre::Neuron(n) => format!("n:{n}"),
            },
            post: s.post,
            kind: match s.kind {
                SynKind::Ampa => "AMPA".into(),
                SynKind::GabaA => "GABA_A".into(),
                SynKind::GabaB => "GABA_B".into(),
            },
            efficacy: s.efficacy,
        })
        .collect();
    NetworkDump {
        mismatch_seed,
        v_th: net.v_th,
        refractory_s: net.refractory_s,
        populations,
        synapses,
    }
}

/// One output-spike record per trial: `{"pop": [...], "neuron": [...],
/// "t_s": [...]}`, arrays index-aligned.
pub fn trial_output_line(out: &TrialOutput) -> String {
    let pops: Vec<String> = out.spikes.iter().map(|s| s.pop.to_string()).collect();
    let neurons: Vec<String> = out.spikes.iter().map(|s| s.neuron.to_string()).collect();
    let times: Vec<String> = out.spikes.iter().map(|s| format!("{:.6}", s.t_s)).collect();
    format!(
        "{{\"pop\":[{}],\"neuron\":[{}],\"t_s\":[{}]}}",
        pops.join(","),
        neurons.join(","),
        times.join(",")
    )
}

// ---------------------------------------------------------------------------
// Report rows
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportRow {
    pub source: String,
    pub model: String,
    pub accuracy: f64,
    pub accuracy_std: f64,
    pub f1: f64,
    pub f1_std: f64,
    pub precision: f64,
    pub precision_std: f64,
    pub recall: f64,
    pub recall_std: f64,
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(
        "source,model,accuracy,accuracy_std,f1,f1_std,precision,precision_std,recall,recall_std\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.source,
            r.model,
            r.accuracy,
            r.accuracy_std,
            r.f1,
            r.f1_std,
            r.precision,
            r.precision_std,
            r.recall,
            r.recall_std
        ));
    }
    out
}
