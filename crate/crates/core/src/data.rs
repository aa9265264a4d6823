//! Feature datasets: ingestion, closed-form EEG features, z-score
//! normalization, stratified splitting, and synthetic data generation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::rng::Rng;
use crate::{Error, Result};

pub const FEATURE_COUNT: usize = 5;
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["alpha_power", "engagement", "faa", "gte", "gse"];
pub const FEATURE_CSV_HEADER: &str = "subject_id,trial_id,alpha_power,engagement,faa,gte,gse,label";
pub const BAND_CSV_HEADER: &str = "theta,alpha,beta,alpha_left_frontal,alpha_right_frontal";

/// One trial: five physiological features plus the binary difficulty label
/// (0 = easy / 4 objects, 1 = hard / 8 objects).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRecord {
    pub subject_id: String,
    pub trial_id: String,
    pub alpha_power: f64,
    pub engagement: f64,
    pub faa: f64,
    pub gte: f64,
    pub gse: f64,
    pub label: u8,
}

impl FeatureRecord {
    pub fn features(&self) -> [f64; FEATURE_COUNT] {
        [self.alpha_power, self.engagement, self.faa, self.gte, self.gse]
    }

    pub fn set_features(&mut self, f: [f64; FEATURE_COUNT]) {
        self.alpha_power = f[0];
        self.engagement = f[1];
        self.faa = f[2];
        self.gte = f[3];
        self.gse = f[4];
    }
}

/// Band powers feeding the closed-form EEG features.
#[derive(Clone, Debug, PartialEq)]
pub struct BandPowers {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub alpha_left_frontal: f64,
    pub alpha_right_frontal: f64,
}

/// Per-feature z-score statistics fitted on a training split.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationParams {
    pub mean: [f64; FEATURE_COUNT],
    pub std: [f64; FEATURE_COUNT],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub records: Vec<FeatureRecord>,
    /// Set once [`zscore_apply`] has run; `None` for raw data.
    pub normalization: Option<NormalizationParams>,
}

impl Dataset {
    pub fn from_records(records: Vec<FeatureRecord>) -> Self {
        Dataset {
            records,
            normalization: None,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.label).collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let mut counts = [0usize; 2];
        for r in &self.records {
            counts[r.label as usize] += 1;
        }
        counts
    }

    /// New dataset holding clones of the records at `indices`, in order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            normalization: self.normalization.clone(),
        }
    }
}

/// Outcome of CSV ingestion: parsed records plus the number of data rows
/// dropped for non-finite features or a missing label.
#[derive(Clone, Debug)]
pub struct ParsedCsv {
    pub dataset: Dataset,
    pub dropped_rows: usize,
}

/// Parse the feature CSV format (see [`FEATURE_CSV_HEADER`]).
///
/// Rows with any non-finite feature value or an empty/NaN label are dropped
/// and counted; structurally invalid rows (wrong column count, unparseable
/// numbers, labels other than 0/1) are hard errors. Records come back in
/// file order, so parsed count + dropped count = data row count.
pub fn parse_feature_csv(text: &str) -> Result<ParsedCsv> {
    let mut lines = nonempty_lines(text);
    let header = lines.next().ok_or(Error::MalformedHeader {
        expected: FEATURE_CSV_HEADER,
        found: String::new(),
    })?;
    if header.1 != FEATURE_CSV_HEADER {
        return Err(Error::MalformedHeader {
            expected: FEATURE_CSV_HEADER,
            found: header.1.to_string(),
        });
    }

    let mut records = Vec::new();
    let mut dropped = 0usize;
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::MalformedRow {
                row: line_no,
                message: format!("expected 8 fields, found {}", fields.len()),
            });
        }
        let mut features = [0.0f64; FEATURE_COUNT];
        for (k, slot) in features.iter_mut().enumerate() {
            *slot = parse_field(fields[2 + k], FEATURE_NAMES[k], line_no)?;
        }
        let label_field = fields[7].trim();
        if label_field.is_empty() {
            dropped += 1;
            continue;
        }
        let label_value = parse_field(label_field, "label", line_no)?;
        if label_value.is_nan() {
            dropped += 1;
            continue;
        }
        let label = if label_value == 0.0 {
            0u8
        } else if label_value == 1.0 {
            1u8
        } else {
            return Err(Error::LabelOutOfRange {
                row: line_no,
                value: label_value,
            });
        };
        if features.iter().any(|v| !v.is_finite()) {
            dropped += 1;
            continue;
        }
        records.push(FeatureRecord {
            subject_id: fields[0].to_string(),
            trial_id: fields[1].to_string(),
            alpha_power: features[0],
            engagement: features[1],
            faa: features[2],
            gte: features[3],
            gse: features[4],
            label,
        });
    }

    Ok(ParsedCsv {
        dataset: Dataset::from_records(records),
        dropped_rows: dropped,
    })
}

/// Render a dataset in the feature CSV format. Floats use the shortest
/// round-trip representation, so write/parse is lossless.
pub fn feature_csv_string(ds: &Dataset) -> String {
    let mut out = String::from(FEATURE_CSV_HEADER);
    out.push('\n');
    for r in &ds.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.subject_id, r.trial_id, r.alpha_power, r.engagement, r.faa, r.gte, r.gse, r.label
        ));
    }
    out
}

/// Parse the band-power CSV format (see [`BAND_CSV_HEADER`]).
pub fn parse_bandpower_csv(text: &str) -> Result<Vec<BandPowers>> {
    let mut lines = nonempty_lines(text);
    let header = lines.next().ok_or(Error::MalformedHeader {
        expected: BAND_CSV_HEADER,
        found: String::new(),
    })?;
    if header.1 != BAND_CSV_HEADER {
        return Err(Error::MalformedHeader {
            expected: BAND_CSV_HEADER,
            found: header.1.to_string(),
        });
    }
    let mut out = Vec::new();
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::MalformedRow {
                row: line_no,
                message: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let names = ["theta", "alpha", "beta", "alpha_left_frontal", "alpha_right_frontal"];
        let mut vals = [0.0f64; 5];
        for (k, slot) in vals.iter_mut().enumerate() {
            *slot = parse_field(fields[k], names[k], line_no)?;
        }
        out.push(BandPowers {
            theta: vals[0],
            alpha: vals[1],
            beta: vals[2],
            alpha_left_frontal: vals[3],
            alpha_right_frontal: vals[4],
        });
    }
    Ok(out)
}

fn nonempty_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn parse_field(field: &str, name: &str, row: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::MalformedRow {
        row,
        message: format!("cannot parse {name} value `{}`", field.trim()),
    })
}

/// EEG engagement index beta / (alpha + theta).
pub fn compute_engagement_index(bp: &BandPowers) -> Result<f64> {
    let denom = bp.alpha + bp.theta;
    if !(denom > 0.0) {
        return Err(Error::EngagementDomain);
    }
    Ok(bp.beta / denom)
}

/// Frontal alpha asymmetry: ln(right / left) frontal alpha power.
pub fn compute_faa(bp: &BandPowers) -> Result<f64> {
    if !(bp.alpha_right_frontal > 0.0) || !(bp.alpha_left_frontal > 0.0) {
        return Err(Error::FaaDomain);
    }
    Ok(libm::log(bp.alpha_right_frontal / bp.alpha_left_frontal))
}

/// Fit per-feature mean/std (ddof = 0, matching the usual scaler) on a
/// training split. Errors identify any feature with zero variance.
pub fn zscore_fit(train: &Dataset) -> Result<NormalizationParams> {
    let n = train.len();
    if n < 2 {
        return Err(Error::TooFewRecords { need: 2, got: n });
    }
    let mut mean = [0.0f64; FEATURE_COUNT];
    for r in &train.records {
        let f = r.features();
        for j in 0..FEATURE_COUNT {
            mean[j] += f[j];
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut std = [0.0f64; FEATURE_COUNT];
    for r in &train.records {
        let f = r.features();
        for j in 0..FEATURE_COUNT {
            let d = f[j] - mean[j];
            std[j] += d * d;
        }
    }
    for (j, s) in std.iter_mut().enumerate() {
        *s = libm::sqrt(*s / n as f64);
        if *s <= 1e-12 * (1.0 + libm::fabs(mean[j])) {
            return Err(Error::ZeroVariance {
                feature: FEATURE_NAMES[j],
            });
        }
    }
    Ok(NormalizationParams { mean, std })
}

/// Apply `(x - mean) / std` per feature; statistics come from the fitting
/// split only, so applying to a disjoint split does not recenter it.
pub fn zscore_apply(ds: &Dataset, params: &NormalizationParams) -> Dataset {
    let records = ds
        .records
        .iter()
        .map(|r| {
            let mut r = r.clone();
            let mut f = r.features();
            for ((v, m), s) in f.iter_mut().zip(&params.mean).zip(&params.std) {
                *v = (*v - m) / s;
            }
            r.set_features(f);
            r
        })
        .collect();
    Dataset {
        records,
        normalization: Some(params.clone()),
    }
}

/// One cross-validation fold as index lists into the source dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stratified k-fold split. Each class's indices are shuffled with the
/// seed and dealt into k near-equal chunks, so per-fold class counts stay
/// within one record of the global ratio. Deterministic per seed.
pub fn stratified_kfold(ds: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidParam {
            context: format!("k must be >= 2, got {k}"),
        });
    }
    let mut by_class: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for (i, r) in ds.records.iter().enumerate() {
        by_class[r.label as usize].push(i);
    }
    for (class, idx) in by_class.iter().enumerate() {
        if idx.len() < k {
            return Err(Error::ClassTooSmall {
                class: class as u8,
                count: idx.len(),
                k,
            });
        }
    }

    let mut rng = Rng::new(seed);
    let mut test_folds: Vec<Vec<usize>> = (0..k).map(|_| Vec::new()).collect();
    for idx in by_class.iter_mut() {
        rng.shuffle(idx);
        let base = idx.len() / k;
        let rem = idx.len() % k;
        let mut cursor = 0;
        for (f, fold) in test_folds.iter_mut().enumerate() {
            let take = base + usize::from(f < rem);
            fold.extend_from_slice(&idx[cursor..cursor + take]);
            cursor += take;
        }
    }

    let folds = test_folds
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let train = (0..ds.len()).filter(|i| test.binary_search(i).is_err()).collect();
            Fold { train, test }
        })
        .collect();
    Ok(folds)
}

/// Two isotropic Gaussian clusters in feature space, class means separated
/// by `separation` along a seed-fixed random unit direction, balanced
/// labels. A desk-scale stand-in for the closed trial dataset.
pub fn generate_synthetic(n: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::BadSyntheticSize { n });
    }
    let mut rng = Rng::new(seed);
    let raw = rng.normal_vec(FEATURE_COUNT);
    let norm = libm::sqrt(raw.iter().map(|v| v * v).sum::<f64>());
    let direction: Vec<f64> = raw.iter().map(|v| v / norm).collect();

    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 2) as u8;
        let sign = if label == 1 { 1.0 } else { -1.0 };
        let mut f = [0.0f64; FEATURE_COUNT];
        for (j, slot) in f.iter_mut().enumerate() {
            *slot = sign * 0.5 * separation * direction[j] + rng.normal();
        }
        records.push(FeatureRecord {
            subject_id: format!("s{:02}", i % 10),
            trial_id: format!("t{i:05}"),
            alpha_power: f[0],
            engagement: f[1],
            faa: f[2],
            gte: f[3],
            gse: f[4],
            label,
        });
    }
    Ok(Dataset::from_records(records))
}
