//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (run with `cargo test --test acceptance -- --nocapture` to see
//! them). Every tolerance is pinned in code.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use spikeload_core::baseline::{logreg_gradient, logreg_loss, train_logreg};
use spikeload_core::data::{generate_synthetic, stratified_kfold, zscore_apply, zscore_fit, Dataset};
use spikeload_core::decode::{classify_burst, DecoderThresholds, RateWindows};
use spikeload_core::encoder::{encode, raster_to_events, LifEncoderParams};
use spikeload_core::eval::{compute_metrics, emulate_predict, hw_eval, run_cv, FoldModel, HwEvalConfig};
use spikeload_core::grid::{fit_grid_point, GridPoint};
use spikeload_core::hwemu::{build_network, BuildParams, EmuRunParams, MismatchConfig};
use spikeload_core::quant::{evaluate_quantized, predict_quantized, quantize_int3};
use spikeload_core::rng::Rng;
use spikeload_core::snn::SnnModel;

/// Training recipe used by the synthetic-data criteria. The published tau
/// grid leaves the spike-count code constant over z-scored inputs, so the
/// delta rule gets no feature-specific gradient there; tau = 19.6 puts the
/// count step near the feature median (see README).
fn synthetic_recipe(beta: f64) -> GridPoint {
    GridPoint {
        tau: 19.6,
        eta: 0.01,
        epochs: 60,
        gamma: 0.01,
        beta,
        hidden: None,
    }
}

fn single_weights(model: &SnnModel) -> Vec<Vec<f64>> {
    match model {
        SnnModel::Single(net) => net.w.clone(),
        SnnModel::Hidden(_) => panic!("expected single-layer model"),
    }
}

/// Criterion 1: conditional reproduction of the published results on the
/// original 217-trial
/// feature CSV (published best config seed=31, tau=31, gamma=0.01,
/// eta=0.01, 25 epochs). Skipped as unverifiable at desk scale when the
/// dataset is not supplied.
#[test]
fn criterion_1_published_reproduction_when_dataset_present() {
    let start = Instant::now();
    let path = std::env::var_os("SPIKELOAD_ATC_CSV")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace_root().join("data/atc_features.csv"));
    let Ok(text) = std::fs::read_to_string(&path) else {
        println!(
            "criterion 1: SKIP - original dataset not supplied ({} absent); unverifiable at desk scale",
            path.display()
        );
        return;
    };
    let parsed = spikeload_core::data::parse_feature_csv(&text).expect("dataset parses");
    let ds = parsed.dataset;
    let point = GridPoint {
        tau: 31.0,
        eta: 0.01,
        epochs: 25,
        gamma: 0.01,
        beta: 0.9,
        hidden: None,
    };
    let seed = 31u64;

    let cv = run_cv(|t, s| fit_grid_point(t, &point, s), &ds, 5, seed, "published best").unwrap();
    println!("criterion 1: float 5-fold accuracy {:.4} (target 0.806 +/- 0.05)", cv.mean.accuracy);

    // Quantize the best fold's weights, then re-score every fold frozen.
    let folds = stratified_kfold(&ds, 5, seed).unwrap();
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for fold in &folds {
        let train = ds.subset(&fold.train);
        let test = ds.subset(&fold.test);
        let norm = zscore_fit(&train).unwrap();
        let clf = fit_grid_point(&zscore_apply(&train, &norm), &point, seed).unwrap();
        let test_n = zscore_apply(&test, &norm);
        let y_pred: Vec<u8> = test_n.records.iter().map(|r| clf.predict(&r.features())).collect();
        let acc = compute_metrics(&test_n.labels(), &y_pred).unwrap().accuracy;
        if best.as_ref().is_none_or(|(b, _)| acc > *b) {
            best = Some((acc, single_weights(&clf.model)));
        }
    }
    let qw = quantize_int3(&best.unwrap().1).unwrap();
    let out = spikeload_core::snn::OutputLifParams::new(point.beta, point.gamma);
    let enc = LifEncoderParams::with_tau(point.tau);
    let mut q_acc = 0.0;
    for fold in &folds {
        let train = ds.subset(&fold.train);
        let test = ds.subset(&fold.test);
        let norm = zscore_fit(&train).unwrap();
        let m = evaluate_quantized(&qw, &out, &enc, &zscore_apply(&test, &norm)).unwrap();
        q_acc += m.accuracy;
    }
    q_acc /= folds.len() as f64;
    println!("criterion 1: int3 frozen accuracy {q_acc:.4} (target 0.769 +/- 0.05)");

    let norm = zscore_fit(&ds).unwrap();
    let ds_n = zscore_apply(&ds, &norm);
    let trials: Vec<_> = ds_n
        .records
        .iter()
        .map(|r| (raster_to_events(&encode(&r.features(), &enc)), r.label))
        .collect();
    let hw = hw_eval(
        &qw,
        &trials,
        &HwEvalConfig {
            n_trials: 5,
            mismatch: MismatchConfig {
                cv_weight: 0.2,
                cv_tau: 0.2,
                seed: 100,
            },
            ..Default::default()
        },
    )
    .unwrap();
    println!("criterion 1: emulator accuracy {:.4} (target 0.735 +/- 0.07)", hw.mean.accuracy);

    assert!((cv.mean.accuracy - 0.806).abs() <= 0.05, "criterion 1 FAIL: float accuracy");
    assert!((q_acc - 0.769).abs() <= 0.05, "criterion 1 FAIL: quantized accuracy");
    assert!((hw.mean.accuracy - 0.735).abs() <= 0.07, "criterion 1 FAIL: emulator accuracy");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "criterion 1 FAIL: runtime {elapsed:.0}s >= 10 min");
    println!("criterion 1: PASS ({elapsed:.1}s)");
}

/// Criterion 2: float-to-int3 accuracy drop <= 10 points mean on
/// separation-3 synthetic data across 5 seeds.
#[test]
fn criterion_2_quantization_fidelity() {
    let start = Instant::now();
    let point = synthetic_recipe(0.95);
    let enc = LifEncoderParams::with_tau(point.tau);
    let out = spikeload_core::snn::OutputLifParams::new(point.beta, point.gamma);
    let mut drops = Vec::new();
    for seed in 0..5u64 {
        let ds = generate_synthetic(200, 3.0, seed).unwrap();
        let folds = stratified_kfold(&ds, 5, seed).unwrap();
        let mut float_acc = 0.0;
        let mut int3_acc = 0.0;
        for fold in &folds {
            let train = ds.subset(&fold.train);
            let test = ds.subset(&fold.test);
            let norm = zscore_fit(&train).unwrap();
            let train_n = zscore_apply(&train, &norm);
            let test_n = zscore_apply(&test, &norm);
            let clf = fit_grid_point(&train_n, &point, seed).unwrap();
            let y_pred: Vec<u8> = test_n.records.iter().map(|r| clf.predict(&r.features())).collect();
            float_acc += compute_metrics(&test_n.labels(), &y_pred).unwrap().accuracy;
            let qw = quantize_int3(&single_weights(&clf.model)).unwrap();
            int3_acc += evaluate_quantized(&qw, &out, &enc, &test_n).unwrap().accuracy;
        }
        drops.push((float_acc - int3_acc) / folds.len() as f64);
    }
    let mean_drop = drops.iter().sum::<f64>() / drops.len() as f64;
    let elapsed = start.elapsed().as_secs_f64();
    println!("criterion 2: mean float->int3 drop {mean_drop:+.4} over 5 seeds (limit +0.10), drops {drops:?}");
    assert!(mean_drop <= 0.10, "criterion 2 FAIL: mean drop {mean_drop}");
    assert!(elapsed < 60.0, "criterion 2 FAIL: runtime {elapsed:.0}s >= 1 min");
    println!("criterion 2: PASS ({elapsed:.1}s)");
}

/// Shared setup for criteria 3 and 4: 100 synthetic trials, a single-layer
/// model trained on them (beta 0.7 so the quantized forward pass stays
/// responsive), and its int3 quantization.
fn emulator_fixture() -> (Dataset, LifEncoderParams, spikeload_core::snn::OutputLifParams, spikeload_core::quant::QuantizedWeights) {
    let point = synthetic_recipe(0.7);
    let ds = generate_synthetic(100, 6.0, 42).unwrap();
    let norm = zscore_fit(&ds).unwrap();
    let ds_n = zscore_apply(&ds, &norm);
    let clf = fit_grid_point(&ds_n, &point, 0).unwrap();
    let qw = quantize_int3(&single_weights(&clf.model)).unwrap();
    let out = *clf.model.out_params();
    (ds_n, clf.enc.clone(), out, qw)
}

/// Criterion 3: with zero mismatch and default decoder thresholds, the
/// emulator + burst decoder agrees with the quantized software argmax on
/// at least 90 of 100 trials.
#[test]
fn criterion_3_emulator_software_agreement() {
    let start = Instant::now();
    let (ds_n, enc, out, qw) = emulator_fixture();
    let net = build_network(&qw, &MismatchConfig::none(0), &BuildParams::default()).unwrap();
    let run = EmuRunParams::default();
    let th = DecoderThresholds::default();
    let mut agree = 0usize;
    for r in &ds_n.records {
        let raster = encode(&r.features(), &enc);
        let sw = predict_quantized(&qw, &out, &raster).unwrap();
        let hw = emulate_predict(&net, &raster_to_events(&raster), &run, 0.0025, &th).unwrap();
        agree += usize::from(sw == hw);
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!("criterion 3: software/emulator agreement {agree}/100 (need >= 90)");
    assert!(agree >= 90, "criterion 3 FAIL: agreement {agree}/100");
    assert!(elapsed < 120.0, "criterion 3 FAIL: runtime {elapsed:.0}s >= 2 min");
    println!("criterion 3: PASS ({elapsed:.1}s)");
}

/// Criterion 4: five repeated inferences at mismatch CV 0.2 on the same
/// 100 trials spread by at most 3 accuracy points (std).
#[test]
fn criterion_4_hardware_variability_envelope() {
    let start = Instant::now();
    let (ds_n, enc, _, qw) = emulator_fixture();
    let trials: Vec<_> = ds_n
        .records
        .iter()
        .map(|r| (raster_to_events(&encode(&r.features(), &enc)), r.label))
        .collect();
    let hw = hw_eval(
        &qw,
        &trials,
        &HwEvalConfig {
            n_trials: 5,
            mismatch: MismatchConfig {
                cv_weight: 0.2,
                cv_tau: 0.2,
                seed: 100,
            },
            ..Default::default()
        },
    )
    .unwrap();
    let accs: Vec<f64> = hw.per_trial.iter().map(|m| m.accuracy).collect();
    let elapsed = start.elapsed().as_secs_f64();
    println!(
        "criterion 4: repeated accuracies {accs:?}, mean {:.4} std {:.4} (limit 0.03)",
        hw.mean.accuracy, hw.std.accuracy
    );
    assert!(hw.std.accuracy <= 0.03, "criterion 4 FAIL: std {}", hw.std.accuracy);
    assert!(elapsed < 300.0, "criterion 4 FAIL: runtime {elapsed:.0}s >= 5 min");
    println!("criterion 4: PASS ({elapsed:.1}s)");
}

/// Independent transcription of the published burst-based classification
/// pseudocode, kept deliberately literal.
fn burst_oracle(rates: &RateWindows, th: &DecoderThresholds) -> u8 {
    let max_of = |row: &[f64]| row.iter().cloned().fold(0.0f64, f64::max);
    let max1 = max_of(&rates.rates[0]);
    let max2 = max_of(&rates.rates[1]);
    if max1 > th.zero_hz && max2 > th.zero_hz {
        if (max1 - max2).abs() >= th.diff_hz {
            // population with higher max rate
            if max2 > max1 {
                1
            } else {
                0
            }
        } else {
            let mut offset = th.offset_hz;
            let count = |row: &[f64], m: f64, off: f64| row.iter().filter(|&&r| r >= m - off).count();
            let mut c1 = count(&rates.rates[0], max1, offset);
            let mut c2 = count(&rates.rates[1], max2, offset);
            while c1 == c2 && offset < th.limit_hz {
                offset += th.offset_step_hz;
                c1 = count(&rates.rates[0], max1, offset);
                c2 = count(&rates.rates[1], max2, offset);
            }
            // population with more counts; residual tie -> class 0
            if c2 > c1 {
                1
            } else {
                0
            }
        }
    } else if max1 > th.zero_hz || max2 > th.zero_hz {
        // only that population
        if max2 > th.zero_hz {
            1
        } else {
            0
        }
    } else {
        // population with more total spikes
        let t1: f64 = rates.rates[0].iter().sum();
        let t2: f64 = rates.rates[1].iter().sum();
        if t2 > t1 {
            1
        } else {
            0
        }
    }
}

fn random_rate_table(rng: &mut Rng) -> RateWindows {
    let n_windows = 4 + rng.below(61);
    let row = |rng: &mut Rng| -> Vec<f64> { (0..n_windows).map(|_| (rng.below(31) * 10) as f64).collect() };
    RateWindows {
        window_s: 0.0025,
        n_neurons: 20,
        rates: [row(rng), row(rng)],
    }
}

/// Criterion 5: implementation matches the independent pseudocode
/// transcription on 10,000 random rate tables, 100% agreement.
#[test]
fn criterion_5_burst_rule_oracle_equivalence() {
    let mut rng = Rng::new(0x0a1c0);
    let th = DecoderThresholds::default();
    let mut mismatches = 0usize;
    for _ in 0..10_000 {
        let rates = random_rate_table(&mut rng);
        if classify_burst(&rates, &th) != burst_oracle(&rates, &th) {
            mismatches += 1;
        }
    }
    println!("criterion 5: oracle mismatches {mismatches}/10000 (need 0)");
    assert_eq!(mismatches, 0, "criterion 5 FAIL");
    println!("criterion 5: PASS");
}

/// Criterion 6: monotone spike counts over the x grid for tau in
/// {15, 31, 40}, and the x = 0, tau = 31 case spikes exactly once at the
/// closed-form step.
#[test]
fn criterion_6_encoder_properties() {
    for tau in [15.0, 31.0, 40.0] {
        let p = LifEncoderParams::with_tau(tau);
        let mut prev = 0usize;
        let mut x = -3.0;
        while x <= 3.0 + 1e-9 {
            let count = encode(&[x], &p).unit_spikes(0);
            assert!(count >= prev, "criterion 6 FAIL: tau {tau} count drop at x {x}");
            prev = count;
            x += 0.1;
        }
    }

    // Closed form: from reset, V after m updates is -65 * (1 - 1/tau)^m;
    // the spike lands on the first step where that exceeds -50.
    let tau = 31.0f64;
    let mut expected_step = 1usize;
    while -65.0 * (1.0 - 1.0 / tau).powi(expected_step as i32) <= -50.0 {
        expected_step += 1;
    }
    assert_eq!(expected_step, 9, "criterion 6: derived crossing step");
    let raster = encode(&[0.0], &LifEncoderParams::with_tau(31.0));
    let spikes: Vec<usize> = (0..16).filter(|&t| raster.get(0, t)).collect();
    println!("criterion 6: tau 31, x 0 spikes at {spikes:?} (expect [9]); monotone over grid");
    assert_eq!(spikes, vec![9], "criterion 6 FAIL: expected single spike at step 9");
    println!("criterion 6: PASS");
}

/// Criterion 7: quantization invariants on 1,000 random matrices plus the
/// published deployment matrix from its float pre-image.
#[test]
fn criterion_7_quantization_properties() {
    let mut rng = Rng::new(0x4a11);
    let mut checked = 0usize;
    while checked < 1000 {
        let rows = 1 + rng.below(3);
        let cols = 1 + rng.below(6);
        let w: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.normal() * (2.0 * rng.normal()).exp()).collect())
            .collect();
        let Ok(qw) = quantize_int3(&w) else { continue };
        checked += 1;

        let flat_w: Vec<f64> = w.iter().flatten().copied().collect();
        let flat_q: Vec<i8> = qw.w_int.iter().flatten().copied().collect();
        for (&q, &v) in flat_q.iter().zip(&flat_w) {
            assert!((-3..=3).contains(&q), "criterion 7 FAIL: range");
            assert!(q == 0 || (q > 0) == (v > 0.0), "criterion 7 FAIL: sign");
        }
        for i in 0..flat_w.len() {
            for j in 0..flat_w.len() {
                if flat_w[i] >= flat_w[j] {
                    assert!(flat_q[i] >= flat_q[j], "criterion 7 FAIL: monotonicity");
                }
            }
        }
        let again = quantize_int3(&qw.as_float()).unwrap();
        assert_eq!(again.w_int, qw.w_int, "criterion 7 FAIL: idempotence");
    }

    // Published matrix from a float pre-image (scale 3 / 1.2 = 2.5).
    let qw = quantize_int3(&[
        vec![0.1, -0.4, -0.35, 1.2, -0.8],
        vec![-0.05, 0.45, 0.5, -1.15, 0.9],
    ])
    .unwrap();
    println!("criterion 7: invariants on 1000 matrices; pre-image -> {:?}", qw.w_int);
    assert_eq!(
        qw.w_int,
        vec![vec![0, -1, -1, 3, -2], vec![0, 1, 1, -3, 2]],
        "criterion 7 FAIL: published matrix"
    );
    println!("criterion 7: PASS");
}

/// Criterion 8: on separation-6 synthetic data the single-layer SNN
/// reaches 0.90 held-out accuracy and the logistic baseline 0.98; the
/// analytic gradient matches central finite differences to 1e-6.
#[test]
fn criterion_8_delta_rule_and_logreg_sanity() {
    let ds = generate_synthetic(200, 6.0, 0).unwrap();

    let point = synthetic_recipe(0.95);
    let snn_cv = run_cv(|t, s| fit_grid_point(t, &point, s), &ds, 5, 31, "snn").unwrap();
    println!("criterion 8: single-layer SNN 5-fold accuracy {:.4} (need >= 0.90)", snn_cv.mean.accuracy);
    assert!(snn_cv.mean.accuracy >= 0.90, "criterion 8 FAIL: SNN accuracy");

    let lr_cv = run_cv(
        |train, _| Ok(train_logreg(train, 1.0, 5000, 1e-8)?.model),
        &ds,
        5,
        31,
        "logreg",
    )
    .unwrap();
    println!("criterion 8: logistic baseline 5-fold accuracy {:.4} (need >= 0.98)", lr_cv.mean.accuracy);
    assert!(lr_cv.mean.accuracy >= 0.98, "criterion 8 FAIL: LR accuracy");

    // Gradient check on random parameters over the normalized dataset.
    let norm = zscore_fit(&ds).unwrap();
    let ds_n = zscore_apply(&ds, &norm);
    let mut rng = Rng::new(99);
    let h = 1e-5;
    for _ in 0..5 {
        let mut w = [0.0f64; 5];
        for v in w.iter_mut() {
            *v = rng.normal();
        }
        let b = rng.normal();
        let (gw, gb) = logreg_gradient(&ds_n, &w, b, 1.0);
        for j in 0..5 {
            let mut wp = w;
            let mut wm = w;
            wp[j] += h;
            wm[j] -= h;
            let fd = (logreg_loss(&ds_n, &wp, b, 1.0) - logreg_loss(&ds_n, &wm, b, 1.0)) / (2.0 * h);
            let rel = (gw[j] - fd).abs() / fd.abs().max(1e-8);
            assert!(rel < 1e-6, "criterion 8 FAIL: gradient rel err {rel}");
        }
        let fd_b = (logreg_loss(&ds_n, &w, b + h, 1.0) - logreg_loss(&ds_n, &w, b - h, 1.0)) / (2.0 * h);
        let rel_b = (gb - fd_b).abs() / fd_b.abs().max(1e-8);
        assert!(rel_b < 1e-6, "criterion 8 FAIL: bias gradient rel err {rel_b}");
    }
    println!("criterion 8: PASS (gradient matches finite differences to 1e-6)");
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn run_cli(dir: &Path, args: &[&str]) {
    let status = Command::new(env!("CARGO_BIN_EXE_spikeload"))
        .current_dir(dir)
        .args(args)
        .status()
        .expect("spawn spikeload");
    assert!(status.success(), "spikeload {args:?} failed in {}", dir.display());
}

/// Criterion 9: every stage re-run from its emitted config is
/// byte-identical, including the mismatch-seeded emulator.
#[test]
fn criterion_9_stage_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let pass = |name: &str| -> PathBuf {
        let dir = tmp.path().join(name);
        std::fs::create_dir(&dir).unwrap();
        let cfg = "{\"snn.tau\": 19.6, \"snn.epochs\": 60, \"snn.beta\": 0.95, \"snn.seed\": 0}";
        std::fs::write(dir.join("cfg.json"), cfg).unwrap();
        run_cli(&dir, &["synth-data", "--n", "60", "--separation", "6", "--seed", "0", "--out", "features.csv"]);
        run_cli(&dir, &["encode", "--in", "features.csv", "--tau", "19.6", "--out", "events.jsonl"]);
        run_cli(&dir, &["train", "--arch", "single", "--in", "features.csv", "--config", "cfg.json", "--out-model", "model.json"]);
        run_cli(&dir, &["quantize", "--model", "model.json", "--out", "qmodel.json", "--in", "features.csv"]);
        run_cli(
            &dir,
            &[
                "emulate", "--qmodel", "qmodel.json", "--events", "events.jsonl", "--labels", "features.csv",
                "--mismatch-cv", "0.2", "--trials", "3", "--out", "emu.json", "--out-spikes", "spikes.jsonl",
            ],
        );
        run_cli(&dir, &["baseline", "--in", "features.csv", "--out", "lr.json"]);
        run_cli(
            &dir,
            &["report", "--results", "model.json.metrics.json", "lr.json", "emu.json", "--out", "report.csv"],
        );
        dir
    };

    let a = pass("a");
    let b = pass("b");
    let artifacts = [
        "features.csv",
        "events.jsonl",
        "events.jsonl.completeness.json",
        "events.jsonl.norm.json",
        "model.json",
        "model.json.metrics.json",
        "qmodel.json",
        "qmodel.json.compare.json",
        "emu.json",
        "spikes.jsonl",
        "lr.json",
        "report.csv",
        "report.csv.json",
    ];
    for name in artifacts {
        let fa = std::fs::read(a.join(name)).unwrap_or_else(|_| panic!("missing {name} in first run"));
        let fb = std::fs::read(b.join(name)).unwrap_or_else(|_| panic!("missing {name} in second run"));
        assert_eq!(fa, fb, "criterion 9 FAIL: {name} differs between identical runs");
    }

    // Re-run two seeded stages from their *emitted* sidecar configs, with
    // no flags beyond the paths, and compare bytes again.
    let c = tmp.path().join("c");
    std::fs::create_dir(&c).unwrap();
    std::fs::copy(a.join("features.csv.config.json"), c.join("synth.config.json")).unwrap();
    run_cli(&c, &["synth-data", "--config", "synth.config.json", "--out", "features.csv"]);
    assert_eq!(
        std::fs::read(a.join("features.csv")).unwrap(),
        std::fs::read(c.join("features.csv")).unwrap(),
        "criterion 9 FAIL: synth-data re-run from emitted config differs"
    );
    std::fs::copy(a.join("emu.json.config.json"), c.join("emu.config.json")).unwrap();
    std::fs::copy(a.join("events.jsonl"), c.join("events.jsonl")).unwrap();
    std::fs::copy(a.join("qmodel.json"), c.join("qmodel.json")).unwrap();
    run_cli(
        &c,
        &[
            "emulate", "--qmodel", "qmodel.json", "--events", "events.jsonl", "--labels", "features.csv",
            "--config", "emu.config.json", "--out", "emu.json", "--out-spikes", "spikes.jsonl",
        ],
    );
    for name in ["emu.json", "spikes.jsonl"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(c.join(name)).unwrap(),
            "criterion 9 FAIL: {name} differs when re-run from emitted config"
        );
    }
    println!("criterion 9: PASS - all stage outputs byte-identical across re-runs");
}
