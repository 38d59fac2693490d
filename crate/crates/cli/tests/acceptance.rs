//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails or exceeds its time budget.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pagbasa::classifiers::{logistic_objective, predict_svm, Hyperparams, ModelKind, TrainedModel};
use pagbasa::corpus::{extract_rows, generate_synthetic, load_corpus, rows_to_dataset, LoadOptions, SynthParams};
use pagbasa::dataset::LabeledDataset;
use pagbasa::evaluation::{
    accuracy, cross_validate, per_class_rates, polysyllabic_profile, stratified_kfold, ConfusionMatrix, ModelSpec,
};
use pagbasa::features::{
    compute_ttr_family, foreign_ratio, lexical_density, lexical_variation, ExtractOptions, FeatureSet, FEATURE_NAMES,
};
use pagbasa::pos::{LexicalCategory, TaggedToken};
use pagbasa::ranking::{information_gain, pearson, rank_features};
use pagbasa::text::Token;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Reference confusion matrices, rows = actual L1..L3.
fn lex_matrix() -> ConfusionMatrix {
    ConfusionMatrix::from_rows(vec![vec![9, 10, 10], vec![12, 11, 7], vec![16, 8, 6]])
}

fn trad_matrix() -> ConfusionMatrix {
    ConfusionMatrix::from_rows(vec![vec![9, 11, 9], vec![9, 14, 7], vec![6, 10, 14]])
}

fn both_matrix() -> ConfusionMatrix {
    ConfusionMatrix::from_rows(vec![vec![15, 7, 7], vec![8, 12, 10], vec![5, 10, 15]])
}

fn reference_accuracy() -> Outcome {
    let cases = [
        ("TRAD+LEX", both_matrix(), 42.0 / 89.0, 0.472, 0.001),
        ("LEX", lex_matrix(), 26.0 / 89.0, 0.290, 0.005),
        ("TRAD", trad_matrix(), 37.0 / 89.0, 0.420, 0.005),
    ];
    let mut detail = Vec::new();
    for (name, cm, exact, printed, tol) in cases {
        let acc = accuracy(&cm).map_err(|e| e.to_string())?;
        check(acc == exact, || format!("{name}: {acc} != trace/total {exact}"))?;
        check((acc - printed).abs() <= tol, || {
            format!("{name}: {acc:.4} vs printed {printed} (tol {tol})")
        })?;
        detail.push(format!("{name}={acc:.3}"));
    }
    Ok(detail.join(" "))
}

fn reference_rates() -> Outcome {
    let printed = [
        (
            "TRAD",
            trad_matrix(),
            ["31.0% / 68.9%", "46.6% / 53.3%", "46.6% / 53.3%"],
        ),
        ("LEX", lex_matrix(), ["31.0% / 68.9%", "36.6% / 63.3%", "20.0% / 80.0%"]),
        (
            "TRAD+LEX",
            both_matrix(),
            ["51.0% / 49.0%", "40.0% / 60.0%", "50.0% / 50.0%"],
        ),
    ];
    let mut mismatches = Vec::new();
    let mut matched = 0;
    for (name, cm, cells) in printed {
        let rates = per_class_rates(&cm).map_err(|e| e.to_string())?;
        for (rate, cell) in rates.iter().zip(cells) {
            let got = rate.to_string();
            if got == cell {
                matched += 1;
            } else {
                mismatches.push(format!("{name} L{}: computed {got}, printed {cell}", rate.level));
            }
        }
    }
    if mismatches.is_empty() {
        Ok(format!("{matched}/9 cells"))
    } else {
        Err(format!("{matched}/9 cells; {}", mismatches.join("; ")))
    }
}

/// Brute-force reference values for the lexical formulas.
struct Oracle {
    ttr: f64,
    root: f64,
    corr: f64,
    bilog: f64,
    noun: f64,
    verb: f64,
    density: f64,
    foreign: f64,
}

fn oracle(items: &[(String, LexicalCategory)]) -> Oracle {
    let n = items.len() as f64;
    let types: BTreeSet<String> = items.iter().map(|(w, _)| w.to_lowercase()).collect();
    let t = types.len() as f64;
    let share = |pred: &dyn Fn(LexicalCategory) -> bool| items.iter().filter(|(_, c)| pred(*c)).count() as f64 / n;
    let bilog = if items.len() <= 1 || types.len() == items.len() {
        1.0
    } else {
        t.ln() / n.ln()
    };
    Oracle {
        ttr: t / n,
        root: t / n.sqrt(),
        corr: t / (2.0 * n).sqrt(),
        bilog,
        noun: share(&|c| c == LexicalCategory::Noun),
        verb: share(&|c| c == LexicalCategory::Verb),
        density: share(&|c| {
            matches!(
                c,
                LexicalCategory::Noun | LexicalCategory::Verb | LexicalCategory::Adjective | LexicalCategory::Adverb
            )
        }),
        foreign: share(&|c| c == LexicalCategory::Foreign),
    }
}

fn random_items(rng: &mut ChaCha8Rng, len: usize) -> Vec<(String, LexicalCategory)> {
    const WORDS: [&str; 12] = [
        "bata", "Bata", "aso", "ASO", "kumain", "maganda", "siya", "ang", "school", "bahay", "tubig", "araw",
    ];
    const CATS: [LexicalCategory; 7] = [
        LexicalCategory::Noun,
        LexicalCategory::Verb,
        LexicalCategory::Adjective,
        LexicalCategory::Adverb,
        LexicalCategory::Pronoun,
        LexicalCategory::Foreign,
        LexicalCategory::Other,
    ];
    (0..len)
        .map(|_| {
            (
                WORDS[rng.random_range(0..WORDS.len())].to_string(),
                CATS[rng.random_range(0..CATS.len())],
            )
        })
        .collect()
}

fn compare_formulas(items: &[(String, LexicalCategory)]) -> Result<(), String> {
    let tagged: Vec<TaggedToken> = items
        .iter()
        .map(|(w, c)| TaggedToken {
            token: Token::new(w.as_str()),
            tag: c.as_str().to_string(),
            category: *c,
        })
        .collect();
    let err = |e: pagbasa::features::FeatureError| e.to_string();
    let ttr = compute_ttr_family(tagged.iter().map(|t| &t.token)).map_err(err)?;
    let expect = oracle(items);
    let pairs = [
        ("ttr", ttr.ttr, expect.ttr),
        ("root_ttr", ttr.root_ttr, expect.root),
        ("corr_ttr", ttr.corr_ttr, expect.corr),
        ("bilog_ttr", ttr.bilog_ttr, expect.bilog),
        (
            "noun ratio",
            lexical_variation(&tagged, LexicalCategory::Noun).map_err(err)?,
            expect.noun,
        ),
        (
            "verb ratio",
            lexical_variation(&tagged, LexicalCategory::Verb).map_err(err)?,
            expect.verb,
        ),
        (
            "lexical density",
            lexical_density(&tagged).map_err(err)?,
            expect.density,
        ),
        ("foreign ratio", foreign_ratio(&tagged).map_err(err)?, expect.foreign),
    ];
    for (name, got, want) in pairs {
        check((got - want).abs() <= 1e-12, || {
            format!("{name}: {got} vs oracle {want} on {items:?}")
        })?;
    }
    check((ttr.corr_ttr - ttr.root_ttr / 2f64.sqrt()).abs() <= 1e-12, || {
        "corr_ttr != root_ttr/sqrt 2".into()
    })
}

fn formula_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut lists = 0;
    for _ in 0..200 {
        let len = rng.random_range(1..60);
        compare_formulas(&random_items(&mut rng, len))?;
        lists += 1;
    }
    let single = vec![("bata".to_string(), LexicalCategory::Noun)];
    compare_formulas(&single)?;
    let tokens = [Token::new("bata")];
    let fam = compute_ttr_family(tokens.iter()).map_err(|e| e.to_string())?;
    check(fam.ttr == 1.0 && fam.bilog_ttr == 1.0, || {
        format!("N = 1 gives {fam:?}")
    })?;

    let distinct: Vec<Token> = ["isa", "dalawa", "tatlo", "apat"]
        .iter()
        .map(|w| Token::new(*w))
        .collect();
    let fam = compute_ttr_family(distinct.iter()).map_err(|e| e.to_string())?;
    check(fam.ttr == 1.0 && fam.bilog_ttr == 1.0, || {
        format!("all-distinct gives {fam:?}")
    })?;
    check(fam.root_ttr == 2.0, || format!("root_ttr {} != 4/sqrt 4", fam.root_ttr))?;

    let repeated: Vec<Token> = ["Aso", "aso", "ASO"].iter().map(|w| Token::new(*w)).collect();
    let fam = compute_ttr_family(repeated.iter()).map_err(|e| e.to_string())?;
    check(fam.bilog_ttr == 0.0 && (fam.ttr - 1.0 / 3.0).abs() < 1e-15, || {
        format!("case folding gives {fam:?}")
    })?;
    check(compute_ttr_family(std::iter::empty::<&Token>()).is_err(), || {
        "empty input accepted".into()
    })?;
    Ok(format!("{} random lists plus boundary cases", lists + 1))
}

/// Three classes, 15 features; class c shifts features c, c+3, ... by +3.
fn separable_dataset(seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..300 {
        let class = i % 3;
        rows.push(
            (0..15)
                .map(|j| rng.random_range(-1.0..1.0) + if j % 3 == class { 3.0 } else { 0.0 })
                .collect(),
        );
        labels.push(class as u8 + 1);
    }
    LabeledDataset::from_rows(rows, labels)
}

fn classifier_sanity() -> Outcome {
    let data = separable_dataset(11);
    let hp = Hyperparams::default();
    let mut accs = Vec::new();
    for kind in [ModelKind::Lr, ModelKind::Svm] {
        let report = cross_validate(&data, &ModelSpec { kind, hyperparams: hp }, 10, 7).map_err(|e| e.to_string())?;
        check(report.accuracy >= 0.95, || {
            format!("{kind} 10-fold accuracy {}", report.accuracy)
        })?;
        accs.push(format!("{kind}={:.3}", report.accuracy));
    }

    // Central differences on the regularized loss.
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..15).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect();
    let targets: Vec<usize> = (0..40).map(|i| i % 3).collect();
    let weights: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..15).map(|_| rng.random_range(-0.5..0.5)).collect())
        .collect();
    let biases: Vec<f64> = (0..3).map(|_| rng.random_range(-0.5..0.5)).collect();
    let lambda = 1e-2;
    let (_, grad_w, grad_b) = logistic_objective(&rows, &targets, &weights, &biases, lambda);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let rel = |analytic: f64, numeric: f64| (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
    for c in 0..3 {
        for j in 0..15 {
            let mut plus = weights.clone();
            let mut minus = weights.clone();
            plus[c][j] += h;
            minus[c][j] -= h;
            let numeric = (logistic_objective(&rows, &targets, &plus, &biases, lambda).0
                - logistic_objective(&rows, &targets, &minus, &biases, lambda).0)
                / (2.0 * h);
            worst = worst.max(rel(grad_w[c][j], numeric));
        }
        let mut plus = biases.clone();
        let mut minus = biases.clone();
        plus[c] += h;
        minus[c] -= h;
        let numeric = (logistic_objective(&rows, &targets, &weights, &plus, lambda).0
            - logistic_objective(&rows, &targets, &weights, &minus, lambda).0)
            / (2.0 * h);
        worst = worst.max(rel(grad_b[c], numeric));
    }
    check(worst <= 1e-6, || format!("gradient relative error {worst:e}"))?;

    let TrainedModel::Svm(model) = TrainedModel::train(ModelKind::Svm, &data, &hp).map_err(|e| e.to_string())? else {
        return Err("expected an SVM model".into());
    };
    for scale in [1e-3, 0.25, 7.0, 1e5] {
        let mut scaled = model.clone();
        scaled.weights.iter_mut().flatten().for_each(|w| *w *= scale);
        scaled.biases.iter_mut().for_each(|b| *b *= scale);
        for _ in 0..500 {
            let x: Vec<f64> = (0..15).map(|_| rng.random_range(-2.0..5.0)).collect();
            let a = predict_svm(&model, &x).map_err(|e| e.to_string())?;
            let b = predict_svm(&scaled, &x).map_err(|e| e.to_string())?;
            check(a == b, || format!("scale {scale} changed prediction {a} -> {b}"))?;
        }
    }
    Ok(format!("{}, max gradient rel err {worst:.1e}", accs.join(" ")))
}

fn synergy() -> Outcome {
    let mut sums = [0.0; 3];
    let sets = [FeatureSet::Trad, FeatureSet::Lex, FeatureSet::Both];
    let seeds = 0..10u64;
    for seed in seeds.clone() {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let manifest =
            generate_synthetic(&SynthParams::synergy().with_seed(seed), dir.path()).map_err(|e| e.to_string())?;
        let corpus = load_corpus(&manifest, &LoadOptions::default()).map_err(|e| e.to_string())?;
        let (rows, errors) = extract_rows(
            &corpus,
            &ExtractOptions {
                seed,
                ..ExtractOptions::default()
            },
        );
        check(errors.is_empty() && corpus.errors.is_empty(), || {
            format!("seed {seed}: extraction errors")
        })?;
        for (sum, set) in sums.iter_mut().zip(sets) {
            let data = rows_to_dataset(&rows, set).map_err(|e| e.to_string())?;
            let spec = ModelSpec {
                kind: ModelKind::Svm,
                hyperparams: Hyperparams {
                    seed,
                    ..Hyperparams::default()
                },
            };
            *sum += cross_validate(&data, &spec, 10, seed)
                .map_err(|e| e.to_string())?
                .accuracy;
        }
    }
    let n = seeds.count() as f64;
    let [trad, lex, both] = sums.map(|s| s / n);
    let detail = format!("mean accuracy TRAD={trad:.3} LEX={lex:.3} BOTH={both:.3}");
    check(both >= trad && both >= lex, || detail.clone())?;
    Ok(detail)
}

fn ranking() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let labels: Vec<u8> = (0..300).map(|i| (i % 3) as u8 + 1).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&l| {
            let mut row: Vec<f64> = (0..FEATURE_NAMES.len()).map(|_| rng.random_range(0.0..1.0)).collect();
            row[6] = f64::from(l);
            row
        })
        .collect();
    let ids = (0..rows.len()).map(|i| format!("d{i}")).collect();
    let data = LabeledDataset::from_full_rows(ids, &rows, labels.clone(), FeatureSet::Both);
    let report = rank_features(&data, 10, 10).map_err(|e| e.to_string())?;
    let top = &report.entries[0];
    check(top.feature == FEATURE_NAMES[6] && top.rank == 1, || {
        format!("top entry is {top:?}")
    })?;
    check((top.info_gain - 3f64.log2()).abs() <= 1e-9, || {
        format!("planted IG {}", top.info_gain)
    })?;
    check(report.entries.len() == 10, || {
        format!("{} entries for top 10", report.entries.len())
    })?;

    let labels: Vec<u8> = (0..3000).map(|_| rng.random_range(1..=3)).collect();
    let noise: Vec<f64> = (0..3000).map(|_| rng.random_range(0.0..1.0)).collect();
    let levels: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
    let ig = information_gain(&noise, &labels, 10).map_err(|e| e.to_string())?;
    let rho = pearson(&noise, &levels).map_err(|e| e.to_string())?;
    check(ig < 0.02 && rho.abs() < 0.05, || {
        format!("independent feature IG {ig}, rho {rho}")
    })?;

    let negated: Vec<f64> = levels.iter().map(|l| -l).collect();
    let up = pearson(&levels, &levels).map_err(|e| e.to_string())?;
    let down = pearson(&negated, &levels).map_err(|e| e.to_string())?;
    check(up == 1.0 && down == -1.0, || {
        format!("pearson on +/-level gives {up}, {down}")
    })?;
    Ok(format!(
        "planted IG={:.9}, noise IG={ig:.4} rho={rho:.4}",
        top.info_gain
    ))
}

fn cv_structure() -> Outcome {
    let labels: Vec<u8> = [(1u8, 29), (2, 30), (3, 30)]
        .iter()
        .flat_map(|&(l, n)| std::iter::repeat_n(l, n))
        .collect();
    let folds = stratified_kfold(&labels, 10, 7).map_err(|e| e.to_string())?;
    let mut seen = vec![0usize; labels.len()];
    for fold in 0..10 {
        let test = folds.test_indices(fold);
        for level in 1..=3u8 {
            let count = test.iter().filter(|&&i| labels[i] == level).count();
            check(count == 2 || count == 3, || {
                format!("fold {fold} has {count} rows of L{level}")
            })?;
        }
        test.iter().for_each(|&i| seen[i] += 1);
    }
    check(seen.iter().all(|&s| s == 1), || "folds are not a partition".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows = labels
        .iter()
        .map(|_| (0..4).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let data = LabeledDataset::from_rows(rows, labels);
    let spec = ModelSpec {
        kind: ModelKind::Svm,
        hyperparams: Hyperparams::default(),
    };
    let report = cross_validate(&data, &spec, 10, 7).map_err(|e| e.to_string())?;
    let sums = report.confusion.row_sums();
    check(sums == [29, 30, 30], || format!("pooled row sums {sums:?}"))?;
    Ok(format!("row sums {sums:?}"))
}

fn polysyllable_growth() -> Outcome {
    let poly = FEATURE_NAMES
        .iter()
        .position(|n| *n == "polysyllabic_count")
        .expect("canonical feature");
    let mut ratios = Vec::new();
    for seed in 0..10u64 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let manifest =
            generate_synthetic(&SynthParams::default().with_seed(seed), dir.path()).map_err(|e| e.to_string())?;
        let corpus = load_corpus(&manifest, &LoadOptions::default()).map_err(|e| e.to_string())?;
        let (rows, _) = extract_rows(
            &corpus,
            &ExtractOptions {
                seed,
                ..ExtractOptions::default()
            },
        );
        let profile = polysyllabic_profile(rows.iter().map(|r| (r.level.unwrap_or(0), r.values[poly] as u64)));
        let totals: Vec<u64> = (1..=3).map(|l| profile.total(l).unwrap_or(0)).collect();
        check(totals[0] < totals[1] && totals[1] < totals[2], || {
            format!("seed {seed}: totals {totals:?}")
        })?;
        let ratio = totals[2] as f64 / totals[0] as f64;
        check((2.0..=4.0).contains(&ratio), || {
            format!("seed {seed}: L3/L1 ratio {ratio:.2}")
        })?;
        ratios.push(ratio);
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    Ok(format!("L3/L1 ratio in [{lo:.2}, {hi:.2}] over 10 seeds"))
}

fn run_cli(args: &[&str], cwd: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pagbasa"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!(
            "pagbasa {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn determinism() -> Outcome {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = root.path();
    for run in ["a", "b"] {
        let dir = root.join(run);
        fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        run_cli(&["--seed", "13", "synth", "--out", "corpus"], &dir)?;
        run_cli(
            &[
                "--seed",
                "13",
                "extract",
                "--manifest",
                "corpus/manifest.csv",
                "--out",
                "features.csv",
            ],
            &dir,
        )?;
        run_cli(
            &[
                "--seed",
                "13",
                "evaluate",
                "--features",
                "features.csv",
                "--report",
                "report.json",
                "--classifier",
                "lr",
            ],
            &dir,
        )?;
        run_cli(
            &[
                "--seed",
                "13",
                "rank",
                "--features",
                "features.csv",
                "--out",
                "ranking.csv",
            ],
            &dir,
        )?;
    }
    let artifacts = [
        "corpus/manifest.csv",
        "corpus/L3_030.txt",
        "features.csv",
        "report.json",
        "ranking.csv",
    ];
    for name in artifacts {
        let a = fs::read(root.join("a").join(name)).map_err(|e| e.to_string())?;
        let b = fs::read(root.join("b").join(name)).map_err(|e| e.to_string())?;
        check(a == b, || format!("{name} differs between runs"))?;
    }
    Ok(format!("{} artifacts byte-identical", artifacts.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 metric reproduction", Duration::from_secs(1), reference_accuracy),
        ("2 per-class rates", Duration::from_secs(1), reference_rates),
        ("3 formula oracle", Duration::from_secs(5), formula_oracle),
        ("4 classifier sanity", Duration::from_secs(30), classifier_sanity),
        ("5 feature-set synergy", Duration::from_secs(120), synergy),
        ("6 ranking", Duration::from_secs(10), ranking),
        ("7 cv structure", Duration::from_secs(1), cv_structure),
        ("8 polysyllable growth", Duration::from_secs(30), polysyllable_growth),
        ("9 determinism", Duration::from_secs(60), determinism),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; took {elapsed:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}) [{elapsed:.2?}]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}) [{elapsed:.2?}]");
            }
        }
    }
    println!("{} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
