//! End-to-end runs of the binary's pipelines through the library
//! entry point, on real files in temporary directories.

use std::fs;
use std::path::Path;

use ugcbench_core::corpus_io::write_embeddings;
use ugcbench_core::distill::{FeatureMode, Student, StudentConfig};

fn ugcbench(args: &[&str]) -> i32 {
    let mut argv = vec!["ugcbench"];
    argv.extend_from_slice(args);
    ugcbench_cli::run(argv)
}

fn s(path: &Path) -> String {
    path.to_str().expect("utf-8 path").to_string()
}

fn read_json(path: &Path) -> serde_json::Value {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Sixty sentences built from words the bundled lexicons know, so the
/// noisy side actually differs from the clean side.
fn demo_corpus() -> Vec<String> {
    let templates = [
        "people are going to love this tomorrow",
        "i will see you there on Monday because it is easy",
        "my friend said they would be right back as soon as possible",
        "she cannot believe the weather is great today",
        "we are definitely going to the movies tomorrow night",
        "do not forget to bring your laptop to work",
    ];
    (0..60)
        .map(|i| format!("{} number {i}", templates[i % templates.len()]))
        .collect()
}

fn write_corpus_file(path: &Path, lines: &[String]) {
    let mut text = lines.join("\n");
    text.push('\n');
    fs::write(path, text).unwrap();
}

#[test]
fn augment_writes_aligned_files_sidecar_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus.txt");
    write_corpus_file(&input, &demo_corpus());
    let out_std = dir.path().join("std.txt");
    let out_ugc = dir.path().join("ugc.txt");

    let code = ugcbench(&[
        "augment",
        "--input",
        &s(&input),
        "--out-std",
        &s(&out_std),
        "--out-ugc",
        &s(&out_ugc),
        "--p-all",
        "0.6",
        "--seed",
        "7",
        "--quiet",
    ]);
    assert_eq!(code, 0);

    let stds: Vec<String> = fs::read_to_string(&out_std)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    let ugcs: Vec<String> = fs::read_to_string(&out_ugc)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(stds.len(), 60);
    assert_eq!(ugcs.len(), 60);
    assert_eq!(stds, demo_corpus(), "the clean side is the input, verbatim");
    assert_ne!(ugcs, stds, "at p 0.6 something must have changed");

    let applied = fs::read_to_string(dir.path().join("ugc.txt.applied.tsv")).unwrap();
    assert_eq!(applied.lines().count(), 60);
    assert!(applied.lines().next().unwrap().starts_with("0\t"));

    let manifest = read_json(&dir.path().join("std.txt.manifest.json"));
    assert_eq!(manifest["command"], "augment");
    assert_eq!(manifest["seeds"][0], 7);
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 16);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
}

#[test]
fn augment_is_deterministic_per_seed_and_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus.txt");
    write_corpus_file(&input, &demo_corpus());
    let out_std = dir.path().join("std.txt");
    let out_ugc = dir.path().join("ugc.txt");

    // Successive runs overwrite the same output paths, so the digest
    // comparison isolates seed and thread count.
    let run = |seed: &str, threads: &str| {
        let code = ugcbench(&[
            "augment",
            "--input",
            &s(&input),
            "--out-std",
            &s(&out_std),
            "--out-ugc",
            &s(&out_ugc),
            "--p-all",
            "0.6",
            "--seed",
            seed,
            "--threads",
            threads,
            "--chunk-size",
            "7",
            "--quiet",
        ]);
        assert_eq!(code, 0);
        (
            fs::read(&out_ugc).unwrap(),
            read_json(&dir.path().join("std.txt.manifest.json")),
        )
    };

    let (a, ma) = run("7", "1");
    let (b, mb) = run("7", "8");
    let (c, mc) = run("8", "1");
    assert_eq!(a, b, "worker count must not change the output bytes");
    assert_eq!(
        ma["config_digest"], mb["config_digest"],
        "thread count is not part of the configuration digest"
    );
    assert_ne!(a, c, "a different seed changes the output");
    assert_ne!(
        ma["config_digest"], mc["config_digest"],
        "the seed is part of the configuration digest"
    );
}

#[test]
fn explicit_transform_subset_applies_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus.txt");
    let lines: Vec<String> = (0..40).map(|_| "love is all".to_string()).collect();
    write_corpus_file(&input, &lines);
    let out_std = dir.path().join("std.txt");
    let out_ugc = dir.path().join("ugc.txt");

    let code = ugcbench(&[
        "augment",
        "--input",
        &s(&input),
        "--out-std",
        &s(&out_std),
        "--out-ugc",
        &s(&out_ugc),
        "--transforms",
        "leet",
        "--seed",
        "7",
        "--quiet",
    ]);
    assert_eq!(code, 0);

    let ugc: Vec<String> = fs::read_to_string(&out_ugc)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    assert!(
        ugc.iter().any(|l| l != "love is all"),
        "glyph substitution must hit at least one of forty lines"
    );
    // The sidecar records the families that changed each line: here
    // either nothing (the substitution missed every glyph) or leet,
    // never another family.
    let applied = fs::read_to_string(dir.path().join("ugc.txt.applied.tsv")).unwrap();
    for (line, ugc_line) in applied.lines().zip(&ugc) {
        let (_, families) = line.split_once('\t').unwrap();
        if ugc_line == "love is all" {
            assert_eq!(families, "", "an unchanged line lists no family: {line:?}");
        } else {
            assert_eq!(families, "leet", "only the requested family fires: {line:?}");
        }
    }
}

#[test]
fn unknown_transform_id_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus.txt");
    write_corpus_file(&input, &demo_corpus());
    let code = ugcbench(&[
        "augment",
        "--input",
        &s(&input),
        "--out-std",
        &s(&dir.path().join("a")),
        "--out-ugc",
        &s(&dir.path().join("b")),
        "--transforms",
        "sarcasm",
        "--quiet",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn missing_input_is_an_io_error() {
    let code = ugcbench(&[
        "augment",
        "--input",
        "/nonexistent/corpus.txt",
        "--out-std",
        "/tmp/unused_a",
        "--out-ugc",
        "/tmp/unused_b",
        "--quiet",
    ]);
    assert_eq!(code, 2);
}

/// The full desk pipeline: augment, encode a reference, train, pick
/// the best checkpoint, validate it, and evaluate alignment.
#[test]
fn train_eval_pipeline_reproduces_its_best_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("corpus.txt");
    write_corpus_file(&input, &demo_corpus());
    let out_std = dir.path().join("std.txt");
    let out_ugc = dir.path().join("ugc.txt");
    assert_eq!(
        ugcbench(&[
            "augment",
            "--input",
            &s(&input),
            "--out-std",
            &s(&out_std),
            "--out-ugc",
            &s(&out_ugc),
            "--p-all",
            "0.4",
            "--seed",
            "5",
            "--quiet",
        ]),
        0
    );

    let teacher = dir.path().join("teacher.bin");
    assert_eq!(
        ugcbench(&[
            "embed",
            "--input",
            &s(&out_std),
            "--out",
            &s(&teacher),
            "--teacher-seed",
            "99",
            "--dim",
            "6",
            "--quiet",
        ]),
        0
    );
    assert!(teacher.is_file());
    assert!(dir.path().join("teacher.bin.meta.json").is_file());

    let train_once = |tag: &str| -> serde_json::Value {
        let run_dir = dir.path().join(format!("run_{tag}"));
        let code = ugcbench(&[
            "train",
            "--pairs-std",
            &s(&out_std),
            "--pairs-ugc",
            &s(&out_ugc),
            "--teacher-emb",
            &s(&teacher),
            "--mode",
            "word",
            "--out-dir",
            &s(&run_dir),
            "--buckets",
            "256",
            "--hidden",
            "16",
            "--checkpoint-every",
            "5",
            "--epochs",
            "2",
            "--seed",
            "11",
            "--quiet",
        ]);
        assert_eq!(code, 0);
        read_json(&run_dir.join("best.json"))
    };

    let best_a = train_once("a");
    let best_b = train_once("b");
    assert_eq!(
        best_a["params_digest"], best_b["params_digest"],
        "same seed, same best checkpoint"
    );

    let run_dir = dir.path().join("run_a");
    let curve = fs::read_to_string(run_dir.join("curve.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("step,validation_loss"));
    let steps: Vec<usize> = lines
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(!steps.is_empty());
    assert!(
        steps.windows(2).all(|w| w[0] < w[1]),
        "learning curve is monotone in step: {steps:?}"
    );

    let manifest = read_json(&run_dir.join("manifest.json"));
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["details"]["best_step"], best_a["step"]);

    let best_model = run_dir.join(best_a["file"].as_str().unwrap());
    assert!(best_model.is_file());

    // Score the saved model on its own training pairs.
    let val_report = dir.path().join("val.json");
    assert_eq!(
        ugcbench(&[
            "validate",
            "--pairs-std",
            &s(&out_std),
            "--pairs-ugc",
            &s(&out_ugc),
            "--model",
            &s(&best_model),
            "--teacher-emb",
            &s(&teacher),
            "--json-out",
            &s(&val_report),
            "--quiet",
        ]),
        0
    );
    let val = read_json(&val_report);
    let loss = val["validation_loss"].as_f64().unwrap();
    assert!(loss.is_finite() && loss >= 0.0);
    assert_eq!(val["model_params_digest"], best_a["params_digest"]);

    // Encode both sides with the trained student and evaluate.
    let ugc_emb = dir.path().join("ugc_emb.bin");
    let std_emb = dir.path().join("std_emb.bin");
    for (corpus, out) in [(&out_ugc, &ugc_emb), (&out_std, &std_emb)] {
        assert_eq!(
            ugcbench(&[
                "embed",
                "--input",
                &s(corpus),
                "--out",
                &s(out),
                "--model",
                &s(&best_model),
                "--quiet",
            ]),
            0
        );
    }
    let xsim_report = dir.path().join("xsim.json");
    assert_eq!(
        ugcbench(&[
            "eval",
            "xsim",
            "--src-emb",
            &s(&ugc_emb),
            "--tgt-emb",
            &s(&teacher),
            "--json-out",
            &s(&xsim_report),
            "--quiet",
        ]),
        0
    );
    let xsim = read_json(&xsim_report);
    let rate = xsim["value"].as_f64().unwrap();
    assert!((0.0..=100.0).contains(&rate), "error rate {rate}");
    assert_eq!(xsim["n_src"], 60);

    let cos_report = dir.path().join("cos.json");
    assert_eq!(
        ugcbench(&[
            "eval",
            "cosdist",
            "--src-emb",
            &s(&ugc_emb),
            "--tgt-emb",
            &s(&std_emb),
            "--json-out",
            &s(&cos_report),
            "--quiet",
        ]),
        0
    );
    let value = read_json(&cos_report)["value"].as_f64().unwrap();
    assert!((0.0..=2.0).contains(&value), "cosine distance {value}");
}

/// A student distilling embeddings produced by its own initialization
/// starts at the optimum and stays there.
#[test]
fn self_distillation_smoke_run_reaches_tiny_loss() {
    let dir = tempfile::tempdir().unwrap();
    let corpus: Vec<String> = demo_corpus().into_iter().take(50).collect();
    let pairs = dir.path().join("pairs.txt");
    write_corpus_file(&pairs, &corpus);

    let config = StudentConfig {
        feature_mode: FeatureMode::WordHash,
        buckets: 128,
        hidden: 8,
        out_dim: 5,
        seed: 3,
    };
    let init = Student::<f64>::new(config).unwrap();
    let teacher = dir.path().join("teacher.bin");
    write_embeddings(&init.encode_corpus(&corpus).unwrap().to_f32(), &teacher).unwrap();

    let run_dir = dir.path().join("run");
    let report = dir.path().join("train.json");
    let code = ugcbench(&[
        "train",
        "--pairs-std",
        &s(&pairs),
        "--pairs-ugc",
        &s(&pairs),
        "--teacher-emb",
        &s(&teacher),
        "--mode",
        "word",
        "--buckets",
        "128",
        "--hidden",
        "8",
        "--learning-rate",
        "1e-6",
        "--seed",
        "3",
        "--out-dir",
        &s(&run_dir),
        "--json-out",
        &s(&report),
        "--quiet",
    ]);
    assert_eq!(code, 0);
    let best = read_json(&report)["best_validation_loss"].as_f64().unwrap();
    assert!(best < 1e-6, "self-distillation loss {best}");
}

#[test]
fn hardneg_grows_the_pool_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("targets.txt");
    let targets: Vec<String> = (0..10)
        .map(|i| {
            format!(
                "Alice counted {} coins in Paris because it rained",
                1200 + 37 * i
            )
        })
        .collect();
    write_corpus_file(&input, &targets);

    let out_a = dir.path().join("pool_a.txt");
    let out_b = dir.path().join("pool_b.txt");
    for out in [&out_a, &out_b] {
        let code = ugcbench(&[
            "hardneg",
            "--input",
            &s(&input),
            "--out",
            &s(out),
            "--per-perturber",
            "3",
            "--seed",
            "42",
            "--quiet",
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(
        fs::read(&out_a).unwrap(),
        fs::read(&out_b).unwrap(),
        "same seed, same pool"
    );

    let pool: Vec<String> = fs::read_to_string(&out_a)
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(&pool[..10], &targets[..], "originals come first, in order");

    let manifest = read_json(&dir.path().join("pool_a.txt.manifest.json"));
    let negatives = manifest["details"]["negatives"].as_u64().unwrap() as usize;
    assert_eq!(pool.len(), 10 + negatives);
    let factor = manifest["details"]["factor"].as_f64().unwrap();
    assert!(factor > 1.0, "every target here is perturbable: {factor}");
}

#[test]
fn preprocess_normalizes_and_filters() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("raw.txt");
    fs::write(
        &input,
        "It\u{2019}s  GREAT here.<br>Totally.\nΚαλημέρα κόσμε από εδώ\n",
    )
    .unwrap();
    let out = dir.path().join("clean.txt");
    let code = ugcbench(&[
        "preprocess",
        "--input",
        &s(&input),
        "--out",
        &s(&out),
        "--min-latin",
        "0.8",
        "--quiet",
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text, "it's great here.\ntotally.\n");
}
