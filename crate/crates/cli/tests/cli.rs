use std::path::Path;
use std::process::{Command, Output};

use dialact_core::corpus::write_corpus;
use dialact_core::synthetic;

const SMALL_CONFIG: &str = r#"
use_context = true
reduction_dim = 10
seed = 4

[char]
window_sizes = [2, 3]
filters_per_window = 8
embedding_dim = 6

[training]
max_epochs = 5
patience = 2
"#;

fn dialact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dialact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workspace(dir: &Path) {
    let segments = synthetic::context_corpus(24, 5, 3, 6);
    write_corpus(&dir.join("corpus.tsv"), &segments).unwrap();
    let manifest = synthetic::fixed_manifest(&segments, 0.6, 0.2);
    std::fs::write(dir.join("splits.txt"), manifest.to_text()).unwrap();
    std::fs::write(
        dir.join("folds.txt"),
        synthetic::k_fold_manifest(&segments, 3).to_text(),
    )
    .unwrap();
    std::fs::write(dir.join("model.toml"), SMALL_CONFIG).unwrap();
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn train_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(d);
    let ckpt = p(d, "model.ckpt");
    let out = dialact(&[
        "train",
        "--corpus",
        &p(d, "corpus.tsv"),
        "--manifest",
        &p(d, "splits.txt"),
        "--config",
        &p(d, "model.toml"),
        "--out-checkpoint",
        &ckpt,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("best_epoch="));
    assert!(Path::new(&ckpt).exists());

    for source in ["gold", "predicted"] {
        let out = dialact(&[
            "eval",
            "--checkpoint",
            &ckpt,
            "--corpus",
            &p(d, "corpus.tsv"),
            "--manifest",
            &p(d, "splits.txt"),
            "--split",
            "test",
            "--context-source",
            source,
            "--confusion",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        let text = stdout(&out);
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("accuracy="), "{first}");
        assert_eq!(text.lines().count(), 1 + 3);
    }
}

#[test]
fn experiment_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(d);
    let spec = format!(
        "[[experiment]]\nname = \"folds\"\ncorpus = \"corpus.tsv\"\nmanifest = \"folds.txt\"\nseeds = [1]\n[experiment.config]\n{}",
        SMALL_CONFIG.replace("[char]", "[experiment.config.char]").replace("[training]", "[experiment.config.training]")
    );
    std::fs::write(d.join("spec.toml"), spec).unwrap();
    let mut reports = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dialact(&[
            "experiment",
            "--spec",
            &p(d, "spec.toml"),
            "--seeds",
            "3,5",
            "--report",
            &p(d, name),
            "--format",
            "csv",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        reports.push(std::fs::read(d.join(name)).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let text = String::from_utf8(reports[0].clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "experiment,split,mean,std,n_runs");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("folds,validation,") && lines[1].ends_with(",2"));
}

#[test]
fn grid_writes_a_row_per_experiment_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(d);
    std::fs::write(
        d.join("base.toml"),
        "reduction_dim = 6\n[char]\nfilters_per_window = 4\nembedding_dim = 4\n[word]\nfilters_per_window = 4\nembedding_dim = 4\nmin_count = 1\n[training]\nmax_epochs = 1\n",
    )
    .unwrap();
    let out = dialact(&[
        "grid",
        "--corpus",
        &p(d, "corpus.tsv"),
        "--manifest",
        &p(d, "splits.txt"),
        "--config",
        &p(d, "base.toml"),
        "--seeds",
        "1",
        "--report",
        &p(d, "grid.txt"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = std::fs::read_to_string(d.join("grid.txt")).unwrap();
    // No vectors and no lemmas: 1 word + 8 window + 3 preprocessing + 4 combined rows.
    let rows = report.lines().filter(|l| !l.starts_with("note:")).count() - 1;
    assert_eq!(rows, 16 * 2);
    assert!(report.contains("note: char/lemmatized: skipped"));
}

#[test]
fn gradcheck_passes_on_a_small_config() {
    let dir = tempfile::tempdir().unwrap();
    workspace(dir.path());
    let out = dialact(&[
        "gradcheck",
        "--config",
        &p(dir.path(), "model.toml"),
        "--tolerance",
        "1e-4",
    ]);
    assert!(out.status.success(), "{}{}", stdout(&out), stderr(&out));
    assert!(stdout(&out)
        .lines()
        .last()
        .unwrap()
        .starts_with("gradcheck passed"));
}

#[test]
fn failures_exit_nonzero_with_one_error_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workspace(d);
    std::fs::write(d.join("bad.toml"), "[training]\nepochs = 3\n").unwrap();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (
            vec!["gradcheck".into(), "--config".into(), p(d, "bad.toml")],
            "error: config: ",
        ),
        (
            vec![
                "train".into(),
                "--corpus".into(),
                p(d, "missing.tsv"),
                "--manifest".into(),
                p(d, "splits.txt"),
                "--out-checkpoint".into(),
                p(d, "x.ckpt"),
            ],
            "error: io: ",
        ),
        (
            vec![
                "eval".into(),
                "--checkpoint".into(),
                p(d, "corpus.tsv"),
                "--corpus".into(),
                p(d, "corpus.tsv"),
                "--manifest".into(),
                p(d, "splits.txt"),
            ],
            "error: checkpoint: ",
        ),
        (
            vec![
                "gradcheck".into(),
                "--tolerance".into(),
                "0".into(),
                "--config".into(),
                p(d, "model.toml"),
            ],
            "error: gradcheck: max relative error",
        ),
    ];
    for (args, prefix) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = dialact(&args);
        assert!(!out.status.success(), "{args:?}");
        let err = stderr(&out);
        let lines: Vec<&str> = err.lines().filter(|l| l.starts_with("error:")).collect();
        assert_eq!(lines.len(), 1, "{err}");
        assert!(lines[0].starts_with(prefix), "{err}");
    }
}
