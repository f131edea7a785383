mod common;

use std::path::Path;

use dialact_core::corpus::{
    resolve_splits, write_corpus, ContextSource, Corpus, LabelSet, Segment,
};
use dialact_core::harness::{
    emit_report, evaluate, paper_grid, predict_dialogs, report_rows, run_experiment, run_grid,
    run_on_splits, Encoder, ExperimentSpec, GridOptions, ReportFormat, RunStatistics,
};
use dialact_core::model::{BranchConfig, Model, ModelConfig, TrainingConfig};
use dialact_core::synthetic;
use dialact_core::textprep::PreprocessingFlags;

fn tiny_config() -> ModelConfig {
    ModelConfig {
        char_branch: Some(BranchConfig {
            filters_per_window: 8,
            embedding_dim: 6,
            ..BranchConfig::character(&[2, 3])
        }),
        reduction_dim: 12,
        training: TrainingConfig {
            max_epochs: 6,
            patience: 3,
            ..Default::default()
        },
        ..Default::default()
    }
}

fn spec(name: &str, seeds: Vec<u64>, dir: &Path) -> ExperimentSpec {
    ExperimentSpec {
        name: name.into(),
        config: tiny_config(),
        flags: PreprocessingFlags::default(),
        context_source: ContextSource::Gold,
        corpus: dir.join("corpus.tsv"),
        manifest: dir.join("manifest.txt"),
        seeds,
    }
}

fn write_inputs(dir: &Path, segments: &[Segment], k_fold: Option<usize>) {
    write_corpus(&dir.join("corpus.tsv"), segments).unwrap();
    let manifest = match k_fold {
        Some(k) => synthetic::k_fold_manifest(segments, k),
        None => synthetic::fixed_manifest(segments, 0.7, 0.1),
    };
    std::fs::write(dir.join("manifest.txt"), manifest.to_text()).unwrap();
}

fn corpus_of(segments: Vec<Segment>) -> Corpus {
    Corpus {
        labels: LabelSet::from_segments(&segments),
        segments,
        has_lemmas: false,
    }
}

#[test]
fn majority_model_scores_the_majority_share() {
    let mut segments = synthetic::separable_corpus(100, 2, 1);
    for (i, s) in segments.iter_mut().enumerate() {
        s.label = if i < 70 { "L0" } else { "L1" }.into();
    }
    let labels = LabelSet::from_segments(&segments);
    let config = ModelConfig {
        label_count: 2,
        ..tiny_config()
    };
    let encoder = Encoder::fit(&segments, labels, PreprocessingFlags::default(), &config).unwrap();
    let mut model = Model::build(&config, encoder.vocab_sizes(), None).unwrap();
    for (name, p) in model.parameters_mut() {
        match name.as_str() {
            "output.weights" => p.value.fill(0.0),
            "output.bias" => p.value.data_mut().copy_from_slice(&[5.0, 0.0]),
            _ => {}
        }
    }
    let (encoded, _) = encoder.encode_all(&segments).unwrap();
    let eval = evaluate(&model, &encoded, ContextSource::Gold).unwrap();
    assert!((eval.accuracy() - 0.70).abs() < 1e-12);
    assert_eq!(eval.confusion, vec![vec![70, 0], vec![30, 0]]);
}

/// Context corpus whose text also names the label, so a trained model gets
/// every segment right.
fn saturating_corpus() -> Vec<Segment> {
    let mut segs = synthetic::context_corpus(20, 6, 3, 8);
    for s in &mut segs {
        let word = ["yes", "what", "okay"][s.label[1..].parse::<usize>().unwrap()];
        s.text = format!("{word} filler");
    }
    segs
}

#[test]
fn gold_and_predicted_context_agree_when_predictions_are_right() {
    let segs = saturating_corpus();
    let config = ModelConfig {
        use_context: true,
        training: TrainingConfig {
            max_epochs: 100,
            patience: 100,
            ..Default::default()
        },
        ..tiny_config()
    };
    let out = common::fit(&config, PreprocessingFlags::default(), &segs, &segs, &segs).unwrap();
    let gold = common::accuracy_on(&out, &segs, ContextSource::Gold).unwrap();
    let predicted = common::accuracy_on(&out, &segs, ContextSource::Predicted).unwrap();
    assert_eq!(gold.accuracy(), 1.0);
    assert_eq!(gold, predicted);
}

#[test]
fn predicted_context_never_reads_gold_labels() {
    let segs = synthetic::context_corpus(10, 5, 3, 2);
    let config = ModelConfig {
        use_context: true,
        ..tiny_config()
    };
    let out = common::fit(&config, PreprocessingFlags::default(), &segs, &segs, &segs).unwrap();
    let (encoded, _) = out.encoder.encode_all(&segs).unwrap();
    let mut scrambled = encoded.clone();
    for (i, s) in scrambled.iter_mut().enumerate() {
        s.label = (s.label + i) % 3;
    }
    let a = predict_dialogs(&out.model, &encoded, ContextSource::Predicted).unwrap();
    let b = predict_dialogs(&out.model, &scrambled, ContextSource::Predicted).unwrap();
    assert_eq!(a, b);
}

#[test]
fn training_restores_the_best_epoch() {
    let segs = synthetic::separable_corpus(40, 4, 6);
    let (train, validation, _) = common::split(&segs, 0.6, 0.2);
    let out = common::fit(
        &tiny_config(),
        PreprocessingFlags::default(),
        &segs,
        &train,
        &validation,
    )
    .unwrap();
    let rec = &out.record;
    let acc = common::accuracy_on(&out, &validation, ContextSource::Gold)
        .unwrap()
        .accuracy();
    assert_eq!(acc, rec.validation_accuracy[rec.best_epoch - 1]);
    assert!(rec.stop_epoch <= 6 && rec.train_loss.len() == rec.stop_epoch);
}

#[test]
fn repeated_seed_gives_identical_runs() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path(), &synthetic::separable_corpus(40, 3, 2), None);
    let r = run_experiment(&spec("twin", vec![7, 7], dir.path())).unwrap();
    assert_eq!(r.runs[0], r.runs[1]);
    assert!(r.runs.iter().all(|run| run.seed == 7));
    assert_eq!(r.test.std, 0.0);
    assert_eq!(r.test.accuracies[0], r.test.accuracies[1]);
}

#[test]
fn statistics_are_recomputable_and_order_independent() {
    let segs = synthetic::separable_corpus(40, 3, 9);
    let corpus = corpus_of(segs.clone());
    let splits = resolve_splits(&segs, &synthetic::fixed_manifest(&segs, 0.7, 0.1)).unwrap();
    let seeds: Vec<u64> = (1..=10).collect();
    let all = run_on_splits(
        &spec("ten", seeds.clone(), Path::new(".")),
        &corpus,
        &splits,
    )
    .unwrap();
    let recomputed = RunStatistics::from_accuracies(all.test.accuracies.clone(), 0);
    let mean = all.test.accuracies.iter().sum::<f64>() / 10.0;
    assert!((all.test.mean - mean).abs() < 1e-12);
    assert_eq!(recomputed, all.test);
    for (i, &seed) in seeds.iter().enumerate().rev().take(3) {
        let one =
            run_on_splits(&spec("one", vec![seed], Path::new(".")), &corpus, &splits).unwrap();
        assert_eq!(one.runs[0], all.runs[i]);
        assert_eq!(one.test.std, 0.0);
    }
}

#[test]
fn k_fold_test_sets_cover_the_corpus_once() {
    let segs = synthetic::context_corpus(15, 4, 3, 5);
    let corpus = corpus_of(segs.clone());
    let splits = resolve_splits(&segs, &synthetic::k_fold_manifest(&segs, 5)).unwrap();
    let r = run_on_splits(&spec("folds", vec![1], Path::new(".")), &corpus, &splits).unwrap();
    let run = &r.runs[0];
    assert_eq!(run.records.len(), 5);
    assert_eq!(run.test.total, segs.len());
    let rows: usize = run.test.confusion.iter().flatten().sum();
    assert_eq!(rows, segs.len());
    assert!((r.test.mean - run.test.accuracy()).abs() < 1e-15);
}

#[test]
fn pretrained_without_a_file_is_rejected() {
    let mut s = spec("vec", vec![1], Path::new("."));
    s.config.word_branch = Some(BranchConfig::word(&[1]));
    assert!(s.validate().is_err());
}

#[test]
fn grid_report_has_a_row_per_experiment_and_split() {
    let dir = tempfile::tempdir().unwrap();
    write_inputs(dir.path(), &synthetic::separable_corpus(30, 2, 3), None);
    let opts = GridOptions {
        corpus: dir.path().join("corpus.tsv"),
        manifest: dir.path().join("manifest.txt"),
        embeddings: None,
        seeds: vec![1],
        base: ModelConfig {
            training: TrainingConfig {
                max_epochs: 1,
                ..Default::default()
            },
            ..tiny_config()
        },
    };
    // Three-spec slice of the grid, run through the same experiment path.
    let plan = paper_grid(&opts, false);
    let corpus = dialact_core::corpus::read_corpus(&opts.corpus).unwrap();
    let splits = resolve_splits(
        &corpus.segments,
        &dialact_core::corpus::SplitManifest::read(&opts.manifest).unwrap(),
    )
    .unwrap();
    let results: Vec<_> = plan.specs[..3]
        .iter()
        .map(|s| run_on_splits(s, &corpus, &splits).unwrap())
        .collect();
    let rows = report_rows(&results);
    assert_eq!(rows.len(), 3 * 2);
    let path = dir.path().join("grid.csv");
    emit_report(&path, &rows, &[], ReportFormat::Csv).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);

    let (all, notes) = run_grid(&opts).unwrap();
    assert_eq!(all.len(), plan.specs.len());
    assert!(notes.iter().any(|n| n.contains("lemmatized")));
}
