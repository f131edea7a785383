use dialact_core::corpus::{read_corpus, resolve_splits, write_corpus, SplitManifest};
use dialact_core::synthetic;

#[test]
fn nine_hundred_dialogs_survive_write_and_read() {
    let segments = synthetic::random_dialogs(900, 42);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.tsv");
    write_corpus(&path, &segments).unwrap();
    let corpus = read_corpus(&path).unwrap();
    assert!(corpus.has_lemmas);
    assert_eq!(corpus.segments, segments);
    assert_eq!(corpus.dialog_ids().len(), 900);
}

#[test]
fn manifests_round_trip_and_folds_cover_every_dialog_once() {
    let segments = synthetic::random_dialogs(50, 3);
    let manifest = synthetic::k_fold_manifest(&segments, 5);
    let text = manifest.to_text();
    assert_eq!(SplitManifest::parse(&text).unwrap(), manifest);
    let splits = resolve_splits(&segments, &manifest).unwrap();
    let mut seen: Vec<(String, usize)> = splits
        .sets()
        .iter()
        .flat_map(|s| s.test.iter().map(|x| (x.dialog_id.clone(), x.position)))
        .collect();
    seen.sort();
    let mut all: Vec<(String, usize)> = segments
        .iter()
        .map(|x| (x.dialog_id.clone(), x.position))
        .collect();
    all.sort();
    assert_eq!(seen, all);
    for set in splits.sets() {
        let train: std::collections::HashSet<&str> =
            set.train.iter().map(|s| s.dialog_id.as_str()).collect();
        assert!(set
            .validation
            .iter()
            .chain(&set.test)
            .all(|s| !train.contains(s.dialog_id.as_str())));
    }
}
