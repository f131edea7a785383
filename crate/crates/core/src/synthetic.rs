//! Generated corpora with known structure, for tests, benchmarks and smoke runs.

use crate::corpus::{Segment, SplitManifest};
use crate::nn::rng::SeededRng;

fn random_word(rng: &mut SeededRng, alphabet: &[char], min: usize, max: usize) -> String {
    let len = min + rng.below(max - min + 1);
    (0..len)
        .map(|_| alphabet[rng.below(alphabet.len())])
        .collect()
}

fn segment(dialog: usize, position: usize, speaker: &str, label: String, text: String) -> Segment {
    Segment {
        dialog_id: format!("dlg{dialog:04}"),
        position,
        speaker: speaker.to_string(),
        label,
        text,
        lemmatized_text: None,
    }
}

/// `count` segments, one per dialog, whose label is determined by a
/// label-specific keyword in otherwise random text.
pub fn separable_corpus(count: usize, labels: usize, seed: u64) -> Vec<Segment> {
    let mut rng = SeededRng::new(seed);
    let keywords = [
        "yes", "what", "okay", "no", "hello", "thanks", "maybe", "right",
    ];
    assert!(labels <= keywords.len());
    let filler: Vec<char> = "bcdfgjkmpqvwxz".chars().collect();
    (0..count)
        .map(|i| {
            let label = i % labels;
            let noise = random_word(&mut rng, &filler, 2, 5);
            let text = if rng.below(2) == 0 {
                format!("{} {noise}", keywords[label])
            } else {
                format!("{noise} {}", keywords[label])
            };
            segment(i, 0, "A", format!("L{label}"), text)
        })
        .collect()
}

/// Two classes whose texts end in `abc` or `cba` after a random prefix over a
/// disjoint alphabet, so both classes have identical character sets.
pub fn suffix_order_corpus(count: usize, seed: u64) -> Vec<Segment> {
    let mut rng = SeededRng::new(seed);
    let prefix: Vec<char> = "defghijklmnop".chars().collect();
    (0..count)
        .map(|i| {
            let class = rng.below(2);
            let head = random_word(&mut rng, &prefix, 3, 8);
            let tail = if class == 0 { "abc" } else { "cba" };
            segment(i, 0, "A", format!("C{class}"), format!("{head}{tail}"))
        })
        .collect()
}

/// Dialogs where each label is a fixed function of the previous label and
/// the text is random noise. The first segment's label is random.
pub fn context_corpus(dialogs: usize, per_dialog: usize, labels: usize, seed: u64) -> Vec<Segment> {
    let mut rng = SeededRng::new(seed);
    let alphabet: Vec<char> = "abcdefghij".chars().collect();
    let mut out = Vec::with_capacity(dialogs * per_dialog);
    for d in 0..dialogs {
        let mut label = rng.below(labels);
        for p in 0..per_dialog {
            if p > 0 {
                label = (label + 1) % labels;
            }
            let text = random_word(&mut rng, &alphabet, 3, 6);
            let speaker = if p % 2 == 0 { "A" } else { "B" };
            out.push(segment(d, p, speaker, format!("L{label}"), text));
        }
    }
    out
}

/// Varied random dialogs (speaker turns, punctuation, capitals, lemma column)
/// for format round-trips.
pub fn random_dialogs(dialogs: usize, seed: u64) -> Vec<Segment> {
    let mut rng = SeededRng::new(seed);
    let alphabet: Vec<char> = "abcdefghijklmnopqrstuvwxyzABCÉñ¿?.,' ".chars().collect();
    let mut out = Vec::new();
    for d in 0..dialogs {
        let len = 1 + rng.below(6);
        for p in 0..len {
            let mut text = random_word(&mut rng, &alphabet, 1, 20).trim().to_string();
            if text.is_empty() {
                text = "x".into();
            }
            let lemma = (rng.below(2) == 0).then(|| text.to_lowercase());
            out.push(Segment {
                lemmatized_text: lemma,
                ..segment(
                    d,
                    p,
                    ["A", "B"][rng.below(2)],
                    format!("L{}", rng.below(11)),
                    text,
                )
            });
        }
    }
    out
}

/// Dialog ids of `segments` in first-appearance order.
pub fn dialog_ids(segments: &[Segment]) -> Vec<String> {
    let mut ids: Vec<String> = Vec::new();
    for s in segments {
        if ids.last() != Some(&s.dialog_id) {
            ids.push(s.dialog_id.clone());
        }
    }
    ids
}

/// Fixed manifest giving the given fractions of dialogs to train and
/// validation; the rest is test.
pub fn fixed_manifest(segments: &[Segment], train: f64, validation: f64) -> SplitManifest {
    let ids = dialog_ids(segments);
    let n = ids.len();
    let a = ((n as f64) * train).round() as usize;
    let b = a + ((n as f64) * validation).round() as usize;
    SplitManifest::Fixed {
        train: ids[..a].to_vec(),
        validation: ids[a..b.min(n)].to_vec(),
        test: ids[b.min(n)..].to_vec(),
    }
}

/// Round-robin k-fold manifest over dialogs.
pub fn k_fold_manifest(segments: &[Segment], k: usize) -> SplitManifest {
    let mut folds = vec![Vec::new(); k];
    for (i, id) in dialog_ids(segments).into_iter().enumerate() {
        folds[i % k].push(id);
    }
    SplitManifest::KFold { folds }
}
