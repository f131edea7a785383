use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use super::Segment;
use crate::error::{Error, Result};

/// Share of training dialogs held out for early stopping when a manifest
/// does not name a validation set.
pub const VALIDATION_FRACTION: f64 = 0.1;

/// Dialog-level partition of a corpus.
///
/// Text form: sections `[train]`, `[validation]`, `[test]` or
/// `[fold1]`..`[foldk]`, one dialog id per line. Blank lines and lines
/// starting with `#` are ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplitManifest {
    Fixed {
        train: Vec<String>,
        validation: Vec<String>,
        test: Vec<String>,
    },
    KFold {
        folds: Vec<Vec<String>>,
    },
}

impl SplitManifest {
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<(String, Vec<String>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if sections.iter().any(|(n, _)| n == name) {
                    return Err(Error::Manifest(format!(
                        "line {}: section [{name}] repeated",
                        i + 1
                    )));
                }
                sections.push((name.to_string(), Vec::new()));
                continue;
            }
            match sections.last_mut() {
                Some((_, ids)) => ids.push(line.to_string()),
                None => {
                    return Err(Error::Manifest(format!(
                        "line {}: dialog id {line:?} outside any section",
                        i + 1
                    )))
                }
            }
        }

        let is_fold = |n: &str| {
            n.strip_prefix("fold")
                .is_some_and(|k| k.parse::<usize>().is_ok())
        };
        let manifest = if !sections.is_empty() && sections.iter().all(|(n, _)| is_fold(n)) {
            let mut numbered: Vec<(usize, Vec<String>)> = sections
                .into_iter()
                .map(|(n, ids)| (n["fold".len()..].parse().unwrap(), ids))
                .collect();
            numbered.sort_by_key(|(k, _)| *k);
            for (expected, (k, _)) in numbered.iter().enumerate() {
                if *k != expected + 1 {
                    return Err(Error::Manifest(format!(
                        "fold sections must be numbered 1..k, missing [fold{}]",
                        expected + 1
                    )));
                }
            }
            SplitManifest::KFold {
                folds: numbered.into_iter().map(|(_, ids)| ids).collect(),
            }
        } else {
            let mut get = |name: &str| -> Option<Vec<String>> {
                let pos = sections.iter().position(|(n, _)| n == name)?;
                Some(sections.remove(pos).1)
            };
            let train =
                get("train").ok_or_else(|| Error::Manifest("missing [train] section".into()))?;
            let test =
                get("test").ok_or_else(|| Error::Manifest("missing [test] section".into()))?;
            let validation = get("validation").unwrap_or_default();
            if let Some((name, _)) = sections.first() {
                return Err(Error::Manifest(format!("unknown section [{name}]")));
            }
            SplitManifest::Fixed {
                train,
                validation,
                test,
            }
        };
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut section = |name: &str, ids: &[String]| {
            out.push_str(&format!("[{name}]\n"));
            for id in ids {
                out.push_str(id);
                out.push('\n');
            }
        };
        match self {
            SplitManifest::Fixed {
                train,
                validation,
                test,
            } => {
                section("train", train);
                section("validation", validation);
                section("test", test);
            }
            SplitManifest::KFold { folds } => {
                for (i, f) in folds.iter().enumerate() {
                    section(&format!("fold{}", i + 1), f);
                }
            }
        }
        out
    }

    fn lists(&self) -> Vec<(String, &[String])> {
        match self {
            SplitManifest::Fixed {
                train,
                validation,
                test,
            } => vec![
                ("train".into(), train.as_slice()),
                ("validation".into(), validation.as_slice()),
                ("test".into(), test.as_slice()),
            ],
            SplitManifest::KFold { folds } => folds
                .iter()
                .enumerate()
                .map(|(i, f)| (format!("fold{}", i + 1), f.as_slice()))
                .collect(),
        }
    }

    /// Lists must be pairwise disjoint; k-fold needs at least two folds.
    pub fn validate(&self) -> Result<()> {
        if let SplitManifest::KFold { folds } = self {
            if folds.len() < 2 {
                return Err(Error::Manifest(format!(
                    "k-fold needs k >= 2, got {}",
                    folds.len()
                )));
            }
        }
        let mut owner: HashMap<&str, String> = HashMap::new();
        for (name, ids) in self.lists() {
            for id in ids {
                if let Some(prev) = owner.insert(id, name.clone()) {
                    return Err(Error::Manifest(format!(
                        "dialog {id} listed in both [{prev}] and [{name}]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Materialised train/validation/test segments.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitSet {
    /// `fixed` or `foldN`.
    pub name: String,
    pub train: Vec<Segment>,
    pub validation: Vec<Segment>,
    pub test: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ResolvedSplits {
    Fixed(SplitSet),
    Folds(Vec<SplitSet>),
}

impl ResolvedSplits {
    pub fn sets(&self) -> &[SplitSet] {
        match self {
            ResolvedSplits::Fixed(s) => std::slice::from_ref(s),
            ResolvedSplits::Folds(f) => f,
        }
    }

    pub fn is_k_fold(&self) -> bool {
        matches!(self, ResolvedSplits::Folds(_))
    }
}

fn set(ids: &[String]) -> HashSet<&str> {
    ids.iter().map(String::as_str).collect()
}

fn select(segments: &[Segment], ids: &HashSet<&str>) -> Vec<Segment> {
    segments
        .iter()
        .filter(|s| ids.contains(s.dialog_id.as_str()))
        .cloned()
        .collect()
}

/// Splits training dialogs into (train, validation): the last tenth, by
/// sorted dialog id, becomes validation.
fn carve_validation(train_ids: &[String]) -> Result<(Vec<String>, Vec<String>)> {
    if train_ids.len() < 2 {
        return Err(Error::Manifest(
            "need at least two training dialogs to hold out a validation set".into(),
        ));
    }
    let sorted: BTreeSet<&String> = train_ids.iter().collect();
    let sorted: Vec<String> = sorted.into_iter().cloned().collect();
    let held = ((sorted.len() as f64 * VALIDATION_FRACTION).ceil() as usize).max(1);
    let cut = sorted.len() - held;
    Ok((sorted[..cut].to_vec(), sorted[cut..].to_vec()))
}

/// Splits whole dialogs according to the manifest. In k-fold mode fold `i` is
/// the test set, the remaining folds train, and validation is carved from
/// training.
pub fn resolve_splits(segments: &[Segment], manifest: &SplitManifest) -> Result<ResolvedSplits> {
    manifest.validate()?;
    let known: HashSet<&str> = segments.iter().map(|s| s.dialog_id.as_str()).collect();
    for (name, ids) in manifest.lists() {
        if let Some(id) = ids.iter().find(|id| !known.contains(id.as_str())) {
            return Err(Error::Manifest(format!(
                "[{name}] references dialog {id} which is not in the corpus"
            )));
        }
    }

    match manifest {
        SplitManifest::Fixed {
            train,
            validation,
            test,
        } => {
            let (train, validation) = if validation.is_empty() {
                carve_validation(train)?
            } else {
                (train.clone(), validation.clone())
            };
            Ok(ResolvedSplits::Fixed(SplitSet {
                name: "fixed".into(),
                train: select(segments, &set(&train)),
                validation: select(segments, &set(&validation)),
                test: select(segments, &set(test)),
            }))
        }
        SplitManifest::KFold { folds } => {
            let mut sets = Vec::with_capacity(folds.len());
            for (i, fold) in folds.iter().enumerate() {
                let rest: Vec<String> = folds
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .flat_map(|(_, f)| f.iter().cloned())
                    .collect();
                let (train, validation) = carve_validation(&rest)?;
                sets.push(SplitSet {
                    name: format!("fold{}", i + 1),
                    train: select(segments, &set(&train)),
                    validation: select(segments, &set(&validation)),
                    test: select(segments, &set(fold)),
                });
            }
            Ok(ResolvedSplits::Folds(sets))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(dialogs: usize, per_dialog: usize) -> Vec<Segment> {
        (0..dialogs)
            .flat_map(|d| {
                (0..per_dialog).map(move |p| Segment {
                    dialog_id: format!("d{d:02}"),
                    position: p,
                    speaker: if p % 2 == 0 { "A" } else { "B" }.into(),
                    label: "x".into(),
                    text: "t".into(),
                    lemmatized_text: None,
                })
            })
            .collect()
    }

    fn ids(range: std::ops::Range<usize>) -> Vec<String> {
        range.map(|d| format!("d{d:02}")).collect()
    }

    #[test]
    fn parse_fixed_and_folds() {
        let m = SplitManifest::parse("[train]\na\nb\n\n[validation]\nc\n[test]\n# comment\nd\n")
            .unwrap();
        assert_eq!(
            m,
            SplitManifest::Fixed {
                train: vec!["a".into(), "b".into()],
                validation: vec!["c".into()],
                test: vec!["d".into()],
            }
        );
        let k = SplitManifest::parse("[fold2]\nb\n[fold1]\na\n").unwrap();
        assert_eq!(
            k,
            SplitManifest::KFold {
                folds: vec![vec!["a".into()], vec!["b".into()]]
            }
        );
        assert_eq!(SplitManifest::parse(&k.to_text()).unwrap(), k);
    }

    #[test]
    fn malformed_manifests() {
        assert!(SplitManifest::parse("[fold1]\na\n").is_err());
        assert!(SplitManifest::parse("[fold1]\na\n[fold3]\nb\n").is_err());
        assert!(SplitManifest::parse("[train]\na\n[test]\na\n").is_err());
        assert!(SplitManifest::parse("a\n[train]\n").is_err());
        assert!(SplitManifest::parse("[train]\na\n[dev]\nb\n[test]\nc\n").is_err());
        assert!(SplitManifest::parse("[train]\na\n").is_err());
    }

    #[test]
    fn fixed_split_partitions_segments() {
        let segs = corpus(10, 3);
        let m = SplitManifest::Fixed {
            train: ids(0..8),
            validation: ids(8..9),
            test: ids(9..10),
        };
        let ResolvedSplits::Fixed(s) = resolve_splits(&segs, &m).unwrap() else {
            panic!()
        };
        assert_eq!(
            s.train.len() + s.validation.len() + s.test.len(),
            segs.len()
        );
        assert_eq!(s.validation.len(), 3);
    }

    #[test]
    fn k_fold_covers_each_dialog_once_as_test() {
        let segs = corpus(10, 2);
        let folds: Vec<Vec<String>> = (0..5).map(|k| ids(2 * k..2 * k + 2)).collect();
        let resolved = resolve_splits(&segs, &SplitManifest::KFold { folds }).unwrap();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for set in resolved.sets() {
            for s in &set.test {
                *seen.entry(s.dialog_id.clone()).or_default() += 1;
            }
            let train: HashSet<&str> = set.train.iter().map(|s| s.dialog_id.as_str()).collect();
            let val: HashSet<&str> = set
                .validation
                .iter()
                .map(|s| s.dialog_id.as_str())
                .collect();
            let test: HashSet<&str> = set.test.iter().map(|s| s.dialog_id.as_str()).collect();
            assert!(train.is_disjoint(&val) && train.is_disjoint(&test) && val.is_disjoint(&test));
            assert_eq!(val.len(), 1);
        }
        assert_eq!(seen.len(), 10);
        assert!(seen.values().all(|&c| c == 2));
    }

    #[test]
    fn carved_validation_is_last_tenth_by_sorted_id() {
        let (train, val) =
            carve_validation(&ids(0..20).into_iter().rev().collect::<Vec<_>>()).unwrap();
        assert_eq!(val, ids(18..20));
        assert_eq!(train, ids(0..18));
    }

    #[test]
    fn unknown_dialog_is_rejected() {
        let segs = corpus(2, 1);
        let m = SplitManifest::Fixed {
            train: vec!["d00".into()],
            validation: vec![],
            test: vec!["zz".into()],
        };
        assert!(matches!(resolve_splits(&segs, &m), Err(Error::Manifest(_))));
    }
}
