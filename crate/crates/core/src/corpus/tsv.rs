use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use log::warn;

use super::{LabelSet, Segment};
use crate::error::{Error, Result};

pub const HEADER: &str = "dialog_id\tposition\tspeaker\tlabel\ttext";
pub const HEADER_WITH_LEMMAS: &str = "dialog_id\tposition\tspeaker\tlabel\ttext\tlemmatized_text";

/// Parsed corpus: segments grouped by dialog (first-appearance order), each
/// dialog sorted by position.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub segments: Vec<Segment>,
    pub labels: LabelSet,
    pub has_lemmas: bool,
}

impl Corpus {
    pub fn dialog_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for s in &self.segments {
            if ids.last() != Some(&s.dialog_id.as_str()) {
                ids.push(&s.dialog_id);
            }
        }
        ids
    }
}

pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(BufReader::new(file), path)
}

/// Parses the TSV format from any reader; `origin` only labels diagnostics.
pub fn parse_corpus<R: BufRead>(reader: R, origin: &Path) -> Result<Corpus> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|e| Error::io(origin, e))?,
        None => return Err(parse_err(1, "missing header row".into())),
    };
    let header = header.trim_end_matches('\r');
    let has_lemmas = match header {
        HEADER => false,
        HEADER_WITH_LEMMAS => true,
        other => {
            return Err(parse_err(
                1,
                format!(
                "unexpected header {other:?}, expected {HEADER:?} with optional lemmatized_text"
            ),
            ))
        }
    };
    let columns = if has_lemmas { 6 } else { 5 };

    let mut order: Vec<String> = Vec::new();
    let mut dialogs: HashMap<String, BTreeMap<usize, (usize, Segment)>> = HashMap::new();
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns {
            return Err(parse_err(
                line_no,
                format!(
                    "expected {columns} tab-separated fields, found {}",
                    fields.len()
                ),
            ));
        }
        let position: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid position {:?}", fields[1])))?;
        if fields[0].is_empty() {
            return Err(parse_err(line_no, "empty dialog_id".into()));
        }
        if fields[3].is_empty() {
            return Err(parse_err(line_no, "empty label".into()));
        }
        let lemmatized_text = if has_lemmas && !fields[5].trim().is_empty() {
            Some(fields[5].to_string())
        } else {
            None
        };
        let segment = Segment {
            dialog_id: fields[0].to_string(),
            position,
            speaker: fields[2].to_string(),
            label: fields[3].to_string(),
            text: fields[4].to_string(),
            lemmatized_text,
        };
        let dialog = dialogs.entry(segment.dialog_id.clone()).or_insert_with(|| {
            order.push(segment.dialog_id.clone());
            BTreeMap::new()
        });
        if let Some((first_line, _)) = dialog.get(&position) {
            return Err(parse_err(
                line_no,
                format!(
                    "duplicate segment ({}, {position}), first seen on line {first_line}",
                    segment.dialog_id
                ),
            ));
        }
        dialog.insert(position, (line_no, segment));
    }

    let mut segments = Vec::new();
    for id in order {
        let dialog = dialogs.remove(&id).unwrap_or_default();
        for (expected, (&position, (line_no, _))) in dialog.iter().enumerate() {
            if position != expected {
                return Err(parse_err(
                    *line_no,
                    format!("dialog {id}: positions are not contiguous from 0 (expected {expected}, found {position})"),
                ));
            }
        }
        for (_, (line_no, segment)) in dialog {
            if segment.text.trim().is_empty() {
                warn!(
                    "{}:{line_no}: dropping segment ({}, {}) with empty text",
                    origin.display(),
                    segment.dialog_id,
                    segment.position
                );
                continue;
            }
            segments.push(segment);
        }
    }
    let labels = LabelSet::from_segments(&segments);
    Ok(Corpus {
        segments,
        labels,
        has_lemmas,
    })
}

pub fn write_corpus(path: &Path, segments: &[Segment]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let with_lemmas = segments.iter().any(|s| s.lemmatized_text.is_some());
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(
            out,
            "{}",
            if with_lemmas {
                HEADER_WITH_LEMMAS
            } else {
                HEADER
            }
        )?;
        for s in segments {
            write!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                s.dialog_id, s.position, s.speaker, s.label, s.text
            )?;
            if with_lemmas {
                write!(out, "\t{}", s.lemmatized_text.as_deref().unwrap_or(""))?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| Error::io(path, e))
}
