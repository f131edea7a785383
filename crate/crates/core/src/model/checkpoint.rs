//! Single-file model checkpoints.
//!
//! Byte layout (all integers little-endian):
//!
//! ```text
//! offset   size  field
//! 0        8     magic "DACTCKPT"
//! 8        4     format version (u32), currently 1
//! 12       8     header length H in bytes (u64)
//! 20       H     header: UTF-8 JSON object with keys
//!                  config, flags, pad, char_tokens, word_tokens, labels,
//!                  tensors: [{name, shape, trainable}, ...]
//! 20+H     ...   tensor payload: for each entry of `tensors`, in order,
//!                product(shape) IEEE-754 f64 values in row-major order
//! ```
//!
//! Vocabulary token lists exclude the reserved PAD/UNK entries; token `i`
//! of a list has index `i + 2`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{LabelSet, Segment};
use crate::error::{Error, Result};
use crate::model::config::ModelConfig;
use crate::model::network::{Model, VocabSizes};
use crate::nn::tensor::Tensor;
use crate::textprep::{
    encode, EncodedSegment, PadLengths, PreprocessingFlags, TokenKind, Vocabulary,
};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"DACTCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

/// A trained model with everything needed to encode new segments.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelBundle {
    pub model: Model,
    pub char_vocab: Vocabulary,
    pub word_vocab: Vocabulary,
    pub labels: LabelSet,
    pub flags: PreprocessingFlags,
    pub pad: PadLengths,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
    trainable: bool,
}

#[derive(Serialize, Deserialize)]
struct Header {
    config: ModelConfig,
    flags: PreprocessingFlags,
    pad: PadLengths,
    char_tokens: Vec<String>,
    word_tokens: Vec<String>,
    labels: LabelSet,
    tensors: Vec<TensorEntry>,
}

impl ModelBundle {
    pub fn encode(&self, segment: &Segment) -> Result<EncodedSegment> {
        encode(
            segment,
            &self.char_vocab,
            &self.word_vocab,
            &self.labels,
            &self.flags,
            self.pad,
        )
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let params = self.model.parameters();
        let header = Header {
            config: self.model.config().clone(),
            flags: self.flags,
            pad: self.pad,
            char_tokens: self.char_vocab.tokens().to_vec(),
            word_tokens: self.word_vocab.tokens().to_vec(),
            labels: self.labels.clone(),
            tensors: params
                .iter()
                .map(|(name, p)| TensorEntry {
                    name: name.clone(),
                    shape: p.shape().to_vec(),
                    trainable: p.trainable,
                })
                .collect(),
        };
        let json = serde_json::to_vec(&header)?;
        let payload: usize = params.iter().map(|(_, p)| p.value.len() * 8).sum();
        let mut out = Vec::with_capacity(20 + json.len() + payload);
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        for (_, p) in &params {
            for v in p.value.data() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::Checkpoint(msg.to_string());
        if bytes.len() < 20 || &bytes[..8] != CHECKPOINT_MAGIC {
            return Err(bad("not a checkpoint file (bad magic)"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {version}"
            )));
        }
        let header_len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
        let header_end = 20usize
            .checked_add(header_len)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| bad("truncated header"))?;
        let header: Header = serde_json::from_slice(&bytes[20..header_end])?;

        let char_vocab = Vocabulary::from_tokens(TokenKind::Character, header.char_tokens);
        let word_vocab = Vocabulary::from_tokens(TokenKind::Word, header.word_tokens);
        let sizes = VocabSizes {
            chars: char_vocab.len(),
            words: word_vocab.len(),
        };
        let placeholder = header
            .config
            .word_branch
            .as_ref()
            .filter(|b| b.embedding_mode.is_pretrained())
            .map(|b| Tensor::zeros(&[sizes.words, b.embedding_dim]));
        let mut model = Model::build(&header.config, sizes, placeholder)?;

        let mut offset = header_end;
        {
            let mut params = model.parameters_mut();
            if params.len() != header.tensors.len() {
                return Err(Error::Checkpoint(format!(
                    "checkpoint lists {} tensors, model has {}",
                    header.tensors.len(),
                    params.len()
                )));
            }
            for ((name, param), entry) in params.iter_mut().zip(&header.tensors) {
                if *name != entry.name || param.shape() != entry.shape.as_slice() {
                    return Err(Error::Checkpoint(format!(
                        "tensor {} {:?} does not match model tensor {name} {:?}",
                        entry.name,
                        entry.shape,
                        param.shape()
                    )));
                }
                let n = param.value.len();
                let end = offset + n * 8;
                if end > bytes.len() {
                    return Err(bad("truncated tensor payload"));
                }
                for (v, chunk) in param
                    .value
                    .data_mut()
                    .iter_mut()
                    .zip(bytes[offset..end].chunks_exact(8))
                {
                    *v = f64::from_le_bytes(chunk.try_into().unwrap());
                }
                param.trainable = entry.trainable;
                offset = end;
            }
        }
        if offset != bytes.len() {
            return Err(bad("trailing bytes after tensor payload"));
        }
        Ok(ModelBundle {
            model,
            char_vocab,
            word_vocab,
            labels: header.labels,
            flags: header.flags,
            pad: header.pad,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
