//! Categorical encoders.
//!
//! A [`CategoryDictionary`] fixes the label order; an [`Encoder`] binds it to
//! one [`EncodingScheme`] and checks the pairing once (set sizes, hash
//! collisions, digit widths) so that `encode`/`decode` afterwards only fail on
//! bad input.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::geometry::{dot, UnitVectorSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncoderError {
    #[error("no labels to fit")]
    EmptyInput,
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("vector set holds {available} vectors but the dictionary has {needed} labels")]
    SetTooSmall { needed: usize, available: usize },
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("hash collision between {first:?} and {second:?}")]
    HashCollision { first: String, second: String },
    #[error("unresolvable code {0:?}")]
    UnresolvableCode(Vec<i64>),
    #[error("expected a vector of length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("value contains non-finite components")]
    NonFinite,
    #[error("{} row(s) failed, first at row {}: {}", .0.len(), .0[0].0, .0[0].1)]
    Rows(Vec<(usize, EncoderError)>),
    #[error("dictionary file: {0}")]
    Format(String),
}

/// Bijection between labels and ordinals `0..K`, in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryDictionary {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl CategoryDictionary {
    /// Collects the distinct labels of `values` in first-appearance order.
    pub fn fit<I, S>(values: I) -> Result<Self, EncoderError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut labels = Vec::new();
        let mut index = HashMap::new();
        for v in values {
            let v = v.as_ref();
            if !index.contains_key(v) {
                index.insert(v.to_owned(), labels.len());
                labels.push(v.to_owned());
            }
        }
        if labels.is_empty() {
            return Err(EncoderError::EmptyInput);
        }
        Ok(CategoryDictionary { labels, index })
    }

    /// Uses `labels` as given; duplicates are an error.
    pub fn from_labels(labels: Vec<String>) -> Result<Self, EncoderError> {
        if labels.is_empty() {
            return Err(EncoderError::EmptyInput);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(EncoderError::DuplicateLabel(l.clone()));
            }
        }
        Ok(CategoryDictionary { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, ordinal: usize) -> Option<&str> {
        self.labels.get(ordinal).map(String::as_str)
    }

    pub fn ordinal(&self, label: &str) -> Result<usize, EncoderError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| EncoderError::UnknownLabel(label.to_owned()))
    }

    /// Writes `qoc-dict v1 count=<K>` followed by one label per line.
    pub fn write<W: Write>(&self, mut out: W) -> Result<(), EncoderError> {
        let io = |e: std::io::Error| EncoderError::Format(e.to_string());
        writeln!(out, "qoc-dict v1 count={}", self.len()).map_err(io)?;
        for l in &self.labels {
            if l.contains(['\n', '\r']) {
                return Err(EncoderError::Format(format!(
                    "label {l:?} contains a line break"
                )));
            }
            writeln!(out, "{l}").map_err(io)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self, EncoderError> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| EncoderError::Format("missing header".into()))?
            .map_err(|e| EncoderError::Format(e.to_string()))?;
        let count = header
            .strip_prefix("qoc-dict v1 count=")
            .and_then(|c| c.trim().parse::<usize>().ok())
            .ok_or_else(|| EncoderError::Format(format!("bad header {header:?}")))?;
        let labels = lines
            .take(count)
            .collect::<Result<Vec<String>, _>>()
            .map_err(|e| EncoderError::Format(e.to_string()))?;
        if labels.len() != count {
            return Err(EncoderError::Format(format!(
                "header declares {count} labels, found {}",
                labels.len()
            )));
        }
        Self::from_labels(labels)
    }
}

/// The supported encodings.
#[derive(Debug, Clone, PartialEq)]
pub enum EncodingScheme {
    /// Ordinal plus `offset` as a single number.
    Ordinal { offset: i64 },
    /// Standard basis of `R^K`.
    OneHot,
    /// Digits of `ordinal + 1` in base 2, most significant first.
    Binary,
    /// Digits of `ordinal + 1` in `base`, most significant first. With
    /// `balanced`, digits above `(base-1)/2` are written as `digit - base`.
    BaseN { base: u32, balanced: bool },
    /// Low `bits` bits of the FNV-1a hash of the label, most significant first.
    Hash { bits: u32 },
    /// Label `i` maps to vector `i` of a quasiorthonormal basis.
    Qoe(UnitVectorSet),
    /// Label `i` maps to point `i` of a spherical code.
    Spherical(UnitVectorSet),
}

impl EncodingScheme {
    pub fn name(&self) -> &'static str {
        match self {
            EncodingScheme::Ordinal { .. } => "ordinal",
            EncodingScheme::OneHot => "onehot",
            EncodingScheme::Binary => "binary",
            EncodingScheme::BaseN { .. } => "basen",
            EncodingScheme::Hash { .. } => "hash",
            EncodingScheme::Qoe(_) => "qoe",
            EncodingScheme::Spherical(_) => "spherical",
        }
    }
}

impl fmt::Display for EncodingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EncodingScheme::Ordinal { offset } => write!(f, "ordinal(offset={offset})"),
            EncodingScheme::BaseN { base, balanced } => {
                write!(f, "base{base}{}", if *balanced { " balanced" } else { "" })
            }
            EncodingScheme::Hash { bits } => write!(f, "hash({bits} bits)"),
            EncodingScheme::Qoe(s) | EncodingScheme::Spherical(s) => {
                write!(f, "{}({}x{})", self.name(), s.len(), s.dim())
            }
            _ => f.write_str(self.name()),
        }
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn hash_word(label: &str, bits: u32) -> u64 {
    let h = fnv1a64(label.as_bytes());
    if bits == 64 {
        h
    } else {
        h & ((1u64 << bits) - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    Ordinal {
        offset: i64,
    },
    Argmax,
    Digits {
        base: u32,
        balanced: bool,
        width: usize,
    },
    Hash {
        bits: u32,
        lookup: HashMap<u64, usize>,
    },
}

/// Result of [`Encoder::decode`].
#[derive(Debug, Clone, PartialEq)]
pub struct Decoded<'a> {
    pub label: &'a str,
    pub ordinal: usize,
    /// For one-hot, QOE and spherical: the winning dot product. For the
    /// threshold schemes: minus the largest distance between a component and
    /// its rectified digit, so 0 means the input was an exact code word.
    pub score: f64,
}

/// A dictionary bound to a scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    dict: CategoryDictionary,
    scheme: EncodingScheme,
    layout: Layout,
    dim: usize,
}

impl Encoder {
    pub fn new(dict: CategoryDictionary, scheme: EncodingScheme) -> Result<Self, EncoderError> {
        let k = dict.len();
        let (layout, dim) = match &scheme {
            EncodingScheme::Ordinal { offset } => (Layout::Ordinal { offset: *offset }, 1),
            EncodingScheme::OneHot => (Layout::Argmax, k),
            EncodingScheme::Binary => digit_layout(2, false, k)?,
            EncodingScheme::BaseN { base, balanced } => digit_layout(*base, *balanced, k)?,
            EncodingScheme::Hash { bits } => {
                if *bits == 0 || *bits > 64 {
                    return Err(EncoderError::InvalidScheme(format!(
                        "hash bits must be in 1..=64, got {bits}"
                    )));
                }
                let mut lookup = HashMap::with_capacity(k);
                for (i, l) in dict.labels().iter().enumerate() {
                    if let Some(prev) = lookup.insert(hash_word(l, *bits), i) {
                        return Err(EncoderError::HashCollision {
                            first: dict.labels()[prev].clone(),
                            second: l.clone(),
                        });
                    }
                }
                (
                    Layout::Hash {
                        bits: *bits,
                        lookup,
                    },
                    *bits as usize,
                )
            }
            EncodingScheme::Qoe(set) | EncodingScheme::Spherical(set) => {
                if set.len() < k {
                    return Err(EncoderError::SetTooSmall {
                        needed: k,
                        available: set.len(),
                    });
                }
                (Layout::Argmax, set.dim())
            }
        };
        Ok(Encoder {
            dict,
            scheme,
            layout,
            dim,
        })
    }

    pub fn dictionary(&self) -> &CategoryDictionary {
        &self.dict
    }

    pub fn scheme(&self) -> &EncodingScheme {
        &self.scheme
    }

    /// Length of every encoded vector.
    pub fn output_dim(&self) -> usize {
        self.dim
    }

    pub fn encode(&self, label: &str) -> Result<Vec<f64>, EncoderError> {
        let ordinal = self.dict.ordinal(label)?;
        Ok(self.encode_ordinal(ordinal))
    }

    fn encode_ordinal(&self, ordinal: usize) -> Vec<f64> {
        match (&self.layout, &self.scheme) {
            (Layout::Ordinal { offset }, _) => vec![(ordinal as i64 + offset) as f64],
            (Layout::Argmax, EncodingScheme::Qoe(set) | EncodingScheme::Spherical(set)) => {
                set.vector(ordinal).to_vec()
            }
            (Layout::Argmax, _) => {
                let mut v = vec![0.0; self.dim];
                v[ordinal] = 1.0;
                v
            }
            (
                Layout::Digits {
                    base,
                    balanced,
                    width,
                },
                _,
            ) => {
                let mut value = ordinal as u64 + 1;
                let b = u64::from(*base);
                let half = (b - 1) / 2;
                let mut v = vec![0.0; *width];
                for slot in v.iter_mut().rev() {
                    let d = value % b;
                    value /= b;
                    *slot = if *balanced && d > half {
                        d as f64 - b as f64
                    } else {
                        d as f64
                    };
                }
                v
            }
            (Layout::Hash { bits, .. }, _) => {
                let word = hash_word(&self.dict.labels()[ordinal], *bits);
                (0..*bits).rev().map(|i| ((word >> i) & 1) as f64).collect()
            }
        }
    }

    pub fn decode(&self, value: &[f64]) -> Result<Decoded<'_>, EncoderError> {
        if value.len() != self.dim {
            return Err(EncoderError::DimensionMismatch {
                expected: self.dim,
                found: value.len(),
            });
        }
        if value.iter().any(|x| !x.is_finite()) {
            return Err(EncoderError::NonFinite);
        }
        let k = self.dict.len();
        let (ordinal, score) = match &self.layout {
            Layout::Ordinal { offset } => {
                let x = value[0] - *offset as f64;
                let nearest = (x - 0.5).ceil().clamp(0.0, (k - 1) as f64);
                (nearest as usize, -(x - nearest).abs())
            }
            Layout::Argmax => {
                let scores: Vec<f64> = match &self.scheme {
                    EncodingScheme::Qoe(set) | EncodingScheme::Spherical(set) => {
                        (0..k).map(|i| dot(set.vector(i), value)).collect()
                    }
                    _ => value.to_vec(),
                };
                let best = crate::qsoftmax::argmax(&scores);
                (best, scores[best])
            }
            Layout::Digits { base, balanced, .. } => {
                let b = i64::from(*base);
                let (lo, hi) = if *balanced {
                    (-(b - 1) / 2, (b - 1) / 2)
                } else {
                    (0, b - 1)
                };
                let (digits, residual) = rectify(value, lo, hi);
                let mut number: i64 = 0;
                for &d in &digits {
                    number = number * b + d.rem_euclid(b);
                }
                match usize::try_from(number - 1) {
                    Ok(o) if o < k => (o, -residual),
                    _ => return Err(EncoderError::UnresolvableCode(digits)),
                }
            }
            Layout::Hash { lookup, .. } => {
                let (digits, residual) = rectify(value, 0, 1);
                let word = digits.iter().fold(0u64, |acc, &d| (acc << 1) | d as u64);
                match lookup.get(&word) {
                    Some(&o) => (o, -residual),
                    None => return Err(EncoderError::UnresolvableCode(digits)),
                }
            }
        };
        Ok(Decoded {
            label: &self.dict.labels()[ordinal],
            ordinal,
            score,
        })
    }

    /// Encodes each row; failures are collected with their row index.
    pub fn encode_column<S: AsRef<str>>(&self, rows: &[S]) -> Result<Vec<Vec<f64>>, EncoderError> {
        collect_rows(rows.iter().map(|r| self.encode(r.as_ref())))
    }

    pub fn decode_column(&self, matrix: &[Vec<f64>]) -> Result<Vec<String>, EncoderError> {
        collect_rows(
            matrix
                .iter()
                .map(|v| self.decode(v).map(|d| d.label.to_owned())),
        )
    }
}

fn collect_rows<T>(
    results: impl Iterator<Item = Result<T, EncoderError>>,
) -> Result<Vec<T>, EncoderError> {
    let mut out = Vec::new();
    let mut failures = Vec::new();
    for (row, r) in results.enumerate() {
        match r {
            Ok(v) => out.push(v),
            Err(e) => failures.push((row, e)),
        }
    }
    if failures.is_empty() {
        Ok(out)
    } else {
        Err(EncoderError::Rows(failures))
    }
}

fn digit_layout(base: u32, balanced: bool, k: usize) -> Result<(Layout, usize), EncoderError> {
    if base < 2 {
        return Err(EncoderError::InvalidScheme(format!(
            "base must be >= 2, got {base}"
        )));
    }
    if balanced && base.is_multiple_of(2) {
        return Err(EncoderError::InvalidScheme(format!(
            "balanced digits need an odd base, got {base}"
        )));
    }
    // digits needed for the largest encoded value, k
    let mut width = 0;
    let mut rest = k as u64;
    while rest > 0 {
        rest /= u64::from(base);
        width += 1;
    }
    Ok((
        Layout::Digits {
            base,
            balanced,
            width,
        },
        width,
    ))
}

/// Rounds each component to the nearest digit in `lo..=hi`, ties to the
/// smaller digit. Returns the digits and the largest rounding distance.
fn rectify(value: &[f64], lo: i64, hi: i64) -> (Vec<i64>, f64) {
    let mut residual = 0.0f64;
    let digits = value
        .iter()
        .map(|&x| {
            let d = (x - 0.5).ceil().clamp(lo as f64, hi as f64);
            residual = residual.max((x - d).abs());
            d as i64
        })
        .collect();
    (digits, residual)
}
