//! Multi-domain datasets of features, logits, and labels, with two on-disk
//! formats and a seeded per-domain split.
//!
//! # CSV format
//!
//! UTF-8, first row is the header, which must be exactly
//! `domain,label,f0,...,f{d-1},z0,...,z{K-1}` for feature dimension `d >= 1`
//! and class count `K >= 2`. `domain` is a free-form non-empty tag (quoted by
//! the writer when needed), `label` is an integer in `0..K`, and the `f*`/`z*`
//! columns are decimal floats. The writer prints floats with Rust's shortest
//! round-trip formatting, so a write/parse cycle reproduces every value
//! exactly. Row numbers in errors are 1-based and count the header, so the
//! first data row is row 2.
//!
//! # Binary format
//!
//! Little-endian throughout:
//!
//! ```text
//! magic   4 bytes  "CSHF"
//! u32     format version (currently 1)
//! u32     n  (sample count)
//! u32     d  (feature dimension, >= 1)
//! u32     K  (class count, >= 2)
//! u32     domain string table length, then per entry: u32 byte length + UTF-8 bytes
//! n records: u32 domain table index, u32 label, d * f64 features, K * f64 logits
//! ```
//!
//! Floats are raw IEEE-754 bits, so binary round trips are bit-exact. Errors
//! for binary files name the 0-based record index instead of a text row.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::rng::{derive_seed, SplitMix64};
use thiserror::Error;

const MAGIC: &[u8; 4] = b"CSHF";
const BINARY_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {detail}")]
    MalformedHeader { detail: String },
    #[error("row {row}: {detail}")]
    Malformed { row: usize, detail: String },
    #[error("row {row}: expected {expected} fields, got {got}")]
    InconsistentDimensions {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("row {row}: label {label} out of range for {num_classes} classes")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        num_classes: usize,
    },
    #[error("row {row}: non-finite value in column {column}")]
    NonFinite { row: usize, column: String },
    #[error("dataset contains no samples")]
    Empty,
    #[error("unknown domain tag '{tag}'")]
    UnknownDomain { tag: String },
    #[error("domain '{tag}' has {count} samples; splitting requires at least 2")]
    DomainTooSmall { tag: String, count: usize },
    #[error("split fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("not a dataset file: bad magic bytes")]
    BadMagic,
    #[error("unsupported binary format version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated or oversized binary payload: {detail}")]
    Truncated { detail: String },
    #[error("invalid binary payload: {detail}")]
    InvalidBinary { detail: String },
    #[error("dataset too large for the binary format: {detail}")]
    TooLarge { detail: String },
}

/// One observation: where it came from, what the classifier saw and emitted,
/// and the true class.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub domain: String,
    pub label: usize,
    pub feature: Vec<f64>,
    pub logits: Vec<f64>,
}

/// An immutable collection of samples sharing one feature dimension and one
/// class count. Construction validates every invariant; accessors are
/// read-only, so a value that exists is consistent.
#[derive(Debug, Clone)]
pub struct DomainDataset {
    samples: Vec<Sample>,
    num_classes: usize,
    feature_dim: usize,
    domains: BTreeSet<String>,
}

/// How to split: `fraction_small` of each domain (rounded half-up, clamped so
/// both sides are non-empty) goes to the small side.
#[derive(Debug, Clone, Copy)]
pub struct SplitSpec {
    pub fraction_small: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Binary,
}

impl DomainDataset {
    /// Validates and wraps a sample list. The first sample fixes the feature
    /// dimension and class count. `row_offset` shifts row numbers in errors;
    /// in-memory construction reports 0-based sample indices.
    pub fn new(samples: Vec<Sample>) -> Result<Self, DatasetError> {
        Self::with_row_offset(samples, 0)
    }

    fn with_row_offset(samples: Vec<Sample>, row_offset: usize) -> Result<Self, DatasetError> {
        if samples.is_empty() {
            return Err(DatasetError::Empty);
        }
        let feature_dim = samples[0].feature.len();
        let num_classes = samples[0].logits.len();
        if feature_dim < 1 {
            return Err(DatasetError::Malformed {
                row: row_offset,
                detail: "feature dimension must be at least 1".into(),
            });
        }
        if num_classes < 2 {
            return Err(DatasetError::Malformed {
                row: row_offset,
                detail: "at least 2 classes are required".into(),
            });
        }
        let mut domains = BTreeSet::new();
        for (i, s) in samples.iter().enumerate() {
            let row = row_offset + i;
            if s.feature.len() != feature_dim {
                return Err(DatasetError::InconsistentDimensions {
                    row,
                    expected: feature_dim,
                    got: s.feature.len(),
                });
            }
            if s.logits.len() != num_classes {
                return Err(DatasetError::InconsistentDimensions {
                    row,
                    expected: num_classes,
                    got: s.logits.len(),
                });
            }
            if s.label >= num_classes {
                return Err(DatasetError::LabelOutOfRange {
                    row,
                    label: s.label,
                    num_classes,
                });
            }
            if let Some(j) = s.feature.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite {
                    row,
                    column: format!("f{j}"),
                });
            }
            if let Some(j) = s.logits.iter().position(|v| !v.is_finite()) {
                return Err(DatasetError::NonFinite {
                    row,
                    column: format!("z{j}"),
                });
            }
            if s.domain.is_empty() {
                return Err(DatasetError::Malformed {
                    row,
                    detail: "empty domain tag".into(),
                });
            }
            domains.insert(s.domain.clone());
        }
        Ok(DomainDataset {
            samples,
            num_classes,
            feature_dim,
            domains,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    /// Distinct domain tags, always in sorted order.
    pub fn domains(&self) -> impl Iterator<Item = &str> {
        self.domains.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample indices grouped by domain, domains in sorted order, indices in
    /// row order.
    pub fn domain_indices(&self) -> Vec<(&str, Vec<usize>)> {
        let mut groups: Vec<(&str, Vec<usize>)> = self
            .domains
            .iter()
            .map(|d| (d.as_str(), Vec::new()))
            .collect();
        for (i, s) in self.samples.iter().enumerate() {
            let slot = groups
                .binary_search_by(|(d, _)| (*d).cmp(s.domain.as_str()))
                .expect("domain set covers every sample");
            groups[slot].1.push(i);
        }
        groups
    }

    fn subset(&self, mut indices: Vec<usize>) -> Result<DomainDataset, DatasetError> {
        indices.sort_unstable();
        let samples: Vec<Sample> = indices.iter().map(|&i| self.samples[i].clone()).collect();
        DomainDataset::new(samples)
    }
}

/// Reads a dataset from disk in the given format.
pub fn parse_dataset(path: &Path, format: DataFormat) -> Result<DomainDataset, DatasetError> {
    match format {
        DataFormat::Csv => parse_csv(path),
        DataFormat::Binary => parse_binary(path),
    }
}

/// Writes a dataset to disk in the given format. CSV writes decimal text that
/// parses back exactly; binary writes raw IEEE-754 bits.
pub fn write_dataset(
    ds: &DomainDataset,
    path: &Path,
    format: DataFormat,
) -> Result<(), DatasetError> {
    match format {
        DataFormat::Csv => write_csv(ds, path),
        DataFormat::Binary => write_binary(ds, path),
    }
}

fn expected_header(d: usize, k: usize) -> Vec<String> {
    let mut h = vec!["domain".to_string(), "label".to_string()];
    h.extend((0..d).map(|i| format!("f{i}")));
    h.extend((0..k).map(|i| format!("z{i}")));
    h
}

fn parse_csv(path: &Path) -> Result<DomainDataset, DatasetError> {
    let file = std::fs::File::open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);

    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(DatasetError::Empty),
        Some(rec) => rec.map_err(|e| DatasetError::MalformedHeader {
            detail: e.to_string(),
        })?,
    };

    let fields: Vec<&str> = header.iter().collect();
    if fields.first() != Some(&"domain") || fields.get(1) != Some(&"label") {
        return Err(DatasetError::MalformedHeader {
            detail: "header must start with 'domain,label'".into(),
        });
    }
    let mut d = 0;
    while fields.get(2 + d) == Some(&format!("f{d}").as_str()) {
        d += 1;
    }
    let mut k = 0;
    while fields.get(2 + d + k) == Some(&format!("z{k}").as_str()) {
        k += 1;
    }
    if d < 1 || k < 2 || fields.len() != 2 + d + k {
        return Err(DatasetError::MalformedHeader {
            detail: format!(
                "header must be domain,label,f0..f{{d-1}},z0..z{{K-1}} with d >= 1 and K >= 2; \
                 got {} fields parsing as d = {d}, K = {k}",
                fields.len()
            ),
        });
    }

    let width = 2 + d + k;
    let mut samples = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = i + 2; // header is row 1
        let rec = rec.map_err(|e| DatasetError::Malformed {
            row,
            detail: e.to_string(),
        })?;
        if rec.len() != width {
            return Err(DatasetError::InconsistentDimensions {
                row,
                expected: width,
                got: rec.len(),
            });
        }
        let domain = rec[0].to_string();
        if domain.is_empty() {
            return Err(DatasetError::Malformed {
                row,
                detail: "empty domain tag".into(),
            });
        }
        let label: usize = rec[1].parse().map_err(|_| DatasetError::Malformed {
            row,
            detail: format!("label '{}' is not a non-negative integer", &rec[1]),
        })?;
        if label >= k {
            return Err(DatasetError::LabelOutOfRange {
                row,
                label,
                num_classes: k,
            });
        }
        let parse_float = |idx: usize, name: String| -> Result<f64, DatasetError> {
            let raw = &rec[idx];
            let v: f64 = raw.parse().map_err(|_| DatasetError::Malformed {
                row,
                detail: format!("column {name}: '{raw}' is not a decimal float"),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::NonFinite { row, column: name });
            }
            Ok(v)
        };
        let mut feature = Vec::with_capacity(d);
        for j in 0..d {
            feature.push(parse_float(2 + j, format!("f{j}"))?);
        }
        let mut logits = Vec::with_capacity(k);
        for j in 0..k {
            logits.push(parse_float(2 + d + j, format!("z{j}"))?);
        }
        samples.push(Sample {
            domain,
            label,
            feature,
            logits,
        });
    }
    if samples.is_empty() {
        return Err(DatasetError::Empty);
    }
    DomainDataset::with_row_offset(samples, 2)
}

fn write_csv(ds: &DomainDataset, path: &Path) -> Result<(), DatasetError> {
    let file = std::fs::File::create(path)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(expected_header(ds.feature_dim, ds.num_classes))
        .map_err(io_from_csv)?;
    let mut record = Vec::with_capacity(2 + ds.feature_dim + ds.num_classes);
    for s in &ds.samples {
        record.clear();
        record.push(s.domain.clone());
        record.push(s.label.to_string());
        record.extend(s.feature.iter().map(|v| v.to_string()));
        record.extend(s.logits.iter().map(|v| v.to_string()));
        w.write_record(&record).map_err(io_from_csv)?;
    }
    w.flush()?;
    Ok(())
}

fn io_from_csv(e: csv::Error) -> DatasetError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => DatasetError::Io(io),
        other => DatasetError::InvalidBinary {
            detail: format!("csv write failed: {other:?}"),
        },
    }
}

struct ByteCursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> ByteCursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], DatasetError> {
        if self.buf.len() - self.pos < n {
            return Err(DatasetError::Truncated {
                detail: format!("unexpected end of file reading {what}"),
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self, what: &str) -> Result<u32, DatasetError> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f64(&mut self, what: &str) -> Result<f64, DatasetError> {
        let b = self.take(8, what)?;
        Ok(f64::from_le_bytes([
            b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7],
        ]))
    }
}

fn parse_binary(path: &Path) -> Result<DomainDataset, DatasetError> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    let mut c = ByteCursor { buf: &buf, pos: 0 };

    if c.take(4, "magic")? != MAGIC {
        return Err(DatasetError::BadMagic);
    }
    let version = c.u32("version")?;
    if version != BINARY_VERSION {
        return Err(DatasetError::UnsupportedVersion(version));
    }
    let n = c.u32("sample count")? as usize;
    let d = c.u32("feature dimension")? as usize;
    let k = c.u32("class count")? as usize;
    if d < 1 || k < 2 {
        return Err(DatasetError::InvalidBinary {
            detail: format!("feature dimension {d} and class count {k} must be >= 1 and >= 2"),
        });
    }
    if n == 0 {
        return Err(DatasetError::Empty);
    }

    let table_len = c.u32("string table length")? as usize;
    let mut table = Vec::with_capacity(table_len.min(1 << 16));
    for i in 0..table_len {
        let len = c.u32("string length")? as usize;
        let bytes = c.take(len, "string bytes")?;
        let tag = std::str::from_utf8(bytes)
            .map_err(|_| DatasetError::InvalidBinary {
                detail: format!("string table entry {i} is not valid UTF-8"),
            })?
            .to_string();
        if tag.is_empty() {
            return Err(DatasetError::InvalidBinary {
                detail: format!("string table entry {i} is empty"),
            });
        }
        table.push(tag);
    }

    let record_bytes = 8usize
        .checked_add((d + k).checked_mul(8).ok_or_else(size_overflow)?)
        .ok_or_else(size_overflow)?;
    let body = n.checked_mul(record_bytes).ok_or_else(size_overflow)?;
    if c.buf.len() - c.pos != body {
        return Err(DatasetError::Truncated {
            detail: format!(
                "expected {body} bytes of sample records, found {}",
                c.buf.len() - c.pos
            ),
        });
    }

    let mut samples = Vec::with_capacity(n);
    for rec in 0..n {
        let dom_idx = c.u32("domain index")? as usize;
        let domain = table
            .get(dom_idx)
            .ok_or_else(|| DatasetError::InvalidBinary {
                detail: format!(
                    "record {rec}: domain index {dom_idx} out of range for table of {table_len}"
                ),
            })?
            .clone();
        let label = c.u32("label")? as usize;
        if label >= k {
            return Err(DatasetError::LabelOutOfRange {
                row: rec,
                label,
                num_classes: k,
            });
        }
        let mut feature = Vec::with_capacity(d);
        for j in 0..d {
            let v = c.f64("feature")?;
            if !v.is_finite() {
                return Err(DatasetError::NonFinite {
                    row: rec,
                    column: format!("f{j}"),
                });
            }
            feature.push(v);
        }
        let mut logits = Vec::with_capacity(k);
        for j in 0..k {
            let v = c.f64("logit")?;
            if !v.is_finite() {
                return Err(DatasetError::NonFinite {
                    row: rec,
                    column: format!("z{j}"),
                });
            }
            logits.push(v);
        }
        samples.push(Sample {
            domain,
            label,
            feature,
            logits,
        });
    }
    DomainDataset::with_row_offset(samples, 0)
}

fn size_overflow() -> DatasetError {
    DatasetError::InvalidBinary {
        detail: "declared sizes overflow".into(),
    }
}

fn write_binary(ds: &DomainDataset, path: &Path) -> Result<(), DatasetError> {
    let check_u32 = |v: usize, what: &str| -> Result<u32, DatasetError> {
        u32::try_from(v).map_err(|_| DatasetError::TooLarge {
            detail: format!("{what} = {v} exceeds u32"),
        })
    };
    let n = check_u32(ds.len(), "sample count")?;
    let d = check_u32(ds.feature_dim, "feature dimension")?;
    let k = check_u32(ds.num_classes, "class count")?;
    let tags: Vec<&str> = ds.domains().collect();
    let table_len = check_u32(tags.len(), "domain count")?;

    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(MAGIC)?;
    for v in [BINARY_VERSION, n, d, k, table_len] {
        out.write_all(&v.to_le_bytes())?;
    }
    for tag in &tags {
        out.write_all(&check_u32(tag.len(), "domain tag length")?.to_le_bytes())?;
        out.write_all(tag.as_bytes())?;
    }
    for s in &ds.samples {
        let idx = tags
            .binary_search(&s.domain.as_str())
            .expect("domain set covers every sample");
        out.write_all(&(idx as u32).to_le_bytes())?;
        out.write_all(&(s.label as u32).to_le_bytes())?;
        for v in s.feature.iter().chain(&s.logits) {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Round-half-up share of `n`, clamped so both sides of a split stay
/// non-empty.
fn small_count(n: usize, fraction: f64) -> usize {
    let raw = (fraction * n as f64 + 0.5).floor() as usize;
    raw.clamp(1, n - 1)
}

/// Splits every domain independently: each domain's rows are shuffled with a
/// sub-seed derived from the domain tag, `fraction_small` of them (rounded
/// half-up, both sides kept non-empty) go to the small side, and row order is
/// preserved within each output. Domains with fewer than 2 samples are
/// rejected. The same `(dataset, spec)` pair always produces the same split,
/// and a domain's split does not depend on which other domains are present.
pub fn split_dataset(
    ds: &DomainDataset,
    spec: &SplitSpec,
) -> Result<(DomainDataset, DomainDataset), DatasetError> {
    if !spec.fraction_small.is_finite()
        || spec.fraction_small <= 0.0
        || spec.fraction_small >= 1.0
    {
        return Err(DatasetError::InvalidFraction(spec.fraction_small));
    }
    let mut large_idx = Vec::new();
    let mut small_idx = Vec::new();
    for (tag, mut indices) in ds.domain_indices() {
        let n = indices.len();
        if n < 2 {
            return Err(DatasetError::DomainTooSmall {
                tag: tag.to_string(),
                count: n,
            });
        }
        let n_small = small_count(n, spec.fraction_small);
        let mut rng = SplitMix64::new(derive_seed(spec.seed, tag, 0));
        rng.shuffle(&mut indices);
        small_idx.extend_from_slice(&indices[..n_small]);
        large_idx.extend_from_slice(&indices[n_small..]);
    }
    Ok((ds.subset(large_idx)?, ds.subset(small_idx)?))
}

/// Restricts a dataset to the given domain tags, preserving row order.
/// Unknown tags are an error; requesting no tags yields an empty-dataset
/// error.
pub fn select_domains<S: AsRef<str>>(
    ds: &DomainDataset,
    tags: &[S],
) -> Result<DomainDataset, DatasetError> {
    let mut wanted = BTreeSet::new();
    for t in tags {
        let t = t.as_ref();
        if !ds.domains.contains(t) {
            return Err(DatasetError::UnknownDomain {
                tag: t.to_string(),
            });
        }
        wanted.insert(t.to_string());
    }
    let samples: Vec<Sample> = ds
        .samples
        .iter()
        .filter(|s| wanted.contains(&s.domain))
        .cloned()
        .collect();
    DomainDataset::new(samples)
}
