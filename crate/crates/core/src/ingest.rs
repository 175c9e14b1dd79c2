//! File formats: feature matrices (NPY v1.0, CSV, raw little-endian f64),
//! candidate orderings, and selection result records.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{FeatureMatrix, NormType};
use crate::strategies::{CandidateOrdering, SelectionConfig, SelectionResult, StepDiagnostic};

pub const NPY_MAGIC: &[u8; 6] = b"\x93NUMPY";
const NPY_ALIGN: usize = 64;
const RAW_HEADER_LEN: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureFormat {
    NpyV1,
    Csv,
    RawF64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }

    fn descr(self) -> &'static str {
        match self {
            Dtype::F32 => "<f4",
            Dtype::F64 => "<f8",
        }
    }
}

/// What a feature file declares about its payload. Payloads are always
/// little-endian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureFileHeader {
    pub format: FeatureFormat,
    pub shape: (usize, usize),
    pub dtype: Dtype,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    pub normalize_rows: bool,
    pub center: bool,
}

/// Loads a feature matrix, widening f32 payloads to f64, then applies the
/// optional transforms in the order center, normalize rows.
pub fn load_features(path: impl AsRef<Path>, options: &LoadOptions) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let features = match detect_format(path, &bytes)? {
        FeatureFormat::NpyV1 => parse_npy(&bytes)?,
        FeatureFormat::RawF64 => parse_raw_f64(&bytes)?,
        FeatureFormat::Csv => {
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| Error::ParseError(format!("CSV is not UTF-8: {e}")))?;
            parse_csv(text)?
        }
    };
    apply_transforms(features, options)
}

/// NPY is recognized by its magic bytes; the other formats by extension
/// (`csv`/`txt` for CSV, `f64`/`raw`/`bin` for raw).
pub fn detect_format(path: &Path, bytes: &[u8]) -> Result<FeatureFormat> {
    if bytes.starts_with(NPY_MAGIC) {
        return Ok(FeatureFormat::NpyV1);
    }
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("npy") => Err(Error::UnsupportedFormat(
            "file has .npy extension but lacks the NPY magic string".into(),
        )),
        Some("csv" | "txt") => Ok(FeatureFormat::Csv),
        Some("f64" | "raw" | "bin") => Ok(FeatureFormat::RawF64),
        _ => Err(Error::UnsupportedFormat(format!(
            "cannot determine format of {}",
            path.display()
        ))),
    }
}

pub fn apply_transforms(features: FeatureMatrix, options: &LoadOptions) -> Result<FeatureMatrix> {
    if !options.center && !options.normalize_rows {
        return Ok(features);
    }
    let n = features.n_examples();
    let d = features.n_dims();
    let mut data = features.data().to_vec();
    if options.center {
        let mut mean = vec![0.0; d];
        for row in data.chunks_exact(d) {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        for row in data.chunks_exact_mut(d) {
            for (v, m) in row.iter_mut().zip(&mean) {
                *v -= m;
            }
        }
    }
    if options.normalize_rows {
        for row in data.chunks_exact_mut(d) {
            let norm = NormType::L2.of(row);
            if norm > 0.0 {
                for v in row.iter_mut() {
                    *v /= norm;
                }
            }
        }
    }
    FeatureMatrix::new(n, d, data)
}

// ---------------------------------------------------------------------------
// NPY

/// Parses the header of an NPY v1.0 file and returns it with the payload
/// offset.
pub fn parse_npy_header(bytes: &[u8]) -> Result<(FeatureFileHeader, usize)> {
    if bytes.len() < 10 || !bytes.starts_with(NPY_MAGIC) {
        return Err(Error::UnsupportedFormat("missing NPY magic string".into()));
    }
    let (major, minor) = (bytes[6], bytes[7]);
    if (major, minor) != (1, 0) {
        return Err(Error::UnsupportedFormat(format!(
            "NPY version {major}.{minor} (only 1.0 is supported)"
        )));
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let start = 10;
    let end = start + header_len;
    if bytes.len() < end {
        return Err(Error::UnsupportedFormat(format!(
            "header declares {header_len} bytes but file ends at {}",
            bytes.len()
        )));
    }
    let text = std::str::from_utf8(&bytes[start..end])
        .map_err(|_| Error::UnsupportedFormat("NPY header is not ASCII".into()))?;
    let dict = HeaderParser::new(text).parse_dict()?;

    let mut descr = None;
    let mut fortran = None;
    let mut shape = None;
    for (key, value) in dict {
        match (key.as_str(), value) {
            ("descr", PyValue::Str(s)) => descr = Some(s),
            ("fortran_order", PyValue::Bool(b)) => fortran = Some(b),
            ("shape", PyValue::Tuple(items)) => shape = Some(items),
            (k, v) => {
                return Err(Error::UnsupportedFormat(format!(
                    "unexpected header entry '{k}': {v:?}"
                )))
            }
        }
    }
    let descr = descr.ok_or_else(|| malformed("missing 'descr'"))?;
    let fortran = fortran.ok_or_else(|| malformed("missing 'fortran_order'"))?;
    let shape = shape.ok_or_else(|| malformed("missing 'shape'"))?;

    let dtype = match descr.as_str() {
        "<f8" => Dtype::F64,
        "<f4" => Dtype::F32,
        ">f8" | ">f4" => {
            return Err(Error::UnsupportedFormat(format!(
                "big-endian dtype '{descr}'"
            )))
        }
        other => return Err(Error::UnsupportedFormat(format!("dtype '{other}'"))),
    };
    if fortran {
        return Err(Error::UnsupportedFormat(
            "fortran_order True (only C order is supported)".into(),
        ));
    }
    let dims: Vec<usize> = shape
        .iter()
        .map(|v| match v {
            PyValue::Int(i) => Ok(*i),
            other => Err(malformed(&format!("shape entry {other:?}"))),
        })
        .collect::<Result<_>>()?;
    let [n, d] = dims[..] else {
        return Err(Error::UnsupportedFormat(format!(
            "{}-D array (only 2-D is supported)",
            dims.len()
        )));
    };
    Ok((
        FeatureFileHeader {
            format: FeatureFormat::NpyV1,
            shape: (n, d),
            dtype,
        },
        end,
    ))
}

pub fn parse_npy(bytes: &[u8]) -> Result<FeatureMatrix> {
    let (header, offset) = parse_npy_header(bytes)?;
    let (n, d) = header.shape;
    let payload = &bytes[offset..];
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(header.dtype.size()))
        .ok_or_else(|| Error::ShapeMismatch("declared shape overflows".into()))?;
    if payload.len() != expected {
        return Err(Error::ShapeMismatch(format!(
            "shape ({n}, {d}) of {} needs {expected} payload bytes, found {}",
            header.dtype.descr(),
            payload.len()
        )));
    }
    let data = decode_le(payload, header.dtype);
    FeatureMatrix::new(n, d, data)
}

fn decode_le(payload: &[u8], dtype: Dtype) -> Vec<f64> {
    match dtype {
        Dtype::F64 => payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
        Dtype::F32 => payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    }
}

/// Encodes a matrix as NPY v1.0 with the header padded to a 64-byte
/// boundary. `Dtype::F32` rounds every value to single precision.
pub fn encode_npy(features: &FeatureMatrix, dtype: Dtype) -> Vec<u8> {
    let dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': ({}, {}), }}",
        dtype.descr(),
        features.n_examples(),
        features.n_dims()
    );
    let unpadded = NPY_MAGIC.len() + 2 + 2 + dict.len() + 1;
    let pad = (NPY_ALIGN - unpadded % NPY_ALIGN) % NPY_ALIGN;
    let header_len = dict.len() + pad + 1;

    let mut out = Vec::with_capacity(unpadded + pad + features.data().len() * dtype.size());
    out.extend_from_slice(NPY_MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.extend(std::iter::repeat_n(b' ', pad));
    out.push(b'\n');
    match dtype {
        Dtype::F64 => features
            .data()
            .iter()
            .for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
        Dtype::F32 => features
            .data()
            .iter()
            .for_each(|v| out.extend_from_slice(&(*v as f32).to_le_bytes())),
    }
    out
}

pub fn write_npy(path: impl AsRef<Path>, features: &FeatureMatrix, dtype: Dtype) -> Result<()> {
    fs::write(path, encode_npy(features, dtype))?;
    Ok(())
}

fn malformed(what: &str) -> Error {
    Error::UnsupportedFormat(format!("malformed NPY header: {what}"))
}

#[derive(Clone, Debug, PartialEq)]
enum PyValue {
    Str(String),
    Bool(bool),
    Int(usize),
    Tuple(Vec<PyValue>),
}

/// Just enough of the Python literal grammar for NPY header dicts.
struct HeaderParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> HeaderParser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(malformed(&format!(
                "expected '{}' at byte {}",
                c as char, self.pos
            )))
        }
    }

    fn parse_dict(&mut self) -> Result<Vec<(String, PyValue)>> {
        self.expect(b'{')?;
        let mut entries = Vec::new();
        loop {
            if self.peek() == Some(b'}') {
                self.pos += 1;
                break;
            }
            let PyValue::Str(key) = self.parse_value()? else {
                return Err(malformed("dict keys must be strings"));
            };
            self.expect(b':')?;
            let value = self.parse_value()?;
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(malformed(&format!("duplicate key '{key}'")));
            }
            entries.push((key, value));
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {}
                _ => return Err(malformed("expected ',' or '}'")),
            }
        }
        if self.peek().is_some() {
            return Err(malformed("trailing characters after dict"));
        }
        Ok(entries)
    }

    fn parse_value(&mut self) -> Result<PyValue> {
        match self.peek() {
            Some(q @ (b'\'' | b'"')) => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos] != q {
                    self.pos += 1;
                }
                if self.pos == self.src.len() {
                    return Err(malformed("unterminated string"));
                }
                let s = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                self.pos += 1;
                Ok(PyValue::Str(s))
            }
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    if self.peek() == Some(b')') {
                        self.pos += 1;
                        break;
                    }
                    items.push(self.parse_value()?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {}
                        _ => return Err(malformed("expected ',' or ')' in tuple")),
                    }
                }
                Ok(PyValue::Tuple(items))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v = digits
                    .parse()
                    .map_err(|_| malformed(&format!("integer '{digits}'")))?;
                // numpy may write `3L` in old headers
                if self.src.get(self.pos) == Some(&b'L') {
                    self.pos += 1;
                }
                Ok(PyValue::Int(v))
            }
            Some(_) => {
                let rest = &self.src[self.pos..];
                if rest.starts_with(b"True") {
                    self.pos += 4;
                    Ok(PyValue::Bool(true))
                } else if rest.starts_with(b"False") {
                    self.pos += 5;
                    Ok(PyValue::Bool(false))
                } else {
                    Err(malformed(&format!("unexpected token at byte {}", self.pos)))
                }
            }
            None => Err(malformed("unexpected end of header")),
        }
    }
}

// ---------------------------------------------------------------------------
// CSV and raw

/// Comma-separated decimal floats, one row per line, no header, no quoting.
pub fn parse_csv(text: &str) -> Result<FeatureMatrix> {
    let mut data = Vec::new();
    let mut d = None;
    let mut n = 0;
    for (row, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if text.lines().skip(row + 1).any(|l| !l.trim().is_empty()) {
                return Err(Error::ParseError(format!(
                    "empty line {} inside CSV",
                    row + 1
                )));
            }
            break;
        }
        let mut cols = 0;
        for (col, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::ParseError(format!(
                    "row {row}, column {col}: '{}' is not a number",
                    field.trim()
                ))
            })?;
            data.push(v);
            cols += 1;
        }
        match d {
            None => d = Some(cols),
            Some(d) if d != cols => {
                return Err(Error::ShapeMismatch(format!(
                    "row {row} has {cols} columns, expected {d}"
                )))
            }
            _ => {}
        }
        n += 1;
    }
    FeatureMatrix::new(n, d.unwrap_or(0), data)
}

/// Writes values with the shortest representation that parses back to the
/// same `f64`.
pub fn encode_csv(features: &FeatureMatrix) -> String {
    let mut out = String::new();
    for row in features.rows() {
        let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(path: impl AsRef<Path>, features: &FeatureMatrix) -> Result<()> {
    fs::write(path, encode_csv(features))?;
    Ok(())
}

/// 16-byte header of two little-endian u64 (N, d), then N*d little-endian f64.
pub fn parse_raw_f64(bytes: &[u8]) -> Result<FeatureMatrix> {
    if bytes.len() < RAW_HEADER_LEN {
        return Err(Error::ShapeMismatch(format!(
            "raw file is {} bytes, shorter than its 16-byte header",
            bytes.len()
        )));
    }
    let n = u64::from_le_bytes(bytes[0..8].try_into().unwrap());
    let d = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let payload = &bytes[RAW_HEADER_LEN..];
    let expected = n
        .checked_mul(d)
        .and_then(|c| c.checked_mul(8))
        .filter(|&c| c == payload.len() as u64);
    if expected.is_none() {
        return Err(Error::ShapeMismatch(format!(
            "raw header declares ({n}, {d}) but payload has {} bytes",
            payload.len()
        )));
    }
    FeatureMatrix::new(n as usize, d as usize, decode_le(payload, Dtype::F64))
}

pub fn encode_raw_f64(features: &FeatureMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(RAW_HEADER_LEN + features.data().len() * 8);
    out.extend_from_slice(&(features.n_examples() as u64).to_le_bytes());
    out.extend_from_slice(&(features.n_dims() as u64).to_le_bytes());
    for v in features.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_raw_f64(path: impl AsRef<Path>, features: &FeatureMatrix) -> Result<()> {
    fs::write(path, encode_raw_f64(features))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Candidates

/// Reads newline-delimited indices or a JSON integer array and validates
/// them against `n_examples`.
pub fn load_candidates(path: impl AsRef<Path>, n_examples: usize) -> Result<CandidateOrdering> {
    let text = fs::read_to_string(path)?;
    parse_candidates(&text, n_examples)
}

pub fn parse_candidates(text: &str, n_examples: usize) -> Result<CandidateOrdering> {
    CandidateOrdering::new(parse_index_list(text)?, n_examples)
}

/// Newline-delimited nonnegative integers or a JSON array of them.
pub fn parse_index_list(text: &str) -> Result<Vec<usize>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed)
            .map_err(|e| Error::ParseError(format!("invalid JSON index array: {e}")));
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| {
                Error::ParseError(format!("line {}: '{}' is not an index", i + 1, l.trim()))
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Results

pub const RESULT_SCHEMA_VERSION: u32 = 1;

/// Serialized form of a selection run. Field order is the on-disk key order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub config: SelectionConfig,
    pub seed: u64,
    pub indices: Vec<usize>,
    pub steps: Vec<StepDiagnostic>,
    pub input_checksum: Option<String>,
}

impl ResultRecord {
    pub fn from_result(result: &SelectionResult, input_checksum: Option<String>) -> Self {
        Self {
            schema_version: RESULT_SCHEMA_VERSION,
            config: result.config.clone(),
            seed: result.config.seed,
            indices: result.indices.clone(),
            steps: result.steps.clone(),
            input_checksum,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: Self = serde_json::from_str(text)
            .map_err(|e| Error::ParseError(format!("invalid result record: {e}")))?;
        if record.schema_version != RESULT_SCHEMA_VERSION {
            return Err(Error::UnsupportedFormat(format!(
                "result schema version {}",
                record.schema_version
            )));
        }
        Ok(record)
    }
}

/// `r.json` -> `r.indices.txt`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("indices.txt")
}

/// Writes the JSON record and its plain index sidecar. Returns the sidecar
/// path.
pub fn write_result(record: &ResultRecord, path: impl AsRef<Path>) -> Result<PathBuf> {
    let path = path.as_ref();
    fs::write(path, record.to_json())?;
    let sidecar = sidecar_path(path);
    let lines: String = record.indices.iter().map(|i| format!("{i}\n")).collect();
    fs::write(&sidecar, lines)?;
    Ok(sidecar)
}

pub fn load_result(path: impl AsRef<Path>) -> Result<ResultRecord> {
    ResultRecord::from_json(&fs::read_to_string(path)?)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
