//! Netpbm images (P2, P5, P6) and JSON/CSV field exports.

use std::fmt::Write as _;

use dipole_core::render::RgbImage;
use dipole_core::{GrayImage, ScalarField, VectorField, Window};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Failure while decoding a Netpbm file. Offsets are byte positions in the
/// input.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("offset {offset}: not a Netpbm file (bad magic number)")]
    BadMagic { offset: usize },
    #[error("offset 0: unsupported Netpbm variant {magic}, expected {expected}")]
    Unsupported { magic: String, expected: &'static str },
    #[error("offset {offset}: expected an unsigned decimal number")]
    BadNumber { offset: usize },
    #[error("offset {offset}: zero image dimension")]
    ZeroDimension { offset: usize },
    #[error("offset {offset}: maxval {maxval} not in 1..=255")]
    BadMaxval { offset: usize, maxval: u64 },
    #[error("offset {offset}: sample {value} exceeds maxval {maxval}")]
    SampleOutOfRange { offset: usize, value: u64, maxval: u64 },
    #[error("offset {offset}: truncated payload, {missing} more samples expected")]
    Truncated { offset: usize, missing: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Magic {
    AsciiGray,
    BinaryGray,
    BinaryRgb,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&c) = self.data.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<(u64, usize), ParseError> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&c) = self.data.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((c - b'0') as u64))
                .ok_or(ParseError::BadNumber { offset: start })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::BadNumber { offset: start });
        }
        Ok((value, start))
    }
}

struct Header {
    magic: Magic,
    width: usize,
    height: usize,
    maxval: u64,
    /// First payload byte for binary variants.
    payload: usize,
}

fn parse_header(data: &[u8]) -> Result<Header, ParseError> {
    let magic = match data.get(..2) {
        Some(b"P2") => Magic::AsciiGray,
        Some(b"P5") => Magic::BinaryGray,
        Some(b"P6") => Magic::BinaryRgb,
        Some([b'P', d]) if d.is_ascii_digit() => {
            return Err(ParseError::Unsupported {
                magic: String::from_utf8_lossy(&data[..2]).into_owned(),
                expected: "P2, P5 or P6",
            })
        }
        _ => return Err(ParseError::BadMagic { offset: 0 }),
    };
    let mut cur = Cursor { data, pos: 2 };
    if !data.get(2).is_some_and(|c| c.is_ascii_whitespace() || *c == b'#') {
        return Err(ParseError::BadMagic { offset: 2 });
    }
    let (width, at) = cur.number()?;
    if width == 0 {
        return Err(ParseError::ZeroDimension { offset: at });
    }
    let (height, at) = cur.number()?;
    if height == 0 {
        return Err(ParseError::ZeroDimension { offset: at });
    }
    let (maxval, at) = cur.number()?;
    if maxval == 0 || maxval > 255 {
        return Err(ParseError::BadMaxval { offset: at, maxval });
    }
    // exactly one whitespace byte separates the header from binary samples
    let payload = cur.pos + 1;
    let too_big = ParseError::BadNumber { offset: 2 };
    let width = usize::try_from(width).map_err(|_| too_big)?;
    let height = usize::try_from(height).map_err(|_| ParseError::BadNumber { offset: 2 })?;
    Ok(Header {
        magic,
        width,
        height,
        maxval,
        payload,
    })
}

fn binary_samples(data: &[u8], h: &Header, channels: usize) -> Result<Vec<u8>, ParseError> {
    let count = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or(ParseError::BadNumber { offset: 2 })?;
    let available = data.len().saturating_sub(h.payload);
    if available < count {
        return Err(ParseError::Truncated {
            offset: data.len(),
            missing: count - available,
        });
    }
    let samples = &data[h.payload..h.payload + count];
    if let Some(i) = samples.iter().position(|&v| v as u64 > h.maxval) {
        return Err(ParseError::SampleOutOfRange {
            offset: h.payload + i,
            value: samples[i] as u64,
            maxval: h.maxval,
        });
    }
    Ok(samples.to_vec())
}

/// Decodes a binary (P5) or ASCII (P2) PGM. Samples are kept as stored; a
/// maxval below 255 is not rescaled.
pub fn read_pgm(data: &[u8]) -> Result<GrayImage, ParseError> {
    let h = parse_header(data)?;
    let pixels = match h.magic {
        Magic::BinaryGray => binary_samples(data, &h, 1)?,
        Magic::AsciiGray => {
            let count = h.width * h.height;
            let mut cur = Cursor {
                data,
                pos: h.payload - 1,
            };
            let mut pixels = Vec::with_capacity(count);
            for i in 0..count {
                cur.skip_space_and_comments();
                if cur.pos >= data.len() {
                    return Err(ParseError::Truncated {
                        offset: data.len(),
                        missing: count - i,
                    });
                }
                let (v, at) = cur.number()?;
                if v > h.maxval {
                    return Err(ParseError::SampleOutOfRange {
                        offset: at,
                        value: v,
                        maxval: h.maxval,
                    });
                }
                pixels.push(v as u8);
            }
            pixels
        }
        Magic::BinaryRgb => {
            return Err(ParseError::Unsupported {
                magic: "P6".into(),
                expected: "P2 or P5",
            })
        }
    };
    Ok(GrayImage::new(h.width, h.height, pixels).expect("header dimensions are non-zero"))
}

/// Decodes a binary PPM (P6).
pub fn read_ppm(data: &[u8]) -> Result<RgbImage, ParseError> {
    let h = parse_header(data)?;
    if h.magic != Magic::BinaryRgb {
        return Err(ParseError::Unsupported {
            magic: String::from_utf8_lossy(&data[..2]).into_owned(),
            expected: "P6",
        });
    }
    let pixels = binary_samples(data, &h, 3)?;
    Ok(RgbImage::new(h.width, h.height, pixels).expect("header dimensions are non-zero"))
}

/// Canonical binary PGM: `P5\n<w> <h>\n255\n` followed by the raw bytes.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Canonical binary PPM: `P6\n<w> <h>\n255\n` followed by `r g b` triples.
pub fn write_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Text format of a field export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum ExportFormat {
    #[default]
    Json,
    Csv,
}

/// Failure while reading back an exported field.
#[derive(Debug, Error)]
pub enum ImportError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("csv header must be {expected:?}")]
    Header { expected: &'static [&'static str] },
    #[error("csv row {row}: expected pixel ({i}, {j})")]
    RowOrder { row: usize, i: usize, j: usize },
    #[error("json kind {found:?}, expected {expected:?}")]
    Kind { found: String, expected: &'static str },
    #[error(transparent)]
    Field(#[from] dipole_core::Error),
}

/// JSON layout of an exported vector field.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VectorFieldJson {
    pub kind: String,
    pub width: usize,
    pub height: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, serde_json::Value>,
    pub px: Vec<f64>,
    pub py: Vec<f64>,
}

/// JSON layout of an exported scalar field.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScalarFieldJson {
    pub kind: String,
    pub width: usize,
    pub height: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, serde_json::Value>,
    pub values: Vec<f64>,
}

impl VectorFieldJson {
    pub fn new(field: &VectorField, window: Option<Window>) -> Self {
        VectorFieldJson {
            kind: "vector".into(),
            width: field.width(),
            height: field.height(),
            window: window.map(|w| w.to_string()),
            params: Default::default(),
            px: field.x_components().to_vec(),
            py: field.y_components().to_vec(),
        }
    }

    pub fn into_field(self) -> Result<VectorField, ImportError> {
        if self.kind != "vector" {
            return Err(ImportError::Kind {
                found: self.kind,
                expected: "vector",
            });
        }
        Ok(VectorField::new(self.width, self.height, self.px, self.py)?)
    }
}

impl ScalarFieldJson {
    pub fn new(field: &ScalarField, window: Option<Window>) -> Self {
        ScalarFieldJson {
            kind: "scalar".into(),
            width: field.width(),
            height: field.height(),
            window: window.map(|w| w.to_string()),
            params: Default::default(),
            values: field.values().to_vec(),
        }
    }

    pub fn into_field(self) -> Result<ScalarField, ImportError> {
        if self.kind != "scalar" {
            return Err(ImportError::Kind {
                found: self.kind,
                expected: "scalar",
            });
        }
        Ok(ScalarField::new(self.width, self.height, self.values)?)
    }
}

/// Serializes a vector field. `i` is the row and `j` the column in CSV.
///
/// Numbers use the shortest representation that parses back to the same
/// `f64`.
pub fn export_vector_field(field: &VectorField, window: Option<Window>, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => {
            serde_json::to_string(&VectorFieldJson::new(field, window)).expect("finite values") + "\n"
        }
        ExportFormat::Csv => {
            let mut out = String::from("i,j,px,py\n");
            let (xs, ys) = (field.x_components(), field.y_components());
            for i in 0..field.height() {
                for j in 0..field.width() {
                    let k = i * field.width() + j;
                    writeln!(out, "{i},{j},{},{}", xs[k], ys[k]).unwrap();
                }
            }
            out
        }
    }
}

/// Serializes a scalar field; CSV columns are `i,j,value`.
pub fn export_scalar_field(field: &ScalarField, window: Option<Window>, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => {
            serde_json::to_string(&ScalarFieldJson::new(field, window)).expect("finite values") + "\n"
        }
        ExportFormat::Csv => {
            let mut out = String::from("i,j,value\n");
            for i in 0..field.height() {
                for j in 0..field.width() {
                    writeln!(out, "{i},{j},{}", field.get(j, i)).unwrap();
                }
            }
            out
        }
    }
}

fn csv_rows(
    text: &str,
    expected: &'static [&'static str],
) -> Result<(usize, usize, Vec<Vec<f64>>), ImportError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    if rdr.headers()?.iter().ne(expected.iter().copied()) {
        return Err(ImportError::Header { expected });
    }
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != expected.len() {
            return Err(ImportError::Header { expected });
        }
        let parse_idx = |s: &str| s.parse::<usize>().ok();
        let (Some(i), Some(j)) = (parse_idx(&rec[0]), parse_idx(&rec[1])) else {
            return Err(ImportError::Header { expected });
        };
        coords.push((i, j));
        let mut row = Vec::with_capacity(expected.len() - 2);
        for v in rec.iter().skip(2) {
            row.push(v.parse::<f64>().map_err(|_| ImportError::Header { expected })?);
        }
        values.push(row);
    }
    let height = coords.iter().map(|c| c.0 + 1).max().unwrap_or(0);
    let width = coords.iter().map(|c| c.1 + 1).max().unwrap_or(0);
    for (row, &(i, j)) in coords.iter().enumerate() {
        let (ei, ej) = (row / width.max(1), row % width.max(1));
        if (i, j) != (ei, ej) {
            return Err(ImportError::RowOrder { row, i: ei, j: ej });
        }
    }
    Ok((width, height, values))
}

/// Reads back the output of [`export_vector_field`].
pub fn import_vector_field(text: &str, format: ExportFormat) -> Result<VectorField, ImportError> {
    match format {
        ExportFormat::Json => serde_json::from_str::<VectorFieldJson>(text)?.into_field(),
        ExportFormat::Csv => {
            let (w, h, rows) = csv_rows(text, &["i", "j", "px", "py"])?;
            let xs = rows.iter().map(|r| r[0]).collect();
            let ys = rows.iter().map(|r| r[1]).collect();
            Ok(VectorField::new(w, h, xs, ys)?)
        }
    }
}

/// Reads back the output of [`export_scalar_field`].
pub fn import_scalar_field(text: &str, format: ExportFormat) -> Result<ScalarField, ImportError> {
    match format {
        ExportFormat::Json => serde_json::from_str::<ScalarFieldJson>(text)?.into_field(),
        ExportFormat::Csv => {
            let (w, h, rows) = csv_rows(text, &["i", "j", "value"])?;
            Ok(ScalarField::new(w, h, rows.iter().map(|r| r[0]).collect())?)
        }
    }
}
