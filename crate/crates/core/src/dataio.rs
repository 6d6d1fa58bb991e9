//! MNIST IDX files and CSV columns.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use thiserror::Error;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const MNIST_PIXELS: usize = 28 * 28;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: truncated header, needed {needed} bytes at offset {offset}")]
    TruncatedHeader {
        path: PathBuf,
        offset: usize,
        needed: usize,
    },
    #[error(
        "{path}: truncated payload at byte offset {offset}, expected {expected} bytes in total"
    )]
    TruncatedPayload {
        path: PathBuf,
        offset: usize,
        expected: usize,
    },
    #[error("{path}: bad magic number {found:#010x} at offset 0, expected {expected:#010x}")]
    BadMagic {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
    #[error("count mismatch: {images} images but {labels} labels")]
    CountMismatch { images: usize, labels: usize },
    #[error("{path}: label {value} at byte offset {offset} is not a digit")]
    BadLabel {
        path: PathBuf,
        offset: usize,
        value: u8,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("column {0:?} not found")]
    MissingColumn(String),
    #[error("row {row}: {message}")]
    BadRow { row: usize, message: String },
}

fn read_file(path: &Path) -> Result<Vec<u8>, DataError> {
    let io = |source| DataError::Io {
        path: path.to_owned(),
        source,
    };
    let mut raw = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut raw))
        .map_err(io)?;
    let gz_suffix = path.extension().is_some_and(|e| e == "gz");
    if gz_suffix || raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(io)?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn be_u32(bytes: &[u8], offset: usize, path: &Path) -> Result<u32, DataError> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| DataError::TruncatedHeader {
            path: path.to_owned(),
            offset,
            needed: 4,
        })
}

fn check_magic(bytes: &[u8], expected: u32, path: &Path) -> Result<(), DataError> {
    let found = be_u32(bytes, 0, path)?;
    if found != expected {
        return Err(DataError::BadMagic {
            path: path.to_owned(),
            found,
            expected,
        });
    }
    Ok(())
}

/// Flattened images, row-major, pixel values scaled into `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl ImageMatrix {
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

fn parse_images(bytes: &[u8], path: &Path, limit: Option<usize>) -> Result<ImageMatrix, DataError> {
    check_magic(bytes, IMAGE_MAGIC, path)?;
    let count = be_u32(bytes, 4, path)? as usize;
    let height = be_u32(bytes, 8, path)? as usize;
    let width = be_u32(bytes, 12, path)? as usize;
    let cols = height * width;
    let expected = 16 + count * cols;
    if bytes.len() < expected {
        return Err(DataError::TruncatedPayload {
            path: path.to_owned(),
            offset: bytes.len(),
            expected,
        });
    }
    let rows = limit.map_or(count, |n| n.min(count));
    let data = bytes[16..16 + rows * cols]
        .iter()
        .map(|&b| f32::from(b) / 255.0)
        .collect();
    Ok(ImageMatrix { rows, cols, data })
}

fn parse_labels(bytes: &[u8], path: &Path, limit: Option<usize>) -> Result<Vec<u8>, DataError> {
    check_magic(bytes, LABEL_MAGIC, path)?;
    let count = be_u32(bytes, 4, path)? as usize;
    if bytes.len() < 8 + count {
        return Err(DataError::TruncatedPayload {
            path: path.to_owned(),
            offset: bytes.len(),
            expected: 8 + count,
        });
    }
    let n = limit.map_or(count, |l| l.min(count));
    let labels = bytes[8..8 + n].to_vec();
    if let Some(i) = labels.iter().position(|&l| l > 9) {
        return Err(DataError::BadLabel {
            path: path.to_owned(),
            offset: 8 + i,
            value: labels[i],
        });
    }
    Ok(labels)
}

/// Reads an IDX image file and its label file. Gzip input is detected by a
/// `.gz` suffix or the gzip magic bytes. `limit` keeps the first N items.
pub fn load_idx(
    images_path: &Path,
    labels_path: &Path,
    limit: Option<usize>,
) -> Result<(ImageMatrix, Vec<u8>), DataError> {
    let img_bytes = read_file(images_path)?;
    let lbl_bytes = read_file(labels_path)?;
    let total_images = parse_count(&img_bytes, IMAGE_MAGIC, images_path)?;
    let total_labels = parse_count(&lbl_bytes, LABEL_MAGIC, labels_path)?;
    if total_images != total_labels {
        return Err(DataError::CountMismatch {
            images: total_images,
            labels: total_labels,
        });
    }
    let images = parse_images(&img_bytes, images_path, limit)?;
    let labels = parse_labels(&lbl_bytes, labels_path, limit)?;
    Ok((images, labels))
}

fn parse_count(bytes: &[u8], magic: u32, path: &Path) -> Result<usize, DataError> {
    check_magic(bytes, magic, path)?;
    Ok(be_u32(bytes, 4, path)? as usize)
}

/// The MNIST train/test split.
#[derive(Debug, Clone)]
pub struct MnistDataset {
    pub train_images: ImageMatrix,
    pub train_labels: Vec<u8>,
    pub test_images: ImageMatrix,
    pub test_labels: Vec<u8>,
}

fn find_file(dir: &Path, stem: &str) -> PathBuf {
    let plain = dir.join(stem);
    if plain.exists() {
        return plain;
    }
    let gz = dir.join(format!("{stem}.gz"));
    if gz.exists() {
        gz
    } else {
        plain
    }
}

impl MnistDataset {
    /// Loads the four standard files from `dir` (plain or `.gz`). With
    /// `subset`, only the first N train and N test samples are kept.
    pub fn load(dir: &Path, subset: Option<usize>) -> Result<Self, DataError> {
        let (train_images, train_labels) = load_idx(
            &find_file(dir, "train-images-idx3-ubyte"),
            &find_file(dir, "train-labels-idx1-ubyte"),
            subset,
        )?;
        let (test_images, test_labels) = load_idx(
            &find_file(dir, "t10k-images-idx3-ubyte"),
            &find_file(dir, "t10k-labels-idx1-ubyte"),
            subset,
        )?;
        Ok(MnistDataset {
            train_images,
            train_labels,
            test_images,
            test_labels,
        })
    }

    /// `$QOC_DATA_DIR`, if set.
    pub fn default_dir() -> Option<PathBuf> {
        std::env::var_os("QOC_DATA_DIR").map(PathBuf::from)
    }
}

/// A named column of raw strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabularColumn {
    pub name: String,
    pub values: Vec<String>,
}

/// Reads one column of a headed CSV file. A header-only file gives an empty column.
pub fn read_csv_column(path: &Path, column: &str) -> Result<TabularColumn, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let idx = headers
        .iter()
        .position(|h| h == column)
        .ok_or_else(|| DataError::MissingColumn(column.to_owned()))?;
    let mut values = Vec::new();
    for record in reader.records() {
        values.push(record?[idx].to_owned());
    }
    Ok(TabularColumn {
        name: column.to_owned(),
        values,
    })
}

/// Writes a single string column with a header.
pub fn write_column_csv(path: &Path, column: &TabularColumn) -> Result<(), DataError> {
    let file = File::create(path).map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })?;
    write_column(file, column).map_err(|e| with_path(e, path))
}

/// [`write_column_csv`] to any writer.
pub fn write_column<W: Write>(out: W, column: &TabularColumn) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([&column.name])?;
    for v in &column.values {
        w.write_record([v])?;
    }
    w.flush().map_err(|source| DataError::Io {
        path: PathBuf::new(),
        source,
    })
}

fn with_path(e: DataError, path: &Path) -> DataError {
    match e {
        DataError::Io { source, .. } => DataError::Io {
            path: path.to_owned(),
            source,
        },
        other => other,
    }
}

/// Writes a numeric matrix. Values use the shortest exact decimal form, so
/// reading them back is lossless.
pub fn write_matrix_csv(
    path: &Path,
    matrix: &[Vec<f64>],
    header: &[String],
) -> Result<(), DataError> {
    let file = File::create(path).map_err(|source| DataError::Io {
        path: path.to_owned(),
        source,
    })?;
    write_matrix(file, matrix, header).map_err(|e| with_path(e, path))
}

/// [`write_matrix_csv`] to any writer.
pub fn write_matrix<W: Write>(
    out: W,
    matrix: &[Vec<f64>],
    header: &[String],
) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (row, values) in matrix.iter().enumerate() {
        if values.len() != header.len() {
            return Err(DataError::BadRow {
                row,
                message: format!("{} values for {} header fields", values.len(), header.len()),
            });
        }
        w.write_record(values.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|source| DataError::Io {
        path: PathBuf::new(),
        source,
    })
}

/// Reads a headed numeric CSV written by [`write_matrix_csv`].
pub fn read_matrix_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let values = record?
            .iter()
            .map(|f| {
                f.trim().parse::<f64>().map_err(|_| DataError::BadRow {
                    row,
                    message: format!("not a number: {f:?}"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(values);
    }
    Ok((header, rows))
}
