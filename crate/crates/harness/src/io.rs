//! CSV matrices and masks.
//!
//! A matrix file holds one matrix row per line with comma-separated values and
//! no header. An empty cell or the token `NaN` (any case) marks a missing
//! entry, so a blank line is a row holding one missing cell. Values are
//! written in Rust's shortest round-trip decimal form, so a save followed by
//! a load reproduces every finite entry bitwise.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use vmc_core::{DataMatrix, ObservationMask, ObservedMatrix};

use crate::error::{HarnessError, Result};

const MASK_HEADER: &str = "row,col";

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        path: path.to_path_buf(),
        line: line as u64,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// Parses matrix CSV text. `origin` only labels error messages.
pub fn parse_matrix_csv(text: &str, origin: &Path) -> Result<ObservedMatrix> {
    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        // every line is a row; a blank line is a single missing cell
        let raw = raw.trim_end_matches('\r');
        let mut row = Vec::new();
        for token in raw.split(',') {
            let token = token.trim();
            if token.is_empty() || token.eq_ignore_ascii_case("nan") {
                row.push(None);
                continue;
            }
            let value: f64 = token
                .parse()
                .map_err(|_| parse_error(origin, line, format!("not a number: {token:?}")))?;
            if !value.is_finite() {
                return Err(parse_error(origin, line, format!("infinite value {token:?}")));
            }
            row.push(Some(value));
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_error(
                    origin,
                    line,
                    format!("ragged row: {} fields, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(parse_error(origin, 1, "empty matrix"));
    }
    let mut values = Vec::with_capacity(nrows * ncols);
    for j in 0..ncols {
        values.extend(rows.iter().map(|r| r[j]));
    }
    Ok(ObservedMatrix::from_entries(nrows, ncols, values)?)
}

pub fn load_matrix_csv(path: impl AsRef<Path>) -> Result<ObservedMatrix> {
    let path = path.as_ref();
    parse_matrix_csv(&read(path)?, path)
}

/// Loads a matrix that must have no missing entries.
pub fn load_complete_csv(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let observed = load_matrix_csv(path)?;
    observed.to_complete().ok_or_else(|| {
        HarnessError::Data(format!(
            "{}: {} entries are missing but a complete matrix is required",
            path.display(),
            observed.mask().hidden_len()
        ))
    })
}

fn render_rows(nrows: usize, ncols: usize, cell: impl Fn(usize, usize) -> Option<f64>) -> String {
    let mut out = String::new();
    for i in 0..nrows {
        for j in 0..ncols {
            if j > 0 {
                out.push(',');
            }
            if let Some(v) = cell(i, j) {
                out.push_str(&format!("{v:?}"));
            }
        }
        out.push('\n');
    }
    out
}

pub fn matrix_to_csv(x: &DMatrix<f64>) -> String {
    render_rows(x.nrows(), x.ncols(), |i, j| Some(x[(i, j)]))
}

pub fn save_matrix_csv(path: impl AsRef<Path>, x: &DMatrix<f64>) -> Result<()> {
    write(path.as_ref(), &matrix_to_csv(x))
}

/// Writes missing entries as empty cells.
pub fn save_observed_csv(path: impl AsRef<Path>, x: &ObservedMatrix) -> Result<()> {
    write(
        path.as_ref(),
        &render_rows(x.nrows(), x.ncols(), |i, j| x.get(i, j)),
    )
}

pub fn save_mask_csv(path: impl AsRef<Path>, mask: &ObservationMask) -> Result<()> {
    let mut out = format!("{MASK_HEADER}\n");
    for (i, j) in mask.pairs() {
        out.push_str(&format!("{i},{j}\n"));
    }
    write(path.as_ref(), &out)
}

/// Reads a mask of the given shape. The first line is a header and is skipped.
pub fn load_mask_csv(path: impl AsRef<Path>, nrows: usize, ncols: usize) -> Result<ObservationMask> {
    let path = path.as_ref();
    let text = read(path)?;
    let mut pairs = Vec::new();
    for (idx, raw) in text.lines().enumerate().skip(1) {
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let line = idx + 1;
        let parsed: Option<(usize, usize)> = raw.split_once(',').and_then(|(a, b)| {
            Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
        });
        let (i, j) = parsed.ok_or_else(|| parse_error(path, line, format!("expected row,col, got {raw:?}")))?;
        if i >= nrows || j >= ncols {
            return Err(parse_error(
                path,
                line,
                format!("({i},{j}) outside a {nrows}x{ncols} matrix"),
            ));
        }
        pairs.push((i, j));
    }
    Ok(ObservationMask::from_pairs(nrows, ncols, pairs)?)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    write(path, text)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    read(path)
}
