//! Plain-text matrix files.
//!
//! Line 1 holds `m N`; each of the next `m` lines holds `N` numbers separated
//! by single spaces. Values are written with the shortest representation that
//! parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::Dictionary;
use crate::error::{Error, Result};

pub fn format_matrix(dict: &Dictionary) -> String {
    let a = dict.atoms();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:?}", a[(i, j)]);
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str, label: &str) -> Result<Dictionary> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: hline,
            message: format!("header must be \"m N\", got {header:?}"),
        });
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|e| Error::Parse {
            line: hline,
            message: format!("bad dimension {s:?}: {e}"),
        })
    };
    let (m, n) = (parse_dim(dims[0])?, parse_dim(dims[1])?);

    let mut data = DMatrix::zeros(m, n);
    let mut row = 0;
    for (lineno, line) in lines {
        if row == m {
            return Err(Error::Parse {
                line: lineno,
                message: format!("more than the declared {m} rows"),
            });
        }
        let values: Vec<&str> = line.split_whitespace().collect();
        if values.len() != n {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected {n} values, found {}", values.len()),
            });
        }
        for (j, v) in values.iter().enumerate() {
            let x: f64 = v.parse().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("bad number {v:?}: {e}"),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("non-finite value {v:?}"),
                });
            }
            data[(row, j)] = x;
        }
        row += 1;
    }
    if row != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: row,
        });
    }
    Dictionary::new(data, label)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Dictionary> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_matrix(&text, &path.display().to_string())
}

pub fn save_matrix(dict: &Dictionary, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_matrix(dict))?;
    Ok(())
}

/// Numbers separated by whitespace and/or commas, any line layout.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: f64 = tok.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("not a number: {tok:?}"),
            })?;
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no numbers found".into(),
        });
    }
    Ok(out)
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&std::fs::read_to_string(path)?)
}
