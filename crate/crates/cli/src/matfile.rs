//! Plain-text matrix files: a `rows cols p` header line followed by one line
//! of base-10 entries per row. Entries are reduced mod p on load; writing a
//! loaded matrix reproduces the canonical bytes exactly.

use krylman_core::densemat::DenseMatrix;
use krylman_core::ffield::PrimeField;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug)]
pub enum MatFileError {
    Io(std::io::Error),
    Parse { line: usize, message: String },
    BadModulus(String),
}

impl std::fmt::Display for MatFileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatFileError::Io(e) => write!(f, "{}", e),
            MatFileError::Parse { line, message } => write!(f, "line {}: {}", line, message),
            MatFileError::BadModulus(m) => write!(f, "{}", m),
        }
    }
}

impl std::error::Error for MatFileError {}

impl From<std::io::Error> for MatFileError {
    fn from(e: std::io::Error) -> Self {
        MatFileError::Io(e)
    }
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix, MatFileError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(MatFileError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(MatFileError::Parse {
            line: 1,
            message: format!("expected header 'rows cols p', got '{}'", header),
        });
    }
    let parse_num = |s: &str, what: &str| {
        s.parse::<u64>().map_err(|_| MatFileError::Parse {
            line: 1,
            message: format!("{} '{}' is not a non-negative integer", what, s),
        })
    };
    let rows = parse_num(parts[0], "row count")? as usize;
    let cols = parse_num(parts[1], "column count")? as usize;
    let p = parse_num(parts[2], "modulus")?;
    let field =
        PrimeField::new(p).map_err(|e| MatFileError::BadModulus(format!("modulus {}: {}", p, e)))?;

    let mut entries = Vec::with_capacity(rows * cols);
    let mut consumed = 0usize;
    for (idx, line) in lines {
        if line.trim().is_empty() {
            return Err(MatFileError::Parse {
                line: idx + 1,
                message: "blank line inside matrix body".into(),
            });
        }
        let mut count = 0usize;
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| MatFileError::Parse {
                line: idx + 1,
                message: format!("entry '{}' is not an integer", tok),
            })?;
            entries.push(field.reduce_i64(v));
            count += 1;
        }
        if count != cols {
            return Err(MatFileError::Parse {
                line: idx + 1,
                message: format!("expected {} entries, found {}", cols, count),
            });
        }
        consumed += 1;
        if consumed == rows {
            break;
        }
    }
    if consumed != rows {
        return Err(MatFileError::Parse {
            line: consumed + 1,
            message: format!("expected {} rows, found {}", rows, consumed),
        });
    }
    Ok(DenseMatrix::from_entries(rows, cols, field, entries).expect("dimensions checked above"))
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix, MatFileError> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix(&text)
}

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    writeln!(out, "{} {} {}", m.rows(), m.cols(), m.field().modulus()).unwrap();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| m.get(i, j).to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    out
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<(), MatFileError> {
    std::fs::write(path, format_matrix(m))?;
    Ok(())
}
