//! JSON result documents emitted by `kalman --emit` and consumed by `verify`.

use krylman_core::densemat::DenseMatrix;
use krylman_core::ffield::PrimeField;
use krylman_core::kalman::{KalmanForm, VerificationReport};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Serialize, Deserialize)]
pub struct ResultDocument {
    pub algorithm: String,
    pub prime: u64,
    pub n: usize,
    pub m: usize,
    pub r: usize,
    /// Companion block degrees of H; absent for the verbatim branch
    /// where H = A carries no block layout.
    pub degrees: Option<Vec<usize>>,
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Vec<u64>>>,
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<Vec<u64>>>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<Vec<u64>>>,
    #[serde(rename = "Y", skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<Vec<u64>>>,
    #[serde(rename = "B1", skip_serializing_if = "Option::is_none")]
    pub b1: Option<Vec<Vec<u64>>>,
    pub checks: Checks,
    /// Stage name to wall-clock milliseconds.
    pub timings: BTreeMap<String, f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Checks {
    pub t_nonsingular: bool,
    pub zero_block: bool,
    pub blocks_match: bool,
    pub b_transform: bool,
    pub h_structure: Option<bool>,
}

impl From<&VerificationReport> for Checks {
    fn from(r: &VerificationReport) -> Self {
        Checks {
            t_nonsingular: r.t_nonsingular,
            zero_block: r.zero_block,
            blocks_match: r.blocks_match,
            b_transform: r.b_transform,
            h_structure: r.h_structure,
        }
    }
}

pub fn matrix_rows(m: &DenseMatrix) -> Vec<Vec<u64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn rows_to_matrix(
    rows: &[Vec<u64>],
    nrows: usize,
    ncols: usize,
    field: PrimeField,
) -> Result<DenseMatrix, String> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(format!("matrix in document is not {}x{}", nrows, ncols));
    }
    let entries = rows.iter().flatten().map(|&v| field.reduce(v)).collect();
    DenseMatrix::from_entries(nrows, ncols, field, entries).map_err(|e| e.to_string())
}

impl ResultDocument {
    pub fn from_form(
        algorithm: &str,
        kf: &KalmanForm,
        n: usize,
        m: usize,
        prime: u64,
        report: &VerificationReport,
        timings: BTreeMap<String, f64>,
        with_matrices: bool,
    ) -> Self {
        ResultDocument {
            algorithm: algorithm.to_string(),
            prime,
            n,
            m,
            r: kf.r,
            degrees: kf.block_degrees.clone(),
            t: with_matrices.then(|| matrix_rows(&kf.t)),
            h: with_matrices.then(|| matrix_rows(&kf.h)),
            x: with_matrices.then(|| matrix_rows(&kf.x)),
            y: with_matrices.then(|| matrix_rows(&kf.y)),
            b1: with_matrices.then(|| matrix_rows(&kf.b1)),
            checks: Checks::from(report),
            timings,
        }
    }

    /// Reconstructs the stored Kalman form; requires the matrix fields.
    pub fn to_form(&self, field: PrimeField) -> Result<KalmanForm, String> {
        if field.modulus() != self.prime {
            return Err(format!(
                "document prime {} does not match matrices over GF({})",
                self.prime,
                field.modulus()
            ));
        }
        let n = self.n;
        let r = self.r;
        let grab = |opt: &Option<Vec<Vec<u64>>>, name: &str, nr: usize, nc: usize| {
            opt.as_ref()
                .ok_or_else(|| format!("document does not contain matrix {}", name))
                .and_then(|rows| rows_to_matrix(rows, nr, nc, field))
        };
        Ok(KalmanForm {
            r,
            t: grab(&self.t, "T", n, n)?,
            h: grab(&self.h, "H", r, r)?,
            x: grab(&self.x, "X", r, n - r)?,
            y: grab(&self.y, "Y", n - r, n - r)?,
            b1: grab(&self.b1, "B1", r, self.m)?,
            block_degrees: self.degrees.clone(),
        })
    }
}
