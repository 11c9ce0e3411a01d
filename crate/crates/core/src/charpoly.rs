//! Hessenberg polycyclic recovery from a compressed Krylov basis, and
//! characteristic polynomial computation with an evaluation-interpolation
//! oracle.
//!
//! The recovery never conjugates by the basis: each block contributes one
//! tail column, obtained by expressing A times the block's last basis vector
//! in the basis through the cached triangular factors.

use crate::densemat::{mat_vec, DenseMatrix};
use crate::factor::determinant;
use crate::ffield::{PrimeField, Scalar};
use crate::krylov::{compressed_krylov_kg_with_cutoff, CompressedKrylov};
use crate::{Error, Result};

/// A polynomial over a prime field, coefficients ascending, no trailing
/// zeros beyond the leading coefficient. The zero polynomial has an empty
/// coefficient list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: PrimeField,
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(field: PrimeField, mut coeffs: Vec<Scalar>) -> Self {
        for c in coeffs.iter_mut() {
            *c = field.reduce(*c);
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { field, coeffs }
    }

    pub fn zero(field: PrimeField) -> Self {
        Polynomial {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: PrimeField) -> Self {
        Polynomial {
            field,
            coeffs: vec![1],
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn eval(&self, x: Scalar) -> Scalar {
        let f = self.field;
        let mut acc = 0;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, x), c);
        }
        acc
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        let f = self.field;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(Polynomial::zero(f));
        }
        let mut out = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(Polynomial::new(f, out))
    }

    /// The monic polynomial `x^d - sum tail[i] x^i` of a companion block.
    pub fn from_companion_tail(field: PrimeField, tail: &[Scalar]) -> Polynomial {
        let d = tail.len();
        let mut coeffs = vec![0; d + 1];
        for (i, &t) in tail.iter().enumerate() {
            coeffs[i] = field.neg(t);
        }
        coeffs[d] = 1;
        Polynomial::new(field, coeffs)
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let strs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(fm, "{}", strs.join(" "))
    }
}

/// A block upper triangular matrix with companion blocks on the diagonal,
/// stored compressed: only the block degrees and each block's last column
/// (down to the block's own diagonal) are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HessenbergPolycyclic {
    field: PrimeField,
    /// Degrees of the nonzero blocks, in block order.
    block_degrees: Vec<usize>,
    /// For block j, the last-column entries over rows `0..offset_j + d_j`.
    tail_columns: Vec<Vec<Scalar>>,
}

impl HessenbergPolycyclic {
    pub fn new(
        field: PrimeField,
        block_degrees: Vec<usize>,
        tail_columns: Vec<Vec<Scalar>>,
    ) -> Result<Self> {
        if block_degrees.len() != tail_columns.len() || block_degrees.contains(&0) {
            return Err(Error::InconsistentInput(
                "one nonzero degree and one tail column per block".into(),
            ));
        }
        let mut offset = 0;
        for (d, tail) in block_degrees.iter().zip(&tail_columns) {
            offset += d;
            if tail.len() != offset {
                return Err(Error::InconsistentInput(format!(
                    "tail column has length {}, expected {}",
                    tail.len(),
                    offset
                )));
            }
        }
        Ok(HessenbergPolycyclic {
            field,
            block_degrees,
            tail_columns,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn block_degrees(&self) -> &[usize] {
        &self.block_degrees
    }

    pub fn tail_columns(&self) -> &[Vec<Scalar>] {
        &self.tail_columns
    }

    pub fn size(&self) -> usize {
        self.block_degrees.iter().sum()
    }

    /// Expands to the dense r x r form: unit subdiagonals inside each block,
    /// the stored tails as block last columns, zeros elsewhere.
    pub fn expand(&self) -> DenseMatrix {
        let r = self.size();
        let mut h = DenseMatrix::zero(r, r, self.field);
        let mut offset = 0;
        for (bj, &d) in self.block_degrees.iter().enumerate() {
            for k in 0..d - 1 {
                h.set(offset + k + 1, offset + k, 1);
            }
            let last_col = offset + d - 1;
            for (i, &v) in self.tail_columns[bj].iter().enumerate() {
                h.set(i, last_col, v);
            }
            offset += d;
        }
        h
    }

    /// Per-block companion polynomial, from the block's own diagonal part of
    /// its tail column.
    pub fn block_polynomial(&self, bj: usize) -> Polynomial {
        let d = self.block_degrees[bj];
        let offset: usize = self.block_degrees[..bj].iter().sum();
        let tail = &self.tail_columns[bj][offset..offset + d];
        Polynomial::from_companion_tail(self.field, tail)
    }
}

/// Recovers the Hessenberg polycyclic form H with `A * V = V * H`, one
/// triangular-solve pass per block against the cached factorization of V^T.
pub fn recover_hessenberg(ck: &CompressedKrylov, a: &DenseMatrix) -> Result<HessenbergPolycyclic> {
    if a.rows() != a.cols() || a.rows() != ck.v.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}x{}, basis lives in dimension {}",
            a.rows(),
            a.cols(),
            ck.v.rows()
        )));
    }
    if a.field() != ck.v.field() {
        return Err(Error::FieldMismatch);
    }
    let block_degrees: Vec<usize> = ck.degrees.iter().copied().filter(|&d| d > 0).collect();
    let mut tails = Vec::with_capacity(block_degrees.len());
    let mut offset = 0;
    for &d in &block_degrees {
        let last = ck.v.column(offset + d - 1);
        let w = mat_vec(a, &last)?;
        let coords = ck.solve_in_basis(&w).map_err(|e| match e {
            Error::InconsistentInput(_) => Error::InconsistentInput(
                "A*V leaves the span of V; the Krylov basis is corrupted".into(),
            ),
            other => other,
        })?;
        offset += d;
        // Coordinates past the block's own diagonal must vanish.
        if coords[offset..].iter().any(|&c| c != 0) {
            return Err(Error::InconsistentInput(
                "dependency coefficients reach past the block diagonal".into(),
            ));
        }
        tails.push(coords[..offset].to_vec());
    }
    HessenbergPolycyclic::new(a.field(), block_degrees, tails)
}

/// Product of the diagonal companion polynomials; the coupling columns above
/// the diagonal do not enter the determinant of a block triangular matrix.
pub fn charpoly_of_hessenberg(h: &HessenbergPolycyclic) -> Polynomial {
    let mut acc = Polynomial::one(h.field());
    for bj in 0..h.block_degrees().len() {
        acc = acc.mul(&h.block_polynomial(bj)).expect("same field");
    }
    acc
}

/// Characteristic polynomial through the Krylov pipeline with B = I.
pub fn charpoly_kg(a: &DenseMatrix) -> Result<Polynomial> {
    charpoly_kg_with_cutoff(a, crate::densemat::DEFAULT_STRASSEN_CUTOFF)
}

pub fn charpoly_kg_with_cutoff(a: &DenseMatrix, cutoff: usize) -> Result<Polynomial> {
    let n = a.rows();
    let ck = compressed_krylov_kg_with_cutoff(a, &DenseMatrix::identity(n, a.field()), cutoff)?;
    debug_assert_eq!(ck.r, n, "identity source columns always span");
    let h = recover_hessenberg(&ck, a)?;
    Ok(charpoly_of_hessenberg(&h))
}

pub const DEFAULT_CHARPOLY_ORACLE_CAP: usize = 64;

/// Independent oracle: det(xI - A) by n+1 determinant evaluations and
/// Lagrange interpolation. Needs n+1 distinct sample points in the field.
pub fn oracle_charpoly(a: &DenseMatrix) -> Result<Polynomial> {
    oracle_charpoly_capped(a, DEFAULT_CHARPOLY_ORACLE_CAP)
}

pub fn oracle_charpoly_capped(a: &DenseMatrix, cap: usize) -> Result<Polynomial> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "characteristic polynomial of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    if n > cap {
        return Err(Error::SizeCapExceeded(n, cap));
    }
    let f = a.field();
    if f.modulus() <= n as u64 + 1 {
        return Err(Error::FieldTooSmall(n + 1, f.modulus()));
    }
    let mut points = Vec::with_capacity(n + 1);
    for t in 0..=n as u64 {
        let x = f.reduce(t);
        let mut m = a.scale(f.neg(1));
        for i in 0..n {
            m.set(i, i, f.add(m.get(i, i), x));
        }
        points.push((x, determinant(&m)?));
    }
    Ok(lagrange_interpolate(f, &points))
}

fn lagrange_interpolate(f: PrimeField, points: &[(Scalar, Scalar)]) -> Polynomial {
    // Full nodal polynomial, then divide out (x - x_t) per basis term.
    let mut nodal = Polynomial::one(f);
    for &(x, _) in points {
        nodal = nodal
            .mul(&Polynomial::new(f, vec![f.neg(x), 1]))
            .expect("same field");
    }
    let mut acc = vec![0; points.len()];
    for &(xt, yt) in points {
        if yt == 0 {
            continue;
        }
        let q = synthetic_div(f, nodal.coeffs(), xt);
        // Scale by y_t / prod_{s != t} (x_t - x_s), read off the quotient.
        let mut denom = 1;
        for &(xs, _) in points {
            if xs != xt {
                denom = f.mul(denom, f.sub(xt, xs));
            }
        }
        let scale = f.div(yt, denom).expect("distinct points");
        for (i, &c) in q.iter().enumerate() {
            acc[i] = f.add(acc[i], f.mul(scale, c));
        }
    }
    Polynomial::new(f, acc)
}

/// Quotient of `coeffs` by (x - root); the division is exact here because the
/// root is a factor of the nodal polynomial.
fn synthetic_div(f: PrimeField, coeffs: &[Scalar], root: Scalar) -> Vec<Scalar> {
    let n = coeffs.len();
    let mut q = vec![0; n - 1];
    let mut carry = 0;
    for i in (0..n - 1).rev() {
        carry = f.add(coeffs[i + 1], f.mul(root, carry));
        q[i] = carry;
    }
    debug_assert_eq!(f.add(coeffs[0], f.mul(root, carry)), 0);
    q
}

/// Companion matrix of a monic polynomial: unit subdiagonal, negated
/// coefficients in the last column.
pub fn companion_matrix(poly: &Polynomial) -> Result<DenseMatrix> {
    if !poly.is_monic() {
        return Err(Error::InconsistentInput(
            "companion matrix needs a monic polynomial".into(),
        ));
    }
    let f = poly.field();
    let d = poly.degree().unwrap();
    let mut m = DenseMatrix::zero(d, d, f);
    for k in 0..d.saturating_sub(1) {
        m.set(k + 1, k, 1);
    }
    for i in 0..d {
        m.set(i, d - 1, f.neg(poly.coeffs()[i]));
    }
    Ok(m)
}
