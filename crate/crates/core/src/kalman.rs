//! Kalman controllability decomposition: the multiplication-driven route
//! through the compressed Krylov basis, the cubic recursive LU-Krylov
//! variant, and an exact structural verifier.
//!
//! Both algorithms return `T`, `H`, `X`, `Y`, `B1` with
//! `T^-1 A T = [[H, X], [0, Y]]` and `T^-1 B = [[B1], [0]]`; the verifier
//! checks those equations exactly rather than trusting either route.

use crate::charpoly::recover_hessenberg;
use crate::densemat::{
    apply_permutation, block_assemble, mat_mul, mat_vec, DenseMatrix, Permutation, Side,
    DEFAULT_STRASSEN_CUTOFF,
};
use crate::factor::{
    dense_solve, dependency_coefficients, lup, solve_triangular, IncrementalLup, SolveSide,
    TriShape,
};
use crate::ffield::Scalar;
use crate::krylov::{
    compressed_krylov_kg_with_cutoff, naive_compressed_krylov_capped, CompressedKrylov,
    DEFAULT_ORACLE_CAP,
};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct KalmanForm {
    /// Controllable dimension: rank of the full Krylov matrix of (A, B).
    pub r: usize,
    /// Nonsingular change of basis.
    pub t: DenseMatrix,
    /// r x r controllable block.
    pub h: DenseMatrix,
    /// r x (n - r) coupling block.
    pub x: DenseMatrix,
    /// (n - r) x (n - r) uncontrollable block.
    pub y: DenseMatrix,
    /// r x m transformed input.
    pub b1: DenseMatrix,
    /// Companion-block degrees of H when H is in polycyclic form; `None`
    /// for the trivial branch that returns H = A verbatim.
    pub block_degrees: Option<Vec<usize>>,
}

/// Per-check outcome of the structural verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub t_nonsingular: bool,
    /// The (n-r) x r block of T^-1 A T vanishes exactly.
    pub zero_block: bool,
    /// H, X and Y match the corresponding blocks of T^-1 A T.
    pub blocks_match: bool,
    /// T * [B1; 0] = B exactly.
    pub b_transform: bool,
    /// Companion structure of H (unit subdiagonals, zeros below the block
    /// diagonal); `None` when the form carries no block layout (trivial
    /// branch with H = A verbatim).
    pub h_structure: Option<bool>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.t_nonsingular
            && self.zero_block
            && self.blocks_match
            && self.b_transform
            && self.h_structure.unwrap_or(true)
    }
}

/// Completes the Krylov basis into a basis of the full space by appending
/// the unit vectors matching the non-pivot coordinates of V^T.
pub fn complete_basis(ck: &CompressedKrylov) -> (DenseMatrix, Permutation) {
    let n = ck.v.rows();
    let r = ck.r;
    let f = ck.v.field();
    let p = ck.vt_fact.p().clone();
    let mut t = DenseMatrix::zero(n, n, f);
    for j in 0..r {
        for i in 0..n {
            t.set(i, j, ck.v.get(i, j));
        }
    }
    // Column r + q is the unit vector on the coordinate whose permuted
    // position is r + q; those are the non-pivot coordinates in order.
    let pinv = p.inverse();
    for q in 0..n - r {
        t.set(pinv.image(r + q), r + q, 1);
    }
    (t, p)
}

fn check_pair(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "A must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "B has {} rows, A is {}x{}",
            b.rows(),
            a.rows(),
            a.cols()
        )));
    }
    if a.field() != b.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Conjugates A by the factorization's column permutation and splits it at r.
fn permuted_blocks(
    a: &DenseMatrix,
    p: &Permutation,
    r: usize,
) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = a.rows();
    let pa = apply_permutation(a, p, Side::Rows, false)?;
    let ap = apply_permutation(&pa, p, Side::Cols, false)?;
    let a12 = ap.slice(0..r, r..n)?;
    let a22 = ap.slice(r..n, r..n)?;
    Ok((a12, a22))
}

/// Kalman form through the compressed Krylov basis. With `normalize` set the
/// trivial fully-controllable branch also goes through Hessenberg recovery
/// instead of returning H = A verbatim.
pub fn kalman_kg(a: &DenseMatrix, b: &DenseMatrix, normalize: bool) -> Result<KalmanForm> {
    kalman_kg_with_cutoff(a, b, normalize, DEFAULT_STRASSEN_CUTOFF)
}

pub fn kalman_kg_with_cutoff(
    a: &DenseMatrix,
    b: &DenseMatrix,
    normalize: bool,
    cutoff: usize,
) -> Result<KalmanForm> {
    check_pair(a, b)?;
    let n = a.rows();
    let f = a.field();
    let ck = compressed_krylov_kg_with_cutoff(a, b, cutoff)?;
    let r = ck.r;

    if r == n && !normalize {
        return Ok(KalmanForm {
            r,
            t: DenseMatrix::identity(n, f),
            h: a.clone(),
            x: DenseMatrix::zero(n, 0, f),
            y: DenseMatrix::zero(0, 0, f),
            b1: b.clone(),
            block_degrees: None,
        });
    }

    let h = recover_hessenberg(&ck, a)?;
    let block_degrees = h.block_degrees().to_vec();
    let (t, p) = complete_basis(&ck);
    let lsel = ck.vt_fact.l_selected();
    let (u1, u2) = ck.vt_fact.u_permuted();

    let (a12, a22) = permuted_blocks(a, &p, r)?;
    // X = L^-T U1^-T A'_12, Y = A'_22 - U2^T (U1^-T A'_12).
    let z = solve_triangular(&u1, &a12, TriShape::Upper, SolveSide::Left, true)?;
    let x = solve_triangular(&lsel, &z, TriShape::UnitLower, SolveSide::Left, true)?;
    let y = a22.sub(&mat_mul(&u2.transpose(), &z)?)?;

    // B1 from the top rows of P*B; the lower rows vanish because every
    // column of B lies in the span of V.
    let pb = apply_permutation(b, &p, Side::Rows, false)?;
    let pb_top = pb.slice(0..r, 0..b.cols())?;
    let w = solve_triangular(&u1, &pb_top, TriShape::Upper, SolveSide::Left, true)?;
    let b1 = solve_triangular(&lsel, &w, TriShape::UnitLower, SolveSide::Left, true)?;

    Ok(KalmanForm {
        r,
        t,
        h: h.expand(),
        x,
        y,
        b1,
        block_degrees: Some(block_degrees),
    })
}

/// Cubic recursive variant: Krylov iterates of one source vector at a time,
/// computed with matrix-vector products and factored on the fly, recursing
/// on the Schur-like residual of the uncontrollable block.
pub fn kalman_luk(a: &DenseMatrix, b: &DenseMatrix, normalize: bool) -> Result<KalmanForm> {
    check_pair(a, b)?;
    let n = a.rows();
    let f = a.field();

    // No controllable direction at all: everything is in the Y block.
    let first_nonzero = (0..b.cols()).find(|&j| b.column(j).iter().any(|&v| v != 0));
    let Some(j0) = first_nonzero else {
        return Ok(KalmanForm {
            r: 0,
            t: DenseMatrix::identity(n, f),
            h: DenseMatrix::zero(0, 0, f),
            x: DenseMatrix::zero(0, n, f),
            y: a.clone(),
            b1: DenseMatrix::zero(0, b.cols(), f),
            block_degrees: Some(Vec::new()),
        });
    };

    // Iterate v, Av, A^2 v, ... factoring each new row of K^T until the
    // first dependent iterate.
    let mut inc = IncrementalLup::new(f, n);
    let mut iterates: Vec<Vec<Scalar>> = Vec::new();
    let mut v = b.column(j0);
    loop {
        let independent = inc.push_row(&v);
        iterates.push(v.clone());
        if !independent {
            break;
        }
        v = mat_vec(a, &v)?;
    }
    let r1 = iterates.len() - 1;
    let kt = DenseMatrix::from_rows(f, &iterates)?;
    let fact = inc.finish();
    debug_assert_eq!(fact.rank(), r1);

    // Dependency coefficients of the first dependent iterate give the
    // companion polynomial of this Krylov block.
    let m_coeffs = dependency_coefficients(&fact, &kt, r1)?;
    let mut c_f = DenseMatrix::zero(r1, r1, f);
    for k in 0..r1.saturating_sub(1) {
        c_f.set(k + 1, k, 1);
    }
    for (i, &mi) in m_coeffs.iter().enumerate() {
        c_f.set(i, r1 - 1, mi);
    }

    let k_basis = kt.slice(0..r1, 0..n)?.transpose();
    let lsel = fact.l_selected();
    let (u1, u2) = fact.u_permuted();
    let p = fact.p().clone();

    if r1 == n {
        if !normalize {
            return Ok(KalmanForm {
                r: n,
                t: DenseMatrix::identity(n, f),
                h: a.clone(),
                x: DenseMatrix::zero(n, 0, f),
                y: DenseMatrix::zero(0, 0, f),
                b1: b.clone(),
                block_degrees: None,
            });
        }
        // Normalized trivial branch: T is the Krylov basis itself and H its
        // companion block.
        let pb = apply_permutation(b, &p, Side::Rows, false)?;
        let w = solve_triangular(&u1, &pb, TriShape::Upper, SolveSide::Left, true)?;
        let b1 = solve_triangular(&lsel, &w, TriShape::UnitLower, SolveSide::Left, true)?;
        return Ok(KalmanForm {
            r: n,
            t: k_basis,
            h: c_f,
            x: DenseMatrix::zero(n, 0, f),
            y: DenseMatrix::zero(0, 0, f),
            b1,
            block_degrees: Some(vec![r1]),
        });
    }

    let (a12, a22) = permuted_blocks(a, &p, r1)?;
    let z1 = solve_triangular(&u1, &a12, TriShape::Upper, SolveSide::Left, true)?;
    let a_residual = a22.sub(&mat_mul(&u2.transpose(), &z1)?)?;

    // B' = diag(L^-T, I) * [[U1^-T, 0], [-U2^T U1^-T, I]] * P * B.
    let pb = apply_permutation(b, &p, Side::Rows, false)?;
    let pb_top = pb.slice(0..r1, 0..b.cols())?;
    let pb_bot = pb.slice(r1..n, 0..b.cols())?;
    let w1 = solve_triangular(&u1, &pb_top, TriShape::Upper, SolveSide::Left, true)?;
    let bp_top = solve_triangular(&lsel, &w1, TriShape::UnitLower, SolveSide::Left, true)?;
    let bp_bot = pb_bot.sub(&mat_mul(&u2.transpose(), &w1)?)?;

    // Stable partition: columns whose lower part vanishes keep their order
    // in front, the rest form Z.
    let mut zero_cols = Vec::new();
    let mut z_cols = Vec::new();
    for c in 0..b.cols() {
        if bp_bot.column(c).iter().all(|&x| x == 0) {
            zero_cols.push(c);
        } else {
            z_cols.push(c);
        }
    }

    if z_cols.is_empty() {
        // mu = 0: the remaining space is entirely uncontrollable.
        let x = solve_triangular(&lsel, &z1, TriShape::UnitLower, SolveSide::Left, true)?;
        let mut t = DenseMatrix::zero(n, n, f);
        paste_t_left(&mut t, &k_basis);
        let pinv = p.inverse();
        for q in 0..n - r1 {
            t.set(pinv.image(r1 + q), r1 + q, 1);
        }
        return Ok(KalmanForm {
            r: r1,
            t,
            h: c_f,
            x,
            y: a_residual,
            b1: bp_top,
            block_degrees: Some(vec![r1]),
        });
    }

    let mut z = DenseMatrix::zero(n - r1, z_cols.len(), f);
    for (oc, &c) in z_cols.iter().enumerate() {
        for i in 0..n - r1 {
            z.set(i, oc, bp_bot.get(i, c));
        }
    }
    let sub = kalman_luk(&a_residual, &z, normalize)?;
    let r2 = sub.r;

    // T = [K | P^T [0; T2]].
    let mut t = DenseMatrix::zero(n, n, f);
    paste_t_left(&mut t, &k_basis);
    let pinv = p.inverse();
    for q in 0..n - r1 {
        let dst_row = pinv.image(r1 + q);
        for c in 0..n - r1 {
            t.set(dst_row, r1 + c, sub.t.get(q, c));
        }
    }

    // J = L^-T U1^-T A'_12 T2, split at r2.
    let x1 = solve_triangular(&lsel, &z1, TriShape::UnitLower, SolveSide::Left, true)?;
    let j = mat_mul(&x1, &sub.t)?;
    let j1 = j.slice(0..r1, 0..r2)?;
    let j2 = j.slice(0..r1, r2..n - r1)?;

    let h = block_assemble(&[
        vec![c_f, j1],
        vec![DenseMatrix::zero(r2, r1, f), sub.h.clone()],
    ])?;
    let x = block_assemble(&[vec![j2], vec![sub.x.clone()]])?;

    // B1 = [B'_top; S] with S the recursive B1 lifted through the column
    // partition: Z columns take their recursive coordinates, the others are
    // zero below r1.
    let mut b1 = DenseMatrix::zero(r1 + r2, b.cols(), f);
    for c in 0..b.cols() {
        for i in 0..r1 {
            b1.set(i, c, bp_top.get(i, c));
        }
    }
    for (oc, &c) in z_cols.iter().enumerate() {
        for i in 0..r2 {
            b1.set(r1 + i, c, sub.b1.get(i, oc));
        }
    }

    let mut block_degrees = vec![r1];
    if let Some(sub_blocks) = sub.block_degrees {
        block_degrees.extend(sub_blocks);
    }

    Ok(KalmanForm {
        r: r1 + r2,
        t,
        h,
        x,
        y: sub.y,
        b1,
        block_degrees: Some(block_degrees),
    })
}

fn paste_t_left(t: &mut DenseMatrix, k_basis: &DenseMatrix) {
    for j in 0..k_basis.cols() {
        for i in 0..k_basis.rows() {
            t.set(i, j, k_basis.get(i, j));
        }
    }
}

/// Exact structural verification of a claimed Kalman form.
pub fn verify_kalman_form(a: &DenseMatrix, b: &DenseMatrix, kf: &KalmanForm) -> Result<VerificationReport> {
    check_pair(a, b)?;
    let n = a.rows();
    let r = kf.r;
    let f = a.field();
    if kf.t.rows() != n
        || kf.t.cols() != n
        || kf.h.rows() != r
        || kf.h.cols() != r
        || kf.x.rows() != r
        || kf.x.cols() != n - r
        || kf.y.rows() != n - r
        || kf.y.cols() != n - r
        || kf.b1.rows() != r
        || kf.b1.cols() != b.cols()
    {
        return Err(Error::DimensionMismatch(
            "Kalman form blocks do not conform to (n, m, r)".into(),
        ));
    }

    let t_fact = lup(&kf.t);
    let t_nonsingular = t_fact.rank() == n;
    if !t_nonsingular {
        return Ok(VerificationReport {
            t_nonsingular,
            zero_block: false,
            blocks_match: false,
            b_transform: false,
            h_structure: kf.block_degrees.as_ref().map(|bd| h_is_polycyclic(&kf.h, bd)),
        });
    }

    let at = mat_mul(a, &kf.t)?;
    let conj = dense_solve(&t_fact, &at)?;
    let zero_block = conj.slice(r..n, 0..r)?.is_zero();
    let blocks_match = conj.slice(0..r, 0..r)? == kf.h
        && conj.slice(0..r, r..n)? == kf.x
        && conj.slice(r..n, r..n)? == kf.y;

    // T * [B1; 0] = B.
    let stacked = block_assemble(&[
        vec![kf.b1.clone()],
        vec![DenseMatrix::zero(n - r, b.cols(), f)],
    ])?;
    let b_transform = mat_mul(&kf.t, &stacked)? == *b;

    let h_structure = kf
        .block_degrees
        .as_ref()
        .map(|bd| h_is_polycyclic(&kf.h, bd));

    Ok(VerificationReport {
        t_nonsingular,
        zero_block,
        blocks_match,
        b_transform,
        h_structure,
    })
}

/// Companion layout check: inside each block every non-last column is the
/// unit vector on the next row; entries below a block's rows are zero, and
/// upper coupling appears only in last columns.
fn h_is_polycyclic(h: &DenseMatrix, block_degrees: &[usize]) -> bool {
    let r: usize = block_degrees.iter().sum();
    if h.rows() != r || h.cols() != r {
        return false;
    }
    let mut offset = 0;
    for &d in block_degrees {
        if d == 0 {
            return false;
        }
        for k in 0..d {
            let col = offset + k;
            let last = k == d - 1;
            for i in 0..r {
                let v = h.get(i, col);
                if last {
                    // Tail column: anything above/in the block, zero below.
                    if i >= offset + d && v != 0 {
                        return false;
                    }
                } else {
                    let expect = if i == col + 1 { 1 } else { 0 };
                    if v != expect {
                        return false;
                    }
                }
            }
        }
        offset += d;
    }
    true
}

/// Brute-force oracle: naive Krylov basis, completed and inverted densely.
pub fn naive_kalman(a: &DenseMatrix, b: &DenseMatrix) -> Result<KalmanForm> {
    naive_kalman_capped(a, b, DEFAULT_ORACLE_CAP)
}

pub fn naive_kalman_capped(a: &DenseMatrix, b: &DenseMatrix, cap: usize) -> Result<KalmanForm> {
    check_pair(a, b)?;
    let n = a.rows();
    let ck = naive_compressed_krylov_capped(a, b, cap)?;
    let r = ck.r;
    let (t, _) = complete_basis(&ck);
    let t_fact = lup(&t);
    let conj = dense_solve(&t_fact, &mat_mul(a, &t)?)?;
    let tb = dense_solve(&t_fact, b)?;
    Ok(KalmanForm {
        r,
        t,
        h: conj.slice(0..r, 0..r)?,
        x: conj.slice(0..r, r..n)?,
        y: conj.slice(r..n, r..n)?,
        b1: tb.slice(0..r, 0..b.cols())?,
        block_degrees: None,
    })
}
