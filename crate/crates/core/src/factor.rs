//! Rank-revealing, order-preserving LU-type factorization, triangular solves,
//! column reduction and dependency-coefficient extraction.
//!
//! Rows are processed strictly in their original order and never swapped; the
//! selected-row list records the greedy-first independent rows. Pivots are
//! the leftmost nonzero entry of each reduced row, and the column permutation
//! gathers the pivot columns in pivot order so that `U * P^-1 = [U1 | U2]`
//! with `U1` upper triangular and nonsingular.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::densemat::{apply_permutation, mat_mul, DenseMatrix, Permutation, Side};
use crate::ffield::{PrimeField, Scalar};
use crate::{Error, Result};

/// Counts dense solves/inversions performed through this module. Exists so
/// tests can assert that the Hessenberg recovery path never performs one.
static DENSE_SOLVE_CALLS: AtomicU64 = AtomicU64::new(0);

pub fn dense_solve_count() -> u64 {
    DENSE_SOLVE_CALLS.load(Ordering::SeqCst)
}

#[derive(Debug, Clone)]
pub struct LupFactorization {
    rank: usize,
    row_select: Vec<usize>,
    l: DenseMatrix,
    u: DenseMatrix,
    p: Permutation,
}

impl LupFactorization {
    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Indices of the greedy-first independent rows, strictly increasing.
    pub fn row_select(&self) -> &[usize] {
        &self.row_select
    }

    /// Lower trapezoidal `a x r` factor; its selected rows form a unit lower
    /// triangular `r x r` matrix.
    pub fn l(&self) -> &DenseMatrix {
        &self.l
    }

    /// Echelon `r x b` factor with `M = L * U`.
    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    /// Column permutation with `U * P^-1 = [U1 | U2]`.
    pub fn p(&self) -> &Permutation {
        &self.p
    }

    /// The selected rows of L: unit lower triangular `r x r`.
    pub fn l_selected(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zero(self.rank, self.rank, self.l.field());
        for (t, &ri) in self.row_select.iter().enumerate() {
            for s in 0..self.rank {
                out.set(t, s, self.l.get(ri, s));
            }
        }
        out
    }

    /// `[U1 | U2] = U * P^-1`; U1 is `r x r` upper triangular nonsingular.
    pub fn u_permuted(&self) -> (DenseMatrix, DenseMatrix) {
        let up = apply_permutation(&self.u, &self.p, Side::Cols, false)
            .expect("permutation size fixed at construction");
        let u1 = up.slice(0..self.rank, 0..self.rank).unwrap();
        let u2 = up.slice(0..self.rank, self.rank..up.cols()).unwrap();
        (u1, u2)
    }
}

/// Incremental elimination core: rows are fed one at a time, each reduced
/// against the pivot rows accumulated so far.
pub struct IncrementalLup {
    field: PrimeField,
    cols: usize,
    pivot_cols: Vec<usize>,
    u_rows: Vec<Vec<Scalar>>,
    // Per input row: coefficients against the pivots present at insertion.
    l_rows: Vec<Vec<Scalar>>,
    row_select: Vec<usize>,
    rows_seen: usize,
}

impl IncrementalLup {
    pub fn new(field: PrimeField, cols: usize) -> Self {
        IncrementalLup {
            field,
            cols,
            pivot_cols: Vec::new(),
            u_rows: Vec::new(),
            l_rows: Vec::new(),
            row_select: Vec::new(),
            rows_seen: 0,
        }
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    /// Feeds the next row; returns true when it was independent of the rows
    /// seen so far.
    pub fn push_row(&mut self, row: &[Scalar]) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        let f = self.field;
        let mut work = row.to_vec();
        let mut coeffs = Vec::with_capacity(self.rank());
        for (t, (&pc, urow)) in self.pivot_cols.iter().zip(&self.u_rows).enumerate() {
            let _ = t;
            let piv = urow[pc];
            let l = f.mul(work[pc], f.inv(piv).expect("pivot nonzero"));
            if l != 0 {
                for (w, &u) in work.iter_mut().zip(urow.iter()) {
                    *w = f.sub(*w, f.mul(l, u));
                }
            }
            coeffs.push(l);
        }
        let idx = self.rows_seen;
        self.rows_seen += 1;
        match work.iter().position(|&v| v != 0) {
            Some(pc) => {
                self.pivot_cols.push(pc);
                self.u_rows.push(work);
                self.row_select.push(idx);
                self.l_rows.push(coeffs);
                true
            }
            None => {
                self.l_rows.push(coeffs);
                false
            }
        }
    }

    pub fn finish(self) -> LupFactorization {
        let r = self.pivot_cols.len();
        let a = self.rows_seen;
        let mut l = DenseMatrix::zero(a, r, self.field);
        let mut selected_rank = vec![0usize; a];
        for (k, &ri) in self.row_select.iter().enumerate() {
            selected_rank[ri] = k;
        }
        for (i, coeffs) in self.l_rows.iter().enumerate() {
            for (t, &c) in coeffs.iter().enumerate() {
                l.set(i, t, c);
            }
        }
        for (k, &ri) in self.row_select.iter().enumerate() {
            l.set(ri, k, 1);
        }
        let mut u = DenseMatrix::zero(r, self.cols, self.field);
        for (t, urow) in self.u_rows.iter().enumerate() {
            for (j, &v) in urow.iter().enumerate() {
                u.set(t, j, v);
            }
        }
        // Pivot columns first in pivot order, remaining columns after them in
        // original order.
        let mut images = vec![usize::MAX; self.cols];
        for (t, &pc) in self.pivot_cols.iter().enumerate() {
            images[pc] = t;
        }
        let mut next = r;
        for im in images.iter_mut() {
            if *im == usize::MAX {
                *im = next;
                next += 1;
            }
        }
        let p = Permutation::from_images(images).expect("positions form a bijection");
        LupFactorization {
            rank: r,
            row_select: self.row_select,
            l,
            u,
            p,
        }
    }
}

/// Rank-revealing factorization of an arbitrary matrix, rows kept in order.
pub fn lup(m: &DenseMatrix) -> LupFactorization {
    let mut inc = IncrementalLup::new(m.field(), m.cols());
    for i in 0..m.rows() {
        inc.push_row(m.row(i));
    }
    inc.finish()
}

/// Greedy-leftmost independent columns of `m`, in their original order,
/// together with their positions.
pub fn col_reduced_form(m: &DenseMatrix) -> (DenseMatrix, Vec<usize>) {
    let (reduced, cols, _) = col_reduced_form_with_fact(m);
    (reduced, cols)
}

/// Same as [`col_reduced_form`], also returning the factorization of the
/// transposed *reduced* matrix (all rows independent), for callers that need
/// the triangular factors afterwards.
pub fn col_reduced_form_with_fact(m: &DenseMatrix) -> (DenseMatrix, Vec<usize>, LupFactorization) {
    let fact = lup(&m.transpose());
    let cols = fact.row_select.clone();
    let mut reduced = DenseMatrix::zero(m.rows(), cols.len(), m.field());
    for (oj, &j) in cols.iter().enumerate() {
        for i in 0..m.rows() {
            reduced.set(i, oj, m.get(i, j));
        }
    }
    // Restricting L to the selected rows yields a factorization of the
    // reduced transpose itself: row_select becomes 0..r.
    let sub = LupFactorization {
        rank: fact.rank,
        row_select: (0..fact.rank).collect(),
        l: fact.l_selected(),
        u: fact.u.clone(),
        p: fact.p.clone(),
    };
    (reduced, cols, sub)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriShape {
    UnitLower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveSide {
    Left,
    Right,
}

/// Solves `op(T) * Z = rhs` (left) or `Z * op(T) = rhs` (right), where
/// `op(T)` is `T` or its transpose. `T` must be square of the declared shape.
pub fn solve_triangular(
    t: &DenseMatrix,
    rhs: &DenseMatrix,
    shape: TriShape,
    side: SolveSide,
    transposed: bool,
) -> Result<DenseMatrix> {
    if t.rows() != t.cols() {
        return Err(Error::DimensionMismatch(format!(
            "triangular matrix is {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    if t.field() != rhs.field() {
        return Err(Error::FieldMismatch);
    }
    match side {
        SolveSide::Left => solve_left(t, rhs, shape, transposed),
        SolveSide::Right => {
            // Z * op(T) = rhs  <=>  op(T)^T * Z^T = rhs^T.
            let zt = solve_left(t, &rhs.transpose(), shape, !transposed)?;
            Ok(zt.transpose())
        }
    }
}

fn solve_left(
    t: &DenseMatrix,
    rhs: &DenseMatrix,
    shape: TriShape,
    transposed: bool,
) -> Result<DenseMatrix> {
    let n = t.rows();
    if rhs.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs has {} rows, triangular matrix is {}x{}",
            rhs.rows(),
            n,
            n
        )));
    }
    let f = t.field();
    let entry = |i: usize, j: usize| if transposed { t.get(j, i) } else { t.get(i, j) };
    // Effective orientation of op(T).
    let lower = matches!(
        (shape, transposed),
        (TriShape::UnitLower, false) | (TriShape::Upper, true)
    );
    let unit = shape == TriShape::UnitLower;
    let mut z = DenseMatrix::zero(n, rhs.cols(), f);
    let order: Vec<usize> = if lower { (0..n).collect() } else { (0..n).rev().collect() };
    for &i in &order {
        let diag = entry(i, i);
        let inv_diag = if unit {
            1
        } else {
            if diag == 0 {
                return Err(Error::SingularDiagonal(i));
            }
            f.inv(diag)?
        };
        for c in 0..rhs.cols() {
            let mut acc = rhs.get(i, c);
            let js: Box<dyn Iterator<Item = usize>> = if lower {
                Box::new(0..i)
            } else {
                Box::new(i + 1..n)
            };
            for j in js {
                let e = entry(i, j);
                if e != 0 {
                    acc = f.sub(acc, f.mul(e, z.get(j, c)));
                }
            }
            z.set(i, c, if unit { acc } else { f.mul(acc, inv_diag) });
        }
    }
    Ok(z)
}

/// Coefficients expressing a dependent row of `m` in the selected rows above
/// it, read off the stored `L` rows with a single unit-triangular solve.
pub fn dependency_coefficients(
    fact: &LupFactorization,
    m: &DenseMatrix,
    row_index: usize,
) -> Result<Vec<Scalar>> {
    if fact.row_select.contains(&row_index) {
        return Err(Error::NotADependentRow(row_index));
    }
    if row_index >= m.rows() {
        return Err(Error::RangeOutOfBounds(format!(
            "row {} of a {}-row matrix",
            row_index,
            m.rows()
        )));
    }
    let k = fact.row_select.iter().filter(|&&ri| ri < row_index).count();
    let f = m.field();
    // c * Lsel = Lrow over the first k pivots, Lsel unit lower triangular.
    let mut lsel = DenseMatrix::zero(k, k, f);
    for (t, &ri) in fact.row_select.iter().take(k).enumerate() {
        for s in 0..k {
            lsel.set(t, s, fact.l.get(ri, s));
        }
    }
    let mut lrow = DenseMatrix::zero(1, k, f);
    for s in 0..k {
        lrow.set(0, s, fact.l.get(row_index, s));
    }
    let c = solve_triangular(&lsel, &lrow, TriShape::UnitLower, SolveSide::Right, false)?;
    Ok((0..k).map(|s| c.get(0, s)).collect())
}

/// Solves `M * X = rhs` for square nonsingular `M` through its factorization.
/// This is the dense-solve route reserved for oracles and test harnesses; the
/// call counter lets the suites assert it stays off the recovery path.
pub fn dense_solve(fact: &LupFactorization, rhs: &DenseMatrix) -> Result<DenseMatrix> {
    DENSE_SOLVE_CALLS.fetch_add(1, Ordering::SeqCst);
    let n = fact.l.rows();
    if fact.rank != n || fact.u.cols() != n {
        return Err(Error::InconsistentInput(
            "dense_solve needs a square nonsingular factorization".into(),
        ));
    }
    // Full rank with order-preserving rows means L is unit lower triangular.
    let y = solve_triangular(&fact.l, rhs, TriShape::UnitLower, SolveSide::Left, false)?;
    let (u1, _) = fact.u_permuted();
    let xp = solve_triangular(&u1, &y, TriShape::Upper, SolveSide::Left, false)?;
    // U = U1 * P acting on columns, so undo the permutation on the rows of X.
    apply_permutation(&xp, &fact.p, Side::Rows, true)
}

/// Inverse of a square nonsingular matrix (oracle/test use).
pub fn invert(m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "invert a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let fact = lup(m);
    if fact.rank() != n {
        return Err(Error::InconsistentInput("matrix is singular".into()));
    }
    dense_solve(&fact, &DenseMatrix::identity(n, m.field()))
}

/// Reconstruction `L * U`, used in tests and self-checks.
pub fn reconstruct(fact: &LupFactorization) -> DenseMatrix {
    if fact.rank == 0 {
        return DenseMatrix::zero(fact.l.rows(), fact.u.cols(), fact.l.field());
    }
    mat_mul(&fact.l, &fact.u).expect("conforming factors")
}

/// Determinant of a square matrix via the factorization: the product of the
/// U1 diagonal times the sign of the column permutation (L is unimodular).
pub fn determinant(m: &DenseMatrix) -> Result<Scalar> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let f = m.field();
    let fact = lup(m);
    if fact.rank() != m.rows() {
        return Ok(0);
    }
    let (u1, _) = fact.u_permuted();
    let mut det = fact.p.sign(f);
    for i in 0..u1.rows() {
        det = f.mul(det, u1.get(i, i));
    }
    Ok(det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, f: PrimeField) -> DenseMatrix {
        let entries = (0..rows * cols).map(|_| rng.gen_range(0..f.modulus())).collect();
        DenseMatrix::from_entries(rows, cols, f, entries).unwrap()
    }

    /// Independent rank oracle: plain Gaussian elimination with full freedom
    /// of pivoting, no shared code with `lup`.
    fn gauss_rank(m: &DenseMatrix) -> usize {
        let f = m.field();
        let mut rows: Vec<Vec<u64>> = (0..m.rows()).map(|i| m.row(i).to_vec()).collect();
        let mut rank = 0;
        for col in 0..m.cols() {
            if let Some(pi) = (rank..rows.len()).find(|&i| rows[i][col] != 0) {
                rows.swap(rank, pi);
                let inv = f.inv(rows[rank][col]).unwrap();
                for i in 0..rows.len() {
                    if i != rank && rows[i][col] != 0 {
                        let factor = f.mul(rows[i][col], inv);
                        for j in col..m.cols() {
                            let s = f.mul(factor, rows[rank][j]);
                            rows[i][j] = f.sub(rows[i][j], s);
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn lup_identity_and_zero() {
        let f = gf(7);
        let fact = lup(&DenseMatrix::identity(4, f));
        assert_eq!(fact.rank(), 4);
        assert_eq!(fact.row_select(), &[0, 1, 2, 3]);
        assert_eq!(fact.l(), &DenseMatrix::identity(4, f));
        let (u1, u2) = fact.u_permuted();
        assert_eq!(u1, DenseMatrix::identity(4, f));
        assert_eq!(u2.cols(), 0);
        assert_eq!(fact.p(), &Permutation::identity(4));

        let fact = lup(&DenseMatrix::zero(3, 5, f));
        assert_eq!(fact.rank(), 0);
        assert!(fact.row_select().is_empty());
        assert_eq!(fact.u().rows(), 0);
    }

    #[test]
    fn lup_antidiagonal() {
        let f = gf(7);
        let m = DenseMatrix::from_rows(f, &[vec![0, 1], vec![1, 0]]).unwrap();
        let fact = lup(&m);
        assert_eq!(fact.rank(), 2);
        let (u1, _) = fact.u_permuted();
        assert!(u1.get(1, 0) == 0 && u1.get(0, 0) != 0 && u1.get(1, 1) != 0);
        assert_eq!(reconstruct(&fact), m);
    }

    #[test]
    fn lup_reconstruction_random_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut count = 0;
        for p in [5u64, 7, 101] {
            let f = gf(p);
            for _ in 0..70 {
                let rows = rng.gen_range(0..9);
                let cols = rng.gen_range(0..9);
                // Mix in rank-deficient inputs via low-rank products.
                let m = if rng.gen_bool(0.5) || rows == 0 || cols == 0 {
                    random_matrix(&mut rng, rows, cols, f)
                } else {
                    let k = rng.gen_range(0..rows.min(cols) + 1);
                    let a = random_matrix(&mut rng, rows, k, f);
                    let b = random_matrix(&mut rng, k, cols, f);
                    mat_mul(&a, &b).unwrap()
                };
                let fact = lup(&m);
                assert_eq!(reconstruct(&fact), m);
                assert_eq!(fact.rank(), gauss_rank(&m));
                // U1 upper triangular with nonzero diagonal.
                let (u1, _) = fact.u_permuted();
                for i in 0..fact.rank() {
                    assert_ne!(u1.get(i, i), 0);
                    for j in 0..i {
                        assert_eq!(u1.get(i, j), 0);
                    }
                }
                count += 1;
            }
        }
        assert!(count >= 200);
    }

    #[test]
    fn greedy_row_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = gf(7);
        for _ in 0..50 {
            let rows = rng.gen_range(1..10);
            let cols = rng.gen_range(1..10);
            let k = rng.gen_range(0..rows.min(cols) + 1);
            let a = random_matrix(&mut rng, rows, k, f);
            let b = random_matrix(&mut rng, k, cols, f);
            let m = mat_mul(&a, &b).unwrap();
            let fact = lup(&m);
            let mut prev_rank = 0;
            for i in 0..rows {
                let prefix = m.slice(0..i + 1, 0..cols).unwrap();
                let r = gauss_rank(&prefix);
                if fact.row_select().contains(&i) {
                    assert_eq!(r, prev_rank + 1, "selected row must raise the rank");
                } else {
                    assert_eq!(r, prev_rank, "unselected row must not raise the rank");
                }
                prev_rank = r;
            }
        }
    }

    #[test]
    fn col_reduced_form_examples() {
        let f5 = gf(5);
        let id = DenseMatrix::identity(4, f5);
        let (m, cols) = col_reduced_form(&id);
        assert_eq!(m, id);
        assert_eq!(cols, vec![0, 1, 2, 3]);

        // [v | 2v | w] keeps columns 0 and 2.
        let m = DenseMatrix::from_rows(f5, &[vec![1, 2, 0], vec![2, 4, 1], vec![0, 0, 3]]).unwrap();
        let (_, cols) = col_reduced_form(&m);
        assert_eq!(cols, vec![0, 2]);
    }

    #[test]
    fn col_reduced_form_matches_greedy_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = gf(7);
        for _ in 0..60 {
            let rows = rng.gen_range(1..8);
            let cols = rng.gen_range(1..10);
            let k = rng.gen_range(0..rows.min(cols) + 1);
            let a = random_matrix(&mut rng, rows, k, f);
            let b = random_matrix(&mut rng, k, cols, f);
            let m = mat_mul(&a, &b).unwrap();
            // Oracle: column-by-column rank growth via independent elimination.
            let mut expected = Vec::new();
            for j in 0..cols {
                let mut sel = expected.clone();
                sel.push(j);
                let mut sub = DenseMatrix::zero(rows, sel.len(), f);
                for (oj, &c) in sel.iter().enumerate() {
                    for i in 0..rows {
                        sub.set(i, oj, m.get(i, c));
                    }
                }
                if gauss_rank(&sub) == sel.len() {
                    expected.push(j);
                }
            }
            let (reduced, got) = col_reduced_form(&m);
            assert_eq!(got, expected);
            assert_eq!(gauss_rank(&reduced), got.len());
        }
    }

    #[test]
    fn solve_triangular_examples() {
        let f5 = gf(5);
        let id = DenseMatrix::identity(3, f5);
        let rhs = DenseMatrix::from_rows(f5, &[vec![1], vec![2], vec![3]]).unwrap();
        assert_eq!(
            solve_triangular(&id, &rhs, TriShape::Upper, SolveSide::Left, false).unwrap(),
            rhs
        );

        let t = DenseMatrix::from_rows(f5, &[vec![1, 0], vec![2, 1]]).unwrap();
        let rhs = DenseMatrix::from_rows(f5, &[vec![3], vec![2]]).unwrap();
        let z = solve_triangular(&t, &rhs, TriShape::UnitLower, SolveSide::Left, false).unwrap();
        assert_eq!(z, DenseMatrix::from_rows(f5, &[vec![3], vec![1]]).unwrap());
    }

    #[test]
    fn solve_triangular_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let f = gf(101);
        for _ in 0..30 {
            let n = rng.gen_range(1..7);
            let k = rng.gen_range(1..5);
            // Random unit-lower and upper triangular matrices.
            let mut lo = DenseMatrix::identity(n, f);
            let mut up = DenseMatrix::zero(n, n, f);
            for i in 0..n {
                up.set(i, i, rng.gen_range(1..f.modulus()));
                for j in 0..i {
                    lo.set(i, j, rng.gen_range(0..f.modulus()));
                }
                for j in i + 1..n {
                    up.set(i, j, rng.gen_range(0..f.modulus()));
                }
            }
            for transposed in [false, true] {
                for (t, shape) in [(&lo, TriShape::UnitLower), (&up, TriShape::Upper)] {
                    let z = random_matrix(&mut rng, n, k, f);
                    let op = if transposed { t.transpose() } else { t.clone() };
                    let rhs = mat_mul(&op, &z).unwrap();
                    let got =
                        solve_triangular(t, &rhs, shape, SolveSide::Left, transposed).unwrap();
                    assert_eq!(got, z);

                    let zr = random_matrix(&mut rng, k, n, f);
                    let rhs = mat_mul(&zr, &op).unwrap();
                    let got =
                        solve_triangular(t, &rhs, shape, SolveSide::Right, transposed).unwrap();
                    assert_eq!(got, zr);
                }
            }
        }
    }

    #[test]
    fn solve_triangular_singular_diagonal() {
        let f = gf(5);
        let t = DenseMatrix::from_rows(f, &[vec![1, 2], vec![0, 0]]).unwrap();
        let rhs = DenseMatrix::zero(2, 1, f);
        assert_eq!(
            solve_triangular(&t, &rhs, TriShape::Upper, SolveSide::Left, false),
            Err(Error::SingularDiagonal(1))
        );
    }

    #[test]
    fn dependency_coefficients_examples() {
        let f5 = gf(5);
        // Rows e1, e2, e1 + 2 e2.
        let m = DenseMatrix::from_rows(f5, &[vec![1, 0], vec![0, 1], vec![1, 2]]).unwrap();
        let fact = lup(&m);
        let c = dependency_coefficients(&fact, &m, 2).unwrap();
        assert_eq!(c, vec![1, 2]);

        let m = DenseMatrix::from_rows(f5, &[vec![1, 0], vec![1, 0]]).unwrap();
        let fact = lup(&m);
        assert_eq!(dependency_coefficients(&fact, &m, 1).unwrap(), vec![1]);
        assert_eq!(
            dependency_coefficients(&fact, &m, 0),
            Err(Error::NotADependentRow(0))
        );
    }

    #[test]
    fn dependency_coefficients_reproduce_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let f = gf(7);
        for _ in 0..40 {
            let a = random_matrix(&mut rng, 5, 3, f);
            let b = random_matrix(&mut rng, 3, 5, f);
            let m = mat_mul(&a, &b).unwrap();
            let fact = lup(&m);
            for i in 0..m.rows() {
                if fact.row_select().contains(&i) {
                    continue;
                }
                let c = dependency_coefficients(&fact, &m, i).unwrap();
                let above: Vec<usize> = fact
                    .row_select()
                    .iter()
                    .copied()
                    .filter(|&ri| ri < i)
                    .collect();
                assert_eq!(c.len(), above.len());
                for j in 0..m.cols() {
                    let mut acc = 0;
                    for (t, &ri) in above.iter().enumerate() {
                        acc = f.add(acc, f.mul(c[t], m.get(ri, j)));
                    }
                    assert_eq!(acc, m.get(i, j));
                }
            }
        }
    }

    #[test]
    fn dense_solve_and_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let f = gf(101);
        for _ in 0..20 {
            let n = rng.gen_range(1..8);
            // Build a guaranteed-invertible matrix.
            let mut lo = DenseMatrix::identity(n, f);
            let mut up = DenseMatrix::zero(n, n, f);
            for i in 0..n {
                up.set(i, i, rng.gen_range(1..f.modulus()));
                for j in 0..i {
                    lo.set(i, j, rng.gen_range(0..f.modulus()));
                }
                for j in i + 1..n {
                    up.set(i, j, rng.gen_range(0..f.modulus()));
                }
            }
            let m = mat_mul(&lo, &up).unwrap();
            let x = random_matrix(&mut rng, n, 3, f);
            let rhs = mat_mul(&m, &x).unwrap();
            let fact = lup(&m);
            assert_eq!(dense_solve(&fact, &rhs).unwrap(), x);
            let minv = invert(&m).unwrap();
            assert_eq!(mat_mul(&m, &minv).unwrap(), DenseMatrix::identity(n, f));
        }
    }

    #[test]
    fn determinant_matches_cofactor_on_small() {
        let f = gf(101);
        let m = DenseMatrix::from_rows(f, &[vec![2, 3], vec![1, 4]]).unwrap();
        assert_eq!(determinant(&m).unwrap(), 5); // 8 - 3
        let m = DenseMatrix::from_rows(f, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(determinant(&m).unwrap(), f.neg(1));
        let m = DenseMatrix::from_rows(f, &[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(determinant(&m).unwrap(), 0);
    }
}
