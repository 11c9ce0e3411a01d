//! Seeded random test instances with a prescribed controllable dimension.

use crate::charpoly::{companion_matrix, Polynomial};
use crate::densemat::{apply_permutation, block_assemble, mat_mul, DenseMatrix, Permutation, Side};
use crate::factor::invert;
use crate::ffield::PrimeField;
use crate::{Error, Result};
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Builds a pair (A, B) over `field` whose controllable dimension is exactly
/// `rank`. The pair is assembled in block triangular form with a companion
/// controllable block and a unit first input column, then conjugated by a
/// random invertible change of basis. Deterministic in `seed`.
pub fn random_instance(
    field: PrimeField,
    n: usize,
    m: usize,
    rank: usize,
    seed: u64,
) -> Result<(DenseMatrix, DenseMatrix)> {
    if rank > n {
        return Err(Error::DimensionMismatch(format!(
            "rank {} exceeds dimension {}",
            rank, n
        )));
    }
    if rank > 0 && m == 0 {
        return Err(Error::DimensionMismatch(
            "positive rank requires at least one input column".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = field.modulus();
    fn rand_mat(
        rng: &mut ChaCha8Rng,
        field: PrimeField,
        rows: usize,
        cols: usize,
    ) -> DenseMatrix {
        let p = field.modulus();
        let entries = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        DenseMatrix::from_entries(rows, cols, field, entries).unwrap()
    }

    let r = rank;
    let h = if r == 0 {
        DenseMatrix::zero(0, 0, field)
    } else {
        let mut coeffs: Vec<u64> = (0..r).map(|_| rng.gen_range(0..p)).collect();
        coeffs.push(1);
        companion_matrix(&Polynomial::new(field, coeffs))?
    };
    let x = rand_mat(&mut rng, field, r, n - r);
    let y = rand_mat(&mut rng, field, n - r, n - r);
    let a_blk = block_assemble(&[
        vec![h, x],
        vec![DenseMatrix::zero(n - r, r, field), y],
    ])?;

    let mut b1 = rand_mat(&mut rng, field, r, m);
    if r > 0 {
        // First column is the cyclic vector of the companion block, so the
        // controllable dimension is exactly r.
        for i in 0..r {
            b1.set(i, 0, if i == 0 { 1 } else { 0 });
        }
    }
    let b_blk = block_assemble(&[vec![b1], vec![DenseMatrix::zero(n - r, m, field)]])?;

    // T = L * U * P with unit lower L, nonzero-diagonal upper U and a random
    // permutation P; always invertible.
    let mut l = DenseMatrix::identity(n, field);
    let mut u = DenseMatrix::zero(n, n, field);
    for i in 0..n {
        u.set(i, i, rng.gen_range(1..p));
        for j in 0..i {
            l.set(i, j, rng.gen_range(0..p));
        }
        for j in i + 1..n {
            u.set(i, j, rng.gen_range(0..p));
        }
    }
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(&mut rng);
    let perm = Permutation::from_images(images)?;
    let t = apply_permutation(&mat_mul(&l, &u)?, &perm, Side::Cols, false)?;
    let t_inv = invert(&t)?;

    let a = mat_mul(&t, &mat_mul(&a_blk, &t_inv)?)?;
    let b = mat_mul(&t, &b_blk)?;
    Ok((a, b))
}
