//! Canonical arithmetic in GF(p) for odd word-size primes.

use crate::{Error, Result};

/// A field element, kept as a canonical residue in `[0, p)` at every API
/// boundary. Kernels may hold larger intermediates internally.
pub type Scalar = u64;

/// An odd prime field GF(p) with 2 < p < 2^31.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Largest prime below 2^16; products of canonical residues leave ample
    /// headroom for delayed reduction in 64-bit accumulators.
    pub const DEFAULT_PRIME: u64 = 65521;

    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 || p >= (1 << 31) || p % 2 == 0 || !is_prime(p) {
            return Err(Error::BadModulus(p));
        }
        Ok(PrimeField { p })
    }

    pub fn default_field() -> Self {
        PrimeField::new(Self::DEFAULT_PRIME).expect("default prime is valid")
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> Scalar {
        v % self.p
    }

    /// Reduces a signed integer into the canonical residue range.
    #[inline]
    pub fn reduce_i64(&self, v: i64) -> Scalar {
        v.rem_euclid(self.p as i64) as Scalar
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        a * b % self.p
    }

    /// Multiplicative inverse by extended Euclid.
    pub fn inv(&self, a: Scalar) -> Result<Scalar> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        // Invariants: r0 = s0*a (mod p), r1 = s1*a (mod p).
        let (mut r0, mut r1) = (self.p as i64, a as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(self.reduce_i64(s0))
    }

    /// a / b for b != 0.
    #[inline]
    pub fn div(&self, a: Scalar, b: Scalar) -> Result<Scalar> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// How many canonical products a 64-bit accumulator can take before a
    /// reduction is required, keeping the running sum below 2^63.
    pub fn delayed_reduction_chunk(&self) -> usize {
        let sq = (self.p - 1) * (self.p - 1);
        (((1u64 << 63) / sq).max(1)) as usize
    }

    pub fn pow(&self, mut base: Scalar, mut exp: u64) -> Scalar {
        let mut acc = 1;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

/// Deterministic trial division; the modulus bound keeps divisors below 2^16.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
