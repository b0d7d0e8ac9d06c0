//! Exact coefficient arithmetic and sparse exact linear algebra.
//!
//! Coefficients live in `Z`, `Q` or `F_p` (p prime), with the Temperley-Lieb
//! parameter `a` carried around as a distinguished ring element. All
//! arithmetic is exact; there is no floating point anywhere in this crate.

mod elim;
mod homology;
mod sparse;

pub use elim::{
    dense_smith_normal_form, rank_over_field, rank_over_integers, smith_normal_form,
};
pub(crate) use elim::rank_mod_2_compact;
pub use homology::{homology_at, kernel_lattice_homology, HomologySummary};
pub use sparse::SparseMatrix;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Errors from the exact linear algebra layer.
#[derive(Debug, thiserror::Error)]
pub enum LinAlgError {
    #[error("expected integer entries, found ring {0}")]
    NotIntegerRing(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("d∘d ≠ 0 at column {col} (basis element {label})")]
    NotAComplex { col: usize, label: String },
    #[error("element {0} is not invertible")]
    NotInvertible(String),
    #[error("sparse elimination left a residual of size {0}x{1}, over the dense limit")]
    ResidualTooLarge(usize, usize),
}

/// The supported coefficient rings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum RingKind {
    Integers,
    Rationals,
    PrimeField(u64),
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingKind::Integers => write!(f, "Z"),
            RingKind::Rationals => write!(f, "Q"),
            RingKind::PrimeField(p) => write!(f, "F{p}"),
        }
    }
}

/// An exact element of `Z`, `Q` or `F_p`. Elements do not know their prime;
/// all arithmetic goes through a [`CoeffRing`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Int(BigInt),
    Rat(BigRational),
    Fp(u64),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::Rat(v) => write!(f, "{v}"),
            Scalar::Fp(v) => write!(f, "{v}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.checked_mul(d).map_or(false, |s| s <= p) {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A coefficient ring together with the distinguished parameter `a`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoeffRing {
    kind: RingKind,
    parameter_a: Scalar,
}

impl CoeffRing {
    /// `Z` with parameter `a`.
    pub fn integers(a: i64) -> Self {
        CoeffRing {
            kind: RingKind::Integers,
            parameter_a: Scalar::Int(BigInt::from(a)),
        }
    }

    /// `Q` with parameter `a`.
    pub fn rationals(a: i64) -> Self {
        CoeffRing {
            kind: RingKind::Rationals,
            parameter_a: Scalar::Rat(BigRational::from(BigInt::from(a))),
        }
    }

    /// `F_p` with parameter `a` (reduced mod p). Rejects composite `p`.
    pub fn prime_field(p: u64, a: i64) -> Result<Self, LinAlgError> {
        if !is_prime(p) {
            return Err(LinAlgError::NotPrime(p));
        }
        let a = a.rem_euclid(p as i64) as u64;
        Ok(CoeffRing {
            kind: RingKind::PrimeField(p),
            parameter_a: Scalar::Fp(a),
        })
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn parameter(&self) -> &Scalar {
        &self.parameter_a
    }

    pub fn is_field(&self) -> bool {
        !matches!(self.kind, RingKind::Integers)
    }

    /// The weight grading is defined exactly when the parameter vanishes.
    pub fn is_graded(&self) -> bool {
        self.is_zero(&self.parameter_a)
    }

    pub fn zero(&self) -> Scalar {
        match self.kind {
            RingKind::Integers => Scalar::Int(BigInt::zero()),
            RingKind::Rationals => Scalar::Rat(BigRational::zero()),
            RingKind::PrimeField(_) => Scalar::Fp(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self.kind {
            RingKind::Integers => Scalar::Int(BigInt::one()),
            RingKind::Rationals => Scalar::Rat(BigRational::one()),
            RingKind::PrimeField(_) => Scalar::Fp(1),
        }
    }

    pub fn from_int(&self, v: i64) -> Scalar {
        match self.kind {
            RingKind::Integers => Scalar::Int(BigInt::from(v)),
            RingKind::Rationals => Scalar::Rat(BigRational::from(BigInt::from(v))),
            RingKind::PrimeField(p) => Scalar::Fp(v.rem_euclid(p as i64) as u64),
        }
    }

    pub fn from_bigint(&self, v: &BigInt) -> Scalar {
        match self.kind {
            RingKind::Integers => Scalar::Int(v.clone()),
            RingKind::Rationals => Scalar::Rat(BigRational::from(v.clone())),
            RingKind::PrimeField(p) => {
                let m = v.mod_floor(&BigInt::from(p));
                let digits = m.to_u64_digits().1;
                Scalar::Fp(digits.first().copied().unwrap_or(0))
            }
        }
    }

    pub fn is_zero(&self, x: &Scalar) -> bool {
        match x {
            Scalar::Int(v) => v.is_zero(),
            Scalar::Rat(v) => v.is_zero(),
            Scalar::Fp(v) => *v == 0,
        }
    }

    pub fn add(&self, x: &Scalar, y: &Scalar) -> Scalar {
        match (x, y) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a + b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp(a), Scalar::Fp(b)) => {
                let p = self.prime();
                Scalar::Fp((a + b) % p)
            }
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn sub(&self, x: &Scalar, y: &Scalar) -> Scalar {
        self.add(x, &self.neg(y))
    }

    pub fn neg(&self, x: &Scalar) -> Scalar {
        match x {
            Scalar::Int(v) => Scalar::Int(-v),
            Scalar::Rat(v) => Scalar::Rat(-v),
            Scalar::Fp(v) => {
                let p = self.prime();
                Scalar::Fp(if *v == 0 { 0 } else { p - v })
            }
        }
    }

    pub fn mul(&self, x: &Scalar, y: &Scalar) -> Scalar {
        match (x, y) {
            (Scalar::Int(a), Scalar::Int(b)) => Scalar::Int(a * b),
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp(a), Scalar::Fp(b)) => {
                let p = self.prime() as u128;
                Scalar::Fp(((*a as u128 * *b as u128) % p) as u64)
            }
            _ => panic!("mixed scalar kinds"),
        }
    }

    /// Multiplicative inverse, when it exists.
    pub fn inv(&self, x: &Scalar) -> Option<Scalar> {
        match x {
            Scalar::Int(v) => {
                if v.abs().is_one() {
                    Some(Scalar::Int(v.clone()))
                } else {
                    None
                }
            }
            Scalar::Rat(v) => {
                if v.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(v.recip()))
                }
            }
            Scalar::Fp(v) => {
                if *v == 0 {
                    None
                } else {
                    Some(Scalar::Fp(mod_inverse(*v, self.prime())))
                }
            }
        }
    }

    /// `a^k` for the distinguished parameter.
    pub fn parameter_pow(&self, k: u32) -> Scalar {
        let mut acc = self.one();
        for _ in 0..k {
            acc = self.mul(&acc, &self.parameter_a);
        }
        acc
    }

    /// Is `k!` invertible in this ring?
    pub fn factorial_invertible(&self, k: u64) -> bool {
        match self.kind {
            RingKind::Integers => k <= 1,
            RingKind::Rationals => true,
            RingKind::PrimeField(p) => k < p,
        }
    }

    fn prime(&self) -> u64 {
        match self.kind {
            RingKind::PrimeField(p) => p,
            _ => panic!("not a prime field"),
        }
    }
}

use num::Integer;

pub(crate) fn mod_inverse(v: u64, p: u64) -> u64 {
    // extended Euclid on (v, p); p prime and v != 0 mod p
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, v as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not invertible");
    t.rem_euclid(p as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_rejects_composites() {
        assert!(CoeffRing::prime_field(6, 0).is_err());
        assert!(CoeffRing::prime_field(1, 0).is_err());
        assert!(CoeffRing::prime_field(2, 0).is_ok());
        assert!(CoeffRing::prime_field(97, 0).is_ok());
    }

    #[test]
    fn fp_arithmetic() {
        let r = CoeffRing::prime_field(7, 0).unwrap();
        let x = r.from_int(5);
        let y = r.from_int(4);
        assert_eq!(r.mul(&x, &y), r.from_int(6));
        assert_eq!(r.add(&x, &y), r.from_int(2));
        assert_eq!(r.mul(&x, &r.inv(&x).unwrap()), r.one());
    }

    #[test]
    fn rational_normalisation() {
        let r = CoeffRing::rationals(0);
        let half = r.inv(&r.from_int(2)).unwrap();
        let x = r.mul(&r.from_int(4), &half);
        assert_eq!(x, r.from_int(2));
    }

    #[test]
    fn parameter_powers() {
        let r = CoeffRing::integers(3);
        assert_eq!(r.parameter_pow(0), r.one());
        assert_eq!(r.parameter_pow(2), r.from_int(9));
        let r0 = CoeffRing::integers(0);
        assert!(r0.is_graded());
        assert!(!r.is_graded());
    }
}
