//! Homology of a two-map segment `C_{q+1} --d_in--> C_q --d_out--> C_{q-1}`.

use super::elim::{dense_snf_with_transforms, rank_over_field, smith_normal_form};
use super::{CoeffRing, LinAlgError, RingKind, Scalar, SparseMatrix};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Free rank plus torsion invariant factors (over `Z`), or a dimension (over
/// a field). The torsion factors form a divisibility chain `d_1 | d_2 | ...`
/// with every `d_i > 1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HomologySummary {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologySummary {
    pub fn free(rank: usize) -> Self {
        HomologySummary {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Number of torsion factors divisible by `p`.
    pub fn torsion_dim_p(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.torsion.iter().filter(|d| (*d % &p).is_zero()).count()
    }
}

impl fmt::Display for HomologySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(match self.free_rank {
                1 => "Z".to_string(),
                r => format!("Z^{r}"),
            });
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_composite_zero(
    d_in: &SparseMatrix,
    d_out: &SparseMatrix,
    ring: &CoeffRing,
) -> Result<(), LinAlgError> {
    if d_out.cols() != d_in.rows() {
        return Err(LinAlgError::DimensionMismatch(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.cols(),
            d_in.rows()
        )));
    }
    let prod = d_out.multiply(d_in, ring)?;
    if let Some((_, c, _)) = prod.iter().next() {
        return Err(LinAlgError::NotAComplex {
            col: c,
            label: format!("column {c}"),
        });
    }
    Ok(())
}

const KERNEL_LATTICE_LIMIT: usize = 400;

/// Homology `ker(d_out) / im(d_in)` of a segment of free modules.
///
/// Over a field this is a dimension count. Over `Z` the free rank is
/// `dim C_q - rank(d_out) - rank(d_in)` and the torsion is the set of
/// nontrivial invariant factors of `d_in` — for a segment of free modules the
/// kernel of `d_out` is a direct summand, so the torsion of
/// `ker(d_out)/im(d_in)` agrees with the torsion of `C_q/im(d_in)`. Small
/// integral segments are dispatched to [`kernel_lattice_homology`] instead,
/// and the two routes are cross-checked in the test suite.
pub fn homology_at(
    d_in: &SparseMatrix,
    d_out: &SparseMatrix,
    ring: &CoeffRing,
) -> Result<HomologySummary, LinAlgError> {
    check_composite_zero(d_in, d_out, ring)?;
    let dim = d_out.cols();
    match ring.kind() {
        RingKind::Rationals | RingKind::PrimeField(_) => {
            let rank_out = rank_over_field(d_out, ring)?;
            let rank_in = rank_over_field(d_in, ring)?;
            Ok(HomologySummary::free(dim - rank_out - rank_in))
        }
        RingKind::Integers => {
            if dim <= KERNEL_LATTICE_LIMIT
                && d_in.cols() <= KERNEL_LATTICE_LIMIT
                && d_out.rows() <= KERNEL_LATTICE_LIMIT
            {
                return kernel_lattice_homology(d_in, d_out, ring);
            }
            let rank_out = smith_normal_form(d_out)?.len();
            let in_factors = smith_normal_form(d_in)?;
            let rank_in = in_factors.len();
            let torsion: Vec<BigInt> = in_factors
                .into_iter()
                .filter(|d| !d.is_one())
                .collect();
            Ok(HomologySummary {
                free_rank: dim - rank_out - rank_in,
                torsion,
            })
        }
    }
}

/// Integral homology via the kernel lattice: compute a basis of `ker(d_out)`
/// from the Smith transforms, express `im(d_in)` in that basis, and take the
/// Smith normal form of the result.
pub fn kernel_lattice_homology(
    d_in: &SparseMatrix,
    d_out: &SparseMatrix,
    ring: &CoeffRing,
) -> Result<HomologySummary, LinAlgError> {
    check_composite_zero(d_in, d_out, ring)?;
    let n = d_out.cols();
    let mut dense = vec![vec![BigInt::zero(); n]; d_out.rows()];
    for (r, c, v) in d_out.iter() {
        match v {
            Scalar::Int(b) => dense[r][c] = b.clone(),
            other => return Err(LinAlgError::NotIntegerRing(format!("{other}"))),
        }
    }
    let (factors, _, vinv) = dense_snf_with_transforms(&mut dense, n, true);
    let rank_out = factors.len();
    // coordinates of d_in in the column basis given by V: W = V^{-1} d_in.
    // Rows below rank_out are the kernel coordinates; the others must vanish
    // because d_out ∘ d_in = 0.
    let kdim = n - rank_out;
    let mut w = vec![vec![BigInt::zero(); d_in.cols()]; n];
    for (r, c, v) in d_in.iter() {
        let Scalar::Int(b) = v else {
            return Err(LinAlgError::NotIntegerRing(format!("{v}")));
        };
        for (i, row) in vinv.iter().enumerate() {
            let coef = &row[r];
            if !coef.is_zero() {
                w[i][c] += coef * b;
            }
        }
    }
    for (i, row) in w.iter().take(rank_out).enumerate() {
        for (c, x) in row.iter().enumerate() {
            if !x.is_zero() {
                return Err(LinAlgError::NotAComplex {
                    col: c,
                    label: format!("nonzero coordinate {i} outside the kernel"),
                });
            }
        }
    }
    let mut w: Vec<Vec<BigInt>> = w.split_off(rank_out);
    debug_assert_eq!(w.len(), kdim);
    let (m_factors, _, _) = dense_snf_with_transforms(&mut w, d_in.cols(), false);
    let rank_in = m_factors.len();
    let torsion: Vec<BigInt> = m_factors
        .into_iter()
        .filter(|d| !d.abs().is_one())
        .collect();
    Ok(HomologySummary {
        free_rank: kdim - rank_in,
        torsion,
    })
}
