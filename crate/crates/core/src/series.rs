//! Closed-form power series used as the expected side of verification
//! checks: coefficients are expanded from the rational function, never from
//! a homology computation.

use num::bigint::BigInt;
use num::{One, Zero};

/// Coefficients of `numerator / denominator` up to and including `t^order`.
/// The denominator must have constant term ±1.
pub fn expand_rational(numerator: &[i64], denominator: &[i64], order: usize) -> Vec<BigInt> {
    assert!(
        denominator.first().map(|c| c.abs()) == Some(1),
        "denominator needs unit constant term"
    );
    let d0 = BigInt::from(denominator[0]);
    let mut out: Vec<BigInt> = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut acc = numerator
            .get(k)
            .map(|&c| BigInt::from(c))
            .unwrap_or_else(BigInt::zero);
        for j in 1..=k.min(denominator.len() - 1) {
            acc -= BigInt::from(denominator[j]) * &out[k - j];
        }
        // divide by ±1
        if d0 == BigInt::one() {
            out.push(acc);
        } else {
            out.push(-acc);
        }
    }
    out
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// The named series exposed on the command line and used by the
/// verification suites.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NamedSeries {
    /// `t^2 / ((1 - t - t^3)(1 - t^4))`: per-degree count of the simple
    /// 2-torsion in the integral homology of the `2n = 4` loop algebra.
    Torsion2n4,
    /// `(1 + t) / (1 - t^4)`: free ranks in the same homology.
    Free2n4,
    /// `1 / (1 - t - t^3)`: per-degree dimensions of the `2n = 4` model.
    ModelDims2n4,
    /// `(1 + t^3) / (1 - t^4)`: ranks of Tor over the four-strand algebra.
    TorRanks2n4,
}

impl NamedSeries {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "torsion-2n4" => Some(NamedSeries::Torsion2n4),
            "free-2n4" => Some(NamedSeries::Free2n4),
            "model-dims-2n4" => Some(NamedSeries::ModelDims2n4),
            "tor-ranks-2n4" => Some(NamedSeries::TorRanks2n4),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NamedSeries::Torsion2n4 => "torsion-2n4",
            NamedSeries::Free2n4 => "free-2n4",
            NamedSeries::ModelDims2n4 => "model-dims-2n4",
            NamedSeries::TorRanks2n4 => "tor-ranks-2n4",
        }
    }

    pub fn closed_form(&self) -> &'static str {
        match self {
            NamedSeries::Torsion2n4 => "t^2 / ((1 - t - t^3)(1 - t^4))",
            NamedSeries::Free2n4 => "(1 + t) / (1 - t^4)",
            NamedSeries::ModelDims2n4 => "1 / (1 - t - t^3)",
            NamedSeries::TorRanks2n4 => "(1 + t^3) / (1 - t^4)",
        }
    }

    pub fn coefficients(&self, order: usize) -> Vec<BigInt> {
        match self {
            NamedSeries::Torsion2n4 => expand_rational(
                &[0, 0, 1],
                &poly_mul(&[1, -1, 0, -1], &[1, 0, 0, 0, -1]),
                order,
            ),
            NamedSeries::Free2n4 => expand_rational(&[1, 1], &[1, 0, 0, 0, -1], order),
            NamedSeries::ModelDims2n4 => expand_rational(&[1], &[1, -1, 0, -1], order),
            NamedSeries::TorRanks2n4 => expand_rational(&[1, 0, 0, 1], &[1, 0, 0, 0, -1], order),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(s: NamedSeries, order: usize) -> Vec<i64> {
        use num::ToPrimitive;
        s.coefficients(order)
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn torsion_series() {
        assert_eq!(
            coeffs(NamedSeries::Torsion2n4, 8),
            vec![0, 0, 1, 1, 1, 2, 4, 5, 7]
        );
    }

    #[test]
    fn free_rank_series() {
        assert_eq!(
            coeffs(NamedSeries::Free2n4, 10),
            vec![1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0]
        );
    }

    #[test]
    fn tor_rank_series() {
        assert_eq!(
            coeffs(NamedSeries::TorRanks2n4, 7),
            vec![1, 0, 0, 1, 1, 0, 0, 1]
        );
    }

    #[test]
    fn model_dimension_series() {
        assert_eq!(
            coeffs(NamedSeries::ModelDims2n4, 8),
            vec![1, 1, 1, 2, 3, 4, 6, 9, 13]
        );
    }

    #[test]
    fn order_zero() {
        for s in [
            NamedSeries::Torsion2n4,
            NamedSeries::Free2n4,
            NamedSeries::ModelDims2n4,
            NamedSeries::TorRanks2n4,
        ] {
            assert_eq!(s.coefficients(0).len(), 1);
        }
    }
}
