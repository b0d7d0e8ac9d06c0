//! Sparse matrices with exact entries, stored column-major.

use super::{CoeffRing, LinAlgError, Scalar};
use num::bigint::BigInt;
use num::ToPrimitive;

/// A sparse matrix over one of the supported rings. Zero entries are never
/// stored; columns keep their entries sorted by row index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(u32, Scalar)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![Vec::new(); cols],
        }
    }

    /// Build from (row, col, value) triplets, accumulating duplicates and
    /// dropping zeros.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I, ring: &CoeffRing) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut data: Vec<Vec<(u32, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet out of range");
            data[c].push((r as u32, v));
        }
        for col in data.iter_mut() {
            col.sort_by_key(|(r, _)| *r);
            let mut out: Vec<(u32, Scalar)> = Vec::with_capacity(col.len());
            for (r, v) in col.drain(..) {
                match out.last_mut() {
                    Some((lr, lv)) if *lr == r => *lv = ring.add(lv, &v),
                    _ => out.push((r, v)),
                }
            }
            out.retain(|(_, v)| !ring.is_zero(v));
            *col = out;
        }
        SparseMatrix { rows, cols, data }
    }

    /// Integer matrix from small literal rows, mainly for tests and oracles.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let ring = CoeffRing::integers(0);
        let triplets = rows.iter().enumerate().flat_map(|(i, row)| {
            assert_eq!(row.len(), ncols, "ragged rows");
            row.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(move |(j, v)| (i, j, Scalar::Int(BigInt::from(*v))))
                .collect::<Vec<_>>()
        });
        Self::from_triplets(nrows, ncols, triplets, &ring)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn col(&self, j: usize) -> &[(u32, Scalar)] {
        &self.data[j]
    }

    pub fn entry(&self, r: usize, c: usize) -> Option<&Scalar> {
        self.data[c]
            .binary_search_by_key(&(r as u32), |(row, _)| *row)
            .ok()
            .map(|idx| &self.data[c][idx].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r as usize, c, v)))
    }

    pub fn transpose(&self, ring: &CoeffRing) -> SparseMatrix {
        let triplets: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v.clone())).collect();
        SparseMatrix::from_triplets(self.cols, self.rows, triplets, ring)
    }

    /// `self * other`, for the `d∘d = 0` checks.
    pub fn multiply(&self, other: &SparseMatrix, ring: &CoeffRing) -> Result<SparseMatrix, LinAlgError> {
        if self.cols != other.rows {
            return Err(LinAlgError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data: Vec<Vec<(u32, Scalar)>> = Vec::with_capacity(other.cols);
        let mut acc: std::collections::BTreeMap<u32, Scalar> = std::collections::BTreeMap::new();
        for j in 0..other.cols {
            acc.clear();
            for (k, v) in other.col(j) {
                for (r, w) in self.col(*k as usize) {
                    let prod = ring.mul(v, w);
                    match acc.get_mut(r) {
                        Some(cur) => *cur = ring.add(cur, &prod),
                        None => {
                            acc.insert(*r, prod);
                        }
                    }
                }
            }
            data.push(
                acc.iter()
                    .filter(|(_, v)| !ring.is_zero(v))
                    .map(|(r, v)| (*r, v.clone()))
                    .collect(),
            );
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Apply `self` to a dense column vector of scalars.
    pub fn apply(&self, v: &[Scalar], ring: &CoeffRing) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![ring.zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if ring.is_zero(x) {
                continue;
            }
            for (r, w) in self.col(j) {
                out[*r as usize] = ring.add(&out[*r as usize], &ring.mul(w, x));
            }
        }
        out
    }

    /// Every entry as an i128, when the matrix has small integer entries.
    pub(crate) fn int_cols(&self) -> Option<Vec<Vec<(u32, i128)>>> {
        let mut out = Vec::with_capacity(self.cols);
        for col in &self.data {
            let mut c = Vec::with_capacity(col.len());
            for (r, v) in col {
                match v {
                    Scalar::Int(b) => c.push((*r, b.to_i128()?)),
                    _ => return None,
                }
            }
            out.push(c);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_accumulate_and_drop_zeros() {
        let ring = CoeffRing::integers(0);
        let m = SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, ring.from_int(2)),
                (0, 0, ring.from_int(-2)),
                (1, 1, ring.from_int(5)),
            ],
            &ring,
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.entry(1, 1), Some(&ring.from_int(5)));
        assert_eq!(m.entry(0, 0), None);
    }

    #[test]
    fn multiply_small() {
        let ring = CoeffRing::integers(0);
        let a = SparseMatrix::from_int_rows(&[&[1, 2], &[3, 4]]);
        let b = SparseMatrix::from_int_rows(&[&[0, 1], &[1, 0]]);
        let ab = a.multiply(&b, &ring).unwrap();
        assert_eq!(ab, SparseMatrix::from_int_rows(&[&[2, 1], &[4, 3]]));
    }
}
