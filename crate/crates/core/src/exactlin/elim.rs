//! Sparse exact elimination: Smith normal form and ranks.
//!
//! The bar-complex differentials this crate produces are extremely sparse
//! with almost all entries ±1, so the work horse is a Markowitz-style
//! elimination that only ever pivots on unit entries (over `Z`) and therefore
//! stays integral. Whatever survives the sparse phase is handed to a classical
//! dense Smith normal form over arbitrary-precision integers, which also
//! supplies the non-unit invariant factors.

use super::{CoeffRing, LinAlgError, RingKind, Scalar, SparseMatrix};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::collections::VecDeque;

/// Entries the sparse engine can eliminate with. `Ctx` carries the prime for
/// `F_p`; the other rings need no context.
pub(crate) trait ElimEntry: Clone {
    type Ctx: Copy;
    fn is_unit(&self, ctx: Self::Ctx) -> bool;
    /// `a / p`, defined whenever `p` is a unit.
    fn div_unit(a: &Self, p: &Self, ctx: Self::Ctx) -> Self;
    /// `a - q*b` where `a` may be absent (treated as 0). `Ok(None)` means the
    /// result is zero; `Err(())` signals arithmetic overflow.
    fn sub_mul(a: Option<&Self>, q: &Self, b: &Self, ctx: Self::Ctx) -> Result<Option<Self>, ()>;
}

impl ElimEntry for i128 {
    type Ctx = ();
    fn is_unit(&self, _: ()) -> bool {
        *self == 1 || *self == -1
    }
    fn div_unit(a: &Self, p: &Self, _: ()) -> Self {
        a / p
    }
    fn sub_mul(a: Option<&Self>, q: &Self, b: &Self, _: ()) -> Result<Option<Self>, ()> {
        let prod = q.checked_mul(*b).ok_or(())?;
        let r = a.copied().unwrap_or(0).checked_sub(prod).ok_or(())?;
        Ok((r != 0).then_some(r))
    }
}

impl ElimEntry for BigInt {
    type Ctx = ();
    fn is_unit(&self, _: ()) -> bool {
        self.abs().is_one()
    }
    fn div_unit(a: &Self, p: &Self, _: ()) -> Self {
        a / p
    }
    fn sub_mul(a: Option<&Self>, q: &Self, b: &Self, _: ()) -> Result<Option<Self>, ()> {
        let mut r = match a {
            Some(a) => a.clone(),
            None => BigInt::zero(),
        };
        r -= q * b;
        Ok((!r.is_zero()).then_some(r))
    }
}

impl ElimEntry for BigRational {
    type Ctx = ();
    fn is_unit(&self, _: ()) -> bool {
        !self.is_zero()
    }
    fn div_unit(a: &Self, p: &Self, _: ()) -> Self {
        a / p
    }
    fn sub_mul(a: Option<&Self>, q: &Self, b: &Self, _: ()) -> Result<Option<Self>, ()> {
        let mut r = match a {
            Some(a) => a.clone(),
            None => BigRational::zero(),
        };
        r -= q * b;
        Ok((!r.is_zero()).then_some(r))
    }
}

/// Nonzero residue mod p.
impl ElimEntry for u64 {
    type Ctx = u64;
    fn is_unit(&self, _p: u64) -> bool {
        *self != 0
    }
    fn div_unit(a: &Self, p: &Self, prime: u64) -> Self {
        mul_mod(*a, super::mod_inverse(*p, prime), prime)
    }
    fn sub_mul(a: Option<&Self>, q: &Self, b: &Self, prime: u64) -> Result<Option<Self>, ()> {
        let prod = mul_mod(*q, *b, prime);
        let r = (a.copied().unwrap_or(0) + prime - prod) % prime;
        Ok((r != 0).then_some(r))
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// The nonzero element of `F_2`, as a zero-sized type. Matrices over `F_2`
/// with millions of columns fit in memory this way (4 bytes per entry).
#[derive(Clone, Copy)]
pub(crate) struct Unit2;

impl ElimEntry for Unit2 {
    type Ctx = ();
    fn is_unit(&self, _: ()) -> bool {
        true
    }
    fn div_unit(_: &Self, _: &Self, _: ()) -> Self {
        Unit2
    }
    fn sub_mul(a: Option<&Self>, _: &Self, _: &Self, _: ()) -> Result<Option<Self>, ()> {
        Ok(match a {
            Some(_) => None,
            None => Some(Unit2),
        })
    }
}

/// Rank over `F_2` of a matrix given as sorted row-index columns.
pub(crate) fn rank_mod_2_compact(cols: Vec<Vec<u32>>, nrows: usize) -> usize {
    let cols: Vec<Vec<(u32, Unit2)>> = cols
        .into_iter()
        .map(|c| c.into_iter().map(|r| (r, Unit2)).collect())
        .collect();
    let out = eliminate(cols, nrows, ()).expect("mod-2 elimination cannot overflow");
    debug_assert!(out.residual.is_empty());
    out.pivots
}

pub(crate) struct ElimOutcome<T> {
    pub pivots: usize,
    /// Rows/cols of the residual submatrix (entries that no unit pivot could
    /// clear), re-indexed densely.
    pub residual: Vec<Vec<(u32, T)>>,
    pub residual_rows: usize,
}

struct Elim<T: ElimEntry> {
    ctx: T::Ctx,
    cols: Vec<Vec<(u32, T)>>,
    col_alive: Vec<bool>,
    row_alive: Vec<bool>,
    row_nnz: Vec<u32>,
    row_occ: Vec<Vec<u32>>,
    pivots: usize,
}

impl<T: ElimEntry> Elim<T> {
    fn new(cols: Vec<Vec<(u32, T)>>, nrows: usize, ctx: T::Ctx) -> Self {
        let ncols = cols.len();
        let mut row_nnz = vec![0u32; nrows];
        let mut row_occ = vec![Vec::new(); nrows];
        for (j, col) in cols.iter().enumerate() {
            for (r, _) in col {
                row_nnz[*r as usize] += 1;
                row_occ[*r as usize].push(j as u32);
            }
        }
        Elim {
            ctx,
            cols,
            col_alive: vec![true; ncols],
            row_alive: vec![true; nrows],
            row_nnz,
            row_occ,
            pivots: 0,
        }
    }

    fn col_get(&self, j: usize, r: u32) -> Option<&T> {
        self.cols[j]
            .binary_search_by_key(&r, |(row, _)| *row)
            .ok()
            .map(|i| &self.cols[j][i].1)
    }

    /// Columns currently containing row `r`, compacted.
    fn cols_in_row(&mut self, r: usize) -> Vec<u32> {
        let mut occ = std::mem::take(&mut self.row_occ[r]);
        occ.sort_unstable();
        occ.dedup();
        occ.retain(|&j| self.col_alive[j as usize] && self.col_get(j as usize, r as u32).is_some());
        self.row_occ[r] = occ.clone();
        occ
    }

    /// Eliminate at pivot (r, c); the pivot entry must be a unit.
    fn pivot(&mut self, r: usize, c: usize) -> Result<(), ()> {
        let pivot_val = self.col_get(c, r as u32).expect("pivot entry").clone();
        debug_assert!(pivot_val.is_unit(self.ctx));
        let pivot_col = std::mem::take(&mut self.cols[c]);
        let others = self.cols_in_row(r);
        for j in others {
            let j = j as usize;
            if j == c {
                continue;
            }
            let q = match self.col_get(j, r as u32) {
                Some(v) => T::div_unit(v, &pivot_val, self.ctx),
                None => continue,
            };
            // cols[j] -= q * pivot_col (sorted merge)
            let old = std::mem::take(&mut self.cols[j]);
            let mut out: Vec<(u32, T)> = Vec::with_capacity(old.len() + pivot_col.len());
            let (mut ia, mut ib) = (0usize, 0usize);
            while ia < old.len() || ib < pivot_col.len() {
                let ra = old.get(ia).map(|(x, _)| *x);
                let rb = pivot_col.get(ib).map(|(x, _)| *x);
                match (ra, rb) {
                    (Some(x), Some(y)) if x == y => {
                        if let Some(v) = T::sub_mul(Some(&old[ia].1), &q, &pivot_col[ib].1, self.ctx)? {
                            out.push((x, v));
                        } else {
                            // entry vanished
                            self.row_nnz[x as usize] -= 1;
                        }
                        ia += 1;
                        ib += 1;
                    }
                    (Some(x), Some(y)) if x < y => {
                        out.push((x, old[ia].1.clone()));
                        ia += 1;
                    }
                    (Some(_), Some(y)) => {
                        if let Some(v) = T::sub_mul(None, &q, &pivot_col[ib].1, self.ctx)? {
                            out.push((y, v));
                            self.row_nnz[y as usize] += 1;
                            self.row_occ[y as usize].push(j as u32);
                        }
                        ib += 1;
                    }
                    (Some(x), None) => {
                        out.push((x, old[ia].1.clone()));
                        ia += 1;
                    }
                    (None, Some(y)) => {
                        if let Some(v) = T::sub_mul(None, &q, &pivot_col[ib].1, self.ctx)? {
                            out.push((y, v));
                            self.row_nnz[y as usize] += 1;
                            self.row_occ[y as usize].push(j as u32);
                        }
                        ib += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
            self.cols[j] = out;
        }
        // retire the pivot column and row
        for (r2, _) in &pivot_col {
            self.row_nnz[*r2 as usize] -= 1;
        }
        self.col_alive[c] = false;
        self.row_alive[r] = false;
        self.pivots += 1;
        Ok(())
    }

    fn run(mut self) -> Result<ElimOutcome<T>, ()> {
        let ncols = self.cols.len();
        // queue of candidate pivot columns, smallest support first
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(u32, u32)>> =
            std::collections::BinaryHeap::new();
        let mut singles: VecDeque<u32> = VecDeque::new();
        for j in 0..ncols {
            let n = self.cols[j].len() as u32;
            if n == 1 {
                singles.push_back(j as u32);
            } else if n > 1 {
                heap.push(std::cmp::Reverse((n, j as u32)));
            }
        }
        loop {
            // cascade: columns of support 1 pivot with no fill-in
            while let Some(j) = singles.pop_front() {
                let j = j as usize;
                if !self.col_alive[j] || self.cols[j].len() != 1 {
                    continue;
                }
                let (r, ref v) = self.cols[j][0];
                if !self.row_alive[r as usize] || !v.is_unit(self.ctx) {
                    continue;
                }
                let before: Vec<u32> = self.cols_in_row(r as usize);
                self.pivot(r as usize, j)?;
                for jj in before {
                    let jj = jj as usize;
                    if self.col_alive[jj] {
                        match self.cols[jj].len() {
                            1 => singles.push_back(jj as u32),
                            0 => self.col_alive[jj] = false,
                            n => heap.push(std::cmp::Reverse((n as u32, jj as u32))),
                        }
                    }
                }
            }
            // general step: smallest alive column with a unit entry,
            // tie-broken by Markowitz cost over its rows
            let mut chosen: Option<(usize, usize)> = None;
            while let Some(std::cmp::Reverse((n, j))) = heap.pop() {
                let j = j as usize;
                if !self.col_alive[j] {
                    continue;
                }
                let cur = self.cols[j].len() as u32;
                if cur == 0 {
                    self.col_alive[j] = false;
                    continue;
                }
                if cur != n {
                    if cur == 1 {
                        singles.push_back(j as u32);
                    } else {
                        heap.push(std::cmp::Reverse((cur, j as u32)));
                    }
                    continue;
                }
                if cur == 1 {
                    singles.push_back(j as u32);
                    break;
                }
                let mut best: Option<(u32, usize)> = None;
                for (r, v) in &self.cols[j] {
                    if v.is_unit(self.ctx) {
                        let rn = self.row_nnz[*r as usize];
                        if best.map_or(true, |(b, _)| rn < b) {
                            best = Some((rn, *r as usize));
                        }
                    }
                }
                match best {
                    Some((_, r)) => {
                        chosen = Some((r, j));
                        break;
                    }
                    None => {
                        // no unit entry in this column; leave it for the
                        // residual but keep scanning
                        continue;
                    }
                }
            }
            match chosen {
                Some((r, j)) => {
                    let before: Vec<u32> = self.cols_in_row(r);
                    self.pivot(r, j)?;
                    for jj in before {
                        let jj = jj as usize;
                        if self.col_alive[jj] {
                            match self.cols[jj].len() {
                                1 => singles.push_back(jj as u32),
                                0 => self.col_alive[jj] = false,
                                n => heap.push(std::cmp::Reverse((n as u32, jj as u32))),
                            }
                        }
                    }
                }
                None => {
                    if singles.is_empty() {
                        break;
                    }
                }
            }
        }
        // collect the residual: alive columns with entries in alive rows
        let mut row_map: Vec<Option<u32>> = vec![None; self.row_alive.len()];
        let mut next_row = 0u32;
        let mut residual = Vec::new();
        for j in 0..ncols {
            if !self.col_alive[j] || self.cols[j].is_empty() {
                continue;
            }
            let mut col = Vec::with_capacity(self.cols[j].len());
            for (r, v) in &self.cols[j] {
                debug_assert!(self.row_alive[*r as usize]);
                let rr = *row_map[*r as usize].get_or_insert_with(|| {
                    let x = next_row;
                    next_row += 1;
                    x
                });
                col.push((rr, v.clone()));
            }
            if !col.is_empty() {
                residual.push(col);
            }
        }
        Ok(ElimOutcome {
            pivots: self.pivots,
            residual,
            residual_rows: next_row as usize,
        })
    }
}

fn eliminate<T: ElimEntry>(
    cols: Vec<Vec<(u32, T)>>,
    nrows: usize,
    ctx: T::Ctx,
) -> Result<ElimOutcome<T>, ()> {
    Elim::new(cols, nrows, ctx).run()
}

const DENSE_RESIDUAL_LIMIT: usize = 4000;

/// Smith normal form of an integer matrix: the full chain `d_1 | d_2 | ... |
/// d_r`, all positive, `r = rank`.
pub fn smith_normal_form(m: &SparseMatrix) -> Result<Vec<BigInt>, LinAlgError> {
    let outcome = match m.int_cols() {
        Some(cols) => match eliminate::<i128>(cols, m.rows(), ()) {
            Ok(o) => ElimOutcome {
                pivots: o.pivots,
                residual: o
                    .residual
                    .into_iter()
                    .map(|c| c.into_iter().map(|(r, v)| (r, BigInt::from(v))).collect())
                    .collect(),
                residual_rows: o.residual_rows,
            },
            Err(()) => eliminate::<BigInt>(bigint_cols(m)?, m.rows(), ())
                .map_err(|()| unreachable!("BigInt elimination cannot overflow"))?,
        },
        None => eliminate::<BigInt>(bigint_cols(m)?, m.rows(), ())
            .map_err(|()| unreachable!("BigInt elimination cannot overflow"))?,
    };
    let ncols = outcome.residual.len();
    if ncols > DENSE_RESIDUAL_LIMIT || outcome.residual_rows > DENSE_RESIDUAL_LIMIT {
        return Err(LinAlgError::ResidualTooLarge(outcome.residual_rows, ncols));
    }
    let mut dense = vec![vec![BigInt::zero(); ncols]; outcome.residual_rows];
    for (j, col) in outcome.residual.iter().enumerate() {
        for (r, v) in col {
            dense[*r as usize][j] = v.clone();
        }
    }
    let rest = dense_smith_normal_form(&mut dense);
    let mut factors = vec![BigInt::one(); outcome.pivots];
    factors.extend(rest);
    Ok(factors)
}

fn bigint_cols(m: &SparseMatrix) -> Result<Vec<Vec<(u32, BigInt)>>, LinAlgError> {
    let mut out = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let mut col = Vec::with_capacity(m.col(j).len());
        for (r, v) in m.col(j) {
            match v {
                Scalar::Int(b) => col.push((*r, b.clone())),
                other => {
                    return Err(LinAlgError::NotIntegerRing(format!("{other}")));
                }
            }
        }
        out.push(col);
    }
    Ok(out)
}

/// Rank of an integer matrix over `Q` (equivalently, the number of nonzero
/// invariant factors).
pub fn rank_over_integers(m: &SparseMatrix) -> Result<usize, LinAlgError> {
    Ok(smith_normal_form(m)?.len())
}

/// Exact rank over the given field.
pub fn rank_over_field(m: &SparseMatrix, ring: &CoeffRing) -> Result<usize, LinAlgError> {
    match ring.kind() {
        RingKind::Integers => rank_over_integers(m),
        RingKind::Rationals => {
            let mut cols: Vec<Vec<(u32, BigRational)>> = Vec::with_capacity(m.cols());
            for j in 0..m.cols() {
                let mut col = Vec::with_capacity(m.col(j).len());
                for (r, v) in m.col(j) {
                    match v {
                        Scalar::Rat(x) => col.push((*r, x.clone())),
                        Scalar::Int(x) => col.push((*r, BigRational::from(x.clone()))),
                        other => return Err(LinAlgError::NotIntegerRing(format!("{other}"))),
                    }
                }
                cols.push(col);
            }
            let out = eliminate(cols, m.rows(), ()).expect("rational elimination cannot overflow");
            debug_assert!(out.residual.is_empty());
            Ok(out.pivots)
        }
        RingKind::PrimeField(p) => {
            let mut cols: Vec<Vec<(u32, u64)>> = Vec::with_capacity(m.cols());
            for j in 0..m.cols() {
                let mut col = Vec::with_capacity(m.col(j).len());
                for (r, v) in m.col(j) {
                    match v {
                        Scalar::Fp(x) => {
                            if *x % p != 0 {
                                col.push((*r, *x % p));
                            }
                        }
                        other => return Err(LinAlgError::NotIntegerRing(format!("{other}"))),
                    }
                }
                cols.push(col);
            }
            rank_mod_p(cols, m.rows(), p)
        }
    }
}

/// Rank of a matrix over `F_p`, given raw residue columns. Used directly by
/// the bar-complex code for matrices too large to label.
pub(crate) fn rank_mod_p(
    cols: Vec<Vec<(u32, u64)>>,
    nrows: usize,
    p: u64,
) -> Result<usize, LinAlgError> {
    let out = eliminate(cols, nrows, p).expect("mod-p elimination cannot overflow");
    debug_assert!(out.residual.is_empty());
    Ok(out.pivots)
}

/// Classical Smith normal form on a dense integer matrix. Returns the chain
/// of nontrivial (nonzero) invariant factors; the input is consumed as
/// scratch space.
pub fn dense_smith_normal_form(a: &mut Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let ncols = a.first().map_or(0, Vec::len);
    let (d, _, _) = dense_snf_with_transforms(a, ncols, false);
    d
}

/// Dense SNF, optionally tracking the column transform `V` (with `A·V`
/// column-reduced) and its inverse. Row transforms are not needed by any
/// caller. The column count is passed explicitly so that matrices with zero
/// rows keep their width. Returns `(factors, V, V_inverse)`.
pub fn dense_snf_with_transforms(
    a: &mut Vec<Vec<BigInt>>,
    ncols: usize,
    track: bool,
) -> (Vec<BigInt>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let nrows = a.len();
    debug_assert!(a.iter().all(|r| r.len() == ncols));
    let mut v = Vec::new();
    let mut vinv = Vec::new();
    if track {
        v = identity(ncols);
        vinv = identity(ncols);
    }

    let mut k = 0usize;
    while k < nrows.min(ncols) {
        // find a pivot of smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in k..nrows {
            for j in k..ncols {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(k, pi);
        if pj != k {
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            if track {
                for row in v.iter_mut() {
                    row.swap(k, pj);
                }
                vinv.swap(k, pj);
            }
        }
        // clear row k and column k
        let mut dirty = false;
        for i in k + 1..nrows {
            if !a[i][k].is_zero() {
                let q = div_round(&a[i][k], &a[k][k]);
                if !q.is_zero() {
                    for j in k..ncols {
                        let s = &a[k][j] * &q;
                        a[i][j] -= s;
                    }
                }
                if !a[i][k].is_zero() {
                    a.swap(k, i);
                    dirty = true;
                }
            }
        }
        for j in k + 1..ncols {
            if !a[k][j].is_zero() {
                let q = div_round(&a[k][j], &a[k][k]);
                if !q.is_zero() {
                    for row in a.iter_mut() {
                        let s = &row[k] * &q;
                        row[j] -= s;
                    }
                    if track {
                        for row in v.iter_mut() {
                            let s = &row[k] * &q;
                            row[j] -= s;
                        }
                        // E^{-1} adds q*col_j back; on V^{-1} rows: row_k += q*row_j
                        let (rk, rj) = two_rows(&mut vinv, k, j);
                        for (x, y) in rk.iter_mut().zip(rj.iter()) {
                            *x += &q * y;
                        }
                    }
                }
                if !a[k][j].is_zero() {
                    dirty = true;
                    for row in a.iter_mut() {
                        row.swap(k, j);
                    }
                    if track {
                        for row in v.iter_mut() {
                            row.swap(k, j);
                        }
                        vinv.swap(k, j);
                    }
                }
            }
        }
        if dirty {
            continue;
        }
        // divisibility: a[k][k] must divide the trailing block
        let mut fixed = true;
        'scan: for i in k + 1..nrows {
            for j in k + 1..ncols {
                if !(&a[i][j] % &a[k][k]).is_zero() {
                    // add row i to row k and retry this k
                    for jj in k..ncols {
                        let s = a[i][jj].clone();
                        a[k][jj] += s;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            if a[k][k].is_negative() {
                for row in a.iter_mut() {
                    row[k] = -std::mem::take(&mut row[k]);
                }
                if track {
                    for row in v.iter_mut() {
                        row[k] = -std::mem::take(&mut row[k]);
                    }
                    for x in vinv[k].iter_mut() {
                        *x = -std::mem::take(x);
                    }
                }
            }
            k += 1;
        }
    }
    let mut d = Vec::new();
    for i in 0..nrows.min(ncols) {
        if a[i][i].is_zero() {
            break;
        }
        d.push(a[i][i].clone());
    }
    (d, v, vinv)
}

fn two_rows<'a>(m: &'a mut [Vec<BigInt>], i: usize, j: usize) -> (&'a mut Vec<BigInt>, &'a Vec<BigInt>) {
    assert_ne!(i, j);
    if i < j {
        let (a, b) = m.split_at_mut(j);
        (&mut a[i], &b[0])
    } else {
        let (a, b) = m.split_at_mut(i);
        (&mut b[0], &a[j])
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

/// Round-to-nearest quotient, which keeps remainders small during SNF.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf_of(rows: &[&[i64]]) -> Vec<i64> {
        use num::ToPrimitive;
        smith_normal_form(&SparseMatrix::from_int_rows(rows))
            .unwrap()
            .iter()
            .map(|v| v.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn snf_already_diagonal() {
        assert_eq!(snf_of(&[&[2, 0], &[0, 0]]), vec![2]);
    }

    #[test]
    fn snf_two_by_two() {
        // row/column reduction by hand: [[1,2],[3,4]] -> diag(1,2)
        assert_eq!(snf_of(&[&[1, 2], &[3, 4]]), vec![1, 2]);
    }

    #[test]
    fn snf_empty() {
        assert_eq!(snf_of(&[]), Vec::<i64>::new());
    }

    #[test]
    fn snf_divisibility_chain() {
        assert_eq!(snf_of(&[&[2, 0], &[0, 3]]), vec![1, 6]);
        assert_eq!(
            snf_of(&[&[-6, 111, -36, 6], &[5, -672, 210, 74], &[0, -255, 81, 24], &[-7, 255, -81, -10]]),
            vec![1, 3, 21]
        );
    }

    #[test]
    fn ranks_over_fields() {
        let q = CoeffRing::rationals(0);
        let id3 = SparseMatrix::from_triplets(
            3,
            3,
            (0..3).map(|i| (i, i, q.one())),
            &q,
        );
        assert_eq!(rank_over_field(&id3, &q).unwrap(), 3);

        let f2 = CoeffRing::prime_field(2, 0).unwrap();
        let ones = SparseMatrix::from_triplets(
            2,
            2,
            (0..2).flat_map(|i| (0..2).map(move |j| (i, j, Scalar::Fp(1)))),
            &f2,
        );
        assert_eq!(rank_over_field(&ones, &f2).unwrap(), 1);

        let m = SparseMatrix::from_triplets(
            2,
            2,
            vec![
                (0, 0, q.from_int(2)),
                (0, 1, q.from_int(4)),
                (1, 0, q.from_int(1)),
                (1, 1, q.from_int(2)),
            ],
            &q,
        );
        assert_eq!(rank_over_field(&m, &q).unwrap(), 1);
    }

    #[test]
    fn snf_handles_dense_residual() {
        // all-threes matrix has no unit entries at all
        assert_eq!(snf_of(&[&[3, 3], &[3, 3]]), vec![3]);
        assert_eq!(snf_of(&[&[4, 6], &[6, 4]]), vec![2, 10]);
    }
}
