//! Bar complexes computing `Tor` over `TL_{2n}(R,a)`, and the independent
//! Ext route over the truncated polynomial algebra `R[y]/(y^{n+1})`.
//!
//! The trivial module is given by the augmentation `ε` with `ε(id) = 1` and
//! `ε(D) = 0` for every other diagram; this is multiplicative because a
//! composite of diagrams is the identity only when both factors are.

use crate::chaincore::{BasisIndexedComplex, HomologyTable, Weight};
use crate::diagrams::{compose_table, diagram_index_map, enumerate_diagrams, TLDiagram};
use crate::exactlin::{CoeffRing, Scalar, SparseMatrix};
use crate::loops::BarVariant;
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum TorError {
    #[error(transparent)]
    Chain(#[from] crate::chaincore::ChainError),
    #[error(transparent)]
    LinAlg(#[from] crate::exactlin::LinAlgError),
    #[error("{0}! must be invertible in {1} for the periodic resolution")]
    FactorialNotInvertible(u64, String),
    #[error("{0}")]
    Invalid(String),
}

struct BarTables {
    mid: std::sync::Arc<Vec<TLDiagram>>,
    coeff: std::sync::Arc<Vec<TLDiagram>>,
    mid_mid: std::sync::Arc<crate::diagrams::ComposeTable>,
    mid_coeff: std::sync::Arc<crate::diagrams::ComposeTable>,
    id_index: u32,
    /// Indices of the coefficient-module basis inside `TL(2n, 2i)`; for the
    /// trivial module this is empty and the degree-0 term is `R`.
    cell: Option<Vec<u32>>,
}

impl BarTables {
    fn new(n: u16, cell_coefficients: bool) -> Self {
        let two_n = 2 * n;
        let mid = enumerate_diagrams(two_n, two_n);
        let id_index = diagram_index_map(two_n, two_n)[&TLDiagram::identity(two_n)];
        let (coeff, mid_coeff, cell) = if cell_coefficients {
            let coeff = enumerate_diagrams(two_n, 0);
            // S(2n,0) = TL(2n,0): no diagram there has a right cup
            let cell: Vec<u32> = (0..coeff.len() as u32).collect();
            (coeff, compose_table(two_n, two_n, 0), Some(cell))
        } else {
            (mid.clone(), compose_table(two_n, two_n, two_n), None)
        };
        BarTables {
            mid,
            coeff,
            mid_mid: compose_table(two_n, two_n, two_n),
            mid_coeff,
            id_index,
            cell,
        }
    }
}

fn tuple_label(tuple: &[u32]) -> String {
    let inner: Vec<String> = tuple.iter().map(u32::to_string).collect();
    format!("[{}]", inner.join("|"))
}

fn tuple_key(tuple: &[u32], radices: &[u64]) -> u64 {
    let mut key = 0u64;
    for (t, &idx) in tuple.iter().enumerate() {
        key = key
            .checked_mul(radices[t])
            .and_then(|k| k.checked_add(idx as u64))
            .expect("tuple key overflow");
    }
    key
}

/// The two-sided bar complex `Bar(R, TL_{2n}, M)` through degree `q_max`,
/// with `M = R` (through `ε`) or the cell module `S(2n,0)`. Ungraded: there
/// is no weight grading on these complexes.
pub fn tor_complex(
    ring: &CoeffRing,
    n: u16,
    q_max: u32,
    variant: BarVariant,
    cell_coefficients: bool,
) -> Result<BasisIndexedComplex, TorError> {
    let tables = BarTables::new(n, cell_coefficients);
    let normalized = variant == BarVariant::Normalized;
    let name = format!(
        "tor(2n={}; {}, a={}{}{})",
        2 * n,
        ring.kind(),
        ring.parameter(),
        if normalized { ", normalized" } else { "" },
        if cell_coefficients { ", cell" } else { "" }
    );
    let mut complex = BasisIndexedComplex::new(ring.clone(), name, true);
    let mid_indices: Vec<u32> = (0..tables.mid.len() as u32)
        .filter(|&i| !normalized || i != tables.id_index)
        .collect();

    // degree 0: R for the trivial module, the cell basis otherwise
    let deg0: Vec<Vec<u32>> = match &tables.cell {
        None => vec![vec![]],
        Some(cell) => cell.iter().map(|&i| vec![i]).collect(),
    };
    let mut index: BTreeMap<u32, std::collections::HashMap<u64, u32>> = BTreeMap::new();
    let radices_for = |q: u32| -> Vec<u64> {
        let mut r = vec![tables.mid.len() as u64; q as usize];
        if tables.cell.is_some() {
            r.push(tables.coeff.len() as u64);
        }
        r
    };
    complex.add_block(0, Weight::All, deg0.iter().map(|t| tuple_label(t)).collect());
    index.insert(
        0,
        deg0.iter()
            .enumerate()
            .map(|(i, t)| (tuple_key(t, &radices_for(0)), i as u32))
            .collect(),
    );

    for q in 1..=q_max {
        let mut tuples: Vec<Vec<u32>> = Vec::new();
        let slots = q as usize + usize::from(tables.cell.is_some());
        let mut stack: Vec<u32> = Vec::with_capacity(slots);
        fn rec(
            slots: usize,
            q: usize,
            mid_indices: &[u32],
            cell: &Option<Vec<u32>>,
            stack: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) {
            if stack.len() == slots {
                out.push(stack.clone());
                return;
            }
            let choices: &[u32] = if stack.len() < q {
                mid_indices
            } else {
                cell.as_ref().expect("cell slot")
            };
            for &c in choices {
                stack.push(c);
                rec(slots, q, mid_indices, cell, stack, out);
                stack.pop();
            }
        }
        rec(slots, q as usize, &mid_indices, &tables.cell, &mut stack, &mut tuples);
        let radices = radices_for(q);
        index.insert(
            q,
            tuples
                .iter()
                .enumerate()
                .map(|(i, t)| (tuple_key(t, &radices), i as u32))
                .collect(),
        );
        complex.add_block(q, Weight::All, tuples.iter().map(|t| tuple_label(t)).collect());

        let prev_radices = radices_for(q - 1);
        let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
        for (col, tuple) in tuples.iter().enumerate() {
            let mut push = |face: Vec<u32>, sign_odd: bool, loops: u32| {
                let coeff_pow = ring.parameter_pow(loops);
                if ring.is_zero(&coeff_pow) {
                    return;
                }
                let coeff = if sign_odd { ring.neg(&coeff_pow) } else { coeff_pow };
                let row = index[&(q - 1)][&tuple_key(&face, &prev_radices)];
                triplets.push((row as usize, col, coeff));
            };
            // face 0 collapses the first factor through ε
            if tuple[0] == tables.id_index {
                push(tuple[1..].to_vec(), false, 0);
            }
            // inner faces compose adjacent bar factors
            for j in 1..q as usize {
                let (res, loops) = tables.mid_mid.get(tuple[j - 1], tuple[j]);
                if normalized && res == tables.id_index {
                    continue;
                }
                let mut face = Vec::with_capacity(tuple.len() - 1);
                face.extend_from_slice(&tuple[..j - 1]);
                face.push(res);
                face.extend_from_slice(&tuple[j + 1..]);
                push(face, j % 2 == 1, loops as u32);
            }
            // last face: ε on the right, or the module action
            match &tables.cell {
                None => {
                    if tuple[q as usize - 1] == tables.id_index {
                        push(tuple[..q as usize - 1].to_vec(), q % 2 == 1, 0);
                    }
                }
                Some(_) => {
                    let (res, loops) = tables.mid_coeff.get(tuple[q as usize - 1], tuple[q as usize]);
                    let mut face = tuple[..q as usize - 1].to_vec();
                    face.push(res);
                    push(face, q % 2 == 1, loops as u32);
                }
            }
        }
        let rows = complex.dim(q - 1, Weight::All);
        let cols = complex.dim(q, Weight::All);
        let m = SparseMatrix::from_triplets(rows, cols, triplets, ring);
        complex.set_diff(q, Weight::All, m)?;
    }
    Ok(complex)
}

/// `Tor_q^{TL_{2n}(R,a)}(R, R)` for `q <= q_max`, via the bar complex built
/// one degree higher so every reported entry is exact.
pub fn tor_table(
    ring: &CoeffRing,
    n: u16,
    q_max: u32,
    variant: BarVariant,
) -> Result<HomologyTable, TorError> {
    let complex = tor_complex(ring, n, q_max + 1, variant, false)?;
    Ok(complex.homology_table(q_max)?)
}

/// `Tor_q^{TL_{2n}(R,a)}(R, S(2n,0))` for `q <= q_max`.
pub fn tor_with_cell(
    ring: &CoeffRing,
    n: u16,
    q_max: u32,
    variant: BarVariant,
) -> Result<HomologyTable, TorError> {
    let complex = tor_complex(ring, n, q_max + 1, variant, true)?;
    Ok(complex.homology_table(q_max)?)
}

/// Normalized bar differential `d_q` over `F_2` at parameter zero, in a
/// compact row-index-only format (columns sorted, entries counted mod 2).
/// Bases are indexed in mixed radix over the non-identity diagrams.
fn bar_matrix_f2(n: u16, q: u32) -> (Vec<Vec<u32>>, usize) {
    let two_n = 2 * n;
    let mid = enumerate_diagrams(two_n, two_n);
    let id_index = diagram_index_map(two_n, two_n)[&TLDiagram::identity(two_n)];
    let table = compose_table(two_n, two_n, two_n);
    // compact index <-> full index, skipping the identity
    let full_of: Vec<u32> = (0..mid.len() as u32).filter(|&i| i != id_index).collect();
    let compact_of: Vec<u32> = {
        let mut v = vec![u32::MAX; mid.len()];
        for (c, &f) in full_of.iter().enumerate() {
            v[f as usize] = c as u32;
        }
        v
    };
    let b = full_of.len(); // 13 for TL_4
    let ncols = b.pow(q);
    let nrows = b.pow(q - 1);
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(ncols);
    let mut digits = vec![0u32; q as usize];
    for c in 0..ncols {
        // decode mixed radix (most significant digit first)
        let mut rem = c;
        for t in (0..q as usize).rev() {
            digits[t] = (rem % b) as u32;
            rem /= b;
        }
        let mut rows: Vec<u32> = Vec::with_capacity(q as usize - 1);
        for j in 1..q as usize {
            let (res, loops) = table.get(full_of[digits[j - 1] as usize], full_of[digits[j] as usize]);
            if loops > 0 {
                continue; // killed by a = 0
            }
            let res_c = compact_of[res as usize];
            debug_assert_ne!(res_c, u32::MAX, "a product of non-identity diagrams is never the identity");
            let mut row = 0usize;
            for (t, &digit) in digits.iter().enumerate() {
                if t == j - 1 {
                    row = row * b + res_c as usize;
                } else if t != j {
                    row = row * b + digit as usize;
                }
            }
            rows.push(row as u32);
        }
        rows.sort_unstable();
        // mod 2: cancel pairs
        let mut col = Vec::with_capacity(rows.len());
        let mut iter = rows.into_iter().peekable();
        while let Some(r) = iter.next() {
            if iter.peek() == Some(&r) {
                iter.next();
            } else {
                col.push(r);
            }
        }
        cols.push(col);
    }
    (cols, nrows)
}

/// `dim_{F_2} Tor_q^{TL_{2n}(F_2,0)}(F_2, F_2)` by sparse rank of the two
/// adjacent normalized bar differentials. This reaches degrees whose bases
/// are too large to label (degree `q+1` has `13^{q+1}` columns for `2n = 4`).
pub fn tor_f2_dimension(n: u16, q: u32) -> usize {
    if q == 0 {
        return 1;
    }
    let (cols_q, rows_q) = bar_matrix_f2(n, q);
    let dim_q = cols_q.len();
    let rank_q = crate::exactlin::rank_mod_2_compact(cols_q, rows_q);
    let (cols_up, rows_up) = bar_matrix_f2(n, q + 1);
    debug_assert_eq!(rows_up, dim_q);
    let rank_up = crate::exactlin::rank_mod_2_compact(cols_up, rows_up);
    dim_q - rank_q - rank_up
}

// --- Ext over R[y]/(y^{n+1}) -------------------------------------------------

/// The Ext table read off the periodic resolution of `R` over
/// `R[y]/(y^{n+1})`, together with the resolution itself (exposed so its
/// exactness can be certified).
pub struct ExtTable {
    pub n: u16,
    /// Bidegrees `(d, w)` carrying a rank-1 Ext group, for `d <= d_max`.
    pub bidegrees: Vec<(u32, u32)>,
    pub resolution: BasisIndexedComplex,
}

/// Bidegree of the Ext generator dual to the resolution position `s`.
pub fn ext_generator_bidegree(n: u16, s: u32) -> (u32, u32) {
    let n = n as u32;
    match s {
        0 => (0, 0),
        1 => (1, 1),
        _ => {
            let k = s / 2;
            if s % 2 == 0 {
                (2 * k * n, k * (n + 1))
            } else {
                (2 * k * n + 1, k * (n + 1) + 1)
            }
        }
    }
}

/// `Ext^*_{R[y]/(y^{n+1})}(R, R)` through total degree `d_max`, assuming
/// `n!` is invertible. Applying `Hom(-, R)` to the periodic resolution kills
/// every differential (the maps multiply by powers of `y`), so the table is
/// exactly one rank-1 group per resolution position.
pub fn ext_table_truncated_poly(
    ring: &CoeffRing,
    n: u16,
    d_max: u32,
) -> Result<ExtTable, TorError> {
    if !ring.factorial_invertible(n as u64) {
        return Err(TorError::FactorialNotInvertible(
            n as u64,
            format!("{}", ring.kind()),
        ));
    }
    let mut s_max = 0;
    while ext_generator_bidegree(n, s_max + 1).0 <= d_max {
        s_max += 1;
    }
    // build the resolution a step further so exactness through s_max is
    // checkable
    let top = s_max + 2;
    let rank = n as usize + 1;
    let name = format!("periodic-resolution(n={n}; {})", ring.kind());
    let mut complex = BasisIndexedComplex::new(ring.clone(), name, true);
    for s in 0..=top {
        let labels: Vec<String> = (0..rank).map(|t| format!("z{s}.y^{t}")).collect();
        complex.add_block(s, Weight::All, labels);
    }
    for s in 1..=top {
        // alternating multiplications: ·y for s odd, ·y^n for s even
        let power = if s % 2 == 1 { 1 } else { n as usize };
        let mut triplets = Vec::new();
        for t in 0..rank {
            if t + power <= n as usize {
                triplets.push((t + power, t, ring.one()));
            }
        }
        let m = SparseMatrix::from_triplets(rank, rank, triplets, ring);
        complex.set_diff(s, Weight::All, m)?;
    }
    let bidegrees: Vec<(u32, u32)> = (0..=s_max)
        .map(|s| ext_generator_bidegree(n, s))
        .filter(|(d, _)| *d <= d_max)
        .collect();
    Ok(ExtTable {
        n,
        bidegrees,
        resolution: complex,
    })
}
