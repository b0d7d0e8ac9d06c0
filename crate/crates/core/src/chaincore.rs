//! Bigraded chain complexes with explicit labelled bases.
//!
//! A [`BasisIndexedComplex`] stores, per (homological degree, weight) block,
//! an ordered basis of opaque labels and the sparse differential into the
//! block one degree down. The differential never changes the weight. Homology
//! is computed blockwise through [`exactlin`](crate::exactlin); complexes of
//! complexes are collapsed with [`totalize`].

use crate::exactlin::{
    homology_at, CoeffRing, HomologySummary, LinAlgError, RingKind, SparseMatrix,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum ChainError {
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("block ({0},{1}) has {2} labels but the differential has {3} columns")]
    BlockMismatch(u32, Weight, usize, usize),
    #[error("d∘d ≠ 0 at degree {q}, weight {w}, witness basis element {witness}")]
    DSquared { q: u32, w: Weight, witness: String },
    #[error("connecting map {index} is not a chain map at ({q},{w})")]
    NotChainMap { index: usize, q: u32, w: Weight },
    #[error("consecutive connecting maps {0} and {1} do not compose to zero")]
    CompositeNotZero(usize, usize),
    #[error("homology requested through degree {0} but the complex is only built through {1}")]
    NotBuiltThatFar(u32, u32),
    #[error("{0}")]
    Invalid(String),
}

/// Weight key of a block: a single ungraded block, or one weight of the loop
/// grading.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Weight {
    All,
    W(u32),
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::All => write!(f, "*"),
            Weight::W(w) => write!(f, "{w}"),
        }
    }
}

/// A bigraded complex of free modules with labelled bases and sparse
/// differentials of bidegree `(-1, 0)`.
#[derive(Clone, Debug)]
pub struct BasisIndexedComplex {
    ring: CoeffRing,
    name: String,
    blocks: BTreeMap<(u32, Weight), Vec<String>>,
    diffs: BTreeMap<(u32, Weight), SparseMatrix>,
    /// True when degrees above the top stored degree exist mathematically
    /// but have not been materialised (bar complexes are unbounded).
    truncated: bool,
}

impl BasisIndexedComplex {
    pub fn new(ring: CoeffRing, name: impl Into<String>, truncated: bool) -> Self {
        BasisIndexedComplex {
            ring,
            name: name.into(),
            blocks: BTreeMap::new(),
            diffs: BTreeMap::new(),
            truncated,
        }
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn add_block(&mut self, q: u32, w: Weight, labels: Vec<String>) {
        if !labels.is_empty() {
            self.blocks.insert((q, w), labels);
        }
    }

    /// Install the differential from `(q,w)` into `(q-1,w)`. Dimensions must
    /// match the stored blocks.
    pub fn set_diff(&mut self, q: u32, w: Weight, m: SparseMatrix) -> Result<(), ChainError> {
        let cols = self.dim(q, w);
        if m.cols() != cols {
            return Err(ChainError::BlockMismatch(q, w, cols, m.cols()));
        }
        let rows = self.dim(q - 1, w);
        if m.rows() != rows {
            return Err(ChainError::Invalid(format!(
                "differential at ({q},{w}) has {} rows, target block has {rows}",
                m.rows()
            )));
        }
        if !m.is_zero_matrix() {
            self.diffs.insert((q, w), m);
        }
        Ok(())
    }

    pub fn dim(&self, q: u32, w: Weight) -> usize {
        self.blocks.get(&(q, w)).map_or(0, Vec::len)
    }

    pub fn labels(&self, q: u32, w: Weight) -> Option<&[String]> {
        self.blocks.get(&(q, w)).map(Vec::as_slice)
    }

    pub fn block_keys(&self) -> impl Iterator<Item = (u32, Weight)> + '_ {
        self.blocks.keys().copied()
    }

    /// Top homological degree with a stored block.
    pub fn top_degree(&self) -> Option<u32> {
        self.blocks.keys().map(|(q, _)| *q).max()
    }

    /// Weights present in degree `q` or its neighbours.
    fn weights_near(&self, q: u32) -> BTreeSet<Weight> {
        self.blocks
            .keys()
            .filter(|(d, _)| *d == q)
            .map(|(_, w)| *w)
            .collect()
    }

    /// The stored differential leaving `(q,w)`, or an appropriately sized
    /// zero matrix.
    pub fn diff_or_zero(&self, q: u32, w: Weight) -> SparseMatrix {
        match self.diffs.get(&(q, w)) {
            Some(m) => m.clone(),
            None => {
                let rows = if q == 0 { 0 } else { self.dim(q - 1, w) };
                SparseMatrix::zero(rows, self.dim(q, w))
            }
        }
    }

    /// Verify `d∘d = 0` on every composable pair of stored differentials,
    /// reporting each violating block with a witness basis element.
    pub fn check_d_squared(&self) -> DSquaredReport {
        let mut violations = Vec::new();
        for (&(q, w), d_q) in &self.diffs {
            if q == 0 {
                continue;
            }
            let d_below = self.diff_or_zero(q - 1, w);
            if d_below.cols() != d_q.rows() {
                violations.push((q, w, "dimension mismatch".to_string()));
                continue;
            }
            match d_below.multiply(d_q, &self.ring) {
                Ok(prod) => {
                    if let Some((_, c, _)) = prod.iter().next() {
                        let witness = self
                            .labels(q, w)
                            .and_then(|ls| ls.get(c))
                            .cloned()
                            .unwrap_or_else(|| format!("column {c}"));
                        violations.push((q, w, witness));
                    }
                }
                Err(e) => violations.push((q, w, e.to_string())),
            }
        }
        DSquaredReport { violations }
    }

    /// Blockwise homology through degree `q_max`.
    pub fn homology_table(&self, q_max: u32) -> Result<HomologyTable, ChainError> {
        let top = self.top_degree().unwrap_or(0);
        if self.truncated && q_max > top {
            return Err(ChainError::NotBuiltThatFar(q_max, top));
        }
        let mut entries = BTreeMap::new();
        for q in 0..=q_max.min(top) {
            for w in self.weights_near(q) {
                if self.dim(q, w) == 0 {
                    continue;
                }
                let d_out = self.diff_or_zero(q, w);
                let flag = if self.truncated && q == top {
                    EntryFlag::KernelOnly
                } else {
                    EntryFlag::Exact
                };
                let d_in = if flag == EntryFlag::KernelOnly {
                    SparseMatrix::zero(self.dim(q, w), 0)
                } else {
                    self.diff_or_zero(q + 1, w)
                };
                let summary = homology_at(&d_in, &d_out, &self.ring)?;
                entries.insert((q, w), TableEntry { summary, flag });
            }
        }
        Ok(HomologyTable {
            name: self.name.clone(),
            ring: self.ring.kind(),
            q_max: q_max.min(top),
            entries,
        })
    }
}

/// Outcome of [`BasisIndexedComplex::check_d_squared`].
#[derive(Debug)]
pub struct DSquaredReport {
    pub violations: Vec<(u32, Weight, String)>,
}

impl DSquaredReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum EntryFlag {
    Exact,
    /// Top degree of a truncated complex: incoming boundaries are unknown,
    /// so the entry is only a kernel bound.
    KernelOnly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableEntry {
    pub summary: HomologySummary,
    pub flag: EntryFlag,
}

/// Homology per (degree, weight) block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomologyTable {
    pub name: String,
    pub ring: RingKind,
    pub q_max: u32,
    pub entries: BTreeMap<(u32, Weight), TableEntry>,
}

impl HomologyTable {
    pub fn get(&self, q: u32, w: Weight) -> Option<&TableEntry> {
        self.entries.get(&(q, w))
    }

    /// Summary of degree `q` collapsed across weights (direct sum).
    pub fn degree_summary(&self, q: u32) -> HomologySummary {
        let mut free = 0;
        let mut torsion = Vec::new();
        for ((d, _), e) in &self.entries {
            if *d == q {
                free += e.summary.free_rank;
                torsion.extend(e.summary.torsion.iter().cloned());
            }
        }
        torsion.sort();
        HomologySummary {
            free_rank: free,
            torsion,
        }
    }

    pub fn is_exact_through(&self, q: u32) -> bool {
        self.entries
            .iter()
            .all(|((d, _), e)| *d > q || e.flag == EntryFlag::Exact)
    }

    /// Free ranks, or counts of torsion factors divisible by `p`.
    pub fn poincare_coefficients(&self, which: PoincareKind) -> BTreeMap<(u32, Weight), usize> {
        self.entries
            .iter()
            .map(|(&key, e)| {
                let v = match which {
                    PoincareKind::FreeRank => e.summary.free_rank,
                    PoincareKind::TorsionDimP(p) => e.summary.torsion_dim_p(p),
                };
                (key, v)
            })
            .collect()
    }

    /// Human-readable aligned table.
    pub fn to_aligned_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# {} over {}\n", self.name, self.ring));
        out.push_str(&format!(
            "{:>4} {:>6} {:>9}  {:<20} {}\n",
            "q", "w", "free", "torsion", "status"
        ));
        for ((q, w), e) in &self.entries {
            let torsion = if e.summary.torsion.is_empty() {
                "-".to_string()
            } else {
                e.summary
                    .torsion
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let status = match e.flag {
                EntryFlag::Exact => "",
                EntryFlag::KernelOnly => "kernel-only (upper data missing)",
            };
            out.push_str(&format!(
                "{:>4} {:>6} {:>9}  {:<20} {}\n",
                q,
                w.to_string(),
                e.summary.free_rank,
                torsion,
                status
            ));
        }
        out
    }

    /// Machine-readable records `q,w,free_rank,torsion,status`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,w,free_rank,torsion,status\n");
        for ((q, w), e) in &self.entries {
            let torsion = e
                .summary
                .torsion
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let status = match e.flag {
                EntryFlag::Exact => "exact",
                EntryFlag::KernelOnly => "kernel-only",
            };
            out.push_str(&format!("{q},{w},{},{torsion},{status}\n", e.summary.free_rank));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            q: u32,
            w: String,
            free_rank: usize,
            torsion: Vec<String>,
            status: &'a str,
        }
        let rows: Vec<Row> = self
            .entries
            .iter()
            .map(|((q, w), e)| Row {
                q: *q,
                w: w.to_string(),
                free_rank: e.summary.free_rank,
                torsion: e.summary.torsion.iter().map(|d| d.to_string()).collect(),
                status: match e.flag {
                    EntryFlag::Exact => "exact",
                    EntryFlag::KernelOnly => "kernel-only",
                },
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "name": self.name,
            "ring": self.ring.to_string(),
            "q_max": self.q_max,
            "rows": rows,
        }))
        .expect("table serialisation cannot fail")
    }
}

/// Which coefficient of the Poincaré data to extract per block.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PoincareKind {
    FreeRank,
    TorsionDimP(u64),
}

/// A degree-0 chain map between two complexes, stored blockwise.
#[derive(Clone, Debug, Default)]
pub struct ChainMap {
    pub blocks: BTreeMap<(u32, Weight), SparseMatrix>,
}

impl ChainMap {
    pub fn block_or_zero(
        &self,
        q: u32,
        w: Weight,
        source: &BasisIndexedComplex,
        target: &BasisIndexedComplex,
    ) -> SparseMatrix {
        match self.blocks.get(&(q, w)) {
            Some(m) => m.clone(),
            None => SparseMatrix::zero(target.dim(q, w), source.dim(q, w)),
        }
    }

    /// `d_target ∘ f = f ∘ d_source` on every stored block.
    pub fn is_chain_map(
        &self,
        source: &BasisIndexedComplex,
        target: &BasisIndexedComplex,
        ring: &CoeffRing,
    ) -> Result<Option<(u32, Weight)>, LinAlgError> {
        let mut keys: BTreeSet<(u32, Weight)> = source.block_keys().collect();
        keys.extend(self.blocks.keys().copied());
        for (q, w) in keys {
            if q == 0 {
                continue;
            }
            let f_q = self.block_or_zero(q, w, source, target);
            let f_below = self.block_or_zero(q - 1, w, source, target);
            let left = target.diff_or_zero(q, w).multiply(&f_q, ring)?;
            let right = f_below.multiply(&source.diff_or_zero(q, w), ring)?;
            if left != right {
                return Ok(Some((q, w)));
            }
        }
        Ok(None)
    }
}

/// Totalise a complex of complexes `C_0 <- C_1 <- ... <- C_k`.
///
/// `connecting[p-1]` maps column `p` to column `p-1`; all connecting maps
/// must be chain maps with vanishing consecutive composites. The internal
/// differential of column `p` enters with sign `(-1)^p`, and column `C_0` is
/// a subcomplex with no degree shift.
pub fn totalize(
    columns: &[BasisIndexedComplex],
    connecting: &[ChainMap],
) -> Result<BasisIndexedComplex, ChainError> {
    let Some(first) = columns.first() else {
        return Err(ChainError::Invalid("no columns given".into()));
    };
    let ring = first.ring().clone();
    if connecting.len() + 1 != columns.len() {
        return Err(ChainError::Invalid(format!(
            "{} columns need {} connecting maps, got {}",
            columns.len(),
            columns.len() - 1,
            connecting.len()
        )));
    }
    for (i, f) in connecting.iter().enumerate() {
        if let Some((q, w)) = f.is_chain_map(&columns[i + 1], &columns[i], &ring)? {
            return Err(ChainError::NotChainMap { index: i, q, w });
        }
    }
    for i in 1..connecting.len() {
        // f_{i-1} ∘ f_i : columns[i+1] -> columns[i-1] must vanish
        let keys: BTreeSet<(u32, Weight)> = columns[i + 1].block_keys().collect();
        for (q, w) in keys {
            let inner = connecting[i].block_or_zero(q, w, &columns[i + 1], &columns[i]);
            let outer = connecting[i - 1].block_or_zero(q, w, &columns[i], &columns[i - 1]);
            if !outer.multiply(&inner, &ring)?.is_zero_matrix() {
                return Err(ChainError::CompositeNotZero(i - 1, i));
            }
        }
    }

    let truncated = columns.iter().any(BasisIndexedComplex::is_truncated);
    let mut total = BasisIndexedComplex::new(
        ring.clone(),
        format!("tot({})", first.name()),
        truncated,
    );

    // gather all (total degree, weight) keys and per-column offsets
    let mut keys: BTreeSet<(u32, Weight)> = BTreeSet::new();
    for (p, col) in columns.iter().enumerate() {
        for (q, w) in col.block_keys() {
            keys.insert((q + p as u32, w));
        }
    }
    let offset = |d: u32, w: Weight, p: usize| -> usize {
        columns
            .iter()
            .enumerate()
            .take(p)
            .map(|(pp, col)| {
                let q = d as i64 - pp as i64;
                if q < 0 {
                    0
                } else {
                    col.dim(q as u32, w)
                }
            })
            .sum()
    };
    for &(d, w) in &keys {
        let mut labels = Vec::new();
        for (p, col) in columns.iter().enumerate() {
            let q = d as i64 - p as i64;
            if q < 0 {
                continue;
            }
            if let Some(ls) = col.labels(q as u32, w) {
                labels.extend(ls.iter().map(|l| format!("c{p}:{l}")));
            }
        }
        total.add_block(d, w, labels);
    }
    for &(d, w) in &keys {
        if d == 0 {
            continue;
        }
        let mut triplets: Vec<(usize, usize, crate::exactlin::Scalar)> = Vec::new();
        for (p, col) in columns.iter().enumerate() {
            let q = d as i64 - p as i64;
            if q < 0 {
                continue;
            }
            let q = q as u32;
            let col_off = offset(d, w, p);
            // internal differential with sign (-1)^p, landing in (p, q-1)
            if q > 0 {
                let m = col.diff_or_zero(q, w);
                let row_off = offset(d - 1, w, p);
                for (r, c, v) in m.iter() {
                    let v = if p % 2 == 1 { ring.neg(v) } else { v.clone() };
                    triplets.push((row_off + r, col_off + c, v));
                }
            }
            // connecting map, landing in (p-1, q)
            if p > 0 {
                let f = connecting[p - 1].block_or_zero(q, w, col, &columns[p - 1]);
                let row_off = offset(d - 1, w, p - 1);
                for (r, c, v) in f.iter() {
                    triplets.push((row_off + r, col_off + c, v.clone()));
                }
            }
        }
        let rows = total.dim(d - 1, w);
        let cols = total.dim(d, w);
        if cols > 0 {
            let m = SparseMatrix::from_triplets(rows, cols, triplets, &ring);
            total.set_diff(d, w, m)?;
        }
    }
    Ok(total)
}
