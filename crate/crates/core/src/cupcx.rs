//! Cell modules and the complexes of innermost, submaximal and outermost
//! cups, their derived versions, and the chain-level boundary identity used
//! to identify the differential of the derived outermost complex.
//!
//! Dashed data is carried explicitly: an innermost right cup is recorded by
//! its lower node, an outermost left cup by its node pair. Face maps un-dash
//! (bottom to top, alternating signs); the derived complexes put a two-sided
//! bar construction in front of the dashed module.

use crate::chaincore::{BasisIndexedComplex, ChainMap, Weight};
use crate::diagrams::{
    compose_table, diagram_index_map, enumerate_diagrams, named_diagram, DiagramError,
    NamedDiagram, TLDiagram,
};
use crate::exactlin::{CoeffRing, Scalar, SparseMatrix};
use num::bigint::BigInt;
use num::Zero;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum CupError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Chain(#[from] crate::chaincore::ChainError),
    #[error("the outermost-cup complexes need the parameter a = 0")]
    NeedsParameterZero,
    #[error("dashed set {0:?} is not submaximal (every dashed cup must join odd j to j+1)")]
    NotSubmaximal(Vec<u16>),
    #[error("{0:?} is not a dashed cup set of the diagram")]
    NotACupSet(Vec<u16>),
    #[error("{0}")]
    Invalid(String),
}

/// Diagrams in `TL(2n, 2i)` with no right cup: the basis of the cell module
/// `S(2n, 2i)`. Empty when `i > n`.
pub fn cell_basis(two_n: u16, two_i: u16) -> Vec<TLDiagram> {
    enumerate_diagrams(two_n, two_i)
        .iter()
        .filter(|d| !d.has_right_cup())
        .cloned()
        .collect()
}

fn subsets_of_size(items: &[u16], k: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(items: &[u16], k: usize, start: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for t in start..items.len() {
            cur.push(items[t]);
            rec(items, k, t + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// Basis of `Inn_q(2n, 2i)`: `(diagram index, q dashed innermost right cups
/// by lower node)`, in lexicographic order.
pub(crate) fn inn_basis(two_n: u16, two_i: u16, q: usize) -> Vec<(u32, Vec<u16>)> {
    let mut out = Vec::new();
    for (idx, d) in enumerate_diagrams(two_n, two_i).iter().enumerate() {
        let cups = d.innermost_right_cups();
        for f in subsets_of_size(&cups, q) {
            out.push((idx as u32, f));
        }
    }
    out
}

/// Basis of `Out_q(2n)`: `(diagram index in TL(2n,0), q dashed outermost
/// left cups)`.
pub(crate) fn out_basis(two_n: u16, q: usize) -> Vec<(u32, Vec<(u16, u16)>)> {
    let mut out = Vec::new();
    for (idx, d) in enumerate_diagrams(two_n, 0).iter().enumerate() {
        let cups = d.outermost_left_cups();
        // reuse the subset enumerator through an index set
        let positions: Vec<u16> = (0..cups.len() as u16).collect();
        for f in subsets_of_size(&positions, q) {
            out.push((idx as u32, f.iter().map(|&t| cups[t as usize]).collect()));
        }
    }
    out
}

fn inn_label(idx: u32, dashed: &[u16]) -> String {
    let mut s = format!("d{idx}");
    if !dashed.is_empty() {
        s.push('*');
        let parts: Vec<String> = dashed.iter().map(u16::to_string).collect();
        let _ = write!(s, "{{{}}}", parts.join(","));
    }
    s
}

fn out_label(idx: u32, dashed: &[(u16, u16)]) -> String {
    let mut s = format!("d{idx}");
    if !dashed.is_empty() {
        s.push('*');
        let parts: Vec<String> = dashed.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        let _ = write!(s, "{{{}}}", parts.join(","));
    }
    s
}

/// The complex of innermost cups `Inn_*(2n, 2i)`, optionally augmented by
/// the quotient map onto the cell module. The augmented complex is stored
/// with degrees shifted up by one, so acyclicity means vanishing homology in
/// every degree. Homology is taken of the underlying modules, so any
/// coefficient ring is accepted.
pub fn build_inn_complex(
    ring: &CoeffRing,
    two_n: u16,
    two_i: u16,
    augmented: bool,
) -> Result<BasisIndexedComplex, CupError> {
    let shift = u32::from(augmented);
    let name = format!(
        "inn{}(2n={two_n}, 2i={two_i}; {})",
        if augmented { "-aug" } else { "" },
        ring.kind()
    );
    let mut complex = BasisIndexedComplex::new(ring.clone(), name, false);
    let cell: Vec<u32> = enumerate_diagrams(two_n, two_i)
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.has_right_cup())
        .map(|(i, _)| i as u32)
        .collect();
    let cell_pos: HashMap<u32, u32> = cell
        .iter()
        .enumerate()
        .map(|(pos, &idx)| (idx, pos as u32))
        .collect();
    if augmented {
        complex.add_block(
            0,
            Weight::All,
            cell.iter().map(|&i| format!("s{i}")).collect(),
        );
    }
    let max_q = (two_i / 2) as usize;
    let mut index: Vec<HashMap<(u32, Vec<u16>), u32>> = Vec::new();
    for q in 0..=max_q {
        let basis = inn_basis(two_n, two_i, q);
        index.push(
            basis
                .iter()
                .enumerate()
                .map(|(pos, e)| (e.clone(), pos as u32))
                .collect(),
        );
        complex.add_block(
            q as u32 + shift,
            Weight::All,
            basis.iter().map(|(i, f)| inn_label(*i, f)).collect(),
        );
    }
    // the augmentation: quotient onto the cell module
    if augmented {
        let basis0 = inn_basis(two_n, two_i, 0);
        let mut triplets = Vec::new();
        for (col, (idx, _)) in basis0.iter().enumerate() {
            if let Some(&row) = cell_pos.get(idx) {
                triplets.push((row as usize, col, ring.one()));
            }
        }
        let m = SparseMatrix::from_triplets(cell.len(), basis0.len(), triplets, ring);
        complex.set_diff(1, Weight::All, m)?;
    }
    // un-dashing faces
    for q in 1..=max_q {
        let basis = inn_basis(two_n, two_i, q);
        let mut triplets = Vec::new();
        for (col, (idx, dashed)) in basis.iter().enumerate() {
            for t in 0..dashed.len() {
                let mut f = dashed.clone();
                f.remove(t);
                let row = index[q - 1][&(*idx, f)];
                let coeff = if t % 2 == 0 {
                    ring.one()
                } else {
                    ring.from_int(-1)
                };
                triplets.push((row as usize, col, coeff));
            }
        }
        let rows = complex.dim(q as u32 - 1 + shift, Weight::All);
        let m = SparseMatrix::from_triplets(rows, basis.len(), triplets, ring);
        complex.set_diff(q as u32 + shift, Weight::All, m)?;
    }
    Ok(complex)
}

/// The complex of outermost cups `Out_*(2n)`; requires `a = 0`.
pub fn build_out_complex(ring: &CoeffRing, two_n: u16) -> Result<BasisIndexedComplex, CupError> {
    if !ring.is_graded() {
        return Err(CupError::NeedsParameterZero);
    }
    let name = format!("out(2n={two_n}; {})", ring.kind());
    let mut complex = BasisIndexedComplex::new(ring.clone(), name, false);
    let max_q = (two_n / 2) as usize;
    let mut index: Vec<HashMap<(u32, Vec<(u16, u16)>), u32>> = Vec::new();
    for q in 0..=max_q {
        let basis = out_basis(two_n, q);
        index.push(
            basis
                .iter()
                .enumerate()
                .map(|(pos, e)| (e.clone(), pos as u32))
                .collect(),
        );
        complex.add_block(
            q as u32,
            Weight::All,
            basis.iter().map(|(i, f)| out_label(*i, f)).collect(),
        );
    }
    for q in 1..=max_q {
        let basis = out_basis(two_n, q);
        let mut triplets = Vec::new();
        for (col, (idx, dashed)) in basis.iter().enumerate() {
            for t in 0..dashed.len() {
                let mut f = dashed.clone();
                f.remove(t);
                let row = index[q - 1][&(*idx, f)];
                let coeff = if t % 2 == 0 {
                    ring.one()
                } else {
                    ring.from_int(-1)
                };
                triplets.push((row as usize, col, coeff));
            }
        }
        let rows = complex.dim(q as u32 - 1, Weight::All);
        let m = SparseMatrix::from_triplets(rows, basis.len(), triplets, ring);
        complex.set_diff(q as u32, Weight::All, m)?;
    }
    Ok(complex)
}

/// The "close all cups" bijection `S(2n, 2q) -> Out_q(2n)`: right-multiply
/// by the fully dashed `L_max`, turning the right boundary into dashed
/// outermost left cups. Returns `(cell diagram, (image diagram, dashed
/// cups))` pairs.
pub fn close_all_cups(
    two_n: u16,
    two_q: u16,
) -> Result<Vec<(TLDiagram, (TLDiagram, Vec<(u16, u16)>))>, CupError> {
    let q = (two_q / 2) as usize;
    let mut out = Vec::new();
    for d in cell_basis(two_n, two_q) {
        // every right node connects to a left node; cup t of L_max joins the
        // partners of right nodes 2t-1 and 2t
        let mut arcs: Vec<(u16, u16)> = Vec::new();
        let mut dashed: Vec<(u16, u16)> = Vec::new();
        for (a, b) in d.arcs() {
            use crate::diagrams::Side;
            match (a.side, b.side) {
                (Side::L, Side::L) => {
                    arcs.push((a.index.min(b.index), a.index.max(b.index)));
                }
                _ => {} // handled through the cups below
            }
        }
        for t in 1..=q as u16 {
            let x = d.partner(crate::diagrams::Node::right(2 * t - 1));
            let y = d.partner(crate::diagrams::Node::right(2 * t));
            debug_assert!(x.side == crate::diagrams::Side::L);
            debug_assert!(y.side == crate::diagrams::Side::L);
            let cup = (x.index.min(y.index), x.index.max(y.index));
            arcs.push(cup);
            dashed.push(cup);
        }
        let node_arcs: Vec<_> = arcs
            .iter()
            .map(|&(x, y)| {
                (
                    crate::diagrams::Node::left(x),
                    crate::diagrams::Node::left(y),
                )
            })
            .collect();
        let image = TLDiagram::new(two_n, 0, &node_arcs)?;
        dashed.sort_unstable();
        // the closed cups are outermost in the image
        let outer = image.outermost_left_cups();
        for cup in &dashed {
            if !outer.contains(cup) {
                return Err(CupError::Invalid(format!(
                    "closed cup {cup:?} is not outermost in {image}"
                )));
            }
        }
        out.push((d, (image, dashed)));
    }
    Ok(out)
}

fn is_submaximal(dashed: &[u16]) -> bool {
    dashed.iter().all(|k| k % 2 == 1)
}

/// The lifted face map `d̃_t` (1-based `t`) on the complex of submaximal
/// cups, `M_*(2n, 2i) -> M_*(2n, 2i-2)`, at parameter zero:
/// zero on diagrams whose right cup `(2t-1, 2t)` is present (dashed or not,
/// the composite closes a circle either way), and otherwise
/// right-multiplication by `L_{2t-1}` with the dashed set reindexed past the
/// deleted nodes.
pub fn lifted_face(
    t: u16,
    base: &TLDiagram,
    dashed: &[u16],
) -> Result<Option<(TLDiagram, Vec<u16>)>, CupError> {
    if !is_submaximal(dashed) {
        return Err(CupError::NotSubmaximal(dashed.to_vec()));
    }
    let two_i = base.right_count();
    if t == 0 || 2 * t > two_i {
        return Err(CupError::Invalid(format!("face {t} out of range")));
    }
    let cups = base.innermost_right_cups();
    for k in dashed {
        if !cups.contains(k) {
            return Err(CupError::NotACupSet(dashed.to_vec()));
        }
    }
    if cups.contains(&(2 * t - 1)) {
        return Ok(None);
    }
    let l = named_diagram(NamedDiagram::LK {
        two_i,
        k: 2 * t - 1,
    })?;
    let res = base.compose(&l)?;
    debug_assert_eq!(res.loops, 0);
    let new_dashed: Vec<u16> = dashed
        .iter()
        .map(|&k| if k > 2 * t { k - 2 } else { k })
        .collect();
    let new_cups = res.diagram.innermost_right_cups();
    for k in &new_dashed {
        debug_assert!(new_cups.contains(k), "reindexed dashes stay cups");
    }
    Ok(Some((res.diagram, new_dashed)))
}

// --- derived complexes -------------------------------------------------------

/// A derived complex together with the raw index tuples of each basis
/// element (bar prefix indices, then the index into the module basis).
pub(crate) struct DerivedComplexData {
    pub complex: BasisIndexedComplex,
    pub elements: BTreeMap<(u32, Weight), Vec<Vec<u32>>>,
    pub index: BTreeMap<(u32, Weight), HashMap<Vec<u32>, u32>>,
}

/// Abstract last slot of a derived complex: a based module with a
/// `TL_{2n}`-action by index, an augmentation target, and a weight.
trait LastSlot {
    fn dim(&self) -> usize;
    fn label(&self, x: u32) -> String;
    /// `m · x`, or `None` when the action kills the element (loops at
    /// parameter zero, quotient relations, dash collisions).
    fn act(&self, m: u32, x: u32) -> Option<(u32, u32)>;
    fn deg0_dim(&self) -> usize;
    fn deg0_label(&self, y: u32) -> String;
    fn deg0_weight(&self, y: u32) -> u32;
    /// The augmentation `TL(0,2n) ⊗ X -> Y` on basis elements.
    fn project(&self, f: u32, x: u32) -> Option<(u32, u32)>;
    /// Loops formed by composing a closed-off prefix in `TL(0,2n)` with the
    /// (un-dashed) module element and closing with `L_max`.
    fn close_weight(&self, f: u32, x: u32) -> u32;
}

fn build_derived<S: LastSlot>(
    ring: &CoeffRing,
    n: u16,
    name: String,
    slot: &S,
    q_max: u32,
) -> Result<DerivedComplexData, CupError> {
    let two_n = 2 * n;
    let graded = ring.is_graded();
    let first = enumerate_diagrams(0, two_n);
    let mid = enumerate_diagrams(two_n, two_n);
    let fm = compose_table(0, two_n, two_n);
    let mm = compose_table(two_n, two_n, two_n);
    let mut complex = BasisIndexedComplex::new(ring.clone(), name, true);
    let mut elements: BTreeMap<(u32, Weight), Vec<Vec<u32>>> = BTreeMap::new();
    let mut index: BTreeMap<(u32, Weight), HashMap<Vec<u32>, u32>> = BTreeMap::new();

    #[allow(clippy::too_many_arguments)]
    fn add_degree<S: LastSlot>(
        q: u32,
        tuples: Vec<Vec<u32>>,
        labels: Vec<String>,
        graded: bool,
        slot: &S,
        fm: &crate::diagrams::ComposeTable,
        complex: &mut BasisIndexedComplex,
        elements: &mut BTreeMap<(u32, Weight), Vec<Vec<u32>>>,
        index: &mut BTreeMap<(u32, Weight), HashMap<Vec<u32>, u32>>,
    ) {
        let mut blocks: BTreeMap<Weight, (Vec<Vec<u32>>, Vec<String>)> = BTreeMap::new();
        for (tuple, label) in tuples.into_iter().zip(labels) {
            let w = if graded {
                let wv = if q == 0 {
                    slot.deg0_weight(tuple[0])
                } else {
                    // fold the prefix, then close off through the module
                    let mut acc = tuple[0];
                    let mut loops = 0u32;
                    for &m in &tuple[1..q as usize] {
                        let (res, k) = fm.get(acc, m);
                        acc = res;
                        loops += k as u32;
                    }
                    loops + slot.close_weight(acc, tuple[q as usize])
                };
                Weight::W(wv)
            } else {
                Weight::All
            };
            let entry = blocks.entry(w).or_default();
            entry.0.push(tuple);
            entry.1.push(label);
        }
        for (w, (tuples, labels)) in blocks {
            let map = tuples
                .iter()
                .enumerate()
                .map(|(pos, t)| (t.clone(), pos as u32))
                .collect();
            index.insert((q, w), map);
            elements.insert((q, w), tuples);
            complex.add_block(q, w, labels);
        }
    }

    // degree 0
    let tuples0: Vec<Vec<u32>> = (0..slot.deg0_dim() as u32).map(|y| vec![y]).collect();
    let labels0 = tuples0.iter().map(|t| slot.deg0_label(t[0])).collect();
    add_degree(
        0,
        tuples0,
        labels0,
        graded,
        slot,
        &fm,
        &mut complex,
        &mut elements,
        &mut index,
    );

    for q in 1..=q_max {
        let mut tuples: Vec<Vec<u32>> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        let mut stack: Vec<u32> = Vec::with_capacity(q as usize + 1);
        fn rec(
            q: usize,
            first_len: usize,
            mid_len: usize,
            slot_len: usize,
            stack: &mut Vec<u32>,
            sink: &mut impl FnMut(&[u32]),
        ) {
            let pos = stack.len();
            if pos == q + 1 {
                sink(stack);
                return;
            }
            let limit = if pos == 0 {
                first_len
            } else if pos == q {
                slot_len
            } else {
                mid_len
            };
            for idx in 0..limit as u32 {
                stack.push(idx);
                rec(q, first_len, mid_len, slot_len, stack, sink);
                stack.pop();
            }
        }
        rec(
            q as usize,
            first.len(),
            mid.len(),
            slot.dim(),
            &mut stack,
            &mut |t| {
                tuples.push(t.to_vec());
                let prefix: Vec<String> = t[..t.len() - 1].iter().map(u32::to_string).collect();
                labels.push(format!(
                    "[{}|{}]",
                    prefix.join("|"),
                    slot.label(t[t.len() - 1])
                ));
            },
        );
        add_degree(
            q,
            tuples,
            labels,
            graded,
            slot,
            &fm,
            &mut complex,
            &mut elements,
            &mut index,
        );

        // differentials out of degree q
        let keys: Vec<(u32, Weight)> = elements
            .keys()
            .filter(|(d, _)| *d == q)
            .copied()
            .collect();
        for (_, w) in keys {
            let tuples = &elements[&(q, w)];
            let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
            for (col, tuple) in tuples.iter().enumerate() {
                let qu = q as usize;
                let push =
                    |face: Vec<u32>, j: usize, loops: u32, triplets: &mut Vec<(usize, usize, Scalar)>| {
                        let coeff_pow = ring.parameter_pow(loops);
                        if ring.is_zero(&coeff_pow) {
                            return;
                        }
                        let coeff = if j % 2 == 1 {
                            ring.neg(&coeff_pow)
                        } else {
                            coeff_pow
                        };
                        let tw = if graded { w } else { Weight::All };
                        let row = index[&(q - 1, tw)]
                            .get(&face)
                            .copied()
                            .expect("face lands in an enumerated block");
                        triplets.push((row as usize, col, coeff));
                    };
                for j in 0..qu {
                    if j == qu - 1 {
                        // act on the module (or project, in degree 1 -> 0)
                        if qu == 1 {
                            if let Some((y, loops)) = slot.project(tuple[0], tuple[1]) {
                                push(vec![y], j, loops, &mut triplets);
                            }
                        } else if let Some((x, loops)) = slot.act(tuple[qu - 1], tuple[qu]) {
                            let mut face = tuple[..qu - 1].to_vec();
                            face.push(x);
                            push(face, j, loops, &mut triplets);
                        }
                    } else {
                        let (res, loops) = if j == 0 {
                            fm.get(tuple[0], tuple[1])
                        } else {
                            mm.get(tuple[j], tuple[j + 1])
                        };
                        let mut face = Vec::with_capacity(qu);
                        face.extend_from_slice(&tuple[..j]);
                        face.push(res);
                        face.extend_from_slice(&tuple[j + 2..]);
                        push(face, j, loops as u32, &mut triplets);
                    }
                }
            }
            let rows = complex.dim(q - 1, w);
            let m = SparseMatrix::from_triplets(rows, tuples.len(), triplets, ring);
            complex.set_diff(q, w, m)?;
        }
    }
    Ok(DerivedComplexData {
        complex,
        elements,
        index,
    })
}

struct InnSlot {
    basis: Vec<(u32, Vec<u16>)>,
    lookup: HashMap<(u32, Vec<u16>), u32>,
    deg0: Vec<(u32, Vec<u16>)>,
    deg0_lookup: HashMap<(u32, Vec<u16>), u32>,
    ml: std::sync::Arc<crate::diagrams::ComposeTable>,
    fl: std::sync::Arc<crate::diagrams::ComposeTable>,
    /// loops of (deg-0 diagram)·L_max per index
    lmax0: Vec<u32>,
}

impl InnSlot {
    fn new(n: u16, two_i: u16, p: usize) -> Self {
        let two_n = 2 * n;
        let basis = inn_basis(two_n, two_i, p);
        let lookup = basis
            .iter()
            .enumerate()
            .map(|(pos, e)| (e.clone(), pos as u32))
            .collect();
        let deg0 = inn_basis(0, two_i, p);
        let deg0_lookup = deg0
            .iter()
            .enumerate()
            .map(|(pos, e)| (e.clone(), pos as u32))
            .collect();
        let lmax = named_diagram(NamedDiagram::LMax { two_i }).expect("valid L_max");
        let lmax0: Vec<u32> = enumerate_diagrams(0, two_i)
            .iter()
            .map(|z| z.compose(&lmax).expect("shapes match").loops)
            .collect();
        InnSlot {
            basis,
            lookup,
            deg0,
            deg0_lookup,
            ml: compose_table(two_n, two_n, two_i),
            fl: compose_table(0, two_n, two_i),
            lmax0,
        }
    }
}

impl LastSlot for InnSlot {
    fn dim(&self) -> usize {
        self.basis.len()
    }
    fn label(&self, x: u32) -> String {
        let (idx, dashed) = &self.basis[x as usize];
        inn_label(*idx, dashed)
    }
    fn act(&self, m: u32, x: u32) -> Option<(u32, u32)> {
        let (idx, dashed) = &self.basis[x as usize];
        let (res, loops) = self.ml.get(m, *idx);
        let target = self.lookup[&(res, dashed.clone())];
        Some((target, loops as u32))
    }
    fn deg0_dim(&self) -> usize {
        self.deg0.len()
    }
    fn deg0_label(&self, y: u32) -> String {
        let (idx, dashed) = &self.deg0[y as usize];
        format!("z{}", inn_label(*idx, dashed))
    }
    fn deg0_weight(&self, y: u32) -> u32 {
        let (idx, _) = &self.deg0[y as usize];
        self.lmax0[*idx as usize]
    }
    fn project(&self, f: u32, x: u32) -> Option<(u32, u32)> {
        let (idx, dashed) = &self.basis[x as usize];
        let (res, loops) = self.fl.get(f, *idx);
        let target = self.deg0_lookup[&(res, dashed.clone())];
        Some((target, loops as u32))
    }
    fn close_weight(&self, f: u32, x: u32) -> u32 {
        let (idx, _) = &self.basis[x as usize];
        let (res, loops) = self.fl.get(f, *idx);
        loops as u32 + self.lmax0[res as usize]
    }
}

/// `DInn_p(2n, 2i)` through bar degree `q_max`.
pub fn build_derived_inn(
    ring: &CoeffRing,
    n: u16,
    i: u16,
    p: u16,
    q_max: u32,
) -> Result<BasisIndexedComplex, CupError> {
    Ok(build_derived_inn_data(ring, n, i, p, q_max)?.complex)
}

pub(crate) fn build_derived_inn_data(
    ring: &CoeffRing,
    n: u16,
    i: u16,
    p: u16,
    q_max: u32,
) -> Result<DerivedComplexData, CupError> {
    let slot = InnSlot::new(n, 2 * i, p as usize);
    let name = format!(
        "dinn(p={p}; 2n={}, 2i={}; {}, a={})",
        2 * n,
        2 * i,
        ring.kind(),
        ring.parameter()
    );
    build_derived(ring, n, name, &slot, q_max)
}

struct CellSlot {
    basis: Vec<u32>,
    lookup: HashMap<u32, u32>,
    i: u16,
    ml: std::sync::Arc<crate::diagrams::ComposeTable>,
    fl: std::sync::Arc<crate::diagrams::ComposeTable>,
    has_right_cup: Vec<bool>,
    lmax0: Vec<u32>,
}

impl CellSlot {
    fn new(n: u16, two_i: u16) -> Self {
        let two_n = 2 * n;
        let all = enumerate_diagrams(two_n, two_i);
        let basis: Vec<u32> = all
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.has_right_cup())
            .map(|(i, _)| i as u32)
            .collect();
        let lookup = basis
            .iter()
            .enumerate()
            .map(|(pos, &idx)| (idx, pos as u32))
            .collect();
        let has_right_cup = all.iter().map(TLDiagram::has_right_cup).collect();
        let lmax = named_diagram(NamedDiagram::LMax { two_i }).expect("valid L_max");
        let lmax0 = enumerate_diagrams(0, two_i)
            .iter()
            .map(|z| z.compose(&lmax).expect("shapes match").loops)
            .collect();
        CellSlot {
            basis,
            lookup,
            i: two_i / 2,
            ml: compose_table(two_n, two_n, two_i),
            fl: compose_table(0, two_n, two_i),
            has_right_cup,
            lmax0,
        }
    }
}

impl LastSlot for CellSlot {
    fn dim(&self) -> usize {
        self.basis.len()
    }
    fn label(&self, x: u32) -> String {
        format!("s{}", self.basis[x as usize])
    }
    fn act(&self, m: u32, x: u32) -> Option<(u32, u32)> {
        let (res, loops) = self.ml.get(m, self.basis[x as usize]);
        if self.has_right_cup[res as usize] {
            return None;
        }
        Some((self.lookup[&res], loops as u32))
    }
    fn deg0_dim(&self) -> usize {
        usize::from(self.i == 0)
    }
    fn deg0_label(&self, _y: u32) -> String {
        "ze".to_string()
    }
    fn deg0_weight(&self, _y: u32) -> u32 {
        0
    }
    fn project(&self, f: u32, x: u32) -> Option<(u32, u32)> {
        if self.i > 0 {
            // S(0, 2i) = 0: every (0,2i)-diagram has a right cup
            return None;
        }
        let (res, loops) = self.fl.get(f, self.basis[x as usize]);
        debug_assert_eq!(res, 0);
        Some((0, loops as u32))
    }
    fn close_weight(&self, f: u32, x: u32) -> u32 {
        let (res, loops) = self.fl.get(f, self.basis[x as usize]);
        loops as u32 + self.lmax0[res as usize]
    }
}

/// The derived cell module `DS(2n, 2i)` through bar degree `q_max`.
pub fn build_derived_cell(
    ring: &CoeffRing,
    n: u16,
    i: u16,
    q_max: u32,
) -> Result<BasisIndexedComplex, CupError> {
    let slot = CellSlot::new(n, 2 * i);
    let name = format!(
        "ds(2n={}, 2i={}; {}, a={})",
        2 * n,
        2 * i,
        ring.kind(),
        ring.parameter()
    );
    Ok(build_derived(ring, n, name, &slot, q_max)?.complex)
}

struct OutSlot {
    two_n: u16,
    p: usize,
    basis: Vec<(u32, Vec<(u16, u16)>)>,
    lookup: HashMap<(u32, Vec<(u16, u16)>), u32>,
    diagrams: std::sync::Arc<Vec<TLDiagram>>,
    mids: std::sync::Arc<Vec<TLDiagram>>,
    fl: std::sync::Arc<crate::diagrams::ComposeTable>,
    /// memoized dash-propagating action
    action: std::sync::Mutex<HashMap<(u32, u32), Option<(u32, u32)>>>,
}

impl OutSlot {
    fn new(n: u16, p: usize) -> Self {
        let two_n = 2 * n;
        let basis = out_basis(two_n, p);
        let lookup = basis
            .iter()
            .enumerate()
            .map(|(pos, e)| (e.clone(), pos as u32))
            .collect();
        OutSlot {
            two_n,
            p,
            basis,
            lookup,
            diagrams: enumerate_diagrams(two_n, 0),
            mids: enumerate_diagrams(two_n, two_n),
            fl: compose_table(0, two_n, 0),
            action: std::sync::Mutex::new(HashMap::new()),
        }
    }
}

impl LastSlot for OutSlot {
    fn dim(&self) -> usize {
        self.basis.len()
    }
    fn label(&self, x: u32) -> String {
        let (idx, dashed) = &self.basis[x as usize];
        out_label(*idx, dashed)
    }
    fn act(&self, m: u32, x: u32) -> Option<(u32, u32)> {
        if let Some(v) = self.action.lock().unwrap().get(&(m, x)) {
            return *v;
        }
        let (idx, dashed) = &self.basis[x as usize];
        let d = &self.mids[m as usize];
        let e = &self.diagrams[*idx as usize];
        let (res, used) = d.compose_traced(e).expect("shapes match");
        let value = (|| {
            if res.loops > 0 {
                // the outermost complexes live at parameter zero
                return None;
            }
            let e_arcs = e.arcs();
            let dashed_e: Vec<usize> = e_arcs
                .iter()
                .enumerate()
                .filter(|(_, (a, b))| {
                    let cup = (a.index.min(b.index), a.index.max(b.index));
                    dashed.contains(&cup)
                })
                .map(|(i, _)| i)
                .collect();
            let mut new_dashed: Vec<(u16, u16)> = Vec::new();
            for ((a, b), arcs_used) in res.diagram.arcs().iter().zip(&used) {
                if arcs_used.iter().any(|u| dashed_e.contains(u)) {
                    new_dashed.push((a.index.min(b.index), a.index.max(b.index)));
                }
            }
            if new_dashed.len() != self.p {
                return None; // dashed arcs merged
            }
            let outer = res.diagram.outermost_left_cups();
            if !new_dashed.iter().all(|c| outer.contains(c)) {
                return None; // a dashed arc is no longer outermost
            }
            new_dashed.sort_unstable();
            let target_idx = diagram_index_map(self.two_n, 0)[&res.diagram];
            let target = self.lookup[&(target_idx, new_dashed)];
            Some((target, 0))
        })();
        self.action.lock().unwrap().insert((m, x), value);
        value
    }
    fn deg0_dim(&self) -> usize {
        usize::from(self.p == 0)
    }
    fn deg0_label(&self, _y: u32) -> String {
        "ze".to_string()
    }
    fn deg0_weight(&self, _y: u32) -> u32 {
        0
    }
    fn project(&self, f: u32, x: u32) -> Option<(u32, u32)> {
        if self.p > 0 {
            return None;
        }
        let (idx, _) = &self.basis[x as usize];
        let (_, loops) = self.fl.get(f, *idx);
        Some((0, loops as u32))
    }
    fn close_weight(&self, f: u32, x: u32) -> u32 {
        let (idx, _) = &self.basis[x as usize];
        let (_, loops) = self.fl.get(f, *idx);
        loops as u32
    }
}

/// `DOut_p(2n)` through bar degree `q_max`; requires `a = 0`.
pub fn build_derived_out(
    ring: &CoeffRing,
    n: u16,
    p: u16,
    q_max: u32,
) -> Result<BasisIndexedComplex, CupError> {
    Ok(build_derived_out_data(ring, n, p, q_max)?.complex)
}

fn build_derived_out_data(
    ring: &CoeffRing,
    n: u16,
    p: u16,
    q_max: u32,
) -> Result<DerivedComplexData, CupError> {
    if !ring.is_graded() {
        return Err(CupError::NeedsParameterZero);
    }
    let slot = OutSlot::new(n, p as usize);
    let name = format!("dout(p={p}; 2n={}; {})", 2 * n, ring.kind());
    build_derived(ring, n, name, &slot, q_max)
}

/// The columns `DOut_0(2n), ..., DOut_n(2n)` together with the connecting
/// chain maps induced by un-dashing, ready for [`totalize`]
/// (crate::chaincore::totalize).
pub fn derived_out_resolution(
    ring: &CoeffRing,
    n: u16,
    q_max: u32,
) -> Result<(Vec<BasisIndexedComplex>, Vec<ChainMap>), CupError> {
    if !ring.is_graded() {
        return Err(CupError::NeedsParameterZero);
    }
    let mut data = Vec::new();
    for p in 0..=n {
        data.push((p, build_derived_out_data(ring, n, p, q_max)?));
    }
    let two_n = 2 * n;
    let mut maps = Vec::new();
    for p in 1..=n as usize {
        let source = &data[p].1;
        let target = &data[p - 1].1;
        // un-dashing on the module factor, per source basis element
        let src_basis = out_basis(two_n, p);
        let tgt_lookup: HashMap<(u32, Vec<(u16, u16)>), u32> = out_basis(two_n, p - 1)
            .into_iter()
            .enumerate()
            .map(|(pos, e)| (e, pos as u32))
            .collect();
        let boundary: Vec<Vec<(u32, i64)>> = src_basis
            .iter()
            .map(|(idx, dashed)| {
                (0..dashed.len())
                    .map(|t| {
                        let mut f = dashed.clone();
                        f.remove(t);
                        let row = tgt_lookup[&(*idx, f)];
                        (row, if t % 2 == 0 { 1i64 } else { -1 })
                    })
                    .collect()
            })
            .collect();
        let mut map = ChainMap::default();
        for (&(q, w), tuples) in &source.elements {
            if q == 0 {
                continue; // both degree-0 terms vanish for p >= 1
            }
            let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
            for (col, tuple) in tuples.iter().enumerate() {
                let x = *tuple.last().unwrap();
                for &(target_x, sign) in &boundary[x as usize] {
                    let mut face = tuple[..tuple.len() - 1].to_vec();
                    face.push(target_x);
                    let row = target.index[&(q, w)]
                        .get(&face)
                        .copied()
                        .expect("un-dashing preserves the weight");
                    triplets.push((row as usize, col, ring.from_int(sign)));
                }
            }
            let rows = target.complex.dim(q, w);
            let m = SparseMatrix::from_triplets(rows, tuples.len(), triplets, ring);
            if !m.is_zero_matrix() {
                map.blocks.insert((q, w), m);
            }
        }
        maps.push(map);
    }
    Ok((data.into_iter().map(|(_, d)| d.complex).collect(), maps))
}

// --- the chain-level boundary identity ---------------------------------------

/// A degree-1 chain in a derived innermost complex: coefficients on pairs
/// (first factor in `TL(0,2n)`, dashed diagram in `TL(2n, 2i)`).
type DashedChain = BTreeMap<(TLDiagram, TLDiagram, Vec<u16>), BigInt>;

fn chain_add(chain: &mut DashedChain, key: (TLDiagram, TLDiagram, Vec<u16>), c: BigInt) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match chain.entry(key) {
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
        Entry::Vacant(v) => {
            v.insert(c);
        }
    }
}

fn chain_to_string(chain: &DashedChain) -> String {
    if chain.is_empty() {
        return "0".to_string();
    }
    chain
        .iter()
        .map(|((f, b, dashed), c)| format!("{c}·({f} ⊗ {b}*{dashed:?})"))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Outcome of the chain-level identity: lifting the boundary of the fully
/// dashed cup diagram through the submaximal face maps multiplies by `i`.
#[derive(Debug)]
pub struct Lemma81Report {
    pub n: u16,
    pub i: u16,
    pub coefficient: u16,
    pub holds: bool,
    pub computed: String,
    pub expected: String,
}

/// Verify, at parameter zero, that applying the lifted boundary to the
/// canonical lift of `δ_i(R^dashed_{2i})` yields
/// `i · Φ_l ⊗ Φ_r · R^dashed_{2i-2}`.
pub fn lemma81_witness(n: u16, i: u16) -> Result<Lemma81Report, CupError> {
    if n == 0 || i == 0 || i > n {
        return Err(CupError::Invalid(format!(
            "need 1 <= i <= n, got n={n}, i={i}"
        )));
    }
    let two_n = 2 * n;
    let two_i = 2 * i;
    let phi_l = named_diagram(NamedDiagram::PhiL { two_n })?;
    let phi_rp = named_diagram(NamedDiagram::PhiRPrime { two_n })?;
    let phi_r = named_diagram(NamedDiagram::PhiR { two_n })?;

    // R^dashed: the unique all-cups diagram in TL(0, 2i), fully dashed
    let r_dashed_base = {
        let arcs: Vec<_> = (0..i)
            .map(|t| {
                (
                    crate::diagrams::Node::right(2 * t + 1),
                    crate::diagrams::Node::right(2 * t + 2),
                )
            })
            .collect();
        TLDiagram::new(0, two_i, &arcs)?
    };

    // the faces δ_i(R^dashed) = Σ_j (-1)^{j+1} R^{dashed\j} and their lifts
    // Φ_l ⊗ Φ_r^j with Φ_r^j = Φ_r' · C^{dashed\j}
    let mut lift: DashedChain = BTreeMap::new();
    for j in 1..=i {
        let c_free = named_diagram(NamedDiagram::CDashedFree { two_i, j })?;
        let res = phi_rp.compose(&c_free)?;
        debug_assert_eq!(res.loops, 0);
        let dashed: Vec<u16> = (1..=i).filter(|t| *t != j).map(|t| 2 * t - 1).collect();
        // check the lift: composing with Φ_l recovers the face R^{dashed\j}
        let glued = phi_l.compose(&res.diagram)?;
        debug_assert_eq!(glued.loops, 0);
        if glued.diagram != r_dashed_base {
            return Err(CupError::Invalid(format!(
                "lift {j} does not recover the face: {} vs {}",
                glued.diagram, r_dashed_base
            )));
        }
        let sign = if j % 2 == 1 { 1 } else { -1 };
        chain_add(
            &mut lift,
            (phi_l.clone(), res.diagram, dashed),
            BigInt::from(sign),
        );
    }

    // apply the lifted boundary Σ_t (-1)^{t+1} d̃_t to the module factor
    let mut computed: DashedChain = BTreeMap::new();
    for ((f, base, dashed), c) in &lift {
        for t in 1..=i {
            if let Some((new_base, new_dashed)) = lifted_face(t, base, dashed)? {
                let sign = if t % 2 == 1 { 1 } else { -1 };
                chain_add(
                    &mut computed,
                    (f.clone(), new_base, new_dashed),
                    c * BigInt::from(sign),
                );
            }
        }
    }

    // expected: i · Φ_l ⊗ (Φ_r · R^dashed_{2i-2})
    let r_dashed_small = {
        let arcs: Vec<_> = (0..i - 1)
            .map(|t| {
                (
                    crate::diagrams::Node::right(2 * t + 1),
                    crate::diagrams::Node::right(2 * t + 2),
                )
            })
            .collect();
        TLDiagram::new(0, two_i - 2, &arcs)?
    };
    let tail = phi_r.compose(&r_dashed_small)?;
    debug_assert_eq!(tail.loops, 0);
    let small_dash: Vec<u16> = (1..i).map(|t| 2 * t - 1).collect();
    let mut expected: DashedChain = BTreeMap::new();
    chain_add(
        &mut expected,
        (phi_l, tail.diagram, small_dash),
        BigInt::from(i),
    );

    Ok(Lemma81Report {
        n,
        i,
        coefficient: i,
        holds: computed == expected,
        computed: chain_to_string(&computed),
        expected: chain_to_string(&expected),
    })
}
