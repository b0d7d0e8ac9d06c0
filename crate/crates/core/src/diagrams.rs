//! Temperley-Lieb `(m,n)`-diagrams: planar perfect matchings between `m` left
//! and `n` right boundary nodes, composition with loop counting, the named
//! diagrams used throughout the crate, and the two reflections.
//!
//! Nodes are 1-based and numbered bottom to top on each side. Planarity is
//! checked on the circular order "left nodes bottom to top, then right nodes
//! top to bottom", where noncrossing is exactly balanced-bracket nesting.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("m + n must be even, got m={0}, n={1}")]
    OddBoundary(u16, u16),
    #[error("node {0:?} appears in {1} arcs; a perfect matching needs exactly one")]
    NotAMatching(Node, usize),
    #[error("arcs cross; the matching is not planar")]
    NotPlanar,
    #[error("node {0:?} out of range for a ({1},{2})-diagram")]
    NodeOutOfRange(Node, u16, u16),
    #[error("cannot compose: left factor has {0} right nodes, right factor has {1} left nodes")]
    CompositionMismatch(u16, u16),
    #[error("invalid parameters for named diagram: {0}")]
    BadNamedDiagram(String),
}

/// Which side of the diagram a node sits on.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Side {
    L,
    R,
}

/// A boundary node: a side plus a 1-based index, counted bottom to top.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Node {
    pub side: Side,
    pub index: u16,
}

impl Node {
    pub fn left(index: u16) -> Self {
        Node {
            side: Side::L,
            index,
        }
    }

    pub fn right(index: u16) -> Self {
        Node {
            side: Side::R,
            index,
        }
    }
}

/// A Temperley-Lieb `(m,n)`-diagram in canonical form: arcs are stored as
/// pairs ordered by circular position, sorted by their smaller position.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TLDiagram {
    left_count: u16,
    right_count: u16,
    /// Arcs as pairs of circular positions, each pair `(a, b)` with `a < b`,
    /// sorted by `a`.
    arcs: Vec<(u16, u16)>,
}

/// Result of composing two diagrams: the glued diagram and the number of
/// closed circles produced.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CompositionResult {
    pub diagram: TLDiagram,
    pub loops: u32,
}

impl TLDiagram {
    /// The circular position of a node: left nodes `1..=m` map to
    /// `0..m` bottom-up, right nodes continue `m..m+n` top-down.
    fn position(m: u16, n: u16, node: Node) -> u16 {
        match node.side {
            Side::L => node.index - 1,
            Side::R => m + (n - node.index),
        }
    }

    fn node_at(m: u16, n: u16, pos: u16) -> Node {
        if pos < m {
            Node::left(pos + 1)
        } else {
            Node::right(n - (pos - m))
        }
    }

    /// Build and validate a diagram from arcs given as node pairs.
    pub fn new(m: u16, n: u16, arcs: &[(Node, Node)]) -> Result<Self, DiagramError> {
        if (m + n) % 2 != 0 {
            return Err(DiagramError::OddBoundary(m, n));
        }
        let total = (m + n) as usize;
        let mut seen = vec![0usize; total];
        for &(a, b) in arcs {
            for node in [a, b] {
                let limit = match node.side {
                    Side::L => m,
                    Side::R => n,
                };
                if node.index == 0 || node.index > limit {
                    return Err(DiagramError::NodeOutOfRange(node, m, n));
                }
                seen[Self::position(m, n, node) as usize] += 1;
            }
        }
        if arcs.len() != total / 2 {
            return Err(DiagramError::NotAMatching(
                arcs.first()
                    .map(|(a, _)| *a)
                    .unwrap_or_else(|| Node::left(0)),
                arcs.len(),
            ));
        }
        for (pos, count) in seen.iter().enumerate() {
            if *count != 1 {
                return Err(DiagramError::NotAMatching(
                    Self::node_at(m, n, pos as u16),
                    *count,
                ));
            }
        }
        let mut pairs: Vec<(u16, u16)> = arcs
            .iter()
            .map(|&(a, b)| {
                let pa = Self::position(m, n, a);
                let pb = Self::position(m, n, b);
                (pa.min(pb), pa.max(pb))
            })
            .collect();
        pairs.sort_unstable();
        let d = TLDiagram {
            left_count: m,
            right_count: n,
            arcs: pairs,
        };
        if !d.is_planar() {
            return Err(DiagramError::NotPlanar);
        }
        Ok(d)
    }

    fn from_positions(m: u16, n: u16, mut pairs: Vec<(u16, u16)>) -> Self {
        pairs.sort_unstable();
        TLDiagram {
            left_count: m,
            right_count: n,
            arcs: pairs,
        }
    }

    /// Stack check: walking the circle, every arc must close in last-in
    /// first-out order.
    fn is_planar(&self) -> bool {
        let total = (self.left_count + self.right_count) as usize;
        let mut partner = vec![u16::MAX; total];
        for &(a, b) in &self.arcs {
            partner[a as usize] = b;
            partner[b as usize] = a;
        }
        let mut stack = Vec::new();
        for pos in 0..total as u16 {
            let p = partner[pos as usize];
            if p > pos {
                stack.push(pos);
            } else if stack.pop() != Some(p) {
                return false;
            }
        }
        stack.is_empty()
    }

    pub fn left_count(&self) -> u16 {
        self.left_count
    }

    pub fn right_count(&self) -> u16 {
        self.right_count
    }

    /// Arcs as node pairs, in canonical order.
    pub fn arcs(&self) -> Vec<(Node, Node)> {
        self.arcs
            .iter()
            .map(|&(a, b)| {
                (
                    Self::node_at(self.left_count, self.right_count, a),
                    Self::node_at(self.left_count, self.right_count, b),
                )
            })
            .collect()
    }

    /// The partner of a node under the matching.
    pub fn partner(&self, node: Node) -> Node {
        let pos = Self::position(self.left_count, self.right_count, node);
        for &(a, b) in &self.arcs {
            if a == pos {
                return Self::node_at(self.left_count, self.right_count, b);
            }
            if b == pos {
                return Self::node_at(self.left_count, self.right_count, a);
            }
        }
        unreachable!("perfect matching covers every node")
    }

    /// The identity diagram in `TL(n,n)`.
    pub fn identity(n: u16) -> Self {
        let arcs: Vec<_> = (1..=n)
            .map(|i| (Node::left(i), Node::right(i)))
            .collect();
        TLDiagram::new(n, n, &arcs).expect("identity is planar")
    }

    /// The unique `(0,0)`-diagram.
    pub fn empty() -> Self {
        TLDiagram {
            left_count: 0,
            right_count: 0,
            arcs: Vec::new(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.left_count == self.right_count
            && self
                .arcs
                .iter()
                .all(|&(a, b)| a + b == self.left_count * 2 - 1)
    }

    /// Does some arc join two right-hand nodes?
    pub fn has_right_cup(&self) -> bool {
        let m = self.left_count;
        self.arcs.iter().any(|&(a, _b)| a >= m)
    }

    /// Right cups joining consecutive nodes `k, k+1`, reported by the lower
    /// node `k`, in increasing order.
    pub fn innermost_right_cups(&self) -> Vec<u16> {
        let mut out = Vec::new();
        for &(a, b) in &self.arcs {
            if a >= self.left_count && b == a + 1 {
                // positions m + (n-j), m + (n-k): adjacent positions are
                // adjacent node indices, lower node = the larger position
                let j = self.right_count - (b - self.left_count);
                out.push(j);
            }
        }
        out.sort_unstable();
        out
    }

    /// Left cups `(i, j)` (as node index pairs, i < j) that are not nested
    /// inside any other left arc, in increasing order.
    pub fn outermost_left_cups(&self) -> Vec<(u16, u16)> {
        let m = self.left_count;
        let left_arcs: Vec<(u16, u16)> = self
            .arcs
            .iter()
            .filter(|&&(_, b)| b < m)
            .map(|&(a, b)| (a + 1, b + 1))
            .collect();
        let mut out: Vec<(u16, u16)> = left_arcs
            .iter()
            .filter(|&&(i, j)| {
                !left_arcs
                    .iter()
                    .any(|&(i2, j2)| i2 < i && j < j2)
            })
            .copied()
            .collect();
        out.sort_unstable();
        out
    }

    /// All left cups as node index pairs `(i, j)`, `i < j`.
    pub fn left_cups(&self) -> Vec<(u16, u16)> {
        let m = self.left_count;
        let mut out: Vec<(u16, u16)> = self
            .arcs
            .iter()
            .filter(|&&(_, b)| b < m)
            .map(|&(a, b)| (a + 1, b + 1))
            .collect();
        out.sort_unstable();
        out
    }

    /// Compose with `other`, gluing this diagram's right boundary to the
    /// other's left boundary. Closed circles among the glued nodes are
    /// counted with a union-find.
    pub fn compose(&self, other: &TLDiagram) -> Result<CompositionResult, DiagramError> {
        let mid = self.right_count;
        if mid != other.left_count {
            return Err(DiagramError::CompositionMismatch(mid, other.left_count));
        }
        let l = self.left_count;
        let n = other.right_count;

        // Endpoint encoding: 0..l are our left nodes, l..l+n the other's
        // right nodes. Middles are tracked separately, with one partner map
        // per side of the glued bar.
        #[derive(Clone, Copy, PartialEq, Eq, Debug)]
        enum End {
            Outer(u16),
            Mid(u16),
        }
        let mut left_partner = vec![End::Outer(0); mid as usize]; // via self
        let mut right_partner = vec![End::Outer(0); mid as usize]; // via other
        let mut outer_link = vec![End::Outer(u16::MAX); (l + n) as usize];

        let classify_self = |node: Node| -> End {
            match node.side {
                Side::L => End::Outer(node.index - 1),
                Side::R => End::Mid(node.index - 1),
            }
        };
        let classify_other = |node: Node| -> End {
            match node.side {
                Side::L => End::Mid(node.index - 1),
                Side::R => End::Outer(l + node.index - 1),
            }
        };
        for (a, b) in self.arcs() {
            let (ea, eb) = (classify_self(a), classify_self(b));
            match (ea, eb) {
                (End::Outer(x), End::Outer(y)) => {
                    outer_link[x as usize] = End::Outer(y);
                    outer_link[y as usize] = End::Outer(x);
                }
                (End::Outer(x), End::Mid(w)) | (End::Mid(w), End::Outer(x)) => {
                    outer_link[x as usize] = End::Mid(w);
                    left_partner[w as usize] = End::Outer(x);
                }
                (End::Mid(w1), End::Mid(w2)) => {
                    left_partner[w1 as usize] = End::Mid(w2);
                    left_partner[w2 as usize] = End::Mid(w1);
                }
            }
        }
        for (a, b) in other.arcs() {
            let (ea, eb) = (classify_other(a), classify_other(b));
            match (ea, eb) {
                (End::Outer(x), End::Outer(y)) => {
                    outer_link[x as usize] = End::Outer(y);
                    outer_link[y as usize] = End::Outer(x);
                }
                (End::Outer(x), End::Mid(w)) | (End::Mid(w), End::Outer(x)) => {
                    outer_link[x as usize] = End::Mid(w);
                    right_partner[w as usize] = End::Outer(x);
                }
                (End::Mid(w1), End::Mid(w2)) => {
                    right_partner[w1 as usize] = End::Mid(w2);
                    right_partner[w2 as usize] = End::Mid(w1);
                }
            }
        }

        // Trace outer-to-outer paths through the middle bar.
        let mut visited = vec![false; mid as usize];
        let mut pairs: Vec<(u16, u16)> = Vec::with_capacity(((l + n) / 2) as usize);
        let mut matched = vec![false; (l + n) as usize];
        for start in 0..(l + n) {
            if matched[start as usize] {
                continue;
            }
            // walk through the glued bar, alternating between the two
            // diagrams' arcs at every middle node
            let mut arrived_via_left = start < l;
            let mut cur = outer_link[start as usize];
            loop {
                match cur {
                    End::Outer(end) => {
                        matched[start as usize] = true;
                        matched[end as usize] = true;
                        pairs.push((start.min(end), start.max(end)));
                        break;
                    }
                    End::Mid(w) => {
                        visited[w as usize] = true;
                        cur = if arrived_via_left {
                            right_partner[w as usize]
                        } else {
                            left_partner[w as usize]
                        };
                        arrived_via_left = !arrived_via_left;
                    }
                }
            }
        }

        // Closed circles: union-find over the unvisited middle nodes.
        let mut uf = UnionFind::new(mid as usize);
        for w in 0..mid as usize {
            if visited[w] {
                continue;
            }
            if let End::Mid(w2) = left_partner[w] {
                uf.union(w, w2 as usize);
            }
            if let End::Mid(w2) = right_partner[w] {
                uf.union(w, w2 as usize);
            }
        }
        let mut loops = 0u32;
        for w in 0..mid as usize {
            if !visited[w] && uf.find(w) == w {
                loops += 1;
            }
        }

        // Translate outer endpoint ids back to circular positions.
        let arcs: Vec<(u16, u16)> = pairs
            .iter()
            .map(|&(x, y)| {
                let node_of = |e: u16| -> Node {
                    if e < l {
                        Node::left(e + 1)
                    } else {
                        Node::right(e - l + 1)
                    }
                };
                let (a, b) = (node_of(x), node_of(y));
                let pa = Self::position(l, n, a);
                let pb = Self::position(l, n, b);
                (pa.min(pb), pa.max(pb))
            })
            .collect();
        let diagram = TLDiagram::from_positions(l, n, arcs);
        debug_assert!(diagram.is_planar(), "composition broke planarity");
        Ok(CompositionResult { diagram, loops })
    }

    /// Like [`compose`](Self::compose), additionally reporting which arcs of
    /// `other` each composite arc runs through, as indices into
    /// `other.arcs()`. Slower than `compose`; used where distinguished
    /// (dashed) arcs must be propagated through a composition.
    pub(crate) fn compose_traced(
        &self,
        other: &TLDiagram,
    ) -> Result<(CompositionResult, Vec<Vec<usize>>), DiagramError> {
        let res = self.compose(other)?;
        let other_arcs = other.arcs();
        let arc_of_node: HashMap<(Side, u16), usize> = other_arcs
            .iter()
            .enumerate()
            .flat_map(|(i, (a, b))| [((a.side, a.index), i), ((b.side, b.index), i)])
            .collect();
        #[derive(Clone, Copy)]
        enum At {
            InSelf(Node),
            InOther(Node),
        }
        let mut used = Vec::with_capacity(res.diagram.arcs.len());
        for (start, _end) in res.diagram.arcs() {
            // composite left nodes are self's left nodes; composite right
            // nodes are other's right nodes
            let mut arcs_used = Vec::new();
            let mut at = match start.side {
                Side::L => At::InSelf(start),
                Side::R => At::InOther(start),
            };
            loop {
                match at {
                    At::InSelf(node) => {
                        let p = self.partner(node);
                        if p.side == Side::L {
                            break;
                        }
                        // crossed the glued bar at middle node p.index
                        at = At::InOther(Node::left(p.index));
                    }
                    At::InOther(node) => {
                        arcs_used.push(arc_of_node[&(node.side, node.index)]);
                        let p = other.partner(node);
                        if p.side == Side::R {
                            break;
                        }
                        at = At::InSelf(Node::right(p.index));
                    }
                }
            }
            arcs_used.sort_unstable();
            arcs_used.dedup();
            used.push(arcs_used);
        }
        Ok((res, used))
    }

    /// Reflect across the given axis. `LeftRight` exchanges the two
    /// boundaries (an anti-automorphism for composition); `TopBottom`
    /// renumbers `i -> count+1-i` on each side.
    pub fn reflect(&self, axis: Axis) -> TLDiagram {
        let map = |node: Node| -> Node {
            match axis {
                Axis::LeftRight => Node {
                    side: match node.side {
                        Side::L => Side::R,
                        Side::R => Side::L,
                    },
                    index: node.index,
                },
                Axis::TopBottom => Node {
                    side: node.side,
                    index: match node.side {
                        Side::L => self.left_count + 1 - node.index,
                        Side::R => self.right_count + 1 - node.index,
                    },
                },
            }
        };
        let (m, n) = match axis {
            Axis::LeftRight => (self.right_count, self.left_count),
            Axis::TopBottom => (self.left_count, self.right_count),
        };
        let pairs: Vec<(u16, u16)> = self
            .arcs()
            .into_iter()
            .map(|(a, b)| {
                let pa = Self::position(m, n, map(a));
                let pb = Self::position(m, n, map(b));
                (pa.min(pb), pa.max(pb))
            })
            .collect();
        TLDiagram::from_positions(m, n, pairs)
    }
}

impl PartialOrd for TLDiagram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TLDiagram {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.left_count, self.right_count, &self.arcs).cmp(&(
            other.left_count,
            other.right_count,
            &other.arcs,
        ))
    }
}

impl std::fmt::Display for TLDiagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let key = |n: &Node| (n.side, n.index);
        let mut arcs = self.arcs();
        for pair in arcs.iter_mut() {
            if key(&pair.0) > key(&pair.1) {
                std::mem::swap(&mut pair.0, &mut pair.1);
            }
        }
        arcs.sort_by_key(|(a, _)| key(a));
        let parts: Vec<String> = arcs
            .iter()
            .map(|(a, b)| {
                format!(
                    "{}{}-{}{}",
                    if a.side == Side::L { "L" } else { "R" },
                    a.index,
                    if b.side == Side::L { "L" } else { "R" },
                    b.index
                )
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Reflection axes for [`TLDiagram::reflect`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axis {
    LeftRight,
    TopBottom,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Every planar `(m,n)`-diagram, exactly once, sorted lexicographically on
/// canonical form. Returns the empty list when `m + n` is odd. Results are
/// memoized behind a thread-safe cache.
pub fn enumerate_diagrams(m: u16, n: u16) -> Arc<Vec<TLDiagram>> {
    static CACHE: OnceLock<Mutex<HashMap<(u16, u16), Arc<Vec<TLDiagram>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(m, n)) {
        return v.clone();
    }
    let result = Arc::new(enumerate_uncached(m, n));
    cache
        .lock()
        .unwrap()
        .insert((m, n), result.clone());
    result
}

fn enumerate_uncached(m: u16, n: u16) -> Vec<TLDiagram> {
    if (m + n) % 2 != 0 {
        return Vec::new();
    }
    let total = m + n;
    let mut out = Vec::new();
    if total == 0 {
        out.push(TLDiagram::empty());
        return out;
    }
    // Noncrossing matchings on half-open intervals of circular positions:
    // the lowest free position pairs with some b at odd distance, splitting
    // its interval in two.
    fn rec(
        intervals: Vec<(u16, u16)>,
        pending: &mut Vec<(u16, u16)>,
        m: u16,
        n: u16,
        out: &mut Vec<TLDiagram>,
    ) {
        let Some(&(lo, hi)) = intervals.last() else {
            out.push(TLDiagram::from_positions(m, n, pending.clone()));
            return;
        };
        let rest = &intervals[..intervals.len() - 1];
        let mut b = lo + 1;
        while b < hi {
            let mut next = rest.to_vec();
            if b + 1 < hi {
                next.push((b + 1, hi));
            }
            if lo + 1 < b {
                next.push((lo + 1, b));
            }
            pending.push((lo, b));
            rec(next, pending, m, n, out);
            pending.pop();
            b += 2;
        }
    }
    let mut pending = Vec::with_capacity((total / 2) as usize);
    rec(vec![(0, total)], &mut pending, m, n, &mut out);
    out.sort();
    debug_assert!(out.iter().all(TLDiagram::is_planar));
    out
}

/// The named diagrams from the calculus.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum NamedDiagram {
    /// `L_k` in `TL(2i, 2i-2)`: a single left cup joining `k, k+1`.
    LK { two_i: u16, k: u16 },
    /// `R_k` in `TL(2i-2, 2i)`: mirror image of `L_k`.
    RK { two_i: u16, k: u16 },
    /// `L_max` in `TL(2i, 0)`: cups `(1,2), (3,4), ...`.
    LMax { two_i: u16 },
    /// `Φ_l` in `TL(0, 2n)`.
    PhiL { two_n: u16 },
    /// `Φ_r = Φ_r' · L_1` in `TL(2n, 0)`.
    PhiR { two_n: u16 },
    /// `Φ_r'` in `TL(2n, 2)`.
    PhiRPrime { two_n: u16 },
    /// The cut-open all-cups diagram in `TL(2, 2i)`: left 1, 2 attach to
    /// right `2j-1`, `2j`; every other consecutive odd-even pair is a cup.
    CDashedFree { two_i: u16, j: u16 },
}

/// Construct one of the named diagrams, validating its parameters.
pub fn named_diagram(which: NamedDiagram) -> Result<TLDiagram, DiagramError> {
    let bad = |msg: String| Err(DiagramError::BadNamedDiagram(msg));
    match which {
        NamedDiagram::LK { two_i, k } => {
            if two_i < 2 || two_i % 2 != 0 {
                return bad(format!("L_k needs an even source of at least 2, got {two_i}"));
            }
            if k == 0 || k + 1 > two_i {
                return bad(format!("L_{k} out of range for TL({two_i},{})", two_i - 2));
            }
            let mut arcs = vec![(Node::left(k), Node::left(k + 1))];
            let mut r = 1;
            for i in 1..=two_i {
                if i != k && i != k + 1 {
                    arcs.push((Node::left(i), Node::right(r)));
                    r += 1;
                }
            }
            TLDiagram::new(two_i, two_i - 2, &arcs)
        }
        NamedDiagram::RK { two_i, k } => {
            Ok(named_diagram(NamedDiagram::LK { two_i, k })?.reflect(Axis::LeftRight))
        }
        NamedDiagram::LMax { two_i } => {
            if two_i % 2 != 0 {
                return bad(format!("L_max needs an even source, got {two_i}"));
            }
            let arcs: Vec<_> = (0..two_i / 2)
                .map(|t| (Node::left(2 * t + 1), Node::left(2 * t + 2)))
                .collect();
            TLDiagram::new(two_i, 0, &arcs)
        }
        NamedDiagram::PhiL { two_n } => {
            if two_n == 0 || two_n % 2 != 0 {
                return bad(format!("Φ_l needs an even positive size, got {two_n}"));
            }
            let mut arcs = Vec::new();
            let mut k = if two_n % 4 == 2 {
                arcs.push((Node::right(1), Node::right(2)));
                3
            } else {
                1
            };
            while k + 3 <= two_n {
                arcs.push((Node::right(k), Node::right(k + 3)));
                arcs.push((Node::right(k + 1), Node::right(k + 2)));
                k += 4;
            }
            TLDiagram::new(0, two_n, &arcs)
        }
        NamedDiagram::PhiRPrime { two_n } => {
            if two_n == 0 || two_n % 2 != 0 {
                return bad(format!("Φ_r' needs an even positive size, got {two_n}"));
            }
            let mut arcs = vec![
                (Node::left(two_n), Node::right(2)),
                (Node::left(two_n - 1), Node::right(1)),
            ];
            // nested pairs walking down from the top
            let mut k = two_n as i32 - 5;
            while k >= 1 {
                let k16 = k as u16;
                arcs.push((Node::left(k16), Node::left(k16 + 3)));
                arcs.push((Node::left(k16 + 1), Node::left(k16 + 2)));
                k -= 4;
            }
            if two_n % 4 == 0 {
                arcs.push((Node::left(1), Node::left(2)));
            }
            TLDiagram::new(two_n, 2, &arcs)
        }
        NamedDiagram::PhiR { two_n } => {
            let prime = named_diagram(NamedDiagram::PhiRPrime { two_n })?;
            let l1 = TLDiagram::new(2, 0, &[(Node::left(1), Node::left(2))])?;
            let res = prime.compose(&l1)?;
            debug_assert_eq!(res.loops, 0);
            Ok(res.diagram)
        }
        NamedDiagram::CDashedFree { two_i, j } => {
            if two_i < 2 || two_i % 2 != 0 || j == 0 || 2 * j > two_i {
                return bad(format!("cut-open diagram needs 1 <= j <= i, got 2i={two_i}, j={j}"));
            }
            let mut arcs = vec![
                (Node::left(1), Node::right(2 * j - 1)),
                (Node::left(2), Node::right(2 * j)),
            ];
            for t in 1..=two_i / 2 {
                if t != j {
                    arcs.push((Node::right(2 * t - 1), Node::right(2 * t)));
                }
            }
            TLDiagram::new(2, two_i, &arcs)
        }
    }
}

// --- textual format -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DiagramRecord {
    left: u16,
    right: u16,
    arcs: Vec<(char, u16, char, u16)>,
}

impl Serialize for TLDiagram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let rec = DiagramRecord {
            left: self.left_count,
            right: self.right_count,
            arcs: self
                .arcs()
                .iter()
                .map(|(a, b)| {
                    let s = |side: Side| if side == Side::L { 'L' } else { 'R' };
                    (s(a.side), a.index, s(b.side), b.index)
                })
                .collect(),
        };
        rec.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TLDiagram {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = DiagramRecord::deserialize(deserializer)?;
        let side = |c: char| -> Result<Side, D::Error> {
            match c {
                'L' => Ok(Side::L),
                'R' => Ok(Side::R),
                other => Err(D::Error::custom(format!("bad side {other:?}"))),
            }
        };
        let mut arcs = Vec::with_capacity(rec.arcs.len());
        for &(sa, ia, sb, ib) in &rec.arcs {
            arcs.push((
                Node {
                    side: side(sa)?,
                    index: ia,
                },
                Node {
                    side: side(sb)?,
                    index: ib,
                },
            ));
        }
        TLDiagram::new(rec.left, rec.right, &arcs).map_err(D::Error::custom)
    }
}

// --- indexed composition tables --------------------------------------------

/// Index of each diagram within `enumerate_diagrams(m, n)`.
pub(crate) fn diagram_index_map(m: u16, n: u16) -> Arc<HashMap<TLDiagram, u32>> {
    static CACHE: OnceLock<Mutex<HashMap<(u16, u16), Arc<HashMap<TLDiagram, u32>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(m, n)) {
        return v.clone();
    }
    let map: HashMap<TLDiagram, u32> = enumerate_diagrams(m, n)
        .iter()
        .enumerate()
        .map(|(i, d)| (d.clone(), i as u32))
        .collect();
    let map = Arc::new(map);
    cache.lock().unwrap().insert((m, n), map.clone());
    map
}

/// Composition results `TL(l,m) x TL(m,n) -> TL(l,n)` by index, flattened
/// row-major: entry `i * |TL(m,n)| + j` is `(index of [D_i ∘ E_j], loops)`.
pub(crate) struct ComposeTable {
    pub right_len: usize,
    pub data: Vec<(u32, u8)>,
}

impl ComposeTable {
    pub fn get(&self, i: u32, j: u32) -> (u32, u8) {
        self.data[i as usize * self.right_len + j as usize]
    }
}

pub(crate) fn compose_table(l: u16, m: u16, n: u16) -> Arc<ComposeTable> {
    static CACHE: OnceLock<Mutex<HashMap<(u16, u16, u16), Arc<ComposeTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&(l, m, n)) {
        return v.clone();
    }
    let lefts = enumerate_diagrams(l, m);
    let rights = enumerate_diagrams(m, n);
    let targets = diagram_index_map(l, n);
    let mut data = Vec::with_capacity(lefts.len() * rights.len());
    for d in lefts.iter() {
        for e in rights.iter() {
            let res = d.compose(e).expect("sizes match by construction");
            let idx = targets[&res.diagram];
            data.push((idx, res.loops as u8));
        }
    }
    let table = Arc::new(ComposeTable {
        right_len: rights.len(),
        data,
    });
    cache.lock().unwrap().insert((l, m, n), table.clone());
    table
}

/// Catalan number `C_k`.
pub fn catalan(k: u32) -> u128 {
    let mut c: u128 = 1;
    for i in 0..k as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}
