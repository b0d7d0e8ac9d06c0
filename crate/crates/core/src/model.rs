//! The small model `M(2n;R,a)`: the tensor algebra on generators
//! `x_1, x_3, ..., x_{2n-1}` with `|x_{2i-1}| = (2i-1, i)`,
//! `d(x_1) = a` and `d(x_{2i-1}) = Σ_{j+k=i} C(i,j) x_{2j-1} x_{2k-1}`,
//! extended by the graded Leibniz rule.
//!
//! Also here: Massey products in the bigraded sense, the coalgebra `C_n`
//! whose cobar complex reproduces the model, and the mod-2 Bockstein
//! derivation for `2n = 4`.

use crate::chaincore::{BasisIndexedComplex, HomologyTable, Weight};
use crate::exactlin::{CoeffRing, RingKind, Scalar, SparseMatrix};
use num::bigint::BigInt;
use num::{One, Zero};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error(transparent)]
    Chain(#[from] crate::chaincore::ChainError),
    #[error("generator x_{0} does not exist in M({1})")]
    MissingGenerator(u32, u16),
    #[error("{0}! is not invertible in {1}")]
    FactorialNotInvertible(u64, String),
    #[error("defining system violates its condition at entry ({0},{1})")]
    SystemCondition(u32, u32),
    #[error("defining system entry ({0},{1}) is missing")]
    SystemMissing(u32, u32),
    #[error("cobar complex disagrees with the model at {0}")]
    CobarMismatch(String),
    #[error("{0}")]
    Invalid(String),
}

/// A word in the generators; letter `j` stands for `x_{2j-1}`, `1 <= j <= n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TensorWord(pub Vec<u8>);

impl TensorWord {
    pub fn empty() -> Self {
        TensorWord(Vec::new())
    }

    pub fn single(j: u8) -> Self {
        TensorWord(vec![j])
    }

    /// `(homological degree, weight) = (Σ (2j-1), Σ j)`; the word length is
    /// `2w - d`.
    pub fn bidegree(&self) -> (u32, u32) {
        let w: u32 = self.0.iter().map(|&j| j as u32).sum();
        let d = 2 * w - self.0.len() as u32;
        (d, w)
    }

    pub fn label(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|j| format!("x{}", 2 * j - 1))
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// A linear combination of tensor words over the coefficient ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModelElement {
    pub ring: CoeffRing,
    pub n: u16,
    pub terms: BTreeMap<TensorWord, Scalar>,
}

impl ModelElement {
    pub fn zero(ring: CoeffRing, n: u16) -> Self {
        ModelElement {
            ring,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_word(ring: CoeffRing, n: u16, w: TensorWord) -> Self {
        let mut e = Self::zero(ring, n);
        let one = e.ring.one();
        e.add_term(w, one);
        e
    }

    pub fn generator(ring: CoeffRing, n: u16, j: u8) -> Result<Self, ModelError> {
        if j == 0 || j as u16 > n {
            return Err(ModelError::MissingGenerator(2 * j as u32 - 1, 2 * n));
        }
        Ok(Self::from_word(ring, n, TensorWord::single(j)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: TensorWord, c: Scalar) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(cur) => {
                *cur = self.ring.add(cur, &c);
                if self.ring.is_zero(cur) {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add(&self, other: &ModelElement) -> ModelElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> ModelElement {
        let mut out = ModelElement::zero(self.ring.clone(), self.n);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), self.ring.mul(v, c));
        }
        out
    }

    pub fn negate(&self) -> ModelElement {
        self.scale(&self.ring.from_int(-1))
    }

    pub fn multiply(&self, other: &ModelElement) -> ModelElement {
        let mut out = ModelElement::zero(self.ring.clone(), self.n);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let mut w = w1.0.clone();
                w.extend_from_slice(&w2.0);
                out.add_term(TensorWord(w), self.ring.mul(c1, c2));
            }
        }
        out
    }

    /// Bidegree when homogeneous.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys().map(TensorWord::bidegree);
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// `(-1)^{deg+1} x`, May's bar involution.
    pub fn bar(&self) -> ModelElement {
        let mut out = ModelElement::zero(self.ring.clone(), self.n);
        for (w, c) in &self.terms {
            let (d, _) = w.bidegree();
            let c = if (d + 1) % 2 == 1 {
                self.ring.neg(c)
            } else {
                c.clone()
            };
            out.add_term(w.clone(), c);
        }
        out
    }
}

fn binomial(i: u32, j: u32) -> BigInt {
    let mut c = BigInt::one();
    for t in 0..j {
        c = c * BigInt::from(i - t) / BigInt::from(t + 1);
    }
    c
}

/// `d` on the generator `x_{2j-1}`: `a` for `j = 1`, otherwise
/// `Σ_{p+q=j, p,q>0} C(j,p) x_{2p-1} x_{2q-1}`.
fn generator_differential(ring: &CoeffRing, n: u16, j: u8) -> ModelElement {
    let mut out = ModelElement::zero(ring.clone(), n);
    if j == 1 {
        out.add_term(TensorWord::empty(), ring.parameter().clone());
        return out;
    }
    for p in 1..j as u32 {
        let q = j as u32 - p;
        let coeff = ring.from_bigint(&binomial(j as u32, p));
        out.add_term(TensorWord(vec![p as u8, q as u8]), coeff);
    }
    out
}

/// The differential of the model, extended over words by the graded Leibniz
/// rule with Koszul sign `(-1)^{degree of the left prefix}`.
pub fn model_d(x: &ModelElement) -> ModelElement {
    let ring = &x.ring;
    let mut out = ModelElement::zero(ring.clone(), x.n);
    for (w, c) in &x.terms {
        let mut prefix_degree = 0u32;
        for (t, &j) in w.0.iter().enumerate() {
            let dj = generator_differential(ring, x.n, j);
            let sign = prefix_degree % 2 == 1;
            for (dw, dc) in &dj.terms {
                let mut word = Vec::with_capacity(w.0.len() + 1);
                word.extend_from_slice(&w.0[..t]);
                word.extend_from_slice(&dw.0);
                word.extend_from_slice(&w.0[t + 1..]);
                let mut coeff = ring.mul(c, dc);
                if sign {
                    coeff = ring.neg(&coeff);
                }
                out.add_term(TensorWord(word), coeff);
            }
            prefix_degree += 2 * j as u32 - 1;
        }
    }
    out
}

/// All words of bidegree `(d, w)`: compositions of `w` into `2w - d` parts
/// of size at most `n`.
pub fn model_basis(n: u16, d: u32, w: u32) -> Vec<TensorWord> {
    let mut out = Vec::new();
    if 2 * w < d {
        return out;
    }
    let len = (2 * w - d) as usize;
    if w == 0 {
        if len == 0 {
            out.push(TensorWord::empty());
        }
        return out;
    }
    if len == 0 {
        return out;
    }
    let mut word = Vec::with_capacity(len);
    fn rec(n: u16, remaining: u32, slots: usize, word: &mut Vec<u8>, out: &mut Vec<TensorWord>) {
        if slots == 0 {
            if remaining == 0 {
                out.push(TensorWord(word.clone()));
            }
            return;
        }
        let max = (n as u32).min(remaining.saturating_sub(slots as u32 - 1));
        for j in 1..=max {
            word.push(j as u8);
            rec(n, remaining - j, slots - 1, word, out);
            word.pop();
        }
    }
    rec(n, w, len, &mut word, &mut out);
    out.sort();
    out
}

/// All words of homological degree `d` regardless of weight.
pub fn words_of_degree(n: u16, d: u32) -> Vec<TensorWord> {
    // d = Σ (2j-1): weights range over compatible values
    let mut out = Vec::new();
    let w_min = d.div_ceil(2);
    for w in w_min..=d.max(1) {
        if 2 * w < d {
            continue;
        }
        out.extend(model_basis(n, d, w));
    }
    if d == 0 {
        out.push(TensorWord::empty());
    }
    out.sort();
    out.dedup();
    out
}

/// Build `M(2n;R,a)` through homological degree `d_max`, blocked by weight
/// exactly when the parameter vanishes.
pub fn build_model_complex(
    ring: &CoeffRing,
    n: u16,
    d_max: u32,
) -> Result<BasisIndexedComplex, ModelError> {
    let graded = ring.is_graded();
    let name = format!("model(2n={}; {}, a={})", 2 * n, ring.kind(), ring.parameter());
    let mut complex = BasisIndexedComplex::new(ring.clone(), name, true);
    let mut index: BTreeMap<(u32, Weight), BTreeMap<TensorWord, u32>> = BTreeMap::new();
    for d in 0..=d_max {
        let mut blocks: BTreeMap<Weight, Vec<TensorWord>> = BTreeMap::new();
        for word in words_of_degree(n, d) {
            let w = if graded {
                Weight::W(word.bidegree().1)
            } else {
                Weight::All
            };
            blocks.entry(w).or_default().push(word);
        }
        for (w, words) in blocks {
            let map: BTreeMap<TensorWord, u32> = words
                .iter()
                .enumerate()
                .map(|(i, word)| (word.clone(), i as u32))
                .collect();
            complex.add_block(d, w, words.iter().map(TensorWord::label).collect());
            index.insert((d, w), map);
        }
    }
    for d in 1..=d_max {
        let keys: Vec<(u32, Weight)> = index
            .keys()
            .filter(|(deg, _)| *deg == d)
            .copied()
            .collect();
        for (_, w) in keys {
            let words: Vec<TensorWord> = index[&(d, w)].keys().cloned().collect();
            let mut triplets = Vec::new();
            for (col, word) in words.iter().enumerate() {
                let dx = model_d(&ModelElement::from_word(ring.clone(), n, word.clone()));
                for (target, coeff) in &dx.terms {
                    let tw = if graded {
                        Weight::W(target.bidegree().1)
                    } else {
                        Weight::All
                    };
                    debug_assert!(!graded || tw == w, "the differential preserves weight");
                    let row = index[&(d - 1, tw)][target];
                    triplets.push((row as usize, col, coeff.clone()));
                }
            }
            let rows = complex.dim(d - 1, w);
            let m = SparseMatrix::from_triplets(rows, words.len(), triplets, ring);
            complex.set_diff(d, w, m)?;
        }
    }
    Ok(complex)
}

/// The distinguished cycle `z_0 = Σ_{j+k=n+1} C(n+1,j) x_{2j-1} x_{2k-1}` in
/// bidegree `(2n, n+1)`.
pub fn z0(ring: &CoeffRing, n: u16) -> ModelElement {
    let mut out = ModelElement::zero(ring.clone(), n);
    for j in 1..=n as u32 {
        let k = n as u32 + 1 - j;
        out.add_term(
            TensorWord(vec![j as u8, k as u8]),
            ring.from_bigint(&binomial(n as u32 + 1, j)),
        );
    }
    out
}

/// Project onto the quotient by the right ideal of the subalgebra on
/// `x_1..x_{2n-3}`: keep the empty word and words ending in `x_{2n-1}`.
fn quotient_project(x: &ModelElement) -> ModelElement {
    let n = x.n;
    let mut out = ModelElement::zero(x.ring.clone(), n);
    for (w, c) in &x.terms {
        if w.0.is_empty() || *w.0.last().unwrap() as u16 == n {
            out.add_term(w.clone(), c.clone());
        }
    }
    out
}

/// In the quotient of `M(2n)` by the previous model's augmentation ideal the
/// class of `z_0` in bidegree `(2n, n+1)` is `(n+1) · x_1 x_{2n-1}`.
/// Verifies that the quotient block has no incoming differential, that the
/// induced differential kills `x_1 x_{2n-1}`, and returns the multiplier.
pub fn detect_z0_in_quotient(n: u16) -> Result<BigInt, ModelError> {
    let ring = CoeffRing::integers(0);
    let d = 2 * n as u32;
    let w = n as u32 + 1;
    // basis of the quotient in bidegree (2n, n+1): words of length 2 ending
    // in x_{2n-1}
    let block: Vec<TensorWord> = model_basis(n, d, w)
        .into_iter()
        .filter(|word| !word.0.is_empty() && *word.0.last().unwrap() as u16 == n)
        .collect();
    if block != vec![TensorWord(vec![1, n as u8])] {
        return Err(ModelError::Invalid(format!(
            "unexpected quotient basis in bidegree ({d},{w}): {block:?}"
        )));
    }
    // no incoming differential: bidegree (2n+1, n+1) has word length 1 and no
    // generator of that degree
    if !model_basis(n, d + 1, w).is_empty() {
        return Err(ModelError::Invalid(
            "unexpected incoming chains in the quotient".into(),
        ));
    }
    // induced differential vanishes on the block
    let gen = ModelElement::from_word(ring.clone(), n, TensorWord(vec![1, n as u8]));
    if !quotient_project(&model_d(&gen)).is_zero() {
        return Err(ModelError::Invalid(
            "induced quotient differential does not vanish".into(),
        ));
    }
    // the class of z_0
    let image = quotient_project(&z0(&ring, n));
    let mut terms = image.terms.iter();
    match (terms.next(), terms.next()) {
        (Some((word, coeff)), None) if word == &TensorWord(vec![1, n as u8]) => match coeff {
            Scalar::Int(v) => Ok(v.clone()),
            _ => unreachable!("integer ring"),
        },
        _ => Err(ModelError::Invalid(format!(
            "projection of z_0 is not a multiple of x1.x{}",
            2 * n - 1
        ))),
    }
}

// --- Massey products --------------------------------------------------------

/// A defining system for `⟨ζ_1, ..., ζ_i⟩`: entries `a_{j,k}` for
/// `0 <= j < k <= i`, `(j,k) != (0,i)`.
pub type DefiningSystem = BTreeMap<(u32, u32), ModelElement>;

/// Outcome of the iterated Massey power `⟨Φ, ..., Φ⟩`.
#[derive(Debug)]
pub enum MasseyOutcome {
    /// Strictly and uniquely defined, with its single element.
    Defined {
        element: ModelElement,
        system: DefiningSystem,
    },
    /// The required generator `x_{2(i-1)-1}` does not exist.
    MissingGenerator { needed: u32 },
    /// `(i-1)!` is not invertible, so the canonical system cannot be formed.
    FactorialObstruction { factorial: u64 },
}

/// The `i`-fold Massey power `⟨Φ, Φ, ..., Φ⟩` in `M(2n;R,0)`, via the unique
/// defining system `a_{j,k} = x_{2(k-j)-1} / (k-j)!`.
pub fn massey_power(ring: &CoeffRing, n: u16, arity: u32) -> Result<MasseyOutcome, ModelError> {
    if arity < 3 {
        return Err(ModelError::Invalid("Massey products need arity >= 3".into()));
    }
    if arity > n as u32 + 1 {
        return Ok(MasseyOutcome::MissingGenerator {
            needed: 2 * (arity - 1) - 1,
        });
    }
    if !ring.factorial_invertible(arity as u64 - 1) {
        return Ok(MasseyOutcome::FactorialObstruction {
            factorial: arity as u64 - 1,
        });
    }
    let mut factorial = ring.one();
    let mut inv_factorials = vec![ring.one()];
    for t in 1..arity {
        factorial = ring.mul(&factorial, &ring.from_int(t as i64));
        let inv = ring
            .inv(&factorial)
            .ok_or(ModelError::FactorialNotInvertible(t as u64, format!("{}", ring.kind())))?;
        inv_factorials.push(inv);
    }
    let mut system: DefiningSystem = BTreeMap::new();
    for j in 0..=arity {
        for k in (j + 1)..=arity {
            if (j, k) == (0, arity) {
                continue;
            }
            let t = (k - j) as usize;
            let x = ModelElement::generator(ring.clone(), n, t as u8)?;
            system.insert((j, k), x.scale(&inv_factorials[t]));
        }
    }
    let phi = ModelElement::generator(ring.clone(), n, 1)?;
    let classes = vec![phi; arity as usize];
    let element = massey_general(&classes, &system)?;
    Ok(MasseyOutcome::Defined { element, system })
}

/// Evaluate a general (bigraded) Massey product from an explicit defining
/// system: checks that each `a_{j,j+1}` is a cycle representing `ζ_{j+1}`,
/// that `d(a_{j,k}) = Σ_l ā_{j,l} a_{l,k}` for `k >= j+2`, and returns
/// `Σ_l ā_{0,l} a_{l,i}`, whose bidegree must be
/// `((i-2) + Σ d_j, Σ w_j)`.
pub fn massey_general(
    classes: &[ModelElement],
    system: &DefiningSystem,
) -> Result<ModelElement, ModelError> {
    let i = classes.len() as u32;
    if i < 2 {
        return Err(ModelError::Invalid("need at least two classes".into()));
    }
    let ring = classes[0].ring.clone();
    let n = classes[0].n;
    let entry = |j: u32, k: u32| -> Result<&ModelElement, ModelError> {
        system.get(&(j, k)).ok_or(ModelError::SystemMissing(j, k))
    };
    for j in 0..i {
        let a = entry(j, j + 1)?;
        if a != &classes[j as usize] || !model_d(a).is_zero() {
            return Err(ModelError::SystemCondition(j, j + 1));
        }
    }
    for j in 0..=i {
        for k in (j + 2)..=i {
            if (j, k) == (0, i) {
                continue;
            }
            let mut rhs = ModelElement::zero(ring.clone(), n);
            for l in (j + 1)..k {
                rhs = rhs.add(&entry(j, l)?.bar().multiply(entry(l, k)?));
            }
            if model_d(entry(j, k)?) != rhs {
                return Err(ModelError::SystemCondition(j, k));
            }
        }
    }
    let mut product = ModelElement::zero(ring, n);
    for l in 1..i {
        product = product.add(&entry(0, l)?.bar().multiply(entry(l, i)?));
    }
    // bigraded convention: |⟨ζ_1,...,ζ_i⟩| = ((i-2) + Σ d_j, Σ w_j)
    if !product.is_zero() {
        let (d, w) = product
            .bidegree()
            .ok_or_else(|| ModelError::Invalid("product not homogeneous".into()))?;
        let expected_d: u32 = i - 2
            + classes
                .iter()
                .map(|c| c.bidegree().map(|(d, _)| d).unwrap_or(0))
                .sum::<u32>();
        let expected_w: u32 = classes
            .iter()
            .map(|c| c.bidegree().map(|(_, w)| w).unwrap_or(0))
            .sum();
        if (d, w) != (expected_d, expected_w) {
            return Err(ModelError::Invalid(format!(
                "product has bidegree ({d},{w}), expected ({expected_d},{expected_w})"
            )));
        }
    }
    Ok(product)
}

// --- the coalgebra C_n and its cobar complex --------------------------------

/// The coalgebra `C_n` on `{1, x_1, x_3, ..., x_{2n-1}}` with
/// `ψ(x_{2i-1}) = Σ_{j+k=i} C(i,j) x_{2j-1} ⊗ x_{2k-1}` (indices `j, k >= 0`,
/// reading `x_{-1}` as `1`), counit dual to `1`, and the evident
/// coaugmentation. Its graded linear dual is the truncated divided power
/// algebra on one generator.
pub struct CnCoalgebra {
    pub n: u16,
}

impl CnCoalgebra {
    pub fn new(n: u16) -> Self {
        CnCoalgebra { n }
    }

    /// Full coproduct of `x_{2i-1}` as `(j, k, coefficient)` triples, where
    /// index 0 stands for the unit.
    pub fn coproduct(&self, i: u32) -> Vec<(u32, u32, BigInt)> {
        (0..=i)
            .map(|j| (j, i - j, binomial(i, j)))
            .collect()
    }

    /// Reduced coproduct: both tensor factors in the coaugmentation coideal.
    pub fn reduced_coproduct(&self, i: u32) -> Vec<(u32, u32, BigInt)> {
        self.coproduct(i)
            .into_iter()
            .filter(|(j, k, _)| *j > 0 && *k > 0)
            .collect()
    }

    /// `(ψ ⊗ id) ψ = (id ⊗ ψ) ψ` on every basis element.
    pub fn is_coassociative(&self) -> bool {
        for i in 1..=self.n as u32 {
            let mut left: BTreeMap<(u32, u32, u32), BigInt> = BTreeMap::new();
            let mut right: BTreeMap<(u32, u32, u32), BigInt> = BTreeMap::new();
            for (j, k, c) in self.coproduct(i) {
                for (a, b, c2) in self.coproduct(j) {
                    *left.entry((a, b, k)).or_default() += &c * c2;
                }
                for (a, b, c2) in self.coproduct(k) {
                    *right.entry((j, a, b)).or_default() += &c * c2;
                }
            }
            left.retain(|_, v| !v.is_zero());
            right.retain(|_, v| !v.is_zero());
            if left != right {
                return false;
            }
        }
        true
    }

    /// `(ε ⊗ id) ψ = id = (id ⊗ ε) ψ`.
    pub fn counit_laws_hold(&self) -> bool {
        for i in 1..=self.n as u32 {
            let slots = self.coproduct(i);
            let left: Vec<_> = slots
                .iter()
                .filter(|(j, _, _)| *j == 0)
                .collect();
            let right: Vec<_> = slots
                .iter()
                .filter(|(_, k, _)| *k == 0)
                .collect();
            let ok = |v: &Vec<&(u32, u32, BigInt)>, pick_mid: fn(&(u32, u32, BigInt)) -> u32| {
                v.len() == 1 && pick_mid(v[0]) == i && v[0].2.is_one()
            };
            if !ok(&left, |t| t.1) || !ok(&right, |t| t.0) {
                return false;
            }
        }
        true
    }
}

/// The cobar complex `Cobar(R, C_n, R)` through homological degree `d_max`,
/// built directly from the reduced coproduct with the standard suspension
/// signs: the generator dual to `x_{2i-1}` sits in bidegree `(2i-1, i)` and
/// its differential is `Σ (-1)^{|x_{2j-1}|} x_{2j-1} ⊗ x_{2k-1}` inserted
/// with the sign of the preceding suspended factors.
pub fn cobar_complex(
    ring: &CoeffRing,
    n: u16,
    d_max: u32,
) -> Result<BasisIndexedComplex, ModelError> {
    if !ring.is_graded() {
        return Err(ModelError::Invalid(
            "the cobar complex is the model at parameter zero".into(),
        ));
    }
    let coalgebra = CnCoalgebra::new(n);
    let graded = true;
    let name = format!("cobar(C_{n}; {})", ring.kind());
    let mut complex = BasisIndexedComplex::new(ring.clone(), name, true);
    let mut index: BTreeMap<(u32, Weight), BTreeMap<TensorWord, u32>> = BTreeMap::new();
    for d in 0..=d_max {
        let mut blocks: BTreeMap<Weight, Vec<TensorWord>> = BTreeMap::new();
        for word in words_of_degree(n, d) {
            blocks
                .entry(Weight::W(word.bidegree().1))
                .or_default()
                .push(word);
        }
        for (w, words) in blocks {
            let map = words
                .iter()
                .enumerate()
                .map(|(i, word)| (word.clone(), i as u32))
                .collect();
            complex.add_block(d, w, words.iter().map(TensorWord::label).collect());
            index.insert((d, w), map);
        }
    }
    let _ = graded;
    for d in 1..=d_max {
        let keys: Vec<(u32, Weight)> = index
            .keys()
            .filter(|(deg, _)| *deg == d)
            .copied()
            .collect();
        for (_, w) in keys {
            let words: Vec<TensorWord> = index[&(d, w)].keys().cloned().collect();
            let mut triplets = Vec::new();
            for (col, word) in words.iter().enumerate() {
                // cobar differential: replace one letter by its reduced
                // coproduct; each internal degree in C_n is even, so the
                // only signs come from the odd suspended prefix degrees
                let mut prefix_degree = 0u32;
                for (t, &letter) in word.0.iter().enumerate() {
                    for (j, k, c) in coalgebra.reduced_coproduct(letter as u32) {
                        let mut new_word = Vec::with_capacity(word.0.len() + 1);
                        new_word.extend_from_slice(&word.0[..t]);
                        new_word.push(j as u8);
                        new_word.push(k as u8);
                        new_word.extend_from_slice(&word.0[t + 1..]);
                        let target = TensorWord(new_word);
                        let mut coeff = ring.from_bigint(&c);
                        if prefix_degree % 2 == 1 {
                            coeff = ring.neg(&coeff);
                        }
                        if ring.is_zero(&coeff) {
                            continue;
                        }
                        let tw = Weight::W(target.bidegree().1);
                        let row = index[&(d - 1, tw)][&target];
                        triplets.push((row as usize, col, coeff));
                    }
                    prefix_degree += 2 * letter as u32 - 1;
                }
            }
            let rows = complex.dim(d - 1, w);
            let m = SparseMatrix::from_triplets(rows, words.len(), triplets, ring);
            complex.set_diff(d, w, m)?;
        }
    }
    Ok(complex)
}

/// Term-by-term comparison of the cobar complex with the model: identical
/// block labels and identical differential matrices. A structural self-test;
/// any mismatch is a hard failure.
pub fn cobar_matches_model(ring: &CoeffRing, n: u16, d_max: u32) -> Result<(), ModelError> {
    let cobar = cobar_complex(ring, n, d_max)?;
    let model = build_model_complex(ring, n, d_max)?;
    let keys_c: Vec<_> = cobar.block_keys().collect();
    let keys_m: Vec<_> = model.block_keys().collect();
    if keys_c != keys_m {
        return Err(ModelError::CobarMismatch("block structure".into()));
    }
    for (q, w) in keys_c {
        if cobar.labels(q, w) != model.labels(q, w) {
            return Err(ModelError::CobarMismatch(format!("basis at ({q},{w})")));
        }
        if cobar.diff_or_zero(q, w) != model.diff_or_zero(q, w) {
            return Err(ModelError::CobarMismatch(format!("differential at ({q},{w})")));
        }
    }
    Ok(())
}

// --- the mod-2 Bockstein for 2n = 4 ------------------------------------------

/// `β` on `T_{F_2}[x_1, x_3]`: the square-zero derivation with `β(x_1) = 0`
/// and `β(x_3) = x_1^2`.
pub fn bockstein(x: &ModelElement) -> ModelElement {
    assert_eq!(x.ring.kind(), RingKind::PrimeField(2));
    assert_eq!(x.n, 2);
    let mut out = ModelElement::zero(x.ring.clone(), 2);
    for (w, c) in &x.terms {
        for (t, &letter) in w.0.iter().enumerate() {
            if letter != 2 {
                continue;
            }
            let mut word = Vec::with_capacity(w.0.len() + 1);
            word.extend_from_slice(&w.0[..t]);
            word.extend_from_slice(&[1, 1]);
            word.extend_from_slice(&w.0[t + 1..]);
            out.add_term(TensorWord(word), c.clone());
        }
    }
    out
}

/// Homology of `(T_{F_2}[x_1, x_3], β)` per homological degree.
pub fn bockstein_homology_2n4(d_max: u32) -> Result<HomologyTable, ModelError> {
    let ring = CoeffRing::prime_field(2, 0).expect("2 is prime");
    let name = "bockstein(2n=4; F2)".to_string();
    let mut complex = BasisIndexedComplex::new(ring.clone(), name, true);
    let mut index: BTreeMap<u32, BTreeMap<TensorWord, u32>> = BTreeMap::new();
    for d in 0..=d_max {
        let words = words_of_degree(2, d);
        let map = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        complex.add_block(d, Weight::All, words.iter().map(TensorWord::label).collect());
        index.insert(d, map);
    }
    for d in 1..=d_max {
        let words: Vec<TensorWord> = index[&d].keys().cloned().collect();
        let mut triplets = Vec::new();
        for (col, word) in words.iter().enumerate() {
            let bw = bockstein(&ModelElement::from_word(ring.clone(), 2, word.clone()));
            for (target, coeff) in &bw.terms {
                let row = index[&(d - 1)][target];
                triplets.push((row as usize, col, coeff.clone()));
            }
        }
        let rows = complex.dim(d - 1, Weight::All);
        let m = SparseMatrix::from_triplets(rows, words.len(), triplets, &ring);
        complex.set_diff(d, Weight::All, m)?;
    }
    Ok(complex.homology_table(d_max.saturating_sub(1))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(a: i64) -> CoeffRing {
        CoeffRing::integers(a)
    }

    fn q() -> CoeffRing {
        CoeffRing::rationals(0)
    }

    fn word(js: &[u8]) -> TensorWord {
        TensorWord(js.to_vec())
    }

    fn elt(ring: &CoeffRing, n: u16, terms: &[(&[u8], i64)]) -> ModelElement {
        let mut e = ModelElement::zero(ring.clone(), n);
        for (w, c) in terms {
            e.add_term(word(w), ring.from_int(*c));
        }
        e
    }

    #[test]
    fn generator_differentials() {
        let ring = z(0);
        let d3 = model_d(&ModelElement::generator(ring.clone(), 4, 2).unwrap());
        assert_eq!(d3, elt(&ring, 4, &[(&[1, 1], 2)]));
        let d5 = model_d(&ModelElement::generator(ring.clone(), 4, 3).unwrap());
        assert_eq!(d5, elt(&ring, 4, &[(&[1, 2], 3), (&[2, 1], 3)]));
        let d7 = model_d(&ModelElement::generator(ring.clone(), 4, 4).unwrap());
        assert_eq!(
            d7,
            elt(&ring, 4, &[(&[1, 3], 4), (&[2, 2], 6), (&[3, 1], 4)])
        );
        assert!(model_d(&d7).is_zero(), "d(d(x_7)) = 0");
    }

    #[test]
    fn d_squared_zero_throughout() {
        for n in 1..=5u16 {
            for a in [0i64, 1, 2, 3] {
                let ring = z(a);
                for d in 1..=12u32 {
                    for w in words_of_degree(n, d) {
                        let x = ModelElement::from_word(ring.clone(), n, w);
                        assert!(
                            model_d(&model_d(&x)).is_zero(),
                            "d²=0 fails at n={n}, a={a}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn basis_enumeration() {
        assert_eq!(model_basis(2, 1, 1), vec![word(&[1])]);
        assert_eq!(model_basis(2, 4, 3), vec![word(&[1, 2]), word(&[2, 1])]);
        assert_eq!(model_basis(2, 2, 2), vec![word(&[1, 1])]);
        // dims of M(4) per degree follow 1/(1 - t - t^3)
        let expected = [1usize, 1, 1, 2, 3, 4, 6, 9, 13];
        for (d, e) in expected.iter().enumerate() {
            assert_eq!(words_of_degree(2, d as u32).len(), *e, "degree {d}");
        }
    }

    #[test]
    fn z0_is_a_cycle_of_kernel_rank_one() {
        for n in 1..=5u16 {
            let ring = z(0);
            let cycle = z0(&ring, n);
            assert!(model_d(&cycle).is_zero(), "z_0 is a cycle (n={n})");
            // the integer kernel in bidegree (2n, n+1) has rank exactly 1
            let d = 2 * n as u32;
            let w = n as u32 + 1;
            let basis = model_basis(n, d, w);
            let target = model_basis(n, d - 1, w);
            let target_idx: BTreeMap<&TensorWord, usize> =
                target.iter().enumerate().map(|(i, t)| (t, i)).collect();
            let mut triplets = Vec::new();
            for (col, bword) in basis.iter().enumerate() {
                let dx = model_d(&ModelElement::from_word(ring.clone(), n, bword.clone()));
                for (t, c) in &dx.terms {
                    triplets.push((target_idx[t], col, c.clone()));
                }
            }
            let m = SparseMatrix::from_triplets(target.len(), basis.len(), triplets, &ring);
            let rank = crate::exactlin::rank_over_integers(&m).unwrap();
            assert_eq!(basis.len() - rank, 1, "kernel rank 1 at n={n}");
        }
    }

    #[test]
    fn z0_detection_in_quotient() {
        for n in [2u16, 3] {
            let mult = detect_z0_in_quotient(n).unwrap();
            assert_eq!(mult, BigInt::from(n + 1), "n={n}");
        }
    }

    #[test]
    fn model_homology_small() {
        // M(2;Z,0): one generator, zero differential
        let c = build_model_complex(&z(0), 1, 12).unwrap();
        assert!(c.check_d_squared().passed());
        let t = c.homology_table(11).unwrap();
        for d in 0..=11u32 {
            let s = t.degree_summary(d);
            assert_eq!((s.free_rank, s.torsion.len()), (1, 0), "degree {d}");
        }
        // H_0(M(4;Z,3)) = Z/3
        let c3 = build_model_complex(&z(3), 2, 2).unwrap();
        let t3 = c3.homology_table(1).unwrap();
        let h0 = t3.degree_summary(0);
        assert_eq!(h0.free_rank, 0);
        assert_eq!(h0.torsion, vec![BigInt::from(3)]);
    }

    #[test]
    fn massey_power_examples() {
        // n=2, i=3 over Q: ½ x1x3 + ½ x3x1
        let ring = q();
        let MasseyOutcome::Defined { element, .. } = massey_power(&ring, 2, 3).unwrap() else {
            panic!("expected a defined product");
        };
        let half = ring.inv(&ring.from_int(2)).unwrap();
        let expected = elt(&ring, 2, &[(&[1, 2], 1), (&[2, 1], 1)]).scale(&half);
        assert_eq!(element, expected);

        // n=3, i=4 over Q: (1/4!)(4 x1x5 + 6 x3x3 + 4 x5x1)
        let MasseyOutcome::Defined { element, .. } = massey_power(&ring, 3, 4).unwrap() else {
            panic!("expected a defined product");
        };
        let inv24 = ring.inv(&ring.from_int(24)).unwrap();
        let expected = elt(&ring, 3, &[(&[1, 3], 4), (&[2, 2], 6), (&[3, 1], 4)]).scale(&inv24);
        assert_eq!(element, expected);

        // n=1, i=3: no x_3 to hang the system on
        assert!(matches!(
            massey_power(&ring, 1, 3).unwrap(),
            MasseyOutcome::MissingGenerator { needed: 3 }
        ));
        // over Z the factorial obstructs
        assert!(matches!(
            massey_power(&z(0), 2, 3).unwrap(),
            MasseyOutcome::FactorialObstruction { factorial: 2 }
        ));
    }

    #[test]
    fn massey_general_gamma() {
        // ⟨Φ, 2Φ, Φ⟩ over Z with a_{0,2} = a_{1,3} = x_3 gives γ = x1x3 + x3x1
        let ring = z(0);
        let phi = elt(&ring, 2, &[(&[1], 1)]);
        let classes = vec![phi.clone(), phi.scale(&ring.from_int(2)), phi.clone()];
        let mut system: DefiningSystem = BTreeMap::new();
        system.insert((0, 1), classes[0].clone());
        system.insert((1, 2), classes[1].clone());
        system.insert((2, 3), classes[2].clone());
        system.insert((0, 2), elt(&ring, 2, &[(&[2], 1)]));
        system.insert((1, 3), elt(&ring, 2, &[(&[2], 1)]));
        let gamma = massey_general(&classes, &system).unwrap();
        assert_eq!(gamma, elt(&ring, 2, &[(&[1, 2], 1), (&[2, 1], 1)]));

        // negative control: a system whose (0,2) entry has the wrong boundary
        let mut bad = system.clone();
        bad.insert((0, 2), elt(&ring, 2, &[(&[2], 3)]));
        assert!(matches!(
            massey_general(&classes, &bad),
            Err(ModelError::SystemCondition(0, 2))
        ));
    }

    #[test]
    fn coalgebra_laws_and_cobar_identity() {
        for n in 1..=4u16 {
            let c = CnCoalgebra::new(n);
            assert!(c.is_coassociative(), "C_{n} coassociative");
            assert!(c.counit_laws_hold(), "C_{n} counit");
        }
        // cobar(C_n) is term-by-term the model at parameter zero
        cobar_matches_model(&z(0), 2, 8).unwrap();
        // n=1: polynomial algebra on x_1 with zero differential
        let cb = cobar_complex(&z(0), 1, 6).unwrap();
        for d in 0..=6u32 {
            let dims: usize = cb
                .block_keys()
                .filter(|(q, _)| *q == d)
                .map(|(q, w)| cb.dim(q, w))
                .sum();
            assert_eq!(dims, 1);
            assert!(cb.diff_or_zero(d.max(1), Weight::W(d.max(1))).is_zero_matrix());
        }
    }

    #[test]
    fn bockstein_derivation() {
        let f2 = CoeffRing::prime_field(2, 0).unwrap();
        // β(x3 x3) = x1²x3 + x3x1²
        let x33 = elt(&f2, 2, &[(&[2, 2], 1)]);
        assert_eq!(
            bockstein(&x33),
            elt(&f2, 2, &[(&[1, 1, 2], 1), (&[2, 1, 1], 1)])
        );
        // β² = 0 on all words of degree <= 10
        for d in 0..=10u32 {
            for w in words_of_degree(2, d) {
                let x = ModelElement::from_word(f2.clone(), 2, w);
                assert!(bockstein(&bockstein(&x)).is_zero());
            }
        }
        // homology dims 1,1,0,0,1,1,0,0 in degrees 0..=7
        let table = bockstein_homology_2n4(8).unwrap();
        let expected = [1usize, 1, 0, 0, 1, 1, 0, 0];
        for (d, e) in expected.iter().enumerate() {
            assert_eq!(
                table.degree_summary(d as u32).free_rank,
                *e,
                "βH at degree {d}"
            );
        }
    }
}
