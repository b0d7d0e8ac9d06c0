//! Exact computational homological algebra for Temperley-Lieb diagram algebras.
//!
//! The crate is organised around a handful of layers:
//!
//! * [`diagrams`] — the combinatorics of planar `(m,n)`-diagrams: enumeration,
//!   composition with loop counting, named diagrams and reflections.
//! * [`exactlin`] — exact coefficients (`Z`, `Q`, `F_p`) and sparse exact
//!   linear algebra: Smith normal form, ranks, and homology of a two-map
//!   segment.
//! * [`chaincore`] — bigraded chain complexes with explicit labelled bases,
//!   `d∘d = 0` checking, homology tables and totalisation.
//! * [`loops`] — the differential graded algebra of planar loops `L(2n;R,a)`
//!   and its modules, with the element `Φ`, weight grading, hook maps and
//!   diagram involutions.
//! * [`model`] — the small model `M(2n;R,a)`, Massey products, the coalgebra
//!   `C_n` with its cobar identification, and the mod-2 Bockstein.
//! * [`cupcx`] — cell modules, the complexes of innermost/submaximal/outermost
//!   cups, lifted face maps, and the derived complexes with their
//!   acyclicity certificates.
//! * [`torext`] — bar complexes computing Tor over `TL_{2n}`, and the Ext
//!   route over the truncated polynomial algebra `R[y]/(y^{n+1})`.

pub mod cache;
pub mod chaincore;
pub mod cupcx;
pub mod diagrams;
pub mod exactlin;
pub mod loops;
pub mod model;
pub mod series;
pub mod torext;

pub use chaincore::{BasisIndexedComplex, HomologyTable, Weight};
pub use diagrams::{CompositionResult, Node, Side, TLDiagram};
pub use exactlin::{CoeffRing, HomologySummary, RingKind, Scalar, SparseMatrix};
