//! The acceptance suite: every headline computation this crate exists for,
//! each criterion printed as a single pass/fail line. All comparisons are
//! exact integer or rational arithmetic.

use num::bigint::BigInt;
use planar_loops::chaincore::{totalize, Weight};
use planar_loops::cupcx::{
    build_inn_complex, build_out_complex, build_derived_inn, cell_basis, close_all_cups,
    derived_out_resolution, lemma81_witness, lifted_face,
};
use planar_loops::diagrams::{
    catalan, enumerate_diagrams, named_diagram, Axis, NamedDiagram, Node, TLDiagram,
};
use planar_loops::exactlin::{CoeffRing, HomologySummary};
use planar_loops::loops::{build_loops_complex, hook, phi, BarVariant, LoopsElement,
    PinnedBasisElement};
use planar_loops::model::{
    self, build_model_complex, cobar_matches_model, massey_general, massey_power, words_of_degree,
    DefiningSystem, MasseyOutcome, ModelElement, TensorWord,
};
use planar_loops::series::NamedSeries;
use planar_loops::torext::{
    ext_table_truncated_poly, tor_f2_dimension, tor_table,
};
use std::sync::Mutex;

/// The two long-running criteria share this lock so their memory use does
/// not stack when the harness runs tests in parallel.
static HEAVY: Mutex<()> = Mutex::new(());

fn z(a: i64) -> CoeffRing {
    CoeffRing::integers(a)
}

fn pass(criterion: u32, what: &str) {
    println!("criterion {criterion}: PASS - {what}");
}

fn series_usize(s: NamedSeries, order: usize) -> Vec<usize> {
    s.coefficients(order)
        .iter()
        .map(|c| c.to_string().parse().unwrap())
        .collect()
}

fn l(i: u16) -> Node {
    Node::left(i)
}

fn r(i: u16) -> Node {
    Node::right(i)
}

#[test]
fn criterion_01_diagram_calculus() {
    for two_n in [2u16, 4, 6, 8] {
        assert_eq!(
            enumerate_diagrams(two_n, two_n).len() as u128,
            catalan(two_n as u32),
            "|TL_{two_n}|"
        );
    }
    // two reference compositions, exactly
    let d1 = TLDiagram::new(
        4,
        4,
        &[(l(3), l(4)), (r(2), r(3)), (l(1), r(1)), (l(2), r(4))],
    )
    .unwrap();
    let d2 = TLDiagram::new(
        4,
        4,
        &[(l(2), l(3)), (l(1), l(4)), (r(1), r(2)), (r(3), r(4))],
    )
    .unwrap();
    let res = d1.compose(&d2).unwrap();
    assert_eq!(res.loops, 1);
    assert_eq!(
        res.diagram,
        TLDiagram::new(
            4,
            4,
            &[(l(1), l(2)), (l(3), l(4)), (r(1), r(2)), (r(3), r(4))]
        )
        .unwrap()
    );
    let e1 = TLDiagram::new(
        2,
        6,
        &[(r(4), r(5)), (r(2), r(3)), (l(1), r(1)), (l(2), r(6))],
    )
    .unwrap();
    let e2 = TLDiagram::new(
        6,
        4,
        &[(l(2), l(3)), (r(2), r(3)), (l(1), l(4)), (l(5), r(1)), (l(6), r(4))],
    )
    .unwrap();
    let res = e1.compose(&e2).unwrap();
    assert_eq!(res.loops, 1);
    assert_eq!(
        res.diagram,
        TLDiagram::new(2, 4, &[(l(1), r(1)), (l(2), r(4)), (r(2), r(3))]).unwrap()
    );
    pass(1, "Catalan counts for 2n <= 8 and both reference compositions");
}

#[test]
fn criterion_02_model_wellformedness() {
    for n in 1..=5u16 {
        for a in [0i64, 1, 2, 3] {
            let ring = z(a);
            for d in 1..=12u32 {
                for w in words_of_degree(n, d) {
                    let x = ModelElement::from_word(ring.clone(), n, w);
                    assert!(
                        model::model_d(&model::model_d(&x)).is_zero(),
                        "d² != 0 at n={n}, a={a}, degree {d}"
                    );
                }
            }
        }
    }
    let r1 = TLDiagram::new(0, 2, &[(r(1), r(2))]).unwrap();
    for two_n in [2u16, 4, 6, 8] {
        let phi_l = named_diagram(NamedDiagram::PhiL { two_n }).unwrap();
        let phi_rp = named_diagram(NamedDiagram::PhiRPrime { two_n }).unwrap();
        let res = phi_l.compose(&phi_rp).unwrap();
        assert_eq!((res.diagram, res.loops), (r1.clone(), 0), "2n={two_n}");
    }
    for n in 1..=3u16 {
        for a in [0i64, 1, 2, 3] {
            let ring = z(a);
            let x = phi(&ring, n).unwrap();
            let expected = LoopsElement::unit(ring.clone(), n).scale(&ring.from_int(a));
            assert_eq!(x.differential(), expected, "d(Φ) = a·∅ at n={n}, a={a}");
        }
    }
    pass(
        2,
        "d∘d = 0 in M(2n;Z,a) (n <= 5, a <= 3, degrees <= 12), the Φ gluing identity, d(Φ) = a·∅",
    );
}

#[test]
fn criterion_03_polynomial_homology_2n2() {
    // directly on the unreduced bar complex through q = 6
    let loops = build_loops_complex(&z(0), 1, 0, 7, BarVariant::Unreduced).unwrap();
    let table = loops.homology_table(6).unwrap();
    for q in 0..=6u32 {
        let s = table.degree_summary(q);
        assert_eq!((s.free_rank, s.torsion.len()), (1, 0), "H_{q}(loops)");
    }
    // and on the model through degree 12
    let m = build_model_complex(&z(0), 1, 13).unwrap();
    let table = m.homology_table(12).unwrap();
    for d in 0..=12u32 {
        let s = table.degree_summary(d);
        assert_eq!((s.free_rank, s.torsion.len()), (1, 0), "H_{d}(model)");
    }
    pass(3, "the 2n=2 homology is Z in every degree (bar complex q <= 6, model d <= 12)");
}

#[test]
fn criterion_04_rational_homology_and_massey() {
    let q_ring = CoeffRing::rationals(0);
    let m4 = build_model_complex(&q_ring, 2, 10).unwrap();
    let t4 = m4.homology_table(9).unwrap();
    for d in 0..=9u32 {
        let expected = usize::from(matches!(d, 0 | 1 | 4 | 5 | 8 | 9));
        assert_eq!(t4.degree_summary(d).free_rank, expected, "H_{d}(M(4;Q,0))");
    }
    let m6 = build_model_complex(&q_ring, 3, 10).unwrap();
    let t6 = m6.homology_table(9).unwrap();
    for d in 0..=9u32 {
        let expected = usize::from(matches!(d, 0 | 1 | 6 | 7));
        assert_eq!(t6.degree_summary(d).free_rank, expected, "H_{d}(M(6;Q,0))");
    }
    // the generators sit in the stated bidegrees
    assert_eq!(t6.get(6, Weight::W(4)).unwrap().summary.free_rank, 1);
    assert_eq!(t6.get(7, Weight::W(5)).unwrap().summary.free_rank, 1);

    let MasseyOutcome::Defined { element, .. } = massey_power(&q_ring, 2, 3).unwrap() else {
        panic!("triple power should be defined");
    };
    let half = q_ring.inv(&q_ring.from_int(2)).unwrap();
    let mut expected = ModelElement::zero(q_ring.clone(), 2);
    expected.add_term(TensorWord(vec![1, 2]), half.clone());
    expected.add_term(TensorWord(vec![2, 1]), half);
    assert_eq!(element, expected, "⟨Φ,Φ,Φ⟩");

    let MasseyOutcome::Defined { element, .. } = massey_power(&q_ring, 3, 4).unwrap() else {
        panic!("fourfold power should be defined");
    };
    let inv24 = q_ring.inv(&q_ring.from_int(24)).unwrap();
    let mut expected = ModelElement::zero(q_ring.clone(), 3);
    for (word, c) in [(vec![1u8, 3u8], 4i64), (vec![2, 2], 6), (vec![3, 1], 4)] {
        expected.add_term(
            TensorWord(word),
            q_ring.mul(&q_ring.from_int(c), &inv24),
        );
    }
    assert_eq!(element, expected, "⟨Φ,Φ,Φ,Φ⟩");
    pass(4, "rational homology of M(4) and M(6) at the stated degrees; both Massey powers");
}

#[test]
fn criterion_05_nonzero_parameter() {
    let m43 = build_model_complex(&z(3), 2, 10).unwrap();
    let t = m43.homology_table(9).unwrap();
    for d in 0..=9u32 {
        let s = t.degree_summary(d);
        if matches!(d, 0 | 4 | 8) {
            assert_eq!((s.free_rank, s.torsion.clone()), (0, vec![BigInt::from(3)]), "H_{d}");
        } else {
            assert!(s.is_trivial(), "H_{d}(M(4;Z,3))");
        }
    }
    let m65 = build_model_complex(&z(5), 3, 8).unwrap();
    let t = m65.homology_table(7).unwrap();
    for d in 0..=7u32 {
        let s = t.degree_summary(d);
        if matches!(d, 0 | 6) {
            assert_eq!((s.free_rank, s.torsion.clone()), (0, vec![BigInt::from(5)]), "H_{d}");
        } else {
            assert!(s.is_trivial(), "H_{d}(M(6;Z,5))");
        }
    }
    pass(5, "H(M(4;Z,3)) = Z/3 at degrees {0,4,8} and H(M(6;Z,5)) = Z/5 at {0,6}, zero elsewhere");
}

#[test]
fn criterion_06_integral_homology_2n4() {
    let ring = z(0);
    let complex = build_model_complex(&ring, 2, 11).unwrap();
    let table = complex.homology_table(10).unwrap();
    let free: Vec<usize> = (0..=10u32).map(|d| table.degree_summary(d).free_rank).collect();
    assert_eq!(free, series_usize(NamedSeries::Free2n4, 10), "free ranks");
    let torsion: Vec<usize> = (0..=10u32)
        .map(|d| table.degree_summary(d).torsion.len())
        .collect();
    assert_eq!(
        torsion,
        series_usize(NamedSeries::Torsion2n4, 10),
        "torsion dimensions"
    );
    for d in 0..=10u32 {
        for f in &table.degree_summary(d).torsion {
            assert_eq!(f, &BigInt::from(2), "all torsion is simple 2-torsion");
        }
    }
    // γ = ⟨Φ, 2Φ, Φ⟩ is the nonzero cycle x1x3 + x3x1
    let phi = ModelElement::generator(ring.clone(), 2, 1).unwrap();
    let classes = vec![phi.clone(), phi.scale(&ring.from_int(2)), phi];
    let x3 = ModelElement::generator(ring.clone(), 2, 2).unwrap();
    let mut system = DefiningSystem::new();
    system.insert((0, 1), classes[0].clone());
    system.insert((1, 2), classes[1].clone());
    system.insert((2, 3), classes[2].clone());
    system.insert((0, 2), x3.clone());
    system.insert((1, 3), x3);
    let gamma = massey_general(&classes, &system).unwrap();
    let mut expected = ModelElement::zero(ring.clone(), 2);
    expected.add_term(TensorWord(vec![1, 2]), ring.one());
    expected.add_term(TensorWord(vec![2, 1]), ring.one());
    assert_eq!(gamma, expected);
    assert!(model::model_d(&gamma).is_zero());
    assert!(!gamma.is_zero());
    pass(6, "integral homology of M(4;Z,0) through degree 10 and γ = ⟨Φ,2Φ,Φ⟩");
}

#[test]
fn criterion_07_model_matches_loops() {
    let _guard = HEAVY.lock().unwrap();
    let ring = z(0);
    // 2n = 2 through q = 6
    let loops2 = build_loops_complex(&ring, 1, 0, 7, BarVariant::Unreduced).unwrap();
    let model2 = build_model_complex(&ring, 1, 7).unwrap();
    let tl = loops2.homology_table(6).unwrap();
    let tm = model2.homology_table(6).unwrap();
    for q in 0..=6u32 {
        for w in 0..=7u32 {
            let a = tl
                .get(q, Weight::W(w))
                .map(|e| e.summary.clone())
                .unwrap_or_else(|| HomologySummary::free(0));
            let b = tm
                .get(q, Weight::W(w))
                .map(|e| e.summary.clone())
                .unwrap_or_else(|| HomologySummary::free(0));
            assert_eq!(a, b, "2n=2 bidegree ({q},{w})");
        }
    }
    // 2n = 4 through q = 4: the expensive block family (degree 5 has
    // ~154k basis elements)
    let loops4 = build_loops_complex(&ring, 2, 0, 5, BarVariant::Unreduced).unwrap();
    let model4 = build_model_complex(&ring, 2, 5).unwrap();
    let tl = loops4.homology_table(4).unwrap();
    let tm = model4.homology_table(4).unwrap();
    for q in 0..=4u32 {
        for w in 0..=10u32 {
            let a = tl
                .get(q, Weight::W(w))
                .map(|e| e.summary.clone())
                .unwrap_or_else(|| HomologySummary::free(0));
            let b = tm
                .get(q, Weight::W(w))
                .map(|e| e.summary.clone())
                .unwrap_or_else(|| HomologySummary::free(0));
            assert_eq!(a, b, "2n=4 bidegree ({q},{w})");
        }
    }
    // and the headline values
    let expect = |q: u32, free: usize, torsion: &[i64]| {
        let s = tl.degree_summary(q);
        assert_eq!(s.free_rank, free, "H_{q} free");
        let t: Vec<BigInt> = torsion.iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(s.torsion, t, "H_{q} torsion");
    };
    expect(0, 1, &[]);
    expect(1, 1, &[]);
    expect(2, 0, &[2]);
    expect(3, 0, &[2]);
    expect(4, 1, &[2]);
    pass(7, "direct bar-complex homology of L(4;Z,0) (q <= 4) and L(2;Z,0) (q <= 6) equals the model per bidegree");
}

#[test]
fn criterion_08_tor_shift() {
    let _guard = HEAVY.lock().unwrap();
    // integral Tor over TL_4(Z,0) in degrees 0..=4
    let t = tor_table(&z(0), 2, 4, BarVariant::Normalized).unwrap();
    let expected = [(1usize, 0usize), (0, 0), (0, 0), (1, 0), (1, 0)];
    for (q, (free, tors)) in expected.iter().enumerate() {
        let s = t.degree_summary(q as u32);
        assert_eq!(
            (s.free_rank, s.torsion.len()),
            (*free, *tors),
            "Tor_{q} over TL_4(Z,0)"
        );
    }
    // dim_F2 Tor_5 agrees with dim H_2(L(4;F_2,0)) = 1
    let f2 = CoeffRing::prime_field(2, 0).unwrap();
    let loops = build_loops_complex(&f2, 2, 0, 3, BarVariant::Unreduced).unwrap();
    let h2: usize = loops
        .homology_table(2)
        .unwrap()
        .degree_summary(2)
        .free_rank;
    assert_eq!(h2, 1, "H_2(L(4;F_2,0))");
    assert_eq!(tor_f2_dimension(2, 5), h2, "Tor_5 over TL_4(F_2,0)");
    // a unit parameter kills positive degrees
    let t1 = tor_table(&z(1), 2, 3, BarVariant::Normalized).unwrap();
    for q in 1..=3u32 {
        assert!(t1.degree_summary(q).is_trivial(), "Tor_{q} over TL_4(Z,1)");
    }
    // mod-2 model dimensions follow 1/(1 - t - t^3)
    let m = build_model_complex(&f2, 2, 9).unwrap();
    let tm = m.homology_table(8).unwrap();
    let dims: Vec<usize> = (0..=8u32).map(|d| tm.degree_summary(d).free_rank).collect();
    assert_eq!(dims, series_usize(NamedSeries::ModelDims2n4, 8));
    pass(8, "Tor over TL_4: [Z,0,0,Z,Z], the mod-2 degree-5 dimension, unit-parameter vanishing, mod-2 model dims");
}

#[test]
fn criterion_09_cup_complex_acyclicity() {
    let ring = z(0);
    for two_n in [2u16, 4, 6, 8] {
        for two_i in (0..=two_n).step_by(2) {
            let c = build_inn_complex(&ring, two_n, two_i, true).unwrap();
            assert!(c.check_d_squared().passed());
            let top = c.top_degree().unwrap();
            let t = c.homology_table(top).unwrap();
            for q in 0..=top {
                assert!(
                    t.degree_summary(q).is_trivial(),
                    "Inn-aug({two_n},{two_i}) at degree {q}"
                );
            }
        }
        let c = build_out_complex(&ring, two_n).unwrap();
        let top = c.top_degree().unwrap();
        let t = c.homology_table(top).unwrap();
        for q in 0..=top {
            assert!(t.degree_summary(q).is_trivial(), "Out({two_n}) at degree {q}");
        }
    }
    // close-all-cups cardinalities
    for two_n in [2u16, 4, 6, 8] {
        for q in 0..=(two_n / 2) {
            let pairs = close_all_cups(two_n, 2 * q).unwrap();
            assert_eq!(
                pairs.len(),
                cell_basis(two_n, 2 * q).len(),
                "close-all-cups is defined on the whole cell basis"
            );
            let images: std::collections::BTreeSet<_> =
                pairs.iter().map(|(_, img)| img.clone()).collect();
            assert_eq!(images.len(), pairs.len(), "and is injective");
        }
    }
    pass(9, "Inn-aug(2n,2i) acyclic for 2n <= 8, Out(2n) acyclic, close-all-cups bijective");
}

#[test]
fn criterion_10_derived_complexes() {
    let ring = z(0);
    // DInn_0(4,2) acyclic through degree 3
    let dinn = build_derived_inn(&ring, 2, 1, 0, 4).unwrap();
    assert!(dinn.check_d_squared().passed());
    let t = dinn.homology_table(3).unwrap();
    for q in 0..=3u32 {
        assert!(t.degree_summary(q).is_trivial(), "DInn_0(4,2) at degree {q}");
    }
    // the totalised derived outermost resolution of R at 2n = 4
    let (columns, maps) = derived_out_resolution(&ring, 2, 4).unwrap();
    let total = totalize(&columns, &maps).unwrap();
    assert!(total.check_d_squared().passed());
    let t = total.homology_table(3).unwrap();
    let h0 = t.degree_summary(0);
    assert_eq!((h0.free_rank, h0.torsion.len()), (1, 0), "H_0 = R");
    for q in 1..=3u32 {
        assert!(t.degree_summary(q).is_trivial(), "total degree {q}");
    }
    // the chain-level boundary identity with coefficients 1, 2, 2
    for (n, i, coeff) in [(2u16, 1u16, 1u16), (2, 2, 2), (3, 2, 2)] {
        let report = lemma81_witness(n, i).unwrap();
        assert_eq!(report.coefficient, coeff);
        assert!(
            report.holds,
            "(n,i)=({n},{i}): {} vs {}",
            report.computed, report.expected
        );
    }
    pass(10, "DInn_0(4,2) acyclic, the derived outermost resolution resolves R, boundary identity coefficients 1,2,2");
}

#[test]
fn criterion_11_independent_routes() {
    // cobar identity for n <= 4, degrees <= 8
    for n in 1..=4u16 {
        cobar_matches_model(&z(0), n, 8).unwrap();
    }
    // Ext bidegrees match model homology over Q for n = 2, 3 through d <= 9
    let q_ring = CoeffRing::rationals(0);
    for n in [2u16, 3] {
        let ext = ext_table_truncated_poly(&q_ring, n, 9).unwrap();
        let m = build_model_complex(&q_ring, n, 10).unwrap();
        let t = m.homology_table(9).unwrap();
        for d in 0..=9u32 {
            for w in 0..=10u32 {
                let rank = t
                    .get(d, Weight::W(w))
                    .map(|e| e.summary.free_rank)
                    .unwrap_or(0);
                let expected = usize::from(ext.bidegrees.contains(&(d, w)));
                assert_eq!(rank, expected, "n={n}, bidegree ({d},{w})");
            }
        }
    }
    // Bockstein dimensions
    let table = model::bockstein_homology_2n4(8).unwrap();
    let dims: Vec<usize> = (0..=7u32).map(|d| table.degree_summary(d).free_rank).collect();
    assert_eq!(dims, vec![1, 1, 0, 0, 1, 1, 0, 0]);
    pass(11, "cobar = model term-by-term (n <= 4), Ext bidegrees = model homology (n = 2,3), Bockstein dims");
}

#[test]
fn criterion_12_property_suites() {
    use rand::prelude::*;
    // 1000 random composition triples, associatively with loop counts
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240811);
    let sizes = [0u16, 2, 4, 6, 8];
    let mut done = 0;
    while done < 1000 {
        let a = *sizes.choose(&mut rng).unwrap();
        let b = *sizes.choose(&mut rng).unwrap();
        let c = *sizes.choose(&mut rng).unwrap();
        let d = *sizes.choose(&mut rng).unwrap();
        let xs = enumerate_diagrams(a, b);
        let ys = enumerate_diagrams(b, c);
        let zs = enumerate_diagrams(c, d);
        if xs.is_empty() || ys.is_empty() || zs.is_empty() {
            continue;
        }
        let x = xs.choose(&mut rng).unwrap();
        let y = ys.choose(&mut rng).unwrap();
        let zz = zs.choose(&mut rng).unwrap();
        let xy = x.compose(y).unwrap();
        let left = xy.diagram.compose(zz).unwrap();
        let yz = y.compose(zz).unwrap();
        let right = x.compose(&yz.diagram).unwrap();
        assert_eq!(left.diagram, right.diagram);
        assert_eq!(xy.loops + left.loops, yz.loops + right.loops);
        done += 1;
    }

    // graded Leibniz through total degree 4 on the 2n = 2 and 2n = 4 dgas
    let ring = z(0);
    for n in [1u16, 2] {
        let elements = |deg: u32| -> Vec<LoopsElement> {
            if deg == 0 {
                return vec![LoopsElement::unit(ring.clone(), n)];
            }
            let first = enumerate_diagrams(0, 2 * n);
            let mid = enumerate_diagrams(2 * n, 2 * n);
            let last = enumerate_diagrams(2 * n, 0);
            let mut out = Vec::new();
            let mut tuple = vec![0usize; deg as usize + 1];
            loop {
                let parts: Vec<TLDiagram> = tuple
                    .iter()
                    .enumerate()
                    .map(|(slot, &idx)| {
                        if slot == 0 {
                            first[idx].clone()
                        } else if slot == deg as usize {
                            last[idx].clone()
                        } else {
                            mid[idx].clone()
                        }
                    })
                    .collect();
                out.push(LoopsElement::from_basis(
                    ring.clone(),
                    n,
                    0,
                    PinnedBasisElement::new(parts),
                ));
                // advance the mixed-radix counter
                let mut slot = tuple.len();
                loop {
                    if slot == 0 {
                        return out;
                    }
                    slot -= 1;
                    let radix = if slot == 0 {
                        first.len()
                    } else if slot == deg as usize {
                        last.len()
                    } else {
                        mid.len()
                    };
                    tuple[slot] += 1;
                    if tuple[slot] < radix {
                        break;
                    }
                    tuple[slot] = 0;
                }
            }
        };
        let limit = if n == 1 { 4 } else { 3 };
        for p in 0..=limit {
            for q in 0..=(limit - p) {
                for x in elements(p) {
                    for y in elements(q) {
                        let lhs = x.multiply(&y).unwrap().differential();
                        let mut rhs = x.differential().multiply(&y).unwrap();
                        let mut xd = x.multiply(&y.differential()).unwrap();
                        if p % 2 == 1 {
                            xd = xd.scale(&ring.from_int(-1));
                        }
                        rhs = rhs.add(&xd).unwrap();
                        assert_eq!(lhs, rhs, "Leibniz at n={n}, |x|={p}, |y|={q}");
                    }
                }
            }
        }
    }

    // hook map: chain map, weight-preserving, injective, L(2) -> L(4)
    // through degree 3
    {
        let first = enumerate_diagrams(0, 2);
        let mid = enumerate_diagrams(2, 2);
        let last = enumerate_diagrams(2, 0);
        for deg in 1..=3usize {
            let mut images = std::collections::BTreeSet::new();
            let mut count = 0usize;
            let mut tuple = vec![0usize; deg + 1];
            'outer: loop {
                let parts: Vec<TLDiagram> = tuple
                    .iter()
                    .enumerate()
                    .map(|(slot, &idx)| {
                        if slot == 0 {
                            first[idx].clone()
                        } else if slot == deg {
                            last[idx].clone()
                        } else {
                            mid[idx].clone()
                        }
                    })
                    .collect();
                let b = PinnedBasisElement::new(parts);
                let x = LoopsElement::from_basis(ring.clone(), 1, 0, b.clone());
                let hx = hook(&x).unwrap();
                let hb = hx.terms.keys().next().unwrap().clone();
                assert_eq!(hb.weight(0), b.weight(0), "hook preserves weight");
                assert_eq!(
                    hook(&x.differential()).unwrap(),
                    hx.differential(),
                    "hook is a chain map"
                );
                images.insert(hb);
                count += 1;
                let mut slot = tuple.len();
                loop {
                    if slot == 0 {
                        break 'outer;
                    }
                    slot -= 1;
                    let radix = if slot == 0 {
                        first.len()
                    } else if slot == deg {
                        last.len()
                    } else {
                        mid.len()
                    };
                    tuple[slot] += 1;
                    if tuple[slot] < radix {
                        break;
                    }
                    tuple[slot] = 0;
                }
            }
            assert_eq!(images.len(), count, "hook injective in degree {deg}");
        }
    }

    // involutions are chain maps on L(4;Z,0) through degree 3
    {
        let first = enumerate_diagrams(0, 4);
        let mid = enumerate_diagrams(4, 4);
        let last = enumerate_diagrams(4, 0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for deg in 1..=3usize {
            // degree 3 has 784 elements; sample for speed, exhaust low degrees
            let samples = if deg < 3 { usize::MAX } else { 200 };
            let mut seen = 0usize;
            let mut tuple = vec![0usize; deg + 1];
            'outer2: loop {
                let skip = samples != usize::MAX && rng.gen_range(0..4) != 0;
                if !skip {
                    let parts: Vec<TLDiagram> = tuple
                        .iter()
                        .enumerate()
                        .map(|(slot, &idx)| {
                            if slot == 0 {
                                first[idx].clone()
                            } else if slot == deg {
                                last[idx].clone()
                            } else {
                                mid[idx].clone()
                            }
                        })
                        .collect();
                    let x = LoopsElement::from_basis(
                        ring.clone(),
                        2,
                        0,
                        PinnedBasisElement::new(parts),
                    );
                    for axis in [Axis::TopBottom, Axis::LeftRight] {
                        let ix = x.involution(axis).unwrap();
                        assert_eq!(ix.involution(axis).unwrap(), x, "involution");
                        assert_eq!(
                            ix.differential(),
                            x.differential().involution(axis).unwrap(),
                            "chain map ({axis:?})"
                        );
                    }
                    seen += 1;
                    if seen >= samples {
                        break 'outer2;
                    }
                }
                let mut slot = tuple.len();
                loop {
                    if slot == 0 {
                        break 'outer2;
                    }
                    slot -= 1;
                    let radix = if slot == 0 {
                        first.len()
                    } else if slot == deg {
                        last.len()
                    } else {
                        mid.len()
                    };
                    tuple[slot] += 1;
                    if tuple[slot] < radix {
                        break;
                    }
                    tuple[slot] = 0;
                }
            }
        }
    }

    // the lifted face maps respect the submaximal face structure on M_*(4,4)
    {
        let diagrams = enumerate_diagrams(4, 4);
        for d in diagrams.iter() {
            let cups = d.innermost_right_cups();
            let submax: Vec<u16> = cups.iter().copied().filter(|k| k % 2 == 1).collect();
            for t in 1..=2u16 {
                let _ = lifted_face(t, d, &submax).unwrap();
            }
        }
    }
    pass(12, "associativity (1000 random triples), graded Leibniz, hook checks, involution chain maps");
}
