//! Named verification suites: each check recomputes a value and compares it
//! exactly against an independently stated expectation (a closed form, a
//! by-hand value, or a brute-force oracle), printing one line per check.

use crate::{EXIT_CHECK_FAILED, EXIT_INVALID_INPUT};
use planar_loops::chaincore::Weight;
use planar_loops::diagrams::{catalan, enumerate_diagrams, named_diagram, NamedDiagram, TLDiagram};
use planar_loops::exactlin::CoeffRing;
use planar_loops::loops::{build_loops_complex, phi, BarVariant};
use planar_loops::model::{
    self, bockstein_homology_2n4, build_model_complex, cobar_matches_model, words_of_degree,
};
use planar_loops::series::NamedSeries;
use std::process::ExitCode;

struct Check {
    name: &'static str,
    /// What the expected value is and where it comes from.
    claim: &'static str,
    outcome: Result<(String, String), String>,
}

impl Check {
    fn compare<T: PartialEq + std::fmt::Debug>(
        name: &'static str,
        claim: &'static str,
        computed: T,
        expected: T,
    ) -> Check {
        Check {
            name,
            claim,
            outcome: Ok((format!("{computed:?}"), format!("{expected:?}"))),
        }
    }
}

fn z(a: i64) -> CoeffRing {
    CoeffRing::integers(a)
}

fn suite_diagrams() -> Vec<Check> {
    let mut checks = Vec::new();
    let counts: Vec<u128> = (1..=4u32)
        .map(|k| enumerate_diagrams(2 * k as u16, 2 * k as u16).len() as u128)
        .collect();
    let expected: Vec<u128> = (1..=4u32).map(|k| catalan(2 * k)).collect();
    checks.push(Check::compare(
        "catalan-counts",
        "the diagram count of TL_{2n} is the Catalan number C_{2n}, 2n <= 8",
        counts,
        expected,
    ));
    // two reference products: a TL_4 square closing one circle, and a
    // TL(2,6) x TL(6,4) composite
    let d1: TLDiagram = serde_json::from_str(
        r#"{"left":4,"right":4,"arcs":[["L",3,"L",4],["R",2,"R",3],["L",1,"R",1],["L",2,"R",4]]}"#,
    )
    .unwrap();
    let d2: TLDiagram = serde_json::from_str(
        r#"{"left":4,"right":4,"arcs":[["L",2,"L",3],["L",1,"L",4],["R",1,"R",2],["R",3,"R",4]]}"#,
    )
    .unwrap();
    let res = d1.compose(&d2).unwrap();
    checks.push(Check::compare(
        "tl4-product",
        "a TL_4 product closing one circle onto the all-cups diagram",
        (res.loops, res.diagram.to_string()),
        (1, "{L1-L2,L3-L4,R1-R2,R3-R4}".to_string()),
    ));
    let e1: TLDiagram = serde_json::from_str(
        r#"{"left":2,"right":6,"arcs":[["R",4,"R",5],["R",2,"R",3],["L",1,"R",1],["L",2,"R",6]]}"#,
    )
    .unwrap();
    let e2: TLDiagram = serde_json::from_str(
        r#"{"left":6,"right":4,"arcs":[["L",2,"L",3],["R",2,"R",3],["L",1,"L",4],["L",5,"R",1],["L",6,"R",4]]}"#,
    )
    .unwrap();
    let res = e1.compose(&e2).unwrap();
    checks.push(Check::compare(
        "tl26-tl64-product",
        "a rectangular TL(2,6)·TL(6,4) composite closing one circle",
        (res.loops, res.diagram.to_string()),
        (1, "{L1-R1,L2-R4,R2-R3}".to_string()),
    ));
    checks
}

fn suite_wellformed() -> Vec<Check> {
    let mut checks = Vec::new();
    let mut all_zero = true;
    for n in 1..=5u16 {
        for a in [0i64, 1, 2, 3] {
            let ring = z(a);
            for d in 1..=12u32 {
                for w in words_of_degree(n, d) {
                    let x = model::ModelElement::from_word(ring.clone(), n, w);
                    all_zero &= model::model_d(&model::model_d(&x)).is_zero();
                }
            }
        }
    }
    checks.push(Check::compare(
        "model-d-squared",
        "d∘d = 0 in the model for n <= 5, a in 0..=3, degrees <= 12",
        all_zero,
        true,
    ));
    let r1 = TLDiagram::new(
        0,
        2,
        &[(
            planar_loops::diagrams::Node::right(1),
            planar_loops::diagrams::Node::right(2),
        )],
    )
    .unwrap();
    let glue: Vec<(u32, bool)> = [2u16, 4, 6, 8]
        .iter()
        .map(|&two_n| {
            let l = named_diagram(NamedDiagram::PhiL { two_n }).unwrap();
            let rp = named_diagram(NamedDiagram::PhiRPrime { two_n }).unwrap();
            let res = l.compose(&rp).unwrap();
            (res.loops, res.diagram == r1)
        })
        .collect();
    checks.push(Check::compare(
        "phi-glue",
        "Φ_l · Φ_r' is the single right cup, with no closed circles, 2n in {2,4,6,8}",
        glue,
        vec![(0, true); 4],
    ));
    let mut phi_ok = true;
    for n in 1..=3u16 {
        for a in [0i64, 1, 2, 3] {
            let ring = z(a);
            let x = phi(&ring, n).unwrap();
            let dx = x.differential();
            let expected = planar_loops::loops::LoopsElement::unit(ring.clone(), n)
                .scale(&ring.from_int(a));
            phi_ok &= dx == expected;
        }
    }
    checks.push(Check::compare(
        "phi-boundary",
        "d(Φ) = a·∅ in the loop dga for n <= 3",
        phi_ok,
        true,
    ));
    checks
}

fn suite_cor12e() -> Vec<Check> {
    let mut checks = Vec::new();
    let ring = z(0);
    let complex = build_model_complex(&ring, 2, 11).unwrap();
    let table = complex.homology_table(10).unwrap();
    let free: Vec<usize> = (0..=10u32)
        .map(|d| table.degree_summary(d).free_rank)
        .collect();
    let expected_free: Vec<usize> = NamedSeries::Free2n4
        .coefficients(10)
        .iter()
        .map(|c| c.to_string().parse().unwrap())
        .collect();
    checks.push(Check::compare(
        "free-ranks",
        "free ranks of the 2n=4 homology follow (1 + t)/(1 - t^4) up to degree 10",
        free,
        expected_free,
    ));
    let torsion: Vec<usize> = (0..=10u32)
        .map(|d| table.degree_summary(d).torsion.len())
        .collect();
    let expected_torsion: Vec<usize> = NamedSeries::Torsion2n4
        .coefficients(10)
        .iter()
        .map(|c| c.to_string().parse().unwrap())
        .collect();
    checks.push(Check::compare(
        "torsion-dims",
        "2-torsion counts follow t^2/((1 - t - t^3)(1 - t^4)) up to degree 10",
        torsion,
        expected_torsion,
    ));
    let all_two = (0..=10u32).all(|d| {
        table
            .degree_summary(d)
            .torsion
            .iter()
            .all(|f| f == &num::BigInt::from(2))
    });
    checks.push(Check::compare(
        "torsion-simple",
        "every torsion invariant factor equals 2",
        all_two,
        true,
    ));
    // γ = ⟨Φ, 2Φ, Φ⟩ is the nonzero cycle x1x3 + x3x1
    let phi = model::ModelElement::generator(ring.clone(), 2, 1).unwrap();
    let classes = vec![phi.clone(), phi.scale(&ring.from_int(2)), phi.clone()];
    let mut system = model::DefiningSystem::new();
    let x3 = model::ModelElement::generator(ring.clone(), 2, 2).unwrap();
    system.insert((0, 1), classes[0].clone());
    system.insert((1, 2), classes[1].clone());
    system.insert((2, 3), classes[2].clone());
    system.insert((0, 2), x3.clone());
    system.insert((1, 3), x3);
    let gamma = model::massey_general(&classes, &system).unwrap();
    let mut expected = model::ModelElement::zero(ring.clone(), 2);
    expected.add_term(model::TensorWord(vec![1, 2]), ring.one());
    expected.add_term(model::TensorWord(vec![2, 1]), ring.one());
    checks.push(Check::compare(
        "gamma-massey",
        "⟨Φ, 2Φ, Φ⟩ = x1x3 + x3x1, a nonzero cycle",
        (gamma == expected, model::model_d(&expected).is_zero()),
        (true, true),
    ));
    checks
}

fn suite_cobar() -> Vec<Check> {
    let mut checks = Vec::new();
    for n in 1..=4u16 {
        let result = cobar_matches_model(&z(0), n, 8);
        checks.push(Check {
            name: "cobar-identity",
            claim: "the cobar complex of the small coalgebra is term-by-term the model (degrees <= 8)",
            outcome: match result {
                Ok(()) => Ok(("equal".into(), "equal".into())),
                Err(e) => Err(e.to_string()),
            },
        });
    }
    let dims: Vec<usize> = (0..=7u32)
        .map(|d| {
            bockstein_homology_2n4(8)
                .unwrap()
                .degree_summary(d)
                .free_rank
        })
        .collect();
    checks.push(Check::compare(
        "bockstein-dims",
        "Bockstein homology dimensions are 1,1,0,0,1,1,0,0 in degrees 0..=7",
        dims,
        vec![1, 1, 0, 0, 1, 1, 0, 0],
    ));
    checks
}

fn suite_cor12b() -> Vec<Check> {
    let mut checks = Vec::new();
    let ring = z(0);
    let loops = build_loops_complex(&ring, 1, 0, 7, BarVariant::Unreduced).unwrap();
    let table = loops.homology_table(6).unwrap();
    let summaries: Vec<(usize, usize)> = (0..=6u32)
        .map(|q| {
            let s = table.degree_summary(q);
            (s.free_rank, s.torsion.len())
        })
        .collect();
    checks.push(Check::compare(
        "loops-2n2",
        "the 2n=2 loop dga has homology Z in every degree <= 6 (a polynomial algebra on Φ)",
        summaries,
        vec![(1, 0); 7],
    ));
    // each generator sits in weight q
    let graded_ok = (0..=6u32).all(|q| {
        table
            .get(q, Weight::W(q))
            .map(|e| e.summary.free_rank == 1)
            .unwrap_or(false)
    });
    checks.push(Check::compare(
        "loops-2n2-weights",
        "the degree-q class has weight q",
        graded_ok,
        true,
    ));
    checks
}

pub fn run_suite(name: &str) -> Result<ExitCode, ExitCode> {
    let checks = match name {
        "diagrams" => suite_diagrams(),
        "wellformed" => suite_wellformed(),
        "cor12b" => suite_cor12b(),
        "cor12e" => suite_cor12e(),
        "cobar" => suite_cobar(),
        other => {
            eprintln!(
                "unknown suite {other:?}; available: diagrams, wellformed, cor12b, cor12e, cobar"
            );
            return Err(ExitCode::from(EXIT_INVALID_INPUT));
        }
    };
    let mut failures = 0usize;
    for check in &checks {
        match &check.outcome {
            Ok((computed, expected)) if computed == expected => {
                println!("[ok]   {} :: {}", check.name, check.claim);
            }
            Ok((computed, expected)) => {
                failures += 1;
                println!(
                    "[FAIL] {} :: {} (computed {computed}, expected {expected})",
                    check.name, check.claim
                );
            }
            Err(e) => {
                failures += 1;
                println!("[FAIL] {} :: {} (error: {e})", check.name, check.claim);
            }
        }
    }
    if failures == 0 {
        println!("suite {name}: PASS ({} checks)", checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("suite {name}: FAIL ({failures} of {} checks)", checks.len());
        Err(ExitCode::from(EXIT_CHECK_FAILED))
    }
}
