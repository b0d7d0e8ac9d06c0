//! Command-line front end: homology tables, Massey products, acyclicity
//! certificates, Tor/Ext tables, diagram composition, named power series and
//! verification suites.
//!
//! Exit codes: 0 success / all checks passed, 1 a verification check failed,
//! 2 invalid input, 3 internal inconsistency (a differential fails d∘d = 0).

mod verify;

use clap::{Parser, Subcommand, ValueEnum};
use planar_loops::cache::MatrixCache;
use planar_loops::chaincore::{BasisIndexedComplex, EntryFlag, HomologyTable, TableEntry, Weight};
use planar_loops::cupcx;
use planar_loops::diagrams::TLDiagram;
use planar_loops::exactlin::{homology_at, CoeffRing, LinAlgError};
use planar_loops::loops::BarVariant;
use planar_loops::model::{self, MasseyOutcome};
use planar_loops::series::NamedSeries;
use planar_loops::torext;
use std::collections::BTreeMap;
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_INVALID_INPUT: u8 = 2;
const EXIT_INCONSISTENT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "planar-loops",
    about = "Exact homology of Temperley-Lieb diagram algebras and the dga of planar loops",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Aligned,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComplexKind {
    Loops,
    Model,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AcyclicityKind {
    Inn,
    Out,
    Dinn,
    Dout,
}

#[derive(Subcommand)]
enum Command {
    /// Homology table of the loop dga or its small model.
    Homology {
        #[arg(long, value_enum)]
        complex: ComplexKind,
        /// Number of strands 2n (even).
        #[arg(long)]
        n: u16,
        /// Module parameter 2i (even, loops only).
        #[arg(long, default_value_t = 0)]
        i: u16,
        /// Coefficient ring: Z, Q or F<p>.
        #[arg(long, default_value = "Z")]
        ring: String,
        /// The Temperley-Lieb parameter a.
        #[arg(long, default_value_t = 0)]
        param: i64,
        /// Top homological degree reported (default 4 for loops, 10 for the
        /// model).
        #[arg(long)]
        max_degree: Option<u32>,
        /// Use the normalized bar construction (loops only).
        #[arg(long)]
        normalized: bool,
        /// Restrict the report to one weight, or "all".
        #[arg(long)]
        weights: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Aligned)]
        format: OutputFormat,
    },
    /// Iterated Massey powers of the degree-one generator in the model.
    Massey {
        /// Number of strands 2n (even).
        #[arg(long)]
        n: u16,
        #[arg(long)]
        arity: u32,
        #[arg(long, default_value = "Q")]
        ring: String,
    },
    /// Homology of the mod-2 Bockstein derivation (2n = 4).
    Bockstein {
        #[arg(long, default_value_t = 4)]
        n: u16,
        #[arg(long, default_value_t = 8)]
        max_degree: u32,
    },
    /// Acyclicity certificates for the cup complexes.
    Acyclicity {
        #[arg(long, value_enum)]
        which: AcyclicityKind,
        /// Number of strands 2n (even).
        #[arg(long)]
        n: u16,
        /// Cup parameter 2i (even).
        #[arg(long, default_value_t = 0)]
        i: u16,
        /// Derived column index p (dinn/dout).
        #[arg(long, default_value_t = 0)]
        p: u16,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
    },
    /// Tor of the Temperley-Lieb algebra over the trivial or cell module.
    Tor {
        /// Number of strands 2n (even).
        #[arg(long)]
        n: u16,
        #[arg(long, default_value = "Z")]
        ring: String,
        #[arg(long, default_value_t = 0)]
        param: i64,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
        #[arg(long)]
        normalized: bool,
        #[arg(long)]
        cell_coefficients: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Aligned)]
        format: OutputFormat,
    },
    /// Ext over R[y]/(y^{n+1}) read off the periodic resolution.
    Ext {
        /// The truncation parameter n (so the algebra is R[y]/(y^{n+1})).
        #[arg(long)]
        n: u16,
        #[arg(long, default_value = "Q")]
        ring: String,
        #[arg(long, default_value_t = 9)]
        max_degree: u32,
    },
    /// Compose two diagrams given as JSON records.
    Compose {
        #[arg(long)]
        lhs: std::path::PathBuf,
        #[arg(long)]
        rhs: std::path::PathBuf,
    },
    /// Run a named verification suite.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Expand one of the named closed-form series.
    Series {
        #[arg(long)]
        which: String,
        #[arg(long, default_value_t = 10)]
        order: usize,
    },
}

fn parse_ring(name: &str, a: i64) -> Result<CoeffRing, String> {
    match name {
        "Z" | "z" => Ok(CoeffRing::integers(a)),
        "Q" | "q" => Ok(CoeffRing::rationals(a)),
        other => {
            let p: u64 = other
                .strip_prefix(['F', 'f'])
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| format!("unknown ring {other:?}; use Z, Q or F<p>"))?;
            CoeffRing::prime_field(p, a).map_err(|e| e.to_string())
        }
    }
}

fn even_half(two_n: u16, what: &str) -> Result<u16, String> {
    if two_n % 2 != 0 {
        return Err(format!("{what} must be even, got {two_n}"));
    }
    Ok(two_n / 2)
}

fn invalid(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_INVALID_INPUT)
}

fn inconsistent(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("internal inconsistency: {msg}");
    ExitCode::from(EXIT_INCONSISTENT)
}

/// Blockwise homology with the optional on-disk cache. Cache keys combine
/// the complex name (which encodes all construction parameters), the crate
/// version and a content hash of the block bases.
fn homology_with_cache(
    complex: &BasisIndexedComplex,
    q_max: u32,
    cache: Option<&MatrixCache>,
) -> Result<HomologyTable, LinAlgError> {
    let top = complex.top_degree().unwrap_or(0);
    let key = format!(
        "{}::v{}",
        complex.name(),
        env!("CARGO_PKG_VERSION")
    );
    let mut entries = BTreeMap::new();
    for q in 0..=q_max.min(top) {
        let weights: Vec<Weight> = complex
            .block_keys()
            .filter(|(d, _)| *d == q)
            .map(|(_, w)| w)
            .collect();
        for w in weights {
            if complex.dim(q, w) == 0 {
                continue;
            }
            let flag = if complex.is_truncated() && q == top {
                EntryFlag::KernelOnly
            } else {
                EntryFlag::Exact
            };
            let basis = planar_loops::cache::basis_hash(complex.labels(q, w).unwrap_or(&[]));
            let block_key = format!("{key}::{basis}");
            if let Some(c) = cache {
                if let Ok(Some(summary)) = c.load_summary(&block_key, q, w) {
                    entries.insert((q, w), TableEntry { summary, flag });
                    continue;
                }
            }
            let d_out = complex.diff_or_zero(q, w);
            let d_in = if flag == EntryFlag::KernelOnly {
                planar_loops::exactlin::SparseMatrix::zero(complex.dim(q, w), 0)
            } else {
                complex.diff_or_zero(q + 1, w)
            };
            let summary = homology_at(&d_in, &d_out, complex.ring())?;
            if let Some(c) = cache {
                let _ = c.store_matrix(&block_key, q, w, &basis, &d_out, complex.ring());
                let _ = c.store_summary(&block_key, q, w, &summary);
            }
            entries.insert((q, w), TableEntry { summary, flag });
        }
    }
    Ok(HomologyTable {
        name: complex.name().to_string(),
        ring: complex.ring().kind(),
        q_max: q_max.min(top),
        entries,
    })
}

fn emit_table(table: &HomologyTable, format: OutputFormat, weight_filter: Option<u32>) {
    let mut table = table.clone();
    if let Some(wv) = weight_filter {
        table.entries.retain(|(_, w), _| *w == Weight::W(wv));
    }
    match format {
        OutputFormat::Aligned => print!("{}", table.to_aligned_string()),
        OutputFormat::Csv => print!("{}", table.to_csv()),
        OutputFormat::Json => println!("{}", table.to_json()),
    }
}

fn run_homology(
    complex: ComplexKind,
    two_n: u16,
    two_i: u16,
    ring: &str,
    param: i64,
    max_degree: Option<u32>,
    normalized: bool,
    weights: Option<String>,
    format: OutputFormat,
) -> Result<ExitCode, ExitCode> {
    let ring = parse_ring(ring, param).map_err(invalid)?;
    let n = even_half(two_n, "--n").map_err(invalid)?;
    let i = even_half(two_i, "--i").map_err(invalid)?;
    let weight_filter = match weights.as_deref() {
        None | Some("all") => None,
        Some(s) => {
            if !ring.is_graded() {
                return Err(invalid(
                    "weight grading undefined: --weights needs the parameter a = 0",
                ));
            }
            Some(s.parse::<u32>().map_err(|_| invalid("bad --weights"))?)
        }
    };
    if weights.is_some() && !ring.is_graded() {
        return Err(invalid(
            "weight grading undefined: --weights needs the parameter a = 0",
        ));
    }
    let cache = MatrixCache::from_env().map_err(invalid)?;
    let (q_max, built) = match complex {
        ComplexKind::Loops => {
            let q_max = max_degree.unwrap_or(4);
            let variant = if normalized {
                BarVariant::Normalized
            } else {
                BarVariant::Unreduced
            };
            let c = planar_loops::loops::build_loops_complex(&ring, n, i, q_max + 1, variant)
                .map_err(invalid)?;
            (q_max, c)
        }
        ComplexKind::Model => {
            let q_max = max_degree.unwrap_or(10);
            if normalized {
                return Err(invalid("--normalized applies to the loops complex"));
            }
            let c = planar_loops::model::build_model_complex(&ring, n, q_max + 1)
                .map_err(invalid)?;
            (q_max, c)
        }
    };
    let table = homology_with_cache(&built, q_max, cache.as_ref()).map_err(|e| match e {
        LinAlgError::NotAComplex { .. } => inconsistent(e),
        other => invalid(other),
    })?;
    emit_table(&table, format, weight_filter);
    Ok(ExitCode::SUCCESS)
}

fn run_acyclicity(
    which: AcyclicityKind,
    two_n: u16,
    two_i: u16,
    p: u16,
    max_degree: u32,
) -> Result<ExitCode, ExitCode> {
    let ring = CoeffRing::integers(0);
    let n = even_half(two_n, "--n").map_err(invalid)?;
    let _ = even_half(two_i, "--i").map_err(invalid)?;
    let (name, complex, check_through) = match which {
        AcyclicityKind::Inn => {
            let c = cupcx::build_inn_complex(&ring, two_n, two_i, true).map_err(invalid)?;
            let top = c.top_degree().unwrap_or(0);
            (format!("inn-aug({two_n},{two_i})"), c, top)
        }
        AcyclicityKind::Out => {
            let c = cupcx::build_out_complex(&ring, two_n).map_err(invalid)?;
            let top = c.top_degree().unwrap_or(0);
            (format!("out({two_n})"), c, top)
        }
        AcyclicityKind::Dinn => {
            let c = cupcx::build_derived_inn(&ring, n, two_i / 2, p, max_degree + 1)
                .map_err(invalid)?;
            (format!("dinn_{p}({two_n},{two_i})"), c, max_degree)
        }
        AcyclicityKind::Dout => {
            let (columns, maps) =
                cupcx::derived_out_resolution(&ring, n, max_degree + 1).map_err(invalid)?;
            let total = planar_loops::chaincore::totalize(&columns, &maps).map_err(invalid)?;
            (format!("dout-total({two_n})"), total, max_degree)
        }
    };
    let report = complex.check_d_squared();
    if !report.passed() {
        return Err(inconsistent(format!(
            "d∘d ≠ 0: witness {:?}",
            report.violations[0]
        )));
    }
    let table = complex.homology_table(check_through).map_err(invalid)?;
    println!("# {name}: dimension table");
    let mut pass = true;
    for q in 0..=check_through {
        let dims: usize = complex
            .block_keys()
            .filter(|(d, _)| *d == q)
            .map(|(d, w)| complex.dim(d, w))
            .sum();
        let h = table.degree_summary(q);
        // degree 0 of the totalised derived resolution carries R itself
        let expected_trivial = !(which == AcyclicityKind::Dout && q == 0);
        let ok = if expected_trivial {
            h.is_trivial()
        } else {
            h.free_rank == 1 && h.torsion.is_empty()
        };
        pass &= ok;
        println!(
            "degree {q}: dim {dims}, homology {h} {}",
            if ok { "[ok]" } else { "[FAIL]" }
        );
    }
    if pass {
        println!("{name}: acyclicity certificate PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{name}: acyclicity certificate FAIL");
        Err(ExitCode::from(EXIT_CHECK_FAILED))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Result<ExitCode, ExitCode> = match cli.command {
        Command::Homology {
            complex,
            n,
            i,
            ring,
            param,
            max_degree,
            normalized,
            weights,
            format,
        } => run_homology(
            complex, n, i, &ring, param, max_degree, normalized, weights, format,
        ),
        Command::Massey { n, arity, ring } => (|| {
            let ring = parse_ring(&ring, 0).map_err(invalid)?;
            let half = even_half(n, "--n").map_err(invalid)?;
            match model::massey_power(&ring, half, arity).map_err(invalid)? {
                MasseyOutcome::Defined { element, .. } => {
                    let terms: Vec<String> = element
                        .terms
                        .iter()
                        .map(|(w, c)| format!("{c}·{}", w.label()))
                        .collect();
                    println!(
                        "⟨Φ,...,Φ⟩ ({arity}-fold) in the 2n={n} model: {}",
                        terms.join(" + ")
                    );
                    Ok(ExitCode::SUCCESS)
                }
                MasseyOutcome::MissingGenerator { needed } => {
                    println!(
                        "obstruction: the defining system needs the generator x{needed}, absent for 2n={n}"
                    );
                    Err(ExitCode::from(EXIT_CHECK_FAILED))
                }
                MasseyOutcome::FactorialObstruction { factorial } => {
                    println!("obstruction: {factorial}! is not invertible in the coefficient ring");
                    Err(ExitCode::from(EXIT_CHECK_FAILED))
                }
            }
        })(),
        Command::Bockstein { n, max_degree } => (|| {
            if n != 4 {
                return Err(invalid("the Bockstein derivation is implemented for 2n = 4"));
            }
            let table = model::bockstein_homology_2n4(max_degree + 1).map_err(invalid)?;
            print!("{}", table.to_aligned_string());
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Acyclicity {
            which,
            n,
            i,
            p,
            max_degree,
        } => run_acyclicity(which, n, i, p, max_degree),
        Command::Tor {
            n,
            ring,
            param,
            max_degree,
            normalized,
            cell_coefficients,
            format,
        } => (|| {
            let ring = parse_ring(&ring, param).map_err(invalid)?;
            let half = even_half(n, "--n").map_err(invalid)?;
            let variant = if normalized {
                BarVariant::Normalized
            } else {
                BarVariant::Unreduced
            };
            let table = if cell_coefficients {
                torext::tor_with_cell(&ring, half, max_degree, variant)
            } else {
                torext::tor_table(&ring, half, max_degree, variant)
            }
            .map_err(invalid)?;
            emit_table(&table, format, None);
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Ext {
            n,
            ring,
            max_degree,
        } => (|| {
            let ring = parse_ring(&ring, 0).map_err(invalid)?;
            let table = torext::ext_table_truncated_poly(&ring, n, max_degree).map_err(invalid)?;
            println!("# Ext over R[y]/(y^{}) for R = {}", n + 1, ring.kind());
            println!("{:>4} {:>6} {:>6}", "d", "w", "rank");
            for (d, w) in &table.bidegrees {
                println!("{d:>4} {w:>6} {:>6}", 1);
            }
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Compose { lhs, rhs } => (|| {
            let read = |p: &std::path::Path| -> Result<TLDiagram, ExitCode> {
                let s = std::fs::read_to_string(p).map_err(invalid)?;
                serde_json::from_str(&s).map_err(invalid)
            };
            let d = read(&lhs)?;
            let e = read(&rhs)?;
            let res = d.compose(&e).map_err(invalid)?;
            println!("loops={}", res.loops);
            println!("{}", serde_json::to_string(&res.diagram).unwrap());
            Ok(ExitCode::SUCCESS)
        })(),
        Command::Verify { suite } => verify::run_suite(&suite),
        Command::Series { which, order } => (|| {
            let series = NamedSeries::parse(&which)
                .ok_or_else(|| invalid(format!("unknown series {which:?}")))?;
            let coeffs: Vec<String> = series
                .coefficients(order)
                .iter()
                .map(|c| c.to_string())
                .collect();
            println!("# {} = {}", series.name(), series.closed_form());
            println!("[{}]", coeffs.join(", "));
            Ok(ExitCode::SUCCESS)
        })(),
    };
    match outcome {
        Ok(code) | Err(code) => code,
    }
}
