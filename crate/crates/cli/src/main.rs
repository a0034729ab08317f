use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use strandhf::algebra::{algebra_homology, AlgebraCaps};
use strandhf::error::Error;
use strandhf::module::{box_auto, reduce_object};
use strandhf::morph::{ext_type_d, hochschild_cohomology, koszul_check, serre_check};
use strandhf::pmc::StandardName;
use strandhf::serialize::{object_to_json, resolve_object, resolve_pmc};
use strandhf::{repro, zoo};

#[derive(Parser)]
#[command(name = "strandhf", about = "Strand algebras over F2 and their (bi)modules", version)]
struct Cli {
    /// Worker threads for summand-parallel computations.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dimension and homology of a summand A(Z, i).
    Algebra {
        /// Standard name (torus, split2, antipodal2, genus3_Z1, ...) or a JSON file.
        #[arg(long)]
        pmc: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        i: i64,
        /// Also print the product and differential tables.
        #[arg(long)]
        tables: bool,
    },
    /// The Laurent polynomial sum_i dim H(A(Z,i)) T^i.
    Poincare {
        #[arg(long)]
        pmc: String,
    },
    /// Ext of two left type D structures (named objects or files).
    Ext {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Hochschild cohomology of A(Z, 0) via the identity DD bimodule.
    Hh {
        #[arg(long)]
        pmc: String,
    },
    /// The three Koszul dualizing-bimodule conditions for a DD structure.
    KoszulCheck {
        #[arg(long = "in")]
        input: String,
    },
    /// The Serre-kernel comparison dim Ext(M,N) = dim H(Mor(N, M ⊠ S)).
    Serre {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Homological perturbation: reduce an object's internal differential
    /// and emit the transferred operations.
    Reduce {
        #[arg(long = "in")]
        input: String,
        /// Maximum total input length of transferred operations.
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
    /// Box tensor product of two objects along their unique valid pairing.
    Box {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Verify the structure equations of an object.
    Check {
        #[arg(long = "in")]
        input: String,
    },
    /// Run the full acceptance suite and print one line per criterion.
    Repro,
    /// Regenerate the packaged fixtures (development aid).
    #[command(hide = true)]
    Fixtures {
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("strandhf: could not set thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(Error::SizeLimit(msg)) => {
            eprintln!("strandhf: size limit: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("strandhf: {e}");
            ExitCode::from(1)
        }
    }
}

fn warn_large_genus(spec: &str) {
    if let Ok(StandardName::Split(k) | StandardName::Antipodal(k)) = StandardName::parse(spec) {
        if k > 3 {
            eprintln!(
                "strandhf: warning: genus {k} exceeds the soft limit 3; this may take a long time"
            );
        }
    }
}

fn run(cli: &Cli) -> strandhf::Result<ExitCode> {
    let caps = AlgebraCaps::default();
    match &cli.cmd {
        Cmd::Algebra { pmc, i, tables } => {
            warn_large_genus(pmc);
            let z = resolve_pmc(pmc)?;
            let alg = zoo::algebra(&z, *i)?;
            if cli.format == Format::Json {
                let mut out = serde_json::json!({
                    "name": alg.name(),
                    "dim": alg.dim(),
                    "homology_dim": alg.homology_dim(),
                });
                if *tables {
                    out["differential"] = differential_json(&alg);
                    out["products"] = products_json(&alg);
                }
                println!("{}", serde_json::to_string_pretty(&out)?);
            } else {
                println!("algebra:      {}", alg.name());
                println!("dimension:    {}", alg.dim());
                println!("homology dim: {}", alg.homology_dim());
                if *tables {
                    println!("differential:");
                    for b in 0..alg.dim() as u32 {
                        if !alg.d(b).is_zero() {
                            println!("  d({}) = {}", alg.label(b), alg.show_elem(alg.d(b)));
                        }
                    }
                    println!("products (nonzero, excluding idempotent actions):");
                    for a in 0..alg.dim() as u32 {
                        for b in 0..alg.dim() as u32 {
                            if alg.is_idem(a) || alg.is_idem(b) {
                                continue;
                            }
                            let p = alg.mul(a, b);
                            if !p.is_zero() {
                                println!(
                                    "  {} * {} = {}",
                                    alg.label(a),
                                    alg.label(b),
                                    alg.show_elem(p)
                                );
                            }
                        }
                    }
                }
            }
        }
        Cmd::Poincare { pmc } => {
            warn_large_genus(pmc);
            let z = resolve_pmc(pmc)?;
            let poly = algebra_homology(&z, &caps)?;
            if cli.format == Format::Json {
                println!("{}", serde_json::json!({ "poincare": poly.to_string() }));
            } else {
                println!("{poly}");
            }
        }
        Cmd::Ext { from, to } => {
            let m = resolve_object(from)?;
            let n = resolve_object(to)?;
            let (rank, mor, h) = ext_type_d(&m, &n)?;
            let reps: Vec<String> = h.representatives.iter().map(|r| mor.show(r)).collect();
            if cli.format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "ext_rank": rank,
                        "mor_generators": mor.complex.dim(),
                        "representatives": reps,
                    }))?
                );
            } else {
                println!("Ext rank: {rank}");
                for r in reps {
                    println!("  representative: {r}");
                }
            }
        }
        Cmd::Hh { pmc } => {
            let z = resolve_pmc(pmc)?;
            let ddid = zoo::dd_identity(&z, 0)?;
            let hh = hochschild_cohomology(&ddid)?;
            let reps: Vec<String> =
                hh.representatives.iter().map(|r| hh.mor.show(r)).collect();
            if cli.format == Format::Json {
                let table: Vec<Vec<String>> = hh
                    .ring_table
                    .iter()
                    .map(|row| row.iter().map(|c| format!("{c}")).collect())
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "mor_generators": hh.mor.complex.dim(),
                        "rank": hh.rank,
                        "representatives": reps,
                        "ring_table": table,
                        "unit_class": format!("{}", hh.unit_class),
                    }))?
                );
            } else {
                println!("Mor generators: {}", hh.mor.complex.dim());
                println!("HH rank:        {}", hh.rank);
                for (i, r) in reps.iter().enumerate() {
                    println!("  h{i} = {r}");
                }
                println!("composition table (classes in the h-basis):");
                for (i, row) in hh.ring_table.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(|c| format!("{c}")).collect();
                    println!("  h{i} ∘ .. = [{}]", cells.join(", "));
                }
                println!("unit class:     {}", hh.unit_class);
            }
        }
        Cmd::KoszulCheck { input } => {
            let k = resolve_object(input)?;
            let rep = koszul_check(&k)?;
            if cli.format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "rank_one": rep.rank_one,
                        "reduced_image": rep.reduced_image,
                        "resolution_left": rep.resolution_left,
                        "resolution_right": rep.resolution_right,
                        "pass": rep.pass(),
                    }))?
                );
            } else {
                println!("rank one:          {}", verdict(rep.rank_one));
                println!("image in A+⊗K⊗B+:  {}", verdict(rep.reduced_image));
                println!(
                    "resolution (left): {} (H = {}, expected {})",
                    verdict(rep.resolution_left.0 == rep.resolution_left.1),
                    rep.resolution_left.0,
                    rep.resolution_left.1
                );
                println!(
                    "resolution (right): {} (H = {}, expected {})",
                    verdict(rep.resolution_right.0 == rep.resolution_right.1),
                    rep.resolution_right.0,
                    rep.resolution_right.1
                );
            }
            if !rep.pass() {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Serre { from, to } => {
            let m = resolve_object(from)?;
            let n = resolve_object(to)?;
            let alg = m.slots()[0].algebra.clone();
            let pmc = alg
                .pmc()
                .ok_or_else(|| Error::ShapeMismatch("serre needs strand-algebra modules".into()))?
                .clone();
            let bar = zoo::bar(&pmc, alg.weight().unwrap_or(0))?;
            let (ok, a, b) = serre_check(&m, &n, &bar)?;
            if cli.format == Format::Json {
                println!(
                    "{}",
                    serde_json::json!({ "equal": ok, "ext": a, "serre_side": b })
                );
            } else {
                println!("dim Ext(M,N) = {a}, dim H(Mor(N, M⊠S)) = {b}: {}", verdict(ok));
            }
            if !ok {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Reduce { input, bound } => {
            let obj = resolve_object(input)?;
            let (small, _) = reduce_object(&obj, *bound)?;
            println!("{}", object_to_json(&small)?);
        }
        Cmd::Box { left, right } => {
            let p = resolve_object(left)?;
            let q = resolve_object(right)?;
            let result = box_auto(&p, &q)?;
            println!("{}", object_to_json(&result)?);
        }
        Cmd::Check { input } => {
            let obj = resolve_object(input)?;
            let report = obj.check_structure();
            if report.ok() {
                if cli.format == Format::Json {
                    println!("{}", serde_json::json!({ "ok": true }));
                } else {
                    println!("ok: structure equations hold for {}", obj.name);
                }
            } else {
                if cli.format == Format::Json {
                    let v: Vec<String> =
                        report.violations.iter().map(|v| v.to_string()).collect();
                    println!("{}", serde_json::json!({ "ok": false, "violations": v }));
                } else {
                    for v in &report.violations {
                        println!("violation: {v}");
                    }
                }
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Repro => {
            let reports = repro::run_all();
            print!("{}", repro::render(&reports));
            if reports.iter().any(|r| !r.pass) {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Fixtures { out } => {
            zoo::write_fixtures(out)?;
            println!("fixtures written to {}", out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn differential_json(alg: &strandhf::algebra::DgAlgebra) -> serde_json::Value {
    let mut rows = Vec::new();
    for b in 0..alg.dim() as u32 {
        if !alg.d(b).is_zero() {
            rows.push(serde_json::json!([alg.label(b), alg.show_elem(alg.d(b))]));
        }
    }
    serde_json::Value::Array(rows)
}

fn products_json(alg: &strandhf::algebra::DgAlgebra) -> serde_json::Value {
    let mut rows = Vec::new();
    for a in 0..alg.dim() as u32 {
        for b in 0..alg.dim() as u32 {
            let p = alg.mul(a, b);
            if !p.is_zero() && !alg.is_idem(a) && !alg.is_idem(b) {
                rows.push(serde_json::json!([
                    alg.label(a),
                    alg.label(b),
                    alg.show_elem(p)
                ]));
            }
        }
    }
    serde_json::Value::Array(rows)
}
