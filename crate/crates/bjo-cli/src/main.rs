//! Command-line frontend for the certified orthogonality toolkit.
//!
//! Exit codes: 0 Holds, 1 Fails, 2 Borderline, 3 parse error, 4 dimension
//! mismatch, 5 tolerance or certification failure, 6 generator precondition
//! violated, 7 property violation in self-auditing mode.

mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use bjo_core::orthogonality::{is_bj_with, is_quasi_strong_with, is_strong_with, Verdict};
use bjo_core::survey::{run_equivalence_survey, run_implication_survey, ElementKind};
use bjo_core::{
    make_prime_pair, make_sqc_pair, standard_family, BlockAlgebra, Certainty, EnsembleConfig,
    Error, ModuleSpace, Profile, Tolerances,
};

use crate::io::{print_verdict_human, verdict_json, ProblemFile};

#[derive(Parser)]
#[command(
    name = "bjo",
    about = "Decide and certify Birkhoff-James orthogonality relations on \
             finite-dimensional Hilbert C*-modules",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one relation on a problem file.
    Check(CheckArgs),
    /// Like check, but always reports the witness slot.
    Witness(CheckArgs),
    /// Generate a relation-separating pair with certificates.
    Counterexample(CounterexampleArgs),
    /// Run the implication and equivalence surveys (self-auditing).
    Survey(SurveyArgs),
    /// Run the full verification suite and print a pass/fail table.
    VerifyPaper(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Bj,
    Quasi,
    Strong,
}

#[derive(Args)]
struct CheckArgs {
    /// Relation to decide.
    #[arg(value_enum)]
    relation: RelationArg,
    /// Problem file (JSON).
    file: PathBuf,
    /// Witness tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Emit the verdict as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sqc,
    Prime,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Projection,
    PaperQuartic,
}

#[derive(Args)]
struct CounterexampleArgs {
    /// Which separation to construct.
    #[arg(value_enum)]
    kind: KindArg,
    /// Algebra block dimensions, e.g. "2" or "1,2".
    #[arg(long)]
    algebra: String,
    /// Module row dimensions (defaults to the block dimensions).
    #[arg(long)]
    rows: Option<String>,
    /// Spectral profile of the strong-failure contraction (sqc only).
    #[arg(long, value_enum, default_value_t = ProfileArg::Projection)]
    profile: ProfileArg,
    /// Generator seed (BJO_SEED also honored).
    #[arg(long)]
    seed: Option<u64>,
    /// Write the problem-plus-certificates JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SurveyArgs {
    /// Survey config file (JSON); overrides the inline flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline spaces, semicolon separated: "1,1;2;2:3" (dims[:rows]).
    #[arg(long)]
    spaces: Option<String>,
    /// Samples per space.
    #[arg(long, default_value_t = 500)]
    samples: usize,
    /// Master seed (BJO_SEED also honored).
    #[arg(long)]
    seed: Option<u64>,
    /// Element kinds, comma separated.
    #[arg(long)]
    kinds: Option<String>,
    /// Witness tolerance override (self-audit flags corrupted values).
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the equivalence CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite seed (BJO_SEED also honored).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check(args) => cmd_check(&args, false),
        Command::Witness(args) => cmd_check(&args, true),
        Command::Counterexample(args) => cmd_counterexample(&args),
        Command::Survey(args) => cmd_survey(&args),
        Command::VerifyPaper(args) => cmd_verify_paper(&args),
    };
    ExitCode::from(code)
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("BJO_SEED")
            .ok()
            .and_then(|s| s.parse::<u64>().ok())
    })
    .unwrap_or(42)
}

fn dimension_exit(e: &Error) -> u8 {
    match e {
        Error::NotSelfAdjoint { .. }
        | Error::NotPositive { .. }
        | Error::EmptyInput
        | Error::NotDisjoint { .. }
        | Error::DegenerateSample => 5,
        Error::CommutativeAlgebra | Error::NotEnoughBlocks => 6,
        _ => 4,
    }
}

fn read_problem(path: &Path) -> Result<ProblemFile, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        3u8
    })?;
    serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: {} is not a valid problem file: {e}", path.display());
        3u8
    })
}

fn cmd_check(args: &CheckArgs, force_witness: bool) -> u8 {
    let problem = match read_problem(&args.file) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let (x, y) = match problem.elements() {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return dimension_exit(&e);
        }
    };
    let mut tol = Tolerances::default();
    if let Some(t) = args.tol {
        if !t.is_finite() || t <= 0.0 {
            eprintln!("error: tolerance must be a positive finite number");
            return 5;
        }
        tol = tol.with_witness_tol(t);
    }
    let verdict: Result<Verdict, Error> = match args.relation {
        RelationArg::Bj => is_bj_with(&x, &y, &tol),
        RelationArg::Quasi => is_quasi_strong_with(&x, &y, &tol),
        RelationArg::Strong => is_strong_with(&x, &y, &tol),
    };
    let verdict = match verdict {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: certification failed: {e}");
            return dimension_exit(&e);
        }
    };
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&verdict_json(&verdict)).expect("verdict json")
        );
    } else {
        print_verdict_human(&verdict, force_witness);
    }
    match verdict.answer {
        Certainty::Holds => 0,
        Certainty::Fails => 1,
        Certainty::Borderline => 2,
    }
}

fn parse_dims(text: &str) -> Result<Vec<usize>, u8> {
    let dims: Result<Vec<usize>, _> = text
        .split(',')
        .map(|tok| tok.trim().parse::<usize>())
        .collect();
    match dims {
        Ok(d) if !d.is_empty() => Ok(d),
        _ => {
            eprintln!("error: cannot parse dimension list '{text}'");
            Err(3)
        }
    }
}

fn build_space(algebra: &str, rows: Option<&str>) -> Result<ModuleSpace, u8> {
    let dims = parse_dims(algebra)?;
    let algebra = BlockAlgebra::new(dims).map_err(|e| {
        eprintln!("error: {e}");
        4u8
    })?;
    match rows {
        Some(r) => {
            let rows = parse_dims(r)?;
            ModuleSpace::new(algebra, rows).map_err(|e| {
                eprintln!("error: {e}");
                4u8
            })
        }
        None => Ok(ModuleSpace::self_module(algebra)),
    }
}

fn cmd_counterexample(args: &CounterexampleArgs) -> u8 {
    use rand::SeedableRng;
    let space = match build_space(&args.algebra, args.rows.as_deref()) {
        Ok(sp) => sp,
        Err(code) => return code,
    };
    let seed = resolve_seed(args.seed);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerances::default();

    let payload = match args.kind {
        KindArg::Sqc => {
            let profile = match args.profile {
                ProfileArg::Projection => Profile::Projection,
                ProfileArg::PaperQuartic => Profile::PaperQuartic,
            };
            let out = match make_sqc_pair(&space, None, profile, &mut rng) {
                Ok(o) => o,
                Err(e @ Error::CommutativeAlgebra) => {
                    eprintln!(
                        "error: {e}; the strong and quasi-strong relations provably coincide there"
                    );
                    return 6;
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return dimension_exit(&e);
                }
            };
            let quasi = is_quasi_strong_with(&out.x_prime, &out.y_prime, &tol);
            let strong = is_strong_with(&out.x_prime, &out.y_prime, &tol);
            let mut doc = serde_json::to_value(ProblemFile::from_pair(&out.x_prime, &out.y_prime))
                .expect("problem json");
            doc["certificates"] = json!({
                "kind": "sqc",
                "seed": seed,
                "case": out.case_label.to_string(),
                "expected": { "quasi": "Holds", "strong": "Fails" },
                "verified": {
                    "quasi": quasi.map(|v| io::answer_name(v.answer)).unwrap_or("error"),
                    "strong": strong.map(|v| io::answer_name(v.answer)).unwrap_or("error"),
                },
                "witness": io::pure_state_json(&out.witness),
                "strong_failure": {
                    "b": out.failure_b.blocks().iter()
                        .map(bjo_core::interchange::matrix_to_nested)
                        .collect::<Vec<_>>(),
                    "lambda": bjo_core::interchange::complex_to_pair(out.failure_lambda),
                    "achieved_norm": out.achieved_norm,
                },
            });
            doc
        }
        KindArg::Prime => {
            let out = match make_prime_pair(&space, (0, 1), &mut rng) {
                Ok(o) => o,
                Err(e @ Error::NotEnoughBlocks) => {
                    eprintln!(
                        "error: {e}; the BJ and quasi-strong relations provably coincide there"
                    );
                    return 6;
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return dimension_exit(&e);
                }
            };
            let bj = is_bj_with(&out.u_plus, &out.u_minus, &tol);
            let quasi = is_quasi_strong_with(&out.u_plus, &out.u_minus, &tol);
            let mut doc = serde_json::to_value(ProblemFile::from_pair(&out.u_plus, &out.u_minus))
                .expect("problem json");
            doc["certificates"] = json!({
                "kind": "prime",
                "seed": seed,
                "expected": { "bj": "Holds", "quasi": "Fails" },
                "verified": {
                    "bj": bj.map(|v| io::answer_name(v.answer)).unwrap_or("error"),
                    "quasi": quasi.map(|v| io::answer_name(v.answer)).unwrap_or("error"),
                },
                "bj_witness": {
                    "terms": out.bj_witness.terms().iter().map(|(w, p)| json!({
                        "weight": w,
                        "state": io::pure_state_json(p),
                    })).collect::<Vec<_>>(),
                },
                "quasi_obstruction": out.quasi_obstruction.iter()
                    .map(|(k, v)| json!({"block": k, "value": v}))
                    .collect::<Vec<_>>(),
            });
            doc
        }
    };

    let text = serde_json::to_string_pretty(&payload).expect("payload json");
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return 3;
            }
            println!("wrote {}", path.display());
        }
        None => println!("{text}"),
    }
    0
}

#[derive(serde::Deserialize)]
struct SurveyConfigFile {
    spaces: Vec<SpaceSpec>,
    samples_per_space: usize,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    element_kinds: Option<Vec<ElementKind>>,
    #[serde(default)]
    tolerances: Option<Tolerances>,
}

#[derive(serde::Deserialize)]
struct SpaceSpec {
    blocks: Vec<usize>,
    #[serde(default)]
    rows: Option<Vec<usize>>,
}

fn survey_config(args: &SurveyArgs) -> Result<EnsembleConfig, u8> {
    let default_kinds = vec![
        ElementKind::Ginibre,
        ElementKind::Positive,
        ElementKind::UnitaryColumn,
        ElementKind::QuasiEnriched,
    ];
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            eprintln!("error: cannot read {}: {e}", path.display());
            3u8
        })?;
        let file: SurveyConfigFile = serde_json::from_str(&text).map_err(|e| {
            eprintln!("error: invalid survey config: {e}");
            3u8
        })?;
        let mut spaces = Vec::new();
        for spec in file.spaces {
            let algebra = BlockAlgebra::new(spec.blocks).map_err(|e| {
                eprintln!("error: {e}");
                4u8
            })?;
            let space = match spec.rows {
                Some(rows) => ModuleSpace::new(algebra, rows).map_err(|e| {
                    eprintln!("error: {e}");
                    4u8
                })?,
                None => ModuleSpace::self_module(algebra),
            };
            spaces.push(space);
        }
        return Ok(EnsembleConfig {
            spaces,
            samples_per_space: file.samples_per_space,
            seed: file.seed.unwrap_or_else(|| resolve_seed(args.seed)),
            element_kinds: file.element_kinds.unwrap_or(default_kinds),
            tolerances: file.tolerances.unwrap_or_default(),
        });
    }

    let spaces = match &args.spaces {
        Some(text) => {
            let mut spaces = Vec::new();
            for item in text.split(';') {
                let (dims, rows) = match item.split_once(':') {
                    Some((d, r)) => (d, Some(r)),
                    None => (item, None),
                };
                spaces.push(build_space(dims, rows)?);
            }
            spaces
        }
        None => standard_family(),
    };
    let kinds = match &args.kinds {
        Some(text) => {
            let mut kinds = Vec::new();
            for tok in text.split(',') {
                kinds.push(tok.trim().parse::<ElementKind>().map_err(|e| {
                    eprintln!("error: {e}");
                    3u8
                })?);
            }
            kinds
        }
        None => default_kinds,
    };
    let mut tolerances = Tolerances::default();
    if let Some(t) = args.tol {
        if !t.is_finite() || t <= 0.0 {
            eprintln!("error: tolerance must be a positive finite number");
            return Err(5);
        }
        tolerances = tolerances.with_witness_tol(t);
    }
    Ok(EnsembleConfig {
        spaces,
        samples_per_space: args.samples,
        seed: resolve_seed(args.seed),
        element_kinds: kinds,
        tolerances,
    })
}

fn cmd_survey(args: &SurveyArgs) -> u8 {
    let config = match survey_config(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return 3;
    }
    let implication = match run_implication_survey(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };
    let equivalence = match run_equivalence_survey(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 3;
        }
    };

    if let Some(path) = &args.out {
        let doc = json!({
            "implication": serde_json::to_value(&implication).expect("report"),
            "equivalence": serde_json::to_value(&equivalence).expect("report"),
        });
        if let Err(e) = std::fs::write(path, serde_json::to_string_pretty(&doc).expect("json")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 3;
        }
    }
    if let Some(path) = &args.csv {
        if let Err(e) = std::fs::write(path, equivalence.to_csv()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 3;
        }
    }

    let mut code = 0u8;
    let violations = implication.total_chain_violations() + equivalence.total_chain_violations();
    if violations > 0 {
        code = 7;
        for sp in implication.spaces.iter().chain(equivalence.spaces.iter()) {
            for v in &sp.chain_violations {
                eprintln!(
                    "property violation: chain broken in {} at sample {} (strong {:?}, quasi {:?}, bj {:?})",
                    sp.label, v.sample_index, v.strong, v.quasi, v.bj
                );
                eprintln!("  x = {}", serde_json::to_string(&v.x).expect("exhibit"));
                eprintln!("  y = {}", serde_json::to_string(&v.y).expect("exhibit"));
            }
        }
    }
    for sp in &equivalence.spaces {
        let flags = sp.equivalence.as_ref().expect("equivalence flags");
        if !flags.matches_theory {
            code = 7;
            eprintln!(
                "property violation: {} observed (s=q {}, q=bj {}, s=bj {}) vs predicted ({}, {}, {})",
                sp.label,
                flags.strong_equiv_quasi,
                flags.quasi_equiv_bj,
                flags.strong_equiv_bj,
                flags.expected_strong_equiv_quasi,
                flags.expected_quasi_equiv_bj,
                flags.expected_strong_equiv_bj,
            );
        }
    }

    for sp in &equivalence.spaces {
        let flags = sp.equivalence.as_ref().expect("equivalence flags");
        println!(
            "{:<16} certified {:>6}  borderline {:>4}  s=q {:<5} q=bj {:<5} s=bj {:<5} {}",
            sp.label,
            sp.certified,
            sp.borderline,
            flags.strong_equiv_quasi,
            flags.quasi_equiv_bj,
            flags.strong_equiv_bj,
            if flags.matches_theory { "ok" } else { "MISMATCH" }
        );
    }
    println!(
        "chain violations: {violations}; worst borderline rate {:.3}%",
        implication
            .max_borderline_rate()
            .max(equivalence.max_borderline_rate())
            * 100.0
    );
    code
}

fn cmd_verify_paper(args: &VerifyArgs) -> u8 {
    let seed = resolve_seed(args.seed);
    println!("verification suite, seed {seed}");
    let results = bjo_core::run_all(seed);
    let mut all = true;
    for r in &results {
        all &= r.passed;
        println!(
            "[{}] {:<26} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.key,
            r.detail
        );
    }
    if all {
        println!("all {} criteria passed", results.len());
        0
    } else {
        eprintln!("verification failed; rerun with --seed {seed} to reproduce");
        7
    }
}
