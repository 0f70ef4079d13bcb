use std::io::Read;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use coverdefect::covers::{
    build_tower, character_rank, loop_lift_collection, Character, CoverError, FiniteAbelianGroup,
    VoltageGraph, Word,
};
use coverdefect::numtheory::{
    dual_sequence, dual_sequence_certificates, FactorBudget, NtError,
};
use coverdefect::pipeline::{
    bd_signature_recovery, bd_slice_obstruction, homology_cobordism_distinguisher, lens_seed_scan,
    PipelineError,
};
use coverdefect::seifert::SeifertMatrix;
use coverdefect::witt::{HermitianForm, WittClass, WittError};

/// Exact Witt-class defect invariants of knots and 3-manifolds computed
/// from towers of abelian covers, with symbol-certified verdicts.
#[derive(Parser)]
#[command(name = "coverdefect", version)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants of a hermitian form read from a JSON file ("-" = stdin).
    Witt {
        /// Path to {"d": .., "gram": [[["a/b", ..], ..], ..]}.
        file: String,
    },
    /// Defect class of the r-block twisted form of a Seifert matrix at ζ_d^s.
    KnotDefect {
        /// Seifert matrix rows as JSON, e.g. "[[-1,1],[0,-1]]".
        matrix: String,
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        r: u32,
        s: i64,
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        d: u64,
    },
    /// Obstruction report for the n-fold doubled a-twist knot; with both
    /// --d and --s, runs the depth-n signature recovery instead.
    BingDouble {
        #[arg(long)]
        a: i64,
        #[arg(long, value_parser = clap::value_parser!(usize))]
        n: usize,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        s: Option<i64>,
    },
    /// Bounded-support character scan over a two-relator lens-type base.
    LensSeed {
        #[arg(long)]
        r1: u64,
        #[arg(long)]
        r2: u64,
        #[arg(long)]
        a: i64,
        #[arg(long, default_value_t = 2)]
        support_limit: usize,
    },
    /// The coefficient/dual-prime sequence with its symbol table.
    DualPrimes {
        #[arg(long)]
        count: usize,
    },
    /// Pairwise symbol-distinguished product classes.
    Distinguish {
        #[arg(long)]
        count: usize,
    },
    /// Build a tower from JSON and report its shape and α-lift orbits.
    Tower {
        /// Path to {"base": .., "characters": [..], "alpha": [[edge, ±1], ..]?}.
        file: String,
    },
}

enum CliError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Pipeline(PipelineError),
    Form(WittError),
    Cover(CoverError),
    Numeric(NtError),
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "{e}"),
            CliError::Pipeline(e) => write!(f, "{e}"),
            CliError::Form(e) => write!(f, "{e}"),
            CliError::Cover(e) => write!(f, "{e}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Input(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    fn is_budget_exhausted(&self) -> bool {
        match self {
            CliError::Pipeline(e) => e.is_budget_exhausted(),
            CliError::Form(WittError::Numeric(NtError::BudgetExhausted)) => true,
            CliError::Numeric(NtError::BudgetExhausted) => true,
            _ => false,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        CliError::Pipeline(e)
    }
}

impl From<WittError> for CliError {
    fn from(e: WittError) -> Self {
        CliError::Form(e)
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        CliError::Cover(e)
    }
}

impl From<NtError> for CliError {
    fn from(e: NtError) -> Self {
        CliError::Numeric(e)
    }
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn print_invariants(inv: &coverdefect::witt::WittInvariants, dim: usize, json: bool) {
    if json {
        let mut value = serde_json::to_value(inv).expect("invariants serialize");
        value["dimension"] = json!(dim);
        println!("{}", serde_json::to_string_pretty(&value).unwrap());
    } else {
        println!("conductor:          {}", inv.d);
        println!("dimension:          {dim}");
        println!("signature:          {}", inv.signature);
        println!("rank (mod 2):       {}", inv.rank_mod2);
        println!("discriminant:       {}", inv.discriminant_raw);
        match &inv.discriminant_class {
            Some(c) => println!("discriminant class: {c}"),
            None => println!("discriminant class: (no canonical form at this conductor)"),
        }
    }
}

fn print_obstruction(report: &coverdefect::pipeline::ObstructionReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(report).unwrap());
        return;
    }
    print_invariants(&report.invariants, report.witt_class.dim(), false);
    for cert in &report.certificates {
        println!("certificate:        {cert}");
    }
    if let Some(note) = &report.solvability {
        println!("solvability:        {note}");
    }
    if let Some(arf) = report.arf {
        println!("arf:                {arf}");
    }
    println!("verdict:            {}", report.verdict);
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Witt { file } => {
            let form: HermitianForm = serde_json::from_str(&read_input(&file)?)?;
            let class = WittClass::from_form(&form);
            let mut budget = FactorBudget::standard();
            let inv = class.invariants(&mut budget)?;
            print_invariants(&inv, class.dim(), cli.json);
            Ok(0)
        }
        Command::KnotDefect { matrix, r, s, d } => {
            let a: SeifertMatrix = serde_json::from_str(&matrix)?;
            let class = coverdefect::seifert::knot_cover_defect(&a, r, s, d);
            let mut budget = FactorBudget::standard();
            let inv = class.invariants(&mut budget)?;
            print_invariants(&inv, class.dim(), cli.json);
            Ok(0)
        }
        Command::BingDouble { a, n, d, s } => match (d, s) {
            (Some(d), Some(s)) => {
                let mat = coverdefect::seifert::k_a_matrix(a);
                let sig = bd_signature_recovery(&mat, n, d, s)?;
                if cli.json {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&json!({
                            "a": a, "n": n, "d": d, "s": s, "signature": sig,
                        }))
                        .unwrap()
                    );
                } else {
                    println!("defect signature at depth {n}, ζ_{d}^{s}: {sig}");
                }
                Ok(0)
            }
            (None, None) => {
                let report = bd_slice_obstruction(a, n)?;
                print_obstruction(&report, cli.json);
                Ok(0)
            }
            _ => Err(CliError::Input(
                "--d and --s must be given together".to_string(),
            )),
        },
        Command::LensSeed { r1, r2, a, support_limit } => {
            let report = lens_seed_scan(r1, r2, a, support_limit)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                println!("pairs scanned:    {}", report.pairs_scanned);
                println!("distinct classes: {}", report.entries.len());
                println!("orbit sizes ok:   {}", report.r_values_ok);
                println!("shape ok:         {}", report.shape_ok);
                for entry in &report.entries {
                    println!(
                        "  class {} from {:?} (exponents {:?}, shape {})",
                        entry.class_rep, entry.multiset, entry.exponents, entry.shape_ok
                    );
                }
                match &report.realization {
                    Some(real) => println!("realization:      class {}", real.class_rep),
                    None => println!("realization:      none found within support limit"),
                }
            }
            Ok(0)
        }
        Command::DualPrimes { count } => {
            let mut budget = FactorBudget::standard();
            let seq = dual_sequence(count, &mut budget);
            let (certs, ok) = dual_sequence_certificates(&seq)?;
            if cli.json {
                let pairs: Vec<[String; 2]> = seq
                    .pairs
                    .iter()
                    .map(|(a, p)| [a.to_string(), p.to_string()])
                    .collect();
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "pairs": pairs,
                        "truncated": seq.truncated,
                        "symbols": certs,
                        "symbols_ok": ok,
                    }))
                    .unwrap()
                );
            } else {
                for (i, (a, p)) in seq.pairs.iter().enumerate() {
                    println!("a_{} = {a}, p_{} = {p}", i + 1, i + 1);
                }
                println!("symbol table verified: {ok}");
                if seq.truncated {
                    println!("warning: truncated by the factorization budget");
                }
            }
            Ok(if seq.truncated { 2 } else { 0 })
        }
        Command::Distinguish { count } => {
            let report = homology_cobordism_distinguisher(count)?;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                for (i, rep) in report.class_reps.iter().enumerate() {
                    println!("class {} = {rep}", i + 1);
                }
                for cert in &report.certificates {
                    println!("certificate: {cert}");
                }
                println!("all pairwise distinguished: {}", report.all_distinguished);
                if report.truncated {
                    println!("warning: truncated by the factorization budget");
                }
            }
            Ok(if report.truncated { 2 } else { 0 })
        }
        Command::Tower { file } => {
            #[derive(Deserialize)]
            struct TowerInput {
                base: VoltageGraph,
                characters: Vec<Character>,
                #[serde(default)]
                alpha: Option<Word>,
            }
            let input: TowerInput = serde_json::from_str(&read_input(&file)?)?;
            let tower = build_tower(&input.base, &input.characters)?;
            let records = match &input.alpha {
                Some(alpha) => Some(loop_lift_collection(alpha, &tower)?),
                None => None,
            };
            if cli.json {
                let levels: Vec<_> = tower
                    .iter()
                    .map(|level| {
                        json!({
                            "degree": level.degree(),
                            "vertices": level.cover().vertex_count(),
                            "edges": level.cover().edge_count(),
                            "betti": level.cover().betti(),
                        })
                    })
                    .collect();
                let mut out = json!({ "levels": levels });
                if let Some(records) = &records {
                    out["orbits"] = serde_json::to_value(records).unwrap();
                }
                println!("{}", serde_json::to_string_pretty(&out).unwrap());
            } else {
                for (i, level) in tower.iter().enumerate() {
                    println!(
                        "level {}: degree {}, cover with {} vertices, {} edges, b1 = {}",
                        i + 1,
                        level.degree(),
                        level.cover().vertex_count(),
                        level.cover().edge_count(),
                        level.cover().betti()
                    );
                }
                let top = tower.last().expect("build_tower rejects empty towers");
                let z2 = FiniteAbelianGroup::homocyclic(2, 1);
                println!("top character rank over Z_2: {}", character_rank(top, &z2));
                if let Some(records) = &records {
                    for rec in records {
                        println!("orbit at vertex {}: multiplicity {}", rec.start, rec.r);
                    }
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget_exhausted() { 2 } else { 1 })
        }
    }
}
