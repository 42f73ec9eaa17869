mod input;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use quadratizer::gadgets::{catalog, Status};
use quadratizer::io::text::NameTable;
use quadratizer::io::{print, to_qubo};
use quadratizer::pipeline::compare_strategies;
use quadratizer::verify::default_max_states;
use quadratizer::{quadratize, Domain, Error, Mode, Polynomial, Strategy, VarId, VariableRegistry, Verifier};

#[derive(Parser)]
#[command(name = "quadratizer", version, about = "Reduce pseudo-Boolean polynomials to quadratic form")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a polynomial to degree at most 2.
    Quadratize(QuadratizeArgs),
    /// Check a quadratized polynomial against its original by enumeration.
    Verify(VerifyArgs),
    /// Print degree, term histogram and submodularity figures.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Change variable domain or file format.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        to: ConvertTarget,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the single-term gadgets and the other rewrites.
    ListGadgets {
        /// Verify each single-term gadget at its smallest degree.
        #[arg(long)]
        check: bool,
    },
}

#[derive(clap::Args)]
struct QuadratizeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Named preset, see `list-gadgets`.
    #[arg(long, default_value = "default")]
    strategy: String,
    /// Strategy override such as `positive=ptr_bcr4,ptr_bg`; repeatable.
    #[arg(long = "route", value_name = "KEY=VALUE")]
    routes: Vec<String>,
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    allow_experimental: bool,
    #[arg(long)]
    max_states: Option<u128>,
    /// Accepted for reproducible invocations; all built-in strategies are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    original: PathBuf,
    #[arg(long)]
    quadratized: PathBuf,
    /// Comma-separated auxiliary names; defaults to variables absent from the original.
    #[arg(long, value_delimiter = ',')]
    aux: Vec<String>,
    #[arg(long, value_enum, default_value_t = VerifyMode::Pointwise)]
    mode: VerifyMode,
    #[arg(long)]
    max_states: Option<u128>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Qubo,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyMode {
    Pointwise,
    Groundstate,
    Conditional,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvertTarget {
    Spin,
    Boolean,
    Json,
    Text,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let code = exit_code(&e);
            // the context already names the counterexample variables
            if code == 1 {
                eprintln!("error: {e}");
            } else {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let lib = e.chain().find_map(|c| c.downcast_ref::<Error>());
    match lib {
        Some(Error::VerificationFailed(_)) => 1,
        Some(Error::EnumerationCapExceeded { .. }) => 3,
        Some(Error::NoApplicableGadget(_)) => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Quadratize(args) => cmd_quadratize(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Analyze { input } => cmd_analyze(input),
        Command::Convert { input, to, out } => cmd_convert(input, to, out),
        Command::ListGadgets { check } => cmd_list_gadgets(check),
    }
}

fn cmd_quadratize(args: QuadratizeArgs) -> Result<ExitCode> {
    let mut strategy = Strategy::preset(&args.strategy)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy `{}`", args.strategy)))?;
    for route in &args.routes {
        let (key, value) = route
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("expected KEY=VALUE, got `{route}`")))?;
        strategy.set(key.trim(), value.trim())?;
    }
    strategy.verify_after |= args.verify;
    strategy.allow_experimental |= args.allow_experimental;
    if let Some(cap) = args.max_states {
        strategy.max_states = cap;
    }
    if let Some(seed) = args.seed {
        eprintln!("seed {seed}");
    }

    let mut reg = VariableRegistry::new();
    let p = input::load_file(&args.input, &mut reg)?;
    let result = match quadratize(&p, &mut reg, &strategy) {
        Ok(r) => r,
        Err(Error::VerificationFailed(report)) => {
            let described = format!("verification failed: {}", report.describe(&reg));
            return Err(anyhow!(Error::VerificationFailed(report)).context(described));
        }
        Err(e) => return Err(e.into()),
    };

    let names = NameTable::new(&reg);
    eprintln!("strategy {}: guarantee {}", strategy.name, result.guarantee);
    for (id, trace) in &result.aux_map {
        eprintln!("  {} ({}): {trace}", names.name(*id), reg.label(*id).unwrap_or("-"));
    }
    let c = &result.cost;
    eprintln!(
        "aux {}, non-submodular {}, quadratic terms {}, terms {}",
        c.aux_count, c.non_submodular, c.quadratic_terms, c.terms
    );
    if let Some(report) = &result.report {
        eprintln!("{}", report.describe(&reg));
    }

    let body = match args.format {
        Format::Text => print(&result.output, &reg),
        Format::Json => input::json(&result.output, &reg),
        Format::Qubo => {
            let q = to_qubo(&result.output, &reg, &result.guarantee.to_string(), result.trace.clone())?;
            serde_json::to_string_pretty(&q)?
        }
    };
    input::emit(args.out.as_deref(), &body)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let mut reg = VariableRegistry::new();
    let original = input::load_file(&args.original, &mut reg)?;
    let transformed = input::load_file(&args.quadratized, &mut reg)?;
    let aux = resolve_aux(&args.aux, &original, &transformed, &reg)?;
    let verifier = Verifier::new(args.max_states.unwrap_or_else(default_max_states));
    let mode = match args.mode {
        VerifyMode::Pointwise => Mode::Pointwise,
        VerifyMode::Groundstate => Mode::GroundState,
        VerifyMode::Conditional => Mode::Conditional,
    };
    let report = verifier.check(mode, &original, &transformed, &aux)?;
    println!("{}", report.describe(&reg));
    println!("states enumerated: {}", report.stats.states_enumerated);
    if let (Some(a), Some(b)) = (&report.stats.min_original, &report.stats.min_transformed) {
        println!("minimum: original {a}, transformed {b}");
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn resolve_aux(names: &[String], original: &Polynomial, transformed: &Polynomial, reg: &VariableRegistry) -> Result<Vec<VarId>> {
    if names.is_empty() {
        let orig = original.support_ids();
        return Ok(transformed.support_ids().into_iter().filter(|id| !orig.contains(id)).collect());
    }
    let table = NameTable::new(reg);
    names
        .iter()
        .map(|n| {
            let n = n.trim();
            reg.lookup(n)
                .map(|v| v.id)
                .or_else(|| reg.vars().map(|v| v.id).find(|&id| table.name(id) == n))
                .ok_or_else(|| anyhow!(Error::VariableMismatch(format!("no variable named `{n}`"))))
        })
        .collect()
}

fn cmd_analyze(path: PathBuf) -> Result<ExitCode> {
    let mut reg = VariableRegistry::new();
    let p = input::load_file(&path, &mut reg)?;
    let support = p.support();
    let count = |d: Domain| support.iter().filter(|v| v.domain == d).count();
    println!(
        "variables: {} (boolean {}, spin {}, ternary {})",
        support.len(),
        count(Domain::Boolean),
        count(Domain::Spin),
        count(Domain::Ternary)
    );
    println!("terms: {}", p.len());
    println!("degree: {}", p.degree());
    let mut histogram: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (m, c) in p.terms() {
        let slot = histogram.entry(m.degree()).or_default();
        if c > &quadratizer::rational::int(0) {
            slot.0 += 1;
        } else {
            slot.1 += 1;
        }
    }
    for (d, (pos, neg)) in &histogram {
        println!("  degree {d}: {} terms ({pos} positive, {neg} negative)", pos + neg);
    }
    if p.degree() <= 2 {
        match p.submodularity_report() {
            Ok(r) => println!(
                "submodularity: {} of {} quadratic terms non-submodular, max |coeff| {}",
                r.non_submodular,
                r.quadratic_terms,
                quadratizer::rational::format_short(&r.max_abs_coefficient)
            ),
            Err(e) => println!("submodularity: n/a ({e})"),
        }
    } else {
        let strategies: Vec<Strategy> =
            Strategy::preset_names().iter().filter_map(|n| Strategy::preset(n)).collect();
        println!("strategies:");
        for row in compare_strategies(&p, &reg, &strategies) {
            println!("  {row}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_convert(path: PathBuf, to: ConvertTarget, out: Option<PathBuf>) -> Result<ExitCode> {
    let mut reg = VariableRegistry::new();
    let p = input::load_file(&path, &mut reg)?;
    let all_in = |d: Domain| p.support().iter().all(|v| v.domain == d);
    let body = match to {
        ConvertTarget::Spin if all_in(Domain::Spin) => print(&p, &reg),
        ConvertTarget::Spin => {
            let q = p.to_spin(&mut reg)?;
            print(&q, &reg)
        }
        ConvertTarget::Boolean if all_in(Domain::Boolean) => print(&p, &reg),
        ConvertTarget::Boolean => {
            let q = p.to_boolean(&mut reg)?;
            print(&q, &reg)
        }
        ConvertTarget::Json => input::json(&p, &reg),
        ConvertTarget::Text => print(&p, &reg),
    };
    input::emit(out.as_deref(), &body)?;
    Ok(ExitCode::SUCCESS)
}

const OTHER_REWRITES: &[(&str, &str, &str)] = &[
    ("rosenberg", "PointwiseMin", "pair substitution across terms, 1 aux per pair"),
    ("fgbz_negative", "PointwiseMin", "negative terms sharing a common part, 1 aux per group"),
    ("fgbz_positive", "PointwiseMin", "positive terms sharing a common part, 1 aux per group"),
    ("pairwise_cover", "PointwiseMin", "FGBZ over discovered groups"),
    ("sfr_bcr1..4", "PointwiseMin", "indicator of exactly c of n variables set"),
    ("czw_count4", "GroundStatePreserving", "4-variable counting gadget, checked per use"),
    ("ternary_to_binary", "GroundStatePreserving", "ternary variable to two spins, checked per use"),
    ("deduc_reduc", "ConditionalMin", "zero-aux rewrite from a proven deduction"),
    ("elc", "ConditionalMin", "zero-aux rewrite from an excludable local configuration"),
    ("split_reduc", "ConditionalMin", "branch on a variable, quadratize each side"),
];

fn cmd_list_gadgets(check: bool) -> Result<ExitCode> {
    println!("{:<24} {:<9} {:<7} {:<8} {:<22} {:<12} aux(k=3..6)", "name", "sign", "domain", "degrees", "guarantee", "status");
    for d in catalog() {
        let degrees = match d.max_degree {
            Some(hi) if hi == d.min_degree => format!("{hi}"),
            Some(hi) => format!("{}-{hi}", d.min_degree),
            None => format!("{}+", d.min_degree),
        };
        let degrees = if d.odd_only { format!("{degrees} odd") } else { degrees };
        let status = match d.status {
            Status::MustPass => "must-pass",
            Status::Experimental => "experimental",
        };
        let aux: Vec<String> = (3..=6).map(|k| (d.claimed_aux)(k).to_string()).collect();
        let mut line = format!(
            "{:<24} {:<9} {:<7} {:<8} {:<22} {:<12} {}",
            d.name,
            d.sign_text(),
            format!("{:?}", d.domain).to_lowercase(),
            degrees,
            d.guarantee.to_string(),
            status,
            aux.join(",")
        );
        if check {
            line.push_str(&format!("  {}", smallest_case_verdict(d)?));
        }
        println!("{line}");
    }
    println!();
    for (name, guarantee, what) in OTHER_REWRITES {
        println!("{name:<24} {guarantee:<22} {what}");
    }
    println!();
    println!("strategies: {}", Strategy::preset_names().join(", "));
    Ok(ExitCode::SUCCESS)
}

fn smallest_case_verdict(d: &quadratizer::gadgets::GadgetDescriptor) -> Result<String> {
    let Some(k) = d.degrees(6).find(|&k| k >= 3) else {
        return Ok("n/a".into());
    };
    let coeff = match d.sign_text() {
        "negative" => quadratizer::rational::int(-1),
        _ => quadratizer::rational::int(1),
    };
    let mut reg = VariableRegistry::new();
    let vars = match d.domain {
        Domain::Spin => reg.spins(k)?,
        _ => reg.booleans(k)?,
    };
    let m = quadratizer::Monomial::from_vars(vars);
    let result = match (d.build)(&coeff, &m, &mut reg) {
        Ok(r) => r,
        Err(e) => bail!("building {} at degree {k}: {e}", d.name),
    };
    let report = result.verify(&Verifier::default()).context("verifying")?;
    Ok(format!("k={k}: {}", if report.passed { "pass" } else { "FAIL" }))
}
