//! `nucheck`: bounded model checking of ν-net models from the command line.
//!
//! Exit codes: 0 when a verdict was reached (whatever it is), 2 for bad
//! input, 3 when the solver failed or its answer could not be used.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nucheck_core::corpus::{load_case_study, STUDIES};
use nucheck_core::driver::{
    render_trace, run_2dbmc, BmcConfig, CellVerdict, DriverError, Engine, TraceStyle,
};
use nucheck_core::encoder::{encode, EncodeOptions, LoopPolicy};
use nucheck_core::fotl::{parse_formula, resolve_predicates, ServerFormula};
use nucheck_core::net::{validate_net, NuNet, Severity, DEFAULT_NODE_LIMIT};
use nucheck_core::oracle::{CheckMode, EvalOptions};
use nucheck_core::pnml::{load_net, render_errors};
use nucheck_core::solver::SolverConfig;

#[derive(Parser)]
#[command(
    name = "nucheck",
    version,
    about = "Bounded model checker for ν-net client-server models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search the (λ, κ) grid for a run satisfying (or violating) a property.
    Check(CheckArgs),
    /// Print the SMT-LIB script for a single (λ, κ) cell.
    Encode(EncodeArgs),
    /// Report structural problems in a net.
    Validate(ModelArgs),
    /// List the bundled case studies and their properties.
    Studies,
}

#[derive(Args)]
struct ModelArgs {
    /// PNML file describing the net.
    #[arg(long, conflicts_with = "study", required_unless_present = "study")]
    net: Option<PathBuf>,
    /// Bundled case study (`aps` or `travel-agency`).
    #[arg(long)]
    study: Option<String>,
}

#[derive(Args)]
struct PropertyArgs {
    /// Property text.
    #[arg(long, short = 'f', conflicts_with_all = ["property_file", "property"])]
    formula: Option<String>,
    /// File holding the property.
    #[arg(long)]
    property_file: Option<PathBuf>,
    /// Name of a property of the bundled study, e.g. `psi1`.
    #[arg(long, short = 'p', conflicts_with = "property_file")]
    property: Option<String>,
}

#[derive(Args)]
struct SemanticsArgs {
    /// Look for a run violating the property instead of one satisfying it.
    #[arg(long)]
    refute: bool,
    /// Let quantifiers range over identifier 0 as well.
    #[arg(long)]
    include_id0: bool,
    /// Literal until rule for `U_c`.
    #[arg(long)]
    strict_until: bool,
    /// Only consider loop-free runs.
    #[arg(long)]
    no_loop: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Smt,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceArg {
    Gantt,
    Steps,
    None,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    property: PropertyArgs,
    #[command(flatten)]
    semantics: SemanticsArgs,
    /// Run bounds, as `N`, `A..B` or `A..=B` (both ends included).
    #[arg(long, default_value = "1..5", value_parser = parse_range)]
    lambda: (u32, u32),
    /// Identifier bounds, in the same form as `--lambda`.
    #[arg(long, default_value = "2..3", value_parser = parse_range)]
    kappa: (u32, u32),
    #[arg(long, value_enum, default_value = "smt")]
    engine: EngineArg,
    /// Solver command line; defaults to `$NUCHECK_SOLVER` or `z3 -in -smt2`.
    #[arg(long)]
    solver: Option<String>,
    /// Per-cell solver timeout in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Write each cell's SMT-LIB script into this directory.
    #[arg(long)]
    emit_smt: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// How to print a found run.
    #[arg(long, value_enum, default_value = "gantt")]
    trace: TraceArg,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    property: PropertyArgs,
    #[command(flatten)]
    semantics: SemanticsArgs,
    #[arg(long, default_value_t = 5)]
    lambda: usize,
    #[arg(long, default_value_t = 3)]
    kappa: u32,
    /// Print size metrics as JSON instead of the script.
    #[arg(long)]
    metrics: bool,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

/// Message plus exit code.
struct Failure {
    code: u8,
    message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl From<DriverError> for Failure {
    fn from(e: DriverError) -> Self {
        Failure {
            code: if e.is_solver_failure() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))
}

struct Model {
    net: NuNet,
    study: Option<nucheck_core::corpus::CaseStudy>,
}

fn load_model(args: &ModelArgs) -> Result<Model, Failure> {
    match (&args.net, &args.study) {
        (Some(path), _) => {
            let text = read(path)?;
            let net = load_net(&text)
                .map_err(|es| input(render_errors(&path.display().to_string(), &es)))?;
            Ok(Model { net, study: None })
        }
        (None, Some(name)) => {
            let study = load_case_study(name).map_err(|e| input(e.to_string()))?;
            Ok(Model {
                net: study.net.clone(),
                study: Some(study),
            })
        }
        (None, None) => Err(input("give --net or --study")),
    }
}

fn load_property(args: &PropertyArgs, model: &Model) -> Result<ServerFormula, Failure> {
    let (file, text) = match (&args.formula, &args.property_file, &args.property) {
        (Some(text), _, _) => ("<formula>".to_string(), text.clone()),
        (_, Some(path), _) => (path.display().to_string(), read(path)?),
        (_, _, Some(name)) => {
            let study = model
                .study
                .as_ref()
                .ok_or_else(|| input("--property needs --study"))?;
            let p = study
                .property(name)
                .ok_or_else(|| input(format!("study {} has no property `{name}`", study.name)))?;
            return Ok(p.formula.clone());
        }
        _ => return Err(input("give --formula, --property-file or --property")),
    };
    let parsed = parse_formula(&text).map_err(|e| input(e.render(&file)))?;
    resolve_predicates(&parsed, &model.net).map_err(|es| {
        input(
            es.iter()
                .map(|e| format!("{file}: {e}"))
                .collect::<Vec<_>>()
                .join("\n"),
        )
    })
}

fn semantics(s: &SemanticsArgs) -> (CheckMode, EvalOptions, LoopPolicy) {
    (
        if s.refute {
            CheckMode::Refute
        } else {
            CheckMode::Witness
        },
        EvalOptions {
            include_id0: s.include_id0,
            strict_until: s.strict_until,
        },
        if s.no_loop {
            LoopPolicy::NoLoopOnly
        } else {
            LoopPolicy::Any
        },
    )
}

fn check(args: CheckArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let f = load_property(&args.property, &model)?;
    let (mode, eval, loops) = semantics(&args.semantics);
    if args.kappa.0 == 0 {
        return Err(input("κ must be at least 1"));
    }
    let engine = match args.engine {
        EngineArg::Smt => {
            let cfg = match &args.solver {
                Some(cmd) => SolverConfig::from_command(cmd),
                None => SolverConfig::from_env(),
            };
            Engine::Smt(cfg.with_timeout(Duration::from_secs(args.timeout)))
        }
        EngineArg::Oracle => Engine::Oracle {
            node_limit: DEFAULT_NODE_LIMIT,
        },
    };
    let cfg = BmcConfig {
        lambdas: args.lambda.0 as usize..=args.lambda.1 as usize,
        kappas: args.kappa.0..=args.kappa.1,
        mode,
        eval,
        loops,
        engine,
        emit_smt: args.emit_smt,
    };
    let report = run_2dbmc(&model.net, &f, &cfg)?;
    if args.json {
        println!("{}", report.to_json());
        return Ok(());
    }
    println!("property: {}", report.property);
    println!("mode:     {} ({} engine)", report.mode, report.engine);
    for c in &report.cells {
        let verdict = match c.verdict {
            CellVerdict::Sat => "sat",
            CellVerdict::Unsat => "unsat",
            CellVerdict::Unknown => "unknown",
        };
        let size = match &c.metrics {
            Some(m) => format!("{} clauses, {} vars", m.clauses, m.variables),
            None => format!("{} runs", c.shapes_checked.unwrap_or(0)),
        };
        println!(
            "  λ={} κ={}: {verdict:<7} {size}, {:.1} ms",
            c.lambda,
            c.kappa,
            c.encode_ms + c.solve_ms
        );
    }
    println!("verdict:  {}", report.summary);
    let style = match args.trace {
        TraceArg::Gantt => Some(TraceStyle::Gantt),
        TraceArg::Steps => Some(TraceStyle::Steps),
        TraceArg::None => None,
    };
    if let (Some(style), Some(trace)) = (style, &report.raw_trace) {
        println!();
        print!("{}", render_trace(&model.net, trace, style));
    }
    Ok(())
}

fn encode_cmd(args: EncodeArgs) -> Result<(), Failure> {
    let model = load_model(&args.model)?;
    let f = load_property(&args.property, &model)?;
    let (mode, eval, loops) = semantics(&args.semantics);
    let enc = encode(
        &model.net,
        &f,
        args.lambda,
        args.kappa,
        EncodeOptions { eval, mode, loops },
    )
    .map_err(|e| input(e.to_string()))?;
    if args.metrics {
        println!(
            "{}",
            serde_json::to_string_pretty(&enc.metrics).expect("metrics serialize")
        );
    } else {
        print!("{}", enc.to_smt2());
    }
    Ok(())
}

fn validate(args: ModelArgs) -> Result<(), Failure> {
    let model = load_model(&args)?;
    let diags = validate_net(&model.net);
    for d in &diags {
        println!("{d}");
    }
    let errors = diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .count();
    println!(
        "{} places, {} transitions, {errors} errors, {} warnings",
        model.net.places().len(),
        model.net.transitions().len(),
        diags.len() - errors
    );
    if errors > 0 {
        return Err(input("the net is not usable"));
    }
    Ok(())
}

fn studies() -> Result<(), Failure> {
    for name in STUDIES {
        let study = load_case_study(name).map_err(|e| input(e.to_string()))?;
        println!(
            "{name}: {} places, {} transitions",
            study.net.places().len(),
            study.net.transitions().len()
        );
        for p in &study.properties {
            println!("  {}: {}", p.name, p.text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => check(a),
        Command::Encode(a) => encode_cmd(a),
        Command::Validate(a) => validate(a),
        Command::Studies => studies(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::parse_range;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4"), Ok((4, 4)));
        assert_eq!(parse_range("1..5"), Ok((1, 5)));
        assert_eq!(parse_range("2..=3"), Ok((2, 3)));
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("a..2").is_err());
    }
}
