//! Command-line surface for the set-theory workbench: parse, evaluate,
//! normalize, solve, spectrum, gadget emission, and verification.
//!
//! Exit codes: 0 success (verification passed), 1 verification failed,
//! 2 search aborted, 64 usage error, 65 input error. JSON results go to
//! stdout, diagnostics to stderr. `--deterministic` omits timing fields so
//! repeated runs are byte-identical. The environment variable
//! `SYLLOGIST_CAPS` (e.g. `powerset=16,product=65536,level=5,ack-rank=5`)
//! overrides the evaluation caps.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use syllogist_core::gadgets::{
    card_eq_gadget, chain_assignment, divergence_witness, finite_gadget, hf_value_formula,
    powast_expression, repr_formula, singleton_tower, singleton_compact_gadget, GadgetMode,
    GadgetSpec, PairProduct,
};
use syllogist_core::hf::{Caps, HfSet};
use syllogist_core::normalize::{normalize_full, NormalizeConfig};
use syllogist_core::semantics::{eval_formula, Assignment};
use syllogist_core::solver::{rank_spectrum, solve_bounded, SearchConfig, SolveStatus};
use syllogist_core::syntax::{classify_fragment, parse_formula, print_formula, Formula};
use syllogist_core::verify::{
    default_chain_closure_universe, verify_divergence, verify_gadget, verify_chain_closure, verify_ordering,
    VerdictReport,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_ABORTED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INPUT: u8 = 65;

#[derive(Parser)]
#[command(name = "syllogist", version, about = "Workbench for quantifier-free set theory over hereditarily finite sets")]
struct Cli {
    /// Worker threads for the solver (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Byte-identical output: omit timing fields.
    #[arg(long, global = true)]
    deterministic: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Candidate values come from this cumulative-hierarchy level.
    #[arg(long, default_value_t = 3)]
    rank_bound: u32,
    /// Keep only universe values with at most this many elements.
    #[arg(long)]
    card_cap: Option<usize>,
    /// File with one brace-form set per line, replacing the level universe.
    #[arg(long)]
    universe: Option<PathBuf>,
    /// Abort after this many search nodes.
    #[arg(long)]
    candidate_cap: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Literal,
    Semantic,
}

impl From<ModeArg> for GadgetMode {
    fn from(m: ModeArg) -> GadgetMode {
        match m {
            ModeArg::Literal => GadgetMode::Literal,
            ModeArg::Semantic => GadgetMode::Semantic,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula file and print it in canonical form.
    Parse {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a formula under an assignment (JSON map of brace strings).
    Eval {
        file: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
    /// Reduce a formula to normalized conjunctions.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_disjuncts: Option<usize>,
    },
    /// Search for a bounded model; prints a model report as JSON.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Histogram of model domain ranks within the bound.
    Spectrum {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Emit a named gadget formula (plus a `.json` sidecar with --out).
    Gadget {
        /// One of: repr-formula, hf-value, powast, singleton-tower,
        /// singleton-compact, singleton-compact-unordered, card-eq, finite,
        /// divergence-witness, chain-assignment.
        name: String,
        /// Set value in brace form (repr-formula, hf-value).
        #[arg(long)]
        value: Option<String>,
        /// Argument count (powast, at most 3).
        #[arg(long)]
        arity: Option<usize>,
        /// Chain length (chain-assignment).
        #[arg(long)]
        k: Option<u32>,
        /// Singleton realization in the cardinality gadgets.
        #[arg(long, value_enum, default_value = "semantic")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification and print its verdict as JSON.
    Verify {
        /// One of: chain-closure, divergence, ordering, or gadget:<name>.
        claim: String,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value = "semantic")]
        mode: ModeArg,
    },
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Aborted(String),
    VerifyFailed,
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> CliError {
        CliError::Input(e.to_string())
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_formula(path: &Path) -> Result<Formula, CliError> {
    parse_formula(&read_to_string(path)?).map_err(CliError::input)
}

fn load_universe(path: &Path) -> Result<Vec<HfSet>, CliError> {
    let mut out = Vec::new();
    for (i, line) in read_to_string(path)?.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let set: HfSet = line
            .parse()
            .map_err(|e| CliError::Input(format!("universe line {}: {e}", i + 1)))?;
        out.push(set);
    }
    Ok(out)
}

/// Parses `SYLLOGIST_CAPS`, e.g. `powerset=16,product=65536,level=5,ack-rank=5`.
fn caps_from_env() -> Result<Caps, CliError> {
    let mut caps = Caps::default();
    let Ok(spec) = std::env::var("SYLLOGIST_CAPS") else {
        return Ok(caps);
    };
    for item in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("SYLLOGIST_CAPS entry `{item}`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|e| CliError::Input(format!("SYLLOGIST_CAPS `{item}`: {e}")))
        };
        match key.trim() {
            "powerset" => caps.powerset_max_card = parse(value)? as usize,
            "product" => caps.product_max_pairs = parse(value)? as usize,
            "level" => caps.level_max = parse(value)? as u32,
            "ack-rank" => caps.ack_code_max_rank = parse(value)? as u32,
            other => {
                return Err(CliError::Input(format!(
                    "SYLLOGIST_CAPS: unknown cap `{other}`"
                )))
            }
        }
    }
    Ok(caps)
}

fn search_config(args: &SearchArgs, cli_jobs: usize) -> Result<SearchConfig, CliError> {
    let mut cfg = SearchConfig {
        rank_bound: args.rank_bound,
        per_var_card_cap: args.card_cap,
        jobs: cli_jobs,
        deterministic: true,
        caps: caps_from_env()?,
        ..SearchConfig::default()
    };
    if let Some(cap) = args.candidate_cap {
        cfg.candidate_cap = cap;
    }
    if let Some(path) = &args.universe {
        cfg.universe_override = Some(load_universe(path)?);
    }
    Ok(cfg)
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn emit_verdict(report: &VerdictReport, deterministic: bool) -> Result<(), CliError> {
    println!(
        "{}",
        serde_json::to_string_pretty(&report.to_json(!deterministic)).unwrap()
    );
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}

fn build_gadget(
    name: &str,
    value: &Option<String>,
    arity: Option<usize>,
    mode: ModeArg,
    caps: &Caps,
) -> Result<GadgetSpec, CliError> {
    let parse_value = || -> Result<HfSet, CliError> {
        let v = value
            .as_deref()
            .ok_or_else(|| CliError::Input(format!("gadget `{name}` needs --value")))?;
        v.parse().map_err(CliError::input)
    };
    match name {
        "repr-formula" => repr_formula(&parse_value()?, caps).map_err(CliError::input),
        "hf-value" => hf_value_formula(&parse_value()?, caps).map_err(CliError::input),
        "powast" => {
            let k = arity.unwrap_or(2);
            if k > 3 {
                return Err(CliError::Input("powast arity is capped at 3".into()));
            }
            let names: Vec<String> = (1..=k).map(|i| format!("y{i}")).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            Ok(powast_expression("x", &refs))
        }
        "singleton-tower" => Ok(singleton_tower("x")),
        "singleton-compact" => Ok(singleton_compact_gadget("x", "y", PairProduct::Ordered)),
        "singleton-compact-unordered" => {
            Ok(singleton_compact_gadget("x", "y", PairProduct::Unordered))
        }
        "card-eq" => Ok(card_eq_gadget("x", "y", mode.into())),
        "finite" => Ok(finite_gadget("x", mode.into())),
        "divergence-witness" => Ok(divergence_witness("y", "z")),
        other => Err(CliError::Input(format!("unknown gadget `{other}`"))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let caps = caps_from_env()?;
    match cli.command {
        Command::Parse { file, out } => {
            let formula = load_formula(&file)?;
            eprintln!("fragment: {}", classify_fragment(&formula));
            write_or_print(&out, &print_formula(&formula))
        }
        Command::Eval { file, model } => {
            let formula = load_formula(&file)?;
            let json: serde_json::Value =
                serde_json::from_str(&read_to_string(&model)?).map_err(CliError::input)?;
            let m = Assignment::from_json(&json).map_err(CliError::Input)?;
            let value = eval_formula(&m, &formula, &caps).map_err(CliError::input)?;
            println!("{}", serde_json::json!({ "value": value }));
            Ok(())
        }
        Command::Normalize {
            file,
            out,
            max_disjuncts,
        } => {
            let formula = load_formula(&file)?;
            let cfg = NormalizeConfig {
                max_disjuncts: max_disjuncts.unwrap_or(NormalizeConfig::default().max_disjuncts),
            };
            let outputs = normalize_full(&formula, &cfg).map_err(CliError::input)?;
            let mut text = String::new();
            for (i, conj) in outputs.iter().enumerate() {
                text.push_str(&format!("# conjunction {} of {}\n", i + 1, outputs.len()));
                for lit in conj.literals() {
                    text.push_str(&lit.to_string());
                    text.push('\n');
                }
                if i + 1 < outputs.len() {
                    text.push('\n');
                }
            }
            write_or_print(&out, text.trim_end())
        }
        Command::Solve { file, search } => {
            let formula = load_formula(&file)?;
            let cfg = search_config(&search, cli.jobs)?;
            let report = solve_bounded(&formula, &cfg);
            println!(
                "{}",
                serde_json::to_string_pretty(&report.to_json(!cli.deterministic)).unwrap()
            );
            match report.status {
                SolveStatus::Aborted(reason) => Err(CliError::Aborted(reason)),
                _ => Ok(()),
            }
        }
        Command::Spectrum { file, search } => {
            let formula = load_formula(&file)?;
            let cfg = search_config(&search, cli.jobs)?;
            let spectrum = rank_spectrum(&formula, &cfg)
                .map_err(|a| CliError::Aborted(a.reason))?;
            println!(
                "{}",
                serde_json::to_string_pretty(&spectrum.to_json()).unwrap()
            );
            Ok(())
        }
        Command::Gadget {
            name,
            value,
            arity,
            k,
            mode,
            out,
        } => {
            if name == "chain-assignment" {
                let k = k.ok_or_else(|| CliError::Input("chain-assignment needs --k".into()))?;
                let m = chain_assignment(k, "y", "z");
                return write_or_print(
                    &out,
                    &serde_json::to_string_pretty(&m.to_json()).unwrap(),
                );
            }
            let spec = build_gadget(&name, &value, arity, mode, &caps)?;
            let header = format!("# {}: {}\n", spec.name, spec.note);
            let body = format!("{header}{}", print_formula(&spec.formula));
            match &out {
                Some(path) => {
                    write_or_print(&out, &body)?;
                    let sidecar = path.with_extension(format!(
                        "{}json",
                        path.extension()
                            .map(|e| format!("{}.", e.to_string_lossy()))
                            .unwrap_or_default()
                    ));
                    fs::write(
                        &sidecar,
                        serde_json::to_string_pretty(&spec.sidecar_json()).unwrap(),
                    )
                    .map_err(|e| CliError::Input(format!("{}: {e}", sidecar.display())))?;
                    eprintln!("sidecar: {}", sidecar.display());
                    Ok(())
                }
                None => {
                    println!("{body}");
                    Ok(())
                }
            }
        }
        Command::Verify {
            claim,
            search,
            mode,
        } => {
            let cfg = search_config(&search, cli.jobs)?;
            let report = match claim.as_str() {
                "chain-closure" => {
                    let universe = match &search.universe {
                        Some(path) => load_universe(path)?,
                        None => default_chain_closure_universe(&caps),
                    };
                    verify_chain_closure(&universe, &caps).map_err(CliError::input)?
                }
                "divergence" => {
                    // The flag names the maximum model rank here.
                    verify_divergence(search.rank_bound, &cfg)
                        .map_err(|e| CliError::Aborted(e.to_string()))?
                }
                "ordering" => verify_ordering(&caps).map_err(CliError::input)?,
                other => match other.strip_prefix("gadget:") {
                    Some(name) => {
                        let spec = build_gadget(name, &None, None, mode, &caps)?;
                        verify_gadget(&spec, &cfg, &[])
                            .map_err(|e| CliError::Aborted(e.to_string()))?
                    }
                    None => {
                        return Err(CliError::Input(format!(
                            "unknown claim `{other}` (expected chain-closure, divergence, ordering, or gadget:<name>)"
                        )))
                    }
                },
            };
            emit_verdict(&report, cli.deterministic)
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when a pipe closes early (e.g. `syllogist … | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.jobs > 1 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("warning: could not size the thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::VerifyFailed) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(CliError::Aborted(reason)) => {
            eprintln!("aborted: {reason}");
            ExitCode::from(EXIT_ABORTED)
        }
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
