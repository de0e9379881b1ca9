//! The `forest` command-line toolchain: run, invert, translate, check,
//! property-test, and benchmark programs in the forest and M-SRL languages.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use num_bigint::BigInt;

use forest_core::interp::{
    format_state, run, run_with_observer, NoopObserver, Outcome, State, StepStats, TraceWriter,
};
use forest_core::msrl::{invert_msrl, translate, validate_msrl, MsrlTerm};
use forest_core::parser::{parse_forest, parse_msrl, ParseWarning, SourceFile, SyntaxError};
use forest_core::pretty::{pretty_forest, pretty_msrl};
use forest_core::programs::{bundle, bundle_names};
use forest_core::syntax::{Term, Var};
use forest_core::testkit::{property_suite, GenConfig};

/// Exit codes: 0 success, 1 failed interpretation (bottom), 2 parse or
/// validation errors (and other usage problems), 3 fuel exhausted.
#[derive(Parser)]
#[command(
    name = "forest",
    version,
    about = "Toolchain for the forest reversible language"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a .fst program and print the final state.
    Run {
        file: PathBuf,
        /// Comma-separated initial assignments, e.g. `x=3,y=-7`.
        /// Unassigned variables start at 0.
        #[arg(long, value_name = "NAME=VALUE,...")]
        init: Option<String>,
        /// Stream one tab-separated line per applied rule to stdout.
        #[arg(long, conflicts_with = "json")]
        trace: bool,
        /// Append step statistics to the output.
        #[arg(long)]
        stats: bool,
        /// Cap the number of loop unfoldings (exit code 3 when hit).
        #[arg(long)]
        fuel: Option<u64>,
        /// Emit a single JSON object instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the inverse of a .fst or .srl program.
    Invert { file: PathBuf },
    /// Translate a .srl program into forest source.
    Translate { file: PathBuf },
    /// Check well-formedness and print the validation report.
    Check { file: PathBuf },
    /// Run the property suite over generated programs.
    Prop {
        /// Number of generated cases.
        #[arg(default_value_t = 1_000)]
        count: u64,
        /// Master seed (the FOREST_SEED environment variable overrides it).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the machine-readable summary as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a named program over an input grid and print step counts as CSV.
    Bench {
        /// One of: sign, min_pos, min_neg, min_gen, min_gen_clean.
        program: String,
        #[arg(long, default_value_t = -50, allow_hyphen_values = true)]
        min: i64,
        #[arg(long, default_value_t = 50, allow_hyphen_values = true)]
        max: i64,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Run {
            file,
            init,
            trace,
            stats,
            fuel,
            json,
        } => cmd_run(&file, init.as_deref(), trace, stats, fuel, json),
        Cmd::Invert { file } => cmd_invert(&file),
        Cmd::Translate { file } => cmd_translate(&file),
        Cmd::Check { file } => cmd_check(&file),
        Cmd::Prop { count, seed, json } => cmd_prop(count, seed, json),
        Cmd::Bench { program, min, max } => cmd_bench(&program, min, max),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lang {
    Forest,
    Msrl,
}

fn language_of(path: &Path) -> Result<Lang> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("fst") => Ok(Lang::Forest),
        Some("srl") => Ok(Lang::Msrl),
        _ => bail!(
            "{}: unsupported file extension (expected .fst or .srl)",
            path.display()
        ),
    }
}

fn load(path: &Path) -> Result<SourceFile> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(SourceFile::new(path.display().to_string(), text))
}

fn print_syntax_errors(src: &SourceFile, errors: &[SyntaxError]) {
    for err in errors {
        eprintln!("{}:{err}", src.origin);
    }
}

fn print_warnings(src: &SourceFile, warnings: &[ParseWarning]) {
    for w in warnings {
        eprintln!("{}:{}: warning: {}", src.origin, w.loc, w.message);
    }
}

/// Parses and validates a forest file, or reports and yields exit code 2.
fn forest_term(src: &SourceFile) -> Result<Term, ExitCode> {
    let parsed = match parse_forest(src) {
        Ok(p) => p,
        Err(errors) => {
            print_syntax_errors(src, &errors);
            return Err(ExitCode::from(2));
        }
    };
    print_warnings(src, &parsed.warnings);
    let report = parsed.term.validate();
    if !report.is_ok() {
        eprintln!("{}: validation failed:\n{report}", src.origin);
        return Err(ExitCode::from(2));
    }
    Ok(parsed.term)
}

/// Parses and validates an M-SRL file, or reports and yields exit code 2.
fn msrl_term(src: &SourceFile) -> Result<MsrlTerm, ExitCode> {
    let parsed = match parse_msrl(src) {
        Ok(p) => p,
        Err(errors) => {
            print_syntax_errors(src, &errors);
            return Err(ExitCode::from(2));
        }
    };
    print_warnings(src, &parsed.warnings);
    let report = validate_msrl(&parsed.term);
    if !report.is_ok() {
        eprintln!("{}: validation failed:\n{report}", src.origin);
        return Err(ExitCode::from(2));
    }
    Ok(parsed.term)
}

fn cmd_run(
    path: &Path,
    init: Option<&str>,
    trace: bool,
    stats: bool,
    fuel: Option<u64>,
    json: bool,
) -> Result<ExitCode> {
    if language_of(path)? == Lang::Msrl {
        bail!(
            "{}: `run` executes forest programs; use `forest translate` first",
            path.display()
        );
    }
    let src = load(path)?;
    let term = match forest_term(&src) {
        Ok(t) => t,
        Err(code) => return Ok(code),
    };

    let assignments = match init {
        Some(spec) => parse_init(spec)?,
        None => Vec::new(),
    };
    let mut initial = State::new();
    let mut init_vars = BTreeSet::new();
    for (var, value) in assignments {
        init_vars.insert(var.clone());
        initial.set(var, value);
    }

    let stdout = std::io::stdout();
    let (outcome, step_stats) = if trace {
        let mut tracer = TraceWriter::new(stdout.lock());
        run_with_observer(&term, &initial, fuel, &mut tracer)
    } else {
        run_with_observer(&term, &initial, fuel, &mut NoopObserver)
    };

    if json {
        print_run_json(&term, &init_vars, &outcome, &step_stats);
    } else {
        match &outcome {
            Outcome::Success(final_state) => {
                let vars: BTreeSet<Var> = term.dom().into_iter().chain(init_vars).collect();
                print!("{}", format_state(final_state, vars.iter()));
            }
            Outcome::Failure { reason, location } => {
                println!("BOTTOM: {reason} at {location}");
            }
            Outcome::FuelExhausted { steps_used } => {
                println!("FUEL EXHAUSTED: after {steps_used} loop unfoldings");
            }
        }
        if stats {
            println!(
                "stats: assignments={} guardEvals={} assertEvals={} loopUnfoldings={} total={}",
                step_stats.assignments,
                step_stats.guard_evals,
                step_stats.assert_evals,
                step_stats.loop_unfoldings,
                step_stats.total()
            );
        }
    }

    Ok(match outcome {
        Outcome::Success(_) => ExitCode::SUCCESS,
        Outcome::Failure { .. } => ExitCode::from(1),
        Outcome::FuelExhausted { .. } => ExitCode::from(3),
    })
}

fn stats_json(stats: &StepStats) -> serde_json::Value {
    serde_json::json!({
        "assignments": stats.assignments,
        "guardEvals": stats.guard_evals,
        "assertEvals": stats.assert_evals,
        "loopUnfoldings": stats.loop_unfoldings,
        "total": stats.total(),
    })
}

fn print_run_json(term: &Term, init_vars: &BTreeSet<Var>, outcome: &Outcome, stats: &StepStats) {
    // State values are decimal strings: they are unbounded integers and
    // must survive any JSON parser losslessly.
    let value = match outcome {
        Outcome::Success(final_state) => {
            let vars: BTreeSet<Var> = term.dom().into_iter().chain(init_vars.clone()).collect();
            let state: serde_json::Map<String, serde_json::Value> = vars
                .iter()
                .map(|v| (v.name().to_string(), final_state.get(v).to_string().into()))
                .collect();
            serde_json::json!({
                "schemaVersion": 1,
                "outcome": "success",
                "state": state,
                "failure": null,
                "stats": stats_json(stats),
            })
        }
        Outcome::Failure { reason, location } => serde_json::json!({
            "schemaVersion": 1,
            "outcome": "bottom",
            "state": null,
            "failure": { "reason": reason.to_string(), "location": location.to_string() },
            "stats": stats_json(stats),
        }),
        Outcome::FuelExhausted { steps_used } => serde_json::json!({
            "schemaVersion": 1,
            "outcome": "fuel-exhausted",
            "state": null,
            "failure": null,
            "stepsUsed": steps_used,
            "stats": stats_json(stats),
        }),
    };
    println!("{value}");
}

fn parse_init(spec: &str) -> Result<Vec<(Var, BigInt)>> {
    let mut out = Vec::new();
    for pair in spec.split(',') {
        let pair = pair.trim();
        if pair.is_empty() {
            continue;
        }
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| anyhow!("bad --init entry `{pair}` (expected name=value)"))?;
        let var = Var::try_new(name.trim()).map_err(|e| anyhow!("bad --init entry: {e}"))?;
        let value: BigInt = value
            .trim()
            .parse()
            .map_err(|_| anyhow!("bad --init value for `{var}`: `{}`", value.trim()))?;
        out.push((var, value));
    }
    Ok(out)
}

fn cmd_invert(path: &Path) -> Result<ExitCode> {
    let src = load(path)?;
    match language_of(path)? {
        Lang::Forest => {
            let term = match forest_term(&src) {
                Ok(t) => t,
                Err(code) => return Ok(code),
            };
            let inverse = term.invert().expect("validated above");
            println!("{}", pretty_forest(&inverse));
        }
        Lang::Msrl => {
            let term = match msrl_term(&src) {
                Ok(t) => t,
                Err(code) => return Ok(code),
            };
            println!("{}", pretty_msrl(&invert_msrl(&term)));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_translate(path: &Path) -> Result<ExitCode> {
    if language_of(path)? != Lang::Msrl {
        bail!("{}: `translate` expects a .srl file", path.display());
    }
    let src = load(path)?;
    let term = match msrl_term(&src) {
        Ok(t) => t,
        Err(code) => return Ok(code),
    };
    println!("{}", pretty_forest(&translate(&term)));
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(path: &Path) -> Result<ExitCode> {
    let src = load(path)?;
    let report_text = match language_of(path)? {
        Lang::Forest => match parse_forest(&src) {
            Ok(parsed) => {
                print_warnings(&src, &parsed.warnings);
                let report = parsed.term.validate();
                (report.is_ok(), report.to_string())
            }
            Err(errors) => {
                print_syntax_errors(&src, &errors);
                return Ok(ExitCode::from(2));
            }
        },
        Lang::Msrl => match parse_msrl(&src) {
            Ok(parsed) => {
                print_warnings(&src, &parsed.warnings);
                let report = validate_msrl(&parsed.term);
                (report.is_ok(), report.to_string())
            }
            Err(errors) => {
                print_syntax_errors(&src, &errors);
                return Ok(ExitCode::from(2));
            }
        },
    };
    let (ok, text) = report_text;
    println!("{text}");
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_prop(count: u64, seed_flag: u64, json: bool) -> Result<ExitCode> {
    let seed = match std::env::var("FOREST_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| anyhow!("FOREST_SEED must be an unsigned integer, got `{text}`"))?,
        Err(_) => seed_flag,
    };
    let cfg = GenConfig::default().with_seed(seed);
    let report = property_suite(&cfg, count);

    if json {
        let value = serde_json::json!({
            "schemaVersion": 1,
            "masterSeed": report.master_seed,
            "seedCount": report.seed_count,
            "runSuccesses": report.run_successes,
            "runBottoms": report.run_bottoms,
            "properties": report.properties.iter().map(|p| serde_json::json!({
                "name": p.name,
                "checked": p.checked,
                "failures": p.failures,
            })).collect::<Vec<_>>(),
            "failures": report.failures.iter().map(|f| serde_json::json!({
                "property": f.property,
                "caseSeed": f.case_seed,
                "detail": f.detail,
                "term": f.term_text,
                "state": f.state_text,
            })).collect::<Vec<_>>(),
        });
        println!("{value}");
    } else {
        print!("{}", report.render_text());
    }
    Ok(if report.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_bench(program: &str, min: i64, max: i64) -> Result<ExitCode> {
    let Some(b) = bundle(program) else {
        bail!(
            "unknown program `{program}` (available: {})",
            bundle_names().join(", ")
        );
    };
    if min > max {
        bail!("--min {min} exceeds --max {max}");
    }

    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let inputs: Vec<Var> = b.inputs.iter().map(|(v, _)| v.clone()).collect();
    match inputs.len() {
        1 => {
            writeln!(out, "x,loop_unfoldings,total")?;
            for x in min..=max {
                let initial = State::from_pairs([(inputs[0].clone(), x)]);
                let (_, stats) = run(&b.term, &initial, None);
                writeln!(out, "{x},{},{}", stats.loop_unfoldings, stats.total())?;
            }
        }
        2 => {
            writeln!(out, "m,n,loop_unfoldings,total")?;
            for m in min..=max {
                for n in min..=max {
                    let initial =
                        State::from_pairs([(inputs[0].clone(), m), (inputs[1].clone(), n)]);
                    let (_, stats) = run(&b.term, &initial, None);
                    writeln!(out, "{m},{n},{},{}", stats.loop_unfoldings, stats.total())?;
                }
            }
        }
        n => bail!("program `{program}` takes {n} inputs; bench supports 1 or 2"),
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
