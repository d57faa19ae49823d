//! `sagac`: command-line front end over the saga-semantics library.
//!
//! Exit codes: 0 success (all checks passed), 1 a semantic check failed with
//! witnesses, 2 usage or parse errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sagas::conformance::{
    check_dagger_lemma_with, check_dynamic_to_static_with, check_static_to_dynamic_with,
    check_family_with, environments_for, generate_terms, strictness_witnesses_with, CheckOptions,
    EnvMode, GenBounds, Report, Witness, DEFAULT_STRICTNESS_CAP,
};
use sagas::dynamic_semantics::{
    all_computations_traced, run, Computation, DynamicOptions, Limits, Scheduler, StepTarget,
    DYNAMIC_RULES,
};
use sagas::linearization::{linearizations_with_cap, word_to_string, DEFAULT_LINEARIZATION_CAP};
use sagas::static_semantics::{
    big_steps_traced, top_big_steps_traced, Judgment, StaticOptions, STATIC_RULES,
};
use sagas::syntax::{
    activities_of, parse_activity_term, parse_env, parse_process, ActivityName, ActivityTerm, Env,
    Process,
};

#[derive(Parser)]
#[command(
    name = "sagac",
    about = "Workbench for saga processes: big-step and small-step semantics, linearizations, conformance checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the big-step judgments of a process
    Static {
        process: PathBuf,
        env: PathBuf,
        /// Include the forced outcomes, not only commit/abort/fail
        #[arg(long)]
        all_outcomes: bool,
        #[arg(long)]
        json: bool,
        /// Give missing activities a commit verdict instead of erroring
        #[arg(long)]
        default_commit: bool,
    },
    /// Enumerate or execute small-step computations
    Dynamic {
        process: PathBuf,
        env: PathBuf,
        /// Enumerate every maximal computation
        #[arg(long, conflicts_with = "seed")]
        all: bool,
        /// Execute one run scheduled by a seeded generator
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        default_commit: bool,
        /// Cap on enumerated computations (flag > SAGAC_MAX_TRACES > default)
        #[arg(long)]
        max_traces: Option<usize>,
    },
    /// Print the linearizations of an activity term
    Lin {
        /// Activity term, e.g. "(a; b) | c"
        term: String,
        /// Print only the number of linearizations
        #[arg(long)]
        count: bool,
        #[arg(long)]
        json: bool,
        /// Cap on the materialized set
        #[arg(long, default_value_t = DEFAULT_LINEARIZATION_CAP)]
        cap: usize,
    },
    /// Check the correspondence between the two semantics
    Check(CheckArgs),
    /// Enumerate the generated term family for given bounds
    Generate {
        #[command(flatten)]
        bounds: BoundsArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct CheckArgs {
    /// Process file (omit with --generate)
    #[arg(required_unless_present = "generate")]
    process: Option<PathBuf>,
    /// Environment file (omit with --generate)
    #[arg(required_unless_present = "generate")]
    env: Option<PathBuf>,
    /// Check a generated term family instead of explicit files
    #[arg(long, conflicts_with_all = ["process", "env"])]
    generate: bool,
    #[command(flatten)]
    bounds: BoundsArgs,
    #[arg(long)]
    json: bool,
    /// Worker threads for the family sweep (output independent of N)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    default_commit: bool,
    /// Initial stored compensation (sequential term) for file mode
    #[arg(long)]
    initial_comp: Option<String>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Maximum activities per generated term
    #[arg(long, default_value_t = 3)]
    max_activities: usize,
    /// Maximum saga nesting depth
    #[arg(long, default_value_t = 2)]
    max_depth: usize,
    /// Comma-separated activity alphabet
    #[arg(long, value_delimiter = ',', default_value = "a,b")]
    alphabet: Vec<String>,
    /// Sample this many environments per term instead of all of them
    #[arg(long)]
    env_samples: Option<usize>,
    /// Seed for environment sampling (flag > SAGAC_SEED > default 0)
    #[arg(long)]
    seed: Option<u64>,
}

impl BoundsArgs {
    fn to_bounds(&self) -> Result<GenBounds, String> {
        let alphabet = self
            .alphabet
            .iter()
            .map(|s| ActivityName::new(s.trim()).map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let env_mode = match self.env_samples {
            None => EnvMode::Exhaustive,
            Some(count) => EnvMode::Sampled {
                count,
                seed: self.seed.or_else(env_seed).unwrap_or(0),
            },
        };
        Ok(GenBounds {
            max_activities: self.max_activities,
            max_depth: self.max_depth,
            alphabet,
            env_mode,
        })
    }
}

fn env_seed() -> Option<u64> {
    std::env::var("SAGAC_SEED").ok().and_then(|s| s.parse().ok())
}

fn env_max_traces() -> Option<usize> {
    std::env::var("SAGAC_MAX_TRACES")
        .ok()
        .and_then(|s| s.parse().ok())
}

fn main() -> ExitCode {
    // die quietly when the consumer closes the pipe, e.g. `sagac ... | head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Static {
            process,
            env,
            all_outcomes,
            json,
            default_commit,
        } => cmd_static(&process, &env, all_outcomes, json, default_commit),
        Command::Dynamic {
            process,
            env,
            all,
            seed,
            json,
            default_commit,
            max_traces,
        } => cmd_dynamic(&process, &env, all, seed, json, default_commit, max_traces),
        Command::Lin {
            term,
            count,
            json,
            cap,
        } => cmd_lin(&term, count, json, cap),
        Command::Check(args) => cmd_check(args),
        Command::Generate { bounds, json } => cmd_generate(&bounds, json),
    }
}

fn load_subject(
    process_path: &PathBuf,
    env_path: &PathBuf,
    default_commit: bool,
) -> Result<(Process, Env), String> {
    let process_text = std::fs::read_to_string(process_path)
        .map_err(|e| format!("{}: {e}", process_path.display()))?;
    let process = parse_process(&process_text)
        .map_err(|e| format!("{}:{e}", process_path.display()))?;
    let env_text = std::fs::read_to_string(env_path)
        .map_err(|e| format!("{}: {e}", env_path.display()))?;
    let mut env = parse_env(&env_text).map_err(|e| format!("{}:{e}", env_path.display()))?;
    if default_commit {
        env.fill_default_commit(&activities_of(&process));
    }
    Ok((process, env))
}

fn cmd_static(
    process_path: &PathBuf,
    env_path: &PathBuf,
    all_outcomes: bool,
    json: bool,
    default_commit: bool,
) -> Result<ExitCode, String> {
    let (process, env) = load_subject(process_path, env_path, default_commit)?;
    let options = StaticOptions::default();
    let (judgments, _) = if all_outcomes {
        big_steps_traced(&env, &process, &ActivityTerm::Empty, &options)
    } else {
        top_big_steps_traced(&env, &process, &options)
    }
    .map_err(|e| e.to_string())?;
    let mut sorted: Vec<Judgment> = judgments.into_iter().collect();
    sorted.sort_by_key(|j| (j.outcome.as_str(), j.label.to_string(), j.compensation.to_string()));
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&sorted).map_err(|e| e.to_string())?
        );
    } else {
        for j in &sorted {
            println!("{j}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn render_trace(c: &Computation) {
    for (label, target) in &c.steps {
        match target {
            StepTarget::Continue(cfg) => {
                println!("  {label} => {} | stored: {}", cfg.process, cfg.stored);
            }
            StepTarget::Terminal { outcome, residual } => {
                println!("  {label} => {outcome}, residual: {residual}");
            }
        }
    }
    let dagger = if c.has_dagger() { " | dagger observed" } else { "" };
    println!(
        "gamma: {} -> {}, residual: {}{dagger}",
        c.gamma_string(),
        c.outcome(),
        c.residual()
    );
}

#[allow(clippy::too_many_arguments)]
fn cmd_dynamic(
    process_path: &PathBuf,
    env_path: &PathBuf,
    all: bool,
    seed: Option<u64>,
    json: bool,
    default_commit: bool,
    max_traces: Option<usize>,
) -> Result<ExitCode, String> {
    let (process, env) = load_subject(process_path, env_path, default_commit)?;
    if all {
        let mut limits = Limits::default();
        if let Some(cap) = max_traces.or_else(env_max_traces) {
            limits.max_computations = cap;
        }
        let (computations, _) =
            all_computations_traced(&env, &process, &DynamicOptions::default(), &limits)
                .map_err(|e| e.to_string())?;
        let computations: Vec<Computation> = computations.into_iter().collect();
        if json {
            println!(
                "{}",
                serde_json::to_string_pretty(&computations).map_err(|e| e.to_string())?
            );
        } else {
            for (i, c) in computations.iter().enumerate() {
                println!("trace {}:", i + 1);
                render_trace(c);
            }
            println!("total: {} computations", computations.len());
        }
        Ok(ExitCode::SUCCESS)
    } else {
        let seed = seed.or_else(env_seed);
        let scheduler = match seed {
            Some(seed) => Scheduler::Seeded(seed),
            None => return Err("dynamic requires --all or --seed N".into()),
        };
        let c = run(&env, &process, &scheduler).map_err(|e| e.to_string())?;
        if json {
            // one-element array, so both dynamic modes share the trace schema
            println!(
                "{}",
                serde_json::to_string_pretty(&[&c]).map_err(|e| e.to_string())?
            );
        } else {
            render_trace(&c);
        }
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_lin(term: &str, count: bool, json: bool, cap: usize) -> Result<ExitCode, String> {
    let term = parse_activity_term(term).map_err(|e| format!("term:{e}"))?;
    let words = linearizations_with_cap(&term, cap).map_err(|e| e.to_string())?;
    if count {
        println!("{}", words.len());
    } else if json {
        let rendered: Vec<String> = words.iter().map(|w| word_to_string(w)).collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&rendered).map_err(|e| e.to_string())?
        );
    } else {
        for w in &words {
            println!("{}", word_to_string(w));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn witness_lines(report: &Report) -> Vec<String> {
    report
        .witnesses
        .iter()
        .map(|w| match w {
            Witness::UncoveredComputation {
                gamma,
                outcome,
                residual,
            } => format!("  uncovered computation: gamma {gamma} -> {outcome}, residual {residual}"),
            Witness::UnrealizableJudgment { judgment } => {
                format!("  unrealizable judgment: {judgment}")
            }
            Witness::DaggerViolation {
                gamma_prefix,
                target,
            } => format!("  dagger violation after {gamma_prefix}: target {target}"),
            Witness::EnumerationFailure { error } => format!("  enumeration failure: {error}"),
            Witness::StrictnessPartition { .. } => String::new(),
        })
        .filter(|l| !l.is_empty())
        .collect()
}

fn print_coverage(label: &str, coverage: &sagas::coverage::RuleCoverage, expected: &[&str]) {
    let rendered: Vec<String> = expected
        .iter()
        .map(|r| format!("{r}: {}", coverage.count(r)))
        .collect();
    println!("coverage ({label}): {}", rendered.join(", "));
}

fn cmd_check(args: CheckArgs) -> Result<ExitCode, String> {
    if args.generate {
        return cmd_check_family(&args);
    }
    let (process, env) = load_subject(
        args.process.as_ref().expect("required by clap"),
        args.env.as_ref().expect("required by clap"),
        args.default_commit,
    )?;
    let mut options = CheckOptions::default();
    if let Some(cap) = env_max_traces() {
        options.limits.max_computations = cap;
    }
    if let Some(text) = &args.initial_comp {
        let term = parse_activity_term(text)
            .map_err(|e| format!("initial-comp:{e}"))?
            .normalize();
        if !term.is_sequential() {
            return Err("initial-comp must be a sequential term".into());
        }
        options.initial_store = term;
    }
    let run_checks = || -> Result<_, String> {
        let t1 = check_dynamic_to_static_with(&env, &process, &options)
            .map_err(|e| e.to_string())?;
        let t2 = check_static_to_dynamic_with(&env, &process, &options)
            .map_err(|e| e.to_string())?;
        let dagger =
            check_dagger_lemma_with(&env, &process, &options).map_err(|e| e.to_string())?;
        let strictness =
            strictness_witnesses_with(&env, &process, &options, DEFAULT_STRICTNESS_CAP)
                .map_err(|e| e.to_string())?;
        Ok((t1, t2, dagger, strictness))
    };
    let (t1, t2, dagger, strictness) = match args.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())?
            .install(run_checks),
        None => run_checks(),
    }?;
    let passed = t1.passed && t2.passed && dagger.passed;
    if args.json {
        let value = serde_json::json!({
            "theorem1": t1,
            "theorem2": t2,
            "lemma1": dagger,
            "strictness": strictness,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?
        );
    } else {
        for (name, report) in [("theorem1", &t1), ("theorem2", &t2), ("lemma1", &dagger)] {
            println!("{name}: {}", if report.passed { "PASS" } else { "FAIL" });
            for line in witness_lines(report) {
                println!("{line}");
            }
            if let Some(min) = &report.minimized {
                println!("  minimized failing subterm: {min}");
            }
        }
        let (mut realizable, mut unrealizable) = (0usize, 0usize);
        for w in &strictness.witnesses {
            if let Witness::StrictnessPartition {
                realizable: r,
                unrealizable: u,
                ..
            } = w
            {
                realizable += r.len();
                unrealizable += u.len();
            }
        }
        println!(
            "strictness: {realizable} realizable / {unrealizable} unrealizable linearizations \
             across {} judgments",
            strictness.stats.judgments
        );
        for w in &strictness.witnesses {
            if let Witness::StrictnessPartition {
                judgment,
                unrealizable,
                truncated,
                ..
            } = w
            {
                if !unrealizable.is_empty() {
                    let marker = if *truncated { " (sampled)" } else { "" };
                    println!(
                        "  {} | unrealizable{marker}: {}",
                        judgment,
                        unrealizable.join(" / ")
                    );
                }
            }
        }
        print_coverage("static", &t1.static_coverage, &STATIC_RULES);
        print_coverage("dynamic", &t1.dynamic_coverage, &DYNAMIC_RULES);
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_check_family(args: &CheckArgs) -> Result<ExitCode, String> {
    let bounds = args.bounds.to_bounds()?;
    let options = CheckOptions::default();
    let sweep = || check_family_with(&bounds, &options);
    let report = match args.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())?
            .install(sweep),
        None => sweep(),
    }
    .map_err(|e| e.to_string())?;
    let passed = report.all_passed();
    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
        );
    } else {
        println!(
            "family: {} terms, {} subjects, {} computations, {} judgments",
            report.terms, report.subjects, report.computations, report.judgments
        );
        for (name, failures) in [
            ("theorem1", &report.dynamic_to_static_failures),
            ("theorem2", &report.static_to_dynamic_failures),
            ("lemma1", &report.dagger_failures),
        ] {
            if failures.is_empty() {
                println!("{name}: PASS");
            } else {
                println!("{name}: FAIL ({} subjects)", failures.len());
                for r in failures.iter().take(5) {
                    println!("  subject: {}", r.subject.process);
                    for line in witness_lines(r) {
                        println!("  {line}");
                    }
                    if let Some(min) = &r.minimized {
                        println!("  minimized failing subterm: {min}");
                    }
                }
            }
        }
        println!("null-reading divergences: {}", report.null_divergences);
        print_coverage("static", &report.static_coverage, &STATIC_RULES);
        print_coverage("dynamic", &report.dynamic_coverage, &DYNAMIC_RULES);
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_generate(bounds: &BoundsArgs, json: bool) -> Result<ExitCode, String> {
    let bounds = bounds.to_bounds()?;
    let terms = generate_terms(&bounds);
    if json {
        let rendered: Vec<serde_json::Value> = terms
            .iter()
            .map(|t| {
                let envs = environments_for(t, &bounds).len();
                serde_json::json!({ "process": t.to_string(), "envs": envs })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&rendered).map_err(|e| e.to_string())?
        );
    } else {
        for t in &terms {
            println!("{t}");
        }
        eprintln!("total: {} terms", terms.len());
    }
    Ok(ExitCode::SUCCESS)
}
