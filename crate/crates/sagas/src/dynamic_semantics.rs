//! Small-step semantics: the labeled transition system over runtime
//! configurations, exhaustive enumeration of maximal computations, and
//! scheduled single-trace execution.
//!
//! A configuration pairs a process (possibly containing runtime forms) with
//! a sequential stored compensation. Steps carry an activity label, the
//! silent label, or the dagger label marking an abort that is delayed until
//! running compensations finish.
//!
//! The propagation rules for abort and fail terminals accept any non-dagger
//! premise label and keep it in the conclusion. A killed block whose body
//! commits re-raises the delayed abort under the label of its final
//! compensation activity, and that abort must still propagate through
//! enclosing sagas and parallels; fixing the propagated label to the silent
//! one would lose the observation or strand the configuration.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::coverage::RuleCoverage;
use crate::error::Error;
use crate::syntax::{activities_of, ActivityName, ActivityTerm, Env, Process, Verdict};

/// Names of the small-step rules, as used in coverage reports.
pub const DYNAMIC_RULES: [&str; 24] = [
    "zero-d",
    "s-act-d",
    "f-act-d",
    "step-d",
    "k-step-d",
    "s-step-d",
    "a-step-d",
    "f-step-d",
    "par-d",
    "k-par-d",
    "s-par-d",
    "a-par-d",
    "a-par-fin-d",
    "f-par-d",
    "saga-d",
    "k-saga-d",
    "s-saga-d",
    "a-saga-d",
    "f-saga-d",
    "prot-d",
    "k-prot-d",
    "s-prot-d",
    "s-killed-d",
    "a-prot-d",
];

/// Label on a single transition: an executed activity, the silent label, or
/// the delayed-abort marker.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepLabel {
    Silent,
    Dagger,
    Act(ActivityName),
}

impl StepLabel {
    pub fn is_dagger(&self) -> bool {
        matches!(self, StepLabel::Dagger)
    }

    pub fn activity(&self) -> Option<&ActivityName> {
        match self {
            StepLabel::Act(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepLabel::Silent => f.write_str("tau"),
            StepLabel::Dagger => f.write_str("dagger"),
            StepLabel::Act(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for StepLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Outcome of a terminal step. Only commit, abort and fail terminate a
/// computation; the forced outcomes are a big-step notion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalOutcome {
    Commit,
    Abort,
    Fail,
}

impl TerminalOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminalOutcome::Commit => "commit",
            TerminalOutcome::Abort => "abort",
            TerminalOutcome::Fail => "fail",
        }
    }

    pub fn as_outcome(&self) -> crate::static_semantics::Outcome {
        match self {
            TerminalOutcome::Commit => crate::static_semantics::Outcome::Commit,
            TerminalOutcome::Abort => crate::static_semantics::Outcome::Abort,
            TerminalOutcome::Fail => crate::static_semantics::Outcome::Fail,
        }
    }
}

impl fmt::Display for TerminalOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A runtime configuration: process plus sequential stored compensation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Config {
    pub process: Process,
    pub stored: ActivityTerm,
}

impl Config {
    pub fn new(process: Process, stored: ActivityTerm) -> Self {
        Config { process, stored }
    }

    pub fn initial(process: Process) -> Self {
        Config::new(process, ActivityTerm::Empty)
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.process, self.stored)
    }
}

/// Where a step lands: a successor configuration or a terminal pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepTarget {
    Continue(Config),
    Terminal {
        outcome: TerminalOutcome,
        residual: ActivityTerm,
    },
}

impl StepTarget {
    pub fn is_terminal(&self) -> bool {
        matches!(self, StepTarget::Terminal { .. })
    }
}

/// A single derivable transition.
pub type Step = (StepLabel, StepTarget);

/// Extracts the protected compensations of a process: what must still run,
/// in protected mode, when a sibling aborts. Activities that have not
/// committed contribute nothing; a running saga contributes the extract of
/// its body followed by its store; protected and killed blocks contribute
/// their whole body. The result is normalized.
pub fn extract(p: &Process) -> Result<ActivityTerm, Error> {
    let term = match p {
        Process::Zero | Process::Activity { .. } => ActivityTerm::Empty,
        Process::Seq(left, _) => extract(left)?,
        Process::Par(left, right) => ActivityTerm::par(extract(left)?, extract(right)?),
        Process::Saga { body, stored } => ActivityTerm::seq(extract(body)?, stored.clone()),
        Process::Prot(body) | Process::Killed(body) => {
            body.as_activity_term()
                .ok_or_else(|| Error::MalformedProtectedBody {
                    process: body.to_string(),
                })?
        }
    };
    Ok(term.normalize())
}

/// True when the process has no behavior: it contains no activity, where
/// running sagas are judged by their body and protected blocks by theirs.
pub fn is_null(p: &Process) -> bool {
    match p {
        Process::Zero => true,
        Process::Activity { .. } => false,
        Process::Seq(l, r) | Process::Par(l, r) => is_null(l) && is_null(r),
        Process::Saga { body, .. } => is_null(body),
        Process::Prot(body) | Process::Killed(body) => is_null(body),
    }
}

/// The alternative reading of the null predicate where every protected or
/// killed block counts as behavior. The transition rules only ever apply the
/// predicate to extracted compensation terms, where the two readings agree;
/// conformance reports count configurations where they diverge.
pub fn is_null_strict(p: &Process) -> bool {
    match p {
        Process::Zero => true,
        Process::Activity { .. } => false,
        Process::Seq(l, r) | Process::Par(l, r) => is_null_strict(l) && is_null_strict(r),
        Process::Saga { body, .. } => is_null_strict(body),
        Process::Prot(_) | Process::Killed(_) => false,
    }
}

/// Knobs for the step generator. Rules listed in `disabled` never fire;
/// the test harness uses this to show each rule carries weight.
#[derive(Debug, Clone, Default)]
pub struct DynamicOptions {
    pub disabled: BTreeSet<String>,
}

impl DynamicOptions {
    pub fn disable(rule: &str) -> Self {
        DynamicOptions {
            disabled: [rule.to_string()].into_iter().collect(),
        }
    }

    fn enabled(&self, rule: &str) -> bool {
        !self.disabled.contains(rule)
    }
}

/// Every single step derivable for a configuration, as a set: overlapping
/// rule instances yielding the same labeled target collapse.
pub fn steps(env: &Env, config: &Config) -> Result<BTreeSet<Step>, Error> {
    steps_traced(env, config, &DynamicOptions::default()).map(|(s, _)| s)
}

/// As [`steps`], also reporting which rules fired.
pub fn steps_traced(
    env: &Env,
    config: &Config,
    options: &DynamicOptions,
) -> Result<(BTreeSet<Step>, RuleCoverage), Error> {
    require_total(env, &config.process)?;
    let mut stepper = Stepper {
        env,
        options,
        coverage: RuleCoverage::new(),
    };
    let steps = stepper.derive(&config.process, &config.stored)?;
    Ok((steps, stepper.coverage))
}

// Totality is over the process's names, including stored compensations
// inside it; the names of the top-level store never execute and need no
// verdict.
fn require_total(env: &Env, p: &Process) -> Result<(), Error> {
    for name in activities_of(p) {
        if env.get(&name).is_none() {
            return Err(Error::MissingVerdict {
                name: name.to_string(),
            });
        }
    }
    Ok(())
}

struct Stepper<'a> {
    env: &'a Env,
    options: &'a DynamicOptions,
    coverage: RuleCoverage,
}

impl Stepper<'_> {
    fn derive(&mut self, p: &Process, stored: &ActivityTerm) -> Result<BTreeSet<Step>, Error> {
        let mut out = BTreeSet::new();
        match p {
            Process::Zero => {
                self.emit(
                    &mut out,
                    "zero-d",
                    StepLabel::Silent,
                    StepTarget::Terminal {
                        outcome: TerminalOutcome::Commit,
                        residual: stored.clone(),
                    },
                );
            }
            Process::Activity {
                forward,
                compensation,
            } => match self.verdict(forward) {
                Verdict::Commit => {
                    let residual = match compensation {
                        Some(c) => ActivityTerm::seq(ActivityTerm::Act(c.clone()), stored.clone())
                            .normalize(),
                        None => stored.clone(),
                    };
                    self.emit(
                        &mut out,
                        "s-act-d",
                        StepLabel::Act(forward.clone()),
                        StepTarget::Terminal {
                            outcome: TerminalOutcome::Commit,
                            residual,
                        },
                    );
                }
                Verdict::Abort => {
                    self.emit(
                        &mut out,
                        "f-act-d",
                        StepLabel::Silent,
                        StepTarget::Terminal {
                            outcome: TerminalOutcome::Abort,
                            residual: stored.clone(),
                        },
                    );
                }
            },
            Process::Seq(left, right) => {
                for (label, target) in self.derive(left, stored)? {
                    match target {
                        StepTarget::Continue(cfg) => {
                            if label.is_dagger() {
                                // delayed abortion discards the continuation
                                self.emit(&mut out, "k-step-d", label, StepTarget::Continue(cfg));
                            } else {
                                self.emit(
                                    &mut out,
                                    "step-d",
                                    label,
                                    StepTarget::Continue(Config::new(
                                        Process::seq(cfg.process, (**right).clone()),
                                        cfg.stored,
                                    )),
                                );
                            }
                        }
                        StepTarget::Terminal { outcome, residual } => {
                            debug_assert!(!label.is_dagger());
                            match outcome {
                                TerminalOutcome::Commit => {
                                    self.emit(
                                        &mut out,
                                        "s-step-d",
                                        label,
                                        StepTarget::Continue(Config::new(
                                            (**right).clone(),
                                            residual,
                                        )),
                                    );
                                }
                                TerminalOutcome::Abort => {
                                    self.emit(
                                        &mut out,
                                        "a-step-d",
                                        label,
                                        StepTarget::Terminal { outcome, residual },
                                    );
                                }
                                TerminalOutcome::Fail => {
                                    self.emit(
                                        &mut out,
                                        "f-step-d",
                                        label,
                                        StepTarget::Terminal { outcome, residual },
                                    );
                                }
                            }
                        }
                    }
                }
            }
            Process::Par(left, right) => {
                for mirror in [false, true] {
                    let (active, sibling) = if mirror {
                        (right, left)
                    } else {
                        (left, right)
                    };
                    let rebuild = |stepped: Process, kept: Process| {
                        if mirror {
                            Process::par(kept, stepped)
                        } else {
                            Process::par(stepped, kept)
                        }
                    };
                    for (label, target) in self.derive(active, stored)? {
                        match target {
                            StepTarget::Continue(cfg) => {
                                if label.is_dagger() {
                                    let killed =
                                        Process::killed(extract(sibling)?.as_process());
                                    self.emit(
                                        &mut out,
                                        "k-par-d",
                                        label,
                                        StepTarget::Continue(Config::new(
                                            rebuild(cfg.process, killed),
                                            cfg.stored,
                                        )),
                                    );
                                } else {
                                    self.emit(
                                        &mut out,
                                        "par-d",
                                        label,
                                        StepTarget::Continue(Config::new(
                                            rebuild(cfg.process, (**sibling).clone()),
                                            cfg.stored,
                                        )),
                                    );
                                }
                            }
                            StepTarget::Terminal { outcome, residual } => match outcome {
                                TerminalOutcome::Commit => {
                                    self.emit(
                                        &mut out,
                                        "s-par-d",
                                        label,
                                        StepTarget::Continue(Config::new(
                                            (**sibling).clone(),
                                            residual,
                                        )),
                                    );
                                }
                                TerminalOutcome::Abort => {
                                    let protected = extract(sibling)?;
                                    if protected.is_empty() {
                                        self.emit(
                                            &mut out,
                                            "a-par-fin-d",
                                            label,
                                            StepTarget::Terminal { outcome, residual },
                                        );
                                    } else {
                                        let label = if label == StepLabel::Silent {
                                            StepLabel::Dagger
                                        } else {
                                            label
                                        };
                                        self.emit(
                                            &mut out,
                                            "a-par-d",
                                            label,
                                            StepTarget::Continue(Config::new(
                                                Process::killed(protected.as_process()),
                                                residual,
                                            )),
                                        );
                                    }
                                }
                                TerminalOutcome::Fail => {
                                    self.emit(
                                        &mut out,
                                        "f-par-d",
                                        label,
                                        StepTarget::Terminal {
                                            outcome,
                                            residual: ActivityTerm::Empty,
                                        },
                                    );
                                }
                            },
                        }
                    }
                }
            }
            Process::Saga { body, stored: own } => {
                for (label, target) in self.derive(body, own)? {
                    match target {
                        StepTarget::Continue(cfg) => {
                            let successor = StepTarget::Continue(Config::new(
                                Process::running_saga(cfg.process, cfg.stored),
                                stored.clone(),
                            ));
                            if label.is_dagger() {
                                // the saga boundary stops the delayed abort
                                self.emit(&mut out, "k-saga-d", StepLabel::Silent, successor);
                            } else {
                                self.emit(&mut out, "saga-d", label, successor);
                            }
                        }
                        StepTarget::Terminal { outcome, residual } => match outcome {
                            TerminalOutcome::Commit => {
                                self.emit(
                                    &mut out,
                                    "s-saga-d",
                                    label,
                                    StepTarget::Terminal {
                                        outcome,
                                        residual: ActivityTerm::seq(residual, stored.clone())
                                            .normalize(),
                                    },
                                );
                            }
                            TerminalOutcome::Abort => {
                                self.emit(
                                    &mut out,
                                    "a-saga-d",
                                    label,
                                    StepTarget::Continue(Config::new(
                                        Process::prot(residual.as_process()),
                                        stored.clone(),
                                    )),
                                );
                            }
                            TerminalOutcome::Fail => {
                                self.emit(
                                    &mut out,
                                    "f-saga-d",
                                    label,
                                    StepTarget::Terminal {
                                        outcome,
                                        residual: ActivityTerm::Empty,
                                    },
                                );
                            }
                        },
                    }
                }
            }
            Process::Prot(body) | Process::Killed(body) => {
                let is_killed = matches!(p, Process::Killed(_));
                let wrap = |inner: Process| {
                    if is_killed {
                        Process::killed(inner)
                    } else {
                        Process::prot(inner)
                    }
                };
                for (label, target) in self.derive(body, stored)? {
                    match target {
                        StepTarget::Continue(cfg) => {
                            if label.is_dagger() {
                                // delayed abortion inside a protected block
                                // only propagates through killed blocks
                                if is_killed {
                                    self.emit(
                                        &mut out,
                                        "k-prot-d",
                                        label,
                                        StepTarget::Continue(Config::new(
                                            wrap(cfg.process),
                                            cfg.stored,
                                        )),
                                    );
                                }
                            } else {
                                self.emit(
                                    &mut out,
                                    "prot-d",
                                    label,
                                    StepTarget::Continue(Config::new(
                                        wrap(cfg.process),
                                        cfg.stored,
                                    )),
                                );
                            }
                        }
                        StepTarget::Terminal { outcome, residual } => match outcome {
                            TerminalOutcome::Commit => {
                                if is_killed {
                                    // commit of a killed block re-raises the
                                    // delayed abortion
                                    self.emit(
                                        &mut out,
                                        "s-killed-d",
                                        label,
                                        StepTarget::Terminal {
                                            outcome: TerminalOutcome::Abort,
                                            residual,
                                        },
                                    );
                                } else {
                                    self.emit(
                                        &mut out,
                                        "s-prot-d",
                                        label,
                                        StepTarget::Terminal { outcome, residual },
                                    );
                                }
                            }
                            TerminalOutcome::Abort => {
                                self.emit(
                                    &mut out,
                                    "a-prot-d",
                                    label,
                                    StepTarget::Terminal {
                                        outcome: TerminalOutcome::Fail,
                                        residual: ActivityTerm::Empty,
                                    },
                                );
                            }
                            TerminalOutcome::Fail => {}
                        },
                    }
                }
            }
        }
        Ok(out)
    }

    fn emit(&mut self, out: &mut BTreeSet<Step>, rule: &'static str, label: StepLabel, target: StepTarget) {
        if !self.options.enabled(rule) {
            return;
        }
        self.coverage.record(rule);
        out.insert((label, target));
    }

    fn verdict(&self, name: &ActivityName) -> Verdict {
        self.env
            .get(name)
            .expect("environment totality checked before stepping")
    }
}

/// One maximal computation: a start configuration and the steps taken, the
/// last of which is terminal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Computation {
    pub start: Config,
    pub steps: Vec<Step>,
}

impl Computation {
    /// The observable word: activity labels in order, silent and dagger
    /// labels removed.
    pub fn gamma(&self) -> Vec<ActivityName> {
        self.steps
            .iter()
            .filter_map(|(label, _)| label.activity().cloned())
            .collect()
    }

    pub fn outcome(&self) -> TerminalOutcome {
        match self.steps.last() {
            Some((_, StepTarget::Terminal { outcome, .. })) => *outcome,
            _ => unreachable!("computations end in a terminal step"),
        }
    }

    pub fn residual(&self) -> &ActivityTerm {
        match self.steps.last() {
            Some((_, StepTarget::Terminal { residual, .. })) => residual,
            _ => unreachable!("computations end in a terminal step"),
        }
    }

    pub fn has_dagger(&self) -> bool {
        self.steps.iter().any(|(label, _)| label.is_dagger())
    }

    /// The observable word rendered as `a; b; c`, or `0` when empty.
    pub fn gamma_string(&self) -> String {
        let gamma = self.gamma();
        if gamma.is_empty() {
            "0".to_string()
        } else {
            gamma
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        }
    }
}

// Wire format: one record per step, the last carrying the terminal pair.
impl Serialize for Computation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let records: Vec<serde_json::Value> = self
            .steps
            .iter()
            .map(|(label, target)| match target {
                StepTarget::Continue(cfg) => serde_json::json!({
                    "label": label.to_string(),
                    "process": cfg.process.to_string(),
                    "stored": cfg.stored.to_string(),
                }),
                StepTarget::Terminal { outcome, residual } => serde_json::json!({
                    "label": label.to_string(),
                    "outcome": outcome.as_str(),
                    "residual": residual.to_string(),
                }),
            })
            .collect();
        records.serialize(serializer)
    }
}

/// Budget for exhaustive enumeration. Exceeding a budget is an error, never
/// a silent truncation.
#[derive(Debug, Clone)]
pub struct Limits {
    pub max_computations: usize,
    pub max_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_computations: 1_000_000,
            max_steps: 4096,
        }
    }
}

/// Every maximal computation from `<p, 0>`.
pub fn all_computations(env: &Env, p: &Process) -> Result<BTreeSet<Computation>, Error> {
    all_computations_traced(env, p, &DynamicOptions::default(), &Limits::default())
        .map(|(c, _)| c)
}

/// As [`all_computations`], with explicit options and budgets, also
/// reporting which rules fired.
pub fn all_computations_traced(
    env: &Env,
    p: &Process,
    options: &DynamicOptions,
    limits: &Limits,
) -> Result<(BTreeSet<Computation>, RuleCoverage), Error> {
    computations_from(env, &Config::initial(p.clone()), options, limits)
}

/// Every maximal computation from an arbitrary start configuration.
pub fn computations_from(
    env: &Env,
    start: &Config,
    options: &DynamicOptions,
    limits: &Limits,
) -> Result<(BTreeSet<Computation>, RuleCoverage), Error> {
    let start = start.clone();
    require_total(env, &start.process)?;
    let mut stepper = Stepper {
        env,
        options,
        coverage: RuleCoverage::new(),
    };
    let mut out = BTreeSet::new();
    let mut path: Vec<Step> = Vec::new();
    let mut on_path: HashSet<Config> = HashSet::new();
    on_path.insert(start.clone());
    explore(
        &mut stepper,
        &start,
        &start,
        &mut path,
        &mut on_path,
        &mut out,
        limits,
    )?;
    let coverage = stepper.coverage;
    Ok((out, coverage))
}

#[allow(clippy::too_many_arguments)]
fn explore(
    stepper: &mut Stepper<'_>,
    start: &Config,
    config: &Config,
    path: &mut Vec<Step>,
    on_path: &mut HashSet<Config>,
    out: &mut BTreeSet<Computation>,
    limits: &Limits,
) -> Result<(), Error> {
    if path.len() >= limits.max_steps {
        return Err(Error::LengthCap {
            cap: limits.max_steps,
        });
    }
    let steps = stepper.derive(&config.process, &config.stored)?;
    if steps.is_empty() {
        return Err(Error::Stuck {
            config: config.to_string(),
        });
    }
    for (label, target) in steps {
        match &target {
            StepTarget::Terminal { .. } => {
                if out.len() >= limits.max_computations {
                    return Err(Error::ComputationCap {
                        cap: limits.max_computations,
                    });
                }
                let mut steps = path.clone();
                steps.push((label, target.clone()));
                out.insert(Computation {
                    start: start.clone(),
                    steps,
                });
            }
            StepTarget::Continue(next) => {
                if !on_path.insert(next.clone()) {
                    return Err(Error::Revisited {
                        config: next.to_string(),
                    });
                }
                path.push((label, target.clone()));
                explore(stepper, start, next, path, on_path, out, limits)?;
                path.pop();
                on_path.remove(next);
            }
        }
    }
    Ok(())
}

/// Strategy for choosing among enabled steps in a scheduled run.
#[derive(Debug, Clone)]
pub enum Scheduler {
    /// Always the first enabled step in the fixed order of the step set.
    FirstEnabled,
    /// Uniform choice among enabled steps from a seeded generator; equal
    /// seeds give bit-identical traces.
    Seeded(u64),
}

/// Executes one maximal computation under the given scheduler.
pub fn run(env: &Env, p: &Process, scheduler: &Scheduler) -> Result<Computation, Error> {
    let limits = Limits::default();
    let start = Config::initial(p.clone());
    require_total(env, &start.process)?;
    let mut rng = match scheduler {
        Scheduler::FirstEnabled => None,
        Scheduler::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
    };
    let options = DynamicOptions::default();
    let mut stepper = Stepper {
        env,
        options: &options,
        coverage: RuleCoverage::new(),
    };
    let mut current = start.clone();
    let mut trace: Vec<Step> = Vec::new();
    loop {
        if trace.len() >= limits.max_steps {
            return Err(Error::LengthCap {
                cap: limits.max_steps,
            });
        }
        let steps: Vec<Step> = stepper
            .derive(&current.process, &current.stored)?
            .into_iter()
            .collect();
        if steps.is_empty() {
            return Err(Error::Stuck {
                config: current.to_string(),
            });
        }
        let pick = match &mut rng {
            None => 0,
            Some(rng) => rng.random_range(0..steps.len()),
        };
        let (label, target) = steps[pick].clone();
        trace.push((label, target.clone()));
        match target {
            StepTarget::Terminal { .. } => {
                return Ok(Computation {
                    start,
                    steps: trace,
                });
            }
            StepTarget::Continue(next) => current = next,
        }
    }
}
