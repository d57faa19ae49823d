//! Mechanical checking of the correspondence between the big-step and
//! small-step semantics, on single subjects and on exhaustively generated
//! term families.
//!
//! The two directions are checked separately: every terminated computation
//! must be covered by a judgment with the same outcome whose label and final
//! compensation linearize to the observed word and residual; and every
//! observable judgment must be realized by at least one computation. The
//! dagger check verifies that every delayed-abort step lands on a parallel
//! composition of killed blocks. Strictness reports partition the
//! linearizations of each observable label into dynamically realizable and
//! unrealizable words; the unrealizable ones witness that the big-step
//! semantics permits orders the small-step semantics refuses.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::coverage::RuleCoverage;
use crate::dynamic_semantics::{
    self, computations_from, Computation, Config, DynamicOptions, Limits, StepTarget,
};
use crate::error::Error;
use crate::linearization::{is_linearization, linearizations_with_cap, word_to_string};
use crate::static_semantics::{
    top_big_steps_traced, Judgment, StaticOptions,
};
use crate::syntax::{activities_of, ActivityName, ActivityTerm, Env, Process, Verdict};

// ──────────────────────────────────────────────
// Reports
// ──────────────────────────────────────────────

/// Which check produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    DynamicToStatic,
    StaticToDynamic,
    DaggerLemma,
    Strictness,
}

/// The subject of a check, in serialized form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subject {
    pub process: String,
    pub env: Env,
}

impl Subject {
    fn new(p: &Process, env: &Env) -> Self {
        Subject {
            process: p.to_string(),
            env: env.clone(),
        }
    }
}

/// A structured counterexample or informational record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// A computation no judgment covers (first direction).
    UncoveredComputation {
        gamma: String,
        outcome: String,
        residual: String,
    },
    /// A judgment no computation realizes (second direction).
    UnrealizableJudgment { judgment: Judgment },
    /// A dagger step whose target is not a parallel composition of killed
    /// blocks, or a dagger step straight into a terminal.
    DaggerViolation { gamma_prefix: String, target: String },
    /// Enumeration failed outright (stuck configuration, cap overflow).
    EnumerationFailure { error: String },
    /// Partition of one judgment's linearizations into realizable and
    /// unrealizable words. `truncated` marks a sampled, non-exhaustive
    /// partition after a cap overflow.
    StrictnessPartition {
        judgment: Judgment,
        realizable: Vec<String>,
        unrealizable: Vec<String>,
        truncated: bool,
    },
}

/// Counters describing how much work a check examined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub judgments: usize,
    pub computations: usize,
    pub words: usize,
}

/// Outcome of one check on one subject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: CheckKind,
    pub subject: Subject,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    pub stats: Stats,
    pub static_coverage: RuleCoverage,
    pub dynamic_coverage: RuleCoverage,
    /// Smallest failing sub-process under the same environment, when the
    /// subject itself failed.
    pub minimized: Option<String>,
}

impl Report {
    fn passing(check: CheckKind, subject: Subject, stats: Stats) -> Self {
        Report {
            check,
            subject,
            passed: true,
            witnesses: Vec::new(),
            stats,
            static_coverage: RuleCoverage::new(),
            dynamic_coverage: RuleCoverage::new(),
            minimized: None,
        }
    }
}

/// Options shared by the conformance checks.
#[derive(Debug, Clone, Default)]
pub struct CheckOptions {
    pub static_options: StaticOptions,
    pub dynamic_options: DynamicOptions,
    pub limits: Limits,
    /// Initial stored compensation; must be sequential. The default checks
    /// run top-level programs from the empty store.
    pub initial_store: ActivityTerm,
}

// ──────────────────────────────────────────────
// Single-subject checks
// ──────────────────────────────────────────────

/// First direction: every terminated computation is covered by a judgment
/// with the same outcome, label linearizing to the observed word, and final
/// compensation linearizing to the residual.
pub fn check_dynamic_to_static(env: &Env, p: &Process) -> Result<Report, Error> {
    check_dynamic_to_static_with(env, p, &CheckOptions::default())
}

pub fn check_dynamic_to_static_with(
    env: &Env,
    p: &Process,
    options: &CheckOptions,
) -> Result<Report, Error> {
    let mut report = check_dynamic_to_static_inner(env, p, options)?;
    minimize(&mut report, env, p, options, check_dynamic_to_static_inner)?;
    Ok(report)
}

fn check_dynamic_to_static_inner(
    env: &Env,
    p: &Process,
    options: &CheckOptions,
) -> Result<Report, Error> {
    let subject = Subject::new(p, env);
    let mut report = Report::passing(CheckKind::DynamicToStatic, subject, Stats::default());
    let (judgments, static_cov) = match judgments_from(env, p, options) {
        Ok(v) => v,
        Err(e) => return Ok(enumeration_failure(report, e)),
    };
    let (computations, dynamic_cov) = match computations_from(
        env,
        &Config::new(p.clone(), options.initial_store.clone()),
        &options.dynamic_options,
        &options.limits,
    ) {
        Ok(v) => v,
        Err(e) => return Ok(enumeration_failure(report, e)),
    };
    report.static_coverage = static_cov;
    report.dynamic_coverage = dynamic_cov;
    report.stats.judgments = judgments.len();
    report.stats.computations = computations.len();
    for c in &computations {
        let gamma = c.gamma();
        let residual = c
            .residual()
            .as_word()
            .ok_or_else(|| Error::NonSequentialStore {
                term: c.residual().to_string(),
            })?;
        let covered = judgments.iter().any(|j| {
            j.outcome == c.outcome().as_outcome()
                && is_linearization(&gamma, &j.label)
                && is_linearization(&residual, &j.compensation)
        });
        if !covered {
            report.passed = false;
            report.witnesses.push(Witness::UncoveredComputation {
                gamma: word_to_string(&gamma),
                outcome: c.outcome().to_string(),
                residual: c.residual().to_string(),
            });
        }
    }
    Ok(report)
}

/// Second direction: every observable judgment is realized by at least one
/// computation with the same outcome, a word in the label's linearizations,
/// and a residual in the final compensation's linearizations.
pub fn check_static_to_dynamic(env: &Env, p: &Process) -> Result<Report, Error> {
    check_static_to_dynamic_with(env, p, &CheckOptions::default())
}

pub fn check_static_to_dynamic_with(
    env: &Env,
    p: &Process,
    options: &CheckOptions,
) -> Result<Report, Error> {
    let mut report = check_static_to_dynamic_inner(env, p, options)?;
    minimize(&mut report, env, p, options, check_static_to_dynamic_inner)?;
    Ok(report)
}

fn check_static_to_dynamic_inner(
    env: &Env,
    p: &Process,
    options: &CheckOptions,
) -> Result<Report, Error> {
    let subject = Subject::new(p, env);
    let mut report = Report::passing(CheckKind::StaticToDynamic, subject, Stats::default());
    let (judgments, static_cov) = match judgments_from(env, p, options) {
        Ok(v) => v,
        Err(e) => return Ok(enumeration_failure(report, e)),
    };
    let (computations, dynamic_cov) = match computations_from(
        env,
        &Config::new(p.clone(), options.initial_store.clone()),
        &options.dynamic_options,
        &options.limits,
    ) {
        Ok(v) => v,
        Err(e) => return Ok(enumeration_failure(report, e)),
    };
    report.static_coverage = static_cov;
    report.dynamic_coverage = dynamic_cov;
    report.stats.judgments = judgments.len();
    report.stats.computations = computations.len();
    let terminated: Vec<(&Computation, Vec<ActivityName>, Vec<ActivityName>)> = computations
        .iter()
        .map(|c| {
            let gamma = c.gamma();
            let residual = c.residual().as_word().unwrap_or_default();
            (c, gamma, residual)
        })
        .collect();
    for j in &judgments {
        let realized = terminated.iter().any(|(c, gamma, residual)| {
            c.outcome().as_outcome() == j.outcome
                && is_linearization(gamma, &j.label)
                && is_linearization(residual, &j.compensation)
        });
        if !realized {
            report.passed = false;
            report
                .witnesses
                .push(Witness::UnrealizableJudgment { judgment: j.clone() });
        }
    }
    Ok(report)
}

/// Scans every dagger step in every computation: the target must be a
/// parallel composition of killed blocks, and never a terminal.
pub fn check_dagger_lemma(env: &Env, p: &Process) -> Result<Report, Error> {
    check_dagger_lemma_with(env, p, &CheckOptions::default())
}

pub fn check_dagger_lemma_with(
    env: &Env,
    p: &Process,
    options: &CheckOptions,
) -> Result<Report, Error> {
    let subject = Subject::new(p, env);
    let mut report = Report::passing(CheckKind::DaggerLemma, subject, Stats::default());
    let (computations, dynamic_cov) = match computations_from(
        env,
        &Config::new(p.clone(), options.initial_store.clone()),
        &options.dynamic_options,
        &options.limits,
    ) {
        Ok(v) => v,
        Err(e) => return Ok(enumeration_failure(report, e)),
    };
    report.dynamic_coverage = dynamic_cov;
    report.stats.computations = computations.len();
    for c in &computations {
        let mut prefix: Vec<ActivityName> = Vec::new();
        for (label, target) in &c.steps {
            if label.is_dagger() {
                let ok = match target {
                    StepTarget::Continue(cfg) => is_parallel_of_killed(&cfg.process),
                    StepTarget::Terminal { .. } => false,
                };
                if !ok {
                    report.passed = false;
                    report.witnesses.push(Witness::DaggerViolation {
                        gamma_prefix: word_to_string(&prefix),
                        target: match target {
                            StepTarget::Continue(cfg) => cfg.process.to_string(),
                            StepTarget::Terminal { outcome, .. } => {
                                format!("terminal:{outcome}")
                            }
                        },
                    });
                }
            }
            if let Some(n) = label.activity() {
                prefix.push(n.clone());
            }
        }
    }
    Ok(report)
}

fn is_parallel_of_killed(p: &Process) -> bool {
    match p {
        Process::Killed(_) => true,
        Process::Par(l, r) => is_parallel_of_killed(l) && is_parallel_of_killed(r),
        _ => false,
    }
}

/// Budget for strictness partitions before sampling kicks in.
pub const DEFAULT_STRICTNESS_CAP: usize = 100_000;

/// For each observable judgment, partitions the linearizations of its label
/// into dynamically realizable and unrealizable words. A word is realizable
/// when some computation observes exactly it with the judgment's outcome.
pub fn strictness_witnesses(env: &Env, p: &Process) -> Result<Report, Error> {
    strictness_witnesses_with(env, p, &CheckOptions::default(), DEFAULT_STRICTNESS_CAP)
}

pub fn strictness_witnesses_with(
    env: &Env,
    p: &Process,
    options: &CheckOptions,
    cap: usize,
) -> Result<Report, Error> {
    let subject = Subject::new(p, env);
    let mut report = Report::passing(CheckKind::Strictness, subject, Stats::default());
    let (judgments, static_cov) = match judgments_from(env, p, options) {
        Ok(v) => v,
        Err(e) => return Ok(enumeration_failure(report, e)),
    };
    let (computations, dynamic_cov) = match computations_from(
        env,
        &Config::new(p.clone(), options.initial_store.clone()),
        &options.dynamic_options,
        &options.limits,
    ) {
        Ok(v) => v,
        Err(e) => return Ok(enumeration_failure(report, e)),
    };
    report.static_coverage = static_cov;
    report.dynamic_coverage = dynamic_cov;
    report.stats.judgments = judgments.len();
    report.stats.computations = computations.len();
    let observed: Vec<(Vec<ActivityName>, crate::static_semantics::Outcome)> = computations
        .iter()
        .map(|c| (c.gamma(), c.outcome().as_outcome()))
        .collect();
    for j in &judgments {
        let (words, truncated) = match linearizations_with_cap(&j.label, cap) {
            Ok(words) => (words, false),
            Err(_) => (sampled_linearizations(&j.label, cap), true),
        };
        let mut realizable = Vec::new();
        let mut unrealizable = Vec::new();
        for w in &words {
            report.stats.words += 1;
            let hit = observed
                .iter()
                .any(|(gamma, outcome)| *outcome == j.outcome && gamma == w);
            if hit {
                realizable.push(word_to_string(w));
            } else {
                unrealizable.push(word_to_string(w));
            }
        }
        report.witnesses.push(Witness::StrictnessPartition {
            judgment: j.clone(),
            realizable,
            unrealizable,
            truncated,
        });
    }
    Ok(report)
}

// Deterministic fallback when a linearization set overflows: the first `cap`
// words in the left-biased derivative order.
fn sampled_linearizations(label: &ActivityTerm, cap: usize) -> BTreeSet<Vec<ActivityName>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(label.normalize(), Vec::new())];
    while let Some((t, prefix)) = stack.pop() {
        if out.len() >= cap {
            break;
        }
        if t.is_empty() {
            out.insert(prefix);
            continue;
        }
        let names: BTreeSet<ActivityName> = t.occurrences().into_iter().collect();
        for name in names {
            for residual in crate::linearization::derivatives(&t, &name) {
                let mut next = prefix.clone();
                next.push(name.clone());
                stack.push((residual, next));
            }
        }
    }
    out
}

fn judgments_from(
    env: &Env,
    p: &Process,
    options: &CheckOptions,
) -> Result<(BTreeSet<Judgment>, RuleCoverage), Error> {
    if !options.initial_store.is_sequential() {
        return Err(Error::NonSequentialStore {
            term: options.initial_store.to_string(),
        });
    }
    if options.initial_store.is_empty() {
        top_big_steps_traced(env, p, &options.static_options)
    } else {
        let (all, cov) = crate::static_semantics::big_steps_traced(
            env,
            p,
            &options.initial_store,
            &options.static_options,
        )?;
        let top = all.into_iter().filter(|j| j.outcome.is_observable()).collect();
        Ok((top, cov))
    }
}

fn enumeration_failure(mut report: Report, error: Error) -> Report {
    report.passed = false;
    report.witnesses.push(Witness::EnumerationFailure {
        error: error.to_string(),
    });
    report
}

// On failure, re-run the same check on every strict sub-process and record
// the smallest one that still fails.
fn minimize(
    report: &mut Report,
    env: &Env,
    p: &Process,
    options: &CheckOptions,
    check: fn(&Env, &Process, &CheckOptions) -> Result<Report, Error>,
) -> Result<(), Error> {
    if report.passed {
        return Ok(());
    }
    let mut smallest: Option<&Process> = None;
    for sub in p.subterms() {
        if std::ptr::eq(sub, p) {
            continue;
        }
        if smallest.is_some_and(|best| best.size() <= sub.size()) {
            continue;
        }
        if let Ok(sub_report) = check(env, sub, options) {
            if !sub_report.passed {
                smallest = Some(sub);
            }
        }
    }
    report.minimized = smallest.map(|s| s.to_string());
    Ok(())
}

// ──────────────────────────────────────────────
// Term-family generation
// ──────────────────────────────────────────────

/// How environments are paired with generated terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvMode {
    /// All `2^n` verdict assignments over the term's names.
    Exhaustive,
    /// A deterministic sample of assignments per term.
    Sampled { count: usize, seed: u64 },
}

/// Bounds for the generated term family.
#[derive(Debug, Clone)]
pub struct GenBounds {
    /// Maximum number of compensable activities per term.
    pub max_activities: usize,
    /// Maximum saga nesting depth.
    pub max_depth: usize,
    pub alphabet: Vec<ActivityName>,
    pub env_mode: EnvMode,
}

impl GenBounds {
    pub fn exhaustive(max_activities: usize, max_depth: usize, alphabet: &[&str]) -> Self {
        GenBounds {
            max_activities,
            max_depth,
            alphabet: alphabet
                .iter()
                .map(|s| ActivityName::new(*s).expect("valid alphabet name"))
                .collect(),
            env_mode: EnvMode::Exhaustive,
        }
    }
}

/// Enumerates the source-level term family for `bounds`, in a fixed
/// deterministic order.
///
/// The family is every term built from activities over the alphabet (with
/// any compensation choice, including none), sequence, parallel, and sagas
/// up to the nesting depth, holding at most `max_activities` activities —
/// plus, since the empty process is inert, the empty-leaf variants grafted
/// one composition at a time: `t; 0`, `0; t`, `t | 0`, `0 | t`, and the
/// saga-wrapped empty processes. Exhausting empty leaves in every position
/// would multiply the family without adding behavior.
pub fn generate_terms(bounds: &GenBounds) -> Vec<Process> {
    let mut by_count: Vec<Vec<BTreeSet<Process>>> = Vec::new();
    // by_count[n][d]: terms with exactly n activities and saga depth <= d
    for n in 0..=bounds.max_activities {
        let mut by_depth: Vec<BTreeSet<Process>> = Vec::new();
        for d in 0..=bounds.max_depth {
            let mut set: BTreeSet<Process> = BTreeSet::new();
            if n == 1 {
                for forward in &bounds.alphabet {
                    set.insert(Process::activity(forward.clone(), None));
                    for comp in &bounds.alphabet {
                        set.insert(Process::activity(forward.clone(), Some(comp.clone())));
                    }
                }
            }
            for k in 1..n {
                let (left, right) = (&by_count[k][d], &by_count[n - k][d]);
                for l in left {
                    for r in right {
                        set.insert(Process::seq(l.clone(), r.clone()));
                        set.insert(Process::par(l.clone(), r.clone()));
                    }
                }
            }
            if d > 0 {
                for inner in &by_depth[d - 1] {
                    set.insert(Process::saga(inner.clone()));
                }
                set.extend(by_depth[d - 1].iter().cloned());
            }
            by_depth.push(set);
        }
        by_count.push(by_depth);
    }
    let base: Vec<Process> = (1..=bounds.max_activities)
        .flat_map(|n| by_count[n][bounds.max_depth].iter().cloned())
        .collect();

    let mut family: BTreeSet<Process> = BTreeSet::new();
    let mut zero_forms = vec![Process::Zero];
    for _ in 0..bounds.max_depth {
        let wrapped = Process::saga(zero_forms.last().unwrap().clone());
        zero_forms.push(wrapped);
    }
    family.extend(zero_forms);
    for t in &base {
        family.insert(t.clone());
        family.insert(Process::seq(t.clone(), Process::Zero));
        family.insert(Process::seq(Process::Zero, t.clone()));
        family.insert(Process::par(t.clone(), Process::Zero));
        family.insert(Process::par(Process::Zero, t.clone()));
    }
    family.into_iter().collect()
}

/// The environments paired with a term under the bounds' env mode.
pub fn environments_for(p: &Process, bounds: &GenBounds) -> Vec<Env> {
    let names: Vec<ActivityName> = activities_of(p).into_iter().collect();
    match &bounds.env_mode {
        EnvMode::Exhaustive => {
            let mut envs = Vec::new();
            for mask in 0..(1u64 << names.len()) {
                let env: Env = names
                    .iter()
                    .enumerate()
                    .map(|(i, n)| {
                        let verdict = if mask & (1 << i) != 0 {
                            Verdict::Abort
                        } else {
                            Verdict::Commit
                        };
                        (n.clone(), verdict)
                    })
                    .collect();
                envs.push(env);
            }
            envs
        }
        EnvMode::Sampled { count, seed } => {
            use rand::Rng;
            use rand::SeedableRng;
            let total = 1u64 << names.len();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            let mut masks: BTreeSet<u64> = BTreeSet::new();
            while masks.len() < *count && (masks.len() as u64) < total {
                masks.insert(rng.random_range(0..total));
            }
            masks
                .into_iter()
                .map(|mask| {
                    names
                        .iter()
                        .enumerate()
                        .map(|(i, n)| {
                            let verdict = if mask & (1 << i) != 0 {
                                Verdict::Abort
                            } else {
                                Verdict::Commit
                            };
                            (n.clone(), verdict)
                        })
                        .collect()
                })
                .collect()
        }
    }
}

// ──────────────────────────────────────────────
// Family sweep
// ──────────────────────────────────────────────

/// Aggregated result of running the conformance checks over a family.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub terms: usize,
    pub subjects: usize,
    pub dynamic_to_static_failures: Vec<Report>,
    pub static_to_dynamic_failures: Vec<Report>,
    pub dagger_failures: Vec<Report>,
    pub static_coverage: RuleCoverage,
    pub dynamic_coverage: RuleCoverage,
    /// Computations examined across all subjects.
    pub computations: usize,
    /// Judgments examined across all subjects.
    pub judgments: usize,
    /// Reachable configurations where the two readings of the null
    /// predicate disagree (informational).
    pub null_divergences: usize,
}

impl FamilyReport {
    pub fn all_passed(&self) -> bool {
        self.dynamic_to_static_failures.is_empty()
            && self.static_to_dynamic_failures.is_empty()
            && self.dagger_failures.is_empty()
    }
}

/// Runs both correspondence checks and the dagger check on every (term,
/// environment) subject of the family. Subjects are independent; the sweep
/// is parallel, enumerates each subject once, and the merged report is
/// deterministic.
pub fn check_family(bounds: &GenBounds) -> Result<FamilyReport, Error> {
    check_family_with(bounds, &CheckOptions::default())
}

pub fn check_family_with(
    bounds: &GenBounds,
    options: &CheckOptions,
) -> Result<FamilyReport, Error> {
    let terms = generate_terms(bounds);
    let accum = terms
        .par_iter()
        .map(|p| {
            let mut local = Accum::default();
            for env in environments_for(p, bounds) {
                sweep_subject(&env, p, options, &mut local)?;
            }
            Ok(local)
        })
        .reduce(
            || Ok(Accum::default()),
            |a, b| {
                let (mut a, b) = (a?, b?);
                a.merge(b);
                Ok(a)
            },
        )?;
    let mut report = FamilyReport {
        terms: terms.len(),
        subjects: accum.subjects,
        dynamic_to_static_failures: accum.dynamic_to_static_failures,
        static_to_dynamic_failures: accum.static_to_dynamic_failures,
        dagger_failures: accum.dagger_failures,
        static_coverage: accum.static_coverage,
        dynamic_coverage: accum.dynamic_coverage,
        computations: accum.computations,
        judgments: accum.judgments,
        null_divergences: accum.null_divergences,
    };
    let by_subject = |r: &Report| (r.subject.process.clone(), format!("{:?}", r.subject.env));
    report.dynamic_to_static_failures.sort_by_key(by_subject);
    report.static_to_dynamic_failures.sort_by_key(by_subject);
    report.dagger_failures.sort_by_key(by_subject);
    Ok(report)
}

#[derive(Default)]
struct Accum {
    subjects: usize,
    computations: usize,
    judgments: usize,
    null_divergences: usize,
    static_coverage: RuleCoverage,
    dynamic_coverage: RuleCoverage,
    dynamic_to_static_failures: Vec<Report>,
    static_to_dynamic_failures: Vec<Report>,
    dagger_failures: Vec<Report>,
}

impl Accum {
    fn merge(&mut self, other: Accum) {
        self.subjects += other.subjects;
        self.computations += other.computations;
        self.judgments += other.judgments;
        self.null_divergences += other.null_divergences;
        self.static_coverage.merge(&other.static_coverage);
        self.dynamic_coverage.merge(&other.dynamic_coverage);
        self.dynamic_to_static_failures
            .extend(other.dynamic_to_static_failures);
        self.static_to_dynamic_failures
            .extend(other.static_to_dynamic_failures);
        self.dagger_failures.extend(other.dagger_failures);
    }
}

// One static and one dynamic enumeration per subject, shared by all three
// checks. Failures fall back to the slower single-subject checks so the
// report carries a minimized witness.
fn sweep_subject(
    env: &Env,
    p: &Process,
    options: &CheckOptions,
    accum: &mut Accum,
) -> Result<(), Error> {
    accum.subjects += 1;
    let judgments = judgments_from(env, p, options);
    let computations = computations_from(
        env,
        &Config::new(p.clone(), options.initial_store.clone()),
        &options.dynamic_options,
        &options.limits,
    );
    let ((judgments, static_cov), (computations, dynamic_cov)) =
        match (judgments, computations) {
            (Ok(j), Ok(c)) => (j, c),
            (judgments, computations) => {
                // surface the enumeration failure through every check
                if let Err(e) = &judgments {
                    let subject = Subject::new(p, env);
                    let base =
                        Report::passing(CheckKind::StaticToDynamic, subject, Stats::default());
                    accum
                        .static_to_dynamic_failures
                        .push(enumeration_failure(base, e.clone()));
                }
                if let Err(e) = &computations {
                    for (kind, bucket) in [
                        (
                            CheckKind::DynamicToStatic,
                            &mut accum.dynamic_to_static_failures,
                        ),
                        (CheckKind::DaggerLemma, &mut accum.dagger_failures),
                    ] {
                        let base =
                            Report::passing(kind, Subject::new(p, env), Stats::default());
                        bucket.push(enumeration_failure(base, e.clone()));
                    }
                }
                return Ok(());
            }
        };
    accum.static_coverage.merge(&static_cov);
    accum.dynamic_coverage.merge(&dynamic_cov);
    accum.computations += computations.len();
    accum.judgments += judgments.len();

    let mut t1_failed = false;
    let mut t2_failed = false;
    let mut dagger_failed = false;
    let words: Vec<(Vec<ActivityName>, Vec<ActivityName>)> = computations
        .iter()
        .map(|c| {
            let residual = c.residual().as_word().unwrap_or_default();
            (c.gamma(), residual)
        })
        .collect();
    for (c, (gamma, residual)) in computations.iter().zip(&words) {
        let covered = judgments.iter().any(|j| {
            j.outcome == c.outcome().as_outcome()
                && is_linearization(gamma, &j.label)
                && is_linearization(residual, &j.compensation)
        });
        if !covered {
            t1_failed = true;
        }
    }
    for j in &judgments {
        let realized = computations.iter().zip(&words).any(|(c, (gamma, residual))| {
            c.outcome().as_outcome() == j.outcome
                && is_linearization(gamma, &j.label)
                && is_linearization(residual, &j.compensation)
        });
        if !realized {
            t2_failed = true;
        }
    }
    for c in &computations {
        for (label, target) in &c.steps {
            if label.is_dagger() {
                let ok = match target {
                    StepTarget::Continue(cfg) => is_parallel_of_killed(&cfg.process),
                    StepTarget::Terminal { .. } => false,
                };
                if !ok {
                    dagger_failed = true;
                }
            }
        }
    }
    let mut seen: BTreeSet<&Process> = BTreeSet::new();
    for c in &computations {
        for (_, target) in &c.steps {
            if let StepTarget::Continue(cfg) = target {
                if seen.insert(&cfg.process)
                    && dynamic_semantics::is_null(&cfg.process)
                        != dynamic_semantics::is_null_strict(&cfg.process)
                {
                    accum.null_divergences += 1;
                }
            }
        }
    }

    if t1_failed {
        accum
            .dynamic_to_static_failures
            .push(check_dynamic_to_static_with(env, p, options)?);
    }
    if t2_failed {
        accum
            .static_to_dynamic_failures
            .push(check_static_to_dynamic_with(env, p, options)?);
    }
    if dagger_failed {
        accum
            .dagger_failures
            .push(check_dagger_lemma_with(env, p, options)?);
    }
    Ok(())
}
