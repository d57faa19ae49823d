//! Big-step semantics: exhaustive enumeration of every derivable judgment
//! `<P, beta> --label--> <outcome, beta'>` under a verdict environment.
//!
//! The enumeration is structural. At each node every applicable rule fires,
//! including the two interruption axioms, which apply to every configuration:
//! a process can acknowledge an external abort before doing anything (keeping
//! its stored compensation) or an external failure (discarding it).
//! Parallel composition evaluates both premise orders and deduplicates, which
//! realizes the symmetric rules. An undefined outcome combination simply
//! prunes the derivation; it is not an error.
//!
//! Judgment equality is up to the unit axioms on labels and compensations,
//! and deliberately not up to commutativity of `|`; order-insensitive
//! comparison belongs to the linearization layer.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coverage::RuleCoverage;
use crate::error::Error;
use crate::syntax::{activities_of, ActivityTerm, Env, Process, Verdict};

/// Names of the big-step rules, as used in coverage reports.
pub const STATIC_RULES: [&str; 15] = [
    "zero",
    "s-act",
    "f-act",
    "s-step",
    "a-step",
    "s-par",
    "f-par",
    "forced-abt",
    "forced-fail",
    "sub-cmt",
    "sub-abt",
    "sub-fail-1",
    "sub-fail-2",
    "sub-forced-1",
    "sub-forced-2",
];

/// The six possible saga outcomes. `Commit`, `Abort` and `Fail` are the
/// observable top-level results; the three forced outcomes acknowledge an
/// externally originated abort or failure, with `ForcedAbortFailed` the
/// answer of a branch whose local compensation failed while handling an
/// external abort.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Commit,
    Abort,
    Fail,
    ForcedAbort,
    ForcedFail,
    ForcedAbortFailed,
}

impl Outcome {
    pub const ALL: [Outcome; 6] = [
        Outcome::Commit,
        Outcome::Abort,
        Outcome::Fail,
        Outcome::ForcedAbort,
        Outcome::ForcedFail,
        Outcome::ForcedAbortFailed,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Commit => "commit",
            Outcome::Abort => "abort",
            Outcome::Fail => "fail",
            Outcome::ForcedAbort => "forced-abort",
            Outcome::ForcedFail => "forced-fail",
            Outcome::ForcedAbortFailed => "forced-abort-failed",
        }
    }

    /// True for the outcomes observable at top level.
    pub fn is_observable(&self) -> bool {
        matches!(self, Outcome::Commit | Outcome::Abort | Outcome::Fail)
    }

    fn index(&self) -> usize {
        match self {
            Outcome::Commit => 0,
            Outcome::Abort => 1,
            Outcome::Fail => 2,
            Outcome::ForcedAbort => 3,
            Outcome::ForcedFail => 4,
            Outcome::ForcedAbortFailed => 5,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The partial, commutative outcome-combination operator for parallel
/// composition, stored as an explicit 6x6 table. An absent entry prunes the
/// derivation branch that produced the pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombineTable {
    cells: [[Option<Outcome>; 6]; 6],
}

impl CombineTable {
    /// The table with exactly the defined entries, closed under symmetry:
    /// commit is the unit; abort absorbs forced-abort; fail absorbs
    /// forced-fail; a failed forced abort turns a sibling abort into a fail
    /// and survives a sibling forced-fail; every diagonal of the forced
    /// entries is itself except the failed forced abort.
    pub fn standard() -> Self {
        use Outcome::*;
        let mut t = CombineTable {
            cells: [[None; 6]; 6],
        };
        for o in Outcome::ALL {
            t.set(Commit, o, Some(o));
        }
        t.set(Abort, ForcedAbort, Some(Abort));
        t.set(ForcedAbort, ForcedAbort, Some(ForcedAbort));
        t.set(ForcedFail, Fail, Some(Fail));
        t.set(ForcedFail, ForcedFail, Some(ForcedFail));
        t.set(ForcedAbortFailed, Abort, Some(Fail));
        t.set(ForcedAbortFailed, ForcedFail, Some(ForcedAbortFailed));
        t
    }

    /// Sets an entry and its symmetric mirror.
    pub fn set(&mut self, a: Outcome, b: Outcome, value: Option<Outcome>) {
        self.cells[a.index()][b.index()] = value;
        self.cells[b.index()][a.index()] = value;
    }

    pub fn get(&self, a: Outcome, b: Outcome) -> Option<Outcome> {
        self.cells[a.index()][b.index()]
    }

    /// A copy with one entry (and its mirror) replaced.
    pub fn with_entry(&self, a: Outcome, b: Outcome, value: Option<Outcome>) -> Self {
        let mut t = self.clone();
        t.set(a, b, value);
        t
    }
}

impl Default for CombineTable {
    fn default() -> Self {
        CombineTable::standard()
    }
}

/// Combines two parallel-branch outcomes under the standard table. `None`
/// means the pair is undefined and the derivation is pruned.
pub fn combine(a: Outcome, b: Outcome) -> Option<Outcome> {
    CombineTable::standard().get(a, b)
}

/// One derivable big-step judgment: observation label, outcome, and final
/// stored compensation, both terms in normal form.
#[derive(
    Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize,
)]
pub struct Judgment {
    pub label: ActivityTerm,
    pub outcome: Outcome,
    pub compensation: ActivityTerm,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | label: {} | comp: {}",
            self.outcome, self.label, self.compensation
        )
    }
}

/// Knobs for the big-step enumerator. The combine table is swappable so the
/// test harness can probe the sensitivity of the checks to single entries.
#[derive(Debug, Clone, Default)]
pub struct StaticOptions {
    pub table: CombineTable,
}

/// Enumerates every judgment derivable for `<p, beta>`. The result is a set:
/// one process routinely admits several judgments.
pub fn big_steps(env: &Env, p: &Process, beta: &ActivityTerm) -> Result<BTreeSet<Judgment>, Error> {
    big_steps_traced(env, p, beta, &StaticOptions::default()).map(|(js, _)| js)
}

/// As [`big_steps`], also reporting which rules fired.
pub fn big_steps_traced(
    env: &Env,
    p: &Process,
    beta: &ActivityTerm,
    options: &StaticOptions,
) -> Result<(BTreeSet<Judgment>, RuleCoverage), Error> {
    require_total(env, p)?;
    let mut eval = Evaluator {
        env,
        table: &options.table,
        coverage: RuleCoverage::new(),
        comp_cache: HashMap::new(),
    };
    let triples = eval.eval(p, &beta.normalize());
    let judgments = triples
        .into_iter()
        .map(|(label, outcome, compensation)| Judgment {
            label,
            outcome,
            compensation,
        })
        .collect();
    Ok((judgments, eval.coverage))
}

/// The observable top-level judgments: [`big_steps`] from the empty store,
/// restricted to commit, abort and fail.
pub fn top_big_steps(env: &Env, p: &Process) -> Result<BTreeSet<Judgment>, Error> {
    top_big_steps_traced(env, p, &StaticOptions::default()).map(|(js, _)| js)
}

/// As [`top_big_steps`], also reporting which rules fired.
pub fn top_big_steps_traced(
    env: &Env,
    p: &Process,
    options: &StaticOptions,
) -> Result<(BTreeSet<Judgment>, RuleCoverage), Error> {
    let (all, coverage) = big_steps_traced(env, p, &ActivityTerm::Empty, options)?;
    let top = all
        .into_iter()
        .filter(|j| j.outcome.is_observable())
        .collect();
    Ok((top, coverage))
}

// Totality is over the process's names, including stored compensations
// inside it; the names of the initial store never execute and need no
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

/// (label, outcome, final compensation)
type Triple = (ActivityTerm, Outcome, ActivityTerm);

struct Evaluator<'a> {
    env: &'a Env,
    table: &'a CombineTable,
    coverage: RuleCoverage,
    /// Judgment sets of compensation re-executions, keyed by the normalized
    /// compensation term. Purely a cache; results are value-equal without it.
    comp_cache: HashMap<ActivityTerm, BTreeSet<Triple>>,
}

impl Evaluator<'_> {
    fn eval(&mut self, p: &Process, beta: &ActivityTerm) -> BTreeSet<Triple> {
        let mut out = BTreeSet::new();
        match p {
            Process::Zero => {
                self.emit(&mut out, "zero", ActivityTerm::Empty, Outcome::Commit, beta.clone());
            }
            Process::Activity {
                forward,
                compensation,
            } => match self.verdict(forward) {
                Verdict::Commit => {
                    let stored = match compensation {
                        Some(c) => {
                            ActivityTerm::seq(ActivityTerm::Act(c.clone()), beta.clone())
                                .normalize()
                        }
                        None => beta.clone(),
                    };
                    self.emit(
                        &mut out,
                        "s-act",
                        ActivityTerm::Act(forward.clone()),
                        Outcome::Commit,
                        stored,
                    );
                }
                Verdict::Abort => {
                    self.emit(&mut out, "f-act", ActivityTerm::Empty, Outcome::Abort, beta.clone());
                }
            },
            Process::Seq(left, right) => {
                let firsts = self.eval(left, beta);
                for (label, outcome, store) in firsts {
                    if outcome == Outcome::Commit {
                        for (label2, outcome2, store2) in self.eval(right, &store) {
                            self.emit(
                                &mut out,
                                "s-step",
                                ActivityTerm::seq(label.clone(), label2).normalize(),
                                outcome2,
                                store2,
                            );
                        }
                    } else {
                        self.emit(&mut out, "a-step", label, outcome, store);
                    }
                }
            }
            Process::Par(left, right) => {
                let lefts = self.eval(left, &ActivityTerm::Empty);
                let rights = self.eval(right, &ActivityTerm::Empty);
                for (first, second) in [(&lefts, &rights), (&rights, &lefts)] {
                    for (label1, o1, comp1) in first.iter() {
                        for (label2, o2, comp2) in second.iter() {
                            let Some(outcome) = self.table.get(*o1, *o2) else {
                                continue;
                            };
                            let label =
                                ActivityTerm::par(label1.clone(), label2.clone()).normalize();
                            let both_resumable = !matches!(
                                o1,
                                Outcome::Fail | Outcome::ForcedFail | Outcome::ForcedAbortFailed
                            ) && !matches!(
                                o2,
                                Outcome::Fail | Outcome::ForcedFail | Outcome::ForcedAbortFailed
                            );
                            if both_resumable {
                                let comp = ActivityTerm::seq(
                                    ActivityTerm::par(comp1.clone(), comp2.clone()),
                                    beta.clone(),
                                )
                                .normalize();
                                self.emit(&mut out, "s-par", label, outcome, comp);
                            } else if matches!(
                                o2,
                                Outcome::Fail | Outcome::ForcedFail | Outcome::ForcedAbortFailed
                            ) {
                                self.emit(&mut out, "f-par", label, outcome, ActivityTerm::Empty);
                            }
                        }
                    }
                }
            }
            Process::Saga { body, stored } if stored.is_empty() => {
                let inner = self.eval(body, &ActivityTerm::Empty);
                for (label, outcome, comp) in inner {
                    match outcome {
                        Outcome::Commit => {
                            self.emit(
                                &mut out,
                                "sub-cmt",
                                label,
                                Outcome::Commit,
                                ActivityTerm::seq(comp, beta.clone()).normalize(),
                            );
                        }
                        Outcome::Abort => {
                            let runs = self.compensation_runs(&comp);
                            if runs.contains(&(comp.clone(), Outcome::Commit, ActivityTerm::Empty))
                            {
                                self.emit(
                                    &mut out,
                                    "sub-abt",
                                    ActivityTerm::seq(label.clone(), comp.clone()).normalize(),
                                    Outcome::Commit,
                                    beta.clone(),
                                );
                            }
                            for (word, o, _) in runs.iter() {
                                match o {
                                    Outcome::Abort => {
                                        self.emit(
                                            &mut out,
                                            "sub-fail-2",
                                            ActivityTerm::seq(label.clone(), word.clone())
                                                .normalize(),
                                            Outcome::Fail,
                                            ActivityTerm::Empty,
                                        );
                                    }
                                    Outcome::ForcedFail => {
                                        self.emit(
                                            &mut out,
                                            "sub-forced-1",
                                            ActivityTerm::seq(label.clone(), word.clone())
                                                .normalize(),
                                            Outcome::ForcedFail,
                                            ActivityTerm::Empty,
                                        );
                                    }
                                    _ => {}
                                }
                            }
                        }
                        Outcome::Fail | Outcome::ForcedFail | Outcome::ForcedAbortFailed => {
                            debug_assert!(comp.is_empty());
                            self.emit(&mut out, "sub-fail-1", label, outcome, ActivityTerm::Empty);
                        }
                        Outcome::ForcedAbort => {
                            // the saga compensates locally and answers the
                            // external abort; a failing compensation answers
                            // with a failure and discards the context store,
                            // a successful one leaves the context store
                            // intact like every other abort-shaped outcome
                            let runs = self.compensation_runs(&comp);
                            for (word, o, _) in runs.iter() {
                                let (answered, store) = match o {
                                    Outcome::Commit => {
                                        (Outcome::ForcedAbort, beta.clone())
                                    }
                                    Outcome::Abort | Outcome::Fail => {
                                        (Outcome::ForcedAbortFailed, ActivityTerm::Empty)
                                    }
                                    _ => continue,
                                };
                                self.emit(
                                    &mut out,
                                    "sub-forced-2",
                                    ActivityTerm::seq(label.clone(), word.clone()).normalize(),
                                    answered,
                                    store,
                                );
                            }
                        }
                    }
                }
            }
            // Running sagas with a non-empty store, protected blocks and
            // killed blocks are runtime forms; no structural big-step rule
            // covers them, so only the interruption axioms below apply.
            Process::Saga { .. } | Process::Prot(_) | Process::Killed(_) => {}
        }
        self.emit(
            &mut out,
            "forced-abt",
            ActivityTerm::Empty,
            Outcome::ForcedAbort,
            beta.clone(),
        );
        self.emit(
            &mut out,
            "forced-fail",
            ActivityTerm::Empty,
            Outcome::ForcedFail,
            ActivityTerm::Empty,
        );
        out
    }

    /// Judgments of a stored compensation re-entering execution as a process
    /// of plain activities, from the empty store.
    fn compensation_runs(&mut self, comp: &ActivityTerm) -> BTreeSet<Triple> {
        if let Some(cached) = self.comp_cache.get(comp) {
            return cached.clone();
        }
        let runs = self.eval(&comp.as_process(), &ActivityTerm::Empty);
        debug_assert!(runs.iter().all(|(_, _, fin)| fin.is_empty()));
        self.comp_cache.insert(comp.clone(), runs.clone());
        runs
    }

    fn emit(
        &mut self,
        out: &mut BTreeSet<Triple>,
        rule: &'static str,
        label: ActivityTerm,
        outcome: Outcome,
        comp: ActivityTerm,
    ) {
        self.coverage.record(rule);
        out.insert((label, outcome, comp));
    }

    fn verdict(&self, name: &crate::syntax::ActivityName) -> Verdict {
        self.env
            .get(name)
            .expect("environment totality checked before evaluation")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_env, parse_process, ActivityName};

    fn name(s: &str) -> ActivityName {
        ActivityName::new(s).unwrap()
    }

    fn judgment(label: &str, outcome: Outcome, comp: &str) -> Judgment {
        Judgment {
            label: crate::syntax::parse_activity_term(label).unwrap().normalize(),
            outcome,
            compensation: crate::syntax::parse_activity_term(comp).unwrap().normalize(),
        }
    }

    #[test]
    fn combine_has_commit_as_unit() {
        for o in Outcome::ALL {
            assert_eq!(combine(Outcome::Commit, o), Some(o));
            assert_eq!(combine(o, Outcome::Commit), Some(o));
        }
    }

    #[test]
    fn combine_matches_the_defined_entries() {
        use Outcome::*;
        assert_eq!(combine(Commit, Abort), Some(Abort));
        assert_eq!(combine(Abort, ForcedAbort), Some(Abort));
        assert_eq!(combine(ForcedAbort, ForcedAbort), Some(ForcedAbort));
        assert_eq!(combine(ForcedFail, Fail), Some(Fail));
        assert_eq!(combine(ForcedFail, ForcedFail), Some(ForcedFail));
        assert_eq!(combine(ForcedAbortFailed, Abort), Some(Fail));
        assert_eq!(
            combine(ForcedAbortFailed, ForcedFail),
            Some(ForcedAbortFailed)
        );
        assert_eq!(combine(Abort, Abort), None);
        assert_eq!(combine(Fail, Fail), None);
        assert_eq!(combine(Fail, Abort), None);
        assert_eq!(combine(ForcedAbort, Fail), None);
        assert_eq!(combine(ForcedAbort, ForcedFail), None);
        assert_eq!(combine(ForcedAbort, ForcedAbortFailed), None);
        assert_eq!(combine(ForcedAbortFailed, ForcedAbortFailed), None);
    }

    #[test]
    fn combine_is_commutative_on_every_pair() {
        for a in Outcome::ALL {
            for b in Outcome::ALL {
                assert_eq!(combine(a, b), combine(b, a), "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn zero_admits_the_three_axioms() {
        let env = Env::new();
        let beta = ActivityTerm::Act(name("B"));
        let set = big_steps(&env, &Process::Zero, &beta).unwrap();
        let expected: BTreeSet<_> = [
            judgment("0", Outcome::Commit, "B"),
            judgment("0", Outcome::ForcedAbort, "B"),
            judgment("0", Outcome::ForcedFail, "0"),
        ]
        .into_iter()
        .collect();
        assert_eq!(set, expected);
    }

    #[test]
    fn committing_activity_stores_its_compensation() {
        let env = parse_env("A: commit\nB: commit").unwrap();
        let p = parse_process("A % B").unwrap();
        let top = top_big_steps(&env, &p).unwrap();
        let expected: BTreeSet<_> = [judgment("A", Outcome::Commit, "B")].into_iter().collect();
        assert_eq!(top, expected);
    }

    #[test]
    fn aborting_activity_keeps_the_store() {
        let env = parse_env("A: abort\nB: commit").unwrap();
        let p = parse_process("A % B").unwrap();
        let top = top_big_steps(&env, &p).unwrap();
        let expected: BTreeSet<_> = [judgment("0", Outcome::Abort, "0")].into_iter().collect();
        assert_eq!(top, expected);
    }

    #[test]
    fn missing_verdict_is_reported_by_name() {
        let env = parse_env("A: commit").unwrap();
        let p = parse_process("A % B").unwrap();
        let err = big_steps(&env, &p, &ActivityTerm::Empty).unwrap_err();
        assert_eq!(err, Error::MissingVerdict { name: "B".into() });
    }

    #[test]
    fn ship_loading_aborts_with_parallel_compensation() {
        let env =
            parse_env("loadA: commit\nunloadA: commit\nloadB: commit\nunloadB: commit\nleave: abort")
                .unwrap();
        let p = parse_process("([loadA % unloadA] | loadB % unloadB); leave").unwrap();
        let top = top_big_steps(&env, &p).unwrap();
        assert!(
            top.contains(&judgment("loadA | loadB", Outcome::Abort, "unloadA | unloadB")),
            "got: {top:?}"
        );
        let saga = Process::saga(p);
        let top = top_big_steps(&env, &saga).unwrap();
        assert!(
            top.contains(&judgment(
                "(loadA | loadB); (unloadA | unloadB)",
                Outcome::Commit,
                "0"
            )),
            "got: {top:?}"
        );
    }

    #[test]
    fn split_subactivities_compensate_locally() {
        let env = parse_env(
            "loadA1: commit\nunloadA1: commit\nloadA2: commit\nunloadA2: commit\n\
             loadB1: commit\nunloadB1: commit\nloadB2: abort\nunloadB2: commit",
        )
        .unwrap();
        let p = parse_process(
            "[loadA1 % unloadA1; loadA2 % unloadA2] | (loadB1 % unloadB1; loadB2 % unloadB2)",
        )
        .unwrap();
        let top = top_big_steps(&env, &p).unwrap();
        assert!(
            top.contains(&judgment(
                "(loadA1; unloadA1) | loadB1",
                Outcome::Abort,
                "unloadB1"
            )),
            "got: {top:?}"
        );
    }

    #[test]
    fn fail_outcomes_carry_empty_compensation() {
        let env = parse_env("a: commit\nb: abort").unwrap();
        for src in ["[a % b; a % b] | b", "[a % b] | b % a", "(a % b | b); [b % a]"] {
            let p = parse_process(src).unwrap();
            for j in big_steps(&env, &p, &ActivityTerm::Empty).unwrap() {
                if matches!(
                    j.outcome,
                    Outcome::Fail | Outcome::ForcedFail | Outcome::ForcedAbortFailed
                ) {
                    assert!(j.compensation.is_empty(), "{src}: {j}");
                }
            }
        }
    }

    #[test]
    fn forced_axioms_hold_everywhere() {
        let env = parse_env("a: commit\nb: abort").unwrap();
        let beta = ActivityTerm::Act(name("b"));
        for src in ["0", "a", "[a % b]", "a % b; b", "a | b", "[a % b; b] | a"] {
            let p = parse_process(src).unwrap();
            let set = big_steps(&env, &p, &beta).unwrap();
            assert!(set.contains(&judgment("0", Outcome::ForcedAbort, "b")), "{src}");
            assert!(set.contains(&judgment("0", Outcome::ForcedFail, "0")), "{src}");
        }
    }

    #[test]
    fn aborted_saga_with_failing_compensation_fails() {
        // The saga's body aborts mid-sequence; the stored compensation aborts
        // in turn, so the saga fails.
        let env = parse_env("a: abort\nb: abort\nc: commit").unwrap();
        let p = parse_process("[c % b; a % c]").unwrap();
        // body aborts after c with stored compensation b; b's run aborts.
        let top = top_big_steps(&env, &p).unwrap();
        assert!(top.contains(&judgment("c", Outcome::Fail, "0")), "got: {top:?}");
    }
}
