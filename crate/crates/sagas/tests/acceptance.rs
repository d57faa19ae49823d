//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! The family-sweep criteria share a single exhaustive run.
//!
//! Run with:
//!
//! ```bash
//! cargo test -p sagas --test acceptance -- --nocapture
//! ```

use std::collections::BTreeSet;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use sagas::conformance::{check_family, FamilyReport, GenBounds};
use sagas::dynamic_semantics::{
    all_computations, StepTarget, TerminalOutcome, DYNAMIC_RULES,
};
use sagas::linearization::{is_linearization, linearizations, word_to_string};
use sagas::static_semantics::{
    combine, top_big_steps, Judgment, Outcome, STATIC_RULES,
};
use sagas::syntax::{
    parse_activity_term, parse_env, parse_process, ActivityName, ActivityTerm, Env, Process,
};

fn judgment(label: &str, outcome: Outcome, comp: &str) -> Judgment {
    Judgment {
        label: parse_activity_term(label).unwrap().normalize(),
        outcome,
        compensation: parse_activity_term(comp).unwrap().normalize(),
    }
}

fn names(words: &[&str]) -> Vec<ActivityName> {
    words.iter().map(|w| ActivityName::new(*w).unwrap()).collect()
}

fn ship_process() -> Process {
    parse_process("([loadA % unloadA] | loadB % unloadB); leave").unwrap()
}

fn pass(criterion: &str, detail: &str) {
    println!("criterion {criterion}: PASS — {detail}");
}

#[test]
fn criterion_01_ship_static_reproduction() {
    let started = Instant::now();
    let env = parse_env(
        "loadA: commit\nunloadA: commit\nloadB: commit\nunloadB: commit\nleave: abort",
    )
    .unwrap();
    let top = top_big_steps(&env, &ship_process()).unwrap();
    assert!(
        top.contains(&judgment(
            "loadA | loadB",
            Outcome::Abort,
            "unloadA | unloadB"
        )),
        "criterion 1: FAIL — abort judgment missing: {top:?}"
    );
    let wrapped = Process::saga(ship_process());
    let top = top_big_steps(&env, &wrapped).unwrap();
    assert!(
        top.contains(&judgment(
            "(loadA | loadB); (unloadA | unloadB)",
            Outcome::Commit,
            "0"
        )),
        "criterion 1: FAIL — wrapped commit judgment missing: {top:?}"
    );
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "criterion 1: FAIL — {elapsed:?}");
    pass("1", &format!("ship judgments reproduced in {elapsed:?}"));
}

/// Both interruption timings of the scenario where loading B and undoing A
/// are refused: aborting before anything ran, and failing after the first
/// load because the saga's compensation aborts while answering the abort.
///
/// The second judgment asks for an interruption of an atomic activity after
/// its completion inside a saga. The rule set implemented here derives
/// interruption from the label-0 axioms, under which that judgment does not
/// exist — and any extension deriving it makes observable judgments that no
/// computation realizes, so the realizability suite (criterion 8) would
/// report real violations. The assertion is kept as stated and fails; see
/// the README design notes.
#[test]
fn criterion_02_ship_interruption_timings() {
    let started = Instant::now();
    let env = parse_env(
        "loadA: commit\nunloadA: abort\nloadB: abort\nunloadB: commit\nleave: commit",
    )
    .unwrap();
    let top = top_big_steps(&env, &ship_process()).unwrap();
    assert!(
        top.contains(&judgment("0", Outcome::Abort, "0")),
        "criterion 2: FAIL — early-interruption judgment missing: {top:?}"
    );
    let late = judgment("loadA", Outcome::Fail, "0");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "criterion 2: FAIL — {elapsed:?}");
    assert!(
        top.contains(&late),
        "criterion 2: FAIL — judgment (loadA, fail, 0) is not derivable under the \
         label-0 interruption axioms; deriving it is incompatible with criterion 8 \
         (set for this subject: {top:?})"
    );
    pass("2", &format!("both interruption timings present in {elapsed:?}"));
}

#[test]
fn criterion_03_split_subactivities_static() {
    let started = Instant::now();
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
        "criterion 3: FAIL — local-compensation judgment missing: {top:?}"
    );
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "criterion 3: FAIL — {elapsed:?}");
    pass("3", &format!("split-subactivity judgment present in {elapsed:?}"));
}

#[test]
fn criterion_04_dynamic_trace_reproduction() {
    let started = Instant::now();
    let env = parse_env(
        "loadA: commit\nunloadA: commit\nloadB: commit\nunloadB: commit\nleave: abort",
    )
    .unwrap();
    let computations = all_computations(&env, &ship_process()).unwrap();
    assert!(
        computations.iter().any(|c| {
            c.gamma() == names(&["loadA", "loadB"])
                && c.outcome() == TerminalOutcome::Abort
                && *c.residual() == parse_activity_term("unloadB; unloadA").unwrap()
        }),
        "criterion 4: FAIL — abort trace with residual unloadB; unloadA missing"
    );
    let wrapped = Process::saga(ship_process());
    let computations = all_computations(&env, &wrapped).unwrap();
    assert!(
        computations.iter().any(|c| {
            c.gamma() == names(&["loadA", "loadB", "unloadB", "unloadA"])
                && c.outcome() == TerminalOutcome::Commit
                && c.residual().is_empty()
        }),
        "criterion 4: FAIL — compensating commit trace missing"
    );
    let env = parse_env(
        "loadA1: commit\nunloadA1: commit\nloadA2: commit\nunloadA2: commit\n\
         loadB: abort\nunloadB: commit\nleave: commit",
    )
    .unwrap();
    let nested = parse_process(
        "([loadA1 % unloadA1; loadA2 % unloadA2] | loadB % unloadB); leave",
    )
    .unwrap();
    let computations = all_computations(&env, &nested).unwrap();
    let delayed = computations
        .iter()
        .find(|c| {
            c.gamma() == names(&["loadA1", "unloadA1"])
                && c.has_dagger()
                && c.outcome() == TerminalOutcome::Abort
                && c.residual().is_empty()
        })
        .expect("criterion 4: FAIL — delayed-abort trace missing");
    let killed = delayed
        .steps
        .iter()
        .find_map(|(l, t)| if l.is_dagger() { Some(t) } else { None })
        .unwrap();
    match killed {
        StepTarget::Continue(cfg) => assert_eq!(
            cfg.process,
            Process::killed(parse_activity_term("unloadA1").unwrap().as_process()),
            "criterion 4: FAIL — dagger target is not the killed compensation"
        ),
        StepTarget::Terminal { .. } => panic!("criterion 4: FAIL — dagger into terminal"),
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "criterion 4: FAIL — {elapsed:?}");
    pass("4", &format!("all three trace shapes reproduced in {elapsed:?}"));
}

#[test]
fn criterion_05_dynamic_strictness() {
    let started = Instant::now();
    let env = parse_env(
        "loadA1: commit\nunloadA1: commit\nloadA2: commit\nunloadA2: commit\n\
         loadB1: commit\nunloadB1: commit\nloadB2: abort\nunloadB2: commit",
    )
    .unwrap();
    let p = parse_process(
        "[loadA1 % unloadA1; loadA2 % unloadA2] | (loadB1 % unloadB1; loadB2 % unloadB2)",
    )
    .unwrap();
    let computations = all_computations(&env, &p).unwrap();
    assert!(
        computations.iter().any(|c| {
            c.gamma() == names(&["loadA1", "loadB1", "unloadA1"])
                && c.outcome() == TerminalOutcome::Abort
                && *c.residual() == parse_activity_term("unloadB1").unwrap()
        }),
        "criterion 5: FAIL — realizable linearization missing"
    );
    let forbidden = names(&["loadA1", "unloadA1"]);
    assert!(
        computations.iter().all(|c| !c.gamma().starts_with(&forbidden)),
        "criterion 5: FAIL — a computation observes the compensation before the abort"
    );
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "criterion 5: FAIL — {elapsed:?}");
    pass("5", &format!("strict ordering confirmed in {elapsed:?}"));
}

#[test]
fn criterion_06_combine_table_fidelity() {
    use Outcome::*;
    let started = Instant::now();
    // the twelve defined unordered entries, frozen
    let defined: &[(Outcome, Outcome, Outcome)] = &[
        (Commit, Commit, Commit),
        (Commit, Abort, Abort),
        (Commit, Fail, Fail),
        (Commit, ForcedAbort, ForcedAbort),
        (Commit, ForcedFail, ForcedFail),
        (Commit, ForcedAbortFailed, ForcedAbortFailed),
        (Abort, ForcedAbort, Abort),
        (ForcedAbort, ForcedAbort, ForcedAbort),
        (ForcedFail, Fail, Fail),
        (ForcedFail, ForcedFail, ForcedFail),
        (ForcedAbortFailed, Abort, Fail),
        (ForcedAbortFailed, ForcedFail, ForcedAbortFailed),
    ];
    let mut expected: std::collections::BTreeMap<(Outcome, Outcome), Option<Outcome>> =
        std::collections::BTreeMap::new();
    for a in Outcome::ALL {
        for b in Outcome::ALL {
            expected.insert((a, b), None);
        }
    }
    for &(a, b, r) in defined {
        expected.insert((a, b), Some(r));
        expected.insert((b, a), Some(r));
    }
    let mut checked = 0;
    for a in Outcome::ALL {
        for b in Outcome::ALL {
            assert_eq!(
                combine(a, b),
                expected[&(a, b)],
                "criterion 6: FAIL — entry ({a}, {b})"
            );
            assert_eq!(combine(a, b), combine(b, a), "criterion 6: FAIL — symmetry");
            checked += 1;
        }
    }
    assert_eq!(checked, 36);
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "criterion 6: FAIL — {elapsed:?}");
    pass("6", &format!("all 36 ordered pairs match in {elapsed:?}"));
}

// ──────────────────────────────────────────────
// Family criteria share one exhaustive sweep
// ──────────────────────────────────────────────

fn family_report() -> &'static (FamilyReport, Duration) {
    static REPORT: OnceLock<(FamilyReport, Duration)> = OnceLock::new();
    REPORT.get_or_init(|| {
        let bounds = GenBounds::exhaustive(3, 2, &["a", "b"]);
        let started = Instant::now();
        let report = check_family(&bounds).expect("family sweep must enumerate");
        (report, started.elapsed())
    })
}

#[test]
fn criterion_07_theorem1_family() {
    let (report, elapsed) = family_report();
    assert!(
        report.dynamic_to_static_failures.is_empty(),
        "criterion 7: FAIL — uncovered computations on {} subjects, first: {:?}",
        report.dynamic_to_static_failures.len(),
        report.dynamic_to_static_failures.first().map(|r| (&r.subject, &r.witnesses))
    );
    assert!(
        *elapsed < Duration::from_secs(600),
        "criterion 7: FAIL — sweep took {elapsed:?}"
    );
    let missing = report.dynamic_coverage.missing(&DYNAMIC_RULES);
    assert!(
        missing.is_empty(),
        "criterion 7: FAIL — small-step rules never fired across the family: {missing:?} \
         (k-prot-d is structurally unreachable from source-level terms: a dagger can only \
         originate under a parallel whose sibling holds running compensations, and \
         killed/protected bodies never contain such a shape)"
    );
    pass(
        "7",
        &format!(
            "coverage of every computation on {} subjects in {elapsed:?}",
            report.subjects
        ),
    );
}

#[test]
fn criterion_08_theorem2_family() {
    let (report, elapsed) = family_report();
    assert!(
        report.static_to_dynamic_failures.is_empty(),
        "criterion 8: FAIL — unrealizable judgments on {} subjects, first: {:?}",
        report.static_to_dynamic_failures.len(),
        report.static_to_dynamic_failures.first().map(|r| (&r.subject, &r.witnesses))
    );
    assert!(
        *elapsed < Duration::from_secs(600),
        "criterion 8: FAIL — sweep took {elapsed:?}"
    );
    let missing = report.static_coverage.missing(&STATIC_RULES);
    assert!(
        missing.is_empty(),
        "criterion 8: FAIL — big-step rules never fired across the family: {missing:?}"
    );
    pass(
        "8",
        &format!(
            "realizability of every judgment on {} subjects in {elapsed:?}",
            report.subjects
        ),
    );
}

#[test]
fn criterion_09_dagger_lemma_family() {
    let (report, _) = family_report();
    assert!(
        report.dagger_failures.is_empty(),
        "criterion 9: FAIL — dagger steps with non-killed targets: {:?}",
        report.dagger_failures.first().map(|r| (&r.subject, &r.witnesses))
    );
    assert!(
        report.dynamic_coverage.count("a-par-d") > 0,
        "criterion 9: FAIL — no dagger step ever fired, the check is vacuous"
    );
    pass(
        "9",
        &format!(
            "every dagger lands on killed parallels ({} dagger creations)",
            report.dynamic_coverage.count("a-par-d")
        ),
    );
}

// ──────────────────────────────────────────────
// Linearization oracle
// ──────────────────────────────────────────────

// every term shape with n leaves, operators Seq/Par, labeled by `label`
fn term_shapes(n: usize, label: &dyn Fn(usize) -> ActivityName) -> Vec<ActivityTerm> {
    fn build(leaves: &[ActivityName]) -> Vec<ActivityTerm> {
        if leaves.len() == 1 {
            return vec![ActivityTerm::Act(leaves[0].clone())];
        }
        let mut out = Vec::new();
        for split in 1..leaves.len() {
            for l in build(&leaves[..split]) {
                for r in build(&leaves[split..]) {
                    out.push(ActivityTerm::seq(l.clone(), r.clone()));
                    out.push(ActivityTerm::par(l.clone(), r.clone()));
                }
            }
        }
        out
    }
    let leaves: Vec<ActivityName> = (0..n).map(label).collect();
    build(&leaves)
}

// visit each permutation in place (Heap's algorithm); the distinct-name
// shapes have no duplicate permutations to skip
fn for_each_permutation(word: &[ActivityName], visit: &mut dyn FnMut(&[ActivityName])) {
    fn heap(k: usize, items: &mut [ActivityName], visit: &mut dyn FnMut(&[ActivityName])) {
        if k <= 1 {
            visit(items);
            return;
        }
        for i in 0..k {
            heap(k - 1, items, visit);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let mut items = word.to_vec();
    let len = items.len();
    heap(len, &mut items, visit);
}

#[test]
fn criterion_10_linearization_oracle() {
    let started = Instant::now();
    let distinct = |i: usize| ActivityName::new(format!("x{i}")).unwrap();
    let mut terms_checked = 0usize;
    let mut words_checked = 0usize;
    // distinct names: every shape up to 7 occurrences, membership checked
    // against every permutation of the occurrence multiset
    for n in 1..=7usize {
        for term in term_shapes(n, &distinct) {
            let set = linearizations(&term).unwrap();
            terms_checked += 1;
            let mut disagreement: Option<Vec<ActivityName>> = None;
            for_each_permutation(&term.occurrences(), &mut |w| {
                words_checked += 1;
                if disagreement.is_none() && is_linearization(w, &term) != set.contains(w) {
                    disagreement = Some(w.to_vec());
                }
            });
            if let Some(w) = disagreement {
                panic!(
                    "criterion 10: FAIL — disagreement on {} for {term}",
                    word_to_string(&w)
                );
            }
        }
    }
    // duplicate names over a two-letter alphabet, all candidate words
    for n in 1..=5usize {
        for shape in term_shapes(n, &|_| ActivityName::new("a").unwrap()) {
            for mask in 0..(1u32 << n) {
                let mut next = 0usize;
                let relabeled = relabel(&shape, &mut next, mask);
                let set = linearizations(&relabeled).unwrap();
                terms_checked += 1;
                for wmask in 0..(1u32 << n) {
                    let w: Vec<ActivityName> = (0..n)
                        .map(|i| {
                            let s = if wmask & (1 << i) != 0 { "b" } else { "a" };
                            ActivityName::new(s).unwrap()
                        })
                        .collect();
                    words_checked += 1;
                    assert_eq!(
                        is_linearization(&w, &relabeled),
                        set.contains(&w),
                        "criterion 10: FAIL — disagreement on {} for {relabeled}",
                        word_to_string(&w)
                    );
                }
            }
        }
    }
    // parallel compositions of n distinct activities have n! linearizations
    let mut factorial = 1usize;
    for n in 1..=6usize {
        factorial *= n;
        let term = (1..n).fold(ActivityTerm::Act(distinct(0)), |acc, i| {
            ActivityTerm::par(acc, ActivityTerm::Act(distinct(i)))
        });
        assert_eq!(
            linearizations(&term).unwrap().len(),
            factorial,
            "criterion 10: FAIL — |lin| of {n} parallel activities"
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(60),
        "criterion 10: FAIL — took {elapsed:?}"
    );
    pass(
        "10",
        &format!("{terms_checked} terms, {words_checked} words agreed in {elapsed:?}"),
    );
}

fn relabel(shape: &ActivityTerm, next: &mut usize, mask: u32) -> ActivityTerm {
    match shape {
        ActivityTerm::Empty => ActivityTerm::Empty,
        ActivityTerm::Act(_) => {
            let s = if mask & (1 << *next) != 0 { "b" } else { "a" };
            *next += 1;
            ActivityTerm::Act(ActivityName::new(s).unwrap())
        }
        ActivityTerm::Seq(l, r) => {
            let l = relabel(l, next, mask);
            let r = relabel(r, next, mask);
            ActivityTerm::seq(l, r)
        }
        ActivityTerm::Par(l, r) => {
            let l = relabel(l, next, mask);
            let r = relabel(r, next, mask);
            ActivityTerm::par(l, r)
        }
    }
}

#[test]
fn criterion_11_progress_and_termination() {
    let (report, _) = family_report();
    let enumeration_failures: Vec<String> = report
        .dynamic_to_static_failures
        .iter()
        .chain(&report.static_to_dynamic_failures)
        .chain(&report.dagger_failures)
        .flat_map(|r| {
            r.witnesses.iter().filter_map(|w| match w {
                sagas::conformance::Witness::EnumerationFailure { error } => {
                    Some(format!("{}: {error}", r.subject.process))
                }
                _ => None,
            })
        })
        .collect();
    assert!(
        enumeration_failures.is_empty(),
        "criterion 11: FAIL — stuck or non-terminating enumerations: {enumeration_failures:?}"
    );
    assert!(report.computations > 0);
    pass(
        "11",
        &format!(
            "{} computations enumerated with no stuck configuration and no cap overflow",
            report.computations
        ),
    );
}

// ──────────────────────────────────────────────
// Supplementary checks backing the suite
// ──────────────────────────────────────────────

#[test]
fn env_from_example_subjects_contains_documented_envs() {
    // the smallest family pairs terms with both verdicts of each name
    let bounds = GenBounds::exhaustive(1, 0, &["a"]);
    let terms = sagas::conformance::generate_terms(&bounds);
    let a = ActivityName::new("a").unwrap();
    let single = Process::activity(a.clone(), None);
    assert!(terms.contains(&single));
    let envs = sagas::conformance::environments_for(&single, &bounds);
    let verdicts: BTreeSet<Option<sagas::syntax::Verdict>> =
        envs.iter().map(|e| e.get(&a)).collect();
    assert_eq!(verdicts.len(), 2);
    let _: &Env = &envs[0];
}

#[test]
fn generated_family_size_snapshot() {
    // frozen from the generator's first run; guards against accidental
    // changes to the family the sweep criteria quantify over
    let bounds = GenBounds::exhaustive(3, 1, &["a", "b"]);
    assert_eq!(sagas::conformance::generate_terms(&bounds).len(), 96_902);
    let bounds = GenBounds::exhaustive(3, 2, &["a", "b"]);
    assert_eq!(sagas::conformance::generate_terms(&bounds).len(), 463_053);
}
