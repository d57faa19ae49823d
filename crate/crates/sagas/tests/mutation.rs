//! Mutation harness: flipping any single entry of the outcome-combination
//! table, or disabling any of the delayed-abort rules, must make at least
//! one acceptance criterion fail. Each mutant is run against the example
//! reproductions, a curated slice of the generated family, and the table
//! fidelity check, in that order; the first red criterion kills it.
//!
//! ```bash
//! cargo test -p sagas --test mutation -- --nocapture
//! ```

use sagas::conformance::{
    check_dynamic_to_static_with, check_static_to_dynamic_with, CheckOptions,
};
use sagas::dynamic_semantics::{
    all_computations_traced, DynamicOptions, Limits, TerminalOutcome,
};
use sagas::static_semantics::{
    big_steps_traced, CombineTable, Judgment, Outcome, StaticOptions,
};
use sagas::syntax::{parse_activity_term, parse_env, parse_process, ActivityTerm, Env, Process};

#[derive(Clone)]
struct Mutant {
    name: String,
    static_options: StaticOptions,
    dynamic_options: DynamicOptions,
}

impl Mutant {
    fn table(a: Outcome, b: Outcome, flipped: Option<Outcome>) -> Self {
        Mutant {
            name: format!("table {a} ^ {b} -> {flipped:?}"),
            static_options: StaticOptions {
                table: CombineTable::standard().with_entry(a, b, flipped),
            },
            dynamic_options: DynamicOptions::default(),
        }
    }

    fn rule(rule: &str) -> Self {
        Mutant {
            name: format!("disable {rule}"),
            static_options: StaticOptions::default(),
            dynamic_options: DynamicOptions::disable(rule),
        }
    }

    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            static_options: self.static_options.clone(),
            dynamic_options: self.dynamic_options.clone(),
            limits: Limits::default(),
            initial_store: ActivityTerm::Empty,
        }
    }
}

fn judgment(label: &str, outcome: Outcome, comp: &str) -> Judgment {
    Judgment {
        label: parse_activity_term(label).unwrap().normalize(),
        outcome,
        compensation: parse_activity_term(comp).unwrap().normalize(),
    }
}

fn top(mutant: &Mutant, env: &Env, p: &Process) -> Option<Vec<Judgment>> {
    let (all, _) =
        big_steps_traced(env, p, &ActivityTerm::Empty, &mutant.static_options).ok()?;
    Some(all.into_iter().filter(|j| j.outcome.is_observable()).collect())
}

// criterion 1: the ship scenario's abort and wrapped-commit judgments
fn criterion_1_holds(mutant: &Mutant) -> bool {
    let env = parse_env(
        "loadA: commit\nunloadA: commit\nloadB: commit\nunloadB: commit\nleave: abort",
    )
    .unwrap();
    let p = parse_process("([loadA % unloadA] | loadB % unloadB); leave").unwrap();
    let Some(judgments) = top(mutant, &env, &p) else {
        return false;
    };
    if !judgments.contains(&judgment("loadA | loadB", Outcome::Abort, "unloadA | unloadB")) {
        return false;
    }
    let Some(judgments) = top(mutant, &env, &Process::saga(p)) else {
        return false;
    };
    judgments.contains(&judgment(
        "(loadA | loadB); (unloadA | unloadB)",
        Outcome::Commit,
        "0",
    ))
}

// criterion 3: the split-subactivity local-compensation judgment
fn criterion_3_holds(mutant: &Mutant) -> bool {
    let env = parse_env(
        "loadA1: commit\nunloadA1: commit\nloadA2: commit\nunloadA2: commit\n\
         loadB1: commit\nunloadB1: commit\nloadB2: abort\nunloadB2: commit",
    )
    .unwrap();
    let p = parse_process(
        "[loadA1 % unloadA1; loadA2 % unloadA2] | (loadB1 % unloadB1; loadB2 % unloadB2)",
    )
    .unwrap();
    match top(mutant, &env, &p) {
        Some(js) => js.contains(&judgment(
            "(loadA1; unloadA1) | loadB1",
            Outcome::Abort,
            "unloadB1",
        )),
        None => false,
    }
}

// criterion 4 (iii): the delayed-abort trace with its dagger step
fn criterion_4_holds(mutant: &Mutant) -> bool {
    let env = parse_env(
        "loadA1: commit\nunloadA1: commit\nloadA2: commit\nunloadA2: commit\n\
         loadB: abort\nunloadB: commit\nleave: commit",
    )
    .unwrap();
    let p = parse_process(
        "([loadA1 % unloadA1; loadA2 % unloadA2] | loadB % unloadB); leave",
    )
    .unwrap();
    let Ok((computations, _)) =
        all_computations_traced(&env, &p, &mutant.dynamic_options, &Limits::default())
    else {
        return false;
    };
    computations.iter().any(|c| {
        c.gamma()
            .iter()
            .map(|n| n.as_str())
            .eq(["loadA1", "unloadA1"])
            && c.has_dagger()
            && c.outcome() == TerminalOutcome::Abort
            && c.residual().is_empty()
    })
}

// criteria 7/8 on a curated slice of the generated family: terms known to
// exercise the parallel-abort, delayed-abort, protection, and failure rules
fn family_slice_holds(mutant: &Mutant) -> bool {
    let curated = [
        "0",
        "a",
        "a % b",
        "a % b; b",
        "a | b",
        "[a % b]",
        "[a % b; b]",
        "[[a % b; b]]",
        "[a % b; b]; a",
        "[a % b; b] | a",
        "b | [a % b; a]",
        "a | [b % b; a]",
        "[a | [b % b; a]]",
        "[b | [a % b; a]]",
        "(b | [a % b; a]); 0",
        "(b | [a % b; a]) | 0",
        "[a % a; a % a; b]",
        "[a % a; b]",
        "(a % a | b % b); a",
        "[a % a | b % b]",
    ];
    let options = mutant.check_options();
    for src in curated {
        let p = parse_process(src).unwrap();
        for env in sagas::conformance::environments_for(
            &p,
            &sagas::conformance::GenBounds::exhaustive(3, 2, &["a", "b"]),
        ) {
            let Ok(t1) = check_dynamic_to_static_with(&env, &p, &options) else {
                return false;
            };
            let Ok(t2) = check_static_to_dynamic_with(&env, &p, &options) else {
                return false;
            };
            if !t1.passed || !t2.passed {
                return false;
            }
        }
    }
    true
}

// criterion 6: the combination table matches the frozen entries
fn criterion_6_holds(mutant: &Mutant) -> bool {
    let standard = CombineTable::standard();
    Outcome::ALL.iter().all(|&a| {
        Outcome::ALL
            .iter()
            .all(|&b| mutant.static_options.table.get(a, b) == standard.get(a, b))
    })
}

fn kill(mutant: &Mutant) -> Option<&'static str> {
    if !criterion_1_holds(mutant) {
        return Some("criterion 1");
    }
    if !criterion_3_holds(mutant) {
        return Some("criterion 3");
    }
    if !criterion_4_holds(mutant) {
        return Some("criterion 4");
    }
    if !family_slice_holds(mutant) {
        return Some("criteria 7/8 (family slice)");
    }
    if !criterion_6_holds(mutant) {
        return Some("criterion 6");
    }
    None
}

#[test]
fn criterion_12_every_mutant_is_killed() {
    let started = std::time::Instant::now();
    let mut mutants = Vec::new();
    for (i, a) in Outcome::ALL.into_iter().enumerate() {
        for b in Outcome::ALL.into_iter().skip(i) {
            let standard = CombineTable::standard().get(a, b);
            let flipped = match standard {
                Some(_) => None,
                None => Some(Outcome::Commit),
            };
            mutants.push(Mutant::table(a, b, flipped));
        }
    }
    for rule in ["a-par-d", "k-saga-d", "s-killed-d"] {
        mutants.push(Mutant::rule(rule));
    }
    assert_eq!(mutants.len(), 24);

    let baseline = Mutant {
        name: "baseline".into(),
        static_options: StaticOptions::default(),
        dynamic_options: DynamicOptions::default(),
    };
    assert_eq!(kill(&baseline), None, "the unmutated build must pass everything");

    let mut survivors = Vec::new();
    let mut semantic_kills = 0;
    for mutant in &mutants {
        match kill(mutant) {
            Some(criterion) => {
                if criterion != "criterion 6" {
                    semantic_kills += 1;
                }
                println!("killed: {:<45} by {criterion}", mutant.name);
            }
            None => survivors.push(mutant.name.clone()),
        }
    }
    assert!(
        survivors.is_empty(),
        "criterion 12: FAIL — surviving mutants: {survivors:?}"
    );
    println!(
        "criterion 12: PASS — {} mutants killed ({} by semantic checks) in {:?}",
        mutants.len(),
        semantic_kills,
        started.elapsed()
    );
}
