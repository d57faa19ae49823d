//! Scheduled single-trace execution: seeded pseudorandom and deterministic
//! schedulers, with reproducibility across runs.
//!
//! ```bash
//! cargo run -p sagas --example seeded_run
//! ```

use sagas::dynamic_semantics::{all_computations, run, Scheduler};
use sagas::syntax::{parse_env, parse_process};

fn main() {
    let env = parse_env(
        "loadA: commit\nunloadA: commit\nloadB: commit\nunloadB: commit\nleave: abort",
    )
    .unwrap();
    let process = parse_process("[([loadA % unloadA] | loadB % unloadB); leave]").unwrap();

    let all = all_computations(&env, &process).unwrap();
    println!("{} maximal computations in total", all.len());

    for seed in [0u64, 1, 7, 42] {
        let first = run(&env, &process, &Scheduler::Seeded(seed)).unwrap();
        let second = run(&env, &process, &Scheduler::Seeded(seed)).unwrap();
        assert_eq!(first, second, "same seed, same trace");
        assert!(all.contains(&first), "scheduled runs are enumerable");
        println!(
            "seed {seed}: gamma {} -> {}",
            first.gamma_string(),
            first.outcome()
        );
    }

    let fixed = run(&env, &process, &Scheduler::FirstEnabled).unwrap();
    println!(
        "first-enabled: gamma {} -> {}",
        fixed.gamma_string(),
        fixed.outcome()
    );
}
