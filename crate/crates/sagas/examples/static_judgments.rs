//! Big-step enumeration on the ship-loading scenario: two goods are loaded
//! in parallel (the first inside its own saga), then the ship leaves.
//!
//! ```bash
//! cargo run -p sagas --example static_judgments
//! ```

use sagas::static_semantics::{big_steps, top_big_steps};
use sagas::syntax::{parse_activity_term, parse_env, parse_process};

fn main() {
    let process = parse_process("([loadA % unloadA] | loadB % unloadB); leave").unwrap();
    let env = parse_env(
        "loadA: commit\nunloadA: commit\nloadB: commit\nunloadB: commit\nleave: abort",
    )
    .unwrap();

    println!("-- leaving aborts: the whole process aborts, compensations pending");
    for j in top_big_steps(&env, &process).unwrap() {
        println!("{j}");
    }

    println!("-- wrapped in a saga: compensation runs and the saga commits");
    let wrapped = parse_process("[([loadA % unloadA] | loadB % unloadB); leave]").unwrap();
    for j in top_big_steps(&env, &wrapped).unwrap() {
        println!("{j}");
    }

    println!("-- loadB and unloadA abort: the interruption timings differ");
    let env = parse_env(
        "loadA: commit\nunloadA: abort\nloadB: abort\nunloadB: commit\nleave: commit",
    )
    .unwrap();
    for j in top_big_steps(&env, &process).unwrap() {
        println!("{j}");
    }

    println!("-- full six-outcome set for a single activity, from store b");
    let env = parse_env("a: commit\nb: commit").unwrap();
    let single = parse_process("a % b").unwrap();
    let store = parse_activity_term("b").unwrap();
    for j in big_steps(&env, &single, &store).unwrap() {
        println!("{j}");
    }
}
