//! Small-step execution: exhaustive computations for the ship-loading
//! scenario, including delayed abortion of a running saga.
//!
//! ```bash
//! cargo run -p sagas --example dynamic_traces
//! ```

use sagas::dynamic_semantics::{all_computations, StepTarget};
use sagas::syntax::{parse_env, parse_process};

fn main() {
    let env = parse_env(
        "loadA: commit\nunloadA: commit\nloadB: commit\nunloadB: commit\nleave: abort",
    )
    .unwrap();

    let process = parse_process("([loadA % unloadA] | loadB % unloadB); leave").unwrap();
    println!("-- every maximal computation when leaving aborts");
    for c in all_computations(&env, &process).unwrap() {
        println!(
            "gamma: {} -> {}, residual: {}",
            c.gamma_string(),
            c.outcome(),
            c.residual()
        );
    }

    let wrapped = parse_process("[([loadA % unloadA] | loadB % unloadB); leave]").unwrap();
    println!("-- wrapped in a saga the compensations execute, then it commits");
    for c in all_computations(&env, &wrapped).unwrap() {
        println!(
            "gamma: {} -> {}, residual: {}",
            c.gamma_string(),
            c.outcome(),
            c.residual()
        );
    }

    // splitting loadA in two leaves the saga running when loadB aborts;
    // abortion is delayed (dagger) until the compensation finishes
    let env = parse_env(
        "loadA1: commit\nunloadA1: commit\nloadA2: commit\nunloadA2: commit\n\
         loadB: abort\nunloadB: commit\nleave: commit",
    )
    .unwrap();
    let nested = parse_process(
        "([loadA1 % unloadA1; loadA2 % unloadA2] | loadB % unloadB); leave",
    )
    .unwrap();
    println!("-- delayed abortion: full step listing of the dagger trace");
    let computations = all_computations(&env, &nested).unwrap();
    let trace = computations
        .iter()
        .find(|c| c.has_dagger() && c.gamma_string() == "loadA1; unloadA1")
        .expect("the delayed-abort trace exists");
    for (label, target) in &trace.steps {
        match target {
            StepTarget::Continue(cfg) => {
                println!("  --{label}--> <{}, {}>", cfg.process, cfg.stored)
            }
            StepTarget::Terminal { outcome, residual } => {
                println!("  --{label}--> <{outcome}, {residual}>")
            }
        }
    }
}
