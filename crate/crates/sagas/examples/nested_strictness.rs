//! Where the two semantics differ: with nesting, the big-step semantics
//! admits observation orders the small-step semantics refuses. Splitting
//! the loads in two makes the committed subsaga's compensation observable
//! before the aborting activity statically, but never dynamically.
//!
//! ```bash
//! cargo run -p sagas --example nested_strictness
//! ```

use sagas::conformance::{strictness_witnesses, Witness};
use sagas::dynamic_semantics::all_computations;
use sagas::static_semantics::top_big_steps;
use sagas::syntax::{parse_env, parse_process};

fn main() {
    let process = parse_process(
        "[loadA1 % unloadA1; loadA2 % unloadA2] | (loadB1 % unloadB1; loadB2 % unloadB2)",
    )
    .unwrap();
    let env = parse_env(
        "loadA1: commit\nunloadA1: commit\nloadA2: commit\nunloadA2: commit\n\
         loadB1: commit\nunloadB1: commit\nloadB2: abort\nunloadB2: commit",
    )
    .unwrap();

    println!("-- observable judgments");
    for j in top_big_steps(&env, &process).unwrap() {
        println!("{j}");
    }

    println!("-- maximal computations");
    for c in all_computations(&env, &process).unwrap() {
        println!(
            "gamma: {} -> {}, residual: {}",
            c.gamma_string(),
            c.outcome(),
            c.residual()
        );
    }

    println!("-- strictness partition per judgment");
    let report = strictness_witnesses(&env, &process).unwrap();
    for w in &report.witnesses {
        if let Witness::StrictnessPartition {
            judgment,
            realizable,
            unrealizable,
            ..
        } = w
        {
            println!("{judgment}");
            for word in realizable {
                println!("  realizable:   {word}");
            }
            for word in unrealizable {
                println!("  unrealizable: {word}");
            }
        }
    }
}
