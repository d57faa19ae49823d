//! Linearizations: interleavings, materialized sets, and the membership
//! test that avoids materializing factorially large sets.
//!
//! ```bash
//! cargo run -p sagas --example linearization
//! ```

use sagas::linearization::{
    interleavings, is_linearization, linearizations, word_to_string,
};
use sagas::syntax::{parse_activity_term, ActivityName};

fn main() {
    let ab: Vec<ActivityName> = ["A", "B"]
        .iter()
        .map(|s| ActivityName::new(*s).unwrap())
        .collect();
    let c: Vec<ActivityName> = vec![ActivityName::new("C").unwrap()];
    println!("-- interleavings of A;B with C");
    for w in interleavings(&ab, &c) {
        println!("{}", word_to_string(&w));
    }

    let label = parse_activity_term("(loadA1; unloadA1) | loadB1").unwrap();
    println!("-- linearizations of {label}");
    for w in linearizations(&label).unwrap() {
        println!("{}", word_to_string(&w));
    }

    // parallel compositions of n distinct activities have n! linearizations
    for n in 1..=6usize {
        let term = (2..=n).fold("x1".to_string(), |acc, i| format!("{acc} | x{i}"));
        let parsed = parse_activity_term(&term).unwrap();
        println!("lin({term}) has {} words", linearizations(&parsed).unwrap().len());
    }

    // membership without materialization
    let word: Vec<ActivityName> = ["loadA1", "loadB1", "unloadA1"]
        .iter()
        .map(|s| ActivityName::new(*s).unwrap())
        .collect();
    println!(
        "loadA1; loadB1; unloadA1 in lin((loadA1; unloadA1) | loadB1)? {}",
        is_linearization(&word, &label)
    );
}
