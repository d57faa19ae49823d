//! Parsing, pretty-printing, and environments.
//!
//! ```bash
//! cargo run -p sagas --example parse_and_print
//! ```

use sagas::syntax::{activities_of, parse_env, parse_process, pretty};

fn main() {
    let source = "([loadA % unloadA] | loadB % unloadB); leave";
    let process = parse_process(source).expect("valid source");
    println!("source:   {source}");
    println!("tree:     {process:?}");
    println!("printed:  {}", pretty(&process));
    assert_eq!(parse_process(&pretty(&process)).unwrap(), process);

    let names: Vec<String> = activities_of(&process)
        .into_iter()
        .map(|n| n.to_string())
        .collect();
    println!("activities: {}", names.join(", "));

    let env = parse_env("loadA: commit\nloadB: commit # comments are fine\nleave: abort")
        .expect("valid env");
    for (name, verdict) in env.iter() {
        println!("verdict:  {name} -> {verdict:?}");
    }

    // precedence: `;` binds tighter than `|`, both associate left
    let p = parse_process("A; B | C").unwrap();
    println!("A; B | C parses as {}", pretty(&p));

    match parse_process("loadA %") {
        Err(e) => println!("error reporting: {e}"),
        Ok(_) => unreachable!(),
    }
}
