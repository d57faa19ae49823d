//! An executable-semantics workbench for nested sagas: long-running
//! transactions whose activities carry compensations, composed in sequence
//! and in parallel, with transactions nested inside transactions.
//!
//! The crate implements two interpretations of the same process language and
//! the machinery to compare them:
//!
//! - [`syntax`] — the process grammar, parser, pretty-printer, and verdict
//!   environments (`.saga` and `.env` files).
//! - [`static_semantics`] — big-step enumeration: every derivable judgment
//!   `<P, beta> --label--> <outcome, beta'>`, with the six-valued outcome
//!   algebra and its partial combination table.
//! - [`dynamic_semantics`] — small-step execution: single transitions,
//!   exhaustive enumeration of maximal computations, and seeded scheduled
//!   runs. Aborts of parallel branches interrupt their siblings; running
//!   compensations are protected and delayed aborts re-raised.
//! - [`linearization`] — the bridge between tree-shaped big-step labels and
//!   flat small-step words: interleavings, linearization sets, and a lazy
//!   membership test.
//! - [`conformance`] — mechanical checks that every dynamic computation is
//!   covered by a static judgment and every static judgment is dynamically
//!   realizable, on single inputs or on exhaustively generated term
//!   families, with rule-coverage accounting and strictness reports.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p sagas --example parse_and_print
//! cargo run -p sagas --example static_judgments
//! cargo run -p sagas --example dynamic_traces
//! cargo run -p sagas --example seeded_run
//! cargo run -p sagas --example linearization
//! cargo run -p sagas --example nested_strictness
//! cargo run -p sagas --example conformance_sweep
//! ```
//!
//! The thin `sagac` binary drives the same library from the command line;
//! see the repository README.

pub mod conformance;
pub mod coverage;
pub mod dynamic_semantics;
pub mod error;
pub mod linearization;
pub mod static_semantics;
pub mod syntax;

pub use error::{Error, ParseError};
