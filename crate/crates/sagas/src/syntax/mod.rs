//! Concrete syntax for saga processes: term trees, the parser, the
//! pretty-printer, and the verdict environment.
//!
//! The grammar, in the order of loosest to tightest binding:
//!
//! ```text
//! par  := seq ("|" seq)*
//! seq  := atom (";" atom)*
//! atom := "0" | ident ("%" ident)? | "[" par "]" | "(" par ")"
//! ```
//!
//! `A % B` is an activity `A` compensated by `B`, a bare `A` is an activity
//! with the empty compensation, and `[P]` is a saga. Both operators associate
//! to the left and `;` binds tighter than `|`.

mod parse;

pub use parse::{parse_activity_term, parse_env, parse_process};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

// ──────────────────────────────────────────────
// Activity names and verdicts
// ──────────────────────────────────────────────

/// Name of an atomic activity: `[A-Za-z_][A-Za-z0-9_]*`, never `0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivityName(String);

impl ActivityName {
    /// Builds a validated name. Rejects anything that is not a plain
    /// identifier, including the reserved token `0`.
    pub fn new(name: impl Into<String>) -> Result<Self, ParseError> {
        let name = name.into();
        let mut chars = name.chars();
        let valid = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            }
            _ => false,
        };
        if !valid {
            return Err(ParseError::new(
                0,
                0,
                format!("invalid activity name `{name}`"),
            ));
        }
        Ok(ActivityName(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActivityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Verdict an environment assigns to an activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Commit,
    Abort,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Commit => "commit",
            Verdict::Abort => "abort",
        }
    }
}

/// Verdict table: one commit/abort verdict per activity name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Env {
    verdicts: std::collections::BTreeMap<ActivityName, Verdict>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Inserts a verdict; returns false when the name was already declared.
    pub fn insert(&mut self, name: ActivityName, verdict: Verdict) -> bool {
        self.verdicts.insert(name, verdict).is_none()
    }

    pub fn get(&self, name: &ActivityName) -> Option<Verdict> {
        self.verdicts.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.verdicts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verdicts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ActivityName, Verdict)> {
        self.verdicts.iter().map(|(n, v)| (n, *v))
    }

    /// Names required by `p` but absent from this environment, in order.
    pub fn missing_for(&self, p: &Process) -> Vec<ActivityName> {
        activities_of(p)
            .into_iter()
            .filter(|n| !self.verdicts.contains_key(n))
            .collect()
    }

    /// Fills every name of `names` that lacks a verdict with `Commit`.
    pub fn fill_default_commit(&mut self, names: &BTreeSet<ActivityName>) {
        for n in names {
            self.verdicts.entry(n.clone()).or_insert(Verdict::Commit);
        }
    }
}

impl FromIterator<(ActivityName, Verdict)> for Env {
    fn from_iter<I: IntoIterator<Item = (ActivityName, Verdict)>>(iter: I) -> Self {
        Env {
            verdicts: iter.into_iter().collect(),
        }
    }
}

// ──────────────────────────────────────────────
// Terms over activity names (observations and compensations)
// ──────────────────────────────────────────────

/// Terms over activity names closed under sequence and parallel. Used both
/// as observation labels and as stored compensations.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActivityTerm {
    #[default]
    Empty,
    Act(ActivityName),
    Seq(Box<ActivityTerm>, Box<ActivityTerm>),
    Par(Box<ActivityTerm>, Box<ActivityTerm>),
}

impl ActivityTerm {
    pub fn act(name: ActivityName) -> Self {
        ActivityTerm::Act(name)
    }

    pub fn seq(left: ActivityTerm, right: ActivityTerm) -> Self {
        ActivityTerm::Seq(Box::new(left), Box::new(right))
    }

    pub fn par(left: ActivityTerm, right: ActivityTerm) -> Self {
        ActivityTerm::Par(Box::new(left), Box::new(right))
    }

    /// Applies the unit axioms until no `Empty` remains under a composition:
    /// `0;t = t`, `t;0 = t`, `0|t = t`, `t|0 = t`. Idempotent.
    pub fn normalize(&self) -> ActivityTerm {
        match self {
            ActivityTerm::Empty | ActivityTerm::Act(_) => self.clone(),
            ActivityTerm::Seq(l, r) => match (l.normalize(), r.normalize()) {
                (ActivityTerm::Empty, r) => r,
                (l, ActivityTerm::Empty) => l,
                (l, r) => ActivityTerm::seq(l, r),
            },
            ActivityTerm::Par(l, r) => match (l.normalize(), r.normalize()) {
                (ActivityTerm::Empty, r) => r,
                (l, ActivityTerm::Empty) => l,
                (l, r) => ActivityTerm::par(l, r),
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ActivityTerm::Empty)
    }

    /// True when the term has no parallel composition anywhere.
    pub fn is_sequential(&self) -> bool {
        match self {
            ActivityTerm::Empty | ActivityTerm::Act(_) => true,
            ActivityTerm::Seq(l, r) => l.is_sequential() && r.is_sequential(),
            ActivityTerm::Par(_, _) => false,
        }
    }

    /// All activity names occurring in the term.
    pub fn names(&self) -> BTreeSet<ActivityName> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<ActivityName>) {
        match self {
            ActivityTerm::Empty => {}
            ActivityTerm::Act(n) => {
                out.insert(n.clone());
            }
            ActivityTerm::Seq(l, r) | ActivityTerm::Par(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
        }
    }

    /// Multiset of activity occurrences, in left-to-right order.
    pub fn occurrences(&self) -> Vec<ActivityName> {
        let mut out = Vec::new();
        self.collect_occurrences(&mut out);
        out
    }

    fn collect_occurrences(&self, out: &mut Vec<ActivityName>) {
        match self {
            ActivityTerm::Empty => {}
            ActivityTerm::Act(n) => out.push(n.clone()),
            ActivityTerm::Seq(l, r) | ActivityTerm::Par(l, r) => {
                l.collect_occurrences(out);
                r.collect_occurrences(out);
            }
        }
    }

    /// Flattens a sequential term into its ordered word of activity names.
    /// Returns None when the term contains a parallel composition.
    pub fn as_word(&self) -> Option<Vec<ActivityName>> {
        if !self.is_sequential() {
            return None;
        }
        Some(self.occurrences())
    }

    /// Re-enters a compensation term as a process: each activity name becomes
    /// an activity with the empty compensation.
    pub fn as_process(&self) -> Process {
        match self {
            ActivityTerm::Empty => Process::Zero,
            ActivityTerm::Act(n) => Process::activity(n.clone(), None),
            ActivityTerm::Seq(l, r) => Process::seq(l.as_process(), r.as_process()),
            ActivityTerm::Par(l, r) => Process::par(l.as_process(), r.as_process()),
        }
    }

    fn render(&self, f: &mut fmt::Formatter<'_>, parent: Option<TermOp>) -> fmt::Result {
        let op = match self {
            ActivityTerm::Empty => return f.write_str("0"),
            ActivityTerm::Act(n) => return write!(f, "{n}"),
            ActivityTerm::Seq(_, _) => TermOp::Seq,
            ActivityTerm::Par(_, _) => TermOp::Par,
        };
        let needs_parens = parent.is_some_and(|p| p != op);
        if needs_parens {
            f.write_str("(")?;
        }
        match self {
            ActivityTerm::Seq(l, r) => {
                l.render(f, Some(op))?;
                f.write_str("; ")?;
                r.render_right(f, op)?;
            }
            ActivityTerm::Par(l, r) => {
                l.render(f, Some(op))?;
                f.write_str(" | ")?;
                r.render_right(f, op)?;
            }
            _ => unreachable!(),
        }
        if needs_parens {
            f.write_str(")")?;
        }
        Ok(())
    }

    // Right child of a left-associative operator: parenthesize when it is the
    // same operator, so printing round-trips exactly.
    fn render_right(&self, f: &mut fmt::Formatter<'_>, parent: TermOp) -> fmt::Result {
        let same = matches!(
            (self, parent),
            (ActivityTerm::Seq(_, _), TermOp::Seq) | (ActivityTerm::Par(_, _), TermOp::Par)
        );
        if same {
            f.write_str("(")?;
            self.render(f, None)?;
            f.write_str(")")
        } else {
            self.render(f, Some(parent))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TermOp {
    Seq,
    Par,
}

impl fmt::Display for ActivityTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(f, None)
    }
}

impl Serialize for ActivityTerm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

// ──────────────────────────────────────────────
// Processes
// ──────────────────────────────────────────────

/// Saga process terms, including the runtime-only forms that arise during
/// small-step execution (running saga, protected block, killed block).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Process {
    Zero,
    /// `forward % compensation`; a bare activity carries no compensation.
    Activity {
        forward: ActivityName,
        compensation: Option<ActivityName>,
    },
    Seq(Box<Process>, Box<Process>),
    Par(Box<Process>, Box<Process>),
    /// `[body, stored]`; a source-level saga has an empty store.
    Saga {
        body: Box<Process>,
        stored: ActivityTerm,
    },
    /// `<body>`: a compensation started by the enclosing saga's own abort.
    Prot(Box<Process>),
    /// `{body}`: a compensation started by an external abort; re-raises the
    /// abort when the body commits.
    Killed(Box<Process>),
}

impl Process {
    pub fn activity(forward: ActivityName, compensation: Option<ActivityName>) -> Self {
        Process::Activity {
            forward,
            compensation,
        }
    }

    pub fn seq(left: Process, right: Process) -> Self {
        Process::Seq(Box::new(left), Box::new(right))
    }

    pub fn par(left: Process, right: Process) -> Self {
        Process::Par(Box::new(left), Box::new(right))
    }

    pub fn saga(body: Process) -> Self {
        Process::Saga {
            body: Box::new(body),
            stored: ActivityTerm::Empty,
        }
    }

    pub fn running_saga(body: Process, stored: ActivityTerm) -> Self {
        Process::Saga {
            body: Box::new(body),
            stored,
        }
    }

    pub fn prot(body: Process) -> Self {
        Process::Prot(Box::new(body))
    }

    pub fn killed(body: Process) -> Self {
        Process::Killed(Box::new(body))
    }

    /// True for parser-shaped terms: no protected or killed blocks, and every
    /// saga store empty.
    pub fn is_source_level(&self) -> bool {
        match self {
            Process::Zero | Process::Activity { .. } => true,
            Process::Seq(l, r) | Process::Par(l, r) => l.is_source_level() && r.is_source_level(),
            Process::Saga { body, stored } => stored.is_empty() && body.is_source_level(),
            Process::Prot(_) | Process::Killed(_) => false,
        }
    }

    /// Total number of activity nodes, counting stored compensations.
    pub fn size(&self) -> usize {
        match self {
            Process::Zero => 1,
            Process::Activity { .. } => 1,
            Process::Seq(l, r) | Process::Par(l, r) => 1 + l.size() + r.size(),
            Process::Saga { body, stored } => 1 + body.size() + stored.occurrences().len(),
            Process::Prot(body) | Process::Killed(body) => 1 + body.size(),
        }
    }

    /// Reads a process back as an activity term, when it has that shape:
    /// zero, activities with empty compensation, sequence, parallel.
    pub fn as_activity_term(&self) -> Option<ActivityTerm> {
        match self {
            Process::Zero => Some(ActivityTerm::Empty),
            Process::Activity {
                forward,
                compensation: None,
            } => Some(ActivityTerm::Act(forward.clone())),
            Process::Seq(l, r) => Some(ActivityTerm::seq(
                l.as_activity_term()?,
                r.as_activity_term()?,
            )),
            Process::Par(l, r) => Some(ActivityTerm::par(
                l.as_activity_term()?,
                r.as_activity_term()?,
            )),
            _ => None,
        }
    }

    /// Immediate and nested sub-processes, self included.
    pub fn subterms(&self) -> Vec<&Process> {
        let mut out = vec![self];
        match self {
            Process::Zero | Process::Activity { .. } => {}
            Process::Seq(l, r) | Process::Par(l, r) => {
                out.extend(l.subterms());
                out.extend(r.subterms());
            }
            Process::Saga { body, .. } | Process::Prot(body) | Process::Killed(body) => {
                out.extend(body.subterms());
            }
        }
        out
    }

    fn render(&self, f: &mut fmt::Formatter<'_>, parent: Option<TermOp>) -> fmt::Result {
        match self {
            Process::Zero => f.write_str("0"),
            Process::Activity {
                forward,
                compensation,
            } => match compensation {
                Some(c) => write!(f, "{forward} % {c}"),
                None => write!(f, "{forward}"),
            },
            Process::Saga { body, stored } => {
                if stored.is_empty() {
                    write!(f, "[")?;
                    body.render(f, None)?;
                    write!(f, "]")
                } else {
                    write!(f, "[")?;
                    body.render(f, None)?;
                    write!(f, ", {stored}]")
                }
            }
            Process::Prot(body) => {
                write!(f, "<")?;
                body.render(f, None)?;
                write!(f, ">")
            }
            Process::Killed(body) => {
                write!(f, "{{")?;
                body.render(f, None)?;
                write!(f, "}}")
            }
            Process::Seq(l, r) => {
                let needs = parent.is_some_and(|p| p != TermOp::Seq);
                if needs {
                    f.write_str("(")?;
                }
                l.render(f, Some(TermOp::Seq))?;
                f.write_str("; ")?;
                r.render_right(f, TermOp::Seq)?;
                if needs {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Process::Par(l, r) => {
                let needs = parent.is_some_and(|p| p != TermOp::Par);
                if needs {
                    f.write_str("(")?;
                }
                l.render(f, Some(TermOp::Par))?;
                f.write_str(" | ")?;
                r.render_right(f, TermOp::Par)?;
                if needs {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }

    fn render_right(&self, f: &mut fmt::Formatter<'_>, parent: TermOp) -> fmt::Result {
        let same = matches!(
            (self, parent),
            (Process::Seq(_, _), TermOp::Seq) | (Process::Par(_, _), TermOp::Par)
        );
        if same {
            f.write_str("(")?;
            self.render(f, None)?;
            f.write_str(")")
        } else {
            self.render(f, Some(parent))
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.render(f, None)
    }
}

impl Serialize for Process {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Renders a process in the concrete grammar. `parse_process(pretty(p)) == p`
/// for every source-level `p`; runtime forms print as `[P, beta]`, `<P>` and
/// `{P}` and are not re-parseable.
pub fn pretty(p: &Process) -> String {
    p.to_string()
}

/// All forward and compensation names occurring in `p`, including names
/// inside stored compensations of running sagas.
pub fn activities_of(p: &Process) -> BTreeSet<ActivityName> {
    let mut out = BTreeSet::new();
    collect_activities(p, &mut out);
    out
}

fn collect_activities(p: &Process, out: &mut BTreeSet<ActivityName>) {
    match p {
        Process::Zero => {}
        Process::Activity {
            forward,
            compensation,
        } => {
            out.insert(forward.clone());
            if let Some(c) = compensation {
                out.insert(c.clone());
            }
        }
        Process::Seq(l, r) | Process::Par(l, r) => {
            collect_activities(l, out);
            collect_activities(r, out);
        }
        Process::Saga { body, stored } => {
            collect_activities(body, out);
            out.extend(stored.names());
        }
        Process::Prot(body) | Process::Killed(body) => collect_activities(body, out),
    }
}
