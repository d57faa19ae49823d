//! Linearizations of observation labels: the interleaving operator, full
//! set materialization with a budget, and a membership test that never
//! materializes the set.
//!
//! A word is a flat ordered list of activity names. The linearizations of a
//! label are all words consistent with its sequential and parallel
//! structure; for a parallel composition of n distinct activities that is
//! all n! orders, so materialization is a debugging aid and the membership
//! test is what the conformance checks use.

use std::collections::{BTreeSet, HashSet};

use crate::error::Error;
use crate::syntax::{ActivityName, ActivityTerm};

/// A flat ordered observation word.
pub type Word = Vec<ActivityName>;

/// Renders a word as `a; b; c`, or `0` when empty.
pub fn word_to_string(word: &[ActivityName]) -> String {
    if word.is_empty() {
        "0".to_string()
    } else {
        word.iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// All interleavings of two words: both argument orders are preserved, and
/// every way of merging them appears once.
pub fn interleavings(left: &[ActivityName], right: &[ActivityName]) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    match (left.split_first(), right.split_first()) {
        (None, _) => {
            out.insert(right.to_vec());
        }
        (_, None) => {
            out.insert(left.to_vec());
        }
        (Some((l0, ltail)), Some((r0, rtail))) => {
            for mut w in interleavings(ltail, right) {
                w.insert(0, l0.clone());
                out.insert(w);
            }
            for mut w in interleavings(left, rtail) {
                w.insert(0, r0.clone());
                out.insert(w);
            }
        }
    }
    out
}

/// Default budget for materialized linearization sets.
pub const DEFAULT_LINEARIZATION_CAP: usize = 100_000;

/// The complete set of linearizations of a term, under the default budget.
pub fn linearizations(t: &ActivityTerm) -> Result<BTreeSet<Word>, Error> {
    linearizations_with_cap(t, DEFAULT_LINEARIZATION_CAP)
}

/// The complete set of linearizations, failing once the set would exceed
/// `cap` words. The empty term linearizes to the singleton empty word.
pub fn linearizations_with_cap(t: &ActivityTerm, cap: usize) -> Result<BTreeSet<Word>, Error> {
    let t = t.normalize();
    let out = lin(&t, cap)?;
    Ok(out)
}

fn lin(t: &ActivityTerm, cap: usize) -> Result<BTreeSet<Word>, Error> {
    let exceeded = || Error::LinearizationCap { cap };
    let out: BTreeSet<Word> = match t {
        ActivityTerm::Empty => [Vec::new()].into_iter().collect(),
        ActivityTerm::Act(n) => [vec![n.clone()]].into_iter().collect(),
        ActivityTerm::Seq(l, r) => {
            let ls = lin(l, cap)?;
            let rs = lin(r, cap)?;
            let mut out = BTreeSet::new();
            for a in &ls {
                for b in &rs {
                    let mut w = a.clone();
                    w.extend(b.iter().cloned());
                    out.insert(w);
                    if out.len() > cap {
                        return Err(exceeded());
                    }
                }
            }
            out
        }
        ActivityTerm::Par(l, r) => {
            let ls = lin(l, cap)?;
            let rs = lin(r, cap)?;
            let mut out = BTreeSet::new();
            for a in &ls {
                for b in &rs {
                    for w in interleavings(a, b) {
                        out.insert(w);
                        if out.len() > cap {
                            return Err(exceeded());
                        }
                    }
                }
            }
            out
        }
    };
    Ok(out)
}

/// Decides `word in linearizations(t)` by consuming the word against the
/// enabled frontier of the term, without materializing any set.
///
/// Terms with at most 32 occurrences run on a bitmask frontier: each leaf
/// carries the mask of leaves that must be consumed first (the left sides of
/// its sequence ancestors), and failed frontiers are memoized. Longer terms
/// fall back to matching against residual terms.
pub fn is_linearization(word: &[ActivityName], t: &ActivityTerm) -> bool {
    let t = t.normalize();
    let mut leaves: Vec<(&ActivityName, u32)> = Vec::new();
    if word.len() <= 32 && index_leaves(&t, 0, &mut leaves) {
        if leaves.len() != word.len() {
            return false;
        }
        let full: u32 = if word.len() == 32 {
            u32::MAX
        } else {
            (1u32 << word.len()) - 1
        };
        let mut failed: HashSet<u32> = HashSet::new();
        return matches_masked(word, &leaves, 0, full, &mut failed);
    }
    if word.len() != t.occurrences().len() {
        return false;
    }
    let mut failed: HashSet<(usize, ActivityTerm)> = HashSet::new();
    matches_residual(word, 0, &t, &mut failed)
}

// In-order leaf listing with prerequisite masks; false when the term has
// more than 32 occurrences.
fn index_leaves<'t>(
    t: &'t ActivityTerm,
    prereq: u32,
    leaves: &mut Vec<(&'t ActivityName, u32)>,
) -> bool {
    match t {
        ActivityTerm::Empty => true,
        ActivityTerm::Act(n) => {
            if leaves.len() >= 32 {
                return false;
            }
            leaves.push((n, prereq));
            true
        }
        ActivityTerm::Seq(l, r) => {
            let first = leaves.len();
            if !index_leaves(l, prereq, leaves) {
                return false;
            }
            let left_mask = mask_range(first, leaves.len());
            index_leaves(r, prereq | left_mask, leaves)
        }
        ActivityTerm::Par(l, r) => {
            index_leaves(l, prereq, leaves) && index_leaves(r, prereq, leaves)
        }
    }
}

fn mask_range(from: usize, to: usize) -> u32 {
    let mut mask = 0u32;
    for i in from..to {
        mask |= 1 << i;
    }
    mask
}

fn matches_masked(
    word: &[ActivityName],
    leaves: &[(&ActivityName, u32)],
    consumed: u32,
    full: u32,
    failed: &mut HashSet<u32>,
) -> bool {
    if consumed == full {
        return true;
    }
    if failed.contains(&consumed) {
        return false;
    }
    let at = consumed.count_ones() as usize;
    let wanted = &word[at];
    for (i, (name, prereq)) in leaves.iter().enumerate() {
        let bit = 1u32 << i;
        if consumed & bit == 0
            && *name == wanted
            && prereq & !consumed == 0
            && matches_masked(word, leaves, consumed | bit, full, failed)
        {
            return true;
        }
    }
    failed.insert(consumed);
    false
}

fn matches_residual(
    word: &[ActivityName],
    at: usize,
    t: &ActivityTerm,
    failed: &mut HashSet<(usize, ActivityTerm)>,
) -> bool {
    if at == word.len() {
        return t.is_empty();
    }
    if failed.contains(&(at, t.clone())) {
        return false;
    }
    for residual in derivatives(t, &word[at]) {
        if matches_residual(word, at + 1, &residual, failed) {
            return true;
        }
    }
    failed.insert((at, t.clone()));
    false
}

// Normalized residual terms after consuming one enabled occurrence of `name`.
// Several residuals arise when the name occurs on multiple frontiers.
pub(crate) fn derivatives(t: &ActivityTerm, name: &ActivityName) -> Vec<ActivityTerm> {
    match t {
        ActivityTerm::Empty => Vec::new(),
        ActivityTerm::Act(n) => {
            if n == name {
                vec![ActivityTerm::Empty]
            } else {
                Vec::new()
            }
        }
        // normalized sequences have a non-empty head, so the first activity
        // always comes from the left component
        ActivityTerm::Seq(l, r) => derivatives(l, name)
            .into_iter()
            .map(|l2| ActivityTerm::seq(l2, (**r).clone()).normalize())
            .collect(),
        ActivityTerm::Par(l, r) => {
            let mut out: Vec<ActivityTerm> = derivatives(l, name)
                .into_iter()
                .map(|l2| ActivityTerm::par(l2, (**r).clone()).normalize())
                .collect();
            out.extend(
                derivatives(r, name)
                    .into_iter()
                    .map(|r2| ActivityTerm::par((**l).clone(), r2).normalize()),
            );
            out
        }
    }
}
