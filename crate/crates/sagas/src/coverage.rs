use std::collections::BTreeMap;

use serde::Serialize;

/// Counters of rule applications, keyed by rule name. Used by the
/// conformance reports to show that a term family exercised every rule of
/// both transition tables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct RuleCoverage {
    counts: BTreeMap<&'static str, u64>,
}

impl RuleCoverage {
    pub fn new() -> Self {
        RuleCoverage::default()
    }

    pub fn record(&mut self, rule: &'static str) {
        *self.counts.entry(rule).or_insert(0) += 1;
    }

    pub fn count(&self, rule: &str) -> u64 {
        self.counts.get(rule).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &RuleCoverage) {
        for (rule, n) in &other.counts {
            *self.counts.entry(rule).or_insert(0) += n;
        }
    }

    /// Rules from `expected` that never fired.
    pub fn missing<'a>(&self, expected: &[&'a str]) -> Vec<&'a str> {
        expected
            .iter()
            .copied()
            .filter(|r| self.count(r) == 0)
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, u64)> + '_ {
        self.counts.iter().map(|(k, v)| (*k, *v))
    }
}
