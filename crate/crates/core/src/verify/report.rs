//! Self-contained verification reports.

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Diagnostic only; never gates the suite.
    Info,
}

/// How `statistic` is compared with `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass iff `statistic <= threshold`.
    AtMost,
    /// Pass iff `statistic >= threshold`.
    AtLeast,
    /// Reported without a gate.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn judge(statistic: f64, threshold: f64, comparison: Comparison) -> Verdict {
    let ok = match comparison {
        Comparison::AtMost => statistic <= threshold,
        Comparison::AtLeast => statistic >= threshold,
        Comparison::None => return Verdict::Info,
    };
    // NaN statistics fail both comparisons
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

impl Check {
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self::new(name, statistic, threshold, Comparison::AtMost)
    }

    pub fn at_least(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self::new(name, statistic, threshold, Comparison::AtLeast)
    }

    /// `|observed - expected| <= tolerance`.
    pub fn close(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        let mut c = Self::at_most(name, (observed - expected).abs(), tolerance);
        c.observed = Some(observed);
        c.expected = Some(expected);
        c
    }

    pub fn info(name: impl Into<String>, statistic: f64) -> Self {
        Self::new(name, statistic, f64::NAN, Comparison::None)
    }

    pub fn new(name: impl Into<String>, statistic: f64, threshold: f64, comparison: Comparison) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            comparison,
            verdict: judge(statistic, threshold, comparison),
            observed: None,
            expected: None,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Recomputes the verdict from the recorded numbers.
    pub fn rederive(&self) -> Verdict {
        judge(self.statistic, self.threshold, self.comparison)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub seeds: Vec<u64>,
    pub sample_sizes: Vec<u64>,
    pub checks: Vec<Check>,
    /// Omitted unless requested so that reports stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            suite: suite.into(),
            seeds: Vec::new(),
            sample_sizes: Vec::new(),
            checks: Vec::new(),
            wall_clock_seconds: None,
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        if !self.seeds.contains(&seed) {
            self.seeds.push(seed);
        }
        self
    }

    pub fn sample_size(&mut self, n: u64) -> &mut Self {
        if !self.sample_sizes.contains(&n) {
            self.sample_sizes.push(n);
        }
        self
    }

    pub fn push(&mut self, check: Check) -> &mut Self {
        log::debug!("{}: {} -> {:?}", self.suite, check.name, check.verdict);
        self.checks.push(check);
        self
    }

    /// Appends another report's checks, prefixing their names with its suite.
    pub fn absorb(&mut self, other: VerificationReport) {
        for s in other.seeds {
            self.seed(s);
        }
        for n in other.sample_sizes {
            self.sample_size(n);
        }
        for mut c in other.checks {
            c.name = format!("{}/{}", other.suite, c.name);
            self.checks.push(c);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
