//! Path-level fluctuation envelopes for the weak walk.
//!
//! An almost-sure "eventually inside the envelope" statement cannot be
//! falsified by a finite simulation, so the checker reports its finite
//! shadows: the summability precondition, per-n violation rates against exact
//! probabilities, and the fraction of paths leaving the envelope after `n₀`.

use serde::{Deserialize, Serialize};

use crate::closedforms::envelope_prob;
use crate::measures::Distribution;
use crate::verify::report::{Check, Comparison, VerificationReport};
use crate::walks::{simulate_map, WalkConfig, WalkPath};
use crate::williamson::nstep_cdf;
use crate::{Error, Result};

/// A positive sequence given in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Sequence {
    Constant { value: f64 },
    /// `coef · n^power · (ln n)^log_power`.
    PowerLog { coef: f64, power: f64, log_power: f64 },
}

impl Sequence {
    pub fn constant(value: f64) -> Self {
        Sequence::Constant { value }
    }

    pub fn power(coef: f64, power: f64) -> Self {
        Sequence::PowerLog { coef, power, log_power: 0.0 }
    }

    pub fn value(&self, n: usize) -> f64 {
        match *self {
            Sequence::Constant { value } => value,
            Sequence::PowerLog { coef, power, log_power } => {
                let n = n as f64;
                let log = if log_power == 0.0 { 1.0 } else { n.ln().powf(log_power) };
                coef * n.powf(power) * log
            }
        }
    }

    /// Positive iff `Σ 1/s_n` converges: `power - 1`, or `log_power - 1` when
    /// `power = 1`.
    pub fn reciprocal_summability_margin(&self) -> f64 {
        match *self {
            Sequence::Constant { .. } => -1.0,
            Sequence::PowerLog { power, log_power, .. } => {
                if power != 1.0 {
                    power - 1.0
                } else {
                    log_power - 1.0
                }
            }
        }
    }
}

/// Envelope `|X̃_n| ≤ (c_n b_n / d_n)^{1/a_n}` for `n ≥ n₀`, with `κ` the
/// characterizing exponent of the mixing law and `d_n = E|Y|^{a_n}`.
///
/// `a_n` and `b_n` are inputs: no defaults are derived for them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSpec {
    pub a: Sequence,
    pub b: Sequence,
    pub c: Sequence,
    pub d: Sequence,
    pub kappa: f64,
    pub n0: usize,
}

impl EnvelopeSpec {
    pub fn threshold(&self, n: usize) -> f64 {
        (self.c.value(n) * self.b.value(n) / self.d.value(n)).powf(1.0 / self.a.value(n))
    }

    /// Precondition checks over `n₀..=horizon`.
    pub fn validate(&self, horizon: usize) -> Result<Vec<Check>> {
        if !(self.kappa > 0.0 && self.kappa <= 2.0) {
            return Err(Error::param("kappa", self.kappa, "must lie in (0, 2]"));
        }
        let ns = self.n0.max(1)..=horizon;
        let mut max_drop: f64 = 0.0;
        let mut max_over: f64 = f64::NEG_INFINITY;
        let mut min_c = f64::INFINITY;
        let mut partial = 0.0;
        let mut prev: Option<f64> = None;
        for n in ns {
            let a = self.a.value(n);
            if let Some(p) = prev {
                max_drop = max_drop.max(p - a);
            }
            prev = Some(a);
            max_over = max_over.max(a - self.kappa);
            let c = self.c.value(n);
            min_c = min_c.min(c);
            partial += 1.0 / c;
        }
        Ok(vec![
            Check::at_most("a_nondecreasing", max_drop, 0.0)
                .with_note("largest decrease a_n - a_{n+1} on the horizon"),
            Check::at_most("a_bounded_by_kappa", max_over, 0.0)
                .with_note("largest a_n - kappa on the horizon"),
            Check::new("c_positive", min_c, 0.0, Comparison::AtLeast)
                .with_note("smallest c_n on the horizon"),
            Check::new(
                "reciprocal_c_summable",
                self.c.reciprocal_summability_margin(),
                f64::MIN_POSITIVE,
                Comparison::AtLeast,
            )
            .with_note("power - 1, or log power - 1 at power 1; positive iff the series converges"),
            Check::info("reciprocal_c_partial_sum", partial)
                .with_note("sum of 1/c_n from n0 to the horizon"),
        ])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Envelope {
    Sequences(EnvelopeSpec),
    /// `|X̃_n|^α ≤ n^{r+1} / ln n` for `n ≥ n₀`.
    LogPower { r: f64, n0: usize },
    /// Never violated.
    Unbounded { n0: usize },
}

impl Envelope {
    pub fn n0(&self) -> usize {
        match self {
            Envelope::Sequences(s) => s.n0,
            Envelope::LogPower { n0, .. } | Envelope::Unbounded { n0 } => *n0,
        }
    }

    /// Largest admissible `|X̃_n|`.
    pub fn threshold(&self, n: usize, alpha: f64) -> f64 {
        match self {
            Envelope::Sequences(s) => s.threshold(n),
            Envelope::LogPower { r, .. } => log_power_bound(n, *r).powf(1.0 / alpha),
            Envelope::Unbounded { .. } => f64::INFINITY,
        }
    }

    pub fn violated(&self, n: usize, x: f64, alpha: f64) -> bool {
        match self {
            Envelope::LogPower { r, .. } => x.abs().powf(alpha) > log_power_bound(n, *r),
            _ => x.abs() > self.threshold(n, alpha),
        }
    }
}

fn log_power_bound(n: usize, r: f64) -> f64 {
    let nf = n as f64;
    nf.powf(r + 1.0) / nf.ln()
}

/// Per-path outcome of an envelope scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathScan {
    /// Largest `n ≥ n₀` with a violation.
    pub last_violation: Option<usize>,
    /// Violation indicator at each requested checkpoint.
    pub hits: Vec<bool>,
}

pub fn scan_path(states: &[f64], envelope: &Envelope, alpha: f64, checkpoints: &[usize]) -> PathScan {
    let n0 = envelope.n0();
    let last_violation = (n0..states.len())
        .rev()
        .find(|&n| envelope.violated(n, states[n], alpha));
    let hits = checkpoints
        .iter()
        .map(|&n| n < states.len() && envelope.violated(n, states[n], alpha))
        .collect();
    PathScan { last_violation, hits }
}

#[derive(Debug, Clone)]
pub struct EnvelopeOutcome {
    pub report: VerificationReport,
    pub last_violation: Vec<Option<usize>>,
}

/// Exact `P(|X̃_n| violates the envelope)` when it is available.
fn violation_probability(
    envelope: &Envelope,
    modulus_step: &Distribution,
    alpha: f64,
    n: usize,
) -> Result<Option<f64>> {
    let unit = modulus_step.cdf(1.0) == 1.0 && modulus_step.cdf_left(1.0) == 0.0;
    match envelope {
        Envelope::Unbounded { .. } => Ok(Some(0.0)),
        Envelope::LogPower { r, .. } if unit && n >= 2 && *r > 0.5 => {
            envelope_prob(n as u64, *r).map(Some)
        }
        _ => {
            let t = envelope.threshold(n, alpha);
            if t.is_nan() || n > u32::MAX as usize {
                return Ok(None);
            }
            if t == f64::INFINITY {
                return Ok(Some(0.0));
            }
            let f = nstep_cdf(modulus_step, alpha, n as u32, t.max(0.0))?;
            Ok(Some((1.0 - f).max(0.0)))
        }
    }
}

fn binomial_sigma(p: f64, m: usize) -> f64 {
    (p * (1.0 - p) / m as f64).max(0.0).sqrt()
}

/// Envelope check over stored paths.
pub fn envelope_check_paths(
    paths: &[WalkPath],
    alpha: f64,
    unit_step: &Distribution,
    envelope: &Envelope,
    checkpoints: &[usize],
) -> Result<EnvelopeOutcome> {
    let horizon = paths.iter().map(WalkPath::horizon).min().unwrap_or(0);
    let scans: Vec<PathScan> = paths
        .iter()
        .map(|p| scan_path(&p.states, envelope, alpha, checkpoints))
        .collect();
    summarize(scans, horizon, alpha, unit_step, envelope, checkpoints, None)
}

/// Envelope check over the paths of `config`, streamed so that large
/// horizons never hold all paths in memory.
pub fn envelope_check(
    config: &WalkConfig,
    envelope: &Envelope,
    checkpoints: &[usize],
) -> Result<EnvelopeOutcome> {
    precheck(config.horizon, envelope, checkpoints)?;
    let scans = simulate_map(config, |p| scan_path(&p.states, envelope, config.alpha, checkpoints))?;
    summarize(
        scans,
        config.horizon,
        config.alpha,
        &config.unit_step,
        envelope,
        checkpoints,
        Some(config.seed),
    )
}

fn precheck(horizon: usize, envelope: &Envelope, checkpoints: &[usize]) -> Result<()> {
    let n0 = envelope.n0();
    if horizon < n0 {
        return Err(Error::domain(format!("horizon {horizon} is below n0 = {n0}")));
    }
    if let Some(&bad) = checkpoints.iter().find(|&&n| n < n0 || n > horizon) {
        return Err(Error::domain(format!(
            "checkpoint {bad} outside [{n0}, {horizon}]"
        )));
    }
    if let Envelope::LogPower { r, .. } = envelope {
        if !(*r > 0.5) {
            return Err(Error::param("r", *r, "must exceed 1/2"));
        }
    }
    Ok(())
}

fn summarize(
    scans: Vec<PathScan>,
    horizon: usize,
    alpha: f64,
    unit_step: &Distribution,
    envelope: &Envelope,
    checkpoints: &[usize],
    seed: Option<u64>,
) -> Result<EnvelopeOutcome> {
    precheck(horizon, envelope, checkpoints)?;
    if scans.is_empty() {
        return Err(Error::domain("envelope check without paths"));
    }
    let m = scans.len();
    let modulus = unit_step.abs();
    let mut report = VerificationReport::new("envelope");
    if let Some(s) = seed {
        report.seed(s);
    }
    report.sample_size(m as u64);
    if let Envelope::Sequences(spec) = envelope {
        for c in spec.validate(horizon)? {
            report.push(c);
        }
    }

    let n0 = envelope.n0();
    let violating = scans.iter().filter(|s| s.last_violation.is_some()).count();
    let fraction = violating as f64 / m as f64;
    let latest = scans.iter().filter_map(|s| s.last_violation).max().unwrap_or(0);
    report.push(
        Check::info("latest_violation_index", latest as f64)
            .with_note("largest last-violation index over paths; 0 when none"),
    );

    // union bound over n0..=horizon
    let mut bound = Some(0.0);
    for n in n0.max(1)..=horizon {
        match (bound, violation_probability(envelope, &modulus, alpha, n)?) {
            (Some(b), Some(p)) => bound = Some(b + p),
            _ => {
                bound = None;
                break;
            }
        }
    }
    match bound {
        Some(b) => {
            let bc = b.min(1.0);
            let mut c = Check::at_most(
                format!("paths_violating_after_n0(n0={n0})"),
                fraction,
                bc + 3.0 * binomial_sigma(bc, m),
            );
            c.expected = Some(b);
            report.push(c.with_note("union bound plus 3 binomial sigma"));
        }
        None => {
            report.push(Check::info(format!("paths_violating_after_n0(n0={n0})"), fraction));
        }
    }

    for (j, &n) in checkpoints.iter().enumerate() {
        let hits = scans.iter().filter(|s| s.hits[j]).count();
        let rate = hits as f64 / m as f64;
        let name = format!("violation_rate(n={n})");
        match violation_probability(envelope, &modulus, alpha, n)? {
            Some(p) => {
                let tol = 3.0 * binomial_sigma(p, m);
                report.push(Check::close(name, rate, p, tol).with_note("3 binomial sigma"));
            }
            None => {
                report.push(Check::info(name, rate));
            }
        }
    }
    let last_violation = scans.into_iter().map(|s| s.last_violation).collect();
    Ok(EnvelopeOutcome { report, last_violation })
}
