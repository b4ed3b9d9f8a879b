//! Named verification suites driven by a JSON configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::closedforms::{nstep_delta1_cdf, nstep_uniform_cdf};
use crate::convolution::{convolve_atomic, convolve_sample, kernel, ConvolutionKind};
use crate::exec::{map_indexed, Execution};
use crate::measures::Distribution;
use crate::rng::{RngStream, AUXILIARY_STREAM_BASE};
use crate::verify::chf::{associated_chf, empirical_chf};
use crate::verify::envelope::{envelope_check, Envelope, EnvelopeSpec, Sequence};
use crate::verify::ks::{ks_statistic, ks_threshold, ks_two_sample_tol, WithAtoms, KS_CRITICAL_1PCT};
use crate::verify::moments::moment_check;
use crate::verify::report::{Check, VerificationReport};
use crate::walks::{simulate_associated_sums, simulate_map, WalkConfig, WalkKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Ks,
    Moments,
    Chf,
    Envelope,
    Axioms,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Ks, Suite::Moments, Suite::Chf, Suite::Envelope, Suite::Axioms];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Ks => "ks",
            Suite::Moments => "moments",
            Suite::Chf => "chf",
            Suite::Envelope => "envelope",
            Suite::Axioms => "axioms",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::domain(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeSuiteConfig {
    pub r: f64,
    pub n0: usize,
    pub horizon: usize,
    pub paths: usize,
    pub checkpoints: Vec<usize>,
    /// Optional user envelope; `a_n` and `b_n` have no defaults.
    pub spec: Option<EnvelopeSpec>,
}

impl Default for EnvelopeSuiteConfig {
    fn default() -> Self {
        Self {
            r: 1.0,
            n0: 50,
            horizon: 10_000,
            paths: 10_000,
            checkpoints: vec![50, 100, 200],
            spec: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AxiomSuiteConfig {
    pub samples: usize,
    pub instances: usize,
}

impl Default for AxiomSuiteConfig {
    fn default() -> Self {
        Self { samples: 100_000, instances: 5 }
    }
}

/// Every field has a default, so `{}` is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub paths: usize,
    pub alphas: Vec<f64>,
    pub horizon: usize,
    pub chf_grid: Vec<f64>,
    pub moment_ns: Vec<u32>,
    pub envelope: EnvelopeSuiteConfig,
    pub axioms: AxiomSuiteConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            paths: 100_000,
            alphas: vec![0.5, 1.0, 1.5],
            horizon: 5,
            chf_grid: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            moment_ns: (1..=10).collect(),
            envelope: EnvelopeSuiteConfig::default(),
            axioms: AxiomSuiteConfig::default(),
        }
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            offset: 0,
            message: format!("suite configuration: {e}"),
        })
    }

    fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(Error::param("paths", 0.0, "must be at least 1"));
        }
        if self.horizon < 2 {
            return Err(Error::param("horizon", self.horizon as f64, "must be at least 2"));
        }
        if let Some(&a) = self.alphas.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::param("alpha", a, "must be positive"));
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, config: &SuiteConfig, exec: Execution) -> Result<VerificationReport> {
    config.validate()?;
    match suite {
        Suite::Ks => ks_suite(config, exec),
        Suite::Moments => moments_suite(config, exec),
        Suite::Chf => chf_suite(config, exec),
        Suite::Envelope => envelope_suite(config, exec),
        Suite::Axioms => axioms_suite(config, exec),
        Suite::All => {
            let mut all = VerificationReport::new("all");
            for s in Suite::EACH {
                all.absorb(run_suite(s, config, exec)?);
            }
            Ok(all)
        }
    }
}

fn walk(
    kind: WalkKind,
    alpha: f64,
    step: Distribution,
    horizon: usize,
    paths: usize,
    seed: u64,
    exec: Execution,
) -> Result<WalkConfig> {
    Ok(WalkConfig::new(kind, alpha, step, horizon, paths, seed)?.with_execution(exec))
}

fn ks_suite(config: &SuiteConfig, exec: Execution) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("ks");
    report.seed(config.seed).sample_size(config.paths as u64);
    let h = config.horizon;
    let threshold = ks_threshold(KS_CRITICAL_1PCT, config.paths);
    let unit = Distribution::dirac(1.0)?;
    let sym_unit = Distribution::sym_dirac(1.0)?;
    for &alpha in &config.alphas {
        let ns = [2, h];
        let cases: [(&str, WalkKind, &Distribution); 3] = [
            ("kendall_delta1", WalkKind::Kendall, &unit),
            ("weak_kendall_abs_delta1", WalkKind::WeakKendall, &sym_unit),
            ("kendall_uniform", WalkKind::Kendall, &Distribution::uniform01()),
        ];
        for (label, kind, step) in cases {
            if kind == WalkKind::WeakKendall && alpha > 1.0 {
                continue;
            }
            let cfg = walk(kind, alpha, step.clone(), h, config.paths, config.seed, exec)?;
            let states = simulate_map(&cfg, |p| ns.map(|n| p.states[n].abs()))?;
            for (j, &n) in ns.iter().enumerate() {
                let xs: Vec<f64> = states.iter().map(|s| s[j]).collect();
                let n32 = n as u32;
                let d = if label == "kendall_uniform" {
                    let cdf = |x: f64| nstep_uniform_cdf(n32, alpha, x).unwrap_or(f64::NAN);
                    ks_statistic(exec, &xs, &cdf)?
                } else {
                    let cdf = |x: f64| nstep_delta1_cdf(n32, alpha, x).unwrap_or(f64::NAN);
                    ks_statistic(exec, &xs, &WithAtoms { cdf, atoms: Vec::new() })?
                };
                report.push(Check::at_most(format!("{label}(alpha={alpha}, n={n})"), d, threshold));
            }
        }
    }
    Ok(report)
}

fn moments_suite(config: &SuiteConfig, exec: Execution) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("moments");
    let max_n = config.moment_ns.iter().copied().max().unwrap_or(1) as usize;
    for &alpha in &config.alphas {
        // Monte Carlo diagnostics only for α = 1, the case the quadrature targets
        let mc = if alpha == 1.0 {
            Some(walk(
                WalkKind::WeakKendall,
                alpha,
                Distribution::sym_dirac(1.0)?,
                max_n.max(1),
                config.paths,
                config.seed,
                exec,
            )?)
        } else {
            None
        };
        let r = moment_check(alpha, &config.moment_ns, mc.as_ref())?;
        for s in &r.seeds {
            report.seed(*s);
        }
        for n in &r.sample_sizes {
            report.sample_size(*n);
        }
        report.checks.extend(r.checks);
    }
    Ok(report)
}

fn chf_suite(config: &SuiteConfig, exec: Execution) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("chf");
    report.seed(config.seed).sample_size(config.paths as u64);
    // 3/√M is at least three standard errors of a cosine mean
    let threshold = 3.0 / (config.paths as f64).sqrt();
    for &alpha in config.alphas.iter().filter(|&&a| a <= 1.0) {
        let cfg = walk(
            WalkKind::WeakKendall,
            alpha,
            Distribution::sym_dirac(1.0)?,
            config.horizon,
            config.paths,
            config.seed,
            exec,
        )?;
        for n in [1, 2, config.horizon] {
            let sums = simulate_associated_sums(&cfg, n)?;
            for e in empirical_chf(exec, &sums, &config.chf_grid)? {
                let target = associated_chf(alpha, n as u32, e.t);
                report.push(Check::close(
                    format!("associated_sum_chf(alpha={alpha}, n={n}, t={})", e.t),
                    e.value,
                    target,
                    threshold,
                ));
            }
        }
    }
    Ok(report)
}

fn envelope_suite(config: &SuiteConfig, exec: Execution) -> Result<VerificationReport> {
    let e = &config.envelope;
    let cfg = walk(
        WalkKind::WeakKendall,
        1.0,
        Distribution::sym_dirac(1.0)?,
        e.horizon,
        e.paths,
        config.seed,
        exec,
    )?;
    let mut report = VerificationReport::new("envelope");
    let log_power = envelope_check(&cfg, &Envelope::LogPower { r: e.r, n0: e.n0 }, &e.checkpoints)?;
    report.absorb(rename(log_power.report, "log_power"));
    // c_n = n² with every other sequence 1: the summable reference case
    let one = Sequence::constant(1.0);
    let square = EnvelopeSpec {
        a: one,
        b: one,
        c: Sequence::power(1.0, 2.0),
        d: one,
        kappa: 1.0,
        n0: 1,
    };
    let square_check = envelope_check(&cfg, &Envelope::Sequences(square), &e.checkpoints)?;
    report.absorb(rename(square_check.report, "square"));
    if let Some(spec) = &e.spec {
        let user = envelope_check(&cfg, &Envelope::Sequences(spec.clone()), &[])?;
        report.absorb(rename(user.report, "user"));
    }
    Ok(report)
}

fn rename(mut r: VerificationReport, suite: &str) -> VerificationReport {
    r.suite = suite.to_string();
    r
}

/// Stream for the `i`-th auxiliary draw of a tagged experiment.
fn aux(seed: u64, tag: u64, i: usize) -> RngStream {
    RngStream::new(seed, AUXILIARY_STREAM_BASE + (tag << 32) + i as u64)
}

fn draw(exec: Execution, n: usize, seed: u64, tag: u64, f: impl Fn(&mut RngStream) -> Result<f64> + Sync + Send) -> Result<Vec<f64>> {
    map_indexed(exec, n, |i| f(&mut aux(seed, tag, i))).into_iter().collect()
}

fn axioms_suite(config: &SuiteConfig, exec: Execution) -> Result<VerificationReport> {
    let ax = &config.axioms;
    let mut report = VerificationReport::new("axioms");
    report.seed(config.seed).sample_size(ax.samples as u64);
    if ax.samples == 0 {
        return Err(Error::param("samples", 0.0, "must be at least 1"));
    }
    let threshold = 3.0 * ks_threshold(KS_CRITICAL_1PCT, ax.samples);
    let kinds = [
        ("kendall", ConvolutionKind::kendall(config.alphas.first().copied().unwrap_or(1.0))?),
        ("weak_kendall", ConvolutionKind::weak_kendall(1.0)?),
        ("max", ConvolutionKind::Max),
        ("alpha_conv", ConvolutionKind::alpha_conv(1.5)?),
        ("symmetric", ConvolutionKind::Symmetric),
    ];
    const TOL: f64 = 1e-12;
    let n = ax.samples;
    let seed = config.seed;
    let mut tag = 0u64;
    for (ki, (label, kind)) in kinds.iter().enumerate() {
        for inst in 0..ax.instances {
            let mut pick = aux(seed, 1 << 20, ki * 1000 + inst);
            let mut point = || {
                let v = 0.2 + 2.8 * pick.uniform();
                if kind.is_real_line() {
                    v * pick.sign()
                } else {
                    v
                }
            };
            let (a, b, c) = (point(), point(), point());
            let p = 0.2 + 0.6 * pick.uniform();
            let scale = 0.5 + 1.5 * pick.uniform();
            let name = |axiom: &str| format!("{axiom}({label}, instance={inst})");
            let kind = *kind;

            let ab = kernel(kind, a, b)?;
            let ba = kernel(kind, b, a)?;
            report.push(Check::at_most(name("commutativity"), f64::from(u8::from(ab != ba)), 0.0));

            tag += 1;
            let left = draw(exec, n, seed, tag, |r| {
                let x = kernel(kind, a, b)?.sample(r);
                Ok(kernel(kind, x, c)?.sample(r))
            })?;
            tag += 1;
            let right = draw(exec, n, seed, tag, |r| {
                let y = kernel(kind, b, c)?.sample(r);
                Ok(kernel(kind, a, y)?.sample(r))
            })?;
            let d = ks_two_sample_tol(exec, &left, &right, TOL)?;
            report.push(Check::at_most(name("associativity"), d, threshold));

            let mix = Distribution::mixture(vec![(p, Distribution::dirac(a)?), (1.0 - p, Distribution::dirac(b)?)])?;
            let lam = Distribution::dirac(c)?;
            let exact_left = convolve_atomic(kind, &mix, &lam)?;
            let exact_right = Distribution::mixture(vec![
                (p, convolve_atomic(kind, &Distribution::dirac(a)?, &lam)?),
                (1.0 - p, convolve_atomic(kind, &Distribution::dirac(b)?, &lam)?),
            ])?;
            tag += 1;
            let left = draw(exec, n, seed, tag, |r| Ok(exact_left.sample(r)))?;
            tag += 1;
            let right = draw(exec, n, seed, tag, |r| Ok(exact_right.sample(r)))?;
            let d = ks_two_sample_tol(exec, &left, &right, TOL)?;
            report.push(Check::at_most(name("convex_linearity"), d, threshold));
            tag += 1;
            let direct = draw(exec, n, seed, tag, |r| convolve_sample(kind, &mix, &lam, r))?;
            let d = ks_two_sample_tol(exec, &direct, &right, TOL)?;
            report.push(Check::at_most(name("convex_linearity_sampled"), d, threshold));

            tag += 1;
            let scaled = draw(exec, n, seed, tag, |r| Ok(scale * kernel(kind, a, b)?.sample(r)))?;
            tag += 1;
            let direct = draw(exec, n, seed, tag, |r| Ok(kernel(kind, scale * a, scale * b)?.sample(r)))?;
            let d = ks_two_sample_tol(exec, &scaled, &direct, TOL)?;
            report.push(Check::at_most(name("homogeneity"), d, threshold));
        }
    }
    Ok(report)
}
