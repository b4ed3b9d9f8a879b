//! Path simulation for the Kendall walk, its weak real-line variant, the
//! associated classical walk and subsampled walks.
//!
//! Path `m` draws from stream `m` of the configured seed, in the fixed
//! order step, switch uniform, `θ` (only when the switch fires), sign
//! (weak walk only). Paths are therefore identical whatever the
//! execution policy.

use serde::{Deserialize, Serialize};

use crate::convolution::ConvolutionKind;
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::measures::{sample_mu_alpha, sample_pareto, Distribution};
use crate::rng::RngStream;

/// Associated-walk paths draw from `ASSOCIATED_STREAM_BASE + m`.
pub const ASSOCIATED_STREAM_BASE: u64 = 1 << 61;

/// Default cap on the memory held by [`simulate`].
pub const DEFAULT_MEMORY_LIMIT: usize = 4 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WalkKind {
    Kendall,
    WeakKendall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig {
    pub kind: WalkKind,
    pub alpha: f64,
    pub unit_step: Distribution,
    pub horizon: usize,
    pub paths: usize,
    pub seed: u64,
    pub execution: Execution,
    pub memory_limit: usize,
}

impl WalkConfig {
    pub fn new(
        kind: WalkKind,
        alpha: f64,
        unit_step: Distribution,
        horizon: usize,
        paths: usize,
        seed: u64,
    ) -> Result<Self> {
        let config = Self {
            kind,
            alpha,
            unit_step,
            horizon,
            paths,
            seed,
            execution: Execution::default(),
            memory_limit: DEFAULT_MEMORY_LIMIT,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_memory_limit(mut self, bytes: usize) -> Self {
        self.memory_limit = bytes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.convolution()?;
        if self.horizon == 0 {
            return Err(Error::param("horizon", 0.0, "must be at least 1"));
        }
        if self.paths == 0 {
            return Err(Error::param("paths", 0.0, "must be at least 1"));
        }
        if self.kind == WalkKind::Kendall && !self.unit_step.support().is_nonnegative() {
            return Err(Error::domain(
                "the Kendall walk needs a unit step on [0, ∞)",
            ));
        }
        Ok(())
    }

    pub fn convolution(&self) -> Result<ConvolutionKind> {
        match self.kind {
            WalkKind::Kendall => ConvolutionKind::kendall(self.alpha),
            WalkKind::WeakKendall => ConvolutionKind::weak_kendall(self.alpha),
        }
    }
}

/// One transition: the new state and the draws that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub x: f64,
    /// `θ > 1` when `q`, else `1`.
    pub theta: f64,
    pub q: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakStep {
    pub x: f64,
    /// Modulus of `θ̃` when `q`, else `1`.
    pub theta: f64,
    pub q: bool,
    pub sign: f64,
}

#[inline]
fn switch_probability(lo: f64, hi: f64, alpha: f64) -> f64 {
    if hi == 0.0 {
        0.0
    } else if lo == hi {
        1.0
    } else {
        (lo / hi).powf(alpha)
    }
}

/// `X_{n+1} = (X_n ∨ ΔX)·θ^Q` with `P(Q = 1) = z^α`, `z = (X_n ∧ ΔX)/(X_n ∨ ΔX)`.
#[inline]
pub fn step_kendall(x: f64, dx: f64, alpha: f64, rng: &mut RngStream) -> Step {
    debug_assert!(x >= 0.0 && dx >= 0.0);
    let (lo, hi) = if x <= dx { (x, dx) } else { (dx, x) };
    let q = rng.uniform() < switch_probability(lo, hi, alpha);
    let theta = if q {
        sample_pareto(2.0 * alpha, rng)
    } else {
        1.0
    };
    Step {
        x: hi * theta,
        theta,
        q,
    }
}

/// Real-line transition: `v·u·θ̃` when the switch fires and `v·u·R` with a
/// fair sign `R` otherwise. `u` is the sign of the input of larger modulus,
/// `x`'s sign on a tie.
#[inline]
pub fn step_weak_kendall(x: f64, dx: f64, alpha: f64, rng: &mut RngStream) -> WeakStep {
    let (ax, adx) = (x.abs(), dx.abs());
    let (lo, hi) = if ax <= adx { (ax, adx) } else { (adx, ax) };
    let u = if adx > ax { sign_of(dx) } else { sign_of(x) };
    let q = rng.uniform() < switch_probability(lo, hi, alpha);
    let theta = if q {
        sample_pareto(2.0 * alpha, rng)
    } else {
        1.0
    };
    let sign = rng.sign();
    WeakStep {
        x: hi * u * sign * theta,
        theta,
        q,
        sign,
    }
}

#[inline]
fn sign_of(x: f64) -> f64 {
    if x.is_sign_negative() {
        -1.0
    } else {
        1.0
    }
}

/// A trajectory `X_0..X_N` with its draws. `thetas[j]` and `switches[j]`
/// produced `states[j + 1]`; entry 0 belongs to `X_1 = ΔX_1` and is
/// always `(1, false)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkPath {
    pub states: Vec<f64>,
    pub steps: Vec<f64>,
    pub thetas: Vec<f64>,
    pub switches: Vec<bool>,
}

impl WalkPath {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    /// `X_n`.
    pub fn state(&self, n: usize) -> f64 {
        self.states[n]
    }

    fn with_horizon(n: usize) -> Self {
        Self {
            states: Vec::with_capacity(n + 1),
            steps: Vec::with_capacity(n),
            thetas: Vec::with_capacity(n),
            switches: Vec::with_capacity(n),
        }
    }
}

/// Simulates path `m` of `config` into `path`, reusing its buffers.
fn fill_path(config: &WalkConfig, m: usize, path: &mut WalkPath) {
    path.states.clear();
    path.steps.clear();
    path.thetas.clear();
    path.switches.clear();
    let mut rng = RngStream::new(config.seed, m as u64);
    let first = config.unit_step.sample(&mut rng);
    path.states.extend([0.0, first]);
    path.steps.push(first);
    path.thetas.push(1.0);
    path.switches.push(false);
    let mut x = first;
    for _ in 1..config.horizon {
        let dx = config.unit_step.sample(&mut rng);
        let (next, theta, q) = match config.kind {
            WalkKind::Kendall => {
                let s = step_kendall(x, dx, config.alpha, &mut rng);
                (s.x, s.theta, s.q)
            }
            WalkKind::WeakKendall => {
                let s = step_weak_kendall(x, dx, config.alpha, &mut rng);
                (s.x, s.theta, s.q)
            }
        };
        path.states.push(next);
        path.steps.push(dx);
        path.thetas.push(theta);
        path.switches.push(q);
        x = next;
    }
}

/// Path `m` of `config` on its own.
pub fn simulate_path(config: &WalkConfig, m: usize) -> Result<WalkPath> {
    config.validate()?;
    let mut path = WalkPath::with_horizon(config.horizon);
    fill_path(config, m, &mut path);
    Ok(path)
}

fn path_bytes(horizon: usize) -> Option<usize> {
    let per_step = 3 * std::mem::size_of::<f64>() + std::mem::size_of::<bool>();
    horizon
        .checked_add(1)?
        .checked_mul(per_step)?
        .checked_add(std::mem::size_of::<WalkPath>())
}

/// All `M` paths of horizon `N`, in path order.
///
/// Fails with [`Error::Resource`] when the collection would exceed the
/// configured memory limit; [`simulate_map`] streams instead.
pub fn simulate(config: &WalkConfig) -> Result<Vec<WalkPath>> {
    config.validate()?;
    let bytes = path_bytes(config.horizon)
        .and_then(|b| b.checked_mul(config.paths))
        .ok_or_else(|| Error::Resource("path storage size overflows usize".into()))?;
    if bytes > config.memory_limit {
        return Err(Error::Resource(format!(
            "{} paths of horizon {} need about {bytes} bytes, over the {} byte limit",
            config.paths, config.horizon, config.memory_limit
        )));
    }
    let mut out: Vec<WalkPath> = Vec::new();
    out.try_reserve_exact(config.paths)
        .map_err(|e| Error::Resource(format!("cannot allocate {} paths: {e}", config.paths)))?;
    out.extend(map_indexed(config.execution, config.paths, |m| {
        let mut path = WalkPath::with_horizon(config.horizon);
        fill_path(config, m, &mut path);
        path
    }));
    Ok(out)
}

/// `f(path)` for every path without keeping the paths; results in path order.
pub fn simulate_map<T, F>(config: &WalkConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&WalkPath) -> T + Sync + Send,
{
    config.validate()?;
    Ok(map_indexed(config.execution, config.paths, |m| {
        let mut path = WalkPath::with_horizon(config.horizon);
        fill_path(config, m, &mut path);
        f(&path)
    }))
}

/// `X_n` across all paths.
pub fn simulate_states(config: &WalkConfig, n: usize) -> Result<Vec<f64>> {
    if n > config.horizon {
        return Err(Error::domain(format!(
            "state {n} beyond horizon {}",
            config.horizon
        )));
    }
    simulate_map(config, |p| p.states[n])
}

/// Partial sums `S̃_0..S̃_N` of `ΔX̃_k·Y_k` with `Y_k ~ μ_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociatedWalkPath {
    pub sums: Vec<f64>,
    pub steps: Vec<f64>,
    pub multipliers: Vec<f64>,
}

fn associated_path(config: &WalkConfig, m: usize) -> AssociatedWalkPath {
    let mut rng = RngStream::new(config.seed, ASSOCIATED_STREAM_BASE + m as u64);
    let mut path = AssociatedWalkPath {
        sums: Vec::with_capacity(config.horizon + 1),
        steps: Vec::with_capacity(config.horizon),
        multipliers: Vec::with_capacity(config.horizon),
    };
    let mut s = 0.0;
    path.sums.push(s);
    for _ in 0..config.horizon {
        let dx = config.unit_step.sample(&mut rng);
        let y = sample_mu_alpha(config.alpha, &mut rng).expect("validated alpha");
        s += dx * y;
        path.sums.push(s);
        path.steps.push(dx);
        path.multipliers.push(y);
    }
    path
}

fn check_associated(config: &WalkConfig) -> Result<()> {
    config.validate()?;
    if config.kind != WalkKind::WeakKendall {
        return Err(Error::domain(
            "the associated walk is defined for the weak Kendall walk",
        ));
    }
    if config.alpha > 1.0 {
        return Err(Error::param(
            "alpha",
            config.alpha,
            "the mixing law μ_α needs α ≤ 1",
        ));
    }
    Ok(())
}

/// The classical walk associated with the weak Kendall walk.
pub fn simulate_associated(config: &WalkConfig) -> Result<Vec<AssociatedWalkPath>> {
    check_associated(config)?;
    Ok(map_indexed(config.execution, config.paths, |m| {
        associated_path(config, m)
    }))
}

/// `S̃_n` across all associated paths.
pub fn simulate_associated_sums(config: &WalkConfig, n: usize) -> Result<Vec<f64>> {
    check_associated(config)?;
    if n > config.horizon {
        return Err(Error::domain(format!(
            "sum {n} beyond horizon {}",
            config.horizon
        )));
    }
    Ok(map_indexed(config.execution, config.paths, |m| {
        associated_path(config, m).sums[n]
    }))
}

/// `Z_n^{(k)} = X_{kn}` for `n = 0..⌊N/k⌋`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampledPath {
    pub k: usize,
    pub states: Vec<f64>,
}

pub fn subsample(paths: &[WalkPath], k: usize) -> Result<Vec<SubsampledPath>> {
    if k == 0 {
        return Err(Error::param("k", 0.0, "must be at least 1"));
    }
    paths
        .iter()
        .map(|p| {
            if k > p.horizon() {
                return Err(Error::domain(format!(
                    "horizon {} too short for k = {k}",
                    p.horizon()
                )));
            }
            Ok(SubsampledPath {
                k,
                states: p.states.iter().step_by(k).copied().collect(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kind: WalkKind, alpha: f64, step: Distribution, n: usize, m: usize) -> WalkConfig {
        WalkConfig::new(kind, alpha, step, n, m, 11).unwrap()
    }

    #[test]
    fn first_step_is_the_increment() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..100 {
            let s = step_kendall(0.0, 1.0, 0.7, &mut rng);
            assert_eq!(s, Step { x: 1.0, theta: 1.0, q: false });
        }
    }

    #[test]
    fn tie_forces_pareto() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..100 {
            let s = step_kendall(1.0, 1.0, 0.7, &mut rng);
            assert!(s.q && s.theta > 1.0 && s.x == s.theta);
        }
    }

    #[test]
    fn weak_step_tie_uses_sign_of_state() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..50 {
            let s = step_weak_kendall(-2.0, 2.0, 0.5, &mut rng);
            assert!(s.q);
            assert_eq!(s.x, -2.0 * s.sign * s.theta);
        }
    }

    #[test]
    fn stored_recursion_holds() {
        let c = config(WalkKind::Kendall, 0.8, Distribution::gamma(2.0, 1.0).unwrap(), 12, 200);
        for p in simulate(&c).unwrap() {
            assert_eq!(p.states[0], 0.0);
            assert_eq!(p.states[1], p.steps[0]);
            for n in 1..12 {
                let v = p.states[n].max(p.steps[n]);
                let expect = if p.switches[n] { v * p.thetas[n] } else { v };
                assert_eq!(p.states[n + 1], expect);
                assert!(p.states[n + 1] >= p.states[n]);
                assert_eq!(p.thetas[n] > 1.0, p.switches[n]);
            }
        }
    }

    #[test]
    fn reproducible_across_policies() {
        let base = config(WalkKind::WeakKendall, 0.6, Distribution::sym_pareto(1.0).unwrap(), 8, 3000);
        let seq = simulate(&base.clone().with_execution(Execution::Sequential)).unwrap();
        let par = simulate(&base.clone().with_execution(Execution::Parallel)).unwrap();
        let two = simulate(&base.with_execution(Execution::ParallelWith { threads: 2 })).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq, two);
    }

    #[test]
    fn path_m_uses_stream_m() {
        let c = config(WalkKind::Kendall, 1.0, Distribution::uniform01(), 5, 10);
        let all = simulate(&c).unwrap();
        assert_eq!(simulate_path(&c, 7).unwrap(), all[7]);
        let finals = simulate_states(&c, 5).unwrap();
        assert_eq!(finals[3], all[3].states[5]);
    }

    #[test]
    fn config_validation() {
        let d = Distribution::dirac(1.0).unwrap();
        assert!(WalkConfig::new(WalkKind::WeakKendall, 1.5, d.clone(), 3, 3, 0).is_err());
        assert!(WalkConfig::new(WalkKind::Kendall, 1.0, d.clone(), 0, 3, 0).is_err());
        assert!(WalkConfig::new(WalkKind::Kendall, 1.0, d.clone(), 3, 0, 0).is_err());
        let signed = Distribution::sym_pareto(1.0).unwrap();
        assert!(WalkConfig::new(WalkKind::Kendall, 1.0, signed, 3, 3, 0).is_err());
    }

    #[test]
    fn memory_limit_is_explicit() {
        let c = config(WalkKind::Kendall, 1.0, Distribution::dirac(1.0).unwrap(), 100, 1000)
            .with_memory_limit(1024);
        assert!(matches!(simulate(&c), Err(Error::Resource(_))));
        assert_eq!(simulate_map(&c, |p| p.states[100]).unwrap().len(), 1000);
    }

    #[test]
    fn associated_sums() {
        let c = config(WalkKind::WeakKendall, 0.5, Distribution::sym_dirac(1.0).unwrap(), 4, 50);
        for p in simulate_associated(&c).unwrap() {
            assert_eq!(p.sums[0], 0.0);
            for n in 0..4 {
                assert_eq!(p.sums[n + 1], p.sums[n] + p.steps[n] * p.multipliers[n]);
            }
        }
        let kendall = config(WalkKind::Kendall, 0.5, Distribution::dirac(1.0).unwrap(), 4, 5);
        assert!(simulate_associated(&kendall).is_err());
    }

    #[test]
    fn subsample_identity_and_stride() {
        let c = config(WalkKind::Kendall, 1.0, Distribution::dirac(1.0).unwrap(), 6, 20);
        let paths = simulate(&c).unwrap();
        let one = subsample(&paths, 1).unwrap();
        assert_eq!(one[4].states, paths[4].states);
        let three = subsample(&paths, 3).unwrap();
        assert_eq!(three[4].states, vec![0.0, paths[4].states[3], paths[4].states[6]]);
        assert!(subsample(&paths, 7).is_err());
        assert!(subsample(&paths, 0).is_err());
    }
}
