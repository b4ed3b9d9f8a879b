//! Kolmogorov–Smirnov distances, exact in the presence of atoms.

use crate::exec::{map_indexed, sort_f64, Execution};
use crate::measures::Distribution;
use crate::{Error, Result};

/// Asymptotic one-sample critical constant at the 1% level.
pub const KS_CRITICAL_1PCT: f64 = 1.63;
/// Asymptotic one-sample critical constant at the 5% level.
pub const KS_CRITICAL_5PCT: f64 = 1.36;

/// A hypothesized law: right-continuous CDF plus its left limits.
pub trait Hypothesis: Sync {
    fn cdf(&self, x: f64) -> f64;

    /// `F(x⁻)`; equals `cdf` for continuous laws.
    fn cdf_left(&self, x: f64) -> f64 {
        self.cdf(x)
    }
}

impl Hypothesis for Distribution {
    fn cdf(&self, x: f64) -> f64 {
        Distribution::cdf(self, x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        Distribution::cdf_left(self, x)
    }
}

/// Any continuous CDF given as a closure.
impl<F: Fn(f64) -> f64 + Sync> Hypothesis for F {
    fn cdf(&self, x: f64) -> f64 {
        self(x)
    }
}

/// A CDF with known atoms `(location, mass)`; `F(x⁻) = F(x) - mass(x)`.
pub struct WithAtoms<F> {
    pub cdf: F,
    pub atoms: Vec<(f64, f64)>,
}

impl<F: Fn(f64) -> f64 + Sync> Hypothesis for WithAtoms<F> {
    fn cdf(&self, x: f64) -> f64 {
        (self.cdf)(x)
    }

    fn cdf_left(&self, x: f64) -> f64 {
        let mass: f64 = self.atoms.iter().filter(|a| a.0 == x).map(|a| a.1).sum();
        ((self.cdf)(x) - mass).max(0.0)
    }
}

/// One-sample statistic `sup_x |F_emp(x) - F(x)|`.
///
/// The supremum is attained at a sample point or its left limit, so comparing
/// `F_emp(x)` with `F(x)` and `F_emp(x⁻)` with `F(x⁻)` at each distinct sample
/// value gives the exact statistic, atoms included.
pub fn ks_statistic<H: Hypothesis + ?Sized>(
    exec: Execution,
    samples: &[f64],
    law: &H,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("KS statistic of an empty sample"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("sample contains NaN"));
    }
    let mut xs = samples.to_vec();
    sort_f64(exec, &mut xs);
    // group starts: indices where a new distinct value begins
    let starts: Vec<usize> = (0..xs.len())
        .filter(|&i| i == 0 || xs[i] != xs[i - 1])
        .collect();
    let n = xs.len() as f64;
    let per_group = map_indexed(exec, starts.len(), |g| {
        let i = starts[g];
        let end = starts.get(g + 1).copied().unwrap_or(xs.len());
        let x = xs[i];
        let below = i as f64 / n;
        let upto = end as f64 / n;
        (upto - law.cdf(x)).abs().max((below - law.cdf_left(x)).abs())
    });
    Ok(per_group.into_iter().fold(0.0, f64::max))
}

/// Two-sample statistic `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_two_sample(exec: Execution, a: &[f64], b: &[f64]) -> Result<f64> {
    ks_two_sample_tol(exec, a, b, 0.0)
}

/// Two-sample statistic treating values within relative distance `rel_tol` as
/// equal, so atoms computed along different rounding paths still coincide.
pub fn ks_two_sample_tol(exec: Execution, a: &[f64], b: &[f64], rel_tol: f64) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("KS statistic of an empty sample"));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::domain("sample contains NaN"));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    sort_f64(exec, &mut xa);
    sort_f64(exec, &mut xb);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xa.len() || j < xb.len() {
        let start = match (xa.get(i), xb.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => unreachable!(),
        };
        // absorb a chain of values each within tolerance of the previous one
        let mut edge = start;
        loop {
            let limit = edge + rel_tol * edge.abs();
            let mut moved = false;
            while i < xa.len() && xa[i] <= limit {
                edge = edge.max(xa[i]);
                i += 1;
                moved = true;
            }
            while j < xb.len() && xb[j] <= limit {
                edge = edge.max(xb[j]);
                j += 1;
                moved = true;
            }
            if !moved || rel_tol == 0.0 {
                break;
            }
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// `c / √n`, the asymptotic critical value for `n` samples.
pub fn ks_threshold(c: f64, n: usize) -> f64 {
    c / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn exact_statistic_small_case() {
        // uniform: samples 0.2, 0.4, 0.9 -> D = max(1/3-0.2, 0.4-1/3, 2/3-0.4, 0.9-2/3, 1-0.9, 0.2-0)
        let d = ks_statistic(Execution::Sequential, &[0.9, 0.2, 0.4], &|x: f64| x.clamp(0.0, 1.0))
            .unwrap();
        assert!((d - (2.0 / 3.0 - 0.4)).abs() < 1e-15);
    }

    #[test]
    fn atoms_are_not_penalized() {
        // half the mass at 1, the rest uniform on (1, 2)
        let cdf = |x: f64| {
            if x < 1.0 {
                0.0
            } else {
                (0.5 + 0.5 * (x - 1.0)).min(1.0)
            }
        };
        let mut rng = RngStream::new(3, 0);
        let xs: Vec<f64> = (0..20_000)
            .map(|_| if rng.uniform() < 0.5 { 1.0 } else { 1.0 + rng.uniform() })
            .collect();
        let with = WithAtoms { cdf, atoms: vec![(1.0, 0.5)] };
        let d = ks_statistic(Execution::Sequential, &xs, &with).unwrap();
        assert!(d < ks_threshold(KS_CRITICAL_1PCT, xs.len()), "{d}");
        // ignoring the atom makes the left limit at 1 wrong by ~1/2
        let d_bad = ks_statistic(Execution::Sequential, &xs, &cdf).unwrap();
        assert!(d_bad > 0.4);
    }

    #[test]
    fn distribution_hypothesis_and_policies_agree() {
        let law = Distribution::pareto(2.0).unwrap();
        let mut rng = RngStream::new(11, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| law.sample(&mut rng)).collect();
        let a = ks_statistic(Execution::Sequential, &xs, &law).unwrap();
        let b = ks_statistic(Execution::Parallel, &xs, &law).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a < ks_threshold(KS_CRITICAL_1PCT, xs.len()));
    }

    #[test]
    fn empty_and_nan_rejected() {
        assert!(matches!(
            ks_statistic(Execution::Sequential, &[], &|x: f64| x),
            Err(Error::Domain(_))
        ));
        assert!(ks_statistic(Execution::Sequential, &[f64::NAN], &|x: f64| x).is_err());
        assert!(ks_two_sample(Execution::Sequential, &[], &[1.0]).is_err());
    }

    #[test]
    fn two_sample_basic() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample(Execution::Sequential, &a, &b).unwrap(), 0.0);
        let c = [5.0, 6.0];
        assert_eq!(ks_two_sample(Execution::Sequential, &a, &c).unwrap(), 1.0);
        let d = [1.0, 1.0, 3.0, 3.0];
        assert_eq!(ks_two_sample(Execution::Sequential, &a, &d).unwrap(), 0.25);
    }

    #[test]
    fn tolerance_merges_ulp_neighbours() {
        let x = 3.0f64;
        let a = vec![x; 10];
        let b = vec![f64::from_bits(x.to_bits() + 1); 10];
        assert_eq!(ks_two_sample(Execution::Sequential, &a, &b).unwrap(), 1.0);
        assert_eq!(ks_two_sample_tol(Execution::Sequential, &a, &b, 1e-12).unwrap(), 0.0);
    }
}
