//! Path laws of both walks against exact distributions.

use kendall_walks::closedforms::{increment_cdf, increment_joint_cdf, nstep_delta1_cdf};
use kendall_walks::convolution::{kernel, ConvolutionKind};
use kendall_walks::exec::map_indexed;
use kendall_walks::rng::AUXILIARY_STREAM_BASE;
use kendall_walks::verify::{ks_statistic, ks_two_sample, WithAtoms};
use kendall_walks::walks::{
    simulate_associated_sums, simulate_map, simulate_path, subsample, WalkConfig, WalkKind,
};
use kendall_walks::williamson::nstep_cdf;
use kendall_walks::{Distribution, Execution, RngStream};

const M: usize = 1_000_000;

fn unit() -> Distribution {
    Distribution::dirac(1.0).unwrap()
}

fn sym_unit() -> Distribution {
    Distribution::sym_dirac(1.0).unwrap()
}

fn config(kind: WalkKind, alpha: f64, step: Distribution, n: usize, m: usize, seed: u64) -> WalkConfig {
    WalkConfig::new(kind, alpha, step, n, m, seed).unwrap()
}

#[test]
fn weak_walk_modulus_has_the_half_line_law() {
    let cfg = config(WalkKind::WeakKendall, 1.0, sym_unit(), 5, M, 11);
    let xs: Vec<f64> = simulate_map(&cfg, |p| p.states[5].abs()).unwrap();
    let cdf = |x: f64| nstep_delta1_cdf(5, 1.0, x).unwrap();
    let d = ks_statistic(Execution::Parallel, &xs, &WithAtoms { cdf, atoms: vec![] }).unwrap();
    assert!(d <= 0.005, "{d}");
}

#[test]
fn weak_walk_second_state_is_pareto_in_modulus() {
    let alpha = 0.6;
    let cfg = config(WalkKind::WeakKendall, alpha, sym_unit(), 2, 200_000, 12);
    let xs: Vec<f64> = simulate_map(&cfg, |p| p.states[2].abs()).unwrap();
    let law = Distribution::pareto(2.0 * alpha).unwrap();
    let d = ks_statistic(Execution::Parallel, &xs, &law).unwrap();
    assert!(d <= 1.63 / (xs.len() as f64).sqrt(), "{d}");
}

#[test]
fn weak_walk_marginals_are_symmetric() {
    let cfg = config(WalkKind::WeakKendall, 0.7, Distribution::sym_pareto(1.2).unwrap(), 6, M, 13);
    let states = simulate_map(&cfg, |p| [p.states[3], p.states[6]]).unwrap();
    let tol = 3.0 / (M as f64).sqrt();
    for j in 0..2 {
        for x in [0.5, 1.0, 2.0, 5.0, 20.0] {
            let above = states.iter().filter(|s| s[j] > x).count() as f64 / M as f64;
            let below = states.iter().filter(|s| s[j] < -x).count() as f64 / M as f64;
            assert!((above - below).abs() <= tol, "x={x}: {above} vs {below}");
        }
    }
}

#[test]
fn switch_frequency_given_state() {
    // P(Q_n = 1 | X_n = x) = x^{-α} for δ_1 steps and x > 1
    let alpha = 1.0;
    let n = 3;
    let cfg = config(WalkKind::Kendall, alpha, unit(), n + 1, 100_000, 14);
    let pairs = simulate_map(&cfg, |p| (p.states[n], p.switches[n])).unwrap();
    let edges = [1.0, 1.5, 2.0, 3.0, 5.0, 10.0, f64::INFINITY];
    for w in edges.windows(2) {
        let bin: Vec<_> = pairs.iter().filter(|(x, _)| *x > w[0] && *x <= w[1]).collect();
        let count = bin.len() as f64;
        assert!(count > 1000.0, "bin {w:?} too small");
        let freq = bin.iter().filter(|(_, q)| *q).count() as f64 / count;
        let p = bin.iter().map(|(x, _)| x.powf(-alpha)).sum::<f64>() / count;
        let sigma = (p * (1.0 - p) / count).sqrt();
        assert!((freq - p).abs() <= 3.0 * sigma, "bin {w:?}: {freq} vs {p}");
    }
}

#[test]
fn half_line_paths_never_decrease() {
    let cfg = config(WalkKind::Kendall, 0.8, Distribution::gamma(2.0, 1.0).unwrap(), 50, 2_000, 15);
    let ok = simulate_map(&cfg, |p| p.states.windows(2).all(|w| w[1] >= w[0])).unwrap();
    assert!(ok.into_iter().all(|b| b));
}

#[test]
fn semigroup_by_independent_copies() {
    let (n, k, alpha) = (2usize, 3usize, 1.0);
    let kind = ConvolutionKind::kendall(alpha).unwrap();
    let xn = simulate_map(&config(WalkKind::Kendall, alpha, unit(), n, M, 21), |p| p.states[n]).unwrap();
    let xk = simulate_map(&config(WalkKind::Kendall, alpha, unit(), k, M, 22), |p| p.states[k]).unwrap();
    let combined = map_indexed(Execution::Parallel, M, |i| {
        let mut rng = RngStream::new(23, AUXILIARY_STREAM_BASE + i as u64);
        kernel(kind, xn[i], xk[i]).unwrap().sample(&mut rng)
    });
    let direct = simulate_map(&config(WalkKind::Kendall, alpha, unit(), n + k, M, 24), |p| p.states[n + k]).unwrap();
    let d = ks_two_sample(Execution::Parallel, &combined, &direct).unwrap();
    assert!(d <= 0.006, "{d}");
}

#[test]
fn increments_depend_on_the_state() {
    // witness that X_2 and X_3 - X_2 are dependent, checked against the exact covariance
    let cfg = config(WalkKind::Kendall, 1.0, unit(), 3, M, 31);
    let pairs = simulate_map(&cfg, |p| {
        let a = f64::from(u8::from(p.states[2] < 2.0));
        let b = f64::from(u8::from(p.states[3] - p.states[2] < 1.0));
        (a, b)
    })
    .unwrap();
    let m = M as f64;
    let ma = pairs.iter().map(|p| p.0).sum::<f64>() / m;
    let mb = pairs.iter().map(|p| p.1).sum::<f64>() / m;
    let terms: Vec<f64> = pairs.iter().map(|p| (p.0 - ma) * (p.1 - mb)).collect();
    let cov = terms.iter().sum::<f64>() / m;
    let var = terms.iter().map(|t| (t - cov).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    assert!(cov.abs() > 5.0 * se, "cov {cov} se {se}");
    // X_2 has no atom at 2, so P(X_2 < 2) = F_2(2)
    let exact = increment_joint_cdf(2, 1.0, 2.0).unwrap()
        - nstep_delta1_cdf(2, 1.0, 2.0).unwrap() * increment_cdf(2, 1.0).unwrap();
    assert!((cov - exact).abs() <= 4.0 * se, "{cov} vs {exact}");
}

#[test]
fn subsampled_walk_matches_the_three_step_law() {
    let alpha = 0.9;
    let cfg = config(WalkKind::Kendall, alpha, unit(), 3, M, 41);
    let block = 100_000;
    let mut z1 = Vec::with_capacity(M);
    for start in (0..M).step_by(block) {
        let paths: Vec<_> = map_indexed(Execution::Parallel, block, |i| simulate_path(&cfg, start + i).unwrap());
        z1.extend(subsample(&paths, 3).unwrap().into_iter().map(|s| s.states[1]));
    }
    let d = ks_statistic(Execution::Parallel, &z1, &|x: f64| nstep_cdf(&unit(), alpha, 3, x).unwrap()).unwrap();
    assert!(d <= 0.005, "{d}");
    // k = 2 gives Pareto(2α) at the first coarse step
    let paths: Vec<_> = map_indexed(Execution::Parallel, 50_000, |i| simulate_path(&cfg, i).unwrap());
    let z: Vec<f64> = subsample(&paths, 2).unwrap().into_iter().map(|s| s.states[1]).collect();
    let d = ks_statistic(Execution::Parallel, &z, &Distribution::pareto(2.0 * alpha).unwrap()).unwrap();
    assert!(d <= 1.63 / (z.len() as f64).sqrt(), "{d}");
}

#[test]
fn associated_walk_starts_at_zero() {
    let cfg = config(WalkKind::WeakKendall, 0.5, sym_unit(), 3, 100, 51);
    assert!(simulate_associated_sums(&cfg, 0).unwrap().iter().all(|&s| s == 0.0));
}
