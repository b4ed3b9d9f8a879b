//! `E|X̃_n|^α = n` for the unit-atom step: exact by quadrature, diagnostic by
//! Monte Carlo.

use crate::closedforms::nstep_delta1_pdf;
use crate::exec::{sort_f64, stable_sum};
use crate::quadrature::Quadrature;
use crate::verify::report::{Check, VerificationReport};
use crate::walks::{simulate_map, WalkConfig};
use crate::{Error, Result};

/// Tolerance on the quadrature value of `E|X_n|^α`.
pub const MOMENT_TOLERANCE: f64 = 1e-8;
/// Fraction of the largest values dropped by the trimmed mean.
pub const TRIM_FRACTION: f64 = 1e-3;

/// `∫ x^α dF_n` against the closed-form n-step density.
pub fn alpha_moment_quadrature(n: u32, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("n", 0.0, "must be at least 1"));
    }
    if n == 1 {
        return Ok(1.0);
    }
    let q = Quadrature::default();
    q.integrate_tail(
        |x| x.powf(alpha) * nstep_delta1_pdf(n, alpha, x).unwrap_or(f64::NAN),
        1.0,
        alpha,
    )
}

/// Quadrature checks for each `n`, plus Monte Carlo diagnostics when a walk
/// configuration with a `δ_1` or `δ̃_1` step is supplied.
pub fn moment_check(alpha: f64, ns: &[u32], walk: Option<&WalkConfig>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("moments");
    for &n in ns {
        let v = alpha_moment_quadrature(n, alpha)?;
        report.push(Check::close(
            format!("quadrature_alpha_moment(alpha={alpha}, n={n})"),
            v,
            n as f64,
            MOMENT_TOLERANCE,
        ));
    }
    let Some(config) = walk else {
        return Ok(report);
    };
    let unit = config.unit_step.abs();
    if !(unit.cdf(1.0) == 1.0 && unit.cdf_left(1.0) == 0.0) {
        return Err(Error::domain("moment_check needs a unit step of modulus one"));
    }
    if config.alpha != alpha {
        return Err(Error::param("alpha", config.alpha, "walk and check disagree"));
    }
    let max_n = ns.iter().copied().max().unwrap_or(0) as usize;
    if max_n > config.horizon {
        return Err(Error::domain(format!(
            "n = {max_n} beyond horizon {}",
            config.horizon
        )));
    }
    report.seed(config.seed).sample_size(config.paths as u64);
    let per_path = simulate_map(config, |p| {
        ns.iter()
            .map(|&n| p.states[n as usize].abs().powf(alpha))
            .collect::<Vec<f64>>()
    })?;
    for (j, &n) in ns.iter().enumerate() {
        let mut xs: Vec<f64> = per_path.iter().map(|row| row[j]).collect();
        let m = xs.len() as f64;
        let mean = stable_sum(config.execution, &xs, |x| x) / m;
        sort_f64(config.execution, &mut xs);
        let keep = xs.len() - (xs.len() as f64 * TRIM_FRACTION).floor() as usize;
        let trimmed = stable_sum(config.execution, &xs[..keep], |x| x) / keep as f64;
        let note = "variance of |X|^alpha is infinite; not a pass/fail gate";
        report.push(Check::info(format!("monte_carlo_mean(n={n})"), mean).with_note(note));
        report.push(
            Check::info(format!("monte_carlo_trimmed_mean(n={n})"), trimmed)
                .with_note(format!("largest {TRIM_FRACTION} fraction dropped")),
        );
    }
    Ok(report)
}
