//! Explicit distributional formulas for walks with simple unit steps.
//!
//! Each formula here has an independent numerical counterpart (quadrature,
//! a series, or the generic transform route) and the tests hold them
//! against each other.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::Distribution;
use crate::quadrature::Quadrature;
use crate::special::{beta_reg, gamma_lr, ln_beta, ln_gamma, one_minus_cos_over_sq};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormId {
    NstepDelta1Pdf,
    NstepDelta1Cdf,
    NstepUniformCdf,
    NstepBetaCdf,
    NstepGammaCdf,
    SymNstepPdf,
    IncrementCdf,
    JointDensity,
    AtomProb,
    MixturePowerPdf,
    Mu1NfoldPdf,
    TransienceSum,
    EnvelopeProb,
}

impl ClosedFormId {
    pub const ALL: [ClosedFormId; 13] = [
        Self::NstepDelta1Pdf,
        Self::NstepDelta1Cdf,
        Self::NstepUniformCdf,
        Self::NstepBetaCdf,
        Self::NstepGammaCdf,
        Self::SymNstepPdf,
        Self::IncrementCdf,
        Self::JointDensity,
        Self::AtomProb,
        Self::MixturePowerPdf,
        Self::Mu1NfoldPdf,
        Self::TransienceSum,
        Self::EnvelopeProb,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::NstepDelta1Pdf => "nstep_delta1_pdf",
            Self::NstepDelta1Cdf => "nstep_delta1_cdf",
            Self::NstepUniformCdf => "nstep_uniform_cdf",
            Self::NstepBetaCdf => "nstep_beta_cdf",
            Self::NstepGammaCdf => "nstep_gamma_cdf",
            Self::SymNstepPdf => "sym_nstep_pdf",
            Self::IncrementCdf => "increment_cdf",
            Self::JointDensity => "joint_density",
            Self::AtomProb => "atom_prob",
            Self::MixturePowerPdf => "mixture_power_pdf",
            Self::Mu1NfoldPdf => "mu1_nfold_pdf",
            Self::TransienceSum => "transience_sum",
            Self::EnvelopeProb => "envelope_prob",
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", alpha, "must be finite and positive"))
    }
}

fn check_weak_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", alpha, "must lie in (0, 1]"))
    }
}

fn check_min(name: &'static str, n: u32, min: u32) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be at least {min}, got {n}")))
    }
}

/// Density of the n-step law from `δ_1`:
/// `α n(n-1) x^{-2α-1} (1 - x^{-α})^{n-2}` on `[1, ∞)`.
pub fn nstep_delta1_pdf(n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_min("n", n, 2)?;
    check_alpha(alpha)?;
    if !(x >= 1.0) || x.is_infinite() {
        return Ok(0.0);
    }
    let nf = n as f64;
    let y = x.powf(-alpha);
    Ok(alpha * nf * (nf - 1.0) * y * y / x * (1.0 - y).powi(n as i32 - 2))
}

/// `(1 + (n-1)x^{-α})(1 - x^{-α})_+^{n-1}` for `x ≥ 1`, zero below.
pub fn nstep_delta1_cdf(n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_min("n", n, 1)?;
    check_alpha(alpha)?;
    if x.is_nan() {
        return Err(Error::domain("x is NaN"));
    }
    if x < 1.0 {
        return Ok(0.0);
    }
    let y = x.powf(-alpha);
    let nf = n as f64;
    Ok((1.0 + (nf - 1.0) * y) * (1.0 - y).powi(n as i32 - 1))
}

/// Uniform unit step: `(α/(α+1))^n (1 + n/α) x^n` on `[0, 1)` and
/// `(1 - c)^{n-1}(1 + (n-1)c)`, `c = 1/((α+1)x^α)`, on `[1, ∞)`.
pub fn nstep_uniform_cdf(n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_min("n", n, 2)?;
    check_alpha(alpha)?;
    if x.is_nan() {
        return Err(Error::domain("x is NaN"));
    }
    let nf = n as f64;
    Ok(if x <= 0.0 {
        0.0
    } else if x < 1.0 {
        (alpha / (alpha + 1.0)).powi(n as i32) * (1.0 + nf / alpha) * x.powi(n as i32)
    } else {
        let c = 1.0 / ((alpha + 1.0) * x.powf(alpha));
        (1.0 - c).powi(n as i32 - 1) * (1.0 + (nf - 1.0) * c)
    })
}

/// `d/ds [s H(s)^n]` at `s = x^α`, given `H(s)` and `H'(s)`.
fn d_s_power(n: u32, s: f64, h: f64, dh: f64) -> f64 {
    let nf = n as f64;
    h.powi(n as i32) + nf * s * h.powi(n as i32 - 1) * dh
}

/// Beta`(a, b)` unit step. With `y = s^{1/α}`,
/// `H(s) = I_y(a, b) - C s^{-1} I_y(a+α, b)` and `C = E X^α`; the CDF is
/// `d/ds[s H(s)^n]` at `s = x^α`, differentiated analytically.
pub fn nstep_beta_cdf(a: f64, b: f64, n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_min("n", n, 2)?;
    check_alpha(alpha)?;
    let law = Distribution::beta(a, b)?;
    if x.is_nan() {
        return Err(Error::domain("x is NaN"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let s = x.powf(alpha);
    let y = x;
    let c = (ln_beta(a + alpha, b) - ln_beta(a, b)).exp();
    let shifted = Distribution::beta(a + alpha, b)?;
    let h = beta_reg(a, b, y) - c / s * beta_reg(a + alpha, b, y);
    // dy/ds = y/(α s)
    let dy = y / (alpha * s);
    let dh = law.density(y) * dy + c / (s * s) * beta_reg(a + alpha, b, y)
        - c / s * shifted.density(y) * dy;
    Ok(d_s_power(n, s, h, dh).clamp(0.0, 1.0))
}

/// Gamma`(a, b)` unit step (rate `b`):
/// `H(s) = P(a, b y) - Γ(a+α)/(Γ(a) b^α s) P(a+α, b y)`.
pub fn nstep_gamma_cdf(a: f64, b: f64, n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_min("n", n, 2)?;
    check_alpha(alpha)?;
    let law = Distribution::gamma(a, b)?;
    if x.is_nan() {
        return Err(Error::domain("x is NaN"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let s = x.powf(alpha);
    let y = x;
    let c = (ln_gamma(a + alpha) - ln_gamma(a) - alpha * b.ln()).exp();
    let shifted = Distribution::gamma(a + alpha, b)?;
    let h = gamma_lr(a, b * y) - c / s * gamma_lr(a + alpha, b * y);
    let dy = y / (alpha * s);
    let dh = law.density(y) * dy + c / (s * s) * gamma_lr(a + alpha, b * y)
        - c / s * shifted.density(y) * dy;
    Ok(d_s_power(n, s, h, dh).clamp(0.0, 1.0))
}

/// Density of the weak walk after `n` steps from `δ̃_1`:
/// `α n(n-1) / (2|x|^{2α+1}) (1 - |x|^{-α})^{n-2}` on `|x| ≥ 1`.
pub fn sym_nstep_pdf(n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_min("n", n, 2)?;
    check_weak_alpha(alpha)?;
    Ok(0.5 * nstep_delta1_pdf(n, alpha, x.abs())?)
}

/// `P(X_{k+1} = X_k)` for `δ_1` steps: `(k-1)/(k+1)`.
pub fn atom_prob(k: u32) -> Result<f64> {
    check_min("k", k, 1)?;
    Ok((k as f64 - 1.0) / (k as f64 + 1.0))
}

fn beta_density(a: f64, b: f64, y: f64) -> f64 {
    if y <= 0.0 || y >= 1.0 {
        return 0.0;
    }
    ((a - 1.0) * y.ln() + (b - 1.0) * (-y).ln_1p() - ln_beta(a, b)).exp()
}

/// `P(X_{k+1} - X_k < w)` for `α = 1`, `δ_1` steps:
/// `1 - (2/(k+1)) E[(1 + wY)^{-2}]`, `Y ~ Beta(3, k-1)`.
/// For `w ≤ 0` returns the limit `(k-1)/(k+1)` from the right.
pub fn increment_cdf(k: u32, w: f64) -> Result<f64> {
    check_min("k", k, 2)?;
    if w.is_nan() {
        return Err(Error::domain("w is NaN"));
    }
    let atom = atom_prob(k)?;
    if w <= 0.0 {
        return Ok(atom);
    }
    if w.is_infinite() {
        return Ok(1.0);
    }
    let b = k as f64 - 1.0;
    let expectation = Quadrature::with_abs_tol(1e-12)
        .integrate(|y| beta_density(3.0, b, y) / (1.0 + w * y).powi(2), 0.0, 1.0)?;
    Ok(1.0 - 2.0 / (k as f64 + 1.0) * expectation)
}

/// Continuous part of `(X_k, X_{k+1})` for `α = 1`, `δ_1` steps, normalized:
/// `(k+1)k(k-1) u^{-2} v^{-3} (1 - 1/u)^{k-2}` on `1 ≤ u ≤ v`.
/// It carries total weight `2/(k+1)`.
pub fn joint_density(k: u32, u: f64, v: f64) -> Result<f64> {
    check_min("k", k, 2)?;
    if !(u >= 1.0 && v >= u) || v.is_infinite() {
        return Ok(0.0);
    }
    let kf = k as f64;
    Ok((kf + 1.0) * kf * (kf - 1.0) / (u * u * v * v * v) * (1.0 - 1.0 / u).powi(k as i32 - 2))
}

/// `P(X_{k+1} = X_k, X_k ≤ z)` for `α = 1`, `δ_1` steps.
///
/// Staying put has conditional probability `1 - 1/X_k`, so this is
/// `E[(1 - 1/X_k); X_k ≤ z] = (k-1)/(k+1) (1 - I_{1/z}(2, k))`, not the
/// product `(k-1)/(k+1) · P(X_k ≤ z)`.
pub fn stay_joint_cdf(k: u32, z: f64) -> Result<f64> {
    check_min("k", k, 2)?;
    if z.is_nan() {
        return Err(Error::domain("z is NaN"));
    }
    if z < 1.0 {
        return Ok(0.0);
    }
    Ok(atom_prob(k)? * (1.0 - beta_reg(2.0, k as f64, 1.0 / z)))
}

/// `P(X_{k+1} - X_k < w, X_k < z)` for `α = 1`, `δ_1` steps, by integrating
/// the joint density over `1 ≤ u < z`, `u ≤ v < u + w` (inner integral in
/// closed form) and adding the atom part.
pub fn increment_joint_cdf(k: u32, w: f64, z: f64) -> Result<f64> {
    check_min("k", k, 2)?;
    if w.is_nan() || z.is_nan() {
        return Err(Error::domain("w or z is NaN"));
    }
    if z <= 1.0 {
        return Ok(0.0);
    }
    let kf = k as f64;
    let atom = stay_joint_cdf(k, z)?;
    if w <= 0.0 {
        return Ok(atom);
    }
    let inner = |u: f64| {
        let dv = 0.5 * (1.0 / (u * u) - 1.0 / ((u + w) * (u + w)));
        (kf + 1.0) * kf * (kf - 1.0) / (u * u) * (1.0 - 1.0 / u).powi(k as i32 - 2) * dv
    };
    let q = Quadrature::with_abs_tol(1e-12);
    let cont = if z.is_infinite() {
        q.integrate_tail(inner, 1.0, 3.0)?
    } else {
        q.integrate(inner, 1.0, z)?
    };
    Ok(atom + 2.0 / (kf + 1.0) * cont)
}

/// Density of the `n`-fold weak power of `α δ̃_1 + (1-α) π̃_α`:
/// `(α n/2)|x|^{-α-1}(1 - |x|^{-α})^{n-2}[1 - α + (α n - 1)|x|^{-α}]` on `|x| > 1`.
pub fn mixture_power_pdf(n: u32, alpha: f64, x: f64) -> Result<f64> {
    check_min("n", n, 2)?;
    check_weak_alpha(alpha)?;
    let ax = x.abs();
    if !(ax > 1.0) || ax.is_infinite() {
        return Ok(0.0);
    }
    let nf = n as f64;
    let y = ax.powf(-alpha);
    Ok(0.5 * alpha * nf * y / ax
        * (1.0 - y).powi(n as i32 - 2)
        * (1.0 - alpha + (alpha * nf - 1.0) * y))
}

/// Density `g_n` of `μ_1^{*n}` by `g_n = n/(πx²) - n(n-1)/x² g_{n-2}`,
/// seeded with `g_0 = sin x/(πx)` and `g_1 = (1 - cos x)/(πx²)`.
/// A power series replaces the recurrence only for `|x| < 1e-3`.
pub fn mu1_nfold_pdf_recurrence(n: u32, x: f64) -> f64 {
    if x.abs() < 1e-3 {
        return mu1_nfold_series(n, x);
    }
    recurrence(n, x)
}

fn recurrence(n: u32, x: f64) -> f64 {
    let x2 = x * x;
    let mut g = if n % 2 == 0 {
        x.sin() / (PI * x)
    } else {
        one_minus_cos_over_sq(x) / PI
    };
    let mut m = if n % 2 == 0 { 0 } else { 1 };
    while m < n {
        m += 2;
        let mf = m as f64;
        g = mf / (PI * x2) - mf * (mf - 1.0) / x2 * g;
    }
    g
}

/// `(1/π) Σ_k (-1)^k x^{2k} n!/(2k+n+1)!`.
fn mu1_nfold_series(n: u32, x: f64) -> f64 {
    let x2 = x * x;
    let nf = n as f64;
    let mut term = 1.0 / (nf + 1.0);
    let mut sum = term;
    for k in 1..500 {
        let kf = k as f64;
        term *= -x2 / ((2.0 * kf + nf) * (2.0 * kf + nf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum / PI
}

/// `g_n(x)` with the series used wherever the recurrence loses accuracy:
/// each step of the recurrence multiplies errors by `n(n-1)/x²`, so the
/// series takes over for `|x| < 2 + √(n(n-1))`.
pub fn mu1_nfold_pdf(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    if x.abs() < 2.0 + (nf * (nf - 1.0)).sqrt() {
        mu1_nfold_series(n, x)
    } else {
        recurrence(n, x)
    }
}

/// `g_n(x) = (1/π) ∫_0^1 cos(tx)(1-t)^n dt` by adaptive quadrature.
pub fn mu1_nfold_pdf_quadrature(n: u32, x: f64) -> Result<f64> {
    // one panel per half period keeps the oscillation resolved
    let panels = ((x.abs() / PI).ceil() as usize).clamp(1, 10_000);
    let pts: Vec<f64> = (0..=panels).map(|i| i as f64 / panels as f64).collect();
    let v = Quadrature::with_abs_tol(1e-12)
        .integrate_breaks(|t| (t * x).cos() * (1.0 - t).powi(n as i32), &pts)?;
    Ok(v / PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransienceSum {
    /// `x^α(2 - x^{-α})`.
    pub closed: f64,
    /// `Σ_{n ≤ terms} P(|X̃_n| ≤ x)`.
    pub partial: f64,
    pub terms: u32,
    /// Exact value of the omitted tail.
    pub remainder: f64,
}

/// `Σ_{n≥1} P(|X̃_n| ≤ x)` for the weak walk from `δ̃_1`, in closed form and
/// as a partial sum of the n-step CDFs with its tail.
pub fn transience_sum(alpha: f64, x: f64, terms: u32) -> Result<TransienceSum> {
    check_alpha(alpha)?;
    check_min("terms", terms, 1)?;
    if x.is_nan() {
        return Err(Error::domain("x is NaN"));
    }
    if x < 1.0 {
        return Ok(TransienceSum {
            closed: 0.0,
            partial: 0.0,
            terms,
            remainder: 0.0,
        });
    }
    let y = x.powf(-alpha);
    let q = 1.0 - y;
    let closed = (2.0 - y) / y;
    let mut partial = 0.0;
    for n in 1..=terms {
        partial += nstep_delta1_cdf(n, alpha, x)?;
    }
    // Σ_{m ≥ N} (1 + m y) q^m = q^N/y + q^N (N + q/y)
    let qn = q.powi(terms as i32);
    let remainder = if qn == 0.0 {
        0.0
    } else {
        qn / y + qn * (terms as f64 + q / y)
    };
    Ok(TransienceSum {
        closed,
        partial,
        terms,
        remainder,
    })
}

/// `P(|X̃_n|^α > n^{r+1}/ln n) = 1 - (1 + (n-1)ε)(1 - ε)_+^{n-1}`,
/// `ε = n^{-r-1} ln n`; evaluated without cancellation.
pub fn envelope_prob(n: u64, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("n must be at least 2, got {n}")));
    }
    if !(r > 0.5) || !r.is_finite() {
        return Err(Error::param("r", r, "must exceed 1/2"));
    }
    let nf = n as f64;
    let eps = nf.ln() * (-(r + 1.0) * nf.ln()).exp();
    if eps >= 1.0 {
        return Ok(1.0);
    }
    let m = nf - 1.0;
    Ok(-((m * eps).ln_1p() + m * (-eps).ln_1p()).exp_m1())
}

/// `n^{-2r} (ln n)²`.
pub fn envelope_asymptote(n: u64, r: f64) -> f64 {
    let l = (n as f64).ln();
    (-2.0 * r * l).exp() * l * l
}

/// `∫_1^∞ x^{-2r}(ln x)² dx = 2/(2r-1)³`.
pub fn envelope_series_integral(r: f64) -> Result<f64> {
    if !(r > 0.5) {
        return Err(Error::param("r", r, "must exceed 1/2"));
    }
    Ok(2.0 / (2.0 * r - 1.0).powi(3))
}

/// `P(|X̃_n|^α ≥ t)` for the weak walk from `δ̃_1`, `n ≥ 2`.
pub fn tail_prob_alpha_power(n: u32, t: f64) -> Result<f64> {
    check_min("n", n, 2)?;
    if t.is_nan() {
        return Err(Error::domain("t is NaN"));
    }
    if t <= 1.0 {
        return Ok(1.0);
    }
    // |X̃_n|^α has CDF (1 + (n-1)/t)(1 - 1/t)^{n-1}; continuous for n ≥ 2
    let y = 1.0 / t;
    let nf = n as f64;
    let below = (1.0 + (nf - 1.0) * y) * (1.0 - y).powi(n as i32 - 1);
    Ok(1.0 - below)
}

/// Reference expressions for the `k = 2` increment law that fail the
/// numerical-integration oracle. They are kept only so the disagreement
/// stays visible in tests; nothing else calls them.
pub mod unvalidated {
    /// Candidate `P(X_3 - X_2 < w, X_2 < z)`, `w > 0`, `z > 1`.
    pub fn increment_joint_cdf_k2(w: f64, z: f64) -> f64 {
        let log_term = ((w + z) / (z * (1.0 + w))).powi(2).ln();
        let frac = w * (z - 1.0) / (z * (w + z) * (1.0 + w)) * (z - (w + z) * (1.0 + w));
        1.0 - 1.0 / (3.0 * z * z) * (1.0 + 2.0 / z) - 2.0 / w.powi(3) * (log_term + frac)
    }

    /// Candidate `P(X_3 - X_2 < w)`, `w > 0`.
    pub fn increment_cdf_k2(w: f64) -> f64 {
        2.0 / 3.0
            - 2.0
                * (1.0 / (w * w) - w / (1.0 + w) + 3.0 / (w * w * (1.0 + w).powi(2))
                    - (1.0 + w).powi(2).ln() / w.powi(3))
    }
}
