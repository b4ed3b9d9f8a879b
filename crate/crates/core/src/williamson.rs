//! The modified Williamson transform `Φ_ν(t) = ∫(1 - (ts)^α)_+ ν(ds)` and
//! the n-step laws obtained by inverting `Φ_ν^n`.
//!
//! Writing `M(x) = ∫_0^x s^α ν(ds)` the transform is
//! `Φ(t) = F(1/t) - t^α M(1/t)` and its derivative is
//! `Φ'(t) = -α t^{α-1} M(1/t)`, so the n-step CDF
//! `F_n(x) = Φ^n(1/x) - (Φ^n)'(1/x) / (α x)` needs no numerical
//! differentiation.

use crate::error::{Error, Result};
use crate::measures::Distribution;
use crate::quadrature::Quadrature;

/// Overshoot beyond `[0, 1]` that is clamped silently.
const CLAMP_SLACK: f64 = 1e-9;

fn check_source(nu: &Distribution, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::param("alpha", alpha, "must be finite and positive"));
    }
    if !nu.support().is_nonnegative() {
        return Err(Error::domain(
            "Williamson transform needs a law on [0, ∞); push forward by |·| first",
        ));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain(format!("transform argument must be >= 0, got {t}")));
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(format!("n-step law needs x > 0, got {x}")));
    }
    Ok(())
}

fn check_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", 0.0, "must be at least 1"));
    }
    Ok(())
}

fn clamp_probability(v: f64, what: &str) -> f64 {
    if v > 1.0 + CLAMP_SLACK || v < -CLAMP_SLACK {
        log::warn!("{what} = {v} outside [0, 1]; clamping");
    }
    v.clamp(0.0, 1.0)
}

/// `Φ_ν(t)` through the truncated α-moment.
pub fn phi(nu: &Distribution, alpha: f64, t: f64) -> Result<f64> {
    check_source(nu, alpha)?;
    check_t(t)?;
    phi_unchecked(nu, alpha, t)
}

fn phi_unchecked(nu: &Distribution, alpha: f64, t: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(1.0);
    }
    if t.is_infinite() {
        return Ok(nu.atom_mass(0.0));
    }
    let x = 1.0 / t;
    let m = nu.truncated_alpha_moment(x, alpha)?;
    Ok((nu.cdf(x) - t.powf(alpha) * m).clamp(0.0, 1.0))
}

/// `Φ_ν(t)` by direct quadrature of `(1 - (ts)^α)_+` with the kink at
/// `s = 1/t` as a panel boundary. Independent of the truncated-moment
/// closed forms; used as an oracle.
pub fn phi_quadrature(nu: &Distribution, alpha: f64, t: f64) -> Result<f64> {
    check_source(nu, alpha)?;
    check_t(t)?;
    if t == 0.0 {
        return Ok(1.0);
    }
    let kink = 1.0 / t;
    let weight = |s: f64| (1.0 - (t * s).powf(alpha)).max(0.0);
    let atoms: f64 = nu
        .atoms()
        .iter()
        .filter(|(s, _)| *s < kink)
        .map(|(s, w)| w * weight(*s))
        .sum();
    let mut pts = vec![0.0, kink];
    let sup = nu.support();
    for b in [sup.lower, sup.upper, 1.0] {
        if b > 0.0 && b < kink {
            pts.push(b);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let body = Quadrature::default().integrate_breaks(|s| weight(s) * nu.density(s), &pts)?;
    Ok(atoms + body)
}

/// `Φ_ν'(t) = -α t^{α-1} M(1/t)` for `t > 0`.
pub fn phi_derivative(nu: &Distribution, alpha: f64, t: f64) -> Result<f64> {
    check_source(nu, alpha)?;
    if t.is_nan() || t <= 0.0 {
        return Err(Error::domain(format!("derivative needs t > 0, got {t}")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let m = nu.truncated_alpha_moment(1.0 / t, alpha)?;
    Ok(-alpha * t.powf(alpha - 1.0) * m)
}

/// The pieces `G = Φ(1/x)`, `K = x^{-α} M(x)` and the atom mass at `x`.
struct Pieces {
    g: f64,
    k: f64,
    atom: f64,
}

fn pieces(nu: &Distribution, alpha: f64, x: f64) -> Result<Pieces> {
    let m = nu.truncated_alpha_moment(x, alpha)?;
    let k = x.powf(-alpha) * m;
    let g = (nu.cdf(x) - k).clamp(0.0, 1.0);
    Ok(Pieces {
        g,
        k,
        atom: nu.atom_mass(x),
    })
}

fn nstep_from_pieces(n: u32, g: f64, k: f64) -> f64 {
    let nf = n as f64;
    g.powi(n as i32) + nf * g.powi(n as i32 - 1) * k
}

/// Right-continuous CDF of the n-step law `λ_{0,n,α}(ν)` at `x > 0`:
/// `F_n(x) = G^n + n G^{n-1} K`.
pub fn nstep_cdf(nu: &Distribution, alpha: f64, n: u32, x: f64) -> Result<f64> {
    check_source(nu, alpha)?;
    check_n(n)?;
    check_x(x)?;
    if x.is_infinite() {
        return Ok(1.0);
    }
    let p = pieces(nu, alpha, x)?;
    Ok(clamp_probability(nstep_from_pieces(n, p.g, p.k), "n-step cdf"))
}

/// Left limit `P(X_n < x)`. Only `K` jumps: an atom `w` at `x` adds `w` to it.
pub fn nstep_cdf_left(nu: &Distribution, alpha: f64, n: u32, x: f64) -> Result<f64> {
    check_source(nu, alpha)?;
    check_n(n)?;
    check_x(x)?;
    if x.is_infinite() {
        return Ok(1.0);
    }
    let p = pieces(nu, alpha, x)?;
    let k = (p.k - p.atom).max(0.0);
    Ok(clamp_probability(nstep_from_pieces(n, p.g, k), "n-step cdf"))
}

/// Mass of the n-step law at `x`.
pub fn nstep_atom(nu: &Distribution, alpha: f64, n: u32, x: f64) -> Result<f64> {
    Ok(nstep_cdf(nu, alpha, n, x)? - nstep_cdf_left(nu, alpha, n, x)?)
}

/// Density of the absolutely continuous part of the n-step law:
/// `n G^{n-1} f(x) + α n(n-1) G^{n-2} K² / x`.
pub fn nstep_pdf(nu: &Distribution, alpha: f64, n: u32, x: f64) -> Result<f64> {
    check_source(nu, alpha)?;
    check_n(n)?;
    check_x(x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    let p = pieces(nu, alpha, x)?;
    let nf = n as f64;
    let mut v = nf * p.g.powi(n as i32 - 1) * nu.density(x);
    if n >= 2 {
        v += alpha * nf * (nf - 1.0) * p.g.powi(n as i32 - 2) * p.k * p.k / x;
    }
    Ok(v)
}

/// `Φ_ν^n` for fixed `ν` and `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonTransform {
    source: Distribution,
    alpha: f64,
    power: u32,
}

impl WilliamsonTransform {
    pub fn new(source: Distribution, alpha: f64, power: u32) -> Result<Self> {
        check_source(&source, alpha)?;
        check_n(power)?;
        Ok(Self {
            source,
            alpha,
            power,
        })
    }

    pub fn source(&self) -> &Distribution {
        &self.source
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    /// The transform of the `k`-fold Kendall power: `(Φ^n)^k`.
    pub fn pow(&self, k: u32) -> Result<Self> {
        check_n(k)?;
        let power = self
            .power
            .checked_mul(k)
            .ok_or_else(|| Error::domain("power overflows u32"))?;
        Ok(Self {
            power,
            ..self.clone()
        })
    }

    /// Product of transforms of the same source: powers add.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.source != other.source || self.alpha != other.alpha {
            return Err(Error::domain(
                "compose needs transforms of the same source and order",
            ));
        }
        let power = self
            .power
            .checked_add(other.power)
            .ok_or_else(|| Error::domain("power overflows u32"))?;
        Ok(Self {
            power,
            ..self.clone()
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        check_t(t)?;
        Ok(phi_unchecked(&self.source, self.alpha, t)?.powi(self.power as i32))
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        let base = phi_unchecked(&self.source, self.alpha, t)?;
        let d = phi_derivative(&self.source, self.alpha, t)?;
        Ok(self.power as f64 * base.powi(self.power as i32 - 1) * d)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        nstep_cdf(&self.source, self.alpha, self.power, x)
    }

    pub fn cdf_left(&self, x: f64) -> Result<f64> {
        nstep_cdf_left(&self.source, self.alpha, self.power, x)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        nstep_pdf(&self.source, self.alpha, self.power, x)
    }
}

/// A candidate Williamson transform `t ↦ Φ(t)`, optionally with its
/// derivative.
pub trait TransformFn {
    fn value(&self, t: f64) -> f64;

    fn derivative(&self, _t: f64) -> Option<f64> {
        None
    }
}

impl<F: Fn(f64) -> f64> TransformFn for F {
    fn value(&self, t: f64) -> f64 {
        self(t)
    }
}

impl TransformFn for WilliamsonTransform {
    fn value(&self, t: f64) -> f64 {
        self.eval(t).unwrap_or(f64::NAN)
    }

    fn derivative(&self, t: f64) -> Option<f64> {
        WilliamsonTransform::derivative(self, t).ok()
    }
}

/// A transform paired with an analytic derivative.
pub struct Differentiable<F, D> {
    pub value: F,
    pub derivative: D,
}

impl<F: Fn(f64) -> f64, D: Fn(f64) -> f64> TransformFn for Differentiable<F, D> {
    fn value(&self, t: f64) -> f64 {
        (self.value)(t)
    }

    fn derivative(&self, t: f64) -> Option<f64> {
        Some((self.derivative)(t))
    }
}

/// Recovers `F(x)` from a transform of order `α`:
/// `F(x) = Φ(1/x) + α^{-1} x d/dx[Φ(1/x)]`.
///
/// Uses the registered derivative when there is one; otherwise a
/// Richardson-extrapolated central difference of `x ↦ Φ(1/x)`.
pub fn invert_transform<T: TransformFn + ?Sized>(phi: &T, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::param("alpha", alpha, "must be finite and positive"));
    }
    check_x(x)?;
    probe_monotone(phi, x)?;
    let t = 1.0 / x;
    let g = |y: f64| phi.value(1.0 / y);
    let dg = match phi.derivative(t) {
        // d/dx Φ(1/x) = -Φ'(1/x) / x²
        Some(d) => -d * t * t,
        None => {
            let h = (1e-6 * x).max(1e-9).min(0.25 * x);
            let central = |h: f64| (g(x + h) - g(x - h)) / (2.0 * h);
            (4.0 * central(0.5 * h) - central(h)) / 3.0
        }
    };
    let v = g(x) + x * dg / alpha;
    if !v.is_finite() {
        return Err(Error::InvalidTransform(format!(
            "inversion at x = {x} produced {v}"
        )));
    }
    Ok(clamp_probability(v, "inverted cdf"))
}

fn probe_monotone<T: TransformFn + ?Sized>(phi: &T, x: f64) -> Result<()> {
    let at0 = phi.value(0.0);
    if (at0 - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidTransform(format!("Φ(0) = {at0}, expected 1")));
    }
    let mut prev = at0;
    for k in -12..=12 {
        let t = (1.0 / x) * 2f64.powi(k);
        let v = phi.value(t);
        if !v.is_finite() || !(-1e-12..=1.0 + 1e-12).contains(&v) {
            return Err(Error::InvalidTransform(format!("Φ({t}) = {v} not in [0, 1]")));
        }
        if v > prev + 1e-12 {
            return Err(Error::InvalidTransform(format!(
                "Φ increases near t = {t}: {prev} -> {v}"
            )));
        }
        prev = v;
    }
    Ok(())
}
