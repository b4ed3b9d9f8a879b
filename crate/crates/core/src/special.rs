//! Special functions: regularized incomplete Beta/Gamma (backed by
//! `statrs`), the sine integral, and a few numerically careful helpers.

use std::f64::consts::{FRAC_PI_2, PI};

pub use statrs::function::gamma::ln_gamma;

/// Regularized incomplete Beta `I_x(a, b)`, clamped at the ends of `[0, 1]`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        statrs::function::beta::beta_reg(a, b, x)
    }
}

/// Lower regularized incomplete Gamma `P(a, x)`.
pub fn gamma_lr(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        statrs::function::gamma::gamma_lr(a, x)
    }
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `(1 - cos x) / x^2`, stable near zero.
pub fn one_minus_cos_over_sq(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        0.5 - x2 / 24.0 + x2 * x2 / 720.0
    } else {
        let s = (0.5 * x).sin();
        2.0 * s * s / (x * x)
    }
}

/// Sine integral `Si(x) = ∫_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    let t = x.abs();
    if t == 0.0 {
        return 0.0;
    }
    let value = if t <= 2.0 {
        // alternating power series, terms shrink fast for t ≤ 2
        let t2 = t * t;
        let mut term = t;
        let mut sum = t;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= -t2 / ((2.0 * k) * (2.0 * k + 1.0));
            let add = term / (2.0 * k + 1.0);
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        // modified Lentz on the continued fraction for E1(i t)
        const FPMIN: f64 = 1e-300;
        let mut b = (1.0, t);
        let mut c = (1.0 / FPMIN, 0.0);
        let mut d = cdiv((1.0, 0.0), b);
        let mut h = d;
        for i in 2..200 {
            let a = -((i - 1) as f64).powi(2);
            b.0 += 2.0;
            d = cdiv((1.0, 0.0), cadd(cscale(d, a), b));
            c = cadd(b, cdiv((a, 0.0), c));
            let del = cmul(c, d);
            h = cmul(h, del);
            if (del.0 - 1.0).abs() + del.1.abs() < 1e-16 {
                break;
            }
        }
        h = cmul(h, (t.cos(), -t.sin()));
        FRAC_PI_2 + h.1
    };
    value.copysign(x)
}

fn cadd(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}
fn cscale(a: (f64, f64), s: f64) -> (f64, f64) {
    (a.0 * s, a.1 * s)
}
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}
fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let den = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / den, (a.1 * b.0 - a.0 * b.1) / den)
}

/// CDF of the law with density `(1 - cos x) / (π x²)`.
pub fn mu1_cdf(x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    if x.is_infinite() {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let t = x.abs();
    // ∫_0^t (1 - cos u)/u² du = Si(t) - (1 - cos t)/t
    let half = (sine_integral(t) - t * one_minus_cos_over_sq(t)) / PI;
    if x > 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}
