//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Intervals are bisected in order of decreasing error estimate until the
//! summed estimate meets the tolerance. Known kinks are passed as break
//! points so that no panel straddles them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();

    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        lo,
        hi,
        value,
        error,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-13,
            max_panels: 4000,
        }
    }
}

impl Quadrature {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    /// Integral over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.integrate_breaks(f, &[a, b])
    }

    /// Integral over `[points[0], points[last]]` with panel edges at every
    /// listed point. Points outside the outer range are ignored.
    pub fn integrate_breaks<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<f64> {
        self.estimate_breaks(f, points).map(|e| e.value)
    }

    pub fn estimate_breaks<F: Fn(f64) -> f64>(&self, f: F, points: &[f64]) -> Result<Estimate> {
        assert!(points.len() >= 2, "need at least two points");
        let (a, b) = (points[0], points[points.len() - 1]);
        if a == b {
            return Ok(Estimate {
                value: 0.0,
                abs_error: 0.0,
            });
        }
        let sign = if b < a { -1.0 } else { 1.0 };
        let (lo, hi) = if b < a { (b, a) } else { (a, b) };
        let mut edges: Vec<f64> = points
            .iter()
            .copied()
            .filter(|p| *p > lo && *p < hi)
            .collect();
        edges.push(lo);
        edges.push(hi);
        edges.sort_by(f64::total_cmp);
        edges.dedup();

        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        for w in edges.windows(2) {
            let p = kronrod15(&f, w[0], w[1]);
            total += p.value;
            total_err += p.error;
            heap.push(p);
        }

        loop {
            let tol = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= tol {
                break;
            }
            if !total.is_finite() || heap.len() >= self.max_panels {
                return Err(Error::Quadrature {
                    lower: a,
                    upper: b,
                    estimate: total,
                    error: total_err,
                });
            }
            let worst = heap.pop().expect("heap is nonempty");
            let mid = 0.5 * (worst.lo + worst.hi);
            if mid <= worst.lo || mid >= worst.hi {
                // panel at machine resolution; nothing more to gain
                return Err(Error::Quadrature {
                    lower: a,
                    upper: b,
                    estimate: total,
                    error: total_err,
                });
            }
            let left = kronrod15(&f, worst.lo, mid);
            let right = kronrod15(&f, mid, worst.hi);
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
        // re-sum to shed accumulated cancellation from the running updates
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let abs_error: f64 = heap.iter().map(|p| p.error).sum();
        Ok(Estimate {
            value: sign * value,
            abs_error,
        })
    }

    /// Integral over `[a, ∞)` for `a > 0`, via `x = a·u^{-1/p}`.
    ///
    /// `tail_exponent` is the `p` in an integrand decaying like `x^{-p-1}`;
    /// with it the transformed integrand stays bounded at `u = 0`.
    pub fn integrate_tail<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        tail_exponent: f64,
    ) -> Result<f64> {
        self.integrate_tail_breaks(f, a, tail_exponent, &[])
    }

    /// As [`Quadrature::integrate_tail`], with break points given in `x`.
    pub fn integrate_tail_breaks<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        tail_exponent: f64,
        breaks: &[f64],
    ) -> Result<f64> {
        if !(a > 0.0) {
            return Err(Error::domain("tail integral needs a positive lower limit"));
        }
        if !(tail_exponent > 0.0) {
            return Err(Error::param(
                "tail_exponent",
                tail_exponent,
                "must be positive",
            ));
        }
        let p = tail_exponent;
        let g = |u: f64| {
            let x = a * u.powf(-1.0 / p);
            if !x.is_finite() {
                return 0.0;
            }
            f(x) * (a / p) * u.powf(-1.0 / p - 1.0)
        };
        let mut pts = vec![0.0, 1.0];
        pts.extend(
            breaks
                .iter()
                .filter(|&&x| x > a)
                .map(|&x| (a / x).powf(p)),
        );
        pts.sort_by(f64::total_cmp);
        self.integrate_breaks(g, &pts)
    }
}
