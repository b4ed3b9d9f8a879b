//! Generalized convolution kernels `δ_a ⋄ δ_b` and convolution of laws.
//!
//! Measure-level convolution is available by sampling
//! ([`convolve_sample`]), exactly for purely atomic laws
//! ([`convolve_atomic`]), and in the transform domain through
//! [`crate::williamson`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{sample_pareto, Distribution};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConvolutionKind {
    Kendall { alpha: f64 },
    /// Real-line Kendall kernel built from symmetrized atoms.
    WeakKendall { alpha: f64 },
    Max,
    /// `δ_a ⋄ δ_b = δ_c` with `c^α = a^α + b^α`.
    AlphaConv { alpha: f64 },
    /// `½δ_{a+b} + ½δ_{|a-b|}`.
    Symmetric,
}

impl ConvolutionKind {
    pub fn kendall(alpha: f64) -> Result<Self> {
        Self::Kendall { alpha }.validated()
    }

    pub fn weak_kendall(alpha: f64) -> Result<Self> {
        Self::WeakKendall { alpha }.validated()
    }

    pub fn alpha_conv(alpha: f64) -> Result<Self> {
        Self::AlphaConv { alpha }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Kendall { alpha } | Self::AlphaConv { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(Error::param("alpha", alpha, "must be finite and positive"));
                }
            }
            Self::WeakKendall { alpha } => {
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(Error::param("alpha", alpha, "must lie in (0, 1]"));
                }
            }
            Self::Max | Self::Symmetric => {}
        }
        Ok(self)
    }

    /// Whether the kernel acts on the whole real line.
    pub fn is_real_line(&self) -> bool {
        matches!(self, Self::WeakKendall { .. })
    }
}

/// `(1 - z^α)·atom + z^α·T_v π_{2α}`, or its symmetrization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelMixture {
    pub atom_weight: f64,
    /// `v`; the symmetric variant puts half the atom weight at each of `±v`.
    pub atom_location: f64,
    pub pareto_weight: f64,
    pub pareto_scale: f64,
    pub pareto_order: f64,
    pub symmetric: bool,
}

impl KernelMixture {
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let x = if rng.uniform() < self.pareto_weight {
            self.pareto_scale * sample_pareto(self.pareto_order, rng)
        } else {
            self.atom_location
        };
        if self.symmetric {
            rng.sign() * x
        } else {
            x
        }
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        let (atom, pareto) = if self.symmetric {
            (
                Distribution::sym_dirac(self.atom_location)?,
                Distribution::sym_pareto(self.pareto_order)?.scaled(self.pareto_scale)?,
            )
        } else {
            (
                Distribution::dirac(self.atom_location)?,
                Distribution::pareto(self.pareto_order)?.scaled(self.pareto_scale)?,
            )
        };
        if self.pareto_weight == 0.0 {
            return Ok(atom);
        }
        if self.atom_weight == 0.0 {
            return Ok(pareto);
        }
        Distribution::mixture(vec![(self.atom_weight, atom), (self.pareto_weight, pareto)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelLaw {
    Atom(f64),
    /// Equal-weight atoms.
    TwoAtoms(f64, f64),
    Mixture(KernelMixture),
}

impl KernelLaw {
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        match self {
            Self::Atom(x) => *x,
            Self::TwoAtoms(a, b) => {
                if rng.uniform() < 0.5 {
                    *a
                } else {
                    *b
                }
            }
            Self::Mixture(m) => m.sample(rng),
        }
    }

    pub fn to_distribution(&self) -> Result<Distribution> {
        match self {
            Self::Atom(x) => Distribution::dirac(*x),
            Self::TwoAtoms(a, b) => Distribution::mixture(vec![
                (0.5, Distribution::dirac(*a)?),
                (0.5, Distribution::dirac(*b)?),
            ]),
            Self::Mixture(m) => m.to_distribution(),
        }
    }

    /// Pushforward by `x ↦ c·x`; `c = 0` gives `δ_0`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::param("c", c, "must be finite"));
        }
        if c == 0.0 {
            return Ok(Self::Atom(0.0));
        }
        Ok(match *self {
            Self::Atom(x) => Self::Atom(c * x),
            Self::TwoAtoms(a, b) => Self::TwoAtoms(c * a, c * b),
            Self::Mixture(m) => {
                if c < 0.0 && !m.symmetric {
                    return Err(Error::domain(
                        "negative scaling leaves the half-line kernel family",
                    ));
                }
                let k = c.abs();
                Self::Mixture(KernelMixture {
                    atom_location: k * m.atom_location,
                    pareto_scale: k * m.pareto_scale,
                    ..m
                })
            }
        })
    }

    /// Modified Williamson transform of order `alpha` of the law of `|X|`.
    pub fn williamson(&self, alpha: f64, t: f64) -> Result<f64> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::param("alpha", alpha, "must be finite and positive"));
        }
        if t.is_nan() || t < 0.0 {
            return Err(Error::domain(format!("transform argument must be >= 0, got {t}")));
        }
        let h = |x: f64| (1.0 - (t * x.abs()).powf(alpha)).max(0.0);
        Ok(match self {
            Self::Atom(x) => h(*x),
            Self::TwoAtoms(a, b) => 0.5 * (h(*a) + h(*b)),
            Self::Mixture(m) => {
                let dirac = h(m.atom_location);
                // T_v π_{2α} has transform (1 - (tv)^α)_+²; other orders go
                // through the generic route
                let pareto = if (m.pareto_order - 2.0 * alpha).abs() < 1e-15 * alpha {
                    h(m.pareto_scale).powi(2)
                } else {
                    crate::williamson::phi(
                        &Distribution::pareto(m.pareto_order)?.scaled(m.pareto_scale)?,
                        alpha,
                        t,
                    )?
                };
                m.atom_weight * dirac + m.pareto_weight * pareto
            }
        })
    }
}

/// The law `δ_a ⋄ δ_b` for the given kernel.
pub fn kernel(kind: ConvolutionKind, a: f64, b: f64) -> Result<KernelLaw> {
    let kind = kind.validated()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!("kernel needs finite inputs, got {a}, {b}")));
    }
    if !kind.is_real_line() && (a < 0.0 || b < 0.0) {
        return Err(Error::domain(format!(
            "kernel {kind:?} acts on [0, ∞), got {a}, {b}"
        )));
    }
    let (lo, hi) = {
        let (x, y) = (a.abs(), b.abs());
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    };
    Ok(match kind {
        ConvolutionKind::Max => KernelLaw::Atom(hi),
        ConvolutionKind::AlphaConv { alpha } => {
            if hi == 0.0 {
                KernelLaw::Atom(0.0)
            } else {
                // hi·(1 + (lo/hi)^α)^{1/α} avoids overflow of a^α + b^α
                KernelLaw::Atom(hi * (1.0 + (lo / hi).powf(alpha)).powf(1.0 / alpha))
            }
        }
        ConvolutionKind::Symmetric => {
            if lo == 0.0 {
                KernelLaw::Atom(hi)
            } else {
                KernelLaw::TwoAtoms(hi - lo, hi + lo)
            }
        }
        ConvolutionKind::Kendall { alpha } | ConvolutionKind::WeakKendall { alpha } => {
            if hi == 0.0 {
                return Ok(KernelLaw::Atom(0.0));
            }
            let zpow = if lo == hi { 1.0 } else { (lo / hi).powf(alpha) };
            KernelLaw::Mixture(KernelMixture {
                atom_weight: 1.0 - zpow,
                atom_location: hi,
                pareto_weight: zpow,
                pareto_scale: hi,
                pareto_order: 2.0 * alpha,
                symmetric: kind.is_real_line(),
            })
        }
    })
}

/// Draws `x ~ λ1`, `y ~ λ2` and then a point of `δ_x ⋄ δ_y`.
pub fn convolve_sample(
    kind: ConvolutionKind,
    l1: &Distribution,
    l2: &Distribution,
    rng: &mut RngStream,
) -> Result<f64> {
    let x = l1.sample(rng);
    let y = l2.sample(rng);
    Ok(kernel(kind, x, y)?.sample(rng))
}

/// Exact `λ1 ⋄ λ2` for laws made only of atoms.
pub fn convolve_atomic(
    kind: ConvolutionKind,
    l1: &Distribution,
    l2: &Distribution,
) -> Result<Distribution> {
    let (a1, a2) = (l1.atoms(), l2.atoms());
    let total = |atoms: &[(f64, f64)]| atoms.iter().map(|(_, w)| w).sum::<f64>();
    if (total(&a1) - 1.0).abs() > 1e-12 || (total(&a2) - 1.0).abs() > 1e-12 {
        return Err(Error::domain("convolve_atomic needs purely atomic laws"));
    }
    let mut parts = Vec::with_capacity(a1.len() * a2.len());
    for &(x, wx) in &a1 {
        for &(y, wy) in &a2 {
            parts.push((wx * wy, kernel(kind, x, y)?.to_distribution()?));
        }
    }
    renormalized_mixture(parts)
}

/// Builds a mixture, absorbing rounding drift in the weights.
pub(crate) fn renormalized_mixture(mut parts: Vec<(f64, Distribution)>) -> Result<Distribution> {
    if parts.len() == 1 {
        return Ok(parts.pop().expect("one part").1);
    }
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    for p in &mut parts {
        p.0 /= total;
    }
    Distribution::mixture(parts)
}

/// `T_c λ`, the pushforward of a law by `x ↦ c·x`.
pub fn scale(law: &Distribution, c: f64) -> Result<Distribution> {
    law.scaled(c)
}
