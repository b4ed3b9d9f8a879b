//! Textual distribution specs.
//!
//! ```text
//! dirac:<a>  pareto:<s>  sympareto:<s>  symdirac:<a>
//! beta:<a>,<b>  gamma:<shape>,<rate>  uniform  mu:<alpha>
//! mix:<w1>*<spec1>+<w2>*<spec2>+...
//! ```
//!
//! Mixtures do not nest. Printing uses Rust's shortest round-trip float
//! formatting, so canonical forms survive parse → print → parse unchanged.

use std::fmt;
use std::str::FromStr;

use crate::measures::{DistKind, Distribution, WEIGHT_TOLERANCE};
use crate::{Error, Result};

/// Mixture weights may miss 1 by this much before the spec is rejected.
pub const SPEC_WEIGHT_TOLERANCE: f64 = 1e-9;

const KINDS: &str = "dirac, pareto, sympareto, symdirac, beta, gamma, uniform, mu, mix";

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.err(format!("expected '{token}'"))
        }
    }

    /// `[+-]? digits [. digits] [(e|E) [+-]? digits]`, also `.5` and `5.`.
    fn number(&mut self) -> Result<f64> {
        let bytes = self.rest().as_bytes();
        let mut i = 0;
        if matches!(bytes.first(), Some(b'+' | b'-')) {
            i += 1;
        }
        let int_start = i;
        while bytes.get(i).is_some_and(u8::is_ascii_digit) {
            i += 1;
        }
        let mut digits = i - int_start;
        if bytes.get(i) == Some(&b'.') {
            i += 1;
            let frac_start = i;
            while bytes.get(i).is_some_and(u8::is_ascii_digit) {
                i += 1;
            }
            digits += i - frac_start;
        }
        if digits == 0 {
            return self.err("expected a number");
        }
        if matches!(bytes.get(i), Some(b'e' | b'E')) {
            let mut j = i + 1;
            if matches!(bytes.get(j), Some(b'+' | b'-')) {
                j += 1;
            }
            let exp_start = j;
            while bytes.get(j).is_some_and(u8::is_ascii_digit) {
                j += 1;
            }
            if j == exp_start {
                self.pos += j;
                return self.err("malformed exponent");
            }
            i = j;
        }
        let token = &self.rest()[..i];
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => {
                self.pos += i;
                Ok(v)
            }
            _ => self.err(format!("number {token:?} out of range")),
        }
    }

    fn param<T>(&self, start: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| Error::Parse {
            offset: start,
            message: e.to_string(),
        })
    }

    fn simple(&mut self) -> Result<Distribution> {
        let start = self.pos;
        if self.eat("uniform") {
            return Ok(Distribution::uniform01());
        }
        let name_len = self.rest().find(':').unwrap_or(self.rest().len());
        let name = &self.rest()[..name_len];
        let unary: Option<fn(f64) -> Result<Distribution>> = match name {
            "dirac" => Some(Distribution::dirac),
            "pareto" => Some(Distribution::pareto),
            "sympareto" => Some(Distribution::sym_pareto),
            "symdirac" => Some(Distribution::sym_dirac),
            "mu" => Some(Distribution::mu_alpha),
            _ => None,
        };
        let binary: Option<fn(f64, f64) -> Result<Distribution>> = match name {
            "beta" => Some(Distribution::beta),
            "gamma" => Some(Distribution::gamma),
            _ => None,
        };
        if unary.is_none() && binary.is_none() {
            if name == "mix" {
                return self.err("mixtures cannot be nested");
            }
            return self.err(format!("unknown distribution; expected one of {KINDS}"));
        }
        self.pos += name_len;
        self.expect(":")?;
        let first = self.number()?;
        let made = if let Some(f) = unary {
            f(first)
        } else {
            self.expect(",")?;
            let second = self.number()?;
            binary.expect("binary kind")(first, second)
        };
        self.param(start, made)
    }

    fn spec(&mut self) -> Result<Distribution> {
        if !self.eat("mix:") {
            return self.simple();
        }
        let mut parts = Vec::new();
        loop {
            let w_start = self.pos;
            let w = self.number()?;
            if w < 0.0 {
                self.pos = w_start;
                return self.err("mixture weights must be nonnegative");
            }
            self.expect("*")?;
            parts.push((w, self.simple()?));
            if !self.eat("+") {
                break;
            }
        }
        let total: f64 = parts.iter().map(|p| p.0).sum();
        if (total - 1.0).abs() > SPEC_WEIGHT_TOLERANCE {
            return self.err(format!("mixture weights sum to {total}, not 1"));
        }
        // tiny drift is absorbed; exact canonical weights are kept as written
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            for p in &mut parts {
                p.0 /= total;
            }
        }
        let end = self.pos;
        self.param(end, Distribution::mixture(parts))
    }
}

/// Parses a distribution spec.
pub fn parse_dist(text: &str) -> Result<Distribution> {
    let lead = text.len() - text.trim_start().len();
    let body = text.trim_end();
    if body.trim_start().is_empty() {
        return Err(Error::Parse {
            offset: 0,
            message: format!("empty spec; expected one of {KINDS}"),
        });
    }
    let mut p = Parser { text: body, pos: lead };
    let d = p.spec()?;
    if p.pos != body.len() {
        return p.err("unexpected trailing input");
    }
    Ok(d)
}

fn simple_spec(d: &Distribution) -> Option<String> {
    Some(match d.kind() {
        DistKind::Dirac { location } => format!("dirac:{location}"),
        DistKind::Pareto { order } => format!("pareto:{order}"),
        DistKind::SymPareto { order } => format!("sympareto:{order}"),
        DistKind::Beta { a, b } => format!("beta:{a},{b}"),
        DistKind::Gamma { shape, rate } => format!("gamma:{shape},{rate}"),
        DistKind::Uniform01 => "uniform".to_string(),
        DistKind::MuAlpha { alpha } => format!("mu:{alpha}"),
        DistKind::Mixture(_) | DistKind::Scaled { .. } | DistKind::Folded(_) => return None,
    })
}

/// Canonical spec, or `None` for laws outside the grammar (scaled, folded or
/// nested mixtures).
pub fn to_spec(d: &Distribution) -> Option<String> {
    if let DistKind::Mixture(cs) = d.kind() {
        let parts: Option<Vec<String>> = cs
            .iter()
            .map(|c| simple_spec(&c.dist).map(|s| format!("{}*{s}", c.weight)))
            .collect();
        return parts.map(|p| format!("mix:{}", p.join("+")));
    }
    simple_spec(d)
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match to_spec(self) {
            Some(s) => f.write_str(&s),
            None => write!(f, "{:?}", self.kind()),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_dist(s)
    }
}
