//! Hölder exponent pairs.

use crate::error::{Error, Result};
use serde::Serialize;

/// The pair (p, p′) with 1/p + 1/p′ = 1.
///
/// `new` only accepts 1 < p < ∞. The endpoints 1 and ∞ exist for the
/// closed-form operator norms and are built with [`PExponent::one`] and
/// [`PExponent::infinity`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PExponent {
    p: f64,
    conj: f64,
}

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::Exponent(format!("{p}")));
        }
        let conj = if p == 2.0 { 2.0 } else { p / (p - 1.0) };
        if !conj.is_finite() {
            return Err(Error::Exponent(format!("{p}")));
        }
        Ok(Self { p, conj })
    }

    pub fn one() -> Self {
        Self { p: 1.0, conj: f64::INFINITY }
    }

    pub fn infinity() -> Self {
        Self { p: f64::INFINITY, conj: 1.0 }
    }

    pub fn two() -> Self {
        Self { p: 2.0, conj: 2.0 }
    }

    /// Accepts a real number in (1, ∞) or one of the oracle tokens `1`, `2`, `inf`.
    pub fn parse(token: &str) -> Result<Self> {
        match token.trim() {
            "1" => Ok(Self::one()),
            "inf" | "Inf" | "infinity" => Ok(Self::infinity()),
            t => {
                let p: f64 = t.parse().map_err(|_| Error::Exponent(t.to_string()))?;
                Self::new(p)
            }
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The conjugate index p′ as a number.
    pub fn q(&self) -> f64 {
        self.conj
    }

    pub fn conjugate(&self) -> Self {
        Self { p: self.conj, conj: self.p }
    }

    pub fn is_one(&self) -> bool {
        self.p == 1.0
    }

    pub fn is_inf(&self) -> bool {
        self.p.is_infinite()
    }

    pub fn is_two(&self) -> bool {
        self.p == 2.0
    }

    /// True for 1, 2 and ∞, where the operator norm has a closed form.
    pub fn has_closed_form(&self) -> bool {
        self.is_one() || self.is_two() || self.is_inf()
    }

    pub fn is_endpoint(&self) -> bool {
        self.is_one() || self.is_inf()
    }

    pub fn label(&self) -> String {
        if self.is_inf() {
            "inf".into()
        } else {
            format!("{}", self.p)
        }
    }
}

impl std::fmt::Display for PExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}
