//! Signed inequality slack and the verdict policy derived from it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::Tolerances;

/// Identifier of every relation the toolkit checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationId {
    #[serde(rename = "rs")]
    Rs,
    #[serde(rename = "eq3")]
    Eq3,
    #[serde(rename = "eq4a")]
    Eq4a,
    #[serde(rename = "eq4b")]
    Eq4b,
    #[serde(rename = "eq7-psd")]
    Eq7Psd,
    #[serde(rename = "eq8-schur")]
    Eq8Schur,
    #[serde(rename = "eq9a")]
    Eq9a,
    #[serde(rename = "eq9b")]
    Eq9b,
    #[serde(rename = "eq10")]
    Eq10,
    #[serde(rename = "furuichi")]
    Furuichi,
    #[serde(rename = "eq16")]
    Eq16,
    #[serde(rename = "eq17")]
    Eq17,
    #[serde(rename = "eq18")]
    Eq18,
    #[serde(rename = "eq19")]
    Eq19,
    #[serde(rename = "wy-strongest")]
    WyStrongest,
}

impl RelationId {
    pub const ALL: [RelationId; 15] = [
        RelationId::Rs,
        RelationId::Eq3,
        RelationId::Eq4a,
        RelationId::Eq4b,
        RelationId::Eq7Psd,
        RelationId::Eq8Schur,
        RelationId::Eq9a,
        RelationId::Eq9b,
        RelationId::Eq10,
        RelationId::Furuichi,
        RelationId::Eq16,
        RelationId::Eq17,
        RelationId::Eq18,
        RelationId::Eq19,
        RelationId::WyStrongest,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::Rs => "rs",
            RelationId::Eq3 => "eq3",
            RelationId::Eq4a => "eq4a",
            RelationId::Eq4b => "eq4b",
            RelationId::Eq7Psd => "eq7-psd",
            RelationId::Eq8Schur => "eq8-schur",
            RelationId::Eq9a => "eq9a",
            RelationId::Eq9b => "eq9b",
            RelationId::Eq10 => "eq10",
            RelationId::Furuichi => "furuichi",
            RelationId::Eq16 => "eq16",
            RelationId::Eq17 => "eq17",
            RelationId::Eq18 => "eq18",
            RelationId::Eq19 => "eq19",
            RelationId::WyStrongest => "wy-strongest",
        }
    }

    /// Expands a relation id or group alias into concrete ids.
    ///
    /// Groups: `refined` (eq3, eq7-psd, eq8-schur), `weak-chain` (eq4a, eq4b),
    /// `two-obs` (eq9a, eq9b, eq10, furuichi), `g-psd` (eq16, eq17), `all`.
    /// `eq1` is accepted for `rs`.
    pub fn expand(token: &str) -> Result<Vec<RelationId>, Error> {
        use RelationId::*;
        Ok(match token {
            "all" => Self::ALL.to_vec(),
            "refined" => vec![Eq3, Eq7Psd, Eq8Schur],
            "weak-chain" => vec![Eq4a, Eq4b],
            "two-obs" => vec![Eq9a, Eq9b, Eq10, Furuichi],
            "g-psd" => vec![Eq16, Eq17],
            "eq1" => vec![Rs],
            other => vec![other.parse()?],
        })
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| Error::UnknownLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Saturated,
    Violated,
}

/// Left side minus right side of an inequality, with the magnitude it is
/// compared against. A vacuous relation (a required denominator is zero)
/// carries `value = +inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub value: f64,
    pub scale: f64,
}

impl Margin {
    pub fn new(value: f64, scale: f64) -> Self {
        Margin { value, scale: scale.abs().max(1.0) }
    }

    pub fn vacuous() -> Self {
        Margin { value: f64::INFINITY, scale: 1.0 }
    }

    pub fn is_vacuous(&self) -> bool {
        self.value == f64::INFINITY
    }

    /// Margin divided by its scale.
    pub fn relative(&self) -> f64 {
        self.value / self.scale
    }

    pub fn holds(&self, tol_ineq: f64) -> bool {
        !self.value.is_nan() && self.value >= -tol_ineq * self.scale
    }

    pub fn verdict(&self, tol: &Tolerances) -> Verdict {
        if !self.holds(tol.ineq) {
            Verdict::Violated
        } else if self.value.abs() <= tol.sat * self.scale {
            Verdict::Saturated
        } else {
            Verdict::Holds
        }
    }

    /// The smaller of two margins, compared relative to their own scales.
    pub fn min(self, other: Margin) -> Margin {
        if other.relative() < self.relative() {
            other
        } else {
            self
        }
    }
}
