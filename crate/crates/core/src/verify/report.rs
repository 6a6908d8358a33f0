//! Report records emitted by the verification pipelines.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::SymmetryCertificate;
use crate::params::{ConditionTag, ParamSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "T1.1")]
    T11,
    #[serde(rename = "T1.2")]
    T12,
    #[serde(rename = "T1.4")]
    T14,
    #[serde(rename = "T1.5")]
    T15,
    #[serde(rename = "C1.3")]
    C13,
}

impl Theorem {
    pub const ALL: [Theorem; 5] = [Theorem::T11, Theorem::T12, Theorem::T14, Theorem::T15, Theorem::C13];

    pub fn as_str(&self) -> &'static str {
        match self {
            Theorem::T11 => "T1.1",
            Theorem::T12 => "T1.2",
            Theorem::T14 => "T1.4",
            Theorem::T15 => "T1.5",
            Theorem::C13 => "C1.3",
        }
    }

    /// Whether the statement concerns power weights (otherwise log-convex).
    pub fn uses_power_weights(&self) -> bool {
        matches!(self, Theorem::T11 | Theorem::T12 | Theorem::C13)
    }

    /// Harmonic-mean statements need the isotropy condition as well.
    pub fn needs_s2(&self) -> bool {
        matches!(self, Theorem::T12 | Theorem::T15)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown theorem '{s}' (expected one of T1.1, T1.2, T1.4, T1.5, C1.3)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Unsupported,
    Inconclusive,
    Violated,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Unsupported => "unsupported",
            Status::Inconclusive => "inconclusive",
            Status::Violated => "violated",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// `lhs ≥ rhs` up to the tolerance.
    Inequality,
    /// `lhs = rhs` up to the tolerance.
    Identity,
    /// Pass/fail certificate without a scalar margin.
    Certificate,
}

/// An intermediate step of a proof chain, evaluated independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyRow {
    pub name: String,
    pub kind: RowKind,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub tolerance: f64,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConsistencyRow {
    pub fn inequality(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        Self {
            name: name.into(),
            kind: RowKind::Inequality,
            lhs: Some(lhs),
            rhs: Some(rhs),
            margin: Some(margin),
            tolerance,
            ok: margin >= -tolerance,
            note: None,
        }
    }

    pub fn identity(name: &str, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = lhs - rhs;
        Self {
            name: name.into(),
            kind: RowKind::Identity,
            lhs: Some(lhs),
            rhs: Some(rhs),
            margin: Some(margin),
            tolerance,
            ok: margin.abs() <= tolerance,
            note: None,
        }
    }

    pub fn certificate(name: &str, ok: bool, note: Option<String>) -> Self {
        Self { name: name.into(), kind: RowKind::Certificate, lhs: None, rhs: None, margin: None, tolerance: 0.0, ok, note }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Error bars of the final margin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub fem: f64,
    pub quad: f64,
    pub ode: f64,
}

impl ErrorBudget {
    pub fn total(&self) -> f64 {
        self.fem + self.quad + self.ode
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: Theorem,
    pub domain_id: String,
    pub weight_spec: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_family: Option<String>,
    pub symmetry: SymmetryCertificate,
    pub gamma1_omega: Option<f64>,
    pub gamma_list_omega: Vec<f64>,
    #[serde(rename = "R")]
    pub radius: f64,
    pub gamma1_ball: f64,
    pub margin: Option<f64>,
    pub tolerance_used: f64,
    pub errors: ErrorBudget,
    /// `|margin| < tolerance_used`: the sign is not resolved by the error bars.
    pub tight: bool,
    pub status: Status,
    pub mesh_h: f64,
    pub convergence_rate: Option<f64>,
    pub consistency: Vec<ConsistencyRow>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// All consistency rows passed.
    pub fn consistent(&self) -> bool {
        self.consistency.iter().all(|r| r.ok)
    }

    pub fn row(&self, name: &str) -> Option<&ConsistencyRow> {
        self.consistency.iter().find(|r| r.name == name)
    }
}

/// Status of a margin against its error bars. A failed hypothesis gate always
/// yields `unsupported`; an unreliable error model never yields `violated`.
pub fn decide_status(gates_ok: bool, margin: Option<f64>, tolerance: f64, reliable: bool) -> (Status, bool) {
    let Some(margin) = margin.filter(|m| m.is_finite()) else {
        return (if gates_ok { Status::Inconclusive } else { Status::Unsupported }, false);
    };
    let tight = margin.abs() < tolerance;
    if !gates_ok {
        return (Status::Unsupported, tight);
    }
    if !reliable {
        return (Status::Inconclusive, tight);
    }
    if margin < -tolerance {
        (Status::Violated, tight)
    } else {
        (Status::Verified, tight)
    }
}
