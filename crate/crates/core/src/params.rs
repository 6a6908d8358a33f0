//! Derived parameters of the power-weight problem and the admissibility
//! classification of `(α, β, N)`.
//!
//! For `w = |x|^α`, `v = |x|^{β-α}` in dimension `N`:
//!
//! * `z = β + 1 − α`
//! * `ρ = sqrt(N² + 2α(N−2) + α²)`
//! * `ℓ = ρ − N` (volume exponent), `k = z + 1 − N + ρ` (perimeter exponent)
//! * `m = (2 − N − α)/2 + ρ/2`, the radial exponent of the first nontrivial
//!   ball eigenfunctions, with `ℓ = α + 2m − 2` and `k = β + 2m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::bisect;
use crate::weights::PowerWeightPair;

/// Slack used when testing the closed inequalities of the classification.
const CLOSED_TOL: f64 = 1e-12;

fn le(a: f64, b: f64) -> bool {
    a <= b + CLOSED_TOL * (1.0 + a.abs().max(b.abs()))
}

fn ge(a: f64, b: f64) -> bool {
    le(b, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub alpha: f64,
    pub beta: f64,
    pub dim: usize,
    pub z: f64,
    pub rho: f64,
    pub ell: f64,
    pub k: f64,
    pub m: f64,
}

impl ParamSet {
    fn n(&self) -> f64 {
        self.dim as f64
    }

    /// Largest violation of `ℓ = α + 2m − 2` and `k = β + 2m`.
    pub fn identity_residual(&self) -> f64 {
        let r1 = self.ell - (self.alpha + 2.0 * self.m - 2.0);
        let r2 = self.k - (self.beta + 2.0 * self.m);
        r1.abs().max(r2.abs())
    }
}

pub fn derive_params(wp: &PowerWeightPair) -> ParamSet {
    let n = wp.dim as f64;
    let alpha = wp.alpha;
    let beta = wp.beta;
    let rho = (n * n + 2.0 * alpha * (n - 2.0) + alpha * alpha).sqrt();
    let z = beta + 1.0 - alpha;
    let ell = -n + rho;
    let k = z + 1.0 - n + rho;
    let m = (2.0 - n - alpha) / 2.0 + rho / 2.0;
    ParamSet { alpha, beta, dim: wp.dim, z, rho, ell, k, m }
}

/// `f(z) = z (z + ρ)² + ρ (N−1)²/N`
pub fn f_value(z: f64, rho: f64, dim: usize) -> f64 {
    let n = dim as f64;
    z * (z + rho) * (z + rho) + rho * (n - 1.0) * (n - 1.0) / n
}

/// `f'(z) = (z + ρ)(3z + ρ)`
pub fn f_derivative(z: f64, rho: f64) -> f64 {
    (z + rho) * (3.0 * z + rho)
}

/// Unique zero of `f` in `[−ρ/3, 0]`, by bisection down to machine resolution.
pub fn find_z0(rho: f64, dim: usize) -> Result<f64> {
    let left = -rho / 3.0;
    let f_left = f_value(left, rho, dim);
    if f_left >= 0.0 {
        return Err(Error::NoRootInBracket { f_left });
    }
    let z0 = bisect(|z| f_value(z, rho, dim), left, 0.0, 0.0)
        .ok_or_else(|| Error::RootFindFailure("f has no sign change on [-rho/3, 0]".into()))?;
    Ok(z0)
}

/// How the extra proviso of Theorem case (iii) is triggered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdRule {
    /// Proviso applies iff `f(−ρ/3) < 0`, i.e. iff `f` actually has a zero in the bracket.
    #[default]
    Derived,
    /// Proviso applies iff `N − 1 < 2ρ/(3√3)` as printed.
    Paper,
}

impl std::str::FromStr for ThresholdRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derived" => Ok(ThresholdRule::Derived),
            "paper" => Ok(ThresholdRule::Paper),
            other => Err(Error::InvalidArgument(format!("unknown f-threshold rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremCase {
    I,
    Ii,
    Iii,
    Iv,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LemmaCase {
    #[serde(rename = "i'")]
    I,
    #[serde(rename = "ii'")]
    Ii,
    #[serde(rename = "iii'")]
    Iii,
    #[serde(rename = "iv'")]
    Iv,
    #[serde(rename = "none")]
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionTag {
    pub theorem_case: TheoremCase,
    pub lemma_case: LemmaCase,
    pub z0: Option<f64>,
    pub threshold_rule: ThresholdRule,
    /// The printed trigger `N−1 < 2ρ/(3√3)` and the sign of `f(−ρ/3)` disagree.
    pub threshold_disagreement: bool,
    /// For `N = 2`, `z ≤ 0`: whether `0 ≤ z + 1/(z+ρ)` holds, next to the
    /// printed lower bound `(|α|−ρ)/2 ≤ z`.
    pub iv_derived_inequality: Option<bool>,
    pub iv_bound_disagreement: bool,
}

fn proviso_triggered(ps: &ParamSet, rule: ThresholdRule) -> bool {
    let n = ps.n();
    match rule {
        ThresholdRule::Derived => f_value(-ps.rho / 3.0, ps.rho, ps.dim) < 0.0,
        ThresholdRule::Paper => n - 1.0 < 2.0 * ps.rho / (3.0 * 3f64.sqrt()),
    }
}

/// Returns the first of Theorem cases (i)–(iv) satisfied by `ps`.
pub fn classify_theorem11(ps: &ParamSet, rule: ThresholdRule) -> TheoremCase {
    classify_theorem11_with_z0(ps, rule).0
}

fn classify_theorem11_with_z0(ps: &ParamSet, rule: ThresholdRule) -> (TheoremCase, Option<f64>) {
    let n = ps.n();
    let z = ps.z;
    let rho = ps.rho;
    if ge(z, 0.0) {
        return (TheoremCase::I, None);
    }
    if ge(z, -rho / n) && le(z, 0f64.min(n - 1.0 - rho)) {
        return (TheoremCase::Ii, None);
    }
    if ps.dim >= 3 && ge(z, n - 1.0 - rho) && le(z, 0.0) {
        if !proviso_triggered(ps, rule) {
            return (TheoremCase::Iii, None);
        }
        match find_z0(rho, ps.dim) {
            Ok(z0) => {
                if ge(z, z0) {
                    return (TheoremCase::Iii, Some(z0));
                }
            }
            // printed trigger fired but f >= 0 on the bracket: no restriction
            Err(_) => return (TheoremCase::Iii, None),
        }
    }
    if ps.dim == 2 && ge(z, (ps.alpha.abs() - rho) / 2.0) && le(z, 0.0) {
        return (TheoremCase::Iv, None);
    }
    (TheoremCase::None, None)
}

/// Returns the first of Lemma cases (i)'–(iv)' satisfied by `(k, ℓ, N)`.
pub fn classify_lemma21(k: f64, ell: f64, dim: usize) -> Result<LemmaCase> {
    let n = dim as f64;
    if ell <= -n {
        return Err(Error::EllOutOfRange { ell, dim });
    }
    if ge(k, ell + 1.0) {
        return Ok(LemmaCase::I);
    }
    if dim >= 2 && le(k, ell + 1.0) && le(ell * (n - 1.0) / n, k) && le(k, 0.0) {
        return Ok(LemmaCase::Ii);
    }
    if dim >= 3 && ge(k, 0.0) && le(k, ell + 1.0) {
        let s = k + n - 1.0;
        let denom = s * s - (n - 1.0) * (n - 1.0) / n;
        let holds = if denom > 0.0 {
            le(ell, s * s * s / denom - n)
        } else {
            denom == 0.0
        };
        if holds {
            return Ok(LemmaCase::Iii);
        }
    }
    if dim == 2 && ge(k, 0.0) && le(k, ell + 1.0) && le(ell, k - 1.0 + 1.0 / (k + 1.0)) {
        return Ok(LemmaCase::Iv);
    }
    Ok(LemmaCase::None)
}

/// Full classification of `ps`.
pub fn classify(ps: &ParamSet, rule: ThresholdRule) -> Result<ConditionTag> {
    let (theorem_case, z0) = classify_theorem11_with_z0(ps, rule);
    let lemma_case = classify_lemma21(ps.k, ps.ell, ps.dim)?;
    let derived = f_value(-ps.rho / 3.0, ps.rho, ps.dim) < 0.0;
    let printed = ps.n() - 1.0 < 2.0 * ps.rho / (3.0 * 3f64.sqrt());
    let (iv_derived_inequality, iv_bound_disagreement) = if ps.dim == 2 && le(ps.z, 0.0) {
        let derived_iv = ps.z + ps.rho > 0.0 && ge(ps.z + 1.0 / (ps.z + ps.rho), 0.0);
        let printed_iv = ge(ps.z, (ps.alpha.abs() - ps.rho) / 2.0);
        (Some(derived_iv), derived_iv != printed_iv)
    } else {
        (None, false)
    };
    Ok(ConditionTag {
        theorem_case,
        lemma_case,
        z0,
        threshold_rule: rule,
        threshold_disagreement: ps.dim >= 3 && derived != printed,
        iv_derived_inequality,
        iv_bound_disagreement,
    })
}

/// Theorem case ≠ none implies Lemma case ≠ none.
pub fn check_lemma23(ps: &ParamSet, rule: ThresholdRule) -> bool {
    if classify_theorem11(ps, rule) == TheoremCase::None {
        return true;
    }
    matches!(classify_lemma21(ps.k, ps.ell, ps.dim), Ok(c) if c != LemmaCase::None)
}
