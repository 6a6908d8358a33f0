//! Weighted isoperimetric inequalities: the power-weight scale `P_k ≥ C·|Ω|_ℓ^…`,
//! the Hardy–Littlewood rearrangement bound, and the divergence-theorem
//! comparison for log-convex measures.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ball::{unit_sphere_area, RadialProfile};
use crate::error::{Error, Result};
use crate::geometry::{
    ball_weighted_perimeter, equivalent_radius, weighted_perimeter_quad, weighted_volume_quad, Domain,
};
use crate::params::{classify_lemma21, LemmaCase};
use crate::quadrature::{AdaptiveIntegrator, Quad};
use crate::weights::LogConvexWeight;

/// Default relative slack of the inequality checks.
pub const DEFAULT_SLACK: f64 = 1e-9;

/// `C_{k,ℓ,N} = (Nω_N)^{(ℓ−k+1)/(ℓ+N)} (ℓ+N)^{(k+N−1)/(ℓ+N)}`
pub fn isop_constant(k: f64, ell: f64, dim: usize) -> Result<f64> {
    let n = dim as f64;
    if dim < 1 {
        return Err(Error::DimTooSmall(dim));
    }
    if ell <= -n {
        return Err(Error::EllOutOfRange { ell, dim });
    }
    let s = unit_sphere_area(dim);
    Ok(s.powf((ell - k + 1.0) / (ell + n)) * (ell + n).powf((k + n - 1.0) / (ell + n)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsopMargin {
    pub k: f64,
    pub ell: f64,
    /// `P_k(Ω)`
    pub lhs: f64,
    /// `C_{k,ℓ,N} |Ω|_ℓ^{(k+N−1)/(ℓ+N)}`
    pub rhs: f64,
    pub margin: f64,
    pub relative_margin: f64,
    /// `P_k(B_R)` at the `ℓ`-equivalent radius.
    pub ball_perimeter: f64,
    pub ball_margin: f64,
    pub radius: f64,
    pub condition: LemmaCase,
    /// False when `(k, ℓ)` lies outside every admissible case; the margins are
    /// then advisory only.
    pub supported: bool,
    /// Combined quadrature error estimate of `lhs` and `rhs`.
    pub quad_error: f64,
}

impl IsopMargin {
    pub fn holds(&self, slack: f64) -> bool {
        self.margin >= -slack * self.lhs.abs() - self.quad_error
    }
}

/// Evaluates the power-weight isoperimetric inequality on a planar domain.
pub fn check_isop(dom: &Domain, k: f64, ell: f64, dim: usize) -> Result<IsopMargin> {
    if dim != 2 {
        return Err(Error::DimensionUnsupported(dim));
    }
    let condition = classify_lemma21(k, ell, dim)?;
    let n = dim as f64;
    let p = weighted_perimeter_quad(dom, k)?;
    let v = weighted_volume_quad(dom, ell)?;
    let c = isop_constant(k, ell, dim)?;
    let expo = (k + n - 1.0) / (ell + n);
    let rhs = c * v.value.powf(expo);
    let radius = equivalent_radius(v.value, ell, dim)?;
    let ball_perimeter = ball_weighted_perimeter(radius, k, dim);
    let margin = p.value - rhs;
    let quad_error = p.error + rhs * expo.abs() * v.relative_error();
    Ok(IsopMargin {
        k,
        ell,
        lhs: p.value,
        rhs,
        margin,
        relative_margin: margin / p.value,
        ball_perimeter,
        ball_margin: p.value - ball_perimeter,
        radius,
        condition,
        supported: condition != LemmaCase::None,
        quad_error,
    })
}

/// Radial functions used as `H` in the rearrangement inequality and as `Φ` in
/// the monotonicity condition.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialFn {
    /// `r^m`
    Power { m: f64 },
    /// `e^{c r}`
    Exp { c: f64 },
    Constant { c: f64 },
    /// `lo` on `[0, r0)` and `hi` from `r0` on.
    Step { r0: f64, lo: f64, hi: f64 },
    /// `F²` for a solved radial profile.
    ProfileSq(Box<RadialProfile>),
}

impl RadialFn {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            RadialFn::Power { m } => {
                if r == 0.0 && *m > 0.0 {
                    0.0
                } else {
                    r.powf(*m)
                }
            }
            RadialFn::Exp { c } => (c * r).exp(),
            RadialFn::Constant { c } => *c,
            RadialFn::Step { r0, lo, hi } => {
                if r < *r0 {
                    *lo
                } else {
                    *hi
                }
            }
            RadialFn::ProfileSq(p) => {
                let (f, _) = p.eval(r);
                f * f
            }
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self {
            RadialFn::Power { m } => {
                if *m == 0.0 {
                    0.0
                } else {
                    m * r.powf(m - 1.0)
                }
            }
            RadialFn::Exp { c } => c * (c * r).exp(),
            RadialFn::Constant { .. } | RadialFn::Step { .. } => 0.0,
            RadialFn::ProfileSq(p) => {
                let (f, fp) = p.eval(r);
                2.0 * f * fp
            }
        }
    }

    fn breaks(&self) -> Vec<f64> {
        match self {
            RadialFn::Step { r0, .. } => vec![*r0],
            _ => vec![],
        }
    }

    /// Non-decrease on `n` uniform samples of `[0, r_max]`.
    pub fn is_nondecreasing(&self, r_max: f64, n: usize) -> bool {
        let vals: Vec<f64> = (0..=n).map(|i| self.value(r_max * i as f64 / n as f64)).collect();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        vals.windows(2).all(|w| w[1] >= w[0] - 1e-12 * scale)
    }
}

/// JSON form of a radial function: `{"kind":"power","m":2}` and so on.
/// `profile_sq` needs a log-convex weight to solve for `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialFnConfig {
    Power { m: f64 },
    Exp { c: f64 },
    Constant { c: f64 },
    Step { r0: f64, lo: f64, hi: f64 },
    ProfileSq,
}

impl RadialFnConfig {
    /// `profile` supplies the solved profile for `profile_sq`.
    pub fn build(&self, profile: Option<&RadialProfile>) -> Result<RadialFn> {
        Ok(match self {
            RadialFnConfig::Power { m } => RadialFn::Power { m: *m },
            RadialFnConfig::Exp { c } => RadialFn::Exp { c: *c },
            RadialFnConfig::Constant { c } => RadialFn::Constant { c: *c },
            RadialFnConfig::Step { r0, lo, hi } => RadialFn::Step { r0: *r0, lo: *lo, hi: *hi },
            RadialFnConfig::ProfileSq => RadialFn::ProfileSq(Box::new(
                profile.ok_or_else(|| Error::InvalidArgument("profile_sq needs a solved profile".into()))?.clone(),
            )),
        })
    }
}

/// Planar annular sector `{r0 < |x| < r1, θ0 < arg x < θ1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularSector {
    pub r0: f64,
    pub r1: f64,
    pub theta0: f64,
    pub theta1: f64,
}

/// Sets on which the rearrangement inequality is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasurableSet {
    Domain(Domain),
    /// Pairwise disjoint annular sectors.
    Sectors(Vec<AnnularSector>),
}

impl MeasurableSet {
    pub fn annulus(r0: f64, r1: f64) -> Self {
        MeasurableSet::Sectors(vec![AnnularSector { r0, r1, theta0: 0.0, theta1: 2.0 * PI }])
    }

    fn max_radius(&self) -> f64 {
        match self {
            MeasurableSet::Domain(d) => d.max_radius(),
            MeasurableSet::Sectors(s) => s.iter().map(|a| a.r1).fold(0.0, f64::max),
        }
    }

    /// `∫_M h(|x|) dx` given `K(ρ) = ∫_0^ρ h(r) r dr`.
    fn radial_integral(&self, k: &dyn Fn(f64) -> f64) -> Result<Quad> {
        match self {
            MeasurableSet::Domain(d) => Ok(d.radial_volume_integral(k)),
            MeasurableSet::Sectors(s) => {
                let mut v = 0.0;
                for a in s {
                    if !(0.0 <= a.r0 && a.r0 < a.r1 && a.theta0 < a.theta1 && a.theta1 - a.theta0 <= 2.0 * PI + 1e-15) {
                        return Err(Error::InvalidArgument(format!("malformed annular sector {a:?}")));
                    }
                    v += (a.theta1 - a.theta0) * (k(a.r1) - k(a.r0));
                }
                Ok(Quad { value: v, error: 0.0 })
            }
        }
    }
}

/// `K(ρ) = ∫_0^ρ g(r) r dr` with break points.
fn radial_antiderivative<'a>(g: &'a dyn Fn(f64) -> f64, breaks: Vec<f64>) -> impl Fn(f64) -> f64 + 'a {
    let integ = AdaptiveIntegrator::new(1e-13, 1e-300);
    move |rho: f64| integ.integrate_with_breaks(0.0, rho, &breaks, |r| g(r) * r).value
}

/// `μ(B_R) = 2π ∫_0^R W r dr`
pub fn ball_measure(w: &LogConvexWeight, radius: f64) -> Result<f64> {
    let w = horizon_at_least(w, radius)?;
    let g = |r: f64| w.value(r).unwrap_or(f64::NAN);
    let k = radial_antiderivative(&g, vec![]);
    Ok(2.0 * PI * k(radius))
}

fn horizon_at_least(w: &LogConvexWeight, r: f64) -> Result<LogConvexWeight> {
    if w.r_max >= r {
        Ok(w.clone())
    } else {
        w.with_horizon(r)
    }
}

/// Radius with `μ(B_R) = target` by bisection on the monotone ball measure.
pub fn measure_equivalent_radius(w: &LogConvexWeight, target: f64, hint: f64) -> Result<f64> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::RootFindFailure(format!("target measure {target}")));
    }
    let mut hi = hint.max(1e-3);
    let mut tries = 0;
    while ball_measure(w, hi).map_err(|e| Error::RootFindFailure(e.to_string()))? < target {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return Err(Error::RootFindFailure("could not bracket the equivalent radius".into()));
        }
    }
    let wide = horizon_at_least(w, hi).map_err(|e| Error::RootFindFailure(e.to_string()))?;
    crate::quadrature::bisect(|r| ball_measure(&wide, r).unwrap_or(f64::NAN) - target, 0.0, hi, 1e-15 * hi)
        .ok_or_else(|| Error::RootFindFailure("bisection lost the bracket".into()))
}

/// `μ(M) = ∫_M W dx`
pub fn set_measure(set: &MeasurableSet, w: &LogConvexWeight) -> Result<Quad> {
    let w = horizon_at_least(w, set.max_radius())?;
    let g = |r: f64| w.value(r).unwrap_or(f64::NAN);
    let k = radial_antiderivative(&g, vec![]);
    set.radial_integral(&k)
}

/// `μ(Ω)` for a domain.
pub fn domain_measure(dom: &Domain, w: &LogConvexWeight) -> Result<Quad> {
    set_measure(&MeasurableSet::Domain(dom.clone()), w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    /// Ball side.
    pub lhs: f64,
    /// Set side.
    pub rhs: f64,
    pub radius: f64,
    pub ok: bool,
}

impl InequalityCheck {
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// `∫_{B_R} H dμ ≤ ∫_M H dμ` with `μ(B_R) = μ(M)`, for non-decreasing radial `H`.
pub fn check_hardy_littlewood(set: &MeasurableSet, h: &RadialFn, w: &LogConvexWeight) -> Result<InequalityCheck> {
    let mu = set_measure(set, w)?;
    let radius = measure_equivalent_radius(w, mu.value, set.max_radius())?;
    let reach = radius.max(set.max_radius());
    if !h.is_nondecreasing(reach, 4096) {
        return Err(Error::InvalidArgument("H must be non-decreasing".into()));
    }
    let w = horizon_at_least(w, reach)?;
    let g = |r: f64| h.value(r) * w.value(r).unwrap_or(f64::NAN);
    let k = radial_antiderivative(&g, h.breaks());
    let lhs = 2.0 * PI * k(radius);
    let rhs = set.radial_integral(&k)?.value;
    Ok(InequalityCheck { lhs, rhs, radius, ok: lhs <= rhs + DEFAULT_SLACK * rhs.abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCertificate {
    pub ok: bool,
    /// First radius where `G` drops by more than the tolerance.
    pub first_violation: Option<f64>,
    pub samples: usize,
}

/// Number of samples used by [`check_monotone_cond`].
pub const MONOTONE_SAMPLES: usize = 4096;

/// Certifies that `G(r) = (N−1)Φ/r + Φ' + (W'/W)Φ` is non-decreasing on `(0, r_max]`.
pub fn check_monotone_cond(w: &LogConvexWeight, phi: &RadialFn, dim: usize, r_max: f64) -> Result<MonotoneCertificate> {
    let w = horizon_at_least(w, r_max)?;
    let n1 = dim as f64 - 1.0;
    let n = MONOTONE_SAMPLES;
    let mut g = Vec::with_capacity(n);
    let mut rs = Vec::with_capacity(n);
    for i in 1..=n {
        let r = r_max * i as f64 / n as f64;
        g.push(n1 * phi.value(r) / r + phi.derivative(r) + w.log_derivative(r)? * phi.value(r));
        rs.push(r);
    }
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-8 * scale;
    let first = g.windows(2).position(|p| p[1] < p[0] - tol).map(|i| rs[i + 1]);
    Ok(MonotoneCertificate { ok: first.is_none(), first_violation: first, samples: n })
}

/// `∫_{∂B_R} W Φ dH ≤ ∫_{∂Ω} W Φ dH` with `μ(Ω) = μ(B_R)`.
pub fn check_weighted_isop_l32(dom: &Domain, w: &LogConvexWeight, phi: &RadialFn) -> Result<InequalityCheck> {
    dom.validate_origin()?;
    let mu = domain_measure(dom, w)?;
    let radius = measure_equivalent_radius(w, mu.value, dom.max_radius())?;
    let reach = radius.max(dom.max_radius());
    let cert = check_monotone_cond(w, phi, 2, reach)?;
    if let Some(r) = cert.first_violation {
        return Err(Error::MonotoneCondViolated { r });
    }
    let w = horizon_at_least(w, reach)?;
    let lhs = 2.0 * PI * radius * w.value(radius)? * phi.value(radius);
    let rhs = dom
        .boundary_integral(&|x| {
            let r = x[0].hypot(x[1]);
            w.value(r).unwrap_or(f64::NAN) * phi.value(r)
        })
        .value;
    Ok(InequalityCheck { lhs, rhs, radius, ok: lhs <= rhs + DEFAULT_SLACK * rhs.abs() })
}
