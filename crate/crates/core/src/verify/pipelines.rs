//! End-to-end checks of the eigenvalue inequalities on one (domain, weight)
//! pair, with the intermediate steps of each proof as consistency rows.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::report::{decide_status, ConsistencyRow, ErrorBudget, Status, Theorem, VerificationReport};
use crate::ball::{
    ball_boundary_mass, ball_gradient_energy, lemma33_monotonicity, logconvex_ball_gamma1, power_ball_spectrum,
    solve_radial_ode, solve_radial_ode_from, RadialProfile,
};
use crate::error::{Error, Result};
use crate::fem::{convergence_study, ConvergenceStudy};
use crate::geometry::{
    ball_weighted_perimeter, ball_weighted_volume, equivalent_radius, symmetry_certificate, weighted_perimeter_quad,
    weighted_volume_quad, Domain, SymmetryCertificate,
};
use crate::isoperimetry::{check_weighted_isop_l32, domain_measure, measure_equivalent_radius, RadialFn};
use crate::params::{classify, derive_params, ConditionTag, ParamSet, TheoremCase, ThresholdRule};
use crate::quadrature::{AdaptiveIntegrator, Quad};
use crate::weights::{validate_log_convex, LogConvexWeight, PowerWeightPair, WeightSpec};

/// Relative floor added to every error budget for floating-point roundoff.
const ROUNDOFF: f64 = 1e-12;
/// Planar problems: `N = 2`, so two nontrivial eigenvalues are tracked.
const DIM: usize = 2;
/// Below this relative change between the two finest levels the sequence
/// counts as converged whatever its observed rate.
const CONVERGED_REL: f64 = 1e-9;
/// Observed rates below this flag a pre-asymptotic sequence.
const MIN_RATE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of identity rows.
    pub identity: f64,
    /// Relative slack of quadrature-only inequality rows.
    pub slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { identity: 1e-6, slack: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub h: f64,
    pub refinements: usize,
    pub threshold_rule: ThresholdRule,
    pub symmetry_radii: usize,
    pub symmetry_angles: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            h: 0.16,
            refinements: 2,
            threshold_rule: ThresholdRule::Derived,
            symmetry_radii: 64,
            symmetry_angles: 32,
            tolerances: Tolerances::default(),
        }
    }
}

/// Shared state of all checks on one (domain, weight) pair; the FEM study is
/// computed on first use and reused.
#[derive(Debug)]
pub struct Context {
    pub dom: Domain,
    pub spec: WeightSpec,
    pub opts: VerifyOptions,
    pub symmetry: SymmetryCertificate,
    study: OnceLock<Result<ConvergenceStudy>>,
}

impl Context {
    pub fn new(dom: Domain, spec: WeightSpec, opts: VerifyOptions) -> Result<Self> {
        let symmetry = symmetry_certificate(&dom, opts.symmetry_radii, opts.symmetry_angles)?;
        Ok(Self { dom, spec, opts, symmetry, study: OnceLock::new() })
    }

    pub fn study(&self) -> Result<&ConvergenceStudy> {
        self.study
            .get_or_init(|| convergence_study(&self.dom, &self.spec, self.opts.h, self.opts.refinements, DIM))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn domain_id(&self) -> String {
        self.dom.label()
    }
}

/// Finest FEM eigenvalues with their error bars.
struct FemView {
    gammas: Vec<f64>,
    errors: Vec<f64>,
    rate: Option<f64>,
    reliable: bool,
    h: f64,
    notes: Vec<String>,
}

fn fem_view(study: &ConvergenceStudy) -> FemView {
    let gammas: Vec<f64> = study.finest.nontrivial()[..DIM].to_vec();
    let mut notes = Vec::new();
    let mut reliable = study.levels.len() >= 2;
    if !reliable {
        notes.push("no refinement levels: discretization error not estimated".into());
    }
    let mut errors = Vec::with_capacity(DIM);
    for i in 0..DIM {
        errors.push(study.error_estimates[i].unwrap_or(0.0));
        let n = study.levels.len();
        if n >= 3 {
            let delta = (study.levels[n - 1].eigenvalues[i] - study.levels[n - 2].eigenvalues[i]).abs();
            if let Some(p) = study.rates[i] {
                if p < MIN_RATE && delta > CONVERGED_REL * gammas[i] {
                    reliable = false;
                    notes.push(format!("gamma_{} converges irregularly (observed rate {p:.3})", i + 1));
                }
            }
        }
    }
    FemView { gammas, errors, rate: study.rates[0], reliable, h: study.finest.h, notes }
}

fn fem_or_note(ctx: &Context, gates_ok: bool, notes: &mut Vec<String>) -> Result<Option<FemView>> {
    match ctx.study() {
        Ok(s) => {
            let v = fem_view(s);
            notes.extend(v.notes.iter().cloned());
            Ok(Some(v))
        }
        Err(e) if !gates_ok => {
            notes.push(format!("FEM solve failed: {e}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

struct Base {
    theorem: Theorem,
    params: Option<ParamSet>,
    condition: Option<ConditionTag>,
    weight_family: Option<String>,
    radius: f64,
    gamma1_ball: f64,
}

fn finish(
    ctx: &Context,
    base: Base,
    fem: Option<&FemView>,
    gates_ok: bool,
    margin: Option<f64>,
    errors: ErrorBudget,
    consistency: Vec<ConsistencyRow>,
    mut notes: Vec<String>,
) -> VerificationReport {
    let tol = errors.total();
    let reliable = fem.map_or(false, |f| f.reliable);
    let (status, tight) = decide_status(gates_ok, margin, tol, reliable);
    if let Some(bad) = consistency.iter().find(|r| !r.ok) {
        if gates_ok {
            notes.push(format!("consistency row '{}' failed", bad.name));
        }
    }
    VerificationReport {
        theorem: base.theorem,
        domain_id: ctx.domain_id(),
        weight_spec: ctx.spec.label(),
        params: base.params,
        condition: base.condition,
        weight_family: base.weight_family,
        symmetry: ctx.symmetry,
        gamma1_omega: fem.map(|f| f.gammas[0]),
        gamma_list_omega: fem.map(|f| f.gammas.clone()).unwrap_or_default(),
        radius: base.radius,
        gamma1_ball: base.gamma1_ball,
        margin,
        tolerance_used: tol,
        errors,
        tight,
        status,
        mesh_h: fem.map_or(f64::NAN, |f| f.h),
        convergence_rate: fem.and_then(|f| f.rate),
        consistency,
        notes,
    }
}

// ---------------------------------------------------------------------------
// power weights

struct PowerSetup {
    wp: PowerWeightPair,
    ps: ParamSet,
    tag: ConditionTag,
    vol: Quad,
    perim: Quad,
    radius: f64,
    gamma_ball: f64,
    /// Relative error of `γ₁(B_R)` inherited from the volume quadrature.
    gamma_ball_rel: f64,
}

fn power_setup(ctx: &Context) -> Result<PowerSetup> {
    let WeightSpec::Power(wp) = &ctx.spec else {
        return Err(Error::InvalidArgument("this check needs a power weight pair".into()));
    };
    if wp.dim != DIM {
        return Err(Error::DimensionUnsupported(wp.dim));
    }
    let ps = derive_params(wp);
    let tag = classify(&ps, ctx.opts.threshold_rule)?;
    let vol = weighted_volume_quad(&ctx.dom, ps.ell)?;
    let perim = weighted_perimeter_quad(&ctx.dom, ps.k)?;
    let radius = equivalent_radius(vol.value, ps.ell, DIM)?;
    let gamma_ball = power_ball_spectrum(wp, radius, 1)?.gamma1();
    // γ₁(B_R) ∝ R^{α−β−1} and R ∝ |Ω|_ℓ^{1/(ℓ+N)}
    let gamma_ball_rel = (wp.alpha - wp.beta - 1.0).abs() * vol.relative_error() / (ps.ell + DIM as f64) + ROUNDOFF;
    Ok(PowerSetup { wp: *wp, ps, tag, vol, perim, radius, gamma_ball, gamma_ball_rel })
}

/// `∂_k u_i` for `u_i = x_i |x|^{m−1}`.
fn trial_gradient(x: [f64; 2], i: usize, m: f64) -> [f64; 2] {
    let r = x[0].hypot(x[1]);
    let a = r.powf(m - 1.0);
    let b = (m - 1.0) * x[i] * r.powf(m - 3.0);
    let mut g = [b * x[0], b * x[1]];
    g[i] += a;
    g
}

/// `∫_Ω |∇u_i|² |x|^α dx` for each trial function.
fn trial_energies(dom: &Domain, ps: &ParamSet) -> [Quad; 2] {
    let e = |i: usize| {
        dom.polar_integral(&|x| {
            let r = x[0].hypot(x[1]);
            if r == 0.0 {
                return 0.0;
            }
            let g = trial_gradient(x, i, ps.m);
            (g[0] * g[0] + g[1] * g[1]) * r.powf(ps.alpha)
        })
    };
    [e(0), e(1)]
}

fn power_gates(ctx: &Context, s: &PowerSetup, need_s2: bool, notes: &mut Vec<String>) -> bool {
    let mut ok = true;
    if !ctx.symmetry.s1.passed() {
        ok = false;
        notes.push("hypothesis S1 fails: sphere slices are not balanced".into());
    }
    if need_s2 && !ctx.symmetry.s2.passed() {
        ok = false;
        notes.push("hypothesis S2 fails: sphere slices are not isotropic".into());
    }
    if s.tag.theorem_case == TheoremCase::None {
        ok = false;
        notes.push("(alpha, beta, N) lies outside every admissible parameter case".into());
    }
    ok
}

fn power_base(theorem: Theorem, s: &PowerSetup) -> Base {
    Base {
        theorem,
        params: Some(s.ps),
        condition: Some(s.tag),
        weight_family: None,
        radius: s.radius,
        gamma1_ball: s.gamma_ball,
    }
}

/// `γ₁(Ω) ≤ γ₁(B_R)` with `|Ω|_ℓ = |B_R|_ℓ`.
pub fn verify_t11(ctx: &Context) -> Result<VerificationReport> {
    let s = power_setup(ctx)?;
    let tol = ctx.opts.tolerances;
    let mut notes = Vec::new();
    let gates_ok = power_gates(ctx, &s, false, &mut notes);
    let fem = fem_or_note(ctx, gates_ok, &mut notes)?;
    let n = DIM as f64;
    let c = n + s.ps.m * s.ps.m - 1.0;

    let mut rows = Vec::new();
    let [e1, e2] = trial_energies(&ctx.dom, &s.ps);
    let trial = e1.value + e2.value;
    let vol_side = c * s.vol.value;
    rows.push(ConsistencyRow::identity(
        "trial_energy_identity",
        trial,
        vol_side,
        tol.identity * vol_side + e1.error + e2.error + c * s.vol.error,
    ));
    let ball_vol = c * ball_weighted_volume(s.radius, s.ps.ell, DIM);
    let ball_per = s.gamma_ball * ball_weighted_perimeter(s.radius, s.ps.k, DIM);
    rows.push(ConsistencyRow::identity("ball_rayleigh_identity", ball_vol, ball_per, 1e-10 * ball_vol));
    let p_ball = ball_weighted_perimeter(s.radius, s.ps.k, DIM);
    rows.push(ConsistencyRow::inequality(
        "weighted_isoperimetry",
        s.perim.value,
        p_ball,
        tol.slack * p_ball + s.perim.error + p_ball * s.gamma_ball_rel,
    ));

    let (margin, errors) = match &fem {
        Some(f) => {
            rows.push(ConsistencyRow::inequality(
                "rayleigh_bound_omega",
                vol_side,
                f.gammas[0] * s.perim.value,
                f.errors[0] * s.perim.value + tol.slack * vol_side + c * s.vol.error + f.gammas[0] * s.perim.error,
            ));
            let errors = ErrorBudget { fem: f.errors[0], quad: s.gamma_ball * s.gamma_ball_rel, ode: 0.0 };
            (Some(s.gamma_ball - f.gammas[0]), errors)
        }
        None => (None, ErrorBudget { fem: 0.0, quad: s.gamma_ball * s.gamma_ball_rel, ode: 0.0 }),
    };
    Ok(finish(ctx, power_base(Theorem::T11, &s), fem.as_ref(), gates_ok, margin, errors, rows, notes))
}

/// `Σ 1/γ_i(Ω) ≥ N/γ₁(B_R)`
pub fn verify_t12(ctx: &Context) -> Result<VerificationReport> {
    let s = power_setup(ctx)?;
    let tol = ctx.opts.tolerances;
    let mut notes = Vec::new();
    let gates_ok = power_gates(ctx, &s, true, &mut notes);
    let fem = fem_or_note(ctx, gates_ok, &mut notes)?;
    let n = DIM as f64;
    let c = n + s.ps.m * s.ps.m - 1.0;

    let mut rows = Vec::new();
    let [e1, e2] = trial_energies(&ctx.dom, &s.ps);
    let mut row = ConsistencyRow::identity(
        "equal_trial_energies",
        e1.value,
        e2.value,
        tol.identity * e1.value.abs().max(e2.value.abs()) + e1.error + e2.error,
    );
    if !ctx.symmetry.s2.passed() {
        row = row.with_note("expected to fail without S2");
    }
    rows.push(row);

    let q = n / c * s.perim.value / s.vol.value;
    let q_err = q * (s.perim.relative_error() + s.vol.relative_error());
    let ball_side = n / s.gamma_ball;
    rows.push(ConsistencyRow::inequality(
        "intermediate_vs_ball",
        q,
        ball_side,
        tol.slack * q + q_err + ball_side * s.gamma_ball_rel,
    ));

    let quad = ball_side * s.gamma_ball_rel;
    let (margin, errors) = match &fem {
        Some(f) => {
            let sum: f64 = f.gammas.iter().map(|g| 1.0 / g).sum();
            let fem_err: f64 = f.gammas.iter().zip(&f.errors).map(|(g, e)| e / (g * g)).sum();
            rows.push(ConsistencyRow::inequality(
                "harmonic_sum_vs_intermediate",
                sum,
                q,
                fem_err + q_err + tol.slack * q,
            ));
            (Some(sum - ball_side), ErrorBudget { fem: fem_err, quad, ode: 0.0 })
        }
        None => (None, ErrorBudget { fem: 0.0, quad, ode: 0.0 }),
    };
    Ok(finish(ctx, power_base(Theorem::T12, &s), fem.as_ref(), gates_ok, margin, errors, rows, notes))
}

/// The unweighted-interior special case `α = 0`: both power-weight
/// statements, T1.2 only where its extra hypothesis holds.
pub fn verify_c13(ctx: &Context) -> Result<VerificationReport> {
    let s = power_setup(ctx)?;
    let mut t11 = verify_t11(ctx)?;
    let mut notes = Vec::new();
    let mut gate = true;
    if s.wp.alpha != 0.0 {
        gate = false;
        notes.push(format!("alpha = {} but the corollary needs alpha = 0", s.wp.alpha));
    }
    let beta_ok = if DIM == 2 { (-2.0..=1.0).contains(&s.wp.beta) } else { s.wp.beta >= -2.0 };
    if !beta_ok {
        gate = false;
        notes.push(format!("beta = {} outside the corollary's range", s.wp.beta));
    }
    let mut status = t11.status;
    let mut tight = t11.tight;
    let mut rows: Vec<ConsistencyRow> = t11.consistency.drain(..).map(|mut r| {
        r.name = format!("t1.1:{}", r.name);
        r
    }).collect();
    if ctx.symmetry.s2.passed() {
        let t12 = verify_t12(ctx)?;
        status = status.max(t12.status);
        tight |= t12.tight;
        if let Some(m) = t12.margin {
            let mut row = ConsistencyRow::inequality("harmonic_mean_bound", m, 0.0, t12.tolerance_used);
            row.note = Some(format!("T1.2 status {}", t12.status));
            rows.push(row);
        }
        rows.extend(t12.consistency.into_iter().map(|mut r| {
            r.name = format!("t1.2:{}", r.name);
            r
        }));
    } else {
        notes.push("S2 fails: only the T1.1 inequality applies".into());
    }
    if !gate {
        status = Status::Unsupported;
    }
    notes.extend(t11.notes.drain(..));
    t11.theorem = Theorem::C13;
    t11.status = status;
    t11.tight = tight;
    t11.consistency = rows;
    t11.notes = notes;
    Ok(t11)
}

// ---------------------------------------------------------------------------
// log-convex weights

struct LogSetup {
    w: LogConvexWeight,
    radius: f64,
    profile_r: RadialProfile,
    gamma_ball: f64,
    ode_err: f64,
    quad_err: f64,
}

const ODE_STEPS: usize = 256;
/// Start of the alternative integration used to bound the ε-initialization error.
const ODE_EPS_ALT: f64 = 1e-8;

fn logconvex_setup(ctx: &Context) -> Result<LogSetup> {
    let WeightSpec::LogConvex(w) = &ctx.spec else {
        return Err(Error::InvalidArgument("this check needs a log-convex weight".into()));
    };
    let reach = ctx.dom.max_radius();
    let w = if w.r_max < reach { w.with_horizon(reach)? } else { w.clone() };
    let cert = validate_log_convex(&w, 1024)?;
    if !cert.is_ok() {
        return Err(Error::WeightInvalid(format!("{cert:?}")));
    }
    let mu = domain_measure(&ctx.dom, &w)?;
    let radius = measure_equivalent_radius(&w, mu.value, reach)?;
    let profile_r = solve_radial_ode(&w, radius, DIM, ODE_STEPS)?;
    let gamma_ball = logconvex_ball_gamma1(&profile_r);
    let alt = logconvex_ball_gamma1(&solve_radial_ode_from(&w, radius, DIM, ODE_STEPS, ODE_EPS_ALT)?);
    let ode_err = (alt - gamma_ball).abs() + ROUNDOFF * gamma_ball;
    // propagate the measure error through R
    let dr = 1e-4 * radius;
    let bumped = logconvex_ball_gamma1(&solve_radial_ode(&w, radius + dr, DIM, ODE_STEPS)?);
    let slope = (bumped - gamma_ball) / dr;
    let radius_err = mu.error / (2.0 * PI * radius * w.value(radius)?);
    let quad_err = slope.abs() * radius_err + ROUNDOFF * gamma_ball;
    Ok(LogSetup { w, radius, profile_r, gamma_ball, ode_err, quad_err })
}

fn logconvex_gates(ctx: &Context, need_s2: bool, notes: &mut Vec<String>) -> bool {
    let mut ok = true;
    if !ctx.symmetry.s1.passed() {
        ok = false;
        notes.push("hypothesis S1 fails: sphere slices are not balanced".into());
    }
    if need_s2 && !ctx.symmetry.s2.passed() {
        ok = false;
        notes.push("hypothesis S2 fails: sphere slices are not isotropic".into());
    }
    ok
}

/// Integrals of the first ball eigenfunction profile over `Ω` and `∂Ω`.
struct ProfileIntegrals {
    profile: RadialProfile,
    /// `∫_Ω ((F')² + (N−1)F²/r²) dμ`
    energy_omega: Quad,
    /// `∫_∂Ω F² W dH`
    mass_omega: Quad,
    energy_ball: f64,
    mass_ball: f64,
}

fn profile_integrals(ctx: &Context, s: &LogSetup) -> Result<ProfileIntegrals> {
    let reach = ctx.dom.max_radius().max(s.radius);
    let profile = if reach > s.radius { solve_radial_ode(&s.w, reach, DIM, ODE_STEPS)? } else { s.profile_r.clone() };
    // F(R) = 1 keeps the integrals of order one
    let (f_r, _) = profile.eval(s.radius);
    let profile = profile.scaled(1.0 / f_r);
    let w = profile.weight.clone();
    let inner = AdaptiveIntegrator::new(1e-12, 1e-300);
    let k = |rho: f64| {
        inner
            .integrate(0.0, rho, |r| profile.gradient_energy_density(r) * w.value(r).unwrap_or(f64::NAN) * r)
            .value
    };
    let energy_omega = ctx.dom.radial_volume_integral(&k);
    let mass_omega = ctx.dom.boundary_integral(&|x| {
        let r = x[0].hypot(x[1]);
        let (f, _) = profile.eval(r);
        f * f * w.value(r).unwrap_or(f64::NAN)
    });
    let energy_ball = ball_gradient_energy(&profile, s.radius)?;
    let mass_ball = ball_boundary_mass(&profile, s.radius)?;
    Ok(ProfileIntegrals { profile, energy_omega, mass_omega, energy_ball, mass_ball })
}

/// Rows shared by both log-convex statements.
fn logconvex_rows(ctx: &Context, s: &LogSetup, p: &ProfileIntegrals) -> Result<Vec<ConsistencyRow>> {
    let tol = ctx.opts.tolerances;
    let mut rows = Vec::new();
    rows.push(ConsistencyRow::identity(
        "ball_rayleigh_identity",
        p.energy_ball,
        s.gamma_ball * p.mass_ball,
        tol.identity * p.energy_ball,
    ));
    rows.push(ConsistencyRow::inequality(
        "hardy_littlewood",
        p.energy_ball,
        p.energy_omega.value,
        tol.slack * p.energy_ball + p.energy_omega.error,
    ));
    let phi = RadialFn::ProfileSq(Box::new(p.profile.clone()));
    rows.push(match check_weighted_isop_l32(&ctx.dom, &s.w, &phi) {
        Ok(c) => ConsistencyRow::inequality(
            "weighted_isoperimetry",
            c.rhs,
            c.lhs,
            tol.slack * c.rhs.abs() + p.mass_omega.error,
        ),
        Err(Error::MonotoneCondViolated { r }) => ConsistencyRow::certificate(
            "weighted_isoperimetry",
            false,
            Some(format!("monotonicity condition fails at r = {r}")),
        ),
        Err(e) => return Err(e),
    });
    let cert = lemma33_monotonicity(&p.profile)?;
    let note = match cert.first_violation {
        Some((q, r)) => format!("first violation {q:?} at r = {r}; printed variant ok = {}", cert.b_printed_ok),
        None => format!("printed variant ok = {}", cert.b_printed_ok),
    };
    rows.push(ConsistencyRow::certificate("profile_monotonicity", cert.is_ok(), Some(note)));
    Ok(rows)
}

fn logconvex_base(theorem: Theorem, ctx: &Context, s: &LogSetup) -> Base {
    Base {
        theorem,
        params: None,
        condition: None,
        weight_family: Some(ctx.spec.label()),
        radius: s.radius,
        gamma1_ball: s.gamma_ball,
    }
}

/// `γ₁(Ω) ≤ γ₁(B_R)` with `μ(Ω) = μ(B_R)`, `dμ = W dx`.
pub fn verify_t14(ctx: &Context) -> Result<VerificationReport> {
    let s = logconvex_setup(ctx)?;
    let tol = ctx.opts.tolerances;
    let mut notes = Vec::new();
    let gates_ok = logconvex_gates(ctx, false, &mut notes);
    let fem = fem_or_note(ctx, gates_ok, &mut notes)?;
    let p = profile_integrals(ctx, &s)?;
    let mut rows = logconvex_rows(ctx, &s, &p)?;
    let (margin, fem_err) = match &fem {
        Some(f) => {
            rows.insert(
                0,
                ConsistencyRow::inequality(
                    "rayleigh_bound_omega",
                    p.energy_omega.value,
                    f.gammas[0] * p.mass_omega.value,
                    f.errors[0] * p.mass_omega.value
                        + tol.slack * p.energy_omega.value
                        + p.energy_omega.error
                        + f.gammas[0] * p.mass_omega.error,
                ),
            );
            (Some(s.gamma_ball - f.gammas[0]), f.errors[0])
        }
        None => (None, 0.0),
    };
    let errors = ErrorBudget { fem: fem_err, quad: s.quad_err, ode: s.ode_err };
    Ok(finish(ctx, logconvex_base(Theorem::T14, ctx, &s), fem.as_ref(), gates_ok, margin, errors, rows, notes))
}

/// `Σ 1/γ_i(Ω) ≥ N/γ₁(B_R)` with `μ(Ω) = μ(B_R)`.
pub fn verify_t15(ctx: &Context) -> Result<VerificationReport> {
    let s = logconvex_setup(ctx)?;
    let tol = ctx.opts.tolerances;
    let n = DIM as f64;
    let mut notes = Vec::new();
    let gates_ok = logconvex_gates(ctx, true, &mut notes);
    let fem = fem_or_note(ctx, gates_ok, &mut notes)?;
    let p = profile_integrals(ctx, &s)?;
    let mut rows = logconvex_rows(ctx, &s, &p)?;

    // normalized on the ball: ∫_{B_R}(...) dμ = N, on the profile solved to R
    let e_ball = ball_gradient_energy(&s.profile_r, s.radius)?;
    let c2 = n / e_ball;
    let normalized = s.gamma_ball * c2 * ball_boundary_mass(&s.profile_r, s.radius)?;
    rows.insert(0, ConsistencyRow::identity("normalization_identity", normalized, n, tol.identity * n));

    let ball_side = n / s.gamma_ball;
    let (margin, fem_err) = match &fem {
        Some(f) => {
            let sum: f64 = f.gammas.iter().map(|g| 1.0 / g).sum();
            let fem_err: f64 = f.gammas.iter().zip(&f.errors).map(|(g, e)| e / (g * g)).sum();
            // normalized on Ω: ∫_Ω(...) dμ = N
            let c2o = n / p.energy_omega.value;
            let bound = c2o * p.mass_omega.value;
            rows.insert(
                1,
                ConsistencyRow::inequality(
                    "sum_reciprocal_bound",
                    sum,
                    bound,
                    fem_err + tol.slack * bound + bound * (p.energy_omega.relative_error() + p.mass_omega.relative_error()),
                ),
            );
            (Some(sum - ball_side), fem_err)
        }
        None => (None, 0.0),
    };
    let errors = ErrorBudget { fem: fem_err, quad: ball_side * s.quad_err / s.gamma_ball, ode: ball_side * s.ode_err / s.gamma_ball };
    Ok(finish(ctx, logconvex_base(Theorem::T15, ctx, &s), fem.as_ref(), gates_ok, margin, errors, rows, notes))
}

/// Dispatches on the theorem.
pub fn verify(theorem: Theorem, ctx: &Context) -> Result<VerificationReport> {
    match theorem {
        Theorem::T11 => verify_t11(ctx),
        Theorem::T12 => verify_t12(ctx),
        Theorem::T14 => verify_t14(ctx),
        Theorem::T15 => verify_t15(ctx),
        Theorem::C13 => verify_c13(ctx),
    }
}
