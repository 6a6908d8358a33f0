//! Steklov spectra of origin-centred balls.
//!
//! Power weights separate exactly: on `B_R` the eigenfunctions are
//! `r^{m₁(j)} Y_j(θ)` with eigenvalue `m₁(j) R^{α−β−1}`. For a log-convex
//! weight the `j = 1` radial factor `F` solves
//!
//! ```text
//! F'' + (W'/W) F' + (N−1) F'/r = (N−1) F/r²,   F(0) = 0,
//! ```
//!
//! and `γ₁(B_R) = F'(R)/F(R)`. The ODE is integrated in `s = ln r`, where it
//! becomes `G'' = (N−1) G − (N−2) G' − r V'(r) G'` with no singular
//! coefficient, starting on the regular branch `F ~ r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::AdaptiveIntegrator;
use crate::weights::{validate_log_convex, LogConvexWeight, PowerWeightPair};

/// Volume `ω_N` of the unit ball in `ℝ^N`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        0 => 1.0,
        1 => 2.0,
        n => 2.0 * PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Surface area `N ω_N` of the unit sphere.
pub fn unit_sphere_area(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

/// `m_{1,2}(j) = (2−N−α)/2 ± ½ sqrt((N−2+α)² + 4j(j+N−2))`.
pub fn exponent_m(j: usize, alpha: f64, dim: usize, branch: Branch) -> f64 {
    let n = dim as f64;
    let jf = j as f64;
    let disc = ((n - 2.0 + alpha).powi(2) + 4.0 * jf * (jf + n - 2.0)).sqrt();
    let base = (2.0 - n - alpha) / 2.0;
    match branch {
        Branch::Plus => base + 0.5 * disc,
        Branch::Minus => base - 0.5 * disc,
    }
}

/// Dimension of the space of degree-`j` spherical harmonics on `S^{N−1}`.
pub fn harmonic_multiplicity(j: usize, dim: usize) -> usize {
    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut r: u128 = 1;
        for i in 0..k {
            r = r * (n - i) as u128 / (i + 1) as u128;
        }
        r as usize
    }
    let total = binom(j + dim - 1, dim - 1);
    if j >= 2 {
        total - binom(j + dim - 3, dim - 1)
    } else {
        total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMode {
    pub j: usize,
    pub exponent: f64,
    pub gamma: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallSpectrum {
    pub radius: f64,
    pub dim: usize,
    pub entries: Vec<BallMode>,
}

impl BallSpectrum {
    /// Eigenvalues repeated by multiplicity, `γ₀ = 0` first.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.entries.iter().flat_map(|e| std::iter::repeat(e.gamma).take(e.multiplicity)).collect()
    }

    /// `γ₁ = … = γ_N`
    pub fn gamma1(&self) -> f64 {
        self.entries[1].gamma
    }
}

/// Closed-form spectrum on `B_R` for `w = |x|^α`, `v = |x|^{β−α}`.
pub fn power_ball_spectrum(wp: &PowerWeightPair, radius: f64, j_max: usize) -> Result<BallSpectrum> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if j_max < 1 {
        return Err(Error::InvalidArgument("j_max must be >= 1".into()));
    }
    let scale = radius.powf(wp.alpha - wp.beta - 1.0);
    let entries = (0..=j_max)
        .map(|j| {
            // j = 0 is the constant mode; the other root of the radial
            // equation is not a weak solution through the origin.
            let exponent = if j == 0 { 0.0 } else { exponent_m(j, wp.alpha, wp.dim, Branch::Plus) };
            BallMode { j, exponent, gamma: exponent * scale, multiplicity: harmonic_multiplicity(j, wp.dim) }
        })
        .collect();
    Ok(BallSpectrum { radius, dim: wp.dim, entries })
}

/// Tabulated `j = 1` radial factor `F` with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub grid: Vec<f64>,
    pub f: Vec<f64>,
    pub fprime: Vec<f64>,
    pub weight: LogConvexWeight,
    pub dim: usize,
    /// Largest relative defect of the ODE on the interior grid points.
    pub residual: f64,
}

impl RadialProfile {
    /// Wraps externally supplied samples (no ODE residual is computed).
    pub fn from_samples(grid: Vec<f64>, f: Vec<f64>, fprime: Vec<f64>, weight: LogConvexWeight, dim: usize) -> Result<Self> {
        if grid.len() < 2 || f.len() != grid.len() || fprime.len() != grid.len() {
            return Err(Error::InvalidArgument("profile arrays must have equal length >= 2".into()));
        }
        if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("profile grid must be positive and strictly increasing".into()));
        }
        Ok(Self { grid, f, fprime, weight, dim, residual: f64::NAN })
    }

    pub fn radius(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    /// `(F(r), F'(r))` by cubic Hermite interpolation in `ln r`; below the first
    /// grid point the regular branch `F ∝ r` is used.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let r0 = self.grid[0];
        if r <= r0 {
            return (self.f[0] * r / r0, self.fprime[0]);
        }
        let n = self.grid.len();
        if r >= self.grid[n - 1] {
            return (self.f[n - 1], self.fprime[n - 1]);
        }
        let i = match self.grid.binary_search_by(|g| g.partial_cmp(&r).unwrap()) {
            Ok(i) => return (self.f[i], self.fprime[i]),
            Err(i) => i - 1,
        };
        let (s0, s1) = (self.grid[i].ln(), self.grid[i + 1].ln());
        let h = s1 - s0;
        let t = (r.ln() - s0) / h;
        let (g0, g1) = (self.f[i], self.f[i + 1]);
        let (d0, d1) = (self.grid[i] * self.fprime[i], self.grid[i + 1] * self.fprime[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let g = (2.0 * t3 - 3.0 * t2 + 1.0) * g0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * g1
            + (t3 - t2) * h * d1;
        let dg = ((6.0 * t2 - 6.0 * t) * g0
            + (3.0 * t2 - 4.0 * t + 1.0) * h * d0
            + (-6.0 * t2 + 6.0 * t) * g1
            + (3.0 * t2 - 2.0 * t) * h * d1)
            / h;
        (g, dg / r)
    }

    /// Same profile scaled by `c` (the ODE is linear).
    pub fn scaled(&self, c: f64) -> Self {
        let mut p = self.clone();
        p.f.iter_mut().for_each(|v| *v *= c);
        p.fprime.iter_mut().for_each(|v| *v *= c);
        p
    }

    /// `(F')² + (N−1) F²/r²`, the sum of `|∇u_i|²` for `u_i = (x_i/|x|) F`.
    pub fn gradient_energy_density(&self, r: f64) -> f64 {
        let (f, fp) = self.eval(r);
        let n1 = self.dim as f64 - 1.0;
        if r == 0.0 {
            // F ~ F'(0) r near the origin
            return fp * fp * (1.0 + n1);
        }
        fp * fp + n1 * f * f / (r * r)
    }
}

/// RK4 in `s = ln r` from `ε = R·eps_factor` to `R` with a fixed number of steps.
pub fn solve_radial_ode_fixed(w: &LogConvexWeight, radius: f64, dim: usize, steps: usize, eps_factor: f64) -> Result<RadialProfile> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if dim < 2 {
        return Err(Error::DimTooSmall(dim));
    }
    if steps < 4 {
        return Err(Error::InvalidArgument("need at least 4 steps".into()));
    }
    let n1 = dim as f64 - 1.0;
    let n2 = dim as f64 - 2.0;
    let eps = radius * eps_factor;
    let s0 = eps.ln();
    let s1 = radius.ln();
    let h = (s1 - s0) / steps as f64;

    // state (G, dG/ds); r V'(r) is the only variable coefficient
    let coef = |s: f64| -> Result<f64> {
        let r = s.exp().min(radius);
        Ok(r * w.log_derivative(r)?)
    };
    let rhs = |s: f64, g: f64, dg: f64| -> Result<(f64, f64)> { Ok((dg, n1 * g - n2 * dg - coef(s)? * dg)) };

    let mut grid = Vec::with_capacity(steps + 1);
    let mut gs = Vec::with_capacity(steps + 1);
    let mut dgs = Vec::with_capacity(steps + 1);
    let (mut g, mut dg) = (eps, eps);
    grid.push(eps);
    gs.push(g);
    dgs.push(dg);
    for i in 0..steps {
        let s = s0 + i as f64 * h;
        let k1 = rhs(s, g, dg)?;
        let k2 = rhs(s + 0.5 * h, g + 0.5 * h * k1.0, dg + 0.5 * h * k1.1)?;
        let k3 = rhs(s + 0.5 * h, g + 0.5 * h * k2.0, dg + 0.5 * h * k2.1)?;
        let k4 = rhs(s + h, g + h * k3.0, dg + h * k3.1)?;
        g += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        dg += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        if !g.is_finite() || !dg.is_finite() || g <= 0.0 {
            return Err(Error::IntegrationFailure(format!("non-finite or non-positive F at step {i}")));
        }
        let r = if i + 1 == steps { radius } else { (s + h).exp() };
        grid.push(r);
        gs.push(g);
        dgs.push(dg);
    }

    // defect of the s-form ODE, with G'' from 4th-order differences of G'
    let mut residual = 0.0f64;
    for i in 2..steps.saturating_sub(1) {
        let d2 = (dgs[i - 2] - 8.0 * dgs[i - 1] + 8.0 * dgs[i + 1] - dgs[i + 2]) / (12.0 * h);
        let c = coef(s0 + i as f64 * h)?;
        let terms = [n1 * gs[i], n2 * dgs[i], c * dgs[i]];
        let res = d2 - (terms[0] - terms[1] - terms[2]);
        let scale = terms.iter().map(|t| t.abs()).sum::<f64>() + d2.abs();
        residual = residual.max(res.abs() / scale.max(f64::MIN_POSITIVE));
    }

    let fprime: Vec<f64> = dgs.iter().zip(&grid).map(|(d, r)| d / r).collect();
    Ok(RadialProfile { grid, f: gs, fprime, weight: w.clone(), dim, residual })
}

/// Relative ODE residual accepted by [`solve_radial_ode`].
pub const ODE_RESIDUAL_TOL: f64 = 1e-8;

/// Relative change of `F` between successive step doublings accepted by
/// [`solve_radial_ode`].
pub const ODE_PROFILE_TOL: f64 = 1e-10;

/// Initial point of the integration as a fraction of `R`.
pub const ODE_EPS_FACTOR: f64 = 1e-6;

/// Solves for the regular `j = 1` profile on `[εR, R]`, doubling the step count
/// from `steps` until the ODE residual is below [`ODE_RESIDUAL_TOL`] and the
/// profile has converged.
pub fn solve_radial_ode(w: &LogConvexWeight, radius: f64, dim: usize, steps: usize) -> Result<RadialProfile> {
    solve_radial_ode_from(w, radius, dim, steps, ODE_EPS_FACTOR)
}

pub fn solve_radial_ode_from(w: &LogConvexWeight, radius: f64, dim: usize, steps: usize, eps_factor: f64) -> Result<RadialProfile> {
    if steps < 128 {
        return Err(Error::InvalidArgument(format!("steps must be >= 128, got {steps}")));
    }
    let w = if w.r_max < radius { w.with_horizon(radius)? } else { w.clone() };
    let cert = validate_log_convex(&w, 1024)?;
    if !cert.is_ok() {
        return Err(Error::WeightInvalid(format!("{cert:?}")));
    }
    // Double until the residual passes and the profile agrees with the
    // half-resolution run on the shared nodes.
    let mut n = steps;
    let mut coarse = solve_radial_ode_fixed(&w, radius, dim, n, eps_factor)?;
    loop {
        n *= 2;
        if n > 1 << 22 {
            return Err(Error::IntegrationFailure(format!("residual {} above tolerance at {n} steps", coarse.residual)));
        }
        let fine = solve_radial_ode_fixed(&w, radius, dim, n, eps_factor)?;
        let scale = fine.f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let change = coarse
            .f
            .iter()
            .zip(fine.f.iter().step_by(2))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale;
        if fine.residual <= ODE_RESIDUAL_TOL && change <= ODE_PROFILE_TOL {
            return Ok(fine);
        }
        coarse = fine;
    }
}

/// `γ₁(B_R) = F'(R)/F(R)`.
pub fn logconvex_ball_gamma1(profile: &RadialProfile) -> f64 {
    let n = profile.grid.len() - 1;
    profile.fprime[n] / profile.f[n]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneQuantity {
    /// `(F')² + (N−1)F²/r²`, must not increase
    A,
    /// `(N−1)F²/r + 2FF' + (W'/W)F²`, must not decrease
    B,
    /// `(N−1)F²/r² + 2FF' + (W'/W)F²`, reported only
    BPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma33Certificate {
    pub a_ok: bool,
    pub b_ok: bool,
    pub b_printed_ok: bool,
    pub first_violation: Option<(MonotoneQuantity, f64)>,
}

impl Lemma33Certificate {
    pub fn is_ok(&self) -> bool {
        self.a_ok && self.b_ok
    }
}

/// Checks along the grid that `A` is non-increasing and `B` non-decreasing.
pub fn lemma33_monotonicity(profile: &RadialProfile) -> Result<Lemma33Certificate> {
    let n1 = profile.dim as f64 - 1.0;
    let mut a = Vec::with_capacity(profile.grid.len());
    let mut b = Vec::with_capacity(profile.grid.len());
    let mut bp = Vec::with_capacity(profile.grid.len());
    for ((&r, &f), &fp) in profile.grid.iter().zip(&profile.f).zip(&profile.fprime) {
        let vp = profile.weight.log_derivative(r)?;
        a.push(fp * fp + n1 * f * f / (r * r));
        b.push(n1 * f * f / r + 2.0 * f * fp + vp * f * f);
        bp.push(n1 * f * f / (r * r) + 2.0 * f * fp + vp * f * f);
    }
    let scale = |v: &[f64]| v.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let first_bad = |v: &[f64], increasing: bool| -> Option<usize> {
        let tol = 1e-8 * scale(v);
        v.windows(2).position(|w| if increasing { w[1] < w[0] - tol } else { w[1] > w[0] + tol })
    };
    let a_bad = first_bad(&a, false);
    let b_bad = first_bad(&b, true);
    let bp_bad = first_bad(&bp, true);
    let first_violation = match (a_bad, b_bad) {
        (Some(i), Some(j)) if j < i => Some((MonotoneQuantity::B, profile.grid[j + 1])),
        (Some(i), _) => Some((MonotoneQuantity::A, profile.grid[i + 1])),
        (None, Some(j)) => Some((MonotoneQuantity::B, profile.grid[j + 1])),
        (None, None) => bp_bad.map(|k| (MonotoneQuantity::BPrinted, profile.grid[k + 1])),
    };
    Ok(Lemma33Certificate { a_ok: a_bad.is_none(), b_ok: b_bad.is_none(), b_printed_ok: bp_bad.is_none(), first_violation })
}

/// `∫_{B_R} ((F')² + (N−1)F²/r²) dμ`, by quadrature of the interpolated profile.
pub fn ball_gradient_energy(profile: &RadialProfile, radius: f64) -> Result<f64> {
    let w = &profile.weight;
    let dim = profile.dim;
    let integrand = |r: f64| -> f64 {
        let wr = w.potential.value(r).exp();
        profile.gradient_energy_density(r) * wr * r.powi(dim as i32 - 1)
    };
    let q = AdaptiveIntegrator::new(1e-11, 1e-300).integrate(0.0, radius, integrand);
    Ok(unit_sphere_area(dim) * q.value)
}

/// `∫_{∂B_R} F² W dH`
pub fn ball_boundary_mass(profile: &RadialProfile, radius: f64) -> Result<f64> {
    let (f, _) = profile.eval(radius);
    Ok(unit_sphere_area(profile.dim) * radius.powi(profile.dim as i32 - 1) * f * f * profile.weight.value(radius)?)
}
