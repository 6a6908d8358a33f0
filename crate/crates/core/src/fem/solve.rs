//! Boundary Schur complement and the Steklov eigenvalue solve.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assemble::{assemble, SteklovSystem};
use super::eigen::{generalized_symmetric_eigen, DenseMatrix};
use super::mesh::{triangulate, Mesh};
use super::sparse::EnvelopeCholesky;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::weights::WeightSpec;

/// Relative size of `γ₀` accepted as the constant mode.
pub const ZERO_MODE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// `γ₀ ≤ γ₁ ≤ … ≤ γ_n`; index 0 is the constant mode.
    pub eigenvalues: Vec<f64>,
    /// Boundary traces, `B`-orthonormal, ordered like `boundary_dofs`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖S x − γ B x‖ / ‖x‖` per pair.
    pub residuals: Vec<f64>,
    pub h: f64,
    pub n_vertices: usize,
    pub n_boundary: usize,
    /// Largest `|R(u) − γ| / γ₁` over the returned pairs, with `u` the discrete
    /// harmonic extension.
    pub rayleigh_defect: f64,
    /// Largest off-diagonal entry of the boundary and energy Gram matrices.
    pub orthogonality: f64,
    /// `‖S·1‖_∞ / ‖S‖_max`
    pub zero_mode_residual: f64,
    /// Full nodal vectors of the harmonic extensions.
    #[serde(skip)]
    pub modes: Vec<Vec<f64>>,
}

impl SpectrumResult {
    /// `γ_i` for `i ≥ 1`.
    pub fn gamma(&self, i: usize) -> f64 {
        self.eigenvalues[i]
    }

    pub fn gamma1(&self) -> f64 {
        self.eigenvalues[1]
    }

    pub fn nontrivial(&self) -> &[f64] {
        &self.eigenvalues[1..]
    }
}

/// Boundary Schur complement `S = A_bb − A_bi A_ii⁻¹ A_ib` with the interior
/// factorization kept for harmonic extension.
pub struct SchurComplement {
    pub s: DenseMatrix,
    pub b: DenseMatrix,
    chol: Option<EnvelopeCholesky>,
    a_bi: super::sparse::CsrMatrix,
    boundary: Vec<usize>,
    interior: Vec<usize>,
    n: usize,
}

impl SchurComplement {
    pub fn new(sys: &SteklovSystem) -> Result<Self> {
        let n = sys.a.nrows;
        let nb = sys.boundary_dofs.len();
        let ni = sys.interior_dofs.len();
        let mut bmap = vec![usize::MAX; n];
        let mut imap = vec![usize::MAX; n];
        for (k, &v) in sys.boundary_dofs.iter().enumerate() {
            bmap[v] = k;
        }
        for (k, &v) in sys.interior_dofs.iter().enumerate() {
            imap[v] = k;
        }
        let a_bi = sys.a.extract(&sys.boundary_dofs, &imap, ni);
        let a_bb = sys.a.extract(&sys.boundary_dofs, &bmap, nb);
        let b_bb = sys.b.extract(&sys.boundary_dofs, &bmap, nb);
        let chol = if ni > 0 {
            Some(EnvelopeCholesky::factor(&sys.a.extract(&sys.interior_dofs, &imap, ni))?)
        } else {
            None
        };
        let columns: Vec<Vec<f64>> = (0..nb)
            .into_par_iter()
            .map(|j| {
                let mut col = vec![0.0; nb];
                for (i, v) in a_bb.row(j) {
                    col[i] = v;
                }
                if let Some(ch) = &chol {
                    // A symmetric: column j of A_ib is row j of A_bi
                    let mut rhs = vec![0.0; ni];
                    for (i, v) in a_bi.row(j) {
                        rhs[i] = v;
                    }
                    let x = ch.solve(&rhs);
                    for (i, c) in col.iter_mut().enumerate() {
                        *c -= a_bi.row(i).map(|(k, v)| v * x[k]).sum::<f64>();
                    }
                }
                col
            })
            .collect();
        let mut s = DenseMatrix::zeros(nb);
        for (j, col) in columns.iter().enumerate() {
            for i in 0..nb {
                s[(i, j)] = col[i];
            }
        }
        s.symmetrize();
        let mut b = DenseMatrix::zeros(nb);
        for i in 0..nb {
            for (j, v) in b_bb.row(i) {
                b[(i, j)] = v;
            }
        }
        Ok(Self { s, b, chol, a_bi, boundary: sys.boundary_dofs.clone(), interior: sys.interior_dofs.clone(), n })
    }

    /// Nodal vector of the discrete harmonic extension of boundary values `xb`.
    pub fn extend(&self, xb: &[f64]) -> Vec<f64> {
        let mut u = vec![0.0; self.n];
        for (k, &v) in self.boundary.iter().enumerate() {
            u[v] = xb[k];
        }
        if let Some(ch) = &self.chol {
            let mut rhs = vec![0.0; self.interior.len()];
            // A_ib x_b = A_biᵀ x_b
            for (j, &xj) in xb.iter().enumerate() {
                for (i, v) in self.a_bi.row(j) {
                    rhs[i] -= v * xj;
                }
            }
            let ui = ch.solve(&rhs);
            for (k, &v) in self.interior.iter().enumerate() {
                u[v] = ui[k];
            }
        }
        u
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lowest `n_eigs + 1` eigenpairs of the pencil, the constant mode first.
pub fn solve_steklov(sys: &SteklovSystem, n_eigs: usize) -> Result<SpectrumResult> {
    if n_eigs < 1 {
        return Err(Error::InvalidArgument("n_eigs must be at least 1".into()));
    }
    let schur = SchurComplement::new(sys)?;
    let nb = schur.s.n;
    if nb < n_eigs + 1 {
        return Err(Error::InvalidArgument(format!("only {nb} boundary unknowns for {} eigenpairs", n_eigs + 1)));
    }
    let eig = generalized_symmetric_eigen(&schur.s, &schur.b)?;
    let count = n_eigs + 1;
    let eigenvalues: Vec<f64> = eig.values[..count].to_vec();
    let eigenvectors: Vec<Vec<f64>> = (0..count).map(|k| eig.vector(k)).collect();

    let gamma1 = eigenvalues[1];
    if !(gamma1 > 0.0) || eigenvalues[0].abs() > ZERO_MODE_TOL * gamma1 {
        return Err(Error::TrivialModeMismatch(format!("gamma0 = {} against gamma1 = {gamma1}", eigenvalues[0])));
    }
    let x0 = &eigenvectors[0];
    let (lo, hi) = x0.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let amp = lo.abs().max(hi.abs());
    if hi - lo > 1e-6 * amp {
        return Err(Error::TrivialModeMismatch(format!("lowest eigenvector varies by {} relative", (hi - lo) / amp)));
    }

    let mut residuals = Vec::with_capacity(count);
    for (g, x) in eigenvalues.iter().zip(&eigenvectors) {
        let sx = schur.s.mul_vec(x);
        let bx = schur.b.mul_vec(x);
        let r: f64 = sx.iter().zip(&bx).map(|(s, b)| (s - g * b).powi(2)).sum::<f64>().sqrt();
        residuals.push(r / dot(x, x).sqrt());
    }

    let modes: Vec<Vec<f64>> = eigenvectors.iter().map(|x| schur.extend(x)).collect();
    let au: Vec<Vec<f64>> = modes.iter().map(|u| sys.a.mul_vec(u)).collect();
    let bu: Vec<Vec<f64>> = modes.iter().map(|u| sys.b.mul_vec(u)).collect();
    let gmax = eigenvalues[count - 1].max(gamma1);
    let mut rayleigh_defect = 0.0f64;
    let mut orthogonality = 0.0f64;
    for i in 0..count {
        let num = dot(&modes[i], &au[i]);
        let den = dot(&modes[i], &bu[i]);
        rayleigh_defect = rayleigh_defect.max((num / den - eigenvalues[i]).abs() / gamma1);
        for j in 0..i {
            orthogonality = orthogonality.max(dot(&modes[i], &bu[j]).abs());
            orthogonality = orthogonality.max(dot(&modes[i], &au[j]).abs() / gmax);
        }
    }
    let ones = vec![1.0; nb];
    let s1 = schur.s.mul_vec(&ones);
    let zero_mode_residual = s1.iter().fold(0.0f64, |m, v| m.max(v.abs())) / schur.s.max_abs();

    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        residuals,
        h: sys.h,
        n_vertices: sys.a.nrows,
        n_boundary: nb,
        rayleigh_defect,
        orthogonality,
        zero_mode_residual,
        modes,
    })
}

/// `Σ_{i=1..N} 1/γ_i(Ω) − N/γ₁(B_R)`
pub fn harmonic_mean_check(res: &SpectrumResult, gamma1_ball: f64, dim: usize) -> Result<f64> {
    if res.eigenvalues.len() < dim + 1 {
        return Err(Error::InvalidArgument(format!("need {dim} nontrivial eigenvalues")));
    }
    let s: f64 = res.eigenvalues[1..=dim].iter().map(|g| 1.0 / g).sum();
    Ok(s - dim as f64 / gamma1_ball)
}

/// Assembles and solves on a given mesh.
pub fn solve_on_mesh(mesh: &Mesh, spec: &WeightSpec, n_eigs: usize) -> Result<SpectrumResult> {
    let sys = assemble(mesh, &spec.interior(), &spec.trace())?;
    solve_steklov(&sys, n_eigs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub h: f64,
    pub n_vertices: usize,
    pub n_boundary: usize,
    /// Nontrivial eigenvalues `γ₁ … γ_n`.
    pub eigenvalues: Vec<f64>,
}

/// Eigenvalues on a sequence of uniformly refined meshes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub levels: Vec<RefinementLevel>,
    /// Observed order per eigenvalue from the last three levels.
    pub rates: Vec<Option<f64>>,
    /// Estimated discretization error of the finest eigenvalues.
    pub error_estimates: Vec<Option<f64>>,
    pub finest: SpectrumResult,
}

impl ConvergenceStudy {
    pub fn gamma(&self, i: usize) -> f64 {
        self.finest.eigenvalues[i]
    }
}

/// Assumed order when only two levels are available.
const DEFAULT_RATE: f64 = 2.0;

/// Observed order of three successive values at halved mesh sizes.
pub fn observed_rate(a: f64, b: f64, c: f64) -> Option<f64> {
    let d1 = (a - b).abs();
    let d2 = (b - c).abs();
    if d1 == 0.0 || d2 == 0.0 {
        return None;
    }
    let p = (d1 / d2).log2();
    p.is_finite().then_some(p)
}

/// Richardson-style bound `2|Δ| / (2^p − 1)` on the error of the finest value,
/// with the order clamped to `[1, 3]`.
pub fn fem_error_estimate(values: &[f64], rate: Option<f64>) -> Option<f64> {
    let n = values.len();
    if n < 2 {
        return None;
    }
    let p = rate.unwrap_or(DEFAULT_RATE).clamp(1.0, 3.0);
    let delta = (values[n - 1] - values[n - 2]).abs();
    Some(2.0 * delta / (2f64.powf(p) - 1.0))
}

/// Meshes `dom` at `h`, refines `refinements` times and solves on every level.
pub fn convergence_study(dom: &Domain, spec: &WeightSpec, h: f64, refinements: usize, n_eigs: usize) -> Result<ConvergenceStudy> {
    dom.validate_origin()?;
    let mut mesh = triangulate(dom, h)?;
    let mut levels = Vec::with_capacity(refinements + 1);
    let mut finest = None;
    for level in 0..=refinements {
        if level > 0 {
            mesh = mesh.refine_uniform(dom)?;
        }
        let res = solve_on_mesh(&mesh, spec, n_eigs)?;
        levels.push(RefinementLevel {
            h: mesh.h,
            n_vertices: res.n_vertices,
            n_boundary: res.n_boundary,
            eigenvalues: res.nontrivial().to_vec(),
        });
        finest = Some(res);
    }
    let finest = finest.expect("at least one level");
    let mut rates = Vec::with_capacity(n_eigs);
    let mut error_estimates = Vec::with_capacity(n_eigs);
    for k in 0..n_eigs {
        let vals: Vec<f64> = levels.iter().map(|l| l.eigenvalues[k]).collect();
        let n = vals.len();
        let rate = if n >= 3 { observed_rate(vals[n - 3], vals[n - 2], vals[n - 1]) } else { None };
        rates.push(rate);
        error_estimates.push(fem_error_estimate(&vals, rate));
    }
    Ok(ConvergenceStudy { levels, rates, error_estimates, finest })
}
