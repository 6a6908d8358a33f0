//! P1 stiffness and boundary mass assembly.

use rayon::prelude::*;

use super::mesh::Mesh;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::geometry::{edge_fan_integral, Point};
use crate::quadrature::{AdaptiveIntegrator, GaussLegendre, TRIANGLE_DEG4};
use crate::weights::RadialWeight;

/// Stiffness `A` and boundary mass `B` of the weighted Steklov pencil.
#[derive(Debug, Clone)]
pub struct SteklovSystem {
    /// `∫_Ω w ∇φ_i·∇φ_j dx`
    pub a: CsrMatrix,
    /// `∫_∂Ω ϱ φ_i φ_j dH` with `ϱ` the boundary density of the Rayleigh quotient.
    pub b: CsrMatrix,
    pub boundary_dofs: Vec<usize>,
    pub interior_dofs: Vec<usize>,
    pub h: f64,
}

/// Distance ratio below which power weights are integrated exactly along rays.
const NEAR_ORIGIN_RATIO: f64 = 3.0;

fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

/// `∫_T w dx` for one triangle.
fn element_weight_integral(tri: [Point; 3], w: &RadialWeight, integ: &AdaptiveIntegrator) -> Result<f64> {
    let [p0, p1, p2] = tri;
    let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]));
    if let Some(e) = w.power_exponent() {
        if e == 0.0 {
            return Ok(area);
        }
        let diam = [(p0, p1), (p1, p2), (p2, p0)].iter().map(|(a, b)| norm([a[0] - b[0], a[1] - b[1]])).fold(0.0, f64::max);
        let near = tri.iter().map(|p| norm(*p)).fold(f64::INFINITY, f64::min);
        if near <= NEAR_ORIGIN_RATIO * diam {
            if e <= -2.0 {
                return Err(Error::IntegrabilityViolation { ell: e });
            }
            let k = |rho: f64| rho.powf(e + 2.0) / (e + 2.0);
            let v = edge_fan_integral(p0, p1, &k, integ).value
                + edge_fan_integral(p1, p2, &k, integ).value
                + edge_fan_integral(p2, p0, &k, integ).value;
            return Ok(v);
        }
    }
    let mut s = 0.0;
    for (bary, wt) in TRIANGLE_DEG4 {
        let x = [
            bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0],
            bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1],
        ];
        s += wt * w.eval(&x)?;
    }
    Ok(s * area)
}

/// Element stiffness `(∫_T w) ∇φ_i·∇φ_j`.
fn element_stiffness(tri: [Point; 3], w: &RadialWeight, integ: &AdaptiveIntegrator) -> Result<[[f64; 3]; 3]> {
    let [p0, p1, p2] = tri;
    let area2 = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]);
    let grads = [
        [(p1[1] - p2[1]) / area2, (p2[0] - p1[0]) / area2],
        [(p2[1] - p0[1]) / area2, (p0[0] - p2[0]) / area2],
        [(p0[1] - p1[1]) / area2, (p1[0] - p0[0]) / area2],
    ];
    let mass = element_weight_integral(tri, w, integ)?;
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = mass * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
        }
    }
    // exact zero row sums
    for i in 0..3 {
        let off = k[i][(i + 1) % 3] + k[i][(i + 2) % 3];
        k[i][i] = -off;
    }
    Ok(k)
}

/// Edge mass `∫_e ϱ φ_a φ_b ds` with a 4-point Gauss rule.
fn edge_mass(a: Point, b: Point, rho: &RadialWeight, rule: &GaussLegendre) -> Result<[[f64; 2]; 2]> {
    let len = norm([b[0] - a[0], b[1] - a[1]]);
    let mut m = [[0.0; 2]; 2];
    for (t, wt) in rule.mapped(0.0, 1.0) {
        let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
        let d = rho.eval(&x)? * wt * len;
        let phi = [1.0 - t, t];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] += d * phi[i] * phi[j];
            }
        }
    }
    Ok(m)
}

/// Assembles the pencil for interior weight `w` and boundary density `rho`.
pub fn assemble(mesh: &Mesh, w: &RadialWeight, rho: &RadialWeight) -> Result<SteklovSystem> {
    let n = mesh.n_vertices();
    let integ = AdaptiveIntegrator::new(1e-13, 1e-300);
    let elems: Vec<Result<[[f64; 3]; 3]>> = mesh
        .triangles
        .par_iter()
        .map(|t| element_stiffness([mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]], w, &integ))
        .collect();
    let mut trip = Vec::with_capacity(9 * mesh.triangles.len());
    for (t, k) in mesh.triangles.iter().zip(elems) {
        let k = k?;
        for i in 0..3 {
            for j in 0..3 {
                trip.push((t[i], t[j], k[i][j]));
            }
        }
    }
    let a = CsrMatrix::from_triplets(n, n, &trip);

    let rule = GaussLegendre::new(4);
    let mut btrip = Vec::with_capacity(4 * mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let m = edge_mass(mesh.vertices[e[0]], mesh.vertices[e[1]], rho, &rule)?;
        for i in 0..2 {
            for j in 0..2 {
                btrip.push((e[i], e[j], m[i][j]));
            }
        }
    }
    let b = CsrMatrix::from_triplets(n, n, &btrip);
    let boundary_dofs = mesh.boundary_vertices();
    let mut is_b = vec![false; n];
    for &v in &boundary_dofs {
        is_b[v] = true;
    }
    let interior_dofs = (0..n).filter(|&v| !is_b[v]).collect();
    Ok(SteklovSystem { a, b, boundary_dofs, interior_dofs, h: mesh.h })
}

/// `∫_Ω g dx` by the degree-4 rule on each triangle of the mesh.
pub fn mesh_integral(mesh: &Mesh, g: &dyn Fn(Point) -> f64) -> f64 {
    let mut total = 0.0;
    for t in &mesh.triangles {
        let [p0, p1, p2] = [mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]];
        let area = 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p1[1] - p0[1]) * (p2[0] - p0[0]));
        let mut s = 0.0;
        for (bary, wt) in TRIANGLE_DEG4 {
            let x = [
                bary[0] * p0[0] + bary[1] * p1[0] + bary[2] * p2[0],
                bary[0] * p0[1] + bary[1] * p1[1] + bary[2] * p2[1],
            ];
            s += wt * g(x);
        }
        total += s * area;
    }
    total
}
