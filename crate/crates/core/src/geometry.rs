//! Planar domains: simple polygons and star-shaped Fourier domains.
//!
//! Weighted volumes `|Ω|_ℓ = ∫_Ω |x|^ℓ dx` are computed by fanning the
//! boundary from the origin: every boundary piece contributes
//! `∫ K(ρ(θ)) dθ` with `K(ρ) = ∫_0^ρ h(r) r dr`, which is exact in the radial
//! direction and independent of whether the origin lies inside.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ball::unit_sphere_area;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_periodic, AdaptiveIntegrator, GaussLegendre, Quad};

pub type Point = [f64; 2];

/// Signed `∫ K(ρ(θ)) dθ` over the angles swept by the segment `p → q` seen
/// from the origin, where `ρ(θ)` is the distance to the segment along the ray.
/// Summed over a closed counterclockwise polygon this is `∫ h(|x|) dx` for
/// `K(ρ) = ∫_0^ρ h(r) r dr`.
pub fn edge_fan_integral(p: Point, q: Point, k: &dyn Fn(f64) -> f64, integ: &AdaptiveIntegrator) -> Quad {
    edge_polar_integral(p, q, &|_, rho| k(rho), integ)
}

/// Like [`edge_fan_integral`] with an angle-dependent `K(θ, ρ)`.
pub fn edge_polar_integral(p: Point, q: Point, k: &dyn Fn(f64, f64) -> f64, integ: &AdaptiveIntegrator) -> Quad {
    let cr = cross(p, q);
    let e = sub(q, p);
    let el = len(e);
    if cr.abs() <= 1e-15 * len(p).max(len(q)) * el {
        return Quad { value: 0.0, error: 0.0 };
    }
    let normal = [e[1] / el, -e[0] / el];
    let c = dot(normal, p).abs();
    let theta_p = p[1].atan2(p[0]);
    let sweep = cr.atan2(dot(p, q));
    integ.integrate(0.0, sweep, |t| {
        let th = theta_p + t;
        let rho = c / dot(normal, [th.cos(), th.sin()]).abs();
        k(th, rho)
    })
}

/// Relative tolerance targeted by the boundary and volume quadratures.
pub const QUAD_REL_TOL: f64 = 1e-12;

/// Acceptance threshold of the numeric symmetry certificates.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Counterclockwise simple polygon.
    Polygon(Vec<Point>),
    /// `R(θ) = a₀ + Σ_q (a_q cos qθ + b_q sin qθ)`; `b[0]` multiplies `sin θ`.
    Star { a: Vec<f64>, b: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub shape: Shape,
    pub id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum ShapeConfig {
    Polygon { vertices: Vec<Point> },
    Star { a: Vec<f64>, #[serde(default)] b: Vec<f64> },
    Disc { radius: f64 },
}

/// Domain record of the JSON domain files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub shape: ShapeConfig,
}

impl DomainConfig {
    pub fn build(&self) -> Result<Domain> {
        let mut d = match &self.shape {
            ShapeConfig::Polygon { vertices } => Domain::polygon(vertices.clone())?,
            ShapeConfig::Star { a, b } => Domain::star(a.clone(), b.clone())?,
            ShapeConfig::Disc { radius } => Domain::disc(*radius)?,
        };
        d.id = self.id.clone();
        Ok(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symmetries {
    pub central: bool,
    pub quarter_turn: bool,
}

fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn len(a: Point) -> f64 {
    a[0].hypot(a[1])
}

fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(sub(q2, q1), sub(p1, q1));
    let d2 = cross(sub(q2, q1), sub(p2, q1));
    let d3 = cross(sub(p2, p1), sub(q1, p1));
    let d4 = cross(sub(p2, p1), sub(q2, p1));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    let on = |a: Point, b: Point, c: Point, d: f64| {
        d == 0.0 && c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let t = (dot(sub(p, a), ab) / dot(ab, ab)).clamp(0.0, 1.0);
    len(sub(p, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

impl Domain {
    pub fn polygon(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateDomain("polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateDomain("non-finite vertex".into()));
        }
        if vertices.len() > 3 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        let n = vertices.len();
        let area2: f64 = (0..n).map(|i| cross(vertices[i], vertices[(i + 1) % n])).sum();
        let scale = vertices.iter().map(|v| len(*v)).fold(0.0, f64::max).max(1e-300);
        if area2.abs() <= 1e-14 * scale * scale {
            return Err(Error::DegenerateDomain("polygon has zero area".into()));
        }
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            if len(sub(b, a)) <= 1e-14 * scale {
                return Err(Error::DegenerateDomain(format!("repeated vertex at index {i}")));
            }
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                if segments_intersect(a, b, vertices[j], vertices[(j + 1) % n]) {
                    return Err(Error::DegenerateDomain(format!("edges {i} and {j} intersect")));
                }
            }
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        Ok(Self { shape: Shape::Polygon(vertices), id: None })
    }

    pub fn star(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::DegenerateDomain("star domain needs finite coefficients with a0".into()));
        }
        let d = Self { shape: Shape::Star { a, b }, id: None };
        let min_r = (0..4096).map(|i| d.star_radius(2.0 * PI * i as f64 / 4096.0).0).fold(f64::INFINITY, f64::min);
        if min_r <= 0.0 {
            return Err(Error::DegenerateDomain(format!("star radius function reaches {min_r} <= 0")));
        }
        Ok(d)
    }

    pub fn disc(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::DegenerateDomain(format!("disc radius {radius}")));
        }
        Ok(Self { shape: Shape::Star { a: vec![radius], b: vec![] }, id: None })
    }

    /// Axis-parallel rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::polygon(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    /// `[-h, h]²`
    pub fn square(half: f64) -> Result<Self> {
        Self::rectangle(-half, half, -half, half)
    }

    /// Plus-shaped domain: arms of half-width `w` reaching to `±l` on both axes.
    pub fn cross(w: f64, l: f64) -> Result<Self> {
        if !(0.0 < w && w < l) {
            return Err(Error::DegenerateDomain("cross needs 0 < half-width < arm length".into()));
        }
        Self::polygon(vec![
            [l, -w], [l, w], [w, w], [w, l], [-w, l], [-w, w],
            [-l, w], [-l, -w], [-w, -w], [-w, -l], [w, -l], [w, -w],
        ])
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = Some(id.into());
        self
    }

    pub fn label(&self) -> String {
        self.id.clone().unwrap_or_else(|| match &self.shape {
            Shape::Polygon(v) => format!("polygon[{}]", v.len()),
            Shape::Star { a, b } if a.len() == 1 && b.iter().all(|v| *v == 0.0) => format!("disc(r={})", a[0]),
            Shape::Star { .. } => "star".to_string(),
        })
    }

    /// `(R(θ), R'(θ))` for star domains.
    pub fn star_radius(&self, theta: f64) -> (f64, f64) {
        match &self.shape {
            Shape::Star { a, b } => {
                let mut r = a[0];
                let mut dr = 0.0;
                for (q, &aq) in a.iter().enumerate().skip(1) {
                    let (s, c) = (q as f64 * theta).sin_cos();
                    r += aq * c;
                    dr -= q as f64 * aq * s;
                }
                for (i, &bq) in b.iter().enumerate() {
                    let q = (i + 1) as f64;
                    let (s, c) = (q * theta).sin_cos();
                    r += bq * s;
                    dr += q * bq * c;
                }
                (r, dr)
            }
            Shape::Polygon(_) => panic!("star_radius called on a polygon"),
        }
    }

    /// Origin-centred dilation by `t > 0`.
    pub fn dilate(&self, t: f64) -> Self {
        let shape = match &self.shape {
            Shape::Polygon(v) => Shape::Polygon(v.iter().map(|p| [t * p[0], t * p[1]]).collect()),
            Shape::Star { a, b } => Shape::Star {
                a: a.iter().map(|x| t * x).collect(),
                b: b.iter().map(|x| t * x).collect(),
            },
        };
        Self { shape, id: self.id.clone() }
    }

    pub fn contains(&self, p: Point) -> bool {
        match &self.shape {
            Shape::Polygon(v) => {
                let n = v.len();
                let mut inside = false;
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    if (a[1] > p[1]) != (b[1] > p[1]) {
                        let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                        if p[0] < x {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
            Shape::Star { .. } => {
                let r = len(p);
                r < self.star_radius(p[1].atan2(p[0])).0
            }
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.contains([0.0, 0.0])
    }

    /// Largest `|x|` over the closure of the domain.
    pub fn max_radius(&self) -> f64 {
        match &self.shape {
            Shape::Polygon(v) => v.iter().map(|p| len(*p)).fold(0.0, f64::max),
            Shape::Star { .. } => {
                (0..8192).map(|i| self.star_radius(2.0 * PI * i as f64 / 8192.0).0).fold(0.0, f64::max)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Polygon(v) => {
                let mut d: f64 = 0.0;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        d = d.max(len(sub(v[i], v[j])));
                    }
                }
                d
            }
            Shape::Star { .. } => {
                let m = 1024;
                let pts: Vec<Point> = (0..m).map(|i| self.boundary_point(2.0 * PI * i as f64 / m as f64)).collect();
                let mut d: f64 = 0.0;
                for i in 0..m {
                    for j in i + 1..m {
                        d = d.max(len(sub(pts[i], pts[j])));
                    }
                }
                d
            }
        }
    }

    fn boundary_point(&self, theta: f64) -> Point {
        let (r, _) = self.star_radius(theta);
        [r * theta.cos(), r * theta.sin()]
    }

    /// Distance from the origin to the boundary.
    pub fn origin_distance(&self) -> f64 {
        match &self.shape {
            Shape::Polygon(v) => {
                let n = v.len();
                (0..n).map(|i| point_segment_distance([0.0, 0.0], v[i], v[(i + 1) % n])).fold(f64::INFINITY, f64::min)
            }
            Shape::Star { .. } => {
                (0..8192).map(|i| self.star_radius(2.0 * PI * i as f64 / 8192.0).0).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Fails with [`Error::OriginOnBoundary`] if `0 ∈ ∂Ω` up to `1e-9·diam`.
    pub fn validate_origin(&self) -> Result<()> {
        let d = self.origin_distance();
        if d <= 1e-9 * self.diameter() {
            return Err(Error::OriginOnBoundary { distance: d });
        }
        Ok(())
    }

    /// Symmetries read off the representation exactly.
    pub fn declared_symmetries(&self) -> Symmetries {
        match &self.shape {
            Shape::Polygon(v) => {
                let tol = 1e-12 * self.diameter().max(1e-300);
                let maps = |f: &dyn Fn(Point) -> Point| -> bool {
                    let n = v.len();
                    let target = f(v[0]);
                    (0..n).any(|shift| {
                        len(sub(v[shift], target)) <= tol && (0..n).all(|i| len(sub(v[(i + shift) % n], f(v[i]))) <= tol)
                    })
                };
                Symmetries {
                    central: maps(&|p| [-p[0], -p[1]]),
                    quarter_turn: maps(&|p| [-p[1], p[0]]),
                }
            }
            Shape::Star { a, b } => {
                let nz = |x: f64| x.abs() > 1e-15;
                let coeff_nonzero = |q: usize| (q < a.len() && nz(a[q])) || (q >= 1 && q - 1 < b.len() && nz(b[q - 1]));
                let qmax = a.len().max(b.len() + 1);
                Symmetries {
                    central: (1..qmax).filter(|q| q % 2 == 1).all(|q| !coeff_nonzero(q)),
                    quarter_turn: (1..qmax).filter(|q| q % 4 != 0).all(|q| !coeff_nonzero(q)),
                }
            }
        }
    }

    /// Nearest boundary point along the ray through `p` (star domains); polygons
    /// return `p` unchanged.
    pub fn project_to_boundary(&self, p: Point) -> Point {
        match &self.shape {
            Shape::Polygon(_) => p,
            Shape::Star { .. } => self.boundary_point(p[1].atan2(p[0])),
        }
    }

    /// Boundary sampled with spacing at most `h`, counterclockwise.
    pub fn boundary_polygon(&self, h: f64) -> Vec<Point> {
        match &self.shape {
            Shape::Polygon(v) => {
                let n = v.len();
                let mut out = Vec::new();
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    let k = (len(sub(b, a)) / h).ceil().max(1.0) as usize;
                    for s in 0..k {
                        let t = s as f64 / k as f64;
                        out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                    }
                }
                out
            }
            Shape::Star { .. } => {
                // arclength-uniform sampling
                let m = 8192;
                let speed = |t: f64| {
                    let (r, dr) = self.star_radius(t);
                    r.hypot(dr)
                };
                let dt = 2.0 * PI / m as f64;
                let mut cum = vec![0.0; m + 1];
                for i in 0..m {
                    let t = i as f64 * dt;
                    cum[i + 1] = cum[i] + 0.5 * dt * (speed(t) + speed(t + dt));
                }
                let total = cum[m];
                let k = (total / h).ceil().max(8.0) as usize;
                let mut out = Vec::with_capacity(k);
                let mut j = 0;
                for s in 0..k {
                    let target = total * s as f64 / k as f64;
                    while cum[j + 1] < target {
                        j += 1;
                    }
                    let frac = if cum[j + 1] > cum[j] { (target - cum[j]) / (cum[j + 1] - cum[j]) } else { 0.0 };
                    out.push(self.boundary_point((j as f64 + frac) * dt));
                }
                out
            }
        }
    }

    /// `∫_Ω h(|x|) dx` given `K(ρ) = ∫_0^ρ h(r) r dr`.
    pub fn radial_volume_integral(&self, k: &dyn Fn(f64) -> f64) -> Quad {
        match &self.shape {
            Shape::Polygon(v) => {
                let integ = AdaptiveIntegrator::new(QUAD_REL_TOL, 1e-300);
                let n = v.len();
                let mut total = Quad { value: 0.0, error: 0.0 };
                for i in 0..n {
                    total = total + edge_fan_integral(v[i], v[(i + 1) % n], k, &integ);
                }
                total
            }
            Shape::Star { .. } => integrate_periodic(|t| k(self.star_radius(t).0), QUAD_REL_TOL),
        }
    }

    /// `∫_Ω g(x) dx` in polar coordinates about the origin: an outer angular
    /// quadrature of the adaptive radial integrals `∫_0^ρ(θ) g r dr`. Suited to
    /// integrands with a power singularity at the origin.
    pub fn polar_integral(&self, g: &dyn Fn(Point) -> f64) -> Quad {
        let inner = AdaptiveIntegrator::new(1e-12, 1e-300);
        let k = |th: f64, rho: f64| {
            let (s, c) = th.sin_cos();
            inner.integrate(0.0, rho, |r| g([r * c, r * s]) * r).value
        };
        match &self.shape {
            Shape::Polygon(v) => {
                let outer = AdaptiveIntegrator::new(1e-11, 1e-300);
                let n = v.len();
                let mut total = Quad { value: 0.0, error: 0.0 };
                for i in 0..n {
                    total = total + edge_polar_integral(v[i], v[(i + 1) % n], &k, &outer);
                }
                total
            }
            Shape::Star { .. } => integrate_periodic(|t| k(t, self.star_radius(t).0), 1e-11),
        }
    }

    /// `∫_∂Ω g(x) dH¹`
    pub fn boundary_integral(&self, g: &dyn Fn(Point) -> f64) -> Quad {
        match &self.shape {
            Shape::Polygon(v) => {
                let integ = AdaptiveIntegrator::new(QUAD_REL_TOL, 1e-300);
                let n = v.len();
                let mut total = Quad { value: 0.0, error: 0.0 };
                for i in 0..n {
                    let (p, q) = (v[i], v[(i + 1) % n]);
                    let e = sub(q, p);
                    let el = len(e);
                    let part = integ.integrate(0.0, 1.0, |t| g([p[0] + t * e[0], p[1] + t * e[1]]) * el);
                    total = total + part;
                }
                total
            }
            Shape::Star { .. } => integrate_periodic(
                |t| {
                    let (r, dr) = self.star_radius(t);
                    g([r * t.cos(), r * t.sin()]) * r.hypot(dr)
                },
                QUAD_REL_TOL,
            ),
        }
    }

    /// Angular intervals `[θa, θb]` (with `θb > θa`, total length ≤ 2π) of
    /// `Ω ∩ ∂B_r`.
    pub fn arcs_at_radius(&self, r: f64) -> Result<Vec<(f64, f64)>> {
        if !(r > 0.0) {
            return Err(Error::DegenerateDomain(format!("arc radius {r}")));
        }
        let mut crossings: Vec<f64> = Vec::new();
        let wrap = |t: f64| t.rem_euclid(2.0 * PI);
        match &self.shape {
            Shape::Polygon(v) => {
                let n = v.len();
                for i in 0..n {
                    let (p, q) = (v[i], v[(i + 1) % n]);
                    let d = sub(q, p);
                    let a = dot(d, d);
                    let b = 2.0 * dot(p, d);
                    let c = dot(p, p) - r * r;
                    let disc = b * b - 4.0 * a * c;
                    if disc < 0.0 {
                        continue;
                    }
                    let sq = disc.sqrt();
                    for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                        if (0.0..=1.0).contains(&t) {
                            let x = [p[0] + t * d[0], p[1] + t * d[1]];
                            crossings.push(wrap(x[1].atan2(x[0])));
                        }
                    }
                }
            }
            Shape::Star { .. } => {
                let m = 4096;
                let g = |t: f64| self.star_radius(t).0 - r;
                let dt = 2.0 * PI / m as f64;
                for i in 0..m {
                    let (t0, t1) = (i as f64 * dt, (i + 1) as f64 * dt);
                    let (g0, g1) = (g(t0), g(t1));
                    if g0 == 0.0 {
                        crossings.push(t0);
                    } else if g0.signum() != g1.signum() && g1 != 0.0 {
                        let t = crate::quadrature::bisect(g, t0, t1, 1e-12)
                            .ok_or_else(|| Error::DegenerateDomain("arc bisection lost its bracket".into()))?;
                        crossings.push(wrap(t));
                    }
                }
            }
        }
        crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        crossings.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        let inside = |t: f64| self.contains([r * t.cos(), r * t.sin()]);
        if crossings.is_empty() {
            return Ok(if inside(0.0) { vec![(0.0, 2.0 * PI)] } else { vec![] });
        }
        let k = crossings.len();
        let mut arcs = Vec::new();
        for i in 0..k {
            let a = crossings[i];
            let b = if i + 1 < k { crossings[i + 1] } else { crossings[0] + 2.0 * PI };
            if b - a < 1e-14 {
                continue;
            }
            if inside(0.5 * (a + b)) {
                arcs.push((a, b));
            }
        }
        Ok(arcs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum SymmetryStatus {
    /// Exact symmetry of the representation.
    Analytic,
    /// Sampled moments within tolerance; the value is the largest relative moment.
    Numeric(f64),
    Fail(f64),
}

impl SymmetryStatus {
    pub fn passed(&self) -> bool {
        !matches!(self, SymmetryStatus::Fail(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryCertificate {
    pub s1: SymmetryStatus,
    pub s2: SymmetryStatus,
    pub radii_sampled: usize,
}

/// Arc moments `(∫ 1, ∫ x₁, ∫ x₂, ∫ x₁², ∫ x₂², ∫ x₁x₂)` over `Ω ∩ ∂B_r`.
fn arc_moments(dom: &Domain, r: f64, rule: &GaussLegendre) -> Result<[f64; 6]> {
    let mut m = [0.0; 6];
    for (a, b) in dom.arcs_at_radius(r)? {
        let pieces = ((b - a) / (PI / 4.0)).ceil().max(1.0) as usize;
        let step = (b - a) / pieces as f64;
        for p in 0..pieces {
            let lo = a + p as f64 * step;
            for (t, w) in rule.mapped(lo, lo + step) {
                let (s, c) = t.sin_cos();
                let ds = r * w;
                let (x, y) = (r * c, r * s);
                m[0] += ds;
                m[1] += x * ds;
                m[2] += y * ds;
                m[3] += x * x * ds;
                m[4] += y * y * ds;
                m[5] += x * y * ds;
            }
        }
    }
    Ok(m)
}

fn sample_radii(dom: &Domain, n_radii: usize) -> Vec<f64> {
    let rmax = dom.max_radius();
    (0..n_radii).map(|i| (i as f64 + 0.5) / n_radii as f64 * rmax).collect()
}

/// Balanced-slice condition: `∫_{Ω∩∂B_r} x_i dH = 0` for all sampled `r`.
pub fn check_s1(dom: &Domain, n_radii: usize, n_angles: usize) -> Result<SymmetryStatus> {
    if dom.declared_symmetries().central {
        return Ok(SymmetryStatus::Analytic);
    }
    if n_radii == 0 || n_angles == 0 {
        return Err(Error::InvalidArgument("need at least one radius and one angle".into()));
    }
    let rule = GaussLegendre::new(n_angles);
    let mut worst = 0.0f64;
    for r in sample_radii(dom, n_radii) {
        let m = arc_moments(dom, r, &rule)?;
        if m[0] <= 0.0 {
            continue;
        }
        let rel = m[1].abs().max(m[2].abs()) / (r * m[0]);
        worst = worst.max(rel);
    }
    Ok(if worst <= SYMMETRY_TOL { SymmetryStatus::Numeric(worst) } else { SymmetryStatus::Fail(worst) })
}

/// Isotropic second moments: `∫_{Ω∩∂B_r} x_i x_j dH = C δ_ij` for all sampled `r`.
pub fn check_s2(dom: &Domain, n_radii: usize, n_angles: usize) -> Result<SymmetryStatus> {
    if dom.declared_symmetries().quarter_turn {
        return Ok(SymmetryStatus::Analytic);
    }
    if n_radii == 0 || n_angles == 0 {
        return Err(Error::InvalidArgument("need at least one radius and one angle".into()));
    }
    let rule = GaussLegendre::new(n_angles);
    let mut worst = 0.0f64;
    for r in sample_radii(dom, n_radii) {
        let m = arc_moments(dom, r, &rule)?;
        let trace = m[3] + m[4];
        if trace <= 0.0 {
            continue;
        }
        let rel = (m[3] - m[4]).abs().max(2.0 * m[5].abs()) / trace;
        worst = worst.max(rel);
    }
    Ok(if worst <= SYMMETRY_TOL { SymmetryStatus::Numeric(worst) } else { SymmetryStatus::Fail(worst) })
}

pub fn symmetry_certificate(dom: &Domain, n_radii: usize, n_angles: usize) -> Result<SymmetryCertificate> {
    Ok(SymmetryCertificate { s1: check_s1(dom, n_radii, n_angles)?, s2: check_s2(dom, n_radii, n_angles)?, radii_sampled: n_radii })
}

/// `|Ω|_ℓ = ∫_Ω |x|^ℓ dx` with its quadrature error estimate.
pub fn weighted_volume_quad(dom: &Domain, ell: f64) -> Result<Quad> {
    if ell <= -2.0 {
        return Err(Error::IntegrabilityViolation { ell });
    }
    let e = ell + 2.0;
    let q = dom.radial_volume_integral(&|rho| rho.powf(e) / e);
    if !(q.value > 0.0) {
        return Err(Error::DegenerateDomain(format!("weighted volume {} is not positive", q.value)));
    }
    Ok(q)
}

pub fn weighted_volume(dom: &Domain, ell: f64) -> Result<f64> {
    Ok(weighted_volume_quad(dom, ell)?.value)
}

/// `P_k(Ω) = ∫_∂Ω |x|^k dH¹` with its quadrature error estimate.
pub fn weighted_perimeter_quad(dom: &Domain, k: f64) -> Result<Quad> {
    dom.validate_origin()?;
    Ok(dom.boundary_integral(&|x| len(x).powf(k)))
}

pub fn weighted_perimeter(dom: &Domain, k: f64) -> Result<f64> {
    Ok(weighted_perimeter_quad(dom, k)?.value)
}

/// Radius of the origin-centred ball with `|B_R|_ℓ = vol_ell`.
pub fn equivalent_radius(vol_ell: f64, ell: f64, dim: usize) -> Result<f64> {
    let n = dim as f64;
    if !(vol_ell > 0.0) {
        return Err(Error::InvalidArgument(format!("weighted volume must be positive, got {vol_ell}")));
    }
    if ell <= -n {
        return Err(Error::EllOutOfRange { ell, dim });
    }
    Ok(((ell + n) * vol_ell / unit_sphere_area(dim)).powf(1.0 / (ell + n)))
}

/// `|B_R|_ℓ = N ω_N R^{ℓ+N}/(ℓ+N)`
pub fn ball_weighted_volume(radius: f64, ell: f64, dim: usize) -> f64 {
    let n = dim as f64;
    unit_sphere_area(dim) * radius.powf(ell + n) / (ell + n)
}

/// `P_k(B_R) = N ω_N R^{k+N−1}`
pub fn ball_weighted_perimeter(radius: f64, k: f64, dim: usize) -> f64 {
    unit_sphere_area(dim) * radius.powf(k + dim as f64 - 1.0)
}
