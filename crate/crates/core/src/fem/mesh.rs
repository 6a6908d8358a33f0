//! Conforming triangle meshes of planar domains.

use std::collections::HashMap;

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point, Shape};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise index triples.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary edges oriented so that the domain lies on their left.
    pub boundary_edges: Vec<[usize; 2]>,
    /// Target edge length.
    pub h: f64,
    /// Index of the vertex placed at the origin, if any.
    pub origin_vertex: Option<usize>,
}

fn signed_area2(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Minimum angle requested from the Delaunay refinement.
const REFINE_ANGLE_DEG: f64 = 25.0;

/// Builds a quality mesh with edge length about `h`; the origin is a vertex
/// whenever it lies inside the domain.
pub fn triangulate(dom: &Domain, h: f64) -> Result<Mesh> {
    let diam = dom.diameter();
    if !(h > 0.0 && h.is_finite()) || h >= diam / 4.0 {
        return Err(Error::MeshFailure(format!("mesh size {h} must lie in (0, diameter/4 = {})", diam / 4.0)));
    }
    let ring = dom.boundary_polygon(h);
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    cdt.add_constraint_edges(ring.iter().map(|p| Point2::new(p[0], p[1])), true)
        .map_err(|e| Error::MeshFailure(format!("boundary insertion failed: {e:?}")))?;
    if dom.contains_origin() && dom.origin_distance() > 1e-9 * diam {
        cdt.insert(Point2::new(0.0, 0.0)).map_err(|e| Error::MeshFailure(format!("origin insertion failed: {e:?}")))?;
    }
    let max_area = 3f64.sqrt() / 4.0 * h * h;
    let expected = (8.0 * diam * diam / (h * h)) as usize + 10_000;
    let result = cdt.refine(
        RefinementParameters::new()
            .with_max_allowed_area(max_area)
            .with_angle_limit(AngleLimit::from_deg(REFINE_ANGLE_DEG))
            .with_max_additional_vertices(expected)
            .exclude_outer_faces(true),
    );
    if !result.refinement_complete {
        return Err(Error::MeshFailure("Delaunay refinement did not complete".into()));
    }
    let excluded: std::collections::HashSet<_> = result.excluded_faces.iter().copied().collect();

    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let vs = face.vertices();
        let mut tri = [0usize; 3];
        for (slot, v) in vs.iter().enumerate() {
            let key = v.fix().index();
            let next = vertices.len();
            let id = *index.entry(key).or_insert(next);
            if id == next {
                let p = v.position();
                vertices.push([p.x, p.y]);
            }
            tri[slot] = id;
        }
        triangles.push(tri);
    }
    if triangles.is_empty() {
        return Err(Error::MeshFailure("no interior triangles".into()));
    }
    let origin_vertex = vertices.iter().position(|p| p[0] == 0.0 && p[1] == 0.0);
    let mut mesh = Mesh::from_parts(vertices, triangles, h, origin_vertex)?;
    // refinement splits boundary chords at their midpoints; put those back on
    // the curve so later refinements stay nested on the true boundary
    if matches!(dom.shape, Shape::Star { .. }) {
        for v in mesh.boundary_vertices() {
            mesh.vertices[v] = dom.project_to_boundary(mesh.vertices[v]);
        }
        mesh.check_orientation()?;
    }
    Ok(mesh)
}

impl Mesh {
    /// Orients triangles counterclockwise and extracts the boundary.
    pub fn from_parts(vertices: Vec<Point>, mut triangles: Vec<[usize; 3]>, h: f64, origin_vertex: Option<usize>) -> Result<Self> {
        for t in triangles.iter_mut() {
            let a2 = signed_area2(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if a2 == 0.0 {
                return Err(Error::MeshFailure("degenerate triangle".into()));
            }
            if a2 < 0.0 {
                t.swap(1, 2);
            }
        }
        let mut count: HashMap<(usize, usize), (usize, [usize; 2])> = HashMap::new();
        for t in &triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                count.entry(key).or_insert((0, [a, b])).0 += 1;
            }
        }
        let mut boundary_edges: Vec<[usize; 2]> =
            count.values().filter(|(c, _)| *c == 1).map(|(_, e)| *e).collect();
        boundary_edges.sort_unstable();
        if boundary_edges.is_empty() {
            return Err(Error::MeshFailure("mesh has no boundary".into()));
        }
        Ok(Self { vertices, triangles, boundary_edges, h, origin_vertex })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Sorted, deduplicated boundary vertex indices.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.boundary_edges.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| 0.5 * signed_area2(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]))
            .sum()
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut best = 180.0f64;
        for t in &self.triangles {
            for i in 0..3 {
                let a = self.vertices[t[i]];
                let b = self.vertices[t[(i + 1) % 3]];
                let c = self.vertices[t[(i + 2) % 3]];
                let (u, v) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
                let ang = (u[0] * v[1] - u[1] * v[0]).abs().atan2(u[0] * v[0] + u[1] * v[1]);
                best = best.min(ang.to_degrees());
            }
        }
        best
    }

    /// Longest edge.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |i| (t[i], t[(i + 1) % 3])))
            .map(|(a, b)| dist(self.vertices[a], self.vertices[b]))
            .fold(0.0, f64::max)
    }

    /// Uniform red refinement: every triangle splits into four. New boundary
    /// midpoints are moved onto the true boundary of `dom`.
    pub fn refine_uniform(&self, dom: &Domain) -> Result<Mesh> {
        let mut vertices = self.vertices.clone();
        let boundary: std::collections::HashSet<(usize, usize)> =
            self.boundary_edges.iter().map(|e| (e[0].min(e[1]), e[0].max(e[1]))).collect();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                let mut m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
                if boundary.contains(&key) {
                    m = dom.project_to_boundary(m);
                }
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let [a, b, c] = *t;
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mesh = Mesh::from_parts(vertices, triangles, 0.5 * self.h, self.origin_vertex)?;
        mesh.check_orientation()?;
        Ok(mesh)
    }

    fn check_orientation(&self) -> Result<()> {
        for t in &self.triangles {
            if signed_area2(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]) <= 0.0 {
                return Err(Error::MeshFailure("boundary projection inverted a triangle".into()));
            }
        }
        Ok(())
    }
}
