//! Quadrature rules and deterministic summation.
//!
//! Everything here is order-deterministic: adaptive subdivision recurses in a
//! fixed order and sums pairwise, so repeated runs give bit-identical results.

use std::f64::consts::PI;

/// Integral value together with an error estimate (absolute).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub error: f64,
}

impl Quad {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error
        } else {
            self.error / self.value.abs()
        }
    }
}

impl std::ops::Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        Quad { value: self.value + rhs.value, error: self.error + rhs.error }
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if xs.len() <= BLOCK {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, w * h))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Globally adaptive Gauss–Legendre integration.
///
/// Each panel is integrated with a 10- and a 20-point rule whose difference is
/// the panel error estimate; the panel with the largest estimate is bisected
/// until the total estimate meets the tolerance.
pub struct AdaptiveIntegrator {
    low: GaussLegendre,
    high: GaussLegendre,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveIntegrator {
    fn default() -> Self {
        Self::new(1e-12, 1e-300)
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl AdaptiveIntegrator {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            low: GaussLegendre::new(10),
            high: GaussLegendre::new(20),
            rel_tol,
            abs_tol,
            max_panels: 4000,
        }
    }

    fn panel<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: &F) -> Panel {
        let lo = self.low.integrate(a, b, f);
        let hi = self.high.integrate(a, b, f);
        Panel { a, b, value: hi, error: (hi - lo).abs() }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> Quad {
        if a == b {
            return Quad { value: 0.0, error: 0.0 };
        }
        let mut panels = vec![self.panel(a, b, &f)];
        loop {
            let value: f64 = panels.iter().map(|p| p.value).sum();
            let error: f64 = panels.iter().map(|p| p.error).sum();
            let tol = (self.rel_tol * value.abs()).max(self.abs_tol);
            if error <= tol || panels.len() >= self.max_panels {
                break;
            }
            let (worst, _) = panels
                .iter()
                .enumerate()
                .fold((0, -1.0), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
            let p = panels.swap_remove(worst);
            let m = 0.5 * (p.a + p.b);
            if m == p.a || m == p.b {
                // cannot split further; keep the panel and stop
                panels.push(p);
                break;
            }
            panels.push(self.panel(p.a, m, &f));
            panels.push(self.panel(m, p.b, &f));
        }
        panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap());
        let vals: Vec<f64> = panels.iter().map(|p| p.value).collect();
        let errs: Vec<f64> = panels.iter().map(|p| p.error).collect();
        Quad { value: pairwise_sum(&vals), error: pairwise_sum(&errs) }
    }

    /// Integrates over consecutive sub-intervals split at `breaks`.
    pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        breaks: &[f64],
        f: F,
    ) -> Quad {
        let mut pts = vec![a];
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
        inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
        if a > b {
            inner.reverse();
        }
        pts.extend(inner);
        pts.push(b);
        let mut total = Quad { value: 0.0, error: 0.0 };
        for w in pts.windows(2) {
            total = total + self.integrate(w[0], w[1], &f);
        }
        total
    }
}

/// Trapezoid rule for a `2π`-periodic integrand with doubling until the
/// relative change drops below `rel_tol`.
pub fn integrate_periodic<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> Quad {
    let mut n = 64usize;
    let sample = |n: usize| -> f64 {
        let h = 2.0 * PI / n as f64;
        let vals: Vec<f64> = (0..n).map(|i| f(i as f64 * h)).collect();
        pairwise_sum(&vals) * h
    };
    let mut prev = sample(n);
    loop {
        n *= 2;
        let cur = sample(n);
        let err = (cur - prev).abs();
        if err <= rel_tol * cur.abs().max(1e-300) || n >= 1 << 20 {
            return Quad { value: cur, error: err };
        }
        prev = cur;
    }
}

/// Symmetric 6-point rule on the reference triangle, exact for degree 4.
/// Entries are barycentric coordinates and weights summing to one.
pub const TRIANGLE_DEG4: [([f64; 3], f64); 6] = [
    ([0.108_103_018_168_070, 0.445_948_490_915_965, 0.445_948_490_915_965], 0.223_381_589_678_011),
    ([0.445_948_490_915_965, 0.108_103_018_168_070, 0.445_948_490_915_965], 0.223_381_589_678_011),
    ([0.445_948_490_915_965, 0.445_948_490_915_965, 0.108_103_018_168_070], 0.223_381_589_678_011),
    ([0.816_847_572_980_459, 0.091_576_213_509_771, 0.091_576_213_509_771], 0.109_951_743_655_322),
    ([0.091_576_213_509_771, 0.816_847_572_980_459, 0.091_576_213_509_771], 0.109_951_743_655_322),
    ([0.091_576_213_509_771, 0.091_576_213_509_771, 0.816_847_572_980_459], 0.109_951_743_655_322),
];

/// Bisection on a sign change of `f` in `[a, b]`; returns the bracket midpoint
/// once the bracket is narrower than `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let rule = GaussLegendre::new(5);
        // degree 9 is the highest exactly integrated
        let v = rule.integrate(0.0, 2.0, |x| x.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-11);
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let q = AdaptiveIntegrator::new(1e-12, 1e-300).integrate(0.0, 1.0, |x| x.powf(-0.5));
        assert!((q.value - 2.0).abs() < 1e-9, "{q:?}");
    }

    #[test]
    fn periodic_trapezoid_is_spectral() {
        let q = integrate_periodic(|t| (t.cos()).exp(), 1e-14);
        // 2π I0(1)
        assert!((q.value - 2.0 * PI * 1.266_065_877_752_008_4).abs() < 1e-12);
    }

    #[test]
    fn triangle_rule_integrates_quartic() {
        // reference triangle (0,0),(1,0),(0,1): ∫ x^2 y^2 = 2!2!/6! = 1/180
        let mut s = 0.0;
        for (b, w) in TRIANGLE_DEG4 {
            let (x, y) = (b[1], b[2]);
            s += w * 0.5 * x * x * y * y;
        }
        assert!((s - 1.0 / 180.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_matches_naive_for_small_inputs() {
        let xs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 4950.0);
    }
}
