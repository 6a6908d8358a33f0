use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steklov_iso::ball::{
    exponent_m, power_ball_spectrum, solve_radial_ode, solve_radial_ode_fixed, Branch,
};
use steklov_iso::geometry::{
    check_s1, check_s2, equivalent_radius, weighted_perimeter, weighted_volume, Domain,
};
use steklov_iso::isoperimetry::check_isop;
use steklov_iso::params::{
    check_lemma23, classify_theorem11, derive_params, f_derivative, LemmaCase, TheoremCase,
    ThresholdRule,
};
use steklov_iso::verify::{verify, Context, Status, Theorem, VerifyOptions};
use steklov_iso::weights::{make_power_pair, validate_log_convex, LogConvexWeight, Potential, WeightSpec};

fn pair() -> impl Strategy<Value = (f64, f64, usize)> {
    (2usize..7).prop_flat_map(|n| (-(n as f64) + 1e-3..6.0, -6.0..6.0f64, Just(n)))
}

/// Centrally symmetric star-shaped polygon with `2n` vertices.
fn symmetric_polygon(seed: u64) -> Domain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..7);
    let mut half = Vec::new();
    for i in 0..n {
        let th = PI * (i as f64 + rng.gen_range(0.1..0.9)) / n as f64;
        let r = rng.gen_range(0.5..1.5);
        half.push([r * th.cos(), r * th.sin()]);
    }
    let mut v = half.clone();
    v.extend(half.iter().map(|p| [-p[0], -p[1]]));
    Domain::polygon(v).unwrap()
}

fn star(seed: u64, quarter_turn: bool) -> Domain {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![1.0; 1];
    let mut b = Vec::new();
    for q in 1..=8 {
        let keep = if quarter_turn { q % 4 == 0 } else { rng.gen_bool(0.5) };
        a.push(if keep { rng.gen_range(-0.08..0.08) } else { 0.0 });
        b.push(if keep { rng.gen_range(-0.08..0.08) } else { 0.0 });
    }
    Domain::star(a, b).unwrap()
}

proptest! {
    #[test]
    fn power_pairs_respect_admissibility(alpha in -8.0..8.0f64, beta in -8.0..8.0f64, n in 2usize..6) {
        match make_power_pair(alpha, beta, n) {
            Ok(wp) => prop_assert!(wp.alpha > -(n as f64)),
            Err(_) => prop_assert!(alpha <= -(n as f64)),
        }
    }

    #[test]
    fn derived_parameter_identities((alpha, beta, n) in pair()) {
        let ps = derive_params(&make_power_pair(alpha, beta, n).unwrap());
        let nf = n as f64;
        prop_assert!((ps.z - (beta + 1.0 - alpha)).abs() <= 1e-12);
        prop_assert!(ps.identity_residual() <= 1e-12 * (1.0 + ps.rho));
        prop_assert!((ps.k - (ps.z + 1.0 - nf + ps.rho)).abs() <= 1e-12 * (1.0 + ps.rho));
        let lhs = ps.rho * ps.rho - (alpha + nf - 2.0).powi(2);
        prop_assert!((lhs - 4.0 * (nf - 1.0)).abs() <= 1e-10 * ps.rho * ps.rho);
        prop_assert!(ps.rho >= 2.0 * (nf - 1.0).sqrt() - 1e-12);
        prop_assert!(ps.ell > -nf);
    }

    #[test]
    fn f_increases_below_zero((alpha, _beta, n) in pair(), t in 0.001..0.999f64) {
        let rho = derive_params(&make_power_pair(alpha, 0.0, n).unwrap()).rho;
        prop_assert!(f_derivative(-rho / 3.0 * t, rho) > 0.0);
    }

    #[test]
    fn nonnegative_z_is_case_i(alpha in -1.99..6.0f64, z in 0.0..6.0f64) {
        let ps = derive_params(&make_power_pair(alpha, z + alpha - 1.0, 2).unwrap());
        prop_assert_eq!(classify_theorem11(&ps, ThresholdRule::Derived), TheoremCase::I);
    }

    #[test]
    fn lemma_implication((alpha, beta, n) in pair()) {
        let ps = derive_params(&make_power_pair(alpha, beta, n).unwrap());
        prop_assert!(check_lemma23(&ps, ThresholdRule::Derived));
    }

    #[test]
    fn ball_spectrum_scaling_and_degeneracy((alpha, beta, n) in pair(), r1 in 0.2..3.0f64, r2 in 0.2..3.0f64) {
        let wp = make_power_pair(alpha, beta, n).unwrap();
        let s1 = power_ball_spectrum(&wp, r1, 3).unwrap();
        let s2 = power_ball_spectrum(&wp, r2, 3).unwrap();
        let law = (r2 / r1).powf(alpha - beta - 1.0);
        prop_assert!((s2.gamma1() / s1.gamma1() - law).abs() <= 1e-12 * law);
        let j1 = s1.entries.iter().find(|e| e.j == 1).unwrap();
        prop_assert_eq!(j1.multiplicity, n);
        let m = derive_params(&wp).m;
        prop_assert!((j1.gamma - m * r1.powf(alpha - beta - 1.0)).abs() <= 1e-12 * j1.gamma);
        prop_assert!((exponent_m(1, alpha, n, Branch::Plus) - m).abs() <= 1e-12 * (1.0 + m.abs()));
        prop_assert_eq!(s1.entries[0].gamma, 0.0);
        prop_assert!(s1.entries.windows(2).all(|w| w[0].gamma <= w[1].gamma));
    }

    #[test]
    fn power_trial_gradient_identity(alpha in -1.9..4.0f64, r in 0.2..2.0f64, th in 0.0..(2.0 * PI)) {
        let m = derive_params(&make_power_pair(alpha, 0.0, 2).unwrap()).m;
        let x = [r * th.cos(), r * th.sin()];
        let u = |i: usize, p: [f64; 2]| p[i] * (p[0] * p[0] + p[1] * p[1]).sqrt().powf(m - 1.0);
        let h = 1e-5;
        let mut sum = 0.0;
        for i in 0..2 {
            for d in 0..2 {
                let (mut a, mut b) = (x, x);
                a[d] += h;
                b[d] -= h;
                sum += ((u(i, a) - u(i, b)) / (2.0 * h)).powi(2);
            }
        }
        let exact = (2.0 + m * m - 1.0) * r.powf(2.0 * m - 2.0);
        prop_assert!((sum - exact).abs() <= 1e-6 * exact);
    }

    #[test]
    fn equivalent_radius_round_trip(radius in 0.1..4.0f64, ell in -1.9..4.0f64) {
        let disc = Domain::disc(radius).unwrap();
        let vol = weighted_volume(&disc, ell).unwrap();
        let back = equivalent_radius(vol, ell, 2).unwrap();
        prop_assert!((back - radius).abs() <= 1e-10 * radius);
    }

    #[test]
    fn perimeter_and_volume_dilation(seed in any::<u64>(), t in 0.3..3.0f64, k in -1.0..3.0f64, ell in -1.5..3.0f64) {
        let dom = symmetric_polygon(seed);
        let big = dom.dilate(t);
        let (p0, p1) = (weighted_perimeter(&dom, k).unwrap(), weighted_perimeter(&big, k).unwrap());
        prop_assert!(p0 > 0.0);
        prop_assert!((p1 - t.powf(k + 1.0) * p0).abs() <= 1e-10 * p1);
        let (v0, v1) = (weighted_volume(&dom, ell).unwrap(), weighted_volume(&big, ell).unwrap());
        prop_assert!((v1 - t.powf(ell + 2.0) * v0).abs() <= 1e-10 * v1);
    }

    #[test]
    fn isoperimetric_margin_covariance(seed in any::<u64>(), t in 0.3..3.0f64, idx in 0usize..6) {
        let (k, ell) = [(0.0, 0.0), (1.0, 0.0), (2.0, 1.0), (0.5, -0.5), (1.0, 1.0), (3.0, 2.0)][idx];
        let dom = symmetric_polygon(seed);
        let a = check_isop(&dom, k, ell, 2).unwrap();
        let b = check_isop(&dom.dilate(t), k, ell, 2).unwrap();
        let law = t.powf(k + 1.0);
        prop_assert!((b.margin - law * a.margin).abs() <= 1e-9 * law * a.lhs);
        prop_assert!((a.margin - (a.lhs - a.rhs)).abs() <= 1e-14 * a.lhs);
        prop_assert!((a.relative_margin - a.margin / a.lhs).abs() <= 1e-14);
        if a.supported {
            prop_assert!(a.condition != LemmaCase::None);
            // both forms of the inequality agree in sign
            prop_assert_eq!(a.margin >= 0.0, a.ball_margin >= -1e-12 * a.lhs);
        }
    }

    #[test]
    fn quarter_turn_implies_central(seed in any::<u64>(), quarter_turn in any::<bool>()) {
        let dom = star(seed, quarter_turn);
        if check_s2(&dom, 24, 16).unwrap().passed() {
            prop_assert!(check_s1(&dom, 24, 16).unwrap().passed());
        }
        if quarter_turn {
            prop_assert!(check_s2(&dom, 24, 16).unwrap().passed());
        }
    }

    #[test]
    fn validated_weights_are_monotone_and_log_convex(a in 0.0..2.0f64, p in 1.0..4.0f64, r_max in 0.5..3.0f64) {
        let w = LogConvexWeight::new(Potential::Power { a, p }, r_max).unwrap();
        prop_assert!(validate_log_convex(&w, 200).unwrap().is_ok());
        let grid: Vec<f64> = (0..=40).map(|i| r_max * i as f64 / 40.0).collect();
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let (w1, w2) = (w.value(grid[i]).unwrap(), w.value(grid[j]).unwrap());
                let wm = w.value(0.5 * (grid[i] + grid[j])).unwrap();
                prop_assert!(w1 <= w2 * (1.0 + 1e-10));
                prop_assert!(wm * wm <= w1 * w2 * (1.0 + 1e-10));
            }
        }
    }

    #[test]
    fn profile_gradient_identity(a in 0.1..2.0f64, r in 0.1..0.95f64, th in 0.0..(2.0 * PI)) {
        let p = solve_radial_ode(&LogConvexWeight::gaussian(a, 2.0), 1.0, 2, 256).unwrap();
        let x = [r * th.cos(), r * th.sin()];
        let u = |i: usize, q: [f64; 2]| {
            let s = (q[0] * q[0] + q[1] * q[1]).sqrt();
            q[i] / s * p.eval(s).0
        };
        let h = 1e-5;
        let mut sum = 0.0;
        for i in 0..2 {
            for d in 0..2 {
                let (mut y, mut z) = (x, x);
                y[d] += h;
                z[d] -= h;
                sum += ((u(i, y) - u(i, z)) / (2.0 * h)).powi(2);
            }
        }
        let exact = p.gradient_energy_density(r);
        prop_assert!((sum - exact).abs() <= 1e-6 * exact);
    }
}

#[test]
fn ode_residual_is_fourth_order() {
    let w = LogConvexWeight::gaussian(1.0, 2.0);
    let g: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&n| {
            let p = solve_radial_ode_fixed(&w, 1.0, 2, n, 1e-3).unwrap();
            p.fprime.last().unwrap() / p.f.last().unwrap()
        })
        .collect();
    let rate = ((g[0] - g[1]) / (g[1] - g[2])).abs().log2();
    assert!((rate - 4.0).abs() < 0.5, "observed order {rate}");
}

/// Plain Monte Carlo over the bounding box with 10⁶ samples.
#[test]
fn weighted_integrals_match_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for seed in 0..3 {
        let dom = symmetric_polygon(seed);
        let VerticesBox { vertices, lo, hi } = bounding_box(&dom);
        let ell = 0.7;
        let n = 1_000_000;
        let box_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let p = [rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1])];
            let v = if dom.contains(p) { box_area * (p[0].hypot(p[1])).powf(ell) } else { 0.0 };
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        let exact = weighted_volume(&dom, ell).unwrap();
        assert!((mean - exact).abs() <= 3.0 * se, "volume {exact} vs {mean} +- {se}");

        // boundary: uniform in arc length
        let k = 1.3;
        let edges: Vec<([f64; 2], [f64; 2])> =
            (0..vertices.len()).map(|i| (vertices[i], vertices[(i + 1) % vertices.len()])).collect();
        let lengths: Vec<f64> = edges.iter().map(|(p, q)| (q[0] - p[0]).hypot(q[1] - p[1])).collect();
        let total: f64 = lengths.iter().sum();
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let mut t = rng.gen_range(0.0..total);
            let mut e = 0;
            while t > lengths[e] && e + 1 < edges.len() {
                t -= lengths[e];
                e += 1;
            }
            let (p, q) = edges[e];
            let u = t / lengths[e];
            let x = [p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])];
            let v = total * x[0].hypot(x[1]).powf(k);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        let exact = weighted_perimeter(&dom, k).unwrap();
        assert!((mean - exact).abs() <= 3.0 * se, "perimeter {exact} vs {mean} +- {se}");
    }
}

struct VerticesBox {
    vertices: Vec<[f64; 2]>,
    lo: [f64; 2],
    hi: [f64; 2],
}

fn bounding_box(dom: &Domain) -> VerticesBox {
    let vertices = dom.boundary_polygon(1.0);
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in &vertices {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    VerticesBox { vertices, lo, hi }
}

#[test]
fn reports_are_deterministic() {
    let dom = Domain::cross(0.25, 1.0).unwrap().with_id("cross");
    let spec = WeightSpec::Power(make_power_pair(0.0, -1.0, 2).unwrap());
    let run = || {
        let ctx = Context::new(dom.clone(), spec.clone(), VerifyOptions::default()).unwrap();
        serde_json::to_string(&verify(Theorem::T12, &ctx).unwrap()).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn verified_requires_every_gate() {
    let spec = WeightSpec::Power(make_power_pair(0.0, 0.0, 2).unwrap());
    for (w, h) in [(1.0, 0.6), (1.3, 0.9)] {
        let rect = Domain::rectangle(-w, w, -h, h).unwrap();
        let ctx = Context::new(rect, spec.clone(), VerifyOptions::default()).unwrap();
        let t11 = verify(Theorem::T11, &ctx).unwrap();
        assert_eq!(t11.status, Status::Verified);
        let t12 = verify(Theorem::T12, &ctx).unwrap();
        assert!(!t12.symmetry.s2.passed());
        assert_eq!(t12.status, Status::Unsupported);
        assert!(t12.margin.is_some());
    }
    // outside every admissible case: the margin is still reported
    let bad = WeightSpec::Power(make_power_pair(0.0, -4.0, 2).unwrap());
    let ctx = Context::new(Domain::square(1.0).unwrap(), bad, VerifyOptions::default()).unwrap();
    let r = verify(Theorem::T11, &ctx).unwrap();
    assert_eq!(r.condition.unwrap().theorem_case, TheoremCase::None);
    assert_eq!(r.status, Status::Unsupported);
}
