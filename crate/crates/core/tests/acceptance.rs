//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steklov_iso::ball::{power_ball_spectrum, solve_radial_ode, solve_radial_ode_from};
use steklov_iso::fem::{assemble, convergence_study, solve_on_mesh, triangulate, Mesh};
use steklov_iso::geometry::{weighted_perimeter, weighted_volume, Domain};
use steklov_iso::isoperimetry::{check_isop, isop_constant, DEFAULT_SLACK};
use steklov_iso::params::{
    check_lemma23, classify_lemma21, derive_params, f_derivative, f_value, find_z0, LemmaCase, ThresholdRule,
};
use steklov_iso::verify::{verify, Context, Status, Theorem, VerificationReport, VerifyOptions};
use steklov_iso::weights::{make_power_pair, LogConvexWeight, WeightSpec};

struct Criterion {
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }
}

fn run(id: u32, title: &str, body: fn(&mut Criterion)) -> bool {
    let start = Instant::now();
    let mut c = Criterion { checks: Vec::new() };
    let outcome = catch_unwind(AssertUnwindSafe(|| body(&mut c)));
    let mut ok = !c.checks.is_empty() && c.checks.iter().all(|(_, ok)| *ok);
    for (what, pass) in &c.checks {
        println!("    [{}] {what}", if *pass { "ok" } else { "FAILED" });
    }
    if let Err(e) = outcome {
        ok = false;
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        println!("    [FAILED] panicked: {}", msg.unwrap_or_default());
    }
    println!("criterion {id}: {} {title} ({:.1} s)", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    ok
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn power(alpha: f64, beta: f64) -> WeightSpec {
    WeightSpec::Power(make_power_pair(alpha, beta, 2).unwrap())
}

fn square() -> Domain {
    Domain::square(1.0).unwrap().with_id("square")
}

fn cross() -> Domain {
    Domain::cross(0.2, 1.0).unwrap().with_id("cross")
}

fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum::<f64>()
}

fn cross_vertices() -> Vec<[f64; 2]> {
    let (w, l) = (0.2, 1.0);
    vec![[l, -w], [l, w], [w, w], [w, l], [-w, l], [-w, w], [-l, w], [-l, -w], [-w, -w], [-w, -l], [w, -l], [w, -w]]
}

fn report(dom: &Domain, spec: WeightSpec, theorem: Theorem) -> VerificationReport {
    let ctx = Context::new(dom.clone(), spec, VerifyOptions::default()).unwrap();
    verify(theorem, &ctx).unwrap()
}

fn describe(r: &VerificationReport) -> String {
    format!(
        "{} {} {}: {} margin {:.3e} tol {:.3e}",
        r.theorem,
        r.domain_id,
        r.weight_spec,
        r.status,
        r.margin.unwrap_or(f64::NAN),
        r.tolerance_used
    )
}

/// `F'(R)/F(R)` for `W = exp(a r²)` in the plane from the power series
/// `F = Σ c_n r^{2n+1}`, `c_n = −a(2n−1)/(2n(n+1)) c_{n−1}`.
fn gaussian_gamma1_series(a: f64, r: f64) -> f64 {
    let (mut c, mut f, mut fp) = (1.0, 0.0, 0.0);
    for n in 0..200 {
        if n > 0 {
            let nf = n as f64;
            c *= -a * (2.0 * nf - 1.0) / (2.0 * nf * (nf + 1.0));
        }
        f += c * r.powi(2 * n + 1);
        fp += c * (2 * n + 1) as f64 * r.powi(2 * n);
    }
    fp / f
}

fn closed_form_sanity(c: &mut Criterion) {
    let s = power_ball_spectrum(&make_power_pair(0.0, 0.0, 2).unwrap(), 1.0, 2).unwrap();
    let ev = s.eigenvalues();
    c.check(format!("ball spectrum gamma1 = gamma2 = 1 exactly ({}, {})", ev[1], ev[2]), ev[1] == 1.0 && ev[2] == 1.0);

    let t = Instant::now();
    let disc = Domain::disc(1.0).unwrap();
    let study = convergence_study(&disc, &power(0.0, 0.0), 0.16, 3, 2).unwrap();
    let elapsed = t.elapsed().as_secs_f64();
    let h = study.finest.h;
    c.check(format!("finest mesh size {h}"), (h - 0.02).abs() < 1e-12);
    for i in 0..2 {
        let g = study.gamma(i + 1);
        c.check(format!("FEM gamma{} = {g:.7} within 1% of 1", i + 1), rel(g, 1.0) <= 0.01);
    }
    let vals: Vec<f64> = study.levels.iter().map(|l| l.eigenvalues[0]).collect();
    for w in vals.windows(3) {
        let p = ((w[0] - w[1]) / (w[1] - w[2])).abs().log2();
        c.check(format!("observed rate {p:.3} in 2 +- 0.3"), (p - 2.0).abs() <= 0.3);
    }
    c.check(format!("runtime {elapsed:.1} s below 60 s"), elapsed < 60.0);
}

fn ode_oracle(c: &mut Criterion) {
    for r in [1.0, 2.5] {
        let p = solve_radial_ode(&LogConvexWeight::unit(r), r, 2, 256).unwrap();
        let err = p.grid.iter().zip(&p.f).map(|(x, f)| (f - x).abs()).fold(0.0, f64::max);
        c.check(format!("W = 1, R = {r}: max |F - r| = {err:.2e}"), err <= 1e-8 * r);
        let g = p.fprime.last().unwrap() / p.f.last().unwrap();
        c.check(format!("W = 1, R = {r}: gamma1 = {g}"), rel(g, 1.0 / r) <= 1e-8);
    }
    for (a, r) in [(1.0, 1.0), (0.5, 1.7)] {
        let w = LogConvexWeight::gaussian(a, 2.0 * r);
        let g: Vec<f64> = [1e-4, 1e-6, 1e-8]
            .iter()
            .map(|&e| {
                let p = solve_radial_ode_from(&w, r, 2, 256, e).unwrap();
                p.fprime.last().unwrap() / p.f.last().unwrap()
            })
            .collect();
        let spread = rel(g[0], g[1]).max(rel(g[2], g[1]));
        c.check(format!("W = exp({a} r^2), R = {r}: epsilon spread {spread:.2e}"), spread <= 1e-7);
        let series = gaussian_gamma1_series(a, r);
        c.check(format!("W = exp({a} r^2), R = {r}: gamma1 {} vs series {series}", g[1]), rel(g[1], series) <= 1e-8);
    }
}

fn t11_suite(c: &mut Criterion) {
    for dom in [square(), cross()] {
        for beta in [-2.0, -1.0, 0.0, 1.0] {
            for th in [Theorem::T11, Theorem::C13] {
                let r = report(&dom, power(0.0, beta), th);
                let m = r.margin.unwrap();
                c.check(describe(&r), r.status == Status::Verified && m >= -r.tolerance_used && r.consistent());
                if beta == 0.0 && th == Theorem::T11 {
                    let area = if dom.id.as_deref() == Some("square") { 4.0 } else { shoelace(&cross_vertices()) };
                    let radius = (area / PI).sqrt();
                    c.check(
                        format!("classical case: R = {} and gamma1(B_R) = 1/R = {}", r.radius, r.gamma1_ball),
                        rel(r.radius, radius) <= 1e-12 && rel(r.gamma1_ball, 1.0 / radius) <= 1e-12,
                    );
                    c.check(
                        format!("classical case: gamma1(Omega) = {:.6} <= gamma1(B_R)", r.gamma1_omega.unwrap()),
                        r.gamma1_omega.unwrap() <= r.gamma1_ball,
                    );
                }
            }
        }
    }
}

fn t12_suite(c: &mut Criterion) {
    for dom in [square(), cross()] {
        for beta in [-2.0, -1.0, 0.0, 1.0] {
            let r = report(&dom, power(0.0, beta), Theorem::T12);
            let g = &r.gamma_list_omega;
            let lhs = 1.0 / g[0] + 1.0 / g[1];
            let rhs = 2.0 / r.gamma1_ball;
            c.check(
                format!("{}: 1/g1 + 1/g2 = {lhs:.6} vs 2/g1(B_R) = {rhs:.6}", describe(&r)),
                r.status == Status::Verified && lhs - rhs >= -r.tolerance_used && r.consistent(),
            );
        }
    }
    let disc = Domain::disc(1.0).unwrap();
    for beta in [-1.0, 0.0, 1.0] {
        let r = report(&disc, power(0.0, beta), Theorem::T12);
        let m = r.margin.unwrap();
        c.check(format!("disc equality: {}", describe(&r)), m.abs() <= r.tolerance_used && r.status == Status::Verified);
    }
}

fn power_weight_case(c: &mut Criterion) {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let r = report(&square(), power(1.0, 0.0), Theorem::T11);
    // |Ω|_ℓ of the square by Simpson's rule on the eight edge triangles
    let ell = 5f64.sqrt() - 2.0;
    let n = 4000;
    let hstep = (PI / 4.0) / n as f64;
    let g = |t: f64| (1.0 / t.cos()).powf(ell + 2.0) / (ell + 2.0);
    let simpson: f64 = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * g(i as f64 * hstep)
        })
        .sum::<f64>()
        * hstep
        / 3.0;
    let vol = 8.0 * simpson;
    let radius = ((ell + 2.0) * vol / (2.0 * PI)).powf(1.0 / (ell + 2.0));
    c.check(format!("ell-equivalent radius {} vs {radius}", r.radius), rel(r.radius, radius) <= 1e-10);
    c.check(format!("gamma1(B_R) = {} vs (sqrt5 - 1)/2", r.gamma1_ball), rel(r.gamma1_ball, golden) <= 1e-12);
    let g1 = r.gamma1_omega.unwrap();
    c.check(
        format!("gamma1(Omega) = {g1:.7} <= {golden:.7} within {:.2e}", r.tolerance_used),
        g1 <= golden + r.tolerance_used,
    );
    c.check(describe(&r), r.status == Status::Verified && r.consistent());
}

fn logconvex_theorems(c: &mut Criterion) {
    for dom in [square(), cross()] {
        let spec = WeightSpec::LogConvex(LogConvexWeight::gaussian(1.0, 4.0));
        let ctx = Context::new(dom.clone(), spec, VerifyOptions::default()).unwrap();
        for th in [Theorem::T14, Theorem::T15] {
            let r = verify(th, &ctx).unwrap();
            c.check(describe(&r), r.status == Status::Verified && r.margin.unwrap() >= 0.0);
            c.check(
                format!("{} {}: all consistency rows pass", th, r.domain_id),
                r.consistent(),
            );
            let mono = r.row("profile_monotonicity").is_some_and(|row| row.ok);
            c.check(format!("{} {}: profile monotonicity certificate", th, r.domain_id), mono);
            let series = gaussian_gamma1_series(1.0, r.radius);
            c.check(
                format!("{} {}: gamma1(B_R) {} vs series {series}", th, r.domain_id, r.gamma1_ball),
                rel(r.gamma1_ball, series) <= 1e-8,
            );
            if th == Theorem::T15 {
                let row = r.row("normalization_identity").unwrap();
                let dev = (row.lhs.unwrap() - 2.0).abs();
                c.check(format!("T1.5 {}: normalization identity deviation {dev:.2e}", r.domain_id), dev <= 1e-6);
            }
        }
    }
}

fn admissible_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for ell in [-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 3.0] {
        for k in [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0, 4.0] {
            if classify_lemma21(k, ell, 2).unwrap() != LemmaCase::None {
                out.push((k, ell));
            }
        }
    }
    out.truncate(20);
    out
}

fn random_symmetric_polygon(rng: &mut ChaCha8Rng) -> Domain {
    let n = rng.gen_range(3..9);
    let mut angles = Vec::with_capacity(n);
    let mut t = rng.gen_range(0.0..0.3);
    for _ in 0..n {
        angles.push(t);
        t += (PI - 0.05) / n as f64 * rng.gen_range(0.5..1.5);
    }
    let scale = PI / t.max(PI);
    let half: Vec<[f64; 2]> = angles
        .iter()
        .map(|a| {
            let th = a * scale;
            let r = rng.gen_range(0.4..1.6);
            [r * th.cos(), r * th.sin()]
        })
        .collect();
    let mut v = half.clone();
    v.extend(half.iter().map(|p| [-p[0], -p[1]]));
    Domain::polygon(v).unwrap()
}

fn isoperimetry(c: &mut Criterion) {
    let grid = admissible_grid();
    c.check(format!("{} admissible (k, ell) pairs", grid.len()), grid.len() == 20);
    let disc = Domain::disc(1.3).unwrap();
    let mut worst = 0.0f64;
    for &(k, ell) in &grid {
        let m = check_isop(&disc, k, ell, 2).unwrap();
        worst = worst.max(m.margin.abs() / m.lhs);
    }
    c.check(format!("disc equality: worst |margin|/lhs = {worst:.2e}"), worst <= 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let mut failures = 0;
    let mut min_rel = f64::INFINITY;
    for _ in 0..100 {
        let dom = random_symmetric_polygon(&mut rng);
        for &(k, ell) in &grid {
            let m = check_isop(&dom, k, ell, 2).unwrap();
            min_rel = min_rel.min(m.relative_margin);
            if !m.holds(DEFAULT_SLACK) {
                failures += 1;
            }
        }
    }
    c.check(format!("100 random symmetric polygons: {failures} negative margins, smallest relative {min_rel:.3e}"), failures == 0);
    let k0 = isop_constant(0.0, 0.0, 2).unwrap();
    c.check(format!("classical constant {k0} vs 2 sqrt(pi)"), rel(k0, 2.0 * PI.sqrt()) <= 1e-12);
}

fn classifier(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut implication_failures = 0;
    let mut worst_f = 0.0f64;
    let mut min_fprime = f64::INFINITY;
    for _ in 0..10_000 {
        let dim = rng.gen_range(2..7);
        let alpha = rng.gen_range(-(dim as f64) + 0.01..6.0);
        let beta = rng.gen_range(-6.0..6.0);
        let ps = derive_params(&make_power_pair(alpha, beta, dim).unwrap());
        if !check_lemma23(&ps, ThresholdRule::Derived) {
            implication_failures += 1;
        }
        if let Ok(z0) = find_z0(ps.rho, dim) {
            worst_f = worst_f.max(f_value(z0, ps.rho, dim).abs());
        }
        for i in 1..50 {
            let z = -ps.rho / 3.0 * (1.0 - i as f64 / 50.0);
            min_fprime = min_fprime.min(f_derivative(z, ps.rho));
        }
    }
    c.check(format!("Lemma implication failures on 10^4 points: {implication_failures}"), implication_failures == 0);
    c.check(format!("largest |f(z0)| = {worst_f:.2e}"), worst_f <= 1e-12);
    c.check(format!("smallest sampled f' on (-rho/3, 0) = {min_fprime:.3e}"), min_fprime > 0.0);
}

fn dilated(mesh: &Mesh, t: f64) -> Mesh {
    let v = mesh.vertices.iter().map(|p| [t * p[0], t * p[1]]).collect();
    Mesh::from_parts(v, mesh.triangles.clone(), t * mesh.h, mesh.origin_vertex).unwrap()
}

fn structural(c: &mut Criterion) {
    let sq = square();
    let mesh = triangulate(&sq, 0.1).unwrap();
    for (alpha, beta) in [(-1.0, -1.0), (0.0, 0.0), (0.5, -0.5), (2.0, 1.0)] {
        let spec = power(alpha, beta);
        let sys = assemble(&mesh, &spec.interior(), &spec.trace()).unwrap();
        let ones = vec![1.0; mesh.n_vertices()];
        let r = sys.a.mul_vec(&ones).iter().fold(0.0f64, |m, v| m.max(v.abs())) / sys.a.max_abs();
        c.check(format!("alpha={alpha}, beta={beta}: |A 1| = {r:.2e}"), r <= 1e-12);

        let res = solve_on_mesh(&mesh, &spec, 3).unwrap();
        c.check(
            format!("alpha={alpha}, beta={beta}: gamma0/gamma1 = {:.2e}", res.eigenvalues[0] / res.gamma1()),
            res.eigenvalues[0].abs() <= 1e-8 * res.gamma1(),
        );
        // cross-Gram matrices of the extended modes: boundary (B) and energy (A)
        let mut off_b = 0.0f64;
        let mut off_a = 0.0f64;
        let gmax = res.eigenvalues.last().unwrap();
        for i in 0..res.modes.len() {
            for j in 0..i {
                off_b = off_b.max(sys.b.bilinear(&res.modes[i], &res.modes[j]).abs());
                off_a = off_a.max(sys.a.bilinear(&res.modes[i], &res.modes[j]).abs() / gmax);
            }
        }
        c.check(format!("alpha={alpha}, beta={beta}: cross-Gram residuals {off_b:.2e}, {off_a:.2e}"), off_b <= 1e-8 && off_a <= 1e-8);

        let t = 1.7;
        let scaled = solve_on_mesh(&dilated(&mesh, t), &spec, 1).unwrap();
        let expected = t.powf(alpha - beta - 1.0) * res.gamma1();
        c.check(
            format!("alpha={alpha}, beta={beta}: gamma1 dilation law, rel {:.2e}", rel(scaled.gamma1(), expected)),
            rel(scaled.gamma1(), expected) <= 1e-9,
        );
        let wp = make_power_pair(alpha, beta, 2).unwrap();
        let g1 = power_ball_spectrum(&wp, 0.8, 1).unwrap().gamma1();
        let g2 = power_ball_spectrum(&wp, 2.3, 1).unwrap().gamma1();
        c.check(
            format!("alpha={alpha}, beta={beta}: ball gamma1 scaling"),
            rel(g2 / g1, (2.3f64 / 0.8).powf(alpha - beta - 1.0)) <= 1e-12,
        );
    }
    let star = Domain::star(vec![1.0, 0.0, 0.0, 0.0, 0.2], vec![]).unwrap();
    for dom in [sq, cross(), star] {
        let t = 1.37;
        let big = dom.dilate(t);
        for k in [-1.0, 0.0, 1.5] {
            let (a, b) = (weighted_perimeter(&dom, k).unwrap(), weighted_perimeter(&big, k).unwrap());
            c.check(format!("{}: P_k scaling, k={k}", dom.label()), rel(b, t.powf(k + 1.0) * a) <= 1e-10);
        }
        for ell in [-1.5, 0.0, 2.0] {
            let (a, b) = (weighted_volume(&dom, ell).unwrap(), weighted_volume(&big, ell).unwrap());
            c.check(format!("{}: |.|_ell scaling, ell={ell}", dom.label()), rel(b, t.powf(ell + 2.0) * a) <= 1e-10);
        }
        let (a, b) = (check_isop(&dom, 1.0, 0.0, 2).unwrap(), check_isop(&big, 1.0, 0.0, 2).unwrap());
        c.check(format!("{}: isoperimetric margin scaling", dom.label()), rel(b.margin, t.powf(2.0) * a.margin) <= 1e-9);
    }
}

fn main() {
    let criteria: [(u32, &str, fn(&mut Criterion)); 9] = [
        (1, "closed-form sanity on the unit disc", closed_form_sanity),
        (2, "radial ODE oracle", ode_oracle),
        (3, "T1.1 / C1.3 suite on square and cross", t11_suite),
        (4, "T1.2 suite and disc equality", t12_suite),
        (5, "power weight alpha = 1, beta = 0 on the square", power_weight_case),
        (6, "T1.4 / T1.5 with W = exp(r^2)", logconvex_theorems),
        (7, "weighted isoperimetry", isoperimetry),
        (8, "parameter classifier properties", classifier),
        (9, "structural invariants", structural),
    ];
    let mut failed = Vec::new();
    for (id, title, body) in criteria {
        if !run(id, title, body) {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria PASS");
    } else {
        println!("acceptance: FAIL for criteria {failed:?}");
        std::process::exit(1);
    }
}
