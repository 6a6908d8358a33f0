//! Radial weight families: power weights `|x|^α`, `|x|^{β-α}` and log-convex
//! weights `W = exp(V(|x|))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interior weight `|x|^alpha` with boundary weight `|x|^(beta - alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerWeightPair {
    pub alpha: f64,
    pub beta: f64,
    pub dim: usize,
}

impl PowerWeightPair {
    pub fn new(alpha: f64, beta: f64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimTooSmall(dim));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite exponents ({alpha}, {beta})")));
        }
        if alpha <= -(dim as f64) {
            return Err(Error::AlphaOutOfRange { alpha, dim });
        }
        Ok(Self { alpha, beta, dim })
    }

    /// Exponent of the interior weight `w`.
    pub fn interior_exponent(&self) -> f64 {
        self.alpha
    }

    /// Exponent of the boundary weight `v`.
    pub fn boundary_exponent(&self) -> f64 {
        self.beta - self.alpha
    }

    /// Exponent of `w·v`, the density of the boundary term in the weak form.
    pub fn trace_exponent(&self) -> f64 {
        self.beta
    }
}

/// Validating constructor for [`PowerWeightPair`].
pub fn make_power_pair(alpha: f64, beta: f64, dim: usize) -> Result<PowerWeightPair> {
    PowerWeightPair::new(alpha, beta, dim)
}

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// second derivatives at the knots
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 3 || y.len() != n {
            return Err(Error::InvalidArgument("spline needs >= 3 knots and matching values".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) || x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("spline knots must be finite and strictly increasing".into()));
        }
        // tridiagonal system for interior second derivatives
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0 / 6.0;
            let b = (h0 + h1) / 3.0;
            let cc = h1 / 6.0;
            let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            let denom = b - a * c[i - 1];
            c[i] = cc / denom;
            d[i] = (rhs - a * d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(Self { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        }
    }

    /// Value, first and second derivative at `t`.
    pub fn eval3(&self, t: f64) -> (f64, f64, f64) {
        let i = self.interval(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        (v, d1, d2)
    }
}

/// Potential `V` of a log-convex weight `W = exp(V)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `V ≡ c`
    Constant { c: f64 },
    /// `V = a r²`
    Quadratic { a: f64 },
    /// `V = a r^p`, `p ≥ 1`
    Power { a: f64, p: f64 },
    Tabulated(CubicSpline),
}

impl Potential {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Potential::Constant { c } => *c,
            Potential::Quadratic { a } => a * r * r,
            Potential::Power { a, p } => a * r.powf(*p),
            Potential::Tabulated(s) => s.eval3(r).0,
        }
    }

    /// `V'(r)`
    pub fn d1(&self, r: f64) -> f64 {
        match self {
            Potential::Constant { .. } => 0.0,
            Potential::Quadratic { a } => 2.0 * a * r,
            Potential::Power { a, p } => {
                if *p == 1.0 {
                    *a
                } else {
                    a * p * r.powf(p - 1.0)
                }
            }
            Potential::Tabulated(s) => s.eval3(r).1,
        }
    }

    /// `V''(r)`
    pub fn d2(&self, r: f64) -> f64 {
        match self {
            Potential::Constant { .. } => 0.0,
            Potential::Quadratic { a } => 2.0 * a,
            Potential::Power { a, p } => {
                if *p == 1.0 || *a == 0.0 {
                    0.0
                } else if *p == 2.0 {
                    2.0 * a
                } else if r == 0.0 && *p < 2.0 {
                    a.signum() * f64::INFINITY
                } else {
                    a * p * (p - 1.0) * r.powf(p - 2.0)
                }
            }
            Potential::Tabulated(s) => s.eval3(r).2,
        }
    }

    fn is_tabulated(&self) -> bool {
        matches!(self, Potential::Tabulated(_))
    }
}

/// Radial weight `W(r) = exp(V(r))`, meant to be non-decreasing and log-convex
/// on `[0, r_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConvexWeight {
    pub potential: Potential,
    pub r_max: f64,
}

impl LogConvexWeight {
    pub fn new(potential: Potential, r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("weight horizon must be positive, got {r_max}")));
        }
        match &potential {
            Potential::Power { p, a } if !(*p >= 1.0 && p.is_finite() && a.is_finite()) => {
                return Err(Error::InvalidArgument(format!("power potential needs p >= 1, got {p}")));
            }
            Potential::Tabulated(s) => {
                let (lo, hi) = s.domain();
                if lo > 0.0 || hi < r_max {
                    return Err(Error::InvalidArgument(format!(
                        "tabulated potential covers [{lo}, {hi}], horizon {r_max} needs [0, {r_max}]"
                    )));
                }
            }
            _ => {}
        }
        Ok(Self { potential, r_max })
    }

    /// `W ≡ 1`
    pub fn unit(r_max: f64) -> Self {
        Self { potential: Potential::Constant { c: 0.0 }, r_max }
    }

    /// `W = exp(a r²)`
    pub fn gaussian(a: f64, r_max: f64) -> Self {
        Self { potential: Potential::Quadratic { a }, r_max }
    }

    /// Same potential, different horizon. Tabulated potentials cannot be
    /// extended beyond their last knot.
    pub fn with_horizon(&self, r_max: f64) -> Result<Self> {
        Self::new(self.potential.clone(), r_max)
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if r < 0.0 || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("negative or non-finite radius {r}")));
        }
        if let Potential::Tabulated(s) = &self.potential {
            let hi = s.domain().1;
            if r > hi * (1.0 + 1e-12) {
                return Err(Error::OutsideHorizon { r, r_max: hi });
            }
        }
        Ok(())
    }

    /// `W(r)`
    pub fn value(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.potential.value(r).exp())
    }

    /// `W'(r)/W(r) = V'(r)`
    pub fn log_derivative(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.potential.d1(r))
    }

    /// `(W'/W)'(r) = V''(r)`
    pub fn log_second_derivative(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.potential.d2(r))
    }
}

/// Radial density used by the solvers: either `|x|^exponent` or a log-convex `W`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialWeight {
    Power { exponent: f64 },
    LogConvex(LogConvexWeight),
}

impl RadialWeight {
    pub fn unit() -> Self {
        RadialWeight::Power { exponent: 0.0 }
    }

    pub fn at_radius(&self, r: f64) -> Result<f64> {
        match self {
            RadialWeight::Power { exponent } => {
                if *exponent == 0.0 {
                    Ok(1.0)
                } else if r == 0.0 {
                    if *exponent < 0.0 {
                        Err(Error::SingularEvaluation { exponent: *exponent })
                    } else {
                        Ok(0.0)
                    }
                } else {
                    Ok(r.powf(*exponent))
                }
            }
            RadialWeight::LogConvex(w) => w.value(r),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.at_radius(norm(x))
    }

    pub fn power_exponent(&self) -> Option<f64> {
        match self {
            RadialWeight::Power { exponent } => Some(*exponent),
            RadialWeight::LogConvex(_) => None,
        }
    }
}

/// A weight pair as read from configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Power(PowerWeightPair),
    LogConvex(LogConvexWeight),
}

impl WeightSpec {
    /// Interior weight `w`.
    pub fn interior(&self) -> RadialWeight {
        match self {
            WeightSpec::Power(p) => RadialWeight::Power { exponent: p.interior_exponent() },
            WeightSpec::LogConvex(w) => RadialWeight::LogConvex(w.clone()),
        }
    }

    /// Boundary weight `v`.
    pub fn boundary(&self) -> RadialWeight {
        match self {
            WeightSpec::Power(p) => RadialWeight::Power { exponent: p.boundary_exponent() },
            WeightSpec::LogConvex(_) => RadialWeight::unit(),
        }
    }

    /// `w·v`: the boundary density in the Rayleigh quotient.
    pub fn trace(&self) -> RadialWeight {
        match self {
            WeightSpec::Power(p) => RadialWeight::Power { exponent: p.trace_exponent() },
            WeightSpec::LogConvex(w) => RadialWeight::LogConvex(w.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightSpec::Power(p) => format!("power(alpha={}, beta={})", p.alpha, p.beta),
            WeightSpec::LogConvex(w) => match &w.potential {
                Potential::Constant { c } => format!("logconvex(constant c={c})"),
                Potential::Quadratic { a } => format!("logconvex(quadratic a={a})"),
                Potential::Power { a, p } => format!("logconvex(power a={a}, p={p})"),
                Potential::Tabulated(_) => "logconvex(tabulated)".to_string(),
            },
        }
    }
}

/// Interior weight `w(x)`: `|x|^α` for power pairs, `exp(V(|x|))` otherwise.
pub fn eval_interior_weight(spec: &WeightSpec, x: &[f64]) -> Result<f64> {
    spec.interior().eval(x)
}

/// Tagged weight record as it appears in config files and on the command line:
/// `{"kind":"power","alpha":..,"beta":..}` or
/// `{"kind":"logconvex","family":"quadratic","a":..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightConfig {
    Power {
        alpha: f64,
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    Logconvex {
        family: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r_max: Option<f64>,
    },
}

impl WeightConfig {
    /// Builds the weight; `horizon` is used when the record has no `r_max`.
    pub fn build(&self, default_dim: usize, horizon: f64) -> Result<WeightSpec> {
        match self {
            WeightConfig::Power { alpha, beta, dim } => {
                Ok(WeightSpec::Power(make_power_pair(*alpha, *beta, dim.unwrap_or(default_dim))?))
            }
            WeightConfig::Logconvex { family, a, p, c, r, v, r_max } => {
                let need = |x: &Option<f64>, name: &str| {
                    x.ok_or_else(|| Error::Config(format!("logconvex family '{family}' needs field '{name}'")))
                };
                let potential = match family.as_str() {
                    "constant" => Potential::Constant { c: c.unwrap_or(0.0) },
                    "quadratic" => Potential::Quadratic { a: need(a, "a")? },
                    "power" => Potential::Power { a: need(a, "a")?, p: need(p, "p")? },
                    "tabulated" => {
                        let (r, v) = match (r, v) {
                            (Some(r), Some(v)) => (r.clone(), v.clone()),
                            _ => return Err(Error::Config("tabulated family needs 'r' and 'v' arrays".into())),
                        };
                        Potential::Tabulated(CubicSpline::natural(r, v)?)
                    }
                    other => return Err(Error::Config(format!("unknown logconvex family '{other}'"))),
                };
                let horizon = match (&potential, r_max) {
                    (_, Some(h)) => *h,
                    (Potential::Tabulated(s), None) => s.domain().1,
                    (_, None) => horizon,
                };
                Ok(WeightSpec::LogConvex(LogConvexWeight::new(potential, horizon)?))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `V' < 0`
    Decreasing,
    /// `V'' < 0`
    NotLogConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LogConvexCertificate {
    Ok,
    Violation { r: f64, kind: ViolationKind, value: f64 },
}

impl LogConvexCertificate {
    pub fn is_ok(&self) -> bool {
        matches!(self, LogConvexCertificate::Ok)
    }
}

/// Samples `V'` and `V''` on a uniform grid over `[0, r_max]` and reports the
/// first point where monotonicity or log-convexity fails. Tabulated potentials
/// use first and second differences of `V` instead of spline derivatives.
pub fn validate_log_convex(w: &LogConvexWeight, grid_size: usize) -> Result<LogConvexCertificate> {
    if grid_size < 16 {
        return Err(Error::InvalidArgument(format!("grid_size must be >= 16, got {grid_size}")));
    }
    let dr = w.r_max / (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size).map(|i| i as f64 * dr).collect();

    if w.potential.is_tabulated() {
        let vals: Vec<f64> = grid.iter().map(|&r| w.potential.value(r)).collect();
        let scale = vals.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        let tol = 1e-12 * scale;
        for i in 0..grid_size - 1 {
            let d1 = vals[i + 1] - vals[i];
            if d1 < -tol {
                return Ok(LogConvexCertificate::Violation { r: grid[i], kind: ViolationKind::Decreasing, value: d1 / dr });
            }
            if i >= 1 {
                let d2 = vals[i + 1] - 2.0 * vals[i] + vals[i - 1];
                if d2 < -tol {
                    return Ok(LogConvexCertificate::Violation {
                        r: grid[i],
                        kind: ViolationKind::NotLogConvex,
                        value: d2 / (dr * dr),
                    });
                }
            }
        }
        return Ok(LogConvexCertificate::Ok);
    }

    for &r in &grid {
        let d1 = w.potential.d1(r);
        let d2 = w.potential.d2(r);
        let tol = 1e-12 * (1.0 + d1.abs().min(1e300));
        if d1 < -tol || d1.is_nan() {
            return Ok(LogConvexCertificate::Violation { r, kind: ViolationKind::Decreasing, value: d1 });
        }
        if d2 < -1e-12 * (1.0 + d2.abs().min(1e300)) || d2.is_nan() {
            return Ok(LogConvexCertificate::Violation { r, kind: ViolationKind::NotLogConvex, value: d2 });
        }
    }
    Ok(LogConvexCertificate::Ok)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_pair_admissibility() {
        let p = make_power_pair(0.0, 0.0, 2).unwrap();
        assert_eq!(p.interior_exponent(), 0.0);
        assert_eq!(p.boundary_exponent(), 0.0);
        assert_eq!(make_power_pair(-2.0, 5.0, 2), Err(Error::AlphaOutOfRange { alpha: -2.0, dim: 2 }));
        assert_eq!(make_power_pair(0.0, 0.0, 1), Err(Error::DimTooSmall(1)));
        let q = make_power_pair(1.0, -0.5, 3).unwrap();
        assert_eq!(q.boundary_exponent(), -1.5);
    }

    #[test]
    fn interior_weight_values() {
        let spec = WeightSpec::Power(make_power_pair(2.0, 0.0, 2).unwrap());
        assert!((eval_interior_weight(&spec, &[3.0, 4.0]).unwrap() - 25.0).abs() < 1e-12);

        let unit = WeightSpec::LogConvex(LogConvexWeight::unit(5.0));
        assert_eq!(eval_interior_weight(&unit, &[0.3, -2.0]).unwrap(), 1.0);

        let half = WeightSpec::LogConvex(LogConvexWeight::gaussian(0.5, 2.0));
        let v = eval_interior_weight(&half, &[0.6, 0.8]).unwrap();
        assert!((v - 0.5f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn negative_exponent_at_origin_is_an_error() {
        let spec = WeightSpec::Power(make_power_pair(-1.0, 0.0, 2).unwrap());
        assert_eq!(eval_interior_weight(&spec, &[0.0, 0.0]), Err(Error::SingularEvaluation { exponent: -1.0 }));
        let pos = WeightSpec::Power(make_power_pair(1.0, 0.0, 2).unwrap());
        assert_eq!(eval_interior_weight(&pos, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn log_convexity_certificates() {
        let quad = LogConvexWeight::new(Potential::Quadratic { a: 1.0 }, 3.0).unwrap();
        assert!(validate_log_convex(&quad, 64).unwrap().is_ok());

        let decreasing = LogConvexWeight::new(Potential::Power { a: -1.0, p: 1.0 }, 3.0).unwrap();
        match validate_log_convex(&decreasing, 64).unwrap() {
            LogConvexCertificate::Violation { kind, r, .. } => {
                assert_eq!(kind, ViolationKind::Decreasing);
                assert_eq!(r, 0.0);
            }
            c => panic!("expected violation, got {c:?}"),
        }

        // V = log(1 + r) tabulated: increasing but concave
        let r: Vec<f64> = (0..=40).map(|i| i as f64 * 0.1).collect();
        let v: Vec<f64> = r.iter().map(|x| (1.0 + x).ln()).collect();
        let concave = LogConvexWeight::new(Potential::Tabulated(CubicSpline::natural(r, v).unwrap()), 4.0).unwrap();
        match validate_log_convex(&concave, 128).unwrap() {
            LogConvexCertificate::Violation { kind, .. } => assert_eq!(kind, ViolationKind::NotLogConvex),
            c => panic!("expected violation, got {c:?}"),
        }

        assert!(validate_log_convex(&quad, 8).is_err());
    }

    #[test]
    fn spline_reproduces_cubic_data_derivatives_roughly() {
        let r: Vec<f64> = (0..=50).map(|i| i as f64 * 0.04).collect();
        let v: Vec<f64> = r.iter().map(|x| x * x).collect();
        let s = CubicSpline::natural(r, v).unwrap();
        let (val, d1, _) = s.eval3(1.01);
        assert!((val - 1.0201).abs() < 1e-5);
        assert!((d1 - 2.02).abs() < 1e-3);
    }

    #[test]
    fn weight_config_parsing() {
        let cfg: WeightConfig = serde_json::from_str(r#"{"kind":"power","alpha":1,"beta":-0.5}"#).unwrap();
        match cfg.build(3, 1.0).unwrap() {
            WeightSpec::Power(p) => assert_eq!((p.alpha, p.beta, p.dim), (1.0, -0.5, 3)),
            _ => panic!(),
        }
        let cfg: WeightConfig = serde_json::from_str(r#"{"kind":"logconvex","family":"quadratic","a":1}"#).unwrap();
        match cfg.build(2, 1.5).unwrap() {
            WeightSpec::LogConvex(w) => {
                assert_eq!(w.potential, Potential::Quadratic { a: 1.0 });
                assert_eq!(w.r_max, 1.5);
            }
            _ => panic!(),
        }
        let bad: WeightConfig = serde_json::from_str(r#"{"kind":"logconvex","family":"power","a":1}"#).unwrap();
        assert!(matches!(bad.build(2, 1.0), Err(Error::Config(_))));
    }
}
