use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use steklov_iso::ball::{logconvex_ball_gamma1, power_ball_spectrum, solve_radial_ode, RadialProfile};
use steklov_iso::fem::convergence_study;
use steklov_iso::geometry::{
    equivalent_radius, symmetry_certificate, weighted_perimeter_quad, weighted_volume_quad, Domain, DomainConfig,
};
use steklov_iso::isoperimetry::{check_isop, check_weighted_isop_l32, domain_measure, measure_equivalent_radius, RadialFnConfig};
use steklov_iso::params::{classify, derive_params, ThresholdRule};
use steklov_iso::verify::{run_suite, verify, write_csv, write_jsonl, Context, SuiteConfig, Theorem, VerifyOptions};
use steklov_iso::weights::{make_power_pair, WeightConfig, WeightSpec};
use steklov_iso::{Error, Result};

#[derive(Parser)]
#[command(name = "steklov-iso", version, about = "Weighted Steklov eigenvalues and isoperimetric checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derived parameters and admissibility class of (alpha, beta, N).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "derived")]
        f_threshold: ThresholdRule,
    },
    /// First eigenvalues on a centred ball.
    Ball {
        /// Weight record (JSON text or file).
        #[arg(long)]
        weight: String,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Highest harmonic degree for power weights.
        #[arg(long, default_value_t = 3)]
        jmax: usize,
        /// Write the radial profile `r,F,F'` as CSV (log-convex weights).
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Symmetry certificates and weighted volume/perimeter of a domain.
    Geometry {
        /// Domain record (JSON text or file).
        #[arg(long)]
        domain: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        ell: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        k: f64,
    },
    /// Weighted isoperimetric margin for `P_k` and `|.|_ell`.
    Isop {
        #[arg(long)]
        domain: String,
        #[arg(long, allow_hyphen_values = true)]
        k: f64,
        #[arg(long, allow_hyphen_values = true)]
        ell: f64,
    },
    /// Boundary inequality for a log-convex weight and a radial function.
    Isop32 {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        weight: String,
        /// Radial function record, e.g. {"kind":"power","m":2} or {"kind":"profile_sq"}.
        #[arg(long)]
        phi: String,
    },
    /// FEM Steklov eigenvalues with a refinement study.
    Solve {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 2)]
        refinements: usize,
        #[arg(long, default_value_t = 4)]
        n_eigs: usize,
    },
    /// Check one theorem on one domain and weight.
    Verify {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        domain: String,
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 0.16)]
        h: f64,
        #[arg(long, default_value_t = 2)]
        refinements: usize,
        #[arg(long, default_value = "derived")]
        f_threshold: ThresholdRule,
    },
    /// Run a suite configuration.
    Suite {
        #[arg(long)]
        config: PathBuf,
        /// JSON-lines report (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV summary.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Inline JSON or a path to a JSON file.
fn read_record(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Io(format!("{arg}: {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let text = read_record(arg)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{what}: line {} column {}: {e}", e.line(), e.column())))
}

fn domain(arg: &str) -> Result<Domain> {
    parse_json::<DomainConfig>(arg, "domain")?.build()
}

fn weight(arg: &str, dim: usize, horizon: f64) -> Result<WeightSpec> {
    parse_json::<WeightConfig>(arg, "weight")?.build(dim, horizon)
}

fn print<T: Serialize>(v: &T) -> Result<()> {
    let s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    match writeln!(io::stdout().lock(), "{s}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn write_profile(path: &PathBuf, p: &RadialProfile) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "r,F,dF")?;
    for ((r, f), fp) in p.grid.iter().zip(&p.f).zip(&p.fprime) {
        writeln!(w, "{r:e},{f:e},{fp:e}")?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Classify { alpha, beta, dim, f_threshold } => {
            let ps = derive_params(&make_power_pair(alpha, beta, dim)?);
            let tag = classify(&ps, f_threshold)?;
            print(&json!({ "params": ps, "condition": tag }))?;
        }
        Cmd::Ball { weight: w, radius, dim, jmax, profile } => match weight(&w, dim, radius)? {
            WeightSpec::Power(wp) => {
                let s = power_ball_spectrum(&wp, radius, jmax)?;
                print(&json!({ "radius": radius, "gamma1": s.gamma1(), "eigenvalues": s.eigenvalues() }))?;
            }
            WeightSpec::LogConvex(lw) => {
                let p = solve_radial_ode(&lw, radius, dim, 256)?;
                if let Some(path) = profile {
                    write_profile(&path, &p)?;
                }
                print(&json!({ "radius": radius, "gamma1": logconvex_ball_gamma1(&p), "ode_residual": p.residual, "steps": p.grid.len() - 1 }))?;
            }
        },
        Cmd::Geometry { domain: d, ell, k } => {
            let dom = domain(&d)?;
            let sym = symmetry_certificate(&dom, 64, 32)?;
            let vol = weighted_volume_quad(&dom, ell)?;
            let per = weighted_perimeter_quad(&dom, k)?;
            print(&json!({
                "domain": dom.label(),
                "diameter": dom.diameter(),
                "max_radius": dom.max_radius(),
                "contains_origin": dom.contains_origin(),
                "symmetry": sym,
                "ell": ell,
                "weighted_volume": vol.value,
                "weighted_volume_error": vol.error,
                "k": k,
                "weighted_perimeter": per.value,
                "weighted_perimeter_error": per.error,
                "equivalent_radius": equivalent_radius(vol.value, ell, 2)?,
            }))?;
        }
        Cmd::Isop { domain: d, k, ell } => print(&check_isop(&domain(&d)?, k, ell, 2)?)?,
        Cmd::Isop32 { domain: d, weight: w, phi } => {
            let dom = domain(&d)?;
            let WeightSpec::LogConvex(lw) = weight(&w, 2, 2.0 * dom.max_radius())? else {
                return Err(Error::InvalidArgument("isop32 needs a log-convex weight".into()));
            };
            let phi_cfg: RadialFnConfig = parse_json(&phi, "phi")?;
            let profile = if phi_cfg == RadialFnConfig::ProfileSq {
                let mu = domain_measure(&dom, &lw)?;
                let r = measure_equivalent_radius(&lw, mu.value, dom.max_radius())?;
                Some(solve_radial_ode(&lw, r.max(dom.max_radius()), 2, 256)?)
            } else {
                None
            };
            let check = check_weighted_isop_l32(&dom, &lw, &phi_cfg.build(profile.as_ref())?)?;
            print(&json!({ "check": check, "margin": check.margin() }))?;
        }
        Cmd::Solve { domain: d, weight: w, h, refinements, n_eigs } => {
            let dom = domain(&d)?;
            let spec = weight(&w, 2, 2.0 * dom.max_radius())?;
            let study = convergence_study(&dom, &spec, h, refinements, n_eigs)?;
            print(&json!({
                "domain": dom.label(),
                "weight": spec.label(),
                "eigenvalues": study.finest.eigenvalues,
                "levels": study.levels,
                "rates": study.rates,
                "error_estimates": study.error_estimates,
                "rayleigh_defect": study.finest.rayleigh_defect,
                "orthogonality": study.finest.orthogonality,
            }))?;
        }
        Cmd::Verify { theorem, domain: d, weight: w, h, refinements, f_threshold } => {
            let theorem: Theorem = theorem.parse()?;
            let dom = domain(&d)?;
            let spec = weight(&w, 2, 2.0 * dom.max_radius())?;
            let opts = VerifyOptions { h, refinements, threshold_rule: f_threshold, ..VerifyOptions::default() };
            let report = verify(theorem, &Context::new(dom, spec, opts)?)?;
            print(&report)?;
            if report.status == steklov_iso::verify::Status::Violated {
                return Ok(1);
            }
        }
        Cmd::Suite { config, out, csv } => {
            let cfg = SuiteConfig::load(&config)?;
            let outcome = run_suite(&cfg);
            match out {
                Some(path) => write_jsonl(&outcome.reports, BufWriter::new(File::create(path)?))?,
                None => write_jsonl(&outcome.reports, io::stdout().lock())?,
            }
            if let Some(path) = csv {
                write_csv(&outcome.reports, BufWriter::new(File::create(path)?))?;
            }
            for f in &outcome.failures {
                eprintln!("error: {} on {} (weight #{}): {}", f.theorem, f.domain_id, f.weight_index, f.message);
            }
            if !outcome.skipped.is_empty() {
                eprintln!("skipped {} triples whose theorem does not concern the weight family", outcome.skipped.len());
            }
            return Ok(outcome.exit_code() as u8);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
