//! Batch execution of configured (domain, weight, theorem) triples.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SuiteConfig;
use super::pipelines::{verify, Context};
use super::report::{Status, Theorem, VerificationReport};
use crate::error::{Error, Result};
use crate::weights::WeightSpec;

/// A triple that could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteFailure {
    pub theorem: Theorem,
    pub domain_id: String,
    pub weight_index: usize,
    pub message: String,
}

/// A triple whose theorem does not concern the weight family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSkip {
    pub theorem: Theorem,
    pub domain_id: String,
    pub weight_index: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
    pub failures: Vec<SuiteFailure>,
    pub skipped: Vec<SuiteSkip>,
}

impl SuiteOutcome {
    pub fn any_violated(&self) -> bool {
        self.reports.iter().any(|r| r.status == Status::Violated)
    }

    /// 0 when everything ran without a violation, 1 on a violation, 2 when a
    /// triple failed to evaluate.
    pub fn exit_code(&self) -> i32 {
        if !self.failures.is_empty() {
            2
        } else if self.any_violated() {
            1
        } else {
            0
        }
    }
}

enum Item {
    Report(VerificationReport),
    Failure(SuiteFailure),
    Skip(SuiteSkip),
}

fn run_group(cfg: &SuiteConfig, di: usize, wi: usize) -> Vec<Item> {
    let dc = &cfg.domains[di];
    let fallback_id = dc.id.clone().unwrap_or_else(|| format!("domain{di}"));
    let fail_all = |msg: String| -> Vec<Item> {
        cfg.theorems
            .iter()
            .map(|&t| {
                Item::Failure(SuiteFailure { theorem: t, domain_id: fallback_id.clone(), weight_index: wi, message: msg.clone() })
            })
            .collect()
    };
    let dom = match dc.build() {
        Ok(d) => d,
        Err(e) => return fail_all(e.to_string()),
    };
    let dom = if dom.id.is_none() { dom.with_id(fallback_id.clone()) } else { dom };
    let spec = match cfg.weights[wi].build(2, 2.0 * dom.max_radius()) {
        Ok(s) => s,
        Err(e) => return fail_all(e.to_string()),
    };
    let is_power = matches!(spec, WeightSpec::Power(_));
    let ctx = match Context::new(dom, spec, cfg.options()) {
        Ok(c) => c,
        Err(e) => return fail_all(e.to_string()),
    };
    cfg.theorems
        .iter()
        .map(|&t| {
            if t.uses_power_weights() != is_power {
                return Item::Skip(SuiteSkip { theorem: t, domain_id: fallback_id.clone(), weight_index: wi });
            }
            match verify(t, &ctx) {
                Ok(r) => Item::Report(r),
                Err(e) => Item::Failure(SuiteFailure {
                    theorem: t,
                    domain_id: fallback_id.clone(),
                    weight_index: wi,
                    message: e.to_string(),
                }),
            }
        })
        .collect()
}

/// Runs every triple. Groups sharing a (domain, weight) pair reuse one FEM
/// study; groups run in parallel and results keep the configuration order.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteOutcome {
    let pairs: Vec<(usize, usize)> =
        (0..cfg.domains.len()).flat_map(|d| (0..cfg.weights.len()).map(move |w| (d, w))).collect();
    let groups: Vec<Vec<Item>> = pairs.par_iter().map(|&(d, w)| run_group(cfg, d, w)).collect();
    let mut out = SuiteOutcome::default();
    for item in groups.into_iter().flatten() {
        match item {
            Item::Report(r) => out.reports.push(r),
            Item::Failure(f) => out.failures.push(f),
            Item::Skip(s) => out.skipped.push(s),
        }
    }
    out
}

pub fn run_suite_file(path: &Path) -> Result<SuiteOutcome> {
    Ok(run_suite(&SuiteConfig::load(path)?))
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(reports: &[VerificationReport], mut w: W) -> Result<()> {
    for r in reports {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CsvRow<'a> {
    theorem: &'a str,
    domain_id: &'a str,
    weight_spec: &'a str,
    status: &'a str,
    tight: bool,
    margin: Option<f64>,
    tolerance_used: f64,
    gamma1_omega: Option<f64>,
    gamma2_omega: Option<f64>,
    gamma1_ball: f64,
    radius: f64,
    mesh_h: f64,
    convergence_rate: Option<f64>,
    consistency_ok: bool,
}

/// One summary row per report.
pub fn write_csv<W: Write>(reports: &[VerificationReport], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in reports {
        wr.serialize(CsvRow {
            theorem: r.theorem.as_str(),
            domain_id: &r.domain_id,
            weight_spec: &r.weight_spec,
            status: r.status.as_str(),
            tight: r.tight,
            margin: r.margin,
            tolerance_used: r.tolerance_used,
            gamma1_omega: r.gamma_list_omega.first().copied(),
            gamma2_omega: r.gamma_list_omega.get(1).copied(),
            gamma1_ball: r.gamma1_ball,
            radius: r.radius,
            mesh_h: r.mesh_h,
            convergence_rate: r.convergence_rate,
            consistency_ok: r.consistent(),
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_exits_cleanly() {
        let out = run_suite(&SuiteConfig::default());
        assert!(out.reports.is_empty());
        assert_eq!(out.exit_code(), 0);
        let mut buf = Vec::new();
        write_jsonl(&out.reports, &mut buf).unwrap();
        assert!(buf.is_empty());
    }

    #[test]
    fn mismatched_pairs_are_skipped() {
        let cfg = SuiteConfig::parse(
            r#"{"domains": [{"shape": "disc", "radius": 1}],
                "weights": [{"kind": "logconvex", "family": "constant"}],
                "theorems": ["T1.1"], "h": 0.3, "refinements": 0}"#,
        )
        .unwrap();
        let out = run_suite(&cfg);
        assert!(out.reports.is_empty());
        assert_eq!(out.skipped.len(), 1);
    }

    #[test]
    fn bad_weight_is_a_failure() {
        let cfg = SuiteConfig::parse(
            r#"{"domains": [{"shape": "disc", "radius": 1}],
                "weights": [{"kind": "logconvex", "family": "quadratic", "a": -1}],
                "theorems": ["T1.4"], "h": 0.3, "refinements": 0}"#,
        )
        .unwrap();
        let out = run_suite(&cfg);
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.exit_code(), 2);
    }
}
