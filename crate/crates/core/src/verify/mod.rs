//! Numerical verification of the eigenvalue inequalities and batch suites.

pub mod config;
pub mod pipelines;
pub mod report;
pub mod suite;

pub use config::SuiteConfig;
pub use pipelines::{verify, verify_c13, verify_t11, verify_t12, verify_t14, verify_t15, Context, Tolerances, VerifyOptions};
pub use report::{decide_status, ConsistencyRow, ErrorBudget, RowKind, Status, Theorem, VerificationReport};
pub use suite::{run_suite, run_suite_file, write_csv, write_jsonl, SuiteFailure, SuiteOutcome, SuiteSkip};
