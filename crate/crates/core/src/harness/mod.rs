//! Suite specs, the randomized verification runner, classical oracles and reports.

pub mod oracles;
pub mod report;
pub mod spec;
pub mod suite;

pub use oracles::{DftOracle, SchattenOracle};
pub use report::{emit_report, load_report, ReportFormat, Row, RowKind, VerificationReport};
pub use spec::{load_spec, Check, FixtureSpec, SuiteSpec, SuiteTolerances};
pub use suite::{run_oracle, run_suite, run_suite_with_jobs, Fixture, OracleKind};

/// The bundled fixture suite.
pub const BUNDLED_SPEC: &str = include_str!("../../fixtures/bundled.json");

pub fn bundled() -> SuiteSpec {
    SuiteSpec::parse(BUNDLED_SPEC).expect("bundled spec is valid")
}
