//! Run the randomized suite from a spec file (default: the bundled one)
//! and write JSON and CSV reports next to it.
//!
//!     cargo run --release --example run_suite -- fixtures/small.json

use groupoidal::harness::{bundled, emit_report, load_spec, run_suite, ReportFormat};

fn main() -> groupoidal::Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => load_spec(path)?,
        None => bundled(),
    };
    let report = run_suite(&spec)?;
    let out = std::env::temp_dir();
    emit_report(&report, ReportFormat::Json, out.join("groupoidal_report.json"))?;
    emit_report(&report, ReportFormat::Csv, out.join("groupoidal_report.csv"))?;

    for (check, c) in &report.aggregates.by_check {
        println!("{check:<30} {:>5} pass {:>4} fail", c.passed, c.failed);
    }
    for r in report.failures().take(5) {
        println!("FAIL {} lhs {:.4} rhs {:.4}", r.case_id, r.lhs, r.rhs);
    }
    println!("reports in {}", out.display());
    Ok(())
}
