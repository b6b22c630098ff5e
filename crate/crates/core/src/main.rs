use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use groupoidal::harness::{
    emit_report, load_spec, run_oracle, run_suite_with_jobs, suite::build_fixtures, Check, OracleKind, ReportFormat, VerificationReport,
};
use groupoidal::Result;

#[derive(Parser)]
#[command(name = "groupoidal", version, about = "Hausdorff-Young checks on finite measured groupoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a spec and build every groupoid in it.
    Validate { spec: PathBuf },
    /// Print δ, unimodularity and the dimensions of M and M′.
    Info { spec: PathBuf },
    /// Run the randomized suite.
    Verify {
        spec: PathBuf,
        /// Comma-separated subset of plancherel,hy,proofpath,tensor,modular,oracles.
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long)]
        seed: Option<u64>,
        /// Relative slack on inequalities.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Compare against a classical oracle.
    Oracle { kind: OracleArg, spec: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleArg {
    Dft,
    Schatten,
}

fn summarize(report: &VerificationReport) -> ExitCode {
    let a = &report.aggregates;
    println!("{} rows, {} passed, {} failed", a.rows, a.passed, a.failed);
    for (check, c) in &a.by_check {
        println!("  {check:<32} {:>6} pass {:>6} fail", c.passed, c.failed);
    }
    if let Some(m) = a.min_relative_margin {
        println!("min relative margin {m:.3e}");
    }
    if let Some(r) = a.max_residual {
        println!("max residual {r:.3e}");
    }
    let failures: Vec<_> = report.failures().collect();
    for r in failures.iter().take(20) {
        println!(
            "FAIL {} lhs={:.6e} rhs={:.6e}{}",
            r.case_id,
            r.lhs,
            r.rhs,
            r.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default()
        );
    }
    if failures.len() > 20 {
        println!("... {} more failures", failures.len() - 20);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { spec } => {
            let s = load_spec(&spec)?;
            for (id, mg) in s.build_fixtures()? {
                let g = mg.groupoid();
                println!("{id}: ok ({} arrows, {} units)", g.n_arrows(), g.n_units());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Info { spec } => {
            let s = load_spec(&spec)?;
            for fx in build_fixtures(&s)? {
                let mg = fx.base();
                let g = mg.groupoid();
                let vn = fx.ctx.vn_data()?;
                println!("{}: {} arrows, {} units", fx.id, g.n_arrows(), g.n_units());
                println!("  unimodular: {}", mg.is_unimodular(1e-12));
                let delta: Vec<String> = (0..g.n_arrows()).map(|a| format!("{}={:.6}", g.label(a), mg.delta()[a])).collect();
                println!("  delta: {}", delta.join(" "));
                println!("  dim M = {}, dim M' = {}", vn.dim_m(), vn.dim_m_prime());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            spec,
            checks,
            seed,
            tol,
            report,
            csv,
            jobs,
        } => {
            let mut s = load_spec(&spec)?;
            if let Some(c) = checks {
                s.checks = c.iter().map(|x| x.trim().parse::<Check>()).collect::<Result<_>>()?;
            }
            if let Some(seed) = seed {
                s.seed = seed;
            }
            if let Some(t) = tol {
                s.tolerances.inequality = t;
            }
            s.validate()?;
            let r = run_suite_with_jobs(&s, jobs)?;
            if let Some(path) = report {
                emit_report(&r, ReportFormat::Json, path)?;
            }
            if let Some(path) = csv {
                emit_report(&r, ReportFormat::Csv, path)?;
            }
            Ok(summarize(&r))
        }
        Command::Oracle { kind, spec } => {
            let s = load_spec(&spec)?;
            let which = match kind {
                OracleArg::Dft => OracleKind::Dft,
                OracleArg::Schatten => OracleKind::Schatten,
            };
            Ok(summarize(&run_oracle(&s, which)?))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
