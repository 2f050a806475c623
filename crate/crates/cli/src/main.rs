mod config;
mod query;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use vreg_core::scalars::FieldConfig;
use vreg_core::suites::{run_suite, Status, SUITES};

#[derive(Parser)]
#[command(name = "vreg", version, about = "Exact verification suites for regular representations of vertex operator algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the suites of a session config and write a JSONL report.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report path; overrides the config.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Expansion depth for every suite.
        #[arg(long)]
        depth: Option<i64>,
        /// Window `lo..hi` for every suite.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Evaluate a single expression.
    Query {
        expr: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        depth: Option<i64>,
    },
    /// Print the suite names.
    ListSuites,
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::ListSuites => {
            for s in SUITES {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Query { expr, config, depth } => match run_query(&expr, config, depth) {
            Ok(s) => {
                println!("{s}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
        Cmd::Run { config, report, jobs, depth, window } => run(config, report, jobs, depth, window),
    }
}

fn run_query(expr: &str, config: Option<PathBuf>, depth: Option<i64>) -> Result<String> {
    let (field, cutoff) = match config {
        Some(p) => {
            let c = config::load(&p)?;
            let plan = c.plan()?;
            let field = plan.suites[0].1.field()?;
            (field, c.cutoff)
        }
        None => (FieldConfig::formal(1)?, 8),
    };
    let expr = match depth {
        Some(d) if !expr.contains("depth") => format!("{expr} depth {d}"),
        _ => expr.to_string(),
    };
    query::answer(&expr, &field, cutoff)
}

fn run(config: PathBuf, report: Option<PathBuf>, jobs: Option<usize>, depth: Option<i64>, window: Option<String>) -> ExitCode {
    let plan = (|| -> Result<config::Plan> {
        let mut plan = config::load(&config)?.plan()?;
        let window = window.as_deref().map(config::parse_window).transpose()?;
        for (_, p) in &mut plan.suites {
            p.window = window.or(p.window);
            p.depth = depth.or(p.depth);
        }
        if let Some(r) = report {
            plan.report = Some(r);
        }
        Ok(plan)
    })();
    let plan = match plan {
        Ok(p) => p,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    }
    let results: Vec<_> = plan.suites.par_iter().map(|(name, p)| run_suite(name, p).expect("suite names are validated")).collect();
    let records: Vec<_> = results.into_iter().flatten().collect();
    let failed = records.iter().filter(|r| r.status == Status::Fail).count();
    if let Err(e) = write_report(plan.report.as_ref(), &records) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    eprintln!("{} checks, {} failed", records.len(), failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn write_report(path: Option<&PathBuf>, records: &[vreg_core::suites::Record]) -> Result<()> {
    let mut text = String::new();
    for r in records {
        text.push_str(&r.json_line());
        text.push('\n');
    }
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing report"),
    }
}
