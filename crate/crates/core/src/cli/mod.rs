//! Batch front end: scenario files in, reports out.
//!
//! Exit codes: 0 when every task passes, 1 when a task fails, 2 when the
//! scenario cannot be read or does not match the schema.

pub mod parse;
pub mod run;
pub mod scenario;
pub mod sweep;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::error::{Error, Result};
use crate::sampling::Grid;

pub use parse::parse_expr;
pub use run::{run_scenario, Report, RunOptions, Status};
pub use scenario::{parse_scenario, Scenario};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_TASK_FAILURE: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "intertwine", version, about = "Run intertwining-operator scenarios and report residuals")]
pub struct Args {
    /// Scenario file (JSON).
    pub scenario: PathBuf,
    /// Sampling grid as `start,end,count`.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    pub grid: Option<Grid>,
    /// Equality tolerance for sampled identities.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
    /// Seed for randomized tasks.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `start,end,count`.
pub fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b, c] = parts.as_slice() else {
        return Err("expected start,end,count".into());
    };
    let start: f64 = a.parse().map_err(|_| format!("bad start '{a}'"))?;
    let end: f64 = b.parse().map_err(|_| format!("bad end '{b}'"))?;
    let count: usize = c.parse().map_err(|_| format!("bad count '{c}'"))?;
    Grid::new(start, end, count).map_err(|e| e.to_string())
}

/// Loads a scenario file; every failure is a schema error.
pub fn load_scenario(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

/// Runs the CLI and returns the rendered report with the exit code.
pub fn execute(args: &Args) -> (String, i32) {
    let opts = RunOptions { grid: args.grid, equality_tol: args.tol, seed: args.seed };
    match load_scenario(&args.scenario).and_then(|scn| run_scenario(&scn, &opts)) {
        Ok(report) => {
            let text = match args.report {
                ReportFormat::Json => report.to_json(),
                ReportFormat::Text => report.to_text(),
            };
            (text, report.exit_code())
        }
        Err(e) => {
            let text = match args.report {
                ReportFormat::Json => {
                    serde_json::to_string_pretty(&serde_json::json!({ "status": "SCHEMA_ERROR", "error": { "code": e.code(), "message": e.to_string() } }))
                        .expect("serializes")
                        + "\n"
                }
                ReportFormat::Text => format!("{e}\n"),
            };
            (text, EXIT_SCHEMA)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_flag() {
        let g = parse_grid("-2,3,11").unwrap();
        assert_eq!((g.start, g.end, g.count), (-2.0, 3.0, 11));
        assert!(parse_grid("1,0,5").is_err());
        assert!(parse_grid("1,2").is_err());
        let args = Args::try_parse_from(["intertwine", "s.json", "--grid", "-5,5,21", "--report", "json"]).unwrap();
        assert_eq!(args.grid.unwrap().count, 21);
        assert_eq!(args.report, ReportFormat::Json);
    }
}
