use std::io::Write;

use clap::Parser;

use intertwine::cli::{execute, Args};

fn main() {
    let args = Args::parse();
    let (report, code) = execute(&args);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(report.as_bytes());
    let _ = out.flush();
    std::process::exit(code);
}
