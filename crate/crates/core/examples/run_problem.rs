//! Runs a problem file (default: the lambda-symmetry sample) and prints the
//! text and JSON reports.
//!
//! cargo run --example run_problem -- examples/problems/heat.txt

use jetprolong::cli::{run, ProblemFile, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/problems/lambda_symmetry.txt"
        )
        .to_string()
    });
    let file = ProblemFile::parse(&std::fs::read_to_string(&path)?)?;
    let report = run(&file, &RunOptions::default());
    print!("{}", report.to_text());
    println!("{}", report.to_json());
    Ok(())
}
