//! Runs a small campaign and writes it as CSV, e.g.
//! `cargo run --release --example run_experiment -- snr_vs_pd out.csv`.

use std::path::PathBuf;

use issac::harness::{emit_csv, run_experiment, ExperimentKind, ExperimentSpec};
use issac::Error;

fn main() -> Result<(), Error> {
    let mut args = std::env::args().skip(1);
    let kind: ExperimentKind = args.next().as_deref().unwrap_or("nrmse_vs_pt").parse()?;
    let out = PathBuf::from(args.next().unwrap_or_else(|| format!("{kind}.csv")));

    let mut spec = ExperimentSpec::new(kind);
    spec.trials = 100;
    spec.seed = 2024;
    spec.apply_set("M=32")?;
    println!("{}", spec.to_json());

    let table = run_experiment(&spec)?;
    println!("{}", table.columns.join("  "));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:.4}")).collect();
        println!("{}", cells.join("  "));
    }
    emit_csv(&table, &out)?;
    println!("wrote {}", out.display());
    Ok(())
}
