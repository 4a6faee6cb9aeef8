//! Declarative Monte Carlo campaigns with deterministic seeding and CSV
//! output.

mod experiments;
mod spec;
mod table;

pub use experiments::run_experiment;
pub use spec::{ExperimentKind, ExperimentSpec, FixedParams};
pub use table::{emit_csv, format_g9, ResultTable};
