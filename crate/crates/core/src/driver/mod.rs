//! Experiment orchestration: configuration, marking, the adaptive loop, CSV output.

mod adapt;
mod config;
mod csv;
mod marking;

pub use adapt::{
    adapt_loop, benchmark, calibrate_reference, convergence_rate, count_dofs, summary_line, LevelRecord, RunOutcome,
};
pub use config::{BoundsSelection, ProblemKind, Refinement, RunConfig};
pub use csv::{csv_header, csv_string, emit_csv};
pub use marking::{doerfler_mark, doerfler_select, star_triangles};
