//! File-driven front end for the `blockexp` solver.

pub mod error;
pub mod inputs;
pub mod mm;
pub mod output;
pub mod run;

pub use error::InputError;
pub use run::{run_solve, RunManifest, RunOutcome};
