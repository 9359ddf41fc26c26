//! Time integration, configuration, output files and verification suites.

mod config;
mod io;
mod run;
mod step;
pub mod verify;

pub use config::{GridSpec, InitialConditions, OutputSpec, Scheme, SimConfig};
pub use io::{
    read_diagnostics, read_field, read_snapshot, write_diagnostics, write_field, write_snapshot, SnapshotField,
    SnapshotMeta, CSV_HEADER, FORMAT_VERSION, MAGIC,
};
pub use run::{diagnostics, run, DiagnosticsRow, RunOutput};
pub use step::step;
pub use verify::{fitted_order, verify, Check, Report, Suite};
