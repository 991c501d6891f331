//! File formats, configuration and the run driver.

pub mod config;
pub mod format;
pub mod measured;
pub mod run;
pub mod svg;
pub mod touchstone;

pub use config::{ConfigFile, Formats, Mode, OutputOptions, RunConfig};
pub use measured::{
    parse_measured_table, parse_measured_table_in, read_measured_table, MeasuredPortTable, MeasuredRow,
};
pub use run::{run, Artifact, RunSummary};
pub use touchstone::{
    export_touchstone, export_touchstone_with, import_touchstone, import_touchstone_sweep, parse_touchstone,
    write_touchstone, DataFormat, FrequencyUnit, TouchstoneOptions,
};
