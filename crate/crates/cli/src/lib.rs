//! Library side of `ddtool`: CSV loading, analysis dispatch, result files
//! and SVG figures.

pub mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod table;

pub use error::CliError;
pub use output::{format_number, Summary, SCHEMA_VERSION};
pub use run::{run, AnalysisConfig, Method, RunReport};
pub use table::{load_table, load_weights, read_table, TableFile, TableKind};
