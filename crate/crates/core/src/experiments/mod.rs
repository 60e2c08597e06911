//! Parameter sweeps, correlation analysis and table persistence.

mod correlation;
mod sweep;
mod table;

pub use correlation::{correlation_matrix, pearson, CorrelationMatrix};
pub use sweep::{run_sweep, Axis, Param, Spacing, SweepRow, SweepSpec, SweepTable};
pub use table::{
    metadata_path, read_csv, read_metadata, read_table, spec_hash, verify_metadata, write_csv,
    write_table, TableMetadata, LIBRARY_VERSION,
};
