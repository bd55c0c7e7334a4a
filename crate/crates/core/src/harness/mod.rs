//! Experiment harness: recovery sweeps, the buffer/message comparison table,
//! CSV and SVG emission, and the `key = value` config format.

mod config;
mod csv_io;
mod plot;
mod sweep;
mod table;

pub use config::{apply_config_line, parse_config};
pub use csv_io::{
    emit_curves_csv, emit_report_csv, emit_table_csv, parse_curves_csv, parse_table_csv,
};
pub use plot::{emit_plot, render_plot};
pub use sweep::{mean_stddev, paper_figs, sweep, SweepCurve, SweepPoint, PAPER_FIG_SIZES};
pub use table::{table1, ComparisonTable, TableRow, TABLE1_BUFFERS};
