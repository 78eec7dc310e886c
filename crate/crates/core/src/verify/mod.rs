//! The envelope `min_{x ∈ S_n} f_x`, certificates that the members of
//! `R_n ∖ S_n` stay above it, exceptional points and plot data.

mod certify;
mod envelope;
mod report;

pub use certify::{cutoffs, grid_span, verify_mintest, Cutoffs, GridConfig, LevelGrid, Status, VerificationCertificate};
pub use envelope::Envelope;
pub use report::{
    check_prior, emit_plot_data, exceptional_points, summarize, targets, verify_conjecture, ConjectureSummary, ExceptionalReport, PlotRow,
    PlotTable,
};
