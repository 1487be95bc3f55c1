//! Conserved quantities, drift, peak tracking, soliton fits and outcome
//! classification.

mod classify;
mod fit;
mod functionals;
mod peak;
mod series;

pub use classify::{classify, classify_series, ClassifyConfig, Evidence, Outcome, OutcomeKind};
pub use fit::{bo_soliton_c, soliton_fit, SolitonFit};
pub use functionals::{energy, l1_integral, lp_power, mass, mass_checked, power_integral, seminorm};
pub use peak::{peak_locate, Peak};
pub use series::{drift, read_series_csv, write_series_csv, DiagnosticSample, DriftTracker, SERIES_HEADER};
