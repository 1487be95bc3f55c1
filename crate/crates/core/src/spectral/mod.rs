//! Grids, transforms and spectral operators for both discretizations.

mod fourier;
mod quadrature;
mod rational;

pub use fourier::{
    fourier_analyze, fourier_apply_symbol, fourier_synthesize, FourierGrid, FourierSpectrum, SymbolKind,
};
pub use quadrature::{edge_decay_ratio, integrate, integrate_checked, Integral, EDGE_DECAY_LIMIT};
pub use rational::{
    rational_analyze, rational_d1, rational_d2, rational_hilbert, rational_synthesize, RationalGrid, RationalSpectrum,
    ShiftedHilbertSolver,
};
