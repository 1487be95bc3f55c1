use crate::field::{Field, Grid};

/// Edge magnitude, relative to the peak, above which quadrature is flagged.
pub const EDGE_DECAY_LIMIT: f64 = 1e-8;

/// Quadrature value plus the domain-truncation flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Set when the outermost samples exceed `EDGE_DECAY_LIMIT * max|u|`.
    pub edge_warning: bool,
}

/// `max(|u_first|, |u_last|) / max|u|`, or 0 for the zero field.
pub fn edge_decay_ratio(values: &[f64]) -> f64 {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || values.is_empty() {
        return 0.0;
    }
    let edge = values[0].abs().max(values[values.len() - 1].abs());
    edge / peak
}

/// Trapezoid rule (Fourier) or mapped trapezoid in `θ` (rational).
pub(crate) fn quadrature(grid: &Grid, values: &[f64]) -> f64 {
    match grid {
        Grid::Fourier(g) => g.spacing() * values.iter().sum::<f64>(),
        Grid::Rational(g) => g.step() * values.iter().zip(g.jacobian()).map(|(u, w)| u * w).sum::<f64>(),
    }
}

pub fn integrate_checked(field: &Field) -> Integral {
    Integral {
        value: quadrature(field.grid(), field.values()),
        edge_warning: edge_decay_ratio(field.values()) > EDGE_DECAY_LIMIT,
    }
}

/// `∫ u dx`; logs a warning when the field has not decayed at the grid edges.
pub fn integrate(field: &Field) -> f64 {
    let out = integrate_checked(field);
    if out.edge_warning {
        log::warn!(
            "integrand not decayed at grid edges (ratio {:e}); quadrature may be truncated",
            edge_decay_ratio(field.values())
        );
    }
    out.value
}
