//! Conserved quantities of the gBO flow.

use crate::field::{Field, Grid};
use crate::spectral::{integrate_checked, Integral};

/// `M[u] = ∫ u²`
pub fn mass(field: &Field) -> f64 {
    mass_checked(field).value
}

pub fn mass_checked(field: &Field) -> Integral {
    integrate_checked(&field.map(|u| u * u))
}

/// `∫ u`
pub fn l1_integral(field: &Field) -> f64 {
    integrate_checked(field).value
}

/// `D[u] = ‖D^{1/2} u‖²`.
///
/// Fourier: `2L Σ |k_n| |a_n|²`, i.e. the quadrature of the `|k|^{1/2}`
/// multiplier squared. Rational: `∫ u · H u_x`, using `D¹ = H ∂_x`.
pub fn seminorm(field: &Field) -> f64 {
    match field.grid() {
        Grid::Fourier(g) => {
            let a = g.analyze(field.values());
            2.0 * g.half_length()
                * a.iter()
                    .zip(g.wavenumbers())
                    .map(|(c, k)| k.abs() * c.norm_sqr())
                    .sum::<f64>()
        }
        Grid::Rational(g) => {
            let a = g.analyze(field.values());
            let hux = g.synthesize_real(&g.hilbert(&g.d1(&a)));
            let integrand: Vec<f64> = field.values().iter().zip(&hux).map(|(u, w)| u * w).collect();
            integrate_checked(&Field::from_parts(field.grid().clone(), integrand)).value
        }
    }
}

/// `‖u‖_{m+1}^{m+1} = ∫ u^{m+1}` for the (positive) profiles used here;
/// computed as `∫ |u|^{m+1}`.
pub fn lp_power(field: &Field, m: u32) -> f64 {
    let p = (m + 1) as i32;
    integrate_checked(&field.map(|u| u.abs().powi(p))).value
}

/// `∫ u^{m+1}` (signed).
pub fn power_integral(field: &Field, m: u32) -> f64 {
    let p = (m + 1) as i32;
    integrate_checked(&field.map(|u| u.powi(p))).value
}

/// `E[u] = ½ D[u] - ∫ u^{m+1} / (m(m+1))`
pub fn energy(field: &Field, m: u32) -> f64 {
    let mf = m as f64;
    0.5 * seminorm(field) - power_integral(field, m) / (mf * (mf + 1.0))
}
