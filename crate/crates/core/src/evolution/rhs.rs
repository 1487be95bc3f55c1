use std::sync::Arc;

use num_complex::Complex64;

use crate::error::Result;
use crate::field::{Field, Grid};
use crate::spectral::{FourierGrid, RationalGrid, SymbolKind};

#[derive(Debug, Clone)]
enum Kind {
    Fourier {
        grid: Arc<FourierGrid>,
        linear: Vec<Complex64>,
        d1: Vec<Complex64>,
    },
    Rational(Arc<RationalGrid>),
}

/// Semi-discrete right-hand side `u_t = H u_xx - (u^m / m)_x`.
///
/// The nonlinear power is formed pointwise; with `dealias` the modes
/// `|n| > 2N/3` of `u^m / m` are dropped before differentiation.
#[derive(Debug, Clone)]
pub struct Rhs {
    m: u32,
    dealias: bool,
    kind: Kind,
}

pub(crate) fn dealias_mask(coeffs: &mut [Complex64]) {
    let n = coeffs.len() / 2;
    let cutoff = (2 * n / 3) as i64;
    for (i, c) in coeffs.iter_mut().enumerate() {
        if (i as i64 - n as i64).abs() > cutoff {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

impl Rhs {
    pub fn new(grid: &Grid, m: u32, dealias: bool) -> Self {
        let kind = match grid {
            Grid::Fourier(g) => Kind::Fourier {
                linear: g.symbol(SymbolKind::LinearGbo),
                d1: g.symbol(SymbolKind::D1),
                grid: g.clone(),
            },
            Grid::Rational(g) => Kind::Rational(g.clone()),
        };
        Self { m, dealias, kind }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Coefficients of `u^m / m`.
    pub fn power_coeffs(&self, u: &[f64]) -> Vec<Complex64> {
        let mf = self.m as f64;
        let p = self.m as i32;
        let w: Vec<f64> = u.iter().map(|v| v.powi(p) / mf).collect();
        let mut a = match &self.kind {
            Kind::Fourier { grid, .. } => grid.analyze(&w),
            Kind::Rational(grid) => grid.analyze(&w),
        };
        if self.dealias {
            dealias_mask(&mut a);
        }
        a
    }

    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        let nl = self.power_coeffs(u);
        match &self.kind {
            Kind::Fourier { grid, linear, d1 } => {
                let a = grid.analyze(u);
                let out: Vec<Complex64> = (0..a.len()).map(|i| linear[i] * a[i] - d1[i] * nl[i]).collect();
                grid.synthesize_real(&out)
            }
            Kind::Rational(grid) => {
                let a = grid.analyze(u);
                let lin = grid.hilbert(&grid.d2(&a));
                let nlx = grid.d1(&nl);
                let out: Vec<Complex64> = lin.iter().zip(&nlx).map(|(l, n)| l - n).collect();
                grid.synthesize_real(&out)
            }
        }
    }
}

/// `u_t` on the Fourier grid.
pub fn rhs_fourier(field: &Field, m: u32) -> Result<Field> {
    field.grid().as_fourier()?;
    field.with_values(Rhs::new(field.grid(), m, false).eval(field.values()))
}

/// `u_t` on the rational grid.
pub fn rhs_rational(field: &Field, m: u32) -> Result<Field> {
    field.grid().as_rational()?;
    field.with_values(Rhs::new(field.grid(), m, false).eval(field.values()))
}
