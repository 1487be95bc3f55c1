//! Fourth-order exponential time differencing (Kassam-Trefethen form) with
//! coefficients averaged over a contour around each `z = dt λ`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::rhs::dealias_mask;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::spectral::{FourierGrid, SymbolKind};

/// Contour points used for the coefficient averages.
pub const CONTOUR_POINTS: usize = 32;

/// Per-mode weights for one step size.
#[derive(Debug, Clone)]
pub struct ETDCoefficients {
    pub grid: Arc<FourierGrid>,
    pub dt: f64,
    /// `e^{z}`
    pub e: Vec<Complex64>,
    /// `e^{z/2}`
    pub e2: Vec<Complex64>,
    /// `dt (e^{z/2} - 1) / z`
    pub q: Vec<Complex64>,
    pub f1: Vec<Complex64>,
    pub f2: Vec<Complex64>,
    pub f3: Vec<Complex64>,
}

/// Contour averages of `(q, f1, f2, f3) / dt` at `z`.
pub fn etd_weights(z: Complex64) -> [Complex64; 4] {
    let mut acc = [Complex64::new(0.0, 0.0); 4];
    for j in 0..CONTOUR_POINTS {
        let r = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / CONTOUR_POINTS as f64);
        let w = direct_weights(z + r);
        for (a, v) in acc.iter_mut().zip(w) {
            *a += v;
        }
    }
    acc.map(|a| a / CONTOUR_POINTS as f64)
}

/// Direct formulas; ill-conditioned for small `|z|`.
pub fn direct_weights(z: Complex64) -> [Complex64; 4] {
    let ez = z.exp();
    let z2 = z * z;
    let z3 = z2 * z;
    [
        ((z / 2.0).exp() - 1.0) / z,
        (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3,
        (2.0 + z + ez * (z - 2.0)) / z3,
        (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3,
    ]
}

pub fn etdrk4_setup(grid: &Arc<FourierGrid>, dt: f64) -> Result<ETDCoefficients> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
    }
    let lambda = grid.symbol(SymbolKind::LinearGbo);
    let len = lambda.len();
    let mut c = ETDCoefficients {
        grid: grid.clone(),
        dt,
        e: Vec::with_capacity(len),
        e2: Vec::with_capacity(len),
        q: Vec::with_capacity(len),
        f1: Vec::with_capacity(len),
        f2: Vec::with_capacity(len),
        f3: Vec::with_capacity(len),
    };
    for l in lambda {
        let z = l * dt;
        let [q, f1, f2, f3] = etd_weights(z);
        c.e.push(z.exp());
        c.e2.push((z / 2.0).exp());
        c.q.push(q * dt);
        c.f1.push(f1 * dt);
        c.f2.push(f2 * dt);
        c.f3.push(f3 * dt);
    }
    Ok(c)
}

/// One step in coefficient space for `v_t = λ v + N(v)`.
pub fn etdrk4_step_with<F>(c: &ETDCoefficients, v: &[Complex64], nonlinear: F) -> Vec<Complex64>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let len = v.len();
    let nv = nonlinear(v);
    let a: Vec<Complex64> = (0..len).map(|i| c.e2[i] * v[i] + c.q[i] * nv[i]).collect();
    let na = nonlinear(&a);
    let b: Vec<Complex64> = (0..len).map(|i| c.e2[i] * v[i] + c.q[i] * na[i]).collect();
    let nb = nonlinear(&b);
    let cc: Vec<Complex64> = (0..len)
        .map(|i| c.e2[i] * a[i] + c.q[i] * (2.0 * nb[i] - nv[i]))
        .collect();
    let nc = nonlinear(&cc);
    (0..len)
        .map(|i| c.e[i] * v[i] + nv[i] * c.f1[i] + 2.0 * (na[i] + nb[i]) * c.f2[i] + nc[i] * c.f3[i])
        .collect()
}

/// ETDRK4 stepper for the gBO nonlinearity `-(u^m/m)_x`.
#[derive(Debug, Clone)]
pub struct Etdrk4 {
    coeffs: ETDCoefficients,
    d1: Vec<Complex64>,
    m: u32,
    dealias: bool,
}

impl Etdrk4 {
    pub fn new(grid: &Arc<FourierGrid>, dt: f64, m: u32, dealias: bool) -> Result<Self> {
        Ok(Self {
            coeffs: etdrk4_setup(grid, dt)?,
            d1: grid.symbol(SymbolKind::D1),
            m,
            dealias,
        })
    }

    pub fn coefficients(&self) -> &ETDCoefficients {
        &self.coeffs
    }

    fn nonlinear(&self, v: &[Complex64]) -> Vec<Complex64> {
        let g = &self.coeffs.grid;
        let mf = self.m as f64;
        let p = self.m as i32;
        let u = g.synthesize_real(v);
        let w: Vec<f64> = u.iter().map(|x| x.powi(p) / mf).collect();
        let mut a = g.analyze(&w);
        if self.dealias {
            dealias_mask(&mut a);
        }
        a.iter().zip(&self.d1).map(|(x, d)| -x * d).collect()
    }

    /// Advances physical values by one step; `t` labels a failure.
    pub fn step(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        let g = &self.coeffs.grid;
        let v = g.analyze(u);
        let next = g.synthesize_real(&etdrk4_step_with(&self.coeffs, &v, |x| self.nonlinear(x)));
        if next.iter().all(|x| x.is_finite()) {
            Ok(next)
        } else {
            Err(Error::NonFinite { t: t + self.coeffs.dt })
        }
    }
}

/// One ETDRK4 step of the gBO equation.
pub fn etdrk4_step(field: &Field, coeffs: &ETDCoefficients, m: u32) -> Result<Field> {
    let g = field.grid().as_fourier()?;
    if !Arc::ptr_eq(g, &coeffs.grid) && (g.len() != coeffs.grid.len() || g.half_length() != coeffs.grid.half_length()) {
        return Err(Error::InvalidConfig("coefficients belong to a different grid".into()));
    }
    let stepper = Etdrk4 {
        coeffs: coeffs.clone(),
        d1: g.symbol(SymbolKind::D1),
        m,
        dealias: false,
    };
    field.with_values(stepper.step(field.values(), 0.0)?)
}
