//! Frame pinned to the peak: `ξ = x - x_c(t)`, `b = x_c'(t)`, and
//! `v_t = b v_ξ - σ H v_ξξ - (v^m/m)_ξ` with `b` chosen so that
//! `v_ξ(0, t)` stays constant.

use std::sync::Arc;

use num_complex::Complex64;

use super::rhs::dealias_mask;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::spectral::RationalGrid;

/// Sign `σ` of the dispersive term in the comoving equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DispersionSign {
    /// `σ = -1`, the same dispersion as the lab-frame solver.
    #[default]
    Gbo,
    /// `σ = +1`, the opposite sign.
    Reversed,
}

impl DispersionSign {
    pub fn sigma(self) -> f64 {
        match self {
            DispersionSign::Gbo => -1.0,
            DispersionSign::Reversed => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComovingState {
    pub v: Field,
    pub x_c: f64,
    pub b: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct ComovingRhs {
    grid: Arc<RationalGrid>,
    m: u32,
    sigma: f64,
    dealias: bool,
}

impl ComovingRhs {
    pub(crate) fn new(grid: Arc<RationalGrid>, m: u32, sign: DispersionSign, dealias: bool) -> Self {
        Self {
            grid,
            m,
            sigma: sign.sigma(),
            dealias,
        }
    }

    /// Frame-free part `R0 = -σ H v_ξξ - (v^m/m)_ξ` and `v_ξξ`, as coefficients.
    fn parts(&self, v: &[f64]) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let g = &self.grid;
        let mf = self.m as f64;
        let p = self.m as i32;
        let a = g.analyze(v);
        let a2 = g.d2(&a);
        let w: Vec<f64> = v.iter().map(|x| x.powi(p) / mf).collect();
        let mut nl = g.analyze(&w);
        if self.dealias {
            dealias_mask(&mut nl);
        }
        let h2 = g.hilbert(&a2);
        let nlx = g.d1(&nl);
        let r0 = h2.iter().zip(&nlx).map(|(h, n)| -self.sigma * h - n).collect();
        (a, a2, r0)
    }

    /// `b = -∂_ξ R0(0) / v_ξξ(0)`.
    fn speed(&self, v: &[f64], a2: &[Complex64], r0: &[Complex64]) -> Result<f64> {
        let g = &self.grid;
        let curvature = g.value_at_origin(a2).re;
        let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if !(curvature.abs() > 1e-10 * sup) {
            return Err(Error::DegenerateCurvature { curvature });
        }
        Ok(-g.value_at_origin(&g.d1(r0)).re / curvature)
    }

    pub(crate) fn b(&self, v: &[f64]) -> Result<f64> {
        let (_, a2, r0) = self.parts(v);
        self.speed(v, &a2, &r0)
    }

    /// `(v_t, b)` at the given state.
    pub(crate) fn eval(&self, v: &[f64]) -> Result<(Vec<f64>, f64)> {
        let (a, a2, r0) = self.parts(v);
        let b = self.speed(v, &a2, &r0)?;
        let ax = self.grid.d1(&a);
        let out: Vec<Complex64> = ax.iter().zip(&r0).map(|(d, r)| b * d + r).collect();
        Ok((self.grid.synthesize_real(&out), b))
    }

    /// RK4 step of the coupled `(v, x_c)` system; `b` is recomputed per stage.
    pub(crate) fn step(&self, v: &[f64], t: f64, dt: f64) -> Result<(Vec<f64>, f64)> {
        let finite = |w: &[f64]| {
            if w.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::NonFinite { t })
            }
        };
        let axpy = |s: f64, k: &[f64]| -> Vec<f64> { v.iter().zip(k).map(|(a, b)| a + s * b).collect() };
        let (k1, b1) = self.eval(v)?;
        finite(&k1)?;
        let (k2, b2) = self.eval(&axpy(0.5 * dt, &k1))?;
        finite(&k2)?;
        let (k3, b3) = self.eval(&axpy(0.5 * dt, &k2))?;
        finite(&k3)?;
        let (k4, b4) = self.eval(&axpy(dt, &k3))?;
        finite(&k4)?;
        let next: Vec<f64> = (0..v.len())
            .map(|i| v[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        finite(&next)?;
        Ok((next, dt / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4)))
    }
}

/// Frame speed `b = [σ H v_ξξξ + (v^m/m)_ξξ] / v_ξξ` at `ξ = 0`.
pub fn comoving_b(v: &Field, m: u32, sign: DispersionSign) -> Result<f64> {
    let g = v.grid().as_rational()?.clone();
    ComovingRhs::new(g, m, sign, false).b(v.values())
}

/// `v_ξ(0)` of the spectral interpolant.
pub fn center_slope(v: &Field) -> Result<f64> {
    let g = v.grid().as_rational()?;
    Ok(g.value_at_origin(&g.d1(&g.analyze(v.values()))).re)
}
