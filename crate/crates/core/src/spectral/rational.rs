//! Rational basis on the whole line.
//!
//! The basis is `φ_n(x) = (L + i x)^n / (L - i x)^{n+1}`. Under the map
//! `x = L tan(θ/2)` one has `(L - i x) φ_n(x) = e^{i n θ}`, so the weighted
//! field `(L - i x) u` is a plain Fourier series in `θ` and the coefficients
//! come from one FFT over uniformly spaced angles.
//!
//! The angles are half-shifted, `θ_j = (j + 1/2) π / N` for `j = -N..N-1`, so
//! no node sits at `θ = ±π` (the point at infinity). The shift shows up as the
//! phase `e^{∓ i n h / 2}` carried by the transforms.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::fourier::sgn;
use crate::error::{Error, Result};
use crate::field::{Field, Grid};

pub struct RationalGrid {
    n: usize,
    map: f64,
    step: f64,
    angles: Vec<f64>,
    nodes: Vec<f64>,
    jacobian: Vec<f64>,
    weight: Vec<Complex64>,
    analysis_phase: Vec<Complex64>,
    synthesis_phase: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for RationalGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RationalGrid")
            .field("n", &self.n)
            .field("map", &self.map)
            .finish()
    }
}

impl RationalGrid {
    /// Builds a grid with `2n` nodes and mapping parameter `map` (`L`).
    pub fn new(n: usize, map: f64) -> Result<Arc<Self>> {
        if n == 0 || !(2 * n).is_power_of_two() {
            return Err(Error::InvalidGrid(format!("2N must be a power of two, got N = {n}")));
        }
        if !(map.is_finite() && map > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "mapping parameter must be positive, got {map}"
            )));
        }
        let step = PI / n as f64;
        let angles: Vec<f64> = (0..2 * n).map(|k| (k as f64 - n as f64 + 0.5) * step).collect();
        let nodes: Vec<f64> = angles.iter().map(|t| map * (t / 2.0).tan()).collect();
        let jacobian = angles
            .iter()
            .map(|t| {
                let c = (t / 2.0).cos();
                0.5 * map / (c * c)
            })
            .collect();
        let weight = nodes.iter().map(|&x| Complex64::new(map, -x)).collect();
        let mode = |i: usize| i as i64 - n as i64;
        let analysis_phase = (0..2 * n)
            .map(|i| {
                let m = mode(i) as f64;
                // e^{-i n θ_{-N}} with θ_{-N} = (-N + 1/2) h
                Complex64::from_polar(1.0, -m * (-(n as f64) + 0.5) * step)
            })
            .collect();
        let synthesis_phase = (0..2 * n)
            .map(|i| {
                let m = mode(i) as f64;
                Complex64::from_polar(1.0, m * (-(n as f64) + 0.5) * step)
            })
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            n,
            map,
            step,
            angles,
            nodes,
            jacobian,
            weight,
            analysis_phase,
            synthesis_phase,
            forward: planner.plan_fft_forward(2 * n),
            inverse: planner.plan_fft_inverse(2 * n),
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mapping parameter `L`; half of the nodes lie in `[-L, L]`.
    pub fn map(&self) -> f64 {
        self.map
    }

    /// Angular spacing `h = π / N`.
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `dx/dθ = (L/2) sec²(θ/2)` at each node.
    pub fn jacobian(&self) -> &[f64] {
        &self.jacobian
    }

    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        i as i64 - self.n as i64
    }

    pub fn mirror_index(&self, k: usize) -> usize {
        self.len() - 1 - k
    }

    /// Coefficients of `u` with `(L - i x) u = Σ a_n e^{i n θ}`.
    pub fn analyze(&self, values: &[f64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len());
        let buf = values.iter().zip(&self.weight).map(|(&u, &p)| p * u).collect();
        self.analyze_weighted(buf)
    }

    pub fn analyze_complex(&self, values: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(values.len(), self.len());
        let buf = values.iter().zip(&self.weight).map(|(&u, &p)| p * u).collect();
        self.analyze_weighted(buf)
    }

    fn analyze_weighted(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        self.forward.process(&mut buf);
        let two_n = self.len() as i64;
        let scale = 1.0 / two_n as f64;
        (0..self.len())
            .map(|i| {
                let q = self.mode(i).rem_euclid(two_n) as usize;
                buf[q] * self.analysis_phase[i] * scale
            })
            .collect()
    }

    /// Complex nodal values `Σ a_n φ_n(x_j)`.
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.len());
        let two_n = self.len() as i64;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len()];
        for (i, &a) in coeffs.iter().enumerate() {
            let q = self.mode(i).rem_euclid(two_n) as usize;
            buf[q] = a * self.synthesis_phase[i];
        }
        self.inverse.process(&mut buf);
        buf.iter().zip(&self.weight).map(|(v, p)| v / p).collect()
    }

    pub fn synthesize_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.synthesize(coeffs).into_iter().map(|z| z.re).collect()
    }

    /// Tridiagonal derivative recurrence; coefficients beyond the truncation are zero.
    pub fn d1(&self, a: &[Complex64]) -> Vec<Complex64> {
        let len = a.len();
        let pre = Complex64::new(0.0, 0.5 / self.map);
        (0..len)
            .map(|i| {
                let n = self.mode(i) as f64;
                let mut acc = a[i] * (2.0 * n + 1.0);
                if i > 0 {
                    acc += a[i - 1] * n;
                }
                if i + 1 < len {
                    acc += a[i + 1] * (n + 1.0);
                }
                pre * acc
            })
            .collect()
    }

    /// Pentadiagonal second-derivative recurrence.
    pub fn d2(&self, a: &[Complex64]) -> Vec<Complex64> {
        let len = a.len();
        let pre = -0.25 / (self.map * self.map);
        (0..len)
            .map(|i| {
                let n = self.mode(i) as f64;
                let mut acc = a[i] * (6.0 * n * n + 6.0 * n + 2.0);
                if i >= 2 {
                    acc += a[i - 2] * (n * (n - 1.0));
                }
                if i >= 1 {
                    acc += a[i - 1] * (4.0 * n * n);
                }
                if i + 1 < len {
                    acc += a[i + 1] * (4.0 * (n + 1.0) * (n + 1.0));
                }
                if i + 2 < len {
                    acc += a[i + 2] * ((n + 2.0) * (n + 1.0));
                }
                acc * pre
            })
            .collect()
    }

    /// Hilbert transform: `a_n -> -i sgn(n) a_n` with `sgn(0) = +1`.
    pub fn hilbert(&self, a: &[Complex64]) -> Vec<Complex64> {
        (0..a.len())
            .map(|i| a[i] * Complex64::new(0.0, -sgn(self.mode(i))))
            .collect()
    }

    /// Exact evaluation of `Σ a_n φ_n(x)` at an arbitrary real `x`.
    pub fn evaluate(&self, coeffs: &[Complex64], x: f64) -> f64 {
        let theta = 2.0 * (x / self.map).atan();
        let base = Complex64::from_polar(1.0, theta);
        let mut phase = Complex64::from_polar(1.0, -(self.n as f64) * theta);
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in coeffs {
            acc += a * phase;
            phase *= base;
        }
        (acc / Complex64::new(self.map, -x)).re
    }

    /// Value at `x = 0`, where every `φ_n` equals `1/L`.
    pub fn value_at_origin(&self, coeffs: &[Complex64]) -> Complex64 {
        coeffs.iter().sum::<Complex64>() / self.map
    }

    /// Gershgorin bound on the spectral radius of the dispersive operator
    /// `C_H C_2`, used for the explicit-step stability guard.
    pub fn dispersive_radius_bound(&self) -> f64 {
        let pre = 0.25 / (self.map * self.map);
        (0..self.len())
            .map(|i| {
                let n = self.mode(i) as f64;
                let mut s = (6.0 * n * n + 6.0 * n + 2.0).abs();
                if i >= 2 {
                    s += (n * (n - 1.0)).abs();
                }
                if i >= 1 {
                    s += 4.0 * n * n;
                }
                if i + 1 < self.len() {
                    s += 4.0 * (n + 1.0) * (n + 1.0);
                }
                if i + 2 < self.len() {
                    s += ((n + 2.0) * (n + 1.0)).abs();
                }
                pre * s
            })
            .fold(0.0, f64::max)
    }
}

/// Factorization of `C_H C_1 + I`, the coefficient-space form of `H ∂_x + 1`.
///
/// The matrix is real, tridiagonal and strictly diagonally dominant
/// (diagonal `1 + |2n+1|/2L`, off-diagonal row sum `|2n+1|/2L`), so
/// elimination without pivoting is stable. Built once per grid.
#[derive(Debug, Clone)]
pub struct ShiftedHilbertSolver {
    lower: Vec<f64>,
    upper_mod: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl ShiftedHilbertSolver {
    pub fn new(grid: &RationalGrid) -> Self {
        let len = grid.len();
        let c = 0.5 / grid.map();
        let mut lower = vec![0.0; len];
        let mut diag = vec![0.0; len];
        let mut upper = vec![0.0; len];
        for i in 0..len {
            let n = grid.mode(i) as f64;
            let s = sgn(grid.mode(i)) * c;
            lower[i] = s * n;
            diag[i] = 1.0 + s * (2.0 * n + 1.0);
            upper[i] = s * (n + 1.0);
        }
        let mut upper_mod = vec![0.0; len];
        let mut inv_pivot = vec![0.0; len];
        let mut prev = 0.0;
        for i in 0..len {
            let pivot = diag[i] - if i > 0 { lower[i] * prev } else { 0.0 };
            inv_pivot[i] = 1.0 / pivot;
            prev = upper[i] * inv_pivot[i];
            upper_mod[i] = prev;
        }
        Self {
            lower,
            upper_mod,
            inv_pivot,
        }
    }

    /// Solves `(C_H C_1 + I) x = rhs` in place.
    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let len = rhs.len();
        for i in 0..len {
            let prev = if i > 0 {
                rhs[i - 1] * self.lower[i]
            } else {
                Complex64::new(0.0, 0.0)
            };
            rhs[i] = (rhs[i] - prev) * self.inv_pivot[i];
        }
        for i in (0..len.saturating_sub(1)).rev() {
            let next = rhs[i + 1];
            rhs[i] -= next * self.upper_mod[i];
        }
    }
}

/// Rational-basis coefficients `a_n`, `n = -N..N-1`.
#[derive(Debug, Clone)]
pub struct RationalSpectrum {
    grid: Arc<RationalGrid>,
    coeffs: Vec<Complex64>,
}

impl RationalSpectrum {
    pub fn new(grid: Arc<RationalGrid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Arc<RationalGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn mode(&self, n: i64) -> Complex64 {
        self.coeffs[(n + self.grid.n() as i64) as usize]
    }

    fn with(&self, coeffs: Vec<Complex64>) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }
}

pub fn rational_analyze(field: &Field) -> Result<RationalSpectrum> {
    let grid = field.grid().as_rational()?;
    Ok(RationalSpectrum {
        coeffs: grid.analyze(field.values()),
        grid: grid.clone(),
    })
}

/// Real part of the synthesized values.
pub fn rational_synthesize(spec: &RationalSpectrum) -> Field {
    let values = spec.grid.synthesize_real(&spec.coeffs);
    Field::from_parts(Grid::Rational(spec.grid.clone()), values)
}

pub fn rational_d1(spec: &RationalSpectrum) -> RationalSpectrum {
    spec.with(spec.grid.d1(&spec.coeffs))
}

pub fn rational_d2(spec: &RationalSpectrum) -> RationalSpectrum {
    spec.with(spec.grid.d2(&spec.coeffs))
}

pub fn rational_hilbert(spec: &RationalSpectrum) -> RationalSpectrum {
    spec.with(spec.grid.hilbert(&spec.coeffs))
}
