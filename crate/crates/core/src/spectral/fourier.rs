//! Periodic Fourier discretization on `[-L, L)`.
//!
//! Nodes are `x_j = j L / N` for `j = -N..N-1` and modes are `k_n = n π / L`
//! for `n = -N..N-1`. Coefficient vectors are stored in mode order, so the
//! coefficient of mode `n` lives at index `n + N`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{Field, Grid};

/// Diagonal Fourier multipliers used by the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// `i k`
    D1,
    /// `-k^2`
    D2,
    /// `-i sgn(n)`, with `sgn(0) = +1`
    Hilbert,
    /// `|k|^{1/2}`
    HalfDeriv,
    /// `i k |k|`, the symbol of `H ∂_xx`
    LinearGbo,
    /// `1 / (|k| + 1)`, the symbol of `(H ∂_x + 1)^{-1}`
    InvHilbertShift,
}

/// Sign convention shared by both discretizations: `sgn(0) = +1`.
#[inline]
pub(crate) fn sgn(n: i64) -> f64 {
    if n >= 0 {
        1.0
    } else {
        -1.0
    }
}

pub struct FourierGrid {
    n: usize,
    half_length: f64,
    nodes: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid")
            .field("n", &self.n)
            .field("half_length", &self.half_length)
            .finish()
    }
}

impl FourierGrid {
    /// Builds a grid with `2n` nodes on `[-half_length, half_length)`.
    pub fn new(n: usize, half_length: f64) -> Result<Arc<Self>> {
        if n == 0 || !(2 * n).is_power_of_two() {
            return Err(Error::InvalidGrid(format!("2N must be a power of two, got N = {n}")));
        }
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half length must be positive, got {half_length}"
            )));
        }
        let h = half_length / n as f64;
        let nodes = (0..2 * n).map(|k| (k as f64 - n as f64) * h).collect();
        let wavenumbers = (0..2 * n).map(|i| (i as f64 - n as f64) * PI / half_length).collect();
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Self {
            n,
            half_length,
            nodes,
            wavenumbers,
            forward: planner.plan_fft_forward(2 * n),
            inverse: planner.plan_fft_inverse(2 * n),
        }))
    }

    /// Half the number of nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Uniform node spacing `h = L / N`.
    pub fn spacing(&self) -> f64 {
        self.half_length / self.n as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `k_n` in mode order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Mode index `n` stored at position `i`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        i as i64 - self.n as i64
    }

    /// Largest `|k|`, reached by the unpaired mode `n = -N`.
    pub fn max_wavenumber(&self) -> f64 {
        self.n as f64 * PI / self.half_length
    }

    /// Discrete analysis `a_n = (1/2N) Σ_j u_j e^{-i k_n x_j}`.
    pub fn analyze(&self, values: &[f64]) -> Vec<Complex64> {
        let buf = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.analyze_complex_owned(buf)
    }

    pub fn analyze_complex(&self, values: &[Complex64]) -> Vec<Complex64> {
        self.analyze_complex_owned(values.to_vec())
    }

    fn analyze_complex_owned(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        assert_eq!(buf.len(), self.len());
        self.forward.process(&mut buf);
        let two_n = self.len();
        let scale = 1.0 / two_n as f64;
        (0..two_n)
            .map(|i| {
                let n = self.mode(i);
                let q = n.rem_euclid(two_n as i64) as usize;
                // e^{-i n π (k - N)/N} = (-1)^n e^{-i n π k / N}
                let sign = if n.rem_euclid(2) == 0 { scale } else { -scale };
                buf[q] * sign
            })
            .collect()
    }

    /// Synthesis `u_j = Σ_n a_n e^{i k_n x_j}` (complex values).
    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.len());
        let two_n = self.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); two_n];
        for (i, &a) in coeffs.iter().enumerate() {
            let n = self.mode(i);
            let q = n.rem_euclid(two_n as i64) as usize;
            buf[q] = if n.rem_euclid(2) == 0 { a } else { -a };
        }
        self.inverse.process(&mut buf);
        buf
    }

    /// Real part of [`FourierGrid::synthesize`].
    pub fn synthesize_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        self.synthesize(coeffs).into_iter().map(|z| z.re).collect()
    }

    /// Multiplier values of `kind` in mode order.
    pub fn symbol(&self, kind: SymbolKind) -> Vec<Complex64> {
        (0..self.len())
            .map(|i| {
                let k = self.wavenumbers[i];
                let s = sgn(self.mode(i));
                match kind {
                    SymbolKind::D1 => Complex64::new(0.0, k),
                    SymbolKind::D2 => Complex64::new(-k * k, 0.0),
                    SymbolKind::Hilbert => Complex64::new(0.0, -s),
                    SymbolKind::HalfDeriv => Complex64::new(k.abs().sqrt(), 0.0),
                    SymbolKind::LinearGbo => Complex64::new(0.0, k * k.abs()),
                    SymbolKind::InvHilbertShift => Complex64::new(1.0 / (k.abs() + 1.0), 0.0),
                }
            })
            .collect()
    }

    /// Trigonometric interpolant of `coeffs` at an arbitrary point.
    pub fn evaluate(&self, coeffs: &[Complex64], x: f64) -> f64 {
        let base = Complex64::from_polar(1.0, PI * x / self.half_length);
        let mut phase = Complex64::from_polar(1.0, -(self.n as f64) * PI * x / self.half_length);
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in coeffs {
            acc += a * phase;
            phase *= base;
        }
        acc.re
    }

    /// Index of the node mirrored through `x = 0` (periodically).
    #[inline]
    pub fn mirror_index(&self, k: usize) -> usize {
        (self.len() - k) % self.len()
    }
}

/// Fourier coefficients `a_n`, `n = -N..N-1`.
#[derive(Debug, Clone)]
pub struct FourierSpectrum {
    grid: Arc<FourierGrid>,
    coeffs: Vec<Complex64>,
}

impl FourierSpectrum {
    pub fn new(grid: Arc<FourierGrid>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Arc<FourierGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of mode `n`.
    pub fn mode(&self, n: i64) -> Complex64 {
        self.coeffs[(n + self.grid.n() as i64) as usize]
    }
}

pub fn fourier_analyze(field: &Field) -> Result<FourierSpectrum> {
    let grid = field.grid().as_fourier()?;
    Ok(FourierSpectrum {
        coeffs: grid.analyze(field.values()),
        grid: grid.clone(),
    })
}

/// Real field synthesized from `spec`; the imaginary part is discarded.
pub fn fourier_synthesize(spec: &FourierSpectrum) -> Field {
    let values = spec.grid.synthesize_real(&spec.coeffs);
    Field::from_parts(Grid::Fourier(spec.grid.clone()), values)
}

pub fn fourier_apply_symbol(spec: &FourierSpectrum, kind: SymbolKind) -> FourierSpectrum {
    let symbol = spec.grid.symbol(kind);
    let coeffs = spec.coeffs.iter().zip(&symbol).map(|(a, s)| a * s).collect();
    FourierSpectrum {
        grid: spec.grid.clone(),
        coeffs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<FourierGrid> {
        FourierGrid::new(32, 2.0 * PI).unwrap()
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(FourierGrid::new(12, 1.0).is_err());
        assert!(FourierGrid::new(16, -1.0).is_err());
    }

    #[test]
    fn single_cosine_mode() {
        let g = grid();
        let l = g.half_length();
        let f = Field::from_fn(Grid::Fourier(g.clone()), |x| (PI * x / l).cos());
        let spec = fourier_analyze(&f).unwrap();
        for i in 0..g.len() {
            let n = g.mode(i);
            let expected = if n.abs() == 1 { 0.5 } else { 0.0 };
            assert!(
                (spec.coeffs()[i] - Complex64::new(expected, 0.0)).norm() < 1e-14,
                "n={n}"
            );
        }
    }

    #[test]
    fn constant_field() {
        let g = grid();
        let f = Field::from_fn(Grid::Fourier(g.clone()), |_| 1.0);
        let spec = fourier_analyze(&f).unwrap();
        assert!((spec.mode(0) - 1.0).norm() < 1e-15);
        let rest: f64 = (0..g.len())
            .filter(|&i| g.mode(i) != 0)
            .map(|i| spec.coeffs()[i].norm())
            .fold(0.0, f64::max);
        assert!(rest < 1e-15);
    }

    #[test]
    fn synthesize_zero_and_unit() {
        let g = grid();
        let zero = FourierSpectrum::new(g.clone(), vec![Complex64::new(0.0, 0.0); g.len()]).unwrap();
        assert!(fourier_synthesize(&zero).values().iter().all(|&v| v == 0.0));
        let mut c = vec![Complex64::new(0.0, 0.0); g.len()];
        c[g.n()] = Complex64::new(1.0, 0.0);
        let one = FourierSpectrum::new(g.clone(), c).unwrap();
        assert!(fourier_synthesize(&one)
            .values()
            .iter()
            .all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn hilbert_maps_cos_to_sin() {
        let g = grid();
        let l = g.half_length();
        let k = 3.0 * PI / l;
        let f = Field::from_fn(Grid::Fourier(g.clone()), |x| (k * x).cos());
        let h = fourier_synthesize(&fourier_apply_symbol(
            &fourier_analyze(&f).unwrap(),
            SymbolKind::Hilbert,
        ));
        for (x, v) in g.nodes().iter().zip(h.values()) {
            assert!((v - (k * x).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_shift_keeps_mean_mode() {
        let g = grid();
        let mut c = vec![Complex64::new(0.0, 0.0); g.len()];
        c[g.n()] = Complex64::new(0.7, 0.0);
        let spec = FourierSpectrum::new(g.clone(), c.clone()).unwrap();
        let out = fourier_apply_symbol(&spec, SymbolKind::InvHilbertShift);
        assert_eq!(out.coeffs(), &c[..]);
    }

    #[test]
    fn evaluate_matches_nodes() {
        let g = grid();
        let f = Field::from_fn(Grid::Fourier(g.clone()), |x| (-x * x).exp());
        let spec = fourier_analyze(&f).unwrap();
        for k in [0, 7, 31, 50] {
            let x = g.nodes()[k];
            assert!((g.evaluate(spec.coeffs(), x) - f.values()[k]).abs() < 1e-13);
        }
    }
}
