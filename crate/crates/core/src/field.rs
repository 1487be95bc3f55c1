use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectral::{FourierGrid, RationalGrid};

/// One of the two spatial discretizations. Cloning is cheap.
#[derive(Debug, Clone)]
pub enum Grid {
    Fourier(Arc<FourierGrid>),
    Rational(Arc<RationalGrid>),
}

impl Grid {
    pub fn fourier(n: usize, half_length: f64) -> Result<Self> {
        Ok(Grid::Fourier(FourierGrid::new(n, half_length)?))
    }

    pub fn rational(n: usize, map: f64) -> Result<Self> {
        Ok(Grid::Rational(RationalGrid::new(n, map)?))
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Fourier(g) => g.len(),
            Grid::Rational(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half the node count.
    pub fn n(&self) -> usize {
        self.len() / 2
    }

    /// `L`: the half period (Fourier) or the mapping parameter (rational).
    pub fn length_scale(&self) -> f64 {
        match self {
            Grid::Fourier(g) => g.half_length(),
            Grid::Rational(g) => g.map(),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        match self {
            Grid::Fourier(g) => g.nodes(),
            Grid::Rational(g) => g.nodes(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Grid::Fourier(_) => "fourier",
            Grid::Rational(_) => "rational",
        }
    }

    pub fn as_fourier(&self) -> Result<&Arc<FourierGrid>> {
        match self {
            Grid::Fourier(g) => Ok(g),
            Grid::Rational(_) => Err(Error::GridMismatch { expected: "Fourier" }),
        }
    }

    pub fn as_rational(&self) -> Result<&Arc<RationalGrid>> {
        match self {
            Grid::Rational(g) => Ok(g),
            Grid::Fourier(_) => Err(Error::GridMismatch { expected: "rational" }),
        }
    }

    /// Node index reflected through `x = 0`.
    pub fn mirror_index(&self, k: usize) -> usize {
        match self {
            Grid::Fourier(g) => g.mirror_index(k),
            Grid::Rational(g) => g.mirror_index(k),
        }
    }

    /// True when both grids have the same kind and parameters.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.kind() == other.kind() && self.len() == other.len() && self.length_scale() == other.length_scale()
    }
}

/// Real samples `u_j` of a function on a grid.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `max_j |u_j|`
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_parts(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, s: f64) -> Field {
        self.map(|v| s * v)
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Field> {
        Field::new(self.grid.clone(), values)
    }

    /// `max_j |u_j - v_j|`; panics on mismatched lengths.
    pub fn sup_distance(&self, other: &Field) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Spectral interpolant evaluated at arbitrary `x`.
    ///
    /// Exact on the whole line for the rational basis; periodic for Fourier.
    pub fn evaluate_at(&self, xs: &[f64]) -> Vec<f64> {
        match &self.grid {
            Grid::Fourier(g) => {
                let a = g.analyze(&self.values);
                xs.iter().map(|&x| g.evaluate(&a, x)).collect()
            }
            Grid::Rational(g) => {
                let a = g.analyze(&self.values);
                xs.iter().map(|&x| g.evaluate(&a, x)).collect()
            }
        }
    }
}
