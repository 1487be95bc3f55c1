//! Ground states `Q` of `-Q - H Q' + Q^m / m = 0` by Petviashvili iteration.
//!
//! Each step applies `(H ∂_x + 1)^{-1}` to `Q^m / m` and renormalizes by
//! `(SL/SR)^{m/(m-1)}` with `SL = ∫ Q²` and `SR = ∫ Q (H ∂_x + 1)^{-1}[Q^m/m]`,
//! which keeps the iterate from collapsing to zero or diverging.

use std::f64::consts::PI;

use crate::diagnostics::{lp_power, mass, seminorm};
use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::spectral::{integrate_checked, ShiftedHilbertSolver, SymbolKind, EDGE_DECAY_LIMIT};

#[derive(Debug, Clone)]
pub struct PetviashviliConfig {
    /// Stop once `‖Q^{(n+1)} - Q^{(n)}‖_∞ < tolerance`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Defaults to `e^{-x²}` sampled on the solve grid.
    pub initial_guess: Option<Field>,
}

impl Default for PetviashviliConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 10_000,
            initial_guess: None,
        }
    }
}

impl PetviashviliConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let Some(guess) = &self.initial_guess {
            if !guess.values().iter().any(|&v| v > 0.0) {
                return Err(Error::InvalidConfig("initial guess must be positive somewhere".into()));
            }
        }
        Ok(())
    }
}

/// Converged profile with its cached invariants.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub m: u32,
    pub profile: Field,
    pub iterations: usize,
    pub final_delta: f64,
    /// `M[Q]`
    pub mass: f64,
    /// `D[Q] = ‖(H ∂_x)^{1/2} Q‖²`
    pub seminorm: f64,
    /// `E[Q]`
    pub energy: f64,
    /// `P[Q] = ‖Q‖_{m+1}^{m+1} / (m(m+1))`
    pub potential: f64,
}

impl GroundState {
    /// Wraps an already computed profile and evaluates its invariants.
    pub fn from_profile(m: u32, profile: Field, iterations: usize, final_delta: f64) -> Self {
        let mf = m as f64;
        let mass = mass(&profile);
        let seminorm = seminorm(&profile);
        let potential = lp_power(&profile, m) / (mf * (mf + 1.0));
        Self {
            m,
            iterations,
            final_delta,
            mass,
            seminorm,
            energy: 0.5 * seminorm - potential,
            potential,
            profile,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.profile.grid()
    }
}

/// Default solve grid: rational, `N = 4096`, `L = 20` (`L = 10` for `m = 5`).
pub fn default_grid(m: u32) -> Result<Grid> {
    let map = if m == 5 { 10.0 } else { 20.0 };
    Grid::rational(4096, map)
}

/// `(H ∂_x + 1)^{-1}` on either discretization.
#[derive(Debug, Clone)]
pub enum ShiftedInverse {
    Fourier(Vec<f64>),
    Rational(ShiftedHilbertSolver),
}

impl ShiftedInverse {
    pub fn new(grid: &Grid) -> Self {
        match grid {
            Grid::Fourier(g) => {
                ShiftedInverse::Fourier(g.symbol(SymbolKind::InvHilbertShift).iter().map(|s| s.re).collect())
            }
            Grid::Rational(g) => ShiftedInverse::Rational(ShiftedHilbertSolver::new(g)),
        }
    }

    pub fn apply(&self, field: &Field) -> Result<Field> {
        let values = match (self, field.grid()) {
            (ShiftedInverse::Fourier(symbol), Grid::Fourier(g)) => {
                let mut a = g.analyze(field.values());
                a.iter_mut().zip(symbol).for_each(|(c, s)| *c *= s);
                g.synthesize_real(&a)
            }
            (ShiftedInverse::Rational(solver), Grid::Rational(g)) => {
                let mut a = g.analyze(field.values());
                solver.solve_in_place(&mut a);
                g.synthesize_real(&a)
            }
            (ShiftedInverse::Fourier(_), _) => return Err(Error::GridMismatch { expected: "Fourier" }),
            (ShiftedInverse::Rational(_), _) => return Err(Error::GridMismatch { expected: "rational" }),
        };
        Ok(Field::from_parts(field.grid().clone(), values))
    }
}

/// Iteration map with the inverse operator factored once per grid.
#[derive(Debug, Clone)]
pub struct Petviashvili {
    m: u32,
    inverse: ShiftedInverse,
}

impl Petviashvili {
    pub fn new(grid: &Grid, m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidConfig(format!(
                "nonlinearity power must be >= 2, got {m}"
            )));
        }
        Ok(Self {
            m,
            inverse: ShiftedInverse::new(grid),
        })
    }

    pub fn step(&self, q: &Field) -> Result<Field> {
        let mf = self.m as f64;
        let p = self.m as i32;
        let t = self.inverse.apply(&q.map(|v| v.powi(p) / mf))?;
        let sl = integrate_checked(&q.map(|v| v * v)).value;
        let prod: Vec<f64> = q.values().iter().zip(t.values()).map(|(a, b)| a * b).collect();
        let sr = integrate_checked(&Field::from_parts(q.grid().clone(), prod)).value;
        let ratio = sl / sr;
        if sr.abs() < 1e-300 || !(ratio.is_finite() && ratio > 0.0) {
            return Err(Error::DegenerateIterate { sr });
        }
        let scale = ratio.powf(mf / (mf - 1.0));
        Ok(t.scaled(scale))
    }
}

/// One renormalized step `(SL/SR)^{m/(m-1)} (H ∂_x + 1)^{-1}[Q^m/m]`.
pub fn petviashvili_step(q: &Field, m: u32) -> Result<Field> {
    Petviashvili::new(q.grid(), m)?.step(q)
}

fn symmetrize(field: &mut Field) {
    let grid = field.grid().clone();
    let v = field.values().to_vec();
    for (k, out) in field.values_mut().iter_mut().enumerate() {
        *out = 0.5 * (v[k] + v[grid.mirror_index(k)]);
    }
}

pub fn petviashvili_solve(config: &PetviashviliConfig, m: u32, grid: &Grid) -> Result<GroundState> {
    config.validate()?;
    let solver = Petviashvili::new(grid, m)?;
    let mut q = match &config.initial_guess {
        Some(g) => {
            if !g.grid().same_as(grid) {
                return Err(Error::InvalidConfig("initial guess lives on a different grid".into()));
            }
            g.clone()
        }
        None => Field::from_fn(grid.clone(), |x| (-x * x).exp()),
    };
    let mut delta = f64::INFINITY;
    for it in 1..=config.max_iterations {
        let mut next = solver.step(&q)?;
        symmetrize(&mut next);
        delta = next.sup_distance(&q);
        if log::log_enabled!(log::Level::Debug) {
            let diff = next.with_values(next.values().iter().zip(q.values()).map(|(a, b)| a - b).collect())?;
            log::debug!(
                "petviashvili m={m} it={it} sup={delta:e} rel_l2={:e}",
                (mass(&diff) / mass(&next)).sqrt()
            );
        }
        q = next;
        if delta < config.tolerance {
            return Ok(GroundState::from_profile(m, q, it, delta));
        }
    }
    Err(Error::NoConvergence {
        iterations: config.max_iterations,
        last_delta: delta,
    })
}

/// Pohozaev residuals `(e1, e2)`:
/// `e1 = |‖Q‖² - 2‖Q‖_{m+1}^{m+1}/(m(m+1))|`, `e2 = |(m-1)/2 ‖Q‖² - D[Q]|`.
pub fn pohozaev_errors(gs: &GroundState) -> (f64, f64) {
    let mf = gs.m as f64;
    let e1 = (gs.mass - 2.0 * gs.potential).abs();
    let e2 = (0.5 * (mf - 1.0) * gs.mass - gs.seminorm).abs();
    (e1, e2)
}

/// Fraction of spectral content in the top eighth of the modes.
fn spectral_tail(field: &Field) -> f64 {
    let (coeffs, n) = match field.grid() {
        Grid::Fourier(g) => (g.analyze(field.values()), g.n()),
        Grid::Rational(g) => (g.analyze(field.values()), g.n()),
    };
    let peak = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if peak == 0.0 {
        return 0.0;
    }
    let cutoff = (7 * n / 8) as i64;
    let tail = coeffs
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as i64 - n as i64).abs() >= cutoff)
        .fold(0.0f64, |m, (_, c)| m.max(c.norm()));
    tail / peak
}

/// Largest tolerated tail fraction for a resampled profile.
const RESAMPLE_TAIL_LIMIT: f64 = 1e-8;

/// Scaling-law family `c^{1/(m-1)} Q(c x)`; for `m = 2` this is the explicit
/// soliton family `c Q(c x) = 4c / (1 + c² x²)`.
pub fn rescale(gs: &GroundState, c: f64) -> Result<Field> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidConfig(format!("scale must be positive, got {c}")));
    }
    let grid = gs.grid().clone();
    if c == 1.0 {
        return Ok(gs.profile.clone());
    }
    let amp = c.powf(1.0 / (gs.m as f64 - 1.0));
    let targets: Vec<f64> = grid.nodes().iter().map(|x| c * x).collect();
    let values = match &grid {
        Grid::Fourier(g) => {
            let l = g.half_length();
            let outside = targets.iter().any(|t| *t < -l || *t >= l);
            if outside && crate::spectral::edge_decay_ratio(gs.profile.values()) > EDGE_DECAY_LIMIT {
                return Err(Error::ResampleOutOfBand(format!(
                    "scale {c} maps nodes outside the periodic cell where the profile has not decayed"
                )));
            }
            let a = g.analyze(gs.profile.values());
            targets
                .iter()
                .map(|&t| if t < -l || t >= l { 0.0 } else { amp * g.evaluate(&a, t) })
                .collect()
        }
        Grid::Rational(g) => {
            let a = g.analyze(gs.profile.values());
            targets.iter().map(|&t| amp * g.evaluate(&a, t)).collect()
        }
    };
    let out = Field::from_parts(grid, values);
    let tail = spectral_tail(&out);
    if tail > RESAMPLE_TAIL_LIMIT {
        return Err(Error::ResampleOutOfBand(format!(
            "scale {c} leaves spectral tail {tail:e} above {RESAMPLE_TAIL_LIMIT:e}"
        )));
    }
    Ok(out)
}

/// Best constant of the Gagliardo-Nirenberg inequality
/// `‖v‖_{m+1}^{m+1} ≤ C_m D[v]^{(m-1)/2} ‖v‖²`.
pub fn gn_constant(gs: &GroundState) -> f64 {
    gn_constant_from_mass(gs.m, gs.mass)
}

pub fn gn_constant_from_mass(m: u32, mass_q: f64) -> f64 {
    let mf = m as f64;
    0.5 * mf * (mf + 1.0) * (2.0 / ((mf - 1.0) * mass_q)).powf(0.5 * (mf - 1.0))
}

/// The explicit BO ground state `4 / (1 + x²)`.
pub fn bo_soliton(x: f64) -> f64 {
    4.0 / (1.0 + x * x)
}

/// `M[Q] = 8π` for the BO soliton.
pub const BO_MASS: f64 = 8.0 * PI;
