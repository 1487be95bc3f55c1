//! Time integration: RK4 on either grid, ETDRK4 on the Fourier grid, and the
//! comoving-frame system on the rational grid.

mod comoving;
mod etd;
mod rhs;
mod rk4;

use std::fmt;
use std::str::FromStr;

pub use comoving::{center_slope, comoving_b, ComovingState, DispersionSign};
pub use etd::{
    direct_weights, etd_weights, etdrk4_setup, etdrk4_step, etdrk4_step_with, ETDCoefficients, Etdrk4, CONTOUR_POINTS,
};
pub use rhs::{rhs_fourier, rhs_rational, Rhs};
pub use rk4::rk4_step;

use crate::diagnostics::{DiagnosticSample, DriftTracker};
use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use comoving::ComovingRhs;

/// RK4 is stable on the imaginary axis up to `2√2`; warn slightly below.
pub const CFL_LIMIT: f64 = 2.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discretization {
    Fourier,
    Rational,
}

impl Discretization {
    pub fn of(grid: &Grid) -> Self {
        match grid {
            Grid::Fourier(_) => Discretization::Fourier,
            Grid::Rational(_) => Discretization::Rational,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrator {
    Rk4,
    Etdrk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HaltReason {
    Completed,
    AmplitudeStop,
    DriftStop,
    NonFinite,
    DegenerateCurvature,
}

impl fmt::Display for HaltReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HaltReason::Completed => "Completed",
            HaltReason::AmplitudeStop => "AmplitudeStop",
            HaltReason::DriftStop => "DriftStop",
            HaltReason::NonFinite => "NonFinite",
            HaltReason::DegenerateCurvature => "DegenerateCurvature",
        })
    }
}

impl FromStr for HaltReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "Completed" => HaltReason::Completed,
            "AmplitudeStop" => HaltReason::AmplitudeStop,
            "DriftStop" => HaltReason::DriftStop,
            "NonFinite" => HaltReason::NonFinite,
            "DegenerateCurvature" => HaltReason::DegenerateCurvature,
            other => return Err(Error::Parse(format!("unknown halt reason {other:?}"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub m: u32,
    pub discretization: Discretization,
    pub integrator: Integrator,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between diagnostic samples.
    pub record_every: usize,
    /// Stop once `‖u‖_∞` exceeds this multiple of its initial value.
    pub stop_amplitude_factor: f64,
    /// Stop once the mass or energy drift exceeds this (absolute).
    pub stop_drift: f64,
    pub snapshot_times: Vec<f64>,
    /// Drop the top third of the modes of `u^m/m`.
    pub dealias: bool,
}

impl EvolutionConfig {
    pub fn new(m: u32, discretization: Discretization, integrator: Integrator, dt: f64, t_end: f64) -> Self {
        Self {
            m,
            discretization,
            integrator,
            dt,
            t_end,
            record_every: 10,
            stop_amplitude_factor: 10.0,
            stop_drift: 1e-4,
            snapshot_times: Vec::new(),
            dealias: false,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m < 2 {
            return bad(format!("nonlinearity power must be >= 2, got {}", self.m));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if !(self.stop_amplitude_factor > 1.0) || !(self.stop_drift > 0.0) {
            return bad("stop thresholds must be positive (amplitude factor > 1)".into());
        }
        if Discretization::of(grid) != self.discretization {
            return bad(format!("initial data lives on a {} grid", grid.kind()));
        }
        if self.integrator == Integrator::Etdrk4 && self.discretization != Discretization::Fourier {
            return bad("ETDRK4 is only paired with the Fourier discretization".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionState {
    pub t: f64,
    pub field: Field,
    pub step_count: usize,
    pub halted_reason: Option<HaltReason>,
}

#[derive(Debug, Clone)]
pub struct EvolutionRun {
    pub m: u32,
    pub series: Vec<DiagnosticSample>,
    /// Last finite state.
    pub final_field: Field,
    pub t_final: f64,
    pub steps: usize,
    pub halt: HaltReason,
    pub snapshots: Vec<(f64, Field)>,
    /// Frame position for comoving runs.
    pub x_c: Option<f64>,
}

impl EvolutionRun {
    pub fn final_state(&self) -> EvolutionState {
        EvolutionState {
            t: self.t_final,
            field: self.final_field.clone(),
            step_count: self.steps,
            halted_reason: Some(self.halt),
        }
    }
}

/// Largest `|λ|` of the linear operator, for the RK4 stability guard.
pub fn linear_spectral_radius(grid: &Grid) -> f64 {
    match grid {
        Grid::Fourier(g) => g.max_wavenumber().powi(2),
        Grid::Rational(g) => g.dispersive_radius_bound(),
    }
}

enum Stepper {
    Rk4(Rhs),
    Etd {
        m: u32,
        dealias: bool,
        cache: Option<Etdrk4>,
    },
    Comoving {
        rhs: ComovingRhs,
        x_c: f64,
    },
}

impl Stepper {
    fn advance(&mut self, grid: &Grid, u: &[f64], t: f64, dt: f64) -> Result<Vec<f64>> {
        match self {
            Stepper::Rk4(rhs) => rk4_step(u, t, dt, |v| rhs.eval(v)),
            Stepper::Etd { m, dealias, cache } => {
                if cache.as_ref().is_none_or(|s| s.coefficients().dt != dt) {
                    *cache = Some(Etdrk4::new(grid.as_fourier()?, dt, *m, *dealias)?);
                }
                cache.as_ref().map(|s| s.step(u, t)).unwrap()
            }
            Stepper::Comoving { rhs, x_c } => {
                let (next, shift) = rhs.step(u, t, dt)?;
                *x_c += shift;
                Ok(next)
            }
        }
    }

    fn frame(&self, u: &[f64]) -> (Option<f64>, Option<f64>) {
        match self {
            Stepper::Comoving { rhs, x_c } => (Some(*x_c), rhs.b(u).ok()),
            _ => (None, None),
        }
    }
}

fn drive(u0: &Field, config: &EvolutionConfig, mut stepper: Stepper) -> Result<EvolutionRun> {
    let grid = u0.grid().clone();
    let m = config.m;
    if !u0.is_finite() {
        return Err(Error::InvalidConfig("initial data is not finite".into()));
    }
    if config.integrator == Integrator::Rk4 {
        let z = config.dt * linear_spectral_radius(&grid);
        if z > CFL_LIMIT {
            log::warn!("dt * max|λ| = {z:.3} exceeds the RK4 stability bound {CFL_LIMIT}");
        }
    }

    let full = (config.t_end / config.dt).round();
    let (n_steps, last_dt) = if (full * config.dt - config.t_end).abs() <= 1e-9 * config.t_end.max(1.0) {
        (full as usize, config.dt)
    } else {
        let n = (config.t_end / config.dt).ceil() as usize;
        (n, config.t_end - (n - 1) as f64 * config.dt)
    };

    let mut tracker = DriftTracker::new();
    let mut series = Vec::new();
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = config.snapshot_times.clone();
    pending.sort_by(f64::total_cmp);
    pending.reverse();

    let mut u = u0.values().to_vec();
    let mut t = 0.0;
    let amp0 = u0.sup_norm();
    let sample = |u: &[f64], t: f64, tracker: &mut DriftTracker, stepper: &Stepper| {
        let f = Field::new(grid.clone(), u.to_vec()).expect("grid length");
        let (x_c, b) = stepper.frame(u);
        DiagnosticSample::measure(&f, m, t, tracker, x_c, b)
    };
    let mut take_snapshots = |u: &[f64], t: f64, dt: f64, snaps: &mut Vec<(f64, Field)>| {
        while pending.last().is_some_and(|&ts| ts <= t + 0.5 * dt) {
            pending.pop();
            snaps.push((t, Field::new(grid.clone(), u.to_vec()).expect("grid length")));
        }
    };

    series.push(sample(&u, t, &mut tracker, &stepper));
    take_snapshots(&u, t, config.dt, &mut snapshots);
    let mut halt = HaltReason::Completed;
    let mut steps = 0;
    for step in 1..=n_steps {
        let dt = if step == n_steps { last_dt } else { config.dt };
        match stepper.advance(&grid, &u, t, dt) {
            Ok(next) => u = next,
            Err(Error::NonFinite { t: tf }) => {
                log::info!("non-finite state near t = {tf}");
                halt = HaltReason::NonFinite;
                break;
            }
            Err(Error::DegenerateCurvature { curvature }) => {
                log::info!("frame curvature degenerate ({curvature:e}) at t = {t}");
                halt = HaltReason::DegenerateCurvature;
                break;
            }
            Err(e) => return Err(e),
        }
        t = if step == n_steps {
            config.t_end
        } else {
            step as f64 * config.dt
        };
        steps = step;
        take_snapshots(&u, t, config.dt, &mut snapshots);

        let amp = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if amp0 > 0.0 && amp > config.stop_amplitude_factor * amp0 {
            series.push(sample(&u, t, &mut tracker, &stepper));
            halt = HaltReason::AmplitudeStop;
            break;
        }
        if step % config.record_every == 0 || step == n_steps {
            let s = sample(&u, t, &mut tracker, &stepper);
            series.push(s);
            if s.drift_mass > config.stop_drift || s.drift_energy > config.stop_drift {
                halt = HaltReason::DriftStop;
                break;
            }
        }
    }
    if halt != HaltReason::Completed && series.last().is_some_and(|s| s.t != t) {
        series.push(sample(&u, t, &mut tracker, &stepper));
    }
    let x_c = match &stepper {
        Stepper::Comoving { x_c, .. } => Some(*x_c),
        _ => None,
    };
    Ok(EvolutionRun {
        m,
        series,
        final_field: Field::new(grid, u)?,
        t_final: t,
        steps,
        halt,
        snapshots,
        x_c,
    })
}

/// Lab-frame evolution until `t_end` or a stop rule fires.
pub fn evolve(u0: &Field, config: &EvolutionConfig) -> Result<EvolutionRun> {
    config.validate(u0.grid())?;
    let stepper = match config.integrator {
        Integrator::Rk4 => Stepper::Rk4(Rhs::new(u0.grid(), config.m, config.dealias)),
        Integrator::Etdrk4 => Stepper::Etd {
            m: config.m,
            dealias: config.dealias,
            cache: None,
        },
    };
    drive(u0, config, stepper)
}

/// Comoving-frame evolution (rational grid, RK4) with `b` recomputed at
/// every stage and `x_c` integrated alongside.
pub fn comoving_evolve(v0: &Field, config: &EvolutionConfig, sign: DispersionSign) -> Result<EvolutionRun> {
    config.validate(v0.grid())?;
    if config.discretization != Discretization::Rational || config.integrator != Integrator::Rk4 {
        return Err(Error::InvalidConfig(
            "the comoving system runs on the rational grid with RK4".into(),
        ));
    }
    let g = v0.grid().as_rational()?.clone();
    let rhs = ComovingRhs::new(g, config.m, sign, config.dealias);
    rhs.b(v0.values())?;
    drive(v0, config, Stepper::Comoving { rhs, x_c: 0.0 })
}
