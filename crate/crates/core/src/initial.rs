//! Named initial-data families.

use std::fmt;
use std::str::FromStr;

use crate::diagnostics::bo_soliton_c;
use crate::error::{Error, Result};
use crate::field::{Field, Grid};
use crate::ground_state::{rescale, GroundState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// `Q_c(x - shift)`; the explicit BO soliton for `m = 2`, the rescaled
    /// numerical ground state otherwise.
    ExactSoliton {
        c: f64,
        shift: f64,
    },
    /// `A e^{-|x|^p}`
    Gaussian {
        a: f64,
        p: f64,
    },
    /// `A / (1 + |x|^p)`
    Rational {
        a: f64,
        p: f64,
    },
    /// `A / √(1 + x²)`
    InvSqrt {
        a: f64,
    },
    /// `A Q`
    ScaledGroundState {
        a: f64,
    },
    Zero,
}

impl InitialData {
    pub fn needs_ground_state(&self, m: u32) -> bool {
        match self {
            InitialData::ScaledGroundState { .. } => true,
            InitialData::ExactSoliton { .. } => m != 2,
            _ => false,
        }
    }

    /// Samples the data on `grid`. The ground state, when needed, may live
    /// on any grid; it is interpolated spectrally.
    pub fn sample(&self, grid: &Grid, m: u32, gs: Option<&GroundState>) -> Result<Field> {
        let need_gs = || gs.ok_or_else(|| Error::InvalidConfig("this initial datum needs a ground state".into()));
        let from_gs = |profile: &Field, scale: f64, shift: f64| {
            let xs: Vec<f64> = grid.nodes().iter().map(|x| x - shift).collect();
            let v = profile.evaluate_at(&xs).into_iter().map(|u| scale * u).collect();
            Field::new(grid.clone(), v)
        };
        match *self {
            InitialData::ExactSoliton { c, shift } if m == 2 => {
                Ok(Field::from_fn(grid.clone(), |x| bo_soliton_c(c, x - shift)))
            }
            InitialData::ExactSoliton { c, shift } => {
                let gs = need_gs()?;
                from_gs(&rescale(gs, c)?, 1.0, shift)
            }
            InitialData::Gaussian { a, p } => Ok(Field::from_fn(grid.clone(), |x| a * (-x.abs().powf(p)).exp())),
            InitialData::Rational { a, p } => Ok(Field::from_fn(grid.clone(), |x| a / (1.0 + x.abs().powf(p)))),
            InitialData::InvSqrt { a } => Ok(Field::from_fn(grid.clone(), |x| a / (1.0 + x * x).sqrt())),
            InitialData::ScaledGroundState { a } => {
                let gs = need_gs()?;
                if gs.grid().same_as(grid) {
                    Ok(gs.profile.scaled(a))
                } else {
                    from_gs(&gs.profile, a, 0.0)
                }
            }
            InitialData::Zero => Ok(Field::zeros(grid.clone())),
        }
    }
}

impl fmt::Display for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialData::ExactSoliton { c, shift } => write!(f, "exact_soliton({c}, {shift})"),
            InitialData::Gaussian { a, p } => write!(f, "gaussian({a}, {p})"),
            InitialData::Rational { a, p } => write!(f, "rational({a}, {p})"),
            InitialData::InvSqrt { a } => write!(f, "inv_sqrt({a})"),
            InitialData::ScaledGroundState { a } => write!(f, "scaled_ground_state({a})"),
            InitialData::Zero => f.write_str("zero"),
        }
    }
}

impl FromStr for InitialData {
    type Err = Error;

    /// Parses `name(arg, ...)`, e.g. `gaussian(8, 2)` or `zero`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("unrecognized initial data {s:?}"));
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            None => (s, ""),
            _ => return Err(bad()),
        };
        let args: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        Ok(match (name.trim(), args.as_slice()) {
            ("exact_soliton", [c, shift]) => InitialData::ExactSoliton { c: *c, shift: *shift },
            ("exact_soliton", [c]) => InitialData::ExactSoliton { c: *c, shift: 0.0 },
            ("gaussian", [a, p]) => InitialData::Gaussian { a: *a, p: *p },
            ("gaussian", [a]) => InitialData::Gaussian { a: *a, p: 2.0 },
            ("rational", [a, p]) => InitialData::Rational { a: *a, p: *p },
            ("inv_sqrt", [a]) => InitialData::InvSqrt { a: *a },
            ("scaled_ground_state", [a]) => InitialData::ScaledGroundState { a: *a },
            ("zero", []) => InitialData::Zero,
            _ => return Err(bad()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        for s in [
            "gaussian(8, 2)",
            "rational(1, 4)",
            "inv_sqrt(0.8)",
            "exact_soliton(1, -25)",
            "scaled_ground_state(1.05)",
            "zero",
        ] {
            let d: InitialData = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        assert!("gaussian".parse::<InitialData>().is_err());
        assert!("gaussian(1,2,3)".parse::<InitialData>().is_err());
        assert!("blob(1)".parse::<InitialData>().is_err());
    }

    #[test]
    fn bo_soliton_needs_no_ground_state() {
        let grid = Grid::fourier(64, 10.0).unwrap();
        let f = InitialData::ExactSoliton { c: 1.0, shift: -2.0 }
            .sample(&grid, 2, None)
            .unwrap();
        assert_eq!(f.values()[64 - 13], bo_soliton_c(1.0, grid.nodes()[64 - 13] + 2.0));
        assert!(InitialData::ScaledGroundState { a: 1.0 }
            .sample(&grid, 2, None)
            .is_err());
    }

    #[test]
    fn ground_state_is_interpolated_across_grids() {
        let r = Grid::rational(512, 5.0).unwrap();
        let gs = GroundState::from_profile(2, Field::from_fn(r, |x| 4.0 / (1.0 + x * x)), 0, 0.0);
        let f = Grid::fourier(256, 20.0).unwrap();
        let u = InitialData::ScaledGroundState { a: 0.5 }
            .sample(&f, 2, Some(&gs))
            .unwrap();
        for (x, v) in f.nodes().iter().zip(u.values()) {
            assert!((v - 2.0 / (1.0 + x * x)).abs() < 1e-12);
        }
    }
}
