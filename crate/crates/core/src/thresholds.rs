//! Threshold amplitudes for data `u_0 = A v`.
//!
//! With `M_v = M[v]`, `D_v = D[v]`, `P_v = ‖v‖_{m+1}^{m+1} / (m(m+1))` and
//! `θ = (1/2 - s)/s`, `s = 1/2 - 1/(m-1)`:
//!
//! * `A_0^±` bound the amplitudes where `M[Av]^θ E[Av] < M[Q]^θ E[Q]` fails;
//! * `A_1` solves `M[Av]^θ D[Av] = M[Q]^θ D[Q]`;
//! * `A_E` solves `E[Av] = 0`;
//! * `A_T` is the empirical blow-up threshold found by bisection over runs.

use std::fmt;
use std::str::FromStr;
use std::thread;

use crate::diagnostics::{classify, lp_power, mass, seminorm, ClassifyConfig, Outcome, OutcomeKind};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionConfig};
use crate::field::{Field, Grid};
use crate::ground_state::{gn_constant, GroundState};
use crate::spectral::{edge_decay_ratio, EDGE_DECAY_LIMIT};

/// The five reference profiles `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileFamily {
    /// `e^{-x⁴}`
    ExpQuartic,
    /// `e^{-x²}`
    ExpQuadratic,
    /// `1/(1+x⁴)`
    RationalQuartic,
    /// `1/(1+x²)`
    RationalQuadratic,
    /// `1/√(1+x²)`
    InvSqrt,
}

impl ProfileFamily {
    pub const ALL: [ProfileFamily; 5] = [
        ProfileFamily::ExpQuartic,
        ProfileFamily::ExpQuadratic,
        ProfileFamily::RationalQuartic,
        ProfileFamily::RationalQuadratic,
        ProfileFamily::InvSqrt,
    ];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            ProfileFamily::ExpQuartic => (-x.powi(4)).exp(),
            ProfileFamily::ExpQuadratic => (-x * x).exp(),
            ProfileFamily::RationalQuartic => 1.0 / (1.0 + x.powi(4)),
            ProfileFamily::RationalQuadratic => 1.0 / (1.0 + x * x),
            ProfileFamily::InvSqrt => 1.0 / (1.0 + x * x).sqrt(),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ProfileFamily::ExpQuartic => "exp_x4",
            ProfileFamily::ExpQuadratic => "exp_x2",
            ProfileFamily::RationalQuartic => "rat_x4",
            ProfileFamily::RationalQuadratic => "rat_x2",
            ProfileFamily::InvSqrt => "inv_sqrt",
        }
    }

    pub fn sample(self, grid: &Grid) -> Field {
        Field::from_fn(grid.clone(), |x| self.eval(x))
    }
}

impl fmt::Display for ProfileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ProfileFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProfileFamily::ALL
            .into_iter()
            .find(|p| p.tag() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown profile {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileFunctionals {
    pub m: u32,
    pub mass: f64,
    pub seminorm: f64,
    pub potential: f64,
    /// Relative change of `M_v` under grid refinement, when checked.
    pub refinement_change: Option<f64>,
}

/// `M_v`, `D_v`, `P_v` by quadrature on the field's grid.
pub fn profile_functionals(v: &Field, m: u32) -> ProfileFunctionals {
    let edge = edge_decay_ratio(v.values());
    if edge > EDGE_DECAY_LIMIT {
        log::warn!("profile has not decayed at the grid edge (ratio {edge:e})");
    }
    let mf = m as f64;
    ProfileFunctionals {
        m,
        mass: mass(v),
        seminorm: seminorm(v),
        potential: lp_power(v, m) / (mf * (mf + 1.0)),
        refinement_change: None,
    }
}

/// Functionals of a named profile on `grid`, cross-checked against a grid
/// with twice as many nodes; fails if `M_v` moves by more than 1%.
pub fn profile_functionals_refined(family: ProfileFamily, m: u32, grid: &Grid) -> Result<ProfileFunctionals> {
    let fine_grid = match grid {
        Grid::Fourier(g) => Grid::fourier(2 * g.n(), g.half_length())?,
        Grid::Rational(g) => Grid::rational(2 * g.n(), g.map())?,
    };
    let (coarse, fine) = thread::scope(|s| {
        let h = s.spawn(|| profile_functionals(&family.sample(&fine_grid), m));
        let coarse = profile_functionals(&family.sample(grid), m);
        (coarse, h.join().expect("refinement worker panicked"))
    });
    let change = ((fine.mass - coarse.mass) / fine.mass).abs();
    if !(change <= 0.01) {
        return Err(Error::NonIntegrableProfile { change });
    }
    if change > 1e-8 {
        log::warn!("{family}: M_v changes by {change:e} under refinement");
    }
    Ok(ProfileFunctionals {
        refinement_change: Some(change),
        ..fine
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConstants {
    pub m: u32,
    /// Critical Sobolev index `1/2 - 1/(m-1)`.
    pub s: f64,
    pub theta_exp: f64,
    /// `M[Q]^θ E[Q]`
    pub alpha: f64,
    /// `M[Q]^θ D[Q]`
    pub beta: f64,
}

impl ThresholdConstants {
    /// Needs an `L²`-supercritical power, `m > 3`.
    pub fn from_ground_state(gs: &GroundState) -> Result<Self> {
        if gs.m <= 3 {
            return Err(Error::InvalidConfig(format!(
                "threshold constants need m > 3, got {}",
                gs.m
            )));
        }
        let s = 0.5 - 1.0 / (gs.m as f64 - 1.0);
        let theta = (0.5 - s) / s;
        let mq = gs.mass.powf(theta);
        Ok(Self {
            m: gs.m,
            s,
            theta_exp: theta,
            alpha: mq * gs.energy,
            beta: mq * gs.seminorm,
        })
    }
}

/// `(A² M_v)^θ E[A v] - α`; negative exactly where the mass-energy bound holds.
pub fn mass_energy_gap(consts: &ThresholdConstants, f: &ProfileFunctionals, a: f64) -> f64 {
    let mf = consts.m as f64;
    (a * a * f.mass).powf(consts.theta_exp) * (0.5 * a * a * f.seminorm - a.powf(mf + 1.0) * f.potential) - consts.alpha
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The two positive roots `A_0^- < A_0^+` of the mass-energy bound.
///
/// `m = 4`: with `B = A³` the bound is the cubic
/// `M_v² (D_v B²/2 - P_v B³) = α`, bracketed around its maximum
/// `B* = D_v/(3P_v)`. `m = 5`: with `B = A⁴` it is the quadratic
/// `M_v (D_v B/2 - P_v B²) = α`.
pub fn solve_a0(consts: &ThresholdConstants, f: &ProfileFunctionals) -> Result<(f64, f64)> {
    let (d, p) = (f.seminorm, f.potential);
    match consts.m {
        4 => {
            let w = f.mass.powf(consts.theta_exp);
            let cubic = |b: f64| w * (0.5 * d * b * b - p * b * b * b) - consts.alpha;
            let b_star = d / (3.0 * p);
            let b_max = d / (2.0 * p);
            let peak = cubic(b_star);
            if !(peak > 0.0) {
                return Err(Error::NoRealRoots { discriminant: peak });
            }
            let lo = bisect(0.0, b_star, cubic);
            let hi = bisect(b_star, b_max, cubic);
            Ok((lo.cbrt(), hi.cbrt()))
        }
        5 => {
            let w = f.mass.powf(consts.theta_exp);
            let (qa, qb, qc) = (w * p, 0.5 * w * d, consts.alpha);
            let disc = qb * qb - 4.0 * qa * qc;
            if !(disc > 0.0) {
                return Err(Error::NoRealRoots { discriminant: disc });
            }
            let root = disc.sqrt();
            // Stable pairing of the two roots of qa B² - qb B + qc = 0.
            let big = (qb + root) / (2.0 * qa);
            let small = qc / (qa * big);
            Ok((small.powf(0.25), big.powf(0.25)))
        }
        m => Err(Error::InvalidConfig(format!(
            "closed-form A_0 is defined for m = 4, 5, got {m}"
        ))),
    }
}

/// `A_1 = (β / (M_v^θ D_v))^{1/(2θ+2)}`
pub fn solve_a1(consts: &ThresholdConstants, f: &ProfileFunctionals) -> f64 {
    let th = consts.theta_exp;
    (consts.beta / (f.mass.powf(th) * f.seminorm)).powf(1.0 / (2.0 * th + 2.0))
}

/// `A_E = (D_v / (2 P_v))^{1/(m-1)}`, the zero of `E[A v]`.
pub fn solve_ae(f: &ProfileFunctionals, m: u32) -> f64 {
    (f.seminorm / (2.0 * f.potential)).powf(1.0 / (m as f64 - 1.0))
}

/// `√(M[Q] / M_v)`, where `M[A v] = M[Q]`.
pub fn solve_a_mass(gs: &GroundState, f: &ProfileFunctionals) -> f64 {
    (gs.mass / f.mass).sqrt()
}

/// `‖v‖_{m+1}^{m+1} / (C_m D[v]^{(m-1)/2} ‖v‖²)`; at most 1 by the
/// Gagliardo-Nirenberg inequality, with equality at `Q`.
pub fn gn_ratio(v: &Field, gs: &GroundState) -> f64 {
    let m = gs.m;
    let lhs = lp_power(v, m);
    let rhs = gn_constant(gs) * seminorm(v).powf(0.5 * (m as f64 - 1.0)) * mass(v);
    lhs / rhs
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub profile: ProfileFamily,
    pub m: u32,
    pub a0_minus: f64,
    pub a0_plus: f64,
    pub a1: f64,
    pub ae: f64,
    pub at: Option<f64>,
    /// `A_0^- < A_1 < A_0^+ < A_E`; recorded, not enforced.
    pub ordering_check: bool,
}

pub const THRESHOLD_HEADER: &str = "profile,m,A0_minus,A0_plus,A1,AE,AT";

impl ThresholdReport {
    pub fn new(profile: ProfileFamily, consts: &ThresholdConstants, f: &ProfileFunctionals) -> Result<Self> {
        let (a0_minus, a0_plus) = solve_a0(consts, f)?;
        let a1 = solve_a1(consts, f);
        let ae = solve_ae(f, consts.m);
        Ok(Self {
            profile,
            m: consts.m,
            a0_minus,
            a0_plus,
            a1,
            ae,
            at: None,
            ordering_check: a0_minus < a1 && a1 < a0_plus && a0_plus < ae,
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.profile,
            self.m,
            self.a0_minus,
            self.a0_plus,
            self.a1,
            self.ae,
            self.at.map(|a| format!("{a:.16e}")).unwrap_or_default()
        )
    }
}

/// Evolution settings shared by all bisection probes.
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    pub grid: Grid,
    pub evolution: EvolutionConfig,
    pub classify: ClassifyConfig,
}

/// Evolves `A v` and classifies the run.
pub fn probe(family: ProfileFamily, amplitude: f64, config: &ProbeConfig) -> Result<Outcome> {
    let u0 = family.sample(&config.grid).scaled(amplitude);
    let run = evolve(&u0, &config.evolution)?;
    let out = classify(&run, &config.classify);
    log::info!("probe {family} A = {amplitude:.4}: {}", out.kind);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bisection {
    pub a_t: f64,
    pub lo: f64,
    pub hi: f64,
    /// Half the final bracket, widened to cover inconclusive probes.
    pub uncertainty: f64,
    pub probes: Vec<(f64, OutcomeKind)>,
}

/// Bisects `[lo, hi]` on the blow-up outcome until the bracket is at most
/// `width` wide. The two endpoint probes run in parallel.
///
/// Inconclusive probes are counted as non-blow-up and widen the reported
/// uncertainty.
pub fn bisect_at<F>(bracket: (f64, f64), width: f64, probe: F) -> Result<Bisection>
where
    F: Fn(f64) -> Result<OutcomeKind> + Sync,
{
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(width > 0.0) {
        return Err(Error::BracketInvalid { lo, hi });
    }
    let (k_lo, k_hi) = thread::scope(|s| {
        let h = s.spawn(|| probe(hi));
        let k_lo = probe(lo);
        (k_lo, h.join().expect("probe worker panicked"))
    });
    let (k_lo, k_hi) = (k_lo?, k_hi?);
    let mut probes = vec![(lo, k_lo), (hi, k_hi)];
    if k_lo == OutcomeKind::BlowUp || k_hi != OutcomeKind::BlowUp {
        return Err(Error::BracketInvalid { lo, hi });
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let k = probe(mid)?;
        probes.push((mid, k));
        if k == OutcomeKind::BlowUp {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let a_t = 0.5 * (lo + hi);
    let uncertainty = probes
        .iter()
        .filter(|(_, k)| *k == OutcomeKind::Inconclusive)
        .fold(0.5 * (hi - lo), |u, (a, _)| u.max((a - a_t).abs()));
    Ok(Bisection {
        a_t,
        lo,
        hi,
        uncertainty,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn exact(family: ProfileFamily, m: u32) -> Option<ProfileFunctionals> {
        let (mass, seminorm) = match family {
            ProfileFamily::ExpQuadratic => ((PI / 2.0).sqrt(), 1.0),
            ProfileFamily::RationalQuadratic => (PI / 2.0, PI / 4.0),
            ProfileFamily::InvSqrt => (PI, 2.0 / PI),
            _ => return None,
        };
        Some(ProfileFunctionals {
            m,
            mass,
            seminorm,
            potential: 1.0,
            refinement_change: None,
        })
    }

    #[test]
    fn functionals_match_closed_forms() {
        let grid = Grid::rational(4096, 20.0).unwrap();
        for family in [
            ProfileFamily::ExpQuadratic,
            ProfileFamily::RationalQuadratic,
            ProfileFamily::InvSqrt,
        ] {
            let f = profile_functionals(&family.sample(&grid), 4);
            let e = exact(family, 4).unwrap();
            assert!((f.mass - e.mass).abs() < 1e-8, "{family} M");
            assert!(
                (f.seminorm - e.seminorm).abs() < 1e-6,
                "{family} D {}",
                f.seminorm - e.seminorm
            );
        }
    }

    #[test]
    fn profile_tags_round_trip() {
        for p in ProfileFamily::ALL {
            assert_eq!(p.tag().parse::<ProfileFamily>().unwrap(), p);
        }
    }

    fn consts(m: u32) -> ThresholdConstants {
        // Synthetic ground-state numbers; only the algebra is under test.
        let gs_mass: f64 = 3.0;
        let s = 0.5 - 1.0 / (m as f64 - 1.0);
        let theta = (0.5 - s) / s;
        ThresholdConstants {
            m,
            s,
            theta_exp: theta,
            alpha: gs_mass.powf(theta) * 0.8,
            beta: gs_mass.powf(theta) * 5.0,
        }
    }

    fn functionals(m: u32) -> ProfileFunctionals {
        ProfileFunctionals {
            m,
            mass: 1.2,
            seminorm: 1.0,
            potential: 0.01,
            refinement_change: None,
        }
    }

    #[test]
    fn roots_zero_the_bound() {
        for m in [4, 5] {
            let c = consts(m);
            let f = functionals(m);
            let (lo, hi) = solve_a0(&c, &f).unwrap();
            assert!(lo < hi);
            for a in [lo, hi] {
                assert!(mass_energy_gap(&c, &f, a).abs() <= 1e-9 * c.alpha, "m = {m}");
            }
            assert!(mass_energy_gap(&c, &f, 0.99 * lo) < 0.0);
            assert!(mass_energy_gap(&c, &f, 0.5 * (lo + hi)) > 0.0);
            assert!(mass_energy_gap(&c, &f, 1.01 * hi) < 0.0);
        }
    }

    #[test]
    fn spread_profiles_have_no_roots() {
        let c = consts(4);
        let f = ProfileFunctionals {
            potential: 10.0,
            ..functionals(4)
        };
        assert!(matches!(solve_a0(&c, &f), Err(Error::NoRealRoots { .. })));
        let c = consts(5);
        assert!(matches!(solve_a0(&c, &f), Err(Error::NoRealRoots { .. })));
    }

    #[test]
    fn a1_homogeneity_and_ae_residual() {
        for m in [4, 5] {
            let c = consts(m);
            let f = functionals(m);
            let doubled = ThresholdConstants {
                beta: 2.0 * c.beta,
                ..c
            };
            let ratio = solve_a1(&doubled, &f) / solve_a1(&c, &f);
            assert!((ratio - 2f64.powf(1.0 / (2.0 * c.theta_exp + 2.0))).abs() < 1e-14);
            let ae = solve_ae(&f, m);
            let e = 0.5 * ae * ae * f.seminorm - ae.powi(m as i32 + 1) * f.potential;
            assert!(e.abs() < 1e-12);
        }
    }

    #[test]
    fn bisection_on_a_synthetic_switch() {
        let switch = |a: f64| {
            Ok(if a >= 2.553 {
                OutcomeKind::BlowUp
            } else {
                OutcomeKind::GlobalDecay
            })
        };
        let b = bisect_at((2.4, 2.7), 0.01, switch).unwrap();
        assert!(b.hi - b.lo <= 0.01);
        assert!((b.a_t - 2.553).abs() <= 0.005);
        assert!(matches!(
            bisect_at((2.6, 2.7), 0.01, switch),
            Err(Error::BracketInvalid { .. })
        ));
        let flaky = |a: f64| {
            Ok(if a >= 2.553 {
                OutcomeKind::BlowUp
            } else if a > 2.45 {
                OutcomeKind::Inconclusive
            } else {
                OutcomeKind::GlobalDecay
            })
        };
        let b = bisect_at((2.3, 2.7), 0.01, flaky).unwrap();
        assert!(b.uncertainty > 0.05);
    }

    #[test]
    fn bisection_is_deterministic() {
        let switch = |a: f64| {
            Ok(if a > 1.731 {
                OutcomeKind::BlowUp
            } else {
                OutcomeKind::Inconclusive
            })
        };
        assert_eq!(bisect_at((1.6, 1.9), 0.01, switch), bisect_at((1.6, 1.9), 0.01, switch));
    }
}
