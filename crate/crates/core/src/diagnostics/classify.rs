use std::fmt;

use super::fit::soliton_fit;
use super::series::DiagnosticSample;
use crate::evolution::{EvolutionRun, HaltReason};
use crate::field::Field;

/// Thresholds for [`classify`]. The defaults are working choices; the
/// qualitative categories themselves have no sharper definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    /// Plateau test `|c(t_end) - c(t_end/2)| <= plateau * c(t_end)`.
    pub plateau: f64,
    /// Fit residual limit as a fraction of the final amplitude.
    pub residual: f64,
    pub fit_window: f64,
    /// Number of trailing samples that must grow for a stop to count as blow-up.
    pub blowup_window: usize,
    pub min_samples: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            plateau: 0.02,
            residual: 0.05,
            fit_window: 10.0,
            blowup_window: 3,
            min_samples: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    SolitonResolution,
    GlobalDecay,
    BlowUp,
    Inconclusive,
}

impl fmt::Display for OutcomeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutcomeKind::SolitonResolution => "SolitonResolution",
            OutcomeKind::GlobalDecay => "GlobalDecay",
            OutcomeKind::BlowUp => "BlowUp",
            OutcomeKind::Inconclusive => "Inconclusive",
        })
    }
}

/// Values the decision was based on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    pub halt: HaltReason,
    pub samples: usize,
    pub t_end: f64,
    pub c_end: f64,
    pub c_half: f64,
    pub amplitude_end: f64,
    pub growing: bool,
    pub decreasing: bool,
    pub fit_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub evidence: Evidence,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

impl fmt::Display for Outcome {
    /// `kind,key=value,...`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = &self.evidence;
        write!(
            f,
            "{},halt={},samples={},t_end={:.16e},c_end={:.16e},c_half={:.16e},amplitude_end={:.16e},growing={},decreasing={},fit_residual={}",
            self.kind,
            e.halt,
            e.samples,
            e.t_end,
            e.c_end,
            e.c_half,
            e.amplitude_end,
            e.growing,
            e.decreasing,
            opt(e.fit_residual)
        )
    }
}

/// Classifies a finished run from its series, halt reason and final field.
pub fn classify(run: &EvolutionRun, config: &ClassifyConfig) -> Outcome {
    classify_series(&run.series, run.halt, run.m, Some(&run.final_field), config)
}

/// Same decision from stored artifacts; `final_field` is needed only for
/// the `m = 2` soliton fit.
pub fn classify_series(
    series: &[DiagnosticSample],
    halt: HaltReason,
    m: u32,
    final_field: Option<&Field>,
    config: &ClassifyConfig,
) -> Outcome {
    let n = series.len();
    let last = series.last();
    let c_end = last.map_or(0.0, |s| s.c);
    let t_end = last.map_or(0.0, |s| s.t);
    let amplitude_end = last.map_or(0.0, |s| s.linf);
    let half = series.iter().position(|s| s.t >= 0.5 * t_end).unwrap_or(0);
    let c_half = series.get(half).map_or(0.0, |s| s.c);

    let w = config.blowup_window.max(2).min(n);
    let growing = n >= 2 && series[n - w..].windows(2).all(|p| p[1].linf > p[0].linf);
    let decreasing = n > half + 1 && series[half..].windows(2).all(|p| p[1].c < p[0].c);

    let mut evidence = Evidence {
        halt,
        samples: n,
        t_end,
        c_end,
        c_half,
        amplitude_end,
        growing,
        decreasing,
        fit_residual: None,
    };
    let kind = match halt {
        HaltReason::AmplitudeStop | HaltReason::DriftStop if growing => OutcomeKind::BlowUp,
        HaltReason::Completed if n >= config.min_samples => {
            let plateau = (c_end - c_half).abs() <= config.plateau * c_end.abs();
            if m == 2 && plateau {
                evidence.fit_residual = final_field
                    .and_then(|f| soliton_fit(f, config.fit_window, false).ok())
                    .map(|fit| fit.residual_sup);
            }
            match evidence.fit_residual {
                Some(r) if r <= config.residual * amplitude_end => OutcomeKind::SolitonResolution,
                _ if decreasing => OutcomeKind::GlobalDecay,
                _ => OutcomeKind::Inconclusive,
            }
        }
        _ => OutcomeKind::Inconclusive,
    };
    Outcome { kind, evidence }
}
