use std::io::{Read, Write};

use super::functionals::{energy, l1_integral, mass};
use super::peak::peak_locate;
use crate::error::{Error, Result};
use crate::field::Field;

pub const SERIES_HEADER: &str = "t,mass,energy,linf,xc,c,drift_mass,drift_energy,b";

/// One row of the diagnostic time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticSample {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    /// `∫ u`; not part of the CSV record, so `None` after a read.
    pub l1_integral: Option<f64>,
    pub linf: f64,
    pub x_c: f64,
    /// `linf / 4` for `m = 2`, the raw amplitude otherwise.
    pub c: f64,
    pub drift_mass: f64,
    pub drift_energy: f64,
    /// Frame speed, comoving runs only.
    pub b: Option<f64>,
}

/// Running extrema of mass and energy.
#[derive(Debug, Clone, Copy, Default)]
pub struct DriftTracker {
    extrema: Option<[f64; 4]>,
}

impl DriftTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds in a sample and returns the current `(mass, energy)` drift.
    pub fn update(&mut self, mass: f64, energy: f64) -> (f64, f64) {
        let e = self.extrema.get_or_insert([mass, mass, energy, energy]);
        e[0] = e[0].min(mass);
        e[1] = e[1].max(mass);
        e[2] = e[2].min(energy);
        e[3] = e[3].max(energy);
        (e[1] - e[0], e[3] - e[2])
    }
}

impl DiagnosticSample {
    /// Measures `field` at time `t`. `x_c` defaults to the refined peak
    /// position (the first grid maximum if the peak is ambiguous).
    pub fn measure(
        field: &Field,
        m: u32,
        t: f64,
        tracker: &mut DriftTracker,
        x_c: Option<f64>,
        b: Option<f64>,
    ) -> Self {
        let mass = mass(field);
        let energy = energy(field, m);
        let linf = field.sup_norm();
        let (x_peak, amplitude) = match peak_locate(field) {
            Ok(p) => (p.x, p.amplitude),
            Err(_) if linf == 0.0 => (0.0, 0.0),
            Err(Error::AmbiguousPeak { first, .. }) => (field.nodes()[first], field.values()[first]),
            Err(_) => (f64::NAN, linf),
        };
        let height = amplitude.max(linf);
        let (drift_mass, drift_energy) = tracker.update(mass, energy);
        DiagnosticSample {
            t,
            mass,
            energy,
            l1_integral: Some(l1_integral(field)),
            linf,
            x_c: x_c.unwrap_or(x_peak),
            c: if m == 2 { height / 4.0 } else { height },
            drift_mass,
            drift_energy,
            b,
        }
    }
}

/// `(max - min)` of mass and energy over the series.
pub fn drift(series: &[DiagnosticSample]) -> (f64, f64) {
    let mut tracker = DriftTracker::new();
    let mut out = (0.0, 0.0);
    for s in series {
        out = tracker.update(s.mass, s.energy);
    }
    out
}

pub fn write_series_csv<W: Write>(mut out: W, series: &[DiagnosticSample]) -> Result<()> {
    writeln!(out, "{SERIES_HEADER}")?;
    for s in series {
        write!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},",
            s.t, s.mass, s.energy, s.linf, s.x_c, s.c, s.drift_mass, s.drift_energy
        )?;
        match s.b {
            Some(b) => writeln!(out, "{b:.16e}")?,
            None => writeln!(out)?,
        }
    }
    Ok(())
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad number {field:?}")))
}

/// Reads a series written by [`write_series_csv`]. The file must end with a
/// newline so a truncated last row is detected.
pub fn read_series_csv<R: Read>(mut input: R) -> Result<Vec<DiagnosticSample>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    if !text.ends_with('\n') {
        return Err(Error::Parse("series ends mid-line".into()));
    }
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SERIES_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected header {other:?}"))),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let lineno = i + 2;
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 9 {
                return Err(Error::Parse(format!(
                    "line {lineno}: expected 9 columns, got {}",
                    cols.len()
                )));
            }
            let v = |k: usize| parse_f64(cols[k], lineno);
            Ok(DiagnosticSample {
                t: v(0)?,
                mass: v(1)?,
                energy: v(2)?,
                l1_integral: None,
                linf: v(3)?,
                x_c: v(4)?,
                c: v(5)?,
                drift_mass: v(6)?,
                drift_energy: v(7)?,
                b: if cols[8].trim().is_empty() { None } else { Some(v(8)?) },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;

    fn sample(t: f64, mass: f64, energy: f64) -> DiagnosticSample {
        DiagnosticSample {
            t,
            mass,
            energy,
            l1_integral: None,
            linf: 1.0,
            x_c: 0.0,
            c: 0.25,
            drift_mass: 0.0,
            drift_energy: 0.0,
            b: None,
        }
    }

    #[test]
    fn drift_is_running_range() {
        let s: Vec<_> = [(1.0, 2.0), (1.5, 1.0), (1.2, 3.0)]
            .iter()
            .enumerate()
            .map(|(i, &(m, e))| sample(i as f64, m, e))
            .collect();
        assert_eq!(drift(&s), (0.5, 2.0));
        let flat: Vec<_> = (0..5).map(|i| sample(i as f64, 3.0, -1.0)).collect();
        assert_eq!(drift(&flat), (0.0, 0.0));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let grid = Grid::rational(256, 5.0).unwrap();
        let f = Field::from_fn(grid, |x| 4.0 / (1.0 + x * x));
        let mut tr = DriftTracker::new();
        let mut s = vec![DiagnosticSample::measure(&f, 2, 0.0, &mut tr, None, None)];
        s.push(DiagnosticSample::measure(
            &f.scaled(1.0 + 1e-9),
            2,
            0.1,
            &mut tr,
            None,
            Some(1.0 / 3.0),
        ));
        let mut buf = Vec::new();
        write_series_csv(&mut buf, &s).unwrap();
        let back = read_series_csv(buf.as_slice()).unwrap();
        for (a, b) in s.iter().zip(&back) {
            assert_eq!(
                DiagnosticSample {
                    l1_integral: None,
                    ..*a
                },
                *b
            );
        }
        let mut again = Vec::new();
        write_series_csv(&mut again, &back).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn malformed_series_rejected() {
        assert!(read_series_csv("t,mass\n1,2\n".as_bytes()).is_err());
        let truncated = format!("{SERIES_HEADER}\n0,1,2,3,4,5,6,7,\n1,2,3");
        assert!(read_series_csv(truncated.as_bytes()).is_err());
        let bad = format!("{SERIES_HEADER}\n0,1,x,3,4,5,6,7,\n");
        assert!(read_series_csv(bad.as_bytes()).is_err());
    }

    #[test]
    fn zero_field_samples_are_zero() {
        let grid = Grid::fourier(64, 10.0).unwrap();
        let mut tr = DriftTracker::new();
        let s = DiagnosticSample::measure(&Field::zeros(grid), 2, 0.0, &mut tr, None, None);
        assert_eq!((s.mass, s.energy, s.linf, s.x_c, s.c), (0.0, 0.0, 0.0, 0.0, 0.0));
    }
}
