use super::peak::peak_locate;
use crate::error::{Error, Result};
use crate::field::{Field, Grid};

/// `Q_c(x) = 4c / (1 + c² x²)`, the BO soliton of speed `c`.
pub fn bo_soliton_c(c: f64, x: f64) -> f64 {
    4.0 * c / (1.0 + c * c * x * x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolitonFit {
    pub c_fit: f64,
    pub shift: f64,
    pub residual_sup: f64,
    pub window_halfwidth: f64,
}

fn extent(grid: &Grid) -> f64 {
    match grid {
        Grid::Fourier(g) => g.half_length(),
        Grid::Rational(_) => grid.nodes().iter().fold(0.0, |m, x| m.max(x.abs())),
    }
}

fn residual(field: &Field, window: f64, c: f64, shift: f64) -> f64 {
    field
        .nodes()
        .iter()
        .zip(field.values())
        .filter(|(x, _)| (*x - shift).abs() <= window)
        .fold(0.0, |m, (x, u)| m.max((u - bo_soliton_c(c, x - shift)).abs()))
}

/// Fits `Q_c(x - C)` to the dominant peak: `c = amplitude/4`, `C = x_c`.
///
/// With `refine`, a compass search over `(c, C)` seeded at those values
/// lowers the windowed sup residual further.
pub fn soliton_fit(field: &Field, window_halfwidth: f64, refine: bool) -> Result<SolitonFit> {
    let ext = extent(field.grid());
    if !(window_halfwidth > 0.0) || window_halfwidth > ext {
        return Err(Error::WindowOutOfRange {
            window: window_halfwidth,
            extent: ext,
        });
    }
    let peak = peak_locate(field)?;
    let mut c = peak.amplitude / 4.0;
    let mut shift = peak.x;
    let mut best = residual(field, window_halfwidth, c, shift);
    if refine && c > 0.0 {
        let mut step_c = 0.01 * c;
        let mut step_x = 0.01 / c;
        for _ in 0..400 {
            if step_c < 1e-12 * c && step_x < 1e-12 {
                break;
            }
            let mut improved = false;
            for (dc, dx) in [(step_c, 0.0), (-step_c, 0.0), (0.0, step_x), (0.0, -step_x)] {
                if c + dc <= 0.0 {
                    continue;
                }
                let r = residual(field, window_halfwidth, c + dc, shift + dx);
                if r < best {
                    best = r;
                    c += dc;
                    shift += dx;
                    improved = true;
                    break;
                }
            }
            if !improved {
                step_c *= 0.5;
                step_x *= 0.5;
            }
        }
    }
    Ok(SolitonFit {
        c_fit: c,
        shift,
        residual_sup: best,
        window_halfwidth,
    })
}
