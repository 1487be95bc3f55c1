use crate::error::{Error, Result};
use crate::field::{Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub x: f64,
    pub amplitude: f64,
    /// Grid argmax.
    pub index: usize,
}

/// Vertex offset (in steps) and height of the parabola through three
/// equally spaced samples.
fn parabola_vertex(left: f64, mid: f64, right: f64) -> (f64, f64) {
    let curv = left - 2.0 * mid + right;
    if curv >= 0.0 {
        return (0.0, mid);
    }
    let delta = 0.5 * (left - right) / curv;
    (delta, mid - 0.25 * (left - right) * delta)
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Peak position and height from the grid maximum and a three-point parabola
/// (in `x` on the Fourier grid, in `θ` on the rational grid).
pub fn peak_locate(field: &Field) -> Result<Peak> {
    let u = field.values();
    let len = u.len();
    let i = argmax(u);
    let top = u[i];
    let tol = 1e-12 * top.abs().max(1.0);
    let periodic = matches!(field.grid(), Grid::Fourier(_));
    let adjacent = |j: usize| {
        let d = i.abs_diff(j);
        d <= 1 || (periodic && d == len - 1)
    };
    if let Some(j) = (0..len).find(|&j| !adjacent(j) && (u[j] - top).abs() <= tol) {
        return Err(Error::AmbiguousPeak {
            first: i.min(j),
            second: i.max(j),
        });
    }
    match field.grid() {
        Grid::Fourier(g) => {
            let left = u[(i + len - 1) % len];
            let right = u[(i + 1) % len];
            let (delta, amplitude) = parabola_vertex(left, top, right);
            let l = g.half_length();
            let mut x = g.nodes()[i] + delta * g.spacing();
            if x >= l {
                x -= 2.0 * l;
            } else if x < -l {
                x += 2.0 * l;
            }
            Ok(Peak { x, amplitude, index: i })
        }
        Grid::Rational(g) => {
            if i == 0 || i + 1 == len {
                return Ok(Peak {
                    x: g.nodes()[i],
                    amplitude: top,
                    index: i,
                });
            }
            let (delta, amplitude) = parabola_vertex(u[i - 1], top, u[i + 1]);
            let theta = g.angles()[i] + delta * g.step();
            Ok(Peak {
                x: g.map() * (0.5 * theta).tan(),
                amplitude,
                index: i,
            })
        }
    }
}
