use crate::error::{Error, Result};

fn axpy(u: &[f64], s: f64, k: &[f64]) -> Vec<f64> {
    u.iter().zip(k).map(|(a, b)| a + s * b).collect()
}

fn check(v: &[f64], t: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

/// Classical four-stage Runge-Kutta step `u + dt (k1 + 2k2 + 2k3 + k4) / 6`.
///
/// `t` is only used to label a [`Error::NonFinite`] failure.
pub fn rk4_step<F>(u: &[f64], t: f64, dt: f64, mut rhs: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let k1 = rhs(u);
    check(&k1, t)?;
    let k2 = rhs(&axpy(u, 0.5 * dt, &k1));
    check(&k2, t)?;
    let k3 = rhs(&axpy(u, 0.5 * dt, &k2));
    check(&k3, t)?;
    let k4 = rhs(&axpy(u, dt, &k3));
    check(&k4, t)?;
    let out: Vec<f64> = (0..u.len())
        .map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect();
    check(&out, t + dt)?;
    Ok(out)
}
