use gbo_core::diagnostics::{energy, mass};
use gbo_core::spectral::{
    fourier_analyze, fourier_apply_symbol, fourier_synthesize, FourierGrid, RationalGrid, SymbolKind,
};
use gbo_core::{Field, Grid};
use num_complex::Complex64;
use proptest::prelude::*;

fn max_abs(a: &[Complex64]) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Random coefficients of a real field on a Fourier grid: `a_{-n} = conj(a_n)`,
/// real zero and Nyquist modes, geometric decay.
fn hermitian_fourier(n: usize, raw: &[(f64, f64)], decay: f64) -> Vec<Complex64> {
    let mut a = vec![Complex64::new(0.0, 0.0); 2 * n];
    for k in 0..=n {
        let (re, im) = raw[k % raw.len()];
        let scale = decay.powi(k as i32);
        let z = if k == 0 || k == n {
            Complex64::new(re * scale, 0.0)
        } else {
            Complex64::new(re, im) * scale
        };
        // mode k sits at index n + k, mode -k at n - k
        if k < n {
            a[n + k] = z;
        }
        a[n - k] = z.conj();
    }
    a
}

/// Random coefficients of a real field in the rational basis: `a_{-n-1} = conj(a_n)`.
fn hermitian_rational(n: usize, raw: &[(f64, f64)], decay: f64, band: usize) -> Vec<Complex64> {
    let len = 2 * n;
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    for k in 0..band.min(n) {
        let (re, im) = raw[k % raw.len()];
        let z = Complex64::new(re, im) * decay.powi(k as i32);
        a[n + k] = z;
        a[len - 1 - (n + k)] = z.conj();
    }
    a
}

fn coeff_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fourier_round_trip(log_n in 3u32..10, raw in coeff_strategy(), decay in 0.5..1.0f64, half in 1.0..100.0f64) {
        let n = 1usize << log_n;
        let grid = FourierGrid::new(n, half).unwrap();
        let a = hermitian_fourier(n, &raw, decay);
        let back = grid.analyze(&grid.synthesize_real(&a));
        prop_assert!(max_diff(&a, &back) <= 1e-13 * max_abs(&a).max(1.0));
    }

    #[test]
    fn rational_round_trip(log_n in 3u32..10, raw in coeff_strategy(), decay in 0.5..1.0f64, map in 0.5..30.0f64) {
        let n = 1usize << log_n;
        let grid = RationalGrid::new(n, map).unwrap();
        let a = hermitian_rational(n, &raw, decay, n);
        let back = grid.analyze(&grid.synthesize_real(&a));
        prop_assert!(max_diff(&a, &back) <= 1e-13 * max_abs(&a).max(1.0));
    }

    #[test]
    fn fourier_parseval(log_n in 3u32..10, raw in coeff_strategy(), decay in 0.5..1.0f64) {
        let n = 1usize << log_n;
        let grid = FourierGrid::new(n, 7.0).unwrap();
        let a = hermitian_fourier(n, &raw, decay);
        let u = grid.synthesize_real(&a);
        let nodal: f64 = u.iter().map(|v| v * v).sum::<f64>() / (2 * n) as f64;
        let modal: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((nodal - modal).abs() <= 1e-12 * modal.max(1e-300));
    }

    #[test]
    fn half_derivative_squared_is_hilbert_derivative(log_n in 3u32..10, raw in coeff_strategy(), decay in 0.5..1.0f64) {
        let n = 1usize << log_n;
        let grid = Grid::fourier(n, 5.0).unwrap();
        let a = hermitian_fourier(n, &raw, decay);
        let u = Field::new(grid.clone(), grid.as_fourier().unwrap().synthesize_real(&a)).unwrap();
        let spec = fourier_analyze(&u).unwrap();
        let twice = fourier_apply_symbol(&fourier_apply_symbol(&spec, SymbolKind::HalfDeriv), SymbolKind::HalfDeriv);
        let hd = fourier_apply_symbol(&fourier_apply_symbol(&spec, SymbolKind::D1), SymbolKind::Hilbert);
        let (x, y) = (fourier_synthesize(&twice), fourier_synthesize(&hd));
        let scale = x.sup_norm().max(1.0);
        prop_assert!(x.sup_distance(&y) <= 1e-12 * scale);
    }

    #[test]
    fn hilbert_is_an_involution_up_to_sign(log_n in 3u32..10, raw in coeff_strategy(), decay in 0.5..1.0f64) {
        let n = 1usize << log_n;
        let fourier = FourierGrid::new(n, 3.0).unwrap();
        let a = hermitian_fourier(n, &raw, decay);
        let h = fourier.symbol(SymbolKind::Hilbert);
        for (i, z) in a.iter().enumerate() {
            prop_assert!((h[i] * h[i] * z + z).norm() <= 1e-15 * z.norm().max(1e-300));
        }
        let rational = RationalGrid::new(n, 2.0).unwrap();
        let b = hermitian_rational(n, &raw, decay, n);
        let hh = rational.hilbert(&rational.hilbert(&b));
        for (x, y) in hh.iter().zip(&b) {
            prop_assert!((x + y).norm() == 0.0);
        }
    }

    #[test]
    fn rational_second_derivative_is_first_derivative_twice(log_n in 3u32..10, raw in coeff_strategy(), decay in 0.5..1.0f64, map in 0.5..10.0f64) {
        let n = 1usize << log_n;
        let grid = RationalGrid::new(n, map).unwrap();
        let a = hermitian_rational(n, &raw, decay, n / 2);
        let d2 = grid.d2(&a);
        let d11 = grid.d1(&grid.d1(&a));
        prop_assert!(max_diff(&d2, &d11) <= 1e-10 * max_abs(&d2).max(1.0));
    }

    #[test]
    fn mass_and_energy_are_translation_invariant(shift in 1usize..255, a in 0.2..3.0f64, w in 0.5..3.0f64, m in 2u32..6) {
        let grid = Grid::fourier(128, 20.0).unwrap();
        let u = Field::from_fn(grid.clone(), |x| a * (-(x / w).powi(2)).exp() * (1.0 + 0.3 * x.sin()));
        let mut shifted = u.values().to_vec();
        shifted.rotate_right(shift);
        let v = Field::new(grid, shifted).unwrap();
        prop_assert!((mass(&u) - mass(&v)).abs() <= 1e-12 * mass(&u));
        let (eu, ev) = (energy(&u, m), energy(&v, m));
        prop_assert!((eu - ev).abs() <= 1e-12 * eu.abs().max(1.0));
    }
}

#[test]
fn lorentzian_fourier_coefficients_decay_inside_the_band() {
    let n = 1usize << 22;
    let grid = Grid::fourier(n, 20000.0 * std::f64::consts::PI).unwrap();
    let q = Field::from_fn(grid.clone(), |x| 4.0 / (1.0 + x * x));
    let a = grid.as_fourier().unwrap().analyze(q.values());
    // The transform of Q is 4π e^{-|k|}; the coefficients fall below 1e-10 by |k| ≈ 25.
    let k = grid.as_fourier().unwrap().wavenumbers();
    let first_small = (n..2 * n).find(|&i| a[i].norm() < 1e-10).unwrap();
    assert!(k[first_small] < 30.0, "k = {}", k[first_small]);
    assert!(k[first_small] < 0.2 * grid.as_fourier().unwrap().max_wavenumber());
    assert!(a[first_small..].iter().all(|z| z.norm() < 1e-10));
}

#[test]
fn gaussian_rational_coefficients_decay_inside_the_band() {
    let n = 4096;
    let grid = RationalGrid::new(n, 20.0).unwrap();
    let u: Vec<f64> = grid.nodes().iter().map(|x| (-x * x).exp()).collect();
    let a = grid.analyze(&u);
    let tail = (n + n / 2..2 * n)
        .chain(0..n / 2)
        .fold(0.0f64, |m, i| m.max(a[i].norm()));
    assert!(tail < 1e-12, "{tail:e}");
}
