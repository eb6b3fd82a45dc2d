#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotor_gpe::oracle::random_coherent_mixture;
use rotor_gpe::{ComplexField, GridSpec};

pub fn noise(grid: GridSpec, seed: u64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexField::from_vec(grid, data).unwrap()
}

/// Random spectrum supported on `|k_i| <= frac * k_nyquist`.
pub fn band_limited(grid: GridSpec, seed: u64, frac: f64) -> ComplexField {
    let cut = frac * grid.nyquist();
    let ks = grid.wavenumbers();
    let n = grid.n();
    let mut spec = noise(grid, seed);
    for (idx, v) in spec.data_mut().iter_mut().enumerate() {
        let m = [idx / (n * n), (idx / n) % n, idx % n];
        if m.iter().any(|&j| ks[j].abs() > cut) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    spec.fft_inverse()
}

pub fn mixture(grid: GridSpec, seed: u64) -> ComplexField {
    random_coherent_mixture(grid, 1.0, 0.5, seed)
}
