//! Spectral realization of `S(t)` as an xy-rotation composed with the
//! isotropic harmonic-oscillator flow.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::fft;
use crate::grid::{ComplexField, GridSpec};

/// Direction of the rotation factor: `S(t) = Rot(ROTATION_SIGN * omega t) o HO(t)`.
/// Fixed by comparison with the kernel quadrature on the vortex state
/// (see `calibrate_rotation_sign`).
pub const ROTATION_SIGN: f64 = -1.0;

/// How the harmonic-oscillator flow `exp(-i t (|p|^2 + omega^2 |x|^2)/2)` is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscillatorSplitting {
    /// `V(d/2) K(d) V(d/2)` per substep; second order in `t/m`.
    Strang,
    /// Mehler factorization `V(tan(omega d/2)/omega) K(sin(omega d)/omega) V(...)`; exact in time.
    Mehler,
}

fn unit(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

/// Multiplies by the separable phase `exp(-i c |x|^2 / 2)`.
fn quadratic_kick(data: &mut [Complex64], grid: &GridSpec, c: f64) {
    let n = grid.n();
    let f: Vec<Complex64> = grid.coords().iter().map(|&x| unit(-0.5 * c * x * x)).collect();
    data.par_chunks_mut(n * n).enumerate().for_each(|(ix, slab)| {
        for iy in 0..n {
            let fxy = f[ix] * f[iy];
            for iz in 0..n {
                slab[iy * n + iz] *= fxy * f[iz];
            }
        }
    });
}

/// Applies `exp(-i d |k|^2 / 2)` in frequency space, Nyquist bin included.
fn kinetic_drift(data: &mut [Complex64], grid: &GridSpec, d: f64) {
    let n = grid.n();
    let scale = 1.0 / (n * n * n) as f64;
    let f: Vec<Complex64> = grid.wavenumbers().iter().map(|&k| unit(-0.5 * d * k * k)).collect();
    for axis in 0..3 {
        fft::fft_axis(data, n, axis, false);
    }
    data.par_chunks_mut(n * n).enumerate().for_each(|(ix, slab)| {
        for iy in 0..n {
            let fxy = f[ix] * f[iy] * scale;
            for iz in 0..n {
                slab[iy * n + iz] *= fxy * f[iz];
            }
        }
    });
    for axis in 0..3 {
        fft::fft_axis(data, n, axis, true);
    }
}

/// `exp(-i t H_ho)` with `m` substeps.
pub fn oscillator_flow(
    phi: &ComplexField,
    omega: f64,
    t: f64,
    substeps: usize,
    splitting: OscillatorSplitting,
) -> ComplexField {
    let grid = *phi.grid();
    let m = substeps.max(1);
    let d = t / m as f64;
    let (kick, drift) = match splitting {
        OscillatorSplitting::Strang => (omega * omega * d / 2.0, d),
        OscillatorSplitting::Mehler => (omega * (0.5 * omega * d).tan(), (omega * d).sin() / omega),
    };
    let mut data = phi.data().to_vec();
    quadratic_kick(&mut data, &grid, kick);
    for step in 0..m {
        kinetic_drift(&mut data, &grid, drift);
        // adjacent half kicks merge
        let c = if step + 1 == m { kick } else { 2.0 * kick };
        quadratic_kick(&mut data, &grid, c);
    }
    ComplexField::from_vec(grid, data).expect("grid size preserved")
}

/// `f(x) -> f(x + a x_src e_dst)` by a per-line spectral phase ramp.
fn shear(data: &mut [Complex64], grid: &GridSpec, dst: usize, src: usize, a: f64) {
    let n = grid.n();
    let plans = fft::plans(n);
    // odd symbol: the Nyquist bin is left untouched so that shear(-a) is the exact inverse and transpose
    let ks: Vec<f64> = (0..n).map(|m| if grid.is_nyquist(m) { 0.0 } else { grid.wavenumber(m) }).collect();
    let xs = grid.coords();
    let inv_n = 1.0 / n as f64;
    fft::for_each_line(data, n, dst, |la, lb, line| {
        // (la, lb) index the remaining axes in increasing order
        let others = match dst {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        };
        let idx = if others[0] == src { la } else { lb };
        let shift = a * xs[idx];
        plans.forward.process(line);
        for (v, &k) in line.iter_mut().zip(&ks) {
            *v *= unit(k * shift) * inv_n;
        }
        plans.inverse.process(line);
    });
}

/// `(Rot_alpha f)(x) = f(R_{-alpha} x)`: the field turned by `alpha` about the z axis.
/// Requires `|alpha| < pi`; the shear factors grow like `tan(alpha/2)`.
pub fn rotate_xy(phi: &ComplexField, alpha: f64) -> ComplexField {
    let grid = *phi.grid();
    let mut data = phi.data().to_vec();
    if alpha != 0.0 {
        let a = (0.5 * alpha).tan();
        let b = -alpha.sin();
        shear(&mut data, &grid, 0, 1, a);
        shear(&mut data, &grid, 1, 0, b);
        shear(&mut data, &grid, 0, 1, a);
    }
    ComplexField::from_vec(grid, data).expect("grid size preserved")
}

/// `S(t)` (or, with `dual`, the transpose `S*(t)`) by rotation and oscillator flow.
pub fn apply_fast(
    phi: &ComplexField,
    omega: f64,
    t: f64,
    substeps: usize,
    splitting: OscillatorSplitting,
    dual: bool,
) -> ComplexField {
    if dual {
        // reversed order makes this the exact discrete transpose of the forward map
        let turned = rotate_xy(phi, -ROTATION_SIGN * omega * t);
        return oscillator_flow(&turned, omega, t, substeps, splitting);
    }
    let ho = oscillator_flow(phi, omega, t, substeps, splitting);
    rotate_xy(&ho, ROTATION_SIGN * omega * t)
}

/// Spectral `L_z f = i (x_2 d_1 - x_1 d_2) f`.
pub fn angular_momentum(phi: &ComplexField) -> ComplexField {
    use crate::grid::{Axis, I};
    let d1 = phi.spectral_gradient(Axis::X);
    let d2 = phi.spectral_gradient(Axis::Y);
    d1.coord_multiply(Axis::Y)
        .sub(&d2.coord_multiply(Axis::X))
        .scale(I)
}
