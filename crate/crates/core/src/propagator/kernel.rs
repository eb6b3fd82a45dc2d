//! Closed-form oscillatory kernel and its direct quadrature.
//!
//! The kernel of `S(t)` is
//! `c(t) Q(x) Q(y) exp(-i omega (A(t) x) . y)` with `Q(x) = exp(i omega |x|^2 cot(omega t) / 2)`
//! and `c(t) = (omega / (2 pi i sin(omega t)))^{3/2}`. Because `(A x)_3` depends on
//! `x_3` only and `(A x)_{1,2}` on `(x_1, x_2)` only, the triple integral over `y`
//! is evaluated one axis at a time. The integrand is the trigonometric
//! interpolant of the field, summed with the rectangle rule on a refined node
//! set fine enough to resolve the chirp; with no refinement the result equals
//! the plain grid sum `sum_y K(x, y) phi(y) h^3`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{GpeError, Result};
use crate::fft::flat;
use crate::grid::{ComplexField, GridSpec, ZERO};

/// Largest grid accepted by the quadrature referee.
pub const ORACLE_GRID_CAP: usize = 24;

/// Upper bound on the refined quadrature node count per axis.
pub const MAX_QUADRATURE_POINTS: usize = 1 << 16;

/// The branch of `(1/i)^{3/2}` used everywhere: `exp(-3 pi i / 4)`.
pub fn branch_phase() -> Complex64 {
    Complex64::from_polar(1.0, -0.75 * PI)
}

/// `c(t) = (omega / (2 pi i sin(omega t)))^{3/2}` on the fixed branch.
pub fn normalization(omega: f64, t: f64) -> Complex64 {
    (omega / (2.0 * PI * (omega * t).sin())).powf(1.5) * branch_phase()
}

/// The 3x3 matrices attached to the kernel at times `t` (and `s`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelMatrices {
    pub a_matrix: [[f64; 3]; 3],
    pub b_matrix: [[f64; 3]; 3],
    /// Third-component factor `csc - cot` of `x~`.
    pub tilde_scale: f64,
    /// Third-component factor `cot - csc` of `x(breve)`.
    pub breve_scale: f64,
}

impl KernelMatrices {
    pub fn new(omega: f64, t: f64, s: f64) -> Self {
        let (st, ct) = (omega * t).sin_cos();
        let cot_t = ct / st;
        let csc_t = 1.0 / st;
        let (ss, cs) = (omega * s).sin_cos();
        let cot_s = cs / ss;
        let b11 = ss * ss * (cot_t * cot_s + 1.0);
        let b12 = ss * ss * (cot_t - cot_s);
        // csc - cot = tan(omega t / 2), evaluated without cancellation
        let half = (0.5 * omega * t).tan();
        KernelMatrices {
            a_matrix: [[cot_t, -1.0, 0.0], [1.0, cot_t, 0.0], [0.0, 0.0, csc_t]],
            b_matrix: [[b11, b12, 0.0], [-b12, b11, 0.0], [0.0, 0.0, csc_t * ss]],
            tilde_scale: half,
            breve_scale: -half,
        }
    }
}

/// Which kernel to integrate against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `K(x, y)`: the propagator `S(t)`.
    Forward,
    /// `K(y, x)`: the unconjugated dual `S*(t)`.
    Transpose,
}

/// Node count per axis that resolves every oscillation of the quadrature
/// integrand (band of the interpolant, the chirp and the plane-wave factor).
pub fn required_quadrature_points(grid: &GridSpec, omega: f64, t: f64) -> usize {
    let l = grid.extent();
    let (s, c) = (omega * t).sin_cos();
    let cot = (c / s).abs();
    let csc = (1.0 / s).abs();
    let max_freq = grid.nyquist() + omega * l * (cot + (cot + 1.0).max(csc));
    let nq = (2.0 * l * max_freq / PI).ceil() as usize;
    let nq = nq.max(grid.n());
    nq + nq % 2
}

pub(crate) fn check_window(omega: f64, t: f64) -> Result<()> {
    let window = PI / (4.0 * omega);
    if !(t > 0.0 && t <= window * (1.0 + 1e-12)) {
        return Err(GpeError::WindowViolation { t, window });
    }
    Ok(())
}

/// Per-axis quadrature weights `W(kappa)[j] = sum_q h_q exp(-i kappa y_q) Q1(y_q) P(y_q, j)`,
/// where `P` is the trigonometric interpolation basis of the coarse grid.
struct AxisQuadrature {
    coarse_x: Vec<f64>,
    coarse_k: Vec<f64>,
    nyquist_k: f64,
    fine_y0: f64,
    fine_h: f64,
    chirp: Vec<Complex64>,
}

impl AxisQuadrature {
    fn new(grid: &GridSpec, omega: f64, t: f64, nq: usize) -> Self {
        let l = grid.extent();
        let fine_h = 2.0 * l / nq as f64;
        let cot = 1.0 / (omega * t).tan();
        let chirp = (0..nq)
            .map(|q| {
                let y = -l + q as f64 * fine_h;
                Complex64::from_polar(1.0, 0.5 * omega * cot * y * y)
            })
            .collect();
        let n = grid.n();
        let coarse_k = (0..n)
            .filter(|&m| !grid.is_nyquist(m))
            .map(|m| grid.wavenumber(m))
            .collect();
        AxisQuadrature {
            coarse_x: grid.coords(),
            coarse_k,
            nyquist_k: grid.nyquist(),
            fine_y0: -l,
            fine_h,
            chirp,
        }
    }

    /// `G(kappa) = h_q sum_q exp(-i kappa y_q) Q1(y_q)`.
    fn chirp_sum(&self, kappa: f64) -> Complex64 {
        let step = Complex64::from_polar(1.0, -kappa * self.fine_h);
        let mut phase = Complex64::from_polar(1.0, -kappa * self.fine_y0);
        let mut acc = ZERO;
        for (q, &c) in self.chirp.iter().enumerate() {
            acc += phase * c;
            phase *= step;
            if q % 256 == 255 {
                phase /= phase.norm();
            }
        }
        acc * self.fine_h
    }

    fn weights(&self, kappa: f64) -> Vec<Complex64> {
        let n = self.coarse_x.len();
        let g: Vec<Complex64> = self.coarse_k.iter().map(|&k| self.chirp_sum(kappa - k)).collect();
        let g_plus = self.chirp_sum(kappa + self.nyquist_k);
        let g_minus = self.chirp_sum(kappa - self.nyquist_k);
        let inv_n = 1.0 / n as f64;
        self.coarse_x
            .iter()
            .map(|&xj| {
                let mut acc = ZERO;
                for (&k, &gk) in self.coarse_k.iter().zip(&g) {
                    acc += Complex64::from_polar(1.0, -k * xj) * gk;
                }
                acc += 0.5
                    * (Complex64::from_polar(1.0, -self.nyquist_k * xj) * g_minus
                        + Complex64::from_polar(1.0, self.nyquist_k * xj) * g_plus);
                acc * inv_n
            })
            .collect()
    }
}

/// Direct quadrature of the kernel integral against `phi` with `nq` nodes per axis.
pub fn kernel_quadrature(
    phi: &ComplexField,
    omega: f64,
    t: f64,
    kind: KernelKind,
    nq: usize,
) -> ComplexField {
    let grid = *phi.grid();
    let n = grid.n();
    let xs = grid.coords();
    let (s, c) = (omega * t).sin_cos();
    let cot = c / s;
    let csc = 1.0 / s;
    let quad = AxisQuadrature::new(&grid, omega, t, nq);

    // (M x)_1 and (M x)_2 for M = A (forward) or A^T (transpose)
    let sgn = match kind {
        KernelKind::Forward => 1.0,
        KernelKind::Transpose => -1.0,
    };
    let mx1 = |x1: f64, x2: f64| cot * x1 - sgn * x2;
    let mx2 = |x1: f64, x2: f64| sgn * x1 + cot * x2;

    let w3: Vec<Vec<Complex64>> = xs.par_iter().map(|&x3| quad.weights(omega * csc * x3)).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let w2: Vec<Vec<Complex64>> = pairs
        .par_iter()
        .map(|&(i1, i2)| quad.weights(omega * mx2(xs[i1], xs[i2])))
        .collect();
    let w1: Vec<Vec<Complex64>> = pairs
        .par_iter()
        .map(|&(i1, i2)| quad.weights(omega * mx1(xs[i1], xs[i2])))
        .collect();

    let data = phi.data();
    // t1[(j1, j2, x3)] = sum_j3 W3[x3][j3] phi[j1, j2, j3]
    let mut t1 = vec![ZERO; n * n * n];
    t1.par_chunks_mut(n).enumerate().for_each(|(c12, out)| {
        let line = &data[c12 * n..(c12 + 1) * n];
        for (i3, o) in out.iter_mut().enumerate() {
            *o = w3[i3].iter().zip(line).map(|(w, v)| w * v).sum();
        }
    });

    let norm = normalization(omega, t);
    let mut out = vec![ZERO; n * n * n];
    out.par_chunks_mut(n).enumerate().for_each(|(p, line)| {
        let (i1, i2) = (p / n, p % n);
        let w2p = &w2[p];
        let w1p = &w1[p];
        for (i3, o) in line.iter_mut().enumerate() {
            let mut acc = ZERO;
            for j1 in 0..n {
                let mut inner = ZERO;
                for j2 in 0..n {
                    inner += w2p[j2] * t1[flat(n, j1, j2, i3)];
                }
                acc += w1p[j1] * inner;
            }
            let (x1, x2, x3) = (xs[i1], xs[i2], xs[i3]);
            let q = Complex64::from_polar(1.0, 0.5 * omega * cot * (x1 * x1 + x2 * x2 + x3 * x3));
            *o = norm * q * acc;
        }
    });
    ComplexField::from_vec(grid, out).expect("grid size preserved")
}

/// Oracle application of `S(t)` or `S*(t)` with validation and automatic refinement.
pub fn apply_kernel(
    phi: &ComplexField,
    omega: f64,
    t: f64,
    kind: KernelKind,
    quadrature_points: Option<usize>,
) -> Result<ComplexField> {
    check_window(omega, t)?;
    let grid = phi.grid();
    if grid.n() > ORACLE_GRID_CAP {
        return Err(GpeError::GridTooLarge {
            n: grid.n(),
            cap: ORACLE_GRID_CAP,
        });
    }
    let h = grid.spacing();
    if omega / (omega * t).tan() * grid.extent() * h > PI {
        log::debug!(
            "chirp at t = {t} is under-sampled on the field grid; refining the quadrature nodes"
        );
    }
    let nq = match quadrature_points {
        Some(nq) => nq.max(1),
        None => {
            let want = required_quadrature_points(grid, omega, t);
            if want > MAX_QUADRATURE_POINTS {
                log::warn!(
                    "alias risk: oracle at t = {t} needs {want} quadrature nodes, capped at {MAX_QUADRATURE_POINTS}"
                );
            }
            want.min(MAX_QUADRATURE_POINTS)
        }
    };
    Ok(kernel_quadrature(phi, omega, t, kind, nq))
}
