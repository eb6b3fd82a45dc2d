//! Vector operators `J(t)` and `H(t)` built from the twisted coordinates
//! `x(breve) = (-x_2, x_1, -tan(omega t/2) x_3)` and `grad(breve)`, their chirp
//! factorizations, the angular momentum `L_z` and the third-component
//! corrections `O_J`, `O_H`.

use num_complex::Complex64;

use crate::error::{GpeError, Result};
use crate::grid::{Axis, ComplexField, GridSpec, I};

/// Which vector operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GalileanKind {
    J,
    H,
}

/// Direct formula or conjugation by a chirp (`M(t)` for `J`, `Q(t)` for `H`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalPath {
    Direct,
    Factorized,
}

/// Unit-modulus chirps `M(t) = exp(-i omega |x|^2 tan(omega t)/2)` and
/// `Q(t) = exp(i omega |x|^2 cot(omega t)/2)`; `Q` is absent at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChirpPair {
    pub m_phase: ComplexField,
    pub q_phase: Option<ComplexField>,
}

impl ChirpPair {
    pub fn new(grid: GridSpec, omega: f64, t: f64) -> Self {
        ChirpPair {
            m_phase: chirp(grid, -omega * (omega * t).tan()),
            q_phase: (t != 0.0).then(|| chirp(grid, omega / (omega * t).tan())),
        }
    }
}

/// `exp(i a |x|^2 / 2)`.
fn chirp(grid: GridSpec, a: f64) -> ComplexField {
    ComplexField::from_fn(grid, |x| {
        Complex64::from_polar(1.0, 0.5 * a * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]))
    })
}

/// Third-component factor `cot(omega t) - csc(omega t) = -tan(omega t / 2)` of `x(breve)`.
pub fn breve_scale(omega: f64, t: f64) -> f64 {
    -(0.5 * omega * t).tan()
}

/// `cos + sin * breve_scale = 2 cos(omega t) - 1`, the factor by which the third
/// components of `J` and `H` differ from the first two.
pub fn third_component_factor(omega: f64, t: f64) -> f64 {
    2.0 * (omega * t).cos() - 1.0
}

/// `2 omega sin(omega t) / (2 cos(omega t) - 1)`, with `|O_J u| = factor |J_3 u|`.
pub fn correction_factor(omega: f64, t: f64) -> f64 {
    2.0 * omega * (omega * t).sin() / third_component_factor(omega, t)
}

/// `c v + s v(breve)` for a vector field `v`.
fn twist(v: &[ComplexField; 3], c: f64, s: f64, breve: f64) -> [ComplexField; 3] {
    let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
    [
        v[0].combine(c, &v[1], -s),
        v[1].combine(c, &v[0], s),
        v[2].scale(c + s * breve),
    ]
}

fn position(u: &ComplexField) -> [ComplexField; 3] {
    Axis::ALL.map(|a| u.coord_multiply(a))
}

fn lin3(a: Complex64, x: &[ComplexField; 3], b: Complex64, y: &[ComplexField; 3]) -> [ComplexField; 3] {
    [0, 1, 2].map(|j| x[j].combine(a, &y[j], b))
}

/// `J(t) u = omega s (c x + s x(breve)) u - i c (c grad + s grad(breve)) u`.
pub fn apply_j(u: &ComplexField, omega: f64, t: f64) -> [ComplexField; 3] {
    let (s, c) = (omega * t).sin_cos();
    let b = breve_scale(omega, t);
    let xs = twist(&position(u), c, s, b);
    let ds = twist(&u.gradient(), c, s, b);
    lin3(Complex64::new(omega * s, 0.0), &xs, -I * c, &ds)
}

/// `H(t) u = omega c (c x + s x(breve)) u + i s (c grad + s grad(breve)) u`.
pub fn apply_h(u: &ComplexField, omega: f64, t: f64) -> [ComplexField; 3] {
    let (s, c) = (omega * t).sin_cos();
    let b = breve_scale(omega, t);
    let xs = twist(&position(u), c, s, b);
    let ds = twist(&u.gradient(), c, s, b);
    lin3(Complex64::new(omega * c, 0.0), &xs, I * s, &ds)
}

/// `(J(t) u, H(t) u)` sharing one spectral gradient.
pub fn apply_j_and_h(u: &ComplexField, grad: &[ComplexField; 3], omega: f64, t: f64) -> ([ComplexField; 3], [ComplexField; 3]) {
    let (s, c) = (omega * t).sin_cos();
    let b = breve_scale(omega, t);
    let xs = twist(&position(u), c, s, b);
    let ds = twist(grad, c, s, b);
    (
        lin3(Complex64::new(omega * s, 0.0), &xs, -I * c, &ds),
        lin3(Complex64::new(omega * c, 0.0), &xs, I * s, &ds),
    )
}

/// `J(t) = -i c M(t) (c grad + s grad(breve)) M(-t)`.
pub fn apply_j_factorized(u: &ComplexField, omega: f64, t: f64) -> [ComplexField; 3] {
    let (s, c) = (omega * t).sin_cos();
    let m = chirp(*u.grid(), -omega * (omega * t).tan());
    let inner = u.zip_map(&m, |v, p| v * p.conj());
    let ds = twist(&inner.gradient(), c, s, breve_scale(omega, t));
    ds.map(|d| d.zip_map(&m, |v, p| -I * c * v * p))
}

/// `H(t) = i s Q(t) (c grad + s grad(breve)) Q(-t)`; undefined at `t = 0`.
pub fn apply_h_factorized(u: &ComplexField, omega: f64, t: f64) -> Result<[ComplexField; 3]> {
    if t == 0.0 {
        return Err(GpeError::QFactorizationSingular);
    }
    let (s, c) = (omega * t).sin_cos();
    let q = chirp(*u.grid(), omega / (omega * t).tan());
    let inner = u.zip_map(&q, |v, p| v * p.conj());
    let ds = twist(&inner.gradient(), c, s, breve_scale(omega, t));
    Ok(ds.map(|d| d.zip_map(&q, |v, p| I * s * v * p)))
}

pub fn apply_galilean(
    kind: GalileanKind,
    path: EvalPath,
    u: &ComplexField,
    omega: f64,
    t: f64,
) -> Result<[ComplexField; 3]> {
    match (kind, path) {
        (GalileanKind::J, EvalPath::Direct) => Ok(apply_j(u, omega, t)),
        (GalileanKind::H, EvalPath::Direct) => Ok(apply_h(u, omega, t)),
        (GalileanKind::J, EvalPath::Factorized) => Ok(apply_j_factorized(u, omega, t)),
        (GalileanKind::H, EvalPath::Factorized) => apply_h_factorized(u, omega, t),
    }
}

/// `L_z u = i (x_2 d_1 u - x_1 d_2 u)`.
pub fn apply_lz(u: &ComplexField) -> ComplexField {
    crate::propagator::angular_momentum(u)
}

/// `O_J(t) u = (0, 0, 2 i omega s (omega s x_3 - i c d_3) u)`.
pub fn apply_oj(u: &ComplexField, omega: f64, t: f64) -> [ComplexField; 3] {
    let (s, c) = (omega * t).sin_cos();
    let pre = 2.0 * I * omega * s;
    let third = u
        .coord_multiply(Axis::Z)
        .combine(pre * omega * s, &u.spectral_gradient(Axis::Z), -pre * I * c);
    [ComplexField::zeros(*u.grid()), ComplexField::zeros(*u.grid()), third]
}

/// `O_H(t) u = (0, 0, 2 i omega s (omega c x_3 + i s d_3) u)`.
pub fn apply_oh(u: &ComplexField, omega: f64, t: f64) -> [ComplexField; 3] {
    let (s, c) = (omega * t).sin_cos();
    let pre = 2.0 * I * omega * s;
    let third = u
        .coord_multiply(Axis::Z)
        .combine(pre * omega * c, &u.spectral_gradient(Axis::Z), pre * I * s);
    [ComplexField::zeros(*u.grid()), ComplexField::zeros(*u.grid()), third]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::vector_norm_sq;
    use std::f64::consts::PI;

    fn smooth(grid: GridSpec) -> ComplexField {
        ComplexField::from_fn(grid, |x| {
            let r2 = (x[0] - 0.3).powi(2) + (x[1] + 0.2).powi(2) + 1.3 * x[2] * x[2];
            Complex64::new(1.0 + 0.4 * x[0], 0.3 * x[2]) * (-r2 / 2.0).exp()
                * Complex64::from_polar(1.0, 0.5 * x[1] - 0.2 * x[2])
        })
    }

    fn rel(a: &[ComplexField; 3], b: &[ComplexField; 3]) -> f64 {
        let num: f64 = (0..3).map(|j| a[j].sub(&b[j]).l2_norm_sq()).sum();
        (num / vector_norm_sq(b)).sqrt()
    }

    #[test]
    fn operators_at_time_zero() {
        let g = GridSpec::new(16, 4.0).unwrap();
        let k = [g.wavenumber(1), g.wavenumber(2), g.wavenumber(15)];
        let wave = ComplexField::from_fn(g, |x| (I * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2])).exp());
        let j = apply_j(&wave, 1.5, 0.0);
        for a in 0..3 {
            assert!(j[a].rel_l2_diff(&wave.scale(Complex64::new(k[a], 0.0))) < 1e-12);
        }
        let u = smooth(GridSpec::new(40, 8.0).unwrap());
        let h = apply_h(&u, 1.5, 0.0);
        for a in Axis::ALL {
            let expect = u.coord_multiply(a).scale(Complex64::new(1.5, 0.0));
            assert!(h[a.index()].rel_l2_diff(&expect) < 1e-14);
        }
        for o in [apply_oj(&u, 1.5, 0.0), apply_oh(&u, 1.5, 0.0)] {
            assert_eq!(vector_norm_sq(&o), 0.0);
        }
    }

    #[test]
    fn pythagorean_identity_at_time_zero() {
        let g = GridSpec::new(40, 8.0).unwrap();
        let u = smooth(g);
        let omega = 1.7;
        let lhs = vector_norm_sq(&apply_j(&u, omega, 0.0)) + vector_norm_sq(&apply_h(&u, omega, 0.0));
        let rhs = vector_norm_sq(&u.gradient()) + omega * omega * u.radial2_multiply().inner(&u).re;
        assert!((lhs / rhs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chirps_are_unit_modulus_and_inverse() {
        let g = GridSpec::new(8, 3.0).unwrap();
        let c = ChirpPair::new(g, 2.0, 0.2);
        let back = ChirpPair::new(g, 2.0, -0.2);
        for (m, mb) in c.m_phase.data().iter().zip(back.m_phase.data()) {
            assert!((m.norm() - 1.0).abs() < 1e-15);
            assert!((m * mb - 1.0).norm() < 1e-14);
        }
        assert!(c.q_phase.unwrap().data().iter().all(|q| (q.norm() - 1.0).abs() < 1e-15));
        assert!(ChirpPair::new(g, 2.0, 0.0).q_phase.is_none());
    }

    #[test]
    fn half_angle_factors() {
        for i in 1..50 {
            let omega = 1.0 + 0.05 * i as f64;
            let t = i as f64 / 50.0 * PI / (4.0 * omega);
            let th = omega * t;
            let diff = th.cos() / th.sin() - 1.0 / th.sin();
            assert!((breve_scale(omega, t) - diff).abs() < 1e-14);
            let f = th.cos() + th.sin() * breve_scale(omega, t);
            assert!((f - third_component_factor(omega, t)).abs() < 1e-14);
        }
    }

    #[test]
    fn factorized_paths_agree_with_direct() {
        // the chirps need a fine grid to be resolved at the box edge
        let g = GridSpec::new(48, 5.0).unwrap();
        let u = ComplexField::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            Complex64::new(1.0 + 0.4 * x[0], 0.3 * x[2]) * (-r2).exp()
        });
        let omega = 1.0;
        let t = PI / 8.0;
        assert!(rel(&apply_j_factorized(&u, omega, t), &apply_j(&u, omega, t)) < 1e-10);
        let hq = apply_h_factorized(&u, omega, t).unwrap();
        let err = rel(&hq, &apply_h(&u, omega, t));
        assert!(err < 1e-6, "{err}");
        assert!(matches!(apply_h_factorized(&u, omega, 0.0), Err(GpeError::QFactorizationSingular)));
    }

    #[test]
    fn corrections_are_proportional_to_third_components() {
        let g = GridSpec::new(40, 8.0).unwrap();
        let u = smooth(g);
        let omega = 1.3;
        let t = PI / (6.0 * omega) * 0.75;
        let k = I * correction_factor(omega, t);
        let oj = apply_oj(&u, omega, t);
        assert!(oj[2].rel_l2_diff(&apply_j(&u, omega, t)[2].scale(k)) < 1e-10);
        let oh = apply_oh(&u, omega, t);
        assert!(oh[2].rel_l2_diff(&apply_h(&u, omega, t)[2].scale(k)) < 1e-10);
        assert_eq!(oj[0].linf_norm() + oj[1].linf_norm(), 0.0);
    }

    #[test]
    fn angular_momentum_eigenstates() {
        let g = GridSpec::new(40, 8.0).unwrap();
        let env = |x: [f64; 3]| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp();
        let radial = ComplexField::from_fn(g, |x| Complex64::new(env(x), 0.0));
        assert!(apply_lz(&radial).l2_norm() < 1e-10);
        let plus = ComplexField::from_fn(g, |x| Complex64::new(x[0], x[1]) * env(x));
        let minus = ComplexField::from_fn(g, |x| Complex64::new(x[0], -x[1]) * env(x));
        assert!(apply_lz(&plus).rel_l2_diff(&plus) < 1e-8);
        assert!(apply_lz(&minus).rel_l2_diff(&minus.scale(Complex64::new(-1.0, 0.0))) < 1e-8);
    }
}
