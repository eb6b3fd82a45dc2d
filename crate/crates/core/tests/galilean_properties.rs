mod common;

use std::f64::consts::PI;

use common::{band_limited, mixture};
use num_complex::Complex64;
use proptest::prelude::*;
use rotor_gpe::galilean::{
    apply_h, apply_j, apply_j_factorized, apply_oh, apply_oj, breve_scale, correction_factor,
    third_component_factor,
};
use rotor_gpe::grid::vector_norm_sq;
use rotor_gpe::oracle::{make_state, AnalyticState};
use rotor_gpe::propagator::{apply_s, Backend};
use rotor_gpe::{Axis, ComplexField, GridSpec};

const W: f64 = PI / 4.0;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn breve_factor_is_minus_half_angle_tangent(omega in 1.0..5.0f64, frac in 0.05..1.0f64) {
        let t = frac * PI / (4.0 * omega);
        let (s, c) = (omega * t).sin_cos();
        prop_assert!((breve_scale(omega, t) - (c / s - 1.0 / s)).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pythagorean_identity_at_time_zero(seed in any::<u64>(), omega in 1.0..3.0f64) {
        let g = GridSpec::new(16, 5.0).unwrap();
        let u = band_limited(g, seed, 0.5);
        let j2 = vector_norm_sq(&apply_j(&u, omega, 0.0));
        let h2 = vector_norm_sq(&apply_h(&u, omega, 0.0));
        let grad2 = vector_norm_sq(&u.gradient());
        let x2 = u.radial2_multiply().inner(&u).re;
        let rhs = grad2 + omega * omega * x2;
        prop_assert!((j2 + h2 - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn correction_operators_are_proportional_to_third_components(seed in any::<u64>(), frac in 0.01..1.0f64) {
        let g = GridSpec::new(16, 6.0).unwrap();
        let u = band_limited(g, seed, 0.5);
        let t = frac * W;
        let f = Complex64::new(0.0, correction_factor(1.0, t));
        let (oj, oh) = (apply_oj(&u, 1.0, t), apply_oh(&u, 1.0, t));
        let (j, h) = (apply_j(&u, 1.0, t), apply_h(&u, 1.0, t));
        let scale = vector_norm_sq(&oj).sqrt().max(vector_norm_sq(&oh).sqrt()).max(1e-300);
        prop_assert!(oj[0].l2_norm() + oj[1].l2_norm() + oh[0].l2_norm() + oh[1].l2_norm() <= 1e-10 * scale);
        prop_assert!(oj[2].sub(&j[2].scale(f)).l2_norm() <= 1e-10 * scale);
        prop_assert!(oh[2].sub(&h[2].scale(f)).l2_norm() <= 1e-10 * scale);
        let bound = 2.0 / (2f64.sqrt() - 1.0);
        prop_assert!(vector_norm_sq(&oj).sqrt() <= bound * t * vector_norm_sq(&j).sqrt() * (1.0 + 1e-12));
    }
}

#[test]
fn chirp_factorization_matches_direct_j() {
    let g = GridSpec::new(64, 8.0).unwrap();
    let u = make_state(&AnalyticState::coherent(1.0, [0.4, -0.2, 0.3], [0.1, 0.3, -0.2]), g).unwrap();
    for frac in [0.1, 0.5, 1.0] {
        let t = frac * W;
        let direct = apply_j(&u, 1.0, t);
        let fact = apply_j_factorized(&u, 1.0, t);
        for k in 0..3 {
            let e = fact[k].rel_l2_diff(&direct[k]);
            assert!(e < 1e-10, "t = {t}, component {k}: {e}");
        }
    }
}

/// `J S phi = S(-i grad phi)` and `H S phi = S(omega x phi)` through the
/// spectral propagator; the third components carry an extra `2cos(wt) - 1`.
#[test]
fn intertwining_through_the_spectral_propagator() {
    let g = GridSpec::new(48, 8.0).unwrap();
    let phi = mixture(g, 77);
    let minus_i = Complex64::new(0.0, -1.0);
    for frac in [0.3, 0.7, 1.0] {
        let t = frac * W;
        let s_phi = apply_s(&phi, 1.0, t, Backend::ExactShear).unwrap();
        let (j, h) = (apply_j(&s_phi, 1.0, t), apply_h(&s_phi, 1.0, t));
        let d3 = Complex64::new(third_component_factor(1.0, t), 0.0);
        for (k, axis) in Axis::ALL.into_iter().enumerate() {
            let s = |v: ComplexField| apply_s(&v, 1.0, t, Backend::ExactShear).unwrap();
            let mut sd = s(phi.spectral_gradient(axis).scale(minus_i));
            let mut sx = s(phi.coord_multiply(axis));
            if k == 2 {
                sd = sd.scale(d3);
                sx = sx.scale(d3);
            }
            assert!(j[k].rel_l2_diff(&sd) < 1e-8, "J_{k} at t = {t}: {}", j[k].rel_l2_diff(&sd));
            assert!(h[k].rel_l2_diff(&sx) < 1e-8, "H_{k} at t = {t}: {}", h[k].rel_l2_diff(&sx));
        }
    }
}
