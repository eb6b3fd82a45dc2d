mod common;

use common::{band_limited, noise};
use num_complex::Complex64;
use proptest::prelude::*;
use rotor_gpe::{Axis, ComplexField, GridSpec};

fn grid(n: usize) -> GridSpec {
    GridSpec::new(n, 4.0).unwrap()
}

fn close(a: &ComplexField, b: &ComplexField, tol: f64) -> bool {
    a.sub(b).l2_norm() <= tol * (1.0 + b.l2_norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(n in prop::sample::select(vec![6usize, 8, 12, 16]), seed in any::<u64>()) {
        let f = noise(grid(n), seed);
        let r = f.fft_forward().l2_norm() / f.l2_norm();
        prop_assert!((r - 1.0).abs() < 1e-12);
        prop_assert!(close(&f.fft_forward().fft_inverse(), &f, 1e-12));
    }

    #[test]
    fn operations_are_linear(
        seed in any::<u64>(),
        a in (-2.0..2.0f64, -2.0..2.0f64),
        b in (-2.0..2.0f64, -2.0..2.0f64),
    ) {
        let g = grid(12);
        let (f, h) = (noise(g, seed), noise(g, seed ^ 0x5555));
        let (a, b) = (Complex64::new(a.0, a.1), Complex64::new(b.0, b.1));
        let ops: [fn(&ComplexField) -> ComplexField; 5] = [
            |u| u.fft_forward(),
            |u| u.spectral_gradient(Axis::Y),
            |u| u.coord_multiply(Axis::Z),
            |u| u.laplacian(),
            |u| u.radial2_multiply(),
        ];
        for op in ops {
            let lhs = op(&f.combine(a, &h, b));
            let rhs = op(&f).combine(a, &op(&h), b);
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }
    }

    #[test]
    fn derivative_is_skew_and_position_symmetric(seed in any::<u64>(), axis in 0usize..3) {
        let g = grid(16);
        let axis = Axis::from_number(axis + 1).unwrap();
        let (f, h) = (band_limited(g, seed, 0.6), band_limited(g, seed.wrapping_add(1), 0.6));
        let scale = f.l2_norm() * h.l2_norm() * g.nyquist();
        let skew = f.spectral_gradient(axis).inner(&h) + f.inner(&h.spectral_gradient(axis));
        prop_assert!(skew.norm() <= 1e-10 * scale);
        let sym = f.coord_multiply(axis).inner(&h) - f.inner(&h.coord_multiply(axis));
        prop_assert!(sym.norm() <= 1e-12 * scale);
    }

    #[test]
    fn sigma_vanishes_only_for_zero(seed in any::<u64>(), k in 0usize..512) {
        let g = grid(8);
        let mut f = ComplexField::zeros(g);
        prop_assert_eq!(f.norms().sigma, 0.0);
        f.data_mut()[k] = Complex64::new(1e-3, 0.0);
        prop_assert!(f.norms().sigma > 0.0);
        prop_assert!(noise(g, seed).norms().sigma > 0.0);
    }
}
