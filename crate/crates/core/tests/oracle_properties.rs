use std::f64::consts::PI;

use proptest::prelude::*;
use rotor_gpe::oracle::{exact_linear_evolution, make_state, AnalyticState, StateKind};
use rotor_gpe::propagator::{apply_s, apply_s_oracle, Backend};
use rotor_gpe::GridSpec;

const W: f64 = PI / 4.0;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn coherent_states_follow_the_classical_orbit(
        a in prop::array::uniform3(-0.5..0.5f64),
        b in prop::array::uniform3(-0.3..0.3f64),
        frac in 0.1..1.0f64,
    ) {
        let state = AnalyticState::coherent(1.0, a, b);
        let t = frac * W;
        let og = GridSpec::new(24, 6.0).unwrap();
        let exact = exact_linear_evolution(&state, t, og).unwrap();
        let oracle = apply_s_oracle(&make_state(&state, og).unwrap(), 1.0, t).unwrap();
        prop_assert!(oracle.rel_l2_diff(&exact) < 1e-5);
        let fg = GridSpec::new(48, 8.0).unwrap();
        let exact = exact_linear_evolution(&state, t, fg).unwrap();
        let fast = apply_s(&make_state(&state, fg).unwrap(), 1.0, t, Backend::ExactShear).unwrap();
        prop_assert!(fast.rel_l2_diff(&exact) < 1e-6);
    }
}

#[test]
fn eigenstates_evolve_by_a_phase() {
    let g = GridSpec::new(40, 8.0).unwrap();
    for (kind, energy) in [(StateKind::Ground, 1.5), (StateKind::VortexPlus, 1.5), (StateKind::VortexMinus, 3.5)] {
        let state = AnalyticState::new(kind, 1.0);
        let u = make_state(&state, g).unwrap();
        for t in [0.2, W] {
            let exact = exact_linear_evolution(&state, t, g).unwrap();
            let expect = u.scale(num_complex::Complex64::from_polar(1.0, -energy * t));
            assert!(exact.rel_l2_diff(&expect) < 1e-12, "{kind:?}");
            let fast = apply_s(&u, 1.0, t, Backend::ExactShear).unwrap();
            assert!(fast.rel_l2_diff(&expect) < 1e-8, "{kind:?} at {t}: {}", fast.rel_l2_diff(&expect));
        }
    }
}
