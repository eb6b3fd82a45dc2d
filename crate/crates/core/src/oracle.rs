//! Closed-form solutions of the linear equation and brute-force referees.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GpeError, Result};
use crate::galilean::apply_lz;
use crate::grid::{ComplexField, GridSpec, PhysicsParams};

/// Family of exact states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Ground,
    VortexPlus,
    VortexMinus,
    Coherent,
}

/// An exact state of the linear equation:
/// `(omega/pi)^{3/4} exp(-omega |x - a|^2 / 2 + i b.(x - a) + i gamma)` for coherent states,
/// or a fixed eigenstate multiplied by `exp(i gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticState {
    pub kind: StateKind,
    pub omega: f64,
    pub displacement: [f64; 3],
    pub momentum: [f64; 3],
    pub phase: f64,
}

/// Smallest e-folding count accepted for both the spatial and the spectral tail.
const MIN_EFOLDINGS: f64 = 4.0;

impl AnalyticState {
    pub fn new(kind: StateKind, omega: f64) -> Self {
        AnalyticState {
            kind,
            omega,
            displacement: [0.0; 3],
            momentum: [0.0; 3],
            phase: 0.0,
        }
    }

    pub fn coherent(omega: f64, displacement: [f64; 3], momentum: [f64; 3]) -> Self {
        AnalyticState {
            kind: StateKind::Coherent,
            omega,
            displacement,
            momentum,
            phase: 0.0,
        }
    }

    /// Prefactor giving unit L2 norm on all of R^3.
    pub fn normalization(&self) -> f64 {
        let base = (self.omega / PI).powf(0.75);
        match self.kind {
            StateKind::VortexPlus | StateKind::VortexMinus => base * self.omega.sqrt(),
            _ => base,
        }
    }

    pub fn value(&self, x: [f64; 3]) -> Complex64 {
        let w = self.omega;
        let n = self.normalization();
        let a = self.displacement;
        let b = self.momentum;
        let y = [x[0] - a[0], x[1] - a[1], x[2] - a[2]];
        let r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        let env = n * (-w * r2 / 2.0).exp();
        let phase = Complex64::from_polar(1.0, b[0] * y[0] + b[1] * y[1] + b[2] * y[2] + self.phase);
        let poly = match self.kind {
            StateKind::VortexPlus => Complex64::new(x[0], x[1]),
            StateKind::VortexMinus => Complex64::new(x[0], -x[1]),
            _ => Complex64::new(1.0, 0.0),
        };
        poly * env * phase
    }

    /// The state after linear evolution over `t >= 0`.
    pub fn evolved(&self, t: f64) -> AnalyticState {
        let w = self.omega;
        match self.kind {
            StateKind::Ground => AnalyticState {
                phase: self.phase - 1.5 * w * t,
                ..*self
            },
            // energy 5w/2 minus rotation w * (+1)
            StateKind::VortexPlus => AnalyticState {
                phase: self.phase - 1.5 * w * t,
                ..*self
            },
            // energy 5w/2 minus rotation w * (-1)
            StateKind::VortexMinus => AnalyticState {
                phase: self.phase - 3.5 * w * t,
                ..*self
            },
            StateKind::Coherent => {
                let orbit = classical_orbit(w, self.displacement, self.momentum, t);
                AnalyticState {
                    displacement: orbit.position,
                    momentum: orbit.momentum,
                    phase: self.phase + orbit.phase,
                    ..*self
                }
            }
        }
    }
}

/// Classical state of the rotating-frame oscillator and the accumulated phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orbit {
    pub position: [f64; 3],
    pub momentum: [f64; 3],
    pub phase: f64,
}

/// Integrates `a' = b + omega (a_2, -a_1, 0)`, `b' = -omega^2 a + omega (b_2, -b_1, 0)`,
/// `gamma' = (|b|^2 - omega^2 |a|^2)/2 - 3 omega/2` with classical RK4.
pub fn classical_orbit(omega: f64, a0: [f64; 3], b0: [f64; 3], t: f64) -> Orbit {
    classical_orbit_with(omega, a0, b0, t, true)
}

fn classical_orbit_with(omega: f64, a0: [f64; 3], b0: [f64; 3], t: f64, rotating: bool) -> Orbit {
    let rot = if rotating { omega } else { 0.0 };
    let rhs = |y: &[f64; 7]| -> [f64; 7] {
        let (a, b) = ([y[0], y[1], y[2]], [y[3], y[4], y[5]]);
        let bb = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
        let aa = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
        [
            b[0] + rot * a[1],
            b[1] - rot * a[0],
            b[2],
            -omega * omega * a[0] + rot * b[1],
            -omega * omega * a[1] - rot * b[0],
            -omega * omega * a[2],
            0.5 * (bb - omega * omega * aa) - 1.5 * omega,
        ]
    };
    let steps = ((t.abs() * omega * 4000.0).ceil() as usize).max(200);
    let h = t / steps as f64;
    let mut y = [a0[0], a0[1], a0[2], b0[0], b0[1], b0[2], 0.0];
    let axpy = |y: &[f64; 7], k: &[f64; 7], s: f64| -> [f64; 7] {
        let mut out = *y;
        for i in 0..7 {
            out[i] += s * k[i];
        }
        out
    };
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&axpy(&y, &k1, h / 2.0));
        let k3 = rhs(&axpy(&y, &k2, h / 2.0));
        let k4 = rhs(&axpy(&y, &k3, h));
        for i in 0..7 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Orbit {
        position: [y[0], y[1], y[2]],
        momentum: [y[3], y[4], y[5]],
        phase: y[6],
    }
}

fn check_resolution(state: &AnalyticState, grid: &GridSpec) -> Result<()> {
    let w = state.omega;
    let reach = state
        .displacement
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let spatial = w * (grid.extent() - reach).max(0.0).powi(2) / 2.0;
    let kmax = state.momentum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let spectral = (grid.nyquist() - kmax).max(0.0).powi(2) / (2.0 * w);
    if spatial < MIN_EFOLDINGS || spectral < MIN_EFOLDINGS {
        return Err(GpeError::ResolutionTooLow(format!(
            "{:?} state with omega = {w} on n = {}, L = {}: spatial tail {:.2} and spectral tail {:.2} e-foldings, need {MIN_EFOLDINGS}",
            state.kind,
            grid.n(),
            grid.extent(),
            spatial,
            spectral
        )));
    }
    Ok(())
}

/// Samples `state` on `grid`.
pub fn make_state(state: &AnalyticState, grid: GridSpec) -> Result<ComplexField> {
    check_resolution(state, &grid)?;
    Ok(ComplexField::from_fn(grid, |x| state.value(x)))
}

/// The exact linear evolution of `state` over time `t`, sampled on `grid`.
pub fn exact_linear_evolution(state: &AnalyticState, t: f64, grid: GridSpec) -> Result<ComplexField> {
    make_state(&state.evolved(t), grid)
}

/// `-Delta u / 2 + omega^2 |x|^2 u / 2 - omega L_z u` with spectral derivatives.
pub fn brute_force_h0(u: &ComplexField, params: &PhysicsParams) -> ComplexField {
    let w = params.omega();
    let kin = u.laplacian();
    let pot = u.radial2_multiply();
    let rot = apply_lz(u);
    kin.combine(Complex64::new(-0.5, 0.0), &pot, Complex64::new(0.5 * w * w, 0.0))
        .combine(Complex64::new(1.0, 0.0), &rot, Complex64::new(-w, 0.0))
}

/// Linear combination of coherent states; evolves term by term.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentMixture {
    pub terms: Vec<(AnalyticState, Complex64)>,
}

impl CoherentMixture {
    /// Three random terms with `|a_i|, |b_i| <= spread`, scaled to unit mass on `grid`.
    /// Each term keeps its shape under the linear flow, so the field stays well
    /// inside any box that holds the initial data.
    pub fn random(grid: GridSpec, omega: f64, spread: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terms = Vec::new();
        for _ in 0..3 {
            let a = [0; 3].map(|_| rng.gen_range(-spread..=spread));
            let b = [0; 3].map(|_| rng.gen_range(-spread..=spread));
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            terms.push((AnalyticState::coherent(omega, a, b), c));
        }
        let mut mix = CoherentMixture { terms };
        let m = mix.sample(grid).l2_norm();
        for (_, c) in mix.terms.iter_mut() {
            *c /= m;
        }
        mix
    }

    pub fn sample(&self, grid: GridSpec) -> ComplexField {
        ComplexField::from_fn(grid, |x| self.terms.iter().map(|(s, c)| c * s.value(x)).sum())
    }

    pub fn evolved(&self, t: f64) -> Self {
        CoherentMixture {
            terms: self.terms.iter().map(|(s, c)| (s.evolved(t), *c)).collect(),
        }
    }
}

/// Sampled [`CoherentMixture::random`].
pub fn random_coherent_mixture(grid: GridSpec, omega: f64, spread: f64, seed: u64) -> ComplexField {
    CoherentMixture::random(grid, omega, spread, seed).sample(grid)
}

/// Band-limited approximation of a point mass at the origin: the spectrum is
/// flat up to `k_flat`, falls off with a raised cosine and vanishes beyond `k_cut`.
/// Tensor product over the three axes, real and even, unit integral.
pub fn band_limited_delta(grid: GridSpec, k_flat: f64, k_cut: f64) -> Result<ComplexField> {
    if !(k_flat >= 0.0 && k_cut > k_flat) {
        return Err(GpeError::InvalidParams(format!(
            "need 0 <= k_flat < k_cut, got {k_flat} and {k_cut}"
        )));
    }
    let taper = |k: f64| {
        let k = k.abs();
        if k <= k_flat {
            1.0
        } else if k >= k_cut {
            0.0
        } else {
            0.5 * (1.0 + (PI * (k - k_flat) / (k_cut - k_flat)).cos())
        }
    };
    let l = grid.extent();
    // one-dimensional profile g(x_j) = (1/2L) sum_m taper(k_m) exp(i k_m x_j)
    let ks = grid.wavenumbers();
    let profile: Vec<f64> = grid
        .coords()
        .iter()
        .map(|&x| ks.iter().map(|&k| taper(k) * (k * x).cos()).sum::<f64>() / (2.0 * l))
        .collect();
    let u = ComplexField::from_fn(grid, |x| {
        let idx = |c: f64| ((c + l) / grid.spacing()).round() as usize;
        Complex64::new(profile[idx(x[0])] * profile[idx(x[1])] * profile[idx(x[2])], 0.0)
    });
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenrelations_under_spectral_h0() {
        let g = GridSpec::new(40, 8.0).unwrap();
        let p = PhysicsParams::new(1.0, 0.0).unwrap();
        let cases = [
            (StateKind::Ground, 1.5),
            (StateKind::VortexPlus, 1.5),
            (StateKind::VortexMinus, 3.5),
        ];
        for (kind, e) in cases {
            let u = make_state(&AnalyticState::new(kind, 1.0), g).unwrap();
            let hu = brute_force_h0(&u, &p);
            assert!(hu.rel_l2_diff(&u.scale(Complex64::new(e, 0.0))) < 1e-8, "{kind:?}");
            assert!((u.l2_norm() - 1.0).abs() < 1e-8);
            let q = u.inner(&hu).re / u.inner(&u).re;
            assert!((q - e).abs() < 1e-8);
        }
    }

    #[test]
    fn h0_is_hermitian_on_random_data() {
        let g = GridSpec::new(16, 6.0).unwrap();
        let p = PhysicsParams::new(1.3, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data = (0..g.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let u = ComplexField::from_vec(g, data).unwrap();
        let z = u.inner(&brute_force_h0(&u, &p));
        assert!(z.im.abs() <= 1e-10 * z.re.abs());
    }

    #[test]
    fn coherent_at_origin_is_ground() {
        let g = GridSpec::new(16, 8.0).unwrap();
        let a = make_state(&AnalyticState::coherent(1.0, [0.0; 3], [0.0; 3]), g).unwrap();
        let b = make_state(&AnalyticState::new(StateKind::Ground, 1.0), g).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evolution_at_time_zero_is_identity() {
        let g = GridSpec::new(24, 8.0).unwrap();
        for s in [
            AnalyticState::new(StateKind::VortexMinus, 1.0),
            AnalyticState::coherent(1.0, [0.4, -0.2, 0.1], [0.3, 0.0, -0.5]),
        ] {
            let u0 = make_state(&s, g).unwrap();
            let u = exact_linear_evolution(&s, 0.0, g).unwrap();
            assert!(u.rel_l2_diff(&u0) < 1e-14);
        }
    }

    #[test]
    fn ground_phase_after_one_window() {
        let g = GridSpec::new(16, 8.0).unwrap();
        let s = AnalyticState::new(StateKind::Ground, 1.0);
        let u0 = make_state(&s, g).unwrap();
        let u = exact_linear_evolution(&s, PI / 4.0, g).unwrap();
        let ph = Complex64::from_polar(1.0, -3.0 * PI / 8.0);
        for (a, b) in u.data().iter().zip(u0.data()) {
            assert!((a - b * ph).norm() < 1e-12);
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn non_rotating_orbit_matches_closed_form() {
        let w = 1.7;
        let (a0, b0) = ([0.3, -0.4, 0.2], [0.1, 0.5, -0.3]);
        let t = 2.3;
        let o = classical_orbit_with(w, a0, b0, t, false);
        let (s, c) = (w * t).sin_cos();
        for i in 0..3 {
            assert!((o.position[i] - (a0[i] * c + b0[i] * s / w)).abs() < 1e-11);
            assert!((o.momentum[i] - (-a0[i] * w * s + b0[i] * c)).abs() < 1e-11);
        }
        // gamma = (b.a(t) - b0.a0)/2 - 3 w t / 2 for the oscillator
        let dot = |x: [f64; 3], y: [f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let expect = 0.5 * (dot(o.momentum, o.position) - dot(b0, a0)) - 1.5 * w * t;
        assert!((o.phase - expect).abs() < 1e-11);
    }

    #[test]
    fn rotating_orbit_conserves_energy_and_angular_momentum() {
        let w = 1.0;
        let (a0, b0) = ([0.8, 0.1, -0.2], [0.0, 0.4, 0.3]);
        let o = classical_orbit(w, a0, b0, 1.9);
        let h = |a: [f64; 3], b: [f64; 3]| {
            0.5 * (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]) + 0.5 * w * w * (a[0] * a[0] + a[1] * a[1] + a[2] * a[2])
        };
        let l = |a: [f64; 3], b: [f64; 3]| a[0] * b[1] - a[1] * b[0];
        assert!((h(a0, b0) - h(o.position, o.momentum)).abs() < 1e-12);
        assert!((l(a0, b0) - l(o.position, o.momentum)).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_solves_the_linear_equation() {
        // i du/dt = H0 u, checked by a centred difference of the exact evolution
        let g = GridSpec::new(40, 8.0).unwrap();
        let p = PhysicsParams::new(1.0, 0.0).unwrap();
        let s = AnalyticState::coherent(1.0, [0.6, -0.3, 0.2], [0.2, 0.4, 0.0]);
        let (t, dt) = (0.4, 1e-4);
        let up = exact_linear_evolution(&s, t + dt, g).unwrap();
        let um = exact_linear_evolution(&s, t - dt, g).unwrap();
        let u = exact_linear_evolution(&s, t, g).unwrap();
        let dudt = up.sub(&um).scale(Complex64::new(0.0, 1.0 / (2.0 * dt)));
        assert!(dudt.rel_l2_diff(&brute_force_h0(&u, &p)) < 1e-6);
    }

    #[test]
    fn band_limited_delta_has_unit_integral() {
        let g = GridSpec::new(32, 8.0).unwrap();
        let k = g.nyquist();
        let d = band_limited_delta(g, 0.4 * k, 0.8 * k).unwrap();
        assert!((d.integral() - 1.0).norm() < 1e-12);
        assert!(d.data().iter().all(|v| v.im == 0.0));
        let peak = d.linf_norm();
        assert_eq!(peak, d.data()[crate::fft::flat(32, 16, 16, 16)].norm());
        assert!(band_limited_delta(g, 2.0, 1.0).is_err());
    }

    #[test]
    fn resolution_guard() {
        let g = GridSpec::new(8, 2.0).unwrap();
        assert!(matches!(
            make_state(&AnalyticState::new(StateKind::Ground, 1.0), g),
            Err(GpeError::ResolutionTooLow(_))
        ));
    }

    #[test]
    fn mixture_evolution_is_consistent() {
        let g = GridSpec::new(24, 6.0).unwrap();
        let mix = CoherentMixture::random(g, 1.0, 0.5, 9);
        let f0 = mix.sample(g);
        let f = mix.evolved(0.0).sample(g);
        assert!(f.rel_l2_diff(&f0) < 1e-14);
        assert!((f0.l2_norm() - 1.0).abs() < 1e-14);
    }
}
