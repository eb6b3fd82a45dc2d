//! Conserved quantities, the pseudo-conformal balance and drift summaries.

use serde::Serialize;

use crate::galilean::{apply_j_and_h, apply_lz};
use crate::grid::{vector_norm_sq, Axis, ComplexField, PhysicsParams};

/// Column order of the diagnostics CSV.
pub const CSV_HEADER: &str = "t,mass,e0,e0_kin,e0_pot,e0_int,lz,pc_lhs,pc_residual,sigma,j2,h2,linf";

/// The three terms of the non-rotating energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyTerms {
    /// `||grad u||^2 / 2`
    pub kinetic: f64,
    /// `omega^2 ||x u||^2 / 2`
    pub potential: f64,
    /// `beta ||u||_4^4 / 2`
    pub interaction: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential + self.interaction
    }
}

/// `<L_z>` with the imaginary part of the quadrature kept as a defect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LzExpectation {
    pub value: f64,
    pub imag_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PseudoConformal {
    pub pc_lhs: f64,
    pub pc_residual: f64,
}

pub fn mass(u: &ComplexField) -> f64 {
    u.l2_norm_sq()
}

fn potential_moment(u: &ComplexField) -> f64 {
    u.radial2_multiply().inner(u).re
}

fn energy_from(u: &ComplexField, grad_sq: f64, params: &PhysicsParams) -> EnergyTerms {
    let omega = params.omega();
    EnergyTerms {
        kinetic: 0.5 * grad_sq,
        potential: 0.5 * omega * omega * potential_moment(u),
        interaction: 0.5 * params.beta() * u.l4_norm_pow4(),
    }
}

pub fn energy_terms(u: &ComplexField, params: &PhysicsParams) -> EnergyTerms {
    energy_from(u, vector_norm_sq(&u.gradient()), params)
}

/// `E_0(u) = ||grad u||^2/2 + omega^2 ||x u||^2/2 + beta ||u||_4^4/2`.
pub fn energy_e0(u: &ComplexField, params: &PhysicsParams) -> f64 {
    energy_terms(u, params).total()
}

/// `int conj(u) L_z u dx`.
pub fn lz_expectation(u: &ComplexField) -> LzExpectation {
    let z = u.inner(&apply_lz(u));
    LzExpectation {
        value: z.re,
        imag_defect: z.im.abs(),
    }
}

fn third_axis_weight(u: &ComplexField, omega: f64, d3: &ComplexField) -> f64 {
    omega * omega * u.coord_multiply(Axis::Z).l2_norm_sq() + d3.l2_norm_sq()
}

fn pc_lhs_from(j2: f64, h2: f64, third: f64, l4: f64, omega: f64, t: f64, beta: f64) -> f64 {
    let c = (omega * t).cos();
    j2 + h2 + 4.0 * c * (1.0 - c) * third + beta * l4
}

/// `||J u||^2 + ||H u||^2 + 4 c (1 - c) (||omega x_3 u||^2 + ||d_3 u||^2) + beta ||u||_4^4`
/// at window-local time `t`, and its deviation from `2 e0_initial`.
pub fn pseudo_conformal(u: &ComplexField, t: f64, params: &PhysicsParams, e0_initial: f64) -> PseudoConformal {
    let omega = params.omega();
    let grad = u.gradient();
    let (j, h) = apply_j_and_h(u, &grad, omega, t);
    let lhs = pc_lhs_from(
        vector_norm_sq(&j),
        vector_norm_sq(&h),
        third_axis_weight(u, omega, &grad[2]),
        u.l4_norm_pow4(),
        omega,
        t,
        params.beta(),
    );
    PseudoConformal {
        pc_lhs: lhs,
        pc_residual: lhs - 2.0 * e0_initial,
    }
}

/// All diagnostics of one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    /// Global time.
    pub t: f64,
    /// Window-local time used by `J`, `H` and the pseudo-conformal balance.
    pub local_t: f64,
    pub mass: f64,
    pub e0: f64,
    pub e0_kin: f64,
    pub e0_pot: f64,
    pub e0_int: f64,
    pub lz: f64,
    pub lz_imag: f64,
    pub pc_lhs: f64,
    pub pc_residual: f64,
    pub sigma: f64,
    pub j2: f64,
    pub h2: f64,
    pub linf: f64,
}

impl DiagnosticsRecord {
    /// One CSV row matching [`CSV_HEADER`], 17 significant digits per value.
    pub fn csv_row(&self) -> String {
        [
            self.t,
            self.mass,
            self.e0,
            self.e0_kin,
            self.e0_pot,
            self.e0_int,
            self.lz,
            self.pc_lhs,
            self.pc_residual,
            self.sigma,
            self.j2,
            self.h2,
            self.linf,
        ]
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(",")
    }
}

pub fn record(
    u: &ComplexField,
    t: f64,
    local_t: f64,
    params: &PhysicsParams,
    e0_initial: f64,
) -> DiagnosticsRecord {
    let omega = params.omega();
    let grad = u.gradient();
    let grad_sq = vector_norm_sq(&grad);
    let energy = energy_from(u, grad_sq, params);
    let lz = lz_expectation(u);
    let (j, h) = apply_j_and_h(u, &grad, omega, local_t);
    let (j2, h2) = (vector_norm_sq(&j), vector_norm_sq(&h));
    let l4 = u.l4_norm_pow4();
    let pc_lhs = pc_lhs_from(
        j2,
        h2,
        third_axis_weight(u, omega, &grad[2]),
        l4,
        omega,
        local_t,
        params.beta(),
    );
    let m = mass(u);
    let sigma = (m + grad_sq).sqrt() + potential_moment(u).max(0.0).sqrt();
    DiagnosticsRecord {
        t,
        local_t,
        mass: m,
        e0: energy.total(),
        e0_kin: energy.kinetic,
        e0_pot: energy.potential,
        e0_int: energy.interaction,
        lz: lz.value,
        lz_imag: lz.imag_defect,
        pc_lhs,
        pc_residual: pc_lhs - 2.0 * e0_initial,
        sigma,
        j2,
        h2,
        linf: u.linf_norm(),
    }
}

/// Largest relative drift `max_t |q(t) - q(0)| / max(|q(0)|, 1)` per quantity.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct DriftReport {
    pub mass: f64,
    pub e0: f64,
    pub lz: f64,
    /// `max_t |pc_residual(t)| / max(|2 e0(0)|, 1)`
    pub pc_residual: f64,
}

pub fn drift_report(records: &[DiagnosticsRecord]) -> DriftReport {
    let Some(first) = records.first() else {
        return DriftReport::default();
    };
    let drift = |q: fn(&DiagnosticsRecord) -> f64| {
        let q0 = q(first);
        records
            .iter()
            .map(|r| (q(r) - q0).abs())
            .fold(0.0, f64::max)
            / q0.abs().max(1.0)
    };
    DriftReport {
        mass: drift(|r| r.mass),
        e0: drift(|r| r.e0),
        lz: drift(|r| r.lz),
        pc_residual: records.iter().map(|r| r.pc_residual.abs()).fold(0.0, f64::max)
            / (2.0 * first.e0).abs().max(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn ground(grid: GridSpec) -> ComplexField {
        let c = PI.powf(-0.75);
        ComplexField::from_fn(grid, |x| {
            Complex64::new(c * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp(), 0.0)
        })
    }

    fn lumpy(grid: GridSpec) -> ComplexField {
        ComplexField::from_fn(grid, |x| {
            let r2 = (x[0] - 0.5).powi(2) + x[1] * x[1] + 0.8 * (x[2] + 0.3).powi(2);
            Complex64::new(1.0 + x[1], 0.5 * x[0] - 0.2 * x[2]) * (-r2 / 2.0).exp()
        })
    }

    #[test]
    fn ground_state_quantities() {
        let g = GridSpec::new(40, 8.0).unwrap();
        let u = ground(g);
        let p = PhysicsParams::new(1.0, 0.0).unwrap();
        assert!((mass(&u) - 1.0).abs() < 1e-8);
        assert!((energy_e0(&u, &p) - 1.5).abs() < 1e-6);
        assert!(lz_expectation(&u).value.abs() < 1e-10);
        let u2 = u.scale(Complex64::new(0.0, 2.0));
        assert!((energy_e0(&u2, &p) / energy_e0(&u, &p) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_record() {
        let g = GridSpec::new(8, 4.0).unwrap();
        let p = PhysicsParams::new(1.0, 1.0).unwrap();
        let r = record(&ComplexField::zeros(g), 0.0, 0.0, &p, 0.0);
        for v in [r.mass, r.e0, r.lz, r.pc_lhs, r.pc_residual, r.sigma, r.j2, r.h2, r.linf] {
            assert_eq!(v, 0.0);
        }
        assert_eq!(drift_report(&[r, r]), DriftReport::default());
    }

    #[test]
    fn balance_at_time_zero_is_twice_the_energy() {
        let g = GridSpec::new(24, 6.0).unwrap();
        let u = lumpy(g);
        let p = PhysicsParams::new(1.3, 0.7).unwrap();
        let e0 = energy_e0(&u, &p);
        let pc = pseudo_conformal(&u, 0.0, &p, e0);
        assert!(pc.pc_residual.abs() <= 1e-12 * pc.pc_lhs.max(1.0));
    }

    #[test]
    fn record_matches_individual_operations() {
        let g = GridSpec::new(24, 6.0).unwrap();
        let u = lumpy(g);
        let p = PhysicsParams::new(1.2, 0.5).unwrap();
        let t = 0.3;
        let e0 = 2.0;
        let r = record(&u, 5.0, t, &p, e0);
        let pc = pseudo_conformal(&u, t, &p, e0);
        assert!((r.pc_lhs - pc.pc_lhs).abs() < 1e-12 * pc.pc_lhs);
        assert!((r.e0 - energy_e0(&u, &p)).abs() < 1e-12 * r.e0);
        assert!((r.e0 - r.e0_kin - r.e0_pot - r.e0_int).abs() < 1e-14 * r.e0);
        let nm = u.norms();
        assert!((r.sigma - nm.sigma).abs() < 1e-12 * nm.sigma);
        assert!(r.lz_imag < 1e-10);
        assert_eq!(r.csv_row().split(',').count(), CSV_HEADER.split(',').count());
    }

    #[test]
    fn drift_is_relative_to_first_record() {
        let g = GridSpec::new(8, 4.0).unwrap();
        let p = PhysicsParams::new(1.0, 0.0).unwrap();
        let u = lumpy(g);
        let a = record(&u, 0.0, 0.0, &p, energy_e0(&u, &p));
        let mut b = a;
        b.mass = a.mass * 1.5;
        b.lz = a.lz + 0.25;
        let d = drift_report(&[a, b]);
        assert!((d.mass - 0.5 * a.mass / a.mass.max(1.0)).abs() < 1e-14);
        assert!((d.lz - 0.25 / a.lz.abs().max(1.0)).abs() < 1e-14);
        assert_eq!(d.e0, 0.0);
    }
}
