//! The linear evolution `S(t) = exp(-i t (H_ho - omega L_z))`, its transpose
//! `S*(t)` and Hermitian adjoint, with two independent realizations: direct
//! quadrature of the closed-form kernel and a spectral rotation/oscillator
//! factorization.

mod fast;
mod kernel;
mod measure;

use num_complex::Complex64;

pub use fast::{angular_momentum, apply_fast, oscillator_flow, rotate_xy, OscillatorSplitting, ROTATION_SIGN};
pub use kernel::{
    branch_phase, normalization, required_quadrature_points, KernelKind, KernelMatrices,
    MAX_QUADRATURE_POINTS, ORACLE_GRID_CAP,
};
pub use measure::{
    calibrate_rotation_sign, calibrate_substeps, dispersive_bound, dispersive_scan, log_log_slope, strichartz_exponent,
    strichartz_ratio, DispersiveSample,
};

use crate::error::{GpeError, Result};
use crate::grid::ComplexField;
use kernel::check_window;

/// Realization of `S(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Direct quadrature of the closed-form kernel (referee, `n <= 24`).
    OracleQuadrature,
    /// Rotation by FFT shears after `substeps` Strang steps of the oscillator flow.
    FastSpectral { substeps: usize },
    /// Rotation by FFT shears after the exact Mehler factorization of the oscillator flow.
    ExactShear,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::OracleQuadrature => "oracle",
            Backend::FastSpectral { .. } => "fast",
            Backend::ExactShear => "exact-shear",
        }
    }
}

/// Everything needed to apply `S(t)` for one `t` in `(0, pi/(4 omega)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorPlan {
    omega: f64,
    t: f64,
    backend: Backend,
    matrices: KernelMatrices,
    normalization: Complex64,
}

impl PropagatorPlan {
    pub fn new(omega: f64, t: f64, backend: Backend) -> Result<Self> {
        check_window(omega, t)?;
        if let Backend::FastSpectral { substeps: 0 } = backend {
            return Err(GpeError::InvalidParams("substep count must be >= 1".into()));
        }
        Ok(PropagatorPlan {
            omega,
            t,
            backend,
            matrices: KernelMatrices::new(omega, t, t),
            normalization: normalization(omega, t),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn matrices(&self) -> &KernelMatrices {
        &self.matrices
    }

    pub fn normalization(&self) -> Complex64 {
        self.normalization
    }

    fn run(&self, phi: &ComplexField, kind: KernelKind) -> Result<ComplexField> {
        let dual = kind == KernelKind::Transpose;
        match self.backend {
            Backend::OracleQuadrature => kernel::apply_kernel(phi, self.omega, self.t, kind, None),
            Backend::FastSpectral { substeps } => Ok(fast::apply_fast(
                phi,
                self.omega,
                self.t,
                substeps,
                OscillatorSplitting::Strang,
                dual,
            )),
            Backend::ExactShear => Ok(fast::apply_fast(
                phi,
                self.omega,
                self.t,
                1,
                OscillatorSplitting::Mehler,
                dual,
            )),
        }
    }

    /// `S(t) phi`.
    pub fn apply(&self, phi: &ComplexField) -> Result<ComplexField> {
        self.run(phi, KernelKind::Forward)
    }

    /// `S*(t) g`, the transpose under the bilinear pairing `int f g dx`.
    pub fn apply_dual(&self, g: &ComplexField) -> Result<ComplexField> {
        self.run(g, KernelKind::Transpose)
    }

    /// `S(t)^dagger g = conj(S*(t) conj(g))`, the inverse of `S(t)`.
    pub fn apply_adjoint(&self, g: &ComplexField) -> Result<ComplexField> {
        Ok(self.apply_dual(&g.conj())?.conj())
    }
}

pub fn apply_s(phi: &ComplexField, omega: f64, t: f64, backend: Backend) -> Result<ComplexField> {
    PropagatorPlan::new(omega, t, backend)?.apply(phi)
}

pub fn apply_s_oracle(phi: &ComplexField, omega: f64, t: f64) -> Result<ComplexField> {
    apply_s(phi, omega, t, Backend::OracleQuadrature)
}

pub fn apply_s_fast(phi: &ComplexField, omega: f64, t: f64, substeps: usize) -> Result<ComplexField> {
    apply_s(phi, omega, t, Backend::FastSpectral { substeps })
}

pub fn apply_s_dual(g: &ComplexField, omega: f64, t: f64, backend: Backend) -> Result<ComplexField> {
    PropagatorPlan::new(omega, t, backend)?.apply_dual(g)
}

pub fn apply_s_adjoint(g: &ComplexField, omega: f64, t: f64, backend: Backend) -> Result<ComplexField> {
    PropagatorPlan::new(omega, t, backend)?.apply_adjoint(g)
}

/// `S(t) S*(s) f` for `0 < s < t <= pi/(4 omega)`.
pub fn compose_s_sdual(
    f: &ComplexField,
    omega: f64,
    t: f64,
    s: f64,
    backend: Backend,
) -> Result<ComplexField> {
    check_window(omega, t)?;
    if !(s > 0.0 && s < t) {
        return Err(GpeError::WindowViolation { t: s, window: t });
    }
    let inner = apply_s_dual(f, omega, s, backend)?;
    apply_s(&inner, omega, t, backend)
}

/// `S(t) phi` for any `t >= 0`, composed from pieces no longer than the window.
pub fn linear_evolve(phi: &ComplexField, omega: f64, t: f64, backend: Backend) -> Result<ComplexField> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(GpeError::InvalidParams(format!("evolution time must be >= 0, got {t}")));
    }
    let window = std::f64::consts::PI / (4.0 * omega);
    let pieces = (t / window).ceil().max(1.0) as usize;
    let dt = t / pieces as f64;
    let mut u = phi.clone();
    if dt == 0.0 {
        return Ok(u);
    }
    let plan = PropagatorPlan::new(omega, dt, backend)?;
    for _ in 0..pieces {
        u = plan.apply(&u)?;
    }
    Ok(u)
}
