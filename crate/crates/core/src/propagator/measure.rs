//! Empirical dispersive and Strichartz measurements, and the rotation-sign calibration.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fast::{apply_fast, oscillator_flow, rotate_xy, OscillatorSplitting};
use super::kernel::{apply_kernel, check_window, KernelKind};
use super::{apply_s, compose_s_sdual, Backend};
use crate::error::{GpeError, Result};
use crate::grid::{ComplexField, GridSpec};

/// One point of a dispersive scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersiveSample {
    pub t: f64,
    pub s: f64,
    /// `t - s`
    pub dt: f64,
    /// `t + s`
    pub ts: f64,
    /// `||S(t) S*(s) f||_inf / ||f||_1`
    pub ratio: f64,
    /// `(omega / (pi sin(omega (t + s))))^{3/2}`
    pub bound: f64,
}

/// The closed-form L1 -> L-infinity constant at total time `t + s`.
pub fn dispersive_bound(omega: f64, t: f64, s: f64) -> f64 {
    (omega / (PI * (omega * (t + s)).sin())).powf(1.5)
}

pub fn dispersive_scan(
    f: &ComplexField,
    omega: f64,
    pairs: &[(f64, f64)],
    backend: Backend,
) -> Result<Vec<DispersiveSample>> {
    let l1 = f.l1_norm();
    pairs
        .iter()
        .map(|&(t, s)| {
            let out = compose_s_sdual(f, omega, t, s, backend)?;
            Ok(DispersiveSample {
                t,
                s,
                dt: t - s,
                ts: t + s,
                ratio: out.linf_norm() / l1,
                bound: dispersive_bound(omega, t, s),
            })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Time exponent `gamma(p)` with `2/gamma = 3(1/2 - 1/p)`; infinite at `p = 2`.
pub fn strichartz_exponent(p: f64) -> Result<f64> {
    if !(p.is_finite() && (2.0..6.0).contains(&p)) {
        return Err(GpeError::InvalidExponent(p));
    }
    if p == 2.0 {
        return Ok(f64::INFINITY);
    }
    Ok(4.0 * p / (3.0 * (p - 2.0)))
}

/// `||S(.) phi||_{L^gamma(I; L^p)} / ||phi||_2` on the given time nodes, with
/// trapezoid weights in time. For `p = 2` the time norm is the supremum.
pub fn strichartz_ratio(
    phi: &ComplexField,
    omega: f64,
    p: f64,
    times: &[f64],
    backend: Backend,
) -> Result<f64> {
    let gamma = strichartz_exponent(p)?;
    if times.is_empty() {
        return Err(GpeError::InvalidParams("time grid is empty".into()));
    }
    let mut ts = times.to_vec();
    ts.sort_by(f64::total_cmp);
    for &t in &ts {
        check_window(omega, t)?;
    }
    let norm = phi.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let lp: Vec<f64> = ts
        .iter()
        .map(|&t| Ok(apply_s(phi, omega, t, backend)?.lp_norm(p)))
        .collect::<Result<_>>()?;
    if gamma.is_infinite() {
        return Ok(lp.iter().cloned().fold(0.0, f64::max) / norm);
    }
    if ts.len() == 1 {
        return Err(GpeError::InvalidParams("need at least two time nodes".into()));
    }
    let mut acc = 0.0;
    for i in 0..ts.len() - 1 {
        let w = 0.5 * (ts[i + 1] - ts[i]);
        acc += w * (lp[i].powf(gamma) + lp[i + 1].powf(gamma));
    }
    Ok(acc.powf(1.0 / gamma) / norm)
}

/// Smallest power-of-two substep count (up to `max_substeps`) for which the
/// Strang backend is within `tol` (relative L2) of `reference = S(t) phi`.
/// Returns the count and its discrepancy, or the last tried count if none qualifies.
pub fn calibrate_substeps(
    phi: &ComplexField,
    reference: &ComplexField,
    omega: f64,
    t: f64,
    tol: f64,
    max_substeps: usize,
) -> Result<(usize, f64)> {
    check_window(omega, t)?;
    let mut m = 1;
    loop {
        let out = apply_fast(phi, omega, t, m, OscillatorSplitting::Strang, false);
        let err = out.rel_l2_diff(reference);
        if err <= tol || 2 * m > max_substeps {
            return Ok((m, err));
        }
        m *= 2;
    }
}

/// Picks the sign of the rotation factor that makes the spectral backend
/// agree with the kernel quadrature on an off-axis vortex at `t = pi/(8 omega)`.
pub fn calibrate_rotation_sign(grid: GridSpec, omega: f64) -> Result<f64> {
    let t = PI / (8.0 * omega);
    // off-centre so the ground-state factor does not hide the direction of turn
    let probe = ComplexField::from_fn(grid, |x| {
        let y = [x[0] - 0.7 / omega.sqrt(), x[1], x[2]];
        Complex64::new(y[0], y[1]) * (-omega * (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / 2.0).exp()
    });
    let reference = apply_kernel(&probe, omega, t, KernelKind::Forward, None)?;
    let ho = oscillator_flow(&probe, omega, t, 1, OscillatorSplitting::Mehler);
    let err = |sign: f64| rotate_xy(&ho, sign * omega * t).rel_l2_diff(&reference);
    Ok(if err(1.0) < err(-1.0) { 1.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::ROTATION_SIGN;

    #[test]
    fn exponent_relation() {
        assert_eq!(strichartz_exponent(2.0).unwrap(), f64::INFINITY);
        assert!((strichartz_exponent(4.0).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        for p in [1.9, 6.0, 7.0, f64::NAN] {
            assert!(matches!(strichartz_exponent(p), Err(GpeError::InvalidExponent(_))));
        }
        // 2/gamma = 3(1/2 - 1/p)
        for p in [2.5, 3.0, 5.9] {
            let g = strichartz_exponent(p).unwrap();
            assert!((2.0 / g - 3.0 * (0.5 - 1.0 / p)).abs() < 1e-14);
        }
    }

    #[test]
    fn slope_of_power_law() {
        let xs: Vec<f64> = (1..10).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        assert!((log_log_slope(&xs, &ys) + 1.5).abs() < 1e-12);
    }

    #[test]
    fn calibrated_sign_matches_constant() {
        let g = GridSpec::new(20, 6.0).unwrap();
        assert_eq!(calibrate_rotation_sign(g, 1.0).unwrap(), ROTATION_SIGN);
    }
}
