//! Convergence, dispersive and propagator-comparison studies.

use rotor_gpe::oracle::band_limited_delta;
use rotor_gpe::propagator::{
    apply_fast, apply_s, apply_s_oracle, calibrate_substeps, dispersive_scan, log_log_slope, Backend,
    DispersiveSample, OscillatorSplitting,
};
use rotor_gpe::solver::{evolve, picard_solve, PicardConfig, Scheme, SolverConfig};
use rotor_gpe::{ComplexField, GpeError, Result};
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::cell;

pub const CONVERGENCE_HEADER: &str = "level,dt_or_m,error,observed_order";
pub const DISPERSIVE_HEADER: &str = "t,s,ratio,bound";
pub const COMPARE_HEADER: &str = "t,substeps,rel_l2_discrepancy,norm_ratio_fast,norm_ratio_oracle";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyScheme {
    Strang,
    Picard,
    Linear,
}

impl StudyScheme {
    pub fn name(&self) -> &'static str {
        match self {
            StudyScheme::Strang => "strang",
            StudyScheme::Picard => "picard",
            StudyScheme::Linear => "linear",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    /// Time step (Strang), substep count (linear) or node spacing (Picard).
    pub dt_or_m: f64,
    pub error: f64,
    /// `log2(error[level-1] / error[level])`; absent on the first level.
    pub observed_order: Option<f64>,
}

impl ConvergenceRow {
    pub fn csv_row(&self) -> String {
        let order = self.observed_order.map(cell).unwrap_or_default();
        format!("{},{},{},{}", self.level, cell(self.dt_or_m), cell(self.error), order)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub scheme: StudyScheme,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log error` against `log dt_or_m` (sign flipped
    /// for substep counts so that a second-order method reads 2).
    pub fitted_order: f64,
    pub monotone: bool,
}

fn rows_from(steps: &[f64], errors: &[f64]) -> Vec<ConvergenceRow> {
    errors
        .iter()
        .enumerate()
        .map(|(k, &e)| ConvergenceRow {
            level: k,
            dt_or_m: steps[k],
            error: e,
            observed_order: (k > 0).then(|| (errors[k - 1] / e).log2()),
        })
        .collect()
}

fn self_convergence(finals: &[ComplexField]) -> Vec<f64> {
    finals.windows(2).map(|w| w[0].rel_l2_diff(&w[1])).collect()
}

/// Runs `levels` refinement levels (self-convergence for the nonlinear schemes,
/// which needs one extra run; the linear study compares against the exact
/// oscillator flow).
pub fn convergence(config: &RunConfig, scheme: StudyScheme, levels: usize) -> Result<ConvergenceStudy> {
    if levels < 2 {
        return Err(GpeError::config("--levels", "need at least 2 levels"));
    }
    let omega = config.physics.omega();
    let u0 = config.initial_field()?;
    let horizon = config.evolve.t_end.min(config.physics.window());
    let (steps, errors, slope_sign) = match scheme {
        StudyScheme::Strang => {
            let dts: Vec<f64> = (0..=levels).map(|k| config.evolve.dt / (1u64 << k) as f64).collect();
            let finals = dts
                .iter()
                .map(|&dt| {
                    let cfg = SolverConfig {
                        scheme: Scheme::Strang,
                        dt,
                        diagnostics_every: usize::MAX,
                        ..config.evolve
                    };
                    Ok(evolve(&u0, &cfg, &config.physics)?.final_state.field)
                })
                .collect::<Result<Vec<_>>>()?;
            (dts, self_convergence(&finals), 1.0)
        }
        StudyScheme::Picard => {
            let nodes: Vec<usize> = (0..=levels).map(|k| config.convergence.base_nodes << k).collect();
            let finals = nodes
                .iter()
                .map(|&q| {
                    let pc = PicardConfig {
                        quad_nodes: q,
                        ..config.evolve.picard
                    };
                    let sol = picard_solve(&u0, horizon, &pc, &config.physics, config.evolve.backend())?;
                    Ok(sol.fields.last().expect("picard returns its nodes").clone())
                })
                .collect::<Result<Vec<_>>>()?;
            let spacing = nodes.iter().map(|&q| horizon / q as f64).collect();
            (spacing, self_convergence(&finals), 1.0)
        }
        StudyScheme::Linear => {
            let reference = apply_s(&u0, omega, horizon, Backend::ExactShear)?;
            let ms: Vec<usize> = (0..levels).map(|k| config.convergence.base_substeps << k).collect();
            let errors = ms
                .iter()
                .map(|&m| {
                    apply_fast(&u0, omega, horizon, m, OscillatorSplitting::Strang, false).rel_l2_diff(&reference)
                })
                .collect();
            (ms.iter().map(|&m| m as f64).collect(), errors, -1.0)
        }
    };
    let rows = rows_from(&steps, &errors);
    let xs: Vec<f64> = rows.iter().map(|r| r.dt_or_m).collect();
    let fitted_order = slope_sign * log_log_slope(&xs, &errors);
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    Ok(ConvergenceStudy {
        scheme,
        rows,
        fitted_order,
        monotone,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveStudy {
    pub samples: Vec<DispersiveSample>,
    /// Fitted exponent against `t + s`; `None` with fewer than two pairs.
    pub slope: Option<f64>,
}

pub fn dispersive_csv_row(s: &DispersiveSample) -> String {
    format!("{},{},{},{}", cell(s.t), cell(s.s), cell(s.ratio), cell(s.bound))
}

pub fn dispersive(config: &RunConfig) -> Result<DispersiveStudy> {
    let d = &config.dispersive;
    if d.pairs.is_empty() {
        return Ok(DispersiveStudy { samples: Vec::new(), slope: None });
    }
    let grid = d.grid.spec();
    let k = grid.nyquist();
    let f = band_limited_delta(grid, d.k_flat * k, d.k_cut * k)?;
    let samples = dispersive_scan(&f, config.physics.omega(), &d.pairs, config.evolve.backend())?;
    let slope = (samples.len() >= 2).then(|| {
        let xs: Vec<f64> = samples.iter().map(|s| s.ts).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
        log_log_slope(&xs, &ys)
    });
    Ok(DispersiveStudy { samples, slope })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareRow {
    pub t: f64,
    pub substeps: usize,
    pub rel_l2_discrepancy: f64,
    pub norm_ratio_fast: f64,
    pub norm_ratio_oracle: f64,
}

impl CompareRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            cell(self.t),
            self.substeps,
            cell(self.rel_l2_discrepancy),
            cell(self.norm_ratio_fast),
            cell(self.norm_ratio_oracle)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareStudy {
    pub rows: Vec<CompareRow>,
    /// Whether the substep counts were calibrated to the tolerance.
    pub calibrated: bool,
}

impl CompareStudy {
    pub fn worst(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_l2_discrepancy).fold(0.0, f64::max)
    }
}

/// Fast backend against the kernel quadrature at each configured time.
pub fn propagator_compare(config: &RunConfig) -> Result<CompareStudy> {
    let c = &config.compare;
    let omega = config.physics.omega();
    let u = config.initial_field_on(c.grid.spec(), "compare.grid")?;
    let norm = u.l2_norm();
    let calibrated = c.substeps.is_empty();
    let mut rows = Vec::new();
    for &t in &c.times {
        let oracle = apply_s_oracle(&u, omega, t)?;
        let ms = if calibrated {
            vec![calibrate_substeps(&u, &oracle, omega, t, c.tolerance, 1 << 14)?.0]
        } else {
            c.substeps.clone()
        };
        for m in ms {
            let fast = apply_fast(&u, omega, t, m, OscillatorSplitting::Strang, false);
            rows.push(CompareRow {
                t,
                substeps: m,
                rel_l2_discrepancy: fast.rel_l2_diff(&oracle),
                norm_ratio_fast: fast.l2_norm() / norm,
                norm_ratio_oracle: oracle.l2_norm() / norm,
            });
        }
    }
    Ok(CompareStudy { rows, calibrated })
}
