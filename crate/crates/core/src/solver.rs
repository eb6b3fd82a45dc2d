//! Time integration of the full equation: Strang splitting around the exact
//! linear flow, Picard iteration on the Duhamel formula, and window-by-window
//! continuation to arbitrary final times.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{energy_e0, record, DiagnosticsRecord};
use crate::error::{GpeError, Result};
use crate::galilean::apply_j_and_h;
use crate::grid::{vector_modulus, ComplexField, PhysicsParams, I};
use crate::propagator::{strichartz_exponent, Backend, PropagatorPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Strang,
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    /// Lebesgue exponent of the workspace, in `(2, 6)`.
    pub rho: f64,
    /// Stop when the workspace distance between iterates drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Number of Duhamel quadrature intervals per solve (at least 8).
    pub quad_nodes: usize,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            rho: 4.0,
            tol: 1e-12,
            max_iter: 50,
            quad_nodes: 64,
        }
    }
}

impl PicardConfig {
    /// `gamma(rho)` from `2/gamma = 3(1/2 - 1/rho)`.
    pub fn gamma(&self) -> f64 {
        4.0 * self.rho / (3.0 * (self.rho - 2.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 2.0 && self.rho < 6.0) {
            return Err(GpeError::InvalidExponent(self.rho));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(GpeError::InvalidParams("picard tol must be > 0 and max_iter >= 1".into()));
        }
        if self.quad_nodes < 8 {
            return Err(GpeError::InvalidParams(format!(
                "picard quad_nodes must be >= 8, got {}",
                self.quad_nodes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    /// Strang substeps of the oscillator flow inside `S(dt)`; `None` uses the
    /// exact Mehler factorization.
    pub substeps: Option<usize>,
    pub picard: PicardConfig,
    /// Steps between diagnostics records (seams and the final time are always recorded).
    pub diagnostics_every: usize,
    /// Blow-up guard as a multiple of the initial sup norm.
    pub blowup_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            scheme: Scheme::Strang,
            dt: 1e-3,
            t_end: PI / 4.0,
            substeps: None,
            picard: PicardConfig::default(),
            diagnostics_every: 10,
            blowup_factor: 1e3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(GpeError::InvalidParams(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(GpeError::InvalidParams(format!("t_end must be > 0, got {}", self.t_end)));
        }
        if self.substeps == Some(0) {
            return Err(GpeError::InvalidParams("substeps must be >= 1".into()));
        }
        if self.diagnostics_every == 0 {
            return Err(GpeError::InvalidParams("diagnostics_every must be >= 1".into()));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(GpeError::InvalidParams("blowup_factor must be > 1".into()));
        }
        self.picard.validate()
    }

    pub fn backend(&self) -> Backend {
        match self.substeps {
            Some(m) => Backend::FastSpectral { substeps: m },
            None => Backend::ExactShear,
        }
    }
}

/// Field plus the window bookkeeping of the time-translation argument.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryState {
    pub field: ComplexField,
    pub t: f64,
    pub window_index: usize,
    pub local_t: f64,
    /// `E_0` captured at the start of the current window.
    pub e0_window_start: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub final_state: TrajectoryState,
    pub records: Vec<DiagnosticsRecord>,
    pub steps: usize,
}

/// `N(tau) v = exp(-i beta |v|^2 tau) v`.
pub fn nonlinear_phase(v: &ComplexField, beta: f64, tau: f64) -> ComplexField {
    if beta == 0.0 {
        return v.clone();
    }
    v.map(|z| z * Complex64::from_polar(1.0, -beta * z.norm_sqr() * tau))
}

fn strang_with(u: &ComplexField, plan: &PropagatorPlan, beta: f64) -> Result<ComplexField> {
    let half = 0.5 * plan.t();
    let a = nonlinear_phase(u, beta, half);
    let b = plan.apply(&a)?;
    Ok(nonlinear_phase(&b, beta, half))
}

/// `N(dt/2) S(dt) N(dt/2) u`; `dt` must fit in one window.
pub fn strang_step(u: &ComplexField, dt: f64, params: &PhysicsParams, backend: Backend) -> Result<ComplexField> {
    let plan = PropagatorPlan::new(params.omega(), dt, backend)?;
    strang_with(u, &plan, params.beta())
}

/// Fraction of the mass sitting in the outer tenth of the box along any axis.
fn boundary_mass_fraction(u: &ComplexField) -> f64 {
    let l = u.grid().extent();
    let edge = u
        .map_with_coords(|x, v| {
            if x.iter().any(|c| c.abs() >= 0.9 * l) {
                v
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .l2_norm_sq();
    let total = u.l2_norm_sq();
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

/// Advances `u0` to `config.t_end`, restarting the window clock at every
/// multiple of `pi/(4 omega)`. `observer` sees the state after every step.
pub fn evolve_observed<F>(
    u0: &ComplexField,
    config: &SolverConfig,
    params: &PhysicsParams,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(&TrajectoryState, usize) -> Result<()>,
{
    config.validate()?;
    let frac = boundary_mass_fraction(u0);
    if frac > 1e-10 {
        log::warn!("initial data has {frac:.3e} of its mass near the box boundary");
    }
    match config.scheme {
        Scheme::Strang => evolve_strang(u0, config, params, &mut observer),
        Scheme::Picard => evolve_picard(u0, config, params, &mut observer),
    }
}

pub fn evolve(u0: &ComplexField, config: &SolverConfig, params: &PhysicsParams) -> Result<Trajectory> {
    evolve_observed(u0, config, params, |_, _| Ok(()))
}

fn seam_tolerance(window: f64) -> f64 {
    1e-12 * window
}

struct Recorder<'a> {
    params: &'a PhysicsParams,
    records: Vec<DiagnosticsRecord>,
    limit: f64,
}

impl Recorder<'_> {
    fn push(&mut self, s: &TrajectoryState) {
        self.records
            .push(record(&s.field, s.t, s.local_t, self.params, s.e0_window_start));
    }

    fn guard(&self, s: &TrajectoryState) -> Result<()> {
        let linf = s.field.linf_norm();
        if !(linf <= self.limit) || !s.field.is_finite() {
            return Err(GpeError::BlowupDetected {
                t: s.t,
                linf,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

/// Closes the current window: records the seam from both sides.
fn rebase(state: &mut TrajectoryState, rec: &mut Recorder, params: &PhysicsParams) {
    rec.push(state);
    state.window_index += 1;
    state.local_t = 0.0;
    state.e0_window_start = energy_e0(&state.field, params);
    rec.push(state);
}

fn evolve_strang<F>(
    u0: &ComplexField,
    config: &SolverConfig,
    params: &PhysicsParams,
    observer: &mut F,
) -> Result<Trajectory>
where
    F: FnMut(&TrajectoryState, usize) -> Result<()>,
{
    let window = params.window();
    let eps = seam_tolerance(window);
    let backend = config.backend();
    let full = PropagatorPlan::new(params.omega(), config.dt.min(window), backend)?;
    let mut state = TrajectoryState {
        field: u0.clone(),
        t: 0.0,
        window_index: 0,
        local_t: 0.0,
        e0_window_start: energy_e0(u0, params),
    };
    let mut rec = Recorder {
        params,
        records: Vec::new(),
        limit: config.blowup_factor * u0.linf_norm(),
    };
    rec.push(&state);
    observer(&state, 0)?;
    let mut steps = 0;
    while config.t_end - state.t > eps {
        let room = (window - state.local_t).min(config.t_end - state.t);
        let (plan, h) = if full.t() <= room + eps {
            (full, full.t())
        } else {
            (PropagatorPlan::new(params.omega(), room, backend)?, room)
        };
        state.field = strang_with(&state.field, &plan, params.beta())?;
        state.t += h;
        state.local_t += h;
        steps += 1;
        rec.guard(&state)?;
        let at_seam = window - state.local_t <= eps;
        let at_end = config.t_end - state.t <= eps;
        if at_seam {
            state.local_t = window;
        }
        if at_seam && !at_end {
            rebase(&mut state, &mut rec, params);
        } else if at_end || steps % config.diagnostics_every == 0 {
            rec.push(&state);
        }
        observer(&state, steps)?;
    }
    Ok(Trajectory {
        final_state: state,
        records: rec.records,
        steps,
    })
}

fn evolve_picard<F>(
    u0: &ComplexField,
    config: &SolverConfig,
    params: &PhysicsParams,
    observer: &mut F,
) -> Result<Trajectory>
where
    F: FnMut(&TrajectoryState, usize) -> Result<()>,
{
    let window = params.window();
    let eps = seam_tolerance(window);
    let backend = config.backend();
    let mut state = TrajectoryState {
        field: u0.clone(),
        t: 0.0,
        window_index: 0,
        local_t: 0.0,
        e0_window_start: energy_e0(u0, params),
    };
    let mut rec = Recorder {
        params,
        records: Vec::new(),
        limit: config.blowup_factor * u0.linf_norm(),
    };
    rec.push(&state);
    observer(&state, 0)?;
    let mut steps = 0;
    while config.t_end - state.t > eps {
        let horizon = (window - state.local_t).min(config.t_end - state.t);
        let sol = picard_solve(&state.field, horizon, &config.picard, params, backend)?;
        let t0 = state.t;
        let local0 = state.local_t;
        for (i, (tn, f)) in sol.nodes.iter().zip(&sol.fields).enumerate().skip(1) {
            state.field = f.clone();
            state.t = t0 + tn;
            state.local_t = local0 + tn;
            steps += 1;
            rec.guard(&state)?;
            let last = i + 1 == sol.nodes.len();
            if !last && i % config.diagnostics_every == 0 {
                rec.push(&state);
            }
            observer(&state, steps)?;
        }
        let at_seam = window - state.local_t <= eps;
        if at_seam {
            state.local_t = window;
        }
        if at_seam && config.t_end - state.t > eps {
            rebase(&mut state, &mut rec, params);
        } else {
            rec.push(&state);
        }
    }
    Ok(Trajectory {
        final_state: state,
        records: rec.records,
        steps,
    })
}

/// Composite trapezoid weights on sorted nodes.
pub fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![0.0; n];
    for i in 0..n.saturating_sub(1) {
        let h = 0.5 * (nodes[i + 1] - nodes[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// Discrete workspace distance
/// `||d||_{L^gamma L^rho} + || |J d| ||_{L^gamma L^rho} + || |H d| ||_{L^gamma L^rho}`,
/// `d = u - v`, with `J`, `H` evaluated at each node time.
pub fn workspace_distance(
    u: &[ComplexField],
    v: &[ComplexField],
    nodes: &[f64],
    rho: f64,
    omega: f64,
) -> Result<f64> {
    if u.len() != v.len() || u.len() != nodes.len() {
        return Err(GpeError::GridMismatch(format!(
            "trajectories with {} and {} fields on {} nodes",
            u.len(),
            v.len(),
            nodes.len()
        )));
    }
    if let Some(i) = (0..u.len()).find(|&i| u[i].grid() != v[i].grid()) {
        return Err(GpeError::GridMismatch(format!("node {i} lives on different grids")));
    }
    let gamma = strichartz_exponent(rho)?;
    if gamma.is_infinite() {
        return Err(GpeError::InvalidExponent(rho));
    }
    let w = trapezoid_weights(nodes);
    let norms: Vec<[f64; 3]> = (0..u.len())
        .into_par_iter()
        .map(|i| {
            let d = u[i].sub(&v[i]);
            let grad = d.gradient();
            let (j, h) = apply_j_and_h(&d, &grad, omega, nodes[i]);
            [
                d.lp_norm(rho),
                vector_modulus(&j).lp_norm(rho),
                vector_modulus(&h).lp_norm(rho),
            ]
        })
        .collect();
    let mut total = 0.0;
    for k in 0..3 {
        let s: f64 = norms.iter().zip(&w).map(|(n, wi)| wi * n[k].powf(gamma)).sum();
        total += s.powf(1.0 / gamma);
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    pub nodes: Vec<f64>,
    pub fields: Vec<ComplexField>,
    /// Workspace distance between consecutive iterates.
    pub distances: Vec<f64>,
    /// `distances[k+1] / distances[k]`.
    pub ratios: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn duhamel(
    free: &[ComplexField],
    current: &[ComplexField],
    plan: &PropagatorPlan,
    beta: f64,
) -> Result<Vec<ComplexField>> {
    let delta = plan.t();
    let half = Complex64::new(0.5 * delta, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let forcing: Vec<ComplexField> = current
        .par_iter()
        .map(|u| u.map(|z| z * z.norm_sqr()))
        .collect();
    let mut out = Vec::with_capacity(free.len());
    out.push(free[0].clone());
    let mut integral = ComplexField::zeros(*free[0].grid());
    for i in 1..free.len() {
        // I_i = S(delta) [I_{i-1} + delta/2 F_{i-1}] + delta/2 F_i
        let carried = plan.apply(&integral.combine(one, &forcing[i - 1], half))?;
        integral = carried.combine(one, &forcing[i], half);
        out.push(free[i].combine(one, &integral, -I * beta));
    }
    Ok(out)
}

/// Fixed-point iteration of `u(t) = S(t) u0 - i beta int_0^t S(t - s) |u|^2 u(s) ds`
/// on `quad_nodes + 1` equispaced nodes of `[0, horizon]`, starting from the free evolution.
pub fn picard_solve(
    u0: &ComplexField,
    horizon: f64,
    config: &PicardConfig,
    params: &PhysicsParams,
    backend: Backend,
) -> Result<PicardResult> {
    config.validate()?;
    let window = params.window();
    if !(horizon > 0.0 && horizon <= window * (1.0 + 1e-12)) {
        return Err(GpeError::WindowViolation { t: horizon, window });
    }
    let n = config.quad_nodes;
    let delta = horizon / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| i as f64 * delta).collect();
    let plan = PropagatorPlan::new(params.omega(), delta, backend)?;
    let mut free = Vec::with_capacity(n + 1);
    free.push(u0.clone());
    for i in 1..=n {
        free.push(plan.apply(&free[i - 1])?);
    }
    let mut current = free.clone();
    let mut distances = Vec::new();
    let mut ratios = Vec::new();
    let mut growing = 0;
    for it in 1..=config.max_iter {
        let next = duhamel(&free, &current, &plan, params.beta())?;
        let d = workspace_distance(&next, &current, &nodes, config.rho, params.omega())?;
        if let Some(&prev) = distances.last() {
            let r: f64 = if prev > 0.0 { d / prev } else { 0.0 };
            ratios.push(r);
            growing = if r >= 1.0 { growing + 1 } else { 0 };
        }
        distances.push(d);
        current = next;
        log::debug!("picard iteration {it}: distance {d:.3e}");
        if d < config.tol {
            return Ok(PicardResult {
                nodes,
                fields: current,
                distances,
                ratios,
                iterations: it,
                converged: true,
            });
        }
        if growing >= 3 {
            return Err(GpeError::NoContraction { ratios });
        }
    }
    log::warn!(
        "picard stopped after {} iterations at distance {:.3e}",
        config.max_iter,
        distances.last().copied().unwrap_or(0.0)
    );
    Ok(PicardResult {
        nodes,
        fields: current,
        distances,
        ratios,
        iterations: config.max_iter,
        converged: false,
    })
}
