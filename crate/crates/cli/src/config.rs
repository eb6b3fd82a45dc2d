//! JSON run configuration. Every section is parsed into optional raw fields
//! first so that a missing or out-of-range value is reported by its path.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rotor_gpe::oracle::{make_state, AnalyticState, StateKind};
use rotor_gpe::snapshot::read_snapshot;
use rotor_gpe::solver::{PicardConfig, Scheme, SolverConfig};
use rotor_gpe::{ComplexField, GpeError, GridSpec, PhysicsParams, Result};
use serde::{Deserialize, Serialize};

fn invalid(path: &str, reason: impl Into<String>) -> GpeError {
    GpeError::config(path, reason)
}

fn required<T>(v: Option<T>, path: &str) -> Result<T> {
    v.ok_or_else(|| invalid(path, "missing required value"))
}

fn positive(v: f64, path: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(path, format!("must be a positive number, got {v}")))
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: Option<RawGrid>,
    physics: Option<RawPhysics>,
    initial: Option<RawInitial>,
    evolve: Option<RawEvolve>,
    output: Option<RawOutput>,
    seed: Option<u64>,
    verify: Option<RawVerify>,
    dispersive: Option<RawDispersive>,
    compare: Option<RawCompare>,
    convergence: Option<RawConvergence>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Option<usize>,
    extent: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhysics {
    omega: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(rename = "type")]
    kind: Option<String>,
    params: Option<RawInitialParams>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitialParams {
    displacement: Option<[f64; 3]>,
    momentum: Option<[f64; 3]>,
    phase: Option<f64>,
    path: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvolve {
    scheme: Option<Scheme>,
    dt: Option<f64>,
    t_end: Option<f64>,
    substeps: Option<usize>,
    picard: Option<RawPicard>,
    diagnostics_every: Option<usize>,
    blowup_factor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPicard {
    rho: Option<f64>,
    gamma: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    quad_nodes: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    snapshot_every: Option<usize>,
    diagnostics_every: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVerify {
    tolerance_scale: Option<f64>,
    horizon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDispersive {
    grid: Option<RawGrid>,
    pairs: Option<Vec<[f64; 2]>>,
    k_flat: Option<f64>,
    k_cut: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCompare {
    grid: Option<RawGrid>,
    times: Option<Vec<f64>>,
    substeps: Option<Vec<usize>>,
    tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConvergence {
    base_substeps: Option<usize>,
    base_nodes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSection {
    pub n: usize,
    pub extent: f64,
}

impl GridSection {
    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.n, self.extent).expect("validated grid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", content = "params", rename_all = "snake_case")]
pub enum InitialCondition {
    Ground,
    VortexPlus,
    VortexMinus,
    Coherent {
        displacement: [f64; 3],
        momentum: [f64; 3],
        phase: f64,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// Steps between snapshots; 0 writes only the initial and final fields.
    pub snapshot_every: usize,
    pub diagnostics_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifySection {
    /// Multiplies every tolerance of the `verify` table.
    pub tolerance_scale: f64,
    /// Length of the conservation runs.
    pub horizon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersiveSection {
    pub grid: GridSection,
    /// `(t, s)` pairs with `0 < s < t <= pi/(4 omega)`.
    pub pairs: Vec<(f64, f64)>,
    /// Flat part and cut-off of the probe spectrum, as fractions of the Nyquist wavenumber.
    pub k_flat: f64,
    pub k_cut: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareSection {
    pub grid: GridSection,
    pub times: Vec<f64>,
    /// Substep counts to tabulate; empty means calibrate to `tolerance`.
    pub substeps: Vec<usize>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceSection {
    pub base_substeps: usize,
    pub base_nodes: usize,
}

/// A fully validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub grid: GridSection,
    pub physics: PhysicsParams,
    pub initial: InitialCondition,
    pub evolve: SolverConfig,
    pub output: OutputSection,
    pub seed: u64,
    pub verify: VerifySection,
    pub dispersive: DispersiveSection,
    pub compare: CompareSection,
    pub convergence: ConvergenceSection,
}

fn parse_grid(raw: Option<RawGrid>, path: &str, default: Option<GridSection>) -> Result<GridSection> {
    let (n, extent) = match (raw, default) {
        (Some(g), d) => (
            g.n.or(d.map(|d| d.n)),
            g.extent.or(d.map(|d| d.extent)),
        ),
        (None, Some(d)) => (Some(d.n), Some(d.extent)),
        (None, None) => return Err(invalid(path, "missing required section")),
    };
    let n = required(n, &format!("{path}.n"))?;
    let extent = positive(required(extent, &format!("{path}.extent"))?, &format!("{path}.extent"))?;
    GridSpec::new(n, extent).map_err(|e| invalid(&format!("{path}.n"), e.to_string()))?;
    Ok(GridSection { n, extent })
}

fn parse_physics(raw: Option<RawPhysics>) -> Result<PhysicsParams> {
    let raw = raw.ok_or_else(|| invalid("physics", "missing required section"))?;
    let omega = required(raw.omega, "physics.omega")?;
    if !(omega.is_finite() && omega >= 1.0) {
        return Err(invalid("physics.omega", format!("must be >= 1, got {omega}")));
    }
    let beta = required(raw.beta, "physics.beta")?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(invalid("physics.beta", format!("must be >= 0, got {beta}")));
    }
    PhysicsParams::new(omega, beta).map_err(|e| invalid("physics", e.to_string()))
}

fn parse_initial(raw: Option<RawInitial>, base: &Path) -> Result<InitialCondition> {
    let raw = raw.ok_or_else(|| invalid("initial", "missing required section"))?;
    let kind = required(raw.kind, "initial.type")?;
    let p = raw.params.unwrap_or_default();
    let no_params = |name: &str| -> Result<()> {
        if p.displacement.is_some() || p.momentum.is_some() || p.phase.is_some() || p.path.is_some() {
            return Err(invalid("initial.params", format!("type `{name}` takes no parameters")));
        }
        Ok(())
    };
    let finite3 = |v: [f64; 3], path: &str| -> Result<[f64; 3]> {
        if v.iter().all(|x| x.is_finite()) {
            Ok(v)
        } else {
            Err(invalid(path, "entries must be finite"))
        }
    };
    match kind.as_str() {
        "ground" => no_params("ground").map(|_| InitialCondition::Ground),
        "vortex_plus" => no_params("vortex_plus").map(|_| InitialCondition::VortexPlus),
        "vortex_minus" => no_params("vortex_minus").map(|_| InitialCondition::VortexMinus),
        "coherent" => {
            if p.path.is_some() {
                return Err(invalid("initial.params.path", "only valid for type `file`"));
            }
            let phase = p.phase.unwrap_or(0.0);
            if !phase.is_finite() {
                return Err(invalid("initial.params.phase", "must be finite"));
            }
            Ok(InitialCondition::Coherent {
                displacement: finite3(p.displacement.unwrap_or([0.0; 3]), "initial.params.displacement")?,
                momentum: finite3(p.momentum.unwrap_or([0.0; 3]), "initial.params.momentum")?,
                phase,
            })
        }
        "file" => {
            let path = required(p.path, "initial.params.path")?;
            let path = if path.is_relative() { base.join(path) } else { path };
            Ok(InitialCondition::File { path })
        }
        other => Err(invalid(
            "initial.type",
            format!("unknown type `{other}`; expected ground, vortex_plus, vortex_minus, coherent or file"),
        )),
    }
}

fn parse_picard(raw: Option<RawPicard>) -> Result<PicardConfig> {
    let raw = raw.unwrap_or_default();
    let d = PicardConfig::default();
    let cfg = PicardConfig {
        rho: raw.rho.unwrap_or(d.rho),
        tol: raw.tol.unwrap_or(d.tol),
        max_iter: raw.max_iter.unwrap_or(d.max_iter),
        quad_nodes: raw.quad_nodes.unwrap_or(d.quad_nodes),
    };
    if !(cfg.rho > 2.0 && cfg.rho < 6.0) {
        return Err(invalid("evolve.picard.rho", format!("must lie in (2, 6), got {}", cfg.rho)));
    }
    if let Some(g) = raw.gamma {
        if (g - cfg.gamma()).abs() > 1e-9 * cfg.gamma() {
            return Err(invalid(
                "evolve.picard.gamma",
                format!("must equal 4 rho / (3 (rho - 2)) = {} for rho = {}", cfg.gamma(), cfg.rho),
            ));
        }
    }
    positive(cfg.tol, "evolve.picard.tol")?;
    if cfg.max_iter == 0 {
        return Err(invalid("evolve.picard.max_iter", "must be >= 1"));
    }
    if cfg.quad_nodes < 8 {
        return Err(invalid("evolve.picard.quad_nodes", "must be >= 8"));
    }
    Ok(cfg)
}

fn parse_evolve(raw: Option<RawEvolve>, diagnostics_every: usize) -> Result<SolverConfig> {
    let raw = raw.ok_or_else(|| invalid("evolve", "missing required section"))?;
    let d = SolverConfig::default();
    let dt = positive(required(raw.dt, "evolve.dt")?, "evolve.dt")?;
    let t_end = positive(required(raw.t_end, "evolve.t_end")?, "evolve.t_end")?;
    if raw.substeps == Some(0) {
        return Err(invalid("evolve.substeps", "must be >= 1 (omit for the exact oscillator flow)"));
    }
    if let Some(e) = raw.diagnostics_every {
        if e != diagnostics_every {
            return Err(invalid(
                "evolve.diagnostics_every",
                format!("conflicts with output.diagnostics_every = {diagnostics_every}"),
            ));
        }
    }
    let blowup_factor = raw.blowup_factor.unwrap_or(d.blowup_factor);
    if !(blowup_factor > 1.0 && blowup_factor.is_finite()) {
        return Err(invalid("evolve.blowup_factor", "must be > 1"));
    }
    let cfg = SolverConfig {
        scheme: raw.scheme.unwrap_or(d.scheme),
        dt,
        t_end,
        substeps: raw.substeps,
        picard: parse_picard(raw.picard)?,
        diagnostics_every,
        blowup_factor,
    };
    cfg.validate().map_err(|e| invalid("evolve", e.to_string()))?;
    Ok(cfg)
}

fn parse_output(raw: Option<RawOutput>, base: &Path) -> Result<OutputSection> {
    let raw = raw.ok_or_else(|| invalid("output", "missing required section"))?;
    let dir = required(raw.dir, "output.dir")?;
    let dir = if dir.is_relative() { base.join(dir) } else { dir };
    let diagnostics_every = raw.diagnostics_every.unwrap_or(SolverConfig::default().diagnostics_every);
    if diagnostics_every == 0 {
        return Err(invalid("output.diagnostics_every", "must be >= 1"));
    }
    Ok(OutputSection {
        dir,
        snapshot_every: raw.snapshot_every.unwrap_or(0),
        diagnostics_every,
    })
}

fn default_pairs(omega: f64) -> Vec<(f64, f64)> {
    (0..10)
        .map(|i| {
            let tau = 0.08 * 10f64.powf(i as f64 / 9.0) / omega;
            (0.75 * tau, 0.25 * tau)
        })
        .collect()
}

fn parse_dispersive(raw: Option<RawDispersive>, omega: f64) -> Result<DispersiveSection> {
    let raw = raw.unwrap_or_default();
    let grid = parse_grid(
        raw.grid,
        "dispersive.grid",
        Some(GridSection { n: 128, extent: 10.5 / omega.sqrt() }),
    )?;
    let window = PI / (4.0 * omega);
    let pairs = match raw.pairs {
        Some(p) => p.into_iter().map(|[t, s]| (t, s)).collect(),
        None => default_pairs(omega),
    };
    for (i, &(t, s)) in pairs.iter().enumerate() {
        if !(s > 0.0 && s < t && t <= window) {
            return Err(invalid(
                &format!("dispersive.pairs[{i}]"),
                format!("need 0 < s < t <= {window}, got ({t}, {s})"),
            ));
        }
    }
    let k_flat = raw.k_flat.unwrap_or(0.3);
    let k_cut = raw.k_cut.unwrap_or(0.9);
    if !(k_flat >= 0.0 && k_flat < k_cut) {
        return Err(invalid("dispersive.k_flat", "need 0 <= k_flat < k_cut"));
    }
    if !(k_cut <= 1.0) {
        return Err(invalid("dispersive.k_cut", "must not exceed 1 (the Nyquist wavenumber)"));
    }
    Ok(DispersiveSection { grid, pairs, k_flat, k_cut })
}

fn parse_compare(raw: Option<RawCompare>, omega: f64) -> Result<CompareSection> {
    let raw = raw.unwrap_or_default();
    let grid = parse_grid(
        raw.grid,
        "compare.grid",
        Some(GridSection { n: 24, extent: 6.0 / omega.sqrt() }),
    )?;
    if grid.n > rotor_gpe::propagator::ORACLE_GRID_CAP {
        return Err(invalid(
            "compare.grid.n",
            format!("the kernel quadrature is capped at n = {}", rotor_gpe::propagator::ORACLE_GRID_CAP),
        ));
    }
    let window = PI / (4.0 * omega);
    let times = raw
        .times
        .unwrap_or_else(|| (1..=4).map(|i| i as f64 * window / 4.0).collect());
    for (i, &t) in times.iter().enumerate() {
        if !(t > 0.0 && t <= window) {
            return Err(invalid(&format!("compare.times[{i}]"), format!("need 0 < t <= {window}")));
        }
    }
    let substeps = raw.substeps.unwrap_or_default();
    if let Some(i) = substeps.iter().position(|&m| m == 0) {
        return Err(invalid(&format!("compare.substeps[{i}]"), "must be >= 1"));
    }
    let tolerance = positive(raw.tolerance.unwrap_or(1e-6), "compare.tolerance")?;
    Ok(CompareSection { grid, times, substeps, tolerance })
}

fn parse_verify(raw: Option<RawVerify>, window: f64) -> Result<VerifySection> {
    let raw = raw.unwrap_or_default();
    let scale = raw.tolerance_scale.unwrap_or(1.0);
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(invalid("verify.tolerance_scale", "must be >= 0"));
    }
    let horizon = positive(raw.horizon.unwrap_or(window / 4.0), "verify.horizon")?;
    Ok(VerifySection { tolerance_scale: scale, horizon })
}

fn parse_convergence(raw: Option<RawConvergence>) -> Result<ConvergenceSection> {
    let raw = raw.unwrap_or_default();
    let base_substeps = raw.base_substeps.unwrap_or(4);
    if base_substeps == 0 {
        return Err(invalid("convergence.base_substeps", "must be >= 1"));
    }
    let base_nodes = raw.base_nodes.unwrap_or(16);
    if base_nodes < 8 {
        return Err(invalid("convergence.base_nodes", "must be >= 8"));
    }
    Ok(ConvergenceSection { base_substeps, base_nodes })
}

impl RunConfig {
    /// Parses and validates a JSON document; relative paths resolve against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." { "(root)".to_string() } else { path };
            invalid(&path, e.into_inner().to_string())
        })?;
        let grid = parse_grid(raw.grid, "grid", None)?;
        let physics = parse_physics(raw.physics)?;
        let initial = parse_initial(raw.initial, base)?;
        let output = parse_output(raw.output, base)?;
        let evolve = parse_evolve(raw.evolve, output.diagnostics_every)?;
        let omega = physics.omega();
        Ok(RunConfig {
            grid,
            physics,
            initial,
            evolve,
            output,
            seed: raw.seed.unwrap_or(0),
            verify: parse_verify(raw.verify, physics.window())?,
            dispersive: parse_dispersive(raw.dispersive, omega)?,
            compare: parse_compare(raw.compare, omega)?,
            convergence: parse_convergence(raw.convergence)?,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| GpeError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_json(&text, base)
    }

    /// Desk-scale defaults used by `verify` without a config file.
    pub fn desk_default() -> Self {
        let text = r#"{
            "grid": {"n": 48, "extent": 8.0},
            "physics": {"omega": 1.0, "beta": 1.0},
            "initial": {"type": "coherent", "params": {"displacement": [0.5, 0.0, 0.3], "momentum": [0.0, 0.5, 0.2]}},
            "evolve": {"scheme": "strang", "dt": 0.001, "t_end": 0.7853981633974483},
            "output": {"dir": "rotor-gpe-out"}
        }"#;
        Self::from_json(text, Path::new(".")).expect("built-in defaults are valid")
    }

    pub fn grid_spec(&self) -> GridSpec {
        self.grid.spec()
    }

    /// Initial field on `grid` (reported as `grid_path` in errors); snapshot
    /// files must match the grid exactly.
    pub fn initial_field_on(&self, grid: GridSpec, grid_path: &str) -> Result<ComplexField> {
        let omega = self.physics.omega();
        let analytic = |kind| AnalyticState::new(kind, omega);
        let state = match &self.initial {
            InitialCondition::Ground => analytic(StateKind::Ground),
            InitialCondition::VortexPlus => analytic(StateKind::VortexPlus),
            InitialCondition::VortexMinus => analytic(StateKind::VortexMinus),
            InitialCondition::Coherent { displacement, momentum, phase } => AnalyticState {
                phase: *phase,
                ..AnalyticState::coherent(omega, *displacement, *momentum)
            },
            InitialCondition::File { path } => {
                let (field, meta) = read_snapshot(path)?;
                if meta.n != grid.n() || meta.extent != grid.extent() {
                    return Err(invalid(
                        "initial.params.path",
                        format!(
                            "snapshot grid (n = {}, extent = {}) differs from (n = {}, extent = {})",
                            meta.n,
                            meta.extent,
                            grid.n(),
                            grid.extent()
                        ),
                    ));
                }
                return Ok(field);
            }
        };
        make_state(&state, grid).map_err(|e| match e {
            GpeError::ResolutionTooLow(msg) => invalid(grid_path, msg),
            other => other,
        })
    }

    pub fn initial_field(&self) -> Result<ComplexField> {
        self.initial_field_on(self.grid_spec(), "grid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> serde_json::Value {
        serde_json::json!({
            "grid": {"n": 16, "extent": 8.0},
            "physics": {"omega": 1.0, "beta": 0.0},
            "initial": {"type": "ground"},
            "evolve": {"dt": 0.01, "t_end": 0.1},
            "output": {"dir": "out"}
        })
    }

    fn parse(v: &serde_json::Value) -> Result<RunConfig> {
        RunConfig::from_json(&v.to_string(), Path::new("/base"))
    }

    fn error_path(v: &serde_json::Value) -> String {
        match parse(v) {
            Err(GpeError::ConfigInvalid { path, .. }) => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let c = parse(&minimal()).unwrap();
        assert_eq!(c.grid, GridSection { n: 16, extent: 8.0 });
        assert_eq!(c.evolve.scheme, Scheme::Strang);
        assert_eq!(c.evolve.substeps, None);
        assert_eq!(c.output.dir, PathBuf::from("/base/out"));
        assert_eq!(c.seed, 0);
        assert_eq!(c.verify.tolerance_scale, 1.0);
        assert_eq!(c.dispersive.pairs.len(), 10);
        assert_eq!(c.compare.grid.n, 24);
    }

    #[test]
    fn missing_values_name_their_path() {
        let mut v = minimal();
        v["physics"].as_object_mut().unwrap().remove("omega");
        assert_eq!(error_path(&v), "physics.omega");
        let mut v = minimal();
        v.as_object_mut().unwrap().remove("evolve");
        assert_eq!(error_path(&v), "evolve");
        let mut v = minimal();
        v["grid"].as_object_mut().unwrap().remove("extent");
        assert_eq!(error_path(&v), "grid.extent");
    }

    #[test]
    fn out_of_range_values_name_their_path() {
        let cases = [
            ("/physics/omega", serde_json::json!(0.5), "physics.omega"),
            ("/physics/beta", serde_json::json!(-1.0), "physics.beta"),
            ("/evolve/dt", serde_json::json!(0.0), "evolve.dt"),
            ("/grid/n", serde_json::json!(15), "grid.n"),
            ("/initial/type", serde_json::json!("soliton"), "initial.type"),
        ];
        for (ptr, value, path) in cases {
            let mut v = minimal();
            *v.pointer_mut(ptr).unwrap() = value;
            assert_eq!(error_path(&v), path, "{ptr}");
        }
        let mut v = minimal();
        v["evolve"]["picard"] = serde_json::json!({"rho": 6.0});
        assert_eq!(error_path(&v), "evolve.picard.rho");
        let mut v = minimal();
        v["evolve"]["picard"] = serde_json::json!({"rho": 4.0, "gamma": 2.0});
        assert_eq!(error_path(&v), "evolve.picard.gamma");
        let mut v = minimal();
        v["dispersive"] = serde_json::json!({"pairs": [[0.1, 0.2]]});
        assert_eq!(error_path(&v), "dispersive.pairs[0]");
    }

    #[test]
    fn type_errors_and_unknown_fields_carry_paths() {
        let mut v = minimal();
        v["grid"]["n"] = serde_json::json!("sixteen");
        assert_eq!(error_path(&v), "grid.n");
        let mut v = minimal();
        v["physics"]["omgea"] = serde_json::json!(1.0);
        assert_eq!(error_path(&v), "physics.omgea");
    }

    #[test]
    fn diagnostics_interval_must_agree() {
        let mut v = minimal();
        v["output"]["diagnostics_every"] = serde_json::json!(5);
        v["evolve"]["diagnostics_every"] = serde_json::json!(7);
        assert_eq!(error_path(&v), "evolve.diagnostics_every");
        v["evolve"]["diagnostics_every"] = serde_json::json!(5);
        assert_eq!(parse(&v).unwrap().evolve.diagnostics_every, 5);
    }

    #[test]
    fn coherent_parameters() {
        let mut v = minimal();
        v["initial"] = serde_json::json!({"type": "coherent", "params": {"displacement": [1.0, 0.0, 0.0]}});
        let c = parse(&v).unwrap();
        assert_eq!(
            c.initial,
            InitialCondition::Coherent { displacement: [1.0, 0.0, 0.0], momentum: [0.0; 3], phase: 0.0 }
        );
        v["initial"] = serde_json::json!({"type": "ground", "params": {"phase": 1.0}});
        assert_eq!(error_path(&v), "initial.params");
    }

    #[test]
    fn desk_default_is_valid() {
        let c = RunConfig::desk_default();
        assert_eq!(c.grid.n, 48);
        assert!(c.initial_field().unwrap().l2_norm() > 0.99);
    }
}
