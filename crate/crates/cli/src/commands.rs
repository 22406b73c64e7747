//! One parameter set and pipeline per subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use zenograv_core::decoherence::{decoherence_sweep, mean_free_path, sweep_csv, total_decoherence, Environment, LogAxis};
use zenograv_core::feasibility::{evaluate_point, region_csv, sweep_region, t_r_window, Axis, ExperimentPoint, RegionAxis, Verdict};
use zenograv_core::massdist::{make_superposed_source, sphere_mass};
use zenograv_core::scatter::{
    collapsed_scatter, collapsed_sources, high_deflection_clusters, integrate_trajectory, rutherford_angle, scan_pattern,
    stereographic_project, Coin, PatternGrid, ScatterConfig,
};
use zenograv_core::schrod1d::{classify_ground_state, potential_gradient, solve_eigen, GridSpec, PotentialSpec1D};
use zenograv_core::table::{num, Csv};
use zenograv_core::units::HBAR;
use zenograv_core::zeno::{
    loglog_slope, pure_state, zeno_rate_bounds, zeno_scan, zeno_scan_csv, zeno_time_estimate, zeno_time_for_state,
    BipartiteSystem, ModelFile, C64,
};

use crate::config::{CliError, Command, RunConfig};
use crate::output::{header_text, Artifact};

pub struct Run {
    pub artifacts: Vec<Artifact>,
    pub summary: String,
}

/// Resolved config as embedded in every output: command, seed and the full
/// parameter set with defaults filled in.
struct Context {
    config: Value,
    header: String,
    seed: u64,
}

trait Params: Serialize + DeserializeOwned + Default {
    /// `key [unit]` list shown with validation errors.
    const KEYS: &'static str;
    fn run(&self, ctx: &Context) -> Result<Run, CliError>;
}

pub fn execute(cfg: &RunConfig) -> Result<Run, CliError> {
    match cfg.command {
        Command::Scatter => dispatch::<ScatterParams>(cfg),
        Command::Pattern => dispatch::<PatternParams>(cfg),
        Command::Eigen => dispatch::<EigenParams>(cfg),
        Command::Zeno => dispatch::<ZenoParams>(cfg),
        Command::Decoherence => dispatch::<DecoherenceParams>(cfg),
        Command::Feasibility => dispatch::<FeasibilityParams>(cfg),
        Command::Report => dispatch::<ReportParams>(cfg),
    }
}

/// Overlay `patch` on `base`, recursing into objects so partial nested
/// maps keep the remaining defaults.
fn merge(base: &mut Value, patch: &Map<String, Value>) {
    let Value::Object(obj) = base else {
        *base = Value::Object(patch.clone());
        return;
    };
    for (k, v) in patch {
        match (obj.get_mut(k), v) {
            (Some(slot @ Value::Object(_)), Value::Object(p)) => merge(slot, p),
            _ => {
                obj.insert(k.clone(), v.clone());
            }
        }
    }
}

fn dispatch<P: Params>(cfg: &RunConfig) -> Result<Run, CliError> {
    let mut resolved = serde_json::to_value(P::default()).expect("defaults serialize");
    merge(&mut resolved, &cfg.params);
    let params: P = serde_json::from_value(resolved)
        .map_err(|e| CliError::Validation(format!("{e}\naccepted keys for `{}`: {}", cfg.command.name(), P::KEYS)))?;
    let config = json!({
        "command": cfg.command.name(),
        "seed": cfg.seed,
        "params": params,
    });
    let ctx = Context { header: header_text(&config), config, seed: cfg.seed };
    params.run(&ctx)
}


fn files(artifacts: &[Artifact]) -> String {
    artifacts.iter().map(|a| a.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn positive(name: &str, unit: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{name} must be > 0 {unit}, got {x}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SourceKind {
    Superposed,
    Collapsed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ScatterParams {
    radius: f64,
    density: f64,
    separation: f64,
    t_r: f64,
    beta: f64,
    l: f64,
    m_probe: f64,
    source: SourceKind,
    /// Collapsed branch; drawn from the seed when absent.
    coin: Option<Coin>,
    rtol: f64,
    z_start: Option<f64>,
    r_stop: Option<f64>,
    t_max: Option<f64>,
}

impl Default for ScatterParams {
    fn default() -> Self {
        Self {
            radius: 1e-5,
            density: 2600.0,
            separation: 2e-5,
            t_r: 10f64.powf(1.1),
            beta: 1.2,
            l: 0.0,
            m_probe: 1e-18,
            source: SourceKind::Superposed,
            coin: None,
            rtol: 1e-9,
            z_start: None,
            r_stop: None,
            t_max: None,
        }
    }
}

impl Params for ScatterParams {
    const KEYS: &'static str = "radius [m], density [kg/m^3], separation d [m], t_r = R/v [s], beta (b = beta*R), \
        l [m], m_probe [kg], source (superposed|collapsed), coin (left|right, default drawn from --seed), \
        rtol, z_start [m], r_stop [m], t_max [s]";

    fn run(&self, ctx: &Context) -> Result<Run, CliError> {
        positive("t_r", "s", self.t_r)?;
        positive("beta", "", self.beta)?;
        positive("m_probe", "kg", self.m_probe)?;
        let frozen = make_superposed_source(self.radius, self.density, self.separation)?;
        let v = self.radius / self.t_r;
        let b = self.beta * self.radius;
        let mut cfg = ScatterConfig::for_source(&frozen, b, self.l, v);
        cfg.rtol = self.rtol;
        if self.z_start.is_some() || self.r_stop.is_some() {
            cfg = cfg.with_range(self.z_start.unwrap_or(cfg.z_start), self.r_stop.unwrap_or(cfg.r_stop));
        }
        if let Some(t) = self.t_max {
            cfg.t_max = t;
        }
        cfg.validate()?;
        let (traj, coin, used) = match self.source {
            SourceKind::Superposed => (integrate_trajectory(&frozen, &cfg, self.m_probe)?, None, frozen.clone()),
            SourceKind::Collapsed => {
                let coin = self.coin.unwrap_or_else(|| {
                    if ChaCha8Rng::seed_from_u64(ctx.seed).random_bool(0.5) { Coin::Left } else { Coin::Right }
                });
                let (left, right) = collapsed_sources(self.radius, self.density, self.separation)?;
                let traj = collapsed_scatter(&left, &right, &cfg, self.m_probe, coin)?;
                (traj, Some(coin), if coin == Coin::Left { left } else { right })
            }
        };
        let reference = rutherford_angle(frozen.total_mass(), v, b.hypot(self.l));
        let proj = stereographic_project(&traj.outgoing_dir).ok();

        let mut csv = Csv::new(Some(&ctx.header), &["t", "x", "y", "z", "vx", "vy", "vz"]);
        for s in &traj.samples {
            csv.row([num(s.t), num(s.x[0]), num(s.x[1]), num(s.x[2]), num(s.v[0]), num(s.v[1]), num(s.v[2])]);
        }
        let drift = traj.max_relative_energy_drift(&used, self.m_probe);
        let artifacts = vec![
            Artifact::new("scatter_trajectory.csv", csv.finish()),
            Artifact::json(
                "scatter.json",
                &ctx.config,
                json!({
                    "coin": coin,
                    "v": v,
                    "b": b,
                    "config_used": cfg,
                    "theta": traj.deflection_angle,
                    "theta_point_mass_reference": reference,
                    "outgoing_dir": [traj.outgoing_dir[0], traj.outgoing_dir[1], traj.outgoing_dir[2]],
                    "projection": proj.map(|p| [p[0], p[1]]),
                    "hit_source": traj.hit_source,
                    "n_samples": traj.samples.len(),
                    "max_relative_energy_drift": drift,
                }),
            ),
        ];
        let src = match coin {
            Some(Coin::Left) => "collapsed-left",
            Some(Coin::Right) => "collapsed-right",
            None => "superposed",
        };
        let summary = format!(
            "scatter: source {src}, theta {:.4e} rad (point-mass reference {reference:.4e}), hit {}, {} samples -> {}",
            traj.deflection_angle,
            traj.hit_source,
            traj.samples.len(),
            files(&artifacts)
        );
        Ok(Run { artifacts, summary })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct PatternParams {
    radius: f64,
    density: f64,
    separation: f64,
    t_r: f64,
    m_probe: f64,
    beta_min: f64,
    beta_max: f64,
    n_b: usize,
    l_min: f64,
    l_max: f64,
    n_l: usize,
    mirror_l: bool,
    dashed: bool,
    cluster_fraction: f64,
}

impl Default for PatternParams {
    fn default() -> Self {
        Self {
            radius: 1e-5,
            density: 2600.0,
            separation: 2e-5,
            t_r: 10f64.powf(1.1),
            m_probe: 1e-18,
            beta_min: 1.2,
            beta_max: 2.0,
            n_b: 40,
            l_min: 0.0,
            l_max: 2e-5,
            n_l: 40,
            mirror_l: true,
            dashed: true,
            cluster_fraction: 0.9,
        }
    }
}

impl Params for PatternParams {
    const KEYS: &'static str = "radius [m], density [kg/m^3], separation d [m] (0 = single sphere), t_r [s], m_probe [kg], \
        beta_min, beta_max, n_b, l_min [m], l_max [m], n_l, mirror_l (bool), dashed (bool), cluster_fraction (0..1]";

    fn run(&self, ctx: &Context) -> Result<Run, CliError> {
        positive("t_r", "s", self.t_r)?;
        if !(self.cluster_fraction > 0.0 && self.cluster_fraction <= 1.0) {
            return Err(CliError::Validation(format!("cluster_fraction must be in (0, 1], got {}", self.cluster_fraction)));
        }
        let dist = make_superposed_source(self.radius, self.density, self.separation)?;
        let grid = PatternGrid {
            beta_min: self.beta_min,
            beta_max: self.beta_max,
            n_b: self.n_b,
            l_min: self.l_min,
            l_max: self.l_max,
            n_l: self.n_l,
            mirror_l: self.mirror_l,
        };
        let v = self.radius / self.t_r;
        let pattern = scan_pattern(&dist, &grid, v, self.m_probe)?;
        let theta_edge = rutherford_angle(dist.total_mass(), v, self.beta_min * self.radius);
        let dashed = 2.0 * (0.5 * theta_edge).tan();
        let clusters = high_deflection_clusters(&pattern, self.cluster_fraction);
        let artifacts = vec![
            Artifact::new("pattern.csv", pattern.to_csv(Some(&ctx.header))),
            Artifact::new("pattern.svg", pattern.to_svg(Some(&ctx.header), self.dashed.then_some(dashed))),
            Artifact::json(
                "pattern.json",
                &ctx.config,
                json!({
                    "projection": pattern.projection_pole.describe(),
                    "n_probes": pattern.points.len(),
                    "n_hit": pattern.n_hit,
                    "n_failed": pattern.n_failed,
                    "max_proj_radius": pattern.max_proj_radius(),
                    "dashed_theta": theta_edge,
                    "dashed_radius": dashed,
                    "high_deflection_clusters": clusters.len(),
                }),
            ),
        ];
        let summary = format!(
            "pattern: {} probes, {} hits, {} failed, max |proj| {:.4e} vs dashed {dashed:.4e}, {} high-deflection clusters -> {}",
            pattern.points.len(),
            pattern.n_hit,
            pattern.n_failed,
            pattern.max_proj_radius(),
            clusters.len(),
            files(&artifacts)
        );
        Ok(Run { artifacts, summary })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct EigenParams {
    a: f64,
    b: f64,
    c: f64,
    mass: f64,
    d: f64,
    x_min: f64,
    x_max: f64,
    n_points: usize,
    n_states: usize,
}

impl Default for EigenParams {
    fn default() -> Self {
        let g = GridSpec::default();
        Self { a: 1.0, b: 4.0, c: 1.0, mass: 1e-11, d: 1e-5, x_min: g.x_min, x_max: g.x_max, n_points: g.n_points, n_states: 4 }
    }
}

impl Params for EigenParams {
    const KEYS: &'static str = "a, b, c (V = a x^2 - b x^4 + c x^6 in units of V0 = hbar^2/(2 M d^2)), mass M [kg], \
        d [m], x_min, x_max [units of d], n_points (>= 1000), n_states (>= 1)";

    fn run(&self, ctx: &Context) -> Result<Run, CliError> {
        let spec = PotentialSpec1D::new(self.a, self.b, self.c, self.mass, self.d)?;
        let grid = GridSpec { x_min: self.x_min, x_max: self.x_max, n_points: self.n_points };
        let sol = solve_eigen(&spec, self.n_states, &grid)?;
        let class = if sol.energies_j.len() >= 2 { Some(classify_ground_state(&sol, &spec)?) } else { None };
        let gradient = potential_gradient(&spec, 1.0);
        let artifacts = vec![
            Artifact::new("eigen.csv", sol.to_csv(&spec, Some(&ctx.header))),
            Artifact::json(
                "eigen.json",
                &ctx.config,
                json!({
                    "v0": spec.v0(),
                    "energies_v0": sol.energies_v0,
                    "energies_j": sol.energies_j,
                    "gap_01": sol.gap_01,
                    "gradient_at_d": gradient,
                    "ground_state": class,
                }),
            ),
        ];
        let label = class.as_ref().map_or("unclassified", |c| c.label.as_str());
        let e1 = sol.energies_j.get(1).map_or(String::from("n/a"), |e| format!("{e:.4e} J"));
        let summary = format!(
            "eigen: E0 {:.4e} J ({:.6} V0), E1 {e1}, dV/dx at d {gradient:.4e} J/m, ground state {label} -> {}",
            sol.energies_j[0],
            sol.energies_v0[0],
            files(&artifacts)
        );
        Ok(Run { artifacts, summary })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ZenoParams {
    /// Coupling of the built-in qubit model (J); τ_Z = ħ/g.
    g: f64,
    /// Replaces the built-in model when given.
    model: Option<ModelFile>,
    /// Probe amplitudes as [re, im] pairs, normalized on use.
    probe_state: Vec<[f64; 2]>,
    t_total: f64,
    n_values: Vec<usize>,
    density: f64,
    beta: f64,
    bounds_t_total: f64,
    bounds_radius: LogAxis,
    bounds_m_probe: LogAxis,
}

impl Default for ZenoParams {
    fn default() -> Self {
        Self {
            g: HBAR,
            model: None,
            probe_state: vec![[1.0, 0.0], [0.3, 0.4]],
            t_total: 1.0,
            n_values: vec![10, 32, 100, 316, 1000, 3162, 10000],
            density: 2600.0,
            beta: 1.2,
            bounds_t_total: 100.0,
            bounds_radius: LogAxis { min: 1e-6, max: 1e-3, n: 31 },
            bounds_m_probe: LogAxis { min: 1e-20, max: 1e-14, n: 31 },
        }
    }
}

impl Params for ZenoParams {
    const KEYS: &'static str = "g [J] (built-in qubit model, tau_Z = hbar/g), model {h_p, h_s, h_int [J, rows of [re, im]], phi, \
        require_eigenstate}, probe_state (list of [re, im]), t_total [s], n_values (list of N >= 1), density [kg/m^3], beta, \
        bounds_t_total [s], bounds_radius {min, max [m], n}, bounds_m_probe {min, max [kg], n}";

    fn run(&self, ctx: &Context) -> Result<Run, CliError> {
        let sys = match &self.model {
            Some(m) => BipartiteSystem::try_from(m.clone())?,
            None => {
                positive("g", "J", self.g)?;
                BipartiteSystem::coupled_qubits(self.g)
            }
        };
        if self.probe_state.len() != sys.dim_p() {
            return Err(CliError::Validation(format!(
                "probe_state has {} amplitudes, probe dimension is {}",
                self.probe_state.len(),
                sys.dim_p()
            )));
        }
        let amps: Vec<C64> = self.probe_state.iter().map(|z| C64::new(z[0], z[1])).collect();
        if !amps.iter().any(|z| z.norm() > 0.0) || !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(CliError::Validation("probe_state must be finite and nonzero".into()));
        }
        let rho = pure_state(&amps);
        let rows = zeno_scan(&sys, self.t_total, &self.n_values, &rho)?;
        let tau_z = zeno_time_for_state(&sys, &rho);
        let taus: Vec<f64> = rows.iter().map(|r| r.tau).collect();
        let deficits: Vec<f64> = rows.iter().map(|r| 1.0 - r.survival_sim).collect();
        let slope = if rows.len() >= 2 { loglog_slope(&taus, &deficits) } else { f64::NAN };

        positive("density", "kg/m^3", self.density)?;
        positive("beta", "", self.beta)?;
        positive("bounds_t_total", "s", self.bounds_t_total)?;
        self.bounds_radius.validate("bounds_radius")?;
        self.bounds_m_probe.validate("bounds_m_probe")?;
        let mut bounds = Csv::new(
            Some(&ctx.header),
            &["R", "m_probe", "tau_z", "gamma_dynamics", "gamma_survival", "gamma_required"],
        );
        for r in self.bounds_radius.values() {
            let mass = sphere_mass(r, self.density);
            for m in self.bounds_m_probe.values() {
                let tz = zeno_time_estimate(m, mass, self.beta * r);
                let b = zeno_rate_bounds(tz, self.bounds_t_total);
                bounds.row([num(r), num(m), num(tz), num(b.dynamics), num(b.survival), num(b.combined())]);
            }
        }
        let last = rows.last().copied();
        let artifacts = vec![
            Artifact::new("zeno_scan.csv", zeno_scan_csv(&rows, Some(&ctx.header))),
            Artifact::new("zeno_bounds.csv", bounds.finish()),
            Artifact::json(
                "zeno.json",
                &ctx.config,
                json!({
                    "dim_p": sys.dim_p(),
                    "dim_s": sys.dim_s(),
                    "tau_z": tau_z,
                    "slope_deficit_vs_tau": slope,
                    "rows": rows,
                }),
            ),
        ];
        let summary = format!(
            "zeno: tau_Z {tau_z:.4e} s, slope of 1-p vs tau at fixed t {slope:.4}, finest tau {:.3e} s: survival {:.6}, trace distance {:.2e} -> {}",
            last.map_or(f64::NAN, |r| r.tau),
            last.map_or(f64::NAN, |r| r.survival_sim),
            last.map_or(f64::NAN, |r| r.trace_dist),
            files(&artifacts)
        );
        Ok(Run { artifacts, summary })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct DecoherenceParams {
    pressure: f64,
    t_env: f64,
    t_int: f64,
    eps_re: f64,
    eps_im: f64,
    radius: f64,
    r_probe: f64,
    sweep_radius: LogAxis,
    sweep_pressure: LogAxis,
    sweep_temperature: LogAxis,
    mfp_pressure: LogAxis,
    mfp_r_probe: LogAxis,
}

impl Default for DecoherenceParams {
    fn default() -> Self {
        let env = Environment::default();
        Self {
            pressure: env.pressure,
            t_env: env.t_env,
            t_int: env.t_int,
            eps_re: env.eps_re,
            eps_im: env.eps_im,
            radius: 1e-5,
            r_probe: 1e-6,
            sweep_radius: LogAxis { min: 1e-7, max: 1e-3, n: 41 },
            sweep_pressure: LogAxis { min: 1e-15, max: 1e-12, n: 2 },
            sweep_temperature: LogAxis::fixed(1.0),
            mfp_pressure: LogAxis { min: 1e-16, max: 1e-10, n: 7 },
            mfp_r_probe: LogAxis { min: 1e-7, max: 1e-4, n: 31 },
        }
    }
}

impl Params for DecoherenceParams {
    const KEYS: &'static str = "pressure [Pa], t_env [K], t_int [K], eps_re, eps_im (permittivity factors), radius R [m], \
        r_probe [m], sweep_radius {min, max [m], n}, sweep_pressure {min, max [Pa], n}, sweep_temperature {min, max [K], n}, \
        mfp_pressure {min, max [Pa], n}, mfp_r_probe {min, max [m], n}";

    fn run(&self, ctx: &Context) -> Result<Run, CliError> {
        let env = Environment { pressure: self.pressure, t_env: self.t_env, t_int: self.t_int, eps_re: self.eps_re, eps_im: self.eps_im };
        env.validate()?;
        positive("radius", "m", self.radius)?;
        let point = total_decoherence(&env, self.radius)?;
        let mfp = mean_free_path(&env, self.r_probe)?;
        let rows = decoherence_sweep(&env, &self.sweep_radius, &self.sweep_pressure, &self.sweep_temperature)?;
        self.mfp_pressure.validate("mfp_pressure")?;
        self.mfp_r_probe.validate("mfp_r_probe")?;
        let mut mfp_csv = Csv::new(Some(&ctx.header), &["p", "r_probe", "mfp", "mfp_coefficient_form"]);
        for p in self.mfp_pressure.values() {
            for r in self.mfp_r_probe.values() {
                let m = mean_free_path(&Environment { pressure: p, ..env }, r)?;
                mfp_csv.row([num(p), num(r), num(m.value), num(m.coefficient_form)]);
            }
        }
        let artifacts = vec![
            Artifact::new("decoherence_sweep.csv", sweep_csv(&rows, Some(&ctx.header))),
            Artifact::new("decoherence_mfp.csv", mfp_csv.finish()),
            Artifact::json("decoherence.json", &ctx.config, json!({ "at_radius": point, "mean_free_path": mfp })),
        ];
        let summary = format!(
            "decoherence: Gamma_D(R = {:.3e} m) {:.4e} 1/s (gas {:.3e}, bb sc {:.3e}, abs {:.3e}, em {:.3e}), mfp {:.4e} m, {} sweep rows -> {}",
            self.radius,
            point.gamma_total,
            point.gamma_gas,
            point.gamma_bb_sc,
            point.gamma_bb_abs,
            point.gamma_bb_em,
            mfp.value,
            rows.len(),
            files(&artifacts)
        );
        Ok(Run { artifacts, summary })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FeasibilityParams {
    point: ExperimentPoint,
    axis1: RegionAxis,
    axis2: RegionAxis,
    window_log_min: f64,
    window_log_max: f64,
    window_n: usize,
}

impl Default for FeasibilityParams {
    fn default() -> Self {
        Self {
            point: ExperimentPoint::default(),
            axis1: RegionAxis { axis: Axis::TR, range: LogAxis { min: 1.0, max: 100.0, n: 41 } },
            axis2: RegionAxis { axis: Axis::R, range: LogAxis { min: 1e-6, max: 1e-4, n: 41 } },
            window_log_min: 0.0,
            window_log_max: 2.0,
            window_n: 201,
        }
    }
}

const POINT_KEYS: &str = "radius [m], density [kg/m^3], beta, zeta, t_r [s], m_probe [kg], r_probe [m], \
    env {pressure [Pa], t_env [K], t_int [K], eps_re, eps_im}, t_total_cap [s], theta_min [rad], much_factor, \
    gamma_zeno [1/s], sigma_ratio_max";

impl Params for FeasibilityParams {
    const KEYS: &'static str = "point {see report keys}, axis1/axis2 {axis (r|v|t_r|p|t|m_probe), range {min, max, n}}, \
        window_log_min, window_log_max (log10 t_R [s]), window_n";

    fn run(&self, ctx: &Context) -> Result<Run, CliError> {
        let cells = sweep_region(&self.point, &self.axis1, &self.axis2)?;
        let window = t_r_window(&self.point, self.window_log_min, self.window_log_max, self.window_n)?;
        let mut curve = Csv::new(Some(&ctx.header), &["t_r", "theta_max", "t_total", "admissible"]);
        for i in 0..self.window_n {
            let x = self.window_log_min + (self.window_log_max - self.window_log_min) * i as f64 / (self.window_n - 1) as f64;
            let rep = evaluate_point(&ExperimentPoint { t_r: 10f64.powf(x), ..self.point })?;
            let ok = [rep.constraint("deflection"), rep.constraint("flight_time")]
                .iter()
                .all(|c| c.is_some_and(|c| c.verdict == Verdict::Pass));
            curve.row([num(rep.point.t_r), num(rep.theta_max), num(rep.t_total), if ok { "1".into() } else { "0".into() }]);
        }
        let n_pass = cells.iter().filter(|c| c.report.pass).count();
        let artifacts = vec![
            Artifact::new("feasibility_region.csv", region_csv(&cells, Some(&ctx.header))),
            Artifact::new("feasibility_tr.csv", curve.finish()),
            Artifact::json(
                "feasibility.json",
                &ctx.config,
                json!({ "n_cells": cells.len(), "n_pass": n_pass, "t_r_window": window }),
            ),
        ];
        let win = match &window {
            Some(w) => format!("t_R window [10^{:.4}, 10^{:.4}] s (contiguous {})", w.log10_lo, w.log10_hi, w.contiguous),
            None => "no admissible t_R".into(),
        };
        let summary = format!("feasibility: {n_pass}/{} cells pass, {win} -> {}", cells.len(), files(&artifacts));
        Ok(Run { artifacts, summary })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
struct ReportParams(ExperimentPoint);

impl Params for ReportParams {
    const KEYS: &'static str = POINT_KEYS;

    fn run(&self, ctx: &Context) -> Result<Run, CliError> {
        let rep = evaluate_point(&self.0)?;
        let mut csv = Csv::new(Some(&ctx.header), &["name", "requirement", "value", "threshold", "margin", "verdict", "note"]);
        for c in &rep.constraints {
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::Indeterminate => "indeterminate",
            };
            csv.row([
                c.name.to_string(),
                c.requirement.clone(),
                num(c.value),
                num(c.threshold),
                num(c.margin),
                verdict.to_string(),
                c.note.clone().unwrap_or_default(),
            ]);
        }
        let mut body = Map::new();
        body.insert("report".into(), serde_json::to_value(&rep).map_err(|e| CliError::Numerical(e.to_string()))?);
        let artifacts = vec![
            Artifact::new("report.csv", csv.finish()),
            Artifact::json("report.json", &ctx.config, Value::Object(body)),
        ];
        let n_ok = rep.constraints.iter().filter(|c| c.verdict == Verdict::Pass).count();
        let summary = format!(
            "report: {} ({n_ok}/{} constraints), theta_max {:.4e} rad, t_total {:.3} s, KE {:.4e} eV, Gamma_Zeno required {:.4e} 1/s, sigma_min/R {:.4e}, mfp {:.4e} m -> {}",
            if rep.pass { "PASS" } else { "FAIL" },
            rep.constraints.len(),
            rep.theta_max,
            rep.t_total,
            rep.kinetic_energy_ev,
            rep.gamma_zeno_required,
            rep.sigma_ratio,
            rep.mfp,
            files(&artifacts)
        );
        Ok(Run { artifacts, summary })
    }
}
