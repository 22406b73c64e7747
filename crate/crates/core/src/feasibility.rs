//! Intersection of all experimental constraints at a point or over a grid.
//!
//! Strict "≫"/"≪" inequalities become factors of `much_factor` (default 100).
//! The deflection floor θ_min and the flight-time cap are sharp.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoherence::{self, DecoherenceBreakdown, Environment, LogAxis};
use crate::massdist::sphere_mass;
use crate::scatter::{kepler_scatter_time, rutherford_angle};
use crate::table::{num, Csv};
use crate::units::joules_to_ev;
use crate::zeno::{zeno_rate_bounds, zeno_time_estimate};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentPoint {
    /// Source radius R (m).
    pub radius: f64,
    /// Source density ρ (kg/m³).
    pub density: f64,
    /// b0 = βR.
    pub beta: f64,
    /// Fraction of the asymptotic true anomaly used for timing.
    pub zeta: f64,
    /// t_R = R/v (s).
    pub t_r: f64,
    /// Probe mass (kg).
    pub m_probe: f64,
    /// Probe radius, used only for the mean free path (m).
    pub r_probe: f64,
    pub env: Environment,
    /// Largest acceptable flight time (s).
    pub t_total_cap: f64,
    /// Smallest acceptable deflection (rad).
    pub theta_min: f64,
    /// Numeric meaning of "≫".
    pub much_factor: f64,
    /// Planned measurement rate Γ_Zeno (s⁻¹).
    pub gamma_zeno: f64,
    /// Largest acceptable σ_min/R.
    pub sigma_ratio_max: f64,
}

impl Default for ExperimentPoint {
    fn default() -> Self {
        Self {
            radius: 1e-5,
            density: 2600.0,
            beta: 1.2,
            zeta: 0.75,
            t_r: 10f64.powf(1.1),
            m_probe: 1e-18,
            r_probe: 1e-6,
            env: Environment::default(),
            t_total_cap: 100.0,
            theta_min: 1e-4,
            much_factor: 100.0,
            gamma_zeno: 1e3,
            sigma_ratio_max: 2e-2,
        }
    }
}

impl ExperimentPoint {
    /// v = R/t_R (m/s).
    pub fn v(&self) -> f64 {
        self.radius / self.t_r
    }

    pub fn with_v(mut self, v: f64) -> Self {
        self.t_r = self.radius / v;
        self
    }

    pub fn source_mass(&self) -> f64 {
        sphere_mass(self.radius, self.density)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("radius", "m", self.radius),
            ("density", "kg/m^3", self.density),
            ("t_r", "s", self.t_r),
            ("m_probe", "kg", self.m_probe),
            ("t_total_cap", "s", self.t_total_cap),
            ("theta_min", "rad", self.theta_min),
            ("much_factor", "(dimensionless)", self.much_factor),
            ("gamma_zeno", "1/s", self.gamma_zeno),
            ("sigma_ratio_max", "(dimensionless)", self.sigma_ratio_max),
        ];
        for (name, unit, x) in pos {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::invalid(format!("{name} must be > 0 {unit}, got {x}")));
            }
        }
        if !(self.beta > 1.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be > 1, got {}", self.beta)));
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return Err(Error::invalid(format!("zeta must lie in (0, 1), got {}", self.zeta)));
        }
        if !(self.r_probe >= 0.0 && self.r_probe.is_finite()) {
            return Err(Error::invalid(format!("r_probe must be >= 0 m, got {}", self.r_probe)));
        }
        self.env.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintResult {
    pub name: &'static str,
    /// Human-readable inequality.
    pub requirement: String,
    pub value: f64,
    pub threshold: f64,
    /// ≥ 1 when satisfied.
    pub margin: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConstraintResult {
    fn at_least(name: &'static str, requirement: String, value: f64, threshold: f64, strict: bool) -> Self {
        let margin = value / threshold;
        let ok = if strict { value > threshold } else { value >= threshold };
        Self::finish(name, requirement, value, threshold, margin, ok)
    }

    fn at_most(name: &'static str, requirement: String, value: f64, threshold: f64, strict: bool) -> Self {
        let margin = threshold / value;
        let ok = if strict { value < threshold } else { value <= threshold };
        Self::finish(name, requirement, value, threshold, margin, ok)
    }

    fn finish(name: &'static str, requirement: String, value: f64, threshold: f64, margin: f64, ok: bool) -> Self {
        let verdict = if value.is_nan() {
            Verdict::Indeterminate
        } else if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self { name, requirement, value, threshold, margin, verdict, note: None }
    }

    fn indeterminate(name: &'static str, requirement: String, threshold: f64, why: String) -> Self {
        Self { name, requirement, value: f64::NAN, threshold, margin: f64::NAN, verdict: Verdict::Indeterminate, note: Some(why) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub point: ExperimentPoint,
    pub v: f64,
    pub source_mass: f64,
    pub theta_max: f64,
    /// Kepler flight time (s); NaN if it could not be evaluated.
    pub t_total: f64,
    /// min(t_total, cap), or the cap when t_total is unavailable (s).
    pub t_total_used: f64,
    pub tau_z: f64,
    pub decoherence: Option<DecoherenceBreakdown>,
    /// max(Γ_D(R), κ/τ_Z, t/τ_Z²) (s⁻¹).
    pub gamma_zeno_required: f64,
    pub sigma_min: f64,
    pub sigma_ratio: f64,
    pub momentum_ratio: f64,
    pub mfp: f64,
    pub kinetic_energy_ev: f64,
    pub constraints: Vec<ConstraintResult>,
    /// Every constraint passes.
    pub pass: bool,
}

impl ConstraintReport {
    pub fn constraint(&self, name: &str) -> Option<&ConstraintResult> {
        self.constraints.iter().find(|c| c.name == name)
    }
}

/// Evaluate every constraint at one point. Failures of a sub-evaluation mark
/// only the affected constraints indeterminate.
pub fn evaluate_point(pt: &ExperimentPoint) -> Result<ConstraintReport> {
    pt.validate()?;
    let k = pt.much_factor;
    let v = pt.v();
    let mass = pt.source_mass();
    let b0 = pt.beta * pt.radius;
    let theta_max = rutherford_angle(mass, v, b0);
    let kepler = kepler_scatter_time(mass, pt.density, pt.beta, pt.zeta, pt.t_r);
    let t_total = kepler.as_ref().copied().unwrap_or(f64::NAN);
    let t_used = if t_total.is_finite() { t_total.min(pt.t_total_cap) } else { pt.t_total_cap };

    let tau_z = zeno_time_estimate(pt.m_probe, mass, b0);
    let bounds = zeno_rate_bounds(tau_z, t_used);
    let deco = decoherence::total_decoherence(&pt.env, pt.radius);
    let gamma_d = deco.as_ref().map(|d| d.gamma_total).unwrap_or(f64::NAN);
    let gamma_required = gamma_d.max(k * bounds.dynamics).max(bounds.survival);

    let (_, sigma_min) = decoherence::spread_minimum(pt.m_probe, t_used);
    let sigma_ratio = sigma_min / pt.radius;
    let (_, momentum_ratio) = decoherence::momentum_floor(pt.m_probe, t_used, v);
    let mfp = decoherence::mean_free_path(&pt.env, pt.r_probe).map(|m| m.value).unwrap_or(f64::NAN);
    let path = v * t_used;
    let kinetic_energy_ev = joules_to_ev(0.5 * pt.m_probe * v * v);

    let mut c = Vec::new();
    c.push(ConstraintResult::at_least("deflection", format!("theta_max > {}", num(pt.theta_min)), theta_max, pt.theta_min, true));
    let time_req = format!("t_total < {}", num(pt.t_total_cap));
    c.push(match &kepler {
        Ok(t) => ConstraintResult::at_most("flight_time", time_req, *t, pt.t_total_cap, true),
        Err(e) => ConstraintResult::indeterminate("flight_time", time_req, pt.t_total_cap, e.to_string()),
    });
    let zeno_req = "gamma_zeno >= max(Gamma_D(R), k/tau_Z, t_total/tau_Z^2)".to_string();
    c.push(match &deco {
        Ok(_) => ConstraintResult::at_least("zeno_rate", zeno_req, pt.gamma_zeno, gamma_required, false),
        Err(e) => ConstraintResult::indeterminate("zeno_rate", zeno_req, f64::NAN, e.to_string()),
    });
    c.push(ConstraintResult::at_most(
        "classicality",
        format!("sigma_min/R <= {}", num(pt.sigma_ratio_max)),
        sigma_ratio,
        pt.sigma_ratio_max,
        false,
    ));
    c.push(ConstraintResult::at_most("momentum_floor", "dp_min/(m v) <= 1/k".into(), momentum_ratio, 1.0 / k, false));
    c.push(ConstraintResult::at_least("mean_free_path", "l_mfp >= k v t_total".into(), mfp, k * path, false));
    if kepler.is_err() {
        for r in c.iter_mut().skip(2) {
            r.note.get_or_insert_with(|| "t_total unavailable; cap used".into());
        }
    }

    let pass = c.iter().all(|r| r.verdict == Verdict::Pass);
    Ok(ConstraintReport {
        point: *pt,
        v,
        source_mass: mass,
        theta_max,
        t_total,
        t_total_used: t_used,
        tau_z,
        decoherence: deco.ok(),
        gamma_zeno_required: gamma_required,
        sigma_min,
        sigma_ratio,
        momentum_ratio,
        mfp,
        kinetic_energy_ev,
        constraints: c,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Source radius (m).
    R,
    /// Probe speed (m/s); sets t_R = R/v.
    V,
    /// t_R (s).
    TR,
    /// Pressure (Pa).
    P,
    /// Temperature (K), environment and internal.
    T,
    /// Probe mass (kg).
    MProbe,
}

impl Axis {
    fn order(self) -> u8 {
        match self {
            Axis::R => 0,
            Axis::P | Axis::T | Axis::MProbe => 1,
            Axis::TR | Axis::V => 2,
        }
    }

    fn apply(self, pt: &mut ExperimentPoint, x: f64) {
        match self {
            Axis::R => pt.radius = x,
            Axis::V => pt.t_r = pt.radius / x,
            Axis::TR => pt.t_r = x,
            Axis::P => pt.env.pressure = x,
            Axis::T => {
                pt.env.t_env = x;
                pt.env.t_int = x;
            }
            Axis::MProbe => pt.m_probe = x,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionAxis {
    pub axis: Axis,
    pub range: LogAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCell {
    pub axis1: f64,
    pub axis2: f64,
    pub report: ConstraintReport,
}

pub const MIN_REGION_POINTS: usize = 16;

/// Evaluate the point on a log grid over two axes. Cells are ordered
/// axis1-major.
pub fn sweep_region(base: &ExperimentPoint, a1: &RegionAxis, a2: &RegionAxis) -> Result<Vec<RegionCell>> {
    if a1.axis == a2.axis {
        return Err(Error::invalid("sweep axes must differ"));
    }
    for a in [a1, a2] {
        a.range.validate("region")?;
        if a.range.n < MIN_REGION_POINTS {
            return Err(Error::invalid(format!("region axes need >= {MIN_REGION_POINTS} points, got {}", a.range.n)));
        }
    }
    let (x1, x2) = (a1.range.values(), a2.range.values());
    let cells: Vec<(f64, f64)> = x1.iter().flat_map(|&a| x2.iter().map(move |&b| (a, b))).collect();
    cells
        .into_par_iter()
        .map(|(u, w)| {
            let mut pt = *base;
            let mut set = [(a1.axis, u), (a2.axis, w)];
            set.sort_by_key(|(ax, _)| ax.order());
            for (ax, x) in set {
                ax.apply(&mut pt, x);
            }
            Ok(RegionCell { axis1: u, axis2: w, report: evaluate_point(&pt)? })
        })
        .collect()
}

pub fn region_csv(cells: &[RegionCell], comment: Option<&str>) -> String {
    let mut csv = Csv::new(comment, &["axis1", "axis2", "theta_max", "t_total", "gamma_required", "sigma_ratio", "mfp", "KE_eV", "pass"]);
    for c in cells {
        let r = &c.report;
        csv.row([
            num(c.axis1),
            num(c.axis2),
            num(r.theta_max),
            num(r.t_total),
            num(r.gamma_zeno_required),
            num(r.sigma_ratio),
            num(r.mfp),
            num(r.kinetic_energy_ev),
            if r.pass { "1".into() } else { "0".into() },
        ]);
    }
    csv.finish()
}

/// The set of t_R with θ_max > θ_min and t_total < cap, sampled on a log grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrWindow {
    /// Log10 endpoints refined by bisection between grid samples.
    pub log10_lo: f64,
    pub log10_hi: f64,
    /// The admissible samples form one contiguous run.
    pub contiguous: bool,
    pub n_admissible: usize,
}

fn tr_admissible(base: &ExperimentPoint, log_tr: f64) -> bool {
    let pt = ExperimentPoint { t_r: 10f64.powf(log_tr), ..*base };
    let theta = rutherford_angle(pt.source_mass(), pt.v(), pt.beta * pt.radius);
    let t = kepler_scatter_time(pt.source_mass(), pt.density, pt.beta, pt.zeta, pt.t_r);
    theta > pt.theta_min && matches!(t, Ok(t) if t < pt.t_total_cap)
}

/// Window of t_R over [10^log_min, 10^log_max] with `n` log-spaced samples.
/// Returns None when no sample is admissible.
pub fn t_r_window(base: &ExperimentPoint, log_min: f64, log_max: f64, n: usize) -> Result<Option<TrWindow>> {
    base.validate()?;
    if n < 2 || !(log_max > log_min) {
        return Err(Error::invalid("t_R window needs n >= 2 and log_min < log_max"));
    }
    let xs: Vec<f64> = (0..n).map(|i| log_min + (log_max - log_min) * i as f64 / (n - 1) as f64).collect();
    let ok: Vec<bool> = xs.iter().map(|&x| tr_admissible(base, x)).collect();
    let Some(first) = ok.iter().position(|&b| b) else { return Ok(None) };
    let last = ok.iter().rposition(|&b| b).unwrap_or(first);
    let contiguous = ok[first..=last].iter().all(|&b| b);
    let refine = |mut inside: f64, mut outside: f64| {
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if tr_admissible(base, mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    let lo = if first > 0 { refine(xs[first], xs[first - 1]) } else { xs[0] };
    let hi = if last + 1 < n { refine(xs[last], xs[last + 1]) } else { xs[n - 1] };
    Ok(Some(TrWindow { log10_lo: lo, log10_hi: hi, contiguous, n_admissible: ok.iter().filter(|&&b| b).count() }))
}
