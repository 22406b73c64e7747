//! Classical scattering of a point probe off the (frozen) source.
//!
//! The probe is launched from `(l, b, z_start)` with velocity `(0, 0, v)`;
//! `z_start` is the finite stand-in for −∞. The field is static: the source
//! is assumed completely frozen, so there is no recoil.

mod analytic;
mod integrator;
mod pattern;
mod projection;

pub use analytic::{
    hyperbolic_time_from_periapsis, kepler_scatter, kepler_scatter_time, rutherford_angle,
    rutherford_angle_scaled, rutherford_angle_small, HyperbolicScatter,
};
pub use integrator::{hermite_position, PhaseState};
pub use pattern::{
    high_deflection_clusters, scan_pattern, PatternGrid, PatternPoint, ScatterPattern,
};
pub use projection::{stereographic_project, ProjectionPole};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::massdist::{self, potential_at, MassDistribution};
use crate::units::G;
use crate::{Error, Result};

use integrator::{DormandPrince, StepControl};

/// Launch geometry and integration controls for one probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterConfig {
    /// Impact parameter along y (m).
    pub b: f64,
    /// Offset along x, the delocalization axis (m).
    pub l: f64,
    /// Initial speed along +z (m/s).
    pub v: f64,
    /// Launch z-coordinate (m, negative).
    pub z_start: f64,
    /// Largest integrator step (s).
    pub dt_max: f64,
    /// Integration cutoff (s).
    pub t_max: f64,
    /// The probe has escaped once |x| > r_stop moving outward (m).
    pub r_stop: f64,
    /// Per-step relative tolerance.
    pub rtol: f64,
}

impl ScatterConfig {
    /// Defaults scaled to the source: with L = max(d, R), z_start = −50 L and
    /// r_stop = 100 L.
    pub fn for_source(dist: &MassDistribution, b: f64, l: f64, v: f64) -> Self {
        let scale = source_length_scale(dist);
        let z_start = -50.0 * scale;
        let r_stop = 100.0 * scale;
        Self {
            b,
            l,
            v,
            z_start,
            dt_max: 0.25 * scale / v,
            t_max: 10.0 * (r_stop - z_start) / v,
            r_stop,
            rtol: 1e-9,
        }
    }

    /// Move the launch plane to `z_start` and the escape sphere to `r_stop`,
    /// stretching `t_max` to match.
    pub fn with_range(mut self, z_start: f64, r_stop: f64) -> Self {
        self.z_start = z_start;
        self.r_stop = r_stop;
        self.t_max = 10.0 * (r_stop - z_start) / self.v;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.b, self.l, self.v, self.z_start, self.dt_max, self.t_max, self.r_stop, self.rtol]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::invalid("scatter config contains non-finite values"));
        }
        if !(self.v > 0.0) {
            return Err(Error::invalid(format!("probe speed v must be > 0 m/s, got {}", self.v)));
        }
        if !(self.z_start < 0.0) {
            return Err(Error::invalid(format!("z_start must be < 0 m, got {}", self.z_start)));
        }
        if !(self.dt_max > 0.0 && self.t_max > 0.0) {
            return Err(Error::invalid("dt_max and t_max must be > 0 s"));
        }
        if !(self.r_stop > self.z_start.abs()) {
            return Err(Error::invalid(format!(
                "r_stop ({} m) must exceed |z_start| ({} m)",
                self.r_stop,
                self.z_start.abs()
            )));
        }
        if !(self.rtol > 0.0 && self.rtol < 1e-2) {
            return Err(Error::invalid(format!("rtol must be in (0, 1e-2), got {}", self.rtol)));
        }
        Ok(())
    }

    pub fn launch_state(&self) -> PhaseState {
        PhaseState {
            x: Vector3::new(self.l, self.b, self.z_start),
            v: Vector3::new(0.0, 0.0, self.v),
        }
    }
}

/// max(d, R): center separation or the largest radius, whichever is bigger.
pub fn source_length_scale(dist: &MassDistribution) -> f64 {
    dist.extent().max(dist.max_radius())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl TrajectorySample {
    fn state(&self) -> PhaseState {
        PhaseState { x: self.x, v: self.v }
    }
}

/// Time-ordered probe path with its scattering outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeTrajectory {
    pub samples: Vec<TrajectorySample>,
    /// Some part of the path entered a source component.
    pub hit_source: bool,
    /// Angle between initial and final velocity (rad).
    pub deflection_angle: f64,
    pub outgoing_dir: Vector3<f64>,
}

impl ProbeTrajectory {
    fn from_samples(samples: Vec<TrajectorySample>, hit_source: bool) -> Self {
        let v0 = samples.first().map(|s| s.v).unwrap_or_else(Vector3::z);
        let vf = samples.last().map(|s| s.v).unwrap_or_else(Vector3::z);
        let deflection_angle = v0.cross(&vf).norm().atan2(v0.dot(&vf));
        let outgoing_dir = if vf.norm() > 0.0 { vf.normalize() } else { Vector3::z() };
        Self { samples, hit_source, deflection_angle, outgoing_dir }
    }

    pub fn initial(&self) -> &TrajectorySample {
        &self.samples[0]
    }

    pub fn last(&self) -> &TrajectorySample {
        &self.samples[self.samples.len() - 1]
    }

    /// Transverse velocity change divided by the initial speed.
    pub fn deflection_vector(&self) -> Vector3<f64> {
        let v0 = self.initial().v;
        let vf = self.last().v;
        let dir = v0.normalize();
        let dv = vf - dir * vf.dot(&dir);
        dv / v0.norm()
    }

    /// ½ m |v|² + V(x) at every sample (J).
    pub fn energies(&self, dist: &MassDistribution, m_probe: f64) -> Vec<f64> {
        self.samples
            .iter()
            .map(|s| 0.5 * m_probe * s.v.norm_squared() + potential_at(dist, &s.x, m_probe))
            .collect()
    }

    pub fn max_relative_energy_drift(&self, dist: &MassDistribution, m_probe: f64) -> f64 {
        let e = self.energies(dist, m_probe);
        max_relative_drift(e.iter().copied())
    }

    /// Drift of |(x − center) × v| relative to its initial value.
    pub fn max_relative_angular_momentum_drift(&self, center: &Vector3<f64>) -> f64 {
        let l0 = (self.samples[0].x - center).cross(&self.samples[0].v);
        let scale = l0.norm();
        self.samples
            .iter()
            .map(|s| ((s.x - center).cross(&s.v) - l0).norm() / scale)
            .fold(0.0, f64::max)
    }
}

fn max_relative_drift(mut it: impl Iterator<Item = f64>) -> f64 {
    let Some(first) = it.next() else { return 0.0 };
    it.map(|e| ((e - first) / first).abs()).fold(0.0, f64::max)
}

/// Integrate one probe through the static field of `dist`.
pub fn integrate_trajectory(dist: &MassDistribution, cfg: &ScatterConfig, m_probe: f64) -> Result<ProbeTrajectory> {
    cfg.validate()?;
    if !(m_probe > 0.0 && m_probe.is_finite()) {
        return Err(Error::invalid(format!("probe mass must be > 0 kg, got {m_probe}")));
    }
    let scale = source_length_scale(dist);
    let dv_scale = G * dist.total_mass() / (cfg.v * scale);
    let ctl = StepControl {
        rtol: cfg.rtol,
        length_scale: scale,
        velocity_scale: dv_scale.min(cfg.v).max(1e-12 * cfg.v),
        dt_max: cfg.dt_max,
    };
    let accel = |x: &Vector3<f64>| massdist::force_at(dist, x, 1.0);
    let mut stepper = DormandPrince::new(accel, ctl);

    let mut y = cfg.launch_state();
    let mut t = 0.0;
    let mut h = (0.01 * scale / cfg.v).min(cfg.dt_max);
    let mut samples = vec![TrajectorySample { t, x: y.x, v: y.v }];
    let mut hit = dist.component_containing(&y.x).is_some();

    loop {
        let out = match stepper.step(&y, h) {
            Some(o) => o,
            None => {
                return Err(Error::IntegratorFailure(format!(
                    "step failed at t = {t:.6e} s (non-finite state or step underflow)"
                )))
            }
        };
        let prev = y;
        t += out.h_used;
        y = out.next;
        h = out.h_next;
        if !hit && segment_hits(dist, &prev.x, &y.x) {
            hit = true;
        }
        samples.push(TrajectorySample { t, x: y.x, v: y.v });

        if y.x.norm() > cfg.r_stop && y.x.dot(&y.v) > 0.0 {
            return Ok(ProbeTrajectory::from_samples(samples, hit));
        }
        if t > cfg.t_max {
            return Err(Error::UnterminatedTrajectory {
                t_max: cfg.t_max,
                partial: Box::new(ProbeTrajectory::from_samples(samples, hit)),
            });
        }
    }
}

fn segment_hits(dist: &MassDistribution, a: &Vector3<f64>, b: &Vector3<f64>) -> bool {
    let seg = b - a;
    let len2 = seg.norm_squared();
    dist.components().iter().any(|c| {
        let s = if len2 > 0.0 { ((c.center - a).dot(&seg) / len2).clamp(0.0, 1.0) } else { 0.0 };
        (a + seg * s - c.center).norm() < c.radius
    })
}

/// Which localized position the source collapsed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coin {
    Left,
    Right,
}

/// The two collapsed alternatives: the whole mass M localized at −d/2 or +d/2.
pub fn collapsed_sources(radius: f64, density: f64, separation: f64) -> Result<(MassDistribution, MassDistribution)> {
    if !(separation >= 0.0) {
        return Err(Error::invalid(format!("separation d must be >= 0 m, got {separation}")));
    }
    let half = 0.5 * separation;
    Ok((
        MassDistribution::single_sphere(Vector3::new(-half, 0.0, 0.0), radius, density)?,
        MassDistribution::single_sphere(Vector3::new(half, 0.0, 0.0), radius, density)?,
    ))
}

/// Scatter off whichever collapsed source the coin selects.
pub fn collapsed_scatter(
    dist_left: &MassDistribution,
    dist_right: &MassDistribution,
    cfg: &ScatterConfig,
    m_probe: f64,
    which: Coin,
) -> Result<ProbeTrajectory> {
    let dist = match which {
        Coin::Left => dist_left,
        Coin::Right => dist_right,
    };
    integrate_trajectory(dist, cfg, m_probe)
}

/// Elapsed time between the true-anomaly crossings −`anomaly` and +`anomaly`
/// measured about `center` from the periapsis of the sampled path (s).
///
/// Positions between samples come from cubic Hermite interpolation.
pub fn flight_time_between_anomalies(traj: &ProbeTrajectory, center: &Vector3<f64>, anomaly: f64) -> Result<f64> {
    let s = &traj.samples;
    if s.len() < 3 {
        return Err(Error::invalid("trajectory too short for anomaly timing"));
    }
    let radial = |x: &Vector3<f64>, v: &Vector3<f64>| (x - center).dot(v);
    let k = (0..s.len() - 1)
        .find(|&i| radial(&s[i].x, &s[i].v) <= 0.0 && radial(&s[i + 1].x, &s[i + 1].v) > 0.0)
        .ok_or_else(|| Error::invalid("trajectory has no periapsis"))?;
    let interp = |i: usize, u: f64| hermite_position(s[i].t, &s[i].state(), s[i + 1].t, &s[i + 1].state(), u);
    let u_peri = bisect(0.0, 1.0, |u| {
        let (x, v) = interp(k, u);
        radial(&x, &v)
    });
    let (xp, vp) = interp(k, u_peri);
    let p_hat = (xp - center).normalize();
    let n_hat = (xp - center).cross(&vp).normalize();
    let phi = |x: &Vector3<f64>| {
        let r = x - center;
        n_hat.dot(&p_hat.cross(&r)).atan2(p_hat.dot(&r))
    };

    let crossing = |target: f64| -> Result<f64> {
        let i = (0..s.len() - 1)
            .find(|&i| phi(&s[i].x) < target && phi(&s[i + 1].x) >= target)
            .ok_or_else(|| Error::invalid(format!("true anomaly {target:.6} rad not reached")))?;
        let u = bisect(0.0, 1.0, |u| phi(&interp(i, u).0) - target);
        Ok(s[i].t + u * (s[i + 1].t - s[i].t))
    };
    Ok(crossing(anomaly)? - crossing(-anomaly)?)
}

/// Root of `f` on [lo, hi] assuming f(lo) ≤ 0 < f(hi).
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
