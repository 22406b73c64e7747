//! Closed-form point-mass scattering: Rutherford deflection and hyperbolic
//! time of flight.

use std::f64::consts::PI;

use serde::Serialize;

use crate::units::G;
use crate::{Error, Result};

/// θ = 2·cot⁻¹(v² b0 / (G M)).
pub fn rutherford_angle(mass: f64, v: f64, b0: f64) -> f64 {
    2.0 * (G * mass / (v * v * b0)).atan()
}

/// Exact deflection for a sphere of density ρ grazing at b0 = βR with
/// v = R/t_R. The radius drops out.
pub fn rutherford_angle_scaled(density: f64, beta: f64, t_r: f64) -> f64 {
    2.0 * (4.0 * PI * G * density * t_r * t_r / (3.0 * beta)).atan()
}

/// Small-angle form 8πGρ t_R² / (3β).
pub fn rutherford_angle_small(density: f64, beta: f64, t_r: f64) -> f64 {
    8.0 * PI * G * density * t_r * t_r / (3.0 * beta)
}

/// Hyperbolic orbit quantities for one grazing probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicScatter {
    pub theta: f64,
    /// Asymptotic true anomaly (rad), θ + 2φ∞ = π in magnitude.
    pub phi_inf: f64,
    pub eccentricity: f64,
    /// h³/(GM)² (s).
    pub time_scale: f64,
    /// 2·t(ζ φ∞) (s).
    pub t_total: f64,
}

/// Time from periapsis to true anomaly `phi` on a hyperbola with
/// eccentricity `e`, in units where h³/(GM)² = `time_scale`.
pub fn hyperbolic_time_from_periapsis(e: f64, phi: f64, time_scale: f64) -> f64 {
    let e2m1 = (e - 1.0) * (e + 1.0);
    let tan_half = (0.5 * phi).tan();
    let (sp, sm) = ((e + 1.0).sqrt(), (e - 1.0).sqrt());
    let log = ((sp + sm * tan_half) / (sp - sm * tan_half)).ln();
    time_scale * (e * phi.sin() / (e2m1 * (1.0 + e * phi.cos())) - log / e2m1.powf(1.5))
}

/// Kepler time of flight for a probe with b0 = βR, v = R/t_R around a sphere
/// of mass M and density ρ, timed between true anomalies ±ζφ∞.
pub fn kepler_scatter(mass: f64, density: f64, beta: f64, zeta: f64, t_r: f64) -> Result<HyperbolicScatter> {
    if !(mass > 0.0 && density > 0.0 && mass.is_finite() && density.is_finite()) {
        return Err(Error::invalid("mass (kg) and density (kg/m^3) must be positive"));
    }
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be > 1, got {beta}")));
    }
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::invalid(format!("zeta must lie in (0, 1), got {zeta}")));
    }
    if !(t_r > 0.0 && t_r.is_finite()) {
        return Err(Error::invalid(format!("t_R must be > 0 s, got {t_r}")));
    }
    let radius = (3.0 * mass / (4.0 * PI * density)).cbrt();
    let theta = rutherford_angle(mass, radius / t_r, beta * radius);
    let phi_inf = 0.5 * (PI + theta);
    // e = −1/cos φ∞ = 1/sin(θ/2), written without the cancellation
    let eccentricity = 1.0 / (0.5 * theta).sin();
    if !(eccentricity > 1.0 && eccentricity.is_finite()) {
        return Err(Error::invalid(format!("orbit is not hyperbolic (e = {eccentricity})")));
    }
    let k = 4.0 / 3.0 * PI * G * density;
    let time_scale = (beta / t_r).powi(3) / (k * k);
    let t_total = 2.0 * hyperbolic_time_from_periapsis(eccentricity, zeta * phi_inf, time_scale);
    Ok(HyperbolicScatter { theta, phi_inf, eccentricity, time_scale, t_total })
}

/// Total flight time 2·t(ζφ∞) (s).
pub fn kepler_scatter_time(mass: f64, density: f64, beta: f64, zeta: f64, t_r: f64) -> Result<f64> {
    kepler_scatter(mass, density, beta, zeta, t_r).map(|h| h.t_total)
}
