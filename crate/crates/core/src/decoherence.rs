//! Decoherence of the source by rest gas and blackbody radiation, plus the
//! probe classicality bounds and mean free path.
//!
//! Every channel uses the saturating form Γ_D(x) = λ²Λ(1 − exp(−x²/λ²)).
//! The regime flags only report which limit (Λx² or λ²Λ) is accurate; the
//! rate itself is always the exact expression.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::table::{num, Csv};
use crate::units::{C, D_H2, HBAR, K_B, M_H2};
use crate::{Error, Result};

/// Riemann ζ(9).
pub const ZETA_9: f64 = 1.002_008_392_826_082_2;

/// Rounded coefficients quoted for the worst-case surrogate (1, 1).
pub const GAS_COEFFICIENT: f64 = 1.96e26;
pub const BB_SCATTERING_COEFFICIENT: f64 = 5e36;
pub const BB_ABSORPTION_COEFFICIENT: f64 = 5e25;
pub const MFP_COEFFICIENT: f64 = 3.6e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Environment {
    /// Rest-gas pressure (Pa).
    pub pressure: f64,
    /// Environment temperature (K).
    pub t_env: f64,
    /// Internal temperature of the source (K).
    pub t_int: f64,
    /// Re[(ε−1)/(ε+2)], in [0, 1].
    pub eps_re: f64,
    /// Im[(ε−1)/(ε+2)], in [0, 1].
    pub eps_im: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Self { pressure: 1e-15, t_env: 1.0, t_int: 1.0, eps_re: 1.0, eps_im: 1.0 }
    }
}

impl Environment {
    pub fn validate(&self) -> Result<()> {
        if !(self.pressure >= 0.0 && self.pressure.is_finite()) {
            return Err(Error::invalid(format!("pressure must be >= 0 Pa, got {}", self.pressure)));
        }
        if !(self.t_env > 0.0 && self.t_int > 0.0 && self.t_env.is_finite() && self.t_int.is_finite()) {
            return Err(Error::invalid("temperatures t_env and t_int must be > 0 K"));
        }
        if !((0.0..=1.0).contains(&self.eps_re) && (0.0..=1.0).contains(&self.eps_im)) {
            return Err(Error::invalid("permittivity surrogate eps_re, eps_im must lie in [0, 1]"));
        }
        Ok(())
    }
}

fn positive(name: &str, unit: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be > 0 {unit}, got {x}")))
    }
}

/// Γ_D(x) = λ²Λ(1 − exp(−x²/λ²)).
pub fn gamma_distance(lambda_coeff: f64, lambda_th: f64, x: f64) -> f64 {
    let l2 = lambda_th * lambda_th;
    -l2 * lambda_coeff * (-(x * x) / l2).exp_m1()
}

/// Λx², valid for x ≪ λ.
pub fn gamma_long_wavelength(lambda_coeff: f64, x: f64) -> f64 {
    lambda_coeff * x * x
}

/// λ²Λ, valid for x ≫ λ.
pub fn gamma_saturated(lambda_coeff: f64, lambda_th: f64) -> f64 {
    lambda_coeff * lambda_th * lambda_th
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// x ≤ λ/10: Γ ≈ Λx².
    LongWavelength,
    /// x ≥ 10λ: Γ ≈ λ²Λ.
    ShortWavelength,
    Intermediate,
}

impl Regime {
    pub fn of(x: f64, lambda_th: f64) -> Self {
        if x <= 0.1 * lambda_th {
            Regime::LongWavelength
        } else if x >= 10.0 * lambda_th {
            Regime::ShortWavelength
        } else {
            Regime::Intermediate
        }
    }
}

/// One decoherence channel evaluated at separation x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Channel {
    /// Λ (m⁻² s⁻¹).
    pub localization: f64,
    /// λ_th (m).
    pub wavelength: f64,
    /// Γ_D(x) (s⁻¹).
    pub rate: f64,
    pub regime: Regime,
}

impl Channel {
    fn new(localization: f64, wavelength: f64, x: f64) -> Self {
        Self { localization, wavelength, rate: gamma_distance(localization, wavelength, x), regime: Regime::of(x, wavelength) }
    }
}

/// λ_th = 2πħ/√(2π m_H₂ k_B T).
pub fn gas_wavelength(t_env: f64) -> f64 {
    2.0 * PI * HBAR / (2.0 * PI * M_H2 * K_B * t_env).sqrt()
}

/// Λ = 8√(2π) m v̄ p R² / (3√3 ħ²), v̄ the rms speed √(3kT/m).
pub fn gas_localization(env: &Environment, radius: f64) -> f64 {
    let v_bar = (3.0 * K_B * env.t_env / M_H2).sqrt();
    8.0 * (2.0 * PI).sqrt() * M_H2 * v_bar * env.pressure * radius * radius / (3.0 * 3f64.sqrt() * HBAR * HBAR)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestGasRate {
    pub channel: Channel,
    /// (λ/ħ)(16π/3) p R², the saturated rate.
    pub saturated: f64,
    /// 1.96×10²⁶ · p R² / √T.
    pub coefficient_form: f64,
}

pub fn rest_gas_rate(env: &Environment, radius: f64) -> Result<RestGasRate> {
    env.validate()?;
    positive("radius R", "m", radius)?;
    let lambda = gas_wavelength(env.t_env);
    let channel = Channel::new(gas_localization(env, radius), lambda, radius);
    Ok(RestGasRate {
        channel,
        saturated: lambda / HBAR * (16.0 * PI / 3.0) * env.pressure * radius * radius,
        coefficient_form: GAS_COEFFICIENT * env.pressure * radius * radius / env.t_env.sqrt(),
    })
}

/// λ_th = π^{2/3} ħc/(k_B T).
pub fn blackbody_wavelength(t: f64) -> f64 {
    PI.powf(2.0 / 3.0) * HBAR * C / (K_B * t)
}

/// Λ_sc = λ⁻⁹ · 8!·8ζ(9)π⁵cR⁶/9 · Re².
pub fn blackbody_scattering_localization(env: &Environment, radius: f64) -> f64 {
    let inv = 1.0 / blackbody_wavelength(env.t_env);
    inv.powi(9) * 40320.0 * 8.0 * ZETA_9 * PI.powi(5) * C * radius.powi(6) / 9.0 * env.eps_re * env.eps_re
}

/// Λ_ab/em = λ⁻⁶ · 16π⁹cR³/189 · Im, at the given temperature.
pub fn blackbody_absorption_localization(t: f64, eps_im: f64, radius: f64) -> f64 {
    let inv = 1.0 / blackbody_wavelength(t);
    inv.powi(6) * 16.0 * PI.powi(9) * C * radius.powi(3) / 189.0 * eps_im
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlackbodyRates {
    pub scattering: Channel,
    /// Absorption of environment photons (T_env).
    pub absorption: Channel,
    /// Emission by the source (T_int).
    pub emission: Channel,
    /// 5×10³⁶ R⁶ T_env⁹.
    pub scattering_coefficient_form: f64,
    /// 5×10²⁵ R³ T⁶ at T_env and T_int.
    pub absorption_coefficient_form: f64,
    pub emission_coefficient_form: f64,
}

pub fn blackbody_rates(env: &Environment, radius: f64, x: f64) -> Result<BlackbodyRates> {
    env.validate()?;
    positive("radius R", "m", radius)?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("separation x must be >= 0 m, got {x}")));
    }
    let (le, li) = (blackbody_wavelength(env.t_env), blackbody_wavelength(env.t_int));
    Ok(BlackbodyRates {
        scattering: Channel::new(blackbody_scattering_localization(env, radius), le, x),
        absorption: Channel::new(blackbody_absorption_localization(env.t_env, env.eps_im, radius), le, x),
        emission: Channel::new(blackbody_absorption_localization(env.t_int, env.eps_im, radius), li, x),
        scattering_coefficient_form: BB_SCATTERING_COEFFICIENT * radius.powi(6) * env.t_env.powi(9),
        absorption_coefficient_form: BB_ABSORPTION_COEFFICIENT * radius.powi(3) * env.t_env.powi(6),
        emission_coefficient_form: BB_ABSORPTION_COEFFICIENT * radius.powi(3) * env.t_int.powi(6),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegimeFlags {
    pub gas: Regime,
    pub bb_sc: Regime,
    pub bb_abs: Regime,
    pub bb_em: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceBreakdown {
    pub gamma_gas: f64,
    pub gamma_bb_sc: f64,
    pub gamma_bb_abs: f64,
    pub gamma_bb_em: f64,
    pub gamma_total: f64,
    pub regime_flags: RegimeFlags,
}

/// All channels at separation x = R.
pub fn total_decoherence(env: &Environment, radius: f64) -> Result<DecoherenceBreakdown> {
    let gas = rest_gas_rate(env, radius)?;
    let bb = blackbody_rates(env, radius, radius)?;
    let (g, s, a, e) = (gas.channel.rate, bb.scattering.rate, bb.absorption.rate, bb.emission.rate);
    Ok(DecoherenceBreakdown {
        gamma_gas: g,
        gamma_bb_sc: s,
        gamma_bb_abs: a,
        gamma_bb_em: e,
        gamma_total: g + s + a + e,
        regime_flags: RegimeFlags {
            gas: gas.channel.regime,
            bb_sc: bb.scattering.regime,
            bb_abs: bb.absorption.regime,
            bb_em: bb.emission.regime,
        },
    })
}

/// σ_u(t) = √(2Δu² + ½(ħt/(mΔu))²).
pub fn wavepacket_spread(m: f64, t: f64, du: f64) -> f64 {
    let q = HBAR * t / (m * du);
    (2.0 * du * du + 0.5 * q * q).sqrt()
}

/// (Δu_min, σ_min) = (√(ħt/2m), √(2ħt/m)).
pub fn spread_minimum(m: f64, t: f64) -> (f64, f64) {
    ((HBAR * t / (2.0 * m)).sqrt(), (2.0 * HBAR * t / m).sqrt())
}

/// (Δp_min, Δp_min/(mv)) with Δp_min = √(ħm/(2t)).
pub fn momentum_floor(m: f64, t: f64, v: f64) -> (f64, f64) {
    let dp = (HBAR * m / (2.0 * t)).sqrt();
    (dp, dp / (m * v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFreePath {
    /// k_B T/(√2 π (d_H₂/2 + R_probe)² p) (m); infinite at p = 0.
    pub value: f64,
    /// 3.6×10⁻¹⁵ T/p, for comparison only.
    pub coefficient_form: f64,
}

pub fn mean_free_path(env: &Environment, r_probe: f64) -> Result<MeanFreePath> {
    env.validate()?;
    if !(r_probe >= 0.0 && r_probe.is_finite()) {
        return Err(Error::invalid(format!("probe radius must be >= 0 m, got {r_probe}")));
    }
    if env.pressure == 0.0 {
        return Ok(MeanFreePath { value: f64::INFINITY, coefficient_form: f64::INFINITY });
    }
    let area = PI * (0.5 * D_H2 + r_probe).powi(2);
    Ok(MeanFreePath {
        value: K_B * env.t_env / (2f64.sqrt() * area * env.pressure),
        coefficient_form: MFP_COEFFICIENT * env.t_env / env.pressure,
    })
}

/// Log-spaced axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogAxis {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl LogAxis {
    pub fn fixed(x: f64) -> Self {
        Self { min: x, max: x, n: 1 }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.n == 0 || !(self.min > 0.0 && self.max >= self.min && self.max.is_finite()) {
            return Err(Error::invalid(format!(
                "{name} axis needs 0 < min <= max and n >= 1, got [{}, {}] n={}",
                self.min, self.max, self.n
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let (a, b) = (self.min.log10(), self.max.log10());
        (0..self.n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (self.n - 1) as f64)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub radius: f64,
    pub env: Environment,
    pub rates: DecoherenceBreakdown,
}

/// Cartesian sweep over R, p and T (T sets both T_env and T_int). Rows are
/// ordered R-major, then p, then T.
pub fn decoherence_sweep(base: &Environment, radius: &LogAxis, pressure: &LogAxis, temperature: &LogAxis) -> Result<Vec<SweepRow>> {
    radius.validate("R")?;
    pressure.validate("p")?;
    temperature.validate("T")?;
    let mut cells = Vec::new();
    for r in radius.values() {
        for p in pressure.values() {
            for t in temperature.values() {
                cells.push((r, Environment { pressure: p, t_env: t, t_int: t, ..*base }));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(r, env)| Ok(SweepRow { radius: r, env, rates: total_decoherence(&env, r)? }))
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow], comment: Option<&str>) -> String {
    let mut csv = Csv::new(
        comment,
        &["R", "p", "T_env", "T_int", "gamma_gas", "gamma_bb_sc", "gamma_bb_abs", "gamma_bb_em", "gamma_total"],
    );
    for r in rows {
        let g = &r.rates;
        csv.row([
            num(r.radius),
            num(r.env.pressure),
            num(r.env.t_env),
            num(r.env.t_int),
            num(g.gamma_gas),
            num(g.gamma_bb_sc),
            num(g.gamma_bb_abs),
            num(g.gamma_bb_em),
            num(g.gamma_total),
        ]);
    }
    csv.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const R: f64 = 1e-5;

    fn env() -> Environment {
        Environment::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_distance_limits() {
        assert_eq!(gamma_distance(3.0, 2.0, 0.0), 0.0);
        assert!(rel(gamma_distance(3.0, 2.0, 2.0), 12.0 * (1.0 - (-1f64).exp())) < 1e-14);
        assert!(rel(gamma_distance(3.0, 2.0, 20.0), 12.0) < 1e-6);
        assert!(rel(gamma_distance(3.0, 2.0, 1e-4), gamma_long_wavelength(3.0, 1e-4)) < 1e-8);
        assert_eq!(gamma_saturated(3.0, 2.0), 12.0);
    }

    #[test]
    fn rest_gas_reference() {
        let g = rest_gas_rate(&env(), R).unwrap();
        // independent evaluation: coefficient 1.9537e26, λ_th = 1.2297e-9 m
        assert!(rel(g.channel.wavelength, 1.2297e-9) < 1e-4);
        assert!(rel(g.channel.rate, 19.537) < 1e-3, "{}", g.channel.rate);
        assert!(rel(g.channel.rate, g.saturated) < 1e-12);
        assert!(rel(g.coefficient_form, 19.6) < 1e-12);
        let ratio = g.channel.rate / g.coefficient_form;
        assert!((1.0 / 1.5..1.5).contains(&ratio));
        assert_eq!(g.channel.regime, Regime::ShortWavelength);
        let vacuum = rest_gas_rate(&Environment { pressure: 0.0, ..env() }, R).unwrap();
        assert_eq!(vacuum.channel.rate, 0.0);
    }

    #[test]
    fn blackbody_reference() {
        let bb = blackbody_rates(&env(), R, R).unwrap();
        assert!(rel(bb.scattering.wavelength, 4.912e-3) < 1e-3);
        assert!(rel(bb.scattering.localization / R.powi(6), 1.9796e36) < 1e-3);
        assert!(rel(bb.absorption.localization / R.powi(3), 5.387e25) < 1e-3);
        assert!(rel(bb.absorption.rate, 5.387) < 1e-3);
        assert!(rel(bb.emission.rate, 5.387) < 1e-3);
        assert!(bb.scattering.rate < 1e-3 && bb.scattering.rate > 1e-4);
        assert_eq!(bb.absorption.regime, Regime::LongWavelength);
        let ratio = bb.absorption.localization / bb.absorption_coefficient_form;
        assert!((0.5..2.0).contains(&ratio));
        let cold = blackbody_rates(&Environment { t_env: 1e-3, t_int: 1e-3, ..env() }, R, R).unwrap();
        assert!(cold.scattering.rate < 1e-30 && cold.absorption.rate < 1e-15 && cold.emission.rate < 1e-15);
    }

    #[test]
    fn total_reference_point() {
        let d = total_decoherence(&env(), R).unwrap();
        let sum = d.gamma_gas + d.gamma_bb_sc + d.gamma_bb_abs + d.gamma_bb_em;
        assert_eq!(d.gamma_total, sum);
        assert!((10.0..100.0).contains(&d.gamma_total), "{}", d.gamma_total);
        let hi = total_decoherence(&Environment { pressure: 1e-12, ..env() }, R).unwrap();
        assert!(rel(hi.gamma_gas, 1e3 * d.gamma_gas) < 1e-12);
    }

    #[test]
    fn channel_crossover_in_radius() {
        let e = Environment { pressure: 1e-15, t_env: 4.0, t_int: 4.0, ..env() };
        let small = total_decoherence(&e, 1e-7).unwrap();
        let large = total_decoherence(&e, 1e-3).unwrap();
        assert!(small.gamma_gas > small.gamma_bb_sc + small.gamma_bb_abs + small.gamma_bb_em);
        assert!(large.gamma_gas < large.gamma_bb_sc + large.gamma_bb_abs + large.gamma_bb_em);
    }

    #[test]
    fn classicality_examples() {
        let (du, s) = spread_minimum(1e-18, 100.0);
        assert!(rel(s, 1.4523e-7) < 1e-4, "{s}");
        assert!(rel(wavepacket_spread(1e-18, 100.0, du), s) < 1e-12);
        for f in [0.5, 2.0] {
            assert!(wavepacket_spread(1e-18, 100.0, f * du) >= s);
        }
        assert!(rel(wavepacket_spread(1e-18, 0.0, 3e-9), 2f64.sqrt() * 3e-9) < 1e-15);
        let (dp, ratio) = momentum_floor(1e-18, 100.0, 1e-6);
        assert!(rel(dp, 7.2615e-28) < 1e-4 && rel(ratio, 7.2615e-4) < 1e-4);
        let (_, half) = momentum_floor(1e-18, 100.0, 0.5e-6);
        assert!(rel(half, 2.0 * ratio) < 1e-12);
        assert!(momentum_floor(1e-18, f64::INFINITY, 1e-6).0 == 0.0);
    }

    #[test]
    fn mean_free_path_examples() {
        let e = Environment { pressure: 1e-12, ..env() };
        let l = mean_free_path(&e, 1e-6).unwrap();
        assert!(rel(l.value, 3.107) < 1e-3, "{}", l.value);
        let l10 = mean_free_path(&Environment { pressure: 1e-11, ..e }, 1e-6).unwrap();
        assert!(rel(l.value, 10.0 * l10.value) < 1e-12);
        assert!(mean_free_path(&Environment { pressure: 0.0, ..e }, 1e-6).unwrap().value.is_infinite());
        assert!(rel(l.coefficient_form, 3.6e-3) < 1e-12);
        assert!(mean_free_path(&e, -1.0).is_err());
    }

    #[test]
    fn invalid_environment() {
        assert!(total_decoherence(&Environment { pressure: -1.0, ..env() }, R).is_err());
        assert!(total_decoherence(&Environment { t_env: 0.0, ..env() }, R).is_err());
        assert!(total_decoherence(&Environment { eps_re: 1.5, ..env() }, R).is_err());
        assert!(total_decoherence(&env(), 0.0).is_err());
        let bad: serde_json::Result<Environment> = serde_json::from_str(r#"{"pressure":1e-15,"Temp":1}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn sweep_layout() {
        let rows = decoherence_sweep(&env(), &LogAxis { min: 1e-6, max: 1e-4, n: 3 }, &LogAxis::fixed(1e-15), &LogAxis { min: 1.0, max: 4.0, n: 2 }).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[1].env.t_env, 4.0);
        let csv = sweep_csv(&rows, None);
        assert!(csv.starts_with("R,p,T_env,T_int,gamma_gas,gamma_bb_sc,gamma_bb_abs,gamma_bb_em,gamma_total\n"));
    }

    fn slope(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        (f(2.0 * x) / f(x)).ln() / 2f64.ln()
    }

    proptest! {
        #[test]
        fn gamma_distance_monotone_and_saturating(l in 1e-9f64..1e-3, lam in 1e-6f64..1.0, x1 in 0.0f64..5.0, dx in 0.0f64..5.0) {
            let a = gamma_distance(1.0 / (l * l), lam, x1 * lam);
            let b = gamma_distance(1.0 / (l * l), lam, (x1 + dx) * lam);
            prop_assert!(b >= a);
            let sat = gamma_saturated(1.0 / (l * l), lam);
            prop_assert!(((gamma_distance(1.0 / (l * l), lam, 10.0 * lam) - sat) / sat).abs() < 1e-6);
        }

        #[test]
        fn power_laws(p in 1e-16f64..1e-10, r in 1e-7f64..1e-3, t in 0.1f64..10.0) {
            let e = Environment { pressure: p, t_env: t, t_int: t, ..Environment::default() };
            let slopes = [
                (slope(|r| rest_gas_rate(&e, r).unwrap().saturated, r), 2.0),
                (slope(|p| rest_gas_rate(&Environment { pressure: p, ..e }, r).unwrap().saturated, p), 1.0),
                (slope(|t| rest_gas_rate(&Environment { t_env: t, ..e }, r).unwrap().saturated, t), -0.5),
                (slope(|r| blackbody_scattering_localization(&e, r), r), 6.0),
                (slope(|t| blackbody_scattering_localization(&Environment { t_env: t, ..e }, r), t), 9.0),
                (slope(|r| blackbody_absorption_localization(t, 1.0, r), r), 3.0),
                (slope(|t| blackbody_absorption_localization(t, 1.0, r), t), 6.0),
            ];
            for (got, want) in slopes {
                prop_assert!((got - want).abs() < 1e-6, "slope {} vs {}", got, want);
            }
        }

        #[test]
        fn short_wavelength_gas_approximation(p in 1e-16f64..1e-10, t in 0.1f64..10.0, k in 10.0f64..1e4) {
            let e = Environment { pressure: p, t_env: t, ..Environment::default() };
            let r = k * gas_wavelength(t);
            let g = rest_gas_rate(&e, r).unwrap();
            prop_assert!(((g.channel.rate - g.saturated) / g.channel.rate).abs() < 1e-3);
        }

        #[test]
        fn first_principles_within_factor_two_of_gas_and_absorption(r in 1e-7f64..1e-3, t in 0.1f64..10.0) {
            let e = Environment { t_env: t, t_int: t, ..Environment::default() };
            let g = rest_gas_rate(&e, r).unwrap();
            let q = g.saturated / g.coefficient_form;
            prop_assert!(q > 0.5 && q < 2.0);
            let q = blackbody_absorption_localization(t, 1.0, r) / (BB_ABSORPTION_COEFFICIENT * r.powi(3) * t.powi(6));
            prop_assert!(q > 0.5 && q < 2.0);
        }
    }
}
