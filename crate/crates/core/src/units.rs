//! Physical constants (CODATA 2018) and the few conversions the toolkit needs.
//!
//! Every quantity in the crate is carried in SI as a bare `f64`; field docs
//! state the unit.

use serde::{Deserialize, Serialize};

/// Newtonian constant of gravitation (m³ kg⁻¹ s⁻²).
pub const G: f64 = 6.674_30e-11;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant (J K⁻¹).
pub const K_B: f64 = 1.380_649e-23;

/// Speed of light in vacuum (m s⁻¹).
pub const C: f64 = 299_792_458.0;

/// Unified atomic mass unit (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Hydrogen molecule mass, 2 × 1.00784 u (kg).
pub const M_H2: f64 = 2.0 * 1.007_84 * ATOMIC_MASS_UNIT;

/// Kinetic diameter of the hydrogen molecule (m).
pub const D_H2: f64 = 2.89e-10;

/// Electron-volt (J).
pub const EV: f64 = 1.602_176_634e-19;

/// The constants as one value, for reports and config echoes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub g: f64,
    pub hbar: f64,
    pub k_b: f64,
    pub c: f64,
    pub m_h2: f64,
    pub d_h2: f64,
    pub ev: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        g: G,
        hbar: HBAR,
        k_b: K_B,
        c: C,
        m_h2: M_H2,
        d_h2: D_H2,
        ev: EV,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

pub fn joules_to_ev(energy_j: f64) -> f64 {
    energy_j / EV
}

pub fn ev_to_joules(energy_ev: f64) -> f64 {
    energy_ev * EV
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constants_positive() {
        let c = PhysicalConstants::default();
        for v in [c.g, c.hbar, c.k_b, c.c, c.m_h2, c.d_h2, c.ev] {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn hydrogen_mass_is_two_atoms() {
        assert!((M_H2 - 3.347_115e-27).abs() / M_H2 < 1e-6);
    }

    #[test]
    fn ev_conversion_examples() {
        assert_eq!(joules_to_ev(0.0), 0.0);
        assert!((joules_to_ev(1.602e-19) - 1.0).abs() < 2e-3);
        assert!((joules_to_ev(EV) - 1.0).abs() < 1e-15);
        // probe of 1e-18 kg at 1 µm/s
        let ke = 0.5 * 1e-18 * 1e-6_f64.powi(2);
        assert!((ke - 5e-31).abs() < 1e-45);
        let ev = joules_to_ev(ke);
        assert!((ev - 3.12e-12).abs() / 3.12e-12 < 1e-2, "{ev}");
    }

    proptest! {
        #[test]
        fn ev_round_trip(e in -1e3f64..1e3) {
            let back = joules_to_ev(ev_to_joules(e));
            prop_assert!((back - e).abs() <= 4.0 * f64::EPSILON * e.abs());
        }
    }
}
