//! Stereographic projection of outgoing directions.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Projection convention. Only one is implemented: pole at (0, 0, −1), image
/// plane tangent at z = +1, so the equator maps to the circle of radius 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionPole {
    #[default]
    NegativeZ,
}

impl ProjectionPole {
    pub fn describe(&self) -> &'static str {
        match self {
            ProjectionPole::NegativeZ => "pole (0,0,-1), plane z=+1, (2ux/(1+uz), 2uy/(1+uz))",
        }
    }
}

pub fn stereographic_project(dir: &Vector3<f64>) -> Result<Vector2<f64>> {
    let n = dir.norm();
    if !((n - 1.0).abs() <= 1e-9) {
        return Err(Error::invalid(format!("direction must be a unit vector, |u| = {n}")));
    }
    let denom = 1.0 + dir[2];
    if denom <= 1e-15 {
        return Err(Error::ProjectionSingular);
    }
    Ok(Vector2::new(2.0 * dir[0] / denom, 2.0 * dir[1] / denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixed_points() {
        assert_eq!(stereographic_project(&Vector3::z()).unwrap(), Vector2::zeros());
        assert_eq!(stereographic_project(&Vector3::x()).unwrap(), Vector2::new(2.0, 0.0));
        assert!(matches!(stereographic_project(&-Vector3::z()), Err(Error::ProjectionSingular)));
        assert!(stereographic_project(&Vector3::new(0.0, 0.0, 2.0)).is_err());
    }

    #[test]
    fn small_angle_is_theta() {
        let th = 1e-4f64;
        let p = stereographic_project(&Vector3::new(0.0, th.sin(), th.cos())).unwrap();
        assert!(p[0] == 0.0 && ((p[1] - th) / th).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn radius_is_two_tan_half_angle(th in 0.0f64..3.0, az in 0.0f64..std::f64::consts::TAU) {
            let u = Vector3::new(th.sin() * az.cos(), th.sin() * az.sin(), th.cos());
            let p = stereographic_project(&u).unwrap();
            prop_assert!((p.norm() - 2.0 * (0.5 * th).tan()).abs() < 1e-9 * (1.0 + p.norm()));
        }
    }
}
