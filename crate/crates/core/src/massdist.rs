//! The gravity source: M|φ(X)|² ρ(X + r) represented as a finite set of
//! weighted uniform spheres.
//!
//! A wavefunction made of delta peaks becomes one sphere per peak, each
//! carrying its share of the total mass. The effective potential felt by a
//! probe is then a finite sum of uniform-sphere potentials.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::units::G;
use crate::{Error, Result};

/// Uniform sphere of given center (m), radius (m) and mass (kg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereComponent {
    pub center: Vector3<f64>,
    pub radius: f64,
    pub mass: f64,
}

impl SphereComponent {
    pub fn new(center: Vector3<f64>, radius: f64, mass: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("sphere radius must be > 0 m, got {radius}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid(format!("sphere mass must be > 0 kg, got {mass}")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("sphere center must be finite"));
        }
        Ok(Self { center, radius, mass })
    }

    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        (x - self.center).norm() < self.radius
    }

    /// Potential energy of a probe of mass `m_probe` at `x` (J).
    pub fn potential(&self, x: &Vector3<f64>, m_probe: f64) -> f64 {
        let r = (x - self.center).norm();
        let gmm = G * m_probe * self.mass;
        if r >= self.radius {
            -gmm / r
        } else {
            let a = self.radius;
            -gmm * (3.0 * a * a - r * r) / (2.0 * a * a * a)
        }
    }

    /// Force on a probe of mass `m_probe` at `x` (N).
    pub fn force(&self, x: &Vector3<f64>, m_probe: f64) -> Vector3<f64> {
        let rel = x - self.center;
        let r = rel.norm();
        let gmm = G * m_probe * self.mass;
        if r >= self.radius {
            rel * (-gmm / (r * r * r))
        } else {
            rel * (-gmm / self.radius.powi(3))
        }
    }
}

/// Weighted collection of uniform spheres; immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct MassDistribution {
    components: Vec<SphereComponent>,
    total_mass: f64,
    overlapping: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionRepr {
    components: Vec<SphereComponent>,
}

impl TryFrom<DistributionRepr> for MassDistribution {
    type Error = Error;

    fn try_from(repr: DistributionRepr) -> Result<Self> {
        for c in &repr.components {
            SphereComponent::new(c.center, c.radius, c.mass)?;
        }
        MassDistribution::new(repr.components)
    }
}

impl From<MassDistribution> for DistributionRepr {
    fn from(d: MassDistribution) -> Self {
        DistributionRepr { components: d.components }
    }
}

impl MassDistribution {
    pub fn new(components: Vec<SphereComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("mass distribution needs at least one component"));
        }
        let total_mass = components.iter().map(|c| c.mass).sum();
        let overlapping = components.iter().enumerate().any(|(i, a)| {
            components[i + 1..]
                .iter()
                .any(|b| (a.center - b.center).norm() < a.radius + b.radius)
        });
        Ok(Self { components, total_mass, overlapping })
    }

    /// Single localized sphere of radius `radius` and density `density` at `center`.
    pub fn single_sphere(center: Vector3<f64>, radius: f64, density: f64) -> Result<Self> {
        check_sphere_params(radius, density)?;
        let mass = sphere_mass(radius, density);
        Self::new(vec![SphereComponent::new(center, radius, mass)?])
    }

    pub fn components(&self) -> &[SphereComponent] {
        &self.components
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Set when two components intersect; the field is still the plain
    /// superposition, but the two-lobe picture no longer applies.
    pub fn is_overlapping(&self) -> bool {
        self.overlapping
    }

    /// Largest component radius (m).
    pub fn max_radius(&self) -> f64 {
        self.components.iter().map(|c| c.radius).fold(0.0, f64::max)
    }

    /// Largest distance between any two component centers (m).
    pub fn extent(&self) -> f64 {
        let mut ext: f64 = 0.0;
        for (i, a) in self.components.iter().enumerate() {
            for b in &self.components[i + 1..] {
                ext = ext.max((a.center - b.center).norm());
            }
        }
        ext
    }

    pub fn barycenter(&self) -> Vector3<f64> {
        self.components
            .iter()
            .fold(Vector3::zeros(), |acc, c| acc + c.center * c.mass)
            / self.total_mass
    }

    /// Index of the first component containing `x`, if any.
    pub fn component_containing(&self, x: &Vector3<f64>) -> Option<usize> {
        self.components.iter().position(|c| c.contains(x))
    }

    /// Distance from `x` to the nearest component surface (negative inside).
    pub fn clearance(&self, x: &Vector3<f64>) -> f64 {
        self.components
            .iter()
            .map(|c| (x - c.center).norm() - c.radius)
            .fold(f64::INFINITY, f64::min)
    }
}

fn check_sphere_params(radius: f64, density: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("source radius R must be > 0 m, got {radius}")));
    }
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::invalid(format!("density must be > 0 kg/m^3, got {density}")));
    }
    Ok(())
}

/// M = (4/3) π ρ R³ (kg).
pub fn sphere_mass(radius: f64, density: f64) -> f64 {
    4.0 / 3.0 * PI * density * radius.powi(3)
}

/// Source frozen in φ(X) = ½[δ(X + d/2) + δ(X − d/2)] along x: two spheres of
/// mass M/2 at (∓d/2, 0, 0). `d = 0` collapses to one sphere of mass M.
pub fn make_superposed_source(radius: f64, density: f64, separation: f64) -> Result<MassDistribution> {
    check_sphere_params(radius, density)?;
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::invalid(format!("separation d must be >= 0 m, got {separation}")));
    }
    let mass = sphere_mass(radius, density);
    if separation == 0.0 {
        return MassDistribution::new(vec![SphereComponent::new(Vector3::zeros(), radius, mass)?]);
    }
    let half = 0.5 * separation;
    MassDistribution::new(vec![
        SphereComponent::new(Vector3::new(-half, 0.0, 0.0), radius, 0.5 * mass)?,
        SphereComponent::new(Vector3::new(half, 0.0, 0.0), radius, 0.5 * mass)?,
    ])
}

/// Effective potential energy V_φ(x) of a probe of mass `m_probe` (J).
pub fn potential_at(dist: &MassDistribution, x: &Vector3<f64>, m_probe: f64) -> f64 {
    dist.components.iter().map(|c| c.potential(x, m_probe)).sum()
}

/// −∇V_φ(x) (N).
pub fn force_at(dist: &MassDistribution, x: &Vector3<f64>, m_probe: f64) -> Vector3<f64> {
    dist.components
        .iter()
        .fold(Vector3::zeros(), |acc, c| acc + c.force(x, m_probe))
}
