//! Finite-difference eigensolver for even polynomial wells
//! V(x) = a x² − b x⁴ + c x⁶.
//!
//! Lengths are in units of d and energies in V₀ = ħ²/(2Md²); the equation
//! solved is −ψ'' + V(x)ψ = Eψ. Conversion to SI happens only on output.

use serde::{Deserialize, Serialize};

use crate::table::{num, Csv};
use crate::units::HBAR;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec1D {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Source mass M (kg).
    pub mass: f64,
    /// Length unit d (m).
    pub d: f64,
}

impl PotentialSpec1D {
    pub fn new(a: f64, b: f64, c: f64, mass: f64, d: f64) -> Result<Self> {
        let s = Self { a, b, c, mass, d };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.a, self.b, self.c].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("potential coefficients must be finite"));
        }
        if !(self.c > 0.0) {
            return Err(Error::invalid(format!("c must be > 0 for confinement, got {}", self.c)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::invalid(format!("mass M must be > 0 kg, got {}", self.mass)));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::invalid(format!("length unit d must be > 0 m, got {}", self.d)));
        }
        Ok(())
    }

    /// ħ²/(2Md²) (J).
    pub fn v0(&self) -> f64 {
        HBAR * HBAR / (2.0 * self.mass * self.d * self.d)
    }

    /// Dimensionless V(x).
    pub fn value(&self, x: f64) -> f64 {
        let x2 = x * x;
        x2 * (self.a + x2 * (-self.b + x2 * self.c))
    }

    /// Dimensionless V'(x).
    pub fn derivative(&self, x: f64) -> f64 {
        let x2 = x * x;
        x * (2.0 * self.a + x2 * (-4.0 * self.b + x2 * 6.0 * self.c))
    }
}

/// V₀/d · |V'(x)| (J/m), x in units of d.
pub fn potential_gradient(spec: &PotentialSpec1D, x: f64) -> f64 {
    spec.v0() / spec.d * spec.derivative(x).abs()
}

/// Uniform grid including both Dirichlet boundary points, in units of d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { x_min: -4.0, x_max: 4.0, n_points: 4000 }
    }
}

impl GridSpec {
    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.n_points).map(|i| self.x_min + h * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    pub grid: GridSpec,
    /// Ascending, in units of V₀.
    pub energies_v0: Vec<f64>,
    /// Ascending, in J.
    pub energies_j: Vec<f64>,
    /// One vector per state on the full grid (zero at both ends), normalized
    /// under the trapezoidal rule.
    pub wavefunctions: Vec<Vec<f64>>,
    /// E₁ − E₀ (J) when two or more states were requested.
    pub gap_01: Option<f64>,
}

impl EigenSolution {
    pub fn x(&self) -> Vec<f64> {
        self.grid.points()
    }

    /// Trapezoidal ∫ ψ_i ψ_j dx.
    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        trapezoid(self.grid.step(), self.wavefunctions[i].iter().zip(&self.wavefunctions[j]).map(|(a, b)| a * b))
    }

    /// ⟨ψ|−d²/dx²|ψ⟩ + ⟨ψ|V|ψ⟩ by quadrature, in V₀.
    pub fn energy_expectation(&self, spec: &PotentialSpec1D, k: usize) -> f64 {
        let psi = &self.wavefunctions[k];
        let h = self.grid.step();
        let x = self.grid.points();
        let n = psi.len();
        let kinetic = (1..n - 1).map(|i| psi[i] * (2.0 * psi[i] - psi[i - 1] - psi[i + 1]) / (h * h));
        let potential = (0..n).map(|i| psi[i] * psi[i] * spec.value(x[i]));
        trapezoid(h, kinetic) + trapezoid(h, potential)
    }

    /// Number of sign changes of state k, ignoring the exponentially small tails.
    pub fn sign_changes(&self, k: usize) -> usize {
        let psi = &self.wavefunctions[k];
        let cut = 1e-6 * psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let signs: Vec<bool> = psi.iter().filter(|v| v.abs() > cut).map(|v| *v > 0.0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// CSV `x,V_of_x,psi0,psi1` in dimensionless units.
    pub fn to_csv(&self, spec: &PotentialSpec1D, comment: Option<&str>) -> String {
        let mut csv = Csv::new(comment, &["x", "V_of_x", "psi0", "psi1"]);
        let psi1 = self.wavefunctions.get(1);
        for (i, x) in self.grid.points().into_iter().enumerate() {
            csv.row([
                num(x),
                num(spec.value(x)),
                num(self.wavefunctions[0][i]),
                num(psi1.map_or(f64::NAN, |p| p[i])),
            ]);
        }
        csv.finish()
    }
}

fn trapezoid(h: f64, vals: impl Iterator<Item = f64>) -> f64 {
    // ψ vanishes at both ends of the grid, so the end corrections drop out.
    h * vals.sum::<f64>()
}

/// Lowest `n_states` eigenpairs of −ψ'' + Vψ on `grid` with ψ = 0 at both ends.
pub fn solve_eigen(spec: &PotentialSpec1D, n_states: usize, grid: &GridSpec) -> Result<EigenSolution> {
    spec.validate()?;
    if n_states == 0 {
        return Err(Error::invalid("n_states must be >= 1"));
    }
    if grid.n_points < 1000 {
        return Err(Error::invalid(format!("n_points must be >= 1000, got {}", grid.n_points)));
    }
    if !(grid.x_min.is_finite() && grid.x_max.is_finite() && grid.x_max > grid.x_min) {
        return Err(Error::invalid("grid must satisfy x_min < x_max (units of d)"));
    }
    let interior = grid.n_points - 2;
    if n_states > interior {
        return Err(Error::invalid("more states requested than interior grid points"));
    }
    let h = grid.step();
    let x = grid.points();
    let off = -1.0 / (h * h);
    let diag: Vec<f64> = x[1..grid.n_points - 1].iter().map(|&xi| 2.0 / (h * h) + spec.value(xi)).collect();
    let tri = Tridiagonal { diag, off };

    let mut energies = Vec::with_capacity(n_states);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n_states);
    for k in 0..n_states {
        let lambda = tri.kth_eigenvalue(k);
        let mut v = tri.eigenvector(lambda, &vectors);
        let norm = (h * v.iter().map(|a| a * a).sum::<f64>()).sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        fix_sign(&mut v);
        let peak = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let edge = v[0].abs().max(v[interior - 1].abs()) / peak;
        if edge > 1e-6 {
            return Err(Error::GridInsufficient { state: k, ratio: edge });
        }
        energies.push(lambda);
        vectors.push(v);
    }

    let v0 = spec.v0();
    let wavefunctions = vectors
        .into_iter()
        .map(|v| {
            let mut full = Vec::with_capacity(grid.n_points);
            full.push(0.0);
            full.extend(v);
            full.push(0.0);
            full
        })
        .collect();
    let energies_j: Vec<f64> = energies.iter().map(|e| e * v0).collect();
    let gap_01 = (n_states >= 2).then(|| energies_j[1] - energies_j[0]);
    Ok(EigenSolution { grid: *grid, energies_v0: energies, energies_j, wavefunctions, gap_01 })
}

/// Make the outermost non-negligible amplitude on the right positive.
fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if let Some(last) = v.iter().rev().find(|a| a.abs() > 1e-3 * peak) {
        if *last < 0.0 {
            v.iter_mut().for_each(|a| *a = -*a);
        }
    }
}

/// Symmetric tridiagonal matrix with constant off-diagonal.
struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    /// Eigenvalues strictly below `lambda` (Sturm sequence count).
    fn count_below(&self, lambda: f64) -> usize {
        let e2 = self.off * self.off;
        let mut q = 1.0;
        let mut count = 0;
        for (i, d) in self.diag.iter().enumerate() {
            q = d - lambda - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + self.off.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn kth_eigenvalue(&self, k: usize) -> f64 {
        let r = 2.0 * self.off.abs();
        let mut lo = self.diag.iter().fold(f64::INFINITY, |m, d| m.min(d - r));
        let mut hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, d| m.max(d + r));
        while hi - lo > 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Inverse iteration at the converged `lambda`, orthogonalized against
    /// the vectors already found so near-degenerate pairs stay distinct.
    fn eigenvector(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.diag.len();
        let shift = lambda + 1e3 * f64::EPSILON * lambda.abs().max(self.off.abs());
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 97) as f64 / 97.0).collect();
        for _ in 0..4 {
            orthogonalize(&mut v, previous);
            v = self.solve_shifted(shift, &v);
            orthogonalize(&mut v, previous);
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
        }
        v
    }

    /// Solve (T − σ I) y = r with the Thomas algorithm and partial pivoting
    /// avoided by a tiny perturbation of exact zero pivots.
    fn solve_shifted(&self, sigma: f64, r: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let e = self.off;
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        let tiny = f64::EPSILON * e.abs();
        let mut piv = self.diag[0] - sigma;
        if piv == 0.0 {
            piv = tiny;
        }
        c[0] = e / piv;
        y[0] = r[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - sigma - e * c[i - 1];
            if piv == 0.0 {
                piv = tiny;
            }
            c[i] = e / piv;
            y[i] = (r[i] - e * y[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let bb: f64 = b.iter().map(|a| a * a).sum();
        let p: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum::<f64>() / bb;
        v.iter_mut().zip(b).for_each(|(a, c)| *a -= p * c);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundStateLabel {
    NearDegenerateDoubleWell,
    DelocalizedTripleWell,
    CentralHarmonicLike,
}

impl GroundStateLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::NearDegenerateDoubleWell => "near-degenerate-double-well",
            Self::DelocalizedTripleWell => "delocalized-triple-well",
            Self::CentralHarmonicLike => "central-harmonic-like",
        }
    }
}

/// Relative gap below which the lowest pair counts as near-degenerate.
pub const NEAR_DEGENERATE_GAP: f64 = 1e-3;
/// Probability outside the central barrier above which the ground state
/// counts as delocalized.
pub const DELOCALIZED_FRACTION: f64 = 0.05;
/// Relative gap below which the two lowest levels are not numerically resolved.
pub const UNRESOLVED_GAP: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundStateClass {
    /// (E₁ − E₀)/|E₀|.
    pub gap_ratio: f64,
    /// Position of the innermost barrier maximum of V for x > 0 (units of d).
    pub barrier_x: Option<f64>,
    /// Outer minima of V for x > 0 (units of d).
    pub outer_wells: Vec<f64>,
    /// ∫ |ψ₀|² over |x| ≥ barrier_x (1 when V has no central well).
    pub outside_fraction: f64,
    pub label: GroundStateLabel,
    /// False when the two lowest levels are not separated beyond round-off.
    pub reliable: bool,
}

/// Critical points of V on (0, x_max]: sign changes of V' on a fine grid
/// refined by bisection. Returns (x, is_minimum).
pub fn critical_points(spec: &PotentialSpec1D, x_max: f64) -> Vec<(f64, bool)> {
    let n = 20_000;
    let h = x_max / n as f64;
    let mut out = Vec::new();
    for i in 1..n {
        let (x0, x1) = (i as f64 * h, (i + 1) as f64 * h);
        let (d0, d1) = (spec.derivative(x0), spec.derivative(x1));
        if d0 == 0.0 || d0.signum() == d1.signum() {
            continue;
        }
        let (mut lo, mut hi) = (x0, x1);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if spec.derivative(mid).signum() == d0.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push((0.5 * (lo + hi), d0 < 0.0));
    }
    out
}

pub fn classify_ground_state(sol: &EigenSolution, spec: &PotentialSpec1D) -> Result<GroundStateClass> {
    if sol.energies_v0.len() < 2 {
        return Err(Error::invalid("classification needs at least two states"));
    }
    let (e0, e1) = (sol.energies_v0[0], sol.energies_v0[1]);
    let gap_ratio = (e1 - e0) / e0.abs();
    let crit = critical_points(spec, sol.grid.x_max.abs().max(sol.grid.x_min.abs()));
    let central_well = spec.a > 0.0;
    let barrier_x = if central_well { crit.iter().find(|c| !c.1).map(|c| c.0) } else { None };
    let outer_wells: Vec<f64> = crit.iter().filter(|c| c.1).map(|c| c.0).collect();

    let outside_fraction = match barrier_x {
        Some(xb) => {
            let x = sol.x();
            let psi = &sol.wavefunctions[0];
            sol.grid.step() * x.iter().zip(psi).filter(|(xi, _)| xi.abs() >= xb).map(|(_, p)| p * p).sum::<f64>()
        }
        None if outer_wells.is_empty() => 0.0,
        None => 1.0,
    };
    let label = if gap_ratio < NEAR_DEGENERATE_GAP {
        GroundStateLabel::NearDegenerateDoubleWell
    } else if outer_wells.is_empty() || outside_fraction < DELOCALIZED_FRACTION {
        GroundStateLabel::CentralHarmonicLike
    } else {
        GroundStateLabel::DelocalizedTripleWell
    };
    Ok(GroundStateClass { gap_ratio, barrier_x, outer_wells, outside_fraction, label, reliable: gap_ratio > UNRESOLVED_GAP })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig3() -> PotentialSpec1D {
        PotentialSpec1D::new(1.0, 4.0, 1.0, 1e-11, 1e-5).unwrap()
    }

    fn wide(n: usize) -> GridSpec {
        GridSpec { x_min: -8.0, x_max: 8.0, n_points: n }
    }

    #[test]
    fn triple_well_ground_state_is_exact_sextic_solution() {
        // V = x² − 4x⁴ + x⁶ has ψ₀ ∝ exp(x² − x⁴/4) with E₀ = −2 exactly.
        let sol = solve_eigen(&fig3(), 2, &GridSpec::default()).unwrap();
        assert!((sol.energies_v0[0] + 2.0).abs() < 1e-4, "{}", sol.energies_v0[0]);
        // dense-grid reference for E₁ (n = 8000 on [-4, 4]): −1.77273
        assert!((sol.energies_v0[1] + 1.77273).abs() < 1e-4, "{}", sol.energies_v0[1]);
        let x = sol.x();
        let exact: Vec<f64> = x.iter().map(|x| (x * x - x.powi(4) / 4.0).exp()).collect();
        let norm = (sol.grid.step() * exact.iter().map(|a| a * a).sum::<f64>()).sqrt();
        let err = sol.wavefunctions[0].iter().zip(&exact).map(|(a, b)| (a - b / norm).abs()).fold(0.0, f64::max);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn si_conversion() {
        let s = fig3();
        assert!((s.v0() - 5.5606e-48).abs() < 1e-51);
        let sol = solve_eigen(&s, 2, &GridSpec::default()).unwrap();
        assert!((sol.energies_j[0] / s.v0() - sol.energies_v0[0]).abs() < 1e-12);
        assert!(sol.gap_01.unwrap() > 0.0);
    }

    #[test]
    fn harmonic_oracle() {
        let s = PotentialSpec1D::new(1.0, 0.0, 1e-12, 1e-11, 1e-5).unwrap();
        let sol = solve_eigen(&s, 4, &wide(4000)).unwrap();
        for (n, e) in sol.energies_v0.iter().enumerate() {
            let want = 2.0 * n as f64 + 1.0;
            assert!(((e - want) / want).abs() < 1e-4, "n={n}: {e}");
        }
    }

    #[test]
    fn orthonormal_nodes_and_parity() {
        let s = fig3();
        let sol = solve_eigen(&s, 4, &GridSpec::default()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((sol.overlap(i, j) - want).abs() < 1e-8, "<{i}|{j}> = {}", sol.overlap(i, j));
            }
            assert_eq!(sol.sign_changes(i), i);
            let psi = &sol.wavefunctions[i];
            let n = psi.len();
            let parity = if i % 2 == 0 { 1.0 } else { -1.0 };
            let asym = (0..n).map(|k| (psi[k] - parity * psi[n - 1 - k]).abs()).fold(0.0, f64::max);
            assert!(asym < 1e-6, "state {i}: {asym}");
            assert!(((sol.energy_expectation(&s, i) - sol.energies_v0[i]) / sol.energies_v0[i]).abs() < 1e-6);
        }
        assert!(sol.energies_v0.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn grid_convergence() {
        let s = fig3();
        let a = solve_eigen(&s, 1, &GridSpec::default()).unwrap().energies_v0[0];
        let b = solve_eigen(&s, 1, &GridSpec { n_points: 8000, ..GridSpec::default() }).unwrap().energies_v0[0];
        assert!(((a - b) / b).abs() < 1e-4);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let s = PotentialSpec1D::new(1.0, 0.0, 1e-12, 1e-11, 1e-5).unwrap();
        match solve_eigen(&s, 1, &GridSpec::default()) {
            Err(Error::GridInsufficient { state: 0, ratio }) => assert!(ratio > 1e-6),
            other => panic!("expected grid-insufficient, got {other:?}"),
        }
        assert!(solve_eigen(&s, 1, &GridSpec { n_points: 500, ..wide(0) }).is_err());
        assert!(PotentialSpec1D::new(1.0, 0.0, 0.0, 1e-11, 1e-5).is_err());
    }

    #[test]
    fn gradient_examples() {
        let s = fig3();
        let g = potential_gradient(&s, 1.0);
        assert!((g - 4.448e-42).abs() < 1e-44, "{g}");
        assert_eq!(potential_gradient(&s, 0.0), 0.0);
        for x in [0.3, 1.0, 1.7, 2.5] {
            let h = 1e-5;
            let fd = s.v0() * (s.value(x + h) - s.value(x - h)) / (2.0 * h * s.d);
            assert!(((fd.abs() - potential_gradient(&s, x)) / fd).abs() < 1e-8);
        }
    }

    #[test]
    fn classification_labels() {
        let s = fig3();
        let sol = solve_eigen(&s, 2, &GridSpec::default()).unwrap();
        let c = classify_ground_state(&sol, &s).unwrap();
        assert_eq!(c.label, GroundStateLabel::DelocalizedTripleWell);
        assert!((c.barrier_x.unwrap() - 0.3627).abs() < 1e-3);
        assert!((c.outer_wells[0] - 1.5921).abs() < 1e-3);

        let harm = PotentialSpec1D::new(10.0, 0.0, 0.01, 1e-11, 1e-5).unwrap();
        let sol = solve_eigen(&harm, 2, &GridSpec::default()).unwrap();
        assert_eq!(classify_ground_state(&sol, &harm).unwrap().label, GroundStateLabel::CentralHarmonicLike);

        // deep outer wells: dense reference gives gap ratio 2.4e-6
        let deep = PotentialSpec1D::new(1.0, 6.0, 1.0, 1e-11, 1e-5).unwrap();
        let sol = solve_eigen(&deep, 2, &GridSpec::default()).unwrap();
        let c = classify_ground_state(&sol, &deep).unwrap();
        assert_eq!(c.label, GroundStateLabel::NearDegenerateDoubleWell);
        assert!(c.gap_ratio < 1e-5 && c.reliable);
        assert_eq!(sol.sign_changes(1), 1);
    }

    #[test]
    fn csv_layout() {
        let s = fig3();
        let sol = solve_eigen(&s, 2, &GridSpec::default()).unwrap();
        let csv = sol.to_csv(&s, None);
        assert!(csv.starts_with("x,V_of_x,psi0,psi1\n"));
        assert_eq!(csv.lines().count(), 4001);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn symmetric_potential_gives_symmetric_ground_state(a in 0.5f64..5.0, b in 0.0f64..3.0, c in 0.5f64..2.0) {
            let s = PotentialSpec1D::new(a, b, c, 1e-11, 1e-5).unwrap();
            let sol = solve_eigen(&s, 2, &GridSpec { n_points: 2000, ..GridSpec::default() }).unwrap();
            let psi = &sol.wavefunctions[0];
            let n = psi.len();
            let asym = (0..n).map(|k| (psi[k].abs() - psi[n - 1 - k].abs()).abs()).fold(0.0, f64::max);
            prop_assert!(asym < 1e-6);
            prop_assert_eq!(sol.sign_changes(0), 0);
            prop_assert!((sol.overlap(0, 1)).abs() < 1e-8);
        }
    }
}
