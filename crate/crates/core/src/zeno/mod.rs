//! Stroboscopic Zeno freezing on finite probe ⊗ source models.
//!
//! The total space is ordered probe ⊗ source: basis index `p * dim_s + s`.
//! Energies are in joules and times in seconds; ħ is the SI value.

mod expm;

pub use expm::expm;

use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::table::{num, Csv};
use crate::units::{G, HBAR};
use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

const HERMITIAN_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-10;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Probe ⊗ source Hamiltonian H = H_P ⊗ 1 + 1 ⊗ H_S + H_int with the frozen
/// source state φ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct BipartiteSystem {
    dim_p: usize,
    dim_s: usize,
    h_p: CMatrix,
    h_s: CMatrix,
    h_int: CMatrix,
    phi: DVector<C64>,
    source_energy: Option<f64>,
}

fn check_hermitian(name: &str, m: &CMatrix, dim: usize) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::invalid(format!("{name} must be {dim}x{dim}, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid(format!("{name} has non-finite entries")));
    }
    let skew = (m - m.adjoint()).norm();
    if skew > HERMITIAN_TOL * m.norm() {
        return Err(Error::invalid(format!("{name} is not Hermitian (|H - H^†| = {skew:.3e} J)")));
    }
    Ok(())
}

impl BipartiteSystem {
    pub fn new(h_p: CMatrix, h_s: CMatrix, h_int: CMatrix, phi: DVector<C64>) -> Result<Self> {
        let dim_p = h_p.nrows();
        let dim_s = h_s.nrows();
        if dim_p == 0 || dim_s == 0 {
            return Err(Error::invalid("probe and source dimensions must be >= 1"));
        }
        check_hermitian("H_P", &h_p, dim_p)?;
        check_hermitian("H_S", &h_s, dim_s)?;
        check_hermitian("H_int", &h_int, dim_p * dim_s)?;
        if phi.len() != dim_s {
            return Err(Error::invalid(format!("phi must have length {dim_s}, got {}", phi.len())));
        }
        if (phi.norm() - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::invalid(format!("phi must be normalized, |phi| = {}", phi.norm())));
        }
        let e = (phi.adjoint() * &h_s * &phi)[(0, 0)].re;
        let resid = (&h_s * &phi - &phi * c(e)).norm();
        let source_energy = (resid <= 1e-10 * h_s.norm().max(f64::MIN_POSITIVE)).then_some(e);
        Ok(Self { dim_p, dim_s, h_p, h_s, h_int, phi, source_energy })
    }

    pub fn dim_p(&self) -> usize {
        self.dim_p
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn phi(&self) -> &DVector<C64> {
        &self.phi
    }

    /// E with H_S φ = E φ, if φ is an eigenstate of H_S.
    pub fn source_energy(&self) -> Option<f64> {
        self.source_energy
    }

    pub fn hamiltonian(&self) -> CMatrix {
        let ip = CMatrix::identity(self.dim_p, self.dim_p);
        let is = CMatrix::identity(self.dim_s, self.dim_s);
        self.h_p.kronecker(&is) + ip.kronecker(&self.h_s) + &self.h_int
    }

    /// 1 ⊗ P_φ on the total space.
    pub fn freeze_projector(&self) -> CMatrix {
        let ip = CMatrix::identity(self.dim_p, self.dim_p);
        ip.kronecker(&(&self.phi * self.phi.adjoint()))
    }

    /// Tr_S[(1 ⊗ P_φ) X]: the (i, j) entry is ⟨φ| X_ij |φ⟩ with X_ij the
    /// source block of X.
    fn reduce(&self, x: &CMatrix) -> CMatrix {
        let ds = self.dim_s;
        CMatrix::from_fn(self.dim_p, self.dim_p, |i, j| {
            let block = x.view((i * ds, j * ds), (ds, ds));
            (self.phi.adjoint() * block * &self.phi)[(0, 0)]
        })
    }

    /// Embed |φ⟩: the (dim_p·dim_s) × dim_p isometry 1 ⊗ |φ⟩.
    fn embed(&self) -> CMatrix {
        CMatrix::identity(self.dim_p, self.dim_p).kronecker(&CMatrix::from_column_slice(self.dim_s, 1, self.phi.as_slice()))
    }

    /// Hermitian test model with ΔH²_φ = g²·1 and τ_Z = ħ/g:
    /// H_P = g(σ_x/2 + σ_z/3), H_S = (g/4)σ_z, H_int = g σ_x ⊗ σ_x, φ = |0⟩.
    pub fn coupled_qubits(g: f64) -> Self {
        let sx = pauli_x();
        let sz = pauli_z();
        let h_p = (&sx * c(0.5) + &sz * c(1.0 / 3.0)) * c(g);
        let h_s = &sz * c(0.25 * g);
        let h_int = sx.kronecker(&sx) * c(g);
        let phi = DVector::from_vec(vec![c(1.0), c(0.0)]);
        Self::new(h_p, h_s, h_int, phi).expect("test model is valid")
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

/// On-disk model: dense complex matrices as rows of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub h_p: Vec<Vec<[f64; 2]>>,
    pub h_s: Vec<Vec<[f64; 2]>>,
    pub h_int: Vec<Vec<[f64; 2]>>,
    pub phi: Vec<[f64; 2]>,
    /// Reject the model unless H_S φ = E φ.
    #[serde(default)]
    pub require_eigenstate: bool,
}

fn matrix_from_rows(name: &str, rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid(format!("{name} must be a square list of rows")));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl TryFrom<ModelFile> for BipartiteSystem {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        let phi = DVector::from_iterator(f.phi.len(), f.phi.iter().map(|z| C64::new(z[0], z[1])));
        let sys = BipartiteSystem::new(
            matrix_from_rows("h_p", &f.h_p)?,
            matrix_from_rows("h_s", &f.h_s)?,
            matrix_from_rows("h_int", &f.h_int)?,
            phi,
        )?;
        if f.require_eigenstate && sys.source_energy.is_none() {
            return Err(Error::invalid("phi is not an eigenstate of h_s"));
        }
        Ok(sys)
    }
}

impl From<BipartiteSystem> for ModelFile {
    fn from(s: BipartiteSystem) -> Self {
        ModelFile {
            h_p: matrix_to_rows(&s.h_p),
            h_s: matrix_to_rows(&s.h_s),
            h_int: matrix_to_rows(&s.h_int),
            phi: s.phi.iter().map(|z| [z.re, z.im]).collect(),
            require_eigenstate: false,
        }
    }
}

/// H_φ = Tr_S[(1 ⊗ P_φ) H].
pub fn effective_hamiltonian(sys: &BipartiteSystem) -> CMatrix {
    sys.reduce(&sys.hamiltonian())
}

/// ΔH²_φ = Tr_S[(1 ⊗ P_φ) H²] − H_φ².
pub fn zeno_variance(sys: &BipartiteSystem) -> CMatrix {
    let h = sys.hamiltonian();
    let hphi = sys.reduce(&h);
    sys.reduce(&(&h * &h)) - &hphi * &hphi
}

/// τ_Z = ħ / √Tr(ρ ΔH²_φ) for the probe state ρ.
pub fn zeno_time_for_state(sys: &BipartiteSystem, rho_p: &CMatrix) -> f64 {
    let var = (rho_p * zeno_variance(sys)).trace().re;
    HBAR / var.max(0.0).sqrt()
}

/// Order-of-magnitude Zeno time ħ b0 / (G m M) (s).
pub fn zeno_time_estimate(m_probe: f64, m_source: f64, b0: f64) -> f64 {
    HBAR * b0 / (G * m_probe * m_source)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZenoRateBounds {
    /// 1/τ_Z (s⁻¹).
    pub dynamics: f64,
    /// t_total/τ_Z² (s⁻¹).
    pub survival: f64,
}

impl ZenoRateBounds {
    pub fn combined(&self) -> f64 {
        self.dynamics.max(self.survival)
    }
}

pub fn zeno_rate_bounds(tau_z: f64, t_total: f64) -> ZenoRateBounds {
    ZenoRateBounds { dynamics: 1.0 / tau_z, survival: t_total / (tau_z * tau_z) }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurvivalEstimate {
    /// [1 − (τ/τ_Z)²]^N
    pub product: f64,
    /// 1 − N (τ/τ_Z)²
    pub linearized: f64,
    /// False when τ ≥ τ_Z; the forms are still evaluated.
    pub in_regime: bool,
}

pub fn survival_probability(tau: f64, tau_z: f64, n: u64) -> SurvivalEstimate {
    let x = (tau / tau_z).powi(2);
    SurvivalEstimate {
        product: (n as f64 * (-x).ln_1p()).exp(),
        linearized: 1.0 - n as f64 * x,
        in_regime: tau < tau_z,
    }
}

/// Check that ρ is a dim×dim density matrix.
pub fn validate_density_matrix(rho: &CMatrix, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::invalid(format!("density matrix must be {dim}x{dim}")));
    }
    if (rho - rho.adjoint()).norm() > STATE_TOL {
        return Err(Error::invalid("density matrix is not Hermitian"));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::invalid(format!("density matrix trace must be 1, got {tr}")));
    }
    let min = rho.clone().symmetric_eigen().eigenvalues.min();
    if min < -STATE_TOL {
        return Err(Error::invalid(format!("density matrix has negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// ½ Σ |λ_i(a − b)| for Hermitian a, b.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a - b;
    let d = (&d + d.adjoint()) * c(0.5);
    0.5 * d.symmetric_eigen().eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
}

/// exp(−iHt/ħ).
pub fn propagator(h: &CMatrix, t: f64) -> CMatrix {
    expm(&(h * C64::new(0.0, -t / HBAR)))
}

/// ρ ↦ U ρ U† with U = exp(−iHt/ħ).
pub fn unitary_evolve(h: &CMatrix, t: f64, rho: &CMatrix) -> CMatrix {
    let u = propagator(h, t);
    &u * rho * u.adjoint()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StroboscopicResult {
    pub n_steps: usize,
    pub tau: f64,
    /// Probability that all n measurements found φ.
    pub survival_prob: f64,
    /// Probability lost to the P_⊥ outcome over the run.
    pub rejected_prob: f64,
    /// Probe state conditioned on survival, unit trace.
    pub probe_state: CMatrix,
    /// Probability of finding φ at the last measurement given survival so far.
    pub frozen_fidelity: f64,
    /// Trace distance between `probe_state` and evolution under H_φ for nτ.
    pub effective_h_error: f64,
}

fn check_step(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("tau must be > 0 s, got {tau}")));
    }
    Ok(())
}

/// Selective stroboscopic evolution: n rounds of exp(−iHτ/ħ) followed by
/// the {P_φ, P_⊥} measurement on the source, keeping the φ branch.
///
/// After each round the total state is ρ_P ⊗ P_φ, so the map reduces to the
/// probe-space Kraus operator K = ⟨φ|U|φ⟩. The per-round loss is evaluated
/// as Tr(ρ W†P_⊥W) with W = U(1 ⊗ |φ⟩), which avoids forming 1 − Tr(KρK†).
pub fn strobo_evolve(sys: &BipartiteSystem, tau: f64, n: usize, rho_p: &CMatrix) -> Result<StroboscopicResult> {
    check_step(tau)?;
    validate_density_matrix(rho_p, sys.dim_p)?;
    let u = propagator(&sys.hamiltonian(), tau);
    let w = &u * sys.embed();
    let pw = sys.freeze_projector() * &w;
    let k = sys.embed().adjoint() * &w;
    let leak = &w - &pw;
    let loss_op = leak.adjoint() * &leak;

    let mut rho = rho_p.clone();
    let mut log_survival = 0.0f64;
    let mut rejected = 0.0;
    let mut last_p = 1.0;
    for _ in 0..n {
        let loss = (&rho * &loss_op).trace().re.clamp(0.0, 1.0);
        rejected += log_survival.exp() * loss;
        log_survival += (-loss).ln_1p();
        last_p = 1.0 - loss;
        let next = &k * &rho * k.adjoint();
        let tr = next.trace().re;
        if !(tr > 0.0) {
            return Err(Error::invalid("phi branch has zero probability"));
        }
        rho = (&next + next.adjoint()) * c(0.5 / tr);
    }
    let expected = unitary_evolve(&effective_hamiltonian(sys), tau * n as f64, rho_p);
    Ok(StroboscopicResult {
        n_steps: n,
        tau,
        survival_prob: log_survival.exp(),
        rejected_prob: rejected,
        effective_h_error: trace_distance(&rho, &expected),
        probe_state: rho,
        frozen_fidelity: last_p,
    })
}

/// Non-selective channel ρ ↦ Σ_j (1⊗P_j) U ρ U† (1⊗P_j), j ∈ {φ, ⊥}, applied
/// n times to a total-space density matrix.
pub fn strobo_nonselective(sys: &BipartiteSystem, tau: f64, n: usize, rho: &CMatrix) -> Result<CMatrix> {
    check_step(tau)?;
    let dim = sys.dim_p * sys.dim_s;
    validate_density_matrix(rho, dim)?;
    let u = propagator(&sys.hamiltonian(), tau);
    let pf = sys.freeze_projector();
    let pp = CMatrix::identity(dim, dim) - &pf;
    let mut r = rho.clone();
    for _ in 0..n {
        let ev = &u * &r * u.adjoint();
        r = &pf * &ev * &pf + &pp * &ev * &pp;
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZenoScanRow {
    pub tau: f64,
    pub n: usize,
    pub survival_sim: f64,
    pub survival_formula: f64,
    pub trace_dist: f64,
}

/// For each N, split the fixed total time `t_total` into N rounds and compare
/// the simulated survival with [1 − (τ/τ_Z)²]^N, τ_Z taken for the initial
/// probe state.
pub fn zeno_scan(sys: &BipartiteSystem, t_total: f64, ns: &[usize], rho_p: &CMatrix) -> Result<Vec<ZenoScanRow>> {
    check_step(t_total)?;
    validate_density_matrix(rho_p, sys.dim_p)?;
    if ns.contains(&0) {
        return Err(Error::invalid("N must be >= 1"));
    }
    let tau_z = zeno_time_for_state(sys, rho_p);
    ns.par_iter()
        .map(|&n| {
            let tau = t_total / n as f64;
            let r = strobo_evolve(sys, tau, n, rho_p)?;
            Ok(ZenoScanRow {
                tau,
                n,
                survival_sim: r.survival_prob,
                survival_formula: survival_probability(tau, tau_z, n as u64).product,
                trace_dist: r.effective_h_error,
            })
        })
        .collect()
}

pub fn zeno_scan_csv(rows: &[ZenoScanRow], comment: Option<&str>) -> String {
    let mut csv = Csv::new(comment, &["tau", "N", "survival_sim", "survival_formula", "trace_dist"]);
    for r in rows {
        csv.row([num(r.tau), r.n.to_string(), num(r.survival_sim), num(r.survival_formula), num(r.trace_dist)]);
    }
    csv.finish()
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Pure state |ψ⟩⟨ψ| from amplitudes.
pub fn pure_state(amps: &[C64]) -> CMatrix {
    let v = DVector::from_column_slice(amps);
    let v = &v / c(v.norm());
    &v * v.adjoint()
}
