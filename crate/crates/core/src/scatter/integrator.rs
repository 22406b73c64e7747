//! Dormand–Prince 5(4) integrator for a point probe in a static force field.
//!
//! State is (position, velocity). The error norm mixes absolute scales for
//! position and velocity so that the small transverse velocity picked up
//! during a weak deflection is resolved to the requested relative tolerance.

use nalgebra::Vector3;

// Dormand–Prince tableau. The force field is static, so the node
// abscissae c_i never enter.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// b - b* (fifth minus embedded fourth order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub x: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl PhaseState {
    fn axpy(&self, h: f64, k: &[(Vector3<f64>, Vector3<f64>)], w: &[f64]) -> PhaseState {
        let mut x = self.x;
        let mut v = self.v;
        for (ki, wi) in k.iter().zip(w) {
            if *wi != 0.0 {
                x += ki.0 * (h * wi);
                v += ki.1 * (h * wi);
            }
        }
        PhaseState { x, v }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.v.iter()).all(|c| c.is_finite())
    }
}

/// Tolerances for the mixed error norm.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    /// Absolute position scale (m); the position tolerance is `rtol * length_scale`.
    pub length_scale: f64,
    /// Absolute velocity scale (m/s); the velocity tolerance is `rtol * velocity_scale`.
    pub velocity_scale: f64,
    pub dt_max: f64,
}

/// State together with its derivative (velocity, acceleration).
type Cached = (PhaseState, (Vector3<f64>, Vector3<f64>));

pub struct DormandPrince<F> {
    accel: F,
    ctl: StepControl,
    fsal: Option<Cached>,
}

pub struct StepOutcome {
    pub h_used: f64,
    pub next: PhaseState,
    pub h_next: f64,
}

impl<F> DormandPrince<F>
where
    F: Fn(&Vector3<f64>) -> Vector3<f64>,
{
    pub fn new(accel: F, ctl: StepControl) -> Self {
        Self { accel, ctl, fsal: None }
    }

    fn deriv(&self, s: &PhaseState) -> (Vector3<f64>, Vector3<f64>) {
        (s.v, (self.accel)(&s.x))
    }

    /// Take one accepted step starting with trial size `h`, shrinking on
    /// rejection. Returns `None` if the step size underflows or the state
    /// stops being finite.
    pub fn step(&mut self, y: &PhaseState, mut h: f64) -> Option<StepOutcome> {
        let k1 = match self.fsal {
            Some((ref s, k)) if s == y => k,
            _ => self.deriv(y),
        };
        loop {
            h = h.min(self.ctl.dt_max);
            if !(h > 0.0) || !h.is_finite() {
                return None;
            }
            let k2 = self.deriv(&y.axpy(h, &[k1], &[A21]));
            let k3 = self.deriv(&y.axpy(h, &[k1, k2], &[A31, A32]));
            let k4 = self.deriv(&y.axpy(h, &[k1, k2, k3], &[A41, A42, A43]));
            let k5 = self.deriv(&y.axpy(h, &[k1, k2, k3, k4], &[A51, A52, A53, A54]));
            let k6 = self.deriv(&y.axpy(h, &[k1, k2, k3, k4, k5], &[A61, A62, A63, A64, A65]));
            let ks = [k1, k2, k3, k4, k5, k6];
            let next = y.axpy(h, &ks, &[A71, 0.0, A73, A74, A75, A76]);
            if !next.is_finite() {
                return None;
            }
            let k7 = self.deriv(&next);
            let ks7 = [k1, k2, k3, k4, k5, k6, k7];
            let mut ex = Vector3::zeros();
            let mut ev = Vector3::zeros();
            for (k, e) in ks7.iter().zip([E1, 0.0, E3, E4, E5, E6, E7]) {
                if e != 0.0 {
                    ex += k.0 * (h * e);
                    ev += k.1 * (h * e);
                }
            }
            let err = self.error_norm(y, &next, &ex, &ev);
            if !err.is_finite() {
                return None;
            }
            if err <= 1.0 {
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                self.fsal = Some((next, k7));
                return Some(StepOutcome { h_used: h, next, h_next: h * factor });
            }
            h *= (0.9 * err.powf(-0.25)).clamp(0.1, 0.9);
            if h < 1e-300 {
                return None;
            }
        }
    }

    fn error_norm(&self, y: &PhaseState, next: &PhaseState, ex: &Vector3<f64>, ev: &Vector3<f64>) -> f64 {
        let c = &self.ctl;
        let atol_x = c.rtol * c.length_scale;
        let atol_v = c.rtol * c.velocity_scale;
        let mut acc = 0.0;
        for i in 0..3 {
            let sx = atol_x + c.rtol * y.x[i].abs().max(next.x[i].abs());
            let sv = atol_v + c.rtol * y.v[i].abs().max(next.v[i].abs());
            acc += (ex[i] / sx).powi(2) + (ev[i] / sv).powi(2);
        }
        (acc / 6.0).sqrt()
    }
}

/// Cubic Hermite interpolation of position between two samples, `s ∈ [0, 1]`.
pub fn hermite_position(
    t0: f64,
    a: &PhaseState,
    t1: f64,
    b: &PhaseState,
    s: f64,
) -> (Vector3<f64>, Vector3<f64>) {
    let h = t1 - t0;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let x = a.x * h00 + a.v * (h * h10) + b.x * h01 + b.v * (h * h11);
    // d/dt of the interpolant
    let d00 = (6.0 * s2 - 6.0 * s) / h;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = (-6.0 * s2 + 6.0 * s) / h;
    let d11 = 3.0 * s2 - 2.0 * s;
    let v = a.x * d00 + a.v * d10 + b.x * d01 + b.v * d11;
    (x, v)
}
