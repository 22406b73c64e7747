//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use nalgebra::{Complex, DMatrix};

type C = Complex<f64>;

const THETA_13: f64 = 5.371_920_351_148_152;

const B: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

fn norm1(a: &DMatrix<C>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// exp(A) for a square complex matrix.
///
/// # Panics
/// If `a` is not square or contains non-finite entries.
pub fn expm(a: &DMatrix<C>) -> DMatrix<C> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = norm1(a);
    assert!(norm.is_finite(), "expm input is not finite");
    let s = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let a = a * C::new(0.5f64.powi(s), 0.0);

    let id = DMatrix::<C>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let r = |x: f64| C::new(x, 0.0);

    let u_inner = &a6 * (&a6 * r(B[13]) + &a4 * r(B[11]) + &a2 * r(B[9]));
    let u = &a * (u_inner + &a6 * r(B[7]) + &a4 * r(B[5]) + &a2 * r(B[3]) + &id * r(B[1]));
    let v_inner = &a6 * (&a6 * r(B[12]) + &a4 * r(B[10]) + &a2 * r(B[8]));
    let v = v_inner + &a6 * r(B[6]) + &a4 * r(B[4]) + &a2 * r(B[2]) + &id * r(B[0]);

    let p = &v + &u;
    let q = &v - &u;
    let mut x = q.lu().solve(&p).expect("Padé denominator is singular");
    for _ in 0..s {
        x = &x * &x;
    }
    x
}
