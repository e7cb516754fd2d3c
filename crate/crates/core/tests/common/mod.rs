#![allow(dead_code)]

use lr_decoherence::algebra::{build_representation, AlgebraSpec, Representation, Spin};
use lr_decoherence::linalg::ComplexMatrix;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub fn su2(twice: u32) -> Representation<f64> {
    build_representation(AlgebraSpec::su2(), Spin::from_twice(twice)).unwrap()
}

pub fn rep(m: f64, n: f64, twice: u32) -> Representation<f64> {
    build_representation(AlgebraSpec::new(m, n).unwrap(), Spin::from_twice(twice)).unwrap()
}

/// Ascending eigenvalues of a Hermitian matrix, by nalgebra's solver.
pub fn hermitian_eigenvalues(h: &ComplexMatrix<f64>) -> Vec<f64> {
    let n = h.nrows();
    let m = DMatrix::<Complex64>::from_fn(n, n, |r, c| h[[r, c]]);
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn factorial(k: i64) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// Wigner small-d `d^j_{m'm}(β) = ⟨j m'| e^{−iβJ_y} |j m⟩` from the explicit sum.
pub fn wigner_d(twice_j: u32, mp: f64, m: f64, beta: f64) -> f64 {
    let j = twice_j as f64 / 2.0;
    let (jm, jmm, jmp, jmmp) = ((j + m) as i64, (j - m) as i64, (j + mp) as i64, (j - mp) as i64);
    let dm = (mp - m) as i64;
    let pre = (factorial(jm) * factorial(jmm) * factorial(jmp) * factorial(jmmp)).sqrt();
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let mut total = 0.0;
    for k in 0..=(2 * twice_j as i64) {
        let (d1, d2, d3) = (jm - k, dm + k, jmmp - k);
        if d1 < 0 || d2 < 0 || d3 < 0 {
            continue;
        }
        let sign = if (dm + k) % 2 == 0 { 1.0 } else { -1.0 };
        let cpow = (jm + jmmp - 2 * k) as i32;
        let spow = (dm + 2 * k) as i32;
        total += sign * pre / (factorial(d1) * factorial(k) * factorial(d2) * factorial(d3)) * c.powi(cpow) * s.powi(spow);
    }
    total
}
