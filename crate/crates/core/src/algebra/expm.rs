//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (Higham 2005, "The scaling and squaring method for the
//! matrix exponential revisited").
//!
//! For anti-Hermitian input the [m/m] Padé approximant `(V − U)⁻¹(V + U)` is
//! unitary in exact arithmetic, so the result stays unitary to rounding no
//! matter how coarse the approximation order is.

use crate::error::{Error, Result};
use crate::linalg::{anti_hermiticity_defect, ensure_square, identity, max_abs, solve, ComplexMatrix};
use crate::scalar::{re, Cplx, Real};

// θ_m from Higham (2005), Table 2.3, for 1-norm scaling.
const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_23e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068;
const THETA_13: f64 = 5.371_920_351_148_152;

/// Absolute anti-Hermiticity tolerance for [`expm_skew`] in the given scalar type.
pub fn skew_tolerance<T: Real>(scale: T) -> T {
    let floor = T::lit(1e-10);
    floor.max(T::lit(100.0) * T::epsilon() * scale.max(T::one()))
}

/// Exponential of an anti-Hermitian generator (`i·Hermitian`, or
/// `βA₊ − β*A₋`). The result is unitary.
pub fn expm_skew<T: Real>(generator: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    ensure_square(generator)?;
    let deviation = anti_hermiticity_defect(generator);
    let tolerance = skew_tolerance(max_abs(generator));
    if deviation > tolerance {
        return Err(Error::NotAntiHermitian {
            deviation: deviation.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    expm(generator)
}

/// General dense matrix exponential.
pub fn expm<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = ensure_square(a)?;
    if n == 0 {
        return Ok(ComplexMatrix::zeros((0, 0)));
    }
    if n == 1 {
        return Ok(ComplexMatrix::from_elem((1, 1), a[[0, 0]].exp()));
    }

    let norm = one_norm(a).to_f64_lossy();
    for (order, theta) in [(3, THETA_3), (5, THETA_5), (7, THETA_7), (9, THETA_9)] {
        if norm <= theta {
            return pade(a, order);
        }
    }

    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let factor = re(T::lit(2f64.powi(-squarings)));
    let scaled = a.mapv(|z| z * factor);
    let mut result = pade(&scaled, 13)?;
    for _ in 0..squarings {
        result = result.dot(&result);
    }
    Ok(result)
}

fn one_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    a.columns()
        .into_iter()
        .map(|col| col.iter().fold(T::zero(), |s, z| s + z.norm()))
        .fold(T::zero(), T::max)
}

/// `b_k` of the [m/m] Padé approximant to `exp`.
fn pade_coefficients<T: Real>(order: usize) -> Vec<T> {
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut b = 1.0f64;
    coeffs.push(T::one());
    for k in 1..=order {
        b *= (order + 1 - k) as f64 / ((2 * order + 1 - k) * k) as f64;
        coeffs.push(T::lit(b));
    }
    coeffs
}

fn pade<T: Real>(a: &ComplexMatrix<T>, order: usize) -> Result<ComplexMatrix<T>> {
    let n = a.nrows();
    let b: Vec<Cplx<T>> = pade_coefficients::<T>(order).into_iter().map(re).collect();
    let eye = identity::<T>(n);
    let a2 = a.dot(a);

    let (u, v) = if order == 13 {
        let a4 = a2.dot(&a2);
        let a6 = a4.dot(&a2);
        let w1 = a6.mapv(|z| z * b[13]) + a4.mapv(|z| z * b[11]) + a2.mapv(|z| z * b[9]);
        let w2 = a6.mapv(|z| z * b[7]) + a4.mapv(|z| z * b[5]) + a2.mapv(|z| z * b[3]) + eye.mapv(|z| z * b[1]);
        let u = a.dot(&(a6.dot(&w1) + w2));
        let z1 = a6.mapv(|z| z * b[12]) + a4.mapv(|z| z * b[10]) + a2.mapv(|z| z * b[8]);
        let z2 = a6.mapv(|z| z * b[6]) + a4.mapv(|z| z * b[4]) + a2.mapv(|z| z * b[2]) + eye.mapv(|z| z * b[0]);
        (u, a6.dot(&z1) + z2)
    } else {
        // Horner-free accumulation over even powers; order ≤ 9 so at most A⁸.
        let mut power = eye.clone();
        let mut odd = eye.mapv(|z| z * b[1]);
        let mut even = eye.mapv(|z| z * b[0]);
        for k in 1..=(order / 2) {
            power = power.dot(&a2);
            odd = odd + power.mapv(|z| z * b[2 * k + 1]);
            even = even + power.mapv(|z| z * b[2 * k]);
        }
        (a.dot(&odd), even)
    };

    solve(&(&v - &u), &(&v + &u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, max_abs_diff, unitarity_defect};
    use crate::scalar::im;
    use ndarray::array;
    use num_traits::One;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Cplx<f64> {
        Cplx::new(re, im)
    }

    fn is_identity(a: &ComplexMatrix<f64>) -> bool {
        a.indexed_iter()
            .all(|((r, k), z)| if r == k { *z == Cplx::one() } else { *z == c(0.0, 0.0) })
    }

    /// Plain Taylor series with enough terms; only safe for modest norms.
    fn taylor_exp(a: &ComplexMatrix<f64>, terms: usize) -> ComplexMatrix<f64> {
        let mut sum = identity::<f64>(a.nrows());
        let mut term = identity::<f64>(a.nrows());
        for k in 1..terms {
            term = term.dot(a).mapv(|z| z / k as f64);
            sum += &term;
        }
        sum
    }

    #[test]
    fn pade_coefficients_match_higham() {
        let b = pade_coefficients::<f64>(13);
        assert!((b[1] - 0.5).abs() < 1e-16);
        assert!((b[2] - 0.12).abs() < 1e-16);
        assert!((b[13] - 1.544_049_750_670_309e-17).abs() < 1e-30);
    }

    #[test]
    fn zero_generator_gives_identity() {
        let z = ComplexMatrix::<f64>::zeros((3, 3));
        let e = expm_skew(&z).unwrap();
        assert!(is_identity(&e));
    }

    #[test]
    fn diagonal_phase_generator() {
        let g = array![[im(PI), c(0.0, 0.0)], [c(0.0, 0.0), im(-PI)]];
        let e = expm_skew(&g).unwrap();
        assert!(max_abs_diff(&e, &identity::<f64>(2).mapv(|z| -z)) < 1e-14);
    }

    #[test]
    fn quarter_turn_rotation_matches_taylor() {
        // (π/2)(σ₊ − σ₋)
        let g = array![[c(0.0, 0.0), c(PI / 2.0, 0.0)], [c(-PI / 2.0, 0.0), c(0.0, 0.0)]];
        let e = expm_skew(&g).unwrap();
        let expected = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(-1.0, 0.0), c(0.0, 0.0)]];
        assert!(max_abs_diff(&e, &expected) < 1e-15);
        assert!(max_abs_diff(&e, &taylor_exp(&g, 40)) < 1e-12);
    }

    #[test]
    fn agrees_with_taylor_on_dense_generator() {
        let h = array![
            [c(0.3, 0.0), c(0.1, 0.7), c(-0.4, 0.2)],
            [c(0.1, -0.7), c(-1.1, 0.0), c(0.5, 0.5)],
            [c(-0.4, -0.2), c(0.5, -0.5), c(0.8, 0.0)]
        ];
        for scale in [0.01, 0.2, 0.9, 2.0, 4.0] {
            let g = h.mapv(|z| z * im(scale));
            let e = expm_skew(&g).unwrap();
            assert!(max_abs_diff(&e, &taylor_exp(&g, 80)) < 1e-12, "scale {scale}");
            assert!(unitarity_defect(&e) < 1e-14);
        }
    }

    #[test]
    fn rejects_hermitian_generator() {
        let g = array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        assert!(matches!(expm_skew(&g), Err(Error::NotAntiHermitian { .. })));
        let h = dagger(&g);
        assert!(expm(&h).is_ok());
    }

    #[test]
    fn rejects_non_square() {
        let g = ComplexMatrix::<f64>::zeros((2, 3));
        assert_eq!(expm_skew(&g), Err(Error::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn single_precision_is_unitary() {
        let g: ComplexMatrix<f32> = array![
            [Cplx::new(0.0, 1.5), Cplx::new(0.7, 0.2)],
            [Cplx::new(-0.7, 0.2), Cplx::new(0.0, -0.3)]
        ];
        let e = expm_skew(&g).unwrap();
        assert!(unitarity_defect(&e) < 1e-5);
    }
}
