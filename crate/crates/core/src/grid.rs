//! Uniform time grids and cumulative quadrature on them.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `0 = t₀ < t₁ < … < t_N = horizon` with the smallest `N` such that the
/// spacing does not exceed `step`.
pub fn uniform_grid<T: Real>(horizon: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !step.is_finite() {
        return Err(Error::InvalidStep(step.to_f64_lossy()));
    }
    if !(horizon > T::zero()) || !horizon.is_finite() {
        return Err(Error::InvalidStep(horizon.to_f64_lossy()));
    }
    let ratio = (horizon / step).to_f64_lossy();
    let intervals = ((ratio * (1.0 - 1e-12)).ceil() as usize).max(1);
    let n = T::from_usize(intervals).unwrap();
    Ok((0..=intervals)
        .map(|k| horizon * T::from_usize(k).unwrap() / n)
        .collect())
}

/// Spacing of a uniform grid.
pub fn spacing<T: Real>(times: &[T]) -> T {
    match times.len() {
        0 | 1 => T::zero(),
        n => (times[n - 1] - times[0]) / T::from_usize(n - 1).unwrap(),
    }
}

/// Running integral `∫₀^{t_k} f` for samples on a uniform grid of spacing `h`.
///
/// Even nodes use composite Simpson; odd nodes add the three-point
/// single-interval rule `h/12 (−f_{k−2} + 8 f_{k−1} + 5 f_k)` on top of the
/// preceding even node. Two-sample input falls back to the trapezoid rule.
pub fn cumulative_simpson<T: Real>(f: &[T], h: T) -> Vec<T> {
    let n = f.len();
    let mut out = vec![T::zero(); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = h * (f[0] + f[1]) / T::lit(2.0);
        return out;
    }
    let third = h / T::lit(3.0);
    let twelfth = h / T::lit(12.0);
    let (five, eight, four) = (T::lit(5.0), T::lit(8.0), T::lit(4.0));
    out[1] = twelfth * (five * f[0] + eight * f[1] - f[2]);
    for k in 2..n {
        out[k] = if k % 2 == 0 {
            out[k - 2] + third * (f[k - 2] + four * f[k - 1] + f[k])
        } else {
            out[k - 1] + twelfth * (-f[k - 2] + eight * f[k - 1] + five * f[k])
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_horizon_and_respects_step() {
        let g = uniform_grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(spacing(&g) <= 0.3);
        let g = uniform_grid(2.0, 0.5).unwrap();
        assert_eq!(g.len(), 5);
        assert!(uniform_grid(1.0, 0.0).is_err());
        assert!(uniform_grid(1.0, f64::NAN).is_err());
    }

    #[test]
    fn simpson_exactness() {
        let h = 0.1;
        // quadratics at every node, cubics at even nodes
        let f: Vec<f64> = (0..=11).map(|k| 3.0 * (k as f64 * h).powi(2) - 2.0 * k as f64 * h).collect();
        for (k, v) in cumulative_simpson(&f, h).iter().enumerate() {
            let t = k as f64 * h;
            assert!((v - (t.powi(3) - t * t)).abs() < 1e-14, "k={k}");
        }
        let f: Vec<f64> = (0..=11).map(|k| (k as f64 * h).powi(3)).collect();
        for (k, v) in cumulative_simpson(&f, h).iter().enumerate().step_by(2) {
            let t = k as f64 * h;
            assert!((v - t.powi(4) / 4.0).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn simpson_converges_at_fourth_order() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|k| (3.0 * k as f64 * h).cos()).collect();
            let cum = cumulative_simpson(&f, h);
            (cum[n] - (3.0f64).sin() / 3.0).abs()
        };
        let ratio = err(20) / err(40);
        assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    }
}
