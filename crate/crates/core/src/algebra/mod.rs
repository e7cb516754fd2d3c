//! Finite-dimensional representations of the three-generator algebra
//!
//! ```text
//! [A₊, A₋] = n·A,   [A, A₊] = m·A₊,   [A, A₋] = −m·A₋
//! ```
//!
//! Every compact case (`m·n > 0`) is realised on a spin-`j` multiplet by
//! rescaling the angular-momentum matrices: `A = m·J₃`, `A± = √(mn/2)·J±`.

mod expm;

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{basis_vector, commutator, max_abs_diff, scale, ComplexMatrix, StateVector};
use crate::scalar::{re, Cplx, Real};

pub use expm::{expm, expm_skew, skew_tolerance};

/// Largest spin accepted by [`build_representation`] (dimension 201).
pub const DEFAULT_J_MAX: f64 = 100.0;

/// Non-negative half-integer, stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);

    pub fn from_twice(twice: u32) -> Self {
        Spin(twice)
    }

    /// Accepts any value whose double is a non-negative integer (to 1e-9).
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !j.is_finite() || j < 0.0 || (twice - twice.round()).abs() > 1e-9 || twice > u32::MAX as f64 {
            return Err(Error::InvalidSpin(j.to_string()));
        }
        Ok(Spin(twice.round() as u32))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// `μ = j, j−1, …, −j`, the order used for every basis in this crate.
    pub fn projections(self) -> impl Iterator<Item = f64> {
        let j = self.value();
        (0..self.dim()).map(move |k| j - k as f64)
    }

    /// All spins `1/2, 1, 3/2, …` up to and including `self`.
    pub fn ladder_up_to(self) -> impl Iterator<Item = Spin> {
        (1..=self.0).map(Spin)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    /// Parses `"3/2"`, `"1.5"` or `"2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidSpin(s.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            return match den.trim() {
                "2" => Ok(Spin(num)),
                "1" => Ok(Spin(2 * num)),
                _ => Err(bad()),
            };
        }
        let j: f64 = s.parse().map_err(|_| bad())?;
        Spin::new(j).map_err(|_| bad())
    }
}

/// Structure constants `(m, n)` of a compact algebra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraSpec<T> {
    m: T,
    n: T,
}

impl<T: Real> AlgebraSpec<T> {
    pub fn new(m: T, n: T) -> Result<Self> {
        let product = m * n;
        if !(product > T::zero()) || !product.is_finite() {
            return Err(Error::NonCompactAlgebra { product: product.to_f64_lossy() });
        }
        Ok(Self { m, n })
    }

    /// `(m, n) = (1, 2)`: plain su(2) with `A = J₃`, `A± = J±`.
    pub fn su2() -> Self {
        Self { m: T::one(), n: T::lit(2.0) }
    }

    pub fn m(&self) -> T {
        self.m
    }

    pub fn n(&self) -> T {
        self.n
    }

    /// `√(mn/2)`, the scale relating `A±` to `J±`.
    pub fn root(&self) -> T {
        (self.m * self.n / T::lit(2.0)).sqrt()
    }

    /// `y = m / √(mn/2)`, the invariant's transverse weight.
    pub fn y(&self) -> T {
        self.m / self.root()
    }

    /// `x = 1 / √(mn/2)`, the displacement scale.
    pub fn x(&self) -> T {
        self.root().recip()
    }
}

/// Spin-`j` matrix representation of an [`AlgebraSpec`].
///
/// The basis is ordered by decreasing `A_z` projection, so index 0 is the
/// highest-weight state `|j, j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation<T> {
    spec: AlgebraSpec<T>,
    j: Spin,
    a_plus: ComplexMatrix<T>,
    a_minus: ComplexMatrix<T>,
    a_z: ComplexMatrix<T>,
    eigenvalues: Vec<T>,
}

/// Builds the spin-`j` representation with the default `j` ceiling.
pub fn build_representation<T: Real>(spec: AlgebraSpec<T>, j: Spin) -> Result<Representation<T>> {
    build_representation_bounded(spec, j, DEFAULT_J_MAX)
}

pub fn build_representation_bounded<T: Real>(
    spec: AlgebraSpec<T>,
    j: Spin,
    j_max: f64,
) -> Result<Representation<T>> {
    // Re-validate in case the spec was built through a struct update elsewhere.
    let spec = AlgebraSpec::new(spec.m, spec.n)?;
    if j.twice() == 0 {
        return Err(Error::InvalidSpin(j.to_string()));
    }
    if j.value() > j_max {
        return Err(Error::SpinTooLarge { j: j.value(), j_max });
    }

    let dim = j.dim();
    let jv = j.value();
    let mu: Vec<f64> = j.projections().collect();
    let root = spec.root();

    let mut j_plus = Array2::<Cplx<T>>::zeros((dim, dim));
    for col in 1..dim {
        // J₊|j, μ⟩ = √(j(j+1) − μ(μ+1)) |j, μ+1⟩, and μ+1 sits one row up.
        let m = mu[col];
        j_plus[[col - 1, col]] = re(T::lit((jv * (jv + 1.0) - m * (m + 1.0)).sqrt()));
    }
    let a_plus = scale(&j_plus, re(root));
    let a_minus = a_plus.t().mapv(|z| z.conj());
    let eigenvalues: Vec<T> = mu.iter().map(|&m| spec.m * T::lit(m)).collect();
    let a_z = Array2::from_diag(&ndarray::Array1::from_iter(eigenvalues.iter().map(|&l| re(l))));

    Ok(Representation { spec, j, a_plus, a_minus, a_z, eigenvalues })
}

impl<T: Real> Representation<T> {
    pub fn spec(&self) -> &AlgebraSpec<T> {
        &self.spec
    }

    pub fn j(&self) -> Spin {
        self.j
    }

    pub fn dim(&self) -> usize {
        self.j.dim()
    }

    pub fn a_plus(&self) -> &ComplexMatrix<T> {
        &self.a_plus
    }

    pub fn a_minus(&self) -> &ComplexMatrix<T> {
        &self.a_minus
    }

    pub fn a_z(&self) -> &ComplexMatrix<T> {
        &self.a_z
    }

    /// `λ_k = m·μ_k` in basis order.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// `m·j`, the eigenvalue of the highest-weight state.
    pub fn highest_weight(&self) -> T {
        self.eigenvalues[0]
    }

    /// Basis index of the `A_z` eigenvalue `lambda`.
    pub fn eigen_index(&self, lambda: T) -> Result<usize> {
        let tol = T::lit(1e-9) * self.spec.m.abs().max(T::one());
        self.eigenvalues
            .iter()
            .position(|&l| (l - lambda).abs() <= tol)
            .ok_or(Error::NotAnEigenvalue(lambda.to_f64_lossy()))
    }

    /// The `A_z` eigenvector `|λ⟩`.
    pub fn eigenvector(&self, lambda: T) -> Result<StateVector<T>> {
        Ok(basis_vector(self.dim(), self.eigen_index(lambda)?))
    }

    /// `β A₊ − β* A₋`
    pub fn displacement_generator(&self, beta: Cplx<T>) -> ComplexMatrix<T> {
        scale(&self.a_plus, beta) - scale(&self.a_minus, beta.conj())
    }

    /// `c₊ A₊ + c₋ A₋ + c_z A`
    pub fn combine(&self, c_plus: Cplx<T>, c_minus: Cplx<T>, c_z: Cplx<T>) -> ComplexMatrix<T> {
        scale(&self.a_plus, c_plus) + scale(&self.a_minus, c_minus) + scale(&self.a_z, c_z)
    }
}

/// Largest entrywise violation of the three defining commutation relations.
pub fn commutator_residual<T: Real>(rep: &Representation<T>) -> T {
    let (m, n) = (re(rep.spec.m), re(rep.spec.n));
    let r1 = max_abs_diff(&commutator(&rep.a_plus, &rep.a_minus), &scale(&rep.a_z, n));
    let r2 = max_abs_diff(&commutator(&rep.a_z, &rep.a_plus), &scale(&rep.a_plus, m));
    let r3 = max_abs_diff(&commutator(&rep.a_z, &rep.a_minus), &scale(&rep.a_minus, -m));
    r1.max(r2).max(r3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, max_abs};
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn spin_parsing() {
        assert_eq!("1/2".parse::<Spin>().unwrap(), Spin::HALF);
        assert_eq!("1.5".parse::<Spin>().unwrap(), Spin::from_twice(3));
        assert_eq!("25".parse::<Spin>().unwrap(), Spin::from_twice(50));
        assert_eq!("4/1".parse::<Spin>().unwrap(), Spin::from_twice(8));
        for bad in ["-1", "0.3", "1/3", "x", ""] {
            assert!(bad.parse::<Spin>().is_err(), "{bad}");
        }
        assert_eq!(Spin::from_twice(3).to_string(), "3/2");
        assert_eq!(Spin::from_twice(4).to_string(), "2");
    }

    #[test]
    fn spin_half_su2() {
        let rep = build_representation(AlgebraSpec::<f64>::su2(), Spin::HALF).unwrap();
        assert_eq!(rep.a_z(), &ndarray::array![[c(0.5), c(0.0)], [c(0.0), c(-0.5)]]);
        assert_eq!(rep.a_plus(), &ndarray::array![[c(0.0), c(1.0)], [c(0.0), c(0.0)]]);
    }

    #[test]
    fn spin_one_su2() {
        let rep = build_representation(AlgebraSpec::<f64>::su2(), Spin::from_twice(2)).unwrap();
        let s2 = 2f64.sqrt();
        assert_eq!(rep.eigenvalues(), &[1.0, 0.0, -1.0]);
        assert!((rep.a_plus()[[0, 1]].re - s2).abs() < 1e-15);
        assert!((rep.a_plus()[[1, 2]].re - s2).abs() < 1e-15);
        let nonzero = rep.a_plus().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        assert_eq!(max_abs(rep.a_plus()), s2);
    }

    #[test]
    fn rescaled_spin_half() {
        let spec = AlgebraSpec::new(2.0, 4.0).unwrap();
        let rep = build_representation(spec, Spin::HALF).unwrap();
        assert_eq!(rep.a_z(), &ndarray::array![[c(1.0), c(0.0)], [c(0.0), c(-1.0)]]);
        assert_eq!(rep.a_plus(), &ndarray::array![[c(0.0), c(2.0)], [c(0.0), c(0.0)]]);
        // brute-force entrywise commutators
        let (p, mi, z) = (rep.a_plus(), rep.a_minus(), rep.a_z());
        let pm = p.dot(mi) - mi.dot(p);
        let zp = z.dot(p) - p.dot(z);
        let zm = z.dot(mi) - mi.dot(z);
        for r in 0..2 {
            for k in 0..2 {
                assert_eq!(pm[[r, k]], z[[r, k]] * 4.0);
                assert_eq!(zp[[r, k]], p[[r, k]] * 2.0);
                assert_eq!(zm[[r, k]], mi[[r, k]] * -2.0);
            }
        }
        assert_eq!(spec.y(), 1.0);
        assert_eq!(spec.x(), 0.5);
    }

    #[test]
    fn residual_detects_corruption() {
        let mut rep = build_representation(AlgebraSpec::<f64>::su2(), Spin::from_twice(3)).unwrap();
        assert!(commutator_residual(&rep) <= 1e-14);
        rep.a_plus[[0, 1]] += c(0.01);
        assert!(commutator_residual(&rep) > 1e-3);
    }

    #[test]
    fn spin_five_residual() {
        let rep = build_representation(AlgebraSpec::<f64>::su2(), Spin::from_twice(10)).unwrap();
        assert!(commutator_residual(&rep) <= 1e-13);
    }

    #[test]
    fn structure_is_hermitian_conjugate() {
        let rep = build_representation(AlgebraSpec::new(0.5, 3.0).unwrap(), Spin::from_twice(5)).unwrap();
        assert_eq!(&dagger(rep.a_plus()), rep.a_minus());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(AlgebraSpec::new(1.0, -2.0), Err(Error::NonCompactAlgebra { .. })));
        assert!(matches!(AlgebraSpec::new(0.0, 2.0), Err(Error::NonCompactAlgebra { .. })));
        assert!(AlgebraSpec::new(-1.0, -2.0).is_ok());
        let su2 = AlgebraSpec::<f64>::su2();
        assert!(matches!(build_representation(su2, Spin::from_twice(0)), Err(Error::InvalidSpin(_))));
        assert!(matches!(
            build_representation(su2, Spin::from_twice(202)),
            Err(Error::SpinTooLarge { .. })
        ));
        assert!(build_representation_bounded(su2, Spin::from_twice(202), 101.0).is_ok());
    }

    #[test]
    fn eigen_lookup() {
        let rep = build_representation(AlgebraSpec::new(2.0, 1.0).unwrap(), Spin::from_twice(2)).unwrap();
        assert_eq!(rep.eigen_index(2.0).unwrap(), 0);
        assert_eq!(rep.eigen_index(-2.0).unwrap(), 2);
        assert_eq!(rep.eigen_index(1.0), Err(Error::NotAnEigenvalue(1.0)));
        assert_eq!(rep.highest_weight(), 2.0);
    }

    #[test]
    fn single_precision_representation() {
        let rep = build_representation(AlgebraSpec::<f32>::su2(), Spin::from_twice(4)).unwrap();
        assert!(commutator_residual(&rep) < 1e-5);
    }
}
