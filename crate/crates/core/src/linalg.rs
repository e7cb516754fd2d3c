//! Small dense complex linear-algebra helpers on top of `ndarray`.

use ndarray::{Array1, Array2, Zip};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

/// Dense square complex matrix.
pub type ComplexMatrix<T> = Array2<Cplx<T>>;
/// Dense complex column vector.
pub type StateVector<T> = Array1<Cplx<T>>;

pub fn identity<T: Real>(dim: usize) -> ComplexMatrix<T> {
    Array2::from_diag_elem(dim, Cplx::one())
}

pub fn dagger<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.t().mapv(|z| z.conj())
}

pub fn scale<T: Real>(a: &ComplexMatrix<T>, c: Cplx<T>) -> ComplexMatrix<T> {
    a.mapv(|z| z * c)
}

/// `[a, b] = ab − ba`
pub fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.dot(b) - b.dot(a)
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(a: &ComplexMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, z| m.max(z.norm()))
}

/// Largest entry modulus of `a − b`.
pub fn max_abs_diff<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    Zip::from(a)
        .and(b)
        .fold(T::zero(), |m, x, y| m.max((*x - *y).norm()))
}

/// `‖A − A†‖_max`
pub fn hermiticity_defect<T: Real>(a: &ComplexMatrix<T>) -> T {
    max_abs_diff(a, &dagger(a))
}

/// `‖A + A†‖_max`
pub fn anti_hermiticity_defect<T: Real>(a: &ComplexMatrix<T>) -> T {
    Zip::from(a)
        .and(a.t())
        .fold(T::zero(), |m, x, y| m.max((*x + y.conj()).norm()))
}

/// `‖U†U − I‖_max`
pub fn unitarity_defect<T: Real>(u: &ComplexMatrix<T>) -> T {
    max_abs_diff(&dagger(u).dot(u), &identity(u.nrows()))
}

pub fn ensure_square<T: Real>(a: &ComplexMatrix<T>) -> Result<usize> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(rows)
}

/// `⟨u|v⟩`, antilinear in the first argument.
pub fn inner<T: Real>(u: &StateVector<T>, v: &StateVector<T>) -> Cplx<T> {
    u.iter()
        .zip(v.iter())
        .fold(Cplx::zero(), |acc, (a, b)| acc + a.conj() * b)
}

pub fn norm<T: Real>(v: &StateVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Computational basis vector `e_k`.
pub fn basis_vector<T: Real>(dim: usize, k: usize) -> StateVector<T> {
    let mut v = Array1::zeros(dim);
    v[k] = Cplx::one();
    v
}

/// Solves `A X = B` by LU factorisation with partial pivoting.
pub fn solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = ensure_square(a)?;
    if b.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.nrows() });
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let ncols = x.ncols();

    for k in 0..n {
        let (pivot, pivot_mag) = (k..n)
            .map(|r| (r, lu[[r, k]].norm()))
            .fold((k, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_mag == T::zero() || !pivot_mag.is_finite() {
            return Err(Error::Singular);
        }
        if pivot != k {
            for c in 0..n {
                lu.swap([k, c], [pivot, c]);
            }
            for c in 0..ncols {
                x.swap([k, c], [pivot, c]);
            }
        }
        let inv = lu[[k, k]].inv();
        for r in (k + 1)..n {
            let factor = lu[[r, k]] * inv;
            if factor.is_zero() {
                continue;
            }
            lu[[r, k]] = factor;
            for c in (k + 1)..n {
                let v = lu[[k, c]];
                lu[[r, c]] -= factor * v;
            }
            for c in 0..ncols {
                let v = x[[k, c]];
                x[[r, c]] -= factor * v;
            }
        }
    }

    for k in (0..n).rev() {
        let inv = lu[[k, k]].inv();
        for c in 0..ncols {
            let mut acc = x[[k, c]];
            for j in (k + 1)..n {
                acc -= lu[[k, j]] * x[[j, c]];
            }
            x[[k, c]] = acc * inv;
        }
    }
    Ok(x)
}
