//! Brute-force propagation of `i ∂ψ/∂t = H(t) ψ`, independent of the
//! invariant construction.
//!
//! Each step applies `exp(−i h H(t + h/2))`, which is exactly unitary and
//! second-order accurate.

use crate::algebra::{expm_skew, Representation};
use crate::error::{Error, Result};
use crate::grid::{spacing, uniform_grid};
use crate::linalg::{inner, norm, StateVector};
use crate::protocol::{hamiltonian_from, hamiltonian_matrix, Protocol};
use crate::scalar::{im, Cplx, Real};

/// States on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub label: String,
    pub times: Vec<T>,
    pub states: Vec<StateVector<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(label: impl Into<String>, times: Vec<T>, states: Vec<StateVector<T>>) -> Self {
        Self { label: label.into(), times, states }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `| ‖ψ(t)‖ − 1 |`.
    pub fn norm_drift(&self) -> T {
        self.states
            .iter()
            .map(|s| (norm(s) - T::one()).abs())
            .fold(T::zero(), T::max)
    }

    pub fn same_grid(&self, other: &Trajectory<T>) -> bool {
        same_grid(&self.times, &other.times)
    }
}

pub(crate) fn same_grid<T: Real>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| (*x - *y).abs() <= T::lit(1e-12) * x.abs().max(T::one()))
}

/// Midpoint-exponential propagation on the grid covering `[0, horizon]`.
pub fn propagate<T: Real>(
    rep: &Representation<T>,
    p: &Protocol<T>,
    psi0: &StateVector<T>,
    horizon: T,
    step: T,
) -> Result<Trajectory<T>> {
    propagate_substepped(rep, p, psi0, horizon, step, 1)
}

/// As [`propagate`], taking `substeps` midpoint steps between stored grid
/// points.
pub fn propagate_substepped<T: Real>(
    rep: &Representation<T>,
    p: &Protocol<T>,
    psi0: &StateVector<T>,
    horizon: T,
    step: T,
    substeps: usize,
) -> Result<Trajectory<T>> {
    if psi0.len() != rep.dim() {
        return Err(Error::DimensionMismatch { expected: rep.dim(), got: psi0.len() });
    }
    let n0 = norm(psi0);
    if (n0 - T::one()).abs() > T::lit(1e-12).max(T::lit(16.0) * T::epsilon()) {
        return Err(Error::NotNormalized(n0.to_f64_lossy()));
    }
    let times = uniform_grid(horizon, step)?;
    let substeps = substeps.max(1);
    let h = spacing(&times) / T::from_usize(substeps).unwrap();
    let half = h / T::lit(2.0);
    let minus_ih = im(-h);

    let mut states = Vec::with_capacity(times.len());
    let mut psi = psi0.clone();
    states.push(psi.clone());
    for &t in &times[..times.len() - 1] {
        for s in 0..substeps {
            let mid = t + h * T::from_usize(s).unwrap() + half;
            let generator = hamiltonian_from(&p.evaluate(mid)?, rep).mapv(|z| z * minus_ih);
            psi = expm_skew(&generator)?.dot(&psi);
        }
        states.push(psi.clone());
    }
    Ok(Trajectory::new(p.label.clone(), times, states))
}

/// Largest `‖i(ψ(t+h) − ψ(t−h))/(2h) − H(t)ψ(t)‖` over interior grid points.
pub fn schrodinger_residual<T: Real>(traj: &Trajectory<T>, rep: &Representation<T>, p: &Protocol<T>) -> Result<T> {
    let n = traj.len();
    if n < 3 {
        return Ok(T::zero());
    }
    let two_h = spacing(&traj.times) * T::lit(2.0);
    let i = im(T::one());
    let mut worst = T::zero();
    for k in 1..n - 1 {
        let h = hamiltonian_matrix(p, rep, traj.times[k])?;
        let lhs = (&traj.states[k + 1] - &traj.states[k - 1]).mapv(|z| z * i / two_h);
        let r = lhs - h.dot(&traj.states[k]);
        worst = worst.max(norm(&r));
    }
    Ok(worst)
}

/// `⟨ψ_i(t)|ψ_j(t)⟩` on the shared grid.
pub fn overlap_series<T: Real>(traj_i: &Trajectory<T>, traj_j: &Trajectory<T>) -> Result<Vec<Cplx<T>>> {
    if !traj_i.same_grid(traj_j) {
        return Err(Error::GridMismatch);
    }
    Ok(traj_i.states.iter().zip(&traj_j.states).map(|(a, b)| inner(a, b)).collect())
}
