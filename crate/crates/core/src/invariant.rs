//! The invariant `I(t)`, the unitary `V(t) = exp(βA₊ − β*A₋)` that maps it to
//! the constant `A`, the dynamical/geometric phase split, and the exact
//! solution `|Ψ(t)⟩ = e^{−iφ(t)} V(t) |λ⟩`.
//!
//! Time derivatives of `I` and `V` used by the verification routines are
//! centred differences on the solution grid, never analytic derivatives of
//! the constructions being checked.

use std::f64::consts::TAU;

use crate::algebra::{expm_skew, AlgebraSpec, Representation};
use crate::auxiliary::{AuxMode, AuxiliarySolution, AuxiliaryState};
use crate::error::{Error, Result};
use crate::grid::cumulative_simpson;
use crate::linalg::{commutator, dagger, max_abs, max_abs_diff, ComplexMatrix, StateVector};
use crate::oracle::Trajectory;
use crate::protocol::{hamiltonian_from, Coefficients, Protocol};
use crate::scalar::{cis, im, re, Cplx, Real};

/// `β = −(a/2)·x·e^{−ib}` with `x = 1/√(mn/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParameters<T> {
    pub beta: Cplx<T>,
    pub x: T,
}

impl<T: Real> DisplacementParameters<T> {
    pub fn new(spec: &AlgebraSpec<T>, s: AuxiliaryState<T>) -> Self {
        let x = spec.x();
        Self { beta: cis(-s.b) * (-s.a / T::lit(2.0) * x), x }
    }
}

/// `I = y[½ sin a e^{−ib} A₊ + ½ sin a e^{ib} A₋] + cos a A`
pub fn build_invariant<T: Real>(rep: &Representation<T>, s: AuxiliaryState<T>) -> ComplexMatrix<T> {
    let w = rep.spec().y() * s.a.sin() / T::lit(2.0);
    rep.combine(cis(-s.b) * w, cis(s.b) * w, re(s.a.cos()))
}

/// `V = exp(βA₊ − β*A₋)`
pub fn build_displacement<T: Real>(rep: &Representation<T>, s: AuxiliaryState<T>) -> Result<ComplexMatrix<T>> {
    let beta = DisplacementParameters::new(rep.spec(), s).beta;
    expm_skew(&rep.displacement_generator(beta))
}

/// Largest `‖∂I/∂t + (1/i)[I, H]‖_max` over interior grid points.
pub fn invariant_residual<T: Real>(
    rep: &Representation<T>,
    p: &Protocol<T>,
    sol: &AuxiliarySolution<T>,
) -> Result<T> {
    let n = sol.len();
    if n < 3 {
        return Ok(T::zero());
    }
    let two_h = sol.step() * T::lit(2.0);
    let minus_i = im(-T::one());
    let mut prev = build_invariant(rep, sol.state(0));
    let mut here = build_invariant(rep, sol.state(1));
    let mut worst = T::zero();
    for k in 1..n - 1 {
        let next = build_invariant(rep, sol.state(k + 1));
        let h = hamiltonian_from(&p.evaluate(sol.times()[k])?, rep);
        let d_dt = (&next - &prev).mapv(|z| z / two_h);
        let residual = d_dt + commutator(&here, &h).mapv(|z| z * minus_i);
        worst = worst.max(max_abs(&residual));
        prev = here;
        here = next;
    }
    Ok(worst)
}

/// Coefficient `h(t)` of `H_V = V†HV − V†i∂V/∂t = h(t)·A`:
///
/// `h = ω[cos a cos θ + (√(mn/2)/m) sin a sin θ cos(b − φ)] + (ḃ/m)(1 − cos a)`.
pub fn transformed_hamiltonian_coefficient<T: Real>(
    c: &Coefficients<T>,
    s: AuxiliaryState<T>,
    db_dt: T,
    spec: &AlgebraSpec<T>,
) -> T {
    dynamical_rate(c, s, spec) + geometric_rate(s, db_dt, spec)
}

fn dynamical_rate<T: Real>(c: &Coefficients<T>, s: AuxiliaryState<T>, spec: &AlgebraSpec<T>) -> T {
    let (sa, ca) = s.a.sin_cos();
    let (st, ct) = c.theta.sin_cos();
    c.omega * (ca * ct + spec.root() / spec.m() * sa * st * (s.b - c.phi).cos())
}

fn geometric_rate<T: Real>(s: AuxiliaryState<T>, db_dt: T, spec: &AlgebraSpec<T>) -> T {
    db_dt / spec.m() * (T::one() - s.a.cos())
}

/// Full matrix `V†HV − V†i∂V/∂t` at interior grid index `k`, with `∂V/∂t`
/// from centred differences of `V` at `k ± 1`.
pub fn transformed_hamiltonian_matrix<T: Real>(
    rep: &Representation<T>,
    p: &Protocol<T>,
    sol: &AuxiliarySolution<T>,
    k: usize,
) -> Result<ComplexMatrix<T>> {
    if k == 0 || k + 1 >= sol.len() {
        return Err(Error::GridMismatch);
    }
    let v = build_displacement(rep, sol.state(k))?;
    let dv = (build_displacement(rep, sol.state(k + 1))? - build_displacement(rep, sol.state(k - 1))?)
        .mapv(|z| z / (sol.step() * T::lit(2.0)));
    let vd = dagger(&v);
    let h = hamiltonian_from(&p.evaluate(sol.times()[k])?, rep);
    Ok(vd.dot(&h).dot(&v) - vd.dot(&dv).mapv(|z| z * im(T::one())))
}

/// Outcome of [`transform_check`]; all values are maxima over the sampled points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformCheck<T> {
    /// `‖V†IV − A‖_max`
    pub identity_defect: T,
    /// Largest off-diagonal modulus of the full `H_V`.
    pub off_diagonal: T,
    /// Largest `|H_V[k,k] − h(t)·λ_k|`.
    pub diagonal_deviation: T,
    pub samples: usize,
}

/// Checks `V†IV = A` and the diagonal form of `H_V` at up to `samples`
/// interior grid points spread evenly over the solution.
pub fn transform_check<T: Real>(
    rep: &Representation<T>,
    p: &Protocol<T>,
    sol: &AuxiliarySolution<T>,
    samples: usize,
) -> Result<TransformCheck<T>> {
    let interior = sol.len().saturating_sub(2);
    let count = samples.min(interior);
    let mut out = TransformCheck {
        identity_defect: T::zero(),
        off_diagonal: T::zero(),
        diagonal_deviation: T::zero(),
        samples: count,
    };
    for s in 0..count {
        let k = 1 + if count > 1 { s * (interior - 1) / (count - 1) } else { interior / 2 };
        let state = sol.state(k);
        let v = build_displacement(rep, state)?;
        let iv = dagger(&v).dot(&build_invariant(rep, state)).dot(&v);
        out.identity_defect = out.identity_defect.max(max_abs_diff(&iv, rep.a_z()));

        let hv = transformed_hamiltonian_matrix(rep, p, sol, k)?;
        let coeff = transformed_hamiltonian_coefficient(&p.evaluate(sol.times()[k])?, state, sol.db_dt()[k], rep.spec());
        for ((r, c), z) in hv.indexed_iter() {
            if r == c {
                let expected = coeff * rep.eigenvalues()[r];
                out.diagonal_deviation = out.diagonal_deviation.max((*z - re(expected)).norm());
            } else {
                out.off_diagonal = out.off_diagonal.max(z.norm());
            }
        }
    }
    Ok(out)
}

/// Cumulative dynamical and geometric phases for eigenvalue `λ` of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDecomposition<T> {
    pub lambda: T,
    pub times: Vec<T>,
    pub phi_d: Vec<T>,
    pub phi_g: Vec<T>,
}

impl<T: Real> PhaseDecomposition<T> {
    pub fn phi_total(&self) -> Vec<T> {
        self.phi_d.iter().zip(&self.phi_g).map(|(d, g)| *d + *g).collect()
    }

    pub fn total_at(&self, k: usize) -> T {
        self.phi_d[k] + self.phi_g[k]
    }
}

/// `φ_d = λ∫ω[cos a cos θ + (√(mn/2)/m) sin a sin θ cos(b−φ)]dt` and
/// `φ_g = λ∫(ḃ/m)(1 − cos a)dt`, by composite Simpson on the solution grid.
pub fn phases<T: Real>(
    rep: &Representation<T>,
    sol: &AuxiliarySolution<T>,
    p: &Protocol<T>,
    lambda: T,
) -> Result<PhaseDecomposition<T>> {
    rep.eigen_index(lambda)?;
    let spec = rep.spec();
    let mut dyn_rate = Vec::with_capacity(sol.len());
    let mut geo_rate = Vec::with_capacity(sol.len());
    for (k, &t) in sol.times().iter().enumerate() {
        let c = p.evaluate(t)?;
        dyn_rate.push(lambda * dynamical_rate(&c, sol.state(k), spec));
        geo_rate.push(lambda * geometric_rate(sol.state(k), sol.db_dt()[k], spec));
    }
    let h = sol.step();
    Ok(PhaseDecomposition {
        lambda,
        times: sol.times().to_vec(),
        phi_d: cumulative_simpson(&dyn_rate, h),
        phi_g: cumulative_simpson(&geo_rate, h),
    })
}

/// `(λ/m)·2π(1 − cos a)`: geometric phase of one loop of `b` at fixed `a`.
pub fn solid_angle_phase<T: Real>(a: T, lambda: T, m: T) -> T {
    lambda / m * T::lit(TAU) * (T::one() - a.cos())
}

/// `e^{−iφ(t_k)} V(t_k) |λ⟩`
pub fn lr_state<T: Real>(
    rep: &Representation<T>,
    sol: &AuxiliarySolution<T>,
    phases: &PhaseDecomposition<T>,
    k: usize,
) -> Result<StateVector<T>> {
    if phases.times.len() != sol.len() {
        return Err(Error::GridMismatch);
    }
    let ket = rep.eigenvector(phases.lambda)?;
    let v = build_displacement(rep, sol.state(k))?;
    let phase = cis(-phases.total_at(k));
    Ok(v.dot(&ket).mapv(|z| z * phase))
}

/// [`lr_state`] at every grid point.
pub fn lr_trajectory<T: Real>(
    rep: &Representation<T>,
    sol: &AuxiliarySolution<T>,
    phases: &PhaseDecomposition<T>,
) -> Result<Trajectory<T>> {
    let states = (0..sol.len())
        .map(|k| lr_state(rep, sol, phases, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory::new(format!("{}:lr", sol.label()), sol.times().to_vec(), states))
}

/// Whether the solution is expected to satisfy the invariant equation.
pub fn is_invariant_solution<T: Real>(sol: &AuxiliarySolution<T>) -> bool {
    matches!(sol.mode(), AuxMode::Integrated | AuxMode::Stationary)
}
