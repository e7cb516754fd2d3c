//! Decoherence factor `F_{i,j}(t) = ⟨λ|V_i†(t) V_j(t)|λ⟩` between two branches,
//! by several independent routes, plus the adiabatic Cini formula and its
//! classical (`j → ∞`) limit.

use std::f64::consts::PI;

use num_traits::One;

use crate::algebra::{expm_skew, Representation, Spin};
use crate::auxiliary::AuxiliarySolution;
use crate::error::{Error, Result};
use crate::invariant::{build_displacement, DisplacementParameters, PhaseDecomposition};
use crate::linalg::{dagger, inner};
use crate::oracle::{overlap_series, same_grid, Trajectory};
use crate::scalar::{cis, re, Cplx, Real};

/// How a [`DecoherenceSeries`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// `⟨λ|V_i†V_j|λ⟩` with both unitaries built explicitly.
    MatrixElement,
    /// `exp[(nλ/2)(β_iβ_j* − β_i*β_j)]·⟨λ|exp((β_j−β_i)A₊ − (β_j*−β_i*)A₋)|λ⟩`.
    ClosedForm,
    /// `[cos((a_i − a_j)/2)]^{2j}`.
    AdiabaticFormula,
    /// `e^{−i(φ_i−φ_j)}⟨ψ_i|ψ_j⟩` from propagated trajectories.
    OracleOverlap,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::MatrixElement => "matrix-element",
            Route::ClosedForm => "closed-form",
            Route::AdiabaticFormula => "adiabatic-formula",
            Route::OracleOverlap => "oracle-overlap",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoherenceSeries<T> {
    pub times: Vec<T>,
    pub values: Vec<Cplx<T>>,
    pub route: Route,
    pub pair: (String, String),
    pub lambda: T,
    /// Detector multiplet and projection `μ = λ/m`.
    pub detector: (Spin, T),
}

impl<T: Real> DecoherenceSeries<T> {
    pub fn max_abs(&self) -> T {
        self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest pointwise `|F − G|`.
    pub fn max_deviation(&self, other: &DecoherenceSeries<T>) -> Result<T> {
        if !same_grid(&self.times, &other.times) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max))
    }

    /// Largest `|F_{i,j} − conj(F_{j,i})|` against the reversed pair.
    pub fn hermitian_defect(&self, reversed: &DecoherenceSeries<T>) -> Result<T> {
        if !same_grid(&self.times, &reversed.times) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&reversed.values)
            .map(|(a, b)| (*a - b.conj()).norm())
            .fold(T::zero(), T::max))
    }
}

fn check_pair<T: Real>(sol_i: &AuxiliarySolution<T>, sol_j: &AuxiliarySolution<T>) -> Result<()> {
    if same_grid(sol_i.times(), sol_j.times()) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Evaluates `f` at each grid point, reusing the previous value while neither
/// branch state changes.
fn pointwise<T: Real>(
    sol_i: &AuxiliarySolution<T>,
    sol_j: &AuxiliarySolution<T>,
    mut f: impl FnMut(usize) -> Result<Cplx<T>>,
) -> Result<Vec<Cplx<T>>> {
    let mut values: Vec<Cplx<T>> = Vec::with_capacity(sol_i.len());
    for k in 0..sol_i.len() {
        let repeat = k > 0 && sol_i.state(k) == sol_i.state(k - 1) && sol_j.state(k) == sol_j.state(k - 1);
        let value = if repeat { values[k - 1] } else { f(k)? };
        values.push(value);
    }
    Ok(values)
}

fn series<T: Real>(
    rep: &Representation<T>,
    sol_i: &AuxiliarySolution<T>,
    sol_j: &AuxiliarySolution<T>,
    lambda: T,
    route: Route,
    values: Vec<Cplx<T>>,
) -> DecoherenceSeries<T> {
    DecoherenceSeries {
        times: sol_i.times().to_vec(),
        values,
        route,
        pair: (sol_i.label().to_string(), sol_j.label().to_string()),
        lambda,
        detector: (rep.j(), lambda / rep.spec().m()),
    }
}

/// Reference route: `F(t) = ⟨λ|V_i†(t)V_j(t)|λ⟩`.
pub fn decoherence_matrix_element<T: Real>(
    rep: &Representation<T>,
    sol_i: &AuxiliarySolution<T>,
    sol_j: &AuxiliarySolution<T>,
    lambda: T,
) -> Result<DecoherenceSeries<T>> {
    check_pair(sol_i, sol_j)?;
    let ket = rep.eigenvector(lambda)?;
    let values = pointwise(sol_i, sol_j, |k| {
        let vi = build_displacement(rep, sol_i.state(k))?;
        let vj = build_displacement(rep, sol_j.state(k))?;
        Ok(inner(&vi.dot(&ket), &vj.dot(&ket)))
    })?;
    Ok(series(rep, sol_i, sol_j, lambda, Route::MatrixElement, values))
}

/// The factorised expression
/// `exp[(nλ/2)(β_iβ_j* − β_i*β_j)]·⟨λ|exp((β_j−β_i)A₊ − (β_j*−β_i*)A₋)|λ⟩`,
/// evaluated verbatim. It coincides with the matrix element when `β_i` and
/// `β_j` share a phase; otherwise the difference is reported, not hidden.
pub fn decoherence_closed_form<T: Real>(
    beta_i: Cplx<T>,
    beta_j: Cplx<T>,
    lambda: T,
    rep: &Representation<T>,
) -> Result<Cplx<T>> {
    let ket = rep.eigenvector(lambda)?;
    let exponent = (beta_i * beta_j.conj() - beta_i.conj() * beta_j) * (rep.spec().n() * lambda / T::lit(2.0));
    let u = expm_skew(&rep.displacement_generator(beta_j - beta_i))?;
    Ok(exponent.exp() * inner(&ket, &u.dot(&ket)))
}

pub fn closed_form_series<T: Real>(
    rep: &Representation<T>,
    sol_i: &AuxiliarySolution<T>,
    sol_j: &AuxiliarySolution<T>,
    lambda: T,
) -> Result<DecoherenceSeries<T>> {
    check_pair(sol_i, sol_j)?;
    let spec = rep.spec();
    let values = pointwise(sol_i, sol_j, |k| {
        let bi = DisplacementParameters::new(spec, sol_i.state(k)).beta;
        let bj = DisplacementParameters::new(spec, sol_j.state(k)).beta;
        decoherence_closed_form(bi, bj, lambda, rep)
    })?;
    Ok(series(rep, sol_i, sol_j, lambda, Route::ClosedForm, values))
}

/// `[cos((θ_i − θ_j)/2)]^{2j}`
pub fn adiabatic_cini_factor<T: Real>(theta_i: T, theta_j: T, j: Spin) -> T {
    ((theta_i - theta_j) / T::lit(2.0)).cos().powi(j.twice() as i32)
}

/// [`adiabatic_cini_factor`] applied to `a_i(t)`, `a_j(t)` along the grid.
pub fn adiabatic_formula_series<T: Real>(
    rep: &Representation<T>,
    sol_i: &AuxiliarySolution<T>,
    sol_j: &AuxiliarySolution<T>,
) -> Result<DecoherenceSeries<T>> {
    check_pair(sol_i, sol_j)?;
    let values = sol_i
        .a()
        .iter()
        .zip(sol_j.a())
        .map(|(ai, aj)| re(adiabatic_cini_factor(*ai, *aj, rep.j())))
        .collect();
    Ok(series(rep, sol_i, sol_j, rep.highest_weight(), Route::AdiabaticFormula, values))
}

/// `e^{−i(φ_i−φ_j)}⟨ψ_i|ψ_j⟩`, directly comparable with `F_{i,j}`.
pub fn oracle_overlap_series<T: Real>(
    rep: &Representation<T>,
    traj_i: &Trajectory<T>,
    traj_j: &Trajectory<T>,
    phases_i: &PhaseDecomposition<T>,
    phases_j: &PhaseDecomposition<T>,
) -> Result<DecoherenceSeries<T>> {
    let overlaps = overlap_series(traj_i, traj_j)?;
    if !same_grid(&traj_i.times, &phases_i.times) || !same_grid(&traj_i.times, &phases_j.times) {
        return Err(Error::GridMismatch);
    }
    let values = overlaps
        .iter()
        .enumerate()
        .map(|(k, z)| *z * cis(phases_j.total_at(k) - phases_i.total_at(k)))
        .collect();
    Ok(DecoherenceSeries {
        times: traj_i.times.clone(),
        values,
        route: Route::OracleOverlap,
        pair: (traj_i.label.clone(), traj_j.label.clone()),
        lambda: phases_i.lambda,
        detector: (rep.j(), phases_i.lambda / rep.spec().m()),
    })
}

/// Largest `|⟨Ψ_i|Ψ_j⟩ − e^{i(φ_i−φ_j)}F_{i,j}|` over the grid.
pub fn detector_overlap_vs_factor<T: Real>(
    traj_i: &Trajectory<T>,
    traj_j: &Trajectory<T>,
    phases_i: &PhaseDecomposition<T>,
    phases_j: &PhaseDecomposition<T>,
    factor: &DecoherenceSeries<T>,
) -> Result<T> {
    let overlaps = overlap_series(traj_i, traj_j)?;
    if !same_grid(&traj_i.times, &factor.times)
        || !same_grid(&traj_i.times, &phases_i.times)
        || !same_grid(&traj_i.times, &phases_j.times)
    {
        return Err(Error::GridMismatch);
    }
    Ok(overlaps
        .iter()
        .enumerate()
        .map(|(k, z)| (*z - cis(phases_i.total_at(k) - phases_j.total_at(k)) * factor.values[k]).norm())
        .fold(T::zero(), T::max))
}

/// `F_{i,i} = 1` check helper: `⟨λ|V†V|λ⟩` for one solution.
pub fn self_factor_defect<T: Real>(rep: &Representation<T>, sol: &AuxiliarySolution<T>, lambda: T) -> Result<T> {
    let ket = rep.eigenvector(lambda)?;
    let mut worst = T::zero();
    for k in 0..sol.len() {
        let v = build_displacement(rep, sol.state(k))?;
        let f = inner(&ket, &dagger(&v).dot(&v).dot(&ket));
        worst = worst.max((f - Cplx::one()).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint<T> {
    pub j: Spin,
    pub abs_f: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLimitScan<T> {
    pub delta: T,
    pub points: Vec<ScanPoint<T>>,
    /// `δ/2` lies within 1e-9 of a multiple of π, so `|F| = 1` for every `j`.
    pub excluded: bool,
}

/// `|F(j)| = |cos(δ/2)|^{2j}` for each `j`.
pub fn classical_limit_scan<T: Real>(delta: T, js: &[Spin]) -> ClassicalLimitScan<T> {
    let half = (delta / T::lit(2.0)).to_f64_lossy();
    let excluded = (half / PI - (half / PI).round()).abs() * PI <= 1e-9;
    let points = js
        .iter()
        .map(|&j| ScanPoint { j, abs_f: adiabatic_cini_factor(delta, T::zero(), j).abs() })
        .collect();
    ClassicalLimitScan { delta, points, excluded }
}
