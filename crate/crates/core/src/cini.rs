//! Generalised Cini measurement model: an `M`-level system coupled to a
//! two-mode boson detector,
//!
//! ```text
//! H = Σ_k E_k |Φ_k⟩⟨Φ_k| + ω₁a₁†a₁ + ω₂a₂†a₂ + Σ_k |Φ_k⟩⟨Φ_k| (g_k J₊ + g_k* J₋),
//! J₊ = a₁†a₂,  J₋ = a₂†a₁,  J₃ = ½(a₁†a₁ − a₂†a₂).
//! ```
//!
//! Both `|Φ_k⟩⟨Φ_k|` and `N = ½(a₁†a₁ + a₂†a₂)` are conserved. In the sector
//! with `N = n` the detector is a spin `j = n` multiplet and level `k` evolves
//! under
//!
//! ```text
//! H_{n,k} = E_k + n(ω₁ + ω₂) + g_k J₊ + g_k* J₋ + (ω₁ − ω₂) J₃,
//! ```
//!
//! which is the su(2) branch Hamiltonian with
//! `ω = √((ω₁−ω₂)² + 4|g_k|²)`, `θ = atan2(2|g_k|, ω₁−ω₂)`, `φ = −arg g_k`.

use crate::algebra::{build_representation, AlgebraSpec, Representation, Spin};
use crate::auxiliary::{adiabatic_solution, solve_auxiliary_aligned, AuxiliaryOptions, AuxiliarySolution};
use crate::decoherence::{decoherence_matrix_element, DecoherenceSeries};
use crate::error::{Error, Result};
use crate::grid::{cumulative_simpson, spacing};
use crate::linalg::{ComplexMatrix, StateVector};
use crate::oracle::{same_grid, Trajectory};
use crate::protocol::{Protocol, ScalarFunction};
use crate::scalar::{cis, re, Cplx, Real};

/// Knot count used when a time-dependent branch is resampled into a protocol.
pub const DEFAULT_SPLINE_INTERVALS: usize = 4096;

/// `g(t) = amplitude(t)·e^{i·phase(t)}`
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T> {
    pub amplitude: ScalarFunction<T>,
    pub phase: ScalarFunction<T>,
}

impl<T: Real> Coupling<T> {
    pub fn constant(g: Cplx<T>) -> Self {
        Self { amplitude: ScalarFunction::Constant(g.norm()), phase: ScalarFunction::Constant(g.arg()) }
    }

    pub fn at(&self, t: T) -> Cplx<T> {
        cis(self.phase.value(t)) * self.amplitude.value(t)
    }

    fn is_constant(&self) -> bool {
        self.amplitude.is_constant() && self.phase.is_constant()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level<T> {
    pub label: String,
    pub energy: T,
    pub coupling: Coupling<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiniModel<T> {
    pub levels: Vec<Level<T>>,
    pub omega1: ScalarFunction<T>,
    pub omega2: ScalarFunction<T>,
    /// Boson occupations `(n₁, n₂)` fixing the sector `N = (n₁ + n₂)/2`.
    pub occupations: (u32, u32),
    pub horizon: T,
}

impl<T: Real> CiniModel<T> {
    /// Detector spin `j = (n₁ + n₂)/2`; the sector has `n₁ + n₂ + 1` states.
    pub fn spin(&self) -> Result<Spin> {
        let twice = self.occupations.0 + self.occupations.1;
        if twice == 0 {
            return Err(Error::InvalidSpin("0".into()));
        }
        Ok(Spin::from_twice(twice))
    }

    /// Eigenvalue `n` of `N` in the sector.
    pub fn sector_n(&self) -> T {
        T::from_u32(self.occupations.0 + self.occupations.1).unwrap() / T::lit(2.0)
    }

    pub fn representation(&self) -> Result<Representation<T>> {
        build_representation(AlgebraSpec::su2(), self.spin()?)
    }

    fn level(&self, k: usize) -> Result<&Level<T>> {
        self.levels.get(k).ok_or(Error::LevelOutOfRange { index: k, levels: self.levels.len() })
    }
}

/// c-number part `E_k + n(ω₁ + ω₂)` of a branch Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarOffset<T> {
    pub energy: T,
    pub n: T,
    pub omega1: ScalarFunction<T>,
    pub omega2: ScalarFunction<T>,
}

impl<T: Real> ScalarOffset<T> {
    pub fn value(&self, t: T) -> T {
        self.energy + self.n * (self.omega1.value(t) + self.omega2.value(t))
    }

    /// `∫₀^t offset` on a uniform grid.
    pub fn phase(&self, times: &[T]) -> Vec<T> {
        let rate: Vec<T> = times.iter().map(|&t| self.value(t)).collect();
        cumulative_simpson(&rate, spacing(times))
    }
}

/// `H_{n,k}` restricted to one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchHamiltonian<T> {
    pub level: usize,
    pub label: String,
    pub offset: ScalarOffset<T>,
    pub coupling: Coupling<T>,
    horizon: T,
}

impl<T: Real> BranchHamiltonian<T> {
    pub fn detuning(&self, t: T) -> T {
        self.offset.omega1.value(t) - self.offset.omega2.value(t)
    }

    /// `g J₊ + g* J₋ + (ω₁ − ω₂) J₃`, without the scalar offset.
    pub fn su2_part(&self, rep: &Representation<T>, t: T) -> ComplexMatrix<T> {
        let g = self.coupling.at(t);
        rep.combine(g, g.conj(), re(self.detuning(t)))
    }

    /// The complete branch Hamiltonian including the scalar offset.
    pub fn matrix(&self, rep: &Representation<T>, t: T) -> ComplexMatrix<T> {
        let offset = re(self.offset.value(t));
        let mut h = self.su2_part(rep, t);
        h.diag_mut().mapv_inplace(|z| z + offset);
        h
    }

    fn is_constant(&self) -> bool {
        self.coupling.is_constant() && self.offset.omega1.is_constant() && self.offset.omega2.is_constant()
    }

    fn field(&self, t: T) -> Result<(T, T, T)> {
        let detuning = self.detuning(t);
        let transverse = T::lit(2.0) * self.coupling.amplitude.value(t);
        let omega = detuning.hypot(transverse);
        if omega == T::zero() {
            return Err(Error::DegenerateBranch);
        }
        Ok((omega, transverse.atan2(detuning), -self.coupling.phase.value(t)))
    }
}

/// `H_{n,k}` for level `k` in the model's sector.
pub fn reduce_to_sector<T: Real>(model: &CiniModel<T>, k: usize) -> Result<BranchHamiltonian<T>> {
    let level = model.level(k)?;
    Ok(BranchHamiltonian {
        level: k,
        label: level.label.clone(),
        offset: ScalarOffset {
            energy: level.energy,
            n: model.sector_n(),
            omega1: model.omega1.clone(),
            omega2: model.omega2.clone(),
        },
        coupling: level.coupling.clone(),
        horizon: model.horizon,
    })
}

/// Branch protocol for the su(2) part and its separated scalar offset.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchProtocol<T> {
    pub protocol: Protocol<T>,
    pub offset: ScalarOffset<T>,
}

/// Maps `H_{n,k}` onto `(ω, θ, φ)` with `m = 1`, `n = 2`. Time-dependent
/// inputs are mapped pointwise and resampled onto a cubic spline.
pub fn branch_protocol<T: Real>(bh: &BranchHamiltonian<T>) -> Result<BranchProtocol<T>> {
    branch_protocol_with_resolution(bh, DEFAULT_SPLINE_INTERVALS)
}

pub fn branch_protocol_with_resolution<T: Real>(bh: &BranchHamiltonian<T>, intervals: usize) -> Result<BranchProtocol<T>> {
    let protocol = if bh.is_constant() {
        let (omega, theta, phi) = bh.field(T::zero())?;
        Protocol::constant(bh.label.clone(), omega, theta, phi, bh.horizon)?
    } else {
        let intervals = intervals.max(2);
        let n = T::from_usize(intervals).unwrap();
        let samples = (0..=intervals)
            .map(|k| bh.field(bh.horizon * T::from_usize(k).unwrap() / n))
            .collect::<Result<Vec<_>>>()?;
        let omega = ScalarFunction::sampled(bh.horizon, samples.iter().map(|s| s.0).collect())?;
        let theta = ScalarFunction::sampled(bh.horizon, samples.iter().map(|s| s.1).collect())?;
        let phi = negate(&bh.coupling.phase).map_or_else(
            || ScalarFunction::sampled(bh.horizon, samples.iter().map(|s| s.2).collect()),
            Ok,
        )?;
        Protocol::new(bh.label.clone(), omega, theta, phi, bh.horizon)?
    };
    Ok(BranchProtocol { protocol, offset: bh.offset.clone() })
}

fn negate<T: Real>(f: &ScalarFunction<T>) -> Option<ScalarFunction<T>> {
    Some(match f {
        ScalarFunction::Constant(c) => ScalarFunction::Constant(-*c),
        ScalarFunction::Linear { c0, c1 } => ScalarFunction::Linear { c0: -*c0, c1: -*c1 },
        ScalarFunction::Sinusoid { c0, c1, c2, c3 } => ScalarFunction::Sinusoid { c0: -*c0, c1: -*c1, c2: *c2, c3: *c3 },
        ScalarFunction::Winding { rate } => ScalarFunction::Winding { rate: -*rate },
        ScalarFunction::Sampled(_) => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMode {
    Adiabatic,
    Integrated,
}

/// Solutions of both branches of a level pair.
/// A branch protocol with its auxiliary solution.
pub type BranchSolution<T> = (BranchProtocol<T>, AuxiliarySolution<T>);

pub fn level_pair_solutions<T: Real>(
    model: &CiniModel<T>,
    k: usize,
    l: usize,
    step: T,
    mode: PairMode,
) -> Result<(BranchSolution<T>, BranchSolution<T>)> {
    let rep = model.representation()?;
    let solve = |idx: usize| -> Result<BranchSolution<T>> {
        let bp = branch_protocol(&reduce_to_sector(model, idx)?)?;
        let sol = match mode {
            PairMode::Adiabatic => adiabatic_solution(&bp.protocol, model.horizon, step)?,
            PairMode::Integrated => {
                solve_auxiliary_aligned(&bp.protocol, rep.spec(), model.horizon, step, &AuxiliaryOptions::default())?
            }
        };
        Ok((bp, sol))
    };
    Ok((solve(k)?, solve(l)?))
}

/// `F_{k,l}(t)` with the detector in `|j, j⟩`.
pub fn level_pair_decoherence<T: Real>(
    model: &CiniModel<T>,
    k: usize,
    l: usize,
    step: T,
    mode: PairMode,
) -> Result<DecoherenceSeries<T>> {
    let rep = model.representation()?;
    let ((_, sk), (_, sl)) = level_pair_solutions(model, k, l, step, mode)?;
    decoherence_matrix_element(&rep, &sk, &sl, rep.highest_weight())
}

/// System ⊗ detector state and the reduced system density matrix over time.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSeries<T> {
    pub times: Vec<T>,
    /// Detector dimension; tensor index is `k·dim + d`.
    pub dim: usize,
    pub states: Vec<StateVector<T>>,
    /// `ρ_S(t) = Tr_D |Ψ(t)⟩⟨Ψ(t)|`
    pub reduced: Vec<ComplexMatrix<T>>,
}

impl<T: Real> CompositeSeries<T> {
    pub fn coherence(&self, k: usize, l: usize) -> Vec<Cplx<T>> {
        self.reduced.iter().map(|r| r[[k, l]]).collect()
    }
}

/// `|Ψ(t)⟩ = Σ_k c_k e^{−i∫(E_k + n(ω₁+ω₂))} |ψ_k(t)⟩|Φ_k⟩`, where `ψ_k` are
/// detector trajectories under the su(2) parts of each branch.
pub fn composite_state<T: Real>(
    model: &CiniModel<T>,
    coefficients: &[Cplx<T>],
    trajectories: &[Trajectory<T>],
) -> Result<CompositeSeries<T>> {
    let levels = model.levels.len();
    if coefficients.len() != levels {
        return Err(Error::DimensionMismatch { expected: levels, got: coefficients.len() });
    }
    if trajectories.len() != levels {
        return Err(Error::DimensionMismatch { expected: levels, got: trajectories.len() });
    }
    let weight = coefficients.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt();
    if (weight - T::one()).abs() > T::lit(1e-12).max(T::lit(16.0) * T::epsilon()) {
        return Err(Error::NotNormalized(weight.to_f64_lossy()));
    }
    let times = trajectories[0].times.clone();
    if trajectories.iter().any(|t| !same_grid(&t.times, &times)) {
        return Err(Error::GridMismatch);
    }
    let dim = model.spin()?.dim();
    for t in trajectories {
        if let Some(s) = t.states.first() {
            if s.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.len() });
            }
        }
    }

    let offset_phases = (0..levels)
        .map(|k| Ok(reduce_to_sector(model, k)?.offset.phase(&times)))
        .collect::<Result<Vec<_>>>()?;

    let mut states = Vec::with_capacity(times.len());
    let mut reduced = Vec::with_capacity(times.len());
    for step in 0..times.len() {
        let mut psi = StateVector::zeros(levels * dim);
        for (k, (c, offset)) in coefficients.iter().zip(&offset_phases).enumerate() {
            let amp = *c * cis(-offset[step]);
            for (d, z) in trajectories[k].states[step].iter().enumerate() {
                psi[k * dim + d] = amp * *z;
            }
        }
        let mut rho = ComplexMatrix::zeros((levels, levels));
        for k in 0..levels {
            for l in 0..levels {
                rho[[k, l]] = (0..dim).fold(Cplx::new(T::zero(), T::zero()), |acc, d| {
                    acc + psi[k * dim + d] * psi[l * dim + d].conj()
                });
            }
        }
        states.push(psi);
        reduced.push(rho);
    }
    Ok(CompositeSeries { times, dim, states, reduced })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::protocol::hamiltonian_matrix;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn model(levels: Vec<(f64, Cplx<f64>)>, w1: f64, w2: f64, occ: (u32, u32)) -> CiniModel<f64> {
        CiniModel {
            levels: levels
                .into_iter()
                .enumerate()
                .map(|(k, (e, g))| Level { label: format!("L{k}"), energy: e, coupling: Coupling::constant(g) })
                .collect(),
            omega1: ScalarFunction::Constant(w1),
            omega2: ScalarFunction::Constant(w2),
            occupations: occ,
            horizon: 1.0,
        }
    }

    #[test]
    fn uncoupled_branch_is_diagonal() {
        let m = model(vec![(0.3, Cplx::new(0.0, 0.0))], 1.5, 0.5, (1, 1));
        let bh = reduce_to_sector(&m, 0).unwrap();
        let rep = m.representation().unwrap();
        let h = bh.matrix(&rep, 0.0);
        let offset = 0.3 + 1.0 * 2.0;
        for r in 0..3 {
            for c in 0..3 {
                let expected = if r == c { offset + rep.eigenvalues()[r] } else { 0.0 };
                assert!((h[[r, c]] - re(expected)).norm() < 1e-15);
            }
        }
        let bp = branch_protocol(&bh).unwrap();
        assert_eq!(bp.protocol.evaluate(0.0).unwrap().theta, 0.0);
        assert_eq!(bp.protocol.evaluate(0.0).unwrap().omega, 1.0);
    }

    #[test]
    fn degenerate_detuning_real_coupling() {
        let m = model(vec![(0.0, Cplx::new(0.5, 0.0))], 0.7, 0.7, (2, 0));
        let bp = branch_protocol(&reduce_to_sector(&m, 0).unwrap()).unwrap();
        let c = bp.protocol.evaluate(0.0).unwrap();
        assert!((c.omega - 1.0).abs() < 1e-15 && (c.theta - FRAC_PI_2).abs() < 1e-15 && c.phi == 0.0);
        assert!((bp.offset.value(0.0) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn complex_coupling_round_trip() {
        let g = cis(FRAC_PI_3) * 0.5;
        let m = model(vec![(0.0, g)], 1.0, 0.0, (1, 1));
        let bh = reduce_to_sector(&m, 0).unwrap();
        let bp = branch_protocol(&bh).unwrap();
        let c = bp.protocol.evaluate(0.0).unwrap();
        assert!((c.omega - 2f64.sqrt()).abs() < 1e-15);
        assert!((c.theta - FRAC_PI_4).abs() < 1e-15);
        assert!((c.phi + FRAC_PI_3).abs() < 1e-15);
        let rep = m.representation().unwrap();
        let h = hamiltonian_matrix(&bp.protocol, &rep, 0.0).unwrap();
        assert!(max_abs_diff(&h, &bh.su2_part(&rep, 0.0)) <= 1e-13);
    }

    #[test]
    fn vanishing_field_is_degenerate() {
        let m = model(vec![(0.0, Cplx::new(0.0, 0.0))], 1.0, 1.0, (1, 0));
        assert_eq!(branch_protocol(&reduce_to_sector(&m, 0).unwrap()), Err(Error::DegenerateBranch));
        assert!(matches!(reduce_to_sector(&m, 3), Err(Error::LevelOutOfRange { .. })));
    }

    #[test]
    fn identical_couplings_do_not_decohere() {
        let g = Cplx::new(0.4, 0.1);
        let m = model(vec![(0.0, g), (2.0, g)], 1.0, 0.2, (3, 1));
        let f = level_pair_decoherence(&m, 0, 1, 0.05, PairMode::Adiabatic).unwrap();
        assert!(f.values.iter().all(|z| (*z - re(1.0)).norm() < 1e-12));
    }

    #[test]
    fn sector_dimension() {
        let m = model(vec![(0.0, Cplx::new(0.1, 0.0))], 1.0, 0.0, (4, 3));
        assert_eq!(m.spin().unwrap().dim(), 8);
        assert_eq!(m.sector_n(), 3.5);
    }

    #[test]
    fn composite_rejects_bad_weights() {
        let m = model(vec![(0.0, Cplx::new(0.1, 0.0)), (0.0, Cplx::new(0.2, 0.0))], 1.0, 0.0, (1, 0));
        let traj = Trajectory::new("x", vec![0.0, 1.0], vec![StateVector::zeros(2), StateVector::zeros(2)]);
        let res = composite_state(&m, &[re(1.0), re(1.0)], &[traj.clone(), traj]);
        assert!(matches!(res, Err(Error::NotNormalized(_))));
    }
}
