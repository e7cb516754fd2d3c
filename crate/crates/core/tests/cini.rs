mod common;

use common::hermitian_eigenvalues;
use lr_decoherence::algebra::AlgebraSpec;
use lr_decoherence::auxiliary::{adiabatic_solution, solve_auxiliary_aligned, AuxiliaryOptions};
use lr_decoherence::cini::{
    branch_protocol, composite_state, level_pair_decoherence, level_pair_solutions, reduce_to_sector, CiniModel, Coupling,
    Level, PairMode,
};
use lr_decoherence::decoherence::{adiabatic_cini_factor, oracle_overlap_series};
use lr_decoherence::invariant::{lr_trajectory, phases};
use lr_decoherence::linalg::max_abs_diff;
use lr_decoherence::oracle::{propagate_substepped, Trajectory};
use lr_decoherence::protocol::{hamiltonian_matrix, ScalarFunction};
use lr_decoherence::Spin;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6};

fn constant_model(couplings: &[f64], detuning: f64, occupations: (u32, u32), horizon: f64) -> CiniModel<f64> {
    CiniModel {
        levels: couplings
            .iter()
            .enumerate()
            .map(|(k, g)| Level {
                label: format!("L{k}"),
                energy: 0.3 * k as f64,
                coupling: Coupling::constant(Complex64::new(*g, 0.0)),
            })
            .collect(),
        omega1: ScalarFunction::constant(0.4 + detuning),
        omega2: ScalarFunction::constant(0.4),
        occupations,
        horizon,
    }
}

/// Level coupling with `θ = atan2(2g, Δ)` equal to `theta`.
fn coupling_for(theta: f64, detuning: f64) -> f64 {
    detuning * theta.tan() / 2.0
}

#[test]
fn spin_one_sector_spectrum() {
    let model = constant_model(&[0.5], 1.0, (1, 1), 1.0);
    let bh = reduce_to_sector(&model, 0).unwrap();
    let rep = model.representation().unwrap();
    let offset = bh.offset.value(0.0);
    let ev = hermitian_eigenvalues(&bh.matrix(&rep, 0.0));
    let want = [-2f64.sqrt(), 0.0, 2f64.sqrt()];
    for (x, y) in ev.iter().zip(want) {
        assert!((x - offset - y).abs() < 1e-13);
    }
    assert_eq!(rep.dim(), 1 + 1 + 1);
}

#[test]
fn round_trip_through_protocol() {
    let model = CiniModel {
        levels: vec![Level {
            label: "ramp".into(),
            energy: 0.0,
            coupling: Coupling { amplitude: ScalarFunction::linear(0.2, 0.1), phase: ScalarFunction::sinusoid(0.3, 0.2, 1.0, 0.0) },
        }],
        omega1: ScalarFunction::sinusoid(1.0, 0.1, 0.5, 0.0),
        omega2: ScalarFunction::constant(0.2),
        occupations: (2, 1),
        horizon: 4.0,
    };
    let rep = model.representation().unwrap();
    let bh = reduce_to_sector(&model, 0).unwrap();
    let bp = branch_protocol(&bh).unwrap();
    for k in 0..=40 {
        let t = 0.1 * k as f64;
        let h = hamiltonian_matrix(&bp.protocol, &rep, t).unwrap();
        assert!(max_abs_diff(&h, &bh.su2_part(&rep, t)) <= 1e-9, "t={t}");
    }
}

#[test]
fn adiabatic_constant_model_matches_formula() {
    let detuning = 1.0;
    let model = constant_model(&[0.0, coupling_for(FRAC_PI_2, detuning) * (1.0 - 1e-15)], detuning, (3, 3), 1.0);
    let f = level_pair_decoherence(&model, 0, 1, 0.1, PairMode::Adiabatic).unwrap();
    assert!(f.values.iter().all(|z| (z - Complex64::new(0.125, 0.0)).norm() < 1e-10));

    for twice in 1..=50 {
        for theta in [0.3, FRAC_PI_3, 1.2, 1.55] {
            let model = constant_model(&[coupling_for(0.1, detuning), coupling_for(theta, detuning)], detuning, (twice, 0), 0.5);
            let f = level_pair_decoherence(&model, 0, 1, 0.5, PairMode::Adiabatic).unwrap();
            let want = adiabatic_cini_factor(0.1, theta, Spin::from_twice(twice));
            assert!((f.values[0] - want).norm() <= 1e-10, "2j={twice} theta={theta}");
        }
    }
}

#[test]
fn time_dependent_ramp_matches_oracle() {
    let model = CiniModel {
        levels: vec![
            Level { label: "weak".into(), energy: 0.0, coupling: Coupling { amplitude: ScalarFunction::linear(0.2, 0.02), phase: ScalarFunction::constant(0.0) } },
            Level { label: "strong".into(), energy: 1.0, coupling: Coupling { amplitude: ScalarFunction::linear(0.4, 0.05), phase: ScalarFunction::constant(0.6) } },
        ],
        omega1: ScalarFunction::constant(1.5),
        omega2: ScalarFunction::constant(0.5),
        occupations: (2, 1),
        horizon: 8.0,
    };
    let rep = model.representation().unwrap();
    let step = 0.01;
    let ((bk, sk), (bl, sl)) = level_pair_solutions(&model, 0, 1, step, PairMode::Integrated).unwrap();
    let lambda = rep.highest_weight();
    let f = level_pair_decoherence(&model, 0, 1, step, PairMode::Integrated).unwrap();
    let (pk, pl) = (phases(&rep, &sk, &bk.protocol, lambda).unwrap(), phases(&rep, &sl, &bl.protocol, lambda).unwrap());
    let start_k = lr_trajectory(&rep, &sk, &pk).unwrap().states[0].clone();
    let start_l = lr_trajectory(&rep, &sl, &pl).unwrap().states[0].clone();
    let ok = propagate_substepped(&rep, &bk.protocol, &start_k, 8.0, step, 4).unwrap();
    let ol = propagate_substepped(&rep, &bl.protocol, &start_l, 8.0, step, 4).unwrap();
    let g = oracle_overlap_series(&rep, &ok, &ol, &pk, &pl).unwrap();
    assert!(g.max_deviation(&f).unwrap() <= 1e-5);
    assert!(f.values.iter().any(|z: &Complex64| (z.norm() - 1.0).abs() > 1e-3));
}

fn detector_branches(model: &CiniModel<f64>, step: f64) -> Vec<Trajectory<f64>> {
    let rep = model.representation().unwrap();
    let spec = AlgebraSpec::su2();
    (0..model.levels.len())
        .map(|k| {
            let bp = branch_protocol(&reduce_to_sector(model, k).unwrap()).unwrap();
            let sol = if bp.protocol.is_constant() {
                adiabatic_solution(&bp.protocol, model.horizon, step).unwrap()
            } else {
                solve_auxiliary_aligned(&bp.protocol, &spec, model.horizon, step, &AuxiliaryOptions::default()).unwrap()
            };
            let ph = phases(&rep, &sol, &bp.protocol, rep.highest_weight()).unwrap();
            lr_trajectory(&rep, &sol, &ph).unwrap()
        })
        .collect()
}

#[test]
fn composite_coherence_follows_decoherence_factor() {
    let detuning = 1.0;
    let model = constant_model(&[0.0, coupling_for(FRAC_PI_3, detuning)], detuning, (25, 25), 1.0);
    let branches = detector_branches(&model, 0.25);
    let half = Complex64::new(0.5f64.sqrt(), 0.0);
    let series = composite_state(&model, &[half, half], &branches).unwrap();
    let expected = 0.5 * FRAC_PI_6.cos().powi(50);
    for c in series.coherence(0, 1) {
        assert!((c.norm() - expected).abs() <= 1e-12);
    }
    assert!((0.5 * 7.5e-4 - expected).abs() <= 0.01 * 0.5 * 7.5e-4);
    for r in &series.reduced {
        assert!((r[[0, 0]].re + r[[1, 1]].re - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn orthogonal_detector_states_erase_coherence() {
    let model = constant_model(&[0.0, 0.0], 1.0, (1, 0), 1.0);
    let mut flipped = model.clone();
    flipped.levels[1].coupling = Coupling::constant(Complex64::new(0.0, 0.0));
    flipped.omega1 = ScalarFunction::constant(0.4);
    flipped.omega2 = ScalarFunction::constant(1.4);
    let mut branches = detector_branches(&model, 0.25);
    branches[1] = detector_branches(&flipped, 0.25).remove(1);
    let half = Complex64::new(0.5f64.sqrt(), 0.0);
    let series = composite_state(&model, &[half, half], &branches).unwrap();
    assert!(series.coherence(0, 1).iter().all(|c| c.norm() <= 1e-15));
}

#[test]
fn single_level_is_a_product_state() {
    let model = constant_model(&[0.3, 0.6], 1.0, (2, 2), 1.0);
    let branches = detector_branches(&model, 0.25);
    let series = composite_state(&model, &[Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)], &branches).unwrap();
    for r in &series.reduced {
        assert!((r[[0, 0]].re - 1.0).abs() <= 1e-12);
        assert!(r[[0, 1]].norm() == 0.0 && r[[1, 1]].norm() == 0.0);
    }
}
