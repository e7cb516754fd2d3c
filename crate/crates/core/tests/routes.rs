mod common;

use common::su2;
use lr_decoherence::algebra::AlgebraSpec;
use lr_decoherence::auxiliary::{default_step, solve_auxiliary, solve_auxiliary_aligned, AuxiliaryOptions, AuxiliaryState};
use lr_decoherence::decoherence::{closed_form_series, decoherence_matrix_element, detector_overlap_vs_factor, oracle_overlap_series};
use lr_decoherence::invariant::{invariant_residual, lr_trajectory, phases, solid_angle_phase, transform_check};
use lr_decoherence::linalg::max_abs;
use lr_decoherence::oracle::{overlap_series, propagate_substepped, schrodinger_residual};
use lr_decoherence::protocol::{hamiltonian_matrix, Protocol, ScalarFunction};
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, TAU};

const T: f64 = 10.0;

fn modulated() -> Protocol<f64> {
    Protocol::new(
        "modulated",
        ScalarFunction::constant(2.0),
        ScalarFunction::sinusoid(FRAC_PI_4, 0.2, 0.5, 0.0),
        ScalarFunction::constant(0.0),
        T,
    )
    .unwrap()
}

fn rotating() -> Protocol<f64> {
    Protocol::new("rotating", ScalarFunction::constant(1.5), ScalarFunction::constant(FRAC_PI_3), ScalarFunction::winding(0.3), T)
        .unwrap()
}

#[test]
fn exact_solution_tracks_oracle() {
    let spec = AlgebraSpec::su2();
    let (pi, pj) = (modulated(), rotating());
    let h = default_step(&pi).min(default_step(&pj));
    let si = solve_auxiliary_aligned(&pi, &spec, T, h, &AuxiliaryOptions::default()).unwrap();
    let sj = solve_auxiliary_aligned(&pj, &spec, T, h, &AuxiliaryOptions::default()).unwrap();
    for twice in [1, 2, 4] {
        let rep = su2(twice);
        let lambda = rep.highest_weight();
        let (phi, phj) = (phases(&rep, &si, &pi, lambda).unwrap(), phases(&rep, &sj, &pj, lambda).unwrap());
        let (lri, lrj) = (lr_trajectory(&rep, &si, &phi).unwrap(), lr_trajectory(&rep, &sj, &phj).unwrap());
        let oi = propagate_substepped(&rep, &pi, &lri.states[0], T, h, 4).unwrap();
        let oj = propagate_substepped(&rep, &pj, &lrj.states[0], T, h, 4).unwrap();
        for (oracle, lr) in [(&oi, &lri), (&oj, &lrj)] {
            let worst = overlap_series(oracle, lr).unwrap().iter().map(|z| 1.0 - z.norm()).fold(0.0, f64::max);
            assert!(worst <= 1e-6, "j2={twice}: {worst}");
        }
        let f = decoherence_matrix_element(&rep, &si, &sj, lambda).unwrap();
        assert!(detector_overlap_vs_factor(&oi, &oj, &phi, &phj, &f).unwrap() <= 1e-5);
        let g = oracle_overlap_series(&rep, &oi, &oj, &phi, &phj).unwrap();
        assert!(g.max_deviation(&f).unwrap() <= 1e-5);
    }
}

#[test]
fn exact_solution_satisfies_schrodinger() {
    let spec = AlgebraSpec::su2();
    let p = modulated();
    let rep = su2(2);
    let s = solve_auxiliary_aligned(&p, &spec, T, 0.01, &AuxiliaryOptions::default()).unwrap();
    let ph = phases(&rep, &s, &p, -1.0).unwrap();
    let lr = lr_trajectory(&rep, &s, &ph).unwrap();
    let scale = max_abs(&hamiltonian_matrix(&p, &rep, 0.0).unwrap());
    assert!(schrodinger_residual(&lr, &rep, &p).unwrap() <= 1e-4 * scale);
}

#[test]
fn invariant_residual_is_second_order_in_step() {
    let spec = AlgebraSpec::su2();
    let p = rotating();
    let rep = su2(2);
    let residual = |h: f64| {
        let s = solve_auxiliary_aligned(&p, &spec, T, h, &AuxiliaryOptions::default()).unwrap();
        invariant_residual(&rep, &p, &s).unwrap()
    };
    let ratio = residual(0.01) / residual(0.005);
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn transformed_hamiltonian_is_diagonal() {
    let spec = AlgebraSpec::su2();
    let p = modulated();
    let s = solve_auxiliary_aligned(&p, &spec, T, 0.0025, &AuxiliaryOptions::default()).unwrap();
    for twice in [1, 3, 4] {
        let tc = transform_check(&su2(twice), &p, &s, 100).unwrap();
        assert_eq!(tc.samples, 100);
        assert!(tc.identity_defect <= 1e-11);
        assert!(tc.off_diagonal <= 1e-5 && tc.diagonal_deviation <= 1e-5, "{tc:?}");
    }
}

#[test]
fn geometric_phase_of_a_precession_loop_is_the_solid_angle() {
    let spec = AlgebraSpec::su2();
    let (omega, rate) = (1.0, 0.5);
    for a in [FRAC_PI_6, FRAC_PI_3] {
        let theta = a - (rate * a.sin() / omega).asin();
        let horizon = TAU / rate;
        let p = Protocol::new("loop", ScalarFunction::constant(omega), ScalarFunction::constant(theta), ScalarFunction::winding(rate), horizon)
            .unwrap();
        let s = solve_auxiliary(&p, &spec, AuxiliaryState::new(a, 0.0), horizon, 0.01, &AuxiliaryOptions::default()).unwrap();
        assert!(s.a().iter().all(|x| (x - a).abs() <= 1e-12));
        let rep = su2(1);
        let ph = phases(&rep, &s, &p, 0.5).unwrap();
        let got = ph.phi_g[ph.phi_g.len() - 1];
        assert!((got - solid_angle_phase(a, 0.5, 1.0)).abs() <= 1e-8, "{got}");
    }
}

#[test]
fn closed_form_departs_from_matrix_element_off_axis() {
    let spec = AlgebraSpec::su2();
    let (pi, pj) = (modulated(), rotating());
    let si = solve_auxiliary_aligned(&pi, &spec, T, 0.01, &AuxiliaryOptions::default()).unwrap();
    let sj = solve_auxiliary_aligned(&pj, &spec, T, 0.01, &AuxiliaryOptions::default()).unwrap();
    let rep = su2(2);
    let f = decoherence_matrix_element(&rep, &si, &sj, 1.0).unwrap();
    let c = closed_form_series(&rep, &si, &sj, 1.0).unwrap();
    assert!((c.values[0] - f.values[0]).norm() <= 1e-12);
    assert!(c.max_deviation(&f).unwrap() > 1e-3);
}
