//! Scenario execution shared by the `run`, `verify` and `scan-j` commands.

use std::path::{Path, PathBuf};

use lr_decoherence::algebra::{build_representation, Representation};
use lr_decoherence::auxiliary::{
    adiabatic_solution, default_step, solve_auxiliary, solve_auxiliary_aligned, stationary_solution, AuxiliaryOptions,
    AuxiliarySolution, AuxiliaryState,
};
use lr_decoherence::cini::{branch_protocol, reduce_to_sector};
use lr_decoherence::decoherence::{
    adiabatic_formula_series, classical_limit_scan, closed_form_series, decoherence_matrix_element,
    detector_overlap_vs_factor, oracle_overlap_series, ClassicalLimitScan, DecoherenceSeries, Route,
};
use lr_decoherence::invariant::{
    invariant_residual, lr_state, lr_trajectory, phases, transform_check, PhaseDecomposition,
};
use lr_decoherence::oracle::{overlap_series, propagate_substepped, Trajectory};
use lr_decoherence::protocol::Protocol;
use lr_decoherence::{Error, Spin};

use crate::config::{self, Mode, Scenario, ScanSpec, System};
use crate::error::{is_numerical, CliError, Result};
use crate::output;
use crate::report::{Check, Report};

/// Environment variable that overrides every scenario's output directory.
pub const OUT_DIR_ENV: &str = "LRDECOH_OUT_DIR";

pub struct Branch {
    pub label: String,
    pub protocol: Protocol<f64>,
    pub init: Option<AuxiliaryState<f64>>,
}

/// A validated scenario with its representation and resolved step.
pub struct Prepared {
    pub scenario: Scenario,
    pub rep: Representation<f64>,
    pub branches: Vec<Branch>,
    pub step: f64,
    pub lambda: f64,
}

pub fn prepare(scenario: Scenario, step_override: Option<f64>) -> Result<Prepared> {
    let (rep, branches) = match &scenario.system {
        System::Branches { spec, j, branches } => {
            let rep = build_representation(*spec, *j).map_err(|e| CliError::config("algebra.j", e.to_string()))?;
            let branches = branches
                .iter()
                .map(|b| Branch { label: b.protocol.label.clone(), protocol: b.protocol.clone(), init: b.init })
                .collect();
            (rep, branches)
        }
        System::Cini(model) => {
            let rep = model.representation().map_err(|e| CliError::config("cini.n1", e.to_string()))?;
            let branches = (0..model.levels.len())
                .map(|k| {
                    let key = format!("level.{}.g", model.levels[k].label);
                    let bh = reduce_to_sector(model, k).map_err(|e| CliError::config(&key, e.to_string()))?;
                    let bp = branch_protocol(&bh).map_err(|e| CliError::config(&key, e.to_string()))?;
                    Ok(Branch { label: bh.label.clone(), protocol: bp.protocol, init: None })
                })
                .collect::<Result<Vec<_>>>()?;
            (rep, branches)
        }
    };

    let step = match step_override.or(scenario.step) {
        Some(s) if s > 0.0 && s.is_finite() => s,
        Some(s) => return Err(CliError::config("step", format!("must be positive, got {s}"))),
        None => branches.iter().map(|b| default_step(&b.protocol)).fold(f64::INFINITY, f64::min),
    };
    let lambda = scenario.lambda.unwrap_or_else(|| rep.highest_weight());
    rep.eigen_index(lambda).map_err(|e| CliError::config("scenario.lambda", e.to_string()))?;
    if scenario.mode == Mode::Stationary {
        if let Some(b) = branches.iter().find(|b| !b.protocol.is_constant()) {
            return Err(CliError::config(
                "scenario.mode",
                format!("stationary mode needs constant protocols; branch `{}` is time-dependent", b.label),
            ));
        }
    }
    Ok(Prepared { scenario, rep, branches, step, lambda })
}

pub struct BranchRun {
    pub label: String,
    pub protocol: Protocol<f64>,
    pub solution: AuxiliarySolution<f64>,
    pub phases: PhaseDecomposition<f64>,
}

pub fn solve_branches(p: &Prepared) -> Result<Vec<BranchRun>> {
    let s = &p.scenario;
    let options = AuxiliaryOptions { sin_floor: s.sin_floor, halving_tolerance: s.halving_tolerance };
    let spec = p.rep.spec();
    p.branches
        .iter()
        .map(|b| {
            let ctx = |e: Error| CliError::core(format!("branch {}", b.label), e);
            let solution = match (s.mode, b.init) {
                (Mode::Integrated, Some(init)) => solve_auxiliary(&b.protocol, spec, init, s.horizon, p.step, &options),
                (Mode::Integrated, None) => solve_auxiliary_aligned(&b.protocol, spec, s.horizon, p.step, &options),
                (Mode::Adiabatic, _) => adiabatic_solution(&b.protocol, s.horizon, p.step),
                (Mode::Stationary, _) => stationary_solution(&b.protocol, spec, s.horizon, p.step),
            }
            .map_err(ctx)?;
            let phases = phases(&p.rep, &solution, &b.protocol, p.lambda).map_err(ctx)?;
            Ok(BranchRun { label: b.label.clone(), protocol: b.protocol.clone(), solution, phases })
        })
        .collect()
}

/// Oracle trajectories started from each branch's exact state at `t = 0`.
pub fn oracle_trajectories(p: &Prepared, runs: &[BranchRun]) -> Result<Vec<Trajectory<f64>>> {
    runs.iter()
        .map(|r| {
            let ctx = |e: Error| CliError::core(format!("branch {} oracle", r.label), e);
            let psi0 = lr_state(&p.rep, &r.solution, &r.phases, 0).map_err(ctx)?;
            propagate_substepped(&p.rep, &r.protocol, &psi0, p.scenario.horizon, p.step, p.scenario.oracle_substeps)
                .map_err(ctx)
        })
        .collect()
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn pair_name(runs: &[BranchRun], i: usize, j: usize) -> String {
    format!("{}__{}", runs[i].label, runs[j].label)
}

pub fn pair_series(
    p: &Prepared,
    runs: &[BranchRun],
    oracle: Option<&[Trajectory<f64>]>,
    i: usize,
    j: usize,
) -> Result<Vec<DecoherenceSeries<f64>>> {
    let ctx = |e: Error| CliError::core(format!("pair {}", pair_name(runs, i, j)), e);
    let (si, sj) = (&runs[i].solution, &runs[j].solution);
    p.scenario
        .routes
        .iter()
        .map(|route| match route {
            Route::MatrixElement => decoherence_matrix_element(&p.rep, si, sj, p.lambda),
            Route::ClosedForm => closed_form_series(&p.rep, si, sj, p.lambda),
            Route::AdiabaticFormula => adiabatic_formula_series(&p.rep, si, sj),
            Route::OracleOverlap => {
                let traj = oracle.expect("oracle trajectories computed when the route is requested");
                oracle_overlap_series(&p.rep, &traj[i], &traj[j], &runs[i].phases, &runs[j].phases)
            }
        })
        .collect::<lr_decoherence::Result<Vec<_>>>()
        .map_err(ctx)
}

pub fn output_dir(scenario: &Scenario) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => scenario.output.clone().unwrap_or_else(|| Path::new("out").join(&scenario.label)),
    }
}

/// Result of one command.
pub struct Outcome {
    pub report: Report,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        if self.report.passed() {
            0
        } else {
            crate::error::EXIT_NUMERICAL
        }
    }
}

fn metadata(p: &Prepared, runs: &[BranchRun]) -> Vec<(String, String)> {
    let s = &p.scenario;
    let spec = p.rep.spec();
    let mut out = vec![
        ("scenario".to_string(), s.label.clone()),
        ("mode".into(), s.mode.as_str().into()),
        ("horizon".into(), output::fmt_f64(s.horizon)),
        ("step".into(), output::fmt_f64(runs.first().map_or(p.step, |r| r.solution.step()))),
        ("m".into(), output::fmt_f64(spec.m())),
        ("n".into(), output::fmt_f64(spec.n())),
        ("j".into(), p.rep.j().to_string()),
        ("lambda".into(), output::fmt_f64(p.lambda)),
        ("routes".into(), s.routes.iter().map(|r| r.as_str()).collect::<Vec<_>>().join(" ")),
    ];
    for r in runs {
        let init = if r.solution.default_initial() { "default" } else { "configured" };
        out.push((format!("branch.{}.initial", r.label), init.into()));
        out.push((format!("branch.{}.a0", r.label), output::fmt_f64(r.solution.a()[0])));
        out.push((format!("branch.{}.b0", r.label), output::fmt_f64(r.solution.b()[0])));
    }
    out
}

/// Report for a pipeline that stopped on a numerical error.
fn failure_report(err: &CliError) -> Report {
    let mut report = Report::default();
    let (subject, source) = match err {
        CliError::Core { context, source } => (context.as_str(), source),
        _ => unreachable!("only numerical core errors are reported"),
    };
    let check = match *source {
        Error::CoordinateSingularity { t, floor, .. } => Check::failed("coordinate singularity", subject, t, floor),
        Error::StepHalving { deviation, tolerance } => Check::failed("step halving", subject, deviation, tolerance),
        Error::NotNormalized(n) => Check::failed("normalisation", subject, n, 1.0),
        _ => Check::failed("numerical error", subject, f64::NAN, f64::NAN),
    };
    report.push(check);
    report
}

/// Runs `body`; numerical errors become a failing report written to
/// `report_name`, everything else propagates.
fn guarded(out_dir: &Path, report_name: &str, body: impl FnOnce() -> Result<Outcome>) -> Result<Outcome> {
    match body() {
        Err(e) if matches!(&e, CliError::Core { source, .. } if is_numerical(source)) => {
            eprintln!("error: {e}");
            let report = failure_report(&e);
            let path = out_dir.join(report_name);
            report.write_csv(&path)?;
            Ok(Outcome { report, out_dir: out_dir.into(), files: vec![path] })
        }
        other => other,
    }
}

fn bound_checks(report: &mut Report, series: &[DecoherenceSeries<f64>], subject: &str, tol: f64) {
    for s in series {
        report.push(Check::at_most(&format!("|F| bound ({})", s.route.as_str()), subject, s.max_abs(), 1.0 + tol));
    }
}

fn hermitian_check(p: &Prepared, runs: &[BranchRun], i: usize, j: usize, forward: &DecoherenceSeries<f64>) -> Result<Check> {
    let ctx = |e: Error| CliError::core(format!("pair {}", pair_name(runs, i, j)), e);
    let reverse = decoherence_matrix_element(&p.rep, &runs[j].solution, &runs[i].solution, p.lambda).map_err(ctx)?;
    let defect = forward.hermitian_defect(&reverse).map_err(ctx)?;
    Ok(Check::at_most("hermitian symmetry", &pair_name(runs, i, j), defect, p.scenario.tolerances.hermitian))
}

pub fn run(config: &Path, step: Option<f64>) -> Result<Outcome> {
    let p = prepare(config::load(config)?, step)?;
    let out_dir = output_dir(&p.scenario);
    guarded(&out_dir, "report.csv", || {
        let runs = solve_branches(&p)?;
        let oracle = if p.scenario.routes.contains(&Route::OracleOverlap) {
            Some(oracle_trajectories(&p, &runs)?)
        } else {
            None
        };
        let mut files = Vec::new();
        let mut report = Report::default();
        for r in &runs {
            let dir = out_dir.join(&r.label);
            output::write_aux(&dir.join("aux.csv"), &r.solution)?;
            output::write_phases(&dir.join("phases.csv"), &r.phases)?;
            files.push(dir.join("aux.csv"));
            files.push(dir.join("phases.csv"));
        }
        for (i, j) in pairs(runs.len()) {
            let series = pair_series(&p, &runs, oracle.as_deref(), i, j)?;
            let name = pair_name(&runs, i, j);
            let path = out_dir.join(&name).join("decoherence.csv");
            output::write_decoherence(&path, &series)?;
            files.push(path);
            bound_checks(&mut report, &series, &name, p.scenario.tolerances.bound);
            let forward = match series.iter().find(|s| s.route == Route::MatrixElement) {
                Some(s) => s.clone(),
                None => decoherence_matrix_element(&p.rep, &runs[i].solution, &runs[j].solution, p.lambda)
                    .map_err(|e| CliError::core(format!("pair {name}"), e))?,
            };
            report.push(hermitian_check(&p, &runs, i, j, &forward)?);
        }
        if let Some(scan) = p.scenario.scan {
            let result = scan_table(scan);
            let path = out_dir.join("scan.csv");
            output::write_scan(&path, &result)?;
            files.push(path);
            scan_checks(&mut report, &result);
        }
        let meta = out_dir.join("metadata.csv");
        output::write_metadata(&meta, &metadata(&p, &runs))?;
        files.push(meta);
        let path = out_dir.join("report.csv");
        report.write_csv(&path)?;
        files.push(path);
        Ok(Outcome { report, out_dir: out_dir.clone(), files })
    })
}

/// Cross-route verification suite for every branch and branch pair.
pub fn verify(config: &Path, step: Option<f64>) -> Result<Outcome> {
    let p = prepare(config::load(config)?, step)?;
    let out_dir = output_dir(&p.scenario);
    guarded(&out_dir, "verification.csv", || {
        let tol = p.scenario.tolerances;
        let runs = solve_branches(&p)?;
        let oracle = oracle_trajectories(&p, &runs)?;
        let mut report = Report::default();
        let samples = 100;

        for (r, traj) in runs.iter().zip(&oracle) {
            let ctx = |e: Error| CliError::core(format!("branch {}", r.label), e);
            let residual = invariant_residual(&p.rep, &r.protocol, &r.solution).map_err(ctx)?;
            report.push(Check::at_most("invariant residual", &r.label, residual, tol.invariant_residual));
            let tc = transform_check(&p.rep, &r.protocol, &r.solution, samples).map_err(ctx)?;
            report.push(Check::at_most("invariant identity", &r.label, tc.identity_defect, tol.identity));
            report.push(Check::at_most("transformed hamiltonian off-diagonal", &r.label, tc.off_diagonal, tol.hv_diagonal));
            report.push(Check::at_most(
                "transformed hamiltonian coefficient",
                &r.label,
                tc.diagonal_deviation,
                tol.hv_diagonal,
            ));
            let lr = lr_trajectory(&p.rep, &r.solution, &r.phases).map_err(ctx)?;
            let worst = overlap_series(traj, &lr)
                .map_err(ctx)?
                .iter()
                .map(|z| 1.0 - z.norm())
                .fold(0.0, f64::max);
            report.push(Check::at_most("oracle overlap", &r.label, worst, tol.oracle_overlap));
            report.push(Check::at_most("oracle norm drift", &r.label, traj.norm_drift(), tol.norm_drift));
        }

        for (i, j) in pairs(runs.len()) {
            let name = pair_name(&runs, i, j);
            let ctx = |e: Error| CliError::core(format!("pair {name}"), e);
            let (si, sj) = (&runs[i].solution, &runs[j].solution);
            let f = decoherence_matrix_element(&p.rep, si, sj, p.lambda).map_err(ctx)?;
            bound_checks(&mut report, std::slice::from_ref(&f), &name, tol.bound);
            report.push(hermitian_check(&p, &runs, i, j, &f)?);
            let consistency =
                detector_overlap_vs_factor(&oracle[i], &oracle[j], &runs[i].phases, &runs[j].phases, &f).map_err(ctx)?;
            report.push(Check::at_most("overlap consistency", &name, consistency, tol.consistency));

            let same_axis = si.b().iter().zip(sj.b()).all(|(x, y)| (x - y).abs() <= 1e-14);
            let closed = closed_form_series(&p.rep, si, sj, p.lambda).map_err(ctx)?.max_deviation(&f).map_err(ctx)?;
            report.push(if same_axis {
                Check::at_most("closed form vs matrix element", &name, closed, tol.closed_form)
            } else {
                Check::info("closed form vs matrix element", &name, closed)
            });
            let formula = adiabatic_formula_series(&p.rep, si, sj).map_err(ctx)?;
            if p.lambda == p.rep.highest_weight() {
                let dev = formula.max_deviation(&f).map_err(ctx)?;
                report.push(if same_axis {
                    Check::at_most("adiabatic formula vs matrix element", &name, dev, tol.adiabatic_formula)
                } else {
                    Check::info("adiabatic formula vs matrix element", &name, dev)
                });
            }
        }

        let path = out_dir.join("verification.csv");
        report.write_csv(&path)?;
        Ok(Outcome { report, out_dir: out_dir.clone(), files: vec![path] })
    })
}

fn scan_table(scan: ScanSpec) -> ClassicalLimitScan<f64> {
    let js: Vec<Spin> = scan.jmax.ladder_up_to().collect();
    classical_limit_scan(scan.delta, &js)
}

fn scan_checks(report: &mut Report, scan: &ClassicalLimitScan<f64>) {
    if let Some(last) = scan.points.last() {
        report.push(Check::info("classical limit |F|", &format!("j={}", last.j), last.abs_f));
    }
    if scan.excluded {
        report.push(Check::info("excluded angle (delta/2 = k*pi)", "scan", scan.delta));
    }
}

/// `|F(j)|` for `j = 1/2 … jmax` at angle `delta`; flags override `[scan]`.
pub fn scan_j(config: &Path, delta: Option<f64>, jmax: Option<Spin>) -> Result<Outcome> {
    let scenario = config::load(config)?;
    let base = scenario.scan;
    let delta = delta
        .or(base.map(|s| s.delta))
        .ok_or_else(|| CliError::config("scan.delta", "missing; pass --delta or add a [scan] section"))?;
    let jmax = jmax
        .or(base.map(|s| s.jmax))
        .ok_or_else(|| CliError::config("scan.jmax", "missing; pass --jmax or add a [scan] section"))?;
    if jmax.twice() == 0 {
        return Err(CliError::config("scan.jmax", "must be at least 1/2"));
    }
    let out_dir = output_dir(&scenario);
    let result = scan_table(ScanSpec { delta, jmax });
    let path = out_dir.join("scan.csv");
    output::write_scan(&path, &result)?;
    let mut report = Report::default();
    scan_checks(&mut report, &result);
    Ok(Outcome { report, out_dir, files: vec![path] })
}
