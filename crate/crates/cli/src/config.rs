//! Scenario files: line-oriented `key = value` pairs under `[section]`
//! headers, `#` or `;` comments.
//!
//! ```text
//! [scenario]
//! label   = rotating
//! horizon = 10
//! mode    = integrated            # integrated | adiabatic | stationary
//! routes  = matrix-element, closed-form, oracle-overlap
//!
//! [algebra]
//! m = 1
//! n = 2
//! j = 1
//!
//! [branch.up]
//! omega = 2
//! theta = sin(pi/4, 0.2, 0.5, 0)
//! phi   = 0
//!
//! [branch.down]
//! omega = 1.5
//! theta = pi/3
//! phi   = winding(0.3)
//! ```
//!
//! A Cini model replaces the `[algebra]` and `[branch.*]` sections with
//! `[cini]` (`omega1`, `omega2`, `n1`, `n2`) and one `[level.<label>]` per
//! level (`energy`, `g`, `g_phase`).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use ini::{Ini, ParseOption, Properties};
use lr_decoherence::auxiliary::{AuxiliaryState, DEFAULT_HALVING_TOLERANCE, DEFAULT_SIN_FLOOR};
use lr_decoherence::cini::{CiniModel, Coupling, Level};
use lr_decoherence::decoherence::Route;
use lr_decoherence::protocol::{Protocol, ScalarFunction};
use lr_decoherence::{AlgebraSpec, Spin};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Integrated,
    Adiabatic,
    Stationary,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Integrated => "integrated",
            Mode::Adiabatic => "adiabatic",
            Mode::Stationary => "stationary",
        }
    }
}

/// Check thresholds; every field may be overridden under `[tolerances]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub invariant_residual: f64,
    pub identity: f64,
    pub hv_diagonal: f64,
    pub oracle_overlap: f64,
    pub norm_drift: f64,
    pub consistency: f64,
    pub closed_form: f64,
    pub adiabatic_formula: f64,
    pub bound: f64,
    pub hermitian: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            invariant_residual: 1e-6,
            identity: 1e-11,
            hv_diagonal: 1e-5,
            oracle_overlap: 1e-6,
            norm_drift: 1e-9,
            consistency: 1e-5,
            closed_form: 1e-12,
            adiabatic_formula: 1e-10,
            bound: 1e-10,
            hermitian: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchSpec {
    pub protocol: Protocol<f64>,
    pub init: Option<AuxiliaryState<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum System {
    Branches { spec: AlgebraSpec, j: Spin, branches: Vec<BranchSpec> },
    Cini(CiniModel<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub delta: f64,
    pub jmax: Spin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub horizon: f64,
    pub step: Option<f64>,
    pub mode: Mode,
    pub routes: Vec<Route>,
    pub lambda: Option<f64>,
    pub output: Option<PathBuf>,
    pub oracle_substeps: usize,
    pub sin_floor: f64,
    pub halving_tolerance: Option<f64>,
    pub tolerances: Tolerances,
    pub system: System,
    pub scan: Option<ScanSpec>,
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    parse(&text).map_err(|e| match e {
        CliError::Parse { message, .. } => CliError::Parse { path: path.into(), message },
        other => other,
    })
}

pub fn parse(text: &str) -> Result<Scenario> {
    let options = ParseOption { enabled_quote: false, enabled_escape: false, ..ParseOption::default() };
    let ini = Ini::load_from_str_opt(text, options).map_err(|e| CliError::Parse {
        path: PathBuf::new(),
        message: format!("line {}: {}", e.line, e.msg),
    })?;

    let mut seen = BTreeSet::new();
    for name in ini.sections() {
        let name = name.unwrap_or("");
        if !seen.insert(name.to_string()) {
            return Err(CliError::config(format!("[{name}]"), "section declared twice"));
        }
    }
    if ini.general_section().iter().next().is_some() {
        let (key, _) = ini.general_section().iter().next().unwrap();
        return Err(CliError::config(key, "key outside any section"));
    }

    let scenario = Section::expect(&ini, "scenario")?;
    scenario.allow(&[
        "label",
        "horizon",
        "step",
        "mode",
        "routes",
        "lambda",
        "output",
        "oracle_substeps",
        "sin_floor",
        "halving_tolerance",
    ])?;
    let label = scenario.string("label")?;
    check_label("scenario.label", &label)?;
    let horizon = scenario.positive("horizon")?;
    let step = scenario.optional("step", parse_number)?;
    if let Some(s) = step {
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::config("scenario.step", "must be positive"));
        }
    }
    let mode = scenario.optional("mode", parse_mode)?.unwrap_or(Mode::Integrated);
    let routes = scenario.optional("routes", parse_routes)?.unwrap_or_else(|| vec![Route::MatrixElement]);
    let lambda = scenario.optional("lambda", parse_number)?;
    let output = scenario.raw("output").map(PathBuf::from);
    let oracle_substeps = scenario.optional("oracle_substeps", parse_count)?.unwrap_or(4);
    let sin_floor = scenario.optional("sin_floor", parse_number)?.unwrap_or(DEFAULT_SIN_FLOOR);
    if !(sin_floor > 0.0 && sin_floor < 1.0) {
        return Err(CliError::config("scenario.sin_floor", "must lie in (0, 1)"));
    }
    let halving_tolerance = match scenario.raw("halving_tolerance") {
        Some("off") => None,
        Some(_) => Some(scenario.positive("halving_tolerance")?),
        None => Some(DEFAULT_HALVING_TOLERANCE),
    };

    let tolerances = parse_tolerances(&ini)?;
    let scan = parse_scan(&ini)?;
    let system = parse_system(&ini, horizon)?;

    for name in ini.sections().flatten() {
        let known = matches!(name, "scenario" | "algebra" | "cini" | "tolerances" | "scan")
            || name.starts_with("branch.")
            || name.starts_with("level.");
        if !known {
            return Err(CliError::config(format!("[{name}]"), "unknown section"));
        }
    }

    Ok(Scenario {
        label,
        horizon,
        step,
        mode,
        routes,
        lambda,
        output,
        oracle_substeps,
        sin_floor,
        halving_tolerance,
        tolerances,
        system,
        scan,
    })
}

fn parse_system(ini: &Ini, horizon: f64) -> Result<System> {
    let branch_names: Vec<&str> = ini.sections().flatten().filter_map(|s| s.strip_prefix("branch.")).collect();
    let level_names: Vec<&str> = ini.sections().flatten().filter_map(|s| s.strip_prefix("level.")).collect();
    let cini = ini.section(Some("cini"));

    match (cini, branch_names.is_empty()) {
        (Some(_), false) => Err(CliError::config("[cini]", "cannot be combined with [branch.*] sections")),
        (None, true) if level_names.is_empty() => {
            Err(CliError::config("[branch.*]", "scenario needs at least one branch or a [cini] model"))
        }
        (None, true) => Err(CliError::config("[level.*]", "level sections require a [cini] section")),
        (Some(_), true) => parse_cini(ini, &level_names, horizon).map(System::Cini),
        (None, false) => {
            if !level_names.is_empty() {
                return Err(CliError::config("[level.*]", "level sections require a [cini] section"));
            }
            let algebra = Section::expect(ini, "algebra")?;
            algebra.allow(&["m", "n", "j"])?;
            let m = algebra.optional("m", parse_number)?.unwrap_or(1.0);
            let n = algebra.optional("n", parse_number)?.unwrap_or(2.0);
            let spec = AlgebraSpec::new(m, n).map_err(|e| CliError::config("algebra.m", e.to_string()))?;
            let j: Spin = algebra
                .string("j")?
                .parse()
                .map_err(|e: lr_decoherence::Error| CliError::config("algebra.j", e.to_string()))?;
            if j.twice() == 0 {
                return Err(CliError::config("algebra.j", "must be at least 1/2"));
            }
            let branches = branch_names
                .iter()
                .map(|name| parse_branch(ini, name, horizon))
                .collect::<Result<Vec<_>>>()?;
            Ok(System::Branches { spec, j, branches })
        }
    }
}

fn parse_branch(ini: &Ini, name: &str, horizon: f64) -> Result<BranchSpec> {
    check_label(&format!("[branch.{name}]"), name)?;
    let section = Section::expect(ini, &format!("branch.{name}"))?;
    section.allow(&["omega", "theta", "phi", "a0", "b0"])?;
    let omega = section.function("omega", horizon)?;
    let theta = section.function("theta", horizon)?;
    let phi = section.function("phi", horizon)?;
    let protocol =
        Protocol::new(name, omega, theta, phi, horizon).map_err(|e| CliError::config(section.key("omega"), e.to_string()))?;
    let init = match (section.optional("a0", parse_number)?, section.optional("b0", parse_number)?) {
        (Some(a), Some(b)) => Some(AuxiliaryState::new(a, b)),
        (None, None) => None,
        _ => return Err(CliError::config(section.key("a0"), "a0 and b0 must be given together")),
    };
    Ok(BranchSpec { protocol, init })
}

fn parse_cini(ini: &Ini, level_names: &[&str], horizon: f64) -> Result<CiniModel<f64>> {
    let cini = Section::expect(ini, "cini")?;
    cini.allow(&["omega1", "omega2", "n1", "n2"])?;
    if level_names.is_empty() {
        return Err(CliError::config("[level.*]", "a Cini model needs at least one level"));
    }
    let levels = level_names
        .iter()
        .map(|name| {
            check_label(&format!("[level.{name}]"), name)?;
            let section = Section::expect(ini, &format!("level.{name}"))?;
            section.allow(&["energy", "g", "g_phase"])?;
            let energy = section.optional("energy", parse_number)?.unwrap_or(0.0);
            let amplitude = section.function("g", horizon)?;
            let phase = match section.raw("g_phase") {
                Some(_) => section.function("g_phase", horizon)?,
                None => ScalarFunction::constant(0.0),
            };
            Ok(Level { label: name.to_string(), energy, coupling: Coupling { amplitude, phase } })
        })
        .collect::<Result<Vec<_>>>()?;
    let n1 = cini.required("n1", parse_occupation)?;
    let n2 = cini.required("n2", parse_occupation)?;
    if n1 + n2 == 0 {
        return Err(CliError::config("cini.n1", "n1 + n2 must be positive"));
    }
    Ok(CiniModel {
        levels,
        omega1: cini.function("omega1", horizon)?,
        omega2: cini.function("omega2", horizon)?,
        occupations: (n1, n2),
        horizon,
    })
}

fn parse_tolerances(ini: &Ini) -> Result<Tolerances> {
    let mut t = Tolerances::default();
    let Some(section) = Section::find(ini, "tolerances") else {
        return Ok(t);
    };
    let fields: [(&str, &mut f64); 10] = [
        ("invariant_residual", &mut t.invariant_residual),
        ("identity", &mut t.identity),
        ("hv_diagonal", &mut t.hv_diagonal),
        ("oracle_overlap", &mut t.oracle_overlap),
        ("norm_drift", &mut t.norm_drift),
        ("consistency", &mut t.consistency),
        ("closed_form", &mut t.closed_form),
        ("adiabatic_formula", &mut t.adiabatic_formula),
        ("bound", &mut t.bound),
        ("hermitian", &mut t.hermitian),
    ];
    let names: Vec<&str> = fields.iter().map(|(n, _)| *n).collect();
    section.allow(&names)?;
    for (name, slot) in fields {
        if section.raw(name).is_some() {
            *slot = section.positive(name)?;
        }
    }
    Ok(t)
}

fn parse_scan(ini: &Ini) -> Result<Option<ScanSpec>> {
    let Some(section) = Section::find(ini, "scan") else {
        return Ok(None);
    };
    section.allow(&["delta", "jmax"])?;
    let delta = section.required("delta", parse_number)?;
    let jmax = section.required("jmax", parse_spin)?;
    Ok(Some(ScanSpec { delta, jmax }))
}

struct Section<'a> {
    name: String,
    props: &'a Properties,
}

impl<'a> Section<'a> {
    fn find(ini: &'a Ini, name: &str) -> Option<Self> {
        ini.section(Some(name)).map(|props| Section { name: name.to_string(), props })
    }

    fn expect(ini: &'a Ini, name: &str) -> Result<Self> {
        Self::find(ini, name).ok_or_else(|| CliError::config(format!("[{name}]"), "missing section"))
    }

    fn key(&self, key: &str) -> String {
        format!("{}.{}", self.name, key)
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        for (k, _) in self.props.iter() {
            if !keys.contains(&k) {
                return Err(CliError::config(self.key(k), "unknown key"));
            }
            if self.props.get_all(k).count() > 1 {
                return Err(CliError::config(self.key(k), "key given more than once"));
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.props.get(key).map(str::trim)
    }

    fn string(&self, key: &str) -> Result<String> {
        match self.raw(key) {
            Some(v) if !v.is_empty() => Ok(v.to_string()),
            _ => Err(CliError::config(self.key(key), "missing value")),
        }
    }

    fn optional<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<Option<T>> {
        self.raw(key).map(|v| parse(v).map_err(|m| CliError::config(self.key(key), m))).transpose()
    }

    fn required<T>(&self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Result<T> {
        self.optional(key, parse)?.ok_or_else(|| CliError::config(self.key(key), "missing value"))
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.required(key, parse_number)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::config(self.key(key), format!("must be positive, got {v}")))
        }
    }

    fn function(&self, key: &str, horizon: f64) -> Result<ScalarFunction<f64>> {
        self.required(key, |v| parse_function(v, horizon))
    }
}

fn check_label(key: &str, label: &str) -> Result<()> {
    let ok = !label.is_empty()
        && label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !label.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(CliError::config(key, format!("label `{label}` may only contain letters, digits, '-', '_' and '.'")))
    }
}

fn parse_mode(v: &str) -> std::result::Result<Mode, String> {
    match v {
        "integrated" => Ok(Mode::Integrated),
        "adiabatic" => Ok(Mode::Adiabatic),
        "stationary" => Ok(Mode::Stationary),
        _ => Err(format!("unknown mode `{v}`; expected integrated, adiabatic or stationary")),
    }
}

fn parse_routes(v: &str) -> std::result::Result<Vec<Route>, String> {
    let mut routes = Vec::new();
    for name in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let route = [Route::MatrixElement, Route::ClosedForm, Route::AdiabaticFormula, Route::OracleOverlap]
            .into_iter()
            .find(|r| r.as_str() == name)
            .ok_or_else(|| format!("unknown route `{name}`"))?;
        if !routes.contains(&route) {
            routes.push(route);
        }
    }
    if routes.is_empty() {
        return Err("at least one route is required".into());
    }
    Ok(routes)
}

fn parse_count(v: &str) -> std::result::Result<usize, String> {
    match v.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got `{v}`")),
    }
}

fn parse_occupation(v: &str) -> std::result::Result<u32, String> {
    v.parse::<u32>().map_err(|_| format!("expected a non-negative integer, got `{v}`"))
}

pub fn parse_spin(v: &str) -> std::result::Result<Spin, String> {
    v.parse::<Spin>().map_err(|e| e.to_string())
}

/// A real literal, `pi`/`tau`, or a product/quotient of those with an
/// optional leading sign: `-pi/3`, `2*pi/5`, `1.5e-2`.
pub fn parse_number(v: &str) -> std::result::Result<f64, String> {
    let s = v.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let mut value = 1.0;
    let mut op = '*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = rest[..end].trim();
        let factor = match token {
            "pi" => std::f64::consts::PI,
            "tau" => std::f64::consts::TAU,
            _ => token.parse::<f64>().map_err(|_| format!("cannot parse `{v}` as a number"))?,
        };
        value = if op == '*' { value * factor } else { value / factor };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    let out = sign * value;
    if out.is_finite() {
        Ok(out)
    } else {
        Err(format!("`{v}` is not finite"))
    }
}

/// `<number>`, `linear(c0, c1)`, `sin(c0, c1, c2, c3)`, `winding(rate)` or
/// `samples(v0, …, vN)` (uniform knots spanning `[0, horizon]`).
pub fn parse_function(v: &str, horizon: f64) -> std::result::Result<ScalarFunction<f64>, String> {
    let v = v.trim();
    let Some(open) = v.find('(') else {
        return parse_number(v).map(ScalarFunction::constant);
    };
    let name = v[..open].trim();
    let inner = v[open + 1..].strip_suffix(')').ok_or_else(|| format!("missing `)` in `{v}`"))?;
    let args = inner.split(',').map(parse_number).collect::<std::result::Result<Vec<_>, _>>()?;
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(format!("`{name}` takes {n} arguments, got {}", args.len()))
        }
    };
    match name {
        "linear" => arity(2).map(|_| ScalarFunction::linear(args[0], args[1])),
        "sin" => arity(4).map(|_| ScalarFunction::sinusoid(args[0], args[1], args[2], args[3])),
        "winding" => arity(1).map(|_| ScalarFunction::winding(args[0])),
        "samples" => ScalarFunction::sampled(horizon, args).map_err(|e| e.to_string()),
        _ => Err(format!("unknown function `{name}`")),
    }
}
