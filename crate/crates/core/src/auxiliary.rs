//! Auxiliary equations for the invariant parameters `a(t)`, `b(t)`.
//!
//! Splitting the complex auxiliary equation into real and imaginary parts
//! gives the real system integrated here:
//!
//! ```text
//! da/dt = −(n·y/2) ω sin θ sin(b − φ)                  (= −√(mn/2) ω sin θ sin(b − φ))
//! db/dt = m ω cos θ − √(mn/2) ω cot a sin θ cos(b − φ)
//! ```
//!
//! `cot a` is singular at the poles of the `(a, b)` chart; integration
//! fails with [`Error::CoordinateSingularity`] rather than regularising.

use crate::algebra::AlgebraSpec;
use crate::error::{Error, Result};
use crate::grid::{spacing, uniform_grid};
use crate::protocol::{Coefficients, Protocol};
use crate::scalar::{cis, im, Cplx, Real};

pub const DEFAULT_SIN_FLOOR: f64 = 1e-6;
pub const DEFAULT_HALVING_TOLERANCE: f64 = 1e-6;

/// Point `(a, b)` on the invariant's parameter sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryState<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> AuxiliaryState<T> {
    pub fn new(a: T, b: T) -> Self {
        Self { a, b }
    }

    /// `(θ(0), φ(0))`: the invariant starts aligned with `H(0)` in the su(2)
    /// normalisation.
    pub fn aligned(p: &Protocol<T>) -> Result<Self> {
        let c = p.evaluate(T::zero())?;
        Ok(Self { a: c.theta, b: c.phi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxMode {
    Integrated,
    Stationary,
    Adiabatic,
}

impl AuxMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AuxMode::Integrated => "integrated",
            AuxMode::Stationary => "stationary",
            AuxMode::Adiabatic => "adiabatic",
        }
    }
}

/// `a(t)`, `b(t)` and `ḃ(t)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxiliarySolution<T> {
    label: String,
    mode: AuxMode,
    times: Vec<T>,
    a: Vec<T>,
    b: Vec<T>,
    db_dt: Vec<T>,
    default_initial: bool,
}

impl<T: Real> AuxiliarySolution<T> {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mode(&self) -> AuxMode {
        self.mode
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn a(&self) -> &[T] {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    /// `ḃ` at each grid point, from the auxiliary equations (integrated),
    /// `dφ/dt` (adiabatic), or zero (stationary).
    pub fn db_dt(&self) -> &[T] {
        &self.db_dt
    }

    pub fn state(&self, k: usize) -> AuxiliaryState<T> {
        AuxiliaryState { a: self.a[k], b: self.b[k] }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn step(&self) -> T {
        spacing(&self.times)
    }

    /// Whether the initial condition was the `(θ(0), φ(0))` convention rather
    /// than user supplied.
    pub fn default_initial(&self) -> bool {
        self.default_initial
    }

    pub(crate) fn mark_default_initial(mut self, flag: bool) -> Self {
        self.default_initial = flag;
        self
    }

    /// Largest mismatch between centred differences of `(a, b)` on the grid
    /// and the auxiliary right-hand side, over interior points.
    pub fn ode_residual(&self, p: &Protocol<T>, spec: &AlgebraSpec<T>) -> Result<T> {
        let h = self.step();
        let two_h = h + h;
        let mut worst = T::zero();
        for k in 1..self.len().saturating_sub(1) {
            let c = p.evaluate(self.times[k])?;
            let (da, db) = auxiliary_rhs(self.state(k), &c, spec)?;
            let fd_a = (self.a[k + 1] - self.a[k - 1]) / two_h;
            let fd_b = (self.b[k + 1] - self.b[k - 1]) / two_h;
            worst = worst.max((fd_a - da).abs()).max((fd_b - db).abs());
        }
        Ok(worst)
    }
}

/// Options for [`solve_auxiliary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxiliaryOptions {
    /// Smallest `|sin a|` at which `cot a` is evaluated.
    pub sin_floor: f64,
    /// Tolerance for the terminal-state comparison against a half-step run;
    /// `None` skips the second integration.
    pub halving_tolerance: Option<f64>,
}

impl Default for AuxiliaryOptions {
    fn default() -> Self {
        Self { sin_floor: DEFAULT_SIN_FLOOR, halving_tolerance: Some(DEFAULT_HALVING_TOLERANCE) }
    }
}

/// `min(10⁻², 1/(50·max|ω|))`
pub fn default_step<T: Real>(p: &Protocol<T>) -> T {
    let omega = p.max_abs_omega(1000);
    let cap = T::lit(1e-2);
    if omega > T::zero() {
        cap.min((T::lit(50.0) * omega).recip())
    } else {
        cap
    }
}

/// `(da/dt, db/dt)` with the default singularity floor.
pub fn auxiliary_rhs<T: Real>(s: AuxiliaryState<T>, c: &Coefficients<T>, spec: &AlgebraSpec<T>) -> Result<(T, T)> {
    auxiliary_rhs_with_floor(s, c, spec, T::lit(DEFAULT_SIN_FLOOR))
}

pub fn auxiliary_rhs_with_floor<T: Real>(
    s: AuxiliaryState<T>,
    c: &Coefficients<T>,
    spec: &AlgebraSpec<T>,
    sin_floor: T,
) -> Result<(T, T)> {
    let sin_a = s.a.sin();
    if !(sin_a.abs() >= sin_floor) {
        return Err(Error::CoordinateSingularity {
            t: f64::NAN,
            a: s.a.to_f64_lossy(),
            b: s.b.to_f64_lossy(),
            floor: sin_floor.to_f64_lossy(),
        });
    }
    let root = spec.root();
    let transverse = c.omega * c.theta.sin();
    let rel = s.b - c.phi;
    let da = -(spec.n() * spec.y() / T::lit(2.0)) * transverse * rel.sin();
    let db = spec.m() * c.omega * c.theta.cos() - root * transverse * s.a.cos() / sin_a * rel.cos();
    Ok((da, db))
}

/// Left-hand side of the complex auxiliary equation
///
/// `y e^{−ib}(ȧ cos a − i ḃ sin a) − i m ω [e^{−iφ} cos a sin θ − y e^{−ib} sin a cos θ]`,
///
/// which vanishes for a consistent `(a, b, ȧ, ḃ)`.
pub fn complex_auxiliary_residual<T: Real>(
    s: AuxiliaryState<T>,
    da: T,
    db: T,
    c: &Coefficients<T>,
    spec: &AlgebraSpec<T>,
) -> Cplx<T> {
    let y = spec.y();
    let (sa, ca) = s.a.sin_cos();
    let first = cis(-s.b) * Cplx::new(da * ca, -db * sa) * y;
    let bracket = cis(-c.phi) * (ca * c.theta.sin()) - cis(-s.b) * (y * sa * c.theta.cos());
    first - im(spec.m() * c.omega) * bracket
}

/// Classical RK4 on the uniform grid covering `[0, horizon]`.
pub fn solve_auxiliary<T: Real>(
    p: &Protocol<T>,
    spec: &AlgebraSpec<T>,
    init: AuxiliaryState<T>,
    horizon: T,
    step: T,
    options: &AuxiliaryOptions,
) -> Result<AuxiliarySolution<T>> {
    let times = uniform_grid(horizon, step)?;
    let floor = T::lit(options.sin_floor);
    let (a, b, db_dt) = integrate(p, spec, init, &times, floor)?;

    if let Some(tol) = options.halving_tolerance {
        let fine = uniform_grid(horizon, spacing(&times) / T::lit(2.0))?;
        let (fa, fb, _) = integrate(p, spec, init, &fine, floor)?;
        let last = a.len() - 1;
        let flast = fa.len() - 1;
        let deviation = (a[last] - fa[flast]).abs().max((b[last] - fb[flast]).abs()).to_f64_lossy();
        if !(deviation <= tol) {
            return Err(Error::StepHalving { deviation, tolerance: tol });
        }
    }

    Ok(AuxiliarySolution {
        label: p.label.clone(),
        mode: AuxMode::Integrated,
        times,
        a,
        b,
        db_dt,
        default_initial: false,
    })
}

type Series<T> = (Vec<T>, Vec<T>, Vec<T>);

fn integrate<T: Real>(
    p: &Protocol<T>,
    spec: &AlgebraSpec<T>,
    init: AuxiliaryState<T>,
    times: &[T],
    floor: T,
) -> Result<Series<T>> {
    let at = |t: T| {
        move |e: Error| match e {
            Error::CoordinateSingularity { a, b, floor, .. } => {
                Error::CoordinateSingularity { t: t.to_f64_lossy(), a, b, floor }
            }
            other => other,
        }
    };
    let rhs = |t: T, s: AuxiliaryState<T>| -> Result<(T, T)> {
        let c = p.evaluate(t)?;
        auxiliary_rhs_with_floor(s, &c, spec, floor).map_err(at(t))
    };

    let n = times.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    let mut db_dt = Vec::with_capacity(n);
    let mut s = init;
    let h = spacing(times);
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);

    for (k, &t) in times.iter().enumerate() {
        let k1 = rhs(t, s)?;
        a.push(s.a);
        b.push(s.b);
        db_dt.push(k1.1);
        if k + 1 == n {
            break;
        }
        let k2 = rhs(t + half, AuxiliaryState::new(s.a + half * k1.0, s.b + half * k1.1))?;
        let k3 = rhs(t + half, AuxiliaryState::new(s.a + half * k2.0, s.b + half * k2.1))?;
        let k4 = rhs(t + h, AuxiliaryState::new(s.a + h * k3.0, s.b + h * k3.1))?;
        let next = AuxiliaryState::new(
            s.a + sixth * (k1.0 + two * k2.0 + two * k3.0 + k4.0),
            s.b + sixth * (k1.1 + two * k2.1 + two * k3.1 + k4.1),
        );
        // A sign change of sin a means the step went through a pole of the chart.
        if next.a.sin().signum() != s.a.sin().signum() {
            return Err(Error::CoordinateSingularity {
                t: (t + half).to_f64_lossy(),
                a: next.a.to_f64_lossy(),
                b: next.b.to_f64_lossy(),
                floor: floor.to_f64_lossy(),
            });
        }
        s = next;
    }
    Ok((a, b, db_dt))
}

/// The adiabatic-limit parameters `a = θ(t)`, `b = φ(t)`.
pub fn adiabatic_solution<T: Real>(p: &Protocol<T>, horizon: T, step: T) -> Result<AuxiliarySolution<T>> {
    let times = uniform_grid(horizon, step)?;
    let mut a = Vec::with_capacity(times.len());
    let mut b = Vec::with_capacity(times.len());
    let mut db_dt = Vec::with_capacity(times.len());
    for &t in &times {
        let c = p.evaluate(t)?;
        a.push(c.theta);
        b.push(c.phi);
        db_dt.push(c.dphi_dt);
    }
    Ok(AuxiliarySolution { label: p.label.clone(), mode: AuxMode::Adiabatic, times, a, b, db_dt, default_initial: true })
}

/// Exact fixed point of the auxiliary system for a constant protocol: the
/// invariant axis parallel to the field, `tan a = (√(mn/2)/m) tan θ`, `b = φ`.
/// Reduces to `a = θ` for the su(2) normalisation `n = 2m`.
pub fn stationary_solution<T: Real>(
    p: &Protocol<T>,
    spec: &AlgebraSpec<T>,
    horizon: T,
    step: T,
) -> Result<AuxiliarySolution<T>> {
    if !p.is_constant() {
        return Err(Error::NotStationary);
    }
    let times = uniform_grid(horizon, step)?;
    let c = p.evaluate(T::zero())?;
    let a_star = if spec.root() == spec.m() {
        c.theta
    } else {
        (spec.root() * c.theta.sin()).atan2(spec.m() * c.theta.cos())
    };
    let n = times.len();
    Ok(AuxiliarySolution {
        label: p.label.clone(),
        mode: AuxMode::Stationary,
        times,
        a: vec![a_star; n],
        b: vec![c.phi; n],
        db_dt: vec![T::zero(); n],
        default_initial: true,
    })
}

/// [`solve_auxiliary`] from the aligned initial condition `(θ(0), φ(0))`.
pub fn solve_auxiliary_aligned<T: Real>(
    p: &Protocol<T>,
    spec: &AlgebraSpec<T>,
    horizon: T,
    step: T,
    options: &AuxiliaryOptions,
) -> Result<AuxiliarySolution<T>> {
    let init = AuxiliaryState::aligned(p)?;
    Ok(solve_auxiliary(p, spec, init, horizon, step, options)?.mark_default_initial(true))
}
