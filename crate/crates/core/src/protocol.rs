//! Time-dependent Hamiltonian coefficients `ω(t)`, `θ(t)`, `φ(t)` and the
//! Hamiltonian they define,
//!
//! ```text
//! H(t) = ω [ ½ sin θ e^{−iφ} A₊ + ½ sin θ e^{iφ} A₋ + cos θ A ].
//! ```

use crate::algebra::Representation;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{cis, re, Real};

/// A real function of time with an exact first derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarFunction<T> {
    Constant(T),
    /// `c0 + c1·t`
    Linear { c0: T, c1: T },
    /// `c0 + c1·sin(c2·t + c3)`
    Sinusoid { c0: T, c1: T, c2: T, c3: T },
    /// `rate·t`, used for azimuthal angles that wind around the axis.
    Winding { rate: T },
    /// Natural cubic spline through equally spaced samples on `[0, span]`.
    Sampled(CubicSpline<T>),
}

impl<T: Real> ScalarFunction<T> {
    pub fn constant(c: T) -> Self {
        Self::Constant(c)
    }

    pub fn linear(c0: T, c1: T) -> Self {
        Self::Linear { c0, c1 }
    }

    pub fn sinusoid(c0: T, c1: T, c2: T, c3: T) -> Self {
        Self::Sinusoid { c0, c1, c2, c3 }
    }

    pub fn winding(rate: T) -> Self {
        Self::Winding { rate }
    }

    pub fn sampled(span: T, values: Vec<T>) -> Result<Self> {
        CubicSpline::new(span, values).map(Self::Sampled)
    }

    pub fn value(&self, t: T) -> T {
        match self {
            Self::Constant(c) => *c,
            Self::Linear { c0, c1 } => *c0 + *c1 * t,
            Self::Sinusoid { c0, c1, c2, c3 } => *c0 + *c1 * (*c2 * t + *c3).sin(),
            Self::Winding { rate } => *rate * t,
            Self::Sampled(s) => s.value(t),
        }
    }

    pub fn derivative(&self, t: T) -> T {
        match self {
            Self::Constant(_) => T::zero(),
            Self::Linear { c1, .. } => *c1,
            Self::Sinusoid { c1, c2, c3, .. } => *c1 * *c2 * (*c2 * t + *c3).cos(),
            Self::Winding { rate } => *rate,
            Self::Sampled(s) => s.derivative(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::Linear { c1, .. } | Self::Winding { rate: c1 } => c1.is_zero(),
            Self::Sinusoid { c1, c2, .. } => c1.is_zero() || c2.is_zero(),
            Self::Sampled(s) => s.values.windows(2).all(|w| w[0] == w[1]),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            Self::Constant(c) => c.is_finite(),
            Self::Linear { c0, c1 } => c0.is_finite() && c1.is_finite(),
            Self::Sinusoid { c0, c1, c2, c3 } => [*c0, *c1, *c2, *c3].iter().all(|v| v.is_finite()),
            Self::Winding { rate } => rate.is_finite(),
            Self::Sampled(s) => s.values.iter().all(|v| v.is_finite()),
        }
    }

    fn span(&self) -> Option<T> {
        match self {
            Self::Sampled(s) => Some(s.span),
            _ => None,
        }
    }
}

/// Natural cubic spline on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline<T> {
    span: T,
    h: T,
    values: Vec<T>,
    second: Vec<T>,
}

impl<T: Real> CubicSpline<T> {
    pub fn new(span: T, values: Vec<T>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidProtocol("sampled function needs at least two samples".into()));
        }
        if !(span > T::zero()) || !span.is_finite() {
            return Err(Error::InvalidProtocol(format!("sampled span {span} must be positive")));
        }
        let intervals = values.len() - 1;
        let h = span / T::from_usize(intervals).unwrap();
        let mut second = vec![T::zero(); values.len()];

        // Interior equations M_{i-1} + 4 M_i + M_{i+1} = 6 Δ²y_i / h², Thomas sweep.
        if intervals >= 2 {
            let k = intervals - 1;
            let six = T::lit(6.0);
            let four = T::lit(4.0);
            let mut diag = vec![four; k];
            let mut rhs: Vec<T> = (1..intervals)
                .map(|i| six * (values[i + 1] - T::lit(2.0) * values[i] + values[i - 1]) / (h * h))
                .collect();
            for i in 1..k {
                let w = T::one() / diag[i - 1];
                diag[i] -= w;
                rhs[i] = rhs[i] - w * rhs[i - 1];
            }
            second[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                second[i + 1] = (rhs[i] - second[i + 2]) / diag[i];
            }
        }
        Ok(Self { span, h, values, second })
    }

    fn locate(&self, t: T) -> (usize, T) {
        let last = self.values.len() - 2;
        let pos = (t / self.h).max(T::zero());
        let i = pos.floor().to_usize().unwrap_or(last).min(last);
        (i, t / self.h - T::from_usize(i).unwrap())
    }

    pub fn value(&self, t: T) -> T {
        let (i, u) = self.locate(t);
        let v = T::one() - u;
        let h2 = self.h * self.h / T::lit(6.0);
        v * self.values[i]
            + u * self.values[i + 1]
            + h2 * ((v * v * v - v) * self.second[i] + (u * u * u - u) * self.second[i + 1])
    }

    pub fn derivative(&self, t: T) -> T {
        let (i, u) = self.locate(t);
        let v = T::one() - u;
        let three = T::lit(3.0);
        (self.values[i + 1] - self.values[i]) / self.h
            + self.h / T::lit(6.0)
                * (-(three * v * v - T::one()) * self.second[i] + (three * u * u - T::one()) * self.second[i + 1])
    }

    pub fn span(&self) -> T {
        self.span
    }

    pub fn samples(&self) -> &[T] {
        &self.values
    }
}

/// Coefficients of `H(t)` at one instant, with the derivatives the
/// auxiliary equations and the geometric phase need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<T> {
    pub omega: T,
    pub theta: T,
    pub phi: T,
    pub dtheta_dt: T,
    pub dphi_dt: T,
}

/// One branch `i` of the model: `ω_i(t)`, `θ_i(t)`, `φ_i(t)` on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol<T> {
    pub label: String,
    pub omega: ScalarFunction<T>,
    pub theta: ScalarFunction<T>,
    pub phi: ScalarFunction<T>,
    horizon: T,
}

impl<T: Real> Protocol<T> {
    pub fn new(
        label: impl Into<String>,
        omega: ScalarFunction<T>,
        theta: ScalarFunction<T>,
        phi: ScalarFunction<T>,
        horizon: T,
    ) -> Result<Self> {
        let label = label.into();
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(Error::InvalidProtocol(format!("{label}: horizon {horizon} must be positive")));
        }
        for (name, f) in [("omega", &omega), ("theta", &theta), ("phi", &phi)] {
            if !f.is_finite() {
                return Err(Error::InvalidProtocol(format!("{label}: {name} has non-finite parameters")));
            }
            if let Some(span) = f.span() {
                if span < horizon * (T::one() - T::lit(1e-12)) {
                    return Err(Error::InvalidProtocol(format!(
                        "{label}: sampled {name} covers [0, {span}] but the window is [0, {horizon}]"
                    )));
                }
            }
        }
        Ok(Self { label, omega, theta, phi, horizon })
    }

    /// All-constant protocol.
    pub fn constant(label: impl Into<String>, omega: T, theta: T, phi: T, horizon: T) -> Result<Self> {
        Self::new(
            label,
            ScalarFunction::Constant(omega),
            ScalarFunction::Constant(theta),
            ScalarFunction::Constant(phi),
            horizon,
        )
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn is_constant(&self) -> bool {
        self.omega.is_constant() && self.theta.is_constant() && self.phi.is_constant()
    }

    pub fn evaluate(&self, t: T) -> Result<Coefficients<T>> {
        let slack = self.horizon * T::lit(1e-12);
        if !(t >= -slack && t <= self.horizon + slack) {
            return Err(Error::OutOfWindow { t: t.to_f64_lossy(), horizon: self.horizon.to_f64_lossy() });
        }
        Ok(Coefficients {
            omega: self.omega.value(t),
            theta: self.theta.value(t),
            phi: self.phi.value(t),
            dtheta_dt: self.theta.derivative(t),
            dphi_dt: self.phi.derivative(t),
        })
    }

    /// Largest `|ω|` over `samples + 1` equally spaced instants.
    pub fn max_abs_omega(&self, samples: usize) -> T {
        let n = samples.max(1);
        (0..=n)
            .map(|k| self.omega.value(self.horizon * T::from_usize(k).unwrap() / T::from_usize(n).unwrap()).abs())
            .fold(T::zero(), T::max)
    }
}

/// `H(t)` in the given representation.
pub fn hamiltonian_matrix<T: Real>(p: &Protocol<T>, rep: &Representation<T>, t: T) -> Result<ComplexMatrix<T>> {
    Ok(hamiltonian_from(&p.evaluate(t)?, rep))
}

pub fn hamiltonian_from<T: Real>(c: &Coefficients<T>, rep: &Representation<T>) -> ComplexMatrix<T> {
    let half = T::lit(0.5);
    let transverse = c.omega * half * c.theta.sin();
    rep.combine(
        cis(-c.phi) * transverse,
        cis(c.phi) * transverse,
        re(c.omega * c.theta.cos()),
    )
}
