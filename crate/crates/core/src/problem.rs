//! Sturm–Liouville problems with separated Robin boundary conditions.
//!
//! The operator is `A f = (1/ρ) ((p f')' − q f)` on
//! `{ f : α_a f'(a) + β_a f(a) = 0 = α_b f'(b) + β_b f(b) }`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::grid::GridFunction;
use crate::quad::{Grid, Interval};
use crate::scalar::Scalar;

/// Robin condition `alpha * f' + beta * f = 0` at one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Robin {
    pub alpha: f64,
    pub beta: f64,
}

impl Robin {
    pub const DIRICHLET: Robin = Robin { alpha: 0.0, beta: 1.0 };
    pub const NEUMANN: Robin = Robin { alpha: 1.0, beta: 0.0 };

    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || (alpha == 0.0 && beta == 0.0) {
            return Err(Error::InvalidInput(format!(
                "boundary pair ({alpha}, {beta}) must be finite and not (0, 0)"
            )));
        }
        Ok(Robin { alpha, beta })
    }

    pub fn is_dirichlet(&self) -> bool {
        self.alpha == 0.0
    }

    #[inline]
    pub fn residual<T: Scalar>(&self, value: T, deriv: T) -> T {
        T::lit(self.alpha) * deriv + T::lit(self.beta) * value
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SLProblem {
    pub interval: Interval<f64>,
    pub p: CoeffExpr,
    pub dp: CoeffExpr,
    pub q: CoeffExpr,
    pub rho: CoeffExpr,
    pub bc_a: Robin,
    pub bc_b: Robin,
}

/// Number of samples used to validate positivity of `p` and `ρ`.
const VALIDATION_SAMPLES: usize = 513;

impl SLProblem {
    /// Build a problem; `dp` is obtained by symbolic differentiation when absent.
    pub fn new(
        interval: Interval<f64>,
        p: CoeffExpr,
        dp: Option<CoeffExpr>,
        q: CoeffExpr,
        rho: CoeffExpr,
        bc_a: Robin,
        bc_b: Robin,
    ) -> Result<Self> {
        let dp = match dp {
            Some(d) => d,
            None => p.derivative()?,
        };
        let prob = SLProblem {
            interval,
            p,
            dp,
            q,
            rho,
            bc_a: Robin::new(bc_a.alpha, bc_a.beta)?,
            bc_b: Robin::new(bc_b.alpha, bc_b.beta)?,
        };
        prob.validate()?;
        Ok(prob)
    }

    /// Convenience constructor from expression strings.
    pub fn from_strs(a: f64, b: f64, p: &str, q: &str, rho: &str, bc_a: (f64, f64), bc_b: (f64, f64)) -> Result<Self> {
        Self::new(
            Interval::new(a, b)?,
            CoeffExpr::parse(p)?,
            None,
            CoeffExpr::parse(q)?,
            CoeffExpr::parse(rho)?,
            Robin::new(bc_a.0, bc_a.1)?,
            Robin::new(bc_b.0, bc_b.1)?,
        )
    }

    /// `-f''` on `[0, 1]` with `f(0) = f(1) = 0`.
    pub fn dirichlet_laplacian() -> Self {
        Self::from_strs(0.0, 1.0, "1", "0", "1", (0.0, 1.0), (0.0, 1.0)).expect("valid preset")
    }

    /// `-f''` on `[0, 1]` with `f'(0) = f'(1) = 0`.
    pub fn neumann_laplacian() -> Self {
        Self::from_strs(0.0, 1.0, "1", "0", "1", (1.0, 0.0), (1.0, 0.0)).expect("valid preset")
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = (self.interval.a, self.interval.b);
        for i in 0..VALIDATION_SAMPLES {
            let z = a + (b - a) * i as f64 / (VALIDATION_SAMPLES - 1) as f64;
            let (p, dp, q, rho) = (self.p.eval(z), self.dp.eval(z), self.q.eval(z), self.rho.eval(z));
            if !(p.is_finite() && dp.is_finite() && q.is_finite() && rho.is_finite()) {
                return Err(Error::InvalidInput(format!("coefficients are not finite at z = {z}")));
            }
            if p <= 0.0 || rho <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "p and rho must be positive; p({z}) = {p}, rho({z}) = {rho}"
                )));
            }
        }
        Ok(())
    }

    pub fn interval_as<T: Scalar>(&self) -> Interval<T> {
        Interval {
            a: T::lit(self.interval.a),
            b: T::lit(self.interval.b),
        }
    }

    pub fn default_grid<T: Scalar>(&self) -> Arc<Grid<T>> {
        Arc::new(Grid::with_defaults(self.interval_as()))
    }
}

/// `A f = (1/ρ)(p' f' + p f'' − q f)` evaluated pointwise from the derivative
/// samples carried by `f`.
pub fn apply_operator<T: Scalar>(prob: &SLProblem, f: &GridFunction<T>) -> Result<GridFunction<T>> {
    let d1 = f.d1().ok_or(Error::MissingDerivative("first derivative"))?;
    let d2 = f.d2().ok_or(Error::MissingDerivative("second derivative"))?;
    let values = f
        .nodes()
        .iter()
        .zip(f.values().iter().zip(d1.iter().zip(d2)))
        .map(|(&z, (&v, (&v1, &v2)))| {
            let p = prob.p.eval(z);
            let dp = prob.dp.eval(z);
            let q = prob.q.eval(z);
            let rho = prob.rho.eval(z);
            (dp * v1 + p * v2 - q * v) / rho
        })
        .collect();
    GridFunction::new(f.grid().clone(), values)
}

/// Residuals `(α_a f'(a) + β_a f(a), α_b f'(b) + β_b f(b))`.
pub fn bc_residual<T: Scalar>(prob: &SLProblem, f: &GridFunction<T>) -> (T, T) {
    let t = f.boundary();
    (
        prob.bc_a.residual(t.value_a, t.deriv_a),
        prob.bc_b.residual(t.value_b, t.deriv_b),
    )
}
