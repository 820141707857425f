//! Fractional-power spaces `X_α = D((μI − A)^α)`.
//!
//! Everything here acts on modal coefficients `c_n = ⟨f, φ_n⟩_ρ`, so it applies
//! to any real, upper-bounded spectrum and not only Sturm–Liouville ones:
//!
//! * `(μI − A)^α f = Σ (μ − λ_n)^α c_n φ_n`
//! * `⟨f, g⟩_α = Σ (μ − λ_n)^{2α} f_n g_n`
//! * `φ_{n,α} = (μ − λ_n)^{−α} φ_n` is orthonormal in `X_α`
//! * `⟨f, φ_{n,α}⟩_α = (μ − λ_n)^α ⟨f, φ_n⟩_ρ`

use serde::{Deserialize, Serialize};

use crate::eigensolve::{tail_report, ModalCoefficients, SpectralDecomposition, Spectrum, TailReport};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::scalar::Scalar;

/// Largest admissible exponent.
pub const ALPHA_MAX: f64 = 4.0;
/// Default gap between `μ` and the top of the spectrum.
pub const DEFAULT_EPSILON: f64 = 1.0;

/// `μ = γ + ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Shift<T: Scalar> {
    pub mu: T,
    pub epsilon: T,
}

pub fn shift_mu<T: Scalar>(spectrum: &Spectrum<T>, epsilon: T) -> Result<Shift<T>> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(Shift {
        mu: spectrum.gamma() + epsilon,
        epsilon,
    })
}

/// Sign of the power in [`FractionalSpace::fractional_apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerSign {
    Positive,
    Negative,
}

/// The space `X_α` over a given spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FractionalSpace<T: Scalar> {
    alpha: T,
    mu: T,
    epsilon: T,
    spectrum: Spectrum<T>,
}

/// Serializable parameters of a space, without the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalParams {
    pub alpha: f64,
    pub mu: f64,
    pub epsilon: f64,
}

impl<T: Scalar> FractionalSpace<T> {
    pub fn new(spectrum: &Spectrum<T>, alpha: T, shift: Shift<T>) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= T::lit(ALPHA_MAX)) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, {ALPHA_MAX}], got {alpha}"
            )));
        }
        if !(shift.mu > spectrum.gamma()) {
            return Err(Error::InvalidInput(format!(
                "mu = {} must exceed the largest eigenvalue {}",
                shift.mu,
                spectrum.gamma()
            )));
        }
        let space = FractionalSpace {
            alpha,
            mu: shift.mu,
            epsilon: shift.epsilon,
            spectrum: spectrum.clone(),
        };
        if (0..spectrum.len()).any(|i| {
            let w = space.weight(i);
            !(w.is_finite() && w > T::zero())
        }) {
            return Err(Error::InvalidInput("(mu - lambda_n)^alpha overflows".into()));
        }
        Ok(space)
    }

    /// `μ = γ + ε`.
    pub fn with_epsilon(spectrum: &Spectrum<T>, alpha: T, epsilon: T) -> Result<Self> {
        Self::new(spectrum, alpha, shift_mu(spectrum, epsilon)?)
    }

    /// Explicit `μ > γ`; `ε` is recorded as `μ − γ`.
    pub fn with_mu(spectrum: &Spectrum<T>, alpha: T, mu: T) -> Result<Self> {
        Self::new(
            spectrum,
            alpha,
            Shift {
                mu,
                epsilon: mu - spectrum.gamma(),
            },
        )
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn params(&self) -> FractionalParams {
        FractionalParams {
            alpha: self.alpha.as_f64(),
            mu: self.mu.as_f64(),
            epsilon: self.epsilon.as_f64(),
        }
    }

    /// Same spectrum and shift, different exponent.
    pub fn with_alpha(&self, alpha: T) -> Result<Self> {
        Self::new(
            &self.spectrum,
            alpha,
            Shift {
                mu: self.mu,
                epsilon: self.epsilon,
            },
        )
    }

    /// `μ − λ_n` for the 0-based index `i`.
    #[inline]
    pub fn gap(&self, i: usize) -> T {
        self.mu - self.spectrum.eigenvalues()[i]
    }

    /// `(μ − λ_n)^α` for the 0-based index `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> T {
        self.gap(i).powf(self.alpha)
    }

    /// Rayleigh quotient of `μI − A`; always exceeds `ε` when `μ = γ + ε`.
    pub fn coercivity_gap(&self, c: &ModalCoefficients<T>) -> Result<T> {
        c.check(&self.spectrum)?;
        let (num, den) = c
            .coefficients
            .iter()
            .enumerate()
            .fold((T::zero(), T::zero()), |(n, d), (i, &cn)| {
                (n + self.gap(i) * cn * cn, d + cn * cn)
            });
        if den == T::zero() {
            return Err(Error::InvalidInput("coercivity quotient of the zero function".into()));
        }
        Ok(num / den)
    }

    /// Coefficients of `(μI − A)^{±α} f`.
    pub fn fractional_apply(&self, c: &ModalCoefficients<T>, sign: PowerSign) -> Result<ModalCoefficients<T>> {
        let e = match sign {
            PowerSign::Positive => self.alpha,
            PowerSign::Negative => -self.alpha,
        };
        self.power(c, e)
    }

    /// Coefficients of `(μI − A)^e f` for any real `e`.
    pub fn power(&self, c: &ModalCoefficients<T>, e: T) -> Result<ModalCoefficients<T>> {
        c.check(&self.spectrum)?;
        Ok(c.map(|i, cn| self.gap(i).powf(e) * cn))
    }

    /// Truncated `Σ (μ − λ_n)^{2α} c_n²` with the shared tail verdict.
    pub fn in_domain_alpha(&self, c: &ModalCoefficients<T>) -> Result<TailReport> {
        c.check(&self.spectrum)?;
        let summands: Vec<T> = c
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, &cn)| {
                let w = self.weight(i) * cn;
                w * w
            })
            .collect();
        Ok(tail_report(&summands))
    }

    /// `⟨f, g⟩_α`.
    pub fn inner_product_alpha(&self, f: &ModalCoefficients<T>, g: &ModalCoefficients<T>) -> Result<T> {
        f.check(&self.spectrum)?;
        f.check_pair(g)?;
        Ok(f.coefficients
            .iter()
            .zip(&g.coefficients)
            .enumerate()
            .fold(T::zero(), |acc, (i, (&x, &y))| {
                let w = self.weight(i);
                acc + (w * x) * (w * y)
            }))
    }

    pub fn norm_alpha(&self, f: &ModalCoefficients<T>) -> Result<T> {
        Ok(self.inner_product_alpha(f, f)?.sqrt())
    }

    /// ρ-coefficients of `φ_{n,α}` (1-based `n`).
    pub fn rescaled_coefficients(&self, n: usize) -> ModalCoefficients<T> {
        let mut c = ModalCoefficients::zeros(&self.spectrum);
        c.coefficients[n - 1] = T::one() / self.weight(n - 1);
        c
    }

    /// Coordinates `⟨f, φ_{n,α}⟩_α = (μ − λ_n)^α c_n`.
    pub fn alpha_coordinates(&self, c: &ModalCoefficients<T>) -> Result<Vec<T>> {
        c.check(&self.spectrum)?;
        Ok(c.coefficients
            .iter()
            .enumerate()
            .map(|(i, &cn)| self.weight(i) * cn)
            .collect())
    }

    /// Both sides of `⟨f, φ_{n,α}⟩_α = (μ − λ_n)^α ⟨f, φ_n⟩_ρ`, evaluated
    /// independently (left through the α inner product).
    pub fn scaling_identity_check(&self, f: &ModalCoefficients<T>, n: usize) -> Result<(T, T)> {
        if n == 0 || n > self.spectrum.len() {
            return Err(Error::InvalidInput(format!("mode {n} out of range")));
        }
        let lhs = self.inner_product_alpha(f, &self.rescaled_coefficients(n))?;
        let rhs = self.weight(n - 1) * f.coefficients[n - 1];
        Ok((lhs, rhs))
    }

    /// Coefficients of `A f`; identical action to `A` on `X`.
    pub fn apply_a(&self, c: &ModalCoefficients<T>) -> Result<ModalCoefficients<T>> {
        c.check(&self.spectrum)?;
        let eig = self.spectrum.eigenvalues();
        Ok(c.map(|i, cn| eig[i] * cn))
    }

    /// Truncated `Σ λ_n² ⟨f, φ_{n,α}⟩_α²`, the `D(A)_α` criterion.
    pub fn domain_alpha_sum(&self, c: &ModalCoefficients<T>) -> Result<T> {
        let coords = self.alpha_coordinates(c)?;
        Ok(coords
            .iter()
            .zip(self.spectrum.eigenvalues())
            .map(|(&x, &l)| (l * x) * (l * x))
            .sum())
    }

    /// Gram matrix of the rescaled basis under `⟨·,·⟩_α`.
    pub fn rescaled_gram(&self) -> Vec<Vec<T>> {
        let n = self.spectrum.len();
        let basis: Vec<_> = (1..=n).map(|k| self.rescaled_coefficients(k)).collect();
        let mut g = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = self.inner_product_alpha(&basis[i], &basis[j]).expect("same spectrum");
            }
        }
        g
    }
}

/// `φ_{n,α}` sampled on the decomposition grid.
#[derive(Debug, Clone)]
pub struct RescaledBasis<T: Scalar> {
    pub functions: Vec<GridFunction<T>>,
    pub params: FractionalParams,
}

pub fn rescaled_basis<T: Scalar>(fs: &FractionalSpace<T>, dec: &SpectralDecomposition<T>) -> Result<RescaledBasis<T>> {
    if fs.spectrum().id() != dec.spectrum().id() {
        return Err(Error::DecompositionMismatch);
    }
    let functions = dec
        .eigenfunctions()
        .iter()
        .enumerate()
        .map(|(i, phi)| phi.scaled(T::one() / fs.weight(i)))
        .collect();
    Ok(RescaledBasis {
        functions,
        params: fs.params(),
    })
}
