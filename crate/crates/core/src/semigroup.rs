//! Modal simulation of the semigroup `T(t)` generated by `A − κI`, and the
//! stability and compactness predicates on its spectrum.

use serde::{Deserialize, Serialize};

use crate::eigensolve::{ModalCoefficients, Spectrum, SpectrumOrigin};
use crate::error::{Error, Result};
use crate::fracspace::FractionalSpace;
use crate::scalar::Scalar;

/// `λ_1` within this distance of zero counts as zero.
pub const DEFAULT_STABILITY_TOL: f64 = 1e-8;

/// `e^{x}` flushed to zero below the smallest positive normal number.
#[inline]
fn decay<T: Scalar>(x: T) -> T {
    let e = x.exp();
    if e < T::min_positive_value() {
        T::zero()
    } else {
        e
    }
}

/// `T(t) c0` for the generator `A − κI`: `c_n(t) = e^{(λ_n − κ) t} c_n(0)`.
pub fn evolve<T: Scalar>(
    spectrum: &Spectrum<T>,
    c0: &ModalCoefficients<T>,
    t: T,
    kappa: T,
) -> Result<ModalCoefficients<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidInput(format!("time must be nonnegative, got {t}")));
    }
    c0.check(spectrum)?;
    if t == T::zero() {
        return Ok(c0.clone());
    }
    let eig = spectrum.eigenvalues();
    Ok(c0.map(|i, c| {
        let v = decay((eig[i] - kappa) * t) * c;
        if v.abs() < T::min_positive_value() {
            T::zero()
        } else {
            v
        }
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SemigroupTrajectory<T: Scalar> {
    pub times: Vec<T>,
    pub states: Vec<ModalCoefficients<T>>,
    pub kappa: T,
    pub rho_norms: Vec<T>,
    pub alpha: Option<T>,
    pub alpha_norms: Option<Vec<T>>,
}

/// States at each of `times` (nonnegative, strictly increasing).
pub fn trajectory<T: Scalar>(
    spectrum: &Spectrum<T>,
    c0: &ModalCoefficients<T>,
    times: &[T],
    kappa: T,
    space: Option<&FractionalSpace<T>>,
) -> Result<SemigroupTrajectory<T>> {
    if times.is_empty() {
        return Err(Error::InvalidInput("no output times".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("times must be strictly increasing".into()));
    }
    if let Some(fs) = space {
        if fs.spectrum().id() != spectrum.id() {
            return Err(Error::DecompositionMismatch);
        }
    }
    let states = times
        .iter()
        .map(|&t| evolve(spectrum, c0, t, kappa))
        .collect::<Result<Vec<_>>>()?;
    let rho_norms = states.iter().map(|s| s.norm()).collect();
    let alpha_norms = match space {
        Some(fs) => Some(states.iter().map(|s| fs.norm_alpha(s)).collect::<Result<Vec<_>>>()?),
        None => None,
    };
    Ok(SemigroupTrajectory {
        times: times.to_vec(),
        states,
        kappa,
        rho_norms,
        alpha: space.map(|fs| fs.alpha()),
        alpha_norms,
    })
}

/// How much of a verdict rests on the computed modes alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictBasis {
    /// Sturm–Liouville spectrum: decreasing with `λ_n → −∞`, so the computed
    /// modes decide the question for the full operator.
    SturmLiouville,
    /// Only the supplied finite list was examined.
    Truncation,
}

impl From<SpectrumOrigin> for VerdictBasis {
    fn from(o: SpectrumOrigin) -> Self {
        match o {
            SpectrumOrigin::SturmLiouville => VerdictBasis::SturmLiouville,
            SpectrumOrigin::Abstract => VerdictBasis::Truncation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// Decay rate `−sup λ_n` when stable, else `0`.
    pub margin: f64,
    pub basis: VerdictBasis,
}

/// Exponential stability iff `sup λ_n < 0`.
pub fn is_exponentially_stable<T: Scalar>(spectrum: &Spectrum<T>, tol: f64) -> StabilityReport {
    let top = spectrum.gamma().as_f64();
    let stable = top < -tol;
    StabilityReport {
        stable,
        margin: if stable { -top } else { 0.0 },
        basis: spectrum.origin().into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactnessReport {
    pub compact: bool,
    /// Number of `λ_n ≥ 0` among the computed modes.
    pub nonnegative: usize,
    /// Whether the last half of the list is strictly decreasing.
    pub tail_decreasing: bool,
    pub basis: VerdictBasis,
}

/// Surrogate for `lim e^{λ_n} = 0`: the second half of the list must be
/// strictly decreasing and contain no nonnegative values. Sturm–Liouville
/// spectra satisfy this by construction.
pub fn is_compact<T: Scalar>(spectrum: &Spectrum<T>) -> CompactnessReport {
    let eig = spectrum.eigenvalues();
    let n = eig.len();
    let tail = &eig[n / 2..];
    let tail_decreasing = tail.len() >= 2 && tail.windows(2).all(|w| w[1] < w[0]);
    let nonnegative = eig.iter().filter(|&&l| l >= T::zero()).count();
    let tail_nonneg = tail.iter().any(|&l| l >= T::zero());
    CompactnessReport {
        compact: tail_decreasing && !tail_nonneg,
        nonnegative,
        tail_decreasing,
        basis: spectrum.origin().into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// `‖c(t)‖_ρ / (e^{(λ_1 − κ)t} ‖c0‖_ρ)` per time.
    pub rho_ratios: Vec<f64>,
    pub alpha_ratios: Option<Vec<f64>>,
    pub max_ratio: f64,
    pub holds: bool,
}

/// Slack allowed on the bound `‖T(t)‖ ≤ e^{λ_1 t}`.
pub const GROWTH_SLACK: f64 = 1e-10;

pub fn growth_bound<T: Scalar>(
    spectrum: &Spectrum<T>,
    traj: &SemigroupTrajectory<T>,
    space: Option<&FractionalSpace<T>>,
) -> Result<GrowthReport> {
    let top = spectrum.gamma() - traj.kappa;
    let ratios = |norms: &[T], n0: T| -> Vec<f64> {
        traj.times
            .iter()
            .zip(norms)
            .map(|(&t, &n)| {
                let bound = (top * t).exp() * n0;
                if bound == T::zero() {
                    if n == T::zero() {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (n / bound).as_f64()
                }
            })
            .collect()
    };
    let c0 = traj
        .states
        .first()
        .ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?;
    // the bound is relative to the state at t = 0, reconstructed if needed
    let initial = if traj.times[0] == T::zero() {
        c0.clone()
    } else {
        c0.map(|i, c| c / decay((spectrum.eigenvalues()[i] - traj.kappa) * traj.times[0]))
    };
    let rho_ratios = ratios(&traj.rho_norms, initial.norm());
    let alpha_ratios = match space {
        Some(fs) => {
            let norms = traj
                .states
                .iter()
                .map(|s| fs.norm_alpha(s))
                .collect::<Result<Vec<_>>>()?;
            Some(ratios(&norms, fs.norm_alpha(&initial)?))
        }
        None => None,
    };
    let max_ratio = rho_ratios
        .iter()
        .chain(alpha_ratios.iter().flatten())
        .copied()
        .fold(0.0, f64::max);
    Ok(GrowthReport {
        rho_ratios,
        alpha_ratios,
        max_ratio,
        holds: max_ratio <= 1.0 + GROWTH_SLACK,
    })
}
