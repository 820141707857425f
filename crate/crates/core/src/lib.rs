//! Spectra of Sturm–Liouville operators with Robin boundary conditions, the
//! fractional-power spaces built on them, and modal simulation of the
//! semigroups they generate.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below name the double-precision instantiations used by the CLI.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod casestudy;
pub mod eigensolve;
pub mod error;
pub mod expr;
pub mod fracspace;
pub mod grid;
pub mod io;
pub mod ode;
pub mod oracle;
pub mod problem;
pub mod quad;
pub mod roots;
pub mod scalar;
pub mod semigroup;
pub mod verify;

pub use eigensolve::{
    coefficients_of, domain_membership, solve_spectrum, synthesize, ModalCoefficients, SolverOptions,
    SpectralDecomposition, Spectrum,
};
pub use error::{Error, Result};
pub use expr::{parse_coeff, CoeffExpr};
pub use fracspace::{rescaled_basis, shift_mu, FractionalSpace, PowerSign, RescaledBasis, Shift};
pub use grid::{inner_product_rho, integrate, GridFunction};
pub use problem::{apply_operator, bc_residual, Robin, SLProblem};
pub use quad::{Grid, Interval};
pub use roots::find_root;
pub use scalar::Scalar;
pub use semigroup::{evolve, growth_bound, is_compact, is_exponentially_stable, trajectory, SemigroupTrajectory};

pub type IntervalF64 = Interval<f64>;
pub type GridF64 = Grid<f64>;
pub type GridFunctionF64 = GridFunction<f64>;
pub type SpectrumF64 = Spectrum<f64>;
pub type ModalCoefficientsF64 = ModalCoefficients<f64>;
pub type SpectralDecompositionF64 = SpectralDecomposition<f64>;
pub type FractionalSpaceF64 = FractionalSpace<f64>;
pub type SemigroupTrajectoryF64 = SemigroupTrajectory<f64>;
