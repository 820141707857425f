//! Diffusion–convection–reaction model on `[0, 1]`
//!
//! ```text
//! ∂t x = D ∂zz x − ∂z x − k0 x,   D ∂z x(0) = x(0),   ∂z x(1) = 0
//! ```
//!
//! in weighted Sturm–Liouville form, its symmetrizing change of variables
//! `ξ = e^{−z/(2D)} x`, the closed-form spectrum for `D = 1`, the `H¹`
//! realization of `X_{1/2}` and the boundary observability test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::sync::Arc;

use crate::eigensolve::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::fracspace::FractionalSpace;
use crate::grid::{BoundaryTrace, GridFunction};
use crate::problem::{apply_operator, bc_residual, Robin, SLProblem};
use crate::quad::{Grid, Interval};
use crate::roots::bisect;

/// Default threshold below which an observability value counts as zero.
pub const DEFAULT_OBSERVABILITY_TOL: f64 = 1e-9;
/// Maximum closed-form/direct discrepancy tolerated by [`observability_test`].
pub const AGREEMENT_TOL: f64 = 1e-8;
/// Boundary-condition residual accepted by [`quadratic_form_identity`].
pub const BC_TOL: f64 = 1e-8;
pub const DEFAULT_CORPUS_SIZE: usize = 1000;
pub const MAX_CORPUS_DEGREE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DCRModel {
    pub d: f64,
    pub k0: f64,
    pub kappa: f64,
}

impl DCRModel {
    pub fn new(d: f64, k0: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) || !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "D and k0 must be positive and finite, got D = {d}, k0 = {k0}"
            )));
        }
        Ok(DCRModel {
            d,
            k0,
            kappa: k0 + 1.0 / (4.0 * d),
        })
    }

    fn require_unit_diffusion(&self) -> Result<()> {
        if (self.d - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "closed forms are available only for D = 1, got D = {}",
                self.d
            )));
        }
        Ok(())
    }
}

fn num(v: f64) -> String {
    // shortest round-trip form keeps the expression exact
    if v < 0.0 {
        format!("({v:?})")
    } else {
        format!("{v:?}")
    }
}

/// Weighted form: `ρ = e^{−z/D}`, `p = Dρ`, `q = k0 ρ`,
/// `D f′(0) − f(0) = 0`, `f′(1) = 0`.
pub fn dcr_sl_problem(model: &DCRModel) -> Result<SLProblem> {
    let rho = format!("exp(-z/{})", num(model.d));
    SLProblem::new(
        Interval::unit(),
        CoeffExpr::parse(&format!("{}*{rho}", num(model.d)))?,
        None,
        CoeffExpr::parse(&format!("{}*{rho}", num(model.k0)))?,
        CoeffExpr::parse(&rho)?,
        Robin::new(model.d, -1.0)?,
        Robin::NEUMANN,
    )
}

/// Constant-coefficient form after `ξ = e^{−z/(2D)} x`: `p = D`, `ρ = 1`,
/// `q = κ` (the operator `Ã`) or `q = 0` (the operator `A = Ã + κI`), with
/// `D ξ′(0) − ξ(0)/2 = 0` and `D ξ′(1) + ξ(1)/2 = 0`.
pub fn transformed_problem(model: &DCRModel, with_kappa: bool) -> Result<SLProblem> {
    let q = if with_kappa { model.kappa } else { 0.0 };
    SLProblem::new(
        Interval::unit(),
        CoeffExpr::constant(model.d),
        None,
        CoeffExpr::constant(q),
        CoeffExpr::constant(1.0),
        Robin::new(model.d, -0.5)?,
        Robin::new(model.d, 0.5)?,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `x ↦ e^{−z/(2D)} x`
    Forward,
    /// `ξ ↦ e^{z/(2D)} ξ`
    Inverse,
}

/// Pointwise change of variables; derivative samples and boundary traces are
/// transformed along with the values when present.
pub fn transform_state(x: &GridFunction<f64>, model: &DCRModel, direction: Direction) -> GridFunction<f64> {
    let c = match direction {
        Direction::Forward => 1.0 / (2.0 * model.d),
        Direction::Inverse => -1.0 / (2.0 * model.d),
    };
    let e = |z: f64| (-c * z).exp();
    let nodes = x.nodes();
    let values: Vec<f64> = nodes.iter().zip(x.values()).map(|(&z, &v)| e(z) * v).collect();
    let mut out = GridFunction::new(x.grid().clone(), values).expect("same grid");
    if let Some(d1) = x.d1() {
        let nd1 = nodes
            .iter()
            .zip(x.values().iter().zip(d1))
            .map(|(&z, (&v, &dv))| e(z) * (dv - c * v))
            .collect();
        let nd2 = x.d2().map(|d2| {
            nodes
                .iter()
                .zip(x.values().iter().zip(d1.iter().zip(d2)))
                .map(|(&z, (&v, (&dv, &ddv)))| e(z) * (ddv - 2.0 * c * dv + c * c * v))
                .collect()
        });
        out = out.with_derivatives(nd1, nd2).expect("lengths match");
    }
    if let Some(t) = x.trace() {
        let (a, b) = (x.grid().interval.a, x.grid().interval.b);
        out = out.with_trace(BoundaryTrace {
            value_a: e(a) * t.value_a,
            deriv_a: e(a) * (t.deriv_a - c * t.value_a),
            value_b: e(b) * t.value_b,
            deriv_b: e(b) * (t.deriv_b - c * t.value_b),
        });
    }
    out
}

/// `g(s) = sin(s)(4s² − 1) − 4s cos(s)`; its positive roots solve
/// `tan s = 4s/(4s² − 1)` without the poles of `tan`.
pub fn characteristic(s: f64) -> f64 {
    s.sin() * (4.0 * s * s - 1.0) - 4.0 * s * s.cos()
}

/// `k_n = 2√2 s_n / √(4s_n² + 5)`.
pub fn normalization(s: f64) -> f64 {
    2.0 * SQRT_2 * s / (4.0 * s * s + 5.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudySpectrum {
    pub s: Vec<f64>,
    pub lambda: Vec<f64>,
    pub k: Vec<f64>,
    /// `|g(s_n)|`.
    pub residuals: Vec<f64>,
    /// Bracket `[lo, hi]` searched for each root.
    pub brackets: Vec<[f64; 2]>,
}

impl CaseStudySpectrum {
    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `φ_n` with its first two derivatives (1-based `n`).
    pub fn eigenfunction(&self, n: usize, grid: Arc<Grid<f64>>) -> GridFunction<f64> {
        let (s, k) = (self.s[n - 1], self.k[n - 1]);
        GridFunction::from_fns(
            grid,
            |z| k * ((s * z).cos() + (s * z).sin() / (2.0 * s)),
            |z| k * (-s * (s * z).sin() + 0.5 * (s * z).cos()),
            |z| -s * s * k * ((s * z).cos() + (s * z).sin() / (2.0 * s)),
        )
    }

    /// `φ_{n,1/2}(0) = 2√2/√(4s_n² + 5)`.
    pub fn trace_at_0(&self, n: usize) -> f64 {
        let s = self.s[n - 1];
        2.0 * SQRT_2 / (4.0 * s * s + 5.0).sqrt()
    }

    /// `φ_{n,1/2}(1) = 2√2 cos(s_n)/√(4s_n² + 5) · (4s_n² + 1)/(4s_n² − 1)`.
    pub fn trace_at_1(&self, n: usize) -> f64 {
        let s = self.s[n - 1];
        let s2 = 4.0 * s * s;
        2.0 * SQRT_2 * s.cos() / (s2 + 5.0).sqrt() * (s2 + 1.0) / (s2 - 1.0)
    }
}

/// Bracket of the `n`-th root: `(1/2, π/2)` for `n = 1`, then
/// `((n−1)π, (n−1)π + π/2)`, where `g` changes sign at both ends.
fn root_bracket(n: usize) -> (f64, f64) {
    if n == 1 {
        (0.5, FRAC_PI_2)
    } else {
        let m = (n - 1) as f64 * PI;
        (m, m + FRAC_PI_2)
    }
}

fn find_case_root(n: usize) -> Result<(f64, [f64; 2])> {
    let (lo, hi) = root_bracket(n);
    let (glo, ghi) = (characteristic(lo), characteristic(hi));
    if glo.signum() == ghi.signum() {
        return Err(Error::MissedRoot { lo, hi });
    }
    // bisect down to adjacent floats, then keep the smaller residual
    let b = bisect(characteristic, lo, hi, 0.0)?;
    let s = if characteristic(b.lo).abs() <= characteristic(b.hi).abs() {
        b.lo
    } else {
        b.hi
    };
    Ok((s, [lo, hi]))
}

/// The first `n` roots of `g` and the resulting `λ_n = −s_n²` and `k_n`.
pub fn solve_case_study(model: &DCRModel, n: usize) -> Result<CaseStudySpectrum> {
    model.require_unit_diffusion()?;
    if n == 0 {
        return Err(Error::InvalidInput("at least one mode required".into()));
    }
    let roots = (1..=n)
        .into_par_iter()
        .map(find_case_root)
        .collect::<Result<Vec<_>>>()?;
    let s: Vec<f64> = roots.iter().map(|r| r.0).collect();
    if s.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("roots are not strictly increasing".into()));
    }
    Ok(CaseStudySpectrum {
        lambda: s.iter().map(|s| -s * s).collect(),
        k: s.iter().map(|&s| normalization(s)).collect(),
        residuals: s.iter().map(|&s| characteristic(s).abs()).collect(),
        brackets: roots.iter().map(|r| r.1).collect(),
        s,
    })
}

fn require_d1(f: &GridFunction<f64>) -> Result<&[f64]> {
    f.d1().ok_or(Error::MissingDerivative("f'"))
}

/// `½ f(1)g(1) + ½ f(0)g(0) + D ∫ f′g′`.
pub fn energy_form(f: &GridFunction<f64>, g: &GridFunction<f64>, d: f64) -> Result<f64> {
    f.check_grid(g)?;
    let (df, dg) = (require_d1(f)?, require_d1(g)?);
    let (tf, tg) = (f.boundary(), g.boundary());
    let grad: f64 = f
        .grid()
        .weights
        .iter()
        .zip(df.iter().zip(dg))
        .map(|(w, (x, y))| w * x * y)
        .sum();
    Ok(0.5 * tf.value_b * tg.value_b + 0.5 * tf.value_a * tg.value_a + d * grad)
}

/// `⟨f, g⟩_{1/2} = ½ f(1)g(1) + ½ f(0)g(0) + ∫ f′g′`.
pub fn h1_inner_product(f: &GridFunction<f64>, g: &GridFunction<f64>) -> Result<f64> {
    energy_form(f, g, 1.0)
}

/// `‖f‖²_{H¹} = ∫ f² + ∫ f′²`.
pub fn h1_norm_sq(f: &GridFunction<f64>) -> Result<f64> {
    let df = require_d1(f)?;
    Ok(f.grid()
        .weights
        .iter()
        .zip(f.values().iter().zip(df))
        .map(|(w, (v, d))| w * (v * v + d * d))
        .sum())
}

/// `(−⟨A f, f⟩, ‖f‖²_{1/2})` for `A` the transformed operator without `κ`;
/// `f` must carry second derivatives and satisfy the boundary conditions.
pub fn quadratic_form_identity(model: &DCRModel, f: &GridFunction<f64>) -> Result<(f64, f64)> {
    let prob = transformed_problem(model, false)?;
    let (ra, rb) = bc_residual(&prob, f);
    if ra.abs() > BC_TOL || rb.abs() > BC_TOL {
        return Err(Error::BoundaryViolation { left: ra, right: rb });
    }
    let af = apply_operator(&prob, f)?;
    let lhs = -crate::grid::inner_product_l2(&af, f)?;
    Ok((lhs, energy_form(f, f, model.d)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareCheck {
    /// `¼ ‖x‖²`
    pub lhs: f64,
    /// `½ x(0)² + ‖x′‖²`
    pub rhs: f64,
    pub margin: f64,
}

pub fn poincare_check(f: &GridFunction<f64>) -> Result<PoincareCheck> {
    let df = require_d1(f)?;
    let w = &f.grid().weights;
    let l2: f64 = w.iter().zip(f.values()).map(|(w, v)| w * v * v).sum();
    let grad: f64 = w.iter().zip(df).map(|(w, d)| w * d * d).sum();
    let x0 = f.boundary().value_a;
    let lhs = 0.25 * l2;
    let rhs = 0.5 * x0 * x0 + grad;
    Ok(PoincareCheck {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// `c0 + c1 z + Σ_{k≤K} (a_k cos kπz + b_k sin kπz)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub c0: f64,
    pub c1: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl TrigPoly {
    pub fn random(rng: &mut impl Rng, max_degree: usize) -> Self {
        let degree = rng.gen_range(0..=max_degree);
        let mut u = || rng.gen_range(-1.0..=1.0);
        TrigPoly {
            c0: u(),
            c1: u(),
            a: (0..degree).map(|_| u()).collect(),
            b: (0..degree).map(|_| u()).collect(),
        }
    }

    /// Value and first two derivatives at `z`.
    pub fn eval(&self, z: f64) -> [f64; 3] {
        let mut out = [self.c0 + self.c1 * z, self.c1, 0.0];
        for (k, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let w = (k + 1) as f64 * PI;
            let (s, c) = (w * z).sin_cos();
            out[0] += a * c + b * s;
            out[1] += w * (b * c - a * s);
            out[2] -= w * w * (a * c + b * s);
        }
        out
    }

    pub fn to_grid_function(&self, grid: Arc<Grid<f64>>) -> GridFunction<f64> {
        GridFunction::from_fns(grid, |z| self.eval(z)[0], |z| self.eval(z)[1], |z| self.eval(z)[2])
    }
}

/// Seeded corpus of trigonometric polynomials of degree at most
/// [`MAX_CORPUS_DEGREE`].
pub fn trig_corpus(seed: u64, size: usize) -> Vec<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|_| TrigPoly::random(&mut rng, MAX_CORPUS_DEGREE))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Smallest `‖x‖²_{1/2} / ‖x‖²_{H¹}` over the corpus.
    pub min_ratio: f64,
    /// Largest ratio; an observed constant, not a proven one.
    pub max_ratio: f64,
    pub corpus_seed: Option<u64>,
    pub corpus_size: usize,
    /// Members with ratio below `1/8`.
    pub lower_violations: usize,
    /// Smallest Poincaré margin `rhs − lhs`.
    pub min_poincare_margin: f64,
    pub poincare_violations: usize,
    pub ratios: Vec<f64>,
}

/// Lower equivalence constant between `‖·‖²_{1/2}` and `‖·‖²_{H¹}`.
pub const LOWER_CONSTANT: f64 = 0.125;

pub fn norm_equivalence(corpus: &[GridFunction<f64>], seed: Option<u64>) -> Result<EquivalenceReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    let rows = corpus
        .par_iter()
        .map(|f| {
            let h1 = h1_norm_sq(f)?;
            if h1 == 0.0 {
                return Err(Error::InvalidInput("corpus member has zero H1 norm".into()));
            }
            Ok((h1_inner_product(f, f)? / h1, poincare_check(f)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(EquivalenceReport {
        min_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_ratio: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        corpus_seed: seed,
        corpus_size: corpus.len(),
        lower_violations: ratios.iter().filter(|&&r| r < LOWER_CONSTANT - 1e-10).count(),
        min_poincare_margin: rows.iter().map(|r| r.1.margin).fold(f64::INFINITY, f64::min),
        poincare_violations: rows.iter().filter(|r| r.1.lhs > r.1.rhs + 1e-12).count(),
        ratios,
    })
}

/// Corpus from [`trig_corpus`] sampled on `grid`, then [`norm_equivalence`].
pub fn seeded_equivalence(seed: u64, size: usize, grid: Arc<Grid<f64>>) -> Result<EquivalenceReport> {
    let corpus: Vec<_> = trig_corpus(seed, size)
        .iter()
        .map(|p| p.to_grid_function(grid.clone()))
        .collect();
    norm_equivalence(&corpus, Some(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    #[serde(rename = "0")]
    Left,
    #[serde(rename = "1")]
    Right,
}

impl Endpoint {
    pub fn from_z(z0: f64) -> Result<Self> {
        if z0 == 0.0 {
            Ok(Endpoint::Left)
        } else if z0 == 1.0 {
            Ok(Endpoint::Right)
        } else {
            Err(Error::InvalidInput(format!(
                "observation point must be 0 or 1, got {z0}"
            )))
        }
    }

    pub fn z(self) -> f64 {
        match self {
            Endpoint::Left => 0.0,
            Endpoint::Right => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservabilityReport {
    pub z0: f64,
    pub alpha: f64,
    /// `|φ_{n,α}(z0)|`.
    pub values: Vec<f64>,
    pub closed_form: Option<Vec<f64>>,
    pub direct: Option<Vec<f64>>,
    pub max_disagreement: Option<f64>,
    pub minimum: f64,
    /// 1-based mode attaining the minimum.
    pub argmin: usize,
    /// 1-based modes with `|value| ≤ tol`.
    pub vanishing: Vec<usize>,
    pub verdict: bool,
    pub tol: f64,
}

impl ObservabilityReport {
    /// Report over given trace values, e.g. from an abstract spectrum.
    pub fn from_values(z0: f64, alpha: f64, values: &[f64], tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("no trace values".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { at: (i + 1) as f64 });
        }
        let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        let (argmin, minimum) = abs
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |m, (i, &v)| if v < m.1 { (i, v) } else { m });
        Ok(ObservabilityReport {
            z0,
            alpha,
            vanishing: abs
                .iter()
                .enumerate()
                .filter(|(_, &v)| v <= tol)
                .map(|(i, _)| i + 1)
                .collect(),
            values: abs,
            closed_form: None,
            direct: None,
            max_disagreement: None,
            minimum,
            argmin: argmin + 1,
            verdict: minimum > tol,
            tol,
        })
    }
}

/// `φ_{n,1/2}(z0)` for `n ≤ modes`, once from the closed forms and once from
/// the eigenfunctions of `dec` (the transformed problem without `κ`, `μ = 0`).
pub fn observability_test(
    cs: &CaseStudySpectrum,
    dec: &SpectralDecomposition<f64>,
    z0: f64,
    modes: usize,
    tol: f64,
) -> Result<ObservabilityReport> {
    let end = Endpoint::from_z(z0)?;
    if modes == 0 || modes > cs.len() || modes > dec.modes() {
        return Err(Error::InvalidInput(format!(
            "{modes} modes requested, {} closed-form and {} computed available",
            cs.len(),
            dec.modes()
        )));
    }
    for n in 1..=modes {
        let (l, c) = (dec.eigenvalues()[n - 1], cs.lambda[n - 1]);
        if (l - c).abs() > 1e-6 * c.abs().max(1.0) {
            return Err(Error::DecompositionMismatch);
        }
    }
    let fs = FractionalSpace::with_mu(dec.spectrum(), 0.5, 0.0)?;
    let closed: Vec<f64> = (1..=modes)
        .map(|n| match end {
            Endpoint::Left => cs.trace_at_0(n),
            Endpoint::Right => cs.trace_at_1(n),
        })
        .collect();
    let direct: Vec<f64> = (1..=modes)
        .map(|n| {
            let t = dec.eigenfunction(n).boundary();
            let v = match end {
                Endpoint::Left => t.value_a,
                Endpoint::Right => t.value_b,
            };
            v / fs.weight(n - 1)
        })
        .collect();
    let mut worst = 0.0f64;
    for (i, (c, d)) in closed.iter().zip(&direct).enumerate() {
        let diff = (c - d).abs();
        if diff > AGREEMENT_TOL {
            return Err(Error::Disagreement {
                index: i + 1,
                closed: *c,
                direct: *d,
            });
        }
        worst = worst.max(diff);
    }
    let mut report = ObservabilityReport::from_values(z0, 0.5, &closed, tol)?;
    report.closed_form = Some(closed);
    report.direct = Some(direct);
    report.max_disagreement = Some(worst);
    Ok(report)
}
