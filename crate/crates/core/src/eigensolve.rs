//! Eigenpairs of `A = −𝒜` by Prüfer phase shooting.
//!
//! Writing `u = R sin θ / √S`, `p u' = R √S cos θ` for a constant scale `S > 0`
//! turns `−(p u')' + q u = Λ ρ u` into
//!
//! ```text
//! θ'      = (S/p) cos²θ + ((Λρ − q)/S) sin²θ
//! (ln R)' = (S/p − (Λρ − q)/S) sin θ cos θ
//! ```
//!
//! The phase equation does not involve `R`, and `θ(b; Λ)` is continuous and
//! strictly increasing in `Λ`. With `θ(a) ∈ [0, π)` fixed by the left boundary
//! condition and `θ_b ∈ (0, π]` the phase demanded by the right one, the k-th
//! eigenvalue (k = 1, 2, …) is the unique solution of `θ(b; Λ) = θ_b + (k−1)π`.
//! The eigenvalues of `A` are `λ_k = −Λ_k`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inner_product_rho, BoundaryTrace, GridFunction};
use crate::ode::{Stepper, Tolerances};
use crate::problem::SLProblem;
use crate::quad::{Grid, DEFAULT_PANELS, DEFAULT_POINTS};
use crate::roots::brent;
use crate::scalar::Scalar;

/// Default truncation order.
pub const DEFAULT_MODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub panels: usize,
    pub points: usize,
    /// Relative tolerance of the phase integration.
    pub rtol: f64,
    /// Relative bracket tolerance on each eigenvalue.
    pub root_tol: f64,
    pub parallel: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            panels: DEFAULT_PANELS,
            points: DEFAULT_POINTS,
            rtol: 1e-10,
            root_tol: 1e-14,
            parallel: true,
        }
    }
}

/// Fingerprint tying coefficient vectors to the spectrum that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisId(pub u64);

impl BasisId {
    fn of<T: Scalar>(eigenvalues: &[T]) -> Self {
        // FNV-1a over the f64 bit patterns
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for v in eigenvalues {
            for byte in v.as_f64().to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        BasisId(h)
    }
}

/// Where an eigenvalue list came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumOrigin {
    /// Computed from a Sturm–Liouville problem: simple, decreasing, `λ_n → −∞`.
    SturmLiouville,
    /// Arbitrary user-supplied real sequence.
    Abstract,
}

/// Eigenvalues `λ_1, λ_2, …` of a diagonal (Riesz-spectral) generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Spectrum<T: Scalar> {
    eigenvalues: Vec<T>,
    gamma: T,
    id: BasisId,
    origin: SpectrumOrigin,
}

impl<T: Scalar> Spectrum<T> {
    /// Any finite real sequence; `gamma` is its maximum.
    pub fn from_eigenvalues(eigenvalues: Vec<T>) -> Result<Self> {
        Self::build(eigenvalues, SpectrumOrigin::Abstract)
    }

    fn build(eigenvalues: Vec<T>, origin: SpectrumOrigin) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "spectrum must be a nonempty list of finite values".into(),
            ));
        }
        let gamma = eigenvalues.iter().copied().fold(T::neg_infinity(), T::max);
        Ok(Spectrum {
            id: BasisId::of(&eigenvalues),
            eigenvalues,
            gamma,
            origin,
        })
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Upper bound on the eigenvalues (attained: the largest computed one).
    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn id(&self) -> BasisId {
        self.id
    }

    pub fn origin(&self) -> SpectrumOrigin {
        self.origin
    }

    /// Spectrum of `A + shift·I`.
    pub fn shifted(&self, shift: T) -> Self {
        let eig: Vec<T> = self.eigenvalues.iter().map(|&l| l + shift).collect();
        Spectrum {
            id: BasisId::of(&eig),
            gamma: self.gamma + shift,
            eigenvalues: eig,
            origin: self.origin,
        }
    }

    /// First `n` eigenvalues.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::InvalidInput(format!(
                "cannot truncate {} modes to {n}",
                self.len()
            )));
        }
        Self::build(self.eigenvalues[..n].to_vec(), self.origin)
    }
}

/// Expansion coefficients `c_n = ⟨f, φ_n⟩_ρ` in a given eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModalCoefficients<T: Scalar> {
    pub coefficients: Vec<T>,
    pub basis: BasisId,
}

impl<T: Scalar> ModalCoefficients<T> {
    pub fn new(spectrum: &Spectrum<T>, coefficients: Vec<T>) -> Result<Self> {
        if coefficients.len() != spectrum.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                spectrum.len(),
                coefficients.len()
            )));
        }
        Ok(ModalCoefficients {
            coefficients,
            basis: spectrum.id(),
        })
    }

    pub fn zeros(spectrum: &Spectrum<T>) -> Self {
        ModalCoefficients {
            coefficients: vec![T::zero(); spectrum.len()],
            basis: spectrum.id(),
        }
    }

    /// Unit vector `e_n` (1-based).
    pub fn unit(spectrum: &Spectrum<T>, n: usize) -> Self {
        let mut c = Self::zeros(spectrum);
        c.coefficients[n - 1] = T::one();
        c
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn check(&self, spectrum: &Spectrum<T>) -> Result<()> {
        if self.basis == spectrum.id() && self.len() == spectrum.len() {
            Ok(())
        } else {
            Err(Error::DecompositionMismatch)
        }
    }

    pub fn check_pair(&self, other: &Self) -> Result<()> {
        if self.basis == other.basis && self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::DecompositionMismatch)
        }
    }

    /// `‖f‖_ρ` of the truncated expansion (Parseval).
    pub fn norm(&self) -> T {
        self.coefficients.iter().map(|&c| c * c).sum::<T>().sqrt()
    }

    pub fn map(&self, f: impl Fn(usize, T) -> T) -> Self {
        ModalCoefficients {
            coefficients: self.coefficients.iter().enumerate().map(|(i, &c)| f(i, c)).collect(),
            basis: self.basis,
        }
    }
}

/// Eigenvalues and ρ-orthonormal eigenfunctions of a Sturm–Liouville problem.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition<T: Scalar> {
    problem: SLProblem,
    spectrum: Spectrum<T>,
    grid: Arc<Grid<T>>,
    eigenfunctions: Vec<GridFunction<T>>,
    options: SolverOptions,
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn problem(&self) -> &SLProblem {
        &self.problem
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[T] {
        self.spectrum.eigenvalues()
    }

    pub fn gamma(&self) -> T {
        self.spectrum.gamma()
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn eigenfunctions(&self) -> &[GridFunction<T>] {
        &self.eigenfunctions
    }

    /// `φ_n`, 1-based.
    pub fn eigenfunction(&self, n: usize) -> &GridFunction<T> {
        &self.eigenfunctions[n - 1]
    }

    pub fn modes(&self) -> usize {
        self.eigenfunctions.len()
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    /// Gram matrix `⟨φ_n, φ_m⟩_ρ` by quadrature.
    #[allow(clippy::needless_range_loop)]
    pub fn gram(&self) -> Vec<Vec<T>> {
        let n = self.modes();
        let mut g = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = inner_product_rho(&self.eigenfunctions[i], &self.eigenfunctions[j], &self.problem.rho)
                    .expect("eigenfunctions share a grid");
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        g
    }

    /// Keep the first `n` modes.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        Ok(SpectralDecomposition {
            problem: self.problem.clone(),
            spectrum: self.spectrum.truncated(n)?,
            grid: self.grid.clone(),
            eigenfunctions: self.eigenfunctions[..n].to_vec(),
            options: self.options,
        })
    }
}

/// Phase-shooting machinery for one problem.
struct Prufer<'a, T: Scalar> {
    prob: &'a SLProblem,
    a: T,
    b: T,
    p_mean: T,
    rho_mean: T,
    q_mean: T,
    rtol: T,
}

impl<'a, T: Scalar> Prufer<'a, T> {
    fn new(prob: &'a SLProblem, grid: &Grid<T>, rtol: T) -> Self {
        let len = grid.interval.length();
        let mean = |e: &crate::expr::CoeffExpr| {
            grid.nodes
                .iter()
                .zip(&grid.weights)
                .map(|(&z, &w)| e.eval(z) * w)
                .sum::<T>()
                / len
        };
        Prufer {
            prob,
            a: grid.interval.a,
            b: grid.interval.b,
            p_mean: mean(&prob.p),
            rho_mean: mean(&prob.rho),
            q_mean: mean(&prob.q),
            rtol,
        }
    }

    fn fine_rtol(&self) -> T {
        (self.rtol * T::lit(REFINE_FACTOR)).max(T::epsilon() * T::lit(16.0))
    }

    /// Scale making `θ'` nearly constant for slowly varying coefficients.
    fn scale(&self, lam: T) -> T {
        (self.p_mean * (lam * self.rho_mean - self.q_mean)).max(T::one()).sqrt()
    }

    fn theta_a(&self, s: T) -> T {
        let bc = self.prob.bc_a;
        let pa = self.prob.p.eval(self.a);
        let th = (T::lit(bc.alpha) * s).atan2(-T::lit(bc.beta) * pa);
        normalize_half_open(th)
    }

    fn theta_b(&self, s: T) -> T {
        let bc = self.prob.bc_b;
        let pb = self.prob.p.eval(self.b);
        let th = (T::lit(bc.alpha) * s).atan2(-T::lit(bc.beta) * pb);
        let t = normalize_half_open(th);
        if t == T::zero() {
            T::PI()
        } else {
            t
        }
    }

    fn phase_rhs(&self, lam: T, s: T) -> impl Fn(T, &[T; 1]) -> [T; 1] + '_ {
        move |z: T, y: &[T; 1]| {
            let (sn, cs) = y[0].sin_cos();
            let w = lam * self.prob.rho.eval(z) - self.prob.q.eval(z);
            [s / self.prob.p.eval(z) * cs * cs + w / s * sn * sn]
        }
    }

    /// `θ(b; Λ) − θ_b`.
    fn phase_excess(&self, lam: T) -> Result<T> {
        self.phase_excess_with(lam, self.rtol)
    }

    fn phase_excess_with(&self, lam: T, rtol: T) -> Result<T> {
        let s = self.scale(lam);
        let mut y = [self.theta_a(s)];
        let tol = Tolerances { rtol, atol: [rtol] };
        let mut st = Stepper::new((self.b - self.a) * T::lit(0.01));
        st.integrate(&self.phase_rhs(lam, s), self.a, self.b, &mut y, &tol)?;
        Ok(y[0] - self.theta_b(s))
    }

    /// Number of eigenvalues `Λ_j < lam`, from the phase excess.
    fn count_below(excess: T) -> usize {
        if excess <= T::zero() {
            0
        } else {
            (excess / T::PI())
                .floor()
                .to_usize()
                .unwrap_or(usize::MAX)
                .saturating_add(1)
        }
    }

    /// Integrate amplitude and phase across `grid`, returning the normalised
    /// eigenfunction for eigenvalue `lam` of the shooting problem.
    fn eigenfunction(&self, lam: T, grid: &Arc<Grid<T>>) -> Result<GridFunction<T>> {
        let prob = self.prob;
        let s = self.scale(lam);
        let rhs = move |z: T, y: &[T; 3]| {
            let (sn, cs) = y[0].sin_cos();
            let p = prob.p.eval(z);
            let rho = prob.rho.eval(z);
            let w = lam * rho - prob.q.eval(z);
            let r2 = (y[1] + y[1]).exp();
            [
                s / p * cs * cs + w / s * sn * sn,
                (s / p - w / s) * sn * cs,
                rho * r2 * sn * sn / s,
            ]
        };
        let rtol = self.fine_rtol();
        let atol_norm = rtol * (self.b - self.a) * self.rho_mean / s;
        let tol = Tolerances {
            rtol,
            atol: [rtol, rtol, atol_norm],
        };
        let mut st = Stepper::new((self.b - self.a) * T::lit(0.01));
        let mut y = [self.theta_a(s), T::zero(), T::zero()];
        let start = y;
        let mut z = self.a;
        let mut states = Vec::with_capacity(grid.len());
        for &node in &grid.nodes {
            st.integrate(&rhs, z, node, &mut y, &tol)?;
            states.push(y);
            z = node;
        }
        st.integrate(&rhs, z, self.b, &mut y, &tol)?;
        let end = y;

        let norm = end[2].sqrt();
        let sqrt_s = s.sqrt();
        // (u, u') from (θ, ln R)
        let unpack = |st: &[T; 3], z: T| {
            let r = st[1].exp() / norm;
            let u = r * st[0].sin() / sqrt_s;
            let du = r * sqrt_s * st[0].cos() / prob.p.eval(z);
            (u, du)
        };
        let mut values = Vec::with_capacity(grid.len());
        let mut d1 = Vec::with_capacity(grid.len());
        let mut d2 = Vec::with_capacity(grid.len());
        for (st, &z) in states.iter().zip(&grid.nodes) {
            let (u, du) = unpack(st, z);
            let p = prob.p.eval(z);
            let ddu = ((prob.q.eval(z) - lam * prob.rho.eval(z)) * u - prob.dp.eval(z) * du) / p;
            values.push(u);
            d1.push(du);
            d2.push(ddu);
        }
        let (ua, dua) = unpack(&start, self.a);
        let (ub, dub) = unpack(&end, self.b);
        let f = GridFunction::new(grid.clone(), values)?
            .with_derivatives(d1, Some(d2))?
            .with_trace(BoundaryTrace {
                value_a: ua,
                deriv_a: dua,
                value_b: ub,
                deriv_b: dub,
            });
        Ok(f)
    }
}

/// Tolerance ratio between phase counting and root refinement / reconstruction.
const REFINE_FACTOR: f64 = 1e-2;

fn normalize_half_open<T: Scalar>(th: T) -> T {
    let pi = T::PI();
    let mut t = th % pi;
    if t < T::zero() {
        t = t + pi;
    }
    if t >= pi {
        t = t - pi;
    }
    t
}

struct Window<T> {
    lo: T,
    hi: T,
}

fn scan_window<T: Scalar>(prufer: &Prufer<'_, T>, grid: &Grid<T>, modes: usize) -> Result<Window<T>> {
    let prob = prufer.prob;
    let mut q_over_rho_min = T::infinity();
    let mut q_over_rho_abs = T::zero();
    let mut p_over_rho_max = T::zero();
    let samples = grid.nodes.iter().copied().chain([grid.interval.a, grid.interval.b]);
    for z in samples {
        let rho = prob.rho.eval(z);
        let qr = prob.q.eval(z) / rho;
        q_over_rho_min = q_over_rho_min.min(qr);
        q_over_rho_abs = q_over_rho_abs.max(qr.abs());
        p_over_rho_max = p_over_rho_max.max(prob.p.eval(z) / rho);
    }
    let len = grid.interval.length();
    let n2 = T::from_usize_lossy(modes + 2);
    let mut lo = q_over_rho_min - T::one();
    let mut hi = n2 * n2 * T::PI() * T::PI() * p_over_rho_max / (len * len) + q_over_rho_abs + T::one();

    // Robin terms can push eigenvalues below min q/ρ; widen until nothing is left below.
    let mut step = T::one() + lo.abs();
    let mut tries = 0;
    while prufer.phase_excess(lo)? > T::zero() {
        lo = lo - step;
        step = step + step;
        tries += 1;
        if tries > 200 {
            return Err(Error::Bracket {
                index: 1,
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
    }
    tries = 0;
    while Prufer::<T>::count_below(prufer.phase_excess(hi)?) < modes {
        hi = hi + (hi - lo);
        tries += 1;
        if tries > 200 {
            return Err(Error::Bracket {
                index: modes,
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
    }
    Ok(Window { lo, hi })
}

/// Isolate and refine the k-th shooting eigenvalue (1-based).
fn refine_eigenvalue<T: Scalar>(prufer: &Prufer<'_, T>, window: &Window<T>, k: usize, root_tol: T) -> Result<T> {
    let (mut lo, mut hi) = (window.lo, window.hi);
    let mut count_lo = 0usize;
    let mut count_hi = Prufer::<T>::count_below(prufer.phase_excess(hi)?);
    let mut iter = 0;
    // phase-count bisection until only Λ_k lies in (lo, hi)
    while !(count_lo == k - 1 && count_hi == k) {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi || iter > 400 {
            return Err(Error::Bracket {
                index: k,
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        let c = Prufer::<T>::count_below(prufer.phase_excess(mid)?);
        if c >= k {
            hi = mid;
            count_hi = c;
        } else {
            lo = mid;
            count_lo = c;
        }
        iter += 1;
    }
    // the isolating bracket only needs phase counts; the root itself is
    // refined with a tighter integration so boundary residuals stay small
    let fine = prufer.fine_rtol();
    let target = T::from_usize_lossy(k - 1) * T::PI();
    let mut failure = None;
    let f = |lam: T| match prufer.phase_excess_with(lam, fine) {
        Ok(e) => e - target,
        Err(e) => {
            failure.get_or_insert(e);
            T::nan()
        }
    };
    let tol = root_tol * T::one().max(lo.abs().max(hi.abs()));
    let res = brent(f, lo, hi, tol);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(res?.root)
}

/// First `modes` eigenpairs of `A = −𝒜`, eigenvalues strictly decreasing.
pub fn solve_spectrum<T: Scalar>(
    prob: &SLProblem,
    modes: usize,
    options: &SolverOptions,
) -> Result<SpectralDecomposition<T>> {
    if modes == 0 {
        return Err(Error::InvalidInput("need at least one mode".into()));
    }
    let grid = Arc::new(Grid::new(prob.interval_as::<T>(), options.panels, options.points)?);
    let rtol = T::floor_tol(options.rtol);
    let root_tol = T::lit(options.root_tol).max(T::epsilon() * T::lit(4.0));
    let prufer = Prufer::new(prob, &grid, rtol);
    let window = scan_window(&prufer, &grid, modes)?;

    let solve_one = |k: usize| -> Result<(T, GridFunction<T>)> {
        let lam = refine_eigenvalue(&prufer, &window, k, root_tol)?;
        let f = prufer.eigenfunction(lam, &grid)?;
        Ok((lam, f))
    };
    let pairs: Vec<Result<(T, GridFunction<T>)>> = if options.parallel {
        (1..=modes).into_par_iter().map(solve_one).collect()
    } else {
        (1..=modes).map(solve_one).collect()
    };
    let mut eigenvalues = Vec::with_capacity(modes);
    let mut eigenfunctions = Vec::with_capacity(modes);
    for r in pairs {
        let (lam, f) = r?;
        eigenvalues.push(-lam);
        eigenfunctions.push(f);
    }
    if eigenvalues.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput(
            "computed eigenvalues are not strictly decreasing; tighten the solver tolerances".into(),
        ));
    }
    Ok(SpectralDecomposition {
        problem: prob.clone(),
        spectrum: Spectrum::build(eigenvalues, SpectrumOrigin::SturmLiouville)?,
        grid,
        eigenfunctions,
        options: *options,
    })
}

/// `c_n = ⟨f, φ_n⟩_ρ`.
pub fn coefficients_of<T: Scalar>(f: &GridFunction<T>, dec: &SpectralDecomposition<T>) -> Result<ModalCoefficients<T>> {
    let coefficients = dec
        .eigenfunctions
        .iter()
        .map(|phi| inner_product_rho(f, phi, &dec.problem.rho))
        .collect::<Result<Vec<T>>>()?;
    ModalCoefficients::new(&dec.spectrum, coefficients)
}

/// `Σ c_n φ_n`, carrying derivative and boundary data from the eigenfunctions.
pub fn synthesize<T: Scalar>(c: &ModalCoefficients<T>, dec: &SpectralDecomposition<T>) -> Result<GridFunction<T>> {
    c.check(&dec.spectrum)?;
    let zero = dec.eigenfunctions[0].scaled(T::zero());
    c.coefficients
        .iter()
        .zip(&dec.eigenfunctions)
        .try_fold(zero, |acc, (&cn, phi)| acc.axpy(cn, phi))
}

/// Finite surrogate for an infinite-sum domain criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    /// Truncated sum of the summands.
    pub sum: f64,
    /// Least-squares slope of `log(summand)` against `log n` over the last half
    /// of the modes; `None` when the tail is numerically zero.
    pub summand_exponent: Option<f64>,
    /// `true` when the tail vanishes or decays faster than [`TAIL_THRESHOLD`].
    pub in_domain: bool,
}

/// Summand decay exponent below which a series is declared convergent.
pub const TAIL_THRESHOLD: f64 = -0.5;

/// Summands below this fraction of the largest one count as zero.
const TAIL_NOISE_FLOOR: f64 = 1e-24;

/// Shared tail heuristic over nonnegative summands `t_1..t_N`.
pub fn tail_report<T: Scalar>(summands: &[T]) -> TailReport {
    let vals: Vec<f64> = summands.iter().map(|v| v.as_f64()).collect();
    let sum = vals.iter().sum();
    let max = vals.iter().copied().fold(0.0, f64::max);
    let n = vals.len();
    let start = n / 2;
    let pts: Vec<(f64, f64)> = vals
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, &v)| v > max * TAIL_NOISE_FLOOR && v > 0.0)
        .map(|(i, &v)| (((i + 1) as f64).ln(), v.ln()))
        .collect();
    let summand_exponent = if pts.len() < 2 || max == 0.0 {
        None
    } else {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        if sxx > 0.0 {
            Some(sxy / sxx)
        } else {
            None
        }
    };
    TailReport {
        sum,
        summand_exponent,
        in_domain: summand_exponent.is_none_or(|e| e < TAIL_THRESHOLD),
    }
}

/// Truncated `D(A)` criterion `Σ λ_n² c_n²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    pub tail: TailReport,
    /// Fitted algebraic exponent of `|λ_n c_n|` (half the summand exponent).
    pub amplitude_exponent: Option<f64>,
}

pub fn domain_membership<T: Scalar>(c: &ModalCoefficients<T>, spectrum: &Spectrum<T>) -> Result<DomainReport> {
    c.check(spectrum)?;
    let summands: Vec<T> = c
        .coefficients
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(&cn, &l)| (l * cn) * (l * cn))
        .collect();
    let tail = tail_report(&summands);
    Ok(DomainReport {
        tail,
        amplitude_exponent: tail.summand_exponent.map(|e| e / 2.0),
    })
}
