//! Finite-difference reference for the Sturm–Liouville operator: a symmetric
//! tridiagonal discretization, its eigenpairs, and Crank–Nicolson stepping.
//!
//! On the uniform mesh `z_i = a + i h` the unknowns are the interior nodes plus
//! every non-Dirichlet endpoint. With `p` sampled at midpoints, node weights
//! `w_i = ρ_i h_i` (`h_i = h/2` at an endpoint) and the Robin relation used to
//! eliminate the ghost value, the discrete operator is `L = W⁻¹ K` with `K`
//! symmetric:
//!
//! ```text
//! K_{i,i+1} = p_{i+1/2} / h
//! K_{ii}    = −(p_{i−1/2} + p_{i+1/2}) / h − q_i h_i   (+ p(a) β_a/α_a at a, − p(b) β_b/α_b at b)
//! ```
//!
//! The stored matrix is `S = W^{1/2} L W^{−1/2} = W^{−1/2} K W^{−1/2}`, which is
//! symmetric and has the same eigenvalues as `L`.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::problem::SLProblem;
use crate::quad::Grid;

pub const MIN_INTERVALS: usize = 16;
pub const DEFAULT_INTERVALS: usize = 4000;
pub const DEFAULT_DT: f64 = 1e-4;
const QL_MAX_SWEEPS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct FDOperator {
    pub a: f64,
    pub b: f64,
    /// Number of mesh intervals `M`.
    pub intervals: usize,
    pub h: f64,
    /// Mesh index of the first unknown (0, or 1 with a Dirichlet end at `a`).
    pub first: usize,
    /// Coordinates of the unknowns.
    pub nodes: Vec<f64>,
    /// `w_i = ρ_i h_i`.
    pub weights: Vec<f64>,
    pub diag: Vec<f64>,
    pub sub: Vec<f64>,
    pub sup: Vec<f64>,
    dirichlet_a: bool,
    dirichlet_b: bool,
}

pub fn assemble(prob: &SLProblem, intervals: usize) -> Result<FDOperator> {
    if intervals < MIN_INTERVALS {
        return Err(Error::InvalidInput(format!(
            "at least {MIN_INTERVALS} mesh intervals required, got {intervals}"
        )));
    }
    // re-validate: the fields are public
    for bc in [prob.bc_a, prob.bc_b] {
        if bc.alpha == 0.0 && bc.beta == 0.0 {
            return Err(Error::InvalidInput(
                "boundary condition (0, 0) is not admissible".into(),
            ));
        }
    }
    let (a, b) = (prob.interval.a, prob.interval.b);
    let m = intervals;
    let h = (b - a) / m as f64;
    let z = |i: usize| if i == m { b } else { a + i as f64 * h };
    let p_mid = |i: usize| prob.p.eval(a + (i as f64 + 0.5) * h);

    let dirichlet_a = prob.bc_a.is_dirichlet();
    let dirichlet_b = prob.bc_b.is_dirichlet();
    let first = usize::from(dirichlet_a);
    let last = if dirichlet_b { m - 1 } else { m };

    let mut nodes = Vec::with_capacity(last - first + 1);
    let mut weights = Vec::with_capacity(last - first + 1);
    let mut kd = Vec::with_capacity(last - first + 1);
    for i in first..=last {
        let zi = z(i);
        let end = i == 0 || i == m;
        let hi = if end { 0.5 * h } else { h };
        let mut d = -prob.q.eval(zi) * hi;
        if i > 0 {
            d -= p_mid(i - 1) / h;
        }
        if i < m {
            d -= p_mid(i) / h;
        }
        if i == 0 {
            d += prob.p.eval(a) * prob.bc_a.beta / prob.bc_a.alpha;
        }
        if i == m {
            d -= prob.p.eval(b) * prob.bc_b.beta / prob.bc_b.alpha;
        }
        nodes.push(zi);
        weights.push(prob.rho.eval(zi) * hi);
        kd.push(d);
    }
    let n = nodes.len();
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let diag: Vec<f64> = (0..n).map(|i| kd[i] / weights[i]).collect();
    let off = |i: usize| p_mid(first + i) / h / (sw[i] * sw[i + 1]);
    let sub: Vec<f64> = (0..n.saturating_sub(1)).map(off).collect();
    let sup: Vec<f64> = (0..n.saturating_sub(1)).map(off).collect();
    Ok(FDOperator {
        a,
        b,
        intervals: m,
        h,
        first,
        nodes,
        weights,
        diag,
        sub,
        sup,
        dirichlet_a,
        dirichlet_b,
    })
}

impl FDOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.sub == self.sup
    }

    /// Gershgorin interval `[lo, hi]` containing every eigenvalue.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.sub[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.sup[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `L x` for a mesh vector `x` (the unsymmetrized action).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let y = self.to_symmetric(x);
        let sy = tridiag_mul(&self.sub, &self.diag, &self.sup, &y);
        self.unsymmetrize(&sy)
    }

    fn to_symmetric(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.weights).map(|(v, w)| v * w.sqrt()).collect()
    }

    fn unsymmetrize(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.weights).map(|(v, w)| v / w.sqrt()).collect()
    }

    /// Discrete `ρ`-norm `(Σ w_i x_i²)^{1/2}`.
    pub fn rho_norm(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.weights).map(|(v, w)| w * v * v).sum::<f64>().sqrt()
    }

    /// Samples of `f` at the unknowns.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.nodes.iter().map(|&z| f(z)).collect()
    }

    /// Mesh coordinates and values including Dirichlet endpoints.
    pub fn full_mesh(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut zs = Vec::with_capacity(self.intervals + 1);
        let mut vs = Vec::with_capacity(self.intervals + 1);
        if self.dirichlet_a {
            zs.push(self.a);
            vs.push(0.0);
        }
        zs.extend_from_slice(&self.nodes);
        vs.extend_from_slice(x);
        if self.dirichlet_b {
            zs.push(self.b);
            vs.push(0.0);
        }
        (zs, vs)
    }

    /// Piecewise-linear interpolant of a mesh vector.
    pub fn interpolate(&self, x: &[f64], z: f64) -> f64 {
        let (_, vs) = self.full_mesh(x);
        let t = ((z - self.a) / self.h).clamp(0.0, self.intervals as f64);
        let i = (t.floor() as usize).min(self.intervals - 1);
        let s = t - i as f64;
        vs[i] * (1.0 - s) + vs[i + 1] * s
    }

    pub fn to_grid_function(&self, x: &[f64], grid: Arc<Grid<f64>>) -> GridFunction<f64> {
        GridFunction::from_fn(grid, |z| self.interpolate(x, z))
    }

    /// CSV in the same `z,value` layout as grid functions.
    pub fn to_csv(&self, x: &[f64]) -> String {
        let (zs, vs) = self.full_mesh(x);
        let mut out = String::from("z,value\n");
        for (z, v) in zs.iter().zip(&vs) {
            let _ = writeln!(out, "{z:.16e},{v:.16e}");
        }
        out
    }
}

/// Eigenpairs of the discrete operator, largest eigenvalue first.
#[derive(Debug, Clone)]
pub struct FdEigenpairs {
    pub eigenvalues: Vec<f64>,
    /// Mesh vectors with `Σ w_i x_i² = 1`, positive at the first unknown that
    /// is not negligibly small.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// All eigenvalues of the symmetric matrix, largest first.
pub fn fd_eigenvalues(op: &FDOperator) -> Result<Vec<f64>> {
    let mut d = op.diag.clone();
    let mut e = op.sub.clone();
    e.push(0.0);
    tql1(&mut d, &mut e)?;
    d.sort_by(|x, y| y.total_cmp(x));
    Ok(d)
}

/// The `k` largest eigenvalues with `ρ`-normalized eigenvectors.
pub fn fd_eigs(op: &FDOperator, k: usize) -> Result<FdEigenpairs> {
    if k > op.dim() {
        return Err(Error::InvalidInput(format!(
            "{k} eigenpairs requested from a {}x{} matrix",
            op.dim(),
            op.dim()
        )));
    }
    let all = fd_eigenvalues(op)?;
    let eigenvalues = all[..k].to_vec();
    let scale = all.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let eigenvectors = eigenvalues
        .iter()
        .enumerate()
        .map(|(idx, &lam)| {
            let y = inverse_iteration(op, lam, scale, idx)?;
            let mut x = op.unsymmetrize(&y);
            let big = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if let Some(v) = x.iter().find(|v| v.abs() > 1e-8 * big) {
                if *v < 0.0 {
                    x.iter_mut().for_each(|v| *v = -*v);
                }
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FdEigenpairs {
        eigenvalues,
        eigenvectors,
    })
}

fn inverse_iteration(op: &FDOperator, lam: f64, scale: f64, index: usize) -> Result<Vec<f64>> {
    let n = op.dim();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let sigma = lam + 1e3 * f64::EPSILON * scale;
    let d: Vec<f64> = op.diag.iter().map(|v| v - sigma).collect();
    let lu = TridiagLu::factor(&op.sub, &d, &op.sup)?;
    let mut y: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 97) as f64 * 1e-3).collect();
    for _ in 0..6 {
        y = lu.solve(&y);
        let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !nrm.is_finite() || nrm == 0.0 {
            return Err(Error::NoConvergence { index: index + 1 });
        }
        y.iter_mut().for_each(|v| *v /= nrm);
    }
    Ok(y)
}

/// Implicit-shift QL on a symmetric tridiagonal matrix (eigenvalues only).
/// `d` holds the diagonal, `e[..n-1]` the off-diagonal; on return `d` holds
/// the eigenvalues in no particular order.
fn tql1(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_SWEEPS {
                return Err(Error::NoConvergence { index: l + 1 });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn tridiag_mul(sub: &[f64], diag: &[f64], sup: &[f64], y: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut v = diag[i] * y[i];
            if i > 0 {
                v += sub[i - 1] * y[i - 1];
            }
            if i + 1 < n {
                v += sup[i] * y[i + 1];
            }
            v
        })
        .collect()
}

/// LU of a tridiagonal matrix with partial pivoting (one extra super-diagonal
/// of fill), used for the indefinite shifted systems of inverse iteration.
struct TridiagLu {
    l: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swap: Vec<bool>,
}

impl TridiagLu {
    fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut u0 = diag.to_vec();
        let mut u1: Vec<f64> = sup.to_vec();
        u1.push(0.0);
        let mut u2 = vec![0.0; n];
        let mut l = vec![0.0; n];
        let mut swap = vec![false; n];
        let mut low: Vec<f64> = sub.to_vec();
        low.push(0.0);
        let tiny = f64::MIN_POSITIVE.sqrt();
        for i in 0..n.saturating_sub(1) {
            if low[i].abs() > u0[i].abs() {
                swap[i] = true;
                // rows i and i+1 exchange
                let (a0, a1, a2) = (u0[i], u1[i], u2[i]);
                u0[i] = low[i];
                u1[i] = u0[i + 1];
                u2[i] = u1[i + 1];
                let m = a0 / u0[i];
                l[i] = m;
                u0[i + 1] = a1 - m * u1[i];
                u1[i + 1] = a2 - m * u2[i];
            } else {
                if u0[i] == 0.0 {
                    u0[i] = tiny;
                }
                let m = low[i] / u0[i];
                l[i] = m;
                u0[i + 1] -= m * u1[i];
                // u1[i+1] unchanged, u2[i] stays 0
            }
            low[i] = 0.0;
        }
        if u0[n - 1] == 0.0 {
            u0[n - 1] = tiny;
        }
        if u0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular { row: 0 });
        }
        Ok(TridiagLu { l, u0, u1, u2, swap })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = rhs.len();
        let mut x = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.l[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut v = x[i];
            if i + 1 < n {
                v -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= self.u2[i] * x[i + 2];
            }
            x[i] = v / self.u0[i];
        }
        x
    }
}

/// Thomas algorithm for `(sub, diag, sup) x = rhs`.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return Err(Error::Singular { row: 0 });
    }
    d[0] = rhs[0] / beta;
    for i in 1..n {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i - 1] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::Singular { row: i });
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Result of a Crank–Nicolson run, with the `ρ`-norm after every step.
#[derive(Debug, Clone)]
pub struct CnRun {
    pub state: Vec<f64>,
    pub steps: usize,
    pub norms: Vec<f64>,
}

/// `(I − dt/2 L) x_{k+1} = (I + dt/2 L) x_k`, `⌊t/dt⌋` full steps and one
/// final fractional step for the remainder.
pub fn crank_nicolson(op: &FDOperator, x0: &[f64], t: f64, dt: f64) -> Result<Vec<f64>> {
    Ok(crank_nicolson_run(op, x0, t, dt)?.state)
}

pub fn crank_nicolson_run(op: &FDOperator, x0: &[f64], t: f64, dt: f64) -> Result<CnRun> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("t must be nonnegative, got {t}")));
    }
    if x0.len() != op.dim() {
        return Err(Error::InvalidInput(format!(
            "initial state has {} entries, operator has {}",
            x0.len(),
            op.dim()
        )));
    }
    if t == 0.0 {
        return Ok(CnRun {
            state: x0.to_vec(),
            steps: 0,
            norms: vec![op.rho_norm(x0)],
        });
    }
    // a ratio within rounding of an integer counts as that integer
    let full = (t / dt + 1e-9).floor() as usize;
    let rem = t - full as f64 * dt;
    let mut y = op.to_symmetric(x0);
    let mut norms = vec![l2(&y)];
    let step = |y: &mut Vec<f64>, tau: f64| -> Result<()> {
        let half = 0.5 * tau;
        let s_sub: Vec<f64> = op.sub.iter().map(|v| -half * v).collect();
        let s_sup: Vec<f64> = op.sup.iter().map(|v| -half * v).collect();
        let s_diag: Vec<f64> = op.diag.iter().map(|v| 1.0 - half * v).collect();
        let sy = tridiag_mul(&op.sub, &op.diag, &op.sup, y);
        let rhs: Vec<f64> = y.iter().zip(&sy).map(|(a, b)| a + half * b).collect();
        *y = thomas(&s_sub, &s_diag, &s_sup, &rhs)?;
        Ok(())
    };
    for _ in 0..full {
        step(&mut y, dt)?;
        norms.push(l2(&y));
    }
    let mut steps = full;
    if rem > 1e-12 * dt {
        step(&mut y, rem)?;
        norms.push(l2(&y));
        steps += 1;
    }
    Ok(CnRun {
        state: op.unsymmetrize(&y),
        steps,
        norms,
    })
}

fn l2(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_stencil() {
        let op = assemble(&SLProblem::dirichlet_laplacian(), 16).unwrap();
        let h = 1.0 / 16.0;
        assert_eq!(op.dim(), 15);
        for v in &op.diag {
            assert!((v + 2.0 / (h * h)).abs() < 1e-9);
        }
        for v in &op.sub {
            assert!((v - 1.0 / (h * h)).abs() < 1e-9);
        }
        assert!(op.is_symmetric());
        assert!(assemble(&SLProblem::dirichlet_laplacian(), 8).is_err());
    }

    #[test]
    fn constant_potential_shifts() {
        let base = SLProblem::from_strs(0.0, 1.0, "1+z", "0", "2+z", (1.0, 0.5), (1.0, 1.0)).unwrap();
        let shifted = SLProblem::from_strs(0.0, 1.0, "1+z", "3", "2+z", (1.0, 0.5), (1.0, 1.0)).unwrap();
        let a = assemble(&base, 32).unwrap();
        let b = assemble(&shifted, 32).unwrap();
        for ((x, y), z) in a.diag.iter().zip(&b.diag).zip(&a.nodes) {
            assert!((x - 3.0 / (2.0 + z) - y).abs() < 1e-10);
        }
        assert_eq!(a.sub, b.sub);
    }

    #[test]
    fn dirichlet_eigenvalues() {
        let op = assemble(&SLProblem::dirichlet_laplacian(), 4000).unwrap();
        let eig = fd_eigenvalues(&op).unwrap();
        assert!((eig[0] + PI * PI).abs() < 1e-5 * PI * PI);
        let (lo, hi) = op.gershgorin();
        assert!(eig.iter().all(|&l| l >= lo && l <= hi));
        // exact discrete values −(4/h²) sin²(nπh/2)
        let h = op.h;
        for n in 1..=5 {
            let exact = -4.0 / (h * h) * (n as f64 * PI * h / 2.0).sin().powi(2);
            assert!((eig[n - 1] - exact).abs() < 1e-9 * exact.abs());
        }
    }

    #[test]
    fn second_order_convergence() {
        let err = |m: usize| {
            let op = assemble(&SLProblem::dirichlet_laplacian(), m).unwrap();
            (fd_eigenvalues(&op).unwrap()[0] + PI * PI).abs()
        };
        let r = err(100) / err(200);
        assert!((3.6..=4.4).contains(&r), "{r}");
        let robin = SLProblem::from_strs(0.0, 1.0, "1", "0", "1", (1.0, -0.5), (1.0, 0.5)).unwrap();
        let f = |m: usize| fd_eigenvalues(&assemble(&robin, m).unwrap()).unwrap()[1];
        let (e1, e2, e3) = (f(100), f(200), f(400));
        let r = (e1 - e2) / (e2 - e3);
        assert!((3.6..=4.4).contains(&r), "{r}");
    }

    #[test]
    fn single_entry_and_eigenvectors() {
        let mut d = [3.5];
        let mut e = [0.0];
        tql1(&mut d, &mut e).unwrap();
        assert_eq!(d[0], 3.5);
        let op = assemble(&SLProblem::neumann_laplacian(), 200).unwrap();
        let pairs = fd_eigs(&op, 4).unwrap();
        assert!(pairs.eigenvalues[0].abs() < 1e-10);
        for (lam, x) in pairs.eigenvalues.iter().zip(&pairs.eigenvectors) {
            assert!((op.rho_norm(x) - 1.0).abs() < 1e-12);
            let lx = op.apply(x);
            let res = lx.iter().zip(x).map(|(u, v)| (u - lam * v).powi(2)).sum::<f64>().sqrt();
            assert!(res < 1e-6 * lam.abs().max(1.0), "{res}");
        }
        assert!(fd_eigs(&op, 1000).is_err());
    }

    #[test]
    fn crank_nicolson_decay() {
        let op = assemble(&SLProblem::dirichlet_laplacian(), 400).unwrap();
        let x0 = op.sample(|z| 2f64.sqrt() * (PI * z).sin());
        assert_eq!(crank_nicolson(&op, &x0, 0.0, 1e-3).unwrap(), x0);
        let run = crank_nicolson_run(&op, &x0, 0.1, 1e-4).unwrap();
        assert_eq!(run.steps, 1000);
        let expect = (-PI * PI * 0.1).exp();
        for (v, z) in run.state.iter().zip(&op.nodes) {
            assert!((v - expect * 2f64.sqrt() * (PI * z).sin()).abs() < 1e-4);
        }
        assert!(run.norms.windows(2).all(|w| w[1] <= w[0]));
        let frac = crank_nicolson_run(&op, &x0, 0.10005, 1e-4).unwrap();
        assert_eq!(frac.steps, 1001);
        assert!(crank_nicolson(&op, &x0, 0.1, 0.0).is_err());
    }

    #[test]
    fn full_mesh_and_csv() {
        let prob = SLProblem::from_strs(0.0, 1.0, "1", "0", "1", (0.0, 1.0), (1.0, 0.0)).unwrap();
        let op = assemble(&prob, 16).unwrap();
        assert_eq!(op.dim(), 16);
        let x = op.sample(|z| z);
        assert!((op.interpolate(&x, 0.3) - 0.3).abs() < 1e-14);
        assert!(op
            .to_csv(&x)
            .starts_with("z,value\n0.0000000000000000e0,0.0000000000000000e0"));
        assert_eq!(op.to_csv(&x).lines().count(), 18);
    }
}
