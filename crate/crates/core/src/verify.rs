//! Seeded property suites with machine-readable results.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::casestudy::{
    dcr_sl_problem, h1_inner_product, observability_test, quadratic_form_identity, seeded_equivalence,
    solve_case_study, transformed_problem, DCRModel, DEFAULT_CORPUS_SIZE, DEFAULT_OBSERVABILITY_TOL, LOWER_CONSTANT,
};
use crate::eigensolve::{coefficients_of, solve_spectrum, ModalCoefficients, SolverOptions, Spectrum};
use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::fracspace::{rescaled_basis, FractionalSpace, PowerSign};
use crate::grid::{inner_product_rho, GridFunction};
use crate::oracle::{assemble, fd_eigenvalues};
use crate::problem::{apply_operator, bc_residual, SLProblem};
use crate::quad::{Grid, Interval};
use crate::roots::find_root;
use crate::semigroup::{evolve, growth_bound, is_compact, is_exponentially_stable, trajectory, DEFAULT_STABILITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Eigs,
    Fracspace,
    Semigroup,
    Casestudy,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "core" => Suite::Core,
            "eigs" => Suite::Eigs,
            "fracspace" => Suite::Fracspace,
            "semigroup" => Suite::Semigroup,
            "casestudy" => Suite::Casestudy,
            "all" => Suite::All,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown suite {s:?} (expected core, eigs, fracspace, semigroup, casestudy or all)"
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    /// Observed quantity (an error, a count, a ratio).
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct Recorder {
    suite: &'static str,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: &'static str) -> Self {
        Recorder {
            suite,
            checks: Vec::new(),
        }
    }

    /// `value ≤ tol`.
    fn le(&mut self, name: &str, value: f64, tol: f64) {
        self.push(name, value.is_finite() && value <= tol, value, tol, None);
    }

    fn ok(&mut self, name: &str, passed: bool, detail: Option<String>) {
        self.push(name, passed, if passed { 1.0 } else { 0.0 }, 1.0, detail);
    }

    fn result<T>(&mut self, name: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(name, false, f64::NAN, 0.0, Some(e.to_string()));
                None
            }
        }
    }

    fn push(&mut self, name: &str, passed: bool, value: f64, tolerance: f64, detail: Option<String>) {
        self.checks.push(Check {
            suite: self.suite.to_string(),
            name: name.to_string(),
            passed,
            value,
            tolerance,
            detail,
        });
    }
}

pub fn run(suite: Suite, seed: u64) -> VerifyReport {
    let mut checks = Vec::new();
    let parts: &[fn(u64) -> Vec<Check>] = match suite {
        Suite::Core => &[core_suite],
        Suite::Eigs => &[eigs_suite],
        Suite::Fracspace => &[fracspace_suite],
        Suite::Semigroup => &[semigroup_suite],
        Suite::Casestudy => &[casestudy_suite],
        Suite::All => &[
            core_suite,
            eigs_suite,
            fracspace_suite,
            semigroup_suite,
            casestudy_suite,
        ],
    };
    for f in parts {
        checks.extend(f(seed));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    VerifyReport {
        suite,
        seed,
        passed: checks.len() - failed,
        failed,
        checks,
    }
}

fn unit_grid() -> Arc<Grid<f64>> {
    Arc::new(Grid::with_defaults(Interval::unit()))
}

fn dirichlet_spectrum(n: usize) -> Spectrum<f64> {
    Spectrum::from_eigenvalues((1..=n).map(|k| -(k as f64 * PI).powi(2)).collect()).expect("decreasing")
}

fn random_coefficients(sp: &Spectrum<f64>, rng: &mut ChaCha8Rng) -> ModalCoefficients<f64> {
    ModalCoefficients::new(sp, (0..sp.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect()).expect("length")
}

fn max_identity_error(g: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

fn core_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("core");
    let g = Grid::<f64>::new(Interval::unit(), 4, 8).expect("grid");
    let mut worst = 0.0f64;
    for k in 0..16 {
        let v: Vec<f64> = g.nodes.iter().map(|z| z.powi(k)).collect();
        worst = worst.max((g.integrate(&v) - 1.0 / (k + 1) as f64).abs());
    }
    r.le("quadrature exact to degree 2g-1", worst, 1e-14);

    let cases: [(&str, f64, f64); 4] = [
        ("exp(-z/1.0)", 0.0, 1.0),
        ("2*z^2+1", 2.0, 9.0),
        ("-2^2", 0.0, -4.0),
        ("2^3^2", 0.0, 512.0),
    ];
    let mut worst = 0.0f64;
    for (src, z, want) in cases {
        match CoeffExpr::parse(src) {
            Ok(e) => worst = worst.max((e.eval::<f64>(z) - want).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    r.le("expression evaluation", worst, 1e-15);
    let offset = match CoeffExpr::parse("exp(") {
        Err(Error::Syntax { offset, .. }) => offset,
        _ => usize::MAX,
    };
    r.ok("syntax error offset", offset == 4, Some(format!("offset {offset}")));

    let grid = unit_grid();
    let s1 = GridFunction::from_fns(
        grid.clone(),
        |z| (PI * z).sin(),
        |z| PI * (PI * z).cos(),
        |z| -PI * PI * (PI * z).sin(),
    );
    let s2 = GridFunction::from_fn(grid.clone(), |z| (2.0 * PI * z).sin());
    let one = CoeffExpr::constant(1.0);
    if let Some(v) = r.result("sine orthogonality", inner_product_rho(&s1, &s2, &one)) {
        r.le("sine orthogonality", v.abs(), 1e-12);
    }
    let lap = SLProblem::dirichlet_laplacian();
    if let Some(af) = r.result("operator on sin(pi z)", apply_operator(&lap, &s1)) {
        let err = af
            .values()
            .iter()
            .zip(s1.values())
            .map(|(a, f)| (a + PI * PI * f).abs())
            .fold(0.0, f64::max);
        r.le("operator on sin(pi z)", err, 1e-12);
    }
    let (ra, rb) = bc_residual(&lap, &s1);
    r.le("Dirichlet residual of sin(pi z)", ra.abs().max(rb.abs()), 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let c = rng.gen_range(0.1..10.0f64);
        match find_root(|x: f64| x * x - c, 0.0, c.max(1.0), 1e-14) {
            Ok(x) => worst = worst.max((x - c.sqrt()).abs() / c.sqrt()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    r.le("root finder on seeded quadratics", worst, 1e-12);
    r.checks
}

fn eigs_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("eigs");
    let opts = SolverOptions::default();
    if let Some(dec) = r.result(
        "Dirichlet spectrum",
        solve_spectrum::<f64>(&SLProblem::dirichlet_laplacian(), 5, &opts),
    ) {
        let err = dec
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let e = -((i + 1) as f64 * PI).powi(2);
                ((l - e) / e).abs()
            })
            .fold(0.0, f64::max);
        r.le("Dirichlet eigenvalues relative error", err, 1e-8);
    }
    if let Some(dec) = r.result(
        "Neumann spectrum",
        solve_spectrum::<f64>(&SLProblem::neumann_laplacian(), 2, &opts),
    ) {
        r.le("Neumann lambda_1", dec.eigenvalues()[0].abs(), 1e-9);
        let flat = dec
            .eigenfunction(1)
            .values()
            .iter()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max);
        r.le("Neumann constant eigenfunction", flat, 1e-9);
    }

    // seeded variable-coefficient problem
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (c1, c2, c3) = (
        rng.gen_range(0.1..1.0f64),
        rng.gen_range(-1.0..1.0f64),
        rng.gen_range(0.1..1.0f64),
    );
    let (ba, bb) = (rng.gen_range(-1.0..1.0f64), rng.gen_range(-1.0..1.0f64));
    let prob = SLProblem::from_strs(
        0.0,
        1.0,
        &format!("1+{c1:?}*z^2"),
        &format!("({c2:?})*cos(z)"),
        &format!("exp({c3:?}*z)"),
        (1.0, ba),
        (1.0, bb),
    );
    if let Some(prob) = r.result("seeded problem", prob) {
        if let Some(dec) = r.result("seeded spectrum", solve_spectrum::<f64>(&prob, 12, &opts)) {
            r.le("seeded Gram matrix", max_identity_error(&dec.gram()), 1e-8);
            let worst = dec
                .eigenfunctions()
                .iter()
                .map(|f| {
                    let (a, b) = bc_residual(&prob, f);
                    a.abs().max(b.abs())
                })
                .fold(0.0, f64::max);
            r.le("seeded boundary residuals", worst, 1e-8);
            r.ok(
                "strictly decreasing eigenvalues",
                dec.eigenvalues().windows(2).all(|w| w[1] < w[0]),
                None,
            );
            // FD agreement for low modes: second-order error ≈ |λ| h²/12
            if let Some(op) = r.result("FD assembly", assemble(&prob, 400)) {
                if let Some(fd) = r.result("FD eigenvalues", fd_eigenvalues(&op)) {
                    let h2 = op.h * op.h;
                    let worst = (0..3)
                        .map(|i| {
                            let l = dec.eigenvalues()[i];
                            (l - fd[i]).abs() / (10.0 * h2 * l.abs().max(1.0))
                        })
                        .fold(0.0, f64::max);
                    r.le("FD agreement within 10 h^2 |lambda| (n <= 3)", worst, 1.0);
                }
            }
            let phi2 = dec.eigenfunction(2);
            if let Some(c) = r.result("coefficients of phi_2", coefficients_of(phi2, &dec)) {
                let err = c
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v - if i == 1 { 1.0 } else { 0.0 }).abs())
                    .fold(0.0, f64::max);
                r.le("coefficients of phi_2 = e_2", err, 1e-8);
            }
        }
    }

    let err = |m: usize| -> Result<f64> {
        let op = assemble(&SLProblem::dirichlet_laplacian(), m)?;
        Ok((fd_eigenvalues(&op)?[0] + PI * PI).abs())
    };
    if let Some((e1, e2)) = r.result("FD convergence", err(100).and_then(|a| Ok((a, err(200)?)))) {
        let ratio = e1 / e2;
        r.push(
            "FD h^2 convergence ratio",
            (3.6..=4.4).contains(&ratio),
            ratio,
            4.4,
            Some("ratio must lie in [3.6, 4.4]".into()),
        );
    }
    r.checks
}

fn fracspace_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("fracspace");
    let alphas = [0.25, 0.5, 1.0, 1.5];
    let sp = dirichlet_spectrum(20);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for alpha in alphas {
        let Some(fs) = r.result("space construction", FractionalSpace::with_epsilon(&sp, alpha, 1.0)) else {
            continue;
        };
        r.le(
            &format!("rescaled basis Gram = I (alpha = {alpha})"),
            max_identity_error(&fs.rescaled_gram()),
            1e-6,
        );
        let mut worst = 0.0f64;
        let mut coercive = true;
        let mut inverse = 0.0f64;
        for _ in 0..100 {
            let c = random_coefficients(&sp, &mut rng);
            for n in 1..=sp.len() {
                let (l, rr) = fs.scaling_identity_check(&c, n).expect("same spectrum");
                worst = worst.max((l - rr).abs() / rr.abs().max(f64::MIN_POSITIVE));
            }
            coercive &= fs.coercivity_gap(&c).expect("nonzero") > fs.epsilon();
            let up = fs.fractional_apply(&c, PowerSign::Positive).expect("same spectrum");
            let back = fs.fractional_apply(&up, PowerSign::Negative).expect("same spectrum");
            for (x, y) in back.coefficients.iter().zip(&c.coefficients) {
                inverse = inverse.max((x - y).abs());
            }
        }
        r.le(&format!("scaling identity (alpha = {alpha})"), worst, 1e-10);
        r.ok(&format!("coercivity above epsilon (alpha = {alpha})"), coercive, None);
        r.le(&format!("power inverse round trip (alpha = {alpha})"), inverse, 1e-12);
    }
    // norm monotonicity across exponents: ‖f‖_α ≤ max(1, (μ−λ_N)^{α−β}) ‖f‖_β for α ≤ β
    let lo = FractionalSpace::with_epsilon(&sp, 0.5, 1.0).expect("valid");
    let hi = lo.with_alpha(1.0).expect("valid");
    let mut ok = true;
    for _ in 0..100 {
        let c = random_coefficients(&sp, &mut rng);
        let bound = 1f64.max(lo.gap(0).powf(-0.5)) * hi.norm_alpha(&c).expect("same");
        ok &= lo.norm_alpha(&c).expect("same") <= bound * (1.0 + 1e-12);
    }
    r.ok("alpha-norm bounded by beta-norm for alpha <= beta", ok, None);
    r.checks
}

fn semigroup_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("semigroup");
    let sp = dirichlet_spectrum(16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs = FractionalSpace::with_epsilon(&sp, 0.5, 1.0).expect("valid");
    let mut identity = true;
    let mut comp = 0.0f64;
    let mut growth = 0.0f64;
    for _ in 0..100 {
        let c = random_coefficients(&sp, &mut rng);
        identity &= evolve(&sp, &c, 0.0, 0.0).expect("valid") == c;
        let (t, s) = (rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5));
        let two = evolve(&sp, &evolve(&sp, &c, s, 0.0).expect("valid"), t, 0.0).expect("valid");
        let one = evolve(&sp, &c, t + s, 0.0).expect("valid");
        for (x, y) in two.coefficients.iter().zip(&one.coefficients) {
            comp = comp.max((x - y).abs() / y.abs().max(1e-300));
        }
        let tr = trajectory(&sp, &c, &[0.0, t, t + s], 0.0, Some(&fs)).expect("valid");
        growth = growth.max(growth_bound(&sp, &tr, Some(&fs)).expect("valid").max_ratio);
    }
    r.ok("T(0) = I exactly", identity, None);
    r.le("composition T(t)T(s) = T(t+s)", comp, 1e-12);
    r.le("growth bound ratio", growth, 1.0 + 1e-10);

    let st = is_exponentially_stable(&sp, DEFAULT_STABILITY_TOL);
    r.ok(
        "Dirichlet spectrum stable",
        st.stable && (st.margin - PI * PI).abs() < 1e-12,
        None,
    );
    let neumann = Spectrum::from_eigenvalues(vec![0.0, -PI * PI, -4.0 * PI * PI]).expect("decreasing");
    let st = is_exponentially_stable(&neumann, DEFAULT_STABILITY_TOL);
    r.ok(
        "Neumann spectrum not stable, margin 0",
        !st.stable && st.margin == 0.0,
        None,
    );
    r.ok("Dirichlet spectrum compact", is_compact(&sp).compact, None);
    let flat = Spectrum::from_eigenvalues(vec![-1.0; 16]).expect("finite");
    r.ok("constant sequence not compact", !is_compact(&flat).compact, None);
    r.checks
}

fn casestudy_suite(seed: u64) -> Vec<Check> {
    let mut r = Recorder::new("casestudy");
    let model = DCRModel::new(1.0, 0.75).expect("valid");
    let opts = SolverOptions::default();
    let Some(cs) = r.result("closed-form roots", solve_case_study(&model, 50)) else {
        return r.checks;
    };
    r.le(
        "characteristic residual (n <= 20)",
        cs.residuals[..20].iter().copied().fold(0.0, f64::max),
        1e-10,
    );
    r.ok(
        "s_1 in (1/2, pi/2)",
        cs.s[0] > 0.5 && cs.s[0] < PI / 2.0,
        Some(format!("s_1 = {}", cs.s[0])),
    );
    let grid = unit_grid();
    let norm_err = (1..=20)
        .map(|n| {
            let phi = cs.eigenfunction(n, grid.clone());
            (crate::grid::inner_product_l2(&phi, &phi).expect("same grid") - 1.0).abs()
        })
        .fold(0.0, f64::max);
    r.le("k_n normalization (n <= 20)", norm_err, 1e-8);

    let Some(prob) = r.result("transformed problem", transformed_problem(&model, false)) else {
        return r.checks;
    };
    if let Some(dec) = r.result("shooting spectrum", solve_spectrum::<f64>(&prob, 50, &opts)) {
        let err = (0..10)
            .map(|i| (dec.eigenvalues()[i] - cs.lambda[i]).abs() / cs.lambda[i].abs())
            .fold(0.0, f64::max);
        r.le("shooting vs closed form (n <= 10)", err, 1e-8);
        if let Some(fs) = r.result("mu = 0 space", FractionalSpace::with_mu(dec.spectrum(), 0.5, 0.0)) {
            let dec20 = dec.truncated(20).expect("20 <= 50");
            let fs20 = FractionalSpace::with_mu(dec20.spectrum(), 0.5, 0.0).expect("valid");
            let rb = rescaled_basis(&fs20, &dec20).expect("same spectrum");
            let mut worst = 0.0f64;
            for i in 0..20 {
                for j in 0..20 {
                    let v = h1_inner_product(&rb.functions[i], &rb.functions[j]).unwrap_or(f64::NAN);
                    worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
            r.le("H1-form Gram of phi_{n,1/2} (n <= 20)", worst, 1e-6);
            let _ = fs;
        }
        let phi1 = dec.eigenfunction(1);
        if let Some((l, rr)) = r.result("quadratic form identity", quadratic_form_identity(&model, phi1)) {
            r.le("quadratic form identity on phi_1", (l - rr).abs(), 1e-8);
        }
        for z0 in [0.0, 1.0] {
            let name = format!("observability at z0 = {z0}");
            if let Some(rep) = r.result(&name, observability_test(&cs, &dec, z0, 50, DEFAULT_OBSERVABILITY_TOL)) {
                r.ok(
                    &name,
                    rep.verdict,
                    Some(format!("min {:e} at n = {}", rep.minimum, rep.argmin)),
                );
                r.le(
                    &format!("closed form vs direct at z0 = {z0}"),
                    rep.max_disagreement.unwrap_or(f64::NAN),
                    1e-8,
                );
            }
        }
    }
    if let Some(op) = r.result("FD assembly", assemble(&prob, 4000)) {
        if let Some(fd) = r.result("FD eigenvalues", fd_eigenvalues(&op)) {
            let err = (0..10)
                .map(|i| (fd[i] - cs.lambda[i]).abs() / cs.lambda[i].abs())
                .fold(0.0, f64::max);
            r.le("FD vs closed form (n <= 10)", err, 1e-3);
        }
    }
    let weighted = dcr_sl_problem(&model).and_then(|p| solve_spectrum::<f64>(&p, 10, &opts));
    let shifted = transformed_problem(&model, true).and_then(|p| solve_spectrum::<f64>(&p, 10, &opts));
    if let (Some(w), Some(s)) = (
        r.result("weighted route", weighted),
        r.result("transformed route", shifted),
    ) {
        let err = w
            .eigenvalues()
            .iter()
            .zip(s.eigenvalues())
            .map(|(a, b)| (a - b).abs() / b.abs())
            .fold(0.0, f64::max);
        r.le("similarity invariance of the spectrum", err, 1e-7);
        let st = is_exponentially_stable(s.spectrum(), DEFAULT_STABILITY_TOL);
        r.le(
            "stability margin s_1^2 + kappa",
            (st.margin - (cs.s[0].powi(2) + model.kappa)).abs(),
            1e-8,
        );
    }
    if let Some(rep) = r.result("corpus", seeded_equivalence(seed, DEFAULT_CORPUS_SIZE, grid)) {
        r.push(
            "Poincare inequality on corpus",
            rep.poincare_violations == 0,
            (rep.corpus_size - rep.poincare_violations) as f64,
            rep.corpus_size as f64,
            Some(format!(
                "{}/{} pass",
                rep.corpus_size - rep.poincare_violations,
                rep.corpus_size
            )),
        );
        r.push(
            "1/8 lower norm equivalence on corpus",
            rep.lower_violations == 0 && rep.min_ratio >= LOWER_CONSTANT - 1e-10,
            rep.min_ratio,
            LOWER_CONSTANT,
            Some(format!("min ratio {}, max ratio {}", rep.min_ratio, rep.max_ratio)),
        );
    }
    r.checks
}
