use std::f64::consts::PI;

use proptest::prelude::*;
use sl_spectra::io::ProblemRecord;
use sl_spectra::oracle::{assemble, fd_eigenvalues};
use sl_spectra::{evolve, FractionalSpace, ModalCoefficients, PowerSign, SLProblem, Spectrum};

fn dirichlet(n: usize) -> Spectrum<f64> {
    Spectrum::from_eigenvalues((1..=n).map(|k| -(k as f64 * PI).powi(2)).collect()).unwrap()
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition(c in coeffs(12), t in 0.0f64..0.3, s in 0.0f64..0.3, kappa in -1.0f64..1.0) {
        let sp = dirichlet(12);
        let c = ModalCoefficients::new(&sp, c).unwrap();
        let two = evolve(&sp, &evolve(&sp, &c, s, kappa).unwrap(), t, kappa).unwrap();
        let one = evolve(&sp, &c, t + s, kappa).unwrap();
        for (x, y) in two.coefficients.iter().zip(&one.coefficients) {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn evolution_contracts(c in coeffs(12), t in 0.0f64..1.0) {
        let sp = dirichlet(12);
        let c = ModalCoefficients::new(&sp, c).unwrap();
        let out = evolve(&sp, &c, t, 0.0).unwrap();
        prop_assert!(out.norm() <= (-PI * PI * t).exp() * c.norm() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn power_round_trip(c in coeffs(16), alpha in 0.05f64..4.0, eps in 0.1f64..5.0) {
        let sp = dirichlet(16);
        let fs = FractionalSpace::with_epsilon(&sp, alpha, eps).unwrap();
        let c = ModalCoefficients::new(&sp, c).unwrap();
        let back = fs
            .fractional_apply(&fs.fractional_apply(&c, PowerSign::Positive).unwrap(), PowerSign::Negative)
            .unwrap();
        for (x, y) in back.coefficients.iter().zip(&c.coefficients) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn scaling_identity(c in coeffs(16), alpha in 0.05f64..4.0, n in 1usize..=16) {
        let sp = dirichlet(16);
        let fs = FractionalSpace::with_epsilon(&sp, alpha, 1.0).unwrap();
        let c = ModalCoefficients::new(&sp, c).unwrap();
        let (l, r) = fs.scaling_identity_check(&c, n).unwrap();
        prop_assert!((l - r).abs() <= 1e-10 * r.abs().max(1e-300));
    }

    #[test]
    fn alpha_norm_is_a_norm(a in coeffs(10), b in coeffs(10), alpha in 0.1f64..2.0) {
        let sp = dirichlet(10);
        let fs = FractionalSpace::with_epsilon(&sp, alpha, 1.0).unwrap();
        let a = ModalCoefficients::new(&sp, a).unwrap();
        let b = ModalCoefficients::new(&sp, b).unwrap();
        let sum = a.map(|i, v| v + b.coefficients[i]);
        let (na, nb, ns) = (fs.norm_alpha(&a).unwrap(), fs.norm_alpha(&b).unwrap(), fs.norm_alpha(&sum).unwrap());
        prop_assert!(ns <= (na + nb) * (1.0 + 1e-12));
        let ip = fs.inner_product_alpha(&a, &b).unwrap();
        prop_assert!(ip.abs() <= na * nb * (1.0 + 1e-12));
    }

    #[test]
    fn fd_operator_symmetric_and_negative(ba in -2.0f64..2.0, bb in -2.0f64..2.0, m in 16usize..80) {
        let prob = SLProblem::from_strs(0.0, 1.0, "1+z", "1", "exp(z)", (1.0, -ba.abs()), (1.0, bb.abs())).unwrap();
        let op = assemble(&prob, m).unwrap();
        prop_assert!(op.is_symmetric());
        let eig = fd_eigenvalues(&op).unwrap();
        prop_assert!(eig.windows(2).all(|w| w[1] <= w[0]));
        // q = 1, ρ ≤ e and dissipative boundary terms: λ ≤ −1/e
        prop_assert!(eig[0] < -(-1.0f64).exp() + 1e-9);
    }

    #[test]
    fn problem_record_round_trip(c in 0.1f64..3.0, ba in -2.0f64..2.0, bb in -2.0f64..2.0) {
        let prob = SLProblem::from_strs(0.0, 2.0, &format!("{c:?}+z^2"), "sin(z)", "1", (1.0, ba), (0.5, bb)).unwrap();
        let rec = ProblemRecord::from_problem(&prob);
        let json = serde_json::to_string(&rec).unwrap();
        let back: ProblemRecord = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back.to_problem().unwrap(), prob);
    }
}
