//! JSON records for problems and decompositions.
//!
//! Floats are written by `serde_json` in shortest round-trip form, so equal
//! inputs give byte-identical documents.

use serde::{Deserialize, Serialize};

use crate::eigensolve::{SolverOptions, SpectralDecomposition};
use crate::error::Result;
use crate::expr::CoeffExpr;
use crate::fracspace::{FractionalParams, FractionalSpace};
use crate::grid::BoundaryTrace;
use crate::problem::{Robin, SLProblem};
use crate::quad::Interval;

pub const SCHEMA_VERSION: u32 = 1;

/// `{interval, p, q, rho, bc_a, bc_b}` with coefficients as expression strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRecord {
    pub interval: [f64; 2],
    pub p: String,
    pub q: String,
    pub rho: String,
    pub bc_a: [f64; 2],
    pub bc_b: [f64; 2],
}

impl ProblemRecord {
    pub fn from_problem(prob: &SLProblem) -> Self {
        ProblemRecord {
            interval: [prob.interval.a, prob.interval.b],
            p: prob.p.source().to_string(),
            q: prob.q.source().to_string(),
            rho: prob.rho.source().to_string(),
            bc_a: [prob.bc_a.alpha, prob.bc_a.beta],
            bc_b: [prob.bc_b.alpha, prob.bc_b.beta],
        }
    }

    pub fn to_problem(&self) -> Result<SLProblem> {
        SLProblem::new(
            Interval::new(self.interval[0], self.interval[1])?,
            CoeffExpr::parse(&self.p)?,
            None,
            CoeffExpr::parse(&self.q)?,
            CoeffExpr::parse(&self.rho)?,
            Robin::new(self.bc_a[0], self.bc_a[1])?,
            Robin::new(self.bc_b[0], self.bc_b[1])?,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub a: f64,
    pub b: f64,
    pub panels: usize,
    pub points: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub schema_version: u32,
    pub problem: ProblemRecord,
    pub solver: SolverOptions,
    pub eigenvalues: Vec<f64>,
    pub gamma: f64,
    pub grid: GridRecord,
    /// Samples of `φ_n` at the grid nodes, one row per mode.
    pub eigenfunctions: Vec<Vec<f64>>,
    pub traces: Vec<BoundaryTrace<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fractional: Option<FractionalParams>,
}

impl DecompositionRecord {
    pub fn new(dec: &SpectralDecomposition<f64>, space: Option<&FractionalSpace<f64>>) -> Self {
        let g = dec.grid();
        DecompositionRecord {
            schema_version: SCHEMA_VERSION,
            problem: ProblemRecord::from_problem(dec.problem()),
            solver: *dec.options(),
            eigenvalues: dec.eigenvalues().to_vec(),
            gamma: dec.gamma(),
            grid: GridRecord {
                a: g.interval.a,
                b: g.interval.b,
                panels: g.panels,
                points: g.points,
                nodes: g.nodes.clone(),
                weights: g.weights.clone(),
            },
            eigenfunctions: dec.eigenfunctions().iter().map(|f| f.values().to_vec()).collect(),
            traces: dec.eigenfunctions().iter().map(|f| f.boundary()).collect(),
            fractional: space.map(|s| s.params()),
        }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::solve_spectrum;

    #[test]
    fn problem_round_trip() {
        let prob = SLProblem::from_strs(0.0, 2.0, "1+z^2", "sin(z)", "exp(-z)", (1.0, -0.5), (0.0, 1.0)).unwrap();
        let rec = ProblemRecord::from_problem(&prob);
        let json = serde_json::to_string(&rec).unwrap();
        let back: ProblemRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_problem().unwrap(), prob);
        assert!(serde_json::from_str::<ProblemRecord>(
            r#"{"interval":[0,1],"p":"1","q":"0","rho":"1","bc_a":[0,1],"bc_b":[0,1],"x":1}"#
        )
        .is_err());
    }

    #[test]
    fn decomposition_record_is_deterministic() {
        let prob = SLProblem::dirichlet_laplacian();
        let opts = SolverOptions::default();
        let d1 = solve_spectrum::<f64>(&prob, 3, &opts).unwrap();
        let d2 = solve_spectrum::<f64>(&prob, 3, &opts).unwrap();
        let fs = FractionalSpace::with_epsilon(d1.spectrum(), 0.5, 1.0).unwrap();
        let a = to_json_pretty(&DecompositionRecord::new(&d1, Some(&fs)));
        let b = to_json_pretty(&DecompositionRecord::new(&d2, Some(&fs)));
        assert_eq!(a, b);
        let rec: DecompositionRecord = serde_json::from_str(&a).unwrap();
        assert_eq!(rec.schema_version, SCHEMA_VERSION);
        assert_eq!(rec.eigenfunctions.len(), 3);
        assert_eq!(rec.fractional.unwrap().alpha, 0.5);
    }
}
