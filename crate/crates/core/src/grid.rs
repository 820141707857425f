//! Functions sampled on a composite Gauss–Legendre grid.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::CoeffExpr;
use crate::quad::Grid;
use crate::scalar::Scalar;

/// Exact boundary data `(f(a), f'(a), f(b), f'(b))`, when the producer of a
/// grid function knows it. Otherwise the end panels are extrapolated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundaryTrace<T: Scalar> {
    pub value_a: T,
    pub deriv_a: T,
    pub value_b: T,
    pub deriv_b: T,
}

impl<T: Scalar> BoundaryTrace<T> {
    pub fn scaled(&self, c: T) -> Self {
        BoundaryTrace {
            value_a: self.value_a * c,
            deriv_a: self.deriv_a * c,
            value_b: self.value_b * c,
            deriv_b: self.deriv_b * c,
        }
    }

    fn axpy(&self, c: T, other: &Self) -> Self {
        BoundaryTrace {
            value_a: self.value_a + c * other.value_a,
            deriv_a: self.deriv_a + c * other.deriv_a,
            value_b: self.value_b + c * other.value_b,
            deriv_b: self.deriv_b + c * other.deriv_b,
        }
    }
}

/// A sampled function, optionally carrying first/second derivative samples and
/// exact boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T: Scalar> {
    grid: Arc<Grid<T>>,
    values: Vec<T>,
    d1: Option<Vec<T>>,
    d2: Option<Vec<T>>,
    trace: Option<BoundaryTrace<T>>,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(grid: Arc<Grid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(GridFunction {
            grid,
            values,
            d1: None,
            d2: None,
            trace: None,
        })
    }

    pub fn zeros(grid: Arc<Grid<T>>) -> Self {
        let n = grid.len();
        GridFunction {
            grid,
            values: vec![T::zero(); n],
            d1: None,
            d2: None,
            trace: None,
        }
    }

    pub fn from_fn(grid: Arc<Grid<T>>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes.iter().map(|&z| f(z)).collect();
        GridFunction {
            grid,
            values,
            d1: None,
            d2: None,
            trace: None,
        }
    }

    /// Sample `f`, `f'` and `f''` from closures; boundary data is taken from the
    /// closures too.
    pub fn from_fns(grid: Arc<Grid<T>>, f: impl Fn(T) -> T, df: impl Fn(T) -> T, d2f: impl Fn(T) -> T) -> Self {
        let nodes = &grid.nodes;
        let values = nodes.iter().map(|&z| f(z)).collect();
        let d1 = nodes.iter().map(|&z| df(z)).collect();
        let d2 = nodes.iter().map(|&z| d2f(z)).collect();
        let (a, b) = (grid.interval.a, grid.interval.b);
        let trace = BoundaryTrace {
            value_a: f(a),
            deriv_a: df(a),
            value_b: f(b),
            deriv_b: df(b),
        };
        GridFunction {
            grid,
            values,
            d1: Some(d1),
            d2: Some(d2),
            trace: Some(trace),
        }
    }

    pub fn from_expr(grid: Arc<Grid<T>>, expr: &CoeffExpr) -> Self {
        Self::from_fn(grid, |z| expr.eval(z))
    }

    /// Sample an expression together with its symbolic first and second derivatives.
    pub fn from_expr_with_derivatives(grid: Arc<Grid<T>>, expr: &CoeffExpr) -> Result<Self> {
        let d1 = expr.derivative()?;
        let d2 = d1.derivative()?;
        Ok(Self::from_fns(grid, |z| expr.eval(z), |z| d1.eval(z), |z| d2.eval(z)))
    }

    pub fn with_derivatives(mut self, d1: Vec<T>, d2: Option<Vec<T>>) -> Result<Self> {
        let n = self.values.len();
        if d1.len() != n || d2.as_ref().is_some_and(|d| d.len() != n) {
            return Err(Error::InvalidInput("derivative grid length mismatch".into()));
        }
        self.d1 = Some(d1);
        self.d2 = d2;
        Ok(self)
    }

    pub fn with_trace(mut self, trace: BoundaryTrace<T>) -> Self {
        self.trace = Some(trace);
        self
    }

    pub fn grid(&self) -> &Arc<Grid<T>> {
        &self.grid
    }

    pub fn nodes(&self) -> &[T] {
        &self.grid.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn d1(&self) -> Option<&[T]> {
        self.d1.as_deref()
    }

    pub fn d2(&self) -> Option<&[T]> {
        self.d2.as_deref()
    }

    pub fn trace(&self) -> Option<&BoundaryTrace<T>> {
        self.trace.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_layout(&other.grid)
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Boundary data: exact trace when present, else end-panel extrapolation
    /// (derivatives from the `d1` samples when available).
    pub fn boundary(&self) -> BoundaryTrace<T> {
        if let Some(t) = self.trace {
            return t;
        }
        let (value_a, mut deriv_a, value_b, mut deriv_b) = self.grid.boundary_extrapolate(&self.values);
        if let Some(d1) = &self.d1 {
            let (da, _, db, _) = self.grid.boundary_extrapolate(d1);
            deriv_a = da;
            deriv_b = db;
        }
        BoundaryTrace {
            value_a,
            deriv_a,
            value_b,
            deriv_b,
        }
    }

    pub fn map_values(&self, f: impl Fn(T, T) -> T) -> Self {
        let values = self
            .grid
            .nodes
            .iter()
            .zip(&self.values)
            .map(|(&z, &v)| f(z, v))
            .collect();
        GridFunction {
            grid: self.grid.clone(),
            values,
            d1: None,
            d2: None,
            trace: None,
        }
    }

    pub fn scaled(&self, c: T) -> Self {
        let s = |v: &Vec<T>| v.iter().map(|&x| x * c).collect::<Vec<_>>();
        GridFunction {
            grid: self.grid.clone(),
            values: s(&self.values),
            d1: self.d1.as_ref().map(s),
            d2: self.d2.as_ref().map(s),
            trace: self.trace.map(|t| t.scaled(c)),
        }
    }

    /// `self + c * other`; derivative data and traces survive only when both
    /// operands carry them.
    pub fn axpy(&self, c: T, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let comb = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&u, &v)| u + c * v).collect::<Vec<_>>();
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: comb(&self.values, &other.values),
            d1: match (&self.d1, &other.d1) {
                (Some(x), Some(y)) => Some(comb(x, y)),
                _ => None,
            },
            d2: match (&self.d2, &other.d2) {
                (Some(x), Some(y)) => Some(comb(x, y)),
                _ => None,
            },
            trace: match (&self.trace, &other.trace) {
                (Some(x), Some(y)) => Some(x.axpy(c, y)),
                _ => None,
            },
        })
    }

    /// Drop derivative and trace data.
    pub fn values_only(&self) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.clone(),
            d1: None,
            d2: None,
            trace: None,
        }
    }

    /// CSV with columns `z,value`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z,value\n");
        for (z, v) in self.grid.nodes.iter().zip(&self.values) {
            let _ = writeln!(out, "{:.16e},{:.16e}", z.as_f64(), v.as_f64());
        }
        out
    }
}

/// `∫ f` by the grid quadrature.
pub fn integrate<T: Scalar>(f: &GridFunction<T>) -> T {
    f.grid.integrate(&f.values)
}

/// Sum of `a_i * b_i * w_i` in node order.
pub(crate) fn weighted_dot<T: Scalar>(weights: &[T], a: &[T], b: &[T]) -> T {
    weights
        .iter()
        .zip(a.iter().zip(b))
        .fold(T::zero(), |acc, (&w, (&x, &y))| acc + (x * y) * w)
}

/// Unweighted `L²(a,b)` inner product.
pub fn inner_product_l2<T: Scalar>(f: &GridFunction<T>, g: &GridFunction<T>) -> Result<T> {
    f.check_grid(g)?;
    Ok(weighted_dot(&f.grid.weights, &f.values, &g.values))
}

/// `⟨f, g⟩_ρ = ∫ f g ρ`. The product `f·g` is formed first so the result does not
/// depend on argument order.
pub fn inner_product_rho<T: Scalar>(f: &GridFunction<T>, g: &GridFunction<T>, rho: &CoeffExpr) -> Result<T> {
    f.check_grid(g)?;
    let weights: Vec<T> = f
        .grid
        .nodes
        .iter()
        .zip(&f.grid.weights)
        .map(|(&z, &w)| w * rho.eval(z))
        .collect();
    Ok(weighted_dot(&weights, &f.values, &g.values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_coeff;
    use crate::quad::Interval;
    use std::f64::consts::PI;

    fn grid() -> Arc<Grid<f64>> {
        Arc::new(Grid::with_defaults(Interval::unit()))
    }

    #[test]
    fn integrate_examples() {
        let g = grid();
        assert!((integrate(&GridFunction::from_fn(g.clone(), |_| 1.0)) - 1.0).abs() < 1e-14);
        assert!((integrate(&GridFunction::from_fn(g.clone(), |z| z)) - 0.5).abs() < 1e-14);
        let s = integrate(&GridFunction::from_fn(g, |z| (PI * z).sin()));
        assert!((s - 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn rho_inner_product_examples() {
        let g = grid();
        let one = parse_coeff("1").unwrap();
        let f1 = GridFunction::from_fn(g.clone(), |_| 1.0);
        assert!((inner_product_rho(&f1, &f1, &one).unwrap() - 1.0).abs() < 1e-14);
        let s1 = GridFunction::from_fn(g.clone(), |z| (PI * z).sin());
        let s2 = GridFunction::from_fn(g.clone(), |z| (2.0 * PI * z).sin());
        assert!(inner_product_rho(&s1, &s2, &one).unwrap().abs() < 1e-12);
        let rho = parse_coeff("exp(-z)").unwrap();
        let v = inner_product_rho(&f1, &f1, &rho).unwrap();
        assert!((v - (1.0 - (-1.0f64).exp())).abs() < 1e-14);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let g1 = grid();
        let g2 = Arc::new(Grid::new(Interval::unit(), 32, 8).unwrap());
        let f = GridFunction::from_fn(g1, |z| z);
        let h = GridFunction::from_fn(g2, |z| z);
        let one = parse_coeff("1").unwrap();
        assert_eq!(inner_product_rho(&f, &h, &one), Err(Error::GridMismatch));
    }

    #[test]
    fn csv_has_seventeen_significant_digits() {
        let g = Arc::new(Grid::<f64>::new(Interval::unit(), 1, 2).unwrap());
        let f = GridFunction::from_fn(g, |z| z * 3.0);
        let csv = f.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("z,value"));
        let row: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(row[0], f.nodes()[0]);
        assert_eq!(row[1], f.values()[0]);
    }

    #[test]
    fn boundary_uses_trace_when_present() {
        let g = grid();
        let f = GridFunction::from_fns(
            g.clone(),
            |z| (3.0 * z).sin(),
            |z| 3.0 * (3.0 * z).cos(),
            |z| -9.0 * (3.0 * z).sin(),
        );
        let t = f.boundary();
        assert_eq!(t.value_b, 3.0f64.sin());
        let e = f.values_only().boundary();
        assert!((e.value_b - 3.0f64.sin()).abs() < 1e-12);
        assert!((e.deriv_a - 3.0).abs() < 1e-9);
    }
}
