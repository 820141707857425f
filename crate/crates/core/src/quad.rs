//! Composite Gauss–Legendre quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default number of panels.
pub const DEFAULT_PANELS: usize = 64;
/// Default Gauss points per panel.
pub const DEFAULT_POINTS: usize = 8;

/// Closed interval `[a, b]` with `a < b`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Interval<T: Scalar> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(Error::InvalidInput(format!(
                "interval endpoints must be finite with a < b, got [{a}, {b}]"
            )));
        }
        Ok(Interval { a, b })
    }

    pub fn unit() -> Self {
        Interval {
            a: T::zero(),
            b: T::one(),
        }
    }

    #[inline]
    pub fn length(&self) -> T {
        self.b - self.a
    }

    #[inline]
    pub fn contains(&self, z: T) -> bool {
        z >= self.a && z <= self.b
    }
}

/// Nodes and weights of the `g`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(g: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(g >= 1, "need at least one Gauss point");
    let mut nodes = vec![0.0; g];
    let mut weights = vec![0.0; g];
    let n = g as f64;
    for i in 0..g.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(g, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(g, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[g - 1 - i] = x;
        weights[i] = w;
        weights[g - 1 - i] = w;
    }
    if g % 2 == 1 {
        nodes[g / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `panels × points` Gauss–Legendre grid covering an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Grid<T: Scalar> {
    pub interval: Interval<T>,
    pub panels: usize,
    pub points: usize,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn new(interval: Interval<T>, panels: usize, points: usize) -> Result<Self> {
        if panels == 0 || points == 0 {
            return Err(Error::InvalidInput(
                "grid needs at least one panel and one point".into(),
            ));
        }
        let (x, w) = gauss_legendre(points);
        let a = interval.a.as_f64();
        let width = interval.length().as_f64() / panels as f64;
        let mut nodes = Vec::with_capacity(panels * points);
        let mut weights = Vec::with_capacity(panels * points);
        for p in 0..panels {
            let left = a + p as f64 * width;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(T::lit(left + 0.5 * width * (xi + 1.0)));
                weights.push(T::lit(0.5 * width * wi));
            }
        }
        Ok(Grid {
            interval,
            panels,
            points,
            nodes,
            weights,
        })
    }

    pub fn with_defaults(interval: Interval<T>) -> Self {
        Self::new(interval, DEFAULT_PANELS, DEFAULT_POINTS).expect("default grid is valid")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same interval and layout (nodes are then identical).
    pub fn same_layout(&self, other: &Self) -> bool {
        self.interval == other.interval && self.panels == other.panels && self.points == other.points
    }

    pub fn integrate(&self, values: &[T]) -> T {
        debug_assert_eq!(values.len(), self.weights.len());
        values
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (&v, &w)| acc + v * w)
    }

    /// Value and derivative at `x` of the degree-`(points-1)` interpolant through
    /// one panel's samples.
    pub fn panel_interpolate(&self, panel: usize, values: &[T], x: T) -> (T, T) {
        let off = panel * self.points;
        lagrange_value_and_derivative(&self.nodes[off..off + self.points], &values[off..off + self.points], x)
    }

    /// Extrapolated `(f(a), f'(a), f(b), f'(b))` from the end panels.
    pub fn boundary_extrapolate(&self, values: &[T]) -> (T, T, T, T) {
        let (fa, da) = self.panel_interpolate(0, values, self.interval.a);
        let (fb, db) = self.panel_interpolate(self.panels - 1, values, self.interval.b);
        (fa, da, fb, db)
    }

    /// Derivative values at the nodes from the per-panel interpolant.
    pub fn panel_derivative(&self, values: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(values.len());
        for p in 0..self.panels {
            let off = p * self.points;
            let xs = &self.nodes[off..off + self.points];
            let ys = &values[off..off + self.points];
            for (i, &xi) in xs.iter().enumerate() {
                // derivative of the interpolant at its own node
                let mut d = T::zero();
                for (j, &xj) in xs.iter().enumerate() {
                    if j == i {
                        for (m, &xm) in xs.iter().enumerate() {
                            if m != i {
                                d = d + ys[i] / (xi - xm);
                            }
                        }
                    } else {
                        let mut lj = T::one() / (xj - xi);
                        for (m, &xm) in xs.iter().enumerate() {
                            if m != i && m != j {
                                lj = lj * (xi - xm) / (xj - xm);
                            }
                        }
                        d = d + ys[j] * lj;
                    }
                }
                out.push(d);
            }
        }
        out
    }
}

/// Lagrange interpolant through `(xs, ys)` and its derivative at `x`; `x` must
/// not coincide with a node.
pub fn lagrange_value_and_derivative<T: Scalar>(xs: &[T], ys: &[T], x: T) -> (T, T) {
    let mut value = T::zero();
    let mut deriv = T::zero();
    for (j, &xj) in xs.iter().enumerate() {
        let mut lj = T::one();
        let mut inv_sum = T::zero();
        for (m, &xm) in xs.iter().enumerate() {
            if m != j {
                lj = lj * (x - xm) / (xj - xm);
                inv_sum = inv_sum + T::one() / (x - xm);
            }
        }
        value = value + ys[j] * lj;
        deriv = deriv + ys[j] * lj * inv_sum;
    }
    (value, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_length() {
        for g in 1..=12 {
            let (x, w) = gauss_legendre(g);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
        let grid = Grid::<f64>::new(Interval::new(-1.0, 2.5).unwrap(), 64, 8).unwrap();
        assert!((grid.weights.iter().sum::<f64>() - 3.5).abs() < 1e-12);
        assert!(grid.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(grid.nodes[0] > -1.0 && *grid.nodes.last().unwrap() < 2.5);
    }

    #[test]
    fn single_panel_is_exact_to_degree_2g_minus_1() {
        let g = 8;
        let grid = Grid::<f64>::new(Interval::unit(), 1, g).unwrap();
        for k in 0..2 * g {
            let vals: Vec<f64> = grid.nodes.iter().map(|z| z.powi(k as i32)).collect();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!(((grid.integrate(&vals) - exact) / exact).abs() <= 1e-14, "k={k}");
        }
    }

    #[test]
    fn extrapolation_recovers_polynomial_boundary_data() {
        let grid = Grid::<f64>::new(Interval::unit(), 4, 6).unwrap();
        let vals: Vec<f64> = grid.nodes.iter().map(|z| z * z * z - 2.0 * z + 1.0).collect();
        let (fa, da, fb, db) = grid.boundary_extrapolate(&vals);
        assert!((fa - 1.0).abs() < 1e-12);
        assert!((da + 2.0).abs() < 1e-11);
        assert!(fb.abs() < 1e-12);
        assert!((db - 1.0).abs() < 1e-11);
        let d = grid.panel_derivative(&vals);
        for (z, dz) in grid.nodes.iter().zip(d) {
            assert!((dz - (3.0 * z * z - 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(2.0f32, 1.0).is_err());
    }
}
