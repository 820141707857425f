//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances<T, const N: usize> {
    pub rtol: T,
    pub atol: [T; N],
}

/// Integrator state carried between consecutive calls so a sweep over many
/// output points reuses the last accepted step size.
#[derive(Debug, Clone, Copy)]
pub struct Stepper<T> {
    pub h: T,
    pub steps: usize,
    pub rejected: usize,
}

const MAX_STEPS: usize = 1_000_000;

// Dormand–Prince coefficients
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl<T: Scalar> Stepper<T> {
    pub fn new(h: T) -> Self {
        Stepper {
            h,
            steps: 0,
            rejected: 0,
        }
    }

    /// Advance `y` from `x0` to `x1` (`x1 > x0`), landing exactly on `x1`.
    pub fn integrate<const N: usize, F>(
        &mut self,
        rhs: &F,
        x0: T,
        x1: T,
        y: &mut [T; N],
        tol: &Tolerances<T, N>,
    ) -> Result<()>
    where
        F: Fn(T, &[T; N]) -> [T; N],
    {
        let lit = T::lit;
        let mut x = x0;
        let span = x1 - x0;
        if span <= T::zero() {
            return Ok(());
        }
        let mut h_prop = self.h.max(span * lit(1e-12));
        let mut h;
        let mut k1 = rhs(x, y);
        let min_h = T::epsilon() * lit(16.0) * (x0.abs() + x1.abs() + T::one());
        let mut local_steps = 0usize;

        loop {
            let truncated = x + h_prop >= x1 || x1 - (x + h_prop) < min_h;
            h = if truncated { x1 - x } else { h_prop };
            let stage = |coef: &[(f64, &[T; N])]| {
                let mut out = *y;
                for (c, k) in coef {
                    let c = lit(*c) * h;
                    for i in 0..N {
                        out[i] = out[i] + c * k[i];
                    }
                }
                out
            };
            let k2 = rhs(x + lit(C2) * h, &stage(&[(A21, &k1)]));
            let k3 = rhs(x + lit(C3) * h, &stage(&[(A31, &k1), (A32, &k2)]));
            let k4 = rhs(x + lit(C4) * h, &stage(&[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = rhs(
                x + lit(C5) * h,
                &stage(&[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = rhs(
                x + h,
                &stage(&[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y_new = stage(&[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            let k7 = rhs(x + h, &y_new);

            let mut err = T::zero();
            for i in 0..N {
                let e = h
                    * (lit(E1) * k1[i]
                        + lit(E3) * k3[i]
                        + lit(E4) * k4[i]
                        + lit(E5) * k5[i]
                        + lit(E6) * k6[i]
                        + lit(E7) * k7[i]);
                let scale = tol.atol[i] + tol.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / scale).abs());
            }
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                h = h * lit(0.25);
                h_prop = h;
                self.rejected += 1;
                if h < min_h {
                    return Err(Error::StepFailure { at: x.as_f64() });
                }
                continue;
            }

            let factor = if err == T::zero() {
                lit(5.0)
            } else {
                (lit(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
            };
            if err <= T::one() {
                x = if truncated { x1 } else { x + h };
                *y = y_new;
                k1 = k7;
                self.steps += 1;
                local_steps += 1;
                if truncated {
                    // an untested proposal survives a truncated final step
                    self.h = h_prop.max(h * factor);
                    return Ok(());
                }
                h_prop = h * factor;
            } else {
                self.rejected += 1;
                h_prop = h * factor.min(T::one());
                if h_prop < min_h {
                    return Err(Error::StepFailure { at: x.as_f64() });
                }
            }
            if local_steps > MAX_STEPS {
                return Err(Error::StepFailure { at: x.as_f64() });
            }
        }
    }
}
