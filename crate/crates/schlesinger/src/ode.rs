//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) over a
//! real parameter, shared by the monodromy, Hamiltonian and Schlesinger
//! flows. State types implement [`OdeState`]; right-hand sides are
//! closures of the parameter and the state.

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::scalar::{re, Real};
use num_complex::Complex;

/// Vector-space operations the integrator needs.
pub trait OdeState<T: Real>: Clone {
    fn axpy(&mut self, a: T, x: &Self);
    fn scale(&mut self, a: T);
    fn norm_inf(&self) -> T;
    fn zeroed(&self) -> Self;
}

impl<T: Real> OdeState<T> for Complex<T> {
    fn axpy(&mut self, a: T, x: &Self) {
        *self = *self + *x * Complex::new(a, T::zero());
    }
    fn scale(&mut self, a: T) {
        *self = *self * Complex::new(a, T::zero());
    }
    fn norm_inf(&self) -> T {
        self.norm()
    }
    fn zeroed(&self) -> Self {
        Complex::new(T::zero(), T::zero())
    }
}

impl<T: Real> OdeState<T> for Mat2<T> {
    fn axpy(&mut self, a: T, x: &Self) {
        *self = *self + *x * Complex::new(a, T::zero());
    }
    fn scale(&mut self, a: T) {
        *self = *self * Complex::new(a, T::zero());
    }
    fn norm_inf(&self) -> T {
        Mat2::norm_inf(self)
    }
    fn zeroed(&self) -> Self {
        Mat2::zero()
    }
}

impl<T: Real, A: OdeState<T>, B: OdeState<T>> OdeState<T> for (A, B) {
    fn axpy(&mut self, a: T, x: &Self) {
        self.0.axpy(a, &x.0);
        self.1.axpy(a, &x.1);
    }
    fn scale(&mut self, a: T) {
        self.0.scale(a);
        self.1.scale(a);
    }
    fn norm_inf(&self) -> T {
        self.0.norm_inf().max(self.1.norm_inf())
    }
    fn zeroed(&self) -> Self {
        (self.0.zeroed(), self.1.zeroed())
    }
}

impl<T: Real, A: OdeState<T>> OdeState<T> for Vec<A> {
    fn axpy(&mut self, a: T, x: &Self) {
        for (s, v) in self.iter_mut().zip(x.iter()) {
            s.axpy(a, v);
        }
    }
    fn scale(&mut self, a: T) {
        for s in self.iter_mut() {
            s.scale(a);
        }
    }
    fn norm_inf(&self) -> T {
        self.iter()
            .map(|s| s.norm_inf())
            .fold(T::zero(), |a, b| a.max(b))
    }
    fn zeroed(&self) -> Self {
        self.iter().map(|s| s.zeroed()).collect()
    }
}

/// Integration statistics.
#[derive(Clone, Copy, Debug, Default)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
    pub max_error: f64,
}

/// Options for one integration run.
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions<T: Real> {
    /// Local error target per step (absolute, on the max norm).
    pub tol: T,
    pub h_initial: T,
    pub h_min: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        OdeOptions {
            tol: re(1e-10),
            h_initial: re(1e-2),
            h_min: re(1e-12),
            max_steps: 2_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
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
// embedded 4th-order weights
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrate dy/ds = f(s, y) from s = 0 to s = 1.
pub fn integrate<T: Real, S: OdeState<T>>(
    mut f: impl FnMut(T, &S) -> S,
    y0: S,
    opts: &OdeOptions<T>,
) -> Result<(S, OdeStats)> {
    let mut s = T::zero();
    let one = T::one();
    let mut y = y0;
    let mut h = opts.h_initial.min(one);
    let mut stats = OdeStats::default();
    let safety = re::<T>(0.9);
    let min_scale = re::<T>(0.2);
    let max_scale = re::<T>(5.0);

    let mut k1 = f(s, &y);
    while s < one {
        if stats.steps + stats.rejected > opts.max_steps {
            return Err(Error::StepUnderflow {
                at: s.to_f64().unwrap_or(0.0),
            });
        }
        if h > one - s {
            h = one - s;
        }

        let stage = |base: &S, contrib: &[(T, &S)]| {
            let mut out = base.clone();
            for (a, k) in contrib {
                out.axpy(*a * h, k);
            }
            out
        };

        let y2 = stage(&y, &[(re(A21), &k1)]);
        let k2 = f(s + re::<T>(C2) * h, &y2);
        let y3 = stage(&y, &[(re(A31), &k1), (re(A32), &k2)]);
        let k3 = f(s + re::<T>(C3) * h, &y3);
        let y4 = stage(&y, &[(re(A41), &k1), (re(A42), &k2), (re(A43), &k3)]);
        let k4 = f(s + re::<T>(C4) * h, &y4);
        let y5 = stage(
            &y,
            &[(re(A51), &k1), (re(A52), &k2), (re(A53), &k3), (re(A54), &k4)],
        );
        let k5 = f(s + re::<T>(C5) * h, &y5);
        let y6 = stage(
            &y,
            &[
                (re(A61), &k1),
                (re(A62), &k2),
                (re(A63), &k3),
                (re(A64), &k4),
                (re(A65), &k5),
            ],
        );
        let k6 = f(s + h, &y6);
        // 5th-order solution (k2 has zero weight)
        let ynew = stage(
            &y,
            &[
                (re(B1), &k1),
                (re(B3), &k3),
                (re(B4), &k4),
                (re(B5), &k5),
                (re(B6), &k6),
            ],
        );
        let k7 = f(s + h, &ynew);
        // embedded 4th-order solution and error estimate
        let ylow = stage(
            &y,
            &[
                (re(E1), &k1),
                (re(E3), &k3),
                (re(E4), &k4),
                (re(E5), &k5),
                (re(E6), &k6),
                (re(E7), &k7),
            ],
        );
        let mut diff = ynew.clone();
        diff.axpy(-one, &ylow);
        let err = diff.norm_inf();

        if err <= opts.tol {
            s = s + h;
            y = ynew;
            k1 = k7; // FSAL
            stats.steps += 1;
            stats.max_error = stats.max_error.max(err.to_f64().unwrap_or(0.0));
        } else {
            stats.rejected += 1;
        }
        let ratio = if err > T::zero() {
            safety * (opts.tol / err).powf(re(0.2))
        } else {
            max_scale
        };
        h = h * ratio.max(min_scale).min(max_scale);
        if h < opts.h_min {
            return Err(Error::StepUnderflow {
                at: s.to_f64().unwrap_or(0.0),
            });
        }
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn exponential_scalar() {
        // dy/ds = (2 + i) y over [0, 1]
        let lam = Complex64::new(2.0, 1.0);
        let opts = OdeOptions::default();
        let (y, stats) = integrate(|_, y: &Complex64| *y * lam, Complex64::new(1.0, 0.0), &opts)
            .unwrap();
        let expect = lam.exp();
        assert!((y - expect).norm() < 1e-9, "err {:e}", (y - expect).norm());
        assert!(stats.steps > 0);
    }

    #[test]
    fn matrix_rotation() {
        // dY/ds = J Y with J = [[0,-1],[1,0]]: Y(1) = rotation by 1 rad
        let j = Mat2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let opts = OdeOptions::default();
        let (y, _) = integrate(|_, y: &Mat2<f64>| j * *y, Mat2::identity(), &opts).unwrap();
        let expect = Mat2::new(
            Complex64::new(1f64.cos(), 0.0),
            Complex64::new(-(1f64.sin()), 0.0),
            Complex64::new(1f64.sin(), 0.0),
            Complex64::new(1f64.cos(), 0.0),
        );
        assert!((y - expect).norm_inf() < 1e-10);
    }
}
