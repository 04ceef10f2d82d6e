//! Truncated matrix-valued Laurent series at a point.
//!
//! The gauge engine expands connections and gauge matrices locally around
//! each candidate pole and reads off principal parts from series products.
//! Coefficients are exact up to roundoff, so residue extraction stays at
//! the 1e-12 level required by the algebraic identity checks.

use crate::mat2::Mat2;
use crate::scalar::Real;
use num_complex::Complex;

/// Number of coefficients carried by every local expansion. Gauge factors
/// have pole order at most 2 per primitive and products stay shallow, so a
/// fixed window is enough; `assert_window` checks we never run off the end.
pub const SERIES_LEN: usize = 12;

/// Matrix Laurent series sum_{k} c_k (z - z0)^{offset + k}, truncated to
/// `SERIES_LEN` coefficients.
#[derive(Clone, Debug)]
pub struct MatSeries<T: Real> {
    pub offset: i32,
    pub coeffs: Vec<Mat2<T>>,
}

impl<T: Real> MatSeries<T> {
    pub fn zero() -> Self {
        MatSeries {
            offset: 0,
            coeffs: vec![Mat2::zero(); SERIES_LEN],
        }
    }

    pub fn constant(m: Mat2<T>) -> Self {
        let mut s = MatSeries::zero();
        s.coeffs[0] = m;
        s
    }

    /// Series with a single term `m (z-z0)^k`.
    pub fn monomial(m: Mat2<T>, k: i32) -> Self {
        let mut s = MatSeries::zero();
        s.offset = k;
        s.coeffs[0] = m;
        s
    }

    /// Coefficient of (z-z0)^power.
    pub fn coeff(&self, power: i32) -> Mat2<T> {
        let idx = power - self.offset;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Mat2::zero()
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// Drop exactly-zero leading coefficients (tightens the offset).
    fn normalized(mut self) -> Self {
        if self.coeffs.iter().all(|c| c.norm_inf() == T::zero()) {
            self.offset = 0;
            return self;
        }
        while self.coeffs[0].norm_inf() == T::zero() {
            self.coeffs.remove(0);
            self.offset += 1;
            self.coeffs.push(Mat2::zero());
        }
        self
    }

    pub fn add(&self, other: &MatSeries<T>) -> MatSeries<T> {
        let offset = self.offset.min(other.offset);
        let mut out = MatSeries {
            offset,
            coeffs: vec![Mat2::zero(); SERIES_LEN],
        };
        for k in 0..SERIES_LEN as i32 {
            let p = offset + k;
            out.coeffs[k as usize] = self.coeff(p) + other.coeff(p);
        }
        out.normalized()
    }

    pub fn neg(&self) -> MatSeries<T> {
        MatSeries {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| -*c).collect(),
        }
    }

    pub fn mul(&self, other: &MatSeries<T>) -> MatSeries<T> {
        let offset = self.offset + other.offset;
        let mut out = MatSeries {
            offset,
            coeffs: vec![Mat2::zero(); SERIES_LEN],
        };
        for i in 0..SERIES_LEN {
            for j in 0..SERIES_LEN {
                if i + j < SERIES_LEN {
                    out.coeffs[i + j] = out.coeffs[i + j] + self.coeffs[i] * other.coeffs[j];
                }
            }
        }
        out.normalized()
    }

    /// Multiplicative inverse as a Laurent series.
    ///
    /// Works even when the leading coefficient is singular (e.g. a glueing
    /// factor at its own pole) via A^{-1} = adj(A)/det(A); the adjugate is
    /// linear on 2x2 matrices, so it maps through the series coefficients.
    pub fn inverse(&self) -> Option<MatSeries<T>> {
        let s = self.clone().normalized();
        if s.coeffs[0].norm_inf() == T::zero() {
            return None; // identically zero
        }
        if let Some(lead) = invertible(&s.coeffs[0]) {
            let mut inv = MatSeries {
                offset: -s.offset,
                coeffs: vec![Mat2::zero(); SERIES_LEN],
            };
            inv.coeffs[0] = lead;
            // (sum a_k x^k)^(-1): b_0 = a_0^(-1),
            // b_n = -a_0^(-1) sum_{j=1..n} a_j b_{n-j}.
            for n in 1..SERIES_LEN {
                let mut acc = Mat2::zero();
                for j in 1..=n {
                    acc = acc + s.coeffs[j] * inv.coeffs[n - j];
                }
                inv.coeffs[n] = -(lead * acc);
            }
            return Some(inv);
        }

        // Singular leading coefficient: adjugate route.
        let adj = MatSeries {
            offset: s.offset,
            coeffs: s.coeffs.iter().map(|c| c.adjugate()).collect(),
        };
        let det_prod = s.mul(&adj); // equals det(A) * I as a series
        let mut det = vec![Complex::new(T::zero(), T::zero()); SERIES_LEN];
        let mut max_norm = T::zero();
        for (k, c) in det_prod.coeffs.iter().enumerate() {
            det[k] = c.m[0][0];
            if det[k].norm() > max_norm {
                max_norm = det[k].norm();
            }
        }
        if max_norm == T::zero() {
            return None;
        }
        // Leading nonzero scalar coefficient. The junk floor sits near
        // eps * |A|^2 / max (nilpotent multipliers), well below 1e-9 for
        // every gauge shape used here, while honest leading coefficients
        // are separation-sized.
        let thresh = max_norm * crate::scalar::re::<T>(1e-9);
        let lead_idx = det.iter().position(|c| c.norm() > thresh)?;
        let one = Complex::new(T::one(), T::zero());
        let s0 = det[lead_idx];
        let mut dinv = vec![Complex::new(T::zero(), T::zero()); SERIES_LEN];
        dinv[0] = one / s0;
        for n in 1..SERIES_LEN {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 1..=n {
                if lead_idx + j < SERIES_LEN {
                    acc = acc + det[lead_idx + j] * dinv[n - j];
                }
            }
            dinv[n] = -acc / s0;
        }
        let dinv_series = MatSeries {
            offset: -(det_prod.offset + lead_idx as i32),
            coeffs: dinv.iter().map(|c| Mat2::scalar(*c)).collect(),
        };
        Some(adj.mul(&dinv_series))
    }

    /// Formal derivative d/dz of the series (z is the expansion variable).
    pub fn derivative(&self) -> MatSeries<T> {
        let mut out = MatSeries {
            offset: self.offset - 1,
            coeffs: vec![Mat2::zero(); SERIES_LEN],
        };
        for k in 0..SERIES_LEN {
            let power = self.offset + k as i32;
            let factor = Complex::new(T::from_i32(power).unwrap(), T::zero());
            if k + 1 <= SERIES_LEN {
                // c_k x^p -> p c_k x^(p-1): lands at index k in the shifted frame.
                out.coeffs[k] = self.coeffs[k] * factor;
            }
        }
        out.normalized()
    }

    /// Principal part coefficients: [(order, coeff)] for orders >= 1,
    /// i.e. coeff of (z-z0)^(-order), with small coefficients pruned by
    /// the given absolute tolerance.
    pub fn principal_part(&self, tol: T) -> Vec<(usize, Mat2<T>)> {
        let mut parts = Vec::new();
        let mut p = self.offset;
        while p < 0 {
            let c = self.coeff(p);
            if c.norm_inf() > tol {
                parts.push(((-p) as usize, c));
            }
            p += 1;
        }
        parts.sort_by(|a, b| b.0.cmp(&a.0));
        parts
    }

    /// Evaluate the truncated series at a small offset `zeta` from the
    /// expansion point; only meaningful for |zeta| well inside the window.
    pub fn eval(&self, zeta: Complex<T>) -> Mat2<T> {
        let mut acc = Mat2::zero();
        let mut zp = cpow_i(zeta, self.offset);
        for c in &self.coeffs {
            acc = acc + *c * zp;
            zp = zp * zeta;
        }
        acc
    }

    /// True when the series window can still represent the requested power.
    pub fn assert_window(&self, power: i32) {
        let idx = power - self.offset;
        assert!(
            idx >= 0 && (idx as usize) < SERIES_LEN,
            "Laurent window exhausted: power {power} vs offset {} len {}",
            self.offset,
            SERIES_LEN
        );
    }
}

fn invertible<T: Real>(m: &Mat2<T>) -> Option<Mat2<T>> {
    // Reject near-singular leading coefficients so the adjugate path takes
    // over; the cutoff is relative to the matrix scale.
    let d = m.det().norm();
    let scale = m.norm_inf();
    if d <= scale * scale * crate::scalar::re::<T>(1e-10) {
        None
    } else {
        m.inverse()
    }
}

fn cpow_i<T: Real>(z: Complex<T>, e: i32) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let mut acc = one;
    for _ in 0..e.unsigned_abs() {
        acc = acc * z;
    }
    if e < 0 {
        one / acc
    } else {
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::Mat2;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_of_pole_series() {
        // f = E/x + I  (E nilpotent-free diag), f^{-1} computed by series,
        // check f * f^{-1} = 1 over the window.
        let e = Mat2::diag(c(2.0, 0.0), c(1.0, 0.0));
        let mut f = MatSeries::monomial(e, -1);
        f = f.add(&MatSeries::constant(Mat2::identity()));
        let inv = f.inverse().unwrap();
        let prod = f.mul(&inv);
        for p in -3..6 {
            let expect = if p == 0 { Mat2::identity() } else { Mat2::zero() };
            assert!(
                (prod.coeff(p) - expect).norm_inf() < 1e-13,
                "power {p}: {:?}",
                prod.coeff(p)
            );
        }
    }

    #[test]
    fn derivative_shifts_powers() {
        // f = m x^2 -> f' = 2 m x
        let m = Mat2::diag(c(1.0, 1.0), c(0.0, 3.0));
        let f = MatSeries::monomial(m, 2);
        let d = f.derivative();
        assert!((d.coeff(1) - m * c(2.0, 0.0)).norm_inf() < 1e-15);
        assert!(d.coeff(2).norm_inf() < 1e-15);
    }

    #[test]
    fn geometric_series_inverse() {
        // scalar check: (1 - x)^{-1} = 1 + x + x^2 + ...
        let one: Mat2<f64> = Mat2::identity();
        let f = MatSeries::constant(one).add(&MatSeries::monomial(-one, 1));
        let inv = f.inverse().unwrap();
        for p in 0..6 {
            assert!((inv.coeff(p) - one).norm_inf() < 1e-13);
        }
    }
}
