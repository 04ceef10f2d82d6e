//! 2x2 complex matrices and projective directions.
//!
//! Everything downstream (residues, gauges, monodromy matrices) is rank 2,
//! so a fixed-size hand-rolled type beats pulling in a matrix library.

use crate::scalar::{re, Real};
use num_complex::Complex;
use std::ops::{Add, Mul, Neg, Sub};

/// 2x2 complex matrix, row major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2<T: Real> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> std::fmt::Debug for Mat2<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[[{:?}, {:?}], [{:?}, {:?}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl<T: Real> Mat2<T> {
    pub fn new(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        let o = Complex::new(T::one(), T::zero());
        Mat2::new(o, z, z, o)
    }

    pub fn diag(a: Complex<T>, d: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Mat2::new(a, z, z, d)
    }

    pub fn scalar(s: Complex<T>) -> Self {
        Mat2::diag(s, s)
    }

    /// Rank-one matrix `u * v^T` (column times row).
    pub fn outer(u: [Complex<T>; 2], v: [Complex<T>; 2]) -> Self {
        Mat2::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    }

    /// Matrix with the given columns.
    pub fn from_columns(c0: [Complex<T>; 2], c1: [Complex<T>; 2]) -> Self {
        Mat2::new(c0[0], c1[0], c0[1], c1[1])
    }

    pub fn column(&self, j: usize) -> [Complex<T>; 2] {
        [self.m[0][j], self.m[1][j]]
    }

    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Adjugate: `adj(A) * A = det(A) * I`.
    pub fn adjugate(&self) -> Self {
        Mat2::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == T::zero() {
            return None;
        }
        Some(self.adjugate() * (Complex::new(T::one(), T::zero()) / d))
    }

    pub fn transpose(&self) -> Self {
        Mat2::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn mul_vec(&self, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// Max-norm over entries.
    pub fn norm_inf(&self) -> T {
        let mut best = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                let n = self.m[r][c].norm();
                if n > best {
                    best = n;
                }
            }
        }
        best
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> T {
        let mut s = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                s = s + self.m[r][c].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Eigenvalues by the quadratic formula, in an unspecified order.
    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        let half = Complex::new(re::<T>(0.5), T::zero());
        let t = self.trace() * half;
        let disc = (t * t - self.det()).sqrt();
        [t + disc, t - disc]
    }

    /// An eigenvector for the eigenvalue `mu`, or `None` when `A - mu*I`
    /// does not visibly drop rank (the caller decides on tolerances).
    pub fn eigenvector_for(&self, mu: Complex<T>) -> Option<[Complex<T>; 2]> {
        // Kernel of [[a-mu, b], [c, d-mu]]: take the better-conditioned row.
        let a = self.m[0][0] - mu;
        let b = self.m[0][1];
        let c = self.m[1][0];
        let d = self.m[1][1] - mu;
        let r0 = a.norm() + b.norm();
        let r1 = c.norm() + d.norm();
        let v = if r0 >= r1 { [b, -a] } else { [d, -c] };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if n == T::zero() {
            // The matrix is a scalar multiple of the identity at mu.
            return Some([Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())]);
        }
        let inv = Complex::new(T::one() / n, T::zero());
        Some([v[0] * inv, v[1] * inv])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        *self * s
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Mat2<T>;
    fn add(self, rhs: Self) -> Self {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][c] + rhs.m[r][c];
            }
        }
        out
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Mat2<T>;
    fn sub(self, rhs: Self) -> Self {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][c] - rhs.m[r][c];
            }
        }
        out
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Mat2<T>;
    fn neg(self) -> Self {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = -self.m[r][c];
            }
        }
        out
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][0] * rhs.m[0][c] + self.m[r][1] * rhs.m[1][c];
            }
        }
        out
    }
}

impl<T: Real> Mul<Complex<T>> for Mat2<T> {
    type Output = Mat2<T>;
    fn mul(self, rhs: Complex<T>) -> Self {
        let mut out = Mat2::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.m[r][c] = self.m[r][c] * rhs;
            }
        }
        out
    }
}

/// Projective direction on C^2, normalized so the larger-modulus component
/// is exactly 1 (avoids scale drift in long chains of operations).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction<T: Real> {
    pub v: [Complex<T>; 2],
}

impl<T: Real> Direction<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Self {
        let one = Complex::new(T::one(), T::zero());
        if a.norm() >= b.norm() {
            debug_assert!(a.norm() > T::zero(), "zero vector is not a direction");
            Direction { v: [one, b / a] }
        } else {
            Direction { v: [a / b, one] }
        }
    }

    pub fn from_vec(v: [Complex<T>; 2]) -> Self {
        Direction::new(v[0], v[1])
    }

    /// Projective (chordal) distance between two directions: it is 0 iff the
    /// lines coincide, and at most 1.
    pub fn distance(&self, other: &Direction<T>) -> T {
        let u = self.v;
        let w = other.v;
        // |u x w| / (|u| |w|)
        let cross = (u[0] * w[1] - u[1] * w[0]).norm();
        let nu = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
        let nw = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        cross / (nu * nw)
    }

    /// A direction spanning the kernel of the covector that annihilates self;
    /// i.e. the "perpendicular" line (b:-a) for (a:b).
    pub fn perp(&self) -> Direction<T> {
        Direction::new(self.v[1], -self.v[0])
    }

    /// Row covector annihilating this direction: `w` with `w . v = 0`.
    pub fn annihilator(&self) -> [Complex<T>; 2] {
        [-self.v[1], self.v[0]]
    }

    pub fn apply(&self, g: &Mat2<T>) -> Direction<T> {
        Direction::from_vec(g.mul_vec(self.v))
    }
}

/// Solve the 4x4 complex linear system `A x = b` by Gaussian elimination
/// with partial pivoting. Used for the projective-conjugator search.
pub fn solve4<T: Real>(
    a: &mut [[Complex<T>; 4]; 4],
    b: &mut [Complex<T>; 4],
) -> Option<[Complex<T>; 4]> {
    let n = 4;
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col][col].norm();
        for r in (col + 1)..n {
            if a[r][col].norm() > best {
                best = a[r][col].norm();
                piv = r;
            }
        }
        if best == T::zero() {
            return None;
        }
        if piv != col {
            a.swap(piv, col);
            b.swap(piv, col);
        }
        let inv = Complex::new(T::one(), T::zero()) / a[col][col];
        for r in (col + 1)..n {
            let f = a[r][col] * inv;
            for c in col..n {
                a[r][c] = a[r][c] - f * a[col][c];
            }
            b[r] = b[r] - f * b[col];
        }
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut x = [zero; 4];
    for r in (0..n).rev() {
        let mut s = b[r];
        for c in (r + 1)..n {
            s = s - a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Mat2::new(c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(-2.0, 0.25));
        let inv = a.inverse().unwrap();
        let prod = a * inv;
        assert!((prod - Mat2::identity()).norm_inf() < 1e-14);
    }

    #[test]
    fn eigen_pair_of_symmetric_flip() {
        // [[0,1],[1,0]] has eigenvalues +-1 with eigenvectors (1,1), (1,-1).
        let a = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let v = a.eigenvector_for(c(1.0, 0.0)).unwrap();
        let d = Direction::from_vec(v);
        let expect = Direction::new(c(1.0, 0.0), c(1.0, 0.0));
        assert!(d.distance(&expect) < 1e-14);
        let w = a.eigenvector_for(c(-1.0, 0.0)).unwrap();
        let dw = Direction::from_vec(w);
        let expect_w = Direction::new(c(1.0, 0.0), c(-1.0, 0.0));
        assert!(dw.distance(&expect_w) < 1e-14);
    }

    #[test]
    fn solve4_random() {
        let mut a = [
            [c(2.0, 0.0), c(1.0, 1.0), c(0.0, 0.0), c(0.5, 0.0)],
            [c(0.0, 1.0), c(3.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 0.0), c(4.0, -1.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(1.0, 0.0)],
        ];
        let xs = [c(1.0, 2.0), c(-1.0, 0.0), c(0.5, 0.5), c(2.0, -1.0)];
        let mut b = [c(0.0, 0.0); 4];
        for r in 0..4 {
            for k in 0..4 {
                b[r] += a[r][k] * xs[k];
            }
        }
        let x = solve4(&mut a, &mut b).unwrap();
        for k in 0..4 {
            assert!((x[k] - xs[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn direction_normalization() {
        let d = Direction::new(c(0.3, 0.0), c(3.0, 0.0));
        assert!((d.v[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((d.v[0] - c(0.1, 0.0)).norm() < 1e-15);
    }
}
