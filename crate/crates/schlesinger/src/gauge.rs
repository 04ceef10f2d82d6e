//! Rational gauge transformations and their exact action on connections.
//!
//! A connection matrix B(z) = sum_i B_i/(z - x_i) (+ polynomial tail)
//! transforms under Y' = G(z) Y as
//!
//!     B' = G B G^{-1} + G' G^{-1}          (solution convention)
//!
//! The "operator sandwich" convention G (d + B) G^{-1}, which flips the sign
//! of the derivative term, is kept as a separate mode: it is the form in
//! which the non-invariant pole-raising phenomenon shows its classical
//! matrix shape, and the two differ only in how the integer twist is
//! bookkept.
//!
//! All principal parts are extracted from local Laurent expansions, so the
//! results are exact up to roundoff.

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::scalar::{re, Real};
use crate::series::{MatSeries, SERIES_LEN};
use num_complex::Complex;

/// Convention for how a gauge acts on the connection matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeConvention {
    /// B' = G B G^{-1} + G' G^{-1} (fundamental solutions transform as G Y).
    Solution,
    /// B' = G B G^{-1} - G' G^{-1} (conjugation of the operator d + B).
    OperatorSandwich,
}

/// A rational 2x2 gauge matrix, built from a few primitive shapes.
#[derive(Clone, Debug)]
pub enum GaugeMap<T: Real> {
    /// Constant invertible matrix.
    Constant(Mat2<T>),
    /// P diag((z-x)^e0, (z-x)^e1) P^{-1}.
    Glueing {
        p: Mat2<T>,
        x: Complex<T>,
        exps: (i32, i32),
    },
    /// I + M/(z - q).
    Multiplier { m: Mat2<T>, q: Complex<T> },
    /// c0 + c1 z (used for one-point shifts at infinity).
    Poly1 { c0: Mat2<T>, c1: Mat2<T> },
    /// Apply left factor first: Product[g0, g1] means G(z) = g1(z) * g0(z).
    Product(Vec<GaugeMap<T>>),
}

impl<T: Real> GaugeMap<T> {
    pub fn eval(&self, z: Complex<T>) -> Mat2<T> {
        match self {
            GaugeMap::Constant(c) => *c,
            GaugeMap::Glueing { p, x, exps } => {
                let zeta = z - *x;
                let d0 = cpow(zeta, exps.0);
                let d1 = cpow(zeta, exps.1);
                let pinv = p.inverse().expect("glueing basis invertible");
                *p * Mat2::diag(d0, d1) * pinv
            }
            GaugeMap::Multiplier { m, q } => {
                let one = Complex::new(T::one(), T::zero());
                Mat2::identity() + *m * (one / (z - *q))
            }
            GaugeMap::Poly1 { c0, c1 } => *c0 + *c1 * z,
            GaugeMap::Product(gs) => {
                let mut acc = Mat2::identity();
                for g in gs {
                    acc = g.eval(z) * acc;
                }
                acc
            }
        }
    }

    /// Points where G or G^{-1} can be singular.
    pub fn singular_candidates(&self) -> Vec<Complex<T>> {
        match self {
            GaugeMap::Constant(_) => vec![],
            GaugeMap::Glueing { x, exps, .. } => {
                if exps.0 == 0 && exps.1 == 0 {
                    vec![]
                } else {
                    vec![*x]
                }
            }
            GaugeMap::Multiplier { m, q } => {
                // Pole of G at q; poles of G^{-1} at the roots of
                // zeta^2 + tr(M) zeta + det(M) = 0 shifted by q.
                let mut pts = vec![*q];
                let half = Complex::new(re::<T>(0.5), T::zero());
                let t = m.trace();
                let disc = (t * t - m.det() * re::<T>(4.0)).sqrt();
                pts.push(*q + (-t + disc) * half);
                pts.push(*q + (-t - disc) * half);
                pts
            }
            GaugeMap::Poly1 { c0, c1 } => {
                // Zeros of det(c0 + z c1) = det(c0) + z tr(adj(c0) c1) + z^2 det(c1).
                let a = c1.det();
                let b = (c0.adjugate() * *c1).trace();
                let cc = c0.det();
                quadratic_roots(a, b, cc)
            }
            GaugeMap::Product(gs) => {
                let mut pts = vec![];
                for g in gs {
                    pts.extend(g.singular_candidates());
                }
                pts
            }
        }
    }

    /// Laurent expansion of G around the finite point `z0`.
    pub fn series_at(&self, z0: Complex<T>) -> MatSeries<T> {
        match self {
            GaugeMap::Constant(c) => MatSeries::constant(*c),
            GaugeMap::Glueing { p, x, exps } => {
                let pinv = p.inverse().expect("glueing basis invertible");
                let d = diag_power_series(z0 - *x, *exps);
                MatSeries::constant(*p).mul(&d).mul(&MatSeries::constant(pinv))
            }
            GaugeMap::Multiplier { m, q } => {
                let pole = scalar_inv_linear_series(z0 - *q);
                MatSeries::constant(Mat2::identity()).add(&pole.mul(&MatSeries::constant(*m)))
            }
            GaugeMap::Poly1 { c0, c1 } => {
                // c0 + c1 (z0 + zeta)
                MatSeries::constant(*c0 + *c1 * z0).add(&MatSeries::monomial(*c1, 1))
            }
            GaugeMap::Product(gs) => {
                let mut acc = MatSeries::constant(Mat2::identity());
                for g in gs {
                    acc = g.series_at(z0).mul(&acc);
                }
                acc
            }
        }
    }

    /// Expansion of G(1/w) as a series in w around w = 0.
    pub fn series_at_infinity(&self) -> MatSeries<T> {
        match self {
            GaugeMap::Constant(c) => MatSeries::constant(*c),
            GaugeMap::Glueing { p, x, exps } => {
                let pinv = p.inverse().expect("glueing basis invertible");
                // (1/w - x)^e = w^{-e} (1 - x w)^e
                let d0 = binom_power_series(-*x, exps.0);
                let d1 = binom_power_series(-*x, exps.1);
                let mut diag = MatSeries::zero();
                let e00 = Mat2::diag(
                    Complex::new(T::one(), T::zero()),
                    Complex::new(T::zero(), T::zero()),
                );
                let e11 = Mat2::diag(
                    Complex::new(T::zero(), T::zero()),
                    Complex::new(T::one(), T::zero()),
                );
                let mut s0 = MatSeries {
                    offset: -exps.0,
                    coeffs: d0.iter().map(|c| e00 * *c).collect(),
                };
                s0.coeffs.resize(SERIES_LEN, Mat2::zero());
                let mut s1 = MatSeries {
                    offset: -exps.1,
                    coeffs: d1.iter().map(|c| e11 * *c).collect(),
                };
                s1.coeffs.resize(SERIES_LEN, Mat2::zero());
                diag = diag.add(&s0).add(&s1);
                MatSeries::constant(*p).mul(&diag).mul(&MatSeries::constant(pinv))
            }
            GaugeMap::Multiplier { m, q } => {
                // M/(1/w - q) = M w/(1 - q w) = M (w + q w^2 + q^2 w^3 + ...)
                let mut s = MatSeries::zero();
                s.offset = 1;
                let mut f = Complex::new(T::one(), T::zero());
                for k in 0..SERIES_LEN {
                    s.coeffs[k] = *m * f;
                    f = f * *q;
                }
                MatSeries::constant(Mat2::identity()).add(&s)
            }
            GaugeMap::Poly1 { c0, c1 } => {
                // c0 + c1 / w
                MatSeries::constant(*c0).add(&MatSeries::monomial(*c1, -1))
            }
            GaugeMap::Product(gs) => {
                let mut acc = MatSeries::constant(Mat2::identity());
                for g in gs {
                    acc = g.series_at_infinity().mul(&acc);
                }
                acc
            }
        }
    }
}

/// Roots of a z^2 + b z + c (complex coefficients, degenerate cases handled).
fn quadratic_roots<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>) -> Vec<Complex<T>> {
    let tiny = re::<T>(1e-14);
    if a.norm() < tiny {
        if b.norm() < tiny {
            return vec![];
        }
        return vec![-c / b];
    }
    let half = Complex::new(re::<T>(0.5), T::zero());
    let disc = (b * b - a * c * re::<T>(4.0)).sqrt();
    vec![(-b + disc) * half / a, (-b - disc) * half / a]
}

fn cpow<T: Real>(z: Complex<T>, e: i32) -> Complex<T> {
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

/// Series of 1/(c + zeta) in zeta. For c = 0 this is the monomial zeta^{-1}.
fn scalar_inv_linear_series<T: Real>(c: Complex<T>) -> MatSeries<T> {
    let one = Mat2::identity();
    if c.norm() == T::zero() {
        return MatSeries::monomial(one, -1);
    }
    let inv = Complex::new(T::one(), T::zero()) / c;
    let mut s = MatSeries::zero();
    let mut f = inv;
    for k in 0..SERIES_LEN {
        s.coeffs[k] = one * f;
        f = f * (-inv);
    }
    s
}

/// Coefficients of (1 + c w)^e as a power series in w (e may be negative).
fn binom_power_series<T: Real>(c: Complex<T>, e: i32) -> Vec<Complex<T>> {
    let one = Complex::new(T::one(), T::zero());
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); SERIES_LEN];
    // Generalized binomial: coeff_k = prod_{j=0..k-1} (e - j)/(j+1) * c^k.
    let mut acc = one;
    for (k, slot) in coeffs.iter_mut().enumerate() {
        *slot = acc;
        let ek = Complex::new(T::from_i32(e).unwrap() - T::from_usize(k).unwrap(), T::zero());
        let kk = Complex::new(T::from_usize(k + 1).unwrap(), T::zero());
        acc = acc * ek * c / kk;
    }
    coeffs
}

/// Series expansion of diag((zeta0 + zeta)^e0, ...) around a point at signed
/// distance `c` from the glueing point: here `c = z0 - x`, the expansion is
/// in zeta = z - z0 and (z - x) = c + zeta.
fn diag_power_series<T: Real>(c: Complex<T>, exps: (i32, i32)) -> MatSeries<T> {
    let e00 = Mat2::diag(
        Complex::new(T::one(), T::zero()),
        Complex::new(T::zero(), T::zero()),
    );
    let e11 = Mat2::diag(
        Complex::new(T::zero(), T::zero()),
        Complex::new(T::one(), T::zero()),
    );
    let s0 = linear_power_series(c, exps.0);
    let s1 = linear_power_series(c, exps.1);
    let mut a = MatSeries {
        offset: s0.0,
        coeffs: s0.1.iter().map(|v| e00 * *v).collect(),
    };
    a.coeffs.resize(SERIES_LEN, Mat2::zero());
    let mut b = MatSeries {
        offset: s1.0,
        coeffs: s1.1.iter().map(|v| e11 * *v).collect(),
    };
    b.coeffs.resize(SERIES_LEN, Mat2::zero());
    a.add(&b)
}

/// (c + zeta)^e as (offset, coefficients) in zeta.
fn linear_power_series<T: Real>(c: Complex<T>, e: i32) -> (i32, Vec<Complex<T>>) {
    let one = Complex::new(T::one(), T::zero());
    if c.norm() == T::zero() {
        let mut v = vec![Complex::new(T::zero(), T::zero()); SERIES_LEN];
        v[0] = one;
        return (e, v);
    }
    // (c + zeta)^e = c^e (1 + zeta/c)^e
    let ce = cpow(c, e);
    let inv_c = one / c;
    let mut coeffs = vec![Complex::new(T::zero(), T::zero()); SERIES_LEN];
    let mut acc = ce;
    for (k, slot) in coeffs.iter_mut().enumerate() {
        *slot = acc;
        let ek = Complex::new(T::from_i32(e).unwrap() - T::from_usize(k).unwrap(), T::zero());
        let kk = Complex::new(T::from_usize(k + 1).unwrap(), T::zero());
        acc = acc * ek * inv_c / kk;
    }
    (0, coeffs)
}

/// A rational connection matrix: finite principal parts plus a polynomial
/// tail. `poles[i].1[k]` is the coefficient of (z - x_i)^{-(k+1)}.
#[derive(Clone, Debug)]
pub struct RationalConnection<T: Real> {
    pub poles: Vec<(Complex<T>, Vec<Mat2<T>>)>,
    /// poly[k] is the coefficient of z^k.
    pub poly: Vec<Mat2<T>>,
}

impl<T: Real> RationalConnection<T> {
    pub fn from_residues(poles: &[Complex<T>], residues: &[Mat2<T>]) -> Self {
        RationalConnection {
            poles: poles
                .iter()
                .zip(residues.iter())
                .map(|(x, b)| (*x, vec![*b]))
                .collect(),
            poly: vec![],
        }
    }

    pub fn eval(&self, z: Complex<T>) -> Mat2<T> {
        let one = Complex::new(T::one(), T::zero());
        let mut acc = Mat2::zero();
        for (x, parts) in &self.poles {
            let inv = one / (z - *x);
            let mut f = inv;
            for c in parts {
                acc = acc + *c * f;
                f = f * inv;
            }
        }
        let mut zp = one;
        for c in &self.poly {
            acc = acc + *c * zp;
            zp = zp * z;
        }
        acc
    }

    /// Laurent expansion around a finite point (which may or may not be a pole).
    pub fn series_at(&self, z0: Complex<T>) -> MatSeries<T> {
        let one = Complex::new(T::one(), T::zero());
        let mut acc = MatSeries::zero();
        for (x, parts) in &self.poles {
            let c = z0 - *x;
            for (k, coeff) in parts.iter().enumerate() {
                // coeff * (z - x)^{-(k+1)} = coeff * (c + zeta)^{-(k+1)}
                let (off, sc) = linear_power_series(c, -(k as i32) - 1);
                let mut s = MatSeries {
                    offset: off,
                    coeffs: sc.iter().map(|v| *coeff * *v).collect(),
                };
                s.coeffs.resize(SERIES_LEN, Mat2::zero());
                acc = acc.add(&s);
            }
        }
        for (k, coeff) in self.poly.iter().enumerate() {
            // z^k = (z0 + zeta)^k
            let (off, sc) = linear_power_series(z0, k as i32);
            // for z0 == 0 linear_power_series returns monomial zeta^k
            let mut s = MatSeries {
                offset: off,
                coeffs: sc.iter().map(|v| *coeff * *v).collect(),
            };
            s.coeffs.resize(SERIES_LEN, Mat2::zero());
            let _ = one;
            acc = acc.add(&s);
        }
        acc
    }

    /// Expansion of B(1/w) as a series in w around 0.
    pub fn series_at_infinity(&self) -> MatSeries<T> {
        let mut acc = MatSeries::zero();
        for (x, parts) in &self.poles {
            for (k, coeff) in parts.iter().enumerate() {
                // (1/w - x)^{-(k+1)} = w^{k+1} (1 - x w)^{-(k+1)}
                let bp = binom_power_series(-*x, -(k as i32) - 1);
                let mut s = MatSeries {
                    offset: k as i32 + 1,
                    coeffs: bp.iter().map(|v| *coeff * *v).collect(),
                };
                s.coeffs.resize(SERIES_LEN, Mat2::zero());
                acc = acc.add(&s);
            }
        }
        for (k, coeff) in self.poly.iter().enumerate() {
            acc = acc.add(&MatSeries::monomial(*coeff, -(k as i32)));
        }
        acc
    }

    /// Largest coefficient magnitude, used to scale pruning thresholds.
    pub fn magnitude(&self) -> T {
        let mut best = T::zero();
        for (_, parts) in &self.poles {
            for c in parts {
                if c.norm_inf() > best {
                    best = c.norm_inf();
                }
            }
        }
        for c in &self.poly {
            if c.norm_inf() > best {
                best = c.norm_inf();
            }
        }
        best
    }

    /// True when every pole is simple and there is no polynomial tail.
    pub fn is_fuchsian(&self, tol: T) -> bool {
        for (_, parts) in &self.poles {
            if parts.len() > 1 {
                return false;
            }
        }
        self.poly.iter().all(|c| c.norm_inf() <= tol)
    }
}

/// Apply a rational gauge to a rational connection, returning the exact
/// partial-fraction data of the result.
pub fn gauge_transform<T: Real>(
    conn: &RationalConnection<T>,
    g: &GaugeMap<T>,
    convention: GaugeConvention,
) -> Result<RationalConnection<T>> {
    let mut candidates: Vec<Complex<T>> = conn.poles.iter().map(|(x, _)| *x).collect();
    // Gauge singular points are computed through quadratic formulas whose
    // roundoff can be ~sqrt(eps); snap them onto existing poles before
    // deduplication so we never expand a hair away from a genuine pole.
    let snap = re::<T>(1e-6);
    for cand in g.singular_candidates() {
        let snapped = conn
            .poles
            .iter()
            .map(|(x, _)| *x)
            .find(|x| (*x - cand).norm() < snap * (T::one() + cand.norm()))
            .unwrap_or(cand);
        candidates.push(snapped);
    }
    // Deduplicate within a small separation.
    let sep = re::<T>(1e-9);
    let mut points: Vec<Complex<T>> = Vec::new();
    for c in candidates {
        if !points.iter().any(|p| (*p - c).norm() < sep) {
            points.push(c);
        }
    }

    let scale = T::one() + conn.magnitude();
    let prune = re::<T>(1e-11) * scale;

    let mut poles = Vec::new();
    for p in points {
        let sb = conn.series_at(p);
        let sg = g.series_at(p);
        let sginv = sg
            .inverse()
            .ok_or_else(|| Error::InvalidInput("gauge not invertible as a series".into()))?;
        let sgp = sg.derivative();
        let conj = sg.mul(&sb).mul(&sginv);
        let dterm = sgp.mul(&sginv);
        let total = match convention {
            GaugeConvention::Solution => conj.add(&dterm),
            GaugeConvention::OperatorSandwich => conj.add(&dterm.neg()),
        };
        let pp = total.principal_part(prune);
        if !pp.is_empty() {
            let max_ord = pp[0].0;
            let mut parts = vec![Mat2::zero(); max_ord];
            for (ord, c) in pp {
                parts[ord - 1] = c;
            }
            poles.push((p, parts));
        }
    }

    // Polynomial tail from the expansion at infinity.
    let sbw = conn.series_at_infinity();
    let sgw = g.series_at_infinity();
    let sgwinv = sgw
        .inverse()
        .ok_or_else(|| Error::InvalidInput("gauge not invertible at infinity".into()))?;
    // dG/dz (1/w) = -w^2 d/dw [G(1/w)]
    let minus_w2 = MatSeries::monomial(-Mat2::identity(), 2);
    let sgwp = minus_w2.mul(&sgw.derivative());
    let conj_w = sgw.mul(&sbw).mul(&sgwinv);
    let dterm_w = sgwp.mul(&sgwinv);
    let total_w = match convention {
        GaugeConvention::Solution => conj_w.add(&dterm_w),
        GaugeConvention::OperatorSandwich => conj_w.add(&dterm_w.neg()),
    };
    let mut poly = Vec::new();
    let mut k = 0i32;
    loop {
        let c = total_w.coeff(-k);
        if k > 6 {
            break;
        }
        poly.push(c);
        k += 1;
    }
    while let Some(last) = poly.last() {
        if last.norm_inf() <= prune && poly.len() > 0 {
            poly.pop();
        } else {
            break;
        }
    }
    // Entries below the pruning threshold inside the kept range are noise.
    for c in poly.iter_mut() {
        if c.norm_inf() <= prune {
            *c = Mat2::zero();
        }
    }

    Ok(RationalConnection { poles, poly })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_gauge_conjugates_residues() {
        let b0 = Mat2::new(c(0.3, 0.0), c(1.0, 0.5), c(0.0, 0.2), c(-0.3, 0.0));
        let b1 = -b0;
        let conn = RationalConnection::from_residues(&[c(0.0, 0.0), c(1.0, 0.0)], &[b0, b1]);
        let g = Mat2::new(c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0), c(3.0, 0.0));
        let out = gauge_transform(&conn, &GaugeMap::Constant(g), GaugeConvention::Solution).unwrap();
        assert_eq!(out.poles.len(), 2);
        assert!(out.poly.is_empty());
        let ginv = g.inverse().unwrap();
        for (i, b) in [b0, b1].iter().enumerate() {
            let expect = g * *b * ginv;
            assert!((out.poles[i].1[0] - expect).norm_inf() < 1e-12);
        }
    }

    #[test]
    fn operator_sandwich_reproduces_pole_raising() {
        // diag(1,z) . [d + [[l, e],[0,-l]]/z] . diag(1,1/z)
        //   = d + [[l/z, e/z^2], [0, -(l+1)/z]]
        let l = 0.37;
        let e = 0.83;
        let b = Mat2::new(c(l, 0.0), c(e, 0.0), c(0.0, 0.0), c(-l, 0.0));
        let conn = RationalConnection::from_residues(&[c(0.0, 0.0)], &[b]);
        let g = GaugeMap::Glueing {
            p: Mat2::identity(),
            x: c(0.0, 0.0),
            exps: (0, 1),
        };
        let out = gauge_transform(&conn, &g, GaugeConvention::OperatorSandwich).unwrap();
        assert_eq!(out.poles.len(), 1);
        let parts = &out.poles[0].1;
        assert_eq!(parts.len(), 2, "expected a double pole");
        let lead = parts[1];
        let expect_lead = Mat2::new(c(0.0, 0.0), c(e, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!((lead - expect_lead).norm_inf() < 1e-13);
        let res = parts[0];
        let expect_res = Mat2::diag(c(l, 0.0), c(-(l + 1.0), 0.0));
        assert!((res - expect_res).norm_inf() < 1e-13);
    }

    #[test]
    fn multiplier_matches_direct_evaluation() {
        let m = Mat2::new(c(0.5, 0.1), c(0.2, 0.0), c(-0.1, 0.3), c(0.4, 0.0));
        let g = GaugeMap::Multiplier { m, q: c(1.0, 0.0) };
        let z = c(0.3, 0.7);
        let series = g.series_at(c(0.25, 0.7));
        // Evaluate the series at zeta = 0.05 and compare with direct eval.
        let zeta = z - c(0.25, 0.7);
        let mut acc = Mat2::zero();
        let mut zp = c(1.0, 0.0);
        for k in 0..SERIES_LEN {
            let p = series.offset + k as i32;
            if p < 0 {
                continue;
            }
            // offset is 0 here (regular point)
            acc = acc + series.coeffs[k] * zp;
            zp *= zeta;
            let _ = p;
        }
        let direct = g.eval(z);
        assert!((acc - direct).norm_inf() < 1e-10);
    }
}
