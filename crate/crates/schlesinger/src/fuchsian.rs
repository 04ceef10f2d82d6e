//! Rank-2 logarithmic connections B(z) dz = sum_i B_i dz/(z - x_i) on the
//! Riemann sphere: value types, evaluation, eigen-markings, gauge action.

use crate::error::{Error, Result};
use crate::gauge::{gauge_transform, GaugeConvention, GaugeMap, RationalConnection};
use crate::mat2::{Direction, Mat2};
use crate::scalar::{re, Real, Tolerances};
use num_complex::Complex;

/// A point on the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint<T: Real> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> SpherePoint<T> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex<T>> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    /// Chordal-style separation: finite distance between finite points,
    /// infinite otherwise (infinity is never close to a finite point here).
    pub fn separation(&self, other: &SpherePoint<T>) -> T {
        match (self, other) {
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => (*a - *b).norm(),
            (SpherePoint::Infinity, SpherePoint::Infinity) => T::zero(),
            _ => T::infinity(),
        }
    }
}

/// Ordered pole divisor, multiplicity one per point.
#[derive(Clone, Debug)]
pub struct PoleDivisor<T: Real> {
    pub points: Vec<SpherePoint<T>>,
}

impl<T: Real> PoleDivisor<T> {
    /// Divisor for a moduli-space system: at least three distinct points.
    pub fn new(points: Vec<SpherePoint<T>>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "a pole divisor needs n >= 3 points, got {}",
                points.len()
            )));
        }
        let d = PoleDivisor { points };
        d.check_separation(re(1e-9))?;
        Ok(d)
    }

    /// Relaxed constructor for local examples (single/double-pole toys).
    pub fn new_unchecked(points: Vec<SpherePoint<T>>) -> Self {
        PoleDivisor { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn check_separation(&self, min_sep: T) -> Result<()> {
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                let d = self.points[i].separation(&self.points[j]);
                if d < min_sep {
                    return Err(Error::PolesTooClose {
                        i,
                        j,
                        distance: d.to_f64().unwrap_or(0.0),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Gauge class of the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeClass {
    Sl2,
    Gl2,
}

impl std::fmt::Display for GaugeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GaugeClass::Sl2 => write!(f, "sl2"),
            GaugeClass::Gl2 => write!(f, "gl2"),
        }
    }
}

/// Per-pole eigen-marking: the chosen eigenvalue, the other one, and the
/// corresponding eigenlines. In sl2 mode `other == -value`.
#[derive(Clone, Copy, Debug)]
pub struct PoleMarking<T: Real> {
    pub value: Complex<T>,
    pub other: Complex<T>,
    pub line: Direction<T>,
    pub other_line: Direction<T>,
    /// Set when the residue has (numerically) coincident eigenvalues; such
    /// poles are representable but rejected by modification operations.
    pub degenerate: bool,
}

impl<T: Real> PoleMarking<T> {
    /// Flip which eigenvalue is "marked" (the local Weyl involution).
    pub fn flipped(&self) -> Self {
        PoleMarking {
            value: self.other,
            other: self.value,
            line: self.other_line,
            other_line: self.line,
            degenerate: self.degenerate,
        }
    }
}

/// Compute a marking for a residue matrix. The marked eigenvalue is chosen
/// as the one closest to `prefer` when given, otherwise by a deterministic
/// lexicographic rule on (re, im).
pub fn mark_residue<T: Real>(
    b: &Mat2<T>,
    prefer: Option<Complex<T>>,
    pole_index: usize,
    tol_gap: T,
) -> Result<PoleMarking<T>> {
    let [mu0, mu1] = b.eigenvalues();
    if (mu0 - mu1).norm() < tol_gap {
        // Representable, but flagged: modification operations reject it.
        let half = Complex::new(re::<T>(0.5), T::zero());
        let mean = (mu0 + mu1) * half;
        let line = b
            .eigenvector_for(mean)
            .map(Direction::from_vec)
            .unwrap_or_else(|| Direction::new(Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero())));
        return Ok(PoleMarking {
            value: mean,
            other: mean,
            line,
            other_line: line.perp(),
            degenerate: true,
        });
    }
    let (value, other) = match prefer {
        Some(p) => {
            if (mu0 - p).norm() <= (mu1 - p).norm() {
                (mu0, mu1)
            } else {
                (mu1, mu0)
            }
        }
        None => {
            let key = |m: &Complex<T>| (m.re, m.im);
            if key(&mu0) >= key(&mu1) {
                (mu0, mu1)
            } else {
                (mu1, mu0)
            }
        }
    };
    let line = Direction::from_vec(b.eigenvector_for(value).ok_or(Error::DegenerateResidue {
        pole_index,
        reason: "no eigenvector".into(),
    })?);
    let other_line =
        Direction::from_vec(b.eigenvector_for(other).ok_or(Error::DegenerateResidue {
            pole_index,
            reason: "no eigenvector".into(),
        })?);
    Ok(PoleMarking {
        value,
        other,
        line,
        other_line,
        degenerate: false,
    })
}

/// A rank-2 Fuchsian system with per-pole eigen-markings.
#[derive(Clone, Debug)]
pub struct FuchsianSystem<T: Real> {
    pub divisor: PoleDivisor<T>,
    pub residues: Vec<Mat2<T>>,
    pub gauge: GaugeClass,
    pub marking: Vec<PoleMarking<T>>,
    pub tol: Tolerances<T>,
}

impl<T: Real> FuchsianSystem<T> {
    /// Build a system, validate the invariants, and compute markings.
    ///
    /// `preferred` optionally pins the marked eigenvalue at each pole.
    pub fn new(
        divisor: PoleDivisor<T>,
        residues: Vec<Mat2<T>>,
        gauge: GaugeClass,
        preferred: Option<Vec<Complex<T>>>,
    ) -> Result<Self> {
        let tol = Tolerances::default();
        if divisor.len() != residues.len() {
            return Err(Error::InvalidInput(format!(
                "{} poles but {} residues",
                divisor.len(),
                residues.len()
            )));
        }
        let n_inf = divisor.points.iter().filter(|p| p.is_infinity()).count();
        if n_inf > 1 {
            return Err(Error::InvalidInput("infinity listed twice".into()));
        }

        // Zero-sum over the whole sphere.
        let mut total = Mat2::zero();
        for b in &residues {
            total = total + *b;
        }
        if total.norm_inf() > tol.alg * (T::one() + magnitude(&residues)) {
            return Err(Error::InvalidInput(format!(
                "residues do not sum to zero over the sphere (norm {:.3e}); \
                 when infinity is not a pole the finite residues must cancel",
                total.norm_inf().to_f64().unwrap_or(0.0)
            )));
        }

        if gauge == GaugeClass::Sl2 {
            for (i, b) in residues.iter().enumerate() {
                if b.trace().norm() > tol.alg * (T::one() + b.norm_inf()) {
                    return Err(Error::InvalidInput(format!(
                        "sl2 violation: residue {} has trace norm {:.3e}",
                        i,
                        b.trace().norm().to_f64().unwrap_or(0.0)
                    )));
                }
            }
        }

        let mut marking = Vec::with_capacity(residues.len());
        for (i, b) in residues.iter().enumerate() {
            let prefer = preferred.as_ref().map(|v| v[i]);
            marking.push(mark_residue(b, prefer, i, re(1e-9))?);
        }

        Ok(FuchsianSystem {
            divisor,
            residues,
            gauge,
            marking,
            tol,
        })
    }

    /// Number of poles.
    pub fn n(&self) -> usize {
        self.divisor.len()
    }

    /// Marked eigenvalues in pole order.
    pub fn lambda(&self) -> Vec<Complex<T>> {
        self.marking.iter().map(|m| m.value).collect()
    }

    /// Finite poles with their residues.
    pub fn finite_parts(&self) -> Vec<(Complex<T>, Mat2<T>)> {
        self.divisor
            .points
            .iter()
            .zip(self.residues.iter())
            .filter_map(|(p, b)| p.finite().map(|z| (z, *b)))
            .collect()
    }

    /// Index of the pole at infinity, if listed.
    pub fn infinity_index(&self) -> Option<usize> {
        self.divisor.points.iter().position(|p| p.is_infinity())
    }

    /// The residue at infinity: the listed one, or minus the finite sum
    /// (zero when infinity is regular).
    pub fn residue_at_infinity(&self) -> Mat2<T> {
        match self.infinity_index() {
            Some(i) => self.residues[i],
            None => {
                let mut s = Mat2::zero();
                for (_, b) in self.finite_parts() {
                    s = s + b;
                }
                -s
            }
        }
    }

    /// B(z) = sum over finite poles of B_i/(z - x_i).
    pub fn evaluate(&self, z: Complex<T>) -> Result<Mat2<T>> {
        let sep = self.tol.separation;
        for (i, (x, _)) in self.finite_parts().iter().enumerate() {
            let d = (z - *x).norm();
            if d < sep {
                return Err(Error::EvaluationAtPole {
                    pole_index: i,
                    distance: d.to_f64().unwrap_or(0.0),
                });
            }
        }
        let one = Complex::new(T::one(), T::zero());
        let mut acc = Mat2::zero();
        for (x, b) in self.finite_parts() {
            acc = acc + b * (one / (z - x));
        }
        Ok(acc)
    }

    /// The marking entry at pole `i`, recomputed from the residue so the
    /// stored directions are always consistent with the matrices.
    pub fn eigen_data(&self, i: usize) -> Result<PoleMarking<T>> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        let mark = mark_residue(&self.residues[i], Some(self.marking[i].value), i, re(1e-9))?;
        if mark.degenerate {
            return Err(Error::DegenerateResidue {
                pole_index: i,
                reason: "eigenvalue gap below threshold".into(),
            });
        }
        Ok(mark)
    }

    /// Partial-fraction view over the finite poles.
    pub fn connection(&self) -> RationalConnection<T> {
        let parts = self.finite_parts();
        let xs: Vec<_> = parts.iter().map(|(x, _)| *x).collect();
        let bs: Vec<_> = parts.iter().map(|(_, b)| *b).collect();
        RationalConnection::from_residues(&xs, &bs)
    }

    /// Apply a rational gauge. The result must again be Fuchsian with
    /// simple poles; otherwise the higher-order data is reported as an
    /// error carrying the leading matrix.
    ///
    /// Markings at surviving poles are carried over by eigenvalue
    /// continuity (nearest eigenvalue to the previous marked one).
    pub fn apply_gauge(&self, g: &GaugeMap<T>, convention: GaugeConvention) -> Result<Self> {
        let conn = gauge_transform(&self.connection(), g, convention)?;
        self.from_connection(conn)
    }

    /// Rebuild a marked system from partial-fraction data, carrying over
    /// markings by eigenvalue continuity. Fails on non-simple poles.
    pub fn from_connection(&self, conn: RationalConnection<T>) -> Result<Self> {
        let scale = T::one() + conn.magnitude();
        if !conn.is_fuchsian(self.tol.alg * scale) {
            let report = higher_order_report(&conn);
            return Err(report);
        }

        // New finite pole set; reuse old sphere-point ordering where
        // locations survive, then append any new finite poles.
        let mut points: Vec<SpherePoint<T>> = Vec::new();
        let mut residues: Vec<Mat2<T>> = Vec::new();
        let mut prefs: Vec<Option<Complex<T>>> = Vec::new();
        let sep = re::<T>(1e-9);

        for (old_pt, old_mark) in self.divisor.points.iter().zip(self.marking.iter()) {
            match old_pt {
                SpherePoint::Finite(x) => {
                    if let Some((_, parts)) = conn.poles.iter().find(|(p, _)| (*p - *x).norm() < sep)
                    {
                        points.push(*old_pt);
                        residues.push(parts[0]);
                        prefs.push(Some(old_mark.value));
                    }
                    // dropped poles (zero residue) simply disappear
                }
                SpherePoint::Infinity => {
                    points.push(SpherePoint::Infinity);
                    residues.push(Mat2::zero()); // placeholder, fixed below
                    prefs.push(Some(old_mark.value));
                }
            }
        }
        for (p, parts) in &conn.poles {
            let known = points.iter().any(|q| match q {
                SpherePoint::Finite(x) => (*x - *p).norm() < sep,
                SpherePoint::Infinity => false,
            });
            if !known {
                points.push(SpherePoint::Finite(*p));
                residues.push(parts[0]);
                prefs.push(None);
            }
        }
        // Fix up the infinity residue from the zero-sum constraint.
        if let Some(k) = points.iter().position(|p| p.is_infinity()) {
            let mut s = Mat2::zero();
            for (i, b) in residues.iter().enumerate() {
                if i != k {
                    s = s + *b;
                }
            }
            residues[k] = -s;
        }

        let divisor = PoleDivisor::new_unchecked(points);
        let mut marking = Vec::with_capacity(residues.len());
        for (i, b) in residues.iter().enumerate() {
            marking.push(mark_residue(b, prefs[i], i, re(1e-9))?);
        }
        Ok(FuchsianSystem {
            divisor,
            residues,
            gauge: self.gauge,
            marking,
            tol: self.tol,
        })
    }

    /// Add a scalar 1-form sum_k c_k dz/(z - x_k) (as c_k * Id residues).
    /// Poles must be existing poles of the system.
    pub fn add_scalar_form(&self, terms: &[(usize, Complex<T>)]) -> Result<Self> {
        let mut out = self.clone();
        for (idx, c) in terms {
            if *idx >= self.n() {
                return Err(Error::IndexOutOfRange {
                    index: *idx,
                    n: self.n(),
                });
            }
            out.residues[*idx] = out.residues[*idx] + Mat2::scalar(*c);
        }
        // Re-mark with continuity on the shifted eigenvalues.
        for (i, b) in out.residues.iter().enumerate() {
            let prefer = {
                let shift: Complex<T> = terms
                    .iter()
                    .filter(|(k, _)| *k == i)
                    .map(|(_, c)| *c)
                    .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
                Some(self.marking[i].value + shift)
            };
            out.marking[i] = mark_residue(b, prefer, i, re(1e-9))?;
        }
        Ok(out)
    }

    /// Flip the marking at pole i (sigma^i). Matrices are untouched.
    pub fn flip_marking(&self, i: usize) -> Result<Self> {
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        let mut out = self.clone();
        out.marking[i] = out.marking[i].flipped();
        Ok(out)
    }

    /// Swap poles i and j in the ordered lists (the permutation (i j)).
    /// B(z) as a function is unchanged.
    pub fn swap_poles(&self, i: usize, j: usize) -> Result<Self> {
        if i >= self.n() || j >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: i.max(j),
                n: self.n(),
            });
        }
        let mut out = self.clone();
        out.divisor.points.swap(i, j);
        out.residues.swap(i, j);
        out.marking.swap(i, j);
        Ok(out)
    }

    /// Conjugate every residue by a constant gauge.
    pub fn conjugate(&self, g: &Mat2<T>) -> Result<Self> {
        let ginv = g
            .inverse()
            .ok_or_else(|| Error::InvalidInput("conjugating matrix not invertible".into()))?;
        let mut out = self.clone();
        for (i, b) in self.residues.iter().enumerate() {
            out.residues[i] = *g * *b * ginv;
            out.marking[i] = mark_residue(&out.residues[i], Some(self.marking[i].value), i, re(1e-9))?;
        }
        Ok(out)
    }

    /// Check `sum eps_i lambda_i not in Z` over all sign vectors.
    pub fn eigenvalue_condition(&self) -> bool {
        eigenvalue_condition(&self.lambda(), self.tol.alg)
    }

    /// Mobius-normalize: send the poles at (i0, i1, i2) to (0, 1, infinity).
    /// Residues of a 1-form are coordinate-free, so matrices are unchanged;
    /// only the pole locations move.
    pub fn moebius_normalize(&self, i0: usize, i1: usize, i2: usize) -> Result<Self> {
        let n = self.n();
        if i0 >= n || i1 >= n || i2 >= n || i0 == i1 || i1 == i2 || i0 == i2 {
            return Err(Error::InvalidInput("need three distinct pole indices".into()));
        }
        let map = MoebiusMap::sending_to_standard(
            self.divisor.points[i0],
            self.divisor.points[i1],
            self.divisor.points[i2],
        )?;
        let mut points = Vec::with_capacity(n);
        for p in &self.divisor.points {
            points.push(map.apply(*p));
        }
        let divisor = PoleDivisor::new_unchecked(points);
        divisor.check_separation(re(1e-12))?;
        let mut out = self.clone();
        out.divisor = divisor;
        Ok(out)
    }
}

fn magnitude<T: Real>(residues: &[Mat2<T>]) -> T {
    let mut best = T::zero();
    for b in residues {
        if b.norm_inf() > best {
            best = b.norm_inf();
        }
    }
    best
}

/// Convert a non-Fuchsian connection into a structured error.
pub fn higher_order_report<T: Real>(conn: &RationalConnection<T>) -> Error {
    for (x, parts) in &conn.poles {
        if parts.len() > 1 {
            return Error::HigherOrderPole {
                location: format!("{:?}", x),
                order: parts.len(),
                leading_norm: parts[parts.len() - 1].norm_inf().to_f64().unwrap_or(0.0),
            };
        }
    }
    Error::HigherOrderPole {
        location: "infinity".into(),
        order: 2,
        leading_norm: conn
            .poly
            .first()
            .map(|c| c.norm_inf().to_f64().unwrap_or(0.0))
            .unwrap_or(0.0),
    }
}

/// The irreducibility condition sum eps_i lambda_i not in Z for all sign
/// vectors eps in {+-1}^n.
pub fn eigenvalue_condition<T: Real>(lambdas: &[Complex<T>], tol: T) -> bool {
    let n = lambdas.len();
    for mask in 0..(1u64 << n) {
        let mut s = Complex::new(T::zero(), T::zero());
        for (i, l) in lambdas.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = s - *l;
            } else {
                s = s + *l;
            }
        }
        let integral = s.im.abs() <= tol && crate::scalar::dist_to_integer(s.re) <= tol;
        if integral {
            return false;
        }
    }
    true
}

/// A Mobius map w = (a z + b)/(c z + d) acting on sphere points.
#[derive(Clone, Copy, Debug)]
pub struct MoebiusMap<T: Real> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Real> MoebiusMap<T> {
    /// The map sending (p0, p1, p2) to (0, 1, infinity).
    pub fn sending_to_standard(
        p0: SpherePoint<T>,
        p1: SpherePoint<T>,
        p2: SpherePoint<T>,
    ) -> Result<Self> {
        let one = Complex::new(T::one(), T::zero());
        let zero = Complex::new(T::zero(), T::zero());
        // Cross ratio (z - p0)(p1 - p2) / ((z - p2)(p1 - p0)), with the usual
        // degenerations when one of the three points is infinity.
        let m = match (p0, p1, p2) {
            (SpherePoint::Finite(q0), SpherePoint::Finite(q1), SpherePoint::Finite(q2)) => {
                let k = q1 - q2;
                let l = q1 - q0;
                // w = (z - q0) k / ((z - q2) l)
                MoebiusMap {
                    a: k,
                    b: -q0 * k,
                    c: l,
                    d: -q2 * l,
                }
            }
            (SpherePoint::Infinity, SpherePoint::Finite(q1), SpherePoint::Finite(q2)) => {
                // w = (q1 - q2)/(z - q2)
                MoebiusMap {
                    a: zero,
                    b: q1 - q2,
                    c: one,
                    d: -q2,
                }
            }
            (SpherePoint::Finite(q0), SpherePoint::Infinity, SpherePoint::Finite(q2)) => {
                // w = (z - q0)/(z - q2)
                MoebiusMap {
                    a: one,
                    b: -q0,
                    c: one,
                    d: -q2,
                }
            }
            (SpherePoint::Finite(q0), SpherePoint::Finite(q1), SpherePoint::Infinity) => {
                // w = (z - q0)/(q1 - q0)
                let l = q1 - q0;
                MoebiusMap {
                    a: one / l,
                    b: -q0 / l,
                    c: zero,
                    d: one,
                }
            }
            _ => {
                return Err(Error::InvalidInput(
                    "two of the three anchor points coincide at infinity".into(),
                ))
            }
        };
        Ok(m)
    }

    pub fn apply(&self, p: SpherePoint<T>) -> SpherePoint<T> {
        match p {
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() < re(1e-14) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a * z + self.b) / den)
                }
            }
            SpherePoint::Infinity => {
                if self.c.norm() < re(1e-14) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use num_complex::Complex64;

    type C = Complex64;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    pub fn diag_system(lambdas: &[f64], xs: &[f64]) -> FuchsianSystem<f64> {
        // Builds an sl2 system with diagonal residues diag(l_i, -l_i) at the
        // given finite poles plus the balancing pole at infinity.
        let mut points: Vec<SpherePoint<f64>> =
            xs.iter().map(|x| SpherePoint::Finite(c(*x, 0.0))).collect();
        let mut residues: Vec<Mat2<f64>> = lambdas
            .iter()
            .map(|l| Mat2::diag(c(*l, 0.0), c(-*l, 0.0)))
            .collect();
        points.push(SpherePoint::Infinity);
        let mut s = Mat2::zero();
        for b in &residues {
            s = s + *b;
        }
        residues.push(-s);
        FuchsianSystem::new(PoleDivisor::new_unchecked(points), residues, GaugeClass::Sl2, None)
            .unwrap()
    }

    #[test]
    fn evaluate_single_pole() {
        // single pole at 0, B_0 = diag(l, -l): B(2) = diag(l/2, -l/2)
        let l = 0.7;
        let b0 = Mat2::diag(c(l, 0.0), c(-l, 0.0));
        let sys = FuchsianSystem::new(
            PoleDivisor::new_unchecked(vec![SpherePoint::Finite(c(0.0, 0.0)), SpherePoint::Infinity]),
            vec![b0, -b0],
            GaugeClass::Sl2,
            None,
        )
        .unwrap();
        let v = sys.evaluate(c(2.0, 0.0)).unwrap();
        assert!((v - Mat2::diag(c(l / 2.0, 0.0), c(-l / 2.0, 0.0))).norm_inf() < 1e-15);
    }

    #[test]
    fn evaluate_symmetric_pair() {
        // poles {0, 1}, B_1 = -B_0: B(1/2) = B_0 (1/(1/2) - 1/(-1/2)) = 4 B_0
        let b0 = Mat2::new(c(0.2, 0.1), c(1.0, 0.0), c(0.3, -0.2), c(-0.2, -0.1));
        let sys = FuchsianSystem::new(
            PoleDivisor::new_unchecked(vec![
                SpherePoint::Finite(c(0.0, 0.0)),
                SpherePoint::Finite(c(1.0, 0.0)),
            ]),
            vec![b0, -b0],
            GaugeClass::Sl2,
            None,
        )
        .unwrap();
        let v = sys.evaluate(c(0.5, 0.0)).unwrap();
        assert!((v - b0 * c(4.0, 0.0)).norm_inf() < 1e-13);
    }

    #[test]
    fn evaluation_at_pole_rejected() {
        let sys = diag_system(&[0.3, 0.2, 0.25], &[0.0, 1.0, -1.0]);
        let err = sys.evaluate(c(1.0, 1e-12)).unwrap_err();
        assert!(matches!(err, Error::EvaluationAtPole { .. }));
    }

    #[test]
    fn eigen_data_diag_and_symmetric() {
        let sys = diag_system(&[3.0, 0.2, 0.25], &[0.0, 1.0, -1.0]);
        let m = sys.eigen_data(0).unwrap();
        assert!((m.value - c(3.0, 0.0)).norm() < 1e-14);
        let e1 = Direction::new(c(1.0, 0.0), c(0.0, 0.0));
        let e2 = Direction::new(c(0.0, 0.0), c(1.0, 0.0));
        assert!(m.line.distance(&e1) < 1e-12);
        assert!(m.other_line.distance(&e2) < 1e-12);

        // B = [[0,1],[1,0]], marked eigenvalue 1 -> lines (1:1), (1:-1)
        let b = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let mk = mark_residue(&b, Some(c(1.0, 0.0)), 0, 1e-9).unwrap();
        assert!((mk.value - c(1.0, 0.0)).norm() < 1e-14);
        assert!(mk.line.distance(&Direction::new(c(1.0, 0.0), c(1.0, 0.0))) < 1e-12);
        assert!(mk
            .other_line
            .distance(&Direction::new(c(1.0, 0.0), c(-1.0, 0.0)))
            < 1e-12);
    }

    #[test]
    fn eigenlines_transform_under_conjugation() {
        let sys = diag_system(&[0.4, 0.3, 0.27], &[0.0, 1.0, 2.0]);
        let g = Mat2::new(c(1.0, 0.2), c(0.4, -0.3), c(-0.2, 0.1), c(0.9, 0.0));
        let conj = sys.conjugate(&g).unwrap();
        for i in 0..3 {
            // values invariant
            assert!((conj.marking[i].value - sys.marking[i].value).norm() < 1e-10);
            // lines transform by g
            let moved = sys.marking[i].line.apply(&g);
            assert!(conj.marking[i].line.distance(&moved) < 1e-10);
        }
    }

    #[test]
    fn eigenvalue_condition_examples() {
        let tol = 1e-12;
        let l1 = vec![cx::<f64>(0.25, 0.0), cx(0.25, 0.0), cx(0.25, 0.0)];
        assert!(eigenvalue_condition(&l1, tol));
        let l2 = vec![cx::<f64>(0.5, 0.0), cx(0.5, 0.0), cx(1.0, 0.0)];
        assert!(!eigenvalue_condition(&l2, tol));
        let l3 = vec![cx::<f64>(0.3, 0.1), cx(0.2, 0.0), cx(0.4, 0.0), cx(0.25, 0.0)];
        // brute-force oracle over all 16 sign vectors
        let mut ok = true;
        for mask in 0..16u32 {
            let mut s = c(0.0, 0.0);
            for (i, l) in l3.iter().enumerate() {
                s += if mask & (1 << i) != 0 { -*l } else { *l };
            }
            if s.im.abs() <= tol && (s.re - s.re.round()).abs() <= tol {
                ok = false;
            }
        }
        assert!(ok);
        assert!(eigenvalue_condition(&l3, tol));
    }

    #[test]
    fn constant_gauge_action() {
        let sys = diag_system(&[0.4, 0.3, 0.27], &[0.0, 1.0, 2.0]);
        let g = Mat2::new(c(2.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(1.0, 0.0));
        let out = sys
            .apply_gauge(&GaugeMap::Constant(g), GaugeConvention::Solution)
            .unwrap();
        assert_eq!(out.n(), sys.n());
        let ginv = g.inverse().unwrap();
        for (i, pt) in sys.divisor.points.iter().enumerate() {
            if pt.is_infinity() {
                continue;
            }
            let j = out
                .divisor
                .points
                .iter()
                .position(|q| q.separation(pt) < 1e-9)
                .unwrap();
            assert!((out.residues[j] - g * sys.residues[i] * ginv).norm_inf() < 1e-12);
        }
    }

    #[test]
    fn scalar_twist_changes_traces_by_halves() {
        let sys = diag_system(&[0.4, 0.3, 0.27], &[0.0, 1.0, 2.0]);
        let tw = sys
            .add_scalar_form(&[(0, c(-0.5, 0.0)), (1, c(0.5, 0.0))])
            .unwrap();
        assert!((tw.residues[0].trace() - c(-1.0, 0.0)).norm() < 1e-13);
        assert!((tw.residues[1].trace() - c(1.0, 0.0)).norm() < 1e-13);
        assert!(tw.residues[2].trace().norm() < 1e-13);
        // marked eigenvalue tracked the shift
        assert!((tw.marking[0].value - c(0.4 - 0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn moebius_normalize_moves_poles_keeps_residues() {
        let sys = diag_system(&[0.4, 0.3, 0.27], &[0.3, 1.7, -0.9]);
        let out = sys.moebius_normalize(0, 1, 2).unwrap();
        assert!(out.divisor.points[0].separation(&SpherePoint::Finite(c(0.0, 0.0))) < 1e-12);
        assert!(out.divisor.points[1].separation(&SpherePoint::Finite(c(1.0, 0.0))) < 1e-12);
        assert!(out.divisor.points[2].is_infinity() || out.divisor.points[2].finite().is_none());
        for i in 0..sys.n() {
            assert!((out.residues[i] - sys.residues[i]).norm_inf() < 1e-15);
        }
    }

    #[test]
    fn contour_integral_recovers_residues() {
        // trapezoidal contour oracle on a small circle around each pole
        let sys = diag_system(&[0.4, 0.3, 0.27, 0.19], &[0.0, 1.0, -1.0, 2.5]);
        let parts = sys.finite_parts();
        for (k, (x, b)) in parts.iter().enumerate() {
            let mut rmin = f64::INFINITY;
            for (j, (y, _)) in parts.iter().enumerate() {
                if j != k {
                    rmin = rmin.min((x - y).norm());
                }
            }
            let r = rmin / 3.0;
            let n = 256;
            // (1/2 pi i) of the contour integral reduces to an average of
            // B(z) (z - x) over the circle.
            let mut acc = Mat2::zero();
            for s in 0..n {
                let th = 2.0 * std::f64::consts::PI * (s as f64) / (n as f64);
                let offset = c(r * th.cos(), r * th.sin());
                acc = acc + sys.evaluate(x + offset).unwrap() * offset;
            }
            let residue = acc * c(1.0 / (n as f64), 0.0);
            assert!(
                (residue - *b).norm_inf() < 1e-8,
                "pole {k}: contour residue error {:.3e}",
                (residue - *b).norm_inf()
            );
        }
    }
}
