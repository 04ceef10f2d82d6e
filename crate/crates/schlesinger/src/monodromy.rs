//! Numerical monodromy of dY = B(z) Y dz along keyhole loops, and
//! projective comparison of monodromy representations.
//!
//! Loops run from a common base point: a straight approach (with detours
//! pushed around intervening poles), one full counterclockwise circle, and
//! the approach reversed. Monodromy matrices act on the right, so a loop
//! concatenation gamma_1 then gamma_2 has matrix M_2 M_1; the plan orders
//! loops so that the full product is the monodromy of a contractible loop.

use crate::error::{Error, Result};
use crate::fuchsian::FuchsianSystem;
use crate::mat2::{solve4, Mat2};
use crate::ode::{integrate, OdeOptions, OdeStats};
use crate::scalar::{re, Real};
use num_complex::Complex;

/// One path piece.
#[derive(Clone, Copy, Debug)]
pub enum PathSeg<T: Real> {
    Line {
        from: Complex<T>,
        to: Complex<T>,
    },
    /// Circular arc around `center` from angle `theta0` to `theta1`
    /// (counterclockwise when theta1 > theta0).
    Arc {
        center: Complex<T>,
        radius: T,
        theta0: T,
        theta1: T,
    },
}

impl<T: Real> PathSeg<T> {
    pub fn at(&self, s: T) -> (Complex<T>, Complex<T>) {
        match self {
            PathSeg::Line { from, to } => (*from + (*to - *from) * s, *to - *from),
            PathSeg::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                let th = *theta0 + (*theta1 - *theta0) * s;
                let dir = Complex::new(T::zero(), *theta1 - *theta0);
                let point = *center + Complex::from_polar(*radius, th);
                let vel = Complex::from_polar(*radius, th) * dir;
                (point, vel)
            }
        }
    }

    fn min_distance_to(&self, p: Complex<T>) -> T {
        match self {
            PathSeg::Line { from, to } => {
                let d = *to - *from;
                let len2 = d.norm_sqr();
                if len2 == T::zero() {
                    return (p - *from).norm();
                }
                // orthogonal projection parameter, clamped to [0, 1]
                let t = ((p - *from) * d.conj()).re / len2;
                let t = t.max(T::zero()).min(T::one());
                (p - (*from + d * t)).norm()
            }
            PathSeg::Arc { center, radius, .. } => {
                // conservative: radial gap (exact for full circles)
                ((p - *center).norm() - *radius).abs()
            }
        }
    }
}

/// Loop plan: base point, loop order, per-pole radii.
#[derive(Clone, Debug)]
pub struct LoopPlan<T: Real> {
    pub base: Complex<T>,
    /// Pole indices (into the system's finite pole list) in composition
    /// order: the first entry is traversed first.
    pub order: Vec<usize>,
    pub radii: Vec<T>,
}

/// A monodromy representation: one matrix per planned loop.
#[derive(Clone, Debug)]
pub struct MonodromyRep<T: Real> {
    pub matrices: Vec<Mat2<T>>,
    /// Pole index each matrix belongs to, mirroring the plan order.
    pub pole_indices: Vec<usize>,
    pub stats: OdeStats,
    /// Worst determinant drift against the closed form, a cheap online
    /// sanity check on the integration.
    pub det_drift: f64,
}

impl<T: Real> MonodromyRep<T> {
    /// Product in composition order: M_n ... M_1.
    pub fn product(&self) -> Mat2<T> {
        let mut acc = Mat2::identity();
        for m in &self.matrices {
            acc = *m * acc;
        }
        acc
    }

    /// Matrix for a given pole index.
    pub fn matrix_for_pole(&self, pole: usize) -> Option<&Mat2<T>> {
        self.pole_indices
            .iter()
            .position(|p| *p == pole)
            .map(|i| &self.matrices[i])
    }
}

/// Build the default keyhole plan: base point outside the pole cloud,
/// radii one third of the nearest-neighbour distance, loops ordered by
/// the angle of each pole as seen from the base point (clockwise sweep),
/// which makes the full product contractible around infinity.
pub fn default_plan<T: Real>(
    system: &FuchsianSystem<T>,
    base_override: Option<Complex<T>>,
    radius_scale: Option<T>,
) -> Result<LoopPlan<T>> {
    let poles: Vec<Complex<T>> = system.finite_parts().iter().map(|(x, _)| *x).collect();
    if poles.is_empty() {
        return Err(Error::InvalidInput("no finite poles to encircle".into()));
    }
    let n = poles.len();
    let mut centroid = Complex::new(T::zero(), T::zero());
    for p in &poles {
        centroid = centroid + *p;
    }
    centroid = centroid / Complex::new(T::from_usize(n).unwrap(), T::zero());
    let spread = poles
        .iter()
        .map(|p| (*p - centroid).norm())
        .fold(T::zero(), |a, b| a.max(b))
        .max(T::one());
    let base = base_override.unwrap_or_else(|| {
        centroid + Complex::from_polar(spread * re::<T>(2.4), re::<T>(0.37))
    });
    let scale = radius_scale.unwrap_or_else(|| re(1.0 / 3.0));
    let mut radii = Vec::with_capacity(n);
    for (i, p) in poles.iter().enumerate() {
        let mut nearest = T::infinity();
        for (j, q) in poles.iter().enumerate() {
            if i != j {
                nearest = nearest.min((*p - *q).norm());
            }
        }
        nearest = nearest.min((*p - base).norm());
        radii.push(nearest * scale);
    }
    // Order by ascending angle from the base point. With monodromy acting
    // on the right (concatenation gamma_1 then gamma_2 has matrix M_2 M_1),
    // this makes the plan-order product M_n ... M_1 homotopic to one
    // counterclockwise circle around all poles; verified against a direct
    // big-circle integration.
    let mut order: Vec<usize> = (0..n).collect();
    let angle = |i: usize| -> f64 {
        let d = poles[i] - base;
        d.im.to_f64().unwrap().atan2(d.re.to_f64().unwrap())
    };
    order.sort_by(|a, b| angle(*a).partial_cmp(&angle(*b)).unwrap());
    Ok(LoopPlan { base, order, radii })
}

/// Straight segments from `from` to `to`, recursively detoured around any
/// pole that comes closer than its clearance.
fn safe_segments<T: Real>(
    from: Complex<T>,
    to: Complex<T>,
    obstacles: &[(Complex<T>, T)],
    depth: usize,
) -> Vec<PathSeg<T>> {
    let seg = PathSeg::Line { from, to };
    let mut worst: Option<(usize, T)> = None;
    for (i, (p, clear)) in obstacles.iter().enumerate() {
        let d = seg.min_distance_to(*p);
        if d < *clear {
            let deficit = *clear - d;
            if worst.map(|(_, w)| deficit > w).unwrap_or(true) {
                worst = Some((i, deficit));
            }
        }
    }
    let Some((idx, _)) = worst else {
        return vec![seg];
    };
    if depth == 0 {
        return vec![seg];
    }
    let (p, clear) = obstacles[idx];
    // push a waypoint radially away from the offending pole
    let d = to - from;
    let len2 = d.norm_sqr();
    let t = (((p - from) * d.conj()).re / len2)
        .max(re(0.1))
        .min(re(0.9));
    let near = from + d * t;
    let mut dir = near - p;
    if dir.norm() < re(1e-12) {
        dir = Complex::new(-d.im, d.re); // perpendicular
    }
    let waypoint = p + dir / Complex::new(dir.norm(), T::zero()) * (clear * re::<T>(2.2));
    let mut out = safe_segments(from, waypoint, obstacles, depth - 1);
    out.extend(safe_segments(waypoint, to, obstacles, depth - 1));
    out
}

/// The keyhole path for one pole: approach, full circle, return.
pub fn loop_path<T: Real>(
    system: &FuchsianSystem<T>,
    plan: &LoopPlan<T>,
    pole: usize,
) -> Result<Vec<PathSeg<T>>> {
    let poles: Vec<Complex<T>> = system.finite_parts().iter().map(|(x, _)| *x).collect();
    let x = poles
        .get(pole)
        .copied()
        .ok_or(Error::IndexOutOfRange {
            index: pole,
            n: poles.len(),
        })?;
    let r = plan.radii[pole];
    let dir = plan.base - x;
    let theta = dir.im.to_f64().unwrap().atan2(dir.re.to_f64().unwrap());
    let theta = T::from_f64(theta).unwrap();
    let approach = x + Complex::from_polar(r, theta);
    // all OTHER poles are obstacles with half their own radius as clearance
    let obstacles: Vec<(Complex<T>, T)> = poles
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pole)
        .map(|(i, p)| (*p, plan.radii[i] * re::<T>(0.9)))
        .collect();
    let mut segs = safe_segments(plan.base, approach, &obstacles, 8);
    let tau = re::<T>(std::f64::consts::TAU);
    segs.push(PathSeg::Arc {
        center: x,
        radius: r,
        theta0: theta,
        theta1: theta + tau,
    });
    let mut back = safe_segments(approach, plan.base, &obstacles, 8);
    segs.append(&mut back);
    Ok(segs)
}

/// Result of integrating a fundamental solution along a path.
#[derive(Clone, Debug)]
pub struct Transport<T: Real> {
    pub matrix: Mat2<T>,
    pub stats: OdeStats,
    /// |det Y - det Y0 exp(int tr B dz)| at the endpoint.
    pub det_drift: f64,
}

/// Integrate dY = B(z) Y dz along the path starting from Y0, tracking the
/// determinant against exp(int tr B dz) as an online sanity check.
pub fn integrate_along<T: Real>(
    system: &FuchsianSystem<T>,
    path: &[PathSeg<T>],
    y0: Mat2<T>,
    tol: T,
) -> Result<Transport<T>> {
    // clearance precheck
    let margin = re::<T>(1e-6);
    for (i, (x, _)) in system.finite_parts().iter().enumerate() {
        for seg in path {
            let d = seg.min_distance_to(*x);
            if d < margin {
                return Err(Error::PathTooClose {
                    pole: format!("pole {i}"),
                    distance: d.to_f64().unwrap_or(0.0),
                });
            }
        }
    }
    if y0.det().norm() == T::zero() {
        return Err(Error::InvalidInput("initial frame not invertible".into()));
    }

    let opts = OdeOptions {
        tol,
        ..OdeOptions::default()
    };
    let mut y = y0;
    let mut logdet = Complex::new(T::zero(), T::zero());
    let mut stats = OdeStats::default();
    for seg in path {
        let rhs = |s: T, state: &(Mat2<T>, Complex<T>)| {
            let (z, vel) = seg.at(s);
            let b = system
                .evaluate(z)
                .expect("path clearance was prechecked");
            let dy = b * state.0 * vel;
            let dld = b.trace() * vel;
            (dy, dld)
        };
        let (out, st) = integrate(rhs, (y, logdet), &opts)?;
        y = out.0;
        logdet = out.1;
        stats.steps += st.steps;
        stats.rejected += st.rejected;
        stats.max_error = stats.max_error.max(st.max_error);
    }
    let det_expect = y0.det() * logdet.exp();
    let det_drift = (y.det() - det_expect).norm().to_f64().unwrap_or(f64::NAN);
    Ok(Transport {
        matrix: y,
        stats,
        det_drift,
    })
}

/// Monodromy matrices for every loop in the plan.
pub fn monodromy<T: Real>(
    system: &FuchsianSystem<T>,
    plan: &LoopPlan<T>,
    tol: T,
) -> Result<MonodromyRep<T>> {
    let mut matrices = Vec::with_capacity(plan.order.len());
    let mut stats = OdeStats::default();
    let mut det_drift = 0.0f64;
    for &k in &plan.order {
        let path = loop_path(system, plan, k)?;
        let t = integrate_along(system, &path, Mat2::identity(), tol)?;
        matrices.push(t.matrix);
        stats.steps += t.stats.steps;
        stats.rejected += t.stats.rejected;
        stats.max_error = stats.max_error.max(t.stats.max_error);
        det_drift = det_drift.max(t.det_drift);
    }
    Ok(MonodromyRep {
        matrices,
        pole_indices: plan.order.clone(),
        stats,
        det_drift,
    })
}

/// Result of the projective comparison M'_k = s_k C M_k C^{-1}.
#[derive(Clone, Debug)]
pub struct ProjectiveMatch<T: Real> {
    pub conjugator: Mat2<T>,
    /// Sign per compared matrix, in the order given.
    pub signs: Vec<i8>,
    /// Normalized least-squares residual of the best sign pattern.
    pub residual: f64,
    let_priv: std::marker::PhantomData<T>,
}

/// Find the best conjugator and sign pattern relating two representations.
/// Signs other than +1 are only tried at the designated positions.
pub fn compare_projective<T: Real>(
    rep1: &[Mat2<T>],
    rep2: &[Mat2<T>],
    designated: &[usize],
) -> Result<ProjectiveMatch<T>> {
    if rep1.len() != rep2.len() || rep1.is_empty() {
        return Err(Error::InvalidInput(
            "representations must have equal nonzero length".into(),
        ));
    }
    if is_reducible(rep1) || is_reducible(rep2) {
        return Err(Error::ReducibleRepresentation);
    }
    let m = rep1.len();
    let patterns = sign_patterns(m, designated);
    let mut best: Option<ProjectiveMatch<T>> = None;
    for signs in patterns {
        let (c, residual) = best_conjugator(rep1, rep2, &signs);
        let better = best
            .as_ref()
            .map(|b| residual < b.residual)
            .unwrap_or(true);
        if better {
            best = Some(ProjectiveMatch {
                conjugator: c,
                signs,
                residual,
                let_priv: std::marker::PhantomData,
            });
        }
    }
    Ok(best.unwrap())
}

fn sign_patterns(m: usize, designated: &[usize]) -> Vec<Vec<i8>> {
    let mut out = vec![vec![1i8; m]];
    let d: Vec<usize> = designated.iter().copied().filter(|i| *i < m).collect();
    for mask in 1..(1u32 << d.len()) {
        let mut p = vec![1i8; m];
        for (bit, idx) in d.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                p[*idx] = -1;
            }
        }
        out.push(p);
    }
    out
}

/// Least-squares conjugator for a fixed sign pattern: minimize
/// sum_k ||C M_k - s_k M'_k C||_F^2 over ||C||_F = 1 via the smallest
/// eigenvector of the 4x4 normal matrix (inverse iteration).
fn best_conjugator<T: Real>(rep1: &[Mat2<T>], rep2: &[Mat2<T>], signs: &[i8]) -> (Mat2<T>, f64) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut h = [[zero; 4]; 4];
    let mut scale = T::zero();
    for ((m1, m2), s) in rep1.iter().zip(rep2.iter()).zip(signs.iter()) {
        // vec(C) row-major; A[(r,c),(i,j)] coefficients of C_{ij} in
        // (C M1 - s M2 C)_{rc}
        let sgn = Complex::new(T::from_i8(*s).unwrap(), T::zero());
        let mut a = [[zero; 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                let row = 2 * r + c;
                // (C M1)_{rc} = sum_m C_{rm} (M1)_{mc}
                for mm in 0..2 {
                    a[row][2 * r + mm] = a[row][2 * r + mm] + m1.m[mm][c];
                }
                // -(s M2 C)_{rc} = -s sum_m (M2)_{rm} C_{mc}
                for mm in 0..2 {
                    a[row][2 * mm + c] = a[row][2 * mm + c] - sgn * m2.m[r][mm];
                }
            }
        }
        // H += A^H A
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = zero;
                for k in 0..4 {
                    acc = acc + a[k][i].conj() * a[k][j];
                }
                h[i][j] = h[i][j] + acc;
            }
        }
        scale = scale + m1.norm_fro() * m1.norm_fro();
    }
    // smallest eigenvector by inverse iteration on H + sigma I
    let trace_h: T = (0..4).map(|i| h[i][i].re).fold(T::zero(), |a, b| a + b);
    let sigma = trace_h * re::<T>(1e-14) + re::<T>(1e-300);
    let mut x = [
        Complex::new(T::one(), T::zero()),
        Complex::new(re::<T>(0.4), re::<T>(0.2)),
        Complex::new(re::<T>(-0.3), re::<T>(0.6)),
        Complex::new(re::<T>(0.1), re::<T>(-0.8)),
    ];
    for _ in 0..40 {
        let mut a = h;
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = row[i] + Complex::new(sigma, T::zero());
        }
        let mut b = x;
        match solve4(&mut a, &mut b) {
            Some(sol) => {
                let norm = sol.iter().map(|c| c.norm_sqr()).fold(T::zero(), |p, q| p + q).sqrt();
                if norm == T::zero() || !norm.is_finite() {
                    break;
                }
                for k in 0..4 {
                    x[k] = sol[k] / Complex::new(norm, T::zero());
                }
            }
            None => break,
        }
    }
    // Rayleigh quotient = residual^2
    let mut hx = [zero; 4];
    for i in 0..4 {
        for j in 0..4 {
            hx[i] = hx[i] + h[i][j] * x[j];
        }
    }
    let rq: T = (0..4)
        .map(|i| (x[i].conj() * hx[i]).re)
        .fold(T::zero(), |a, b| a + b);
    let resid = rq.max(T::zero()).sqrt() / scale.sqrt().max(re(1e-300));
    let c = Mat2::new(x[0], x[1], x[2], x[3]);
    (c, resid.to_f64().unwrap_or(f64::NAN))
}

/// A representation is reducible when all matrices share an eigenvector.
fn is_reducible<T: Real>(rep: &[Mat2<T>]) -> bool {
    let tol = re::<T>(1e-8);
    let candidates: Vec<[Complex<T>; 2]> = rep
        .iter()
        .flat_map(|m| {
            let evs = m.eigenvalues();
            evs.iter()
                .filter_map(|mu| m.eigenvector_for(*mu))
                .collect::<Vec<_>>()
        })
        .collect();
    'outer: for v in candidates {
        for m in rep {
            let w = m.mul_vec(v);
            // invariance: w parallel to v
            let cross = (w[0] * v[1] - w[1] * v[0]).norm();
            let scale = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt().max(re(1e-30));
            if cross / scale > tol {
                continue 'outer;
            }
        }
        return true;
    }
    false
}

/// Maximum pairwise projective drift (all signs +1) between consecutive
/// snapshots of a monodromy representation.
pub fn isomonodromy_drift<T: Real>(snapshots: &[MonodromyRep<T>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for pair in snapshots.windows(2) {
        let m = compare_projective(&pair[0].matrices, &pair[1].matrices, &[])?;
        worst = worst.max(m.residual);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::{GaugeClass, PoleDivisor, SpherePoint};
    use num_complex::Complex64;

    type C = Complex64;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn zero_connection_transports_identity() {
        // B identically zero: degenerate residues are representable, the
        // transport is exactly the initial frame.
        let sys = FuchsianSystem::new(
            PoleDivisor::new_unchecked(vec![SpherePoint::Finite(c(10.0, 10.0))]),
            vec![Mat2::zero()],
            GaugeClass::Sl2,
            None,
        )
        .unwrap();
        assert!(sys.eigen_data(0).is_err());
        let y0 = Mat2::new(c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(1.0, 1.0));
        let path = vec![PathSeg::Line {
            from: c(0.0, 0.0),
            to: c(1.0, 2.0),
        }];
        let t = integrate_along(&sys, &path, y0, 1e-12).unwrap();
        assert!((t.matrix - y0).norm_inf() < 1e-13);
    }

    #[test]
    fn zero_residue_loop_is_identity() {
        // a pole with zero residue contributes the identity monodromy
        let l = c(0.21, 0.03);
        let b0 = Mat2::diag(l, -l);
        let sys = FuchsianSystem::new(
            PoleDivisor::new_unchecked(vec![
                SpherePoint::Finite(c(0.0, 0.0)),
                SpherePoint::Finite(c(1.5, 0.0)),
                SpherePoint::Infinity,
            ]),
            vec![b0, Mat2::zero(), -b0],
            GaugeClass::Sl2,
            None,
        )
        .unwrap();
        let path = vec![PathSeg::Arc {
            center: c(1.5, 0.0),
            radius: 0.4,
            theta0: 0.0,
            theta1: std::f64::consts::TAU,
        }];
        let t = integrate_along(&sys, &path, Mat2::identity(), 1e-11).unwrap();
        assert!((t.matrix - Mat2::identity()).norm_inf() < 1e-8);
    }

    #[test]
    fn single_pole_circle_gives_exponential() {
        // B = diag(l, -l)/z around the unit-ish circle:
        // M = diag(e^{2 pi i l}, e^{-2 pi i l})
        let l = c(0.23, 0.11);
        let b0 = Mat2::diag(l, -l);
        let sys = FuchsianSystem::new(
            PoleDivisor::new_unchecked(vec![
                SpherePoint::Finite(c(0.0, 0.0)),
                SpherePoint::Infinity,
            ]),
            vec![b0, -b0],
            GaugeClass::Sl2,
            None,
        )
        .unwrap();
        let path = vec![PathSeg::Arc {
            center: c(0.0, 0.0),
            radius: 0.8,
            theta0: 0.0,
            theta1: std::f64::consts::TAU,
        }];
        let t = integrate_along(&sys, &path, Mat2::identity(), 1e-12).unwrap();
        let tau_i = c(0.0, std::f64::consts::TAU);
        let expect = Mat2::diag((tau_i * l).exp(), (-tau_i * l).exp());
        assert!(
            (t.matrix - expect).norm_inf() < 1e-8,
            "err {:e}",
            (t.matrix - expect).norm_inf()
        );
        assert!(t.det_drift < 1e-9);
    }

    #[test]
    fn reverse_path_returns_start() {
        use crate::sample::random_sl2;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let sys = random_sl2::<f64>(&mut rng, 3);
        let path = vec![PathSeg::Line {
            from: c(4.0, 0.5),
            to: c(3.0, -2.0),
        }];
        let back = vec![PathSeg::Line {
            from: c(3.0, -2.0),
            to: c(4.0, 0.5),
        }];
        let y0 = Mat2::identity();
        let t1 = integrate_along(&sys, &path, y0, 1e-11).unwrap();
        let t2 = integrate_along(&sys, &back, t1.matrix, 1e-11).unwrap();
        assert!((t2.matrix - y0).norm_inf() < 1e-8);
    }

    #[test]
    fn commuting_diagonal_residues_loop() {
        // all residues diagonal: M_k = exp(2 pi i B_k)
        let l1 = c(0.21, 0.0);
        let l2 = c(0.13, 0.05);
        let b1 = Mat2::diag(l1, -l1);
        let b2 = Mat2::diag(l2, -l2);
        let b3 = -(b1 + b2);
        let sys = FuchsianSystem::new(
            PoleDivisor::new_unchecked(vec![
                SpherePoint::Finite(c(0.0, 0.0)),
                SpherePoint::Finite(c(1.0, 0.0)),
                SpherePoint::Finite(c(-0.5, 0.8)),
            ]),
            vec![b1, b2, b3],
            GaugeClass::Sl2,
            None,
        )
        .unwrap();
        let plan = default_plan(&sys, None, None).unwrap();
        let rep = monodromy(&sys, &plan, 1e-11).unwrap();
        let tau_i = c(0.0, std::f64::consts::TAU);
        for (idx, m) in rep.pole_indices.iter().zip(rep.matrices.iter()) {
            let b = sys.residues[*idx];
            let expect = Mat2::diag((tau_i * b.m[0][0]).exp(), (tau_i * b.m[1][1]).exp());
            assert!(
                (*m - expect).norm_inf() < 1e-8,
                "pole {idx}: {:e}",
                (*m - expect).norm_inf()
            );
        }
        // contractible product
        let prod = rep.product();
        assert!((prod - Mat2::identity()).norm_inf() < 1e-7);
    }

    #[test]
    fn loop_product_contractible_noncommuting() {
        use crate::sample::random_sl2;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let sys = random_sl2::<f64>(&mut rng, 4);
        let plan = default_plan(&sys, None, None).unwrap();
        let rep = monodromy(&sys, &plan, 1e-11).unwrap();
        let prod = rep.product();
        assert!(
            (prod - Mat2::identity()).norm_inf() < 1e-6,
            "product drift {:e}",
            (prod - Mat2::identity()).norm_inf()
        );
        // local exponents: tr M_k = 2 cos(2 pi lambda_k)
        for (idx, m) in rep.pole_indices.iter().zip(rep.matrices.iter()) {
            let lam = sys.marking[*idx].value;
            let expect = (c(0.0, std::f64::consts::TAU) * lam).exp()
                + (c(0.0, -std::f64::consts::TAU) * lam).exp();
            assert!(
                (m.trace() - expect).norm() < 1e-6,
                "pole {idx}: trace err {:e}",
                (m.trace() - expect).norm()
            );
        }
        // det M_k = 1 for sl2
        for m in &rep.matrices {
            assert!((m.det() - c(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn projective_comparison_constructed() {
        use crate::sample::random_sl2;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let sys = random_sl2::<f64>(&mut rng, 4);
        let plan = default_plan(&sys, None, None).unwrap();
        let rep = monodromy(&sys, &plan, 1e-11).unwrap();
        let g = Mat2::new(c(1.0, 0.3), c(0.4, -0.2), c(-0.1, 0.6), c(0.9, 0.0));
        let ginv = g.inverse().unwrap();
        // conjugated copy, all signs +1
        let rep2: Vec<Mat2<f64>> = rep.matrices.iter().map(|m| g * *m * ginv).collect();
        let m = compare_projective(&rep.matrices, &rep2, &[]).unwrap();
        assert!(m.residual < 1e-9, "residual {:e}", m.residual);
        assert!(m.signs.iter().all(|s| *s == 1));
        // signs found when two matrices are negated
        let mut rep3 = rep2.clone();
        rep3[0] = -rep3[0];
        rep3[1] = -rep3[1];
        let m = compare_projective(&rep.matrices, &rep3, &[0, 1]).unwrap();
        assert!(m.residual < 1e-9);
        assert_eq!(m.signs[0], -1);
        assert_eq!(m.signs[1], -1);
        assert_eq!(m.signs[2], 1);
    }
}
