//! Seeded random test systems for verification sweeps.

use crate::fuchsian::{FuchsianSystem, GaugeClass, PoleDivisor, SpherePoint};
use crate::mat2::Mat2;
use crate::scalar::Real;
use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
    crate::scalar::cx(re, im)
}

/// Random sl2 system with `n` finite poles whose residues sum to zero
/// (infinity regular). Only n-1 eigenvalues are free; the balancing
/// residue is rejected when too close to degenerate. Eigenvalues are kept
/// away from resonance (2*lambda near an integer) so monodromy trace
/// checks stay clean.
pub fn random_sl2<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> FuchsianSystem<T> {
    loop {
        // Jittered circle: keeps the diameter-to-separation ratio small so
        // the multiplier conjugations stay well conditioned.
        let mut xs: Vec<Complex<T>> = Vec::new();
        let base_rot = rng.gen_range(0.0..std::f64::consts::TAU);
        for k in 0..n {
            let ang = base_rot
                + std::f64::consts::TAU * (k as f64) / (n as f64)
                + rng.gen_range(-0.25..0.25);
            let r = rng.gen_range(1.0..1.4);
            xs.push(c(r * ang.cos(), r * ang.sin()));
        }
        if (0..n).any(|i| {
            (0..i).any(|j| (xs[i] - xs[j]).norm().to_f64().unwrap() < 0.8)
        }) {
            continue;
        }
        let mut residues: Vec<Mat2<T>> = Vec::new();
        let mut total: Mat2<T> = Mat2::zero();
        let mut ok = true;
        for _ in 0..(n - 1) {
            let l: Complex<T> = c(rng.gen_range(0.15..0.35), rng.gen_range(-0.08..0.08));
            // eigenbasis with unit columns and a bounded angle, so the
            // residue norm stays comparable to |lambda|
            let col = |rng: &mut ChaCha8Rng| -> [Complex<T>; 2] {
                let a: Complex<T> = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let b: Complex<T> = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
                [a / norm, b / norm]
            };
            let c0 = col(rng);
            let c1 = col(rng);
            let g: Mat2<T> = Mat2::from_columns(c0, c1);
            if g.det().norm().to_f64().unwrap() < 0.4 {
                ok = false;
                break;
            }
            let b = g * Mat2::diag(l, -l) * g.inverse().unwrap();
            residues.push(b);
            total = total + b;
        }
        if !ok {
            continue;
        }
        let last = -total;
        let [m0, m1] = last.eigenvalues();
        let gap = (m0 - m1).norm().to_f64().unwrap();
        if gap < 0.15 || last.norm_inf().to_f64().unwrap() > 3.0 {
            continue;
        }
        // keep the balancing eigenvalue non-resonant as well
        let lam = gap / 2.0;
        if (2.0 * lam - (2.0 * lam).round()).abs() < 0.06 {
            continue;
        }
        residues.push(last);
        let points = xs.into_iter().map(SpherePoint::Finite).collect();
        let sys = match FuchsianSystem::new(
            PoleDivisor::new_unchecked(points),
            residues,
            GaugeClass::Sl2,
            None,
        ) {
            Ok(s) => s,
            Err(_) => continue,
        };
        if well_conditioned(&sys) {
            return sys;
        }
    }
}

/// Reject samples close to the degenerate locus of the modification
/// operations, where rational-multiplier constants blow up and the 1e-12
/// identity checks drown in roundoff.
fn well_conditioned<T: Real>(sys: &FuchsianSystem<T>) -> bool {
    let n = sys.n();
    let one: Complex<T> = c(1.0, 0.0);
    let two: Complex<T> = c(2.0, 0.0);
    for i in 0..n {
        let Ok(mi) = sys.eigen_data(i) else { return false };
        if mi.line.distance(&mi.other_line).to_f64().unwrap() < 0.3 {
            return false;
        }
        // pair multiplier norm |a| ||P|| against every other pole
        for j in 0..n {
            if i == j {
                continue;
            }
            let Ok(mj) = sys.eigen_data(j) else { return false };
            let w = mj.other_line.annihilator();
            let u = mi.line.v;
            let wu = w[0] * u[0] + w[1] * u[1];
            if wu.norm().to_f64().unwrap() < 1e-6 {
                return false;
            }
            let proj = Mat2::outer(u, w) * (one / wu);
            let (Some(xi), Some(xj)) = (
                sys.divisor.points[i].finite(),
                sys.divisor.points[j].finite(),
            ) else {
                return false;
            };
            let m_norm = proj.norm_inf() * (xj - xi).norm();
            if m_norm.to_f64().unwrap() > 6.0 {
                return false;
            }
        }
        // one-point shift nilpotent norm
        let Some(xi) = sys.divisor.points[i].finite() else { return false };
        let ann = mi.line.annihilator();
        let nrm = ann[0] * mi.other_line.v[0] + ann[1] * mi.other_line.v[1];
        if nrm.norm().to_f64().unwrap() < 1e-6 {
            return false;
        }
        let v = [ann[0] / nrm, ann[1] / nrm];
        let mut c_mat: Mat2<T> = Mat2::zero();
        for (x, b) in sys.finite_parts() {
            if (x - xi).norm() < crate::scalar::re(1e-12) {
                continue;
            }
            c_mat = c_mat + b * (one / (xi - x));
        }
        let cu = c_mat.mul_vec(mi.line.v);
        let vcu = v[0] * cu[0] + v[1] * cu[1];
        if vcu.norm().to_f64().unwrap() < 1e-6 {
            return false;
        }
        let cconst = (two * mi.value + one) / vcu;
        let n_norm = cconst.norm() * Mat2::outer(mi.line.v, v).norm_inf();
        if n_norm.to_f64().unwrap() > 6.0 {
            return false;
        }
    }
    true
}

/// Random gl2 system: an sl2 sample with a scalar shift mixed into each
/// residue (and the balancing pole adjusted), so traces are generic.
pub fn random_gl2<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> FuchsianSystem<T> {
    loop {
        let base: FuchsianSystem<T> = random_sl2(rng, n);
        let mut residues = base.residues.clone();
        let mut total_shift: Complex<T> = c(0.0, 0.0);
        for b in residues.iter_mut().take(n - 1) {
            let s: Complex<T> = c(rng.gen_range(-0.2..0.2), rng.gen_range(-0.05..0.05));
            *b = *b + Mat2::scalar(s);
            total_shift = total_shift + s;
        }
        residues[n - 1] = residues[n - 1] - Mat2::scalar(total_shift);
        let [m0, m1] = residues[n - 1].eigenvalues();
        if (m0 - m1).norm().to_f64().unwrap() < 0.1 {
            continue;
        }
        match FuchsianSystem::new(
            base.divisor.clone(),
            residues,
            GaugeClass::Gl2,
            None,
        ) {
            Ok(s) => return s,
            Err(_) => continue,
        }
    }
}
