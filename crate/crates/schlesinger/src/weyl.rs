//! The affine Weyl group of type C_n as words in generators, acting on
//! eigenvalue vectors (exact half-integer lattice arithmetic) and on
//! Fuchsian systems (marking flips, pole permutations, modifications).
//!
//! Word syntax for the CLI: tokens separated by dots, applied left to
//! right. `s1` flips the sign of coordinate 1, `p12` swaps coordinates
//! 1 and 2, `t12` is the short translation (+1/2, -1/2) on coordinates
//! (1, 2), `l1` adds +1 to coordinate 1. Indices are 1-based in the
//! token syntax and 0-based in the API.

use crate::error::{Error, Result};
use crate::fuchsian::FuchsianSystem;
use crate::modification::{gl2_pair_modify, long_shift, pair_modify, PairSpec};
use crate::scalar::Real;
use num_complex::Complex;

/// A generator of the group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Local Weyl flip at pole i: lambda_i -> -lambda_i.
    Sigma(usize),
    /// Transposition of poles i and j.
    Perm(usize, usize),
    /// Short translation: (+1/2, -1/2) at (i, j).
    Pair(usize, usize),
    /// Long translation: +1 at k.
    Long(usize),
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::Sigma(i) => write!(f, "s{}", i + 1),
            Generator::Perm(i, j) => write!(f, "p{}{}", i + 1, j + 1),
            Generator::Pair(i, j) => write!(f, "t{}{}", i + 1, j + 1),
            Generator::Long(k) => write!(f, "l{}", k + 1),
        }
    }
}

/// A word in the generators, applied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformWord {
    pub generators: Vec<Generator>,
}

impl TransformWord {
    pub fn new(generators: Vec<Generator>) -> Self {
        TransformWord { generators }
    }

    /// Parse the dotted token syntax, e.g. "t12.s1.p23".
    pub fn parse(text: &str) -> Result<Self> {
        let mut generators = Vec::new();
        for token in text.split('.') {
            let token = token.trim();
            if token.is_empty() {
                continue;
            }
            let (kind, rest) = token.split_at(1);
            let digits: Vec<usize> = rest
                .chars()
                .map(|ch| {
                    ch.to_digit(10)
                        .map(|d| d as usize)
                        .ok_or_else(|| Error::InvalidInput(format!("bad word token: {token}")))
                })
                .collect::<Result<_>>()?;
            let gen = match (kind, digits.as_slice()) {
                ("s", [i]) if *i >= 1 => Generator::Sigma(i - 1),
                ("l", [k]) if *k >= 1 => Generator::Long(k - 1),
                ("p", [i, j]) if *i >= 1 && *j >= 1 && i != j => Generator::Perm(i - 1, j - 1),
                ("t", [i, j]) if *i >= 1 && *j >= 1 => Generator::Pair(i - 1, j - 1),
                _ => return Err(Error::InvalidInput(format!("bad word token: {token}"))),
            };
            generators.push(gen);
        }
        Ok(TransformWord { generators })
    }

    pub fn check_bounds(&self, n: usize) -> Result<()> {
        for g in &self.generators {
            let max = match g {
                Generator::Sigma(i) | Generator::Long(i) => *i,
                Generator::Perm(i, j) | Generator::Pair(i, j) => (*i).max(*j),
            };
            if max >= n {
                return Err(Error::IndexOutOfRange { index: max, n });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for TransformWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Exact affine map on the eigenvalue vector: v -> signs * permute(v) + shift/2,
/// with the shift stored in half-integer units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedAffine {
    /// Image index: coordinate i of the output reads coordinate `perm[i]`
    /// of the input.
    pub perm: Vec<usize>,
    /// Sign applied after permuting, per output coordinate.
    pub signs: Vec<i8>,
    /// Added shift in half-integer units, per output coordinate.
    pub half_shift: Vec<i64>,
}

impl SignedAffine {
    pub fn identity(n: usize) -> Self {
        SignedAffine {
            perm: (0..n).collect(),
            signs: vec![1; n],
            half_shift: vec![0; n],
        }
    }

    pub fn of_generator(g: &Generator, n: usize) -> Self {
        let mut a = SignedAffine::identity(n);
        match g {
            Generator::Sigma(i) => a.signs[*i] = -1,
            Generator::Perm(i, j) => a.perm.swap(*i, *j),
            Generator::Pair(i, j) => {
                if i == j {
                    a.half_shift[*i] = 2;
                } else {
                    a.half_shift[*i] = 1;
                    a.half_shift[*j] = -1;
                }
            }
            Generator::Long(k) => a.half_shift[*k] = 2,
        }
        a
    }

    /// `self` after `first` (function composition self . first).
    pub fn compose_after(&self, first: &SignedAffine) -> SignedAffine {
        let n = self.perm.len();
        let mut out = SignedAffine::identity(n);
        for i in 0..n {
            // self reads coordinate self.perm[i]; that coordinate of
            // first's output is signs*input[perm] + shift.
            let mid = self.perm[i];
            out.perm[i] = first.perm[mid];
            out.signs[i] = self.signs[i] * first.signs[mid];
            out.half_shift[i] =
                (self.signs[i] as i64) * first.half_shift[mid] + self.half_shift[i];
        }
        out
    }

    pub fn of_word(word: &TransformWord, n: usize) -> SignedAffine {
        // applied left to right: w = g_k . ... . g_1
        let mut acc = SignedAffine::identity(n);
        for g in &word.generators {
            let step = SignedAffine::of_generator(g, n);
            acc = step.compose_after(&acc);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, p)| i == *p)
            && self.signs.iter().all(|s| *s == 1)
            && self.half_shift.iter().all(|h| *h == 0)
    }

    /// True when the linear part is the identity.
    pub fn is_translation(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, p)| i == *p)
            && self.signs.iter().all(|s| *s == 1)
    }

    pub fn apply<T: Real>(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let half = crate::scalar::re::<T>(0.5);
        (0..self.perm.len())
            .map(|i| {
                let mut x = v[self.perm[i]];
                if self.signs[i] < 0 {
                    x = -x;
                }
                x + Complex::new(T::from_i64(self.half_shift[i]).unwrap() * half, T::zero())
            })
            .collect()
    }

    /// Exact order of the affine map, or None when it is infinite.
    pub fn order(&self) -> Option<u64> {
        let n = self.perm.len();
        // Order of the linear (signed permutation) part first.
        let mut lin = self.clone();
        let mut d = 1u64;
        loop {
            if lin.is_translation() {
                break;
            }
            lin = self.compose_after(&lin);
            d += 1;
            if d > 4_000_000 {
                return None; // unreachable for hyperoctahedral parts
            }
        }
        // self^d is a pure translation; the affine order is finite iff that
        // translation vanishes, and then equals d (compositions of fewer
        // steps are not translations unless they are the identity, checked
        // below for the divisors of d).
        let mut acc = SignedAffine::identity(n);
        for _ in 0..d {
            acc = self.compose_after(&acc);
        }
        if !acc.half_shift.iter().all(|h| *h == 0) {
            return None;
        }
        // minimal order divides d
        let mut best = d;
        for div in 1..=d {
            if d % div != 0 {
                continue;
            }
            let mut p = SignedAffine::identity(n);
            for _ in 0..div {
                p = self.compose_after(&p);
            }
            if p.is_identity() {
                best = div;
                break;
            }
        }
        Some(best)
    }
}

/// Act on an eigenvalue vector, left to right.
pub fn act_on_lambda<T: Real>(word: &TransformWord, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    word.check_bounds(v.len())?;
    Ok(SignedAffine::of_word(word, v.len()).apply(v))
}

/// Act on a Fuchsian system, left to right. Sigma flips the marking,
/// Perm permutes the ordered pole list, Pair/Long delegate to the
/// modification operations.
pub fn act_on_system<T: Real>(
    word: &TransformWord,
    system: &FuchsianSystem<T>,
) -> Result<FuchsianSystem<T>> {
    word.check_bounds(system.n())?;
    let mut acc = system.clone();
    for g in &word.generators {
        acc = match g {
            Generator::Sigma(i) => acc.flip_marking(*i)?,
            Generator::Perm(i, j) => acc.swap_poles(*i, *j)?,
            Generator::Pair(i, j) => match acc.gauge {
                crate::fuchsian::GaugeClass::Sl2 => {
                    pair_modify(&acc, PairSpec { i: *i, j: *j })?.system
                }
                crate::fuchsian::GaugeClass::Gl2 => {
                    gl2_pair_modify(&acc, PairSpec { i: *i, j: *j }, true, true)?.system
                }
            },
            Generator::Long(k) => long_shift(&acc, *k)?.system,
        };
    }
    Ok(acc)
}

/// Outcome of the Coxeter-relation verification.
#[derive(Clone, Debug)]
pub struct CoxeterReport {
    pub n: usize,
    pub relations_checked: usize,
    pub first_violation: Option<String>,
    pub finite_part_order: u64,
    pub translations_infinite: bool,
}

impl CoxeterReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Verify the Coxeter data of the affine C_n graph on the exact affine
/// representation, plus spot checks on random rational vectors.
pub fn coxeter_check(n: usize, trials: usize) -> CoxeterReport {
    assert!(n >= 3, "Coxeter check needs n >= 3");
    let mut checked = 0usize;
    let mut violation: Option<String> = None;
    let mut record = |ok: bool, what: String, violation: &mut Option<String>| {
        if !ok && violation.is_none() {
            *violation = Some(what);
        }
    };

    let word_order = |gens: Vec<Generator>| -> Option<u64> {
        SignedAffine::of_word(&TransformWord::new(gens), n).order()
    };

    // involutions
    for i in 0..n {
        checked += 1;
        record(
            word_order(vec![Generator::Sigma(i)]) == Some(2),
            format!("sigma({i}) is not an involution"),
            &mut violation,
        );
    }
    for i in 0..n {
        for j in (i + 1)..n {
            checked += 1;
            record(
                word_order(vec![Generator::Perm(i, j)]) == Some(2),
                format!("perm({i},{j}) is not an involution"),
                &mut violation,
            );
        }
    }
    // braid order 3 for adjacent transpositions
    for i in 0..n.saturating_sub(2) {
        checked += 1;
        record(
            word_order(vec![Generator::Perm(i, i + 1), Generator::Perm(i + 1, i + 2)]) == Some(3),
            format!("(p{},{} p{},{}) does not have order 3", i, i + 1, i + 1, i + 2),
            &mut violation,
        );
    }
    // sigma-perm products of order 4
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            checked += 1;
            record(
                word_order(vec![Generator::Sigma(i), Generator::Perm(i, j)]) == Some(4),
                format!("(s{i} p{i}{j}) does not have order 4"),
                &mut violation,
            );
        }
    }
    // sigmas commute
    for i in 0..n {
        for j in (i + 1)..n {
            checked += 1;
            let a = SignedAffine::of_word(
                &TransformWord::new(vec![Generator::Sigma(i), Generator::Sigma(j)]),
                n,
            );
            let b = SignedAffine::of_word(
                &TransformWord::new(vec![Generator::Sigma(j), Generator::Sigma(i)]),
                n,
            );
            record(
                a == b,
                format!("sigma({i}) and sigma({j}) do not commute"),
                &mut violation,
            );
        }
    }
    // distant transpositions commute
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                for l in (k + 1)..n {
                    if i == k && j == l {
                        continue;
                    }
                    if [i, j].iter().any(|x| [k, l].contains(x)) {
                        continue;
                    }
                    checked += 1;
                    let a = SignedAffine::of_word(
                        &TransformWord::new(vec![Generator::Perm(i, j), Generator::Perm(k, l)]),
                        n,
                    );
                    let b = SignedAffine::of_word(
                        &TransformWord::new(vec![Generator::Perm(k, l), Generator::Perm(i, j)]),
                        n,
                    );
                    record(
                        a == b,
                        format!("disjoint perms ({i}{j}),({k}{l}) do not commute"),
                        &mut violation,
                    );
                }
            }
        }
    }
    // the affine reflection [sigma(i), long(i)] has order 2
    for i in 0..n {
        checked += 1;
        record(
            word_order(vec![Generator::Sigma(i), Generator::Long(i)]) == Some(2),
            format!("sigma({i}) long({i}) is not an affine reflection"),
            &mut violation,
        );
    }
    // translations are infinite and commute
    let mut translations_infinite = true;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            checked += 1;
            let ord = word_order(vec![Generator::Pair(i, j)]);
            if ord.is_some() {
                translations_infinite = false;
                record(false, format!("pair({i},{j}) has finite order"), &mut violation);
            }
        }
    }
    for k in 0..n {
        checked += 1;
        if word_order(vec![Generator::Long(k)]).is_some() {
            translations_infinite = false;
            record(false, format!("long({k}) has finite order"), &mut violation);
        }
    }
    // translations commute exactly on lambda vectors
    for trial in 0..trials {
        let i = trial % n;
        let j = (trial + 1) % n;
        let a = SignedAffine::of_word(
            &TransformWord::new(vec![Generator::Pair(i, j), Generator::Long(j)]),
            n,
        );
        let b = SignedAffine::of_word(
            &TransformWord::new(vec![Generator::Long(j), Generator::Pair(i, j)]),
            n,
        );
        checked += 1;
        record(a == b, format!("translations at ({i},{j}) do not commute"), &mut violation);
    }

    let finite_part_order = finite_part_order(n);

    CoxeterReport {
        n,
        relations_checked: checked,
        first_violation: violation,
        finite_part_order,
        translations_infinite,
    }
}

/// Order of the finite part (Z/2)^n x S_n by breadth-first enumeration of
/// the signed-permutation group generated by the sigma and perm generators.
pub fn finite_part_order(n: usize) -> u64 {
    use std::collections::HashSet;
    let mut gens: Vec<SignedAffine> = Vec::new();
    for i in 0..n {
        gens.push(SignedAffine::of_generator(&Generator::Sigma(i), n));
    }
    for i in 0..n.saturating_sub(1) {
        gens.push(SignedAffine::of_generator(&Generator::Perm(i, i + 1), n));
    }
    let key = |a: &SignedAffine| (a.perm.clone(), a.signs.clone());
    let mut seen: HashSet<(Vec<usize>, Vec<i8>)> = HashSet::new();
    let mut frontier = vec![SignedAffine::identity(n)];
    seen.insert(key(&frontier[0]));
    while let Some(cur) = frontier.pop() {
        for g in &gens {
            let next = g.compose_after(&cur);
            if seen.insert(key(&next)) {
                frontier.push(next);
            }
        }
    }
    seen.len() as u64
}

/// Lattice report: shift vectors of the translation generators and their
/// conjugates, in half-integer units.
#[derive(Clone, Debug)]
pub struct LatticeReport {
    pub n: usize,
    /// Shift vectors (doubled, i.e. in lambda-halves) reachable from words
    /// of bounded length that act as pure translations.
    pub doubled_shifts: Vec<Vec<i64>>,
    /// Every conjugate w t w^{-1} of a translation is again a translation.
    pub conjugation_closed: bool,
    /// The doubled shifts contain the C_n generators {+-2e_i, +-e_i +- e_j}.
    pub contains_cn_generators: bool,
}

/// Verify that conjugates of translations generate the C_n lattice after
/// doubling (shift units: short = 1/2, long = 1, so doubling recovers the
/// integral lattice <+-2e_i, +-e_i+-e_j>).
pub fn translation_lattice(n: usize, max_len: usize) -> LatticeReport {
    use std::collections::HashSet;
    assert!(n >= 2);
    let mut gens: Vec<SignedAffine> = Vec::new();
    for i in 0..n {
        gens.push(SignedAffine::of_generator(&Generator::Sigma(i), n));
        gens.push(SignedAffine::of_generator(&Generator::Long(i), n));
        for j in 0..n {
            if i != j {
                gens.push(SignedAffine::of_generator(&Generator::Pair(i, j), n));
                gens.push(SignedAffine::of_generator(&Generator::Perm(i, j), n));
            }
        }
    }
    // BFS over words of length <= max_len, collecting pure translations.
    let mut shifts: HashSet<Vec<i64>> = HashSet::new();
    let mut layer: Vec<SignedAffine> = vec![SignedAffine::identity(n)];
    let mut seen: HashSet<(Vec<usize>, Vec<i8>, Vec<i64>)> = HashSet::new();
    let mut conjugation_closed = true;
    for _ in 0..max_len {
        let mut next_layer = Vec::new();
        for cur in &layer {
            for g in &gens {
                let next = g.compose_after(cur);
                let k = (next.perm.clone(), next.signs.clone(), next.half_shift.clone());
                if seen.insert(k) {
                    if next.is_translation() {
                        shifts.insert(next.half_shift.clone());
                    }
                    next_layer.push(next);
                }
            }
        }
        layer = next_layer;
    }
    // Conjugation closure: w t w^{-1} translations for the finite-part
    // generators w and translation generators t.
    for w in &gens {
        if !w.is_translation() && w.half_shift.iter().all(|h| *h == 0) {
            for t in &gens {
                if t.is_translation() && t.half_shift.iter().any(|h| *h != 0) {
                    // w t w^{-1}: since w is finite of order <= 4 here,
                    // compute w^{-1} by iterating.
                    let mut winv = w.clone();
                    while !winv.compose_after(w).is_identity() {
                        winv = winv.compose_after(w);
                        let probe = w.compose_after(&winv);
                        if probe.is_identity() {
                            break;
                        }
                    }
                    // find true inverse: w^k with w^{k+1} = id
                    let mut wi = SignedAffine::identity(n);
                    let mut acc = w.clone();
                    for _ in 0..16 {
                        if acc.is_identity() {
                            break;
                        }
                        wi = acc.clone();
                        acc = w.compose_after(&acc);
                    }
                    let conj = w.compose_after(&t.compose_after(&wi));
                    if !conj.is_translation() {
                        conjugation_closed = false;
                    } else {
                        shifts.insert(conj.half_shift.clone());
                    }
                }
            }
        }
    }

    let doubled: Vec<Vec<i64>> = shifts.iter().cloned().collect();
    // C_n generators in doubled units: half_shift doubling means the stored
    // half-units ARE the doubled lattice coordinates.
    let mut contains = true;
    for i in 0..n {
        let mut v = vec![0i64; n];
        v[i] = 2;
        let has = shifts.contains(&v) || shifts.contains(&v.iter().map(|x| -x).collect::<Vec<_>>());
        contains &= has;
        for j in 0..n {
            if i == j {
                continue;
            }
            for (si, sj) in [(1i64, 1i64), (1, -1)] {
                let mut w = vec![0i64; n];
                w[i] = si;
                w[j] = sj;
                let has = shifts.contains(&w)
                    || shifts.contains(&w.iter().map(|x| -x).collect::<Vec<_>>());
                contains &= has;
            }
        }
    }

    LatticeReport {
        n,
        doubled_shifts: doubled,
        conjugation_closed,
        contains_cn_generators: contains,
    }
}

/// Exact order of a word's affine action, or None when infinite.
pub fn word_order(word: &TransformWord, n: usize) -> Option<u64> {
    SignedAffine::of_word(word, n).order()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use num_complex::Complex64;

    fn v(xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|x| cx::<f64>(*x, 0.0)).collect()
    }

    #[test]
    fn generator_actions_on_lambda() {
        let w = TransformWord::parse("t12").unwrap();
        let out = act_on_lambda(&w, &v(&[0.1, 0.2, 0.3])).unwrap();
        assert_eq!(out, v(&[0.6, -0.3, 0.3]));

        let w = TransformWord::parse("s2").unwrap();
        let out = act_on_lambda(&w, &v(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(out, v(&[1.0, -2.0, 3.0]));
    }

    #[test]
    fn word_fold_left_to_right() {
        // [sigma(1), pair(1,2), sigma(1), pair(1,2)] on (0,0), folded left
        // to right with a step-by-step oracle:
        // (0,0) -s1-> (0,0) -t12-> (1/2,-1/2) -s1-> (-1/2,-1/2) -t12-> (0,-1)
        let w = TransformWord::parse("s1.t12.s1.t12").unwrap();
        let out = act_on_lambda(&w, &v(&[0.0, 0.0])).unwrap();
        assert_eq!(out, v(&[0.0, -1.0]));
        // oracle: fold the generators one at a time
        let mut cur = v(&[0.0, 0.0]);
        for g in &w.generators {
            cur = act_on_lambda(&TransformWord::new(vec![*g]), &cur).unwrap();
        }
        assert_eq!(cur, out);
    }

    #[test]
    fn orders() {
        assert_eq!(word_order(&TransformWord::parse("s1").unwrap(), 3), Some(2));
        assert_eq!(word_order(&TransformWord::parse("t12").unwrap(), 3), None);
        // affine reflection: lambda_1 -> -lambda_1 - 1 has a fixed point
        assert_eq!(word_order(&TransformWord::parse("s1.l1").unwrap(), 3), Some(2));
        // (sigma(1) perm(1,2)) has order 4: on (a, b) it squares to (-a, -b)
        let w = TransformWord::parse("s1.p12").unwrap();
        assert_eq!(word_order(&w, 2), Some(4));
        let sq = TransformWord::parse("s1.p12.s1.p12").unwrap();
        let out = act_on_lambda(&sq, &v(&[0.3, 0.8])).unwrap();
        assert_eq!(out, v(&[-0.3, -0.8]));
    }

    #[test]
    fn coxeter_n3_n4() {
        let r3 = coxeter_check(3, 16);
        assert!(r3.passed(), "{:?}", r3.first_violation);
        assert_eq!(r3.finite_part_order, 48);
        assert!(r3.translations_infinite);
        let r4 = coxeter_check(4, 16);
        assert!(r4.passed());
        assert_eq!(r4.finite_part_order, 384);
    }

    #[test]
    fn lattice_contains_cn() {
        let rep = translation_lattice(3, 4);
        assert!(rep.conjugation_closed);
        assert!(rep.contains_cn_generators);
    }

    #[test]
    fn conjugated_translations() {
        // conjugate of long(1) by perm(1,2) is long(2)
        let n = 3;
        let w = TransformWord::parse("p12.l1.p12").unwrap();
        let a = SignedAffine::of_word(&w, n);
        assert!(a.is_translation());
        assert_eq!(a.half_shift, vec![0, 2, 0]);
        // conjugate of long(1) by sigma(1) is the shift -e_1
        let w = TransformWord::parse("s1.l1.s1").unwrap();
        let a = SignedAffine::of_word(&w, n);
        assert!(a.is_translation());
        assert_eq!(a.half_shift, vec![-2, 0, 0]);
    }

    #[test]
    fn long_vs_sigma_composition_identity() {
        // long(k) then sigma(k) then long(k) then sigma(k) fixes lambda
        let w = TransformWord::parse("l1.s1.l1.s1").unwrap();
        let a = SignedAffine::of_word(&w, 3);
        assert!(a.is_identity());
    }

    #[test]
    fn system_action_equivariance() {
        use crate::sample::random_sl2;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sys = random_sl2::<f64>(&mut rng, 4);
        for text in ["s1", "p12", "t12", "l3", "t12.s1.p23", "t13.t21"] {
            let w = TransformWord::parse(text).unwrap();
            let moved = act_on_system(&w, &sys).unwrap();
            let expect = act_on_lambda(&w, &sys.lambda()).unwrap();
            for (got, want) in moved.lambda().iter().zip(expect.iter()) {
                assert!(
                    (got - want).norm() < 1e-12,
                    "word {text}: {got:?} vs {want:?}"
                );
            }
        }
    }

    #[test]
    fn perm_keeps_connection_function() {
        use crate::sample::random_sl2;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sys = random_sl2::<f64>(&mut rng, 4);
        let w = TransformWord::parse("p12").unwrap();
        let out = act_on_system(&w, &sys).unwrap();
        let z = cx::<f64>(0.31, 0.17);
        let a = sys.evaluate(z).unwrap();
        let b = out.evaluate(z).unwrap();
        assert!((a - b).norm_inf() < 1e-13);
    }

    #[test]
    fn pair_then_inverse_on_system() {
        use crate::sample::random_sl2;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sys = random_sl2::<f64>(&mut rng, 4);
        let w = TransformWord::parse("t12.t21").unwrap();
        let out = act_on_system(&w, &sys).unwrap();
        for k in 0..4 {
            assert!((out.marking[k].value - sys.marking[k].value).norm() < 1e-12);
        }
    }
}
