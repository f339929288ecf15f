//! Truncated Poincaré series for the ψ and ω families.
//!
//! Conventions: γ acts on a differential φ(z)dz by pulling back along γ^{-1},
//! so γ·φ = φ(γ^{-1}z)(γ^{-1})'(z)dz; the generating series
//! Σ_A f_A(γ) X_A = Π e^{−λ_t X_{e_t}} is then multiplicative and
//! γ_a·ψ_A = Σ_k (1/k!) δ_{a a_1..a_k} ψ_{a_{k+1}..a_s}. An a-period means
//! (1/2πi) times the integral over the clockwise a-cycle, which makes the
//! holomorphic ω_a period-normalized and puts the residue formula in the
//! form Σ res + Σ_a ∫_{A_a}(γ_a − 1)ω = 0.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{GroupWord, Mobius, SchottkyGroup};
use crate::error::{Error, Result};
use crate::quad::{Path, Quadrature};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// All index strings over g letters up to a maximal length, indexed by
/// length first and then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexStrings {
    g: usize,
    max_len: usize,
    offsets: Vec<usize>,
}

impl IndexStrings {
    pub fn new(g: usize, max_len: usize) -> Self {
        let mut offsets = vec![0usize];
        let mut count = 1usize;
        for _ in 0..=max_len {
            let last = *offsets.last().expect("nonempty");
            offsets.push(last + count);
            count *= g;
        }
        Self { g, max_len, offsets }
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Number of strings of length ≤ `len`.
    pub fn count_upto(&self, len: usize) -> usize {
        self.offsets[len + 1]
    }

    pub fn len(&self) -> usize {
        self.offsets[self.max_len + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, s: &[usize]) -> usize {
        debug_assert!(s.len() <= self.max_len && s.iter().all(|&a| a < self.g));
        self.offsets[s.len()] + s.iter().fold(0, |acc, &a| acc * self.g + a)
    }

    pub fn string(&self, idx: usize) -> Vec<usize> {
        let len = self.offsets.iter().rposition(|&o| o <= idx).expect("index in range");
        let mut r = idx - self.offsets[len];
        let mut out = vec![0; len];
        for k in (0..len).rev() {
            out[k] = r % self.g;
            r /= self.g;
        }
        out
    }

    pub fn range(&self, len: usize) -> std::ops::Range<usize> {
        self.offsets[len]..self.offsets[len + 1]
    }
}

/// A truncated series value with its estimated truncation tail.
#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Eval {
    pub value: C64,
    pub tail: f64,
}

/// Geometric extrapolation of the omitted part of a series from the sizes
/// of its last two word-length levels: S_L ρ/(1−ρ) with ρ = S_L/S_{L−1}.
/// Returns infinity when the ratio cannot be estimated or is not < 0.9.
pub fn geometric_tail(levels: &[f64]) -> f64 {
    let n = levels.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let (prev, last) = (levels[n - 2], levels[n - 1]);
    if last == 0.0 {
        return 0.0;
    }
    if prev == 0.0 {
        return f64::INFINITY;
    }
    let rho = last / prev;
    if rho >= 0.9 {
        return f64::INFINITY;
    }
    last * rho / (1.0 - rho)
}

#[derive(Clone, Debug)]
struct WordData {
    word: GroupWord,
    fwd: Mobius,
    inv: Mobius,
    len: usize,
    /// nonzero f-coefficients as (string index, value)
    f: Vec<(usize, f64)>,
    fmax: f64,
}

/// Evaluator for ψ_A, ψ_A^{z w w'} (|A| ≤ smax) and ω_A (1 ≤ |A| ≤ smax+1)
/// over all reduced words of length ≤ L.
#[derive(Clone, Debug)]
pub struct FormEvaluator {
    group: SchottkyGroup,
    l: usize,
    smax: usize,
    strings: IndexStrings,
    words: Vec<WordData>,
}

impl FormEvaluator {
    pub fn new(group: &SchottkyGroup, l: usize, smax: usize) -> Self {
        let g = group.genus();
        let strings = IndexStrings::new(g, smax + 1);
        let nf = strings.count_upto(smax);
        let words = GroupWord::enumerate(g, l)
            .into_iter()
            .map(|word| {
                let dense = generating_series(&strings, smax, &word);
                let f: Vec<(usize, f64)> =
                    dense.into_iter().enumerate().take(nf).filter(|(_, v)| *v != 0.0).collect();
                let fmax = f.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
                let fwd = group.matrix(&word);
                WordData { len: word.len(), inv: fwd.inverse(), fwd, word, f, fmax }
            })
            .collect();
        Self { group: group.clone(), l, smax, strings, words }
    }

    pub fn group(&self) -> &SchottkyGroup {
        &self.group
    }

    pub fn cutoff(&self) -> usize {
        self.l
    }

    pub fn smax(&self) -> usize {
        self.smax
    }

    pub fn strings(&self) -> &IndexStrings {
        &self.strings
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    fn check_indices(&self, a: &[usize], max: usize) -> Result<()> {
        if a.len() > max {
            return Err(Error::Truncation(format!(
                "index string of length {} exceeds evaluator capacity {max}",
                a.len()
            )));
        }
        if let Some(&bad) = a.iter().find(|&&x| x >= self.group.genus()) {
            return Err(Error::Domain(format!("index {} out of range for g = {}", bad + 1, self.group.genus())));
        }
        Ok(())
    }

    /// Σ_γ f_A(γ)·term(γ) for every A with |A| ≤ smax, plus the tail.
    fn accumulate(&self, term: impl Fn(&WordData) -> C64) -> (Vec<C64>, f64) {
        let mut out = vec![ZERO; self.strings.count_upto(self.smax)];
        let mut levels = vec![0.0; self.l + 1];
        for wd in &self.words {
            let t = term(wd);
            for &(idx, f) in &wd.f {
                out[idx] += t * f;
            }
            if t.is_finite() {
                levels[wd.len] += wd.fmax * t.norm();
            }
        }
        (out, geometric_tail(&levels))
    }

    /// ψ_A(z, w), the dz·dw coefficient, for all |A| ≤ smax. The entry for
    /// the empty string is non-finite when z = w.
    pub fn psi_all(&self, z: C64, w: C64) -> (Vec<C64>, f64) {
        self.accumulate(|wd| {
            let u = wd.inv.apply(z);
            wd.inv.derivative(z) / ((u - w) * (u - w))
        })
    }

    pub fn psi(&self, a: &[usize], z: C64, w: C64) -> Result<Eval> {
        self.check_indices(a, self.smax)?;
        if a.is_empty() && z == w {
            return Err(Error::Domain("ψ has a double pole at z = w".into()));
        }
        let (v, tail) = self.psi_all(z, w);
        Ok(Eval { value: v[self.strings.index(a)], tail })
    }

    /// ψ_A^{z w w'} = ∫_w^{w'} ψ_A(z, ·), in closed form.
    pub fn psi3_all(&self, z: C64, w: C64, w2: C64) -> (Vec<C64>, f64) {
        self.accumulate(|wd| {
            let u = wd.inv.apply(z);
            wd.inv.derivative(z) * (1.0 / (u - w2) - 1.0 / (u - w))
        })
    }

    pub fn psi3(&self, a: &[usize], z: C64, w: C64, w2: C64) -> Result<Eval> {
        self.check_indices(a, self.smax)?;
        if a.is_empty() && (z == w || z == w2) && w != w2 {
            return Err(Error::Domain("ψ^{z w w'} has a simple pole at z = w and z = w'".into()));
        }
        let (v, tail) = self.psi3_all(z, w, w2);
        Ok(Eval { value: v[self.strings.index(a)], tail })
    }

    /// ψ_A^{z w w'} by Gauss–Legendre quadrature of ψ_A(z, ·) along the
    /// segment from w to w'; an independent route to [`Self::psi3`].
    pub fn psi3_quadrature(&self, a: &[usize], z: C64, w: C64, w2: C64, quad: &Quadrature) -> Result<(C64, f64)> {
        self.check_indices(a, self.smax)?;
        let path = Path::segment(w, w2);
        if path.distance_to(z) < 1e-3 * (w2 - w).norm().max(1e-12) {
            return Err(Error::Numeric("integration path passes through the pole at z".into()));
        }
        let idx = self.strings.index(a);
        let (v, err) = quad.integrate_with_error(&path, |u| self.psi_all(z, u).0[idx]);
        Ok((v, err))
    }

    /// ω_A(z, w), the dz coefficient, for all 1 ≤ |A| ≤ smax+1, indexed by
    /// [`IndexStrings`] (the empty slot is zero).
    ///
    /// Built from ψ^{z w γ_a^{-1}w} by
    /// ω_{Aa} = ψ_A^{z w γ_a^{-1}w} + Σ_{k≥1} ((−1)^{k+1}/(k+1)!) δ_{a a_s..a_{s−k+1}} ω_{a_1..a_{s−k}a},
    /// which is the w-translation identity for ω_{A bb} solved for ω_{Aa}.
    pub fn omega_all(&self, z: C64, w: C64) -> (Vec<C64>, f64) {
        let g = self.group.genus();
        let mut p3 = Vec::with_capacity(g);
        let mut tail = 0.0f64;
        for a in 0..g {
            let wa = self.group.generator(a).inverse().apply(w);
            let (v, t) = self.psi3_all(z, w, wa);
            tail = tail.max(t);
            p3.push(v);
        }
        let coef: Vec<f64> = (0..=self.smax + 1)
            .map(|k| {
                let fact: f64 = (1..=k + 1).map(|x| x as f64).product();
                if k % 2 == 0 { -1.0 / fact } else { 1.0 / fact }
            })
            .collect();
        let mut out = vec![ZERO; self.strings.len()];
        for s in 0..=self.smax {
            for idx in self.strings.range(s) {
                let astr = self.strings.string(idx);
                for (a, p3a) in p3.iter().enumerate() {
                    let mut v = p3a[idx];
                    for k in 1..=s {
                        if astr[s - k..].iter().all(|&x| x == a) {
                            let mut lower = astr[..s - k].to_vec();
                            lower.push(a);
                            v += out[self.strings.index(&lower)] * coef[k];
                        }
                    }
                    let mut full = astr.clone();
                    full.push(a);
                    out[self.strings.index(&full)] = v;
                }
            }
        }
        // each level adds at most Σ 1/(k+1)! < 1 of the previous levels
        (out, tail * 4.0)
    }

    pub fn omega(&self, a: &[usize], z: C64, w: C64) -> Result<Eval> {
        if a.is_empty() {
            return Err(Error::Domain("ω needs at least one index".into()));
        }
        self.check_indices(a, self.smax + 1)?;
        let (v, tail) = self.omega_all(z, w);
        Ok(Eval { value: v[self.strings.index(a)], tail })
    }

    /// Normalized holomorphic differentials ω_1..ω_g at z, computed with
    /// auxiliary point w.
    pub fn holomorphic_all(&self, z: C64, w: C64) -> (Vec<C64>, f64) {
        let g = self.group.genus();
        let mut out = Vec::with_capacity(g);
        let mut tail = 0.0f64;
        for a in 0..g {
            let wa = self.group.generator(a).inverse().apply(w);
            let (v, t) = self.psi3_all(z, w, wa);
            out.push(v[0]);
            tail = tail.max(t);
        }
        (out, tail)
    }

    /// ω_a as a sum over cosets F_g/⟨γ_a⟩ of 1/(z−γβ_a) − 1/(z−γα_a),
    /// an independent formula for the holomorphic differentials.
    pub fn holomorphic_coset(&self, a: usize, z: C64) -> Eval {
        let h = *self.group.handle(a);
        let mut v = ZERO;
        let mut levels = vec![0.0; self.l + 1];
        for wd in &self.words {
            if wd.word.last_handle() == Some(a) {
                continue;
            }
            let t = 1.0 / (z - wd.fwd.apply(h.beta)) - 1.0 / (z - wd.fwd.apply(h.alpha));
            v += t;
            levels[wd.len] += t.norm();
        }
        Eval { value: v, tail: geometric_tail(&levels) }
    }

    /// (γ·φ)(z) for a differential φ(z)dz given by `phi`.
    pub fn act(&self, word: &GroupWord, z: C64, phi: impl Fn(C64) -> C64) -> C64 {
        let m = self.group.matrix(word).inverse();
        phi(m.apply(z)) * m.derivative(z)
    }

    /// Period matrix τ_ab = (1/2πi) ∫_{z_0}^{γ_a^{-1} z_0} ω_b.
    pub fn period_matrix(&self, w: C64, quad: &Quadrature) -> Result<PeriodMatrix> {
        let g = self.group.genus();
        let mut tau = vec![vec![ZERO; g]; g];
        let mut quad_err = 0.0f64;
        let tail = std::cell::Cell::new(0.0f64);
        for a in 0..g {
            let paths = self.group.b_path(a)?;
            for p in &paths {
                if p.distance_to(w) < 1e-2 {
                    return Err(Error::Numeric("auxiliary point lies on a b-path".into()));
                }
            }
            for b in 0..g {
                let mut total = ZERO;
                for p in &paths {
                    let (v, e) = quad.integrate_with_error(p, |z| {
                        let (vals, t) = self.holomorphic_all(z, w);
                        tail.set(tail.get().max(t));
                        vals[b]
                    });
                    total += v;
                    quad_err += e;
                }
                tau[a][b] = total / (2.0 * PI * C64::i());
            }
        }
        let mut sym = 0.0f64;
        for a in 0..g {
            for b in 0..g {
                sym = sym.max((tau[a][b] - tau[b][a]).norm());
            }
        }
        let degenerate = (0..g).any(|a| !tau[a][a].is_finite() || tau[a][a].im > 8.0);
        Ok(PeriodMatrix { tau, symmetry_residual: sym, tail: tail.get(), quad_error: quad_err / (2.0 * PI), degenerate })
    }

    /// (1/2πi) ∮ over the clockwise a-cycle of `phi`, with an error estimate.
    pub fn a_period(&self, a: usize, quad: &Quadrature, phi: impl Fn(C64) -> C64) -> (C64, f64) {
        let (v, e) = quad.integrate_with_error(&self.group.a_cycle(a), phi);
        (v / (2.0 * PI * C64::i()), e / (2.0 * PI))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodMatrix {
    pub tau: Vec<Vec<C64>>,
    pub symmetry_residual: f64,
    pub tail: f64,
    pub quad_error: f64,
    /// set when some Im τ_aa is huge or non-finite (multiplier near 0)
    pub degenerate: bool,
}

/// Dense coefficients of Π_t e^{−λ_t X_{e_t}} up to string length smax.
fn generating_series(strings: &IndexStrings, smax: usize, word: &GroupWord) -> Vec<f64> {
    let n = strings.count_upto(smax);
    let mut cur = vec![0.0; n];
    cur[0] = 1.0;
    for &(e, lam) in word.runs() {
        let mut next = cur.clone();
        for idx in 1..n {
            let s = strings.string(idx);
            let mut coef = 1.0;
            for k in 1..=s.len() {
                if s[s.len() - k] != e {
                    break;
                }
                coef *= -(lam as f64) / k as f64;
                next[idx] += cur[strings.index(&s[..s.len() - k])] * coef;
            }
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::f_coeff_f64;

    #[test]
    fn index_strings_roundtrip() {
        let s = IndexStrings::new(2, 3);
        assert_eq!(s.len(), 15);
        for idx in 0..s.len() {
            assert_eq!(s.index(&s.string(idx)), idx);
        }
        assert_eq!(s.index(&[1, 0]), 5);
        let s1 = IndexStrings::new(1, 4);
        assert_eq!(s1.index(&[0, 0, 0]), 3);
    }

    #[test]
    fn generating_series_matches_dp() {
        let s = IndexStrings::new(2, 3);
        let w = GroupWord::from_runs(&[(0, 2), (1, -1), (0, 1)]);
        let dense = generating_series(&s, 3, &w);
        for (idx, v) in dense.iter().enumerate() {
            assert_eq!(*v, f_coeff_f64(&s.string(idx), &w));
        }
    }

    #[test]
    fn geometric_tail_behaviour() {
        assert_eq!(geometric_tail(&[1.0]), f64::INFINITY);
        assert!((geometric_tail(&[1.0, 0.1]) - 0.1 * 0.1 / 0.9).abs() < 1e-15);
        assert_eq!(geometric_tail(&[1.0, 1.0]), f64::INFINITY);
    }
}
