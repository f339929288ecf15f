//! The group exp(t) ⋊ S_n truncated at total degree N, realized inside the
//! truncated tensor algebra on the quotient basis of t (letters of degree
//! p+q). Group elements are stored as full noncommutative polynomials so
//! group-likeness is a genuine numerical property, not a structural one.

use std::collections::HashMap;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::connection::SparseF;
use crate::error::{Error, Result};
use crate::lie::{map_element, GeneratorSymbol, Kind, LieElement};
use crate::linalg::q_to_f64;
use crate::tgn::{GradedQuotient, StructureConstants};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Noncommutative polynomial (coefficients by word index) together with a
/// permutation σ, σ[k] = label of the point that ends at position k.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedGroupElement {
    pub coeffs: Vec<C64>,
    pub perm: Vec<usize>,
}

pub struct Envelope {
    n: usize,
    max_deg: usize,
    letter_deg: Vec<usize>,
    words: Vec<Vec<u16>>,
    word_deg: Vec<usize>,
    index: HashMap<Vec<u16>, usize>,
    /// append[u][l] = index of u·l when its degree fits
    append: Vec<Vec<Option<usize>>>,
    /// for each u, the pairs (v, uv) with deg u + deg v ≤ N
    products: Vec<Vec<(usize, usize)>>,
    sc: StructureConstants,
    relabel: HashMap<Vec<usize>, Vec<SparseF>>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&k| a[k]).collect()
}

pub fn invert(a: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len()];
    for (k, &v) in a.iter().enumerate() {
        out[v] = k;
    }
    out
}

pub fn transposition(n: usize, i: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(i, i + 1);
    p
}

impl Envelope {
    /// `tq` must be truncated at total degree `max_deg`.
    pub fn new(tq: &GradedQuotient, n: usize, max_deg: usize) -> Result<Self> {
        let dim = tq.dim();
        let letter_deg: Vec<usize> = (0..dim)
            .map(|k| {
                let (p, q) = tq.coord_bidegree(k);
                p + q
            })
            .collect();
        if letter_deg.iter().any(|&d| d > max_deg) {
            return Err(Error::Domain("the quotient exceeds the envelope degree".into()));
        }
        let mut words: Vec<Vec<u16>> = vec![vec![]];
        let mut word_deg = vec![0usize];
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                for (l, &dl) in letter_deg.iter().enumerate() {
                    if word_deg[u] + dl <= max_deg {
                        let mut w = words[u].clone();
                        w.push(l as u16);
                        words.push(w);
                        word_deg.push(word_deg[u] + dl);
                        next.push(words.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        let index: HashMap<Vec<u16>, usize> = words.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
        let append: Vec<Vec<Option<usize>>> = words
            .iter()
            .map(|u| {
                (0..dim)
                    .map(|l| {
                        let mut w = u.clone();
                        w.push(l as u16);
                        index.get(&w).copied()
                    })
                    .collect()
            })
            .collect();
        let products: Vec<Vec<(usize, usize)>> = words
            .iter()
            .enumerate()
            .map(|(ui, u)| {
                words
                    .iter()
                    .enumerate()
                    .filter(|(vi, _)| word_deg[ui] + word_deg[*vi] <= max_deg)
                    .map(|(vi, v)| {
                        let mut w = u.clone();
                        w.extend_from_slice(v);
                        (vi, index[&w])
                    })
                    .collect()
            })
            .collect();
        let mut relabel = HashMap::new();
        for sigma in permutations(n) {
            let table = relabel_table(tq, &sigma)?;
            relabel.insert(sigma, table);
        }
        Ok(Self {
            n,
            max_deg,
            letter_deg,
            words,
            word_deg,
            index,
            append,
            products,
            sc: tq.structure_constants(),
            relabel,
        })
    }

    pub fn max_degree(&self) -> usize {
        self.max_deg
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn letters(&self) -> usize {
        self.letter_deg.len()
    }

    pub fn letter_degree(&self, l: usize) -> usize {
        self.letter_deg[l]
    }

    pub fn word_degree(&self, u: usize) -> usize {
        self.word_deg[u]
    }

    pub fn append_index(&self, u: usize, l: usize) -> Option<usize> {
        self.append[u][l]
    }

    pub fn identity_perm(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn identity(&self) -> TruncatedGroupElement {
        let mut coeffs = vec![ZERO; self.words.len()];
        coeffs[0] = ONE;
        TruncatedGroupElement { coeffs, perm: self.identity_perm() }
    }

    fn tensor_mul(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.words.len()];
        for (u, &cu) in a.iter().enumerate() {
            if cu == ZERO {
                continue;
            }
            for &(v, uv) in &self.products[u] {
                let cv = b[v];
                if cv != ZERO {
                    out[uv] += cu * cv;
                }
            }
        }
        out
    }

    fn relabel_tensor(&self, sigma: &[usize], a: &[C64]) -> Result<Vec<C64>> {
        if sigma.iter().enumerate().all(|(k, &v)| k == v) {
            return Ok(a.to_vec());
        }
        let table = self.relabel.get(sigma).ok_or_else(|| Error::Domain(format!("no relabelling for {sigma:?}")))?;
        let mut out = vec![ZERO; self.words.len()];
        for (u, &c) in a.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let mut acc: Vec<(usize, C64)> = vec![(0, c)];
            for &l in &self.words[u] {
                let mut next = Vec::with_capacity(acc.len() * 2);
                for &(w, cw) in &acc {
                    for &(l2, x) in &table[l as usize] {
                        let idx = self.append[w][l2].expect("relabelling preserves degree");
                        next.push((idx, cw * x));
                    }
                }
                acc = next;
            }
            for (w, cw) in acc {
                out[w] += cw;
            }
        }
        Ok(out)
    }

    /// (T_1, σ_1)(T_2, σ_2) = (T_1 σ_1(T_2), σ_1 σ_2).
    pub fn mul(&self, a: &TruncatedGroupElement, b: &TruncatedGroupElement) -> Result<TruncatedGroupElement> {
        let moved = self.relabel_tensor(&a.perm, &b.coeffs)?;
        Ok(TruncatedGroupElement { coeffs: self.tensor_mul(&a.coeffs, &moved), perm: compose(&a.perm, &b.perm) })
    }

    /// Product of the polynomial parts only (both must be pure).
    pub fn mul_pure(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        self.tensor_mul(a, b)
    }

    fn tensor_inverse(&self, a: &[C64]) -> Vec<C64> {
        let mut x: Vec<C64> = a.to_vec();
        x[0] -= ONE;
        let neg: Vec<C64> = x.iter().map(|c| -c).collect();
        let mut out = vec![ZERO; self.words.len()];
        out[0] = ONE;
        let mut term = out.clone();
        for _ in 0..self.max_deg {
            term = self.tensor_mul(&term, &neg);
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
        }
        out
    }

    pub fn inverse(&self, a: &TruncatedGroupElement) -> Result<TruncatedGroupElement> {
        let inv_perm = invert(&a.perm);
        let coeffs = self.relabel_tensor(&inv_perm, &self.tensor_inverse(&a.coeffs))?;
        Ok(TruncatedGroupElement { coeffs, perm: inv_perm })
    }

    /// log of the polynomial part, as a tensor.
    pub fn log_tensor(&self, a: &[C64]) -> Vec<C64> {
        let mut x: Vec<C64> = a.to_vec();
        x[0] -= ONE;
        let mut out = vec![ZERO; self.words.len()];
        let mut term = x.clone();
        for k in 1..=self.max_deg {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t * (sign / k as f64);
            }
            term = self.tensor_mul(&term, &x);
        }
        out
    }

    /// exp of a Lie vector (quotient coordinates).
    pub fn exp_lie(&self, v: &[C64]) -> TruncatedGroupElement {
        let mut x = vec![ZERO; self.words.len()];
        for (l, c) in v.iter().enumerate() {
            if let Some(idx) = self.append[0][l] {
                x[idx] = *c;
            }
        }
        let mut out = vec![ZERO; self.words.len()];
        out[0] = ONE;
        let mut term = out.clone();
        for k in 1..=self.max_deg {
            term = self.tensor_mul(&term, &x);
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t / (1..=k).map(|j| j as f64).product::<f64>();
            }
        }
        TruncatedGroupElement { coeffs: out, perm: self.identity_perm() }
    }

    /// Iterated bracket [[l_1, l_2], …, l_k] in the quotient.
    fn theta_lie(&self, word: &[u16]) -> Vec<(usize, f64)> {
        let mut cur: HashMap<usize, f64> = HashMap::from([(word[0] as usize, 1.0)]);
        for &l in &word[1..] {
            let mut next: HashMap<usize, f64> = HashMap::new();
            for (&m, &x) in &cur {
                let (s, v) = self.sc.get(m, l as usize);
                if let Some(v) = v {
                    for &(k, y) in v {
                        *next.entry(k).or_insert(0.0) += s * x * y;
                    }
                }
            }
            cur = next;
        }
        let mut v: Vec<(usize, f64)> = cur.into_iter().collect();
        v.sort_by_key(|e| e.0);
        v
    }

    /// The same iterated bracket expanded in the tensor algebra.
    fn theta_free(&self, word: &[u16]) -> Vec<(usize, f64)> {
        let mut cur: Vec<(Vec<u16>, f64)> = vec![(vec![word[0]], 1.0)];
        for &l in &word[1..] {
            let mut next = Vec::with_capacity(cur.len() * 2);
            for (w, x) in cur {
                let mut right = w.clone();
                right.push(l);
                let mut left = vec![l];
                left.extend_from_slice(&w);
                next.push((right, x));
                next.push((left, -x));
            }
            cur = next;
        }
        cur.into_iter().map(|(w, x)| (self.index[&w], x)).collect()
    }

    /// Lie projection of a log tensor by the Dynkin map P ↦ Σ_k θ(P_k)/k
    /// (P_k the part of word length k), evaluated in the quotient.
    pub fn lie_of_log(&self, log: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.letters()];
        for (u, &c) in log.iter().enumerate().skip(1) {
            if c == ZERO {
                continue;
            }
            let k = self.words[u].len() as f64;
            for (m, x) in self.theta_lie(&self.words[u]) {
                out[m] += c * (x / k);
            }
        }
        out
    }

    /// log as a Lie vector.
    pub fn log(&self, a: &TruncatedGroupElement) -> Vec<C64> {
        self.lie_of_log(&self.log_tensor(&a.coeffs))
    }

    /// Group-likeness defect: distance of log T from the Lie polynomials,
    /// via the Dynkin–Specht–Wever idempotent in the free tensor algebra.
    pub fn lie_defect(&self, a: &TruncatedGroupElement) -> f64 {
        let log = self.log_tensor(&a.coeffs);
        let mut sym = vec![ZERO; self.words.len()];
        for (u, &c) in log.iter().enumerate().skip(1) {
            if c == ZERO {
                continue;
            }
            let k = self.words[u].len() as f64;
            for (w, x) in self.theta_free(&self.words[u]) {
                sym[w] += c * (x / k);
            }
        }
        log.iter().zip(&sym).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// max |coordinate| of a Lie vector grouped by total degree 1..=N.
    pub fn by_degree(&self, v: &[C64]) -> Vec<f64> {
        let mut out = vec![0.0f64; self.max_deg];
        for (l, c) in v.iter().enumerate() {
            let d = self.letter_deg[l];
            out[d - 1] = out[d - 1].max(c.norm());
        }
        out
    }

    pub fn max_abs(a: &[C64]) -> f64 {
        a.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Images of the quotient basis under relabelling the points by σ
/// (point k ↦ σ(k), 0-based).
fn relabel_table(tq: &GradedQuotient, sigma: &[usize]) -> Result<Vec<SparseF>> {
    let alphabet = tq.alphabet();
    let image = |l: u16| -> LieElement {
        let s = alphabet.symbol(l);
        let target = match s.kind {
            Kind::X => GeneratorSymbol::x(sigma[s.i - 1] + 1, s.k),
            Kind::Y => GeneratorSymbol::y(sigma[s.i - 1] + 1, s.k),
            Kind::T => GeneratorSymbol::t(sigma[s.i - 1] + 1, sigma[s.k - 1] + 1),
        };
        tq.generator(target).expect("relabelled generator")
    };
    (0..tq.dim())
        .map(|k| {
            let e = map_element(&tq.basis_element(k), &image, tq.cache());
            let v = tq.reduce(&e)?;
            Ok(v.entries().iter().map(|(c, x)| (*c, q_to_f64(x))).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tgn::Bounds;

    fn env(g: usize, n: usize, big_n: usize) -> (GradedQuotient, Envelope) {
        let tq = GradedQuotient::tgn(g, n, Bounds::with_total(big_n, big_n, big_n)).unwrap();
        let e = Envelope::new(&tq, n, big_n).unwrap();
        (tq, e)
    }

    fn unit(tq: &GradedQuotient, s: GeneratorSymbol) -> Vec<C64> {
        let v = tq.reduce(&tq.generator(s).unwrap()).unwrap();
        let mut out = vec![ZERO; tq.dim()];
        for (c, x) in v.entries() {
            out[*c] = C64::new(q_to_f64(x), 0.0);
        }
        out
    }

    #[test]
    fn exp_log_round_trip_and_bch() {
        let (tq, e) = env(1, 2, 3);
        let x = unit(&tq, GeneratorSymbol::x(1, 1));
        let y = unit(&tq, GeneratorSymbol::y(2, 1));
        let a: Vec<C64> = x.iter().zip(&y).map(|(p, q)| p * 0.3 + q * C64::new(0.1, 0.2)).collect();
        let back = e.log(&e.exp_lie(&a));
        assert!(back.iter().zip(&a).all(|(p, q)| (p - q).norm() < 1e-14));
        // log(e^X e^Y) = X + Y + [X,Y]/2 + ... ; [x^1, y^2] = t_12
        let prod = e.mul(&e.exp_lie(&x), &e.exp_lie(&y)).unwrap();
        let l = e.log(&prod);
        let sc = tq.structure_constants();
        let xy = sc.bracket(&x, &y);
        let (xxy, yxy) = (sc.bracket(&x, &xy), sc.bracket(&y, &xy));
        for k in 0..tq.dim() {
            let expect = x[k] + y[k] + xy[k] * 0.5 + (xxy[k] - yxy[k]) / 12.0;
            assert!((l[k] - expect).norm() < 1e-14, "coordinate {}", tq.basis_label(k));
        }
        let t = unit(&tq, GeneratorSymbol::t(1, 2));
        assert!(xy.iter().zip(&t).all(|(a, b)| (a - b).norm() < 1e-14));
        assert!(e.lie_defect(&prod) < 1e-14);
    }

    #[test]
    fn inverse_and_permutations() {
        let (tq, e) = env(1, 3, 2);
        let x = unit(&tq, GeneratorSymbol::x(1, 1));
        let mut g = e.exp_lie(&x);
        g.perm = transposition(3, 0);
        let prod = e.mul(&g, &e.inverse(&g).unwrap()).unwrap();
        assert_eq!(prod.perm, vec![0, 1, 2]);
        assert!(prod.coeffs.iter().zip(&e.identity().coeffs).all(|(a, b)| (a - b).norm() < 1e-14));
        // s · e^{x^1} · s^{-1} = e^{x^2}
        let mut s = e.identity();
        s.perm = transposition(3, 0);
        let conj = e.mul(&e.mul(&s, &e.exp_lie(&x)).unwrap(), &e.inverse(&s).unwrap()).unwrap();
        let x2 = unit(&tq, GeneratorSymbol::x(2, 1));
        assert!(e.log(&conj).iter().zip(&x2).all(|(a, b)| (a - b).norm() < 1e-14));
    }

    #[test]
    fn non_group_like_polynomial_has_a_defect() {
        let (tq, e) = env(1, 2, 2);
        let x = unit(&tq, GeneratorSymbol::x(1, 1));
        let mut g = e.exp_lie(&x);
        let k = x.iter().position(|c| c.norm() > 0.0).unwrap();
        let xx = e.append_index(e.append_index(0, k).unwrap(), k).unwrap();
        assert!((g.coeffs[xx].re - 0.5).abs() < 1e-15);
        // 1 + x is not group-like
        g.coeffs[xx] = ZERO;
        assert!(e.lie_defect(&g) > 0.1);
    }

    #[test]
    fn permutation_helpers() {
        assert_eq!(permutations(3).len(), 6);
        let a = vec![1, 2, 0];
        assert_eq!(compose(&a, &invert(&a)), vec![0, 1, 2]);
    }
}
