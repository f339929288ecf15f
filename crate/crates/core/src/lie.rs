//! Free Lie algebras over a bigraded alphabet, in the Lyndon basis.
//!
//! A Lie element is stored by its coordinates on the standard bracketings
//! `P_w` of Lyndon words `w`. Brackets are computed by expanding into the
//! free associative algebra and reading coordinates back off: the smallest
//! word in the support of a Lie polynomial is always Lyndon, and `P_w` equals
//! `w` plus lexicographically larger words.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{q, Q};

pub type Letter = u16;
pub type Word = Vec<Letter>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    X,
    Y,
    T,
}

/// One generator: `x_a^i`, `y_a^i` or `t_ij` (with `i < j`). Points and
/// handles are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorSymbol {
    pub kind: Kind,
    pub i: usize,
    /// handle index for X/Y, second point for T
    pub k: usize,
}

impl GeneratorSymbol {
    pub fn x(i: usize, a: usize) -> Self {
        Self { kind: Kind::X, i, k: a }
    }
    pub fn y(i: usize, a: usize) -> Self {
        Self { kind: Kind::Y, i, k: a }
    }
    /// `t_ij`, stored with the smaller index first.
    pub fn t(i: usize, j: usize) -> Self {
        assert!(i != j, "t_ii is not a generator");
        Self { kind: Kind::T, i: i.min(j), k: i.max(j) }
    }

    pub fn bidegree(&self) -> (usize, usize) {
        match self.kind {
            Kind::X => (1, 0),
            Kind::Y => (0, 1),
            Kind::T => (1, 1),
        }
    }
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::X => write!(f, "x{}^{}", self.k, self.i),
            Kind::Y => write!(f, "y{}^{}", self.k, self.i),
            Kind::T => write!(f, "t{}{}", self.i, self.k),
        }
    }
}

/// A totally ordered alphabet. Letter `l` is `symbols[l]`; the order is the
/// order of the vector, which callers keep as X < Y < T then lexicographic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<GeneratorSymbol>,
    index: HashMap<GeneratorSymbol, Letter>,
}

impl Alphabet {
    pub fn new(mut symbols: Vec<GeneratorSymbol>) -> Self {
        symbols.sort();
        symbols.dedup();
        let index = symbols.iter().enumerate().map(|(k, s)| (*s, k as Letter)).collect();
        Self { symbols, index }
    }

    /// Alphabet of `t_{g,n}`: all `x_a^i`, `y_a^i`, `t_ij`.
    pub fn tgn(g: usize, n: usize) -> Self {
        let mut s = Vec::new();
        for i in 1..=n {
            for a in 1..=g {
                s.push(GeneratorSymbol::x(i, a));
                s.push(GeneratorSymbol::y(i, a));
            }
            for j in i + 1..=n {
                s.push(GeneratorSymbol::t(i, j));
            }
        }
        Self::new(s)
    }

    /// `k` letters of bidegree (1,0), used for plain free Lie algebras.
    pub fn plain(k: usize) -> Self {
        Self::new((1..=k).map(|a| GeneratorSymbol::x(1, a)).collect())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[GeneratorSymbol] {
        &self.symbols
    }

    pub fn symbol(&self, l: Letter) -> GeneratorSymbol {
        self.symbols[l as usize]
    }

    pub fn letter(&self, s: GeneratorSymbol) -> Option<Letter> {
        self.index.get(&s).copied()
    }

    pub fn bidegree(&self, l: Letter) -> (usize, usize) {
        self.symbols[l as usize].bidegree()
    }

    pub fn word_bidegree(&self, w: &[Letter]) -> (usize, usize) {
        w.iter().fold((0, 0), |(p, q), l| {
            let (a, b) = self.bidegree(*l);
            (p + a, q + b)
        })
    }

    pub fn word_string(&self, w: &[Letter]) -> String {
        bracket_string(self, w)
    }
}

fn bracket_string(alpha: &Alphabet, w: &[Letter]) -> String {
    if w.len() == 1 {
        return alpha.symbol(w[0]).to_string();
    }
    let (u, v) = standard_factorization(w);
    format!("[{},{}]", bracket_string(alpha, u), bracket_string(alpha, v))
}

pub fn is_lyndon(w: &[Letter]) -> bool {
    if w.is_empty() {
        return false;
    }
    (1..w.len()).all(|k| w < &w[k..])
}

/// `w = uv` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[Letter]) -> (&[Letter], &[Letter]) {
    debug_assert!(w.len() >= 2);
    for k in 1..w.len() {
        if is_lyndon(&w[k..]) {
            return (&w[..k], &w[k..]);
        }
    }
    unreachable!("the last letter is always a Lyndon suffix")
}

/// Lyndon words with the given bidegree, in lexicographic order.
pub fn lyndon_words_bidegree(alpha: &Alphabet, p: usize, qd: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(alpha: &Alphabet, p: usize, q: usize, cp: usize, cq: usize, cur: &mut Word, out: &mut Vec<Word>) {
        if cp == p && cq == q {
            if is_lyndon(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for l in 0..alpha.len() as Letter {
            // A Lyndon word starts with its smallest letter.
            if let Some(&first) = cur.first() {
                if l < first {
                    continue;
                }
            }
            let (a, b) = alpha.bidegree(l);
            if cp + a <= p && cq + b <= q {
                cur.push(l);
                rec(alpha, p, q, cp + a, cq + b, cur, out);
                cur.pop();
            }
        }
    }
    if p + qd > 0 {
        rec(alpha, p, qd, 0, 0, &mut cur, &mut out);
    }
    out.sort();
    out
}

/// Basis of the homogeneous component of total degree `d` (sum of letter
/// bidegrees).
pub fn lyndon_basis(alpha: &Alphabet, d: usize) -> Result<Vec<Word>> {
    if d == 0 {
        return Err(Error::Domain("no degree-0 component".into()));
    }
    if alpha.is_empty() {
        return Err(Error::Domain("empty alphabet".into()));
    }
    let mut out = Vec::new();
    for p in 0..=d {
        out.extend(lyndon_words_bidegree(alpha, p, d - p));
    }
    out.sort();
    Ok(out)
}

/// Dimension of the bidegree-(p,q) slice of the free Lie algebra on
/// `nx` letters of bidegree (1,0), `ny` of (0,1) and `nt` of (1,1),
/// from the Chen–Fox–Lyndon factorization and Möbius inversion.
pub fn free_slice_dim(nx: usize, ny: usize, nt: usize, p: usize, qd: usize) -> BigInt {
    fn mobius(mut n: usize) -> i64 {
        let mut r = 1;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                n /= d;
                if n % d == 0 {
                    return 0;
                }
                r = -r;
            }
            d += 1;
        }
        if n > 1 {
            r = -r;
        }
        r
    }
    fn fact(n: usize) -> BigInt {
        (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
    }
    // a(P,Q) = sum_k [u^P v^Q] s^k / k with s = nx u + ny v + nt uv.
    let a = |pp: usize, qq: usize| -> Q {
        let mut acc = Q::zero();
        for l in 0..=pp.min(qq) {
            let (i, j) = (pp - l, qq - l);
            let k = i + j + l;
            if k == 0 {
                continue;
            }
            let multi = fact(k) / (fact(i) * fact(j) * fact(l));
            let w = multi
                * BigInt::from(nx).pow(i as u32)
                * BigInt::from(ny).pow(j as u32)
                * BigInt::from(nt).pow(l as u32);
            acc += Q::new(w, BigInt::from(k));
        }
        acc
    };
    let g = gcd(p, qd);
    let mut total = Q::zero();
    for d in 1..=g {
        if g % d == 0 {
            let m = mobius(d);
            if m != 0 {
                total += a(p / d, qd / d) * Q::new(BigInt::from(m), BigInt::from(d));
            }
        }
    }
    assert!(total.is_integer(), "necklace count must be integral");
    total.to_integer()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Element of the free associative algebra with rational coefficients.
pub type AssocPoly = HashMap<Word, Q>;

/// Cache of expansions `P_w` of Lyndon words into words.
#[derive(Default, Debug)]
pub struct ExpansionCache {
    map: RwLock<HashMap<Word, Arc<Vec<(Word, i64)>>>>,
}

impl ExpansionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn expansion(&self, w: &[Letter]) -> Arc<Vec<(Word, i64)>> {
        if let Some(e) = self.map.read().expect("cache lock").get(w) {
            return e.clone();
        }
        let e = if w.len() == 1 {
            vec![(w.to_vec(), 1)]
        } else {
            let (u, v) = standard_factorization(w);
            let eu = self.expansion(u);
            let ev = self.expansion(v);
            let mut acc: HashMap<Word, i64> = HashMap::new();
            for (a, ca) in eu.iter() {
                for (b, cb) in ev.iter() {
                    let mut ab = a.clone();
                    ab.extend_from_slice(b);
                    *acc.entry(ab).or_insert(0) += ca * cb;
                    let mut ba = b.clone();
                    ba.extend_from_slice(a);
                    *acc.entry(ba).or_insert(0) -= ca * cb;
                }
            }
            let mut e: Vec<(Word, i64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
            e.sort();
            e
        };
        let e = Arc::new(e);
        self.map.write().expect("cache lock").insert(w.to_vec(), e.clone());
        e
    }
}

/// Exact element of a free Lie algebra in Lyndon coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElement {
    terms: BTreeMap<Word, Q>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator(l: Letter) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![l], Q::one());
        Self { terms }
    }

    /// The basis monomial `P_w`; `w` must be Lyndon.
    pub fn monomial(w: Word) -> Self {
        assert!(is_lyndon(&w), "not a Lyndon word: {w:?}");
        let mut terms = BTreeMap::new();
        terms.insert(w, Q::one());
        Self { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (Word, Q)>) -> Self {
        let mut e = Self::zero();
        for (w, c) in iter {
            assert!(is_lyndon(&w), "not a Lyndon word: {w:?}");
            e.add_term(w, c);
        }
        e
    }

    fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Word, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[Letter]) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&q(-1))
    }

    /// Splits into bidegree-homogeneous components.
    pub fn components(&self, alpha: &Alphabet) -> BTreeMap<(usize, usize), LieElement> {
        let mut out: BTreeMap<(usize, usize), LieElement> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(alpha.word_bidegree(w)).or_default().add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn is_homogeneous(&self, alpha: &Alphabet) -> bool {
        self.components(alpha).len() <= 1
    }

    pub fn to_assoc(&self, cache: &ExpansionCache) -> AssocPoly {
        let mut acc: AssocPoly = HashMap::new();
        for (w, c) in &self.terms {
            for (u, k) in cache.expansion(w).iter() {
                let e = acc.entry(u.clone()).or_insert_with(Q::zero);
                *e += c * q(*k);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        acc
    }

    /// Reads Lyndon coordinates off a Lie polynomial. Fails when the input
    /// is not a Lie element.
    pub fn from_assoc(poly: &AssocPoly, cache: &ExpansionCache) -> Result<Self> {
        let mut rest: BTreeMap<Word, Q> =
            poly.iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (w.clone(), c.clone())).collect();
        let mut out = Self::zero();
        while let Some((w, c)) = rest.pop_first() {
            if !is_lyndon(&w) {
                return Err(Error::Domain(format!("not a Lie polynomial (leading word {w:?})")));
            }
            for (u, k) in cache.expansion(&w).iter() {
                if u == &w {
                    continue;
                }
                let e = rest.entry(u.clone()).or_insert_with(Q::zero);
                *e -= &c * q(*k);
                if e.is_zero() {
                    rest.remove(u);
                }
            }
            out.add_term(w, c);
        }
        Ok(out)
    }

    pub fn display(&self, alpha: &Alphabet) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(w, c)| format!("{}*{}", c, alpha.word_string(w))).collect();
        parts.join(" + ")
    }
}

/// Normal form of `[p, q]`.
pub fn bracket(p: &LieElement, qe: &LieElement, cache: &ExpansionCache) -> LieElement {
    if p.is_zero() || qe.is_zero() {
        return LieElement::zero();
    }
    let a = p.to_assoc(cache);
    let b = qe.to_assoc(cache);
    let mut acc: AssocPoly = HashMap::new();
    for (u, cu) in &a {
        for (v, cv) in &b {
            let c = cu * cv;
            let mut uv = u.clone();
            uv.extend_from_slice(v);
            *acc.entry(uv).or_insert_with(Q::zero) += &c;
            let mut vu = v.clone();
            vu.extend_from_slice(u);
            *acc.entry(vu).or_insert_with(Q::zero) -= &c;
        }
    }
    LieElement::from_assoc(&acc, cache).expect("commutators are Lie elements")
}

/// `[x_1, [x_2, ... [x_k, e]]]` for a list of letters.
pub fn ad_word(letters: &[Letter], e: &LieElement, cache: &ExpansionCache) -> LieElement {
    letters.iter().rev().fold(e.clone(), |acc, l| bracket(&LieElement::generator(*l), &acc, cache))
}

/// Image of a Lyndon monomial under the Lie morphism determined by letter images.
pub fn map_monomial(
    w: &[Letter],
    images: &dyn Fn(Letter) -> LieElement,
    cache: &ExpansionCache,
    memo: &mut HashMap<Word, LieElement>,
) -> LieElement {
    if let Some(e) = memo.get(w) {
        return e.clone();
    }
    let out = if w.len() == 1 {
        images(w[0])
    } else {
        let (u, v) = standard_factorization(w);
        let a = map_monomial(u, images, cache, memo);
        let b = map_monomial(v, images, cache, memo);
        bracket(&a, &b, cache)
    };
    memo.insert(w.to_vec(), out.clone());
    out
}

pub fn map_element(
    e: &LieElement,
    images: &dyn Fn(Letter) -> LieElement,
    cache: &ExpansionCache,
) -> LieElement {
    let mut memo = HashMap::new();
    let mut out = LieElement::zero();
    for (w, c) in e.terms() {
        out = out.add(&map_monomial(w, images, cache, &mut memo).scale(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn witt(k: u64, d: u64) -> u64 {
        // (1/d) sum_{e|d} mu(d/e) k^e, computed with a separate divisor loop.
        fn mu(n: u64) -> i64 {
            let mut m = n;
            let mut r = 1i64;
            let mut p = 2;
            while p * p <= m {
                if m % p == 0 {
                    m /= p;
                    if m % p == 0 {
                        return 0;
                    }
                    r = -r;
                }
                p += 1;
            }
            if m > 1 {
                -r
            } else {
                r
            }
        }
        let mut s: i64 = 0;
        for e in 1..=d {
            if d % e == 0 {
                s += mu(d / e) * (k as i64).pow(e as u32);
            }
        }
        (s / d as i64) as u64
    }

    #[test]
    fn two_letter_basis_small_degrees() {
        let a = Alphabet::plain(2);
        assert_eq!(lyndon_basis(&a, 1).unwrap().len(), 2);
        let b2 = lyndon_basis(&a, 2).unwrap();
        assert_eq!(b2, vec![vec![0, 1]]);
        assert_eq!(lyndon_basis(&a, 5).unwrap().len(), 6);
        assert!(lyndon_basis(&a, 0).is_err());
    }

    #[test]
    fn basis_counts_match_witt() {
        for k in 2..=8u64 {
            for d in 1..=6u64 {
                if k.pow(d as u32) > 300_000 {
                    continue;
                }
                let a = Alphabet::plain(k as usize);
                assert_eq!(lyndon_basis(&a, d as usize).unwrap().len() as u64, witt(k, d), "k={k} d={d}");
                assert_eq!(free_slice_dim(k as usize, 0, 0, d as usize, 0), BigInt::from(witt(k, d)));
            }
        }
    }

    #[test]
    fn bigraded_counts_match_enumeration() {
        let a = Alphabet::tgn(1, 3);
        for p in 0..=3 {
            for qd in 0..=3 {
                if p + qd == 0 {
                    continue;
                }
                let n = lyndon_words_bidegree(&a, p, qd).len();
                assert_eq!(BigInt::from(n), free_slice_dim(3, 3, 3, p, qd), "({p},{qd})");
            }
        }
    }

    #[test]
    fn bracket_basics() {
        let c = ExpansionCache::new();
        let x = LieElement::generator(0);
        let y = LieElement::generator(1);
        assert!(bracket(&x, &x, &c).is_zero());
        assert_eq!(bracket(&x, &y, &c), LieElement::monomial(vec![0, 1]));
        let xy = bracket(&x, &y, &c);
        let r = bracket(&xy, &x, &c);
        assert_eq!(r, LieElement::monomial(vec![0, 0, 1]).neg());
    }

    #[test]
    fn display_uses_brackets() {
        let a = Alphabet::tgn(1, 2);
        let w = lyndon_words_bidegree(&a, 1, 1);
        assert!(w.iter().any(|w| a.word_string(w) == "t12"));
        assert!(w.iter().any(|w| a.word_string(w) == "[x1^1,y1^2]"));
    }
}
