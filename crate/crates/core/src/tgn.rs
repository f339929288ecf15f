//! The bigraded Lie algebra `t_{g,n}` up to a truncation window.
//!
//! Every bidegree slice is built as (free slice) / (ideal slice). The ideal
//! slice at `(p,q)` is spanned by the relations of that bidegree together with
//! `[l, r]` for every letter `l` and every row `r` of the ideal slice at
//! `(p,q) - deg l`; iterated, this spans all brackets of relations with free
//! elements. Quotient bases are the pivot-free columns, so among competing
//! words the lexicographically largest survive (for instance `t_12` rather
//! than `[x^1, y^2]`).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::lie::{
    bracket, free_slice_dim, lyndon_words_bidegree, map_element, Alphabet, ExpansionCache,
    GeneratorSymbol, Kind, Letter, LieElement, Word,
};
use crate::linalg::{Echelon, SparseVec, Q};
use crate::report::CheckRecord;

/// Default refusal threshold for the dimension of a free slice.
pub const DEFAULT_SIZE_CAP: usize = 60_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub pmax: usize,
    pub qmax: usize,
    /// optional cap on p+q
    #[serde(default)]
    pub total: Option<usize>,
}

impl Bounds {
    pub fn new(pmax: usize, qmax: usize) -> Self {
        Self { pmax, qmax, total: None }
    }

    pub fn with_total(pmax: usize, qmax: usize, total: usize) -> Self {
        Self { pmax, qmax, total: Some(total) }
    }

    pub fn contains(&self, p: usize, q: usize) -> bool {
        p + q >= 1 && p <= self.pmax && q <= self.qmax && self.total.is_none_or(|t| p + q <= t)
    }

    /// All bidegrees in the window, by total degree then p.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = (0..=self.pmax)
            .flat_map(|p| (0..=self.qmax).map(move |q| (p, q)))
            .filter(|&(p, q)| self.contains(p, q))
            .collect();
        v.sort_by_key(|&(p, q)| (p + q, p));
        v
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Self::new(3, 3)
    }
}

/// Generators and relations of `t_{g,n}`.
#[derive(Clone, Debug)]
pub struct TgnPresentation {
    pub g: usize,
    pub n: usize,
    pub alphabet: Alphabet,
    pub relations: Vec<(String, LieElement)>,
}

impl TgnPresentation {
    pub fn new(g: usize, n: usize) -> Result<Self> {
        if g == 0 {
            return Err(Error::Domain("genus must be at least 1".into()));
        }
        let alphabet = Alphabet::tgn(g, n);
        let cache = ExpansionCache::new();
        let gen = |s: GeneratorSymbol| LieElement::generator(alphabet.letter(s).expect("letter"));
        let br = |a: &LieElement, b: &LieElement| bracket(a, b, &cache);
        let mut relations = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                for a in 1..=g {
                    for b in 1..=g {
                        let mut r = br(&gen(GeneratorSymbol::x(i, a)), &gen(GeneratorSymbol::y(j, b)));
                        if a == b {
                            r = r.sub(&gen(GeneratorSymbol::t(i, j)));
                        }
                        relations.push((format!("[x{a}^{i},y{b}^{j}]-<x{a},y{b}>t{i}{j}"), r));
                        if i < j {
                            let xx = br(&gen(GeneratorSymbol::x(i, a)), &gen(GeneratorSymbol::x(j, b)));
                            relations.push((format!("[x{a}^{i},x{b}^{j}]"), xx));
                            let yy = br(&gen(GeneratorSymbol::y(i, a)), &gen(GeneratorSymbol::y(j, b)));
                            relations.push((format!("[y{a}^{i},y{b}^{j}]"), yy));
                        }
                    }
                }
            }
        }
        for i in 1..=n {
            let mut r = LieElement::zero();
            for a in 1..=g {
                r = r.add(&br(&gen(GeneratorSymbol::x(i, a)), &gen(GeneratorSymbol::y(i, a))));
            }
            for j in 1..=n {
                if j != i {
                    r = r.add(&gen(GeneratorSymbol::t(i, j)));
                }
            }
            relations.push((format!("sum_a[x_a^{i},y_a^{i}]+sum_j t{i}j"), r));
        }
        for i in 1..=n {
            for j in 1..=n {
                for k in j + 1..=n {
                    if i == j || i == k {
                        continue;
                    }
                    for a in 1..=g {
                        let t = gen(GeneratorSymbol::t(j, k));
                        relations.push((format!("[x{a}^{i},t{j}{k}]"), br(&gen(GeneratorSymbol::x(i, a)), &t)));
                        relations.push((format!("[y{a}^{i},t{j}{k}]"), br(&gen(GeneratorSymbol::y(i, a)), &t)));
                    }
                }
            }
        }
        relations.retain(|(_, r)| !r.is_zero());
        Ok(Self { g, n, alphabet, relations })
    }
}

/// One bidegree slice of a graded quotient.
#[derive(Clone, Debug)]
pub struct Slice {
    pub p: usize,
    pub q: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    ideal: Echelon,
    basis_cols: Vec<usize>,
    basis_of_col: HashMap<usize, usize>,
    offset: usize,
}

impl Slice {
    pub fn free_dim(&self) -> usize {
        self.words.len()
    }

    pub fn dim(&self) -> usize {
        self.basis_cols.len()
    }

    pub fn ideal_rank(&self) -> usize {
        self.ideal.rank()
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    fn to_vec(&self, e: &LieElement) -> SparseVec {
        SparseVec::from_entries(e.terms().iter().map(|(w, c)| (self.index[w], c.clone())).collect())
    }

    fn to_elem(&self, v: &SparseVec) -> LieElement {
        LieElement::from_terms(v.entries().iter().map(|(c, x)| (self.words[*c].clone(), x.clone())))
    }
}

/// A finitely presented bigraded Lie algebra, truncated to a window.
#[derive(Debug)]
pub struct GradedQuotient {
    pub g: usize,
    pub n: usize,
    alphabet: Alphabet,
    bounds: Bounds,
    slices: BTreeMap<(usize, usize), Slice>,
    order: Vec<(usize, usize)>,
    coord_slice: Vec<(usize, usize)>,
    cache: Arc<ExpansionCache>,
    relations: Vec<(String, LieElement)>,
}

impl GradedQuotient {
    /// Builds the quotient of the free Lie algebra on `alphabet` by the ideal
    /// generated by `relations`, slice by slice inside `bounds`.
    pub fn build(
        g: usize,
        n: usize,
        alphabet: Alphabet,
        relations: Vec<(String, LieElement)>,
        bounds: Bounds,
        size_cap: usize,
    ) -> Result<Self> {
        if bounds.pmax == 0 && bounds.qmax == 0 {
            return Err(Error::Config("truncation bounds must be positive".into()));
        }
        let (mut nx, mut ny, mut nt) = (0, 0, 0);
        for s in alphabet.symbols() {
            match s.kind {
                Kind::X => nx += 1,
                Kind::Y => ny += 1,
                Kind::T => nt += 1,
            }
        }
        let order = bounds.bidegrees();
        for &(p, qd) in &order {
            let need = free_slice_dim(nx, ny, nt, p, qd);
            if need > BigInt::from(size_cap) {
                return Err(Error::SizeCap { needed: format!("{need} at bidegree ({p},{qd})"), cap: size_cap });
            }
        }
        let mut rel_by_deg: HashMap<(usize, usize), Vec<&LieElement>> = HashMap::new();
        for (name, r) in &relations {
            let comps = r.components(&alphabet);
            if comps.len() != 1 {
                return Err(Error::Domain(format!("relation {name} is not bidegree-homogeneous")));
            }
            let deg = *comps.keys().next().expect("one component");
            rel_by_deg.entry(deg).or_default().push(r);
        }

        let cache = Arc::new(ExpansionCache::new());
        let mut slices: BTreeMap<(usize, usize), Slice> = BTreeMap::new();
        let mut offset = 0;
        let mut coord_slice = Vec::new();
        for &(p, qd) in &order {
            let words = lyndon_words_bidegree(&alphabet, p, qd);
            let index: HashMap<Word, usize> = words.iter().enumerate().map(|(k, w)| (w.clone(), k)).collect();
            words.par_iter().for_each(|w| {
                cache.expansion(w);
            });
            let mut slice = Slice {
                p,
                q: qd,
                words,
                index,
                ideal: Echelon::new(),
                basis_cols: Vec::new(),
                basis_of_col: HashMap::new(),
                offset,
            };
            let mut ideal = Echelon::new();
            if let Some(rs) = rel_by_deg.get(&(p, qd)) {
                for r in rs {
                    ideal.insert(&slice.to_vec(r));
                }
            }
            let mut jobs: Vec<(Letter, &Slice, &SparseVec)> = Vec::new();
            for l in 0..alphabet.len() as Letter {
                let (a, b) = alphabet.bidegree(l);
                if a > p || b > qd || (p - a, qd - b) == (0, 0) {
                    continue;
                }
                if let Some(lower) = slices.get(&(p - a, qd - b)) {
                    for row in lower.ideal.rows() {
                        jobs.push((l, lower, row));
                    }
                }
            }
            let vecs: Vec<SparseVec> = jobs
                .par_iter()
                .map(|(l, lower, row)| {
                    let e = lower.to_elem(row);
                    slice.to_vec(&bracket(&LieElement::generator(*l), &e, &cache))
                })
                .collect();
            for v in &vecs {
                if ideal.rank() == slice.words.len() {
                    break;
                }
                ideal.insert(v);
            }
            slice.ideal = ideal;
            slice.basis_cols = (0..slice.words.len()).filter(|c| !slice.ideal.is_pivot(*c)).collect();
            slice.basis_of_col = slice.basis_cols.iter().enumerate().map(|(k, c)| (*c, k)).collect();
            offset += slice.basis_cols.len();
            coord_slice.extend(std::iter::repeat_n((p, qd), slice.basis_cols.len()));
            slices.insert((p, qd), slice);
        }
        Ok(Self { g, n, alphabet, bounds, slices, order, coord_slice, cache, relations })
    }

    /// `t_{g,n}` inside `bounds`.
    pub fn tgn(g: usize, n: usize, bounds: Bounds) -> Result<Self> {
        Self::tgn_capped(g, n, bounds, DEFAULT_SIZE_CAP)
    }

    pub fn tgn_capped(g: usize, n: usize, bounds: Bounds, size_cap: usize) -> Result<Self> {
        let pres = TgnPresentation::new(g, n)?;
        Self::build(g, n, pres.alphabet, pres.relations, bounds, size_cap)
    }

    /// `f_g^{⊕n}`: free on `x_a^i` for fixed `i`, different `i` commuting.
    pub fn free_sum(g: usize, n: usize, pmax: usize) -> Result<Self> {
        let mut syms = Vec::new();
        for i in 1..=n {
            for a in 1..=g {
                syms.push(GeneratorSymbol::x(i, a));
            }
        }
        let alphabet = Alphabet::new(syms);
        let cache = ExpansionCache::new();
        let gen = |s| LieElement::generator(alphabet.letter(s).expect("letter"));
        let mut rels = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                for a in 1..=g {
                    for b in 1..=g {
                        let r = bracket(&gen(GeneratorSymbol::x(i, a)), &gen(GeneratorSymbol::x(j, b)), &cache);
                        rels.push((format!("[x{a}^{i},x{b}^{j}]"), r));
                    }
                }
            }
        }
        Self::build(g, n, alphabet, rels, Bounds::new(pmax, 0), DEFAULT_SIZE_CAP)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn cache(&self) -> &ExpansionCache {
        &self.cache
    }

    pub fn relations(&self) -> &[(String, LieElement)] {
        &self.relations
    }

    pub fn slice(&self, p: usize, qd: usize) -> Option<&Slice> {
        self.slices.get(&(p, qd))
    }

    pub fn dim_at(&self, p: usize, qd: usize) -> Option<usize> {
        self.slices.get(&(p, qd)).map(|s| s.dim())
    }

    pub fn bidegrees(&self) -> &[(usize, usize)] {
        &self.order
    }

    /// Total number of quotient coordinates.
    pub fn dim(&self) -> usize {
        self.coord_slice.len()
    }

    pub fn coord_bidegree(&self, idx: usize) -> (usize, usize) {
        self.coord_slice[idx]
    }

    /// Global coordinate range of a slice.
    pub fn slice_range(&self, p: usize, qd: usize) -> Option<std::ops::Range<usize>> {
        self.slices.get(&(p, qd)).map(|s| s.offset..s.offset + s.dim())
    }

    pub fn generator(&self, s: GeneratorSymbol) -> Result<LieElement> {
        self.alphabet
            .letter(s)
            .map(LieElement::generator)
            .ok_or_else(|| Error::Domain(format!("generator {s} not in the alphabet")))
    }

    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> LieElement {
        bracket(a, b, &self.cache)
    }

    /// Quotient coordinates of `e`; errors if a component leaves the window.
    pub fn reduce(&self, e: &LieElement) -> Result<SparseVec> {
        let mut out = Vec::new();
        for ((p, qd), comp) in e.components(&self.alphabet) {
            let slice = self.slices.get(&(p, qd)).ok_or_else(|| {
                Error::Truncation(format!("component of bidegree ({p},{qd}) lies outside {:?}", self.bounds))
            })?;
            self.reduce_into(slice, &comp, &mut out);
        }
        Ok(SparseVec::from_entries(out))
    }

    /// Like [`reduce`](Self::reduce) but silently drops components outside
    /// the window; used for arithmetic in the nilpotent truncation.
    pub fn reduce_truncated(&self, e: &LieElement) -> SparseVec {
        let mut out = Vec::new();
        for ((p, qd), comp) in e.components(&self.alphabet) {
            if let Some(slice) = self.slices.get(&(p, qd)) {
                self.reduce_into(slice, &comp, &mut out);
            }
        }
        SparseVec::from_entries(out)
    }

    fn reduce_into(&self, slice: &Slice, comp: &LieElement, out: &mut Vec<(usize, Q)>) {
        let r = slice.ideal.reduce(&slice.to_vec(comp));
        for (c, v) in r.into_entries() {
            out.push((slice.offset + slice.basis_of_col[&c], v));
        }
    }

    /// Whether `e` lies in the ideal (all components must be in the window).
    pub fn in_ideal(&self, e: &LieElement) -> Result<bool> {
        Ok(self.reduce(e)?.is_zero())
    }

    /// Coset representative of a basis coordinate.
    pub fn basis_element(&self, idx: usize) -> LieElement {
        let (p, qd) = self.coord_slice[idx];
        let s = &self.slices[&(p, qd)];
        LieElement::monomial(s.words[s.basis_cols[idx - s.offset]].clone())
    }

    pub fn basis_label(&self, idx: usize) -> String {
        let (p, qd) = self.coord_slice[idx];
        let s = &self.slices[&(p, qd)];
        self.alphabet.word_string(&s.words[s.basis_cols[idx - s.offset]])
    }

    pub fn lift(&self, v: &SparseVec) -> LieElement {
        let mut e = LieElement::zero();
        for (c, x) in v.entries() {
            e = e.add(&self.basis_element(*c).scale(x));
        }
        e
    }

    /// Bracket of two quotient vectors, dropping components outside the window.
    pub fn bracket_coords(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        self.reduce_truncated(&self.bracket(&self.lift(a), &self.lift(b)))
    }

    /// Reduced `[b_i, b_j]` for all basis pairs whose bracket stays in the window.
    pub fn structure_constants(&self) -> StructureConstants {
        let d = self.dim();
        let pairs: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let (a, b) = self.coord_bidegree(i);
                let (c, e) = self.coord_bidegree(j);
                self.bounds.contains(a + c, b + e)
            })
            .collect();
        let vals: Vec<((usize, usize), Vec<(usize, f64)>)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let v = self.reduce_truncated(&self.bracket(&self.basis_element(i), &self.basis_element(j)));
                let f = v.entries().iter().map(|(c, x)| (*c, crate::linalg::q_to_f64(x))).collect();
                ((i, j), f)
            })
            .collect();
        StructureConstants { dim: d, table: vals.into_iter().filter(|(_, v)| !v.is_empty()).collect() }
    }

    pub fn hilbert_table(&self) -> HilbertTable {
        let slices = self
            .order
            .iter()
            .map(|&(p, qd)| {
                let s = &self.slices[&(p, qd)];
                SliceInfo {
                    p,
                    q: qd,
                    dim: s.dim(),
                    basis: s.basis_cols.iter().map(|c| self.alphabet.word_string(&s.words[*c])).collect(),
                }
            })
            .collect();
        HilbertTable { g: self.g, n: self.n, pmax: self.bounds.pmax, qmax: self.bounds.qmax, slices }
    }
}

/// Floating-point structure constants of a truncated quotient.
#[derive(Clone, Debug, Default)]
pub struct StructureConstants {
    pub dim: usize,
    /// sorted by (i, j), i < j
    table: Vec<((usize, usize), Vec<(usize, f64)>)>,
}

impl StructureConstants {
    /// `[b_i, b_j]` (truncated).
    pub fn get(&self, i: usize, j: usize) -> (f64, Option<&Vec<(usize, f64)>>) {
        if i < j {
            (1.0, self.lookup(i, j))
        } else if j < i {
            (-1.0, self.lookup(j, i))
        } else {
            (0.0, None)
        }
    }

    fn lookup(&self, i: usize, j: usize) -> Option<&Vec<(usize, f64)>> {
        self.table.binary_search_by_key(&(i, j), |e| e.0).ok().map(|k| &self.table[k].1)
    }

    /// Largest |structure constant|.
    pub fn max_abs(&self) -> f64 {
        self.table.iter().flat_map(|(_, v)| v.iter().map(|e| e.1.abs())).fold(0.0, f64::max)
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket<T>(&self, a: &[T], b: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + std::ops::Mul<f64, Output = T> + PartialEq,
    {
        let zero = T::default();
        let mut out = vec![zero; self.dim];
        for ((i, j), v) in &self.table {
            let (i, j) = (*i, *j);
            let c = a[i] * b[j] + (a[j] * b[i]) * -1.0;
            if c == zero {
                continue;
            }
            for (k, x) in v {
                out[*k] = out[*k] + c * *x;
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SliceInfo {
    pub p: usize,
    pub q: usize,
    pub dim: usize,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HilbertTable {
    pub g: usize,
    pub n: usize,
    #[serde(rename = "Pmax")]
    pub pmax: usize,
    #[serde(rename = "Qmax")]
    pub qmax: usize,
    pub slices: Vec<SliceInfo>,
}

impl HilbertTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,q,dim\n");
        for sl in &self.slices {
            s.push_str(&format!("{},{},{}\n", sl.p, sl.q, sl.dim));
        }
        s
    }

    pub fn get(&self, p: usize, qd: usize) -> Option<usize> {
        self.slices.iter().find(|s| s.p == p && s.q == qd).map(|s| s.dim)
    }
}

fn instance(tq: &GradedQuotient) -> serde_json::Value {
    json!({ "g": tq.g, "n": tq.n, "bounds": tq.bounds })
}

/// The four derived relation families; instances outside the window are skipped.
pub fn check_derived_relations(tq: &GradedQuotient) -> CheckRecord {
    let (g, n) = (tq.g, tq.n);
    let t = |i, j| tq.generator(GeneratorSymbol::t(i, j)).expect("t generator");
    let mut failures = Vec::new();
    let (mut tested, mut skipped) = (0usize, 0usize);
    let mut test = |name: String, e: LieElement| match tq.reduce(&e) {
        Ok(v) if v.is_zero() => tested += 1,
        Ok(v) => {
            tested += 1;
            failures.push(format!("{name} reduces to {} nonzero coordinates", v.len()))
        }
        Err(_) => skipped += 1,
    };
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            test(format!("t{j}{i}-t{i}{j}"), t(j, i).sub(&t(i, j)));
            for k in 1..=n {
                if k == i || k == j {
                    continue;
                }
                test(format!("[t{i}{j},t{i}{k}+t{j}{k}]"), tq.bracket(&t(i, j), &t(i, k).add(&t(j, k))));
                for l in 1..=n {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    test(format!("[t{i}{j},t{k}{l}]"), tq.bracket(&t(i, j), &t(k, l)));
                }
            }
            for a in 1..=g {
                for (v, mk) in [("x", GeneratorSymbol::x as fn(usize, usize) -> GeneratorSymbol), ("y", GeneratorSymbol::y)] {
                    let s = tq.generator(mk(i, a)).expect("gen").add(&tq.generator(mk(j, a)).expect("gen"));
                    test(format!("[{v}{a}^{i}+{v}{a}^{j},t{i}{j}]"), tq.bracket(&s, &t(i, j)));
                }
            }
        }
    }
    CheckRecord::exact(
        "algebra",
        "derived_relations",
        instance(tq),
        &failures,
        json!({ "tested": tested, "skipped_outside_window": skipped }),
    )
}

/// Semidirect decomposition: the `(p,0)` slices against `f_g^{⊕n}` through
/// the section and the projection, and generation of the `q ≥ 1` part by
/// the `q = 1` slices.
pub fn check_semidirect(tq: &GradedQuotient) -> CheckRecord {
    let (g, n) = (tq.g, tq.n);
    let b = tq.bounds();
    let mut failures = Vec::new();
    let mut table = Vec::new();
    let pmax = (0..=b.pmax).filter(|&p| b.contains(p, 0)).max().unwrap_or(0);
    if n > 0 && pmax > 0 {
        match GradedQuotient::free_sum(g, n, pmax) {
            Err(e) => failures.push(format!("building f_g^n failed: {e}")),
            Ok(f) => {
                for p in 1..=pmax {
                    let df = f.dim_at(p, 0).unwrap_or(0);
                    let dt = tq.dim_at(p, 0).unwrap_or(0);
                    let witt = n as u64 * free_slice_dim(g, 0, 0, p, 0).to_u64().unwrap_or(u64::MAX);
                    table.push(json!({ "p": p, "t": dt, "f": df, "n_witt": witt }));
                    if df != dt || df as u64 != witt {
                        failures.push(format!("(p,0)=({p},0): dim t {dt}, dim f {df}, n*Witt {witt}"));
                        continue;
                    }
                    // section x^(i) -> x^i, then projection killing y (identity on X words)
                    let r = f.slice_range(p, 0).expect("slice");
                    for idx in r.clone() {
                        let be = f.basis_element(idx);
                        let image = map_element(
                            &be,
                            &|l| LieElement::generator(tq.alphabet().letter(f.alphabet().symbol(l)).expect("x letter")),
                            tq.cache(),
                        );
                        let sv = match tq.reduce(&image) {
                            Ok(v) => v,
                            Err(e) => {
                                failures.push(e.to_string());
                                continue;
                            }
                        };
                        let back = map_element(
                            &tq.lift(&sv),
                            &|l| LieElement::generator(f.alphabet().letter(tq.alphabet().symbol(l)).expect("x letter")),
                            f.cache(),
                        );
                        match f.reduce(&back) {
                            Ok(v) if v == SparseVec::unit(idx) => {}
                            Ok(_) => failures.push(format!("projection∘section differs from identity at {}", f.basis_label(idx))),
                            Err(e) => failures.push(e.to_string()),
                        }
                    }
                }
            }
        }
    }
    // the q ≥ 1 part is generated, as a Lie algebra, by the q = 1 slices
    let mut spans: BTreeMap<(usize, usize), Echelon> = BTreeMap::new();
    for &(p, qd) in tq.bidegrees() {
        if qd == 0 {
            continue;
        }
        let mut e = Echelon::new();
        if qd == 1 {
            for idx in tq.slice_range(p, 1).expect("slice") {
                e.insert(&SparseVec::unit(idx));
            }
        } else {
            for p1 in 0..=p {
                let (Some(v), Some(u)) = (tq.slice_range(p1, 1), spans.get(&(p - p1, qd - 1))) else { continue };
                for i in v {
                    for row in u.rows() {
                        e.insert(&tq.bracket_coords(&SparseVec::unit(i), row));
                    }
                }
            }
        }
        let dt = tq.dim_at(p, qd).unwrap_or(0);
        table.push(json!({ "p": p, "q": qd, "t": dt, "generated": e.rank() }));
        if e.rank() != dt {
            failures.push(format!("({p},{qd}): dim t {dt} but generated part has dim {}", e.rank()));
        }
        spans.insert((p, qd), e);
    }
    CheckRecord::exact("algebra", "semidirect", instance(tq), &failures, json!({ "dims": table }))
}

/// The morphism `t_{g,n-1} → t_{g,n}/ℂt_12`, `x ↦ x^{12,3,…,n}`.
pub struct SimplicialMap<'a> {
    pub source: &'a GradedQuotient,
    pub target: &'a GradedQuotient,
    t12: usize,
}

impl<'a> SimplicialMap<'a> {
    pub fn new(source: &'a GradedQuotient, target: &'a GradedQuotient) -> Result<Self> {
        if target.n < 2 || source.n + 1 != target.n || source.g != target.g {
            return Err(Error::Domain("need t_{g,n-1} and t_{g,n} with n >= 2".into()));
        }
        let v = target.reduce(&target.generator(GeneratorSymbol::t(1, 2))?)?;
        let t12 = match v.entries() {
            [(c, x)] if x.is_one() => *c,
            _ => return Err(Error::Domain("t_12 is not a basis vector of the quotient".into())),
        };
        Ok(Self { source, target, t12 })
    }

    /// Coordinate of `t_12` in the target quotient.
    pub fn t12_coord(&self) -> usize {
        self.t12
    }

    pub fn letter_image(&self, l: Letter) -> LieElement {
        let s = self.source.alphabet().symbol(l);
        let gen = |s: GeneratorSymbol| self.target.generator(s).expect("target generator");
        match s.kind {
            Kind::X | Kind::Y => {
                let mk = if s.kind == Kind::X { GeneratorSymbol::x } else { GeneratorSymbol::y };
                if s.i == 1 {
                    gen(mk(1, s.k)).add(&gen(mk(2, s.k)))
                } else {
                    gen(mk(s.i + 1, s.k))
                }
            }
            Kind::T => {
                if s.i == 1 {
                    gen(GeneratorSymbol::t(1, s.k + 1)).add(&gen(GeneratorSymbol::t(2, s.k + 1)))
                } else {
                    gen(GeneratorSymbol::t(s.i + 1, s.k + 1))
                }
            }
        }
    }

    /// Free-level image of a source element (before reduction).
    pub fn image_free(&self, e: &LieElement) -> LieElement {
        map_element(e, &|l| self.letter_image(l), self.target.cache())
    }

    /// Image in target coordinates with the `t_12` coordinate removed.
    pub fn image(&self, e: &LieElement) -> Result<SparseVec> {
        Ok(self.mod_t12(&self.target.reduce(&self.image_free(e))?))
    }

    pub fn image_coords(&self, v: &SparseVec) -> Result<SparseVec> {
        self.image(&self.source.lift(v))
    }

    pub fn mod_t12(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_entries(v.entries().iter().filter(|(c, _)| *c != self.t12).cloned().collect())
    }
}

/// Well-definedness of the simplicial morphism: every defining relation of
/// the source maps to a multiple of `t_12`, and generator images commute
/// with `t_12`.
pub fn check_simplicial_well_defined(map: &SimplicialMap) -> CheckRecord {
    let mut failures = Vec::new();
    let (mut tested, mut skipped) = (0, 0);
    for (name, r) in map.source.relations() {
        match map.image(r) {
            Ok(v) if v.is_zero() => tested += 1,
            Ok(v) => {
                tested += 1;
                failures.push(format!("image of {name} has {} nonzero coordinates", v.len()))
            }
            Err(_) => skipped += 1,
        }
    }
    let t12 = map.target.generator(GeneratorSymbol::t(1, 2)).expect("t12");
    for l in 0..map.source.alphabet().len() as Letter {
        let c = map.target.bracket(&map.letter_image(l), &t12);
        match map.target.reduce(&c) {
            Ok(v) if v.is_zero() => tested += 1,
            Ok(_) => {
                tested += 1;
                failures.push(format!("image of {} does not commute with t12", map.source.alphabet().symbol(l)))
            }
            Err(_) => skipped += 1,
        }
    }
    CheckRecord::exact(
        "algebra",
        "simplicial_well_defined",
        json!({ "g": map.target.g, "n": map.target.n, "bounds": map.target.bounds() }),
        &failures,
        json!({ "tested": tested, "skipped_outside_window": skipped }),
    )
}

/// Residual `((ad x_a^1)^k y_a^1)^{12,…} − (ad x_a^1)^k y_a^1 − (ad x_a^2)^k y_a^2`
/// in target coordinates modulo `t_12`.
pub fn coproduct_residual(map: &SimplicialMap, a: usize, k: usize) -> Result<SparseVec> {
    let ad_pow = |quot: &GradedQuotient, i: usize| -> Result<LieElement> {
        let x = quot.generator(GeneratorSymbol::x(i, a))?;
        let mut e = quot.generator(GeneratorSymbol::y(i, a))?;
        for _ in 0..k {
            e = quot.bracket(&x, &e);
        }
        Ok(e)
    };
    let src = ad_pow(map.source, 1)?;
    let t = map.target;
    let diff = map.image_free(&src).sub(&ad_pow(t, 1)?).sub(&ad_pow(t, 2)?);
    Ok(map.mod_t12(&t.reduce(&diff)?))
}

pub fn check_coproduct_lemma(map: &SimplicialMap, a: usize, k: usize) -> CheckRecord {
    let inst = json!({ "g": map.target.g, "n": map.target.n, "a": a, "k": k });
    if !(k == 1 || k % 2 == 0) {
        return CheckRecord::errored("algebra", "coproduct_lemma", inst, "k must be 1 or even");
    }
    match coproduct_residual(map, a, k) {
        Ok(v) => {
            let f = if v.is_zero() { vec![] } else { vec![format!("residual has {} nonzero coordinates", v.len())] };
            CheckRecord::exact("algebra", "coproduct_lemma", inst, &f, json!({}))
        }
        Err(e) => CheckRecord::errored("algebra", "coproduct_lemma", inst, &e.to_string()),
    }
}

/// Exact integer-valued helper used by tests: the coordinate vector as
/// `(label, coefficient)` pairs.
pub fn labelled(tq: &GradedQuotient, v: &SparseVec) -> Vec<(String, Q)> {
    v.entries().iter().map(|(c, x)| (tq.basis_label(*c), x.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g1_n1_is_abelian_on_x_y() {
        let t = GradedQuotient::tgn(1, 1, Bounds::new(3, 3)).unwrap();
        assert_eq!(t.dim_at(1, 0), Some(1));
        assert_eq!(t.dim_at(0, 1), Some(1));
        assert_eq!(t.dim_at(1, 1), Some(0));
        for &(p, qd) in t.bidegrees() {
            if p + qd >= 2 {
                assert_eq!(t.dim_at(p, qd), Some(0), "({p},{qd})");
            }
        }
    }

    #[test]
    fn g1_n2_low_slices() {
        let t = GradedQuotient::tgn(1, 2, Bounds::new(2, 2)).unwrap();
        assert_eq!(t.dim_at(1, 1), Some(1));
        assert_eq!(t.dim_at(2, 0), Some(0));
        let x1 = t.generator(GeneratorSymbol::x(1, 1)).unwrap();
        let v = t.reduce(&x1).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v.entries()[0].1.is_one());
        let t12 = t.reduce(&t.generator(GeneratorSymbol::t(1, 2)).unwrap()).unwrap();
        assert_eq!(t.basis_label(t12.entries()[0].0), "t12");
    }

    #[test]
    fn reduce_outside_window_is_an_error() {
        let t = GradedQuotient::tgn(1, 2, Bounds::new(1, 1)).unwrap();
        let x = t.generator(GeneratorSymbol::x(1, 1)).unwrap();
        let e = t.bracket(&x, &t.generator(GeneratorSymbol::t(1, 2)).unwrap());
        assert!(matches!(t.reduce(&e), Err(Error::Truncation(_))));
    }

    #[test]
    fn size_cap_is_reported() {
        let e = GradedQuotient::tgn_capped(2, 3, Bounds::new(3, 3), 100).unwrap_err();
        assert!(matches!(e, Error::SizeCap { .. }));
    }

    #[test]
    fn zero_bounds_rejected() {
        assert!(GradedQuotient::tgn(1, 1, Bounds::new(0, 0)).is_err());
    }

    #[test]
    fn n0_has_no_slices_with_content() {
        let t = GradedQuotient::tgn(1, 0, Bounds::new(2, 2)).unwrap();
        assert_eq!(t.dim(), 0);
    }
}
