//! Graded modules over `F^{⊗n}`, `F` the free associative algebra on
//! `x_1..x_g`, and the rank checks built on them.
//!
//! A presented module is a free module on graded generators modulo the
//! submodule generated by homogeneous relations. Its degree-`d` slice is
//! built by elimination against the span of the relations of degree `d` and
//! of `x^(k)_a · s` for `s` in the previous submodule slice. Once built, a
//! module is kept as a [`GradedModule`]: per-degree dimensions and exact
//! action matrices.
//!
//! Module degrees follow the `p` (x-) component of the bidegree of
//! `t_{g,n}`: inside `V`, the generator `y_a^i` sits in degree 0 and `t_ij` in
//! degree 1, so the pieces `M_ij`, `Λ²(M_ij)` and `M_ijk` appear shifted.

use std::collections::HashMap;

use serde_json::json;

use crate::error::{Error, Result};
use crate::lie::{GeneratorSymbol as G, LieElement};
use crate::linalg::{kernel, q, Echelon, SparseVec, Q};
use crate::report::CheckRecord;
use crate::tgn::{Bounds, GradedQuotient};

/// One word per tensor factor; letters are handle indices `0..g`.
pub type MultiWord = Vec<Vec<u8>>;

/// A term `c · (w_1 ⊗ … ⊗ w_n) · e_gen` of a free module.
pub type FreeTerm = (MultiWord, usize, Q);

fn multiwords(n: usize, g: usize, m: usize) -> Vec<MultiWord> {
    fn words(g: usize, len: usize) -> Vec<Vec<u8>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| (0..g as u8).map(move |a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                }))
                .collect();
        }
        out
    }
    fn rec(n: usize, g: usize, m: usize, k: usize, cur: &mut MultiWord, out: &mut Vec<MultiWord>) {
        if k == n - 1 {
            for w in words(g, m) {
                cur.push(w);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for len in 0..=m {
            for w in words(g, len) {
                cur.push(w);
                rec(n, g, m - len, k + 1, cur, out);
                cur.pop();
            }
        }
    }
    if n == 0 {
        return if m == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(n, g, m, 0, &mut Vec::new(), &mut out);
    out
}

fn degree_of(mw: &MultiWord) -> usize {
    mw.iter().map(|w| w.len()).sum()
}

/// A graded `F^{⊗n}`-module materialized up to `max_degree`.
#[derive(Clone, Debug)]
pub struct GradedModule {
    pub name: String,
    pub n: usize,
    pub g: usize,
    pub max_degree: usize,
    dims: Vec<usize>,
    /// `actions[d][(k-1)*g + (a-1)]` holds the images of the degree-`d`
    /// basis vectors under `x_a^(k)`, for `d < max_degree`.
    actions: Vec<Vec<Vec<SparseVec>>>,
    /// coordinates of the generators of a presented module
    gens: Vec<(usize, SparseVec)>,
    /// `(multiword, generator)` of each basis vector of a presented module
    monomials: Vec<Vec<(MultiWord, usize)>>,
}

/// Builds a module from generators (label, degree) and relations.
pub fn present(
    name: &str,
    n: usize,
    g: usize,
    gens: &[(String, usize)],
    relations: &[Vec<FreeTerm>],
    max_degree: usize,
) -> Result<GradedModule> {
    let mut rel_by_deg: HashMap<usize, Vec<&Vec<FreeTerm>>> = HashMap::new();
    for r in relations {
        let degs: Vec<usize> = r.iter().map(|(mw, e, _)| degree_of(mw) + gens[*e].1).collect();
        if degs.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Domain(format!("inhomogeneous relation in {name}")));
        }
        if let Some(d) = degs.first() {
            rel_by_deg.entry(*d).or_default().push(r);
        }
    }
    let mut frees: Vec<Vec<(MultiWord, usize)>> = Vec::new();
    let mut subs: Vec<Echelon> = Vec::new();
    let mut indices: Vec<HashMap<(MultiWord, usize), usize>> = Vec::new();
    for d in 0..=max_degree {
        let mut free = Vec::new();
        for (e, (_, dg)) in gens.iter().enumerate() {
            if *dg <= d {
                for mw in multiwords(n, g, d - dg) {
                    free.push((mw, e));
                }
            }
        }
        free.sort();
        let index: HashMap<(MultiWord, usize), usize> =
            free.iter().enumerate().map(|(k, b)| (b.clone(), k)).collect();
        let to_vec = |terms: &[FreeTerm]| {
            SparseVec::from_entries(
                terms.iter().map(|(mw, e, c)| (index[&(mw.clone(), *e)], c.clone())).collect(),
            )
        };
        let mut sub = Echelon::new();
        if let Some(rs) = rel_by_deg.get(&d) {
            for r in rs {
                sub.insert(&to_vec(r));
            }
        }
        if d > 0 {
            let prev_free = &frees[d - 1];
            for row in subs[d - 1].rows() {
                for k in 0..n {
                    for a in 0..g as u8 {
                        let terms: Vec<FreeTerm> = row
                            .entries()
                            .iter()
                            .map(|(c, x)| {
                                let (mw, e) = &prev_free[*c];
                                let mut mw = mw.clone();
                                mw[k].insert(0, a);
                                (mw, *e, x.clone())
                            })
                            .collect();
                        sub.insert(&to_vec(&terms));
                    }
                }
            }
        }
        frees.push(free);
        subs.push(sub);
        indices.push(index);
    }
    let mut basis_cols: Vec<Vec<usize>> = Vec::new();
    let mut col_pos: Vec<HashMap<usize, usize>> = Vec::new();
    for d in 0..=max_degree {
        let cols: Vec<usize> = (0..frees[d].len()).filter(|c| !subs[d].is_pivot(*c)).collect();
        col_pos.push(cols.iter().enumerate().map(|(k, c)| (*c, k)).collect());
        basis_cols.push(cols);
    }
    let coords = |d: usize, v: &SparseVec| -> SparseVec {
        let r = subs[d].reduce(v);
        SparseVec::from_entries(r.into_entries().into_iter().map(|(c, x)| (col_pos[d][&c], x)).collect())
    };
    let mut actions = Vec::new();
    for d in 0..max_degree {
        let mut per = Vec::new();
        for k in 0..n {
            for a in 0..g as u8 {
                let cols: Vec<SparseVec> = basis_cols[d]
                    .iter()
                    .map(|c| {
                        let (mw, e) = &frees[d][*c];
                        let mut mw = mw.clone();
                        mw[k].insert(0, a);
                        coords(d + 1, &SparseVec::unit(indices[d + 1][&(mw, *e)]))
                    })
                    .collect();
                per.push(cols);
            }
        }
        actions.push(per);
    }
    let gen_coords = gens
        .iter()
        .enumerate()
        .map(|(e, (_, dg))| {
            let empty: MultiWord = vec![vec![]; n];
            let v = if *dg <= max_degree {
                coords(*dg, &SparseVec::unit(indices[*dg][&(empty, e)]))
            } else {
                SparseVec::new()
            };
            (*dg, v)
        })
        .collect();
    let monomials = (0..=max_degree)
        .map(|d| basis_cols[d].iter().map(|c| frees[d][*c].clone()).collect())
        .collect();
    Ok(GradedModule {
        name: name.into(),
        n,
        g,
        max_degree,
        dims: basis_cols.iter().map(|c| c.len()).collect(),
        actions,
        gens: gen_coords,
        monomials,
    })
}

fn mono(n: usize, parts: &[(usize, &[u8])]) -> MultiWord {
    let mut mw = vec![vec![]; n];
    for (k, w) in parts {
        mw[*k - 1] = w.to_vec();
    }
    mw
}

fn unit_mw(n: usize) -> MultiWord {
    vec![vec![]; n]
}

/// `M_i`: generators `e_a`, relation `Σ_a x^(i)_a e_a`, other factors act by zero.
pub fn module_m(g: usize, n: usize, i: usize, max_degree: usize) -> Result<GradedModule> {
    let gens: Vec<(String, usize)> = (1..=g).map(|a| (format!("e{a}"), 0)).collect();
    let mut rels = vec![(0..g).map(|a| (mono(n, &[(i, &[a as u8])]), a, q(1))).collect::<Vec<_>>()];
    for k in (1..=n).filter(|k| *k != i) {
        for c in 0..g as u8 {
            for a in 0..g {
                rels.push(vec![(mono(n, &[(k, &[c])]), a, q(1))]);
            }
        }
    }
    present(&format!("M_{i}"), n, g, &gens, &rels, max_degree)
}

/// `M_ij`: one generator, killed by `x^(i)_a + x^(j)_a` and by other factors.
pub fn module_mij(g: usize, n: usize, i: usize, j: usize, max_degree: usize) -> Result<GradedModule> {
    let gens = vec![("1".to_string(), 0)];
    let mut rels = Vec::new();
    for c in 0..g as u8 {
        rels.push(vec![(mono(n, &[(i, &[c])]), 0, q(1)), (mono(n, &[(j, &[c])]), 0, q(1))]);
        for k in (1..=n).filter(|k| *k != i && *k != j) {
            rels.push(vec![(mono(n, &[(k, &[c])]), 0, q(1))]);
        }
    }
    present(&format!("M_{i}{j}"), n, g, &gens, &rels, max_degree)
}

/// `M_ijk`: generator `ω`, killed by `x^(i)_a + x^(j)_a + x^(k)_a` and by other factors.
pub fn module_mijk(g: usize, n: usize, idx: [usize; 3], max_degree: usize) -> Result<GradedModule> {
    let gens = vec![("w".to_string(), 0)];
    let mut rels = Vec::new();
    for c in 0..g as u8 {
        rels.push(idx.iter().map(|k| (mono(n, &[(*k, &[c])]), 0, q(1))).collect());
        for k in (1..=n).filter(|k| !idx.contains(k)) {
            rels.push(vec![(mono(n, &[(k, &[c])]), 0, q(1))]);
        }
    }
    present(&format!("M_{}{}{}", idx[0], idx[1], idx[2]), n, g, &gens, &rels, max_degree)
}

/// Generator labels of `V`, in the order used by [`module_v`].
pub fn v_generators(g: usize, n: usize) -> Vec<(String, usize)> {
    let mut gens = Vec::new();
    for i in 1..=n {
        for a in 1..=g {
            gens.push((format!("y{a}^{i}"), 0));
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            gens.push((format!("t{i}{j}"), 1));
        }
    }
    gens
}

fn v_y(g: usize, i: usize, a: usize) -> usize {
    (i - 1) * g + (a - 1)
}

fn v_t(g: usize, n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    let mut k = n * g;
    for u in 1..=n {
        for w in u + 1..=n {
            if (u, w) == (i, j) {
                return k;
            }
            k += 1;
        }
    }
    unreachable!()
}

/// The `f_g^{⊕n}`-module `V` spanned by the `q = 1` part of `t_{g,n}`.
pub fn module_v(g: usize, n: usize, max_degree: usize) -> Result<GradedModule> {
    let gens = v_generators(g, n);
    let mut rels: Vec<Vec<FreeTerm>> = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            for a in 1..=g {
                for b in 1..=g {
                    let mut r = vec![(mono(n, &[(i, &[(a - 1) as u8])]), v_y(g, j, b), q(1))];
                    if a == b {
                        r.push((unit_mw(n), v_t(g, n, i, j), q(-1)));
                    }
                    rels.push(r);
                }
            }
        }
        let mut r: Vec<FreeTerm> =
            (1..=g).map(|a| (mono(n, &[(i, &[(a - 1) as u8])]), v_y(g, i, a), q(1))).collect();
        for j in (1..=n).filter(|j| *j != i) {
            r.push((unit_mw(n), v_t(g, n, i, j), q(1)));
        }
        rels.push(r);
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let t = v_t(g, n, i, j);
            for c in 0..g as u8 {
                rels.push(vec![(mono(n, &[(i, &[c])]), t, q(1)), (mono(n, &[(j, &[c])]), t, q(1))]);
                for k in (1..=n).filter(|k| *k != i && *k != j) {
                    rels.push(vec![(mono(n, &[(k, &[c])]), t, q(1))]);
                }
            }
        }
    }
    present("V", n, g, &gens, &rels, max_degree)
}

impl GradedModule {
    pub fn dim(&self, d: usize) -> usize {
        self.dims.get(d).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Action of `x_a^(k)` (1-based) on a degree-`d` vector.
    pub fn act(&self, k: usize, a: usize, d: usize, v: &SparseVec) -> SparseVec {
        let cols = &self.actions[d][(k - 1) * self.g + (a - 1)];
        let mut out = SparseVec::new();
        for (c, x) in v.entries() {
            out = out.axpy(x, &cols[*c]);
        }
        out
    }

    /// Applies a multiword (all letters in factor `k` act through `x^(k)`).
    pub fn act_monomial(&self, mw: &MultiWord, d: usize, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        let mut deg = d;
        for (k, w) in mw.iter().enumerate() {
            for a in w.iter().rev() {
                cur = self.act(k + 1, *a as usize + 1, deg, &cur);
                deg += 1;
            }
        }
        cur
    }

    pub fn generator(&self, e: usize) -> (usize, SparseVec) {
        self.gens[e].clone()
    }

    pub fn monomial(&self, d: usize, idx: usize) -> &(MultiWord, usize) {
        &self.monomials[d][idx]
    }

    /// Image of the degree-`d` basis vector `idx` of a presented module under
    /// the morphism sending its generator `e` to `images[e]` (shifted by the
    /// degree difference) in `target`.
    pub fn hom_image(&self, d: usize, idx: usize, target: &GradedModule, images: &[(usize, SparseVec)]) -> (usize, SparseVec) {
        let (mw, e) = &self.monomials[d][idx];
        let (td, tv) = &images[*e];
        (td + degree_of(mw), target.act_monomial(mw, *td, tv))
    }

    /// Tensor product with the primitive action `x ↦ x⊗1 + 1⊗x`.
    pub fn tensor(&self, other: &GradedModule) -> GradedModule {
        assert_eq!((self.n, self.g), (other.n, other.g));
        let max_degree = self.max_degree.min(other.max_degree);
        let layout = |d: usize| -> Vec<(usize, usize, usize, usize)> {
            let mut v = Vec::new();
            for d1 in 0..=d {
                for i1 in 0..self.dim(d1) {
                    for i2 in 0..other.dim(d - d1) {
                        v.push((d1, i1, d - d1, i2));
                    }
                }
            }
            v
        };
        let layouts: Vec<Vec<(usize, usize, usize, usize)>> = (0..=max_degree).map(layout).collect();
        let pos: Vec<HashMap<(usize, usize, usize, usize), usize>> = layouts
            .iter()
            .map(|l| l.iter().enumerate().map(|(k, b)| (*b, k)).collect())
            .collect();
        let mut actions = Vec::new();
        for d in 0..max_degree {
            let mut per = Vec::new();
            for k in 1..=self.n {
                for a in 1..=self.g {
                    let cols = layouts[d]
                        .iter()
                        .map(|&(d1, i1, d2, i2)| {
                            let mut terms = Vec::new();
                            for (c, x) in self.act(k, a, d1, &SparseVec::unit(i1)).entries() {
                                terms.push((pos[d + 1][&(d1 + 1, *c, d2, i2)], x.clone()));
                            }
                            for (c, x) in other.act(k, a, d2, &SparseVec::unit(i2)).entries() {
                                terms.push((pos[d + 1][&(d1, i1, d2 + 1, *c)], x.clone()));
                            }
                            SparseVec::from_entries(terms)
                        })
                        .collect();
                    per.push(cols);
                }
            }
            actions.push(per);
        }
        GradedModule {
            name: format!("{}⊗{}", self.name, other.name),
            n: self.n,
            g: self.g,
            max_degree,
            dims: layouts.iter().map(|l| l.len()).collect(),
            actions,
            gens: vec![],
            monomials: vec![],
        }
    }

    /// Exterior square with the primitive action.
    pub fn exterior_square(&self) -> GradedModule {
        let max_degree = self.max_degree;
        let layout = |d: usize| -> Vec<((usize, usize), (usize, usize))> {
            let mut v = Vec::new();
            for d1 in 0..=d / 2 {
                let d2 = d - d1;
                for i1 in 0..self.dim(d1) {
                    for i2 in 0..self.dim(d2) {
                        if (d1, i1) < (d2, i2) {
                            v.push(((d1, i1), (d2, i2)));
                        }
                    }
                }
            }
            v
        };
        let layouts: Vec<_> = (0..=max_degree).map(layout).collect();
        let pos: Vec<HashMap<((usize, usize), (usize, usize)), usize>> = layouts
            .iter()
            .map(|l| l.iter().enumerate().map(|(k, b)| (*b, k)).collect())
            .collect();
        let wedge = |d: usize, u: (usize, usize), v: (usize, usize), x: &Q, out: &mut Vec<(usize, Q)>| {
            if u < v {
                out.push((pos[d][&(u, v)], x.clone()));
            } else if v < u {
                out.push((pos[d][&(v, u)], -x.clone()));
            }
        };
        let mut actions = Vec::new();
        for d in 0..max_degree {
            let mut per = Vec::new();
            for k in 1..=self.n {
                for a in 1..=self.g {
                    let cols = layouts[d]
                        .iter()
                        .map(|&((d1, i1), (d2, i2))| {
                            let mut terms = Vec::new();
                            for (c, x) in self.act(k, a, d1, &SparseVec::unit(i1)).entries() {
                                wedge(d + 1, (d1 + 1, *c), (d2, i2), x, &mut terms);
                            }
                            for (c, x) in self.act(k, a, d2, &SparseVec::unit(i2)).entries() {
                                wedge(d + 1, (d1, i1), (d2 + 1, *c), x, &mut terms);
                            }
                            SparseVec::from_entries(terms)
                        })
                        .collect();
                    per.push(cols);
                }
            }
            actions.push(per);
        }
        GradedModule {
            name: format!("Λ²{}", self.name),
            n: self.n,
            g: self.g,
            max_degree,
            dims: layouts.iter().map(|l| l.len()).collect(),
            actions,
            gens: vec![],
            monomials: vec![],
        }
    }

    /// Per-degree spans of the submodule generated by `seeds`.
    pub fn span_generated(&self, seeds: &[(usize, SparseVec)]) -> Vec<Echelon> {
        let mut spans: Vec<Echelon> = (0..=self.max_degree).map(|_| Echelon::new()).collect();
        for d in 0..=self.max_degree {
            for (sd, v) in seeds {
                if *sd == d {
                    spans[d].insert(v);
                }
            }
            if d > 0 {
                let rows: Vec<SparseVec> = spans[d - 1].rows().to_vec();
                for r in &rows {
                    for k in 1..=self.n {
                        for a in 1..=self.g {
                            let img = self.act(k, a, d - 1, r);
                            spans[d].insert(&img);
                        }
                    }
                }
            }
        }
        spans
    }
}

/// `dim M_d = g^{d+1} − g^{d−1}` for `d ≥ 1`, `g` for `d = 0`.
pub fn dim_m_oracle(g: usize, d: usize) -> usize {
    if d == 0 {
        g
    } else {
        g.pow(d as u32 + 1) - g.pow(d as u32 - 1)
    }
}

pub fn dim_mij_oracle(g: usize, d: usize) -> usize {
    g.pow(d as u32)
}

/// `M_ijk ≅ F^{⊗2}` as a graded space.
pub fn dim_mijk_oracle(g: usize, d: usize) -> usize {
    (d + 1) * g.pow(d as u32)
}

fn inst(g: usize, n: usize, d: usize) -> serde_json::Value {
    json!({ "g": g, "n": n, "degree": d })
}

/// Module dimensions against closed-form counts, and the identification of
/// `M_12` with `F` carrying the action `(x⊗y)·f = x f S(y)`.
pub fn check_module_dims(g: usize, n: usize, d: usize) -> CheckRecord {
    let mut failures = Vec::new();
    let mut table = Vec::new();
    for i in 1..=n {
        match module_m(g, n, i, d) {
            Ok(m) => {
                for k in 0..=d {
                    if m.dim(k) != dim_m_oracle(g, k) {
                        failures.push(format!("dim (M_{i})_{k} = {} expected {}", m.dim(k), dim_m_oracle(g, k)));
                    }
                }
                table.push(json!({ "module": m.name, "dims": m.dims() }));
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            match module_mij(g, n, i, j, d) {
                Ok(m) => {
                    for k in 0..=d {
                        if m.dim(k) != dim_mij_oracle(g, k) {
                            failures.push(format!("dim (M_{i}{j})_{k} = {}", m.dim(k)));
                        }
                    }
                    if let Err(f) = mij_identifies_with_f(&m, i, j) {
                        failures.push(f);
                    }
                    table.push(json!({ "module": m.name, "dims": m.dims() }));
                }
                Err(e) => failures.push(e.to_string()),
            }
        }
    }
    if n >= 3 {
        match module_mijk(g, n, [1, 2, 3], d) {
            Ok(m) => {
                for k in 0..=d {
                    if m.dim(k) != dim_mijk_oracle(g, k) {
                        failures.push(format!("dim (M_123)_{k} = {}", m.dim(k)));
                    }
                }
                if let Err(f) = mijk_symmetric(g, n, d) {
                    failures.push(f);
                }
                table.push(json!({ "module": m.name, "dims": m.dims() }));
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    CheckRecord::exact("modules", "module_dims", inst(g, n, d), &failures, json!({ "dims": table }))
}

/// Checks that `class(u⊗v) ↦ u S(v)` is a degree-wise bijection onto `F`
/// intertwining `x^(i)` with left and `x^(j)` with `f ↦ −f x` multiplication.
pub fn mij_identifies_with_f(m: &GradedModule, i: usize, j: usize) -> std::result::Result<(), String> {
    let g = m.g;
    let word_index = |w: &[u8]| w.iter().fold(0usize, |acc, a| acc * g + *a as usize);
    let phi = |d: usize, v: &SparseVec| -> SparseVec {
        let mut terms = Vec::new();
        for (c, x) in v.entries() {
            let (mw, _) = &m.monomials[d][*c];
            let u = &mw[i - 1];
            let w = &mw[j - 1];
            let mut word = u.clone();
            word.extend(w.iter().rev());
            let sign = if w.len() % 2 == 0 { x.clone() } else { -x.clone() };
            terms.push((word_index(&word), sign));
        }
        SparseVec::from_entries(terms)
    };
    for d in 0..=m.max_degree {
        let images: Vec<SparseVec> = (0..m.dim(d)).map(|c| phi(d, &SparseVec::unit(c))).collect();
        if crate::linalg::rank(&images) != g.pow(d as u32) || m.dim(d) != g.pow(d as u32) {
            return Err(format!("M_{i}{j} -> F is not bijective in degree {d}"));
        }
        if d == m.max_degree {
            continue;
        }
        for (c, img) in images.iter().enumerate() {
            for a in 0..g {
                let lhs_i = phi(d + 1, &m.act(i, a + 1, d, &SparseVec::unit(c)));
                let rhs_i = img.map_cols(|col| a * g.pow(d as u32) + col);
                let lhs_j = phi(d + 1, &m.act(j, a + 1, d, &SparseVec::unit(c)));
                let rhs_j = img.map_cols(|col| col * g + a).scale(&q(-1));
                if lhs_i != rhs_i || lhs_j != rhs_j {
                    return Err(format!("M_{i}{j} action differs from the F model in degree {d}"));
                }
            }
        }
    }
    Ok(())
}

/// `S_3` acts on `M_123` by permuting the three tensor factors together
/// with `ω ↦ ε(σ) ω`. Checks that each such map intertwines `x^(k)` with
/// `x^(σ(k))` and is bijective in every degree.
pub fn mijk_symmetric(g: usize, n: usize, d: usize) -> std::result::Result<(), String> {
    let m = module_mijk(g, n, [1, 2, 3], d).map_err(|e| e.to_string())?;
    let (_, w) = m.generator(0);
    for (perm, sign) in [([2, 1, 3], -1), ([1, 3, 2], -1), ([3, 2, 1], -1), ([2, 3, 1], 1), ([3, 1, 2], 1)] {
        // factor k (1-based, k ≤ 3) goes to perm[k-1]
        let sigma = |k: usize| if k <= 3 { perm[k - 1] } else { k };
        let t = |deg: usize, c: usize| -> SparseVec {
            let (mw, _) = &m.monomials[deg][c];
            let mut moved = vec![vec![]; n];
            for (k, word) in mw.iter().enumerate() {
                moved[sigma(k + 1) - 1] = word.clone();
            }
            m.act_monomial(&moved, 0, &w).scale(&q(sign))
        };
        let apply = |deg: usize, v: &SparseVec| -> SparseVec {
            let mut acc = SparseVec::new();
            for (c, x) in v.entries() {
                acc = acc.axpy(x, &t(deg, *c));
            }
            acc
        };
        for deg in 0..=d {
            let cols: Vec<SparseVec> = (0..m.dim(deg)).map(|c| t(deg, c)).collect();
            if crate::linalg::rank(&cols) != m.dim(deg) {
                return Err(format!("permutation {perm:?} is not bijective in degree {deg}"));
            }
            if deg == d {
                continue;
            }
            for (c, tc) in cols.iter().enumerate() {
                for k in 1..=n {
                    for a in 1..=g {
                        let lhs = apply(deg + 1, &m.act(k, a, deg, &SparseVec::unit(c)));
                        let rhs = m.act(sigma(k), a, deg, tc);
                        if lhs != rhs {
                            return Err(format!("permutation {perm:?} does not intertwine x^{k} in degree {deg}"));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Exact sequences `0 → ⊕ M_ij → V → ⊕ M_i → 0` and
/// `0 → ⊕_{j≠i} M_ij → V_i → M_i → 0`, degree by degree.
pub fn check_exact_sequences(g: usize, n: usize, d: usize) -> CheckRecord {
    let mut failures = Vec::new();
    let mut table = Vec::new();
    let res = (|| -> Result<()> {
        let v = module_v(g, n, d)?;
        let ms: Vec<GradedModule> = (1..=n).map(|i| module_m(g, n, i, d)).collect::<Result<_>>()?;
        let mut mijs = Vec::new();
        for i in 1..=n {
            for j in i + 1..=n {
                mijs.push(((i, j), module_mij(g, n, i, j, d)?));
            }
        }
        // V_i spans
        let vi_spans: Vec<Vec<Echelon>> = (1..=n)
            .map(|i| {
                let mut seeds: Vec<(usize, SparseVec)> = (1..=g).map(|a| v.generator(v_y(g, i, a))).collect();
                for j in (1..=n).filter(|j| *j != i) {
                    seeds.push(v.generator(v_t(g, n, i, j)));
                }
                v.span_generated(&seeds)
            })
            .collect();
        for p in 0..=d {
            // left map ⊕ M_ij[p-1] → V_p
            let mut left_images = Vec::new();
            let mut left_by_pair: HashMap<(usize, usize), Vec<SparseVec>> = HashMap::new();
            if p >= 1 {
                for ((i, j), m) in &mijs {
                    let img = vec![v.generator(v_t(g, n, *i, *j))];
                    for c in 0..m.dim(p - 1) {
                        let (dd, vec) = m.hom_image(p - 1, c, &v, &img);
                        debug_assert_eq!(dd, p);
                        left_images.push(vec.clone());
                        left_by_pair.entry((*i, *j)).or_default().push(vec);
                    }
                }
            }
            let src_dim: usize = if p >= 1 { mijs.iter().map(|(_, m)| m.dim(p - 1)).sum() } else { 0 };
            let left_rank = crate::linalg::rank(&left_images);
            if left_rank != src_dim {
                failures.push(format!("p={p}: ⊕M_ij → V has rank {left_rank} < {src_dim}"));
            }
            // right map V_p → ⊕ M_i[p]: y_a^i ↦ e_a in M_i, t ↦ 0. Evaluate on V's
            // basis monomials.
            let mut m_offsets = Vec::new();
            let mut tot = 0;
            for m in &ms {
                m_offsets.push(tot);
                tot += m.dim(p);
            }
            let right_images: Vec<SparseVec> = (0..v.dim(p))
                .map(|c| {
                    let (mw, e) = &v.monomials[p][c];
                    if *e >= n * g {
                        return SparseVec::new();
                    }
                    let (i, a) = (e / g, e % g);
                    let (_, gv) = ms[i].generator(a);
                    ms[i].act_monomial(mw, 0, &gv).map_cols(|col| col + m_offsets[i])
                })
                .collect();
            let right_rank = crate::linalg::rank(&right_images);
            if right_rank != tot {
                failures.push(format!("p={p}: V → ⊕M_i has rank {right_rank} < {tot}"));
            }
            // composite is zero: images of the left map go to zero on the right
            for lv in &left_images {
                let mut acc = SparseVec::new();
                for (c, x) in lv.entries() {
                    acc = acc.axpy(x, &right_images[*c]);
                }
                if !acc.is_zero() {
                    failures.push(format!("p={p}: composite ⊕M_ij → ⊕M_i is nonzero"));
                    break;
                }
            }
            if v.dim(p) != src_dim + tot {
                failures.push(format!("p={p}: dim V = {} but Σ M_ij + Σ M_i = {}", v.dim(p), src_dim + tot));
            }
            // V_i sequences
            for i in 1..=n {
                let span = &vi_spans[i - 1][p];
                let mut kernel_part = Vec::new();
                let mut kdim = 0;
                for ((a, b), m) in &mijs {
                    if *a == i || *b == i {
                        if p >= 1 {
                            kdim += m.dim(p - 1);
                            kernel_part.extend(left_by_pair.get(&(*a, *b)).cloned().unwrap_or_default());
                        }
                    }
                }
                if kernel_part.iter().any(|x| !span.contains(x)) {
                    failures.push(format!("p={p}: M_ij ⊄ V_{i}"));
                }
                let img: Vec<SparseVec> = span.rows().iter().map(|r| {
                    let mut acc = SparseVec::new();
                    for (c, x) in r.entries() {
                        acc = acc.axpy(x, &right_images[*c]);
                    }
                    acc
                }).collect();
                let img_rank = crate::linalg::rank(&img);
                let mi = ms[i - 1].dim(p);
                if img_rank != mi || span.rank() != kdim + mi || crate::linalg::rank(&kernel_part) != kdim {
                    failures.push(format!(
                        "p={p}: V_{i} sequence fails (dim V_i {}, Σ_j M_ij {kdim}, M_i {mi}, image {img_rank})",
                        span.rank()
                    ));
                }
            }
            table.push(json!({ "p": p, "V": v.dim(p), "sum_Mij": src_dim, "sum_Mi": tot }));
        }
        Ok(())
    })();
    if let Err(e) = res {
        failures.push(e.to_string());
    }
    CheckRecord::exact("modules", "exact_sequences", inst(g, n, d), &failures, json!({ "dims": table }))
}

/// Generators of `V_0` (the part generated by the `t_ij`) inside the `q = 1`
/// slices of a quotient, degree by degree up to `pmax`.
fn t_generated(tq: &GradedQuotient, pmax: usize) -> Result<Vec<Echelon>> {
    let (g, n) = (tq.g, tq.n);
    let mut out: Vec<Echelon> = (0..=pmax).map(|_| Echelon::new()).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            if pmax >= 1 {
                out[1].insert(&tq.reduce(&tq.generator(G::t(i, j))?)?);
            }
        }
    }
    for p in 2..=pmax {
        let rows = out[p - 1].rows().to_vec();
        for r in &rows {
            let e = tq.lift(r);
            for k in 1..=n {
                for a in 1..=g {
                    let v = tq.reduce(&tq.bracket(&tq.generator(G::x(k, a))?, &e))?;
                    out[p].insert(&v);
                }
            }
        }
    }
    Ok(out)
}

fn bracket_span(tq: &GradedQuotient, a: &[Echelon], b: &[Vec<SparseVec>], p: usize) -> Echelon {
    let mut e = Echelon::new();
    for p1 in 0..=p {
        let p2 = p - p1;
        if p1 >= a.len() || p2 >= b.len() {
            continue;
        }
        for u in a[p1].rows() {
            for w in &b[p2] {
                e.insert(&tq.bracket_coords(u, w));
            }
        }
    }
    e
}

/// Dimension predictions for the filtration of `t_{g,n}[p,2]`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct GrPrediction {
    pub gr2: usize,
    pub gr1: usize,
    /// Σ Λ²(M_ij) + Σ M_ijk
    pub gr0: usize,
    /// Σ M_ijk alone
    pub gr0_without_wedge: usize,
}

pub fn gr_prediction(g: usize, n: usize, p: usize) -> Result<GrPrediction> {
    let d = p.max(1);
    let m = module_m(g, n, 1, d)?;
    let m_sq = m.exterior_square();
    let mij = if n >= 2 { Some(module_mij(g, n, 1, 2, d)?) } else { None };
    let pairs = n * n.saturating_sub(1) / 2;
    let triples = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
    let gr2 = n * m_sq.dim(p);
    let mut gr1 = 0;
    let mut gr0 = 0;
    let mut gr0_plain = 0;
    if n >= 2 {
        let mij = mij.expect("n >= 2");
        let tens = m.tensor(&mij);
        if p >= 1 {
            gr1 = pairs * tens.dim(p - 1);
        }
        if p >= 2 {
            let wedge = mij.exterior_square().dim(p - 2);
            let mijk = if n >= 3 { module_mijk(g, n, [1, 2, 3], d)?.dim(p - 2) } else { 0 };
            gr0 = pairs * wedge + triples * mijk;
            gr0_plain = triples * mijk;
        }
    }
    Ok(GrPrediction { gr2, gr1, gr0, gr0_without_wedge: gr0_plain })
}

/// Filtration `Z_0 ⊂ Z_1 ⊂ t[p,2]` with `Z_0 = [V_0,V_0]`, `Z_1 = [V_0,V]`,
/// compared with the module predictions.
pub fn check_gr_decomposition(tq: &GradedQuotient, pmax: usize) -> CheckRecord {
    let (g, n) = (tq.g, tq.n);
    let mut failures = Vec::new();
    let mut table = Vec::new();
    let mut paper_mismatch = 0;
    let res = (|| -> Result<()> {
        let b = tq.bounds();
        if !(b.contains(pmax, 2) && b.contains(pmax, 1)) {
            return Err(Error::Truncation(format!("need slices ({pmax},1) and ({pmax},2)")));
        }
        let v0 = t_generated(tq, pmax)?;
        let vall: Vec<Vec<SparseVec>> = (0..=pmax)
            .map(|p| tq.slice_range(p, 1).map(|r| r.map(SparseVec::unit).collect()).unwrap_or_default())
            .collect();
        let v0_rows: Vec<Vec<SparseVec>> = v0.iter().map(|e| e.rows().to_vec()).collect();
        for p in 0..=pmax {
            let z0 = bracket_span(tq, &v0, &v0_rows, p).rank();
            let z1 = bracket_span(tq, &v0, &vall, p).rank();
            let dt = tq.dim_at(p, 2).unwrap_or(0);
            let pred = gr_prediction(g, n, p)?;
            let got = (dt - z1, z1 - z0, z0);
            if got != (pred.gr2, pred.gr1, pred.gr0) {
                failures.push(format!("p={p}: gr dims {got:?}, predicted {:?}", (pred.gr2, pred.gr1, pred.gr0)));
            }
            if z0 != pred.gr0_without_wedge {
                paper_mismatch += 1;
            }
            table.push(json!({ "p": p, "dim": dt, "gr2": got.0, "gr1": got.1, "gr0": got.2, "predicted": pred }));
        }
        Ok(())
    })();
    if let Err(e) = res {
        failures.push(e.to_string());
    }
    CheckRecord::exact(
        "modules",
        "gr_decomposition",
        json!({ "g": g, "n": n, "pmax": pmax }),
        &failures,
        json!({ "slices": table, "degrees_where_gr0_needs_wedge_of_Mij": paper_mismatch }),
    )
}

/// Filtration of the relation module `Y ⊂ L_2(V)` computed from its
/// Σ-generators, against `L_2(V)` and `t[·,2]`.
pub fn check_y_filtration(g: usize, n: usize, pmax: usize) -> CheckRecord {
    let mut failures = Vec::new();
    let mut table = Vec::new();
    let res = (|| -> Result<()> {
        let bounds = Bounds::new(pmax.max(1), 2);
        let tq = GradedQuotient::tgn(g, n, bounds)?;
        let pres = crate::tgn::TgnPresentation::new(g, n)?;
        let alpha = pres.alphabet.clone();
        let rels: Vec<(String, LieElement)> = pres
            .relations
            .into_iter()
            .filter(|(_, r)| r.components(&alpha).keys().all(|&(_, qd)| qd <= 1))
            .collect();
        let xq = GradedQuotient::build(g, n, alpha, rels, bounds, crate::tgn::DEFAULT_SIZE_CAP)?;
        let gen = |s: G| xq.generator(s).expect("generator");
        let red = |e: &LieElement| xq.reduce(e).expect("within window");
        let y = |i, a| gen(G::y(i, a));
        let t = |i, j| gen(G::t(i, j));
        let mut sig: [Vec<(usize, SparseVec)>; 5] = Default::default();
        for i in 1..=n {
            for j in i + 1..=n {
                for a in 1..=g {
                    for b2 in 1..=g {
                        sig[0].push((0, red(&xq.bracket(&y(i, a), &y(j, b2)))));
                    }
                    sig[1].push((1, red(&xq.bracket(&y(i, a).add(&y(j, a)), &t(i, j)))));
                    for k in (1..=n).filter(|k| *k != i && *k != j) {
                        sig[2].push((1, red(&xq.bracket(&y(k, a), &t(i, j)))));
                    }
                }
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                for k in 1..=n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    sig[3].push((2, red(&xq.bracket(&t(i, j), &t(i, k).add(&t(j, k))))));
                    for l in 1..=n {
                        if l != i && l != j && l != k {
                            sig[4].push((2, red(&xq.bracket(&t(i, j), &t(k, l)))));
                        }
                    }
                }
            }
        }
        let span = |seeds: Vec<(usize, SparseVec)>| -> Vec<Echelon> {
            let mut out: Vec<Echelon> = (0..=pmax).map(|_| Echelon::new()).collect();
            for p in 0..=pmax {
                for (sp, v) in &seeds {
                    if *sp == p {
                        out[p].insert(v);
                    }
                }
                if p > 0 {
                    let rows = out[p - 1].rows().to_vec();
                    for r in &rows {
                        let e = xq.lift(r);
                        for k in 1..=n {
                            for a in 1..=g {
                                out[p].insert(&red(&xq.bracket(&gen(G::x(k, a)), &e)));
                            }
                        }
                    }
                }
            }
            out
        };
        let all: Vec<(usize, SparseVec)> = sig.iter().flatten().cloned().collect();
        let y_all = span(all);
        let y1 = span(sig[1..].iter().flatten().cloned().collect());
        let y0 = span(sig[3..].iter().flatten().cloned().collect());
        let v0 = t_generated(&xq, pmax)?;
        let v0_rows: Vec<Vec<SparseVec>> = v0.iter().map(|e| e.rows().to_vec()).collect();
        let vall: Vec<Vec<SparseVec>> = (0..=pmax)
            .map(|p| xq.slice_range(p, 1).map(|r| r.map(SparseVec::unit).collect()).unwrap_or_default())
            .collect();
        let vdims: Vec<usize> = (0..=pmax).map(|p| xq.dim_at(p, 1).unwrap_or(0)).collect();
        let m = module_m(g, n, 1, pmax.max(1))?;
        let mij = if n >= 2 { Some(module_mij(g, n, 1, 2, pmax.max(1))?) } else { None };
        let pairs = n * n.saturating_sub(1) / 2;
        let triples = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
        let quads = if n >= 4 { n * (n - 1) * (n - 2) * (n - 3) / 8 } else { 0 };
        for p in 0..=pmax {
            // L_2(V) is the exterior square of V
            let mut wedge = 0;
            for p1 in 0..=p / 2 {
                let p2 = p - p1;
                wedge += if p1 == p2 { vdims[p1] * vdims[p1].saturating_sub(1) / 2 } else { vdims[p1] * vdims[p2] };
            }
            let dx = xq.dim_at(p, 2).unwrap_or(0);
            if dx != wedge {
                failures.push(format!("p={p}: dim L_2(V) = {dx} but Λ²V = {wedge}"));
            }
            let x0 = bracket_span(&xq, &v0, &v0_rows, p).rank();
            let x1 = bracket_span(&xq, &v0, &vall, p).rank();
            let z0 = bracket_span(&tq, &t_generated(&tq, pmax)?, &t_generated(&tq, pmax)?.iter().map(|e| e.rows().to_vec()).collect::<Vec<_>>(), p).rank();
            let tall: Vec<Vec<SparseVec>> = (0..=pmax)
                .map(|pp| tq.slice_range(pp, 1).map(|r| r.map(SparseVec::unit).collect()).unwrap_or_default())
                .collect();
            let z1 = bracket_span(&tq, &t_generated(&tq, pmax)?, &tall, p).rank();
            let dt = tq.dim_at(p, 2).unwrap_or(0);
            let (ya, y1d, y0d) = (y_all[p].rank(), y1[p].rank(), y0[p].rank());
            if ya != dx - dt {
                failures.push(format!("p={p}: dim Y = {ya} but dim L_2(V) − dim t[p,2] = {}", dx - dt));
            }
            if y1d != x1 - z1 {
                failures.push(format!("p={p}: dim Σ2..Σ5 = {y1d} but dim Y∩X_1 = {}", x1 - z1));
            }
            if y0d != x0 - z0 {
                failures.push(format!("p={p}: dim Σ4+Σ5 = {y0d} but dim Y∩X_0 = {}", x0 - z0));
            }
            // gr(Y) against module counts
            let mm = m.tensor(&m).dim(p);
            let pred2 = pairs * mm;
            let mut pred1 = 0;
            let mut pred0 = 0;
            if let Some(mij) = &mij {
                if p >= 1 {
                    let t1 = m.tensor(mij).dim(p - 1);
                    pred1 = pairs * (n - 2) * t1 + pairs * t1;
                }
                if p >= 2 {
                    let tt = mij.tensor(mij).dim(p - 2);
                    let mijk = if n >= 3 { module_mijk(g, n, [1, 2, 3], p.max(1))?.dim(p - 2) } else { 0 };
                    pred0 = quads * tt + triples * (3 * tt - mijk);
                }
            }
            let got = (ya - y1d, y1d - y0d, y0d);
            if got != (pred2, pred1, pred0) {
                failures.push(format!("p={p}: gr(Y) dims {got:?}, predicted {:?}", (pred2, pred1, pred0)));
            }
            table.push(json!({ "p": p, "L2V": dx, "t": dt, "Y": ya, "Y1": y1d, "Y0": y0d }));
        }
        Ok(())
    })();
    if let Err(e) = res {
        failures.push(e.to_string());
    }
    CheckRecord::exact("modules", "y_filtration", json!({ "g": g, "n": n, "pmax": pmax }), &failures, json!({ "slices": table }))
}

/// Kernel of the property-(P) map of `m` for the pair `(i,j)` in degree `d`.
pub fn property_p_kernel(m: &GradedModule, i: usize, j: usize, d: usize) -> Vec<SparseVec> {
    let (g, n) = (m.g, m.n);
    let src = m.dim(d);
    let tgt = m.dim(d + 1);
    let others: Vec<usize> = (1..=n).filter(|k| *k != i && *k != j).collect();
    let blocks = g * g * g * others.len() + 2 * g;
    let mut images = Vec::with_capacity(g * g * src);
    for a in 0..g {
        for b in 0..g {
            for c0 in 0..src {
                let unit = SparseVec::unit(c0);
                let mut terms: Vec<(usize, Q)> = Vec::new();
                let mut block = 0;
                for k in &others {
                    for c in 0..g {
                        for (aa, bb) in (0..g).flat_map(|x| (0..g).map(move |y| (x, y))) {
                            if (aa, bb) == (a, b) {
                                for (col, x) in m.act(*k, c + 1, d, &unit).entries() {
                                    terms.push((block * tgt + col, x.clone()));
                                }
                            }
                            block += 1;
                        }
                    }
                }
                // Σ_c x^i_c β_{c a'}: β_ab feeds component a' = b with c = a
                for (col, x) in m.act(i, a + 1, d, &unit).entries() {
                    terms.push(((block + b) * tgt + col, x.clone()));
                }
                block += g;
                // Σ_c x^j_c β_{a' c}: β_ab feeds component a' = a with c = b
                for (col, x) in m.act(j, b + 1, d, &unit).entries() {
                    terms.push(((block + a) * tgt + col, x.clone()));
                }
                images.push(SparseVec::from_entries(terms));
            }
        }
    }
    kernel(&images, blocks * tgt)
}

pub fn check_property_p(m: &GradedModule, i: usize, j: usize, dmax: usize) -> CheckRecord {
    let mut failures = Vec::new();
    let mut dims = Vec::new();
    for d in 0..=dmax.min(m.max_degree.saturating_sub(1)) {
        let k = property_p_kernel(m, i, j, d);
        dims.push(json!({ "degree": d, "source_dim": m.g * m.g * m.dim(d), "kernel_dim": k.len() }));
        if let Some(v) = k.first() {
            let shown: Vec<String> = v.entries().iter().map(|(c, x)| format!("{c}:{x}")).collect();
            failures.push(format!("degree {d}: kernel vector {}", shown.join(" ")));
        }
    }
    if m.max_degree < dmax + 1 {
        failures.push(format!("module built only to degree {}", m.max_degree));
    }
    CheckRecord::exact(
        "modules",
        "property_P",
        json!({ "module": m.name, "g": m.g, "n": m.n, "pair": [i, j], "degree": dmax }),
        &failures,
        json!({ "degrees": dims }),
    )
}

/// Solves the linear system of the vanishing proposition for families
/// `(β_ab)` in the degree-`p` part of `[V_i, V_j] ⊂ t[·,2]`; returns the
/// dimension of `[V_i,V_j]_p` and the kernel dimension.
pub fn prop_alg_kernel(tq: &GradedQuotient, i: usize, j: usize, p: usize) -> Result<(usize, usize)> {
    let g = tq.g;
    let n = tq.n;
    let b = tq.bounds();
    if !b.contains(p + 1, 2) {
        return Err(Error::Truncation(format!("need slice ({},2)", p + 1)));
    }
    // V_k: linear span of x^k-brackets on y^k_b and t_kl
    let v_span = |k: usize| -> Result<Vec<Vec<SparseVec>>> {
        let mut out: Vec<Vec<SparseVec>> = vec![Vec::new(); p + 1];
        let mut frontier: Vec<(usize, LieElement)> = Vec::new();
        for bb in 1..=g {
            frontier.push((0, tq.generator(G::y(k, bb))?));
        }
        for l in (1..=n).filter(|l| *l != k) {
            frontier.push((1, tq.generator(G::t(k, l))?));
        }
        while let Some((deg, e)) = frontier.pop() {
            if deg > p {
                continue;
            }
            out[deg].push(tq.reduce(&e)?);
            for a in 1..=g {
                frontier.push((deg + 1, tq.bracket(&tq.generator(G::x(k, a))?, &e)));
            }
        }
        Ok(out)
    };
    let vi = v_span(i)?;
    let vj = v_span(j)?;
    let mut w = Echelon::new();
    for p1 in 0..=p {
        for u in &vi[p1] {
            for v in &vj[p - p1] {
                w.insert(&tq.bracket_coords(u, v));
            }
        }
    }
    let basis: Vec<LieElement> = w.rows().iter().map(|r| tq.lift(r)).collect();
    let target = tq.slice_range(p + 1, 2).expect("slice");
    let tdim = target.len();
    let off = target.start;
    let others: Vec<usize> = (1..=n).filter(|k| *k != i && *k != j).collect();
    let xs = |k: usize, a: usize| tq.generator(G::x(k, a)).expect("x");
    // block layout of constraints
    let n_blocks = g * g * g * others.len() + 2 * g;
    let mut images = Vec::new();
    for a in 0..g {
        for bb in 0..g {
            for e in &basis {
                let mut terms: Vec<(usize, Q)> = Vec::new();
                let mut block = 0;
                for k in &others {
                    for c in 0..g {
                        for (aa, b2) in (0..g).flat_map(|x| (0..g).map(move |y| (x, y))) {
                            if (aa, b2) == (a, bb) {
                                let v = tq.reduce(&tq.bracket(&xs(*k, c + 1), e))?;
                                terms.extend(v.entries().iter().map(|(col, x)| (block * tdim + col - off, x.clone())));
                            }
                            block += 1;
                        }
                    }
                }
                // (b): for each b', Σ_a [x^i_a, β_{a b'}]
                let v = tq.reduce(&tq.bracket(&xs(i, a + 1), e))?;
                terms.extend(v.entries().iter().map(|(col, x)| ((block + bb) * tdim + col - off, x.clone())));
                block += g;
                // (c): for each a', Σ_b [x^j_b, β_{a' b}]
                let v = tq.reduce(&tq.bracket(&xs(j, bb + 1), e))?;
                terms.extend(v.entries().iter().map(|(col, x)| ((block + a) * tdim + col - off, x.clone())));
                images.push(SparseVec::from_entries(terms));
            }
        }
    }
    let k = kernel(&images, n_blocks * tdim);
    Ok((basis.len(), k.len()))
}

pub fn check_prop_alg(tq: &GradedQuotient, i: usize, j: usize, pmax: usize) -> CheckRecord {
    let mut failures = Vec::new();
    let mut table = Vec::new();
    for p in 0..=pmax {
        match prop_alg_kernel(tq, i, j, p) {
            Ok((dim, ker)) => {
                table.push(json!({ "p": p, "dim_ViVj": dim, "kernel": ker }));
                if ker != 0 {
                    failures.push(format!("p={p}: kernel of dimension {ker}"));
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    CheckRecord::exact(
        "modules",
        "prop_alg",
        json!({ "g": tq.g, "n": tq.n, "pair": [i, j], "pmax": pmax }),
        &failures,
        json!({ "degrees": table }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiword_counts() {
        assert_eq!(multiwords(2, 2, 2).len(), 3 * 4);
        assert_eq!(multiwords(3, 1, 2).len(), 6);
        assert_eq!(multiwords(1, 3, 0).len(), 1);
    }

    #[test]
    fn m_dims_g1_and_g2() {
        let m = module_m(1, 1, 1, 3).unwrap();
        assert_eq!(m.dims(), &[1, 0, 0, 0]);
        let m = module_m(2, 1, 1, 3).unwrap();
        assert_eq!(m.dims(), &[2, 3, 6, 12]);
    }

    #[test]
    fn mij_dims() {
        let m = module_mij(2, 2, 1, 2, 3).unwrap();
        assert_eq!(m.dims(), &[1, 2, 4, 8]);
        assert!(mij_identifies_with_f(&m, 1, 2).is_ok());
    }

    #[test]
    fn tensor_and_wedge_dims() {
        let m = module_mij(1, 2, 1, 2, 3).unwrap();
        assert_eq!(m.tensor(&m).dims(), &[1, 2, 3, 4]);
        assert_eq!(m.exterior_square().dims(), &[0, 1, 1, 2]);
    }
}
