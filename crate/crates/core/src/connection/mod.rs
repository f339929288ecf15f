//! The connection forms α_i with values in the truncated quotient of t_{g,n}.
//!
//! α_i(z) = Σ_{A,b} ω_{A b}(z_i, w) [x_A^i, y_b^i] + Σ_{j≠i} Σ_A ψ_A^{z_i w z_j} [x_A^i, t_ij],
//! where [x_A, u] = [x_{a_1},[x_{a_2},…,[x_{a_s}, u]]]. Values are the dz_i
//! coefficients as complex vectors in quotient coordinates.

pub mod checks;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{GeneratorSymbol, LieElement};
use crate::linalg::q_to_f64;
use crate::schottky::{FormEvaluator, SchottkyGroup};
use crate::tgn::{Bounds, GradedQuotient, SimplicialMap, StructureConstants};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub type SparseF = Vec<(usize, f64)>;

/// One evaluation of α_i.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectionValue {
    pub points: Vec<C64>,
    pub i: usize,
    pub w: C64,
    pub bounds: Bounds,
    pub value: Vec<C64>,
    /// estimated truncation error of the series, max over coordinates
    pub tail: f64,
}

#[derive(Clone, Debug)]
struct Term {
    /// index into the evaluator's string table
    string: usize,
    coords: SparseF,
}

pub struct Connection {
    g: usize,
    n: usize,
    bounds: Bounds,
    tq: GradedQuotient,
    sc: StructureConstants,
    ev: FormEvaluator,
    /// per point i: y-terms and, per j, t-terms
    y_terms: Vec<Vec<Term>>,
    t_terms: Vec<Vec<(usize, Vec<Term>)>>,
    /// bracket monomials [x_A^i, t_ij] whose bidegree leaves the window
    dropped: usize,
    max_coef: f64,
}

fn to_f64(v: &crate::linalg::SparseVec) -> SparseF {
    v.entries().iter().map(|(c, x)| (*c, q_to_f64(x))).collect()
}

fn add_scaled(acc: &mut [C64], c: C64, v: &SparseF) {
    for (k, x) in v {
        acc[*k] += c * *x;
    }
}

impl Connection {
    pub fn new(group: &SchottkyGroup, n: usize, bounds: Bounds, l: usize) -> Result<Self> {
        let g = group.genus();
        if n == 0 {
            return Err(Error::Domain("need n >= 1 points".into()));
        }
        if bounds.qmax == 0 {
            return Err(Error::Domain("the connection lives in q-degree 1; need Qmax >= 1".into()));
        }
        let tq = GradedQuotient::tgn(g, n, bounds)?;
        let sc = tq.structure_constants();
        let ev = FormEvaluator::new(group, l, bounds.pmax);
        let st = ev.strings().clone();
        let nest = |i: usize, a: &[usize], inner: LieElement| -> Result<LieElement> {
            let mut e = inner;
            for &ak in a.iter().rev() {
                e = tq.bracket(&tq.generator(GeneratorSymbol::x(i, ak + 1))?, &e);
            }
            Ok(e)
        };
        let mut y_terms = Vec::with_capacity(n);
        let mut t_terms = Vec::with_capacity(n);
        let mut dropped = 0usize;
        let mut max_coef = 0.0f64;
        for i in 1..=n {
            let mut ys = Vec::new();
            for s in 0..=bounds.pmax {
                if !bounds.contains(s, 1) {
                    continue;
                }
                for idx in st.range(s) {
                    let a = st.string(idx);
                    for b in 0..g {
                        let e = nest(i, &a, tq.generator(GeneratorSymbol::y(i, b + 1))?)?;
                        let coords = to_f64(&tq.reduce(&e)?);
                        max_coef = coords.iter().fold(max_coef, |m, e| m.max(e.1.abs()));
                        let mut full = a.clone();
                        full.push(b);
                        ys.push(Term { string: st.index(&full), coords });
                    }
                }
            }
            let mut ts = Vec::new();
            for j in (1..=n).filter(|&j| j != i) {
                let mut terms = Vec::new();
                for s in 0..=bounds.pmax {
                    for idx in st.range(s) {
                        if !bounds.contains(s + 1, 1) {
                            dropped += 1;
                            continue;
                        }
                        let a = st.string(idx);
                        let e = nest(i, &a, tq.generator(GeneratorSymbol::t(i, j))?)?;
                        let coords = to_f64(&tq.reduce(&e)?);
                        max_coef = coords.iter().fold(max_coef, |m, e| m.max(e.1.abs()));
                        terms.push(Term { string: idx, coords });
                    }
                }
                ts.push((j, terms));
            }
            y_terms.push(ys);
            t_terms.push(ts);
        }
        Ok(Self { g, n, bounds, tq, sc, ev, y_terms, t_terms, dropped, max_coef })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn quotient(&self) -> &GradedQuotient {
        &self.tq
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.sc
    }

    pub fn evaluator(&self) -> &FormEvaluator {
        &self.ev
    }

    pub fn group(&self) -> &SchottkyGroup {
        self.ev.group()
    }

    pub fn dim(&self) -> usize {
        self.tq.dim()
    }

    pub fn dropped_terms(&self) -> usize {
        self.dropped
    }

    /// Quotient coordinates of a generator as a complex vector.
    pub fn generator_vec(&self, s: GeneratorSymbol) -> Result<Vec<C64>> {
        let v = self.tq.reduce(&self.tq.generator(s)?)?;
        let mut out = vec![ZERO; self.dim()];
        for (k, x) in to_f64(&v) {
            out[k] = C64::new(x, 0.0);
        }
        Ok(out)
    }

    /// Coordinate of a generator that is a single basis vector.
    pub fn generator_coord(&self, s: GeneratorSymbol) -> Result<usize> {
        let v = self.tq.reduce(&self.tq.generator(s)?)?;
        match v.entries() {
            [(c, x)] if q_to_f64(x) == 1.0 => Ok(*c),
            _ => Err(Error::Domain(format!("{s} is not a basis vector of the quotient"))),
        }
    }

    pub fn bracket(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        self.sc.bracket(a, b)
    }

    /// e^{ad x}(v) in the truncation.
    pub fn exp_ad(&self, x: &[C64], v: &[C64]) -> Vec<C64> {
        let mut out = v.to_vec();
        let mut term = v.to_vec();
        for k in 1..=self.bounds.pmax + self.bounds.qmax {
            term = self.bracket(x, &term);
            if term.iter().all(|c| *c == ZERO) {
                break;
            }
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t / factorial(k);
            }
        }
        out
    }

    /// α_i at the point tuple (1-based i), with auxiliary point w.
    pub fn eval(&self, points: &[C64], i: usize, w: C64) -> Result<ConnectionValue> {
        if points.len() != self.n || i == 0 || i > self.n {
            return Err(Error::Domain(format!("need {} points and 1 <= i <= {}", self.n, self.n)));
        }
        for a in 0..self.n {
            for b in a + 1..self.n {
                if (points[a] - points[b]).norm() == 0.0 {
                    return Err(Error::Domain(format!("points {} and {} coincide", a + 1, b + 1)));
                }
            }
        }
        let z = points[i - 1];
        if (z - w).norm() == 0.0 {
            return Err(Error::Domain("auxiliary point coincides with z_i".into()));
        }
        let mut value = vec![ZERO; self.dim()];
        let (om, mut tail) = self.ev.omega_all(z, w);
        for t in &self.y_terms[i - 1] {
            add_scaled(&mut value, om[t.string], &t.coords);
        }
        for (j, terms) in &self.t_terms[i - 1] {
            let (p3, tj) = self.ev.psi3_all(z, w, points[j - 1]);
            tail += tj;
            for t in terms {
                add_scaled(&mut value, p3[t.string], &t.coords);
            }
        }
        Ok(ConnectionValue {
            points: points.to_vec(),
            i,
            w,
            bounds: self.bounds,
            value,
            tail: tail * self.max_coef.max(1.0),
        })
    }

    /// The expected a-period Σ_k b_k (ad x_a^i)^k (y_a^i), truncated.
    pub fn expected_a_period(&self, i: usize, a: usize) -> Result<Vec<C64>> {
        let b = crate::schottky::checks::bernoulli_b(self.bounds.pmax);
        let x = self.generator_vec(GeneratorSymbol::x(i, a + 1))?;
        let mut term = self.generator_vec(GeneratorSymbol::y(i, a + 1))?;
        let mut out: Vec<C64> = term.iter().map(|c| c * b[0]).collect();
        for bk in b.iter().skip(1) {
            term = self.bracket(&x, &term);
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t * *bk;
            }
        }
        Ok(out)
    }

    /// Dense complex matrix (by source coordinate) of the simplicial map
    /// t_{g,n-1} → t_{g,n}/ℂt_12, with `self` the source and `target` the
    /// target connection.
    pub fn simplicial_matrix(&self, target: &Connection) -> Result<(Vec<SparseF>, usize)> {
        let map = SimplicialMap::new(&self.tq, &target.tq)?;
        let mut cols = Vec::with_capacity(self.dim());
        for k in 0..self.dim() {
            let v = map.image_coords(&crate::linalg::SparseVec::unit(k))?;
            cols.push(to_f64(&v));
        }
        Ok((cols, map.t12_coord()))
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

pub fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn l1_norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm()).sum()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn apply_sparse(cols: &[SparseF], v: &[C64], dim: usize) -> Vec<C64> {
    let mut out = vec![ZERO; dim];
    for (k, c) in v.iter().enumerate() {
        if *c != ZERO {
            add_scaled(&mut out, *c, &cols[k]);
        }
    }
    out
}
