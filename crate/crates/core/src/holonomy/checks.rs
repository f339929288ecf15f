//! Numerical checks of the monodromy representation.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{relations, BraidWord, Gen, Holonomy, Orientation, Piece, Relation, TransportOptions, Transported};
use crate::error::Result;
use crate::lie::GeneratorSymbol;
use crate::quad::Quadrature;
use crate::report::CheckRecord;
use crate::schottky::checks::{Worst, ROUNDOFF, SAFETY};
use crate::schottky::CurveConfig;

pub const SUITE: &str = "holonomy";

#[derive(Clone, Debug)]
pub struct HolonomySetup {
    pub curve: CurveConfig,
    pub n: usize,
    pub order: usize,
    pub options: TransportOptions,
    pub orientation: Orientation,
}

impl HolonomySetup {
    pub fn new(curve: CurveConfig, n: usize, order: usize) -> Self {
        Self { curve, n, order, options: TransportOptions::default(), orientation: Orientation::Counterclockwise }
    }

    pub fn build(&self) -> Result<Holonomy> {
        Holonomy::new(&self.curve.group()?, self.n, self.order, self.curve.l, self.orientation, self.options.clone())
    }
}

type Table = BTreeMap<Gen, Transported>;

fn instance(h: &Holonomy, l: usize) -> Value {
    let o = h.options();
    json!({
        "g": h.connection().genus(), "n": h.points(), "N": h.order(), "L": l,
        "nodes": o.nodes, "segments": o.segments, "standard_layout": h.standard_layout(),
    })
}

fn c2(c: C64) -> Value {
    json!([c.re, c.im])
}

/// Nonzero log coordinates grouped by total degree.
pub fn log_by_degree(h: &Holonomy, log: &[C64]) -> Vec<BTreeMap<String, Value>> {
    let tq = h.connection().quotient();
    let mut out = vec![BTreeMap::new(); h.order()];
    for (k, c) in log.iter().enumerate() {
        if c.norm() > 1e-14 {
            let d = h.envelope().letter_degree(k);
            out[d - 1].insert(tq.basis_label(k), c2(*c));
        }
    }
    out
}

fn max_through(by_degree: &[f64], limit: usize) -> f64 {
    by_degree.iter().take(limit).fold(0.0, |a, b| a.max(*b))
}

/// All standard generators: X_a^i, Y_a^i and σ_i.
pub fn all_generators(g: usize, n: usize) -> Vec<Gen> {
    let mut out = Vec::new();
    for a in 1..=g {
        for i in 1..=n {
            out.push(Gen::X { a, i });
            out.push(Gen::Y { a, i });
        }
    }
    for i in 1..n {
        out.push(Gen::Sigma { i });
    }
    out
}

/// One record per transported generator; the residual is the
/// group-likeness defect.
pub fn generator_records(h: &Holonomy, table: &Table, inst: &Value) -> Vec<CheckRecord> {
    let env = h.envelope();
    table
        .iter()
        .map(|(g, t)| {
            let log = env.log(&t.element);
            let budget = t.budget(h.order()) + ROUNDOFF;
            let detail = json!({
                "generator": g.to_string(),
                "N": h.order(),
                "log_coordinates_by_degree": log_by_degree(h, &log),
                "permutation": t.element.perm.iter().map(|k| k + 1).collect::<Vec<_>>(),
                "budget": budget,
                "quad_error": t.quad_error,
                "tail": t.tail,
            });
            let mut inst = inst.clone();
            inst["generator"] = json!(g.to_string());
            CheckRecord::numeric(SUITE, "monodromy_generator", inst, env.lie_defect(&t.element), budget, SAFETY, detail)
        })
        .collect()
}

/// A constant path transports to the identity.
pub fn check_identity_path(h: &Holonomy, inst: &Value) -> Result<CheckRecord> {
    let base = h.geometry().base.clone();
    let pieces = vec![Piece::Move(vec![(0, crate::quad::Path::segment(base[0], base[0]))])];
    let (t, _) = h.transport_open("constant", &pieces, &base)?;
    let id = h.envelope().identity();
    let r = t.element.coeffs.iter().zip(&id.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    Ok(CheckRecord::numeric(SUITE, "identity_path", inst.clone(), r, ROUNDOFF, SAFETY, json!({})))
}

/// Single-letter coefficients against a plain line integral on an
/// independent rule (plus the crossing terms).
pub fn check_direct_degree_one(h: &Holonomy, table: &Table, inst: &Value) -> CheckRecord {
    let mut w = Worst::default();
    for (g, t) in table {
        w.push(t.degree_one_gap(h.envelope()), t.quad_error + t.tail + ROUNDOFF, || g.to_string());
    }
    w.record(SUITE, "degree_one_direct", inst.clone(), json!({}))
}

/// The same loops with the t ↦ t² parametrization of every leg.
pub fn check_reparametrization(h: &Holonomy, table: &Table, inst: &Value) -> Result<CheckRecord> {
    let g = h.connection().genus();
    let mut gens = vec![Gen::X { a: 1, i: 1 }, Gen::Y { a: g, i: h.points() }];
    if h.points() >= 2 {
        gens.push(Gen::Sigma { i: 1 });
    }
    let mut w = Worst::default();
    for gen in gens {
        let lp = h.geometry().loop_for(h.group(), gen)?;
        let t2 = h.transport_with(&lp, true)?;
        let t1 = &table[&gen];
        let r = t1.element.coeffs.iter().zip(&t2.element.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        w.push(r, (t1.quad_error + t2.quad_error + ROUNDOFF) * t1.amplitude.powi(h.order() as i32 - 1), || gen.to_string());
    }
    Ok(w.record(SUITE, "reparametrization", inst.clone(), json!({})))
}

/// transport(p·q) = transport(p)·transport(q), with the cut placed in the
/// middle of the a-cycle leg of X_1^1.
pub fn check_concatenation(h: &Holonomy, table: &Table, inst: &Value) -> Result<CheckRecord> {
    let lp = h.geometry().loop_x(h.group(), 1, 1)?;
    let m = lp.pieces.len() / 2;
    let mut first: Vec<Piece> = lp.pieces[..m].to_vec();
    let mut second: Vec<Piece> = lp.pieces[m + 1..].to_vec();
    match &lp.pieces[m] {
        Piece::Move(moves) => {
            let (a, b): (Vec<_>, Vec<_>) = moves.iter().map(|(k, p)| {
                let (p1, p2) = p.split(0.5);
                ((*k, p1), (*k, p2))
            }).unzip();
            first.push(Piece::Move(a));
            second.insert(0, Piece::Move(b));
        }
        cross => first.push(cross.clone()),
    }
    let base = h.geometry().base.clone();
    let (t1, mid) = h.transport_open("first half", &first, &base)?;
    let (t2, _) = h.transport_open("second half", &second, &mid)?;
    let env = h.envelope();
    let prod = env.mul_pure(&t1.element.coeffs, &t2.element.coeffs);
    let whole = &table[&Gen::X { a: 1, i: 1 }];
    let r = prod.iter().zip(&whole.element.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let budget = (t1.quad_error + t2.quad_error + whole.quad_error + ROUNDOFF) * whole.amplitude.powi(h.order() as i32 - 1);
    Ok(CheckRecord::numeric(SUITE, "concatenation", inst.clone(), r, budget, SAFETY, json!({ "loop": "X1^1", "cut": "middle of the a-cycle" })))
}

/// Genus one: the bare a-cycle of point i transports to
/// exp(Σ_k b_k (ad x^i)^k y^i) through degree 2. In higher genus the
/// iterated integrals add [y_a^i, y_b^i] terms, so the check is skipped.
pub fn check_a_cycle_log(h: &Holonomy, inst: &Value) -> Result<Option<CheckRecord>> {
    if h.connection().genus() != 1 {
        return Ok(None);
    }
    let env = h.envelope();
    let limit = h.order().min(2);
    let mut w = Worst::default();
    for i in 1..=h.points() {
        let cycle = h.group().a_cycle(0);
        let mut start = h.geometry().base.clone();
        start[i - 1] = cycle.start();
        let (t, _) = h.transport_open("a-cycle", &[Piece::Move(vec![(i - 1, cycle)])], &start)?;
        let log = env.log(&t.element);
        let expect = h.connection().expected_a_period(i, 0)?;
        let diff: Vec<C64> = log.iter().zip(&expect).map(|(a, b)| a - b).collect();
        let r = max_through(&env.by_degree(&diff), limit);
        w.push(r, t.budget(h.order()) + ROUNDOFF, || format!("point {i}"));
    }
    Ok(Some(w.record(SUITE, "a_cycle_log", inst.clone(), json!({ "through_degree": limit }))))
}

/// Word Z^i = σ_{i-1}^{-1}⋯σ_1^{-1} Z σ_1^{-1}⋯σ_{i-1}^{-1} for Z = X_a or Y_a.
pub fn derived_pure(z: Gen, i: usize) -> BraidWord {
    let mut left = BraidWord::default();
    for k in (1..i).rev() {
        left = left.then(&BraidWord::gen(Gen::Sigma { i: k }).inverse());
    }
    let mut right = BraidWord::default();
    for k in 1..i {
        right = right.then(&BraidWord::gen(Gen::Sigma { i: k }).inverse());
    }
    left.then(&BraidWord::gen(z)).then(&right)
}

/// Conjugate σ_{i-1}⋯σ_1 Z σ_1^{-1}⋯σ_{i-1}^{-1}: the loop of point i
/// that follows the route of point 1.
pub fn conjugated_pure(z: Gen, i: usize) -> BraidWord {
    let mut left = BraidWord::default();
    for k in (1..i).rev() {
        left = left.then(&BraidWord::gen(Gen::Sigma { i: k }));
    }
    let right = left.inverse();
    left.then(&BraidWord::gen(z)).then(&right)
}

/// Degree-1 parts: X_a^i ↦ y_a^i and Y_a^i ↦ x_a^i + Σ_b τ_ab y_b^i,
/// for the geometric loops and for the derived words of the presentation.
pub fn check_leading_terms(h: &Holonomy, table: &Table, quad_nodes: usize, inst: &Value) -> Result<CheckRecord> {
    let conn = h.connection();
    let env = h.envelope();
    let g = conn.genus();
    let pm = conn.evaluator().period_matrix(h.geometry().w, &Quadrature::new(quad_nodes, 8))?;
    let pm_err = pm.tail + pm.quad_error;
    let mut w = Worst::default();
    for a in 1..=g {
        for i in 1..=h.points() {
            let ex = conn.generator_vec(GeneratorSymbol::y(i, a))?;
            let mut ey = conn.generator_vec(GeneratorSymbol::x(i, a))?;
            for b in 1..=g {
                let yb = conn.generator_vec(GeneratorSymbol::y(i, b))?;
                for (e, v) in ey.iter_mut().zip(&yb) {
                    *e += pm.tau[a - 1][b - 1] * v;
                }
            }
            for (gen, expect, with_tau) in [(Gen::X { a, i }, &ex, false), (Gen::Y { a, i }, &ey, true)] {
                let extra = if with_tau { pm_err } else { 0.0 };
                let t = &table[&gen];
                let diff: Vec<C64> = env.log(&t.element).iter().zip(expect.iter()).map(|(p, q)| p - q).collect();
                w.push(env.by_degree(&diff)[0], t.budget(h.order()) + extra + ROUNDOFF, || gen.to_string());
                if i >= 2 {
                    let z = if with_tau { Gen::Y { a, i: 1 } } else { Gen::X { a, i: 1 } };
                    let word = derived_pure(z, i);
                    let (e, budget, amp) = h.evaluate(&word, table)?;
                    let diff: Vec<C64> = env.log(&e).iter().zip(expect.iter()).map(|(p, q)| p - q).collect();
                    let b = budget * amp.powi(h.order() as i32) + extra + ROUNDOFF;
                    w.push(env.by_degree(&diff)[0], b, || format!("{word}"));
                }
            }
        }
    }
    Ok(w.record(SUITE, "leading_terms", inst.clone(), json!({ "tau": pm.tau.iter().map(|r| r.iter().map(|c| c2(*c)).collect::<Vec<_>>()).collect::<Vec<_>>() })))
}

/// log σ_i² = t_{i,i+1} through degree 2 (the iterated areas of the
/// holomorphic forms vanish on the small exchange circle).
pub fn check_sigma_square(h: &Holonomy, table: &Table, inst: &Value) -> Result<Option<CheckRecord>> {
    let n = h.points();
    if n < 2 {
        return Ok(None);
    }
    let env = h.envelope();
    let limit = h.order().min(2);
    let mut w = Worst::default();
    for i in 1..n {
        let s = BraidWord::gen(Gen::Sigma { i });
        let (e, budget, amp) = h.evaluate(&s.clone().then(&s), table)?;
        let expect = h.connection().generator_vec(GeneratorSymbol::t(i, i + 1))?;
        let diff: Vec<C64> = env.log(&e).iter().zip(&expect).map(|(a, b)| a - b).collect();
        let mut r = max_through(&env.by_degree(&diff), limit);
        if e.perm != env.identity_perm() {
            r = f64::INFINITY;
        }
        w.push(r, budget * amp.powi(h.order() as i32) + ROUNDOFF, || format!("s{i}^2"));
    }
    Ok(Some(w.record(SUITE, "sigma_square", inst.clone(), json!({ "through_degree": limit }))))
}

fn word_residual(h: &Holonomy, table: &Table, lhs: &BraidWord, rhs: &BraidWord) -> Result<(Vec<f64>, bool, f64)> {
    let env = h.envelope();
    let (l, bl, al) = h.evaluate(lhs, table)?;
    let (r, br, ar) = h.evaluate(rhs, table)?;
    let d = env.mul(&l, &env.inverse(&r)?)?;
    let len = (lhs.0.len() + rhs.0.len()).max(1) as f64;
    let budget = (bl + br + ROUNDOFF * len) * al.max(ar).powi(h.order() as i32);
    Ok((env.by_degree(&env.log(&d)), d.perm == env.identity_perm(), budget))
}

/// The geometric loop of point i ≥ 2 equals the conjugate of the loop of
/// point 1 by σ_{i-1}⋯σ_1, at every degree.
pub fn check_pure_generators(h: &Holonomy, table: &Table, inst: &Value) -> Result<Option<CheckRecord>> {
    let n = h.points();
    if n < 2 {
        return Ok(None);
    }
    let limit = if h.standard_layout() { h.order() } else { h.order().min(2) };
    let mut w = Worst::default();
    for a in 1..=h.connection().genus() {
        for i in 2..=n {
            for (z, zi) in [(Gen::X { a, i: 1 }, Gen::X { a, i }), (Gen::Y { a, i: 1 }, Gen::Y { a, i })] {
                let word = conjugated_pure(z, i);
                let (bd, perm_ok, budget) = word_residual(h, table, &BraidWord::gen(zi), &word)?;
                let r = if perm_ok { max_through(&bd, limit) } else { f64::INFINITY };
                w.push(r, budget, || format!("{zi} = {word}"));
            }
        }
    }
    Ok(Some(w.record(SUITE, "pure_generators", inst.clone(), json!({ "through_degree": limit }))))
}

/// One record per relation family; the residual is the largest log
/// coordinate of LHS·RHS^{-1} over the family, permutations must agree
/// exactly.
pub fn check_relations(h: &Holonomy, table: &Table, rels: &[Relation], inst: &Value) -> Result<Vec<CheckRecord>> {
    let limit = if h.standard_layout() { h.order() } else { h.order().min(2) };
    let mut families: BTreeMap<&str, (Worst, Vec<Value>)> = BTreeMap::new();
    let mut order: Vec<&str> = Vec::new();
    for r in rels {
        let (bd, perm_ok, budget) = word_residual(h, table, &r.lhs, &r.rhs)?;
        let res = if perm_ok { max_through(&bd, limit) } else { f64::INFINITY };
        if !families.contains_key(r.family) {
            order.push(r.family);
        }
        let entry = families.entry(r.family).or_default();
        entry.0.push(res, budget, || r.name.clone());
        entry.1.push(json!({
            "relation": r.name, "lhs": r.lhs.to_string(), "rhs": r.rhs.to_string(),
            "residual_by_degree": bd, "permutation_exact": perm_ok, "budget": budget,
        }));
    }
    Ok(order
        .into_iter()
        .map(|f| {
            let (w, items) = families.remove(f).expect("family");
            w.record(SUITE, f, inst.clone(), json!({ "through_degree": limit, "relations": items }))
        })
        .collect())
}

/// The whole holonomy suite for one (g, n, N).
pub fn holonomy_suite(setup: &HolonomySetup) -> Result<Vec<CheckRecord>> {
    let h = setup.build()?;
    let inst = instance(&h, setup.curve.l);
    let g = h.connection().genus();
    let table = h.generators(&all_generators(g, setup.n))?;
    let rels = relations(g, setup.n);
    let mut out = generator_records(&h, &table, &inst);
    type Job<'a> = Box<dyn Fn() -> Result<Vec<CheckRecord>> + Sync + 'a>;
    let one = |r: Result<CheckRecord>| r.map(|x| vec![x]);
    let opt = |r: Result<Option<CheckRecord>>| r.map(|x| x.into_iter().collect());
    let jobs: Vec<Job> = vec![
        Box::new(|| one(check_identity_path(&h, &inst))),
        Box::new(|| Ok(vec![check_direct_degree_one(&h, &table, &inst)])),
        Box::new(|| one(check_reparametrization(&h, &table, &inst))),
        Box::new(|| one(check_concatenation(&h, &table, &inst))),
        Box::new(|| opt(check_a_cycle_log(&h, &inst))),
        Box::new(|| one(check_leading_terms(&h, &table, setup.curve.quad_nodes, &inst))),
        Box::new(|| opt(check_sigma_square(&h, &table, &inst))),
        Box::new(|| opt(check_pure_generators(&h, &table, &inst))),
        Box::new(|| check_relations(&h, &table, &rels, &inst)),
    ];
    let results: Vec<Result<Vec<CheckRecord>>> = jobs.par_iter().map(|j| j()).collect();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_words_have_the_documented_shape() {
        assert_eq!(derived_pure(Gen::X { a: 1, i: 1 }, 3).to_string(), "(s2)^-1 (s1)^-1 X1^1 (s1)^-1 (s2)^-1");
        assert_eq!(conjugated_pure(Gen::Y { a: 2, i: 1 }, 3).to_string(), "s2 s1 Y2^1 (s1)^-1 (s2)^-1");
        assert_eq!(derived_pure(Gen::X { a: 1, i: 1 }, 1), BraidWord::gen(Gen::X { a: 1, i: 1 }));
    }
}
