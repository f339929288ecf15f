//! Numeric checks of the connection: leading term, w-independence,
//! automorphy, residues, a-periods, closedness, commutation and the
//! simplicial restriction.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{apply_sparse, l1_norm, max_norm, sub, Connection, SparseF};
use crate::error::{Error, Result};
use crate::lie::GeneratorSymbol;
use crate::quad::{residue_vec, Quadrature};
use crate::report::CheckRecord;
use crate::schottky::checks::{Worst, ROUNDOFF};
use crate::schottky::{CurveConfig, SchottkyGroup};
use crate::tgn::Bounds;

pub const FLATNESS: &str = "flatness";
pub const SIMPLICIAL: &str = "simplicial";
/// Near-diagonal step sequence for limits onto z_1 = z_2.
pub const EPSILONS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// A point tuple with its auxiliary point.
#[derive(Clone, Debug)]
pub struct Sample {
    pub points: Vec<C64>,
    pub w: C64,
}

fn fmt_pts(p: &[C64]) -> String {
    let v: Vec<String> = p.iter().map(|z| format!("({:.4},{:.4})", z.re, z.im)).collect();
    v.join(" ")
}

/// Seeded point tuples inside the fundamental domain, pairwise at least
/// `sep` apart, plus an auxiliary point w apart from all of them.
pub fn sample_tuples(group: &SchottkyGroup, n: usize, count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sep = 0.3;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut pts: Vec<C64> = Vec::with_capacity(n + 1);
        let mut tries = 0;
        while pts.len() < n + 1 && tries < 10_000 {
            tries += 1;
            let z = group.random_point(&mut rng, 0.4);
            if pts.iter().all(|p| (p - z).norm() > sep) {
                pts.push(z);
            }
        }
        let w = pts.pop().expect("at least one point");
        out.push(Sample { points: pts, w });
    }
    out
}

fn instance(conn: &Connection) -> Value {
    json!({ "g": conn.genus(), "n": conn.points(), "bounds": conn.bounds(), "L": conn.evaluator().cutoff() })
}

fn base_detail(conn: &Connection) -> Value {
    json!({ "dim": conn.dim(), "dropped_terms": conn.dropped_terms(), "residual": "max |coordinate|" })
}

fn floor(scale: f64) -> f64 {
    ROUNDOFF * (1.0 + scale)
}

/// Distance from z_i to the nearest other singular point (other z_j and w).
fn pole_distance(s: &Sample, i: usize) -> f64 {
    let z = s.points[i - 1];
    s.points
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != i - 1)
        .map(|(_, p)| (p - z).norm())
        .chain(std::iter::once((s.w - z).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Coefficient of y_a^i equals the holomorphic ω_a(z_i) (independent oracle:
/// coset sum over words not ending in γ_a).
pub fn check_leading_term(conn: &Connection, samples: &[Sample]) -> Result<CheckRecord> {
    let g = conn.genus();
    let mut worst = Worst::default();
    for (k, s) in samples.iter().enumerate() {
        for i in 1..=conn.points() {
            let v = conn.eval(&s.points, i, s.w)?;
            for a in 0..g {
                let c = conn.generator_coord(GeneratorSymbol::y(i, a + 1))?;
                let oracle = conn.evaluator().holomorphic_coset(a, s.points[i - 1]);
                let r = (v.value[c] - oracle.value).norm();
                worst.push(r, v.tail + oracle.tail + floor(oracle.value.norm()), || format!("tuple {k} i={i} a={}", a + 1));
            }
        }
    }
    Ok(worst.record(FLATNESS, "leading_term", instance(conn), base_detail(conn)))
}

/// α_i evaluated with two different auxiliary points.
pub fn check_w_independence(conn: &Connection, samples: &[Sample], seed: u64) -> Result<CheckRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst = Worst::default();
    for (k, s) in samples.iter().enumerate() {
        let w2 = loop {
            let w = conn.group().random_point(&mut rng, 0.4);
            if s.points.iter().all(|p| (p - w).norm() > 0.3) {
                break w;
            }
        };
        for i in 1..=conn.points() {
            let a = conn.eval(&s.points, i, s.w)?;
            let b = conn.eval(&s.points, i, w2)?;
            let r = max_norm(&sub(&a.value, &b.value));
            worst.push(r, a.tail + b.tail + floor(max_norm(&a.value)), || format!("tuple {k} i={i}"));
        }
    }
    Ok(worst.record(FLATNESS, "w_independence", instance(conn), base_detail(conn)))
}

/// γ_a acting in the variable z_j: α_i at (…, γ_a^{-1} z_j, …), times the
/// Jacobian when j = i, against e^{ad x_a^j}(α_i).
pub fn automorphy_residual(conn: &Connection, s: &Sample, i: usize, j: usize, a: usize) -> Result<(f64, f64)> {
    let inv = conn.group().generator(a).inverse();
    let mut moved = s.points.clone();
    moved[j - 1] = inv.apply(s.points[j - 1]);
    let jac = if i == j { inv.derivative(s.points[i - 1]) } else { C64::new(1.0, 0.0) };
    let lhs = conn.eval(&moved, i, s.w)?;
    let base = conn.eval(&s.points, i, s.w)?;
    let x = conn.generator_vec(GeneratorSymbol::x(j, a + 1))?;
    let rhs = conn.exp_ad(&x, &base.value);
    let lhs_v: Vec<C64> = lhs.value.iter().map(|c| c * jac).collect();
    let r = max_norm(&sub(&lhs_v, &rhs));
    let scale = max_norm(&rhs).max(max_norm(&lhs_v));
    let growth = 1.0 + conn.structure_constants().max_abs() * l1_norm(&x);
    let budget = lhs.tail * jac.norm() + base.tail * growth.powi(conn.bounds().pmax as i32) + floor(scale);
    Ok((r, budget))
}

pub fn check_automorphy(conn: &Connection, samples: &[Sample]) -> Result<CheckRecord> {
    let n = conn.points();
    let mut worst = Worst::default();
    for (k, s) in samples.iter().enumerate() {
        for i in 1..=n {
            for j in 1..=n {
                for a in 0..conn.genus() {
                    let (r, b) = automorphy_residual(conn, s, i, j, a)?;
                    worst.push(r, b, || format!("tuple {k} i={i} j={j} a={}", a + 1));
                }
            }
        }
    }
    Ok(worst.record(FLATNESS, "automorphy", instance(conn), base_detail(conn)))
}

/// (1/2πi)∮ α_i dz_i around z_j against the unit vector t_ij.
pub fn check_residue(conn: &Connection, samples: &[Sample]) -> Result<CheckRecord> {
    let n = conn.points();
    let mut worst = Worst::default();
    if n < 2 {
        return Ok(worst.record(FLATNESS, "residue", instance(conn), json!({ "vacuous": "n = 1" })));
    }
    let dim = conn.dim();
    for (k, s) in samples.iter().enumerate() {
        for i in 1..=n {
            for j in (1..=n).filter(|&j| j != i) {
                let zj = s.points[j - 1];
                let dist = s
                    .points
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| *m != j - 1 && *m != i - 1)
                    .map(|(_, p)| (p - zj).norm())
                    .chain(std::iter::once((s.w - zj).norm()))
                    .fold(f64::INFINITY, f64::min);
                let r = (0.3 * dist).min(0.5 * conn.group().boundary_distance(zj));
                let mut scale = 0.0f64;
                let f = |z: C64| {
                    let mut p = s.points.clone();
                    p[i - 1] = z;
                    conn.eval(&p, i, s.w).map(|v| v.value).unwrap_or_else(|_| vec![C64::new(f64::NAN, 0.0); dim])
                };
                let fine = residue_vec(zj, r, 64, dim, f);
                let coarse = residue_vec(zj, r, 32, dim, f);
                for c in &fine {
                    scale = scale.max(c.norm());
                }
                let mut expect = vec![C64::new(0.0, 0.0); dim];
                expect[conn.generator_coord(GeneratorSymbol::t(i, j))?] = C64::new(1.0, 0.0);
                let res = max_norm(&sub(&fine, &expect));
                let quad_err = max_norm(&sub(&fine, &coarse));
                worst.push(res, quad_err + floor(scale), || format!("tuple {k} i={i} j={j} radius={r:.3e}"));
            }
        }
    }
    Ok(worst.record(FLATNESS, "residue", instance(conn), base_detail(conn)))
}

/// (1/2πi)∮_{A_a} α_i dz_i against Σ_k b_k (ad x_a^i)^k y_a^i.
pub fn check_a_period(conn: &Connection, samples: &[Sample], quad: &Quadrature) -> Result<CheckRecord> {
    let dim = conn.dim();
    let mut worst = Worst::default();
    let two_pi_i = 2.0 * PI * C64::i();
    for (k, s) in samples.iter().enumerate() {
        for i in 1..=conn.points() {
            for a in 0..conn.genus() {
                let path = conn.group().a_cycle(a);
                let tail = std::cell::Cell::new(0.0f64);
                let f = |z: C64| {
                    let mut p = s.points.clone();
                    p[i - 1] = z;
                    match conn.eval(&p, i, s.w) {
                        Ok(v) => {
                            tail.set(tail.get().max(v.tail));
                            v.value
                        }
                        Err(_) => vec![C64::new(f64::NAN, 0.0); dim],
                    }
                };
                let coarse = quad.integrate_vec(&path, dim, f);
                let fine_q = quad.with_segments(2 * quad.segments);
                let fine = fine_q.integrate_vec(&path, dim, f);
                let err = max_norm(&sub(&fine, &coarse)) / (2.0 * PI);
                let got: Vec<C64> = fine.iter().map(|c| c / two_pi_i).collect();
                let expect = conn.expected_a_period(i, a)?;
                let (_, radius) = conn.group().a_circle(a);
                let r = max_norm(&sub(&got, &expect));
                let budget = tail.get() * 1.25 * radius + err + floor(max_norm(&expect));
                worst.push(r, budget, || format!("tuple {k} i={i} a={}", a + 1));
            }
        }
    }
    Ok(worst.record(FLATNESS, "a_period", instance(conn), base_detail(conn)))
}

/// Richardson-extrapolated central difference of a vector function along
/// the real direction, at steps h, h/2, h/4. Returns (derivative, error
/// estimate, max |f| seen).
pub fn richardson_derivative(f: impl Fn(f64) -> Result<Vec<C64>>, h: f64) -> Result<(Vec<C64>, f64, f64)> {
    let mut scale = 0.0f64;
    let mut d = Vec::new();
    for k in 0..3 {
        let hk = h / f64::from(1 << k);
        let (p, m) = (f(hk)?, f(-hk)?);
        scale = scale.max(max_norm(&p)).max(max_norm(&m));
        d.push(p.iter().zip(&m).map(|(a, b)| (a - b) / (2.0 * hk)).collect::<Vec<C64>>());
    }
    let r1: Vec<C64> = d[1].iter().zip(&d[0]).map(|(a, b)| (a * 4.0 - b) / 3.0).collect();
    let r2: Vec<C64> = d[2].iter().zip(&d[1]).map(|(a, b)| (a * 4.0 - b) / 3.0).collect();
    let fin: Vec<C64> = r2.iter().zip(&r1).map(|(a, b)| (a * 16.0 - b) / 15.0).collect();
    let err = max_norm(&sub(&fin, &r2));
    Ok((fin, err, scale))
}

/// The defect ∂_{z_j} α_i − ∂_{z_i} α_j and its budget.
pub fn closedness_defect(conn: &Connection, s: &Sample, i: usize, j: usize, h: f64) -> Result<(Vec<C64>, f64)> {
    if i == j {
        return Ok((vec![C64::new(0.0, 0.0); conn.dim()], 0.0));
    }
    let shifted = |k: usize, at: usize, dz: f64| -> Result<Vec<C64>> {
        let mut p = s.points.clone();
        p[at - 1] += dz;
        Ok(conn.eval(&p, k, s.w)?.value)
    };
    let (di, ei, si) = richardson_derivative(|dz| shifted(i, j, dz), h)?;
    let (dj, ej, sj) = richardson_derivative(|dz| shifted(j, i, dz), h)?;
    let ti = conn.eval(&s.points, i, s.w)?.tail;
    let tj = conn.eval(&s.points, j, s.w)?.tail;
    let rho = pole_distance(s, i).min(pole_distance(s, j));
    let budget = ei + ej + (ti + tj) / rho + ROUNDOFF * (1.0 + si.max(sj)) / h;
    Ok((sub(&di, &dj), budget))
}

pub fn check_closedness(conn: &Connection, samples: &[Sample], h: f64) -> Result<CheckRecord> {
    let n = conn.points();
    let pairs: Vec<(usize, usize, usize)> =
        (0..samples.len()).flat_map(|k| (1..=n).flat_map(move |i| (i + 1..=n).map(move |j| (k, i, j)))).collect();
    let results: Vec<Result<(f64, f64, f64)>> = pairs
        .par_iter()
        .map(|&(k, i, j)| {
            let s = &samples[k];
            let hh = h.min(0.1 * pole_distance(s, i).min(pole_distance(s, j)));
            let (d, b) = closedness_defect(conn, s, i, j, hh)?;
            Ok((max_norm(&d), b, hh))
        })
        .collect();
    let mut worst = Worst::default();
    for (&(k, i, j), r) in pairs.iter().zip(results) {
        let (r, b, hh) = r?;
        worst.push(r, b, || format!("tuple {k} ({}) i={i} j={j} h={hh:.2e}", fmt_pts(&samples[k].points)));
    }
    let mut detail = base_detail(conn);
    detail["h"] = json!(h);
    Ok(worst.record(FLATNESS, "closedness", instance(conn), detail))
}

/// max |coordinate| of [α_i, α_j] (all coordinates lie in q = 2) and budget.
pub fn commutation_residual(conn: &Connection, s: &Sample, i: usize, j: usize) -> Result<(f64, f64)> {
    let a = conn.eval(&s.points, i, s.w)?;
    let b = conn.eval(&s.points, j, s.w)?;
    let br = conn.bracket(&a.value, &b.value);
    let c = conn.structure_constants().max_abs().max(1.0);
    let q1 = (0..conn.dim()).filter(|&k| conn.quotient().coord_bidegree(k).1 == 1).count() as f64;
    let (na, nb) = (l1_norm(&a.value), l1_norm(&b.value));
    let budget = c * q1 * (a.tail * nb + b.tail * na) + ROUNDOFF * c * (1.0 + na * nb);
    Ok((max_norm(&br), budget))
}

pub fn check_commutation(conn: &Connection, samples: &[Sample]) -> Result<CheckRecord> {
    let n = conn.points();
    let mut worst = Worst::default();
    if n < 2 {
        return Ok(worst.record(FLATNESS, "commutation", instance(conn), json!({ "vacuous": "n = 1" })));
    }
    for (k, s) in samples.iter().enumerate() {
        for i in 1..=n {
            for j in i + 1..=n {
                let (r, b) = commutation_residual(conn, s, i, j)?;
                worst.push(r, b, || format!("tuple {k} ({}) i={i} j={j}", fmt_pts(&s.points)));
            }
        }
    }
    Ok(worst.record(FLATNESS, "commutation", instance(conn), base_detail(conn)))
}

/// Commutation along z_2 = z_1 + ε u for shrinking ε. The bracket must stay
/// within budget although both forms blow up like 1/ε; the fitted growth
/// exponent of the residual is reported.
pub fn check_near_diagonal(conn: &Connection, seed: u64) -> Result<CheckRecord> {
    let n = conn.points();
    let mut worst = Worst::default();
    if n < 2 {
        return Ok(worst.record(FLATNESS, "near_diagonal_commutation", instance(conn), json!({ "vacuous": "n = 1" })));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd1a9);
    let base = &sample_tuples(conn.group(), n, 1, seed ^ 0xd1a9)[0];
    let u = C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI));
    let mut trace = Vec::new();
    for eps in [1e-1, 1e-2, 1e-3] {
        let mut s = base.clone();
        s.points[1] = s.points[0] + u * eps;
        let mut r_eps = 0.0f64;
        for i in 1..=n {
            for j in i + 1..=n {
                let (r, b) = commutation_residual(conn, &s, i, j)?;
                r_eps = r_eps.max(r);
                worst.push(r, b, || format!("eps={eps:e} i={i} j={j}"));
            }
        }
        trace.push((eps, r_eps));
    }
    let (e0, r0) = trace[0];
    let (e1, r1) = trace[trace.len() - 1];
    let order = if r0 > 0.0 && r1 > 0.0 { (r1 / r0).ln() / (e0 / e1).ln() } else { 0.0 };
    let mut detail = base_detail(conn);
    detail["residual_by_eps"] = json!(trace);
    detail["fitted_growth_order"] = json!(order);
    Ok(worst.record(FLATNESS, "near_diagonal_commutation", instance(conn), detail))
}

/// The pair of connections for t_{g,n-1} and t_{g,n} with the simplicial
/// map between them.
pub struct SimplicialPair {
    pub source: Connection,
    pub target: Connection,
    cols: Vec<SparseF>,
    t12: usize,
}

/// Near-diagonal limit of a vector function of ε: symmetric averages over
/// ±ε at each step of `EPSILONS`, then Richardson in ε². Returns (limit,
/// error estimate, diagnostics).
pub fn diagonal_limit(f: impl Fn(C64) -> Result<Vec<C64>>, u: C64) -> Result<(Vec<C64>, f64, Vec<f64>)> {
    let mut s = Vec::new();
    for eps in EPSILONS {
        let (p, m) = (f(u * eps)?, f(-u * eps)?);
        s.push(p.iter().zip(&m).map(|(a, b)| (a + b) * 0.5).collect::<Vec<C64>>());
    }
    let r1: Vec<C64> = s[1].iter().zip(&s[0]).map(|(a, b)| (a * 4.0 - b) / 3.0).collect();
    let r2: Vec<C64> = s[2].iter().zip(&s[1]).map(|(a, b)| (a * 4.0 - b) / 3.0).collect();
    let fin: Vec<C64> = r2.iter().zip(&r1).map(|(a, b)| (a * 16.0 - b) / 15.0).collect();
    let diag = vec![max_norm(&sub(&s[1], &s[0])), max_norm(&sub(&s[2], &s[1])), max_norm(&sub(&r2, &r1))];
    if !diag.iter().all(|x| x.is_finite()) || diag[1] > diag[0] {
        return Err(Error::Numeric(format!("near-diagonal extrapolation does not converge: differences {diag:?}")));
    }
    let err = max_norm(&sub(&fin, &r2));
    Ok((fin, err, diag))
}

impl SimplicialPair {
    pub fn new(group: &SchottkyGroup, n: usize, bounds: Bounds, l: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("the simplicial restriction needs n >= 2".into()));
        }
        let source = Connection::new(group, n - 1, bounds, l)?;
        let target = Connection::new(group, n, bounds, l)?;
        let (cols, t12) = source.simplicial_matrix(&target)?;
        Ok(Self { source, target, cols, t12 })
    }

    fn omega(&self, z: C64) -> C64 {
        self.target.evaluator().holomorphic_coset(0, z).value
    }

    /// α_2 + (ω(z_2)/ω(z_1))·α_1 at (z, z+δ, z_3, …) with a gauge factor f.
    fn restricted_at(&self, s: &Sample, delta: C64, f: &dyn Fn(C64) -> C64) -> Result<Vec<C64>> {
        let z = s.points[0];
        let mut p = s.points.clone();
        p[1] = z + delta;
        let a1 = self.target.eval(&p, 1, s.w)?.value;
        let a2 = self.target.eval(&p, 2, s.w)?.value;
        let ratio = self.omega(z + delta) * f(z + delta) / (self.omega(z) * f(z));
        Ok(a2.iter().zip(&a1).map(|(x, y)| x + y * ratio).collect())
    }

    /// ᾱ_{fω} at (z, z, z_3, …): z = points[0], the second point is ignored.
    pub fn restricted(&self, s: &Sample, u: C64, f: &dyn Fn(C64) -> C64) -> Result<(Vec<C64>, f64, Vec<f64>)> {
        diagonal_limit(|d| self.restricted_at(s, d, f), u)
    }

    pub fn mod_t12(&self, v: &[C64]) -> Vec<C64> {
        let mut out = v.to_vec();
        out[self.t12] = C64::new(0.0, 0.0);
        out
    }

    /// Image of α_1^{(n-1)}(z, z_3, …) in t_{g,n}/ℂt_12.
    pub fn image(&self, s: &Sample) -> Result<(Vec<C64>, f64)> {
        let mut src_pts = vec![s.points[0]];
        src_pts.extend_from_slice(&s.points[2..]);
        let v = self.source.eval(&src_pts, 1, s.w)?;
        let img = apply_sparse(&self.cols, &v.value, self.target.dim());
        let c = self.cols.iter().flat_map(|c| c.iter().map(|e| e.1.abs())).fold(1.0, f64::max);
        Ok((img, v.tail * c * self.source.dim() as f64))
    }

    fn instance(&self) -> Value {
        instance(&self.target)
    }
}

fn direction(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

/// Samples for the restriction: z = points[0] keeps a disc of radius 0.05
/// free of other points, so z + ε stays clear.
fn restriction_samples(group: &SchottkyGroup, n: usize, count: usize, seed: u64) -> Vec<Sample> {
    sample_tuples(group, n, count, seed)
}

/// (α_1^{(n-1)})^{12,3,…,n} against [ᾱ_ω] modulo t_12.
pub fn check_simplicial(pair: &SimplicialPair, count: usize, seed: u64) -> Result<CheckRecord> {
    let samples = restriction_samples(pair.target.group(), pair.target.points(), count, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51);
    let one = |_: C64| C64::new(1.0, 0.0);
    let mut worst = Worst::default();
    let mut diags = Vec::new();
    for (k, s) in samples.iter().enumerate() {
        let u = direction(&mut rng);
        let (lim, err, diag) = pair.restricted(s, u, &one)?;
        let (img, tail) = pair.image(s)?;
        let lhs = pair.mod_t12(&lim);
        let r = max_norm(&sub(&lhs, &img));
        let t = pair.target.eval(&s.points, 1, s.w)?.tail;
        let budget = err + tail + 2.0 * t + floor(max_norm(&img)) / EPSILONS[2];
        worst.push(r, budget, || format!("tuple {k} ({}) u={:.3}", fmt_pts(&s.points), u));
        diags.push(diag);
    }
    let mut detail = base_detail(&pair.target);
    detail["eps"] = json!(EPSILONS);
    detail["extrapolation_differences"] = json!(diags);
    Ok(worst.record(SIMPLICIAL, "restriction", pair.instance(), detail))
}

/// ᾱ_{fω} − ᾱ_ω = −(f'/f)(z)·t_12 for f(z) = (z − p_1)/(z − p_2).
pub fn check_gauge(pair: &SimplicialPair, count: usize, seed: u64) -> Result<CheckRecord> {
    let samples = restriction_samples(pair.target.group(), pair.target.points(), count, seed ^ 0x9a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9a);
    let one = |_: C64| C64::new(1.0, 0.0);
    let mut worst = Worst::default();
    for (k, s) in samples.iter().enumerate() {
        let z = s.points[0];
        let (p1, p2) = (z + direction(&mut rng) * 1.5, z + direction(&mut rng) * 2.0);
        let f = move |x: C64| (x - p1) / (x - p2);
        let dlog = 1.0 / (z - p1) - 1.0 / (z - p2);
        let u = direction(&mut rng);
        let (a, ea, _) = pair.restricted(s, u, &f)?;
        let (b, eb, _) = pair.restricted(s, u, &one)?;
        let mut expect = vec![C64::new(0.0, 0.0); pair.target.dim()];
        expect[pair.t12] = -dlog;
        let r = max_norm(&sub(&sub(&a, &b), &expect));
        let budget = ea + eb + floor(max_norm(&a)) / EPSILONS[2];
        worst.push(r, budget, || format!("tuple {k} p1={p1:.3} p2={p2:.3}"));
    }
    Ok(worst.record(SIMPLICIAL, "gauge", pair.instance(), base_detail(&pair.target)))
}

/// a-period of [ᾱ_ω] in z over A_a, modulo t_12, against the images of the
/// a-periods of α_1 and α_2.
pub fn check_restricted_a_period(pair: &SimplicialPair, quad: &Quadrature, seed: u64) -> Result<CheckRecord> {
    let tgt = &pair.target;
    let group = tgt.group();
    let dim = tgt.dim();
    let s = &restriction_samples(group, tgt.points(), 1, seed ^ 0xa9)[0];
    let one = |_: C64| C64::new(1.0, 0.0);
    let u = C64::new(0.6, 0.8);
    let mut worst = Worst::default();
    for a in 0..tgt.genus() {
        let path = group.a_cycle(a);
        let errs = std::sync::Mutex::new(0.0f64);
        let f = |z: C64| {
            let mut p = s.clone();
            p.points[0] = z;
            match pair.restricted(&p, u, &one) {
                Ok((v, e, _)) => {
                    let mut m = errs.lock().expect("lock");
                    *m = m.max(e);
                    pair.mod_t12(&v)
                }
                Err(_) => vec![C64::new(f64::NAN, 0.0); dim],
            }
        };
        let coarse = quad.integrate_vec(&path, dim, f);
        let fine = quad.with_segments(2 * quad.segments).integrate_vec(&path, dim, f);
        let two_pi_i = 2.0 * PI * C64::i();
        let got: Vec<C64> = fine.iter().map(|c| c / two_pi_i).collect();
        let e1 = tgt.expected_a_period(1, a)?;
        let e2 = tgt.expected_a_period(2, a)?;
        let expect = pair.mod_t12(&e1.iter().zip(&e2).map(|(x, y)| x + y).collect::<Vec<_>>());
        let r = max_norm(&sub(&got, &expect));
        let (_, radius) = group.a_circle(a);
        let budget = max_norm(&sub(&fine, &coarse)) / (2.0 * PI)
            + *errs.lock().expect("lock") * 1.25 * radius
            + floor(max_norm(&expect)) / EPSILONS[2];
        worst.push(r, budget, || format!("a={}", a + 1));
    }
    Ok(worst.record(SIMPLICIAL, "restricted_a_period", pair.instance(), base_detail(tgt)))
}

/// Knobs shared by the flatness and simplicial suites.
#[derive(Clone, Debug)]
pub struct ConnectionSetup {
    pub curve: CurveConfig,
    pub n: usize,
    pub bounds: Bounds,
    pub tuples: usize,
    pub h: f64,
    pub seed: u64,
}

impl ConnectionSetup {
    pub fn new(curve: CurveConfig, n: usize, bounds: Bounds, seed: u64) -> Self {
        Self { curve, n, bounds, tuples: 10, h: 1e-2, seed }
    }

    fn quadrature(&self) -> Quadrature {
        Quadrature::new(self.curve.quad_nodes, 8)
    }
}

fn guard(suite: &str, check: &str, inst: &Value, r: Result<CheckRecord>) -> CheckRecord {
    r.unwrap_or_else(|e| CheckRecord::errored(suite, check, inst.clone(), &e.to_string()))
}

/// All connection checks at one (g, n) instance.
pub fn flatness_suite(setup: &ConnectionSetup) -> Result<Vec<CheckRecord>> {
    let group = setup.curve.group()?;
    let conn = Connection::new(&group, setup.n, setup.bounds, setup.curve.l)?;
    let samples = sample_tuples(&group, setup.n, setup.tuples, setup.seed);
    let inst = instance(&conn);
    let quad = setup.quadrature();
    let few = &samples[..samples.len().min(3)];
    type Job<'a> = (&'static str, Box<dyn Fn() -> Result<CheckRecord> + Sync + 'a>);
    let jobs: Vec<Job> = vec![
        ("leading_term", Box::new(|| check_leading_term(&conn, &samples))),
        ("w_independence", Box::new(|| check_w_independence(&conn, &samples, setup.seed))),
        ("automorphy", Box::new(|| check_automorphy(&conn, &samples))),
        ("residue", Box::new(|| check_residue(&conn, few))),
        ("a_period", Box::new(|| check_a_period(&conn, few, &quad))),
        ("closedness", Box::new(|| check_closedness(&conn, &samples, setup.h))),
        ("commutation", Box::new(|| check_commutation(&conn, &samples))),
        ("near_diagonal_commutation", Box::new(|| check_near_diagonal(&conn, setup.seed))),
    ];
    let mut out: Vec<CheckRecord> = jobs.par_iter().map(|(name, job)| guard(FLATNESS, name, &inst, job())).collect();
    out.push(commutation_doubling(setup, &group, &samples)?);
    Ok(out)
}

/// Commutation residual at ⌈L/2⌉ against L: must shrink or stay under the
/// roundoff floor.
fn commutation_doubling(setup: &ConnectionSetup, group: &SchottkyGroup, samples: &[Sample]) -> Result<CheckRecord> {
    let l = setup.curve.l;
    let half = l.div_ceil(2);
    let run = |l: usize| -> Result<f64> {
        let conn = Connection::new(group, setup.n, setup.bounds, l)?;
        let mut r = 0.0f64;
        for s in samples {
            for i in 1..=setup.n {
                for j in i + 1..=setup.n {
                    r = r.max(commutation_residual(&conn, s, i, j)?.0);
                }
            }
        }
        Ok(r)
    };
    let (rh, rf) = (run(half)?, run(l)?);
    let ok = rf <= rh || rf < 1e-10;
    let fails = if ok { vec![] } else { vec![format!("residual grew from {rh:e} to {rf:e}")] };
    Ok(CheckRecord::exact(
        FLATNESS,
        "commutation_doubling",
        json!({ "g": group.genus(), "n": setup.n, "bounds": setup.bounds, "L_half": half, "L": l }),
        &fails,
        json!({ "residual_half": rh, "residual": rf }),
    ))
}

/// Restriction to z_1 = z_2, gauge identity and restricted a-periods.
pub fn simplicial_suite(setup: &ConnectionSetup) -> Result<Vec<CheckRecord>> {
    let group = setup.curve.group()?;
    let pair = SimplicialPair::new(&group, setup.n, setup.bounds, setup.curve.l)?;
    let inst = pair.instance();
    let quad = Quadrature::new(16, 8);
    let count = setup.tuples.min(5);
    let jobs: Vec<(&str, Box<dyn Fn() -> Result<CheckRecord> + Sync + '_>)> = vec![
        ("restriction", Box::new(|| check_simplicial(&pair, count, setup.seed))),
        ("gauge", Box::new(|| check_gauge(&pair, count, setup.seed))),
        ("restricted_a_period", Box::new(|| check_restricted_a_period(&pair, &quad, setup.seed))),
    ];
    Ok(jobs.par_iter().map(|(name, job)| guard(SIMPLICIAL, name, &inst, job())).collect())
}
