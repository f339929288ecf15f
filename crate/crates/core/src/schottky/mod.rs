//! Schottky groups: Möbius generators from fixed points and multipliers,
//! reduced words, and the combinatorial coefficients f_{a_1..a_s}.

mod forms;
pub mod checks;

pub use forms::{geometric_tail, Eval, FormEvaluator, IndexStrings, PeriodMatrix};

use std::fmt;

use num_complex::Complex64 as C64;
use num_traits::{FromPrimitive, Num};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Q;
use crate::quad::Path;

/// Unimodular 2×2 complex matrix acting by z ↦ (az+b)/(cz+d).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mobius {
    pub fn identity() -> Self {
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self { a: o, b: z, c: z, d: o }
    }

    /// Normalizes to determinant 1.
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        let s = (a * d - b * c).sqrt();
        Self { a: a / s, b: b / s, c: c / s, d: d / s }
    }

    /// Image of `z`; a pole gives complex infinity.
    pub fn apply(&self, z: C64) -> C64 {
        let den = self.c * z + self.d;
        if den == C64::new(0.0, 0.0) {
            return C64::new(f64::INFINITY, 0.0);
        }
        (self.a * z + self.b) / den
    }

    pub fn derivative(&self, z: C64) -> C64 {
        let den = self.c * z + self.d;
        1.0 / (den * den)
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Mobius) -> Self {
        Self {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    /// Isometric circle |cz + d| = 1 as (center, radius).
    pub fn isometric_circle(&self) -> Option<(C64, f64)> {
        if self.c.norm() == 0.0 {
            return None;
        }
        Some((-self.d / self.c, 1.0 / self.c.norm()))
    }
}

/// One handle: attracting and repelling fixed points and the multiplier.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Handle {
    pub alpha: C64,
    pub beta: C64,
    pub q: C64,
}

impl Handle {
    /// The loxodromic map with (γz−α)/(γz−β) = q (z−α)/(z−β).
    pub fn mobius(&self) -> Mobius {
        let (al, be, q) = (self.alpha, self.beta, self.q);
        let one = C64::new(1.0, 0.0);
        // det = q(α−β)²; computing it from the entries cancels badly for small q
        let s = q.sqrt() * (al - be);
        Mobius { a: (al - q * be) / s, b: (q - one) * al * be / s, c: (one - q) / s, d: (q * al - be) / s }
    }
}

/// A complex number in configs: either a bare real or `[re, im]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ConfigComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl ConfigComplex {
    pub fn value(&self) -> C64 {
        match *self {
            ConfigComplex::Real(x) => C64::new(x, 0.0),
            ConfigComplex::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl From<C64> for ConfigComplex {
    fn from(z: C64) -> Self {
        if z.im == 0.0 {
            ConfigComplex::Real(z.re)
        } else {
            ConfigComplex::Pair([z.re, z.im])
        }
    }
}

/// Curve description as read from JSON.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CurveConfig {
    pub g: usize,
    pub alpha: Vec<ConfigComplex>,
    pub beta: Vec<ConfigComplex>,
    pub q: Vec<ConfigComplex>,
    #[serde(rename = "L")]
    pub l: usize,
    pub quad_nodes: usize,
    pub tol: f64,
}

impl CurveConfig {
    /// Desk-scale default for genus 1 or 2.
    pub fn default_for(g: usize) -> Result<Self> {
        let c = |v: &[f64]| v.iter().map(|x| ConfigComplex::Real(*x)).collect::<Vec<_>>();
        match g {
            1 => Ok(Self { g, alpha: c(&[-1.0]), beta: c(&[1.0]), q: c(&[0.1]), l: 8, quad_nodes: 32, tol: 1e-6 }),
            2 => Ok(Self {
                g,
                alpha: c(&[-2.0, 1.0]),
                beta: c(&[-1.0, 2.0]),
                q: c(&[0.02, 0.02]),
                l: 6,
                quad_nodes: 32,
                tol: 1e-6,
            }),
            _ => Err(Error::Config(format!("no default curve for g = {g}; give alpha, beta, q explicitly"))),
        }
    }

    pub fn group(&self) -> Result<SchottkyGroup> {
        if self.alpha.len() != self.g || self.beta.len() != self.g || self.q.len() != self.g {
            return Err(Error::Config(format!(
                "curve config needs {} entries in alpha, beta and q (got {}, {}, {})",
                self.g,
                self.alpha.len(),
                self.beta.len(),
                self.q.len()
            )));
        }
        let handles = (0..self.g)
            .map(|a| Handle { alpha: self.alpha[a].value(), beta: self.beta[a].value(), q: self.q[a].value() })
            .collect();
        SchottkyGroup::new(handles)
    }
}

#[derive(Clone, Debug)]
pub struct SchottkyGroup {
    handles: Vec<Handle>,
    gens: Vec<Mobius>,
}

impl SchottkyGroup {
    /// Validates the multipliers, the cross-ratio law and disjointness of
    /// the isometric circles of all generators and their inverses.
    pub fn new(handles: Vec<Handle>) -> Result<Self> {
        if handles.is_empty() {
            return Err(Error::Domain("a Schottky group needs g >= 1 handles".into()));
        }
        for (a, h) in handles.iter().enumerate() {
            let ok = |z: C64| z.re.is_finite() && z.im.is_finite();
            if !ok(h.alpha) || !ok(h.beta) || !ok(h.q) {
                return Err(Error::Domain(format!("handle {}: fixed points and multiplier must be finite", a + 1)));
            }
            if h.q.norm() >= 1.0 || h.q.norm() == 0.0 {
                return Err(Error::Domain(format!("handle {}: need 0 < |q| < 1, got |q| = {}", a + 1, h.q.norm())));
            }
            if (h.alpha - h.beta).norm() == 0.0 {
                return Err(Error::Domain(format!("handle {}: fixed points coincide", a + 1)));
            }
        }
        let gens: Vec<Mobius> = handles.iter().map(Handle::mobius).collect();
        let group = Self { handles, gens };
        for a in 0..group.genus() {
            for k in 0..8 {
                let z = C64::new(0.37 + 0.61 * k as f64, -0.23 + 0.41 * (k * k) as f64 / 3.0);
                let r = group.cross_ratio_residual(a, z);
                if !(r < 1e-10) {
                    return Err(Error::Numeric(format!("handle {}: cross-ratio residual {r:e}", a + 1)));
                }
            }
        }
        let circles = group.circles();
        for i in 0..circles.len() {
            for j in i + 1..circles.len() {
                let ((c1, r1), (c2, r2)) = (circles[i], circles[j]);
                if (c1 - c2).norm() <= r1 + r2 {
                    return Err(Error::Domain(format!(
                        "isometric circles {} and {} intersect; not a classical Schottky configuration",
                        circle_name(i),
                        circle_name(j)
                    )));
                }
            }
        }
        Ok(group)
    }

    pub fn default_for(g: usize) -> Result<Self> {
        CurveConfig::default_for(g)?.group()
    }

    pub fn genus(&self) -> usize {
        self.handles.len()
    }

    pub fn handle(&self, a: usize) -> &Handle {
        &self.handles[a]
    }

    pub fn handles(&self) -> &[Handle] {
        &self.handles
    }

    pub fn generator(&self, a: usize) -> &Mobius {
        &self.gens[a]
    }

    /// Relative residual of the cross-ratio law for γ_a at z.
    pub fn cross_ratio_residual(&self, a: usize, z: C64) -> f64 {
        let h = &self.handles[a];
        let gz = self.gens[a].apply(z);
        let lhs = (gz - h.alpha) / (gz - h.beta);
        let rhs = h.q * (z - h.alpha) / (z - h.beta);
        (lhs - rhs).norm() / rhs.norm().max(1.0)
    }

    pub fn matrix(&self, w: &GroupWord) -> Mobius {
        let mut m = Mobius::identity();
        for &(e, lam) in w.runs() {
            let base = if lam > 0 { self.gens[e] } else { self.gens[e].inverse() };
            for _ in 0..lam.unsigned_abs() {
                m = m.compose(&base);
            }
        }
        m
    }

    pub fn mobius_apply(&self, w: &GroupWord, z: C64) -> C64 {
        self.matrix(w).apply(z)
    }

    /// Isometric circles in the order I(γ_1), I(γ_1^{-1}), I(γ_2), ...
    pub fn circles(&self) -> Vec<(C64, f64)> {
        let mut out = Vec::with_capacity(2 * self.genus());
        for m in &self.gens {
            out.push(m.isometric_circle().expect("finite fixed points give c != 0"));
            out.push(m.inverse().isometric_circle().expect("finite fixed points give c != 0"));
        }
        out
    }

    /// Isometric circle of γ_a^{-1}; it surrounds the attracting point α_a.
    pub fn a_circle(&self, a: usize) -> (C64, f64) {
        self.gens[a].inverse().isometric_circle().expect("c != 0")
    }

    /// Isometric circle of γ_a; it surrounds the repelling point β_a.
    pub fn b_circle(&self, a: usize) -> (C64, f64) {
        self.gens[a].isometric_circle().expect("c != 0")
    }

    /// True when `z` lies outside every isometric circle by at least
    /// `margin` times that circle's radius.
    pub fn in_fundamental_domain(&self, z: C64, margin: f64) -> bool {
        self.circles().iter().all(|(c, r)| (z - c).norm() > r * (1.0 + margin))
    }

    /// Distance from `z` to the nearest isometric circle (negative inside).
    pub fn boundary_distance(&self, z: C64) -> f64 {
        self.circles().iter().map(|(c, r)| (z - c).norm() - r).fold(f64::INFINITY, f64::min)
    }

    /// The a-cycle: a clockwise circle concentric with I(γ_a^{-1}),
    /// enlarged into the fundamental domain so it stays clear of the
    /// limit set while enclosing no other circle.
    pub fn a_cycle(&self, a: usize) -> Path {
        let (c, r) = self.a_circle(a);
        let others = self
            .circles()
            .into_iter()
            .enumerate()
            .filter(|(k, _)| *k != 2 * a + 1)
            .map(|(_, (c2, r2))| (c2 - c).norm() - r2 - r)
            .fold(f64::INFINITY, f64::min);
        let grow = (0.25 * r).min(0.4 * others);
        Path::circle(c, r + grow, true)
    }

    /// A path inside the fundamental domain from a point z_0 on I(γ_a^{-1})
    /// to γ_a^{-1}(z_0) on I(γ_a).
    pub fn b_path(&self, a: usize) -> Result<Vec<Path>> {
        let (ci, ri) = self.a_circle(a);
        let (cb, rb) = self.b_circle(a);
        let dir = (cb - ci) / (cb - ci).norm();
        let z0 = ci + dir * ri;
        let z1 = self.gens[a].inverse().apply(z0);
        let d = (cb - ci).norm();
        let stub0 = z0 + (z0 - ci) * 0.3;
        let stub1 = z1 + (z1 - cb) / rb * (0.3 * rb);
        let mid = (ci + cb) * 0.5;
        let normal = dir * C64::i();
        let mut candidates: Vec<Vec<C64>> = vec![vec![z0, z1], vec![z0, stub0, stub1, z1]];
        for h in [0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
            candidates.push(vec![z0, stub0, mid + normal * (h * d), stub1, z1]);
        }
        let circles = self.circles();
        for pts in candidates {
            let paths: Vec<Path> = pts.windows(2).map(|w| Path::segment(w[0], w[1])).collect();
            let clear = paths.iter().enumerate().all(|(k, p)| {
                (1..64).all(|s| {
                    let t = s as f64 / 64.0;
                    if (k == 0 && t < 0.05) || (k + 1 == paths.len() && t > 0.95) {
                        return true;
                    }
                    let z = p.point(t);
                    circles.iter().all(|(c, r)| (z - c).norm() > *r)
                })
            });
            if clear {
                return Ok(paths);
            }
        }
        Err(Error::Numeric(format!("no b-path for handle {} found inside the fundamental domain", a + 1)))
    }

    /// Uniform sample from a box around the circles, rejected until it is
    /// inside the fundamental domain with the given relative margin.
    pub fn random_point<R: Rng>(&self, rng: &mut R, margin: f64) -> C64 {
        let circles = self.circles();
        let extent = circles.iter().map(|(c, r)| c.norm() + r).fold(0.0, f64::max) + 1.0;
        loop {
            let z = C64::new(rng.gen_range(-extent..extent), rng.gen_range(-extent..extent));
            if self.in_fundamental_domain(z, margin) {
                return z;
            }
        }
    }
}

fn circle_name(k: usize) -> String {
    if k % 2 == 0 {
        format!("I(g{})", k / 2 + 1)
    } else {
        format!("I(g{}^-1)", k / 2 + 1)
    }
}

/// Reduced word γ_{e_1}^{λ_1} ⋯ γ_{e_t}^{λ_t} with 0-based handle indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    runs: Vec<(usize, i64)>,
}

impl GroupWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(a: usize, lambda: i64) -> Self {
        Self::from_runs(&[(a, lambda)])
    }

    /// Multiplies out the runs and reduces.
    pub fn from_runs(runs: &[(usize, i64)]) -> Self {
        let mut w = Self::identity();
        for &(e, lam) in runs {
            w.push(e, lam);
        }
        w
    }

    fn push(&mut self, e: usize, lam: i64) {
        if lam == 0 {
            return;
        }
        match self.runs.last_mut() {
            Some(last) if last.0 == e => {
                last.1 += lam;
                if last.1 == 0 {
                    self.runs.pop();
                }
            }
            _ => self.runs.push((e, lam)),
        }
    }

    pub fn runs(&self) -> &[(usize, i64)] {
        &self.runs
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    /// Word length Σ|λ_t|.
    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.1.unsigned_abs() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self { runs: self.runs.iter().rev().map(|&(e, l)| (e, -l)).collect() }
    }

    pub fn mul(&self, other: &GroupWord) -> Self {
        let mut w = self.clone();
        for &(e, l) in &other.runs {
            w.push(e, l);
        }
        w
    }

    /// Last handle letter, if any.
    pub fn last_handle(&self) -> Option<usize> {
        self.runs.last().map(|r| r.0)
    }

    /// Random reduced word of length at most `max_len` over g handles.
    pub fn random<R: Rng>(rng: &mut R, g: usize, max_len: usize) -> Self {
        let len = rng.gen_range(0..=max_len);
        let mut w = Self::identity();
        while w.len() < len {
            let e = rng.gen_range(0..g);
            let lam = if rng.gen_bool(0.5) { 1 } else { -1 };
            match w.runs.last() {
                Some(&(le, ll)) if le == e && ll.signum() != lam => continue,
                _ => w.push(e, lam),
            }
        }
        w
    }

    /// All reduced words of length ≤ L, ordered by length and then by
    /// the order in which breadth-first extension produces them.
    pub fn enumerate(g: usize, max_len: usize) -> Vec<GroupWord> {
        let mut out = vec![Self::identity()];
        let mut frontier = vec![Self::identity()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(frontier.len() * (2 * g).max(1));
            for w in &frontier {
                for e in 0..g {
                    for lam in [1i64, -1] {
                        if let Some(&(le, ll)) = w.runs.last() {
                            if le == e && ll.signum() != lam {
                                continue;
                            }
                        }
                        let mut v = w.clone();
                        v.push(e, lam);
                        next.push(v);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.runs.iter().map(|(e, l)| format!("g{}^{}", e + 1, l)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// f_{a_1..a_s}(w): the coefficient of X_{a_1}⋯X_{a_s} in
/// e^{−λ_1 X_{e_1}} ⋯ e^{−λ_t X_{e_t}}, exact.
pub fn f_coeff(indices: &[usize], w: &GroupWord) -> Q {
    f_generic(indices, w.runs())
}

pub fn f_coeff_f64(indices: &[usize], w: &GroupWord) -> f64 {
    f_generic(indices, w.runs())
}

fn f_generic<T: Num + Clone + FromPrimitive>(indices: &[usize], runs: &[(usize, i64)]) -> T {
    let s = indices.len();
    let mut dp = vec![T::zero(); s + 1];
    dp[0] = T::one();
    for &(e, lam) in runs {
        let mut nd = dp.clone();
        for j in 0..s {
            if dp[j].is_zero() {
                continue;
            }
            let mut coef = T::one();
            for k in 1..=s - j {
                if indices[j + k - 1] != e {
                    break;
                }
                coef = coef * T::from_i64(-lam).expect("small integer") / T::from_usize(k).expect("small integer");
                nd[j + k] = nd[j + k].clone() + dp[j].clone() * coef.clone();
            }
        }
        dp = nd;
    }
    dp[s].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qf};

    #[test]
    fn mobius_fixes_its_points_and_obeys_cross_ratio() {
        let g = SchottkyGroup::default_for(1).unwrap();
        let h = *g.handle(0);
        let m = g.generator(0);
        assert!((m.apply(h.alpha) - h.alpha).norm() < 1e-14);
        assert!((m.apply(h.beta) - h.beta).norm() < 1e-14);
        assert!(g.cross_ratio_residual(0, C64::new(0.3, 0.9)) < 1e-12);
        assert_eq!(g.mobius_apply(&GroupWord::identity(), C64::new(2.0, 1.0)), C64::new(2.0, 1.0));
    }

    #[test]
    fn composition_law() {
        let g = SchottkyGroup::default_for(2).unwrap();
        let u = GroupWord::from_runs(&[(0, 2), (1, -1)]);
        let v = GroupWord::from_runs(&[(1, 1), (0, 1)]);
        let z = C64::new(0.1, 0.7);
        let lhs = g.mobius_apply(&u.mul(&v), z);
        let rhs = g.mobius_apply(&u, g.mobius_apply(&v, z));
        assert!((lhs - rhs).norm() < 1e-12);
        assert_eq!(u.mul(&v), GroupWord::from_runs(&[(0, 3)]));
    }

    #[test]
    fn overlapping_circles_are_rejected() {
        let h = Handle { alpha: C64::new(-0.1, 0.0), beta: C64::new(0.1, 0.0), q: C64::new(0.5, 0.0) };
        let h2 = Handle { alpha: C64::new(0.0, 0.05), beta: C64::new(0.0, -0.05), q: C64::new(0.5, 0.0) };
        assert!(SchottkyGroup::new(vec![h, h2]).is_err());
        assert!(SchottkyGroup::new(vec![Handle { q: C64::new(1.5, 0.0), ..h }]).is_err());
    }

    #[test]
    fn word_enumeration_counts() {
        assert_eq!(GroupWord::enumerate(1, 8).len(), 17);
        // 1 + 4 (1 + 3 + 9)
        assert_eq!(GroupWord::enumerate(2, 3).len(), 53);
    }

    #[test]
    fn f_coefficient_examples() {
        let w = GroupWord::generator(0, 3);
        assert_eq!(f_coeff(&[], &w), q(1));
        assert_eq!(f_coeff(&[0], &w), q(-3));
        assert_eq!(f_coeff(&[1], &w), q(0));
        assert_eq!(f_coeff(&[0, 0], &w), qf(9, 2));
        let w = GroupWord::from_runs(&[(0, 1), (1, 2)]);
        // (1 − X1 + X1²/2)(1 − 2X2 + 2X2²): coefficient of X1 X2 is 2
        assert_eq!(f_coeff(&[0, 1], &w), q(2));
        assert_eq!(f_coeff(&[1, 0], &w), q(0));
        assert_eq!(f_coeff_f64(&[0, 1, 1], &w), -2.0);
    }
}
