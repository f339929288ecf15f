//! Parallel transport of the connection along loops in the configuration
//! space of the Schottky uniformization, with values in the truncated group
//! exp(t) ⋊ S_n.
//!
//! Transport solves dT = T·A with A = α/(2πi) (α summed over the moving
//! points, times their velocities), so the transport of a concatenated
//! path p·q is T_p·T_q. Crossing the cut from I(γ_a) to I(γ_a^{-1}) with
//! point i multiplies by e^{x_a^i}.

pub mod checks;
pub mod group;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::lie::GeneratorSymbol;
use crate::quad::{GaussLegendre, Path};
use crate::schottky::SchottkyGroup;
use crate::tgn::Bounds;

pub use group::{Envelope, TruncatedGroupElement};

/// Highest total degree supported by transport.
pub const MAX_ORDER: usize = 3;

const POSITION_TOL: f64 = 1e-9;
const CLEARANCE: f64 = 0.1;

/// Sense of rotation of the half-turn that realizes σ_i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
}

/// Monodromy generators; points and handles are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    X { a: usize, i: usize },
    Y { a: usize, i: usize },
    Sigma { i: usize },
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::X { a, i } => write!(f, "X{a}^{i}"),
            Gen::Y { a, i } => write!(f, "Y{a}^{i}"),
            Gen::Sigma { i } => write!(f, "s{i}"),
        }
    }
}

/// A word in the generators and their inverses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord(pub Vec<(Gen, bool)>);

impl BraidWord {
    pub fn gen(g: Gen) -> Self {
        Self(vec![(g, false)])
    }

    pub fn then(mut self, other: &BraidWord) -> Self {
        self.0.extend_from_slice(&other.0);
        self
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.iter().rev().map(|(g, inv)| (*g, !inv)).collect())
    }

    /// Group commutator (a, b) = a b a^{-1} b^{-1}.
    pub fn commutator(a: &BraidWord, b: &BraidWord) -> Self {
        a.clone().then(b).then(&a.inverse()).then(&b.inverse())
    }

    pub fn generators(&self) -> impl Iterator<Item = Gen> + '_ {
        self.0.iter().map(|(g, _)| *g)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(g, inv)| if *inv { format!("({g})^-1") } else { g.to_string() }).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// One leg of a loop: either some points move simultaneously, or one
/// point jumps across the cut of handle `a` (0-based).
#[derive(Clone, Debug)]
pub enum Piece {
    Move(Vec<(usize, Path)>),
    Cross { point: usize, handle: usize },
}

/// A closed loop in the configuration space, modulo the final relabelling.
#[derive(Clone, Debug)]
pub struct Loop {
    pub name: String,
    pub pieces: Vec<Piece>,
    /// perm[k] = label of the point that ends at base position k
    pub perm: Vec<usize>,
}

/// Base configuration and routing data for the standard loops.
#[derive(Clone, Debug)]
pub struct LoopGeometry {
    pub base: Vec<C64>,
    pub w: C64,
    lane: f64,
    circles: Vec<(C64, f64)>,
    orientation: Orientation,
}

impl LoopGeometry {
    pub fn new(group: &SchottkyGroup, n: usize, orientation: Orientation) -> Self {
        let circles = group.circles();
        let top = circles.iter().map(|(c, r)| c.im + 1.25 * r).fold(f64::NEG_INFINITY, f64::max);
        let bottom = circles.iter().map(|(c, r)| c.im - 1.25 * r).fold(f64::INFINITY, f64::min);
        let x0 = circles.iter().map(|(c, _)| c.re).sum::<f64>() / circles.len() as f64;
        let base = (0..n).map(|k| C64::new(x0 + 0.3 * (k as f64 - (n as f64 - 1.0) / 2.0), top + 0.8)).collect();
        Self { base, w: C64::new(x0, bottom - 0.8), lane: top + 0.35, circles, orientation }
    }

    /// Polyline from base point k down to the lane, across, and down to
    /// `stub`, then to `target`.
    fn route(&self, k: usize, stub: C64, target: C64) -> Vec<Path> {
        let p = self.base[k];
        let pts = [p, C64::new(p.re, self.lane), C64::new(stub.re, self.lane), stub, target];
        pts.windows(2).filter(|w| (w[1] - w[0]).norm() > 0.0).map(|w| Path::segment(w[0], w[1])).collect()
    }

    fn reversed(paths: &[Path]) -> Vec<Path> {
        paths.iter().rev().map(|p| p.reversed()).collect()
    }

    fn check_clear(&self, name: &str, k: usize, paths: &[Path]) -> Result<()> {
        for p in paths {
            for s in 0..=64 {
                let z = p.point(s as f64 / 64.0);
                for (c, r) in &self.circles {
                    if (z - c).norm() < r - 1e-9 {
                        return Err(Error::Numeric(format!("{name}: path enters an isometric circle at {z}")));
                    }
                }
                for (m, b) in self.base.iter().enumerate() {
                    if m != k && (z - b).norm() < CLEARANCE {
                        return Err(Error::Numeric(format!("{name}: path passes within {CLEARANCE} of point {}", m + 1)));
                    }
                }
            }
        }
        Ok(())
    }

    fn moves(k: usize, paths: Vec<Path>) -> Vec<Piece> {
        paths.into_iter().map(|p| Piece::Move(vec![(k, p)])).collect()
    }

    /// Point i travels around the a-cycle of handle a (both 1-based).
    pub fn loop_x(&self, group: &SchottkyGroup, a: usize, i: usize) -> Result<Loop> {
        let (k, h) = (i - 1, a - 1);
        let cycle = group.a_cycle(h);
        let q = cycle.start();
        let (c, _) = group.a_circle(h);
        let stub = q + (q - c) / (q - c).norm() * 0.1;
        let there = self.route(k, stub, q);
        let back = Self::reversed(&there);
        let name = Gen::X { a, i }.to_string();
        for p in [&there, &back] {
            self.check_clear(&name, k, p)?;
        }
        let mut pieces = Self::moves(k, there);
        pieces.push(Piece::Move(vec![(k, cycle)]));
        pieces.extend(Self::moves(k, back));
        Ok(Loop { name, pieces, perm: (0..self.base.len()).collect() })
    }

    /// Point i goes to the end of the b-path on I(γ_a), crosses to
    /// I(γ_a^{-1}) and returns.
    pub fn loop_y(&self, group: &SchottkyGroup, a: usize, i: usize) -> Result<Loop> {
        let (k, h) = (i - 1, a - 1);
        let b = group.b_path(h)?;
        let z0 = b.first().expect("b-path").start();
        let z1 = b.last().expect("b-path").end();
        let (ca, ra) = group.a_circle(h);
        let (cb, rb) = group.b_circle(h);
        let stub1 = z1 + (z1 - cb) / rb * (0.3 * rb);
        let stub0 = z0 + (z0 - ca) / ra * (0.3 * ra);
        let there = self.route(k, stub1, z1);
        let back = Self::reversed(&self.route(k, stub0, z0));
        let name = Gen::Y { a, i }.to_string();
        for p in [&there, &back] {
            self.check_clear(&name, k, p)?;
        }
        let mut pieces = Self::moves(k, there);
        pieces.push(Piece::Cross { point: k, handle: h });
        pieces.extend(Self::moves(k, back));
        Ok(Loop { name, pieces, perm: (0..self.base.len()).collect() })
    }

    /// Points i and i+1 exchange by a half-turn about their midpoint.
    pub fn loop_sigma(&self, i: usize) -> Result<Loop> {
        let n = self.base.len();
        if i == 0 || i >= n {
            return Err(Error::Domain(format!("σ_{i} needs 1 ≤ i < n = {n}")));
        }
        let (k, l) = (i - 1, i);
        let m = (self.base[k] + self.base[l]) * 0.5;
        let r = (self.base[l] - self.base[k]).norm() / 2.0;
        let sweep = match self.orientation {
            Orientation::Clockwise => -PI,
            Orientation::Counterclockwise => PI,
        };
        let pk = Path::Arc { center: m, radius: r, start: PI, sweep };
        let pl = Path::Arc { center: m, radius: r, start: 0.0, sweep };
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(k, l);
        Ok(Loop { name: Gen::Sigma { i }.to_string(), pieces: vec![Piece::Move(vec![(k, pk), (l, pl)])], perm })
    }

    pub fn loop_for(&self, group: &SchottkyGroup, g: Gen) -> Result<Loop> {
        match g {
            Gen::X { a, i } => self.loop_x(group, a, i),
            Gen::Y { a, i } => self.loop_y(group, a, i),
            Gen::Sigma { i } => self.loop_sigma(i),
        }
    }
}

/// Result of transporting along a loop.
#[derive(Clone, Debug)]
pub struct Transported {
    pub element: TruncatedGroupElement,
    /// max coefficient difference against the run with half the segments
    pub quad_error: f64,
    /// truncation tail of the connection, integrated along the loop
    pub tail: f64,
    /// 1 + ∫ |A|_1 |dz|, used to amplify budgets through products
    pub amplitude: f64,
    /// single-letter coefficients computed by plain quadrature
    pub direct: Vec<C64>,
}

impl Transported {
    /// max |single-letter coefficient − direct line integral|
    pub fn degree_one_gap(&self, env: &Envelope) -> f64 {
        (0..env.letters())
            .map(|l| (self.element.coeffs[env.append_index(0, l).expect("letter")] - self.direct[l]).norm())
            .fold(0.0, f64::max)
    }

    pub fn budget(&self, order: usize) -> f64 {
        (self.quad_error + self.tail) * self.amplitude.powi(order as i32 - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportOptions {
    pub nodes: usize,
    pub segments: usize,
    /// evaluate legs with t ↦ t² reparametrization
    pub reparametrize: bool,
    /// largest accepted gap between integrator and direct quadrature
    pub tol: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        Self { nodes: 12, segments: 16, reparametrize: false, tol: 1e-6 }
    }
}

/// Everything needed to transport along loops for fixed (g, n, N).
pub struct Holonomy {
    conn: Connection,
    env: Envelope,
    group: SchottkyGroup,
    geometry: LoopGeometry,
    order: usize,
    rule: GaussLegendre,
    smat: Vec<Vec<f64>>,
    options: TransportOptions,
}

impl Holonomy {
    pub fn new(group: &SchottkyGroup, n: usize, order: usize, l: usize, orientation: Orientation, options: TransportOptions) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::Domain(format!("holonomy order must be in 1..={MAX_ORDER}, got {order}")));
        }
        if n == 0 {
            return Err(Error::Domain("holonomy needs at least one point".into()));
        }
        if options.nodes < 2 || options.segments < 2 {
            return Err(Error::Config("transport needs at least 2 nodes and 2 segments".into()));
        }
        let conn = Connection::new(group, n, Bounds::with_total(order, order, order), l)?;
        let env = Envelope::new(conn.quotient(), n, order)?;
        let rule = GaussLegendre::new(options.nodes);
        let smat = rule.integration_matrix();
        let geometry = LoopGeometry::new(group, n, orientation);
        Ok(Self { conn, env, group: group.clone(), geometry, order, rule, smat, options })
    }

    pub fn connection(&self) -> &Connection {
        &self.conn
    }

    pub fn envelope(&self) -> &Envelope {
        &self.env
    }

    pub fn geometry(&self) -> &LoopGeometry {
        &self.geometry
    }

    pub fn group(&self) -> &SchottkyGroup {
        &self.group
    }

    /// True when, reading left to right, each handle has I(γ_a^{-1}) before
    /// I(γ_a) and the handles come in index order. The presentation
    /// relations are matched by the standard loops at every degree only in
    /// this layout; otherwise they are compared through degree 2.
    pub fn standard_layout(&self) -> bool {
        let g = self.group.genus();
        let mut xs = Vec::with_capacity(2 * g);
        for a in 0..g {
            xs.push(self.group.a_circle(a).0.re);
            xs.push(self.group.b_circle(a).0.re);
        }
        xs.windows(2).all(|w| w[0] < w[1])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> usize {
        self.geometry.base.len()
    }

    pub fn options(&self) -> &TransportOptions {
        &self.options
    }

    pub fn with_options(mut self, options: TransportOptions) -> Self {
        self.rule = GaussLegendre::new(options.nodes);
        self.smat = self.rule.integration_matrix();
        self.options = options;
        self
    }

    /// Lie coordinate vector of a generator symbol.
    pub fn symbol(&self, s: GeneratorSymbol) -> Result<Vec<C64>> {
        self.conn.generator_vec(s)
    }

    /// A = α/(2πi) summed over the moving points, with their velocities,
    /// and the matching tail bound.
    fn form(&self, positions: &[C64], moving: &[(usize, C64)]) -> Result<(Vec<C64>, f64, f64)> {
        let mut a = vec![C64::new(0.0, 0.0); self.env.letters()];
        let mut tail = 0.0;
        let mut l1 = 0.0;
        let scale = 1.0 / (2.0 * PI * C64::i());
        for &(k, v) in moving {
            let val = self.conn.eval(positions, k + 1, self.geometry.w)?;
            for (x, y) in a.iter_mut().zip(&val.value) {
                *x += y * v * scale;
            }
            tail += val.tail * v.norm() / (2.0 * PI);
        }
        for x in &a {
            l1 += x.norm();
        }
        Ok((a, tail, l1))
    }

    /// Transport along one simultaneous move with `segments` segments.
    /// Returns (U, tail, ∫|A|_1, single-letter integrals).
    fn leg(&self, positions: &[C64], moves: &[(usize, Path)], segments: usize, reparam: bool) -> Result<(Vec<C64>, f64, f64)> {
        let nodes = self.rule.nodes().len();
        let weights = self.rule.weights();
        let words = self.env.word_count();
        let letters = self.env.letters();
        let h = 1.0 / segments as f64;
        let mut total = self.env.identity().coeffs;
        let (mut tail, mut l1) = (0.0, 0.0);
        let mut pos = positions.to_vec();
        for s in 0..segments {
            let t0 = s as f64 * h;
            // A at the nodes, already scaled by h/2
            let mut a_nodes: Vec<Vec<C64>> = Vec::with_capacity(nodes);
            for (j, &x) in self.rule.nodes().iter().enumerate() {
                let t = t0 + (x + 1.0) * h / 2.0;
                let (phi, dphi) = if reparam { (t * t, 2.0 * t) } else { (t, 1.0) };
                let mut moving = Vec::with_capacity(moves.len());
                for (k, p) in moves {
                    pos[*k] = p.point(phi);
                    moving.push((*k, p.velocity(phi) * dphi));
                }
                let (a, tl, al) = self.form(&pos, &moving)?;
                tail += tl * weights[j] * h / 2.0;
                l1 += al * weights[j] * h / 2.0;
                a_nodes.push(a.into_iter().map(|c| c * (h / 2.0)).collect());
            }
            // graded Picard iteration by collocation on this segment
            let mut u: Vec<Vec<C64>> = vec![self.env.identity().coeffs; nodes];
            let mut end = self.env.identity().coeffs;
            for d in 1..=self.order {
                let mut f: Vec<Vec<(usize, C64)>> = vec![Vec::new(); nodes];
                for j in 0..nodes {
                    let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
                    for (w, &c) in u[j].iter().enumerate() {
                        let dw = self.env.word_degree(w);
                        if c == C64::new(0.0, 0.0) || dw >= d {
                            continue;
                        }
                        for l in 0..letters {
                            if dw + self.env.letter_degree(l) != d {
                                continue;
                            }
                            let al = a_nodes[j][l];
                            if al != C64::new(0.0, 0.0) {
                                let idx = self.env.append_index(w, l).expect("degree fits");
                                *acc.entry(idx).or_insert(C64::new(0.0, 0.0)) += c * al;
                            }
                        }
                    }
                    f[j] = acc.into_iter().collect();
                }
                for i in 0..nodes {
                    for j in 0..nodes {
                        for &(w, c) in &f[j] {
                            u[i][w] += c * self.smat[i][j];
                        }
                    }
                }
                for j in 0..nodes {
                    for &(w, c) in &f[j] {
                        end[w] += c * weights[j];
                    }
                }
            }
            debug_assert_eq!(end.len(), words);
            total = self.env.mul_pure(&total, &end);
        }
        Ok((total, tail, l1))
    }

    /// Single-letter coefficients of the transport by plain quadrature on
    /// a finer rule, for comparison with the integrator.
    fn direct_leg(&self, positions: &[C64], moves: &[(usize, Path)]) -> Result<Vec<C64>> {
        let rule = GaussLegendre::new(self.options.nodes + 4);
        let segments = self.options.segments.div_ceil(2);
        let h = 1.0 / segments as f64;
        let mut out = vec![C64::new(0.0, 0.0); self.env.letters()];
        let mut pos = positions.to_vec();
        for s in 0..segments {
            for (j, &x) in rule.nodes().iter().enumerate() {
                let t = (s as f64 + (x + 1.0) / 2.0) * h;
                let mut moving = Vec::with_capacity(moves.len());
                for (k, p) in moves {
                    pos[*k] = p.point(t);
                    moving.push((*k, p.velocity(t)));
                }
                let (a, _, _) = self.form(&pos, &moving)?;
                for (o, c) in out.iter_mut().zip(&a) {
                    *o += c * (rule.weights()[j] * h / 2.0);
                }
            }
        }
        Ok(out)
    }

    /// Transport along open pieces from the given positions; returns the
    /// (pure) transport and the final positions.
    pub fn transport_open(&self, name: &str, pieces: &[Piece], start: &[C64]) -> Result<(Transported, Vec<C64>)> {
        self.transport_open_with(name, pieces, start, self.options.reparametrize)
    }

    /// As [`Holonomy::transport_open`], choosing whether legs are run with
    /// the t ↦ t² parametrization.
    pub fn transport_open_with(&self, name: &str, pieces: &[Piece], start: &[C64], reparam: bool) -> Result<(Transported, Vec<C64>)> {
        let mut pos = start.to_vec();
        let mut full = self.env.identity();
        let mut half = self.env.identity();
        let mut direct = vec![C64::new(0.0, 0.0); self.env.letters()];
        let (mut tail, mut l1) = (0.0, 0.0);
        let coarse = self.options.segments.div_ceil(2);
        for piece in pieces {
            match piece {
                Piece::Move(moves) => {
                    for (k, p) in moves {
                        if (p.start() - pos[*k]).norm() > POSITION_TOL {
                            return Err(Error::Domain(format!("{name}: leg for point {} does not start where it is", k + 1)));
                        }
                    }
                    let (u, tl, al) = self.leg(&pos, moves, self.options.segments, reparam)?;
                    let (u2, _, _) = self.leg(&pos, moves, coarse, reparam)?;
                    for (o, c) in direct.iter_mut().zip(self.direct_leg(&pos, moves)?) {
                        *o += c;
                    }
                    full.coeffs = self.env.mul_pure(&full.coeffs, &u);
                    half.coeffs = self.env.mul_pure(&half.coeffs, &u2);
                    tail += tl;
                    l1 += al;
                    for (k, p) in moves {
                        pos[*k] = p.end();
                    }
                }
                Piece::Cross { point, handle } => {
                    let (cb, rb) = self.group.b_circle(*handle);
                    let z = pos[*point];
                    if ((z - cb).norm() - rb).abs() > POSITION_TOL * (1.0 + rb) {
                        return Err(Error::Domain(format!("{name}: crossing point is not on I(γ_{})", handle + 1)));
                    }
                    pos[*point] = self.group.generator(*handle).apply(z);
                    let x = self.symbol(GeneratorSymbol::x(point + 1, handle + 1))?;
                    let e = self.env.exp_lie(&x);
                    full.coeffs = self.env.mul_pure(&full.coeffs, &e.coeffs);
                    half.coeffs = self.env.mul_pure(&half.coeffs, &e.coeffs);
                    for (o, c) in direct.iter_mut().zip(&x) {
                        *o += c;
                    }
                    l1 += 1.0;
                }
            }
        }
        let quad_error = full.coeffs.iter().zip(&half.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let out = Transported { element: full, quad_error, tail, amplitude: 1.0 + l1, direct };
        let gap = out.degree_one_gap(&self.env);
        if gap > self.options.tol {
            return Err(Error::Numeric(format!(
                "{name}: refine steps (single-letter terms differ from direct quadrature by {gap:.2e} > {:.1e})",
                self.options.tol
            )));
        }
        Ok((out, pos))
    }

    pub fn transport(&self, lp: &Loop) -> Result<Transported> {
        self.transport_with(lp, self.options.reparametrize)
    }

    pub fn transport_with(&self, lp: &Loop, reparam: bool) -> Result<Transported> {
        let base = &self.geometry.base;
        if lp.perm.len() != base.len() {
            return Err(Error::Domain(format!("{}: permutation has the wrong length", lp.name)));
        }
        let (mut out, pos) = self.transport_open_with(&lp.name, &lp.pieces, base, reparam)?;
        for (k, &label) in lp.perm.iter().enumerate() {
            if (pos[label] - base[k]).norm() > 1e-7 {
                return Err(Error::Domain(format!("{}: point {} does not end at base position {}", lp.name, label + 1, k + 1)));
            }
        }
        out.element.perm = lp.perm.clone();
        Ok(out)
    }

    /// Transport every distinct generator of the given words, in parallel.
    pub fn generators(&self, gens: &[Gen]) -> Result<BTreeMap<Gen, Transported>> {
        let mut uniq: Vec<Gen> = gens.to_vec();
        uniq.sort();
        uniq.dedup();
        let results: Vec<Result<(Gen, Transported)>> = uniq
            .par_iter()
            .map(|g| {
                let lp = self.geometry.loop_for(&self.group, *g)?;
                Ok((*g, self.transport(&lp)?))
            })
            .collect();
        results.into_iter().collect()
    }

    /// Evaluate a word from transported generators, with its error budget.
    /// Words compose like maps: the rightmost letter is traversed first.
    pub fn evaluate(&self, word: &BraidWord, table: &BTreeMap<Gen, Transported>) -> Result<(TruncatedGroupElement, f64, f64)> {
        let mut out = self.env.identity();
        let (mut budget, mut amp) = (0.0, 1.0f64);
        for (g, inv) in word.0.iter().rev() {
            let t = table.get(g).ok_or_else(|| Error::Domain(format!("generator {g} was not transported")))?;
            let e = if *inv { self.env.inverse(&t.element)? } else { t.element.clone() };
            out = self.env.mul(&out, &e)?;
            budget += t.quad_error + t.tail;
            amp = amp.max(t.amplitude);
        }
        Ok((out, budget, amp))
    }
}

/// A relation lhs = rhs in the monodromy group.
#[derive(Clone, Debug)]
pub struct Relation {
    pub family: &'static str,
    pub name: String,
    pub lhs: BraidWord,
    pub rhs: BraidWord,
}

fn x(a: usize, i: usize) -> BraidWord {
    BraidWord::gen(Gen::X { a, i })
}
fn y(a: usize, i: usize) -> BraidWord {
    BraidWord::gen(Gen::Y { a, i })
}
fn s(i: usize) -> BraidWord {
    BraidWord::gen(Gen::Sigma { i })
}

/// Defining relations of the surface braid group on the standard
/// generators X_a = X_a^1, Y_a = Y_a^1, σ_i, plus consistency relations
/// among the X_a^i, Y_a^i themselves.
pub fn relations(g: usize, n: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    let push = |out: &mut Vec<Relation>, family: &'static str, name: String, lhs: BraidWord, rhs: BraidWord| {
        out.push(Relation { family, name, lhs, rhs });
    };
    for i in 1..n.saturating_sub(1) {
        push(&mut out, "braids", format!("s{i} s{} s{i}", i + 1), s(i).then(&s(i + 1)).then(&s(i)), s(i + 1).then(&s(i)).then(&s(i + 1)));
    }
    for i in 1..n {
        for j in i + 2..n {
            push(&mut out, "braids", format!("s{i} s{j}"), s(i).then(&s(j)), s(j).then(&s(i)));
        }
    }
    for a in 1..=g {
        for i in 2..n {
            for (label, w) in [("X", x(a, 1)), ("Y", y(a, 1))] {
                push(&mut out, "Xa:sigmai:comm", format!("({label}{a}, s{i})"), BraidWord::commutator(&w, &s(i)), BraidWord::default());
            }
        }
    }
    if n >= 2 {
        for a in 1..=g {
            for (label, w) in [("X", x(a, 1)), ("Y", y(a, 1))] {
                let moved = s(1).inverse().then(&w).then(&s(1).inverse());
                push(&mut out, "Xa:Xa", format!("(s1^-1 {label}{a} s1^-1, {label}{a})"), BraidWord::commutator(&moved, &w), BraidWord::default());
            }
            let moved = s(1).then(&x(a, 1).inverse()).then(&s(1));
            push(&mut out, "Xa:Ya", format!("(s1 X{a}^-1 s1, Y{a}^-1)"), BraidWord::commutator(&moved, &y(a, 1).inverse()), s(1).then(&s(1)));
        }
        for a in 1..=g {
            for b in a + 1..=g {
                for (la, wa) in [("X", x(a, 1)), ("Y", y(a, 1))] {
                    for (lb, wb) in [("X", x(b, 1)), ("Y", y(b, 1))] {
                        let moved = s(1).inverse().then(&wa).then(&s(1));
                        push(&mut out, "Xa:Xb", format!("(s1^-1 {la}{a} s1, {lb}{b})"), BraidWord::commutator(&moved, &wb), BraidWord::default());
                    }
                }
            }
        }
    }
    let mut lhs = BraidWord::default();
    for a in 1..=g {
        lhs = lhs.then(&BraidWord::commutator(&x(a, 1), &y(a, 1).inverse()));
    }
    let mut rhs = BraidWord::default();
    for i in 1..n {
        rhs = rhs.then(&s(i));
    }
    if n >= 2 {
        rhs = rhs.then(&s(n - 1));
        for i in (1..n - 1).rev() {
            rhs = rhs.then(&s(i));
        }
    }
    push(&mut out, "rel:pi:1", "prod (Xa, Ya^-1)".into(), lhs, rhs);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_families_depend_on_n() {
        let fams = |g, n| {
            let mut f: Vec<&str> = relations(g, n).iter().map(|r| r.family).collect();
            f.dedup();
            f
        };
        assert_eq!(fams(1, 1), vec!["rel:pi:1"]);
        assert_eq!(fams(1, 2), vec!["Xa:Xa", "Xa:Ya", "rel:pi:1"]);
        assert!(fams(2, 3).contains(&"Xa:Xb"));
        assert_eq!(relations(1, 4).iter().filter(|r| r.family == "braids").count(), 3);
    }

    #[test]
    fn words_invert_and_print() {
        let w = s(1).then(&x(1, 1).inverse());
        assert_eq!(w.to_string(), "s1 (X1^1)^-1");
        assert_eq!(w.inverse().inverse(), w);
        assert_eq!(BraidWord::commutator(&s(1), &s(2)).0.len(), 4);
    }
}
