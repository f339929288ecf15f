//! Gauss–Legendre quadrature on segments and circular arcs, plus
//! trapezoidal contour sums for residues.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on [-1, 1], nodes found by Newton's method on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// S[i][j] = ∫_{-1}^{x_i} ℓ_j, with ℓ_j the Lagrange basis on the nodes;
    /// indefinite integrals at the nodes of the interpolant of f are Σ_j S[i][j] f(x_j).
    pub fn integration_matrix(&self) -> Vec<Vec<f64>> {
        let m = self.nodes.len();
        let all = |x: f64| -> Vec<f64> {
            let mut p = vec![1.0, x];
            for k in 2..=m {
                let kf = k as f64;
                p.push(((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf);
            }
            p
        };
        let pj: Vec<Vec<f64>> = self.nodes.iter().map(|&x| all(x)).collect();
        self.nodes
            .iter()
            .map(|&xi| {
                let p = all(xi);
                // ∫_{-1}^{x} P_0 = x + 1, ∫_{-1}^{x} P_k = (P_{k+1} − P_{k−1})/(2k+1)
                let ints: Vec<f64> =
                    (0..m).map(|k| if k == 0 { xi + 1.0 } else { (p[k + 1] - p[k - 1]) / (2 * k + 1) as f64 }).collect();
                (0..m)
                    .map(|j| {
                        self.weights[j] * (0..m).map(|k| (2 * k + 1) as f64 / 2.0 * pj[j][k] * ints[k]).sum::<f64>()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (h, m) = ((b - a) / 2.0, (a + b) / 2.0);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
    }
}

/// Value and derivative of the Legendre polynomial P_n at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A piece of contour, parametrized over t ∈ [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Path {
    Segment { from: C64, to: C64 },
    /// `sweep` is signed: positive is counterclockwise.
    Arc { center: C64, radius: f64, start: f64, sweep: f64 },
}

impl Path {
    pub fn segment(from: C64, to: C64) -> Self {
        Path::Segment { from, to }
    }

    pub fn circle(center: C64, radius: f64, clockwise: bool) -> Self {
        Path::Arc { center, radius, start: 0.0, sweep: if clockwise { -2.0 * PI } else { 2.0 * PI } }
    }

    pub fn point(&self, t: f64) -> C64 {
        match *self {
            Path::Segment { from, to } => from + (to - from) * t,
            Path::Arc { center, radius, start, sweep } => center + C64::from_polar(radius, start + sweep * t),
        }
    }

    pub fn velocity(&self, t: f64) -> C64 {
        match *self {
            Path::Segment { from, to } => to - from,
            Path::Arc { radius, start, sweep, .. } => {
                C64::i() * sweep * C64::from_polar(radius, start + sweep * t)
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(1.0)
    }

    /// The two pieces [0, t] and [t, 1], each reparametrized over [0, 1].
    pub fn split(&self, t: f64) -> (Self, Self) {
        match *self {
            Path::Segment { from, to } => {
                let m = self.point(t);
                (Path::Segment { from, to: m }, Path::Segment { from: m, to })
            }
            Path::Arc { center, radius, start, sweep } => (
                Path::Arc { center, radius, start, sweep: sweep * t },
                Path::Arc { center, radius, start: start + sweep * t, sweep: sweep * (1.0 - t) },
            ),
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Path::Segment { from, to } => Path::Segment { from: to, to: from },
            Path::Arc { center, radius, start, sweep } => {
                Path::Arc { center, radius, start: start + sweep, sweep: -sweep }
            }
        }
    }

    /// Minimum distance from the path to `z`, sampled.
    pub fn distance_to(&self, z: C64) -> f64 {
        match *self {
            Path::Segment { from, to } => {
                let d = to - from;
                let len2 = d.norm_sqr();
                let t = if len2 == 0.0 { 0.0 } else { ((z - from) * d.conj()).re / len2 };
                (self.point(t.clamp(0.0, 1.0)) - z).norm()
            }
            Path::Arc { .. } => (0..=256).map(|k| (self.point(k as f64 / 256.0) - z).norm()).fold(f64::INFINITY, f64::min),
        }
    }
}

/// Composite Gauss–Legendre rule applied to [`Path`]s.
#[derive(Clone, Debug)]
pub struct Quadrature {
    rule: GaussLegendre,
    pub segments: usize,
}

impl Quadrature {
    pub fn new(nodes: usize, segments: usize) -> Self {
        Self { rule: GaussLegendre::new(nodes), segments: segments.max(1) }
    }

    /// Same rule with a different number of segments.
    pub fn with_segments(&self, segments: usize) -> Self {
        Self { rule: self.rule.clone(), segments: segments.max(1) }
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    pub fn nodes(&self) -> usize {
        self.rule.nodes.len()
    }

    /// Parameter values and weights (including the path velocity) of the
    /// composite rule along `path`, in path order.
    pub fn sample(&self, path: &Path) -> Vec<(f64, C64, C64)> {
        self.sample_with(path, self.segments)
    }

    fn sample_with(&self, path: &Path, segments: usize) -> Vec<(f64, C64, C64)> {
        let mut out = Vec::with_capacity(segments * self.rule.nodes.len());
        let h = 1.0 / segments as f64;
        for s in 0..segments {
            let m = (s as f64 + 0.5) * h;
            for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
                let t = m + 0.5 * h * x;
                out.push((t, path.point(t), path.velocity(t) * (0.5 * h * w)));
            }
        }
        out
    }

    /// ∫_path f(z) dz.
    pub fn integrate(&self, path: &Path, f: impl Fn(C64) -> C64) -> C64 {
        self.sample(path).into_iter().map(|(_, z, w)| f(z) * w).sum()
    }

    /// Integral of a vector-valued integrand.
    pub fn integrate_vec(&self, path: &Path, dim: usize, f: impl Fn(C64) -> Vec<C64>) -> Vec<C64> {
        let mut acc = vec![C64::new(0.0, 0.0); dim];
        for (_, z, w) in self.sample(path) {
            for (a, v) in acc.iter_mut().zip(f(z)) {
                *a += v * w;
            }
        }
        acc
    }

    /// Integral plus an error estimate from halving the segment width.
    pub fn integrate_with_error(&self, path: &Path, f: impl Fn(C64) -> C64) -> (C64, f64) {
        let coarse: C64 = self.sample(path).into_iter().map(|(_, z, w)| f(z) * w).sum();
        let fine: C64 = self.sample_with(path, 2 * self.segments).into_iter().map(|(_, z, w)| f(z) * w).sum();
        (fine, (fine - coarse).norm())
    }

    pub fn integrate_chain(&self, paths: &[Path], f: impl Fn(C64) -> C64) -> C64 {
        paths.iter().map(|p| self.integrate(p, &f)).sum()
    }
}

/// (1/2πi) ∮ f dz over the counterclockwise circle, by the trapezoidal rule.
pub fn residue(center: C64, radius: f64, points: usize, f: impl Fn(C64) -> C64) -> C64 {
    let m = points.max(4);
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..m {
        let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
        // dz = i r e dθ, so (1/2πi) ∮ f dz = mean of f(z)·r·e.
        acc += f(center + e * radius) * e * radius;
    }
    acc / m as f64
}

/// Vector-valued [`residue`].
pub fn residue_vec(center: C64, radius: f64, points: usize, dim: usize, f: impl Fn(C64) -> Vec<C64>) -> Vec<C64> {
    let m = points.max(4);
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    for k in 0..m {
        let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
        for (a, v) in acc.iter_mut().zip(f(center + e * radius)) {
            *a += v * e * radius;
        }
    }
    acc.into_iter().map(|a| a / m as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integration_matrix_is_exact_on_polynomials() {
        let gl = GaussLegendre::new(8);
        let s = gl.integration_matrix();
        for (i, &x) in gl.nodes().iter().enumerate() {
            // ∫_{-1}^{x} 3t^2 + 1 dt
            let v: f64 = gl.nodes().iter().enumerate().map(|(j, &t)| s[i][j] * (3.0 * t * t + 1.0)).sum();
            assert!((v - (x * x * x + x + 2.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let gl = GaussLegendre::new(8);
        let w: f64 = gl.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
        // degree 15 is the highest exact degree for 8 nodes
        let v = gl.integrate(0.0, 1.0, |x| x.powi(15));
        assert!((v - 1.0 / 16.0).abs() < 1e-14);
        let v = GaussLegendre::new(32).integrate(0.0, PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn contour_integrals() {
        let q = Quadrature::new(16, 8);
        let c = Path::circle(C64::new(0.3, -0.1), 0.5, false);
        let v = q.integrate(&c, |z| 1.0 / (z - C64::new(0.3, 0.0)));
        assert!((v - C64::new(0.0, 2.0 * PI)).norm() < 1e-12);
        let cw = q.integrate(&c.reversed(), |z| 1.0 / (z - C64::new(0.3, 0.0)));
        assert!((cw + v).norm() < 1e-12);
        let s = Path::segment(C64::new(0.0, 0.0), C64::new(1.0, 1.0));
        let v = q.integrate(&s, |z| z * z);
        assert!((v - C64::new(1.0, 1.0).powi(3) / 3.0).norm() < 1e-14);
        let r = residue(C64::new(1.0, 0.0), 1e-2, 64, |z| (z * z + 1.0) / (z - 1.0));
        assert!((r - 2.0).norm() < 1e-12);
    }
}
