//! Exact sparse linear algebra over the rationals.
//!
//! Vectors are sorted lists of `(column, coefficient)` pairs with no zero
//! entries. [`Echelon`] keeps a row-echelon basis whose rows start with a
//! unit pivot; reducing a vector against it leaves a remainder supported on
//! the pivot-free columns, which is how quotient coordinates are read off.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    /// Builds a vector from unsorted entries, summing duplicates.
    pub fn from_entries(mut raw: Vec<(usize, Q)>) -> Self {
        raw.sort_by_key(|e| e.0);
        let mut entries: Vec<(usize, Q)> = Vec::with_capacity(raw.len());
        for (c, v) in raw {
            match entries.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => entries.push((c, v)),
            }
        }
        entries.retain(|e| !e.1.is_zero());
        Self { entries }
    }

    pub fn unit(col: usize) -> Self {
        Self { entries: vec![(col, Q::one())] }
    }

    pub fn entries(&self) -> &[(usize, Q)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Q)> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn leading(&self) -> Option<usize> {
        self.entries.first().map(|e| e.0)
    }

    pub fn get(&self, col: usize) -> Q {
        match self.entries.binary_search_by_key(&col, |e| e.0) {
            Ok(i) => self.entries[i].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        Self { entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect() }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &Q, other: &SparseVec) -> Self {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i >= a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, &b[j].1 * c));
                j += 1;
            } else {
                let v = &a[i].1 + &b[j].1 * c;
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        Self { entries: out }
    }

    pub fn max_abs(&self) -> Q {
        self.entries.iter().map(|e| e.1.abs()).max().unwrap_or_else(Q::zero)
    }

    pub fn map_cols(&self, f: impl Fn(usize) -> usize) -> Self {
        Self::from_entries(self.entries.iter().map(|(c, v)| (f(*c), v.clone())).collect())
    }
}

/// Row-echelon basis with unit pivots; pivot of a row is its smallest column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivot_row: HashMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.leading().expect("rows are nonzero"))
    }

    /// Eliminates every pivot column from `v`.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        let mut pos = 0;
        loop {
            let next = cur.entries[pos..]
                .iter()
                .position(|(c, _)| self.pivot_row.contains_key(c))
                .map(|k| k + pos);
            let Some(k) = next else { break };
            let (col, coef) = cur.entries[k].clone();
            let row = &self.rows[self.pivot_row[&col]];
            cur = cur.axpy(&-coef, row);
            pos = k;
        }
        cur
    }

    /// Adds `v` to the span; returns true when it was independent.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        match r.entries.first() {
            None => false,
            Some((col, lead)) => {
                let col = *col;
                let inv = lead.recip();
                let r = r.scale(&inv);
                self.pivot_row.insert(col, self.rows.len());
                self.rows.push(r);
                true
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Rank of the span of the given vectors.
pub fn rank(vectors: &[SparseVec]) -> usize {
    let mut e = Echelon::new();
    for v in vectors {
        e.insert(v);
    }
    e.rank()
}

/// Kernel of the linear map sending the k-th unit vector to `images[k]`,
/// where images live in a space with `target_dim` columns. Returns a basis
/// of kernel vectors indexed by source position.
pub fn kernel(images: &[SparseVec], target_dim: usize) -> Vec<SparseVec> {
    let mut e = Echelon::new();
    for (k, img) in images.iter().enumerate() {
        debug_assert!(img.entries.iter().all(|(c, _)| *c < target_dim));
        let mut aug = img.entries.clone();
        aug.push((target_dim + k, Q::one()));
        e.insert(&SparseVec { entries: aug });
    }
    let mut out = Vec::new();
    for row in e.rows() {
        if row.leading().is_some_and(|c| c >= target_dim) {
            out.push(row.map_cols(|c| c - target_dim));
        }
    }
    // Bring the kernel basis into reduced form so it is canonical.
    let mut red = Echelon::new();
    for v in &out {
        red.insert(v);
    }
    red.rows().to_vec()
}

/// Dense matrix-vector product helper for small exact matrices stored by column.
pub fn apply_columns(columns: &[SparseVec], x: &SparseVec) -> SparseVec {
    let mut acc = SparseVec::new();
    for (k, c) in x.entries() {
        acc = acc.axpy(c, &columns[*k]);
    }
    acc
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[(usize, i64)]) -> SparseVec {
        SparseVec::from_entries(e.iter().map(|(c, x)| (*c, q(*x))).collect())
    }

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let x = v(&[(3, 1), (1, 2), (3, -1)]);
        assert_eq!(x.entries(), &[(1, q(2))]);
    }

    #[test]
    fn echelon_rank_and_reduction() {
        let mut e = Echelon::new();
        assert!(e.insert(&v(&[(0, 1), (1, 1)])));
        assert!(e.insert(&v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(&v(&[(0, 1), (2, -1)])));
        assert_eq!(e.rank(), 2);
        let r = e.reduce(&v(&[(0, 1)]));
        // e0 = -e2 modulo the span, so only column 2 survives.
        assert_eq!(r.entries(), &[(2, q(1))]);
    }

    #[test]
    fn kernel_of_small_map() {
        // columns: e0 -> (1,1), e1 -> (2,2), e2 -> (0,1)
        let imgs = vec![v(&[(0, 1), (1, 1)]), v(&[(0, 2), (1, 2)]), v(&[(1, 1)])];
        let k = kernel(&imgs, 2);
        assert_eq!(k.len(), 1);
        assert_eq!(apply_columns(&imgs, &k[0]), SparseVec::new());
    }
}
