//! Submodules of (Z/p^n)^d in Howell normal form.
//!
//! Over the local ring Z/p^n the Howell form is: echelon rows whose pivots
//! are powers of p, entries above each pivot reduced below it, and the span
//! of the rows with zeros in the first j columns equal to the part of the
//! module vanishing there.  The last property is what makes membership a
//! plain reduction and the form canonical.

use crate::error::{Error, Result};
use crate::zmod::{self, mulmod, submod};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    dim: usize,
    p: u64,
    n: u32,
    /// (pivot column, pivot valuation, row)
    rows: Vec<(usize, u32, Vec<u64>)>,
}

fn axpy(dst: &mut [u64], f: u64, src: &[u64], m: u64) {
    if f == 0 {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        if s != 0 {
            *d = submod(*d, mulmod(f, s, m), m);
        }
    }
}

/// Howell form of the span of `gens`, as (column, valuation, row) triples.
fn howell(dim: usize, p: u64, n: u32, gens: Vec<Vec<u64>>) -> Vec<(usize, u32, Vec<u64>)> {
    let m = zmod::pow_u64(p, n);
    let mut work: Vec<Vec<u64>> = gens
        .into_iter()
        .map(|g| g.into_iter().map(|x| x % m).collect::<Vec<_>>())
        .filter(|g: &Vec<u64>| g.iter().any(|&x| x != 0))
        .collect();
    let mut out: Vec<(usize, u32, Vec<u64>)> = Vec::new();
    for col in 0..dim {
        if work.is_empty() {
            break;
        }
        let Some((best, v)) = work
            .iter()
            .enumerate()
            .filter(|(_, r)| r[col] != 0)
            .map(|(i, r)| (i, zmod::val(r[col], p, n)))
            .min_by_key(|&(i, v)| (v, i))
        else {
            continue;
        };
        let mut piv = work.swap_remove(best);
        let pv = zmod::pow_u64(p, v);
        let unit = zmod::inv(piv[col] / pv, m).expect("unit part");
        for x in piv.iter_mut() {
            *x = mulmod(*x, unit, m);
        }
        for r in work.iter_mut() {
            if r[col] != 0 {
                let f = r[col] / pv;
                axpy(r, f, &piv, m);
            }
        }
        // p^{n-v}·piv vanishes in this column and must stay in the span
        if v > 0 {
            let s = zmod::pow_u64(p, n - v);
            let extra: Vec<u64> = piv.iter().map(|&x| mulmod(x, s, m)).collect();
            if extra.iter().any(|&x| x != 0) {
                work.push(extra);
            }
        }
        work.retain(|r| r.iter().any(|&x| x != 0));
        out.push((col, v, piv));
    }
    // reduce entries above pivots
    for i in (0..out.len()).rev() {
        let (col, v, row) = out[i].clone();
        let pv = zmod::pow_u64(p, v);
        for r in out.iter_mut().take(i) {
            let e = r.2[col];
            if e >= pv {
                axpy(&mut r.2, e / pv, &row, m);
            }
        }
    }
    out
}

impl Lattice {
    pub fn from_generators(dim: usize, p: u64, n: u32, gens: Vec<Vec<u64>>) -> Lattice {
        for g in &gens {
            assert_eq!(g.len(), dim, "generator of wrong length");
        }
        Lattice { dim, p, n, rows: howell(dim, p, n, gens) }
    }

    pub fn zero(dim: usize, p: u64, n: u32) -> Lattice {
        Lattice { dim, p, n, rows: vec![] }
    }

    pub fn full(dim: usize, p: u64, n: u32) -> Lattice {
        let gens = (0..dim)
            .map(|i| {
                let mut v = vec![0; dim];
                v[i] = 1;
                v
            })
            .collect();
        Lattice::from_generators(dim, p, n, gens)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn modulus_exp(&self) -> u32 {
        self.n
    }
    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.rows.iter().map(|r| r.2.clone()).collect()
    }
    /// Pivot valuations in column order.
    pub fn pivots(&self) -> Vec<(usize, u32)> {
        self.rows.iter().map(|r| (r.0, r.1)).collect()
    }

    /// log_p of the number of elements.
    pub fn log_size(&self) -> u32 {
        self.rows.iter().map(|r| self.n - r.1).sum()
    }

    /// Remainder of v after reduction; zero exactly for members.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let m = zmod::pow_u64(self.p, self.n);
        let mut w: Vec<u64> = v.iter().map(|&x| x % m).collect();
        for (col, val, row) in &self.rows {
            let pv = zmod::pow_u64(self.p, *val);
            let e = w[*col];
            if e != 0 && e.is_multiple_of(pv) {
                axpy(&mut w, e / pv, row, m);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    fn compatible(&self, o: &Lattice) -> Result<()> {
        if self.dim != o.dim || self.p != o.p || self.n != o.n {
            return Err(Error::AmbientMismatch);
        }
        Ok(())
    }

    pub fn contains_lattice(&self, o: &Lattice) -> Result<bool> {
        self.compatible(o)?;
        Ok(o.rows.iter().all(|r| self.contains(&r.2)))
    }

    pub fn sum(&self, o: &Lattice) -> Result<Lattice> {
        self.compatible(o)?;
        let mut g = self.rows();
        g.extend(o.rows());
        Ok(Lattice::from_generators(self.dim, self.p, self.n, g))
    }

    /// The image modulo p^j (j ≤ n).
    pub fn reduce_modulus(&self, j: u32) -> Lattice {
        assert!(j <= self.n);
        let m = zmod::pow_u64(self.p, j);
        let g = self.rows.iter().map(|r| r.2.iter().map(|&x| x % m).collect()).collect();
        Lattice::from_generators(self.dim, self.p, j, g)
    }

    pub fn scale_p(&self, k: u32) -> Lattice {
        let m = zmod::pow_u64(self.p, self.n);
        let s = zmod::pow_u64(self.p, k.min(self.n)) % m;
        let g = self.rows.iter().map(|r| r.2.iter().map(|&x| mulmod(x, s, m)).collect()).collect();
        Lattice::from_generators(self.dim, self.p, self.n, g)
    }

    /// Intersection by the Zassenhaus trick on rows (a | a) and (b | 0).
    pub fn intersect(&self, o: &Lattice) -> Result<Lattice> {
        self.compatible(o)?;
        let d = self.dim;
        let mut g = Vec::new();
        for r in self.rows() {
            let mut v = r.clone();
            v.extend(r);
            g.push(v);
        }
        for r in o.rows() {
            let mut v = r;
            v.extend(vec![0; d]);
            g.push(v);
        }
        let h = howell(2 * d, self.p, self.n, g);
        let gens = h.into_iter().filter(|r| r.0 >= d).map(|r| r.2[d..].to_vec()).collect();
        Ok(Lattice::from_generators(d, self.p, self.n, gens))
    }

    /// Exponents e_i with self/sub ≅ ⊕ Z/p^{e_i}, largest first.
    /// Requires sub ⊆ self.
    pub fn quotient_invariants(&self, sub: &Lattice) -> Result<Vec<u32>> {
        self.compatible(sub)?;
        if !self.contains_lattice(sub)? {
            return Err(Error::AmbientMismatch);
        }
        let base = sub.log_size();
        // s_k = log_p |(p^k self + sub)/sub|
        let s: Vec<u32> = (0..=self.n + 1).map(|k| self.scale_p(k).sum(sub).unwrap().log_size() - base).collect();
        let mut out = Vec::new();
        // count of invariants with exponent > k is s_k - s_{k+1}
        for e in (1..=self.n).rev() {
            let gt_prev = s[(e - 1) as usize] - s[e as usize];
            let gt_e = s[e as usize] - s[(e + 1) as usize];
            for _ in 0..(gt_prev - gt_e) {
                out.push(e);
            }
        }
        Ok(out)
    }
}

/// Solves Σ λ_i g_i = v over Z/p^n for a fixed generator list.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    dim: usize,
    count: usize,
    p: u64,
    n: u32,
    rows: Vec<(usize, u32, Vec<u64>)>,
}

impl LinearSolver {
    pub fn new(dim: usize, p: u64, n: u32, gens: &[Vec<u64>]) -> LinearSolver {
        let count = gens.len();
        let aug = gens
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut v = g.clone();
                v.extend((0..count).map(|j| (i == j) as u64));
                v
            })
            .collect();
        let rows = howell(dim + count, p, n, aug).into_iter().filter(|r| r.0 < dim).collect();
        LinearSolver { dim, count, p, n, rows }
    }

    /// Coefficients λ, or None when v is outside the span.
    pub fn solve(&self, v: &[u64]) -> Option<Vec<u64>> {
        let m = zmod::pow_u64(self.p, self.n);
        let mut w: Vec<u64> = v.iter().map(|&x| x % m).collect();
        w.extend(std::iter::repeat_n(0, self.count));
        for (col, val, row) in &self.rows {
            let pv = zmod::pow_u64(self.p, *val);
            let e = w[*col];
            if !e.is_multiple_of(pv) {
                return None;
            }
            axpy(&mut w, e / pv, row, m);
        }
        if w[..self.dim].iter().any(|&x| x != 0) {
            return None;
        }
        Some(w[self.dim..].iter().map(|&x| zmod::negmod(x, m)).collect())
    }
}
