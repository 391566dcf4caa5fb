//! Coefficient rings: truncated Z_p, unramified extensions, truncated power
//! series and cyclotomic tensors, each free of finite rank over Z_p and
//! carrying a lift of Frobenius.
//!
//! Every ring is stored flattened: a Z_p-basis, sparse structure constants
//! and the matrix of F on the basis.  Elements carry their own precision.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::zmod::{self, addmod, mulmod, negmod, submod};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    Zp,
    Unramified(u32),
    PowerSeries(u32),
    /// base ⊗ Z_p[ζ] with ζ of order p^e; F acts on the base only.
    Cyclotomic { e: u32, base: Box<RingKind> },
    /// base ⊗ (unramified of degree f); used for Galois descent.
    Extension { f: u32, base: Box<RingKind> },
}

impl fmt::Display for RingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingKind::Zp => write!(f, "Zp"),
            RingKind::Unramified(d) => write!(f, "unram:{d}"),
            RingKind::PowerSeries(d) => write!(f, "powser:{d}"),
            RingKind::Cyclotomic { e, base } => write!(f, "cyc:{e}@{base}"),
            RingKind::Extension { f: d, base } => write!(f, "unram:{d}@{base}"),
        }
    }
}

impl RingKind {
    /// Parse `Zp`, `unram:<f>`, `powser:<D>`, `cyc:<e>@<base>` (and
    /// `unram:<f>@<base>`), case-insensitively.
    pub fn parse(s: &str) -> Result<RingKind> {
        let t = s.trim().to_ascii_lowercase();
        let bad = || Error::InvalidRing(s.to_string());
        if t == "zp" {
            return Ok(RingKind::Zp);
        }
        let (head, base) = match t.split_once('@') {
            Some((h, b)) => (h.to_string(), Some(RingKind::parse(b)?)),
            None => (t.clone(), None),
        };
        let (name, num) = head.split_once(':').ok_or_else(bad)?;
        let k: u32 = num.trim().parse().map_err(|_| bad())?;
        match (name.trim(), base) {
            ("unram", None) | ("unram", Some(RingKind::Zp)) => {
                if k == 0 {
                    return Err(bad());
                }
                Ok(RingKind::Unramified(k))
            }
            ("unram", Some(b)) => {
                if k == 0 {
                    return Err(bad());
                }
                Ok(RingKind::Extension { f: k, base: Box::new(b) })
            }
            ("powser", None) => {
                if k == 0 {
                    return Err(Error::InvalidRing("power series truncation D must be >= 1".into()));
                }
                Ok(RingKind::PowerSeries(k))
            }
            ("cyc", Some(b)) => {
                if k == 0 {
                    return Err(bad());
                }
                Ok(RingKind::Cyclotomic { e: k, base: Box::new(b) })
            }
            ("cyc", None) => Ok(RingKind::Cyclotomic { e: k, base: Box::new(RingKind::Zp) }),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    pub p: u64,
    pub kind: RingKind,
    /// Default precision for fresh elements.
    pub n: u32,
}

impl RingSpec {
    pub fn new(p: u64, kind: RingKind, n: u32) -> RingSpec {
        RingSpec { p, kind, n }
    }
}

#[derive(Debug)]
struct Level {
    var: char,
    degree: usize,
}

#[derive(Debug)]
struct RingData {
    p: u64,
    kind: RingKind,
    default_n: u32,
    cap: u32,
    rank: usize,
    sc: Vec<Vec<(u32, u64)>>,
    frob: Vec<Vec<u64>>,
    galois: Option<Vec<Vec<u64>>>,
    /// Outermost level first.
    levels: Vec<Level>,
    defining: Option<Vec<u64>>,
}

/// Shared handle to a coefficient ring.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({}, p={})", self.0.kind, self.0.p)
    }
}

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.kind == other.0.kind)
    }
}
impl Eq for Ring {}

struct Built {
    rank: usize,
    sc: Vec<Vec<(u32, u64)>>,
    frob: Vec<Vec<u64>>,
    galois: Option<Vec<Vec<u64>>>,
    levels: Vec<Level>,
    defining: Option<Vec<u64>>,
}

pub fn make_ring(spec: &RingSpec) -> Result<Ring> {
    Ring::new(spec)
}

impl Ring {
    pub fn new(spec: &RingSpec) -> Result<Ring> {
        if !zmod::is_prime(spec.p) {
            return Err(Error::InvalidPrime(spec.p));
        }
        let cap = zmod::max_exponent(spec.p);
        if spec.n == 0 || spec.n > cap {
            return Err(Error::InvalidRing(format!("precision {} outside 1..={cap}", spec.n)));
        }
        let b = build(spec.p, cap, &spec.kind)?;
        Ok(Ring(Arc::new(RingData {
            p: spec.p,
            kind: spec.kind.clone(),
            default_n: spec.n,
            cap,
            rank: b.rank,
            sc: b.sc,
            frob: b.frob,
            galois: b.galois,
            levels: b.levels,
            defining: b.defining,
        })))
    }

    pub fn zp(p: u64, n: u32) -> Result<Ring> {
        Ring::new(&RingSpec::new(p, RingKind::Zp, n))
    }

    /// R ⊗ Z_p[ζ_{p^e}] over this ring.
    pub fn cyclotomic(&self, e: u32) -> Result<Ring> {
        Ring::new(&RingSpec::new(
            self.p(),
            RingKind::Cyclotomic { e, base: Box::new(self.0.kind.clone()) },
            self.0.default_n,
        ))
    }

    /// This ring tensored with the unramified extension of degree f.
    pub fn unramified_extension(&self, f: u32) -> Result<Ring> {
        let kind = match &self.0.kind {
            RingKind::Zp => RingKind::Unramified(f),
            k => RingKind::Extension { f, base: Box::new(k.clone()) },
        };
        Ring::new(&RingSpec::new(self.p(), kind, self.0.default_n))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn kind(&self) -> &RingKind {
        &self.0.kind
    }
    pub fn spec(&self) -> RingSpec {
        RingSpec::new(self.0.p, self.0.kind.clone(), self.0.default_n)
    }
    pub fn rank(&self) -> usize {
        self.0.rank
    }
    pub fn cap(&self) -> u32 {
        self.0.cap
    }
    pub fn default_prec(&self) -> u32 {
        self.0.default_n
    }
    pub fn modulus(&self, k: u32) -> u64 {
        zmod::pow_u64(self.0.p, k)
    }
    pub fn has_galois(&self) -> bool {
        self.0.galois.is_some()
    }
    /// Defining polynomial (low degree first) of the outermost level, if any.
    pub fn defining_polynomial(&self) -> Option<&[u64]> {
        self.0.defining.as_deref()
    }

    // ----- slice kernels; all slices have length rank and entries < m -----

    /// out += a*b mod m.
    pub fn mul_acc(&self, out: &mut [u64], a: &[u64], b: &[u64], m: u64) {
        let r = self.0.rank;
        if r == 1 {
            out[0] = addmod(out[0], mulmod(a[0], b[0], m), m);
            return;
        }
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            for j in 0..r {
                if b[j] == 0 {
                    continue;
                }
                let t = mulmod(a[i], b[j], m);
                for &(k, c) in &self.0.sc[i * r + j] {
                    let v = if c == 1 { t } else { mulmod(t, c % m, m) };
                    out[k as usize] = addmod(out[k as usize], v, m);
                }
            }
        }
    }

    pub fn mul_slices(&self, a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
        let mut out = vec![0; self.0.rank];
        self.mul_acc(&mut out, a, b, m);
        out
    }

    pub fn frob_slice(&self, a: &[u64], m: u64) -> Vec<u64> {
        apply_matrix(&self.0.frob, a, m)
    }

    pub fn galois_slice(&self, a: &[u64], m: u64) -> Option<Vec<u64>> {
        self.0.galois.as_ref().map(|g| apply_matrix(g, a, m))
    }

    /// Inverse of a unit, or None.
    pub fn inv_slice(&self, a: &[u64], k: u32) -> Option<Vec<u64>> {
        invert_dense(&self.0.sc, self.0.rank, self.0.p, k, a)
    }

    // ----- element constructors -----

    pub fn from_coeffs(&self, coeffs: Vec<u64>, prec: u32) -> RingElem {
        assert_eq!(coeffs.len(), self.0.rank);
        let m = self.modulus(prec);
        let c = coeffs.into_iter().map(|x| x % m).collect();
        RingElem { ring: self.clone(), c, prec }
    }

    pub fn from_int(&self, v: i64, prec: u32) -> RingElem {
        let m = self.modulus(prec);
        let mut c = vec![0; self.0.rank];
        c[0] = zmod::from_i64(v, m);
        RingElem { ring: self.clone(), c, prec }
    }

    pub fn zero(&self, prec: u32) -> RingElem {
        self.from_int(0, prec)
    }

    pub fn one(&self, prec: u32) -> RingElem {
        self.from_int(1, prec)
    }

    /// The named generator (`T`, `w` for ω, `z` for ζ), if this ring has it.
    pub fn generator(&self, name: char, prec: u32) -> Option<RingElem> {
        let mut stride = self.0.rank;
        for lv in &self.0.levels {
            stride /= lv.degree;
            if lv.var == name {
                let mut c = vec![0; self.0.rank];
                if lv.degree > 1 {
                    c[stride] = 1;
                } else {
                    // degree one level: the generator is a constant
                    return self.generator_value_degree_one(lv, prec);
                }
                return Some(self.from_coeffs(c, prec));
            }
        }
        None
    }

    fn generator_value_degree_one(&self, lv: &Level, prec: u32) -> Option<RingElem> {
        // Φ_2(ζ) = ζ + 1, so ζ = -1; a degree-one unramified level is Z_p itself.
        match lv.var {
            'z' => Some(self.from_int(-1, prec)),
            'w' => self.0.defining.as_ref().map(|d| {
                let m = self.modulus(prec);
                self.from_int(-(zmod::to_signed(d[0] % m, m)), prec)
            }),
            _ => Some(self.zero(prec)),
        }
    }

    pub fn generator_names(&self) -> Vec<char> {
        self.0.levels.iter().map(|l| l.var).collect()
    }

    pub fn random(&self, rng: &mut impl rand::Rng, prec: u32) -> RingElem {
        let m = self.modulus(prec);
        let c = (0..self.0.rank).map(|_| rng.gen_range(0..m)).collect();
        RingElem { ring: self.clone(), c, prec }
    }

    /// A random unit: random element with its residue forced to be invertible.
    pub fn random_unit(&self, rng: &mut impl rand::Rng, prec: u32) -> RingElem {
        loop {
            let x = self.random(rng, prec);
            if x.is_unit() {
                return x;
            }
        }
    }

    /// Z_p-basis element e_i.
    pub fn basis(&self, i: usize, prec: u32) -> RingElem {
        let mut c = vec![0; self.0.rank];
        c[i] = 1;
        self.from_coeffs(c, prec)
    }

    pub fn format_slice(&self, c: &[u64], m: u64) -> String {
        format_levels(&self.0.levels, c, m)
    }

    /// Trace of the top Galois action (sum over the orbit of σ).
    pub fn galois_order(&self) -> Option<u32> {
        fn top(k: &RingKind) -> Option<u32> {
            match k {
                RingKind::Unramified(f) => Some(*f),
                RingKind::Extension { f, .. } => Some(*f),
                RingKind::Cyclotomic { base, .. } => top(base),
                _ => None,
            }
        }
        top(&self.0.kind)
    }
}

fn apply_matrix(cols: &[Vec<u64>], a: &[u64], m: u64) -> Vec<u64> {
    let r = a.len();
    let mut out = vec![0u64; r];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (k, &c) in cols[i].iter().enumerate() {
            if c != 0 {
                out[k] = addmod(out[k], mulmod(ai, c % m, m), m);
            }
        }
    }
    out
}

fn mul_dense(sc: &[Vec<(u32, u64)>], r: usize, a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let mut out = vec![0u64; r];
    for i in 0..r {
        if a[i] == 0 {
            continue;
        }
        for j in 0..r {
            if b[j] == 0 {
                continue;
            }
            let t = mulmod(a[i], b[j], m);
            for &(k, c) in &sc[i * r + j] {
                out[k as usize] = addmod(out[k as usize], mulmod(t, c % m, m), m);
            }
        }
    }
    out
}

fn invert_dense(sc: &[Vec<(u32, u64)>], r: usize, p: u64, k: u32, a: &[u64]) -> Option<Vec<u64>> {
    let m = zmod::pow_u64(p, k);
    // Residue inverse: solve (x·e_j) y = 1 over F_p.
    let mut mat = vec![vec![0u64; r + 1]; r];
    for j in 0..r {
        let mut e = vec![0u64; r];
        e[j] = 1;
        let col = mul_dense(sc, r, a, &e, p);
        for i in 0..r {
            mat[i][j] = col[i] % p;
        }
    }
    mat[0][r] = 1;
    let y0 = solve_fp(mat, r, p)?;
    let mut y: Vec<u64> = y0;
    let mut one = vec![0u64; r];
    one[0] = 1;
    for _ in 0..80 {
        let xy = mul_dense(sc, r, a, &y, m);
        if xy == one {
            return Some(y);
        }
        // y <- y (2 - x y)
        let two_minus: Vec<u64> = xy
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let t = if i == 0 { 2 % m } else { 0 };
                submod(t, v, m)
            })
            .collect();
        y = mul_dense(sc, r, &y, &two_minus, m);
    }
    None
}

/// Solve an r×(r+1) augmented system over F_p; None if singular.
fn solve_fp(mut a: Vec<Vec<u64>>, r: usize, p: u64) -> Option<Vec<u64>> {
    for col in 0..r {
        let piv = (col..r).find(|&i| !a[i][col].is_multiple_of(p))?;
        a.swap(col, piv);
        let iv = zmod::inv(a[col][col], p)?;
        for v in a[col].iter_mut() {
            *v = mulmod(*v, iv, p);
        }
        for i in 0..r {
            if i != col && a[i][col] != 0 {
                let f = a[i][col];
                for j in 0..=r {
                    let t = mulmod(f, a[col][j], p);
                    a[i][j] = submod(a[i][j], t, p);
                }
            }
        }
    }
    Some((0..r).map(|i| a[i][r]).collect())
}

fn sparsify(dense: &[u64]) -> Vec<(u32, u64)> {
    dense
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(k, &c)| (k as u32, c))
        .collect()
}

/// Lexicographically least monic irreducible polynomial of degree f over
/// F_p, compared on (a_{f-1}, ..., a_0).  Returned low degree first.
pub fn least_irreducible(p: u64, f: u32) -> Vec<u64> {
    let f = f as usize;
    if f == 1 {
        return vec![0, 1];
    }
    let total = zmod::pow_u64(p, f as u32);
    for idx in 0..total {
        // idx read in base p with the most significant digit = a_{f-1}
        let mut poly = vec![0u64; f + 1];
        poly[f] = 1;
        let mut t = idx;
        for i in 0..f {
            poly[i] = t % p;
            t /= p;
        }
        if poly[0] != 0 && is_irreducible_fp(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_rem_fp(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = zmod::inv(b[db], p).unwrap();
    while r.len() > db && !r.is_empty() {
        let top = *r.last().unwrap() % p;
        let shift = r.len() - 1 - db;
        if top != 0 {
            let q = mulmod(top, lead_inv, p);
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = submod(r[shift + i], mulmod(q, bi, p), p);
            }
        }
        r.pop();
    }
    r
}

pub(crate) fn is_irreducible_fp(poly: &[u64], p: u64) -> bool {
    let f = poly.len() - 1;
    for d in 1..=f / 2 {
        let count = zmod::pow_u64(p, d as u32);
        for idx in 0..count {
            let mut q = vec![0u64; d + 1];
            q[d] = 1;
            let mut t = idx;
            for qi in q.iter_mut().take(d) {
                *qi = t % p;
                t /= p;
            }
            if poly_rem_fp(poly, &q, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn cyclotomic_poly(p: u64, e: u32) -> Vec<u64> {
    let step = zmod::pow_u64(p, e - 1) as usize;
    let deg = step * (p as usize - 1);
    let mut c = vec![0u64; deg + 1];
    for j in 0..p as usize {
        c[j * step] = 1;
    }
    c
}

enum Top {
    Monic(Vec<u64>),
    Truncate(usize),
}

fn build(p: u64, cap: u32, kind: &RingKind) -> Result<Built> {
    let m = zmod::pow_u64(p, cap);
    match kind {
        RingKind::Zp => Ok(Built {
            rank: 1,
            sc: vec![vec![(0, 1)]],
            frob: vec![vec![1]],
            galois: None,
            levels: vec![],
            defining: None,
        }),
        RingKind::Unramified(f) => {
            let base = build(p, cap, &RingKind::Zp)?;
            let poly = least_irreducible(p, *f);
            extend(p, cap, m, base, Top::Monic(poly), 'w', true)
        }
        RingKind::Extension { f, base } => {
            let b = build(p, cap, base)?;
            if b.levels.iter().any(|l| l.var == 'w') {
                return Err(Error::InvalidRing("nested unramified levels are not supported".into()));
            }
            let poly = least_irreducible(p, *f);
            extend(p, cap, m, b, Top::Monic(poly), 'w', true)
        }
        RingKind::PowerSeries(d) => {
            let base = build(p, cap, &RingKind::Zp)?;
            extend(p, cap, m, base, Top::Truncate(*d as usize), 'T', false)
        }
        RingKind::Cyclotomic { e, base } => {
            let b = build(p, cap, base)?;
            if b.levels.iter().any(|l| l.var == 'z') {
                return Err(Error::InvalidRing("nested cyclotomic levels are not supported".into()));
            }
            extend(p, cap, m, b, Top::Monic(cyclotomic_poly(p, *e)), 'z', false)
        }
    }
}

fn extend(p: u64, cap: u32, m: u64, base: Built, top: Top, var: char, unramified: bool) -> Result<Built> {
    let rb = base.rank;
    let d = match &top {
        Top::Monic(poly) => poly.len() - 1,
        Top::Truncate(d) => *d,
    };
    let rank = rb * d;
    // powers of the new variable reduced to degree < d
    let mut wpow: Vec<Vec<u64>> = Vec::with_capacity(2 * d);
    for k in 0..(2 * d).max(1) {
        let mut v = vec![0u64; d];
        if k < d {
            v[k] = 1;
        } else {
            match &top {
                Top::Truncate(_) => {}
                Top::Monic(poly) => {
                    let prev = &wpow[k - 1];
                    let carry = prev[d - 1];
                    for i in (1..d).rev() {
                        v[i] = prev[i - 1];
                    }
                    v[0] = 0;
                    for i in 0..d {
                        v[i] = submod(v[i], mulmod(carry, poly[i] % m, m), m);
                    }
                }
            }
        }
        wpow.push(v);
    }
    let mut sc = vec![Vec::new(); rank * rank];
    for s in 0..d {
        for j in 0..rb {
            for t in 0..d {
                for k in 0..rb {
                    let mut dense = vec![0u64; rank];
                    for &(l, c) in &base.sc[j * rb + k] {
                        for (u, &w) in wpow[s + t].iter().enumerate() {
                            if w != 0 {
                                let idx = u * rb + l as usize;
                                dense[idx] = addmod(dense[idx], mulmod(c, w, m), m);
                            }
                        }
                    }
                    sc[(s * rb + j) * rank + (t * rb + k)] = sparsify(&dense);
                }
            }
        }
    }
    let embed = |b: &[u64]| -> Vec<u64> {
        let mut v = vec![0u64; rank];
        v[..rb].copy_from_slice(b);
        v
    };
    let mut omega = vec![0u64; rank];
    if d > 1 {
        omega[rb] = 1;
    } else if let Top::Monic(poly) = &top {
        omega[0] = negmod(poly[0] % m, m);
    }
    let mut one = vec![0u64; rank];
    one[0] = 1;
    let pow = |x: &[u64], e: u64| -> Vec<u64> {
        let mut acc = one.clone();
        for _ in 0..e {
            acc = mul_dense(&sc, rank, &acc, x, m);
        }
        acc
    };
    // image of the new variable under F
    let f_omega: Vec<u64> = match (&top, var) {
        (Top::Truncate(_), _) => pow(&omega, p),
        (Top::Monic(_), 'z') => omega.clone(),
        (Top::Monic(poly), _) => hensel_root(&sc, rank, p, cap, rb, poly, &pow(&omega, p))?,
    };
    let f_powers: Vec<Vec<u64>> = (0..d).map(|t| pow(&f_omega, t as u64)).collect();
    let mut frob = vec![Vec::new(); rank];
    for t in 0..d {
        for j in 0..rb {
            let fb = embed(&base.frob[j]);
            frob[t * rb + j] = mul_dense(&sc, rank, &fb, &f_powers[t], m);
        }
    }
    let galois = if unramified {
        let mut g = vec![Vec::new(); rank];
        for t in 0..d {
            for j in 0..rb {
                let mut e = vec![0u64; rb];
                e[j] = 1;
                g[t * rb + j] = mul_dense(&sc, rank, &embed(&e), &f_powers[t], m);
            }
        }
        Some(g)
    } else {
        base.galois.map(|bg| {
            let mut g = vec![Vec::new(); rank];
            for t in 0..d {
                for j in 0..rb {
                    let mut v = vec![0u64; rank];
                    for (i, &c) in bg[j].iter().enumerate() {
                        v[t * rb + i] = c;
                    }
                    g[t * rb + j] = v;
                }
            }
            g
        })
    };
    let mut levels = vec![Level { var, degree: d }];
    levels.extend(base.levels);
    let defining = match &top {
        Top::Monic(poly) => Some(poly.clone()),
        Top::Truncate(_) => None,
    };
    Ok(Built { rank, sc, frob, galois, levels, defining })
}

/// Newton iteration for the root of `poly` (integer coefficients) that is
/// congruent to `start` mod p.
fn hensel_root(
    sc: &[Vec<(u32, u64)>],
    rank: usize,
    p: u64,
    cap: u32,
    rb: usize,
    poly: &[u64],
    start: &[u64],
) -> Result<Vec<u64>> {
    let m = zmod::pow_u64(p, cap);
    let d = poly.len() - 1;
    let scalar = |c: u64| -> Vec<u64> {
        let mut v = vec![0u64; rank];
        v[0] = c % m;
        v
    };
    let _ = rb;
    let eval = |coeffs: &[u64], y: &[u64]| -> Vec<u64> {
        let mut acc = vec![0u64; rank];
        for &c in coeffs.iter().rev() {
            acc = mul_dense(sc, rank, &acc, y, m);
            acc[0] = addmod(acc[0], c % m, m);
        }
        acc
    };
    let deriv: Vec<u64> = (1..=d).map(|i| mulmod(poly[i], i as u64, m)).collect();
    let mut y = start.to_vec();
    for _ in 0..80 {
        let fy = eval(poly, &y);
        if fy.iter().all(|&c| c == 0) {
            return Ok(y);
        }
        let dy = eval(&deriv, &y);
        let inv = invert_dense(sc, rank, p, cap, &dy)
            .ok_or_else(|| Error::InvalidRing("defining polynomial is not separable".into()))?;
        let step = mul_dense(sc, rank, &fy, &inv, m);
        y = y.iter().zip(&step).map(|(&a, &b)| submod(a, b, m)).collect();
    }
    let _ = scalar;
    Err(Error::InvalidRing("Hensel lifting did not converge".into()))
}

fn format_levels(levels: &[Level], c: &[u64], m: u64) -> String {
    if levels.is_empty() {
        return (c[0] % m).to_string();
    }
    let lv = &levels[0];
    let rb = c.len() / lv.degree;
    let mut terms = Vec::new();
    for t in 0..lv.degree {
        let chunk = &c[t * rb..(t + 1) * rb];
        if chunk.iter().all(|&x| x % m == 0) {
            continue;
        }
        let base = format_levels(&levels[1..], chunk, m);
        let var = match t {
            0 => String::new(),
            1 => lv.var.to_string(),
            _ => format!("{}^{}", lv.var, t),
        };
        let term = if var.is_empty() {
            base
        } else if base == "1" {
            var
        } else if base.contains('+') {
            format!("({base})*{var}")
        } else {
            format!("{base}*{var}")
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// An element of a coefficient ring, meaningful modulo p^prec.
#[derive(Clone, Debug)]
pub struct RingElem {
    ring: Ring,
    c: Vec<u64>,
    prec: u32,
}

impl PartialEq for RingElem {
    /// Equality at the common precision.
    fn eq(&self, other: &RingElem) -> bool {
        self.ring == other.ring && self.eq_at(other, self.prec.min(other.prec))
    }
}

impl RingElem {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
    fn modulus(&self) -> u64 {
        self.ring.modulus(self.prec)
    }

    fn reduced_coeffs(&self, k: u32) -> Vec<u64> {
        let m = self.ring.modulus(k);
        self.c.iter().map(|&x| x % m).collect()
    }

    fn binary(&self, o: &RingElem, f: impl Fn(u64, u64, u64) -> u64) -> RingElem {
        assert_eq!(self.ring, o.ring, "ring mismatch");
        let k = self.prec.min(o.prec);
        let m = self.ring.modulus(k);
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| f(a % m, b % m, m)).collect();
        RingElem { ring: self.ring.clone(), c, prec: k }
    }

    pub fn add(&self, o: &RingElem) -> RingElem {
        self.binary(o, addmod)
    }
    pub fn sub(&self, o: &RingElem) -> RingElem {
        self.binary(o, submod)
    }
    pub fn neg(&self) -> RingElem {
        let m = self.modulus();
        RingElem { ring: self.ring.clone(), c: self.c.iter().map(|&x| negmod(x, m)).collect(), prec: self.prec }
    }
    pub fn mul(&self, o: &RingElem) -> RingElem {
        assert_eq!(self.ring, o.ring, "ring mismatch");
        let k = self.prec.min(o.prec);
        let m = self.ring.modulus(k);
        let a = self.reduced_coeffs(k);
        let b = o.reduced_coeffs(k);
        RingElem { ring: self.ring.clone(), c: self.ring.mul_slices(&a, &b, m), prec: k }
    }
    pub fn scale(&self, s: i64) -> RingElem {
        let m = self.modulus();
        let s = zmod::from_i64(s, m);
        RingElem { ring: self.ring.clone(), c: self.c.iter().map(|&x| mulmod(x, s, m)).collect(), prec: self.prec }
    }
    pub fn pow(&self, mut e: u64) -> RingElem {
        let mut acc = self.ring.one(self.prec);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }

    pub fn frobenius(&self) -> RingElem {
        let m = self.modulus();
        RingElem { ring: self.ring.clone(), c: self.ring.frob_slice(&self.c, m), prec: self.prec }
    }

    /// σ^k for the generator σ of the top unramified Galois group.
    pub fn galois(&self, k: u32) -> Option<RingElem> {
        let m = self.modulus();
        let mut c = self.c.clone();
        for _ in 0..k {
            c = self.ring.galois_slice(&c, m)?;
        }
        Some(RingElem { ring: self.ring.clone(), c, prec: self.prec })
    }

    pub fn is_unit(&self) -> bool {
        let p = self.ring.p();
        let r: Vec<u64> = self.c.iter().map(|&x| x % p).collect();
        self.ring.inv_slice(&r, 1).is_some()
    }

    pub fn invert(&self) -> Result<RingElem> {
        self.ring
            .inv_slice(&self.c, self.prec)
            .map(|c| RingElem { ring: self.ring.clone(), c, prec: self.prec })
            .ok_or(Error::NonUnit)
    }

    /// Reduce to a lower precision; raising is refused.
    pub fn reduce(&self, new_n: u32) -> Result<RingElem> {
        if new_n > self.prec {
            return Err(Error::PrecisionRaise { have: self.prec, want: new_n });
        }
        Ok(RingElem { ring: self.ring.clone(), c: self.reduced_coeffs(new_n), prec: new_n })
    }

    pub fn valuation(&self) -> u32 {
        let p = self.ring.p();
        self.c.iter().map(|&x| zmod::val(x, p, self.prec)).min().unwrap_or(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn eq_at(&self, o: &RingElem, k: u32) -> bool {
        let k = k.min(self.prec).min(o.prec);
        self.reduced_coeffs(k) == o.reduced_coeffs(k)
    }

    /// Exact division by p^k; None if some coefficient is not divisible.
    pub fn div_p_pow(&self, k: u32) -> Option<RingElem> {
        let pk = self.ring.modulus(k);
        if self.c.iter().any(|&x| x % pk != 0) || k > self.prec {
            return None;
        }
        Some(RingElem { ring: self.ring.clone(), c: self.c.iter().map(|&x| x / pk).collect(), prec: self.prec - k })
    }

    pub fn mul_p_pow(&self, k: u32) -> RingElem {
        let m = self.modulus();
        let pk = self.ring.modulus(k) % m;
        RingElem { ring: self.ring.clone(), c: self.c.iter().map(|&x| mulmod(x, pk, m)).collect(), prec: self.prec }
    }

    /// Image under the inclusion of this ring as the innermost factor of
    /// `target` (R ⊂ R ⊗ Z_p[ζ], R ⊂ S).
    pub fn embed_into(&self, target: &Ring) -> RingElem {
        let mut c = vec![0u64; target.rank()];
        c[..self.c.len()].copy_from_slice(&self.c);
        RingElem { ring: target.clone(), c, prec: self.prec }
    }

    /// Inverse of `embed_into`; None if the element does not lie in `base`.
    pub fn project_onto(&self, base: &Ring) -> Option<RingElem> {
        let rb = base.rank();
        if self.c[rb..].iter().any(|&x| x != 0) {
            return None;
        }
        Some(RingElem { ring: base.clone(), c: self.c[..rb].to_vec(), prec: self.prec })
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ring.format_slice(&self.c, self.modulus()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(p: u64, s: &str, n: u32) -> Ring {
        Ring::new(&RingSpec::new(p, RingKind::parse(s).unwrap(), n)).unwrap()
    }

    #[test]
    fn spec_grammar_round_trips() {
        for s in ["Zp", "unram:2", "powser:4", "cyc:2@Zp", "cyc:3@powser:4", "unram:2@powser:3"] {
            assert_eq!(RingKind::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(RingKind::parse("UNRAM:3").unwrap(), RingKind::Unramified(3));
        assert!(RingKind::parse("powser:0").is_err());
        assert!(RingKind::parse("foo:1").is_err());
    }

    #[test]
    fn truncated_integers_mod_256() {
        let r = ring(2, "Zp", 8);
        assert_eq!(r.rank(), 1);
        let x = r.from_int(200, 8).add(&r.from_int(100, 8));
        assert_eq!(x.coeffs(), &[44]);
    }

    #[test]
    fn unramified_f2_uses_w2_w_1() {
        // the only irreducible quadratic over F_2, found by exhaustion
        assert_eq!(least_irreducible(2, 2), vec![1, 1, 1]);
        assert_eq!(least_irreducible(3, 2), vec![1, 0, 1]);
        let r = ring(2, "unram:2", 8);
        assert_eq!(r.defining_polynomial(), Some(&[1u64, 1, 1][..]));
        let w = r.generator('w', 8).unwrap();
        // ω² = -1 - ω
        let w2 = w.mul(&w);
        assert_eq!(w2, r.from_int(-1, 8).sub(&w));
    }

    #[test]
    fn frobenius_examples() {
        let z = ring(2, "Zp", 8);
        assert_eq!(z.from_int(5, 8).frobenius(), z.from_int(5, 8));
        let ps = ring(2, "powser:4", 6);
        let t = ps.generator('T', 6).unwrap();
        let one_t = ps.one(6).add(&t);
        assert_eq!(one_t.frobenius(), ps.one(6).add(&t.mul(&t)));
        let u = ring(2, "unram:2", 8);
        let w = u.generator('w', 8).unwrap();
        let fw = w.frobenius();
        assert_eq!(fw, u.from_int(-1, 8).sub(&w));
        assert!(fw.sub(&w.mul(&w)).valuation() >= 1);
        assert_eq!(fw.frobenius(), w);
    }

    #[test]
    fn inversion_examples() {
        let r = ring(2, "Zp", 4);
        assert_eq!(r.from_int(-1, 4).invert().unwrap().coeffs(), &[15]);
        assert_eq!(r.from_int(3, 4).invert().unwrap().coeffs(), &[11]);
        let r5 = ring(5, "Zp", 4);
        assert_eq!(r5.from_int(5, 4).invert(), Err(Error::NonUnit));
        let ps = ring(3, "powser:4", 6);
        let t = ps.generator('T', 6).unwrap();
        assert_eq!(t.invert(), Err(Error::NonUnit));
    }

    #[test]
    fn reduce_examples() {
        let r = ring(2, "Zp", 4);
        assert_eq!(r.from_int(13, 4).reduce(2).unwrap().coeffs(), &[1]);
        assert_eq!(r.from_int(13, 4).reduce(6), Err(Error::PrecisionRaise { have: 4, want: 6 }));
        let ps = ring(3, "powser:4", 6);
        let t3 = ps.generator('T', 6).unwrap().pow(3);
        let red = t3.reduce(1).unwrap();
        assert_eq!(red.prec(), 1);
        assert_eq!(red.to_string(), "T^3");
    }

    #[test]
    fn cyclotomic_tensor_relations() {
        let r = ring(2, "cyc:2@Zp", 6);
        let z = r.generator('z', 6).unwrap();
        assert_eq!(z.mul(&z), r.from_int(-1, 6));
        let r3 = ring(3, "cyc:1@powser:2", 6);
        let z = r3.generator('z', 6).unwrap();
        let s = r3.one(6).add(&z).add(&z.mul(&z));
        assert!(s.is_zero());
        // F fixes ζ and moves T
        let t = r3.generator('T', 6).unwrap();
        assert_eq!(z.frobenius(), z);
        assert!(t.frobenius().is_zero()); // T^3 = 0 in powser:2
    }

    #[test]
    fn hypothesis_and_homomorphism_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, s) in [(2, "Zp"), (2, "unram:2"), (3, "unram:3"), (3, "powser:4"), (2, "cyc:2@unram:2"), (3, "unram:2@powser:2")] {
            let r = ring(p, s, 10);
            for _ in 0..50 {
                let x = r.random(&mut rng, 10);
                let y = r.random(&mut rng, 10);
                if !s.starts_with("cyc") {
                    // ζ is fixed by F, so the congruence is only claimed on base rings
                    assert!(x.frobenius().sub(&x.pow(p)).valuation() >= 1, "{s}");
                }
                assert_eq!(x.add(&y).frobenius(), x.frobenius().add(&y.frobenius()));
                assert_eq!(x.mul(&y).frobenius(), x.frobenius().mul(&y.frobenius()));
                if x.is_unit() {
                    assert_eq!(x.invert().unwrap().mul(&x), r.one(10));
                }
            }
        }
    }

    #[test]
    fn unramified_frobenius_has_order_f() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, f) in [(2u64, 3u32), (3, 2), (5, 2), (2, 4)] {
            let r = Ring::new(&RingSpec::new(p, RingKind::Unramified(f), 8)).unwrap();
            let x = r.random(&mut rng, 8);
            let mut y = x.clone();
            for _ in 0..f {
                y = y.frobenius();
            }
            assert_eq!(y, x);
        }
    }

    #[test]
    fn display_is_readable() {
        let r = ring(2, "unram:2", 4);
        let w = r.generator('w', 4).unwrap();
        assert_eq!(w.scale(3).add(&r.from_int(5, 4)).to_string(), "5 + 3*w");
        let c = ring(2, "cyc:2@powser:2", 4);
        let t = c.generator('T', 4).unwrap();
        let z = c.generator('z', 4).unwrap();
        assert_eq!(t.add(&c.one(4)).mul(&z).to_string(), "(1 + T)*z");
    }
}
