//! Irreducible characters of p-groups by monomial induction, Adams
//! operations, and determinants Det(x)(χ) evaluated through the induced
//! monomial representations.

pub mod cyclotomic;

use std::sync::Arc;

pub use cyclotomic::CyclotomicInt;

use crate::coeffring::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::groupring::{ClassVector, GroupRingElem};
use crate::padiclog::{group_log, PDivisible, ScaledElem};
use crate::pgroup::{has, members, FiniteGroup, Group, Subset};
use crate::zmod;

/// Ind_H^G θ: H, θ(h) = ζ^{theta[h]} for h ∈ H, and a left transversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub subgroup: Subset,
    pub theta: Vec<u64>,
    pub transversal: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    /// One value per conjugacy class.
    pub values: Vec<CyclotomicInt>,
    pub degree: u64,
    pub monomial: Option<Monomial>,
}

/// A Z-combination of the irreducibles of a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VirtualCharacter {
    pub coeffs: Vec<i64>,
    pub values: Vec<CyclotomicInt>,
}

#[derive(Debug)]
pub struct CharacterTable {
    /// Values lie in Z[ζ_{p^e}].
    pub e: u32,
    pub chars: Vec<Character>,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.chars.len()
    }
    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }
}

/// Exponent e with every character value in Z[ζ_{p^e}] (at least 1).
fn root_exponent(g: &FiniteGroup) -> u32 {
    zmod::log_exact(g.exponent(), g.p()).unwrap().max(1)
}

/// Linear characters of a subgroup, as exponent vectors over G.
fn linear_characters(g: &FiniteGroup, h: Subset, e: u32) -> Vec<Vec<u64>> {
    let q = zmod::pow_u64(g.p(), e);
    let mut gens: Vec<usize> = Vec::new();
    for x in members(h) {
        if !has(g.closure(&gens), x) {
            gens.push(x);
        }
    }
    let choices: Vec<u64> = gens.iter().map(|&x| g.elem_order(x)).collect();
    let total: u64 = choices.iter().product();
    let mut out = Vec::new();
    'outer: for idx in 0..total {
        let mut rest = idx;
        let imgs: Vec<u64> = choices
            .iter()
            .map(|&o| {
                let a = rest % o;
                rest /= o;
                a * (q / o)
            })
            .collect();
        let mut val = vec![u64::MAX; g.order()];
        val[0] = 0;
        let mut stack = vec![0usize];
        while let Some(x) = stack.pop() {
            for (&s, &a) in gens.iter().zip(&imgs) {
                let y = g.mul(x, s);
                let v = (val[x] + a) % q;
                if val[y] == u64::MAX {
                    val[y] = v;
                    stack.push(y);
                } else if val[y] != v {
                    continue 'outer;
                }
            }
        }
        for v in val.iter_mut() {
            if *v == u64::MAX {
                *v = 0;
            }
        }
        out.push(val);
    }
    out
}

fn induce(g: &FiniteGroup, m: &Monomial, e: u32) -> Vec<CyclotomicInt> {
    let p = g.p();
    g.classes()
        .iter()
        .map(|cls| {
            let x = cls[0];
            let mut acc = CyclotomicInt::from_int(p, e, 0);
            for &t in &m.transversal {
                let y = g.mul(g.mul(g.inv(t), x), t);
                if has(m.subgroup, y) {
                    acc = acc.add(&CyclotomicInt::zeta_pow(p, e, m.theta[y]));
                }
            }
            acc
        })
        .collect()
}

/// Σ_K |K|·a(K)·conj(b(K)); equals |G|·⟨a, b⟩.
fn raw_inner(g: &FiniteGroup, a: &[CyclotomicInt], b: &[CyclotomicInt]) -> CyclotomicInt {
    let mut acc = a[0].scale(0);
    for (k, cls) in g.classes().iter().enumerate() {
        acc = acc.add(&a[k].mul(&b[k].conj()).scale(cls.len() as i64));
    }
    acc
}

/// ⟨a, b⟩ if it is an integer.
pub fn inner_product(g: &FiniteGroup, a: &[CyclotomicInt], b: &[CyclotomicInt]) -> Option<i64> {
    let s = raw_inner(g, a, b).as_integer()?;
    let n = g.order() as i64;
    (s % n == 0).then_some(s / n)
}

fn search(g: &FiniteGroup) -> Result<CharacterTable> {
    let e = root_exponent(g);
    let n = g.order() as u64;
    let mut found: Vec<Character> = Vec::new();
    let mut mass = 0u64;
    let subgroups: Vec<Subset> =
        if g.is_abelian() { vec![g.closure(&(0..g.order()).collect::<Vec<_>>())] } else { g.subgroups() };
    for &h in subgroups.iter().rev() {
        if mass == n {
            break;
        }
        let index = n / h.count_ones() as u64;
        if mass + index * index > n {
            continue;
        }
        let transversal = g.left_transversal(h);
        for theta in linear_characters(g, h, e) {
            let m = Monomial { subgroup: h, theta, transversal: transversal.clone() };
            let values = induce(g, &m, e);
            if inner_product(g, &values, &values) != Some(1) || found.iter().any(|c| c.values == values) {
                continue;
            }
            mass += index * index;
            found.push(Character { values, degree: index, monomial: Some(m) });
            if mass == n {
                break;
            }
        }
    }
    if mass != n {
        return Err(Error::IncompleteSearch { found: mass as usize, order: n as usize });
    }
    found.sort_by(|a, b| (a.degree, &a.values).cmp(&(b.degree, &b.values)));
    Ok(CharacterTable { e, chars: found })
}

/// The irreducible characters of G, computed once per group.
pub fn irreducible_characters(g: &Group) -> Result<Arc<CharacterTable>> {
    g.char_table.get_or_init(|| search(g).map(Arc::new)).clone()
}

/// ψ^p χ as values χ(g^p) and as a combination of irreducibles.
pub fn adams(g: &Group, values: &[CyclotomicInt]) -> Result<VirtualCharacter> {
    let table = irreducible_characters(g)?;
    let v: Vec<CyclotomicInt> = (0..g.num_classes()).map(|k| values[g.class_power(k)].clone()).collect();
    let coeffs = table
        .chars
        .iter()
        .map(|c| inner_product(g, &v, &c.values).ok_or(Error::NonIntegerDecomposition))
        .collect::<Result<Vec<i64>>>()?;
    // the combination must reproduce the values exactly
    let mut back = vec![v[0].scale(0); v.len()];
    for (c, &k) in table.chars.iter().zip(&coeffs) {
        for (b, x) in back.iter_mut().zip(&c.values) {
            *b = b.add(&x.scale(k));
        }
    }
    if back != v {
        return Err(Error::NonIntegerDecomposition);
    }
    Ok(VirtualCharacter { coeffs, values: v })
}

/// Division-free determinant (Bird's algorithm) over a commutative ring.
pub fn det_bird(a: &[Vec<RingElem>]) -> RingElem {
    let n = a.len();
    let mut x: Vec<Vec<RingElem>> = a.to_vec();
    for _ in 1..n {
        // μ(X): strict upper part of X, diagonal −(sum of later diagonal entries)
        let zero = a[0][0].ring().zero(a[0][0].prec());
        let mut mu = vec![vec![zero.clone(); n]; n];
        let mut tail = zero.clone();
        for i in (0..n).rev() {
            mu[i][i] = tail.neg();
            tail = tail.add(&x[i][i]);
            for j in i + 1..n {
                mu[i][j] = x[i][j].clone();
            }
        }
        let mut next = vec![vec![zero.clone(); n]; n];
        for i in 0..n {
            for k in i..n {
                if mu[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    next[i][j] = next[i][j].add(&mu[i][k].mul(&a[k][j]));
                }
            }
        }
        x = next;
    }
    if n.is_multiple_of(2) {
        x[0][0].neg()
    } else {
        x[0][0].clone()
    }
}

/// log of a principal unit v of a commutative coefficient ring, extended to
/// 1 + radical by log v = p^{−M} log(v^{p^M}) with M least such that
/// v^{p^M} ∈ 1 + p²·ring.
pub fn log_unit(v: &RingElem) -> Result<ScaledElem<RingElem>> {
    let ring = v.ring();
    let p = ring.p();
    let w = v.prec();
    let one = ring.one(w);
    let mut u = v.clone();
    let mut big_m = 0;
    while u.sub(&one).valuation() < 2 {
        if big_m > 64 {
            return Err(Error::NotOneUnit);
        }
        u = u.pow(p);
        big_m += 1;
    }
    let x = u.sub(&one);
    let y = x.div_p_pow(2).expect("valuation ≥ 2").reduce(w - 2)?;
    let y = ring.from_coeffs(y.coeffs().to_vec(), w);
    let m = ring.modulus(w);
    let mut sum = ring.zero(w);
    let mut yk = one;
    for k in 1u64.. {
        let v = zmod::val(k, p, 64);
        if 2 * k as i64 - v as i64 >= w as i64 && 2 * k - zmod::floor_log(k, p) as u64 >= w as u64 {
            break;
        }
        yk = yk.mul(&y);
        let e = 2 * k as u32 - v;
        if e >= w {
            continue;
        }
        let unit = zmod::inv((k / zmod::pow_u64(p, v)) % m, m).expect("unit");
        let mut coef = zmod::mulmod(zmod::pow_u64(p, e), unit, m);
        if k % 2 == 0 {
            coef = zmod::negmod(coef, m);
        }
        sum = sum.add(&yk.scale(coef as i64));
    }
    Ok(ScaledElem { payload: sum, a: big_m, e: w - big_m.min(w) }.normalized())
}

impl PDivisible for RingElem {
    fn div_p(&self) -> Option<Self> {
        self.div_p_pow(1)
    }
}

/// Σ c_i·s_i over a common denominator.
pub fn combine(terms: &[(i64, &ScaledElem<RingElem>)]) -> ScaledElem<RingElem> {
    let a = terms.iter().map(|t| t.1.a).max().unwrap_or(0);
    let e = terms.iter().map(|t| t.1.e).min().unwrap_or(0);
    let ring = terms[0].1.payload.ring();
    let mut acc = ring.zero(e + a);
    for (c, s) in terms {
        let lifted = s.payload.reduce(s.e + s.a).unwrap();
        let lifted = ring.from_coeffs(lifted.coeffs().to_vec(), e + a).mul_p_pow(a - s.a);
        acc = acc.add(&lifted.scale(*c));
    }
    ScaledElem { payload: acc, a, e }.normalized()
}

/// Whether a scaled value vanishes modulo p^k.
pub fn vanishes_mod(s: &ScaledElem<RingElem>, k: u32) -> Result<bool> {
    if s.e < k {
        return Err(Error::PrecisionStarved { have: s.e, want: k });
    }
    Ok(s.payload.reduce(s.a + k)?.is_zero())
}

/// Determinants of elements of R[G] on the irreducible characters, with
/// values in R ⊗ Z_p[ζ_{p^e}].
pub struct Determinants {
    group: Group,
    base: Ring,
    target: Ring,
    table: Arc<CharacterTable>,
    zeta: Vec<RingElem>,
}

impl Determinants {
    pub fn new(base: &Ring, group: &Group) -> Result<Determinants> {
        let table = irreducible_characters(group)?;
        let target = base.cyclotomic(table.e)?;
        let z = target.generator('z', target.cap()).expect("cyclotomic level");
        let q = zmod::pow_u64(group.p(), table.e);
        let mut zeta = vec![target.one(target.cap())];
        for k in 1..q as usize {
            zeta.push(zeta[k - 1].mul(&z));
        }
        Ok(Determinants { group: group.clone(), base: base.clone(), target, table, zeta })
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }
    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn cyclotomic_value(&self, c: &CyclotomicInt, prec: u32) -> RingElem {
        let mut acc = self.target.zero(prec);
        for (i, &a) in c.coeffs().iter().enumerate() {
            if a != 0 {
                acc = acc.add(&self.zeta[i].scale(a));
            }
        }
        acc
    }

    /// Σ_g x_g ρ(g) for the monomial representation (H, θ, T).
    fn monomial_matrix(&self, x: &GroupRingElem, m: &Monomial) -> Vec<Vec<RingElem>> {
        let g = &self.group;
        let d = m.transversal.len();
        let zero = self.target.zero(x.prec());
        let mut mat = vec![vec![zero; d]; d];
        for gi in x.support() {
            let r = x.coeff(gi).embed_into(&self.target);
            for (j, &tj) in m.transversal.iter().enumerate() {
                let y = g.mul(gi, tj);
                for (i, &ti) in m.transversal.iter().enumerate() {
                    let h = g.mul(g.inv(ti), y);
                    if has(m.subgroup, h) {
                        mat[i][j] = mat[i][j].add(&r.mul(&self.zeta[m.theta[h] as usize]));
                        break;
                    }
                }
            }
        }
        mat
    }

    pub fn det_monomial(&self, x: &GroupRingElem, m: &Monomial) -> RingElem {
        det_bird(&self.monomial_matrix(x, m))
    }

    /// Det of a square matrix over R[G] on χ_i: the kd × kd block matrix.
    pub fn det_matrix(&self, a: &[Vec<GroupRingElem>], i: usize) -> RingElem {
        let m = self.table.chars[i].monomial.as_ref().expect("irreducibles carry monomial data");
        let d = m.transversal.len();
        let k = a.len();
        let prec = a.iter().flatten().map(|x| x.prec()).min().unwrap_or(1);
        let mut big = vec![vec![self.target.zero(prec); k * d]; k * d];
        for (r, row) in a.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                for (i2, mrow) in self.monomial_matrix(x, m).into_iter().enumerate() {
                    for (j2, v) in mrow.into_iter().enumerate() {
                        big[r * d + i2][c * d + j2] = v;
                    }
                }
            }
        }
        det_bird(&big)
    }

    /// Det(x)(χ_i).
    pub fn det_value(&self, x: &GroupRingElem, i: usize) -> RingElem {
        let m = self.table.chars[i].monomial.as_ref().expect("irreducibles carry monomial data");
        self.det_monomial(x, m)
    }

    /// Det(x) on a virtual character; negative multiplicities invert.
    pub fn det_virtual(&self, x: &GroupRingElem, coeffs: &[i64]) -> Result<RingElem> {
        let mut acc = self.target.one(x.prec());
        for (i, &k) in coeffs.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let v = self.det_value(x, i);
            let v = if k < 0 { v.invert()? } else { v };
            acc = acc.mul(&v.pow(k.unsigned_abs()));
        }
        Ok(acc)
    }

    /// Det(x) = Det(y) on every irreducible character.
    pub fn det_equal(&self, x: &GroupRingElem, y: &GroupRingElem) -> Result<bool> {
        for i in 0..self.table.len() {
            let (a, b) = (self.det_value(x, i), self.det_value(y, i));
            if !a.is_unit() || !b.is_unit() {
                return Err(Error::NonUnit);
            }
            if a != b {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// log Det(u)(χ_i).
    pub fn log_det(&self, u: &GroupRingElem, i: usize) -> Result<ScaledElem<RingElem>> {
        log_unit(&self.det_value(u, i))
    }

    /// χ_i applied to a class vector, χ(Σ v_K [K]) = Σ v_K χ(K).
    pub fn evaluate(&self, v: &ClassVector, values: &[CyclotomicInt]) -> RingElem {
        let mut acc = self.target.zero(v.prec());
        for (k, val) in values.iter().enumerate() {
            let c = v.coeff(k);
            if !c.is_zero() {
                acc = acc.add(&c.embed_into(&self.target).mul(&self.cyclotomic_value(val, v.prec())));
            }
        }
        acc
    }

    /// χ(L(1 + x)) = log[Det(1 + x)(pχ)·Det(1 + F(x))(−ψ^pχ)] modulo p^n.
    /// u = 1 + x must carry enough digits for `group_log(u, n)`.
    pub fn check_log_identity(&self, u: &GroupRingElem, i: usize, n: u32) -> Result<bool> {
        let chi = &self.table.chars[i];
        let lhs = self.evaluate(&group_log(u, n)?, &chi.values);
        let psi = adams(&self.group, &chi.values)?;
        let own = self.log_det(u, i)?;
        let fu = u.frobenius();
        let mut logs = Vec::new();
        for (j, &k) in psi.coeffs.iter().enumerate() {
            if k != 0 {
                logs.push((k, self.log_det(&fu, j)?));
            }
        }
        let p = self.group.p() as i64;
        let mut terms: Vec<(i64, &ScaledElem<RingElem>)> = vec![(p, &own)];
        terms.extend(logs.iter().map(|(k, s)| (-k, s)));
        let rhs = combine(&terms);
        let lhs = ScaledElem { payload: lhs, a: 0, e: n };
        let diff = combine(&[(1, &lhs), (-1, &rhs)]);
        vanishes_mod(&diff, n)
    }

    /// log Det(u)(χ) = 0 for every irreducible χ, to precision n: the
    /// determinant of u is p-power torsion as far as n digits can tell.
    pub fn torsion_test(&self, u: &GroupRingElem, n: u32) -> Result<bool> {
        for i in 0..self.table.len() {
            if !vanishes_mod(&self.log_det(u, i)?, n)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn base(&self) -> &Ring {
        &self.base
    }
}
