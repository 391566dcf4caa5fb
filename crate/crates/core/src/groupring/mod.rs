//! R[G] and R[C_G] with the maps φ, Ψ, Ψ̄, augmentation and quotients.
//!
//! Coefficients are stored flat: element g occupies `c[g*rank..(g+1)*rank]`.

pub mod lattice;
pub mod parse;

use std::fmt;

use crate::coeffring::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::pgroup::{Group, GroupHom, Subset};
use crate::zmod::{self, addmod, mulmod, negmod, submod};

pub use lattice::{Lattice, LinearSolver};

#[derive(Clone, Debug)]
pub struct GroupRingElem {
    ring: Ring,
    group: Group,
    c: Vec<u64>,
    prec: u32,
}

impl PartialEq for GroupRingElem {
    fn eq(&self, o: &GroupRingElem) -> bool {
        same_group(&self.group, &o.group) && self.ring == o.ring && self.eq_at(o, self.prec.min(o.prec))
    }
}

pub(crate) fn same_group(a: &Group, b: &Group) -> bool {
    std::sync::Arc::ptr_eq(a, b) || **a == **b
}

fn reduce_vec(c: &[u64], m: u64) -> Vec<u64> {
    c.iter().map(|&x| x % m).collect()
}

impl GroupRingElem {
    pub fn from_coeffs(ring: &Ring, group: &Group, c: Vec<u64>, prec: u32) -> GroupRingElem {
        assert_eq!(c.len(), ring.rank() * group.order());
        let m = ring.modulus(prec);
        GroupRingElem { ring: ring.clone(), group: group.clone(), c: reduce_vec(&c, m), prec }
    }

    pub fn zero(ring: &Ring, group: &Group, prec: u32) -> GroupRingElem {
        GroupRingElem { ring: ring.clone(), group: group.clone(), c: vec![0; ring.rank() * group.order()], prec }
    }

    /// r·g
    pub fn monomial(r: &RingElem, group: &Group, g: usize) -> GroupRingElem {
        let ring = r.ring();
        let mut x = GroupRingElem::zero(ring, group, r.prec());
        let k = ring.rank();
        x.c[g * k..(g + 1) * k].copy_from_slice(r.coeffs());
        x
    }

    pub fn scalar(r: &RingElem, group: &Group) -> GroupRingElem {
        GroupRingElem::monomial(r, group, 0)
    }

    pub fn one(ring: &Ring, group: &Group, prec: u32) -> GroupRingElem {
        GroupRingElem::scalar(&ring.one(prec), group)
    }

    pub fn group_elem(ring: &Ring, group: &Group, g: usize, prec: u32) -> GroupRingElem {
        GroupRingElem::monomial(&ring.one(prec), group, g)
    }

    pub fn random(ring: &Ring, group: &Group, rng: &mut impl rand::Rng, prec: u32) -> GroupRingElem {
        let m = ring.modulus(prec);
        let c = (0..ring.rank() * group.order()).map(|_| rng.gen_range(0..m)).collect();
        GroupRingElem { ring: ring.clone(), group: group.clone(), c, prec }
    }

    /// Uniform element of the augmentation ideal.
    pub fn random_in_i(ring: &Ring, group: &Group, rng: &mut impl rand::Rng, prec: u32) -> GroupRingElem {
        let x = GroupRingElem::random(ring, group, rng, prec);
        let a = x.augment();
        x.sub(&GroupRingElem::scalar(&a, group))
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn group(&self) -> &Group {
        &self.group
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
    fn rank(&self) -> usize {
        self.ring.rank()
    }
    fn modulus(&self) -> u64 {
        self.ring.modulus(self.prec)
    }

    pub fn coeff(&self, g: usize) -> RingElem {
        let k = self.rank();
        self.ring.from_coeffs(self.c[g * k..(g + 1) * k].to_vec(), self.prec)
    }

    pub fn support(&self) -> Vec<usize> {
        let k = self.rank();
        (0..self.group.order()).filter(|&g| self.c[g * k..(g + 1) * k].iter().any(|&x| x != 0)).collect()
    }

    fn check(&self, o: &GroupRingElem) -> Result<()> {
        if !same_group(&self.group, &o.group) {
            return Err(Error::GroupMismatch);
        }
        if self.ring != o.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    fn zip(&self, o: &GroupRingElem, f: fn(u64, u64, u64) -> u64) -> GroupRingElem {
        self.check(o).expect("operands must share group and ring");
        let prec = self.prec.min(o.prec);
        let m = self.ring.modulus(prec);
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| f(a % m, b % m, m)).collect();
        GroupRingElem { ring: self.ring.clone(), group: self.group.clone(), c, prec }
    }

    pub fn add(&self, o: &GroupRingElem) -> GroupRingElem {
        self.zip(o, addmod)
    }
    pub fn sub(&self, o: &GroupRingElem) -> GroupRingElem {
        self.zip(o, submod)
    }
    pub fn neg(&self) -> GroupRingElem {
        let m = self.modulus();
        GroupRingElem { c: self.c.iter().map(|&x| negmod(x, m)).collect(), ..self.clone() }
    }

    pub fn try_mul(&self, o: &GroupRingElem) -> Result<GroupRingElem> {
        self.check(o)?;
        Ok(self.mul(o))
    }

    /// Convolution over the multiplication table.
    pub fn mul(&self, o: &GroupRingElem) -> GroupRingElem {
        self.check(o).expect("operands must share group and ring");
        let prec = self.prec.min(o.prec);
        let m = self.ring.modulus(prec);
        let k = self.rank();
        let n = self.group.order();
        let a = reduce_vec(&self.c, m);
        let b = reduce_vec(&o.c, m);
        let sa = nonzero_slots(&a, k, n);
        let sb = nonzero_slots(&b, k, n);
        let mut out = vec![0u64; k * n];
        for &g in &sa {
            for &h in &sb {
                let gh = self.group.mul(g, h);
                self.ring.mul_acc(&mut out[gh * k..(gh + 1) * k], &a[g * k..(g + 1) * k], &b[h * k..(h + 1) * k], m);
            }
        }
        GroupRingElem { ring: self.ring.clone(), group: self.group.clone(), c: out, prec }
    }

    pub fn pow(&self, mut e: u64) -> GroupRingElem {
        let mut acc = GroupRingElem::one(&self.ring, &self.group, self.prec);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// r·x for r ∈ R.
    pub fn scale(&self, r: &RingElem) -> GroupRingElem {
        GroupRingElem::scalar(r, &self.group).mul(self)
    }

    pub fn scale_int(&self, s: i64) -> GroupRingElem {
        let m = self.modulus();
        let s = zmod::from_i64(s, m);
        GroupRingElem { c: self.c.iter().map(|&x| mulmod(x, s, m)).collect(), ..self.clone() }
    }

    pub fn mul_p_pow(&self, k: u32) -> GroupRingElem {
        let m = self.modulus();
        let pk = self.ring.modulus(k) % m;
        GroupRingElem { c: self.c.iter().map(|&x| mulmod(x, pk, m)).collect(), ..self.clone() }
    }

    /// Exact division by p^k, lowering precision by k.
    pub fn div_p_pow(&self, k: u32) -> Option<GroupRingElem> {
        if k > self.prec {
            return None;
        }
        let pk = self.ring.modulus(k);
        if self.c.iter().any(|&x| x % pk != 0) {
            return None;
        }
        Some(GroupRingElem { c: self.c.iter().map(|&x| x / pk).collect(), prec: self.prec - k, ..self.clone() })
    }

    pub fn reduce(&self, n: u32) -> Result<GroupRingElem> {
        if n > self.prec {
            return Err(Error::PrecisionRaise { have: self.prec, want: n });
        }
        Ok(GroupRingElem { c: reduce_vec(&self.c, self.ring.modulus(n)), prec: n, ..self.clone() })
    }

    /// Reinterpret the digits at a higher precision (a lift, not a refinement).
    pub fn lift_prec(&self, n: u32) -> GroupRingElem {
        GroupRingElem { prec: n, ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn eq_at(&self, o: &GroupRingElem, k: u32) -> bool {
        let k = k.min(self.prec).min(o.prec);
        let m = self.ring.modulus(k);
        self.c.iter().zip(&o.c).all(|(&a, &b)| a % m == b % m)
    }

    /// Minimum valuation of the coefficients (prec for zero).
    pub fn valuation(&self) -> u32 {
        let p = self.ring.p();
        self.c.iter().map(|&x| zmod::val(x, p, self.prec)).min().unwrap_or(self.prec)
    }

    pub fn augment(&self) -> RingElem {
        let k = self.rank();
        let m = self.modulus();
        let mut s = vec![0u64; k];
        for chunk in self.c.chunks(k) {
            for (a, &b) in s.iter_mut().zip(chunk) {
                *a = addmod(*a, b, m);
            }
        }
        self.ring.from_coeffs(s, self.prec)
    }

    /// Push coefficients along a group homomorphism.
    pub fn quotient_map(&self, hom: &GroupHom) -> Result<GroupRingElem> {
        if !same_group(&self.group, &hom.source) {
            return Err(Error::HomMismatch);
        }
        let k = self.rank();
        let m = self.modulus();
        let mut c = vec![0u64; k * hom.target.order()];
        for g in 0..self.group.order() {
            let t = hom.apply(g);
            for i in 0..k {
                c[t * k + i] = addmod(c[t * k + i], self.c[g * k + i], m);
            }
        }
        Ok(GroupRingElem { ring: self.ring.clone(), group: hom.target.clone(), c, prec: self.prec })
    }

    /// Lift along a homomorphism using a section of it.
    pub fn lift_along(&self, hom: &GroupHom, section: &[usize]) -> GroupRingElem {
        let k = self.rank();
        let mut c = vec![0u64; k * hom.source.order()];
        for t in 0..self.group.order() {
            let g = section[t];
            c[g * k..(g + 1) * k].copy_from_slice(&self.c[t * k..(t + 1) * k]);
        }
        GroupRingElem { ring: self.ring.clone(), group: hom.source.clone(), c, prec: self.prec }
    }

    pub fn phi(&self) -> ClassVector {
        let k = self.rank();
        let m = self.modulus();
        let mut c = vec![0u64; k * self.group.num_classes()];
        for g in 0..self.group.order() {
            let cl = self.group.class_of(g);
            for i in 0..k {
                c[cl * k + i] = addmod(c[cl * k + i], self.c[g * k + i], m);
            }
        }
        ClassVector { ring: self.ring.clone(), group: self.group.clone(), c, prec: self.prec }
    }

    /// Coefficientwise F with group elements fixed.
    pub fn frobenius(&self) -> GroupRingElem {
        let k = self.rank();
        let m = self.modulus();
        let mut c = Vec::with_capacity(self.c.len());
        for chunk in self.c.chunks(k) {
            c.extend(self.ring.frob_slice(chunk, m));
        }
        GroupRingElem { c, ..self.clone() }
    }

    /// Ψ(r g) = F(r) g^p.
    pub fn psi(&self) -> GroupRingElem {
        let k = self.rank();
        let m = self.modulus();
        let p = self.ring.p();
        let mut c = vec![0u64; self.c.len()];
        for g in 0..self.group.order() {
            let chunk = &self.c[g * k..(g + 1) * k];
            if chunk.iter().all(|&x| x == 0) {
                continue;
            }
            let fr = self.ring.frob_slice(chunk, m);
            let gp = self.group.pow(g, p);
            for i in 0..k {
                c[gp * k + i] = addmod(c[gp * k + i], fr[i], m);
            }
        }
        GroupRingElem { c, ..self.clone() }
    }

    /// Coefficientwise σ^j of the top unramified level; G fixed.
    pub fn galois(&self, j: u32) -> Option<GroupRingElem> {
        let k = self.rank();
        let m = self.modulus();
        let mut c = self.c.clone();
        for _ in 0..j {
            let mut next = Vec::with_capacity(c.len());
            for chunk in c.chunks(k) {
                next.extend(self.ring.galois_slice(chunk, m)?);
            }
            c = next;
        }
        Some(GroupRingElem { c, ..self.clone() })
    }

    /// Coefficientwise inclusion into a ring that has this one as inner factor.
    pub fn embed_into(&self, target: &Ring) -> GroupRingElem {
        let k = self.rank();
        let kt = target.rank();
        let mut c = vec![0u64; kt * self.group.order()];
        for g in 0..self.group.order() {
            c[g * kt..g * kt + k].copy_from_slice(&self.c[g * k..(g + 1) * k]);
        }
        GroupRingElem { ring: target.clone(), group: self.group.clone(), c, prec: self.prec }
    }

    /// Inverse of `embed_into`; None if a coefficient leaves the base ring.
    pub fn project_onto(&self, base: &Ring) -> Option<GroupRingElem> {
        let k = self.rank();
        let kb = base.rank();
        let mut c = Vec::with_capacity(kb * self.group.order());
        for g in 0..self.group.order() {
            let chunk = &self.c[g * k..(g + 1) * k];
            if chunk[kb..].iter().any(|&x| x != 0) {
                return None;
            }
            c.extend_from_slice(&chunk[..kb]);
        }
        Some(GroupRingElem { ring: base.clone(), group: self.group.clone(), c, prec: self.prec })
    }

    pub fn conjugate_by(&self, h: usize) -> GroupRingElem {
        let k = self.rank();
        let mut c = vec![0u64; self.c.len()];
        for g in 0..self.group.order() {
            let t = self.group.conj(h, g);
            c[t * k..(t + 1) * k].copy_from_slice(&self.c[g * k..(g + 1) * k]);
        }
        GroupRingElem { c, ..self.clone() }
    }

    pub fn is_unit(&self) -> bool {
        self.augment().is_unit()
    }

    /// Two-sided inverse; a unit exactly when the augmentation is, since
    /// I + pR[G] lies in the radical.  Newton iteration squares the error.
    pub fn invert(&self) -> Result<GroupRingElem> {
        let a_inv = self.augment().invert()?;
        let one = GroupRingElem::one(&self.ring, &self.group, self.prec);
        let mut y = GroupRingElem::scalar(&a_inv, &self.group);
        for _ in 0..64 {
            let e = one.sub(&self.mul(&y));
            if e.is_zero() {
                return Ok(y);
            }
            y = y.add(&y.mul(&e));
        }
        Err(Error::NoConvergence("group ring inversion"))
    }

    pub fn format_with(&self, show_prec: bool) -> String {
        let k = self.rank();
        let m = self.modulus();
        let mut terms = Vec::new();
        for g in 0..self.group.order() {
            let chunk = &self.c[g * k..(g + 1) * k];
            if chunk.iter().all(|&x| x == 0) {
                continue;
            }
            let cs = self.ring.format_slice(chunk, m);
            terms.push(term_string(&cs, &self.group.word(g), g == 0));
        }
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        if show_prec {
            format!("{body} @{}^{}", self.ring.p(), self.prec)
        } else {
            body
        }
    }
}

fn term_string(cs: &str, word: &str, identity: bool) -> String {
    if identity {
        cs.to_string()
    } else if cs == "1" {
        word.to_string()
    } else if cs.contains('+') {
        format!("({cs})*{word}")
    } else {
        format!("{cs}*{word}")
    }
}

fn nonzero_slots(a: &[u64], k: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&g| a[g * k..(g + 1) * k].iter().any(|&x| x != 0)).collect()
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(false))
    }
}

/// An element of R[C_G], indexed by conjugacy class.
#[derive(Clone, Debug)]
pub struct ClassVector {
    ring: Ring,
    group: Group,
    c: Vec<u64>,
    prec: u32,
}

impl PartialEq for ClassVector {
    fn eq(&self, o: &ClassVector) -> bool {
        same_group(&self.group, &o.group) && self.ring == o.ring && self.eq_at(o, self.prec.min(o.prec))
    }
}

impl ClassVector {
    pub fn from_coeffs(ring: &Ring, group: &Group, c: Vec<u64>, prec: u32) -> ClassVector {
        assert_eq!(c.len(), ring.rank() * group.num_classes());
        let m = ring.modulus(prec);
        ClassVector { ring: ring.clone(), group: group.clone(), c: reduce_vec(&c, m), prec }
    }
    pub fn zero(ring: &Ring, group: &Group, prec: u32) -> ClassVector {
        ClassVector { ring: ring.clone(), group: group.clone(), c: vec![0; ring.rank() * group.num_classes()], prec }
    }
    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn group(&self) -> &Group {
        &self.group
    }
    pub fn prec(&self) -> u32 {
        self.prec
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }
    pub fn coeff(&self, class: usize) -> RingElem {
        let k = self.ring.rank();
        self.ring.from_coeffs(self.c[class * k..(class + 1) * k].to_vec(), self.prec)
    }
    fn modulus(&self) -> u64 {
        self.ring.modulus(self.prec)
    }
    fn zip(&self, o: &ClassVector, f: fn(u64, u64, u64) -> u64) -> ClassVector {
        assert!(same_group(&self.group, &o.group) && self.ring == o.ring);
        let prec = self.prec.min(o.prec);
        let m = self.ring.modulus(prec);
        let c = self.c.iter().zip(&o.c).map(|(&a, &b)| f(a % m, b % m, m)).collect();
        ClassVector { ring: self.ring.clone(), group: self.group.clone(), c, prec }
    }
    pub fn add(&self, o: &ClassVector) -> ClassVector {
        self.zip(o, addmod)
    }
    pub fn sub(&self, o: &ClassVector) -> ClassVector {
        self.zip(o, submod)
    }
    pub fn neg(&self) -> ClassVector {
        let m = self.modulus();
        ClassVector { c: self.c.iter().map(|&x| negmod(x, m)).collect(), ..self.clone() }
    }
    pub fn scale_int(&self, s: i64) -> ClassVector {
        let m = self.modulus();
        let s = zmod::from_i64(s, m);
        ClassVector { c: self.c.iter().map(|&x| mulmod(x, s, m)).collect(), ..self.clone() }
    }
    /// r·v for r ∈ R.
    pub fn scale(&self, r: &RingElem) -> ClassVector {
        let k = self.ring.rank();
        let prec = self.prec.min(r.prec());
        let m = self.ring.modulus(prec);
        let rc = reduce_vec(r.coeffs(), m);
        let mut c = Vec::with_capacity(self.c.len());
        for chunk in self.c.chunks(k) {
            c.extend(self.ring.mul_slices(&reduce_vec(chunk, m), &rc, m));
        }
        ClassVector { c, prec, ..self.clone() }
    }
    pub fn mul_p_pow(&self, k: u32) -> ClassVector {
        let m = self.modulus();
        let pk = self.ring.modulus(k) % m;
        ClassVector { c: self.c.iter().map(|&x| mulmod(x, pk, m)).collect(), ..self.clone() }
    }
    pub fn div_p_pow(&self, k: u32) -> Option<ClassVector> {
        if k > self.prec {
            return None;
        }
        let pk = self.ring.modulus(k);
        if self.c.iter().any(|&x| x % pk != 0) {
            return None;
        }
        Some(ClassVector { c: self.c.iter().map(|&x| x / pk).collect(), prec: self.prec - k, ..self.clone() })
    }
    pub fn reduce(&self, n: u32) -> Result<ClassVector> {
        if n > self.prec {
            return Err(Error::PrecisionRaise { have: self.prec, want: n });
        }
        Ok(ClassVector { c: reduce_vec(&self.c, self.ring.modulus(n)), prec: n, ..self.clone() })
    }
    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
    pub fn eq_at(&self, o: &ClassVector, k: u32) -> bool {
        let k = k.min(self.prec).min(o.prec);
        let m = self.ring.modulus(k);
        self.c.iter().zip(&o.c).all(|(&a, &b)| a % m == b % m)
    }
    pub fn valuation(&self) -> u32 {
        let p = self.ring.p();
        self.c.iter().map(|&x| zmod::val(x, p, self.prec)).min().unwrap_or(self.prec)
    }
    /// Sum of coefficients (the image under R[C_G] → R).
    pub fn total(&self) -> RingElem {
        let k = self.ring.rank();
        let m = self.modulus();
        let mut s = vec![0u64; k];
        for chunk in self.c.chunks(k) {
            for (a, &b) in s.iter_mut().zip(chunk) {
                *a = addmod(*a, b, m);
            }
        }
        self.ring.from_coeffs(s, self.prec)
    }

    /// Ψ̄: F on coefficients, [g] ↦ [g^p].
    pub fn psi_bar(&self) -> ClassVector {
        let k = self.ring.rank();
        let m = self.modulus();
        let mut c = vec![0u64; self.c.len()];
        for cl in 0..self.group.num_classes() {
            let chunk = &self.c[cl * k..(cl + 1) * k];
            if chunk.iter().all(|&x| x == 0) {
                continue;
            }
            let fr = self.ring.frob_slice(chunk, m);
            let t = self.group.class_power(cl);
            for i in 0..k {
                c[t * k + i] = addmod(c[t * k + i], fr[i], m);
            }
        }
        ClassVector { c, ..self.clone() }
    }

    /// Push along a homomorphism (classes map to classes).
    pub fn quotient_map(&self, hom: &GroupHom) -> Result<ClassVector> {
        if !same_group(&self.group, &hom.source) {
            return Err(Error::HomMismatch);
        }
        let k = self.ring.rank();
        let m = self.modulus();
        let mut c = vec![0u64; k * hom.target.num_classes()];
        for (cl, members) in self.group.classes().iter().enumerate() {
            let t = hom.target.class_of(hom.apply(members[0]));
            for i in 0..k {
                c[t * k + i] = addmod(c[t * k + i], self.c[cl * k + i], m);
            }
        }
        Ok(ClassVector { ring: self.ring.clone(), group: hom.target.clone(), c, prec: self.prec })
    }

    pub fn embed_into(&self, target: &Ring) -> ClassVector {
        let k = self.ring.rank();
        let kt = target.rank();
        let nc = self.group.num_classes();
        let mut c = vec![0u64; kt * nc];
        for cl in 0..nc {
            c[cl * kt..cl * kt + k].copy_from_slice(&self.c[cl * k..(cl + 1) * k]);
        }
        ClassVector { ring: target.clone(), group: self.group.clone(), c, prec: self.prec }
    }

    pub fn project_onto(&self, base: &Ring) -> Option<ClassVector> {
        let k = self.ring.rank();
        let kb = base.rank();
        let mut c = Vec::new();
        for chunk in self.c.chunks(k) {
            if chunk[kb..].iter().any(|&x| x != 0) {
                return None;
            }
            c.extend_from_slice(&chunk[..kb]);
        }
        Some(ClassVector { ring: base.clone(), group: self.group.clone(), c, prec: self.prec })
    }

    /// Coefficientwise σ^j.
    pub fn galois(&self, j: u32) -> Option<ClassVector> {
        let k = self.ring.rank();
        let m = self.modulus();
        let mut c = self.c.clone();
        for _ in 0..j {
            let mut next = Vec::with_capacity(c.len());
            for chunk in c.chunks(k) {
                next.extend(self.ring.galois_slice(chunk, m)?);
            }
            c = next;
        }
        Some(ClassVector { c, ..self.clone() })
    }

    pub fn format_with(&self, show_prec: bool) -> String {
        let k = self.ring.rank();
        let m = self.modulus();
        let mut terms = Vec::new();
        for cl in 0..self.group.num_classes() {
            let chunk = &self.c[cl * k..(cl + 1) * k];
            if chunk.iter().all(|&x| x == 0) {
                continue;
            }
            let cs = self.ring.format_slice(chunk, m);
            let word = format!("[{}]", self.group.word(self.group.classes()[cl][0]));
            terms.push(term_string(&cs, &word, false));
        }
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        if show_prec {
            format!("{body} @{}^{}", self.ring.p(), self.prec)
        } else {
            body
        }
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(false))
    }
}

// ------------------------------------------------------------ ideal lattices

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IdealKind {
    /// Augmentation ideal I.
    I,
    /// Kernel of R[G] → R[G^ab].
    A,
    /// (1 − c)R[G] for a central c.
    OneMinusC(usize),
    ISquared,
    PhiI,
    PhiA,
}

/// Z_p-generators r_α·x for every R-generator x and Z_p-basis element r_α.
pub fn r_span(gens: &[GroupRingElem]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for x in gens {
        for a in 0..x.ring.rank() {
            out.push(x.scale(&x.ring.basis(a, x.prec)).c);
        }
    }
    out
}

pub fn r_span_classes(gens: &[ClassVector]) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for v in gens {
        for a in 0..v.ring.rank() {
            out.push(v.scale(&v.ring.basis(a, v.prec)).c);
        }
    }
    out
}

/// R-module generators of I, 𝒜, (1−c)R[G] or I² inside R[G].
pub fn ideal_generators(ring: &Ring, group: &Group, kind: IdealKind, n: u32) -> Vec<GroupRingElem> {
    let e = |g: usize| GroupRingElem::group_elem(ring, group, g, n);
    let one = e(0);
    let ord = group.order();
    match kind {
        IdealKind::I | IdealKind::PhiI => (1..ord).map(|g| e(g).sub(&one)).collect(),
        IdealKind::A | IdealKind::PhiA => {
            let mut comms: Vec<usize> = Vec::new();
            for h in 0..ord {
                for k in 0..ord {
                    let c = group.commutator(h, k);
                    if c != 0 && !comms.contains(&c) {
                        comms.push(c);
                    }
                }
            }
            let mut out = Vec::new();
            for g in 0..ord {
                for &c in &comms {
                    out.push(e(g).mul(&e(c).sub(&one)));
                }
            }
            out
        }
        IdealKind::OneMinusC(c) => {
            let omc = one.sub(&e(c));
            (0..ord).map(|g| omc.mul(&e(g))).collect()
        }
        IdealKind::ISquared => {
            let mut out = Vec::new();
            for g in 1..ord {
                for h in 1..ord {
                    out.push(e(g).sub(&one).mul(&e(h).sub(&one)));
                }
            }
            out
        }
    }
}

/// Canonical lattice mod p^n for one of the standard ideals (or its φ-image).
pub fn ideal_lattice(ring: &Ring, group: &Group, kind: IdealKind, n: u32) -> Lattice {
    let gens = ideal_generators(ring, group, kind, n);
    match kind {
        IdealKind::PhiI | IdealKind::PhiA => {
            let dim = ring.rank() * group.num_classes();
            let phis: Vec<ClassVector> = gens.iter().map(|x| x.phi()).collect();
            Lattice::from_generators(dim, ring.p(), n, r_span_classes(&phis))
        }
        _ => Lattice::from_generators(ring.rank() * group.order(), ring.p(), n, r_span(&gens)),
    }
}

/// Lattice of an R-submodule spanned by arbitrary class vectors.
pub fn class_lattice(ring: &Ring, group: &Group, gens: &[ClassVector], n: u32) -> Lattice {
    Lattice::from_generators(ring.rank() * group.num_classes(), ring.p(), n, r_span_classes(gens))
}

pub fn elem_lattice(ring: &Ring, group: &Group, gens: &[GroupRingElem], n: u32) -> Lattice {
    Lattice::from_generators(ring.rank() * group.order(), ring.p(), n, r_span(gens))
}

/// Kernel of R[G] → R[G/N] for a normal subgroup: spanned by g(k − 1), k ∈ N.
pub fn kernel_generators(ring: &Ring, group: &Group, normal: Subset, n: u32) -> Vec<GroupRingElem> {
    let e = |g: usize| GroupRingElem::group_elem(ring, group, g, n);
    let one = e(0);
    let mut out = Vec::new();
    for g in 0..group.order() {
        for k in crate::pgroup::members(normal) {
            if k != 0 {
                out.push(e(g).mul(&e(k).sub(&one)));
            }
        }
    }
    out
}

// ------------------------------------------------------- matrices over R[G]

pub type Matrix = Vec<Vec<GroupRingElem>>;

/// Determinant of a square matrix over the commutative ring R.
pub fn det_r(m: &[Vec<RingElem>]) -> RingElem {
    let k = m.len();
    if k == 1 {
        return m[0][0].clone();
    }
    let mut acc = m[0][0].ring().zero(m[0][0].prec());
    for j in 0..k {
        let minor: Vec<Vec<RingElem>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
        let t = m[0][j].mul(&det_r(&minor));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let k = a.len();
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut s = a[i][0].mul(&b[0][j]);
                    for t in 1..k {
                        s = s.add(&a[i][t].mul(&b[t][j]));
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Invert a matrix over R (cofactor formula; k ≤ 4 in practice).
fn inverse_r(m: &[Vec<RingElem>]) -> Result<Vec<Vec<RingElem>>> {
    let k = m.len();
    let d = det_r(m);
    let dinv = d.invert().map_err(|_| Error::NotInvertible)?;
    if k == 1 {
        return Ok(vec![vec![dinv]]);
    }
    let mut out = vec![vec![dinv.clone(); k]; k];
    for i in 0..k {
        for j in 0..k {
            let minor: Vec<Vec<RingElem>> = (0..k)
                .filter(|&r| r != i)
                .map(|r| (0..k).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                .collect();
            let cof = det_r(&minor);
            let cof = if (i + j) % 2 == 0 { cof } else { cof.neg() };
            out[j][i] = cof.mul(&dinv);
        }
    }
    Ok(out)
}

/// A single unit u with Det(u) = Det(M) on every character.
///
/// Twist by the augmentation: y = M·aug(M)^{-1} is ≡ 1 mod I, so its
/// diagonal stays in 1 + I under elimination by elementary row operations
/// (which have trivial determinant).  Then u = det_R(aug M)·Π d_i.
pub fn reduce_matrix_to_unit(m: &Matrix) -> Result<GroupRingElem> {
    let k = m.len();
    let group = m[0][0].group().clone();
    let aug: Vec<Vec<RingElem>> = m.iter().map(|row| row.iter().map(|x| x.augment()).collect()).collect();
    let aug_inv = inverse_r(&aug)?;
    let t: Matrix = aug_inv.iter().map(|row| row.iter().map(|r| GroupRingElem::scalar(r, &group)).collect()).collect();
    let mut y = mat_mul(m, &t);
    for j in 0..k {
        let piv_inv = y[j][j].invert()?;
        for i in 0..k {
            if i == j || y[i][j].is_zero() {
                continue;
            }
            let f = y[i][j].mul(&piv_inv);
            let row_j = y[j].clone();
            for (c, x) in y[i].iter_mut().enumerate() {
                *x = x.sub(&f.mul(&row_j[c]));
            }
        }
    }
    let mut u = GroupRingElem::scalar(&det_r(&aug), &group);
    for (j, row) in y.iter().enumerate() {
        u = u.mul(&row[j]);
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{RingKind, RingSpec};
    use crate::pgroup::build_group;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(p: u64, g: &str, r: &str, n: u32) -> (Ring, Group) {
        (Ring::new(&RingSpec::new(p, RingKind::parse(r).unwrap(), n)).unwrap(), build_group(g, p).unwrap())
    }

    #[test]
    fn small_products() {
        let (r, g) = setup(2, "C2", "Zp", 6);
        let one = GroupRingElem::one(&r, &g, 6);
        let c = GroupRingElem::group_elem(&r, &g, 1, 6);
        assert!(one.sub(&c).mul(&one.add(&c)).is_zero());
        let sq = one.sub(&c).mul(&one.sub(&c));
        assert_eq!(sq, one.sub(&c).scale_int(2));
        let (r, d8) = setup(2, "D8", "Zp", 6);
        let rr = GroupRingElem::group_elem(&r, &d8, d8.elem("r").unwrap(), 6);
        let s = GroupRingElem::group_elem(&r, &d8, d8.elem("s").unwrap(), 6);
        assert_eq!(rr.mul(&s), GroupRingElem::group_elem(&r, &d8, d8.elem("r*s").unwrap(), 6));
    }

    #[test]
    fn inversion_examples() {
        let (r, g) = setup(2, "C2", "Zp", 4);
        let x = GroupRingElem::from_coeffs(&r, &g, vec![1, 14], 4);
        assert_eq!(x.invert().unwrap(), GroupRingElem::from_coeffs(&r, &g, vec![5, 10], 4));
        let c = GroupRingElem::group_elem(&r, &g, 1, 4);
        assert_eq!(c.invert().unwrap(), c);
        let omc = GroupRingElem::one(&r, &g, 4).sub(&c);
        assert_eq!(omc.invert(), Err(Error::NonUnit));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (r, q) = setup(2, "Q16", "unram:2", 8);
        for _ in 0..10 {
            let x = GroupRingElem::random(&r, &q, &mut rng, 8);
            if x.is_unit() {
                let y = x.invert().unwrap();
                assert_eq!(x.mul(&y), GroupRingElem::one(&r, &q, 8));
                assert_eq!(y.mul(&x), GroupRingElem::one(&r, &q, 8));
            }
        }
    }

    #[test]
    fn maps_behave() {
        let (r, d8) = setup(2, "D8", "Zp", 6);
        let e = |w: &str| GroupRingElem::group_elem(&r, &d8, d8.elem(w).unwrap(), 6);
        let (_, ab) = d8.abelianization();
        assert!(!e("r").sub(&e("s*r")).quotient_map(&ab).unwrap().is_zero());
        for a in 0..8 {
            for b in 0..8 {
                let c = GroupRingElem::group_elem(&r, &d8, d8.commutator(a, b), 6);
                assert!(c.sub(&e("1")).quotient_map(&ab).unwrap().is_zero());
                assert!(c.sub(&e("1")).augment().is_zero());
                // φ(δ − γδγ⁻¹) = 0
                let x = GroupRingElem::group_elem(&r, &d8, a, 6);
                assert!(x.sub(&x.conjugate_by(b)).phi().is_zero());
            }
        }
        let phi = e("r^3").phi();
        assert_eq!(phi.coeff(d8.class_of(d8.elem("r").unwrap())), r.one(6));
        let (r4, c4) = setup(2, "C4", "Zp", 6);
        let c = GroupRingElem::group_elem(&r4, &c4, 1, 6);
        assert_eq!(c.psi(), GroupRingElem::group_elem(&r4, &c4, 2, 6));
        let (r3, c3) = setup(3, "C3", "powser:4", 6);
        let t = GroupRingElem::monomial(&r3.generator('T', 6).unwrap(), &c3, 1);
        assert_eq!(t.psi(), GroupRingElem::scalar(&r3.generator('T', 6).unwrap().pow(3), &c3));
    }

    #[test]
    fn phi_psi_commute_and_psi_kills_one_minus_c() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, g, rs) in [(2, "D8", "unram:2"), (2, "Q8", "powser:4"), (3, "H27", "Zp")] {
            let (r, gr) = setup(p, g, rs, 6);
            let c = gr.central_commutator_order_p().unwrap();
            let omc = GroupRingElem::one(&r, &gr, 6).sub(&GroupRingElem::group_elem(&r, &gr, c, 6));
            for _ in 0..20 {
                let x = GroupRingElem::random(&r, &gr, &mut rng, 6);
                assert_eq!(x.psi().phi(), x.phi().psi_bar());
                assert!(omc.mul(&x).psi().is_zero());
                let y = GroupRingElem::random(&r, &gr, &mut rng, 6);
                assert_eq!(x.mul(&y).augment(), x.augment().mul(&y.augment()));
            }
        }
    }

    #[test]
    fn ideal_lattice_ranks() {
        let (r, c2) = setup(2, "C2", "Zp", 4);
        let i = ideal_lattice(&r, &c2, IdealKind::I, 4);
        let omc = GroupRingElem::one(&r, &c2, 4).sub(&GroupRingElem::group_elem(&r, &c2, 1, 4));
        assert_eq!(i, elem_lattice(&r, &c2, &[omc], 4));
        let (r, q8) = setup(2, "Q8", "Zp", 5);
        let a = ideal_lattice(&r, &q8, IdealKind::A, 5);
        assert_eq!(a.log_size(), 4 * 5);
        // 𝒜 equals the kernel to R[G^ab], built from [G,G]
        let ker = elem_lattice(&r, &q8, &kernel_generators(&r, &q8, q8.commutator_subgroup(), 5), 5);
        assert_eq!(a, ker);
        // φ(I) is the sum-zero sublattice
        let (r, d8) = setup(2, "D8", "unram:2", 4);
        let pi = ideal_lattice(&r, &d8, IdealKind::PhiI, 4);
        let nc = d8.num_classes();
        let mut sumzero = Vec::new();
        for cl in 1..nc {
            for a in 0..2 {
                let mut v = vec![0u64; 2 * nc];
                v[cl * 2 + a] = 1;
                v[a] = 15;
                sumzero.push(v);
            }
        }
        assert_eq!(pi, Lattice::from_generators(2 * nc, 2, 4, sumzero));
    }

    #[test]
    fn central_power_congruence() {
        // (1−c)^p + p(1−c) ∈ p(1−c)²R[G]
        for (p, g) in [(2, "C2"), (2, "D8"), (2, "Q8"), (3, "C3"), (3, "H27"), (2, "C4")] {
            let (r, gr) = setup(p, g, "Zp", 6);
            for c in crate::pgroup::members(gr.center()) {
                if c == 0 || gr.elem_order(c) != p {
                    continue;
                }
                let omc = GroupRingElem::one(&r, &gr, 6).sub(&GroupRingElem::group_elem(&r, &gr, c, 6));
                let lhs = omc.pow(p).add(&omc.scale_int(p as i64));
                let sq = omc.mul(&omc).scale_int(p as i64);
                let gens: Vec<_> = (0..gr.order()).map(|h| sq.mul(&GroupRingElem::group_elem(&r, &gr, h, 6))).collect();
                let lat = elem_lattice(&r, &gr, &gens, 6);
                assert!(lat.contains(lhs.coeffs()), "{g}");
            }
        }
    }

    #[test]
    fn matrix_reduction_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (r, d8) = setup(2, "D8", "Zp", 5);
        let u1 = GroupRingElem::random(&r, &d8, &mut rng, 5).add(&GroupRingElem::one(&r, &d8, 5).scale_int(1));
        let u1 = if u1.is_unit() { u1 } else { u1.add(&GroupRingElem::one(&r, &d8, 5)) };
        let u2 = GroupRingElem::group_elem(&r, &d8, 3, 5);
        let z = GroupRingElem::zero(&r, &d8, 5);
        let m = vec![vec![u1.clone(), z.clone()], vec![z.clone(), u2.clone()]];
        let u = reduce_matrix_to_unit(&m).unwrap();
        // diagonal input is already reduced up to the scalar twist, which cancels
        assert_eq!(u.augment(), u1.mul(&u2).augment());
        let sing = vec![vec![z.clone(), z.clone()], vec![z.clone(), u2]];
        assert_eq!(reduce_matrix_to_unit(&sing), Err(Error::NotInvertible));
    }

    #[test]
    fn display() {
        let (r, d8) = setup(2, "D8", "Zp", 4);
        let x = GroupRingElem::one(&r, &d8, 4).sub(&GroupRingElem::group_elem(&r, &d8, d8.elem("r*s").unwrap(), 4).scale_int(2));
        assert_eq!(x.to_string(), "1 + 14*r*s");
        assert_eq!(x.format_with(true), "1 + 14*r*s @2^4");
    }
}
