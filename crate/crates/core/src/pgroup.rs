//! Finite p-groups (order at most 128) as verified multiplication tables.
//!
//! Elements are numbered by breadth-first search from the identity, right
//! multiplying by the generators in declaration order, so numbering and
//! printed words are reproducible.  Subsets are `u128` bitmasks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::zmod;

pub const ORDER_CAP: usize = 128;

pub type Subset = u128;

#[inline]
pub fn has(s: Subset, i: usize) -> bool {
    s >> i & 1 == 1
}

pub fn members(s: Subset) -> Vec<usize> {
    (0..128).filter(|&i| has(s, i)).collect()
}

pub struct FiniteGroup {
    name: String,
    p: u64,
    n: usize,
    mul: Vec<u8>,
    inv: Vec<u8>,
    gen_names: Vec<String>,
    gens: Vec<usize>,
    words: Vec<Vec<(usize, u32)>>,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    /// Least N with I(F_p[G])^N = 0, filled in on first use.
    pub(crate) nilpotency: OnceLock<u32>,
    pub(crate) char_table: OnceLock<Result<Arc<crate::characters::CharacterTable>>>,
}

pub type Group = Arc<FiniteGroup>;

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.n)
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, o: &FiniteGroup) -> bool {
        self.n == o.n && self.mul == o.mul
    }
}

/// Close the generators under right multiplication and verify the table.
pub fn build_from<T, F>(name: &str, p: u64, identity: T, gens: Vec<(String, T)>, op: F) -> Result<FiniteGroup>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut elems = vec![identity.clone()];
    let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (gi, (_, g)) in gens.iter().enumerate() {
            let x = op(&elems[i], g);
            if !index.contains_key(&x) {
                if elems.len() == ORDER_CAP {
                    return Err(Error::OrderCap(ORDER_CAP + 1));
                }
                index.insert(x.clone(), elems.len());
                let mut w = words[i].clone();
                w.push(gi);
                words.push(w);
                queue.push_back(elems.len());
                elems.push(x);
            }
        }
    }
    let n = elems.len();
    if zmod::log_exact(n as u64, p).is_none() {
        return Err(Error::NonPPower { order: n, p });
    }
    let mut mul = vec![0u8; n * n];
    for a in 0..n {
        for b in 0..n {
            mul[a * n + b] = index[&op(&elems[a], &elems[b])] as u8;
        }
    }
    let gen_idx = gens.iter().map(|(_, g)| index[g]).collect();
    let names = gens.into_iter().map(|(s, _)| s).collect();
    FiniteGroup::from_table(name, p, n, mul, names, gen_idx, words)
}

fn compress(word: &[usize]) -> Vec<(usize, u32)> {
    let mut out: Vec<(usize, u32)> = Vec::new();
    for &g in word {
        match out.last_mut() {
            Some((h, e)) if *h == g => *e += 1,
            _ => out.push((g, 1)),
        }
    }
    out
}

impl FiniteGroup {
    fn from_table(
        name: &str,
        p: u64,
        n: usize,
        mul: Vec<u8>,
        gen_names: Vec<String>,
        gens: Vec<usize>,
        words: Vec<Vec<usize>>,
    ) -> Result<FiniteGroup> {
        let bad = |m: &str| Error::InvalidGroup(format!("{name}: {m}"));
        for a in 0..n {
            if mul[a] as usize != a || mul[a * n] as usize != a {
                return Err(bad("identity axiom fails"));
            }
        }
        let mut inv = vec![0u8; n];
        for a in 0..n {
            let b = (0..n).find(|&b| mul[a * n + b] == 0).ok_or_else(|| bad("missing inverse"))?;
            if mul[b * n + a] != 0 {
                return Err(bad("inverse is one-sided"));
            }
            inv[a] = b as u8;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul[a * n + b] as usize;
                for c in 0..n {
                    let bc = mul[b * n + c] as usize;
                    if mul[ab * n + c] != mul[a * n + bc] {
                        return Err(bad("associativity fails"));
                    }
                }
            }
        }
        let mut g = FiniteGroup {
            name: name.to_string(),
            p,
            n,
            mul,
            inv,
            gen_names,
            gens,
            words: words.iter().map(|w| compress(w)).collect(),
            classes: vec![],
            class_of: vec![0; n],
            nilpotency: OnceLock::new(),
            char_table: OnceLock::new(),
        };
        g.compute_classes();
        Ok(g)
    }

    fn compute_classes(&mut self) {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if seen[g] {
                continue;
            }
            let mut cls: Vec<usize> = (0..n).map(|h| self.conj(h, g)).collect();
            cls.sort_unstable();
            cls.dedup();
            for &x in &cls {
                seen[x] = true;
                self.class_of[x] = classes.len();
            }
            classes.push(cls);
        }
        self.classes = classes;
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn order(&self) -> usize {
        self.n
    }
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }
    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }
    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut acc = 0;
        for _ in 0..k {
            acc = self.mul(acc, a);
        }
        acc
    }
    /// h g h^{-1}
    #[inline]
    pub fn conj(&self, h: usize, g: usize) -> usize {
        self.mul(self.mul(h, g), self.inv(h))
    }
    /// [a, b] = a b a^{-1} b^{-1}
    #[inline]
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }
    pub fn elem_order(&self, a: usize) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }
    pub fn exponent(&self) -> u64 {
        (0..self.n).map(|a| self.elem_order(a)).max().unwrap_or(1)
    }
    pub fn generators(&self) -> &[usize] {
        &self.gens
    }
    pub fn generator_names(&self) -> &[String] {
        &self.gen_names
    }
    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }
    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }
    /// Index of the p-th power map on classes.
    pub fn class_power(&self, k: usize) -> usize {
        self.class_of(self.pow(self.classes[k][0], self.p))
    }

    pub fn word(&self, g: usize) -> String {
        if g == 0 {
            return "1".into();
        }
        self.words[g]
            .iter()
            .map(|&(gi, e)| if e == 1 { self.gen_names[gi].clone() } else { format!("{}^{}", self.gen_names[gi], e) })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Evaluate a product of generator powers; negative exponents invert.
    pub fn eval_word(&self, word: &[(usize, i64)]) -> usize {
        let mut acc = 0;
        for &(gi, e) in word {
            let g = if e < 0 { self.inv(self.gens[gi]) } else { self.gens[gi] };
            acc = self.mul(acc, self.pow(g, e.unsigned_abs()));
        }
        acc
    }

    /// Element named by a word such as `r^2*s` (or `1`).
    pub fn elem(&self, word: &str) -> Option<usize> {
        let w = word.trim();
        if w == "1" {
            return Some(0);
        }
        let mut parts = Vec::new();
        for f in w.split('*') {
            let (name, e) = match f.split_once('^') {
                Some((a, b)) => (a.trim(), b.trim().parse::<i64>().ok()?),
                None => (f.trim(), 1),
            };
            let gi = self.gen_names.iter().position(|s| s == name)?;
            parts.push((gi, e));
        }
        Some(self.eval_word(&parts))
    }

    pub fn center(&self) -> Subset {
        let mut s = 0;
        for a in 0..self.n {
            if (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)) {
                s |= 1 << a;
            }
        }
        s
    }

    /// Subgroup generated by the given elements.
    pub fn closure(&self, gens: &[usize]) -> Subset {
        let mut s: Subset = 1;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !has(s, y) {
                    s |= 1 << y;
                    queue.push_back(y);
                }
            }
        }
        s
    }

    pub fn commutator_subgroup(&self) -> Subset {
        self.commutator_with(u128::MAX >> (128 - self.n))
    }

    fn commutator_with(&self, h: Subset) -> Subset {
        let mut gens = Vec::new();
        let mut seen: Subset = 0;
        for a in 0..self.n {
            for b in members(h) {
                let c = self.commutator(a, b);
                if !has(seen, c) {
                    seen |= 1 << c;
                    gens.push(c);
                }
            }
        }
        self.closure(&gens)
    }

    /// γ_1 = G, γ_{i+1} = [G, γ_i], down to the trivial group.
    pub fn lower_central_series(&self) -> Vec<Subset> {
        let mut series = vec![u128::MAX >> (128 - self.n)];
        loop {
            let next = self.commutator_with(*series.last().unwrap());
            if next == *series.last().unwrap() {
                break; // cannot happen for p-groups unless trivial
            }
            series.push(next);
            if next == 1 {
                break;
            }
        }
        series
    }

    pub fn is_commutator(&self, c: usize) -> bool {
        (0..self.n).any(|a| (0..self.n).any(|b| self.commutator(a, b) == c))
    }

    /// A central commutator of order p: from the first pair (g, h), g ∈ G,
    /// h ∈ γ_{k-1}, with d = [g,h] ≠ 1 in the last nontrivial term γ_k,
    /// return [g, h^{p^{m-1}}] = d^{p^{m-1}} where d has order p^m.
    pub fn central_commutator_order_p(&self) -> Result<usize> {
        let lcs = self.lower_central_series();
        if lcs.len() < 3 {
            return Err(Error::AbelianInput);
        }
        let prev = lcs[lcs.len() - 3];
        for g in 0..self.n {
            for h in members(prev) {
                let d = self.commutator(g, h);
                if d != 0 {
                    let m = zmod::log_exact(self.elem_order(d), self.p).expect("p-group");
                    let hp = self.pow(h, zmod::pow_u64(self.p, m - 1));
                    return Ok(self.commutator(g, hp));
                }
            }
        }
        Err(Error::AbelianInput)
    }

    pub fn is_normal(&self, s: Subset) -> bool {
        members(s).iter().all(|&x| (0..self.n).all(|g| has(s, self.conj(g, x))))
    }

    /// G/N for a normal subset N, with the projection.
    pub fn quotient(self: &Arc<Self>, normal: Subset) -> (Group, GroupHom) {
        debug_assert!(self.is_normal(normal));
        let nm = members(normal);
        let rep: Vec<usize> = (0..self.n).map(|g| nm.iter().map(|&x| self.mul(g, x)).min().unwrap()).collect();
        let gens = self.gens.iter().zip(&self.gen_names).map(|(&g, s)| (s.clone(), rep[g])).collect();
        let name = format!("{}/N", self.name);
        let q = build_from(&name, self.p, 0usize, gens, |&a, &b| rep[self.mul(a, b)])
            .expect("quotients of verified p-groups are verified p-groups");
        let q = Arc::new(q);
        // map representatives to quotient indices by re-walking the words
        let images = (0..self.n)
            .map(|g| {
                let word = &self.words[g];
                let mut acc = 0;
                for &(gi, e) in word {
                    for _ in 0..e {
                        acc = q.mul(acc, q.gens[gi]);
                    }
                }
                acc
            })
            .collect();
        let hom = GroupHom { source: self.clone(), target: q.clone(), images };
        debug_assert!(hom.check());
        (q, hom)
    }

    pub fn central_quotient(self: &Arc<Self>, c: usize) -> Result<(Group, GroupHom)> {
        if !has(self.center(), c) {
            return Err(Error::NotCentral);
        }
        if self.elem_order(c) != self.p {
            return Err(Error::WrongOrder);
        }
        Ok(self.quotient(self.closure(&[c])))
    }

    pub fn abelianization(self: &Arc<Self>) -> (Group, GroupHom) {
        self.quotient(self.commutator_subgroup())
    }

    /// Basis of an abelian group: elements with their orders, largest first,
    /// such that every element is uniquely a product of their powers.
    pub fn abelian_basis(&self) -> Vec<(usize, u64)> {
        assert!(self.is_abelian());
        let mut basis: Vec<(usize, u64)> = Vec::new();
        let mut sub: Subset = 1;
        while sub.count_ones() as usize != self.n {
            // order of x modulo the current subgroup
            let ord_mod = |x: usize| {
                let mut k = 1u64;
                let mut y = x;
                while !has(sub, y) {
                    y = self.mul(y, x);
                    k += 1;
                }
                k
            };
            let (best, k) = (0..self.n).map(|x| (x, ord_mod(x))).max_by_key(|&(x, k)| (k, std::cmp::Reverse(x))).unwrap();
            // an element of the coset best·sub whose true order equals k
            let pick = members(sub)
                .into_iter()
                .map(|s| self.mul(best, s))
                .find(|&y| self.elem_order(y) == k)
                .expect("abelian p-groups split");
            basis.push((pick, k));
            let gens: Vec<usize> = basis.iter().map(|b| b.0).collect();
            sub = self.closure(&gens);
        }
        basis
    }

    /// Exponent vectors of every element with respect to `abelian_basis`.
    pub fn abelian_coordinates(&self, basis: &[(usize, u64)]) -> Vec<Vec<u64>> {
        let mut coords = vec![Vec::new(); self.n];
        let mut stack: Vec<(usize, Vec<u64>)> = vec![(0, vec![])];
        while let Some((x, v)) = stack.pop() {
            if v.len() == basis.len() {
                coords[x] = v;
                continue;
            }
            let (b, k) = basis[v.len()];
            let mut y = x;
            for e in 0..k {
                let mut w = v.clone();
                w.push(e);
                stack.push((y, w));
                y = self.mul(y, b);
            }
        }
        coords
    }

    /// Invariant factors of G^ab, largest first.
    pub fn abelian_invariants(self: &Arc<Self>) -> Vec<u64> {
        let (ab, _) = self.abelianization();
        ab.abelian_basis().into_iter().map(|b| b.1).collect()
    }

    /// All subgroups as bitmasks, sorted by order then mask.
    pub fn subgroups(&self) -> Vec<Subset> {
        let mut cyclic: Vec<(Subset, usize)> = Vec::new();
        let mut seen: HashSet<Subset> = HashSet::new();
        for g in 0..self.n {
            let s = self.closure(&[g]);
            if seen.insert(s) {
                cyclic.push((s, g));
            }
        }
        let mut all: Vec<(Subset, Vec<usize>)> = cyclic.iter().map(|&(s, g)| (s, vec![g])).collect();
        let mut i = 0;
        while i < all.len() {
            let (s, gens) = all[i].clone();
            for &(cs, g) in &cyclic {
                if cs & !s == 0 {
                    continue;
                }
                let mut ng = gens.clone();
                ng.push(g);
                let t = self.closure(&ng);
                if seen.insert(t) {
                    all.push((t, ng));
                }
            }
            i += 1;
        }
        let mut out: Vec<Subset> = all.into_iter().map(|x| x.0).collect();
        out.sort_by_key(|&s| (s.count_ones(), s));
        out
    }

    /// Left coset representatives of H, smallest index in each coset.
    pub fn left_transversal(&self, h: Subset) -> Vec<usize> {
        let hm = members(h);
        let mut covered: Subset = 0;
        let mut reps = Vec::new();
        for g in 0..self.n {
            if !has(covered, g) {
                reps.push(g);
                for &x in &hm {
                    covered |= 1 << self.mul(g, x);
                }
            }
        }
        reps
    }

    /// The transfer G → H^ab for a subgroup of index p, computed from the
    /// given left transversal.  H^ab elements are named by the smallest
    /// element of their [H,H]-coset.
    pub fn transfer_with(&self, h: Subset, transversal: &[usize]) -> Result<Vec<usize>> {
        if self.n != h.count_ones() as usize * self.p as usize {
            return Err(Error::WrongIndex);
        }
        let hm = members(h);
        // [H, H]
        let mut cgens = Vec::new();
        for &a in &hm {
            for &b in &hm {
                cgens.push(self.commutator(a, b));
            }
        }
        let hh = members(self.closure(&cgens));
        let rep = |x: usize| hh.iter().map(|&k| self.mul(x, k)).min().unwrap();
        let coset_of = |x: usize| -> (usize, usize) {
            // x = t_j · h_j
            for (j, &t) in transversal.iter().enumerate() {
                let hj = self.mul(self.inv(t), x);
                if has(h, hj) {
                    return (j, hj);
                }
            }
            unreachable!("transversal covers G")
        };
        Ok((0..self.n)
            .map(|g| {
                let mut acc = 0;
                for &t in transversal {
                    let (_, hi) = coset_of(self.mul(g, t));
                    acc = rep(self.mul(acc, hi));
                }
                acc
            })
            .collect())
    }

    pub fn transfer(&self, h: Subset) -> Result<Vec<usize>> {
        self.transfer_with(h, &self.left_transversal(h))
    }
}

#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: Group,
    pub target: Group,
    pub images: Vec<usize>,
}

impl GroupHom {
    pub fn apply(&self, g: usize) -> usize {
        self.images[g]
    }
    pub fn check(&self) -> bool {
        let n = self.source.order();
        self.images.len() == n
            && (0..n).all(|a| {
                (0..n).all(|b| self.images[self.source.mul(a, b)] == self.target.mul(self.images[a], self.images[b]))
            })
    }
    /// A section: for each target element, the smallest source preimage.
    pub fn section(&self) -> Vec<usize> {
        let mut s = vec![usize::MAX; self.target.order()];
        for g in (0..self.source.order()).rev() {
            s[self.images[g]] = g;
        }
        s
    }
}

// ---------------------------------------------------------------- builders

pub fn cyclic(n: u64, p: u64) -> Result<FiniteGroup> {
    abelian(&[n], p)
}

pub fn abelian(orders: &[u64], p: u64) -> Result<FiniteGroup> {
    check_order(orders.iter().product(), p)?;
    let names = if orders.len() == 1 { vec!["c".to_string()] } else { (0..orders.len()).map(|i| ((b'a' + i as u8) as char).to_string()).collect() };
    let gens = (0..orders.len())
        .map(|i| {
            let mut v = vec![0u64; orders.len()];
            v[i] = 1 % orders[i];
            (names[i].clone(), v)
        })
        .collect();
    let name = orders.iter().map(|o| format!("C{o}")).collect::<Vec<_>>().join("x");
    build_from(&name, p, vec![0u64; orders.len()], gens, |a, b| {
        a.iter().zip(b).zip(orders).map(|((x, y), o)| (x + y) % o).collect()
    })
}

/// Dihedral group of order n: r^{n/2} = s^2 = 1, s r s = r^{-1}.
pub fn dihedral(n: u64, p: u64) -> Result<FiniteGroup> {
    check_order(n, p)?;
    if n < 4 || zmod::log_exact(n, 2).is_none() {
        return Err(Error::InvalidGroup(format!("D{n}")));
    }
    let h = n / 2;
    semidirect(&format!("D{n}"), p, h, h - 1, None, ("r", "s"))
}

/// Generalized quaternion group of order n: i^{n/2} = 1, j^2 = i^{n/4}, j i j^{-1} = i^{-1}.
pub fn quaternion(n: u64, p: u64) -> Result<FiniteGroup> {
    check_order(n, p)?;
    if n < 8 || zmod::log_exact(n, 2).is_none() {
        return Err(Error::InvalidGroup(format!("Q{n}")));
    }
    let h = n / 2;
    semidirect(&format!("Q{n}"), p, h, h - 1, Some(h / 2), ("i", "j"))
}

/// Semidihedral group of order n: r^{n/2} = s^2 = 1, s r s = r^{n/4 - 1}.
pub fn semidihedral(n: u64, p: u64) -> Result<FiniteGroup> {
    check_order(n, p)?;
    if n < 16 || zmod::log_exact(n, 2).is_none() {
        return Err(Error::InvalidGroup(format!("SD{n}")));
    }
    let h = n / 2;
    semidirect(&format!("SD{n}"), p, h, n / 4 - 1, None, ("r", "s"))
}

/// Elements a^k x^s with x a x^{-1} = a^u and x^2 = a^{sq} (or 1).
fn semidirect(name: &str, p: u64, h: u64, u: u64, sq: Option<u64>, names: (&str, &str)) -> Result<FiniteGroup> {
    let op = move |a: &(u64, u64), b: &(u64, u64)| -> (u64, u64) {
        let (k, s) = *a;
        let (l, t) = *b;
        let l2 = if s == 1 { l * u % h } else { l };
        let mut e = (k + l2) % h;
        if s == 1 && t == 1 {
            e = (e + sq.unwrap_or(0)) % h;
        }
        (e, (s + t) % 2)
    };
    build_from(name, p, (0, 0), vec![(names.0.into(), (1, 0)), (names.1.into(), (0, 1))], op)
}

/// Extraspecial group of order q^3 and exponent q (q odd): unitriangular
/// 3×3 matrices over F_q, generated by x and y with z = [x, y] central.
pub fn heisenberg(q: u64, p: u64) -> Result<FiniteGroup> {
    check_order(q * q * q, p)?;
    if q == 2 || !zmod::is_prime(q) {
        return Err(Error::InvalidGroup(format!("H{}", q * q * q)));
    }
    let op = move |a: &(u64, u64, u64), b: &(u64, u64, u64)| ((a.0 + b.0) % q, (a.1 + b.1) % q, (a.2 + b.2 + a.0 * b.1) % q);
    build_from(&format!("H{}", q * q * q), p, (0, 0, 0), vec![("x".into(), (1, 0, 0)), ("y".into(), (0, 1, 0))], op)
}

fn check_order(n: u64, p: u64) -> Result<()> {
    if n as usize > ORDER_CAP {
        return Err(Error::OrderCap(n as usize));
    }
    if zmod::log_exact(n, p).is_none() {
        return Err(Error::NonPPower { order: n as usize, p });
    }
    Ok(())
}

/// Parse `C<n>`, `C<n>xC<m>…`, `D<n>`, `Q<n>`, `SD<n>`, `H<q^3>`.
pub fn build_group(spec: &str, p: u64) -> Result<Group> {
    let s = spec.trim().to_ascii_uppercase();
    let bad = || Error::InvalidGroup(spec.to_string());
    let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
    let g = if s.contains('X') {
        let orders = s
            .split('X')
            .map(|f| f.strip_prefix('C').ok_or_else(bad).and_then(num))
            .collect::<Result<Vec<_>>>()?;
        abelian(&orders, p)?
    } else if let Some(t) = s.strip_prefix("SD") {
        semidihedral(num(t)?, p)?
    } else if let Some(t) = s.strip_prefix('C') {
        cyclic(num(t)?, p)?
    } else if let Some(t) = s.strip_prefix('D') {
        dihedral(num(t)?, p)?
    } else if let Some(t) = s.strip_prefix('Q') {
        quaternion(num(t)?, p)?
    } else if let Some(t) = s.strip_prefix('H') {
        let n = num(t)?;
        let q = (1..=5).find(|q| q * q * q == n).ok_or_else(bad)?;
        heisenberg(q, p)?
    } else {
        return Err(bad());
    };
    Ok(Arc::new(g))
}
