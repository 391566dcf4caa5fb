//! Unramified cyclic extensions S = R ⊗ W(F_{p^f}) with Δ = ⟨σ⟩ acting on
//! coefficients of S[G]: trace, conjugate norm, preimages under the norm and
//! descent of Δ-invariant determinants to R[G].
//!
//! F_S is F_R ⊗ frob, which commutes with σ, so L_S commutes with Δ on all
//! of 1 + I(S[G]); both solvers lean on that.

use crate::characters::Determinants;
use crate::coeffring::{Ring, RingElem};
use crate::error::{Error, Result};
use crate::groupring::{ClassVector, GroupRingElem, Lattice};
use crate::padiclog::{group_log, guard, AbelianKernelSolver};
use crate::pgroup::Group;

pub struct ExtensionCtx {
    base: Ring,
    ext: Ring,
    f: u32,
    /// τ ∈ S with Tr(τ) = 1
    tau: RingElem,
}

impl ExtensionCtx {
    pub fn new(base: &Ring, f: u32) -> Result<ExtensionCtx> {
        if f == 0 {
            return Err(Error::InvalidRing("extension degree must be positive".into()));
        }
        let ext = base.unramified_extension(f)?;
        let mut ctx = ExtensionCtx { base: base.clone(), ext: ext.clone(), f, tau: ext.one(ext.cap()) };
        let cap = ext.cap();
        // some basis element has unit trace because Tr is onto and R is local
        let tau = (0..ext.rank())
            .map(|a| ext.basis(a, cap))
            .find_map(|b| ctx.trace(&b).invert().ok().map(|t| b.mul(&t.embed_into(&ext))))
            .ok_or_else(|| Error::InvalidRing("trace is not surjective".into()))?;
        ctx.tau = tau;
        Ok(ctx)
    }

    pub fn base(&self) -> &Ring {
        &self.base
    }
    pub fn ext(&self) -> &Ring {
        &self.ext
    }
    pub fn degree(&self) -> u32 {
        self.f
    }
    pub fn trace_element(&self) -> &RingElem {
        &self.tau
    }

    fn sigma_ring(&self, k: u32, s: &RingElem) -> RingElem {
        if self.f == 1 {
            return s.clone();
        }
        s.galois(k % self.f).expect("extension carries σ")
    }

    /// σ^k acting on coefficients.
    pub fn galois_act(&self, k: u32, x: &GroupRingElem) -> GroupRingElem {
        if self.f == 1 {
            return x.clone();
        }
        x.galois(k % self.f).expect("extension carries σ")
    }

    pub fn trace(&self, s: &RingElem) -> RingElem {
        let mut acc = s.ring().zero(s.prec());
        for k in 0..self.f {
            acc = acc.add(&self.sigma_ring(k, s));
        }
        acc.project_onto(&self.base).expect("traces are Δ-invariant")
    }

    pub fn trace_classes(&self, v: &ClassVector) -> ClassVector {
        let mut acc = ClassVector::zero(v.ring(), v.group(), v.prec());
        for k in 0..self.f {
            acc = acc.add(&if self.f == 1 { v.clone() } else { v.galois(k).expect("σ") });
        }
        acc.project_onto(&self.base).expect("traces are Δ-invariant")
    }

    /// The R-span of Tr(S) is all of R, compared as Howell forms mod p^n.
    pub fn trace_surjective(&self, n: u32) -> bool {
        let (k, p) = (self.base.rank(), self.base.p());
        let gens = (0..self.ext.rank())
            .flat_map(|a| {
                let t = self.trace(&self.ext.basis(a, n));
                (0..k).map(move |b| t.mul(&self.base.basis(b, n)).coeffs().to_vec()).collect::<Vec<_>>()
            })
            .collect();
        Lattice::from_generators(k, p, n, gens) == Lattice::full(k, p, n)
    }

    /// S^Δ = R: the base basis is fixed, and σ − 1 has kernel of rank
    /// rank(R) modulo p.
    pub fn fixed_ring_is_base(&self) -> bool {
        let (rs, p) = (self.ext.rank(), self.ext.p());
        let fixed = (0..self.base.rank()).all(|a| {
            let b = self.base.basis(a, 1).embed_into(&self.ext);
            self.sigma_ring(1, &b) == b
        });
        let image: Vec<Vec<u64>> = (0..rs)
            .map(|a| {
                let b = self.ext.basis(a, 1);
                self.sigma_ring(1, &b).sub(&b).coeffs().to_vec()
            })
            .collect();
        fixed && rs - Lattice::from_generators(rs, p, 1, image).log_size() as usize == self.base.rank()
    }

    /// Π_{k<f} σ^k(x), in the order σ^0, σ^1, …
    pub fn norm(&self, x: &GroupRingElem) -> GroupRingElem {
        let mut acc = x.clone();
        for k in 1..self.f {
            acc = acc.mul(&self.galois_act(k, x));
        }
        acc
    }

    /// The ordered conjugate product, its descent to R[G] when its
    /// coefficients are Δ-invariant, and its determinants.
    pub fn conjugate_norm(&self, x: &GroupRingElem) -> Result<ConjugateNorm> {
        if !x.is_unit() {
            return Err(Error::NonUnit);
        }
        let product = self.norm(x);
        let descended = product.project_onto(&self.base);
        let dets = Determinants::new(&self.ext, x.group())?;
        let values = (0..dets.table().len()).map(|i| dets.det_value(&product, i)).collect();
        Ok(ConjugateNorm { product, descended, det_values: values })
    }

    /// Whether N_{S/R} maps the units of S onto those of R modulo p.  For
    /// an unramified extension this is the norm of finite fields, so the
    /// answer is always yes; it is checked by enumeration.
    pub fn norm_surjective_mod_p(&self) -> bool {
        let p = self.ext.p();
        let rs = self.ext.rank();
        let total = p.pow(rs as u32);
        let mut hit = std::collections::HashSet::new();
        for code in 0..total {
            let mut c = Vec::with_capacity(rs);
            let mut r = code;
            for _ in 0..rs {
                c.push(r % p);
                r /= p;
            }
            let s = self.ext.from_coeffs(c, 1);
            if !s.is_unit() {
                continue;
            }
            let mut acc = s.clone();
            for k in 1..self.f {
                acc = acc.mul(&self.sigma_ring(k, &s));
            }
            hit.insert(acc.project_onto(&self.base).expect("norms are invariant").coeffs().to_vec());
        }
        let rb = self.base.rank();
        let units = (0..p.pow(rb as u32))
            .filter(|&code| {
                let mut c = Vec::with_capacity(rb);
                let mut r = code;
                for _ in 0..rb {
                    c.push(r % p);
                    r /= p;
                }
                self.base.from_coeffs(c, 1).is_unit()
            })
            .count();
        hit.len() == units
    }
}

#[derive(Clone, Debug)]
pub struct ConjugateNorm {
    pub product: GroupRingElem,
    /// Present when every coefficient of the product lies in R (always the
    /// case for abelian G).
    pub descended: Option<GroupRingElem>,
    pub det_values: Vec<RingElem>,
}

fn abelianize(group: &Group) -> (Group, crate::pgroup::GroupHom, Vec<usize>) {
    let (ab, hom) = group.abelianization();
    let section = hom.section();
    (ab, hom, section)
}

/// y ∈ 1 + I(S[A]) with N(y) = x for abelian A and x ∈ 1 + I(R[A]), by
/// repeatedly multiplying by 1 + τ(x·N(y)^{−1} − 1).
fn abelian_norm_preimage(ctx: &ExtensionCtx, x: &GroupRingElem) -> Result<GroupRingElem> {
    let xs = x.embed_into(&ctx.ext);
    let one = GroupRingElem::one(&ctx.ext, x.group(), x.prec());
    let tau = ctx.tau.reduce(x.prec())?;
    let mut y = one.clone();
    let budget = x.prec() as usize * x.group().order();
    for _ in 0..budget {
        let z = xs.mul(&ctx.norm(&y).invert()?).sub(&one);
        if z.is_zero() {
            return Ok(y);
        }
        y = y.mul(&one.add(&z.scale(&tau)));
    }
    Err(Error::NoConvergence("abelian norm preimage"))
}

/// y ∈ 1 + I(S[G]) with Det(N(y)) = Det(x), checked on every irreducible
/// character modulo p^n.
pub fn solve_norm_preimage(ctx: &ExtensionCtx, x: &GroupRingElem, n: u32) -> Result<GroupRingElem> {
    let group = x.group().clone();
    let inner = n + 2;
    let w = inner + guard(&group, inner);
    let x = if x.prec() < w { x.lift_prec(w) } else { x.reduce(w)? };
    let aug = x.augment();
    if !aug.eq_at(&ctx.base.one(w), w) {
        return Err(Error::NotOneUnit);
    }
    // abelian part, lifted back along a section
    let (_, hom, section) = abelianize(&group);
    let y1 = abelian_norm_preimage(ctx, &x.quotient_map(&hom)?)?.lift_along(&hom, &section);
    // what is left lies in Det(1 + 𝒜); on L-values the norm is the trace
    let ly1 = group_log(&y1, inner)?;
    let t = group_log(&x, inner)?.sub(&ctx.trace_classes(&ly1));
    let y = if t.is_zero() {
        y1
    } else {
        let mut solver = AbelianKernelSolver::new(&ctx.ext, &group, inner)?;
        let ts = t.embed_into(&ctx.ext).scale(&ctx.tau.reduce(inner)?);
        let one = GroupRingElem::one(&ctx.ext, &group, solver.work());
        y1.mul(&one.add(&solver.solve(&ts)?))
    };
    let dets = Determinants::new(&ctx.ext, &group)?;
    let (lhs, rhs) = (ctx.norm(&y).reduce(n)?, x.embed_into(&ctx.ext).reduce(n)?);
    if !dets.det_equal(&lhs, &rhs)? {
        return Err(Error::NoConvergence("norm preimage forward check"));
    }
    Ok(y)
}

/// u ∈ R[G]^× with Det(u) = Det(x) for x ∈ S[G]^× whose determinant is
/// Δ-invariant.
pub fn solve_fixed_point(ctx: &ExtensionCtx, x: &GroupRingElem, n: u32) -> Result<GroupRingElem> {
    let group = x.group().clone();
    let inner = n + 2;
    let w = inner + guard(&group, inner);
    let x = if x.prec() < w { x.lift_prec(w) } else { x.reduce(w)? };
    let dets = Determinants::new(&ctx.ext, &group)?;
    if !dets.det_equal(&x, &ctx.galois_act(1, &x))? {
        return Err(Error::NotInvariant);
    }
    // augmentation is the trivial character's determinant, so it lies in R
    let a = x.augment().project_onto(&ctx.base).ok_or(Error::NotInvariant)?;
    let x1 = x.scale(&a.invert()?.embed_into(&ctx.ext));
    // over G^ab the determinant is the element itself
    let (_, hom, section) = abelianize(&group);
    let ab = x1.quotient_map(&hom)?.project_onto(&ctx.base).ok_or(Error::NotInvariant)?;
    let u1 = ab.lift_along(&hom, &section);
    let t = group_log(&x1, inner)?.sub(&group_log(&u1.embed_into(&ctx.ext), inner)?);
    let t = t.project_onto(&ctx.base).ok_or(Error::NotInvariant)?;
    let mut solver = AbelianKernelSolver::new(&ctx.base, &group, inner)?;
    let one = GroupRingElem::one(&ctx.base, &group, solver.work());
    let u2 = one.add(&solver.solve(&t)?);
    let u = u1.mul(&u2).scale(&a);
    if !dets.det_equal(&u.embed_into(&ctx.ext).reduce(n)?, &x.reduce(n)?)? {
        return Err(Error::NoConvergence("fixed point forward check"));
    }
    Ok(u)
}
