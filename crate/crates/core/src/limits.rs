//! Weighted limits and colimits in finite enriched spaces.
//!
//! A diagram is a functor `G: D → B` given by a [`SpaceMap`]; weights are
//! presheaves on `D` for colimits and copresheaves on `D` for limits. A point
//! `b*` *is* the weighted (co)limit exactly when its hom row/column equals the
//! defining formula:
//!
//! ```text
//! colimit:  B(b*, b) = ⊓_d φ(d) ▷ B(G d, b)      for every b
//! limit:    B(b, b*) = ⊓_d B(b, G d) ◁ ψ(d)      for every b
//! ```
//!
//! Witness search is exhaustive and returns *all* qualifying points in point
//! order; they are pairwise isomorphic, and in a skeletal space there is at
//! most one. Tensors and powers are the one-point special cases. For target
//! spaces of presheaves or copresheaves the (co)limits exist outright and are
//! computed by the pointwise formulas ([`weighted_colimit_presheaf`] and
//! friends).
//!
//! The [`Battery`] enumerates a stock of (co)limit instances a space happens
//! to possess — empty and binary conical ones, and scalar tensors/powers —
//! which is what "finitely complete" means throughout this crate, and feeds
//! the preservation checks.

use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::quantale::QVal;
use crate::relation::{Copresheaf, Presheaf};
use crate::space::{FinSpace, SpaceMap};

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

fn check_weight_on_shape(space: &Arc<FinSpace>, g: &SpaceMap) -> Result<()> {
    if space != g.source() {
        return Err(Error::Shape("weight must live on the diagram shape".into()));
    }
    g.check_functor()
}

/// Right-hand side of the colimit equation at every target point.
fn colimit_profile(g: &SpaceMap, phi: &Presheaf) -> Result<Vec<QVal>> {
    let b = g.target();
    let q = b.quantale();
    let mut rhs = Vec::with_capacity(b.len());
    for bi in 0..b.len() {
        let mut acc = q.top();
        for d in 0..g.source().len() {
            acc = q.meet2(&acc, &q.rres(phi.at(d), b.hom(g.apply(d), bi))?)?;
        }
        rhs.push(acc);
    }
    Ok(rhs)
}

/// Right-hand side of the limit equation at every target point.
fn limit_profile(g: &SpaceMap, psi: &Copresheaf) -> Result<Vec<QVal>> {
    let b = g.target();
    let q = b.quantale();
    let mut rhs = Vec::with_capacity(b.len());
    for bi in 0..b.len() {
        let mut acc = q.top();
        for d in 0..g.source().len() {
            acc = q.meet2(&acc, &q.lres(b.hom(bi, g.apply(d)), psi.at(d))?)?;
        }
        rhs.push(acc);
    }
    Ok(rhs)
}

/// All points whose outgoing hom row realizes the colimit of `g` weighted by
/// `phi`; empty when the colimit does not exist in the target.
pub fn colimit_witnesses(g: &SpaceMap, phi: &Presheaf) -> Result<Vec<usize>> {
    check_weight_on_shape(phi.space(), g)?;
    let b = g.target();
    let rhs = colimit_profile(g, phi)?;
    let mut out = Vec::new();
    'cand: for c in 0..b.len() {
        for bi in 0..b.len() {
            if b.hom(c, bi) != &rhs[bi] {
                continue 'cand;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// All points whose incoming hom column realizes the limit of `g` weighted by
/// `psi`; empty when the limit does not exist in the target.
pub fn limit_witnesses(g: &SpaceMap, psi: &Copresheaf) -> Result<Vec<usize>> {
    check_weight_on_shape(psi.space(), g)?;
    let b = g.target();
    let rhs = limit_profile(g, psi)?;
    let mut out = Vec::new();
    'cand: for c in 0..b.len() {
        for bi in 0..b.len() {
            if b.hom(bi, c) != &rhs[bi] {
                continue 'cand;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Witnesses of the tensor `g ⋆ r`, the colimit of the one-point diagram at
/// `g` weighted by `r`: points `b*` with `B(b*,b) = r ▷ B(g,b)` for all `b`.
pub fn tensor_witnesses(b: &Arc<FinSpace>, g: usize, r: &QVal) -> Result<Vec<usize>> {
    let q = b.quantale();
    q.check(r)?;
    let mut out = Vec::new();
    'cand: for c in 0..b.len() {
        for bi in 0..b.len() {
            if b.hom(c, bi) != &q.rres(r, b.hom(g, bi))? {
                continue 'cand;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Witnesses of the power `g ↑ r`, the limit of the one-point diagram at `g`
/// weighted by `r`: points `b*` with `B(b,b*) = B(b,g) ◁ r` for all `b`.
pub fn power_witnesses(b: &Arc<FinSpace>, g: usize, r: &QVal) -> Result<Vec<usize>> {
    let q = b.quantale();
    q.check(r)?;
    let mut out = Vec::new();
    'cand: for c in 0..b.len() {
        for bi in 0..b.len() {
            if b.hom(bi, c) != &q.lres(b.hom(bi, g), r)? {
                continue 'cand;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// The scalar pairing `⊔_x ψ(x)·φ(x)`, the value of the `φ`-weighted colimit
/// of a copresheaf viewed as a diagram in the quantale itself.
pub fn pairing(psi: &Copresheaf, phi: &Presheaf) -> Result<QVal> {
    if psi.space() != phi.space() {
        return Err(Error::Shape("pairing needs a weight on the same space".into()));
    }
    let q = psi.space().quantale();
    let mut acc = q.bottom();
    for x in 0..psi.space().len() {
        acc = q.join2(&acc, &q.mul(psi.at(x), phi.at(x))?)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Pointwise (co)limits among presheaves and copresheaves
// ---------------------------------------------------------------------------

/// `x ↦ ⊔_d H_d(x)·w_d`: the weighted colimit of presheaves, which always
/// exists. Empty input yields the constant-bottom presheaf.
pub fn weighted_colimit_presheaf(
    x: &Arc<FinSpace>,
    parts: &[(QVal, Presheaf)],
) -> Result<Presheaf> {
    let q = x.quantale();
    let mut vals = vec![q.bottom(); x.len()];
    for (w, h) in parts {
        if h.space() != x {
            return Err(Error::Shape("colimit part on a different space".into()));
        }
        for (xi, slot) in vals.iter_mut().enumerate() {
            *slot = q.join2(slot, &q.mul(h.at(xi), w)?)?;
        }
    }
    Presheaf::new(x.clone(), vals)
}

/// `x ↦ ⊓_d H_d(x) ◁ w_d`: the weighted limit of presheaves. Empty input
/// yields the constant-top presheaf.
pub fn weighted_limit_presheaf(x: &Arc<FinSpace>, parts: &[(QVal, Presheaf)]) -> Result<Presheaf> {
    let q = x.quantale();
    let mut vals = vec![q.top(); x.len()];
    for (w, h) in parts {
        if h.space() != x {
            return Err(Error::Shape("limit part on a different space".into()));
        }
        for (xi, slot) in vals.iter_mut().enumerate() {
            *slot = q.meet2(slot, &q.lres(h.at(xi), w)?)?;
        }
    }
    Presheaf::new(x.clone(), vals)
}

/// `a ↦ ⊓_d w_d ▷ H_d(a)`: the weighted colimit of copresheaves.
pub fn weighted_colimit_copresheaf(
    a: &Arc<FinSpace>,
    parts: &[(QVal, Copresheaf)],
) -> Result<Copresheaf> {
    let q = a.quantale();
    let mut vals = vec![q.top(); a.len()];
    for (w, h) in parts {
        if h.space() != a {
            return Err(Error::Shape("colimit part on a different space".into()));
        }
        for (ai, slot) in vals.iter_mut().enumerate() {
            *slot = q.meet2(slot, &q.rres(w, h.at(ai))?)?;
        }
    }
    Copresheaf::new(a.clone(), vals)
}

/// `a ↦ ⊔_d w_d·H_d(a)`: the weighted limit of copresheaves.
pub fn weighted_limit_copresheaf(
    a: &Arc<FinSpace>,
    parts: &[(QVal, Copresheaf)],
) -> Result<Copresheaf> {
    let q = a.quantale();
    let mut vals = vec![q.bottom(); a.len()];
    for (w, h) in parts {
        if h.space() != a {
            return Err(Error::Shape("limit part on a different space".into()));
        }
        for (ai, slot) in vals.iter_mut().enumerate() {
            *slot = q.join2(slot, &q.mul(w, h.at(ai))?)?;
        }
    }
    Copresheaf::new(a.clone(), vals)
}

// ---------------------------------------------------------------------------
// Preservation
// ---------------------------------------------------------------------------

/// A limit a space happens to possess: diagram, weight, and the first witness.
#[derive(Clone, Debug)]
pub struct LimitInstance {
    pub diagram: SpaceMap,
    pub weight: Copresheaf,
    pub witness: usize,
    pub label: String,
}

/// A colimit a space happens to possess.
#[derive(Clone, Debug)]
pub struct ColimitInstance {
    pub diagram: SpaceMap,
    pub weight: Presheaf,
    pub witness: usize,
    pub label: String,
}

/// Which stock (co)limit shapes to enumerate when probing a space.
#[derive(Clone, Copy, Debug)]
pub struct Battery {
    /// Empty diagram: top element for limits, bottom for colimits.
    pub empty: bool,
    /// Binary conical diagrams over the discrete two-point shape.
    pub binary: bool,
    /// Powers (for limits) and tensors (for colimits) by every carrier value.
    pub scalars: bool,
}

impl Battery {
    /// Everything this crate treats as "finite": empty, binary, and scalar.
    pub fn finite() -> Battery {
        Battery { empty: true, binary: true, scalars: true }
    }

    /// Conical shapes only.
    pub fn conical() -> Battery {
        Battery { empty: true, binary: true, scalars: false }
    }

    /// All limits from the battery that exist in `b`, each with its first
    /// witness, in a fixed deterministic order.
    pub fn limit_instances(&self, b: &Arc<FinSpace>, budget: &Budget) -> Result<Vec<LimitInstance>> {
        let q = b.quantale().clone();
        let n = b.len() as u128;
        let mut out = Vec::new();
        if self.empty {
            let shape = FinSpace::discrete(q.clone(), Vec::<&str>::new());
            let g = SpaceMap::new(shape.clone(), b.clone(), vec![])?;
            let w = Copresheaf::new(shape, vec![])?;
            if let Some(&first) = limit_witnesses(&g, &w)?.first() {
                out.push(LimitInstance {
                    diagram: g,
                    weight: w,
                    witness: first,
                    label: "empty meet".into(),
                });
            }
        }
        if self.binary {
            Budget::guard("binary limit battery", n * n * n * n, budget.class_enum)?;
            let shape = FinSpace::discrete(q.clone(), vec!["d0", "d1"]);
            for i in 0..b.len() {
                for j in i + 1..b.len() {
                    let g = SpaceMap::new(shape.clone(), b.clone(), vec![i, j])?;
                    let w = Copresheaf::new(shape.clone(), vec![q.unit(), q.unit()])?;
                    if let Some(&first) = limit_witnesses(&g, &w)?.first() {
                        let label =
                            format!("meet({},{})", b.points()[i], b.points()[j]);
                        out.push(LimitInstance { diagram: g, weight: w, witness: first, label });
                    }
                }
            }
        }
        if self.scalars {
            Budget::guard(
                "scalar limit battery",
                q.carrier_len().saturating_mul(n * n),
                budget.class_enum,
            )?;
            let shape = FinSpace::one_point(q.clone());
            for g_pt in 0..b.len() {
                for r in q.carrier()? {
                    let g = SpaceMap::new(shape.clone(), b.clone(), vec![g_pt])?;
                    let w = Copresheaf::new(shape.clone(), vec![r.clone()])?;
                    if let Some(&first) = power_witnesses(b, g_pt, r)?.first() {
                        let label = format!("power({},{})", b.points()[g_pt], r);
                        out.push(LimitInstance { diagram: g, weight: w, witness: first, label });
                    }
                }
            }
        }
        Ok(out)
    }

    /// All colimits from the battery that exist in `b`.
    pub fn colimit_instances(
        &self,
        b: &Arc<FinSpace>,
        budget: &Budget,
    ) -> Result<Vec<ColimitInstance>> {
        let q = b.quantale().clone();
        let n = b.len() as u128;
        let mut out = Vec::new();
        if self.empty {
            let shape = FinSpace::discrete(q.clone(), Vec::<&str>::new());
            let g = SpaceMap::new(shape.clone(), b.clone(), vec![])?;
            let w = Presheaf::new(shape, vec![])?;
            if let Some(&first) = colimit_witnesses(&g, &w)?.first() {
                out.push(ColimitInstance {
                    diagram: g,
                    weight: w,
                    witness: first,
                    label: "empty join".into(),
                });
            }
        }
        if self.binary {
            Budget::guard("binary colimit battery", n * n * n * n, budget.class_enum)?;
            let shape = FinSpace::discrete(q.clone(), vec!["d0", "d1"]);
            for i in 0..b.len() {
                for j in i + 1..b.len() {
                    let g = SpaceMap::new(shape.clone(), b.clone(), vec![i, j])?;
                    let w = Presheaf::new(shape.clone(), vec![q.unit(), q.unit()])?;
                    if let Some(&first) = colimit_witnesses(&g, &w)?.first() {
                        let label =
                            format!("join({},{})", b.points()[i], b.points()[j]);
                        out.push(ColimitInstance { diagram: g, weight: w, witness: first, label });
                    }
                }
            }
        }
        if self.scalars {
            Budget::guard(
                "scalar colimit battery",
                q.carrier_len().saturating_mul(n * n),
                budget.class_enum,
            )?;
            let shape = FinSpace::one_point(q.clone());
            for g_pt in 0..b.len() {
                for r in q.carrier()? {
                    let g = SpaceMap::new(shape.clone(), b.clone(), vec![g_pt])?;
                    let w = Presheaf::new(shape.clone(), vec![r.clone()])?;
                    if let Some(&first) = tensor_witnesses(b, g_pt, r)?.first() {
                        let label = format!("tensor({},{})", b.points()[g_pt], r);
                        out.push(ColimitInstance { diagram: g, weight: w, witness: first, label });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Does `f` carry the witnessed limit to a limit witness of the pushed
/// diagram `f∘G` in its target?
pub fn map_preserves_limit(f: &SpaceMap, li: &LimitInstance) -> Result<bool> {
    if f.source() != li.diagram.target() {
        return Err(Error::Shape("instance lives in a different space".into()));
    }
    let pushed = li.diagram.then(f)?;
    let rhs = limit_profile(&pushed, &li.weight)?;
    let t = f.target();
    let c = f.apply(li.witness);
    for bi in 0..t.len() {
        if t.hom(bi, c) != &rhs[bi] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Does `f` carry the witnessed colimit to a colimit witness of `f∘G`?
pub fn map_preserves_colimit(f: &SpaceMap, ci: &ColimitInstance) -> Result<bool> {
    if f.source() != ci.diagram.target() {
        return Err(Error::Shape("instance lives in a different space".into()));
    }
    let pushed = ci.diagram.then(f)?;
    let rhs = colimit_profile(&pushed, &ci.weight)?;
    let t = f.target();
    let c = f.apply(ci.witness);
    for bi in 0..t.len() {
        if t.hom(c, bi) != &rhs[bi] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A covariant scalar-valued functor (a copresheaf) preserves a limit when
/// its value at the witness is the corresponding limit in the quantale:
/// `f(w) = ⊓_d f(G d) ◁ ψ(d)`.
pub fn copresheaf_sends_limit(f: &Copresheaf, li: &LimitInstance) -> Result<bool> {
    if f.space() != li.diagram.target() {
        return Err(Error::Shape("instance lives in a different space".into()));
    }
    let q = f.space().quantale();
    let mut acc = q.top();
    for d in 0..li.diagram.source().len() {
        acc = q.meet2(&acc, &q.lres(f.at(li.diagram.apply(d)), li.weight.at(d))?)?;
    }
    Ok(f.at(li.witness) == &acc)
}

/// A contravariant scalar-valued functor (a presheaf) turns a colimit into a
/// limit: `i(w) = ⊓_d φ(d) ▷ i(G d)`.
pub fn presheaf_sends_colimit(i: &Presheaf, ci: &ColimitInstance) -> Result<bool> {
    if i.space() != ci.diagram.target() {
        return Err(Error::Shape("instance lives in a different space".into()));
    }
    let q = i.space().quantale();
    let mut acc = q.top();
    for d in 0..ci.diagram.source().len() {
        acc = q.meet2(&acc, &q.rres(ci.weight.at(d), i.at(ci.diagram.apply(d)))?)?;
    }
    Ok(i.at(ci.witness) == &acc)
}

// ---------------------------------------------------------------------------
// Automata behaviours as weighted colimits
// ---------------------------------------------------------------------------

/// `q' ↦ ⊔_q A(q',q)·final(q)`: forward behaviour of an automaton whose
/// transition structure is the space `a`. Always a presheaf.
pub fn observability(a: &Arc<FinSpace>, final_states: &[QVal]) -> Result<Presheaf> {
    let q = a.quantale();
    if final_states.len() != a.len() {
        return Err(Error::Shape("one final weight per state required".into()));
    }
    let mut vals = Vec::with_capacity(a.len());
    for qp in 0..a.len() {
        let mut acc = q.bottom();
        for (qq, f) in final_states.iter().enumerate() {
            acc = q.join2(&acc, &q.mul(a.hom(qp, qq), f)?)?;
        }
        vals.push(acc);
    }
    Presheaf::new(a.clone(), vals)
}

/// `q ↦ ⊔_q0 initial(q0)·A(q0,q)`: reachability weights. Always a copresheaf.
pub fn reachability(a: &Arc<FinSpace>, initial_states: &[QVal]) -> Result<Copresheaf> {
    let q = a.quantale();
    if initial_states.len() != a.len() {
        return Err(Error::Shape("one initial weight per state required".into()));
    }
    let mut vals = Vec::with_capacity(a.len());
    for qq in 0..a.len() {
        let mut acc = q.bottom();
        for (q0, i) in initial_states.iter().enumerate() {
            acc = q.join2(&acc, &q.mul(i, a.hom(q0, qq))?)?;
        }
        vals.push(acc);
    }
    Copresheaf::new(a.clone(), vals)
}
