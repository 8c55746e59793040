//! Completion of a two-sided context by polar pairs.
//!
//! A context is a relation `I : X ⇸ A`. The two polars
//!
//! ```text
//! up(φ)(a)   = ⊓_x φ(x) ▷ I(x,a)          (presheaf on X ↦ copresheaf on A)
//! down(ψ)(x) = ⊓_a I(x,a) ◁ ψ(a)          (copresheaf on A ↦ presheaf on X)
//! ```
//!
//! form a Galois connection whose stable pairs `(φ, ψ)` with `up(φ) = ψ` and
//! `down(ψ) = φ` are the *concepts* of `I`. The space of all concepts with
//! hom `⟦κ⟧ ▸ ⟦κ'⟧` (equivalently `⦃κ⦄ ◂ ⦃κ'⦄`) is the completion `M(I)`:
//! `X` embeds into it along `x ↦ (down(I(x,-)), I(x,-))`, `A` along
//! `a ↦ (I(-,a), up(I(-,a)))`, and the hom between the two embedded sides is
//! exactly `I` again.
//!
//! `M(I)` has all weighted limits and colimits, computed by closing the
//! pointwise formulas ([`Completion::colimit`], [`Completion::limit`] and the
//! diagram variants). [`is_completion_of`] checks the axioms for an arbitrary
//! candidate triple and [`completion_iso`] exhibits the equivalence with
//! `M(I)` that the axioms force.
//!
//! Concepts are enumerated without scanning all vectors: every stable extent
//! is a meet of *shifted columns* `x ↦ I(x,a) ◁ r`, so the closure of that
//! generator set under binary meets is exactly the extent lattice (the
//! brute-force scan lives in the oracle module and is compared in tests).

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::limits::{colimit_witnesses, limit_witnesses, weighted_colimit_presheaf, weighted_limit_presheaf};
use crate::quantale::QVal;
use crate::relation::{enumerate_vectors, Copresheaf, Presheaf, QRel};
use crate::space::{FinSpace, Mat, SpaceMap};

// ---------------------------------------------------------------------------
// Polars
// ---------------------------------------------------------------------------

pub(crate) fn up_vec(i: &QRel, phi: &[QVal]) -> Result<Vec<QVal>> {
    let q = i.source().quantale();
    let mut out = Vec::with_capacity(i.target().len());
    for a in 0..i.target().len() {
        let mut acc = q.top();
        for x in 0..i.source().len() {
            acc = q.meet2(&acc, &q.rres(&phi[x], i.at(x, a))?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

pub(crate) fn down_vec(i: &QRel, psi: &[QVal]) -> Result<Vec<QVal>> {
    let q = i.source().quantale();
    let mut out = Vec::with_capacity(i.source().len());
    for x in 0..i.source().len() {
        let mut acc = q.top();
        for a in 0..i.target().len() {
            acc = q.meet2(&acc, &q.lres(i.at(x, a), &psi[a])?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// The upper polar `φ ▸ I` of a presheaf on the source of the context.
pub fn up(i: &QRel, phi: &Presheaf) -> Result<Copresheaf> {
    if phi.space() != i.source() {
        return Err(Error::Shape("polar of a presheaf on the wrong space".into()));
    }
    Copresheaf::new(i.target().clone(), up_vec(i, phi.vals())?)
}

/// The lower polar `I ◂ ψ` of a copresheaf on the target of the context.
pub fn down(i: &QRel, psi: &Copresheaf) -> Result<Presheaf> {
    if psi.space() != i.target() {
        return Err(Error::Shape("polar of a copresheaf on the wrong space".into()));
    }
    Presheaf::new(i.source().clone(), down_vec(i, psi.vals())?)
}

/// The closure `down(up(φ))` on presheaves: inflationary, monotone,
/// idempotent.
pub fn closure(i: &QRel, phi: &Presheaf) -> Result<Presheaf> {
    if phi.space() != i.source() {
        return Err(Error::Shape("closure of a presheaf on the wrong space".into()));
    }
    Presheaf::new(i.source().clone(), down_vec(i, &up_vec(i, phi.vals())?)?)
}

/// Verifies the triple identities `up∘down∘up = up` and `down∘up∘down = down`
/// over *every* raw vector, and on stable pairs the equivalence
/// `φ = down(ψ) ⇔ up(φ) = ψ`.
pub fn check_closure_identities(i: &QRel, budget: &Budget) -> Result<bool> {
    let all_phi = enumerate_vectors(i.source(), budget.vector_enum, "source vectors", |_| Ok(true))?;
    let mut intents = BTreeSet::new();
    for phi in &all_phi {
        let u = up_vec(i, phi)?;
        if up_vec(i, &down_vec(i, &u)?)? != u {
            return Ok(false);
        }
        intents.insert(u);
    }
    let all_psi = enumerate_vectors(i.target(), budget.vector_enum, "target vectors", |_| Ok(true))?;
    let mut extents = BTreeSet::new();
    for psi in &all_psi {
        let d = down_vec(i, psi)?;
        if down_vec(i, &up_vec(i, &d)?)? != d {
            return Ok(false);
        }
        extents.insert(d);
    }
    for phi in &extents {
        for psi in &intents {
            let fwd = &down_vec(i, psi)? == phi;
            let bwd = &up_vec(i, phi)? == psi;
            if fwd != bwd {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Concepts and the completion
// ---------------------------------------------------------------------------

/// A stable polar pair of the context.
#[derive(Clone, PartialEq, Debug)]
pub struct Concept {
    pub extent: Presheaf,
    pub intent: Copresheaf,
}

/// All concepts, ordered by extent. Uses the shifted-column generator closure
/// rather than a scan of all vectors.
pub fn enumerate_concepts(i: &QRel, budget: &Budget) -> Result<Vec<Concept>> {
    let q = i.source().quantale().clone();
    let carrier = q.carrier()?;
    let nx = i.source().len();
    Budget::guard(
        "concept generators",
        (i.target().len() as u128).saturating_mul(carrier.len() as u128),
        budget.class_enum,
    )?;
    let mut set: BTreeSet<Vec<QVal>> = BTreeSet::new();
    set.insert(vec![q.top(); nx]);
    for a in 0..i.target().len() {
        for r in carrier {
            let mut gen = Vec::with_capacity(nx);
            for x in 0..nx {
                gen.push(q.lres(i.at(x, a), r)?);
            }
            set.insert(gen);
        }
    }
    loop {
        Budget::guard(
            "concept closure",
            (set.len() as u128).saturating_mul(set.len() as u128),
            budget.class_enum,
        )?;
        let snapshot: Vec<Vec<QVal>> = set.iter().cloned().collect();
        let mut added = false;
        for ii in 0..snapshot.len() {
            for jj in ii + 1..snapshot.len() {
                let mut m = Vec::with_capacity(nx);
                for x in 0..nx {
                    m.push(q.meet2(&snapshot[ii][x], &snapshot[jj][x])?);
                }
                if set.insert(m) {
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    let mut out = Vec::with_capacity(set.len());
    for extent in set {
        let intent = up_vec(i, &extent)?;
        debug_assert_eq!(down_vec(i, &intent)?, extent);
        out.push(Concept {
            extent: Presheaf::new(i.source().clone(), extent)?,
            intent: Copresheaf::new(i.target().clone(), intent)?,
        });
    }
    Ok(out)
}

/// The completion `M(I)` of a context, with both embeddings.
#[derive(Clone, Debug)]
pub struct Completion {
    context: QRel,
    concepts: Vec<Concept>,
    space: Arc<FinSpace>,
    lower: SpaceMap,
    upper: SpaceMap,
}

impl Completion {
    pub fn new(context: QRel, budget: &Budget) -> Result<Completion> {
        let concepts = enumerate_concepts(&context, budget)?;
        let n = concepts.len();
        let q = context.source().quantale().clone();
        let mut data = Vec::with_capacity(n * n);
        for k in &concepts {
            for kp in &concepts {
                data.push(k.extent.hom_to(&kp.extent)?);
            }
        }
        let points = (0..n).map(|idx| format!("k{idx}")).collect();
        let space = FinSpace::new(q, points, Mat::new(n, n, data)?)?;
        let find = |vals: &[QVal]| -> usize {
            concepts
                .binary_search_by(|c| c.extent.vals().cmp(vals))
                .expect("stable extent must be a concept")
        };
        let lower_idx: Vec<usize> = (0..context.source().len())
            .map(|x| -> Result<usize> {
                let row: Vec<QVal> = context.matrix().row(x).to_vec();
                Ok(find(&down_vec(&context, &row)?))
            })
            .collect::<Result<_>>()?;
        let upper_idx: Vec<usize> = (0..context.target().len())
            .map(|a| Ok(find(&context.matrix().col(a))))
            .collect::<Result<_>>()?;
        let lower = SpaceMap::new(context.source().clone(), space.clone(), lower_idx)?;
        lower.check_functor()?;
        let upper = SpaceMap::new(context.target().clone(), space.clone(), upper_idx)?;
        upper.check_functor()?;
        Ok(Completion { context, concepts, space, lower, upper })
    }

    pub fn context(&self) -> &QRel {
        &self.context
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn space(&self) -> &Arc<FinSpace> {
        &self.space
    }

    /// The embedding of the context's source, `x ↦ x̄`.
    pub fn lower(&self) -> &SpaceMap {
        &self.lower
    }

    /// The embedding of the context's target, `a ↦ ā`.
    pub fn upper(&self) -> &SpaceMap {
        &self.upper
    }

    pub fn index_of_extent(&self, vals: &[QVal]) -> Option<usize> {
        self.concepts.binary_search_by(|c| c.extent.vals().cmp(vals)).ok()
    }

    fn must_find(&self, vals: &[QVal]) -> usize {
        self.index_of_extent(vals).expect("stable extent must be a concept")
    }

    /// The colimit of the source embedding weighted by `phi`: the concept
    /// with intent `up(φ)` and extent `closure(φ)`.
    pub fn colimit(&self, phi: &Presheaf) -> Result<usize> {
        if phi.space() != self.context.source() {
            return Err(Error::Shape("weight must live on the context source".into()));
        }
        let intent = up_vec(&self.context, phi.vals())?;
        Ok(self.must_find(&down_vec(&self.context, &intent)?))
    }

    /// The limit of the target embedding weighted by `psi`: the concept with
    /// extent `down(ψ)`.
    pub fn limit(&self, psi: &Copresheaf) -> Result<usize> {
        if psi.space() != self.context.target() {
            return Err(Error::Shape("weight must live on the context target".into()));
        }
        Ok(self.must_find(&down_vec(&self.context, psi.vals())?))
    }

    /// The colimit of a diagram of concepts weighted by scalars: close the
    /// pointwise join `x ↦ ⊔_s ⟦H_s⟧(x)·w_s`.
    pub fn colimit_diagram(&self, parts: &[(QVal, usize)]) -> Result<usize> {
        let x = self.context.source().clone();
        let items: Vec<(QVal, Presheaf)> = parts
            .iter()
            .map(|(w, k)| (w.clone(), self.concepts[*k].extent.clone()))
            .collect();
        let joined = weighted_colimit_presheaf(&x, &items)?;
        self.colimit(&joined)
    }

    /// The limit of a diagram of concepts weighted by scalars: the pointwise
    /// formula `x ↦ ⊓_s ⟦H_s⟧(x) ◁ w_s` is already a stable extent.
    pub fn limit_diagram(&self, parts: &[(QVal, usize)]) -> Result<usize> {
        let x = self.context.source().clone();
        let items: Vec<(QVal, Presheaf)> = parts
            .iter()
            .map(|(w, k)| (w.clone(), self.concepts[*k].extent.clone()))
            .collect();
        let met = weighted_limit_presheaf(&x, &items)?;
        Ok(self.must_find(met.vals()))
    }

    /// All four distance identities of the embedded context:
    /// `M(x̄,ā) = I(x,a)`, `M(ā,ā') = ⊓_x I(x,a) ▷ I(x,a')`,
    /// `M(x̄,x̄') = ⊓_a I(x,a) ◁ I(x',a)`, and `M(ā,x̄)` as the polar pairing.
    pub fn check_embedded_distances(&self) -> Result<bool> {
        let i = &self.context;
        let q = i.source().quantale();
        let (nx, na) = (i.source().len(), i.target().len());
        for x in 0..nx {
            for a in 0..na {
                if self.space.hom(self.lower.apply(x), self.upper.apply(a)) != i.at(x, a) {
                    return Ok(false);
                }
            }
        }
        for a in 0..na {
            for ap in 0..na {
                let mut acc = q.top();
                for x in 0..nx {
                    acc = q.meet2(&acc, &q.rres(i.at(x, a), i.at(x, ap))?)?;
                }
                if self.space.hom(self.upper.apply(a), self.upper.apply(ap)) != &acc {
                    return Ok(false);
                }
            }
        }
        for x in 0..nx {
            for xp in 0..nx {
                let mut acc = q.top();
                for a in 0..na {
                    acc = q.meet2(&acc, &q.lres(i.at(x, a), i.at(xp, a))?)?;
                }
                if self.space.hom(self.lower.apply(x), self.lower.apply(xp)) != &acc {
                    return Ok(false);
                }
            }
        }
        for a in 0..na {
            let up_col = up_vec(i, &i.matrix().col(a))?;
            for x in 0..nx {
                let mut acc = q.top();
                for b in 0..na {
                    acc = q.meet2(&acc, &q.lres(&up_col[b], i.at(x, b))?)?;
                }
                if self.space.hom(self.upper.apply(a), self.lower.apply(x)) != &acc {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The two evaluation identities: `M(x̄,κ) = ⟦κ⟧(x)` and `M(κ,ā) = ⦃κ⦄(a)`.
    pub fn check_embedded_yoneda(&self) -> Result<bool> {
        for (kidx, k) in self.concepts.iter().enumerate() {
            for x in 0..self.context.source().len() {
                if self.space.hom(self.lower.apply(x), kidx) != k.extent.at(x) {
                    return Ok(false);
                }
            }
            for a in 0..self.context.target().len() {
                if self.space.hom(kidx, self.upper.apply(a)) != k.intent.at(a) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Hom agreement between the extent and intent descriptions.
    pub fn check_hom_agreement(&self) -> Result<bool> {
        for (ki, k) in self.concepts.iter().enumerate() {
            for (kj, kp) in self.concepts.iter().enumerate() {
                if self.space.hom(ki, kj) != &k.intent.hom_to(&kp.intent)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Strict covering pairs of the (skeletal) concept order, for rendering.
    pub fn covering_pairs(&self) -> Vec<(usize, usize)> {
        let ord = self.space.underlying_order();
        let n = self.concepts.len();
        let strict = |i: usize, j: usize| ord.leq[i][j] && !ord.leq[j][i];
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if strict(i, j) && !(0..n).any(|k| strict(i, k) && strict(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// The same matrix as a context between discrete spaces (concepts do not
/// change, which tests verify).
pub fn restrict_discrete(i: &QRel) -> Result<QRel> {
    let q = i.source().quantale().clone();
    let dx = FinSpace::discrete(q.clone(), i.source().points().to_vec());
    let da = FinSpace::discrete(q, i.target().points().to_vec());
    QRel::new(dx, da, i.matrix().clone())
}

// ---------------------------------------------------------------------------
// Recognizing completions
// ---------------------------------------------------------------------------

/// Outcome of checking a candidate `(C, l, r)` against the completion axioms
/// for a context `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompletionReport {
    /// Every sampled weight has a (co)limit witness in `C`.
    pub complete: bool,
    /// `C(l x, r a) = I(x,a)` throughout.
    pub hom_interpolates: bool,
    /// Every point is a colimit of the source side and a limit of the target
    /// side, via the canonical weights.
    pub dense: bool,
    /// True when completeness was checked on the deterministic sample rather
    /// than on every weight (the weight count exceeded the budget).
    pub sampled: bool,
    /// First failure, for diagnostics.
    pub failure: Option<String>,
}

impl CompletionReport {
    pub fn holds(&self) -> bool {
        self.complete && self.hom_interpolates && self.dense
    }
}

fn sampled_presheaves(c: &Arc<FinSpace>) -> Result<Vec<Presheaf>> {
    let q = c.quantale();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |vals: Vec<QVal>| {
        if seen.insert(vals.clone()) {
            out.push(vals);
        }
    };
    push(vec![q.bottom(); c.len()]);
    push(vec![q.top(); c.len()]);
    let reps: Vec<Vec<QVal>> = (0..c.len()).map(|p| c.hom_mat().col(p)).collect();
    for r in &reps {
        push(r.clone());
    }
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let mut meet = Vec::with_capacity(c.len());
            let mut join = Vec::with_capacity(c.len());
            for x in 0..c.len() {
                meet.push(q.meet2(&reps[i][x], &reps[j][x])?);
                join.push(q.join2(&reps[i][x], &reps[j][x])?);
            }
            push(meet);
            push(join);
        }
    }
    out.into_iter().map(|vals| Presheaf::new(c.clone(), vals)).collect()
}

fn sampled_copresheaves(c: &Arc<FinSpace>) -> Result<Vec<Copresheaf>> {
    let q = c.quantale();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |vals: Vec<QVal>| {
        if seen.insert(vals.clone()) {
            out.push(vals);
        }
    };
    push(vec![q.bottom(); c.len()]);
    push(vec![q.top(); c.len()]);
    let reps: Vec<Vec<QVal>> = (0..c.len()).map(|p| c.hom_mat().row(p).to_vec()).collect();
    for r in &reps {
        push(r.clone());
    }
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            let mut meet = Vec::with_capacity(c.len());
            let mut join = Vec::with_capacity(c.len());
            for x in 0..c.len() {
                meet.push(q.meet2(&reps[i][x], &reps[j][x])?);
                join.push(q.join2(&reps[i][x], &reps[j][x])?);
            }
            push(meet);
            push(join);
        }
    }
    out.into_iter().map(|vals| Copresheaf::new(c.clone(), vals)).collect()
}

/// Checks the three completion axioms for a candidate `(c, l, r)` over the
/// context `i`: cocompleteness/completeness of `c`, hom interpolation, and
/// two-sided density.
pub fn is_completion_of(
    c: &Arc<FinSpace>,
    l: &SpaceMap,
    r: &SpaceMap,
    i: &QRel,
    budget: &Budget,
) -> Result<CompletionReport> {
    if l.source() != i.source() || r.source() != i.target() {
        return Err(Error::Shape("embeddings must start from the context sides".into()));
    }
    if l.target() != c || r.target() != c {
        return Err(Error::Shape("embeddings must land in the candidate space".into()));
    }
    l.check_functor()?;
    r.check_functor()?;
    let q = c.quantale().clone();
    let ident = SpaceMap::identity(c.clone());
    let mut report = CompletionReport {
        complete: true,
        hom_interpolates: true,
        dense: true,
        sampled: false,
        failure: None,
    };

    let weight_count = q.carrier_len().saturating_pow(c.len() as u32);
    let (phis, psis) = if weight_count <= budget.vector_enum {
        (
            crate::relation::enumerate_presheaves(c, budget)?,
            crate::relation::enumerate_copresheaves(c, budget)?,
        )
    } else {
        report.sampled = true;
        (sampled_presheaves(c)?, sampled_copresheaves(c)?)
    };
    'outer: {
        for phi in &phis {
            if colimit_witnesses(&ident, phi)?.is_empty() {
                report.complete = false;
                report.failure = Some(format!("no colimit for weight {}", render(phi.vals())));
                break 'outer;
            }
        }
        for psi in &psis {
            if limit_witnesses(&ident, psi)?.is_empty() {
                report.complete = false;
                report.failure = Some(format!("no limit for weight {}", render(psi.vals())));
                break 'outer;
            }
        }
    }

    for x in 0..i.source().len() {
        for a in 0..i.target().len() {
            if c.hom(l.apply(x), r.apply(a)) != i.at(x, a) {
                report.hom_interpolates = false;
                if report.failure.is_none() {
                    report.failure = Some(format!(
                        "hom between embedded {} and {} differs from the context",
                        i.source().points()[x],
                        i.target().points()[a]
                    ));
                }
            }
        }
    }

    for p in 0..c.len() {
        let canon_colim: Vec<QVal> = (0..i.source().len())
            .map(|x| c.hom(l.apply(x), p).clone())
            .collect();
        let phi = Presheaf::new(i.source().clone(), canon_colim)?;
        if !colimit_witnesses(l, &phi)?.contains(&p) {
            report.dense = false;
            if report.failure.is_none() {
                report.failure =
                    Some(format!("{} is not a colimit of the source side", c.points()[p]));
            }
            continue;
        }
        let canon_lim: Vec<QVal> =
            (0..i.target().len()).map(|a| c.hom(p, r.apply(a)).clone()).collect();
        let psi = Copresheaf::new(i.target().clone(), canon_lim)?;
        if !limit_witnesses(r, &psi)?.contains(&p) {
            report.dense = false;
            if report.failure.is_none() {
                report.failure =
                    Some(format!("{} is not a limit of the target side", c.points()[p]));
            }
        }
    }
    Ok(report)
}

fn render(vals: &[QVal]) -> String {
    let mut s = String::from("(");
    for (i, v) in vals.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&v.to_string());
    }
    s.push(')');
    s
}

/// If `(c, l, r)` satisfies the completion axioms, produce the pair of
/// distance-preserving functors between `M(I)` and `c` that are mutually
/// inverse up to isomorphism; `None` when any step fails.
pub fn completion_iso(
    c: &Arc<FinSpace>,
    l: &SpaceMap,
    r: &SpaceMap,
    i: &QRel,
    budget: &Budget,
) -> Result<Option<(SpaceMap, SpaceMap)>> {
    let comp = Completion::new(i.clone(), budget)?;
    let q = c.quantale().clone();
    let mut fwd = Vec::with_capacity(comp.concepts().len());
    for k in comp.concepts() {
        match colimit_witnesses(l, &k.extent)?.first() {
            Some(&w) => fwd.push(w),
            None => return Ok(None),
        }
    }
    let mut bwd = Vec::with_capacity(c.len());
    for p in 0..c.len() {
        let canon: Vec<QVal> =
            (0..i.source().len()).map(|x| c.hom(l.apply(x), p).clone()).collect();
        let phi = Presheaf::new(i.source().clone(), canon)?;
        bwd.push(comp.colimit(&phi)?);
    }
    // distance preservation both ways
    for (ki, &fi) in fwd.iter().enumerate() {
        for (kj, &fj) in fwd.iter().enumerate() {
            if comp.space().hom(ki, kj) != c.hom(fi, fj) {
                return Ok(None);
            }
        }
    }
    for (pi, &bi) in bwd.iter().enumerate() {
        for (pj, &bj) in bwd.iter().enumerate() {
            if c.hom(pi, pj) != comp.space().hom(bi, bj) {
                return Ok(None);
            }
        }
    }
    // mutually inverse: on the skeletal completion on the nose, on `c` up to iso
    for (ki, &fi) in fwd.iter().enumerate() {
        if bwd[fi] != ki {
            return Ok(None);
        }
    }
    let e = q.unit();
    for (p, &bp) in bwd.iter().enumerate() {
        let back = fwd[bp];
        if !q.leq(&e, c.hom(p, back))? || !q.leq(&e, c.hom(back, p))? {
            return Ok(None);
        }
    }
    // the equivalence must commute with both embeddings, up to isomorphism
    for x in 0..i.source().len() {
        let via = fwd[comp.lower().apply(x)];
        if !q.leq(&e, c.hom(via, l.apply(x)))? || !q.leq(&e, c.hom(l.apply(x), via))? {
            return Ok(None);
        }
    }
    for a in 0..i.target().len() {
        let via = fwd[comp.upper().apply(a)];
        if !q.leq(&e, c.hom(via, r.apply(a)))? || !q.leq(&e, c.hom(r.apply(a), via))? {
            return Ok(None);
        }
    }
    let f = SpaceMap::new(comp.space().clone(), c.clone(), fwd)?;
    f.check_functor()?;
    let g = SpaceMap::new(c.clone(), comp.space().clone(), bwd)?;
    g.check_functor()?;
    Ok(Some((f, g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Quantale;
    use crate::relation::{close_into_rel, yoneda_down, yoneda_up};

    fn bool_rel(rows: Vec<Vec<u8>>) -> QRel {
        let q = Arc::new(Quantale::bool2());
        let nx = rows.len();
        let na = rows[0].len();
        let x = FinSpace::discrete(q.clone(), (0..nx).map(|i| format!("x{i}")).collect());
        let a = FinSpace::discrete(q, (0..na).map(|i| format!("a{i}")).collect());
        let mat = Mat::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(|b| QVal::Bool(b == 1)).collect()).collect(),
        )
        .unwrap();
        QRel::new(x, a, mat).unwrap()
    }

    fn extents_of(concepts: &[Concept]) -> Vec<Vec<QVal>> {
        concepts.iter().map(|c| c.extent.vals().to_vec()).collect()
    }

    #[test]
    fn antichain_context_has_the_four_subset_concepts() {
        let i = bool_rel(vec![vec![1, 0], vec![0, 1]]);
        let concepts = enumerate_concepts(&i, &Budget::default()).unwrap();
        let t = QVal::Bool(true);
        let f = QVal::Bool(false);
        assert_eq!(
            extents_of(&concepts),
            vec![
                vec![f.clone(), f.clone()],
                vec![f.clone(), t.clone()],
                vec![t.clone(), f.clone()],
                vec![t.clone(), t.clone()],
            ]
        );
        let intents: Vec<Vec<QVal>> = concepts.iter().map(|c| c.intent.vals().to_vec()).collect();
        assert_eq!(
            intents,
            vec![
                vec![t.clone(), t.clone()],
                vec![f.clone(), t.clone()],
                vec![t, f.clone()],
                vec![f.clone(), f],
            ]
        );
    }

    #[test]
    fn chain_context_collapses_to_two_concepts() {
        let i = bool_rel(vec![vec![1, 1], vec![0, 1]]);
        let concepts = enumerate_concepts(&i, &Budget::default()).unwrap();
        let t = QVal::Bool(true);
        let f = QVal::Bool(false);
        assert_eq!(extents_of(&concepts), vec![vec![t.clone(), f], vec![t.clone(), t]]);
    }

    #[test]
    fn one_cell_similarity_context() {
        let q = Arc::new(Quantale::similarity(1));
        let x = FinSpace::discrete(q.clone(), vec!["x"]);
        let a = FinSpace::discrete(q.clone(), vec!["a"]);
        let i = QRel::new(x, a, Mat::from_rows(vec![vec![QVal::Nat(1)]]).unwrap()).unwrap();
        let concepts = enumerate_concepts(&i, &Budget::default()).unwrap();
        assert_eq!(extents_of(&concepts), vec![vec![QVal::Nat(1)], vec![QVal::Inf]]);
    }

    #[test]
    fn empty_target_side_gives_the_single_top_concept() {
        let q = Arc::new(Quantale::bool2());
        let x = FinSpace::discrete(q.clone(), vec!["x0", "x1"]);
        let a = FinSpace::discrete(q, Vec::<&str>::new());
        let i = QRel::new(x, a, Mat::new(2, 0, vec![]).unwrap()).unwrap();
        let concepts = enumerate_concepts(&i, &Budget::default()).unwrap();
        assert_eq!(extents_of(&concepts), vec![vec![QVal::Bool(true), QVal::Bool(true)]]);
        let comp = Completion::new(i, &Budget::default()).unwrap();
        assert_eq!(comp.space().len(), 1);
    }

    fn lawvere_context() -> QRel {
        let q = Arc::new(Quantale::lawvere(4));
        let x = {
            let rows = vec![vec![QVal::Nat(0), QVal::Nat(1)], vec![QVal::Nat(3), QVal::Nat(0)]];
            FinSpace::new(
                q.clone(),
                vec!["x0".into(), "x1".into()],
                Mat::from_rows(rows).unwrap(),
            )
            .unwrap()
        };
        let a = {
            let rows = vec![vec![QVal::Nat(0), QVal::Nat(2)], vec![QVal::Nat(1), QVal::Nat(0)]];
            FinSpace::new(
                q.clone(),
                vec!["a0".into(), "a1".into()],
                Mat::from_rows(rows).unwrap(),
            )
            .unwrap()
        };
        let seed =
            Mat::from_rows(vec![vec![QVal::Nat(1), QVal::Nat(4)], vec![QVal::Nat(2), QVal::Nat(0)]])
                .unwrap();
        close_into_rel(&x, &a, &seed).unwrap()
    }

    #[test]
    fn closure_identities_on_mixed_contexts() {
        assert!(check_closure_identities(&bool_rel(vec![vec![1, 0], vec![0, 1]]), &Budget::default())
            .unwrap());
        assert!(check_closure_identities(&lawvere_context(), &Budget::default()).unwrap());
    }

    #[test]
    fn completion_carries_the_context_distances_and_evaluations() {
        for i in [bool_rel(vec![vec![1, 0, 1], vec![0, 1, 1]]), lawvere_context()] {
            let comp = Completion::new(i, &Budget::default()).unwrap();
            assert!(comp.check_embedded_distances().unwrap());
            assert!(comp.check_embedded_yoneda().unwrap());
            assert!(comp.check_hom_agreement().unwrap());
        }
    }

    #[test]
    fn colimits_and_limits_land_on_embedded_points_for_representables() {
        let i = lawvere_context();
        let comp = Completion::new(i.clone(), &Budget::default()).unwrap();
        for x in 0..i.source().len() {
            let k = comp.colimit(&yoneda_down(i.source(), x)).unwrap();
            assert_eq!(k, comp.lower().apply(x));
        }
        for a in 0..i.target().len() {
            let k = comp.limit(&yoneda_up(i.target(), a)).unwrap();
            assert_eq!(k, comp.upper().apply(a));
        }
    }

    #[test]
    fn diagram_colimits_join_concepts_and_limits_meet_them() {
        let i = bool_rel(vec![vec![1, 0], vec![0, 1]]);
        let comp = Completion::new(i, &Budget::default()).unwrap();
        let e = QVal::Bool(true);
        // concept extents are sorted: 0=(0,0), 1=(0,1), 2=(1,0), 3=(1,1)
        let join = comp.colimit_diagram(&[(e.clone(), 1), (e.clone(), 2)]).unwrap();
        assert_eq!(join, 3);
        let meet = comp.limit_diagram(&[(e.clone(), 1), (e, 2)]).unwrap();
        assert_eq!(meet, 0);
    }

    #[test]
    fn discrete_restriction_has_the_same_concepts() {
        let i = lawvere_context();
        let d = restrict_discrete(&i).unwrap();
        let a = enumerate_concepts(&i, &Budget::default()).unwrap();
        let b = enumerate_concepts(&d, &Budget::default()).unwrap();
        assert_eq!(extents_of(&a), extents_of(&b));
        let ia: Vec<_> = a.iter().map(|c| c.intent.vals().to_vec()).collect();
        let ib: Vec<_> = b.iter().map(|c| c.intent.vals().to_vec()).collect();
        assert_eq!(ia, ib);
    }

    #[test]
    fn the_completion_satisfies_its_own_axioms() {
        for (exhaustive, i) in
            [(true, bool_rel(vec![vec![1, 0], vec![0, 1]])), (false, lawvere_context())]
        {
            let comp = Completion::new(i.clone(), &Budget::default()).unwrap();
            let report =
                is_completion_of(comp.space(), comp.lower(), comp.upper(), &i, &Budget::default())
                    .unwrap();
            assert!(report.holds(), "{:?}", report.failure);
            if exhaustive {
                assert!(!report.sampled);
            }
        }
    }

    #[test]
    fn permuted_copy_is_recognized_and_isomorphic() {
        let i = bool_rel(vec![vec![1, 0], vec![0, 1]]);
        let comp = Completion::new(i.clone(), &Budget::default()).unwrap();
        let n = comp.space().len();
        let perm: Vec<usize> = (0..n).map(|k| (k + 1) % n).collect();
        let mut inv = vec![0usize; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k;
        }
        let mut rows = Vec::with_capacity(n);
        for a in 0..n {
            let mut row = Vec::with_capacity(n);
            for b in 0..n {
                row.push(comp.space().hom(inv[a], inv[b]).clone());
            }
            rows.push(row);
        }
        let c = FinSpace::new(
            comp.space().quantale().clone(),
            (0..n).map(|k| format!("m{k}")).collect(),
            Mat::from_rows(rows).unwrap(),
        )
        .unwrap();
        let to_c = SpaceMap::new(comp.space().clone(), c.clone(), perm.clone()).unwrap();
        let l = comp.lower().then(&to_c).unwrap();
        let r = comp.upper().then(&to_c).unwrap();
        let report = is_completion_of(&c, &l, &r, &i, &Budget::default()).unwrap();
        assert!(report.holds(), "{:?}", report.failure);
        let iso = completion_iso(&c, &l, &r, &i, &Budget::default()).unwrap();
        let (f, g) = iso.expect("permuted copy must be isomorphic");
        for k in 0..n {
            assert_eq!(g.apply(f.apply(k)), k);
        }
    }

    #[test]
    fn dropping_a_concept_breaks_the_axioms() {
        let i = bool_rel(vec![vec![1, 0], vec![0, 1]]);
        let comp = Completion::new(i.clone(), &Budget::default()).unwrap();
        // remove the bottom concept (index 0, extent (0,0)); embeddings avoid it
        let keep: Vec<usize> = (1..comp.space().len()).collect();
        let mut rows = Vec::new();
        for &a in &keep {
            let mut row = Vec::new();
            for &b in &keep {
                row.push(comp.space().hom(a, b).clone());
            }
            rows.push(row);
        }
        let c = FinSpace::new(
            comp.space().quantale().clone(),
            keep.iter().map(|k| format!("m{k}")).collect(),
            Mat::from_rows(rows).unwrap(),
        )
        .unwrap();
        let reindex: Vec<usize> = comp
            .lower()
            .indices()
            .iter()
            .map(|&k| keep.iter().position(|&kk| kk == k).unwrap())
            .collect();
        let l = SpaceMap::new(i.source().clone(), c.clone(), reindex).unwrap();
        let reindex: Vec<usize> = comp
            .upper()
            .indices()
            .iter()
            .map(|&k| keep.iter().position(|&kk| kk == k).unwrap())
            .collect();
        let r = SpaceMap::new(i.target().clone(), c.clone(), reindex).unwrap();
        let report = is_completion_of(&c, &l, &r, &i, &Budget::default()).unwrap();
        assert!(!report.holds());
        assert!(!report.complete, "{:?}", report.failure);
        assert!(completion_iso(&c, &l, &r, &i, &Budget::default()).unwrap().is_none());
    }
}
