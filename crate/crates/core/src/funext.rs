//! Transporting weights along a map of spaces, and the maps this induces
//! between completions.
//!
//! A map `G : C -> D` moves weights in both directions. Restriction composes
//! a weight on `D` with `G` to get a weight on `C`; the two image
//! constructions push a weight on `C` forward to `D`:
//!
//! ```text
//! restrict_filter(G, f)(c) = f(Gc)              restrict_ideal(G, i)(c) = i(Gc)
//! push_ideal(G, i)(d) = sup_c D(d,Gc) * i(c)    push_filter(G, f)(d) = sup_c f(c) * D(Gc,d)
//! ```
//!
//! The images are chosen so that evaluation pairings line up on either side of
//! the map; [`check_exchange`] verifies those identities exhaustively.
//!
//! Given completions of both `C` and `D` built from chosen weight classes
//! ([`CanExt`]), the transports induce maps between the completions:
//!
//! * [`FunctorExtension::sigma`] and [`FunctorExtension::pi`] extend `G`
//!   itself to a map from the completion of `C` to the completion of `D`,
//!   approximating from closed elements below (`sigma`) or open elements
//!   above (`pi`). Both agree with `G` on embedded points.
//! * [`FunctorExtension::left_lift`] and [`FunctorExtension::right_lift`] go
//!   the other way, from the completion of `D` to the completion of `C`. They
//!   exist only when restriction keeps the chosen classes stable: every
//!   restricted filter must again belong to the filter class on `C` (dually
//!   for ideals). When that fails the constructor of the lift reports the
//!   offending weight instead of inventing a value.
//!
//! When the lifts exist they are adjoint to the extensions, which
//! [`FunctorExtension::check_adjunctions`] confirms point by point.

use crate::budget::Budget;
use crate::canext::CanExt;
use crate::error::{Error, Result};
use crate::limits::pairing;
use crate::quantale::QVal;
use crate::relation::{
    enumerate_copresheaves, enumerate_presheaves, tuple_name, Copresheaf, Presheaf,
};
use crate::space::SpaceMap;

/// Restrict a filter-style weight on the target along the map: `c ↦ f(Gc)`.
pub fn restrict_filter(g: &SpaceMap, f: &Copresheaf) -> Result<Copresheaf> {
    if f.space() != g.target() {
        return Err(Error::Shape(
            "restriction needs a weight on the target of the map".into(),
        ));
    }
    let vals = (0..g.source().len())
        .map(|c| f.at(g.apply(c)).clone())
        .collect();
    Copresheaf::new(g.source().clone(), vals)
}

/// Restrict an ideal-style weight on the target along the map: `c ↦ i(Gc)`.
pub fn restrict_ideal(g: &SpaceMap, i: &Presheaf) -> Result<Presheaf> {
    if i.space() != g.target() {
        return Err(Error::Shape(
            "restriction needs a weight on the target of the map".into(),
        ));
    }
    let vals = (0..g.source().len())
        .map(|c| i.at(g.apply(c)).clone())
        .collect();
    Presheaf::new(g.source().clone(), vals)
}

/// Image of an ideal-style weight: `d ↦ sup_c D(d,Gc) * i(c)`.
pub fn push_ideal(g: &SpaceMap, i: &Presheaf) -> Result<Presheaf> {
    if i.space() != g.source() {
        return Err(Error::Shape(
            "image needs a weight on the source of the map".into(),
        ));
    }
    let d_space = g.target();
    let q = d_space.quantale();
    let mut vals = Vec::with_capacity(d_space.len());
    for d in 0..d_space.len() {
        let mut acc = q.bottom();
        for c in 0..g.source().len() {
            acc = q.join2(&acc, &q.mul(d_space.hom(d, g.apply(c)), i.at(c))?)?;
        }
        vals.push(acc);
    }
    Presheaf::new(d_space.clone(), vals)
}

/// Image of a filter-style weight: `d ↦ sup_c f(c) * D(Gc,d)`.
pub fn push_filter(g: &SpaceMap, f: &Copresheaf) -> Result<Copresheaf> {
    if f.space() != g.source() {
        return Err(Error::Shape(
            "image needs a weight on the source of the map".into(),
        ));
    }
    let d_space = g.target();
    let q = d_space.quantale();
    let mut vals = Vec::with_capacity(d_space.len());
    for d in 0..d_space.len() {
        let mut acc = q.bottom();
        for c in 0..g.source().len() {
            acc = q.join2(&acc, &q.mul(f.at(c), d_space.hom(g.apply(c), d))?)?;
        }
        vals.push(acc);
    }
    Copresheaf::new(d_space.clone(), vals)
}

/// Exhaustively verify that restriction and image are evaluation-compatible:
///
/// ```text
/// <restrict_filter(G,f), i> = <f, push_ideal(G,i)>    for all i on C, f on D
/// <f, restrict_ideal(G,j)>  = <push_filter(G,f), j>   for all f on C, j on D
/// ```
///
/// where `<f, i> = sup f(x) * i(x)` is the pairing.
pub fn check_exchange(g: &SpaceMap, budget: &Budget) -> Result<bool> {
    let source_ideals = enumerate_presheaves(g.source(), budget)?;
    let source_filters = enumerate_copresheaves(g.source(), budget)?;
    let target_ideals = enumerate_presheaves(g.target(), budget)?;
    let target_filters = enumerate_copresheaves(g.target(), budget)?;
    for i in &source_ideals {
        let pushed = push_ideal(g, i)?;
        for f in &target_filters {
            let lhs = pairing(&restrict_filter(g, f)?, i)?;
            let rhs = pairing(f, &pushed)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    for f in &source_filters {
        let pushed = push_filter(g, f)?;
        for j in &target_ideals {
            let lhs = pairing(f, &restrict_ideal(g, j)?)?;
            let rhs = pairing(&pushed, j)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A map of base spaces together with completions on both ends, and the four
/// induced maps between the completions.
#[derive(Clone, Debug)]
pub struct FunctorExtension {
    g: SpaceMap,
    source: CanExt,
    target: CanExt,
    /// Target-completion point for each source filter: the limit of embedded
    /// target points weighted by the pushed filter.
    pushed_filter_points: Vec<usize>,
    /// Target-completion point for each source ideal: the colimit of embedded
    /// target points weighted by the pushed ideal.
    pushed_ideal_points: Vec<usize>,
}

impl FunctorExtension {
    /// Pair a map with completions of its two ends. The map must be a functor
    /// and the completions must sit on exactly its source and target.
    pub fn new(g: SpaceMap, source: CanExt, target: CanExt) -> Result<FunctorExtension> {
        if source.base() != g.source() || target.base() != g.target() {
            return Err(Error::Shape(
                "completions must be built on the ends of the map".into(),
            ));
        }
        g.check_functor()?;
        let mut pushed_filter_points = Vec::with_capacity(source.filters().len());
        for f in source.filters() {
            let w = push_filter(&g, f)?;
            let parts: Vec<(QVal, usize)> = (0..g.target().len())
                .map(|d| (w.at(d).clone(), target.embed().apply(d)))
                .collect();
            pushed_filter_points.push(target.completion().limit_diagram(&parts)?);
        }
        let mut pushed_ideal_points = Vec::with_capacity(source.ideals().len());
        for i in source.ideals() {
            let w = push_ideal(&g, i)?;
            let parts: Vec<(QVal, usize)> = (0..g.target().len())
                .map(|d| (w.at(d).clone(), target.embed().apply(d)))
                .collect();
            pushed_ideal_points.push(target.completion().colimit_diagram(&parts)?);
        }
        Ok(FunctorExtension {
            g,
            source,
            target,
            pushed_filter_points,
            pushed_ideal_points,
        })
    }

    pub fn map(&self) -> &SpaceMap {
        &self.g
    }

    pub fn source_ext(&self) -> &CanExt {
        &self.source
    }

    pub fn target_ext(&self) -> &CanExt {
        &self.target
    }

    /// Extension of the map that approximates from closed elements: the
    /// colimit, over source filters `f`, of the pushed-filter points weighted
    /// by the extent of `k`.
    pub fn sigma(&self, k: usize) -> Result<usize> {
        let extent = &self.source.completion().concepts()[k].extent;
        let parts: Vec<(QVal, usize)> = self
            .pushed_filter_points
            .iter()
            .enumerate()
            .map(|(f, &p)| (extent.at(f).clone(), p))
            .collect();
        self.target.completion().colimit_diagram(&parts)
    }

    /// Extension of the map that approximates from open elements: the limit,
    /// over source ideals `i`, of the pushed-ideal points weighted by the
    /// intent of `k`.
    pub fn pi(&self, k: usize) -> Result<usize> {
        let intent = &self.source.completion().concepts()[k].intent;
        let parts: Vec<(QVal, usize)> = self
            .pushed_ideal_points
            .iter()
            .enumerate()
            .map(|(i, &p)| (intent.at(i).clone(), p))
            .collect();
        self.target.completion().limit_diagram(&parts)
    }

    /// For each target filter, the index of its restriction inside the source
    /// filter class. Fails with the offending filter if the class is not
    /// stable under restriction.
    pub fn restricted_filter_indices(&self) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.target.filters().len());
        for f in self.target.filters() {
            let r = restrict_filter(&self.g, f)?;
            match self
                .source
                .filters()
                .iter()
                .position(|fc| fc.vals() == r.vals())
            {
                Some(idx) => out.push(idx),
                None => {
                    return Err(Error::ClassNotClosed {
                        side: "filter",
                        member: tuple_name(f.vals()),
                    })
                }
            }
        }
        Ok(out)
    }

    /// For each target ideal, the index of its restriction inside the source
    /// ideal class. Fails with the offending ideal if the class is not stable
    /// under restriction.
    pub fn restricted_ideal_indices(&self) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(self.target.ideals().len());
        for j in self.target.ideals() {
            let r = restrict_ideal(&self.g, j)?;
            match self
                .source
                .ideals()
                .iter()
                .position(|jc| jc.vals() == r.vals())
            {
                Some(idx) => out.push(idx),
                None => {
                    return Err(Error::ClassNotClosed {
                        side: "ideal",
                        member: tuple_name(j.vals()),
                    })
                }
            }
        }
        Ok(out)
    }

    /// Lift from the target completion back to the source completion along
    /// restricted filters: the colimit of the closed elements of the
    /// restrictions, weighted by the extent of `k`. Defined only when the
    /// filter classes are stable under restriction.
    pub fn left_lift(&self, k: usize) -> Result<usize> {
        let lifted = self.restricted_filter_indices()?;
        let extent = &self.target.completion().concepts()[k].extent;
        let parts: Vec<(QVal, usize)> = lifted
            .iter()
            .enumerate()
            .map(|(f, &idx)| {
                (
                    extent.at(f).clone(),
                    self.source.closed_element(idx),
                )
            })
            .collect();
        self.source.completion().colimit_diagram(&parts)
    }

    /// Lift along restricted ideals: the limit of the open elements of the
    /// restrictions, weighted by the intent of `k`. Defined only when the
    /// ideal classes are stable under restriction.
    pub fn right_lift(&self, k: usize) -> Result<usize> {
        let lifted = self.restricted_ideal_indices()?;
        let intent = &self.target.completion().concepts()[k].intent;
        let parts: Vec<(QVal, usize)> = lifted
            .iter()
            .enumerate()
            .map(|(j, &idx)| (intent.at(j).clone(), self.source.open_element(idx)))
            .collect();
        self.source.completion().limit_diagram(&parts)
    }

    /// Both extensions agree with the map on embedded points, on the nose.
    pub fn check_extends_base(&self) -> Result<bool> {
        for c in 0..self.g.source().len() {
            let kc = self.source.embed().apply(c);
            let image = self.target.embed().apply(self.g.apply(c));
            if self.sigma(kc)? != image || self.pi(kc)? != image {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The two adjunctions between lifts and extensions, checked pointwise:
    ///
    /// ```text
    /// Cδ(left_lift k, k') = Dδ(k, pi k')      Dδ(sigma k', k) = Cδ(k', right_lift k)
    /// ```
    ///
    /// for every `k` in the target completion and `k'` in the source one.
    /// Requires both lifts to be defined.
    pub fn check_adjunctions(&self) -> Result<bool> {
        let cs = self.source.completion().space();
        let ds = self.target.completion().space();
        let nc = cs.len();
        let nd = ds.len();
        let left: Vec<usize> = (0..nd).map(|k| self.left_lift(k)).collect::<Result<_>>()?;
        let right: Vec<usize> = (0..nd).map(|k| self.right_lift(k)).collect::<Result<_>>()?;
        let pis: Vec<usize> = (0..nc).map(|k| self.pi(k)).collect::<Result<_>>()?;
        let sigmas: Vec<usize> = (0..nc).map(|k| self.sigma(k)).collect::<Result<_>>()?;
        for k in 0..nd {
            for k2 in 0..nc {
                if cs.hom(left[k], k2) != ds.hom(k, pis[k2]) {
                    return Ok(false);
                }
                if ds.hom(sigmas[k2], k) != cs.hom(k2, right[k]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Even without the adjunctions, the lifts are virtual one-sided inverses
    /// on embedded points: `e ⊑ Cδ(left_lift [Gc], [c])` and
    /// `e ⊑ Cδ([c], right_lift [Gc])`.
    pub fn check_virtual_adjoints(&self) -> Result<bool> {
        let q = self.g.source().quantale();
        let e = q.unit();
        let cs = self.source.completion().space();
        for c in 0..self.g.source().len() {
            let kc = self.source.embed().apply(c);
            let image = self.target.embed().apply(self.g.apply(c));
            if !q.leq(&e, cs.hom(self.left_lift(image)?, kc))? {
                return Ok(false);
            }
            if !q.leq(&e, cs.hom(kc, self.right_lift(image)?))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The left lift does not decrease distances:
    /// `Dδ(k,k') ⊑ Cδ(left_lift k, left_lift k')`.
    pub fn check_lift_functorial(&self) -> Result<bool> {
        let q = self.g.source().quantale();
        let cs = self.source.completion().space();
        let ds = self.target.completion().space();
        let nd = ds.len();
        let left: Vec<usize> = (0..nd).map(|k| self.left_lift(k)).collect::<Result<_>>()?;
        for k in 0..nd {
            for k2 in 0..nd {
                if !q.leq(ds.hom(k, k2), cs.hom(left[k], left[k2]))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}
