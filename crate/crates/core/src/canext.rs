//! Canonical extension of a space relative to chosen weight classes.
//!
//! Pick a class `F` of copresheaves on `C` (the "filters") and a class `J`
//! of presheaves (the "ideals"), and form the *intermediate context* on the
//! discrete sets `F` and `J`:
//!
//! ```text
//! I(f, j) = ⊔_c f(c)·j(c)
//! ```
//!
//! The extension `C^δ` is the completion of that context. `C` sits inside it
//! by `[c] = (f ↦ f(c), j ↦ j(c))` — a concept as soon as both classes
//! contain the representable weights, which all three stock classes do. The
//! closed elements are the embedded filters, the open elements the embedded
//! ideals, and between them the hom is `I` again (*compactness*); every point
//! is a colimit of closed elements and a limit of open ones (*density*).
//!
//! The stock classes: [`ClassSpec::All`] (every weight),
//! [`ClassSpec::Representables`] (one per point, no dedup), and
//! [`ClassSpec::FinLimPreserving`] (weights sending the space's
//! [`Battery::finite`] (co)limits to (co)limits in the quantale — for
//! copresheaves that reads `f(lim) = ⊓ f(G d) ◁ ψ(d)`, for presheaves
//! `j(colim) = ⊓ φ(d) ▷ j(G d)`).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::limits::{
    copresheaf_sends_limit, map_preserves_colimit, map_preserves_limit, pairing,
    presheaf_sends_colimit, Battery,
};
use crate::macneille::Completion;
use crate::quantale::QVal;
use crate::relation::{
    enumerate_copresheaves, enumerate_presheaves, yoneda_down, yoneda_up, Copresheaf, Presheaf,
    QRel,
};
use crate::space::{FinSpace, Mat, SpaceMap};

/// Which copresheaves (resp. presheaves) on the base space form the filter
/// (resp. ideal) side of the intermediate context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ClassSpec {
    All,
    Representables,
    FinLimPreserving,
}

impl std::fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassSpec::All => write!(f, "all"),
            ClassSpec::Representables => write!(f, "representables"),
            ClassSpec::FinLimPreserving => write!(f, "finLimPreserving"),
        }
    }
}

/// The filter class on `c` given by `spec`, in a fixed deterministic order.
pub fn filters(c: &Arc<FinSpace>, spec: ClassSpec, budget: &Budget) -> Result<Vec<Copresheaf>> {
    match spec {
        ClassSpec::All => enumerate_copresheaves(c, budget),
        ClassSpec::Representables => Ok((0..c.len()).map(|p| yoneda_up(c, p)).collect()),
        ClassSpec::FinLimPreserving => {
            let instances = Battery::finite().limit_instances(c, budget)?;
            let mut out = Vec::new();
            for f in enumerate_copresheaves(c, budget)? {
                let mut keep = true;
                for li in &instances {
                    if !copresheaf_sends_limit(&f, li)? {
                        keep = false;
                        break;
                    }
                }
                if keep {
                    out.push(f);
                }
            }
            Ok(out)
        }
    }
}

/// The ideal class on `c` given by `spec`; the finitary variant asks for
/// colimits to be sent to limits.
pub fn ideals(c: &Arc<FinSpace>, spec: ClassSpec, budget: &Budget) -> Result<Vec<Presheaf>> {
    match spec {
        ClassSpec::All => enumerate_presheaves(c, budget),
        ClassSpec::Representables => Ok((0..c.len()).map(|p| yoneda_down(c, p)).collect()),
        ClassSpec::FinLimPreserving => {
            let instances = Battery::finite().colimit_instances(c, budget)?;
            let mut out = Vec::new();
            for j in enumerate_presheaves(c, budget)? {
                let mut keep = true;
                for ci in &instances {
                    if !presheaf_sends_colimit(&j, ci)? {
                        keep = false;
                        break;
                    }
                }
                if keep {
                    out.push(j);
                }
            }
            Ok(out)
        }
    }
}

/// Result of probing whether the unit embedding preserves one battery
/// instance.
#[derive(Clone, Debug, PartialEq)]
pub struct PreservationOutcome {
    pub label: String,
    pub preserved: bool,
}

/// The canonical extension `C^δ` together with its classes and embedding.
#[derive(Clone, Debug)]
pub struct CanExt {
    base: Arc<FinSpace>,
    filter_class: ClassSpec,
    ideal_class: ClassSpec,
    filters: Vec<Copresheaf>,
    ideals: Vec<Presheaf>,
    context: QRel,
    completion: Completion,
    embed: SpaceMap,
}

impl CanExt {
    pub fn new(
        base: &Arc<FinSpace>,
        filter_class: ClassSpec,
        ideal_class: ClassSpec,
        budget: &Budget,
    ) -> Result<CanExt> {
        let fs = filters(base, filter_class, budget)?;
        let js = ideals(base, ideal_class, budget)?;
        let q = base.quantale().clone();
        let fspace =
            FinSpace::discrete(q.clone(), (0..fs.len()).map(|k| format!("f{k}")).collect());
        let jspace =
            FinSpace::discrete(q.clone(), (0..js.len()).map(|k| format!("j{k}")).collect());
        let mut data = Vec::with_capacity(fs.len() * js.len());
        for f in &fs {
            for j in &js {
                data.push(pairing(f, j)?);
            }
        }
        let context =
            QRel::new(fspace.clone(), jspace, Mat::new(fs.len(), js.len(), data)?)?;
        let completion = Completion::new(context.clone(), budget)?;
        let mut embed_idx = Vec::with_capacity(base.len());
        for c in 0..base.len() {
            let ext: Vec<QVal> = fs.iter().map(|f| f.at(c).clone()).collect();
            let k = completion.index_of_extent(&ext).ok_or_else(|| {
                Error::Shape(format!(
                    "point {} does not embed: its filter profile is not a concept",
                    base.points()[c]
                ))
            })?;
            embed_idx.push(k);
        }
        let embed = SpaceMap::new(base.clone(), completion.space().clone(), embed_idx)?;
        embed.check_functor()?;
        Ok(CanExt {
            base: base.clone(),
            filter_class,
            ideal_class,
            filters: fs,
            ideals: js,
            context,
            completion,
            embed,
        })
    }

    pub fn base(&self) -> &Arc<FinSpace> {
        &self.base
    }

    pub fn filter_class(&self) -> ClassSpec {
        self.filter_class
    }

    pub fn ideal_class(&self) -> ClassSpec {
        self.ideal_class
    }

    pub fn filters(&self) -> &[Copresheaf] {
        &self.filters
    }

    pub fn ideals(&self) -> &[Presheaf] {
        &self.ideals
    }

    /// The intermediate context on the discrete filter and ideal sets.
    pub fn context(&self) -> &QRel {
        &self.context
    }

    /// The extension itself, as a completion of the intermediate context.
    pub fn completion(&self) -> &Completion {
        &self.completion
    }

    /// The unit `C → C^δ`, `c ↦ [c]`.
    pub fn embed(&self) -> &SpaceMap {
        &self.embed
    }

    /// The closed element `f̄` of a filter: the source-side embedding of the
    /// intermediate context.
    pub fn closed_element(&self, f: usize) -> usize {
        self.completion.lower().apply(f)
    }

    /// The open element `j̄` of an ideal: the target-side embedding.
    pub fn open_element(&self, j: usize) -> usize {
        self.completion.upper().apply(j)
    }

    /// Compactness: `C^δ(f̄, j̄) = I(f,j) = ⊔_c f(c)·j(c)` for every pair.
    pub fn check_compactness(&self) -> Result<bool> {
        let space = self.completion.space();
        for f in 0..self.filters.len() {
            for j in 0..self.ideals.len() {
                if space.hom(self.closed_element(f), self.open_element(j))
                    != self.context.at(f, j)
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Density: every point of the extension is the colimit of the closed
    /// elements weighted by its extent, and the limit of the open elements
    /// weighted by its intent.
    pub fn check_density(&self) -> Result<bool> {
        for (k, concept) in self.completion.concepts().iter().enumerate() {
            if self.completion.colimit(&concept.extent)? != k {
                return Ok(false);
            }
            if self.completion.limit(&concept.intent)? != k {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The unit is fully faithful as soon as the classes contain the
    /// representables: `C^δ([c],[c']) = C(c,c')`.
    pub fn check_embedding_distances(&self) -> Result<bool> {
        let space = self.completion.space();
        for c in 0..self.base.len() {
            for cp in 0..self.base.len() {
                if space.hom(self.embed.apply(c), self.embed.apply(cp)) != self.base.hom(c, cp) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The two evaluation identities of the intermediate context:
    /// `I(C(c,-), j) = j(c)` and `I(f, C(-,c)) = f(c)`.
    pub fn check_intermediate_yoneda(&self) -> Result<bool> {
        for c in 0..self.base.len() {
            let row = yoneda_up(&self.base, c);
            for j in &self.ideals {
                if &pairing(&row, j)? != j.at(c) {
                    return Ok(false);
                }
            }
            let col = yoneda_down(&self.base, c);
            for f in &self.filters {
                if &pairing(f, &col)? != f.at(c) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// For each battery (co)limit the base space possesses, does the unit
    /// embedding carry it to a (co)limit of the extension? Reports one
    /// labelled outcome per instance; failures are meaningful (the `All`
    /// classes genuinely break meet preservation, for example).
    pub fn check_embedding_preservation(
        &self,
        battery: Battery,
        budget: &Budget,
    ) -> Result<(Vec<PreservationOutcome>, Vec<PreservationOutcome>)> {
        let mut lims = Vec::new();
        for li in battery.limit_instances(&self.base, budget)? {
            lims.push(PreservationOutcome {
                preserved: map_preserves_limit(&self.embed, &li)?,
                label: li.label,
            });
        }
        let mut colims = Vec::new();
        for ci in battery.colimit_instances(&self.base, budget)? {
            colims.push(PreservationOutcome {
                preserved: map_preserves_colimit(&self.embed, &ci)?,
                label: ci.label,
            });
        }
        Ok((lims, colims))
    }
}
