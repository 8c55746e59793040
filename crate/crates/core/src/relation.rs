//! Weighted relations between enriched spaces, and (co)presheaves as their
//! arity-one special case.
//!
//! A relation `R: X ⇸ Y` is a matrix of quantale values compatible with both
//! hom actions (a bimodule):
//!
//! ```text
//! X(x',x) · R(x,y) ⊑ R(x',y)        R(x,y) · Y(y,y') ⊑ R(x,y')
//! ```
//!
//! Composition is matrix multiplication over `(⊔, ·)`, with the space homs as
//! identities. Both residuals of composition exist and are computed by the
//! meet formulas
//!
//! ```text
//! (R ▸ T)(y,z) = ⊓_x R(x,y) ▷ T(x,z)         for R: X⇸Y, T: X⇸Z
//! (T ◂ S)(x,y) = ⊓_z T(x,z) ◁ S(y,z)         for T: X⇸Z, S: Y⇸Z
//! ```
//!
//! Presheaves are relations `X ⇸ 1`, copresheaves `1 ⇸ A`, with the one-point
//! space written `*`. The spaces of all of them ([`presheaf_space`],
//! [`copresheaf_space`]) carry the residual homs `φ ▸ φ'` and `ψ ◂ ψ'`; note
//! the underlying order of the copresheaf space is the *reversed* pointwise
//! order.

use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::quantale::QVal;
use crate::space::{FinSpace, Mat};

// ---------------------------------------------------------------------------
// Relations
// ---------------------------------------------------------------------------

/// A validated weighted relation (bimodule) `source ⇸ target`.
#[derive(Clone, PartialEq, Debug)]
pub struct QRel {
    source: Arc<FinSpace>,
    target: Arc<FinSpace>,
    matrix: Mat,
}

/// Checks shapes, carrier membership and both action laws, reporting the
/// first violation in scan order.
pub fn validate_rel(source: &FinSpace, target: &FinSpace, matrix: &Mat) -> Result<()> {
    let q = source.quantale();
    if q != target.quantale() {
        return Err(Error::QuantaleMismatch {
            expected: q.to_string(),
            found: target.quantale().to_string(),
        });
    }
    if matrix.rows() != source.len() || matrix.cols() != target.len() {
        return Err(Error::Shape(format!(
            "relation matrix is {}x{}, expected {}x{}",
            matrix.rows(),
            matrix.cols(),
            source.len(),
            target.len()
        )));
    }
    for i in 0..matrix.rows() {
        for j in 0..matrix.cols() {
            let v = matrix.at(i, j);
            if !q.contains(v) {
                return Err(Error::NotInCarrier { kind: q.to_string(), value: v.to_string() });
            }
        }
    }
    for xp in 0..source.len() {
        for x in 0..source.len() {
            for y in 0..target.len() {
                let acted = q.mul(source.hom(xp, x), matrix.at(x, y))?;
                if !q.leq(&acted, matrix.at(xp, y))? {
                    return Err(Error::Bimodule {
                        side: "left",
                        x: source.points()[xp].clone(),
                        y: source.points()[x].clone(),
                        z: target.points()[y].clone(),
                    });
                }
            }
        }
    }
    for x in 0..source.len() {
        for y in 0..target.len() {
            for yp in 0..target.len() {
                let acted = q.mul(matrix.at(x, y), target.hom(y, yp))?;
                if !q.leq(&acted, matrix.at(x, yp))? {
                    return Err(Error::Bimodule {
                        side: "right",
                        x: source.points()[x].clone(),
                        y: target.points()[y].clone(),
                        z: target.points()[yp].clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

impl QRel {
    pub fn new(source: Arc<FinSpace>, target: Arc<FinSpace>, matrix: Mat) -> Result<QRel> {
        validate_rel(&source, &target, &matrix)?;
        Ok(QRel { source, target, matrix })
    }

    pub(crate) fn new_unchecked(source: Arc<FinSpace>, target: Arc<FinSpace>, matrix: Mat) -> QRel {
        debug_assert!(validate_rel(&source, &target, &matrix).is_ok());
        QRel { source, target, matrix }
    }

    /// The hom matrix of a space as the identity relation `X ⇸ X`.
    pub fn hom_of(x: &Arc<FinSpace>) -> QRel {
        QRel { source: x.clone(), target: x.clone(), matrix: x.hom_mat().clone() }
    }

    pub fn source(&self) -> &Arc<FinSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinSpace> {
        &self.target
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> &QVal {
        self.matrix.at(x, y)
    }

    /// Relational composition `self ● other` via `⊔_y R(x,y)·S(y,z)`.
    pub fn compose(&self, other: &QRel) -> Result<QRel> {
        if self.target != other.source {
            return Err(Error::Shape("composition through mismatched spaces".into()));
        }
        let q = self.source.quantale();
        let (n, m, k) = (self.source.len(), self.target.len(), other.target.len());
        let mut data = Vec::with_capacity(n * k);
        for x in 0..n {
            for z in 0..k {
                let mut acc = q.bottom();
                for y in 0..m {
                    acc = q.join2(&acc, &q.mul(self.at(x, y), other.at(y, z))?)?;
                }
                data.push(acc);
            }
        }
        Ok(QRel::new_unchecked(
            self.source.clone(),
            other.target.clone(),
            Mat::new(n, k, data)?,
        ))
    }

    /// The pointwise order on parallel relations.
    pub fn leq(&self, other: &QRel) -> Result<bool> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape("parallel relations required".into()));
        }
        let q = self.source.quantale();
        for x in 0..self.source.len() {
            for y in 0..self.target.len() {
                if !q.leq(self.at(x, y), other.at(x, y))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Closes an arbitrary matrix of carrier values into a relation by acting
/// with both homs: the result has entries `⊔ X(x,x')·M(x',y')·Y(y',y)` and is
/// the least relation above `M`.
pub fn close_into_rel(source: &Arc<FinSpace>, target: &Arc<FinSpace>, m: &Mat) -> Result<QRel> {
    let q = source.quantale();
    if m.rows() != source.len() || m.cols() != target.len() {
        return Err(Error::Shape(format!(
            "seed matrix is {}x{}, expected {}x{}",
            m.rows(),
            m.cols(),
            source.len(),
            target.len()
        )));
    }
    let mut data = Vec::with_capacity(source.len() * target.len());
    for x in 0..source.len() {
        for y in 0..target.len() {
            let mut acc = q.bottom();
            for xp in 0..source.len() {
                for yp in 0..target.len() {
                    let prod =
                        q.mul(&q.mul(source.hom(x, xp), m.at(xp, yp))?, target.hom(yp, y))?;
                    acc = q.join2(&acc, &prod)?;
                }
            }
            data.push(acc);
        }
    }
    QRel::new(source.clone(), target.clone(), Mat::new(source.len(), target.len(), data)?)
}

/// Right residual `R ▸ T : Y ⇸ Z` of composition, largest `S` with `R●S ⊑ T`.
pub fn rres_rel(r: &QRel, t: &QRel) -> Result<QRel> {
    if r.source != t.source {
        return Err(Error::Shape("residual needs relations out of the same space".into()));
    }
    let q = r.source.quantale();
    let (m, k) = (r.target.len(), t.target.len());
    let mut data = Vec::with_capacity(m * k);
    for y in 0..m {
        for z in 0..k {
            let mut acc = q.top();
            for x in 0..r.source.len() {
                acc = q.meet2(&acc, &q.rres(r.at(x, y), t.at(x, z))?)?;
            }
            data.push(acc);
        }
    }
    Ok(QRel::new_unchecked(r.target.clone(), t.target.clone(), Mat::new(m, k, data)?))
}

/// Left residual `T ◂ S : X ⇸ Y` of composition, largest `R` with `R●S ⊑ T`.
pub fn lres_rel(t: &QRel, s: &QRel) -> Result<QRel> {
    if t.target != s.target {
        return Err(Error::Shape("residual needs relations into the same space".into()));
    }
    let q = t.source.quantale();
    let (n, m) = (t.source.len(), s.source.len());
    let mut data = Vec::with_capacity(n * m);
    for x in 0..n {
        for y in 0..m {
            let mut acc = q.top();
            for z in 0..t.target.len() {
                acc = q.meet2(&acc, &q.lres(t.at(x, z), s.at(y, z))?)?;
            }
            data.push(acc);
        }
    }
    Ok(QRel::new_unchecked(t.source.clone(), s.source.clone(), Mat::new(n, m, data)?))
}

// ---------------------------------------------------------------------------
// Presheaves and copresheaves
// ---------------------------------------------------------------------------

/// A presheaf on `X`: a vector with `X(x',x)·φ(x) ⊑ φ(x')` (a relation `X ⇸ *`).
#[derive(Clone, PartialEq, Debug)]
pub struct Presheaf {
    space: Arc<FinSpace>,
    vals: Vec<QVal>,
}

impl Presheaf {
    pub fn new(space: Arc<FinSpace>, vals: Vec<QVal>) -> Result<Presheaf> {
        let q = space.quantale();
        if vals.len() != space.len() {
            return Err(Error::Shape(format!(
                "presheaf has {} values, space has {} points",
                vals.len(),
                space.len()
            )));
        }
        for v in &vals {
            if !q.contains(v) {
                return Err(Error::NotInCarrier { kind: q.to_string(), value: v.to_string() });
            }
        }
        for xp in 0..vals.len() {
            for x in 0..vals.len() {
                if !q.leq(&q.mul(space.hom(xp, x), &vals[x])?, &vals[xp])? {
                    return Err(Error::PresheafLaw {
                        x: space.points()[xp].clone(),
                        y: space.points()[x].clone(),
                    });
                }
            }
        }
        Ok(Presheaf { space, vals })
    }

    pub fn space(&self) -> &Arc<FinSpace> {
        &self.space
    }

    pub fn vals(&self) -> &[QVal] {
        &self.vals
    }

    #[inline]
    pub fn at(&self, x: usize) -> &QVal {
        &self.vals[x]
    }

    /// As a relation `X ⇸ *`.
    pub fn to_rel(&self) -> QRel {
        let one = FinSpace::one_point(self.space.quantale().clone());
        QRel::new_unchecked(
            self.space.clone(),
            one,
            Mat::new(self.vals.len(), 1, self.vals.clone()).unwrap(),
        )
    }

    pub fn from_rel(r: &QRel) -> Result<Presheaf> {
        if r.target().len() != 1 {
            return Err(Error::Shape("presheaves are relations into the one-point space".into()));
        }
        Presheaf::new(r.source().clone(), r.matrix().col(0))
    }

    /// The presheaf-space distance `φ ▸ φ' = ⊓_x φ(x) ▷ φ'(x)`.
    pub fn hom_to(&self, other: &Presheaf) -> Result<QVal> {
        if self.space != other.space {
            return Err(Error::Shape("presheaves on different spaces".into()));
        }
        let q = self.space.quantale();
        let mut acc = q.top();
        for x in 0..self.vals.len() {
            acc = q.meet2(&acc, &q.rres(&self.vals[x], &other.vals[x])?)?;
        }
        Ok(acc)
    }
}

/// A copresheaf on `A`: a vector with `ψ(a)·A(a,a') ⊑ ψ(a')` (a relation `* ⇸ A`).
#[derive(Clone, PartialEq, Debug)]
pub struct Copresheaf {
    space: Arc<FinSpace>,
    vals: Vec<QVal>,
}

impl Copresheaf {
    pub fn new(space: Arc<FinSpace>, vals: Vec<QVal>) -> Result<Copresheaf> {
        let q = space.quantale();
        if vals.len() != space.len() {
            return Err(Error::Shape(format!(
                "copresheaf has {} values, space has {} points",
                vals.len(),
                space.len()
            )));
        }
        for v in &vals {
            if !q.contains(v) {
                return Err(Error::NotInCarrier { kind: q.to_string(), value: v.to_string() });
            }
        }
        for a in 0..vals.len() {
            for ap in 0..vals.len() {
                if !q.leq(&q.mul(&vals[a], space.hom(a, ap))?, &vals[ap])? {
                    return Err(Error::CopresheafLaw {
                        x: space.points()[a].clone(),
                        y: space.points()[ap].clone(),
                    });
                }
            }
        }
        Ok(Copresheaf { space, vals })
    }

    pub fn space(&self) -> &Arc<FinSpace> {
        &self.space
    }

    pub fn vals(&self) -> &[QVal] {
        &self.vals
    }

    #[inline]
    pub fn at(&self, a: usize) -> &QVal {
        &self.vals[a]
    }

    /// As a relation `* ⇸ A`.
    pub fn to_rel(&self) -> QRel {
        let one = FinSpace::one_point(self.space.quantale().clone());
        QRel::new_unchecked(
            one,
            self.space.clone(),
            Mat::new(1, self.vals.len(), self.vals.clone()).unwrap(),
        )
    }

    pub fn from_rel(r: &QRel) -> Result<Copresheaf> {
        if r.source().len() != 1 {
            return Err(Error::Shape("copresheaves are relations out of the one-point space".into()));
        }
        Copresheaf::new(r.target().clone(), r.matrix().row(0).to_vec())
    }

    /// The copresheaf-space distance `ψ ◂ ψ' = ⊓_a ψ(a) ◁ ψ'(a)`.
    pub fn hom_to(&self, other: &Copresheaf) -> Result<QVal> {
        if self.space != other.space {
            return Err(Error::Shape("copresheaves on different spaces".into()));
        }
        let q = self.space.quantale();
        let mut acc = q.top();
        for a in 0..self.vals.len() {
            acc = q.meet2(&acc, &q.lres(&self.vals[a], &other.vals[a])?)?;
        }
        Ok(acc)
    }
}

/// The representable presheaf `X(-,x)` (column `x` of the hom).
pub fn yoneda_down(x: &Arc<FinSpace>, point: usize) -> Presheaf {
    Presheaf { space: x.clone(), vals: x.hom_mat().col(point) }
}

/// The representable copresheaf `A(a,-)` (row `a` of the hom).
pub fn yoneda_up(a: &Arc<FinSpace>, point: usize) -> Copresheaf {
    Copresheaf { space: a.clone(), vals: a.hom_mat().row(point).to_vec() }
}

// ---------------------------------------------------------------------------
// Enumeration and the (co)presheaf spaces
// ---------------------------------------------------------------------------

/// All vectors in `carrier^points` in lexicographic order (first point most
/// significant), filtered by `keep`.
pub(crate) fn enumerate_vectors(
    x: &FinSpace,
    budget_cap: u128,
    task: &str,
    mut keep: impl FnMut(&[QVal]) -> Result<bool>,
) -> Result<Vec<Vec<QVal>>> {
    let q = x.quantale();
    let carrier = q.carrier()?;
    let n = x.len();
    let count = (carrier.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    Budget::guard(task, count, budget_cap)?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let vec: Vec<QVal> = idx.iter().map(|&i| carrier[i].clone()).collect();
        if keep(&vec)? {
            out.push(vec);
        }
        // odometer, last coordinate fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < carrier.len() {
                break;
            }
            idx[pos] = 0;
        }
        if n == 0 {
            return Ok(out); // single empty vector already emitted
        }
    }
}

/// All presheaves on `x`, in the vector enumeration order.
pub fn enumerate_presheaves(x: &Arc<FinSpace>, budget: &Budget) -> Result<Vec<Presheaf>> {
    let q = x.quantale().clone();
    let vecs = enumerate_vectors(x, budget.vector_enum, "presheaf enumeration", |v| {
        for xp in 0..v.len() {
            for xx in 0..v.len() {
                if !q.leq(&q.mul(x.hom(xp, xx), &v[xx])?, &v[xp])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })?;
    Ok(vecs.into_iter().map(|vals| Presheaf { space: x.clone(), vals }).collect())
}

/// All copresheaves on `a`, in the vector enumeration order.
pub fn enumerate_copresheaves(a: &Arc<FinSpace>, budget: &Budget) -> Result<Vec<Copresheaf>> {
    let q = a.quantale().clone();
    let vecs = enumerate_vectors(a, budget.vector_enum, "copresheaf enumeration", |v| {
        for i in 0..v.len() {
            for j in 0..v.len() {
                if !q.leq(&q.mul(&v[i], a.hom(i, j))?, &v[j])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    })?;
    Ok(vecs.into_iter().map(|vals| Copresheaf { space: a.clone(), vals }).collect())
}

pub(crate) fn tuple_name(vals: &[QVal]) -> String {
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

/// The space of all presheaves on `x` with hom `φ ▸ φ'`, plus the presheaves
/// themselves in point order.
pub fn presheaf_space(
    x: &Arc<FinSpace>,
    budget: &Budget,
) -> Result<(Arc<FinSpace>, Vec<Presheaf>)> {
    let sheaves = enumerate_presheaves(x, budget)?;
    let n = sheaves.len();
    Budget::guard("presheaf space hom matrix", (n as u128) * (n as u128), budget.vector_enum)?;
    let points: Vec<String> = sheaves.iter().map(|p| tuple_name(p.vals())).collect();
    let mut data = Vec::with_capacity(n * n);
    for p in &sheaves {
        for pp in &sheaves {
            data.push(p.hom_to(pp)?);
        }
    }
    let space = FinSpace::new(x.quantale().clone(), points, Mat::new(n, n, data)?)?;
    Ok((space, sheaves))
}

/// The space of all copresheaves on `a` with hom `ψ ◂ ψ'`, plus the
/// copresheaves themselves in point order. Its underlying order is the
/// reversed pointwise order.
pub fn copresheaf_space(
    a: &Arc<FinSpace>,
    budget: &Budget,
) -> Result<(Arc<FinSpace>, Vec<Copresheaf>)> {
    let sheaves = enumerate_copresheaves(a, budget)?;
    let n = sheaves.len();
    Budget::guard("copresheaf space hom matrix", (n as u128) * (n as u128), budget.vector_enum)?;
    let points: Vec<String> = sheaves.iter().map(|p| tuple_name(p.vals())).collect();
    let mut data = Vec::with_capacity(n * n);
    for p in &sheaves {
        for pp in &sheaves {
            data.push(p.hom_to(pp)?);
        }
    }
    let space = FinSpace::new(a.quantale().clone(), points, Mat::new(n, n, data)?)?;
    Ok((space, sheaves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::Quantale;
    use crate::space::validate_space;

    fn bool2_space(rows: Vec<Vec<u8>>) -> Arc<FinSpace> {
        let q = Arc::new(Quantale::bool2());
        let names = (0..rows.len()).map(|i| format!("p{i}")).collect();
        let mat = Mat::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(|b| QVal::Bool(b == 1)).collect()).collect(),
        )
        .unwrap();
        FinSpace::new(q, names, mat).unwrap()
    }

    #[test]
    fn composition_works_tropically() {
        let q = Arc::new(Quantale::lawvere(10));
        let x = FinSpace::discrete(q.clone(), vec!["x"]);
        let y = FinSpace::discrete(q.clone(), vec!["y0", "y1"]);
        let z = FinSpace::discrete(q.clone(), vec!["z"]);
        let r = QRel::new(
            x.clone(),
            y.clone(),
            Mat::from_rows(vec![vec![QVal::Nat(2), QVal::Nat(5)]]).unwrap(),
        )
        .unwrap();
        let s = QRel::new(
            y,
            z,
            Mat::from_rows(vec![vec![QVal::Nat(3)], vec![QVal::Nat(1)]]).unwrap(),
        )
        .unwrap();
        let comp = r.compose(&s).unwrap();
        // min(2+3, 5+1) = 5
        assert_eq!(comp.at(0, 0), &QVal::Nat(5));
    }

    #[test]
    fn homs_are_identities_for_composition() {
        let x = bool2_space(vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 1, 1]]);
        let y = bool2_space(vec![vec![1, 0], vec![1, 1]]);
        let seed = Mat::from_rows(vec![
            vec![QVal::Bool(false), QVal::Bool(true)],
            vec![QVal::Bool(false), QVal::Bool(false)],
            vec![QVal::Bool(true), QVal::Bool(false)],
        ])
        .unwrap();
        let r = close_into_rel(&x, &y, &seed).unwrap();
        assert!(seed.to_rows().iter().flatten().any(|v| v == &QVal::Bool(true)));
        assert_eq!(QRel::hom_of(&x).compose(&r).unwrap().matrix(), r.matrix());
        assert_eq!(r.compose(&QRel::hom_of(&y)).unwrap().matrix(), r.matrix());
    }

    #[test]
    fn right_residual_on_bool2_is_pointwise_implication_meet() {
        let q = Arc::new(Quantale::bool2());
        let x = FinSpace::discrete(q.clone(), vec!["x0", "x1"]);
        let y = FinSpace::discrete(q.clone(), vec!["y"]);
        let z = FinSpace::discrete(q.clone(), vec!["z"]);
        let r = QRel::new(
            x.clone(),
            y,
            Mat::from_rows(vec![vec![QVal::Bool(true)], vec![QVal::Bool(false)]]).unwrap(),
        )
        .unwrap();
        let t = QRel::new(
            x,
            z,
            Mat::from_rows(vec![vec![QVal::Bool(true)], vec![QVal::Bool(true)]]).unwrap(),
        )
        .unwrap();
        let res = rres_rel(&r, &t).unwrap();
        assert_eq!(res.at(0, 0), &QVal::Bool(true));
    }

    #[test]
    fn residuals_satisfy_the_triple_adjunction_on_a_small_sweep() {
        // exhaustive over all bimodules between two discrete 2-point Bool2 spaces
        let q = Arc::new(Quantale::bool2());
        let x = FinSpace::discrete(q.clone(), vec!["x0", "x1"]);
        let y = FinSpace::discrete(q.clone(), vec!["y0", "y1"]);
        let z = FinSpace::discrete(q.clone(), vec!["z0"]);
        let rels = |s: &Arc<FinSpace>, t: &Arc<FinSpace>| -> Vec<QRel> {
            let cells = s.len() * t.len();
            (0..1u32 << cells)
                .map(|mask| {
                    let data: Vec<QVal> =
                        (0..cells).map(|i| QVal::Bool(mask >> i & 1 == 1)).collect();
                    QRel::new(s.clone(), t.clone(), Mat::new(s.len(), t.len(), data).unwrap())
                        .unwrap()
                })
                .collect()
        };
        for r in rels(&x, &y) {
            for t in rels(&x, &z) {
                for s in rels(&y, &z) {
                    let lhs = s.leq(&rres_rel(&r, &t).unwrap()).unwrap();
                    let mid = r.compose(&s).unwrap().leq(&t).unwrap();
                    let rhs = r.leq(&lres_rel(&t, &s).unwrap()).unwrap();
                    assert_eq!(lhs, mid);
                    assert_eq!(mid, rhs);
                }
            }
        }
    }

    #[test]
    fn presheaves_on_the_two_chain() {
        let chain = bool2_space(vec![vec![1, 1], vec![0, 1]]);
        let ps = enumerate_presheaves(&chain, &Budget::default()).unwrap();
        let vals: Vec<Vec<QVal>> = ps.iter().map(|p| p.vals().to_vec()).collect();
        assert_eq!(
            vals,
            vec![
                vec![QVal::Bool(false), QVal::Bool(false)],
                vec![QVal::Bool(true), QVal::Bool(false)],
                vec![QVal::Bool(true), QVal::Bool(true)],
            ]
        );
        // and the law rejects the upward-closed-only vector
        assert!(Presheaf::new(chain, vec![QVal::Bool(false), QVal::Bool(true)]).is_err());
    }

    #[test]
    fn presheaf_space_hom_on_a_point_is_the_residual_table() {
        let q = Arc::new(Quantale::similarity(1));
        let pt = FinSpace::one_point(q.clone());
        let (dx, sheaves) = presheaf_space(&pt, &Budget::default()).unwrap();
        assert_eq!(dx.len(), 3);
        for (i, p) in sheaves.iter().enumerate() {
            for (j, pp) in sheaves.iter().enumerate() {
                assert_eq!(dx.hom(i, j), &q.rres(p.at(0), pp.at(0)).unwrap());
            }
        }
        assert!(validate_space(dx.quantale(), dx.points(), dx.hom_mat()).is_ok());
    }

    #[test]
    fn yoneda_lemma_on_the_nose() {
        // 𝒟X(X(-,x), φ) = φ(x) for every presheaf φ, representable or not
        let spaces = vec![
            bool2_space(vec![vec![1, 1, 1], vec![0, 1, 1], vec![0, 0, 1]]),
            {
                let q = Arc::new(Quantale::similarity(2));
                FinSpace::new(
                    q,
                    vec!["u".into(), "v".into()],
                    Mat::from_rows(vec![
                        vec![QVal::Inf, QVal::Nat(1)],
                        vec![QVal::Nat(2), QVal::Inf],
                    ])
                    .unwrap(),
                )
                .unwrap()
            },
        ];
        for x in spaces {
            let all = enumerate_presheaves(&x, &Budget::default()).unwrap();
            for point in 0..x.len() {
                let rep = yoneda_down(&x, point);
                // representables really are presheaves
                assert!(Presheaf::new(x.clone(), rep.vals().to_vec()).is_ok());
                for phi in &all {
                    assert_eq!(rep.hom_to(phi).unwrap(), *phi.at(point));
                }
            }
        }
    }

    #[test]
    fn coyoneda_for_copresheaves() {
        // 𝒰A(ψ, A(a,-)) = ψ(a)
        let a = bool2_space(vec![vec![1, 1], vec![0, 1]]);
        let all = enumerate_copresheaves(&a, &Budget::default()).unwrap();
        for point in 0..a.len() {
            let rep = yoneda_up(&a, point);
            assert!(Copresheaf::new(a.clone(), rep.vals().to_vec()).is_ok());
            for psi in &all {
                assert_eq!(psi.hom_to(&rep).unwrap(), *psi.at(point));
            }
        }
    }

    #[test]
    fn copresheaf_space_order_is_reversed_pointwise() {
        let q = Arc::new(Quantale::bool2());
        let a = FinSpace::discrete(q.clone(), vec!["a0", "a1"]);
        let (ua, sheaves) = copresheaf_space(&a, &Budget::default()).unwrap();
        let ord = ua.underlying_order();
        for (i, p) in sheaves.iter().enumerate() {
            for (j, pp) in sheaves.iter().enumerate() {
                let pointwise_geq = (0..a.len()).all(|k| {
                    q.leq(pp.at(k), p.at(k)).unwrap()
                });
                assert_eq!(ord.leq[i][j], pointwise_geq);
            }
        }
    }

    #[test]
    fn presheaf_round_trips_through_relations() {
        let chain = bool2_space(vec![vec![1, 1], vec![0, 1]]);
        let phi = Presheaf::new(chain.clone(), vec![QVal::Bool(true), QVal::Bool(false)]).unwrap();
        let back = Presheaf::from_rel(&phi.to_rel()).unwrap();
        assert_eq!(back, phi);
        let psi = Copresheaf::new(chain, vec![QVal::Bool(false), QVal::Bool(true)]).unwrap();
        assert_eq!(Copresheaf::from_rel(&psi.to_rel()).unwrap(), psi);
    }

    #[test]
    fn residual_exchange_between_presheaf_and_copresheaf_weights() {
        // 𝒟X(φ, I ◂ ψ) = 𝒰A(φ ▸ I, ψ) for every φ, ψ over a fixed bimodule I
        let x = bool2_space(vec![vec![1, 1], vec![0, 1]]);
        let a = bool2_space(vec![vec![1, 0], vec![1, 1]]);
        // a valid bimodule X ⇸ A: close a seed under both actions
        let seed = Mat::from_rows(vec![
            vec![QVal::Bool(true), QVal::Bool(false)],
            vec![QVal::Bool(false), QVal::Bool(false)],
        ])
        .unwrap();
        let i = close_into_rel(&x, &a, &seed).unwrap();
        let budget = Budget::default();
        for phi in enumerate_presheaves(&x, &budget).unwrap() {
            for psi in enumerate_copresheaves(&a, &budget).unwrap() {
                let up = Copresheaf::from_rel(&rres_rel(&phi.to_rel(), &i).unwrap()).unwrap();
                let down = Presheaf::from_rel(&lres_rel(&i, &psi.to_rel()).unwrap()).unwrap();
                assert_eq!(phi.hom_to(&down).unwrap(), up.hom_to(&psi).unwrap());
            }
        }
    }

    #[test]
    fn double_residual_collapses_composition() {
        // R' ▸ (R ▸ T) = (R ● R') ▸ T on a hand instance over the tropical chain
        let q = Arc::new(Quantale::lawvere(8));
        let x = FinSpace::discrete(q.clone(), vec!["x"]);
        let y = FinSpace::discrete(q.clone(), vec!["y0", "y1"]);
        let yp = FinSpace::discrete(q.clone(), vec!["w"]);
        let z = FinSpace::discrete(q.clone(), vec!["z0", "z1"]);
        let r = QRel::new(
            x.clone(),
            y.clone(),
            Mat::from_rows(vec![vec![QVal::Nat(1), QVal::Nat(4)]]).unwrap(),
        )
        .unwrap();
        let rp = QRel::new(
            y,
            yp.clone(),
            Mat::from_rows(vec![vec![QVal::Nat(2)], vec![QVal::Nat(0)]]).unwrap(),
        )
        .unwrap();
        let t = QRel::new(
            x,
            z,
            Mat::from_rows(vec![vec![QVal::Nat(3), QVal::Nat(7)]]).unwrap(),
        )
        .unwrap();
        let lhs = rres_rel(&rp, &rres_rel(&r, &t).unwrap()).unwrap();
        let rhs = rres_rel(&r.compose(&rp).unwrap(), &t).unwrap();
        assert_eq!(lhs.matrix(), rhs.matrix());
    }
}
