//! Finite spaces enriched in a quantale.
//!
//! A space `X` assigns to every ordered pair of points a distance
//! `X(x,y) ∈ Ω` subject to
//!
//! ```text
//! e ⊑ X(x,x)                       (reflexivity)
//! X(x,y) · X(y,z) ⊑ X(x,z)         (transitivity)
//! ```
//!
//! Over `bool2` these are preorders, over the tropical chain generalized
//! metric spaces, over languages "automata" whose hom entries are the words
//! labelling paths. Validation is eager: constructors reject invalid data with
//! the first violating witness, so a constructed value is always lawful.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quantale::{QVal, Quantale};

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// A dense row-major matrix of quantale values.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<QVal>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<QVal>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<QVal>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("matrix rows have unequal lengths".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Constant matrix filled with one value.
    pub fn fill(rows: usize, cols: usize, v: QVal) -> Self {
        Mat { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> &QVal {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: QVal) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[QVal] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<QVal> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.at(i, j).clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, data }
    }

    pub fn to_rows(&self) -> Vec<Vec<QVal>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

// ---------------------------------------------------------------------------
// Spaces
// ---------------------------------------------------------------------------

/// A validated finite enriched space. Shared behind `Arc`.
#[derive(Clone, PartialEq, Debug)]
pub struct FinSpace {
    q: Arc<Quantale>,
    points: Vec<String>,
    hom: Mat,
}

/// Checks the reflexivity and transitivity laws, returning the first
/// violation in scan order (points ascending; triples lexicographic).
pub fn validate_space(q: &Quantale, points: &[String], hom: &Mat) -> Result<()> {
    let n = points.len();
    if hom.rows() != n || hom.cols() != n {
        return Err(Error::Shape(format!(
            "hom matrix is {}x{}, expected {n}x{n}",
            hom.rows(),
            hom.cols()
        )));
    }
    {
        let mut sorted = points.to_vec();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != n {
            return Err(Error::Shape("duplicate point names".into()));
        }
    }
    for v in 0..n * n {
        let (i, j) = (v / n, v % n);
        let val = hom.at(i, j);
        if !q.contains(val) {
            return Err(Error::NotInCarrier { kind: q.to_string(), value: val.to_string() });
        }
    }
    let e = q.unit();
    for x in 0..n {
        if !q.leq(&e, hom.at(x, x))? {
            return Err(Error::Reflexivity { point: points[x].clone() });
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let comp = q.mul(hom.at(x, y), hom.at(y, z))?;
                if !q.leq(&comp, hom.at(x, z))? {
                    return Err(Error::Transitivity {
                        x: points[x].clone(),
                        y: points[y].clone(),
                        z: points[z].clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

impl FinSpace {
    /// Validating constructor.
    pub fn new(q: Arc<Quantale>, points: Vec<String>, hom: Mat) -> Result<Arc<FinSpace>> {
        validate_space(&q, &points, &hom)?;
        Ok(Arc::new(FinSpace { q, points, hom }))
    }

    /// The discrete space: unit on the diagonal, bottom elsewhere.
    pub fn discrete<S: Into<String>>(q: Arc<Quantale>, names: Vec<S>) -> Arc<FinSpace> {
        let points: Vec<String> = names.into_iter().map(Into::into).collect();
        let n = points.len();
        let mut hom = Mat::fill(n, n, q.bottom());
        for i in 0..n {
            hom.set(i, i, q.unit());
        }
        Arc::new(FinSpace { q, points, hom })
    }

    /// The one-point space `1` whose single point is called `*`.
    pub fn one_point(q: Arc<Quantale>) -> Arc<FinSpace> {
        FinSpace::discrete(q, vec!["*"])
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.q
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hom_mat(&self) -> &Mat {
        &self.hom
    }

    #[inline]
    pub fn hom(&self, x: usize, y: usize) -> &QVal {
        self.hom.at(x, y)
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    /// True when every off-diagonal hom is the bottom and the diagonal is the unit.
    pub fn is_discrete(&self) -> bool {
        let e = self.q.unit();
        let bot = self.q.bottom();
        (0..self.len()).all(|i| {
            (0..self.len()).all(|j| {
                if i == j {
                    *self.hom(i, j) == e
                } else {
                    *self.hom(i, j) == bot
                }
            })
        })
    }

    /// Same points, hom transposed, over the opposite quantale.
    pub fn opposite(&self) -> Arc<FinSpace> {
        Arc::new(FinSpace {
            q: Arc::new(self.q.opposite()),
            points: self.points.clone(),
            hom: self.hom.transpose(),
        })
    }

    /// The induced preorder `x ≤ y ⇔ e ⊑ X(x,y)` plus a skeletality verdict.
    pub fn underlying_order(&self) -> OrderReport {
        let n = self.len();
        let e = self.q.unit();
        let mut leq = vec![vec![false; n]; n];
        for x in 0..n {
            for y in 0..n {
                leq[x][y] = self.q.leq(&e, self.hom(x, y)).expect("validated entries");
            }
        }
        let mut skeletal = true;
        'outer: for x in 0..n {
            for y in 0..n {
                if x != y && leq[x][y] && leq[y][x] {
                    skeletal = false;
                    break 'outer;
                }
            }
        }
        OrderReport { leq, skeletal }
    }
}

impl fmt::Display for FinSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "space[{}; {} points]", self.q, self.len())
    }
}

/// The underlying preorder of a space.
#[derive(Clone, Debug)]
pub struct OrderReport {
    pub leq: Vec<Vec<bool>>,
    pub skeletal: bool,
}

// ---------------------------------------------------------------------------
// Maps between spaces
// ---------------------------------------------------------------------------

/// A point assignment between spaces over the same quantale.
///
/// Construction checks shapes only; [`SpaceMap::check_functor`] verifies the
/// distance-nonexpansiveness law `X(x,x') ⊑ Y(fx,fx')`.
#[derive(Clone, Debug)]
pub struct SpaceMap {
    source: Arc<FinSpace>,
    target: Arc<FinSpace>,
    map: Vec<usize>,
}

impl SpaceMap {
    pub fn new(source: Arc<FinSpace>, target: Arc<FinSpace>, map: Vec<usize>) -> Result<Self> {
        if source.quantale() != target.quantale() {
            return Err(Error::QuantaleMismatch {
                expected: source.quantale().to_string(),
                found: target.quantale().to_string(),
            });
        }
        if map.len() != source.len() {
            return Err(Error::Shape(format!(
                "map assigns {} points, source has {}",
                map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&i| i >= target.len()) {
            return Err(Error::Shape(format!("target index {bad} out of range")));
        }
        Ok(SpaceMap { source, target, map })
    }

    /// Builds the map from `source point name -> target point name` pairs.
    pub fn from_names<S: AsRef<str>>(
        source: Arc<FinSpace>,
        target: Arc<FinSpace>,
        assignment: &[(S, S)],
    ) -> Result<Self> {
        let mut map = vec![usize::MAX; source.len()];
        for (from, to) in assignment {
            let i = source.index_of(from.as_ref())?;
            map[i] = target.index_of(to.as_ref())?;
        }
        if let Some(i) = map.iter().position(|&t| t == usize::MAX) {
            return Err(Error::Shape(format!("point {:?} unassigned", source.points()[i])));
        }
        SpaceMap::new(source, target, map)
    }

    pub fn identity(x: Arc<FinSpace>) -> Self {
        let map = (0..x.len()).collect();
        SpaceMap { source: x.clone(), target: x, map }
    }

    pub fn source(&self) -> &Arc<FinSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinSpace> {
        &self.target
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn indices(&self) -> &[usize] {
        &self.map
    }

    /// First functor-law violation in scan order, if any.
    pub fn check_functor(&self) -> Result<()> {
        let q = self.source.quantale();
        for x in 0..self.source.len() {
            for y in 0..self.source.len() {
                let lhs = self.source.hom(x, y);
                let rhs = self.target.hom(self.map[x], self.map[y]);
                if !q.leq(lhs, rhs)? {
                    return Err(Error::NotAFunctor {
                        x: self.source.points()[x].clone(),
                        y: self.source.points()[y].clone(),
                        fx: self.target.points()[self.map[x]].clone(),
                        fy: self.target.points()[self.map[y]].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn is_functor(&self) -> bool {
        self.check_functor().is_ok()
    }

    /// `other ∘ self` when the middle spaces agree.
    pub fn then(&self, other: &SpaceMap) -> Result<SpaceMap> {
        if self.target != other.source {
            return Err(Error::Shape("composition through mismatched spaces".into()));
        }
        SpaceMap::new(
            self.source.clone(),
            other.target.clone(),
            self.map.iter().map(|&i| other.map[i]).collect(),
        )
    }
}

/// Pointwise comparison `f ≤ g` in the underlying order of the shared target.
pub fn order_on_maps(f: &SpaceMap, g: &SpaceMap) -> Result<bool> {
    if f.source != g.source || f.target != g.target {
        return Err(Error::Shape("maps with different endpoints are incomparable".into()));
    }
    let order = f.target.underlying_order();
    Ok((0..f.source.len()).all(|x| order.leq[f.apply(x)][g.apply(x)]))
}

/// The least space above a seed matrix: joins the unit onto the diagonal,
/// then joins in composites (`H := H ⊔ H·H`) until a fixpoint. Converges
/// because entries only grow inside a finite carrier.
pub fn transitive_closure_space(
    q: &Arc<Quantale>,
    points: Vec<String>,
    seed: &Mat,
) -> Result<Arc<FinSpace>> {
    let n = points.len();
    if seed.rows() != n || seed.cols() != n {
        return Err(Error::Shape(format!(
            "closure seed must be {n}x{n}, got {}x{}",
            seed.rows(),
            seed.cols()
        )));
    }
    let mut h = seed.to_rows();
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = q.join2(&row[i], &q.unit())?;
    }
    loop {
        let mut changed = false;
        let mut next = h.clone();
        for i in 0..n {
            for j in 0..n {
                let mut acc = h[i][j].clone();
                for (k, row) in h.iter().enumerate() {
                    acc = q.join2(&acc, &q.mul(&h[i][k], &row[j])?)?;
                }
                if acc != h[i][j] {
                    changed = true;
                    next[i][j] = acc;
                }
            }
        }
        h = next;
        if !changed {
            break;
        }
    }
    FinSpace::new(q.clone(), points, Mat::from_rows(h)?)
}

// ---------------------------------------------------------------------------
// Self-enrichments
// ---------------------------------------------------------------------------

/// The four ways a quantale carrier becomes a space over itself or its
/// opposite, numbered 1–4:
///
/// | case | hom       | base      | underlying order |
/// |------|-----------|-----------|------------------|
/// | 1    | `a ▷ b`   | `Ω`       | `⊑`              |
/// | 2    | `a ◁ b`   | `Ω`       | dual             |
/// | 3    | `b ▷ a`   | `Ω^op`    | dual             |
/// | 4    | `b ◁ a`   | `Ω^op`    | `⊑`              |
///
/// Case 1 is the transpose of case 3 and case 2 of case 4; for commutative
/// quantales 1 = 4 and 2 = 3.
pub fn self_enrichment(q: &Arc<Quantale>, case: u8) -> Result<Arc<FinSpace>> {
    if !(1..=4).contains(&case) {
        return Err(Error::InvalidCase(case));
    }
    let carrier = q.carrier()?.to_vec();
    let points: Vec<String> = carrier.iter().map(|v| v.to_string()).collect();
    let n = carrier.len();
    let mut data = Vec::with_capacity(n * n);
    for a in &carrier {
        for b in &carrier {
            let hom = match case {
                1 => q.rres(a, b)?,
                2 => q.lres(a, b)?,
                3 => q.rres(b, a)?,
                4 => q.lres(b, a)?,
                _ => unreachable!(),
            };
            data.push(hom);
        }
    }
    let base = if case <= 2 { q.clone() } else { Arc::new(q.opposite()) };
    FinSpace::new(base, points, Mat::new(n, n, data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantale::QVal;

    fn nat_mat(rows: Vec<Vec<u32>>) -> Mat {
        Mat::from_rows(rows.into_iter().map(|r| r.into_iter().map(QVal::Nat).collect()).collect())
            .unwrap()
    }

    fn bool_mat(rows: Vec<Vec<u8>>) -> Mat {
        Mat::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(|b| QVal::Bool(b == 1)).collect()).collect(),
        )
        .unwrap()
    }

    fn bool2_space(rows: Vec<Vec<u8>>) -> Arc<FinSpace> {
        let q = Arc::new(Quantale::bool2());
        let names = (0..rows.len()).map(|i| format!("p{i}")).collect();
        FinSpace::new(q, names, bool_mat(rows)).unwrap()
    }

    #[test]
    fn lawvere_space_with_asymmetric_distances_is_valid() {
        let q = Arc::new(Quantale::lawvere(10));
        let space =
            FinSpace::new(q, vec!["p0".into(), "p1".into()], nat_mat(vec![vec![0, 3], vec![9, 0]]));
        assert!(space.is_ok());
    }

    #[test]
    fn reflexivity_violation_is_reported_with_its_point() {
        let q = Arc::new(Quantale::lawvere(10));
        let err = FinSpace::new(
            q,
            vec!["p0".into(), "p1".into()],
            nat_mat(vec![vec![0, 5], vec![9, 1]]),
        )
        .unwrap_err();
        match err {
            Error::Reflexivity { point } => assert_eq!(point, "p1"),
            other => panic!("expected reflexivity failure, got {other}"),
        }
    }

    #[test]
    fn transitivity_violation_is_reported_with_its_triple() {
        let err = FinSpace::new(
            Arc::new(Quantale::bool2()),
            vec!["a".into(), "b".into(), "c".into()],
            bool_mat(vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]]),
        )
        .unwrap_err();
        match err {
            Error::Transitivity { x, y, z } => {
                assert_eq!((x.as_str(), y.as_str(), z.as_str()), ("a", "b", "c"))
            }
            other => panic!("expected transitivity failure, got {other}"),
        }
    }

    #[test]
    fn triangle_inequality_uses_truncated_addition() {
        // 12 would break the triangle inequality in ℕ, but it truncates to 10
        // and every carrier value is ⊑-below the bottom-most distance anyway.
        let q = Arc::new(Quantale::lawvere(10));
        let space = FinSpace::new(
            q,
            vec!["x".into(), "y".into(), "z".into()],
            nat_mat(vec![vec![0, 3, 10], vec![10, 0, 9], vec![1, 4, 0]]),
        );
        assert!(space.is_ok());
    }

    #[test]
    fn chain_embedding_is_a_functor_but_the_swap_is_not() {
        let chain = bool2_space(vec![vec![1, 1], vec![0, 1]]);
        let id = SpaceMap::identity(chain.clone());
        assert!(id.is_functor());
        let swap = SpaceMap::new(chain.clone(), chain.clone(), vec![1, 0]).unwrap();
        match swap.check_functor() {
            Err(Error::NotAFunctor { x, y, .. }) => {
                assert_eq!((x.as_str(), y.as_str()), ("p0", "p1"))
            }
            other => panic!("expected functor failure, got {other:?}"),
        }
    }

    #[test]
    fn maps_are_ordered_pointwise() {
        let chain = bool2_space(vec![vec![1, 1], vec![0, 1]]);
        let bot = SpaceMap::new(chain.clone(), chain.clone(), vec![0, 0]).unwrap();
        let id = SpaceMap::identity(chain.clone());
        assert!(order_on_maps(&bot, &id).unwrap());
        assert!(!order_on_maps(&id, &bot).unwrap());
    }

    #[test]
    fn opposite_space_is_valid_and_involutive() {
        let q = Arc::new(Quantale::lawvere(7));
        let x = FinSpace::new(
            q,
            vec!["a".into(), "b".into()],
            nat_mat(vec![vec![0, 2], vec![5, 0]]),
        )
        .unwrap();
        let op = x.opposite();
        assert_eq!(op.hom(0, 1), &QVal::Nat(5));
        assert!(validate_space(op.quantale(), op.points(), op.hom_mat()).is_ok());
        let opop = op.opposite();
        assert_eq!(opop.hom_mat(), x.hom_mat());
        assert_eq!(opop.quantale(), x.quantale());
    }

    #[test]
    fn discrete_spaces_are_valid_and_detected() {
        let q = Arc::new(Quantale::similarity(3));
        let d = FinSpace::discrete(q, vec!["x", "y", "z"]);
        assert!(validate_space(d.quantale(), d.points(), d.hom_mat()).is_ok());
        assert!(d.is_discrete());
        let one = FinSpace::one_point(Arc::new(Quantale::bool2()));
        assert_eq!(one.points(), &["*".to_string()]);
    }

    #[test]
    fn underlying_order_of_a_chain_is_the_chain() {
        let chain = bool2_space(vec![vec![1, 1], vec![0, 1]]);
        let report = chain.underlying_order();
        assert!(report.skeletal);
        assert_eq!(report.leq, vec![vec![true, true], vec![false, true]]);
        // a two-point indiscrete space is a non-skeletal preorder
        let blob = bool2_space(vec![vec![1, 1], vec![1, 1]]);
        assert!(!blob.underlying_order().skeletal);
    }

    #[test]
    fn self_enrichments_validate_and_transpose_as_expected() {
        for q in [
            Arc::new(Quantale::similarity(2)),
            Arc::new(Quantale::language(&['a'], 2).unwrap()),
            Arc::new(Quantale::language(&['a', 'b'], 2).unwrap()),
        ] {
            let cases: Vec<_> = (1..=4).map(|c| self_enrichment(&q, c).unwrap()).collect();
            for s in &cases {
                assert!(validate_space(s.quantale(), s.points(), s.hom_mat()).is_ok());
            }
            assert_eq!(cases[0].hom_mat(), &cases[2].hom_mat().transpose());
            assert_eq!(cases[1].hom_mat(), &cases[3].hom_mat().transpose());
            assert_eq!(cases[0].quantale(), &q);
            assert_eq!(cases[1].quantale(), &q);
            assert_eq!(**cases[2].quantale(), q.opposite());
            if q.is_commutative() {
                assert_eq!(cases[0].hom_mat(), cases[3].hom_mat());
                assert_eq!(cases[1].hom_mat(), cases[2].hom_mat());
            }
        }
    }

    #[test]
    fn self_enrichment_order_matches_the_lattice_or_its_dual() {
        let q = Arc::new(Quantale::similarity(2));
        let carrier = q.carrier().unwrap().to_vec();
        let agree = |case: u8, dual: bool| {
            let s = self_enrichment(&q, case).unwrap();
            let ord = s.underlying_order();
            for (i, a) in carrier.iter().enumerate() {
                for (j, b) in carrier.iter().enumerate() {
                    let lat = q.leq(a, b).unwrap();
                    let expected = if dual { q.leq(b, a).unwrap() } else { lat };
                    assert_eq!(ord.leq[i][j], expected, "case {case} at ({a},{b})");
                }
            }
        };
        agree(1, false);
        agree(2, true);
        agree(3, true);
        agree(4, false);
    }

    #[test]
    fn lawvere_case_one_hom_is_truncated_minus() {
        let q = Arc::new(Quantale::lawvere(10));
        let s = self_enrichment(&q, 1).unwrap();
        let idx = |v: u32| q.carrier().unwrap().iter().position(|x| *x == QVal::Nat(v)).unwrap();
        assert_eq!(s.hom(idx(3), idx(8)), &QVal::Nat(5));
        assert_eq!(s.hom(idx(8), idx(3)), &QVal::Nat(0));
    }

    #[test]
    fn invalid_case_is_rejected() {
        let q = Arc::new(Quantale::bool2());
        assert!(matches!(self_enrichment(&q, 0), Err(Error::InvalidCase(0))));
        assert!(matches!(self_enrichment(&q, 5), Err(Error::InvalidCase(5))));
    }
}
