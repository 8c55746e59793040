//! Seed-driven generators for randomized law sweeps.
//!
//! Every generator is a pure function of a [`ChaCha8Rng`] state, so a sweep
//! with a given seed is reproducible byte for byte across runs and platforms.
//! Generated objects are always *valid* by construction: spaces are closed
//! into reflexive-transitive form, relations are closed into bimodules, and
//! weights are produced by acting on a raw vector with the hom.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::quantale::{QVal, Quantale};
use crate::relation::{close_into_rel, lres_rel, rres_rel, Copresheaf, Presheaf, QRel};
use crate::space::{transitive_closure_space, FinSpace, Mat, SpaceMap};

/// A fresh deterministic generator for the given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random carrier element.
pub fn random_value(q: &Quantale, rng: &mut ChaCha8Rng) -> Result<QVal> {
    let carrier = q.carrier()?;
    Ok(carrier[rng.random_range(0..carrier.len())].clone())
}

/// A random space on `n` points: the transitive-reflexive closure of a
/// random seed matrix.
pub fn random_space(q: &Arc<Quantale>, n: usize, rng: &mut ChaCha8Rng) -> Result<Arc<FinSpace>> {
    let data = (0..n * n)
        .map(|_| random_value(q, rng))
        .collect::<Result<Vec<_>>>()?;
    let points = (0..n).map(|i| format!("p{i}")).collect();
    transitive_closure_space(q, points, &Mat::new(n, n, data)?)
}

/// A random bimodule between the given spaces: the closure of a random seed
/// matrix under the hom actions on both sides.
pub fn random_relation(
    x: &Arc<FinSpace>,
    y: &Arc<FinSpace>,
    rng: &mut ChaCha8Rng,
) -> Result<QRel> {
    let q = x.quantale();
    let data = (0..x.len() * y.len())
        .map(|_| random_value(q, rng))
        .collect::<Result<Vec<_>>>()?;
    close_into_rel(x, y, &Mat::new(x.len(), y.len(), data)?)
}

/// A random lower-closed weight on `x`: act on a raw random vector with the
/// hom, `φ(p) = ⊔_p' X(p,p')·v(p')`.
pub fn random_presheaf(x: &Arc<FinSpace>, rng: &mut ChaCha8Rng) -> Result<Presheaf> {
    let q = x.quantale();
    let raw = (0..x.len())
        .map(|_| random_value(q, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut vals = Vec::with_capacity(x.len());
    for p in 0..x.len() {
        let mut acc = q.bottom();
        for (p2, v) in raw.iter().enumerate() {
            acc = q.join2(&acc, &q.mul(x.hom(p, p2), v)?)?;
        }
        vals.push(acc);
    }
    Presheaf::new(x.clone(), vals)
}

/// A random upper-closed weight on `a`: `ψ(p) = ⊔_p' v(p')·A(p',p)`.
pub fn random_copresheaf(a: &Arc<FinSpace>, rng: &mut ChaCha8Rng) -> Result<Copresheaf> {
    let q = a.quantale();
    let raw = (0..a.len())
        .map(|_| random_value(q, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut vals = Vec::with_capacity(a.len());
    for p in 0..a.len() {
        let mut acc = q.bottom();
        for (p2, v) in raw.iter().enumerate() {
            acc = q.join2(&acc, &q.mul(v, a.hom(p2, p))?)?;
        }
        vals.push(acc);
    }
    Copresheaf::new(a.clone(), vals)
}

/// A random finite lattice, presented as a truth-valued space: the sublattice
/// of the powerset of `bits` generated by `gens` random subsets (plus the
/// empty and full sets), ordered by inclusion. Point names are the subsets as
/// bit strings.
pub fn random_lattice_space(bits: u32, gens: usize, rng: &mut ChaCha8Rng) -> Arc<FinSpace> {
    let full: u32 = if bits >= 32 { u32::MAX } else { (1 << bits) - 1 };
    let mut elems: Vec<u32> = vec![0, full];
    for _ in 0..gens {
        elems.push(rng.random_range(0..=full));
    }
    elems.sort_unstable();
    elems.dedup();
    loop {
        let mut fresh = Vec::new();
        for i in 0..elems.len() {
            for j in i + 1..elems.len() {
                for m in [elems[i] & elems[j], elems[i] | elems[j]] {
                    if !elems.contains(&m) && !fresh.contains(&m) {
                        fresh.push(m);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        elems.extend(fresh);
        elems.sort_unstable();
    }
    let q = Arc::new(Quantale::bool2());
    let names = elems
        .iter()
        .map(|m| format!("s{:0w$b}", m, w = bits as usize))
        .collect();
    let mut hom = Mat::fill(elems.len(), elems.len(), QVal::Bool(false));
    for (i, &u) in elems.iter().enumerate() {
        for (j, &v) in elems.iter().enumerate() {
            hom.set(i, j, QVal::Bool(u & v == u));
        }
    }
    FinSpace::new(q, names, hom).expect("inclusion order is reflexive and transitive")
}

/// Outcome of a randomized relation-law sweep.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub rounds: usize,
    pub checks: usize,
}

/// Run `rounds` rounds of randomized relation-law checks over the given
/// quantale: composition associativity and identities, the three-way
/// residuation equivalence, both counits, the iterated right residual, and
/// the two-sided residual exchange. Spaces have between 1 and `max_points`
/// points. Fails on the first violated law, naming it and its round.
pub fn sweep_relation_laws(
    q: &Arc<Quantale>,
    rounds: usize,
    max_points: usize,
    seed: u64,
    _budget: &Budget,
) -> Result<SweepReport> {
    let mut rng = rng(seed);
    let mut checks = 0usize;
    let fail = |round: usize, law: &str| Error::SweepFailed {
        round,
        law: law.to_string(),
    };
    for round in 0..rounds {
        let nx = rng.random_range(1..=max_points);
        let ny = rng.random_range(1..=max_points);
        let nz = rng.random_range(1..=max_points);
        let nw = rng.random_range(1..=max_points);
        let x = random_space(q, nx, &mut rng)?;
        let y = random_space(q, ny, &mut rng)?;
        let z = random_space(q, nz, &mut rng)?;
        let w = random_space(q, nw, &mut rng)?;
        let r = random_relation(&x, &y, &mut rng)?;
        let s = random_relation(&y, &z, &mut rng)?;
        let u = random_relation(&z, &w, &mut rng)?;
        let t = random_relation(&x, &z, &mut rng)?;
        let r2 = random_relation(&y, &w, &mut rng)?;
        let s2 = random_relation(&w, &z, &mut rng)?;

        // Associativity and identities of composition.
        let rs = r.compose(&s)?;
        if rs.compose(&u)?.matrix() != r.compose(&s.compose(&u)?)?.matrix() {
            return Err(fail(round, "composition associativity"));
        }
        if QRel::hom_of(&x).compose(&r)?.matrix() != r.matrix()
            || r.compose(&QRel::hom_of(&y))?.matrix() != r.matrix()
        {
            return Err(fail(round, "composition identities"));
        }

        // Three-way residuation: R●S ⊑ T ⇔ S ⊑ R▸T ⇔ R ⊑ T◂S.
        let below = rs.leq(&t)?;
        if below != s.leq(&rres_rel(&r, &t)?)? || below != r.leq(&lres_rel(&t, &s)?)? {
            return Err(fail(round, "residuation equivalence"));
        }

        // Counits.
        if !r.compose(&rres_rel(&r, &t)?)?.leq(&t)? {
            return Err(fail(round, "right residual counit"));
        }
        if !lres_rel(&t, &s)?.compose(&s)?.leq(&t)? {
            return Err(fail(round, "left residual counit"));
        }

        // Iterated right residual: R'▸(R▸T) = (R●R')▸T.
        let lhs = rres_rel(&r2, &rres_rel(&r, &t)?)?;
        let rhs = rres_rel(&r.compose(&r2)?, &t)?;
        if lhs.matrix() != rhs.matrix() {
            return Err(fail(round, "iterated right residual"));
        }

        // Two-sided exchange: R▸(T◂S') = (R▸T)◂S'.
        let lhs = rres_rel(&r, &lres_rel(&t, &s2)?)?;
        let rhs = lres_rel(&rres_rel(&r, &t)?, &s2)?;
        if lhs.matrix() != rhs.matrix() {
            return Err(fail(round, "residual exchange"));
        }

        checks += 7;
    }
    Ok(SweepReport { rounds, checks })
}

/// A random monotone endpoint-preserving assignment is not always a functor;
/// this picks one that is, by sampling assignments and keeping the first that
/// validates. Intended for small spaces only.
pub fn random_functor(
    source: &Arc<FinSpace>,
    target: &Arc<FinSpace>,
    rng: &mut ChaCha8Rng,
    attempts: usize,
) -> Result<SpaceMap> {
    for _ in 0..attempts {
        let map: Vec<usize> = (0..source.len())
            .map(|_| rng.random_range(0..target.len()))
            .collect();
        let m = SpaceMap::new(source.clone(), target.clone(), map)?;
        if m.is_functor() {
            return Ok(m);
        }
    }
    Err(Error::Shape(format!(
        "no functor found in {attempts} attempts"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_spaces_and_relations_validate() {
        for (qi, q) in [
            Arc::new(Quantale::bool2()),
            Arc::new(Quantale::lawvere(6)),
            Arc::new(Quantale::similarity(3)),
            Arc::new(Quantale::language(&['a', 'b'], 2).unwrap()),
        ]
        .iter()
        .enumerate()
        {
            let mut g = rng(7 + qi as u64);
            let x = random_space(q, 3, &mut g).unwrap();
            let y = random_space(q, 2, &mut g).unwrap();
            let r = random_relation(&x, &y, &mut g).unwrap();
            assert_eq!(r.source().len(), 3);
            let phi = random_presheaf(&x, &mut g).unwrap();
            let psi = random_copresheaf(&y, &mut g).unwrap();
            assert_eq!(phi.vals().len(), 3);
            assert_eq!(psi.vals().len(), 2);
        }
    }

    #[test]
    fn sweeps_are_reproducible_for_a_fixed_seed() {
        let q = Arc::new(Quantale::similarity(3));
        let budget = Budget::default();
        let a = sweep_relation_laws(&q, 5, 3, 42, &budget).unwrap();
        let b = sweep_relation_laws(&q, 5, 3, 42, &budget).unwrap();
        assert_eq!(a.checks, b.checks);
        assert_eq!(a.checks, 35);
    }

    #[test]
    fn short_sweeps_pass_on_all_four_families() {
        let budget = Budget::default();
        for q in [
            Arc::new(Quantale::bool2()),
            Arc::new(Quantale::lawvere(5)),
            Arc::new(Quantale::similarity(3)),
            Arc::new(Quantale::language(&['a', 'b'], 2).unwrap()),
        ] {
            sweep_relation_laws(&q, 5, 3, 1, &budget).unwrap();
        }
    }

    #[test]
    fn random_lattices_are_meet_and_join_closed() {
        let mut g = rng(11);
        for _ in 0..10 {
            let l = random_lattice_space(4, 3, &mut g);
            let order = l.underlying_order();
            assert!(order.skeletal);
            let n = l.len();
            // Every pair has a greatest lower bound and least upper bound in
            // the generated set, because it is closed under & and |.
            for i in 0..n {
                for j in 0..n {
                    let lower: Vec<usize> = (0..n)
                        .filter(|&k| order.leq[k][i] && order.leq[k][j])
                        .collect();
                    assert!(lower
                        .iter()
                        .any(|&m| lower.iter().all(|&k| order.leq[k][m])));
                }
            }
        }
    }
}
