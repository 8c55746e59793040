//! Independent brute-force reference implementations.
//!
//! Everything in here recomputes results from first definitions — joins over
//! explicitly enumerated candidates, literal universal properties — sharing
//! nothing with the fast paths except the primitive value operations
//! (`mul`, `leq`, `join`, `meet`) and the carrier enumeration. Tests pin the
//! fast paths against these, never the other way around.

use crate::budget::Budget;
use crate::error::Result;
use crate::quantale::{QVal, Quantale, Word, WordSet};

/// Which residual [`oracle_residual`] computes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `a ▷ c = ⊔ { b : a·b ⊑ c }`
    Right,
    /// `c ◁ a = ⊔ { b : b·a ⊑ c }`
    Left,
}

/// Residual by literal join over the whole carrier.
pub fn oracle_residual(q: &Quantale, a: &QVal, c: &QVal, side: Side) -> Result<QVal> {
    let mut acc = q.bottom();
    for b in q.carrier()? {
        let prod = match side {
            Side::Right => q.mul(a, b)?,
            Side::Left => q.mul(b, a)?,
        };
        if q.leq(&prod, c)? {
            acc = q.join2(&acc, b)?;
        }
    }
    Ok(acc)
}

/// Textbook boolean formal-concept enumeration over a plain bool matrix,
/// written against bit twiddling only — no quantale machinery at all.
///
/// Returns all `(extent, intent)` pairs, sorted by extent (as a bit vector,
/// lexicographically). The incidence is `rows × cols`; `rows`/`cols` up to 16.
pub fn fca_bool_concepts(incidence: &[Vec<bool>]) -> Vec<(Vec<bool>, Vec<bool>)> {
    let rows = incidence.len();
    let cols = incidence.first().map_or(0, |r| r.len());
    assert!(rows <= 16 && cols <= 16, "oracle is for tiny instances only");
    // attribute subsets as masks; extent = common objects, then intent = common attributes
    let mut seen = std::collections::BTreeSet::new();
    for bmask in 0u32..1 << cols {
        let mut extent = 0u32;
        for x in 0..rows {
            let has_all = (0..cols).all(|a| bmask >> a & 1 == 0 || incidence[x][a]);
            if has_all {
                extent |= 1 << x;
            }
        }
        let mut intent = 0u32;
        for a in 0..cols {
            let common = (0..rows).all(|x| extent >> x & 1 == 0 || incidence[x][a]);
            if common {
                intent |= 1 << a;
            }
        }
        seen.insert((extent, intent));
    }
    let unpack = |mask: u32, len: usize| (0..len).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>();
    let mut out: Vec<(Vec<bool>, Vec<bool>)> =
        seen.into_iter().map(|(e, i)| (unpack(e, rows), unpack(i, cols))).collect();
    out.sort();
    out
}

/// Stable polar pairs of a value matrix by scanning *every* vector on the
/// attribute side: for each raw `ψ₀` take `φ(x) = ⊓_a M[x][a] ◁ ψ₀(a)` and
/// `ψ(a) = ⊓_x φ(x) ▷ M[x][a]`, then dedup. Sorted by extent.
pub fn oracle_concepts(
    q: &Quantale,
    matrix: &[Vec<QVal>],
    budget: &Budget,
) -> Result<Vec<(Vec<QVal>, Vec<QVal>)>> {
    let nx = matrix.len();
    let na = matrix.first().map_or(0, |r| r.len());
    let carrier = q.carrier()?;
    Budget::guard(
        "oracle concept scan",
        (carrier.len() as u128).checked_pow(na as u32).unwrap_or(u128::MAX),
        budget.oracle_vectors,
    )?;
    let mut found = std::collections::BTreeMap::new();
    let mut idx = vec![0usize; na];
    loop {
        let mut extent = Vec::with_capacity(nx);
        for x in 0..nx {
            let mut acc = q.top();
            for a in 0..na {
                acc = q.meet2(&acc, &q.lres(&matrix[x][a], &carrier[idx[a]])?)?;
            }
            extent.push(acc);
        }
        let mut intent = Vec::with_capacity(na);
        for a in 0..na {
            let mut acc = q.top();
            for x in 0..nx {
                acc = q.meet2(&acc, &q.rres(&extent[x], &matrix[x][a])?)?;
            }
            intent.push(acc);
        }
        found.insert(extent, intent);
        let mut pos = na;
        let mut done = na == 0;
        loop {
            if pos == 0 {
                done = true;
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < carrier.len() {
                break;
            }
            idx[pos] = 0;
        }
        if done {
            return Ok(found.into_iter().collect());
        }
    }
}

fn all_words(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &ch in alphabet {
                let mut u = w.clone();
                u.push(ch);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Word-by-word decision of `⊔_q T[s][q]·F[q]` over the truncating word-set
/// quantale: a word belongs iff it has a split `u = vw` with `v ∈ T[s][q]`
/// and `w ∈ F[q]` for some `q`. Works on raw word sets with string
/// splitting only.
pub fn oracle_forward_behaviour(
    transitions: &[Vec<WordSet>],
    final_states: &[WordSet],
    state: usize,
    alphabet: &[char],
    max_len: usize,
) -> WordSet {
    let mut out = WordSet::empty();
    for u in all_words(alphabet, max_len) {
        let hit = (0..final_states.len()).any(|qq| {
            (0..=u.len()).any(|cut| {
                transitions[state][qq].contains(&Word(u[..cut].to_string()))
                    && final_states[qq].contains(&Word(u[cut..].to_string()))
            })
        });
        if hit {
            out.insert(Word(u));
        }
    }
    out
}

/// Word-by-word decision of `⊔_q0 I[q0]·T[q0][s]`.
pub fn oracle_backward_behaviour(
    transitions: &[Vec<WordSet>],
    initial_states: &[WordSet],
    state: usize,
    alphabet: &[char],
    max_len: usize,
) -> WordSet {
    let mut out = WordSet::empty();
    for u in all_words(alphabet, max_len) {
        let hit = (0..initial_states.len()).any(|q0| {
            (0..=u.len()).any(|cut| {
                initial_states[q0].contains(&Word(u[..cut].to_string()))
                    && transitions[q0][state].contains(&Word(u[cut..].to_string()))
            })
        });
        if hit {
            out.insert(Word(u));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bool_concept_oracle_on_a_two_antichain() {
        // identity 2x2 incidence: four concepts (the 2^2 lattice)
        let inc = vec![vec![true, false], vec![false, true]];
        let concepts = fca_bool_concepts(&inc);
        assert_eq!(concepts.len(), 4);
        assert!(concepts.contains(&(vec![true, true], vec![false, false])));
        assert!(concepts.contains(&(vec![true, false], vec![true, false])));
        assert!(concepts.contains(&(vec![false, true], vec![false, true])));
        assert!(concepts.contains(&(vec![false, false], vec![true, true])));
    }

    #[test]
    fn bool_concept_oracle_on_a_chain_context() {
        // 3-chain as its own ≤ context: the chain is already complete, so the
        // completion is the chain again. The empty extent is not closed here
        // (its closure is the extent of the full attribute set, {x0}).
        let inc = vec![
            vec![true, true, true],
            vec![false, true, true],
            vec![false, false, true],
        ];
        let concepts = fca_bool_concepts(&inc);
        assert_eq!(concepts.len(), 3);
        assert!(concepts.contains(&(vec![true, false, false], vec![true, true, true])));
        assert!(concepts.contains(&(vec![true, true, false], vec![false, true, true])));
        assert!(concepts.contains(&(vec![true, true, true], vec![false, false, true])));
    }

    #[test]
    fn value_concept_scan_agrees_with_the_bool_oracle() {
        let q = Quantale::bool2();
        let inc = vec![vec![true, false, true], vec![false, true, true]];
        let matrix: Vec<Vec<QVal>> =
            inc.iter().map(|r| r.iter().map(|&b| QVal::Bool(b)).collect()).collect();
        let scanned = oracle_concepts(&q, &matrix, &Budget::default()).unwrap();
        let reference = fca_bool_concepts(&inc);
        assert_eq!(scanned.len(), reference.len());
        for ((se, si), (re, ri)) in scanned.iter().zip(&reference) {
            assert_eq!(se, &re.iter().map(|&b| QVal::Bool(b)).collect::<Vec<_>>());
            assert_eq!(si, &ri.iter().map(|&b| QVal::Bool(b)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn forward_behaviour_splits_words() {
        let eps = WordSet::from_strs([""]);
        let trans = vec![
            vec![eps.clone(), WordSet::from_strs(["a", "ab"])],
            vec![WordSet::empty(), eps.clone()],
        ];
        let finals = vec![WordSet::empty(), WordSet::from_strs(["", "b"])];
        let obs0 = oracle_forward_behaviour(&trans, &finals, 0, &['a', 'b'], 2);
        let expect = WordSet::from_strs(["a", "ab"]);
        assert_eq!(obs0, expect);
        let obs1 = oracle_forward_behaviour(&trans, &finals, 1, &['a', 'b'], 2);
        assert_eq!(obs1, WordSet::from_strs(["", "b"]));
    }
}
