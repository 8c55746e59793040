//! Property-based law checks on arbitrary values: residuation adjunctions
//! over truncated word sets and distances, and idempotence of the polar
//! closure on random boolean contexts.

use std::sync::Arc;

use proptest::prelude::*;
use qspace::macneille::closure;
use qspace::quantale::{QVal, Quantale};
use qspace::relation::{Presheaf, QRel};
use qspace::space::{FinSpace, Mat};

const WORDS: [&str; 7] = ["", "a", "b", "aa", "ab", "ba", "bb"];

/// One of the 128 word sets of length at most two, picked by bit mask.
fn word_set(mask: u8) -> QVal {
    QVal::words(
        WORDS
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, w)| *w),
    )
}

proptest! {
    #[test]
    fn residuation_is_a_two_sided_adjunction(a in 0u8..128, s in 0u8..128, c in 0u8..128) {
        let q = Quantale::language(&['a', 'b'], 2).unwrap();
        let (a, s, c) = (word_set(a), word_set(s), word_set(c));
        let prod_below = q.leq(&q.mul(&a, &s).unwrap(), &c).unwrap();
        prop_assert_eq!(prod_below, q.leq(&s, &q.rres(&a, &c).unwrap()).unwrap());
        prop_assert_eq!(prod_below, q.leq(&a, &q.lres(&c, &s).unwrap()).unwrap());
    }

    #[test]
    fn counits_stay_below_their_target(a in 0u8..128, c in 0u8..128) {
        let q = Quantale::language(&['a', 'b'], 2).unwrap();
        let (a, c) = (word_set(a), word_set(c));
        prop_assert!(q.leq(&q.mul(&a, &q.rres(&a, &c).unwrap()).unwrap(), &c).unwrap());
        prop_assert!(q.leq(&q.mul(&q.lres(&c, &a).unwrap(), &a).unwrap(), &c).unwrap());
    }

    #[test]
    fn residuals_associate_across_sides(r in 0u8..128, s in 0u8..128, t in 0u8..128) {
        let q = Quantale::language(&['a', 'b'], 2).unwrap();
        let (r, s, t) = (word_set(r), word_set(s), word_set(t));
        prop_assert_eq!(
            q.rres(&r, &q.lres(&s, &t).unwrap()).unwrap(),
            q.lres(&q.rres(&r, &s).unwrap(), &t).unwrap()
        );
    }

    #[test]
    fn saturating_distance_addition_is_adjoint_to_subtraction(
        a in 0u32..=9, s in 0u32..=9, c in 0u32..=9,
    ) {
        let q = Quantale::lawvere(9);
        let (a, s, c) = (QVal::Nat(a), QVal::Nat(s), QVal::Nat(c));
        let prod_below = q.leq(&q.mul(&a, &s).unwrap(), &c).unwrap();
        prop_assert_eq!(prod_below, q.leq(&s, &q.rres(&a, &c).unwrap()).unwrap());
        prop_assert_eq!(prod_below, q.leq(&a, &q.lres(&c, &s).unwrap()).unwrap());
    }

    #[test]
    fn polar_closure_is_idempotent(bits in 0u16..512, phi_bits in 0u8..8) {
        let q = Arc::new(Quantale::bool2());
        let x = FinSpace::discrete(q.clone(), vec!["x0", "x1", "x2"]);
        let a = FinSpace::discrete(q.clone(), vec!["a0", "a1", "a2"]);
        let data: Vec<QVal> = (0..9).map(|i| QVal::Bool(bits >> i & 1 == 1)).collect();
        let ctx = QRel::new(x.clone(), a, Mat::new(3, 3, data).unwrap()).unwrap();
        let phi = Presheaf::new(
            x,
            (0..3).map(|i| QVal::Bool(phi_bits >> i & 1 == 1)).collect(),
        )
        .unwrap();
        let once = closure(&ctx, &phi).unwrap();
        let twice = closure(&ctx, &once).unwrap();
        prop_assert_eq!(once, twice);
    }
}
