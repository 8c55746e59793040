//! Enumeration budgets.
//!
//! Everything in this crate is exact and exhaustive, which only makes sense on
//! instances of bounded size. The [`Budget`] caps decide when an enumeration is
//! refused with [`crate::error::Error::BudgetExceeded`] instead of silently
//! taking forever.

/// Caps for the various exhaustive enumerations.
#[derive(Clone, Debug)]
pub struct Budget {
    /// Cap on `|carrier|^3` for the quantale law suite.
    pub law_triples: u128,
    /// Cap on candidate vectors when enumerating (co)presheaves on a space.
    pub vector_enum: u128,
    /// Cap on candidate intent vectors for the brute-force concept oracle.
    pub oracle_vectors: u128,
    /// Cap on candidate vectors when enumerating a filter/ideal class.
    pub class_enum: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            law_triples: 100_000_000,
            vector_enum: 2_000_000,
            oracle_vectors: 100_000,
            class_enum: 1_000_000,
        }
    }
}

impl Budget {
    /// Budget with every cap set to `n` (the CLI `--budget` knob).
    pub fn uniform(n: u128) -> Self {
        Budget { law_triples: n, vector_enum: n, oracle_vectors: n, class_enum: n }
    }

    /// Errors out when `needed` exceeds `cap`.
    pub fn guard(task: &str, needed: u128, cap: u128) -> crate::error::Result<()> {
        if needed > cap {
            Err(crate::error::Error::BudgetExceeded { task: task.to_string(), needed, budget: cap })
        } else {
            Ok(())
        }
    }
}
