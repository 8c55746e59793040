//! Exact computation with spaces enriched in a quantale.
//!
//! The crate implements, for four exact finite quantales (booleans, two flavours
//! of truncated numeric chains, truncated word languages):
//!
//! * quantale arithmetic with both residuals and an exhaustive law suite
//!   ([`quantale`]);
//! * finite enriched spaces — "metric spaces valued in Ω" — with functors,
//!   opposites and self-enrichments ([`space`]);
//! * weighted relations (bimodules) with composition and both residual
//!   relations, presheaves and copresheaves, Yoneda embeddings ([`relation`]);
//! * weighted limits and colimits by literal witness search, tensors and
//!   powers, and automata-flavoured observability/reachability ([`limits`]);
//! * concept lattices of weighted contexts — the enriched cut completion —
//!   with its universal property checked on the nose ([`macneille`]);
//! * canonical extensions built from filter and ideal classes ([`canext`]);
//! * extensions of functors to the completions, with the adjunction checks
//!   ([`funext`]);
//! * brute-force reference oracles everything above is tested against
//!   ([`oracle`]).
//!
//! Everything is exact: no floats, no tolerances, equality is equality.

// Hom matrices are walked by coordinates throughout; indexed loops keep the
// two-sided subscripts readable where iterators would obscure them.
#![allow(clippy::needless_range_loop)]

pub mod budget;
pub mod canext;
pub mod dot;
pub mod error;
pub mod funext;
pub mod json;
pub mod limits;
pub mod macneille;
pub mod oracle;
pub mod quantale;
pub mod random;
pub mod relation;
pub mod space;

pub use budget::Budget;
pub use error::{Error, Result};
pub use quantale::{QVal, Quantale, QuantaleKind};
