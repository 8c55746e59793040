//! Quantales: complete lattices with a monotone monoid structure and both
//! residuals, over four exact finite instances.
//!
//! A quantale here is a finite complete lattice `(Ω, ⊑, ⊔)` with an associative
//! multiplication `·` that has a unit `e` and distributes over all joins. Both
//! residuals exist and are characterised by the adjunctions
//!
//! ```text
//! b ⊑ rres(a, c)  ⇔  a·b ⊑ c  ⇔  a ⊑ lres(c, b)
//! ```
//!
//! The instances:
//!
//! * [`Quantale::bool2`] — `{0,1}` with meet as multiplication.
//! * [`Quantale::lawvere`] — the truncated tropical chain `{0..N}` ordered by
//!   `≥` (so `0` is the top and the unit), with `a·b = min(a+b, N)`.
//! * [`Quantale::similarity`] — `{0..N} ∪ {∞}` ordered naturally, with `min`
//!   as multiplication and `∞` as the unit.
//! * [`Quantale::language`] — word sets over a finite alphabet truncated at a
//!   maximum length, with truncating concatenation. Noncommutative as soon as
//!   the alphabet has two symbols.
//!
//! All arithmetic is exact (bools, small integers, word sets); there are no
//! floats anywhere.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::budget::Budget;
use crate::error::{Error, Result};

/// Hard cap on materialising a carrier as a `Vec<QVal>`.
const CARRIER_MATERIALIZE_CAP: u128 = 1 << 20;
/// Hard cap on the word universe of a language quantale.
const UNIVERSE_CAP: u128 = 4096;

// ---------------------------------------------------------------------------
// Words and word sets
// ---------------------------------------------------------------------------

/// A word over some alphabet, ordered by length first and then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word(pub String);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// A finite set of words; iteration order is length-then-lexicographic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct WordSet(BTreeSet<Word>);

impl WordSet {
    pub fn empty() -> Self {
        WordSet(BTreeSet::new())
    }

    pub fn from_strs<I: IntoIterator<Item = S>, S: Into<String>>(words: I) -> Self {
        WordSet(words.into_iter().map(|w| Word(w.into())).collect())
    }

    pub fn insert(&mut self, w: Word) {
        self.0.insert(w);
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.0.contains(w)
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        WordSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn inter(&self, other: &Self) -> Self {
        WordSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl fmt::Display for WordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{w}")?;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

/// An element of some quantale carrier.
///
/// The payload decides the JSON form: `true`/`false`, a nonnegative integer,
/// the string `"inf"`, or a sorted array of word strings (`""` is the empty
/// word). Values are self-describing but only meaningful relative to a
/// [`Quantale`]; every public operation checks membership first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum QVal {
    Bool(bool),
    Nat(u32),
    Inf,
    Words(WordSet),
}

impl QVal {
    pub fn words<I: IntoIterator<Item = S>, S: Into<String>>(ws: I) -> Self {
        QVal::Words(WordSet::from_strs(ws))
    }
}

impl fmt::Display for QVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QVal::Bool(b) => write!(f, "{}", if *b { "1" } else { "0" }),
            QVal::Nat(n) => write!(f, "{n}"),
            QVal::Inf => write!(f, "inf"),
            QVal::Words(ws) => write!(f, "{ws}"),
        }
    }
}

impl Serialize for QVal {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QVal::Bool(b) => ser.serialize_bool(*b),
            QVal::Nat(n) => ser.serialize_u32(*n),
            QVal::Inf => ser.serialize_str("inf"),
            QVal::Words(ws) => {
                use serde::ser::SerializeSeq;
                let mut seq = ser.serialize_seq(Some(ws.len()))?;
                for w in ws.words() {
                    seq.serialize_element(&w.0)?;
                }
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for QVal {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = QVal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a bool, a nonnegative integer, \"inf\", or an array of words")
            }

            fn visit_bool<E: de::Error>(self, b: bool) -> std::result::Result<QVal, E> {
                Ok(QVal::Bool(b))
            }

            fn visit_u64<E: de::Error>(self, n: u64) -> std::result::Result<QVal, E> {
                u32::try_from(n).map(QVal::Nat).map_err(|_| E::custom("integer out of range"))
            }

            fn visit_i64<E: de::Error>(self, n: i64) -> std::result::Result<QVal, E> {
                if n < 0 {
                    return Err(E::custom("negative integers are not quantale values"));
                }
                self.visit_u64(n as u64)
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<QVal, E> {
                if s == "inf" {
                    Ok(QVal::Inf)
                } else {
                    Err(E::custom(format!("unexpected string {s:?}, only \"inf\" is allowed")))
                }
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<QVal, A::Error> {
                let mut ws = WordSet::empty();
                while let Some(w) = seq.next_element::<String>()? {
                    let word = Word(w);
                    if ws.contains(&word) {
                        return Err(de::Error::custom(format!("duplicate word {:?}", word.0)));
                    }
                    ws.insert(word);
                }
                Ok(QVal::Words(ws))
            }
        }
        de.deserialize_any(V)
    }
}

// ---------------------------------------------------------------------------
// Quantale descriptions
// ---------------------------------------------------------------------------

/// Which quantale, as it appears in JSON.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QuantaleKind {
    Bool2,
    Lawvere {
        #[serde(rename = "N")]
        n: u32,
    },
    Similarity {
        #[serde(rename = "N")]
        n: u32,
    },
    Language {
        alphabet: Vec<char>,
        #[serde(rename = "maxLen")]
        max_len: usize,
    },
}

impl fmt::Display for QuantaleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantaleKind::Bool2 => write!(f, "bool2"),
            QuantaleKind::Lawvere { n } => write!(f, "lawvere({n})"),
            QuantaleKind::Similarity { n } => write!(f, "similarity({n})"),
            QuantaleKind::Language { alphabet, max_len } => {
                let alpha: String = alphabet.iter().collect();
                write!(f, "language({{{alpha}}},{max_len})")
            }
        }
    }
}

fn universe(alphabet: &[char], max_len: usize) -> Vec<Word> {
    // breadth-first by length, each level in lexicographic order
    let mut all = vec![Word(String::new())];
    let mut level = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for c in alphabet {
                let mut v = w.clone();
                v.push(*c);
                next.push(v);
            }
        }
        all.extend(next.iter().map(|w| Word(w.clone())));
        level = next;
    }
    all
}

// ---------------------------------------------------------------------------
// The quantale handle
// ---------------------------------------------------------------------------

/// A validated quantale instance, possibly with reversed multiplication.
///
/// Cheap to clone conceptually, but typically shared behind an `Arc` because
/// spaces and relations carry a reference to their quantale.
#[derive(Debug)]
pub struct Quantale {
    kind: QuantaleKind,
    reversed: bool,
    universe: OnceLock<Vec<Word>>,
    carrier: OnceLock<Vec<QVal>>,
}

impl Clone for Quantale {
    fn clone(&self) -> Self {
        Quantale {
            kind: self.kind.clone(),
            reversed: self.reversed,
            universe: OnceLock::new(),
            carrier: OnceLock::new(),
        }
    }
}

impl PartialEq for Quantale {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.reversed == other.reversed
    }
}

impl Eq for Quantale {}

impl fmt::Display for Quantale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, if self.reversed { "^op" } else { "" })
    }
}

impl Quantale {
    pub fn new(kind: QuantaleKind) -> Result<Self> {
        if let QuantaleKind::Language { alphabet, max_len } = &kind {
            if alphabet.is_empty() {
                return Err(Error::InvalidDesc("alphabet must be nonempty".into()));
            }
            let mut sorted = alphabet.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != alphabet.len() {
                return Err(Error::InvalidDesc("alphabet has duplicate symbols".into()));
            }
            // |Σ^{≤k}| = Σ_{i≤k} |Σ|^i must stay desk-sized
            let mut size: u128 = 0;
            let mut pow: u128 = 1;
            for _ in 0..=*max_len {
                size += pow;
                pow = pow.saturating_mul(alphabet.len() as u128);
                if size > UNIVERSE_CAP {
                    return Err(Error::InvalidDesc(format!(
                        "word universe exceeds {UNIVERSE_CAP} words"
                    )));
                }
            }
            let kind = QuantaleKind::Language { alphabet: sorted, max_len: *max_len };
            return Ok(Quantale {
                kind,
                reversed: false,
                universe: OnceLock::new(),
                carrier: OnceLock::new(),
            });
        }
        Ok(Quantale { kind, reversed: false, universe: OnceLock::new(), carrier: OnceLock::new() })
    }

    pub fn bool2() -> Self {
        Quantale::new(QuantaleKind::Bool2).unwrap()
    }

    pub fn lawvere(n: u32) -> Self {
        Quantale::new(QuantaleKind::Lawvere { n }).unwrap()
    }

    pub fn similarity(n: u32) -> Self {
        Quantale::new(QuantaleKind::Similarity { n }).unwrap()
    }

    pub fn language(alphabet: &[char], max_len: usize) -> Result<Self> {
        Quantale::new(QuantaleKind::Language { alphabet: alphabet.to_vec(), max_len })
    }

    pub fn kind(&self) -> &QuantaleKind {
        &self.kind
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    /// Same lattice, multiplication reversed. Residuals swap roles.
    pub fn opposite(&self) -> Quantale {
        Quantale {
            kind: self.kind.clone(),
            reversed: !self.reversed,
            universe: OnceLock::new(),
            carrier: OnceLock::new(),
        }
    }

    /// Structural commutativity (the law suite probes it exhaustively).
    ///
    /// With `max_len ≤ 1` every surviving concatenation involves the empty
    /// word, so even multi-symbol languages commute there.
    pub fn is_commutative(&self) -> bool {
        match &self.kind {
            QuantaleKind::Language { alphabet, max_len } => alphabet.len() <= 1 || *max_len <= 1,
            _ => true,
        }
    }

    fn word_universe(&self) -> &[Word] {
        self.universe.get_or_init(|| match &self.kind {
            QuantaleKind::Language { alphabet, max_len } => universe(alphabet, *max_len),
            _ => Vec::new(),
        })
    }

    pub fn contains(&self, v: &QVal) -> bool {
        match (&self.kind, v) {
            (QuantaleKind::Bool2, QVal::Bool(_)) => true,
            (QuantaleKind::Lawvere { n }, QVal::Nat(k)) => k <= n,
            (QuantaleKind::Similarity { n }, QVal::Nat(k)) => k <= n,
            (QuantaleKind::Similarity { .. }, QVal::Inf) => true,
            (QuantaleKind::Language { alphabet, max_len }, QVal::Words(ws)) => {
                ws.words().all(|w| w.0.len() <= *max_len && w.0.chars().all(|c| alphabet.contains(&c)))
            }
            _ => false,
        }
    }

    pub(crate) fn check(&self, v: &QVal) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::NotInCarrier { kind: self.to_string(), value: v.to_string() })
        }
    }

    pub fn unit(&self) -> QVal {
        match &self.kind {
            QuantaleKind::Bool2 => QVal::Bool(true),
            QuantaleKind::Lawvere { .. } => QVal::Nat(0),
            QuantaleKind::Similarity { .. } => QVal::Inf,
            QuantaleKind::Language { .. } => QVal::words([""]),
        }
    }

    pub fn top(&self) -> QVal {
        match &self.kind {
            QuantaleKind::Bool2 => QVal::Bool(true),
            QuantaleKind::Lawvere { .. } => QVal::Nat(0),
            QuantaleKind::Similarity { .. } => QVal::Inf,
            QuantaleKind::Language { .. } => {
                QVal::Words(WordSet(self.word_universe().iter().cloned().collect()))
            }
        }
    }

    pub fn bottom(&self) -> QVal {
        match &self.kind {
            QuantaleKind::Bool2 => QVal::Bool(false),
            QuantaleKind::Lawvere { n } => QVal::Nat(*n),
            QuantaleKind::Similarity { .. } => QVal::Nat(0),
            QuantaleKind::Language { .. } => QVal::Words(WordSet::empty()),
        }
    }

    /// The lattice order. Unaffected by `opposite`.
    pub fn leq(&self, a: &QVal, b: &QVal) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (&self.kind, a, b) {
            (QuantaleKind::Bool2, QVal::Bool(x), QVal::Bool(y)) => !x | y,
            // the Lawvere chain is ordered by ≥, so 0 is the top
            (QuantaleKind::Lawvere { .. }, QVal::Nat(x), QVal::Nat(y)) => x >= y,
            (QuantaleKind::Similarity { .. }, QVal::Nat(x), QVal::Nat(y)) => x <= y,
            (QuantaleKind::Similarity { .. }, QVal::Nat(_), QVal::Inf) => true,
            (QuantaleKind::Similarity { .. }, QVal::Inf, QVal::Nat(_)) => false,
            (QuantaleKind::Similarity { .. }, QVal::Inf, QVal::Inf) => true,
            (QuantaleKind::Language { .. }, QVal::Words(x), QVal::Words(y)) => x.is_subset(y),
            _ => unreachable!("membership already checked"),
        })
    }

    pub fn join2(&self, a: &QVal, b: &QVal) -> Result<QVal> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (&self.kind, a, b) {
            (QuantaleKind::Bool2, QVal::Bool(x), QVal::Bool(y)) => QVal::Bool(*x | *y),
            (QuantaleKind::Lawvere { .. }, QVal::Nat(x), QVal::Nat(y)) => QVal::Nat(*x.min(y)),
            (QuantaleKind::Similarity { .. }, QVal::Nat(x), QVal::Nat(y)) => QVal::Nat(*x.max(y)),
            (QuantaleKind::Similarity { .. }, _, _) => QVal::Inf,
            (QuantaleKind::Language { .. }, QVal::Words(x), QVal::Words(y)) => {
                QVal::Words(x.union(y))
            }
            _ => unreachable!("membership already checked"),
        })
    }

    pub fn meet2(&self, a: &QVal, b: &QVal) -> Result<QVal> {
        self.check(a)?;
        self.check(b)?;
        Ok(match (&self.kind, a, b) {
            (QuantaleKind::Bool2, QVal::Bool(x), QVal::Bool(y)) => QVal::Bool(*x & *y),
            (QuantaleKind::Lawvere { .. }, QVal::Nat(x), QVal::Nat(y)) => QVal::Nat(*x.max(y)),
            (QuantaleKind::Similarity { .. }, QVal::Nat(x), QVal::Nat(y)) => QVal::Nat(*x.min(y)),
            (QuantaleKind::Similarity { .. }, QVal::Nat(x), QVal::Inf) => QVal::Nat(*x),
            (QuantaleKind::Similarity { .. }, QVal::Inf, QVal::Nat(y)) => QVal::Nat(*y),
            (QuantaleKind::Similarity { .. }, QVal::Inf, QVal::Inf) => QVal::Inf,
            (QuantaleKind::Language { .. }, QVal::Words(x), QVal::Words(y)) => {
                QVal::Words(x.inter(y))
            }
            _ => unreachable!("membership already checked"),
        })
    }

    /// Join of arbitrarily many elements; the empty join is the bottom.
    pub fn join<'a, I: IntoIterator<Item = &'a QVal>>(&self, vals: I) -> Result<QVal> {
        let mut acc = self.bottom();
        for v in vals {
            acc = self.join2(&acc, v)?;
        }
        Ok(acc)
    }

    /// Meet of arbitrarily many elements; the empty meet is the top.
    pub fn meet<'a, I: IntoIterator<Item = &'a QVal>>(&self, vals: I) -> Result<QVal> {
        let mut acc = self.top();
        for v in vals {
            acc = self.meet2(&acc, v)?;
        }
        Ok(acc)
    }

    pub fn mul(&self, a: &QVal, b: &QVal) -> Result<QVal> {
        self.check(a)?;
        self.check(b)?;
        let (a, b) = if self.reversed { (b, a) } else { (a, b) };
        Ok(self.mul_base(a, b))
    }

    fn mul_base(&self, a: &QVal, b: &QVal) -> QVal {
        match (&self.kind, a, b) {
            (QuantaleKind::Bool2, QVal::Bool(x), QVal::Bool(y)) => QVal::Bool(*x & *y),
            (QuantaleKind::Lawvere { n }, QVal::Nat(x), QVal::Nat(y)) => {
                QVal::Nat((x.saturating_add(*y)).min(*n))
            }
            (QuantaleKind::Similarity { .. }, QVal::Nat(x), QVal::Nat(y)) => QVal::Nat(*x.min(y)),
            (QuantaleKind::Similarity { .. }, QVal::Nat(x), QVal::Inf) => QVal::Nat(*x),
            (QuantaleKind::Similarity { .. }, QVal::Inf, QVal::Nat(y)) => QVal::Nat(*y),
            (QuantaleKind::Similarity { .. }, QVal::Inf, QVal::Inf) => QVal::Inf,
            (QuantaleKind::Language { max_len, .. }, QVal::Words(x), QVal::Words(y)) => {
                let mut out = WordSet::empty();
                for v in x.words() {
                    for w in y.words() {
                        if v.0.len() + w.0.len() <= *max_len {
                            out.insert(Word(format!("{}{}", v.0, w.0)));
                        }
                    }
                }
                QVal::Words(out)
            }
            _ => unreachable!("membership already checked"),
        }
    }

    /// Right residual `a ▷ c`, the largest `b` with `a·b ⊑ c`.
    pub fn rres(&self, a: &QVal, c: &QVal) -> Result<QVal> {
        self.check(a)?;
        self.check(c)?;
        if self.reversed {
            // ⊔{b : b·a ⊑ c} in the underlying quantale
            Ok(self.lres_base(c, a))
        } else {
            Ok(self.rres_base(a, c))
        }
    }

    /// Left residual `c ◁ a`, the largest `b` with `b·a ⊑ c`.
    pub fn lres(&self, c: &QVal, a: &QVal) -> Result<QVal> {
        self.check(c)?;
        self.check(a)?;
        if self.reversed {
            Ok(self.rres_base(a, c))
        } else {
            Ok(self.lres_base(c, a))
        }
    }

    fn rres_base(&self, a: &QVal, c: &QVal) -> QVal {
        match (&self.kind, a, c) {
            (QuantaleKind::Bool2, QVal::Bool(x), QVal::Bool(y)) => QVal::Bool(!x | y),
            (QuantaleKind::Lawvere { .. }, QVal::Nat(x), QVal::Nat(y)) => {
                QVal::Nat(y.saturating_sub(*x))
            }
            (QuantaleKind::Similarity { .. }, _, _) => {
                // m ▷ n: everything if m ≤ n, otherwise n itself
                match (a, c) {
                    (QVal::Inf, QVal::Inf) => QVal::Inf,
                    (QVal::Inf, QVal::Nat(n)) => QVal::Nat(*n),
                    (QVal::Nat(_), QVal::Inf) => QVal::Inf,
                    (QVal::Nat(m), QVal::Nat(n)) => {
                        if m <= n {
                            QVal::Inf
                        } else {
                            QVal::Nat(*n)
                        }
                    }
                    _ => unreachable!(),
                }
            }
            (QuantaleKind::Language { max_len, .. }, QVal::Words(l), QVal::Words(m)) => {
                // words w such that every vw that still fits lands in m
                let mut out = WordSet::empty();
                for w in self.word_universe() {
                    let ok = l.words().all(|v| {
                        v.0.len() + w.0.len() > *max_len
                            || m.contains(&Word(format!("{}{}", v.0, w.0)))
                    });
                    if ok {
                        out.insert(w.clone());
                    }
                }
                QVal::Words(out)
            }
            _ => unreachable!("membership already checked"),
        }
    }

    fn lres_base(&self, c: &QVal, a: &QVal) -> QVal {
        match (&self.kind, c, a) {
            (QuantaleKind::Language { max_len, .. }, QVal::Words(m), QVal::Words(l)) => {
                let mut out = WordSet::empty();
                for w in self.word_universe() {
                    let ok = l.words().all(|v| {
                        w.0.len() + v.0.len() > *max_len
                            || m.contains(&Word(format!("{}{}", w.0, v.0)))
                    });
                    if ok {
                        out.insert(w.clone());
                    }
                }
                QVal::Words(out)
            }
            // the other three instances are commutative: c ◁ a = a ▷ c
            _ => self.rres_base(a, c),
        }
    }

    /// Number of carrier elements (may be astronomically large for languages).
    pub fn carrier_len(&self) -> u128 {
        match &self.kind {
            QuantaleKind::Bool2 => 2,
            QuantaleKind::Lawvere { n } => *n as u128 + 1,
            QuantaleKind::Similarity { n } => *n as u128 + 2,
            QuantaleKind::Language { .. } => {
                let u = self.word_universe().len();
                if u >= 127 {
                    u128::MAX
                } else {
                    1u128 << u
                }
            }
        }
    }

    /// The full carrier in its fixed enumeration order: booleans `0 < 1`,
    /// chains ascending (then `∞`), word sets in the subset order induced by
    /// length-then-lexicographic word enumeration (binary counting over that
    /// word order).
    pub fn carrier(&self) -> Result<&[QVal]> {
        if self.carrier.get().is_none() {
            let len = self.carrier_len();
            Budget::guard("carrier materialisation", len, CARRIER_MATERIALIZE_CAP)?;
            let vals = match &self.kind {
                QuantaleKind::Bool2 => vec![QVal::Bool(false), QVal::Bool(true)],
                QuantaleKind::Lawvere { n } => (0..=*n).map(QVal::Nat).collect(),
                QuantaleKind::Similarity { n } => {
                    let mut v: Vec<QVal> = (0..=*n).map(QVal::Nat).collect();
                    v.push(QVal::Inf);
                    v
                }
                QuantaleKind::Language { .. } => {
                    let uni = self.word_universe().to_vec();
                    let mut out = Vec::with_capacity(len as usize);
                    for mask in 0..(1u64 << uni.len()) {
                        let mut ws = WordSet::empty();
                        for (i, w) in uni.iter().enumerate() {
                            if mask >> i & 1 == 1 {
                                ws.insert(w.clone());
                            }
                        }
                        out.push(QVal::Words(ws));
                    }
                    out
                }
            };
            let _ = self.carrier.set(vals);
        }
        Ok(self.carrier.get().unwrap().as_slice())
    }

    /// Runs the full law suite exhaustively over the carrier.
    pub fn check_laws(&self, budget: &Budget) -> Result<LawReport> {
        check_quantale_laws(self, budget)
    }
}

// ---------------------------------------------------------------------------
// Law suite
// ---------------------------------------------------------------------------

/// Outcome of one law checked over the whole carrier.
#[derive(Clone, Debug, Serialize)]
pub struct LawCheck {
    pub name: &'static str,
    pub holds: bool,
    /// First violating tuple in scan order, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<QVal>>,
}

/// Result of the exhaustive law suite.
#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub quantale: String,
    pub carrier_size: u64,
    pub checked_triples: u64,
    pub laws: Vec<LawCheck>,
    /// Exhaustive commutativity probe (not a law; languages over two or more
    /// symbols are honestly noncommutative).
    pub commutative: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noncommutative_witness: Option<(QVal, QVal)>,
}

impl LawReport {
    pub fn all_hold(&self) -> bool {
        self.laws.iter().all(|l| l.holds)
    }

    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.laws.iter().find(|l| !l.holds)
    }
}

struct OpTables {
    n: usize,
    mul: Vec<u32>,
    join: Vec<u32>,
    rres: Vec<u32>,
    lres: Vec<u32>,
    leq: Vec<bool>,
    unit: u32,
}

impl OpTables {
    #[inline]
    fn mul(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.n + j] as usize
    }
    #[inline]
    fn join(&self, i: usize, j: usize) -> usize {
        self.join[i * self.n + j] as usize
    }
    #[inline]
    fn rres(&self, i: usize, j: usize) -> usize {
        self.rres[i * self.n + j] as usize
    }
    #[inline]
    fn lres(&self, i: usize, j: usize) -> usize {
        self.lres[i * self.n + j] as usize
    }
    #[inline]
    fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.n + j]
    }
}

fn build_tables(q: &Quantale) -> Result<OpTables> {
    let carrier = q.carrier()?;
    let n = carrier.len();
    let index: std::collections::BTreeMap<&QVal, u32> =
        carrier.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
    let look = |v: &QVal| -> u32 { *index.get(v).expect("operation landed outside the carrier") };
    let mut mul = Vec::with_capacity(n * n);
    let mut join = Vec::with_capacity(n * n);
    let mut rres = Vec::with_capacity(n * n);
    let mut lres = Vec::with_capacity(n * n);
    let mut leq = Vec::with_capacity(n * n);
    for a in carrier {
        for b in carrier {
            mul.push(look(&q.mul(a, b)?));
            join.push(look(&q.join2(a, b)?));
            rres.push(look(&q.rres(a, b)?));
            lres.push(look(&q.lres(a, b)?));
            leq.push(q.leq(a, b)?);
        }
    }
    let unit = look(&q.unit());
    Ok(OpTables { n, mul, join, rres, lres, leq, unit })
}

/// Exhaustive check of the monoid, distributivity, adjunction and residual
/// composition laws, with the first counterexample per law in carrier order.
pub fn check_quantale_laws(q: &Quantale, budget: &Budget) -> Result<LawReport> {
    let size = q.carrier_len();
    let triples = size.saturating_mul(size).saturating_mul(size);
    Budget::guard("quantale law suite", triples, budget.law_triples)?;
    let t = build_tables(q)?;
    let carrier = q.carrier()?;
    let n = t.n;
    let wit = |ids: &[usize]| Some(ids.iter().map(|&i| carrier[i].clone()).collect::<Vec<_>>());

    let mut laws: Vec<LawCheck> = Vec::new();
    let mut push = |name: &'static str, witness: Option<Vec<QVal>>| {
        laws.push(LawCheck { name, holds: witness.is_none(), witness });
    };

    // unit and annihilator: O(n)
    let mut w = None;
    for i in 0..n {
        let e = t.unit as usize;
        if t.mul(e, i) != i || t.mul(i, e) != i {
            w = wit(&[i]);
            break;
        }
    }
    push("unit", w);

    let bottom = (0..n).position(|i| (0..n).all(|j| t.leq(i, j))).expect("no bottom element");
    let mut w = None;
    for i in 0..n {
        if t.mul(i, bottom) != bottom || t.mul(bottom, i) != bottom {
            w = wit(&[i]);
            break;
        }
    }
    push("mul_annihilates_bottom", w);

    let mut w = None;
    for i in 0..n {
        if !t.leq(t.unit as usize, t.rres(i, i)) {
            w = wit(&[i]);
            break;
        }
    }
    push("unit_below_rres_diagonal", w);

    let mut w = None;
    for i in 0..n {
        if !t.leq(t.unit as usize, t.lres(i, i)) {
            w = wit(&[i]);
            break;
        }
    }
    push("unit_below_lres_diagonal", w);

    // counit laws: O(n^2)
    let mut w = None;
    'c1: for r in 0..n {
        for s in 0..n {
            if !t.leq(t.mul(r, t.rres(r, s)), s) {
                w = wit(&[r, s]);
                break 'c1;
            }
        }
    }
    push("mul_rres_counit", w);

    let mut w = None;
    'c2: for r in 0..n {
        for s in 0..n {
            if !t.leq(t.mul(t.lres(s, r), r), s) {
                w = wit(&[r, s]);
                break 'c2;
            }
        }
    }
    push("lres_mul_counit", w);

    // commutativity probe: O(n^2)
    let mut comm_wit = None;
    'comm: for i in 0..n {
        for j in 0..n {
            if t.mul(i, j) != t.mul(j, i) {
                comm_wit = Some((carrier[i].clone(), carrier[j].clone()));
                break 'comm;
            }
        }
    }
    let commutative = comm_wit.is_none();

    let mut w = None;
    if commutative {
        'res: for a in 0..n {
            for c in 0..n {
                if t.rres(a, c) != t.lres(c, a) {
                    w = wit(&[a, c]);
                    break 'res;
                }
            }
        }
    }
    push("residuals_coincide_when_commutative", w);

    // O(n^3) laws, each stopping at its first counterexample
    let mut assoc = None;
    let mut dist_l = None;
    let mut dist_r = None;
    let mut gal_r = None;
    let mut gal_l = None;
    let mut mixed = None;
    let mut comp_r = None;
    let mut comp_l = None;
    for a in 0..n {
        for b in 0..n {
            let ab = t.mul(a, b);
            for c in 0..n {
                if assoc.is_none() && t.mul(ab, c) != t.mul(a, t.mul(b, c)) {
                    assoc = wit(&[a, b, c]);
                }
                if dist_l.is_none() && t.mul(a, t.join(b, c)) != t.join(t.mul(a, b), t.mul(a, c)) {
                    dist_l = wit(&[a, b, c]);
                }
                if dist_r.is_none() && t.mul(t.join(b, c), a) != t.join(t.mul(b, a), t.mul(c, a)) {
                    dist_r = wit(&[a, b, c]);
                }
                if gal_r.is_none() && (t.leq(ab, c) != t.leq(b, t.rres(a, c))) {
                    gal_r = wit(&[a, b, c]);
                }
                if gal_l.is_none() && (t.leq(ab, c) != t.leq(a, t.lres(c, b))) {
                    gal_l = wit(&[a, b, c]);
                }
                if mixed.is_none() && t.rres(a, t.lres(b, c)) != t.lres(t.rres(a, b), c) {
                    mixed = wit(&[a, b, c]);
                }
                if comp_r.is_none() && !t.leq(t.mul(t.rres(a, b), t.rres(b, c)), t.rres(a, c)) {
                    comp_r = wit(&[a, b, c]);
                }
                if comp_l.is_none() && !t.leq(t.mul(t.lres(a, b), t.lres(b, c)), t.lres(a, c)) {
                    comp_l = wit(&[a, b, c]);
                }
            }
        }
    }
    push("mul_associative", assoc);
    push("mul_distributes_over_join_left", dist_l);
    push("mul_distributes_over_join_right", dist_r);
    push("rres_adjunction", gal_r);
    push("lres_adjunction", gal_l);
    push("residual_mixed_associativity", mixed);
    push("rres_composition", comp_r);
    push("lres_composition", comp_l);

    Ok(LawReport {
        quantale: q.to_string(),
        carrier_size: n as u64,
        checked_triples: (n as u64).pow(3),
        laws,
        commutative,
        noncommutative_witness: comm_wit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_residual, Side};

    #[test]
    fn bool2_is_the_two_element_heyting_algebra() {
        let q = Quantale::bool2();
        let f = QVal::Bool(false);
        let t = QVal::Bool(true);
        assert_eq!(q.mul(&t, &t).unwrap(), t);
        assert_eq!(q.mul(&t, &f).unwrap(), f);
        assert_eq!(q.rres(&f, &f).unwrap(), t);
        assert_eq!(q.rres(&t, &f).unwrap(), f);
        assert_eq!(q.unit(), t);
        assert_eq!(q.top(), t);
        assert_eq!(q.bottom(), f);
    }

    #[test]
    fn lawvere_is_the_truncated_tropical_chain() {
        let q = Quantale::lawvere(10);
        assert_eq!(q.mul(&QVal::Nat(3), &QVal::Nat(4)).unwrap(), QVal::Nat(7));
        assert_eq!(q.mul(&QVal::Nat(6), &QVal::Nat(7)).unwrap(), QVal::Nat(10));
        // residual is truncated minus
        assert_eq!(q.lres(&QVal::Nat(5), &QVal::Nat(3)).unwrap(), QVal::Nat(2));
        assert_eq!(q.rres(&QVal::Nat(3), &QVal::Nat(5)).unwrap(), QVal::Nat(2));
        assert_eq!(q.rres(&QVal::Nat(7), &QVal::Nat(5)).unwrap(), QVal::Nat(0));
        // ordered by ≥: join is numeric min
        assert_eq!(q.join2(&QVal::Nat(3), &QVal::Nat(8)).unwrap(), QVal::Nat(3));
        assert_eq!(q.meet2(&QVal::Nat(3), &QVal::Nat(8)).unwrap(), QVal::Nat(8));
        assert_eq!(q.top(), QVal::Nat(0));
        assert_eq!(q.bottom(), QVal::Nat(10));
    }

    #[test]
    fn similarity_residual_cases() {
        let q = Quantale::similarity(5);
        assert_eq!(q.rres(&QVal::Nat(2), &QVal::Nat(5)).unwrap(), QVal::Inf);
        assert_eq!(q.rres(&QVal::Nat(5), &QVal::Nat(2)).unwrap(), QVal::Nat(2));
        assert_eq!(q.meet(&[QVal::Nat(2), QVal::Inf]).unwrap(), QVal::Nat(2));
        assert_eq!(q.join(std::iter::empty()).unwrap(), QVal::Nat(0));
        assert_eq!(q.unit(), QVal::Inf);
    }

    #[test]
    fn language_concatenation_truncates() {
        let q = Quantale::language(&['a', 'b'], 2).unwrap();
        let prod = q.mul(&QVal::words(["a"]), &QVal::words(["b", "ab"])).unwrap();
        // "a"+"ab" would have length 3 and is dropped
        assert_eq!(prod, QVal::words(["ab"]));
        assert_eq!(q.mul(&q.unit(), &QVal::words(["a", "bb"])).unwrap(), QVal::words(["a", "bb"]));
    }

    #[test]
    fn language_residual_agrees_with_brute_force() {
        // In the truncated quantale the residual picks up every word long
        // enough that concatenation overflows, because the condition holds
        // vacuously there. The join over all word sets B with {a}·B ⊑ {ab,ac}
        // therefore contains all nine two-letter words as well as b and c.
        let q = Quantale::language(&['a', 'b', 'c'], 2).unwrap();
        let a = QVal::words(["a"]);
        let c = QVal::words(["ab", "ac"]);
        let fast = q.rres(&a, &c).unwrap();
        let slow = oracle_residual(&q, &a, &c, Side::Right).unwrap();
        assert_eq!(fast, slow);
        let expect = QVal::words(["b", "c", "aa", "ab", "ac", "ba", "bb", "bc", "ca", "cb", "cc"]);
        assert_eq!(fast, expect);
    }

    #[test]
    fn residuals_match_oracle_exhaustively_on_small_instances() {
        let qs = vec![
            Quantale::bool2(),
            Quantale::lawvere(4),
            Quantale::similarity(2),
            Quantale::language(&['a'], 2).unwrap(),
        ];
        for q in &qs {
            let carrier = q.carrier().unwrap().to_vec();
            for a in &carrier {
                for c in &carrier {
                    assert_eq!(
                        q.rres(a, c).unwrap(),
                        oracle_residual(q, a, c, Side::Right).unwrap(),
                        "rres vs oracle on {q} at ({a},{c})"
                    );
                    assert_eq!(
                        q.lres(c, a).unwrap(),
                        oracle_residual(q, a, c, Side::Left).unwrap(),
                        "lres vs oracle on {q} at ({a},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn opposite_swaps_multiplication_and_residuals() {
        let q = Quantale::language(&['a', 'b'], 2).unwrap();
        let o = q.opposite();
        let x = QVal::words(["a", "ba"]);
        let y = QVal::words(["b"]);
        assert_eq!(o.mul(&x, &y).unwrap(), q.mul(&y, &x).unwrap());
        assert_eq!(o.rres(&x, &y).unwrap(), q.lres(&y, &x).unwrap());
        assert_eq!(o.lres(&y, &x).unwrap(), q.rres(&x, &y).unwrap());
        assert_eq!(o.opposite(), q);
    }

    #[test]
    fn law_suite_passes_on_small_instances_and_their_opposites() {
        let budget = Budget::default();
        let qs = vec![
            Quantale::bool2(),
            Quantale::lawvere(6),
            Quantale::similarity(3),
            Quantale::language(&['a'], 3).unwrap(),
            Quantale::language(&['a', 'b'], 1).unwrap(),
        ];
        for q in &qs {
            for q in [q.clone(), q.opposite()] {
                let report = q.check_laws(&budget).unwrap();
                assert!(report.all_hold(), "{}: {:?}", q, report.first_failure());
            }
        }
    }

    #[test]
    fn commutativity_probe() {
        let budget = Budget::default();
        let uni = Quantale::language(&['a'], 3).unwrap();
        assert!(uni.check_laws(&budget).unwrap().commutative);
        assert!(uni.is_commutative());
        // maxLen 1 keeps only ε-concatenations, so two symbols still commute
        let short = Quantale::language(&['a', 'b'], 1).unwrap();
        assert!(short.check_laws(&budget).unwrap().commutative);
        assert!(short.is_commutative());
        let bi = Quantale::language(&['a', 'b'], 2).unwrap();
        let report = bi.check_laws(&budget).unwrap();
        assert!(!report.commutative);
        assert!(report.noncommutative_witness.is_some());
        assert!(!bi.is_commutative());
    }

    #[test]
    fn law_suite_respects_the_budget() {
        let q = Quantale::language(&['a', 'b'], 3).unwrap();
        // 2^15 carrier: the triple count blows any sane budget
        match q.check_laws(&Budget::default()) {
            Err(Error::BudgetExceeded { .. }) => {}
            other => panic!("expected a budget error, got {other:?}"),
        }
    }

    #[test]
    fn carrier_orders_are_fixed() {
        let q = Quantale::similarity(2);
        assert_eq!(
            q.carrier().unwrap(),
            &[QVal::Nat(0), QVal::Nat(1), QVal::Nat(2), QVal::Inf]
        );
        let q = Quantale::language(&['a'], 1).unwrap();
        assert_eq!(
            q.carrier().unwrap(),
            &[
                QVal::words(Vec::<String>::new()),
                QVal::words([""]),
                QVal::words(["a"]),
                QVal::words(["", "a"]),
            ]
        );
    }

    #[test]
    fn qval_json_round_trip() {
        for (v, j) in [
            (QVal::Bool(true), "true"),
            (QVal::Nat(7), "7"),
            (QVal::Inf, "\"inf\""),
            (QVal::words(["", "a", "ab"]), "[\"\",\"a\",\"ab\"]"),
        ] {
            assert_eq!(serde_json::to_string(&v).unwrap(), j);
            assert_eq!(serde_json::from_str::<QVal>(j).unwrap(), v);
        }
        assert!(serde_json::from_str::<QVal>("-3").is_err());
        assert!(serde_json::from_str::<QVal>("\"oops\"").is_err());
        assert!(serde_json::from_str::<QVal>("[\"a\",\"a\"]").is_err());
    }

    #[test]
    fn type_mismatch_is_an_invalid_input_error() {
        let q = Quantale::bool2();
        assert!(matches!(
            q.mul(&QVal::Nat(1), &QVal::Bool(true)),
            Err(Error::NotInCarrier { .. })
        ));
        let q = Quantale::lawvere(3);
        assert!(matches!(q.leq(&QVal::Nat(4), &QVal::Nat(0)), Err(Error::NotInCarrier { .. })));
    }
}
