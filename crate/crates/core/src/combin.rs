//! Marked spaces, stable bipartitions, their partial order and chains.
//!
//! A bipartition `(h, S)` is always stored with the anchor marking `"1"` in
//! `S`; the complementary representative is never materialized.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Label of the distinguished marking that every `S` must contain.
pub const ANCHOR: &str = "1";

/// Maximum number of markings a [`MarkingSet`] can hold.
pub const MAX_MARKINGS: usize = 32;

/// Index of a marking inside its [`MarkedSpace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(pub u8);

impl Marking {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of markings, as a bitmask over marking indices.
///
/// Ordered lexicographically by the sorted list of member indices, so that
/// `{1} < {1,2} < {1,3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MarkingSet(u32);

impl MarkingSet {
    pub const EMPTY: MarkingSet = MarkingSet(0);

    pub fn from_bits(bits: u32) -> Self {
        MarkingSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(m: Marking) -> Self {
        MarkingSet(1 << m.0)
    }

    pub fn contains(self, m: Marking) -> bool {
        self.0 & (1 << m.0) != 0
    }

    pub fn with(self, m: Marking) -> Self {
        MarkingSet(self.0 | (1 << m.0))
    }

    pub fn union(self, other: Self) -> Self {
        MarkingSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        MarkingSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        MarkingSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Marking> {
        (0..MAX_MARKINGS as u8).filter(move |&i| self.0 & (1 << i) != 0).map(Marking)
    }
}

impl Ord for MarkingSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for MarkingSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The pair `(g, P)`: a genus and an ordered set of distinct marking labels
/// containing the anchor `"1"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedSpace {
    genus: u32,
    labels: Vec<String>,
}

impl MarkedSpace {
    pub fn new<S: AsRef<str>>(genus: u32, labels: &[S]) -> Result<Self> {
        if genus < 1 {
            return Err(Error::InvalidSpace("genus must be at least 1".into()));
        }
        if labels.is_empty() {
            return Err(Error::InvalidSpace("marking set must be nonempty".into()));
        }
        if labels.len() > MAX_MARKINGS {
            return Err(Error::InvalidSpace(format!("at most {MAX_MARKINGS} markings supported")));
        }
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().trim().to_string()).collect();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() {
                return Err(Error::InvalidSpace("empty marking label".into()));
            }
            if labels[..i].contains(l) {
                return Err(Error::InvalidSpace(format!("duplicate marking {l:?}")));
            }
        }
        if !labels.iter().any(|l| l == ANCHOR) {
            return Err(Error::InvalidSpace(format!("markings must include the anchor {ANCHOR:?}")));
        }
        Ok(MarkedSpace { genus, labels })
    }

    /// Markings `1..=n` labelled by their decimal index.
    pub fn numbered(genus: u32, n: usize) -> Result<Self> {
        let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
        Self::new(genus, &labels)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn n_markings(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Dimension `3g - 3 + |P|` of the moduli space.
    pub fn dim(&self) -> u32 {
        3 * self.genus + self.labels.len() as u32 - 3
    }

    pub fn markings(&self) -> impl Iterator<Item = Marking> + '_ {
        (0..self.labels.len() as u8).map(Marking)
    }

    pub fn all(&self) -> MarkingSet {
        MarkingSet((((1u64) << self.labels.len()) - 1) as u32)
    }

    pub fn anchor(&self) -> Marking {
        self.marking(ANCHOR).expect("anchor checked at construction")
    }

    pub fn marking(&self, label: &str) -> Result<Marking> {
        self.labels
            .iter()
            .position(|l| l == label.trim())
            .map(|i| Marking(i as u8))
            .ok_or_else(|| Error::UnknownMarking(label.to_string()))
    }

    pub fn label(&self, m: Marking) -> &str {
        &self.labels[m.index()]
    }

    pub fn set_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<MarkingSet> {
        let mut set = MarkingSet::EMPTY;
        for l in labels {
            set = set.with(self.marking(l.as_ref())?);
        }
        Ok(set)
    }

    pub fn set_labels(&self, set: MarkingSet) -> Vec<String> {
        set.iter().map(|m| self.label(m).to_string()).collect()
    }

    /// Renders a set as `{1,2}`.
    pub fn render_set(&self, set: MarkingSet) -> String {
        format!("{{{}}}", self.set_labels(set).join(","))
    }
}

/// A stable bipartition `(h, S)` with the anchor in `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    pub h: u32,
    pub s: MarkingSet,
}

impl Bipartition {
    /// Validates stability and the anchor convention.
    pub fn new(space: &MarkedSpace, h: i64, s: MarkingSet) -> Result<Self> {
        let invalid =
            |reason: &str| Error::InvalidBipartition { h, set: space.render_set(s), reason: reason.to_string() };
        if !s.is_subset(space.all()) {
            return Err(invalid("S is not a subset of the markings"));
        }
        if !s.contains(space.anchor()) {
            return Err(invalid("S must contain the anchor marking \"1\""));
        }
        if h < 0 || h > space.genus() as i64 {
            return Err(invalid("h must lie in 0..=g"));
        }
        let sc = space.all().difference(s);
        if h == 0 && s.len() < 2 {
            return Err(invalid("h = 0 requires |S| >= 2"));
        }
        if h == space.genus() as i64 && sc.len() < 2 {
            return Err(invalid("h = g requires |P \\ S| >= 2"));
        }
        Ok(Bipartition { h: h as u32, s })
    }

    pub fn from_labels<S: AsRef<str>>(space: &MarkedSpace, h: i64, labels: &[S]) -> Result<Self> {
        let s = space.set_from_labels(labels)?;
        Self::new(space, h, s)
    }

    /// The partial order `h1 <= h2` and `S1 ⊆ S2`.
    pub fn leq(&self, other: &Bipartition) -> bool {
        self.h <= other.h && self.s.is_subset(other.s)
    }

    pub fn lt(&self, other: &Bipartition) -> bool {
        self != other && self.leq(other)
    }

    pub fn comparable(&self, other: &Bipartition) -> bool {
        self.leq(other) || other.leq(self)
    }

    pub fn render(&self, space: &MarkedSpace) -> String {
        format!("({},{})", self.h, space.render_set(self.s))
    }
}

/// `a <= b` in the bipartition partial order.
pub fn bipartition_leq(a: &Bipartition, b: &Bipartition) -> bool {
    a.leq(b)
}

/// All stable bipartitions of the space, sorted by `(h, S)`.
pub fn stable_bipartitions(space: &MarkedSpace) -> Vec<Bipartition> {
    let anchor = MarkingSet::singleton(space.anchor());
    let rest = space.all().difference(anchor).bits();
    let mut out = Vec::new();
    for h in 0..=space.genus() {
        // every subset of the non-anchor markings, joined with the anchor
        let mut sub = rest;
        loop {
            let s = MarkingSet::from_bits(sub).union(anchor);
            if let Ok(b) = Bipartition::new(space, h as i64, s) {
                out.push(b);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    out.sort();
    out
}

/// A strictly increasing chain `(h_1,S_1) < ... < (h_r,S_r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Chain(Vec<Bipartition>);

impl Chain {
    pub fn empty() -> Self {
        Chain(Vec::new())
    }

    pub fn new(entries: Vec<Bipartition>) -> Result<Self> {
        for w in entries.windows(2) {
            if !w[0].lt(&w[1]) {
                return Err(Error::ChainOrder(format!("{:?} is not below {:?}", w[0], w[1])));
            }
        }
        Ok(Chain(entries))
    }

    pub fn entries(&self) -> &[Bipartition] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<&Bipartition> {
        self.0.last()
    }

    /// The chain with its last entry removed.
    pub fn truncated(&self) -> Chain {
        let mut v = self.0.clone();
        v.pop();
        Chain(v)
    }

    /// Appends `b`, which must lie strictly above the current last entry.
    pub fn extended(&self, b: Bipartition) -> Result<Chain> {
        if let Some(last) = self.last() {
            if !last.lt(&b) {
                return Err(Error::ChainOrder(format!("{last:?} is not below {b:?}")));
            }
        }
        let mut v = self.0.clone();
        v.push(b);
        Ok(Chain(v))
    }

    pub fn render(&self, space: &MarkedSpace) -> String {
        self.0.iter().map(|b| b.render(space)).collect::<Vec<_>>().join("<")
    }
}

/// All strictly increasing chains of length `r` drawn from `pool`.
pub fn chains_from(pool: &[Bipartition], r: usize) -> Vec<Chain> {
    fn go(pool: &[Bipartition], r: usize, cur: &mut Vec<Bipartition>, out: &mut Vec<Chain>) {
        if cur.len() == r {
            out.push(Chain(cur.clone()));
            return;
        }
        for b in pool {
            if cur.last().is_none_or(|last| last.lt(b)) {
                cur.push(*b);
                go(pool, r, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(pool, r, &mut Vec::with_capacity(r), &mut out);
    out
}

/// All strictly increasing chains of length `r` of stable bipartitions.
pub fn enumerate_chains(space: &MarkedSpace, r: usize) -> Vec<Chain> {
    chains_from(&stable_bipartitions(space), r)
}

/// All ordered sequences of `r` positive integers summing to `a`.
pub fn compositions(a: u32, r: usize) -> Vec<Vec<u32>> {
    fn go(left: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if left < parts as u32 {
            return;
        }
        for k in 1..=left - (parts as u32 - 1) {
            cur.push(k);
            go(left - k, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(a, r, &mut Vec::with_capacity(r), &mut out);
    out
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(space: &MarkedSpace, h: i64, s: &[&str]) -> Bipartition {
        Bipartition::from_labels(space, h, s).unwrap()
    }

    #[test]
    fn genus_one_single_marking_has_none() {
        let space = MarkedSpace::numbered(1, 1).unwrap();
        assert!(stable_bipartitions(&space).is_empty());
    }

    #[test]
    fn genus_two_two_markings() {
        let space = MarkedSpace::numbered(2, 2).unwrap();
        let got = stable_bipartitions(&space);
        let want = vec![bp(&space, 0, &["1", "2"]), bp(&space, 1, &["1"]), bp(&space, 1, &["1", "2"])];
        assert_eq!(got, want);
    }

    #[test]
    fn genus_zero_rejected() {
        assert!(matches!(MarkedSpace::numbered(0, 2), Err(Error::InvalidSpace(_))));
        assert!(MarkedSpace::new(1, &["2", "3"]).is_err());
        assert!(MarkedSpace::new(1, &["1", "1"]).is_err());
    }

    #[test]
    fn bipartition_validation() {
        let space = MarkedSpace::numbered(2, 2).unwrap();
        assert!(Bipartition::from_labels(&space, 1, &["2"]).is_err());
        assert!(Bipartition::from_labels(&space, 0, &["1"]).is_err());
        assert!(Bipartition::from_labels(&space, 2, &["1"]).is_err());
        assert!(Bipartition::from_labels(&space, 3, &["1", "2"]).is_err());
    }

    #[test]
    fn partial_order_examples() {
        let space = MarkedSpace::numbered(2, 2).unwrap();
        let a = bp(&space, 1, &["1"]);
        let b = bp(&space, 1, &["1", "2"]);
        let c = bp(&space, 0, &["1", "2"]);
        assert!(bipartition_leq(&a, &b));
        assert!(!bipartition_leq(&c, &a));
        assert!(bipartition_leq(&a, &a));
    }

    #[test]
    fn chain_examples() {
        let space = MarkedSpace::numbered(2, 2).unwrap();
        let two = enumerate_chains(&space, 2);
        let want = vec![
            Chain::new(vec![bp(&space, 0, &["1", "2"]), bp(&space, 1, &["1", "2"])]).unwrap(),
            Chain::new(vec![bp(&space, 1, &["1"]), bp(&space, 1, &["1", "2"])]).unwrap(),
        ];
        assert_eq!(two, want);
        assert!(enumerate_chains(&space, 3).is_empty());
        assert_eq!(enumerate_chains(&space, 0), vec![Chain::empty()]);
    }

    #[test]
    fn chain_rejects_non_increasing() {
        let space = MarkedSpace::numbered(2, 2).unwrap();
        let a = bp(&space, 1, &["1"]);
        let c = bp(&space, 0, &["1", "2"]);
        assert!(Chain::new(vec![a, a]).is_err());
        assert!(Chain::new(vec![c, a]).is_err());
    }

    #[test]
    fn composition_examples() {
        assert_eq!(compositions(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert!(compositions(2, 3).is_empty());
        assert_eq!(compositions(4, 1), vec![vec![4]]);
    }

    #[test]
    fn order_axioms_and_chain_counts() {
        for g in 1..=4u32 {
            for n in 1..=3usize {
                let space = MarkedSpace::numbered(g, n).unwrap();
                let all = stable_bipartitions(&space);
                for a in &all {
                    assert!(a.s.contains(space.anchor()));
                    assert!(a.leq(a));
                    for b in &all {
                        if a.leq(b) && b.leq(a) {
                            assert_eq!(a, b);
                        }
                        for c in &all {
                            if a.leq(b) && b.leq(c) {
                                assert!(a.leq(c));
                            }
                        }
                    }
                }
                // brute-force filtering of all r-tuples
                for r in 0..=3usize {
                    let mut brute = 0usize;
                    let m = all.len();
                    let total = m.pow(r as u32);
                    for code in 0..total {
                        let mut c = code;
                        let tuple: Vec<&Bipartition> = (0..r)
                            .map(|_| {
                                let x = &all[c % m];
                                c /= m;
                                x
                            })
                            .collect();
                        if tuple.windows(2).all(|w| w[0].lt(w[1])) {
                            brute += 1;
                        }
                    }
                    if m == 0 && r == 0 {
                        brute = 1;
                    }
                    assert_eq!(enumerate_chains(&space, r).len(), brute, "g={g} n={n} r={r}");
                }
            }
        }
    }
}
