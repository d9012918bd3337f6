//! Divisor classes on the universal curve, their monomials, and pushforward
//! of monomials to decorated strata classes.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::arith::{sign, Rational};
use crate::combin::{stable_bipartitions, Bipartition, MarkedSpace, Marking};
use crate::error::{Error, Result};
use crate::strata::{chain_graph, Tail, TautClass};

/// The divisor `ℓ K̃ + Σ d_p σ_p + Σ a_{h,S} C_{h,S}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorSpec {
    space: Arc<MarkedSpace>,
    pub ell: i64,
    d: Vec<i64>,
    a: BTreeMap<Bipartition, i64>,
}

impl DivisorSpec {
    /// `d` has one entry per marking; zero entries of `a` are dropped.
    pub fn new(space: &Arc<MarkedSpace>, ell: i64, d: Vec<i64>, a: BTreeMap<Bipartition, i64>) -> Result<Self> {
        if d.len() != space.n_markings() {
            return Err(Error::LengthMismatch { expected: space.n_markings(), got: d.len() });
        }
        for b in a.keys() {
            Bipartition::new(space, b.h as i64, b.s)?;
        }
        let a = a.into_iter().filter(|(_, v)| *v != 0).collect();
        Ok(DivisorSpec { space: Arc::clone(space), ell, d, a })
    }

    pub fn zero(space: &Arc<MarkedSpace>) -> Self {
        DivisorSpec { space: Arc::clone(space), ell: 0, d: vec![0; space.n_markings()], a: BTreeMap::new() }
    }

    pub fn space(&self) -> &Arc<MarkedSpace> {
        &self.space
    }

    pub fn d(&self, p: Marking) -> i64 {
        self.d[p.index()]
    }

    pub fn d_values(&self) -> &[i64] {
        &self.d
    }

    /// Coefficient of `C_{h,S}` (zero when absent).
    pub fn a(&self, b: &Bipartition) -> i64 {
        self.a.get(b).copied().unwrap_or(0)
    }

    /// The nonzero `a` coefficients.
    pub fn a_values(&self) -> &BTreeMap<Bipartition, i64> {
        &self.a
    }

    pub fn with_a(mut self, a: BTreeMap<Bipartition, i64>) -> Result<Self> {
        for b in a.keys() {
            Bipartition::new(&self.space, b.h as i64, b.s)?;
        }
        self.a = a.into_iter().filter(|(_, v)| *v != 0).collect();
        Ok(self)
    }

    /// Total degree `ℓ(2g-2) + Σ d_p`.
    pub fn degree(&self) -> i64 {
        self.ell * (2 * self.space.genus() as i64 - 2) + self.d.iter().sum::<i64>()
    }

    /// `Σ_{p ∉ S} d_p`.
    pub fn d_complement(&self, b: &Bipartition) -> i64 {
        self.space.markings().filter(|m| !b.s.contains(*m)).map(|m| self.d(m)).sum()
    }

    /// `Σ_{p ∈ S} d_p`.
    pub fn d_inside(&self, b: &Bipartition) -> i64 {
        self.space.markings().filter(|m| b.s.contains(*m)).map(|m| self.d(m)).sum()
    }
}

/// A generator of the divisor classes used here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Factor {
    K,
    Sigma(Marking),
    C(Bipartition),
}

/// The node classes `A_{l,T}^{(i,j)}` and `B^{(i,j)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    A { bip: Bipartition, i: u32, j: u32 },
    B { i: u32, j: u32 },
}

impl NodeClass {
    /// Codimension on the universal curve.
    pub fn codim(&self) -> u32 {
        match *self {
            NodeClass::A { i, j, .. } | NodeClass::B { i, j } => 2 + i + j,
        }
    }
}

/// `K^k · σ_p^c · C-chain · node` with the chain stored as
/// `(bipartition, i, j)` entries in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UMonomial {
    pub k_exp: u32,
    pub sigma: Option<(Marking, u32)>,
    pub chain: Vec<(Bipartition, u32, u32)>,
    pub node: Option<NodeClass>,
}

/// Formal rational combination of monomials.
pub type FormalSum = BTreeMap<UMonomial, Rational>;

impl UMonomial {
    pub fn one() -> Self {
        UMonomial::default()
    }

    /// Codimension on the universal curve.
    pub fn degree(&self) -> u32 {
        self.k_exp
            + self.sigma.map_or(0, |(_, b)| b)
            + self.chain.iter().map(|(_, i, j)| 1 + i + j).sum::<u32>()
            + self.node.map_or(0, |n| n.codim())
    }

    pub fn is_pure_chain(&self) -> bool {
        self.k_exp == 0 && self.sigma.is_none() && self.node.is_none()
    }

    fn chain_entries(&self) -> Vec<Bipartition> {
        self.chain.iter().map(|(b, _, _)| *b).collect()
    }

    fn exps(&self) -> Vec<(u32, u32)> {
        self.chain.iter().map(|&(_, i, j)| (i, j)).collect()
    }

    /// Checks the vanishing relations the representation relies on.
    pub fn validate(&self) -> Result<()> {
        if self.k_exp > 0 && self.sigma.is_some() {
            return Err(Error::MalformedMonomial("K·σ is zero".into()));
        }
        if let Some((p, b)) = self.sigma {
            if b == 0 {
                return Err(Error::MalformedMonomial("σ with exponent 0".into()));
            }
            if self.chain.iter().any(|(c, _, _)| c.s.contains(p)) {
                return Err(Error::MalformedMonomial("σ_p·C_{h,S} with p in S".into()));
            }
        }
        for w in self.chain.windows(2) {
            if !w[0].0.lt(&w[1].0) {
                return Err(Error::MalformedMonomial("chain is not strictly increasing".into()));
            }
        }
        if self.node.is_some() && (self.k_exp > 0 || self.sigma.is_some()) {
            return Err(Error::MalformedMonomial("node classes meet K and σ trivially".into()));
        }
        Ok(())
    }

    /// Debug text, e.g. `K^2·σ_1^1·C^{(0,1)}_{(1,{1})}`.
    pub fn render(&self, space: &MarkedSpace) -> String {
        let mut parts = Vec::new();
        if self.k_exp > 0 {
            parts.push(format!("K^{}", self.k_exp));
        }
        if let Some((p, b)) = self.sigma {
            parts.push(format!("σ_{}^{}", space.label(p), b));
        }
        if !self.chain.is_empty() {
            let sup: Vec<String> = self.chain.iter().map(|(_, i, j)| format!("({i},{j})")).collect();
            let sub: Vec<String> = self.chain.iter().map(|(b, _, _)| b.render(space)).collect();
            parts.push(format!("C^{{{}}}_{{{}}}", sup.join(""), sub.join("")));
        }
        match self.node {
            Some(NodeClass::A { bip, i, j }) => parts.push(format!("A^{{({i},{j})}}_{{{}}}", bip.render(space))),
            Some(NodeClass::B { i, j }) => parts.push(format!("B^{{({i},{j})}}")),
            None => {}
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("·")
        }
    }
}

/// Multiplies a monomial by an elementary factor, applying the vanishing
/// relations and the excess rule `C^2 = -ψ_• - ψ_★` on repeated entries.
pub fn mul_umonomial(m: &UMonomial, f: Factor) -> Result<Vec<(UMonomial, Rational)>> {
    if m.node.is_some() {
        return match f {
            Factor::K | Factor::Sigma(_) => Ok(Vec::new()),
            Factor::C(_) => Err(Error::MalformedMonomial("products of node classes with C are not modeled".into())),
        };
    }
    match f {
        Factor::K => {
            if m.sigma.is_some() {
                return Ok(Vec::new());
            }
            let mut out = m.clone();
            out.k_exp += 1;
            Ok(vec![(out, Rational::one())])
        }
        Factor::Sigma(p) => {
            if m.k_exp > 0 || m.chain.iter().any(|(c, _, _)| c.s.contains(p)) {
                return Ok(Vec::new());
            }
            let sigma = match m.sigma {
                None => (p, 1),
                Some((q, b)) if q == p => (p, b + 1),
                Some(_) => return Ok(Vec::new()),
            };
            let mut out = m.clone();
            out.sigma = Some(sigma);
            Ok(vec![(out, Rational::one())])
        }
        Factor::C(b) => {
            if let Some((p, _)) = m.sigma {
                if b.s.contains(p) {
                    return Ok(Vec::new());
                }
            }
            if m.chain.iter().any(|(c, _, _)| !c.comparable(&b)) {
                return Ok(Vec::new());
            }
            if let Some(pos) = m.chain.iter().position(|(c, _, _)| *c == b) {
                let (_, i, j) = m.chain[pos];
                let mut left = m.clone();
                left.chain[pos] = (b, i + 1, j);
                let mut right = m.clone();
                right.chain[pos] = (b, i, j + 1);
                return Ok(vec![(left, Rational::from(-1)), (right, Rational::from(-1))]);
            }
            let pos = m.chain.iter().position(|(c, _, _)| b.lt(c)).unwrap_or(m.chain.len());
            let mut out = m.clone();
            out.chain.insert(pos, (b, 0, 0));
            Ok(vec![(out, Rational::one())])
        }
    }
}

/// Adds `c · m` into `sum`, dropping cancelled entries.
pub fn add_term(sum: &mut FormalSum, m: UMonomial, c: Rational) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match sum.entry(m) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += &c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// `sum · (Σ c_f f)`, keeping monomials of degree at most `max_degree`.
pub fn mul_linear(sum: &FormalSum, factors: &[(Factor, Rational)], max_degree: u32) -> Result<FormalSum> {
    let mut out = FormalSum::new();
    for (m, c) in sum {
        if m.degree() + 1 > max_degree {
            continue;
        }
        for (f, cf) in factors {
            if cf.is_zero() {
                continue;
            }
            for (prod, s) in mul_umonomial(m, *f)? {
                add_term(&mut out, prod, c * cf * s);
            }
        }
    }
    Ok(out)
}

/// Pushforward along the forgetful map of a monomial without node class.
pub fn push_forward(space: &Arc<MarkedSpace>, m: &UMonomial) -> Result<TautClass> {
    m.validate()?;
    if m.node.is_some() {
        return Err(Error::MalformedMonomial("node-class monomials need push_forward_node".into()));
    }
    let chain = m.chain_entries();
    let mut exps = m.exps();
    let mut out = TautClass::zero(space);
    if let Some((p, b)) = m.sigma {
        let mut g = chain_graph(space, &chain, &exps, Tail::Plain).expect("plain tail");
        g.leg_psi[p.index()] += b - 1;
        out.add_graph(&g, &sign(b - 1))?;
    } else if m.k_exp > 0 {
        let g = chain_graph(space, &chain, &exps, Tail::Kappa(m.k_exp - 1)).expect("kappa tail");
        out.add_graph(&g, &Rational::one())?;
    } else if let Some(last) = exps.last_mut() {
        if last.1 > 0 {
            last.1 -= 1;
            let g = chain_graph(space, &chain, &exps, Tail::Plain).expect("plain tail");
            out.add_graph(&g, &Rational::one())?;
        }
    }
    Ok(out)
}

/// Pushforward of `node · m` for a pure chain monomial `m`.
pub fn push_forward_node(space: &Arc<MarkedSpace>, node: &NodeClass, m: &UMonomial) -> Result<TautClass> {
    m.validate()?;
    if !m.is_pure_chain() {
        return Err(Error::MalformedMonomial("node classes pair only with C-chains".into()));
    }
    let mut chain = m.chain_entries();
    let mut exps = m.exps();
    let mut out = TautClass::zero(space);
    match *node {
        NodeClass::A { bip, i, j } => {
            let last = chain.last().copied();
            if last.is_none_or(|l| l.lt(&bip)) {
                chain.push(bip);
                exps.push((i, j));
                let g = chain_graph(space, &chain, &exps, Tail::Plain).expect("plain tail");
                out.add_graph(&g, &Rational::one())?;
            } else if last == Some(bip) && exps.last().unwrap().1 == 0 {
                let (ir, _) = *exps.last().unwrap();
                *exps.last_mut().unwrap() = (ir + i + 1, j);
                let g = chain_graph(space, &chain, &exps, Tail::Plain).expect("plain tail");
                out.add_graph(&g, &Rational::from(-1))?;
            }
        }
        NodeClass::B { i, j } => {
            if let Some(g) = chain_graph(space, &chain, &exps, Tail::Loop(i, j)) {
                out.add_graph(&g, &Rational::one())?;
            }
        }
    }
    Ok(out)
}

/// Pushforward of a formal sum of monomials without node classes.
pub fn push_forward_sum(space: &Arc<MarkedSpace>, sum: &FormalSum) -> Result<TautClass> {
    let mut out = TautClass::zero(space);
    for (m, c) in sum {
        out.add_scaled(&push_forward(space, m)?, c)?;
    }
    Ok(out)
}

/// Every node class `A_{l,T}^{(i,j)}` (all stable `(l,T)`) and `B^{(i,j)}`
/// with exponents `(i, j)`.
pub fn node_classes(space: &MarkedSpace, i: u32, j: u32) -> Vec<NodeClass> {
    let mut out: Vec<NodeClass> =
        stable_bipartitions(space).into_iter().map(|bip| NodeClass::A { bip, i, j }).collect();
    out.push(NodeClass::B { i, j });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::Chain;
    use crate::strata::{bold_x, bold_z};

    fn space(g: u32, n: usize) -> Arc<MarkedSpace> {
        Arc::new(MarkedSpace::numbered(g, n).unwrap())
    }

    fn bp(s: &MarkedSpace, h: i64, set: &[&str]) -> Bipartition {
        Bipartition::from_labels(s, h, set).unwrap()
    }

    fn power(f: Factor, k: u32) -> FormalSum {
        let mut sum = FormalSum::new();
        sum.insert(UMonomial::one(), Rational::one());
        for _ in 0..k {
            sum = mul_linear(&sum, &[(f, Rational::one())], 100).unwrap();
        }
        sum
    }

    #[test]
    fn incomparable_components_vanish() {
        let s = space(2, 2);
        let m = mul_umonomial(&UMonomial::one(), Factor::C(bp(&s, 0, &["1", "2"]))).unwrap();
        assert!(mul_umonomial(&m[0].0, Factor::C(bp(&s, 1, &["1"]))).unwrap().is_empty());
    }

    #[test]
    fn self_intersection_is_excess() {
        let s = space(2, 2);
        let b = bp(&s, 1, &["1"]);
        let sq = power(Factor::C(b), 2);
        let mut want = FormalSum::new();
        want.insert(UMonomial { chain: vec![(b, 1, 0)], ..Default::default() }, Rational::from(-1));
        want.insert(UMonomial { chain: vec![(b, 0, 1)], ..Default::default() }, Rational::from(-1));
        assert_eq!(sq, want);
    }

    #[test]
    fn sigma_powers_are_kept() {
        let s = space(1, 1);
        let p = s.anchor();
        let sq = power(Factor::Sigma(p), 2);
        let (m, c) = sq.iter().next().unwrap();
        assert_eq!(m.sigma, Some((p, 2)));
        assert!(c.is_one());
    }

    #[test]
    fn basic_pushforwards() {
        let s = space(2, 2);
        let p = s.marking("2").unwrap();
        let sigma = UMonomial { sigma: Some((p, 1)), ..Default::default() };
        assert_eq!(push_forward(&s, &sigma).unwrap(), TautClass::one(&s));
        let k2 = UMonomial { k_exp: 2, ..Default::default() };
        assert_eq!(push_forward(&s, &k2).unwrap(), TautClass::kappa(&s, 1));
        let b = bp(&s, 1, &["1"]);
        let flat = UMonomial { chain: vec![(b, 1, 0)], ..Default::default() };
        assert!(push_forward(&s, &flat).unwrap().is_zero());
        assert!(push_forward(&s, &UMonomial::one()).unwrap().is_zero());
    }

    #[test]
    fn node_pushforwards() {
        let s = space(2, 2);
        let lo = bp(&s, 1, &["1"]);
        let hi = bp(&s, 1, &["1", "2"]);
        let a = NodeClass::A { bip: lo, i: 0, j: 0 };
        let want = bold_x(&s, &Chain::new(vec![lo]).unwrap(), &[1]).unwrap();
        assert_eq!(push_forward_node(&s, &a, &UMonomial::one()).unwrap(), want);
        let b = NodeClass::B { i: 0, j: 0 };
        let y = chain_graph(&s, &[], &[], Tail::Loop(0, 0)).unwrap();
        let want = TautClass::from_graph(&s, &y, &Rational::one()).unwrap();
        assert_eq!(push_forward_node(&s, &b, &UMonomial::one()).unwrap(), want);
        let below = NodeClass::A { bip: lo, i: 0, j: 0 };
        let m = UMonomial { chain: vec![(hi, 0, 0)], ..Default::default() };
        assert!(push_forward_node(&s, &below, &m).unwrap().is_zero());
        // merged case
        let m = UMonomial { chain: vec![(lo, 0, 0)], ..Default::default() };
        let got = push_forward_node(&s, &a, &m).unwrap();
        let g = chain_graph(&s, &[lo], &[(1, 0)], Tail::Plain).unwrap();
        assert_eq!(got, TautClass::from_graph(&s, &g, &Rational::from(-1)).unwrap());
    }

    #[test]
    fn powers_push_forward_to_bold_forms() {
        let s = space(3, 2);
        let all = stable_bipartitions(&s);
        for chain in crate::combin::chains_from(&all, 2).into_iter().take(6) {
            for k1 in 1..=2u32 {
                for k2 in 1..=2u32 {
                    let mut sum = FormalSum::new();
                    sum.insert(UMonomial::one(), Rational::one());
                    for (b, k) in chain.entries().iter().zip([k1, k2]) {
                        for _ in 0..k {
                            sum = mul_linear(&sum, &[(Factor::C(*b), Rational::one())], 100).unwrap();
                        }
                    }
                    for kb in 0..=2u32 {
                        let mut with_k = sum.clone();
                        for _ in 0..kb {
                            with_k = mul_linear(&with_k, &[(Factor::K, Rational::one())], 100).unwrap();
                        }
                        let got = push_forward_sum(&s, &with_k).unwrap();
                        let want = bold_z(&s, &chain, &[k1, k2], kb as i64 - 1).unwrap();
                        assert_eq!(got, want, "k=({k1},{k2}) K^{kb}");
                    }
                }
            }
        }
    }
}
