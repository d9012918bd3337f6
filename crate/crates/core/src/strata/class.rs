use std::collections::BTreeMap;
use std::ops::{AddAssign, Neg, SubAssign};
use std::sync::Arc;

use crate::arith::Rational;
use crate::combin::{MarkedSpace, Marking};
use crate::error::{Error, Result};

use super::graph::{Canonical, DecoratedGraph};

/// A finite rational combination of canonical decorated generators.
///
/// Each generator stands for `(1/|Aut Γ|) ξ_Γ*(θ)`, with `Aut Γ` the
/// automorphism group of the undecorated graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TautClass {
    space: Arc<MarkedSpace>,
    terms: BTreeMap<DecoratedGraph, Rational>,
}

impl TautClass {
    pub fn zero(space: &Arc<MarkedSpace>) -> Self {
        TautClass { space: Arc::clone(space), terms: BTreeMap::new() }
    }

    /// The fundamental class.
    pub fn one(space: &Arc<MarkedSpace>) -> Self {
        let mut c = Self::zero(space);
        c.terms.insert(DecoratedGraph::trivial(space), Rational::one());
        c
    }

    /// `coeff` times the class of `graph`, canonicalized.
    pub fn from_graph(space: &Arc<MarkedSpace>, graph: &DecoratedGraph, coeff: &Rational) -> Result<Self> {
        let mut c = Self::zero(space);
        c.add_graph(graph, coeff)?;
        Ok(c)
    }

    /// κ_b on the single-vertex graph.
    pub fn kappa(space: &Arc<MarkedSpace>, b: u32) -> Self {
        let mut g = DecoratedGraph::trivial(space);
        g.vertices[0].kappa.push(b);
        Self::from_graph(space, &g, &Rational::one()).expect("trivial graph is valid")
    }

    /// ψ_p^e on the single-vertex graph.
    pub fn psi(space: &Arc<MarkedSpace>, p: Marking, e: u32) -> Self {
        let mut g = DecoratedGraph::trivial(space);
        g.leg_psi[p.index()] = e;
        Self::from_graph(space, &g, &Rational::one()).expect("trivial graph is valid")
    }

    pub fn space(&self) -> &Arc<MarkedSpace> {
        &self.space
    }

    /// Adds `coeff · [graph]` after canonicalizing `graph`.
    pub fn add_graph(&mut self, graph: &DecoratedGraph, coeff: &Rational) -> Result<()> {
        if coeff.is_zero() {
            graph.validate(&self.space)?;
            return Ok(());
        }
        match graph.canonicalize(&self.space)? {
            Canonical::Zero => Ok(()),
            Canonical::Term { graph, scalar } => {
                self.add_canonical(graph, coeff * &Rational::from(scalar));
                Ok(())
            }
        }
    }

    /// Adds a term whose graph is already canonical.
    pub(crate) fn add_canonical(&mut self, graph: DecoratedGraph, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(graph) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&mut self, other: &TautClass) -> Result<()> {
        self.check_space(other)?;
        self.add_scaled_unchecked(other, &Rational::one());
        Ok(())
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &TautClass, c: &Rational) -> Result<()> {
        self.check_space(other)?;
        self.add_scaled_unchecked(other, c);
        Ok(())
    }

    fn add_scaled_unchecked(&mut self, other: &TautClass, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (g, x) in &other.terms {
            self.add_canonical(g.clone(), x * c);
        }
    }

    pub fn check_space(&self, other: &TautClass) -> Result<()> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(Error::MismatchedSpaces)
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.space);
        out.add_scaled_unchecked(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DecoratedGraph, &Rational)> {
        self.terms.iter()
    }

    /// Coefficient of a canonical generator (zero if absent).
    pub fn coeff(&self, graph: &DecoratedGraph) -> Rational {
        self.terms.get(graph).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of the generator obtained by canonicalizing `graph`.
    pub fn coeff_of(&self, graph: &DecoratedGraph) -> Result<Rational> {
        match graph.canonicalize(&self.space)? {
            Canonical::Zero => Ok(Rational::zero()),
            Canonical::Term { graph, scalar } => Ok(&self.coeff(&graph) / &Rational::from(scalar)),
        }
    }

    /// The codimension-`s` part.
    pub fn degree_part(&self, s: u32) -> Self {
        TautClass {
            space: Arc::clone(&self.space),
            terms: self.terms.iter().filter(|(g, _)| g.codim() == s).map(|(g, c)| (g.clone(), c.clone())).collect(),
        }
    }

    /// True if every generator has codimension `s`.
    pub fn is_homogeneous(&self, s: u32) -> bool {
        self.terms.keys().all(|g| g.codim() == s)
    }

    /// Applies `f` to every generator and collects the results.
    pub fn map_terms<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&DecoratedGraph, &Rational, &mut TautClass) -> Result<()>,
    {
        let mut out = Self::zero(&self.space);
        for (g, c) in &self.terms {
            f(g, c, &mut out)?;
        }
        Ok(out)
    }
}

impl AddAssign<&TautClass> for TautClass {
    /// Panics if the classes live on different spaces.
    fn add_assign(&mut self, rhs: &TautClass) {
        self.try_add(rhs).expect("adding classes on different spaces");
    }
}

impl SubAssign<&TautClass> for TautClass {
    fn sub_assign(&mut self, rhs: &TautClass) {
        self.add_scaled(rhs, &Rational::from(-1)).expect("subtracting classes on different spaces");
    }
}

impl Neg for &TautClass {
    type Output = TautClass;
    fn neg(self) -> TautClass {
        self.scaled(&Rational::from(-1))
    }
}

impl Neg for TautClass {
    type Output = TautClass;
    fn neg(self) -> TautClass {
        -&self
    }
}
