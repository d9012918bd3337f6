//! Closed-form Chern character of `R•π_* O(D)`, inversion to Chern classes,
//! Thom–Porteous determinants and Brill–Noether pullbacks.

mod bn;
mod series;

pub use bn::{bn_pullback, BnClass, BnMode, BnRequest};
pub use series::{
    invert_to_chern, newton_recover, thom_porteous, GradedRing, Poly, RationalField, SymbolRing, TautRing,
};

use std::sync::Arc;

use rayon::prelude::*;

use crate::arith::{bernoulli_number, bernoulli_poly, factorial, sign, Rational};
use crate::combin::{chains_from, compositions, stable_bipartitions, Bipartition, Chain, MarkedSpace};
use crate::error::{Error, Result};
use crate::strata::{attach_leg_psi, bold_x, bold_xtilde, bold_ytilde, bold_z, TautClass};
use crate::ucurve::DivisorSpec;

/// Chern character components `ch_0..=ch_smax`, of `F` or of `-F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedChernData {
    components: Vec<TautClass>,
    negated: bool,
}

impl GradedChernData {
    pub fn new(components: Vec<TautClass>, negated: bool) -> Self {
        GradedChernData { components, negated }
    }

    pub fn components(&self) -> &[TautClass] {
        &self.components
    }

    pub fn degree(&self, s: usize) -> Option<&TautClass> {
        self.components.get(s)
    }

    pub fn smax(&self) -> usize {
        self.components.len().saturating_sub(1)
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    /// `ch(-F)` from `ch(F)` and back.
    pub fn negated(&self) -> Self {
        GradedChernData { components: self.components.iter().map(|c| -c).collect(), negated: !self.negated }
    }
}

fn zeros(space: &Arc<MarkedSpace>, n: usize) -> Vec<TautClass> {
    (0..n).map(|_| TautClass::zero(space)).collect()
}

/// `Π a_j^{k_j} / k_j!` along the chain.
fn chain_weight(div: &DivisorSpec, chain: &Chain, k: &[u32]) -> Rational {
    chain
        .entries()
        .iter()
        .zip(k)
        .map(|(b, &kj)| Rational::from(div.a(b)).pow(kj) / Rational::from(factorial(kj)))
        .product()
}

/// Every `(chain, k)` with nonzero chain weight and `Σ k ≤ top`.
fn index_tuples(div: &DivisorSpec, top: u32) -> Vec<(Chain, Vec<u32>)> {
    let pool: Vec<Bipartition> = div.a_values().keys().copied().collect();
    let mut out = vec![(Chain::empty(), Vec::new())];
    for r in 1..=top as usize {
        let chains = chains_from(&pool, r);
        if chains.is_empty() {
            break;
        }
        for a in r as u32..=top {
            let ks = compositions(a, r);
            for c in &chains {
                out.extend(ks.iter().map(|k| (c.clone(), k.clone())));
            }
        }
    }
    out
}

/// Scalars shared by every index tuple, indexed by `b = 0..=top`.
struct Scalars {
    /// `B_b(ℓ) / b!`
    bern_poly: Vec<Rational>,
    /// `B_b / b!`
    bern: Vec<Rational>,
    /// per marking, `Σ_{α+β=b} (-1)^β B_β(ℓ) d_p^α / (α! β!)`
    leg: Vec<Vec<Rational>>,
}

impl Scalars {
    fn new(div: &DivisorSpec, top: u32) -> Self {
        let bern_poly: Vec<Rational> =
            (0..=top).map(|b| bernoulli_poly(b, div.ell) / Rational::from(factorial(b))).collect();
        let bern = (0..=top).map(|b| bernoulli_number(b) / Rational::from(factorial(b))).collect();
        let leg = div
            .space()
            .markings()
            .map(|p| {
                let dp = Rational::from(div.d(p));
                (0..=top)
                    .map(|b| {
                        (0..=b)
                            .map(|beta| {
                                let alpha = b - beta;
                                sign(beta) * &bern_poly[beta as usize] * dp.pow(alpha)
                                    / Rational::from(factorial(alpha))
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Scalars { bern_poly, bern, leg }
    }
}

/// Ω and Φ contributions of one `(chain, k)`, by degree.
fn tuple_contribution(
    div: &DivisorSpec,
    all_bips: &[Bipartition],
    scalars: &Scalars,
    chain: &Chain,
    k: &[u32],
    smax: u32,
) -> Result<TheoremParts> {
    let space = div.space();
    let top = smax + 1;
    let a: u32 = k.iter().sum();
    let weight = chain_weight(div, chain, k);
    let mut omega = zeros(space, smax as usize + 1);
    let mut phi = zeros(space, smax as usize + 1);
    let x = bold_x(space, chain, k)?;
    let outside: Vec<_> = match chain.last() {
        Some(last) => space.markings().filter(|p| !last.s.contains(*p)).collect(),
        None => space.markings().collect(),
    };
    for b in 0..=top - a {
        let t = a + b;
        if t == 0 {
            continue;
        }
        let slot = &mut omega[(t - 1) as usize];

        let w = &weight * &scalars.bern_poly[b as usize];
        slot.add_scaled(&bold_z(space, chain, k, b as i64 - 1)?, &w)?;

        if b > 0 {
            for &p in &outside {
                let c = &scalars.leg[p.index()][b as usize];
                if c.is_zero() {
                    continue;
                }
                let c = &(c * &weight) * &sign(b - 1);
                slot.add_scaled(&attach_leg_psi(&x, p, b - 1)?, &c)?;
            }
        }

        if b >= 2 && b % 2 == 0 {
            let slot = &mut phi[(t - 1) as usize];
            let wb = &weight * &scalars.bern[b as usize];
            for e in 0..=b - 2 {
                let (i, j) = (e, b - 2 - e);
                let we = &wb * &sign(e);
                for extra in all_bips.iter().filter(|l| chain.last().is_none_or(|last| last.lt(l))) {
                    slot.add_scaled(&bold_xtilde(space, Some(chain), extra, k, i, j)?, &we)?;
                }
                slot.add_scaled(&bold_ytilde(space, chain, k, i, j)?, &we)?;
                if let Some(last) = chain.last() {
                    let kr = *k.last().unwrap();
                    let merged = bold_xtilde(space, Some(&chain.truncated()), last, &k[..k.len() - 1], i + kr, j)?;
                    slot.add_scaled(&merged, &(&we * &sign(kr)))?;
                }
            }
        }
    }
    Ok(TheoremParts { omega, phi })
}

/// The two summands of the closed formula, each by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremParts {
    pub omega: Vec<TautClass>,
    pub phi: Vec<TautClass>,
}

pub fn theorem_parts(div: &DivisorSpec, smax: u32) -> Result<TheoremParts> {
    let space = div.space();
    if smax > space.dim() {
        return Err(Error::DegreeOutOfRange { requested: smax as i64, dim: space.dim() });
    }
    let all_bips = stable_bipartitions(space);
    let tuples = index_tuples(div, smax + 1);
    let scalars = Scalars::new(div, smax + 1);
    let parts: Vec<TheoremParts> = tuples
        .par_iter()
        .map(|(chain, k)| tuple_contribution(div, &all_bips, &scalars, chain, k, smax))
        .collect::<Result<_>>()?;
    let mut total = TheoremParts { omega: zeros(space, smax as usize + 1), phi: zeros(space, smax as usize + 1) };
    for part in &parts {
        for s in 0..=smax as usize {
            total.omega[s] += &part.omega[s];
            total.phi[s] += &part.phi[s];
        }
    }
    Ok(total)
}

/// `ch_s(R•π_* O(D))` for `s = 0..=smax` from the closed formula: degree `s`
/// collects the index tuples with `a + b = s + 1`.
pub fn chern_char_theorem(div: &DivisorSpec, smax: u32) -> Result<GradedChernData> {
    let TheoremParts { mut omega, phi } = theorem_parts(div, smax)?;
    for (o, p) in omega.iter_mut().zip(&phi) {
        *o += p;
    }
    Ok(GradedChernData::new(omega, false))
}
