//! Chain-shaped generators and their signed-binomial aggregates.

use std::sync::Arc;

use crate::arith::{binomial, sign, Rational};
use crate::combin::{Bipartition, Chain, MarkedSpace, Marking};
use crate::error::{Error, Result};

use super::class::TautClass;
use super::graph::{DecoratedGraph, Edge, HalfEdge, Vertex};

/// What sits on the last vertex of a chain graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Plain,
    Kappa(u32),
    /// A self-loop with the given half-edge exponents; the last vertex loses
    /// one unit of genus.
    Loop(u32, u32),
}

/// The chain graph with vertices `(h_1,S_1)`, `(h_2-h_1, S_2\S_1)`, ...,
/// `(g-h_r, P\S_r)` and edge `j` carrying `(i_j, j_j)`, the first exponent on
/// the side nearer the anchor. Returns `None` when the loop tail would need
/// negative genus.
pub fn chain_graph(
    space: &MarkedSpace,
    chain: &[Bipartition],
    exps: &[(u32, u32)],
    tail: Tail,
) -> Option<DecoratedGraph> {
    assert_eq!(chain.len(), exps.len(), "one exponent pair per chain entry");
    let mut vertices = Vec::with_capacity(chain.len() + 1);
    let (mut h_prev, mut s_prev) = (0u32, crate::combin::MarkingSet::EMPTY);
    for b in chain {
        vertices.push(Vertex::new(b.h - h_prev, b.s.difference(s_prev)));
        h_prev = b.h;
        s_prev = b.s;
    }
    let mut last = Vertex::new(space.genus() - h_prev, space.all().difference(s_prev));
    let mut edges: Vec<Edge> =
        exps.iter().enumerate().map(|(j, &(i, k))| Edge(HalfEdge::new(j, i), HalfEdge::new(j + 1, k))).collect();
    match tail {
        Tail::Plain => {}
        Tail::Kappa(b) => last.kappa.push(b),
        Tail::Loop(i, j) => {
            if last.genus == 0 {
                return None;
            }
            last.genus -= 1;
            let v = vertices.len();
            edges.push(Edge(HalfEdge::new(v, i), HalfEdge::new(v, j)));
        }
    }
    vertices.push(last);
    Some(DecoratedGraph { vertices, edges, leg_psi: vec![0; space.n_markings()] })
}

fn check_len(chain: &Chain, k: &[u32]) -> Result<()> {
    if chain.len() != k.len() {
        return Err(Error::LengthMismatch { expected: chain.len(), got: k.len() });
    }
    if k.contains(&0) {
        return Err(Error::MalformedMonomial("composition parts must be positive".into()));
    }
    Ok(())
}

/// Visits every `(i_1..i_r)` with `0 <= i_j <= k_j - 1` (the last bound
/// lowered by `last_drop`), passing the exponent pairs
/// `(i_j, k_j - 1 - i_j)` (last: `k_r - 1 - last_drop - i_r`) and the weight
/// `Π (-1)^{k_j-1} C(k_j-1, i_j)`.
fn signed_binomial_sum(k: &[u32], last_drop: u32, f: &mut dyn FnMut(&[(u32, u32)], &Rational)) {
    fn go(
        k: &[u32],
        last_drop: u32,
        idx: usize,
        exps: &mut Vec<(u32, u32)>,
        w: Rational,
        f: &mut dyn FnMut(&[(u32, u32)], &Rational),
    ) {
        if idx == k.len() {
            f(exps, &w);
            return;
        }
        let kj = k[idx];
        let drop = if idx + 1 == k.len() { last_drop } else { 0 };
        if kj - 1 < drop {
            return;
        }
        let top = kj - 1 - drop;
        // the binomial keeps k_j - 1 even when the top exponent is lowered
        for i in 0..=top {
            let c = Rational::from(binomial(kj - 1, i)) * sign(kj - 1);
            exps.push((i, top - i));
            go(k, last_drop, idx + 1, exps, &w * &c, f);
            exps.pop();
        }
    }
    go(k, last_drop, 0, &mut Vec::with_capacity(k.len()), Rational::one(), f);
}

/// Bold X: the fundamental class for the empty chain, else the signed
/// binomial sum of chain graphs with exponents `(i_j, k_j-1-i_j)`.
pub fn bold_x(space: &Arc<MarkedSpace>, chain: &Chain, k: &[u32]) -> Result<TautClass> {
    check_len(chain, k)?;
    if chain.is_empty() {
        return Ok(TautClass::one(space));
    }
    let mut out = TautClass::zero(space);
    let mut err = None;
    signed_binomial_sum(k, 0, &mut |exps, w| {
        let g = chain_graph(space, chain.entries(), exps, Tail::Plain).expect("plain tail");
        if let Err(e) = out.add_graph(&g, w) {
            err = Some(e);
        }
    });
    err.map_or(Ok(out), Err)
}

/// Bold Z with `b >= -1`, using `κ_{-1}ψ^t = ψ^{t-1}` for `b = -1`.
pub fn bold_z(space: &Arc<MarkedSpace>, chain: &Chain, k: &[u32], b: i64) -> Result<TautClass> {
    check_len(chain, k)?;
    if b < -1 {
        return Err(Error::MalformedMonomial(format!("κ index {b} below -1")));
    }
    if chain.is_empty() {
        return Ok(if b < 0 { TautClass::zero(space) } else { TautClass::kappa(space, b as u32) });
    }
    let mut out = TautClass::zero(space);
    let mut err = None;
    let (drop, tail) = if b < 0 { (1, Tail::Plain) } else { (0, Tail::Kappa(b as u32)) };
    signed_binomial_sum(k, drop, &mut |exps, w| {
        let g = chain_graph(space, chain.entries(), exps, tail).expect("no loop tail");
        if let Err(e) = out.add_graph(&g, w) {
            err = Some(e);
        }
    });
    err.map_or(Ok(out), Err)
}

/// Bold Ỹ: chain graphs ending in a loop with exponents `(i, j)`.
pub fn bold_ytilde(space: &Arc<MarkedSpace>, chain: &Chain, k: &[u32], i: u32, j: u32) -> Result<TautClass> {
    check_len(chain, k)?;
    let mut out = TautClass::zero(space);
    let mut err = None;
    signed_binomial_sum(k, 0, &mut |exps, w| {
        if let Some(g) = chain_graph(space, chain.entries(), exps, Tail::Loop(i, j)) {
            if let Err(e) = out.add_graph(&g, w) {
                err = Some(e);
            }
        }
    });
    err.map_or(Ok(out), Err)
}

/// Bold X̃: the chain extended by `extra`, whose edge carries `(i, j)`.
/// `chain = None` encodes the index `r = -1`, for which the class is zero.
pub fn bold_xtilde(
    space: &Arc<MarkedSpace>,
    chain: Option<&Chain>,
    extra: &Bipartition,
    k: &[u32],
    i: u32,
    j: u32,
) -> Result<TautClass> {
    let Some(chain) = chain else {
        return Ok(TautClass::zero(space));
    };
    check_len(chain, k)?;
    let extended = chain.extended(*extra)?;
    let mut out = TautClass::zero(space);
    let mut err = None;
    signed_binomial_sum(k, 0, &mut |exps, w| {
        let mut all = exps.to_vec();
        all.push((i, j));
        let g = chain_graph(space, extended.entries(), &all, Tail::Plain).expect("plain tail");
        if let Err(e) = out.add_graph(&g, w) {
            err = Some(e);
        }
    });
    err.map_or(Ok(out), Err)
}

/// Multiplies every generator by `ψ_p^e`.
pub fn attach_leg_psi(c: &TautClass, p: Marking, e: u32) -> Result<TautClass> {
    if e == 0 {
        return Ok(c.clone());
    }
    c.map_terms(|g, x, out| {
        let mut h = g.clone();
        h.leg_psi[p.index()] += e;
        out.add_graph(&h, x)
    })
}
