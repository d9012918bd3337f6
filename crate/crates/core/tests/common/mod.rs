#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use tautchern_core::combin::{stable_bipartitions, MarkedSpace};
use tautchern_core::strata::{chain_graph, Canonical, DecoratedGraph, Tail};
use tautchern_core::ucurve::DivisorSpec;

pub fn space(g: u32, n: usize) -> Arc<MarkedSpace> {
    Arc::new(MarkedSpace::numbered(g, n).unwrap())
}

/// Small generators: κ_1, ψ_p, and decorated one-edge and loop graphs.
pub fn generator_pool(space: &MarkedSpace) -> Vec<DecoratedGraph> {
    let mut raw = Vec::new();
    let mut k = DecoratedGraph::trivial(space);
    k.vertices[0].kappa.push(1);
    raw.push(k);
    for m in space.markings() {
        let mut p = DecoratedGraph::trivial(space);
        p.leg_psi[m.index()] = 1;
        raw.push(p);
    }
    for b in stable_bipartitions(space) {
        for exps in [(0, 0), (1, 0), (0, 1)] {
            raw.extend(chain_graph(space, &[b], &[exps], Tail::Plain));
        }
        raw.extend(chain_graph(space, &[b], &[(0, 0)], Tail::Kappa(1)));
    }
    for tail in [Tail::Loop(0, 0), Tail::Loop(1, 0)] {
        raw.extend(chain_graph(space, &[], &[], tail));
    }
    raw.into_iter()
        .filter_map(|g| match g.canonicalize(space).unwrap() {
            Canonical::Term { graph, .. } => Some(graph),
            Canonical::Zero => None,
        })
        .collect()
}

/// The codimension-one generators of `generator_pool`.
pub fn divisor_pool(space: &MarkedSpace) -> Vec<DecoratedGraph> {
    generator_pool(space).into_iter().filter(|g| g.codim() == 1).collect()
}

/// Divisor with ℓ, d_p and every a in `lo..=hi`.
pub fn random_divisor<R: Rng>(rng: &mut R, space: &Arc<MarkedSpace>, lo: i64, hi: i64) -> DivisorSpec {
    let d = (0..space.n_markings()).map(|_| rng.gen_range(lo..=hi)).collect();
    let a: BTreeMap<_, _> = stable_bipartitions(space).into_iter().map(|b| (b, rng.gen_range(lo..=hi))).collect();
    DivisorSpec::new(space, rng.gen_range(lo..=hi), d, a).unwrap()
}
