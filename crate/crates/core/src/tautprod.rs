//! Products of decorated strata classes by excess intersection over common
//! degenerations.
//!
//! With `[Γ, θ] = ξ_Γ*(θ)/|Aut Γ|`, the product of two generators is
//!
//! `[A,α]·[B,β] = Σ_Γ Σ_{(a,b)} [Γ, a*α · b*β · Π_{e∈A∩B} (-ψ_e' - ψ_e'')] / (|Aut A| |Aut B|)`
//!
//! where `Γ` runs over isomorphism classes of stable graphs and `(a,b)` over
//! all pairs of an `A`-structure and a `B`-structure on `Γ` whose edge sets
//! cover `E(Γ)`. A structure is a choice of edges to keep plus an isomorphism
//! of the contracted graph with the target. ψ classes pull back to the
//! matching half-edge or leg; κ_b pulls back to the sum of κ_b over the
//! vertices of `Γ` lying over the vertex.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::arith::Rational;
use crate::combin::{MarkedSpace, MarkingSet};
use crate::error::Result;
use crate::strata::{DecoratedGraph, Edge, HalfEdge, TautClass, Vertex};

/// Identification of a target graph inside `Γ`.
#[derive(Debug, Clone)]
struct Structure {
    /// For each target edge and side, the `Γ` edge and side it corresponds to.
    edge_map: Vec<[(usize, usize); 2]>,
    /// For each target vertex, the `Γ` vertices contracted onto it.
    preimage: Vec<Vec<usize>>,
    /// Bitmask of the `Γ` edges that survive.
    kept: u64,
}

/// `Γ` with the edges outside `kept` contracted.
struct Contracted {
    vertex_of: Vec<usize>,
    genus: Vec<u32>,
    legs: Vec<MarkingSet>,
    /// Surviving `Γ` edge indices with their endpoints in the contracted graph.
    edges: Vec<(usize, usize, usize)>,
}

fn contract(gamma: &DecoratedGraph, kept: u64) -> Contracted {
    let nv = gamma.vertices.len();
    let mut parent: Vec<usize> = (0..nv).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for (k, e) in gamma.edges.iter().enumerate() {
        if kept & (1 << k) == 0 {
            let (a, b) = (find(&mut parent, e.0.vertex), find(&mut parent, e.1.vertex));
            parent[a] = b;
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut vertex_of = vec![0; nv];
    for v in 0..nv {
        let r = find(&mut parent, v);
        let idx = match roots.iter().position(|&x| x == r) {
            Some(i) => i,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
        vertex_of[v] = idx;
    }
    let n = roots.len();
    let mut genus = vec![0u32; n];
    let mut legs = vec![MarkingSet::EMPTY; n];
    let mut count = vec![0i64; n];
    let mut internal = vec![0i64; n];
    for v in 0..nv {
        genus[vertex_of[v]] += gamma.vertices[v].genus;
        legs[vertex_of[v]] = legs[vertex_of[v]].union(gamma.vertices[v].legs);
        count[vertex_of[v]] += 1;
    }
    let mut edges = Vec::new();
    for (k, e) in gamma.edges.iter().enumerate() {
        if kept & (1 << k) == 0 {
            internal[vertex_of[e.0.vertex]] += 1;
        } else {
            edges.push((k, vertex_of[e.0.vertex], vertex_of[e.1.vertex]));
        }
    }
    for i in 0..n {
        genus[i] += (internal[i] - count[i] + 1) as u32;
    }
    Contracted { vertex_of, genus, legs, edges }
}

fn valences(n: usize, legs: &[MarkingSet], edges: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut val: Vec<usize> = legs.iter().map(|l| l.len()).collect();
    val.resize(n, 0);
    for (u, w) in edges {
        val[u] += 1;
        val[w] += 1;
    }
    val
}

/// All isomorphisms from the contracted graph onto `target`.
fn isomorphisms(h: &Contracted, kept: u64, target: &DecoratedGraph) -> Vec<Structure> {
    let n = h.genus.len();
    if n != target.vertices.len() || h.edges.len() != target.edges.len() {
        return Vec::new();
    }
    let hval = valences(n, &h.legs, h.edges.iter().map(|&(_, u, w)| (u, w)));
    let tlegs: Vec<MarkingSet> = target.vertices.iter().map(|v| v.legs).collect();
    let tval = valences(n, &tlegs, target.edges.iter().map(|e| (e.0.vertex, e.1.vertex)));
    let mut out = Vec::new();
    let mut pi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn assign(
        i: usize,
        pi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        ok: &dyn Fn(usize, usize) -> bool,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if i == pi.len() {
            f(pi);
            return;
        }
        for j in 0..pi.len() {
            if !used[j] && ok(i, j) {
                used[j] = true;
                pi[i] = j;
                assign(i + 1, pi, used, ok, f);
                used[j] = false;
            }
        }
    }
    let ok = |i: usize, j: usize| {
        h.genus[i] == target.vertices[j].genus && h.legs[i] == target.vertices[j].legs && hval[i] == tval[j]
    };
    assign(0, &mut pi, &mut used, &ok, &mut |pi: &[usize]| {
        for edge_map in edge_matchings(h, pi, target) {
            let mut preimage = vec![Vec::new(); n];
            for (w, &hv) in h.vertex_of.iter().enumerate() {
                preimage[pi[hv]].push(w);
            }
            out.push(Structure { edge_map, preimage, kept });
        }
    });
    out
}

/// Edge bijections compatible with the vertex bijection `pi`.
fn edge_matchings(h: &Contracted, pi: &[usize], target: &DecoratedGraph) -> Vec<Vec<[(usize, usize); 2]>> {
    let key = |x: usize, y: usize| (x.min(y), x.max(y));
    let mut bundles: std::collections::BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = Default::default();
    for (idx, &(_, u, w)) in h.edges.iter().enumerate() {
        bundles.entry(key(pi[u], pi[w])).or_default().0.push(idx);
    }
    for (k, e) in target.edges.iter().enumerate() {
        bundles.entry(key(e.0.vertex, e.1.vertex)).or_default().1.push(k);
    }
    if bundles.values().any(|(a, b)| a.len() != b.len()) {
        return Vec::new();
    }
    let bundles: Vec<(Vec<usize>, Vec<usize>)> = bundles.into_values().collect();
    let mut results = Vec::new();
    let mut map = vec![[(0usize, 0usize); 2]; target.edges.len()];

    fn go(
        b: usize,
        bundles: &[(Vec<usize>, Vec<usize>)],
        h: &Contracted,
        pi: &[usize],
        target: &DecoratedGraph,
        map: &mut Vec<[(usize, usize); 2]>,
        results: &mut Vec<Vec<[(usize, usize); 2]>>,
    ) {
        if b == bundles.len() {
            results.push(map.clone());
            return;
        }
        let (hs, ts) = &bundles[b];
        let mut perm = ts.clone();
        permutations(&mut perm, 0, &mut |perm: &[usize]| {
            // each H edge hs[i] goes to target edge perm[i]; loops get both orientations
            let loops: Vec<usize> = (0..hs.len()).filter(|&i| target.edges[perm[i]].is_loop()).collect();
            for flips in 0u32..(1 << loops.len()) {
                for (i, &hk) in hs.iter().enumerate() {
                    let (ge, hu, _) = h.edges[hk];
                    let te = target.edges[perm[i]];
                    let side_at_first = if te.is_loop() {
                        let bit = loops.iter().position(|&l| l == i).unwrap();
                        (flips >> bit) & 1
                    } else if pi[hu] == te.0.vertex {
                        0
                    } else {
                        1
                    } as usize;
                    // target side 0 corresponds to Γ side `side_at_first`
                    map[perm[i]] = [(ge, side_at_first), (ge, 1 - side_at_first)];
                }
                go(b + 1, bundles, h, pi, target, map, results);
            }
        });
    }
    go(0, &bundles, h, pi, target, &mut map, &mut results);
    results
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

/// All target-structures on `gamma`.
fn structures(gamma: &DecoratedGraph, target: &DecoratedGraph) -> Vec<Structure> {
    let ne = gamma.edges.len();
    let keep = target.edges.len();
    if keep > ne {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << ne) {
        if mask.count_ones() as usize != keep {
            continue;
        }
        let h = contract(gamma, mask);
        out.extend(isomorphisms(&h, mask, target));
    }
    out
}

/// Undecorated graphs obtained from `g` by adding one edge.
fn one_edge_degenerations(g: &DecoratedGraph) -> Vec<DecoratedGraph> {
    let mut out = Vec::new();
    for v in 0..g.vertices.len() {
        let vert = &g.vertices[v];
        if vert.genus > 0 {
            let mut d = g.clone();
            d.vertices[v].genus -= 1;
            d.edges.push(Edge(HalfEdge::new(v, 0), HalfEdge::new(v, 0)));
            out.push(d);
        }
        // half-edges at v as (edge, side)
        let halves: Vec<(usize, usize)> = g
            .edges
            .iter()
            .enumerate()
            .flat_map(|(k, e)| {
                let mut hv = Vec::new();
                if e.0.vertex == v {
                    hv.push((k, 0));
                }
                if e.1.vertex == v {
                    hv.push((k, 1));
                }
                hv
            })
            .collect();
        let legs: Vec<_> = vert.legs.iter().collect();
        let items = halves.len() + legs.len();
        let new = g.vertices.len();
        for mask in 0u64..(1u64 << items) {
            for g1 in 0..=vert.genus {
                let g2 = vert.genus - g1;
                let mut legs1 = MarkingSet::EMPTY;
                let mut legs2 = MarkingSet::EMPTY;
                let (mut n1, mut n2) = (1usize, 1usize);
                for (i, m) in legs.iter().enumerate() {
                    if mask & (1 << (halves.len() + i)) == 0 {
                        legs1 = legs1.with(*m);
                        n1 += 1;
                    } else {
                        legs2 = legs2.with(*m);
                        n2 += 1;
                    }
                }
                for i in 0..halves.len() {
                    if mask & (1 << i) == 0 {
                        n1 += 1;
                    } else {
                        n2 += 1;
                    }
                }
                if 2 * g1 as i64 - 2 + n1 as i64 <= 0 || 2 * g2 as i64 - 2 + n2 as i64 <= 0 {
                    continue;
                }
                let mut d = g.clone();
                d.vertices[v] = Vertex::new(g1, legs1);
                d.vertices.push(Vertex::new(g2, legs2));
                for (i, &(k, side)) in halves.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        if side == 0 {
                            d.edges[k].0.vertex = new;
                        } else {
                            d.edges[k].1.vertex = new;
                        }
                    }
                }
                d.edges.push(Edge(HalfEdge::new(v, 0), HalfEdge::new(new, 0)));
                out.push(d);
            }
        }
    }
    out
}

/// Isomorphism classes of graphs degenerating `base` by `0..=extra` edges,
/// canonical and undecorated.
fn degenerations(base: &DecoratedGraph, extra: usize) -> Vec<Vec<DecoratedGraph>> {
    let start = base.undecorated().canonical_relabel();
    let mut levels = vec![vec![start]];
    for _ in 0..extra {
        let mut next: BTreeSet<DecoratedGraph> = BTreeSet::new();
        for g in levels.last().unwrap() {
            for d in one_edge_degenerations(g) {
                next.insert(d.canonical_relabel());
            }
        }
        levels.push(next.into_iter().collect());
    }
    levels
}

/// A decoration on a fixed `Γ` being built up by pullbacks.
#[derive(Clone)]
struct Deco {
    half: Vec<[u32; 2]>,
    kappa: Vec<Vec<u32>>,
    leg: Vec<u32>,
}

fn pull_back(terms: Vec<(Deco, i64)>, target: &DecoratedGraph, s: &Structure) -> Vec<(Deco, i64)> {
    let mut terms = terms;
    for t in terms.iter_mut() {
        for (m, &e) in target.leg_psi.iter().enumerate() {
            t.0.leg[m] += e;
        }
        for (k, e) in target.edges.iter().enumerate() {
            let [(g0, s0), (g1, s1)] = s.edge_map[k];
            t.0.half[g0][s0] += e.0.psi;
            t.0.half[g1][s1] += e.1.psi;
        }
    }
    for (v, vert) in target.vertices.iter().enumerate() {
        for &b in &vert.kappa {
            let mut next = Vec::with_capacity(terms.len() * s.preimage[v].len());
            for (d, c) in &terms {
                for &w in &s.preimage[v] {
                    let mut d2 = d.clone();
                    d2.kappa[w].push(b);
                    next.push((d2, *c));
                }
            }
            terms = next;
        }
    }
    terms
}

/// Product of two canonical generators (coefficient one each).
pub fn generator_product(space: &Arc<MarkedSpace>, a: &DecoratedGraph, b: &DecoratedGraph) -> Result<TautClass> {
    let mut out = TautClass::zero(space);
    if a.codim() + b.codim() > space.dim() {
        return Ok(out);
    }
    let scale = Rational::new(1, (a.aut_order() * b.aut_order()) as i64);
    let (ea, eb) = (a.edges.len(), b.edges.len());
    let levels = degenerations(a, eb);
    for (m, level) in levels.iter().enumerate() {
        if ea + m < eb {
            continue;
        }
        for gamma in level {
            let full: u64 = (1u64 << gamma.edges.len()) - 1;
            let sa = structures(gamma, a);
            if sa.is_empty() {
                continue;
            }
            let sb = structures(gamma, b);
            for x in &sa {
                for y in &sb {
                    if x.kept | y.kept != full {
                        continue;
                    }
                    let blank = Deco {
                        half: vec![[0, 0]; gamma.edges.len()],
                        kappa: vec![Vec::new(); gamma.vertices.len()],
                        leg: vec![0; space.n_markings()],
                    };
                    let mut terms = pull_back(vec![(blank, 1)], a, x);
                    terms = pull_back(terms, b, y);
                    let shared = x.kept & y.kept;
                    for k in 0..gamma.edges.len() {
                        if shared & (1 << k) == 0 {
                            continue;
                        }
                        let mut next = Vec::with_capacity(terms.len() * 2);
                        for (d, c) in terms {
                            for side in 0..2 {
                                let mut d2 = d.clone();
                                d2.half[k][side] += 1;
                                next.push((d2, -c));
                            }
                        }
                        terms = next;
                    }
                    for (d, c) in terms {
                        let g = decorate(gamma, &d);
                        out.add_graph(&g, &(&scale * &Rational::from(c)))?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn decorate(gamma: &DecoratedGraph, d: &Deco) -> DecoratedGraph {
    let mut g = gamma.clone();
    for (k, e) in g.edges.iter_mut().enumerate() {
        e.0.psi = d.half[k][0];
        e.1.psi = d.half[k][1];
    }
    for (v, vert) in g.vertices.iter_mut().enumerate() {
        vert.kappa = d.kappa[v].clone();
        vert.kappa.sort_unstable();
    }
    g.leg_psi = d.leg.clone();
    g
}

/// Product of two classes on the same space, truncated at its dimension.
pub fn gp_product(x: &TautClass, y: &TautClass) -> Result<TautClass> {
    ProductEngine::new(x.space()).product(x, y)
}

/// Product evaluator with a cache of generator products.
pub struct ProductEngine {
    space: Arc<MarkedSpace>,
    cache: Mutex<HashMap<(DecoratedGraph, DecoratedGraph), TautClass>>,
}

impl ProductEngine {
    pub fn new(space: &Arc<MarkedSpace>) -> Self {
        ProductEngine { space: Arc::clone(space), cache: Mutex::new(HashMap::new()) }
    }

    pub fn space(&self) -> &Arc<MarkedSpace> {
        &self.space
    }

    fn generator(&self, a: &DecoratedGraph, b: &DecoratedGraph) -> Result<TautClass> {
        let key = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        if let Some(c) = self.cache.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let c = generator_product(&self.space, &key.0, &key.1)?;
        self.cache.lock().unwrap().insert(key, c.clone());
        Ok(c)
    }

    pub fn product(&self, x: &TautClass, y: &TautClass) -> Result<TautClass> {
        x.check_space(y)?;
        let pairs: Vec<(&DecoratedGraph, &Rational, &DecoratedGraph, &Rational)> = x
            .terms()
            .flat_map(|(a, ca)| y.terms().map(move |(b, cb)| (a, ca, b, cb)))
            .filter(|(a, _, b, _)| a.codim() + b.codim() <= self.space.dim())
            .collect();
        let parts: Vec<TautClass> = pairs
            .par_iter()
            .map(|(a, ca, b, cb)| Ok(self.generator(a, b)?.scaled(&(*ca * *cb))))
            .collect::<Result<_>>()?;
        let mut out = TautClass::zero(&self.space);
        for p in &parts {
            out += p;
        }
        Ok(out)
    }
}
