use std::collections::BTreeMap;

use crate::combin::{MarkedSpace, Marking, MarkingSet};
use crate::error::{Error, Result};

/// A vertex of a stable graph: genus, attached legs and a multiset of κ indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub genus: u32,
    pub legs: MarkingSet,
    /// Sorted κ indices. Zero entries are allowed on input and removed by
    /// canonicalization.
    pub kappa: Vec<u32>,
}

impl Vertex {
    pub fn new(genus: u32, legs: MarkingSet) -> Self {
        Vertex { genus, legs, kappa: Vec::new() }
    }

    pub fn with_kappa(mut self, b: u32) -> Self {
        self.kappa.push(b);
        self.kappa.sort_unstable();
        self
    }
}

/// One side of an edge: the vertex it is attached to and its ψ exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub vertex: usize,
    pub psi: u32,
}

impl HalfEdge {
    pub fn new(vertex: usize, psi: u32) -> Self {
        HalfEdge { vertex, psi }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(pub HalfEdge, pub HalfEdge);

impl Edge {
    pub fn new(a: HalfEdge, b: HalfEdge) -> Self {
        Edge(a, b)
    }

    pub fn is_loop(&self) -> bool {
        self.0.vertex == self.1.vertex
    }

    fn normalized(self) -> Edge {
        if self.1 < self.0 {
            Edge(self.1, self.0)
        } else {
            self
        }
    }
}

/// A stable graph decorated by a ψ/κ monomial.
///
/// `leg_psi` is indexed by marking and has one entry per marking of the space.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecoratedGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub leg_psi: Vec<u32>,
}

/// Outcome of canonicalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Canonical {
    /// The decorated class vanishes (codimension or vertex-degree cutoff).
    Zero,
    /// `scalar` times the canonical generator `graph`.
    Term { graph: DecoratedGraph, scalar: i64 },
}

impl DecoratedGraph {
    /// The one-vertex graph carrying every marking: the fundamental class.
    pub fn trivial(space: &MarkedSpace) -> Self {
        DecoratedGraph {
            vertices: vec![Vertex::new(space.genus(), space.all())],
            edges: Vec::new(),
            leg_psi: vec![0; space.n_markings()],
        }
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_loops(&self) -> usize {
        self.edges.iter().filter(|e| e.is_loop()).count()
    }

    /// Number of half-edges attached to `v`, loops counted twice.
    pub fn half_edge_count(&self, v: usize) -> usize {
        self.edges.iter().map(|e| (e.0.vertex == v) as usize + (e.1.vertex == v) as usize).sum()
    }

    /// Legs plus half-edges at `v`.
    pub fn valence(&self, v: usize) -> usize {
        self.vertices[v].legs.len() + self.half_edge_count(v)
    }

    /// First Betti number of the underlying (connected) graph.
    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    /// Codimension: edges plus the degree of the decoration.
    pub fn codim(&self) -> u32 {
        self.edges.len() as u32
            + self.edges.iter().map(|e| e.0.psi + e.1.psi).sum::<u32>()
            + self.leg_psi.iter().sum::<u32>()
            + self.vertices.iter().flat_map(|v| v.kappa.iter()).sum::<u32>()
    }

    /// Degree of the decoration carried by vertex `v`.
    pub fn vertex_degree(&self, v: usize) -> u32 {
        let mut deg: u32 = self.vertices[v].kappa.iter().sum();
        for e in &self.edges {
            for h in [e.0, e.1] {
                if h.vertex == v {
                    deg += h.psi;
                }
            }
        }
        deg + self.vertices[v].legs.iter().map(|m| self.leg_psi[m.index()]).sum::<u32>()
    }

    /// Dimension `3g_v - 3 + n_v` of the moduli space at vertex `v`.
    pub fn vertex_dim(&self, v: usize) -> i64 {
        3 * self.vertices[v].genus as i64 - 3 + self.valence(v) as i64
    }

    /// The vertex carrying marking `m`.
    pub fn vertex_of(&self, m: Marking) -> Option<usize> {
        self.vertices.iter().position(|v| v.legs.contains(m))
    }

    pub fn has_decoration(&self) -> bool {
        self.leg_psi.iter().any(|&e| e > 0)
            || self.vertices.iter().any(|v| !v.kappa.is_empty())
            || self.edges.iter().any(|e| e.0.psi > 0 || e.1.psi > 0)
    }

    /// The same graph with every decoration removed.
    pub fn undecorated(&self) -> DecoratedGraph {
        DecoratedGraph {
            vertices: self.vertices.iter().map(|v| Vertex::new(v.genus, v.legs)).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge(HalfEdge::new(e.0.vertex, 0), HalfEdge::new(e.1.vertex, 0)))
                .collect(),
            leg_psi: vec![0; self.leg_psi.len()],
        }
    }

    /// Checks structural validity, stability and the genus count.
    pub fn validate(&self, space: &MarkedSpace) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidGraph(msg));
        if self.vertices.is_empty() {
            return bad("graph has no vertices".into());
        }
        if self.leg_psi.len() != space.n_markings() {
            return bad(format!(
                "leg decoration has {} entries for {} markings",
                self.leg_psi.len(),
                space.n_markings()
            ));
        }
        let mut seen = MarkingSet::EMPTY;
        for v in &self.vertices {
            if !v.legs.intersection(seen).is_empty() {
                return bad("a marking sits on two vertices".into());
            }
            seen = seen.union(v.legs);
        }
        if seen != space.all() {
            return bad("legs do not cover the markings".into());
        }
        let nv = self.vertices.len();
        for e in &self.edges {
            if e.0.vertex >= nv || e.1.vertex >= nv {
                return bad("edge endpoint out of range".into());
            }
        }
        // connectivity by union-find
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.0.vertex), find(&mut parent, e.1.vertex));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..nv).any(|v| find(&mut parent, v) != root) {
            return bad("graph is disconnected".into());
        }
        let total: u32 = self.vertices.iter().map(|v| v.genus).sum::<u32>() + self.betti() as u32;
        if total != space.genus() {
            return bad(format!("genus count {total} differs from g = {}", space.genus()));
        }
        for v in 0..nv {
            if 2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 <= 0 {
                return bad(format!("vertex {v} is unstable"));
            }
        }
        Ok(())
    }

    /// Brings the graph to canonical form.
    ///
    /// κ_0 factors become the scalar `2g_v - 2 + n_v`; generators beyond the
    /// dimension of the space, or with a vertex decoration exceeding that
    /// vertex's dimension, become [`Canonical::Zero`].
    pub fn canonicalize(&self, space: &MarkedSpace) -> Result<Canonical> {
        self.validate(space)?;
        let mut g = self.clone();
        let mut scalar: i64 = 1;
        for v in 0..g.vertices.len() {
            let zeros = g.vertices[v].kappa.iter().filter(|&&b| b == 0).count();
            if zeros > 0 {
                let factor = 2 * g.vertices[v].genus as i64 - 2 + g.valence(v) as i64;
                scalar *= factor.pow(zeros as u32);
                g.vertices[v].kappa.retain(|&b| b != 0);
            }
            g.vertices[v].kappa.sort_unstable();
        }
        if g.codim() > space.dim() {
            return Ok(Canonical::Zero);
        }
        for v in 0..g.vertices.len() {
            if g.vertex_degree(v) as i64 > g.vertex_dim(v) {
                return Ok(Canonical::Zero);
            }
        }
        Ok(Canonical::Term { graph: g.canonical_relabel(), scalar })
    }

    /// Relabels vertices and sorts edges into the canonical representative
    /// of the isomorphism class (legs fixed).
    pub(crate) fn canonical_relabel(&self) -> DecoratedGraph {
        let colors = self.refined_colors(true);
        let cells = cells_of(&colors);
        let mut best: Option<(Vec<Edge>, Vec<usize>)> = None;
        for_each_cell_permutation(&cells, &mut |order| {
            let edges = self.relabeled_edges(order);
            if best.as_ref().is_none_or(|(b, _)| edges < *b) {
                best = Some((edges, order.to_vec()));
            }
        });
        let (edges, order) = best.expect("at least one ordering");
        DecoratedGraph {
            vertices: order.iter().map(|&v| self.vertices[v].clone()).collect(),
            edges,
            leg_psi: self.leg_psi.clone(),
        }
    }

    /// Order of the automorphism group of the undecorated graph with legs
    /// fixed, acting on half-edges.
    pub fn aut_order(&self) -> u64 {
        let bare = self.undecorated();
        let colors = bare.refined_colors(false);
        let cells = cells_of(&colors);
        let reference = bare.relabeled_edges(&cells.concat());
        let mut vertex_auts = 0u64;
        for_each_cell_permutation(&cells, &mut |order| {
            if bare.relabeled_edges(order) == reference {
                vertex_auts += 1;
            }
        });
        let mut mult: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for e in &bare.edges {
            let key = (e.0.vertex.min(e.1.vertex), e.0.vertex.max(e.1.vertex));
            *mult.entry(key).or_default() += 1;
        }
        let mut order = vertex_auts;
        for ((u, v), m) in mult {
            order *= (1..=m).product::<u64>();
            if u == v {
                order *= 1 << m;
            }
        }
        order
    }

    /// Edges after sending old vertex `order[k]` to new index `k`.
    fn relabeled_edges(&self, order: &[usize]) -> Vec<Edge> {
        let mut inv = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            inv[old] = new;
        }
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| {
                Edge(HalfEdge::new(inv[e.0.vertex], e.0.psi), HalfEdge::new(inv[e.1.vertex], e.1.psi)).normalized()
            })
            .collect();
        edges.sort_unstable();
        edges
    }

    /// Isomorphism-invariant vertex colors by iterated neighborhood refinement.
    fn refined_colors(&self, decorated: bool) -> Vec<usize> {
        let nv = self.vertices.len();
        let mut colors = rank(
            &self
                .vertices
                .iter()
                .map(|v| (v.genus, v.legs.bits(), if decorated { v.kappa.clone() } else { Vec::new() }))
                .collect::<Vec<_>>(),
        );
        let mut classes = distinct(&colors);
        loop {
            let sigs: Vec<(usize, Vec<(u32, u32, bool, usize)>)> = (0..nv)
                .map(|v| {
                    let mut nb = Vec::new();
                    for e in &self.edges {
                        for (here, there) in [(e.0, e.1), (e.1, e.0)] {
                            if here.vertex == v {
                                let (p, q) = if decorated { (here.psi, there.psi) } else { (0, 0) };
                                nb.push((p, q, e.is_loop(), colors[there.vertex]));
                            }
                        }
                    }
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let next = rank(&sigs);
            let n = distinct(&next);
            colors = next;
            if n == classes {
                break;
            }
            classes = n;
        }
        colors
    }
}

fn rank<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = items.to_vec();
    sorted.sort();
    sorted.dedup();
    items.iter().map(|x| sorted.binary_search(x).unwrap()).collect()
}

fn distinct(colors: &[usize]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Vertices grouped by color, cells in increasing color order.
fn cells_of(colors: &[usize]) -> Vec<Vec<usize>> {
    let n = colors.iter().max().map_or(0, |m| m + 1);
    let mut cells = vec![Vec::new(); n];
    for (v, &c) in colors.iter().enumerate() {
        cells[c].push(v);
    }
    cells.retain(|c| !c.is_empty());
    cells
}

/// Calls `f` on every vertex ordering that keeps cells contiguous and in order.
fn for_each_cell_permutation(cells: &[Vec<usize>], f: &mut dyn FnMut(&[usize])) {
    fn permute(cell: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
        if k == cell.len() {
            f(cell);
            return;
        }
        for i in k..cell.len() {
            cell.swap(k, i);
            permute(cell, k + 1, f);
            cell.swap(k, i);
        }
    }
    fn go(cells: &[Vec<usize>], idx: usize, prefix: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if idx == cells.len() {
            f(prefix);
            return;
        }
        let mut cell = cells[idx].clone();
        permute(&mut cell, 0, &mut |perm: &[usize]| {
            let len = prefix.len();
            prefix.extend_from_slice(perm);
            go(cells, idx + 1, prefix, f);
            prefix.truncate(len);
        });
    }
    go(cells, 0, &mut Vec::new(), f);
}
