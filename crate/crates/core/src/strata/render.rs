//! Text and JSON forms of decorated generators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combin::{MarkedSpace, MarkingSet};
use crate::error::{Error, Result};

use super::graph::{DecoratedGraph, Edge, HalfEdge, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub g: u32,
    pub legs: Vec<String>,
    #[serde(default)]
    pub kappa: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdgeJson {
    pub v: usize,
    pub psi: u32,
}

/// Wire form of a decorated graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[HalfEdgeJson; 2]>,
    #[serde(rename = "legPsi", default)]
    pub leg_psi: BTreeMap<String, u32>,
}

impl GraphJson {
    pub fn from_graph(space: &MarkedSpace, g: &DecoratedGraph) -> Self {
        GraphJson {
            vertices: g
                .vertices
                .iter()
                .map(|v| VertexJson { g: v.genus, legs: space.set_labels(v.legs), kappa: v.kappa.clone() })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| [HalfEdgeJson { v: e.0.vertex, psi: e.0.psi }, HalfEdgeJson { v: e.1.vertex, psi: e.1.psi }])
                .collect(),
            leg_psi: space
                .markings()
                .filter(|m| g.leg_psi[m.index()] > 0)
                .map(|m| (space.label(m).to_string(), g.leg_psi[m.index()]))
                .collect(),
        }
    }

    /// Builds the (not yet canonicalized) graph, validating it.
    pub fn to_graph(&self, space: &MarkedSpace) -> Result<DecoratedGraph> {
        let mut vertices = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let mut kappa = v.kappa.clone();
            kappa.sort_unstable();
            vertices.push(Vertex { genus: v.g, legs: space.set_from_labels(&v.legs)?, kappa });
        }
        let edges =
            self.edges.iter().map(|[a, b]| Edge(HalfEdge::new(a.v, a.psi), HalfEdge::new(b.v, b.psi))).collect();
        let mut leg_psi = vec![0; space.n_markings()];
        for (label, &e) in &self.leg_psi {
            leg_psi[space.marking(label)?.index()] = e;
        }
        let g = DecoratedGraph { vertices, edges, leg_psi };
        g.validate(space)?;
        Ok(g)
    }
}

/// A chain reading of a graph: path from the anchor vertex, decorations
/// only at the far end.
struct ChainShape {
    hs: Vec<u32>,
    sets: Vec<MarkingSet>,
    exps: Vec<(u32, u32)>,
    kappa: Vec<u32>,
    loop_exps: Option<(u32, u32)>,
}

fn chain_shape(space: &MarkedSpace, g: &DecoratedGraph) -> Option<ChainShape> {
    let nv = g.vertices.len();
    let loops: Vec<&Edge> = g.edges.iter().filter(|e| e.is_loop()).collect();
    if loops.len() > 1 || g.edges.len() - loops.len() != nv - 1 {
        return None;
    }
    let start = g.vertex_of(space.anchor())?;
    let mut order = vec![start];
    let mut exps = Vec::new();
    let mut used = vec![false; g.edges.len()];
    loop {
        let cur = *order.last().unwrap();
        let mut next = None;
        for (idx, e) in g.edges.iter().enumerate() {
            if used[idx] || e.is_loop() {
                continue;
            }
            let (here, there) = if e.0.vertex == cur {
                (e.0, e.1)
            } else if e.1.vertex == cur {
                (e.1, e.0)
            } else {
                continue;
            };
            if next.is_some() {
                return None;
            }
            next = Some((idx, here, there));
        }
        match next {
            None => break,
            Some((idx, here, there)) => {
                used[idx] = true;
                exps.push((here.psi, there.psi));
                order.push(there.vertex);
            }
        }
    }
    if order.len() != nv {
        return None;
    }
    let last = *order.last().unwrap();
    if order[..nv - 1].iter().any(|&v| !g.vertices[v].kappa.is_empty()) {
        return None;
    }
    let loop_exps = match loops.first() {
        Some(e) if e.0.vertex == last => Some((e.0.psi.min(e.1.psi), e.0.psi.max(e.1.psi))),
        Some(_) => return None,
        None => None,
    };
    let (mut h, mut s) = (0, MarkingSet::EMPTY);
    let (mut hs, mut sets) = (Vec::new(), Vec::new());
    for &v in &order[..nv - 1] {
        h += g.vertices[v].genus;
        s = s.union(g.vertices[v].legs);
        hs.push(h);
        sets.push(s);
    }
    Some(ChainShape { hs, sets, exps, kappa: g.vertices[last].kappa.clone(), loop_exps })
}

/// Text form in bracket notation, e.g. `ψ_2^1·X^{(0,1)}_{(1),({1})}`.
pub fn render_graph(space: &MarkedSpace, g: &DecoratedGraph) -> String {
    let mut prefix = String::new();
    for m in space.markings() {
        let e = g.leg_psi[m.index()];
        if e > 0 {
            prefix.push_str(&format!("ψ_{}^{}·", space.label(m), e));
        }
    }
    let body = match chain_shape(space, g) {
        Some(c) => render_chain(space, &c),
        None => render_generic(space, g),
    };
    if body == "1" && !prefix.is_empty() {
        prefix.trim_end_matches('·').to_string()
    } else {
        format!("{prefix}{body}")
    }
}

/// `κ_1^2κ_3` from the sorted list `[1, 1, 3]`.
fn kappa_text(kappa: &[u32]) -> String {
    let mut out = String::new();
    for run in kappa.chunk_by(|a, b| a == b) {
        out.push_str(&format!("κ_{}", run[0]));
        if run.len() > 1 {
            out.push_str(&format!("^{}", run.len()));
        }
    }
    out
}

fn render_chain(space: &MarkedSpace, c: &ChainShape) -> String {
    let kappa = kappa_text(&c.kappa);
    if c.hs.is_empty() {
        return match (c.loop_exps, kappa.is_empty()) {
            (None, true) => "1".into(),
            (None, false) => kappa,
            (Some((i, j)), _) => {
                let y = format!("Y^{{({i},{j})}}");
                if kappa.is_empty() {
                    y
                } else {
                    format!("{y}[{kappa}]")
                }
            }
        };
    }
    let mut sup: Vec<String> = c.exps.iter().map(|(i, j)| format!("({i},{j})")).collect();
    let letter = if let Some((i, j)) = c.loop_exps {
        sup.push(format!("({i},{j})"));
        "Y"
    } else if !c.kappa.is_empty() {
        "Z"
    } else {
        "X"
    };
    let hs: Vec<String> = c.hs.iter().map(|h| h.to_string()).collect();
    let sets: Vec<String> = c.sets.iter().map(|s| space.render_set(*s)).collect();
    let mut out = format!("{letter}^{{{}}}_{{({}),({})}}", sup.join(","), hs.join(","), sets.join(","));
    if !kappa.is_empty() {
        out.push_str(&format!("[{kappa}]"));
    }
    out
}

fn render_generic(space: &MarkedSpace, g: &DecoratedGraph) -> String {
    let verts: Vec<String> = g
        .vertices
        .iter()
        .map(|v| format!("g{}{}{}", v.genus, space.render_set(v.legs), kappa_text(&v.kappa)))
        .collect();
    let edges: Vec<String> =
        g.edges.iter().map(|e| format!("{}({})-{}({})", e.0.vertex, e.0.psi, e.1.vertex, e.1.psi)).collect();
    format!("G[{}; {}]", verts.join(" "), edges.join(" "))
}

/// Parses a graph from its JSON value.
pub fn graph_from_json(space: &MarkedSpace, value: &serde_json::Value) -> Result<DecoratedGraph> {
    let wire: GraphJson = serde_json::from_value(value.clone()).map_err(|e| Error::InvalidGraph(e.to_string()))?;
    wire.to_graph(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::{Bipartition, Chain};
    use crate::strata::bold::{chain_graph, Tail};

    #[test]
    fn chain_rendering() {
        let space = MarkedSpace::numbered(2, 2).unwrap();
        let b = Bipartition::from_labels(&space, 1, &["1"]).unwrap();
        let c = Chain::new(vec![b]).unwrap();
        let g = chain_graph(&space, c.entries(), &[(0, 1)], Tail::Plain).unwrap();
        assert_eq!(render_graph(&space, &g), "X^{(0,1)}_{(1),({1})}");
        let z = chain_graph(&space, c.entries(), &[(0, 0)], Tail::Kappa(1)).unwrap();
        assert_eq!(render_graph(&space, &z), "Z^{(0,0)}_{(1),({1})}[κ_1]");
        let y = chain_graph(&space, &[], &[], Tail::Loop(0, 0)).unwrap();
        assert_eq!(render_graph(&space, &y), "Y^{(0,0)}");
        let mut t = DecoratedGraph::trivial(&space);
        t.leg_psi[1] = 2;
        assert_eq!(render_graph(&space, &t), "ψ_2^2");
    }

    #[test]
    fn json_round_trip() {
        let space = MarkedSpace::numbered(2, 2).unwrap();
        let b = Bipartition::from_labels(&space, 1, &["1"]).unwrap();
        let mut g = chain_graph(&space, &[b], &[(1, 0)], Tail::Kappa(2)).unwrap();
        g.leg_psi[0] = 1;
        let v = serde_json::to_value(GraphJson::from_graph(&space, &g)).unwrap();
        assert_eq!(v["legPsi"]["1"], 1);
        assert_eq!(graph_from_json(&space, &v).unwrap(), g);
    }
}
