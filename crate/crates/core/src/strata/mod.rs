//! Decorated boundary-strata generators and their rational combinations.

pub mod bold;
mod class;
mod graph;
pub mod render;

pub use bold::{attach_leg_psi, bold_x, bold_xtilde, bold_ytilde, bold_z, chain_graph, Tail};
pub use class::TautClass;
pub use graph::{Canonical, DecoratedGraph, Edge, HalfEdge, Vertex};
pub use render::{graph_from_json, render_graph, GraphJson};
