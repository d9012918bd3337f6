//! Result documents and their JSON and text renderings.

use std::collections::BTreeMap;

use serde::Serialize;

use tautchern_core::arith::Rational;
use tautchern_core::chern::Poly;
use tautchern_core::combin::MarkedSpace;
use tautchern_core::strata::{render_graph, GraphJson, TautClass};

use crate::request::{AEntry, Command, Format, Mode, RequestConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TermJson {
    pub graph: GraphJson,
    pub coeff: Rational,
    pub aut_order: u64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeJson {
    pub degree: u32,
    pub terms: Vec<TermJson>,
}

impl DegreeJson {
    pub fn from_class(space: &MarkedSpace, degree: u32, class: &TautClass) -> Self {
        let terms = class
            .terms()
            .map(|(g, c)| TermJson {
                graph: GraphJson::from_graph(space, g),
                coeff: c.clone(),
                aut_order: g.aut_order(),
                text: render_graph(space, g),
            })
            .collect();
        DegreeJson { degree, terms }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonomialJson {
    /// Exponent of `c_1, c_2, …`.
    pub exponents: Vec<u32>,
    pub coeff: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolicJson {
    pub codim: u32,
    pub text: String,
    pub terms: Vec<MonomialJson>,
}

impl SymbolicJson {
    pub fn from_poly(codim: u32, p: &Poly) -> Self {
        SymbolicJson {
            codim,
            text: p.render("c"),
            terms: p.terms().map(|(k, c)| MonomialJson { exponents: k.clone(), coeff: c.clone() }).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorJson {
    pub ell: i64,
    pub d: BTreeMap<String, i64>,
    pub a: Vec<AEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhiReportJson {
    pub nondegenerate: bool,
    pub degenerate: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Metadata {
    pub command: Command,
    pub mode: Mode,
    pub generator_count: usize,
    /// Number of emitted generators per automorphism order.
    pub aut_orders: BTreeMap<u64, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultDocument {
    pub request: RequestConfig,
    pub degrees: Vec<DegreeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<SymbolicJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisor: Option<DivisorJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi_report: Option<PhiReportJson>,
    /// Theorem minus oracle, for degrees where they differ.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diff: Vec<DegreeJson>,
    pub metadata: Metadata,
}

impl ResultDocument {
    pub fn new(request: RequestConfig, command: Command, mode: Mode) -> Self {
        ResultDocument {
            request,
            degrees: Vec::new(),
            symbolic: None,
            divisor: None,
            phi_report: None,
            diff: Vec::new(),
            metadata: Metadata { command, mode, generator_count: 0, aut_orders: BTreeMap::new(), agreement: None },
        }
    }

    pub fn push_degree(&mut self, degree: DegreeJson) {
        for t in &degree.terms {
            self.metadata.generator_count += 1;
            *self.metadata.aut_orders.entry(t.aut_order).or_default() += 1;
        }
        self.degrees.push(degree);
    }

    /// 3 on theorem/oracle disagreement, 2 on a degenerate polarisation.
    pub fn exit_code(&self) -> i32 {
        if self.metadata.agreement == Some(false) {
            3
        } else if self.phi_report.as_ref().is_some_and(|r| !r.nondegenerate) {
            2
        } else {
            0
        }
    }
}

fn render_terms(terms: &[TermJson]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (n, t) in terms.iter().enumerate() {
        let neg = t.coeff.is_negative();
        match (n, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&format!("{}·{}", t.coeff.abs(), t.text));
    }
    out
}

pub fn render_text(doc: &ResultDocument) -> String {
    let mut lines = Vec::new();
    for deg in &doc.degrees {
        lines.push(format!("deg {}: {}", deg.degree, render_terms(&deg.terms)));
    }
    if let Some(s) = &doc.symbolic {
        lines.push(format!("codim {}: {}", s.codim, s.text));
    }
    if let Some(d) = &doc.divisor {
        lines.push(format!("ell: {}", d.ell));
        let ds: Vec<String> = d.d.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        lines.push(format!("d: {}", ds.join(",")));
        for a in &d.a {
            lines.push(format!("a: {}:{}={}", a.h, a.s.join("+"), a.value));
        }
    }
    if let Some(r) = &doc.phi_report {
        lines.push(format!("nondegenerate: {}", r.nondegenerate));
        for b in &r.degenerate {
            lines.push(format!("degenerate: {b}"));
        }
    }
    if let Some(agree) = doc.metadata.agreement {
        lines.push(format!("agreement: {agree}"));
    }
    for deg in &doc.diff {
        lines.push(format!("diff deg {}: {}", deg.degree, render_terms(&deg.terms)));
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

pub fn render_output(doc: &ResultDocument, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
            s.push('\n');
            s
        }
        Format::Text => render_text(doc),
    }
}
