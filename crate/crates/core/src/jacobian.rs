//! One-node stability conditions and the divisor twist they select.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::combin::{stable_bipartitions, Bipartition, MarkedSpace};
use crate::error::{Error, Result};
use crate::ucurve::DivisorSpec;

/// Values of a stability parameter on the `S`-side component of each general
/// one-node curve. The complement carries `degree - φ_S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneNodePolarisation {
    space: Arc<MarkedSpace>,
    degree: i64,
    phi: BTreeMap<Bipartition, Rational>,
}

impl OneNodePolarisation {
    pub fn new(space: &Arc<MarkedSpace>, degree: i64, phi: BTreeMap<Bipartition, Rational>) -> Result<Self> {
        if let Some(b) = stable_bipartitions(space).into_iter().find(|b| !phi.contains_key(b)) {
            return Err(Error::MissingPhiEntry(b.render(space)));
        }
        Ok(OneNodePolarisation { space: Arc::clone(space), degree, phi })
    }

    /// The same value on every bipartition.
    pub fn constant(space: &Arc<MarkedSpace>, degree: i64, value: Rational) -> Self {
        let phi = stable_bipartitions(space).into_iter().map(|b| (b, value.clone())).collect();
        OneNodePolarisation { space: Arc::clone(space), degree, phi }
    }

    pub fn space(&self) -> &Arc<MarkedSpace> {
        &self.space
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn value(&self, b: &Bipartition) -> &Rational {
        &self.phi[b]
    }

    pub fn values(&self) -> &BTreeMap<Bipartition, Rational> {
        &self.phi
    }

    pub fn with_value(mut self, b: Bipartition, value: Rational) -> Self {
        self.phi.insert(b, value);
        self
    }
}

/// Outcome of the nondegeneracy check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiReport {
    pub degenerate: Vec<Bipartition>,
}

impl PhiReport {
    pub fn is_nondegenerate(&self) -> bool {
        self.degenerate.is_empty()
    }
}

fn is_half_integer(x: &Rational) -> bool {
    let twice = x * &Rational::from(2);
    twice.is_integer() && !x.is_integer()
}

/// Flags every bipartition whose value lies in `ℤ + 1/2`.
pub fn validate_phi(phi: &OneNodePolarisation) -> PhiReport {
    PhiReport { degenerate: phi.phi.iter().filter(|(_, v)| is_half_integer(v)).map(|(b, _)| *b).collect() }
}

/// Degree of `D` without its `C` part on the `S`-side of a one-node curve.
fn side_degree(div: &DivisorSpec, b: &Bipartition) -> i64 {
    div.ell * (2 * b.h as i64 - 1) + div.d_inside(b)
}

/// The unique twist coefficient making the `S`-side degree lie within 1/2
/// of `φ_S`.
fn twist(div: &DivisorSpec, b: &Bipartition, value: &Rational) -> i64 {
    let x = value - &Rational::from(side_degree(div, b)) + Rational::new(1, 2);
    x.floor().try_into().expect("twist fits in i64")
}

/// Replaces every `a_{h,S}` by the twist selected by `phi`.
pub fn modify_divisor(div: &DivisorSpec, phi: &OneNodePolarisation) -> Result<DivisorSpec> {
    if div.space() != phi.space() {
        return Err(Error::MismatchedSpaces);
    }
    if div.degree() != phi.degree {
        return Err(Error::DegreeMismatch { divisor: div.degree(), phi: phi.degree });
    }
    let report = validate_phi(phi);
    if !report.is_nondegenerate() {
        return Err(Error::DegeneratePhi(report.degenerate.iter().map(|b| b.render(div.space())).collect()));
    }
    let a = phi.phi.iter().map(|(b, v)| (*b, twist(div, b, v))).collect();
    div.clone().with_a(a)
}

/// `σ_i - σ_j` twisted by the trivial parameter `φ ≡ 0`.
pub fn drc_divisor(space: &Arc<MarkedSpace>, i: &str, j: &str) -> Result<DivisorSpec> {
    let (mi, mj) = (space.marking(i)?, space.marking(j)?);
    let mut d = vec![0; space.n_markings()];
    d[mi.index()] += 1;
    d[mj.index()] -= 1;
    let div = DivisorSpec::new(space, 0, d, BTreeMap::new())?;
    modify_divisor(&div, &OneNodePolarisation::constant(space, 0, Rational::zero()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PhiEntryJson {
    h: u32,
    #[serde(rename = "S")]
    s: Vec<String>,
    value: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PhiJson {
    d: i64,
    phi: Vec<PhiEntryJson>,
}

/// Reads `{"d": …, "phi": [{"h": …, "S": […], "value": "num/den"}]}`.
pub fn phi_from_json(space: &Arc<MarkedSpace>, value: &serde_json::Value) -> Result<OneNodePolarisation> {
    let wire: PhiJson = serde_json::from_value(value.clone()).map_err(|e| Error::MissingPhiEntry(e.to_string()))?;
    let mut phi = BTreeMap::new();
    for entry in wire.phi {
        let b = Bipartition::from_labels(space, entry.h as i64, &entry.s)?;
        phi.insert(b, entry.value);
    }
    OneNodePolarisation::new(space, wire.d, phi)
}

pub fn phi_to_json(phi: &OneNodePolarisation) -> serde_json::Value {
    let wire = PhiJson {
        d: phi.degree,
        phi: phi
            .phi
            .iter()
            .map(|(b, v)| PhiEntryJson { h: b.h, s: phi.space.set_labels(b.s), value: v.clone() })
            .collect(),
    };
    serde_json::to_value(wire).expect("serializable")
}
