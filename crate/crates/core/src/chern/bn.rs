//! Brill–Noether classes pulled back along the section defined by a divisor.
//!
//! The result is `Δ^{(r+1)}_{g-d+r} c(-R•π_* O(D))`. It equals the pullback
//! of the universal class only on the locus where the section is a morphism,
//! which is not computed here.

use super::chern_char_theorem;
use super::series::{invert_to_chern, thom_porteous, Poly, SymbolRing, TautRing};
use crate::error::{Error, Result};
use crate::strata::TautClass;
use crate::ucurve::DivisorSpec;

/// Genus bound for expanded output.
pub const EXPANDED_MAX_GENUS: u32 = 3;

#[derive(Debug, Clone)]
pub struct BnRequest {
    r: u32,
    divisor: DivisorSpec,
}

impl BnRequest {
    pub fn new(r: u32, divisor: DivisorSpec) -> Result<Self> {
        let g = divisor.space().genus() as i64;
        let d = divisor.degree();
        if d >= g + r as i64 {
            return Err(Error::BrillNoether(format!("need d < g + r, got d={d}, g={g}, r={r}")));
        }
        Ok(BnRequest { r, divisor })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn divisor(&self) -> &DivisorSpec {
        &self.divisor
    }

    pub fn d(&self) -> i64 {
        self.divisor.degree()
    }

    /// Size of the determinant.
    pub fn p(&self) -> usize {
        self.r as usize + 1
    }

    /// Index offset `g - d + r`, always positive.
    pub fn q(&self) -> i64 {
        self.divisor.space().genus() as i64 - self.d() + self.r as i64
    }

    pub fn rho(&self) -> i64 {
        self.divisor.space().genus() as i64 - self.codim() as i64
    }

    /// `g - ρ = (r+1)(g-d+r)`.
    pub fn codim(&self) -> u32 {
        (self.p() as i64 * self.q()) as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BnMode {
    Symbolic,
    Expanded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BnClass {
    /// Polynomial in the Chern classes `c_k` of `-R•π_* O(D)`.
    Symbolic(Poly),
    Expanded(TautClass),
}

pub fn bn_pullback(req: &BnRequest, smax: u32, mode: BnMode) -> Result<BnClass> {
    let codim = req.codim();
    if smax < codim {
        return Err(Error::BrillNoether(format!("smax {smax} below the class codimension {codim}")));
    }
    let (p, q) = (req.p(), req.q());
    let top = q as usize + p - 1;
    match mode {
        BnMode::Symbolic => {
            let c: Vec<Poly> = (0..=top).map(|k| if k == 0 { Poly::default() } else { Poly::symbol(k) }).collect();
            Ok(BnClass::Symbolic(thom_porteous(&SymbolRing, &c, p, q)?))
        }
        BnMode::Expanded => {
            let space = req.divisor.space();
            if space.genus() > EXPANDED_MAX_GENUS {
                return Err(Error::BrillNoether(format!("expanded output is limited to genus ≤ {EXPANDED_MAX_GENUS}")));
            }
            if codim > space.dim() {
                return Err(Error::DegreeOutOfRange { requested: codim as i64, dim: space.dim() });
            }
            let kmax = top.min(space.dim() as usize);
            let ch = chern_char_theorem(&req.divisor, kmax as u32)?;
            let ring = TautRing::new(space);
            let mut c = invert_to_chern(&ring, ch.components(), kmax, true)?;
            c.resize(top + 1, TautClass::zero(space));
            let class = thom_porteous(&ring, &c, p, q)?;
            Ok(BnClass::Expanded(class))
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::combin::MarkedSpace;

    #[test]
    fn symbolic_shapes() {
        let s = Arc::new(MarkedSpace::numbered(2, 2).unwrap());
        // d = g - 1 = 1
        let div = DivisorSpec::new(&s, 0, vec![1, 0], Default::default()).unwrap();
        let req = BnRequest::new(1, div.clone()).unwrap();
        assert_eq!(req.codim(), 4);
        let BnClass::Symbolic(p) = bn_pullback(&req, 4, BnMode::Symbolic).unwrap() else { panic!() };
        assert_eq!(p.render("c"), "c_2^2 - c_1·c_3");
        let req = BnRequest::new(0, div).unwrap();
        let BnClass::Symbolic(p) = bn_pullback(&req, 1, BnMode::Symbolic).unwrap() else { panic!() };
        assert_eq!(p.render("c"), "c_1");
    }

    #[test]
    fn theta_divisor_is_minus_ch1() {
        let s = Arc::new(MarkedSpace::numbered(2, 2).unwrap());
        let div = DivisorSpec::new(&s, 1, vec![-2, 1], Default::default()).unwrap();
        assert_eq!(div.degree(), 1);
        let req = BnRequest::new(0, div.clone()).unwrap();
        let BnClass::Expanded(c) = bn_pullback(&req, 1, BnMode::Expanded).unwrap() else { panic!() };
        let ch = chern_char_theorem(&div, 1).unwrap();
        assert_eq!(c, -&ch.components()[1]);
    }

    #[test]
    fn preconditions() {
        let s = Arc::new(MarkedSpace::numbered(2, 1).unwrap());
        let div = DivisorSpec::new(&s, 0, vec![2], Default::default()).unwrap();
        assert!(matches!(BnRequest::new(0, div.clone()), Err(Error::BrillNoether(_))));
        let div = DivisorSpec::new(&s, 0, vec![0], Default::default()).unwrap();
        let req = BnRequest::new(0, div).unwrap();
        assert_eq!(req.codim(), 2);
        assert!(matches!(bn_pullback(&req, 1, BnMode::Symbolic), Err(Error::BrillNoether(_))));
    }
}
