//! Graded ring interface, Chern-class inversion and determinants.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::arith::{factorial, sign, Rational};
use crate::combin::MarkedSpace;
use crate::error::{Error, Result};
use crate::strata::TautClass;
use crate::tautprod::ProductEngine;

/// A commutative ring with rational scalars.
pub trait GradedRing: Sync {
    type Elem: Clone + Send + Sync;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem>;
    fn scale(&self, x: &Self::Elem, c: &Rational) -> Self::Elem;
}

pub struct RationalField;

impl GradedRing for RationalField {
    type Elem = Rational;
    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn add(&self, x: &Rational, y: &Rational) -> Rational {
        x + y
    }
    fn mul(&self, x: &Rational, y: &Rational) -> Result<Rational> {
        Ok(x * y)
    }
    fn scale(&self, x: &Rational, c: &Rational) -> Rational {
        x * c
    }
}

/// Polynomial in formal symbols `x_1, x_2, …`; the key lists the exponent of
/// each symbol, trailing zeros trimmed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly(BTreeMap<Vec<u32>, Rational>);

impl Poly {
    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert(Vec::new(), c);
        }
        p
    }

    /// The symbol of index `i ≥ 1`.
    pub fn symbol(i: usize) -> Self {
        let mut key = vec![0; i];
        key[i - 1] = 1;
        let mut p = Poly::default();
        p.0.insert(key, Rational::one());
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, key: Vec<u32>, c: Rational) {
        let entry = self.0.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += &c;
        if entry.is_zero() {
            self.0.remove(&key);
        }
    }

    /// Text form such as `c_2^2 - c_1·c_3`.
    pub fn render(&self, prefix: &str) -> String {
        if self.0.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, (key, c)) in self.0.iter().enumerate() {
            let mono: Vec<String> = key
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("{prefix}_{}", i + 1) } else { format!("{prefix}_{}^{e}", i + 1) })
                .collect();
            let neg = c.is_negative();
            let abs = c.abs();
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match (mono.is_empty(), abs.is_one()) {
                (true, _) => out.push_str(&abs.to_string()),
                (false, true) => out.push_str(&mono.join("·")),
                (false, false) => out.push_str(&format!("{abs}·{}", mono.join("·"))),
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

/// Polynomials in formal symbols.
pub struct SymbolRing;

impl GradedRing for SymbolRing {
    type Elem = Poly;
    fn zero(&self) -> Poly {
        Poly::default()
    }
    fn one(&self) -> Poly {
        Poly::constant(Rational::one())
    }
    fn add(&self, x: &Poly, y: &Poly) -> Poly {
        let mut out = x.clone();
        for (k, c) in &y.0 {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
    fn mul(&self, x: &Poly, y: &Poly) -> Result<Poly> {
        let mut out = Poly::default();
        for (ka, ca) in &x.0 {
            for (kb, cb) in &y.0 {
                let mut key = vec![0; ka.len().max(kb.len())];
                for (i, e) in ka.iter().enumerate() {
                    key[i] += e;
                }
                for (i, e) in kb.iter().enumerate() {
                    key[i] += e;
                }
                out.add_term(key, ca * cb);
            }
        }
        Ok(out)
    }
    fn scale(&self, x: &Poly, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::default();
        }
        Poly(x.0.iter().map(|(k, v)| (k.clone(), v * c)).collect())
    }
}

/// Tautological classes with the strata product.
pub struct TautRing(ProductEngine);

impl TautRing {
    pub fn new(space: &Arc<MarkedSpace>) -> Self {
        TautRing(ProductEngine::new(space))
    }
}

impl GradedRing for TautRing {
    type Elem = TautClass;
    fn zero(&self) -> TautClass {
        TautClass::zero(self.0.space())
    }
    fn one(&self) -> TautClass {
        TautClass::one(self.0.space())
    }
    fn add(&self, x: &TautClass, y: &TautClass) -> TautClass {
        let mut out = x.clone();
        out += y;
        out
    }
    fn mul(&self, x: &TautClass, y: &TautClass) -> Result<TautClass> {
        self.0.product(x, y)
    }
    fn scale(&self, x: &TautClass, c: &Rational) -> TautClass {
        x.scaled(c)
    }
}

/// `c_0..=c_tmax` as the degree parts of `exp(Σ_{s≥1} (-1)^{s-1}(s-1)! ch_s)`,
/// with `ch_s` replaced by `-ch_s` when `negate` is set. `ch[0]` is unused.
pub fn invert_to_chern<R: GradedRing>(ring: &R, ch: &[R::Elem], tmax: usize, negate: bool) -> Result<Vec<R::Elem>> {
    if ch.len() <= tmax {
        return Err(Error::MissingComponent(ch.len()));
    }
    let mut x = vec![ring.zero(); tmax + 1];
    for s in 1..=tmax {
        let mut w = sign(s as u32 - 1) * Rational::from(factorial(s as u32 - 1));
        if negate {
            w = -w;
        }
        x[s] = ring.scale(&ch[s], &w);
    }
    // power[t] holds the degree-t part of X^n
    let mut power = vec![ring.zero(); tmax + 1];
    power[0] = ring.one();
    let mut c = power.clone();
    for n in 1..=tmax {
        let mut next = vec![ring.zero(); tmax + 1];
        for t in n..=tmax {
            for s in 1..=t + 1 - n {
                let prod = ring.mul(&x[s], &power[t - s])?;
                next[t] = ring.add(&next[t], &prod);
            }
        }
        power = next;
        let inv = Rational::from(factorial(n as u32)).recip();
        for t in n..=tmax {
            c[t] = ring.add(&c[t], &ring.scale(&power[t], &inv));
        }
    }
    Ok(c)
}

/// Recovers `ch_1..=ch_tmax` from Chern classes with Newton's identity
/// `t c_t = Σ_{s=1}^t (-1)^{s-1} s! ch_s c_{t-s}`. Entry 0 is zero.
pub fn newton_recover<R: GradedRing>(ring: &R, c: &[R::Elem], tmax: usize) -> Result<Vec<R::Elem>> {
    if c.len() <= tmax {
        return Err(Error::MissingComponent(c.len()));
    }
    let mut ch = vec![ring.zero(); tmax + 1];
    for t in 1..=tmax {
        let mut rest = ring.scale(&c[t], &Rational::from(t as i64));
        for s in 1..t {
            let w = -(sign(s as u32 - 1) * Rational::from(factorial(s as u32)));
            rest = ring.add(&rest, &ring.scale(&ring.mul(&ch[s], &c[t - s])?, &w));
        }
        let w = sign(t as u32 - 1) / Rational::from(factorial(t as u32));
        ch[t] = ring.scale(&rest, &w);
    }
    Ok(ch)
}

fn permutations(
    v: &mut Vec<usize>,
    k: usize,
    parity: bool,
    f: &mut dyn FnMut(&[usize], bool) -> Result<()>,
) -> Result<()> {
    if k == v.len() {
        return f(v, parity);
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, parity ^ (i != k), f)?;
        v.swap(k, i);
    }
    Ok(())
}

/// `Δ^{(p)}_q = det(c_{q+j-i})_{1≤i,j≤p}` by Leibniz expansion, with
/// `c_k = 0` for `k < 0` and `c_0` the unit.
pub fn thom_porteous<R: GradedRing>(ring: &R, c: &[R::Elem], p: usize, q: i64) -> Result<R::Elem> {
    let entry = |k: i64| -> Result<R::Elem> {
        if k < 0 {
            Ok(ring.zero())
        } else if k == 0 {
            Ok(ring.one())
        } else {
            c.get(k as usize).cloned().ok_or(Error::MissingComponent(k as usize))
        }
    };
    let mut total = ring.zero();
    let mut perm: Vec<usize> = (0..p).collect();
    permutations(&mut perm, 0, false, &mut |sigma, odd| {
        if (0..p).any(|i| q + sigma[i] as i64 - (i as i64) < 0) {
            return Ok(());
        }
        let mut term = ring.one();
        for (i, &j) in sigma.iter().enumerate() {
            term = ring.mul(&term, &entry(q + j as i64 - i as i64)?)?;
        }
        let s = if odd { Rational::from(-1) } else { Rational::one() };
        total = ring.add(&total, &ring.scale(&term, &s));
        Ok(())
    })?;
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(i: usize) -> Poly {
        Poly::symbol(i)
    }

    #[test]
    fn first_order_and_sign() {
        let ch = vec![Poly::default(), sym(1)];
        let c = invert_to_chern(&SymbolRing, &ch, 1, false).unwrap();
        assert_eq!(c[1], sym(1));
        let c = invert_to_chern(&SymbolRing, &ch, 1, true).unwrap();
        assert_eq!(c[1], SymbolRing.scale(&sym(1), &Rational::from(-1)));
        assert_eq!(c[0], SymbolRing.one());
    }

    #[test]
    fn second_chern_class() {
        let ch: Vec<Poly> = (0..3).map(|i| if i == 0 { Poly::default() } else { sym(i) }).collect();
        let c = invert_to_chern(&SymbolRing, &ch, 2, false).unwrap();
        let sq = SymbolRing.mul(&sym(1), &sym(1)).unwrap();
        let want = SymbolRing
            .add(&SymbolRing.scale(&sq, &Rational::new(1, 2)), &SymbolRing.scale(&sym(2), &Rational::from(-1)));
        assert_eq!(c[2], want);
        assert_eq!(c[2].render("ch"), "-ch_2 + 1/2·ch_1^2");
    }

    #[test]
    fn newton_round_trip() {
        let ch: Vec<Poly> = (0..5).map(|i| if i == 0 { Poly::default() } else { sym(i) }).collect();
        for negate in [false, true] {
            let c = invert_to_chern(&SymbolRing, &ch, 4, negate).unwrap();
            let back = newton_recover(&SymbolRing, &c, 4).unwrap();
            for s in 1..=4 {
                let want = if negate { SymbolRing.scale(&ch[s], &Rational::from(-1)) } else { ch[s].clone() };
                assert_eq!(back[s], want);
            }
        }
    }

    #[test]
    fn small_determinants() {
        let c: Vec<Poly> = (0..5).map(|i| if i == 0 { SymbolRing.one() } else { sym(i) }).collect();
        assert_eq!(thom_porteous(&SymbolRing, &c, 1, 3).unwrap(), sym(3));
        let d = thom_porteous(&SymbolRing, &c, 2, 1).unwrap();
        assert_eq!(d.render("c"), "-c_2 + c_1^2");
        let d = thom_porteous(&SymbolRing, &c, 2, 2).unwrap();
        assert_eq!(d.render("c"), "c_2^2 - c_1·c_3");
        let nums: Vec<Rational> = (1..=6).map(Rational::from).collect();
        assert_eq!(thom_porteous(&RationalField, &nums, 2, 1).unwrap(), Rational::one());
    }

    #[test]
    fn missing_entry() {
        let c = vec![Rational::one(), Rational::one()];
        assert_eq!(thom_porteous(&RationalField, &c, 2, 1), Err(Error::MissingComponent(2)));
    }
}
