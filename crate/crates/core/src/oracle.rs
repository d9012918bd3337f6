//! Term-by-term Grothendieck–Riemann–Roch evaluation of the Chern character,
//! kept independent of the closed-form evaluator except for the monomial
//! algebra and the pushforward rules.

use rayon::prelude::*;

use crate::arith::{bernoulli_number, factorial, sign, Rational};
use crate::combin::MarkedSpace;
use crate::error::{Error, Result};
use crate::strata::TautClass;
use crate::ucurve::{
    mul_linear, node_classes, push_forward, push_forward_node, DivisorSpec, Factor, FormalSum, NodeClass, UMonomial,
};

/// `Σ_a sum · L^a / a!` truncated at degree `max_degree`.
fn times_exp(sum: &FormalSum, linear: &[(Factor, Rational)], max_degree: u32) -> Result<FormalSum> {
    let mut total = sum.clone();
    let mut current = sum.clone();
    for a in 1..=max_degree {
        current = mul_linear(&current, linear, max_degree)?;
        let inv = Rational::from(a as i64).recip();
        current.values_mut().for_each(|c| *c *= &inv);
        if current.is_empty() {
            break;
        }
        for (m, c) in &current {
            crate::ucurve::add_term(&mut total, m.clone(), c.clone());
        }
    }
    Ok(total)
}

fn unit() -> FormalSum {
    let mut s = FormalSum::new();
    s.insert(UMonomial::one(), Rational::one());
    s
}

/// The linear forms `K̃ = K - Σ σ_p` and `D = ℓK̃ + Σ d_p σ_p + Σ a C`, and
/// `C` alone.
fn linear_forms(div: &DivisorSpec) -> (Vec<(Factor, Rational)>, Vec<(Factor, Rational)>, Vec<(Factor, Rational)>) {
    let space = div.space();
    let mut ktilde = vec![(Factor::K, Rational::one())];
    ktilde.extend(space.markings().map(|p| (Factor::Sigma(p), Rational::from(-1))));
    let c: Vec<(Factor, Rational)> = div.a_values().iter().map(|(b, a)| (Factor::C(*b), Rational::from(*a))).collect();
    let mut d = vec![(Factor::K, Rational::from(div.ell))];
    d.extend(space.markings().map(|p| (Factor::Sigma(p), Rational::from(div.d(p) - div.ell))));
    d.extend(c.iter().cloned());
    (ktilde, d, c)
}

/// The integrand `e^D · K̃/(e^K̃ - 1)` on the universal curve, up to degree
/// `max_degree`.
pub fn omega_integrand(div: &DivisorSpec, max_degree: u32) -> Result<FormalSum> {
    let (ktilde, d, _) = linear_forms(div);
    // Σ_n B_n/n! K̃^n
    let mut todd = FormalSum::new();
    let mut power = unit();
    for n in 0..=max_degree {
        if n > 0 {
            power = mul_linear(&power, &ktilde, max_degree)?;
        }
        let w = bernoulli_number(n) / Rational::from(factorial(n));
        for (m, c) in &power {
            crate::ucurve::add_term(&mut todd, m.clone(), c * &w);
        }
    }
    times_exp(&todd, &d, max_degree)
}

/// Checks that every term of `c` has codimension `s`.
fn assert_grading(c: &TautClass, s: u32) -> Result<()> {
    if c.is_homogeneous(s) {
        Ok(())
    } else {
        Err(Error::InvalidGraph(format!("pushforward left codimension {s}")))
    }
}

fn check_smax(space: &MarkedSpace, smax: u32) -> Result<()> {
    if smax > space.dim() {
        return Err(Error::DegreeOutOfRange { requested: smax as i64, dim: space.dim() });
    }
    Ok(())
}

/// `ch(R•π_* O(D))` in degrees `0..=smax` by direct expansion.
pub fn chern_char_oracle(div: &DivisorSpec, smax: u32) -> Result<Vec<TautClass>> {
    let space = div.space();
    check_smax(space, smax)?;
    let top = smax + 1;
    let mut out: Vec<TautClass> = (0..=smax).map(|_| TautClass::zero(space)).collect();

    let integrand = omega_integrand(div, top)?;
    let terms: Vec<(&UMonomial, &Rational)> = integrand.iter().filter(|(m, _)| m.degree() >= 1).collect();
    let pushed: Vec<(u32, TautClass)> = terms
        .par_iter()
        .map(|(m, c)| {
            let s = m.degree() - 1;
            let pf = push_forward(space, m)?.scaled(c);
            assert_grading(&pf, s)?;
            Ok((s, pf))
        })
        .collect::<Result<_>>()?;
    for (s, c) in pushed {
        out[s as usize] += &c;
    }

    for (s, c) in phi(div, smax)?.into_iter().enumerate() {
        out[s] += &c;
    }
    Ok(out)
}

/// `π_*((Td^∨(O_Σ)^{-1} - 1) e^C)` in degrees `0..=smax`.
pub fn phi(div: &DivisorSpec, smax: u32) -> Result<Vec<TautClass>> {
    let space = div.space();
    check_smax(space, smax)?;
    let top = smax + 1;
    let (_, _, c) = linear_forms(div);
    let exp_c = times_exp(&unit(), &c, top.saturating_sub(2))?;
    let mut jobs: Vec<(NodeClass, Rational)> = Vec::new();
    let mut b = 2;
    while b <= top {
        let w = bernoulli_number(b) / Rational::from(factorial(b));
        for e in 0..=b - 2 {
            let coeff = &w * &sign(e);
            for node in node_classes(space, e, b - 2 - e) {
                jobs.push((node, coeff.clone()));
            }
        }
        b += 2;
    }
    let pushed: Vec<(u32, TautClass)> = jobs
        .par_iter()
        .map(|(node, w)| {
            let mut acc: Vec<(u32, TautClass)> = Vec::new();
            for (m, cm) in &exp_c {
                let t = m.degree() + node.codim();
                if t > top {
                    continue;
                }
                let pf = push_forward_node(space, node, m)?.scaled(&(w * cm));
                assert_grading(&pf, t - 1)?;
                acc.push((t - 1, pf));
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut out: Vec<TautClass> = (0..=smax).map(|_| TautClass::zero(space)).collect();
    for (s, c) in pushed {
        out[s as usize] += &c;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::combin::stable_bipartitions;
    use crate::strata::{chain_graph, Tail};

    #[test]
    fn degree_zero_is_riemann_roch() {
        let space = Arc::new(MarkedSpace::numbered(2, 2).unwrap());
        let div = DivisorSpec::new(&space, 1, vec![2, -1], Default::default()).unwrap();
        let ch = chern_char_oracle(&div, 0).unwrap();
        assert_eq!(ch[0], TautClass::one(&space).scaled(&Rational::from(div.degree() + 1 - 2)));
    }

    #[test]
    fn genus_one_degree_one() {
        let space = Arc::new(MarkedSpace::numbered(1, 1).unwrap());
        let div = DivisorSpec::zero(&space);
        let ch = chern_char_oracle(&div, 1).unwrap();
        let twelfth = Rational::new(1, 12);
        let mut want = TautClass::psi(&space, space.anchor(), 1).scaled(&-&twelfth);
        want += &TautClass::kappa(&space, 1).scaled(&twelfth);
        let loop_graph = chain_graph(&space, &[], &[], Tail::Loop(0, 0)).unwrap();
        want.add_graph(&loop_graph, &twelfth).unwrap();
        assert_eq!(ch[1], want);
    }

    #[test]
    fn smax_out_of_range() {
        let space = Arc::new(MarkedSpace::numbered(1, 1).unwrap());
        assert!(matches!(chern_char_oracle(&DivisorSpec::zero(&space), 2), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn truncation_is_stable() {
        let space = Arc::new(MarkedSpace::numbered(2, 2).unwrap());
        let bips = stable_bipartitions(&space);
        let a = bips.iter().enumerate().map(|(i, b)| (*b, i as i64 - 1)).collect();
        let div = DivisorSpec::new(&space, -1, vec![1, 2], a).unwrap();
        let short = chern_char_oracle(&div, 2).unwrap();
        let long = chern_char_oracle(&div, 4).unwrap();
        assert_eq!(short[..], long[..3]);
    }
}
