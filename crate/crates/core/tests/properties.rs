mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{generator_pool, random_divisor, space};
use tautchern_core::arith::{bernoulli_poly, Rational};
use tautchern_core::chern::{chern_char_theorem, invert_to_chern, newton_recover, thom_porteous, RationalField};
use tautchern_core::combin::stable_bipartitions;
use tautchern_core::jacobian::{drc_divisor, modify_divisor, OneNodePolarisation};
use tautchern_core::oracle::chern_char_oracle;
use tautchern_core::strata::{Canonical, DecoratedGraph, Edge, TautClass};
use tautchern_core::tautprod::generator_product;
use tautchern_core::ucurve::DivisorSpec;

/// Applies a vertex permutation, edge shuffle and half-edge swaps.
fn scramble(g: &DecoratedGraph, perm_seed: u64) -> DecoratedGraph {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
    let n = g.vertices.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut vertices = g.vertices.clone();
    for (old, &new) in perm.iter().enumerate() {
        vertices[new] = g.vertices[old].clone();
    }
    let mut edges: Vec<Edge> = g
        .edges
        .iter()
        .map(|e| {
            let (mut a, mut b) = (e.0, e.1);
            a.vertex = perm[a.vertex];
            b.vertex = perm[b.vertex];
            if rng.gen_bool(0.5) {
                std::mem::swap(&mut a, &mut b);
            }
            Edge(a, b)
        })
        .collect();
    edges.shuffle(&mut rng);
    DecoratedGraph { vertices, edges, leg_psi: g.leg_psi.clone() }
}

fn product_pool_pairs() -> Vec<(u32, usize)> {
    vec![(1, 2), (2, 1), (2, 2), (3, 1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bernoulli_difference(t in 1u32..12, ell in -5i64..5) {
        // B_t(ℓ+1) - B_t(ℓ) = t ℓ^{t-1}
        let lhs = bernoulli_poly(t, ell + 1) - bernoulli_poly(t, ell);
        prop_assert_eq!(lhs, Rational::from(t as i64) * Rational::from(ell).pow(t - 1));
    }

    #[test]
    fn canonical_form_ignores_labels(which in 0usize..4, a in 0usize..64, b in 0usize..64, seed in any::<u64>()) {
        let (g, n) = product_pool_pairs()[which];
        let s = space(g, n);
        let pool = generator_pool(&s);
        let (x, y) = (&pool[a % pool.len()], &pool[b % pool.len()]);
        let prod = generator_product(&s, x, y).unwrap();
        for (graph, coeff) in prod.terms() {
            let scrambled = scramble(graph, seed);
            match scrambled.canonicalize(&s).unwrap() {
                Canonical::Term { graph: c, scalar } => {
                    prop_assert_eq!(&c, graph);
                    prop_assert_eq!(scalar, 1);
                }
                Canonical::Zero => prop_assert!(false, "canonical term vanished"),
            }
            prop_assert_eq!(scrambled.aut_order(), graph.aut_order());
            prop_assert!(!coeff.is_zero());
        }
    }

    #[test]
    fn product_commutes(which in 0usize..4, a in 0usize..64, b in 0usize..64) {
        let (g, n) = product_pool_pairs()[which];
        let s = space(g, n);
        let pool = generator_pool(&s);
        let (x, y) = (&pool[a % pool.len()], &pool[b % pool.len()]);
        let xy = generator_product(&s, x, y).unwrap();
        prop_assert_eq!(&xy, &generator_product(&s, y, x).unwrap());
        for (graph, _) in xy.terms() {
            prop_assert_eq!(graph.codim(), x.codim() + y.codim());
        }
    }

    #[test]
    fn theorem_matches_oracle(which in 0usize..4, seed in any::<u64>()) {
        let (g, n) = [(1, 1), (1, 2), (2, 1), (2, 2)][which];
        let s = space(g, n);
        let div = random_divisor(&mut ChaCha8Rng::seed_from_u64(seed), &s, -3, 3);
        let ch = chern_char_theorem(&div, s.dim()).unwrap();
        prop_assert_eq!(ch.components(), &chern_char_oracle(&div, s.dim()).unwrap()[..]);
        let rr = TautClass::one(&s).scaled(&Rational::from(div.degree() + 1 - g as i64));
        prop_assert_eq!(&ch.components()[0], &rr);
    }

    #[test]
    fn twist_is_stable_idempotent_and_equivariant(seed in any::<u64>(), num in -7i64..7, den in 1i64..4, shift in -3i64..3) {
        use rand::Rng;
        let s = space(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let div = random_divisor(&mut rng, &s, -2, 2);
        let value = Rational::new(2 * num + 1, 2 * den + 1);
        let bips = stable_bipartitions(&s);
        let phi = OneNodePolarisation::constant(&s, div.degree(), value.clone());
        let out = modify_divisor(&div, &phi).unwrap();
        for b in &bips {
            let side = Rational::from(div.ell * (2 * b.h as i64 - 1) + div.d_inside(b) + out.a(b));
            prop_assert!((side - &value).abs() < Rational::new(1, 2));
        }
        prop_assert_eq!(&modify_divisor(&out, &phi).unwrap(), &out);
        let b = bips[rng.gen_range(0..bips.len())];
        let shifted = phi.clone().with_value(b, &value + &Rational::from(shift));
        prop_assert_eq!(modify_divisor(&div, &shifted).unwrap().a(&b), out.a(&b) + shift);
    }

    #[test]
    fn newton_inverts_exponential(values in proptest::collection::vec(-20i64..20, 5)) {
        let ch: Vec<Rational> = std::iter::once(Rational::zero()).chain(values.iter().map(|&v| Rational::new(v, 7))).collect();
        for negate in [false, true] {
            let c = invert_to_chern(&RationalField, &ch, 5, negate).unwrap();
            let back = newton_recover(&RationalField, &c, 5).unwrap();
            for s in 1..=5 {
                let want = if negate { -&ch[s] } else { ch[s].clone() };
                prop_assert_eq!(&back[s], &want);
            }
        }
    }

    #[test]
    fn determinant_by_elimination(values in proptest::collection::vec(-9i64..9, 8), p in 1usize..5, q in -1i64..4) {
        let c: Vec<Rational> = std::iter::once(Rational::one()).chain(values.iter().map(|&v| Rational::from(v))).collect();
        let entry = |k: i64| if k < 0 { Rational::zero() } else { c[k as usize].clone() };
        let mut m: Vec<Vec<Rational>> =
            (0..p).map(|i| (0..p).map(|j| entry(q + j as i64 - i as i64)).collect()).collect();
        let mut det = Rational::one();
        for col in 0..p {
            let Some(pivot) = (col..p).find(|&r| !m[r][col].is_zero()) else {
                det = Rational::zero();
                break;
            };
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            det = &det * &m[col][col];
            for r in col + 1..p {
                let f = &m[r][col] / &m[col][col];
                for k in col..p {
                    let sub = &f * &m[col][k];
                    m[r][k] -= &sub;
                }
            }
        }
        prop_assert_eq!(thom_porteous(&RationalField, &c, p, q).unwrap(), det);
    }
}

#[test]
fn drc_is_antisymmetric() {
    for (g, n) in [(1, 2), (2, 2), (2, 3), (3, 3)] {
        let s = space(g, n);
        let labels: Vec<String> = s.labels().to_vec();
        for i in &labels {
            for j in &labels {
                let ij = drc_divisor(&s, i, j).unwrap();
                let ji = drc_divisor(&s, j, i).unwrap();
                let neg = DivisorSpec::new(
                    &s,
                    -ji.ell,
                    ji.d_values().iter().map(|d| -d).collect(),
                    ji.a_values().iter().map(|(b, a)| (*b, -a)).collect::<BTreeMap<_, _>>(),
                )
                .unwrap();
                assert_eq!(ij, neg);
            }
        }
    }
}
