use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use fullgroup_lab::fullgroup::{fibonacci_generators, fibonacci_subshift, CocycleElement, GeneratorSet};
use fullgroup_lab::points::Point;
use fullgroup_lab::randwalk::{convolution_powers, StepMeasure};
use fullgroup_lab::symbolic::{Subshift, SubshiftSpec, ToeplitzPattern};

struct Setup {
    point: Point,
    gens: GeneratorSet,
}

fn setup() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| {
        let s = fibonacci_subshift();
        Setup {
            point: Point::default_for(s.clone()).unwrap(),
            gens: fibonacci_generators(&s).unwrap(),
        }
    })
}

fn word() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..3usize, 0..7)
}

fn product(w: &[usize]) -> CocycleElement {
    setup().gens.product(w).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn associativity(a in word(), b in word(), c in word()) {
        let (g, h, k) = (product(&a), product(&b), product(&c));
        prop_assert_eq!(g.compose(&h).unwrap().compose(&k).unwrap(), g.compose(&h.compose(&k).unwrap()).unwrap());
    }

    #[test]
    fn inverses(a in word()) {
        let g = product(&a);
        let inv = g.inverse().unwrap();
        prop_assert!(g.compose(&inv).unwrap().is_identity());
        prop_assert!(inv.compose(&g).unwrap().is_identity());
        let mut rev = a.clone();
        rev.reverse();
        prop_assert_eq!(inv, product(&rev));
    }

    #[test]
    fn cocycle_rule(a in word(), b in word(), pos in -500i64..500) {
        let p = &setup().point;
        let (g, h) = (product(&a), product(&b));
        let kh = h.evaluate(p, pos).unwrap();
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(gh.evaluate(p, pos).unwrap(), g.evaluate(p, pos + kh).unwrap() + kh);
    }

    #[test]
    fn displacement_bound(a in word(), pos in -500i64..500) {
        let g = product(&a);
        prop_assert!(g.max_shift() <= a.len() as u64);
        prop_assert!(g.evaluate(&setup().point, pos).unwrap().unsigned_abs() <= a.len() as u64);
    }

    #[test]
    fn refinement_preserves_values(a in word(), extra in 0usize..3, pos in -200i64..200) {
        let g = product(&a);
        let d = g.depth() + extra;
        let table = g.refine(d).unwrap();
        let w = setup().point.window(pos, d).unwrap();
        prop_assert_eq!(table[&w], g.evaluate(&setup().point, pos).unwrap());
    }

    #[test]
    fn conservation(weights in prop::collection::vec(1u32..20, 4), n in 0usize..5) {
        let gens = &setup().gens;
        let total: u32 = weights.iter().sum();
        let mut atoms = vec![(
            "e".to_string(),
            CocycleElement::identity(gens.subshift().clone()).unwrap(),
            BigRational::new(weights[0].into(), total.into()),
        )];
        for (i, (name, g)) in gens.names().iter().zip(gens.elements()).enumerate() {
            atoms.push((name.clone(), g.clone(), BigRational::new(weights[i + 1].into(), total.into())));
        }
        let m = StepMeasure::new(gens.subshift().clone(), atoms).unwrap();
        let powers = convolution_powers(&m, n, 100_000).unwrap();
        for d in &powers {
            prop_assert!(d.total_mass().is_one());
            let push = d.pushforward(&setup().point, 0).unwrap();
            let sum = push.values().fold(BigRational::zero(), |acc, p| acc + p);
            prop_assert!(sum.is_one());
        }
    }

    #[test]
    fn toeplitz_factor_closure(body in "[ab*]{1,6}", n in 1usize..14) {
        let pattern = format!("a{body}");
        let t = ToeplitzPattern::parse(&pattern);
        prop_assume!(t.as_ref().is_ok_and(|t| t.holes() <= 2));
        factor_closure(&Subshift::new(SubshiftSpec::Toeplitz(t.unwrap())), n)?;
    }

    #[test]
    fn fibonacci_factor_closure(n in 1usize..40) {
        factor_closure(&fibonacci_subshift(), n)?;
    }
}

fn factor_closure(s: &Arc<Subshift>, n: usize) -> Result<(), TestCaseError> {
    let short = s.factors(n).unwrap();
    let long = s.factors(n + 1).unwrap();
    let mut left: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for w in long.iter() {
        let b = w.as_bytes();
        prop_assert!(short.iter().any(|u| u.as_bytes() == &b[1..]));
        prop_assert!(short.iter().any(|u| u.as_bytes() == &b[..n]));
        *left.entry(b[..n].to_vec()).or_default() += 1;
    }
    prop_assert_eq!(left.len(), short.len());
    Ok(())
}
