use std::sync::Arc;

use proptest::prelude::*;

use hombundle_core::poly::q;
use hombundle_core::{
    cube_zero_locus, iso_decide, FamilySpec, GradedRingPresentation, Monomial, Poly, Q,
};

fn e_ring(alpha: i64) -> Arc<GradedRingPresentation> {
    FamilySpec::e(alpha).unwrap().cohomology().unwrap().ring
}

fn m_ring(a: i64) -> Arc<GradedRingPresentation> {
    FamilySpec::m(a).cohomology().unwrap().ring
}

fn small_poly(nvars: usize, terms: &[(Vec<u32>, i64)]) -> Poly {
    Poly::from_terms(
        nvars,
        terms.iter().map(|(e, c)| (Monomial(e.clone()), q(*c))),
    )
}

fn arb_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0u32..3, 3), -5i64..=5), 0..5)
        .prop_map(|t| small_poly(3, &t))
}

#[test]
fn e_family_betti_and_cubic_relation() {
    for alpha in 1..=5 {
        let r = e_ring(alpha);
        assert_eq!(r.betti_numbers(), vec![1, 0, 3, 0, 6, 0, 5]);
        let rel = if alpha == 1 {
            "x1^2*x3 + x1*x3^2".to_string()
        } else {
            format!("x1^2*x3 + {alpha}*x1*x3^2")
        };
        let p = r.parse(&rel).unwrap();
        assert!(r.is_zero_in_ring(&p).unwrap(), "alpha {alpha}");
    }
}

#[test]
fn m_quadric_vanishes() {
    for a in 0..=4 {
        let r = m_ring(a);
        let p = r.parse("x1^2 + x1*y1 - y1*x2 - x2^2").unwrap();
        assert_eq!(r.is_zero_in_ring(&p).unwrap(), a == 0, "a = {a}");
        assert_eq!(r.betti(2).unwrap(), 3);
    }
}

#[test]
fn e_locus_points_have_zero_cube() {
    let r = e_ring(2);
    let locus = cube_zero_locus(&r).unwrap();
    for p in locus.points() {
        assert!(locus
            .cube(p)
            .iter()
            .all(|c| c == &Q::from_integer(0.into())));
    }
}

#[test]
fn presentation_text_round_trip() {
    for r in [e_ring(3), m_ring(2)] {
        let back = GradedRingPresentation::from_text(&r.to_text()).unwrap();
        assert_eq!(back.betti_numbers(), r.betti_numbers());
        assert_eq!(back.to_text(), r.to_text());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_commutative_and_evaluates(
        p in arb_poly(),
        r in arb_poly(),
        pt in prop::collection::vec(-4i64..=4, 3),
    ) {
        let pt: Vec<Q> = pt.into_iter().map(q).collect();
        prop_assert_eq!(&p * &r, &r * &p);
        prop_assert_eq!((&p * &r).eval(&pt), p.eval(&pt) * r.eval(&pt));
        prop_assert_eq!((&p + &r).eval(&pt), p.eval(&pt) + r.eval(&pt));
    }

    #[test]
    fn quotient_product_is_associative(
        a in prop::collection::vec(-3i64..=3, 3),
        b in prop::collection::vec(-3i64..=3, 3),
        c in prop::collection::vec(-3i64..=3, 3),
        alpha in 1i64..=4,
    ) {
        let ring = e_ring(alpha);
        let lin = |v: &[i64]| ring.class(&Poly::linear(&v.iter().map(|&x| q(x)).collect::<Vec<_>>())).unwrap();
        let (x, y, z) = (lin(&a), lin(&b), lin(&c));
        let l = x.multiply(&y).unwrap().multiply(&z).unwrap();
        let r = x.multiply(&y.multiply(&z).unwrap()).unwrap();
        prop_assert_eq!(l.to_poly(), r.to_poly());
    }

    #[test]
    fn cube_vanishes_exactly_on_locus(
        v in prop::collection::vec(-6i64..=6, 3),
        a in 0i64..=3,
    ) {
        let ring = m_ring(a);
        let locus = cube_zero_locus(&ring).unwrap();
        let omega: Vec<Q> = v.iter().map(|&x| q(x)).collect();
        prop_assume!(omega.iter().any(|x| x != &q(0)));
        let zero = locus.cube(&omega).iter().all(|c| c == &q(0));
        let on = locus.components.iter().any(|c| c.contains(&omega));
        prop_assert_eq!(zero, on);
    }

    #[test]
    fn iso_decision_is_symmetric(alpha in 1i64..=4, beta in 1i64..=4) {
        let (ra, rb) = (e_ring(alpha), e_ring(beta));
        let ab = iso_decide(&ra, &rb).unwrap();
        let ba = iso_decide(&rb, &ra).unwrap();
        prop_assert_eq!(ab.result_tag(), ba.result_tag());
        prop_assert_eq!(ab.result_tag() == "iso", alpha == beta);
    }
}
