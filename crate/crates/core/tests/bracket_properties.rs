mod common;

use common::*;
use courant::algebra::Element;
use proptest::prelude::*;

fn graded_sign(a: u32, b: u32) -> bool {
    a * b % 2 == 1
}

fn apply(neg: bool, x: Element) -> Element {
    if neg {
        -x
    } else {
        x
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn product_is_graded_commutative_and_associative(
        seed in arb_genexact_seed(),
        (n1, n2, n3) in (0u32..=3, 0u32..=3, 0u32..=2),
        a in arb_terms(), b in arb_terms(), c in arb_terms(),
    ) {
        let m = seed.rotated();
        let ctx = m.context();
        let (x, y, z) = (element_from(ctx, n1, &a), element_from(ctx, n2, &b), element_from(ctx, n3, &c));
        prop_assert_eq!(&x * &y, apply(graded_sign(n1, n2), &y * &x));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
    }

    #[test]
    fn bracket_is_graded_skew(
        seed in arb_genexact_seed(),
        (n1, n2) in (0u32..=3, 0u32..=3),
        a in arb_terms(), b in arb_terms(),
    ) {
        let m = seed.rotated();
        let ctx = m.context();
        let (x, y) = (element_from(ctx, n1, &a), element_from(ctx, n2, &b));
        let xy = x.poisson_bracket(&y).unwrap();
        let yx = y.poisson_bracket(&x).unwrap();
        prop_assert_eq!(xy, apply(!graded_sign(n1, n2), yx));
    }

    #[test]
    fn bracket_is_a_graded_derivation(
        seed in arb_genexact_seed(),
        (n1, n2, n3) in (0u32..=3, 0u32..=2, 0u32..=2),
        a in arb_terms(), b in arb_terms(), c in arb_terms(),
    ) {
        let m = seed.rotated();
        let ctx = m.context();
        let (f, g, k) = (element_from(ctx, n1, &a), element_from(ctx, n2, &b), element_from(ctx, n3, &c));
        let lhs = f.poisson_bracket(&(&g * &k)).unwrap();
        let rhs = &(&f.poisson_bracket(&g).unwrap() * &k)
            + &apply(graded_sign(n1, n2), &g * &f.poisson_bracket(&k).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_satisfies_graded_jacobi(
        seed in arb_genexact_seed(),
        (n1, n2, n3) in (0u32..=3, 0u32..=3, 0u32..=3),
        a in arb_terms(), b in arb_terms(), c in arb_terms(),
    ) {
        let m = seed.rotated();
        let ctx = m.context();
        let (f, g, k) = (element_from(ctx, n1, &a), element_from(ctx, n2, &b), element_from(ctx, n3, &c));
        let br = |x: &Element, y: &Element| x.poisson_bracket(y).unwrap();
        let lhs = br(&f, &br(&g, &k));
        let rhs = &br(&br(&f, &g), &k) + &apply(graded_sign(n1, n2), br(&g, &br(&f, &k)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_lowers_degree_by_two(
        seed in arb_genexact_seed(),
        (n1, n2) in (0u32..=3, 0u32..=3),
        a in arb_terms(), b in arb_terms(),
    ) {
        let m = seed.rotated();
        let ctx = m.context();
        let xy = element_from(ctx, n1, &a).poisson_bracket(&element_from(ctx, n2, &b)).unwrap();
        prop_assert!(xy.is_zero() || (n1 + n2 >= 2 && xy.is_homogeneous_of(n1 + n2 - 2)));
    }
}
