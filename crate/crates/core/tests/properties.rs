//! Algebraic invariants checked on generated inputs.

use std::cmp::Ordering;

use leibniz::calculus::{self, Increment};
use leibniz::dsl::{canonicalize, evaluate, parse_str, Bindings, Expr};
use leibniz::gallery;
use leibniz::rational::{int, ratio};
use leibniz::{Classification, LcNumber, Rational};
use num_traits::Zero;
use proptest::prelude::*;

const T: u32 = 16;

fn rational(bound: i64) -> impl Strategy<Value = Rational> {
    (-bound..=bound, 1..=9i64).prop_map(|(n, d)| ratio(n, d))
}

fn nonzero_rational(bound: i64) -> impl Strategy<Value = Rational> {
    rational(bound).prop_filter("nonzero", |q| !q.is_zero())
}

// Exponents in halves from -2 to 3, so infinite, appreciable and
// infinitesimal terms all occur.
fn series() -> impl Strategy<Value = LcNumber> {
    prop::collection::vec(((-4..=6i64).prop_map(|k| ratio(k, 2)), rational(9)), 0..=3)
        .prop_map(|terms| LcNumber::from_terms(terms, T))
}

fn finite_series() -> impl Strategy<Value = LcNumber> {
    prop::collection::vec(((0..=6i64).prop_map(|k| ratio(k, 2)), rational(9)), 0..=3)
        .prop_map(|terms| LcNumber::from_terms(terms, T))
}

fn nonzero_series() -> impl Strategy<Value = LcNumber> {
    series().prop_filter("nonzero", |x| !x.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn addition_is_a_commutative_group(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &LcNumber::zero(T), a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn multiplication_laws_hold_up_to_the_horizon(a in series(), b in series(), c in series()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&(&a * &b) * &c).agrees_with(&(&a * &(&b * &c))));
        prop_assert!((&a * &(&b + &c)).agrees_with(&(&(&a * &b) + &(&a * &c))));
        prop_assert_eq!(&a * &LcNumber::one(T), a.clone());
    }

    #[test]
    fn nonzero_elements_are_invertible(a in nonzero_series()) {
        let inv = a.inverse().unwrap();
        prop_assert!((&a * &inv).agrees_with(&LcNumber::one(T)));
        prop_assert!(inv.inverse().unwrap().agrees_with(&a));
    }

    #[test]
    fn standard_part_is_a_ring_homomorphism(a in finite_series(), b in finite_series()) {
        let st = |x: &LcNumber| x.standard_part().unwrap();
        prop_assert_eq!(st(&(&a + &b)), st(&a) + st(&b));
        prop_assert_eq!(st(&(&a * &b)), st(&a) * st(&b));
        prop_assert_eq!(st(&(&a - &b)), st(&a) - st(&b));
        prop_assert!(a.is_infinitely_close(&LcNumber::real(st(&a), T)));
    }

    #[test]
    fn infinite_closeness_is_an_equivalence(a in series(), b in series(), c in series(), f in finite_series()) {
        prop_assert!(a.is_infinitely_close(&a));
        prop_assert_eq!(a.is_infinitely_close(&b), b.is_infinitely_close(&a));
        let b2 = &a + &LcNumber::monomial(int(3), int(1), T);
        let c2 = &b2 - &LcNumber::monomial(int(5), ratio(1, 2), T);
        prop_assert!(a.is_infinitely_close(&b2) && b2.is_infinitely_close(&c2) && a.is_infinitely_close(&c2));
        if a.is_infinitely_close(&b) {
            prop_assert!((&a + &c).is_infinitely_close(&(&b + &c)));
            prop_assert!((&a * &f).is_infinitely_close(&(&b * &f)));
        }
    }

    #[test]
    fn order_is_total_and_compatible(a in series(), b in series(), c in series()) {
        let ab = a.compare(&b);
        prop_assert_eq!(ab, b.compare(&a).reverse());
        prop_assert_eq!(ab == Ordering::Equal, a == b);
        if ab != Ordering::Greater && b.compare(&c) != Ordering::Greater {
            prop_assert!(a.compare(&c) != Ordering::Greater);
        }
        prop_assert_eq!((&a + &c).compare(&(&b + &c)), ab);
        if c.signum() > 0 {
            prop_assert_eq!((&a * &c).compare(&(&b * &c)), ab);
        }
    }

    #[test]
    fn classification_matches_the_leading_exponent(a in series()) {
        let class = a.classify();
        match a.leading_exponent() {
            None => prop_assert_eq!(class, Classification::Zero),
            Some(e) if e.is_zero() => prop_assert_eq!(class, Classification::Appreciable),
            Some(e) if *e > Rational::zero() => prop_assert_eq!(class, Classification::Infinitesimal),
            Some(_) => prop_assert_eq!(class, Classification::Infinite),
        }
    }

    #[test]
    fn tlh_reduction_is_idempotent(a in series()) {
        let once = a.tlh_reduce();
        prop_assert_eq!(once.tlh_reduce(), once.clone());
        prop_assert!(once.len() <= 1);
        prop_assert_eq!(once.leading_exponent(), a.leading_exponent());
        prop_assert_eq!(once.leading_coefficient(), a.leading_coefficient());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn square_root_squares_back(root in (1..=12i64, 1..=9i64), e in (-4..=6i64), rest in series()) {
        // a positive leading coefficient that is a rational square; the tail
        // exponents (from -2) are shifted strictly above the leading one
        let lead = ratio(root.0 * root.0, root.1 * root.1);
        let lead_exp = ratio(e, 2);
        let tail: Vec<(Rational, Rational)> = rest
            .terms()
            .map(|(x, c)| (&lead_exp + x + int(3), c.clone()))
            .collect();
        let a = &LcNumber::monomial(lead, lead_exp.clone(), T) + &LcNumber::from_terms(tail, T);
        let s = a.sqrt().unwrap();
        prop_assert!(s.signum() > 0);
        prop_assert!((&s * &s).agrees_with(&a));
    }
}

// Expression trees with non-negative constants; negative constants print as
// negations and would not round-trip node for node.
fn expr_tree(rational_only: bool) -> impl Strategy<Value = Expr> {
    sized_tree(rational_only, 4, 3)
}

// Shallow trees with small powers keep canonical forms of moderate degree.
fn small_rational_tree() -> impl Strategy<Value = Expr> {
    sized_tree(true, 3, 2)
}

fn sized_tree(rational_only: bool, depth: u32, max_power: i64) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0..=9i64, 1..=4i64).prop_map(|(n, d)| Expr::constant(ratio(n, d))),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        Just(Expr::eps()),
        Just(Expr::h()),
    ];
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        let rational_nodes = prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::add(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::sub(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::mul(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::div(l, r)),
            (inner.clone(), -max_power..=max_power).prop_map(|(b, k)| Expr::pow(b, k)),
            inner.clone().prop_map(Expr::neg),
        ];
        if rational_only {
            rational_nodes.boxed()
        } else {
            prop_oneof![4 => rational_nodes, 1 => inner.clone().prop_map(Expr::sqrt), 1 => inner.prop_map(Expr::st)]
                .boxed()
        }
    })
}

fn point() -> impl Strategy<Value = Bindings> {
    (rational(9), rational(9))
        .prop_map(|(x, y)| Bindings::new(T).with("x", LcNumber::real(x, T)).with("y", LcNumber::real(y, T)))
}

fn lc_point() -> impl Strategy<Value = Bindings> {
    (series(), series()).prop_map(|(x, y)| Bindings::new(T).with("x", x).with("y", y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_then_parsing_round_trips(e in expr_tree(false)) {
        let printed = e.to_string();
        let back = parse_str(&printed).unwrap();
        prop_assert_eq!(back, e, "printed as {}", printed);
    }

    #[test]
    fn evaluation_is_a_homomorphism(l in expr_tree(true), r in expr_tree(true), env in lc_point()) {
        if let (Ok(a), Ok(b)) = (evaluate(&l, &env), evaluate(&r, &env)) {
            prop_assert_eq!(evaluate(&Expr::add(l.clone(), r.clone()), &env).unwrap(), &a + &b);
            prop_assert_eq!(evaluate(&Expr::sub(l.clone(), r.clone()), &env).unwrap(), &a - &b);
            prop_assert_eq!(evaluate(&Expr::mul(l.clone(), r.clone()), &env).unwrap(), &a * &b);
            prop_assert_eq!(evaluate(&Expr::div(l.clone(), r.clone()), &env).ok(), a.div(&b).ok());
            prop_assert_eq!(evaluate(&Expr::neg(l.clone()), &env).unwrap(), -&a);
        }
    }

    #[test]
    fn canonical_form_denotes_the_same_function(e in small_rational_tree(), env in point()) {
        let Ok(form) = canonicalize(&e, ["x", "y"]) else { return Ok(()) };
        let back = form.to_expr().unwrap();
        if let (Ok(a), Ok(b)) = (evaluate(&e, &env), evaluate(&back, &env)) {
            prop_assert!(a.agrees_with(&b), "{} = {} but {} = {}", e, a, back, b);
        }
    }

    #[test]
    fn equal_functions_have_equal_canonical_forms(e in small_rational_tree(), f in small_rational_tree()) {
        let vars = ["x", "y"];
        let Ok(form) = canonicalize(&e, vars) else { return Ok(()) };
        // e + f - f and e·(f² + 1)/(f² + 1) are the same rational function
        let shifted = Expr::sub(Expr::add(e.clone(), f.clone()), f.clone());
        if let Ok(g) = canonicalize(&shifted, vars) {
            prop_assert_eq!(&g, &form);
        }
        let q = Expr::add(Expr::pow(f, 2), Expr::int(1));
        let scaled = Expr::div(Expr::mul(e, q.clone()), q);
        if let Ok(g) = canonicalize(&scaled, vars) {
            prop_assert_eq!(g, form);
        }
    }
}

type Dense = Vec<Rational>;

fn dense_poly() -> impl Strategy<Value = Dense> {
    prop::collection::vec(rational(9), 1..=5)
}

fn poly_expr(p: &Dense) -> Expr {
    p.iter().enumerate().fold(Expr::int(0), |acc, (k, c)| {
        Expr::add(acc, Expr::mul(Expr::constant(c.clone()), Expr::pow(Expr::var("x"), k as i64)))
    })
}

fn oracle_derivative(p: &Dense, x: &Rational) -> Rational {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * int(k as i64) * (1..k).fold(int(1), |acc, _| acc * x))
        .fold(Rational::zero(), |acc, t| acc + t)
}

fn shadow(f: &Expr, x: &Rational) -> Rational {
    calculus::derivative_at(f, "x", x, &Bindings::new(T)).unwrap().shadow
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn derivative_shadow_matches_the_power_rule(p in dense_poly(), x in rational(9)) {
        let d = calculus::derivative_at(&poly_expr(&p), "x", &x, &Bindings::new(T)).unwrap();
        prop_assert_eq!(d.shadow.clone(), oracle_derivative(&p, &x));
        prop_assert!(matches!(d.discarded.classify(), Classification::Zero | Classification::Infinitesimal));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn derivative_is_linear(p in dense_poly(), q in dense_poly(), a in rational(5), b in rational(5), x in rational(9)) {
        let combined = Expr::add(
            Expr::mul(Expr::constant(a.clone()), poly_expr(&p)),
            Expr::mul(Expr::constant(b.clone()), poly_expr(&q)),
        );
        prop_assert_eq!(shadow(&combined, &x), &a * shadow(&poly_expr(&p), &x) + &b * shadow(&poly_expr(&q), &x));
    }

    #[test]
    fn increment_direction_does_not_change_the_shadow(p in dense_poly(), x in rational(9)) {
        let f = poly_expr(&p);
        let env = Bindings::new(T);
        let up = calculus::derivative_at_with(&f, "x", &x, &env, Increment::Positive).unwrap();
        let down = calculus::derivative_at_with(&f, "x", &x, &env, Increment::Negative).unwrap();
        prop_assert_eq!(up.shadow, down.shadow);
    }

    #[test]
    fn rational_function_derivative_matches_the_quotient_rule(x in nonzero_rational(9)) {
        // d/dx (1/x) = -1/x²
        let f = parse_str("1/x").unwrap();
        prop_assert_eq!(shadow(&f, &x), -(&x * &x).recip());
    }

    #[test]
    fn parabola_shadow_holds_for_any_abscissa(x0 in rational(40)) {
        let report = gallery::parabola_shadow_report(std::slice::from_ref(&x0), T);
        prop_assert!(report.pass, "{}", report);
    }
}
