//! Worked examples of the passage from finite to inassignable quantities,
//! each returning a [`GalleryReport`] whose claims are exact.

use std::fmt::Write as _;

use crate::calculus::{self, CalculusError};
use crate::dsl::canon::{canonical_variable_order, RationalForm};
use crate::dsl::poly::Poly;
use crate::dsl::{canonicalize, evaluate, parse_str, Bindings, Expr};
use crate::lc::{Classification, LcNumber};
use crate::rational::{self, Rational};
use crate::report::{ExampleId, GalleryReport};

/// The sample abscissae used when none are given.
pub fn default_grid() -> Vec<Rational> {
    (-3..=3).map(rational::int).collect()
}

/// The oblique line through `(0, 1)` meeting the x-axis at `H`.
pub const OBLIQUE_LINE: &str = "1 - x/H";

/// Both foci on the y-axis, at the origin and at `(0, H)`, vertex `(0, -1)`.
pub const ELLIPSE: &str = "sqrt(x^2 + y^2) + sqrt(x^2 + (y - H)^2)";
pub const ELLIPSE_RHS: &str = "H + 2";
/// The ellipse after both squarings, divided through by `H²`.
pub const CONIC: &str = "(y + 2 + 2/H)^2 - (x^2 + y^2)*(1 + 4/H + 4/H^2)";

/// Cofactor `k` with `4·S1·S2 - (C² - S1 - S2)² = k·H²·CONIC`, from an
/// independent expansion of both sides.
pub const CONIC_COFACTOR: i64 = -4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GalleryError {
    #[error("conic chain broken at step: {step}")]
    ChainBroken { step: String },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

fn expr(src: &str) -> Expr {
    parse_str(src).unwrap_or_else(|e| panic!("built-in expression `{src}`: {e}"))
}

fn real(q: &Rational, precision: u32) -> LcNumber {
    LcNumber::real(q.clone(), precision)
}

fn eval_at(e: &Expr, bindings: &[(&str, LcNumber)], precision: u32) -> LcNumber {
    let env = bindings.iter().fold(Bindings::new(precision), |env, (n, v)| env.with(*n, v.clone()));
    evaluate(e, &env).unwrap_or_else(|err| panic!("evaluating `{e}`: {err}"))
}

/// The line `y = 1 - x/H` at infinite `H`: its slope is the infinitesimal
/// `-eps`, its shadow is the parallel `y = 1`, and it meets the x-axis at the
/// infinite point `H`.
pub fn parallel_lines_report(xs: &[Rational], precision: u32) -> GalleryReport {
    let mut report = GalleryReport::new(ExampleId::ParallelLines);
    report.parameter(format!("line: y = {OBLIQUE_LINE}"));
    report.parameter(format!("xs: {}", join(xs)));
    let line = expr(OBLIQUE_LINE);
    let eps = LcNumber::eps(precision);
    let one = LcNumber::one(precision);

    let slope = calculus::differential_quotient(&line, "x", &LcNumber::zero(precision), &Bindings::new(precision))
        .expect("the line is defined everywhere");
    report.check_eq("slope of the line", &slope, -&eps);
    report.check_eq("slope classification", slope.classify(), Classification::Infinitesimal);

    for x in xs {
        let xv = real(x, precision);
        let y = eval_at(&line, &[("x", xv.clone())], precision);
        let expected = &one - &(&xv * &eps);
        report.check_eq(
            format!("point at x = {}", rational::format(x)),
            format!("({}, {y})", rational::format(x)),
            format!("({}, {expected})", rational::format(x)),
        );
        let shadow = (xv.standard_part(), y.standard_part());
        let shadow = match shadow {
            (Ok(a), Ok(b)) => format!("({}, {})", rational::format(&a), rational::format(&b)),
            _ => "undefined".to_string(),
        };
        report.check_eq(
            format!("shadow of the point at x = {}", rational::format(x)),
            shadow,
            format!("({}, 1)", rational::format(x)),
        );
        report.push(
            format!("point at x = {} is infinitely close to y = 1", rational::format(x)),
            y.is_infinitely_close(&one).to_string(),
            "true",
            y.is_infinitely_close(&one),
        );
    }

    // y = m·x + b vanishes at -b/m
    let b = eval_at(&line, &[("x", LcNumber::zero(precision))], precision);
    let intercept = (-&b).div(&slope).expect("slope is nonzero");
    report.check_eq("x-intercept", &intercept, LcNumber::infinite_unit(precision));
    report.check_eq("x-intercept classification", intercept.classify(), Classification::Infinite);
    let at_intercept = eval_at(&line, &[("x", intercept)], precision);
    report.check_eq("line at the x-intercept", &at_intercept, LcNumber::zero(precision));
    report
}

/// A segment of length `2x + dx` against one of length `2x`: unequal, yet
/// infinitely close, with an incomparably small difference.
pub fn infinitesimal_equality_report(x: &Rational, precision: u32) -> GalleryReport {
    let mut report = GalleryReport::new(ExampleId::InfinitesimalEquality);
    report.parameter(format!("x={}", rational::format(x)));
    let env = Bindings::new(precision).with("x", real(x, precision));
    let longer = evaluate(&expr("2*x + eps"), &env).expect("polynomial");
    let shorter = evaluate(&expr("2*x"), &env).expect("polynomial");

    let close = longer.is_infinitely_close(&shorter);
    report.push("2x + dx is infinitely close to 2x", close.to_string(), "true", close);
    let unequal = longer != shorter;
    report.push("2x + dx differs from 2x", format!("{longer} vs {shorter}"), "unequal", unequal);
    report.check_eq(
        "st(2x + dx)",
        rational::format(&longer.standard_part().expect("finite")),
        rational::format(&(rational::int(2) * x)),
    );
    let expected_reduced = if shorter.is_zero() { LcNumber::eps(precision) } else { shorter.clone() };
    report.check_eq("tlh(2x + dx)", longer.tlh_reduce(), expected_reduced);

    let diff = &longer - &shorter;
    let one = LcNumber::one(precision);
    for n in [1_i64, 10, 1_000, 1_000_000, 1_000_000_000_000] {
        let scaled = diff.scale(&rational::int(n));
        let below = scaled.compare(&one).is_lt();
        report.push(format!("{n}·(difference) < 1"), scaled.to_string(), "less than 1", below);
    }
    report
}

struct ConicRing {
    vars: Vec<String>,
}

impl ConicRing {
    // √S1, √S2 and R = √(S1·S2) are opaque symbols alongside x, y, H.
    const ROOT1: &'static str = "p";
    const ROOT2: &'static str = "q";
    const RADICAL: &'static str = "R";

    fn new() -> Self {
        ConicRing { vars: canonical_variable_order([Self::ROOT1, Self::ROOT2, Self::RADICAL, "x", "y"]) }
    }

    fn index(&self, name: &str) -> usize {
        self.vars.iter().position(|v| v == name).expect("declared variable")
    }

    fn form(&self, src: &str) -> RationalForm {
        canonicalize(&expr(src), &self.vars).expect("rational expression")
    }

    fn poly(&self, src: &str) -> Poly {
        self.form(src).as_polynomial().expect("polynomial expression")
    }

    fn show(&self, p: &Poly) -> String {
        p.display(&self.vars)
    }

    // Rewrites p², q² and p·q via their defining relations. Fails if a lone
    // root survives.
    fn eliminate_roots(&self, p: &Poly, s1: &Poly, s2: &Poly) -> Option<Poly> {
        let (i1, i2, ir) = (self.index(Self::ROOT1), self.index(Self::ROOT2), self.index(Self::RADICAL));
        let reduced = p.replace_square(i1, s1).replace_square(i2, s2);
        let n = reduced.nvars();
        let mut out = Poly::zero(n);
        for (k1, c1) in reduced.coefficients_in(i1).into_iter().enumerate() {
            for (k2, c) in c1.coefficients_in(i2).into_iter().enumerate() {
                match (k1, k2) {
                    (0, 0) => out = &out + &c,
                    (1, 1) => out = &out + &(&c * &Poly::var(n, ir)),
                    _ if c.is_zero() => {}
                    _ => return None,
                }
            }
        }
        Some(out)
    }
}

/// Squares the ellipse equation twice, tracking the radicals symbolically,
/// and checks that the result is a fixed multiple of `H²·CONIC`.
pub fn verify_conic_chain() -> Result<GalleryReport, GalleryError> {
    let ring = ConicRing::new();
    let mut report = GalleryReport::new(ExampleId::EllipseParabola);
    report.parameter(format!("ellipse: {ELLIPSE} = {ELLIPSE_RHS}"));
    report.parameter("S1 = x^2 + y^2, S2 = x^2 + (H - y)^2, C = H + 2, R^2 = S1*S2");

    let s1 = ring.poly("x^2 + y^2");
    let s2 = ring.poly("x^2 + (H - y)^2");
    let c = ring.poly(ELLIPSE_RHS);
    let ir = ring.index(ConicRing::RADICAL);
    let step = |report: &mut GalleryReport, description: &str, computed: String, expected: String| {
        if report.check_eq(description, &computed, &expected) {
            Ok(())
        } else {
            Err(GalleryError::ChainBroken { step: description.to_string() })
        }
    };

    // first squaring: (√S1 + √S2)² = S1 + S2 + 2R and C² = H² + 4H + 4
    let squared = ring
        .eliminate_roots(&ring.poly("(p + q)^2"), &s1, &s2)
        .ok_or_else(|| GalleryError::ChainBroken { step: "first squaring".into() })?;
    let first_lhs = ring.poly("x^2 + y^2 + x^2 + (H - y)^2 + 2*R");
    step(&mut report, "squared left side equals S1 + S2 + 2R", ring.show(&squared), ring.show(&first_lhs))?;
    let first_rhs = ring.poly("H^2 + 4*H + 4");
    step(&mut report, "squared right side equals H^2 + 4H + 4", ring.show(&c.pow(2)), ring.show(&first_rhs))?;

    // moving the non-radical terms across
    let first = &first_lhs - &first_rhs;
    let moved = &ring.poly("2*R") - &ring.poly("H^2 + 4*H + 4 - (x^2 + y^2 + x^2 + (H - y)^2)");
    step(&mut report, "isolating 2R is a rearrangement", ring.show(&moved), ring.show(&first))?;

    // second squaring: (2R)² - (C² - S1 - S2)², with R² = S1·S2
    let isolated = &(&c.pow(2) - &s1) - &s2;
    let second = &ring.poly("4*R^2") - &isolated.pow(2);
    let second = second.replace_square(ir, &(&s1 * &s2));
    let direct = &(&s1 * &s2).scale(&rational::int(4)) - &isolated.pow(2);
    step(&mut report, "squaring again eliminates R", ring.show(&second), ring.show(&direct))?;

    let second_form = RationalForm::from_polynomial(ring.vars.clone(), second.clone());
    let conic_scaled = ring.form(CONIC).mul(&ring.form("H^2"));
    let cofactor = second_form
        .div(&conic_scaled)
        .ok_or_else(|| GalleryError::ChainBroken { step: "conic is identically zero".into() })?;
    step(
        &mut report,
        "cofactor of 4·S1·S2 - (C² - S1 - S2)² over H²·conic",
        cofactor.to_string(),
        CONIC_COFACTOR.to_string(),
    )?;
    let remainder = second_form.sub(&conic_scaled.mul(&ring.form(&CONIC_COFACTOR.to_string())));
    step(&mut report, "remainder after dividing by the cofactor", remainder.to_string(), "0".into())?;

    // the vertex (0, -1) lies on both forms when H = 2
    let h = Expr::int(2);
    let vertex = [("x", LcNumber::real(rational::int(0), 16)), ("y", LcNumber::real(rational::int(-1), 16))];
    let ellipse_lhs = eval_at(&expr(ELLIPSE).substitute_infinite_unit(&h), &vertex, 16);
    let ellipse_rhs = eval_at(&expr(ELLIPSE_RHS).substitute_infinite_unit(&h), &vertex, 16);
    report.check_eq("ellipse at the vertex with H = 2", &ellipse_lhs, &ellipse_rhs);
    let conic = eval_at(&expr(CONIC).substitute_infinite_unit(&h), &vertex, 16);
    report.check_eq("conic at the vertex with H = 2", &conic, "0");
    Ok(report)
}

fn parabola_y(x0: &Rational) -> Rational {
    x0 * x0 / rational::int(4) - rational::int(1)
}

// (y + 2)² - (x² + y²), the shadow of the conic at finite (x, y)
fn shadow_conic(x: &Rational, y: &Rational) -> Rational {
    let y2 = y + rational::int(2);
    &y2 * &y2 - (x * x + y * y)
}

/// Evaluates the conic at infinite `H` on the parabola `y = x²/4 - 1` and
/// checks that the result is infinitesimal with shadow 0, while a point off
/// the parabola has a nonzero shadow.
pub fn parabola_shadow_report(xs: &[Rational], precision: u32) -> GalleryReport {
    let mut report = GalleryReport::new(ExampleId::EllipseParabola);
    report.parameter(format!("conic: {CONIC} = 0"));
    report.parameter(format!("x0: {}", join(xs)));
    let conic = expr(CONIC);
    for x0 in xs {
        let y0 = parabola_y(x0);
        let at = |y: &Rational| eval_at(&conic, &[("x", real(x0, precision)), ("y", real(y, precision))], precision);
        let label = format!("(x0, y0) = ({}, {})", rational::format(x0), rational::format(&y0));
        let value = at(&y0);
        report.push(
            format!("conic at {label} is zero or infinitesimal"),
            format!("{value} ({})", value.classify()),
            "zero or infinitesimal",
            matches!(value.classify(), Classification::Zero | Classification::Infinitesimal),
        );
        let leading_ok = value.leading_exponent().is_none_or(|e| *e >= rational::int(1));
        report.push(format!("conic at {label} has leading exponent >= 1"), value.to_string(), "O(eps)", leading_ok);
        report.check_eq(
            format!("st(conic) at {label}"),
            value.standard_part().map(|q| rational::format(&q)).unwrap_or_else(|e| e.to_string()),
            "0",
        );
        report.check_eq(
            format!("(y0 + 2)^2 - (x0^2 + y0^2) at {label}"),
            rational::format(&shadow_conic(x0, &y0)),
            "0",
        );

        let off = &y0 + rational::int(1);
        let off_value = at(&off);
        let expected = shadow_conic(x0, &off);
        let st_off = off_value.standard_part().map(|q| rational::format(&q)).unwrap_or_else(|e| e.to_string());
        report.push(
            format!("st(conic) off the parabola at y = {}", rational::format(&off)),
            st_off.clone(),
            rational::format(&expected),
            st_off == rational::format(&expected) && st_off != "0",
        );
    }
    report
}

/// CSV rows `x0,y0,st_of_lhs` along the parabola.
pub fn parabola_csv(xs: &[Rational], precision: u32) -> String {
    let conic = expr(CONIC);
    let mut out = String::from("x0,y0,st_of_lhs\n");
    for x0 in xs {
        let y0 = parabola_y(x0);
        let value = eval_at(&conic, &[("x", real(x0, precision)), ("y", real(&y0, precision))], precision);
        let st = value.standard_part().map(|q| rational::format(&q)).unwrap_or_else(|e| e.to_string());
        let _ = writeln!(out, "{},{},{}", rational::format(x0), rational::format(&y0), st);
    }
    out
}

/// The conic chain followed by the parabola shadow.
pub fn ellipse_parabola_report(xs: &[Rational], precision: u32) -> Result<GalleryReport, GalleryError> {
    let mut report = verify_conic_chain()?;
    report.absorb(parabola_shadow_report(xs, precision));
    Ok(report)
}

/// Product rule for `u = x, v = x²` at 1, then the case `a·y = x·v`.
pub fn product_rule_gallery(precision: u32) -> Result<GalleryReport, GalleryError> {
    let env = Bindings::new(precision);
    let mut report = calculus::product_rule_report(&expr("x"), &expr("x^2"), "x", &rational::int(1), &env)?;
    report.absorb(calculus::scaled_product_report(&rational::int(2), &expr("x^2 + 1"), "x", &rational::int(3), &env)?);
    Ok(report)
}

/// Runs one example with its default parameters.
pub fn run_example(id: ExampleId, precision: u32) -> Result<GalleryReport, GalleryError> {
    match id {
        ExampleId::ParallelLines => Ok(parallel_lines_report(&default_grid(), precision)),
        ExampleId::InfinitesimalEquality => Ok(infinitesimal_equality_report(&rational::int(3), precision)),
        ExampleId::EllipseParabola => ellipse_parabola_report(&default_grid(), precision),
        ExampleId::ProductRule => product_rule_gallery(precision),
    }
}

fn join(xs: &[Rational]) -> String {
    xs.iter().map(rational::format).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lc::DEFAULT_PRECISION as T;
    use crate::rational::{int, ratio};

    fn claim<'a>(r: &'a GalleryReport, prefix: &str) -> &'a crate::report::Claim {
        r.claims.iter().find(|c| c.description.starts_with(prefix)).unwrap_or_else(|| panic!("no claim `{prefix}`"))
    }

    #[test]
    fn parallel_lines() {
        let r = parallel_lines_report(&[int(4), int(0)], T);
        assert!(r.pass, "{r}");
        assert_eq!(claim(&r, "point at x = 4").computed, "(4, 1 - 4·eps)");
        assert_eq!(claim(&r, "shadow of the point at x = 4").computed, "(4, 1)");
        assert_eq!(claim(&r, "shadow of the point at x = 0").computed, "(0, 1)");
        assert_eq!(claim(&r, "x-intercept classification").computed, "infinite");
        assert_eq!(claim(&r, "x-intercept").computed, "eps^-1");
    }

    #[test]
    fn infinitesimal_equality() {
        let r = infinitesimal_equality_report(&int(3), T);
        assert!(r.pass, "{r}");
        assert_eq!(claim(&r, "2x + dx differs").computed, "6 + eps vs 6");
        let r = infinitesimal_equality_report(&int(0), T);
        assert!(r.pass, "{r}");
        assert_eq!(claim(&r, "tlh").computed, "eps");
    }

    #[test]
    fn conic_chain() {
        let r = verify_conic_chain().unwrap();
        assert!(r.pass, "{r}");
        assert_eq!(claim(&r, "cofactor").computed, "-4");
    }

    #[test]
    fn parabola_shadow() {
        let r = parabola_shadow_report(&[int(2), int(0), ratio(1, 3)], T);
        assert!(r.pass, "{r}");
        assert_eq!(claim(&r, "st(conic) off the parabola at y = 1").computed, "4");
        assert!(r.claims.iter().any(|c| c.description.contains("(0, -1)")));
        // y0 = x0²/4 - 1 at x0 = 2 is 0; the conic there is 4·eps·(2 - 4) + 4·eps²·(1 - 4)
        assert_eq!(claim(&r, "conic at (x0, y0) = (2, 0) has").computed, "-8·eps - 12·eps^2");
    }

    #[test]
    fn csv_rows() {
        let csv = parabola_csv(&[int(2), int(-3)], T);
        assert_eq!(csv, "x0,y0,st_of_lhs\n2,0,0\n-3,5/4,0\n");
    }

    #[test]
    fn every_default_example_passes() {
        for id in ExampleId::ALL {
            let r = run_example(id, T).unwrap();
            assert!(r.pass, "{r}");
            assert_eq!(r.example, id);
        }
    }
}
