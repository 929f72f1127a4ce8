//! Differentiation with an actual infinitesimal increment.
//!
//! The differential quotient `(f(x + eps) - f(x)) / eps` is formed in the
//! series continuum; its shadow is the assignable derivative and the rest is
//! the infinitesimal remainder thrown away by the law of homogeneity.

use serde::Serialize;

use crate::dsl::{evaluate, Bindings, EvalError, Expr, Node};
use crate::lc::{Classification, LcError, LcNumber};
use crate::rational::{self, Rational};
use crate::report::{ExampleId, GalleryReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalculusError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Arithmetic(#[from] LcError),
    #[error("differential quotient {quotient} is infinite")]
    NotFinite { quotient: String },
    #[error("`{name}` at position {position} is outside the symbolic differentiation fragment")]
    UnsupportedNode { name: &'static str, position: usize },
}

/// Sign of the increment `±eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Increment {
    #[default]
    Positive,
    Negative,
}

impl Increment {
    fn value(self, precision: u32) -> LcNumber {
        match self {
            Increment::Positive => LcNumber::eps(precision),
            Increment::Negative => -LcNumber::eps(precision),
        }
    }
}

/// Differential quotient paired with its assignable shadow.
///
/// `quotient` is `dy/dx` with an inassignable `dx`; `shadow` is the
/// assignable `(d)y/(d)x`; `discarded` is what the shadow drops. The
/// relation `quotient = shadow + discarded` is kept as data rather than as
/// an equality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffResult {
    pub quotient: LcNumber,
    #[serde(with = "crate::rational::serde_string")]
    pub shadow: Rational,
    pub discarded: LcNumber,
}

impl DiffResult {
    pub fn from_quotient(quotient: LcNumber) -> Result<Self, CalculusError> {
        if quotient.classify() == Classification::Infinite {
            return Err(CalculusError::NotFinite { quotient: quotient.to_string() });
        }
        let shadow = quotient.standard_part()?;
        let discarded = &quotient - &LcNumber::real(shadow.clone(), quotient.precision());
        assert!(
            matches!(discarded.classify(), Classification::Zero | Classification::Infinitesimal),
            "remainder of a finite quotient must be infinitesimal"
        );
        Ok(DiffResult { quotient, shadow, discarded })
    }
}

fn bind(env: &Bindings, var: &str, value: LcNumber) -> Bindings {
    env.clone().with(var, value)
}

/// `f(point + dx) - f(point)` for the increment `dx = ±eps`.
pub fn differential(
    f: &Expr,
    var: &str,
    point: &LcNumber,
    env: &Bindings,
    increment: Increment,
) -> Result<LcNumber, CalculusError> {
    let dx = increment.value(env.precision());
    let moved = evaluate(f, &bind(env, var, point + &dx))?;
    let base = evaluate(f, &bind(env, var, point.clone()))?;
    Ok(&moved - &base)
}

/// `(f(point + eps) - f(point)) / eps`.
pub fn differential_quotient(f: &Expr, var: &str, point: &LcNumber, env: &Bindings) -> Result<LcNumber, CalculusError> {
    differential_quotient_with(f, var, point, env, Increment::Positive)
}

pub fn differential_quotient_with(
    f: &Expr,
    var: &str,
    point: &LcNumber,
    env: &Bindings,
    increment: Increment,
) -> Result<LcNumber, CalculusError> {
    let d = differential(f, var, point, env, increment)?;
    // dividing by ±eps is an exact shift
    let q = d.shift(&rational::int(-1));
    Ok(match increment {
        Increment::Positive => q,
        Increment::Negative => -q,
    })
}

pub fn derivative_at(f: &Expr, var: &str, point: &Rational, env: &Bindings) -> Result<DiffResult, CalculusError> {
    derivative_at_with(f, var, point, env, Increment::Positive)
}

pub fn derivative_at_with(
    f: &Expr,
    var: &str,
    point: &Rational,
    env: &Bindings,
    increment: Increment,
) -> Result<DiffResult, CalculusError> {
    let p = LcNumber::real(point.clone(), env.precision());
    DiffResult::from_quotient(differential_quotient_with(f, var, &p, env, increment)?)
}

fn zero() -> Expr {
    Expr::int(0)
}

fn is_const(e: &Expr, n: i64) -> bool {
    matches!(&e.node, Node::Const(q) if *q == rational::int(n))
}

fn add(l: Expr, r: Expr) -> Expr {
    match (is_const(&l, 0), is_const(&r, 0)) {
        (true, _) => r,
        (_, true) => l,
        _ => Expr::add(l, r),
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (is_const(&l, 0), is_const(&r, 0)) {
        (_, true) => l,
        (true, _) => Expr::neg(r),
        _ => Expr::sub(l, r),
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    if is_const(&l, 0) || is_const(&r, 0) {
        return zero();
    }
    match (is_const(&l, 1), is_const(&r, 1)) {
        (true, _) => r,
        (_, true) => l,
        _ => Expr::mul(l, r),
    }
}

/// Textbook recursive differentiation, used as an independent oracle.
/// Other variables are constants.
pub fn symbolic_derivative(f: &Expr, var: &str) -> Result<Expr, CalculusError> {
    let d = |e: &Expr| symbolic_derivative(e, var);
    Ok(match &f.node {
        Node::Const(_) | Node::Eps | Node::HUnit => zero(),
        Node::Var(name) => Expr::int(i64::from(name == var)),
        Node::Add(l, r) => add(d(l)?, d(r)?),
        Node::Sub(l, r) => sub(d(l)?, d(r)?),
        Node::Neg(a) => {
            let da = d(a)?;
            if is_const(&da, 0) {
                da
            } else {
                Expr::neg(da)
            }
        }
        Node::Mul(l, r) => add(mul(d(l)?, (**r).clone()), mul((**l).clone(), d(r)?)),
        Node::Div(l, r) => {
            let top = sub(mul(d(l)?, (**r).clone()), mul((**l).clone(), d(r)?));
            if is_const(&top, 0) {
                zero()
            } else {
                Expr::div(top, Expr::pow((**r).clone(), 2))
            }
        }
        Node::Pow(b, n) => {
            if *n == 0 {
                zero()
            } else {
                let lowered = if *n == 2 { (**b).clone() } else { Expr::pow((**b).clone(), n - 1) };
                mul(mul(Expr::int(*n), lowered), d(b)?)
            }
        }
        Node::Sqrt(_) => return Err(CalculusError::UnsupportedNode { name: "sqrt", position: f.position }),
        Node::St(_) => return Err(CalculusError::UnsupportedNode { name: "st", position: f.position }),
    })
}

fn finite_or_infinitesimal(x: &LcNumber) -> bool {
    matches!(x.classify(), Classification::Zero | Classification::Infinitesimal)
}

/// Checks `d(uv) = u·dv + v·du + du·dv` at a point, its shadow form, and
/// that the dropped `du·dv/dx` is infinitesimal.
pub fn product_rule_report(
    u: &Expr,
    v: &Expr,
    var: &str,
    point: &Rational,
    env: &Bindings,
) -> Result<GalleryReport, CalculusError> {
    let t = env.precision();
    let mut report = GalleryReport::new(ExampleId::ProductRule);
    report.parameter(format!("u={u}"));
    report.parameter(format!("v={v}"));
    report.parameter(format!("{var}={}", rational::format(point)));

    let p = LcNumber::real(point.clone(), t);
    let at = |f: &Expr| evaluate(f, &bind(env, var, p.clone()));
    let uv = Expr::mul(u.clone(), v.clone());
    let (u0, v0) = (at(u)?, at(v)?);
    let du = differential(u, var, &p, env, Increment::Positive)?;
    let dv = differential(v, var, &p, env, Increment::Positive)?;
    let duv = differential(&uv, var, &p, env, Increment::Positive)?;

    let expansion = &(&(&u0 * &dv) + &(&v0 * &du)) + &(&du * &dv);
    report.push(
        "d(uv) = u·dv + v·du + du·dv as series",
        duv.to_string(),
        expansion.to_string(),
        duv.agrees_with(&expansion),
    );

    let to_quotient = |d: &LcNumber| d.shift(&rational::int(-1));
    let lhs = DiffResult::from_quotient(to_quotient(&duv))?;
    let du_q = DiffResult::from_quotient(to_quotient(&du))?;
    let dv_q = DiffResult::from_quotient(to_quotient(&dv))?;
    let rhs = u0.standard_part()? * &dv_q.shadow + v0.standard_part()? * &du_q.shadow;
    report.check_eq(
        "st(d(uv)/dx) = st(u)·st(dv/dx) + st(v)·st(du/dx)",
        rational::format(&lhs.shadow),
        rational::format(&rhs),
    );

    let dropped = to_quotient(&(&du * &dv));
    report.push(
        "du·dv/dx is infinitesimal or zero",
        format!("{dropped} ({})", dropped.classify()),
        "zero or infinitesimal",
        finite_or_infinitesimal(&dropped),
    );

    if let Ok(oracle) = symbolic_derivative(&uv, var) {
        let expected = evaluate(&oracle, &bind(env, var, p.clone()))?.standard_part()?;
        report.check_eq(
            "shadow of d(uv)/dx equals the symbolic derivative of uv",
            rational::format(&lhs.shadow),
            rational::format(&expected),
        );
    }
    Ok(report)
}

/// The case `a·y = x·v`: checks `a·dy/dx = x·dv/dx + v + dv` exactly, that
/// `dv` is infinitesimal, and that dropping it leaves the assignable
/// identity `a·(d)y/(d)x = x·(d)v/(d)x + v`.
pub fn scaled_product_report(
    a: &Rational,
    v: &Expr,
    var: &str,
    point: &Rational,
    env: &Bindings,
) -> Result<GalleryReport, CalculusError> {
    let t = env.precision();
    let mut report = GalleryReport::new(ExampleId::ProductRule);
    report.parameter(format!("a={}", rational::format(a)));
    report.parameter(format!("v={v}"));
    report.parameter(format!("{var}={}", rational::format(point)));

    let p = LcNumber::real(point.clone(), t);
    let y = Expr::div(Expr::mul(Expr::var(var), v.clone()), Expr::constant(a.clone()));
    let qy = differential_quotient(&y, var, &p, env)?;
    let qv = differential_quotient(v, var, &p, env)?;
    let v0 = evaluate(v, &bind(env, var, p.clone()))?;
    let dv = differential(v, var, &p, env, Increment::Positive)?;
    let a_lc = LcNumber::real(a.clone(), t);

    let lhs = &a_lc * &qy;
    let rhs = &(&(&p * &qv) + &v0) + &dv;
    report.push("a·dy/dx = x·dv/dx + v + dv as series", lhs.to_string(), rhs.to_string(), lhs.agrees_with(&rhs));
    report.push(
        "dv is infinitesimal or zero",
        format!("{dv} ({})", dv.classify()),
        "zero or infinitesimal",
        finite_or_infinitesimal(&dv),
    );

    let shadow_lhs = a * DiffResult::from_quotient(qy)?.shadow;
    let shadow_rhs = point * DiffResult::from_quotient(qv)?.shadow + v0.standard_part()?;
    report.check_eq(
        "a·(d)y/(d)x = x·(d)v/(d)x + v after discarding dv",
        rational::format(&shadow_lhs),
        rational::format(&shadow_rhs),
    );

    let v_plus_dv = &v0 + &dv;
    if v0.is_zero() {
        report.check_eq("st(v + dv) = v where v vanishes", rational::format(&v_plus_dv.standard_part()?), "0");
    } else {
        report.check_eq("tlh(v + dv) = v", v_plus_dv.tlh_reduce(), &v0);
    }
    Ok(report)
}
