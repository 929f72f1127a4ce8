//! Canonical rational-function forms.
//!
//! A [`RationalForm`] is a reduced fraction of polynomials over an ordered
//! variable list. Variables are sorted alphabetically with `H` last, and
//! `H` is always present: `eps` canonicalizes to `1/H`. The pair is scaled so
//! all coefficients are integers with no common factor and the denominator's
//! leading coefficient is positive, so two rational expressions denote the
//! same function exactly when their forms are equal.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed};

use super::expr::{Expr, Node};
use super::poly::Poly;
use super::{parse_str, SyntaxError};
use crate::rational::Rational;

pub const INFINITE_UNIT: &str = "H";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("`{name}` at position {position} has no rational-function form")]
    NonRationalNode { name: &'static str, position: usize },
    #[error("variable `{name}` at position {position} was not declared")]
    UndeclaredVariable { name: String, position: usize },
    #[error("division by an identically zero expression at position {position}")]
    DivisionByZero { position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalForm {
    variables: Vec<String>,
    numerator: Poly,
    denominator: Poly,
}

/// Sorts names alphabetically, drops duplicates, and appends `H`.
pub fn canonical_variable_order<I, S>(names: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut vars: Vec<String> =
        names.into_iter().map(|s| s.as_ref().to_string()).filter(|s| s != INFINITE_UNIT).collect();
    vars.sort();
    vars.dedup();
    vars.push(INFINITE_UNIT.to_string());
    vars
}

pub fn canonicalize<I, S>(e: &Expr, variables: I) -> Result<RationalForm, CanonError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let vars = canonical_variable_order(variables);
    RationalForm::build(e, &vars)
}

impl RationalForm {
    fn from_poly(variables: &[String], p: Poly) -> Self {
        let n = variables.len();
        RationalForm { variables: variables.to_vec(), numerator: p, denominator: Poly::one(n) }.normalized()
    }

    /// Reduces by the polynomial GCD and fixes the scalar normalization.
    fn normalized(self) -> Self {
        let RationalForm { variables, numerator, denominator } = self;
        let n = variables.len();
        if numerator.is_zero() {
            return RationalForm { variables, numerator, denominator: Poly::one(n) };
        }
        let g = numerator.gcd(&denominator);
        let mut num = numerator.div_exact(&g).expect("gcd divides numerator");
        let mut den = denominator.div_exact(&g).expect("gcd divides denominator");
        let (l1, g1) = num.denominator_lcm_and_numerator_gcd();
        let (l2, g2) = den.denominator_lcm_and_numerator_gcd();
        // the joint scale clears denominators, then removes common content
        let lcm = l1.lcm(&l2);
        let content_gcd = (g1 * &lcm / &l1).gcd(&(g2 * &lcm / &l2));
        let mut factor = Rational::new(lcm, content_gcd);
        if den.leading_coefficient().expect("nonzero").is_negative() {
            factor = -factor;
        }
        num = num.scale(&factor);
        den = den.scale(&factor);
        RationalForm { variables, numerator: num, denominator: den }
    }

    fn build(e: &Expr, vars: &[String]) -> Result<Self, CanonError> {
        let n = vars.len();
        let h_index = n - 1;
        Ok(match &e.node {
            Node::Const(q) => Self::from_poly(vars, Poly::constant(n, q.clone())),
            Node::Var(name) => {
                let index = vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| CanonError::UndeclaredVariable { name: name.clone(), position: e.position })?;
                Self::from_poly(vars, Poly::var(n, index))
            }
            Node::HUnit => Self::from_poly(vars, Poly::var(n, h_index)),
            Node::Eps => {
                RationalForm { variables: vars.to_vec(), numerator: Poly::one(n), denominator: Poly::var(n, h_index) }
            }
            Node::Add(l, r) => Self::build(l, vars)?.add(&Self::build(r, vars)?),
            Node::Sub(l, r) => Self::build(l, vars)?.add(&Self::build(r, vars)?.neg()),
            Node::Mul(l, r) => Self::build(l, vars)?.mul(&Self::build(r, vars)?),
            Node::Div(l, r) => {
                let den = Self::build(r, vars)?;
                let inv = den.inverse().ok_or(CanonError::DivisionByZero { position: e.position })?;
                Self::build(l, vars)?.mul(&inv)
            }
            Node::Pow(b, k) => {
                let base = Self::build(b, vars)?;
                let base = if *k < 0 {
                    base.inverse().ok_or(CanonError::DivisionByZero { position: e.position })?
                } else {
                    base
                };
                let k = k.unsigned_abs() as u32;
                RationalForm {
                    variables: vars.to_vec(),
                    numerator: base.numerator.pow(k),
                    denominator: base.denominator.pow(k),
                }
                .normalized()
            }
            Node::Neg(a) => Self::build(a, vars)?.neg(),
            Node::Sqrt(_) => return Err(CanonError::NonRationalNode { name: "sqrt", position: e.position }),
            Node::St(_) => return Err(CanonError::NonRationalNode { name: "st", position: e.position }),
        })
    }

    /// Wraps a polynomial whose variables follow `variables` (already in
    /// canonical order).
    pub fn from_polynomial(variables: Vec<String>, p: Poly) -> Self {
        assert_eq!(variables.len(), p.nvars());
        Self::from_poly(&variables, p)
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// The form as a polynomial, when its denominator is constant.
    pub fn as_polynomial(&self) -> Option<Poly> {
        let d = self.denominator.constant_value()?;
        Some(self.numerator.scale(&d.recip()))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same_variables(other);
        RationalForm {
            variables: self.variables.clone(),
            numerator: &(&self.numerator * &other.denominator) + &(&other.numerator * &self.denominator),
            denominator: &self.denominator * &other.denominator,
        }
        .normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalForm {
            variables: self.variables.clone(),
            numerator: -&self.numerator,
            denominator: self.denominator.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same_variables(other);
        RationalForm {
            variables: self.variables.clone(),
            numerator: &self.numerator * &other.numerator,
            denominator: &self.denominator * &other.denominator,
        }
        .normalized()
    }

    /// `None` for the zero function.
    pub fn inverse(&self) -> Option<Self> {
        if self.numerator.is_zero() {
            return None;
        }
        Some(
            RationalForm {
                variables: self.variables.clone(),
                numerator: self.denominator.clone(),
                denominator: self.numerator.clone(),
            }
            .normalized(),
        )
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        Some(self.mul(&other.inverse()?))
    }

    fn check_same_variables(&self, other: &Self) {
        assert_eq!(self.variables, other.variables, "rational forms over different variables");
    }

    /// Back to an expression tree; evaluating it gives the same function.
    pub fn to_expr(&self) -> Result<Expr, SyntaxError> {
        parse_str(&self.to_string())
    }
}

impl fmt::Display for RationalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.numerator.display(&self.variables);
        if self.denominator.constant_value().is_some_and(|d| d.is_one()) {
            return f.write_str(&num);
        }
        write!(f, "({num})/({})", self.denominator.display(&self.variables))
    }
}

// Integer-coefficient check used by the tests below.
#[cfg(test)]
fn has_integer_coefficients(p: &Poly) -> bool {
    p.terms().all(|(_, c)| c.is_integer())
}

#[cfg(test)]
fn content(p: &Poly) -> num_bigint::BigInt {
    p.terms().fold(<num_bigint::BigInt as num_traits::Zero>::zero(), |g, (_, c)| g.gcd(c.numer()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_str;
    use crate::rational::int;
    use num_bigint::BigInt;

    fn canon(src: &str, vars: &[&str]) -> RationalForm {
        canonicalize(&parse_str(src).unwrap(), vars.iter().copied()).unwrap()
    }

    #[test]
    fn variable_order_puts_h_last() {
        assert_eq!(canonical_variable_order(["y", "H", "x", "y"]), vec!["x", "y", "H"]);
        assert_eq!(canonical_variable_order(Vec::<String>::new()), vec!["H"]);
    }

    #[test]
    fn binomial_identity_is_zero() {
        let f = canon("(x+1)^2 - (x^2 + 2*x + 1)", &["x"]);
        assert!(f.is_zero());
        assert_eq!(f.denominator(), &Poly::one(2));
    }

    #[test]
    fn h_times_reciprocal_is_one() {
        let f = canon("H*(1/H)", &[]);
        assert_eq!(f.numerator(), &Poly::one(1));
        assert_eq!(f.denominator(), &Poly::one(1));
        assert_eq!(canon("eps*H", &[]), f);
    }

    #[test]
    fn equal_functions_have_equal_forms() {
        let a = canon("1/x - 1/(x+1)", &["x"]);
        let b = canon("1/(x*(x+1))", &["x"]);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(1)/(x^2 + x)");
        let c = canon("(x^2 - y^2)/(x - y)", &["x", "y"]);
        assert_eq!(c, canon("x + y", &["x", "y"]));
    }

    #[test]
    fn scalar_normalization() {
        let f = canon("(x/2 + 1/3)/(-x/4)", &["x"]);
        // (x/2 + 1/3)/(-x/4) = (-6x - 4)/(3x)
        assert_eq!(f.to_string(), "(-6*x - 4)/(3*x)");
        assert!(has_integer_coefficients(f.numerator()));
        assert!(has_integer_coefficients(f.denominator()));
        assert_eq!(content(f.numerator()).gcd(&content(f.denominator())), BigInt::one());
        assert!(f.denominator().leading_coefficient().unwrap().is_positive());
    }

    #[test]
    fn errors() {
        let e = parse_str("sqrt(x) + 1").unwrap();
        assert_eq!(canonicalize(&e, ["x"]), Err(CanonError::NonRationalNode { name: "sqrt", position: 0 }));
        let e = parse_str("1 + st(x)").unwrap();
        assert!(matches!(canonicalize(&e, ["x"]), Err(CanonError::NonRationalNode { name: "st", .. })));
        let e = parse_str("1/(x - x)").unwrap();
        assert_eq!(canonicalize(&e, ["x"]), Err(CanonError::DivisionByZero { position: 1 }));
        let e = parse_str("x + y").unwrap();
        assert!(matches!(canonicalize(&e, ["x"]), Err(CanonError::UndeclaredVariable { .. })));
    }

    #[test]
    fn round_trip_through_expression() {
        let f = canon("(x + 2/3)^2/(y - H)", &["x", "y"]);
        let again = canonicalize(&f.to_expr().unwrap(), ["x", "y"]).unwrap();
        assert_eq!(f, again);
        assert_eq!(canon("7", &[]).as_polynomial().unwrap().constant_value(), Some(int(7)));
    }
}
