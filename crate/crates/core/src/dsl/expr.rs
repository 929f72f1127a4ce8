use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;

use crate::rational::{self, Rational};

/// Expression tree. `position` is the byte offset of the node in its source
/// and is ignored by equality, so parsed and hand-built trees compare
/// structurally.
#[derive(Debug, Clone)]
pub struct Expr {
    pub node: Node,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(Rational),
    Var(String),
    Eps,
    HUnit,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Sqrt(Box<Expr>),
    St(Box<Expr>),
    Neg(Box<Expr>),
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

pub const RESERVED: [&str; 4] = ["eps", "H", "sqrt", "st"];

pub fn is_valid_variable(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&name)
}

// Constructors named after the node they build.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn new(node: Node, position: usize) -> Self {
        Expr { node, position }
    }

    pub fn constant(q: Rational) -> Self {
        Expr::new(Node::Const(q), 0)
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(rational::int(n))
    }

    pub fn var(name: &str) -> Self {
        Expr::new(Node::Var(name.to_string()), 0)
    }

    pub fn eps() -> Self {
        Expr::new(Node::Eps, 0)
    }

    pub fn h() -> Self {
        Expr::new(Node::HUnit, 0)
    }

    pub fn add(l: Expr, r: Expr) -> Self {
        Expr::new(Node::Add(Box::new(l), Box::new(r)), 0)
    }

    pub fn sub(l: Expr, r: Expr) -> Self {
        Expr::new(Node::Sub(Box::new(l), Box::new(r)), 0)
    }

    pub fn mul(l: Expr, r: Expr) -> Self {
        Expr::new(Node::Mul(Box::new(l), Box::new(r)), 0)
    }

    pub fn div(l: Expr, r: Expr) -> Self {
        Expr::new(Node::Div(Box::new(l), Box::new(r)), 0)
    }

    pub fn pow(base: Expr, n: i64) -> Self {
        Expr::new(Node::Pow(Box::new(base), n), 0)
    }

    pub fn sqrt(arg: Expr) -> Self {
        Expr::new(Node::Sqrt(Box::new(arg)), 0)
    }

    pub fn st(arg: Expr) -> Self {
        Expr::new(Node::St(Box::new(arg)), 0)
    }

    pub fn neg(arg: Expr) -> Self {
        Expr::new(Node::Neg(Box::new(arg)), 0)
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match &self.node {
            Node::Var(name) => {
                out.insert(name.clone());
            }
            Node::Const(_) | Node::Eps | Node::HUnit => {}
            Node::Add(l, r) | Node::Sub(l, r) | Node::Mul(l, r) | Node::Div(l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
            Node::Pow(e, _) | Node::Sqrt(e) | Node::St(e) | Node::Neg(e) => e.collect_variables(out),
        }
    }

    /// True when no `sqrt` or `st` node occurs.
    pub fn is_rational(&self) -> bool {
        self.first_non_rational().is_none()
    }

    pub(crate) fn first_non_rational(&self) -> Option<&Expr> {
        match &self.node {
            Node::Sqrt(_) | Node::St(_) => Some(self),
            Node::Const(_) | Node::Var(_) | Node::Eps | Node::HUnit => None,
            Node::Add(l, r) | Node::Sub(l, r) | Node::Mul(l, r) | Node::Div(l, r) => {
                l.first_non_rational().or_else(|| r.first_non_rational())
            }
            Node::Pow(e, _) | Node::Neg(e) => e.first_non_rational(),
        }
    }

    /// Replaces every occurrence of variable `name` with `value`.
    pub fn substitute(&self, name: &str, value: &Expr) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute(name, value));
        let node = match &self.node {
            Node::Var(v) if v == name => return value.clone(),
            Node::Const(_) | Node::Var(_) | Node::Eps | Node::HUnit => self.node.clone(),
            Node::Add(l, r) => Node::Add(sub(l), sub(r)),
            Node::Sub(l, r) => Node::Sub(sub(l), sub(r)),
            Node::Mul(l, r) => Node::Mul(sub(l), sub(r)),
            Node::Div(l, r) => Node::Div(sub(l), sub(r)),
            Node::Pow(b, n) => Node::Pow(sub(b), *n),
            Node::Sqrt(e) => Node::Sqrt(sub(e)),
            Node::St(e) => Node::St(sub(e)),
            Node::Neg(e) => Node::Neg(sub(e)),
        };
        Expr::new(node, self.position)
    }

    /// Replaces every `H` (and `eps` by its reciprocal) with `value`, turning
    /// the infinite unit into an ordinary quantity.
    pub fn substitute_infinite_unit(&self, value: &Expr) -> Expr {
        let sub = |e: &Expr| Box::new(e.substitute_infinite_unit(value));
        let node = match &self.node {
            Node::HUnit => return value.clone(),
            Node::Eps => return Expr::new(Node::Div(Box::new(Expr::int(1)), Box::new(value.clone())), self.position),
            Node::Const(_) | Node::Var(_) => self.node.clone(),
            Node::Add(l, r) => Node::Add(sub(l), sub(r)),
            Node::Sub(l, r) => Node::Sub(sub(l), sub(r)),
            Node::Mul(l, r) => Node::Mul(sub(l), sub(r)),
            Node::Div(l, r) => Node::Div(sub(l), sub(r)),
            Node::Pow(b, n) => Node::Pow(sub(b), *n),
            Node::Sqrt(e) => Node::Sqrt(sub(e)),
            Node::St(e) => Node::St(sub(e)),
            Node::Neg(e) => Node::Neg(sub(e)),
        };
        Expr::new(node, self.position)
    }

    fn precedence(&self) -> u8 {
        match &self.node {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let wrap = self.precedence() < min_prec;
        if wrap {
            f.write_str("(")?;
        }
        match &self.node {
            Node::Const(q) => {
                if q.is_integer() && !q.is_negative() {
                    write!(f, "{q}")?;
                } else {
                    write!(f, "({})", rational::format(q))?;
                }
            }
            Node::Var(name) => f.write_str(name)?,
            Node::Eps => f.write_str("eps")?,
            Node::HUnit => f.write_str("H")?,
            Node::Add(l, r) => binary(f, l, " + ", r, 1)?,
            Node::Sub(l, r) => binary(f, l, " - ", r, 1)?,
            Node::Mul(l, r) => binary(f, l, "*", r, 2)?,
            Node::Div(l, r) if ends_in_integer(l) && ends_in_integer(r) && matches!(r.node, Node::Const(_)) => {
                // `6/4` would read back as the literal 3/2
                l.write_at(f, 2)?;
                f.write_str("/(")?;
                r.write_at(f, 0)?;
                f.write_str(")")?;
            }
            Node::Div(l, r) => binary(f, l, "/", r, 2)?,
            Node::Pow(b, n) => {
                b.write_at(f, 5)?;
                write!(f, "^{n}")?;
            }
            Node::Sqrt(e) => {
                f.write_str("sqrt(")?;
                e.write_at(f, 0)?;
                f.write_str(")")?;
            }
            Node::St(e) => {
                f.write_str("st(")?;
                e.write_at(f, 0)?;
                f.write_str(")")?;
            }
            Node::Neg(e) => {
                f.write_str("-")?;
                e.write_at(f, 3)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

// Whether `e`, printed as a left operand of `*` or `/`, ends with a bare
// integer literal.
fn ends_in_integer(e: &Expr) -> bool {
    match &e.node {
        Node::Const(q) => q.is_integer() && !q.is_negative(),
        Node::Mul(_, r) | Node::Div(_, r) | Node::Neg(r) => ends_in_integer(r),
        _ => false,
    }
}

// Left-associative: the right operand needs strictly higher precedence.
fn binary(f: &mut fmt::Formatter<'_>, l: &Expr, op: &str, r: &Expr, prec: u8) -> fmt::Result {
    l.write_at(f, prec)?;
    f.write_str(op)?;
    r.write_at(f, prec + 1)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}
