use std::collections::BTreeMap;

use super::expr::{Expr, Node};
use crate::lc::{LcError, LcNumber, DEFAULT_PRECISION};

/// Variable values plus the truncation order used for constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Bindings {
    values: BTreeMap<String, LcNumber>,
    precision: u32,
}

impl Default for Bindings {
    fn default() -> Self {
        Bindings::new(DEFAULT_PRECISION)
    }
}

impl Bindings {
    pub fn new(precision: u32) -> Self {
        Bindings { values: BTreeMap::new(), precision }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn insert(&mut self, name: impl Into<String>, value: LcNumber) -> Option<LcNumber> {
        self.values.insert(name.into(), value)
    }

    pub fn with(mut self, name: impl Into<String>, value: LcNumber) -> Self {
        self.insert(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&LcNumber> {
        self.values.get(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<LcNumber> {
        self.values.remove(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &LcNumber)> {
        self.values.iter()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{source} at position {position}")]
    Arithmetic { source: LcError, position: usize },
    #[error("unbound variable `{name}` at position {position}")]
    UnboundVariable { name: String, position: usize },
}

impl EvalError {
    pub fn position(&self) -> usize {
        match self {
            EvalError::Arithmetic { position, .. } | EvalError::UnboundVariable { position, .. } => *position,
        }
    }

    pub fn arithmetic(&self) -> Option<&LcError> {
        match self {
            EvalError::Arithmetic { source, .. } => Some(source),
            EvalError::UnboundVariable { .. } => None,
        }
    }
}

/// Maps every node onto the corresponding series operation. `st` takes the
/// shadow and re-embeds it as a real.
pub fn evaluate(e: &Expr, env: &Bindings) -> Result<LcNumber, EvalError> {
    let at = |source: LcError| EvalError::Arithmetic { source, position: e.position };
    let t = env.precision;
    Ok(match &e.node {
        Node::Const(q) => LcNumber::real(q.clone(), t),
        Node::Var(name) => env
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::UnboundVariable { name: name.clone(), position: e.position })?,
        Node::Eps => LcNumber::eps(t),
        Node::HUnit => LcNumber::infinite_unit(t),
        Node::Add(l, r) => &evaluate(l, env)? + &evaluate(r, env)?,
        Node::Sub(l, r) => &evaluate(l, env)? - &evaluate(r, env)?,
        Node::Mul(l, r) => &evaluate(l, env)? * &evaluate(r, env)?,
        Node::Div(l, r) => {
            let num = evaluate(l, env)?;
            let den = evaluate(r, env)?;
            num.div(&den).map_err(at)?
        }
        Node::Pow(b, n) => evaluate(b, env)?.powi(*n).map_err(at)?,
        Node::Sqrt(a) => evaluate(a, env)?.sqrt().map_err(at)?,
        Node::St(a) => LcNumber::real(evaluate(a, env)?.standard_part().map_err(at)?, t),
        Node::Neg(a) => -evaluate(a, env)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_str;
    use crate::rational::int;

    const T: u32 = DEFAULT_PRECISION;

    fn eval(src: &str, env: &Bindings) -> Result<LcNumber, EvalError> {
        evaluate(&parse_str(src).unwrap(), env)
    }

    #[test]
    fn oblique_line_at_infinite_h() {
        let env = Bindings::new(T).with("x", LcNumber::real(int(4), T));
        let y = eval("1 - x/H", &env).unwrap();
        assert_eq!(y, LcNumber::from_terms([(int(0), int(1)), (int(1), int(-4))], T));
        assert!(y.is_exact());
        assert_eq!(eval("st(1 - x/H)", &env).unwrap(), LcNumber::real(int(1), T));
    }

    #[test]
    fn division_by_vanishing_expression() {
        let env = Bindings::new(T).with("x", LcNumber::real(int(7), T));
        let err = eval("1/(x-x)", &env).unwrap_err();
        assert_eq!(err, EvalError::Arithmetic { source: LcError::DivisionByZero, position: 1 });
    }

    #[test]
    fn errors_point_at_offending_node() {
        let env = Bindings::new(T);
        let err = eval("1 + st(H)", &env).unwrap_err();
        assert_eq!(err.arithmetic(), Some(&LcError::InfiniteOperand));
        assert_eq!(err.position(), 4);
        let err = eval("2*sqrt(-4)", &env).unwrap_err();
        assert_eq!(err.arithmetic(), Some(&LcError::NegativeLeadingCoefficient));
        assert_eq!(err.position(), 2);
        let err = eval("y + 1", &env).unwrap_err();
        assert_eq!(err, EvalError::UnboundVariable { name: "y".into(), position: 0 });
    }

    #[test]
    fn eps_times_h_is_one() {
        assert_eq!(eval("eps*H", &Bindings::new(T)).unwrap(), LcNumber::one(T));
    }
}
