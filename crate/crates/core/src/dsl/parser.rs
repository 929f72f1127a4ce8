//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" "-"? int)?
//! atom   := rational | ident | "eps" | "H" | "sqrt" "(" expr ")"
//!         | "st" "(" expr ")" | "(" expr ")"
//! rational := number ("/" posint)?     -- not folded when followed by "^"
//! ```

use num_traits::Zero;

use super::expr::{Expr, Node};
use super::lexer::{tokenize, Token, TokenKind};
use super::SyntaxError;
use crate::rational::{self, Rational};

pub fn parse(tokens: &[Token<'_>]) -> Result<Expr, SyntaxError> {
    let end = tokens.last().map_or(0, |t| t.position + t.text.len());
    let mut p = Parser { tokens, index: 0, end };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(p.error_at(t.position, "operator or end of input"));
    }
    Ok(e)
}

/// Tokenizes and parses in one step.
pub fn parse_str(source: &str) -> Result<Expr, SyntaxError> {
    parse(&tokenize(source)?)
}

struct Parser<'t, 's> {
    tokens: &'t [Token<'s>],
    index: usize,
    end: usize,
}

impl<'t, 's> Parser<'t, 's> {
    fn peek(&self) -> Option<Token<'s>> {
        self.tokens.get(self.index).copied()
    }

    fn peek_kind(&self, offset: usize) -> Option<TokenKind> {
        self.tokens.get(self.index + offset).map(|t| t.kind)
    }

    fn bump(&mut self) -> Option<Token<'s>> {
        let t = self.peek();
        if t.is_some() {
            self.index += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn error_at(&self, position: usize, expected: &str) -> SyntaxError {
        SyntaxError::Parse { position, expected: expected.to_string() }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token<'s>, SyntaxError> {
        match self.peek() {
            Some(t) if t.kind == kind => {
                self.index += 1;
                Ok(t)
            }
            _ => Err(self.error_at(self.here(), &kind.to_string())),
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        while let Some(t) = self.peek() {
            let build: fn(Box<Expr>, Box<Expr>) -> Node = match t.kind {
                TokenKind::Plus => Node::Add,
                TokenKind::Minus => Node::Sub,
                _ => break,
            };
            self.index += 1;
            let rhs = self.term()?;
            lhs = Expr::new(build(Box::new(lhs), Box::new(rhs)), t.position);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        while let Some(t) = self.peek() {
            let build: fn(Box<Expr>, Box<Expr>) -> Node = match t.kind {
                TokenKind::Star => Node::Mul,
                TokenKind::Slash => Node::Div,
                _ => break,
            };
            self.index += 1;
            let rhs = self.unary()?;
            lhs = Expr::new(build(Box::new(lhs), Box::new(rhs)), t.position);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if let Some(t) = self.peek() {
            if t.kind == TokenKind::Minus {
                self.index += 1;
                let arg = self.unary()?;
                return Ok(Expr::new(Node::Neg(Box::new(arg)), t.position));
            }
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        let Some(caret) = self.peek().filter(|t| t.kind == TokenKind::Caret) else {
            return Ok(base);
        };
        self.index += 1;
        let negative = self.peek_kind(0) == Some(TokenKind::Minus);
        if negative {
            self.index += 1;
        }
        let position = self.here();
        let exponent = match self.peek() {
            Some(t) if t.kind == TokenKind::Number && !t.text.contains('.') => {
                self.index += 1;
                t.text.parse::<i64>().map_err(|_| self.error_at(position, "integer exponent that fits in 64 bits"))?
            }
            _ => return Err(self.error_at(position, "integer exponent")),
        };
        let exponent = if negative { -exponent } else { exponent };
        Ok(Expr::new(Node::Pow(Box::new(base), exponent), caret.position))
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let position = self.here();
        let Some(t) = self.bump() else {
            return Err(self.error_at(position, "expression"));
        };
        match t.kind {
            TokenKind::Number => {
                let mut value = number_value(t.text).ok_or_else(|| self.error_at(t.position, "number"))?;
                let folds = self.peek_kind(0) == Some(TokenKind::Slash)
                    && self.peek_kind(1) == Some(TokenKind::Number)
                    && self.peek_kind(2) != Some(TokenKind::Caret);
                if folds && !t.text.contains('.') && !self.tokens[self.index + 1].text.contains('.') {
                    let denom = number_value(self.tokens[self.index + 1].text).expect("lexer produced digits");
                    // `p/0` stays a division and fails when evaluated
                    if !denom.is_zero() {
                        self.index += 2;
                        value /= denom;
                    }
                }
                Ok(Expr::new(Node::Const(value), t.position))
            }
            TokenKind::Identifier => match t.text {
                "eps" => Ok(Expr::new(Node::Eps, t.position)),
                "H" => Ok(Expr::new(Node::HUnit, t.position)),
                "sqrt" | "st" => {
                    self.expect(TokenKind::LParen)?;
                    let arg = Box::new(self.expr()?);
                    self.expect(TokenKind::RParen)?;
                    let node = if t.text == "sqrt" { Node::Sqrt(arg) } else { Node::St(arg) };
                    Ok(Expr::new(node, t.position))
                }
                name => Ok(Expr::new(Node::Var(name.to_string()), t.position)),
            },
            TokenKind::LParen => {
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            _ => Err(self.error_at(t.position, "number, identifier or `(`")),
        }
    }
}

fn number_value(text: &str) -> Option<Rational> {
    rational::parse(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p(src: &str) -> Expr {
        parse_str(src).unwrap_or_else(|e| panic!("{src}: {e}"))
    }

    #[test]
    fn variable_increment() {
        assert_eq!(p("a + dx"), Expr::add(Expr::var("a"), Expr::var("dx")));
    }

    #[test]
    fn radical_of_sum_of_squares() {
        let want = Expr::sqrt(Expr::add(Expr::pow(Expr::var("x"), 2), Expr::pow(Expr::var("y"), 2)));
        assert_eq!(p("sqrt(x^2 + y^2)"), want);
    }

    #[test]
    fn non_integer_exponent_rejected() {
        let err = parse_str("x ^ y").unwrap_err();
        assert_eq!(err.position(), 4);
        assert!(matches!(err, SyntaxError::Parse { .. }));
        assert!(parse_str("x^1.5").is_err());
    }

    #[test]
    fn precedence() {
        // unary minus applies after ^
        assert_eq!(p("-x^2"), Expr::neg(Expr::pow(Expr::var("x"), 2)));
        assert_eq!(p("(-x)^2"), Expr::pow(Expr::neg(Expr::var("x")), 2));
        assert_eq!(p("a - b - c"), Expr::sub(Expr::sub(Expr::var("a"), Expr::var("b")), Expr::var("c")));
        assert_eq!(p("a / b * c"), Expr::mul(Expr::div(Expr::var("a"), Expr::var("b")), Expr::var("c")));
        assert_eq!(p("1 + 2*x"), Expr::add(Expr::int(1), Expr::mul(Expr::int(2), Expr::var("x"))));
        assert_eq!(p("x^-2"), Expr::pow(Expr::var("x"), -2));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(p("3/4"), Expr::constant(ratio(3, 4)));
        assert_eq!(p("2.5"), Expr::constant(ratio(5, 2)));
        assert_eq!(p("2/H"), Expr::div(Expr::int(2), Expr::h()));
        // a power binds to the denominator, not to the whole literal
        assert_eq!(p("2/3^2"), Expr::div(Expr::int(2), Expr::pow(Expr::int(3), 2)));
        assert_eq!(p("1/0"), Expr::div(Expr::int(1), Expr::int(0)));
    }

    #[test]
    fn reserved_words() {
        assert_eq!(p("eps*H"), Expr::mul(Expr::eps(), Expr::h()));
        assert_eq!(p("st(1 - x/H)"), Expr::st(Expr::sub(Expr::int(1), Expr::div(Expr::var("x"), Expr::h()))));
        assert!(parse_str("sqrt + 1").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_str("(1 + 2").unwrap_err();
        assert_eq!(err.position(), 6);
        let err = parse_str("1 + * 2").unwrap_err();
        assert_eq!(err.position(), 4);
        assert_eq!(parse_str("").unwrap_err().position(), 0);
        assert_eq!(parse_str("f(x)").unwrap_err().position(), 1);
        assert_eq!(parse_str("1, 2").unwrap_err().position(), 1);
    }

    #[test]
    fn positions_recorded() {
        let e = p("x + y*z");
        assert_eq!(e.position, 2);
        let Node::Add(_, r) = &e.node else { panic!() };
        assert_eq!(r.position, 5);
    }
}
