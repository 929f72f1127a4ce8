//! Expression language: lexing, parsing, evaluation over the series
//! continuum, rational-function canonical forms and identity transfer.

pub mod canon;
pub mod eval;
pub mod expr;
pub mod lexer;
pub mod parser;
pub mod poly;
pub mod transfer;

pub use canon::{canonicalize, CanonError, RationalForm};
pub use eval::{evaluate, Bindings, EvalError};
pub use expr::{Expr, Node};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_str};
pub use transfer::{identities_transfer_check, SampleOutcome, SampleResult, TransferReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("lex error at position {position}: {message}")]
    Lex { position: usize, message: String },
    #[error("parse error at position {position}: expected {expected}")]
    Parse { position: usize, expected: String },
}

impl SyntaxError {
    pub fn position(&self) -> usize {
        match self {
            SyntaxError::Lex { position, .. } | SyntaxError::Parse { position, .. } => *position,
        }
    }
}
