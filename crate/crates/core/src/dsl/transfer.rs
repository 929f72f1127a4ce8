//! Identity transfer from the rationals to the series continuum.
//!
//! Two rational expressions are compared three ways: by canonical form, at
//! random rational points, and at random points whose coordinates may be
//! infinitesimal or infinite. A canonical identity must agree at every
//! sample where both sides are defined.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::canon::{canonicalize, CanonError};
use super::eval::{evaluate, Bindings};
use super::expr::Expr;
use crate::lc::LcNumber;
use crate::rational::{self, Rational};

/// Draws allowed per sample before it is reported inconclusive.
pub const MAX_RESAMPLES: usize = 100;

const COUNTEREXAMPLE_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferOptions {
    pub trials: usize,
    pub seed: u64,
    pub precision: u32,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions { trials: 100, seed: 0, precision: crate::lc::DEFAULT_PRECISION }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleOutcome {
    Agree,
    Disagree,
    /// Every draw hit a vanishing denominator.
    Inconclusive,
}

pub type Point = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleResult {
    pub index: usize,
    pub point: Point,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub outcome: SampleOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferReport {
    pub identity: bool,
    pub finite_samples: Vec<SampleResult>,
    pub infinite_samples: Vec<SampleResult>,
    pub counterexample: Option<Point>,
    pub seed: u64,
}

impl TransferReport {
    fn samples(&self) -> impl Iterator<Item = &SampleResult> {
        self.finite_samples.iter().chain(&self.infinite_samples)
    }

    /// A canonical identity never disagrees at a sample.
    pub fn consistent(&self) -> bool {
        !self.identity || self.samples().all(|s| s.outcome != SampleOutcome::Disagree)
    }

    pub fn agreeing_infinite_samples(&self) -> usize {
        self.infinite_samples.iter().filter(|s| s.outcome == SampleOutcome::Agree).count()
    }

    /// The claimed identity holds and transfers.
    pub fn passed(&self) -> bool {
        self.identity && self.consistent()
    }
}

#[derive(Clone, Copy)]
enum Realm {
    Finite,
    Inassignable,
}

pub fn identities_transfer_check(
    lhs: &Expr,
    rhs: &Expr,
    options: &TransferOptions,
) -> Result<TransferReport, CanonError> {
    let mut names = lhs.free_variables();
    names.extend(rhs.free_variables());
    let names: Vec<String> = names.into_iter().collect();

    let left = canonicalize(lhs, &names)?;
    let right = canonicalize(rhs, &names)?;
    let identity = left == right;

    let run = |realm: Realm, stream_offset: u64| -> Vec<SampleResult> {
        (0..options.trials)
            .into_par_iter()
            .map(|index| {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                rng.set_stream(2 * index as u64 + stream_offset);
                sample(lhs, rhs, &names, realm, index, options.precision, &mut rng)
            })
            .collect()
    };
    let finite_samples = run(Realm::Finite, 0);
    let infinite_samples = run(Realm::Inassignable, 1);

    let counterexample = if identity {
        None
    } else {
        finite_samples
            .iter()
            .find(|s| s.outcome == SampleOutcome::Disagree)
            .map(|s| s.point.clone())
            .or_else(|| search_counterexample(lhs, rhs, &names, options))
    };

    Ok(TransferReport { identity, finite_samples, infinite_samples, counterexample, seed: options.seed })
}

fn sample(
    lhs: &Expr,
    rhs: &Expr,
    names: &[String],
    realm: Realm,
    index: usize,
    precision: u32,
    rng: &mut ChaCha8Rng,
) -> SampleResult {
    let mut last_point = Point::new();
    for _ in 0..=MAX_RESAMPLES {
        let values = match realm {
            Realm::Finite => names.iter().map(|_| finite_coordinate(rng, 12, precision)).collect(),
            Realm::Inassignable => inassignable_point(rng, names.len(), precision),
        };
        let env =
            names.iter().zip(&values).fold(Bindings::new(precision), |env, (n, v)| env.with(n.clone(), v.clone()));
        last_point = render_point(names, &values);
        let (Ok(a), Ok(b)) = (evaluate(lhs, &env), evaluate(rhs, &env)) else {
            continue;
        };
        let outcome = if a.agrees_with(&b) { SampleOutcome::Agree } else { SampleOutcome::Disagree };
        return SampleResult { index, point: last_point, lhs: Some(a.to_string()), rhs: Some(b.to_string()), outcome };
    }
    SampleResult { index, point: last_point, lhs: None, rhs: None, outcome: SampleOutcome::Inconclusive }
}

fn small_rational(rng: &mut impl Rng, bound: i64, nonzero: bool) -> Rational {
    loop {
        let n = rng.gen_range(-bound..=bound);
        if nonzero && n == 0 {
            continue;
        }
        let d = rng.gen_range(1..=6);
        return rational::ratio(n, d);
    }
}

fn finite_coordinate(rng: &mut impl Rng, bound: i64, precision: u32) -> LcNumber {
    LcNumber::real(small_rational(rng, bound, false), precision)
}

// Uniform over {q, q·eps, q·H, q + q'·eps}; at least one coordinate is
// infinitesimal or infinite.
fn inassignable_point(rng: &mut impl Rng, arity: usize, precision: u32) -> Vec<LcNumber> {
    let mut kinds: Vec<u8> = (0..arity).map(|_| rng.gen_range(0..4)).collect();
    if arity > 0 && kinds.iter().all(|&k| k == 0) {
        let i = rng.gen_range(0..arity);
        kinds[i] = rng.gen_range(1..4);
    }
    kinds
        .into_iter()
        .map(|kind| {
            let q = small_rational(rng, 9, true);
            match kind {
                0 => LcNumber::real(small_rational(rng, 9, false), precision),
                1 => LcNumber::monomial(q, rational::int(1), precision),
                2 => LcNumber::monomial(q, rational::int(-1), precision),
                _ => {
                    let q2 = small_rational(rng, 9, true);
                    &LcNumber::real(q, precision) + &LcNumber::monomial(q2, rational::int(1), precision)
                }
            }
        })
        .collect()
}

fn render_point(names: &[String], values: &[LcNumber]) -> Point {
    names.iter().cloned().zip(values.iter().map(LcNumber::to_string)).collect()
}

// Rational points with a widening range until the two sides differ.
fn search_counterexample(lhs: &Expr, rhs: &Expr, names: &[String], options: &TransferOptions) -> Option<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    rng.set_stream(u64::MAX);
    for attempt in 0..COUNTEREXAMPLE_ATTEMPTS {
        let bound = 2 + (attempt / 10) as i64;
        let values: Vec<LcNumber> =
            names.iter().map(|_| finite_coordinate(&mut rng, bound, options.precision)).collect();
        let env = names
            .iter()
            .zip(&values)
            .fold(Bindings::new(options.precision), |env, (n, v)| env.with(n.clone(), v.clone()));
        if let (Ok(a), Ok(b)) = (evaluate(lhs, &env), evaluate(rhs, &env)) {
            if !a.agrees_with(&b) {
                return Some(render_point(names, &values));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_str;

    fn check(lhs: &str, rhs: &str) -> TransferReport {
        let opts = TransferOptions { trials: 40, seed: 7, precision: 16 };
        identities_transfer_check(&parse_str(lhs).unwrap(), &parse_str(rhs).unwrap(), &opts).unwrap()
    }

    #[test]
    fn binomial_formula_transfers() {
        let r = check("(x+y)^2", "x^2 + 2*x*y + y^2");
        assert!(r.identity);
        assert!(r.passed());
        assert_eq!(r.agreeing_infinite_samples(), 40);
        assert!(r.infinite_samples.iter().any(|s| s.point.values().any(|v| v.contains("eps^-1"))));
        assert!(r.counterexample.is_none());
    }

    #[test]
    fn square_versus_product_at_h_plus_eps() {
        let x = parse_str("x").unwrap();
        let env = Bindings::new(16).with("x", &LcNumber::infinite_unit(16) + &LcNumber::eps(16));
        let sq = evaluate(&Expr::pow(x.clone(), 2), &env).unwrap();
        let prod = evaluate(&Expr::mul(x.clone(), x), &env).unwrap();
        assert_eq!(sq, prod);
        assert!(check("x^2", "x*x").passed());
    }

    #[test]
    fn non_identity_has_counterexample() {
        let r = check("(x+1)^2", "x^2 + 1");
        assert!(!r.identity);
        assert!(!r.passed());
        let point = r.counterexample.expect("counterexample");
        assert_ne!(point["x"], "0");
    }

    #[test]
    fn vanishing_denominators_are_resampled() {
        let r = check("(x^2 - 1)/(x - 1)", "x + 1");
        assert!(r.passed());
        let lhs = parse_str("1/(x - x)").unwrap();
        let err = identities_transfer_check(&lhs, &parse_str("1").unwrap(), &TransferOptions::default());
        assert!(matches!(err, Err(CanonError::DivisionByZero { .. })));
    }

    #[test]
    fn non_rational_nodes_rejected() {
        let e = parse_str("sqrt(x)").unwrap();
        let err = identities_transfer_check(&e, &e, &TransferOptions::default()).unwrap_err();
        assert!(matches!(err, CanonError::NonRationalNode { .. }));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let a = check("1/x - 1/(x+1)", "1/(x*(x+1))");
        let b = check("1/x - 1/(x+1)", "1/(x*(x+1))");
        assert_eq!(a, b);
        assert!(a.passed());
    }

    #[test]
    fn constant_identities() {
        let r = check("1/2 + 1/3", "5/6");
        assert!(r.passed());
        assert!(r.infinite_samples.iter().all(|s| s.point.is_empty()));
    }
}
