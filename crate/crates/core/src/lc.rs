//! Truncated non-Archimedean series over the canonical infinitesimal `eps`.
//!
//! An [`LcNumber`] is a finite sum `Σ qᵢ·eps^rᵢ` with exact rational
//! coefficients and rational exponents. `H = eps⁻¹` is the canonical infinite
//! unit. Arithmetic keeps a window of `precision` exponent units above the
//! leading exponent; anything past the window is dropped.
//!
//! Each value also carries a *horizon*: every coefficient below the horizon is
//! exact, nothing at or beyond it is stored. A value whose support was never
//! truncated has no horizon and is exact in full, which is what makes the
//! polynomial identities in this crate literal equalities.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

/// Relative truncation order used when none is given.
pub const DEFAULT_PRECISION: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LcError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a number with negative leading coefficient")]
    NegativeLeadingCoefficient,
    #[error("leading coefficient {} has no rational square root", rational::format(.0))]
    IrrationalSquareRoot(Rational),
    #[error("standard part of an infinite number")]
    InfiniteOperand,
    #[error("coefficient of eps^{} lies beyond the exact part of the series", rational::format(.0))]
    PrecisionExhausted(Rational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Zero,
    Infinitesimal,
    Appreciable,
    Infinite,
}

impl Classification {
    pub fn is_finite(self) -> bool {
        self != Classification::Infinite
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Zero => "zero",
            Classification::Infinitesimal => "infinitesimal",
            Classification::Appreciable => "appreciable",
            Classification::Infinite => "infinite",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

type Terms = BTreeMap<Rational, Rational>;

/// Element of the truncated Levi-Civita-style continuum.
///
/// Equality compares the stored terms and the horizon; it ignores the
/// precision setting. Use [`LcNumber::agrees_with`] to compare values up to
/// what both sides know exactly.
#[derive(Debug, Clone)]
pub struct LcNumber {
    terms: Terms,
    precision: u32,
    horizon: Option<Rational>,
}

impl PartialEq for LcNumber {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.horizon == other.horizon
    }
}

impl Eq for LcNumber {}

fn min_opt(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn add_opt(a: Option<&Rational>, b: Option<&Rational>) -> Option<Rational> {
    Some(a? + b?)
}

impl LcNumber {
    fn from_parts(terms: Terms, precision: u32, horizon: Option<Rational>) -> Self {
        assert!(precision > 0, "precision must be positive");
        let mut terms: Terms = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if let Some(h) = &horizon {
            terms.retain(|e, _| e < h);
        }
        let mut horizon = horizon;
        if let Some(lead) = terms.keys().next().cloned() {
            let cutoff = lead + rational::int(precision as i64);
            let dropped = terms.split_off(&cutoff);
            if !dropped.is_empty() {
                horizon = min_opt(horizon, Some(cutoff));
            }
        }
        LcNumber { terms, precision, horizon }
    }

    pub fn zero(precision: u32) -> Self {
        Self::from_parts(Terms::new(), precision, None)
    }

    pub fn one(precision: u32) -> Self {
        Self::real(Rational::one(), precision)
    }

    /// Embeds an assignable quantity as `q·eps⁰`.
    pub fn real(q: Rational, precision: u32) -> Self {
        Self::monomial(q, Rational::zero(), precision)
    }

    /// `coef·eps^exp`.
    pub fn monomial(coef: Rational, exp: Rational, precision: u32) -> Self {
        let mut terms = Terms::new();
        terms.insert(exp, coef);
        Self::from_parts(terms, precision, None)
    }

    /// The canonical positive infinitesimal.
    pub fn eps(precision: u32) -> Self {
        Self::monomial(Rational::one(), Rational::one(), precision)
    }

    /// The canonical infinite unit `H = eps⁻¹`.
    pub fn infinite_unit(precision: u32) -> Self {
        Self::monomial(Rational::one(), -Rational::one(), precision)
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated
    /// exponents are summed.
    pub fn from_terms<I>(terms: I, precision: u32) -> Self
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut map = Terms::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        Self::from_parts(map, precision, None)
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        Self::from_parts(self.terms.clone(), precision, self.horizon.clone())
    }

    /// Exponent below which every coefficient is known exactly, or `None`
    /// when the series is exact in full.
    pub fn horizon(&self) -> Option<&Rational> {
        self.horizon.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.horizon.is_none()
    }

    /// True when no term is stored. An inexact zero is only known to vanish
    /// below its horizon.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rational, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for zero, whose leading exponent is +∞ by convention.
    pub fn leading_exponent(&self) -> Option<&Rational> {
        self.terms.keys().next()
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.values().next()
    }

    /// Coefficient of `eps^exp`, or `None` if it lies past the horizon.
    pub fn coefficient(&self, exp: &Rational) -> Option<Rational> {
        if self.horizon.as_ref().is_some_and(|h| exp >= h) {
            return None;
        }
        Some(self.terms.get(exp).cloned().unwrap_or_else(Rational::zero))
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            *terms.entry(e.clone()).or_insert_with(Rational::zero) += c;
        }
        let horizon = min_opt(self.horizon.clone(), other.horizon.clone());
        Self::from_parts(terms, self.precision.min(other.precision), horizon)
    }

    fn neg_ref(&self) -> Self {
        LcNumber {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            precision: self.precision,
            horizon: self.horizon.clone(),
        }
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    /// Truncated Cauchy product.
    fn mul_ref(&self, other: &Self) -> Self {
        let precision = self.precision.min(other.precision);
        // (A + O(ha))(B + O(hb)) = AB + O(min(lead A + hb, lead B + ha, ha + hb))
        let horizon = [
            add_opt(self.leading_exponent(), other.horizon.as_ref()),
            add_opt(other.leading_exponent(), self.horizon.as_ref()),
            add_opt(self.horizon.as_ref(), other.horizon.as_ref()),
        ]
        .into_iter()
        .fold(None, min_opt);
        let mut terms = Terms::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *terms.entry(ea + eb).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        Self::from_parts(terms, precision, horizon)
    }

    /// Multiplies by `eps^shift` exactly.
    pub fn shift(&self, shift: &Rational) -> Self {
        LcNumber {
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
            precision: self.precision,
            horizon: self.horizon.as_ref().map(|h| h + shift),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.precision);
        }
        LcNumber {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect(),
            precision: self.precision,
            horizon: self.horizon.clone(),
        }
    }

    // Splits a nonzero value as c·eps^e·(1 + u) with every exponent of u
    // positive. Returns (c, e, u) with u as a plain term map.
    fn factor_leading(&self) -> (Rational, Rational, Terms) {
        let (e, c) = self.terms.iter().next().expect("nonzero");
        let unit = self.terms.iter().skip(1).map(|(ei, ci)| (ei - e, ci / c)).collect();
        (c.clone(), e.clone(), unit)
    }

    // Σ coeffs[k]·u^k over the window [0, T), where u has positive exponents.
    // Returns the sum and whether any nonzero contribution was cut off.
    fn unit_series(u: &Terms, precision: u32, coeff: impl Fn(usize) -> Rational) -> (Terms, bool) {
        let cutoff = rational::int(precision as i64);
        let mut sum = Terms::new();
        sum.insert(Rational::zero(), coeff(0));
        if u.is_empty() {
            return (sum, false);
        }
        let mut power: Terms = Terms::new();
        power.insert(Rational::zero(), Rational::one());
        let mut k = 0;
        loop {
            k += 1;
            let mut next = Terms::new();
            for (ep, cp) in &power {
                for (eu, cu) in u {
                    let e = ep + eu;
                    if e >= cutoff {
                        break;
                    }
                    *next.entry(e).or_insert_with(Rational::zero) += cp * cu;
                }
            }
            next.retain(|_, c| !c.is_zero());
            if next.is_empty() {
                // u^k starts at or past the window, so the tail is infinite
                // but unrepresented.
                return (sum, true);
            }
            power = next;
            let a = coeff(k);
            if !a.is_zero() {
                for (e, c) in &power {
                    *sum.entry(e.clone()).or_insert_with(Rational::zero) += &a * c;
                }
            }
        }
    }

    /// Multiplicative inverse: factor out the leading monomial and expand the
    /// geometric series of the unit part to the relative window.
    pub fn inverse(&self) -> Result<Self, LcError> {
        if self.is_zero() {
            return Err(LcError::DivisionByZero);
        }
        let (c, e, u) = self.factor_leading();
        let neg_u: Terms = u.iter().map(|(k, v)| (k.clone(), -v)).collect();
        let (series, truncated) = Self::unit_series(&neg_u, self.precision, |_| Rational::one());
        let mut horizon = self.horizon.as_ref().map(|h| h - &e - &e);
        if truncated {
            horizon = min_opt(horizon, Some(-&e + rational::int(self.precision as i64)));
        }
        let inv_c = c.recip();
        let terms = series.into_iter().map(|(k, v)| (k - &e, v * &inv_c)).collect();
        Ok(Self::from_parts(terms, self.precision, horizon))
    }

    pub fn div(&self, other: &Self) -> Result<Self, LcError> {
        Ok(self.mul_ref(&other.inverse()?))
    }

    /// Square root via the leading monomial and the binomial series of
    /// `sqrt(1 + u)`. The leading coefficient must be a rational square.
    pub fn sqrt(&self) -> Result<Self, LcError> {
        if self.is_zero() {
            return Ok(LcNumber {
                terms: Terms::new(),
                precision: self.precision,
                horizon: self.horizon.as_ref().map(|h| h / rational::int(2)),
            });
        }
        let (c, e, u) = self.factor_leading();
        if c.is_negative() {
            return Err(LcError::NegativeLeadingCoefficient);
        }
        let root_c = rational::sqrt_exact(&c).ok_or_else(|| LcError::IrrationalSquareRoot(c.clone()))?;
        let half_e = &e / rational::int(2);
        let (series, truncated) = Self::unit_series(&u, self.precision, rational::half_binomial);
        let mut horizon = self.horizon.as_ref().map(|h| h - &half_e);
        if truncated && !squares_to_unit(&series, &u) {
            horizon = min_opt(horizon, Some(&half_e + rational::int(self.precision as i64)));
        }
        let terms = series.into_iter().map(|(k, v)| (k + &half_e, v * &root_c)).collect();
        Ok(Self::from_parts(terms, self.precision, horizon))
    }

    /// Integer power; negative exponents invert.
    pub fn powi(&self, n: i64) -> Result<Self, LcError> {
        if n < 0 {
            return self.powi(-n)?.inverse();
        }
        let mut result = Self::one(self.precision);
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_ref(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_ref(&base);
            }
        }
        Ok(result)
    }

    /// Sign of the leading coefficient: -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self.leading_coefficient() {
            None => 0,
            Some(c) if c.is_positive() => 1,
            Some(_) => -1,
        }
    }

    /// Total order: the sign of `self - other` is the sign of its leading
    /// coefficient. A difference that is an inexact zero compares equal.
    pub fn compare(&self, other: &Self) -> Ordering {
        self.sub(other).signum().cmp(&0)
    }

    pub fn classify(&self) -> Classification {
        match self.leading_exponent() {
            None => Classification::Zero,
            Some(e) if e.is_positive() => Classification::Infinitesimal,
            Some(e) if e.is_zero() => Classification::Appreciable,
            Some(_) => Classification::Infinite,
        }
    }

    /// Shadow of a finite number: its `eps⁰` coefficient.
    pub fn standard_part(&self) -> Result<Rational, LcError> {
        if self.classify() == Classification::Infinite {
            return Err(LcError::InfiniteOperand);
        }
        self.coefficient(&Rational::zero()).ok_or_else(|| LcError::PrecisionExhausted(Rational::zero()))
    }

    /// `self - other` is zero or infinitesimal. An inexact zero difference
    /// counts only when its unknown tail is itself infinitesimal.
    pub fn is_infinitely_close(&self, other: &Self) -> bool {
        let diff = self.sub(other);
        match diff.classify() {
            Classification::Infinitesimal => true,
            Classification::Zero => diff.horizon.as_ref().is_none_or(|h| h.is_positive()),
            _ => false,
        }
    }

    /// Keeps only the leading-exponent stratum: `a + dx = a`.
    pub fn tlh_reduce(&self) -> Self {
        match self.terms.iter().next() {
            None => self.clone(),
            Some((e, c)) => Self::monomial(c.clone(), e.clone(), self.precision),
        }
    }

    /// Equal on every exponent below both horizons. Two exact values agree
    /// only when they are identical.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let limit = min_opt(self.horizon.clone(), other.horizon.clone());
        let diff = self.sub(other);
        match (diff.leading_exponent(), limit) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(lead), Some(limit)) => *lead >= limit,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("series serialization cannot fail")
    }
}

// Whether (Σ series)² equals 1 + u exactly, with no truncation.
fn squares_to_unit(series: &Terms, u: &Terms) -> bool {
    let mut square = Terms::new();
    for (ea, ca) in series {
        for (eb, cb) in series {
            *square.entry(ea + eb).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    square.retain(|_, c| !c.is_zero());
    let mut target = u.clone();
    *target.entry(Rational::zero()).or_insert_with(Rational::zero) += Rational::one();
    target.retain(|_, c| !c.is_zero());
    square == target
}

impl fmt::Display for LcNumber {
    /// `q0 + q1·eps^r1 + …`, with `+ O(eps^h)` appended for inexact values.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let (sign, magnitude) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{}", rational::format(&magnitude))?;
                continue;
            }
            if !magnitude.is_one() {
                write!(f, "{}·", rational::format(&magnitude))?;
            }
            write_eps_power(f, e)?;
        }
        if let Some(h) = &self.horizon {
            if first {
                f.write_str("0")?;
            }
            f.write_str(" + O(")?;
            write_eps_power(f, h)?;
            f.write_str(")")?;
        } else if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn write_eps_power(f: &mut fmt::Formatter<'_>, e: &Rational) -> fmt::Result {
    if e.is_one() {
        f.write_str("eps")
    } else if e.is_integer() {
        write!(f, "eps^{}", e)
    } else {
        write!(f, "eps^({})", rational::format(e))
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    #[serde(with = "rational::serde_string")]
    exp: Rational,
    #[serde(with = "rational::serde_string")]
    coef: Rational,
}

#[derive(Serialize, Deserialize)]
struct LcRepr {
    terms: Vec<TermRepr>,
    precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon: Option<String>,
}

impl Serialize for LcNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LcRepr {
            terms: self.terms.iter().map(|(e, c)| TermRepr { exp: e.clone(), coef: c.clone() }).collect(),
            precision: self.precision,
            horizon: self.horizon.as_ref().map(rational::format),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LcNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = LcRepr::deserialize(d)?;
        if repr.precision == 0 {
            return Err(D::Error::custom("precision must be positive"));
        }
        let horizon = match repr.horizon {
            None => None,
            Some(text) => {
                Some(rational::parse(&text).ok_or_else(|| D::Error::custom(format!("invalid horizon `{text}`")))?)
            }
        };
        let mut terms = Terms::new();
        for t in repr.terms {
            *terms.entry(t.exp).or_insert_with(Rational::zero) += t.coef;
        }
        Ok(Self::from_parts(terms, repr.precision, horizon))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl $trait<&LcNumber> for &LcNumber {
            type Output = LcNumber;
            fn $method(self, rhs: &LcNumber) -> LcNumber {
                LcNumber::$imp(self, rhs)
            }
        }
        impl $trait<LcNumber> for LcNumber {
            type Output = LcNumber;
            fn $method(self, rhs: LcNumber) -> LcNumber {
                LcNumber::$imp(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);

impl Neg for &LcNumber {
    type Output = LcNumber;
    fn neg(self) -> LcNumber {
        LcNumber::neg_ref(self)
    }
}

impl Neg for LcNumber {
    type Output = LcNumber;
    fn neg(self) -> LcNumber {
        LcNumber::neg_ref(&self)
    }
}
