//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are positions `0..nvars`; terms are ordered graded
//! lexicographically with variable 0 the most significant. The GCD is the
//! classical recursive one: content and primitive part with respect to the
//! first variable present, then a primitive pseudo-remainder sequence.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Self) -> Self {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn checked_div(&self, other: &Self) -> Option<Self> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Monomial)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, q: Rational) -> Self {
        Self::from_term(Monomial::one(nvars), q)
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::var_pow(nvars, index, 1)
    }

    pub fn var_pow(nvars: usize, index: usize, power: u32) -> Self {
        let mut exps = vec![0; nvars];
        exps[index] = power;
        Self::from_term(Monomial(exps), Rational::one())
    }

    pub fn from_term(monomial: Monomial, coef: Rational) -> Self {
        let nvars = monomial.0.len();
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(monomial, coef);
        }
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        self.is_constant().then(|| self.terms.values().next().cloned().expect("nonempty"))
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.leading_term().map(|(_, c)| c)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    fn insert_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Coefficients with respect to `var`: entry `k` collects the terms with
    /// `var^k`, with that variable's exponent cleared.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly> {
        let mut out = vec![Self::zero(self.nvars); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let k = m.0[var] as usize;
            let mut reduced = m.clone();
            reduced.0[var] = 0;
            out[k].insert_term(reduced, c.clone());
        }
        out
    }

    fn leading_coefficient_in(&self, var: usize) -> Poly {
        let mut coeffs = self.coefficients_in(var);
        coeffs.pop().expect("at least one coefficient")
    }

    /// Exact quotient, or `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let (dm, dc) = divisor.leading_term().expect("nonzero");
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            let m = rm.checked_div(dm)?;
            let c = rc / dc;
            let step = Self::from_term(m.clone(), c.clone());
            rem = &rem - &(&step * divisor);
            quot.insert_term(m, c);
        }
        Some(quot)
    }

    /// Scales so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(c) => self.scale(&c.recip()),
        }
    }

    fn content_in(&self, var: usize) -> Poly {
        self.coefficients_in(var).iter().filter(|c| !c.is_zero()).fold(Self::zero(self.nvars), |acc, c| acc.gcd(c))
    }

    fn primitive_part_in(&self, var: usize) -> Poly {
        let content = self.content_in(var);
        self.div_exact(&content).expect("content divides")
    }

    fn pseudo_remainder_in(&self, divisor: &Poly, var: usize) -> Poly {
        let dg = divisor.degree_in(var);
        let lcg = divisor.leading_coefficient_in(var);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(var) >= dg {
            let dr = r.degree_in(var);
            let lcr = r.leading_coefficient_in(var);
            let shift = Self::var_pow(self.nvars, var, dr - dg);
            r = &(&lcg * &r) - &(&(&lcr * &shift) * divisor);
        }
        r
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Self::one(self.nvars);
        }
        let var = (0..self.nvars)
            .find(|&v| self.degree_in(v) > 0 || other.degree_in(v) > 0)
            .expect("non-constant polynomial has a variable");
        let (da, db) = (self.degree_in(var), other.degree_in(var));
        if da == 0 {
            return self.gcd(&other.content_in(var));
        }
        if db == 0 {
            return self.content_in(var).gcd(other);
        }
        let content = self.content_in(var).gcd(&other.content_in(var));
        let (mut f, mut g) = (self.primitive_part_in(var), other.primitive_part_in(var));
        if da < db {
            std::mem::swap(&mut f, &mut g);
        }
        loop {
            let r = f.pseudo_remainder_in(&g, var);
            if r.is_zero() {
                break;
            }
            if r.degree_in(var) == 0 {
                g = Self::one(self.nvars);
                break;
            }
            f = g;
            g = r.primitive_part_in(var);
        }
        (&content * &g.primitive_part_in(var)).monic()
    }

    /// Rewrites every `var^2` as `replacement`, so the result has degree at
    /// most one in `var`.
    pub fn replace_square(&self, var: usize, replacement: &Poly) -> Poly {
        let mut out = Self::zero(self.nvars);
        for (k, coeff) in self.coefficients_in(var).into_iter().enumerate() {
            let k = k as u32;
            let term = &(&coeff * &replacement.pow(k / 2)) * &Self::var_pow(self.nvars, var, k % 2);
            out = &out + &term;
        }
        out
    }

    /// Replaces `var` by `value` everywhere.
    pub fn substitute(&self, var: usize, value: &Poly) -> Poly {
        let mut out = Self::zero(self.nvars);
        for (k, coeff) in self.coefficients_in(var).into_iter().enumerate() {
            out = &out + &(&coeff * &value.pow(k as u32));
        }
        out
    }

    /// Least common multiple of coefficient denominators and GCD of
    /// coefficient numerators.
    pub(crate) fn denominator_lcm_and_numerator_gcd(&self) -> (BigInt, BigInt) {
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
            gcd = gcd.gcd(c.numer());
        }
        (lcm, gcd)
    }

    /// Renders in the expression language, highest term first.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let mut factors = Vec::new();
            if !magnitude.is_one() || m.is_one() {
                factors.push(rational::format(&magnitude));
            }
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].clone()),
                    _ => factors.push(format!("{}^{e}", names[v])),
                }
            }
            let _ = write!(out, "{}", factors.join("*"));
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}
