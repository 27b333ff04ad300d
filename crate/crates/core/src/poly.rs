//! Exact sparse multivariate polynomials with rational coefficients.
//!
//! [`Poly`] is the value every pipeline is compared in: two constructions are
//! considered equivalent exactly when their polynomials are equal term for
//! term. Terms live in a `BTreeMap` keyed by canonically sorted monomials, so
//! structural equality of the map is polynomial equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Largest number of terms a checked operation may produce.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `7`, `-3` or `p/q`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A product of variables with positive exponents, sorted by variable name.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    /// Builds a monomial from arbitrary factors, merging repeated variables.
    pub fn from_factors<'a>(factors: impl IntoIterator<Item = (&'a str, u32)>) -> Self {
        let mut map: BTreeMap<&str, u32> = BTreeMap::new();
        for (v, e) in factors {
            if e > 0 {
                *map.entry(v).or_insert(0) += e;
            }
        }
        Monomial(map.into_iter().map(|(v, e)| (v.to_string(), e)).collect())
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (&self.0[i], &other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0.clone(), a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in canonical form: no zero coefficients, sorted monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn int(c: i64) -> Self {
        Poly::constant(rational(c))
    }

    pub fn var(name: &str) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(Monomial::var(name), Rational::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn variables(&self) -> Vec<String> {
        let mut vars: Vec<String> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    /// Multiplication that refuses to build more than `cap` terms.
    pub fn checked_mul(&self, other: &Poly, cap: usize) -> Result<Poly> {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
                if out.terms.len() > cap {
                    return Err(Error::TermCap { cap });
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Poly, cap: usize) -> Result<Poly> {
        let out = self + other;
        if out.num_terms() > cap {
            return Err(Error::TermCap { cap });
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, assignment: &HashMap<String, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (name, e) in m.factors() {
                let x = assignment
                    .get(name)
                    .ok_or_else(|| Error::MissingVariable(name.clone()))?;
                v *= num_traits::pow(x.clone(), *e as usize);
            }
            total += v;
        }
        Ok(total)
    }

    /// Value at a point modulo a prime, used as a fast randomized equality check.
    pub fn eval_mod(&self, assignment: &HashMap<String, u64>, modulus: u64) -> Result<u64> {
        let p = modulus as u128;
        let mut total: u128 = 0;
        for (m, c) in &self.terms {
            let mut v = rational_mod(c, modulus)? as u128;
            for (name, e) in m.factors() {
                let x = *assignment
                    .get(name)
                    .ok_or_else(|| Error::MissingVariable(name.clone()))?;
                v = v * pow_mod(x % modulus, *e as u64, modulus) as u128 % p;
            }
            total = (total + v) % p;
        }
        Ok(total as u64)
    }
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let p = modulus as u128;
    let mut acc: u128 = 1 % p;
    let mut b = base as u128 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        exp >>= 1;
    }
    acc as u64
}

/// Reduces `c` modulo the prime `modulus`.
pub fn rational_mod(c: &Rational, modulus: u64) -> Result<u64> {
    let m = BigInt::from(modulus);
    let num = c.numer().mod_floor(&m).to_u64().unwrap_or(0);
    let den = c.denom().mod_floor(&m).to_u64().unwrap_or(0);
    if den == 0 {
        return Err(Error::DenominatorVanishes(modulus));
    }
    let inv = pow_mod(den, modulus - 2, modulus);
    Ok(((num as u128 * inv as u128) % modulus as u128) as u64)
}

impl fmt::Display for Poly {
    /// Canonical text: `3*x^2*y + -1*z`, terms in monomial order, `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        self += rhs;
        self
    }
}

impl AddAssign for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs, usize::MAX)
            .expect("uncapped multiplication")
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
    Neg,
}

/// Ring arithmetic with the default term cap applied to the result.
pub fn poly_arith(op: PolyOp, a: &Poly, b: Option<&Poly>) -> Result<Poly> {
    poly_arith_capped(op, a, b, DEFAULT_TERM_CAP)
}

pub fn poly_arith_capped(op: PolyOp, a: &Poly, b: Option<&Poly>, cap: usize) -> Result<Poly> {
    match (op, b) {
        (PolyOp::Neg, None) => Ok(-a),
        (PolyOp::Add, Some(b)) => a.checked_add(b, cap),
        (PolyOp::Mul, Some(b)) => a.checked_mul(b, cap),
        (PolyOp::Neg, Some(_)) => Err(Error::MalformedTerm(
            "negation takes a single operand".into(),
        )),
        (_, None) => Err(Error::MalformedTerm(
            "binary operation needs two operands".into(),
        )),
    }
}

pub fn poly_equal(a: &Poly, b: &Poly) -> bool {
    a == b
}

/// An arc weight or matrix entry: a rational constant or a named variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeightExpr {
    Const(Rational),
    Var(String),
}

impl WeightExpr {
    pub fn int(c: i64) -> Self {
        WeightExpr::Const(rational(c))
    }

    pub fn one() -> Self {
        WeightExpr::int(1)
    }

    pub fn var(name: &str) -> Self {
        WeightExpr::Var(name.to_string())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, WeightExpr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, WeightExpr::Const(c) if c.is_one())
    }

    pub fn to_poly(&self) -> Poly {
        match self {
            WeightExpr::Const(c) => Poly::constant(c.clone()),
            WeightExpr::Var(v) => Poly::var(v),
        }
    }

    /// Parses an integer, a rational `p/q`, or an identifier.
    pub fn parse(tok: &str) -> Option<WeightExpr> {
        if let Some(c) = parse_rational(tok) {
            return Some(WeightExpr::Const(c));
        }
        is_identifier(tok).then(|| WeightExpr::Var(tok.to_string()))
    }

    pub fn is_negative_const(&self) -> bool {
        matches!(self, WeightExpr::Const(c) if c.is_negative())
    }
}

impl fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightExpr::Const(c) => write!(f, "{c}"),
            WeightExpr::Var(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> Poly {
        Poly::var("x")
    }
    fn y() -> Poly {
        Poly::var("y")
    }
    fn z() -> Poly {
        Poly::var("z")
    }

    #[test]
    fn ring_examples() {
        let sum = poly_arith(PolyOp::Add, &x(), Some(&y())).unwrap();
        assert_eq!(sum.to_string(), "x + y");
        let xz_yz = poly_arith(PolyOp::Mul, &(&x() + &y()), Some(&z())).unwrap();
        assert_eq!(xz_yz, &(&x() * &z()) + &(&y() * &z()));
        assert!(poly_arith(PolyOp::Mul, &xz_yz, Some(&Poly::zero()))
            .unwrap()
            .is_zero());
        assert_eq!(poly_arith(PolyOp::Neg, &x(), None).unwrap(), -x());
    }

    #[test]
    fn equality_examples() {
        assert!(poly_equal(&(&x() * &y()), &(&y() * &x())));
        assert!(poly_equal(&(&x() + &x()), &Poly::int(2).mul(x())));
        assert!(!poly_equal(&x(), &y()));
    }

    #[test]
    fn canonical_text() {
        let p = &(&Poly::int(3) * &(&(&x() * &x()) * &y())) - &z();
        assert_eq!(p.to_string(), "3*x^2*y + -1*z");
        assert_eq!(Poly::zero().to_string(), "0");
        let q = &(&Poly::var("a") * &Poly::var("d")) + &(&Poly::var("b") * &Poly::var("c"));
        assert_eq!(q.to_string(), "a*d + b*c");
        assert_eq!(Poly::constant(ratio(-3, 2)).to_string(), "-3/2");
    }

    #[test]
    fn eval_mod_examples() {
        let pt: HashMap<String, u64> = [("x".to_string(), 2), ("y".to_string(), 3)].into();
        assert_eq!((&x() + &y()).eval_mod(&pt, 7).unwrap(), 5);
        let pt: HashMap<String, u64> = [("x".to_string(), 3), ("y".to_string(), 5)].into();
        assert_eq!((&x() * &y()).eval_mod(&pt, 7).unwrap(), 1);
        assert_eq!(Poly::zero().eval_mod(&HashMap::new(), 7).unwrap(), 0);
        assert_eq!(
            x().eval_mod(&HashMap::new(), 7),
            Err(Error::MissingVariable("x".into()))
        );
        // 1/2 is 4 modulo 7
        assert_eq!(
            Poly::constant(ratio(1, 2))
                .eval_mod(&HashMap::new(), 7)
                .unwrap(),
            4
        );
        assert_eq!(Poly::int(-1).eval_mod(&HashMap::new(), 7).unwrap(), 6);
    }

    #[test]
    fn term_cap_is_enforced() {
        let a = &(&x() + &y()) + &z();
        let err = poly_arith_capped(PolyOp::Mul, &a, Some(&a), 4).unwrap_err();
        assert_eq!(err, Error::TermCap { cap: 4 });
        assert_eq!(
            poly_arith_capped(PolyOp::Mul, &a, Some(&a), 6)
                .unwrap()
                .num_terms(),
            6
        );
    }

    #[test]
    fn weight_parsing() {
        assert_eq!(WeightExpr::parse("-1"), Some(WeightExpr::int(-1)));
        assert_eq!(
            WeightExpr::parse("3/6"),
            Some(WeightExpr::Const(ratio(1, 2)))
        );
        assert_eq!(WeightExpr::parse("x_1"), Some(WeightExpr::var("x_1")));
        assert_eq!(WeightExpr::parse("1x"), None);
        assert_eq!(WeightExpr::parse("1/0"), None);
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        let term = (
            -3i64..=3,
            proptest::collection::vec((0usize..3, 1u32..3), 0..3),
        );
        proptest::collection::vec(term, 0..4).prop_map(|terms| {
            let names = ["x", "y", "z"];
            Poly::from_terms(terms.into_iter().map(|(c, fs)| {
                (
                    Monomial::from_factors(fs.into_iter().map(|(v, e)| (names[v], e))),
                    rational(c),
                )
            }))
        })
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn equality_implies_modular_agreement(
            a in arb_poly(), b in arb_poly(),
            xs in proptest::collection::vec(0u64..1000, 3),
        ) {
            let lhs = &a * &b;
            let rhs = &b * &a;
            let pt: HashMap<String, u64> = ["x", "y", "z"].iter()
                .zip(xs).map(|(n, v)| (n.to_string(), v)).collect();
            for p in [7u64, 101, 1_000_000_007] {
                prop_assert_eq!(lhs.eval_mod(&pt, p).unwrap(), rhs.eval_mod(&pt, p).unwrap());
            }
        }

        #[test]
        fn canonical_form_has_no_zero_coefficients(a in arb_poly(), b in arb_poly()) {
            let p = &(&a * &b) - &(&b * &a);
            prop_assert!(p.is_zero());
            prop_assert!((&a + &b).terms().all(|(_, c)| !c.is_zero()));
        }
    }
}
