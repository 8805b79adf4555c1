//! Exact integer and rational helpers: half-integers, Laurent polynomials
//! with half-integer exponents, binomial coefficients, the alternating-sum
//! identity, and a unitriangular convolution solver.
//!
//! Everything here is arbitrary-precision; there is no floating point
//! anywhere in this crate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exact half-integer, stored as its double.
///
/// Parity of `doubled` distinguishes integral values from strictly
/// half-integral ones.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt {
    doubled: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { doubled: 0 };
    pub const HALF: HalfInt = HalfInt { doubled: 1 };
    pub const ONE: HalfInt = HalfInt { doubled: 2 };

    pub fn from_doubled(doubled: i64) -> Self {
        HalfInt { doubled }
    }

    pub fn from_int(n: i64) -> Self {
        HalfInt { doubled: 2 * n }
    }

    pub fn doubled(self) -> i64 {
        self.doubled
    }

    pub fn is_integral(self) -> bool {
        self.doubled % 2 == 0
    }

    /// Exact integer value; `None` for strictly half-integral values.
    pub fn as_int(self) -> Option<i64> {
        self.is_integral().then_some(self.doubled / 2)
    }

    pub fn floor(self) -> i64 {
        self.doubled.div_euclid(2)
    }

    pub fn is_positive(self) -> bool {
        self.doubled > 0
    }

    pub fn abs(self) -> Self {
        HalfInt { doubled: self.doubled.abs() }
    }

    /// Compare against the rational `num/den` without leaving integers.
    pub fn cmp_fraction(self, num: i64, den: i64) -> std::cmp::Ordering {
        assert!(den > 0);
        (self.doubled * den).cmp(&(2 * num))
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { doubled: self.doubled + rhs.doubled }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { doubled: self.doubled - rhs.doubled }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { doubled: -self.doubled }
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, rhs: HalfInt) {
        self.doubled += rhs.doubled;
    }
}

impl Mul<i64> for HalfInt {
    type Output = HalfInt;
    fn mul(self, rhs: i64) -> HalfInt {
        HalfInt { doubled: self.doubled * rhs }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.doubled % 2 == 0 {
            write!(f, "{}", self.doubled / 2)
        } else {
            write!(f, "{}/2", self.doubled)
        }
    }
}

impl fmt::Debug for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"3"`, `"-2"`, `"3/2"`, `"-5/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            if den.trim() != "2" {
                return Err(Error::invalid(format!("half-integer denominator must be 2: {s:?}")));
            }
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad half-integer: {s:?}")))?;
            Ok(HalfInt::from_doubled(n))
        } else {
            let n: i64 = s.parse().map_err(|_| Error::invalid(format!("bad half-integer: {s:?}")))?;
            Ok(HalfInt::from_int(n))
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = HalfInt;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an integer or a string like \"3/2\"")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<HalfInt, E> {
                Ok(HalfInt::from_int(v))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<HalfInt, E> {
                Ok(HalfInt::from_int(v as i64))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<HalfInt, E> {
                v.parse().map_err(|e| E::custom(format!("{e}")))
            }
        }
        de.deserialize_any(V)
    }
}

/// Laurent polynomial with half-integer exponents and `BigInt` coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<HalfInt, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(HalfInt::ZERO, BigInt::one())
    }

    pub fn monomial(exp: HalfInt, coeff: BigInt) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        LaurentPoly { coeffs }
    }

    /// Sum of `X^e` over the multiset of exponents.
    pub fn from_exponents<I: IntoIterator<Item = HalfInt>>(exps: I) -> Self {
        let mut p = LaurentPoly::zero();
        for e in exps {
            p.add_term(e, BigInt::one());
        }
        p
    }

    pub fn add_term(&mut self, exp: HalfInt, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: HalfInt) -> BigInt {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&HalfInt, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Evaluation at X = 1, i.e. the sum of coefficients (the total mass).
    pub fn mass(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    /// The substitution X -> X^{-1}.
    pub fn reversed(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (-*e, c.clone())).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.reversed()
    }

    pub fn all_exponents_integral(&self) -> bool {
        self.coeffs.keys().all(|e| e.is_integral())
    }

    pub fn all_exponents_strictly_half(&self) -> bool {
        self.coeffs.keys().all(|e| !e.is_integral())
    }

    pub fn all_coeffs_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Multiset of exponents, descending, repeated with multiplicity.
    /// Requires non-negative integer coefficients.
    pub fn exponent_multiset_desc(&self) -> Result<Vec<HalfInt>> {
        let mut out = Vec::new();
        for (e, c) in self.coeffs.iter().rev() {
            let m = u64::try_from(c.clone())
                .map_err(|_| Error::invalid("exponent multiset needs small non-negative coefficients"))?;
            for _ in 0..m {
                out.push(*e);
            }
        }
        Ok(out)
    }

    /// The ladder `sum_{l=1}^{d} X^{(d+1)/2 - l}`: d terms with exponents
    /// `(d-1)/2, (d-3)/2, ..., -(d-1)/2`.
    pub fn ladder(d: u32) -> Self {
        assert!(d >= 1);
        let d = d as i64;
        LaurentPoly::from_exponents((1..=d).map(|l| HalfInt::from_doubled(d + 1 - 2 * l)))
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.coeffs.iter() {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.coeffs.iter() {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.coeffs.iter() {
            for (e2, c2) in rhs.coeffs.iter() {
                out.add_term(*e1 + *e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*X^({e})")?;
        }
        Ok(())
    }
}

/// C(n, k) as a `BigInt`; 0 outside `0 <= k <= n`. Negative arguments allowed.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `sum_{i=0}^{b+1} (-1)^i C(b+1, i) i^k`, with the convention `0^0 = 1`.
///
/// Vanishes whenever `k < b + 1`.
pub fn euler_alternating_sum(b: u32, k: u32) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..=(b as i64 + 1) {
        let pow = if i == 0 && k == 0 {
            BigInt::one()
        } else {
            BigInt::from(i).pow(k)
        };
        let term = binomial(b as i64 + 1, i) * pow;
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// A diagonal-constant unitriangular system: a sequence `T(0), ..., T(k)`
/// with `T(0) = 1`.
#[derive(Clone, Debug)]
pub struct TriangularSystem {
    values: Vec<BigInt>,
}

impl TriangularSystem {
    pub fn new(values: Vec<BigInt>) -> Result<Self> {
        match values.first() {
            Some(v) if v.is_one() => Ok(TriangularSystem { values }),
            Some(_) => Err(Error::invalid("unitriangular system needs T(0) = 1")),
            None => Err(Error::invalid("empty system")),
        }
    }

    pub fn from_fn(k: usize, f: impl Fn(usize) -> BigInt) -> Result<Self> {
        TriangularSystem::new((0..=k).map(f).collect())
    }

    pub fn target(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, j: usize) -> &BigInt {
        &self.values[j]
    }
}

/// The unique integer sequence `a(0..=k)` with
/// `sum_{i=0}^{j} a(i) T(j-i) = delta_{j,0}` for `0 <= j <= k`.
pub fn solve_unitriangular(sys: &TriangularSystem) -> Vec<BigInt> {
    let k = sys.target();
    let mut a: Vec<BigInt> = Vec::with_capacity(k + 1);
    a.push(BigInt::one());
    for j in 1..=k {
        let mut s = BigInt::zero();
        for i in 0..j {
            s += &a[i] * sys.value(j - i);
        }
        a.push(-s);
    }
    a
}
