//! Exact Laurent polynomials in `q` with rational coefficients.
//!
//! [`LaurentScalar`] is the ground ring for every other structure in the
//! crate. `q` stays symbolic, so an identity that holds here holds for every
//! non-root-of-unity specialization.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A finite sum `Σ c_e q^e` with `c_e ∈ ℚ` and `e ∈ ℤ`.
///
/// Terms are kept sorted by power with no zero coefficient, so structural
/// equality is equality of Laurent polynomials.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentScalar {
    terms: Vec<(i64, BigRational)>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::q_power(0)
    }

    /// The monomial `q^e`.
    pub fn q_power(e: i64) -> Self {
        Self {
            terms: vec![(e, BigRational::one())],
        }
    }

    /// `c · q^e`.
    pub fn monomial(c: BigRational, e: i64) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(e, c)] }
        }
    }

    pub fn from_int(c: i64) -> Self {
        Self::monomial(BigRational::from_integer(BigInt::from(c)), 0)
    }

    /// `q - q^{-1}`, the correction coefficient of the diagonal relation.
    pub fn q_minus_q_inv() -> Self {
        Self::from_terms([(1, rat(1)), (-1, rat(-1))])
    }

    /// Builds a scalar from arbitrary `(power, coefficient)` pairs, merging
    /// repeated powers and dropping zeros.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut v: Vec<(i64, BigRational)> = terms.into_iter().collect();
        v.sort_by_key(|(e, _)| *e);
        let mut out: Vec<(i64, BigRational)> = Vec::with_capacity(v.len());
        for (e, c) in v {
            match out.last_mut() {
                Some((le, lc)) if *le == e => *lc += c,
                _ => out.push((e, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Self { terms: out }
    }

    pub fn terms(&self) -> &[(i64, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Returns `(c, e)` when the scalar is a single term `c q^e`.
    pub fn as_monomial(&self) -> Option<(&BigRational, i64)> {
        match self.terms.as_slice() {
            [(e, c)] => Some((c, *e)),
            _ => None,
        }
    }

    /// Multiplicative inverse; only monomials are units of the Laurent ring.
    pub fn inverse(&self) -> Option<Self> {
        let (c, e) = self.as_monomial()?;
        Some(Self::monomial(c.recip(), -e))
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(p, c)| (p + e, c.clone())).collect(),
        }
    }

    /// Re-canonicalizes the representation (a no-op for values built
    /// through the public API).
    pub fn canonical(&self) -> Self {
        Self::from_terms(self.terms.iter().cloned())
    }

    fn add_ref(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ea, ca) = &self.terms[i];
            let (eb, cb) = &other.terms[j];
            match ea.cmp(eb) {
                Ordering::Less => {
                    out.push((*ea, ca.clone()));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((*eb, cb.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = ca + cb;
                    if !s.is_zero() {
                        out.push((*ea, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Self { terms: out }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if let Some((c, e)) = other.as_monomial() {
            return self.scale_monomial(c, e);
        }
        if let Some((c, e)) = self.as_monomial() {
            return other.scale_monomial(c, e);
        }
        let mut prod = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                prod.push((ea + eb, ca * cb));
            }
        }
        Self::from_terms(prod)
    }

    fn scale_monomial(&self, c: &BigRational, e: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(p, x)| (p + e, x * c)).collect(),
        }
    }
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl From<i64> for LaurentScalar {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

impl Add for LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: Self) -> Self {
        self.add_ref(&rhs)
    }
}

impl<'a> Add<&'a LaurentScalar> for &'a LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        self.add_ref(rhs)
    }
}

impl AddAssign<&LaurentScalar> for LaurentScalar {
    fn add_assign(&mut self, rhs: &LaurentScalar) {
        *self = self.add_ref(rhs);
    }
}

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(mut self) -> Self {
        for (_, c) in &mut self.terms {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -self.clone()
    }
}

impl Sub for LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: Self) -> Self {
        self.add_ref(&-rhs)
    }
}

impl<'a> Sub<&'a LaurentScalar> for &'a LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        self.add_ref(&-rhs)
    }
}

impl SubAssign<&LaurentScalar> for LaurentScalar {
    fn sub_assign(&mut self, rhs: &LaurentScalar) {
        *self = self.add_ref(&-rhs);
    }
}

impl Mul for LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl<'a> Mul<&'a LaurentScalar> for &'a LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        self.mul_ref(rhs)
    }
}

impl MulAssign<&LaurentScalar> for LaurentScalar {
    fn mul_assign(&mut self, rhs: &LaurentScalar) {
        *self = self.mul_ref(rhs);
    }
}

impl fmt::Display for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let unit = abs.is_one();
            if !unit || *e == 0 {
                write!(f, "{abs}")?;
            }
            match *e {
                0 => {}
                1 => f.write_str("q")?,
                _ => write!(f, "q^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentScalar({self})")
    }
}

// JSON: `[[power, numerator, denominator], ...]`, sorted by power, reduced
// fractions with positive denominators. Integers that do not fit in an i64
// are written as decimal strings.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WireInt {
    Small(i64),
    Big(String),
}

impl WireInt {
    fn from_big(b: &BigInt) -> Self {
        match b.to_i64() {
            Some(v) => WireInt::Small(v),
            None => WireInt::Big(b.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt, String> {
        match self {
            WireInt::Small(v) => Ok(BigInt::from(*v)),
            WireInt::Big(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        }
    }
}

impl Serialize for LaurentScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let wire: Vec<(i64, WireInt, WireInt)> = self
            .terms
            .iter()
            .map(|(e, c)| (*e, WireInt::from_big(c.numer()), WireInt::from_big(c.denom())))
            .collect();
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire: Vec<(i64, WireInt, WireInt)> = Vec::deserialize(d)?;
        let mut terms = Vec::with_capacity(wire.len());
        for (e, n, den) in wire {
            let n = n.to_big().map_err(D::Error::custom)?;
            let den = den.to_big().map_err(D::Error::custom)?;
            if den.is_zero() {
                return Err(D::Error::custom("zero denominator"));
            }
            terms.push((e, BigRational::new(n, den)));
        }
        Ok(Self::from_terms(terms))
    }
}
