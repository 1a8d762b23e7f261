//! Shapes, coordinates, exponent matrices and the m×n quantum torus.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::coeff::LaurentScalar;
use crate::error::{Error, Result};

/// Grid dimensions. Both sides are at least 2 unless built with
/// [`Shape::relaxed`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shape {
    pub m: usize,
    pub n: usize,
}

impl Shape {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidShape { m, n, min: 2 });
        }
        Ok(Self { m, n })
    }

    /// Permits a single row or column.
    pub fn relaxed(m: usize, n: usize) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(Error::InvalidShape { m, n, min: 1 });
        }
        Ok(Self { m, n })
    }

    pub fn size(&self) -> usize {
        self.m * self.n
    }

    pub fn contains(&self, c: Coord) -> bool {
        (1..=self.m).contains(&c.row) && (1..=self.n).contains(&c.col)
    }

    pub fn check(&self, c: Coord) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::CoordOutOfRange { coord: c, shape: *self })
        }
    }

    /// Row-major position of `c`, which is also its rank in the lex order.
    #[inline]
    pub fn index(&self, c: Coord) -> usize {
        (c.row - 1) * self.n + (c.col - 1)
    }

    #[inline]
    pub fn coord_at(&self, idx: usize) -> Coord {
        Coord::new(idx / self.n + 1, idx % self.n + 1)
    }

    /// The `t`-th smallest coordinate, 1-based.
    pub fn nth(&self, t: usize) -> Result<Coord> {
        if t == 0 || t > self.size() {
            return Err(Error::InvalidThreshold { t, max: self.size() });
        }
        Ok(self.coord_at(t - 1))
    }

    /// All coordinates in increasing lex order.
    pub fn coords(self) -> impl Iterator<Item = Coord> {
        (0..self.size()).map(move |i| self.coord_at(i))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

/// A 1-based grid position. The derived order is the lex order: rows
/// first, then columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Largest coordinate strictly below `self`.
    pub fn predecessor(&self, shape: Shape) -> Option<Coord> {
        let idx = shape.index(*self);
        (idx > 0).then(|| shape.coord_at(idx - 1))
    }

    /// Strictly north and strictly west of `other`.
    pub fn is_northwest_of(&self, other: Coord) -> bool {
        self.row < other.row && self.col < other.col
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// Lex comparison of two coordinates.
pub fn coord_lex_compare(a: Coord, b: Coord) -> Ordering {
    a.cmp(&b)
}

/// An m×n integer matrix stored densely in row-major order.
///
/// The derived ordering compares entries row-major with the larger entry
/// winning at the first difference, which is exactly the matrix-lex order
/// `≺` used for leading terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentMatrix {
    shape: Shape,
    entries: Vec<i64>,
}

impl ExponentMatrix {
    pub fn zero(shape: Shape) -> Self {
        Self { shape, entries: vec![0; shape.size()] }
    }

    pub fn unit(shape: Shape, c: Coord) -> Self {
        let mut z = Self::zero(shape);
        z.entries[shape.index(c)] = 1;
        z
    }

    pub fn from_entries(shape: Shape, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != shape.size() {
            return Err(Error::Parse(format!(
                "expected {} entries for shape {shape}, got {}",
                shape.size(),
                entries.len()
            )));
        }
        Ok(Self { shape, entries })
    }

    /// Builds from `(coord, exponent)` pairs, summing repeats.
    pub fn from_sparse(shape: Shape, items: &[(Coord, i64)]) -> Result<Self> {
        let mut z = Self::zero(shape);
        for &(c, e) in items {
            shape.check(c)?;
            let slot = &mut z.entries[shape.index(c)];
            *slot = slot.checked_add(e).ok_or(Error::ExponentOverflow)?;
        }
        Ok(z)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, c: Coord) -> i64 {
        self.entries[self.shape.index(c)]
    }

    #[inline]
    pub fn set(&mut self, c: Coord, e: i64) {
        let i = self.shape.index(c);
        self.entries[i] = e;
    }

    pub(crate) fn bump(&mut self, c: Coord, delta: i64) -> Result<()> {
        let i = self.shape.index(c);
        self.entries[i] = self.entries[i].checked_add(delta).ok_or(Error::ExponentOverflow)?;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|&e| e >= 0)
    }

    /// Nonzero entries in lex order of coordinates.
    pub fn support(&self) -> impl DoubleEndedIterator<Item = (Coord, i64)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| (self.shape.coord_at(i), e))
    }

    /// Largest coordinate with a nonzero entry.
    pub fn max_support(&self) -> Option<Coord> {
        self.entries.iter().rposition(|&e| e != 0).map(|i| self.shape.coord_at(i))
    }

    pub fn total_degree(&self) -> i64 {
        self.entries.iter().sum()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch { left: self.shape, right: other.shape });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { shape: self.shape, entries })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_sub(*b).ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { shape: self.shape, entries })
    }

    pub fn checked_neg(&self) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|a| a.checked_neg().ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { shape: self.shape, entries })
    }

    /// Renders the ordered monomial, e.g. `x_{1,1}x_{2,2}^2`; `1` when empty.
    pub fn monomial_string(&self, var: &str) -> String {
        let parts: Vec<String> = self
            .support()
            .map(|(c, e)| {
                if e == 1 {
                    format!("{var}_{{{},{}}}", c.row, c.col)
                } else {
                    format!("{var}_{{{},{}}}^{e}", c.row, c.col)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("")
        }
    }

    /// Sparse JSON: `[[i, j, e], ...]` in lex order.
    pub fn to_json(&self) -> Value {
        Value::Array(self.support().map(|(c, e)| json!([c.row, c.col, e])).collect())
    }

    pub fn from_json(shape: Shape, v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("exponent list must be an array".into()))?;
        let mut items = Vec::with_capacity(arr.len());
        for item in arr {
            let t = item
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::Parse("exponent entry must be [i, j, e]".into()))?;
            let i = t[0].as_u64().ok_or_else(|| Error::Parse("bad row".into()))? as usize;
            let j = t[1].as_u64().ok_or_else(|| Error::Parse("bad column".into()))? as usize;
            let e = t[2].as_i64().ok_or_else(|| Error::Parse("bad exponent".into()))?;
            items.push((Coord::new(i, j), e));
        }
        Self::from_sparse(shape, &items)
    }
}

impl fmt::Debug for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.monomial_string("t"))
    }
}

/// `c` with `t_a t_b = q^c t_b t_a`.
pub fn pair_commutation(a: Coord, b: Coord) -> Result<i64> {
    if a == b {
        return Err(Error::SelfCommutation(a));
    }
    Ok(pair_commutation_unchecked(a, b))
}

#[inline]
pub(crate) fn pair_commutation_unchecked(a: Coord, b: Coord) -> i64 {
    if a.row == b.row {
        if a.col < b.col { 1 } else { -1 }
    } else if a.col == b.col {
        if a.row < b.row { 1 } else { -1 }
    } else {
        0
    }
}

/// `t^N t^M = q^c t^{N+M}`; returns `(c, N+M)`.
pub fn monomial_mul(n: &ExponentMatrix, m: &ExponentMatrix) -> Result<(i64, ExponentMatrix)> {
    n.same_shape(m)?;
    let c = commutation_exponent(n, m)?;
    Ok((c, n.checked_add(m)?))
}

fn commutation_exponent(n: &ExponentMatrix, m: &ExponentMatrix) -> Result<i64> {
    let shape = n.shape;
    let mut c: i64 = 0;
    for (ia, &ma) in m.entries.iter().enumerate() {
        if ma == 0 {
            continue;
        }
        let a = shape.coord_at(ia);
        // Only coordinates sharing a row or column with `a` contribute.
        for (ib, &nb) in n.entries.iter().enumerate().skip(ia + 1) {
            if nb == 0 {
                continue;
            }
            let b = shape.coord_at(ib);
            let pc = pair_commutation_unchecked(b, a);
            if pc != 0 {
                let term = ma
                    .checked_mul(nb)
                    .and_then(|x| x.checked_mul(pc))
                    .ok_or(Error::ExponentOverflow)?;
                c = c.checked_add(term).ok_or(Error::ExponentOverflow)?;
            }
        }
    }
    Ok(c)
}

/// A finite sum `Σ α_N t^N` of normal-ordered Laurent monomials.
#[derive(Clone, PartialEq, Eq)]
pub struct TorusElement {
    shape: Shape,
    terms: BTreeMap<ExponentMatrix, LaurentScalar>,
}

impl TorusElement {
    pub fn zero(shape: Shape) -> Self {
        Self { shape, terms: BTreeMap::new() }
    }

    pub fn one(shape: Shape) -> Self {
        Self::monomial(ExponentMatrix::zero(shape), LaurentScalar::one())
    }

    pub fn monomial(n: ExponentMatrix, c: LaurentScalar) -> Self {
        let shape = n.shape;
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(n, c);
        }
        Self { shape, terms }
    }

    /// The single variable `t_c`.
    pub fn var(shape: Shape, c: Coord) -> Self {
        Self::monomial(ExponentMatrix::unit(shape, c), LaurentScalar::one())
    }

    /// `t_c^e` for any integer `e`.
    pub fn var_pow(shape: Shape, c: Coord, e: i64) -> Self {
        let mut n = ExponentMatrix::zero(shape);
        n.set(c, e);
        Self::monomial(n, LaurentScalar::one())
    }

    pub fn from_terms<I>(shape: Shape, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentMatrix, LaurentScalar)>,
    {
        let mut out = Self::zero(shape);
        for (n, c) in terms {
            if n.shape != shape {
                return Err(Error::ShapeMismatch { left: shape, right: n.shape });
            }
            out.add_term(n, &c);
        }
        Ok(out)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn terms(&self) -> &BTreeMap<ExponentMatrix, LaurentScalar> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, n: ExponentMatrix, c: &LaurentScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&n) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&n);
                }
            }
            None => {
                self.terms.insert(n, c.clone());
            }
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch { left: self.shape, right: other.shape });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (n, c) in &other.terms {
            out.add_term(n.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            shape: self.shape,
            terms: self.terms.iter().map(|(n, c)| (n.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &LaurentScalar) -> Self {
        let mut out = Self::zero(self.shape);
        if s.is_zero() {
            return out;
        }
        for (n, c) in &self.terms {
            out.terms.insert(n.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = Self::zero(self.shape);
        for (n, a) in &self.terms {
            for (m, b) in &other.terms {
                let (c, sum) = monomial_mul(n, m)?;
                out.add_term(sum, &(a * b).shift(c));
            }
        }
        Ok(out)
    }

    /// Inverse of a single-term element `α t^N` with `α` a unit.
    pub fn inverse(&self) -> Result<Self> {
        let mut it = self.terms.iter();
        let (n, c) = match (it.next(), it.next()) {
            (Some(t), None) => t,
            _ => return Err(Error::NotInvertible),
        };
        let cinv = c.inverse().ok_or(Error::NotInvertible)?;
        // (t^N)^{-1} = q^{c'} t^{-N} where t^N t^{-N} = q^{c} t^0.
        let neg = n.checked_neg()?;
        let (k, _) = monomial_mul(n, &neg)?;
        Ok(Self::monomial(neg, cinv.shift(-k)))
    }

    pub fn equals(&self, other: &Self) -> Result<bool> {
        self.same_shape(other)?;
        Ok(self == other)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(n, c)| json!({"N": n.to_json(), "coeff": c}))
                .collect(),
        )
    }

    pub fn from_json(shape: Shape, v: &Value) -> Result<Self> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("torus element must be an array".into()))?;
        let mut out = Self::zero(shape);
        for item in arr {
            let n = ExponentMatrix::from_json(shape, item.get("N").unwrap_or(&Value::Null))?;
            let c: LaurentScalar = serde_json::from_value(item.get("coeff").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Parse(e.to_string()))?;
            out.add_term(n, &c);
        }
        Ok(out)
    }
}

pub(crate) fn format_terms<'a, I>(f: &mut fmt::Formatter<'_>, terms: I, var: &str) -> fmt::Result
where
    I: Iterator<Item = (&'a ExponentMatrix, &'a LaurentScalar)>,
{
    let mut first = true;
    for (n, c) in terms {
        if !first {
            f.write_str(" + ")?;
        }
        first = false;
        let mono = n.monomial_string(var);
        if c.is_one() {
            f.write_str(&mono)?;
        } else if mono == "1" {
            write!(f, "({c})")?;
        } else {
            write!(f, "({c}){mono}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_terms(f, self.terms.iter().rev(), "t")
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorusElement[{}]({self})", self.shape)
    }
}
