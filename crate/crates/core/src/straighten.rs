//! The interpolating algebras `R^(t)`: lexicographic normal forms,
//! straightening, the matrix-lex term order and the grading.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde_json::{json, Value};

use crate::coeff::LaurentScalar;
use crate::error::{Error, Result};
use crate::torus::{format_terms, Coord, ExponentMatrix, Shape};

/// `t` together with the `t`-th smallest coordinate `(r,s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Threshold {
    pub shape: Shape,
    pub t: usize,
    pub rs: Coord,
}

impl Threshold {
    pub fn new(shape: Shape, t: usize) -> Result<Self> {
        Ok(Self { shape, t, rs: shape.nth(t)? })
    }

    /// `t = mn`, the algebra of quantum matrices itself.
    pub fn top(shape: Shape) -> Self {
        Self { shape, t: shape.size(), rs: shape.coord_at(shape.size() - 1) }
    }

    pub fn previous(&self) -> Result<Self> {
        if self.t < 2 {
            return Err(Error::NoPreviousThreshold);
        }
        Self::new(self.shape, self.t - 1)
    }

    pub fn is_top(&self) -> bool {
        self.t == self.shape.size()
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t={} (r,s)={}", self.t, self.rs)
    }
}

/// A generator `x_c` or, for the threshold coordinate only, `x_c^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub coord: Coord,
    pub inverse: bool,
}

impl Letter {
    pub const fn pos(coord: Coord) -> Self {
        Self { coord, inverse: false }
    }

    pub const fn inv(coord: Coord) -> Self {
        Self { coord, inverse: true }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "x_{{{},{}}}^-1", self.coord.row, self.coord.col)
        } else {
            write!(f, "x_{{{},{}}}", self.coord.row, self.coord.col)
        }
    }
}

/// Right-hand side of a rewrite `uv -> Σ c · word`.
pub type RewriteRule = Vec<(LaurentScalar, Vec<Letter>)>;

/// The rule for an out-of-order pair `x_a x_b` with `a > b`.
pub fn swap_adjacent(a: Coord, b: Coord, th: &Threshold) -> Result<RewriteRule> {
    swap_letters(Letter::pos(a), Letter::pos(b), th, th.rs)
}

/// As [`swap_adjacent`] but either letter may be `x_p^{-1}` for the
/// localized coordinate `p`, which must be at least `(r,s)`.
pub fn swap_letters(a: Letter, b: Letter, th: &Threshold, pivot: Coord) -> Result<RewriteRule> {
    check_pivot(th, pivot)?;
    for l in [a, b] {
        th.shape.check(l.coord)?;
        if l.inverse && l.coord != pivot {
            return Err(Error::NegativeExponent { coord: l.coord, exponent: -1 });
        }
    }
    if a.coord == b.coord {
        return Err(Error::SelfCommutation(a.coord));
    }
    if a.coord < b.coord {
        return Err(Error::NotOutOfOrder { left: a.coord, right: b.coord });
    }
    let rs = th.rs;
    let rule = match (a.inverse, b.inverse) {
        (false, false) => positive_rule(a.coord, b.coord, rs),
        // x_a x_p^{-1} with a > p: invert the single-term factor.
        (false, true) => {
            let mu = single_factor(a.coord, pivot, rs);
            vec![(mu.inverse().expect("monomial"), vec![b, a])]
        }
        (true, false) => {
            let l = b.coord;
            if l.is_northwest_of(pivot) && pivot <= rs {
                let is = Coord::new(l.row, pivot.col);
                let rj = Coord::new(pivot.row, l.col);
                vec![
                    (LaurentScalar::one(), vec![b, a]),
                    (LaurentScalar::q_minus_q_inv(), vec![a, Letter::pos(is), Letter::pos(rj), a]),
                ]
            } else {
                let mu = single_factor(pivot, l, rs);
                vec![(mu.inverse().expect("monomial"), vec![b, a])]
            }
        }
        (true, true) => unreachable!("a single coordinate is inverted"),
    };
    Ok(rule)
}

fn check_pivot(th: &Threshold, pivot: Coord) -> Result<()> {
    th.shape.check(pivot)?;
    if pivot < th.rs {
        return Err(Error::NotOutOfOrder { left: th.rs, right: pivot });
    }
    Ok(())
}

fn positive_rule(a: Coord, b: Coord, rs: Coord) -> RewriteRule {
    if a.row == b.row || a.col == b.col {
        return vec![(LaurentScalar::q_power(-1), vec![Letter::pos(b), Letter::pos(a)])];
    }
    if a.col < b.col {
        return vec![(LaurentScalar::one(), vec![Letter::pos(b), Letter::pos(a)])];
    }
    let mut rule = vec![(LaurentScalar::one(), vec![Letter::pos(b), Letter::pos(a)])];
    if a <= rs {
        let ne = Coord::new(b.row, a.col);
        let sw = Coord::new(a.row, b.col);
        rule.push((-LaurentScalar::q_minus_q_inv(), vec![Letter::pos(ne), Letter::pos(sw)]));
    }
    rule
}

// μ with x_a x_b = μ x_b x_a for a > b, when that relation is a single term.
fn single_factor(a: Coord, b: Coord, rs: Coord) -> LaurentScalar {
    let rule = positive_rule(a, b, rs);
    debug_assert_eq!(rule.len(), 1);
    rule.into_iter().next().expect("nonempty rule").0
}

pub(crate) type Terms = BTreeMap<ExponentMatrix, LaurentScalar>;

pub(crate) fn add_term(terms: &mut Terms, n: ExponentMatrix, c: &LaurentScalar) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&n) {
        Some(slot) => {
            *slot += c;
            if slot.is_zero() {
                terms.remove(&n);
            }
        }
        None => {
            terms.insert(n, c.clone());
        }
    }
}

type Expansion = Rc<Vec<(ExponentMatrix, LaurentScalar)>>;

/// Straightening engine for one `(threshold, pivot)` pair.
///
/// Products are computed letter by letter: `x^M · x_ℓ` peels the largest
/// letter of `x^M`, applies the swap rule and recurses. Results of
/// `x^M · x_ℓ` are memoized, so a single engine should be reused across
/// related products.
pub struct Straightener {
    th: Threshold,
    pivot: Coord,
    cache: HashMap<(ExponentMatrix, Letter), Expansion>,
}

impl Straightener {
    pub fn new(th: Threshold) -> Self {
        Self { th, pivot: th.rs, cache: HashMap::new() }
    }

    /// Engine for `R^(t)[x_p^{-1}]` with `p ≥ (r,s)`.
    pub fn with_pivot(th: Threshold, pivot: Coord) -> Result<Self> {
        check_pivot(&th, pivot)?;
        Ok(Self { th, pivot, cache: HashMap::new() })
    }

    pub fn threshold(&self) -> &Threshold {
        &self.th
    }

    pub fn pivot(&self) -> Coord {
        self.pivot
    }

    /// Normal form of `x^M · ℓ`.
    pub fn term_times_letter(&mut self, m: &ExponentMatrix, l: Letter) -> Result<Expansion> {
        let key = (m.clone(), l);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(hit.clone());
        }
        let out = Rc::new(self.compute(m, l)?);
        self.cache.insert(key, out.clone());
        Ok(out)
    }

    fn compute(&mut self, m: &ExponentMatrix, l: Letter) -> Result<Vec<(ExponentMatrix, LaurentScalar)>> {
        let delta = if l.inverse { -1 } else { 1 };
        let top = match m.max_support() {
            Some(c) if c > l.coord => c,
            _ => {
                let mut out = m.clone();
                out.bump(l.coord, delta)?;
                return Ok(vec![(out, LaurentScalar::one())]);
            }
        };
        let e = m.get(top);
        let last = if e < 0 { Letter::inv(top) } else { Letter::pos(top) };
        let mut rest = m.clone();
        rest.bump(top, if e < 0 { 1 } else { -1 })?;
        let rule = swap_letters(last, l, &self.th, self.pivot)?;
        let mut acc = Terms::new();
        for (coef, word) in rule {
            let mut cur: Terms = Terms::new();
            cur.insert(rest.clone(), coef);
            for letter in word {
                cur = self.terms_times_letter(&cur, letter)?;
            }
            for (k, c) in cur {
                add_term(&mut acc, k, &c);
            }
        }
        Ok(acc.into_iter().collect())
    }

    fn terms_times_letter(&mut self, terms: &Terms, l: Letter) -> Result<Terms> {
        let mut out = Terms::new();
        for (k, c) in terms {
            let exp = self.term_times_letter(k, l)?;
            for (k2, c2) in exp.iter() {
                add_term(&mut out, k2.clone(), &(c * c2));
            }
        }
        Ok(out)
    }

    fn terms_times_monomial(&mut self, mut cur: Terms, n: &ExponentMatrix) -> Result<Terms> {
        for (c, e) in n.support() {
            let letter = if e < 0 { Letter::inv(c) } else { Letter::pos(c) };
            self.check_letter(letter)?;
            for _ in 0..e.unsigned_abs() {
                cur = self.terms_times_letter(&cur, letter)?;
            }
        }
        Ok(cur)
    }

    /// Normal form of `x^M · x^N`.
    pub fn monomial_product(&mut self, m: &ExponentMatrix, n: &ExponentMatrix) -> Result<Terms> {
        let mut cur = Terms::new();
        cur.insert(m.clone(), LaurentScalar::one());
        self.terms_times_monomial(cur, n)
    }

    pub(crate) fn product(&mut self, x: &Terms, y: &Terms) -> Result<Terms> {
        let mut out = Terms::new();
        for (n, b) in y {
            let left: Terms = x.iter().map(|(m, a)| (m.clone(), a * b)).collect();
            for (k, c) in self.terms_times_monomial(left, n)? {
                add_term(&mut out, k, &c);
            }
        }
        Ok(out)
    }

    /// Normal form of a word of letters.
    pub fn word(&mut self, word: &[Letter]) -> Result<Terms> {
        let mut cur = Terms::new();
        cur.insert(ExponentMatrix::zero(self.th.shape), LaurentScalar::one());
        for &l in word {
            self.check_letter(l)?;
            cur = self.terms_times_letter(&cur, l)?;
        }
        Ok(cur)
    }

    fn check_letter(&self, l: Letter) -> Result<()> {
        self.th.shape.check(l.coord)?;
        if l.inverse && l.coord != self.pivot {
            return Err(Error::NegativeExponent { coord: l.coord, exponent: -1 });
        }
        Ok(())
    }

    pub fn mul(&mut self, x: &QmPoly, y: &QmPoly) -> Result<QmPoly> {
        check_same(&self.th, &x.threshold)?;
        check_same(&self.th, &y.threshold)?;
        let terms = self.product(&x.terms, &y.terms)?;
        Ok(QmPoly { threshold: self.th, terms })
    }

    pub fn mul_localized(&mut self, x: &LocalizedQmPoly, y: &LocalizedQmPoly) -> Result<LocalizedQmPoly> {
        check_same(&self.th, &x.threshold)?;
        check_same(&self.th, &y.threshold)?;
        for p in [x.pivot, y.pivot] {
            if p != self.pivot {
                return Err(Error::NotOutOfOrder { left: self.pivot, right: p });
            }
        }
        let terms = self.product(&x.terms, &y.terms)?;
        Ok(LocalizedQmPoly { threshold: self.th, pivot: self.pivot, terms })
    }
}

fn check_same(a: &Threshold, b: &Threshold) -> Result<()> {
    if a.shape != b.shape {
        return Err(Error::ShapeMismatch { left: a.shape, right: b.shape });
    }
    if a.t != b.t {
        return Err(Error::ThresholdMismatch { left: a.t, right: b.t });
    }
    Ok(())
}

fn parse_header(v: &Value) -> Result<Threshold> {
    let field = |k: &str| {
        v.get(k)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| Error::Parse(format!("missing field {k}")))
    };
    let shape = Shape::relaxed(field("m")?, field("n")?)?;
    Threshold::new(shape, field("t")?)
}

fn parse_terms(shape: Shape, v: &Value) -> Result<Vec<(ExponentMatrix, LaurentScalar)>> {
    let arr = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing terms".into()))?;
    let mut terms = Vec::with_capacity(arr.len());
    for item in arr {
        let n = ExponentMatrix::from_json(shape, item.get("N").unwrap_or(&Value::Null))?;
        let c: LaurentScalar = serde_json::from_value(item.get("coeff").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(e.to_string()))?;
        terms.push((n, c));
    }
    Ok(terms)
}

fn terms_json(terms: &Terms) -> Value {
    Value::Array(
        terms
            .iter()
            .map(|(n, c)| json!({"N": n.to_json(), "coeff": c}))
            .collect(),
    )
}

macro_rules! poly_common {
    ($ty:ident) => {
        impl $ty {
            pub fn zero(threshold: Threshold) -> Self {
                Self::base(threshold)
            }

            pub fn one(threshold: Threshold) -> Self {
                Self::monomial(threshold, ExponentMatrix::zero(threshold.shape), LaurentScalar::one())
                    .expect("zero matrix is admissible")
            }

            pub fn monomial(threshold: Threshold, n: ExponentMatrix, c: LaurentScalar) -> Result<Self> {
                Self::from_terms(threshold, [(n, c)])
            }

            /// The generator `x_c`.
            pub fn var(threshold: Threshold, c: Coord) -> Result<Self> {
                threshold.shape.check(c)?;
                Self::monomial(threshold, ExponentMatrix::unit(threshold.shape, c), LaurentScalar::one())
            }

            pub fn from_terms<I>(threshold: Threshold, terms: I) -> Result<Self>
            where
                I: IntoIterator<Item = (ExponentMatrix, LaurentScalar)>,
            {
                let mut out = Self::base(threshold);
                out.extend_terms(terms)?;
                Ok(out)
            }

            fn extend_terms<I>(&mut self, terms: I) -> Result<()>
            where
                I: IntoIterator<Item = (ExponentMatrix, LaurentScalar)>,
            {
                for (n, c) in terms {
                    self.admissible(&n)?;
                    add_term(&mut self.terms, n, &c);
                }
                Ok(())
            }

            pub fn threshold(&self) -> &Threshold {
                &self.threshold
            }

            pub fn shape(&self) -> Shape {
                self.threshold.shape
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

            pub fn coeff(&self, n: &ExponentMatrix) -> LaurentScalar {
                self.terms.get(n).cloned().unwrap_or_else(LaurentScalar::zero)
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.compatible(other)?;
                let mut out = self.clone();
                for (n, c) in &other.terms {
                    add_term(&mut out.terms, n.clone(), c);
                }
                Ok(out)
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.add(&other.neg())
            }

            pub fn neg(&self) -> Self {
                let mut out = self.clone();
                for c in out.terms.values_mut() {
                    *c = -&*c;
                }
                out
            }

            pub fn scale(&self, s: &LaurentScalar) -> Self {
                let mut out = self.clone();
                if s.is_zero() {
                    out.terms.clear();
                } else {
                    for c in out.terms.values_mut() {
                        *c = &*c * s;
                    }
                }
                out
            }

            /// Maximal term under the matrix-lex order.
            pub fn leading_term(&self) -> Result<(&ExponentMatrix, &LaurentScalar)> {
                self.terms.iter().next_back().ok_or(Error::ZeroPolynomial)
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                format_terms(f, self.terms.iter().rev(), "x")
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}[{}, t={}]({self})", stringify!($ty), self.threshold.shape, self.threshold.t)
            }
        }
    };
}

/// An element of `R^(t)` in lexicographic expression.
#[derive(Clone, PartialEq, Eq)]
pub struct QmPoly {
    threshold: Threshold,
    pub(crate) terms: Terms,
}

/// An element of `R^(t)[x_p^{-1}]`; only the pivot exponent may be
/// negative. The pivot is `(r,s)` unless chosen otherwise.
#[derive(Clone, PartialEq, Eq)]
pub struct LocalizedQmPoly {
    threshold: Threshold,
    pivot: Coord,
    pub(crate) terms: Terms,
}

poly_common!(QmPoly);
poly_common!(LocalizedQmPoly);

impl QmPoly {
    fn base(threshold: Threshold) -> Self {
        Self { threshold, terms: Terms::new() }
    }

    fn admissible(&self, n: &ExponentMatrix) -> Result<()> {
        if n.shape() != self.threshold.shape {
            return Err(Error::ShapeMismatch { left: self.threshold.shape, right: n.shape() });
        }
        if let Some((c, e)) = n.support().find(|&(_, e)| e < 0) {
            return Err(Error::NegativeExponent { coord: c, exponent: e });
        }
        Ok(())
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        check_same(&self.threshold, &other.threshold)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Straightener::new(self.threshold).mul(self, other)
    }

    /// The same element viewed in the localization at `(r,s)`.
    pub fn localize(&self) -> LocalizedQmPoly {
        LocalizedQmPoly { threshold: self.threshold, pivot: self.threshold.rs, terms: self.terms.clone() }
    }

    /// The same element viewed in the localization at `pivot ≥ (r,s)`.
    pub fn localize_at(&self, pivot: Coord) -> Result<LocalizedQmPoly> {
        check_pivot(&self.threshold, pivot)?;
        Ok(LocalizedQmPoly { threshold: self.threshold, pivot, terms: self.terms.clone() })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.threshold.shape.m,
            "n": self.threshold.shape.n,
            "t": self.threshold.t,
            "terms": terms_json(&self.terms),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let th = parse_header(v)?;
        Self::from_terms(th, parse_terms(th.shape, v)?)
    }
}

impl LocalizedQmPoly {
    fn base(threshold: Threshold) -> Self {
        Self { threshold, pivot: threshold.rs, terms: Terms::new() }
    }

    fn admissible(&self, n: &ExponentMatrix) -> Result<()> {
        if n.shape() != self.threshold.shape {
            return Err(Error::ShapeMismatch { left: self.threshold.shape, right: n.shape() });
        }
        if let Some((c, e)) = n.support().find(|&(c, e)| e < 0 && c != self.pivot) {
            return Err(Error::NegativeExponent { coord: c, exponent: e });
        }
        Ok(())
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        check_same(&self.threshold, &other.threshold)?;
        if self.pivot != other.pivot {
            return Err(Error::NotOutOfOrder { left: self.pivot, right: other.pivot });
        }
        Ok(())
    }

    /// Zero element of `R^(t)[x_p^{-1}]`.
    pub fn zero_at(threshold: Threshold, pivot: Coord) -> Result<Self> {
        check_pivot(&threshold, pivot)?;
        Ok(Self { threshold, pivot, terms: Terms::new() })
    }

    pub fn from_terms_at<I>(threshold: Threshold, pivot: Coord, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExponentMatrix, LaurentScalar)>,
    {
        let mut out = Self::zero_at(threshold, pivot)?;
        out.extend_terms(terms)?;
        Ok(out)
    }

    pub fn pivot(&self) -> Coord {
        self.pivot
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Straightener::with_pivot(self.threshold, self.pivot)?.mul_localized(self, other)
    }

    /// `x_p^{-1}` for the pivot `p = (r,s)`.
    pub fn rs_inverse(threshold: Threshold) -> Self {
        Self::pivot_inverse(threshold, threshold.rs).expect("(r,s) is a valid pivot")
    }

    /// `x_p^{-1}`.
    pub fn pivot_inverse(threshold: Threshold, pivot: Coord) -> Result<Self> {
        let mut n = ExponentMatrix::zero(threshold.shape);
        n.set(pivot, -1);
        Self::from_terms_at(threshold, pivot, [(n, LaurentScalar::one())])
    }

    /// Down-cast; fails if some pivot exponent is negative.
    pub fn to_qm(&self) -> Result<QmPoly> {
        QmPoly::from_terms(self.threshold, self.terms.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.threshold.shape.m,
            "n": self.threshold.shape.n,
            "t": self.threshold.t,
            "pivot": [self.pivot.row, self.pivot.col],
            "terms": terms_json(&self.terms),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let th = parse_header(v)?;
        let pivot = match v.get("pivot").and_then(Value::as_array) {
            Some(p) if p.len() == 2 => {
                let i = p[0].as_u64().ok_or_else(|| Error::Parse("bad pivot".into()))? as usize;
                let j = p[1].as_u64().ok_or_else(|| Error::Parse("bad pivot".into()))? as usize;
                Coord::new(i, j)
            }
            Some(_) => return Err(Error::Parse("bad pivot".into())),
            None => th.rs,
        };
        Self::from_terms_at(th, pivot, parse_terms(th.shape, v)?)
    }
}

impl From<QmPoly> for LocalizedQmPoly {
    fn from(p: QmPoly) -> Self {
        LocalizedQmPoly { threshold: p.threshold, pivot: p.threshold.rs, terms: p.terms }
    }
}

/// Lexicographic expression of `x · y`.
pub fn qm_mul(x: &QmPoly, y: &QmPoly) -> Result<QmPoly> {
    x.mul(y)
}

/// Matrix-lex comparison, with the least coordinate where `m` and `n`
/// differ.
pub fn matrix_lex_compare(m: &ExponentMatrix, n: &ExponentMatrix) -> Result<(std::cmp::Ordering, Option<Coord>)> {
    if m.shape() != n.shape() {
        return Err(Error::ShapeMismatch { left: m.shape(), right: n.shape() });
    }
    let shape = m.shape();
    for (i, (a, b)) in m.entries().iter().zip(n.entries()).enumerate() {
        if a != b {
            return Ok((a.cmp(b), Some(shape.coord_at(i))));
        }
    }
    Ok((std::cmp::Ordering::Equal, None))
}

pub fn leading_term(a: &QmPoly) -> Result<(ExponentMatrix, LaurentScalar)> {
    a.leading_term().map(|(n, c)| (n.clone(), c.clone()))
}

/// Entrywise `m ≤ n`.
pub fn term_divides(m: &ExponentMatrix, n: &ExponentMatrix) -> bool {
    m.shape() == n.shape() && m.entries().iter().zip(n.entries()).all(|(a, b)| a <= b)
}

/// Row and column sums of a nonnegative exponent matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradeVector {
    pub rows: Vec<u64>,
    pub cols: Vec<u64>,
}

impl GradeVector {
    pub fn add(&self, other: &Self) -> Self {
        Self {
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a + b).collect(),
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a + b).collect(),
        }
    }
}

pub fn grade(m: &ExponentMatrix) -> Result<GradeVector> {
    let shape = m.shape();
    let mut rows = vec![0u64; shape.m];
    let mut cols = vec![0u64; shape.n];
    for c in shape.coords() {
        let e = m.get(c);
        if e < 0 {
            return Err(Error::NegativeExponent { coord: c, exponent: e });
        }
        rows[c.row - 1] += e as u64;
        cols[c.col - 1] += e as u64;
    }
    Ok(GradeVector { rows, cols })
}

/// Word-level rewriting with a caller-chosen redex at each step.
///
/// Independent of [`Straightener`]; used to check that every rewrite
/// order reaches the same normal form.
pub struct WordRewriter {
    th: Threshold,
    pivot: Coord,
}

impl WordRewriter {
    pub fn new(th: Threshold) -> Self {
        Self { th, pivot: th.rs }
    }

    pub fn with_pivot(th: Threshold, pivot: Coord) -> Result<Self> {
        check_pivot(&th, pivot)?;
        Ok(Self { th, pivot })
    }

    fn redexes(word: &[Letter]) -> Vec<usize> {
        (0..word.len().saturating_sub(1))
            .filter(|&i| {
                let (u, v) = (word[i], word[i + 1]);
                u.coord > v.coord || (u.coord == v.coord && u.inverse != v.inverse)
            })
            .collect()
    }

    /// Rewrites until every word is ordered; `pick(k)` chooses one of `k`
    /// available redexes.
    pub fn normalize(&self, word: &[Letter], mut pick: impl FnMut(usize) -> usize) -> Result<LocalizedQmPoly> {
        let mut pending: Vec<(LaurentScalar, Vec<Letter>)> = vec![(LaurentScalar::one(), word.to_vec())];
        let mut done = Terms::new();
        while let Some((c, w)) = pending.pop() {
            let red = Self::redexes(&w);
            if red.is_empty() {
                let mut n = ExponentMatrix::zero(self.th.shape);
                for l in &w {
                    n.bump(l.coord, if l.inverse { -1 } else { 1 })?;
                }
                add_term(&mut done, n, &c);
                continue;
            }
            let i = red[pick(red.len()) % red.len()];
            let (u, v) = (w[i], w[i + 1]);
            if u.coord == v.coord {
                let mut nw = w[..i].to_vec();
                nw.extend_from_slice(&w[i + 2..]);
                pending.push((c, nw));
                continue;
            }
            for (k, rep) in swap_letters(u, v, &self.th, self.pivot)? {
                let mut nw = w[..i].to_vec();
                nw.extend_from_slice(&rep);
                nw.extend_from_slice(&w[i + 2..]);
                pending.push((&c * &k, nw));
            }
        }
        LocalizedQmPoly::from_terms_at(self.th, self.pivot, done)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: usize, j: usize) -> Coord {
        Coord::new(i, j)
    }

    fn e(shape: Shape, items: &[(usize, usize)]) -> ExponentMatrix {
        let v: Vec<(Coord, i64)> = items.iter().map(|&(i, j)| (c(i, j), 1)).collect();
        ExponentMatrix::from_sparse(shape, &v).unwrap()
    }

    #[test]
    fn swap_rules() {
        let s = Shape::new(2, 2).unwrap();
        let th = Threshold::top(s);
        let lam = LaurentScalar::q_minus_q_inv();
        let r = swap_adjacent(c(2, 2), c(1, 1), &th).unwrap();
        assert_eq!(
            r,
            vec![
                (LaurentScalar::one(), vec![Letter::pos(c(1, 1)), Letter::pos(c(2, 2))]),
                (-lam, vec![Letter::pos(c(1, 2)), Letter::pos(c(2, 1))]),
            ]
        );
        let r = swap_adjacent(c(1, 2), c(1, 1), &th).unwrap();
        assert_eq!(r, vec![(LaurentScalar::q_power(-1), vec![Letter::pos(c(1, 1)), Letter::pos(c(1, 2))])]);

        let s23 = Shape::new(2, 3).unwrap();
        let th5 = Threshold::new(s23, 5).unwrap();
        let r = swap_adjacent(c(2, 3), c(1, 1), &th5).unwrap();
        assert_eq!(r, vec![(LaurentScalar::one(), vec![Letter::pos(c(1, 1)), Letter::pos(c(2, 3))])]);

        assert_eq!(swap_adjacent(c(1, 1), c(1, 1), &th), Err(Error::SelfCommutation(c(1, 1))));
        assert!(matches!(swap_adjacent(c(1, 1), c(1, 2), &th), Err(Error::NotOutOfOrder { .. })));
    }

    #[test]
    fn products() {
        let s = Shape::new(2, 2).unwrap();
        let th = Threshold::top(s);
        let x11 = QmPoly::var(th, c(1, 1)).unwrap();
        let x22 = QmPoly::var(th, c(2, 2)).unwrap();
        let one = QmPoly::one(th);
        assert_eq!(qm_mul(&x11, &one).unwrap(), x11);
        let ordered = qm_mul(&x11, &x22).unwrap();
        assert_eq!(ordered, QmPoly::monomial(th, e(s, &[(1, 1), (2, 2)]), LaurentScalar::one()).unwrap());
        let swapped = qm_mul(&x22, &x11).unwrap();
        let expect = QmPoly::from_terms(
            th,
            [
                (e(s, &[(1, 1), (2, 2)]), LaurentScalar::one()),
                (e(s, &[(1, 2), (2, 1)]), -LaurentScalar::q_minus_q_inv()),
            ],
        )
        .unwrap();
        assert_eq!(swapped, expect);
    }

    #[test]
    fn threshold_mismatch_rejected() {
        let s = Shape::new(2, 2).unwrap();
        let a = QmPoly::var(Threshold::new(s, 3).unwrap(), c(1, 1)).unwrap();
        let b = QmPoly::var(Threshold::new(s, 4).unwrap(), c(1, 1)).unwrap();
        assert_eq!(a.mul(&b), Err(Error::ThresholdMismatch { left: 3, right: 4 }));
    }

    #[test]
    fn matrix_lex_examples() {
        let s = Shape::new(2, 2).unwrap();
        let e11 = e(s, &[(1, 1)]);
        let e12 = e(s, &[(1, 2)]);
        assert_eq!(matrix_lex_compare(&e11, &e11).unwrap(), (std::cmp::Ordering::Equal, None));
        assert_eq!(matrix_lex_compare(&e12, &e11).unwrap(), (std::cmp::Ordering::Less, Some(c(1, 1))));
        for a in s.coords() {
            for b in s.coords() {
                let (o, _) = matrix_lex_compare(&e(s, &[(a.row, a.col)]), &e(s, &[(b.row, b.col)])).unwrap();
                assert_eq!(o == std::cmp::Ordering::Less, a > b);
            }
        }
    }

    #[test]
    fn leading_terms() {
        let s = Shape::new(2, 2).unwrap();
        let th = Threshold::top(s);
        assert_eq!(QmPoly::zero(th).leading_term(), Err(Error::ZeroPolynomial));
        let det = QmPoly::from_terms(
            th,
            [
                (e(s, &[(1, 1), (2, 2)]), LaurentScalar::one()),
                (e(s, &[(1, 2), (2, 1)]), -LaurentScalar::q_power(1)),
            ],
        )
        .unwrap();
        assert_eq!(leading_term(&det).unwrap().0, e(s, &[(1, 1), (2, 2)]));
        let x = QmPoly::var(th, c(2, 1)).unwrap();
        assert_eq!(leading_term(&x).unwrap().0, e(s, &[(2, 1)]));
    }

    #[test]
    fn divisibility_and_grade() {
        let s = Shape::new(2, 2).unwrap();
        let d = e(s, &[(1, 1), (2, 2)]);
        assert!(term_divides(&ExponentMatrix::zero(s), &d));
        assert!(term_divides(&e(s, &[(1, 1)]), &d));
        assert!(!term_divides(&e(s, &[(1, 2)]), &d));
        let g = grade(&ExponentMatrix::zero(s)).unwrap();
        assert_eq!(g, GradeVector { rows: vec![0, 0], cols: vec![0, 0] });
        let g = grade(&d).unwrap();
        assert_eq!(g, GradeVector { rows: vec![1, 1], cols: vec![1, 1] });
        assert_eq!(grade(&e(s, &[(1, 2), (2, 1)])).unwrap(), g);
        let mut neg = d.clone();
        neg.set(c(2, 2), -1);
        assert!(grade(&neg).is_err());
    }

    #[test]
    fn localized_inverse_cancels() {
        let s = Shape::new(2, 2).unwrap();
        let th = Threshold::top(s);
        let x = QmPoly::var(th, c(2, 2)).unwrap().localize();
        let xi = LocalizedQmPoly::rs_inverse(th);
        assert_eq!(x.mul(&xi).unwrap(), LocalizedQmPoly::one(th));
        assert_eq!(xi.mul(&x).unwrap(), LocalizedQmPoly::one(th));
        let y = QmPoly::var(th, c(1, 1)).unwrap().localize();
        // x_22^{-1} x_11 x_22 = x_11 + (q - q^{-1}) q^2 x_12 x_21 x_22^{-1}
        let conj = xi.mul(&y).unwrap().mul(&x).unwrap();
        let mut corr = e(s, &[(1, 2), (2, 1)]);
        corr.set(c(2, 2), -1);
        let expect = LocalizedQmPoly::from_terms(
            th,
            [
                (e(s, &[(1, 1)]), LaurentScalar::one()),
                (corr, LaurentScalar::q_minus_q_inv().shift(2)),
            ],
        )
        .unwrap();
        assert_eq!(conj, expect);
        assert!(conj.to_qm().is_err());
        assert!(y.to_qm().is_ok());
    }

    #[test]
    fn rewriter_agrees_on_fixed_word() {
        let s = Shape::new(2, 2).unwrap();
        let th = Threshold::top(s);
        let w = [Letter::pos(c(2, 2)), Letter::pos(c(2, 1)), Letter::pos(c(1, 2)), Letter::pos(c(1, 1))];
        let mut st = Straightener::new(th);
        let engine = LocalizedQmPoly::from_terms(th, st.word(&w).unwrap()).unwrap();
        let rw = WordRewriter::new(th);
        assert_eq!(rw.normalize(&w, |_| 0).unwrap(), engine);
        assert_eq!(rw.normalize(&w, |k| k - 1).unwrap(), engine);
    }
}
