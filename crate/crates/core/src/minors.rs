//! Quantum minors, the evaluation map into the quantum torus, the
//! Lindström evaluation and the deleting/adding derivations maps.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::cauchon::{CauchonGraph, Diagram, GeneratorMatrix, PathSystem};
use crate::coeff::LaurentScalar;
use crate::error::{Error, Result};
use crate::straighten::{LocalizedQmPoly, QmPoly, Straightener, Terms, Threshold};
use crate::torus::{Coord, ExponentMatrix, Shape, TorusElement};

/// Row set `I` and column set `J` of a quantum minor `[I|J]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MinorSpec {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl MinorSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::SizeMismatch { rows: rows.len(), cols: cols.len() });
        }
        let ok = |s: &[usize]| !s.is_empty() && s[0] >= 1 && s.windows(2).all(|w| w[0] < w[1]);
        if !ok(&rows) || !ok(&cols) {
            return Err(Error::InvalidIndexSet);
        }
        Ok(Self { rows, cols })
    }

    /// The 1×1 minor `[i|j] = x_{i,j}`.
    pub fn single(c: Coord) -> Self {
        Self { rows: vec![c.row], cols: vec![c.col] }
    }

    /// Accepts `[1,2|1,3]` and the compact `[12|13]`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed minor {text:?}"));
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = s.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(bad)?;
        let (r, c) = inner.split_once('|').ok_or_else(bad)?;
        let side = |part: &str| -> Result<Vec<usize>> {
            if part.contains(',') {
                part.split(',').map(|x| x.parse::<usize>().map_err(|_| bad())).collect()
            } else {
                part.chars()
                    .map(|ch| ch.to_digit(10).map(|d| d as usize).ok_or_else(bad))
                    .collect()
            }
        };
        Self::new(side(r)?, side(c)?)
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    /// `(i_1,j_1), …, (i_k,j_k)`.
    pub fn diagonal(&self) -> Vec<Coord> {
        self.rows.iter().zip(&self.cols).map(|(&i, &j)| Coord::new(i, j)).collect()
    }

    /// `(i_k, j_k)`.
    pub fn max_coord(&self) -> Coord {
        Coord::new(*self.rows.last().expect("nonempty"), *self.cols.last().expect("nonempty"))
    }

    pub fn check_shape(&self, shape: Shape) -> Result<()> {
        shape.check(self.max_coord())
    }

    /// Minors on nonempty proper subsets of the diagonal pairs.
    pub fn proper_diagonal_subminors(&self) -> Vec<MinorSpec> {
        let k = self.size();
        (1..(1u32 << k) - 1)
            .map(|mask| {
                let pick = |s: &[usize]| (0..k).filter(|b| mask & (1 << b) != 0).map(|b| s[b]).collect();
                MinorSpec { rows: pick(&self.rows), cols: pick(&self.cols) }
            })
            .collect()
    }

    /// `(P_σ, (-q)^{ℓ(σ)})` for every permutation, identity first.
    pub fn permutation_terms(&self, shape: Shape) -> Result<Vec<(ExponentMatrix, LaurentScalar)>> {
        self.check_shape(shape)?;
        let k = self.size();
        let mut out = Vec::new();
        for perm in (0..k).permutations(k) {
            let inversions = (0..k)
                .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
                .filter(|&(a, b)| perm[a] > perm[b])
                .count() as i64;
            let items: Vec<(Coord, i64)> = (0..k)
                .map(|l| (Coord::new(self.rows[l], self.cols[perm[l]]), 1))
                .collect();
            let coeff = if inversions % 2 == 0 {
                LaurentScalar::q_power(inversions)
            } else {
                -LaurentScalar::q_power(inversions)
            };
            out.push((ExponentMatrix::from_sparse(shape, &items)?, coeff));
        }
        Ok(out)
    }
}

/// Every minor of `shape`, ordered by size, then rows, then columns.
pub fn all_minors(shape: Shape) -> Vec<MinorSpec> {
    let mut out = Vec::new();
    for k in 1..=shape.m.min(shape.n) {
        for rows in (1..=shape.m).combinations(k) {
            for cols in (1..=shape.n).combinations(k) {
                out.push(MinorSpec { rows: rows.clone(), cols });
            }
        }
    }
    out
}

impl fmt::Display for MinorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}|{}]", self.rows.iter().join(","), self.cols.iter().join(","))
    }
}

impl fmt::Debug for MinorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for MinorSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// `[I|J] = Σ_σ (-q)^{ℓ(σ)} x^{P_σ}` in `R^(t)`.
pub fn minor_poly(spec: &MinorSpec, th: &Threshold) -> Result<QmPoly> {
    QmPoly::from_terms(*th, spec.permutation_terms(th.shape)?)
}

/// A Cauchon diagram at a threshold, naming the prime `ker σ_B^(t)`.
#[derive(Clone, Debug)]
pub struct HPrimeHandle {
    graph: CauchonGraph,
    threshold: Threshold,
    gens: GeneratorMatrix,
}

impl HPrimeHandle {
    pub fn new(diagram: &Diagram, threshold: Threshold) -> Result<Self> {
        if diagram.shape() != threshold.shape {
            return Err(Error::ShapeMismatch { left: diagram.shape(), right: threshold.shape });
        }
        let graph = CauchonGraph::build(diagram)?;
        let gens = graph.generator_matrix(&threshold)?;
        Ok(Self { graph, threshold, gens })
    }

    /// `t = mn`.
    pub fn top(diagram: &Diagram) -> Result<Self> {
        Self::new(diagram, Threshold::top(diagram.shape()))
    }

    pub fn diagram(&self) -> &Diagram {
        self.graph.diagram()
    }

    pub fn graph(&self) -> &CauchonGraph {
        &self.graph
    }

    pub fn threshold(&self) -> &Threshold {
        &self.threshold
    }

    pub fn shape(&self) -> Shape {
        self.threshold.shape
    }

    /// The path sum `x_{i,j}^B`.
    pub fn generator(&self, c: Coord) -> &TorusElement {
        self.gens.get(c)
    }

    pub fn generators(&self) -> &GeneratorMatrix {
        &self.gens
    }

    fn check(&self, th: &Threshold) -> Result<()> {
        if th.shape != self.threshold.shape {
            return Err(Error::ShapeMismatch { left: self.threshold.shape, right: th.shape });
        }
        if th.t != self.threshold.t {
            return Err(Error::ThresholdMismatch { left: self.threshold.t, right: th.t });
        }
        Ok(())
    }

    fn monomial_image(&self, n: &ExponentMatrix) -> Result<TorusElement> {
        let shape = self.shape();
        let mut acc = TorusElement::one(shape);
        for (c, e) in n.support() {
            let base = if e < 0 { self.generator(c).inverse()? } else { self.generator(c).clone() };
            for _ in 0..e.unsigned_abs() {
                acc = acc.mul(&base)?;
                if acc.is_zero() {
                    return Ok(acc);
                }
            }
        }
        Ok(acc)
    }

    fn image(&self, terms: &Terms) -> Result<TorusElement> {
        let mut acc = TorusElement::zero(self.shape());
        for (n, c) in terms {
            acc = acc.add(&self.monomial_image(n)?.scale(c))?;
        }
        Ok(acc)
    }

    /// `σ_B^(t)(a)`.
    pub fn sigma(&self, a: &QmPoly) -> Result<TorusElement> {
        self.check(a.threshold())?;
        self.image(a.terms())
    }

    /// `σ_B^(t)` extended to the localization; needs the pivot generator to
    /// be a single torus monomial.
    pub fn sigma_localized(&self, a: &LocalizedQmPoly) -> Result<TorusElement> {
        self.check(a.threshold())?;
        self.image(a.terms())
    }

    /// `Σ_P w(P)` over vertex-disjoint systems; requires the maximum
    /// coordinate of `spec` to be at most `(r,s)`.
    pub fn lindstrom_eval(&self, spec: &MinorSpec) -> Result<TorusElement> {
        let mut acc = TorusElement::zero(self.shape());
        for sys in self.vdps(spec)? {
            acc = acc.add(&sys.weight(&self.graph)?)?;
        }
        Ok(acc)
    }

    fn hypothesis(&self, spec: &MinorSpec) -> Result<()> {
        spec.check_shape(self.shape())?;
        if spec.max_coord() > self.threshold.rs {
            return Err(Error::AboveThreshold { max: spec.max_coord(), rs: self.threshold.rs });
        }
        Ok(())
    }

    /// Vertex-disjoint systems for `spec`, under the same hypothesis as
    /// [`Self::lindstrom_eval`].
    pub fn vdps(&self, spec: &MinorSpec) -> Result<Vec<PathSystem>> {
        self.hypothesis(spec)?;
        self.graph.enumerate_vdps(&self.threshold, spec.rows(), spec.cols())
    }

    /// A minor with maximum coordinate at most `(r,s)` lies in the kernel
    /// iff it has no vertex-disjoint path system.
    pub fn minor_in_kernel(&self, spec: &MinorSpec) -> Result<bool> {
        self.hypothesis(spec)?;
        Ok(!self.graph.vdps_exists(&self.threshold, spec.rows(), spec.cols())?)
    }

    /// `σ(a) = 0`.
    pub fn kernel_member(&self, a: &QmPoly) -> Result<bool> {
        Ok(self.sigma(a)?.is_zero())
    }
}

pub fn sigma(h: &HPrimeHandle, a: &QmPoly) -> Result<TorusElement> {
    h.sigma(a)
}

pub fn lindstrom_eval(h: &HPrimeHandle, spec: &MinorSpec) -> Result<TorusElement> {
    h.lindstrom_eval(spec)
}

pub fn minor_in_kernel(h: &HPrimeHandle, spec: &MinorSpec) -> Result<bool> {
    h.minor_in_kernel(spec)
}

pub fn kernel_member(h: &HPrimeHandle, a: &QmPoly) -> Result<bool> {
    h.kernel_member(a)
}

/// Substitutes generator images into every monomial of `a` and
/// straightens in the target algebra.
fn substitute(
    a: &LocalizedQmPoly,
    target: &mut Straightener,
    image: &dyn Fn(Coord, &mut Straightener) -> Result<Terms>,
    inverse_image: &Terms,
) -> Result<LocalizedQmPoly> {
    let th = *target.threshold();
    let pivot = target.pivot();
    let shape = th.shape;
    let images: Vec<Terms> = shape.coords().map(|c| image(c, target)).collect::<Result<_>>()?;
    let mut out = LocalizedQmPoly::zero_at(th, pivot)?;
    for (n, coef) in a.terms() {
        let mut cur = Terms::new();
        cur.insert(ExponentMatrix::zero(shape), coef.clone());
        for (c, e) in n.support() {
            let factor = if e < 0 { inverse_image } else { &images[shape.index(c)] };
            for _ in 0..e.unsigned_abs() {
                cur = target.product(&cur, factor)?;
            }
        }
        out = out.add(&LocalizedQmPoly::from_terms_at(th, pivot, cur)?)?;
    }
    Ok(out)
}

fn pivot_inverse_terms(th: &Threshold, pivot: Coord) -> Terms {
    let mut n = ExponentMatrix::zero(th.shape);
    n.set(pivot, -1);
    let mut t = Terms::new();
    t.insert(n, LaurentScalar::one());
    t
}

fn check_input_pivot(a: &LocalizedQmPoly, rs: Coord) -> Result<()> {
    for n in a.terms().keys() {
        for (c, e) in n.support() {
            if e < 0 && c != rs {
                return Err(Error::NegativeExponent { coord: c, exponent: e });
            }
        }
    }
    Ok(())
}

/// Deleting derivations: `R^(t-1) → R^(t)[x_{r,s}^{-1}]` with `(r,s)` the
/// `t`-th coordinate, `y_{i,j} ↦ x_{i,j} − x_{i,s} x_{r,s}^{-1} x_{r,j}` for
/// `(i,j)` northwest of `(r,s)` and `y_{i,j} ↦ x_{i,j}` otherwise.
///
/// `a` lives at threshold `t-1`; a negative exponent is allowed at
/// `(r,s)`, read as `y_{r,s}^{-1}`.
pub fn dd_forward(a: &LocalizedQmPoly) -> Result<LocalizedQmPoly> {
    let src = *a.threshold();
    if src.t >= src.shape.size() {
        return Err(Error::InvalidThreshold { t: src.t + 1, max: src.shape.size() });
    }
    let th = Threshold::new(src.shape, src.t + 1)?;
    let rs = th.rs;
    check_input_pivot(a, rs)?;
    let mut st = Straightener::new(th);
    let inv = pivot_inverse_terms(&th, rs);
    let image = |c: Coord, st: &mut Straightener| -> Result<Terms> {
        let mut out = st.word(&[crate::straighten::Letter::pos(c)])?;
        if c.is_northwest_of(rs) {
            use crate::straighten::Letter;
            let corr = st.word(&[
                Letter::pos(Coord::new(c.row, rs.col)),
                Letter::inv(rs),
                Letter::pos(Coord::new(rs.row, c.col)),
            ])?;
            for (k, v) in corr {
                crate::straighten::add_term(&mut out, k, &-v);
            }
        }
        Ok(out)
    };
    substitute(a, &mut st, &image, &inv)
}

/// Adding derivations: `R^(t) → R^(t-1)[y_{r,s}^{-1}]`,
/// `x_{i,j} ↦ y_{i,j} + y_{i,s} y_{r,s}^{-1} y_{r,j}` for `(i,j)` northwest of
/// `(r,s)` and `x_{i,j} ↦ y_{i,j}` otherwise.
///
/// The result is localized at `(r,s)`, the successor of its own threshold
/// coordinate. A negative exponent at `(r,s)` in `a` is read as
/// `x_{r,s}^{-1}`.
pub fn dd_backward(a: &LocalizedQmPoly) -> Result<LocalizedQmPoly> {
    let src = *a.threshold();
    let th = src.previous()?;
    let rs = src.rs;
    check_input_pivot(a, rs)?;
    let mut st = Straightener::with_pivot(th, rs)?;
    let inv = pivot_inverse_terms(&th, rs);
    let image = |c: Coord, st: &mut Straightener| -> Result<Terms> {
        use crate::straighten::Letter;
        let mut out = st.word(&[Letter::pos(c)])?;
        if c.is_northwest_of(rs) {
            let corr = st.word(&[
                Letter::pos(Coord::new(c.row, rs.col)),
                Letter::inv(rs),
                Letter::pos(Coord::new(rs.row, c.col)),
            ])?;
            for (k, v) in corr {
                crate::straighten::add_term(&mut out, k, &v);
            }
        }
        Ok(out)
    };
    substitute(a, &mut st, &image, &inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: usize, j: usize) -> Coord {
        Coord::new(i, j)
    }

    #[test]
    fn parse_forms() {
        let a = MinorSpec::parse("[1,2|1,3]").unwrap();
        let b = MinorSpec::parse("[12|13]").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "[1,2|1,3]");
        assert_eq!(a.max_coord(), c(2, 3));
        assert!(MinorSpec::parse("[1,2|1]").is_err());
        assert!(MinorSpec::parse("[2,1|1,2]").is_err());
        assert!(MinorSpec::parse("1,2|1,2").is_err());
    }

    #[test]
    fn two_by_two_expansion() {
        let s = Shape::new(2, 2).unwrap();
        let th = Threshold::top(s);
        let p = minor_poly(&MinorSpec::parse("[1,2|1,2]").unwrap(), &th).unwrap();
        let d = ExponentMatrix::from_sparse(s, &[(c(1, 1), 1), (c(2, 2), 1)]).unwrap();
        let a = ExponentMatrix::from_sparse(s, &[(c(1, 2), 1), (c(2, 1), 1)]).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.coeff(&d).is_one());
        assert_eq!(p.coeff(&a), -LaurentScalar::q_power(1));
        let one = minor_poly(&MinorSpec::single(c(1, 1)), &th).unwrap();
        assert_eq!(one, QmPoly::var(th, c(1, 1)).unwrap());
    }

    #[test]
    fn subminors() {
        let m = MinorSpec::parse("[1,2,3|1,2,4]").unwrap();
        let subs = m.proper_diagonal_subminors();
        assert_eq!(subs.len(), 6);
        assert!(subs.contains(&MinorSpec::parse("[1,3|1,4]").unwrap()));
    }

    #[test]
    fn dd_on_generators_2x2() {
        let s = Shape::new(2, 2).unwrap();
        let t3 = Threshold::new(s, 3).unwrap();
        let t4 = Threshold::top(s);
        let y11 = QmPoly::var(t3, c(1, 1)).unwrap().localize();
        let fwd = dd_forward(&y11).unwrap();
        let mut st = Straightener::new(t4);
        use crate::straighten::Letter;
        let corr = st.word(&[Letter::pos(c(1, 2)), Letter::inv(c(2, 2)), Letter::pos(c(2, 1))]).unwrap();
        let expect = LocalizedQmPoly::var(t4, c(1, 1))
            .unwrap()
            .sub(&LocalizedQmPoly::from_terms(t4, corr).unwrap())
            .unwrap();
        assert_eq!(fwd, expect);
        let y12 = QmPoly::var(t3, c(1, 2)).unwrap().localize();
        assert_eq!(dd_forward(&y12).unwrap(), LocalizedQmPoly::var(t4, c(1, 2)).unwrap());
        let back = dd_backward(&fwd).unwrap();
        assert_eq!(back, y11.to_qm().unwrap().localize_at(c(2, 2)).unwrap());
        let x22 = QmPoly::var(t4, c(2, 2)).unwrap().localize();
        let b22 = dd_backward(&x22).unwrap();
        assert_eq!(b22.to_qm().unwrap(), QmPoly::var(t3, c(2, 2)).unwrap());
    }

    #[test]
    fn sigma_of_deleted_generator_is_zero() {
        let s = Shape::new(2, 2).unwrap();
        let d = Diagram::new(s, [c(1, 2), c(2, 2)]).unwrap();
        let h = HPrimeHandle::new(&d, Threshold::new(s, 3).unwrap()).unwrap();
        let x = QmPoly::var(*h.threshold(), c(2, 2)).unwrap();
        assert!(h.kernel_member(&x).unwrap());
        assert!(!h.kernel_member(&QmPoly::one(*h.threshold())).unwrap());
        assert!(h.kernel_member(&QmPoly::zero(*h.threshold())).unwrap());
        assert!(matches!(
            h.lindstrom_eval(&MinorSpec::single(c(2, 2))),
            Err(Error::AboveThreshold { .. })
        ));
    }
}
