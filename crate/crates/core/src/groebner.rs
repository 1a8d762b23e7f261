//! Right-sided reduction and the quantum-minor Gröbner bases of the
//! torus-invariant primes `ker σ_B^(t)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::coeff::LaurentScalar;
use crate::error::{Error, Result};
use crate::minors::{all_minors, dd_forward, minor_poly, HPrimeHandle, MinorSpec};
use crate::straighten::{grade, term_divides, GradeVector, QmPoly, Straightener, Threshold};
use crate::torus::{Coord, ExponentMatrix, Shape};
use crate::SCHEMA_VERSION;

/// An element of `G_t`: a quantum minor, or a bare generator `x_{i,j}`
/// with `(i,j) > (r,s)` and `(i,j)` black.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisMember {
    Minor(MinorSpec),
    Generator(Coord),
}

impl BasisMember {
    pub fn poly(&self, th: &Threshold) -> Result<QmPoly> {
        match self {
            BasisMember::Minor(m) => minor_poly(m, th),
            BasisMember::Generator(c) => QmPoly::var(*th, *c),
        }
    }
}

impl fmt::Display for BasisMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisMember::Minor(m) => write!(f, "{m}"),
            BasisMember::Generator(c) => write!(f, "x_{{{},{}}}", c.row, c.col),
        }
    }
}

impl fmt::Debug for BasisMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `G_t`: kernel minors with maximum coordinate at most `(r,s)`, followed by
/// the black generators beyond `(r,s)`.
pub fn hprime_minors(h: &HPrimeHandle) -> Result<Vec<BasisMember>> {
    let th = h.threshold();
    let mut out = Vec::new();
    for spec in all_minors(h.shape()) {
        if spec.max_coord() <= th.rs && h.minor_in_kernel(&spec)? {
            out.push(BasisMember::Minor(spec));
        }
    }
    for c in h.shape().coords().filter(|&c| c > th.rs && h.diagram().is_black(c)) {
        out.push(BasisMember::Generator(c));
    }
    Ok(out)
}

/// Kernel minors none of whose proper diagonal subminors lie in the kernel.
/// Only defined at `t = mn`.
pub fn minimal_groebner(h: &HPrimeHandle) -> Result<Vec<MinorSpec>> {
    let th = h.threshold();
    if !th.is_top() {
        return Err(Error::NotTopThreshold { t: th.t, mn: th.shape.size() });
    }
    let mut out = Vec::new();
    for member in hprime_minors(h)? {
        let BasisMember::Minor(spec) = member else { continue };
        let mut minimal = true;
        for sub in spec.proper_diagonal_subminors() {
            if h.minor_in_kernel(&sub)? {
                minimal = false;
                break;
            }
        }
        if minimal {
            out.push(spec);
        }
    }
    Ok(out)
}

/// A list of monic polynomials with cached leading terms.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    threshold: Threshold,
    members: Vec<BasisMember>,
    polys: Vec<QmPoly>,
    leading: Vec<ExponentMatrix>,
}

/// One top-reduction `a ← a − c · g_i · x^{shift}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub member: usize,
    pub shift: ExponentMatrix,
    pub coeff: LaurentScalar,
    pub leading_before: ExponentMatrix,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub remainder: QmPoly,
    pub trace: Vec<ReductionStep>,
}

impl GroebnerBasis {
    pub fn from_members(th: Threshold, members: Vec<BasisMember>) -> Result<Self> {
        let mut polys = Vec::with_capacity(members.len());
        let mut leading = Vec::with_capacity(members.len());
        for m in &members {
            let p = m.poly(&th)?;
            let (lt, lc) = p.leading_term()?;
            let inv = lc.inverse().ok_or(Error::NotInvertible)?;
            let lt = lt.clone();
            polys.push(p.scale(&inv));
            leading.push(lt);
        }
        Ok(Self { threshold: th, members, polys, leading })
    }

    /// The full `G_t`.
    pub fn hprime(h: &HPrimeHandle) -> Result<Self> {
        Self::from_members(*h.threshold(), hprime_minors(h)?)
    }

    /// The minimal basis at `t = mn`.
    pub fn minimal(h: &HPrimeHandle) -> Result<Self> {
        let members = minimal_groebner(h)?.into_iter().map(BasisMember::Minor).collect();
        Self::from_members(*h.threshold(), members)
    }

    /// The basis used by [`groebner_check`]: minimal at `t = mn`, `G_t`
    /// otherwise.
    pub fn preferred(h: &HPrimeHandle) -> Result<Self> {
        if h.threshold().is_top() {
            Self::minimal(h)
        } else {
            Self::hprime(h)
        }
    }

    /// Copy with member `idx` removed.
    pub fn without(&self, idx: usize) -> Self {
        let mut out = self.clone();
        out.members.remove(idx);
        out.polys.remove(idx);
        out.leading.remove(idx);
        out
    }

    pub fn threshold(&self) -> &Threshold {
        &self.threshold
    }

    pub fn members(&self) -> &[BasisMember] {
        &self.members
    }

    pub fn polys(&self) -> &[QmPoly] {
        &self.polys
    }

    pub fn leading_terms(&self) -> &[ExponentMatrix] {
        &self.leading
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// First member whose leading term divides `n`.
    pub fn divisor_of(&self, n: &ExponentMatrix) -> Option<usize> {
        self.leading.iter().position(|l| term_divides(l, n))
    }

    pub fn reduce(&self, a: &QmPoly) -> Result<Reduction> {
        self.reduce_with(a, &mut Straightener::new(self.threshold))
    }

    /// Top-reduces `a` until its leading term has no divisor.
    pub fn reduce_with(&self, a: &QmPoly, st: &mut Straightener) -> Result<Reduction> {
        if a.threshold() != &self.threshold {
            return Err(Error::ThresholdMismatch { left: self.threshold.t, right: a.threshold().t });
        }
        let cap = iteration_cap(a)?;
        let mut cur = a.clone();
        let mut trace = Vec::new();
        while let Ok((lt, lc)) = cur.leading_term() {
            let Some(i) = self.divisor_of(lt) else { break };
            if trace.len() >= cap {
                return Err(Error::IterationCap(cap));
            }
            let shift = lt.checked_sub(&self.leading[i])?;
            let lt = lt.clone();
            let lc = lc.clone();
            let shifted = QmPoly::monomial(self.threshold, shift.clone(), LaurentScalar::one())?;
            let prod = st.mul(&self.polys[i], &shifted)?;
            let head = prod.coeff(&lt);
            let coeff = &lc * &head.inverse().ok_or(Error::NotInvertible)?;
            cur = cur.sub(&prod.scale(&coeff))?;
            trace.push(ReductionStep { member: i, shift, coeff, leading_before: lt });
        }
        Ok(Reduction { remainder: cur, trace })
    }
}

/// Number of nonnegative integer matrices with the given margins.
pub fn contingency_count(g: &GradeVector) -> u128 {
    fn go(rows: &[u64], cols: &mut Vec<u64>, memo: &mut HashMap<(usize, Vec<u64>), u128>) -> u128 {
        if rows.is_empty() {
            return u128::from(cols.iter().all(|&c| c == 0));
        }
        let key = (rows.len(), cols.clone());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut total = 0u128;
        fill(rows, 0, rows[0], cols, memo, &mut total);
        memo.insert(key, total);
        total
    }
    fn fill(
        rows: &[u64],
        j: usize,
        left: u64,
        cols: &mut Vec<u64>,
        memo: &mut HashMap<(usize, Vec<u64>), u128>,
        total: &mut u128,
    ) {
        if j + 1 == cols.len() {
            if left <= cols[j] {
                cols[j] -= left;
                *total += go(&rows[1..], cols, memo);
                cols[j] += left;
            }
            return;
        }
        for v in 0..=left.min(cols[j]) {
            cols[j] -= v;
            fill(rows, j + 1, left - v, cols, memo, total);
            cols[j] += v;
        }
    }
    if g.rows.iter().sum::<u64>() != g.cols.iter().sum::<u64>() {
        return 0;
    }
    go(&g.rows, &mut g.cols.clone(), &mut HashMap::new())
}

// Leading terms strictly decrease and stay inside the grades already present.
fn iteration_cap(a: &QmPoly) -> Result<usize> {
    let mut grades = std::collections::BTreeSet::new();
    for n in a.terms().keys() {
        grades.insert(grade(n)?);
    }
    let total: u128 = grades.iter().map(contingency_count).sum();
    Ok(usize::try_from(total).unwrap_or(usize::MAX))
}

/// One finding of [`groebner_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub sample: usize,
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub diagram: String,
    pub t: usize,
    pub basis: Vec<String>,
    pub kernel_samples: usize,
    pub nonkernel_samples: usize,
    pub failures: Vec<CheckFailure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "diagram": self.diagram,
            "t": self.t,
            "basis": self.basis,
            "samples": {"kernel": self.kernel_samples, "nonkernel": self.nonkernel_samples},
            "failures": self.failures.iter().map(|f| json!({
                "sample": f.sample, "kind": f.kind, "detail": f.detail,
            })).collect::<Vec<_>>(),
        })
    }
}

const MAX_MULTIPLIER_DEGREE: i64 = 4;

pub(crate) fn sample_rng(seed: u64, stream: u64, idx: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos((idx as u128) << 20);
    rng
}

/// A coefficient from `{±1, ±q, ±q^{-1}, q − q^{-1}}`.
pub fn random_coeff(rng: &mut impl Rng) -> LaurentScalar {
    match rng.gen_range(0..7) {
        0 => LaurentScalar::one(),
        1 => -LaurentScalar::one(),
        2 => LaurentScalar::q_power(1),
        3 => -LaurentScalar::q_power(1),
        4 => LaurentScalar::q_power(-1),
        5 => -LaurentScalar::q_power(-1),
        _ => LaurentScalar::q_minus_q_inv(),
    }
}

/// A random nonnegative monomial of total degree exactly `deg`.
pub fn random_monomial(shape: Shape, deg: i64, rng: &mut impl Rng) -> ExponentMatrix {
    let mut n = ExponentMatrix::zero(shape);
    for _ in 0..deg {
        let c = shape.coord_at(rng.gen_range(0..shape.size()));
        n.set(c, n.get(c) + 1);
    }
    n
}

// Σ c · x^{K1} g x^{K2} over one or two kernel generators.
fn kernel_combination(
    gens: &[QmPoly],
    th: Threshold,
    st: &mut Straightener,
    rng: &mut impl Rng,
) -> Result<QmPoly> {
    let mut acc = QmPoly::zero(th);
    for _ in 0..rng.gen_range(1..=2) {
        let g = &gens[rng.gen_range(0..gens.len())];
        let total = rng.gen_range(0..=MAX_MULTIPLIER_DEGREE);
        let left = rng.gen_range(0..=total);
        let k1 = QmPoly::monomial(th, random_monomial(th.shape, left, rng), LaurentScalar::one())?;
        let k2 = QmPoly::monomial(th, random_monomial(th.shape, total - left, rng), random_coeff(rng))?;
        let left = st.mul(&k1, g)?;
        let term = st.mul(&left, &k2)?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Kernel generators `G_t` as polynomials.
fn kernel_generators(h: &HPrimeHandle) -> Result<Vec<QmPoly>> {
    hprime_minors(h)?.iter().map(|m| m.poly(h.threshold())).collect()
}

/// Generates the `idx`-th kernel sample: the bare generators come first,
/// then random two-sided combinations, and at `t < mn` every third sample
/// is the image of a kernel element one level down.
fn kernel_sample(
    h: &HPrimeHandle,
    lower: Option<&(HPrimeHandle, Vec<QmPoly>)>,
    gens: &[QmPoly],
    st: &mut Straightener,
    seed: u64,
    idx: usize,
) -> Result<QmPoly> {
    let th = *h.threshold();
    if idx < gens.len() {
        return Ok(gens[idx].clone());
    }
    let mut rng = sample_rng(seed, 1, idx);
    if let Some((lh, lgens)) = lower {
        if idx % 3 == 2 && !lgens.is_empty() && h.diagram().is_white(th.rs) {
            let mut lst = Straightener::new(*lh.threshold());
            let b = kernel_combination(lgens, *lh.threshold(), &mut lst, &mut rng)?;
            return lift_from_previous(h, &b);
        }
    }
    if gens.is_empty() {
        return Ok(QmPoly::zero(th));
    }
    kernel_combination(gens, th, st, &mut rng)
}

/// Moves an element of level `t-1` to level `t` through the deleting
/// derivations map, clearing the `x_{r,s}^{-1}` denominators on the right.
/// When `(r,s)` is black the lexicographic expression is relabelled.
pub fn lift_from_previous(h: &HPrimeHandle, b: &QmPoly) -> Result<QmPoly> {
    let th = *h.threshold();
    if h.diagram().is_black(th.rs) {
        return QmPoly::from_terms(th, b.terms().clone());
    }
    let f = dd_forward(&b.localize())?;
    let depth = f.terms().keys().map(|n| -n.get(th.rs)).max().unwrap_or(0).max(0);
    let mut clear = ExponentMatrix::zero(th.shape);
    clear.set(th.rs, depth);
    let right = crate::straighten::LocalizedQmPoly::monomial(th, clear, LaurentScalar::one())?;
    let mut lst = Straightener::new(th);
    lst.mul_localized(&f, &right)?.to_qm()
}

fn nonkernel_sample(h: &HPrimeHandle, seed: u64, idx: usize) -> Result<QmPoly> {
    let th = *h.threshold();
    let mut rng = sample_rng(seed, 2, idx);
    for _ in 0..64 {
        let mut terms = BTreeMap::new();
        for _ in 0..rng.gen_range(1..=3) {
            let deg = rng.gen_range(0..=MAX_MULTIPLIER_DEGREE);
            terms.insert(random_monomial(th.shape, deg, &mut rng), random_coeff(&mut rng));
        }
        let a = QmPoly::from_terms(th, terms)?;
        if !a.is_zero() && !h.kernel_member(&a)? {
            return Ok(a);
        }
    }
    // Constants never lie in a proper ideal.
    QmPoly::monomial(th, ExponentMatrix::zero(th.shape), random_coeff(&mut rng))
}

/// Checks a basis against seeded kernel and non-kernel samples.
pub fn groebner_check_with_basis(
    h: &HPrimeHandle,
    basis: &GroebnerBasis,
    samples: usize,
    seed: u64,
) -> Result<CheckReport> {
    let th = *h.threshold();
    let gens = kernel_generators(h)?;
    let lower = if th.t > 1 {
        let lh = HPrimeHandle::new(h.diagram(), th.previous()?)?;
        let lg = kernel_generators(&lh)?;
        Some((lh, lg))
    } else {
        None
    };
    let kernel: Vec<Vec<CheckFailure>> = (0..samples)
        .into_par_iter()
        .map_init(
            || Straightener::new(th),
            |st, idx| -> Result<Vec<CheckFailure>> {
                let a = kernel_sample(h, lower.as_ref(), &gens, st, seed, idx)?;
                check_kernel_sample(h, basis, &a, st, idx)
            },
        )
        .collect::<Result<_>>()?;
    let nonkernel: Vec<Vec<CheckFailure>> = (0..samples)
        .into_par_iter()
        .map_init(
            || Straightener::new(th),
            |st, idx| -> Result<Vec<CheckFailure>> {
                let a = nonkernel_sample(h, seed, idx)?;
                let red = basis.reduce_with(&a, st)?;
                Ok(if red.remainder.is_zero() {
                    vec![CheckFailure {
                        sample: idx,
                        kind: "nonkernel_reduced_to_zero".into(),
                        detail: a.to_string(),
                    }]
                } else {
                    Vec::new()
                })
            },
        )
        .collect::<Result<_>>()?;
    Ok(CheckReport {
        diagram: h.diagram().to_inline(),
        t: th.t,
        basis: basis.members().iter().map(|m| m.to_string()).collect(),
        kernel_samples: samples,
        nonkernel_samples: samples,
        failures: kernel.into_iter().chain(nonkernel).flatten().collect(),
    })
}

fn check_kernel_sample(
    h: &HPrimeHandle,
    basis: &GroebnerBasis,
    a: &QmPoly,
    st: &mut Straightener,
    idx: usize,
) -> Result<Vec<CheckFailure>> {
    let mut out = Vec::new();
    let fail = |kind: &str, detail: String| CheckFailure { sample: idx, kind: kind.into(), detail };
    if !h.kernel_member(a)? {
        out.push(fail("sample_not_in_kernel", a.to_string()));
        return Ok(out);
    }
    if a.is_zero() {
        return Ok(out);
    }
    let (lt, _) = a.leading_term()?;
    if basis.divisor_of(lt).is_none() {
        out.push(fail("leading_term_not_divisible", format!("{a}; leading monomial {}", lt.monomial_string("x"))));
    }
    let red = basis.reduce_with(a, st)?;
    if !red.remainder.is_zero() {
        out.push(fail("nonzero_remainder", format!("{a} -> {}", red.remainder)));
    }
    Ok(out)
}

/// Checks the preferred basis of `h` (minimal at `t = mn`).
pub fn groebner_check(h: &HPrimeHandle, samples: usize, seed: u64) -> Result<CheckReport> {
    let basis = GroebnerBasis::preferred(h)?;
    groebner_check_with_basis(h, &basis, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cauchon::Diagram;

    #[test]
    fn contingency_counts() {
        let g = GradeVector { rows: vec![1, 1], cols: vec![1, 1] };
        assert_eq!(contingency_count(&g), 2);
        let g = GradeVector { rows: vec![2, 1], cols: vec![1, 1, 1] };
        assert_eq!(contingency_count(&g), 3);
        let g = GradeVector { rows: vec![0, 0], cols: vec![0, 0] };
        assert_eq!(contingency_count(&g), 1);
    }

    #[test]
    fn all_white_has_empty_basis() {
        let s = Shape::new(2, 2).unwrap();
        let h = HPrimeHandle::top(&Diagram::all_white(s)).unwrap();
        assert!(hprime_minors(&h).unwrap().is_empty());
        assert!(minimal_groebner(&h).unwrap().is_empty());
        let r = groebner_check(&h, 10, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn all_black_is_generators() {
        let s = Shape::new(2, 2).unwrap();
        let h = HPrimeHandle::top(&Diagram::all_black(s)).unwrap();
        let m: Vec<String> = minimal_groebner(&h).unwrap().iter().map(|m| m.to_string()).collect();
        assert_eq!(m, vec!["[1|1]", "[1|2]", "[2|1]", "[2|2]"]);
    }

    #[test]
    fn reduce_basics() {
        let s = Shape::new(2, 2).unwrap();
        let d = Diagram::new(s, [Coord::new(1, 1)]).unwrap();
        let h = HPrimeHandle::top(&d).unwrap();
        let g = GroebnerBasis::hprime(&h).unwrap();
        assert!(!g.is_empty());
        for p in g.polys() {
            assert!(g.reduce(p).unwrap().remainder.is_zero());
        }
        assert!(g.reduce(&QmPoly::zero(*h.threshold())).unwrap().remainder.is_zero());
    }

    #[test]
    fn minimal_requires_top() {
        let s = Shape::new(2, 2).unwrap();
        let h = HPrimeHandle::new(&Diagram::all_white(s), Threshold::new(s, 2).unwrap()).unwrap();
        assert_eq!(minimal_groebner(&h), Err(Error::NotTopThreshold { t: 2, mn: 4 }));
    }
}
