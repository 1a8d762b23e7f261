//! Exhaustive and randomized verification suites.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cauchon::{enumerate_cauchon_diagrams, Diagram};
use crate::error::Result;
use crate::groebner::{groebner_check, groebner_check_with_basis, random_coeff, random_monomial, GroebnerBasis};
use crate::minors::{all_minors, dd_backward, dd_forward, minor_poly, HPrimeHandle};
use crate::straighten::{QmPoly, Straightener, Threshold};
use crate::torus::{Coord, Shape};
use crate::SCHEMA_VERSION;

/// Outcome of one suite: how many individual checks ran and which failed.
#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    fn merge(mut self, other: SuiteReport) -> Self {
        self.checks += other.checks;
        self.failures.extend(other.failures);
        self
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "suite": self.name,
            "checks": self.checks,
            "failures": self.failures,
        })
    }
}

/// Shapes `a × b` with `2 ≤ a ≤ m`, `2 ≤ b ≤ n`.
pub fn shapes_up_to(m: usize, n: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    for a in 2..=m {
        for b in 2..=n {
            out.extend(Shape::new(a, b));
        }
    }
    out
}

fn all_handles(shape: Shape) -> Vec<(Diagram, usize)> {
    let mut out = Vec::new();
    for d in enumerate_cauchon_diagrams(shape) {
        for t in 1..=shape.size() {
            out.push((d.clone(), t));
        }
    }
    out
}

fn per_handle<F>(name: &str, shapes: &[Shape], f: F) -> Result<SuiteReport>
where
    F: Fn(&HPrimeHandle, &mut SuiteReport) -> Result<()> + Sync,
{
    let jobs: Vec<(Diagram, usize)> = shapes.iter().flat_map(|&s| all_handles(s)).collect();
    let parts: Vec<SuiteReport> = jobs
        .par_iter()
        .map(|(d, t)| -> Result<SuiteReport> {
            let h = HPrimeHandle::new(d, Threshold::new(d.shape(), *t)?)?;
            let mut r = SuiteReport::new(name);
            f(&h, &mut r)?;
            Ok(r)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(SuiteReport::new(name), SuiteReport::merge))
}

/// `σ(x_b x_a) = σ(x_b) σ(x_a)` for every ordered pair `a < b`, which
/// checks that the generator images satisfy the defining relations of
/// `R^(t)`.
pub fn relations_suite(shapes: &[Shape]) -> Result<SuiteReport> {
    per_handle("relations", shapes, |h, r| {
        let th = *h.threshold();
        let mut st = Straightener::new(th);
        let coords: Vec<Coord> = th.shape.coords().collect();
        for (i, &a) in coords.iter().enumerate() {
            for &b in &coords[i + 1..] {
                let lhs = h.sigma(&st.mul(&QmPoly::var(th, b)?, &QmPoly::var(th, a)?)?)?;
                let rhs = h.generator(b).mul(h.generator(a))?;
                r.check(lhs.equals(&rhs)?, || {
                    format!("{} t={} x{b} x{a}: {lhs} != {rhs}", h.diagram().to_inline(), th.t)
                });
            }
        }
        Ok(())
    })
}

/// Path-system evaluation against `σ` of the expanded minor, for every
/// minor with maximum coordinate at most `(r,s)`.
pub fn lindstrom_suite(shapes: &[Shape]) -> Result<SuiteReport> {
    per_handle("lindstrom", shapes, |h, r| {
        let th = *h.threshold();
        for spec in all_minors(th.shape) {
            if spec.max_coord() > th.rs {
                continue;
            }
            let paths = h.lindstrom_eval(&spec)?;
            let direct = h.sigma(&minor_poly(&spec, &th)?)?;
            r.check(paths.equals(&direct)?, || {
                format!("{} t={} {spec}: {paths} != {direct}", h.diagram().to_inline(), th.t)
            });
            let empty = !h.graph().vdps_exists(&th, spec.rows(), spec.cols())?;
            r.check(direct.is_zero() == empty, || {
                format!("{} t={} {spec}: vanishing disagrees with path systems", h.diagram().to_inline(), th.t)
            });
        }
        Ok(())
    })
}

/// Generators at `t` against those at `t-1`: when `(r,s)` is white,
/// `x^(t)_{i,j} = x^(t-1)_{i,j} + x^(t-1)_{i,s} (x^(t-1)_{r,s})^{-1} x^(t-1)_{r,j}`
/// for `(i,j)` northwest of `(r,s)`; all other generators agree.
pub fn path_identity_suite(shapes: &[Shape]) -> Result<SuiteReport> {
    per_handle("path_identity", shapes, |h, r| {
        let th = *h.threshold();
        if th.t == 1 {
            return Ok(());
        }
        let lower = HPrimeHandle::new(h.diagram(), th.previous()?)?;
        let rs = th.rs;
        let white = h.diagram().is_white(rs);
        for c in th.shape.coords() {
            let expected = if white && c.is_northwest_of(rs) {
                let corr = lower
                    .generator(Coord::new(c.row, rs.col))
                    .mul(&lower.generator(rs).inverse()?)?
                    .mul(lower.generator(Coord::new(rs.row, c.col)))?;
                lower.generator(c).add(&corr)?
            } else {
                lower.generator(c).clone()
            };
            let got = h.generator(c);
            r.check(got.equals(&expected)?, || {
                format!("{} t={} {c}: {got} != {expected}", h.diagram().to_inline(), th.t)
            });
        }
        Ok(())
    })
}

/// A random polynomial with up to `terms` terms of degree at most `deg`.
pub fn random_poly(th: Threshold, terms: usize, deg: i64, rng: &mut impl Rng) -> Result<QmPoly> {
    let mut map = BTreeMap::new();
    for _ in 0..rng.gen_range(1..=terms) {
        let d = rng.gen_range(0..=deg);
        map.insert(random_monomial(th.shape, d, rng), random_coeff(rng));
    }
    QmPoly::from_terms(th, map)
}

/// The deleting and adding derivation maps undo each other on seeded
/// random elements, in both directions, for every `t ≥ 2`.
pub fn ddalg_suite(shapes: &[Shape], samples: usize, seed: u64) -> Result<SuiteReport> {
    let jobs: Vec<(Shape, usize)> = shapes.iter().flat_map(|&s| (0..samples).map(move |i| (s, i))).collect();
    let parts: Vec<SuiteReport> = jobs
        .par_iter()
        .map(|&(shape, idx)| -> Result<SuiteReport> {
            let mut r = SuiteReport::new("ddalg");
            let mut rng = crate::groebner::sample_rng(seed, shape.size() as u64, idx);
            let t = rng.gen_range(2..=shape.size());
            let upper = Threshold::new(shape, t)?;
            let lower = upper.previous()?;
            let a = random_poly(lower, 3, 3, &mut rng)?;
            let there = dd_forward(&a.localize())?;
            let back = dd_backward(&there)?;
            let expect = a.localize_at(upper.rs)?;
            r.check(back == expect, || format!("{shape} t={t} backward(forward({a})) = {back}"));
            let b = random_poly(upper, 3, 3, &mut rng)?;
            let down = dd_backward(&b.localize())?;
            let up = dd_forward(&down)?;
            r.check(up == b.localize(), || format!("{shape} t={t} forward(backward({b})) = {up}"));
            Ok(r)
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(SuiteReport::new("ddalg"), SuiteReport::merge))
}

/// Runs the Gröbner check for each diagram at `t = mn`.
pub fn groebner_suite(diagrams: &[Diagram], samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("groebner");
    for d in diagrams {
        let h = HPrimeHandle::top(d)?;
        let rep = groebner_check(&h, samples, seed)?;
        report.check(rep.passed(), || format!("{}: {:?}", d.to_inline(), rep.failures));
    }
    Ok(report)
}

/// Drops each member of the minimal basis in turn; every weakened basis
/// must fail the check.
pub fn mutation_suite(diagram: &Diagram, samples: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("mutation");
    let h = HPrimeHandle::top(diagram)?;
    let basis = GroebnerBasis::minimal(&h)?;
    for i in 0..basis.len() {
        let rep = groebner_check_with_basis(&h, &basis.without(i), samples, seed)?;
        report.check(!rep.passed(), || {
            format!("{}: removing {} went unnoticed", diagram.to_inline(), basis.members()[i])
        });
    }
    Ok(report)
}
