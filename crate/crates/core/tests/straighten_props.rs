mod common;

use common::*;
use proptest::prelude::*;
use qmpath::minors::HPrimeHandle;
use qmpath::straighten::{grade, qm_mul, Letter, WordRewriter};
use qmpath::{Diagram, Error, ExponentMatrix, LaurentScalar, QmPoly, Shape, Straightener, Threshold};

fn threshold() -> impl Strategy<Value = Threshold> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 2)), Just((3, 3))]
        .prop_flat_map(|(m, n)| (Just(Shape::new(m, n).unwrap()), 1..=m * n))
        .prop_map(|(s, t)| Threshold::new(s, t).unwrap())
}

fn monomial(th: Threshold, max: i64) -> impl Strategy<Value = QmPoly> {
    prop::collection::vec(0..=max, th.shape.size()).prop_map(move |v| {
        QmPoly::monomial(th, ExponentMatrix::from_entries(th.shape, v).unwrap(), LaurentScalar::one()).unwrap()
    })
}

fn poly(th: Threshold) -> impl Strategy<Value = QmPoly> {
    prop::collection::vec((prop::collection::vec(0i64..=1, th.shape.size()), -2i64..=2), 1..=3).prop_map(
        move |terms| {
            QmPoly::from_terms(
                th,
                terms.into_iter().map(|(v, e)| (ExponentMatrix::from_entries(th.shape, v).unwrap(), q(e))),
            )
            .unwrap()
        },
    )
}

#[test]
fn relations_on_generators() {
    let s = Shape::new(2, 2).unwrap();
    let lambda = LaurentScalar::q_minus_q_inv();
    for t in 1..=4 {
        let th = Threshold::new(s, t).unwrap();
        let x = |i, j| QmPoly::var(th, c(i, j)).unwrap();
        let mut st = Straightener::new(th);
        let d = st.mul(&x(2, 2), &x(1, 1)).unwrap();
        let mut want = st.mul(&x(1, 1), &x(2, 2)).unwrap();
        if t == 4 {
            want = want.sub(&st.mul(&x(1, 2), &x(2, 1)).unwrap().scale(&lambda)).unwrap();
        }
        assert_eq!(d, want, "t={t}");
        assert_eq!(st.mul(&x(1, 2), &x(1, 1)).unwrap(), st.mul(&x(1, 1), &x(1, 2)).unwrap().scale(&q(-1)));
        assert_eq!(st.mul(&x(2, 1), &x(1, 2)).unwrap(), st.mul(&x(1, 2), &x(2, 1)).unwrap());
    }
}

#[test]
fn thresholds_do_not_mix() {
    let s = Shape::new(2, 2).unwrap();
    let a = QmPoly::var(Threshold::new(s, 1).unwrap(), c(1, 1)).unwrap();
    let b = QmPoly::var(Threshold::new(s, 2).unwrap(), c(1, 1)).unwrap();
    assert!(matches!(qm_mul(&a, &b), Err(Error::ThresholdMismatch { .. })));
    assert!(a.add(&b).is_err());
}

/// With no black squares the path model is an embedding, so straightening
/// must agree with multiplication in the torus.
#[test]
fn generators_embed_for_empty_diagram() {
    for (m, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let s = Shape::new(m, n).unwrap();
        for t in 1..=s.size() {
            let h = HPrimeHandle::new(&Diagram::all_white(s), Threshold::new(s, t).unwrap()).unwrap();
            let th = *h.threshold();
            let mut st = Straightener::new(th);
            for a in s.coords() {
                for b in s.coords() {
                    let p = st.mul(&QmPoly::var(th, a).unwrap(), &QmPoly::var(th, b).unwrap()).unwrap();
                    let want = h.generator(a).mul(h.generator(b)).unwrap();
                    assert_eq!(h.sigma(&p).unwrap(), want, "{s} t={t} {a}{b}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn associative((th, a, b, d) in threshold().prop_flat_map(|th| (Just(th), monomial(th, 2), monomial(th, 2), monomial(th, 2)))) {
        let left = qm_mul(&qm_mul(&a, &b).unwrap(), &d).unwrap();
        let right = qm_mul(&a, &qm_mul(&b, &d).unwrap()).unwrap();
        prop_assert_eq!(left, right, "t={}", th.t);
    }

    #[test]
    fn product_shape_and_grade((_th, a, b) in threshold().prop_flat_map(|th| (Just(th), monomial(th, 2), monomial(th, 2)))) {
        let (ma, _) = a.leading_term().unwrap();
        let (mb, _) = b.leading_term().unwrap();
        let sum = ma.checked_add(mb).unwrap();
        let p = qm_mul(&a, &b).unwrap();
        let (lt, lc) = p.leading_term().unwrap();
        prop_assert_eq!(lt, &sum);
        prop_assert!(lc.as_monomial().is_some());
        let g = grade(ma).unwrap().add(&grade(mb).unwrap());
        for k in p.terms().keys() {
            prop_assert!(k <= &sum);
            prop_assert_eq!(grade(k).unwrap(), g.clone());
        }
    }

    #[test]
    fn confluent(th in threshold(), raw in prop::collection::vec((0usize..9, any::<bool>()), 2..6), seeds in prop::collection::vec(any::<u64>(), 3)) {
        let word: Vec<Letter> = raw
            .iter()
            .map(|&(k, inv)| {
                let x = th.shape.coord_at(k % th.shape.size());
                if inv && x == th.rs { Letter::inv(x) } else { Letter::pos(x) }
            })
            .collect();
        let reference = Straightener::new(th).word(&word).unwrap();
        let rw = WordRewriter::new(th);
        for s in seeds {
            let mut state = s | 1;
            let got = rw.normalize(&word, |n| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % n as u64) as usize
            }).unwrap();
            prop_assert_eq!(got.terms(), &reference);
        }
        let first = rw.normalize(&word, |_| 0).unwrap();
        prop_assert_eq!(first.terms(), &reference);
    }

    #[test]
    fn empty_diagram_embeds_products((th, a, b) in threshold().prop_flat_map(|th| (Just(th), poly(th), poly(th)))) {
        let h = HPrimeHandle::new(&Diagram::all_white(th.shape), th).unwrap();
        let p = qm_mul(&a, &b).unwrap();
        prop_assert_eq!(h.sigma(&p).unwrap(), h.sigma(&a).unwrap().mul(&h.sigma(&b).unwrap()).unwrap());
    }

    #[test]
    fn json_round_trip(p in threshold().prop_flat_map(poly)) {
        prop_assert_eq!(QmPoly::from_json(&p.to_json()).unwrap(), p);
    }
}
