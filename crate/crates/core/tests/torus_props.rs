mod common;

use common::*;
use proptest::prelude::*;
use qmpath::torus::{monomial_mul, pair_commutation};
use qmpath::{Coord, ExponentMatrix, LaurentScalar, Shape, TorusElement};

fn shape23() -> Shape {
    Shape::new(2, 3).unwrap()
}

fn letter(shape: Shape) -> impl Strategy<Value = (Coord, i64)> {
    (0..shape.size(), prop_oneof![Just(1i64), Just(-1i64), Just(2i64)]).prop_map(move |(k, e)| (shape.coord_at(k), e))
}

fn exponent(shape: Shape) -> impl Strategy<Value = ExponentMatrix> {
    prop::collection::vec(-2i64..=2, shape.size()).prop_map(move |v| ExponentMatrix::from_entries(shape, v).unwrap())
}

#[test]
fn unit_pairs_match_relations_on_2x2() {
    let s = Shape::new(2, 2).unwrap();
    for a in s.coords() {
        for b in s.coords().filter(|&b| b != a) {
            let (k, _) = monomial_mul(&ExponentMatrix::unit(s, a), &ExponentMatrix::unit(s, b)).unwrap();
            let (want, _) = swap_oracle(s, &[(a, 1), (b, 1)]);
            assert_eq!(k, want, "{a} {b}");
            assert_eq!(pair_commutation(a, b).unwrap(), relation_exponent(a, b));
        }
    }
}

#[test]
fn inverse_against_neighbour() {
    let s = Shape::new(2, 2).unwrap();
    let n22 = ExponentMatrix::from_sparse(s, &[(c(2, 2), -1)]).unwrap();
    let n21 = ExponentMatrix::unit(s, c(2, 1));
    let (kl, l) = monomial_mul(&n22, &n21).unwrap();
    let (kr, r) = monomial_mul(&n21, &n22).unwrap();
    assert_eq!(l, r);
    let (ol, _) = swap_oracle(s, &[(c(2, 2), -1), (c(2, 1), 1)]);
    let (or, _) = swap_oracle(s, &[(c(2, 1), 1), (c(2, 2), -1)]);
    assert_eq!((kl, kr), (ol, or));
    // t_{2,1} t_{2,2} = q t_{2,2} t_{2,1} gives t_{2,2}^{-1} t_{2,1} = q t_{2,1} t_{2,2}^{-1}.
    assert_eq!(kl - kr, 1);
}

#[test]
fn weight_times_inverse_factor() {
    let s = Shape::new(3, 3).unwrap();
    let w = tword(s, &[(1, 2, 1), (2, 2, -1), (2, 1, 1)]);
    let prod = w.mul(&TorusElement::var(s, c(2, 2))).unwrap();
    let (k, n) = swap_oracle(s, &[(c(1, 2), 1), (c(2, 2), -1), (c(2, 1), 1), (c(2, 2), 1)]);
    assert_eq!(prod, TorusElement::monomial(n, q(k)));
}

#[test]
fn self_commutation_is_an_error() {
    assert!(pair_commutation(c(1, 1), c(1, 1)).is_err());
}

#[test]
fn distinct_keys_are_independent() {
    let s = shape23();
    let a = TorusElement::from_terms(
        s,
        [
            (ExponentMatrix::unit(s, c(1, 1)), LaurentScalar::one()),
            (ExponentMatrix::unit(s, c(1, 2)), -LaurentScalar::one()),
        ],
    )
    .unwrap();
    assert_eq!(a.len(), 2);
    assert!(!a.is_zero());
    assert!(a.sub(&a).unwrap().is_zero());
    assert!(a.add(&TorusElement::zero(s)).unwrap() == a);
}

#[test]
fn shape_mismatch_is_rejected() {
    let a = TorusElement::one(Shape::new(2, 2).unwrap());
    let b = TorusElement::one(shape23());
    assert!(a.mul(&b).is_err());
    assert!(a.add(&b).is_err());
}

proptest! {
    #[test]
    fn closed_form_matches_swapping(u in prop::collection::vec(letter(shape23()), 0..5),
                                    v in prop::collection::vec(letter(shape23()), 0..5)) {
        let s = shape23();
        let (cu, nu) = swap_oracle(s, &u);
        let (cv, nv) = swap_oracle(s, &v);
        let uv: Vec<_> = u.iter().chain(&v).copied().collect();
        let (cuv, nuv) = swap_oracle(s, &uv);
        let (k, n) = monomial_mul(&nu, &nv).unwrap();
        prop_assert_eq!(k, cuv - cu - cv);
        prop_assert_eq!(n, nuv);
    }

    #[test]
    fn monomial_mul_is_associative(a in exponent(shape23()), b in exponent(shape23()), d in exponent(shape23())) {
        let (k1, ab) = monomial_mul(&a, &b).unwrap();
        let (k2, left) = monomial_mul(&ab, &d).unwrap();
        let (k3, bd) = monomial_mul(&b, &d).unwrap();
        let (k4, right) = monomial_mul(&a, &bd).unwrap();
        prop_assert_eq!(k1 + k2, k3 + k4);
        prop_assert_eq!(left, right);
    }

    #[test]
    fn commutation_is_antisymmetric(i in 0usize..9, j in 0usize..9) {
        let s = Shape::new(3, 3).unwrap();
        prop_assume!(i != j);
        let (a, b) = (s.coord_at(i), s.coord_at(j));
        prop_assert_eq!(pair_commutation(a, b).unwrap(), -pair_commutation(b, a).unwrap());
    }

    #[test]
    fn inverse_is_two_sided(n in exponent(shape23()), e in -3i64..=3) {
        let s = shape23();
        let x = TorusElement::monomial(n, q(e));
        let inv = x.inverse().unwrap();
        prop_assert_eq!(x.mul(&inv).unwrap(), TorusElement::one(s));
        prop_assert_eq!(inv.mul(&x).unwrap(), TorusElement::one(s));
    }
}
