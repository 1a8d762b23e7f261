#![allow(dead_code)]

use qmpath::{Coord, Diagram, ExponentMatrix, LaurentScalar, Shape, TorusElement};

pub fn c(i: usize, j: usize) -> Coord {
    Coord::new(i, j)
}

/// Product of `t_{i,j}^e` in the order given.
pub fn tword(shape: Shape, letters: &[(usize, usize, i64)]) -> TorusElement {
    let mut w = TorusElement::one(shape);
    for &(i, j, e) in letters {
        w = w.mul(&TorusElement::var_pow(shape, c(i, j), e)).unwrap();
    }
    w
}

/// `t_a t_b = q^k t_b t_a`, read off the defining relations of the torus.
pub fn relation_exponent(a: Coord, b: Coord) -> i64 {
    if a.row == b.row {
        if a.col < b.col { 1 } else { -1 }
    } else if a.col == b.col {
        if a.row < b.row { 1 } else { -1 }
    } else {
        0
    }
}

/// Normal-orders a word of torus letters by adjacent transpositions,
/// returning the accumulated power of `q` and the exponent matrix.
pub fn swap_oracle(shape: Shape, word: &[(Coord, i64)]) -> (i64, ExponentMatrix) {
    let mut w: Vec<(Coord, i64)> = word.to_vec();
    let mut q = 0;
    let mut changed = true;
    while changed {
        changed = false;
        for k in 0..w.len().saturating_sub(1) {
            let (a, e) = w[k];
            let (b, f) = w[k + 1];
            if b < a {
                q += e * f * relation_exponent(a, b);
                w.swap(k, k + 1);
                changed = true;
            }
        }
    }
    let mut n = ExponentMatrix::zero(shape);
    for (a, e) in w {
        n.set(a, n.get(a) + e);
    }
    (q, n)
}

/// Cauchon diagrams counted straight from the definition over all `2^{mn}`
/// colourings.
pub fn brute_force_cauchon_count(shape: Shape) -> usize {
    let cells: Vec<Coord> = shape.coords().collect();
    let mut count = 0;
    for mask in 0u64..(1u64 << cells.len()) {
        let black = |x: Coord| mask >> shape.index(x) & 1 == 1;
        let ok = cells.iter().all(|&x| {
            !black(x)
                || (1..x.col).all(|j| black(c(x.row, j)))
                || (1..x.row).all(|i| black(c(i, x.col)))
        });
        count += usize::from(ok);
    }
    count
}

pub fn q(e: i64) -> LaurentScalar {
    LaurentScalar::q_power(e)
}

/// The 3×3 diagram whose graph is drawn with its turn weights.
pub fn factor_graph_diagram() -> Diagram {
    Diagram::new(Shape::new(3, 3).unwrap(), [c(1, 1), c(1, 3), c(2, 3)]).unwrap()
}

/// The 4×4 diagram used for the path system examples.
pub fn path_system_diagram() -> Diagram {
    Diagram::new(
        Shape::new(4, 4).unwrap(),
        [c(1, 1), c(1, 4), c(2, 1), c(2, 4), c(3, 1), c(3, 2)],
    )
    .unwrap()
}

/// The 3×4 diagram with a five-minor minimal basis.
pub fn minimal_basis_diagram() -> Diagram {
    Diagram::new(Shape::new(3, 4).unwrap(), [c(1, 1), c(2, 1), c(2, 2)]).unwrap()
}
