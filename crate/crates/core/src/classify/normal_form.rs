use crate::evoalg::EvolutionAlgebra;
use crate::gf::FieldElement;
use crate::linalg::Matrix;
use crate::search::MapTriple;

/// Strongly isotopic algebra whose structure matrix satisfies:
/// a zero diagonal entry `t_ii` forces `t_jk = 0` for all `j, k >= i`, and a
/// nonzero `t_ii` is the only nonzero entry of row `i`.
///
/// The witness is `(F, F, H)`: `F` permutes the basis so independent rows
/// come first, and `H` clears the off-diagonal part of those rows while
/// keeping their diagonal values.
pub fn strong_isotopy_normal_form(a: &EvolutionAlgebra) -> (EvolutionAlgebra, MapTriple) {
    let field = a.field();
    let n = a.dim();
    let t = a.structure();

    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..n {
        let mut cand: Vec<Vec<FieldElement>> = chosen.iter().map(|&j| t.row(j).to_vec()).collect();
        cand.push(t.row(i).to_vec());
        if Matrix::from_rows(cand).rank(field) > chosen.len() {
            chosen.push(i);
        }
    }
    let r = chosen.len();
    if r == 0 {
        return (a.clone(), MapTriple::identity(n));
    }
    let alpha: Vec<usize> = chosen.iter().copied().chain((0..n).filter(|i| !chosen.contains(i))).collect();

    let lead = Matrix::from_rows(chosen.iter().map(|&j| t.row(j).to_vec()).collect());
    let (_, pivots) = lead.rref(field);
    let order = nonzero_diagonal_order(&lead, &pivots).expect("pivot block is invertible");
    let beta: Vec<usize> = order.iter().map(|&p| pivots[p]).chain((0..n).filter(|c| !pivots.contains(c))).collect();

    // lead * P_beta = [B | N]
    let mut p_beta = Matrix::zeros(n, n);
    for (p, &c) in beta.iter().enumerate() {
        p_beta.set(c, p, FieldElement::ONE);
    }
    let moved = lead.mul(field, &p_beta);
    let block = |r0: usize, r1: usize, c0: usize, c1: usize| {
        Matrix::from_rows((r0..r1).map(|i| moved.row(i)[c0..c1].to_vec()).collect())
    };
    let b_inv = block(0, r, 0, r).inverse(field).expect("pivot block is invertible");
    let d = Matrix::diagonal(&(0..r).map(|i| moved.get(i, i)).collect::<Vec<_>>());
    let top_left = b_inv.mul(field, &d);
    let mut h = Matrix::identity(n);
    for i in 0..r {
        for j in 0..r {
            h.set(i, j, top_left.get(i, j));
        }
    }
    if r < n {
        let top_right = b_inv.mul(field, &block(0, r, r, n));
        for i in 0..r {
            for j in r..n {
                h.set(i, j, field.neg(top_right.get(i, j - r)));
            }
        }
    }
    let h_total = p_beta.mul(field, &h);

    let mut sigma = vec![0; n];
    for (p, &i) in alpha.iter().enumerate() {
        sigma[i] = p;
    }
    let f = Matrix::permutation(&sigma);
    let rows: Vec<Vec<FieldElement>> = alpha.iter().map(|&i| crate::linalg::vec_mul(field, t.row(i), &h_total)).collect();
    let normal = EvolutionAlgebra::new(field.clone(), Matrix::from_rows(rows)).expect("square");
    (normal, MapTriple::strong(f, h_total))
}

/// Column order (indices into `pivots`) giving the pivot block a nonzero
/// diagonal; the first such order in lexicographic order.
fn nonzero_diagonal_order(lead: &Matrix, pivots: &[usize]) -> Option<Vec<usize>> {
    fn rec(lead: &Matrix, pivots: &[usize], row: usize, used: &mut Vec<bool>, out: &mut Vec<usize>) -> bool {
        if row == pivots.len() {
            return true;
        }
        for p in 0..pivots.len() {
            if !used[p] && !lead.get(row, pivots[p]).is_zero() {
                used[p] = true;
                out.push(p);
                if rec(lead, pivots, row + 1, used, out) {
                    return true;
                }
                out.pop();
                used[p] = false;
            }
        }
        false
    }
    let mut out = Vec::new();
    rec(lead, pivots, 0, &mut vec![false; pivots.len()], &mut out).then_some(out)
}

/// Checks both normal-form conditions on a structure matrix.
pub fn is_strong_normal(a: &EvolutionAlgebra) -> bool {
    let n = a.dim();
    (0..n).all(|i| {
        if a.t(i, i).is_zero() {
            (i..n).all(|j| (i..n).all(|k| a.t(j, k).is_zero()))
        } else {
            (0..n).all(|j| j == i || a.t(i, j).is_zero())
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evoalg::enumerate_algebras;
    use crate::gf::FieldSpec;
    use crate::search::verify_isotopism;

    fn alg(f: &FieldSpec, r: &[&[i64]]) -> EvolutionAlgebra {
        EvolutionAlgebra::from_int_rows(f, r).unwrap()
    }

    #[test]
    fn worked_example() {
        let f = FieldSpec::from_order(5).unwrap();
        let a = alg(&f, &[&[1, 1], &[-1, -1]]);
        let (nf, w) = strong_isotopy_normal_form(&a);
        assert_eq!(nf, alg(&f, &[&[1, 0], &[4, 0]]));
        assert_eq!(w.f, Matrix::identity(2));
        assert_eq!(w.h, Matrix::from_rows(vec![vec![f.one(), f.from_int(-1)], vec![f.zero(), f.one()]]));
        assert!(verify_isotopism(&a, &nf, &w).unwrap());
    }

    #[test]
    fn fixed_points() {
        let f = FieldSpec::from_order(3).unwrap();
        for a in [alg(&f, &[&[1, 0], &[0, 1]]), EvolutionAlgebra::abelian(&f, 2), alg(&f, &[&[2, 0], &[1, 0]])] {
            let (nf, w) = strong_isotopy_normal_form(&a);
            assert_eq!(nf, a);
            assert_eq!(w, MapTriple::identity(2));
        }
    }

    #[test]
    fn conditions_hold_in_dimension_three() {
        let f = FieldSpec::from_order(2).unwrap();
        for a in enumerate_algebras(&f, 3).unwrap().iter() {
            let (nf, w) = strong_isotopy_normal_form(&a);
            assert!(is_strong_normal(&nf), "{a} -> {nf}");
            assert!(w.is_strong());
            assert!(verify_isotopism(&a, &nf, &w).unwrap());
        }
    }

    #[test]
    fn needs_column_reordering() {
        let f = FieldSpec::from_order(3).unwrap();
        let a = alg(&f, &[&[0, 1], &[1, 0]]);
        let (nf, w) = strong_isotopy_normal_form(&a);
        assert!(is_strong_normal(&nf));
        assert!(verify_isotopism(&a, &nf, &w).unwrap());
    }
}
