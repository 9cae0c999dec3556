//! Square and rectangular matrices over a `FieldSpec`.
//!
//! Linear maps act on row vectors: row `i` of the matrix of `f` holds the
//! coordinates of `f(e_i)`. Composition `g . f` therefore has matrix `F * G`.

use crate::gf::{FieldElement, FieldSpec};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<FieldElement>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    /// Matrix of the permutation map `e_i -> e_{sigma[i]}`.
    pub fn permutation(sigma: &[usize]) -> Self {
        let n = sigma.len();
        let mut m = Self::zeros(n, n);
        for (i, &s) in sigma.iter().enumerate() {
            m.set(i, s, FieldElement::ONE);
        }
        m
    }

    /// Matrix of `e_i -> scale[i] * e_{sigma[i]}`.
    pub fn monomial(sigma: &[usize], scale: &[FieldElement]) -> Self {
        let n = sigma.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, sigma[i], scale[i]);
        }
        m
    }

    pub fn diagonal(entries: &[FieldElement]) -> Self {
        let ident: Vec<usize> = (0..entries.len()).collect();
        Self::monomial(&ident, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn row_vecs(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rows joined by `;`, entries by `,`.
    pub fn literal(&self, field: &FieldSpec) -> String {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&e| field.format(e)).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, field: &FieldSpec, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = field.add(out.get(i, j), field.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Row echelon form (reduced), with the pivot columns.
    pub fn rref(&self, field: &FieldSpec) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            if pr != r {
                for j in 0..m.cols {
                    let (a, b) = (m.get(r, j), m.get(pr, j));
                    m.set(r, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = field.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = field.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let v = field.sub(m.get(i, j), field.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, field: &FieldSpec) -> usize {
        self.rref(field).1.len()
    }

    pub fn det(&self, field: &FieldSpec) -> FieldElement {
        assert!(self.is_square());
        let n = self.rows;
        match n {
            0 => return FieldElement::ONE,
            1 => return self.get(0, 0),
            2 => {
                return field.sub(
                    field.mul(self.get(0, 0), self.get(1, 1)),
                    field.mul(self.get(0, 1), self.get(1, 0)),
                )
            }
            _ => {}
        }
        let mut m = self.clone();
        let mut det = FieldElement::ONE;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return FieldElement::ZERO;
            };
            if pr != c {
                for j in 0..n {
                    let (a, b) = (m.get(c, j), m.get(pr, j));
                    m.set(c, j, b);
                    m.set(pr, j, a);
                }
                det = field.neg(det);
            }
            let pivot = m.get(c, c);
            det = field.mul(det, pivot);
            let inv = field.inv(pivot).expect("pivot is nonzero");
            for i in c + 1..n {
                let factor = field.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = field.sub(m.get(i, j), field.mul(factor, m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn is_invertible(&self, field: &FieldSpec) -> bool {
        self.is_square() && !self.det(field).is_zero()
    }

    pub fn inverse(&self, field: &FieldSpec) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, FieldElement::ONE);
        }
        let (r, pivots) = aug.rref(field);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Some(inv)
    }

    /// Basis of `{x : self * x = 0}` (right kernel), as column vectors.
    pub fn right_kernel(&self, field: &FieldSpec) -> Vec<Vec<FieldElement>> {
        let (r, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut x = vec![FieldElement::ZERO; self.cols];
                x[fc] = FieldElement::ONE;
                for (pi, &pc) in pivots.iter().enumerate() {
                    x[pc] = field.neg(r.get(pi, fc));
                }
                x
            })
            .collect()
    }

    /// One solution `X` of `self * X = rhs`, or `None` when inconsistent.
    pub fn solve(&self, field: &FieldSpec, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, rhs.rows);
        let (n, m) = (self.cols, rhs.cols);
        let mut aug = Matrix::zeros(self.rows, n + m);
        for i in 0..self.rows {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            for j in 0..m {
                aug.set(i, n + j, rhs.get(i, j));
            }
        }
        let (r, pivots) = aug.rref(field);
        if pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut x = Matrix::zeros(n, m);
        for (pi, &pc) in pivots.iter().enumerate() {
            for j in 0..m {
                x.set(pc, j, r.get(pi, n + j));
            }
        }
        Some(x)
    }
}

/// Whether two lists of vectors span the same subspace.
pub fn same_span(field: &FieldSpec, dim: usize, a: &[Vec<FieldElement>], b: &[Vec<FieldElement>]) -> bool {
    let stack = |vs: &[Vec<FieldElement>]| {
        if vs.is_empty() {
            Matrix::zeros(0, dim)
        } else {
            Matrix::from_rows(vs.to_vec())
        }
    };
    let (ma, mb) = (stack(a), stack(b));
    let ra = ma.rank(field);
    let rb = mb.rank(field);
    if ra != rb {
        return false;
    }
    let both: Vec<Vec<FieldElement>> = a.iter().chain(b).cloned().collect();
    stack(&both).rank(field) == ra
}

/// Row vector times matrix.
pub fn vec_mul(field: &FieldSpec, v: &[FieldElement], m: &Matrix) -> Vec<FieldElement> {
    assert_eq!(v.len(), m.rows());
    let mut out = vec![FieldElement::ZERO; m.cols()];
    for (i, &a) in v.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o = field.add(*o, field.mul(a, m.get(i, j)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: &FieldSpec, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect())
    }

    #[test]
    fn det_rank_inverse() {
        let f = FieldSpec::new(5, 1).unwrap();
        let a = m(&f, &[&[1, 2, 0], &[0, 1, 4], &[3, 0, 1]]);
        let d = a.det(&f);
        // 1*(1-0) - 2*(0-12) + 0 = 25 = 0 mod 5
        assert_eq!(d, f.zero());
        assert_eq!(a.rank(&f), 2);
        assert!(a.inverse(&f).is_none());
        let b = m(&f, &[&[2, 1], &[1, 1]]);
        let bi = b.inverse(&f).unwrap();
        assert_eq!(b.mul(&f, &bi), Matrix::identity(2));
    }

    #[test]
    fn kernel_and_solve() {
        let f = FieldSpec::new(7, 1).unwrap();
        let a = m(&f, &[&[1, 3], &[2, 6]]);
        let ker = a.right_kernel(&f);
        assert_eq!(ker.len(), 1);
        let col = Matrix::from_vec(2, 1, ker[0].clone());
        assert_eq!(a.mul(&f, &col), Matrix::zeros(2, 1));
        let rhs = m(&f, &[&[1, 0], &[2, 0]]);
        let x = a.solve(&f, &rhs).unwrap();
        assert_eq!(a.mul(&f, &x), rhs);
        assert!(a.solve(&f, &m(&f, &[&[1, 0], &[0, 0]])).is_none());
    }

    #[test]
    fn spans() {
        let f = FieldSpec::new(3, 1).unwrap();
        let v = |xs: &[i64]| xs.iter().map(|&x| f.from_int(x)).collect::<Vec<_>>();
        assert!(same_span(&f, 2, &[v(&[1, 1])], &[v(&[2, 2])]));
        assert!(!same_span(&f, 2, &[v(&[1, 0])], &[v(&[0, 1])]));
        assert!(same_span(&f, 2, &[], &[]));
    }
}
