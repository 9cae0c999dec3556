//! Evolution algebras stored by their structure matrix.
//!
//! Row `i` of `T` holds the coordinates of `e_i e_i`; products of distinct
//! basis vectors vanish and are never stored.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec, GfError};
use crate::linalg::Matrix;

/// Default bound on `q^(n^2)` for full enumerations.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },
    #[error("structure matrix must be n x n")]
    NotSquare,
    #[error("scale factor {0} is zero")]
    ZeroScale(usize),
    #[error("{0:?} is not a permutation of 0..n")]
    BadPermutation(Vec<usize>),
    #[error("enumeration of {count} items exceeds the cap {cap}")]
    CapExceeded { count: u128, cap: u64 },
    #[error("cannot parse algebra literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// File form of an algebra: the field by `q` or by `p` and `k`, the
/// dimension, and the rows in the element encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub n: usize,
    pub rows: Vec<Vec<Entry>>,
}

/// A document entry: a bare residue or an encoded element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Residue(u64),
    Encoded(String),
}

impl AlgebraDocument {
    pub fn from_algebra(a: &EvolutionAlgebra) -> Self {
        let f = a.field();
        AlgebraDocument {
            q: Some(f.q() as u64),
            p: None,
            k: None,
            n: a.dim(),
            rows: (0..a.dim()).map(|i| a.row(i).iter().map(|&e| if f.k() == 1 { Entry::Residue(e.index() as u64) } else { Entry::Encoded(f.format(e)) }).collect()).collect(),
        }
    }

    pub fn field(&self) -> Result<FieldSpec, AlgebraError> {
        let f = match (self.q, self.p, self.k) {
            (Some(q), None, None) => FieldSpec::from_order(q)?,
            (None, Some(p), k) => FieldSpec::new(p, k.unwrap_or(1))?,
            (Some(q), Some(p), k) => {
                let f = FieldSpec::new(p, k.unwrap_or(1))?;
                if f.q() as u64 != q {
                    return Err(self.err(format!("q = {q} disagrees with p = {p}, k = {}", f.k())));
                }
                f
            }
            _ => return Err(self.err("missing field: give q or p (and k)".into())),
        };
        Ok(f)
    }

    pub fn to_algebra(&self) -> Result<EvolutionAlgebra, AlgebraError> {
        let field = self.field()?;
        if self.rows.len() != self.n || self.rows.iter().any(|r| r.len() != self.n) {
            return Err(self.err(format!("rows must form a {0} x {0} matrix", self.n)));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| match e {
                        Entry::Residue(v) => field.parse(&v.to_string()),
                        Entry::Encoded(t) => field.parse(t),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        EvolutionAlgebra::new(field, Matrix::from_rows(rows))
    }

    fn err(&self, reason: String) -> AlgebraError {
        AlgebraError::Parse { literal: format!("document with n = {}", self.n), reason }
    }
}

/// Coordinate vector in the natural basis.
pub type Vector = Vec<FieldElement>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EvolutionAlgebra {
    field: FieldSpec,
    structure: Matrix,
}

impl fmt::Debug for EvolutionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EvolutionAlgebra({} | {})", self.field, self.literal())
    }
}

impl fmt::Display for EvolutionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal())
    }
}

impl EvolutionAlgebra {
    pub fn new(field: FieldSpec, structure: Matrix) -> Result<Self, AlgebraError> {
        if !structure.is_square() {
            return Err(AlgebraError::NotSquare);
        }
        if structure.as_slice().iter().any(|e| e.index() >= field.q()) {
            return Err(AlgebraError::Field(GfError::Parse {
                literal: "structure entry".into(),
                q: field.q(),
            }));
        }
        Ok(EvolutionAlgebra { field, structure })
    }

    /// Build from integer rows, reduced into the prime subfield.
    pub fn from_int_rows(field: &FieldSpec, rows: &[&[i64]]) -> Result<Self, AlgebraError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::NotSquare);
        }
        let m = Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| field.from_int(x)).collect()).collect());
        Self::new(field.clone(), m)
    }

    pub fn abelian(field: &FieldSpec, n: usize) -> Self {
        EvolutionAlgebra { field: field.clone(), structure: Matrix::zeros(n, n) }
    }

    /// Inline literal: rows separated by `;`, entries by `,`, entries in the
    /// field's element encoding (`"1,0;1,0"`, or `"[1,0],[0,0];[0,0],[0,1]"`).
    pub fn parse(field: &FieldSpec, literal: &str) -> Result<Self, AlgebraError> {
        let perr = |reason: String| AlgebraError::Parse { literal: literal.to_string(), reason };
        let rows: Vec<Vec<FieldElement>> = literal
            .split(';')
            .map(|row| {
                split_entries(row)
                    .into_iter()
                    .map(|e| field.parse(e).map_err(|err| perr(err.to_string())))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(perr(format!("expected a square matrix, got {} rows", n)));
        }
        Self::new(field.clone(), Matrix::from_rows(rows))
    }

    pub fn literal(&self) -> String {
        self.structure.literal(&self.field)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.structure.rows()
    }

    pub fn structure(&self) -> &Matrix {
        &self.structure
    }

    #[inline]
    pub fn t(&self, i: usize, j: usize) -> FieldElement {
        self.structure.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        self.structure.row(i)
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.as_slice().iter().all(|e| e.is_zero())
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = vec![FieldElement::ZERO; self.dim()];
        v[i] = FieldElement::ONE;
        v
    }

    fn check_compatible(&self, other: &EvolutionAlgebra) -> Result<(), AlgebraError> {
        if self.field != other.field {
            return Err(AlgebraError::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        if self.dim() != other.dim() {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    pub(crate) fn ensure_compatible(&self, other: &EvolutionAlgebra) -> Result<(), AlgebraError> {
        self.check_compatible(other)
    }

    /// `uv = sum_i u_i v_i (e_i e_i)`.
    pub fn multiply(&self, u: &[FieldElement], v: &[FieldElement]) -> Result<Vector, AlgebraError> {
        let n = self.dim();
        for w in [u, v] {
            if w.len() != n {
                return Err(AlgebraError::DimensionMismatch { expected: n, got: w.len() });
            }
            if w.iter().any(|e| e.index() >= self.field.q()) {
                return Err(AlgebraError::Field(GfError::Parse { literal: "vector entry".into(), q: self.field.q() }));
            }
        }
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; n];
        for i in 0..n {
            let c = f.mul(u[i], v[i]);
            if c.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(c, self.t(i, j)));
            }
        }
        Ok(out)
    }

    /// Dimension of `A^2`, the row space of `T`.
    pub fn derived_dim(&self) -> usize {
        self.structure.rank(&self.field)
    }

    /// Dimension of the annihilator: the number of zero rows of `T`.
    pub fn annihilator_dim(&self) -> usize {
        (0..self.dim()).filter(|&i| self.row(i).iter().all(|e| e.is_zero())).count()
    }

    /// Basis of the annihilator: the `e_i` whose row is zero.
    pub fn annihilator_basis(&self) -> Vec<Vector> {
        (0..self.dim())
            .filter(|&i| self.row(i).iter().all(|e| e.is_zero()))
            .map(|i| self.basis_vector(i))
            .collect()
    }

    /// `(annihilator_dim, derived_dim)`.
    pub fn signature(&self) -> (usize, usize) {
        (self.annihilator_dim(), self.derived_dim())
    }

    /// The algebra `A'` for which `e_i -> scale[i] e'_{sigma[i]}` is an isomorphism.
    pub fn transport_monomial(&self, sigma: &[usize], scale: &[FieldElement]) -> Result<EvolutionAlgebra, AlgebraError> {
        let n = self.dim();
        check_permutation(sigma, n)?;
        if scale.len() != n {
            return Err(AlgebraError::DimensionMismatch { expected: n, got: scale.len() });
        }
        if let Some(i) = scale.iter().position(|s| s.is_zero()) {
            return Err(AlgebraError::ZeroScale(i));
        }
        let f = &self.field;
        let mut t = Matrix::zeros(n, n);
        for i in 0..n {
            let inv_sq = f.inv(f.mul(scale[i], scale[i]))?;
            for j in 0..n {
                t.set(sigma[i], sigma[j], f.mul(f.mul(scale[j], self.t(i, j)), inv_sq));
            }
        }
        Ok(EvolutionAlgebra { field: self.field.clone(), structure: t })
    }

    /// Position in the canonical enumeration (row-major, first entry most significant).
    pub fn enumeration_index(&self) -> u128 {
        let q = self.field.q() as u128;
        self.structure.as_slice().iter().fold(0u128, |acc, e| acc * q + e.index() as u128)
    }
}

fn split_entries(row: &str) -> Vec<&str> {
    // commas inside brackets belong to an extension-field element
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in row.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(row[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(row[start..].trim());
    out
}

pub(crate) fn check_permutation(sigma: &[usize], n: usize) -> Result<(), AlgebraError> {
    let mut seen = vec![false; n];
    if sigma.len() != n {
        return Err(AlgebraError::BadPermutation(sigma.to_vec()));
    }
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(AlgebraError::BadPermutation(sigma.to_vec()));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Restartable enumeration of every structure matrix in canonical order.
#[derive(Clone, Debug)]
pub struct AlgebraEnumeration {
    field: FieldSpec,
    n: usize,
    count: u64,
}

impl AlgebraEnumeration {
    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// The algebra at position `index` (row-major, last entry fastest).
    pub fn get(&self, index: u64) -> EvolutionAlgebra {
        assert!(index < self.count);
        let q = self.field.q() as u64;
        let n2 = self.n * self.n;
        let mut data = vec![FieldElement::ZERO; n2];
        let mut rest = index;
        for slot in data.iter_mut().rev() {
            *slot = FieldElement::from_index((rest % q) as u32);
            rest /= q;
        }
        EvolutionAlgebra { field: self.field.clone(), structure: Matrix::from_vec(self.n, self.n, data) }
    }

    pub fn iter(&self) -> impl Iterator<Item = EvolutionAlgebra> + '_ {
        (0..self.count).map(move |i| self.get(i))
    }

    /// A contiguous index range, for sharding across workers.
    pub fn range(&self, range: std::ops::Range<u64>) -> impl Iterator<Item = EvolutionAlgebra> + '_ {
        range.map(move |i| self.get(i))
    }
}

pub fn enumerate_algebras(field: &FieldSpec, n: usize) -> Result<AlgebraEnumeration, AlgebraError> {
    enumerate_algebras_with_cap(field, n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_algebras_with_cap(field: &FieldSpec, n: usize, cap: u64) -> Result<AlgebraEnumeration, AlgebraError> {
    let count = (field.q() as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(AlgebraError::CapExceeded { count, cap });
    }
    Ok(AlgebraEnumeration { field: field.clone(), n, count: count as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    fn alg(f: &FieldSpec, rows: &[&[i64]]) -> EvolutionAlgebra {
        EvolutionAlgebra::from_int_rows(f, rows).unwrap()
    }

    #[test]
    fn document_round_trip() {
        for q in [5, 4] {
            let f = FieldSpec::from_order(q).unwrap();
            let a = EvolutionAlgebra::new(f.clone(), Matrix::from_rows(vec![vec![f.one(), f.element(3).unwrap()], vec![f.zero(), f.one()]])).unwrap();
            let doc = AlgebraDocument::from_algebra(&a);
            assert_eq!(doc.to_algebra().unwrap(), a);
        }
        let doc = AlgebraDocument { q: None, p: Some(3), k: None, n: 1, rows: vec![vec![Entry::Encoded("2".into())]] };
        assert_eq!(doc.to_algebra().unwrap().literal(), "2");
        let bad = AlgebraDocument { q: Some(9), p: Some(3), k: None, n: 1, rows: vec![vec![Entry::Residue(1)]] };
        assert!(bad.to_algebra().is_err());
        let short = AlgebraDocument { q: Some(3), p: None, k: None, n: 2, rows: vec![vec![Entry::Residue(1)]] };
        assert!(short.to_algebra().is_err());
    }

    #[test]
    fn products() {
        let f = gf(2);
        let e1 = alg(&f, &[&[1, 0], &[0, 0]]);
        let (x, y) = (e1.basis_vector(0), e1.basis_vector(1));
        assert_eq!(e1.multiply(&x, &x).unwrap(), x);
        assert_eq!(e1.multiply(&x, &y).unwrap(), vec![f.zero(); 2]);

        let f3 = gf(3);
        let e2 = alg(&f3, &[&[1, 0], &[1, 0]]);
        let s = vec![f3.one(), f3.one()];
        assert_eq!(e2.multiply(&s, &s).unwrap(), vec![f3.from_int(2), f3.zero()]);
        assert!(matches!(e2.multiply(&s, &[f3.one()]), Err(AlgebraError::DimensionMismatch { .. })));
    }

    #[test]
    fn invariants() {
        let f = gf(5);
        let e1 = alg(&f, &[&[1, 0], &[0, 0]]);
        let e2 = alg(&f, &[&[1, 0], &[1, 0]]);
        let e5 = alg(&f, &[&[1, 0], &[0, 1]]);
        let ab = EvolutionAlgebra::abelian(&f, 2);
        assert_eq!(e2.derived_dim(), 1);
        assert_eq!(e5.derived_dim(), 2);
        assert_eq!(ab.derived_dim(), 0);
        assert_eq!(e1.annihilator_dim(), 1);
        assert_eq!(e2.annihilator_dim(), 0);
        assert_eq!(ab.annihilator_dim(), 2);
    }

    #[test]
    fn enumeration() {
        let f = gf(2);
        let all = enumerate_algebras(&f, 2).unwrap();
        assert_eq!(all.len(), 16);
        assert!(all.get(0).is_abelian());
        assert_eq!(enumerate_algebras(&gf(3), 2).unwrap().len(), 81);
        for (i, a) in all.iter().enumerate() {
            assert_eq!(a.enumeration_index(), i as u128);
        }
        assert_eq!(all.get(1).literal(), "0,0;0,1");
        assert!(matches!(enumerate_algebras(&gf(7), 3), Err(AlgebraError::CapExceeded { .. })));
    }

    #[test]
    fn parsing() {
        let f = gf(3);
        let a = EvolutionAlgebra::parse(&f, "1,0;1,0").unwrap();
        assert_eq!(a, alg(&f, &[&[1, 0], &[1, 0]]));
        assert_eq!(a.literal(), "1,0;1,0");
        assert!(EvolutionAlgebra::parse(&f, "1,0;1").is_err());
        assert!(EvolutionAlgebra::parse(&f, "1,3;0,0").is_err());
        let f4 = gf(4);
        let b = EvolutionAlgebra::parse(&f4, "[0,1],[0,0];[1,1],[1,0]").unwrap();
        assert_eq!(b.t(0, 0), f4.element(2).unwrap());
        assert_eq!(EvolutionAlgebra::parse(&f4, &b.literal()).unwrap(), b);
    }

    #[test]
    fn transport() {
        let f = gf(3);
        let e1 = alg(&f, &[&[1, 0], &[0, 0]]);
        assert_eq!(e1.transport_monomial(&[0, 1], &[f.one(), f.one()]).unwrap(), e1);
        // scale e1 by 2: T'_11 = 2 * 1 / 4 = 2
        let scaled = e1.transport_monomial(&[0, 1], &[f.from_int(2), f.one()]).unwrap();
        assert_eq!(scaled, alg(&f, &[&[2, 0], &[0, 0]]));
        let swapped = e1.transport_monomial(&[1, 0], &[f.one(), f.one()]).unwrap();
        assert_eq!(swapped, alg(&f, &[&[0, 0], &[0, 1]]));
        assert_eq!(e1.transport_monomial(&[0, 1], &[f.zero(), f.one()]), Err(AlgebraError::ZeroScale(0)));
        assert!(matches!(e1.transport_monomial(&[0, 0], &[f.one(), f.one()]), Err(AlgebraError::BadPermutation(_))));
    }
}
