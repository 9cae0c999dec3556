//! Exhaustive witness search over invertible matrices.
//!
//! Maps act on row vectors: row `i` of `F` holds the coordinates of `f(e_i)`
//! in the basis of the target algebra.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evoalg::{AlgebraError, EvolutionAlgebra};
use crate::gf::{FieldElement, FieldSpec};
use crate::linalg::{vec_mul, Matrix};

pub const DEFAULT_EXHAUSTION_CAP: u64 = 1 << 24;

/// Above this many candidate matrices the invertible ones are streamed, not stored.
const TABLE_LIMIT: u64 = 1 << 20;

fn cap_hint(relation: &Relation) -> &'static str {
    match relation {
        Relation::StrongIsotopism => "raise the strong-isotopism-max-q cap",
        Relation::Isotopism => "use the invariant method or raise the isotopism-max-q cap",
        Relation::Isomorphism => "use the invariant method or raise the isomorphism-max-q cap",
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{relation} search is capped at q <= {cap} (got q = {q}); {hint}", hint = cap_hint(relation))]
    FieldCap { relation: Relation, q: u32, cap: u32 },
    #[error("exhaustion cap exceeded: {count} candidate matrices > {cap}")]
    ExhaustionCap { count: u128, cap: u64 },
    #[error("component {0} of the map triple is not invertible")]
    NotInvertible(char),
    #[error("map has shape {rows}x{cols}, expected {n}x{n}")]
    Shape { rows: usize, cols: usize, n: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Isomorphism,
    StrongIsotopism,
    Isotopism,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Isomorphism, Relation::StrongIsotopism, Relation::Isotopism];

    pub fn name(self) -> &'static str {
        match self {
            Relation::Isomorphism => "isomorphism",
            Relation::StrongIsotopism => "strong-isotopism",
            Relation::Isotopism => "isotopism",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "isomorphism" | "isom" => Ok(Relation::Isomorphism),
            "strong-isotopism" | "strong" => Ok(Relation::StrongIsotopism),
            "isotopism" | "isot" => Ok(Relation::Isotopism),
            other => Err(format!("unknown relation '{other}'")),
        }
    }
}

/// Invertible maps `(f, g, h)` with `f(u) g(v) = h(uv)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MapTriple {
    pub f: Matrix,
    pub g: Matrix,
    pub h: Matrix,
}

/// Serialized witness: each matrix in the algebra row format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    #[serde(rename = "F")]
    pub f: String,
    #[serde(rename = "G")]
    pub g: String,
    #[serde(rename = "H")]
    pub h: String,
}

impl MapTriple {
    pub fn new(f: Matrix, g: Matrix, h: Matrix) -> Self {
        MapTriple { f, g, h }
    }

    pub fn isomorphism(f: Matrix) -> Self {
        MapTriple { g: f.clone(), h: f.clone(), f }
    }

    pub fn strong(f: Matrix, h: Matrix) -> Self {
        MapTriple { g: f.clone(), f, h }
    }

    pub fn identity(n: usize) -> Self {
        Self::isomorphism(Matrix::identity(n))
    }

    pub fn is_isomorphism(&self) -> bool {
        self.f == self.g && self.g == self.h
    }

    pub fn is_strong(&self) -> bool {
        self.f == self.g
    }

    /// Componentwise inverse, a triple from the target back to the source.
    pub fn inverse(&self, field: &FieldSpec) -> Option<MapTriple> {
        Some(MapTriple { f: self.f.inverse(field)?, g: self.g.inverse(field)?, h: self.h.inverse(field)? })
    }

    /// `self` followed by `then`.
    pub fn compose(&self, field: &FieldSpec, then: &MapTriple) -> MapTriple {
        MapTriple { f: self.f.mul(field, &then.f), g: self.g.mul(field, &then.g), h: self.h.mul(field, &then.h) }
    }

    pub fn to_record(&self, field: &FieldSpec) -> WitnessRecord {
        WitnessRecord { f: self.f.literal(field), g: self.g.literal(field), h: self.h.literal(field) }
    }
}

/// Search limits. The field caps bound `q` per relation; `exhaustion`
/// bounds the number of candidate `n x n` matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchCaps {
    pub isomorphism_max_q: u32,
    pub strong_isotopism_max_q: u32,
    pub isotopism_max_q: u32,
    pub exhaustion: u64,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { isomorphism_max_q: 64, strong_isotopism_max_q: 7, isotopism_max_q: 3, exhaustion: DEFAULT_EXHAUSTION_CAP }
    }
}

impl SearchCaps {
    pub fn max_q(&self, relation: Relation) -> u32 {
        match relation {
            Relation::Isomorphism => self.isomorphism_max_q,
            Relation::StrongIsotopism => self.strong_isotopism_max_q,
            Relation::Isotopism => self.isotopism_max_q,
        }
    }
}

fn candidate_count(field: &FieldSpec, n: usize) -> u128 {
    (field.q() as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX)
}

fn check_exhaustion(field: &FieldSpec, n: usize, cap: u64) -> Result<u128, SearchError> {
    let count = candidate_count(field, n);
    if count > cap as u128 {
        return Err(SearchError::ExhaustionCap { count, cap });
    }
    Ok(count)
}

/// Advances a row-major digit vector (first entry most significant).
fn odometer(field: &FieldSpec, m: &mut [FieldElement]) -> bool {
    let q = field.q();
    for e in m.iter_mut().rev() {
        if e.index() + 1 < q {
            *e = FieldElement::from_index(e.index() + 1);
            return true;
        }
        *e = FieldElement::ZERO;
    }
    false
}

fn det_flat(field: &FieldSpec, n: usize, m: &[FieldElement]) -> FieldElement {
    match n {
        1 => m[0],
        2 => field.sub(field.mul(m[0], m[3]), field.mul(m[1], m[2])),
        _ => Matrix::from_vec(n, n, m.to_vec()).det(field),
    }
}

/// Invertible `n x n` matrices over a field, stored flat in row-major order.
#[derive(Clone, Debug)]
pub struct GlTable {
    n: usize,
    data: Vec<FieldElement>,
}

impl GlTable {
    pub fn new(field: &FieldSpec, n: usize) -> Result<Self, SearchError> {
        Self::with_cap(field, n, DEFAULT_EXHAUSTION_CAP)
    }

    pub fn with_cap(field: &FieldSpec, n: usize, cap: u64) -> Result<Self, SearchError> {
        check_exhaustion(field, n, cap)?;
        let mut data = Vec::new();
        let mut m = vec![FieldElement::ZERO; n * n];
        loop {
            if !det_flat(field, n, &m).is_zero() {
                data.extend_from_slice(&m);
            }
            if !odometer(field, &mut m) {
                break;
            }
        }
        Ok(GlTable { n, data })
    }

    pub fn len(&self) -> usize {
        self.data.len() / (self.n * self.n).max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[FieldElement] {
        let s = self.n * self.n;
        &self.data[i * s..(i + 1) * s]
    }

    pub fn matrix(&self, i: usize) -> Matrix {
        Matrix::from_vec(self.n, self.n, self.get(i).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &[FieldElement]> + '_ {
        self.data.chunks_exact((self.n * self.n).max(1))
    }
}

/// Invertible matrices in row-major element order, each once.
pub fn gl_enumerate(field: &FieldSpec, n: usize) -> Result<impl Iterator<Item = Matrix>, SearchError> {
    gl_enumerate_with_cap(field, n, DEFAULT_EXHAUSTION_CAP)
}

pub fn gl_enumerate_with_cap(field: &FieldSpec, n: usize, cap: u64) -> Result<impl Iterator<Item = Matrix>, SearchError> {
    check_exhaustion(field, n, cap)?;
    let field = field.clone();
    let mut cur = Some(vec![FieldElement::ZERO; n * n]);
    Ok(std::iter::from_fn(move || loop {
        let m = cur.as_mut()?;
        let out = (!det_flat(&field, n, m).is_zero()).then(|| Matrix::from_vec(n, n, m.clone()));
        if !odometer(&field, m) {
            cur = None;
        }
        if out.is_some() {
            return out;
        }
    }))
}

fn check_shape(m: &Matrix, n: usize) -> Result<(), SearchError> {
    if m.rows() != n || m.cols() != n {
        return Err(SearchError::Shape { rows: m.rows(), cols: m.cols(), n });
    }
    Ok(())
}

/// True iff `f(e_i) g(e_j) = h(e_i e_j)` for every pair of basis vectors.
pub fn verify_isotopism(a: &EvolutionAlgebra, b: &EvolutionAlgebra, t: &MapTriple) -> Result<bool, SearchError> {
    a.ensure_compatible(b)?;
    let n = a.dim();
    let field = a.field();
    for (name, m) in [('F', &t.f), ('G', &t.g), ('H', &t.h)] {
        check_shape(m, n)?;
        if !m.is_invertible(field) {
            return Err(SearchError::NotInvertible(name));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let lhs = b.multiply(t.f.row(i), t.g.row(j))?;
            let prod = a.multiply(&a.basis_vector(i), &a.basis_vector(j))?;
            if lhs != vec_mul(field, &prod, &t.h) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn verify_isomorphism(a: &EvolutionAlgebra, b: &EvolutionAlgebra, f: &Matrix) -> Result<bool, SearchError> {
    verify_isotopism(a, b, &MapTriple::isomorphism(f.clone()))
}

/// Witness search with the invertible-matrix table cached per field and dimension.
pub struct Searcher {
    field: FieldSpec,
    n: usize,
    caps: SearchCaps,
    table: OnceLock<Result<GlTable, SearchError>>,
}

impl Searcher {
    pub fn new(field: &FieldSpec, n: usize, caps: SearchCaps) -> Self {
        Searcher { field: field.clone(), n, caps, table: OnceLock::new() }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn caps(&self) -> &SearchCaps {
        &self.caps
    }

    fn table(&self) -> Result<&GlTable, SearchError> {
        self.table
            .get_or_init(|| GlTable::with_cap(&self.field, self.n, self.caps.exhaustion))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Runs `visit` on invertible matrices in order until it returns true.
    fn scan<R>(&self, mut visit: impl FnMut(&[FieldElement]) -> Option<R>) -> Result<Option<R>, SearchError> {
        let count = check_exhaustion(&self.field, self.n, self.caps.exhaustion)?;
        if count <= TABLE_LIMIT as u128 {
            return Ok(self.table()?.iter().find_map(visit));
        }
        let mut m = vec![FieldElement::ZERO; self.n * self.n];
        loop {
            if !det_flat(&self.field, self.n, &m).is_zero() {
                if let Some(r) = visit(&m) {
                    return Ok(Some(r));
                }
            }
            if !odometer(&self.field, &mut m) {
                return Ok(None);
            }
        }
    }

    pub fn check_supported(&self, relation: Relation) -> Result<(), SearchError> {
        let cap = self.caps.max_q(relation);
        if self.field.q() > cap {
            return Err(SearchError::FieldCap { relation, q: self.field.q(), cap });
        }
        Ok(())
    }

    fn check_pair(&self, a: &EvolutionAlgebra, b: &EvolutionAlgebra) -> Result<(), SearchError> {
        a.ensure_compatible(b)?;
        if a.field() != &self.field || a.dim() != self.n {
            return Err(AlgebraError::FieldMismatch { left: self.field.to_string(), right: a.field().to_string() }.into());
        }
        Ok(())
    }

    pub fn related(&self, a: &EvolutionAlgebra, b: &EvolutionAlgebra, relation: Relation) -> Result<bool, SearchError> {
        Ok(self.find_witness(a, b, relation)?.is_some())
    }

    /// First witness in enumeration order, or `None` after exhaustion.
    ///
    /// Isomorphisms scan `F`. Strong isotopisms scan `F` and solve `H`;
    /// isotopisms scan `(F, G)` and solve `H`. The solved `H` is the
    /// row-major smallest invertible solution.
    pub fn find_witness(&self, a: &EvolutionAlgebra, b: &EvolutionAlgebra, relation: Relation) -> Result<Option<MapTriple>, SearchError> {
        self.check_pair(a, b)?;
        self.check_supported(relation)?;
        let n = self.n;
        let field = &self.field;
        let t = a.structure().as_slice();
        let tp = b.structure().as_slice();
        match relation {
            Relation::Isomorphism => {
                let found = self.scan(|f| is_isomorphism_flat(field, n, t, tp, f).then(|| f.to_vec()))?;
                Ok(found.map(|f| MapTriple::isomorphism(Matrix::from_vec(n, n, f))))
            }
            Relation::StrongIsotopism => {
                let solver = HSolver::new(field, a.structure());
                let found = self.scan(|f| {
                    let p = products_if_orthogonal(field, n, tp, f, f)?;
                    solver.min_invertible(field, &p).map(|h| (f.to_vec(), h))
                })?;
                Ok(found.map(|(f, h)| MapTriple::strong(Matrix::from_vec(n, n, f), h)))
            }
            Relation::Isotopism => {
                let solver = HSolver::new(field, a.structure());
                let table = self.table()?;
                let found = self.scan(|f| {
                    table.iter().find_map(|g| {
                        let p = products_if_orthogonal(field, n, tp, f, g)?;
                        solver.min_invertible(field, &p).map(|h| (f.to_vec(), g.to_vec(), h))
                    })
                })?;
                Ok(found.map(|(f, g, h)| MapTriple::new(Matrix::from_vec(n, n, f), Matrix::from_vec(n, n, g), h)))
            }
        }
    }
}

pub fn find_witness(a: &EvolutionAlgebra, b: &EvolutionAlgebra, relation: Relation, caps: SearchCaps) -> Result<Option<MapTriple>, SearchError> {
    a.ensure_compatible(b)?;
    Searcher::new(a.field(), a.dim(), caps).find_witness(a, b, relation)
}

/// `F` is an isomorphism iff `f(e_i) f(e_j) = 0` for `i != j` and
/// `f(e_i)^2 = (T F)_i`.
fn is_isomorphism_flat(field: &FieldSpec, n: usize, t: &[FieldElement], tp: &[FieldElement], f: &[FieldElement]) -> bool {
    for i in 0..n {
        for j in i..n {
            for l in 0..n {
                let mut lhs = FieldElement::ZERO;
                for k in 0..n {
                    let c = field.mul(f[i * n + k], f[j * n + k]);
                    if !c.is_zero() {
                        lhs = field.add(lhs, field.mul(c, tp[k * n + l]));
                    }
                }
                let rhs = if i == j {
                    let mut r = FieldElement::ZERO;
                    for k in 0..n {
                        r = field.add(r, field.mul(t[i * n + k], f[k * n + l]));
                    }
                    r
                } else {
                    FieldElement::ZERO
                };
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// Rows `f(e_i) g(e_i)` when every mixed product `f(e_i) g(e_j)`, `i != j`, vanishes.
fn products_if_orthogonal(field: &FieldSpec, n: usize, tp: &[FieldElement], f: &[FieldElement], g: &[FieldElement]) -> Option<Matrix> {
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let mut s = FieldElement::ZERO;
                for k in 0..n {
                    let c = field.mul(f[i * n + k], g[j * n + k]);
                    if !c.is_zero() {
                        s = field.add(s, field.mul(c, tp[k * n + l]));
                    }
                }
                if i == j {
                    p.set(i, l, s);
                } else if !s.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(p)
}

/// Solves `T H = P` for `H` over the affine solution space.
struct HSolver {
    t: Matrix,
    kernel: Vec<Vec<FieldElement>>,
}

impl HSolver {
    fn new(field: &FieldSpec, t: &Matrix) -> Self {
        HSolver { t: t.clone(), kernel: t.right_kernel(field) }
    }

    fn min_invertible(&self, field: &FieldSpec, p: &Matrix) -> Option<Matrix> {
        let h0 = self.t.solve(field, p)?;
        let n = h0.rows();
        let free = self.kernel.len() * n;
        if free == 0 {
            return h0.is_invertible(field).then_some(h0);
        }
        // column c of H may move by any combination of kernel vectors
        let mut coeffs = vec![FieldElement::ZERO; free];
        let mut best: Option<Matrix> = None;
        loop {
            let mut h = h0.clone();
            for c in 0..n {
                for (ki, kv) in self.kernel.iter().enumerate() {
                    let s = coeffs[c * self.kernel.len() + ki];
                    if s.is_zero() {
                        continue;
                    }
                    for (r, &x) in kv.iter().enumerate() {
                        h.set(r, c, field.add(h.get(r, c), field.mul(s, x)));
                    }
                }
            }
            if best.as_ref().is_none_or(|b| h < *b) && h.is_invertible(field) {
                best = Some(h);
            }
            if !odometer(field, &mut coeffs) {
                return best;
            }
        }
    }
}
