//! Polynomial ideals whose rational points are the isomorphisms or
//! isotopisms between two evolution algebras.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evoalg::{AlgebraError, EvolutionAlgebra};
use crate::gf::{FieldElement, FieldSpec};
use crate::polyring::{
    buchberger_with_limits, standard_monomial_count, BuchbergerLimits, Monomial, MonomialOrder, PolyError, Polynomial, Ring,
    StandardMonomialCount,
};
use crate::search::{GlTable, Relation, SearchError, DEFAULT_EXHAUSTION_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("{cap} cap exceeded: {needed} > {limit}")]
    CapExceeded { cap: &'static str, needed: u128, limit: u128 },
    #[error("strong isotopism has no ideal formulation here; use isomorphism or isotopism")]
    UnsupportedRelation,
    #[error("ideal is not zero-dimensional")]
    NotZeroDimensional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdealKind {
    Isomorphism,
    Isotopism,
}

impl IdealKind {
    pub fn relation(self) -> Relation {
        match self {
            IdealKind::Isomorphism => Relation::Isomorphism,
            IdealKind::Isotopism => Relation::Isotopism,
        }
    }

    pub fn from_relation(r: Relation) -> Result<Self, IdealError> {
        match r {
            Relation::Isomorphism => Ok(IdealKind::Isomorphism),
            Relation::Isotopism => Ok(IdealKind::Isotopism),
            Relation::StrongIsotopism => Err(IdealError::UnsupportedRelation),
        }
    }
}

/// How invertibility of each matrix of unknowns is imposed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetEncoding {
    /// `det(M)^(q-1) - 1`.
    #[default]
    Power,
    /// `u det(M) - 1` with an auxiliary variable `u`.
    Rabinowitsch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Groebner,
    Exhaustive,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMethod::Groebner => "groebner",
            CountMethod::Exhaustive => "exhaustive",
        })
    }
}

impl FromStr for CountMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "groebner" | "gröbner" => Ok(CountMethod::Groebner),
            "exhaustive" | "bruteforce" => Ok(CountMethod::Exhaustive),
            other => Err(format!("unknown counting method '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountCaps {
    /// Bound on `q^(#matrix variables)` for exhaustive counting.
    pub exhaustion: u64,
    /// Largest `q` for Gröbner counting of isotopism ideals.
    pub groebner_isotopism_max_q: u32,
    pub buchberger: BuchbergerLimits,
}

impl Default for CountCaps {
    fn default() -> Self {
        CountCaps { exhaustion: DEFAULT_EXHAUSTION_CAP, groebner_isotopism_max_q: 3, buchberger: BuchbergerLimits::default() }
    }
}

/// Generators of an isomorphism or isotopism ideal, grouped by role.
#[derive(Clone, Debug)]
pub struct IdealSpec {
    kind: IdealKind,
    encoding: DetEncoding,
    order: MonomialOrder,
    ring: Ring,
    left: EvolutionAlgebra,
    right: EvolutionAlgebra,
    /// Coefficient equations of `f(e_i) g(e_j) = h(e_i e_j)`.
    relations: Vec<Polynomial>,
    det_constraints: Vec<Polynomial>,
    field_equations: Vec<Polynomial>,
}

impl IdealSpec {
    pub fn kind(&self) -> IdealKind {
        self.kind
    }

    pub fn encoding(&self) -> DetEncoding {
        self.encoding
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn field(&self) -> &FieldSpec {
        self.ring.field()
    }

    pub fn left(&self) -> &EvolutionAlgebra {
        &self.left
    }

    pub fn right(&self) -> &EvolutionAlgebra {
        &self.right
    }

    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }

    pub fn det_constraints(&self) -> &[Polynomial] {
        &self.det_constraints
    }

    pub fn field_equations(&self) -> &[Polynomial] {
        &self.field_equations
    }

    /// Number of matrices of unknowns (1 or 3).
    pub fn matrix_count(&self) -> usize {
        match self.kind {
            IdealKind::Isomorphism => 1,
            IdealKind::Isotopism => 3,
        }
    }

    /// Variables standing for matrix entries, excluding auxiliaries.
    pub fn matrix_variable_count(&self) -> usize {
        let n = self.left.dim();
        self.matrix_count() * n * n
    }

    pub fn generators(&self) -> Vec<Polynomial> {
        let mut g = self.relations.clone();
        g.extend(self.det_constraints.iter().cloned());
        g.extend(self.field_equations.iter().cloned());
        g
    }
}

pub fn isom_ideal(a: &EvolutionAlgebra, b: &EvolutionAlgebra) -> Result<IdealSpec, IdealError> {
    build_ideal(IdealKind::Isomorphism, a, b, DetEncoding::Power, MonomialOrder::Grevlex)
}

pub fn isot_ideal(a: &EvolutionAlgebra, b: &EvolutionAlgebra) -> Result<IdealSpec, IdealError> {
    build_ideal(IdealKind::Isotopism, a, b, DetEncoding::Power, MonomialOrder::Grevlex)
}

/// Variable layout: `f_ij` first, then `g_ij` and `h_ij` for isotopisms,
/// then one auxiliary per matrix under the Rabinowitsch encoding.
pub fn build_ideal(
    kind: IdealKind,
    a: &EvolutionAlgebra,
    b: &EvolutionAlgebra,
    encoding: DetEncoding,
    order: MonomialOrder,
) -> Result<IdealSpec, IdealError> {
    a.ensure_compatible(b)?;
    let field = a.field().clone();
    let n = a.dim();
    let letters: &[char] = match kind {
        IdealKind::Isomorphism => &['f'],
        IdealKind::Isotopism => &['f', 'g', 'h'],
    };
    let mut names: Vec<String> = Vec::new();
    for c in letters {
        for i in 1..=n {
            for j in 1..=n {
                names.push(format!("{c}{i}{j}"));
            }
        }
    }
    if encoding == DetEncoding::Rabinowitsch {
        names.extend(letters.iter().map(|c| format!("u{c}")));
    }
    let ring = Ring::new(field.clone(), names)?;
    let nn = n * n;
    let var = |mat: usize, i: usize, j: usize| Monomial::var(mat * nn + i * n + j);
    // isomorphisms use the same unknowns for f, g and h
    let (fm, gm, hm) = match kind {
        IdealKind::Isomorphism => (0, 0, 0),
        IdealKind::Isotopism => (0, 1, 2),
    };

    let mut relations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if kind == IdealKind::Isomorphism && j < i {
                continue;
            }
            for l in 0..n {
                let mut terms = Vec::new();
                for k in 0..n {
                    terms.push((var(fm, i, k).mul(&var(gm, j, k)), b.t(k, l)));
                }
                if i == j {
                    for k in 0..n {
                        terms.push((var(hm, k, l), field.neg(a.t(i, k))));
                    }
                }
                let p = ring.polynomial(order, terms);
                if !p.is_zero() {
                    relations.push(p);
                }
            }
        }
    }

    let mut det_constraints = Vec::new();
    let mut field_equations: Vec<Polynomial> = (0..letters.len() * nn).map(|v| ring.field_equation(v, order)).collect();
    for mat in 0..letters.len() {
        let det = determinant(&ring, order, n, mat * nn);
        match encoding {
            DetEncoding::Power => {
                let p = power_mod_field(&ring, &det, (field.q() - 1) as u64);
                det_constraints.push(p.sub(&field, &ring.constant(FieldElement::ONE, order)));
            }
            DetEncoding::Rabinowitsch => {
                let u = letters.len() * nn + mat;
                let p = det.mul(&field, &ring.var(u, order));
                det_constraints.push(p.sub(&field, &ring.constant(FieldElement::ONE, order)));
                field_equations.push(ring.field_equation(u, order));
            }
        }
    }

    Ok(IdealSpec {
        kind,
        encoding,
        order,
        ring,
        left: a.clone(),
        right: b.clone(),
        relations,
        det_constraints,
        field_equations,
    })
}

/// Leibniz expansion over the `n x n` block of variables starting at `offset`.
fn determinant(ring: &Ring, order: MonomialOrder, n: usize, offset: usize) -> Polynomial {
    let field = ring.field();
    let mut terms = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p, sign| {
        let mut m = Monomial::one();
        for (i, &j) in p.iter().enumerate() {
            m = m.mul(&Monomial::var(offset + i * n + j));
        }
        terms.push((m, if sign { field.one() } else { field.neg(field.one()) }));
    });
    ring.polynomial(order, terms)
}

fn permutations(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize], bool)) {
    fn rec(p: &mut Vec<usize>, k: usize, even: bool, visit: &mut dyn FnMut(&[usize], bool)) {
        if k == p.len() {
            visit(p, even);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(p, k + 1, if i == k { even } else { !even }, visit);
            p.swap(k, i);
        }
    }
    rec(p, k, true, visit)
}

/// `f^e` reduced modulo the field equations after every product.
fn power_mod_field(ring: &Ring, f: &Polynomial, mut e: u64) -> Polynomial {
    let field = ring.field();
    let mut acc = ring.constant(FieldElement::ONE, f.order());
    let mut base = ring.reduce_by_field_equations(f);
    while e > 0 {
        if e & 1 == 1 {
            acc = ring.reduce_by_field_equations(&acc.mul(field, &base));
        }
        e >>= 1;
        if e > 0 {
            base = ring.reduce_by_field_equations(&base.mul(field, &base));
        }
    }
    acc
}

pub fn count_points(spec: &IdealSpec, method: CountMethod) -> Result<u64, IdealError> {
    count_points_with_caps(spec, method, &CountCaps::default())
}

pub fn count_points_with_caps(spec: &IdealSpec, method: CountMethod, caps: &CountCaps) -> Result<u64, IdealError> {
    match method {
        CountMethod::Groebner => count_groebner(spec, caps),
        CountMethod::Exhaustive => count_exhaustive(spec, caps),
    }
}

fn count_groebner(spec: &IdealSpec, caps: &CountCaps) -> Result<u64, IdealError> {
    let q = spec.field().q();
    if spec.kind == IdealKind::Isotopism && q > caps.groebner_isotopism_max_q {
        return Err(IdealError::CapExceeded {
            cap: "groebner isotopism q",
            needed: q as u128,
            limit: caps.groebner_isotopism_max_q as u128,
        });
    }
    let gb = buchberger_with_limits(spec.field(), &spec.generators(), spec.order, caps.buchberger)?;
    match standard_monomial_count(&gb) {
        StandardMonomialCount::Finite(c) => Ok(c),
        StandardMonomialCount::Infinite => Err(IdealError::NotZeroDimensional),
    }
}

/// A relation compiled for fast evaluation: `(coefficient, [(var, exp)])` per term.
struct Compiled {
    terms: Vec<(FieldElement, Vec<(usize, u32)>)>,
}

impl Compiled {
    fn new(p: &Polynomial) -> Self {
        let nv = p.nvars();
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| (*c, (0..nv).filter(|&v| m.exponent(v) > 0).map(|v| (v, m.exponent(v))).collect()))
            .collect();
        Compiled { terms }
    }

    fn last_var(&self) -> usize {
        self.terms.iter().flat_map(|(_, vs)| vs.iter().map(|&(v, _)| v)).max().unwrap_or(0)
    }

    fn vanishes(&self, field: &FieldSpec, point: &[FieldElement]) -> bool {
        let mut acc = FieldElement::ZERO;
        for (c, vs) in &self.terms {
            let mut t = *c;
            for &(v, e) in vs {
                t = field.mul(t, field.pow(point[v], e as u64));
            }
            acc = field.add(acc, t);
        }
        acc.is_zero()
    }
}

/// Counts assignments of the matrix unknowns that make every relation vanish
/// with each matrix invertible. Relations are checked as soon as all their
/// variables are assigned.
fn count_exhaustive(spec: &IdealSpec, caps: &CountCaps) -> Result<u64, IdealError> {
    let field = spec.field();
    let n = spec.left.dim();
    let nn = n * n;
    let vars = spec.matrix_variable_count();
    let needed = (field.q() as u128).checked_pow(vars as u32).unwrap_or(u128::MAX);
    if needed > caps.exhaustion as u128 {
        return Err(IdealError::CapExceeded { cap: "exhaustion", needed, limit: caps.exhaustion as u128 });
    }
    let gl = GlTable::with_cap(field, n, caps.exhaustion)?;
    let mats = spec.matrix_count();
    let mut stages: Vec<Vec<Compiled>> = (0..mats).map(|_| Vec::new()).collect();
    for r in &spec.relations {
        let c = Compiled::new(r);
        stages[c.last_var() / nn].push(c);
    }
    let mut point = vec![FieldElement::ZERO; vars];
    Ok(count_stage(field, &gl, &stages, 0, nn, &mut point))
}

fn count_stage(field: &FieldSpec, gl: &GlTable, stages: &[Vec<Compiled>], stage: usize, nn: usize, point: &mut [FieldElement]) -> u64 {
    if stage == stages.len() {
        return 1;
    }
    let mut total = 0;
    for m in gl.iter() {
        point[stage * nn..(stage + 1) * nn].copy_from_slice(m);
        if stages[stage].iter().all(|c| c.vanishes(field, point)) {
            total += count_stage(field, gl, stages, stage + 1, nn, point);
        }
    }
    total
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

    fn both(spec: &IdealSpec) -> (u64, u64) {
        (count_points(spec, CountMethod::Groebner).unwrap(), count_points(spec, CountMethod::Exhaustive).unwrap())
    }

    #[test]
    fn abelian_counts() {
        let f = gf(2);
        let z = EvolutionAlgebra::abelian(&f, 2);
        let spec = isom_ideal(&z, &z).unwrap();
        assert!(spec.relations().is_empty());
        assert_eq!(both(&spec), (6, 6));
        assert_eq!(both(&isot_ideal(&z, &z).unwrap()), (216, 216));
    }

    #[test]
    fn e1_e4() {
        let f = gf(2);
        let e1 = alg(&f, &[&[1, 0], &[0, 0]]);
        let e4 = alg(&f, &[&[0, 1], &[0, 0]]);
        assert_eq!(both(&isom_ideal(&e1, &e4).unwrap()), (0, 0));
        let (g, x) = both(&isot_ideal(&e1, &e4).unwrap());
        assert_eq!(g, x);
        assert!(g > 0);
        assert!(count_points(&isom_ideal(&e1, &e1).unwrap(), CountMethod::Groebner).unwrap() >= 1);
        let z = EvolutionAlgebra::abelian(&f, 2);
        assert_eq!(both(&isot_ideal(&z, &e1).unwrap()), (0, 0));
    }

    #[test]
    fn spec_examples() {
        let f = gf(2);
        let a = alg(&f, &[&[1, 0], &[1, 0]]);
        let b = alg(&f, &[&[1, 1], &[1, 1]]);
        assert_eq!(both(&isom_ideal(&a, &b).unwrap()), (0, 0));
        let e5 = alg(&f, &[&[1, 0], &[0, 1]]);
        assert_eq!(both(&isot_ideal(&a, &e5).unwrap()), (0, 0));
    }

    #[test]
    fn encodings_agree() {
        for q in [2u64, 3] {
            let f = gf(q);
            let samples = [
                alg(&f, &[&[0, 0], &[0, 0]]),
                alg(&f, &[&[1, 0], &[0, 0]]),
                alg(&f, &[&[1, 1], &[1, 1]]),
                alg(&f, &[&[0, 1], &[1, 0]]),
                alg(&f, &[&[1, 0], &[1, 1]]),
            ];
            for a in &samples {
                for b in &samples {
                    let lit = count_points(&isom_ideal(a, b).unwrap(), CountMethod::Groebner).unwrap();
                    let rab = build_ideal(IdealKind::Isomorphism, a, b, DetEncoding::Rabinowitsch, MonomialOrder::Grevlex).unwrap();
                    assert_eq!(count_points(&rab, CountMethod::Groebner).unwrap(), lit, "{a} vs {b}");
                    assert_eq!(count_points(&rab, CountMethod::Exhaustive).unwrap(), lit);
                }
            }
        }
    }

    #[test]
    fn determinant_polynomial() {
        let f = gf(5);
        let ring = Ring::with_indexed_vars(f.clone(), 4).unwrap();
        let d = determinant(&ring, MonomialOrder::Lex, 2, 0);
        assert_eq!(d, ring.parse("x1*x4 - x2*x3", MonomialOrder::Lex).unwrap());
        let ring9 = Ring::with_indexed_vars(f.clone(), 9).unwrap();
        assert_eq!(determinant(&ring9, MonomialOrder::Lex, 3, 0).len(), 6);
        // det^(q-1) is 1 exactly on invertible matrices
        let p = power_mod_field(&ring, &d, 4);
        for m in [[1, 2, 3, 4], [1, 2, 2, 4], [0, 1, 1, 0]] {
            let pt: Vec<_> = m.iter().map(|&x| f.from_int(x)).collect();
            let inv = !f.sub(f.mul(pt[0], pt[3]), f.mul(pt[1], pt[2])).is_zero();
            assert_eq!(p.eval(&f, &pt), if inv { f.one() } else { f.zero() });
        }
    }

    #[test]
    fn caps() {
        let f = gf(5);
        let a = alg(&f, &[&[1, 0], &[0, 0]]);
        let spec = isot_ideal(&a, &a).unwrap();
        assert!(matches!(count_points(&spec, CountMethod::Groebner), Err(IdealError::CapExceeded { .. })));
        assert!(matches!(count_points(&spec, CountMethod::Exhaustive), Err(IdealError::CapExceeded { cap: "exhaustion", .. })));
        assert_eq!(IdealKind::from_relation(Relation::StrongIsotopism).unwrap_err(), IdealError::UnsupportedRelation);
        let other = EvolutionAlgebra::abelian(&gf(3), 2);
        assert!(matches!(isom_ideal(&a, &other), Err(IdealError::Algebra(_))));
    }
}
