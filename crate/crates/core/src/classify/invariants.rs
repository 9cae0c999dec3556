//! Closed-form invariants for two-dimensional evolution algebras.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::evoalg::EvolutionAlgebra;
use crate::gf::{FieldElement, FieldSpec};
use crate::linalg::Matrix;
use crate::search::verify_isomorphism;

pub(crate) fn require_2d(a: &EvolutionAlgebra) -> Result<(), ClassifyError> {
    if a.dim() != 2 {
        return Err(ClassifyError::NotTwoDimensional(a.dim()));
    }
    Ok(())
}

/// The four isotopism classes in dimension two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IsotopismClass {
    #[serde(rename = "ABELIAN")]
    Abelian,
    E1,
    E2,
    E5,
}

impl IsotopismClass {
    pub const ALL: [IsotopismClass; 4] = [IsotopismClass::Abelian, IsotopismClass::E1, IsotopismClass::E2, IsotopismClass::E5];

    pub fn name(self) -> &'static str {
        match self {
            IsotopismClass::Abelian => "ABELIAN",
            IsotopismClass::E1 => "E1",
            IsotopismClass::E2 => "E2",
            IsotopismClass::E5 => "E5",
        }
    }

    /// `(annihilator_dim, derived_dim)` shared by every member.
    pub fn signature(self) -> (usize, usize) {
        match self {
            IsotopismClass::Abelian => (2, 0),
            IsotopismClass::E1 => (1, 1),
            IsotopismClass::E2 => (0, 1),
            IsotopismClass::E5 => (0, 2),
        }
    }

    pub fn representative(self, field: &FieldSpec) -> EvolutionAlgebra {
        let rows: [&[i64]; 2] = match self {
            IsotopismClass::Abelian => [&[0, 0], &[0, 0]],
            IsotopismClass::E1 => [&[1, 0], &[0, 0]],
            IsotopismClass::E2 => [&[1, 0], &[1, 0]],
            IsotopismClass::E5 => [&[1, 0], &[0, 1]],
        };
        EvolutionAlgebra::from_int_rows(field, &rows).expect("2x2 literal")
    }
}

impl fmt::Display for IsotopismClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn isotopism_class_2d(a: &EvolutionAlgebra) -> Result<IsotopismClass, ClassifyError> {
    require_2d(a)?;
    Ok(match a.signature() {
        (2, _) => IsotopismClass::Abelian,
        (1, _) => IsotopismClass::E1,
        (0, 1) => IsotopismClass::E2,
        _ => IsotopismClass::E5,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "ABELIAN")]
    Abelian,
    #[serde(rename = "ANN1_DIAG")]
    Ann1Diag,
    #[serde(rename = "ANN1_NIL")]
    Ann1Nil,
    #[serde(rename = "R1_SQCLASS")]
    R1SqClass,
    #[serde(rename = "R1_EXCEPTIONAL")]
    R1Exceptional,
    #[serde(rename = "R2_A")]
    R2A,
    #[serde(rename = "R2_B")]
    R2B,
    #[serde(rename = "R2_C")]
    R2C,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Abelian => "ABELIAN",
            Family::Ann1Diag => "ANN1_DIAG",
            Family::Ann1Nil => "ANN1_NIL",
            Family::R1SqClass => "R1_SQCLASS",
            Family::R1Exceptional => "R1_EXCEPTIONAL",
            Family::R2A => "R2_A",
            Family::R2B => "R2_B",
            Family::R2C => "R2_C",
        }
    }
}

/// A complete isomorphism invariant: family tag plus normalized parameters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel {
    pub family: Family,
    pub params: Vec<FieldElement>,
}

impl ClassLabel {
    fn new(family: Family, params: Vec<FieldElement>) -> Self {
        ClassLabel { family, params }
    }

    /// `FAMILY` or `FAMILY(p1,p2)` in the field's element encoding.
    pub fn render(&self, field: &FieldSpec) -> String {
        if self.params.is_empty() {
            return self.family.name().to_string();
        }
        let ps: Vec<String> = self.params.iter().map(|&p| field.format(p)).collect();
        format!("{}({})", self.family.name(), ps.join(","))
    }
}

/// An algebra's label, the canonical member of its class, and an isomorphism onto it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub label: ClassLabel,
    pub representative: EvolutionAlgebra,
    pub map: Matrix,
}

/// An algebra with the accumulated isomorphism from the starting algebra.
#[derive(Clone)]
struct Track {
    alg: EvolutionAlgebra,
    map: Matrix,
}

impl Track {
    fn new(a: &EvolutionAlgebra) -> Self {
        Track { alg: a.clone(), map: Matrix::identity(a.dim()) }
    }

    fn monomial(&self, sigma: &[usize], scale: &[FieldElement]) -> Result<Track, ClassifyError> {
        let f = self.alg.field();
        Ok(Track { alg: self.alg.transport_monomial(sigma, scale)?, map: self.map.mul(f, &Matrix::monomial(sigma, scale)) })
    }

    fn scale(&self, s1: FieldElement, s2: FieldElement) -> Result<Track, ClassifyError> {
        self.monomial(&[0, 1], &[s1, s2])
    }

    fn swap(&self) -> Result<Track, ClassifyError> {
        self.monomial(&[1, 0], &[FieldElement::ONE, FieldElement::ONE])
    }

    /// Follow a non-monomial map onto `target`; checked once at the end.
    fn then(&self, target: EvolutionAlgebra, map: &Matrix) -> Track {
        Track { map: self.map.mul(target.field(), map), alg: target }
    }

    fn pair(&self) -> (FieldElement, FieldElement) {
        (self.alg.t(1, 0), self.alg.t(1, 1))
    }
}

fn rows(f: &FieldSpec, r0: [FieldElement; 2], r1: [FieldElement; 2]) -> EvolutionAlgebra {
    EvolutionAlgebra::new(f.clone(), Matrix::from_rows(vec![r0.to_vec(), r1.to_vec()])).expect("2x2")
}

fn key(p: (FieldElement, FieldElement)) -> (u32, u32) {
    (p.0.index(), p.1.index())
}

/// `(c, d) -> (c^2 / d^3, c / d^2)`.
pub fn r2c_involution(f: &FieldSpec, c: FieldElement, d: FieldElement) -> Result<(FieldElement, FieldElement), ClassifyError> {
    let d2 = f.mul(d, d);
    Ok((f.div(f.mul(c, c), f.mul(d2, d))?, f.div(c, d2)?))
}

/// Label, canonical representative and a verified isomorphism onto it.
pub fn canonical_form_2d(a: &EvolutionAlgebra) -> Result<CanonicalForm, ClassifyError> {
    require_2d(a)?;
    let f = a.field().clone();
    let start = Track::new(a);
    let (label, t) = match a.signature() {
        (2, _) => (ClassLabel::new(Family::Abelian, vec![]), start),
        (1, _) => ann_one(&f, start)?,
        (0, 1) => rank_one(&f, start)?,
        _ => rank_two(&f, start)?,
    };
    if !verify_isomorphism(a, &t.alg, &t.map)? {
        return Err(ClassifyError::Witness(format!("reduction of {a} to {} failed verification", t.alg)));
    }
    Ok(CanonicalForm { label, representative: t.alg, map: t.map })
}

pub fn isomorphism_label_2d(a: &EvolutionAlgebra) -> Result<ClassLabel, ClassifyError> {
    Ok(canonical_form_2d(a)?.label)
}

fn ann_one(f: &FieldSpec, t: Track) -> Result<(ClassLabel, Track), ClassifyError> {
    let t = if t.alg.row(0).iter().all(|e| e.is_zero()) { t.swap()? } else { t };
    let (x, y) = (t.alg.t(0, 0), t.alg.t(0, 1));
    let (zero, one) = (f.zero(), f.one());
    if x.is_zero() {
        // e1 e1 = y e2: rescale e2
        let t = t.scale(one, f.inv(y)?)?;
        return Ok((ClassLabel::new(Family::Ann1Nil, vec![]), t));
    }
    // new basis e1' = e1 e1 / x^2 is idempotent
    let map = Matrix::from_rows(vec![vec![x, f.neg(f.div(y, x)?)], vec![zero, one]]);
    let target = rows(f, [one, zero], [zero, zero]);
    Ok((ClassLabel::new(Family::Ann1Diag, vec![]), t.then(target, &map)))
}

fn rank_one(f: &FieldSpec, t: Track) -> Result<(ClassLabel, Track), ClassifyError> {
    let (zero, one) = (f.zero(), f.one());
    let (a, b) = (t.alg.t(0, 0), t.alg.t(0, 1));
    let k = if a.is_zero() { 1 } else { 0 };
    let lambda = f.div(t.alg.t(1, k), t.alg.t(0, k))?;

    // bring e1 e1 to e1, e2 or e1 + e2, then onto the head e1 form (e1, c e1)
    let (c, t) = if b.is_zero() {
        (f.mul(lambda, f.mul(a, a)), t.scale(a, one)?)
    } else if a.is_zero() {
        let c = f.mul(lambda, f.mul(b, b));
        let t = t.scale(one, f.inv(b)?)?;
        // (e1, c e1) -> (e2, c e2) has matrix [[0, 1/c], [1, 0]]
        let swap = Matrix::from_rows(vec![vec![zero, f.inv(c)?], vec![one, zero]]);
        (c, t.then(rows(f, [one, zero], [c, zero]), &swap.inverse(f).expect("invertible")))
    } else {
        let t = t.scale(a, f.div(f.mul(a, a), b)?)?;
        let gamma = f.div(f.mul(lambda, f.mul(b, b)), f.mul(a, a))?;
        let g1 = f.add(gamma, one);
        if g1.is_zero() {
            return Ok((ClassLabel::new(Family::R1Exceptional, vec![]), t));
        }
        let c = f.mul(gamma, f.mul(g1, g1));
        // (e1, c e1) -> (e1 + e2, gamma (e1 + e2)) has matrix [[1/(g+1), 1/(g+1)], [-g, 1]]
        let inv_g1 = f.inv(g1)?;
        let m = Matrix::from_rows(vec![vec![inv_g1, inv_g1], vec![f.neg(gamma), one]]);
        (c, t.then(rows(f, [one, zero], [c, zero]), &m.inverse(f).expect("invertible")))
    };

    let target = *f.unit_orbit(c, 2)?.iter().next().expect("nonempty orbit");
    let m = f
        .units()
        .find(|&m| f.mul(c, f.mul(m, m)) == target)
        .expect("target lies in the square class");
    // (e1, c e1) -> (e1, c m^2 e1) via diag(1, 1/m)
    let t = t.then(rows(f, [one, zero], [target, zero]), &Matrix::diagonal(&[one, f.inv(m)?]));
    Ok((ClassLabel::new(Family::R1SqClass, vec![target]), t))
}

fn rank_two(f: &FieldSpec, t: Track) -> Result<(ClassLabel, Track), ClassifyError> {
    let one = f.one();
    let all_nonzero = t.alg.structure().as_slice().iter().all(|e| !e.is_zero());
    if all_nonzero {
        let (a, b) = (t.alg.t(0, 0), t.alg.t(0, 1));
        let t = t.scale(a, f.div(f.mul(a, a), b)?)?;
        let (c, d) = t.pair();
        let other = t.swap()?.scale(d, f.div(f.mul(d, d), c)?)?;
        let best = if key(other.pair()) < key((c, d)) { other } else { t };
        let (c, d) = best.pair();
        return Ok((ClassLabel::new(Family::R2C, vec![c, d]), best));
    }
    let (t11, t22) = (t.alg.t(0, 0), t.alg.t(1, 1));
    if t11.is_zero() || t22.is_zero() {
        let t = if t11.is_zero() { t } else { t.swap()? };
        let t = t.scale(one, f.inv(t.alg.t(0, 1))?)?;
        let best = r2b_orbit_min(f, t)?;
        let (c, d) = best.pair();
        return Ok((ClassLabel::new(Family::R2B, vec![c, d]), best));
    }
    let t = if t.alg.t(0, 1).is_zero() { t } else { t.swap()? };
    let (a, d) = (t.alg.t(0, 0), t.alg.t(1, 1));
    let t = t.scale(a, d)?;
    let p = t.alg.t(1, 0);
    Ok((ClassLabel::new(Family::R2A, vec![p]), t))
}

/// Breadth-first closure of `(e2, c e1 + d e2)` under `diag(m, m^2)`
/// scalings and, when `d = 0`, the swap that sends `c` to `c^2`.
fn r2b_orbit_min(f: &FieldSpec, start: Track) -> Result<Track, ClassifyError> {
    let one = f.one();
    let mut seen: BTreeMap<(u32, u32), Track> = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(key(start.pair()), start.clone());
    queue.push_back(start);
    while let Some(t) = queue.pop_front() {
        let (c, d) = t.pair();
        let mut next = Vec::new();
        for m in f.units() {
            next.push(t.scale(m, f.mul(m, m))?);
        }
        if d.is_zero() {
            let s = t.swap()?;
            next.push(s.scale(one, f.inv(c)?)?);
        }
        for n in next {
            let k = key(n.pair());
            if let std::collections::btree_map::Entry::Vacant(e) = seen.entry(k) {
                e.insert(n.clone());
                queue.push_back(n);
            }
        }
    }
    Ok(seen.into_iter().next().expect("orbit contains the start").1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evoalg::enumerate_algebras;

    fn gf(q: u64) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    fn alg(f: &FieldSpec, r: &[&[i64]]) -> EvolutionAlgebra {
        EvolutionAlgebra::from_int_rows(f, r).unwrap()
    }

    #[test]
    fn isotopism_classes() {
        let f = gf(5);
        assert_eq!(isotopism_class_2d(&alg(&f, &[&[1, 0], &[0, 0]])).unwrap(), IsotopismClass::E1);
        assert_eq!(isotopism_class_2d(&alg(&f, &[&[1, 0], &[1, 0]])).unwrap(), IsotopismClass::E2);
        assert_eq!(isotopism_class_2d(&alg(&f, &[&[1, 0], &[0, 1]])).unwrap(), IsotopismClass::E5);
        assert_eq!(isotopism_class_2d(&EvolutionAlgebra::abelian(&f, 2)).unwrap(), IsotopismClass::Abelian);
        for c in IsotopismClass::ALL {
            assert_eq!(isotopism_class_2d(&c.representative(&f)).unwrap(), c);
            assert_eq!(c.representative(&f).signature(), c.signature());
        }
        let three = EvolutionAlgebra::abelian(&f, 3);
        assert_eq!(isotopism_class_2d(&three), Err(ClassifyError::NotTwoDimensional(3)));
        assert_eq!(isomorphism_label_2d(&three), Err(ClassifyError::NotTwoDimensional(3)));
    }

    #[test]
    fn label_examples() {
        let f = gf(7);
        let two = isomorphism_label_2d(&alg(&f, &[&[1, 0], &[2, 0]])).unwrap();
        assert_eq!(two, ClassLabel::new(Family::R1SqClass, vec![f.one()]));
        assert_eq!(two, isomorphism_label_2d(&alg(&f, &[&[1, 0], &[1, 0]])).unwrap());
        assert_eq!(isomorphism_label_2d(&alg(&f, &[&[1, 0], &[3, 0]])).unwrap().params, vec![f.from_int(3)]);
        for q in [2, 3, 4, 5, 7] {
            let f = gf(q);
            let x = alg(&f, &[&[1, 1], &[-1, -1]]);
            assert_eq!(isomorphism_label_2d(&x).unwrap().family, Family::R1Exceptional);
        }
    }

    #[test]
    fn r2b_scaling_invariance() {
        let f = gf(5);
        for c in f.units() {
            for d in f.elements() {
                let a = rows(&f, [f.zero(), f.one()], [c, d]);
                let la = isomorphism_label_2d(&a).unwrap();
                assert_eq!(la.family, Family::R2B);
                for m in f.units() {
                    let c2 = f.div(c, f.pow(m, 3)).unwrap();
                    let d2 = f.div(d, f.mul(m, m)).unwrap();
                    assert_eq!(isomorphism_label_2d(&rows(&f, [f.zero(), f.one()], [c2, d2])).unwrap(), la);
                }
            }
        }
    }

    #[test]
    fn characteristic_two() {
        for q in [2, 4] {
            let f = gf(q);
            // every unit is a square, so one R1_SQCLASS label
            for c in f.units() {
                let l = isomorphism_label_2d(&rows(&f, [f.one(), f.zero()], [c, f.zero()])).unwrap();
                assert_eq!(l, ClassLabel::new(Family::R1SqClass, vec![f.one()]));
            }
            let ex = isomorphism_label_2d(&alg(&f, &[&[1, 1], &[1, 1]])).unwrap();
            assert_eq!(ex.family, Family::R1Exceptional);
        }
    }

    #[test]
    fn canonical_maps_verify_everywhere() {
        for q in [2, 3, 4, 5] {
            let f = gf(q);
            for a in enumerate_algebras(&f, 2).unwrap().iter() {
                let cf = canonical_form_2d(&a).unwrap();
                assert_eq!(canonical_form_2d(&cf.representative).unwrap().representative, cf.representative);
                assert_eq!(isotopism_class_2d(&a).unwrap().signature(), cf.representative.signature());
            }
        }
    }

    #[test]
    fn involution() {
        for q in [3, 5, 7, 9] {
            let f = gf(q);
            for c in f.units() {
                for d in f.units() {
                    let (g, h) = r2c_involution(&f, c, d).unwrap();
                    assert_eq!(r2c_involution(&f, g, h).unwrap(), (c, d));
                }
            }
        }
    }
}
