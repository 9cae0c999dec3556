use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use super::{Monomial, MonomialOrder, PolyError, Polynomial, Term};
use crate::gf::{FieldElement, FieldSpec};

/// Guardrail for a single Buchberger run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuchbergerLimits {
    /// Maximum number of S-pairs reduced.
    pub max_pairs: usize,
    /// Maximum number of intermediate basis elements.
    pub max_basis: usize,
}

impl Default for BuchbergerLimits {
    fn default() -> Self {
        BuchbergerLimits { max_pairs: 2_000_000, max_basis: 100_000 }
    }
}

/// A reduced Gröbner basis: monic, sorted by leading monomial (descending).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    nvars: usize,
    order: MonomialOrder,
    polys: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys.iter().filter_map(|p| p.leading_monomial()).collect()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.polys.iter().any(|p| p.leading_monomial().is_some_and(|m| m.is_one()))
    }

    /// Ideal membership by reduction to zero.
    pub fn contains(&self, field: &FieldSpec, f: &Polynomial) -> Result<bool, PolyError> {
        Ok(normal_form(field, f, &self.polys, self.order)?.is_zero())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StandardMonomialCount {
    Finite(u64),
    Infinite,
}

impl StandardMonomialCount {
    pub fn finite(self) -> Option<u64> {
        match self {
            StandardMonomialCount::Finite(n) => Some(n),
            StandardMonomialCount::Infinite => None,
        }
    }
}

fn check_ring(nvars: usize, polys: &[&Polynomial]) -> Result<(), PolyError> {
    for p in polys {
        if p.nvars() != nvars {
            return Err(PolyError::RingMismatch { expected: nvars, got: p.nvars() });
        }
    }
    Ok(())
}

/// `a + c * m * b` on descending term lists.
fn merge_scaled(field: &FieldSpec, ord: MonomialOrder, a: &[Term], b: &[Term], m: &Monomial, c: FieldElement) -> Vec<Term> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while j < b.len() {
        let bm = b[j].0.mul(m);
        if i == a.len() {
            out.push((bm, field.mul(b[j].1, c)));
            j += 1;
            continue;
        }
        match ord.cmp(&a[i].0, &bm) {
            Ordering::Greater => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Less => {
                out.push((bm, field.mul(b[j].1, c)));
                j += 1;
            }
            Ordering::Equal => {
                let s = field.add(a[i].1, field.mul(b[j].1, c));
                if !s.is_zero() {
                    out.push((bm, s));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out
}

struct Reducer<'a> {
    polys: Vec<&'a [Term]>,
    lms: Vec<(Monomial, u32)>,
    lc_inv: Vec<FieldElement>,
}

impl<'a> Reducer<'a> {
    fn new(field: &FieldSpec, divisors: impl IntoIterator<Item = &'a Polynomial>) -> Self {
        let mut r = Reducer { polys: Vec::new(), lms: Vec::new(), lc_inv: Vec::new() };
        for d in divisors {
            if let Some(&(m, c)) = d.terms().first() {
                r.polys.push(d.terms());
                r.lms.push((m, m.support()));
                r.lc_inv.push(field.inv(c).expect("nonzero leading coefficient"));
            }
        }
        r
    }

    #[inline]
    fn find(&self, m: &Monomial) -> Option<usize> {
        let s = m.support();
        self.lms.iter().position(|(lm, ls)| ls & !s == 0 && lm.divides(m))
    }

    /// Full reduction: the remainder has no term divisible by any leading monomial.
    fn reduce(&self, field: &FieldSpec, ord: MonomialOrder, f: &[Term]) -> Vec<Term> {
        let mut p: Vec<Term> = f.to_vec();
        let mut start = 0;
        let mut rem: Vec<Term> = Vec::new();
        while start < p.len() {
            let (m, c) = p[start];
            match self.find(&m) {
                Some(k) => {
                    let lm = self.lms[k].0;
                    let factor = field.neg(field.mul(c, self.lc_inv[k]));
                    // the leading terms cancel; merge the tails only
                    p = merge_scaled(field, ord, &p[start + 1..], &self.polys[k][1..], &m.div(&lm), factor);
                    start = 0;
                }
                None => {
                    rem.push((m, c));
                    start += 1;
                }
            }
        }
        rem
    }
}

/// Remainder of multivariate division of `f` by `divisors` under `ord`.
pub fn normal_form(field: &FieldSpec, f: &Polynomial, divisors: &[Polynomial], ord: MonomialOrder) -> Result<Polynomial, PolyError> {
    let mut all: Vec<&Polynomial> = vec![f];
    all.extend(divisors.iter());
    check_ring(f.nvars(), &all)?;
    let sorted: Vec<Polynomial> = divisors.iter().map(|d| d.with_order(ord)).collect();
    let reducer = Reducer::new(field, sorted.iter());
    let f = f.with_order(ord);
    Ok(Polynomial::from_sorted(f.nvars(), ord, reducer.reduce(field, ord, f.terms())))
}

pub fn s_polynomial(field: &FieldSpec, f: &Polynomial, g: &Polynomial, ord: MonomialOrder) -> Result<Polynomial, PolyError> {
    check_ring(f.nvars(), &[g])?;
    let (f, g) = (f.with_order(ord), g.with_order(ord));
    let (Some(&(fm, fc)), Some(&(gm, gc))) = (f.leading_term(), g.leading_term()) else {
        return Err(PolyError::ZeroPolynomial);
    };
    let l = fm.lcm(&gm);
    let a = f.mul_term(field, &l.div(&fm), field.inv(fc)?);
    Ok(a.add_scaled(field, &g, &l.div(&gm), field.neg(field.inv(gc)?)))
}

pub fn buchberger(field: &FieldSpec, gens: &[Polynomial], ord: MonomialOrder) -> Result<GroebnerBasis, PolyError> {
    buchberger_with_limits(field, gens, ord, BuchbergerLimits::default())
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
///
/// Pairs are taken in order of increasing lcm degree. Pairs with coprime
/// leading monomials and pairs caught by the chain criterion are skipped.
pub fn buchberger_with_limits(
    field: &FieldSpec,
    gens: &[Polynomial],
    ord: MonomialOrder,
    limits: BuchbergerLimits,
) -> Result<GroebnerBasis, PolyError> {
    let nvars = match gens.first() {
        Some(g) => g.nvars(),
        None => return Ok(GroebnerBasis { nvars: 0, order: ord, polys: Vec::new() }),
    };
    check_ring(nvars, &gens.iter().collect::<Vec<_>>())?;
    let unit = || GroebnerBasis {
        nvars,
        order: ord,
        polys: vec![Polynomial::from_sorted(nvars, ord, vec![(Monomial::one(), FieldElement::ONE)])],
    };

    let mut basis: Vec<Polynomial> = Vec::new();
    for g in gens {
        let g = g.with_order(ord);
        if g.is_zero() {
            continue;
        }
        if g.leading_monomial().is_some_and(|m| m.is_one()) {
            return Ok(unit());
        }
        basis.push(g.make_monic(field));
    }
    if basis.is_empty() {
        return Ok(GroebnerBasis { nvars, order: ord, polys: Vec::new() });
    }

    let lm = |b: &Vec<Polynomial>, i: usize| b[i].leading_monomial().expect("basis elements are nonzero");
    // queue keyed by (lcm degree, j, i); `pending` mirrors it for membership tests
    let mut queue: BTreeSet<(u32, usize, usize)> = BTreeSet::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            queue.insert((lm(&basis, i).lcm(&lm(&basis, j)).degree(), j, i));
            pending.insert((i, j));
        }
    }

    let mut processed = 0usize;
    while let Some((_, j, i)) = queue.pop_first() {
        pending.remove(&(i, j));
        let (li, lj) = (lm(&basis, i), lm(&basis, j));
        if li.is_coprime(&lj) {
            continue;
        }
        let l = li.lcm(&lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
                && lm(&basis, k).divides(&l)
        });
        if chain {
            continue;
        }
        processed += 1;
        if processed > limits.max_pairs {
            return Err(PolyError::ResourceLimit(format!("more than {} S-pairs", limits.max_pairs)));
        }
        let s = s_polynomial(field, &basis[i], &basis[j], ord)?;
        let h = Reducer::new(field, basis.iter()).reduce(field, ord, s.terms());
        if h.is_empty() {
            continue;
        }
        let h = Polynomial::from_sorted(nvars, ord, h).make_monic(field);
        if h.leading_monomial().is_some_and(|m| m.is_one()) {
            return Ok(unit());
        }
        let t = basis.len();
        if t + 1 > limits.max_basis {
            return Err(PolyError::ResourceLimit(format!("more than {} basis elements", limits.max_basis)));
        }
        let ht = h.leading_monomial().expect("nonzero");
        basis.push(h);
        for k in 0..t {
            queue.insert((lm(&basis, k).lcm(&ht).degree(), t, k));
            pending.insert((k, t));
        }
    }

    Ok(GroebnerBasis { nvars, order: ord, polys: reduce_basis(field, ord, basis) })
}

/// Minimalize, tail-reduce, make monic and sort a Gröbner basis.
fn reduce_basis(field: &FieldSpec, ord: MonomialOrder, mut basis: Vec<Polynomial>) -> Vec<Polynomial> {
    basis.sort_by(|a, b| ord.cmp(&a.leading_monomial().unwrap(), &b.leading_monomial().unwrap()));
    let mut minimal: Vec<Polynomial> = Vec::new();
    for g in basis {
        let m = g.leading_monomial().unwrap();
        if !minimal.iter().any(|h| h.leading_monomial().unwrap().divides(&m)) {
            minimal.push(g);
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for idx in 0..minimal.len() {
        let others = minimal.iter().enumerate().filter(|&(k, _)| k != idx).map(|(_, p)| p);
        let reducer = Reducer::new(field, others);
        let g = &minimal[idx];
        let mut terms = vec![g.terms()[0]];
        terms.extend(reducer.reduce(field, ord, &g.terms()[1..]));
        reduced.push(Polynomial::from_sorted(g.nvars(), ord, terms).make_monic(field));
    }
    reduced.sort_by(|a, b| ord.cmp(&b.leading_monomial().unwrap(), &a.leading_monomial().unwrap()));
    reduced
}

/// Number of monomials outside the initial ideal.
pub fn standard_monomial_count(basis: &GroebnerBasis) -> StandardMonomialCount {
    let nvars = basis.nvars;
    let lms = basis.leading_monomials();
    if lms.iter().any(|m| m.is_one()) {
        return StandardMonomialCount::Finite(0);
    }
    let mut bounds = vec![u32::MAX; nvars];
    for m in &lms {
        if let Some((i, e)) = m.pure_power() {
            bounds[i] = bounds[i].min(e);
        }
    }
    if bounds.contains(&u32::MAX) {
        return StandardMonomialCount::Infinite;
    }
    StandardMonomialCount::Finite(count_outside(0, &bounds, lms))
}

/// Standard monomials in variables `level..`, sliced by the exponent of `level`.
fn count_outside(level: usize, bounds: &[u32], lms: Vec<Monomial>) -> u64 {
    if lms.iter().any(|m| m.is_one()) {
        return 0;
    }
    if level == bounds.len() {
        return 1;
    }
    let mut total = 0;
    for e in 0..bounds[level] {
        let slice: Vec<Monomial> = lms
            .iter()
            .filter(|m| m.exponent(level) <= e)
            .map(|m| {
                let mut m = *m;
                m.exps[level] = 0;
                m
            })
            .collect();
        if slice.iter().any(|m| m.is_one()) {
            // larger exponents only add generators
            break;
        }
        total += count_outside(level + 1, bounds, slice);
    }
    total
}
