//! Sparse multivariate polynomials over GF(q) and Gröbner bases.

mod groebner;

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec, GfError};

pub use groebner::{
    buchberger, buchberger_with_limits, normal_form, s_polynomial, standard_monomial_count, BuchbergerLimits,
    GroebnerBasis, StandardMonomialCount,
};

/// Upper bound on the number of ring variables.
pub const MAX_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("ring mismatch: expected {expected} variables, got {got}")]
    RingMismatch { expected: usize, got: usize },
    #[error("at most {MAX_VARS} variables are supported, got {0}")]
    TooManyVariables(usize),
    #[error("S-polynomial of a zero polynomial")]
    ZeroPolynomial,
    #[error("resource limit reached: {0}")]
    ResourceLimit(String),
    #[error("cannot parse polynomial {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error(transparent)]
    Field(#[from] GfError),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: [u32; MAX_VARS],
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let last = self.exps.iter().rposition(|&e| e != 0).map_or(0, |i| i + 1);
        write!(f, "{:?}", &self.exps[..last])
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(i: usize) -> Self {
        let mut m = Monomial::default();
        m.exps[i] = 1;
        m
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS);
        let mut m = Monomial::default();
        m.exps[..exps.len()].copy_from_slice(exps);
        m
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn exponents(&self, nvars: usize) -> &[u32] {
        &self.exps[..nvars]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Bit `i` set iff variable `i` occurs.
    #[inline]
    pub fn support(&self) -> u32 {
        self.exps.iter().enumerate().fold(0, |acc, (i, &e)| if e > 0 { acc | (1 << i) } else { acc })
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(&other.exps) {
            *a += b;
        }
        m
    }

    /// `self / other`; the caller guarantees divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(&other.exps) {
            *a -= b;
        }
        m
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(&other.exps) {
            *a = (*a).max(*b);
        }
        m
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.support() & other.support() == 0
    }

    /// The single variable of a pure power `x_i^e` (e >= 1), if it is one.
    pub fn pure_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some((i, e));
            }
        }
        found
    }
}

/// Term order; variables are ordered by index, `x_0 > x_1 > ...`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialOrder {
    Lex,
    #[default]
    Grevlex,
}

impl MonomialOrder {
    #[inline]
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => {
                for (x, y) in a.exps.iter().zip(&b.exps) {
                    if x != y {
                        return x.cmp(y);
                    }
                }
                Ordering::Equal
            }
            MonomialOrder::Grevlex => match a.degree().cmp(&b.degree()) {
                Ordering::Equal => {
                    for (x, y) in a.exps.iter().zip(&b.exps).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                }
                other => other,
            },
        }
    }
}

impl std::str::FromStr for MonomialOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lex" => Ok(MonomialOrder::Lex),
            "grevlex" => Ok(MonomialOrder::Grevlex),
            other => Err(format!("unknown monomial order {other:?}")),
        }
    }
}

impl std::fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MonomialOrder::Lex => "lex",
            MonomialOrder::Grevlex => "grevlex",
        })
    }
}

pub type Term = (Monomial, FieldElement);

/// Terms with nonzero coefficients, sorted strictly descending under `order`.
#[derive(Clone, Debug)]
pub struct Polynomial {
    nvars: usize,
    order: MonomialOrder,
    terms: Vec<Term>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        if self.nvars != other.nvars {
            return false;
        }
        if self.order == other.order {
            self.terms == other.terms
        } else {
            self.terms == other.with_order(self.order).terms
        }
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(nvars: usize, order: MonomialOrder) -> Self {
        Polynomial { nvars, order, terms: Vec::new() }
    }

    /// Collects like terms and drops zeros.
    pub fn from_terms(field: &FieldSpec, nvars: usize, order: MonomialOrder, mut terms: Vec<Term>) -> Self {
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = field.add(last.1, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|t| !t.1.is_zero());
        Polynomial { nvars, order, terms: out }
    }

    pub(crate) fn from_sorted(nvars: usize, order: MonomialOrder, terms: Vec<Term>) -> Self {
        Polynomial { nvars, order, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| t.0.is_one())
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn leading_monomial(&self) -> Option<Monomial> {
        self.terms.first().map(|t| t.0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn with_order(&self, order: MonomialOrder) -> Polynomial {
        if order == self.order {
            return self.clone();
        }
        let mut terms = self.terms.clone();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Polynomial { nvars: self.nvars, order, terms }
    }

    pub fn is_monic(&self) -> bool {
        self.terms.first().is_none_or(|t| t.1 == FieldElement::ONE)
    }

    pub fn make_monic(&self, field: &FieldSpec) -> Polynomial {
        match self.terms.first() {
            None => self.clone(),
            Some(&(_, lc)) => {
                let inv = field.inv(lc).expect("leading coefficient is nonzero");
                self.scale(field, inv)
            }
        }
    }

    pub fn scale(&self, field: &FieldSpec, c: FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.order);
        }
        let terms = self.terms.iter().map(|&(m, a)| (m, field.mul(a, c))).collect();
        Polynomial { nvars: self.nvars, order: self.order, terms }
    }

    pub fn mul_term(&self, field: &FieldSpec, m: &Monomial, c: FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars, self.order);
        }
        // multiplication by a monomial preserves the order of terms
        let terms = self.terms.iter().map(|&(t, a)| (t.mul(m), field.mul(a, c))).collect();
        Polynomial { nvars: self.nvars, order: self.order, terms }
    }

    /// `self + c * m * other`, merging the sorted term lists.
    pub fn add_scaled(&self, field: &FieldSpec, other: &Polynomial, m: &Monomial, c: FieldElement) -> Polynomial {
        let ord = self.order;
        let other = if other.order == ord { std::borrow::Cow::Borrowed(other) } else { std::borrow::Cow::Owned(other.with_order(ord)) };
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            if j == b.len() {
                out.extend_from_slice(&a[i..]);
                break;
            }
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
        out.retain(|t| !t.1.is_zero());
        Polynomial { nvars: self.nvars, order: ord, terms: out }
    }

    pub fn add(&self, field: &FieldSpec, other: &Polynomial) -> Polynomial {
        self.add_scaled(field, other, &Monomial::one(), FieldElement::ONE)
    }

    pub fn sub(&self, field: &FieldSpec, other: &Polynomial) -> Polynomial {
        self.add_scaled(field, other, &Monomial::one(), field.neg(FieldElement::ONE))
    }

    pub fn mul(&self, field: &FieldSpec, other: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero(self.nvars, self.order);
        for &(m, c) in &other.terms {
            acc = acc.add_scaled(field, self, &m, c);
        }
        acc
    }

    pub fn eval(&self, field: &FieldSpec, point: &[FieldElement]) -> FieldElement {
        let mut acc = FieldElement::ZERO;
        for &(m, c) in &self.terms {
            let mut v = c;
            for (i, &x) in point.iter().enumerate().take(self.nvars) {
                let e = m.exps[i];
                if e > 0 {
                    v = field.mul(v, field.pow(x, e as u64));
                }
            }
            acc = field.add(acc, v);
        }
        acc
    }
}

/// Variable names plus the coefficient field.
#[derive(Clone, Debug)]
pub struct Ring {
    field: FieldSpec,
    names: Vec<String>,
}

impl Ring {
    pub fn new(field: FieldSpec, names: Vec<String>) -> Result<Self, PolyError> {
        if names.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(names.len()));
        }
        Ok(Ring { field, names })
    }

    /// Variables `x1..xn`.
    pub fn with_indexed_vars(field: FieldSpec, n: usize) -> Result<Self, PolyError> {
        Self::new(field, (1..=n).map(|i| format!("x{i}")).collect())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn check(&self, f: &Polynomial) -> Result<(), PolyError> {
        if f.nvars != self.nvars() {
            return Err(PolyError::RingMismatch { expected: self.nvars(), got: f.nvars });
        }
        Ok(())
    }

    pub fn zero(&self, order: MonomialOrder) -> Polynomial {
        Polynomial::zero(self.nvars(), order)
    }

    pub fn constant(&self, c: FieldElement, order: MonomialOrder) -> Polynomial {
        Polynomial::from_terms(&self.field, self.nvars(), order, vec![(Monomial::one(), c)])
    }

    pub fn var(&self, i: usize, order: MonomialOrder) -> Polynomial {
        Polynomial::from_sorted(self.nvars(), order, vec![(Monomial::var(i), FieldElement::ONE)])
    }

    pub fn polynomial(&self, order: MonomialOrder, terms: Vec<Term>) -> Polynomial {
        Polynomial::from_terms(&self.field, self.nvars(), order, terms)
    }

    /// `x_i^q - x_i`.
    pub fn field_equation(&self, i: usize, order: MonomialOrder) -> Polynomial {
        let q = self.field.q();
        let mut xq = Monomial::one();
        xq.exps[i] = q;
        let minus_one = self.field.neg(FieldElement::ONE);
        self.polynomial(order, vec![(xq, FieldElement::ONE), (Monomial::var(i), minus_one)])
    }

    /// Rewrite `x^e` with `e >= q` as `x^(e - (q - 1))`, which is the normal
    /// form modulo the field equations.
    pub fn reduce_by_field_equations(&self, f: &Polynomial) -> Polynomial {
        let q = self.field.q();
        let terms = f
            .terms
            .iter()
            .map(|&(mut m, c)| {
                for e in m.exps.iter_mut() {
                    while *e >= q {
                        *e -= q - 1;
                    }
                }
                (m, c)
            })
            .collect();
        Polynomial::from_terms(&self.field, f.nvars, f.order, terms)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let mut parts = Vec::new();
        for (i, name) in self.names.iter().enumerate() {
            match m.exps[i] {
                0 => {}
                1 => parts.push(name.clone()),
                e => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// `c*x1^a1*...` terms joined by ` + `, coefficients in the element encoding.
    pub fn format(&self, f: &Polynomial) -> String {
        if f.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in f.terms.iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            let coeff = self.field.format(*c);
            if m.is_one() {
                out.push_str(&coeff);
            } else if *c == FieldElement::ONE {
                out.push_str(&self.format_monomial(m));
            } else {
                let _ = write!(out, "{}*{}", coeff, self.format_monomial(m));
            }
        }
        out
    }

    /// Parse `sum of terms c*x1^a1*...`; `+`/`-` separate terms, integer
    /// coefficients map through `Z -> GF(q)`, bracketed ones use the element encoding.
    pub fn parse(&self, text: &str, order: MonomialOrder) -> Result<Polynomial, PolyError> {
        let perr = |reason: &str| PolyError::Parse { text: text.to_string(), reason: reason.to_string() };
        let f = &self.field;
        let mut terms: Vec<Term> = Vec::new();
        let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(perr("empty input"));
        }
        let mut pos = 0;
        while pos < chars.len() {
            let mut negative = false;
            while pos < chars.len() && (chars[pos] == '+' || chars[pos] == '-') {
                if chars[pos] == '-' {
                    negative = !negative;
                }
                pos += 1;
            }
            let start = pos;
            let mut depth = 0;
            while pos < chars.len() && (depth > 0 || (chars[pos] != '+' && chars[pos] != '-')) {
                match chars[pos] {
                    '[' => depth += 1,
                    ']' => depth -= 1,
                    _ => {}
                }
                pos += 1;
            }
            let term: String = chars[start..pos].iter().collect();
            if term.is_empty() {
                return Err(perr("dangling sign"));
            }
            let mut coeff = FieldElement::ONE;
            let mut mono = Monomial::one();
            for factor in term.split('*') {
                if factor.is_empty() {
                    return Err(perr("empty factor"));
                }
                if factor.starts_with('[') {
                    coeff = f.mul(coeff, f.parse(factor)?);
                } else if factor.chars().all(|c| c.is_ascii_digit()) {
                    let v: i64 = factor.parse().map_err(|_| perr("coefficient out of range"))?;
                    coeff = f.mul(coeff, f.from_int(v));
                } else {
                    let (name, exp) = match factor.split_once('^') {
                        Some((n, e)) => (n, e.parse::<u32>().map_err(|_| perr("bad exponent"))?),
                        None => (factor, 1),
                    };
                    let idx = self
                        .names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| perr(&format!("unknown variable {name:?}")))?;
                    mono.exps[idx] += exp;
                }
            }
            if negative {
                coeff = f.neg(coeff);
            }
            terms.push((mono, coeff));
        }
        Ok(self.polynomial(order, terms))
    }
}
