//! Partition drivers and closed-form classifiers.

mod invariants;
pub mod listing;
mod normal_form;
pub mod proof_maps;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use invariants::{canonical_form_2d, isomorphism_label_2d, isotopism_class_2d, r2c_involution, CanonicalForm, ClassLabel, Family, IsotopismClass};
pub use normal_form::{is_strong_normal, strong_isotopy_normal_form};

use crate::evoalg::{enumerate_algebras_with_cap, AlgebraError, EvolutionAlgebra, DEFAULT_ENUMERATION_CAP};
use crate::gf::{FieldSpec, GfError};
use crate::ideals::{build_ideal, count_points_with_caps, CountCaps, CountMethod, DetEncoding, IdealError, IdealKind};
use crate::polyring::MonomialOrder;
use crate::search::{Relation, SearchCaps, SearchError, Searcher};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error("closed-form invariants need dimension 2, got {0}")]
    NotTwoDimensional(usize),
    #[error("{relation} is not supported by the {method} method")]
    Unsupported { relation: Relation, method: Method },
    #[error("oracle failed on ({left}) vs ({right}): {source}")]
    Oracle { left: String, right: String, source: Box<ClassifyError> },
    #[error("witness check failed: {0}")]
    Witness(String),
}

impl ClassifyError {
    /// True when the failure comes from a configured size or resource cap.
    pub fn is_cap(&self) -> bool {
        match self {
            ClassifyError::Oracle { source, .. } => source.is_cap(),
            ClassifyError::Search(SearchError::FieldCap { .. } | SearchError::ExhaustionCap { .. }) => true,
            ClassifyError::Algebra(AlgebraError::CapExceeded { .. }) => true,
            ClassifyError::Field(GfError::CapExceeded { .. }) => true,
            ClassifyError::Ideal(e) => matches!(
                e,
                IdealError::CapExceeded { .. }
                    | IdealError::Search(SearchError::FieldCap { .. } | SearchError::ExhaustionCap { .. })
                    | IdealError::Poly(crate::polyring::PolyError::ResourceLimit(_))
            ),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bruteforce,
    Groebner,
    Invariant,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Bruteforce, Method::Groebner, Method::Invariant];

    pub fn name(self) -> &'static str {
        match self {
            Method::Bruteforce => "bruteforce",
            Method::Groebner => "groebner",
            Method::Invariant => "invariant",
        }
    }

    pub fn supports(self, relation: Relation) -> bool {
        !(self != Method::Bruteforce && relation == Relation::StrongIsotopism)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "bruteforce" | "search" => Ok(Method::Bruteforce),
            "groebner" | "gröbner" => Ok(Method::Groebner),
            "invariant" | "invariants" => Ok(Method::Invariant),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// All configurable limits in one place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub search: SearchCaps,
    pub count: CountCaps,
    pub enumeration: u64,
    pub order: MonomialOrder,
    pub encoding: DetEncoding,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            search: SearchCaps::default(),
            count: CountCaps::default(),
            enumeration: DEFAULT_ENUMERATION_CAP,
            order: MonomialOrder::Grevlex,
            encoding: DetEncoding::Power,
        }
    }
}

/// A pairwise test deciding whether two algebras are related.
pub trait Oracle: Sync {
    fn relation(&self) -> Relation;
    fn method(&self) -> Method;
    fn related(&self, rep: &EvolutionAlgebra, other: &EvolutionAlgebra) -> Result<bool, ClassifyError>;
}

pub struct BruteForceOracle {
    relation: Relation,
    searcher: Searcher,
}

impl BruteForceOracle {
    pub fn new(field: &FieldSpec, n: usize, relation: Relation, caps: SearchCaps) -> Result<Self, ClassifyError> {
        let searcher = Searcher::new(field, n, caps);
        searcher.check_supported(relation)?;
        Ok(BruteForceOracle { relation, searcher })
    }
}

impl Oracle for BruteForceOracle {
    fn relation(&self) -> Relation {
        self.relation
    }
    fn method(&self) -> Method {
        Method::Bruteforce
    }
    fn related(&self, rep: &EvolutionAlgebra, other: &EvolutionAlgebra) -> Result<bool, ClassifyError> {
        Ok(self.searcher.related(rep, other, self.relation)?)
    }
}

/// Related iff the ideal of maps has a rational point.
pub struct GroebnerOracle {
    kind: IdealKind,
    caps: Caps,
}

impl GroebnerOracle {
    pub fn new(relation: Relation, caps: Caps) -> Result<Self, ClassifyError> {
        let kind = IdealKind::from_relation(relation).map_err(|_| ClassifyError::Unsupported { relation, method: Method::Groebner })?;
        Ok(GroebnerOracle { kind, caps })
    }
}

impl Oracle for GroebnerOracle {
    fn relation(&self) -> Relation {
        self.kind.relation()
    }
    fn method(&self) -> Method {
        Method::Groebner
    }
    fn related(&self, rep: &EvolutionAlgebra, other: &EvolutionAlgebra) -> Result<bool, ClassifyError> {
        let spec = build_ideal(self.kind, rep, other, self.caps.encoding, self.caps.order)?;
        Ok(count_points_with_caps(&spec, CountMethod::Groebner, &self.caps.count)? > 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum InvariantKey {
    Isotopism(IsotopismClass),
    Isomorphism(ClassLabel),
}

/// Related iff the closed-form invariants agree.
pub struct InvariantOracle {
    relation: Relation,
    cache: RwLock<HashMap<EvolutionAlgebra, InvariantKey>>,
}

impl InvariantOracle {
    pub fn new(relation: Relation) -> Result<Self, ClassifyError> {
        if relation == Relation::StrongIsotopism {
            return Err(ClassifyError::Unsupported { relation, method: Method::Invariant });
        }
        Ok(InvariantOracle { relation, cache: RwLock::new(HashMap::new()) })
    }

    fn key(&self, a: &EvolutionAlgebra) -> Result<InvariantKey, ClassifyError> {
        if let Some(k) = self.cache.read().expect("cache lock").get(a) {
            return Ok(k.clone());
        }
        let k = match self.relation {
            Relation::Isotopism => InvariantKey::Isotopism(isotopism_class_2d(a)?),
            _ => InvariantKey::Isomorphism(isomorphism_label_2d(a)?),
        };
        self.cache.write().expect("cache lock").insert(a.clone(), k.clone());
        Ok(k)
    }
}

impl Oracle for InvariantOracle {
    fn relation(&self) -> Relation {
        self.relation
    }
    fn method(&self) -> Method {
        Method::Invariant
    }
    fn related(&self, rep: &EvolutionAlgebra, other: &EvolutionAlgebra) -> Result<bool, ClassifyError> {
        Ok(self.key(rep)? == self.key(other)?)
    }
}

pub fn make_oracle(field: &FieldSpec, n: usize, relation: Relation, method: Method, caps: Caps) -> Result<Box<dyn Oracle>, ClassifyError> {
    if !method.supports(relation) {
        return Err(ClassifyError::Unsupported { relation, method });
    }
    Ok(match method {
        Method::Bruteforce => Box::new(BruteForceOracle::new(field, n, relation, caps.search)?),
        Method::Groebner => Box::new(GroebnerOracle::new(relation, caps)?),
        Method::Invariant => {
            if n != 2 {
                return Err(ClassifyError::NotTwoDimensional(n));
            }
            Box::new(InvariantOracle::new(relation)?)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class {
    /// Enumeration-first member.
    pub representative: EvolutionAlgebra,
    /// All members in enumeration order, representative first.
    pub members: Vec<EvolutionAlgebra>,
}

impl Class {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    field: FieldSpec,
    n: usize,
    relation: Relation,
    method: Method,
    classes: Vec<Class>,
}

impl Partition {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn relation(&self) -> Relation {
        self.relation
    }
    pub fn method(&self) -> Method {
        self.method
    }
    pub fn classes(&self) -> &[Class] {
        &self.classes
    }
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Algebra to class index.
    pub fn membership(&self) -> HashMap<EvolutionAlgebra, usize> {
        let mut m = HashMap::new();
        for (i, c) in self.classes.iter().enumerate() {
            for a in &c.members {
                m.insert(a.clone(), i);
            }
        }
        m
    }

    /// Equality as set partitions, ignoring how they were produced.
    pub fn same_blocks(&self, other: &Partition) -> bool {
        self.blocks() == other.blocks()
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let owner = other.membership();
        self.classes.iter().all(|c| {
            let first = owner.get(&c.representative);
            first.is_some() && c.members.iter().all(|m| owner.get(m) == first)
        })
    }

    fn blocks(&self) -> BTreeSet<Vec<u128>> {
        self.classes.iter().map(|c| c.members.iter().map(|a| a.enumeration_index()).collect()).collect()
    }
}

/// Pops the enumeration-first remaining algebra as a representative and
/// removes everything the oracle relates to it, until nothing remains.
pub fn algorithm1(algebras: &[EvolutionAlgebra], oracle: &dyn Oracle) -> Result<Partition, ClassifyError> {
    let first = algebras.first().ok_or_else(|| ClassifyError::Witness("empty input".into()))?;
    let field = first.field().clone();
    let n = first.dim();
    for a in algebras {
        first.ensure_compatible(a)?;
    }
    let mut remaining: Vec<EvolutionAlgebra> = algebras.to_vec();
    remaining.sort_by_key(|a| a.enumeration_index());
    remaining.dedup();

    let mut classes = Vec::new();
    while !remaining.is_empty() {
        let rep = remaining[0].clone();
        let rest = &remaining[1..];
        let flags = relate_all(oracle, &rep, rest)?;
        let mut members = vec![rep.clone()];
        let mut next = Vec::with_capacity(rest.len());
        for (a, hit) in rest.iter().zip(flags) {
            if hit {
                members.push(a.clone());
            } else {
                next.push(a.clone());
            }
        }
        classes.push(Class { representative: rep, members });
        remaining = next;
    }
    Ok(Partition { field, n, relation: oracle.relation(), method: oracle.method(), classes })
}

fn relate_one(oracle: &dyn Oracle, rep: &EvolutionAlgebra, a: &EvolutionAlgebra) -> Result<bool, ClassifyError> {
    oracle.related(rep, a).map_err(|e| ClassifyError::Oracle { left: rep.literal(), right: a.literal(), source: Box::new(e) })
}

#[cfg(feature = "parallel")]
fn relate_all(oracle: &dyn Oracle, rep: &EvolutionAlgebra, rest: &[EvolutionAlgebra]) -> Result<Vec<bool>, ClassifyError> {
    use rayon::prelude::*;
    rest.par_iter().map(|a| relate_one(oracle, rep, a)).collect()
}

#[cfg(not(feature = "parallel"))]
fn relate_all(oracle: &dyn Oracle, rep: &EvolutionAlgebra, rest: &[EvolutionAlgebra]) -> Result<Vec<bool>, ClassifyError> {
    rest.iter().map(|a| relate_one(oracle, rep, a)).collect()
}

/// Partition of all `n`-dimensional algebras over `field`.
pub fn classify_all(field: &FieldSpec, n: usize, relation: Relation, method: Method, caps: Caps) -> Result<Partition, ClassifyError> {
    let oracle = make_oracle(field, n, relation, method, caps)?;
    let algebras: Vec<EvolutionAlgebra> = enumerate_algebras_with_cap(field, n, caps.enumeration)?.iter().collect();
    algorithm1(&algebras, oracle.as_ref())
}

pub fn class_counts(field: &FieldSpec, relation: Relation, method: Method) -> Result<usize, ClassifyError> {
    Ok(classify_all(field, 2, relation, method, Caps::default())?.class_count())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassRecord {
    pub representative: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub q: u32,
    pub n: usize,
    pub relation: Relation,
    pub method: Method,
    pub class_count: usize,
    pub classes: Vec<ClassRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// Label shown next to a representative in reports.
pub fn class_label(a: &EvolutionAlgebra, relation: Relation) -> Option<String> {
    if a.dim() != 2 {
        return None;
    }
    match relation {
        Relation::Isomorphism => isomorphism_label_2d(a).ok().map(|l| l.render(a.field())),
        _ => isotopism_class_2d(a).ok().map(|c| c.name().to_string()),
    }
}

impl Partition {
    pub fn report(&self, with_members: bool, timing_ms: Option<u64>) -> PartitionReport {
        let classes = self
            .classes
            .iter()
            .map(|c| ClassRecord {
                representative: c.representative.literal(),
                label: class_label(&c.representative, self.relation),
                size: c.size(),
                members: with_members.then(|| c.members.iter().map(|m| m.literal()).collect()),
            })
            .collect();
        PartitionReport {
            q: self.field.q(),
            n: self.n,
            relation: self.relation,
            method: self.method,
            class_count: self.class_count(),
            classes,
            timing_ms,
        }
    }
}
