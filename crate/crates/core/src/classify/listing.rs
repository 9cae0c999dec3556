//! Known class representatives for `q <= 7` and checks against a computed partition.

use serde::Serialize;

use super::{ClassifyError, Partition};
use crate::evoalg::{AlgebraError, EvolutionAlgebra};
use crate::gf::{FieldElement, FieldSpec};
use crate::linalg::Matrix;
use crate::search::{find_witness, Relation, SearchCaps};

const Q2: &[&str] = &["(0,0)", "(e2,0)", "(e1,0)", "(e1,e1)", "(e1+e2,e1+e2)", "(e2,e1)", "(e2,e1+e2)", "(e1,e1+e2)", "(e1,e2)"];

const Q3: &[&str] = &[
    "(0,0)", "(e2,0)", "(e1,0)", "(e1,2e1)",
    "(e1+e2,2e1+2e2)", "(e1,e1)", "(e2,e1)", "(e2,e1+e2)",
    "(e2,e1+2e2)", "(e1+e2,2e1+e2)", "(e1,e1+e2)", "(e1,2e1+e2)",
    "(e1,e2)",
];

const Q5: &[&str] = &[
    "(0,0)", "(e2,0)", "(e1,0)", "(e1,e1)", "(e1+e2,4e1+4e2)", "(e1,2e1)",
    "(e2,e1)", "(e2,e1+e2)", "(e2,e1+2e2)", "(e2,e1+3e2)", "(e2,e1+4e2)", "(e1+e2,e1+2e2)",
    "(e1+e2,e1+3e2)", "(e1+e2,e1+4e2)", "(e1+e2,2e1+e2)", "(e1+e2,3e1+e2)", "(e1+e2,2e1+3e2)", "(e1+e2,3e1+2e2)",
    "(e1,e1+e2)", "(e1,2e1+e2)", "(e1,3e1+e2)", "(e1,4e1+e2)", "(e1,e2)",
];

const Q7: &[&str] = &[
    "(0,0)", "(e1,0)", "(e2,0)", "(e1,e1)", "(e1,2e1)", "(e1,3e1)", "(e1,e2)", "(e2,e1)", "(e2,e1+e2)", "(e2,e1+3e2)",
    "(e2,2e1+e2)", "(e2,2e1+3e2)", "(e2,3e1+e2)", "(e2,3e1+3e2)", "(e1,e1+e2)", "(e1,e1+2e2)", "(e1,e1+3e2)", "(e1,3e1+e2)",
    "(e1,3e1+2e2)", "(e1,3e1+3e2)", "(e1+e2,e1+2e2)", "(e1+e2,e1+3e2)", "(e1+e2,e1+4e2)", "(e1+e2,e1+5e2)", "(e1+e2,e1+6e2)",
    "(e1+e2,2e1+e2)", "(e1+e2,2e1+3e2)", "(e1+e2,2e1+4e2)", "(e1+e2,2e1+5e2)", "(e1+e2,2e1+6e2)", "(e1+e2,3e1+5e2)",
    "(e1+e2,3e1+6e2)", "(e1+e2,4e1+3e2)", "(e1+e2,4e1+5e2)", "(e1+e2,4e1+6e2)", "(e1+e2,6e1+3e2)", "(e1+e2,6e1+5e2)",
    "(e1+e2,6e1+6e2)",
];

/// The entry suspected of being a transcription slip in the `q = 7` listing, and its proposed replacement.
pub const Q7_SUSPECT: &str = "(e1,2e1)";
pub const Q7_REPLACEMENT: &str = "(e2,2e1)";

/// Listed representatives for `q` in {2, 3, 5, 7}.
pub fn listed_tuples(q: u32) -> Option<&'static [&'static str]> {
    match q {
        2 => Some(Q2),
        3 => Some(Q3),
        5 => Some(Q5),
        7 => Some(Q7),
        _ => None,
    }
}

/// Parses a structure tuple such as `(e1+e2,2e1+3e2)`: entry `i` is `e_i e_i`.
pub fn parse_tuple(field: &FieldSpec, tuple: &str) -> Result<EvolutionAlgebra, AlgebraError> {
    let err = |reason: &str| AlgebraError::Parse { literal: tuple.to_string(), reason: reason.to_string() };
    let inner = tuple.trim().strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(|| err("expected parentheses"))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let n = parts.len();
    let mut rows = Vec::with_capacity(n);
    for part in parts {
        let mut row = vec![FieldElement::ZERO; n];
        if part != "0" {
            for term in part.split('+').map(str::trim) {
                let pos = term.find('e').ok_or_else(|| err("expected a basis vector"))?;
                let (coef, basis) = term.split_at(pos);
                let idx: usize = basis[1..].parse().map_err(|_| err("bad basis index"))?;
                if idx == 0 || idx > n {
                    return Err(err("basis index out of range"));
                }
                let c = if coef.is_empty() { field.one() } else { field.parse(coef)? };
                row[idx - 1] = field.add(row[idx - 1], c);
            }
        }
        rows.push(row);
    }
    EvolutionAlgebra::new(field.clone(), Matrix::from_rows(rows))
}

/// Formats an algebra in tuple notation.
pub fn format_tuple(a: &EvolutionAlgebra) -> String {
    let f = a.field();
    let entries: Vec<String> = (0..a.dim())
        .map(|i| {
            let terms: Vec<String> = (0..a.dim())
                .filter(|&j| !a.t(i, j).is_zero())
                .map(|j| {
                    let c = a.t(i, j);
                    if c == f.one() {
                        format!("e{}", j + 1)
                    } else {
                        format!("{}e{}", f.format(c), j + 1)
                    }
                })
                .collect();
            if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join("+")
            }
        })
        .collect();
    format!("({})", entries.join(","))
}

/// How a list of tuples sits inside a partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableMatch {
    pub q: u32,
    pub listed: usize,
    pub class_count: usize,
    /// Listed tuples sharing a class: `(first, second, class index)`.
    pub collisions: Vec<(String, String, usize)>,
    /// Representatives of classes no listed tuple falls in.
    pub uncovered: Vec<String>,
}

impl TableMatch {
    /// One listed tuple per class and every class hit.
    pub fn is_transversal(&self) -> bool {
        self.collisions.is_empty() && self.uncovered.is_empty() && self.listed == self.class_count
    }
}

pub fn match_tuples(partition: &Partition, tuples: &[&str]) -> Result<TableMatch, ClassifyError> {
    let field = partition.field();
    let index = partition.membership();
    let mut owner: Vec<Option<String>> = vec![None; partition.class_count()];
    let mut collisions = Vec::new();
    for t in tuples {
        let a = parse_tuple(field, t)?;
        let c = *index.get(&a).ok_or_else(|| ClassifyError::Witness(format!("{t} is not in the partition")))?;
        match &owner[c] {
            Some(first) => collisions.push((first.clone(), t.to_string(), c)),
            None => owner[c] = Some(t.to_string()),
        }
    }
    let uncovered = owner
        .iter()
        .enumerate()
        .filter(|(_, o)| o.is_none())
        .map(|(c, _)| format_tuple(&partition.classes()[c].representative))
        .collect();
    Ok(TableMatch { q: field.q(), listed: tuples.len(), class_count: partition.class_count(), collisions, uncovered })
}

/// Resolution of the suspected misprint in the `q = 7` listing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Adjudication {
    pub as_listed: TableMatch,
    /// Isomorphism from `(e1,e1)` onto the suspect entry, if one exists.
    pub suspect_witness: Option<String>,
    /// Whether `(e1,e1)` and `(e1,3e1)` are non-isomorphic after exhausting GL(2,7).
    pub three_is_distinct: bool,
    pub corrected: TableMatch,
    pub verdict: String,
}

pub fn adjudicate_q7(partition: &Partition) -> Result<Adjudication, ClassifyError> {
    let field = partition.field().clone();
    if field.q() != 7 || partition.relation() != Relation::Isomorphism {
        return Err(ClassifyError::Witness("adjudication needs the isomorphism partition over GF(7)".into()));
    }
    let as_listed = match_tuples(partition, Q7)?;
    let base = parse_tuple(&field, "(e1,e1)")?;
    let suspect = parse_tuple(&field, Q7_SUSPECT)?;
    let caps = SearchCaps::default();
    let suspect_witness = find_witness(&base, &suspect, Relation::Isomorphism, caps)?.map(|w| w.f.literal(&field));
    let three = parse_tuple(&field, "(e1,3e1)")?;
    let three_is_distinct = find_witness(&base, &three, Relation::Isomorphism, caps)?.is_none();
    let fixed: Vec<&str> = Q7.iter().map(|&t| if t == Q7_SUSPECT { Q7_REPLACEMENT } else { t }).collect();
    let corrected = match_tuples(partition, &fixed)?;
    let verdict = if corrected.is_transversal() && !as_listed.is_transversal() {
        format!(
            "{Q7_SUSPECT} is isomorphic to (e1,e1) (witness F = {}); replacing it with {Q7_REPLACEMENT} gives one listed tuple per class",
            suspect_witness.as_deref().unwrap_or("none")
        )
    } else if as_listed.is_transversal() {
        "the listing is already one tuple per class".to_string()
    } else {
        "the proposed replacement does not repair the listing".to_string()
    };
    Ok(Adjudication { as_listed, suspect_witness, three_is_distinct, corrected, verdict })
}
