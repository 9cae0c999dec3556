//! WebAssembly bindings for the static demo page. Every export takes plain
//! strings and numbers and returns a JSON document.

use evoclass::classify::{canonical_form_2d, class_label, classify_all, isotopism_class_2d, Caps, Method};
use evoclass::search::{find_witness, Relation, WitnessRecord};
use evoclass::{EvolutionAlgebra, FieldSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest field order each method accepts in the page, keeping a run
/// within a few seconds on one thread.
pub const BRUTEFORCE_MAX_Q: u32 = 7;
pub const GROEBNER_MAX_Q: u32 = 3;
pub const INVARIANT_MAX_Q: u32 = 16;

fn field(q: u32) -> Result<FieldSpec, String> {
    FieldSpec::from_order(q as u64).map_err(|e| e.to_string())
}

fn algebra(f: &FieldSpec, literal: &str) -> Result<EvolutionAlgebra, String> {
    let a = EvolutionAlgebra::parse(f, literal.trim()).map_err(|e| e.to_string())?;
    if a.dim() != 2 {
        return Err(format!("the demo handles two-dimensional algebras, got dimension {}", a.dim()));
    }
    Ok(a)
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// Partition of all two-dimensional algebras over GF(q), with members.
pub fn classify_json(q: u32, relation: &str, method: &str) -> Result<String, String> {
    let relation: Relation = relation.parse()?;
    let method: Method = method.parse()?;
    let limit = match method {
        Method::Bruteforce => BRUTEFORCE_MAX_Q,
        Method::Groebner => GROEBNER_MAX_Q,
        Method::Invariant => INVARIANT_MAX_Q,
    };
    if q > limit {
        return Err(format!("the {method} method is limited to q <= {limit} in the browser"));
    }
    let f = field(q)?;
    let p = classify_all(&f, 2, relation, method, Caps::default()).map_err(|e| e.to_string())?;
    Ok(to_json(&p.report(true, None)))
}

#[derive(Serialize)]
struct CheckResult {
    left: String,
    right: String,
    relation: Relation,
    related: bool,
    witness: Option<WitnessRecord>,
    left_label: Option<String>,
    right_label: Option<String>,
}

/// Witness search between two algebras given as `"a,b;c,d"` literals.
pub fn check_json(q: u32, left: &str, right: &str, relation: &str) -> Result<String, String> {
    let relation: Relation = relation.parse()?;
    let f = field(q)?;
    let (a, b) = (algebra(&f, left)?, algebra(&f, right)?);
    let w = find_witness(&a, &b, relation, Default::default()).map_err(|e| e.to_string())?;
    Ok(to_json(&CheckResult {
        left: a.literal(),
        right: b.literal(),
        relation,
        related: w.is_some(),
        witness: w.map(|w| w.to_record(&f)),
        left_label: class_label(&a, relation),
        right_label: class_label(&b, relation),
    }))
}

#[derive(Serialize)]
struct LabelResult {
    algebra: String,
    label: String,
    isotopism_class: &'static str,
    canonical: String,
    map: String,
    annihilator_dim: usize,
    derived_dim: usize,
}

/// Closed-form isomorphism label and the map onto the canonical algebra.
pub fn label_json(q: u32, literal: &str) -> Result<String, String> {
    let f = field(q)?;
    let a = algebra(&f, literal)?;
    let cf = canonical_form_2d(&a).map_err(|e| e.to_string())?;
    Ok(to_json(&LabelResult {
        algebra: a.literal(),
        label: cf.label.render(&f),
        isotopism_class: isotopism_class_2d(&a).map_err(|e| e.to_string())?.name(),
        canonical: cf.representative.literal(),
        map: cf.map.literal(&f),
        annihilator_dim: a.annihilator_dim(),
        derived_dim: a.derived_dim(),
    }))
}

#[wasm_bindgen]
pub fn classify(q: u32, relation: &str, method: &str) -> Result<String, JsError> {
    classify_json(q, relation, method).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn check(q: u32, left: &str, right: &str, relation: &str) -> Result<String, JsError> {
    check_json(q, left, right, relation).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn label(q: u32, literal: &str) -> Result<String, JsError> {
    label_json(q, literal).map_err(|e| JsError::new(&e))
}
