use std::collections::BTreeMap;
use std::fmt::Display;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use evoclass::classify::listing::{adjudicate_q7, listed_tuples, match_tuples, Adjudication, TableMatch};
use evoclass::classify::{class_label, classify_all, Caps, ClassifyError, Method, Partition};
use evoclass::evoalg::enumerate_algebras_with_cap;
use evoclass::gf::DEFAULT_FIELD_CAP;
use evoclass::ideals::{build_ideal, count_points_with_caps, CountMethod, DetEncoding, IdealError, IdealKind};
use evoclass::polyring::{buchberger_with_limits, standard_monomial_count, StandardMonomialCount};
use evoclass::search::{Relation, SearchError, Searcher, WitnessRecord};
use evoclass::{AlgebraDocument, AlgebraError, EvolutionAlgebra, FieldSpec, GfError, MonomialOrder, PolyError, Ring};
use serde::Serialize;

use crate::args::{Cli, Command, FieldArgs, Format, PairArgs};
use crate::render;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Cap(String),
    Io(io::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        if e.is_cap() {
            CliError::Cap(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

macro_rules! via_classify {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                ClassifyError::from(e).into()
            }
        }
    )*};
}
via_classify!(AlgebraError, GfError, SearchError, IdealError);

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::ResourceLimit(_) => CliError::Cap(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// All limits after applying `--cap` overrides.
#[derive(Clone, Copy, Debug)]
struct Limits {
    field: u64,
    caps: Caps,
}

fn parse_limits(overrides: &[String]) -> Result<Limits> {
    let mut l = Limits { field: DEFAULT_FIELD_CAP, caps: Caps::default() };
    for item in overrides {
        let (key, value) = item.split_once('=').ok_or_else(|| CliError::Usage(format!("--cap expects KEY=VALUE, got {item:?}")))?;
        let v: u64 = value.trim().parse().map_err(|_| CliError::Usage(format!("--cap {key}: {value:?} is not a non-negative integer")))?;
        let small = || u32::try_from(v).map_err(|_| CliError::Usage(format!("--cap {key}: {v} is too large")));
        let c = &mut l.caps;
        match key.trim() {
            "field" => l.field = v,
            "enumeration" => c.enumeration = v,
            "exhaustion" => {
                c.search.exhaustion = v;
                c.count.exhaustion = v;
            }
            "isomorphism-max-q" => c.search.isomorphism_max_q = small()?,
            "strong-isotopism-max-q" => c.search.strong_isotopism_max_q = small()?,
            "isotopism-max-q" => c.search.isotopism_max_q = small()?,
            "groebner-isotopism-max-q" => c.count.groebner_isotopism_max_q = small()?,
            "max-pairs" => c.count.buchberger.max_pairs = v as usize,
            "max-basis" => c.count.buchberger.max_basis = v as usize,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown cap {other:?}; known caps: field, enumeration, exhaustion, isomorphism-max-q, \
                     strong-isotopism-max-q, isotopism-max-q, groebner-isotopism-max-q, max-pairs, max-basis"
                )))
            }
        }
    }
    Ok(l)
}

fn field(args: &FieldArgs, limits: &Limits) -> Result<FieldSpec> {
    let f = match (args.q, args.p) {
        (Some(q), _) => FieldSpec::from_order_with_cap(q, limits.field)?,
        (None, Some(p)) => FieldSpec::with_cap(p, args.k.unwrap_or(1), limits.field)?,
        (None, None) => return Err(CliError::Usage("give the field with --q, or with --p and optionally --k".into())),
    };
    Ok(f)
}

fn load(field: &FieldSpec, literal: &Option<String>, file: &Option<std::path::PathBuf>) -> Result<EvolutionAlgebra> {
    match (literal, file) {
        (Some(lit), _) => Ok(EvolutionAlgebra::parse(field, lit)?),
        (None, Some(path)) => {
            let a = read_document(path)?;
            if a.field() != field {
                return Err(CliError::Usage(format!("{} is over {}, not {}", path.display(), a.field(), field)));
            }
            Ok(a)
        }
        (None, None) => Err(CliError::Usage("missing algebra".into())),
    }
}

fn read_document(path: &Path) -> Result<EvolutionAlgebra> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let doc: AlgebraDocument = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(doc.to_algebra()?)
}

fn pair(field: &FieldSpec, p: &PairArgs) -> Result<(EvolutionAlgebra, EvolutionAlgebra)> {
    let a = load(field, &p.left, &p.left_file)?;
    let b = load(field, &p.right, &p.right_file)?;
    if a.dim() != b.dim() {
        return Err(CliError::Usage(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
    }
    Ok((a, b))
}

pub fn run<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let limits = parse_limits(&cli.caps)?;
    match &cli.command {
        Command::Enumerate { field: fa, n } => enumerate(out, cli.format, &field(fa, &limits)?, *n, &limits),
        Command::Check { field: fa, pair: pa, relation } => check(out, cli.format, &field(fa, &limits)?, pa, *relation, &limits),
        Command::Classify { field: fa, n, relation, method, order, members, timing } => {
            let mut caps = limits.caps;
            caps.order = *order;
            classify(out, cli.format, &field(fa, &limits)?, *n, *relation, *method, caps, *members, *timing)
        }
        Command::Tables { only, timing } => tables(out, cli.format, only, *timing, &limits),
        Command::CountMaps { field: fa, pair: pa, relation, method, order, rabinowitsch } => {
            let encoding = if *rabinowitsch { DetEncoding::Rabinowitsch } else { DetEncoding::Power };
            count_maps(out, cli.format, &field(fa, &limits)?, pa, *relation, *method, *order, encoding, &limits)
        }
        Command::Groebner { field: fa, vars, order, polys } => groebner(out, cli.format, &field(fa, &limits)?, vars, *order, polys, &limits),
    }
}

#[derive(Serialize)]
struct AlgebraRow {
    index: u64,
    algebra: String,
    annihilator_dim: usize,
    derived_dim: usize,
}

fn enumerate<W: Write>(out: &mut W, format: Format, f: &FieldSpec, n: usize, limits: &Limits) -> Result<()> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let all = enumerate_algebras_with_cap(f, n, limits.caps.enumeration)?;
    let rows = all.iter().enumerate().map(|(i, a)| AlgebraRow {
        index: i as u64,
        algebra: a.literal(),
        annihilator_dim: a.annihilator_dim(),
        derived_dim: a.derived_dim(),
    });
    match format {
        Format::Json => {
            for r in rows {
                render::json_line(out, &r)?;
            }
        }
        Format::Table | Format::Csv => {
            let cells: Vec<Vec<String>> = rows.map(|r| vec![r.index.to_string(), r.algebra, r.annihilator_dim.to_string(), r.derived_dim.to_string()]).collect();
            if format == Format::Csv {
                render::csv(out, &["index", "algebra", "annihilator_dim", "derived_dim"], &cells)?;
            } else {
                render::table(out, &["index", "algebra", "ann", "derived"], &cells)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Signature {
    annihilator_dim: usize,
    derived_dim: usize,
}

impl Signature {
    fn of(a: &EvolutionAlgebra) -> Self {
        Signature { annihilator_dim: a.annihilator_dim(), derived_dim: a.derived_dim() }
    }
}

#[derive(Serialize)]
struct CheckReport {
    left: String,
    right: String,
    relation: Relation,
    related: bool,
    witness: Option<WitnessRecord>,
    left_signature: Signature,
    right_signature: Signature,
}

fn check<W: Write>(out: &mut W, format: Format, f: &FieldSpec, p: &PairArgs, relation: Relation, limits: &Limits) -> Result<()> {
    let (a, b) = pair(f, p)?;
    let searcher = Searcher::new(f, a.dim(), limits.caps.search);
    let witness = searcher.find_witness(&a, &b, relation)?;
    let report = CheckReport {
        left: a.literal(),
        right: b.literal(),
        relation,
        related: witness.is_some(),
        witness: witness.map(|w| w.to_record(f)),
        left_signature: Signature::of(&a),
        right_signature: Signature::of(&b),
    };
    match format {
        Format::Json => render::json_line(out, &report)?,
        Format::Csv => {
            let w = report.witness.as_ref();
            let m = |sel: fn(&WitnessRecord) -> &String| w.map(sel).cloned().unwrap_or_default();
            let row = vec![report.left.clone(), report.right.clone(), relation.to_string(), report.related.to_string(), m(|w| &w.f), m(|w| &w.g), m(|w| &w.h)];
            render::csv(out, &["left", "right", "relation", "related", "F", "G", "H"], &[row])?;
        }
        Format::Table => {
            let sig = |s: &Signature| format!("annihilator {}, derived {}", s.annihilator_dim, s.derived_dim);
            writeln!(out, "field     {f}")?;
            writeln!(out, "left      {}  ({})", report.left, sig(&report.left_signature))?;
            writeln!(out, "right     {}  ({})", report.right, sig(&report.right_signature))?;
            writeln!(out, "relation  {relation}")?;
            match &report.witness {
                Some(w) => {
                    writeln!(out, "witness   found")?;
                    writeln!(out, "  F = {}", w.f)?;
                    writeln!(out, "  G = {}", w.g)?;
                    writeln!(out, "  H = {}", w.h)?;
                }
                None => writeln!(out, "witness   none")?,
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn classify<W: Write>(
    out: &mut W,
    format: Format,
    f: &FieldSpec,
    n: usize,
    relation: Relation,
    method: Method,
    caps: Caps,
    members: bool,
    timing: bool,
) -> Result<()> {
    let start = Instant::now();
    let partition = classify_all(f, n, relation, method, caps)?;
    let elapsed = timing.then(|| start.elapsed().as_millis() as u64);
    let report = partition.report(members, elapsed);
    match format {
        Format::Json => render::json_line(out, &report)?,
        Format::Table | Format::Csv => {
            let mut headers = vec!["class", "representative", "label", "size"];
            if members {
                headers.push("members");
            }
            let rows: Vec<Vec<String>> = report
                .classes
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let mut row = vec![(i + 1).to_string(), c.representative.clone(), c.label.clone().unwrap_or_default(), c.size.to_string()];
                    if let Some(m) = &c.members {
                        row.push(m.join(" "));
                    }
                    row
                })
                .collect();
            if format == Format::Csv {
                render::csv(out, &headers, &rows)?;
            } else {
                writeln!(out, "{f}, n = {n}, {relation} by {method}: {} classes", report.class_count)?;
                if let Some(ms) = elapsed {
                    writeln!(out, "time: {ms} ms")?;
                }
                render::table(out, &headers, &rows)?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Representative {
    representative: String,
    label: Option<String>,
    size: usize,
}

#[derive(Serialize)]
struct Agreement {
    relation: Relation,
    method: Method,
    status: String,
}

#[derive(Serialize)]
struct FieldSummary {
    q: u32,
    isomorphism_classes: usize,
    isotopism_classes: usize,
    strong_isotopism_classes: usize,
    representatives: Vec<Representative>,
    agreement: Vec<Agreement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    listing: Option<TableMatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_ms: Option<BTreeMap<String, u64>>,
}

#[derive(Serialize)]
struct TablesReport {
    fields: Vec<FieldSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    adjudication: Option<Adjudication>,
}

struct Timed {
    timing: bool,
    times: BTreeMap<String, u64>,
}

impl Timed {
    /// Runs `f`, keeping its wall-clock time only when it succeeds.
    fn run<T, E>(&mut self, key: impl Display, f: impl FnOnce() -> std::result::Result<T, E>) -> std::result::Result<T, E> {
        let start = Instant::now();
        let v = f();
        if self.timing && v.is_ok() {
            self.times.insert(key.to_string(), start.elapsed().as_millis() as u64);
        }
        v
    }
}

fn tables<W: Write>(out: &mut W, format: Format, only: &[u64], timing: bool, limits: &Limits) -> Result<()> {
    let qs: Vec<u64> = if only.is_empty() { vec![2, 3, 5, 7] } else { only.to_vec() };
    let caps = limits.caps;
    let mut fields = Vec::new();
    let mut adjudication = None;
    for &q in &qs {
        let f = FieldSpec::from_order_with_cap(q, limits.field)?;
        let mut clock = Timed { timing, times: BTreeMap::new() };
        let mut part = |rel: Relation, m: Method| clock.run(format!("{rel}/{m}"), || classify_all(&f, 2, rel, m, caps));
        let iso = part(Relation::Isomorphism, Method::Bruteforce)?;
        let isot_inv = part(Relation::Isotopism, Method::Invariant)?;
        let strong = part(Relation::StrongIsotopism, Method::Bruteforce)?;
        let mut agreement = Vec::new();
        let mut compare = |rel: Relation, m: Method, reference: &Partition, other: std::result::Result<Partition, ClassifyError>| -> Result<()> {
            let status = match other {
                Ok(p) if p.same_blocks(reference) => "agree".to_string(),
                Ok(_) => "differs".to_string(),
                Err(e) if e.is_cap() => "skipped (cap)".to_string(),
                Err(e) => return Err(e.into()),
            };
            agreement.push(Agreement { relation: rel, method: m, status });
            Ok(())
        };
        compare(Relation::Isomorphism, Method::Invariant, &iso, part(Relation::Isomorphism, Method::Invariant))?;
        let groebner = if q <= 3 { part(Relation::Isomorphism, Method::Groebner) } else { Err(ClassifyError::Search(SearchError::FieldCap { relation: Relation::Isomorphism, q: q as u32, cap: 3 })) };
        compare(Relation::Isomorphism, Method::Groebner, &iso, groebner)?;
        compare(Relation::Isotopism, Method::Bruteforce, &isot_inv, part(Relation::Isotopism, Method::Bruteforce))?;
        let listing = match listed_tuples(q as u32) {
            Some(t) if q != 7 => Some(match_tuples(&iso, t)?),
            _ => None,
        };
        if q == 7 {
            adjudication = Some(adjudicate_q7(&iso)?);
        }
        fields.push(FieldSummary {
            q: q as u32,
            isomorphism_classes: iso.class_count(),
            isotopism_classes: isot_inv.class_count(),
            strong_isotopism_classes: strong.class_count(),
            representatives: iso
                .classes()
                .iter()
                .map(|c| Representative { representative: c.representative.literal(), label: class_label(&c.representative, Relation::Isomorphism), size: c.size() })
                .collect(),
            agreement,
            listing,
            timings_ms: timing.then_some(clock.times),
        });
    }
    let report = TablesReport { fields, adjudication };
    match format {
        Format::Json => render::json_line(out, &report)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .fields
                .iter()
                .flat_map(|s| {
                    s.representatives.iter().map(move |r| vec![s.q.to_string(), r.representative.clone(), r.label.clone().unwrap_or_default(), r.size.to_string()])
                })
                .collect();
            render::csv(out, &["q", "representative", "label", "size"], &rows)?;
        }
        Format::Table => tables_text(out, &report)?,
    }
    Ok(())
}

fn tables_text<W: Write>(out: &mut W, r: &TablesReport) -> io::Result<()> {
    let join = |f: fn(&FieldSummary) -> usize| r.fields.iter().map(|s| f(s).to_string()).collect::<Vec<_>>().join(" / ");
    let qs = r.fields.iter().map(|s| s.q.to_string()).collect::<Vec<_>>().join(" / ");
    writeln!(out, "q:                        {qs}")?;
    writeln!(out, "isomorphism classes:      {}", join(|s| s.isomorphism_classes))?;
    writeln!(out, "isotopism classes:        {}", join(|s| s.isotopism_classes))?;
    writeln!(out, "strong isotopism classes: {}", join(|s| s.strong_isotopism_classes))?;
    writeln!(out)?;
    writeln!(out, "method agreement (isomorphism against brute force, isotopism against invariants)")?;
    let mut rows = Vec::new();
    for s in &r.fields {
        for a in &s.agreement {
            rows.push(vec![s.q.to_string(), a.relation.to_string(), a.method.to_string(), a.status.clone()]);
        }
    }
    render::table(out, &["q", "relation", "method", "status"], &rows)?;
    for s in &r.fields {
        writeln!(out)?;
        writeln!(out, "GF({}) isomorphism representatives", s.q)?;
        let rows: Vec<Vec<String>> = s.representatives.iter().map(|c| vec![c.representative.clone(), c.label.clone().unwrap_or_default(), c.size.to_string()]).collect();
        render::table(out, &["representative", "label", "size"], &rows)?;
        if let Some(m) = &s.listing {
            let verdict = if m.is_transversal() { "one listed tuple per class" } else { "listing does not match" };
            writeln!(out, "published listing: {verdict}")?;
        }
        if let Some(t) = &s.timings_ms {
            let parts: Vec<String> = t.iter().map(|(k, v)| format!("{k} {v} ms")).collect();
            writeln!(out, "timings: {}", parts.join(", "))?;
        }
    }
    if let Some(a) = &r.adjudication {
        writeln!(out)?;
        writeln!(out, "GF(7) listing check: {}", a.verdict)?;
        writeln!(out, "  listed tuples sharing a class: {:?}", a.as_listed.collisions.iter().map(|c| (&c.0, &c.1)).collect::<Vec<_>>())?;
        writeln!(out, "  classes without a listed tuple: {:?}", a.as_listed.uncovered)?;
        writeln!(out, "  (e1,3e1) not isomorphic to (e1,e1): {}", a.three_is_distinct)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CountRecord {
    left: String,
    right: String,
    relation: Relation,
    method: CountMethod,
    count: u64,
}

#[allow(clippy::too_many_arguments)]
fn count_maps<W: Write>(
    out: &mut W,
    format: Format,
    f: &FieldSpec,
    p: &PairArgs,
    relation: Relation,
    method: CountMethod,
    order: MonomialOrder,
    encoding: DetEncoding,
    limits: &Limits,
) -> Result<()> {
    let (a, b) = pair(f, p)?;
    let kind = IdealKind::from_relation(relation)?;
    let spec = build_ideal(kind, &a, &b, encoding, order)?;
    let count = count_points_with_caps(&spec, method, &limits.caps.count)?;
    let rec = CountRecord { left: a.literal(), right: b.literal(), relation, method, count };
    match format {
        Format::Json => render::json_line(out, &rec)?,
        Format::Csv => render::csv(out, &["left", "right", "relation", "method", "count"], &[vec![rec.left, rec.right, relation.to_string(), method.to_string(), count.to_string()]])?,
        Format::Table => writeln!(out, "{count} {relation} maps from ({}) to ({}) over {f} [{method}]", rec.left, rec.right)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct BasisReport {
    order: MonomialOrder,
    basis: Vec<String>,
    unit_ideal: bool,
    standard_monomials: StandardMonomialCount,
}

fn groebner<W: Write>(out: &mut W, format: Format, f: &FieldSpec, vars: &[String], order: MonomialOrder, polys: &[String], limits: &Limits) -> Result<()> {
    let ring = Ring::new(f.clone(), vars.iter().map(|v| v.trim().to_string()).collect())?;
    let gens = polys.iter().map(|p| ring.parse(p, order)).collect::<std::result::Result<Vec<_>, _>>()?;
    let basis = buchberger_with_limits(f, &gens, order, limits.caps.count.buchberger)?;
    let report = BasisReport {
        order,
        basis: basis.polys().iter().map(|p| ring.format(p)).collect(),
        unit_ideal: basis.is_unit_ideal(),
        standard_monomials: standard_monomial_count(&basis),
    };
    match format {
        Format::Json => render::json_line(out, &report)?,
        Format::Csv => render::csv(out, &["polynomial"], &report.basis.iter().map(|p| vec![p.clone()]).collect::<Vec<_>>())?,
        Format::Table => {
            writeln!(out, "reduced basis ({order}, {f}):")?;
            for p in &report.basis {
                writeln!(out, "  {p}")?;
            }
            match report.standard_monomials {
                StandardMonomialCount::Finite(n) => writeln!(out, "standard monomials: {n}")?,
                StandardMonomialCount::Infinite => writeln!(out, "standard monomials: infinite")?,
            }
        }
    }
    Ok(())
}
