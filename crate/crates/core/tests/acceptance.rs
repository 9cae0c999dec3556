//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. All comparisons are exact.

use std::collections::{BTreeSet, HashMap};
use std::time::Instant;

use evoclass::classify::listing::{adjudicate_q7, listed_tuples, match_tuples};
use evoclass::classify::proof_maps::{instances, ProofMap};
use evoclass::classify::{
    classify_all, is_strong_normal, isotopism_class_2d, r2c_involution, strong_isotopy_normal_form, Caps, IsotopismClass, Method,
    Partition,
};
use evoclass::evoalg::enumerate_algebras;
use evoclass::ideals::{build_ideal, count_points, CountMethod, DetEncoding, IdealKind};
use evoclass::linalg::vec_mul;
use evoclass::polyring::{buchberger, normal_form};
use evoclass::search::{find_witness, verify_isomorphism, verify_isotopism, MapTriple, Relation, SearchCaps};
use evoclass::{EvolutionAlgebra, FieldSpec, MonomialOrder};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Expected isomorphism class counts.
const ISO_COUNTS: [(u64, usize); 4] = [(2, 9), (3, 13), (5, 23), (7, 38)];
/// Number of isotopism classes for every field.
const ISOT_CLASSES: usize = 4;
/// Sample sizes and seed for the GF(3) count comparison.
const GF3_ISOM_PAIRS: usize = 200;
const GF3_ISOT_PAIRS: usize = 20;
const SAMPLE_SEED: u64 = 0x5eed_0e70;
/// Generator permutations tried per sampled ideal.
const PERMUTATIONS: usize = 20;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(&mut Context) -> Outcome);

fn gf(q: u64) -> FieldSpec {
    FieldSpec::from_order(q).expect("valid order")
}

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

struct Context {
    iso: HashMap<u64, Partition>,
    isot: HashMap<u64, Partition>,
}

fn criterion1(ctx: &mut Context) -> Outcome {
    let mut got = Vec::new();
    for (q, want) in ISO_COUNTS {
        let p = classify_all(&gf(q), 2, Relation::Isomorphism, Method::Bruteforce, Caps::default()).map_err(|e| e.to_string())?;
        got.push(format!("q={q}:{}", p.class_count()));
        check(p.class_count() == want, format!("q={q}: {} classes, expected {want}", p.class_count()))?;
        ctx.iso.insert(q, p);
    }
    Ok(got.join(" "))
}

fn criterion2(ctx: &mut Context) -> Outcome {
    let expected: BTreeSet<(usize, usize)> = IsotopismClass::ALL.iter().map(|c| c.signature()).collect();
    for q in [2, 3, 4, 5, 7] {
        let f = gf(q);
        let inv = classify_all(&f, 2, Relation::Isotopism, Method::Invariant, Caps::default()).map_err(|e| e.to_string())?;
        check(inv.class_count() == ISOT_CLASSES, format!("q={q}: invariant gives {} classes", inv.class_count()))?;
        let sigs: BTreeSet<_> = inv.classes().iter().map(|c| c.representative.signature()).collect();
        check(sigs == expected, format!("q={q}: representative signatures {sigs:?}"))?;
        if q <= 3 {
            let bf = classify_all(&f, 2, Relation::Isotopism, Method::Bruteforce, Caps::default()).map_err(|e| e.to_string())?;
            check(bf.same_blocks(&inv), format!("q={q}: brute-force isotopism partition differs"))?;
            ctx.isot.insert(q, bf);
        }
        if q == 5 || q == 7 {
            strong_partition_check(&f, &inv)?;
        }
    }
    Ok("4 classes for q in {2,3,4,5,7}; brute force agrees for q in {2,3}; strong isotopism refines them for q in {5,7}".into())
}

/// Strong isotopism refines isotopism; over odd q the rank-one class with
/// trivial annihilator splits by whether `lambda` in `(r, lambda r)` is a
/// square, since `F diag(mu) F^t = c diag(1, lambda)` fixes the discriminant.
fn strong_partition_check(f: &FieldSpec, inv: &Partition) -> Result<(), String> {
    let strong = classify_all(f, 2, Relation::StrongIsotopism, Method::Bruteforce, Caps::default()).map_err(|e| e.to_string())?;
    let q = f.q();
    let expected = if q % 2 == 1 { ISOT_CLASSES + 1 } else { ISOT_CLASSES };
    check(strong.refines(inv), format!("q={q}: strong isotopism does not refine isotopism"))?;
    check(strong.class_count() == expected, format!("q={q}: strong isotopism gives {} classes, expected {expected}", strong.class_count()))?;
    let squares: BTreeSet<_> = f.units().map(|x| f.mul(x, x)).collect();
    for class in strong.classes() {
        let key = |a: &EvolutionAlgebra| {
            if a.signature() != (0, 1) {
                return None;
            }
            let (r0, r1) = (a.row(0), a.row(1));
            let j = (0..2).find(|&j| !r0[j].is_zero()).unwrap();
            Some(squares.contains(&f.div(r1[j], r0[j]).unwrap()))
        };
        let k = key(&class.representative);
        check(class.members.iter().all(|m| key(m) == k), format!("q={q}: square class not constant on a strong class"))?;
    }
    println!("  strong isotopism over GF({q}): {} classes", strong.class_count());
    Ok(())
}

fn criterion3(ctx: &mut Context) -> Outcome {
    for q in [2u64, 3, 5] {
        let m = match_tuples(&ctx.iso[&q], listed_tuples(q as u32).unwrap()).map_err(|e| e.to_string())?;
        check(m.is_transversal(), format!("q={q}: collisions {:?}, uncovered {:?}", m.collisions, m.uncovered))?;
    }
    let p7 = &ctx.iso[&7];
    check(p7.class_count() == 38, "q=7 count")?;
    let adj = adjudicate_q7(p7).map_err(|e| e.to_string())?;
    println!("  q=7 adjudication: {}", adj.verdict);
    println!("  (e1,3e1) distinct from (e1,e1) after exhausting GL(2,7): {}", adj.three_is_distinct);
    check(adj.suspect_witness.is_some() && adj.three_is_distinct && adj.corrected.is_transversal(), "q=7 adjudication inconclusive")?;
    Ok(format!("q in {{2,3,5}} transversal; q=7 listed collisions {}", adj.as_listed.collisions.len()))
}

fn criterion4(ctx: &mut Context) -> Outcome {
    let f2 = gf(2);
    let all: Vec<EvolutionAlgebra> = enumerate_algebras(&f2, 2).unwrap().iter().collect();
    let mut compared = 0;
    for kind in [IdealKind::Isomorphism, IdealKind::Isotopism] {
        for a in &all {
            for b in &all {
                compare_counts(kind, a, b)?;
                compared += 1;
            }
        }
    }
    // Half of the GF(3) pairs are drawn from a common class so that
    // nonzero counts are exercised too.
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let p3 = &ctx.iso[&3];
    let members: Vec<&EvolutionAlgebra> = p3.classes().iter().flat_map(|c| c.members.iter()).collect();
    let owner = p3.membership();
    let mut nonzero = 0;
    for (kind, count) in [(IdealKind::Isomorphism, GF3_ISOM_PAIRS), (IdealKind::Isotopism, GF3_ISOT_PAIRS)] {
        for i in 0..count {
            let a = *members.choose(&mut rng).unwrap();
            let b = if i % 2 == 0 {
                p3.classes()[owner[a]].members.choose(&mut rng).unwrap()
            } else {
                *members.choose(&mut rng).unwrap()
            };
            if compare_counts(kind, a, b)? > 0 {
                nonzero += 1;
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} pairs agree ({nonzero} GF(3) pairs with points)"))
}

fn compare_counts(kind: IdealKind, a: &EvolutionAlgebra, b: &EvolutionAlgebra) -> Result<u64, String> {
    let spec = build_ideal(kind, a, b, DetEncoding::Power, MonomialOrder::Grevlex).map_err(|e| e.to_string())?;
    let g = count_points(&spec, CountMethod::Groebner).map_err(|e| e.to_string())?;
    let e = count_points(&spec, CountMethod::Exhaustive).map_err(|e| e.to_string())?;
    check(g == e, format!("{kind:?} ({a}) vs ({b}): groebner {g}, exhaustive {e}"))?;
    Ok(g)
}

fn criterion5(ctx: &mut Context) -> Outcome {
    for q in [2u64, 3, 4, 5, 7] {
        let f = gf(q);
        let bf = match ctx.iso.get(&q) {
            Some(p) => p.clone(),
            None => classify_all(&f, 2, Relation::Isomorphism, Method::Bruteforce, Caps::default()).map_err(|e| e.to_string())?,
        };
        let inv = classify_all(&f, 2, Relation::Isomorphism, Method::Invariant, Caps::default()).map_err(|e| e.to_string())?;
        check(bf.same_blocks(&inv), format!("q={q}: label partition differs from brute force"))?;
    }
    Ok("labels match brute force for q in {2,3,4,5,7}".into())
}

/// `f` and `g` both carry the annihilator of the source onto that of the target.
fn annihilator_transported(a: &EvolutionAlgebra, b: &EvolutionAlgebra, w: &MapTriple) -> bool {
    let field = a.field();
    let n = a.dim();
    let basis = a.annihilator_basis();
    basis.len() == b.annihilator_basis().len()
        && [&w.f, &w.g].iter().all(|m| {
            basis.iter().all(|u| {
                let image = vec_mul(field, u, m);
                (0..n).all(|j| b.multiply(&image, &b.basis_vector(j)).unwrap().iter().all(|x| x.is_zero()))
            })
        })
}

fn criterion6(ctx: &mut Context) -> Outcome {
    // (i) annihilator transport under every representative-to-member witness
    let mut witnesses = 0;
    let caps = SearchCaps::default();
    let partitions = ctx.iso.values().chain(ctx.isot.values());
    for p in partitions {
        for class in p.classes() {
            for m in &class.members {
                let w = find_witness(&class.representative, m, p.relation(), caps)
                    .map_err(|e| e.to_string())?
                    .ok_or_else(|| format!("no witness for ({}) -> ({m})", class.representative))?;
                check(annihilator_transported(&class.representative, m, &w), format!("annihilator not transported: ({}) -> ({m})", class.representative))?;
                witnesses += 1;
            }
        }
    }
    // (ii) normal form over GF(3)
    let f3 = gf(3);
    for a in enumerate_algebras(&f3, 2).unwrap().iter() {
        let (nf, w) = strong_isotopy_normal_form(&a);
        check(is_strong_normal(&nf) && w.is_strong() && verify_isotopism(&a, &nf, &w).unwrap(), format!("normal form of ({a})"))?;
    }
    // (iii) explicit proof maps
    let mut maps = 0;
    for q in [5, 7] {
        let f = gf(q);
        for kind in ProofMap::RANK_ONE.into_iter().chain(ProofMap::RANK_TWO) {
            for inst in instances(&f, kind) {
                check(verify_isomorphism(&inst.source, &inst.target, &inst.map).unwrap(), format!("q={q} {kind:?} {:?}", inst.params))?;
                maps += 1;
            }
        }
    }
    // (iv) involution
    for q in [2, 3, 4, 5, 7] {
        let f = gf(q);
        for c in f.units() {
            for d in f.units().filter(|&d| d != c) {
                let (c1, d1) = r2c_involution(&f, c, d).unwrap();
                check(r2c_involution(&f, c1, d1).unwrap() == (c, d), format!("q={q}: involution fails at ({c:?},{d:?})"))?;
            }
        }
    }
    // isotopism classes stay constant on brute-force classes
    for p in ctx.isot.values() {
        for class in p.classes() {
            let k = isotopism_class_2d(&class.representative).unwrap();
            check(class.members.iter().all(|m| isotopism_class_2d(m).unwrap() == k), "isotopism class not constant")?;
        }
    }
    Ok(format!("{witnesses} witnesses, 81 normal forms, {maps} proof maps, involution on 5 fields"))
}

fn criterion7(_ctx: &mut Context) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED ^ 7);
    let f2 = gf(2);
    let f3 = gf(3);
    let a2: Vec<EvolutionAlgebra> = enumerate_algebras(&f2, 2).unwrap().iter().collect();
    let a3: Vec<EvolutionAlgebra> = enumerate_algebras(&f3, 2).unwrap().iter().collect();
    let mut sampled = Vec::new();
    for _ in 0..8 {
        sampled.push((IdealKind::Isomorphism, a2.choose(&mut rng).unwrap().clone(), a2.choose(&mut rng).unwrap().clone()));
    }
    for _ in 0..4 {
        sampled.push((IdealKind::Isotopism, a2.choose(&mut rng).unwrap().clone(), a2.choose(&mut rng).unwrap().clone()));
        sampled.push((IdealKind::Isomorphism, a3.choose(&mut rng).unwrap().clone(), a3.choose(&mut rng).unwrap().clone()));
    }
    for (kind, a, b) in &sampled {
        let spec = build_ideal(*kind, a, b, DetEncoding::Power, MonomialOrder::Grevlex).map_err(|e| e.to_string())?;
        let field = spec.field().clone();
        let mut gens = spec.generators();
        let basis = buchberger(&field, &gens, MonomialOrder::Grevlex).map_err(|e| e.to_string())?;
        for g in &gens {
            let r = normal_form(&field, g, basis.polys(), MonomialOrder::Grevlex).map_err(|e| e.to_string())?;
            check(r.is_zero(), format!("{kind:?} ({a}) vs ({b}): generator does not reduce to 0"))?;
        }
        for _ in 0..PERMUTATIONS {
            gens.shuffle(&mut rng);
            let other = buchberger(&field, &gens, MonomialOrder::Grevlex).map_err(|e| e.to_string())?;
            check(other.polys() == basis.polys(), format!("{kind:?} ({a}) vs ({b}): basis depends on generator order"))?;
        }
    }
    for a in &a2 {
        for b in &a2 {
            let mut counts = Vec::new();
            for ord in [MonomialOrder::Grevlex, MonomialOrder::Lex] {
                let spec = build_ideal(IdealKind::Isomorphism, a, b, DetEncoding::Power, ord).map_err(|e| e.to_string())?;
                counts.push(count_points(&spec, CountMethod::Groebner).map_err(|e| e.to_string())?);
            }
            check(counts[0] == counts[1], format!("({a}) vs ({b}): grevlex {} lex {}", counts[0], counts[1]))?;
        }
    }
    Ok(format!("{} ideals x {PERMUTATIONS} permutations; 256 grevlex/lex pairs", sampled.len()))
}

fn main() {
    let mut ctx = Context { iso: HashMap::new(), isot: HashMap::new() };
    let criteria: [Criterion; 7] = [
        ("1 isomorphism class counts", criterion1),
        ("2 four isotopism classes", criterion2),
        ("3 listed representatives", criterion3),
        ("4 groebner vs exhaustive counts", criterion4),
        ("5 closed-form label completeness", criterion5),
        ("6 constructive property suites", criterion6),
        ("7 groebner engine health", criterion7),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run(&mut ctx);
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{ms} ms]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why} [{ms} ms]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
