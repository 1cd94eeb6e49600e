//! Parthood, overlap and sums.
//!
//! Endurants have time-indexed parthood, perdurants and abstracts the
//! atemporal one. Both follow extensional mereology except that temporary
//! parthood is not required to be antisymmetric.

use std::collections::BTreeSet;

use crate::engine::closure::{term_operands, ClosedKb, Kind};
use crate::engine::report::{ent, time, Sink, Value, ViolationReport};
use crate::error::SumError;
use crate::kb::{Arg, EntityId, EntityTerm, Literal, Rel, SumTerm};
use crate::timeline::{strictly_before, weakly_before, Instant, TimeRegion};

/// `PP(x, y, t)`: `P(x, y, t)` and not `P(y, x, t)`.
pub fn proper_part(ckb: &ClosedKb, x: EntityId, y: EntityId, t: &TimeRegion) -> bool {
    ckb.holds_p(x, y, t) && !ckb.holds_p(y, x, t)
}

/// `O(x, y, t)`: some `z` is part of both throughout `t`.
pub fn overlap_at(ckb: &ClosedKb, x: EntityId, y: EntityId, t: &TimeRegion) -> bool {
    ckb.kb().entity_ids().any(|z| ckb.holds_p(z, x, t) && ckb.holds_p(z, y, t))
}

/// Atemporal proper parthood.
pub fn proper_part_a(ckb: &ClosedKb, x: EntityId, y: EntityId) -> bool {
    ckb.holds_pa(x, y) && !ckb.holds_pa(y, x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Profile {
    Temporal(BTreeSet<(EntityId, Instant)>),
    Atemporal(BTreeSet<EntityId>),
}

fn mereological_kind(ckb: &ClosedKb, ops: &[EntityId], term: &str) -> Result<Kind, SumError> {
    let kinds: BTreeSet<_> = ops.iter().map(|o| kind_key(Kind::of(ckb.kb(), *o))).collect();
    match kinds.into_iter().collect::<Vec<_>>().as_slice() {
        [k] if *k != 9 => Ok(match k {
            0 => Kind::Endurant,
            1 => Kind::Perdurant,
            _ => Kind::Abstract,
        }),
        _ => Err(SumError::MixedKinds(term.to_string())),
    }
}

fn kind_key(k: Kind) -> u8 {
    match k {
        Kind::Endurant => 0,
        Kind::Perdurant => 1,
        Kind::Abstract => 2,
        _ => 9,
    }
}

/// Everything overlapping at least one of `ops`, per instant for
/// endurants.
fn profile(ckb: &ClosedKb, ops: &[EntityId], kind: Kind) -> Profile {
    let kb = ckb.kb();
    if kind == Kind::Endurant {
        let mut out = BTreeSet::new();
        for w in kb.entity_ids() {
            for i in ckb.instants() {
                if ops.iter().any(|o| ckb.overlap_at_instant(w, *o, i)) {
                    out.insert((w, i));
                }
            }
        }
        Profile::Temporal(out)
    } else {
        Profile::Atemporal(kb.entity_ids().filter(|w| ops.iter().any(|o| ckb.overlap_a(*w, *o))).collect())
    }
}

/// Resolves a sum or fusion term to the unique entity sharing its overlap
/// profile.
pub fn resolve_sum(ckb: &ClosedKb, term: &SumTerm) -> Result<EntityId, SumError> {
    let kb = ckb.kb();
    let rendered = kb.render_sum(term);
    let ops = term_operands(ckb, term);
    if ops.is_empty() {
        return Err(SumError::NoWitness(rendered));
    }
    let kind = mereological_kind(ckb, &ops, &rendered)?;
    let target = profile(ckb, &ops, kind);
    let found: Vec<EntityId> = kb
        .entity_ids()
        .filter(|z| Kind::of(kb, *z) == kind)
        .filter(|z| profile(ckb, &[*z], kind) == target)
        .collect();
    match found.as_slice() {
        [] => Err(SumError::NoWitness(rendered)),
        [z] => Ok(*z),
        many => Err(SumError::Ambiguous {
            term: rendered,
            candidates: many.iter().map(|z| kb.name(*z).to_string()).collect(),
        }),
    }
}

fn term_ops(ckb: &ClosedKb, t: &EntityTerm) -> Vec<EntityId> {
    match t {
        EntityTerm::Id(id) => vec![*id],
        EntityTerm::Sum(s) => term_operands(ckb, s),
    }
}

pub(crate) fn term_value(ckb: &ClosedKb, t: &EntityTerm) -> Value {
    match t {
        EntityTerm::Id(id) => ent(*id),
        EntityTerm::Sum(s) => Value::Symbol(ckb.kb().render_sum(s)),
    }
}

/// Do two terms have the same overlap profile?
pub fn same_sum(ckb: &ClosedKb, a: &EntityTerm, b: &EntityTerm) -> bool {
    let (oa, ob) = (term_ops(ckb, a), term_ops(ckb, b));
    if oa.is_empty() || ob.is_empty() {
        return false;
    }
    let mut all = oa.clone();
    all.extend(&ob);
    let Ok(kind) = mereological_kind(ckb, &all, "") else { return false };
    profile(ckb, &oa, kind) == profile(ckb, &ob, kind)
}

/// Ad10, P-typing and Ad17.
pub fn check_parthood_typing(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for ((x, y), cov) in &ckb.p_t {
        if !(kb.is_endurant(*x) && kb.is_endurant(*y)) {
            sink.emit(
                "Ad10",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(cov.clone()))],
                format!("temporary parthood between {} and {}, which are not both endurants", kb.name(*x), kb.name(*y)),
            );
            continue;
        }
        let both = ckb.quale(*x).intersection(ckb.quale(*y));
        let bad = cov.difference(&both);
        if !bad.is_empty() {
            let absent = if !bad.is_subset(ckb.quale(*x)) { *x } else { *y };
            sink.emit(
                "Ad17",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(bad))],
                format!("P({}, {}) holds while {} is not present", kb.name(*x), kb.name(*y), kb.name(absent)),
            );
        }
    }
    for (x, y) in &ckb.p_a {
        let ok = (kb.is_perdurant(*x) && kb.is_perdurant(*y)) || (kb.is_abstract(*x) && kb.is_abstract(*y));
        if !ok {
            sink.emit(
                "P-typing",
                vec![("x", ent(*x)), ("y", ent(*y))],
                format!(
                    "atemporal parthood between {} and {} needs two perdurants or two abstracts",
                    kb.name(*x),
                    kb.name(*y)
                ),
            );
        }
    }
    for (a, b) in &ckb.sum_eqs {
        if !same_sum(ckb, a, b) {
            sink.emit(
                "Sum-identity",
                vec![("x", term_value(ckb, a)), ("y", term_value(ckb, b))],
                format!("{} and {} do not overlap the same entities", kb.render_term(a), kb.render_term(b)),
            );
        }
    }
    sink.finish()
}

/// Reflexivity, antisymmetry, transitivity and strong supplementation.
pub fn check_gem(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    let endurants: Vec<EntityId> = kb.entity_ids().filter(|e| kb.is_endurant(*e)).collect();
    let atemporal: Vec<EntityId> = kb.entity_ids().filter(|e| kb.is_perdurant(*e) || kb.is_abstract(*e)).collect();

    for &x in &endurants {
        let missing = ckb.quale(x).difference(&ckb.p_cov(x, x));
        if !missing.is_empty() {
            sink.emit(
                "GEM-R",
                vec![("x", ent(x)), ("t", time(missing))],
                format!("{} is present but not part of itself", kb.name(x)),
            );
        }
    }
    for &x in &atemporal {
        if !ckb.holds_pa(x, x) {
            sink.emit("GEM-R", vec![("x", ent(x))], format!("{} is not part of itself", kb.name(x)));
        }
    }
    for &x in &atemporal {
        for &y in &atemporal {
            if x < y && ckb.holds_pa(x, y) && ckb.holds_pa(y, x) {
                sink.emit(
                    "GEM-AS",
                    vec![("x", ent(x)), ("y", ent(y))],
                    format!("{} and {} are distinct parts of each other", kb.name(x), kb.name(y)),
                );
            }
        }
    }

    // transitivity
    for ((x, y), c1) in &ckb.p_t {
        for ((y2, z), c2) in ckb.p_t.range((*y, crate::kb::EntityId(0))..) {
            if y2 != y {
                break;
            }
            let bad = c1.intersection(c2).difference(&ckb.p_cov(*x, *z));
            if !bad.is_empty() {
                sink.emit(
                    "GEM-T",
                    vec![("x", ent(*x)), ("y", ent(*y)), ("z", ent(*z)), ("t", time(bad))],
                    format!(
                        "P({}, {}) and P({}, {}) hold but P({}, {}) does not",
                        kb.name(*x),
                        kb.name(*y),
                        kb.name(*y),
                        kb.name(*z),
                        kb.name(*x),
                        kb.name(*z)
                    ),
                );
            }
        }
    }
    for (x, y) in &ckb.p_a {
        for (y2, z) in ckb.p_a.range((*y, crate::kb::EntityId(0))..) {
            if y2 != y {
                break;
            }
            if !ckb.holds_pa(*x, *z) {
                sink.emit(
                    "GEM-T",
                    vec![("x", ent(*x)), ("y", ent(*y)), ("z", ent(*z))],
                    format!(
                        "P({}, {}) and P({}, {}) hold but P({}, {}) does not",
                        kb.name(*x),
                        kb.name(*y),
                        kb.name(*y),
                        kb.name(*z),
                        kb.name(*x),
                        kb.name(*z)
                    ),
                );
            }
        }
    }

    // strong supplementation
    for &x in &endurants {
        for &y in &endurants {
            let mut bad = TimeRegion::default();
            for i in ckb.quale(x).intersection(ckb.quale(y)).instants() {
                if !ckb.part_at(y, x, i) && !ssp_witness_at(ckb, x, y, i) {
                    bad.extend(&TimeRegion::instant(i));
                }
            }
            if !bad.is_empty() {
                sink.emit(
                    "GEM-SSP",
                    vec![("x", ent(x)), ("y", ent(y)), ("t", time(bad))],
                    format!(
                        "{} is not part of {} yet every part of {} overlaps {}",
                        kb.name(y),
                        kb.name(x),
                        kb.name(y),
                        kb.name(x)
                    ),
                );
            }
        }
    }
    for &x in &atemporal {
        for &y in &atemporal {
            if !ckb.holds_pa(y, x) && !ssp_witness_a(ckb, x, y) {
                sink.emit(
                    "GEM-SSP",
                    vec![("x", ent(x)), ("y", ent(y))],
                    format!(
                        "{} is not part of {} yet every part of {} overlaps {}",
                        kb.name(y),
                        kb.name(x),
                        kb.name(y),
                        kb.name(x)
                    ),
                );
            }
        }
    }
    sink.finish()
}

/// Some part of `y` at `i` does not overlap `x`.
pub(crate) fn ssp_witness_at(ckb: &ClosedKb, x: EntityId, y: EntityId, i: Instant) -> bool {
    ckb.kb().entity_ids().any(|z| ckb.part_at(z, y, i) && !ckb.overlap_at_instant(z, x, i))
}

pub(crate) fn ssp_witness_a(ckb: &ClosedKb, x: EntityId, y: EntityId) -> bool {
    ckb.kb().entity_ids().any(|z| ckb.holds_pa(z, y) && !ckb.overlap_a(z, x))
}

/// Truth of a literal over regions, points or the time orderings.
pub(crate) fn region_literal_holds(ckb: &ClosedKb, rel: &Rel, args: &[Arg]) -> Result<bool, String> {
    let kb = ckb.kb();
    let points_of = |a: &Arg| -> Option<(usize, BTreeSet<usize>)> {
        match a {
            Arg::Point { space, point } => Some((*space, BTreeSet::from([*point]))),
            Arg::SpaceRegion { space, region } => kb.space(*space).region_points(region).map(|ps| (*space, ps)),
            Arg::Space(s) => Some((*s, (0..kb.space(*s).points.len()).collect())),
            _ => None,
        }
    };
    match (rel, args) {
        (Rel::P, [Arg::Time(a), Arg::Time(b)]) => Ok(a.is_subset(b)),
        (Rel::P, [a, b]) => match (points_of(a), points_of(b)) {
            (Some((sa, pa)), Some((sb, pb))) => Ok(sa == sb && pa.is_subset(&pb)),
            _ => Err("parthood between incompatible arguments".into()),
        },
        (Rel::Before, [Arg::Time(a), Arg::Time(b)]) => strictly_before(a, b).map_err(|e| e.to_string()),
        (Rel::WeaklyBefore, [Arg::Time(a), Arg::Time(b)]) => weakly_before(a, b).map_err(|e| e.to_string()),
        _ => Err("not a region literal".into()),
    }
}

pub(crate) fn region_witness(ckb: &ClosedKb, lit: &Literal) -> [Value; 2] {
    let mut b = arg_value(&lit.args[1]);
    if let Arg::Space(s) = &lit.args[1] {
        b = Value::Symbol(ckb.kb().space(*s).name.clone());
    }
    [arg_value(&lit.args[0]), b]
}

fn arg_value(a: &Arg) -> Value {
    match a {
        Arg::Time(t) => Value::Time(t.clone()),
        Arg::Point { space, point } => Value::Point { space: *space, point: *point },
        Arg::SpaceRegion { region, .. } => Value::Symbol(region.clone()),
        Arg::Space(s) => Value::Symbol(format!("#space{s}")),
        Arg::Entity(EntityTerm::Id(e)) => Value::Entity(*e),
        Arg::Entity(EntityTerm::Sum(s)) => Value::Symbol(format!("{s:?}")),
    }
}

/// Asserted parthood among regions and points, and time-order claims.
pub fn check_region_literals(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for lit in &ckb.region_lits {
        let label = if lit.rel == Rel::P { "Region-P" } else { "Time-order" };
        let (ok, why) = match region_literal_holds(ckb, &lit.rel, &lit.args) {
            Ok(v) => (v == lit.positive, String::new()),
            Err(e) => (false, format!(" ({e})")),
        };
        if !ok {
            let [a, b] = region_witness(ckb, lit);
            sink.emit(label, vec![("a", a), ("b", b)], format!("{} is false{}", kb.render_literal(lit), why));
        }
    }
    sink.finish()
}
