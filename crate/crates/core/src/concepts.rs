//! Concepts, roles and classification.

use crate::engine::closure::ClosedKb;
use crate::engine::report::{ent, time, Sink, ViolationReport};
use crate::kb::EntityId;
use crate::taxonomy::cat;
use crate::timeline::TimeRegion;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConceptFlags {
    pub founded: bool,
    pub functional: bool,
}

/// `(requires c d t)`: whatever `c` classifies during `t` must also be
/// classified by `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub concept: EntityId,
    pub required: EntityId,
    pub time: TimeRegion,
}

/// Entities classified by `concept` that are classified by it whenever
/// they are present.
pub(crate) fn rigidly_classified(ckb: &ClosedKb, concept: EntityId) -> Vec<EntityId> {
    ckb.kb()
        .entity_ids()
        .filter(|y| {
            let c = ckb.cf_cov(*y, concept);
            !c.is_empty() && ckb.quale(*y).is_subset(&c)
        })
        .collect()
}

/// Nothing the concept classifies is classified by it at every time it
/// is present.
pub fn is_anti_rigid(ckb: &ClosedKb, concept: EntityId) -> bool {
    rigidly_classified(ckb, concept).is_empty()
}

/// A11, A12, A14 and A15.
pub fn check_classification(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for ((x, y), cov) in &ckb.cf {
        if !((kb.is_endurant(*x) || kb.is_perdurant(*x)) && kb.is_a(*y, cat::C)) {
            sink.emit(
                "A11",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(cov.clone()))],
                format!("CF({}, {}) needs an endurant or perdurant and a concept", kb.name(*x), kb.name(*y)),
            );
        }
        let absent = cov.difference(ckb.quale(*x));
        if !absent.is_empty() {
            sink.emit(
                "A12",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(absent))],
                format!("{} is classified by {} while not present", kb.name(*x), kb.name(*y)),
            );
        }
        if x <= y {
            let both = cov.intersection(&ckb.cf_cov(*y, *x));
            if !both.is_empty() {
                sink.emit(
                    "A14",
                    vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(both))],
                    format!("{} and {} classify each other", kb.name(*x), kb.name(*y)),
                );
            }
        }
        for ((y2, z), c2) in ckb.cf.range((*y, EntityId(0))..) {
            if y2 != y {
                break;
            }
            let tri = cov.intersection(c2).intersection(&ckb.cf_cov(*x, *z));
            if !tri.is_empty() {
                sink.emit(
                    "A15",
                    vec![("x", ent(*x)), ("y", ent(*y)), ("z", ent(*z)), ("t", time(tri))],
                    format!(
                        "{} is classified by both {} and {}, which classifies {}",
                        kb.name(*x),
                        kb.name(*y),
                        kb.name(*z),
                        kb.name(*y)
                    ),
                );
            }
        }
    }
    sink.finish()
}

/// Roles are anti-rigid and founded; functional flags belong to roles.
pub fn check_roles(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for c in kb.entity_ids() {
        let flags = kb.flags(c);
        if kb.is_a(c, cat::RL) {
            if let Some(y) = rigidly_classified(ckb, c).first() {
                sink.emit(
                    "D3-AR",
                    vec![("x", ent(c)), ("y", ent(*y))],
                    format!("{} classifies {} at every time it is present", kb.name(c), kb.name(*y)),
                );
            }
            if !flags.founded {
                sink.emit("D3-FD", vec![("x", ent(c))], format!("role {} is not declared founded", kb.name(c)));
            }
        } else if flags.functional {
            sink.emit("F11-role", vec![("x", ent(c))], format!("{} is functional but not a role", kb.name(c)));
        }
    }
    sink.finish()
}

/// A functional role classifies at most one entity per instant.
pub fn check_functional_roles(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for c in kb.entity_ids().filter(|c| kb.flags(*c).functional) {
        let players: Vec<(EntityId, TimeRegion)> =
            kb.entity_ids().map(|x| (x, ckb.cf_cov(x, c))).filter(|(_, t)| !t.is_empty()).collect();
        for (i, (x, tx)) in players.iter().enumerate() {
            for (x2, tx2) in &players[i + 1..] {
                let both = tx.intersection(tx2);
                if !both.is_empty() {
                    sink.emit(
                        "F12-functional",
                        vec![("c", ent(c)), ("x", ent(*x)), ("x'", ent(*x2)), ("t", time(both))],
                        format!("functional role {} classifies both {} and {}", kb.name(c), kb.name(*x), kb.name(*x2)),
                    );
                }
            }
        }
    }
    sink.finish()
}

/// Plan execution relates a perdurant to a concept present throughout it.
pub fn check_plan_execution(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for (x, y) in ckb.executes() {
        if !(kb.is_perdurant(*x) && kb.is_a(*y, cat::C)) {
            sink.emit(
                "F37-typing",
                vec![("x", ent(*x)), ("y", ent(*y))],
                format!("ExecutesPlan({}, {}) needs a perdurant and a concept", kb.name(*x), kb.name(*y)),
            );
            continue;
        }
        let gap = ckb.quale(*x).difference(ckb.quale(*y));
        if !gap.is_empty() {
            sink.emit(
                "F37-presence",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(gap))],
                format!("plan {} is not present while {} executes it", kb.name(*y), kb.name(*x)),
            );
        }
    }
    sink.finish()
}

/// Declared concept dependencies and the distinctness of the required
/// concepts across times.
pub fn check_concept_dependency(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    let reqs = kb.requirements();
    for r in reqs {
        for x in kb.entity_ids() {
            let during = ckb.cf_cov(x, r.concept).intersection(&r.time);
            let bad = during.difference(&ckb.cf_cov(x, r.required));
            if !bad.is_empty() {
                sink.emit(
                    "F43-concept",
                    vec![("x", ent(x)), ("c", ent(r.concept)), ("d", ent(r.required)), ("t", time(bad))],
                    format!(
                        "{} is classified by {} but not by the required {}",
                        kb.name(x),
                        kb.name(r.concept),
                        kb.name(r.required)
                    ),
                );
            }
        }
    }
    for (i, a) in reqs.iter().enumerate() {
        for b in &reqs[i + 1..] {
            if a.concept == b.concept && a.required == b.required && a.time != b.time {
                sink.emit(
                    "F43-distinct",
                    vec![("c", ent(a.concept)), ("d", ent(a.required))],
                    format!(
                        "{} requires the same concept {} at {} and {}",
                        kb.name(a.concept),
                        kb.name(a.required),
                        kb.render_region(&a.time),
                        kb.render_region(&b.time)
                    ),
                );
            }
        }
    }
    sink.finish()
}
