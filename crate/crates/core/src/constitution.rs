//! Constitution.

use crate::engine::closure::ClosedKb;
use crate::engine::report::{ent, time, Sink, ViolationReport};
use crate::kb::EntityId;
use crate::taxonomy::cat;
use crate::timeline::TimeRegion;

/// `(cover y (y1 ... yn) t)`: the listed parts exhaust `y` at `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub whole: EntityId,
    pub parts: Vec<EntityId>,
    pub time: TimeRegion,
}

/// Every constitution atom of the closed KB, as maximal coverage per pair.
pub fn saturate_constitution(ckb: &ClosedKb) -> Vec<(EntityId, EntityId, TimeRegion)> {
    ckb.k.iter().map(|((x, y), t)| (*x, *y, t.clone())).collect()
}

/// Atoms produced by distribution over a cover.
pub fn distributed_constitution(ckb: &ClosedKb) -> Vec<(EntityId, EntityId, TimeRegion)> {
    ckb.cover_derived.iter().cloned().collect()
}

/// Ad20, Ad21, Ad24 and transitivity.
pub fn check_constitution(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for ((x, y), cov) in &ckb.k {
        let endurants = kb.is_endurant(*x) && kb.is_endurant(*y);
        let perdurants = kb.is_perdurant(*x) && kb.is_perdurant(*y);
        if !(endurants || perdurants) {
            sink.emit(
                "Ad20",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(cov.clone()))],
                format!("K({}, {}) relates neither two endurants nor two perdurants", kb.name(*x), kb.name(*y)),
            );
            continue;
        }
        if endurants && kb.is_a(*x, cat::PED) != kb.is_a(*y, cat::PED) {
            sink.emit(
                "Ad21",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(cov.clone()))],
                format!("K({}, {}) mixes a physical and a non-physical endurant", kb.name(*x), kb.name(*y)),
            );
        }
        if x <= y {
            let both = cov.intersection(&ckb.k_cov(*y, *x));
            if !both.is_empty() {
                sink.emit(
                    "Ad24",
                    vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(both))],
                    if x == y {
                        format!("{} constitutes itself", kb.name(*x))
                    } else {
                        format!("{} and {} constitute each other", kb.name(*x), kb.name(*y))
                    },
                );
            }
        }
        for ((y2, z), c2) in ckb.k.range((*y, EntityId(0))..) {
            if y2 != y {
                break;
            }
            let bad = cov.intersection(c2).difference(&ckb.k_cov(*x, *z));
            if !bad.is_empty() {
                sink.emit(
                    "K-trans",
                    vec![("x", ent(*x)), ("y", ent(*y)), ("z", ent(*z)), ("t", time(bad))],
                    format!(
                        "K({}, {}) and K({}, {}) hold but K({}, {}) does not",
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
    sink.finish()
}
