//! Presence and participation.

use crate::engine::closure::ClosedKb;
use crate::engine::report::{ent, time, Sink, ViolationReport};
use crate::kb::EntityId;
use crate::timeline::TimeRegion;

/// Maximal presence of every entity: `PRE(x, t)` holds exactly for the
/// nonempty subregions `t` of the region returned for `x`.
pub fn compute_presence(ckb: &ClosedKb) -> Vec<(EntityId, TimeRegion)> {
    ckb.kb()
        .entity_ids()
        .filter(|e| !ckb.quale(*e).is_empty())
        .map(|e| (e, ckb.quale(e).clone()))
        .collect()
}

/// `PC_C(x, y)`: `y` is present at some time and `x` participates in it
/// whenever it is.
pub fn constant_participation(ckb: &ClosedKb, x: EntityId, y: EntityId) -> bool {
    let qy = ckb.quale(y);
    !qy.is_empty() && qy.is_subset(&ckb.pc_cov(x, y))
}

/// Instants at which perdurant `e` is present without participants.
pub(crate) fn unparticipated(ckb: &ClosedKb, e: EntityId) -> TimeRegion {
    let mut covered = TimeRegion::default();
    for ((_, y), c) in &ckb.pc {
        if *y == e {
            covered.extend(c);
        }
    }
    ckb.quale(e).difference(&covered)
}

/// Negative presence literals contradicted by the temporal quale.
pub fn check_presence(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for x in kb.entity_ids() {
        for n in &ckb.pre_denied[x.index()] {
            if ckb.present(x, n) {
                sink.emit(
                    "Dd40-conflict",
                    vec![("x", ent(x)), ("t", time(n.clone()))],
                    format!("{} is denied presence at {} but its temporal quale covers it", kb.name(x), kb.render_region(n)),
                );
            }
        }
    }
    sink.finish()
}

/// Ad33–Ad36 and constant participation claims.
pub fn check_participation(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for ((x, y), cov) in &ckb.pc {
        if !(kb.is_endurant(*x) && kb.is_perdurant(*y)) {
            sink.emit(
                "Ad33",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(cov.clone()))],
                format!("PC({}, {}) needs an endurant and a perdurant", kb.name(*x), kb.name(*y)),
            );
            continue;
        }
        let bad = cov.difference(&ckb.quale(*x).intersection(ckb.quale(*y)));
        if !bad.is_empty() {
            let absent = if bad.is_subset(ckb.quale(*x)) { *y } else { *x };
            sink.emit(
                "Ad36",
                vec![("x", ent(*x)), ("y", ent(*y)), ("t", time(bad))],
                format!("{} participates in {} while {} is not present", kb.name(*x), kb.name(*y), kb.name(absent)),
            );
        }
    }
    for e in kb.entity_ids() {
        if kb.is_perdurant(e) {
            let bad = unparticipated(ckb, e);
            if !bad.is_empty() {
                sink.emit(
                    "Ad34",
                    vec![("x", ent(e)), ("t", time(bad))],
                    format!("{} is present without participants", kb.name(e)),
                );
            }
        } else if kb.is_endurant(e) && !ckb.pc.keys().any(|(x, _)| *x == e) {
            sink.emit("Ad35", vec![("x", ent(e))], format!("{} participates in no perdurant", kb.name(e)));
        }
    }
    for (x, y) in &ckb.pcc {
        if !constant_participation(ckb, *x, *y) {
            let missing = ckb.quale(*y).difference(&ckb.pc_cov(*x, *y));
            let msg = if ckb.quale(*y).is_empty() {
                format!("{} is never present", kb.name(*y))
            } else {
                format!("{} does not participate in {} at {}", kb.name(*x), kb.name(*y), kb.render_region(&missing))
            };
            sink.emit("Dd63", vec![("x", ent(*x)), ("y", ent(*y))], msg);
        }
    }
    sink.finish()
}
