//! Qualities, quality spaces and quales.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::engine::closure::{ClosedKb, QualeAtom};
use crate::engine::report::{ent, time, Sink, Value, ViolationReport};
use crate::error::{KbError, QualityError};
use crate::kb::EntityId;
use crate::taxonomy::cat;
use crate::timeline::TimeRegion;

/// A finite point graph with named regions and an optional total order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QualitySpace {
    pub name: String,
    pub points: Vec<String>,
    pub adjacency: BTreeSet<(usize, usize)>,
    /// Points from lowest to highest.
    pub order: Option<Vec<usize>>,
    pub regions: Vec<(String, BTreeSet<usize>)>,
    /// Quality categories whose quales live here.
    pub qualities: Vec<String>,
}

impl QualitySpace {
    pub fn new(name: &str) -> Self {
        QualitySpace { name: name.to_string(), ..Default::default() }
    }

    pub fn add_point(&mut self, p: &str) -> Result<usize, KbError> {
        if self.points.iter().any(|q| q == p) {
            return Err(self.err(format!("duplicate point `{p}`")));
        }
        self.points.push(p.to_string());
        Ok(self.points.len() - 1)
    }

    fn err(&self, msg: String) -> KbError {
        KbError::Space { space: self.name.clone(), msg }
    }

    pub fn point_index(&self, p: &str) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    pub fn add_adjacency(&mut self, a: usize, b: usize) {
        self.adjacency.insert((a.min(b), a.max(b)));
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency.contains(&(a.min(b), a.max(b)))
    }

    pub fn region_points(&self, name: &str) -> Option<BTreeSet<usize>> {
        self.regions.iter().find(|(n, _)| n == name).map(|(_, ps)| ps.clone())
    }

    pub fn rank(&self, p: usize) -> Option<usize> {
        self.order.as_ref().and_then(|o| o.iter().position(|q| *q == p))
    }

    pub fn validate(&self) -> Result<(), KbError> {
        for (name, ps) in &self.regions {
            if ps.is_empty() {
                return Err(self.err(format!("region `{name}` is empty")));
            }
            if ps.iter().any(|p| *p >= self.points.len()) {
                return Err(self.err(format!("region `{name}` names an unknown point")));
            }
        }
        if let Some(order) = &self.order {
            let set: BTreeSet<_> = order.iter().collect();
            if set.len() != order.len() || order.len() != self.points.len() {
                return Err(self.err("order must list every point exactly once".into()));
            }
        }
        Ok(())
    }

    fn neighbours(&self, p: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().filter_map(move |&(a, b)| {
            if a == p {
                Some(b)
            } else if b == p {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Points reachable from `start` inside `within`.
    fn component(&self, start: usize, within: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for q in self.neighbours(p) {
                if within.contains(&q) && seen.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    /// Distance between points: index difference in an ordered space,
    /// graph distance otherwise.
    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        if let (Some(ra), Some(rb)) = (self.rank(a), self.rank(b)) {
            return Some(ra.abs_diff(rb));
        }
        let all: BTreeSet<usize> = (0..self.points.len()).collect();
        let mut dist = BTreeMap::from([(a, 0usize)]);
        let mut queue = VecDeque::from([a]);
        while let Some(p) = queue.pop_front() {
            if p == b {
                return dist.get(&p).copied();
            }
            let d = dist[&p];
            for q in self.neighbours(p) {
                if all.contains(&q) && !dist.contains_key(&q) {
                    dist.insert(q, d + 1);
                    queue.push_back(q);
                }
            }
        }
        None
    }
}

/// Does `region` induce a connected subgraph?
pub fn self_connected(space: &QualitySpace, region: &BTreeSet<usize>) -> Result<bool, QualityError> {
    let Some(&first) = region.iter().next() else { return Err(QualityError::EmptyRegion) };
    Ok(space.component(first, region).len() == region.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemaKind {
    Stable,
    Monotone,
    Turning { target: usize },
}

/// A trajectory constraint on the quales of perdurants of one category.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub category: String,
    pub kind: SchemaKind,
    pub space: usize,
    pub continuous: bool,
}

/// Claim that the quales of `quality` within `window` connect `from` and
/// `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorPathDecl {
    pub quality: EntityId,
    pub space: usize,
    pub from: usize,
    pub to: usize,
    pub window: TimeRegion,
}

/// `qt_φ(x, y)`. `phi` must be a leaf of the quality branch.
pub fn qt_of_type(ckb: &ClosedKb, phi: &str, x: EntityId, y: EntityId) -> Result<bool, QualityError> {
    let tax = ckb.kb().taxonomy();
    let id = tax.id(phi).map_err(KbError::from)?;
    if !tax.is_quality_leaf(id) {
        return Err(QualityError::NotQualityLeaf(phi.to_string()));
    }
    Ok(ckb.qt_pairs().contains(&(x, y)) && ckb.kb().is_a(x, phi))
}

/// Temporal quale of a perdurant, endurant or quality.
pub fn temporal_quale(ckb: &ClosedKb, x: EntityId) -> Result<TimeRegion, QualityError> {
    let kb = ckb.kb();
    let q = ckb.quale(x);
    if !q.is_empty() {
        return Ok(q.clone());
    }
    if kb.is_perdurant(x) {
        Err(QualityError::NoTemporalQuale(kb.name(x).to_string()))
    } else {
        Err(QualityError::NoQuale(kb.name(x).to_string()))
    }
}

/// Are `from` and `to` connected through points attested as quales of the
/// quality within the window?
pub fn check_color_path(ckb: &ClosedKb, decl: &ColorPathDecl) -> Result<bool, QualityError> {
    let kb = ckb.kb();
    let space = kb.space(decl.space);
    let attested: BTreeSet<usize> = ckb
        .quale_atoms()
        .iter()
        .filter(|a| a.quality == decl.quality && a.space == decl.space && a.time.is_subset(&decl.window))
        .map(|a| a.point)
        .collect();
    for p in [decl.from, decl.to] {
        if !attested.contains(&p) {
            return Err(QualityError::NotAttested(space.points[p].clone()));
        }
    }
    Ok(space.component(decl.from, &attested).contains(&decl.to))
}

/// Ad46–Ad48, bearer uniqueness, qt and ql typing.
pub fn check_quality_typing(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for (q, b) in ckb.qt_pairs() {
        if !kb.is_quality(*q) {
            sink.emit(
                "qt-typing",
                vec![("x", ent(*q)), ("y", ent(*b))],
                format!("{} is not a quality", kb.name(*q)),
            );
            continue;
        }
        let (label, need, what) = if kb.is_a(*q, cat::TQ) {
            ("Ad46", cat::PD, "a perdurant")
        } else if kb.is_a(*q, cat::PQ) {
            ("Ad47", cat::PED, "a physical endurant")
        } else if kb.is_a(*q, cat::AQ) {
            ("Ad48", cat::NPED, "a non-physical endurant")
        } else {
            continue;
        };
        if !kb.is_a(*b, need) {
            sink.emit(
                label,
                vec![("x", ent(*q)), ("y", ent(*b))],
                format!("{} inheres in {}, which is not {}", kb.name(*q), kb.name(*b), what),
            );
        }
    }
    for q in kb.entity_ids().filter(|q| kb.is_quality(*q)) {
        let bearers = ckb.bearers(q);
        if bearers.len() != 1 {
            sink.emit(
                "Q-bearer",
                vec![("x", ent(q))],
                format!("{} has {} bearers, expected exactly one", kb.name(q), bearers.len()),
            );
        }
    }
    for atom in ckb.quale_atoms() {
        let q = atom.quality;
        let wrong = if !kb.is_quality(q) {
            Some(format!("{} is not a quality", kb.name(q)))
        } else {
            match kb.space_for_quality(q) {
                Some(s) if s != atom.space => Some(format!(
                    "{} lies in {}, but {} takes quales in {}",
                    kb.space(atom.space).points[atom.point],
                    kb.space(atom.space).name,
                    kb.name(q),
                    kb.space(s).name
                )),
                _ => None,
            }
        };
        if let Some(msg) = wrong {
            sink.emit(
                "ql-typing",
                vec![
                    ("l", Value::Point { space: atom.space, point: atom.point }),
                    ("x", ent(q)),
                    ("t", time(atom.time.clone())),
                ],
                msg,
            );
        }
    }
    sink.finish()
}

fn before(a: &TimeRegion, b: &TimeRegion) -> bool {
    matches!((a.last(), b.first()), (Some(x), Some(y)) if x < y)
}

/// Quale attestations of the schema's space for `x`, restricted to its
/// temporal quale. Turning schemas also look at qualities of wholes.
pub(crate) fn trajectory(ckb: &ClosedKb, schema: &Schema, x: EntityId) -> Vec<QualeAtom> {
    let kb = ckb.kb();
    let mut bearers = vec![x];
    if matches!(schema.kind, SchemaKind::Turning { .. }) {
        bearers.extend(kb.entity_ids().filter(|w| *w != x && ckb.holds_pa(x, *w)));
    }
    let quals: BTreeSet<EntityId> = bearers
        .iter()
        .flat_map(|b| ckb.qualities_of(*b))
        .filter(|q| kb.space_for_quality(*q) == Some(schema.space))
        .collect();
    let tx = ckb.quale(x);
    let mut out: Vec<QualeAtom> = ckb
        .quale_atoms()
        .iter()
        .filter(|a| quals.contains(&a.quality) && a.space == schema.space && a.time.is_subset(tx) && !a.time.is_empty())
        .cloned()
        .collect();
    out.sort_by_key(|a| (a.time.first(), a.time.last(), a.point));
    out
}

/// Why the trajectory of `x` breaks its schema, if it does.
pub(crate) fn schema_breach(ckb: &ClosedKb, schema: &Schema, x: EntityId) -> Option<String> {
    let space = ckb.kb().space(schema.space);
    let atoms = trajectory(ckb, schema, x);
    let pname = |p: usize| space.points[p].clone();
    match &schema.kind {
        SchemaKind::Stable => {
            let distinct: BTreeSet<usize> = atoms.iter().map(|a| a.point).collect();
            if distinct.len() > 1 {
                let ps: Vec<String> = distinct.into_iter().map(pname).collect();
                return Some(format!("quale changes during the perdurant ({})", ps.join(", ")));
            }
        }
        SchemaKind::Monotone => {
            let distinct: BTreeSet<usize> = atoms.iter().map(|a| a.point).collect();
            if distinct.len() < 2 {
                return Some("no change of quale during the perdurant".into());
            }
            for a in &atoms {
                for b in &atoms {
                    if before(&a.time, &b.time) && space.rank(a.point) > space.rank(b.point) {
                        return Some(format!("quale decreases from {} to {}", pname(a.point), pname(b.point)));
                    }
                }
            }
        }
        SchemaKind::Turning { target } => {
            if atoms.is_empty() {
                return None;
            }
            let d = |p: usize| space.distance(p, *target);
            for a in &atoms {
                for b in &atoms {
                    if before(&a.time, &b.time) {
                        let ok = matches!((d(a.point), d(b.point)), (Some(da), Some(db)) if db < da);
                        if !ok {
                            return Some(format!(
                                "distance to {} does not decrease from {} to {}",
                                pname(*target),
                                pname(a.point),
                                pname(b.point)
                            ));
                        }
                    }
                }
            }
            let last = ckb.quale(x).last();
            let reached = atoms.iter().any(|a| a.time.contains(last.unwrap_or(0)) && d(a.point) == Some(0));
            if !reached {
                return Some(format!("{} is not reached at the end", pname(*target)));
            }
        }
    }
    None
}

/// Consecutive distinct quales must be adjacent.
pub(crate) fn continuity_breach(ckb: &ClosedKb, schema: &Schema, x: EntityId) -> Option<String> {
    let space = ckb.kb().space(schema.space);
    let atoms = trajectory(ckb, schema, x);
    for w in atoms.windows(2) {
        if w[0].point != w[1].point && !space.adjacent(w[0].point, w[1].point) {
            return Some(format!("jump from {} to {}", space.points[w[0].point], space.points[w[1].point]));
        }
    }
    None
}

pub(crate) fn schema_label(kind: &SchemaKind) -> &'static str {
    match kind {
        SchemaKind::Stable => "F29-stable",
        SchemaKind::Monotone => "F30-monotone",
        SchemaKind::Turning { .. } => "F39-turning",
    }
}

/// Stability, monotone increase, turning and continuity schemas, and the
/// declared color paths.
pub fn check_trajectory_constraints(ckb: &ClosedKb) -> Vec<ViolationReport> {
    let kb = ckb.kb();
    let mut sink = Sink::new();
    for schema in kb.schemas() {
        for x in kb.entity_ids().filter(|x| kb.is_perdurant(*x) && kb.is_a(*x, &schema.category)) {
            if let Some(msg) = schema_breach(ckb, schema, x) {
                sink.emit(
                    schema_label(&schema.kind),
                    vec![("x", ent(x)), ("c", Value::Symbol(schema.category.clone()))],
                    format!("{}: {}", kb.name(x), msg),
                );
            }
            if schema.continuous {
                if let Some(msg) = continuity_breach(ckb, schema, x) {
                    sink.emit(
                        "F26-continuous",
                        vec![("x", ent(x)), ("c", Value::Symbol(schema.category.clone()))],
                        format!("{}: {}", kb.name(x), msg),
                    );
                }
            }
        }
    }
    for decl in kb.color_paths() {
        let fail = match check_color_path(ckb, decl) {
            Ok(true) => None,
            Ok(false) => Some("no path of attested quales joins the endpoints".to_string()),
            Err(e) => Some(e.to_string()),
        };
        if let Some(msg) = fail {
            sink.emit(
                "F25-path",
                vec![
                    ("q", ent(decl.quality)),
                    ("l", Value::Point { space: decl.space, point: decl.from }),
                    ("l2", Value::Point { space: decl.space, point: decl.to }),
                    ("t", time(decl.window.clone())),
                ],
                msg,
            );
        }
    }
    sink.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> QualitySpace {
        let mut s = QualitySpace::new("S");
        for i in 0..n {
            s.add_point(&format!("p{i}")).unwrap();
        }
        for i in 1..n {
            s.add_adjacency(i - 1, i);
        }
        s
    }

    #[test]
    fn connectivity() {
        let s = line(5);
        assert!(self_connected(&s, &BTreeSet::from([1, 2, 3])).unwrap());
        assert!(self_connected(&s, &BTreeSet::from([4])).unwrap());
        assert!(!self_connected(&s, &BTreeSet::from([0, 2])).unwrap());
        assert_eq!(self_connected(&s, &BTreeSet::new()), Err(QualityError::EmptyRegion));
    }

    #[test]
    fn distances() {
        let mut s = line(4);
        assert_eq!(s.distance(0, 3), Some(3));
        s.add_adjacency(0, 3);
        assert_eq!(s.distance(0, 3), Some(1));
        s.order = Some(vec![0, 1, 2, 3]);
        assert_eq!(s.distance(0, 3), Some(3));
    }

    #[test]
    fn order_must_be_total() {
        let mut s = line(3);
        s.order = Some(vec![0, 1]);
        assert!(s.validate().is_err());
        s.order = Some(vec![0, 1, 1]);
        assert!(s.validate().is_err());
        s.order = Some(vec![2, 0, 1]);
        assert!(s.validate().is_ok());
    }
}
