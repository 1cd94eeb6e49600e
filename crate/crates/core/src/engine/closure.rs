//! Definitional closure: presence, parthood, participation and
//! constitution saturation, sum resolution and the fresh entities some
//! options introduce.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{CloseError, SumError};
use crate::kb::{Arg, EntityId, EntityTerm, KnowledgeBase, Literal, Origin, Rel, SumTerm};
use crate::mereology::resolve_sum;
use crate::taxonomy::cat;
use crate::timeline::{Instant, TimeRegion, Timeline};

pub type Pair = (EntityId, EntityId);
pub type Coverage = BTreeMap<Pair, TimeRegion>;

/// `ql(point, quality, time)`: an exact quale attestation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QualeAtom {
    pub space: usize,
    pub point: usize,
    pub quality: EntityId,
    pub time: TimeRegion,
}

/// A knowledge base together with everything its definitions entail.
#[derive(Clone, Debug)]
pub struct ClosedKb {
    pub(crate) kb: KnowledgeBase,
    pub(crate) timeline: Option<Timeline>,
    pub(crate) quale: Vec<TimeRegion>,
    pub(crate) pre_asserted: Vec<TimeRegion>,
    pub(crate) pre_denied: Vec<Vec<TimeRegion>>,
    pub(crate) p_t: Coverage,
    pub(crate) p_a: BTreeSet<Pair>,
    pub(crate) pc: Coverage,
    pub(crate) k: Coverage,
    pub(crate) cf: Coverage,
    /// Negative literals of the time-indexed relations.
    pub(crate) denied: BTreeMap<(Rel, EntityId, EntityId), Vec<TimeRegion>>,
    /// Negative literals of the atemporal relations.
    pub(crate) denied_a: BTreeSet<(Rel, Vec<EntityId>)>,
    pub(crate) qt: BTreeSet<Pair>,
    pub(crate) ql: Vec<QualeAtom>,
    pub(crate) ql_t: Vec<(TimeRegion, EntityId)>,
    pub(crate) pcc: BTreeSet<Pair>,
    pub(crate) executes: BTreeSet<Pair>,
    pub(crate) user: BTreeMap<String, BTreeSet<Vec<EntityId>>>,
    /// `(= a b)` identity claims between terms.
    pub(crate) sum_eqs: Vec<(EntityTerm, EntityTerm)>,
    /// Parthood among regions and points, and the time orderings.
    pub(crate) region_lits: Vec<Literal>,
    pub(crate) bindings: BTreeMap<SumTerm, EntityId>,
    /// Constitution atoms produced by the distribution rule.
    pub(crate) cover_derived: BTreeSet<(EntityId, EntityId, TimeRegion)>,
    pub(crate) warnings: Vec<String>,
    // [instant - lo][whole][part]
    parts_index: Vec<Vec<Vec<bool>>>,
}

impl ClosedKb {
    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn timeline(&self) -> Option<Timeline> {
        self.timeline
    }

    pub fn instants(&self) -> Vec<Instant> {
        self.timeline.map(|t| t.instants().collect()).unwrap_or_default()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Entity a sum term was resolved to during closure.
    pub fn binding(&self, term: &SumTerm) -> Option<EntityId> {
        self.bindings.get(&normalize(&self.kb, term)).copied()
    }

    pub fn quale(&self, x: EntityId) -> &TimeRegion {
        &self.quale[x.index()]
    }

    pub fn present(&self, x: EntityId, t: &TimeRegion) -> bool {
        !t.is_empty() && t.is_subset(self.quale(x))
    }

    pub fn present_at(&self, x: EntityId, i: Instant) -> bool {
        self.quale(x).contains(i)
    }

    pub fn p_cov(&self, x: EntityId, y: EntityId) -> TimeRegion {
        self.p_t.get(&(x, y)).cloned().unwrap_or_default()
    }

    pub fn pc_cov(&self, x: EntityId, y: EntityId) -> TimeRegion {
        self.pc.get(&(x, y)).cloned().unwrap_or_default()
    }

    pub fn k_cov(&self, x: EntityId, y: EntityId) -> TimeRegion {
        self.k.get(&(x, y)).cloned().unwrap_or_default()
    }

    pub fn cf_cov(&self, x: EntityId, y: EntityId) -> TimeRegion {
        self.cf.get(&(x, y)).cloned().unwrap_or_default()
    }

    fn covered(map: &Coverage, x: EntityId, y: EntityId, t: &TimeRegion) -> bool {
        !t.is_empty() && map.get(&(x, y)).is_some_and(|c| t.is_subset(c))
    }

    /// `P(x, y, t)`.
    pub fn holds_p(&self, x: EntityId, y: EntityId, t: &TimeRegion) -> bool {
        Self::covered(&self.p_t, x, y, t)
    }

    /// Atemporal `P(x, y)`.
    pub fn holds_pa(&self, x: EntityId, y: EntityId) -> bool {
        self.p_a.contains(&(x, y))
    }

    pub fn holds_pc(&self, x: EntityId, y: EntityId, t: &TimeRegion) -> bool {
        Self::covered(&self.pc, x, y, t)
    }

    pub fn holds_k(&self, x: EntityId, y: EntityId, t: &TimeRegion) -> bool {
        Self::covered(&self.k, x, y, t)
    }

    pub fn holds_cf(&self, x: EntityId, y: EntityId, t: &TimeRegion) -> bool {
        Self::covered(&self.cf, x, y, t)
    }

    pub fn part_at(&self, x: EntityId, y: EntityId, i: Instant) -> bool {
        match self.timeline {
            Some(tl) if i >= tl.bounds().0 && i <= tl.bounds().1 => {
                self.parts_index[(i - tl.bounds().0) as usize][y.index()][x.index()]
            }
            _ => false,
        }
    }

    /// Temporary overlap at a single instant.
    pub fn overlap_at_instant(&self, x: EntityId, y: EntityId, i: Instant) -> bool {
        let Some(tl) = self.timeline else { return false };
        if i < tl.bounds().0 || i > tl.bounds().1 {
            return false;
        }
        let row = &self.parts_index[(i - tl.bounds().0) as usize];
        row[x.index()].iter().zip(&row[y.index()]).any(|(a, b)| *a && *b)
    }

    /// Atemporal overlap.
    pub fn overlap_a(&self, x: EntityId, y: EntityId) -> bool {
        self.kb.entity_ids().any(|z| self.holds_pa(z, x) && self.holds_pa(z, y))
    }

    pub fn qt_pairs(&self) -> &BTreeSet<Pair> {
        &self.qt
    }

    pub fn quale_atoms(&self) -> &[QualeAtom] {
        &self.ql
    }

    pub fn executes(&self) -> &BTreeSet<Pair> {
        &self.executes
    }

    pub fn user_tuples(&self, rel: &str) -> Option<&BTreeSet<Vec<EntityId>>> {
        self.user.get(rel)
    }

    /// Bearers of quality `q`.
    pub fn bearers(&self, q: EntityId) -> Vec<EntityId> {
        self.qt.iter().filter(|(a, _)| *a == q).map(|(_, b)| *b).collect()
    }

    /// Qualities inhering in `x`.
    pub fn qualities_of(&self, x: EntityId) -> Vec<EntityId> {
        self.qt.iter().filter(|(_, b)| *b == x).map(|(a, _)| *a).collect()
    }

    /// Instants at which a negative literal of `rel` over `(x, y)` blocks
    /// derivations.
    pub(crate) fn blocked(&self, rel: &Rel, x: EntityId, y: EntityId) -> TimeRegion {
        blocked_of(&self.denied, rel, x, y)
    }

    fn empty(kb: KnowledgeBase) -> ClosedKb {
        let n = kb.entities().len();
        ClosedKb {
            timeline: kb.timeline(),
            quale: vec![TimeRegion::default(); n],
            pre_asserted: vec![TimeRegion::default(); n],
            pre_denied: vec![Vec::new(); n],
            p_t: Coverage::new(),
            p_a: BTreeSet::new(),
            pc: Coverage::new(),
            k: Coverage::new(),
            cf: Coverage::new(),
            denied: BTreeMap::new(),
            denied_a: BTreeSet::new(),
            qt: BTreeSet::new(),
            ql: Vec::new(),
            ql_t: Vec::new(),
            pcc: BTreeSet::new(),
            executes: BTreeSet::new(),
            user: BTreeMap::new(),
            sum_eqs: Vec::new(),
            region_lits: Vec::new(),
            bindings: BTreeMap::new(),
            cover_derived: BTreeSet::new(),
            warnings: Vec::new(),
            parts_index: Vec::new(),
            kb,
        }
    }

    fn build_index(&mut self) {
        let n = self.kb.entities().len();
        let Some(tl) = self.timeline else {
            self.parts_index.clear();
            return;
        };
        let mut idx = vec![vec![vec![false; n]; n]; tl.instants().count()];
        for ((x, y), cov) in &self.p_t {
            for i in cov.instants() {
                if i >= tl.bounds().0 && i <= tl.bounds().1 {
                    idx[(i - tl.bounds().0) as usize][y.index()][x.index()] = true;
                }
            }
        }
        self.parts_index = idx;
    }
}

fn blocked_of(denied: &BTreeMap<(Rel, EntityId, EntityId), Vec<TimeRegion>>, rel: &Rel, x: EntityId, y: EntityId) -> TimeRegion {
    let mut out = TimeRegion::default();
    if let Some(ns) = denied.get(&(rel.clone(), x, y)) {
        for n in ns {
            out.extend(n);
        }
    }
    out
}

/// Flattens nested sums over skolem entities and orders operands.
pub(crate) fn normalize(kb: &KnowledgeBase, term: &SumTerm) -> SumTerm {
    match term {
        SumTerm::Fusion(_) => term.clone(),
        SumTerm::Sum(ops) => {
            let mut out = BTreeSet::new();
            let mut stack: Vec<EntityId> = ops.clone();
            while let Some(o) = stack.pop() {
                match &kb.entity(o).origin {
                    Origin::Skolem(SumTerm::Sum(inner)) => stack.extend(inner.iter().copied()),
                    _ => {
                        out.insert(o);
                    }
                }
            }
            SumTerm::Sum(out.into_iter().collect())
        }
    }
}

/// Operands of a sum or the members of a fusion predicate.
pub(crate) fn operands(kb: &KnowledgeBase, term: &SumTerm) -> Vec<EntityId> {
    match normalize(kb, term) {
        SumTerm::Sum(ops) => ops,
        SumTerm::Fusion(pred) => {
            if kb.taxonomy().contains(&pred) {
                kb.entity_ids()
                    .filter(|e| !matches!(kb.entity(*e).origin, Origin::Skolem(_)) && kb.is_a(*e, &pred))
                    .collect()
            } else {
                Vec::new()
            }
        }
    }
}

fn fusion_members_user(kb: &KnowledgeBase, user: &BTreeMap<String, BTreeSet<Vec<EntityId>>>, term: &SumTerm) -> Vec<EntityId> {
    match term {
        SumTerm::Fusion(pred) if !kb.taxonomy().contains(pred) => user
            .get(pred)
            .map(|ts| ts.iter().filter(|t| t.len() == 1).map(|t| t[0]).collect())
            .unwrap_or_default(),
        _ => operands(kb, term),
    }
}

pub(crate) fn term_operands(ckb: &ClosedKb, term: &SumTerm) -> Vec<EntityId> {
    fusion_members_user(&ckb.kb, &ckb.user, term)
}

fn skolem_ops(kb: &KnowledgeBase, e: EntityId) -> Option<&[EntityId]> {
    match &kb.entity(e).origin {
        Origin::Skolem(SumTerm::Sum(ops)) => Some(ops),
        _ => None,
    }
}

fn cover_of(map: &Coverage, key: Pair) -> TimeRegion {
    map.get(&key).cloned().unwrap_or_default()
}

fn add_cov(map: &mut Coverage, key: Pair, t: &TimeRegion) {
    if t.is_empty() {
        return;
    }
    map.entry(key).or_default().extend(t);
}

/// Per-instant transitive closure. Derived links are never added at
/// blocked instants.
fn transitive_closure(n: usize, instants: &[Instant], base: &Coverage, blocked: impl Fn(Pair) -> TimeRegion) -> Coverage {
    let mut out = base.clone();
    let mut block_cache: BTreeMap<Pair, TimeRegion> = BTreeMap::new();
    for &i in instants {
        let mut m = vec![vec![false; n]; n];
        for ((x, y), c) in base {
            if c.contains(i) {
                m[x.index()][y.index()] = true;
            }
        }
        loop {
            let mut changed = false;
            for k in 0..n {
                for a in 0..n {
                    if !m[a][k] {
                        continue;
                    }
                    for b in 0..n {
                        if m[k][b] && !m[a][b] {
                            let key = (EntityId(a as u32), EntityId(b as u32));
                            let bl = block_cache.entry(key).or_insert_with(|| blocked(key));
                            if !bl.contains(i) {
                                m[a][b] = true;
                                changed = true;
                                add_cov(&mut out, key, &TimeRegion::instant(i));
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    out
}

fn atemporal_closure(n: usize, base: &BTreeSet<Pair>, blocked: &BTreeSet<Pair>) -> BTreeSet<Pair> {
    let mut m = vec![vec![false; n]; n];
    for (x, y) in base {
        m[x.index()][y.index()] = true;
    }
    loop {
        let mut changed = false;
        for k in 0..n {
            for a in 0..n {
                if !m[a][k] {
                    continue;
                }
                for b in 0..n {
                    if m[k][b] && !m[a][b] && !blocked.contains(&(EntityId(a as u32), EntityId(b as u32))) {
                        m[a][b] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = BTreeSet::new();
    for (a, row) in m.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if *v {
                out.insert((EntityId(a as u32), EntityId(b as u32)));
            }
        }
    }
    out
}

#[derive(Default)]
struct Asserted {
    p_t: Coverage,
    p_a: BTreeSet<Pair>,
    pc: Coverage,
    k: Coverage,
    cf: Coverage,
}

/// Loads ground literals whose sum terms are already bound. Unbound sum
/// terms are reported as pending.
fn load(kb: &KnowledgeBase, bindings: &BTreeMap<SumTerm, EntityId>, pending: &mut BTreeMap<SumTerm, bool>) -> Result<(ClosedKb, Asserted), CloseError> {
    let mut st = ClosedKb::empty(kb.clone());
    st.bindings = bindings.clone();
    let mut asserted = Asserted::default();
    let mut neg_ql: Vec<QualeAtom> = Vec::new();
    let mut neg_qlt: Vec<(TimeRegion, EntityId)> = Vec::new();
    for lit in kb.literals() {
        if lit.rel == Rel::SumEq {
            if let (Arg::Entity(a), Arg::Entity(b)) = (&lit.args[0], &lit.args[1]) {
                st.sum_eqs.push((a.clone(), b.clone()));
            }
            continue;
        }
        let region_form = matches!(lit.rel, Rel::Before | Rel::WeaklyBefore)
            || (lit.rel == Rel::P && lit.args.len() == 2 && !matches!(lit.args[0], Arg::Entity(_)));
        if region_form {
            st.region_lits.push(lit.clone());
            continue;
        }
        let mut ids = Vec::new();
        let mut bound = true;
        for a in &lit.args {
            match a {
                Arg::Entity(EntityTerm::Id(id)) => ids.push(*id),
                Arg::Entity(EntityTerm::Sum(s)) => {
                    let s = normalize(kb, s);
                    match bindings.get(&s) {
                        Some(z) => ids.push(*z),
                        None => {
                            pending.insert(s, true);
                            bound = false;
                        }
                    }
                }
                _ => {}
            }
        }
        if !bound {
            continue;
        }
        let time = lit.args.iter().find_map(Arg::as_time).cloned();
        let pos = lit.positive;
        match (&lit.rel, time) {
            (Rel::P | Rel::PC | Rel::K | Rel::CF, Some(t)) => {
                let key = (ids[0], ids[1]);
                if pos {
                    let map = match lit.rel {
                        Rel::P => &mut asserted.p_t,
                        Rel::PC => &mut asserted.pc,
                        Rel::K => &mut asserted.k,
                        _ => &mut asserted.cf,
                    };
                    add_cov(map, key, &t);
                } else {
                    st.denied.entry((lit.rel.clone(), key.0, key.1)).or_default().push(t);
                }
            }
            (Rel::Pre, Some(t)) => {
                if pos {
                    st.pre_asserted[ids[0].index()].extend(&t);
                } else {
                    st.pre_denied[ids[0].index()].push(t);
                }
            }
            (Rel::Ql, Some(t)) => {
                let Arg::Point { space, point } = lit.args[0] else { unreachable!("checked signature") };
                let atom = QualeAtom { space, point, quality: ids[0], time: t };
                if pos {
                    if !st.ql.contains(&atom) {
                        st.ql.push(atom);
                    }
                } else {
                    neg_ql.push(atom);
                }
            }
            (Rel::QlT, Some(t)) => {
                if pos {
                    st.ql_t.push((t, ids[0]));
                } else {
                    neg_qlt.push((t, ids[0]));
                }
            }
            (rel, _) => {
                if !pos {
                    st.denied_a.insert((rel.clone(), ids));
                    continue;
                }
                let pair = || (ids[0], ids[1]);
                match rel {
                    Rel::P => {
                        asserted.p_a.insert(pair());
                    }
                    Rel::Qt => {
                        st.qt.insert(pair());
                    }
                    Rel::Pcc => {
                        st.pcc.insert(pair());
                    }
                    Rel::ExecutesPlan => {
                        st.executes.insert(pair());
                    }
                    Rel::User(name) => {
                        st.user.entry(name.clone()).or_default().insert(ids);
                    }
                    _ => {}
                }
            }
        }
    }

    // asserted contradictions
    for ((rel, x, y), ns) in &st.denied {
        let map = match rel {
            Rel::P => &asserted.p_t,
            Rel::PC => &asserted.pc,
            Rel::K => &asserted.k,
            _ => &asserted.cf,
        };
        let cov = cover_of(map, (*x, *y));
        for n in ns {
            if n.is_subset(&cov) {
                return Err(CloseError::Conflict(format!(
                    "{}({}, {}, {}) is both asserted and denied",
                    rel.name(),
                    kb.name(*x),
                    kb.name(*y),
                    kb.render_region(n)
                )));
            }
        }
    }
    for (i, ns) in st.pre_denied.iter().enumerate() {
        for n in ns {
            if n.is_subset(&st.pre_asserted[i]) {
                return Err(CloseError::Conflict(format!(
                    "PRE({}, {}) is both asserted and denied",
                    kb.name(EntityId(i as u32)),
                    kb.render_region(n)
                )));
            }
        }
    }
    for (rel, ids) in &st.denied_a {
        let hit = match rel {
            Rel::P => asserted.p_a.contains(&(ids[0], ids[1])),
            Rel::Qt => st.qt.contains(&(ids[0], ids[1])),
            Rel::Pcc => st.pcc.contains(&(ids[0], ids[1])),
            Rel::ExecutesPlan => st.executes.contains(&(ids[0], ids[1])),
            Rel::User(n) => st.user.get(n).is_some_and(|s| s.contains(ids)),
            _ => false,
        };
        if hit {
            let names: Vec<&str> = ids.iter().map(|e| kb.name(*e)).collect();
            return Err(CloseError::Conflict(format!("{}({}) is both asserted and denied", rel.name(), names.join(", "))));
        }
    }
    if let Some(a) = neg_ql.iter().find(|a| st.ql.contains(a)) {
        return Err(CloseError::Conflict(format!(
            "ql({}, {}, {}) is both asserted and denied",
            kb.space(a.space).points[a.point],
            kb.name(a.quality),
            kb.render_region(&a.time)
        )));
    }
    if let Some((t, x)) = neg_qlt.iter().find(|a| st.ql_t.contains(a)) {
        return Err(CloseError::Conflict(format!(
            "ql_T({}, {}) is both asserted and denied",
            kb.render_region(t),
            kb.name(*x)
        )));
    }
    Ok((st, asserted))
}

/// Runs the fixpoint over the loaded atoms.
fn saturate(kb: &KnowledgeBase, bindings: &BTreeMap<SumTerm, EntityId>) -> Result<(ClosedKb, BTreeMap<SumTerm, bool>), CloseError> {
    let mut pending = BTreeMap::new();
    let (mut st, asserted) = load(kb, bindings, &mut pending)?;
    let n = kb.entities().len();
    let instants = st.instants();
    let kinds: Vec<Kind> = kb.entity_ids().map(|e| Kind::of(kb, e)).collect();
    let tl_qualities: BTreeSet<EntityId> = kb.entity_ids().filter(|e| kb.is_a(*e, cat::TL)).collect();

    let mut direct_qlt = vec![TimeRegion::default(); n];
    for (t, x) in &st.ql_t {
        direct_qlt[x.index()].extend(t);
    }

    st.p_t = asserted.p_t.clone();
    st.p_a = asserted.p_a.clone();
    st.pc = asserted.pc.clone();
    st.k = asserted.k.clone();
    st.cf = asserted.cf.clone();

    let neg_pa: BTreeSet<Pair> = st
        .denied_a
        .iter()
        .filter(|(r, _)| *r == Rel::P)
        .map(|(_, ids)| (ids[0], ids[1]))
        .collect();

    loop {
        // temporal quales
        let mut quale = vec![TimeRegion::default(); n];
        for _ in 0..3 {
            let prev = quale.clone();
            for e in kb.entity_ids() {
                let i = e.index();
                let mut q = st.pre_asserted[i].union(&direct_qlt[i]);
                if let Some(ops) = skolem_ops(kb, e) {
                    for o in ops {
                        q.extend(&prev[o.index()]);
                    }
                }
                match kinds[i] {
                    Kind::Endurant => {
                        for ((x, _), c) in &st.pc {
                            if *x == e {
                                q.extend(c);
                            }
                        }
                    }
                    Kind::Perdurant => {
                        for (qq, b) in &st.qt {
                            if *b == e && tl_qualities.contains(qq) {
                                q.extend(&direct_qlt[qq.index()]);
                            }
                        }
                    }
                    Kind::Quality => {
                        for (qq, b) in &st.qt {
                            if *qq == e {
                                q.extend(&prev[b.index()]);
                            }
                        }
                    }
                    Kind::Abstract | Kind::Other => {}
                }
                quale[i] = q;
            }
            if quale == prev {
                break;
            }
        }

        // participation: asserted plus constant participation
        let mut pc = asserted.pc.clone();
        for (x, y) in &st.pcc {
            let t = quale[y.index()].difference(&st.blocked(&Rel::PC, *x, *y));
            add_cov(&mut pc, (*x, *y), &t);
        }

        // temporal parthood
        let mut p_base = asserted.p_t.clone();
        let mut pa_base = asserted.p_a.clone();
        for e in kb.entity_ids() {
            match kinds[e.index()] {
                Kind::Endurant => {
                    let t = quale[e.index()].difference(&st.blocked(&Rel::P, e, e));
                    add_cov(&mut p_base, (e, e), &t);
                }
                Kind::Perdurant | Kind::Abstract
                    if !neg_pa.contains(&(e, e)) => {
                        pa_base.insert((e, e));
                    }
                _ => {}
            }
            let Some(ops) = skolem_ops(kb, e) else { continue };
            match kinds[e.index()] {
                Kind::Endurant => {
                    for o in ops {
                        let t = quale[o.index()].difference(&st.blocked(&Rel::P, *o, e));
                        add_cov(&mut p_base, (*o, e), &t);
                    }
                    // least upper bound: z is part of whatever contains all of
                    // its present operands
                    for w in kb.entity_ids() {
                        if w == e || kinds[w.index()] != Kind::Endurant {
                            continue;
                        }
                        let mut cov = TimeRegion::default();
                        for i in quale[e.index()].instants() {
                            let present: Vec<&EntityId> = ops.iter().filter(|o| quale[o.index()].contains(i)).collect();
                            if !present.is_empty()
                                && present.iter().all(|o| st.p_t.get(&(**o, w)).is_some_and(|c| c.contains(i)))
                            {
                                cov.extend(&TimeRegion::instant(i));
                            }
                        }
                        let cov = cov.difference(&st.blocked(&Rel::P, e, w));
                        add_cov(&mut p_base, (e, w), &cov);
                    }
                }
                Kind::Perdurant | Kind::Abstract => {
                    for o in ops {
                        if !neg_pa.contains(&(*o, e)) {
                            pa_base.insert((*o, e));
                        }
                    }
                    for w in kb.entity_ids() {
                        if w != e
                            && kinds[w.index()] == kinds[e.index()]
                            && ops.iter().all(|o| st.p_a.contains(&(*o, w)))
                            && !neg_pa.contains(&(e, w))
                        {
                            pa_base.insert((e, w));
                        }
                    }
                }
                _ => {}
            }
        }
        let denied = st.denied.clone();
        let p_t = transitive_closure(n, &instants, &p_base, |(a, b)| blocked_of(&denied, &Rel::P, a, b));
        let p_a = atemporal_closure(n, &pa_base, &neg_pa);

        // constitution: asserted, distribution over covers, transitivity
        let mut k_base = asserted.k.clone();
        let mut cover_derived = BTreeSet::new();
        for cover in kb.covers() {
            let mut choices: Vec<Vec<EntityId>> = Vec::new();
            for part in &cover.parts {
                let c: Vec<EntityId> = kb
                    .entity_ids()
                    .filter(|x| st.k.get(&(*x, *part)).is_some_and(|cv| cover.time.is_subset(cv)))
                    .collect();
                choices.push(c);
            }
            for combo in cartesian(&choices, 4096) {
                let term = normalize(kb, &SumTerm::Sum(combo));
                match bindings.get(&term) {
                    Some(z) => {
                        let t = cover.time.difference(&st.blocked(&Rel::K, *z, cover.whole));
                        add_cov(&mut k_base, (*z, cover.whole), &t);
                        cover_derived.insert((*z, cover.whole, cover.time.clone()));
                    }
                    None => {
                        pending.entry(term).or_insert(false);
                    }
                }
            }
        }
        let k = transitive_closure(n, &instants, &k_base, |(a, b)| blocked_of(&denied, &Rel::K, a, b));

        let stable = quale == st.quale && pc == st.pc && p_t == st.p_t && p_a == st.p_a && k == st.k;
        st.quale = quale;
        st.pc = pc;
        st.p_t = p_t;
        st.p_a = p_a;
        st.k = k;
        st.cover_derived = cover_derived;
        if stable {
            break;
        }
    }
    st.build_index();
    Ok((st, pending))
}

fn cartesian(choices: &[Vec<EntityId>], limit: usize) -> Vec<Vec<EntityId>> {
    if choices.is_empty() || choices.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let mut out: Vec<Vec<EntityId>> = vec![Vec::new()];
    for c in choices {
        let mut next = Vec::new();
        for prefix in &out {
            for x in c {
                if next.len() >= limit {
                    break;
                }
                let mut p = prefix.clone();
                p.push(*x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Endurant,
    Perdurant,
    Quality,
    Abstract,
    Other,
}

impl Kind {
    pub(crate) fn of(kb: &KnowledgeBase, e: EntityId) -> Kind {
        if kb.is_endurant(e) {
            Kind::Endurant
        } else if kb.is_perdurant(e) {
            Kind::Perdurant
        } else if kb.is_quality(e) {
            Kind::Quality
        } else if kb.is_abstract(e) {
            Kind::Abstract
        } else {
            Kind::Other
        }
    }
}

/// Moves directly asserted temporal quales of perdurants onto a
/// time-location quality, creating one where needed.
fn apply_time_location(kb: &mut KnowledgeBase) -> Result<(), CloseError> {
    let moves: Vec<Literal> = kb
        .literals()
        .iter()
        .filter(|l| l.rel == Rel::QlT && l.positive)
        .filter(|l| l.args[1].as_entity().is_some_and(|x| kb.is_perdurant(x)))
        .cloned()
        .collect();
    let tl = kb.taxonomy().id(cat::TL).map_err(|e| CloseError::Conflict(e.to_string()))?;
    for lit in moves {
        let x = lit.args[1].as_entity().expect("filtered");
        let existing = kb.literals().iter().find_map(|l| {
            if l.rel == Rel::Qt && l.positive && l.args[1].as_entity() == Some(x) {
                l.args[0].as_entity().filter(|q| kb.is_a(*q, cat::TL))
            } else {
                None
            }
        });
        let q = match existing {
            Some(q) => q,
            None => {
                let name = kb.fresh_name(&format!("TL-of-{}", kb.name(x)));
                let q = kb.push_entity(&name, tl, Origin::TimeLocationOf(x)).map_err(|e| CloseError::Conflict(e.to_string()))?;
                kb.assert(Literal::pos(Rel::Qt, vec![Arg::entity(q), Arg::entity(x)]))
                    .map_err(|e| CloseError::Conflict(e.to_string()))?;
                q
            }
        };
        kb.remove_literal(&lit);
        kb.assert(Literal::pos(Rel::QlT, vec![lit.args[0].clone(), Arg::entity(q)]))
            .map_err(|e| CloseError::Conflict(e.to_string()))?;
    }
    Ok(())
}

fn create_skolem(kb: &mut KnowledgeBase, term: &SumTerm, ops: &[EntityId]) -> Result<EntityId, SumError> {
    let cats: Vec<_> = ops.iter().map(|o| kb.entity(*o).category).collect();
    let lcs = kb
        .taxonomy()
        .least_common_subsumer(&cats)
        .ok_or_else(|| SumError::MixedKinds(kb.render_sum(term)))?;
    let base: Vec<&str> = ops.iter().map(|o| kb.name(*o)).collect();
    let name = kb.fresh_name(&base.join("+"));
    let origin = Origin::Skolem(SumTerm::Sum(ops.to_vec()));
    kb.push_entity(&name, lcs, origin).map_err(|e| SumError::NoWitness(e.to_string()))
}

/// Computes the closed knowledge base.
pub fn close(kb: &KnowledgeBase) -> Result<ClosedKb, CloseError> {
    let mut kb = kb.clone();
    if kb.options.auto_time_location {
        apply_time_location(&mut kb)?;
    }
    let mut bindings: BTreeMap<SumTerm, EntityId> = BTreeMap::new();
    loop {
        let (mut ckb, pending) = saturate(&kb, &bindings)?;
        let mut progress = false;
        let mut warnings = Vec::new();
        for (term, required) in pending {
            match resolve_sum(&ckb, &term) {
                Ok(z) => {
                    bindings.insert(term, z);
                    progress = true;
                }
                Err(SumError::NoWitness(_)) if kb.options.skolemize_sums => {
                    let ops = term_operands(&ckb, &term);
                    if ops.is_empty() {
                        let e = SumError::NoWitness(kb.render_sum(&term));
                        if required {
                            return Err(e.into());
                        }
                        warnings.push(e.to_string());
                        continue;
                    }
                    let z = create_skolem(&mut kb, &term, &ops)?;
                    bindings.insert(term, z);
                    progress = true;
                }
                Err(e) if required => return Err(e.into()),
                Err(e) => warnings.push(format!("distribution rule skipped: {e}")),
            }
        }
        // life events wait until the domain of this round is settled
        if kb.options.add_life_events && !progress {
            let fresh: Vec<EntityId> = kb
                .entity_ids()
                .filter(|e| kb.is_endurant(*e))
                .filter(|e| !ckb.pc.keys().any(|(x, _)| x == e))
                .filter(|e| !ckb.quale(*e).is_empty())
                .collect();
            let pro = kb.taxonomy().id(cat::PRO).map_err(|e| CloseError::Conflict(e.to_string()))?;
            for x in fresh {
                let q = ckb.quale(x).clone();
                let name = kb.fresh_name(&format!("life-of-{}", kb.name(x)));
                let life = kb.push_entity(&name, pro, Origin::LifeOf(x)).map_err(|e| CloseError::Conflict(e.to_string()))?;
                let lits = [
                    Literal::pos(Rel::PC, vec![Arg::entity(x), Arg::entity(life), Arg::Time(q.clone())]),
                    Literal::pos(Rel::Pre, vec![Arg::entity(life), Arg::Time(q)]),
                ];
                for l in lits {
                    kb.assert(l).map_err(|e| CloseError::Conflict(e.to_string()))?;
                }
                progress = true;
            }
        }
        if !progress {
            warnings.sort();
            warnings.dedup();
            ckb.warnings = warnings;
            return Ok(ckb);
        }
    }
}
