//! Pattern queries over a closed KB.
//!
//! A pattern is one relational form whose arguments are names or `?vars`,
//! e.g. `(P ?x W_top ?t)`. Time variables bind to the maximal convex runs
//! of the relation's coverage.

use std::collections::BTreeMap;

use crate::engine::closure::ClosedKb;
use crate::engine::report::Value;
use crate::error::QueryError;
use crate::kb::EntityId;
use crate::surface::{self, Sexp};
use crate::timeline::TimeRegion;

pub type Binding = BTreeMap<String, Value>;

#[derive(Clone, Debug)]
enum Slot {
    Var(String),
    Entity(EntityId),
    Time(TimeRegion),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Shape {
    /// Two entities and a time.
    Timed,
    /// An entity and a time.
    Presence,
    /// Two entities.
    Pair,
    /// User relation of the given arity.
    User(usize),
}

pub enum QueryResult {
    /// Ground pattern.
    Truth(bool),
    Bindings(Vec<Binding>),
}

impl QueryResult {
    pub fn render(&self, ckb: &ClosedKb) -> String {
        match self {
            QueryResult::Truth(b) => format!("{b}\n"),
            QueryResult::Bindings(bs) if bs.is_empty() => "no results\n".to_string(),
            QueryResult::Bindings(bs) => bs
                .iter()
                .map(|b| {
                    let cells: Vec<String> =
                        b.iter().map(|(k, v)| format!("?{k}={}", v.render(ckb.kb()))).collect();
                    cells.join(" ") + "\n"
                })
                .collect(),
        }
    }
}

pub fn query(ckb: &ClosedKb, pattern: &str) -> Result<QueryResult, QueryError> {
    let doc = surface::sexpr::parse(pattern).map_err(|e| QueryError::Pattern(e.to_string()))?;
    let [form] = doc.forms.as_slice() else {
        return Err(QueryError::Pattern("expected exactly one form".into()));
    };
    let Some(items) = form.list() else {
        return Err(QueryError::Pattern("expected a list".into()));
    };
    let Some(rel) = items.first().and_then(Sexp::atom) else {
        return Err(QueryError::Pattern("missing relation name".into()));
    };
    let args = &items[1..];
    let kb = ckb.kb();
    let shape = match (rel, args.len()) {
        ("P" | "PC" | "K" | "CF", 3) => Shape::Timed,
        ("P" | "qt" | "PCC" | "PC_C" | "ExecutesPlan", 2) => Shape::Pair,
        ("PRE", 2) => Shape::Presence,
        (name, n) => match kb.user_relation(name) {
            Some(u) if u.arity == n => Shape::User(n),
            Some(u) => {
                return Err(QueryError::Pattern(format!("{name} takes {} arguments, got {n}", u.arity)))
            }
            None => return Err(QueryError::UnknownRelation(format!("{name}/{n}"))),
        },
    };
    let slots = args
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let text = a.atom().ok_or_else(|| QueryError::Pattern(format!("argument {} must be a name", i + 1)))?;
            if let Some(v) = text.strip_prefix('?') {
                return Ok(Slot::Var(v.to_string()));
            }
            let is_time = matches!(shape, Shape::Timed if i == 2) || matches!(shape, Shape::Presence if i == 1);
            if is_time {
                kb.time(text).map(|t| Slot::Time(t.clone())).map_err(|e| QueryError::Pattern(e.to_string()))
            } else {
                kb.entity_id(text).map(Slot::Entity).map_err(|e| QueryError::Pattern(e.to_string()))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ground = slots.iter().all(|s| !matches!(s, Slot::Var(_)));
    let mut out = Vec::new();
    let ids: Vec<EntityId> = kb.entity_ids().collect();
    let candidates = |s: &Slot| -> Vec<EntityId> {
        match s {
            Slot::Entity(e) => vec![*e],
            _ => ids.clone(),
        }
    };
    match shape {
        Shape::Timed => {
            for x in candidates(&slots[0]) {
                for y in candidates(&slots[1]) {
                    let cov = match rel {
                        "P" => ckb.p_cov(x, y),
                        "PC" => ckb.pc_cov(x, y),
                        "K" => ckb.k_cov(x, y),
                        _ => ckb.cf_cov(x, y),
                    };
                    emit_timed(&slots, &[x, y], &cov, 2, &mut out);
                }
            }
        }
        Shape::Presence => {
            for x in candidates(&slots[0]) {
                emit_timed(&slots, &[x], ckb.quale(x), 1, &mut out);
            }
        }
        Shape::Pair => {
            for x in candidates(&slots[0]) {
                for y in candidates(&slots[1]) {
                    let holds = match rel {
                        "P" => ckb.holds_pa(x, y),
                        "qt" => ckb.qt_pairs().contains(&(x, y)),
                        "ExecutesPlan" => ckb.executes().contains(&(x, y)),
                        _ => ckb.pcc.contains(&(x, y)),
                    };
                    if holds {
                        push(&slots, &[x, y], None, &mut out);
                    }
                }
            }
        }
        Shape::User(_) => {
            if let Some(tuples) = ckb.user_tuples(rel) {
                for t in tuples {
                    let fits = slots.iter().zip(t).all(|(s, e)| !matches!(s, Slot::Entity(g) if g != e));
                    if fits {
                        push(&slots, t, None, &mut out);
                    }
                }
            }
        }
    }
    if ground {
        return Ok(QueryResult::Truth(!out.is_empty()));
    }
    out.sort();
    out.dedup();
    Ok(QueryResult::Bindings(out))
}

fn emit_timed(slots: &[Slot], ents: &[EntityId], cov: &TimeRegion, ti: usize, out: &mut Vec<Binding>) {
    if cov.is_empty() {
        return;
    }
    match &slots[ti] {
        Slot::Time(t) => {
            if !t.is_empty() && t.is_subset(cov) {
                push(slots, ents, None, out);
            }
        }
        _ => {
            for run in cov.runs() {
                push(slots, ents, Some(run), out);
            }
        }
    }
}

/// Adds one binding, rejecting repeated variables bound to different values.
fn push(slots: &[Slot], ents: &[EntityId], t: Option<TimeRegion>, out: &mut Vec<Binding>) {
    let mut b = Binding::new();
    let values = ents.iter().map(|e| Value::Entity(*e)).chain(t.map(Value::Time));
    for (s, v) in slots.iter().zip(values) {
        if let Slot::Var(name) = s {
            if let Some(old) = b.get(name) {
                if *old != v {
                    return;
                }
            }
            b.insert(name.clone(), v);
        }
    }
    out.push(b);
}
