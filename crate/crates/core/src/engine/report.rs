use std::fmt::Write as _;

use serde_json::{Map, Value as Json};

use crate::kb::{EntityId, KnowledgeBase};
use crate::timeline::TimeRegion;

/// A witness value bound to an axiom variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Entity(EntityId),
    Time(TimeRegion),
    Point { space: usize, point: usize },
    Symbol(String),
}

impl Value {
    pub fn as_entity(&self) -> Option<EntityId> {
        match self {
            Value::Entity(e) => Some(*e),
            _ => None,
        }
    }

    pub fn as_time(&self) -> Option<&TimeRegion> {
        match self {
            Value::Time(t) => Some(t),
            _ => None,
        }
    }

    pub fn render(&self, kb: &KnowledgeBase) -> String {
        match self {
            Value::Entity(e) => kb.name(*e).to_string(),
            Value::Time(t) => kb.render_region(t),
            Value::Point { space, point } => kb.space(*space).points[*point].clone(),
            Value::Symbol(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationReport {
    pub label: String,
    pub witnesses: Vec<(String, Value)>,
    pub message: String,
}

impl ViolationReport {
    pub fn witness(&self, var: &str) -> Option<&Value> {
        self.witnesses.iter().find(|(v, _)| v == var).map(|(_, val)| val)
    }

    pub fn entity(&self, var: &str) -> Option<EntityId> {
        self.witness(var).and_then(Value::as_entity)
    }

    pub fn time(&self, var: &str) -> Option<&TimeRegion> {
        self.witness(var).and_then(Value::as_time)
    }

    pub fn rendered_witnesses(&self, kb: &KnowledgeBase) -> Vec<(String, String)> {
        self.witnesses.iter().map(|(k, v)| (k.clone(), v.render(kb))).collect()
    }

    pub fn render_text(&self, kb: &KnowledgeBase) -> String {
        let ws: Vec<String> =
            self.rendered_witnesses(kb).into_iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!("[{}] {} {{{}}}", self.label, self.message, ws.join(", "))
    }

    pub fn to_json(&self, kb: &KnowledgeBase) -> Json {
        let mut ws = Map::new();
        for (k, v) in self.rendered_witnesses(kb) {
            ws.insert(k, Json::String(v));
        }
        let mut obj = Map::new();
        obj.insert("label".into(), Json::String(self.label.clone()));
        obj.insert("witnesses".into(), Json::Object(ws));
        obj.insert("message".into(), Json::String(self.message.clone()));
        Json::Object(obj)
    }
}

/// Deterministic report order: label, then witness values.
pub fn sort_reports(reports: &mut [ViolationReport]) {
    reports.sort_by(|a, b| {
        (&a.label, &a.witnesses, &a.message).cmp(&(&b.label, &b.witnesses, &b.message))
    });
}

pub fn render_text(reports: &[ViolationReport], kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&r.render_text(kb));
        out.push('\n');
    }
    let _ = writeln!(out, "{} violation{}", reports.len(), if reports.len() == 1 { "" } else { "s" });
    out
}

pub fn render_json(reports: &[ViolationReport], kb: &KnowledgeBase) -> String {
    let arr = Json::Array(reports.iter().map(|r| r.to_json(kb)).collect());
    let mut s = serde_json::to_string_pretty(&arr).expect("report serializes");
    s.push('\n');
    s
}

/// Collects reports for one module run.
pub(crate) struct Sink {
    pub reports: Vec<ViolationReport>,
}

impl Sink {
    pub fn new() -> Self {
        Sink { reports: Vec::new() }
    }

    pub fn emit(&mut self, label: &str, witnesses: Vec<(&str, Value)>, message: String) {
        self.reports.push(ViolationReport {
            label: label.to_string(),
            witnesses: witnesses.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            message,
        });
    }

    pub fn finish(self) -> Vec<ViolationReport> {
        self.reports
    }
}

pub(crate) fn ent(e: EntityId) -> Value {
    Value::Entity(e)
}

pub(crate) fn time(t: TimeRegion) -> Value {
    Value::Time(t)
}
