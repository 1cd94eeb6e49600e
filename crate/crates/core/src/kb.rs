//! Entities, literals and the knowledge-base container.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::concepts::{ConceptFlags, Requirement};
use crate::constitution::Cover;
use crate::error::KbError;
use crate::quality::{ColorPathDecl, QualitySpace, Schema};
use crate::surface::Pos;
use crate::taxonomy::{cat, CategoryId, Taxonomy};
use crate::timeline::{TimeRegion, Timeline};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// How an entity came to be in the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Declared,
    /// Fresh witness for a sum term.
    Skolem(SumTerm),
    /// Life perdurant of an endurant.
    LifeOf(EntityId),
    /// Time-location quality of a perdurant.
    TimeLocationOf(EntityId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entity {
    pub name: String,
    pub category: CategoryId,
    pub origin: Origin,
}

/// A sum or fusion term, resolved against the domain by the engine.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SumTerm {
    /// `x + y + ...`, operands flattened.
    Sum(Vec<EntityId>),
    /// Fusion of everything satisfying a time-free unary predicate (a
    /// category or a unary user relation).
    Fusion(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityTerm {
    Id(EntityId),
    Sum(SumTerm),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Entity(EntityTerm),
    Time(TimeRegion),
    Point { space: usize, point: usize },
    SpaceRegion { space: usize, region: String },
    Space(usize),
}

impl Arg {
    pub fn entity(id: EntityId) -> Arg {
        Arg::Entity(EntityTerm::Id(id))
    }

    pub fn as_entity(&self) -> Option<EntityId> {
        match self {
            Arg::Entity(EntityTerm::Id(id)) => Some(*id),
            _ => None,
        }
    }

    pub fn as_time(&self) -> Option<&TimeRegion> {
        match self {
            Arg::Time(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    /// Parthood; ternary (temporary) between entities, binary otherwise.
    P,
    PC,
    K,
    CF,
    Pre,
    Qt,
    Ql,
    QlT,
    Pcc,
    ExecutesPlan,
    Before,
    WeaklyBefore,
    SumEq,
    User(String),
}

impl Rel {
    pub fn name(&self) -> &str {
        match self {
            Rel::P => "P",
            Rel::PC => "PC",
            Rel::K => "K",
            Rel::CF => "CF",
            Rel::Pre => "PRE",
            Rel::Qt => "qt",
            Rel::Ql => "ql",
            Rel::QlT => "ql_T",
            Rel::Pcc => "PC_C",
            Rel::ExecutesPlan => "ExecutesPlan",
            Rel::Before => "<",
            Rel::WeaklyBefore => "<=",
            Rel::SumEq => "=",
            Rel::User(n) => n,
        }
    }

    pub fn builtin(name: &str) -> Option<Rel> {
        Some(match name {
            "P" => Rel::P,
            "PC" => Rel::PC,
            "K" => Rel::K,
            "CF" => Rel::CF,
            "PRE" => Rel::Pre,
            "qt" => Rel::Qt,
            "ql" => Rel::Ql,
            "ql_T" => Rel::QlT,
            "PC_C" | "PCC" => Rel::Pcc,
            "ExecutesPlan" => Rel::ExecutesPlan,
            "<" => Rel::Before,
            "<=" => Rel::WeaklyBefore,
            "=" => Rel::SumEq,
            _ => return None,
        })
    }

    /// Expected arity description, for diagnostics.
    pub fn arity_text(&self, user: &BTreeMap<String, UserRelation>) -> String {
        match self {
            Rel::P => "2 or 3".into(),
            Rel::PC | Rel::K | Rel::CF | Rel::Ql => "3".into(),
            Rel::User(n) => user.get(n).map_or("?".into(), |u| u.arity.to_string()),
            _ => "2".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub rel: Rel,
    pub args: Vec<Arg>,
    pub positive: bool,
}

impl Literal {
    pub fn pos(rel: Rel, args: Vec<Arg>) -> Literal {
        Literal { rel, args, positive: true }
    }

    pub fn neg(rel: Rel, args: Vec<Arg>) -> Literal {
        Literal { rel, args, positive: false }
    }

    pub fn negated(&self) -> Literal {
        Literal { positive: !self.positive, ..self.clone() }
    }

    /// Is this a ternary entity-entity-time atom of one of the dissective
    /// relations?
    pub fn is_timed(&self) -> bool {
        matches!(self.rel, Rel::P | Rel::PC | Rel::K | Rel::CF) && self.args.len() == 3
            && matches!(self.args[2], Arg::Time(_))
            && matches!(self.args[0], Arg::Entity(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserRelation {
    pub arity: usize,
}

/// Closure and strictness switches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Create a life perdurant for every endurant lacking participation.
    pub add_life_events: bool,
    /// Create fresh witnesses for unresolvable sum terms.
    pub skolemize_sums: bool,
    /// Turn directly asserted temporal quales of perdurants into a TL
    /// quality plus its quale.
    pub auto_time_location: bool,
    pub disabled: BTreeSet<String>,
    /// When set, only these labels are reported.
    pub only: Option<BTreeSet<String>>,
}

impl Options {
    pub fn merge(&mut self, other: &Options) {
        self.add_life_events |= other.add_life_events;
        self.skolemize_sums |= other.skolemize_sums;
        self.auto_time_location |= other.auto_time_location;
        self.disabled.extend(other.disabled.iter().cloned());
        if let Some(only) = &other.only {
            self.only.get_or_insert_with(BTreeSet::new).extend(only.iter().cloned());
        }
    }

    pub fn label_enabled(&self, label: &str) -> bool {
        !self.disabled.contains(label) && self.only.as_ref().is_none_or(|o| o.contains(label))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symbol {
    Entity(EntityId),
    Time(usize),
    Space(usize),
}

#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    pub(crate) taxonomy: Taxonomy,
    pub(crate) entities: Vec<Entity>,
    names: HashMap<String, Symbol>,
    pub(crate) times: Vec<(String, TimeRegion)>,
    pub(crate) spaces: Vec<QualitySpace>,
    pub(crate) schemas: Vec<Schema>,
    pub(crate) flags: BTreeMap<EntityId, ConceptFlags>,
    pub(crate) covers: Vec<Cover>,
    pub(crate) requires: Vec<Requirement>,
    pub(crate) color_paths: Vec<ColorPathDecl>,
    pub(crate) literals: Vec<Literal>,
    pub(crate) literal_pos: Vec<Option<Pos>>,
    pub(crate) user_relations: BTreeMap<String, UserRelation>,
    pub options: Options,
}

impl KnowledgeBase {
    pub fn new(taxonomy: Taxonomy) -> Self {
        KnowledgeBase {
            taxonomy,
            entities: Vec::new(),
            names: HashMap::new(),
            times: Vec::new(),
            spaces: Vec::new(),
            schemas: Vec::new(),
            flags: BTreeMap::new(),
            covers: Vec::new(),
            requires: Vec::new(),
            color_paths: Vec::new(),
            literals: Vec::new(),
            literal_pos: Vec::new(),
            user_relations: BTreeMap::new(),
            options: Options::default(),
        }
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn taxonomy_mut(&mut self) -> &mut Taxonomy {
        &mut self.taxonomy
    }

    fn claim_name(&mut self, name: &str, sym: Symbol) -> Result<(), KbError> {
        if self.names.contains_key(name) {
            return Err(KbError::Duplicate(name.to_string()));
        }
        self.names.insert(name.to_string(), sym);
        Ok(())
    }

    pub fn add_entity(&mut self, name: &str, category: &str) -> Result<EntityId, KbError> {
        let category = self.taxonomy.id(category)?;
        self.push_entity(name, category, Origin::Declared)
    }

    pub(crate) fn push_entity(&mut self, name: &str, category: CategoryId, origin: Origin) -> Result<EntityId, KbError> {
        let id = EntityId(self.entities.len() as u32);
        self.claim_name(name, Symbol::Entity(id))?;
        self.entities.push(Entity { name: name.to_string(), category, origin });
        Ok(id)
    }

    /// A name not yet used, derived from `base`.
    pub(crate) fn fresh_name(&self, base: &str) -> String {
        if !self.names.contains_key(base) {
            return base.to_string();
        }
        (1..).map(|n| format!("{base}#{n}")).find(|c| !self.names.contains_key(c)).unwrap()
    }

    pub fn add_time(&mut self, name: &str, region: TimeRegion) -> Result<(), KbError> {
        if region.is_empty() {
            return Err(crate::error::TimeError::Empty.into());
        }
        let idx = self.times.len();
        self.claim_name(name, Symbol::Time(idx))?;
        self.times.push((name.to_string(), region));
        Ok(())
    }

    pub fn add_space(&mut self, space: QualitySpace) -> Result<usize, KbError> {
        space.validate()?;
        let idx = self.spaces.len();
        self.claim_name(&space.name.clone(), Symbol::Space(idx))?;
        for point in &space.points {
            if matches!(self.names.get(point), Some(Symbol::Entity(_) | Symbol::Time(_))) {
                return Err(KbError::Duplicate(point.clone()));
            }
        }
        self.spaces.push(space);
        Ok(idx)
    }

    pub fn add_schema(&mut self, schema: Schema) -> Result<(), KbError> {
        self.taxonomy.id(&schema.category)?;
        if schema.space >= self.spaces.len() {
            return Err(KbError::Other(format!("schema on `{}` names an unknown space", schema.category)));
        }
        self.schemas.push(schema);
        Ok(())
    }

    pub fn set_flags(&mut self, concept: EntityId, flags: ConceptFlags) {
        self.flags.insert(concept, flags);
    }

    pub fn add_cover(&mut self, cover: Cover) {
        self.covers.push(cover);
    }

    pub fn add_requirement(&mut self, req: Requirement) {
        self.requires.push(req);
    }

    pub fn add_color_path(&mut self, decl: ColorPathDecl) {
        self.color_paths.push(decl);
    }

    pub fn declare_relation(&mut self, name: &str, arity: usize) -> Result<(), KbError> {
        if Rel::builtin(name).is_some() || self.user_relations.contains_key(name) {
            return Err(KbError::Duplicate(name.to_string()));
        }
        self.user_relations.insert(name.to_string(), UserRelation { arity });
        Ok(())
    }

    pub fn user_relation(&self, name: &str) -> Option<&UserRelation> {
        self.user_relations.get(name)
    }

    /// Adds a ground literal. The exact opposite literal must not be present.
    pub fn assert(&mut self, lit: Literal) -> Result<(), KbError> {
        self.assert_at(lit, None)
    }

    pub fn assert_at(&mut self, lit: Literal, pos: Option<Pos>) -> Result<(), KbError> {
        self.check_signature(&lit)?;
        let opposite = lit.negated();
        if self.literals.contains(&opposite) {
            return Err(KbError::Conflict(self.render_literal(&lit)));
        }
        if !self.literals.contains(&lit) {
            self.literals.push(lit);
            self.literal_pos.push(pos);
        }
        Ok(())
    }

    fn check_signature(&self, lit: &Literal) -> Result<(), KbError> {
        let is_e = |a: &Arg| matches!(a, Arg::Entity(_));
        let is_t = |a: &Arg| matches!(a, Arg::Time(_));
        let a = &lit.args;
        let ok = match &lit.rel {
            Rel::P => match a.len() {
                3 => is_e(&a[0]) && is_e(&a[1]) && is_t(&a[2]),
                2 => {
                    (is_e(&a[0]) && is_e(&a[1]))
                        || (is_t(&a[0]) && is_t(&a[1]))
                        || (matches!(a[0], Arg::Point { .. } | Arg::SpaceRegion { .. })
                            && matches!(a[1], Arg::SpaceRegion { .. } | Arg::Space(_)))
                }
                _ => false,
            },
            Rel::PC | Rel::K | Rel::CF => a.len() == 3 && is_e(&a[0]) && is_e(&a[1]) && is_t(&a[2]),
            Rel::Pre => a.len() == 2 && is_e(&a[0]) && is_t(&a[1]),
            Rel::Qt | Rel::Pcc | Rel::ExecutesPlan | Rel::SumEq => a.len() == 2 && is_e(&a[0]) && is_e(&a[1]),
            Rel::Ql => a.len() == 3 && matches!(a[0], Arg::Point { .. }) && is_e(&a[1]) && is_t(&a[2]),
            Rel::QlT => a.len() == 2 && is_t(&a[0]) && is_e(&a[1]),
            Rel::Before | Rel::WeaklyBefore => a.len() == 2 && is_t(&a[0]) && is_t(&a[1]),
            Rel::User(n) => match self.user_relations.get(n) {
                Some(u) => a.len() == u.arity && a.iter().all(is_e),
                None => return Err(KbError::Undeclared(n.clone())),
            },
        };
        if ok {
            Ok(())
        } else {
            Err(KbError::Arity {
                rel: lit.rel.name().to_string(),
                expected: lit.rel.arity_text(&self.user_relations),
                got: a.len(),
            })
        }
    }

    pub fn remove_literal(&mut self, lit: &Literal) -> bool {
        match self.literals.iter().position(|l| l == lit) {
            Some(i) => {
                self.literals.remove(i);
                self.literal_pos.remove(i);
                true
            }
            None => false,
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entity_ids(&self) -> impl Iterator<Item = EntityId> {
        (0..self.entities.len() as u32).map(EntityId)
    }

    pub fn entity(&self, id: EntityId) -> &Entity {
        &self.entities[id.index()]
    }

    pub fn name(&self, id: EntityId) -> &str {
        &self.entities[id.index()].name
    }

    pub fn entity_id(&self, name: &str) -> Result<EntityId, KbError> {
        match self.names.get(name) {
            Some(Symbol::Entity(id)) => Ok(*id),
            Some(_) => Err(KbError::WrongKind { name: name.to_string(), expected: "entity" }),
            None => Err(KbError::UnknownEntity(name.to_string())),
        }
    }

    pub fn time(&self, name: &str) -> Result<&TimeRegion, KbError> {
        match self.names.get(name) {
            Some(Symbol::Time(i)) => Ok(&self.times[*i].1),
            Some(_) => Err(KbError::WrongKind { name: name.to_string(), expected: "time region" }),
            None => Err(KbError::Undeclared(name.to_string())),
        }
    }

    pub fn is_time(&self, name: &str) -> bool {
        matches!(self.names.get(name), Some(Symbol::Time(_)))
    }

    pub fn is_entity(&self, name: &str) -> bool {
        matches!(self.names.get(name), Some(Symbol::Entity(_)))
    }

    pub fn space_index(&self, name: &str) -> Option<usize> {
        match self.names.get(name) {
            Some(Symbol::Space(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn spaces(&self) -> &[QualitySpace] {
        &self.spaces
    }

    pub fn space(&self, idx: usize) -> &QualitySpace {
        &self.spaces[idx]
    }

    /// Space declared for the category of quality `q`, searching up the
    /// taxonomy.
    pub fn space_for_quality(&self, q: EntityId) -> Option<usize> {
        let c = self.entity(q).category;
        self.spaces.iter().position(|s| {
            s.qualities.iter().any(|qc| self.taxonomy.id(qc).is_ok_and(|id| self.taxonomy.subsumes_id(id, c)))
        })
    }

    pub fn times(&self) -> &[(String, TimeRegion)] {
        &self.times
    }

    pub fn schemas(&self) -> &[Schema] {
        &self.schemas
    }

    pub fn flags(&self, concept: EntityId) -> ConceptFlags {
        self.flags.get(&concept).copied().unwrap_or_default()
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    pub fn requirements(&self) -> &[Requirement] {
        &self.requires
    }

    pub fn color_paths(&self) -> &[ColorPathDecl] {
        &self.color_paths
    }

    /// Timeline spanning every declared region.
    pub fn timeline(&self) -> Option<Timeline> {
        Timeline::spanning(self.times.iter().map(|(_, r)| r))
    }

    pub fn instance_of(&self, e: EntityId, category: &str) -> Result<bool, KbError> {
        if e.index() >= self.entities.len() {
            return Err(KbError::UnknownEntity(format!("#{}", e.0)));
        }
        let c = self.taxonomy.id(category)?;
        Ok(self.taxonomy.subsumes_id(c, self.entity(e).category))
    }

    /// Unchecked variant for categories the engine knows exist.
    pub(crate) fn is_a(&self, e: EntityId, category: &str) -> bool {
        self.taxonomy.id(category).is_ok_and(|c| self.taxonomy.subsumes_id(c, self.entity(e).category))
    }

    pub fn is_endurant(&self, e: EntityId) -> bool {
        self.is_a(e, cat::ED)
    }

    pub fn is_perdurant(&self, e: EntityId) -> bool {
        self.is_a(e, cat::PD)
    }

    pub fn is_abstract(&self, e: EntityId) -> bool {
        self.is_a(e, cat::AB)
    }

    pub fn is_quality(&self, e: EntityId) -> bool {
        self.is_a(e, cat::Q)
    }

    /// Name of a declared region equal to `r`, or its instant listing.
    pub fn render_region(&self, r: &TimeRegion) -> String {
        self.times
            .iter()
            .filter(|(_, t)| t == r)
            .map(|(n, _)| n)
            .min()
            .cloned()
            .unwrap_or_else(|| r.to_string())
    }

    pub fn render_term(&self, t: &EntityTerm) -> String {
        match t {
            EntityTerm::Id(id) => self.name(*id).to_string(),
            EntityTerm::Sum(s) => self.render_sum(s),
        }
    }

    pub fn render_sum(&self, s: &SumTerm) -> String {
        match s {
            SumTerm::Sum(ops) => format!(
                "(sum {})",
                ops.iter().map(|o| self.name(*o)).collect::<Vec<_>>().join(" ")
            ),
            SumTerm::Fusion(p) => format!("(fusion {p})"),
        }
    }

    pub fn render_arg(&self, a: &Arg) -> String {
        match a {
            Arg::Entity(t) => self.render_term(t),
            Arg::Time(r) => self.render_region(r),
            Arg::Point { space, point } => self.spaces[*space].points[*point].clone(),
            Arg::SpaceRegion { region, .. } => region.clone(),
            Arg::Space(s) => self.spaces[*s].name.clone(),
        }
    }

    pub fn render_literal(&self, lit: &Literal) -> String {
        let mut atom = format!("({}", lit.rel.name());
        for a in &lit.args {
            atom.push(' ');
            atom.push_str(&self.render_arg(a));
        }
        atom.push(')');
        if lit.positive {
            atom
        } else {
            format!("(not {atom})")
        }
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::parse_taxonomy;
    use crate::taxonomy::DEFAULT_TAXONOMY;

    fn kb() -> KnowledgeBase {
        KnowledgeBase::new(parse_taxonomy(DEFAULT_TAXONOMY).unwrap())
    }

    #[test]
    fn instance_of_follows_isa() {
        let mut kb = kb();
        let t = kb.add_entity("T", "Table").unwrap();
        assert!(kb.instance_of(t, "PED").unwrap());
        assert!(kb.instance_of(t, "Table").unwrap());
        assert!(!kb.instance_of(t, "Wood").unwrap());
        assert!(kb.instance_of(EntityId(99), "ED").is_err());
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut kb = kb();
        kb.add_entity("T", "Table").unwrap();
        assert_eq!(kb.add_entity("T", "Table"), Err(KbError::Duplicate("T".into())));
        assert!(kb.add_time("T", TimeRegion::instant(0)).is_err());
    }

    #[test]
    fn conflicting_polarity_rejected_both_orders() {
        let mut kb = kb();
        let x = kb.add_entity("x", "Person").unwrap();
        kb.add_time("t", TimeRegion::instant(0)).unwrap();
        let t = kb.time("t").unwrap().clone();
        let lit = Literal::pos(Rel::Pre, vec![Arg::entity(x), Arg::Time(t)]);
        kb.assert(lit.clone()).unwrap();
        assert!(matches!(kb.assert(lit.negated()), Err(KbError::Conflict(_))));
        let mut kb2 = self::kb();
        let x = kb2.add_entity("x", "Person").unwrap();
        let lit = Literal::neg(Rel::Pre, vec![Arg::entity(x), Arg::Time(TimeRegion::instant(0))]);
        kb2.assert(lit.clone()).unwrap();
        assert!(matches!(kb2.assert(lit.negated()), Err(KbError::Conflict(_))));
    }

    #[test]
    fn arity_checked() {
        let mut kb = kb();
        let x = kb.add_entity("x", "Person").unwrap();
        let err = kb.assert(Literal::pos(Rel::P, vec![Arg::entity(x)])).unwrap_err();
        assert!(matches!(err, KbError::Arity { .. }));
    }
}
