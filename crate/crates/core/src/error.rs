use thiserror::Error;

use crate::surface::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("time region must not be empty")]
    Empty,
    #[error("sum of an empty list of regions")]
    EmptySum,
    #[error("bad time range {lo}..{hi}")]
    BadRange { lo: u32, hi: u32 },
    #[error("time region {0} is not convex")]
    NotConvex(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("isa cycle through category `{0}`")]
    Cycle(String),
    #[error("category `{child}` names unknown parent `{parent}`")]
    UnknownParent { child: String, parent: String },
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("category `{category}` redeclared with parent `{parent}`")]
    ConflictingParent { category: String, parent: String },
    #[error("quality-leaf mark on `{0}`, which is not a childless quality category")]
    BadQualityLeaf(String),
    #[error("category `{category}` falls under both `{a}` and `{b}` of one disjoint group")]
    DisjointOverlap { category: String, a: String, b: String },
    #[error("category `{category}` reaches no unique root (found {roots:?})")]
    RootAmbiguity { category: String, roots: Vec<String> },
    #[error("taxonomy config: {0}")]
    Config(String),
}

/// Errors raised while assembling a knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("`{name}` is not a {expected}")]
    WrongKind { name: String, expected: &'static str },
    #[error("relation `{rel}` expects {expected} arguments, got {got}")]
    Arity { rel: String, expected: String, got: usize },
    #[error("conflicting literals for {0}")]
    Conflict(String),
    #[error("quality space `{space}`: {msg}")]
    Space { space: String, msg: String },
    #[error("{0}")]
    Other(String),
}

/// A knowledge-base error attached to a source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct BuildError {
    pub pos: Pos,
    pub kind: KbError,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    Lexical(char),
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("unknown form `{0}`")]
    UnknownForm(String),
    #[error("form `{form}` expects {expected}")]
    Arity { form: String, expected: String },
    #[error("{0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SumError {
    #[error("no entity satisfies {0}")]
    NoWitness(String),
    #[error("{term} is ambiguous between {candidates:?}")]
    Ambiguous { term: String, candidates: Vec<String> },
    #[error("sum operands of mixed kinds in {0}")]
    MixedKinds(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CloseError {
    #[error("cannot resolve a sum term required by an asserted literal: {0}")]
    Iota(#[from] SumError),
    #[error("conflict: {0}")]
    Conflict(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QualityError {
    #[error("category `{0}` is not a quality leaf")]
    NotQualityLeaf(String),
    #[error("perdurant `{0}` has no attested temporal quale")]
    NoTemporalQuale(String),
    #[error("`{0}` has neither participation nor an asserted quale")]
    NoQuale(String),
    #[error("region is empty")]
    EmptyRegion,
    #[error("point `{0}` is not attested in the window")]
    NotAttested(String),
    #[error("schema on `{category}` needs an ordered space, `{space}` has no order")]
    MissingOrder { category: String, space: String },
    #[error(transparent)]
    Kb(#[from] KbError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("bad pattern: {0}")]
    Pattern(String),
}

/// Anything that can go wrong turning text into a knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadError {
    #[error("{0}")]
    Io(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Build(#[from] BuildError),
    #[error("taxonomy: {0}")]
    Taxonomy(#[from] TaxonomyError),
}
