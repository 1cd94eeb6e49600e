//! The `.dkb` text format: parsing, validation and KB construction.

pub mod build;
pub mod fixtures;
pub mod sexpr;

use std::path::Path;

use crate::error::{LoadError, ParseError, ParseErrorKind, TaxonomyError};
use crate::kb::{KnowledgeBase, Rel};
use crate::taxonomy::{Taxonomy, TaxonomySpec, DEFAULT_TAXONOMY};

pub use build::{apply_form, build, mutate};
pub use sexpr::{is_symbol_char, Pos, Sexp, SourceDocument};

/// Top-level forms with their accepted argument counts.
const FORMS: &[(&str, usize, usize)] = &[
    ("category", 1, usize::MAX),
    ("entity", 2, 2),
    ("time", 2, 3),
    ("space", 1, usize::MAX),
    ("schema", 3, 5),
    ("concept-flags", 1, 3),
    ("cover", 3, 3),
    ("requires", 3, 3),
    ("assert", 1, 1),
    ("relation", 2, 2),
    ("option", 1, usize::MAX),
    ("color-path", 4, 4),
];

fn expected(lo: usize, hi: usize) -> String {
    match (lo, hi) {
        (l, h) if l == h => format!("{l} argument(s)"),
        (l, usize::MAX) => format!("at least {l} argument(s)"),
        (l, h) => format!("{l} to {h} arguments"),
    }
}

/// Parses KB text and checks form heads and built-in relation arities.
pub fn parse(text: &str) -> Result<SourceDocument, ParseError> {
    let doc = sexpr::parse(text)?;
    for form in &doc.forms {
        validate(form)?;
    }
    Ok(doc)
}

pub fn print(doc: &SourceDocument) -> String {
    doc.print()
}

fn validate(form: &Sexp) -> Result<(), ParseError> {
    let err = |pos, kind| Err(ParseError { pos, kind });
    let Some(head) = form.head() else {
        return err(form.pos(), ParseErrorKind::Malformed("top-level form must be a list with a head".into()));
    };
    let Some(&(_, lo, hi)) = FORMS.iter().find(|(h, _, _)| *h == head) else {
        return err(form.pos(), ParseErrorKind::UnknownForm(head.to_string()));
    };
    let argc = form.list().map_or(0, |l| l.len() - 1);
    if argc < lo || argc > hi {
        return err(form.pos(), ParseErrorKind::Arity { form: head.to_string(), expected: expected(lo, hi) });
    }
    if head == "assert" {
        let mut lit = &form.list().unwrap()[1];
        if lit.head() == Some("not") {
            match lit.list() {
                Some([_, inner]) => lit = inner,
                _ => {
                    return err(lit.pos(), ParseErrorKind::Arity { form: "not".into(), expected: expected(1, 1) })
                }
            }
        }
        let Some(rel) = lit.head() else {
            return err(lit.pos(), ParseErrorKind::Malformed("expected a relational atom".into()));
        };
        let n = lit.list().unwrap().len() - 1;
        let ok = match Rel::builtin(rel) {
            Some(Rel::P) => n == 2 || n == 3,
            Some(Rel::PC | Rel::K | Rel::CF | Rel::Ql) => n == 3,
            Some(_) => n == 2,
            None => true,
        };
        if !ok {
            let want = Rel::builtin(rel).unwrap().arity_text(&Default::default());
            return err(lit.pos(), ParseErrorKind::Arity { form: rel.to_string(), expected: format!("{want} argument(s)") });
        }
    }
    Ok(())
}

/// Reads the taxonomy configuration format.
pub fn parse_taxonomy(text: &str) -> Result<Taxonomy, TaxonomyError> {
    let doc = sexpr::parse(text).map_err(|e| TaxonomyError::Config(e.to_string()))?;
    let mut spec = TaxonomySpec::default();
    for form in &doc.forms {
        let names: Option<Vec<String>> =
            form.list().map(|l| l.iter().map(|s| s.atom().map(str::to_string)).collect()).unwrap_or(None);
        let bad = || TaxonomyError::Config(format!("{}: malformed form {form}", form.pos()));
        let names = names.ok_or_else(bad)?;
        match names.split_first() {
            Some((h, [name, parents @ ..])) if h == "category" => spec.categories.push((name.clone(), parents.to_vec())),
            Some((h, rest)) if h == "disjoint" && rest.len() >= 2 => spec.disjoint_groups.push(rest.to_vec()),
            Some((h, [leaf])) if h == "quality-leaf" => spec.quality_leaves.push(leaf.clone()),
            _ => return Err(bad()),
        }
    }
    Taxonomy::load(&spec)
}

pub fn default_taxonomy() -> Taxonomy {
    parse_taxonomy(DEFAULT_TAXONOMY).expect("bundled taxonomy is valid")
}

/// The bundled taxonomy, or the file named by `DOLCE_TAXONOMY` when set.
pub fn taxonomy_from_env() -> Result<Taxonomy, LoadError> {
    match std::env::var_os("DOLCE_TAXONOMY") {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| LoadError::Io(format!("{}: {e}", Path::new(&path).display())))?;
            Ok(parse_taxonomy(&text)?)
        }
        None => Ok(default_taxonomy()),
    }
}

/// Parses and builds a KB over the given taxonomy.
pub fn load_str_with(text: &str, tax: Taxonomy) -> Result<KnowledgeBase, LoadError> {
    let doc = parse(text)?;
    Ok(build(&doc, tax)?)
}

/// Parses and builds a KB over the bundled taxonomy.
pub fn load_str(text: &str) -> Result<KnowledgeBase, LoadError> {
    load_str_with(text, default_taxonomy())
}

pub fn load_file(path: &Path, tax: Taxonomy) -> Result<KnowledgeBase, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    load_str_with(&text, tax)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_head_is_reported_with_position() {
        let e = parse("\n  (frobnicate x)").unwrap_err();
        assert_eq!(e.pos, Pos { line: 2, col: 3 });
        assert_eq!(e.kind, ParseErrorKind::UnknownForm("frobnicate".into()));
    }

    #[test]
    fn relation_arity_checked_at_parse_time() {
        let e = parse("(assert (P a))").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 9 });
        assert!(matches!(e.kind, ParseErrorKind::Arity { .. }));
        assert!(parse("(assert (not (PRE x t)))").is_ok());
        assert!(parse("(assert (PC x y))").is_err());
    }

    #[test]
    fn empty_file_is_empty_document() {
        assert!(parse("").unwrap().forms.is_empty());
        assert!(parse("; only a comment\n").unwrap().forms.is_empty());
    }

    #[test]
    fn default_taxonomy_loads() {
        let tax = default_taxonomy();
        assert!(tax.subsumes("PED", "Table").unwrap());
        assert!(!tax.subsumes("PD", "Table").unwrap());
    }

    #[test]
    fn taxonomy_config_errors() {
        assert!(matches!(parse_taxonomy("(category A B)"), Err(TaxonomyError::UnknownParent { .. })));
        assert!(matches!(parse_taxonomy("(weird)"), Err(TaxonomyError::Config(_))));
    }
}
