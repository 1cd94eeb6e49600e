//! Resolves parsed forms into a knowledge base.

use std::collections::BTreeSet;

use crate::concepts::{ConceptFlags, Requirement};
use crate::constitution::Cover;
use crate::error::{BuildError, KbError, LoadError};
use crate::kb::{Arg, EntityId, EntityTerm, KnowledgeBase, Literal, Rel, SumTerm};
use crate::quality::{ColorPathDecl, QualitySpace, Schema, SchemaKind};
use crate::surface::sexpr::{self, Sexp, SourceDocument};
use crate::taxonomy::Taxonomy;
use crate::timeline::TimeRegion;

type Res<T> = Result<T, BuildError>;

fn fail<T>(at: &Sexp, kind: KbError) -> Res<T> {
    Err(BuildError { pos: at.pos(), kind })
}

fn other<T>(at: &Sexp, msg: impl Into<String>) -> Res<T> {
    fail(at, KbError::Other(msg.into()))
}

fn atom(s: &Sexp) -> Res<&str> {
    match s.atom() {
        Some(a) => Ok(a),
        None => other(s, format!("expected a name, found {s}")),
    }
}

fn args(form: &Sexp) -> &[Sexp] {
    &form.list().unwrap_or(&[])[1..]
}

pub fn build(doc: &SourceDocument, tax: Taxonomy) -> Res<KnowledgeBase> {
    let mut kb = KnowledgeBase::new(tax);
    for form in &doc.forms {
        apply_form(&mut kb, form)?;
    }
    Ok(kb)
}

/// Applies one top-level form to the KB.
pub fn apply_form(kb: &mut KnowledgeBase, form: &Sexp) -> Res<()> {
    let head = form.head().unwrap_or("");
    let a = args(form);
    let lift = |r: Result<(), KbError>| r.map_err(|kind| BuildError { pos: form.pos(), kind });
    match head {
        "category" => {
            let name = atom(&a[0])?;
            let parents = a[1..].iter().map(|p| atom(p).map(str::to_string)).collect::<Res<Vec<_>>>()?;
            lift(kb.taxonomy_mut().extend(name, &parents).map(|_| ()).map_err(KbError::from))
        }
        "entity" => {
            let name = atom(&a[0])?;
            if kb.is_time(name) || kb.space_index(name).is_some() {
                return fail(&a[0], KbError::Duplicate(name.into()));
            }
            let cat = atom(&a[1])?;
            kb.add_entity(name, cat).map(|_| ()).map_err(|kind| BuildError { pos: a[0].pos(), kind })
        }
        "time" => {
            let name = atom(&a[0])?;
            let region = if a.len() == 3 {
                let bound = |s: &Sexp| -> Res<u32> {
                    atom(s)?.parse().or_else(|_| other(s, format!("`{s}` is not an instant")))
                };
                TimeRegion::range(bound(&a[1])?, bound(&a[2])?).map_err(|e| BuildError { pos: form.pos(), kind: e.into() })?
            } else {
                time_term(kb, &a[1])?
            };
            kb.add_time(name, region).map_err(|kind| BuildError { pos: a[0].pos(), kind })
        }
        "space" => space(kb, form),
        "schema" => schema(kb, form),
        "concept-flags" => {
            let c = entity(kb, &a[0])?;
            let mut flags = ConceptFlags::default();
            for f in &a[1..] {
                let name = f.head().or(f.atom()).unwrap_or("");
                match name {
                    "founded" => flags.founded = true,
                    "functional" => flags.functional = true,
                    _ => return other(f, format!("unknown concept flag {f}")),
                }
            }
            kb.set_flags(c, flags);
            Ok(())
        }
        "cover" => {
            let whole = entity(kb, &a[0])?;
            let Some(items) = a[1].list() else { return other(&a[1], "expected a list of parts") };
            let parts = items.iter().map(|p| entity(kb, p)).collect::<Res<Vec<_>>>()?;
            let time = time_term(kb, &a[2])?;
            kb.add_cover(Cover { whole, parts, time });
            Ok(())
        }
        "requires" => {
            let concept = entity(kb, &a[0])?;
            let required = entity(kb, &a[1])?;
            let time = time_term(kb, &a[2])?;
            kb.add_requirement(Requirement { concept, required, time });
            Ok(())
        }
        "relation" => {
            let name = atom(&a[0])?;
            let arity: usize = atom(&a[1])?.parse().or_else(|_| other(&a[1], "arity must be a number"))?;
            lift(kb.declare_relation(name, arity))
        }
        "option" => {
            let names = a.iter().map(|s| atom(s)).collect::<Res<Vec<_>>>()?;
            match names.as_slice() {
                ["add-life-events"] => kb.options.add_life_events = true,
                ["skolemize-sums"] => kb.options.skolemize_sums = true,
                ["auto-time-location"] => kb.options.auto_time_location = true,
                ["disable", labels @ ..] if !labels.is_empty() => {
                    kb.options.disabled.extend(labels.iter().map(|l| l.to_string()))
                }
                _ => return other(form, format!("unknown option {form}")),
            }
            Ok(())
        }
        "color-path" => {
            let quality = entity(kb, &a[0])?;
            let (space, from) = point(kb, &a[1], Some(quality))?;
            let (space2, to) = point(kb, &a[2], Some(quality))?;
            if space != space2 {
                return other(&a[2], "path endpoints lie in different spaces");
            }
            let window = time_term(kb, &a[3])?;
            kb.add_color_path(ColorPathDecl { quality, space, from, to, window });
            Ok(())
        }
        "assert" => {
            let (lit_form, positive) = match a[0].head() {
                Some("not") => (&a[0].list().unwrap()[1], false),
                _ => (&a[0], true),
            };
            let lit = literal(kb, lit_form, positive)?;
            kb.assert_at(lit, Some(lit_form.pos())).map_err(|kind| BuildError { pos: lit_form.pos(), kind })
        }
        _ => other(form, format!("unknown form `{head}`")),
    }
}

fn entity(kb: &KnowledgeBase, s: &Sexp) -> Res<EntityId> {
    let name = atom(s)?;
    if kb.is_entity(name) {
        return Ok(kb.entity_id(name).unwrap());
    }
    if kb.is_time(name) || kb.space_index(name).is_some() {
        return fail(s, KbError::WrongKind { name: name.into(), expected: "entity" });
    }
    fail(s, KbError::Undeclared(name.into()))
}

/// Does the expression denote a time region rather than an entity?
fn looks_temporal(kb: &KnowledgeBase, s: &Sexp) -> bool {
    match s {
        Sexp::Atom(a, _) => a.split('+').all(|p| kb.is_time(p)) || a.parse::<u32>().is_ok(),
        Sexp::List(items, _) => match s.head() {
            Some("instants") => true,
            Some("sum") => items[1..].iter().all(|i| looks_temporal(kb, i)),
            _ => false,
        },
    }
}

fn time_term(kb: &KnowledgeBase, s: &Sexp) -> Res<TimeRegion> {
    match s {
        Sexp::Atom(a, _) => {
            let mut out = TimeRegion::default();
            for part in a.split('+') {
                match kb.time(part) {
                    Ok(t) => out.extend(t),
                    Err(_) if kb.is_entity(part) => {
                        return fail(s, KbError::WrongKind { name: part.into(), expected: "time region" })
                    }
                    Err(_) => return fail(s, KbError::Undeclared(part.into())),
                }
            }
            Ok(out)
        }
        Sexp::List(items, _) => match s.head() {
            Some("instants") => {
                let is = items[1..]
                    .iter()
                    .map(|i| atom(i)?.parse::<u32>().or_else(|_| other(i, format!("`{i}` is not an instant"))))
                    .collect::<Res<Vec<_>>>()?;
                TimeRegion::new(is).map_err(|e| BuildError { pos: s.pos(), kind: e.into() })
            }
            Some("sum") if items.len() > 1 => {
                let mut out = TimeRegion::default();
                for i in &items[1..] {
                    out.extend(&time_term(kb, i)?);
                }
                Ok(out)
            }
            _ => other(s, format!("expected a time region, found {s}")),
        },
    }
}

fn entity_term(kb: &KnowledgeBase, s: &Sexp) -> Res<EntityTerm> {
    match s {
        Sexp::Atom(a, _) if a.contains('+') && !kb.is_entity(a) => {
            let ops = a
                .split('+')
                .map(|p| kb.entity_id(p).or_else(|_| fail(s, KbError::Undeclared(p.into()))))
                .collect::<Res<Vec<_>>>()?;
            Ok(EntityTerm::Sum(SumTerm::Sum(ops)))
        }
        Sexp::Atom(..) => entity(kb, s).map(EntityTerm::Id),
        Sexp::List(items, _) => match (s.head(), items.len()) {
            (Some("sum"), n) if n > 1 => {
                let mut ops = Vec::new();
                for i in &items[1..] {
                    match entity_term(kb, i)? {
                        EntityTerm::Id(e) => ops.push(e),
                        EntityTerm::Sum(SumTerm::Sum(more)) => ops.extend(more),
                        EntityTerm::Sum(SumTerm::Fusion(_)) => return other(i, "fusions cannot be summed"),
                    }
                }
                Ok(EntityTerm::Sum(SumTerm::Sum(ops)))
            }
            (Some("fusion"), 2) => {
                let p = atom(&items[1])?;
                let unary = kb.user_relation(p).is_some_and(|u| u.arity == 1);
                if !unary && !kb.taxonomy().contains(p) {
                    return fail(&items[1], KbError::Undeclared(p.into()));
                }
                Ok(EntityTerm::Sum(SumTerm::Fusion(p.to_string())))
            }
            _ => other(s, format!("expected an entity term, found {s}")),
        },
    }
}

/// Finds a point by name. When several spaces share the name, the space
/// of `quality` decides.
fn point(kb: &KnowledgeBase, s: &Sexp, quality: Option<EntityId>) -> Res<(usize, usize)> {
    let name = atom(s)?;
    let hits: Vec<(usize, usize)> = kb
        .spaces()
        .iter()
        .enumerate()
        .filter_map(|(i, sp)| sp.point_index(name).map(|p| (i, p)))
        .collect();
    let preferred = quality.and_then(|q| kb.space_for_quality(q));
    match hits.as_slice() {
        [] => fail(s, KbError::Undeclared(name.into())),
        [one] => Ok(*one),
        many => match many.iter().find(|(sp, _)| Some(*sp) == preferred) {
            Some(hit) => Ok(*hit),
            None => other(s, format!("point `{name}` is ambiguous between spaces")),
        },
    }
}

fn region_arg(kb: &KnowledgeBase, s: &Sexp, whole: bool) -> Res<Arg> {
    let name = atom(s)?;
    if whole {
        if let Some(i) = kb.space_index(name) {
            return Ok(Arg::Space(i));
        }
    }
    for (i, sp) in kb.spaces().iter().enumerate() {
        if sp.region_points(name).is_some() {
            return Ok(Arg::SpaceRegion { space: i, region: name.to_string() });
        }
    }
    if !whole {
        let (space, point) = point(kb, s, None)?;
        return Ok(Arg::Point { space, point });
    }
    fail(s, KbError::Undeclared(name.into()))
}

fn literal(kb: &KnowledgeBase, form: &Sexp, positive: bool) -> Res<Literal> {
    let items = form.list().unwrap();
    let name = atom(&items[0])?;
    let a = &items[1..];
    let rel = match Rel::builtin(name) {
        Some(r) => r,
        None if kb.user_relation(name).is_some() => Rel::User(name.to_string()),
        None => return fail(&items[0], KbError::Undeclared(name.into())),
    };
    let e = |s| entity_term(kb, s).map(Arg::Entity);
    let t = |s| time_term(kb, s).map(Arg::Time);
    let args = match (&rel, a.len()) {
        (Rel::P, 2) if looks_temporal(kb, &a[0]) => vec![t(&a[0])?, t(&a[1])?],
        (Rel::P, 2) if a[0].atom().is_some_and(|n| !kb.is_entity(n) && !n.contains('+')) => {
            vec![region_arg(kb, &a[0], false)?, region_arg(kb, &a[1], true)?]
        }
        (Rel::P | Rel::Qt | Rel::Pcc | Rel::ExecutesPlan | Rel::SumEq, 2) => vec![e(&a[0])?, e(&a[1])?],
        (Rel::P | Rel::PC | Rel::K | Rel::CF, 3) => vec![e(&a[0])?, e(&a[1])?, t(&a[2])?],
        (Rel::Pre, 2) => vec![e(&a[0])?, t(&a[1])?],
        (Rel::QlT, 2) => vec![t(&a[0])?, e(&a[1])?],
        (Rel::Before | Rel::WeaklyBefore, 2) => vec![t(&a[0])?, t(&a[1])?],
        (Rel::Ql, 3) => {
            let q = entity(kb, &a[1])?;
            let (space, pt) = point(kb, &a[0], Some(q))?;
            vec![Arg::Point { space, point: pt }, Arg::entity(q), t(&a[2])?]
        }
        (Rel::User(_), _) => a.iter().map(e).collect::<Res<Vec<_>>>()?,
        _ => {
            return fail(
                form,
                KbError::Arity { rel: name.into(), expected: rel.arity_text(&Default::default()), got: a.len() },
            )
        }
    };
    Ok(Literal { rel, args, positive })
}

fn space(kb: &mut KnowledgeBase, form: &Sexp) -> Res<()> {
    let a = args(form);
    let mut sp = QualitySpace::new(atom(&a[0])?);
    let clauses: Vec<(&str, &Sexp, Vec<&str>)> = a[1..]
        .iter()
        .map(|c| {
            let Some(h) = c.head() else { return other(c, format!("expected a space clause, found {c}")) };
            let names = args(c).iter().map(atom).collect::<Res<Vec<_>>>()?;
            Ok((h, c, names))
        })
        .collect::<Res<_>>()?;
    let lift = |c: &Sexp, r: Result<usize, KbError>| r.map_err(|kind| BuildError { pos: c.pos(), kind });
    for (h, c, names) in &clauses {
        if *h == "points" {
            for n in names {
                lift(c, sp.add_point(n))?;
            }
        }
    }
    let idx = |sp: &QualitySpace, c: &Sexp, n: &str| match sp.point_index(n) {
        Some(i) => Ok(i),
        None => other(c, format!("unknown point `{n}` in space `{}`", sp.name)),
    };
    for (h, c, names) in &clauses {
        match *h {
            "points" => {}
            // (adjacent a b c) links consecutive points
            "adjacent" if names.len() >= 2 => {
                for w in names.windows(2) {
                    let (x, y) = (idx(&sp, c, w[0])?, idx(&sp, c, w[1])?);
                    sp.add_adjacency(x, y);
                }
            }
            "region" if !names.is_empty() => {
                let ps = names[1..].iter().map(|n| idx(&sp, c, n)).collect::<Res<BTreeSet<_>>>()?;
                sp.regions.push((names[0].to_string(), ps));
            }
            "order" => sp.order = Some(names.iter().map(|n| idx(&sp, c, n)).collect::<Res<Vec<_>>>()?),
            "quality" => {
                for n in names {
                    if !kb.taxonomy().contains(n) {
                        return fail(c, KbError::Taxonomy(crate::error::TaxonomyError::UnknownCategory(n.to_string())));
                    }
                    sp.qualities.push(n.to_string());
                }
            }
            _ => return other(c, format!("unknown space clause {c}")),
        }
    }
    kb.add_space(sp).map(|_| ()).map_err(|kind| BuildError { pos: form.pos(), kind })
}

fn schema(kb: &mut KnowledgeBase, form: &Sexp) -> Res<()> {
    let a = args(form);
    let category = atom(&a[0])?.to_string();
    let kind_name = atom(&a[1])?;
    let sname = atom(&a[2])?;
    let Some(space) = kb.space_index(sname) else { return fail(&a[2], KbError::Undeclared(sname.into())) };
    let mut rest = &a[3..];
    let continuous = rest.last().and_then(Sexp::atom) == Some("continuous");
    if continuous {
        rest = &rest[..rest.len() - 1];
    }
    let sp = kb.space(space);
    let kind = match (kind_name, rest) {
        ("stable", []) => SchemaKind::Stable,
        ("monotone", []) => {
            if sp.order.is_none() {
                return fail(
                    form,
                    KbError::Space { space: sname.into(), msg: format!("monotone schema on `{category}` needs an order") },
                );
            }
            SchemaKind::Monotone
        }
        ("turning", [target]) => {
            let n = atom(target)?;
            match sp.point_index(n) {
                Some(t) => SchemaKind::Turning { target: t },
                None => return other(target, format!("unknown point `{n}` in space `{sname}`")),
            }
        }
        _ => return other(form, format!("malformed schema {form}")),
    };
    kb.add_schema(Schema { category, kind, space, continuous }).map_err(|kind| BuildError { pos: form.pos(), kind })
}

/// Applies a test mutation: `drop:<literal>` removes an asserted literal,
/// `add:<form>` applies one more top-level form. The older
/// `drop-REL-arg-...` spelling is accepted too.
pub fn mutate(kb: &mut KnowledgeBase, spec: &str) -> Result<(), LoadError> {
    let bad = |m: String| LoadError::Io(format!("mutation `{spec}`: {m}"));
    if let Some(form) = spec.strip_prefix("add:") {
        let doc = super::parse(form)?;
        for f in &doc.forms {
            apply_form(kb, f)?;
        }
        return Ok(());
    }
    let target = if let Some(lit) = spec.strip_prefix("drop:") {
        let doc = sexpr::parse(lit)?;
        let [f] = doc.forms.as_slice() else { return Err(bad("expected one literal".into())) };
        let (inner, positive) = match f.head() {
            Some("not") => (&f.list().unwrap()[1], false),
            _ => (f, true),
        };
        literal(kb, inner, positive)?
    } else if let Some(rest) = spec.strip_prefix("drop-") {
        let key = |l: &Literal| {
            let mut parts = vec![l.rel.name().to_string()];
            parts.extend(l.args.iter().map(|a| kb.render_arg(a)));
            let k = parts.join("-");
            if l.positive { k } else { format!("not-{k}") }
        };
        match kb.literals().iter().find(|l| key(l) == rest) {
            Some(l) => l.clone(),
            None => return Err(bad("no such literal".into())),
        }
    } else {
        return Err(bad("expected add:, drop: or drop-".into()));
    };
    if kb.remove_literal(&target) {
        Ok(())
    } else {
        Err(bad(format!("{} is not asserted", kb.render_literal(&target))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{default_taxonomy, load_str};

    fn err(text: &str) -> KbError {
        match load_str(text) {
            Err(LoadError::Build(b)) => b.kind,
            other => panic!("expected build error, got {other:?}"),
        }
    }

    #[test]
    fn sum_sugar_in_literals() {
        let kb = load_str(
            "(entity T Table) (entity Tp Tabletop) (time t 0 1) (time t' 2 3)\n(assert (P Tp T (sum t t')))\n(assert (PRE T t+t'))",
        )
        .unwrap();
        let lit = &kb.literals()[0];
        assert_eq!(lit.args[2], Arg::Time(TimeRegion::range(0, 3).unwrap()));
        assert_eq!(kb.literals()[1].args[1], lit.args[2]);
    }

    #[test]
    fn entity_sums() {
        let kb = load_str("(entity a PRO) (entity b PRO) (entity c PRO)\n(assert (P a (sum b c)))\n(assert (P a b+c))")
            .unwrap();
        assert_eq!(kb.literals().len(), 1);
        assert!(matches!(&kb.literals()[0].args[1], Arg::Entity(EntityTerm::Sum(SumTerm::Sum(v))) if v.len() == 2));
    }

    #[test]
    fn resolution_errors() {
        assert_eq!(err("(entity T Table) (entity T Table)"), KbError::Duplicate("T".into()));
        assert!(matches!(err("(time t 5 3)"), KbError::Time(crate::error::TimeError::BadRange { .. })));
        assert_eq!(err("(time t 0 1) (assert (PRE x t))"), KbError::Undeclared("x".into()));
        assert!(matches!(err("(entity x Nope)"), KbError::Taxonomy(_)));
        assert!(matches!(
            err("(entity x PRO) (time t 0 0) (assert (PRE t x))"),
            KbError::WrongKind { .. }
        ));
    }

    #[test]
    fn build_errors_carry_positions() {
        match load_str("(time t 0 1)\n(entity a PRO)\n(assert (PRE a u))") {
            Err(LoadError::Build(b)) => assert_eq!(b.pos.line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spaces_and_schemas() {
        let kb = load_str(
            "(space S (points a b c) (adjacent a b c) (region R a b) (order a b c) (quality SpeedQuality))\n\
             (schema Walk stable S) (schema SpeedUp monotone S continuous) (schema Turn turning S c)",
        )
        .unwrap();
        let s = kb.space(0);
        assert!(s.adjacent(0, 1) && s.adjacent(1, 2) && !s.adjacent(0, 2));
        assert_eq!(kb.schemas().len(), 3);
        assert!(kb.schemas()[1].continuous);
        assert!(matches!(err("(space S (points a b)) (schema SpeedUp monotone S)"), KbError::Space { .. }));
    }

    #[test]
    fn options_and_flags() {
        let kb = load_str(
            "(option add-life-events) (option disable GEM-SSP Ad35)\n(entity c RL) (concept-flags c (founded) (functional))",
        )
        .unwrap();
        assert!(kb.options.add_life_events);
        assert!(!kb.options.label_enabled("Ad35"));
        assert!(kb.flags(kb.entity_id("c").unwrap()).functional);
    }

    #[test]
    fn mutations_drop_and_add() {
        let mut kb = load_str("(entity T Table) (time t 0 1) (assert (PRE T t))").unwrap();
        mutate(&mut kb, "drop-PRE-T-t").unwrap();
        assert!(kb.literals().is_empty());
        mutate(&mut kb, "add:(assert (not (PRE T t)))").unwrap();
        assert!(!kb.literals()[0].positive);
        mutate(&mut kb, "drop:(not (PRE T t))").unwrap();
        assert!(kb.literals().is_empty());
        assert!(mutate(&mut kb, "drop-PRE-T-t").is_err());
    }

    #[test]
    fn category_extension() {
        let mut kb = KnowledgeBase::new(default_taxonomy());
        let doc = crate::surface::parse("(category Chair Artefact) (entity c Chair)").unwrap();
        for f in &doc.forms {
            apply_form(&mut kb, f).unwrap();
        }
        assert!(kb.instance_of(kb.entity_id("c").unwrap(), "PED").unwrap());
    }
}
