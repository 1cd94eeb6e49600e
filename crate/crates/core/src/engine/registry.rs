//! Axiom labels, their formulas, and witness replay.

use crate::concepts::{self, is_anti_rigid};
use crate::constitution;
use crate::engine::closure::ClosedKb;
use crate::engine::report::{sort_reports, Value, ViolationReport};
use crate::kb::{EntityId, EntityTerm, Options};
use crate::mereology::{
    self, region_literal_holds, region_witness, same_sum, ssp_witness_a, ssp_witness_at, term_value,
};
use crate::presence::{self, constant_participation, unparticipated};
use crate::quality::{self, check_color_path, continuity_breach, schema_breach, schema_label};
use crate::taxonomy::cat;
use crate::timeline::TimeRegion;

pub struct AxiomInfo {
    pub label: &'static str,
    pub formula: &'static str,
    pub gloss: &'static str,
}

pub const AXIOMS: &[AxiomInfo] = &[
    AxiomInfo { label: "A11", formula: "CF(x, y, t) → (ED(x) ∨ PD(x)) ∧ C(y) ∧ T(t)", gloss: "classification typing" },
    AxiomInfo { label: "A12", formula: "CF(x, y, t) → PRE(x, t)", gloss: "classified entities are present" },
    AxiomInfo { label: "A14", formula: "CF(x, y, t) → ¬CF(y, x, t)", gloss: "classification is not symmetric" },
    AxiomInfo { label: "A15", formula: "CF(x, y, t) ∧ CF(y, z, t) → ¬CF(x, z, t)", gloss: "no classification triangles" },
    AxiomInfo { label: "Ad10", formula: "P(x, y, t) → ED(x) ∧ ED(y) ∧ T(t)", gloss: "temporary part typing" },
    AxiomInfo { label: "Ad17", formula: "P(x, y, t) → PRE(x, t) ∧ PRE(y, t)", gloss: "parts and wholes are present" },
    AxiomInfo { label: "Ad20", formula: "K(x, y, t) → (ED(x) ∧ ED(y) ∨ PD(x) ∧ PD(y)) ∧ T(t)", gloss: "constitution typing" },
    AxiomInfo { label: "Ad21", formula: "K(x, y, t) ∧ ED(x) ∧ ED(y) → (PED(x) ↔ PED(y))", gloss: "physical endurants are constituted by physical endurants" },
    AxiomInfo { label: "Ad24", formula: "K(x, y, t) → ¬K(y, x, t)", gloss: "constitution is asymmetric" },
    AxiomInfo { label: "Ad33", formula: "PC(x, y, t) → ED(x) ∧ PD(y) ∧ T(t)", gloss: "participation typing" },
    AxiomInfo { label: "Ad34", formula: "PD(x) ∧ PRE(x, t) → ∃y PC(y, x, t)", gloss: "perdurants have participants" },
    AxiomInfo { label: "Ad35", formula: "ED(x) → ∃y, t PC(x, y, t)", gloss: "endurants participate in some perdurant" },
    AxiomInfo { label: "Ad36", formula: "PC(x, y, t) → PRE(x, t) ∧ PRE(y, t)", gloss: "participants and perdurants are co-present" },
    AxiomInfo { label: "Ad46", formula: "TQ(x) ∧ qt(x, y) → PD(y)", gloss: "temporal qualities inhere in perdurants" },
    AxiomInfo { label: "Ad47", formula: "PQ(x) ∧ qt(x, y) → PED(y)", gloss: "physical qualities inhere in physical endurants" },
    AxiomInfo { label: "Ad48", formula: "AQ(x) ∧ qt(x, y) → NPED(y)", gloss: "abstract qualities inhere in non-physical endurants" },
    AxiomInfo { label: "D3-AR", formula: "RL(x) → AR(x); AR(x) ≜ ∀y, t (CF(y, x, t) → ∃t' (PRE(y, t') ∧ ¬CF(y, x, t')))", gloss: "roles are anti-rigid" },
    AxiomInfo { label: "D3-FD", formula: "RL(x) → FD(x)", gloss: "roles are founded" },
    AxiomInfo { label: "Dd40-conflict", formula: "PRE(x, t) ≜ ∃t' (ql_T(t', x) ∧ P(t, t'))", gloss: "denied presence covered by the temporal quale" },
    AxiomInfo { label: "Dd63", formula: "PC_C(x, y) ≜ ∃t PRE(y, t) ∧ ∀t (PRE(y, t) → PC(x, y, t))", gloss: "constant participation" },
    AxiomInfo { label: "F11-role", formula: "FunctRL(x) → RL(x)", gloss: "functional roles are roles" },
    AxiomInfo { label: "F12-functional", formula: "FunctRL(y) ∧ CF(x, y, t) ∧ CF(x', y, t) → x = x'", gloss: "a functional role classifies one entity at a time" },
    AxiomInfo { label: "F25-path", formula: "∃p (SC(p) ∧ P(l, p) ∧ P(l', p) ∧ ∀l* (P(l*, p) → ∃t (P(t, w) ∧ ql(l*, q, t))))", gloss: "a self-connected path of attested quales joins two quales" },
    AxiomInfo { label: "F26-continuous", formula: "consecutive quales of q are adjacent in the space", gloss: "quale changes without jumps" },
    AxiomInfo { label: "F29-stable", formula: "qt(s, x) ∧ φ(x) → ∀li, lj, ti, tj (ql(li, s, ti) ∧ ql(lj, s, tj) ∧ P(ti, tx) ∧ P(tj, tx) → li = lj)", gloss: "the quale is stable during the perdurant" },
    AxiomInfo { label: "F30-monotone", formula: "qt(s, x) ∧ φ(x) → ∃ li ≠ lj attested in tx ∧ ∀ attested (li, ti), (lj, tj) in tx (ti < tj → li ≤ lj)", gloss: "the quale changes and only increases" },
    AxiomInfo { label: "F37-presence", formula: "ExecutesPlan(x, y) → ∀t (PRE(x, t) → PRE(y, t))", gloss: "a plan is present while executed" },
    AxiomInfo { label: "F37-typing", formula: "ExecutesPlan(x, y) → PD(x) ∧ C(y)", gloss: "plan execution typing" },
    AxiomInfo { label: "F39-turning", formula: "qt(s, y) ∧ φ(y) ∧ ti < tj ∧ ql(li, s, ti) ∧ ql(lj, s, tj) ∧ li + ri = lj + rj = target → 0 ≤ rj < ri", gloss: "the distance to the target decreases and reaches zero" },
    AxiomInfo { label: "F43-concept", formula: "requires(c, d, t) ∧ CF(x, c, t) → CF(x, d, t)", gloss: "a concept depends on the concept required at that time" },
    AxiomInfo { label: "F43-distinct", formula: "requires(c, d, t) ∧ requires(c, d', t') ∧ t ≠ t' → d ≠ d'", gloss: "required concepts differ across times" },
    AxiomInfo { label: "GEM-AS", formula: "P(x, y) ∧ P(y, x) → x = y", gloss: "atemporal parthood is antisymmetric" },
    AxiomInfo { label: "GEM-R", formula: "P(x, x) for perdurants and abstracts; PRE(x, t) → P(x, x, t) for endurants", gloss: "parthood is reflexive" },
    AxiomInfo { label: "GEM-SSP", formula: "¬P(y, x) → ∃z (P(z, y) ∧ ¬O(z, x))", gloss: "strong supplementation" },
    AxiomInfo { label: "GEM-T", formula: "P(x, y) ∧ P(y, z) → P(x, z)", gloss: "parthood is transitive" },
    AxiomInfo { label: "K-trans", formula: "K(x, y, t) ∧ K(y, z, t) → K(x, z, t)", gloss: "constitution is transitive" },
    AxiomInfo { label: "P-typing", formula: "P(x, y) → (PD(x) ∧ PD(y)) ∨ (AB(x) ∧ AB(y))", gloss: "atemporal part typing" },
    AxiomInfo { label: "Q-bearer", formula: "Q(x) → ∃!y qt(x, y)", gloss: "each quality has exactly one bearer" },
    AxiomInfo { label: "Region-P", formula: "P(a, b) between time regions, points or space regions", gloss: "asserted inclusion among regions" },
    AxiomInfo { label: "Sum-identity", formula: "x = ιz ∀w (O(w, z) ↔ O(w, x1) ∨ ... ∨ O(w, xn))", gloss: "a claimed sum has the overlap profile of its operands" },
    AxiomInfo { label: "Time-order", formula: "t1 < t2, t1 ≤ t2 on convex regions", gloss: "asserted time ordering" },
    AxiomInfo { label: "ql-typing", formula: "ql(l, q, t) → Q(q) ∧ l in the space of q's category", gloss: "quale typing" },
    AxiomInfo { label: "qt-typing", formula: "qt(x, y) → Q(x)", gloss: "only qualities inhere" },
];

pub fn axiom(label: &str) -> Option<&'static AxiomInfo> {
    AXIOMS.iter().find(|a| a.label == label)
}

pub fn labels() -> impl Iterator<Item = &'static str> {
    AXIOMS.iter().map(|a| a.label)
}

/// Runs every module check and filters by the enabled labels.
pub fn check_all(ckb: &ClosedKb) -> Vec<ViolationReport> {
    check_with(ckb, &ckb.kb().options)
}

pub fn check_with(ckb: &ClosedKb, options: &Options) -> Vec<ViolationReport> {
    let runs: [fn(&ClosedKb) -> Vec<ViolationReport>; 14] = [
        mereology::check_parthood_typing,
        mereology::check_gem,
        mereology::check_region_literals,
        quality::check_quality_typing,
        quality::check_trajectory_constraints,
        presence::check_presence,
        presence::check_participation,
        constitution::check_constitution,
        concepts::check_classification,
        concepts::check_roles,
        concepts::check_functional_roles,
        concepts::check_plan_execution,
        concepts::check_concept_dependency,
        |_| Vec::new(),
    ];
    let mut out: Vec<ViolationReport> = runs
        .iter()
        .flat_map(|f| f(ckb))
        .inspect(|r| debug_assert!(axiom(&r.label).is_some(), "unregistered label {}", r.label))
        .filter(|r| options.label_enabled(&r.label))
        .collect();
    sort_reports(&mut out);
    out.dedup();
    out
}

fn every_instant(t: Option<&TimeRegion>, f: impl Fn(u32) -> bool) -> bool {
    match t {
        Some(t) if !t.is_empty() => t.instants().all(f),
        _ => false,
    }
}

/// Re-evaluates the axiom instance named by a report against the closed
/// KB. True when the instance is indeed violated.
pub fn replay(ckb: &ClosedKb, r: &ViolationReport) -> bool {
    let kb = ckb.kb();
    let e = |v: &str| r.entity(v);
    let t = r.time("t");
    let ed = |x: EntityId| kb.is_endurant(x);
    let pd = |x: EntityId| kb.is_perdurant(x);
    match r.label.as_str() {
        "Ad10" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            t.is_some_and(|t| ckb.holds_p(x, y, t)) && !(ed(x) && ed(y))
        }
        "Ad17" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            every_instant(t, |i| ckb.part_at(x, y, i) && !(ckb.present_at(x, i) && ckb.present_at(y, i)))
        }
        "P-typing" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            ckb.holds_pa(x, y) && !((pd(x) && pd(y)) || (kb.is_abstract(x) && kb.is_abstract(y)))
        }
        "Sum-identity" => ckb.sum_eqs.iter().any(|(a, b)| {
            term_matches(ckb, a, r.witness("x")) && term_matches(ckb, b, r.witness("y")) && !same_sum(ckb, a, b)
        }),
        "GEM-R" => {
            let Some(x) = e("x") else { return false };
            match t {
                Some(_) => every_instant(t, |i| ckb.present_at(x, i) && !ckb.part_at(x, x, i)),
                None => (pd(x) || kb.is_abstract(x)) && !ckb.holds_pa(x, x),
            }
        }
        "GEM-AS" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            x != y && ckb.holds_pa(x, y) && ckb.holds_pa(y, x)
        }
        "GEM-T" => {
            let (Some(x), Some(y), Some(z)) = (e("x"), e("y"), e("z")) else { return false };
            match t {
                Some(_) => every_instant(t, |i| ckb.part_at(x, y, i) && ckb.part_at(y, z, i) && !ckb.part_at(x, z, i)),
                None => ckb.holds_pa(x, y) && ckb.holds_pa(y, z) && !ckb.holds_pa(x, z),
            }
        }
        "GEM-SSP" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            match t {
                Some(_) => every_instant(t, |i| {
                    ckb.present_at(x, i) && ckb.present_at(y, i) && !ckb.part_at(y, x, i) && !ssp_witness_at(ckb, x, y, i)
                }),
                None => !ckb.holds_pa(y, x) && !ssp_witness_a(ckb, x, y),
            }
        }
        "Region-P" | "Time-order" => ckb.region_lits.iter().any(|lit| {
            let same_label = (lit.rel == crate::kb::Rel::P) == (r.label == "Region-P");
            same_label
                && Some(&region_witness(ckb, lit)[0]) == r.witness("a")
                && Some(&region_witness(ckb, lit)[1]) == r.witness("b")
                && (region_literal_holds(ckb, &lit.rel, &lit.args) != Ok(lit.positive))
        }),
        "Ad46" | "Ad47" | "Ad48" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            let (qc, need) = match r.label.as_str() {
                "Ad46" => (cat::TQ, cat::PD),
                "Ad47" => (cat::PQ, cat::PED),
                _ => (cat::AQ, cat::NPED),
            };
            ckb.qt_pairs().contains(&(x, y)) && kb.is_a(x, qc) && !kb.is_a(y, need)
        }
        "Q-bearer" => e("x").is_some_and(|x| kb.is_quality(x) && ckb.bearers(x).len() != 1),
        "qt-typing" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            ckb.qt_pairs().contains(&(x, y)) && !kb.is_quality(x)
        }
        "ql-typing" => {
            let (Some(Value::Point { space, point }), Some(q), Some(t)) = (r.witness("l"), e("x"), t) else { return false };
            ckb.quale_atoms().iter().any(|a| {
                a.space == *space
                    && a.point == *point
                    && a.quality == q
                    && &a.time == t
                    && (!kb.is_quality(q) || kb.space_for_quality(q).is_some_and(|s| s != a.space))
            })
        }
        "F29-stable" | "F30-monotone" | "F39-turning" | "F26-continuous" => {
            let (Some(x), Some(Value::Symbol(c))) = (e("x"), r.witness("c")) else { return false };
            kb.schemas().iter().any(|s| {
                &s.category == c
                    && kb.is_a(x, c)
                    && if r.label == "F26-continuous" {
                        s.continuous && continuity_breach(ckb, s, x).is_some()
                    } else {
                        schema_label(&s.kind) == r.label && schema_breach(ckb, s, x).is_some()
                    }
            })
        }
        "F25-path" => {
            let Some(q) = e("q") else { return false };
            kb.color_paths().iter().any(|d| {
                d.quality == q
                    && r.witness("l") == Some(&Value::Point { space: d.space, point: d.from })
                    && r.witness("l2") == Some(&Value::Point { space: d.space, point: d.to })
                    && !matches!(check_color_path(ckb, d), Ok(true))
            })
        }
        "Dd40-conflict" => {
            let (Some(x), Some(t)) = (e("x"), t) else { return false };
            ckb.pre_denied[x.index()].contains(t) && ckb.present(x, t)
        }
        "Ad33" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            t.is_some_and(|t| ckb.holds_pc(x, y, t)) && !(ed(x) && pd(y))
        }
        "Ad34" => {
            let Some(x) = e("x") else { return false };
            pd(x) && t.is_some_and(|t| !t.is_empty() && t.is_subset(&unparticipated(ckb, x)))
        }
        "Ad35" => e("x").is_some_and(|x| ed(x) && !ckb.pc.keys().any(|(a, _)| *a == x)),
        "Ad36" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            every_instant(t, |i| {
                ckb.pc_cov(x, y).contains(i) && !(ckb.present_at(x, i) && ckb.present_at(y, i))
            })
        }
        "Dd63" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            ckb.pcc.contains(&(x, y)) && !constant_participation(ckb, x, y)
        }
        "Ad20" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            t.is_some_and(|t| ckb.holds_k(x, y, t)) && !((ed(x) && ed(y)) || (pd(x) && pd(y)))
        }
        "Ad21" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            t.is_some_and(|t| ckb.holds_k(x, y, t)) && ed(x) && ed(y) && kb.is_a(x, cat::PED) != kb.is_a(y, cat::PED)
        }
        "Ad24" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            every_instant(t, |i| ckb.k_cov(x, y).contains(i) && ckb.k_cov(y, x).contains(i))
        }
        "K-trans" => {
            let (Some(x), Some(y), Some(z)) = (e("x"), e("y"), e("z")) else { return false };
            every_instant(t, |i| {
                ckb.k_cov(x, y).contains(i) && ckb.k_cov(y, z).contains(i) && !ckb.k_cov(x, z).contains(i)
            })
        }
        "A11" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            t.is_some_and(|t| ckb.holds_cf(x, y, t)) && !((ed(x) || pd(x)) && kb.is_a(y, cat::C))
        }
        "A12" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            every_instant(t, |i| ckb.cf_cov(x, y).contains(i) && !ckb.present_at(x, i))
        }
        "A14" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            every_instant(t, |i| ckb.cf_cov(x, y).contains(i) && ckb.cf_cov(y, x).contains(i))
        }
        "A15" => {
            let (Some(x), Some(y), Some(z)) = (e("x"), e("y"), e("z")) else { return false };
            every_instant(t, |i| {
                ckb.cf_cov(x, y).contains(i) && ckb.cf_cov(y, z).contains(i) && ckb.cf_cov(x, z).contains(i)
            })
        }
        "D3-AR" => {
            let (Some(c), Some(y)) = (e("x"), e("y")) else { return false };
            let cov = ckb.cf_cov(y, c);
            kb.is_a(c, cat::RL) && !is_anti_rigid(ckb, c) && !cov.is_empty() && ckb.quale(y).is_subset(&cov)
        }
        "D3-FD" => e("x").is_some_and(|x| kb.is_a(x, cat::RL) && !kb.flags(x).founded),
        "F11-role" => e("x").is_some_and(|x| kb.flags(x).functional && !kb.is_a(x, cat::RL)),
        "F12-functional" => {
            let (Some(c), Some(x), Some(x2)) = (e("c"), e("x"), e("x'")) else { return false };
            kb.flags(c).functional
                && x != x2
                && every_instant(t, |i| ckb.cf_cov(x, c).contains(i) && ckb.cf_cov(x2, c).contains(i))
        }
        "F37-typing" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            ckb.executes().contains(&(x, y)) && !(pd(x) && kb.is_a(y, cat::C))
        }
        "F37-presence" => {
            let (Some(x), Some(y)) = (e("x"), e("y")) else { return false };
            ckb.executes().contains(&(x, y)) && every_instant(t, |i| ckb.present_at(x, i) && !ckb.present_at(y, i))
        }
        "F43-concept" => {
            let (Some(x), Some(c), Some(d)) = (e("x"), e("c"), e("d")) else { return false };
            kb.requirements().iter().any(|req| {
                req.concept == c
                    && req.required == d
                    && every_instant(t, |i| {
                        req.time.contains(i) && ckb.cf_cov(x, c).contains(i) && !ckb.cf_cov(x, d).contains(i)
                    })
            })
        }
        "F43-distinct" => {
            let (Some(c), Some(d)) = (e("c"), e("d")) else { return false };
            let regions: Vec<_> = kb.requirements().iter().filter(|q| q.concept == c && q.required == d).map(|q| &q.time).collect();
            regions.iter().any(|a| regions.iter().any(|b| a != b))
        }
        _ => false,
    }
}

fn term_matches(ckb: &ClosedKb, t: &EntityTerm, v: Option<&Value>) -> bool {
    v == Some(&term_value(ckb, t))
}

/// Formula text and gloss for a label.
pub fn explain(label: &str) -> Option<String> {
    axiom(label).map(|a| format!("{}: {}\n  {}\n", a.label, a.gloss, a.formula))
}
