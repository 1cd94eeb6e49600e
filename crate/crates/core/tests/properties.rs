mod oracle;

use std::collections::BTreeSet;

use dolce_kernel::engine::report::render_text;
use dolce_kernel::surface::{self, Sexp, SourceDocument};
use dolce_kernel::timeline::{region_sum, strictly_before, weakly_before};
use dolce_kernel::{check_all, close, load_str, replay, TimeRegion};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn region() -> impl Strategy<Value = BTreeSet<u32>> {
    prop::collection::btree_set(0u32..12, 0..8)
}

fn tr(s: &BTreeSet<u32>) -> TimeRegion {
    let mut t = TimeRegion::default();
    for i in s {
        t.extend(&TimeRegion::instant(*i));
    }
    t
}

fn set(t: &TimeRegion) -> BTreeSet<u32> {
    t.instants().collect()
}

fn sexp() -> impl Strategy<Value = Sexp> {
    let atom = "[a-zA-Z][a-zA-Z0-9_'+-]{0,6}".prop_map(|s| Sexp::atom_at(&s));
    atom.prop_recursive(3, 24, 4, |inner| prop::collection::vec(inner, 0..4).prop_map(Sexp::list_of))
}

proptest! {
    #[test]
    fn region_algebra_matches_sets(a in region(), b in region()) {
        let (ta, tb) = (tr(&a), tr(&b));
        prop_assert_eq!(set(&ta.union(&tb)), a.union(&b).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(set(&ta.intersection(&tb)), a.intersection(&b).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(set(&ta.difference(&tb)), a.difference(&b).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(ta.is_subset(&tb), a.is_subset(&b));
        prop_assert_eq!(ta.overlaps(&tb), !a.is_disjoint(&b));
    }

    #[test]
    fn runs_partition_a_region(a in region()) {
        let t = tr(&a);
        let runs = t.runs();
        prop_assert!(runs.iter().all(TimeRegion::is_convex));
        prop_assert!(runs.windows(2).all(|w| w[0].last().unwrap() + 1 < w[1].first().unwrap()));
        if !runs.is_empty() {
            prop_assert_eq!(region_sum(&runs).unwrap(), t.clone());
        }
        prop_assert_eq!(t.is_convex(), runs.len() == 1);
    }

    #[test]
    fn strict_order_implies_weak(lo1 in 0u32..8, len1 in 0u32..4, lo2 in 0u32..8, len2 in 0u32..4) {
        let t1 = TimeRegion::range(lo1, lo1 + len1).unwrap();
        let t2 = TimeRegion::range(lo2, lo2 + len2).unwrap();
        let strict = strictly_before(&t1, &t2).unwrap();
        if strict {
            prop_assert!(weakly_before(&t1, &t2).unwrap());
            prop_assert!(!strictly_before(&t2, &t1).unwrap());
        }
        prop_assert!(!(weakly_before(&t1, &t2).unwrap() && weakly_before(&t2, &t1).unwrap()));
    }

    #[test]
    fn printed_documents_reparse(forms in prop::collection::vec(sexp(), 0..6)) {
        let forms: Vec<Sexp> = forms.into_iter().filter(|f| f.list().is_some()).collect();
        let doc = SourceDocument { path: None, forms };
        let printed = doc.print();
        let back = surface::sexpr::parse(&printed).unwrap();
        prop_assert_eq!(&back.forms, &doc.forms);
        prop_assert_eq!(back.print(), printed);
    }

    #[test]
    fn every_report_replays(seed in any::<u64>()) {
        let rk = oracle::RandomKb::generate(&mut ChaCha8Rng::seed_from_u64(seed), 6, 4);
        let text = rk.to_dkb();
        if let Ok(ckb) = close(&load_str(&text).unwrap()) {
            for r in check_all(&ckb) {
                prop_assert!(replay(&ckb, &r), "{}\n{}", text, r.render_text(ckb.kb()));
            }
        }
    }

    #[test]
    fn reports_are_deterministic_and_sorted(seed in any::<u64>()) {
        let rk = oracle::RandomKb::generate(&mut ChaCha8Rng::seed_from_u64(seed), 6, 4);
        let text = rk.to_dkb();
        let run = || close(&load_str(&text).unwrap()).map(|c| {
            let r = check_all(&c);
            (render_text(&r, c.kb()), r.iter().map(|r| r.label.clone()).collect::<Vec<_>>())
        });
        if let (Ok(a), Ok(b)) = (run(), run()) {
            prop_assert_eq!(&a, &b);
            let labels = a.1;
            prop_assert!(labels.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn disabling_a_label_removes_only_it(seed in any::<u64>()) {
        let rk = oracle::RandomKb::generate(&mut ChaCha8Rng::seed_from_u64(seed), 6, 4);
        let kb = load_str(&rk.to_dkb()).unwrap();
        let Ok(ckb) = close(&kb) else { return Ok(()) };
        let all = check_all(&ckb);
        let Some(first) = all.first().map(|r| r.label.clone()) else { return Ok(()) };
        let mut kb2 = kb.clone();
        kb2.options.disabled.insert(first.clone());
        let ckb2 = close(&kb2).unwrap();
        let rest = check_all(&ckb2);
        let expected: Vec<_> = all.iter().filter(|r| r.label != first).cloned().collect();
        prop_assert_eq!(rest, expected);
    }

    #[test]
    fn closure_is_transitive_without_denials(seed in any::<u64>()) {
        let rk = oracle::RandomKb::generate(&mut ChaCha8Rng::seed_from_u64(seed), 6, 4);
        let kb = load_str(&rk.to_dkb()).unwrap();
        let Ok(ckb) = close(&kb) else { return Ok(()) };
        // without denials, transitivity of K and P must hold outright
        let has_denials = rk.lits.iter().any(|l| !l.positive && matches!(l.rel, "K" | "P"));
        if !has_denials {
            prop_assert!(check_all(&ckb).iter().all(|r| r.label != "K-trans" && r.label != "GEM-T"));
        }
    }
}
