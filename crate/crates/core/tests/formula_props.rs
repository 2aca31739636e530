use proptest::prelude::*;
use std::collections::BTreeSet;
use topos4::formula::{godel_translate, revariablize, subformulas, substitute, Formula};
use topos4::parse;

fn formula(modal: bool) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["p", "q", "r", "p1", "long_name"]).prop_map(Formula::letter),
        Just(Formula::Top),
        Just(Formula::Bottom),
    ];
    leaf.prop_recursive(5, 12, 2, move |inner| {
        let unary = if modal {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                inner.clone().prop_map(Formula::boxed),
                inner.clone().prop_map(Formula::diamond),
            ]
            .boxed()
        } else {
            inner.clone().prop_map(Formula::not).boxed()
        };
        prop_oneof![
            unary,
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

fn boxes(f: &Formula) -> usize {
    usize::from(matches!(f, Formula::Box(_))) + f.children().into_iter().map(boxes).sum::<usize>()
}

fn occurrences(f: &Formula) -> usize {
    1 + f.children().into_iter().map(occurrences).sum::<usize>()
}

proptest! {
    #[test]
    fn print_parse_round_trip(phi in formula(true).prop_filter("size", |f| f.size() <= 12)) {
        prop_assert_eq!(parse(&phi.to_string()).unwrap(), phi);
    }

    #[test]
    fn subformulas_are_bounded_and_closed(phi in formula(true)) {
        let subs = subformulas(&phi);
        prop_assert!(subs.len() <= phi.size());
        prop_assert_eq!(subs.last(), Some(&phi));
        let set: BTreeSet<&Formula> = subs.iter().collect();
        prop_assert_eq!(set.len(), subs.len());
        for s in &subs {
            for c in s.children() {
                prop_assert!(set.contains(c));
            }
        }
    }

    #[test]
    fn revariablize_separates_and_inverts(fs in prop::collection::vec(formula(true), 1..5)) {
        let (out, map) = revariablize(&fs);
        for i in 0..out.len() {
            for j in i + 1..out.len() {
                let a: BTreeSet<String> = out[i].letters().into_iter().collect();
                prop_assert!(out[j].letters().iter().all(|p| !a.contains(p)));
            }
            prop_assert_eq!(&substitute(&out[i], &map.inverse(i)), &fs[i]);
        }
    }

    #[test]
    fn godel_boxes_every_occurrence(phi in formula(false)) {
        let t = godel_translate(&phi).unwrap();
        prop_assert_eq!(boxes(&t), occurrences(&phi.desugar()));
        prop_assert_eq!(t.size(), 2 * occurrences(&phi.desugar()));
    }
}
