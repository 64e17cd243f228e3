//! Property tests for the canonical set representation and the evaluator.

use proptest::prelude::*;

use syllogist_core::hf::{Caps, HfSet};
use syllogist_core::semantics::{eval_formula, Assignment};
use syllogist_core::syntax::{parse_formula, print_formula};

fn hf_strategy() -> impl Strategy<Value = HfSet> {
    let leaf = Just(HfSet::empty());
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop::collection::vec(inner, 0..3).prop_map(HfSet::canonicalize)
    })
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(s in hf_strategy()) {
        let again = HfSet::canonicalize(s.elements().to_vec());
        prop_assert_eq!(&again, &s);
    }

    #[test]
    fn display_parses_back(s in hf_strategy()) {
        let round: HfSet = s.to_string().parse().unwrap();
        prop_assert_eq!(round, s);
    }

    #[test]
    fn structural_order_matches_codes(a in hf_strategy(), b in hf_strategy()) {
        let caps = Caps { ack_code_max_rank: 16, ..Caps::default() };
        let ca = a.ack_code(&caps).unwrap();
        let cb = b.ack_code(&caps).unwrap();
        prop_assert_eq!(a.ack_less(&b), ca < cb);
        prop_assert_eq!(a == b, ca == cb);
    }

    #[test]
    fn rank_is_monotone_under_membership(s in hf_strategy()) {
        for x in s.iter() {
            prop_assert!(x.rank() < s.rank());
        }
    }

    #[test]
    fn boolean_algebra_laws(a in hf_strategy(), b in hf_strategy(), c in hf_strategy()) {
        prop_assert_eq!(a.union(&b), b.union(&a));
        prop_assert_eq!(a.inter(&b), b.inter(&a));
        prop_assert_eq!(a.diff(&b).inter(&b), HfSet::empty());
        prop_assert_eq!(a.union(&b).inter(&c), a.inter(&c).union(&b.inter(&c)));
    }

    #[test]
    fn unordered_product_is_symmetric(a in hf_strategy(), b in hf_strategy()) {
        let caps = Caps::default();
        prop_assert_eq!(
            a.unord_prod(&b, &caps).unwrap(),
            b.unord_prod(&a, &caps).unwrap()
        );
    }

    #[test]
    fn disjoint_union_refines_big_union(s in hf_strategy()) {
        prop_assert!(s.disj_union().subset_of(&s.big_union()));
    }

    #[test]
    fn kpair_is_injective(
        a in hf_strategy(),
        b in hf_strategy(),
        c in hf_strategy(),
        d in hf_strategy(),
    ) {
        let same = HfSet::kpair(&a, &b) == HfSet::kpair(&c, &d);
        prop_assert_eq!(same, a == c && b == d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn generated_formulas_roundtrip(seed in any::<u64>()) {
        // One formula per case, depth up to 5.
        let cfg = syllogist_core::corpus::CorpusConfig {
            max_term_depth: 5,
            allow_finite: true,
            ..Default::default()
        };
        let f = &syllogist_core::corpus::corpus(seed, 1, &cfg)[0];
        let printed = print_formula(f);
        let reparsed = parse_formula(&printed).unwrap();
        prop_assert_eq!(&reparsed, f);
        prop_assert_eq!(reparsed.vars(), f.vars());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn evaluation_is_stable_under_reprinting(seed in any::<u64>(), ax in hf_strategy(), ay in hf_strategy()) {
        let cfg = syllogist_core::corpus::CorpusConfig {
            vars: vec!["x".into(), "y".into()],
            max_term_depth: 2,
            max_rank_raise: 1,
            max_atoms: 3,
            allow_finite: true,
        };
        let f = &syllogist_core::corpus::corpus(seed, 1, &cfg)[0];
        let reparsed = parse_formula(&print_formula(f)).unwrap();
        let caps = Caps::default();
        let m = Assignment::new().with("x", ax).with("y", ay);
        prop_assert_eq!(eval_formula(&m, f, &caps), eval_formula(&m, &reparsed, &caps));
    }
}
