use mzsv_core::compositions::merge_terms;
use mzsv_core::oplus::expand_oplus_raw;
use mzsv_core::{
    equal_as_term_multisets, expand_kappa_limit, expand_oplus, expand_spec, kappa_terms,
    mhs_bruteforce, mhs_star_bruteforce, verify_thm23, MhsCache, SignedComposition, StarSpec,
    SumKind,
};
use proptest::prelude::*;

fn spec_strategy(
    max_r: usize,
    max_a: u64,
    c_range: std::ops::RangeInclusive<u64>,
) -> impl Strategy<Value = StarSpec> {
    (0..=max_r).prop_flat_map(move |r| {
        (
            proptest::collection::vec(0..=max_a, r + 1),
            proptest::collection::vec(c_range.clone(), r),
        )
            .prop_map(|(a, c)| StarSpec::new(a, c).unwrap())
    })
}

fn signed_entry() -> impl Strategy<Value = i64> {
    (1i64..=4, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binomial_identity_holds(spec in spec_strategy(3, 3, 2..=5), n in 1u64..=7) {
        let report = verify_thm23(n, &spec);
        prop_assert!(report.equal, "{} at n={}: {} vs {}", report.spec, n, report.lhs, report.rhs);
    }

    #[test]
    fn rewrites_conserve_weight_and_length(spec in spec_strategy(4, 4, 2..=7)) {
        let w = expand_spec(&spec).weight();
        for t in kappa_terms(&spec) {
            prop_assert_eq!(t.phi + t.tail.weight(), w);
            prop_assert_eq!(t.coeff_exponent, 1 + t.tail.depth());
            prop_assert!(t.phi >= 2);
        }
    }

    #[test]
    fn expansions_agree(spec in spec_strategy(3, 4, 3..=7).prop_filter("r >= 1", |s| s.r() >= 1)) {
        let raw = expand_oplus_raw(&spec).unwrap();
        let merged = merge_terms(raw.clone());
        prop_assert_eq!(raw.len(), merged.len());
        prop_assert!(equal_as_term_multisets(&expand_oplus(&spec).unwrap(), &expand_kappa_limit(&spec)));
    }

    #[test]
    fn dp_matches_oracle(entries in proptest::collection::vec(signed_entry(), 0..=4), n in 0u64..=9) {
        let s = SignedComposition::new(entries).unwrap();
        let mut cache = MhsCache::new();
        prop_assert_eq!(cache.value(SumKind::Strict, n, &s), mhs_bruteforce(n, &s).unwrap());
        prop_assert_eq!(cache.value(SumKind::Star, n, &s), mhs_star_bruteforce(n, &s).unwrap());
    }
}
