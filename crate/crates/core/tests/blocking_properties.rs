use ca_control::blocking::{
    certify_p_blocking, check_p_blocking_bounded, BlockingQuery, BlockingStatus,
};
use ca_control::{Limits, RegionWord, Rule};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn certified_and_refuted_never_coincide(
        code in any::<u8>(),
        len in 1usize..=6,
        bits in any::<u64>(),
        p in 1usize..=3,
        k in 0usize..6,
        horizon in 0usize..=6,
    ) {
        prop_assume!(p <= len && k + p <= len);
        let rule = Rule::wolfram(code);
        let limits = Limits::default();
        let word = RegionWord::from_bits(len, bits % (1 << len)).unwrap();
        let query = BlockingQuery::new(word, p, k, horizon).unwrap();
        let bounded = check_p_blocking_bounded(&rule, &query, &limits).unwrap();
        let cert = certify_p_blocking(&rule, &query, &limits).unwrap();
        prop_assert!(matches!(cert.status, BlockingStatus::Certified | BlockingStatus::Unknown));
        if cert.status == BlockingStatus::Certified {
            prop_assert_eq!(bounded.status, BlockingStatus::NotRefuted);
        }
        if let Some(refutation) = bounded.refutation {
            let (a, b) = refutation.replay(&rule, &query);
            prop_assert_ne!(a, b);
        }
    }
}

#[test]
fn identity_words_are_radius_blocking() {
    let limits = Limits::default();
    let id = Rule::wolfram(204);
    for len in 1..=6 {
        for bits in 0..1u64 << len {
            let word = RegionWord::from_bits(len, bits).unwrap();
            for k in 0..len {
                let query = BlockingQuery::new(word, 1, k, 6).unwrap();
                assert_eq!(certify_p_blocking(&id, &query, &limits).unwrap().status, BlockingStatus::Certified);
                assert_eq!(check_p_blocking_bounded(&id, &query, &limits).unwrap().status, BlockingStatus::NotRefuted);
            }
        }
    }
}
