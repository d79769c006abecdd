use ca_control::trace::{
    approximation_equals_graph, k_approximation, replay_seed, trace_blocks, trace_reach,
};
use ca_control::{Limits, RegionWord, Rule, TransitionGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blocks_replay_from_witness_seeds(code in any::<u8>(), n in 1usize..=4, k in 1usize..=4) {
        let rule = Rule::wolfram(code);
        let lang = trace_blocks(&rule, n, k, &Limits::default()).unwrap();
        for (rows, seed) in lang.blocks() {
            prop_assert_eq!(replay_seed(&rule, n, k, seed.unwrap()), rows);
        }
    }

    #[test]
    fn projections_are_consistent(code in any::<u8>(), n in 1usize..=3, k in 1usize..=4) {
        let rule = Rule::wolfram(code);
        let limits = Limits::default();
        let lower = trace_blocks(&rule, n, k, &limits).unwrap();
        let upper = trace_blocks(&rule, n, k + 1, &limits).unwrap();
        for (rows, _) in upper.blocks() {
            prop_assert!(lower.contains(&rows[..k]));
            prop_assert!(lower.contains(&rows[1..]));
        }
    }

    #[test]
    fn approximations_nest(code in any::<u8>(), n in 1usize..=2, k in 2usize..=4, walk_seed in any::<u64>()) {
        // Random finite walks in the A_{k+1} presentation have every k-window
        // allowed at level k.
        let rule = Rule::wolfram(code);
        let limits = Limits::default();
        let lower = trace_blocks(&rule, n, k, &limits).unwrap();
        let upper = k_approximation(&trace_blocks(&rule, n, k + 1, &limits).unwrap());
        let g = upper.graph();
        let mut rng = ChaCha8Rng::seed_from_u64(walk_seed);
        for _ in 0..8 {
            let mut v = rng.gen_range(0..g.len() as u32);
            let mut seq = upper.vertex_rows(v);
            for _ in 0..10 {
                let succ = g.successors(v);
                if succ.is_empty() {
                    break;
                }
                v = succ[rng.gen_range(0..succ.len())];
                seq.push(*upper.vertex_rows(v).last().unwrap());
            }
            for window in seq.windows(k) {
                prop_assert!(lower.contains(window));
            }
        }
    }

    #[test]
    fn uncontrolled_reach_implies_controlled_reach(
        code in any::<u8>(),
        n in 1usize..=4,
        a in any::<u64>(),
        b in any::<u64>(),
    ) {
        let rule = Rule::wolfram(code);
        let limits = Limits::default();
        let w = RegionWord::from_bits(n, a % (1 << n)).unwrap();
        let u = RegionWord::from_bits(n, b % (1 << n)).unwrap();
        if let Some(t) = trace_reach(&rule, &w, &u, 5, &limits).unwrap() {
            let g = TransitionGraph::build(&rule, n, &limits).unwrap();
            let plan = g.synthesize_control_exact_time(&w, &u, t, &limits).unwrap();
            prop_assert!(plan.is_some());
        }
    }
}

#[test]
fn approximation_identity_sample() {
    let limits = Limits::default();
    for code in (0..=255u8).step_by(7) {
        for n in 1..=3 {
            assert!(approximation_equals_graph(&Rule::wolfram(code), n, &limits).unwrap(), "rule {code} n={n}");
        }
    }
}
