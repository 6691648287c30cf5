use picturedef::plumbing::{blow_down_step, reduce, reduce_by};
use picturedef::resolution::{exceptional_graph, extend_cluster, marking, sandwiched_graph};
use picturedef::{MBigRule, ResolutionError};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::random_germ;

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn extended_chains_realize_the_decoration(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(g) = random_germ(&mut rng, 7, 4) else { return Ok(()) };
        let ext = extend_cluster(&g).unwrap();
        for i in 0..g.branch_count() {
            let sum: u64 = ext.chain_multiplicities(i).iter().sum();
            prop_assert_eq!(sum, g.decoration()[i]);
            for &p in ext.chain(i) {
                if ext.is_appended(p) {
                    prop_assert!(!ext.is_satellite(p));
                    prop_assert_eq!((0..g.branch_count()).filter(|&k| ext.chain(k).contains(&p)).count(), 1);
                }
            }
        }
    }

    #[test]
    fn full_graph_blows_down_to_nothing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(g) = random_germ(&mut rng, 7, 4) else { return Ok(()) };
        let graph = exceptional_graph(&extend_cluster(&g).unwrap());
        prop_assert!(reduce(&graph.tree).is_smooth(), "{}", graph.to_text());
        let mut order = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let random = reduce_by(&graph.tree, |e| e[order.gen_range(0..e.len())]);
        prop_assert!(random.is_smooth());
    }

    #[test]
    fn standard_germs_attach_once(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(g) = random_germ(&mut rng, 7, 4) else { return Ok(()) };
        if !g.is_standard(MBigRule::default()) {
            return Ok(());
        }
        let graph = exceptional_graph(&extend_cluster(&g).unwrap());
        if graph.ecl_vertices().is_empty() {
            // the smooth-point case has nothing to attach to
            return Ok(());
        }
        for &e in &graph.attach {
            prop_assert_eq!(graph.tree.weight(e), -1);
            prop_assert_eq!(graph.tree.neighbors(e).filter(|&u| graph.in_ecl[u]).count(), 1);
        }
        let m = marking(&g).unwrap();
        prop_assert_eq!(m.pieces.len(), g.branch_count());
        prop_assert!(sandwiched_graph(&g).unwrap().negative_definite);
    }

    #[test]
    fn contracting_the_tails_adds_one_per_neighbour(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(g) = random_germ(&mut rng, 7, 4) else { return Ok(()) };
        let graph = exceptional_graph(&extend_cluster(&g).unwrap());
        let original = graph.tree.clone();
        // contract E_i and appended points while any of them is eligible,
        // predicting the weight change of the survivors
        let mut t = original.clone();
        let mut expected: Vec<i64> = original.weights().to_vec();
        loop {
            let pick = (0..t.len()).find(|&v| {
                let orig = original.index_of(t.label(v)).unwrap();
                !graph.in_ecl[orig] && t.weight(v) == -1 && t.valence(v) <= 2
            });
            let Some(v) = pick else { break };
            for u in t.neighbors(v) {
                expected[original.index_of(t.label(u)).unwrap()] += 1;
            }
            t = blow_down_step(&t, v).unwrap();
        }
        for v in 0..t.len() {
            prop_assert_eq!(t.weight(v), expected[original.index_of(t.label(v)).unwrap()]);
        }
    }
}

#[test]
fn empty_graph_is_reported() {
    let g = picturedef::germ::samples::smooth_branch(1);
    assert_eq!(sandwiched_graph(&g).unwrap_err(), ResolutionError::EmptyGraph);
    assert!(ResolutionError::EmptyGraph.to_string().ends_with("X(C,l) is a smooth point"));
}
