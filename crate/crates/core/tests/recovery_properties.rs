use graphmix::graph::{FeatureBasis, NodeFeaturedGraph};
use graphmix::mixer::mix_pair;
use graphmix::recovery::{edge_solutions, recover_pair, EdgeRecovery, RecoveryMode};
use ndarray::Array2;
use proptest::prelude::*;

fn graph_strategy(max_n: usize, d: usize) -> impl Strategy<Value = NodeFeaturedGraph> {
    (1..=max_n).prop_flat_map(move |n| {
        (
            proptest::collection::vec(0..d, n),
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2),
        )
            .prop_map(move |(labels, bits)| {
                let mut v = Array2::zeros((n, d));
                for (i, &l) in labels.iter().enumerate() {
                    v[[i, l]] = 1.0;
                }
                let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
                let edges: Vec<_> = pairs.zip(&bits).filter(|(_, &b)| b).map(|(p, _)| p).collect();
                NodeFeaturedGraph::from_edges(v, &edges).unwrap()
            })
    })
}

fn one_hot_basis(d: usize) -> FeatureBasis {
    let vocab = (0..d)
        .map(|k| (0..d).map(|j| f64::from(u8::from(j == k))).collect())
        .collect();
    FeatureBasis::from_vocabulary(vocab, d).unwrap()
}

fn ratio() -> impl Strategy<Value = f64> {
    prop_oneof![0.01f64..0.499, 0.501f64..0.99]
}

proptest! {
    #[test]
    fn mix_then_recover_round_trips(a in graph_strategy(10, 4), b in graph_strategy(10, 4), lambda in ratio()) {
        prop_assume!(a != b);
        let mixed = mix_pair(&a, &b, lambda).unwrap();
        let rec = recover_pair(&mixed, &one_hot_basis(4), RecoveryMode::Independent, 1e-9).unwrap();
        prop_assert!(rec.matches(&a, &b, lambda, 1e-9));
        let l = rec.lambda.unwrap();
        prop_assert!(l > 0.5);
        let remix = mix_pair(&rec.graph_a, &rec.graph_b, l).unwrap();
        let remix = remix.with_dummy_nodes(mixed.num_nodes() - remix.num_nodes());
        let err = remix.weights.iter().zip(mixed.weights.iter()).chain(remix.features.iter().zip(mixed.features.iter()))
            .map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-9);
    }

    #[test]
    fn edge_solutions_are_closed_under_swap(a in graph_strategy(7, 1), b in graph_strategy(7, 1), lambda in ratio()) {
        let mixed = mix_pair(&a, &b, lambda).unwrap();
        match edge_solutions(&mixed.weights, 1e-9).unwrap() {
            EdgeRecovery::Mirrored([lo, hi]) => {
                prop_assert!((lo.s + hi.s - 1.0).abs() <= 1e-12);
                prop_assert_eq!(&lo.e, &hi.e_prime);
                prop_assert_eq!(&lo.e_prime, &hi.e);
                for sol in [&lo, &hi] {
                    let recon = &sol.e * sol.s + &sol.e_prime * (1.0 - sol.s);
                    prop_assert!(recon.iter().zip(mixed.weights.iter()).all(|(x, y)| (x - y).abs() <= 1e-9));
                    let n = mixed.num_nodes();
                    prop_assert_eq!(sol.partition.len(), n * (n - 1) / 2);
                    prop_assert!(sol.e.iter().chain(sol.e_prime.iter()).all(|&x| x == 0.0 || x == 1.0));
                    prop_assert_eq!(&sol.e.t(), &sol.e.view());
                }
            }
            EdgeRecovery::Degenerate { e } => {
                let (pa, pb) = graphmix::graph::pad_pair(&a, &b).unwrap();
                prop_assert_eq!(&pa.weights, &pb.weights);
                prop_assert_eq!(e, pa.weights);
            }
        }
    }

    /// Recovery sees only the mixed graph: the same input always gives the
    /// same output, whichever labels the sources carried.
    #[test]
    fn recovery_is_a_function_of_the_mixed_graph(a in graph_strategy(8, 3), b in graph_strategy(8, 3), lambda in ratio()) {
        prop_assume!(a != b);
        let mixed = mix_pair(&a, &b, lambda).unwrap();
        let basis = one_hot_basis(3);
        let r1 = recover_pair(&mixed, &basis, RecoveryMode::Independent, 1e-9).unwrap();
        let r2 = recover_pair(&mixed.clone(), &basis, RecoveryMode::Independent, 1e-9).unwrap();
        prop_assert_eq!(r1, r2);
    }
}
