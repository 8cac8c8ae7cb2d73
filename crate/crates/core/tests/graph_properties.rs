use std::collections::HashMap;

use proptest::prelude::*;
use specdetect::graphs::{GeneratorOptions, generate_two_block_graph_with};
use specdetect::{
    generate_two_block_graph, log_count_graphs, planted_labels, sample_degree_sequence, BlockParams,
    DegreeSpec, GraphError,
};

fn spec_strategy() -> impl Strategy<Value = DegreeSpec> {
    prop_oneof![
        (3u32..8).prop_map(|c| DegreeSpec::Regular { c }),
        (1u32..5, 5u32..10, 0.05f64..0.95).prop_map(|(c1, c2, b1)| DegreeSpec::Bimodal { c1, c2, b1 }),
        (2.0f64..8.0).prop_map(DegreeSpec::poisson),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_keep_their_constraints(
        spec in spec_strategy(),
        n in 40usize..400,
        p1 in 0.3f64..0.7,
        frac in 0.0f64..0.6,
        seed in any::<u64>(),
    ) {
        let cbar = spec.mean_degree();
        let gamma = frac * cbar * p1.min(1.0 - p1);
        let params = BlockParams::new(n, p1, gamma);
        let degrees = match sample_degree_sequence(&spec, &params, seed) {
            Ok(d) => d,
            Err(GraphError::ParityUnrepairable { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let labels = planted_labels(&params);
        match generate_two_block_graph(&degrees, &labels, gamma, seed) {
            Ok(g) => {
                prop_assert_eq!(g.cross_edge_count(), params.cross_edges());
                prop_assert_eq!(&g.degrees, &degrees);
                prop_assert!(g.check_invariants().is_ok());
                prop_assert_eq!(g.module_size(1) + g.module_size(2), n);
            }
            // Small dense modules can lack room for the required edges.
            Err(GraphError::StubImbalance(_)) | Err(GraphError::RepairFailed { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn log_count_is_symmetric_under_module_swap(
        c in 3u32..10,
        p1 in 0.1f64..0.9,
        frac in 0.05f64..0.95,
    ) {
        let spec = DegreeSpec::Regular { c };
        let gamma = frac * c as f64 * p1.min(1.0 - p1);
        let a = log_count_graphs(&spec, &BlockParams::new(1000, p1, gamma)).unwrap();
        let b = log_count_graphs(&spec, &BlockParams::new(1000, 1.0 - p1, gamma)).unwrap();
        prop_assert!((a.log_count - b.log_count).abs() <= 1e-9 * a.log_count.abs().max(1.0));
        prop_assert!((a.q1 - b.q2).abs() < 1e-12 && (a.q2 - b.q1).abs() < 1e-12);
    }
}

#[test]
fn one_thousand_graphs_have_exact_cross_counts_and_degrees() {
    let specs = [
        DegreeSpec::Regular { c: 3 },
        DegreeSpec::Bimodal { c1: 3, c2: 6, b1: 0.5 },
        DegreeSpec::poisson(5.0),
        DegreeSpec::Bimodal { c1: 3, c2: 9, b1: 0.1 },
    ];
    for seed in 0..1000u64 {
        let spec = &specs[(seed % 4) as usize];
        // Even cross counts suit every module parity used here.
        let gamma = (20 + 2 * (seed % 40)) as f64 / 200.0;
        let params = BlockParams::new(200, 0.5, gamma);
        let degrees = sample_degree_sequence(spec, &params, seed).unwrap_or_else(|e| panic!("{spec}: {e}"));
        let g = generate_two_block_graph(&degrees, &planted_labels(&params), gamma, seed).unwrap();
        assert_eq!(g.cross_edge_count(), params.cross_edges(), "seed {seed}");
        assert_eq!(g.degrees, degrees);
        g.check_invariants().unwrap();
    }
}

#[test]
fn regular_odd_cross_parity_is_rejected() {
    // Module stubs 3·5 = 15 are odd, so an even cross count is impossible.
    let params = BlockParams::new(10, 0.5, 0.2);
    assert!(matches!(
        sample_degree_sequence(&DegreeSpec::Regular { c: 3 }, &params, 1),
        Err(GraphError::ParityUnrepairable { .. })
    ));
}

/// All simple graphs on 4 + 4 vertices with the given degrees and `x` cross
/// edges, as sorted edge lists.
fn enumerate(degrees: &[u32], labels: &[u8], x: usize) -> Vec<Vec<(u32, u32)>> {
    let n = degrees.len();
    let pairs: Vec<(u32, u32)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i as u32, j as u32))).collect();
    let mut out = Vec::new();
    let mut left: Vec<i32> = degrees.iter().map(|&d| d as i32).collect();
    let mut chosen = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        k: usize,
        pairs: &[(u32, u32)],
        labels: &[u8],
        left: &mut [i32],
        cross: usize,
        x: usize,
        chosen: &mut Vec<(u32, u32)>,
        out: &mut Vec<Vec<(u32, u32)>>,
    ) {
        if k == pairs.len() {
            if cross == x && left.iter().all(|&d| d == 0) {
                out.push(chosen.clone());
            }
            return;
        }
        let (i, j) = pairs[k];
        // Vertex i sees no pairs after its last one.
        let last_for_i = pairs[k + 1..].iter().all(|&(a, _)| a != i);
        let is_cross = labels[i as usize] != labels[j as usize];
        if left[i as usize] > 0 && left[j as usize] > 0 && (!is_cross || cross < x) {
            left[i as usize] -= 1;
            left[j as usize] -= 1;
            chosen.push((i, j));
            rec(k + 1, pairs, labels, left, cross + is_cross as usize, x, chosen, out);
            chosen.pop();
            left[i as usize] += 1;
            left[j as usize] += 1;
        }
        if !(last_for_i && left[i as usize] > 0) {
            rec(k + 1, pairs, labels, left, cross, x, chosen, out);
        }
    }
    rec(0, &pairs, labels, &mut left, 0, x, &mut chosen, &mut out);
    out
}

#[test]
fn small_ensemble_is_sampled_uniformly() {
    let params = BlockParams::new(8, 0.5, 0.25);
    let labels = planted_labels(&params);
    let degrees = vec![3u32; 8];
    let all = enumerate(&degrees, &labels, params.cross_edges());
    let index: HashMap<Vec<(u32, u32)>, usize> =
        all.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect();
    assert!(all.len() > 10, "ensemble of {} graphs", all.len());

    let draws = 40 * all.len();
    let mut counts = vec![0usize; all.len()];
    let opts = GeneratorOptions::default();
    for seed in 0..draws as u64 {
        let g = generate_two_block_graph_with(&degrees, &labels, 0.25, seed, &opts).unwrap();
        counts[index[&g.edges()]] += 1;
    }
    let expected = draws as f64 / all.len() as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = (all.len() - 1) as f64;
    let z = (chi2 - dof) / (2.0 * dof).sqrt();
    assert!(z < 4.0, "chi2 = {chi2} with {dof} dof (z = {z})");
}

#[test]
fn log_count_grows_with_gamma_below_the_independent_point() {
    let spec = DegreeSpec::Regular { c: 4 };
    let peak = 4.0 * 0.25;
    let gammas: Vec<f64> = (1..=20).map(|k| peak * k as f64 / 20.0).collect();
    let counts: Vec<f64> = gammas
        .iter()
        .map(|&g| log_count_graphs(&spec, &BlockParams::new(10_000, 0.5, g)).unwrap().log_count)
        .collect();
    for w in counts.windows(2) {
        assert!(w[1] > w[0], "{counts:?}");
    }
    let beyond = log_count_graphs(&spec, &BlockParams::new(10_000, 0.5, 1.5)).unwrap().log_count;
    assert!(beyond < counts[19]);
}

#[test]
fn log_count_rejects_empty_modules() {
    let spec = DegreeSpec::Regular { c: 3 };
    assert!(matches!(
        log_count_graphs(&spec, &BlockParams::new(100, 0.5, 1.5)),
        Err(GraphError::InvalidRegion(_))
    ));
}
