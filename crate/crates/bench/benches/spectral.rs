use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use specdetect::{
    build_laplacian, cavity_sweep, generate_two_block_graph, localized_mode_ema, planted_labels,
    ratiocut_ema, regular_solution, sample_degree_sequence, second_smallest_eigenpair, zero_mode,
    Background, BlockParams, CavityField, DefectTree, DegreeSpec, LaplacianKind, PdConfig, PdModel,
    Population,
};

fn planted(spec: &DegreeSpec, n: usize, p1: f64, gamma: f64, seed: u64) -> specdetect::PlantedGraph {
    let params = BlockParams::new(n, p1, gamma);
    let degrees = sample_degree_sequence(spec, &params, seed).unwrap();
    generate_two_block_graph(&degrees, &planted_labels(&params), gamma, seed).unwrap()
}

fn generator(c: &mut Criterion) {
    let spec = DegreeSpec::Bimodal { c1: 3, c2: 9, b1: 0.5 };
    let params = BlockParams::new(10_000, 0.6, 0.3);
    let labels = planted_labels(&params);
    let degrees = sample_degree_sequence(&spec, &params, 1).unwrap();
    c.bench_function("generate bimodal n=1e4", |b| {
        b.iter(|| generate_two_block_graph(black_box(&degrees), &labels, 0.3, 7).unwrap())
    });
}

fn lanczos(c: &mut Criterion) {
    let mut group = c.benchmark_group("fiedler pair n=1e4");
    group.sample_size(10);
    for (name, gamma) in [("detectable", 0.1), ("plateau", 0.4)] {
        let g = planted(&DegreeSpec::Regular { c: 3 }, 10_000, 0.5, gamma, 3);
        let m = build_laplacian(&g, LaplacianKind::Unnormalized).unwrap();
        let z = zero_mode(&g, LaplacianKind::Unnormalized);
        group.bench_function(name, |b| b.iter(|| second_smallest_eigenpair(&m, &z, 11).unwrap()));
    }
    group.finish();
}

fn population_sweep(c: &mut Criterion) {
    let config = PdConfig::new(PdModel::RegularL, DegreeSpec::Regular { c: 3 }, 0.5, 0.1, 5);
    let p = 10_000;
    let side = |s: f64| vec![CavityField { a: 0.6, h: s }; p];
    let pop = Population {
        cavity: [side(1.0), side(-1.0)],
        conjugate: [vec![CavityField { a: -0.375, h: 0.6 }; p], vec![CavityField { a: -0.375, h: -0.6 }; p]],
    };
    c.bench_function("cavity sweep P=1e4", |b| {
        b.iter_batched(
            || ChaCha8Rng::seed_from_u64(9),
            |mut rng| cavity_sweep(&pop, &config, 0.8, &mut rng).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

fn closed_forms(c: &mut Criterion) {
    let spec = DegreeSpec::Bimodal { c1: 3, c2: 9, b1: 0.1 };
    c.bench_function("regular_solution", |b| b.iter(|| regular_solution(3, 0.5, black_box(0.1)).unwrap()));
    c.bench_function("ratiocut_ema bimodal", |b| b.iter(|| ratiocut_ema(&spec, 0.6, black_box(0.3)).unwrap()));
    let tree = DefectTree { c_d: 3, g: 1, background: Background::Ema { spec: spec.clone(), p1: 0.6, gamma: 0.3 } };
    c.bench_function("localized_mode_ema g=1", |b| {
        b.iter(|| localized_mode_ema(LaplacianKind::Unnormalized, black_box(&tree)))
    });
}

criterion_group!(benches, generator, lanczos, population_sweep, closed_forms);
criterion_main!(benches);
