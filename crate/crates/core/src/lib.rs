//! Spectral detectability of planted two-block partitions.
//!
//! The crate samples microcanonical two-block random graphs, builds their
//! Laplacians, computes the Fiedler pair with a deflated Lanczos solver and
//! compares the result with three analytical engines: cavity-field population
//! dynamics, effective-medium closed forms and defect-tree localization.

pub mod eigen;
pub mod ema;
pub mod graphs;
pub mod localization;
pub mod operators;
pub mod replica;
pub mod seed;

pub use eigen::{
    dense_spectrum_oracle, ipr, overlap, second_smallest_eigenpair, DenseSpectrum, EigenError,
    EigenResult, LanczosOptions,
};
pub use ema::{
    appendix_c_diagnostic, detectability_threshold, gaussian_fraction_correct, ncut_ema,
    ncut_ema_mean, ratiocut_ema, ratiocut_ema_distribution, regular_solution, sbm_lambda2_curve,
    AppendixC, EmaError, EmaSolution, FractionModel, MomentSet, Threshold, ThresholdModel,
};
pub use graphs::{
    generate_two_block_graph, log_count_graphs, planted_labels, sample_degree_sequence,
    BlockParams, DegreeDistribution, DegreeSpec, EnsembleCount, GraphError, PlantedGraph,
};
pub use localization::{
    band_edge, bulk_damping_factor, localization_compare, localized_mode_ema,
    localized_mode_uniform, minimum_over_radii, Background, Comparison, DefectTree, LocalizationError, LocalizedMode, Winner,
};
pub use operators::{build_laplacian, matvec, zero_mode, LaplacianKind, OperatorError, SparseSymMatrix};
pub use replica::{
    cavity_sweep, element_distribution, evaluate_lambda2, run_population_dynamics, CavityField,
    ElementDistribution, HInit, Histogram, Lambda2Estimate, PdConfig, PdError, PdModel, PdResult,
    Population,
};
