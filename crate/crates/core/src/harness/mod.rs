//! Statistics and experiment drivers.

pub mod experiment;
pub mod plot;
pub mod stats;

pub use experiment::{
    run_decryption_curve, run_experiment, run_matched_isd_benchmark, Assertion, AssertionOutcome,
    content_hash, DecryptionRow, ExperimentKind, ExperimentReport, ExperimentSpec, Grid, IsdAttack, IsdRow, IsdSettings, NoiseSpec, Rows,
};
pub use stats::{
    advantage, chi_square_gof, empirical_tv, empirical_tv_counts, exact_tv, newcombe_difference,
    tv_to_exact, tv_to_exact_counts, wilson, ChiSquare, StatSummary, MAX_OUTCOMES,
};
