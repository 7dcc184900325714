//! Experiment generators, the trial runner and result reporting.

pub mod generators;
mod report;
mod runner;
mod spec;

pub use generators::{
    gen_decaying_tt, gen_hilbert, gen_random_cp, gen_sqrt_sum, gen_sum_of_tt, gen_tt_plus_sparse, SigmaProfile,
};
pub use report::{
    emit_csv, median, parse_csv, percentile, plot_data, read_csv, spearman, summarize, write_csv, Summary, CSV_COLUMNS,
};
pub use runner::{run_experiment, run_experiment_with_threads, tensor_seed, trial_seed, ExperimentRecord};
pub use spec::{parse_rank_grid, parse_seed, preset, preset_names, ExperimentSpec, KvConfig, RankSpec, Recipe};
