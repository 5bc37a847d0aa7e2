//! Named fixture instances and the random coded-versus-uncoded study.

mod experiment;
mod fixtures;

pub use experiment::{
    evaluate_instance, random_instance, run_experiment, ExperimentConfig, ExperimentReport,
    TrialRecord, TrialStatus,
};
pub use fixtures::{
    fixture, fixture_text, solve_pinned_subset, StoragePin, BUTTERFLY, FIG5, FIXTURE_NAMES,
};
