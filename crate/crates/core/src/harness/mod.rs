//! Experiment plumbing behind the `latticeaf` binary. Results come back as a
//! [`CsvTable`] so the library and the CLI print identical bytes.

mod experiment;
mod netfile;
mod seed;
mod table;

pub use experiment::{
    analyze, lattice_info, run_experiment, simulate_isi, simulate_layered, Command,
    ExperimentConfig, LatticeFamily,
};
pub use netfile::{parse_network, parse_network_str};
pub use seed::{derive_trial_seed, TrialSeed};
pub use table::{format_g, Cell, CsvTable};
