//! Coders as Markov chains: stationary state distributions, expected cost,
//! redundancy, theoretical bounds and CSV reports.

mod automaton;
mod csv;
mod entropy;
mod stationary;
mod sweep;

pub use automaton::{AutomatonSpec, MAX_AUTOMATON_STATES};
pub(crate) use automaton::validate_probs;
pub use csv::{emit_csv, format_sig, CsvTable, SIGNIFICANT_DIGITS};
pub use entropy::{
    delta_h, delta_h_with, expected_bits, inverse_x_fit, kl_distance, rans_bound, shannon_entropy,
    tans_bound, uabs_bound, EntropyReport, InverseXFit, KlReport,
};
pub(crate) use stationary::solve_dense;
pub use stationary::{stationary_direct, stationary_distribution, StationaryDist, DAMPING, MAX_ITERATIONS};
pub use sweep::{
    qabs_table, quantize_probs, random_dist_sweep, random_freqs, stationary_table, tans_automaton, tans_sweep,
    uabs_automaton, uabs_sweep,
};
