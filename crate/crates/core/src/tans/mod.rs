//! Tabled ANS: spread construction, table building, searches over spreads
//! and small binary automata.

mod lowprob;
mod search;
mod spread;
mod table;

pub use lowprob::{low_prob_coder, LowProbCoder};
pub use search::{
    exhaustive_search, multinomial, qabs_family, QabsFamily, SearchResult, SpreadScorer,
    DEFAULT_SEARCH_BUDGET, TIE_TOLERANCE,
};
pub use spread::{precise_init, Candidate, CandidateQueue, SpreadFunction};
pub(crate) use spread::check_total;
pub use table::{build_tables, DecodeEntry, DecodingTable, EncodingTable, TansTables};
