//! Asymmetric numeral systems: uABS, rANS and tANS coders on a common
//! streaming framework, an analysis engine for their redundancy, and the
//! `ANS1` container used by the `ans` command-line tool.
//!
//! Coders work in exact integer and rational arithmetic. The analysis layer
//! is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix it to
//! one of the two.

pub mod analysis;
pub mod container;
pub mod error;
pub mod keyed;
pub mod rans;
pub mod scalar;
pub mod stream;
pub mod tans;
pub mod uabs;

pub use error::{AnsError, Result};
pub use rans::QuantizedDist;
pub use scalar::Scalar;
pub use stream::{DigitStack, StreamConfig};
pub use tans::{precise_init, SpreadFunction, TansTables};
pub use uabs::{BinaryProb, UabsVariant};

pub type AutomatonSpec64 = analysis::AutomatonSpec<f64>;
pub type AutomatonSpec32 = analysis::AutomatonSpec<f32>;
pub type StationaryDist64 = analysis::StationaryDist<f64>;
pub type StationaryDist32 = analysis::StationaryDist<f32>;
pub type EntropyReport64 = analysis::EntropyReport<f64>;
pub type EntropyReport32 = analysis::EntropyReport<f32>;
pub type SpreadScorer64 = tans::SpreadScorer<f64>;
pub type SearchResult64 = tans::SearchResult<f64>;
pub type QabsFamily64 = tans::QabsFamily<f64>;
