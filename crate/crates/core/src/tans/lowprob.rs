use crate::error::{AnsError, Result};
use crate::stream::StreamConfig;

use super::spread::SpreadFunction;
use super::table::TansTables;

/// Binary coder for a rare symbol 1 of probability `p`: the spread is
/// `0 0 .. 0 1` over `l = round(0.5/p)` states. Symbol 0 walks the state up by
/// one and wraps to `l` with a single digit; symbol 1 jumps to `2l - 1`
/// emitting all but the leading bit of the state.
#[derive(Debug, Clone, PartialEq)]
pub struct LowProbCoder {
    pub p: f64,
    pub spread: SpreadFunction,
    pub tables: TansTables,
}

impl LowProbCoder {
    pub fn config(&self) -> StreamConfig {
        self.spread.config()
    }
}

pub fn low_prob_coder(p: f64) -> Result<LowProbCoder> {
    if !(p > 0.0 && p < 0.05) {
        return Err(AnsError::OutOfRange(format!("p = {p} outside (0, 0.05)")));
    }
    let l = (0.5 / p).round() as u64;
    let cfg = StreamConfig::binary(l)?;
    let mut assignment = vec![0u32; l as usize];
    assignment[l as usize - 1] = 1;
    let spread = SpreadFunction::new(cfg, 2, assignment)?;
    let tables = TansTables::from_spread(&spread);
    Ok(LowProbCoder { p, spread, tables })
}
