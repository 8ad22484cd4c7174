//! Key-dependent tANS tables: a keyed bit generator perturbs precise
//! initialization so that each key selects its own valid spread.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::Result;
use crate::rans::QuantizedDist;
use crate::stream::StreamConfig;
use crate::tans::{check_total, Candidate, CandidateQueue, SpreadFunction};

pub const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
pub const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// `strength` value allowing a swap at every step.
pub const UNLIMITED_STRENGTH: u32 = u32::MAX;

/// Strength used by keyed containers.
pub const DEFAULT_KEY_STRENGTH: u32 = UNLIMITED_STRENGTH;

/// Deterministic bit source derived from key bytes: an FNV-style fold into a
/// 64-bit seed, then splitmix64 words consumed most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySchedule {
    seed: u64,
    state: u64,
    word: u64,
    remaining: u32,
}

impl KeySchedule {
    pub fn new(key: &[u8]) -> Self {
        let seed = key
            .iter()
            .fold(FNV_OFFSET_BASIS, |h, &b| h.wrapping_mul(FNV_PRIME) ^ b as u64);
        Self {
            seed,
            state: seed,
            word: 0,
            remaining: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Next splitmix64 output.
    pub fn next_word(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_bit(&mut self) -> bool {
        if self.remaining == 0 {
            self.word = self.next_word();
            self.remaining = 64;
        }
        self.remaining -= 1;
        (self.word >> self.remaining) & 1 == 1
    }
}

/// Whether the runner-up may take state index `i` (counted from 0 at `l`)
/// in place of the leader. Target positions are `odd·l/(2·l_s)` in units of
/// states: the runner-up's target must lie at most 2 states past `i`, and the
/// leader, pushed to `i + 1` or later, at most 1.5 states before it.
fn may_swap(i: u64, l: u64, leader: &Candidate, runner_up: &Candidate) -> bool {
    let ahead = runner_up.odd as u128 * l as u128 <= 2 * runner_up.freq as u128 * (i as u128 + 2);
    let late = 2 * leader.freq as u128 * (i as u128 + 1) <= leader.odd as u128 * l as u128 + 3 * leader.freq as u128;
    ahead && late
}

/// Precise initialization where a key bit may hand a state to the second
/// best candidate instead of the best one.
///
/// A bit is drawn only at steps where the two candidates are close (see
/// [`may_swap`]) and the swap budget allows it; on 1 the runner-up takes the
/// state. `strength` caps the swaps within each run of `l` consecutive
/// states: 0 reproduces [`precise_init`](crate::tans::precise_init) and
/// [`UNLIMITED_STRENGTH`] removes the cap. A symbol leaves the queue once its
/// `(b-1)·l_s` appearances are placed, so the result is always valid.
pub fn keyed_init(d: &QuantizedDist, cfg: StreamConfig, key: &[u8], strength: u32) -> Result<SpreadFunction> {
    check_total(d, cfg)?;
    let mut bits = KeySchedule::new(key);
    let mut queue = CandidateQueue::new();
    let mut left: Vec<u64> = d.freqs().iter().map(|f| f * (cfg.b() - 1)).collect();
    for s in 0..d.len() {
        queue.put(Candidate::first(s as u32, d.freq(s)));
    }
    let mut assignment = Vec::with_capacity(cfg.state_count() as usize);
    let mut swaps = 0u32;
    for i in 0..cfg.state_count() {
        if i % cfg.l() == 0 {
            swaps = 0;
        }
        let mut chosen = queue.getmin().expect("remaining quota matches remaining states");
        if swaps < strength {
            if let Some(second) = queue.getmin() {
                if may_swap(i, cfg.l(), &chosen, &second) && bits.next_bit() {
                    queue.put(chosen);
                    chosen = second;
                    swaps += 1;
                } else {
                    queue.put(second);
                }
            }
        }
        let s = chosen.symbol as usize;
        assignment.push(chosen.symbol);
        left[s] -= 1;
        if left[s] > 0 {
            queue.put(chosen.next());
        }
    }
    SpreadFunction::new(cfg, d.len(), assignment)
}

/// `2^{l(b-1)}`: the number of binary perturbation patterns over `I`.
pub fn keyspace_size(cfg: StreamConfig) -> BigUint {
    BigUint::one() << (cfg.l() * (cfg.b() - 1))
}
