//! Range variants: rABS and rANS.
//!
//! Symbols occupy contiguous ranges of a length-`m` cycle, so
//! `C(s, x) = m·⌊x/l_s⌋ + b_s + (x mod l_s)` and
//! `D(x) = (s, l_s·⌊x/m⌋ + (x mod m) - b_s)` with `s = s(x mod m)`.

use num_rational::Ratio;
use num_traits::Signed;

use crate::error::{AnsError, Result};
use crate::stream::{Codec, DigitStack, StreamCoder, StreamConfig, StreamStep, SymbolRanges};

/// Integer frequencies `l_s ≥ 1` with total `m`, cumulative starts `b_s`
/// and the materialized cycle `s(x)` for `x < m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedDist {
    freqs: Vec<u64>,
    cumul: Vec<u64>,
    total: u64,
    symbol_of: Vec<u32>,
}

/// Largest cycle materialized by [`QuantizedDist`].
pub const MAX_TOTAL: u64 = 1 << 24;

impl QuantizedDist {
    pub fn new(freqs: &[u64]) -> Result<Self> {
        if freqs.is_empty() {
            return Err(AnsError::InvalidDistribution("empty alphabet".into()));
        }
        if let Some(s) = freqs.iter().position(|&f| f == 0) {
            return Err(AnsError::InvalidDistribution(format!("symbol {s} has zero frequency")));
        }
        let total = freqs
            .iter()
            .try_fold(0u64, |acc, &f| acc.checked_add(f))
            .filter(|&t| t <= MAX_TOTAL)
            .ok_or_else(|| AnsError::InvalidDistribution(format!("total exceeds {MAX_TOTAL}")))?;
        let mut cumul = Vec::with_capacity(freqs.len());
        let mut symbol_of = Vec::with_capacity(total as usize);
        let mut start = 0u64;
        for (s, &f) in freqs.iter().enumerate() {
            cumul.push(start);
            symbol_of.extend(std::iter::repeat_n(s as u32, f as usize));
            start += f;
        }
        Ok(Self {
            freqs: freqs.to_vec(),
            cumul,
            total,
            symbol_of,
        })
    }

    pub fn from_u32(freqs: &[u32]) -> Result<Self> {
        Self::new(&freqs.iter().map(|&f| f as u64).collect::<Vec<_>>())
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// `l_s`.
    pub fn freq(&self, s: usize) -> u64 {
        self.freqs[s]
    }

    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }

    /// `b_s`.
    pub fn cumul(&self, s: usize) -> u64 {
        self.cumul[s]
    }

    /// `m = Σ l_s`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// `s(x)` for a cycle position `x < m`.
    pub fn symbol_at(&self, x: u64) -> usize {
        self.symbol_of[x as usize] as usize
    }

    /// `p_s = l_s / m`.
    pub fn probs(&self) -> Vec<f64> {
        self.freqs
            .iter()
            .map(|&f| f as f64 / self.total as f64)
            .collect()
    }

    pub fn ratio(&self, s: usize) -> Ratio<i128> {
        Ratio::new(self.freqs[s] as i128, self.total as i128)
    }
}

/// `C(s, x) = m·⌊x/l_s⌋ + b_s + (x mod l_s)`.
pub fn rans_encode(s: usize, x: u64, d: &QuantizedDist) -> Result<u64> {
    let ls = d.freqs[s];
    (x / ls)
        .checked_mul(d.total)
        .and_then(|v| v.checked_add(d.cumul[s] + x % ls))
        .ok_or(AnsError::Overflow)
}

/// `D(x) = (s, l_s·⌊x/m⌋ + (x mod m) - b_s)`.
#[inline]
pub fn rans_decode(x: u64, d: &QuantizedDist) -> (usize, u64) {
    let pos = x % d.total;
    let s = d.symbol_of[pos as usize] as usize;
    (s, d.freqs[s] * (x / d.total) + pos - d.cumul[s])
}

/// rANS as a [`Codec`].
#[derive(Debug, Clone)]
pub struct Rans {
    dist: QuantizedDist,
}

impl Rans {
    pub fn new(dist: QuantizedDist) -> Self {
        Self { dist }
    }

    pub fn dist(&self) -> &QuantizedDist {
        &self.dist
    }
}

impl Codec for Rans {
    fn alphabet_size(&self) -> usize {
        self.dist.len()
    }

    fn encode(&self, symbol: usize, x: u64) -> Result<u64> {
        rans_encode(symbol, x, &self.dist)
    }

    fn decode(&self, x: u64) -> (usize, u64) {
        rans_decode(x, &self.dist)
    }
}

/// Largest `|ε_s(x)|` over all symbols at one state, next to the `m/x` bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InaccuracyBoundReport {
    pub max_abs_epsilon: Ratio<i128>,
    pub bound: Ratio<i128>,
}

impl InaccuracyBoundReport {
    pub fn holds(&self) -> bool {
        self.max_abs_epsilon < self.bound
    }
}

/// Number of appearances of `s` among states `0..x`.
fn appearances_below(s: usize, x: u64, d: &QuantizedDist) -> u64 {
    let pos = x % d.total;
    let partial = pos.saturating_sub(d.cumul[s]).min(d.freqs[s]);
    d.freqs[s] * (x / d.total) + partial
}

/// `ε_s(x) = x_s/x - p_s` for every symbol, reduced to the worst one. `x ≥ 1`.
pub fn rans_inaccuracy(x: u64, d: &QuantizedDist) -> InaccuracyBoundReport {
    assert!(x >= 1);
    let max_abs_epsilon = (0..d.len())
        .map(|s| (Ratio::new(appearances_below(s, x, d) as i128, x as i128) - d.ratio(s)).abs())
        .max()
        .expect("nonempty alphabet");
    InaccuracyBoundReport {
        max_abs_epsilon,
        bound: Ratio::new(d.total as i128, x as i128),
    }
}

/// Stream rANS over `I = {l, .., b·l - 1}` with `m | l`.
///
/// The symbol ranges have the closed form `I_s = {k·l_s, .., b·k·l_s - 1}`
/// with `k = l/m`, so no enumeration of the (possibly huge) interval is needed.
#[derive(Debug, Clone)]
pub struct RansStream {
    inner: StreamCoder<Rans>,
}

/// Digit base of [`RansStream::standard`].
pub const STANDARD_DIGIT_BITS: u32 = 16;

impl RansStream {
    pub fn new(dist: QuantizedDist, cfg: StreamConfig) -> Result<Self> {
        let m = dist.total();
        if !cfg.l().is_multiple_of(m) {
            return Err(AnsError::InvalidConfig(format!(
                "stream rANS needs m | l, got m={m}, l={}",
                cfg.l()
            )));
        }
        if !cfg.b().is_power_of_two() {
            return Err(AnsError::InvalidConfig(format!(
                "stream rANS needs a power-of-two digit base, got {}",
                cfg.b()
            )));
        }
        let k = cfg.l() / m;
        let lowers: Vec<u64> = dist.freqs().iter().map(|&f| f * k).collect();
        let ranges = SymbolRanges::b_unique(&lowers, cfg.b());
        Ok(Self {
            inner: StreamCoder::with_ranges(Rans::new(dist), cfg, &ranges)?,
        })
    }

    /// `b = 2^16`, `l = m·2^16`.
    pub fn standard(dist: QuantizedDist) -> Result<Self> {
        let l = dist.total() << STANDARD_DIGIT_BITS;
        Self::new(dist, StreamConfig::new(l, 1 << STANDARD_DIGIT_BITS)?)
    }

    pub fn dist(&self) -> &QuantizedDist {
        self.inner.codec().dist()
    }

    pub fn coder(&self) -> &StreamCoder<Rans> {
        &self.inner
    }

    /// Encodes `symbols` in the given order starting from `x = l`.
    pub fn encode(&self, symbols: &[usize]) -> Result<(u64, DigitStack)> {
        let cfg = self.inner.config();
        let mut out = DigitStack::new(cfg.b());
        let mut x = cfg.l();
        for &s in symbols {
            if s >= self.dist().len() {
                return Err(AnsError::OutOfRange(format!("symbol {s} outside alphabet")));
            }
            x = self.inner.encode_step(s, x, &mut out)?;
        }
        Ok((x, out))
    }

    /// Decodes `count` symbols (in reverse encoding order) and checks that
    /// the walk ends at the encoder's initial state.
    pub fn decode(&self, state: u64, digits: &mut DigitStack, count: usize) -> Result<Vec<usize>> {
        let cfg = self.inner.config();
        if !cfg.contains(state) {
            return Err(AnsError::Format(format!("state {state} outside {cfg}")));
        }
        let mut x = state;
        let mut out = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let (s, next) = self.inner.decode_step(x, digits)?;
            out.push(s);
            x = next;
        }
        if x != cfg.l() {
            return Err(AnsError::TerminalState {
                expected: cfg.l(),
                found: x,
            });
        }
        Ok(out)
    }
}

impl StreamStep for RansStream {
    fn config(&self) -> StreamConfig {
        self.inner.config()
    }
    fn alphabet_size(&self) -> usize {
        self.inner.alphabet_size()
    }
    fn encode_step(&self, symbol: usize, x: u64, out: &mut DigitStack) -> Result<u64> {
        self.inner.encode_step(symbol, x, out)
    }
    fn decode_step(&self, x: u64, input: &mut DigitStack) -> Result<(usize, u64)> {
        self.inner.decode_step(x, input)
    }
    fn transition(&self, symbol: usize, x: u64) -> Result<(u64, u32)> {
        self.inner.transition(symbol, x)
    }
    fn decode_state(&self, x: u64) -> (usize, u64) {
        self.inner.decode_state(x)
    }
}

/// Stream-encodes `symbols` in order; see [`RansStream`].
pub fn rans_stream_encode(
    symbols: &[usize],
    d: &QuantizedDist,
    cfg: StreamConfig,
) -> Result<(u64, DigitStack)> {
    RansStream::new(d.clone(), cfg)?.encode(symbols)
}

/// Inverse of [`rans_stream_encode`]; symbols come out in reverse order.
pub fn rans_stream_decode(
    state: u64,
    digits: &mut DigitStack,
    count: usize,
    d: &QuantizedDist,
    cfg: StreamConfig,
) -> Result<Vec<usize>> {
    RansStream::new(d.clone(), cfg)?.decode(state, digits, count)
}
