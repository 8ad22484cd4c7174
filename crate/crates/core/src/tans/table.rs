use crate::error::{AnsError, Result};
use crate::stream::{Codec, DigitRule, DigitStack, StreamConfig, StreamStep};

use super::spread::SpreadFunction;

/// Per-symbol encoding rows: for `x_s ∈ I_s` the state of the `x_s`-th
/// appearance of `s`, plus the digit-count rule `(k_s, X_s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodingTable {
    cfg: StreamConfig,
    rules: Vec<DigitRule>,
    /// `next[offsets[s] + (x_s - l_s)]`
    next: Vec<u64>,
    offsets: Vec<usize>,
    powers: Vec<u64>,
}

impl EncodingTable {
    pub fn config(&self) -> StreamConfig {
        self.cfg
    }

    pub fn rule(&self, symbol: usize) -> DigitRule {
        self.rules[symbol]
    }

    /// `C(s, x_s)` for `x_s ∈ I_s`.
    #[inline]
    pub fn target(&self, symbol: usize, xs: u64) -> u64 {
        self.next[self.offsets[symbol] + (xs - self.rules[symbol].lower) as usize]
    }

    /// `C̄(s, x)` and the number of digits moved, for `x ∈ I`.
    #[inline]
    pub fn step(&self, symbol: usize, x: u64) -> (u64, u32) {
        let k = self.rules[symbol].digits_for(x);
        (self.target(symbol, x / self.powers[k as usize]), k)
    }

    pub fn alphabet_size(&self) -> usize {
        self.rules.len()
    }
}

/// One decoding entry: the state decodes to `symbol`, and the next state is
/// `new_base·b^digit_count + digits`. When `b` does not divide `l` a state
/// may need one digit beyond `digit_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodeEntry {
    pub symbol: u32,
    pub digit_count: u32,
    pub new_base: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodingTable {
    cfg: StreamConfig,
    entries: Vec<DecodeEntry>,
}

impl DecodingTable {
    pub fn config(&self) -> StreamConfig {
        self.cfg
    }

    #[inline]
    pub fn entry(&self, x: u64) -> DecodeEntry {
        self.entries[(x - self.cfg.l()) as usize]
    }

    pub fn entries(&self) -> &[DecodeEntry] {
        &self.entries
    }
}

/// Encoding and decoding tables built from one spread.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TansTables {
    pub encoding: EncodingTable,
    pub decoding: DecodingTable,
}

/// Enumerates the appearances of each symbol upward from `l_s`.
pub fn build_tables(spread: &SpreadFunction) -> TansTables {
    let cfg = spread.config();
    let lowers = spread.lowers();
    let rules: Vec<DigitRule> = lowers.iter().map(|&lo| DigitRule::new(lo, cfg)).collect();
    let step = cfg.b() - 1;
    let mut offsets = Vec::with_capacity(lowers.len());
    let mut acc = 0usize;
    for &lo in lowers {
        offsets.push(acc);
        acc += (lo * step) as usize;
    }
    let mut next = vec![0u64; acc];
    let mut cursor: Vec<u64> = lowers.to_vec();
    let mut entries = Vec::with_capacity(cfg.state_count() as usize);
    for x in cfg.states() {
        let s = spread.symbol(x);
        let xs = cursor[s];
        cursor[s] += 1;
        next[offsets[s] + (xs - lowers[s]) as usize] = x;
        // fewest digits after which some continuation lands in I:
        // (x_s + 1)·b^k > l
        let mut digit_count = 0;
        let mut top = xs + 1;
        while top <= cfg.l() {
            top *= cfg.b();
            digit_count += 1;
        }
        entries.push(DecodeEntry {
            symbol: s as u32,
            digit_count,
            new_base: xs,
        });
    }
    let max_k = rules.iter().map(|r| r.k).max().unwrap_or(0);
    TansTables {
        encoding: EncodingTable {
            cfg,
            rules,
            next,
            offsets,
            powers: (0..=max_k).map(|k| cfg.b().pow(k)).collect(),
        },
        decoding: DecodingTable { cfg, entries },
    }
}

impl TansTables {
    pub fn from_spread(spread: &SpreadFunction) -> Self {
        build_tables(spread)
    }

    /// Encodes `symbols` in the given order from `x = l`.
    pub fn encode(&self, symbols: &[usize]) -> Result<(u64, DigitStack)> {
        let cfg = self.config();
        let mut out = DigitStack::new(cfg.b());
        let mut x = cfg.l();
        for &s in symbols {
            if s >= self.encoding.alphabet_size() {
                return Err(AnsError::OutOfRange(format!("symbol {s} outside alphabet")));
            }
            x = self.encode_step(s, x, &mut out)?;
        }
        Ok((x, out))
    }

    /// Decodes `count` symbols (reverse encoding order) and checks that the
    /// walk ends at `l`.
    pub fn decode(&self, state: u64, digits: &mut DigitStack, count: usize) -> Result<Vec<usize>> {
        let cfg = self.config();
        if !cfg.contains(state) {
            return Err(AnsError::Format(format!("state {state} outside {cfg}")));
        }
        let mut x = state;
        let mut out = Vec::with_capacity(count.min(1 << 20));
        for _ in 0..count {
            let (s, next) = self.decode_step(x, digits)?;
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

impl StreamStep for TansTables {
    fn config(&self) -> StreamConfig {
        self.encoding.cfg
    }

    fn alphabet_size(&self) -> usize {
        self.encoding.alphabet_size()
    }

    fn encode_step(&self, symbol: usize, x: u64, out: &mut DigitStack) -> Result<u64> {
        let k = self.encoding.rules[symbol].digits_for(x);
        let scale = self.encoding.powers[k as usize];
        out.push_value(x % scale, k);
        Ok(self.encoding.target(symbol, x / scale))
    }

    fn decode_step(&self, x: u64, input: &mut DigitStack) -> Result<(usize, u64)> {
        let e = self.decoding.entry(x);
        let cfg = self.config();
        let mut next = e.new_base * cfg.b().pow(e.digit_count) + input.pop_value(e.digit_count)?;
        while next < cfg.l() {
            next = next * cfg.b() + input.pop()? as u64;
        }
        Ok((e.symbol as usize, next))
    }

    fn transition(&self, symbol: usize, x: u64) -> Result<(u64, u32)> {
        Ok(self.encoding.step(symbol, x))
    }

    fn decode_state(&self, x: u64) -> (usize, u64) {
        let e = self.decoding.entry(x);
        (e.symbol as usize, e.new_base)
    }
}

/// The tables as a [`Codec`] restricted to `I` (decode) and the `I_s` (encode).
impl Codec for TansTables {
    fn alphabet_size(&self) -> usize {
        self.encoding.alphabet_size()
    }

    fn encode(&self, symbol: usize, x: u64) -> Result<u64> {
        let rule = self.encoding.rules[symbol];
        let span = rule.lower * (self.config().b() - 1);
        if x < rule.lower || x - rule.lower >= span {
            return Err(AnsError::OutOfRange(format!("x={x} outside I_{symbol}")));
        }
        Ok(self.encoding.target(symbol, x))
    }

    fn decode(&self, x: u64) -> (usize, u64) {
        self.decode_state(x)
    }
}
