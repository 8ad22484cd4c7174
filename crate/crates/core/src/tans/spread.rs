use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{AnsError, Result};
use crate::rans::QuantizedDist;
use crate::stream::StreamConfig;

/// Assignment of a symbol to every state of `I = {l, .., b·l - 1}`.
///
/// Symbol `s` appears `(b - 1)·l_s` times, which makes its appearances,
/// enumerated upward from `l_s`, fill exactly `I_s = {l_s, .., b·l_s - 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpreadFunction {
    cfg: StreamConfig,
    symbols: Vec<u32>,
    lowers: Vec<u64>,
}

impl SpreadFunction {
    /// Validates an assignment, `assignment[i]` being the symbol of state `l + i`.
    pub fn new(cfg: StreamConfig, alphabet_size: usize, assignment: Vec<u32>) -> Result<Self> {
        if assignment.len() as u64 != cfg.state_count() {
            return Err(AnsError::InvalidDistribution(format!(
                "spread covers {} states, interval has {}",
                assignment.len(),
                cfg.state_count()
            )));
        }
        let mut counts = vec![0u64; alphabet_size];
        for &s in &assignment {
            *counts
                .get_mut(s as usize)
                .ok_or_else(|| AnsError::InvalidDistribution(format!("symbol {s} outside alphabet")))? +=
                1;
        }
        let step = cfg.b() - 1;
        let mut lowers = Vec::with_capacity(alphabet_size);
        for (s, &c) in counts.iter().enumerate() {
            if c == 0 || c % step != 0 {
                return Err(AnsError::InvalidDistribution(format!(
                    "symbol {s} appears {c} times, need a positive multiple of {step}"
                )));
            }
            lowers.push(c / step);
        }
        Ok(Self {
            cfg,
            symbols: assignment,
            lowers,
        })
    }

    pub fn config(&self) -> StreamConfig {
        self.cfg
    }

    pub fn alphabet_size(&self) -> usize {
        self.lowers.len()
    }

    /// Symbol at state `x ∈ I`.
    pub fn symbol(&self, x: u64) -> usize {
        self.symbols[(x - self.cfg.l()) as usize] as usize
    }

    /// Symbols of `l, .., b·l - 1` in order.
    pub fn assignment(&self) -> &[u32] {
        &self.symbols
    }

    /// `l_s`, the lower end of `I_s`.
    pub fn lowers(&self) -> &[u64] {
        &self.lowers
    }

    /// Frequencies `l_s` as a distribution over `l`.
    pub fn dist(&self) -> QuantizedDist {
        QuantizedDist::new(&self.lowers).expect("validated spread has positive counts")
    }

    /// Text dump: header `l b n l_0 .. l_{n-1}`, then one `x symbol` line per state.
    pub fn dump(&self) -> String {
        let mut out = format!("{} {} {}", self.cfg.l(), self.cfg.b(), self.lowers.len());
        for l in &self.lowers {
            out.push_str(&format!(" {l}"));
        }
        out.push('\n');
        for (i, s) in self.symbols.iter().enumerate() {
            out.push_str(&format!("{} {s}\n", self.cfg.l() + i as u64));
        }
        out
    }

    /// Parses [`dump`](Self::dump) output.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let bad = |what: &str| AnsError::Format(format!("table dump: {what}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<u64> = lines
            .next()
            .ok_or_else(|| bad("missing header"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("non-numeric header")))
            .collect::<Result<_>>()?;
        if header.len() < 3 || header.len() != 3 + header[2] as usize {
            return Err(bad("header must be `l b n l_0 .. l_{n-1}`"));
        }
        let cfg = StreamConfig::new(header[0], header[1])?;
        let mut assignment = Vec::with_capacity(cfg.state_count() as usize);
        for (expected, line) in cfg.states().zip(&mut lines) {
            let mut parts = line.split_whitespace();
            let x: u64 = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("bad state"))?;
            let s: u32 = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| bad("bad symbol"))?;
            if x != expected {
                return Err(bad("states must be listed in ascending order"));
            }
            assignment.push(s);
        }
        let spread = Self::new(cfg, header[2] as usize, assignment)?;
        if spread.lowers != header[3..] {
            return Err(bad("header frequencies disagree with the listed states"));
        }
        Ok(spread)
    }
}

/// A pending position `(2i+1)/(2p_s)` for symbol `s`.
///
/// With `p_s = l_s/l` the value is `(2i+1)·l / (2·l_s)`; comparisons use the
/// cross products `(2i+1)·l_t` against `(2j+1)·l_s`, which are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    /// `2i + 1`.
    pub odd: u64,
    pub freq: u64,
    pub symbol: u32,
}

impl Candidate {
    pub fn first(symbol: u32, freq: u64) -> Self {
        Self { odd: 1, freq, symbol }
    }

    pub fn next(self) -> Self {
        Self {
            odd: self.odd + 2,
            ..self
        }
    }

    fn value_cmp(&self, other: &Self) -> Ordering {
        (self.odd as u128 * other.freq as u128).cmp(&(other.odd as u128 * self.freq as u128))
    }

    /// Queue order: smaller value first; on equal values the less probable
    /// symbol, then the larger symbol index.
    fn queue_cmp(&self, other: &Self) -> Ordering {
        self.value_cmp(other)
            .then(self.freq.cmp(&other.freq))
            .then(other.symbol.cmp(&self.symbol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct MinFirst(Candidate);

impl Ord for MinFirst {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.queue_cmp(&self.0)
    }
}

impl PartialOrd for MinFirst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Priority queue of [`Candidate`]s, one per symbol.
#[derive(Debug, Clone, Default)]
pub struct CandidateQueue {
    heap: BinaryHeap<MinFirst>,
}

impl CandidateQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn put(&mut self, c: Candidate) {
        self.heap.push(MinFirst(c));
    }

    pub fn getmin(&mut self) -> Option<Candidate> {
        self.heap.pop().map(|c| c.0)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

pub(crate) fn check_total(d: &QuantizedDist, cfg: StreamConfig) -> Result<()> {
    if d.total() != cfg.l() {
        return Err(AnsError::FrequencySum {
            expected: cfg.l(),
            actual: d.total(),
        });
    }
    Ok(())
}

/// Precise initialization: each state takes the symbol whose next target
/// position `(2i+1)/(2p_s)` is smallest.
pub fn precise_init(d: &QuantizedDist, cfg: StreamConfig) -> Result<SpreadFunction> {
    check_total(d, cfg)?;
    let mut queue = CandidateQueue::new();
    for s in 0..d.len() {
        queue.put(Candidate::first(s as u32, d.freq(s)));
    }
    let mut assignment = Vec::with_capacity(cfg.state_count() as usize);
    for _ in cfg.states() {
        let c = queue.getmin().expect("queue holds one candidate per symbol");
        assignment.push(c.symbol);
        queue.put(c.next());
    }
    SpreadFunction::new(cfg, d.len(), assignment)
}
