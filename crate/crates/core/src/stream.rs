//! Finite-state stream coding.
//!
//! A stream coder keeps its state inside `I = {l, .., b·l - 1}`. Before a
//! symbol `s` is encoded, the least significant base-`b` digits of the state
//! are moved to a [`DigitStack`] until the state lies in
//! `I_s = {l_s, .., b·l_s - 1}`; the decoder undoes this by pulling digits
//! back until the state is again inside `I`. This only works when every `I_s`
//! has that `b`-unique shape, which [`compute_symbol_ranges`] and
//! [`check_b_unique`] verify for any [`Codec`].

use std::fmt;

use crate::error::{AnsError, Result};
use crate::uabs::BinaryProb;

/// Coding and decoding functions `C(s, x)` and `D(x)` of an unbounded ANS.
///
/// Implementations must be mutually inverse on the states they are asked
/// about: `decode(encode(s, x)) == (s, x)`.
pub trait Codec {
    fn alphabet_size(&self) -> usize;

    /// `C(s, x)`: the `x`-th state carrying symbol `s`.
    fn encode(&self, symbol: usize, x: u64) -> Result<u64>;

    /// `D(x) = (s, x_s)`.
    fn decode(&self, x: u64) -> (usize, u64);
}

impl<C: Codec + ?Sized> Codec for &C {
    fn alphabet_size(&self) -> usize {
        (**self).alphabet_size()
    }
    fn encode(&self, symbol: usize, x: u64) -> Result<u64> {
        (**self).encode(symbol, x)
    }
    fn decode(&self, x: u64) -> (usize, u64) {
        (**self).decode(x)
    }
}

/// The state interval `I = {l, .., b·l - 1}` and digit base `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamConfig {
    l: u64,
    b: u64,
}

impl StreamConfig {
    pub fn new(l: u64, b: u64) -> Result<Self> {
        if l == 0 {
            return Err(AnsError::InvalidConfig("l must be positive".into()));
        }
        if b < 2 || b > u32::MAX as u64 + 1 {
            return Err(AnsError::InvalidConfig(format!("digit base {b} out of range")));
        }
        if l.checked_mul(b).is_none() {
            return Err(AnsError::InvalidConfig(format!("b·l overflows for l={l}, b={b}")));
        }
        Ok(Self { l, b })
    }

    /// Binary digits over `I = {l, .., 2l - 1}`.
    pub fn binary(l: u64) -> Result<Self> {
        Self::new(l, 2)
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// One past the largest state, `b·l`.
    pub fn upper(&self) -> u64 {
        self.l * self.b
    }

    /// `|I| = (b - 1)·l`.
    pub fn state_count(&self) -> u64 {
        self.upper() - self.l
    }

    pub fn contains(&self, x: u64) -> bool {
        x >= self.l && x < self.upper()
    }

    pub fn states(&self) -> std::ops::Range<u64> {
        self.l..self.upper()
    }

    /// `log2(b)` when the base is a power of two.
    pub fn digit_bits(&self) -> Option<u32> {
        self.b.is_power_of_two().then(|| self.b.trailing_zeros())
    }
}

impl fmt::Display for StreamConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I={{{}..{}}}, b={}", self.l, self.upper() - 1, self.b)
    }
}

/// LIFO buffer of base-`b` digits shared by an encoder (push) and a decoder
/// (pop).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitStack {
    base: u64,
    digits: Vec<u32>,
}

impl DigitStack {
    pub fn new(base: u64) -> Self {
        assert!(base >= 2, "digit base must be at least 2");
        Self {
            base,
            digits: Vec::new(),
        }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digits in production order.
    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Total size of the stored digits in bits, `len · ⌈lg b⌉`.
    pub fn bit_length(&self) -> u64 {
        let width = 64 - (self.base - 1).leading_zeros() as u64;
        self.digits.len() as u64 * width
    }

    pub fn push(&mut self, digit: u32) {
        debug_assert!((digit as u64) < self.base);
        self.digits.push(digit);
    }

    pub fn pop(&mut self) -> Result<u32> {
        self.digits.pop().ok_or(AnsError::DigitUnderflow)
    }

    /// Pushes the `count` lowest digits of `value`, least significant first.
    pub fn push_value(&mut self, mut value: u64, count: u32) {
        for _ in 0..count {
            self.digits.push((value % self.base) as u32);
            value /= self.base;
        }
        debug_assert_eq!(value, 0);
    }

    /// Pops `count` digits and assembles them most significant first, undoing
    /// [`push_value`](Self::push_value).
    pub fn pop_value(&mut self, count: u32) -> Result<u64> {
        if (count as usize) > self.digits.len() {
            return Err(AnsError::DigitUnderflow);
        }
        let mut value = 0u64;
        for _ in 0..count {
            let d = self.digits.pop().ok_or(AnsError::DigitUnderflow)?;
            value = value * self.base + d as u64;
        }
        Ok(value)
    }

    /// Serializes for a forward-reading decoder: the most recently pushed
    /// digit comes first, each digit occupies `lg b` bits written least
    /// significant bit first, and bits fill each byte from bit 0 upward.
    /// The last byte is zero-padded. Returns the bytes and the bit count.
    pub fn to_bytes(&self) -> Result<(Vec<u8>, u64)> {
        let width = self.power_of_two_width()?;
        let total_bits = self.digits.len() as u64 * width as u64;
        let mut out = vec![0u8; total_bits.div_ceil(8) as usize];
        let mut pos = 0u64;
        for &digit in self.digits.iter().rev() {
            for bit in 0..width {
                if (digit >> bit) & 1 == 1 {
                    out[(pos / 8) as usize] |= 1 << (pos % 8);
                }
                pos += 1;
            }
        }
        Ok((out, total_bits))
    }

    /// Inverse of [`to_bytes`](Self::to_bytes). Rejects a length mismatch and
    /// nonzero padding.
    pub fn from_bytes(bytes: &[u8], payload_bits: u64, base: u64) -> Result<Self> {
        let mut stack = Self::new(base);
        let width = stack.power_of_two_width()? as u64;
        if !payload_bits.is_multiple_of(width) {
            return Err(AnsError::Format(format!(
                "payload of {payload_bits} bits is not a whole number of {width}-bit digits"
            )));
        }
        let expected = payload_bits.div_ceil(8);
        if bytes.len() as u64 != expected {
            return Err(AnsError::Format(format!(
                "payload holds {} bytes, header declares {expected}",
                bytes.len()
            )));
        }
        let count = (payload_bits / width) as usize;
        let mut digits = Vec::with_capacity(count);
        let mut pos = 0u64;
        for _ in 0..count {
            let mut digit = 0u32;
            for bit in 0..width {
                let b = (bytes[(pos / 8) as usize] >> (pos % 8)) & 1;
                digit |= (b as u32) << bit;
                pos += 1;
            }
            digits.push(digit);
        }
        if !pos.is_multiple_of(8) && (bytes[(pos / 8) as usize] >> (pos % 8)) != 0 {
            return Err(AnsError::Format("nonzero padding after the last digit".into()));
        }
        digits.reverse();
        stack.digits = digits;
        Ok(stack)
    }

    fn power_of_two_width(&self) -> Result<u32> {
        if self.base.is_power_of_two() {
            Ok(self.base.trailing_zeros())
        } else {
            Err(AnsError::InvalidConfig(format!(
                "serialization needs a power-of-two base, got {}",
                self.base
            )))
        }
    }
}

/// Inclusive interval `I_s = {lower, .., upper}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolRange {
    pub lower: u64,
    pub upper: u64,
}

impl SymbolRange {
    pub fn len(&self) -> u64 {
        self.upper - self.lower + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: u64) -> bool {
        x >= self.lower && x <= self.upper
    }

    /// `{lower, .., b·lower - 1}`?
    pub fn is_b_unique(&self, b: u64) -> bool {
        self.lower
            .checked_mul(b)
            .is_some_and(|top| top == self.upper + 1)
    }
}

/// Per-symbol preimages `I_s = {x : C(s, x) ∈ I}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolRanges {
    ranges: Vec<SymbolRange>,
}

impl SymbolRanges {
    pub fn from_ranges(ranges: Vec<SymbolRange>) -> Self {
        Self { ranges }
    }

    /// `I_s = {l_s, .., b·l_s - 1}` for each `l_s`.
    pub fn b_unique(lowers: &[u64], b: u64) -> Self {
        Self {
            ranges: lowers
                .iter()
                .map(|&lo| SymbolRange {
                    lower: lo,
                    upper: lo * b - 1,
                })
                .collect(),
        }
    }

    pub fn get(&self, symbol: usize) -> SymbolRange {
        self.ranges[symbol]
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SymbolRange> {
        self.ranges.iter()
    }

    pub fn lowers(&self) -> Vec<u64> {
        self.ranges.iter().map(|r| r.lower).collect()
    }
}

/// Finds every `I_s` by decoding each state of `I`. Fails when some symbol
/// never occurs in `I` or its preimage has holes.
pub fn compute_symbol_ranges<C: Codec + ?Sized>(codec: &C, cfg: StreamConfig) -> Result<SymbolRanges> {
    let n = codec.alphabet_size();
    let mut bounds: Vec<Option<(u64, u64, u64)>> = vec![None; n];
    for x in cfg.states() {
        let (s, xs) = codec.decode(x);
        let entry = bounds
            .get_mut(s)
            .ok_or_else(|| AnsError::InvalidConfig(format!("decoded symbol {s} outside alphabet")))?;
        *entry = Some(match *entry {
            None => (xs, xs, 1),
            Some((lo, hi, count)) => (lo.min(xs), hi.max(xs), count + 1),
        });
    }
    let mut ranges = Vec::with_capacity(n);
    for (symbol, b) in bounds.into_iter().enumerate() {
        let (lower, upper, count) = b.ok_or(AnsError::NonContiguousRange { symbol })?;
        if upper - lower + 1 != count {
            return Err(AnsError::NonContiguousRange { symbol });
        }
        ranges.push(SymbolRange { lower, upper });
    }
    Ok(SymbolRanges { ranges })
}

/// Whether each `I_s` has the form `{l_s, .., b·l_s - 1}`.
pub fn check_b_unique(ranges: &SymbolRanges, b: u64) -> Vec<bool> {
    ranges.iter().map(|r| r.is_b_unique(b)).collect()
}

/// Stream uABS validity for the ceiling variant: `b·⌈lp⌉ = ⌈b·l·p⌉`.
pub fn check_uabs_condition(p: BinaryProb, cfg: StreamConfig) -> bool {
    check_uabs_condition_for(p, cfg, crate::uabs::UabsVariant::Ceiling)
}

/// Variant-aware form of [`check_uabs_condition`]; the floor variant needs
/// `b·⌊lp⌋ = ⌊b·l·p⌋`.
pub fn check_uabs_condition_for(
    p: BinaryProb,
    cfg: StreamConfig,
    variant: crate::uabs::UabsVariant,
) -> bool {
    let l = cfg.l() as u128;
    let b = cfg.b() as u128;
    let (num, den) = (p.num() as u128, p.den() as u128);
    // l_1 = |{x < l : s̄(x) = 1}|; both symbols need a nonempty I_s
    let (l1, top1) = match variant {
        crate::uabs::UabsVariant::Ceiling => ((l * num).div_ceil(den), (b * l * num).div_ceil(den)),
        crate::uabs::UabsVariant::Floor => (l * num / den, b * l * num / den),
    };
    l1 >= 1 && l1 < l && b * l1 == top1
}

/// Per-symbol digit-count rule: `k_s - 1` digits below `X_s = l_s·b^{k_s}`
/// and `k_s` digits from there up to `b·l - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DigitRule {
    pub lower: u64,
    pub k: u32,
    pub threshold: u64,
}

impl DigitRule {
    pub fn new(lower: u64, cfg: StreamConfig) -> Self {
        let top = cfg.upper() - 1;
        let b = cfg.b();
        let mut k = 0u32;
        let mut scaled = lower;
        // k_s = ⌊log_b(top / l_s)⌋
        while let Some(next) = scaled.checked_mul(b) {
            if next > top {
                break;
            }
            scaled = next;
            k += 1;
        }
        Self {
            lower,
            k,
            threshold: scaled,
        }
    }

    /// `⌊log_b(x / l_s)⌋` for `x ∈ I`.
    #[inline]
    pub fn digits_for(&self, x: u64) -> u32 {
        if x >= self.threshold {
            self.k
        } else {
            self.k - 1
        }
    }
}

/// One step of a stream coder over a fixed interval `I`.
///
/// Object safe so that coders of different kinds can be chained on the same
/// interval ([`encode_multi`]).
pub trait StreamStep {
    fn config(&self) -> StreamConfig;

    fn alphabet_size(&self) -> usize;

    /// Moves digits to `out` and applies `C`; `x` must lie in `I`.
    fn encode_step(&self, symbol: usize, x: u64, out: &mut DigitStack) -> Result<u64>;

    /// Applies `D` and pulls digits from `input` until the state is back in `I`.
    fn decode_step(&self, x: u64, input: &mut DigitStack) -> Result<(usize, u64)>;

    /// `(next state, digit count)` for encoding `symbol` from `x`.
    fn transition(&self, symbol: usize, x: u64) -> Result<(u64, u32)>;

    /// `D(x) = (s, x_s)` for `x ∈ I`.
    fn decode_state(&self, x: u64) -> (usize, u64);
}

/// Generic stream coder wrapping any [`Codec`] whose ranges are `b`-unique.
#[derive(Debug, Clone)]
pub struct StreamCoder<C> {
    codec: C,
    cfg: StreamConfig,
    rules: Vec<DigitRule>,
    powers: Vec<u64>,
}

impl<C: Codec> StreamCoder<C> {
    /// Computes the symbol ranges by enumeration and validates them.
    pub fn new(codec: C, cfg: StreamConfig) -> Result<Self> {
        let ranges = compute_symbol_ranges(&codec, cfg)?;
        Self::with_ranges(codec, cfg, &ranges)
    }

    /// Uses precomputed ranges, e.g. closed forms for large intervals.
    pub fn with_ranges(codec: C, cfg: StreamConfig, ranges: &SymbolRanges) -> Result<Self> {
        if ranges.len() != codec.alphabet_size() {
            return Err(AnsError::InvalidConfig(format!(
                "{} ranges for an alphabet of {}",
                ranges.len(),
                codec.alphabet_size()
            )));
        }
        for (symbol, r) in ranges.iter().enumerate() {
            if !r.is_b_unique(cfg.b()) {
                return Err(AnsError::NotBUnique {
                    symbol,
                    lower: r.lower,
                    upper: r.upper,
                });
            }
        }
        let rules: Vec<DigitRule> = ranges.iter().map(|r| DigitRule::new(r.lower, cfg)).collect();
        let max_k = rules.iter().map(|r| r.k).max().unwrap_or(0);
        let powers = (0..=max_k).map(|k| cfg.b().pow(k)).collect();
        Ok(Self {
            codec,
            cfg,
            rules,
            powers,
        })
    }

    pub fn codec(&self) -> &C {
        &self.codec
    }

    pub fn rules(&self) -> &[DigitRule] {
        &self.rules
    }

    /// `count(s, x) = ⌊log_b(x / l_s)⌋`, indexed `[s][x - l]`.
    pub fn bit_count_table(&self) -> Vec<Vec<u32>> {
        self.rules
            .iter()
            .map(|rule| self.cfg.states().map(|x| rule.digits_for(x)).collect())
            .collect()
    }
}

impl<C: Codec> StreamStep for StreamCoder<C> {
    fn config(&self) -> StreamConfig {
        self.cfg
    }

    fn alphabet_size(&self) -> usize {
        self.codec.alphabet_size()
    }

    fn encode_step(&self, symbol: usize, x: u64, out: &mut DigitStack) -> Result<u64> {
        debug_assert!(self.cfg.contains(x));
        let k = self.rules[symbol].digits_for(x);
        let scale = self.powers[k as usize];
        out.push_value(x % scale, k);
        self.codec.encode(symbol, x / scale)
    }

    fn decode_step(&self, x: u64, input: &mut DigitStack) -> Result<(usize, u64)> {
        let (s, mut xs) = self.codec.decode(x);
        while xs < self.cfg.l() {
            xs = xs * self.cfg.b() + input.pop()? as u64;
        }
        Ok((s, xs))
    }

    fn transition(&self, symbol: usize, x: u64) -> Result<(u64, u32)> {
        let k = self.rules[symbol].digits_for(x);
        let next = self.codec.encode(symbol, x / self.powers[k as usize])?;
        Ok((next, k))
    }

    fn decode_state(&self, x: u64) -> (usize, u64) {
        self.codec.decode(x)
    }
}

/// Stream-encodes a sequence starting at `initial`; each symbol names the
/// coder it is encoded with. All coders must share one interval.
pub fn encode_multi<'a, I>(steps: I, initial: u64, out: &mut DigitStack) -> Result<u64>
where
    I: IntoIterator<Item = (usize, &'a dyn StreamStep)>,
{
    let mut x = initial;
    let mut cfg: Option<StreamConfig> = None;
    for (symbol, coder) in steps {
        match cfg {
            None => cfg = Some(coder.config()),
            Some(c) if c != coder.config() => return Err(AnsError::ConfigMismatch),
            Some(_) => {}
        }
        x = coder.encode_step(symbol, x, out)?;
    }
    Ok(x)
}

/// Decodes one symbol per coder in `coders`, which must list the coders in
/// reverse encoding order. Returns the symbols in decoding order and the
/// final state.
pub fn decode_multi(
    state: u64,
    input: &mut DigitStack,
    coders: &[&dyn StreamStep],
) -> Result<(Vec<usize>, u64)> {
    if let Some(first) = coders.first() {
        if coders.iter().any(|c| c.config() != first.config()) {
            return Err(AnsError::ConfigMismatch);
        }
    }
    let mut x = state;
    let mut symbols = Vec::with_capacity(coders.len());
    for coder in coders {
        let (s, next) = coder.decode_step(x, input)?;
        symbols.push(s);
        x = next;
    }
    Ok((symbols, x))
}
