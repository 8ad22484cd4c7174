//! The `ANS1` container: a static order-0 model in the header followed by the
//! digit stream of a backward-encoded message.
//!
//! ```text
//! magic "ANS1" | version u8 | variant u8 | table_log u8 | key_flag u8
//! alphabet_size u16 | freqs u16 × alphabet_size
//! message_length u64 | final_state u64 | payload_bits u64 | payload
//! ```
//!
//! All integers are little-endian. For tANS and rANS the alphabet is the byte
//! values `0..alphabet_size` and `freqs` sum to `2^table_log` (zero for bytes
//! that do not occur). The uABS variant codes the input as bits, most
//! significant bit of each byte first, with a two-entry bit model;
//! `message_length` then counts bits.

use std::fmt;

use crate::error::{AnsError, Result};
use crate::keyed::{keyed_init, DEFAULT_KEY_STRENGTH};
use crate::rans::{QuantizedDist, RansStream};
use crate::stream::{DigitStack, StreamCoder, StreamConfig, StreamStep};
use crate::tans::{precise_init, TansTables};
use crate::uabs::{BinaryProb, Uabs, UabsVariant};

pub const MAGIC: [u8; 4] = *b"ANS1";
pub const VERSION: u8 = 1;
pub const DEFAULT_TABLE_LOG: u8 = 12;
pub const MAX_TABLE_LOG: u8 = 15;
/// Upper bound on `message_length` accepted by the decoder.
pub const MAX_MESSAGE_LENGTH: u64 = 1 << 40;

const FIXED_HEADER: usize = 4 + 4 + 2 + 8 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Tans = 0,
    Rans = 1,
    Uabs = 2,
}

impl Variant {
    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Self::Tans),
            1 => Ok(Self::Rans),
            2 => Ok(Self::Uabs),
            _ => Err(AnsError::Format(format!("unknown variant {b}"))),
        }
    }

    /// Digit base used in the payload.
    pub fn base(self) -> u64 {
        match self {
            Self::Rans => 1 << crate::rans::STANDARD_DIGIT_BITS,
            Self::Tans | Self::Uabs => 2,
        }
    }

    /// Coding interval for a table of `2^table_log` entries.
    pub fn config(self, table_log: u8) -> Result<StreamConfig> {
        let size = 1u64 << table_log;
        match self {
            Self::Rans => StreamConfig::new(size << crate::rans::STANDARD_DIGIT_BITS, self.base()),
            Self::Tans | Self::Uabs => StreamConfig::binary(size),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Tans => "tans",
            Self::Rans => "rans",
            Self::Uabs => "uabs",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = AnsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tans" => Ok(Self::Tans),
            "rans" => Ok(Self::Rans),
            "uabs" => Ok(Self::Uabs),
            _ => Err(AnsError::InvalidConfig(format!("unknown variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContainerHeader {
    pub variant: Variant,
    pub table_log: u8,
    pub keyed: bool,
    pub freqs: Vec<u16>,
    pub message_length: u64,
    pub final_state: u64,
    pub payload_bits: u64,
}

impl ContainerHeader {
    pub fn encoded_len(&self) -> usize {
        FIXED_HEADER + 2 * self.freqs.len()
    }

    pub fn config(&self) -> Result<StreamConfig> {
        self.variant.config(self.table_log)
    }

    pub fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.variant as u8);
        out.push(self.table_log);
        out.push(self.keyed as u8);
        out.extend_from_slice(&(self.freqs.len() as u16).to_le_bytes());
        for f in &self.freqs {
            out.extend_from_slice(&f.to_le_bytes());
        }
        out.extend_from_slice(&self.message_length.to_le_bytes());
        out.extend_from_slice(&self.final_state.to_le_bytes());
        out.extend_from_slice(&self.payload_bits.to_le_bytes());
    }

    /// Parses and validates a header; returns it with its length in bytes.
    pub fn parse(bytes: &[u8]) -> Result<(Self, usize)> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(AnsError::Format("bad magic".into()));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(AnsError::Format(format!("unsupported version {version}")));
        }
        let variant = Variant::from_byte(r.u8()?)?;
        let table_log = r.u8()?;
        let keyed = match r.u8()? {
            0 => false,
            1 => true,
            k => return Err(AnsError::Format(format!("bad key flag {k}"))),
        };
        let n = u16::from_le_bytes(r.take(2)?.try_into().unwrap()) as usize;
        let mut freqs = Vec::with_capacity(n);
        for _ in 0..n {
            freqs.push(u16::from_le_bytes(r.take(2)?.try_into().unwrap()));
        }
        let header = Self {
            variant,
            table_log,
            keyed,
            freqs,
            message_length: r.u64()?,
            final_state: r.u64()?,
            payload_bits: r.u64()?,
        };
        header.validate()?;
        Ok((header, r.pos))
    }

    fn validate(&self) -> Result<()> {
        let min_log = if self.variant == Variant::Uabs { 1 } else { 0 };
        if self.table_log < min_log || self.table_log > MAX_TABLE_LOG {
            return Err(AnsError::Format(format!("table_log {} out of range", self.table_log)));
        }
        if self.keyed && self.variant != Variant::Tans {
            return Err(AnsError::Format("only tANS containers can be keyed".into()));
        }
        let cfg = self.config()?;
        if !cfg.contains(self.final_state) {
            return Err(AnsError::Format(format!("final state {} outside {cfg}", self.final_state)));
        }
        if self.message_length > MAX_MESSAGE_LENGTH {
            return Err(AnsError::Format(format!("message length {} too large", self.message_length)));
        }
        if self.message_length == 0 {
            if self.payload_bits != 0 || self.final_state != cfg.l() {
                return Err(AnsError::Format("empty message with a payload".into()));
            }
            return Ok(());
        }
        let sum: u64 = self.freqs.iter().map(|&f| f as u64).sum();
        if sum != 1 << self.table_log {
            return Err(AnsError::Format(format!(
                "frequencies sum to {sum}, expected {}",
                1u64 << self.table_log
            )));
        }
        if self.variant == Variant::Uabs
            && (self.freqs.len() != 2 || self.freqs.contains(&0) || !self.message_length.is_multiple_of(8))
        {
            return Err(AnsError::Format("malformed uABS bit model".into()));
        }
        let digits = self.payload_bits / cfg.digit_bits().unwrap_or(1) as u64;
        let present = self.freqs.iter().filter(|&&f| f > 0).count();
        // Without fresh digits the decoder state strictly decreases, so at
        // most |I| symbols fit between consecutive digits.
        if present > 1
            && self.message_length as u128 > (digits as u128 + 1) * cfg.state_count() as u128
        {
            return Err(AnsError::Format("message length inconsistent with payload".into()));
        }
        Ok(())
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| AnsError::Format("truncated header".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Largest-remainder quantization of `counts` to integers summing to `l`.
///
/// Symbols with a nonzero count get `max(1, ⌊l·c_s/total⌋)`. A deficit goes
/// to the largest remainders, ties to the lower index. An excess is taken
/// one unit at a time from the most over-allocated symbol above 1 (at first
/// the smallest remainder), ties to the lower index. Zero counts stay zero.
pub fn quantize(counts: &[u64], l: u64) -> Result<Vec<u64>> {
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    if total == 0 {
        return Err(AnsError::InvalidDistribution("all counts are zero".into()));
    }
    let distinct = counts.iter().filter(|&&c| c > 0).count();
    if distinct as u64 > l {
        return Err(AnsError::TooManySymbols { distinct, states: l });
    }
    let l128 = l as u128;
    let mut freqs: Vec<u64> = counts
        .iter()
        .map(|&c| if c == 0 { 0 } else { ((l128 * c as u128 / total) as u64).max(1) })
        .collect();
    let remainder = |s: usize| (l128 * counts[s] as u128) % total;
    let mut sum: u64 = freqs.iter().sum();
    if sum < l {
        let mut order: Vec<usize> = (0..counts.len()).filter(|&s| counts[s] > 0).collect();
        order.sort_by(|&a, &b| remainder(b).cmp(&remainder(a)).then(a.cmp(&b)));
        for &s in order.iter().cycle().take((l - sum) as usize) {
            freqs[s] += 1;
        }
        sum = l;
    }
    while sum > l {
        // over-allocation l_s·total - l·c_s
        let s = (0..counts.len())
            .filter(|&s| freqs[s] > 1)
            .max_by(|&a, &b| {
                let over = |s: usize| freqs[s] as i128 * total as i128 - (l128 * counts[s] as u128) as i128;
                over(a).cmp(&over(b)).then(b.cmp(&a))
            })
            .expect("distinct <= l leaves a symbol above 1");
        freqs[s] -= 1;
        sum -= 1;
    }
    Ok(freqs)
}

/// Order-0 model of a message: symbol counts and their quantization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub counts: Vec<u64>,
    pub freqs: Vec<u64>,
}

impl Model {
    pub fn new(counts: Vec<u64>, l: u64) -> Result<Self> {
        let freqs = quantize(&counts, l)?;
        Ok(Self { counts, freqs })
    }

    /// Byte model over the alphabet `0..=max byte`.
    pub fn of_bytes(input: &[u8], table_log: u8) -> Result<Self> {
        let mut counts = vec![0u64; 256];
        for &b in input {
            counts[b as usize] += 1;
        }
        let used = counts.iter().rposition(|&c| c > 0).map_or(0, |i| i + 1);
        counts.truncate(used);
        Self::new(counts, 1 << table_log)
    }

    /// Bit model with both symbols forced present.
    pub fn of_bits(input: &[u8], table_log: u8) -> Result<Self> {
        let ones: u64 = input.iter().map(|b| b.count_ones() as u64).sum();
        let zeros = 8 * input.len() as u64 - ones;
        let freqs = quantize(&[zeros.max(1), ones.max(1)], 1 << table_log)?;
        Ok(Self {
            counts: vec![zeros, ones],
            freqs,
        })
    }

    /// The present symbols with their frequencies, and the byte each stands for.
    fn compact(&self) -> Result<(QuantizedDist, Vec<u8>)> {
        let symbols: Vec<u8> = (0..self.freqs.len()).filter(|&s| self.freqs[s] > 0).map(|s| s as u8).collect();
        let freqs: Vec<u64> = symbols.iter().map(|&s| self.freqs[s as usize]).collect();
        Ok((QuantizedDist::new(&freqs)?, symbols))
    }
}

fn tans_tables(d: &QuantizedDist, cfg: StreamConfig, key: Option<&[u8]>) -> Result<TansTables> {
    let spread = match key {
        Some(k) => keyed_init(d, cfg, k, DEFAULT_KEY_STRENGTH)?,
        None => precise_init(d, cfg)?,
    };
    Ok(TansTables::from_spread(&spread))
}

fn uabs_coder(d: &QuantizedDist, cfg: StreamConfig) -> Result<StreamCoder<Uabs>> {
    let p = BinaryProb::new(d.freq(1), d.total())?;
    StreamCoder::new(Uabs::new(p, UabsVariant::Ceiling), cfg)
}

/// Builds the coder described by a header's model.
fn coder_for(
    variant: Variant,
    d: &QuantizedDist,
    cfg: StreamConfig,
    key: Option<&[u8]>,
) -> Result<Box<dyn StreamStep>> {
    Ok(match variant {
        Variant::Tans => Box::new(tans_tables(d, cfg, key)?),
        Variant::Rans => Box::new(RansStream::standard(d.clone())?),
        Variant::Uabs => Box::new(uabs_coder(d, cfg)?),
    })
}

fn bits_of(input: &[u8]) -> Vec<usize> {
    input
        .iter()
        .flat_map(|&b| (0..8).rev().map(move |i| ((b >> i) & 1) as usize))
        .collect()
}

/// Compresses `input` into a container. A key is only accepted for tANS.
pub fn compress(input: &[u8], variant: Variant, table_log: u8, key: Option<&[u8]>) -> Result<Vec<u8>> {
    if table_log > MAX_TABLE_LOG || (variant == Variant::Uabs && table_log == 0) {
        return Err(AnsError::InvalidConfig(format!("table_log {table_log} out of range")));
    }
    if key.is_some() && variant != Variant::Tans {
        return Err(AnsError::InvalidConfig("keys are supported for tANS only".into()));
    }
    let cfg = variant.config(table_log)?;
    let mut header = ContainerHeader {
        variant,
        table_log,
        keyed: key.is_some(),
        freqs: Vec::new(),
        message_length: 0,
        final_state: cfg.l(),
        payload_bits: 0,
    };
    if input.is_empty() {
        let mut out = Vec::with_capacity(header.encoded_len());
        header.write(&mut out);
        return Ok(out);
    }
    let (model, symbols) = match variant {
        Variant::Uabs => (Model::of_bits(input, table_log)?, bits_of(input)),
        _ => (Model::of_bytes(input, table_log)?, input.iter().map(|&b| b as usize).collect()),
    };
    let (dist, alphabet) = model.compact()?;
    let mut index = [0usize; 256];
    for (i, &b) in alphabet.iter().enumerate() {
        index[b as usize] = i;
    }
    let coder = coder_for(variant, &dist, cfg, key)?;
    let mut digits = DigitStack::new(cfg.b());
    let mut x = cfg.l();
    for &s in symbols.iter().rev() {
        x = coder.encode_step(index[s], x, &mut digits)?;
    }
    let (payload, bits) = digits.to_bytes()?;
    header.freqs = model.freqs.iter().map(|&f| f as u16).collect();
    header.message_length = symbols.len() as u64;
    header.final_state = x;
    header.payload_bits = bits;
    let mut out = Vec::with_capacity(header.encoded_len() + payload.len());
    header.write(&mut out);
    out.extend_from_slice(&payload);
    Ok(out)
}

/// Inverse of [`compress`]. Fails on a malformed header, a missing or
/// unexpected key, truncated or trailing payload, and a walk that does not
/// end at `l`.
pub fn decompress(container: &[u8], key: Option<&[u8]>) -> Result<Vec<u8>> {
    decompress_with_limit(container, key, u64::MAX)
}

/// [`decompress`] that refuses containers declaring more than `max_output`
/// output bytes.
pub fn decompress_with_limit(container: &[u8], key: Option<&[u8]>, max_output: u64) -> Result<Vec<u8>> {
    let (header, start) = ContainerHeader::parse(container)?;
    let declared = match header.variant {
        Variant::Uabs => header.message_length / 8,
        _ => header.message_length,
    };
    if declared > max_output {
        return Err(AnsError::OutputLimit {
            declared,
            limit: max_output,
        });
    }
    match (header.keyed, key.is_some()) {
        (true, false) => return Err(AnsError::MissingKey),
        (false, true) => return Err(AnsError::UnexpectedKey),
        _ => {}
    }
    let cfg = header.config()?;
    let mut digits = DigitStack::from_bytes(&container[start..], header.payload_bits, cfg.b())?;
    if header.message_length == 0 {
        return Ok(Vec::new());
    }
    let model = Model {
        counts: Vec::new(),
        freqs: header.freqs.iter().map(|&f| f as u64).collect(),
    };
    let (dist, alphabet) = model.compact()?;
    let coder = coder_for(header.variant, &dist, cfg, key)?;
    let count = header.message_length as usize;
    let mut x = header.final_state;
    let mut out = Vec::with_capacity(count.min(1 << 24));
    match header.variant {
        Variant::Uabs => {
            let mut byte = 0u8;
            for i in 0..count {
                let (s, next) = coder.decode_step(x, &mut digits)?;
                x = next;
                byte = (byte << 1) | s as u8;
                if i % 8 == 7 {
                    out.push(byte);
                    byte = 0;
                }
            }
        }
        _ => {
            for _ in 0..count {
                let (s, next) = coder.decode_step(x, &mut digits)?;
                x = next;
                out.push(alphabet[s]);
            }
        }
    }
    if x != cfg.l() {
        return Err(AnsError::TerminalState {
            expected: cfg.l(),
            found: x,
        });
    }
    if !digits.is_empty() {
        return Err(AnsError::TrailingDigits(digits.len()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize(&[1, 1], 4).unwrap(), vec![2, 2]);
        assert_eq!(quantize(&[3, 1], 4).unwrap(), vec![3, 1]);
        assert_eq!(quantize(&[1, 1, 1], 4).unwrap(), vec![2, 1, 1]);
        assert_eq!(quantize(&[0, 5, 0], 8).unwrap(), vec![0, 8, 0]);
        assert_eq!(quantize(&[1000, 1, 1, 1], 4).unwrap(), vec![1, 1, 1, 1]);
        assert!(matches!(
            quantize(&[1, 1, 1, 1, 1], 4),
            Err(AnsError::TooManySymbols { distinct: 5, states: 4 })
        ));
        assert!(quantize(&[0, 0], 4).is_err());
    }

    #[test]
    fn header_layout() {
        let h = ContainerHeader {
            variant: Variant::Tans,
            table_log: 2,
            keyed: false,
            freqs: vec![3, 1],
            message_length: 5,
            final_state: 6,
            payload_bits: 3,
        };
        let mut out = Vec::new();
        h.write(&mut out);
        let mut expected = b"ANS1".to_vec();
        expected.extend_from_slice(&[1, 0, 2, 0, 2, 0, 3, 0, 1, 0]);
        expected.extend_from_slice(&5u64.to_le_bytes());
        expected.extend_from_slice(&6u64.to_le_bytes());
        expected.extend_from_slice(&3u64.to_le_bytes());
        assert_eq!(out, expected);
        assert_eq!(ContainerHeader::parse(&out).unwrap(), (h, out.len()));
    }

    #[test]
    fn round_trip_each_variant() {
        let text = b"abracadabra, abracadabra! the quick brown fox".repeat(20);
        for variant in [Variant::Tans, Variant::Rans, Variant::Uabs] {
            let c = compress(&text, variant, 10, None).unwrap();
            assert_eq!(decompress(&c, None).unwrap(), text, "{variant}");
        }
    }

    #[test]
    fn empty_and_single_symbol() {
        for variant in [Variant::Tans, Variant::Rans, Variant::Uabs] {
            let c = compress(b"", variant, 4, None).unwrap();
            assert!(decompress(&c, None).unwrap().is_empty());
        }
        let c = compress(&[b'a'; 1000], Variant::Tans, 12, None).unwrap();
        let (h, _) = ContainerHeader::parse(&c).unwrap();
        assert_eq!(h.payload_bits, 0);
        assert_eq!(decompress(&c, None).unwrap(), vec![b'a'; 1000]);
    }

    #[test]
    fn key_handling() {
        let text = b"secret message, secret message".repeat(10);
        let c = compress(&text, Variant::Tans, 8, Some(b"k1")).unwrap();
        assert_eq!(decompress(&c, Some(b"k1")).unwrap(), text);
        assert!(matches!(decompress(&c, None), Err(AnsError::MissingKey)));
        let plain = compress(&text, Variant::Tans, 8, None).unwrap();
        assert!(matches!(decompress(&plain, Some(b"k1")), Err(AnsError::UnexpectedKey)));
        assert!(compress(&text, Variant::Rans, 8, Some(b"k1")).is_err());
    }

    #[test]
    fn header_corruption_is_rejected() {
        let c = compress(b"hello hello", Variant::Tans, 6, None).unwrap();
        let mut bad = c.clone();
        bad[0] = b'X';
        assert!(decompress(&bad, None).is_err());
        let mut bad = c.clone();
        bad[4] = 2;
        assert!(decompress(&bad, None).is_err());
        assert!(decompress(&c[..10], None).is_err());
        let mut long = c.clone();
        long.push(0);
        assert!(decompress(&long, None).is_err());
    }

    #[test]
    fn output_limit() {
        let c = compress(&[7u8; 1000], Variant::Tans, 4, None).unwrap();
        assert_eq!(decompress_with_limit(&c, None, 1000).unwrap(), vec![7u8; 1000]);
        assert_eq!(
            decompress_with_limit(&c, None, 999),
            Err(AnsError::OutputLimit {
                declared: 1000,
                limit: 999
            })
        );
        let bits = compress(&[0x0f; 16], Variant::Uabs, 4, None).unwrap();
        assert!(decompress_with_limit(&bits, None, 16).is_ok());
        assert!(decompress_with_limit(&bits, None, 15).is_err());
    }
}
