//! Uniform asymmetric binary systems.
//!
//! Symbol 1 has probability `p = num/den` and occupies the states where
//! `⌈x·p⌉` jumps, so `x_1 = ⌈x·p⌉` and `x_0 = x - ⌈x·p⌉` (or the floor
//! analogues). Everything is evaluated in integer arithmetic.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;

use crate::error::{AnsError, Result};
use crate::stream::Codec;

/// Probability of symbol 1 as a reduced fraction strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryProb {
    num: u64,
    den: u64,
}

impl BinaryProb {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 || num >= den {
            return Err(AnsError::InvalidProbability { num, den });
        }
        let g = num.gcd(&den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// `p_1 = p`.
    pub fn p1(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `p_0 = 1 - p`.
    pub fn p0(&self) -> f64 {
        (self.den - self.num) as f64 / self.den as f64
    }

    /// `p_s` as an exact rational.
    pub fn ratio(&self, symbol: usize) -> Ratio<i128> {
        let num = if symbol == 1 { self.num } else { self.den - self.num };
        Ratio::new(num as i128, self.den as i128)
    }
}

impl fmt::Display for BinaryProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for BinaryProb {
    type Err = AnsError;

    /// Parses `"num/den"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || AnsError::OutOfRange(format!("expected NUM/DEN, got {s:?}"));
        let (n, d) = s.split_once('/').ok_or_else(bad)?;
        let num = n.trim().parse().map_err(|_| bad())?;
        let den = d.trim().parse().map_err(|_| bad())?;
        Self::new(num, den)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum UabsVariant {
    /// `x_1 = ⌈x·p⌉`.
    #[default]
    Ceiling,
    /// `x_1 = ⌊x·p⌋`.
    Floor,
}

fn ceil_div(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

fn narrow(v: u128) -> Result<u64> {
    u64::try_from(v).map_err(|_| AnsError::Overflow)
}

/// `x_1`, the number of 1s among states `0..x`.
fn ones_below(x: u64, p: BinaryProb, v: UabsVariant) -> u64 {
    let t = x as u128 * p.num as u128;
    let r = match v {
        UabsVariant::Ceiling => ceil_div(t, p.den as u128),
        UabsVariant::Floor => t / p.den as u128,
    };
    // x_1 ≤ x, so this always fits
    r as u64
}

/// `s̄(x) = ⌈(x+1)p⌉ - ⌈xp⌉` (or with floors).
pub fn uabs_symbol(x: u64, p: BinaryProb, v: UabsVariant) -> usize {
    let here = ones_below(x, p, v) as u128;
    let t = (x as u128 + 1) * p.num as u128;
    let next = match v {
        UabsVariant::Ceiling => ceil_div(t, p.den as u128),
        UabsVariant::Floor => t / p.den as u128,
    };
    (next - here) as usize
}

/// `D(x) = (s, x_s)`.
pub fn uabs_decode(x: u64, p: BinaryProb, v: UabsVariant) -> (usize, u64) {
    let s = uabs_symbol(x, p, v);
    let x1 = ones_below(x, p, v);
    if s == 1 {
        (1, x1)
    } else {
        (0, x - x1)
    }
}

/// `C(s, x)`; fails when the result exceeds 64 bits.
pub fn uabs_encode(s: usize, x: u64, p: BinaryProb, v: UabsVariant) -> Result<u64> {
    let (num, den) = (p.num as u128, p.den as u128);
    let x = x as u128;
    let r = match (v, s) {
        // ⌈(x+1)/(1-p)⌉ - 1
        (UabsVariant::Ceiling, 0) => ceil_div((x + 1) * den, den - num) - 1,
        // ⌊x/p⌋
        (UabsVariant::Ceiling, _) => x * den / num,
        // ⌊x/(1-p)⌋
        (UabsVariant::Floor, 0) => x * den / (den - num),
        // ⌈(x+1)/p⌉ - 1
        (UabsVariant::Floor, _) => ceil_div((x + 1) * den, num) - 1,
    };
    narrow(r)
}

/// `ε_s(x) = x_s/x - p_s` for the symbol `s = s̄(x)`, exactly. Requires `x ≥ 1`.
pub fn uabs_inaccuracy(x: u64, p: BinaryProb, v: UabsVariant) -> Ratio<i128> {
    assert!(x >= 1, "inaccuracy is defined for x ≥ 1");
    let (s, xs) = uabs_decode(x, p, v);
    Ratio::new(xs as i128, x as i128) - p.ratio(s)
}

/// uABS as a [`Codec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Uabs {
    p: BinaryProb,
    variant: UabsVariant,
}

impl Uabs {
    pub fn new(p: BinaryProb, variant: UabsVariant) -> Self {
        Self { p, variant }
    }

    pub fn prob(&self) -> BinaryProb {
        self.p
    }

    pub fn variant(&self) -> UabsVariant {
        self.variant
    }
}

impl Codec for Uabs {
    fn alphabet_size(&self) -> usize {
        2
    }

    fn encode(&self, symbol: usize, x: u64) -> Result<u64> {
        uabs_encode(symbol, x, self.p, self.variant)
    }

    fn decode(&self, x: u64) -> (usize, u64) {
        uabs_decode(x, self.p, self.variant)
    }
}
