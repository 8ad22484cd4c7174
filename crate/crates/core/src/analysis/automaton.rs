use crate::error::{AnsError, Result};
use crate::scalar::Scalar;
use crate::stream::{StreamConfig, StreamStep};

/// Largest interval turned into an explicit transition system.
pub const MAX_AUTOMATON_STATES: u64 = 1 << 22;

/// A stream coder viewed as a Markov chain driven by an i.i.d. source.
///
/// States are stored relative to `l`; `next[i·n + s]` and `digits[i·n + s]`
/// describe encoding symbol `s` from state `l + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomatonSpec<F> {
    cfg: StreamConfig,
    probs: Vec<F>,
    next: Vec<u32>,
    digits: Vec<u32>,
    decoded: Vec<(u32, u64)>,
}

pub(crate) fn validate_probs<F: Scalar>(probs: &[F], n: usize) -> Result<()> {
    if probs.len() != n {
        return Err(AnsError::InvalidDistribution(format!(
            "{} probabilities for an alphabet of {n}",
            probs.len()
        )));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < F::zero()) {
        return Err(AnsError::InvalidDistribution("probabilities must be finite and nonnegative".into()));
    }
    let sum: F = probs.iter().copied().sum();
    let slack = F::from_f64_lossy(1e-9).max(F::epsilon() * F::from_count(16 * n as u64));
    if (sum - F::one()).abs() > slack {
        return Err(AnsError::InvalidDistribution(format!("probabilities sum to {sum}")));
    }
    Ok(())
}

impl<F: Scalar> AutomatonSpec<F> {
    /// Tabulates every transition of `coder` over its interval.
    pub fn from_coder(coder: &dyn StreamStep, probs: &[F]) -> Result<Self> {
        let cfg = coder.config();
        let n = coder.alphabet_size();
        validate_probs(probs, n)?;
        if cfg.state_count() > MAX_AUTOMATON_STATES {
            return Err(AnsError::OutOfRange(format!(
                "{} states exceed the automaton limit {MAX_AUTOMATON_STATES}",
                cfg.state_count()
            )));
        }
        let size = cfg.state_count() as usize;
        let mut next = Vec::with_capacity(size * n);
        let mut digits = Vec::with_capacity(size * n);
        let mut decoded = Vec::with_capacity(size);
        for x in cfg.states() {
            for s in 0..n {
                let (y, k) = coder.transition(s, x)?;
                if !cfg.contains(y) {
                    return Err(AnsError::InvalidConfig(format!("transition ({s}, {x}) leaves I")));
                }
                next.push((y - cfg.l()) as u32);
                digits.push(k);
            }
            let (s, xs) = coder.decode_state(x);
            decoded.push((s as u32, xs));
        }
        Ok(Self {
            cfg,
            probs: probs.to_vec(),
            next,
            digits,
            decoded,
        })
    }

    pub fn config(&self) -> StreamConfig {
        self.cfg
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn state_count(&self) -> usize {
        self.decoded.len()
    }

    /// `(next state, digit count)` for encoding `symbol` from state `x ∈ I`.
    pub fn transition(&self, symbol: usize, x: u64) -> (u64, u32) {
        let i = (x - self.cfg.l()) as usize * self.alphabet_size() + symbol;
        (self.next[i] as u64 + self.cfg.l(), self.digits[i])
    }

    pub(crate) fn next_index(&self, state_index: usize, symbol: usize) -> usize {
        self.next[state_index * self.alphabet_size() + symbol] as usize
    }

    pub(crate) fn digit_count(&self, state_index: usize, symbol: usize) -> u32 {
        self.digits[state_index * self.alphabet_size() + symbol]
    }

    /// `D(x) = (s, x_s)` for `x ∈ I`.
    pub fn decoded(&self, x: u64) -> (usize, u64) {
        let (s, xs) = self.decoded[(x - self.cfg.l()) as usize];
        (s as usize, xs)
    }

    /// Same transitions under another source distribution.
    pub fn with_probs(&self, probs: &[F]) -> Result<Self> {
        validate_probs(probs, self.alphabet_size())?;
        Ok(Self {
            probs: probs.to_vec(),
            ..self.clone()
        })
    }
}
