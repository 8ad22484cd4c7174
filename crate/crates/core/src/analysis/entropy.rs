use crate::error::{AnsError, Result};
use crate::scalar::Scalar;
use crate::uabs::BinaryProb;

use super::automaton::{validate_probs, AutomatonSpec};
use super::stationary::{stationary_distribution, StationaryDist};

/// Cost of an automaton driven by an i.i.d. source.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport<F> {
    pub stationary: StationaryDist<F>,
    /// `Σ_x Pr(x) Σ_s p_s·k(s,x)·lg b`.
    pub expected_bits: F,
    /// Shannon entropy of the source, bits.
    pub entropy: F,
    /// `expected_bits - entropy`.
    pub delta_h: F,
    /// `ε(x) = x_s/x - p_s` for the symbol decoded at each state of `I`.
    pub inaccuracies: Vec<F>,
}

/// `-Σ p_s lg p_s`, skipping zero probabilities.
pub fn shannon_entropy<F: Scalar>(probs: &[F]) -> F {
    probs
        .iter()
        .filter(|p| **p > F::zero())
        .map(|&p| -p * p.log2())
        .sum()
}

/// Expected digits (as bits) per symbol under a given state distribution.
pub fn expected_bits<F: Scalar>(a: &AutomatonSpec<F>, dist: &StationaryDist<F>) -> F {
    let lg_b = F::from_count(a.config().b()).log2();
    let mut total = F::zero();
    for (i, &w) in dist.probs().iter().enumerate() {
        if w == F::zero() {
            continue;
        }
        let mut row = F::zero();
        for (s, &p) in a.probs().iter().enumerate() {
            row = row + p * F::from_count(a.digit_count(i, s) as u64);
        }
        total = total + w * row;
    }
    total * lg_b
}

/// Report for a precomputed stationary distribution.
pub fn delta_h_with<F: Scalar>(a: &AutomatonSpec<F>, stationary: StationaryDist<F>) -> EntropyReport<F> {
    let expected = expected_bits(a, &stationary);
    let entropy = shannon_entropy(a.probs());
    let inaccuracies = a
        .config()
        .states()
        .map(|x| {
            let (s, xs) = a.decoded(x);
            F::from_count(xs) / F::from_count(x) - a.probs()[s]
        })
        .collect();
    EntropyReport {
        stationary,
        expected_bits: expected,
        entropy,
        delta_h: expected - entropy,
        inaccuracies,
    }
}

/// Redundancy `ΔH` of the automaton, via its stationary distribution.
pub fn delta_h<F: Scalar>(a: &AutomatonSpec<F>) -> Result<EntropyReport<F>> {
    Ok(delta_h_with(a, stationary_distribution(a)?))
}

/// Kullback-Leibler distance in bits, with its quadratic approximation
/// `Σ ε_s²/(p_s ln 4)` where `ε_s = q_s - p_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlReport<F> {
    pub exact: F,
    pub approx: F,
}

pub fn kl_distance<F: Scalar>(p: &[F], q: &[F]) -> Result<KlReport<F>> {
    validate_probs(p, p.len())?;
    validate_probs(q, p.len())?;
    let mut exact = F::zero();
    let mut approx = F::zero();
    for (s, (&ps, &qs)) in p.iter().zip(q).enumerate() {
        if ps == F::zero() {
            continue;
        }
        if qs == F::zero() {
            return Err(AnsError::InvalidDistribution(format!(
                "q_{s} = 0 where p_{s} > 0"
            )));
        }
        exact = exact + ps * (ps / qs).log2();
        let eps = qs - ps;
        approx = approx + eps * eps / ps;
    }
    Ok(KlReport {
        exact,
        approx: approx / F::ln4(),
    })
}

/// `(1/(l² ln 4)) Σ_s 1/p_s` for a binary source.
pub fn uabs_bound<F: Scalar>(p: BinaryProb, l: u64) -> F {
    let p1 = F::from_count(p.num()) / F::from_count(p.den());
    let inv = F::one() / p1 + F::one() / (F::one() - p1);
    inv / (F::from_count(l) * F::from_count(l) * F::ln4())
}

/// The uABS-style bound scaled by `m` for rANS with total frequency `m`.
pub fn rans_bound<F: Scalar>(probs: &[F], m: u64, l: u64) -> F {
    let inv: F = probs.iter().map(|&p| F::one() / p).sum();
    F::from_count(m) * inv / (F::from_count(l) * F::from_count(l) * F::ln4())
}

/// `(1/(l² ln 4)) Σ_s (1/p_s)·(p_s/(2 min p) + 1/2)²` for precise
/// initialization. A single symbol gives 0.
pub fn tans_bound<F: Scalar>(probs: &[F], l: u64) -> F {
    if probs.len() <= 1 {
        return F::zero();
    }
    let min = probs.iter().copied().fold(F::infinity(), F::min);
    let half = F::from_f64_lossy(0.5);
    let sum: F = probs
        .iter()
        .map(|&p| {
            let w = p / (min + min) + half;
            w * w / p
        })
        .sum();
    sum / (F::from_count(l) * F::from_count(l) * F::ln4())
}

/// Fit of `Pr(x) ≈ c/x` over `I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseXFit<F> {
    pub c: F,
    pub max_deviation: F,
}

pub fn inverse_x_fit<F: Scalar>(dist: &StationaryDist<F>) -> InverseXFit<F> {
    let cfg = dist.config();
    let harmonic: F = cfg.states().map(|x| F::one() / F::from_count(x)).sum();
    let c = F::one() / harmonic;
    let max_deviation = cfg
        .states()
        .map(|x| (dist.prob(x) - c / F::from_count(x)).abs())
        .fold(F::zero(), F::max);
    InverseXFit { c, max_deviation }
}
