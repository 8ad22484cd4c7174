use crate::container::quantize;
use crate::error::{AnsError, Result};
use crate::rans::QuantizedDist;
use crate::scalar::Scalar;
use crate::stream::{check_uabs_condition_for, StreamCoder, StreamConfig};
use crate::tans::{precise_init, QabsFamily, SpreadFunction, TansTables};
use crate::uabs::{BinaryProb, Uabs, UabsVariant};

use super::automaton::AutomatonSpec;
use super::csv::CsvTable;
use super::entropy::{delta_h, inverse_x_fit, tans_bound, uabs_bound};
use super::stationary::StationaryDist;

/// Stream uABS over `cfg` as an automaton; fails when the symbol ranges are
/// not b-unique.
pub fn uabs_automaton<F: Scalar>(p: BinaryProb, cfg: StreamConfig, variant: UabsVariant) -> Result<AutomatonSpec<F>> {
    let coder = StreamCoder::new(Uabs::new(p, variant), cfg)?;
    let p1 = F::from_count(p.num()) / F::from_count(p.den());
    AutomatonSpec::from_coder(&coder, &[F::one() - p1, p1])
}

/// tANS tables of `spread` driven by the source `probs`.
pub fn tans_automaton<F: Scalar>(spread: &SpreadFunction, probs: &[F]) -> Result<AutomatonSpec<F>> {
    AutomatonSpec::from_coder(&TansTables::from_spread(spread), probs)
}

/// Largest-remainder quantization of real probabilities to a total of `l`.
pub fn quantize_probs(probs: &[f64], l: u64) -> Result<QuantizedDist> {
    if probs.iter().any(|p| !p.is_finite() || *p <= 0.0) {
        return Err(AnsError::InvalidDistribution("probabilities must be positive".into()));
    }
    let scale = (1u64 << 40) as f64;
    let counts: Vec<u64> = probs.iter().map(|p| (p * scale).round().max(1.0) as u64).collect();
    QuantizedDist::new(&quantize(&counts, l)?)
}

/// `ΔH` of stream uABS for every `(p, l)` pair satisfying the stream
/// condition, with the `1/(l² ln 4)·Σ 1/p_s` bound.
///
/// Columns: `p, l, delta_h, bound, expected_bits, entropy`.
pub fn uabs_sweep(ps: &[BinaryProb], ls: &[u64], variant: UabsVariant) -> Result<CsvTable> {
    let mut table = CsvTable::new(["p", "l", "delta_h", "bound", "expected_bits", "entropy"]);
    for &p in ps {
        for &l in ls {
            let cfg = StreamConfig::binary(l)?;
            if !check_uabs_condition_for(p, cfg, variant) {
                continue;
            }
            let report = delta_h(&uabs_automaton::<f64>(p, cfg, variant)?)?;
            table.push(vec![
                p.p1(),
                l as f64,
                report.delta_h,
                uabs_bound::<f64>(p, l),
                report.expected_bits,
                report.entropy,
            ]);
        }
    }
    Ok(table)
}

/// Precise-initialization tANS for the source `probs` at each `l`.
///
/// Columns: `l, delta_h, bound, expected_bits, entropy`.
pub fn tans_sweep(probs: &[f64], ls: &[u64]) -> Result<CsvTable> {
    let mut table = CsvTable::new(["l", "delta_h", "bound", "expected_bits", "entropy"]);
    for &l in ls {
        let d = quantize_probs(probs, l)?;
        let spread = precise_init(&d, StreamConfig::binary(l)?)?;
        let report = delta_h(&tans_automaton(&spread, probs)?)?;
        table.push(vec![
            l as f64,
            report.delta_h,
            tans_bound(probs, l),
            report.expected_bits,
            report.entropy,
        ]);
    }
    Ok(table)
}

/// Frequencies `l_s ≥ 1` summing to `l`: start from all ones and add the
/// remaining `l - n` units one at a time to `pick(n)`, a symbol index drawn
/// by the caller.
pub fn random_freqs(n: usize, l: u64, mut pick: impl FnMut(usize) -> usize) -> Result<QuantizedDist> {
    if n == 0 || n as u64 > l {
        return Err(AnsError::TooManySymbols { distinct: n, states: l });
    }
    let mut freqs = vec![1u64; n];
    for _ in n as u64..l {
        let s = pick(n);
        if s >= n {
            return Err(AnsError::OutOfRange(format!("picked symbol {s} of {n}")));
        }
        freqs[s] += 1;
    }
    QuantizedDist::new(&freqs)
}

/// Precise-initialization tANS with `l = Σ l_s`, `b = 2`, for sources
/// `p_s = l_s/l`.
///
/// Columns: `n, dist_id, l, delta_h, bound, expected_bits, entropy`.
pub fn random_dist_sweep(dists: &[QuantizedDist]) -> Result<CsvTable> {
    let mut table = CsvTable::new(["n", "dist_id", "l", "delta_h", "bound", "expected_bits", "entropy"]);
    for (id, d) in dists.iter().enumerate() {
        let l = d.total();
        let probs = d.probs();
        let spread = precise_init(d, StreamConfig::binary(l)?)?;
        let report = delta_h(&tans_automaton(&spread, &probs)?)?;
        table.push(vec![
            d.len() as f64,
            id as f64,
            l as f64,
            report.delta_h,
            tans_bound(&probs, l),
            report.expected_bits,
            report.entropy,
        ]);
    }
    Ok(table)
}

/// Curves of a qABS family; `only` restricts to the given spread indices.
///
/// Columns: `spread_id, p, delta_h`, where `spread_id` is the bit pattern of
/// the spread.
pub fn qabs_table<F: Scalar>(family: &QabsFamily<F>, only: Option<&[usize]>) -> CsvTable {
    let mut table = CsvTable::new(["spread_id", "p", "delta_h"]);
    let all: Vec<usize> = (0..family.len()).collect();
    for &i in only.unwrap_or(&all) {
        for (g, p) in family.p_grid.iter().enumerate() {
            table.push(vec![
                family.ids[i] as f64,
                p.to_f64().unwrap_or(f64::NAN),
                family.curves[i][g].to_f64().unwrap_or(f64::NAN),
            ]);
        }
    }
    table
}

/// Columns: `state, prob, c_over_x`.
pub fn stationary_table<F: Scalar>(dist: &StationaryDist<F>) -> CsvTable {
    let fit = inverse_x_fit(dist);
    let mut table = CsvTable::new(["state", "prob", "c_over_x"]);
    for x in dist.config().states() {
        table.push(vec![
            x as f64,
            dist.prob(x).to_f64().unwrap_or(f64::NAN),
            (fit.c / F::from_count(x)).to_f64().unwrap_or(f64::NAN),
        ]);
    }
    table
}
