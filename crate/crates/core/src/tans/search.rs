use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::analysis::{delta_h, solve_dense, AutomatonSpec};
use crate::error::{AnsError, Result};
use crate::rans::QuantizedDist;
use crate::scalar::Scalar;
use crate::stream::{DigitRule, StreamConfig};

use super::spread::{check_total, SpreadFunction};
use super::table::TansTables;

/// Largest number of spreads [`exhaustive_search`] enumerates by default.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1_000_000;

/// Two `ΔH` values closer than this count as the same optimum.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Multinomial coefficient `(Σ k)! / Π k!`.
pub fn multinomial(counts: &[u64]) -> BigUint {
    let mut result = BigUint::one();
    let mut placed = 0u64;
    for &k in counts {
        for i in 1..=k {
            placed += 1;
            result = result * BigUint::from(placed) / BigUint::from(i);
        }
    }
    result
}

/// Scores spreads over a fixed interval and source without building a
/// [`SpreadFunction`] per candidate. Scratch buffers are reused between calls.
#[derive(Debug, Clone)]
pub struct SpreadScorer<F> {
    cfg: StreamConfig,
    probs: Vec<F>,
    entropy: F,
    lg_b: F,
    powers: Vec<u64>,
    matrix: Vec<F>,
    rhs: Vec<F>,
    positions: Vec<Vec<u32>>,
}

impl<F: Scalar> SpreadScorer<F> {
    pub fn new(cfg: StreamConfig, probs: &[F]) -> Result<Self> {
        crate::analysis::validate_probs(probs, probs.len())?;
        if cfg.state_count() > 4096 {
            return Err(AnsError::OutOfRange(format!("{cfg} is too large to score densely")));
        }
        let mut powers = vec![1u64];
        while let Some(next) = powers.last().unwrap().checked_mul(cfg.b()) {
            if next > cfg.upper() {
                break;
            }
            powers.push(next);
        }
        let n = cfg.state_count() as usize;
        Ok(Self {
            cfg,
            probs: probs.to_vec(),
            entropy: crate::analysis::shannon_entropy(probs),
            lg_b: F::from_count(cfg.b()).log2(),
            powers,
            matrix: vec![F::zero(); n * n],
            rhs: vec![F::zero(); n],
            positions: vec![Vec::new(); probs.len()],
        })
    }

    pub fn config(&self) -> StreamConfig {
        self.cfg
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    /// Replaces the source distribution, keeping the interval.
    pub fn set_probs(&mut self, probs: &[F]) -> Result<()> {
        crate::analysis::validate_probs(probs, self.probs.len())?;
        self.probs.copy_from_slice(probs);
        self.entropy = crate::analysis::shannon_entropy(probs);
        Ok(())
    }

    /// `ΔH` of the automaton whose state `l + i` carries `assignment[i]`.
    ///
    /// Every symbol must appear a positive multiple of `b - 1` times.
    pub fn delta_h(&mut self, assignment: &[u32]) -> Result<F> {
        let cfg = self.cfg;
        let n = cfg.state_count() as usize;
        if assignment.len() != n {
            return Err(AnsError::InvalidConfig(format!(
                "{} symbols for {n} states",
                assignment.len()
            )));
        }
        for p in self.positions.iter_mut() {
            p.clear();
        }
        for (i, &s) in assignment.iter().enumerate() {
            let slot = self
                .positions
                .get_mut(s as usize)
                .ok_or_else(|| AnsError::OutOfRange(format!("symbol {s} outside alphabet")))?;
            slot.push(i as u32);
        }
        let mut rules = Vec::with_capacity(self.positions.len());
        for (s, pos) in self.positions.iter().enumerate() {
            let count = pos.len() as u64;
            if count == 0 || !count.is_multiple_of(cfg.b() - 1) {
                return Err(AnsError::InvalidDistribution(format!(
                    "symbol {s} appears {count} times"
                )));
            }
            rules.push(DigitRule::new(count / (cfg.b() - 1), cfg));
        }

        let m = &mut self.matrix;
        m.iter_mut().for_each(|v| *v = F::zero());
        for i in 0..n {
            m[i * n + i] = -F::one();
        }
        let mut bits_row = vec![F::zero(); n];
        for y in 0..n {
            let x = cfg.l() + y as u64;
            let mut bits = F::zero();
            for (s, rule) in rules.iter().enumerate() {
                let k = rule.digits_for(x);
                let xs = x / self.powers[k as usize];
                let target = self.positions[s][(xs - rule.lower) as usize] as usize;
                let p = self.probs[s];
                m[target * n + y] = m[target * n + y] + p;
                bits = bits + p * F::from_count(k as u64);
            }
            bits_row[y] = bits;
        }
        for k in 0..n {
            m[(n - 1) * n + k] = F::one();
        }
        self.rhs.iter_mut().for_each(|v| *v = F::zero());
        self.rhs[n - 1] = F::one();
        let pi = if solve_dense(m, &mut self.rhs, n) {
            self.rhs.clone()
        } else {
            // reducible chain: fall back to power iteration on the reachable part
            let spread = SpreadFunction::new(cfg, self.probs.len(), assignment.to_vec())?;
            let tables = TansTables::from_spread(&spread);
            let a = AutomatonSpec::from_coder(&tables, &self.probs)?;
            return Ok(delta_h(&a)?.delta_h);
        };
        let expected: F = pi.iter().zip(&bits_row).map(|(w, b)| *w * *b).sum();
        Ok(expected * self.lg_b - self.entropy)
    }

    /// `ΔH` of an already validated spread.
    pub fn score(&mut self, spread: &SpreadFunction) -> Result<F> {
        if spread.config() != self.cfg {
            return Err(AnsError::ConfigMismatch);
        }
        self.delta_h(spread.assignment())
    }
}

/// Outcome of [`exhaustive_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<F> {
    /// First optimum in lexicographic order of assignments.
    pub best: SpreadFunction,
    pub min_delta_h: F,
    /// Spreads within [`TIE_TOLERANCE`] of the minimum.
    pub optima: Vec<SpreadFunction>,
    pub enumerated: u64,
}

impl<F> SearchResult<F> {
    pub fn optimum_count(&self) -> usize {
        self.optima.len()
    }
}

/// Rearranges `v` into the next lexicographic permutation; false after the last.
fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Scores every spread of `d` over `cfg` under the source `probs` and
/// returns the optimum together with all spreads tying with it.
pub fn exhaustive_search<F: Scalar>(
    d: &QuantizedDist,
    cfg: StreamConfig,
    probs: &[F],
    budget: u64,
) -> Result<SearchResult<F>> {
    check_total(d, cfg)?;
    if probs.len() != d.len() {
        return Err(AnsError::InvalidDistribution(format!(
            "{} probabilities for {} symbols",
            probs.len(),
            d.len()
        )));
    }
    let counts: Vec<u64> = d.freqs().iter().map(|f| f * (cfg.b() - 1)).collect();
    let total = multinomial(&counts);
    match total.to_u64() {
        Some(t) if t <= budget => {}
        _ => {
            return Err(AnsError::BudgetExceeded {
                needed: total.to_string(),
                budget,
            })
        }
    }
    let mut scorer = SpreadScorer::new(cfg, probs)?;
    let mut assignment: Vec<u32> = counts
        .iter()
        .enumerate()
        .flat_map(|(s, &c)| std::iter::repeat_n(s as u32, c as usize))
        .collect();
    let tol = F::from_f64_lossy(TIE_TOLERANCE);
    let mut min = F::infinity();
    let mut optima: Vec<Vec<u32>> = Vec::new();
    let mut enumerated = 0u64;
    loop {
        enumerated += 1;
        let dh = scorer.delta_h(&assignment)?;
        if dh < min - tol {
            min = dh;
            optima.clear();
            optima.push(assignment.clone());
        } else if (dh - min).abs() <= tol {
            min = min.min(dh);
            optima.push(assignment.clone());
        }
        if !next_permutation(&mut assignment) {
            break;
        }
    }
    let optima = optima
        .into_iter()
        .map(|a| SpreadFunction::new(cfg, d.len(), a))
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchResult {
        best: optima[0].clone(),
        min_delta_h: min,
        optima,
        enumerated,
    })
}

/// Every binary spread over `state_count` states with both symbols present,
/// scored on a grid of probabilities of symbol 1.
#[derive(Debug, Clone, PartialEq)]
pub struct QabsFamily<F> {
    pub cfg: StreamConfig,
    pub p_grid: Vec<F>,
    /// Spread `i` is the bit pattern of `ids[i]`: bit `j` is the symbol at
    /// state `l + j`.
    pub ids: Vec<u32>,
    /// `curves[i][g]` is `ΔH` of spread `i` at `p_grid[g]`.
    pub curves: Vec<Vec<F>>,
}

impl<F: Scalar> QabsFamily<F> {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn assignment(&self, index: usize) -> Vec<u32> {
        let n = self.cfg.state_count();
        (0..n).map(|j| (self.ids[index] >> j) & 1).collect()
    }

    pub fn spread(&self, index: usize) -> SpreadFunction {
        SpreadFunction::new(self.cfg, 2, self.assignment(index)).expect("family spreads are valid")
    }

    /// Number of symbol-0 appearances.
    pub fn zeros(&self, index: usize) -> u32 {
        self.cfg.state_count() as u32 - self.ids[index].count_ones()
    }

    /// Indices of spreads attaining the minimum `ΔH` at some grid point,
    /// one representative (the first in `ids` order) per distinct curve.
    /// A spread counts as minimal when within `tol` of the grid minimum.
    pub fn envelope(&self, tol: F) -> Vec<usize> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.envelope_of(&all, tol)
    }

    /// Spreads with more symbol-0 than symbol-1 appearances.
    pub fn majority_zero(&self) -> Vec<usize> {
        let half = self.cfg.state_count() as u32 / 2;
        (0..self.len()).filter(|&i| self.zeros(i) > half).collect()
    }

    /// [`envelope`](Self::envelope) restricted to `candidates`.
    pub fn envelope_of(&self, candidates: &[usize], tol: F) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::new();
        for g in 0..self.p_grid.len() {
            let min = candidates
                .iter()
                .map(|&i| self.curves[i][g])
                .fold(F::infinity(), F::min);
            for &i in candidates {
                if self.curves[i][g] <= min + tol && !chosen.iter().any(|&j| self.same_curve(i, j, tol)) {
                    chosen.push(i);
                }
            }
        }
        chosen.sort_unstable();
        chosen
    }

    fn same_curve(&self, i: usize, j: usize, tol: F) -> bool {
        self.curves[i]
            .iter()
            .zip(&self.curves[j])
            .all(|(a, b)| (*a - *b).abs() <= tol)
    }

    /// Lowest `ΔH` over the family at each grid point.
    pub fn lower_envelope_values(&self) -> Vec<F> {
        (0..self.p_grid.len())
            .map(|g| self.curves.iter().map(|c| c[g]).fold(F::infinity(), F::min))
            .collect()
    }
}

/// Scores all `2^n - 2` binary spreads over `n = state_count` states
/// (`l = n`, `b = 2`) at each probability of symbol 1 in `p_grid`.
pub fn qabs_family<F: Scalar>(state_count: u32, p_grid: &[F]) -> Result<QabsFamily<F>> {
    if !(2..=16).contains(&state_count) {
        return Err(AnsError::BudgetExceeded {
            needed: format!("2^{state_count} spreads"),
            budget: 1 << 16,
        });
    }
    let cfg = StreamConfig::binary(state_count as u64)?;
    let grid_probs: Vec<[F; 2]> = p_grid
        .iter()
        .map(|&p| {
            if p > F::zero() && p < F::one() {
                Ok([F::one() - p, p])
            } else {
                Err(AnsError::InvalidDistribution(format!("p = {p} outside (0, 1)")))
            }
        })
        .collect::<Result<_>>()?;
    let mut scorer = SpreadScorer::new(cfg, &[F::from_f64_lossy(0.5); 2])?;
    let full = (1u32 << state_count) - 1;
    let mut ids = Vec::with_capacity(full as usize - 1);
    let mut curves = Vec::with_capacity(full as usize - 1);
    for id in 1..full {
        let assignment: Vec<u32> = (0..state_count).map(|j| (id >> j) & 1).collect();
        let mut curve = Vec::with_capacity(p_grid.len());
        for probs in &grid_probs {
            scorer.set_probs(probs)?;
            curve.push(scorer.delta_h(&assignment)?);
        }
        ids.push(id);
        curves.push(curve);
    }
    Ok(QabsFamily {
        cfg,
        p_grid: p_grid.to_vec(),
        ids,
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tans::precise_init;

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(&[10, 5, 2]), BigUint::from(408_408u32));
        assert_eq!(multinomial(&[3, 1]), BigUint::from(4u32));
        assert_eq!(multinomial(&[]), BigUint::one());
    }

    #[test]
    fn permutations_in_lex_order() {
        let mut v = vec![0, 0, 1, 2];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 12);
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
    }

    #[test]
    fn scorer_matches_automaton_analysis() {
        let d = QuantizedDist::new(&[10, 5, 2]).unwrap();
        let cfg = StreamConfig::binary(17).unwrap();
        let spread = precise_init(&d, cfg).unwrap();
        let probs = d.probs();
        let tables = TansTables::from_spread(&spread);
        let a = AutomatonSpec::from_coder(&tables, &probs).unwrap();
        let reference = delta_h(&a).unwrap().delta_h;
        let mut scorer = SpreadScorer::new(cfg, &probs).unwrap();
        assert!((scorer.score(&spread).unwrap() - reference).abs() < 1e-11);
    }

    #[test]
    fn budget_is_enforced() {
        let d = QuantizedDist::new(&[10, 5, 2]).unwrap();
        let cfg = StreamConfig::binary(17).unwrap();
        let err = exhaustive_search(&d, cfg, &d.probs(), 1000).unwrap_err();
        assert!(matches!(err, AnsError::BudgetExceeded { .. }));
    }

    #[test]
    fn balanced_binary_is_perfect() {
        let d = QuantizedDist::new(&[1, 1]).unwrap();
        let cfg = StreamConfig::binary(2).unwrap();
        let r = exhaustive_search(&d, cfg, &[0.5f64, 0.5], DEFAULT_SEARCH_BUDGET).unwrap();
        assert_eq!(r.enumerated, 2);
        assert!(r.min_delta_h.abs() < 1e-12);
        assert_eq!(r.optimum_count(), 2);
    }

    #[test]
    fn small_family_counts() {
        let grid: Vec<f64> = (1..50).map(|i| i as f64 / 100.0).collect();
        let fam = qabs_family(4, &grid).unwrap();
        assert_eq!(fam.len(), 14);
        assert!(!fam.envelope(1e-12).is_empty());
    }
}
