use crate::error::{AnsError, Result};
use crate::scalar::Scalar;
use crate::stream::StreamConfig;

use super::automaton::AutomatonSpec;

pub const MAX_ITERATIONS: usize = 100_000;
pub const DAMPING: f64 = 0.99;

/// How often the residual is sampled to detect a cycling chain.
const OSCILLATION_WINDOW: usize = 64;

/// Long-run state-visit probabilities `Pr(x)` of an automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDist<F> {
    cfg: StreamConfig,
    prob: Vec<F>,
    /// L1 change of the last iteration (power iteration) or the balance
    /// residual (direct solve).
    pub residual: F,
    pub iterations: usize,
    /// Damping was switched on after the residual stalled.
    pub damped: bool,
    /// Some states are unreachable from `l`; `prob` covers the recurrent part
    /// reachable from `l` only.
    pub reducible: bool,
}

impl<F: Scalar> StationaryDist<F> {
    pub fn config(&self) -> StreamConfig {
        self.cfg
    }

    /// `Pr(x)` for `x ∈ I`.
    pub fn prob(&self, x: u64) -> F {
        self.prob[(x - self.cfg.l()) as usize]
    }

    /// Probabilities of `l, .., b·l - 1` in order.
    pub fn probs(&self) -> &[F] {
        &self.prob
    }

    /// `max_x |Σ_{s,y: C̄(s,y)=x} Pr(y)·p_s - Pr(x)|`.
    pub fn balance_residual(&self, a: &AutomatonSpec<F>) -> F {
        let pushed = apply(a, &self.prob);
        pushed
            .iter()
            .zip(&self.prob)
            .map(|(u, v)| (*u - *v).abs())
            .fold(F::zero(), F::max)
    }
}

/// One application of the transition operator.
fn apply<F: Scalar>(a: &AutomatonSpec<F>, prob: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); prob.len()];
    apply_into(a, prob, &mut out);
    out
}

fn apply_into<F: Scalar>(a: &AutomatonSpec<F>, prob: &[F], out: &mut [F]) {
    out.iter_mut().for_each(|v| *v = F::zero());
    let probs = a.probs();
    for (i, &w) in prob.iter().enumerate() {
        if w == F::zero() {
            continue;
        }
        for (s, &p) in probs.iter().enumerate() {
            out[a.next_index(i, s)] = out[a.next_index(i, s)] + w * p;
        }
    }
}

/// States reachable from `l` through symbols of positive probability.
fn reachable_from_l<F: Scalar>(a: &AutomatonSpec<F>) -> Vec<bool> {
    let n = a.state_count();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for (s, p) in a.probs().iter().enumerate() {
            if *p > F::zero() {
                let j = a.next_index(i, s);
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    seen
}

/// Power iteration from the uniform distribution over the states reachable
/// from `l`. Damping by 0.99 is switched on only if the residual stops
/// shrinking (a periodic chain); it leaves the fixed point unchanged.
pub fn stationary_distribution<F: Scalar>(a: &AutomatonSpec<F>) -> Result<StationaryDist<F>> {
    let reach = reachable_from_l(a);
    let live = reach.iter().filter(|&&r| r).count();
    let start = F::one() / F::from_count(live as u64);
    let mut prob: Vec<F> = reach.iter().map(|&r| if r { start } else { F::zero() }).collect();
    let mut next = vec![F::zero(); prob.len()];
    let tol = F::convergence_tolerance();
    let damping = F::from_f64_lossy(DAMPING);
    let mut damped = false;
    let mut checkpoint = F::infinity();
    let mut residual = F::infinity();
    for iteration in 1..=MAX_ITERATIONS {
        apply_into(a, &prob, &mut next);
        if damped {
            for (n, p) in next.iter_mut().zip(&prob) {
                *n = damping * *n + (F::one() - damping) * *p;
            }
        }
        let total: F = next.iter().copied().sum();
        residual = F::zero();
        for (n, p) in next.iter_mut().zip(prob.iter()) {
            *n = *n / total;
            residual = residual + (*n - *p).abs();
        }
        std::mem::swap(&mut prob, &mut next);
        if residual < tol {
            return Ok(StationaryDist {
                cfg: a.config(),
                prob,
                residual,
                iterations: iteration,
                damped,
                reducible: live < reach.len(),
            });
        }
        if iteration % OSCILLATION_WINDOW == 0 {
            if !damped && residual > checkpoint * F::from_f64_lossy(0.5) {
                damped = true;
            }
            checkpoint = residual;
        }
    }
    Err(AnsError::NonConvergence {
        iterations: MAX_ITERATIONS,
        residual: residual.to_f64().unwrap_or(f64::NAN),
    })
}

/// Solves `A·v = rhs` in place by Gaussian elimination with partial pivoting.
/// `a` is row-major `n × n`. Returns `false` when the matrix is singular.
pub(crate) fn solve_dense<F: Scalar>(a: &mut [F], rhs: &mut [F], n: usize) -> bool {
    let tiny = F::epsilon() * F::from_count(64);
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best <= tiny {
            return false;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        let d = a[col * n + col];
        for row in col + 1..n {
            let f = a[row * n + col] / d;
            if f == F::zero() {
                continue;
            }
            for k in col..n {
                a[row * n + k] = a[row * n + k] - f * a[col * n + k];
            }
            rhs[row] = rhs[row] - f * rhs[col];
        }
    }
    for col in (0..n).rev() {
        let mut v = rhs[col];
        for k in col + 1..n {
            v = v - a[col * n + k] * rhs[k];
        }
        rhs[col] = v / a[col * n + col];
    }
    true
}

/// Stationary distribution from the linear system `(P^T - I)·π = 0`,
/// `Σ π = 1`. Falls back to power iteration when the chain is reducible.
pub fn stationary_direct<F: Scalar>(a: &AutomatonSpec<F>) -> Result<StationaryDist<F>> {
    let n = a.state_count();
    if n > 4096 {
        return stationary_distribution(a);
    }
    let mut m = vec![F::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = -F::one();
    }
    for y in 0..n {
        for (s, &p) in a.probs().iter().enumerate() {
            let x = a.next_index(y, s);
            m[x * n + y] = m[x * n + y] + p;
        }
    }
    for k in 0..n {
        m[(n - 1) * n + k] = F::one();
    }
    let mut rhs = vec![F::zero(); n];
    rhs[n - 1] = F::one();
    if !solve_dense(&mut m, &mut rhs, n) || rhs.iter().any(|v| *v < -F::epsilon().sqrt()) {
        return stationary_distribution(a);
    }
    for v in rhs.iter_mut() {
        *v = v.max(F::zero());
    }
    let mut dist = StationaryDist {
        cfg: a.config(),
        prob: rhs,
        residual: F::zero(),
        iterations: 0,
        damped: false,
        reducible: false,
    };
    dist.residual = dist.balance_residual(a);
    Ok(dist)
}
