//! Closures in the idempotent (max, ×) semiring and boolean transitive
//! closures, plus an exact maximum geometric-mean cycle search.

use std::cmp::Ordering;
use std::ops::ControlFlow;

use thiserror::Error;

use crate::matrix::SquareMatrix;
use crate::scalar::Scalar;

/// Slack used when comparing mean log weights.
pub const LOG_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemiringError {
    #[error("negative or non-finite entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },
    #[error("non-positive off-diagonal entry at ({row}, {col})")]
    NonPositiveEntry { row: usize, col: usize },
    #[error("no admissible cycle: at least two nodes are required")]
    NoCycle,
    #[error("minimum cycle length must be at least 2, got {0}")]
    InvalidMinLength(usize),
    #[error("oracle too large: {sequences} index sequences exceed the budget of {budget}")]
    OracleTooLarge { sequences: u128, budget: u64 },
}

/// Max-times closure `C*`; all entries are `+inf` when `diverged`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureMatrix<T> {
    pub values: SquareMatrix<T>,
    pub diverged: bool,
}

impl<T: Scalar> ClosureMatrix<T> {
    pub fn get(&self, t: usize, s: usize) -> T {
        self.values.get(t, s)
    }
}

/// Max-times closure over paths with at least one edge.
pub fn maxtimes_closure<T: Scalar>(m: &SquareMatrix<T>) -> Result<ClosureMatrix<T>, SemiringError> {
    maxtimes_closure_with_tolerance(m, T::zero())
}

/// Floyd-Warshall in the (max, ×) semiring. After each pivot the diagonal is
/// inspected; any entry above `1 + tolerance` means some cycle has product
/// above one, the closure is infinite and the routine stops early.
pub fn maxtimes_closure_with_tolerance<T: Scalar>(
    m: &SquareMatrix<T>,
    tolerance: T,
) -> Result<ClosureMatrix<T>, SemiringError> {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(SemiringError::NegativeEntry { row: i, col: j });
            }
        }
    }
    let limit = T::one() + tolerance;
    let diverged = |v: &SquareMatrix<T>| (0..n).any(|i| v.get(i, i) > limit);
    let infinite = || ClosureMatrix {
        values: SquareMatrix::filled(n, T::infinity()),
        diverged: true,
    };

    let mut values = m.clone();
    if diverged(&values) {
        return Ok(infinite());
    }
    for k in 0..n {
        for i in 0..n {
            let vik = values.get(i, k);
            if vik == T::zero() {
                continue;
            }
            for j in 0..n {
                let cand = vik * values.get(k, j);
                if cand > values.get(i, j) {
                    values.set(i, j, cand);
                }
            }
        }
        if diverged(&values) {
            return Ok(infinite());
        }
    }
    Ok(ClosureMatrix {
        values,
        diverged: false,
    })
}

/// Square boolean relation (`rel[t][s]` means `t` relates to `s`).
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanRelation(pub SquareMatrix<bool>);

impl BooleanRelation {
    pub fn from_rows(rows: &[Vec<bool>]) -> Option<Self> {
        SquareMatrix::from_rows(rows).map(Self)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> bool) -> Self {
        Self(SquareMatrix::from_fn(n, f))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, t: usize, s: usize) -> bool {
        self.0.get(t, s)
    }

    pub fn to_rows(&self) -> Vec<Vec<bool>> {
        self.0.to_rows()
    }
}

/// Warshall transitive closure; reflexivity is not forced.
pub fn boolean_closure(r: &BooleanRelation) -> BooleanRelation {
    let n = r.dim();
    let mut m = r.0.clone();
    for k in 0..n {
        for i in 0..n {
            if !m.get(i, k) {
                continue;
            }
            for j in 0..n {
                if m.get(k, j) {
                    m.set(i, j, true);
                }
            }
        }
    }
    BooleanRelation(m)
}

/// A cycle `t_1 -> ... -> t_k -> t_1` together with its geometric mean
/// edge weight.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleMean<T> {
    pub value: T,
    pub log_mean: T,
    pub cycle: Vec<usize>,
}

impl<T: Scalar> CycleMean<T> {
    pub fn product(&self, m: &SquareMatrix<T>) -> T {
        cycle_product(m, &self.cycle)
    }
}

/// `prod_i m[c_i][c_{i+1 mod k}]`.
pub fn cycle_product<T: Scalar>(m: &SquareMatrix<T>, cycle: &[usize]) -> T {
    let k = cycle.len();
    (0..k).fold(T::one(), |acc, i| acc * m.get(cycle[i], cycle[(i + 1) % k]))
}

/// Largest geometric-mean edge weight over closed walks that never use a
/// diagonal entry, found with Karp's maximum mean-cycle recursion on
/// logarithms.
///
/// Any admissible cycle repeated enough times reaches every length bound, so
/// `min_len` (at least 2) does not change the optimum; it is validated only.
pub fn max_cycle_geomean<T: Scalar>(
    m: &SquareMatrix<T>,
    min_len: usize,
) -> Result<CycleMean<T>, SemiringError> {
    if min_len < 2 {
        return Err(SemiringError::InvalidMinLength(min_len));
    }
    let n = m.dim();
    if n < 2 {
        return Err(SemiringError::NoCycle);
    }
    let mut w = SquareMatrix::filled(n, T::neg_infinity());
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            let x = m.get(u, v);
            if !(x > T::zero()) || !x.is_finite() {
                return Err(SemiringError::NonPositiveEntry { row: u, col: v });
            }
            w.set(u, v, x.ln());
        }
    }

    // best[k][v]: heaviest k-edge walk ending at v from a virtual source
    let mut best = vec![vec![T::zero(); n]; n + 1];
    let mut pred = vec![vec![usize::MAX; n]; n + 1];
    for k in 1..=n {
        for v in 0..n {
            let mut top = T::neg_infinity();
            let mut arg = usize::MAX;
            for u in 0..n {
                if u == v {
                    continue;
                }
                let cand = best[k - 1][u] + w.get(u, v);
                if cand > top {
                    top = cand;
                    arg = u;
                }
            }
            best[k][v] = top;
            pred[k][v] = arg;
        }
    }
    let mut karp = T::neg_infinity();
    for v in 0..n {
        let mut worst = T::infinity();
        for k in 0..n {
            let mean = (best[n][v] - best[k][v]) / T::lit((n - k) as f64);
            if mean < worst {
                worst = mean;
            }
        }
        if worst > karp {
            karp = worst;
        }
    }

    // Recover a cycle attaining the optimum from the n-edge walks.
    let mut chosen: Option<(T, Vec<usize>)> = None;
    for v in 0..n {
        let mut walk = Vec::with_capacity(n + 1);
        let mut cur = v;
        walk.push(cur);
        for k in (1..=n).rev() {
            cur = pred[k][cur];
            walk.push(cur);
        }
        walk.reverse();
        for j in 1..walk.len() {
            for i in (0..j).rev() {
                if walk[i] == walk[j] {
                    let cycle = canonical_rotation(&walk[i..j]);
                    let mean = cycle_log_mean(&w, &cycle);
                    if better_cycle(mean, &cycle, chosen.as_ref()) {
                        chosen = Some((mean, cycle));
                    }
                    break;
                }
            }
        }
    }
    let (log_mean, cycle) = chosen.expect("an n-edge walk on n nodes repeats a node");
    debug_assert!(log_mean >= karp - T::lit(LOG_SLACK) * T::one().max(karp.abs()));
    Ok(CycleMean {
        value: log_mean.exp(),
        log_mean,
        cycle,
    })
}

fn cycle_log_mean<T: Scalar>(w: &SquareMatrix<T>, cycle: &[usize]) -> T {
    let k = cycle.len();
    let sum: T = (0..k).map(|i| w.get(cycle[i], cycle[(i + 1) % k])).sum();
    sum / T::lit(k as f64)
}

fn better_cycle<T: Scalar>(mean: T, cycle: &[usize], current: Option<&(T, Vec<usize>)>) -> bool {
    match current {
        None => true,
        Some((best, c)) => match mean.partial_cmp(best) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Equal) => (cycle.len(), cycle) < (c.len(), c.as_slice()),
            _ => false,
        },
    }
}

/// Rotates a cycle so that its smallest index comes first.
pub fn canonical_rotation(cycle: &[usize]) -> Vec<usize> {
    let start = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, v)| *v)
        .map_or(0, |(i, _)| i);
    cycle[start..].iter().chain(&cycle[..start]).copied().collect()
}

/// Which index sequences count as cycles for the brute-force enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjacencyRule {
    /// `k >= 2`, consecutive indices differ, including `t_k != t_1`.
    Cyclic,
    /// `k >= 1`, `t_i != t_{i+1}` only for `i < k`: the wrap-around edge may
    /// be a self-loop, and single-index cycles are admitted.
    Literal,
}

/// Number of index sequences the enumerator visits.
pub fn cycle_sequence_count(n: usize, max_len: usize, rule: AdjacencyRule) -> u128 {
    let min_len = match rule {
        AdjacencyRule::Cyclic => 2,
        AdjacencyRule::Literal => 1,
    };
    (min_len..=max_len)
        .map(|k| (n as u128) * (n.saturating_sub(1) as u128).saturating_pow(k as u32 - 1))
        .fold(0u128, u128::saturating_add)
}

/// Visits every admissible index cycle of length up to `max_len` in order of
/// increasing length, then lexicographically, with its edge product.
/// Sequences are not deduplicated up to rotation.
pub fn for_each_cycle<T: Scalar>(
    m: &SquareMatrix<T>,
    max_len: usize,
    rule: AdjacencyRule,
    budget: u64,
    mut visit: impl FnMut(&[usize], T) -> ControlFlow<()>,
) -> Result<(), SemiringError> {
    let n = m.dim();
    let count = cycle_sequence_count(n, max_len, rule);
    if count > budget as u128 {
        return Err(SemiringError::OracleTooLarge {
            sequences: count,
            budget,
        });
    }
    let min_len = match rule {
        AdjacencyRule::Cyclic => 2,
        AdjacencyRule::Literal => 1,
    };
    let mut seq = Vec::with_capacity(max_len);
    for k in min_len..=max_len {
        for first in 0..n {
            seq.clear();
            seq.push(first);
            if extend(m, k, rule, &mut seq, T::one(), &mut visit).is_break() {
                return Ok(());
            }
        }
    }
    Ok(())
}

fn extend<T: Scalar>(
    m: &SquareMatrix<T>,
    k: usize,
    rule: AdjacencyRule,
    seq: &mut Vec<usize>,
    prod: T,
    visit: &mut impl FnMut(&[usize], T) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let last = *seq.last().expect("non-empty");
    if seq.len() == k {
        let first = seq[0];
        if rule == AdjacencyRule::Cyclic && first == last {
            return ControlFlow::Continue(());
        }
        return visit(seq, prod * m.get(last, first));
    }
    for next in 0..m.dim() {
        if next == last {
            continue;
        }
        seq.push(next);
        let flow = extend(m, k, rule, seq, prod * m.get(last, next), visit);
        seq.pop();
        flow?;
    }
    ControlFlow::Continue(())
}

/// Exhaustive counterpart of [`max_cycle_geomean`], usable as an oracle for
/// small matrices. `Ok(None)` when no admissible cycle exists.
pub fn brute_force_max_cycle_geomean<T: Scalar>(
    m: &SquareMatrix<T>,
    max_len: usize,
    rule: AdjacencyRule,
    budget: u64,
) -> Result<Option<CycleMean<T>>, SemiringError> {
    let mut best: Option<CycleMean<T>> = None;
    for_each_cycle(m, max_len, rule, budget, |seq, prod| {
        let log_mean = prod.ln() / T::lit(seq.len() as f64);
        if best.as_ref().is_none_or(|b| log_mean > b.log_mean) {
            best = Some(CycleMean {
                value: log_mean.exp(),
                log_mean,
                cycle: seq.to_vec(),
            });
        }
        ControlFlow::Continue(())
    })?;
    Ok(best)
}
