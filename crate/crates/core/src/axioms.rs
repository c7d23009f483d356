//! GARP(ω) and HARP(ω) decisions with violation witnesses.
//!
//! Revealed-preference links `px[t][t] >= ω px[t][s]` are evaluated in ratio
//! form `px[t][t] / px[t][s] >= ω`, the same quantities the GARP
//! irrationality index is computed from, so both agree at breakpoints.
//! Self-comparisons (`t == s`) never enter either axiom.

use std::collections::VecDeque;
use std::fmt;
use std::ops::ControlFlow;

use crate::matrix::SquareMatrix;
use crate::scalar::Scalar;
use crate::semiring::{
    boolean_closure, cycle_product, for_each_cycle, max_cycle_geomean, maxtimes_closure_with_tolerance,
    AdjacencyRule, BooleanRelation, SemiringError,
};
use crate::trade::{CrossValueMatrix, PaascheMatrix, TradeStatistics};

/// Default cap on index sequences visited by [`brute_force_harp`].
pub const DEFAULT_ORACLE_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Garp,
    Harp,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Garp => "GARP",
            Axiom::Harp => "HARP",
        })
    }
}

/// Revealed-preference chain `t -> t_1 -> ... -> s` followed by the failed
/// back-comparison `px[s][s] > ω px[s][t]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GarpWitness {
    pub chain: Vec<usize>,
    /// `(s, t)`.
    pub violated: (usize, usize),
}

/// Cycle whose Paasche product exceeds `ω^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarpWitness<T> {
    pub cycle: Vec<usize>,
    pub product: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness<T> {
    Garp(GarpWitness),
    Harp(HarpWitness<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomVerdict<T> {
    pub satisfied: bool,
    pub omega: T,
    pub witness: Option<Witness<T>>,
}

impl<T: Scalar> AxiomVerdict<T> {
    fn pass(omega: T) -> Self {
        Self {
            satisfied: true,
            omega,
            witness: None,
        }
    }

    fn fail(omega: T, witness: Witness<T>) -> Self {
        Self {
            satisfied: false,
            omega,
            witness: Some(witness),
        }
    }

    pub fn garp_witness(&self) -> Option<&GarpWitness> {
        match &self.witness {
            Some(Witness::Garp(w)) => Some(w),
            _ => None,
        }
    }

    pub fn harp_witness(&self) -> Option<&HarpWitness<T>> {
        match &self.witness {
            Some(Witness::Harp(w)) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for GarpWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chain: Vec<String> = self.chain.iter().map(|t| (t + 1).to_string()).collect();
        write!(
            f,
            "chain {} revealed-preferred, but period {} expenditure exceeds omega times its cost of bundle {}",
            chain.join(" -> "),
            self.violated.0 + 1,
            self.violated.1 + 1
        )
    }
}

impl<T: Scalar> fmt::Display for HarpWitness<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycle: Vec<String> = self.cycle.iter().map(|t| (t + 1).to_string()).collect();
        write!(
            f,
            "cycle {} -> {} has Paasche product {}",
            cycle.join(" -> "),
            self.cycle.first().map_or(0, |t| t + 1),
            self.product
        )
    }
}

/// `b[t][s] = px[t][t] / px[t][s]`; `t R(ω) s` iff `b[t][s] >= ω`.
pub fn preference_ratios<T: Scalar>(px: &CrossValueMatrix<T>) -> SquareMatrix<T> {
    SquareMatrix::from_fn(px.dim(), |t, s| px.get(t, t) / px.get(t, s))
}

/// Direct revealed-preference relation `R(ω)` without self-loops.
pub fn revealed_preference<T: Scalar>(px: &CrossValueMatrix<T>, omega: T) -> BooleanRelation {
    relation_from_ratios(&preference_ratios(px), omega)
}

pub(crate) fn relation_from_ratios<T: Scalar>(b: &SquareMatrix<T>, omega: T) -> BooleanRelation {
    BooleanRelation::from_fn(b.dim(), |t, s| t != s && b.get(t, s) >= omega)
}

pub fn check_garp<T: Scalar>(ts: &TradeStatistics<T>, omega: T) -> AxiomVerdict<T> {
    check_garp_with_tolerance(ts, omega, T::zero())
}

/// GARP(ω); a back-comparison only counts as violated when it fails by more
/// than `tolerance` (on the ratio scale).
pub fn check_garp_with_tolerance<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
    tolerance: T,
) -> AxiomVerdict<T> {
    garp_on_ratios(&preference_ratios(&ts.cross_value_matrix()), omega, tolerance)
}

pub(crate) fn garp_on_ratios<T: Scalar>(
    b: &SquareMatrix<T>,
    omega: T,
    tolerance: T,
) -> AxiomVerdict<T> {
    let n = b.dim();
    let r = relation_from_ratios(b, omega);
    let closed = boolean_closure(&r);
    let bound = omega + tolerance;
    let violated = (0..n).any(|t| (0..n).any(|s| t != s && closed.get(t, s) && b.get(s, t) > bound));
    if !violated {
        return AxiomVerdict::pass(omega);
    }
    let witness = shortest_garp_witness(&r, b, bound).expect("closure reported a violation");
    AxiomVerdict::fail(omega, Witness::Garp(witness))
}

/// Shortest violating chain by breadth-first search; ties go to the lowest
/// `(t, s)` pair.
fn shortest_garp_witness<T: Scalar>(r: &BooleanRelation, b: &SquareMatrix<T>, bound: T) -> Option<GarpWitness> {
    let n = r.dim();
    let mut best: Option<GarpWitness> = None;
    for t in 0..n {
        let mut parent = vec![usize::MAX; n];
        let mut dist = vec![usize::MAX; n];
        dist[t] = 0;
        let mut queue = VecDeque::from([t]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if r.get(u, v) && dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        for s in 0..n {
            if s == t || dist[s] == usize::MAX || !(b.get(s, t) > bound) {
                continue;
            }
            if best.as_ref().is_some_and(|w| w.chain.len() <= dist[s] + 1) {
                continue;
            }
            let mut chain = vec![s];
            let mut cur = s;
            while cur != t {
                cur = parent[cur];
                chain.push(cur);
            }
            chain.reverse();
            best = Some(GarpWitness {
                chain,
                violated: (s, t),
            });
        }
    }
    best
}

pub fn check_harp<T: Scalar>(ts: &TradeStatistics<T>, omega: T) -> AxiomVerdict<T> {
    check_harp_with_tolerance(ts, omega, T::zero())
}

/// HARP(ω): the closure of `C/ω` over off-diagonal edges must keep its
/// diagonal at or below `1 + tolerance`.
pub fn check_harp_with_tolerance<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
    tolerance: T,
) -> AxiomVerdict<T> {
    harp_on_paasche(&ts.paasche_matrix(), omega, tolerance)
}

/// `A[t][s] = C[t][s] / ω` for `t != s`, zero diagonal.
pub(crate) fn scaled_offdiagonal<T: Scalar>(c: &PaascheMatrix<T>, omega: T) -> SquareMatrix<T> {
    SquareMatrix::from_fn(c.dim(), |t, s| if t == s { T::zero() } else { c.get(t, s) / omega })
}

pub(crate) fn harp_on_paasche<T: Scalar>(c: &PaascheMatrix<T>, omega: T, tolerance: T) -> AxiomVerdict<T> {
    let a = scaled_offdiagonal(c, omega);
    let closure = maxtimes_closure_with_tolerance(&a, tolerance).expect("Paasche entries are positive");
    if !closure.diverged {
        return AxiomVerdict::pass(omega);
    }
    AxiomVerdict::fail(omega, Witness::Harp(harp_witness(c)))
}

pub(crate) fn harp_witness<T: Scalar>(c: &PaascheMatrix<T>) -> HarpWitness<T> {
    let best = max_cycle_geomean(c.matrix(), 2).expect("divergence needs at least two periods");
    HarpWitness {
        product: cycle_product(c.matrix(), &best.cycle),
        cycle: best.cycle,
    }
}

/// Enumerates every admissible cycle of length `2..=max_len` and checks
/// `prod C <= ω^k` directly. The first violation in (length, lexicographic)
/// order is returned as witness.
pub fn brute_force_harp<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
    max_len: usize,
    budget: u64,
) -> Result<AxiomVerdict<T>, SemiringError> {
    let c = ts.paasche_matrix();
    let mut witness = None;
    for_each_cycle(c.matrix(), max_len, AdjacencyRule::Cyclic, budget, |seq, prod| {
        if prod > omega.powi(seq.len() as i32) {
            witness = Some(HarpWitness {
                cycle: seq.to_vec(),
                product: prod,
            });
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(match witness {
        None => AxiomVerdict::pass(omega),
        Some(w) => AxiomVerdict::fail(omega, Witness::Harp(w)),
    })
}
