//! Certificates of rationalizability: HARP multipliers, GARP Afriat numbers,
//! and the utility and Konüs-Divisia index functions they induce.

use std::io::Write;

use thiserror::Error;

use crate::axioms::{check_garp, harp_on_paasche, scaled_offdiagonal, GarpWitness, HarpWitness};
use crate::scalar::{dot, Scalar};
use crate::semiring::{boolean_closure, maxtimes_closure, BooleanRelation};
use crate::trade::{CrossValueMatrix, TradeStatistics};

/// Relative slack used when re-checking certificates.
pub const CERTIFICATE_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError<T: Scalar> {
    #[error("HARP(omega) fails: {0}")]
    HarpViolated(HarpWitness<T>),
    #[error("GARP(omega) fails: {0}")]
    GarpViolated(GarpWitness),
    #[error("certificate violates the inequality for periods ({t}, {s})")]
    Unsound { t: usize, s: usize },
    #[error("lambda has {got} entries for {expected} periods")]
    Dimension { expected: usize, got: usize },
}

/// Multipliers with `ω λ^t px[t][s] >= λ^s px[s][s]` for `t != s`, scaled
/// so that `λ^1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarpMultipliers<T> {
    pub omega: T,
    pub lambda: Vec<T>,
}

/// Afriat numbers with `U^t <= U^s + λ^s (ω px[s][t] - px[s][s])`, `t != s`.
#[derive(Debug, Clone, PartialEq)]
pub struct AfriatSolution<T> {
    pub omega: T,
    pub utility: Vec<T>,
    pub lambda: Vec<T>,
}

/// Konüs-Divisia consumption (`F`) and price (`Q`) index numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries<T> {
    pub consumption: Vec<T>,
    pub price: Vec<T>,
}

fn within<T: Scalar>(lhs: T, rhs: T) -> bool {
    // lhs <= rhs up to a relative slack
    let scale = T::one().max(lhs.abs()).max(rhs.abs());
    lhs <= rhs + T::lit(CERTIFICATE_RTOL) * scale
}

/// Checks every inequality of the HARP(ω) multiplier system.
pub fn verify_harp_multipliers<T: Scalar>(
    px: &CrossValueMatrix<T>,
    omega: T,
    lambda: &[T],
) -> Result<(), CertificateError<T>> {
    let n = px.dim();
    if lambda.len() != n {
        return Err(CertificateError::Dimension {
            expected: n,
            got: lambda.len(),
        });
    }
    for t in 0..n {
        for s in 0..n {
            if t == s {
                continue;
            }
            if !(lambda[t] > T::zero()) || !within(lambda[s] * px.get(s, s), omega * lambda[t] * px.get(t, s)) {
                return Err(CertificateError::Unsound { t, s });
            }
        }
    }
    Ok(())
}

/// Checks every inequality of the GARP(ω) Afriat system.
pub fn verify_afriat_numbers<T: Scalar>(
    px: &CrossValueMatrix<T>,
    omega: T,
    utility: &[T],
    lambda: &[T],
) -> Result<(), CertificateError<T>> {
    let n = px.dim();
    if lambda.len() != n || utility.len() != n {
        return Err(CertificateError::Dimension {
            expected: n,
            got: lambda.len().min(utility.len()),
        });
    }
    for t in 0..n {
        for s in 0..n {
            if t == s {
                continue;
            }
            let rhs = utility[s] + lambda[s] * (omega * px.get(s, t) - px.get(s, s));
            if !(lambda[s] > T::zero()) || !within(utility[t], rhs) {
                return Err(CertificateError::Unsound { t, s });
            }
        }
    }
    Ok(())
}

/// `λ^t = max(1, max_τ A*[t][τ])` with `A` the off-diagonal part of `C/ω`,
/// then rescaled so the first period has `λ = 1`.
pub fn solve_harp_multipliers<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
) -> Result<HarpMultipliers<T>, CertificateError<T>> {
    let c = ts.paasche_matrix();
    let verdict = harp_on_paasche(&c, omega, T::zero());
    if let Some(w) = verdict.harp_witness() {
        return Err(CertificateError::HarpViolated(w.clone()));
    }
    let closure = maxtimes_closure(&scaled_offdiagonal(&c, omega)).expect("non-negative input");
    let n = ts.periods();
    let mut lambda: Vec<T> = (0..n)
        .map(|t| closure.values.row(t).iter().fold(T::one(), |acc, &v| acc.max(v)))
        .collect();
    let base = lambda[0];
    for l in &mut lambda {
        *l /= base;
    }
    verify_harp_multipliers(&ts.cross_value_matrix(), omega, &lambda)?;
    Ok(HarpMultipliers { omega, lambda })
}

/// Afriat numbers for GARP(ω) by repeatedly peeling off a maximal class of
/// the revealed-preference preorder. Ties among maximal elements go to the
/// lowest index.
pub fn solve_afriat_numbers<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
) -> Result<AfriatSolution<T>, CertificateError<T>> {
    let verdict = check_garp(ts, omega);
    if let Some(w) = verdict.garp_witness() {
        return Err(CertificateError::GarpViolated(w.clone()));
    }
    let px = ts.cross_value_matrix();
    let n = ts.periods();
    let relation = crate::axioms::revealed_preference(&px, omega);

    let mut utility = vec![T::zero(); n];
    let mut lambda = vec![T::zero(); n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut done: Vec<usize> = Vec::with_capacity(n);

    while !remaining.is_empty() {
        let k = remaining.len();
        let restricted = BooleanRelation::from_fn(k, |i, j| relation.get(remaining[i], remaining[j]));
        let reach = boolean_closure(&restricted);
        let top = (0..k)
            .find(|&i| (0..k).all(|j| !reach.get(j, i) || reach.get(i, j)))
            .expect("a finite preorder has a maximal element");
        let class: Vec<usize> = (0..k)
            .filter(|&j| j == top || reach.get(j, top))
            .map(|j| remaining[j])
            .collect();

        let (u_m, l_m) = if done.is_empty() {
            (T::one(), T::one())
        } else {
            let mut u_m = T::infinity();
            for &t in &class {
                for &tau in &done {
                    let via = utility[tau] + lambda[tau] * (omega * px.get(tau, t) - px.get(tau, tau));
                    u_m = u_m.min(via).min(utility[tau]);
                }
            }
            let mut l_m = T::one();
            for &t in &class {
                for &tau in &done {
                    // sign taken from the same ratio that defines the relation
                    let ratio = px.get(t, t) / px.get(t, tau);
                    let gap = px.get(t, tau) * (omega - ratio);
                    if gap > T::zero() {
                        l_m = l_m.max((utility[tau] - u_m) / gap);
                    }
                }
            }
            // strict slack instead of equality: tight inequalities with large
            // multipliers would only hold up to cancellation error; the
            // factors compound to at most e
            (u_m, l_m * (T::one() + T::one() / T::lit(n as f64)))
        };
        for &t in &class {
            utility[t] = u_m;
            lambda[t] = l_m;
        }
        remaining.retain(|t| !class.contains(t));
        done.extend(class);
    }

    verify_afriat_numbers(&px, omega, &utility, &lambda)?;
    Ok(AfriatSolution {
        omega,
        utility,
        lambda,
    })
}

/// `F(X) = min_s λ^s <P^s, X>`.
pub fn eval_harp_utility<T: Scalar>(lm: &HarpMultipliers<T>, ts: &TradeStatistics<T>, x: &[T]) -> T {
    ts.prices()
        .iter()
        .zip(&lm.lambda)
        .map(|(p, &l)| l * dot(p, x))
        .fold(T::infinity(), T::min)
}

/// `F_G(X) = min_s { U^s + λ^s (<P^s, X> - px[s][s]) }`.
///
/// This is the rationalizing utility only at ω = 1; for other ω it is a
/// diagnostic.
pub fn eval_garp_utility<T: Scalar>(sol: &AfriatSolution<T>, ts: &TradeStatistics<T>, x: &[T]) -> T {
    (0..ts.periods())
        .map(|s| sol.utility[s] + sol.lambda[s] * (dot(ts.price(s), x) - ts.expenditure(s)))
        .fold(T::infinity(), T::min)
}

/// `F[t] = λ^t px[t][t]`, `Q[t] = 1/λ^t`.
pub fn konus_divisia_series<T: Scalar>(ts: &TradeStatistics<T>, lm: &HarpMultipliers<T>) -> IndexSeries<T> {
    IndexSeries {
        consumption: (0..ts.periods()).map(|t| lm.lambda[t] * ts.expenditure(t)).collect(),
        price: lm.lambda.iter().map(|&l| T::one() / l).collect(),
    }
}

impl<T: Scalar> IndexSeries<T> {
    pub fn len(&self) -> usize {
        self.price.len()
    }

    pub fn is_empty(&self) -> bool {
        self.price.is_empty()
    }

    /// CSV with columns `period,F,Q`.
    pub fn write_csv<W: Write>(&self, period_ids: &[String], out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["period", "F", "Q"])?;
        for (t, id) in period_ids.iter().enumerate() {
            w.write_record([id.clone(), self.consumption[t].to_string(), self.price[t].to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}
