//! Forecasting sets for a new observation `(P_new, X)`: the HARP cone
//! `K_H^ω`, GARP membership `K_G^ω`, the law-of-demand outer estimate, and
//! Monte Carlo size measures.

use std::fmt;
use std::io::Write;

use itertools::Itertools;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::axioms::{check_garp, check_harp, check_harp_with_tolerance, harp_on_paasche, Axiom};
use crate::linalg::solve;
use crate::matrix::SquareMatrix;
use crate::montecarlo::run_trials;
use crate::scalar::{dot, Scalar};
use crate::semiring::{maxtimes_closure, ClosureMatrix};
use crate::trade::{PaascheMatrix, TradeStatistics};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForecastError {
    #[error("statistics violate HARP({omega})")]
    HarpViolated { omega: f64 },
    #[error("efficiency level must be at least 1, got {0}")]
    Omega(f64),
    #[error("expected {expected} goods, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("new price of good {good} is not positive: {value}")]
    NonPositivePrice { good: usize, value: f64 },
    #[error("expenditure must be positive, got {0}")]
    Expenditure(f64),
}

/// How the zero-edge path `t = s` enters the γ coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagonalRule {
    /// Empty path weight 1: exact characterization of HARP(ω) on the
    /// extended statistics for every ω ≥ 1.
    #[default]
    Unit,
    /// Diagonal taken from the closure with self-edges `C[t][t] / ω`. Equal
    /// to `Unit` at ω = 1 and looser above it.
    SelfEdge,
}

/// `K_H^ω(P_new) = {X >= 0 : γ_s <P^s, X> >= <P_new, X> for all s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastCone<T> {
    pub omega: T,
    pub p_new: Vec<T>,
    pub gamma: Vec<T>,
}

/// Max-times closure of `C / ω` over all edges, self-edges included.
pub fn omega_closure<T: Scalar>(c: &PaascheMatrix<T>, omega: T) -> ClosureMatrix<T> {
    let scaled = c.matrix().map(|v| v / omega);
    maxtimes_closure(&scaled).expect("Paasche entries are positive")
}

fn check_price<T: Scalar>(ts: &TradeStatistics<T>, p_new: &[T]) -> Result<(), ForecastError> {
    if p_new.len() != ts.goods() {
        return Err(ForecastError::Dimension {
            expected: ts.goods(),
            got: p_new.len(),
        });
    }
    for (good, &v) in p_new.iter().enumerate() {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(ForecastError::NonPositivePrice {
                good,
                value: v.as_f64(),
            });
        }
    }
    Ok(())
}

pub fn gamma_coefficients<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
    p_new: &[T],
) -> Result<ForecastCone<T>, ForecastError> {
    gamma_coefficients_with(ts, omega, p_new, DiagonalRule::Unit)
}

/// `γ_s = min_t ω² / C*[t][s] · <P_new, X^t> / px[t][t]`.
pub fn gamma_coefficients_with<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
    p_new: &[T],
    rule: DiagonalRule,
) -> Result<ForecastCone<T>, ForecastError> {
    if !(omega >= T::one()) {
        return Err(ForecastError::Omega(omega.as_f64()));
    }
    check_price(ts, p_new)?;
    let c = ts.paasche_matrix();
    if !harp_on_paasche(&c, omega, T::zero()).satisfied {
        return Err(ForecastError::HarpViolated { omega: omega.as_f64() });
    }
    let closure = omega_closure(&c, omega);
    let n = ts.periods();
    let weight = |t: usize, s: usize| match rule {
        DiagonalRule::Unit if t == s => T::one(),
        _ => closure.get(t, s),
    };
    let gamma = (0..n)
        .map(|s| {
            (0..n)
                .map(|t| omega * omega / weight(t, s) * dot(p_new, ts.quantity(t)) / ts.expenditure(t))
                .fold(T::infinity(), T::min)
        })
        .collect();
    Ok(ForecastCone {
        omega,
        p_new: p_new.to_vec(),
        gamma,
    })
}

fn is_demand<T: Scalar>(x: &[T], goods: usize) -> bool {
    x.len() == goods && x.iter().all(|&v| v >= T::zero() && v.is_finite()) && x.iter().any(|&v| v > T::zero())
}

/// Linear-inequality membership in the cone. The origin and vectors with
/// negative entries are not demands and are rejected.
pub fn kh_membership<T: Scalar>(cone: &ForecastCone<T>, ts: &TradeStatistics<T>, x: &[T]) -> bool {
    kh_membership_with_tolerance(cone, ts, x, T::zero())
}

/// As [`kh_membership`], accepting inequalities that fail by at most
/// `rtol · <P_new, X>`; settles boundary ties decided only by rounding.
pub fn kh_membership_with_tolerance<T: Scalar>(cone: &ForecastCone<T>, ts: &TradeStatistics<T>, x: &[T], rtol: T) -> bool {
    if !is_demand(x, ts.goods()) {
        return false;
    }
    let rhs = dot(&cone.p_new, x);
    let bound = rhs - rtol * rhs;
    cone.gamma
        .iter()
        .enumerate()
        .all(|(s, &g)| g * dot(ts.price(s), x) >= bound)
}

/// HARP(ω) on the statistics extended by `(P_new, X)`.
pub fn kh_membership_direct<T: Scalar>(ts: &TradeStatistics<T>, omega: T, p_new: &[T], x: &[T]) -> bool {
    kh_membership_direct_with_tolerance(ts, omega, p_new, x, T::zero())
}

/// As [`kh_membership_direct`] with the HARP tolerance of
/// [`check_harp_with_tolerance`].
pub fn kh_membership_direct_with_tolerance<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
    p_new: &[T],
    x: &[T],
    tolerance: T,
) -> bool {
    is_demand(x, ts.goods())
        && ts
            .with_appended(p_new, x)
            .is_ok_and(|ext| check_harp_with_tolerance(&ext, omega, tolerance).satisfied)
}

/// GARP(ω) on the statistics extended by `(P_new, X)`.
pub fn kg_membership<T: Scalar>(ts: &TradeStatistics<T>, omega: T, p_new: &[T], x: &[T]) -> bool {
    is_demand(x, ts.goods())
        && ts
            .with_appended(p_new, x)
            .is_ok_and(|ext| check_garp(&ext, omega).satisfied)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sense {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        })
    }
}

/// `coefficients · X  sense  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint<T> {
    pub label: String,
    pub coefficients: Vec<T>,
    pub sense: Sense,
    pub rhs: T,
}

impl<T: Scalar> LinearConstraint<T> {
    pub fn slack(&self, x: &[T]) -> T {
        let lhs = dot(&self.coefficients, x);
        match self.sense {
            Sense::Ge | Sense::Eq => lhs - self.rhs,
            Sense::Le => self.rhs - lhs,
        }
    }

    pub fn holds(&self, x: &[T], tol: T) -> bool {
        let s = self.slack(x);
        match self.sense {
            Sense::Eq => s.abs() <= tol,
            _ => s >= -tol,
        }
    }
}

/// Largest dimension for which [`Polytope::vertices`] enumerates vertices.
pub const MAX_VERTEX_DIM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<T> {
    pub constraints: Vec<LinearConstraint<T>>,
}

impl<T: Scalar> Polytope<T> {
    pub fn dim(&self) -> usize {
        self.constraints.first().map_or(0, |c| c.coefficients.len())
    }

    pub fn contains(&self, x: &[T], tol: T) -> bool {
        self.constraints.iter().all(|c| c.holds(x, tol))
    }

    /// Vertices by solving every square subsystem of active constraints
    /// (equalities always active) and keeping feasible, distinct solutions,
    /// sorted lexicographically. `None` above [`MAX_VERTEX_DIM`].
    pub fn vertices(&self, tol: T) -> Option<Vec<Vec<T>>> {
        let m = self.dim();
        if m > MAX_VERTEX_DIM {
            return None;
        }
        let (eqs, ineqs): (Vec<_>, Vec<_>) = self.constraints.iter().partition(|c| c.sense == Sense::Eq);
        if eqs.len() > m {
            return Some(Vec::new());
        }
        let mut out: Vec<Vec<T>> = Vec::new();
        for pick in ineqs.iter().combinations(m - eqs.len()) {
            let rows: Vec<&LinearConstraint<T>> = eqs.iter().copied().chain(pick.into_iter().copied()).collect();
            let a = rows.iter().map(|c| c.coefficients.clone()).collect();
            let b = rows.iter().map(|c| c.rhs).collect();
            let Some(mut x) = solve(a, b, T::lit(1e-12)) else {
                continue;
            };
            // -0 + 0 = +0
            x.iter_mut().for_each(|v| *v += T::zero());
            if self.contains(&x, tol) && !out.iter().any(|v| v.iter().zip(&x).all(|(p, q)| (*p - *q).abs() <= tol)) {
                out.push(x);
            }
        }
        out.sort_by(|p, q| {
            p.iter()
                .zip(q)
                .map(|(a, b)| a.partial_cmp(b).expect("finite vertex"))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        Some(out)
    }

    /// One row per constraint: `label, <good ids...>, sense, rhs`.
    pub fn write_csv<W: Write>(&self, good_ids: &[String], out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["constraint".to_string()];
        header.extend(good_ids.iter().cloned());
        header.extend(["sense".to_string(), "rhs".to_string()]);
        w.write_record(&header)?;
        for c in &self.constraints {
            let mut rec = vec![c.label.clone()];
            rec.extend(c.coefficients.iter().map(|v| v.to_string()));
            rec.push(c.sense.to_string());
            rec.push(c.rhs.to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `K_H^ω(P_new, x_new)`: the cone inequalities, the budget equality
/// `<P_new, X> = x_new`, and `X >= 0`.
pub fn kh_polytope<T: Scalar>(
    cone: &ForecastCone<T>,
    ts: &TradeStatistics<T>,
    x_new: T,
) -> Result<Polytope<T>, ForecastError> {
    if !(x_new > T::zero()) {
        return Err(ForecastError::Expenditure(x_new.as_f64()));
    }
    let m = ts.goods();
    let mut constraints: Vec<LinearConstraint<T>> = cone
        .gamma
        .iter()
        .enumerate()
        .map(|(s, &g)| LinearConstraint {
            label: format!("cone_{}", ts.period_ids()[s]),
            coefficients: ts.price(s).iter().zip(&cone.p_new).map(|(&p, &q)| g * p - q).collect(),
            sense: Sense::Ge,
            rhs: T::zero(),
        })
        .collect();
    constraints.push(LinearConstraint {
        label: "budget".into(),
        coefficients: cone.p_new.clone(),
        sense: Sense::Eq,
        rhs: x_new,
    });
    constraints.extend((0..m).map(|i| LinearConstraint {
        label: format!("nonneg_{}", ts.good_ids()[i]),
        coefficients: (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect(),
        sense: Sense::Ge,
        rhs: T::zero(),
    }));
    Ok(Polytope { constraints })
}

/// Unit step with `Θ(0) = 0`.
pub fn theta<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else {
        T::zero()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawOfDemandEstimate<T> {
    pub omega: T,
    /// `D[s][t] = max(px[t][t] / (ω px[s][t]), Θ(px[s][s]/px[s][t] - ω))`.
    pub d: SquareMatrix<T>,
    /// Max-times path maxima of `D`; `+inf` everywhere when a cycle of `D`
    /// exceeds one.
    pub delta: SquareMatrix<T>,
    pub include_direct: bool,
}

/// Builds `D` and `Δ`. With `include_direct` the single edge `s → t` counts
/// as a path; otherwise paths need at least one intermediate period.
pub fn law_of_demand_estimate<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
    include_direct: bool,
) -> LawOfDemandEstimate<T> {
    let px = ts.cross_value_matrix();
    let n = ts.periods();
    let d = SquareMatrix::from_fn(n, |s, t| {
        let direct = px.get(t, t) / (omega * px.get(s, t));
        direct.max(theta(px.get(s, s) / px.get(s, t) - omega))
    });
    let closure = maxtimes_closure(&d).expect("D is non-negative");
    let star = closure.values;
    let delta = if include_direct || closure.diverged {
        star
    } else {
        SquareMatrix::from_fn(n, |s, t| {
            (0..n)
                .map(|u| d.get(s, u) * star.get(u, t))
                .fold(T::zero(), T::max)
        })
    };
    LawOfDemandEstimate {
        omega,
        d,
        delta,
        include_direct,
    }
}

/// Necessary condition for `X` to extend the statistics under HARP(ω) and
/// the law of demand: for all `s, t`
/// `max(x/(ω<P^s,X>), Θ(px[s][s]/<P^s,X> - 1)) · max(px[t][t]/(ω<P_new,X^t>),
/// Θ(x/(ω<P_new,X^t>) - 1)) <= 1/Δ[t][s]`, with `x = <P_new, X>`.
///
/// Every edge `s → t` of `D` is bounded by a ratio of multipliers, so the two
/// factors (edges `s → new → t`) and the path `t ⇝ s` form a cycle whose
/// product cannot exceed one.
pub fn law_of_demand_outer<T: Scalar>(
    ts: &TradeStatistics<T>,
    omega: T,
    p_new: &[T],
    x: &[T],
    include_direct: bool,
) -> Result<bool, ForecastError> {
    if !(omega >= T::one()) {
        return Err(ForecastError::Omega(omega.as_f64()));
    }
    check_price(ts, p_new)?;
    if !check_harp(ts, omega).satisfied {
        return Err(ForecastError::HarpViolated { omega: omega.as_f64() });
    }
    if !is_demand(x, ts.goods()) {
        return Ok(false);
    }
    let est = law_of_demand_estimate(ts, omega, include_direct);
    let n = ts.periods();
    let x_new = dot(p_new, x);
    let first: Vec<T> = (0..n)
        .map(|s| {
            let psx = dot(ts.price(s), x);
            (x_new / (omega * psx)).max(theta(ts.expenditure(s) / psx - T::one()))
        })
        .collect();
    let second: Vec<T> = (0..n)
        .map(|t| {
            let pnx = dot(p_new, ts.quantity(t));
            (ts.expenditure(t) / (omega * pnx)).max(theta(x_new / (omega * pnx) - T::one()))
        })
        .collect();
    Ok((0..n).all(|s| (0..n).all(|t| first[s] * second[t] * est.delta.get(t, s) <= T::one())))
}

/// Absolute values of `m` standard normals, normalized to unit Euclidean
/// norm: uniform on the positive orthant of the unit sphere.
pub fn sample_positive_sphere<T: Scalar, R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<T> {
    loop {
        let z: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal).abs()).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        // every price must stay strictly positive
        if norm > 0.0 && z.iter().all(|&v| v > 0.0) {
            return z.iter().map(|v| T::lit(v / norm)).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub axiom: String,
    pub trials: u64,
    pub hits: u64,
    pub f_hat: f64,
    pub seed: u64,
}

impl SizeReport {
    fn new(axiom: Axiom, trials: u64, hits: u64, seed: u64) -> Self {
        Self {
            axiom: axiom.to_string(),
            trials,
            hits,
            f_hat: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 },
            seed,
        }
    }

    /// Binomial standard error of `f_hat`.
    pub fn std_error(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.f_hat * (1.0 - self.f_hat) / self.trials as f64).sqrt()
    }
}

/// GARP and HARP size measures from the same random prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSizeReport {
    pub garp: SizeReport,
    pub harp: SizeReport,
}

impl PairedSizeReport {
    /// Rows `axiom,trials,hits,f_hat,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.serialize(&self.garp)?;
        w.serialize(&self.harp)?;
        w.flush()?;
        Ok(())
    }
}

/// Replaces the last period's prices by a random point of the positive unit
/// sphere `trials` times and counts how often GARP(1) and HARP(1) hold.
pub fn forecast_size<T: Scalar>(ts: &TradeStatistics<T>, trials: u64, seed: u64, workers: usize) -> PairedSizeReport {
    let last = ts.periods() - 1;
    let m = ts.goods();
    let outcomes = run_trials(trials, workers, seed, |_, rng| {
        let mut prices = ts.prices().to_vec();
        prices[last] = sample_positive_sphere(m, rng);
        let trial = ts.with_prices(prices).expect("sphere prices are positive");
        (
            check_garp(&trial, T::one()).satisfied,
            check_harp(&trial, T::one()).satisfied,
        )
    });
    let g = outcomes.iter().filter(|o| o.0).count() as u64;
    let h = outcomes.iter().filter(|o| o.1).count() as u64;
    PairedSizeReport {
        garp: SizeReport::new(Axiom::Garp, trials, g, seed),
        harp: SizeReport::new(Axiom::Harp, trials, h, seed),
    }
}
