//! AR models of log price relatives, randomized statistics, test power, and
//! random-group acceptance probabilities.

use std::io::Write;

use itertools::Itertools;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use thiserror::Error;

use crate::axioms::{check_garp, check_harp};
use crate::irrationality::{garp_irrationality, harp_irrationality};
use crate::linalg::{invert, solve};
use crate::montecarlo::{run_trials, trial_rng};
use crate::scalar::Scalar;
use crate::semiring::LOG_SLACK;
use crate::trade::{GroupSelection, TradeStatistics};

/// Lower bound on fitted residual variances.
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Redraws allowed per simulated statistics or random group before giving up.
pub const MAX_REDRAWS: u32 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EconometricsError {
    #[error("series of length {0} is too short for an AR fit (need at least 2)")]
    TooShort(usize),
    #[error("group size {size} outside [2, {goods}]")]
    InvalidSize { size: usize, goods: usize },
    #[error("{models} models for {goods} goods")]
    ModelCount { models: usize, goods: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArModel {
    pub good_id: String,
    pub order: usize,
    /// Intercept first, then lag coefficients.
    pub beta: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Maximum-likelihood residual variance, floored.
    pub sigma2: f64,
    pub aic: f64,
    pub n_eff: usize,
}

/// Fits AR(r) for `r = 0..=max_order` by OLS on the common sample
/// `t >= max_order` and keeps the smallest `n_eff ln σ² + 2(r+1)`; ties go to
/// the lower order. `max_order` is reduced to `len - 2` for short series.
pub fn fit_ar(z: &[f64], max_order: usize) -> Result<ArModel, EconometricsError> {
    let n = z.len();
    if n < 2 {
        return Err(EconometricsError::TooShort(n));
    }
    let p = max_order.min(n - 2);
    let n_eff = n - p;
    let mut best: Option<ArModel> = None;
    for r in 0..=p {
        let Some(model) = fit_order(z, p, r) else {
            continue;
        };
        if best.as_ref().is_none_or(|b| model.aic < b.aic) {
            best = Some(model);
        }
    }
    let mut model = best.expect("the intercept-only fit always exists");
    model.n_eff = n_eff;
    Ok(model)
}

fn fit_order(z: &[f64], p: usize, r: usize) -> Option<ArModel> {
    let k = r + 1;
    let rows: Vec<Vec<f64>> = (p..z.len())
        .map(|t| std::iter::once(1.0).chain((1..=r).map(|j| z[t - j])).collect())
        .collect();
    let y: Vec<f64> = z[p..].to_vec();
    let n_eff = y.len();
    let xtx: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| rows.iter().map(|x| x[i] * x[j]).sum()).collect())
        .collect();
    let xty: Vec<f64> = (0..k).map(|i| rows.iter().zip(&y).map(|(x, v)| x[i] * v).sum()).collect();
    let scale = xtx.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    let beta = solve(xtx.clone(), xty, 1e-10 * scale)?;
    let rss: f64 = rows
        .iter()
        .zip(&y)
        .map(|(x, v)| {
            let fit: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (v - fit).powi(2)
        })
        .sum();
    let sigma2 = (rss / n_eff as f64).max(VARIANCE_FLOOR);
    let dof = n_eff.saturating_sub(k).max(1) as f64;
    let s2 = (rss / dof).max(VARIANCE_FLOOR);
    let inv = invert(&xtx, 1e-10 * scale)?;
    let std_errors = (0..k).map(|i| (s2 * inv[i][i]).max(0.0).sqrt()).collect();
    Some(ArModel {
        good_id: String::new(),
        order: r,
        beta,
        std_errors,
        sigma2,
        aic: n_eff as f64 * sigma2.ln() + 2.0 * k as f64,
        n_eff,
    })
}

/// `z_i^t = ln(P_i^t / P_i^{t-1})` for `t = 1..T`, one series per good.
pub fn log_price_relatives<T: Scalar>(ts: &TradeStatistics<T>) -> Vec<Vec<f64>> {
    (0..ts.goods())
        .map(|i| {
            (1..ts.periods())
                .map(|t| (ts.price(t)[i].as_f64() / ts.price(t - 1)[i].as_f64()).ln())
                .collect()
        })
        .collect()
}

pub fn fit_price_models<T: Scalar>(ts: &TradeStatistics<T>, max_order: usize) -> Result<Vec<ArModel>, EconometricsError> {
    log_price_relatives(ts)
        .iter()
        .zip(ts.good_ids())
        .map(|(z, id)| {
            let mut m = fit_ar(z, max_order)?;
            m.good_id = id.clone();
            Ok(m)
        })
        .collect()
}

/// Simulates one AR series of length `n`, copying the first `order` observed
/// values and drawing the rest from the fitted recursion.
pub fn simulate_relatives<R: Rng + ?Sized>(model: &ArModel, observed: &[f64], rng: &mut R) -> Vec<f64> {
    let r = model.order.min(observed.len());
    let noise = Normal::new(0.0, model.sigma2.sqrt()).expect("variance is positive");
    let mut z: Vec<f64> = observed[..r].to_vec();
    for t in r..observed.len() {
        let mean = model.beta[0] + (1..=model.order).map(|j| model.beta[j] * z[t - j]).sum::<f64>();
        z.push(mean + noise.sample(rng));
    }
    z
}

/// Price table with `P̃^1 = P^1` and `P̃^t = P̃^{t-1} exp(z̃^t)` per good.
pub fn simulate_price_paths<T: Scalar, R: Rng + ?Sized>(
    ts: &TradeStatistics<T>,
    models: &[ArModel],
    rng: &mut R,
) -> Result<Vec<Vec<T>>, EconometricsError> {
    if models.len() != ts.goods() {
        return Err(EconometricsError::ModelCount {
            models: models.len(),
            goods: ts.goods(),
        });
    }
    let observed = log_price_relatives(ts);
    let mut prices: Vec<Vec<f64>> = vec![ts.price(0).iter().map(|v| v.as_f64()).collect()];
    let sims: Vec<Vec<f64>> = models
        .iter()
        .zip(&observed)
        .map(|(m, z)| simulate_relatives(m, z, rng))
        .collect();
    for t in 1..ts.periods() {
        let prev = &prices[t - 1];
        let next = (0..ts.goods()).map(|i| prev[i] * sims[i][t - 1].exp()).collect();
        prices.push(next);
    }
    Ok(prices
        .into_iter()
        .map(|row| row.into_iter().map(T::lit).collect())
        .collect())
}

/// Rejection means an index strictly above one, beyond a log-scale slack.
pub fn rejects(omega: f64) -> bool {
    omega.ln() > LOG_SLACK
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerReport {
    pub trials: u64,
    pub rejections_g: u64,
    pub rejections_h: u64,
    pub w_hat_g: f64,
    pub w_hat_h: f64,
    pub seed: u64,
    /// Simulated price tables discarded as numerically invalid and redrawn.
    pub redraws: u64,
    #[serde(skip)]
    pub omega_g: Vec<f64>,
    #[serde(skip)]
    pub omega_h: Vec<f64>,
}

impl PowerReport {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.serialize(self)?;
        w.flush()?;
        Ok(())
    }

    /// Per-trial indices: `trial,omega_g,omega_h`.
    pub fn write_trials_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trial", "omega_g", "omega_h"])?;
        for (b, (g, h)) in self.omega_g.iter().zip(&self.omega_h).enumerate() {
            w.write_record([b.to_string(), g.to_string(), h.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Randomized statistics keep the observed quantities and replace prices by
/// AR simulations; the GARP and HARP indices of every trial are computed on
/// the same prices.
pub fn power_estimate<T: Scalar>(
    ts: &TradeStatistics<T>,
    models: &[ArModel],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<PowerReport, EconometricsError> {
    if models.len() != ts.goods() {
        return Err(EconometricsError::ModelCount {
            models: models.len(),
            goods: ts.goods(),
        });
    }
    let results = run_trials(trials, workers, seed, |_, rng| {
        let mut redraws = 0u64;
        loop {
            let prices = simulate_price_paths(ts, models, rng).expect("model count checked");
            match ts.with_prices(prices) {
                Ok(sim) => {
                    let g = garp_irrationality(&sim).omega.as_f64();
                    let h = harp_irrationality(&sim).as_f64();
                    return (g, h, redraws);
                }
                Err(_) if redraws < MAX_REDRAWS as u64 => redraws += 1,
                Err(e) => panic!("simulated prices stay invalid after {MAX_REDRAWS} redraws: {e}"),
            }
        }
    });
    let omega_g: Vec<f64> = results.iter().map(|r| r.0).collect();
    let omega_h: Vec<f64> = results.iter().map(|r| r.1).collect();
    let rg = omega_g.iter().filter(|&&w| rejects(w)).count() as u64;
    let rh = omega_h.iter().filter(|&&w| rejects(w)).count() as u64;
    let frac = |k: u64| if trials == 0 { 0.0 } else { k as f64 / trials as f64 };
    Ok(PowerReport {
        trials,
        rejections_g: rg,
        rejections_h: rh,
        w_hat_g: frac(rg),
        w_hat_h: frac(rh),
        seed,
        redraws: results.iter().map(|r| r.2).sum(),
        omega_g,
        omega_h,
    })
}

/// Equal-width histogram over `[lo, hi]`: `(left edge, right edge, count)`.
/// Values outside the range are clamped into the end bins.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<(f64, f64, u64)> {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let b = (((v - lo) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, lo + (i + 1) as f64 * width, c))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupProbabilityPoint {
    pub size: usize,
    /// Groups evaluated.
    pub groups: u64,
    pub exhaustive: bool,
    pub p_garp: f64,
    pub p_harp: f64,
    /// Draws with an all-zero restricted quantity row that were redrawn
    /// (sampling) or skipped (enumeration).
    pub zero_row_draws: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupProbabilityCurve {
    pub samples_per_size: u64,
    pub seed: u64,
    pub points: Vec<GroupProbabilityPoint>,
}

impl GroupProbabilityCurve {
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Uniform `k`-subset of `0..m` by a partial Fisher-Yates shuffle.
pub fn random_subset<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..m).collect();
    for i in 0..k {
        let j = rng.random_range(i..m);
        idx.swap(i, j);
    }
    let mut out = idx[..k].to_vec();
    out.sort_unstable();
    out
}

fn group_verdicts<T: Scalar>(ts: &TradeStatistics<T>, goods: Vec<usize>) -> Option<(bool, bool)> {
    let sel = GroupSelection::new(goods, ts.goods()).expect("indices are in range");
    let sub = ts.restrict_to_group(&sel).ok()?;
    Some((check_garp(&sub, T::one()).satisfied, check_harp(&sub, T::one()).satisfied))
}

/// Fraction of random `k`-good groups satisfying GARP(1) and HARP(1), per
/// requested size. Sizes with at most `samples_per_size` distinct groups are
/// enumerated exhaustively.
pub fn random_group_probability<T: Scalar>(
    ts: &TradeStatistics<T>,
    sizes: &[usize],
    samples_per_size: u64,
    seed: u64,
    workers: usize,
) -> Result<GroupProbabilityCurve, EconometricsError> {
    let m = ts.goods();
    if let Some(&size) = sizes.iter().find(|&&k| k < 2 || k > m) {
        return Err(EconometricsError::InvalidSize { size, goods: m });
    }
    let mut points = Vec::with_capacity(sizes.len());
    for (pos, &k) in sizes.iter().enumerate() {
        let exhaustive = binomial(m, k) <= samples_per_size as u128;
        let outcomes: Vec<(Option<(bool, bool)>, u64)> = if exhaustive {
            let groups: Vec<Vec<usize>> = (0..m).combinations(k).collect();
            run_trials(groups.len() as u64, workers, seed, |b, _| {
                let v = group_verdicts(ts, groups[b as usize].clone());
                (v, u64::from(v.is_none()))
            })
        } else {
            // distinct stream block per requested size
            let size_seed = seed ^ ((pos as u64 + 1) << 48);
            run_trials(samples_per_size, workers, size_seed, |_, rng: &mut ChaCha8Rng| {
                let mut zero_rows = 0;
                while zero_rows < MAX_REDRAWS as u64 {
                    if let Some(v) = group_verdicts(ts, random_subset(m, k, rng)) {
                        return (Some(v), zero_rows);
                    }
                    zero_rows += 1;
                }
                (None, zero_rows)
            })
        };
        let valid: Vec<(bool, bool)> = outcomes.iter().filter_map(|o| o.0).collect();
        let n = valid.len() as f64;
        let frac = |hits: usize| if valid.is_empty() { 0.0 } else { hits as f64 / n };
        points.push(GroupProbabilityPoint {
            size: k,
            groups: valid.len() as u64,
            exhaustive,
            p_garp: frac(valid.iter().filter(|v| v.0).count()),
            p_harp: frac(valid.iter().filter(|v| v.1).count()),
            zero_row_draws: outcomes.iter().map(|o| o.1).sum(),
        });
    }
    Ok(GroupProbabilityCurve {
        samples_per_size,
        seed,
        points,
    })
}

/// Generator for one simulated AR(1)-type series; used by tests and the
/// synthetic-data tools.
pub fn simulate_ar(beta: &[f64], sigma: f64, n: usize, burn_in: usize, seed: u64) -> Vec<f64> {
    let mut rng = trial_rng(seed, 0);
    let noise = Normal::new(0.0, sigma).expect("sigma is non-negative");
    let r = beta.len() - 1;
    let mut z = vec![0.0; r];
    for _ in 0..n + burn_in {
        let t = z.len();
        let mean = beta[0] + (1..=r).map(|j| beta[j] * z[t - j]).sum::<f64>();
        z.push(mean + noise.sample(&mut rng));
    }
    z.split_off(r + burn_in)
}
