//! Synthetic panels with the shape of national trade statistics.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::montecarlo::trial_rng;
use crate::scalar::Scalar;
use crate::trade::TradeStatistics;

/// Cobb-Douglas demands under random-walk prices. With `noise == 0` the
/// panel is homothetic-rationalizable; positive `noise` multiplies every
/// quantity by `exp(noise · N(0,1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub periods: usize,
    pub goods: usize,
    /// Standard deviation of per-period log price changes.
    pub price_volatility: f64,
    /// Standard deviation of per-period log expenditure changes.
    pub expenditure_volatility: f64,
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticConfig {
    pub fn new(periods: usize, goods: usize, seed: u64) -> Self {
        Self {
            periods,
            goods,
            price_volatility: 0.1,
            expenditure_volatility: 0.05,
            noise: 0.0,
            seed,
        }
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }
}

pub fn cobb_douglas<T: Scalar>(cfg: &SyntheticConfig) -> TradeStatistics<T> {
    assert!(cfg.periods >= 1 && cfg.goods >= 1, "empty synthetic panel");
    let mut rng = trial_rng(cfg.seed, 0);
    let shares: Vec<f64> = {
        let raw: Vec<f64> = (0..cfg.goods).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|v| v / total).collect()
    };
    let step = Normal::new(0.0, cfg.price_volatility).expect("volatility is non-negative");
    let income = Normal::new(0.0, cfg.expenditure_volatility).expect("volatility is non-negative");
    let mut log_p: Vec<f64> = (0..cfg.goods).map(|_| rng.random_range(-0.5..0.5)).collect();
    let mut log_x = 0.0f64;
    let mut prices = Vec::with_capacity(cfg.periods);
    let mut quantities = Vec::with_capacity(cfg.periods);
    for t in 0..cfg.periods {
        if t > 0 {
            for lp in &mut log_p {
                *lp += step.sample(&mut rng);
            }
            log_x += income.sample(&mut rng);
        }
        let p: Vec<f64> = log_p.iter().map(|v| v.exp()).collect();
        let q: Vec<f64> = p
            .iter()
            .zip(&shares)
            .map(|(pi, a)| {
                let e: f64 = rng.sample(StandardNormal);
                a * log_x.exp() / pi * (cfg.noise * e).exp()
            })
            .collect();
        prices.push(p.into_iter().map(T::lit).collect());
        quantities.push(q.into_iter().map(T::lit).collect());
    }
    TradeStatistics::new(prices, quantities).expect("synthetic data is positive")
}
