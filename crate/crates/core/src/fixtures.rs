//! The three-good ray Engel-curve counterexample used to show that GARP
//! support sets built from intersection demands can be strictly larger
//! than the homothetic forecasting set.

use thiserror::Error;

use crate::scalar::Scalar;
use crate::trade::TradeStatistics;

/// Two-period statistics with cross values `px = [[3, 4], [3, 5]]`: HARP
/// index `sqrt(1.25)`, GARP infimum 0.75 (not attained).
pub fn two_period_statistics<T: Scalar>() -> TradeStatistics<T> {
    let v = |rows: [[f64; 2]; 2]| rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect();
    TradeStatistics::new(v([[1.0, 2.0], [2.0, 1.0]]), v([[1.0, 1.0], [2.0, 1.0]])).expect("fixture data is valid")
}

pub const RAY_PRICES: [[f64; 3]; 3] = [[2.0, 1.0, 4.0], [2.0, 1.0, 2.0], [2.0, 2.0, 1.0]];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FixtureError {
    #[error("epsilon must lie in [0, 1), got {0}")]
    Epsilon(f64),
    #[error("Engel curve {period} has zero value at the evaluation price")]
    DegenerateDirection { period: usize },
    #[error("expenditure must be positive, got {0}")]
    Expenditure(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleFixture {
    pub epsilon: f64,
    pub new_price: [f64; 3],
    pub new_expenditure: f64,
}

impl CounterexampleFixture {
    /// Fixture with evaluation price `(1, 1, 1)` and expenditure 2.
    pub fn new(epsilon: f64) -> Result<Self, FixtureError> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(FixtureError::Epsilon(epsilon));
        }
        Ok(Self {
            epsilon,
            new_price: [1.0; 3],
            new_expenditure: 2.0,
        })
    }

    pub fn with_expenditure(mut self, x: f64) -> Result<Self, FixtureError> {
        if !(x > 0.0) {
            return Err(FixtureError::Expenditure(x));
        }
        self.new_expenditure = x;
        Ok(self)
    }

    /// Unit-expenditure ray of Engel curve `t`: `e_t + eps (1 - e_t)`.
    pub fn direction(&self, t: usize) -> [f64; 3] {
        let mut d = [self.epsilon; 3];
        d[t] = 1.0;
        d
    }

    /// Observed statistics `X^t = q_t(1)`.
    pub fn statistics<T: Scalar>(&self) -> TradeStatistics<T> {
        self.scaled_statistics(&[1.0; 3])
    }

    /// Expenditures at which each Engel curve meets the budget plane
    /// `<P_new, q_t(x)> = x_new`.
    pub fn intersection_demands(&self) -> Result<[f64; 3], FixtureError> {
        let mut out = [0.0; 3];
        for (t, x) in out.iter_mut().enumerate() {
            let d = self.direction(t);
            let v: f64 = d.iter().zip(&self.new_price).map(|(a, b)| a * b).sum();
            if !(v > 0.0) {
                return Err(FixtureError::DegenerateDirection { period: t + 1 });
            }
            *x = self.new_expenditure / v;
        }
        Ok(out)
    }

    /// Statistics with demands evaluated at the intersection expenditures.
    pub fn intersection_statistics<T: Scalar>(&self) -> Result<TradeStatistics<T>, FixtureError> {
        Ok(self.scaled_statistics(&self.intersection_demands()?))
    }

    pub fn new_price_vec<T: Scalar>(&self) -> Vec<T> {
        self.new_price.iter().map(|&v| T::lit(v)).collect()
    }

    fn scaled_statistics<T: Scalar>(&self, scale: &[f64; 3]) -> TradeStatistics<T> {
        let prices = RAY_PRICES
            .iter()
            .map(|r| r.iter().map(|&v| T::lit(v)).collect())
            .collect();
        let quantities = (0..3)
            .map(|t| self.direction(t).iter().map(|&v| T::lit(v * scale[t])).collect())
            .collect();
        TradeStatistics::new(prices, quantities).expect("fixture data is valid")
    }
}
