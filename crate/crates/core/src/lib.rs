//! Revealed-preference demand analysis.
//!
//! Tests price/quantity panels for GARP(ω) and HARP(ω), builds Afriat and
//! Konüs-Divisia certificates and index hierarchies, measures irrationality,
//! and constructs forecasting sets. Monte Carlo experiments for test power
//! and forecast-set size live in [`econometrics`] and [`forecast`].
//!
//! Every numeric routine is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod afriat;
pub mod axioms;
pub mod econometrics;
pub mod fixtures;
pub mod forecast;
pub mod hierarchy;
pub mod irrationality;
pub mod linalg;
pub mod matrix;
pub mod montecarlo;
pub mod scalar;
pub mod semiring;
pub mod synthetic;
pub mod trade;

pub use afriat::{konus_divisia_series, solve_afriat_numbers, solve_harp_multipliers};
pub use axioms::{check_garp, check_harp, Axiom};
pub use irrationality::{garp_irrationality, harp_irrationality};
pub use scalar::Scalar;
pub use trade::{load_trade_statistics, DataError, GroupSelection, TradeStatistics};

pub type TradeStatistics64 = trade::TradeStatistics<f64>;
pub type CrossValueMatrix64 = trade::CrossValueMatrix<f64>;
pub type PaascheMatrix64 = trade::PaascheMatrix<f64>;
pub type ClosureMatrix64 = semiring::ClosureMatrix<f64>;
pub type AxiomVerdict64 = axioms::AxiomVerdict<f64>;
pub type HarpMultipliers64 = afriat::HarpMultipliers<f64>;
pub type AfriatSolution64 = afriat::AfriatSolution<f64>;
pub type IndexSeries64 = afriat::IndexSeries<f64>;
pub type ForecastCone64 = forecast::ForecastCone<f64>;
pub type IrrationalityReport64 = irrationality::IrrationalityReport<f64>;
pub type HierarchyReport64 = hierarchy::HierarchyReport<f64>;
