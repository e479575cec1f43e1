//! Discrete-event Monte Carlo simulator for linear quantum repeater chains
//! that combine entanglement purification and Steane-code encoding.

pub mod cli;
pub mod config;
pub mod device;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod noise;
pub mod oracle;
pub mod pair;
pub mod pauli;
pub mod purification;
pub mod scalar;
pub mod steane;
pub mod strategies;

pub use config::RunConfig;
pub use error::SimError;
pub use noise::SimParams;
pub use strategies::StrategyId;

/// Simulated time in seconds.
pub type Seconds = f64;
/// Exact probabilities for the closed-form tables.
pub type Rational = num_rational::Ratio<i64>;
/// Bell-diagonal distribution in floating point.
pub type BellDistribution = oracle::BellDiagonal<f64>;
/// Bell-diagonal distribution with exact rational entries.
pub type ExactBellDistribution = oracle::BellDiagonal<Rational>;
/// Fidelity estimate with a 95% Wilson interval.
pub type Fidelity = metrics::FidelityEstimate<f64>;
