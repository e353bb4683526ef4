//! Volatility and cointegration analysis for daily financial time series.
//!
//! The crate covers the full pipeline used in event-window volatility
//! studies: price ingestion and log-return construction, descriptive
//! diagnostics, unit-root testing, GARCH-family maximum likelihood,
//! cointegration and error-correction modeling, Granger causality, and
//! seeded simulation oracles for every estimator.

pub mod causality;
pub mod cointegration;
pub mod descriptive;
pub mod error;
pub mod exec;
pub mod numerics;
pub mod pipeline;
pub mod report;
pub mod series;
pub mod sim;
pub mod unitroot;
pub mod volatility;

pub use error::{Error, Result};
