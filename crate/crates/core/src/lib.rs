//! Submultiplicative Glivenko-Cantelli bounds and uniform convergence of
//! empirical revenues.
//!
//! The crate is organized bottom-up:
//!
//! - [`distributions`]: a zoo of closed-form valuation distributions with exact
//!   CDF, tail, revenue and moments, and inverse-CDF sampling.
//! - [`empirical`]: the empirical measure of a sorted sample and exact suprema of
//!   additive and submultiplicative deviations from a known distribution.
//! - [`bounds`]: closed-form failure-probability bounds and sample-size planners.
//! - [`revenue`]: true and empirical revenue curves, the exact revenue
//!   estimation error, ERM price selection and regret.
//! - [`montecarlo`]: a reproducible trial engine estimating the probabilities
//!   bounded above, parallel over trials when the `parallel` feature is on.
//! - [`experiment`]: JSON-configured batches of Monte Carlo jobs written to CSV.

pub mod bounds;
pub mod distributions;
pub mod empirical;
mod error;
mod exec;
pub mod experiment;
pub mod montecarlo;
pub mod revenue;
pub mod stream;

pub use distributions::{AtomSet, Distribution};
pub use empirical::{Curve, DeviationResult, DeviationSide, Sample};
pub use error::{Error, Result};
pub use exec::Executor;
pub use montecarlo::FreqEstimate;
pub use stream::StreamId;
