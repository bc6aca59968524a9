//! Oscillator model of weekly asset price displacements.
//!
//! * [`specfun`]: `erfc` and its inverse.
//! * [`model`]: displacement ratios, wave pair, action, energies, tail law and
//!   extreme displacement.
//! * [`ingest`]: price CSV parsing, weekly resampling, displacement series.
//! * [`estimate`]: fitting the inertial coefficient `m̂` to a sample.
//! * [`synth`]: seeded samples drawn from the tail law.
//! * [`backtest`]: out-of-sample check of the extreme-displacement bound.
//! * [`cli`]: the `osc-markets` command line.

pub mod backtest;
pub mod cli;
pub mod estimate;
pub mod ingest;
pub mod model;
pub mod specfun;
pub mod synth;

pub use backtest::{predict_extreme_points, run_backtest, BacktestConfig, BacktestReport};
pub use estimate::{fit_m_hat, EstimationResult, GridSpec, Scoring};
pub use ingest::{DisplacementSeries, PriceFormat, PriceSeries};
pub use model::{Displacement, OscillatorParams};
pub use synth::{sample_displacements, SynthSpec};
