//! Out-of-sample check of the extreme-displacement bound.
//!
//! `m̂` is fitted on an early training window of weekly displacements, turned
//! into the bound `R = π √(8t / m̂)`, and scaled to price points with the
//! crash week's opening price (the prior week's close). The report flags a
//! violation when the crash week moved further than that.

use std::fmt::Write as _;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimate::{self, EstimateError, GridSpec};
use crate::ingest::{self, IngestError, PriceSeries};
use crate::model::{self, ModelError, OscillatorParams};

pub const DEFAULT_TRAIN_COUNT: usize = 100;
const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Error)]
pub enum BacktestError {
    #[error("crash week ending {0} not found in series")]
    CrashWeekNotFound(NaiveDate),
    #[error("training window ends at displacement {train_end} but crash week is displacement {crash_index}")]
    TrainingOverlapsCrash {
        train_end: usize,
        crash_index: usize,
    },
    #[error("prior close must be finite and positive, got {0}")]
    InvalidPriorClose(f64),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    /// Index of the first training displacement.
    pub train_start_index: usize,
    pub train_count: usize,
    /// Date of the crash week's closing price.
    pub crash_week_end: NaiveDate,
    pub t: f64,
    pub grid: GridSpec,
}

impl BacktestConfig {
    pub fn new(crash_week_end: NaiveDate) -> Self {
        Self {
            train_start_index: 0,
            train_count: DEFAULT_TRAIN_COUNT,
            crash_week_end,
            t: 1.0,
            grid: GridSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestReport {
    pub asset_id: String,
    pub m_hat: f64,
    pub r2: f64,
    pub t: f64,
    pub train_start: NaiveDate,
    pub train_end: NaiveDate,
    pub crash_week_end: NaiveDate,
    pub prior_close: f64,
    pub predicted_extreme_ratio: f64,
    pub predicted_extreme_points: f64,
    pub actual_points: f64,
    pub actual_ratio: f64,
    pub violated: bool,
    pub years_from_train_to_crash: f64,
}

/// `π √(8t / m̂) · prior_close`.
pub fn predict_extreme_points(m_hat: f64, t: f64, prior_close: f64) -> Result<f64, BacktestError> {
    let params = OscillatorParams::new(m_hat, t)?;
    if !(prior_close.is_finite() && prior_close > 0.0) {
        return Err(BacktestError::InvalidPriorClose(prior_close));
    }
    Ok(model::extreme_displacement(&params) * prior_close)
}

pub fn run_backtest(
    series: &PriceSeries,
    config: &BacktestConfig,
) -> Result<BacktestReport, BacktestError> {
    let displacements = ingest::to_displacements(series)?;
    let crash_index = displacements
        .position_of(config.crash_week_end)
        .ok_or(BacktestError::CrashWeekNotFound(config.crash_week_end))?;
    let training = ingest::window(&displacements, config.train_start_index, config.train_count)?;
    let train_end_index = config.train_start_index + config.train_count;
    if train_end_index > crash_index {
        return Err(BacktestError::TrainingOverlapsCrash {
            train_end: train_end_index - 1,
            crash_index,
        });
    }

    let fit = estimate::fit_m_hat(&training, config.t, &config.grid)?;
    let params = fit.params()?;
    let crash = &displacements.entries[crash_index];
    let prior_close = crash.x_a;
    let predicted_extreme_ratio = model::extreme_displacement(&params);
    let predicted_extreme_points = predicted_extreme_ratio * prior_close;
    let actual_points = (crash.x_b - crash.x_a).abs();

    let first = training.entries.first().expect("window is non-empty");
    let last = training.entries.last().expect("window is non-empty");
    let days = (config.crash_week_end - last.week_end).num_days() as f64;

    Ok(BacktestReport {
        asset_id: series.asset_id.clone(),
        m_hat: fit.m_hat,
        r2: fit.r2,
        t: config.t,
        train_start: first.week_end,
        train_end: last.week_end,
        crash_week_end: config.crash_week_end,
        prior_close,
        predicted_extreme_ratio,
        predicted_extreme_points,
        actual_points,
        actual_ratio: crash.ratio.abs(),
        violated: actual_points > predicted_extreme_points,
        years_from_train_to_crash: (days / DAYS_PER_YEAR * 10.0).round() / 10.0,
    })
}

impl BacktestReport {
    /// Itemized text block, one bullet per quantity.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.asset_id);
        let _ = writeln!(
            s,
            "- Data from: {}-{}",
            self.train_start.year(),
            self.train_end.year()
        );
        let _ = writeln!(s, "- Fitted m_hat: {:.2} (r2 = {:.4})", self.m_hat, self.r2);
        let _ = writeln!(s, "- Crash Week: {}", self.crash_week_end);
        let _ = writeln!(s, "- Prior close: {:.2}", self.prior_close);
        let _ = writeln!(
            s,
            "- Predicted |R| for Crash Week: {:.2} ({:.6} of prior close)",
            self.predicted_extreme_points, self.predicted_extreme_ratio
        );
        let _ = writeln!(
            s,
            "- Actual |x| for Crash Week: {:.2} ({:.6} of prior close)",
            self.actual_points, self.actual_ratio
        );
        let _ = writeln!(
            s,
            "- Interval from Pred. to Crash: ≈ {:.1} years",
            self.years_from_train_to_crash
        );
        let _ = writeln!(
            s,
            "- Violated: {}",
            if self.violated { "yes" } else { "no" }
        );
        s
    }
}
