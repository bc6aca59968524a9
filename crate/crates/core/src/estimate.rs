//! Inertial-coefficient estimation from a sample of weekly displacements.
//!
//! Every distinct non-zero `|x_w|` in the sample is used as a threshold `X`.
//! For each threshold the empirical frequency `ρ(X) = #{|x| ≥ X} / N` is
//! compared with the tail law `Pr(|x| ≥ X) = erfc(X √(m/2t))²`, and `m̂` is
//! the candidate whose predictions best correlate with the frequencies.
//!
//! The candidate grid is log-spaced. Unless the caller pins it, it spans
//! `[min m_w / 4, 4 max m_w]` where `m_w` is the exact per-threshold
//! inversion of the tail law. The best grid point is then polished by a
//! golden-section search between its neighbours.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::DisplacementSeries;
use crate::model::{self, ModelError, OscillatorParams};
use crate::specfun::{self, SpecfunError};

pub const DEFAULT_GRID_POINTS: usize = 2000;
pub const MIN_SAMPLE: usize = 10;
const BOUND_SPREAD: f64 = 4.0;
const GOLDEN_ITERATIONS: usize = 100;

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("sample is empty")]
    EmptySample,
    #[error("need at least {MIN_SAMPLE} displacements, got {0}")]
    SampleTooSmall(usize),
    #[error("need at least 3 distinct non-zero |x| values, got {0}")]
    DegenerateSample(usize),
    #[error("threshold must be finite and non-negative, got {0}")]
    InvalidThreshold(f64),
    #[error("relative frequency must lie in (0, 1], got {0}")]
    InvalidFrequency(f64),
    #[error("relative frequency is zero: inertial coefficient is unbounded")]
    InfiniteInertia,
    #[error("weekly displacement must be finite and non-zero, got {0}")]
    ZeroDisplacement(f64),
    #[error("length mismatch: {predicted} predicted vs {observed} observed")]
    LengthMismatch { predicted: usize, observed: usize },
    #[error("need at least 3 points to correlate, got {0}")]
    TooFewPoints(usize),
    #[error("zero variance in {0} values")]
    DegenerateVariance(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no candidate produced a finite r²")]
    NoFit,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Goodness-of-fit score maximized over the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scoring {
    /// Squared Pearson correlation between predicted and observed.
    #[default]
    Pearson,
    /// `1 - SS_res / SS_tot` about the identity line, floored at 0.
    IdentityLine,
}

/// Candidate grid for `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Explicit `(lower, upper)`; `None` derives them from the sample.
    pub bounds: Option<(f64, f64)>,
    pub points: usize,
    pub refine: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            bounds: None,
            points: DEFAULT_GRID_POINTS,
            refine: true,
        }
    }
}

impl GridSpec {
    pub fn with_bounds(lower: f64, upper: f64, points: usize) -> Self {
        Self {
            bounds: Some((lower, upper)),
            points,
            refine: true,
        }
    }

    fn validate(&self) -> Result<(), EstimateError> {
        if self.points < 2 {
            return Err(EstimateError::InvalidGrid(format!(
                "need at least 2 points, got {}",
                self.points
            )));
        }
        if let Some((lo, hi)) = self.bounds {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
                return Err(EstimateError::InvalidGrid(format!(
                    "bounds must satisfy 0 < lower < upper, got {lo}:{hi}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    #[serde(rename = "X")]
    pub threshold: f64,
    pub rho: f64,
    pub pr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub m_candidate: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub m_hat: f64,
    pub r2: f64,
    pub t: f64,
    pub scoring: Scoring,
    pub sample_size: usize,
    pub table: Vec<ThresholdRow>,
    pub grid: Vec<GridPoint>,
}

/// `ρ(X)`: fraction of the sample with `|x| ≥ X`.
pub fn relative_frequency(
    sample: &DisplacementSeries,
    threshold: f64,
) -> Result<f64, EstimateError> {
    if sample.is_empty() {
        return Err(EstimateError::EmptySample);
    }
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(EstimateError::InvalidThreshold(threshold));
    }
    let hits = sample.ratios().filter(|x| x.abs() >= threshold).count();
    Ok(hits as f64 / sample.len() as f64)
}

/// Inertial coefficient implied by a single threshold,
/// `m_w = 2t (erfc⁻¹(√ρ) / |x_w|)²`.
pub fn m_week(rho: f64, x_w: f64, t: f64) -> Result<f64, EstimateError> {
    if rho == 0.0 {
        return Err(EstimateError::InfiniteInertia);
    }
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(EstimateError::InvalidFrequency(rho));
    }
    if !(x_w.is_finite() && x_w != 0.0) {
        return Err(EstimateError::ZeroDisplacement(x_w));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(ModelError::InvalidTime(t).into());
    }
    let z = specfun::erfc_inv(rho.sqrt())?;
    let q = z / x_w.abs();
    Ok(2.0 * t * q * q)
}

/// Squared Pearson correlation.
pub fn r_squared(predicted: &[f64], observed: &[f64]) -> Result<f64, EstimateError> {
    check_pair(predicted, observed)?;
    let mp = mean(predicted);
    let mo = mean(observed);
    let (mut spp, mut soo, mut spo) = (0.0, 0.0, 0.0);
    for (&p, &o) in predicted.iter().zip(observed) {
        let dp = p - mp;
        let dob = o - mo;
        spp += dp * dp;
        soo += dob * dob;
        spo += dp * dob;
    }
    if soo == 0.0 {
        return Err(EstimateError::DegenerateVariance("observed"));
    }
    if spp == 0.0 {
        return Err(EstimateError::DegenerateVariance("predicted"));
    }
    Ok((spo * spo / (spp * soo)).clamp(0.0, 1.0))
}

/// Coefficient of determination of `observed` about the line `observed = predicted`.
pub fn r_squared_identity(predicted: &[f64], observed: &[f64]) -> Result<f64, EstimateError> {
    check_pair(predicted, observed)?;
    let mo = mean(observed);
    let ss_tot: f64 = observed.iter().map(|o| (o - mo).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(EstimateError::DegenerateVariance("observed"));
    }
    let ss_res: f64 = predicted
        .iter()
        .zip(observed)
        .map(|(p, o)| (o - p).powi(2))
        .sum();
    Ok((1.0 - ss_res / ss_tot).clamp(0.0, 1.0))
}

fn check_pair(predicted: &[f64], observed: &[f64]) -> Result<(), EstimateError> {
    if predicted.len() != observed.len() {
        return Err(EstimateError::LengthMismatch {
            predicted: predicted.len(),
            observed: observed.len(),
        });
    }
    if predicted.len() < 3 {
        return Err(EstimateError::TooFewPoints(predicted.len()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Thresholds and their empirical frequencies, ascending by threshold.
struct Frequencies {
    thresholds: Vec<f64>,
    rho: Vec<f64>,
}

impl Frequencies {
    fn from_sample(sample: &DisplacementSeries) -> Self {
        let mut abs: Vec<f64> = sample.ratios().map(f64::abs).collect();
        abs.sort_by(f64::total_cmp);
        let n = abs.len() as f64;
        let mut thresholds = Vec::new();
        let mut rho = Vec::new();
        for (i, &a) in abs.iter().enumerate() {
            // Zero weeks count toward ρ but are not thresholds.
            if a == 0.0 || thresholds.last() == Some(&a) {
                continue;
            }
            thresholds.push(a);
            rho.push((abs.len() - i) as f64 / n);
        }
        Self { thresholds, rho }
    }

    fn predicted(&self, m: f64, t: f64) -> Vec<f64> {
        let scale = (m / (2.0 * t)).sqrt();
        self.thresholds
            .iter()
            .map(|&x| {
                let e = specfun::erfc_finite(x * scale);
                e * e
            })
            .collect()
    }

    fn score(&self, m: f64, t: f64, scoring: Scoring) -> f64 {
        let predicted = self.predicted(m, t);
        let r2 = match scoring {
            Scoring::Pearson => r_squared(&predicted, &self.rho),
            Scoring::IdentityLine => r_squared_identity(&predicted, &self.rho),
        };
        // All-zero predictions (m far too large) have no variance.
        r2.ok().filter(|v| v.is_finite()).unwrap_or(0.0)
    }

    fn inversion_bounds(&self, t: f64) -> Result<(f64, f64), EstimateError> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (&x, &rho) in self.thresholds.iter().zip(&self.rho) {
            if rho >= 1.0 {
                continue;
            }
            let m = m_week(rho, x, t)?;
            if m.is_finite() && m > 0.0 {
                lo = lo.min(m);
                hi = hi.max(m);
            }
        }
        if !(lo.is_finite() && hi > 0.0) {
            return Err(EstimateError::DegenerateSample(self.thresholds.len()));
        }
        let (lo, hi) = (lo / BOUND_SPREAD, hi * BOUND_SPREAD);
        Ok((lo, hi))
    }
}

/// Fits `m̂` by maximal squared Pearson correlation.
pub fn fit_m_hat(
    sample: &DisplacementSeries,
    t: f64,
    grid: &GridSpec,
) -> Result<EstimationResult, EstimateError> {
    fit_m_hat_scored(sample, t, grid, Scoring::Pearson)
}

pub fn fit_m_hat_scored(
    sample: &DisplacementSeries,
    t: f64,
    grid: &GridSpec,
    scoring: Scoring,
) -> Result<EstimationResult, EstimateError> {
    if sample.is_empty() {
        return Err(EstimateError::EmptySample);
    }
    if sample.len() < MIN_SAMPLE {
        return Err(EstimateError::SampleTooSmall(sample.len()));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(ModelError::InvalidTime(t).into());
    }
    grid.validate()?;
    let freq = Frequencies::from_sample(sample);
    if freq.thresholds.len() < 3 {
        return Err(EstimateError::DegenerateSample(freq.thresholds.len()));
    }
    let (lo, hi) = match grid.bounds {
        Some(b) => b,
        None => freq.inversion_bounds(t)?,
    };

    let ratio = hi / lo;
    let last = (grid.points - 1) as f64;
    let candidates: Vec<f64> = (0..grid.points)
        .map(|i| match i {
            0 => lo,
            i if i + 1 == grid.points => hi,
            i => lo * ratio.powf(i as f64 / last),
        })
        .collect();
    let mut trace: Vec<GridPoint> = candidates
        .par_iter()
        .map(|&m| GridPoint {
            m_candidate: m,
            r2: freq.score(m, t, scoring),
        })
        .collect();

    // First maximum wins, i.e. the smallest m among ties.
    let mut best = 0;
    for (i, g) in trace.iter().enumerate() {
        if g.r2 > trace[best].r2 {
            best = i;
        }
    }
    if trace[best].r2 <= 0.0 {
        return Err(EstimateError::NoFit);
    }

    if grid.refine {
        let left = trace[best.saturating_sub(1)].m_candidate;
        let right = trace[(best + 1).min(trace.len() - 1)].m_candidate;
        let (m, r2) = golden_max(left.ln(), right.ln(), |lm| freq.score(lm.exp(), t, scoring));
        if r2 > trace[best].r2 {
            let at = trace.partition_point(|g| g.m_candidate < m);
            if trace.get(at).map(|g| g.m_candidate) == Some(m) {
                trace[at].r2 = r2;
            } else {
                trace.insert(at, GridPoint { m_candidate: m, r2 });
            }
            best = at;
        }
    }

    let GridPoint {
        m_candidate: m_hat,
        r2,
    } = trace[best];
    let params = OscillatorParams::new(m_hat, t)?;
    let table = freq
        .thresholds
        .iter()
        .zip(&freq.rho)
        .map(|(&x, &rho)| {
            Ok(ThresholdRow {
                threshold: x,
                rho,
                pr: model::prob_at_least(&params, x)?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;

    Ok(EstimationResult {
        m_hat,
        r2,
        t,
        scoring,
        sample_size: sample.len(),
        table,
        grid: trace,
    })
}

/// Golden-section maximization over `[a, b]` in log-m; returns `(m, score)`.
fn golden_max(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERATIONS {
        if (b - a).abs() <= 1e-13 * a.abs().max(1.0) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c.exp(), fc)
    } else {
        (d.exp(), fd)
    }
}

impl EstimationResult {
    pub fn params(&self) -> Result<OscillatorParams, ModelError> {
        OscillatorParams::new(self.m_hat, self.t)
    }

    /// Human-readable report: summary lines then the threshold table.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "m_hat        {:.4}", self.m_hat);
        let _ = writeln!(s, "r2           {:.6}", self.r2);
        let _ = writeln!(s, "t            {}", self.t);
        let _ = writeln!(s, "scoring      {}", scoring_name(self.scoring));
        let _ = writeln!(s, "sample_size  {}", self.sample_size);
        let _ = writeln!(s, "thresholds   {}", self.table.len());
        let _ = writeln!(s, "grid_points  {}", self.grid.len());
        if let Ok(params) = self.params() {
            let _ = writeln!(
                s,
                "extreme_R    {:.6}",
                model::extreme_displacement(&params)
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>12} {:>10} {:>12}", "X", "rho", "pr");
        for row in &self.table {
            let _ = writeln!(
                s,
                "{:>12.6} {:>10.4} {:>12.6}",
                row.threshold, row.rho, row.pr
            );
        }
        s
    }

    /// `X,rho,pr` rows.
    pub fn write_table_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.table {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// `m_candidate,r2` rows.
    pub fn write_grid_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for g in &self.grid {
            w.serialize(g)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn scoring_name(scoring: Scoring) -> &'static str {
    match scoring {
        Scoring::Pearson => "pearson",
        Scoring::IdentityLine => "identity-line",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::DisplacementEntry;
    use chrono::NaiveDate;

    fn sample(ratios: &[f64]) -> DisplacementSeries {
        let start = NaiveDate::from_ymd_opt(1990, 1, 5).unwrap();
        DisplacementSeries {
            asset_id: "S".into(),
            entries: ratios
                .iter()
                .enumerate()
                .map(|(i, &r)| DisplacementEntry {
                    week_end: start + chrono::Duration::weeks(i as i64),
                    x_a: 100.0,
                    x_b: 100.0 * (1.0 + r),
                    ratio: r,
                })
                .collect(),
        }
    }

    /// Sample whose empirical frequencies equal the tail law at every
    /// threshold: the k-th largest |x| solves Pr(|x| ≥ X) = k / N.
    fn exact_sample(m: f64, n: usize) -> DisplacementSeries {
        let scale = (2.0 / m).sqrt();
        let ratios: Vec<f64> = (1..=n)
            .map(|k| {
                let x = scale * specfun::erfc_inv((k as f64 / n as f64).sqrt()).unwrap();
                if k % 2 == 0 {
                    x
                } else {
                    -x
                }
            })
            .collect();
        sample(&ratios)
    }

    #[test]
    fn relative_frequency_examples() {
        let s = sample(&[0.01, -0.02, 0.03]);
        assert_eq!(relative_frequency(&s, 0.0).unwrap(), 1.0);
        assert!((relative_frequency(&s, 0.02).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(relative_frequency(&s, 0.5).unwrap(), 0.0);
        assert!(matches!(
            relative_frequency(&sample(&[]), 0.1),
            Err(EstimateError::EmptySample)
        ));
        assert!(relative_frequency(&s, -0.1).is_err());
    }

    #[test]
    fn m_week_examples() {
        assert_eq!(m_week(1.0, 0.02, 1.0).unwrap(), 0.0);
        let params = OscillatorParams::new(500.0, 1.0).unwrap();
        let rho = model::prob_at_least(&params, 0.02).unwrap();
        assert!((m_week(rho, 0.02, 1.0).unwrap() - 500.0).abs() < 500.0 * 1e-10);
        // 2 (erfc⁻¹(0.5) / 0.03)², 40-digit oracle
        let v = m_week(0.25, 0.03, 1.0).unwrap();
        assert!((v - 505.484_914_577_303).abs() < 1e-9);
        assert!(matches!(
            m_week(0.0, 0.02, 1.0),
            Err(EstimateError::InfiniteInertia)
        ));
        assert!(matches!(
            m_week(0.5, 0.0, 1.0),
            Err(EstimateError::ZeroDisplacement(_))
        ));
        assert!(m_week(1.5, 0.02, 1.0).is_err());
        assert_eq!(
            m_week(0.3, -0.02, 1.0).unwrap(),
            m_week(0.3, 0.02, 1.0).unwrap()
        );
    }

    #[test]
    fn r_squared_examples() {
        let p = [0.1, 0.5, 0.2, 0.9];
        assert!((r_squared(&p, &p).unwrap() - 1.0).abs() < 1e-15);
        let affine: Vec<f64> = p.iter().map(|v| 3.0 * v + 0.7).collect();
        assert!((r_squared(&p, &affine).unwrap() - 1.0).abs() < 1e-14);
        assert!((r_squared(&[1.0, 2.0, 3.0], &[1.0, 2.0, 2.0]).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn r_squared_errors() {
        assert!(matches!(
            r_squared(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(EstimateError::LengthMismatch { .. })
        ));
        assert!(matches!(
            r_squared(&[1.0, 2.0], &[1.0, 2.0]),
            Err(EstimateError::TooFewPoints(2))
        ));
        assert!(matches!(
            r_squared(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]),
            Err(EstimateError::DegenerateVariance("observed"))
        ));
    }

    #[test]
    fn identity_line_scoring() {
        let p = [0.1, 0.5, 0.2, 0.9];
        assert_eq!(r_squared_identity(&p, &p).unwrap(), 1.0);
        // An affine map is a perfect Pearson fit but not an identity fit.
        let shifted: Vec<f64> = p.iter().map(|v| v + 0.3).collect();
        assert!(r_squared_identity(&p, &shifted).unwrap() < 1.0);
    }

    #[test]
    fn constructed_fixed_point_recovers_m() {
        let m0 = 977.73;
        let s = exact_sample(m0, 100);
        let fit = fit_m_hat(&s, 1.0, &GridSpec::default()).unwrap();
        assert!((fit.m_hat - m0).abs() / m0 < 1e-6, "m_hat = {}", fit.m_hat);
        assert!(fit.r2 > 1.0 - 1e-12);
        for row in &fit.table {
            assert!((row.pr - row.rho).abs() < 1e-6);
        }
    }

    #[test]
    fn identity_scoring_also_recovers_fixed_point() {
        let m0 = 355.92;
        let s = exact_sample(m0, 60);
        let fit = fit_m_hat_scored(&s, 1.0, &GridSpec::default(), Scoring::IdentityLine).unwrap();
        assert!((fit.m_hat - m0).abs() / m0 < 1e-6);
    }

    #[test]
    fn fit_invariants() {
        let s = exact_sample(500.0, 40);
        let fit = fit_m_hat(&s, 1.0, &GridSpec::default()).unwrap();
        let best = fit.grid.iter().map(|g| g.r2).fold(f64::MIN, f64::max);
        assert_eq!(fit.r2, best);
        assert!(fit
            .table
            .windows(2)
            .all(|w| w[0].threshold < w[1].threshold));
        assert!(fit
            .grid
            .windows(2)
            .all(|w| w[0].m_candidate < w[1].m_candidate));
        assert_eq!(fit.sample_size, 40);
        assert_eq!(fit.grid.len(), DEFAULT_GRID_POINTS + 1);
    }

    #[test]
    fn zero_weeks_count_toward_rho_but_are_not_thresholds() {
        // exact_sample already carries one zero week (k = N).
        let mut r: Vec<f64> = exact_sample(800.0, 30).ratios().collect();
        r.extend([0.0, 0.0]);
        let fit = fit_m_hat(&sample(&r), 1.0, &GridSpec::default()).unwrap();
        assert_eq!(fit.table.len(), 29);
        assert!(fit.table.iter().all(|row| row.threshold > 0.0));
        assert!((fit.table[0].rho - 29.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn duplicate_magnitudes_collapse() {
        let base: Vec<f64> = exact_sample(800.0, 20).ratios().collect();
        let mut r = base.clone();
        r.extend(base.iter().map(|x| -x));
        let fit = fit_m_hat(&sample(&r), 1.0, &GridSpec::default()).unwrap();
        assert_eq!(fit.table.len(), 19);
    }

    #[test]
    fn fit_errors() {
        let small = sample(&[0.01; 5]);
        assert!(matches!(
            fit_m_hat(&small, 1.0, &GridSpec::default()),
            Err(EstimateError::SampleTooSmall(5))
        ));
        let flat = sample(&[
            0.01, -0.01, 0.01, 0.01, -0.01, 0.01, 0.01, 0.01, -0.01, 0.01, 0.01,
        ]);
        assert!(matches!(
            fit_m_hat(&flat, 1.0, &GridSpec::default()),
            Err(EstimateError::DegenerateSample(1))
        ));
        let ok = exact_sample(500.0, 20);
        for grid in [
            GridSpec::with_bounds(0.0, 10.0, 10),
            GridSpec::with_bounds(10.0, 5.0, 10),
            GridSpec::with_bounds(1.0, 5.0, 1),
        ] {
            assert!(matches!(
                fit_m_hat(&ok, 1.0, &grid),
                Err(EstimateError::InvalidGrid(_))
            ));
        }
        assert!(fit_m_hat(&ok, 0.0, &GridSpec::default()).is_err());
    }

    #[test]
    fn explicit_grid_without_refinement_picks_a_grid_point() {
        let s = exact_sample(1000.0, 50);
        let grid = GridSpec {
            bounds: Some((100.0, 10_000.0)),
            points: 201,
            refine: false,
        };
        let fit = fit_m_hat(&s, 1.0, &grid).unwrap();
        assert_eq!(fit.grid.len(), 201);
        assert!(fit.grid.iter().any(|g| g.m_candidate == fit.m_hat));
        // Grid step is 1% in m.
        assert!((fit.m_hat - 1000.0).abs() / 1000.0 < 0.011);
    }

    #[test]
    fn text_and_csv_reports() {
        let fit = fit_m_hat(&exact_sample(977.73, 30), 1.0, &GridSpec::default()).unwrap();
        let text = fit.to_text();
        assert!(text.starts_with("m_hat        977.7"), "{text}");
        assert!(text.contains("sample_size  30"));
        let mut buf = Vec::new();
        fit.write_table_csv(&mut buf).unwrap();
        let table = String::from_utf8(buf).unwrap();
        assert!(table.starts_with("X,rho,pr\n"));
        assert_eq!(table.lines().count(), fit.table.len() + 1);
        let mut buf = Vec::new();
        fit.write_grid_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("m_candidate,r2\n"));
    }
}
