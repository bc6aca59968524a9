//! Weekly price history: CSV parsing, daily-to-weekly resampling and
//! conversion to displacement ratios.
//!
//! Input is UTF-8 CSV with a `date,close` header (extra columns ignored,
//! `#` lines skipped). Dates are `YYYY-MM-DD`. A week is an ISO-8601 week
//! (Monday to Sunday) and its value is the last close inside it. Missing
//! weeks are not filled: the next displacement simply spans the gap.

use std::collections::HashSet;
use std::io::{Read, Write};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{self, Displacement, ModelError};

pub const WEEKLY_UNIT: &str = "1 trading week";
const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input is not valid UTF-8 CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing required column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("no rows")]
    NoRows,
    #[error("line {line}: price must be positive, got {value}")]
    NonPositivePrice { line: u64, value: f64 },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
    #[error("need at least 2 price points to form a displacement, got {0}")]
    TooFewPoints(usize),
    #[error("window {start}+{count} exceeds series length {len}")]
    OutOfRange {
        start: usize,
        count: usize,
        len: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How the rows of a price file are spaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriceFormat {
    WeeklyCsv,
    /// Daily closes, resampled to the last close of each ISO week.
    DailyCsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PricePoint {
    pub week_end: NaiveDate,
    pub close: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub asset_id: String,
    pub unit: String,
    pub points: Vec<PricePoint>,
}

impl PriceSeries {
    /// Validates ordering and positivity. Points must already be sorted.
    pub fn new(asset_id: impl Into<String>, points: Vec<PricePoint>) -> Result<Self, IngestError> {
        if points.is_empty() {
            return Err(IngestError::NoRows);
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.close.is_finite() && p.close > 0.0) {
                return Err(IngestError::NonPositivePrice {
                    line: i as u64 + 1,
                    value: p.close,
                });
            }
        }
        for w in points.windows(2) {
            if w[1].week_end == w[0].week_end {
                return Err(IngestError::DuplicateDate(w[1].week_end));
            }
            if w[1].week_end < w[0].week_end {
                return Err(IngestError::Parse {
                    line: 0,
                    message: format!("dates out of order at {}", w[1].week_end),
                });
            }
        }
        Ok(Self {
            asset_id: asset_id.into(),
            unit: WEEKLY_UNIT.to_string(),
            points,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn closes(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.close)
    }
}

/// A displacement tagged with the date its closing price was observed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementEntry {
    pub week_end: NaiveDate,
    pub x_a: f64,
    pub x_b: f64,
    pub ratio: f64,
}

impl DisplacementEntry {
    pub fn new(week_end: NaiveDate, d: Displacement) -> Self {
        Self {
            week_end,
            x_a: d.x_a,
            x_b: d.x_b,
            ratio: d.ratio,
        }
    }

    pub fn displacement(&self) -> Displacement {
        Displacement {
            x_a: self.x_a,
            x_b: self.x_b,
            ratio: self.ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementSeries {
    pub asset_id: String,
    pub entries: Vec<DisplacementEntry>,
}

impl DisplacementSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.ratio)
    }

    pub fn position_of(&self, week_end: NaiveDate) -> Option<usize> {
        self.entries.iter().position(|e| e.week_end == week_end)
    }
}

/// Parses a price CSV into a validated, date-sorted series.
///
/// Rows may arrive in any date order (several vendors export newest first);
/// they are sorted before validation. A duplicate date is an error.
pub fn parse_prices<R: Read>(
    input: R,
    format: PriceFormat,
    asset_id: &str,
) -> Result<PriceSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or(IngestError::MissingColumn(name))
    };
    let date_col = column("date")?;
    let close_col = column("close")?;

    let mut rows: Vec<(PricePoint, u64)> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |idx: usize| {
            record.get(idx).ok_or_else(|| IngestError::Parse {
                line,
                message: format!("expected at least {} fields, got {}", idx + 1, record.len()),
            })
        };
        let raw_date = field(date_col)?;
        let week_end =
            NaiveDate::parse_from_str(raw_date, DATE_FORMAT).map_err(|e| IngestError::Parse {
                line,
                message: format!("bad date `{raw_date}`: {e}"),
            })?;
        let raw_close = field(close_col)?;
        let close: f64 = raw_close.parse().map_err(|_| IngestError::Parse {
            line,
            message: format!("bad price `{raw_close}`"),
        })?;
        if !close.is_finite() {
            return Err(IngestError::Parse {
                line,
                message: format!("bad price `{raw_close}`"),
            });
        }
        if close <= 0.0 {
            return Err(IngestError::NonPositivePrice { line, value: close });
        }
        rows.push((PricePoint { week_end, close }, line));
    }
    if rows.is_empty() {
        return Err(IngestError::NoRows);
    }

    rows.sort_by_key(|(p, _)| p.week_end);
    let mut seen = HashSet::with_capacity(rows.len());
    for (p, _) in &rows {
        if !seen.insert(p.week_end) {
            return Err(IngestError::DuplicateDate(p.week_end));
        }
    }
    let points: Vec<PricePoint> = rows.into_iter().map(|(p, _)| p).collect();
    let points = match format {
        PriceFormat::WeeklyCsv => points,
        PriceFormat::DailyCsv => resample_weekly(&points),
    };
    PriceSeries::new(asset_id, points)
}

/// Keeps the last point of each ISO week. Input must be date-sorted.
pub fn resample_weekly(points: &[PricePoint]) -> Vec<PricePoint> {
    let mut out: Vec<PricePoint> = Vec::new();
    for p in points {
        match out.last_mut() {
            Some(last) if last.week_end.iso_week() == p.week_end.iso_week() => *last = *p,
            _ => out.push(*p),
        }
    }
    out
}

/// Week-over-week displacement ratios; each opening price is the prior close.
pub fn to_displacements(series: &PriceSeries) -> Result<DisplacementSeries, IngestError> {
    if series.points.len() < 2 {
        return Err(IngestError::TooFewPoints(series.points.len()));
    }
    let entries = series
        .points
        .windows(2)
        .map(|w| {
            let d = model::displacement_ratio(w[0].close, w[1].close)?;
            Ok(DisplacementEntry::new(w[1].week_end, d))
        })
        .collect::<Result<Vec<_>, IngestError>>()?;
    Ok(DisplacementSeries {
        asset_id: series.asset_id.clone(),
        entries,
    })
}

/// Contiguous sub-series `[start, start + count)`.
pub fn window(
    series: &DisplacementSeries,
    start: usize,
    count: usize,
) -> Result<DisplacementSeries, IngestError> {
    let end = start
        .checked_add(count)
        .filter(|&end| end <= series.len())
        .ok_or(IngestError::OutOfRange {
            start,
            count,
            len: series.len(),
        })?;
    Ok(DisplacementSeries {
        asset_id: series.asset_id.clone(),
        entries: series.entries[start..end].to_vec(),
    })
}

/// Writes `week_end,x_a,x_b,ratio` rows.
pub fn write_displacements_csv<W: Write>(
    series: &DisplacementSeries,
    out: W,
) -> Result<(), IngestError> {
    let mut writer = csv::Writer::from_writer(out);
    for e in &series.entries {
        writer.serialize(e)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads the `week_end,x_a,x_b,ratio` format back. The ratio column is
/// taken as-is.
pub fn parse_displacements<R: Read>(
    input: R,
    asset_id: &str,
) -> Result<DisplacementSeries, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut entries = Vec::new();
    for row in reader.deserialize::<DisplacementEntry>() {
        let entry = row.map_err(|e| IngestError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if !(entry.ratio.is_finite() && entry.ratio > -1.0) {
            return Err(ModelError::InvalidRatio(entry.ratio).into());
        }
        entries.push(entry);
    }
    if entries.is_empty() {
        return Err(IngestError::NoRows);
    }
    Ok(DisplacementSeries {
        asset_id: asset_id.to_string(),
        entries,
    })
}
