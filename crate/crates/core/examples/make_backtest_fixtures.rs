//! Writes the synthetic crash-week fixtures under `tests/fixtures/`.
//!
//! Training weeks come from the tail-law sampler. After a few filler weeks
//! the last week falls by a chosen multiple of the extreme displacement
//! implied by the fit on the first 100 displacements.
//!
//! ```text
//! cargo run -p osc-markets --example make_backtest_fixtures
//! ```

use std::error::Error;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use osc_markets::ingest::{self, PricePoint, PriceSeries};
use osc_markets::model;
use osc_markets::synth::{draw_ratios, SynthSpec};
use osc_markets::{fit_m_hat, GridSpec};

const TRAIN: usize = 100;
const FILLER: usize = 10;
const SEED: u64 = 1980;
const M_TRUE: f64 = 977.73;

fn main() -> Result<(), Box<dyn Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    fs::create_dir_all(&dir)?;
    for (name, multiple) in [("crash_064.csv", 0.64), ("crash_110.csv", 1.1)] {
        let body = fixture(multiple)?;
        fs::write(dir.join(name), body)?;
        println!("wrote {name}");
    }
    Ok(())
}

fn fixture(multiple: f64) -> Result<String, Box<dyn Error>> {
    let spec = SynthSpec::new(M_TRUE, 1.0, TRAIN + FILLER, SEED);
    let ratios = draw_ratios(&spec, 0, TRAIN + FILLER)?;
    let start = NaiveDate::from_ymd_opt(1980, 6, 20).expect("valid date");
    let mut close: f64 = 100.0;
    let mut points = vec![PricePoint {
        week_end: start,
        close,
    }];
    for (i, r) in ratios.iter().enumerate() {
        close *= 1.0 + r;
        points.push(PricePoint {
            week_end: start + chrono::Duration::weeks(i as i64 + 1),
            close,
        });
    }

    let series = PriceSeries::new("SYN", points.clone())?;
    let training = ingest::window(&ingest::to_displacements(&series)?, 0, TRAIN)?;
    let fit = fit_m_hat(&training, 1.0, &GridSpec::default())?;
    let r = model::extreme_displacement(&fit.params()?);
    let prior = points.last().expect("non-empty").close;
    points.push(PricePoint {
        week_end: start + chrono::Duration::weeks((TRAIN + FILLER) as i64 + 1),
        close: prior * (1.0 - multiple * r),
    });

    let mut out = String::new();
    writeln!(
        out,
        "# synthetic weekly closes, m = {M_TRUE}, seed = {SEED}"
    )?;
    writeln!(out, "# last week falls by {multiple} R, R fitted on the first {TRAIN} displacements (m_hat = {})", fit.m_hat)?;
    writeln!(out, "date,close")?;
    for p in &points {
        writeln!(out, "{},{}", p.week_end, p.close)?;
    }
    Ok(out)
}
