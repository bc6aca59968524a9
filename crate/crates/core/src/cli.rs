//! `osc-markets` command line.
//!
//! Settings resolve in three layers: built-in defaults, then the optional
//! `key = value` file named by `OSC_MARKETS_CONFIG`, then command-line flags.
//! Every output starts with the resolved settings as `#` lines (or a
//! `config` object in structured output), which the CSV readers skip.
//!
//! Exit status: 0 success, 1 usage error, 2 data or validation error,
//! 3 numeric failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::backtest::{self, BacktestConfig, BacktestError};
use crate::estimate::{self, EstimateError, GridSpec, Scoring};
use crate::ingest::{self, DisplacementSeries, IngestError, PriceFormat};
use crate::model::{self, ModelError, OscillatorParams};
use crate::specfun::SpecfunError;
use crate::synth::{self, SynthError, SynthSpec};

pub const CONFIG_ENV: &str = "OSC_MARKETS_CONFIG";

const CONFIG_KEYS: &[&str] = &[
    "input",
    "output",
    "format",
    "t",
    "resample",
    "asset",
    "window",
    "train_count",
    "grid",
    "scoring",
    "seed",
    "m",
    "n",
    "m_hat",
    "prior_close",
    "crash_week",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Model(m) => m.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Specfun(s) => s.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<SpecfunError> for CliError {
    fn from(e: SpecfunError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<EstimateError> for CliError {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::NoFit => CliError::Numeric(e.to_string()),
            EstimateError::Specfun(s) => s.into(),
            EstimateError::Model(m) => m.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<BacktestError> for CliError {
    fn from(e: BacktestError) -> Self {
        match e {
            BacktestError::Ingest(i) => i.into(),
            BacktestError::Estimate(es) => es.into(),
            BacktestError::Model(m) => m.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Model(m) => m.into(),
            SynthError::EmptySample => CliError::Data(e.to_string()),
            SynthError::NonPositivePrice { .. } => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Csv,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Resample {
    None,
    DailyToWeekly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScoringArg {
    Pearson,
    IdentityLine,
}

#[derive(Debug, Parser)]
#[command(
    name = "osc-markets",
    version,
    about = "Inertial-coefficient estimation and extreme-move prediction for weekly prices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a price CSV into weekly displacements.
    Ingest {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Fit the inertial coefficient to a sample of weekly displacements.
    Estimate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Sample window over displacements, START:COUNT.
        #[arg(long, value_name = "START:COUNT")]
        window: Option<String>,
        /// Candidate grid, LO:HI:N.
        #[arg(long, value_name = "LO:HI:N")]
        grid: Option<String>,
        #[arg(long, value_enum)]
        scoring: Option<ScoringArg>,
        /// Also write the `m_candidate,r2` grid trace to this file.
        #[arg(long, value_name = "PATH")]
        grid_output: Option<PathBuf>,
    },
    /// Draw synthetic displacements from the tail law.
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// True inertial coefficient.
        #[arg(long)]
        m: Option<f64>,
        /// Number of draws.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Extreme displacement for a given inertial coefficient.
    Predict {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        m_hat: Option<f64>,
        /// Opening price of the target week; omit for the ratio only.
        #[arg(long)]
        prior_close: Option<f64>,
    },
    /// Fit on a training window and test the bound on a crash week.
    Backtest {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        input: InputArgs,
        /// Training window over displacements, START:COUNT.
        #[arg(long, value_name = "START:COUNT")]
        window: Option<String>,
        #[arg(long)]
        train_count: Option<usize>,
        #[arg(long, value_name = "LO:HI:N")]
        grid: Option<String>,
        /// Week-end date of the crash week.
        #[arg(long, value_name = "YYYY-MM-DD")]
        crash_week: Option<String>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Elapsed-time unit in weeks.
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV; stdin when omitted or `-`.
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Read the input from stdin.
    #[arg(long, conflicts_with = "input")]
    stdin: bool,
    #[arg(long, value_enum)]
    resample: Option<Resample>,
    /// Asset label; defaults to the input file stem.
    #[arg(long)]
    asset: Option<String>,
}

/// `key = value` pairs from the config file.
#[derive(Debug, Default)]
struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn parse(text: &str) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key = value", i + 1))
            })?;
            let key = key.trim().replace('-', "_");
            if !CONFIG_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{key}`",
                    i + 1
                )));
            }
            map.insert(key, value.trim().to_string());
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.0
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    fn get_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| {
                T::from_str(v, true)
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    fn get_str(&self, key: &str) -> Option<String> {
        self.0.get(key).cloned()
    }
}

/// Resolved settings echoed at the top of every output.
#[derive(Debug, Default)]
struct Echo(Vec<(&'static str, String)>);

impl Echo {
    fn push(&mut self, key: &'static str, value: impl ToString) {
        self.0.push((key, value.to_string()));
    }

    fn as_comments(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s
    }

    fn as_map(&self) -> BTreeMap<&'static str, String> {
        self.0.iter().cloned().collect()
    }
}

struct Common {
    output: Option<PathBuf>,
    format: OutputFormat,
    t: f64,
}

fn resolve_common(
    args: CommonArgs,
    file: &FileConfig,
    default_format: OutputFormat,
) -> Result<Common, CliError> {
    let output = args.output.or(file.get_str("output").map(PathBuf::from));
    let format = match args.format {
        Some(f) => f,
        None => file.get_enum("format")?.unwrap_or(default_format),
    };
    let t = match args.t {
        Some(t) => t,
        None => file.get("t")?.unwrap_or(1.0),
    };
    if !(t.is_finite() && t > 0.0) {
        return Err(CliError::Usage(format!("--t must be positive, got {t}")));
    }
    Ok(Common { output, format, t })
}

struct Input {
    path: Option<PathBuf>,
    resample: Resample,
    asset: String,
}

fn resolve_input(args: InputArgs, file: &FileConfig) -> Result<Input, CliError> {
    let path = if args.stdin {
        None
    } else {
        args.input
            .or(file.get_str("input").map(PathBuf::from))
            .filter(|p| p.as_os_str() != "-")
    };
    let resample = match args.resample {
        Some(r) => r,
        None => file.get_enum("resample")?.unwrap_or(Resample::None),
    };
    let asset = args
        .asset
        .or(file.get_str("asset"))
        .or_else(|| {
            path.as_ref()
                .and_then(|p| p.file_stem())
                .map(|s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_else(|| "stdin".to_string());
    Ok(Input {
        path,
        resample,
        asset,
    })
}

fn parse_window(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("window must be START:COUNT, got `{s}`"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_grid(s: &str) -> Result<GridSpec, CliError> {
    let bad = || CliError::Usage(format!("grid must be LO:HI:N, got `{s}`"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [lo, hi, n] = parts[..] else {
        return Err(bad());
    };
    Ok(GridSpec::with_bounds(
        lo.parse().map_err(|_| bad())?,
        hi.parse().map_err(|_| bad())?,
        n.parse().map_err(|_| bad())?,
    ))
}

fn parse_date(s: &str) -> Result<NaiveDate, CliError> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| CliError::Usage(format!("date must be YYYY-MM-DD, got `{s}`: {e}")))
}

fn grid_label(grid: &GridSpec) -> String {
    match grid.bounds {
        Some((lo, hi)) => format!("{lo}:{hi}:{}", grid.points),
        None => format!("auto:{}", grid.points),
    }
}

fn path_label(path: &Option<PathBuf>) -> String {
    path.as_ref()
        .map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn read_input(input: &Input, stdin: &mut dyn Read) -> Result<String, CliError> {
    let bytes = match &input.path {
        Some(p) => fs::read(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
        None => {
            let mut buf = Vec::new();
            stdin.read_to_end(&mut buf)?;
            buf
        }
    };
    String::from_utf8(bytes).map_err(|_| CliError::Data("input is not valid UTF-8".into()))
}

fn is_displacement_csv(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|header| {
            header
                .split(',')
                .any(|h| h.trim().eq_ignore_ascii_case("ratio"))
        })
}

fn price_format(resample: Resample) -> PriceFormat {
    match resample {
        Resample::None => PriceFormat::WeeklyCsv,
        Resample::DailyToWeekly => PriceFormat::DailyCsv,
    }
}

fn load_prices(input: &Input, stdin: &mut dyn Read) -> Result<ingest::PriceSeries, CliError> {
    let text = read_input(input, stdin)?;
    Ok(ingest::parse_prices(
        text.as_bytes(),
        price_format(input.resample),
        &input.asset,
    )?)
}

/// Prices are converted; a displacement CSV is read as-is.
fn load_displacements(input: &Input, stdin: &mut dyn Read) -> Result<DisplacementSeries, CliError> {
    let text = read_input(input, stdin)?;
    if is_displacement_csv(&text) {
        Ok(ingest::parse_displacements(text.as_bytes(), &input.asset)?)
    } else {
        let prices =
            ingest::parse_prices(text.as_bytes(), price_format(input.resample), &input.asset)?;
        Ok(ingest::to_displacements(&prices)?)
    }
}

fn resample_label(r: Resample) -> &'static str {
    match r {
        Resample::None => "none",
        Resample::DailyToWeekly => "daily-to-weekly",
    }
}

fn format_label(f: OutputFormat) -> &'static str {
    match f {
        OutputFormat::Text => "text",
        OutputFormat::Csv => "csv",
        OutputFormat::Structured => "structured",
    }
}

fn structured<T: Serialize>(echo: &Echo, result: &T) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        config: BTreeMap<&'static str, String>,
        result: &'a T,
    }
    let doc = Doc {
        config: echo.as_map(),
        result,
    };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_string(
    write: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>,
) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Data(e.to_string()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Data(e.to_string())
}

fn emit(output: &Option<PathBuf>, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => {
            fs::write(path, body).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        }
        None => stdout.write_all(body.as_bytes())?,
    }
    Ok(())
}

fn displacement_text(series: &DisplacementSeries) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "asset {}  weeks {}", series.asset_id, series.len());
    let _ = writeln!(
        s,
        "{:>10} {:>14} {:>14} {:>12}",
        "week_end", "x_a", "x_b", "ratio"
    );
    for e in &series.entries {
        let _ = writeln!(
            s,
            "{:>10} {:>14.4} {:>14.4} {:>12.6}",
            e.week_end, e.x_a, e.x_b, e.ratio
        );
    }
    s
}

fn run_command(
    cli: Cli,
    file: &FileConfig,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let mut echo = Echo::default();
    match cli.command {
        Command::Ingest { common, input } => {
            let common = resolve_common(common, file, OutputFormat::Text)?;
            let input = resolve_input(input, file)?;
            echo.push("command", "ingest");
            echo.push("input", path_label(&input.path));
            echo.push("asset", &input.asset);
            echo.push("resample", resample_label(input.resample));
            echo.push("format", format_label(common.format));
            let prices = load_prices(&input, stdin)?;
            let series = ingest::to_displacements(&prices)?;
            let body = match common.format {
                OutputFormat::Text => echo.as_comments() + &displacement_text(&series),
                OutputFormat::Csv => {
                    echo.as_comments()
                        + &csv_string(|b| Ok(ingest::write_displacements_csv(&series, b)?))?
                }
                OutputFormat::Structured => structured(&echo, &series)?,
            };
            emit(&common.output, &body, stdout)
        }
        Command::Estimate {
            common,
            input,
            window,
            grid,
            scoring,
            grid_output,
        } => {
            let common = resolve_common(common, file, OutputFormat::Text)?;
            let input = resolve_input(input, file)?;
            let window = match window.or(file.get_str("window")) {
                Some(w) => Some(parse_window(&w)?),
                None => None,
            };
            let grid = match grid.or(file.get_str("grid")) {
                Some(g) => parse_grid(&g)?,
                None => GridSpec::default(),
            };
            let scoring = match scoring {
                Some(s) => s,
                None => file.get_enum("scoring")?.unwrap_or(ScoringArg::Pearson),
            };
            let scoring = match scoring {
                ScoringArg::Pearson => Scoring::Pearson,
                ScoringArg::IdentityLine => Scoring::IdentityLine,
            };
            echo.push("command", "estimate");
            echo.push("input", path_label(&input.path));
            echo.push("asset", &input.asset);
            echo.push("resample", resample_label(input.resample));
            echo.push("t", common.t);
            echo.push(
                "window",
                window.map_or_else(|| "all".to_string(), |(s, c)| format!("{s}:{c}")),
            );
            echo.push("grid", grid_label(&grid));
            echo.push("scoring", estimate::scoring_name(scoring));
            echo.push("format", format_label(common.format));

            let all = load_displacements(&input, stdin)?;
            let sample = match window {
                Some((start, count)) => ingest::window(&all, start, count)?,
                None => all,
            };
            let fit = estimate::fit_m_hat_scored(&sample, common.t, &grid, scoring)?;
            if let Some(path) = &grid_output {
                let body =
                    echo.as_comments() + &csv_string(|b| fit.write_grid_csv(b).map_err(csv_err))?;
                emit(&Some(path.clone()), &body, stdout)?;
            }
            let body = match common.format {
                OutputFormat::Text => echo.as_comments() + &fit.to_text(),
                OutputFormat::Csv => {
                    echo.as_comments() + &csv_string(|b| fit.write_table_csv(b).map_err(csv_err))?
                }
                OutputFormat::Structured => structured(&echo, &fit)?,
            };
            emit(&common.output, &body, stdout)
        }
        Command::Synth { common, m, n, seed } => {
            let common = resolve_common(common, file, OutputFormat::Csv)?;
            let m = m
                .or(file.get("m")?)
                .ok_or_else(|| CliError::Usage("synth requires --m".into()))?;
            let n = n
                .or(file.get("n")?)
                .ok_or_else(|| CliError::Usage("synth requires --n".into()))?;
            let seed = match seed {
                Some(s) => s,
                None => file.get("seed")?.unwrap_or(0),
            };
            echo.push("command", "synth");
            echo.push("m", m);
            echo.push("t", common.t);
            echo.push("n", n);
            echo.push("seed", seed);
            echo.push("format", format_label(common.format));
            let spec = SynthSpec::new(m, common.t, n, seed);
            let series = synth::sample_displacements(&spec)?;
            let body = match common.format {
                OutputFormat::Text => echo.as_comments() + &displacement_text(&series),
                OutputFormat::Csv => {
                    echo.as_comments()
                        + &csv_string(|b| Ok(ingest::write_displacements_csv(&series, b)?))?
                }
                OutputFormat::Structured => structured(&echo, &series)?,
            };
            emit(&common.output, &body, stdout)
        }
        Command::Predict {
            common,
            m_hat,
            prior_close,
        } => {
            let common = resolve_common(common, file, OutputFormat::Text)?;
            let m_hat = m_hat
                .or(file.get("m_hat")?)
                .ok_or_else(|| CliError::Usage("predict requires --m-hat".into()))?;
            let prior_close = prior_close.or(file.get("prior_close")?);
            echo.push("command", "predict");
            echo.push("m_hat", m_hat);
            echo.push("t", common.t);
            echo.push(
                "prior_close",
                prior_close.map_or("none".to_string(), |p| p.to_string()),
            );
            echo.push("format", format_label(common.format));

            #[derive(Serialize)]
            struct Prediction {
                m_hat: f64,
                t: f64,
                extreme_ratio: f64,
                prior_close: Option<f64>,
                extreme_points: Option<f64>,
            }
            let params = OscillatorParams::new(m_hat, common.t)?;
            let extreme_ratio = model::extreme_displacement(&params);
            let extreme_points = prior_close
                .map(|p| backtest::predict_extreme_points(m_hat, common.t, p))
                .transpose()?;
            let pred = Prediction {
                m_hat,
                t: common.t,
                extreme_ratio,
                prior_close,
                extreme_points,
            };
            let body = match common.format {
                OutputFormat::Text => {
                    let mut s = echo.as_comments();
                    let _ = writeln!(s, "extreme_ratio   {extreme_ratio:.6}");
                    if let Some(points) = extreme_points {
                        let _ = writeln!(s, "extreme_points  {points:.2}");
                    }
                    s
                }
                OutputFormat::Csv => {
                    let mut s = echo.as_comments();
                    s.push_str("m_hat,t,extreme_ratio,prior_close,extreme_points\n");
                    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
                    let _ = writeln!(
                        s,
                        "{m_hat},{},{extreme_ratio},{},{}",
                        common.t,
                        opt(prior_close),
                        opt(extreme_points)
                    );
                    s
                }
                OutputFormat::Structured => structured(&echo, &pred)?,
            };
            emit(&common.output, &body, stdout)
        }
        Command::Backtest {
            common,
            input,
            window,
            train_count,
            grid,
            crash_week,
        } => {
            let common = resolve_common(common, file, OutputFormat::Text)?;
            let input = resolve_input(input, file)?;
            let (start, mut count) = match window.or(file.get_str("window")) {
                Some(w) => parse_window(&w)?,
                None => (0, backtest::DEFAULT_TRAIN_COUNT),
            };
            if let Some(c) = train_count.or(file.get("train_count")?) {
                count = c;
            }
            let grid = match grid.or(file.get_str("grid")) {
                Some(g) => parse_grid(&g)?,
                None => GridSpec::default(),
            };
            let crash = crash_week
                .or(file.get_str("crash_week"))
                .ok_or_else(|| CliError::Usage("backtest requires --crash-week".into()))?;
            let crash = parse_date(&crash)?;
            echo.push("command", "backtest");
            echo.push("input", path_label(&input.path));
            echo.push("asset", &input.asset);
            echo.push("resample", resample_label(input.resample));
            echo.push("t", common.t);
            echo.push("window", format!("{start}:{count}"));
            echo.push("grid", grid_label(&grid));
            echo.push("crash_week", crash);
            echo.push("format", format_label(common.format));

            let prices = load_prices(&input, stdin)?;
            let config = BacktestConfig {
                train_start_index: start,
                train_count: count,
                crash_week_end: crash,
                t: common.t,
                grid,
            };
            let report = backtest::run_backtest(&prices, &config)?;
            let body = match common.format {
                OutputFormat::Text => echo.as_comments() + &report.to_text(),
                OutputFormat::Csv => {
                    echo.as_comments()
                        + &csv_string(|b| {
                            let mut w = csv::Writer::from_writer(b);
                            w.serialize(&report).map_err(csv_err)?;
                            w.flush()?;
                            Ok(())
                        })?
                }
                OutputFormat::Structured => structured(&echo, &report)?,
            };
            emit(&common.output, &body, stdout)
        }
    }
}

/// Runs one invocation against the given streams and returns the exit status.
pub fn run<I, T>(
    args: I,
    config_file: Option<&Path>,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    1
                }
            };
        }
    };
    let result = config_file
        .map(FileConfig::load)
        .transpose()
        .map(Option::unwrap_or_default)
        .and_then(|file| run_command(cli, &file, stdin, stdout));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Process entry point: real streams and `OSC_MARKETS_CONFIG`.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = std::env::var_os(CONFIG_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let code = run(
        args,
        config.as_deref(),
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    );
    let _ = io::stdout().flush();
    code
}
