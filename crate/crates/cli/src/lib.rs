//! `macrostate` command-line front end.
//!
//! ```text
//! macrostate compute    --input f.csv --symbol AAA [--market BVB] [--from D] [--to D]
//! macrostate rank       --input f.csv [--symbol S] [--market M]
//! macrostate compare    --input f.csv --labels RRC@BVB,DE_RRC_MAR@BMFMS
//! macrostate volatility --input f.csv --symbol AAA --kind simple|log|normalized
//! macrostate precinct   --input f.csv --symbol AAA --axes pvz|tvz
//! ```
//!
//! Results go to stdout only once the whole command has succeeded.
//! Exit codes: 0 success, 1 data error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use macrostate_core::{
    compare_markets, log_volatility, macrostate_report, normalized_volatility, parse_dataset,
    precinct_points, render, risk_scale, simple_volatility, slice_window, ActivityMode,
    AggregationMode, Dataset, DateWindow, InstrumentSeries, MacrostateReport, OutputFormat,
    ParseOptions, PrecinctAxes, Renderable, StepKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "macrostate",
    version,
    about = "Macrostate parameter and market temperature of price/volume series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-step volatility of one series.
    Volatility {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[arg(long, default_value = "normalized", value_parser = parse_kind)]
        kind: StepKind,
    },
    /// Macrostate report for one series.
    Compute {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[command(flatten)]
        agg: AggArgs,
    },
    /// Risk scale over every series in the file, optionally filtered.
    Rank {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        symbol: Option<String>,
        #[arg(long)]
        market: Option<String>,
        #[command(flatten)]
        agg: AggArgs,
    },
    /// Side-by-side reports for `symbol@market` labels.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, required = true, value_delimiter = ',')]
        labels: Vec<String>,
        #[command(flatten)]
        agg: AggArgs,
    },
    /// Precinct point cloud of one series.
    Precinct {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        select: SelectArgs,
        #[arg(long, default_value = "pvz")]
        axes: PrecinctAxes,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, value_name = "PATH")]
    input: PathBuf,
    #[arg(long, value_name = "YYYY-MM-DD", value_parser = parse_date)]
    from: Option<NaiveDate>,
    #[arg(long, value_name = "YYYY-MM-DD", value_parser = parse_date)]
    to: Option<NaiveDate>,
    #[arg(long, default_value = "pv")]
    mode: ActivityMode,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    sort_dates: bool,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(long, required = true)]
    symbol: String,
    #[arg(long)]
    market: Option<String>,
}

#[derive(Debug, Args)]
struct AggArgs {
    #[arg(long, default_value = "signed")]
    agg: AggregationMode,
    #[arg(long, value_name = "X", value_parser = parse_kb)]
    kb: Option<f64>,
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    let ok_shape = s.len() == 10 && s.as_bytes()[4] == b'-' && s.as_bytes()[7] == b'-';
    ok_shape
        .then(|| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok())
        .flatten()
        .ok_or_else(|| format!("invalid date {s:?}, expected YYYY-MM-DD"))
}

fn parse_kind(s: &str) -> Result<StepKind, String> {
    match s {
        "simple" => Ok(StepKind::Simple),
        "log" => Ok(StepKind::Log),
        "normalized" => Ok(StepKind::Normalized),
        _ => Err(format!("unknown kind {s:?} (simple|log|normalized)")),
    }
}

fn parse_kb(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("--kb must be a positive number, got {s:?}")),
    }
}

/// Everything a command needs, validated before any data is read.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub input_path: PathBuf,
    pub symbol: Option<String>,
    pub market: Option<String>,
    pub window: DateWindow,
    pub activity_mode: ActivityMode,
    pub aggregation: AggregationMode,
    pub format: Option<OutputFormat>,
    pub sort_dates: bool,
    pub kb_override: Option<f64>,
}

#[derive(Debug)]
enum Task {
    Volatility(StepKind),
    Compute,
    Rank,
    Compare(Vec<String>),
    Precinct(PrecinctAxes),
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data { code: &'static str, message: String },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data { .. } => EXIT_DATA,
        }
    }
}

impl From<macrostate_core::Error> for CliError {
    fn from(e: macrostate_core::Error) -> Self {
        CliError::Data {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

fn data_error(code: &'static str, message: impl Into<String>) -> CliError {
    CliError::Data {
        code,
        message: message.into(),
    }
}

/// Exit code the CLI uses for a library error. Every library error is a data
/// error.
pub fn exit_code_for(_: &macrostate_core::Error) -> i32 {
    EXIT_DATA
}

fn into_config(cli: Cli) -> Result<(CliConfig, Task), CliError> {
    let (common, symbol, market, agg, task) = match cli.command {
        Command::Volatility {
            common,
            select,
            kind,
        } => (
            common,
            Some(select.symbol),
            select.market,
            None,
            Task::Volatility(kind),
        ),
        Command::Compute {
            common,
            select,
            agg,
        } => (
            common,
            Some(select.symbol),
            select.market,
            Some(agg),
            Task::Compute,
        ),
        Command::Rank {
            common,
            symbol,
            market,
            agg,
        } => (common, symbol, market, Some(agg), Task::Rank),
        Command::Compare {
            common,
            labels,
            agg,
        } => (common, None, None, Some(agg), Task::Compare(labels)),
        Command::Precinct {
            common,
            select,
            axes,
        } => (
            common,
            Some(select.symbol),
            select.market,
            None,
            Task::Precinct(axes),
        ),
    };
    let window = DateWindow::new(common.from, common.to)
        .map_err(|e| CliError::Usage(format!("--from/--to: {e}")))?;
    let config = CliConfig {
        input_path: common.input,
        symbol,
        market,
        window,
        activity_mode: common.mode,
        aggregation: agg.as_ref().map(|a| a.agg).unwrap_or_default(),
        format: common.format,
        sort_dates: common.sort_dates,
        kb_override: agg.and_then(|a| a.kb),
    };
    Ok((config, task))
}

fn load(config: &CliConfig) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(&config.input_path).map_err(|e| {
        data_error(
            "IO_ERROR",
            format!("cannot read {}: {e}", config.input_path.display()),
        )
    })?;
    let options = ParseOptions {
        sort_dates: config.sort_dates,
        default_market: None,
    };
    parse_dataset(&text, &options)
        .map_err(|e| data_error(e.code(), format!("{}: {e}", config.input_path.display())))
}

fn find<'a>(
    dataset: &'a Dataset,
    symbol: &str,
    market: Option<&str>,
) -> Result<&'a InstrumentSeries, CliError> {
    if let Some(market) = market {
        return dataset.get(symbol, market).ok_or_else(|| {
            data_error(
                "SERIES_NOT_FOUND",
                format!("no series {symbol}@{market} in input"),
            )
        });
    }
    match dataset.by_symbol(symbol)[..] {
        [s] => Ok(s),
        [] => Err(data_error(
            "SERIES_NOT_FOUND",
            format!("no series for symbol {symbol} in input"),
        )),
        [a, b, ..] => Err(data_error(
            "AMBIGUOUS_SYMBOL",
            format!(
                "symbol {symbol} trades on several markets ({}, {}, ...); pass --market",
                a.market(),
                b.market()
            ),
        )),
    }
}

fn report_for(series: &InstrumentSeries, config: &CliConfig) -> Result<MacrostateReport, CliError> {
    let report = macrostate_report(
        series,
        &config.window,
        config.activity_mode,
        config.aggregation,
    )?;
    Ok(match config.kb_override {
        Some(kb) => report.with_kb(kb)?,
        None => report,
    })
}

fn emit<T: Renderable + ?Sized>(value: &T, config: &CliConfig) -> String {
    render(
        value,
        config.format.unwrap_or_else(|| value.default_format()),
    )
}

fn with_window<T>(
    series: &InstrumentSeries,
    config: &CliConfig,
    result: Result<T, macrostate_core::Error>,
) -> Result<T, CliError> {
    result.map_err(|e| {
        macrostate_core::Error::in_series(series.symbol(), series.market(), config.window, e).into()
    })
}

fn execute(config: &CliConfig, task: &Task) -> Result<String, CliError> {
    let dataset = load(config)?;
    let selected = || {
        find(
            &dataset,
            config
                .symbol
                .as_deref()
                .expect("symbol is required by the parser"),
            config.market.as_deref(),
        )
    };
    match task {
        Task::Compute => Ok(emit(&report_for(selected()?, config)?, config)),
        Task::Volatility(kind) => {
            let series = selected()?;
            let sliced = slice_window(series, &config.window);
            Ok(match kind {
                StepKind::Simple => emit(
                    &with_window(series, config, simple_volatility(&sliced))?,
                    config,
                ),
                StepKind::Log => emit(
                    &with_window(series, config, log_volatility(&sliced))?,
                    config,
                ),
                StepKind::Normalized => emit(
                    &with_window(
                        series,
                        config,
                        normalized_volatility(&sliced, config.activity_mode),
                    )?,
                    config,
                ),
            })
        }
        Task::Precinct(axes) => {
            let series = selected()?;
            let sliced = slice_window(series, &config.window);
            let points = with_window(
                series,
                config,
                precinct_points(&sliced, config.activity_mode, *axes),
            )?;
            Ok(emit(&points[..], config))
        }
        Task::Rank => {
            let universe: Vec<&InstrumentSeries> = dataset
                .series()
                .filter(|s| config.symbol.as_deref().is_none_or(|sym| s.symbol() == sym))
                .filter(|s| config.market.as_deref().is_none_or(|m| s.market() == m))
                .collect();
            // Collecting into Result keeps the first failure in key order.
            let reports = universe
                .par_iter()
                .map(|s| report_for(s, config))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(emit(&risk_scale(&reports)?, config))
        }
        Task::Compare(labels) => {
            let mut reports = Vec::with_capacity(labels.len());
            for label in labels {
                let (symbol, market) = match label.split_once('@') {
                    Some((s, m)) => (s, Some(m)),
                    None => (label.as_str(), None),
                };
                let series = find(&dataset, symbol, market)?;
                reports.push((label.clone(), report_for(series, config)?));
            }
            Ok(emit(&compare_markets(reports)?, config))
        }
    }
}

/// Runs one invocation with explicit output streams and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    let result = into_config(cli).and_then(|(config, task)| execute(&config, &task));
    match result {
        Ok(output) => {
            if let Err(e) = stdout
                .write_all(output.as_bytes())
                .and_then(|_| stdout.flush())
            {
                let _ = writeln!(stderr, "error: cannot write output: {e}");
                return EXIT_DATA;
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = match &e {
                CliError::Usage(msg) => writeln!(stderr, "error: {msg}"),
                CliError::Data { code, message } => writeln!(stderr, "error: {code}: {message}"),
            };
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<(CliConfig, Task), CliError> {
        let cli = Cli::try_parse_from(std::iter::once("macrostate").chain(args.iter().copied()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        into_config(cli)
    }

    #[test]
    fn defaults_match_library_defaults() {
        let (config, task) = parse(&["compute", "--input", "f.csv", "--symbol", "AAA"]).unwrap();
        assert!(matches!(task, Task::Compute));
        assert_eq!(
            config,
            CliConfig {
                input_path: "f.csv".into(),
                symbol: Some("AAA".into()),
                market: None,
                window: DateWindow::open(),
                activity_mode: ActivityMode::PriceTimesVolume,
                aggregation: AggregationMode::Signed,
                format: None,
                sort_dates: false,
                kb_override: None,
            }
        );
    }

    #[test]
    fn every_flag_maps_onto_config() {
        let (config, _) = parse(&[
            "rank",
            "--input",
            "f.csv",
            "--symbol",
            "S",
            "--market",
            "M",
            "--from",
            "2006-01-01",
            "--to",
            "2006-01-31",
            "--mode",
            "v_over_p",
            "--agg",
            "abs",
            "--format",
            "json",
            "--sort-dates",
            "--kb",
            "0.5",
        ])
        .unwrap();
        let d = |day| NaiveDate::from_ymd_opt(2006, 1, day).unwrap();
        assert_eq!(
            config.window,
            DateWindow::new(Some(d(1)), Some(d(31))).unwrap()
        );
        assert_eq!(config.activity_mode, ActivityMode::VolumeOverPrice);
        assert_eq!(config.aggregation, AggregationMode::Absolute);
        assert_eq!(config.format, Some(OutputFormat::Json));
        assert!(config.sort_dates);
        assert_eq!(config.kb_override, Some(0.5));
        assert_eq!(config.market.as_deref(), Some("M"));
    }

    #[test]
    fn usage_errors() {
        let bad: &[&[&str]] = &[
            &["compute", "--input", "f.csv"],
            &["compute", "--symbol", "A"],
            &["compute", "--input", "f", "--symbol", "A", "--kind", "log"],
            &["compute", "--input", "f", "--symbol", "A", "--mode", "pxv"],
            &["compute", "--input", "f", "--symbol", "A", "--agg", "mean"],
            &["compute", "--input", "f", "--symbol", "A", "--kb", "0"],
            &["compute", "--input", "f", "--symbol", "A", "--kb", "-2"],
            &[
                "compute", "--input", "f", "--symbol", "A", "--from", "2006-1-1",
            ],
            &[
                "compute",
                "--input",
                "f",
                "--symbol",
                "A",
                "--from",
                "2006-02-01",
                "--to",
                "2006-01-01",
            ],
            &[
                "volatility",
                "--input",
                "f",
                "--symbol",
                "A",
                "--kind",
                "ewma",
            ],
            &["precinct", "--input", "f", "--symbol", "A", "--axes", "xyz"],
            &["precinct", "--input", "f", "--symbol", "A", "--agg", "abs"],
            &["compare", "--input", "f"],
            &["frobnicate"],
        ];
        for args in bad {
            let mut out = Vec::new();
            let mut err = Vec::new();
            let argv = std::iter::once("macrostate").chain(args.iter().copied());
            assert_eq!(run_with(argv, &mut out, &mut err), EXIT_USAGE, "{args:?}");
            assert!(out.is_empty());
            assert!(!err.is_empty());
        }
    }

    #[test]
    fn labels_split_on_commas() {
        let (_, task) = parse(&["compare", "--input", "f", "--labels", "RRC@BVB,SNP"]).unwrap();
        match task {
            Task::Compare(labels) => assert_eq!(labels, ["RRC@BVB", "SNP"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn help_goes_to_stdout() {
        let mut out = Vec::new();
        let mut err = Vec::new();
        assert_eq!(
            run_with(["macrostate", "--help"], &mut out, &mut err),
            EXIT_OK
        );
        assert!(String::from_utf8(out).unwrap().contains("compute"));
    }

    #[test]
    fn library_errors_are_data_errors() {
        use macrostate_core::Error;
        for e in [
            Error::MixedParameters("window"),
            Error::EmptyUniverse,
            Error::AllStepsSkipped,
        ] {
            assert_eq!(exit_code_for(&e), EXIT_DATA);
            assert_eq!(CliError::from(e).exit_code(), EXIT_DATA);
        }
    }
}
