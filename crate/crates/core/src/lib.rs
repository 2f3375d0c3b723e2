//! Econophysics risk indicators over price/volume time series.
//!
//! The pipeline is: [`ingest`] a delimited file into a [`Dataset`], slice a
//! [`DateWindow`], compute per-step [`indicators`], aggregate the normalized
//! volatility into a [`MacrostateReport`] (macrostate parameter, economic
//! entropy, effective multiplicity, market temperature), then order a
//! universe of reports into a [`RiskScale`] or lay them side by side in a
//! [`MarketComparison`]. The [`report`] module renders every result as CSV
//! or JSON.

pub mod error;
pub mod indicators;
pub mod ingest;
pub mod macrostate;
pub mod model;
pub mod ranking;
pub mod report;

pub use crate::error::{Error, Result};
pub use crate::indicators::{
    log_volatility, normalized_volatility, simple_volatility, NormalizedVolatilitySeries,
    SkipReason, SkipRecord, StepKind, StepPoint, StepSeries,
};
pub use crate::ingest::{
    parse_dataset, scan_dataset, slice_window, Dataset, DateWindow, ParseOptions, ScanOutcome,
};
pub use crate::macrostate::{
    effective_multiplicity, macrostate_parameter, macrostate_report, market_temperature,
    AggregationMode, MacrostateReport, Multiplicity, Temperature,
};
pub use crate::model::{activity, ActivityMode, InstrumentSeries, PriceBar, SeriesKey};
pub use crate::ranking::{
    compare_markets, precinct_points, risk_scale, MarketComparison, PrecinctAxes, PrecinctPoint,
    RiskEntry, RiskScale,
};
pub use crate::report::{render, render_dataset, OutputFormat, Renderable};
