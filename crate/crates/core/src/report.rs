//! CSV and JSON rendering.
//!
//! Output is deterministic: the same value always renders to the same bytes.
//! Numbers use the shortest decimal form that parses back to the identical
//! double. An undefined temperature is an empty CSV field or JSON `null`;
//! an open window bound likewise.
//!
//! CSV headers are fixed:
//!
//! | value                        | header                                                                          |
//! |------------------------------|---------------------------------------------------------------------------------|
//! | [`MacrostateReport`]         | `symbol,market,from,to,activity_mode,aggregation,n_valid,n_skipped,p_m,s_e,ln_w_b,t_b` |
//! | [`MarketComparison`]         | `label,` followed by the report header                                          |
//! | [`RiskScale`]                | `rank,symbol,market,p_m,t_b`                                                    |
//! | [`StepSeries`]               | `date,value`                                                                    |
//! | [`NormalizedVolatilitySeries`] | `date,value`, a blank line, then `date,skip_reason`                           |
//! | [`PrecinctPoint`] slice      | `date,x,y,z`                                                                    |

use std::fmt::Write as _;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;

use crate::indicators::{NormalizedVolatilitySeries, StepSeries};
use crate::ingest::{Dataset, DateWindow, HEADER};
use crate::macrostate::MacrostateReport;
use crate::ranking::{MarketComparison, PrecinctPoint, RiskScale};

pub const REPORT_HEADER: &str =
    "symbol,market,from,to,activity_mode,aggregation,n_valid,n_skipped,p_m,s_e,ln_w_b,t_b";
pub const COMPARISON_HEADER: &str =
    "label,symbol,market,from,to,activity_mode,aggregation,n_valid,n_skipped,p_m,s_e,ln_w_b,t_b";
pub const RISK_SCALE_HEADER: &str = "rank,symbol,market,p_m,t_b";
pub const PRECINCT_HEADER: &str = "date,x,y,z";
pub const STEP_HEADER: &str = "date,value";
pub const SKIP_HEADER: &str = "date,skip_reason";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format {s:?} (csv|json)")),
        }
    }
}

/// Anything [`render`] accepts.
pub trait Renderable {
    fn write_csv(&self, out: &mut String);
    fn write_json(&self, out: &mut String);

    /// CSV for tables, JSON for single reports.
    fn default_format(&self) -> OutputFormat {
        OutputFormat::Csv
    }
}

pub fn render<T: Renderable + ?Sized>(value: &T, format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Csv => value.write_csv(&mut out),
        OutputFormat::Json => value.write_json(&mut out),
    }
    out
}

/// Renders a dataset back into the input dialect, series in key order.
pub fn render_dataset(dataset: &Dataset) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for s in dataset.series() {
        for b in s.bars() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                s.symbol(),
                s.market(),
                b.date.format("%Y-%m-%d"),
                num(b.close),
                num(b.volume)
            );
        }
    }
    out
}

/// Shortest round-trip decimal, never in exponent form.
fn num(x: f64) -> String {
    debug_assert!(x.is_finite());
    format!("{x}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn date_str(d: NaiveDate) -> String {
    d.format("%Y-%m-%d").to_string()
}

fn opt_date(d: Option<NaiveDate>) -> String {
    d.map(date_str).unwrap_or_default()
}

fn json_into<T: Serialize>(value: &T, out: &mut String) {
    out.push_str(&serde_json::to_string_pretty(value).expect("finite values always serialize"));
    out.push('\n');
}

#[derive(Serialize)]
struct ReportView<'a> {
    symbol: &'a str,
    market: &'a str,
    from: Option<String>,
    to: Option<String>,
    activity_mode: &'static str,
    aggregation: &'static str,
    n_valid: usize,
    n_skipped: usize,
    p_m: f64,
    s_e: f64,
    ln_w_b: f64,
    t_b: Option<f64>,
}

impl<'a> From<&'a MacrostateReport> for ReportView<'a> {
    fn from(r: &'a MacrostateReport) -> Self {
        Self {
            symbol: &r.symbol,
            market: &r.market,
            from: r.window.from().map(date_str),
            to: r.window.to().map(date_str),
            activity_mode: r.activity_mode.as_str(),
            aggregation: r.aggregation.as_str(),
            n_valid: r.n_valid,
            n_skipped: r.n_skipped,
            p_m: r.p_m,
            s_e: r.s_e,
            ln_w_b: r.ln_w_b,
            t_b: r.t_b.value(),
        }
    }
}

fn report_row(r: &MacrostateReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        r.symbol,
        r.market,
        opt_date(r.window.from()),
        opt_date(r.window.to()),
        r.activity_mode,
        r.aggregation,
        r.n_valid,
        r.n_skipped,
        num(r.p_m),
        num(r.s_e),
        num(r.ln_w_b),
        opt_num(r.t_b.value())
    )
}

impl Renderable for MacrostateReport {
    fn write_csv(&self, out: &mut String) {
        std::slice::from_ref(self).write_csv(out);
    }

    fn write_json(&self, out: &mut String) {
        json_into(&ReportView::from(self), out);
    }

    fn default_format(&self) -> OutputFormat {
        OutputFormat::Json
    }
}

/// A table of reports, one row each.
impl Renderable for [MacrostateReport] {
    fn write_csv(&self, out: &mut String) {
        out.push_str(REPORT_HEADER);
        out.push('\n');
        for r in self {
            out.push_str(&report_row(r));
            out.push('\n');
        }
    }

    fn write_json(&self, out: &mut String) {
        let views: Vec<ReportView> = self.iter().map(ReportView::from).collect();
        json_into(&views, out);
    }
}

#[derive(Serialize)]
struct WindowedHeader {
    from: Option<String>,
    to: Option<String>,
    activity_mode: &'static str,
    aggregation: &'static str,
}

fn window_pair(w: &DateWindow) -> (Option<String>, Option<String>) {
    (w.from().map(date_str), w.to().map(date_str))
}

#[derive(Serialize)]
struct RiskEntryView<'a> {
    rank: usize,
    symbol: &'a str,
    market: &'a str,
    p_m: f64,
    t_b: Option<f64>,
}

#[derive(Serialize)]
struct RiskScaleView<'a> {
    #[serde(flatten)]
    header: WindowedHeader,
    entries: Vec<RiskEntryView<'a>>,
}

impl Renderable for RiskScale {
    fn write_csv(&self, out: &mut String) {
        out.push_str(RISK_SCALE_HEADER);
        out.push('\n');
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                e.rank,
                e.symbol,
                e.market,
                num(e.p_m),
                opt_num(e.t_b.value())
            );
        }
    }

    fn write_json(&self, out: &mut String) {
        let (from, to) = window_pair(&self.window);
        let view = RiskScaleView {
            header: WindowedHeader {
                from,
                to,
                activity_mode: self.activity_mode.as_str(),
                aggregation: self.aggregation.as_str(),
            },
            entries: self
                .entries
                .iter()
                .map(|e| RiskEntryView {
                    rank: e.rank,
                    symbol: &e.symbol,
                    market: &e.market,
                    p_m: e.p_m,
                    t_b: e.t_b.value(),
                })
                .collect(),
        };
        json_into(&view, out);
    }
}

#[derive(Serialize)]
struct LabelledReport<'a> {
    label: &'a str,
    report: ReportView<'a>,
}

#[derive(Serialize)]
struct ComparisonView<'a> {
    #[serde(flatten)]
    header: WindowedHeader,
    entries: Vec<LabelledReport<'a>>,
}

impl Renderable for MarketComparison {
    fn write_csv(&self, out: &mut String) {
        out.push_str(COMPARISON_HEADER);
        out.push('\n');
        for (label, r) in &self.entries {
            let _ = writeln!(out, "{label},{}", report_row(r));
        }
    }

    fn write_json(&self, out: &mut String) {
        let first = &self.entries[0].1;
        let (from, to) = window_pair(&first.window);
        let view = ComparisonView {
            header: WindowedHeader {
                from,
                to,
                activity_mode: first.activity_mode.as_str(),
                aggregation: first.aggregation.as_str(),
            },
            entries: self
                .entries
                .iter()
                .map(|(label, r)| LabelledReport {
                    label,
                    report: r.into(),
                })
                .collect(),
        };
        json_into(&view, out);
    }
}

#[derive(Serialize)]
struct PointView {
    date: String,
    value: f64,
}

#[derive(Serialize)]
struct SkipView {
    date: String,
    reason: &'static str,
}

#[derive(Serialize)]
struct StepSeriesView<'a> {
    symbol: &'a str,
    market: &'a str,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    activity_mode: Option<&'static str>,
    points: Vec<PointView>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skips: Option<Vec<SkipView>>,
}

impl<'a> From<&'a StepSeries> for StepSeriesView<'a> {
    fn from(s: &'a StepSeries) -> Self {
        Self {
            symbol: &s.symbol,
            market: &s.market,
            kind: s.kind.as_str(),
            activity_mode: None,
            points: s
                .points
                .iter()
                .map(|p| PointView {
                    date: date_str(p.date),
                    value: p.value,
                })
                .collect(),
            skips: None,
        }
    }
}

impl Renderable for StepSeries {
    fn write_csv(&self, out: &mut String) {
        out.push_str(STEP_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(out, "{},{}", date_str(p.date), num(p.value));
        }
    }

    fn write_json(&self, out: &mut String) {
        json_into(&StepSeriesView::from(self), out);
    }
}

impl Renderable for NormalizedVolatilitySeries {
    fn write_csv(&self, out: &mut String) {
        self.steps.write_csv(out);
        out.push('\n');
        out.push_str(SKIP_HEADER);
        out.push('\n');
        for s in &self.skips {
            let _ = writeln!(out, "{},{}", date_str(s.date), s.reason);
        }
    }

    fn write_json(&self, out: &mut String) {
        let mut view = StepSeriesView::from(&self.steps);
        view.activity_mode = Some(self.mode.as_str());
        view.skips = Some(
            self.skips
                .iter()
                .map(|s| SkipView {
                    date: date_str(s.date),
                    reason: s.reason.as_str(),
                })
                .collect(),
        );
        json_into(&view, out);
    }
}

#[derive(Serialize)]
struct PrecinctView {
    date: String,
    axes: &'static str,
    x: f64,
    y: f64,
    z: f64,
}

impl Renderable for [PrecinctPoint] {
    fn write_csv(&self, out: &mut String) {
        out.push_str(PRECINCT_HEADER);
        out.push('\n');
        for p in self {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                date_str(p.date),
                num(p.x),
                num(p.y),
                num(p.z)
            );
        }
    }

    fn write_json(&self, out: &mut String) {
        let views: Vec<PrecinctView> = self
            .iter()
            .map(|p| PrecinctView {
                date: date_str(p.date),
                axes: p.axes.as_str(),
                x: p.x,
                y: p.y,
                z: p.z,
            })
            .collect();
        json_into(&views, out);
    }
}
