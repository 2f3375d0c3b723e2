//! Per-step volatility series: simple, logarithmic and normalized.

use std::fmt;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::model::{activity, ActivityMode, InstrumentSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Simple,
    Log,
    Normalized,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Simple => "simple",
            StepKind::Log => "log",
            StepKind::Normalized => "normalized",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value describing the change that arrived at `date`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPoint {
    pub date: NaiveDate,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepSeries {
    pub symbol: String,
    pub market: String,
    pub kind: StepKind,
    pub points: Vec<StepPoint>,
}

impl StepSeries {
    fn empty(series: &InstrumentSeries, kind: StepKind) -> Self {
        Self {
            symbol: series.symbol().to_owned(),
            market: series.market().to_owned(),
            kind,
            points: Vec::new(),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    /// The earlier bar's activity is zero.
    ZeroDenominator,
    /// One of the activities, or the resulting ratio, is not defined.
    UndefinedActivity,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::ZeroDenominator => "zero_denominator",
            SkipReason::UndefinedActivity => "undefined_activity",
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkipRecord {
    pub date: NaiveDate,
    pub reason: SkipReason,
}

/// Relative one-step changes of the activity parameter, with a record for
/// every consecutive pair that produced no value.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedVolatilitySeries {
    pub steps: StepSeries,
    pub skips: Vec<SkipRecord>,
    pub mode: ActivityMode,
}

impl NormalizedVolatilitySeries {
    pub fn terms(&self) -> Vec<f64> {
        self.steps.values().collect()
    }
}

fn pairwise(series: &InstrumentSeries, kind: StepKind, f: impl Fn(f64, f64) -> f64) -> StepSeries {
    let mut out = StepSeries::empty(series, kind);
    out.points = series
        .bars()
        .windows(2)
        .map(|w| StepPoint {
            date: w[1].date,
            value: f(w[0].close, w[1].close),
        })
        .collect();
    out
}

/// `p_t - p_{t-1}` at each step.
pub fn simple_volatility(series: &InstrumentSeries) -> Result<StepSeries> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(pairwise(series, StepKind::Simple, |prev, next| next - prev))
}

/// `ln p_t - ln p_{t-1}` at each step. Every close must be positive.
pub fn log_volatility(series: &InstrumentSeries) -> Result<StepSeries> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if let Some(bar) = series.bars().iter().find(|b| b.close <= 0.0) {
        return Err(Error::NonpositivePrice { date: bar.date });
    }
    Ok(pairwise(series, StepKind::Log, |prev, next| {
        next.ln() - prev.ln()
    }))
}

/// `(a_t - a_{t-1}) / a_{t-1}` for each consecutive pair of bars.
///
/// Each pair is evaluated on its own: a pair whose earlier activity is zero
/// or undefined is recorded as a skip, and the next pair still uses its own
/// raw earlier bar. A skipped step never restarts or bridges the chain.
pub fn normalized_volatility(
    series: &InstrumentSeries,
    mode: ActivityMode,
) -> Result<NormalizedVolatilitySeries> {
    if series.len() < 2 {
        return Err(Error::EmptySeries);
    }
    let activities: Vec<Option<f64>> = series
        .bars()
        .iter()
        .map(|b| activity(b, mode).ok())
        .collect();

    let mut steps = StepSeries::empty(series, StepKind::Normalized);
    let mut skips = Vec::new();
    for (i, pair) in activities.windows(2).enumerate() {
        let date = series.bars()[i + 1].date;
        let skip = |reason| SkipRecord { date, reason };
        match (pair[0], pair[1]) {
            (Some(prev), Some(next)) if prev != 0.0 => {
                let value = (next - prev) / prev;
                if value.is_finite() {
                    steps.points.push(StepPoint { date, value });
                } else {
                    skips.push(skip(SkipReason::UndefinedActivity));
                }
            }
            (Some(0.0), Some(_)) => skips.push(skip(SkipReason::ZeroDenominator)),
            _ => skips.push(skip(SkipReason::UndefinedActivity)),
        }
    }
    if steps.points.is_empty() {
        return Err(Error::AllStepsSkipped);
    }
    Ok(NormalizedVolatilitySeries { steps, skips, mode })
}
