//! Risk scales, cross-market comparisons and precinct point clouds.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::indicators::{normalized_volatility, simple_volatility};
use crate::ingest::DateWindow;
use crate::macrostate::{AggregationMode, MacrostateReport, Temperature};
use crate::model::{ActivityMode, InstrumentSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct RiskEntry {
    pub rank: usize,
    pub symbol: String,
    pub market: String,
    pub p_m: f64,
    pub t_b: Temperature,
}

/// A universe ordered from most to least uncertain: descending `P_M`, ties
/// broken by ascending symbol, then market.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskScale {
    pub window: DateWindow,
    pub activity_mode: ActivityMode,
    pub aggregation: AggregationMode,
    pub entries: Vec<RiskEntry>,
}

fn shared_parameters<'a>(
    mut reports: impl Iterator<Item = &'a MacrostateReport>,
) -> Result<(DateWindow, ActivityMode, AggregationMode)> {
    let first = reports.next().ok_or(Error::EmptyUniverse)?;
    for r in reports {
        if r.window != first.window {
            return Err(Error::MixedParameters("window"));
        }
        if r.activity_mode != first.activity_mode {
            return Err(Error::MixedParameters("activity mode"));
        }
        if r.aggregation != first.aggregation {
            return Err(Error::MixedParameters("aggregation"));
        }
    }
    Ok((first.window, first.activity_mode, first.aggregation))
}

fn risk_order(a: &MacrostateReport, b: &MacrostateReport) -> Ordering {
    b.p_m
        .total_cmp(&a.p_m)
        .then_with(|| a.symbol.cmp(&b.symbol))
        .then_with(|| a.market.cmp(&b.market))
}

pub fn risk_scale(reports: &[MacrostateReport]) -> Result<RiskScale> {
    let (window, activity_mode, aggregation) = shared_parameters(reports.iter())?;
    let mut seen = BTreeSet::new();
    for r in reports {
        if !seen.insert((r.symbol.as_str(), r.market.as_str())) {
            return Err(Error::DuplicateSeries {
                symbol: r.symbol.clone(),
                market: r.market.clone(),
            });
        }
    }

    let mut ordered: Vec<&MacrostateReport> = reports.iter().collect();
    ordered.sort_by(|a, b| risk_order(a, b));
    let entries = ordered
        .into_iter()
        .enumerate()
        .map(|(i, r)| RiskEntry {
            rank: i + 1,
            symbol: r.symbol.clone(),
            market: r.market.clone(),
            p_m: r.p_m,
            t_b: r.t_b,
        })
        .collect();
    Ok(RiskScale {
        window,
        activity_mode,
        aggregation,
        entries,
    })
}

/// One emitter (or any set of series) side by side over a shared window,
/// in caller order.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketComparison {
    pub entries: Vec<(String, MacrostateReport)>,
}

impl MarketComparison {
    pub fn window(&self) -> DateWindow {
        self.entries[0].1.window
    }
}

pub fn compare_markets(reports: Vec<(String, MacrostateReport)>) -> Result<MarketComparison> {
    shared_parameters(reports.iter().map(|(_, r)| r))?;
    Ok(MarketComparison { entries: reports })
}

/// What the three coordinates of a [`PrecinctPoint`] carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecinctAxes {
    /// x = close, y = volume, z = normalized volatility.
    PriceVolumeVolNorm,
    /// x = step index from the first bar, y = close, z = simple volatility.
    TimeValueVol,
}

impl PrecinctAxes {
    pub fn as_str(self) -> &'static str {
        match self {
            PrecinctAxes::PriceVolumeVolNorm => "pvz",
            PrecinctAxes::TimeValueVol => "tvz",
        }
    }
}

impl fmt::Display for PrecinctAxes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrecinctAxes {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pvz" => Ok(PrecinctAxes::PriceVolumeVolNorm),
            "tvz" => Ok(PrecinctAxes::TimeValueVol),
            _ => Err(format!("unknown axes {s:?} (pvz|tvz)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecinctPoint {
    pub date: NaiveDate,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub axes: PrecinctAxes,
}

/// Point cloud of the "virtual precinct" for one series. The bar at `t` owns
/// the point; steps without a defined z-value produce none.
///
/// `mode` only matters for [`PrecinctAxes::PriceVolumeVolNorm`]; the
/// time/value layout reads the close directly.
pub fn precinct_points(
    series: &InstrumentSeries,
    mode: ActivityMode,
    axes: PrecinctAxes,
) -> Result<Vec<PrecinctPoint>> {
    if series.len() < 2 {
        return Err(Error::EmptySeries);
    }
    let bars = series.bars();
    match axes {
        PrecinctAxes::PriceVolumeVolNorm => {
            let nv = normalized_volatility(series, mode)?;
            // Points and bars are both date-ordered, so one forward scan pairs them.
            let mut cursor = bars.iter();
            Ok(nv
                .steps
                .points
                .iter()
                .map(|p| {
                    let bar = cursor
                        .find(|b| b.date == p.date)
                        .expect("every step date belongs to a bar");
                    PrecinctPoint {
                        date: p.date,
                        x: bar.close,
                        y: bar.volume,
                        z: p.value,
                        axes,
                    }
                })
                .collect())
        }
        PrecinctAxes::TimeValueVol => {
            let sv = simple_volatility(series)?;
            Ok(sv
                .points
                .iter()
                .zip(&bars[1..])
                .enumerate()
                .map(|(i, (p, bar))| PrecinctPoint {
                    date: p.date,
                    x: (i + 1) as f64,
                    y: bar.close,
                    z: p.value,
                    axes,
                })
                .collect())
        }
    }
}
