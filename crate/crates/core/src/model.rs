//! Core domain types and the activity parameter.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// One time bucket of one instrument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceBar {
    pub date: NaiveDate,
    pub close: f64,
    pub volume: f64,
}

impl PriceBar {
    pub fn new(date: NaiveDate, close: f64, volume: f64) -> Result<Self> {
        if !close.is_finite() || close < 0.0 {
            return Err(Error::InvalidBar(format!("close {close} on {date}")));
        }
        if !volume.is_finite() || volume < 0.0 {
            return Err(Error::InvalidBar(format!("volume {volume} on {date}")));
        }
        // -0.0 would otherwise leak into rendered output as "-0".
        Ok(Self {
            date,
            close: close + 0.0,
            volume: volume + 0.0,
        })
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'))
}

/// The (symbol, market) pair naming one series within a dataset.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SeriesKey {
    pub symbol: String,
    pub market: String,
}

impl SeriesKey {
    pub fn new(symbol: impl Into<String>, market: impl Into<String>) -> Result<Self> {
        let symbol = symbol.into();
        let market = market.into();
        for id in [&symbol, &market] {
            if !is_identifier(id) {
                return Err(Error::InvalidIdentifier(id.clone()));
            }
        }
        Ok(Self { symbol, market })
    }
}

impl fmt::Display for SeriesKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.symbol, self.market)
    }
}

/// Bars of one instrument on one market, dates strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentSeries {
    key: SeriesKey,
    bars: Vec<PriceBar>,
}

impl InstrumentSeries {
    pub fn new(
        symbol: impl Into<String>,
        market: impl Into<String>,
        bars: Vec<PriceBar>,
    ) -> Result<Self> {
        Self::from_key(SeriesKey::new(symbol, market)?, bars)
    }

    pub fn from_key(key: SeriesKey, bars: Vec<PriceBar>) -> Result<Self> {
        for pair in bars.windows(2) {
            let (prev, next) = (pair[0].date, pair[1].date);
            if next == prev {
                return Err(Error::DuplicateDate {
                    symbol: key.symbol.clone(),
                    market: key.market.clone(),
                    date: next,
                });
            }
            if next < prev {
                return Err(Error::NonMonotoneDates {
                    symbol: key.symbol.clone(),
                    market: key.market.clone(),
                    date: next,
                });
            }
        }
        Ok(Self { key, bars })
    }

    /// Builds a series from parallel close/volume slices dated one day apart
    /// starting at 2000-01-01. Handy for fixtures where dates carry no meaning.
    pub fn from_columns(
        symbol: &str,
        market: &str,
        closes: &[f64],
        volumes: &[f64],
    ) -> Result<Self> {
        if closes.len() != volumes.len() {
            return Err(Error::InvalidBar(format!(
                "{} closes but {} volumes",
                closes.len(),
                volumes.len()
            )));
        }
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let bars = closes
            .iter()
            .zip(volumes)
            .zip(start.iter_days())
            .map(|((&c, &v), date)| PriceBar::new(date, c, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(symbol, market, bars)
    }

    /// Same key, different bars. Callers must keep dates increasing.
    pub(crate) fn with_bars(&self, bars: Vec<PriceBar>) -> Self {
        Self {
            key: self.key.clone(),
            bars,
        }
    }

    pub fn key(&self) -> &SeriesKey {
        &self.key
    }

    pub fn symbol(&self) -> &str {
        &self.key.symbol
    }

    pub fn market(&self) -> &str {
        &self.key.market
    }

    pub fn bars(&self) -> &[PriceBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }
}

/// Which combination of price and volume stands in for a bar's activity.
///
/// `PriceOnly` reads the close alone, for index levels where no traded
/// volume is meaningful (an interpretation beyond the price/volume
/// combinations).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ActivityMode {
    #[default]
    PriceTimesVolume,
    PriceOverVolume,
    VolumeOverPrice,
    PriceOnly,
}

impl ActivityMode {
    pub const ALL: [ActivityMode; 4] = [
        ActivityMode::PriceTimesVolume,
        ActivityMode::PriceOverVolume,
        ActivityMode::VolumeOverPrice,
        ActivityMode::PriceOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityMode::PriceTimesVolume => "pv",
            ActivityMode::PriceOverVolume => "p_over_v",
            ActivityMode::VolumeOverPrice => "v_over_p",
            ActivityMode::PriceOnly => "p_only",
        }
    }
}

impl fmt::Display for ActivityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActivityMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        ActivityMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown activity mode {s:?} (pv|p_over_v|v_over_p|p_only)"))
    }
}

/// The activity parameter of one bar under `mode`.
pub fn activity(bar: &PriceBar, mode: ActivityMode) -> Result<f64> {
    let value = match mode {
        ActivityMode::PriceTimesVolume => bar.close * bar.volume,
        ActivityMode::PriceOverVolume => {
            if bar.volume == 0.0 {
                return Err(Error::DivisionByZero);
            }
            bar.close / bar.volume
        }
        ActivityMode::VolumeOverPrice => {
            if bar.close == 0.0 {
                return Err(Error::DivisionByZero);
            }
            bar.volume / bar.close
        }
        ActivityMode::PriceOnly => bar.close,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteActivity)
    }
}
