//! Parsing, validation and windowing of instrument series.
//!
//! Input is a headed CSV with columns `symbol,market,date,close,volume`.
//! Identifiers are restricted to `[A-Za-z0-9_.-]` so no quoting is ever
//! needed; dates are `YYYY-MM-DD`; numbers are plain decimal literals.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::model::{is_identifier, InstrumentSeries, PriceBar, SeriesKey};

pub const HEADER: &str = "symbol,market,date,close,volume";

/// Inclusive calendar window; a missing bound is open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DateWindow {
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
}

impl DateWindow {
    pub fn new(from: Option<NaiveDate>, to: Option<NaiveDate>) -> Result<Self> {
        if let (Some(from), Some(to)) = (from, to) {
            if from > to {
                return Err(Error::InvalidWindow { from, to });
            }
        }
        Ok(Self { from, to })
    }

    pub fn open() -> Self {
        Self::default()
    }

    pub fn from(&self) -> Option<NaiveDate> {
        self.from
    }

    pub fn to(&self) -> Option<NaiveDate> {
        self.to
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.from.is_none_or(|f| f <= date) && self.to.is_none_or(|t| date <= t)
    }
}

impl fmt::Display for DateWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound = |d: Option<NaiveDate>| d.map_or_else(|| "open".to_owned(), |d| d.to_string());
        write!(f, "[{}, {}]", bound(self.from), bound(self.to))
    }
}

/// Bars of one slice of `series` whose dates fall inside `window`.
pub fn slice_window(series: &InstrumentSeries, window: &DateWindow) -> InstrumentSeries {
    let bars = series
        .bars()
        .iter()
        .filter(|b| window.contains(b.date))
        .copied()
        .collect();
    series.with_bars(bars)
}

/// Series keyed by (symbol, market), iterated in key order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    series: BTreeMap<SeriesKey, InstrumentSeries>,
}

impl Dataset {
    pub fn from_series(series: impl IntoIterator<Item = InstrumentSeries>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for s in series {
            match map.entry(s.key().clone()) {
                Entry::Occupied(e) => {
                    let key: &SeriesKey = e.key();
                    return Err(Error::DuplicateSeries {
                        symbol: key.symbol.clone(),
                        market: key.market.clone(),
                    });
                }
                Entry::Vacant(e) => {
                    e.insert(s);
                }
            }
        }
        Ok(Self { series: map })
    }

    pub fn get(&self, symbol: &str, market: &str) -> Option<&InstrumentSeries> {
        self.series.get(&SeriesKey {
            symbol: symbol.to_owned(),
            market: market.to_owned(),
        })
    }

    /// Every series carrying `symbol`, on whichever market.
    pub fn by_symbol(&self, symbol: &str) -> Vec<&InstrumentSeries> {
        self.series
            .values()
            .filter(|s| s.symbol() == symbol)
            .collect()
    }

    pub fn series(&self) -> impl Iterator<Item = &InstrumentSeries> {
        self.series.values()
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn bar_count(&self) -> usize {
        self.series.values().map(InstrumentSeries::len).sum()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Sort each series by date before validation instead of rejecting
    /// out-of-order rows.
    pub sort_dates: bool,
    /// Market used for rows whose market field is empty.
    pub default_market: Option<String>,
}

/// A data row that did not make it into the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RejectedRow {
    pub line: usize,
    pub error: Error,
}

/// Result of a lenient pass over the input: every data row ends up either
/// in `dataset` or in `rejected`.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub dataset: Dataset,
    pub rejected: Vec<RejectedRow>,
    pub total_rows: usize,
}

impl ScanOutcome {
    pub fn accepted_rows(&self) -> usize {
        self.dataset.bar_count()
    }
}

/// Strict parse: the first rejected row (in line order) fails the whole input.
pub fn parse_dataset(input: &str, options: &ParseOptions) -> Result<Dataset> {
    let outcome = scan_dataset(input, options)?;
    match outcome.rejected.into_iter().next() {
        Some(row) => Err(row.error),
        None => Ok(outcome.dataset),
    }
}

/// Lenient parse. Only a missing or malformed header is fatal; row problems
/// are collected in line order.
pub fn scan_dataset(input: &str, options: &ParseOptions) -> Result<ScanOutcome> {
    let mut lines = input
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, HEADER)) => {}
        Some((line, _)) => {
            return Err(Error::Parse {
                line,
                column: 1,
                reason: format!("expected header `{HEADER}`"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                reason: "empty input, missing header".to_owned(),
            })
        }
    }

    let mut rejected = Vec::new();
    let mut total_rows = 0;
    let mut grouped: BTreeMap<SeriesKey, Vec<(usize, PriceBar)>> = BTreeMap::new();
    for (line, text) in lines {
        total_rows += 1;
        match parse_row(line, text, options) {
            Ok((key, bar)) => grouped.entry(key).or_default().push((line, bar)),
            Err(error) => rejected.push(RejectedRow { line, error }),
        }
    }

    let mut series = Vec::with_capacity(grouped.len());
    for (key, mut rows) in grouped {
        if options.sort_dates {
            rows.sort_by_key(|(_, bar)| bar.date);
        }
        let mut bars: Vec<PriceBar> = Vec::with_capacity(rows.len());
        for (line, bar) in rows {
            match bars.last() {
                Some(last) if bar.date == last.date => rejected.push(RejectedRow {
                    line,
                    error: Error::DuplicateDate {
                        symbol: key.symbol.clone(),
                        market: key.market.clone(),
                        date: bar.date,
                    },
                }),
                Some(last) if bar.date < last.date => rejected.push(RejectedRow {
                    line,
                    error: Error::NonMonotoneDates {
                        symbol: key.symbol.clone(),
                        market: key.market.clone(),
                        date: bar.date,
                    },
                }),
                _ => bars.push(bar),
            }
        }
        series.push(InstrumentSeries::from_key(key, bars)?);
    }
    rejected.sort_by_key(|r| r.line);

    Ok(ScanOutcome {
        dataset: Dataset::from_series(series)?,
        rejected,
        total_rows,
    })
}

fn parse_error(line: usize, column: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        reason: reason.into(),
    }
}

fn parse_row(line: usize, text: &str, options: &ParseOptions) -> Result<(SeriesKey, PriceBar)> {
    let fields: Vec<&str> = text.split(',').collect();
    if fields.len() != 5 {
        return Err(parse_error(
            line,
            fields.len().min(5) + 1,
            format!("expected 5 fields, found {}", fields.len()),
        ));
    }

    let symbol = fields[0];
    if !is_identifier(symbol) {
        return Err(parse_error(line, 1, format!("invalid symbol {symbol:?}")));
    }
    let market = match (fields[1], &options.default_market) {
        ("", Some(default)) => default.as_str(),
        (m, _) => m,
    };
    if !is_identifier(market) {
        return Err(parse_error(line, 2, format!("invalid market {market:?}")));
    }
    let date = parse_date(fields[2]).ok_or_else(|| {
        parse_error(
            line,
            3,
            format!("invalid date {:?}, expected YYYY-MM-DD", fields[2]),
        )
    })?;
    let close = parse_decimal(fields[3]).map_err(|r| parse_error(line, 4, r))?;
    let volume = parse_decimal(fields[4]).map_err(|r| parse_error(line, 5, r))?;
    if close < 0.0 {
        return Err(Error::NegativeValue {
            line,
            field: "close",
        });
    }
    if volume < 0.0 {
        return Err(Error::NegativeValue {
            line,
            field: "volume",
        });
    }

    let key = SeriesKey {
        symbol: symbol.to_owned(),
        market: market.to_owned(),
    };
    let bar =
        PriceBar::new(date, close, volume).map_err(|e| parse_error(line, 4, e.to_string()))?;
    Ok((key, bar))
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    let b = s.as_bytes();
    let shape_ok = b.len() == 10
        && b[4] == b'-'
        && b[7] == b'-'
        && b.iter()
            .enumerate()
            .all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    if !shape_ok {
        return None;
    }
    let year = s[0..4].parse().ok()?;
    let month = s[5..7].parse().ok()?;
    let day = s[8..10].parse().ok()?;
    NaiveDate::from_ymd_opt(year, month, day)
}

/// `-?digits(.digits)?`. The sign is accepted here so negative values can be
/// reported as such rather than as syntax errors.
fn parse_decimal(s: &str) -> std::result::Result<f64, String> {
    let unsigned = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match unsigned.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (unsigned, None),
    };
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|c| c.is_ascii_digit());
    if !digits(int) || !frac.is_none_or(digits) {
        return Err(format!("invalid decimal {s:?}"));
    }
    let value: f64 = s.parse().map_err(|_| format!("invalid decimal {s:?}"))?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("decimal {s:?} out of range"))
    }
}
