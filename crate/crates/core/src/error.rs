use chrono::NaiveDate;
use thiserror::Error;

use crate::ingest::DateWindow;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {reason}")]
    Parse {
        line: usize,
        column: usize,
        reason: String,
    },

    #[error("{symbol}@{market}: two bars on {date}")]
    DuplicateDate {
        symbol: String,
        market: String,
        date: NaiveDate,
    },

    #[error("{symbol}@{market}: bar dated {date} is earlier than the bar before it")]
    NonMonotoneDates {
        symbol: String,
        market: String,
        date: NaiveDate,
    },

    #[error("line {line}: negative {field}")]
    NegativeValue { line: usize, field: &'static str },

    #[error("invalid bar: {0}")]
    InvalidBar(String),

    #[error("invalid identifier {0:?}: expected one or more of [A-Za-z0-9_.-]")]
    InvalidIdentifier(String),

    #[error("window start {from} is after window end {to}")]
    InvalidWindow { from: NaiveDate, to: NaiveDate },

    #[error("activity divides by a zero field")]
    DivisionByZero,

    #[error("activity is not a finite number")]
    NonFiniteActivity,

    #[error("series has too few bars")]
    EmptySeries,

    #[error("every normalized-volatility step was skipped")]
    AllStepsSkipped,

    #[error("close on {date} is not positive; logarithm undefined")]
    NonpositivePrice { date: NaiveDate },

    #[error("no normalized-volatility terms to aggregate")]
    EmptyTerms,

    #[error("reports disagree on {0}")]
    MixedParameters(&'static str),

    #[error("no reports to rank")]
    EmptyUniverse,

    #[error("{symbol}@{market} appears more than once")]
    DuplicateSeries { symbol: String, market: String },

    #[error("k_B override must be a positive finite number, got {0}")]
    InvalidKb(f64),

    #[error("{symbol}@{market} over {window}: {source}")]
    InSeries {
        symbol: String,
        market: String,
        window: DateWindow,
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches the series and window an error arose in.
    pub fn in_series(symbol: &str, market: &str, window: DateWindow, source: Error) -> Self {
        Error::InSeries {
            symbol: symbol.to_owned(),
            market: market.to_owned(),
            window,
            source: Box::new(source),
        }
    }

    /// Stable upper-case name of the underlying error, looking through context.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "PARSE_ERROR",
            Error::DuplicateDate { .. } => "DUPLICATE_DATE",
            Error::NonMonotoneDates { .. } => "NON_MONOTONE_DATES",
            Error::NegativeValue { .. } => "NEGATIVE_VALUE",
            Error::InvalidBar(_) => "INVALID_BAR",
            Error::InvalidIdentifier(_) => "INVALID_IDENTIFIER",
            Error::InvalidWindow { .. } => "INVALID_WINDOW",
            Error::DivisionByZero => "DIVISION_BY_ZERO",
            Error::NonFiniteActivity => "NON_FINITE_ACTIVITY",
            Error::EmptySeries => "EMPTY_SERIES",
            Error::AllStepsSkipped => "ALL_STEPS_SKIPPED",
            Error::NonpositivePrice { .. } => "NONPOSITIVE_PRICE",
            Error::EmptyTerms => "EMPTY_TERMS",
            Error::MixedParameters(_) => "MIXED_PARAMETERS",
            Error::EmptyUniverse => "EMPTY_UNIVERSE",
            Error::DuplicateSeries { .. } => "DUPLICATE_SERIES",
            Error::InvalidKb(_) => "INVALID_KB",
            Error::InSeries { source, .. } => source.code(),
        }
    }

    /// The innermost error with all context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::InSeries { source, .. } => source.root(),
            other => other,
        }
    }
}
