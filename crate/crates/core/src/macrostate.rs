//! Aggregation of normalized-volatility terms into the macrostate parameter.
//!
//! With `N` defined terms `x_i = (a_t - a_{t-1}) / a_{t-1}`:
//!
//! - macrostate parameter `P_M = (1/N) * sum(x_i)`, identified with the
//!   economic entropy `S_e`
//! - taking `k_B = 1/N` in `P_M = k_B ln W_B` gives `ln W_B = N * P_M`
//! - market temperature `T_B = 1 / P_M`, undefined only at `P_M == 0`
//!
//! `T_B` is always the reciprocal of the mean. The mean of reciprocal terms
//! is a different quantity and is not computed here.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::indicators::normalized_volatility;
use crate::ingest::{slice_window, DateWindow};
use crate::model::{ActivityMode, InstrumentSeries};

/// How terms are combined into `P_M`.
///
/// `Signed` is the plain mean. `Absolute` averages magnitudes, so a series
/// that oscillates violently around a flat level still reads as agitated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AggregationMode {
    #[default]
    Signed,
    Absolute,
}

impl AggregationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregationMode::Signed => "signed",
            AggregationMode::Absolute => "abs",
        }
    }
}

impl fmt::Display for AggregationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AggregationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "signed" => Ok(AggregationMode::Signed),
            "abs" => Ok(AggregationMode::Absolute),
            _ => Err(format!("unknown aggregation {s:?} (signed|abs)")),
        }
    }
}

/// Market temperature; `Undefined` exactly when `P_M == 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    Defined(f64),
    Undefined,
}

impl Temperature {
    pub fn value(self) -> Option<f64> {
        match self {
            Temperature::Defined(t) => Some(t),
            Temperature::Undefined => None,
        }
    }
}

/// `W_B = exp(ln W_B)` when it fits in a double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplicity {
    Finite(f64),
    Overflow,
    /// `exp` rounds to zero; `ln W_B` is still exact.
    Underflow,
}

pub fn macrostate_parameter(terms: &[f64], aggregation: AggregationMode) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::EmptyTerms);
    }
    let sum: f64 = match aggregation {
        AggregationMode::Signed => terms.iter().sum(),
        AggregationMode::Absolute => terms.iter().map(|t| t.abs()).sum(),
    };
    Ok(sum / terms.len() as f64)
}

pub fn market_temperature(p_m: f64) -> Temperature {
    if p_m == 0.0 {
        Temperature::Undefined
    } else {
        Temperature::Defined(1.0 / p_m)
    }
}

/// `(ln W_B, W_B)` with `ln W_B = n_valid * P_M`.
pub fn effective_multiplicity(p_m: f64, n_valid: usize) -> (f64, Multiplicity) {
    let ln_w_b = n_valid as f64 * p_m;
    (ln_w_b, multiplicity(ln_w_b))
}

fn multiplicity(ln_w_b: f64) -> Multiplicity {
    let w_b = ln_w_b.exp();
    if w_b.is_infinite() {
        Multiplicity::Overflow
    } else if w_b == 0.0 {
        Multiplicity::Underflow
    } else {
        Multiplicity::Finite(w_b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacrostateReport {
    pub symbol: String,
    pub market: String,
    pub window: DateWindow,
    pub activity_mode: ActivityMode,
    pub aggregation: AggregationMode,
    pub n_valid: usize,
    pub n_skipped: usize,
    pub p_m: f64,
    pub s_e: f64,
    pub ln_w_b: f64,
    pub t_b: Temperature,
}

impl MacrostateReport {
    fn from_p_m(
        series: &InstrumentSeries,
        window: DateWindow,
        activity_mode: ActivityMode,
        aggregation: AggregationMode,
        n_valid: usize,
        n_skipped: usize,
        p_m: f64,
    ) -> Self {
        let (ln_w_b, _) = effective_multiplicity(p_m, n_valid);
        Self {
            symbol: series.symbol().to_owned(),
            market: series.market().to_owned(),
            window,
            activity_mode,
            aggregation,
            n_valid,
            n_skipped,
            p_m,
            s_e: p_m,
            ln_w_b,
            t_b: market_temperature(p_m),
        }
    }

    /// Applies a market-specific `k_B` factor: `P_M`, `S_e` and `ln W_B` are
    /// multiplied by `kb`, and `T_B` is recomputed from the scaled `P_M`.
    pub fn with_kb(mut self, kb: f64) -> Result<Self> {
        if !(kb.is_finite() && kb > 0.0) {
            return Err(Error::InvalidKb(kb));
        }
        self.p_m *= kb;
        self.s_e = self.p_m;
        self.ln_w_b *= kb;
        self.t_b = market_temperature(self.p_m);
        Ok(self)
    }

    /// `W_B = exp(ln W_B)`, best effort.
    pub fn w_b(&self) -> Multiplicity {
        multiplicity(self.ln_w_b)
    }

    /// Whether the report satisfies the identities tying its fields together.
    pub fn is_consistent(&self) -> bool {
        let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        let temperature_ok = match self.t_b {
            Temperature::Undefined => self.p_m == 0.0,
            Temperature::Defined(t) => self.p_m != 0.0 && rel(t * self.p_m, 1.0),
        };
        self.s_e.to_bits() == self.p_m.to_bits()
            && rel(self.ln_w_b, self.n_valid as f64 * self.p_m)
            && temperature_ok
    }
}

/// Slices `window`, takes the normalized volatility under `activity_mode` and
/// aggregates it. Skipped steps count toward neither numerator nor `N`.
pub fn macrostate_report(
    series: &InstrumentSeries,
    window: &DateWindow,
    activity_mode: ActivityMode,
    aggregation: AggregationMode,
) -> Result<MacrostateReport> {
    let ctx = |e| Error::in_series(series.symbol(), series.market(), *window, e);
    let sliced = slice_window(series, window);
    let nv = normalized_volatility(&sliced, activity_mode).map_err(ctx)?;
    let terms = nv.terms();
    let p_m = macrostate_parameter(&terms, aggregation).map_err(ctx)?;
    Ok(MacrostateReport::from_p_m(
        series,
        *window,
        activity_mode,
        aggregation,
        terms.len(),
        nv.skips.len(),
        p_m,
    ))
}
