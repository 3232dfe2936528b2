//! Percent change, annualization and the trailing moving-average predictor.

use crate::error::{Error, Result};
use crate::series::{MonthKey, MonthlySeries, Unit};

/// What to do with output months whose denominator is unusable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorPolicy {
    /// Fail and list every offending month.
    #[default]
    Error,
    /// Leave those months out of the output.
    Skip,
}

/// `100 * (P_t / P_{t-window} - 1)` for every month where both levels exist.
pub fn pct_change(
    series: &MonthlySeries,
    window: usize,
    policy: DenominatorPolicy,
) -> Result<MonthlySeries> {
    if window == 0 {
        return Err(Error::Config("pct_change window must be positive".into()));
    }
    expect_unit(series, Unit::IndexLevel)?;
    let mut out = MonthlySeries::new(series.name(), Unit::Percent);
    let mut zero = Vec::new();
    for (t, level) in series.iter() {
        let Some(base) = series.get(t.offset(-(window as i64))) else {
            continue;
        };
        if base == 0.0 {
            zero.push(t);
            continue;
        }
        out.insert(t, 100.0 * (level / base - 1.0));
    }
    if !zero.is_empty() && policy == DenominatorPolicy::Error {
        return Err(Error::ZeroDenominator {
            series: series.name().to_string(),
            months: zero,
        });
    }
    Ok(out)
}

/// Compounds a period rate twelve times: `100 * ((pi/100 + 1)^12 - 1)`.
pub fn annualize(pi: f64) -> Result<f64> {
    let growth = pi / 100.0;
    if !(growth > -1.0) {
        return Err(Error::Domain {
            what: "annualize",
            value: pi,
        });
    }
    Ok(100.0 * (12.0 * growth.ln_1p()).exp_m1())
}

/// Inverse of [`annualize`]: `100 * ((pi/100 + 1)^(1/12) - 1)`.
pub fn deannualize(pi_annualized: f64) -> Result<f64> {
    let growth = pi_annualized / 100.0;
    if !(growth > -1.0) {
        return Err(Error::Domain {
            what: "deannualize",
            value: pi_annualized,
        });
    }
    Ok(100.0 * (growth.ln_1p() / 12.0).exp_m1())
}

/// Mean of the `lags` values strictly before `t`.
///
/// Summation runs from lag 1 (the month before `t`) outward; `t` itself is
/// never read.
pub fn moving_average_predictor(series: &MonthlySeries, t: MonthKey, lags: usize) -> Result<f64> {
    if lags == 0 {
        return Err(Error::Config("moving average needs at least one lag".into()));
    }
    expect_unit(series, Unit::Percent)?;
    let mut sum = 0.0;
    let mut missing = Vec::new();
    for k in 1..=lags {
        let m = t.offset(-(k as i64));
        match series.get(m) {
            Some(v) => sum += v,
            None => missing.push(m),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::MissingData {
            series: series.name().to_string(),
            months: missing,
        });
    }
    Ok(sum / lags as f64)
}

pub(crate) fn expect_unit(series: &MonthlySeries, unit: Unit) -> Result<()> {
    if series.unit() != unit {
        return Err(Error::WrongUnit {
            series: series.name().to_string(),
            expected: unit.as_str(),
            found: series.unit().as_str(),
        });
    }
    Ok(())
}
