//! Forecast accuracy and tests of equal predictive ability.

use std::str::FromStr;

use statrs::function::gamma::gamma_ur;

use crate::error::{Error, Result};
use crate::nowcast::ForecastSeries;
use crate::series::MonthKey;

/// Root mean squared difference.
pub fn rmse(forecasts: &[f64], realized: &[f64]) -> Result<f64> {
    if forecasts.len() != realized.len() {
        return Err(Error::LengthMismatch {
            left: forecasts.len(),
            right: realized.len(),
        });
    }
    if forecasts.is_empty() {
        return Err(Error::Empty("forecasts"));
    }
    let sse: f64 = forecasts
        .iter()
        .zip(realized)
        .map(|(f, r)| (f - r).powi(2))
        .sum();
    Ok((sse / forecasts.len() as f64).sqrt())
}

/// Upper-tail chi-square probability.
pub fn chi_square_upper_p(statistic: f64, df: usize) -> f64 {
    if statistic <= 0.0 {
        return 1.0;
    }
    gamma_ur(df as f64 / 2.0, statistic / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GwVariant {
    /// Mean loss differential is zero.
    #[default]
    Unconditional,
    /// Loss differential is unpredictable from `(1, d_{t-1})`.
    ConditionalLag1,
}

impl GwVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            GwVariant::Unconditional => "unconditional",
            GwVariant::ConditionalLag1 => "conditional-lag1",
        }
    }

    pub fn min_len(self) -> usize {
        match self {
            GwVariant::Unconditional => 8,
            GwVariant::ConditionalLag1 => 9,
        }
    }
}

impl FromStr for GwVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unconditional" => Ok(GwVariant::Unconditional),
            "conditional-lag1" => Ok(GwVariant::ConditionalLag1),
            other => Err(Error::Config(format!(
                "unknown GW variant `{other}` (expected unconditional or conditional-lag1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GwResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    pub variant: GwVariant,
    /// Mean of `e_A^2 - e_B^2`; negative means A had the smaller loss.
    pub mean_differential: f64,
    pub observations: usize,
}

/// `d_t = e_A,t^2 - e_B,t^2`.
pub fn loss_differential(errors_a: &[f64], errors_b: &[f64]) -> Result<Vec<f64>> {
    if errors_a.len() != errors_b.len() {
        return Err(Error::LengthMismatch {
            left: errors_a.len(),
            right: errors_b.len(),
        });
    }
    Ok(errors_a
        .iter()
        .zip(errors_b)
        .map(|(a, b)| a * a - b * b)
        .collect())
}

/// Giacomini-White test on squared-error loss for one-step forecasts.
///
/// The unconditional statistic is `n * mean(d)^2 / lrv(d)`, where the
/// long-run variance uses a Bartlett kernel truncated at `hac_lag` (0 gives
/// the plain variance with divisor `n`). The conditional variant uses
/// instruments `h_{t-1} = (1, d_{t-1})` and computes
/// `m * zbar' * inv(Omega) * zbar` with `z_t = h_{t-1} d_t` over the
/// `m = n - 1` usable months, i.e. `m` times the uncentered R^2 of
/// regressing a constant on `z_t`. Both are compared to a chi-square with
/// one or two degrees of freedom.
pub fn giacomini_white(
    errors_a: &[f64],
    errors_b: &[f64],
    variant: GwVariant,
    hac_lag: usize,
) -> Result<GwResult> {
    let d = loss_differential(errors_a, errors_b)?;
    let n = d.len();
    if n < variant.min_len() {
        return Err(Error::InsufficientObservations {
            observations: n,
            parameters: variant.min_len(),
        });
    }
    let mean = d.iter().sum::<f64>() / n as f64;
    let (statistic, df, observations) = match variant {
        GwVariant::Unconditional => {
            let lrv = bartlett_long_run_variance(&d, mean, hac_lag);
            let stat = if lrv > 0.0 {
                n as f64 * mean * mean / lrv
            } else if mean == 0.0 {
                0.0
            } else {
                return Err(Error::DegenerateDifferential { mean });
            };
            (stat, 1, n)
        }
        GwVariant::ConditionalLag1 => {
            let m = n - 1;
            let z: Vec<[f64; 2]> = (1..n).map(|t| [d[t], d[t - 1] * d[t]]).collect();
            let zbar = [
                z.iter().map(|v| v[0]).sum::<f64>() / m as f64,
                z.iter().map(|v| v[1]).sum::<f64>() / m as f64,
            ];
            let mut omega = [[0.0; 2]; 2];
            for v in &z {
                for a in 0..2 {
                    for b in 0..2 {
                        omega[a][b] += v[a] * v[b];
                    }
                }
            }
            for row in &mut omega {
                for v in row.iter_mut() {
                    *v /= m as f64;
                }
            }
            let det = omega[0][0] * omega[1][1] - omega[0][1] * omega[1][0];
            let scale = omega[0][0] * omega[1][1];
            let stat = if d.iter().all(|&v| v == 0.0) {
                0.0
            } else if scale <= 0.0 || det <= 1e-12 * scale {
                return Err(Error::DegenerateDifferential { mean });
            } else {
                // zbar' inv(omega) zbar
                let q = (omega[1][1] * zbar[0] * zbar[0] - 2.0 * omega[0][1] * zbar[0] * zbar[1]
                    + omega[0][0] * zbar[1] * zbar[1])
                    / det;
                m as f64 * q
            };
            (stat, 2, m)
        }
    };
    Ok(GwResult {
        statistic,
        df,
        p_value: chi_square_upper_p(statistic, df),
        variant,
        mean_differential: mean,
        observations,
    })
}

fn bartlett_long_run_variance(d: &[f64], mean: f64, lag: usize) -> f64 {
    let n = d.len();
    let autocov = |j: usize| -> f64 {
        (j..n).map(|t| (d[t] - mean) * (d[t - j] - mean)).sum::<f64>() / n as f64
    };
    let lag = lag.min(n - 1);
    (1..=lag).fold(autocov(0), |acc, j| {
        acc + 2.0 * (1.0 - j as f64 / (lag + 1) as f64) * autocov(j)
    })
}

/// Which numbers the errors are computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalTarget {
    #[default]
    Annualized,
    Monthly,
}

impl FromStr for EvalTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "annualized" => Ok(EvalTarget::Annualized),
            "monthly" => Ok(EvalTarget::Monthly),
            other => Err(Error::Config(format!(
                "unknown evaluation target `{other}` (expected annualized or monthly)"
            ))),
        }
    }
}

/// Unit in which errors (and hence RMSE) are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RmseUnit {
    /// Percent values divided by 100.
    #[default]
    Fraction,
    Percent,
}

impl RmseUnit {
    pub fn scale(self) -> f64 {
        match self {
            RmseUnit::Fraction => 0.01,
            RmseUnit::Percent => 1.0,
        }
    }
}

impl FromStr for RmseUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fraction" => Ok(RmseUnit::Fraction),
            "percent" => Ok(RmseUnit::Percent),
            other => Err(Error::Config(format!(
                "unknown RMSE unit `{other}` (expected fraction or percent)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvaluationOptions {
    pub target: EvalTarget,
    pub unit: RmseUnit,
    pub variant: GwVariant,
    pub hac_lag: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelScore {
    pub model: String,
    pub rmse: f64,
    /// Test against the first (benchmark) model; `None` for the benchmark.
    pub vs_benchmark: Option<GwResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseGw {
    pub model_a: String,
    pub model_b: String,
    pub result: GwResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub months: Vec<MonthKey>,
    pub models: Vec<ModelScore>,
    pub pairs: Vec<PairwiseGw>,
    pub options: EvaluationOptions,
}

/// RMSE for every model over the months all of them cover, plus a GW test
/// for every pair. The first series is the benchmark.
pub fn evaluate(series: &[ForecastSeries], opts: EvaluationOptions) -> Result<EvaluationReport> {
    if series.is_empty() {
        return Err(Error::Empty("forecast series"));
    }
    let mut months: Vec<MonthKey> = series[0]
        .rows
        .iter()
        .filter(|r| r.realized.is_some())
        .map(|r| r.month)
        .collect();
    for s in &series[1..] {
        months.retain(|m| s.rows.iter().any(|r| r.month == *m && r.realized.is_some()));
    }
    if months.is_empty() {
        return Err(Error::Empty("months with realized values common to all models"));
    }

    let errors: Vec<Vec<f64>> = series
        .iter()
        .map(|s| {
            months
                .iter()
                .map(|m| {
                    let r = s.rows.iter().find(|r| r.month == *m).expect("common month");
                    let (f, a) = match opts.target {
                        EvalTarget::Annualized => (r.nowcast_annualized, r.realized_annualized),
                        EvalTarget::Monthly => (r.nowcast, r.realized),
                    };
                    let a = a.ok_or_else(|| Error::MissingData {
                        series: format!("{} realized", s.model),
                        months: vec![*m],
                    })?;
                    Ok(opts.unit.scale() * (f - a))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;

    let zeros = vec![0.0; months.len()];
    let mut models = Vec::with_capacity(series.len());
    for (i, s) in series.iter().enumerate() {
        let vs_benchmark = if i == 0 {
            None
        } else {
            Some(giacomini_white(&errors[0], &errors[i], opts.variant, opts.hac_lag)?)
        };
        models.push(ModelScore {
            model: s.model.clone(),
            rmse: rmse(&errors[i], &zeros)?,
            vs_benchmark,
        });
    }
    let mut pairs = Vec::new();
    for a in 0..series.len() {
        for b in a + 1..series.len() {
            pairs.push(PairwiseGw {
                model_a: series[a].model.clone(),
                model_b: series[b].model.clone(),
                result: giacomini_white(&errors[a], &errors[b], opts.variant, opts.hac_lag)?,
            });
        }
    }
    Ok(EvaluationReport {
        months,
        models,
        pairs,
        options: opts,
    })
}
