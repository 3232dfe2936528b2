//! Model specifications, estimation windows, nowcasts and backtests.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::index::{news_pi, NewsPiMode};
use crate::ols::{fit_ols, Covariance, Design, RegressionResult};
use crate::series::{MonthKey, MonthRange, MonthlySeries};
use crate::transform::{annualize, moving_average_predictor, pct_change, DenominatorPolicy};

/// Number of trailing months averaged to impute an unreleased component.
pub const DEFAULT_IMPUTATION_LAGS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regressor {
    CoreCpi,
    FoodCpi,
    Gasoline,
    News,
}

impl Regressor {
    pub fn term(self) -> &'static str {
        match self {
            Regressor::CoreCpi => "pi-CCPI",
            Regressor::FoodCpi => "pi-FCPI",
            Regressor::Gasoline => "pi-Gasoline",
            Regressor::News => "pi-NEWS",
        }
    }

    /// Price components are released after the nowcast date and must be
    /// imputed; the NEWS value for the month is already known.
    pub fn is_imputed(self) -> bool {
        !matches!(self, Regressor::News)
    }
}

/// The five regressor sets: the Cleveland-style baseline, NEWS alone, and
/// NEWS combined with all or some of the baseline regressors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelSpec {
    Fed,
    News,
    FedNews,
    FedGasNews,
    CcpiNews,
}

impl ModelSpec {
    pub const ALL: [ModelSpec; 5] = [
        ModelSpec::Fed,
        ModelSpec::News,
        ModelSpec::FedNews,
        ModelSpec::FedGasNews,
        ModelSpec::CcpiNews,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelSpec::Fed => "fed",
            ModelSpec::News => "news",
            ModelSpec::FedNews => "fed+news",
            ModelSpec::FedGasNews => "fed-gas+news",
            ModelSpec::CcpiNews => "ccpi+news",
        }
    }

    /// Regressors after the intercept, in table order.
    pub fn regressors(self) -> &'static [Regressor] {
        use Regressor::*;
        match self {
            ModelSpec::Fed => &[CoreCpi, FoodCpi, Gasoline],
            ModelSpec::News => &[News],
            ModelSpec::FedNews => &[CoreCpi, FoodCpi, Gasoline, News],
            ModelSpec::FedGasNews => &[CoreCpi, FoodCpi, News],
            ModelSpec::CcpiNews => &[CoreCpi, News],
        }
    }

    /// Coefficient names including `const`.
    pub fn terms(self) -> Vec<&'static str> {
        std::iter::once("const")
            .chain(self.regressors().iter().map(|r| r.term()))
            .collect()
    }

    pub fn uses_news(self) -> bool {
        self.regressors().contains(&Regressor::News)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelSpec::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown model `{s}` (expected one of {})",
                    ModelSpec::ALL.map(|m| m.name()).join(", ")
                ))
            })
    }
}

/// Price index levels as published.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceLevels {
    pub cpi: MonthlySeries,
    pub core_cpi: MonthlySeries,
    pub food_cpi: MonthlySeries,
    pub gasoline: MonthlySeries,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransformOptions {
    pub window: usize,
    pub news_mode: NewsPiMode,
    pub policy: DenominatorPolicy,
}

impl Default for TransformOptions {
    fn default() -> Self {
        Self {
            window: 12,
            news_mode: NewsPiMode::Ratio,
            policy: DenominatorPolicy::Error,
        }
    }
}

/// Percent-change series for the target and every regressor.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesBundle {
    pub cpi: MonthlySeries,
    pub core_cpi: MonthlySeries,
    pub food_cpi: MonthlySeries,
    pub gasoline: MonthlySeries,
    pub news: Option<MonthlySeries>,
}

impl SeriesBundle {
    pub fn from_levels(
        levels: &PriceLevels,
        news_index: Option<&MonthlySeries>,
        opts: TransformOptions,
    ) -> Result<Self> {
        let pi = |s: &MonthlySeries, name: &str| {
            pct_change(s, opts.window, opts.policy).map(|p| p.with_name(name))
        };
        Ok(Self {
            cpi: pi(&levels.cpi, "CPI")?,
            core_cpi: pi(&levels.core_cpi, "Core CPI")?,
            food_cpi: pi(&levels.food_cpi, "Food CPI")?,
            gasoline: pi(&levels.gasoline, "Gasoline")?,
            news: news_index
                .map(|idx| news_pi(idx, opts.window, opts.news_mode, opts.policy))
                .transpose()?,
        })
    }

    pub fn regressor(&self, r: Regressor) -> Result<&MonthlySeries> {
        match r {
            Regressor::CoreCpi => Ok(&self.core_cpi),
            Regressor::FoodCpi => Ok(&self.food_cpi),
            Regressor::Gasoline => Ok(&self.gasoline),
            Regressor::News => self
                .news
                .as_ref()
                .ok_or_else(|| Error::Config("model needs the NEWS series but none was supplied".into())),
        }
    }
}

/// Estimates `spec` on every month of `window`.
pub fn fit_model(
    spec: ModelSpec,
    data: &SeriesBundle,
    window: MonthRange,
    covariance: Covariance,
) -> Result<RegressionResult> {
    let regressors = spec.regressors();
    if window.len() < regressors.len() + 2 {
        return Err(Error::InsufficientObservations {
            observations: window.len(),
            parameters: regressors.len() + 1,
        });
    }
    let mut sources = vec![&data.cpi];
    for r in regressors {
        sources.push(data.regressor(*r)?);
    }
    for s in &sources {
        let missing = s.missing_in(window);
        if !missing.is_empty() {
            return Err(Error::MissingData {
                series: s.name().to_string(),
                months: missing,
            });
        }
    }
    let column = |s: &MonthlySeries| -> Vec<f64> {
        window.iter().map(|m| s.get(m).expect("checked above")).collect()
    };
    let y = column(&data.cpi);
    let columns = regressors
        .iter()
        .zip(&sources[1..])
        .map(|(r, s)| (r.term().to_string(), column(s)))
        .collect();
    let design = Design::with_intercept(columns, window.len())?;
    fit_ols(&y, &design, covariance)
}

/// Regressor values available around the 15th of month `t`.
pub fn nowcast_inputs(
    spec: ModelSpec,
    data: &SeriesBundle,
    t: MonthKey,
    lags: usize,
) -> Result<Vec<f64>> {
    spec.regressors()
        .iter()
        .map(|&r| {
            let series = data.regressor(r)?;
            if r.is_imputed() {
                moving_average_predictor(series, t, lags)
            } else {
                series.get(t).ok_or_else(|| Error::MissingData {
                    series: series.name().to_string(),
                    months: vec![t],
                })
            }
        })
        .collect()
}

/// `b0 + sum_j b_j x_j` with imputed price regressors and the exact NEWS value.
pub fn nowcast_from_coefficients(
    spec: ModelSpec,
    coefficients: &[f64],
    data: &SeriesBundle,
    t: MonthKey,
    lags: usize,
) -> Result<f64> {
    let inputs = nowcast_inputs(spec, data, t, lags)?;
    if coefficients.len() != inputs.len() + 1 {
        return Err(Error::LengthMismatch {
            left: coefficients.len(),
            right: inputs.len() + 1,
        });
    }
    Ok(coefficients[1..]
        .iter()
        .zip(&inputs)
        .fold(coefficients[0], |acc, (b, x)| acc + b * x))
}

pub fn nowcast(
    spec: ModelSpec,
    fitted: &RegressionResult,
    data: &SeriesBundle,
    t: MonthKey,
    lags: usize,
) -> Result<f64> {
    nowcast_from_coefficients(spec, &fitted.estimates(), data, t, lags)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Estimate once on the training window.
    #[default]
    Fixed,
    /// Re-estimate before each month on the trailing window of the
    /// training window's length, ending the month before.
    Rolling,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Scheme::Fixed),
            "rolling" => Ok(Scheme::Rolling),
            other => Err(Error::Config(format!(
                "unknown scheme `{other}` (expected fixed or rolling)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktestConfig {
    pub train: MonthRange,
    pub eval: MonthRange,
    pub scheme: Scheme,
    pub lags: usize,
    pub covariance: Covariance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastRow {
    pub month: MonthKey,
    pub nowcast: f64,
    pub nowcast_annualized: f64,
    pub realized: Option<f64>,
    pub realized_annualized: Option<f64>,
}

impl ForecastRow {
    pub fn new(month: MonthKey, nowcast: f64, realized: Option<f64>) -> Result<Self> {
        Ok(Self {
            month,
            nowcast,
            nowcast_annualized: annualize(nowcast)?,
            realized,
            realized_annualized: realized.map(annualize).transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSeries {
    pub model: String,
    pub rows: Vec<ForecastRow>,
}

pub fn backtest(spec: ModelSpec, data: &SeriesBundle, cfg: &BacktestConfig) -> Result<ForecastSeries> {
    if cfg.train.end >= cfg.eval.start {
        return Err(Error::WindowOverlap {
            train_end: cfg.train.end,
            eval_start: cfg.eval.start,
        });
    }
    let fixed = match cfg.scheme {
        Scheme::Fixed => Some(fit_model(spec, data, cfg.train, cfg.covariance)?.estimates()),
        Scheme::Rolling => None,
    };
    let span = cfg.train.len() as i64;
    let rows = cfg
        .eval
        .iter()
        .map(|t| {
            let coefficients = match &fixed {
                Some(b) => b.clone(),
                None => {
                    let window = MonthRange::new(t.offset(-span), t.pred())?;
                    fit_model(spec, data, window, cfg.covariance)?.estimates()
                }
            };
            let value = nowcast_from_coefficients(spec, &coefficients, data, t, cfg.lags)?;
            let realized = data.cpi.get(t).ok_or_else(|| Error::MissingData {
                series: data.cpi.name().to_string(),
                months: vec![t],
            })?;
            ForecastRow::new(t, value, Some(realized))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForecastSeries {
        model: spec.name().to_string(),
        rows,
    })
}

const FORECAST_HEADER: [&str; 6] = [
    "date",
    "model",
    "nowcast",
    "nowcast_annualized",
    "realized",
    "realized_annualized",
];

pub fn write_forecasts<W: Write>(
    series: &[ForecastSeries],
    mut out: W,
    provenance: Option<&str>,
) -> Result<()> {
    if let Some(p) = provenance {
        writeln!(out, "# {p}")?;
    }
    writeln!(out, "{}", FORECAST_HEADER.join(","))?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in series {
        for r in &s.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.month,
                s.model,
                r.nowcast,
                r.nowcast_annualized,
                opt(r.realized),
                opt(r.realized_annualized)
            )?;
        }
    }
    Ok(())
}

/// Reads a forecast file; models keep their order of first appearance.
pub fn read_forecasts<R: Read>(reader: R, source_name: &str) -> Result<Vec<ForecastSeries>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(FORECAST_HEADER.iter().copied()) {
        return Err(Error::parse(
            source_name,
            1,
            format!("expected header `{}`", FORECAST_HEADER.join(",")),
        ));
    }
    let mut out: Vec<ForecastSeries> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            Error::parse(source_name, e.position().map_or(0, |p| p.line()), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let month: MonthKey = record[0]
            .parse()
            .map_err(|e: String| Error::parse(source_name, line, e))?;
        let num = |i: usize| -> Result<Option<f64>> {
            let field = &record[i];
            if field.is_empty() {
                return Ok(None);
            }
            field
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::parse(source_name, line, format!("bad number `{field}`")))
        };
        let nowcast = num(2)?.ok_or_else(|| Error::parse(source_name, line, "missing nowcast"))?;
        let row = ForecastRow {
            month,
            nowcast,
            nowcast_annualized: num(3)?
                .ok_or_else(|| Error::parse(source_name, line, "missing annualized nowcast"))?,
            realized: num(4)?,
            realized_annualized: num(5)?,
        };
        let model = &record[1];
        match out.iter_mut().find(|s| s.model == model) {
            Some(s) => {
                if s.rows.last().is_some_and(|r| r.month >= month) {
                    return Err(Error::parse(
                        source_name,
                        line,
                        format!("month {month} out of order for model {model}"),
                    ));
                }
                s.rows.push(row);
            }
            None => out.push(ForecastSeries {
                model: model.to_string(),
                rows: vec![row],
            }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Unit;

    fn mk(y: i32, m: u32) -> MonthKey {
        MonthKey::new(y, m).unwrap()
    }

    fn series(name: &str, start: MonthKey, f: impl Fn(usize) -> f64, len: usize) -> MonthlySeries {
        MonthlySeries::from_points(name, Unit::Percent, (0..len).map(|i| (start.offset(i as i64), f(i))))
            .unwrap()
    }

    /// Regressors with enough variation to identify every coefficient.
    fn bundle(noise: f64) -> SeriesBundle {
        let start = mk(2014, 1);
        let len = 120;
        let core = series("Core CPI", start, |i| 2.0 + 0.3 * ((i as f64) * 0.7).sin(), len);
        let food = series("Food CPI", start, |i| 2.5 + 0.8 * ((i as f64) * 0.31).cos(), len);
        let gas = series("Gasoline", start, |i| 10.0 * ((i as f64) * 0.13).sin() + (i % 7) as f64, len);
        let news = series("NEWS", start, |i| ((i * 37 % 11) as f64 - 5.0) * 0.8, len);
        let cpi = series(
            "CPI",
            start,
            |i| {
                0.021 + 0.616 * core.get(start.offset(i as i64)).unwrap()
                    + 0.186 * food.get(start.offset(i as i64)).unwrap()
                    + 0.035 * gas.get(start.offset(i as i64)).unwrap()
                    + noise * (((i * 53) % 17) as f64 - 8.0) / 8.0
            },
            len,
        );
        SeriesBundle {
            cpi,
            core_cpi: core,
            food_cpi: food,
            gasoline: gas,
            news: Some(news),
        }
    }

    fn train() -> MonthRange {
        MonthRange::new(mk(2015, 1), mk(2019, 12)).unwrap()
    }

    #[test]
    fn spec_names_round_trip() {
        for m in ModelSpec::ALL {
            assert_eq!(m.name().parse::<ModelSpec>().unwrap(), m);
        }
        assert!(matches!("cleveland".parse::<ModelSpec>(), Err(Error::Config(_))));
        assert_eq!(ModelSpec::FedGasNews.terms(), vec!["const", "pi-CCPI", "pi-FCPI", "pi-NEWS"]);
        assert_eq!(ModelSpec::CcpiNews.terms(), vec!["const", "pi-CCPI", "pi-NEWS"]);
    }

    #[test]
    fn exact_identification() {
        let r = fit_model(ModelSpec::Fed, &bundle(0.0), train(), Covariance::Classical).unwrap();
        let want = [0.021, 0.616, 0.186, 0.035];
        for (c, w) in r.coefficients.iter().zip(want) {
            assert!((c.estimate - w).abs() < 1e-10, "{} {}", c.name, c.estimate);
        }
    }

    #[test]
    fn fed_news_shape() {
        let r = fit_model(ModelSpec::FedNews, &bundle(0.05), train(), Covariance::Classical).unwrap();
        assert_eq!(r.coefficients.len(), 5);
        assert_eq!(r.observations, 60);
        assert_eq!(r.coefficients[4].name, "pi-NEWS");
    }

    #[test]
    fn missing_months_are_listed() {
        let mut b = bundle(0.0);
        b.food_cpi = MonthlySeries::from_points(
            "Food CPI",
            Unit::Percent,
            b.food_cpi.iter().filter(|(m, _)| *m != mk(2016, 6)),
        )
        .unwrap();
        match fit_model(ModelSpec::Fed, &b, train(), Covariance::Classical) {
            Err(Error::MissingData { series, months }) => {
                assert_eq!(series, "Food CPI");
                assert_eq!(months, vec![mk(2016, 6)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn news_spec_without_news_series() {
        let mut b = bundle(0.0);
        b.news = None;
        assert!(matches!(
            fit_model(ModelSpec::News, &b, train(), Covariance::Classical),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn intercept_only_coefficients() {
        let b = bundle(0.0);
        let v = nowcast_from_coefficients(ModelSpec::Fed, &[0.5, 0.0, 0.0, 0.0], &b, mk(2020, 3), 12)
            .unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn news_regressor_uses_current_value() {
        let b = bundle(0.0);
        let t = mk(2020, 3);
        let v = nowcast_from_coefficients(ModelSpec::News, &[0.0, 1.0], &b, t, 12).unwrap();
        assert_eq!(v, b.news.as_ref().unwrap().get(t).unwrap());
    }

    #[test]
    fn zero_news_reduces_to_fed() {
        let mut b = bundle(0.0);
        let t = mk(2020, 3);
        b.news.as_mut().unwrap().insert(t, 0.0);
        let coefs = [0.021, 0.616, 0.186, 0.035];
        let fed = nowcast_from_coefficients(ModelSpec::Fed, &coefs, &b, t, 12).unwrap();
        let with_news =
            nowcast_from_coefficients(ModelSpec::FedNews, &[0.021, 0.616, 0.186, 0.035, 0.149], &b, t, 12)
                .unwrap();
        assert_eq!(fed, with_news);
    }

    #[test]
    fn nowcast_is_linear_in_coefficients() {
        let b = bundle(0.0);
        let t = mk(2021, 7);
        let coefs = [0.017, 0.634, 0.176, 0.034, 0.149];
        let doubled: Vec<f64> = coefs.iter().map(|c| 2.0 * c).collect();
        let one = nowcast_from_coefficients(ModelSpec::FedNews, &coefs, &b, t, 12).unwrap();
        let two = nowcast_from_coefficients(ModelSpec::FedNews, &doubled, &b, t, 12).unwrap();
        assert!((two - 2.0 * one).abs() < 1e-12);
    }

    #[test]
    fn missing_news_month_errors() {
        let mut b = bundle(0.0);
        b.news = Some(b.news.unwrap().truncated(mk(2020, 1)));
        assert!(matches!(
            nowcast_from_coefficients(ModelSpec::News, &[0.0, 1.0], &b, mk(2020, 2), 12),
            Err(Error::MissingData { .. })
        ));
    }

    fn cfg(eval: MonthRange, scheme: Scheme) -> BacktestConfig {
        BacktestConfig {
            train: train(),
            eval,
            scheme,
            lags: 12,
            covariance: Covariance::Classical,
        }
    }

    #[test]
    fn one_month_backtest_equals_direct_nowcast() {
        let b = bundle(0.05);
        let t = mk(2020, 1);
        let f = backtest(ModelSpec::FedNews, &b, &cfg(MonthRange::new(t, t).unwrap(), Scheme::Fixed)).unwrap();
        let fitted = fit_model(ModelSpec::FedNews, &b, train(), Covariance::Classical).unwrap();
        assert_eq!(f.rows.len(), 1);
        assert_eq!(f.rows[0].nowcast, nowcast(ModelSpec::FedNews, &fitted, &b, t, 12).unwrap());
        assert_eq!(f.rows[0].realized, b.cpi.get(t));
    }

    #[test]
    fn covid_window_has_48_months() {
        let b = bundle(0.05);
        let eval = MonthRange::new(mk(2020, 1), mk(2023, 12)).unwrap();
        for scheme in [Scheme::Fixed, Scheme::Rolling] {
            let f = backtest(ModelSpec::Fed, &b, &cfg(eval, scheme)).unwrap();
            assert_eq!(f.rows.len(), 48);
            for r in &f.rows {
                assert_eq!(r.nowcast_annualized, annualize(r.nowcast).unwrap());
                assert_eq!(r.realized_annualized, Some(annualize(r.realized.unwrap()).unwrap()));
            }
        }
    }

    #[test]
    fn overlapping_windows_rejected() {
        let b = bundle(0.0);
        let eval = MonthRange::new(mk(2019, 12), mk(2020, 6)).unwrap();
        assert!(matches!(
            backtest(ModelSpec::Fed, &b, &cfg(eval, Scheme::Fixed)),
            Err(Error::WindowOverlap { .. })
        ));
    }

    #[test]
    fn forecast_file_round_trip() {
        let b = bundle(0.05);
        let eval = MonthRange::new(mk(2020, 1), mk(2020, 6)).unwrap();
        let f = backtest(ModelSpec::Fed, &b, &cfg(eval, Scheme::Fixed)).unwrap();
        let mut partial = f.clone();
        partial.model = "other".into();
        partial.rows[0].realized = None;
        partial.rows[0].realized_annualized = None;
        let all = vec![f, partial];
        let mut buf = Vec::new();
        write_forecasts(&all, &mut buf, Some("test")).unwrap();
        let back = read_forecasts(buf.as_slice(), "mem").unwrap();
        assert_eq!(back, all);
    }
}
