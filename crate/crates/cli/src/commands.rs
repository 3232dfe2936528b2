//! Subcommand implementations. Each reads its inputs from the configured
//! files or from the output directory and writes deterministic outputs.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use inflanow::evaluation::{evaluate, EvaluationReport};
use inflanow::index::{build_news_index, monthly_aggregate, NEWS};
use inflanow::io::{self as article_io, Parsed, Rejection};
use inflanow::nowcast::{
    backtest, fit_model, nowcast, read_forecasts, write_forecasts, ForecastRow, ForecastSeries,
    ModelSpec, PriceLevels, SeriesBundle,
};
use inflanow::ols::RegressionResult;
use inflanow::report;
use inflanow::sentiment::{argmax_score, classification_report, score_articles, Label, ScoredArticle};
use inflanow::{MonthKey, MonthlySeries, Unit};

use crate::config::Settings;
use crate::{CliError, Command};

pub const PROBABILITIES_FILE: &str = "probabilities.csv";
pub const SCORED_FILE: &str = "scored.csv";
pub const REJECTIONS_FILE: &str = "rejections.csv";
pub const INDEX_FILE: &str = "news_index.csv";
pub const INDEX_META_FILE: &str = "news_index_meta.csv";
pub const FORECASTS_FILE: &str = "forecasts.csv";
pub const EVALUATION_TXT: &str = "evaluation.txt";
pub const EVALUATION_CSV: &str = "evaluation.csv";
pub const CLASSIFICATION_TXT: &str = "classification.txt";
pub const CLASSIFICATION_CSV: &str = "classification.csv";

pub fn dispatch(settings: &Settings, command: &Command) -> Result<(), CliError> {
    match command {
        Command::Score => cmd_score(settings),
        Command::BuildIndex => cmd_build_index(settings),
        Command::Fit { models } => cmd_fit(settings, models),
        Command::Nowcast { model, month } => cmd_nowcast(settings, model, month),
        Command::Backtest { models } => cmd_backtest(settings, models),
        Command::Evaluate { forecasts } => cmd_evaluate(settings, forecasts.as_deref()),
        Command::Metrics { labels } => cmd_metrics(settings, labels.as_deref()),
        Command::GenerateToy { .. } => unreachable!("handled before configuration is loaded"),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(io_err(path))
}

fn source_name(path: &Path) -> String {
    path.display().to_string()
}

fn out_path(settings: &Settings, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&settings.out_dir).map_err(io_err(&settings.out_dir))?;
    Ok(settings.out_dir.join(name))
}

/// Writes through `f` into `name` inside the output directory.
fn write_out(
    settings: &Settings,
    name: &str,
    f: impl FnOnce(&mut BufWriter<File>) -> inflanow::Result<()>,
) -> Result<PathBuf, CliError> {
    let path = out_path(settings, name)?;
    let file = File::create(&path).map_err(io_err(&path))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(io_err(&path))?;
    Ok(path)
}

/// Writes rendered text preceded by the provenance comment.
fn write_text(settings: &Settings, name: &str, body: &str) -> Result<PathBuf, CliError> {
    let prov = settings.provenance();
    write_out(settings, name, |w| {
        writeln!(w, "# {prov}")?;
        w.write_all(body.as_bytes())?;
        Ok(())
    })
}

pub fn parse_models(names: &[String]) -> Result<Vec<ModelSpec>, CliError> {
    let mut out: Vec<ModelSpec> = Vec::new();
    for name in names {
        let specs = if name == "all" {
            ModelSpec::ALL.to_vec()
        } else {
            vec![name.parse().map_err(|e: inflanow::Error| CliError::Usage(e.to_string()))?]
        };
        for s in specs {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

fn cmd_score(settings: &Settings) -> Result<(), CliError> {
    if settings.news_text.is_none() && settings.news_probabilities.is_none() {
        return Err(CliError::Config(
            "score needs `news_text` or `news_probabilities`".into(),
        ));
    }
    let mut rejected: Vec<(String, Rejection)> = Vec::new();
    let mut total = 0;
    let mut texts = Vec::new();
    let mut records = Vec::new();
    if let Some(path) = &settings.news_text {
        let name = source_name(path);
        let p = article_io::read_news_text(open(path)?, &name)?;
        total += p.total();
        rejected.extend(p.rejected.into_iter().map(|x| (name.clone(), x)));
        texts = p.rows;
    }
    if let Some(path) = &settings.news_probabilities {
        let name = source_name(path);
        let p = article_io::read_probabilities(open(path)?, &name)?;
        total += p.total();
        rejected.extend(p.rejected.into_iter().map(|x| (name.clone(), x)));
        records = p.rows;
    }

    let prov = settings.provenance();
    write_out(settings, REJECTIONS_FILE, |w| {
        writeln!(w, "# {prov}")?;
        let mut csv = csv_writer(w);
        csv.write_record(["source", "line", "reason"])?;
        for (source, r) in &rejected {
            csv.write_record([source.as_str(), &r.line.to_string(), &r.reason])?;
        }
        csv.flush()?;
        Ok(())
    })?;
    if total > 0 && rejected.len() as f64 > settings.raw.max_rejected_fraction * total as f64 {
        return Err(CliError::Data(format!(
            "{} of {} rows rejected (limit {:.0}%); see {}",
            rejected.len(),
            total,
            100.0 * settings.raw.max_rejected_fraction,
            settings.out_dir.join(REJECTIONS_FILE).display()
        )));
    }

    let scored = score_articles(
        &texts,
        &records,
        &settings.lexicon,
        &settings.classifier,
        settings.score_function,
    );
    let from_text = scored.iter().filter(|a| a.text.is_some()).count();
    if !texts.is_empty() && from_text == 0 {
        eprintln!(
            "warning: none of the {} news texts matched the lexicon",
            texts.len()
        );
    }
    write_out(settings, PROBABILITIES_FILE, |w| {
        article_io::write_probabilities(
            scored.iter().map(|a| (a.id.as_str(), a.date, a.probs)),
            w,
            Some(&prov),
        )
    })?;
    write_out(settings, SCORED_FILE, |w| article_io::write_scored(&scored, w, Some(&prov)))?;
    println!(
        "scored {} articles ({} of {} texts matched the lexicon, {} probability rows); {} rows rejected",
        scored.len(),
        from_text,
        texts.len(),
        records.len(),
        rejected.len()
    );
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

fn read_scored(settings: &Settings) -> Result<Vec<ScoredArticle>, CliError> {
    let path = settings.out_dir.join(SCORED_FILE);
    let name = source_name(&path);
    let parsed: Parsed<ScoredArticle> =
        article_io::read_scored(open(&path)?, &name, settings.score_function)?;
    Ok(parsed.strict(&name)?)
}

fn cmd_build_index(settings: &Settings) -> Result<(), CliError> {
    let articles = read_scored(settings)?;
    let monthly = monthly_aggregate(&articles, settings.day_cutoff)?;
    let index = build_news_index(&monthly)?;
    let prov = settings.provenance();
    write_out(settings, INDEX_FILE, |w| index.series().write_csv(w, Some(&prov)))?;
    write_out(settings, INDEX_META_FILE, |w| index.write_metadata(w, Some(&prov)))?;
    println!(
        "NEWS index: {} months ({} without articles)",
        index.series().len(),
        index.gaps().len()
    );
    Ok(())
}

fn read_levels(path: &Path, name: &str) -> Result<MonthlySeries, CliError> {
    Ok(MonthlySeries::read_csv(open(path)?, &source_name(path), name, Unit::IndexLevel)?)
}

/// Percent-change series for every model in `models`. The NEWS index is
/// read from the output directory only when a model needs it.
pub fn load_bundle(settings: &Settings, models: &[ModelSpec]) -> Result<SeriesBundle, CliError> {
    let levels = PriceLevels {
        cpi: read_levels(&settings.cpi, "CPI")?,
        core_cpi: read_levels(&settings.core_cpi, "Core CPI")?,
        food_cpi: read_levels(&settings.food_cpi, "Food CPI")?,
        gasoline: read_levels(&settings.gasoline, "Gasoline")?,
    };
    let news = if models.iter().any(|m| m.uses_news()) {
        let path = settings.out_dir.join(INDEX_FILE);
        if !path.is_file() {
            return Err(CliError::Data(format!(
                "{} not found; run build-index first",
                path.display()
            )));
        }
        Some(read_levels(&path, NEWS)?)
    } else {
        None
    };
    Ok(SeriesBundle::from_levels(&levels, news.as_ref(), settings.transform)?)
}

fn cmd_fit(settings: &Settings, names: &[String]) -> Result<(), CliError> {
    let models = parse_models(names)?;
    let data = load_bundle(settings, &models)?;
    let cfg = &settings.backtest;
    let fits: Vec<(ModelSpec, RegressionResult)> = models
        .iter()
        .map(|&m| Ok((m, fit_model(m, &data, cfg.train, cfg.covariance)?)))
        .collect::<Result<_, CliError>>()?;
    let table: Vec<(&str, &RegressionResult)> = fits.iter().map(|(m, r)| (m.name(), r)).collect();
    for entry in &table {
        let single = [*entry];
        write_text(settings, &format!("regression_{}.txt", entry.0), &report::regression_table("CPI", &single))?;
        write_text(settings, &format!("regression_{}.csv", entry.0), &report::regression_table_csv(&single))?;
    }
    let text = report::regression_table("CPI", &table);
    if table.len() > 1 {
        write_text(settings, "regression_table.txt", &text)?;
        write_text(settings, "regression_table.csv", &report::regression_table_csv(&table))?;
    }
    write_text(settings, "coefficients.csv", &report::coefficients_csv(&table))?;
    write_text(settings, "diagnostics.csv", &report::diagnostics_csv(&table))?;
    print!("{text}");
    Ok(())
}

fn cmd_nowcast(settings: &Settings, name: &str, month: &str) -> Result<(), CliError> {
    let spec = parse_models(&[name.to_string()])?;
    let spec = spec[0];
    let t: MonthKey = month
        .parse()
        .map_err(|e: String| CliError::Usage(format!("--month: {e}")))?;
    let data = load_bundle(settings, &[spec])?;
    let cfg = &settings.backtest;
    if t <= cfg.train.end {
        return Err(CliError::Config(format!(
            "nowcast month {t} is not after the training window ending {}",
            cfg.train.end
        )));
    }
    let fitted = fit_model(spec, &data, cfg.train, cfg.covariance)?;
    let value = nowcast(spec, &fitted, &data, t, cfg.lags)?;
    let row = ForecastRow::new(t, value, data.cpi.get(t))?;
    let series = [ForecastSeries {
        model: spec.name().to_string(),
        rows: vec![row],
    }];
    let prov = settings.provenance();
    let file = format!("nowcast_{}_{t}.csv", spec.name());
    write_out(settings, &file, |w| write_forecasts(&series, w, Some(&prov)))?;
    println!(
        "{t} {}: {:.4} (annualized {:.4})",
        spec.name(),
        row.nowcast,
        row.nowcast_annualized
    );
    Ok(())
}

fn write_evaluation(settings: &Settings, report_: &EvaluationReport) -> Result<(), CliError> {
    let text = report::evaluation_table(report_);
    write_text(settings, EVALUATION_TXT, &text)?;
    write_text(settings, EVALUATION_CSV, &report::evaluation_csv(report_))?;
    print!("{text}");
    Ok(())
}

fn cmd_backtest(settings: &Settings, names: &[String]) -> Result<(), CliError> {
    let models = parse_models(names)?;
    let data = load_bundle(settings, &models)?;
    let series: Vec<ForecastSeries> = models
        .iter()
        .map(|&m| backtest(m, &data, &settings.backtest))
        .collect::<inflanow::Result<_>>()?;
    let prov = settings.provenance();
    write_out(settings, FORECASTS_FILE, |w| write_forecasts(&series, w, Some(&prov)))?;
    write_evaluation(settings, &evaluate(&series, settings.evaluation)?)
}

fn cmd_evaluate(settings: &Settings, forecasts: Option<&Path>) -> Result<(), CliError> {
    let path = forecasts
        .map(Path::to_path_buf)
        .unwrap_or_else(|| settings.out_dir.join(FORECASTS_FILE));
    let series = read_forecasts(open(&path)?, &source_name(&path))?;
    write_evaluation(settings, &evaluate(&series, settings.evaluation)?)
}

fn cmd_metrics(settings: &Settings, labels: Option<&Path>) -> Result<(), CliError> {
    let path = labels
        .map(Path::to_path_buf)
        .or_else(|| settings.labels.clone())
        .ok_or_else(|| CliError::Config("metrics needs `labels` or --labels".into()))?;
    let name = source_name(&path);
    let gold = article_io::read_labeled(open(&path)?, &name, settings.label_encoding)?.strict(&name)?;
    let predicted: BTreeMap<String, Label> = read_scored(settings)?
        .into_iter()
        .map(|a| (a.id, argmax_score(&a.probs)))
        .collect();
    let (pred, gold): (Vec<Label>, Vec<Label>) = gold
        .iter()
        .filter_map(|g| predicted.get(&g.id).map(|p| (*p, g.gold)))
        .unzip();
    if gold.is_empty() {
        return Err(CliError::Data(format!(
            "no labeled article in {name} appears in {SCORED_FILE}"
        )));
    }
    let rep = classification_report(&pred, &gold)?;
    let text = report::classification_table(&rep);
    write_text(settings, CLASSIFICATION_TXT, &text)?;
    let mut csv = String::from("label,precision,recall,f1,support\n");
    for c in &rep.per_class {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            c.label.value(),
            c.precision,
            c.recall,
            c.f1,
            c.support
        ));
    }
    csv.push_str(&format!("weighted,,,{},{}\n", rep.weighted_f1, gold.len()));
    write_text(settings, CLASSIFICATION_CSV, &csv)?;
    print!("{text}");
    println!("{} labeled articles matched scored articles", gold.len());
    Ok(())
}
