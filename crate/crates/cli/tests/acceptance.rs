//! Acceptance gate. Each criterion prints one PASS/FAIL line; the test fails
//! if any criterion fails or exceeds its time budget.
//!
//! Run with `cargo test -p inflanow-cli --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use inflanow::evaluation::{giacomini_white, GwVariant};
use inflanow::index::{build_news_index, monthly_aggregate, MonthlySentiment};
use inflanow::io::{read_news_text, read_probabilities};
use inflanow::nowcast::{
    backtest, fit_model, nowcast_from_coefficients, BacktestConfig, ModelSpec, PriceLevels,
    Scheme, SeriesBundle,
};
use inflanow::ols::{fit_ols, Covariance, Design};
use inflanow::sentiment::{
    argmax_score, classification_report, polarity_score, score_articles, ArticleDate, Label,
    ScoreFunction, ScoredArticle, SentimentProbs,
};
use inflanow::transform::{annualize, deannualize, moving_average_predictor, pct_change, DenominatorPolicy};
use inflanow::{MonthKey, MonthRange, MonthlySeries, Unit};
use inflanow_cli::config::Settings;
use inflanow_oracles as oracle;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy")
}

fn month(y: i32, m: u32) -> MonthKey {
    MonthKey::new(y, m).unwrap()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1
fn ols_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for case in 0..25 {
        let k = rng.random_range(2..=5);
        let n = rng.random_range(k + 2..=30);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                std::iter::once(1.0)
                    .chain((1..k).map(|_| rng.sample::<f64, _>(StandardNormal) * 3.0))
                    .collect()
            })
            .collect();
        let beta: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().zip(&beta).map(|(x, b)| x * b).sum::<f64>() + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let cols = (1..k)
            .map(|j| (format!("x{j}"), rows.iter().map(|r| r[j]).collect()))
            .collect();
        let design = Design::with_intercept(cols, n).map_err(|e| e.to_string())?;
        let fit = fit_ols(&y, &design, Covariance::Classical).map_err(|e| e.to_string())?;
        let o = oracle::ols(&y, &rows);
        let f = fit.f_test.as_ref().ok_or("missing F test")?;
        let mut pairs = vec![
            ("R2", fit.r_squared, o.r_squared),
            ("adj R2", fit.adj_r_squared, o.adj_r_squared),
            ("F", f.statistic, o.f_statistic),
            ("F p", f.p_value, o.f_p_value),
        ];
        for (j, c) in fit.coefficients.iter().enumerate() {
            pairs.push(("beta", c.estimate, o.beta[j]));
            pairs.push(("se", c.std_error, o.std_errors[j]));
            pairs.push(("t", c.t_stat, o.t_stats[j]));
            pairs.push(("p", c.p_value, o.p_values[j]));
        }
        for (what, got, want) in pairs {
            let d = oracle::rel_diff(got, want);
            worst = worst.max(d);
            check(d <= 1e-8, || format!("case {case} (n={n}, k={k}) {what}: {got:e} vs {want:e}"))?;
        }
    }
    Ok(format!("25 designs, max relative difference {worst:.1e}"))
}

fn toy_bundle(with_news: bool) -> Result<(SeriesBundle, Settings), String> {
    let settings = Settings::load(&toy_dir().join("inflanow.toml"), &[], Some(&std::env::temp_dir()))
        .map_err(|e| e.to_string())?;
    let read = |p: &Path, name: &str| {
        MonthlySeries::read_csv(fs::File::open(p).unwrap(), name, name, Unit::IndexLevel).map_err(|e| e.to_string())
    };
    let levels = PriceLevels {
        cpi: read(&settings.cpi, "CPI")?,
        core_cpi: read(&settings.core_cpi, "Core CPI")?,
        food_cpi: read(&settings.food_cpi, "Food CPI")?,
        gasoline: read(&settings.gasoline, "Gasoline")?,
    };
    let news = if with_news {
        let articles = toy_articles(&settings)?;
        let monthly = monthly_aggregate(&articles, settings.day_cutoff).map_err(|e| e.to_string())?;
        Some(build_news_index(&monthly).map_err(|e| e.to_string())?.into_series())
    } else {
        None
    };
    let bundle = SeriesBundle::from_levels(&levels, news.as_ref(), settings.transform).map_err(|e| e.to_string())?;
    Ok((bundle, settings))
}

fn toy_articles(settings: &Settings) -> Result<Vec<ScoredArticle>, String> {
    let texts = read_news_text(fs::File::open(settings.news_text.as_ref().unwrap()).unwrap(), "text")
        .and_then(|p| p.strict("text"))
        .map_err(|e| e.to_string())?;
    let probs = read_probabilities(fs::File::open(settings.news_probabilities.as_ref().unwrap()).unwrap(), "probs")
        .and_then(|p| p.strict("probs"))
        .map_err(|e| e.to_string())?;
    Ok(score_articles(&texts, &probs, &settings.lexicon, &settings.classifier, settings.score_function))
}

// 2
fn coefficient_recovery() -> Outcome {
    let beta = [0.021, 0.616, 0.186, 0.035];
    let sigma = 0.064;
    let (data, settings) = toy_bundle(false)?;
    let train = settings.backtest.train;
    let col = |s: &MonthlySeries| -> Vec<f64> { train.iter().map(|m| s.get(m).unwrap()).collect() };
    let x = [col(&data.core_cpi), col(&data.food_cpi), col(&data.gasoline)];
    let n = train.len();
    check(n == 60, || format!("training window has {n} months"))?;
    let design = Design::with_intercept(
        vec![
            ("pi-CCPI".into(), x[0].clone()),
            ("pi-FCPI".into(), x[1].clone()),
            ("pi-Gasoline".into(), x[2].clone()),
        ],
        n,
    )
    .map_err(|e| e.to_string())?;
    let mean: Vec<f64> = (0..n)
        .map(|i| beta[0] + beta[1] * x[0][i] + beta[2] * x[1][i] + beta[3] * x[2][i])
        .collect();
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let reps = 500;
    let mut inside = [0usize; 4];
    let mut estimates: [Vec<f64>; 4] = Default::default();
    let mut se_sum = [0.0; 4];
    for _ in 0..reps {
        let y: Vec<f64> = mean.iter().map(|m| m + noise.sample(&mut rng)).collect();
        let fit = fit_ols(&y, &design, Covariance::Classical).map_err(|e| e.to_string())?;
        for (j, c) in fit.coefficients.iter().enumerate() {
            if (c.estimate - beta[j]).abs() <= 3.0 * c.std_error {
                inside[j] += 1;
            }
            estimates[j].push(c.estimate);
            se_sum[j] += c.std_error;
        }
    }
    let mut detail = Vec::new();
    for j in 0..4 {
        let coverage = inside[j] as f64 / reps as f64;
        let m = estimates[j].iter().sum::<f64>() / reps as f64;
        let sd = (estimates[j].iter().map(|b| (b - m).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
        let se = se_sum[j] / reps as f64;
        let ratio = sd / se;
        check(coverage >= 0.99, || format!("beta[{j}] coverage {coverage:.3} < 0.99"))?;
        check((ratio - 1.0).abs() <= 0.25, || format!("beta[{j}] empirical sd / mean se = {ratio:.3}"))?;
        detail.push(format!("b{j}: cover {coverage:.3}, sd/se {ratio:.3}"));
    }
    Ok(detail.join("; "))
}

// 3
fn nesting_property() -> Outcome {
    let (data, settings) = toy_bundle(true)?;
    let mut fixtures = 0;
    let mut windows = vec![settings.backtest.train];
    for start in 0..24 {
        for len in [12, 36, 60] {
            let s = month(2015, 1).offset(start);
            windows.push(MonthRange::new(s, s.offset(len - 1)).unwrap());
        }
    }
    for w in &windows {
        let fed = fit_model(ModelSpec::Fed, &data, *w, Covariance::Classical).map_err(|e| e.to_string())?;
        let both = fit_model(ModelSpec::FedNews, &data, *w, Covariance::Classical).map_err(|e| e.to_string())?;
        check(both.r_squared >= fed.r_squared - 1e-12, || {
            format!("window {w}: R2 fed+news {} < fed {}", both.r_squared, fed.r_squared)
        })?;
        fixtures += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..100 {
        let n = rng.random_range(7..=60);
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let named = |k: usize| -> Vec<(String, Vec<f64>)> {
            (0..k).map(|j| (format!("x{j}"), cols[j].clone())).collect()
        };
        let small = fit_ols(&y, &Design::with_intercept(named(3), n).unwrap(), Covariance::Classical)
            .map_err(|e| e.to_string())?;
        let big = fit_ols(&y, &Design::with_intercept(named(4), n).unwrap(), Covariance::Classical)
            .map_err(|e| e.to_string())?;
        check(big.r_squared >= small.r_squared - 1e-12, || format!("random case {case}"))?;
        fixtures += 1;
    }
    Ok(format!("{fixtures} fixtures"))
}

// 4
fn gw_size() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let reps = 2000;
    let n = 48;
    let mut rejections = BTreeMap::new();
    for _ in 0..reps {
        let a: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        for v in [GwVariant::Unconditional, GwVariant::ConditionalLag1] {
            let r = giacomini_white(&a, &b, v, 0).map_err(|e| e.to_string())?;
            *rejections.entry(v.as_str()).or_insert(0usize) += usize::from(r.p_value < 0.05);
        }
    }
    let rate = |v: GwVariant| rejections[v.as_str()] as f64 / reps as f64;
    let u = rate(GwVariant::Unconditional);
    let c = rate(GwVariant::ConditionalLag1);
    check((0.03..=0.07).contains(&u), || format!("unconditional size {u:.4}"))?;
    check((0.025..=0.08).contains(&c), || format!("conditional-lag1 size {c:.4}"))?;
    Ok(format!("unconditional {u:.4}, conditional-lag1 {c:.4}"))
}

// 5
fn index_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let start = month(2013, 1);
    let make = |rng: &mut ChaCha8Rng, grid: bool| -> Vec<ScoredArticle> {
        (0..600)
            .map(|i| {
                let off = rng.random_range(0..60i64);
                let raw: f64 = rng.random_range(-1.0..1.0);
                let score = if grid { (raw * 256.0).round() / 256.0 } else { raw };
                let (d, u) = if score >= 0.0 { (0.0, score) } else { (-score, 0.0) };
                let probs = SentimentProbs::new(d, 1.0 - d - u, u).unwrap();
                let mut a = ScoredArticle::new(
                    format!("a{i}"),
                    ArticleDate::new(start.offset(off), Some(rng.random_range(1..=28))).unwrap(),
                    None,
                    probs,
                    ScoreFunction::Polarity,
                );
                a.score = score;
                a
            })
            .collect()
    };
    let index_of = |arts: &[ScoredArticle]| -> Result<(Vec<MonthlySentiment>, MonthlySeries), String> {
        let monthly = monthly_aggregate(arts, None).map_err(|e| e.to_string())?;
        let idx = build_news_index(&monthly).map_err(|e| e.to_string())?;
        Ok((monthly, idx.into_series()))
    };

    // telescoping: exact whenever the running sums are exact (dyadic scores,
    // power-of-two article counts); otherwise the only discrepancy is the
    // rounding of the single addition that produced the level
    let mut dyadic = make(&mut rng, true);
    let mut per_month: BTreeMap<MonthKey, usize> = BTreeMap::new();
    dyadic.retain(|a| {
        let c = per_month.entry(a.date.month).or_default();
        *c += 1;
        *c <= 4
    });
    let counts: BTreeMap<MonthKey, usize> = dyadic.iter().fold(BTreeMap::new(), |mut m, a| {
        *m.entry(a.date.month).or_default() += 1;
        m
    });
    dyadic.retain(|a| counts[&a.date.month].is_power_of_two());
    let mut worst_ulps = 0.0f64;
    for (arts, exact) in [(dyadic, true), (make(&mut rng, false), false)] {
        let (monthly, series) = index_of(&arts)?;
        let means: BTreeMap<MonthKey, f64> = monthly.iter().map(|m| (m.month, m.mean_score)).collect();
        let mut prev = 0.0;
        for (m, level) in series.iter() {
            let diff = level - prev;
            let mean = means.get(&m).copied().unwrap_or(0.0);
            if exact {
                check(diff.to_bits() == mean.to_bits(), || format!("{m}: diff {diff:e} != mean {mean:e}"))?;
            } else {
                let half_ulp = f64::EPSILON * level.abs().max(prev.abs()) / 2.0;
                let ulps = (diff - mean).abs() / (2.0 * half_ulp).max(f64::MIN_POSITIVE);
                worst_ulps = worst_ulps.max(ulps);
                check((diff - mean).abs() <= half_ulp, || format!("{m}: diff {diff:e} vs mean {mean:e}"))?;
            }
            prev = level;
        }
    }

    // permutation invariance
    let mut arts = make(&mut rng, false);
    let (_, base) = index_of(&arts)?;
    for s in 0..100 {
        arts.shuffle(&mut rng);
        let (_, other) = index_of(&arts)?;
        let same = base.iter().zip(other.iter()).all(|(a, b)| a.0 == b.0 && a.1.to_bits() == b.1.to_bits());
        check(same && base.len() == other.len(), || format!("shuffle {s} changed the index"))?;
    }

    // linearity
    for c in [-3.5, -1.0, 0.001, 0.5, 2.0, 1e3] {
        let scaled: Vec<ScoredArticle> = arts
            .iter()
            .cloned()
            .map(|mut a| {
                a.score *= c;
                a
            })
            .collect();
        let (_, s) = index_of(&scaled)?;
        for ((m, v), (_, b)) in s.iter().zip(base.iter()) {
            check((v - c * b).abs() <= 1e-12 * (c * b).abs().max(1.0), || format!("c={c} {m}: {v} vs {}", c * b))?;
        }
    }
    Ok(format!(
        "dyadic fixture bit-exact; random fixture within half an ulp of the level (max {worst_ulps:.2} ulp); 100 shuffles bit-identical; scaling within 1e-12"
    ))
}

// 6
fn transform_identities() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let x = -50.0 + 100.0 * (i as f64 + 0.5) / 1000.0;
        let back = deannualize(annualize(x).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let fwd = annualize(deannualize(x).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        for v in [back, fwd] {
            let d = oracle::rel_diff(v, x);
            worst = worst.max(d);
            check(d <= 1e-12, || format!("round trip at {x}: {v}"))?;
        }
    }
    let start = month(2000, 1);
    for (p0, g) in [(100.0, 1.002), (57.3, 0.995), (1.0, 1.05), (250.0, 1.0)] {
        let s = MonthlySeries::from_points(
            "geo",
            Unit::IndexLevel,
            (0..120).map(|t| (start.offset(t), p0 * f64::powi(g, t as i32))),
        )
        .unwrap();
        let pi = pct_change(&s, 12, DenominatorPolicy::Error).map_err(|e| e.to_string())?;
        let expected = 100.0 * (f64::powi(g, 12) - 1.0);
        for (m, v) in pi.iter() {
            check((v - expected).abs() <= 1e-10, || format!("g={g} {m}: {v} vs {expected}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let values: Vec<f64> = (0..240).map(|_| rng.random_range(-5.0..15.0)).collect();
    let s = MonthlySeries::from_points(
        "pi",
        Unit::Percent,
        values.iter().enumerate().map(|(i, v)| (start.offset(i as i64), *v)),
    )
    .unwrap();
    for t in 12..240 {
        let got = moving_average_predictor(&s, start.offset(t), 12).map_err(|e| e.to_string())?;
        let mut sum = 0.0;
        for lag in 1..=12 {
            sum += values[(t - lag) as usize];
        }
        let want = sum / 12.0;
        check(got.to_bits() == want.to_bits(), || format!("month {t}: {got} vs {want}"))?;
    }
    Ok(format!("round trip max rel {worst:.1e}; geometric constant; 228 moving averages bit-exact"))
}

// 7
fn score_functions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for i in 0..10_000 {
        let raw: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let total: f64 = raw.iter().sum();
        let p = SentimentProbs::new(raw[0] / total, raw[1] / total, raw[2] / total).map_err(|e| e.to_string())?;
        let swapped = SentimentProbs::new(p.p_up(), p.p_neutral(), p.p_down()).unwrap();
        let s = polarity_score(&p);
        check(polarity_score(&swapped) == -s, || format!("vector {i}: antisymmetry"))?;
        check(s.abs() <= 1.0, || format!("vector {i}: |score| > 1"))?;
        let label = argmax_score(&p);
        if label != Label::Neutral && p.get(label) > 0.5 {
            check(s.signum() == f64::from(label.value()), || format!("vector {i}: sign disagrees with argmax"))?;
        }
    }
    for l in Label::ALL {
        check(argmax_score(&SentimentProbs::one_hot(l)) == l, || format!("one-hot {l:?}"))?;
    }
    let third = 1.0 / 3.0;
    let table = [
        ((0.1, 0.7, 0.2), Label::Neutral),
        ((0.1, 0.2, 0.7), Label::Up),
        ((0.7, 0.2, 0.1), Label::Down),
        ((0.5, 0.5, 0.0), Label::Neutral),
        ((0.0, 0.5, 0.5), Label::Neutral),
        ((0.5, 0.0, 0.5), Label::Neutral),
        ((0.4, 0.2, 0.4), Label::Neutral),
        ((third, third, third), Label::Neutral),
    ];
    for ((d, n, u), want) in table {
        let got = argmax_score(&SentimentProbs::new(d, n, u).unwrap());
        check(got == want, || format!("tie table ({d}, {n}, {u}): {got:?} != {want:?}"))?;
    }
    Ok("10000 vectors; one-hot fidelity; 8-row tie table".into())
}

// 8
fn classification_metrics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for case in 0..20 {
        let n = rng.random_range(1..=60);
        let gold: Vec<Label> = (0..n).map(|_| Label::ALL[rng.random_range(0..3)]).collect();
        let pred: Vec<Label> = (0..n).map(|_| Label::ALL[rng.random_range(0..3)]).collect();
        let got = classification_report(&pred, &gold).map_err(|e| e.to_string())?.weighted_f1;
        let as_i = |v: &[Label]| v.iter().map(|l| i64::from(l.value())).collect::<Vec<_>>();
        let want = oracle::weighted_f1(&as_i(&pred), &as_i(&gold));
        check((got - want).abs() <= 1e-9, || format!("case {case}: {got} vs {want}"))?;
        let perfect = classification_report(&gold, &gold).map_err(|e| e.to_string())?.weighted_f1;
        check(perfect == 1.0, || format!("case {case}: perfect predictions give {perfect}"))?;
    }
    Ok("20 random pairs match the oracle; perfect predictions give 1.0".into())
}

// 9
fn end_to_end_determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_inflanow");
    let config = toy_dir().join("inflanow.toml");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let steps: [&[&str]; 5] = [
        &["score"],
        &["build-index"],
        &["fit", "fed", "fed+news"],
        &["backtest", "fed", "fed+news"],
        &["evaluate"],
    ];
    let mut runs: Vec<BTreeMap<String, Vec<u8>>> = Vec::new();
    for r in 0..3 {
        let out = tmp.path().join(format!("run{r}"));
        for step in steps {
            let status = Command::new(exe)
                .args(step)
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            check(status.status.success(), || {
                format!("{step:?} failed: {}", String::from_utf8_lossy(&status.stderr))
            })?;
        }
        let mut files = BTreeMap::new();
        for entry in fs::read_dir(&out).map_err(|e| e.to_string())? {
            let entry = entry.map_err(|e| e.to_string())?;
            files.insert(
                entry.file_name().to_string_lossy().into_owned(),
                fs::read(entry.path()).map_err(|e| e.to_string())?,
            );
        }
        runs.push(files);
    }
    check(runs[0] == runs[1] && runs[1] == runs[2], || "outputs differ between reruns".into())?;
    let files = &runs[0];
    for f in [
        "probabilities.csv",
        "scored.csv",
        "news_index.csv",
        "news_index_meta.csv",
        "regression_table.txt",
        "forecasts.csv",
        "evaluation.txt",
    ] {
        check(files.contains_key(f), || format!("missing {f}"))?;
    }
    for (name, bytes) in files {
        let first = String::from_utf8_lossy(bytes).lines().next().unwrap_or("").to_string();
        check(first.starts_with("# inflanow ") && first.contains("config-sha256:"), || {
            format!("{name} lacks the provenance header")
        })?;
    }

    let table = String::from_utf8_lossy(&files["regression_table.txt"]).into_owned();
    let lines: Vec<&str> = table.lines().collect();
    for term in ["const", "pi-CCPI", "pi-FCPI", "pi-Gasoline", "pi-NEWS"] {
        let i = lines
            .iter()
            .position(|l| l.starts_with(term))
            .ok_or_else(|| format!("no {term} row"))?;
        check(lines[i + 1].trim_start().starts_with('('), || format!("{term} row lacks a standard-error line"))?;
    }
    for label in ["Observations", "R2", "Adjusted R2", "Residual Std. Error", "F Statistic"] {
        check(lines.iter().any(|l| l.starts_with(label)), || format!("no {label} row"))?;
    }
    check(table.contains("(1)") && table.contains("(2)"), || "no column numbers".into())?;
    check(table.contains("*p<0.1; **p<0.05; ***p<0.01"), || "missing star note".into())?;

    let eval = String::from_utf8_lossy(&files["evaluation.txt"]).into_owned();
    let rows: Vec<&str> = eval.lines().filter(|l| l.starts_with("FED")).collect();
    check(rows.len() == 2, || format!("expected two RMSE rows, found {}", rows.len()))?;
    let p_lines = eval
        .lines()
        .filter(|l| {
            let t = l.trim();
            t.starts_with("(0") || t.starts_with("(1")
        })
        .count();
    check(p_lines == 1, || format!("expected one GW p-value, found {p_lines}"))?;
    check(eval.contains("*p<0.1; **p<0.05; ***p<0.01"), || "evaluation lacks star note".into())?;
    Ok(format!("{} files byte-identical across 3 runs", files.len()))
}

// 10
fn no_look_ahead() -> Outcome {
    let (full_data, settings) = toy_bundle(true)?;
    let articles = toy_articles(&settings)?;
    let full_index = {
        let monthly = monthly_aggregate(&articles, settings.day_cutoff).map_err(|e| e.to_string())?;
        build_news_index(&monthly).map_err(|e| e.to_string())?.into_series()
    };
    let cfg = settings.backtest;
    let specs = [ModelSpec::FedNews, ModelSpec::News, ModelSpec::CcpiNews];
    let coefs: Vec<Vec<f64>> = specs
        .iter()
        .map(|&s| fit_model(s, &full_data, cfg.train, cfg.covariance).map(|f| f.estimates()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut cutoffs = 0;
    for t in cfg.eval.iter().step_by(5).chain([month(2016, 6), month(2019, 12)]) {
        let kept: Vec<ScoredArticle> = articles.iter().filter(|a| a.date.month <= t).cloned().collect();
        let monthly = monthly_aggregate(&kept, settings.day_cutoff).map_err(|e| e.to_string())?;
        let truncated = build_news_index(&monthly).map_err(|e| e.to_string())?.into_series();
        for (m, v) in truncated.iter() {
            let orig = full_index.get(m).ok_or("month missing from full index")?;
            check(v.to_bits() == orig.to_bits(), || format!("cutoff {t}: index at {m} changed"))?;
        }
        check(truncated.last_month() == Some(t), || format!("cutoff {t}: index ends {:?}", truncated.last_month()))?;

        let mut data = full_data.clone();
        data.news = Some(
            inflanow::index::news_pi(&truncated, settings.transform.window, settings.transform.news_mode, settings.transform.policy)
                .map_err(|e| e.to_string())?,
        );
        for (spec, b) in specs.iter().zip(&coefs) {
            for m in cfg.eval.iter().filter(|m| *m <= t) {
                let a = nowcast_from_coefficients(*spec, b, &full_data, m, cfg.lags).map_err(|e| e.to_string())?;
                let z = nowcast_from_coefficients(*spec, b, &data, m, cfg.lags).map_err(|e| e.to_string())?;
                check(a.to_bits() == z.to_bits(), || format!("cutoff {t}: {spec} nowcast for {m} changed"))?;
            }
        }
        if t >= cfg.eval.start {
            let rolling = BacktestConfig {
                eval: MonthRange::new(cfg.eval.start, t).unwrap(),
                scheme: Scheme::Rolling,
                ..cfg
            };
            let a = backtest(ModelSpec::FedNews, &full_data, &rolling).map_err(|e| e.to_string())?;
            let z = backtest(ModelSpec::FedNews, &data, &rolling).map_err(|e| e.to_string())?;
            check(a == z, || format!("cutoff {t}: rolling backtest changed"))?;
        }
        cutoffs += 1;
    }
    Ok(format!("{cutoffs} cutoffs; index, fixed and rolling nowcasts bit-identical"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("OLS oracle equivalence", ols_oracle_equivalence, Some(Duration::from_secs(5))),
        ("coefficient recovery", coefficient_recovery, Some(Duration::from_secs(60))),
        ("nesting property", nesting_property, None),
        ("GW test size", gw_size, Some(Duration::from_secs(120))),
        ("index algebra", index_algebra, None),
        ("transform identities", transform_identities, None),
        ("score-function properties", score_functions, None),
        ("classification metrics", classification_metrics, None),
        ("end-to-end determinism", end_to_end_determinism, Some(Duration::from_secs(30))),
        ("no-look-ahead audit", no_look_ahead, None),
    ];
    let mut failures = Vec::new();
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let outcome = f();
        let elapsed = t0.elapsed();
        let outcome = match (outcome, budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.2?}, budget {b:?}")),
            (o, _) => o,
        };
        match &outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                println!("FAIL [{:>2}] {name}: {why} ({elapsed:.2?})", i + 1);
                failures.push(name);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
