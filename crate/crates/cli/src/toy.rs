//! Synthetic data set shipped under `data/toy`.
//!
//! Component price indices follow log-growth AR(1) processes with a
//! 2021-2022 surge and a spring-2020 gasoline collapse. Headline CPI is built
//! so that its 12-month change satisfies
//! `pi_CPI = 0.021 + 0.616 pi_CCPI + 0.186 pi_FCPI + 0.035 pi_Gas + e`,
//! `e ~ N(0, 0.064^2)`. Article probabilities lean positive so the
//! cumulative sentiment index stays above zero.

use std::fs;
use std::path::Path;

use inflanow::io::{write_labeled, write_news_text, write_probabilities};
use inflanow::sentiment::{ArticleDate, Label, LabelEncoding, LabeledArticle, NewsText, SentimentProbs};
use inflanow::{MonthKey, MonthRange, MonthlySeries, Unit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 20_240_417;

/// Coefficients and residual scale used to build headline CPI.
pub const CPI_COEFFICIENTS: [f64; 4] = [0.021, 0.616, 0.186, 0.035];
pub const CPI_RESIDUAL_SD: f64 = 0.064;

const FIRST: (i32, u32) = (2012, 1);
const LAST: (i32, u32) = (2023, 12);
const NEWS_START: (i32, u32) = (2013, 1);

pub struct ToyData {
    pub cpi: MonthlySeries,
    pub core_cpi: MonthlySeries,
    pub food_cpi: MonthlySeries,
    pub gasoline: MonthlySeries,
    pub probabilities: Vec<(String, ArticleDate, SentimentProbs)>,
    pub texts: Vec<NewsText>,
    pub labels: Vec<LabeledArticle>,
}

fn key((y, m): (i32, u32)) -> MonthKey {
    MonthKey::new(y, m).expect("valid constant month")
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// `(from, to, extra monthly log growth)`
type Shock = ((i32, u32), (i32, u32), f64);

struct Component {
    drift: f64,
    phi: f64,
    sd: f64,
    shocks: &'static [Shock],
}

const CORE: Component = Component {
    drift: 0.0018,
    phi: 0.8,
    sd: 0.0007,
    shocks: &[((2021, 4), (2022, 9), 0.0032)],
};
const FOOD: Component = Component {
    drift: 0.0020,
    phi: 0.7,
    sd: 0.0018,
    shocks: &[((2021, 6), (2023, 2), 0.0045)],
};
const GAS: Component = Component {
    drift: 0.0010,
    phi: 0.4,
    sd: 0.035,
    shocks: &[
        ((2020, 3), (2020, 4), -0.16),
        ((2020, 6), (2020, 8), 0.05),
        ((2021, 2), (2022, 6), 0.022),
        ((2022, 7), (2022, 12), -0.04),
    ],
};

fn component(rng: &mut ChaCha8Rng, c: &Component, span: MonthRange, name: &str) -> MonthlySeries {
    let noise = Normal::new(0.0, c.sd).expect("positive sd");
    let mut dev = 0.0;
    let mut log_level = 100f64.ln();
    let mut out = MonthlySeries::new(name, Unit::IndexLevel);
    for (i, m) in span.iter().enumerate() {
        if i > 0 {
            dev = c.phi * dev + noise.sample(rng);
            let shock: f64 = c
                .shocks
                .iter()
                .filter(|(a, b, _)| key(*a) <= m && m <= key(*b))
                .map(|s| s.2)
                .sum();
            log_level += c.drift + dev + shock;
        }
        out.insert(m, round3(log_level.exp()));
    }
    out
}

fn pi(s: &MonthlySeries, t: MonthKey) -> f64 {
    100.0 * (s.get(t).unwrap() / s.get(t.offset(-12)).unwrap() - 1.0)
}

/// Draws one probability vector on a 1e-4 grid summing exactly to 10 000 units.
fn article_probs(rng: &mut ChaCha8Rng, lean: f64) -> SentimentProbs {
    let g = |shape: f64, rng: &mut ChaCha8Rng| Gamma::new(shape, 1.0).expect("positive shape").sample(rng);
    let up = g(1.0 + 2.0 * lean, rng);
    let neutral = g(1.2, rng);
    let down = g(0.7, rng);
    let total = up + neutral + down;
    // cumulative rounding keeps every share non-negative
    let d = ((down / total) * 10_000.0).round() as i64;
    let dn = (((down + neutral) / total) * 10_000.0).round() as i64;
    let (n, u) = (dn - d, 10_000 - dn);
    SentimentProbs::new(d as f64 / 1e4, n as f64 / 1e4, u as f64 / 1e4).expect("grid probabilities")
}

const TEXTS: [(&str, &str, &str, i8); 20] = [
    ("t01", "2023-01-04", "Inflation eased again in December as gasoline prices fell", -1),
    ("t02", "2023-01-09", "Food prices climbed for a sixth month, pushing grocery bills higher", 1),
    ("t03", "2023-01-12", "Core CPI rose more than expected, keeping pressure on the central bank", 1),
    ("t04", "2023-01-20", "Quarterly earnings beat estimates at the regional lender", 0),
    ("t05", "2023-02-03", "Consumer price index steady as energy costs offset shelter gains", 0),
    ("t06", "2023-02-08", "Gasoline prices jumped after the refinery outage", 1),
    ("t07", "2023-02-14", "Analysts say inflation is cooling faster than forecast", -1),
    ("t08", "2023-02-23", "The city council approved the new stadium budget", 0),
    ("t09", "2023-03-02", "Deflation fears resurface in the goods sector as prices drop", -1),
    ("t10", "2023-03-10", "CPI report due next week; economists expect little change", 0),
    ("t11", "2023-03-15", "Food prices declined for the first time in two years", -1),
    ("t12", "2023-03-28", "Tech shares rallied on strong cloud revenue", 0),
    ("t13", "2023-04-05", "Sticky core CPI suggests inflation will stay higher for longer", 1),
    ("t14", "2023-04-11", "Gasoline prices dropped as crude supplies recovered", -1),
    ("t15", "2023-04-19", "Retail sales slowed in March amid tighter credit", 0),
    ("t16", "2023-05-02", "Inflation surged in services while goods prices eased", 1),
    ("t17", "2023-05-16", "The consumer price index rose 0.4 percent in April", 1),
    ("t18", "2023-05-24", "Weather delays hit the harvest in the northern plains", 0),
    ("t19", "2023-06-07", "Economists see inflation falling below four percent by summer", -1),
    ("t20", "2023-06-13", "Food prices and gasoline prices were little changed", 0),
];

pub fn generate(seed: u64) -> ToyData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = MonthRange::new(key(FIRST), key(LAST)).expect("ordered span");
    let core_cpi = component(&mut rng, &CORE, span, "Core CPI");
    let food_cpi = component(&mut rng, &FOOD, span, "Food CPI");
    let gasoline = component(&mut rng, &GAS, span, "Gasoline");

    let mut cpi = MonthlySeries::new("CPI", Unit::IndexLevel);
    let resid = Normal::new(0.0, CPI_RESIDUAL_SD).expect("positive sd");
    let mut level = 100f64;
    for m in span.iter() {
        if m < key(FIRST).offset(12) {
            if m > key(FIRST) {
                level *= 1.0015;
            }
            cpi.insert(m, round3(level));
            continue;
        }
        let [b0, b1, b2, b3] = CPI_COEFFICIENTS;
        let target = b0
            + b1 * pi(&core_cpi, m)
            + b2 * pi(&food_cpi, m)
            + b3 * pi(&gasoline, m)
            + resid.sample(&mut rng);
        let base = cpi.get(m.offset(-12)).expect("earlier month filled");
        cpi.insert(m, round3(base * (1.0 + target / 100.0)));
    }

    let mut probabilities = Vec::new();
    let news_span = MonthRange::new(key(NEWS_START), key(LAST)).expect("ordered span");
    for m in news_span.iter() {
        let lean = (0.4 + 0.15 * (pi(&core_cpi, m) - 2.0)).clamp(0.2, 0.9);
        let count = rng.random_range(4..=8);
        let mut days: Vec<u32> = (0..count).map(|_| rng.random_range(1..=28)).collect();
        days.sort_unstable();
        for (k, day) in days.into_iter().enumerate() {
            let date = ArticleDate::new(m, Some(day)).expect("day within month");
            let id = format!("p{}{:02}-{}", m.year(), m.month(), k + 1);
            probabilities.push((id, date, article_probs(&mut rng, lean)));
        }
    }

    let texts = TEXTS
        .iter()
        .map(|(id, date, text, _)| NewsText {
            id: id.to_string(),
            date: date.parse().expect("valid constant date"),
            text: text.to_string(),
        })
        .collect();
    let labels = TEXTS
        .iter()
        .map(|(id, date, _, label)| LabeledArticle {
            id: id.to_string(),
            date: date.parse().expect("valid constant date"),
            text: None,
            gold: Label::from_value(*label).expect("valid constant label"),
        })
        .collect();

    ToyData {
        cpi,
        core_cpi,
        food_cpi,
        gasoline,
        probabilities,
        texts,
        labels,
    }
}

pub fn config_text(seed: u64) -> String {
    format!(
        "\
# Synthetic data set. Regenerate with: inflanow generate-toy data/toy --seed {seed}
cpi = \"cpi.csv\"
core_cpi = \"core_cpi.csv\"
food_cpi = \"food_cpi.csv\"
gasoline = \"gasoline.csv\"
news_text = \"news_text.csv\"
news_probabilities = \"news_probs.csv\"
labels = \"labels.csv\"
label_encoding = \"signed\"

score_function = \"polarity\"
baseline_neutral_decay = 2.0
baseline_tilt = 2.0
day_cutoff = 15
window = 12
news_pi_mode = \"ratio\"

train_start = \"2015-01\"
train_end = \"2019-12\"
eval_start = \"2020-01\"
eval_end = \"2023-12\"
scheme = \"fixed\"
imputation_lags = 12
covariance = \"classical\"

gw_variant = \"unconditional\"
hac_lag = 0
eval_target = \"annualized\"
rmse_unit = \"fraction\"

out_dir = \"out\"
seed = {seed}
"
    )
}

/// Every file of the toy data set as `(file name, contents)`.
pub fn render(seed: u64) -> Result<Vec<(&'static str, Vec<u8>)>, CliError> {
    let data = generate(seed);
    let prov = format!("synthetic toy data, seed {seed}");
    let mut files = Vec::new();
    for (name, s) in [
        ("cpi.csv", &data.cpi),
        ("core_cpi.csv", &data.core_cpi),
        ("food_cpi.csv", &data.food_cpi),
        ("gasoline.csv", &data.gasoline),
    ] {
        let mut buf = Vec::new();
        s.write_csv(&mut buf, Some(&prov))?;
        files.push((name, buf));
    }
    let mut buf = Vec::new();
    write_probabilities(
        data.probabilities.iter().map(|(id, d, p)| (id.as_str(), *d, *p)),
        &mut buf,
        Some(&prov),
    )?;
    files.push(("news_probs.csv", buf));
    let mut buf = Vec::new();
    write_news_text(&data.texts, &mut buf, Some(&prov))?;
    files.push(("news_text.csv", buf));
    let mut buf = Vec::new();
    write_labeled(&data.labels, LabelEncoding::Signed, &mut buf, Some(&prov))?;
    files.push(("labels.csv", buf));
    files.push(("inflanow.toml", config_text(seed).into_bytes()));
    Ok(files)
}

pub fn write_toy(dir: &Path, seed: u64) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    for (name, bytes) in render(seed)? {
        let path = dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io { path, source })?;
    }
    println!("wrote toy data set (seed {seed}) to {}", dir.display());
    Ok(())
}
