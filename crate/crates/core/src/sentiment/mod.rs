//! Article filtering, sentiment scores and classification metrics.

mod baseline;
mod lexicon;
mod metrics;

use std::fmt;
use std::str::FromStr;

pub use baseline::BaselineClassifier;
pub use lexicon::Lexicon;
pub use metrics::{classification_report, ClassMetrics, ClassificationReport};

use crate::error::{Error, Result};
use crate::series::MonthKey;

/// Tolerance on the probability sum.
pub const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// Three-way label scheme: inflation expected to go down, no view, up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Down,
    Neutral,
    Up,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Down, Label::Neutral, Label::Up];

    pub fn value(self) -> i8 {
        match self {
            Label::Down => -1,
            Label::Neutral => 0,
            Label::Up => 1,
        }
    }

    pub fn from_value(v: i8) -> Option<Self> {
        match v {
            -1 => Some(Label::Down),
            0 => Some(Label::Neutral),
            1 => Some(Label::Up),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Label::Down => 0,
            Label::Neutral => 1,
            Label::Up => 2,
        }
    }
}

/// How integer labels are written in a labeled file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelEncoding {
    /// `-1, 0, 1`
    #[default]
    Signed,
    /// `0` negative, `1` neutral, `2` positive.
    ZeroBased,
}

impl LabelEncoding {
    pub fn decode(self, raw: i64) -> Option<Label> {
        match (self, raw) {
            (LabelEncoding::Signed, -1) | (LabelEncoding::ZeroBased, 0) => Some(Label::Down),
            (LabelEncoding::Signed, 0) | (LabelEncoding::ZeroBased, 1) => Some(Label::Neutral),
            (LabelEncoding::Signed, 1) | (LabelEncoding::ZeroBased, 2) => Some(Label::Up),
            _ => None,
        }
    }
}

impl FromStr for LabelEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "signed" => Ok(LabelEncoding::Signed),
            "zero-based" => Ok(LabelEncoding::ZeroBased),
            other => Err(Error::Config(format!(
                "unknown label encoding `{other}` (expected signed or zero-based)"
            ))),
        }
    }
}

/// Probabilities for labels -1, 0 and +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentProbs {
    p_down: f64,
    p_neutral: f64,
    p_up: f64,
}

impl SentimentProbs {
    pub fn new(p_down: f64, p_neutral: f64, p_up: f64) -> Result<Self> {
        for (name, p) in [("p_down", p_down), ("p_neutral", p_neutral), ("p_up", p_up)] {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbabilities(format!("{name} = {p} not in [0, 1]")));
            }
        }
        let sum = p_down + p_neutral + p_up;
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::InvalidProbabilities(format!("probabilities sum to {sum}")));
        }
        Ok(Self {
            p_down,
            p_neutral,
            p_up,
        })
    }

    pub fn one_hot(label: Label) -> Self {
        let mut p = [0.0; 3];
        p[label.index()] = 1.0;
        Self {
            p_down: p[0],
            p_neutral: p[1],
            p_up: p[2],
        }
    }

    pub fn p_down(&self) -> f64 {
        self.p_down
    }

    pub fn p_neutral(&self) -> f64 {
        self.p_neutral
    }

    pub fn p_up(&self) -> f64 {
        self.p_up
    }

    pub fn get(&self, label: Label) -> f64 {
        match label {
            Label::Down => self.p_down,
            Label::Neutral => self.p_neutral,
            Label::Up => self.p_up,
        }
    }
}

/// Expected label under the probability vector: `p_up - p_down`.
pub fn polarity_score(probs: &SentimentProbs) -> f64 {
    probs.p_up - probs.p_down
}

/// Most probable label.
///
/// Ties that involve neutral resolve to neutral, and a tie between the two
/// directional labels also resolves to neutral.
pub fn argmax_score(probs: &SentimentProbs) -> Label {
    let max = probs.p_down.max(probs.p_neutral).max(probs.p_up);
    if probs.p_neutral == max || probs.p_up == probs.p_down {
        Label::Neutral
    } else if probs.p_up == max {
        Label::Up
    } else {
        Label::Down
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreFunction {
    Argmax,
    #[default]
    Polarity,
}

impl ScoreFunction {
    pub fn score(self, probs: &SentimentProbs) -> f64 {
        match self {
            ScoreFunction::Argmax => f64::from(argmax_score(probs).value()),
            ScoreFunction::Polarity => polarity_score(probs),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScoreFunction::Argmax => "argmax",
            ScoreFunction::Polarity => "polarity",
        }
    }
}

impl FromStr for ScoreFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "argmax" => Ok(ScoreFunction::Argmax),
            "polarity" => Ok(ScoreFunction::Polarity),
            other => Err(Error::Config(format!(
                "unknown score function `{other}` (expected argmax or polarity)"
            ))),
        }
    }
}

/// Publication date of an article. The day is optional so month-only
/// sources can still be aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArticleDate {
    pub month: MonthKey,
    pub day: Option<u32>,
}

impl ArticleDate {
    pub fn new(month: MonthKey, day: Option<u32>) -> Result<Self> {
        if let Some(d) = day {
            if d == 0 || d > month.days() {
                return Err(Error::Config(format!("day {d} is not valid in {month}")));
            }
        }
        Ok(Self { month, day })
    }
}

impl fmt::Display for ArticleDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.day {
            Some(d) => write!(f, "{}-{d:02}", self.month),
            None => write!(f, "{}", self.month),
        }
    }
}

impl FromStr for ArticleDate {
    type Err = String;

    /// Parses `YYYY-MM-DD` (or `YYYY-MM` when no day is known).
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.len() == 7 {
            return Ok(ArticleDate {
                month: s.parse()?,
                day: None,
            });
        }
        if s.len() != 10 || s.as_bytes()[7] != b'-' {
            return Err(format!("expected YYYY-MM-DD, got `{s}`"));
        }
        let month: MonthKey = s[..7].parse()?;
        let day: u32 = s[8..].parse().map_err(|_| format!("bad day in `{s}`"))?;
        ArticleDate::new(month, Some(day)).map_err(|e| e.to_string())
    }
}

/// A raw article awaiting filtering and classification.
#[derive(Debug, Clone, PartialEq)]
pub struct NewsText {
    pub id: String,
    pub date: ArticleDate,
    pub text: String,
}

/// Probabilities supplied by an external classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityRecord {
    pub id: String,
    pub date: ArticleDate,
    pub probs: SentimentProbs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredArticle {
    pub id: String,
    pub date: ArticleDate,
    pub text: Option<String>,
    pub probs: SentimentProbs,
    pub score: f64,
}

impl ScoredArticle {
    pub fn new(
        id: impl Into<String>,
        date: ArticleDate,
        text: Option<String>,
        probs: SentimentProbs,
        score_fn: ScoreFunction,
    ) -> Self {
        Self {
            id: id.into(),
            date,
            text,
            probs,
            score: score_fn.score(&probs),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledArticle {
    pub id: String,
    pub date: ArticleDate,
    pub text: Option<String>,
    pub gold: Label,
}

/// Filters raw texts through the lexicon, classifies what survives with the
/// baseline classifier and scores everything, probability records included.
/// Output is sorted by `(date, id)`.
pub fn score_articles(
    texts: &[NewsText],
    records: &[ProbabilityRecord],
    lexicon: &Lexicon,
    classifier: &BaselineClassifier,
    score_fn: ScoreFunction,
) -> Vec<ScoredArticle> {
    let mut out: Vec<ScoredArticle> = texts
        .iter()
        .filter(|a| lexicon.matches(&a.text))
        .map(|a| {
            let probs = classifier.classify(&a.text);
            ScoredArticle::new(a.id.clone(), a.date, Some(a.text.clone()), probs, score_fn)
        })
        .chain(
            records
                .iter()
                .map(|r| ScoredArticle::new(r.id.clone(), r.date, None, r.probs, score_fn)),
        )
        .collect();
    out.sort_by(|a, b| (a.date, &a.id).cmp(&(b.date, &b.id)));
    out
}
