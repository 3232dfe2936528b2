//! Monthly sentiment means and the cumulative NEWS index.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sentiment::ScoredArticle;
use crate::series::{MonthKey, MonthlySeries, Unit};
use crate::transform::{pct_change, DenominatorPolicy};

pub const NEWS: &str = "NEWS";

/// Day-of-month cutoff used when nowcasting around the 15th.
pub const DEFAULT_DAY_CUTOFF: u32 = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthlySentiment {
    pub month: MonthKey,
    pub mean_score: f64,
    pub article_count: usize,
}

/// Sample mean of article scores per month, in chronological order.
///
/// With `day_cutoff = Some(d)`, articles published after day `d` of their
/// month are ignored; articles without a day are always kept. Scores are
/// summed in sorted order so the result does not depend on input order.
pub fn monthly_aggregate(
    articles: &[ScoredArticle],
    day_cutoff: Option<u32>,
) -> Result<Vec<MonthlySentiment>> {
    if articles.is_empty() {
        return Err(Error::Empty("scored articles"));
    }
    let mut by_month: BTreeMap<MonthKey, Vec<f64>> = BTreeMap::new();
    for a in articles {
        if let (Some(cutoff), Some(day)) = (day_cutoff, a.date.day) {
            if day > cutoff {
                continue;
            }
        }
        by_month.entry(a.date.month).or_default().push(a.score);
    }
    if by_month.is_empty() {
        return Err(Error::Empty("articles within the day cutoff"));
    }
    Ok(by_month
        .into_iter()
        .map(|(month, mut scores)| {
            scores.sort_by(f64::total_cmp);
            let sum: f64 = scores.iter().sum();
            MonthlySentiment {
                month,
                mean_score: sum / scores.len() as f64,
                article_count: scores.len(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewsIndex {
    series: MonthlySeries,
    means: BTreeMap<MonthKey, f64>,
    counts: BTreeMap<MonthKey, usize>,
    gaps: Vec<MonthKey>,
}

impl NewsIndex {
    pub fn series(&self) -> &MonthlySeries {
        &self.series
    }

    pub fn into_series(self) -> MonthlySeries {
        self.series
    }

    /// Months inside the span that had no articles; the level is carried over.
    pub fn gaps(&self) -> &[MonthKey] {
        &self.gaps
    }

    pub fn article_count(&self, m: MonthKey) -> usize {
        self.counts.get(&m).copied().unwrap_or(0)
    }

    pub fn mean_score(&self, m: MonthKey) -> Option<f64> {
        self.means.get(&m).copied()
    }

    /// `date,article_count,mean_score,gap` sidecar.
    pub fn write_metadata<W: Write>(&self, mut out: W, provenance: Option<&str>) -> Result<()> {
        if let Some(p) = provenance {
            writeln!(out, "# {p}")?;
        }
        writeln!(out, "date,article_count,mean_score,gap")?;
        for m in self.series.months() {
            let gap = self.gaps.binary_search(&m).is_ok();
            let mean = self.means.get(&m).copied().unwrap_or(0.0);
            writeln!(out, "{m},{},{mean},{}", self.article_count(m), u8::from(gap))?;
        }
        Ok(())
    }
}

/// Running sum of monthly means, starting at the first month with no offset.
pub fn build_news_index(monthly: &[MonthlySentiment]) -> Result<NewsIndex> {
    let Some(first) = monthly.first() else {
        return Err(Error::Empty("monthly sentiment"));
    };
    for pair in monthly.windows(2) {
        if pair[1].month <= pair[0].month {
            return Err(Error::Unordered(pair[1].month));
        }
    }
    let last = monthly[monthly.len() - 1].month;
    let observed: BTreeMap<MonthKey, &MonthlySentiment> =
        monthly.iter().map(|m| (m.month, m)).collect();

    let mut series = MonthlySeries::new(NEWS, Unit::IndexLevel);
    let mut gaps = Vec::new();
    let mut level = 0.0;
    let mut month = first.month;
    while month <= last {
        match observed.get(&month) {
            Some(m) => level += m.mean_score,
            None => gaps.push(month),
        }
        series.insert(month, level);
        month = month.succ();
    }
    Ok(NewsIndex {
        series,
        means: monthly.iter().map(|m| (m.month, m.mean_score)).collect(),
        counts: monthly.iter().map(|m| (m.month, m.article_count)).collect(),
        gaps,
    })
}

/// How the NEWS regressor is derived from the index level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NewsPiMode {
    /// Same percent change as the price indices. Months whose base level is
    /// zero, or whose base and current levels have opposite signs, are
    /// reported (or skipped, per the denominator policy).
    #[default]
    Ratio,
    /// `P_t - P_{t-window}`: the sum of the last `window` monthly means.
    /// Well defined whatever the sign of the index.
    LevelDifference,
}

impl FromStr for NewsPiMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio" => Ok(NewsPiMode::Ratio),
            "level-difference" => Ok(NewsPiMode::LevelDifference),
            other => Err(Error::Config(format!(
                "unknown news-pi mode `{other}` (expected ratio or level-difference)"
            ))),
        }
    }
}

/// The NEWS regressor series.
pub fn news_pi(
    index: &MonthlySeries,
    window: usize,
    mode: NewsPiMode,
    policy: DenominatorPolicy,
) -> Result<MonthlySeries> {
    if window == 0 {
        return Err(Error::Config("news window must be positive".into()));
    }
    match mode {
        NewsPiMode::Ratio => {
            let crossings: Vec<MonthKey> = index
                .iter()
                .filter(|(t, level)| {
                    index
                        .get(t.offset(-(window as i64)))
                        .is_some_and(|base| base * level < 0.0)
                })
                .map(|(t, _)| t)
                .collect();
            let mut out = pct_change(index, window, policy)?;
            if !crossings.is_empty() {
                if policy == DenominatorPolicy::Error {
                    return Err(Error::SignCrossing {
                        series: index.name().to_string(),
                        months: crossings,
                    });
                }
                out = MonthlySeries::from_points(
                    out.name().to_string(),
                    Unit::Percent,
                    out.iter().filter(|(t, _)| !crossings.contains(t)),
                )?;
            }
            Ok(out)
        }
        NewsPiMode::LevelDifference => {
            let points = index.iter().filter_map(|(t, level)| {
                index
                    .get(t.offset(-(window as i64)))
                    .map(|base| (t, level - base))
            });
            MonthlySeries::from_points(index.name().to_string(), Unit::Percent, points)
        }
    }
}
