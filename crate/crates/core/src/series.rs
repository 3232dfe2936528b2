//! Calendar-aligned monthly series.
//!
//! A [`MonthlySeries`] is a sparse ordered map from [`MonthKey`] to `f64`.
//! Gaps are allowed; each transform states what it needs and reports the
//! months it could not serve instead of silently dropping them.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

/// A calendar month. Ordering is chronological.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonthKey {
    year: i32,
    month: u32,
}

impl MonthKey {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidMonth { year, month });
        }
        Ok(Self { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u32 {
        self.month
    }

    /// Months since year 0, January. Used for offset arithmetic.
    fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    fn from_ordinal(ordinal: i64) -> Self {
        let year = ordinal.div_euclid(12);
        let month = ordinal.rem_euclid(12) as u32 + 1;
        Self {
            year: year as i32,
            month,
        }
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn pred(self) -> Self {
        self.offset(-1)
    }

    pub fn offset(self, months: i64) -> Self {
        Self::from_ordinal(self.ordinal() + months)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(self, other: MonthKey) -> i64 {
        other.ordinal() - self.ordinal()
    }

    /// Number of days in this month (Gregorian).
    pub fn days(self) -> u32 {
        match self.month {
            4 | 6 | 9 | 11 => 30,
            2 => {
                let y = self.year;
                if (y % 4 == 0 && y % 100 != 0) || y % 400 == 0 {
                    29
                } else {
                    28
                }
            }
            _ => 31,
        }
    }
}

impl fmt::Display for MonthKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for MonthKey {
    type Err = String;

    /// Parses `YYYY-MM`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (y, m) = s
            .trim()
            .split_once('-')
            .ok_or_else(|| format!("expected YYYY-MM, got `{s}`"))?;
        if y.len() != 4 || m.len() != 2 {
            return Err(format!("expected YYYY-MM, got `{s}`"));
        }
        let year: i32 = y.parse().map_err(|_| format!("bad year in `{s}`"))?;
        let month: u32 = m.parse().map_err(|_| format!("bad month in `{s}`"))?;
        MonthKey::new(year, month).map_err(|e| e.to_string())
    }
}

/// Inclusive range of months.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonthRange {
    pub start: MonthKey,
    pub end: MonthKey,
}

impl MonthRange {
    pub fn new(start: MonthKey, end: MonthKey) -> Result<Self> {
        if end < start {
            return Err(Error::Config(format!(
                "month range ends ({end}) before it starts ({start})"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn len(&self) -> usize {
        (self.start.months_until(self.end) + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, m: MonthKey) -> bool {
        self.start <= m && m <= self.end
    }

    pub fn iter(&self) -> impl Iterator<Item = MonthKey> + '_ {
        let start = self.start;
        (0..self.len() as i64).map(move |i| start.offset(i))
    }
}

impl fmt::Display for MonthRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    IndexLevel,
    Percent,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::IndexLevel => "index-level",
            Unit::Percent => "percent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    name: String,
    unit: Unit,
    points: BTreeMap<MonthKey, f64>,
}

impl MonthlySeries {
    pub fn new(name: impl Into<String>, unit: Unit) -> Self {
        Self {
            name: name.into(),
            unit,
            points: BTreeMap::new(),
        }
    }

    /// Builds a series from `(month, value)` pairs; duplicate months are rejected.
    pub fn from_points(
        name: impl Into<String>,
        unit: Unit,
        points: impl IntoIterator<Item = (MonthKey, f64)>,
    ) -> Result<Self> {
        let mut series = Self::new(name, unit);
        for (m, v) in points {
            if series.points.insert(m, v).is_some() {
                return Err(Error::Config(format!(
                    "series `{}`: duplicate month {m}",
                    series.name
                )));
            }
        }
        Ok(series)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn get(&self, m: MonthKey) -> Option<f64> {
        self.points.get(&m).copied()
    }

    pub fn insert(&mut self, m: MonthKey, value: f64) -> Option<f64> {
        self.points.insert(m, value)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first_month(&self) -> Option<MonthKey> {
        self.points.keys().next().copied()
    }

    pub fn last_month(&self) -> Option<MonthKey> {
        self.points.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MonthKey, f64)> + '_ {
        self.points.iter().map(|(m, v)| (*m, *v))
    }

    pub fn months(&self) -> impl Iterator<Item = MonthKey> + '_ {
        self.points.keys().copied()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.values().copied()
    }

    /// Months in `range` with no value.
    pub fn missing_in(&self, range: MonthRange) -> Vec<MonthKey> {
        range.iter().filter(|m| !self.points.contains_key(m)).collect()
    }

    /// Copy restricted to months `<= last`.
    pub fn truncated(&self, last: MonthKey) -> Self {
        Self {
            name: self.name.clone(),
            unit: self.unit,
            points: self.points.range(..=last).map(|(m, v)| (*m, *v)).collect(),
        }
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            name: self.name.clone(),
            unit: self.unit,
            points: self.points.iter().map(|(m, v)| (*m, f(*v))).collect(),
        }
    }

    /// Reads the `date,value` format. Lines starting with `#` are comments.
    pub fn read_csv<R: Read>(
        reader: R,
        source_name: &str,
        name: impl Into<String>,
        unit: Unit,
    ) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "date" || &headers[1] != "value" {
            let line = rdr.position().line().max(1);
            return Err(Error::parse(
                source_name,
                line,
                format!("expected header `date,value`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            ));
        }
        let mut series = Self::new(name, unit);
        let mut last: Option<MonthKey> = None;
        for record in rdr.records() {
            let record = record.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                Error::parse(source_name, line, e.to_string())
            })?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != 2 {
                return Err(Error::parse(source_name, line, "expected 2 fields"));
            }
            let month: MonthKey = record[0]
                .parse()
                .map_err(|e: String| Error::parse(source_name, line, e))?;
            let value: f64 = record[1].parse().map_err(|_| {
                Error::parse(source_name, line, format!("bad value `{}`", &record[1]))
            })?;
            if !value.is_finite() {
                return Err(Error::parse(source_name, line, "value is not finite"));
            }
            if let Some(prev) = last {
                if month == prev {
                    return Err(Error::parse(source_name, line, format!("duplicate month {month}")));
                }
                if month < prev {
                    return Err(Error::parse(
                        source_name,
                        line,
                        format!("month {month} is not after {prev}"),
                    ));
                }
            }
            last = Some(month);
            series.points.insert(month, value);
        }
        Ok(series)
    }

    /// Writes the `date,value` format with full round-trip precision.
    pub fn write_csv<W: Write>(&self, mut out: W, provenance: Option<&str>) -> Result<()> {
        if let Some(p) = provenance {
            writeln!(out, "# {p}")?;
        }
        writeln!(out, "date,value")?;
        for (m, v) in self.iter() {
            writeln!(out, "{m},{v}")?;
        }
        Ok(())
    }
}
