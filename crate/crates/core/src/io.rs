//! Article file formats.
//!
//! | file          | header                                  |
//! |---------------|-----------------------------------------|
//! | news text     | `id,date,text`                          |
//! | probabilities | `id,date,p_down,p_neutral,p_up`         |
//! | scored        | `id,date,p_down,p_neutral,p_up,score`   |
//! | labeled       | `id,date,label`                         |
//!
//! Dates are `YYYY-MM-DD`. Lines starting with `#` are comments. The
//! lenient readers collect malformed rows with their line numbers instead of
//! failing on the first one.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::sentiment::{
    ArticleDate, LabelEncoding, LabeledArticle, NewsText, ProbabilityRecord, ScoreFunction,
    ScoredArticle, SentimentProbs,
};

/// A row that could not be parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub rows: Vec<T>,
    pub rejected: Vec<Rejection>,
}

impl<T> Parsed<T> {
    pub fn total(&self) -> usize {
        self.rows.len() + self.rejected.len()
    }

    /// Fails on the first rejected row.
    pub fn strict(self, source_name: &str) -> Result<Vec<T>> {
        match self.rejected.into_iter().next() {
            Some(r) => Err(Error::parse(source_name, r.line, r.reason)),
            None => Ok(self.rows),
        }
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(r)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, source_name: &str, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::parse(
            source_name,
            rdr.position().line().max(1),
            format!(
                "expected header `{}`, got `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

/// Parses rows with `parse`, routing failures to the rejection list.
fn parse_rows<R: Read, T>(
    reader_in: R,
    source_name: &str,
    header: &[&str],
    mut parse: impl FnMut(&csv::StringRecord) -> std::result::Result<T, String>,
) -> Result<Parsed<T>> {
    let mut rdr = reader(reader_in);
    check_header(&mut rdr, source_name, header)?;
    let mut out = Parsed {
        rows: Vec::new(),
        rejected: Vec::new(),
    };
    for record in rdr.records() {
        match record {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line());
                if rec.len() != header.len() {
                    out.rejected.push(Rejection {
                        line,
                        reason: format!("expected {} fields, found {}", header.len(), rec.len()),
                    });
                    continue;
                }
                match parse(&rec) {
                    Ok(row) => out.rows.push(row),
                    Err(reason) => out.rejected.push(Rejection { line, reason }),
                }
            }
            Err(e) => {
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(e.into());
                }
                out.rejected.push(Rejection {
                    line: e.position().map_or(0, |p| p.line()),
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}

fn id_field(rec: &csv::StringRecord) -> std::result::Result<String, String> {
    let id = rec[0].trim();
    if id.is_empty() {
        return Err("empty id".into());
    }
    Ok(id.to_string())
}

fn probs_fields(rec: &csv::StringRecord, from: usize) -> std::result::Result<SentimentProbs, String> {
    let mut p = [0.0; 3];
    for (k, slot) in p.iter_mut().enumerate() {
        let raw = rec[from + k].trim();
        *slot = raw
            .parse()
            .map_err(|_| format!("bad probability `{raw}`"))?;
    }
    SentimentProbs::new(p[0], p[1], p[2]).map_err(|e| e.to_string())
}

pub const NEWS_TEXT_HEADER: [&str; 3] = ["id", "date", "text"];
pub const PROBABILITY_HEADER: [&str; 5] = ["id", "date", "p_down", "p_neutral", "p_up"];
pub const SCORED_HEADER: [&str; 6] = ["id", "date", "p_down", "p_neutral", "p_up", "score"];
pub const LABELED_HEADER: [&str; 3] = ["id", "date", "label"];

pub fn read_news_text<R: Read>(r: R, source_name: &str) -> Result<Parsed<NewsText>> {
    parse_rows(r, source_name, &NEWS_TEXT_HEADER, |rec| {
        Ok(NewsText {
            id: id_field(rec)?,
            date: rec[1].parse()?,
            text: rec[2].to_string(),
        })
    })
}

pub fn read_probabilities<R: Read>(r: R, source_name: &str) -> Result<Parsed<ProbabilityRecord>> {
    parse_rows(r, source_name, &PROBABILITY_HEADER, |rec| {
        Ok(ProbabilityRecord {
            id: id_field(rec)?,
            date: rec[1].parse()?,
            probs: probs_fields(rec, 2)?,
        })
    })
}

/// Reads a scored-article file, checking each stored score against
/// `score_fn` applied to the stored probabilities.
pub fn read_scored<R: Read>(
    r: R,
    source_name: &str,
    score_fn: ScoreFunction,
) -> Result<Parsed<ScoredArticle>> {
    parse_rows(r, source_name, &SCORED_HEADER, |rec| {
        let date: ArticleDate = rec[1].parse()?;
        let probs = probs_fields(rec, 2)?;
        let raw = rec[5].trim();
        let score: f64 = raw.parse().map_err(|_| format!("bad score `{raw}`"))?;
        let expected = score_fn.score(&probs);
        if (score - expected).abs() > 1e-12 {
            return Err(format!(
                "score {score} does not match {} score {expected}",
                score_fn.as_str()
            ));
        }
        Ok(ScoredArticle {
            id: id_field(rec)?,
            date,
            text: None,
            probs,
            score,
        })
    })
}

pub fn read_labeled<R: Read>(
    r: R,
    source_name: &str,
    encoding: LabelEncoding,
) -> Result<Parsed<LabeledArticle>> {
    parse_rows(r, source_name, &LABELED_HEADER, |rec| {
        let raw = rec[2].trim();
        let value: i64 = raw.parse().map_err(|_| format!("bad label `{raw}`"))?;
        let gold = encoding
            .decode(value)
            .ok_or_else(|| format!("label {value} not valid for {encoding:?} encoding"))?;
        Ok(LabeledArticle {
            id: id_field(rec)?,
            date: rec[1].parse()?,
            text: None,
            gold,
        })
    })
}

fn writer<W: Write>(mut out: W, provenance: Option<&str>) -> Result<csv::Writer<W>> {
    if let Some(p) = provenance {
        writeln!(out, "# {p}")?;
    }
    Ok(csv::WriterBuilder::new().from_writer(out))
}

pub fn write_news_text<W: Write>(rows: &[NewsText], out: W, provenance: Option<&str>) -> Result<()> {
    let mut w = writer(out, provenance)?;
    w.write_record(NEWS_TEXT_HEADER)?;
    for a in rows {
        w.write_record([a.id.as_str(), &a.date.to_string(), &a.text])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_probabilities<'a, W: Write>(
    rows: impl IntoIterator<Item = (&'a str, ArticleDate, SentimentProbs)>,
    out: W,
    provenance: Option<&str>,
) -> Result<()> {
    let mut w = writer(out, provenance)?;
    w.write_record(PROBABILITY_HEADER)?;
    for (id, date, p) in rows {
        w.write_record([
            id,
            &date.to_string(),
            &p.p_down().to_string(),
            &p.p_neutral().to_string(),
            &p.p_up().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_scored<W: Write>(rows: &[ScoredArticle], out: W, provenance: Option<&str>) -> Result<()> {
    let mut w = writer(out, provenance)?;
    w.write_record(SCORED_HEADER)?;
    for a in rows {
        w.write_record([
            a.id.as_str(),
            &a.date.to_string(),
            &a.probs.p_down().to_string(),
            &a.probs.p_neutral().to_string(),
            &a.probs.p_up().to_string(),
            &a.score.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_labeled<W: Write>(
    rows: &[LabeledArticle],
    encoding: LabelEncoding,
    out: W,
    provenance: Option<&str>,
) -> Result<()> {
    let mut w = writer(out, provenance)?;
    w.write_record(LABELED_HEADER)?;
    for a in rows {
        let v = match encoding {
            LabelEncoding::Signed => i64::from(a.gold.value()),
            LabelEncoding::ZeroBased => i64::from(a.gold.value()) + 1,
        };
        w.write_record([a.id.as_str(), &a.date.to_string(), &v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
