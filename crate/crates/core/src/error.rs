use std::fmt;

use thiserror::Error;

use crate::series::MonthKey;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad classification used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid month {year}-{month:02}")]
    InvalidMonth { year: i32, month: u32 },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        message: String,
    },

    #[error("series `{series}`: zero denominator at {}", MonthList(.months))]
    ZeroDenominator { series: String, months: Vec<MonthKey> },

    #[error("series `{series}`: denominator changes sign at {}", MonthList(.months))]
    SignCrossing { series: String, months: Vec<MonthKey> },

    #[error("series `{series}`: missing data for {}", MonthList(.months))]
    MissingData { series: String, months: Vec<MonthKey> },

    #[error("series `{series}` has unit {found}, expected {expected}")]
    WrongUnit {
        series: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("{what}: value {value} is outside the domain (must exceed -100%)")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid sentiment probabilities: {0}")]
    InvalidProbabilities(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("input is not in chronological order at {0}")]
    Unordered(MonthKey),

    #[error("singular design: column(s) {} are linearly dependent on the others", .columns.join(", "))]
    SingularDesign { columns: Vec<String> },

    #[error("too few observations: {observations} rows for {parameters} parameters")]
    InsufficientObservations {
        observations: usize,
        parameters: usize,
    },

    #[error("windows overlap or are out of order: training ends {train_end}, evaluation starts {eval_start}")]
    WindowOverlap {
        train_end: MonthKey,
        eval_start: MonthKey,
    },

    #[error("loss differential has zero variance but non-zero mean {mean}")]
    DegenerateDifferential { mean: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::WindowOverlap { .. } => ErrorKind::Config,
            Error::InvalidMonth { .. }
            | Error::Parse { .. }
            | Error::MissingData { .. }
            | Error::WrongUnit { .. }
            | Error::InvalidProbabilities(_)
            | Error::LengthMismatch { .. }
            | Error::Empty(_)
            | Error::Unordered(_) => ErrorKind::Data,
            Error::ZeroDenominator { .. }
            | Error::SignCrossing { .. }
            | Error::Domain { .. }
            | Error::SingularDesign { .. }
            | Error::InsufficientObservations { .. }
            | Error::DegenerateDifferential { .. } => ErrorKind::Numerical,
            Error::Io(_) => ErrorKind::Io,
        }
    }

    pub(crate) fn parse(source_name: &str, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.to_string(),
            line,
            message: message.into(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse {
                source_name: "csv".to_string(),
                line,
                message: format!("{other:?}"),
            },
        }
    }
}

struct MonthList<'a>(&'a [MonthKey]);

impl fmt::Display for MonthList<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const SHOWN: usize = 24;
        for (i, m) in self.0.iter().take(SHOWN).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        if self.0.len() > SHOWN {
            write!(f, " and {} more", self.0.len() - SHOWN)?;
        }
        Ok(())
    }
}
