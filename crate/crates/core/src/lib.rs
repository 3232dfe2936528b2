//! Inflation nowcasting from monthly price indices and a news-sentiment index.
//!
//! The pipeline runs: article probabilities ([`sentiment`]) → monthly
//! sentiment index ([`index`]) → percent changes ([`transform`]) →
//! regression nowcasts ([`nowcast`], [`ols`]) → forecast comparison
//! ([`evaluation`]) → tables ([`report`]).

pub mod error;
pub mod evaluation;
pub mod index;
pub mod io;
pub mod nowcast;
pub mod ols;
pub mod report;
pub mod sentiment;
pub mod series;
pub mod transform;

pub use error::{Error, ErrorKind, Result};
pub use series::{MonthKey, MonthRange, MonthlySeries, Unit};
