use crate::error::{Error, Result};

/// Phrase set used to keep only inflation-related articles.
///
/// Matching is case-insensitive substring search on whitespace-normalized
/// text, so multi-word phrases match across line breaks and repeated spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    phrases: Vec<String>,
}

impl Lexicon {
    pub const DEFAULT_PHRASES: [&'static str; 7] = [
        "Inflation",
        "Gasoline prices",
        "Food prices",
        "Deflation",
        "Consumer price index",
        "CPI",
        "Core CPI",
    ];

    pub fn new<I, S>(phrases: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut normalized = Vec::new();
        for p in phrases {
            let n = normalize(p.as_ref());
            if n.is_empty() {
                return Err(Error::Config("lexicon contains an empty phrase".into()));
            }
            if !normalized.contains(&n) {
                normalized.push(n);
            }
        }
        if normalized.is_empty() {
            return Err(Error::Config("lexicon is empty".into()));
        }
        Ok(Self { phrases: normalized })
    }

    pub fn phrases(&self) -> &[String] {
        &self.phrases
    }

    pub fn matches(&self, text: &str) -> bool {
        let text = normalize(text);
        !text.is_empty() && self.phrases.iter().any(|p| text.contains(p.as_str()))
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::new(Self::DEFAULT_PHRASES).expect("default lexicon is valid")
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}
