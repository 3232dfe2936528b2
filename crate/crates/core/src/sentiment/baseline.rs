use super::SentimentProbs;

/// Keyword-count stand-in for a trained classifier.
///
/// With `u` up-term hits and `d` down-term hits:
///
/// ```text
/// p_neutral = 1 / (1 + neutral_decay * (u + d))
/// p_up      = (1 - p_neutral) * logistic(tilt * (u - d))
/// p_down    = (1 - p_neutral) * logistic(tilt * (d - u))
/// ```
///
/// Terms match whole lowercase alphanumeric tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineClassifier {
    pub up_terms: Vec<String>,
    pub down_terms: Vec<String>,
    pub neutral_decay: f64,
    pub tilt: f64,
}

impl BaselineClassifier {
    pub const DEFAULT_UP_TERMS: &'static [&'static str] = &[
        "rise", "rises", "rising", "rose", "surge", "surges", "surged", "surging", "soar", "soars",
        "soared", "climb", "climbs", "climbed", "jump", "jumps", "jumped", "spike", "spikes",
        "spiked", "accelerate", "accelerates", "accelerated", "accelerating", "higher", "increase",
        "increases", "increased", "hot", "hotter", "sticky", "up",
    ];
    pub const DEFAULT_DOWN_TERMS: &'static [&'static str] = &[
        "fall", "falls", "fell", "falling", "drop", "drops", "dropped", "decline", "declines",
        "declined", "ease", "eases", "eased", "easing", "cool", "cools", "cooled", "cooling",
        "slow", "slows", "slowed", "slowing", "lower", "decrease", "decreases", "decreased",
        "plunge", "plunged", "tumble", "tumbled", "down", "deflation",
    ];
    pub const DEFAULT_NEUTRAL_DECAY: f64 = 2.0;
    pub const DEFAULT_TILT: f64 = 2.0;

    pub fn hits(&self, text: &str) -> (usize, usize) {
        let mut up = 0;
        let mut down = 0;
        for token in text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
        {
            if self.up_terms.contains(&token) {
                up += 1;
            }
            if self.down_terms.contains(&token) {
                down += 1;
            }
        }
        (up, down)
    }

    pub fn classify(&self, text: &str) -> SentimentProbs {
        let (up, down) = self.hits(text);
        let evidence = (up + down) as f64;
        let p_neutral = 1.0 / (1.0 + self.neutral_decay * evidence);
        let directional = 1.0 - p_neutral;
        let lean = self.tilt * (up as f64 - down as f64);
        let p_up = directional * logistic(lean);
        let p_down = directional * logistic(-lean);
        SentimentProbs::new(p_down, p_neutral, p_up)
            .expect("baseline probabilities are valid by construction")
    }
}

impl Default for BaselineClassifier {
    fn default() -> Self {
        Self {
            up_terms: Self::DEFAULT_UP_TERMS.iter().map(|s| s.to_string()).collect(),
            down_terms: Self::DEFAULT_DOWN_TERMS.iter().map(|s| s.to_string()).collect(),
            neutral_decay: Self::DEFAULT_NEUTRAL_DECAY,
            tilt: Self::DEFAULT_TILT,
        }
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}
