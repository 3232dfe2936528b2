//! Run configuration: one TOML file of flat keys plus `--set key=value`
//! overrides. Relative paths resolve against the config file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use inflanow::evaluation::{EvalTarget, EvaluationOptions, GwVariant, RmseUnit};
use inflanow::index::NewsPiMode;
use inflanow::nowcast::{BacktestConfig, Scheme, TransformOptions};
use inflanow::ols::Covariance;
use inflanow::sentiment::{BaselineClassifier, LabelEncoding, Lexicon, ScoreFunction};
use inflanow::transform::DenominatorPolicy;
use inflanow::{MonthKey, MonthRange};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

fn default_lexicon() -> Vec<String> {
    Lexicon::DEFAULT_PHRASES.iter().map(|s| s.to_string()).collect()
}
fn default_up_terms() -> Vec<String> {
    BaselineClassifier::DEFAULT_UP_TERMS.iter().map(|s| s.to_string()).collect()
}
fn default_down_terms() -> Vec<String> {
    BaselineClassifier::DEFAULT_DOWN_TERMS.iter().map(|s| s.to_string()).collect()
}

/// Raw file contents. Every field except the four price files has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub cpi: String,
    pub core_cpi: String,
    pub food_cpi: String,
    pub gasoline: String,
    pub news_text: Option<String>,
    pub news_probabilities: Option<String>,
    pub labels: Option<String>,
    pub label_encoding: String,

    pub lexicon: Vec<String>,
    pub score_function: String,
    pub baseline_up_terms: Vec<String>,
    pub baseline_down_terms: Vec<String>,
    pub baseline_neutral_decay: f64,
    pub baseline_tilt: f64,
    /// Articles after this day of the month are left out; 31 keeps all.
    pub day_cutoff: u32,
    pub max_rejected_fraction: f64,

    pub window: usize,
    pub news_pi_mode: String,
    pub denominator_policy: String,
    pub covariance: String,

    pub train_start: String,
    pub train_end: String,
    pub eval_start: String,
    pub eval_end: String,
    pub scheme: String,
    pub imputation_lags: usize,

    pub gw_variant: String,
    pub hac_lag: usize,
    pub eval_target: String,
    pub rmse_unit: String,

    pub out_dir: String,
    /// Only used by the toy-data generator.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cpi: String::new(),
            core_cpi: String::new(),
            food_cpi: String::new(),
            gasoline: String::new(),
            news_text: None,
            news_probabilities: None,
            labels: None,
            label_encoding: "signed".into(),
            lexicon: default_lexicon(),
            score_function: "polarity".into(),
            baseline_up_terms: default_up_terms(),
            baseline_down_terms: default_down_terms(),
            baseline_neutral_decay: BaselineClassifier::DEFAULT_NEUTRAL_DECAY,
            baseline_tilt: BaselineClassifier::DEFAULT_TILT,
            day_cutoff: inflanow::index::DEFAULT_DAY_CUTOFF,
            max_rejected_fraction: 0.10,
            window: 12,
            news_pi_mode: "ratio".into(),
            denominator_policy: "error".into(),
            covariance: "classical".into(),
            train_start: "2015-01".into(),
            train_end: "2019-12".into(),
            eval_start: "2020-01".into(),
            eval_end: "2023-12".into(),
            scheme: "fixed".into(),
            imputation_lags: inflanow::nowcast::DEFAULT_IMPUTATION_LAGS,
            gw_variant: "unconditional".into(),
            hac_lag: 0,
            eval_target: "annualized".into(),
            rmse_unit: "fraction".into(),
            out_dir: "out".into(),
            seed: 0,
        }
    }
}

/// Validated configuration with typed fields and resolved paths.
#[derive(Debug, Clone)]
pub struct Settings {
    pub raw: RunConfig,
    pub digest: String,
    pub cpi: PathBuf,
    pub core_cpi: PathBuf,
    pub food_cpi: PathBuf,
    pub gasoline: PathBuf,
    pub news_text: Option<PathBuf>,
    pub news_probabilities: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub label_encoding: LabelEncoding,
    pub lexicon: Lexicon,
    pub classifier: BaselineClassifier,
    pub score_function: ScoreFunction,
    pub day_cutoff: Option<u32>,
    pub transform: TransformOptions,
    pub backtest: BacktestConfig,
    pub evaluation: EvaluationOptions,
    pub out_dir: PathBuf,
}

fn month(key: &str, value: &str) -> Result<MonthKey, CliError> {
    value
        .parse()
        .map_err(|e| CliError::Config(format!("`{key}`: {e}")))
}

fn config_err(key: &str) -> impl Fn(inflanow::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("`{key}`: {e}"))
}

/// Applies a `key=value` override. The value is read as a TOML value and
/// falls back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let value = value.trim();
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    table.insert(key.to_string(), parsed);
    Ok(())
}

impl Settings {
    /// Loads `path`, applies overrides and an optional output directory.
    pub fn load(path: &Path, overrides: &[String], out: Option<&Path>) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let raw: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let out_dir = match out {
            Some(o) => o.to_path_buf(),
            None => base.join(&raw.out_dir),
        };
        Self::from_raw(raw, base, out_dir)
    }

    pub fn from_raw(raw: RunConfig, base: &Path, out_dir: PathBuf) -> Result<Self, CliError> {
        let resolve = |key: &str, p: &str| -> Result<PathBuf, CliError> {
            if p.is_empty() {
                return Err(CliError::Config(format!("`{key}` is required")));
            }
            let full = base.join(p);
            if !full.is_file() {
                return Err(CliError::Config(format!(
                    "`{key}`: file {} does not exist",
                    full.display()
                )));
            }
            Ok(full)
        };
        let optional = |key: &str, p: &Option<String>| p.as_deref().map(|p| resolve(key, p)).transpose();

        if !(1..=31).contains(&raw.day_cutoff) {
            return Err(CliError::Config("`day_cutoff` must be between 1 and 31".into()));
        }
        if !(0.0..=1.0).contains(&raw.max_rejected_fraction) {
            return Err(CliError::Config("`max_rejected_fraction` must be in [0, 1]".into()));
        }
        if raw.window == 0 || raw.imputation_lags == 0 {
            return Err(CliError::Config("`window` and `imputation_lags` must be positive".into()));
        }
        if !(raw.baseline_neutral_decay.is_finite() && raw.baseline_neutral_decay > 0.0)
            || !raw.baseline_tilt.is_finite()
        {
            return Err(CliError::Config(
                "`baseline_neutral_decay` must be positive and `baseline_tilt` finite".into(),
            ));
        }

        let train = MonthRange::new(month("train_start", &raw.train_start)?, month("train_end", &raw.train_end)?)
            .map_err(config_err("train window"))?;
        let eval = MonthRange::new(month("eval_start", &raw.eval_start)?, month("eval_end", &raw.eval_end)?)
            .map_err(config_err("eval window"))?;
        if train.end >= eval.start {
            return Err(CliError::Config(format!(
                "training window ends {} but evaluation starts {}",
                train.end, eval.start
            )));
        }

        let policy = match raw.denominator_policy.as_str() {
            "error" => DenominatorPolicy::Error,
            "skip" => DenominatorPolicy::Skip,
            other => {
                return Err(CliError::Config(format!(
                    "`denominator_policy`: unknown value `{other}` (expected error or skip)"
                )))
            }
        };

        let settings = Self {
            digest: digest(&raw),
            cpi: resolve("cpi", &raw.cpi)?,
            core_cpi: resolve("core_cpi", &raw.core_cpi)?,
            food_cpi: resolve("food_cpi", &raw.food_cpi)?,
            gasoline: resolve("gasoline", &raw.gasoline)?,
            news_text: optional("news_text", &raw.news_text)?,
            news_probabilities: optional("news_probabilities", &raw.news_probabilities)?,
            labels: optional("labels", &raw.labels)?,
            label_encoding: raw.label_encoding.parse().map_err(config_err("label_encoding"))?,
            lexicon: Lexicon::new(raw.lexicon.iter()).map_err(config_err("lexicon"))?,
            classifier: BaselineClassifier {
                up_terms: raw.baseline_up_terms.iter().map(|s| s.to_lowercase()).collect(),
                down_terms: raw.baseline_down_terms.iter().map(|s| s.to_lowercase()).collect(),
                neutral_decay: raw.baseline_neutral_decay,
                tilt: raw.baseline_tilt,
            },
            score_function: raw.score_function.parse().map_err(config_err("score_function"))?,
            day_cutoff: (raw.day_cutoff < 31).then_some(raw.day_cutoff),
            transform: TransformOptions {
                window: raw.window,
                news_mode: raw.news_pi_mode.parse::<NewsPiMode>().map_err(config_err("news_pi_mode"))?,
                policy,
            },
            backtest: BacktestConfig {
                train,
                eval,
                scheme: raw.scheme.parse::<Scheme>().map_err(config_err("scheme"))?,
                lags: raw.imputation_lags,
                covariance: raw.covariance.parse::<Covariance>().map_err(config_err("covariance"))?,
            },
            evaluation: EvaluationOptions {
                target: raw.eval_target.parse::<EvalTarget>().map_err(config_err("eval_target"))?,
                unit: raw.rmse_unit.parse::<RmseUnit>().map_err(config_err("rmse_unit"))?,
                variant: raw.gw_variant.parse::<GwVariant>().map_err(config_err("gw_variant"))?,
                hac_lag: raw.hac_lag,
            },
            out_dir,
            raw,
        };
        Ok(settings)
    }

    /// `inflanow <version> config-sha256:<digest>`; written as the first
    /// comment line of every output file.
    pub fn provenance(&self) -> String {
        format!("inflanow {} config-sha256:{}", env!("CARGO_PKG_VERSION"), self.digest)
    }
}

/// SHA-256 of the canonical serialization, with the output directory blanked
/// so that moving outputs does not change the digest.
pub fn digest(raw: &RunConfig) -> String {
    let mut canonical = raw.clone();
    canonical.out_dir = String::new();
    let text = toml::to_string(&canonical).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}
