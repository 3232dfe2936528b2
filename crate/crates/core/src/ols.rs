//! Ordinary least squares with classical inference.
//!
//! Estimation goes through a Householder QR with column pivoting; a design
//! is rejected as singular when a pivot falls below [`RANK_TOLERANCE`] times
//! the leading pivot.

use std::str::FromStr;

use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Relative pivot magnitude below which a column counts as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Column-major design matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    rows: usize,
}

impl Design {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::LengthMismatch {
                left: names.len(),
                right: columns.len(),
            });
        }
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::LengthMismatch {
                left: rows,
                right: bad.len(),
            });
        }
        Ok(Self {
            names,
            columns,
            rows,
        })
    }

    /// Prepends a `const` column of ones to the given regressors.
    pub fn with_intercept(regressors: Vec<(String, Vec<f64>)>, rows: usize) -> Result<Self> {
        let mut names = vec!["const".to_string()];
        let mut columns = vec![vec![1.0; rows]];
        for (name, col) in regressors {
            names.push(name);
            columns.push(col);
        }
        Self::new(names, columns)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    fn has_intercept(&self) -> bool {
        self.columns.iter().any(|c| c.iter().all(|&v| v == 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Covariance {
    /// `s^2 (X'X)^-1`
    #[default]
    Classical,
    /// White sandwich with the `n / (n - k)` small-sample factor.
    Hc1,
}

impl FromStr for Covariance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Covariance::Classical),
            "hc1" => Ok(Covariance::Hc1),
            other => Err(Error::Config(format!(
                "unknown covariance `{other}` (expected classical or hc1)"
            ))),
        }
    }
}

/// Star tier from the conventional `p<0.1; p<0.05; p<0.01` thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Significance {
    None,
    Ten,
    Five,
    One,
}

impl Significance {
    pub fn from_p(p: f64) -> Self {
        if p < 0.01 {
            Significance::One
        } else if p < 0.05 {
            Significance::Five
        } else if p < 0.1 {
            Significance::Ten
        } else {
            Significance::None
        }
    }

    pub fn stars(self) -> &'static str {
        match self {
            Significance::None => "",
            Significance::Ten => "*",
            Significance::Five => "**",
            Significance::One => "***",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub significance: Significance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FTest {
    pub statistic: f64,
    pub df_model: usize,
    pub df_resid: usize,
    pub p_value: f64,
    pub significance: Significance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionResult {
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub residual_std_error: f64,
    /// Absent for an intercept-only model.
    pub f_test: Option<FTest>,
    pub observations: usize,
    pub df_resid: usize,
    pub covariance: Covariance,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
}

impl RegressionResult {
    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// Two-sided p-value of a t statistic with `df` degrees of freedom.
pub fn t_two_sided_p(t: f64, df: usize) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    let df = df as f64;
    beta_reg(df / 2.0, 0.5, df / (df + t * t))
}

/// Upper-tail probability of an F statistic.
pub fn f_upper_p(f: f64, df_model: usize, df_resid: usize) -> f64 {
    if f.is_nan() {
        return f64::NAN;
    }
    if f <= 0.0 {
        return 1.0;
    }
    let (d1, d2) = (df_model as f64, df_resid as f64);
    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}

pub fn fit_ols(y: &[f64], design: &Design, covariance: Covariance) -> Result<RegressionResult> {
    let n = design.nrows();
    let k = design.ncols();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: n,
        });
    }
    if k == 0 || n <= k {
        return Err(Error::InsufficientObservations {
            observations: n,
            parameters: k,
        });
    }
    if !design.has_intercept() {
        return Err(Error::Config("design has no intercept column".into()));
    }
    if y.iter().chain(design.columns.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Config("non-finite value in regression data".into()));
    }

    let qr = PivotedQr::new(design);
    if let Some(rank) = qr.deficient_rank() {
        let columns = qr.perm[rank..]
            .iter()
            .map(|&j| design.names[j].clone())
            .collect();
        return Err(Error::SingularDesign { columns });
    }

    let beta = qr.solve(y);
    let fitted: Vec<f64> = (0..n)
        .map(|i| (0..k).map(|j| design.get(i, j) * beta[j]).sum())
        .collect();
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let df_resid = n - k;
    let sigma2 = rss / df_resid as f64;

    let xtx_inv = qr.xtx_inverse();
    let cov = match covariance {
        Covariance::Classical => xtx_inv.iter().map(|row| row.iter().map(|v| v * sigma2).collect()).collect(),
        Covariance::Hc1 => sandwich(design, &xtx_inv, &residuals),
    };

    let coefficients = (0..k)
        .map(|j| {
            let std_error = cov[j][j].max(0.0).sqrt();
            let t_stat = if std_error > 0.0 {
                beta[j] / std_error
            } else if beta[j] == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(beta[j])
            };
            let p_value = t_two_sided_p(t_stat, df_resid);
            Coefficient {
                name: design.names[j].clone(),
                estimate: beta[j],
                std_error,
                t_stat,
                p_value,
                significance: Significance::from_p(p_value),
            }
        })
        .collect();

    let r_squared = 1.0 - rss / tss;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df_resid as f64;
    let f_test = (k > 1).then(|| {
        let df_model = k - 1;
        let statistic = if rss > 0.0 {
            ((tss - rss) / df_model as f64) / sigma2
        } else {
            f64::INFINITY
        };
        let p_value = f_upper_p(statistic, df_model, df_resid);
        FTest {
            statistic,
            df_model,
            df_resid,
            p_value,
            significance: Significance::from_p(p_value),
        }
    });

    Ok(RegressionResult {
        coefficients,
        r_squared,
        adj_r_squared,
        residual_std_error: sigma2.sqrt(),
        f_test,
        observations: n,
        df_resid,
        covariance,
        residuals,
        fitted,
    })
}

/// `n/(n-k) * B X' diag(e^2) X B` with `B = (X'X)^-1`.
fn sandwich(design: &Design, bread: &[Vec<f64>], residuals: &[f64]) -> Vec<Vec<f64>> {
    let n = design.nrows();
    let k = design.ncols();
    let mut meat = vec![vec![0.0; k]; k];
    for (i, e) in residuals.iter().enumerate() {
        let e2 = e * e;
        for a in 0..k {
            for b in 0..k {
                meat[a][b] += e2 * design.get(i, a) * design.get(i, b);
            }
        }
    }
    let scale = n as f64 / (n - k) as f64;
    let bm = mat_mul(bread, &meat);
    let mut out = mat_mul(&bm, bread);
    for row in &mut out {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    out
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = b.len();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| (0..k).map(|l| row[l] * b[l][j]).sum())
                .collect()
        })
        .collect()
}

/// Householder QR of `X P` with greedy column-norm pivoting.
struct PivotedQr {
    /// Householder vectors below the diagonal, `R` on and above it.
    qr: Vec<Vec<f64>>,
    /// Householder scalars.
    tau: Vec<f64>,
    rdiag: Vec<f64>,
    /// `perm[j]` is the original index of pivoted column `j`.
    perm: Vec<usize>,
    rows: usize,
}

impl PivotedQr {
    fn new(design: &Design) -> Self {
        let n = design.nrows();
        let k = design.ncols();
        let mut a = design.columns.clone();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut tau = vec![0.0; k];
        let mut rdiag = vec![0.0; k];

        for j in 0..k {
            let norm_sq = |col: &[f64]| col[j..].iter().map(|v| v * v).sum::<f64>();
            let pivot = (j..k)
                .max_by(|&p, &q| norm_sq(&a[p]).total_cmp(&norm_sq(&a[q])).then(q.cmp(&p)))
                .unwrap_or(j);
            a.swap(j, pivot);
            perm.swap(j, pivot);

            let norm = norm_sq(&a[j]).sqrt();
            if norm == 0.0 {
                rdiag[j] = 0.0;
                tau[j] = 0.0;
                continue;
            }
            let alpha = if a[j][j] > 0.0 { -norm } else { norm };
            // v = x - alpha e1, stored in place with v[0] kept separately
            let v0 = a[j][j] - alpha;
            a[j][j] = v0;
            let vnorm_sq: f64 = a[j][j..].iter().map(|v| v * v).sum();
            tau[j] = 2.0 / vnorm_sq;
            rdiag[j] = alpha;

            let (left, right) = a.split_at_mut(j + 1);
            let v = &left[j][j..];
            for col in right.iter_mut() {
                let dot: f64 = v.iter().zip(&col[j..]).map(|(x, y)| x * y).sum();
                let s = tau[j] * dot;
                for (c, vi) in col[j..].iter_mut().zip(v) {
                    *c -= s * vi;
                }
            }
        }
        Self {
            qr: a,
            tau,
            rdiag,
            perm,
            rows: n,
        }
    }

    fn deficient_rank(&self) -> Option<usize> {
        let lead = self.rdiag.first().map_or(0.0, |r| r.abs());
        self.rdiag
            .iter()
            .position(|r| lead == 0.0 || r.abs() <= RANK_TOLERANCE * lead)
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.rdiag[i]
        } else {
            self.qr[j][i]
        }
    }

    fn solve(&self, y: &[f64]) -> Vec<f64> {
        let k = self.perm.len();
        let mut qty = y.to_vec();
        for j in 0..k {
            let v = &self.qr[j][j..self.rows];
            let dot: f64 = v.iter().zip(&qty[j..]).map(|(a, b)| a * b).sum();
            let s = self.tau[j] * dot;
            for (q, vi) in qty[j..].iter_mut().zip(v) {
                *q -= s * vi;
            }
        }
        let mut z = vec![0.0; k];
        for i in (0..k).rev() {
            let tail: f64 = (i + 1..k).map(|j| self.r(i, j) * z[j]).sum();
            z[i] = (qty[i] - tail) / self.r(i, i);
        }
        let mut beta = vec![0.0; k];
        for (j, &orig) in self.perm.iter().enumerate() {
            beta[orig] = z[j];
        }
        beta
    }

    /// `(X'X)^-1 = P R^-1 R^-T P'`.
    fn xtx_inverse(&self) -> Vec<Vec<f64>> {
        let k = self.perm.len();
        let mut rinv = vec![vec![0.0; k]; k];
        for c in 0..k {
            for i in (0..=c).rev() {
                let rhs = if i == c { 1.0 } else { 0.0 };
                let tail: f64 = (i + 1..=c).map(|j| self.r(i, j) * rinv[j][c]).sum();
                rinv[i][c] = (rhs - tail) / self.r(i, i);
            }
        }
        let mut out = vec![vec![0.0; k]; k];
        for a in 0..k {
            for b in 0..k {
                let v: f64 = (a.max(b)..k).map(|l| rinv[a][l] * rinv[b][l]).sum();
                out[self.perm[a]][self.perm[b]] = v;
            }
        }
        out
    }
}
