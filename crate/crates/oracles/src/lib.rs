//! Reference computations used only by tests.
//!
//! Everything here is written independently of the `inflanow` crate and
//! favours the most direct formula over numerical care: normal equations
//! instead of QR, a plain power series for the incomplete beta function,
//! nested loops for confusion matrices.

/// OLS quantities computed from the normal equations.
#[derive(Debug, Clone)]
pub struct OlsOracle {
    pub beta: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub residual_std_error: f64,
    pub f_statistic: f64,
    pub f_p_value: f64,
}

/// Inverts a square matrix by Gauss-Jordan elimination with partial pivoting.
pub fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col] == 0.0 {
            return None;
        }
        m.swap(col, pivot);
        let d = m[col][col];
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for j in 0..2 * n {
                        m[row][j] -= f * m[col][j];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Fits `y = X b + e` where `rows[i]` is the i-th row of X. The first column
/// must be the intercept.
pub fn ols(y: &[f64], rows: &[Vec<f64>]) -> OlsOracle {
    let n = y.len();
    let k = rows[0].len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in rows.iter().zip(y) {
        for a in 0..k {
            xty[a] += row[a] * yi;
            for b in 0..k {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    let inv = invert(&xtx).expect("singular oracle design");
    let beta: Vec<f64> = (0..k)
        .map(|a| (0..k).map(|b| inv[a][b] * xty[b]).sum())
        .collect();
    let ssr: f64 = rows
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let fit: f64 = row.iter().zip(&beta).map(|(x, b)| x * b).sum();
            (yi - fit).powi(2)
        })
        .sum();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    let df = n - k;
    let sigma2 = ssr / df as f64;
    let std_errors: Vec<f64> = (0..k).map(|a| (sigma2 * inv[a][a]).sqrt()).collect();
    let t_stats: Vec<f64> = beta.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let p_values = t_stats.iter().map(|&t| student_t_two_sided(t, df)).collect();
    let r_squared = 1.0 - ssr / sst;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df as f64;
    let f_statistic = ((sst - ssr) / (k - 1) as f64) / sigma2;
    OlsOracle {
        beta,
        std_errors,
        t_stats,
        p_values,
        r_squared,
        adj_r_squared,
        residual_std_error: sigma2.sqrt(),
        f_statistic,
        f_p_value: f_upper(f_statistic, k - 1, df),
    }
}

/// ln Γ(h / 2) for a positive integer h, by the recurrence from Γ(1) and Γ(1/2).
pub fn ln_gamma_half(h: usize) -> f64 {
    assert!(h > 0);
    let (mut x, mut acc) = if h.is_multiple_of(2) {
        (1.0, 0.0)
    } else {
        (0.5, 0.5 * std::f64::consts::PI.ln())
    };
    while 2.0 * x < h as f64 {
        acc += x.ln();
        x += 1.0;
    }
    acc
}

/// Regularized incomplete beta I_x(a, b) with a = ha/2, b = hb/2.
pub fn inc_beta_half(x: f64, ha: usize, hb: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let (a, b) = (ha as f64 / 2.0, hb as f64 / 2.0);
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - inc_beta_half(1.0 - x, hb, ha);
    }
    let ln_beta = ln_gamma_half(ha) + ln_gamma_half(hb) - ln_gamma_half(ha + hb);
    let front = (a * x.ln() + b * (1.0 - x).ln() - ln_beta - a.ln()).exp();
    // 1 + sum_{n>=0} (a+b)_{n+1} / (a+1)_{n+1} x^{n+1}
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    loop {
        term *= (a + b + n) / (a + 1.0 + n) * x;
        sum += term;
        n += 1.0;
        if term < sum * 1e-17 || n > 1e6 {
            break;
        }
    }
    front * sum
}

/// Two-sided Student-t p-value.
pub fn student_t_two_sided(t: f64, df: usize) -> f64 {
    let nu = df as f64;
    inc_beta_half(nu / (nu + t * t), df, 1)
}

/// Upper-tail F p-value.
pub fn f_upper(f: f64, d1: usize, d2: usize) -> f64 {
    let (a, b) = (d1 as f64, d2 as f64);
    inc_beta_half(b / (b + a * f), d2, d1)
}

/// Weighted F1 from a confusion matrix filled by brute-force counting.
/// Labels are arbitrary integers; a class absent from both lists has no weight.
pub fn weighted_f1(predictions: &[i64], gold: &[i64]) -> f64 {
    let mut classes: Vec<i64> = predictions.iter().chain(gold).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let mut weighted = 0.0;
    for &c in &classes {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fneg = 0usize;
        for (&p, &g) in predictions.iter().zip(gold) {
            match (p == c, g == c) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                (false, false) => {}
            }
        }
        let support = tp + fneg;
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if support == 0 { 0.0 } else { tp as f64 / support as f64 };
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        weighted += support as f64 * f1;
    }
    weighted / gold.len() as f64
}

/// Arithmetic mean of each group, keyed by any ordered key.
pub fn group_means<K: Ord + Copy>(items: &[(K, f64)]) -> Vec<(K, f64)> {
    let mut keys: Vec<K> = items.iter().map(|(k, _)| *k).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|k| {
            let vals: Vec<f64> = items.iter().filter(|(j, _)| *j == k).map(|(_, v)| *v).collect();
            (k, vals.iter().sum::<f64>() / vals.len() as f64)
        })
        .collect()
}

/// Running totals.
pub fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    values
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// Relative difference with the larger magnitude as scale; zero when both are zero.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
