//! Plain-text and delimited renderings of regression and forecast tables.
//!
//! The text layouts follow the usual journal style: one column per model,
//! standard errors in parentheses under each estimate, a diagnostics block,
//! and a significance note.

use std::fmt::Write as _;

use crate::evaluation::EvaluationReport;
use crate::ols::{RegressionResult, Significance};
use crate::sentiment::ClassificationReport;

pub const SIGNIFICANCE_NOTE: &str = "*p<0.1; **p<0.05; ***p<0.01";

/// Canonical row order for coefficient names.
pub const TERM_ORDER: [&str; 5] = ["const", "pi-CCPI", "pi-FCPI", "pi-Gasoline", "pi-NEWS"];

fn ordered_terms(results: &[(&str, &RegressionResult)]) -> Vec<String> {
    let mut terms: Vec<String> = TERM_ORDER
        .iter()
        .filter(|t| results.iter().any(|(_, r)| r.coefficient(t).is_some()))
        .map(|t| t.to_string())
        .collect();
    for (_, r) in results {
        for c in &r.coefficients {
            if !terms.contains(&c.name) {
                terms.push(c.name.clone());
            }
        }
    }
    terms
}

fn starred(v: f64, s: Significance) -> String {
    format!("{v:.3}{}", s.stars())
}

/// Table body as rows of cells; shared by the text and CSV renderers.
fn regression_cells(results: &[(&str, &RegressionResult)]) -> (Vec<Vec<String>>, usize) {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for term in ordered_terms(results) {
        let mut est = vec![term.clone()];
        let mut se = vec![String::new()];
        for (_, r) in results {
            match r.coefficient(&term) {
                Some(c) => {
                    est.push(starred(c.estimate, c.significance));
                    se.push(format!("({:.3})", c.std_error));
                }
                None => {
                    est.push(String::new());
                    se.push(String::new());
                }
            }
        }
        rows.push(est);
        rows.push(se);
    }
    let body_len = rows.len();
    let stat_row = |label: &str, f: &dyn Fn(&RegressionResult) -> String| {
        std::iter::once(label.to_string())
            .chain(results.iter().map(|(_, r)| f(r)))
            .collect::<Vec<_>>()
    };
    rows.push(stat_row("Observations", &|r| r.observations.to_string()));
    rows.push(stat_row("R2", &|r| format!("{:.3}", r.r_squared)));
    rows.push(stat_row("Adjusted R2", &|r| format!("{:.3}", r.adj_r_squared)));
    rows.push(stat_row("Residual Std. Error", &|r| {
        format!("{:.3}", r.residual_std_error)
    }));
    rows.push(stat_row("F Statistic", &|r| {
        r.f_test
            .map(|f| starred(f.statistic, f.significance))
            .unwrap_or_default()
    }));
    (rows, body_len)
}

pub fn regression_table(dependent: &str, results: &[(&str, &RegressionResult)]) -> String {
    let (rows, body_len) = regression_cells(results);
    let header_names: Vec<String> = results.iter().map(|(n, _)| n.to_string()).collect();
    let header_nums: Vec<String> = (1..=results.len()).map(|i| format!("({i})")).collect();

    let label_w = rows.iter().map(|r| r[0].len()).max().unwrap_or(0).max(6);
    let col_w = rows
        .iter()
        .flat_map(|r| r[1..].iter().map(String::len))
        .chain(header_names.iter().map(String::len))
        .max()
        .unwrap_or(0)
        .max(8)
        + 2;
    let width = label_w + 2 + col_w * results.len();
    let rule = |c: char| c.to_string().repeat(width);

    let mut out = String::new();
    let _ = writeln!(out, "{}", rule('='));
    let dep = format!("Dependent variable: {dependent}");
    let _ = writeln!(out, "{:label_w$}  {:^w$}", "", dep, w = col_w * results.len());
    let _ = writeln!(out, "{:label_w$}  {}", "", "-".repeat(col_w * results.len()));
    let line = |cells: &[String]| {
        let mut s = format!("{:<label_w$}  ", cells[0]);
        for c in &cells[1..] {
            let _ = write!(s, "{c:^col_w$}");
        }
        s.trim_end().to_string()
    };
    let mut names = vec![String::new()];
    names.extend(header_names);
    let mut nums = vec![String::new()];
    nums.extend(header_nums);
    let _ = writeln!(out, "{}", line(&names));
    let _ = writeln!(out, "{}", line(&nums));
    let _ = writeln!(out, "{}", rule('-'));
    for (i, row) in rows.iter().enumerate() {
        if i == body_len {
            let _ = writeln!(out, "{}", rule('-'));
        }
        let _ = writeln!(out, "{}", line(row));
    }
    let _ = writeln!(out, "{}", rule('='));
    let _ = writeln!(out, "{:<label_w$}  {:>w$}", "Note:", SIGNIFICANCE_NOTE, w = col_w * results.len());
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",")
}

/// Delimited version of [`regression_table`], same row structure.
pub fn regression_table_csv(results: &[(&str, &RegressionResult)]) -> String {
    let (rows, _) = regression_cells(results);
    let mut header = vec!["term".to_string()];
    header.extend(results.iter().map(|(n, _)| n.to_string()));
    let mut out = csv_line(&header) + "\n";
    for row in rows {
        out.push_str(&csv_line(&row));
        out.push('\n');
    }
    out
}

/// Full-precision coefficient listing.
pub fn coefficients_csv(results: &[(&str, &RegressionResult)]) -> String {
    let mut out = String::from("model,term,estimate,std_error,t_stat,p_value,stars\n");
    for (name, r) in results {
        for c in &r.coefficients {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                csv_field(name),
                c.name,
                c.estimate,
                c.std_error,
                c.t_stat,
                c.p_value,
                c.significance.stars()
            );
        }
    }
    out
}

/// Full-precision diagnostics listing.
pub fn diagnostics_csv(results: &[(&str, &RegressionResult)]) -> String {
    let mut out = String::from(
        "model,observations,r_squared,adj_r_squared,residual_std_error,f_statistic,f_p_value\n",
    );
    for (name, r) in results {
        let (f, p) = r
            .f_test
            .map(|f| (f.statistic.to_string(), f.p_value.to_string()))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{f},{p}",
            csv_field(name),
            r.observations,
            r.r_squared,
            r.adj_r_squared,
            r.residual_std_error
        );
    }
    out
}

/// `0.0407 (0.19)`, with stars on the RMSE when the p-value warrants them.
pub fn format_rmse_with_p(rmse: f64, p_value: Option<f64>) -> String {
    match p_value {
        Some(p) => format!("{rmse:.4}{} ({p:.2})", Significance::from_p(p).stars()),
        None => format!("{rmse:.4} (--)"),
    }
}

fn display_model(name: &str) -> String {
    name.to_uppercase()
}

pub fn evaluation_table(report: &EvaluationReport) -> String {
    let label_w = report
        .models
        .iter()
        .map(|m| m.model.len())
        .max()
        .unwrap_or(0)
        .max(8);
    let col_w = 14;
    let width = label_w + 2 + col_w;
    let compare = report.models.len() > 1;
    let mut out = String::new();
    let _ = writeln!(out, "{}", "=".repeat(width));
    let _ = writeln!(out, "{:label_w$}  {:^col_w$}", "", "RMSE");
    let _ = writeln!(out, "{}", "-".repeat(width));
    for m in &report.models {
        let p = m.vs_benchmark.map(|g| g.p_value);
        let stars = p.map(|p| Significance::from_p(p).stars()).unwrap_or("");
        let value = format!("{:.4}{stars}", m.rmse);
        let _ = writeln!(out, "{:<label_w$}  {:^col_w$}", display_model(&m.model), value);
        if compare {
            let paren = p.map(|p| format!("({p:.2})")).unwrap_or_else(|| "(--)".into());
            let _ = writeln!(out, "{:<label_w$}  {:^col_w$}", "", paren);
        }
    }
    let _ = writeln!(out, "{}", "=".repeat(width));
    let _ = writeln!(out, "Note: {SIGNIFICANCE_NOTE}");
    if compare {
        let _ = writeln!(
            out,
            "In parentheses: Giacomini-White ({}) p-value against {}.",
            report.options.variant.as_str(),
            display_model(&report.models[0].model)
        );
    }
    out
}

/// `model,rmse,observations` rows, then pairwise GW rows.
pub fn evaluation_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("model,rmse,observations\n");
    for m in &report.models {
        let _ = writeln!(out, "{},{},{}", csv_field(&m.model), m.rmse, report.months.len());
    }
    if !report.pairs.is_empty() {
        out.push_str("model_a,model_b,variant,statistic,df,p_value,stars,mean_differential\n");
        for p in &report.pairs {
            let g = &p.result;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(&p.model_a),
                csv_field(&p.model_b),
                g.variant.as_str(),
                g.statistic,
                g.df,
                g.p_value,
                Significance::from_p(g.p_value).stars(),
                g.mean_differential
            );
        }
    }
    out
}

pub fn classification_table(report: &ClassificationReport) -> String {
    let mut out = String::from("label  precision  recall  f1      support\n");
    for m in &report.per_class {
        let _ = writeln!(
            out,
            "{:>5}  {:>9.6}  {:>6.4}  {:.6}  {}",
            m.label.value(),
            m.precision,
            m.recall,
            m.f1,
            m.support
        );
    }
    let _ = writeln!(out, "accuracy     {:.6}", report.accuracy);
    let _ = writeln!(out, "weighted f1  {:.6}", report.weighted_f1);
    out
}
