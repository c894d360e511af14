use std::fmt::Write;

use super::logistic::{stars, RegressionResult};
use crate::scalar::Scalar;

const LABELS: [(&str, &str); 4] = [
    ("is_generalist_team", "Is Generalist Team"),
    ("team_size", "Team size"),
    ("year_of_publication", "Year"),
    ("average_career_age", "Average career age"),
];

fn label(column: &str) -> &str {
    LABELS
        .iter()
        .find(|(c, _)| *c == column)
        .map(|(_, l)| *l)
        .unwrap_or(column)
}

/// Plain-text regression table: one `Coef` / `Odds Ratio` column pair per
/// model, covariate rows, then `n`. The intercept is reported below.
pub fn render_table<T: Scalar>(title: &str, models: &[(&str, &RegressionResult<T>)]) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    let mut header = format!("{:<22}", "");
    let mut sub = format!("{:<22}", "");
    for (name, _) in models {
        header.push_str(&format!("{:<26}", name));
        sub.push_str(&format!("{:<13}{:<13}", "Coef", "Odds Ratio"));
    }
    writeln!(out, "{}", header.trim_end()).unwrap();
    writeln!(out, "{}", sub.trim_end()).unwrap();
    let Some((_, first)) = models.first() else {
        return out;
    };
    for (j, col) in first.columns.iter().enumerate().skip(1) {
        let mut line = format!("{:<22}", label(col));
        for (_, m) in models {
            let c = m.coef[j].to_f64_lossy();
            let p = m.p_value[j].to_f64_lossy();
            let cell = format!("{:.3}{}", c, stars(p));
            line.push_str(&format!("{:<13}{:<13}", cell, format!("{:.2}", m.odds_ratio[j].to_f64_lossy())));
        }
        writeln!(out, "{}", line.trim_end()).unwrap();
    }
    let mut line = format!("{:<22}", "n");
    for (_, m) in models {
        line.push_str(&format!("{:<26}", m.n));
    }
    writeln!(out, "{}", line.trim_end()).unwrap();
    writeln!(out).unwrap();
    for (name, m) in models {
        writeln!(
            out,
            "{name}: intercept {:.4} (se {:.4}), positives {}, converged {}, iterations {}, score norm {:.3e}",
            m.coef[0].to_f64_lossy(),
            m.se[0].to_f64_lossy(),
            m.n_positive,
            m.converged,
            m.n_iter,
            m.score_norm.to_f64_lossy()
        )
        .unwrap();
    }
    writeln!(out, "*** p < 0.001").unwrap();
    out
}
