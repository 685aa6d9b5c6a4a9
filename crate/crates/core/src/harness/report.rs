use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::trial::{FailureClass, TrialRecord};
use crate::error::{Error, Result};
use crate::policy::Variant;

/// One (tier, variant) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub tier: u8,
    pub variant: Variant,
    pub trials: usize,
    pub opened: usize,
    pub placed_mean: f64,
    /// Population standard deviation.
    pub placed_std: f64,
    pub contained_mean: f64,
    pub contained_std: f64,
    pub n1: usize,
    pub n2: usize,
    pub failures: BTreeMap<FailureClass, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    (m, var.sqrt())
}

/// `1.6±0.7`
pub fn format_pm(mean: f64, std: f64) -> String {
    format!("{mean:.1}±{std:.1}")
}

pub fn aggregate(records: &[TrialRecord]) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut cells: BTreeMap<(u8, Variant), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.tier, r.variant)).or_default().push(r);
    }
    let rows = cells
        .into_iter()
        .map(|((tier, variant), rs)| {
            let placed: Vec<f64> = rs.iter().map(|r| r.outcome.n_placed as f64).collect();
            let contained: Vec<f64> = rs.iter().map(|r| r.outcome.n_contained as f64).collect();
            let (placed_mean, placed_std) = mean_std(&placed);
            let (contained_mean, contained_std) = mean_std(&contained);
            let mut failures: BTreeMap<FailureClass, usize> =
                FailureClass::FAILURES.iter().map(|&c| (c, 0)).collect();
            for r in &rs {
                if r.failure_class != FailureClass::None {
                    *failures.entry(r.failure_class).or_default() += 1;
                }
            }
            ReportRow {
                tier,
                variant,
                trials: rs.len(),
                opened: rs.iter().filter(|r| r.outcome.opened_bag).count(),
                placed_mean,
                placed_std,
                contained_mean,
                contained_std,
                n1: rs.iter().filter(|r| r.outcome.success_n1).count(),
                n2: rs.iter().filter(|r| r.outcome.success_n2).count(),
                failures,
            }
        })
        .collect();
    Ok(Report { rows })
}

impl ReportRow {
    /// Open Bag, #Placed, #Contained, n≥1, n=2.
    pub fn cells(&self) -> [String; 5] {
        let n = self.trials;
        [
            format!("{}/{n}", self.opened),
            format_pm(self.placed_mean, self.placed_std),
            format_pm(self.contained_mean, self.contained_std),
            format!("{}/{n}", self.n1),
            format!("{}/{n}", self.n2),
        ]
    }

    fn failure_counts(&self) -> Vec<usize> {
        FailureClass::FAILURES
            .iter()
            .map(|c| self.failures.get(c).copied().unwrap_or(0))
            .collect()
    }
}

impl Report {
    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let mut table: Vec<Vec<String>> = vec![
            ["Tier", "Variant", "Open Bag", "#Placed", "#Contained", "n>=1", "n=2", "A", "B", "C", "D", "E"]
                .map(String::from)
                .to_vec(),
        ];
        for r in &self.rows {
            let mut row = vec![r.tier.to_string(), r.variant.to_string()];
            row.extend(r.cells());
            row.extend(r.failure_counts().iter().map(|c| c.to_string()));
            table.push(row);
        }
        let widths: Vec<usize> = (0..table[0].len())
            .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for row in &table {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
                .collect();
            s.push_str(line.join("  ").trim_end());
            s.push('\n');
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "tier,variant,trials,opened,placed_mean,placed_std,contained_mean,contained_std,n_ge_1,n_eq_2,fail_a,fail_b,fail_c,fail_d,fail_e\n",
        );
        for r in &self.rows {
            let f = r.failure_counts();
            s.push_str(&format!(
                "{},{},{},{},{:.4},{:.4},{:.4},{:.4},{},{},{},{},{},{},{}\n",
                r.tier,
                r.variant,
                r.trials,
                r.opened,
                r.placed_mean,
                r.placed_std,
                r.contained_mean,
                r.contained_std,
                r.n1,
                r.n2,
                f[0],
                f[1],
                f[2],
                f[3],
                f[4]
            ));
        }
        s
    }
}
