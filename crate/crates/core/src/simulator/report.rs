use serde::{Deserialize, Serialize};

use super::{MissingPathPolicy, SatCell, SatTable, SdTrialRecord, SimulationConfig};

/// Aggregates for one shortest-path length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub l0: u32,
    pub n: usize,
    pub basic_mean: f64,
    /// Sample standard deviation (n - 1); absent for a single trial.
    pub basic_std: Option<f64>,
    pub mpep_mean: Option<f64>,
    pub mpep_std: Option<f64>,
    /// Pairs where purification actually took place.
    pub mpep_n: usize,
    pub chosen_mean: f64,
    pub chosen_std: Option<f64>,
    pub skipped_pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub rows: Vec<ReportRow>,
    /// Accepted pairs, including those beyond `l0_max`.
    pub trials: usize,
    /// Disconnected draws that were discarded and resampled, plus abandoned pairs.
    pub skipped_pairs: u64,
    /// Pairs for which no connected draw was found within the attempt cap.
    pub abandoned_pairs: u64,
    pub sat_cells: Vec<SatCell>,
}

fn mean_and_std(values: &[f64]) -> Option<(f64, Option<f64>)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() > 1).then(|| {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1.0)).sqrt()
    });
    Some((mean, std))
}

impl SimulationReport {
    pub(super) fn aggregate(
        config: SimulationConfig,
        records: &[SdTrialRecord],
        skipped_pairs: u64,
        abandoned_pairs: u64,
        sat_table: &SatTable,
    ) -> Self {
        let mut rows = Vec::new();
        for l0 in 1..=config.l0_max {
            let group: Vec<&SdTrialRecord> = records.iter().filter(|r| r.l0 == l0).collect();
            let basic: Vec<f64> = group.iter().map(|r| r.basic_fidelity.value()).collect();
            let Some((basic_mean, basic_std)) = mean_and_std(&basic) else {
                continue;
            };
            let mpep_n = group.iter().filter(|r| r.mpep_fidelity.is_some()).count();
            let mpep: Vec<f64> = match config.missing_path {
                MissingPathPolicy::FallBackToBasic => group
                    .iter()
                    .map(|r| r.mpep_fidelity.unwrap_or(r.basic_fidelity).value())
                    .collect(),
                MissingPathPolicy::Exclude => group.iter().filter_map(|r| r.mpep_fidelity.map(|f| f.value())).collect(),
            };
            let chosen: Vec<f64> = group.iter().map(|r| r.chosen_fidelity.value()).collect();
            let (chosen_mean, chosen_std) = mean_and_std(&chosen).expect("same size as basic");
            let mpep_stats = mean_and_std(&mpep);
            rows.push(ReportRow {
                l0,
                n: group.len(),
                basic_mean,
                basic_std,
                mpep_mean: mpep_stats.map(|s| s.0),
                mpep_std: mpep_stats.and_then(|s| s.1),
                mpep_n,
                chosen_mean,
                chosen_std,
                skipped_pairs,
            });
        }
        Self {
            config,
            rows,
            trials: records.len(),
            skipped_pairs,
            abandoned_pairs,
            sat_cells: sat_table.cells().copied().collect(),
        }
    }

    pub fn row(&self, l0: u32) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.l0 == l0)
    }

    pub const CSV_HEADER: &'static str =
        "l0,n,basic_mean,basic_std,mpep_mean,mpep_std,mpep_n,chosen_mean,chosen_std,skipped_pairs";

    /// One line per row; absent values are empty fields.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_significant).unwrap_or_default();
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.l0,
                r.n,
                format_significant(r.basic_mean),
                opt(r.basic_std),
                opt(r.mpep_mean),
                opt(r.mpep_std),
                r.mpep_n,
                format_significant(r.chosen_mean),
                opt(r.chosen_std),
                r.skipped_pairs
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}

/// Six significant digits in the style of C's `%g`.
pub fn format_significant(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent present");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exponent) {
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exponent.abs())
    } else {
        let decimals = (5 - exponent) as usize;
        trim(&format!("{x:.decimals$}"))
    }
}
