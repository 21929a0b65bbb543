//! Hyperparameter sensitivity from clustered run accuracies.
//!
//! For each `k`, accuracies are clustered with 1-D k-means and the distance
//! between the most populated cluster's center and the center of the cluster
//! holding the best run is divided by the best accuracy. The reported metric
//! is the maximum over `k`. A large value means most hyperparameter choices
//! land far below the best one.

use serde::Serialize;

use super::kmeans::{distinct_count, kmeans_1d_restarts};
use super::runs::RunRecord;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SensitivityOptions {
    pub k_min: usize,
    pub k_max: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SensitivityOptions {
    fn default() -> Self {
        SensitivityOptions {
            k_min: 2,
            k_max: 10,
            restarts: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerK {
    pub k: usize,
    pub metric: f64,
    pub centers: Vec<f64>,
    pub sizes: Vec<usize>,
    pub most_populated_center: f64,
    pub max_cluster_center: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SensitivityReport {
    pub metric: f64,
    pub best_k: usize,
    pub per_k: Vec<PerK>,
    pub max_accuracy: f64,
    /// Centers at `best_k`.
    pub most_populated_center: f64,
    pub max_cluster_center: f64,
    /// Fewer than two distinct accuracies; the metric is 0 by convention.
    pub degenerate: bool,
    pub n_runs: usize,
}

impl SensitivityReport {
    /// `k,metric,centers,sizes` rows, list fields joined with `;`.
    pub fn per_k_csv(&self) -> String {
        let mut out = String::from("k,metric,most_populated_center,max_cluster_center,centers,sizes\n");
        for row in &self.per_k {
            let centers: Vec<String> = row.centers.iter().map(f64::to_string).collect();
            let sizes: Vec<String> = row.sizes.iter().map(usize::to_string).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.k,
                row.metric,
                row.most_populated_center,
                row.max_cluster_center,
                centers.join(";"),
                sizes.join(";")
            ));
        }
        out
    }
}

pub fn hp_sensitivity(records: &[RunRecord], opts: &SensitivityOptions) -> Result<SensitivityReport> {
    let acc: Vec<f64> = records.iter().map(|r| r.accuracy).collect();
    hp_sensitivity_values(&acc, opts)
}

/// Sensitivity metric over raw accuracy values. Values must be finite and
/// non-negative; the `[0, 1]` range is enforced on [`RunRecord`] instead so
/// that rescaled inputs can be analysed too.
pub fn hp_sensitivity_values(values: &[f64], opts: &SensitivityOptions) -> Result<SensitivityReport> {
    if values.len() < 2 {
        return Err(Error::Argument(format!("need at least 2 runs, got {}", values.len())));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Argument(format!("accuracy {v} is negative or non-finite")));
    }
    if opts.k_min < 2 || opts.k_max < opts.k_min {
        return Err(Error::Argument(format!(
            "invalid k range {}..={}",
            opts.k_min, opts.k_max
        )));
    }
    let max_accuracy = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max_accuracy <= 0.0 {
        return Err(Error::Undefined("maximum accuracy is 0".into()));
    }

    // sorting makes the result a function of the multiset alone
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let k_cap = opts.k_max.min(distinct_count(&sorted));
    if k_cap < opts.k_min {
        return Ok(SensitivityReport {
            metric: 0.0,
            best_k: opts.k_min,
            per_k: Vec::new(),
            max_accuracy,
            most_populated_center: max_accuracy,
            max_cluster_center: max_accuracy,
            degenerate: true,
            n_runs: values.len(),
        });
    }

    let mut per_k = Vec::with_capacity(k_cap + 1 - opts.k_min);
    for k in opts.k_min..=k_cap {
        let km = kmeans_1d_restarts(&sorted, k, opts.seed, opts.restarts)?;
        let sizes = km.sizes();
        let max_cluster = *km.assignments.last().expect("non-empty");
        let max_center = km.centers[max_cluster];
        let top = *sizes.iter().max().expect("k >= 2");
        // ties: the tied cluster farthest from the best cluster
        let most_populated = (0..k)
            .filter(|&j| sizes[j] == top)
            .max_by(|&a, &b| {
                let da = (km.centers[a] - max_center).abs();
                let db = (km.centers[b] - max_center).abs();
                da.total_cmp(&db).then(b.cmp(&a))
            })
            .expect("at least one cluster");
        let metric = if most_populated == max_cluster {
            0.0
        } else {
            (km.centers[most_populated] - max_center).abs() / max_accuracy
        };
        per_k.push(PerK {
            k,
            metric,
            most_populated_center: km.centers[most_populated],
            max_cluster_center: max_center,
            centers: km.centers,
            sizes,
        });
    }

    let best = per_k
        .iter()
        .fold(&per_k[0], |best, row| if row.metric > best.metric { row } else { best });
    Ok(SensitivityReport {
        metric: best.metric,
        best_k: best.k,
        max_accuracy,
        most_populated_center: best.most_populated_center,
        max_cluster_center: best.max_cluster_center,
        per_k: per_k.clone(),
        degenerate: false,
        n_runs: values.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AccuracySummary {
    pub mean: f64,
    /// Sample standard deviation; 0 when undefined.
    pub std: f64,
    pub std_defined: bool,
    pub max: f64,
    pub max_to_mean_improvement_percent: f64,
}

/// Mean, sample std, max, and `100 * (max - mean) / mean`.
pub fn mean_accuracy_summary(values: &[f64]) -> Result<AccuracySummary> {
    if values.is_empty() {
        return Err(Error::Argument("need at least one run".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::Undefined("mean accuracy is 0".into()));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (std, std_defined) = if values.len() > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        ((ss / (n - 1.0)).sqrt(), true)
    } else {
        (0.0, false)
    };
    Ok(AccuracySummary {
        mean,
        std,
        std_defined,
        max,
        max_to_mean_improvement_percent: 100.0 * (max - mean) / mean,
    })
}
