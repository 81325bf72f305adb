//! Post-processing of run records: χ² occupancy uniformity, diversity
//! extremes across levels and aggregation over seeds.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::{Error, Result};

/// Confidence level of the occupancy uniformity test.
pub const CONFIDENCE: f64 = 0.95;

/// Tag × level visit counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyTable {
    counts: Vec<Vec<u64>>,
}

impl OccupancyTable {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        let m = counts.len();
        if m == 0 {
            return Err(Error::EmptyInput("occupancy table"));
        }
        if let Some(row) = counts.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: row.len(),
            });
        }
        Ok(Self { counts })
    }

    pub fn replicas(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row(&self, tag: usize) -> &[u64] {
        &self.counts[tag]
    }

    pub fn row_total(&self, tag: usize) -> u64 {
        self.counts[tag].iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareReport {
    pub statistics: Vec<f64>,
    pub critical: f64,
    pub ratios: Vec<f64>,
    pub mean_ratio: f64,
    pub uniform: bool,
}

/// Upper `confidence` quantile of the χ² distribution.
pub fn chi_square_critical(degrees_of_freedom: usize, confidence: f64) -> Result<f64> {
    if degrees_of_freedom == 0 {
        return Err(Error::param("degrees_of_freedom", "must be positive"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::param(
            "confidence",
            format!("{confidence} is not in (0, 1)"),
        ));
    }
    let dist = ChiSquared::new(degrees_of_freedom as f64)
        .map_err(|e| Error::param("degrees_of_freedom", e.to_string()))?;
    Ok(dist.inverse_cdf(confidence))
}

/// Pearson statistic of `observed` against equal expected frequencies.
pub fn chi_square_statistic(observed: &[u64]) -> Result<f64> {
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InsufficientData("row with no observations".into()));
    }
    let expected = total as f64 / observed.len() as f64;
    Ok(observed
        .iter()
        .map(|&o| {
            let diff = o as f64 - expected;
            diff * diff / expected
        })
        .sum())
}

/// Tests every tag's level occupancy against the uniform distribution at 95 %.
pub fn chi_square_uniformity(table: &OccupancyTable) -> Result<ChiSquareReport> {
    let m = table.replicas();
    if m < 2 {
        return Err(Error::InsufficientData("need at least two levels".into()));
    }
    let critical = chi_square_critical(m - 1, CONFIDENCE)?;
    let statistics = table
        .counts()
        .iter()
        .enumerate()
        .map(|(tag, row)| {
            chi_square_statistic(row)
                .map_err(|_| Error::InsufficientData(format!("tag {tag} has no recorded visits")))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = statistics.iter().map(|s| s / critical).collect();
    let mean_ratio = ratios.iter().sum::<f64>() / m as f64;
    Ok(ChiSquareReport {
        statistics,
        critical,
        ratios,
        mean_ratio,
        uniform: mean_ratio < 1.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityExtremes {
    pub highest: Vec<f64>,
    pub lowest: Vec<f64>,
    /// Level attaining the maximum at each iteration (first on ties).
    pub highest_level: Vec<usize>,
    pub lowest_level: Vec<usize>,
}

/// Pointwise maximum and minimum over per-level diversity traces.
pub fn diversity_extremes(traces: &[Vec<f64>]) -> Result<DiversityExtremes> {
    let Some(first) = traces.first() else {
        return Err(Error::EmptyInput("diversity traces"));
    };
    let len = first.len();
    if len == 0 {
        return Err(Error::EmptyInput("diversity traces"));
    }
    if let Some(t) = traces.iter().find(|t| t.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: t.len(),
        });
    }
    let mut out = DiversityExtremes {
        highest: Vec::with_capacity(len),
        lowest: Vec::with_capacity(len),
        highest_level: Vec::with_capacity(len),
        lowest_level: Vec::with_capacity(len),
    };
    for t in 0..len {
        let (mut hi, mut lo) = (0, 0);
        for (level, trace) in traces.iter().enumerate() {
            if trace[t] > traces[hi][t] {
                hi = level;
            }
            if trace[t] < traces[lo][t] {
                lo = level;
            }
        }
        out.highest.push(traces[hi][t]);
        out.lowest.push(traces[lo][t]);
        out.highest_level.push(hi);
        out.lowest_level.push(lo);
    }
    Ok(out)
}

/// The outcome of one run, reduced to what the comparison tables need.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub algorithm: String,
    pub objective: String,
    pub dimension: usize,
    pub iterations: u64,
    pub converged: bool,
    pub best_score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Summary of a non-empty sample.
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        Some(Stats {
            mean: v.iter().sum::<f64>() / n as f64,
            median,
            min: v[0],
            max: v[n - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub algorithm: String,
    pub objective: String,
    pub dimension: usize,
    pub runs: usize,
    pub converged: usize,
    /// Iterations used; runs that exhausted the budget count with their full budget.
    pub iterations: Stats,
    pub best_score: Stats,
}

/// Groups records by (algorithm, objective, dimension), in order of first appearance.
pub fn aggregate_runs(records: &[RunRecord]) -> Vec<RunSummary> {
    let mut keys: Vec<(&str, &str, usize)> = Vec::new();
    let mut groups: Vec<Vec<&RunRecord>> = Vec::new();
    for r in records {
        let key = (r.algorithm.as_str(), r.objective.as_str(), r.dimension);
        match keys.iter().position(|k| *k == key) {
            Some(i) => groups[i].push(r),
            None => {
                keys.push(key);
                groups.push(vec![r]);
            }
        }
    }
    keys.into_iter()
        .zip(groups)
        .map(|((algorithm, objective, dimension), g)| {
            let its: Vec<f64> = g.iter().map(|r| r.iterations as f64).collect();
            let scores: Vec<f64> = g.iter().map(|r| r.best_score).collect();
            RunSummary {
                algorithm: algorithm.to_string(),
                objective: objective.to_string(),
                dimension,
                runs: g.len(),
                converged: g.iter().filter(|r| r.converged).count(),
                iterations: Stats::of(&its).expect("group is non-empty"),
                best_score: Stats::of(&scores).expect("group is non-empty"),
            }
        })
        .collect()
}
