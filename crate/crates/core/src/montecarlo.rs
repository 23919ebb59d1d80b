//! Empirical check of sampled partition frequencies against an exact law.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::{json, Value};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::format::{decimal_string, partition_json, rational_string, to_f64, SCHEMA_VERSION};
use crate::graph::{Graph, Partition};
use crate::oracle::{enumerate_connected_partitions, randmst_partition_distribution, EnumerationBudget};
use crate::prob::partition_probability;
use crate::sampler::{sample_connected_partition, RngState, TreeMode};
use crate::Probability;

/// Samples per independent `(seed, stream)` generator. Fixed, so a run's
/// result does not depend on how many worker threads execute it.
pub const STREAM_CHUNK: u64 = 8192;

/// Cells whose expected count falls below this are pooled.
pub const DEFAULT_MIN_EXPECTED: f64 = 5.0;

pub type Tally = BTreeMap<Partition, u64>;

/// Draws `count` partitions from the generator `(seed, stream)`.
pub fn tally_stream(g: &Graph, k: usize, mode: TreeMode, seed: u64, stream: u64, count: u64) -> Result<Tally> {
    let mut rng = RngState::with_stream(seed, stream);
    let mut tally = Tally::new();
    for _ in 0..count {
        let p = sample_connected_partition(g, k, mode, &mut rng)?;
        *tally.entry(p).or_default() += 1;
    }
    Ok(tally)
}

pub fn merge_tallies(mut a: Tally, b: Tally) -> Tally {
    for (p, c) in b {
        *a.entry(p).or_default() += c;
    }
    a
}

/// Tally of `samples` independent sampler runs.
///
/// Sample `i` is drawn by stream `i / STREAM_CHUNK` of `seed`; streams run in
/// parallel and are merged in order.
pub fn run_trials(g: &Graph, k: usize, samples: u64, seed: u64, mode: TreeMode) -> Result<Tally> {
    let n = g.node_count();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let streams = samples.div_ceil(STREAM_CHUNK);
    let parts = (0..streams)
        .into_par_iter()
        .map(|s| {
            let count = STREAM_CHUNK.min(samples - s * STREAM_CHUNK);
            tally_stream(g, k, mode, seed, s, count)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().fold(Tally::new(), merge_tallies))
}

/// Exact partition law of the sampler in `mode`: the closed form over the
/// enumerated connected partitions for uniform trees, the permutation
/// oracle for random-MST trees.
pub fn exact_law(
    g: &Graph,
    k: usize,
    mode: TreeMode,
    budget: &EnumerationBudget,
) -> Result<BTreeMap<Partition, Probability>> {
    match mode {
        TreeMode::UniformTree => enumerate_connected_partitions(g, k, budget)?
            .into_iter()
            .map(|c| {
                let p = partition_probability(g, &c)?;
                Ok((c, p))
            })
            .collect(),
        TreeMode::RandMstTree => randmst_partition_distribution(g, k, budget),
    }
}

#[derive(Debug, Clone)]
pub struct ReportRow {
    pub partition: Partition,
    pub expected: Probability,
    pub expected_f64: f64,
    pub observed: u64,
    pub frequency: f64,
    /// `(observed - n p) / sqrt(n p (1 - p))`.
    pub z: f64,
}

#[derive(Debug, Clone)]
pub struct TrialReport {
    pub rows: Vec<ReportRow>,
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    /// Cells left after pooling low-expectation rows.
    pub cells: usize,
    pub samples: u64,
    pub seed: Option<u64>,
    pub mode: Option<TreeMode>,
    pub min_expected: f64,
}

/// Compares a tally with an exact law using the default pooling threshold.
pub fn compare(tally: &Tally, exact: &BTreeMap<Partition, Probability>, samples: u64) -> Result<TrialReport> {
    compare_with(tally, exact, samples, DEFAULT_MIN_EXPECTED)
}

/// Per-partition z-scores plus a Pearson chi-square over the whole support.
/// Rows with expected count below `min_expected` are pooled into one cell;
/// if that cell is still too small it joins the smallest remaining cell.
pub fn compare_with(
    tally: &Tally,
    exact: &BTreeMap<Partition, Probability>,
    samples: u64,
    min_expected: f64,
) -> Result<TrialReport> {
    let observed_total: u64 = tally.values().sum();
    if observed_total != samples {
        return Err(Error::SampleCount {
            found: observed_total,
            expected: samples,
        });
    }
    for (p, &c) in tally {
        let supported = exact.get(p).is_some_and(|q| *q.numer() != BigUint::default());
        if c > 0 && !supported {
            return Err(Error::OutsideSupport(p.to_string()));
        }
    }
    let n = samples as f64;
    let rows: Vec<ReportRow> = exact
        .iter()
        .map(|(p, q)| {
            let prob = to_f64(q);
            let observed = tally.get(p).copied().unwrap_or(0);
            let mean = n * prob;
            let sd = (n * prob * (1.0 - prob)).sqrt();
            let z = if sd > 0.0 { (observed as f64 - mean) / sd } else { 0.0 };
            ReportRow {
                partition: p.clone(),
                expected: q.clone(),
                expected_f64: prob,
                observed,
                frequency: observed as f64 / n,
                z,
            }
        })
        .collect();

    let mut cells: Vec<(f64, f64)> = Vec::new();
    let mut pool = (0.0, 0.0);
    for r in rows.iter().filter(|r| r.expected_f64 > 0.0) {
        let cell = (r.observed as f64, n * r.expected_f64);
        if cell.1 >= min_expected {
            cells.push(cell);
        } else {
            pool.0 += cell.0;
            pool.1 += cell.1;
        }
    }
    if pool.1 > 0.0 {
        if pool.1 >= min_expected || cells.is_empty() {
            cells.push(pool);
        } else {
            let smallest = cells
                .iter_mut()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty");
            smallest.0 += pool.0;
            smallest.1 += pool.1;
        }
    }
    let chi_square: f64 = cells.iter().map(|&(o, e)| (o - e).powi(2) / e).sum();
    let df = cells.len().saturating_sub(1);
    let p_value = if df == 0 {
        1.0
    } else {
        ChiSquared::new(df as f64).expect("df > 0").sf(chi_square)
    };
    Ok(TrialReport {
        rows,
        chi_square,
        degrees_of_freedom: df,
        p_value,
        cells: cells.len(),
        samples,
        seed: None,
        mode: None,
        min_expected,
    })
}

/// Two-sided normal quantile at `alpha / cells`, for a family-wise bound on
/// `cells` z-scores.
pub fn bonferroni_z_bound(alpha: f64, cells: usize) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.inverse_cdf(1.0 - alpha / (2.0 * cells.max(1) as f64))
}

impl TrialReport {
    pub fn row(&self, p: &Partition) -> Option<&ReportRow> {
        self.rows.iter().find(|r| &r.partition == p)
    }

    /// Rows whose expected count is large enough for a normal z-score.
    pub fn z_checked_rows(&self) -> impl Iterator<Item = &ReportRow> {
        let n = self.samples as f64;
        self.rows.iter().filter(move |r| n * r.expected_f64 >= self.min_expected)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.z_checked_rows().map(|r| r.z.abs()).fold(0.0, f64::max)
    }

    pub fn chi_square_rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }

    /// Pass iff the chi-square does not reject at `alpha` and no z-checked
    /// row exceeds `z_bound`. `None` uses the Bonferroni bound for `alpha`.
    pub fn passes(&self, alpha: f64, z_bound: Option<f64>) -> bool {
        let bound = z_bound.unwrap_or_else(|| bonferroni_z_bound(alpha, self.z_checked_rows().count()));
        !self.chi_square_rejects(alpha) && self.max_abs_z() <= bound
    }

    pub fn to_json(&self, digits: usize, alpha: f64, z_bound: Option<f64>) -> Value {
        let bound = z_bound.unwrap_or_else(|| bonferroni_z_bound(alpha, self.z_checked_rows().count()));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "partition": partition_json(&r.partition),
                    "expected": rational_string(&r.expected),
                    "expected_float": r.expected_f64,
                    "expected_decimal": decimal_string(&r.expected, digits),
                    "observed": r.observed,
                    "frequency": r.frequency,
                    "z": r.z,
                })
            })
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "samples": self.samples,
            "seed": self.seed,
            "mode": self.mode.map(TreeMode::as_str),
            "rows": rows,
            "chi_square": self.chi_square,
            "degrees_of_freedom": self.degrees_of_freedom,
            "cells": self.cells,
            "p_value": self.p_value,
            "alpha": alpha,
            "max_abs_z": self.max_abs_z(),
            "z_bound": bound,
            "pass": self.passes(alpha, z_bound),
        })
    }
}
