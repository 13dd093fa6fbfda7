//! Grouping users (or APs) by their large-scale fading signatures.

mod agglomerative;
mod kmeans;
mod spectral;

pub use agglomerative::{agglomerative_cluster, Dendrogram, Merge};
pub use kmeans::{kmeans_cluster, kmeans_cluster_with, KMeansOptions, KMeansResult};
pub use spectral::spectral_cluster;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::GainMatrix;

/// Symmetric pairwise dissimilarities with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    values: DMatrix<f64>,
}

impl DissimilarityMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if !values.is_square() {
            return Err(Error::invalid("dissimilarity matrix must be square"));
        }
        let n = values.nrows();
        for i in 0..n {
            if values[(i, i)] != 0.0 {
                return Err(Error::invalid("dissimilarity diagonal must be zero"));
            }
            for j in 0..i {
                let v = values[(i, j)];
                if !(v >= 0.0) || v != values[(j, i)] {
                    return Err(Error::invalid(format!(
                        "dissimilarity must be symmetric and nonnegative at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { values })
    }

    /// Builds a matrix from the strict upper triangle given row by row.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut values = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                values[(i, j)] = v;
                values[(j, i)] = v;
            }
        }
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Restriction to the given indices, in the given order.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let n = order.len();
        Self {
            values: DMatrix::from_fn(n, n, |i, j| self.values[(order[i], order[j])]),
        }
    }
}

/// Cluster label per point; labels are `0..m` numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub m: usize,
}

impl ClusterAssignment {
    /// Renumbers arbitrary labels by order of first appearance.
    pub fn from_raw_labels(raw: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|r| {
                let next = map.len();
                *map.entry(*r).or_insert(next)
            })
            .collect();
        Self {
            labels,
            m: map.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.m];
        for (i, &c) in self.labels.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.m];
        for &c in &self.labels {
            out[c] += 1;
        }
        out
    }
}

pub(crate) fn check_cluster_count(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::invalid(format!(
            "cluster count must be in [1, {n}], got {m}"
        )));
    }
    Ok(())
}

/// Pairwise cosine distances `1 - <a, b> / (|a| |b|)` between the rows of `features`.
pub fn cosine_distance_matrix(features: &DMatrix<f64>) -> Result<DissimilarityMatrix> {
    let n = features.nrows();
    let norms: Vec<f64> = (0..n).map(|i| features.row(i).norm()).collect();
    if let Some(i) = norms.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::invalid(format!("feature row {i} has zero norm")));
    }
    // Row-major copy so the inner dot product walks contiguous memory.
    let cols = features.ncols();
    let mut rows = vec![0.0; n * cols];
    for i in 0..n {
        for c in 0..cols {
            rows[i * cols + c] = features[(i, c)] / norms[i];
        }
    }
    DissimilarityMatrix::from_fn(n, |i, j| {
        let a = &rows[i * cols..(i + 1) * cols];
        let b = &rows[j * cols..(j + 1) * cols];
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        (1.0 - dot).clamp(0.0, 2.0)
    })
}

/// Which side of the gain matrix carries the existing clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// Users are clustered; each AP joins the cluster of its best user.
    Users,
    /// APs are clustered; each user joins the cluster of its best AP.
    Aps,
}

/// Assigns every node on the non-anchor side to the cluster of its
/// highest-gain counterpart (ties to the lowest counterpart index).
///
/// `gains` is K×L with users on rows.
pub fn affiliate_by_best_gain(
    anchors: &ClusterAssignment,
    gains: &GainMatrix,
    anchor: Anchor,
) -> Vec<usize> {
    match anchor {
        Anchor::Users => (0..gains.ncols())
            .map(|l| anchors.labels[argmax(gains.column(l).iter().copied())])
            .collect(),
        Anchor::Aps => (0..gains.nrows())
            .map(|k| anchors.labels[argmax(gains.row(k).iter().copied())])
            .collect(),
    }
}

/// Index of the largest value, first one on ties.
pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    best
}
