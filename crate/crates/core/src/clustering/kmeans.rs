use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{check_cluster_count, ClusterAssignment};
use crate::error::Result;
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansOptions {
    pub n_restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            n_restarts: 8,
            max_iter: 100,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignment: ClusterAssignment,
    /// m×dim centroids, rows indexed by the final (renumbered) labels.
    pub centroids: DMatrix<f64>,
    /// Within-cluster sum of squared Euclidean distances.
    pub cost: f64,
}

/// Lloyd's k-means with k-means++ seeding, best of several restarts.
pub fn kmeans_cluster(features: &DMatrix<f64>, m: usize, seed: u64) -> Result<ClusterAssignment> {
    Ok(kmeans_cluster_with(features, m, seed, KMeansOptions::default())?.assignment)
}

pub fn kmeans_cluster_with(
    features: &DMatrix<f64>,
    m: usize,
    seed: u64,
    opts: KMeansOptions,
) -> Result<KMeansResult> {
    let n = features.nrows();
    check_cluster_count(m, n)?;
    let points = Points::new(features);
    let mut rng = stream(seed);
    let mut best: Option<(Vec<usize>, Vec<f64>, f64)> = None;
    for _ in 0..opts.n_restarts.max(1) {
        let (labels, centroids, cost) = lloyd(&points, m, &mut rng, &opts);
        if best.as_ref().is_none_or(|b| cost < b.2) {
            best = Some((labels, centroids, cost));
        }
    }
    let (labels, centroids, cost) = best.expect("at least one restart");
    let assignment = ClusterAssignment::from_raw_labels(&labels);
    // reorder centroid rows to the renumbered labels
    let dim = points.dim;
    let mut order = vec![usize::MAX; m];
    for (&raw, &new) in labels.iter().zip(&assignment.labels) {
        order[new] = raw;
    }
    let centroids = DMatrix::from_fn(m, dim, |r, c| centroids[order[r] * dim + c]);
    Ok(KMeansResult {
        assignment,
        centroids,
        cost,
    })
}

struct Points {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Points {
    fn new(features: &DMatrix<f64>) -> Self {
        let (n, dim) = features.shape();
        let mut data = Vec::with_capacity(n * dim);
        for i in 0..n {
            data.extend(features.row(i).iter());
        }
        Self { n, dim, data }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_init(points: &Points, m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = points.n;
    let mut chosen = Vec::with_capacity(m);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), points.row(chosen[0])))
        .collect();
    while chosen.len() < m {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    if target < w {
                        pick = i;
                        break;
                    }
                    target -= w;
                }
            }
            // guard against rounding landing on a zero-weight tail
            while d2[pick] == 0.0 {
                pick -= 1;
            }
            pick
        } else {
            // all remaining points coincide with a center; take any unchosen one
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen.push(next);
        for (i, w) in d2.iter_mut().enumerate() {
            *w = w.min(sq_dist(points.row(i), points.row(next)));
        }
    }
    chosen
        .iter()
        .flat_map(|&c| points.row(c).iter().copied())
        .collect()
}

fn nearest(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.chunks_exact(dim).enumerate() {
        let d = sq_dist(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn lloyd(
    points: &Points,
    m: usize,
    rng: &mut ChaCha8Rng,
    opts: &KMeansOptions,
) -> (Vec<usize>, Vec<f64>, f64) {
    let (n, dim) = (points.n, points.dim);
    let mut centroids = plus_plus_init(points, m, rng);
    let mut labels = vec![0usize; n];
    let mut dists = vec![0.0; n];
    for iter in 0..opts.max_iter.max(1) {
        let mut changed = iter == 0;
        for i in 0..n {
            let (c, d) = nearest(points.row(i), &centroids, dim);
            if c != labels[i] {
                changed = true;
                labels[i] = c;
            }
            dists[i] = d;
        }
        fill_empty_clusters(&mut labels, &mut dists, m);

        let mut next = vec![0.0; m * dim];
        let mut counts = vec![0usize; m];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (acc, x) in next[labels[i] * dim..(labels[i] + 1) * dim]
                .iter_mut()
                .zip(points.row(i))
            {
                *acc += x;
            }
        }
        for (c, chunk) in next.chunks_exact_mut(dim).enumerate() {
            for x in chunk.iter_mut() {
                *x /= counts[c] as f64;
            }
        }
        let shift = centroids
            .chunks_exact(dim)
            .zip(next.chunks_exact(dim))
            .map(|(a, b)| sq_dist(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift < opts.tol || !changed {
            break;
        }
    }
    let cost = (0..n)
        .map(|i| {
            sq_dist(
                points.row(i),
                &centroids[labels[i] * dim..(labels[i] + 1) * dim],
            )
        })
        .sum();
    (labels, centroids, cost)
}

/// Moves the worst-fitting point of a multi-member cluster into each empty cluster.
fn fill_empty_clusters(labels: &mut [usize], dists: &mut [f64], m: usize) {
    loop {
        let mut counts = vec![0usize; m];
        for &l in labels.iter() {
            counts[l] += 1;
        }
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let mut worst = None;
        for i in 0..labels.len() {
            if counts[labels[i]] > 1 && worst.is_none_or(|w: usize| dists[i] > dists[w]) {
                worst = Some(i);
            }
        }
        let w = worst.expect("m <= n guarantees a donor cluster");
        labels[w] = empty;
        dists[w] = 0.0;
    }
}
