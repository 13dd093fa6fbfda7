use super::{check_cluster_count, ClusterAssignment, DissimilarityMatrix};
use crate::error::Result;

/// One agglomeration step: cluster `absorbed` is merged into `kept`.
///
/// Clusters are identified by their smallest member index, so `kept < absorbed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub kept: usize,
    pub absorbed: usize,
    pub distance: f64,
}

/// The full average-linkage merge sequence over `n` points.
///
/// The greedy sequence does not depend on the target number of clusters, so a
/// single dendrogram can be cut at any `m`.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    /// Runs average-linkage agglomeration to a single cluster.
    ///
    /// Linkage distances are maintained with the Lance-Williams update
    /// `d(a+b, x) = (|a| d(a, x) + |b| d(b, x)) / (|a| + |b|)`. At each step the
    /// closest pair is merged; ties go to the pair with the lowest smaller
    /// index, then the lowest larger index.
    pub fn build(dist: &DissimilarityMatrix) -> Self {
        let n = dist.len();
        let mut d: Vec<f64> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                d.push(dist.get(i, j));
            }
        }
        let mut active = vec![true; n];
        let mut size = vec![1usize; n];
        let mut nn = vec![usize::MAX; n];
        let mut nn_d = vec![f64::INFINITY; n];

        let nearest = |d: &[f64], active: &[bool], i: usize| -> (usize, f64) {
            let mut best = (usize::MAX, f64::INFINITY);
            let row = &d[i * n..(i + 1) * n];
            for (j, &v) in row.iter().enumerate() {
                if j != i && active[j] && v < best.1 {
                    best = (j, v);
                }
            }
            best
        };

        for i in 0..n {
            (nn[i], nn_d[i]) = nearest(&d, &active, i);
        }

        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        for _ in 1..n {
            // First row (lowest index) attaining the global minimum.
            let mut i = usize::MAX;
            let mut best = f64::INFINITY;
            for r in 0..n {
                if active[r] && nn[r] != usize::MAX && (i == usize::MAX || nn_d[r] < best) {
                    i = r;
                    best = nn_d[r];
                }
            }
            let j = nn[i];
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            merges.push(Merge {
                kept: a,
                absorbed: b,
                distance: best,
            });

            let (sa, sb) = (size[a] as f64, size[b] as f64);
            for x in 0..n {
                if active[x] && x != a && x != b {
                    let v = (sa * d[a * n + x] + sb * d[b * n + x]) / (sa + sb);
                    d[a * n + x] = v;
                    d[x * n + a] = v;
                }
            }
            active[b] = false;
            size[a] += size[b];
            nn[b] = usize::MAX;

            for x in 0..n {
                if !active[x] {
                    continue;
                }
                if x == a || nn[x] == a || nn[x] == b {
                    (nn[x], nn_d[x]) = nearest(&d, &active, x);
                } else {
                    let v = d[x * n + a];
                    if v < nn_d[x] || (v == nn_d[x] && a < nn[x]) {
                        nn[x] = a;
                        nn_d[x] = v;
                    }
                }
            }
        }
        Self { n, merges }
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Replays merges until `m` clusters remain.
    pub fn cut(&self, m: usize) -> Result<ClusterAssignment> {
        check_cluster_count(m, self.n)?;
        let mut owner: Vec<usize> = (0..self.n).collect();
        for merge in &self.merges[..self.n - m] {
            for o in owner.iter_mut() {
                if *o == merge.absorbed {
                    *o = merge.kept;
                }
            }
        }
        Ok(ClusterAssignment::from_raw_labels(&owner))
    }
}

/// Average-linkage agglomerative clustering into exactly `m` clusters.
pub fn agglomerative_cluster(dist: &DissimilarityMatrix, m: usize) -> Result<ClusterAssignment> {
    check_cluster_count(m, dist.len())?;
    Dendrogram::build(dist).cut(m)
}
