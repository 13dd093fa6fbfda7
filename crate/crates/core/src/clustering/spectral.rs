use nalgebra::{DMatrix, SymmetricEigen};

use super::{check_cluster_count, kmeans_cluster, ClusterAssignment, DissimilarityMatrix};
use crate::error::{Error, Result};

/// Normalized spectral clustering (Ng-Jordan-Weiss).
///
/// Similarities are `w = 1 - s/2` with a zero diagonal. The `m` eigenvectors of
/// `I - D^-1/2 W D^-1/2` with the smallest eigenvalues form a K×m embedding
/// whose rows are normalized to unit length and clustered with k-means.
pub fn spectral_cluster(
    dist: &DissimilarityMatrix,
    m: usize,
    seed: u64,
) -> Result<ClusterAssignment> {
    let n = dist.len();
    check_cluster_count(m, n)?;
    let w = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            1.0 - dist.get(i, j) / 2.0
        }
    });
    let degree: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    if n > 1 {
        if let Some(i) = degree.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::invalid(format!(
                "vertex {i} is isolated in the similarity graph"
            )));
        }
    }
    if m == 1 {
        return Ok(ClusterAssignment {
            labels: vec![0; n],
            m: 1,
        });
    }
    let inv_sqrt: Vec<f64> = degree.iter().map(|d| 1.0 / d.sqrt()).collect();
    let laplacian = DMatrix::from_fn(n, n, |i, j| {
        let identity = if i == j { 1.0 } else { 0.0 };
        identity - inv_sqrt[i] * w[(i, j)] * inv_sqrt[j]
    });
    let eig = SymmetricEigen::new(laplacian);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });

    let mut embedding = DMatrix::zeros(n, m);
    for (c, &e) in order.iter().take(m).enumerate() {
        let v = eig.eigenvectors.column(e);
        // fix the sign so the largest-magnitude entry is positive
        let pivot = v
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            embedding[(r, c)] = sign * v[r];
        }
    }
    for r in 0..n {
        let norm = embedding.row(r).norm();
        if norm > 0.0 {
            embedding.row_mut(r).unscale_mut(norm);
        }
    }
    kmeans_cluster(&embedding, m, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive normalized-cut minimizer over 2-partitions.
    fn best_ncut(dist: &DissimilarityMatrix) -> Vec<usize> {
        let n = dist.len();
        let w = |i: usize, j: usize| {
            if i == j {
                0.0
            } else {
                1.0 - dist.get(i, j) / 2.0
            }
        };
        let mut best = (f64::INFINITY, 0u32);
        for mask in 1..(1u32 << (n - 1)) {
            let side = |i: usize| (mask >> i) & 1;
            let (mut cut, mut vol_a, mut vol_b) = (0.0, 0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let v = w(i, j);
                    if side(i) == 1 {
                        vol_a += v;
                    } else {
                        vol_b += v;
                    }
                    if side(i) == 1 && side(j) == 0 {
                        cut += v;
                    }
                }
            }
            let ncut = cut / vol_a + cut / vol_b;
            if ncut < best.0 {
                best = (ncut, mask);
            }
        }
        let raw: Vec<usize> = (0..n).map(|i| ((best.1 >> i) & 1) as usize).collect();
        ClusterAssignment::from_raw_labels(&raw).labels
    }

    fn blocks(assign: &[usize]) -> DissimilarityMatrix {
        DissimilarityMatrix::from_fn(assign.len(), |i, j| {
            let base = if assign[i] == assign[j] { 0.05 } else { 1.9 };
            base + 0.01 * ((i * 31 + j * 17) % 5) as f64
        })
        .unwrap()
    }

    #[test]
    fn recovers_two_blocks() {
        let truth = [0, 1, 0, 0, 1, 1, 0, 1];
        let d = blocks(&truth);
        let a = spectral_cluster(&d, 2, 4).unwrap();
        assert_eq!(a.labels, best_ncut(&d));
        assert_eq!(a.labels, ClusterAssignment::from_raw_labels(&truth).labels);
    }

    #[test]
    fn exact_block_diagonal() {
        let truth = [0, 0, 0, 1, 1, 1];
        let d =
            DissimilarityMatrix::from_fn(6, |i, j| if truth[i] == truth[j] { 0.0 } else { 2.0 })
                .unwrap();
        assert_eq!(spectral_cluster(&d, 2, 0).unwrap().labels, truth.to_vec());
    }

    #[test]
    fn m_equals_k_gives_singletons() {
        let d = blocks(&[0, 1, 0, 1, 0]);
        let a = spectral_cluster(&d, 5, 2).unwrap();
        assert_eq!(a.labels, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn permutation_equivariance() {
        let truth = [0, 1, 2, 0, 1, 2, 0, 1, 2];
        let d = blocks(&truth);
        let perm = [4, 8, 0, 3, 7, 1, 6, 2, 5];
        let a = spectral_cluster(&d, 3, 11).unwrap();
        let b = spectral_cluster(&d.permuted(&perm), 3, 11).unwrap();
        let permuted_a: Vec<usize> = perm.iter().map(|&p| a.labels[p]).collect();
        assert_eq!(
            ClusterAssignment::from_raw_labels(&permuted_a).labels,
            b.labels
        );
    }

    #[test]
    fn isolated_vertex_rejected() {
        // vertex 0 is at maximal distance from everyone, so its degree is 0
        let d = DissimilarityMatrix::from_fn(3, |i, _| if i == 0 { 2.0 } else { 0.5 }).unwrap();
        assert!(matches!(
            spectral_cluster(&d, 2, 0),
            Err(Error::InvalidArgument(_))
        ));
    }
}
