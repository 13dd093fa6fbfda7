//! Subnetwork formation.
//!
//! Every algorithm here maps a K×L large-scale gain matrix to a [`Partition`]:
//! disjoint (AP set, user set) pairs covering all users. The AP-selection
//! algorithms activate only part of the AP pool; the baselines keep every AP on.

use std::cell::OnceCell;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::clustering::{
    affiliate_by_best_gain, argmax, cosine_distance_matrix, kmeans_cluster, kmeans_cluster_with,
    spectral_cluster, Anchor, ClusterAssignment, Dendrogram, DissimilarityMatrix, KMeansOptions,
};
use crate::error::{Error, Result};
use crate::scenario::{gains_db, GainMatrix};

/// Slack used when flooring `K_m * lambda`, so that e.g. `20 * 1.15` counts as 23.
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Subnetwork {
    pub ap_indices: Vec<usize>,
    pub user_indices: Vec<usize>,
}

impl Subnetwork {
    pub fn num_aps(&self) -> usize {
        self.ap_indices.len()
    }

    pub fn num_users(&self) -> usize {
        self.user_indices.len()
    }

    /// Joint zero-forcing needs at least as many APs as users.
    pub fn zf_feasible(&self) -> bool {
        self.num_aps() >= self.num_users()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub subnetworks: Vec<Subnetwork>,
    pub active_ap_count: usize,
}

impl Partition {
    pub fn new(mut subnetworks: Vec<Subnetwork>) -> Self {
        for s in &mut subnetworks {
            s.ap_indices.sort_unstable();
            s.user_indices.sort_unstable();
        }
        let active_ap_count = subnetworks.iter().map(Subnetwork::num_aps).sum();
        Self {
            subnetworks,
            active_ap_count,
        }
    }

    /// Builds `m` subnetworks from per-user labels and optional per-AP labels
    /// (`None` leaves the AP switched off).
    pub fn from_labels(m: usize, user_labels: &[usize], ap_labels: &[Option<usize>]) -> Self {
        let mut subnetworks = vec![Subnetwork::default(); m];
        for (k, &c) in user_labels.iter().enumerate() {
            subnetworks[c].user_indices.push(k);
        }
        for (l, c) in ap_labels.iter().enumerate() {
            if let Some(c) = c {
                subnetworks[*c].ap_indices.push(l);
            }
        }
        Self::new(subnetworks)
    }

    pub fn len(&self) -> usize {
        self.subnetworks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subnetworks.is_empty()
    }

    /// Subnetwork index of every user (`None` for uncovered users).
    pub fn user_membership(&self, k: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; k];
        for (m, s) in self.subnetworks.iter().enumerate() {
            for &u in &s.user_indices {
                if u < k {
                    out[u] = Some(m);
                }
            }
        }
        out
    }
}

/// Outcome of [`validate_partition`]; every flag is `true` when the check passes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub indices_in_range: bool,
    pub aps_disjoint: bool,
    pub users_disjoint: bool,
    pub users_covered: bool,
    pub active_count_consistent: bool,
    /// Per subnetwork: `L_m >= K_m`.
    pub zf_feasible: Vec<bool>,
}

impl PartitionReport {
    pub fn structurally_valid(&self) -> bool {
        self.indices_in_range
            && self.aps_disjoint
            && self.users_disjoint
            && self.users_covered
            && self.active_count_consistent
    }

    pub fn all_zf_feasible(&self) -> bool {
        self.zf_feasible.iter().all(|&f| f)
    }

    pub fn is_valid(&self) -> bool {
        self.structurally_valid() && self.all_zf_feasible()
    }
}

pub fn validate_partition(p: &Partition, k: usize, l: usize) -> PartitionReport {
    let mut ap_seen = vec![0usize; l];
    let mut user_seen = vec![0usize; k];
    let mut in_range = true;
    for s in &p.subnetworks {
        for &a in &s.ap_indices {
            match ap_seen.get_mut(a) {
                Some(c) => *c += 1,
                None => in_range = false,
            }
        }
        for &u in &s.user_indices {
            match user_seen.get_mut(u) {
                Some(c) => *c += 1,
                None => in_range = false,
            }
        }
    }
    let active: usize = p.subnetworks.iter().map(Subnetwork::num_aps).sum();
    PartitionReport {
        indices_in_range: in_range,
        aps_disjoint: ap_seen.iter().all(|&c| c <= 1),
        users_disjoint: user_seen.iter().all(|&c| c <= 1),
        users_covered: user_seen.iter().all(|&c| c >= 1),
        active_count_consistent: active == p.active_ap_count && active <= l,
        zf_feasible: p.subnetworks.iter().map(Subnetwork::zf_feasible).collect(),
    }
}

/// How users are grouped before APs are attached by best gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UserClustering {
    Agglomerative,
    KMeans,
    Spectral,
}

/// Networking algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    /// Agglomerative user clustering plus ratio-capped greedy AP assignment.
    UcrApSel,
    /// Agglomerative user clustering plus global top-`lambda K` AP selection.
    UcApSel,
    /// Agglomerative AP clustering, users follow their best AP.
    ApCentric,
    /// K-means user clustering, APs join the nearest centroid.
    UserCentricKmeans,
    /// User/AP meganodes partitioned by spectral clustering.
    GraphPartition,
    /// User clustering with every AP attached to its best user's cluster.
    UserCentric(UserClustering),
}

impl Algorithm {
    pub const ALL_NAMED: [Algorithm; 8] = [
        Algorithm::UcrApSel,
        Algorithm::UcApSel,
        Algorithm::ApCentric,
        Algorithm::UserCentricKmeans,
        Algorithm::GraphPartition,
        Algorithm::UserCentric(UserClustering::Agglomerative),
        Algorithm::UserCentric(UserClustering::KMeans),
        Algorithm::UserCentric(UserClustering::Spectral),
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::UcrApSel => "ucr_apsel",
            Algorithm::UcApSel => "uc_apsel",
            Algorithm::ApCentric => "ap_centric",
            Algorithm::UserCentricKmeans => "user_centric_kmeans",
            Algorithm::GraphPartition => "graph_partition",
            Algorithm::UserCentric(UserClustering::Agglomerative) => "uc_agglomerative",
            Algorithm::UserCentric(UserClustering::KMeans) => "uc_kmeans",
            Algorithm::UserCentric(UserClustering::Spectral) => "uc_spectral",
        }
    }

    /// Whether the algorithm reads the AP-selection ratio.
    pub fn uses_lambda(&self) -> bool {
        matches!(self, Algorithm::UcrApSel | Algorithm::UcApSel)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL_NAMED
            .iter()
            .copied()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| Error::config(format!("unknown algorithm '{s}'")))
    }
}

/// Number of APs a subnetwork with `users` users receives at ratio `lambda`.
pub fn ap_quota(users: usize, lambda: f64) -> usize {
    (users as f64 * lambda + FLOOR_SLACK).floor() as usize
}

fn check_lambda(lambda: f64, k: usize, l: usize) -> Result<()> {
    if !(lambda > 1.0) {
        return Err(Error::invalid(format!(
            "AP-selection ratio must exceed 1, got {lambda}"
        )));
    }
    if lambda * k as f64 > l as f64 + FLOOR_SLACK {
        return Err(Error::invalid(format!(
            "AP-selection ratio {lambda} needs {} APs but only {l} are deployed",
            lambda * k as f64
        )));
    }
    Ok(())
}

fn check_subnetwork_count(m: usize, n: usize, what: &str) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::invalid(format!(
            "subnetwork count must be in [1, {n}] ({what}), got {m}"
        )));
    }
    Ok(())
}

/// Per-layout cache for partitioning.
///
/// Everything that depends only on the gain matrix (features, distance
/// matrices, dendrograms, the gain-sorted pair list) is computed on first use
/// and shared across calls, so sweeping `M`, `lambda` or the algorithm over
/// one layout pays for it once.
pub struct NetworkingContext<'a> {
    gains: &'a GainMatrix,
    features: OnceCell<DMatrix<f64>>,
    user_distances: OnceCell<Result<DissimilarityMatrix>>,
    user_dendrogram: OnceCell<Dendrogram>,
    ap_dendrogram: OnceCell<Result<Dendrogram>>,
    sorted_pairs: OnceCell<Vec<(u32, u32)>>,
}

impl<'a> NetworkingContext<'a> {
    pub fn new(gains: &'a GainMatrix) -> Self {
        Self {
            gains,
            features: OnceCell::new(),
            user_distances: OnceCell::new(),
            user_dendrogram: OnceCell::new(),
            ap_dendrogram: OnceCell::new(),
            sorted_pairs: OnceCell::new(),
        }
    }

    pub fn num_users(&self) -> usize {
        self.gains.nrows()
    }

    pub fn num_aps(&self) -> usize {
        self.gains.ncols()
    }

    /// Users' large-scale gain vectors in dB (K×L).
    pub fn features(&self) -> &DMatrix<f64> {
        self.features.get_or_init(|| gains_db(self.gains))
    }

    pub fn user_distances(&self) -> Result<&DissimilarityMatrix> {
        self.user_distances
            .get_or_init(|| cosine_distance_matrix(self.features()))
            .as_ref()
            .map_err(clone_err)
    }

    fn user_dendrogram(&self) -> Result<&Dendrogram> {
        let dist = self.user_distances()?;
        Ok(self.user_dendrogram.get_or_init(|| Dendrogram::build(dist)))
    }

    /// Agglomerative average-linkage clustering of users on cosine distance.
    pub fn user_clusters(&self, m: usize) -> Result<ClusterAssignment> {
        check_subnetwork_count(m, self.num_users(), "users")?;
        self.user_dendrogram()?.cut(m)
    }

    fn ap_dendrogram(&self) -> Result<&Dendrogram> {
        self.ap_dendrogram
            .get_or_init(|| {
                let ap_features = self.features().transpose();
                cosine_distance_matrix(&ap_features).map(|d| Dendrogram::build(&d))
            })
            .as_ref()
            .map_err(clone_err)
    }

    /// All (AP, user) pairs by descending gain; ties by AP index, then user index.
    fn sorted_pairs(&self) -> &[(u32, u32)] {
        self.sorted_pairs.get_or_init(|| {
            let (k, l) = self.gains.shape();
            let mut pairs: Vec<(f64, u32, u32)> = Vec::with_capacity(k * l);
            for li in 0..l {
                for ki in 0..k {
                    pairs.push((self.gains[(ki, li)], li as u32, ki as u32));
                }
            }
            pairs.sort_unstable_by(|a, b| {
                b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
            });
            pairs.into_iter().map(|(_, li, ki)| (li, ki)).collect()
        })
    }

    pub fn ucr_apsel(&self, m: usize, lambda: f64) -> Result<Partition> {
        Ok(self.ucr_apsel_trace(m, lambda)?.0)
    }

    /// UCR-ApSel, also returning the (AP, user) pairs in assignment order.
    pub fn ucr_apsel_trace(
        &self,
        m: usize,
        lambda: f64,
    ) -> Result<(Partition, Vec<(usize, usize)>)> {
        let (k, l) = self.gains.shape();
        check_lambda(lambda, k, l)?;
        let users = self.user_clusters(m)?;
        let quota: Vec<usize> = users.sizes().iter().map(|&s| ap_quota(s, lambda)).collect();
        let mut remaining: usize = quota.iter().sum();
        let mut filled = vec![0usize; m];
        let mut eligible = vec![true; m];
        let mut taken = vec![false; l];
        let mut ap_labels = vec![None; l];
        let mut trace = Vec::with_capacity(remaining);

        // Walking the sorted list and skipping used APs and retired clusters
        // yields the same sequence as repeated argmax over the remaining pool.
        for &(li, ki) in self.sorted_pairs() {
            if remaining == 0 {
                break;
            }
            let (li, ki) = (li as usize, ki as usize);
            let c = users.labels[ki];
            if taken[li] || !eligible[c] {
                continue;
            }
            if filled[c] < quota[c] {
                filled[c] += 1;
                taken[li] = true;
                ap_labels[li] = Some(c);
                remaining -= 1;
                trace.push((li, ki));
            } else {
                eligible[c] = false;
            }
        }
        if remaining != 0 {
            return Err(Error::Invariant(
                "AP pool exhausted before all quotas were met".into(),
            ));
        }
        Ok((Partition::from_labels(m, &users.labels, &ap_labels), trace))
    }

    pub fn uc_apsel(&self, m: usize, lambda: f64) -> Result<Partition> {
        let (k, l) = self.gains.shape();
        check_lambda(lambda, k, l)?;
        let users = self.user_clusters(m)?;
        let selected = ap_quota(k, lambda).min(l);
        let best_user: Vec<usize> = (0..l)
            .map(|li| argmax(self.gains.column(li).iter().copied()))
            .collect();
        let mut ranking: Vec<usize> = (0..l).collect();
        ranking.sort_by(|&a, &b| {
            let ga = self.gains[(best_user[a], a)];
            let gb = self.gains[(best_user[b], b)];
            gb.total_cmp(&ga).then(a.cmp(&b))
        });
        let mut ap_labels = vec![None; l];
        for &li in &ranking[..selected] {
            ap_labels[li] = Some(users.labels[best_user[li]]);
        }
        Ok(Partition::from_labels(m, &users.labels, &ap_labels))
    }

    /// Users clustered by `method`; every AP joins its best user's cluster.
    pub fn user_centric(&self, method: UserClustering, m: usize, seed: u64) -> Result<Partition> {
        check_subnetwork_count(m, self.num_users(), "users")?;
        let users = match method {
            UserClustering::Agglomerative => self.user_clusters(m)?,
            UserClustering::KMeans => kmeans_cluster(self.features(), m, seed)?,
            UserClustering::Spectral => spectral_cluster(self.user_distances()?, m, seed)?,
        };
        let ap_labels: Vec<Option<usize>> =
            affiliate_by_best_gain(&users, self.gains, Anchor::Users)
                .into_iter()
                .map(Some)
                .collect();
        Ok(Partition::from_labels(m, &users.labels, &ap_labels))
    }

    /// APs clustered agglomeratively on their dB gain columns; users follow their best AP.
    pub fn ap_centric(&self, m: usize) -> Result<Partition> {
        check_subnetwork_count(m, self.num_aps(), "APs")?;
        let aps = self.ap_dendrogram()?.cut(m)?;
        let user_labels = affiliate_by_best_gain(&aps, self.gains, Anchor::Aps);
        let ap_labels: Vec<Option<usize>> = aps.labels.iter().copied().map(Some).collect();
        Ok(Partition::from_labels(m, &user_labels, &ap_labels))
    }

    /// K-means on users' dB vectors; each AP, represented by its best user's
    /// vector, joins the cluster with the nearest centroid.
    pub fn user_centric_kmeans(&self, m: usize, seed: u64) -> Result<Partition> {
        check_subnetwork_count(m, self.num_users(), "users")?;
        let features = self.features();
        let fit = kmeans_cluster_with(features, m, seed, KMeansOptions::default())?;
        let l = self.num_aps();
        let ap_labels: Vec<Option<usize>> = (0..l)
            .map(|li| {
                let rep = features.row(argmax(self.gains.column(li).iter().copied()));
                let mut best = (0, f64::INFINITY);
                for c in 0..m {
                    let d = (fit.centroids.row(c) - rep).norm_squared();
                    if d < best.1 {
                        best = (c, d);
                    }
                }
                Some(best.0)
            })
            .collect();
        Ok(Partition::from_labels(
            m,
            &fit.assignment.labels,
            &ap_labels,
        ))
    }

    /// Meganode graph partitioning.
    ///
    /// Users are paired with their best unclaimed AP in descending-gain order,
    /// leftover APs join the meganode of their best user, and meganodes are
    /// split by spectral clustering on the cosine distance between the mean
    /// dB gain columns of their APs.
    pub fn graph_partition(&self, m: usize, seed: u64) -> Result<Partition> {
        let (k, l) = self.gains.shape();
        check_subnetwork_count(m, k, "users")?;
        if l < k {
            return Err(Error::invalid(format!(
                "graph partitioning pairs every user with its own AP; needs L >= K, got L={l}, K={k}"
            )));
        }
        let mut meganode_of_ap = vec![usize::MAX; l];
        let mut paired = vec![false; k];
        let mut unpaired = k;
        for &(li, ki) in self.sorted_pairs() {
            if unpaired == 0 {
                break;
            }
            let (li, ki) = (li as usize, ki as usize);
            if !paired[ki] && meganode_of_ap[li] == usize::MAX {
                paired[ki] = true;
                meganode_of_ap[li] = ki;
                unpaired -= 1;
            }
        }
        for (li, owner) in meganode_of_ap.iter_mut().enumerate() {
            if *owner == usize::MAX {
                *owner = argmax(self.gains.column(li).iter().copied());
            }
        }
        let features = self.features();
        let mut mean = DMatrix::<f64>::zeros(k, k);
        let mut count = vec![0usize; k];
        for (li, &node) in meganode_of_ap.iter().enumerate() {
            count[node] += 1;
            for ki in 0..k {
                mean[(node, ki)] += features[(ki, li)];
            }
        }
        for (node, &c) in count.iter().enumerate() {
            mean.row_mut(node).unscale_mut(c as f64);
        }
        let dist = cosine_distance_matrix(&mean)?;
        let nodes = spectral_cluster(&dist, m, seed)?;
        let ap_labels: Vec<Option<usize>> = meganode_of_ap
            .iter()
            .map(|&n| Some(nodes.labels[n]))
            .collect();
        Ok(Partition::from_labels(m, &nodes.labels, &ap_labels))
    }

    /// Dispatches on the selector. `lambda` is read only by the AP-selection
    /// algorithms and `seed` only by the randomized ones.
    pub fn partition(
        &self,
        algorithm: Algorithm,
        m: usize,
        lambda: f64,
        seed: u64,
    ) -> Result<Partition> {
        match algorithm {
            Algorithm::UcrApSel => self.ucr_apsel(m, lambda),
            Algorithm::UcApSel => self.uc_apsel(m, lambda),
            Algorithm::ApCentric => self.ap_centric(m),
            Algorithm::UserCentricKmeans => self.user_centric_kmeans(m, seed),
            Algorithm::GraphPartition => self.graph_partition(m, seed),
            Algorithm::UserCentric(method) => self.user_centric(method, m, seed),
        }
    }
}

fn clone_err(e: &Error) -> Error {
    match e {
        Error::InvalidArgument(s) => Error::InvalidArgument(s.clone()),
        other => Error::Invariant(other.to_string()),
    }
}

pub fn ucr_apsel(large_scale: &GainMatrix, m: usize, lambda: f64) -> Result<Partition> {
    NetworkingContext::new(large_scale).ucr_apsel(m, lambda)
}

pub fn uc_apsel(large_scale: &GainMatrix, m: usize, lambda: f64) -> Result<Partition> {
    NetworkingContext::new(large_scale).uc_apsel(m, lambda)
}

pub fn ap_centric_partition(large_scale: &GainMatrix, m: usize) -> Result<Partition> {
    NetworkingContext::new(large_scale).ap_centric(m)
}

pub fn user_centric_kmeans_partition(
    large_scale: &GainMatrix,
    m: usize,
    seed: u64,
) -> Result<Partition> {
    NetworkingContext::new(large_scale).user_centric_kmeans(m, seed)
}

pub fn graph_partition_baseline(
    large_scale: &GainMatrix,
    m: usize,
    seed: u64,
) -> Result<Partition> {
    NetworkingContext::new(large_scale).graph_partition(m, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{
        large_scale_matrix, sample_deployment, ChannelParams, Deployment, Position,
    };
    use proptest::prelude::*;

    fn gains_for(users: &[(f64, f64)], aps: &[(f64, f64)]) -> GainMatrix {
        let dep = Deployment::from_positions(
            aps.iter().map(|&(x, y)| Position::new(x, y)).collect(),
            users.iter().map(|&(x, y)| Position::new(x, y)).collect(),
            1000.0,
        )
        .unwrap();
        large_scale_matrix(&dep, &ChannelParams::default(), 0).unwrap()
    }

    fn random_gains(k: usize, l: usize, seed: u64) -> GainMatrix {
        let dep = sample_deployment(k, l, 1000.0, seed).unwrap();
        large_scale_matrix(&dep, &ChannelParams::default(), 0).unwrap()
    }

    #[test]
    fn ucr_apsel_hand_trace() {
        let g = gains_for(
            &[(-100.0, 0.0), (100.0, 0.0)],
            &[(-90.0, 0.0), (-110.0, 0.0), (90.0, 0.0), (500.0, 0.0)],
        );
        let p = ucr_apsel(&g, 2, 2.0).unwrap();
        assert_eq!(
            p.subnetworks[0],
            Subnetwork {
                ap_indices: vec![0, 1],
                user_indices: vec![0]
            }
        );
        assert_eq!(
            p.subnetworks[1],
            Subnetwork {
                ap_indices: vec![2, 3],
                user_indices: vec![1]
            }
        );
        assert_eq!(p.active_ap_count, 4);
    }

    #[test]
    fn ucr_apsel_full_supply_single_subnetwork() {
        let g = random_gains(10, 25, 3);
        let p = ucr_apsel(&g, 1, 2.5).unwrap();
        assert_eq!(p.subnetworks[0].num_users(), 10);
        assert_eq!(p.subnetworks[0].num_aps(), 25);
    }

    #[test]
    fn ucr_apsel_rejects_bad_lambda() {
        let g = random_gains(10, 20, 3);
        assert!(matches!(
            ucr_apsel(&g, 2, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            ucr_apsel(&g, 2, 2.1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            ucr_apsel(&g, 11, 1.5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(ucr_apsel(&g, 2, 2.0).is_ok());
    }

    #[test]
    fn quota_floor_is_robust() {
        assert_eq!(ap_quota(20, 1.15), 23);
        assert_eq!(ap_quota(10, 1.1), 11);
        assert_eq!(ap_quota(7, 1.5), 10);
        // floor(K_m (1 + lambda)) - K_m == floor(K_m lambda)
        for km in 1..60 {
            for step in 1..=40 {
                let lambda = 1.0 + step as f64 * 0.05;
                let lhs = (km as f64 * (1.0 + lambda) + FLOOR_SLACK).floor() as usize - km;
                assert_eq!(lhs, ap_quota(km, lambda));
            }
        }
    }

    #[test]
    fn uc_apsel_selection_count_and_single_cluster_match() {
        let g = random_gains(30, 80, 8);
        let p = uc_apsel(&g, 4, 1.5).unwrap();
        assert_eq!(p.active_ap_count, 45);
        let a = uc_apsel(&g, 1, 1.5).unwrap();
        let b = ucr_apsel(&g, 1, 1.5).unwrap();
        assert_eq!(a.subnetworks[0].ap_indices, b.subnetworks[0].ap_indices);
    }

    #[test]
    fn uc_apsel_can_starve_a_subnetwork() {
        // Two user groups far apart; the strongest APs all sit next to the first
        // group and the second group only has a few distant ones.
        let users = [
            (-500.0, 0.0),
            (-505.0, 3.0),
            (-498.0, -4.0),
            (500.0, 0.0),
            (503.0, 2.0),
        ];
        let mut aps: Vec<(f64, f64)> = (0..7).map(|i| (-510.0 + 2.0 * i as f64, 5.0)).collect();
        aps.extend([(300.0, 0.0), (320.0, 40.0), (280.0, -30.0)]);
        let g = gains_for(&users, &aps);
        let uc = uc_apsel(&g, 2, 1.2).unwrap();
        let report = validate_partition(&uc, 5, 10);
        assert!(report.structurally_valid());
        assert!(!report.all_zf_feasible());
        let starving = uc
            .subnetworks
            .iter()
            .find(|s| s.user_indices.contains(&3))
            .unwrap();
        assert_eq!(starving.num_aps(), 0, "{uc:?}");

        let ucr = ucr_apsel(&g, 2, 1.2).unwrap();
        assert!(validate_partition(&ucr, 5, 10).is_valid());
    }

    #[test]
    fn ap_centric_basics() {
        let g = random_gains(20, 40, 2);
        let one = ap_centric_partition(&g, 1).unwrap();
        assert_eq!(one.subnetworks[0].num_aps(), 40);
        assert_eq!(one.subnetworks[0].num_users(), 20);
        let p = ap_centric_partition(&g, 5).unwrap();
        assert_eq!(p.active_ap_count, 40);
        assert!(validate_partition(&p, 20, 40).structurally_valid());
    }

    fn two_clouds(k_per: usize, l_per: usize, seed: u64) -> (GainMatrix, Vec<usize>) {
        // clouds of radius 50 m centered at (+-600, 0)
        let left = sample_deployment(k_per, l_per, 50.0, seed).unwrap();
        let right = sample_deployment(k_per, l_per, 50.0, seed + 1).unwrap();
        let shift = |p: &Position, dx: f64| Position::new(p.x + dx, p.y);
        let users: Vec<Position> = left
            .user_positions
            .iter()
            .map(|p| shift(p, -600.0))
            .chain(right.user_positions.iter().map(|p| shift(p, 600.0)))
            .collect();
        let aps: Vec<Position> = left
            .ap_positions
            .iter()
            .map(|p| shift(p, -600.0))
            .chain(right.ap_positions.iter().map(|p| shift(p, 600.0)))
            .collect();
        let dep = Deployment::from_positions(aps, users, 1000.0).unwrap();
        let truth = (0..2 * k_per).map(|i| i / k_per).collect();
        (
            large_scale_matrix(&dep, &ChannelParams::default(), 0).unwrap(),
            truth,
        )
    }

    fn splits_geographically(p: &Partition, k_per: usize, l_per: usize) -> bool {
        p.subnetworks.iter().all(|s| {
            let left_users = s.user_indices.iter().all(|&u| u < k_per);
            let right_users = s.user_indices.iter().all(|&u| u >= k_per);
            let left_aps = s.ap_indices.iter().all(|&a| a < l_per);
            let right_aps = s.ap_indices.iter().all(|&a| a >= l_per);
            (left_users && left_aps) || (right_users && right_aps)
        })
    }

    #[test]
    fn baselines_split_two_clouds() {
        let (g, _) = two_clouds(6, 12, 40);
        for p in [
            ap_centric_partition(&g, 2).unwrap(),
            user_centric_kmeans_partition(&g, 2, 1).unwrap(),
            graph_partition_baseline(&g, 2, 1).unwrap(),
            ucr_apsel(&g, 2, 1.5).unwrap(),
        ] {
            assert!(splits_geographically(&p, 6, 12), "{p:?}");
            assert!(p.subnetworks.iter().all(|s| s.num_users() == 6));
        }
    }

    #[test]
    fn kmeans_baseline_deterministic_and_single() {
        let g = random_gains(25, 60, 17);
        assert_eq!(
            user_centric_kmeans_partition(&g, 4, 3).unwrap(),
            user_centric_kmeans_partition(&g, 4, 3).unwrap()
        );
        let one = user_centric_kmeans_partition(&g, 1, 3).unwrap();
        assert_eq!(one.subnetworks.len(), 1);
        assert_eq!(one.active_ap_count, 60);
    }

    #[test]
    fn graph_partition_meganodes() {
        // M = K = L with a clean one-to-one pairing: singletons.
        let users = [(-500.0, 0.0), (0.0, 0.0), (500.0, 0.0)];
        let aps = [(-490.0, 0.0), (10.0, 0.0), (510.0, 0.0)];
        let g = gains_for(&users, &aps);
        let p = graph_partition_baseline(&g, 3, 0).unwrap();
        for s in &p.subnetworks {
            assert_eq!(s.num_users(), 1);
            assert_eq!(s.num_aps(), 1);
            assert!(s.ap_indices[0] == s.user_indices[0]);
        }
        let g = random_gains(10, 5, 1);
        assert!(graph_partition_baseline(&g, 2, 0).is_err());
    }

    #[test]
    fn validation_flags_violations() {
        let shared = Partition::new(vec![
            Subnetwork {
                ap_indices: vec![0, 1],
                user_indices: vec![0],
            },
            Subnetwork {
                ap_indices: vec![1, 2],
                user_indices: vec![1],
            },
        ]);
        let r = validate_partition(&shared, 2, 3);
        assert!(!r.aps_disjoint);
        assert!(r.users_covered);

        let thin = Partition::new(vec![Subnetwork {
            ap_indices: vec![0],
            user_indices: vec![0, 1],
        }]);
        let r = validate_partition(&thin, 2, 3);
        assert!(r.structurally_valid());
        assert_eq!(r.zf_feasible, vec![false]);

        let uncovered = Partition::new(vec![Subnetwork {
            ap_indices: vec![0],
            user_indices: vec![0],
        }]);
        assert!(!validate_partition(&uncovered, 2, 3).users_covered);
    }

    #[test]
    fn selector_round_trip() {
        for a in Algorithm::ALL_NAMED {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!(matches!(
            "louvain".parse::<Algorithm>(),
            Err(Error::Config(_))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ucr_apsel_quota_invariants(
            k in 2usize..40,
            extra in 0usize..60,
            m_frac in 0.0f64..1.0,
            lam_frac in 0.01f64..1.0,
            seed in any::<u64>(),
        ) {
            let l = 2 * k + extra;
            let m = 1 + ((k - 1) as f64 * m_frac) as usize;
            let lambda = 1.0 + (l as f64 / k as f64 - 1.0) * lam_frac;
            let g = random_gains(k, l, seed);
            let ctx = NetworkingContext::new(&g);
            let (p, trace) = ctx.ucr_apsel_trace(m, lambda).unwrap();
            let report = validate_partition(&p, k, l);
            prop_assert!(report.is_valid());
            let mut used = 0;
            for s in &p.subnetworks {
                let km = s.num_users();
                prop_assert_eq!(s.num_aps(), ap_quota(km, lambda));
                let ratio = s.num_aps() as f64 / km as f64;
                prop_assert!(ratio <= lambda + 1e-9 && ratio >= lambda - 1.0 / km as f64 - 1e-9);
                used += s.num_aps();
            }
            prop_assert!(used <= ap_quota(k, lambda) && used <= l);
            let gains: Vec<f64> = trace.iter().map(|&(li, ki)| g[(ki, li)]).collect();
            prop_assert!(gains.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
