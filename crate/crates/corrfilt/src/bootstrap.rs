//! Row-resampling bootstrap: replica generation, bootstrap values for
//! dendrogram nodes (fraction of replicas preserving the node's exact
//! leaf set) and for graph links (fraction of replicas whose graph keeps
//! the link), and threshold-based dendrogram reduction.
//!
//! Every replica draws its rows from a ChaCha stream derived from
//! (seed, replica index), so results do not depend on evaluation order
//! and are bit-reproducible for a fixed seed.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CorrError, Result};
use crate::hclust::{self, DendroNode, Dendrogram, Linkage};
use crate::linalg::{pearson_correlation, DataMatrix, Matrix};
use crate::networks::{self, GraphKind};
use crate::Scalar;

/// Bootstrap settings: replica count, base seed and the node-retention
/// threshold used by dendrogram reduction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicas: usize,
    pub seed: u64,
    pub threshold: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicas: 1000,
            seed: 0,
            threshold: 0.70,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(CorrError::InsufficientReplicas {
                needed: 1,
                got: self.replicas,
            });
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(CorrError::InvalidParameter(format!(
                "bootstrap threshold must lie in [0, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }

    /// Independent RNG stream for one replica.
    pub fn replica_rng(&self, replica: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replica.wrapping_add(1));
        rng
    }
}

/// Bootstrap values for the internal nodes of a dendrogram, aligned with
/// its `nodes()` order. Values are fractions out of `replicas`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeSupport {
    pub values: Vec<f64>,
    pub replicas: usize,
}

/// Resample T rows with replacement. Retries up to 100 times if a column
/// of the replica comes out constant, then fails with `DegenerateReplica`.
pub fn bootstrap_replica<T: Scalar, R: Rng + ?Sized>(
    data: &DataMatrix<T>,
    rng: &mut R,
) -> Result<DataMatrix<T>> {
    const MAX_RETRIES: usize = 100;
    let t = data.n_rows();
    let n = data.n_cols();
    for _ in 0..=MAX_RETRIES {
        let mut values = Matrix::zeros(t, n);
        for r in 0..t {
            let src = rng.gen_range(0..t);
            for j in 0..n {
                values[(r, j)] = data.values()[(src, j)];
            }
        }
        match DataMatrix::new(values, data.column_labels().to_vec()) {
            Ok(replica) => return Ok(replica),
            Err(CorrError::ZeroVarianceColumn(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    // Report the first offending column of a fresh draw for the message.
    let column = data.column_labels().first().cloned().unwrap_or_default();
    Err(CorrError::DegenerateReplica {
        column,
        retries: MAX_RETRIES,
    })
}

/// Canonical bitset of a leaf set, used to compare branches between trees.
fn leaf_bitset(leaves: &[usize], n: usize) -> Vec<u64> {
    let mut words = vec![0u64; n.div_ceil(64)];
    for &l in leaves {
        words[l / 64] |= 1 << (l % 64);
    }
    words
}

/// Bootstrap value per internal node of the clustering of `data`: the
/// fraction of replicas whose dendrogram contains a node with exactly the
/// same leaf set.
pub fn node_bootstrap_values<T: Scalar>(
    data: &DataMatrix<T>,
    method: Linkage,
    cfg: &BootstrapConfig,
) -> Result<NodeSupport> {
    cfg.validate()?;
    let c = pearson_correlation(data)?;
    let (base, _) = hclust::cluster(&c, method)?;
    let n = base.n_leaves();
    let base_sets: Vec<Vec<u64>> = base
        .leaf_sets()
        .iter()
        .map(|s| leaf_bitset(s, n))
        .collect();
    let mut counts = vec![0usize; base_sets.len()];
    for rep in 0..cfg.replicas {
        let mut rng = cfg.replica_rng(rep as u64);
        let replica = bootstrap_replica(data, &mut rng)?;
        let rc = pearson_correlation(&replica)?;
        let (tree, _) = hclust::cluster(&rc, method)?;
        let replica_sets: HashSet<Vec<u64>> = tree
            .leaf_sets()
            .iter()
            .map(|s| leaf_bitset(s, n))
            .collect();
        for (count, set) in counts.iter_mut().zip(&base_sets) {
            if replica_sets.contains(set) {
                *count += 1;
            }
        }
    }
    Ok(NodeSupport {
        values: counts
            .into_iter()
            .map(|c| c as f64 / cfg.replicas as f64)
            .collect(),
        replicas: cfg.replicas,
    })
}

/// Bootstrap value per link of the correlation-based graph of `data`: the
/// fraction of replicas whose graph of the same kind keeps the link.
/// Values are aligned with the edge order of the base graph.
pub fn link_bootstrap_values<T: Scalar>(
    data: &DataMatrix<T>,
    kind: GraphKind,
    cfg: &BootstrapConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let c = pearson_correlation(data)?;
    let (base, _) = networks::build(&c, kind)?;
    let base_edges: Vec<(usize, usize)> = base
        .edges
        .iter()
        .map(|e| (e.i.min(e.j), e.i.max(e.j)))
        .collect();
    let mut counts = vec![0usize; base_edges.len()];
    for rep in 0..cfg.replicas {
        let mut rng = cfg.replica_rng(rep as u64);
        let replica = bootstrap_replica(data, &mut rng)?;
        let rc = pearson_correlation(&replica)?;
        let (g, _) = networks::build(&rc, kind)?;
        let present: HashSet<(usize, usize)> = g.edge_set().into_iter().collect();
        for (count, e) in counts.iter_mut().zip(&base_edges) {
            if present.contains(e) {
                *count += 1;
            }
        }
    }
    Ok(counts
        .into_iter()
        .map(|c| c as f64 / cfg.replicas as f64)
        .collect())
}

/// Merge every node whose bootstrap value is below `b` into its first
/// ancestor at or above `b` (the root always survives). Surviving nodes
/// keep their merge correlations; the result is non-binary in general.
pub fn reduce_dendrogram<T: Scalar>(
    d: &Dendrogram<T>,
    support: &NodeSupport,
    b: f64,
) -> Result<Dendrogram<T>> {
    let n = d.n_leaves();
    let n_int = d.n_internal();
    if support.values.len() != n_int {
        return Err(CorrError::DimensionMismatch(format!(
            "{} support values for {} internal nodes",
            support.values.len(),
            n_int
        )));
    }
    let root = d.root_id();
    let survives =
        |id: usize| -> bool { id == root || support.values[id - n] >= b };
    // Map every internal node to its surviving representative.
    let parents = d.parents();
    let mut target = vec![0usize; n_int];
    // Nodes are stored children-first, so parents have larger ids and we
    // can resolve targets root-down.
    for k in (0..n_int).rev() {
        let id = n + k;
        target[k] = if survives(id) {
            id
        } else {
            let p = parents[id].expect("non-root has a parent");
            target[p - n]
        };
    }
    let keep: Vec<usize> = (0..n_int).filter(|&k| survives(n + k)).collect();
    let mut new_id = vec![usize::MAX; n_int];
    for (new_k, &old_k) in keep.iter().enumerate() {
        new_id[old_k] = n + new_k;
    }
    let mut new_nodes: Vec<DendroNode<T>> = keep
        .iter()
        .map(|&k| DendroNode {
            children: Vec::new(),
            correlation: d.nodes()[k].correlation,
            bootstrap: Some(support.values[k]),
        })
        .collect();
    // Reattach children to the surviving representative of their parent.
    for (k, node) in d.nodes().iter().enumerate() {
        let owner = target[k];
        for &ch in &node.children {
            let child_repr = if ch < n {
                ch
            } else if survives(ch) {
                new_id[ch - n]
            } else {
                continue; // collapsed node: its children reattach directly
            };
            new_nodes[new_id[owner - n] - n].children.push(child_repr);
        }
    }
    for node in &mut new_nodes {
        node.children.sort_unstable();
    }
    Dendrogram::new(n, new_nodes, d.leaf_labels().to_vec(), d.method())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn block_data(n: usize, t: usize, block: usize, rho: f64, seed: u64) -> DataMatrix<f64> {
        // Equicorrelated blocks via a shared factor per block.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Matrix::zeros(t, n);
        let g = rho.sqrt();
        let e = (1.0 - rho).sqrt();
        for r in 0..t {
            let mut factors = vec![0.0; n.div_ceil(block)];
            for f in factors.iter_mut() {
                *f = StandardNormal.sample(&mut rng);
            }
            for j in 0..n {
                let eps: f64 = StandardNormal.sample(&mut rng);
                values[(r, j)] = g * factors[j / block] + e * eps;
            }
        }
        DataMatrix::new(values, (0..n).map(|i| i.to_string()).collect()).unwrap()
    }

    #[test]
    fn replica_is_deterministic_for_fixed_seed() {
        let data = block_data(4, 30, 2, 0.5, 3);
        let cfg = BootstrapConfig {
            replicas: 10,
            seed: 99,
            threshold: 0.7,
        };
        let a = bootstrap_replica(&data, &mut cfg.replica_rng(5)).unwrap();
        let b = bootstrap_replica(&data, &mut cfg.replica_rng(5)).unwrap();
        assert_eq!(a.values(), b.values());
        let c = bootstrap_replica(&data, &mut cfg.replica_rng(6)).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn replica_rows_come_from_source() {
        let data = block_data(3, 20, 3, 0.4, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = bootstrap_replica(&data, &mut rng).unwrap();
        for r in 0..rep.n_rows() {
            let row = rep.values().row(r);
            let found = (0..data.n_rows()).any(|s| data.values().row(s) == row);
            assert!(found, "replica row {r} not found in source");
        }
    }

    #[test]
    fn single_record_panel_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let err = DataMatrix::new(m, vec!["a".into(), "b".into()]).unwrap_err();
        assert!(matches!(err, CorrError::DimensionTooSmall { .. }));
    }

    #[test]
    fn degenerate_replica_after_retries() {
        // An RNG stuck on zero resamples row 0 forever: every replica has
        // constant columns and the retry budget runs out.
        struct ZeroRng;
        impl rand::RngCore for ZeroRng {
            fn next_u32(&mut self) -> u32 {
                0
            }
            fn next_u64(&mut self) -> u64 {
                0
            }
            fn fill_bytes(&mut self, dest: &mut [u8]) {
                dest.fill(0);
            }
            fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
                dest.fill(0);
                Ok(())
            }
        }
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let data = DataMatrix::new(m, vec!["a".into(), "b".into()]).unwrap();
        let err = bootstrap_replica(&data, &mut ZeroRng).unwrap_err();
        assert!(matches!(err, CorrError::DegenerateReplica { .. }));
    }

    #[test]
    fn row_multiplicity_statistics() {
        // Expected multiplicity of each source row in a replica is 1;
        // across many replicas the mean multiplicity stays within 3 sigma
        // of 1 (binomial with p = 1/T over T draws).
        let t = 100usize;
        let reps = 2_000usize;
        let data = block_data(2, t, 2, 0.3, 21);
        let cfg = BootstrapConfig {
            replicas: reps,
            seed: 5,
            threshold: 0.7,
        };
        let mut mult = vec![0usize; t];
        for rep in 0..reps {
            let mut rng = cfg.replica_rng(rep as u64);
            let replica = bootstrap_replica(&data, &mut rng).unwrap();
            for r in 0..t {
                let row = replica.values().row(r);
                let src = (0..t)
                    .find(|&s| data.values().row(s) == row)
                    .expect("row from source");
                mult[src] += 1;
            }
        }
        let mean = mult.iter().sum::<usize>() as f64 / (t * reps) as f64;
        // per-row count ~ Binomial(t*reps, 1/t); mean multiplicity per
        // replica is exactly 1 by construction, so this checks uniformity
        let sigma = ((1.0 - 1.0 / t as f64) / (t as f64 * reps as f64)).sqrt() * t as f64;
        assert!(
            (mean - 1.0).abs() < 3.0 * sigma + 1e-12,
            "mean multiplicity {mean}"
        );
        let max_dev = mult
            .iter()
            .map(|&m| (m as f64 / reps as f64 - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(max_dev < 5.0 * (1.0f64 / reps as f64 * (1.0 - 1.0 / t as f64) * t as f64).sqrt());
    }

    #[test]
    fn root_support_is_always_one() {
        let data = block_data(6, 60, 3, 0.6, 7);
        let cfg = BootstrapConfig {
            replicas: 25,
            seed: 1,
            threshold: 0.7,
        };
        let support = node_bootstrap_values(&data, Linkage::Average, &cfg).unwrap();
        assert_eq!(*support.values.last().unwrap(), 1.0);
    }

    #[test]
    fn strong_clusters_receive_high_support() {
        // Two 3-leaf blocks with intra correlation 0.9 and none across.
        let data = block_data(6, 500, 3, 0.9, 13);
        let cfg = BootstrapConfig {
            replicas: 100,
            seed: 2,
            threshold: 0.7,
        };
        let c = pearson_correlation(&data).unwrap();
        let (tree, _) = hclust::cluster(&c, Linkage::Average).unwrap();
        let support = node_bootstrap_values(&data, Linkage::Average, &cfg).unwrap();
        let sets = tree.leaf_sets();
        for (k, set) in sets.iter().enumerate() {
            if set.len() == 3 {
                assert!(
                    support.values[k] > 0.95,
                    "cluster {set:?} support {}",
                    support.values[k]
                );
            }
        }
    }

    #[test]
    fn noise_data_gets_weak_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n = 10;
        let t = 50;
        let mut values = Matrix::zeros(t, n);
        for r in 0..t {
            for j in 0..n {
                values[(r, j)] = StandardNormal.sample(&mut rng);
            }
        }
        let data =
            DataMatrix::new(values, (0..n).map(|i| i.to_string()).collect()).unwrap();
        let cfg = BootstrapConfig {
            replicas: 60,
            seed: 3,
            threshold: 0.7,
        };
        let support = node_bootstrap_values(&data, Linkage::Average, &cfg).unwrap();
        let mut non_root: Vec<f64> = support.values[..support.values.len() - 1].to_vec();
        non_root.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = non_root[non_root.len() / 2];
        assert!(median < 0.5, "median non-root support {median}");
    }

    #[test]
    fn duplicated_pair_link_support_is_one() {
        // Two nearly identical columns (correlation ~ 1) plus noise
        // columns: their MST link appears in every replica.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let t = 200;
        let n = 5;
        let mut values = Matrix::zeros(t, n);
        for r in 0..t {
            let base: f64 = StandardNormal.sample(&mut rng);
            values[(r, 0)] = base;
            let tiny: f64 = StandardNormal.sample(&mut rng);
            values[(r, 1)] = base + 1e-9 * tiny;
            for j in 2..n {
                values[(r, j)] = StandardNormal.sample(&mut rng);
            }
        }
        let data =
            DataMatrix::new(values, (0..n).map(|i| i.to_string()).collect()).unwrap();
        let cfg = BootstrapConfig {
            replicas: 50,
            seed: 4,
            threshold: 0.7,
        };
        let vals = link_bootstrap_values(&data, GraphKind::Mst, &cfg).unwrap();
        let c = pearson_correlation(&data).unwrap();
        let (g, _) = networks::mst(&c).unwrap();
        let idx = g
            .edges
            .iter()
            .position(|e| e.i.min(e.j) == 0 && e.i.max(e.j) == 1)
            .expect("0-1 link in MST");
        assert_eq!(vals[idx], 1.0);
    }

    #[test]
    fn intra_block_links_more_supported_than_inter() {
        let data = block_data(9, 400, 3, 0.7, 17);
        let cfg = BootstrapConfig {
            replicas: 60,
            seed: 6,
            threshold: 0.7,
        };
        let vals = link_bootstrap_values(&data, GraphKind::Mst, &cfg).unwrap();
        let c = pearson_correlation(&data).unwrap();
        let (g, _) = networks::mst(&c).unwrap();
        let mut intra = Vec::new();
        let mut inter = Vec::new();
        for (e, &v) in g.edges.iter().zip(&vals) {
            if e.i / 3 == e.j / 3 {
                intra.push(v);
            } else {
                inter.push(v);
            }
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        assert!(!intra.is_empty() && !inter.is_empty());
        assert!(mean(&intra) > mean(&inter));
    }

    #[test]
    fn reduce_identity_when_all_supported() {
        let data = block_data(6, 200, 3, 0.8, 19);
        let c = pearson_correlation(&data).unwrap();
        let (tree, _) = hclust::cluster(&c, Linkage::Average).unwrap();
        let support = NodeSupport {
            values: vec![1.0; tree.n_internal()],
            replicas: 10,
        };
        let reduced = reduce_dendrogram(&tree, &support, 0.7).unwrap();
        assert_eq!(reduced.n_internal(), tree.n_internal());
        let f0 = hclust::filtered_from_dendrogram(&tree).unwrap();
        let f1 = hclust::filtered_from_dendrogram(&reduced).unwrap();
        assert_eq!(f0.values.values(), f1.values.values());
    }

    #[test]
    fn reduce_chain_to_star() {
        // ((0,1)@0.9, 2)@0.5 with the 0.9 node unsupported -> root with
        // three leaf children.
        let nodes = vec![
            DendroNode {
                children: vec![0, 1],
                correlation: 0.9,
                bootstrap: None,
            },
            DendroNode {
                children: vec![3, 2],
                correlation: 0.5,
                bootstrap: None,
            },
        ];
        let d = Dendrogram::new(
            3,
            nodes,
            vec!["a".into(), "b".into(), "c".into()],
            None,
        )
        .unwrap();
        let support = NodeSupport {
            values: vec![0.2, 0.9],
            replicas: 10,
        };
        let reduced = reduce_dendrogram(&d, &support, 0.7).unwrap();
        assert_eq!(reduced.n_internal(), 1);
        assert_eq!(reduced.nodes()[0].children, vec![0, 1, 2]);
        assert_eq!(reduced.nodes()[0].correlation, 0.5);
    }

    #[test]
    fn reduce_preserves_ultrametric_order_and_leaves() {
        let data = block_data(8, 120, 2, 0.6, 23);
        let cfg = BootstrapConfig {
            replicas: 40,
            seed: 8,
            threshold: 0.7,
        };
        let c = pearson_correlation(&data).unwrap();
        let (tree, _) = hclust::cluster(&c, Linkage::Single).unwrap();
        let support = node_bootstrap_values(&data, Linkage::Single, &cfg).unwrap();
        let reduced = reduce_dendrogram(&tree, &support, 0.7).unwrap();
        // Valid dendrogram (constructor re-checks ultrametric order) with
        // the same leaves and surviving nodes at or above threshold.
        assert_eq!(reduced.n_leaves(), 8);
        for (k, node) in reduced.nodes().iter().enumerate() {
            let is_root = k == reduced.n_internal() - 1;
            let sup = node.bootstrap.unwrap();
            assert!(is_root || sup >= 0.7);
        }
    }

    #[test]
    fn node_values_depend_on_leaf_sets_not_labels() {
        // Relabeling leaves (permuting columns) permutes supports with
        // them: compare by leaf set.
        let data = block_data(6, 300, 3, 0.8, 29);
        let cfg = BootstrapConfig {
            replicas: 30,
            seed: 10,
            threshold: 0.7,
        };
        let support = node_bootstrap_values(&data, Linkage::Average, &cfg).unwrap();
        assert_eq!(support.values.len(), 5);
        assert!(support.values.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
