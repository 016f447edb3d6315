//! Agglomerative hierarchical clustering on a correlation matrix.
//!
//! Average linkage (ALCA) and single linkage (SLCA) both repeatedly merge
//! the pair of clusters with the highest linkage value; they differ only
//! in how the working matrix is redefined after a merge (size-weighted
//! mean versus maximum over the merged pair). Each run yields a rooted
//! dendrogram whose internal nodes carry the merge correlation, plus the
//! filtered ultrametric matrix whose (i, j) entry is the merge correlation
//! of the lowest common ancestor of leaves i and j. The filtered matrix
//! has at most N-1 distinct off-diagonal values.

use serde::{Deserialize, Serialize};

use crate::error::{CorrError, Result};
use crate::linalg::{CorrelationMatrix, Matrix};
use crate::Scalar;

/// Linkage rule used when redefining the working matrix after a merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Linkage {
    /// Size-weighted mean of the merged clusters' linkage values (ALCA).
    Average,
    /// Maximum of the merged clusters' linkage values (SLCA).
    Single,
}

impl Linkage {
    pub fn tag(&self) -> &'static str {
        match self {
            Linkage::Average => "alca",
            Linkage::Single => "slca",
        }
    }
}

/// Internal node of a rooted (not necessarily binary) dendrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DendroNode<T> {
    /// Child ids: leaves are 0..n_leaves-1, internal nodes follow.
    pub children: Vec<usize>,
    /// Merge correlation rho of this node.
    pub correlation: T,
    /// Bootstrap value in [0, 1], when attached.
    pub bootstrap: Option<f64>,
}

/// Rooted tree over N leaves with merge correlations that are
/// non-increasing along every path from a leaf to the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram<T> {
    n_leaves: usize,
    nodes: Vec<DendroNode<T>>,
    leaf_labels: Vec<String>,
    method: Option<Linkage>,
}

impl<T: Scalar> Dendrogram<T> {
    /// Assemble and validate a dendrogram. Node ids in `children` refer to
    /// leaves `0..n_leaves` and internal nodes `n_leaves..n_leaves+len`,
    /// listed in an order where children precede parents; the last node is
    /// the root.
    pub fn new(
        n_leaves: usize,
        nodes: Vec<DendroNode<T>>,
        leaf_labels: Vec<String>,
        method: Option<Linkage>,
    ) -> Result<Self> {
        if leaf_labels.len() != n_leaves {
            return Err(CorrError::DimensionMismatch(format!(
                "{} labels for {} leaves",
                leaf_labels.len(),
                n_leaves
            )));
        }
        let d = Dendrogram {
            n_leaves,
            nodes,
            leaf_labels,
            method,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n_leaves;
        let total = n + self.nodes.len();
        if self.nodes.is_empty() {
            return Err(CorrError::InvalidParameter(
                "dendrogram needs at least one internal node".into(),
            ));
        }
        let mut seen_as_child = vec![false; total];
        for (k, node) in self.nodes.iter().enumerate() {
            if node.children.len() < 2 {
                return Err(CorrError::InvalidParameter(format!(
                    "internal node {} has {} children",
                    n + k,
                    node.children.len()
                )));
            }
            for &ch in &node.children {
                if ch >= total || ch >= n + k {
                    return Err(CorrError::IndexOutOfRange {
                        index: ch,
                        limit: n + k,
                    });
                }
                if seen_as_child[ch] {
                    return Err(CorrError::InvalidParameter(format!(
                        "node {ch} appears as a child twice"
                    )));
                }
                seen_as_child[ch] = true;
                // Ultrametric ordering: child merge correlation >= parent's.
                if ch >= n && self.nodes[ch - n].correlation < node.correlation {
                    return Err(CorrError::InvalidParameter(format!(
                        "merge correlations increase toward the root at node {}",
                        n + k
                    )));
                }
            }
        }
        let root = total - 1;
        for (id, &seen) in seen_as_child.iter().enumerate() {
            if id != root && !seen {
                return Err(CorrError::InvalidParameter(format!(
                    "node {id} is not reachable from the root"
                )));
            }
        }
        if seen_as_child[root] {
            return Err(CorrError::InvalidParameter(
                "the last node must be the root".into(),
            ));
        }
        Ok(())
    }

    pub fn n_leaves(&self) -> usize {
        self.n_leaves
    }

    pub fn n_internal(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[DendroNode<T>] {
        &self.nodes
    }

    pub fn leaf_labels(&self) -> &[String] {
        &self.leaf_labels
    }

    pub fn method(&self) -> Option<Linkage> {
        self.method
    }

    pub fn root_id(&self) -> usize {
        self.n_leaves + self.nodes.len() - 1
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        id < self.n_leaves
    }

    pub fn node(&self, id: usize) -> Result<&DendroNode<T>> {
        if id < self.n_leaves || id >= self.n_leaves + self.nodes.len() {
            return Err(CorrError::IndexOutOfRange {
                index: id,
                limit: self.n_leaves + self.nodes.len(),
            });
        }
        Ok(&self.nodes[id - self.n_leaves])
    }

    pub fn set_leaf_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n_leaves {
            return Err(CorrError::DimensionMismatch(format!(
                "{} labels for {} leaves",
                labels.len(),
                self.n_leaves
            )));
        }
        self.leaf_labels = labels;
        Ok(())
    }

    pub fn set_bootstrap_values(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.nodes.len() {
            return Err(CorrError::DimensionMismatch(format!(
                "{} bootstrap values for {} internal nodes",
                values.len(),
                self.nodes.len()
            )));
        }
        for (node, &v) in self.nodes.iter_mut().zip(values) {
            node.bootstrap = Some(v);
        }
        Ok(())
    }

    /// Parent id of every node (root has none), indexed by node id.
    pub fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.n_leaves + self.nodes.len()];
        for (k, node) in self.nodes.iter().enumerate() {
            for &ch in &node.children {
                parent[ch] = Some(self.n_leaves + k);
            }
        }
        parent
    }

    /// Leaves under each internal node, indexed like `nodes`.
    pub fn leaf_sets(&self) -> Vec<Vec<usize>> {
        let mut sets: Vec<Vec<usize>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut leaves = Vec::new();
            for &ch in &node.children {
                if ch < self.n_leaves {
                    leaves.push(ch);
                } else {
                    leaves.extend_from_slice(&sets[ch - self.n_leaves]);
                }
            }
            leaves.sort_unstable();
            sets.push(leaves);
        }
        sets
    }

    /// Internal node ids ranked by ascending merge correlation, so that
    /// position 0 is the root-most node (the "alpha 1" of the usual
    /// root-lowest labeling convention used in exports). Ties are broken
    /// toward the later (root-ward) merge.
    pub fn alpha_order(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = (0..self.nodes.len()).collect();
        ids.sort_by(|&a, &b| {
            self.nodes[a]
                .correlation
                .partial_cmp(&self.nodes[b].correlation)
                .expect("finite merge correlations")
                .then(b.cmp(&a))
        });
        ids.into_iter().map(|k| self.n_leaves + k).collect()
    }
}

/// Ordered list of internal nodes from `id` (inclusive when `id` is an
/// internal node) up to the root.
pub fn genealogy<T: Scalar>(d: &Dendrogram<T>, id: usize) -> Result<Vec<usize>> {
    let total = d.n_leaves + d.nodes.len();
    if id >= total {
        return Err(CorrError::IndexOutOfRange {
            index: id,
            limit: total,
        });
    }
    let parent = d.parents();
    let mut out = Vec::new();
    let mut cur = if d.is_leaf(id) {
        parent[id]
    } else {
        Some(id)
    };
    while let Some(v) = cur {
        out.push(v);
        cur = parent[v];
    }
    Ok(out)
}

/// One merge performed by the agglomeration engine.
#[derive(Debug, Clone)]
pub(crate) struct MergeStep<T> {
    /// Cluster node ids merged (child order by smallest original leaf).
    pub children: Vec<usize>,
    pub correlation: T,
    /// Cross pair of original elements with the highest correlation
    /// between the two merging clusters.
    pub max_link: (usize, usize),
}

/// Run the agglomeration, returning the merge sequence. Shared by the
/// clustering front ends and by the spanning-tree constructions, so the
/// merge order, values and tie-breaking are identical everywhere.
///
/// Tie-breaking: among equal linkage values the pair whose (smallest,
/// largest) original representative indices compare lexicographically
/// lowest wins; the same rule picks the cross link.
pub(crate) fn agglomerate<T: Scalar>(
    c: &CorrelationMatrix<T>,
    linkage: Linkage,
) -> Result<Vec<MergeStep<T>>> {
    let n = c.n();
    if n < 2 {
        return Err(CorrError::DimensionTooSmall { needed: 2, got: n });
    }
    struct Cluster {
        node_id: usize,
        rep: usize,
        members: Vec<usize>,
    }
    let mut clusters: Vec<Cluster> = (0..n)
        .map(|i| Cluster {
            node_id: i,
            rep: i,
            members: vec![i],
        })
        .collect();
    // Working linkage matrix over active cluster positions.
    let mut b: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| c.values()[(i, j)]).collect())
        .collect();
    let mut merges = Vec::with_capacity(n - 1);
    let mut next_id = n;
    while clusters.len() > 1 {
        // Select the maximum linkage entry.
        let mut best: Option<(T, usize, usize, usize, usize)> = None;
        for ai in 0..clusters.len() {
            for bi in (ai + 1)..clusters.len() {
                let v = b[ai][bi];
                let (ra, rb) = (clusters[ai].rep, clusters[bi].rep);
                let key = (ra.min(rb), ra.max(rb));
                let better = match &best {
                    None => true,
                    Some((bv, bk0, bk1, _, _)) => {
                        v > *bv || (v == *bv && key < (*bk0, *bk1))
                    }
                };
                if better {
                    best = Some((v, key.0, key.1, ai, bi));
                }
            }
        }
        let (value, _, _, ai, bi) = best.expect("at least two clusters");
        // Strongest original-correlation pair across the two clusters.
        let mut link: Option<(T, usize, usize)> = None;
        for &u in &clusters[ai].members {
            for &p in &clusters[bi].members {
                let w = c.values()[(u, p)];
                let key = (u.min(p), u.max(p));
                let better = match &link {
                    None => true,
                    Some((bw, b0, b1)) => w > *bw || (w == *bw && key < (*b0, *b1)),
                };
                if better {
                    link = Some((w, key.0, key.1));
                }
            }
        }
        let (_, u, p) = link.expect("non-empty clusters");
        let (first, second) = if clusters[ai].rep <= clusters[bi].rep {
            (ai, bi)
        } else {
            (bi, ai)
        };
        merges.push(MergeStep {
            children: vec![clusters[first].node_id, clusters[second].node_id],
            correlation: value,
            max_link: (u, p),
        });
        // Redefine the working matrix for the merged cluster, kept at
        // position `ai`; drop position `bi`.
        let (na, nb) = (
            clusters[ai].members.len(),
            clusters[bi].members.len(),
        );
        let naf = crate::cast::<T>(na as f64);
        let nbf = crate::cast::<T>(nb as f64);
        for j in 0..clusters.len() {
            if j == ai || j == bi {
                continue;
            }
            let merged = match linkage {
                Linkage::Average => (naf * b[ai][j] + nbf * b[bi][j]) / (naf + nbf),
                Linkage::Single => b[ai][j].max(b[bi][j]),
            };
            b[ai][j] = merged;
            b[j][ai] = merged;
        }
        let moved = clusters.swap_remove(bi);
        let last = clusters.len(); // position vacated by swap_remove
        if bi < last {
            // The cluster formerly at `last` now sits at `bi`; move its
            // linkage row and column along. `ai < bi <= last` always.
            for j in 0..=last {
                b[bi][j] = b[last][j];
            }
            for row in b.iter_mut().take(last + 1) {
                row[bi] = row[last];
            }
            b[bi][bi] = T::one();
        }
        let a = &mut clusters[ai];
        a.rep = a.rep.min(moved.rep);
        a.members.extend(moved.members);
        a.members.sort_unstable();
        a.node_id = next_id;
        next_id += 1;
    }
    Ok(merges)
}

pub(crate) fn dendrogram_from_merges<T: Scalar>(
    n: usize,
    merges: &[MergeStep<T>],
    method: Linkage,
) -> Result<Dendrogram<T>> {
    let nodes = merges
        .iter()
        .map(|m| DendroNode {
            children: m.children.clone(),
            correlation: m.correlation,
            bootstrap: None,
        })
        .collect();
    let labels = (0..n).map(|i| i.to_string()).collect();
    Dendrogram::new(n, nodes, labels, Some(method))
}

/// The ultrametric matrix implied by a hierarchical clustering, together
/// with the linkage that produced its dendrogram when known.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilteredCorrelationMatrix<T> {
    pub values: CorrelationMatrix<T>,
    pub source: Option<Linkage>,
}

/// Average linkage cluster analysis: dendrogram plus filtered matrix.
pub fn alca<T: Scalar>(
    c: &CorrelationMatrix<T>,
) -> Result<(Dendrogram<T>, FilteredCorrelationMatrix<T>)> {
    cluster(c, Linkage::Average)
}

/// Single linkage cluster analysis: dendrogram plus filtered matrix.
pub fn slca<T: Scalar>(
    c: &CorrelationMatrix<T>,
) -> Result<(Dendrogram<T>, FilteredCorrelationMatrix<T>)> {
    cluster(c, Linkage::Single)
}

/// Run the clustering for the given linkage.
pub fn cluster<T: Scalar>(
    c: &CorrelationMatrix<T>,
    linkage: Linkage,
) -> Result<(Dendrogram<T>, FilteredCorrelationMatrix<T>)> {
    let merges = agglomerate(c, linkage)?;
    let d = dendrogram_from_merges(c.n(), &merges, linkage)?;
    let filtered = filtered_from_dendrogram(&d)?;
    Ok((d, filtered))
}

/// Evaluate the filtered matrix of a dendrogram: entry (i, j) is the merge
/// correlation of the lowest common ancestor of leaves i and j.
pub fn filtered_from_dendrogram<T: Scalar>(
    d: &Dendrogram<T>,
) -> Result<FilteredCorrelationMatrix<T>> {
    let n = d.n_leaves();
    let mut m = Matrix::identity(n);
    let sets = d.leaf_sets();
    for node in d.nodes() {
        // Pairs with this node as the first common ancestor are exactly
        // the cross pairs between its child subtrees.
        let child_sets: Vec<Vec<usize>> = node
            .children
            .iter()
            .map(|&ch| {
                if ch < n {
                    vec![ch]
                } else {
                    sets[ch - n].clone()
                }
            })
            .collect();
        for a in 0..child_sets.len() {
            for b in (a + 1)..child_sets.len() {
                for &i in &child_sets[a] {
                    for &j in &child_sets[b] {
                        m[(i, j)] = node.correlation;
                        m[(j, i)] = node.correlation;
                    }
                }
            }
        }
    }
    Ok(FilteredCorrelationMatrix {
        values: CorrelationMatrix::new(m)?,
        source: d.method(),
    })
}
