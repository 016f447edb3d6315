//! Correlation-based networks: the maximum-correlation spanning tree (the
//! network companion of single linkage), the average linkage minimum
//! spanning tree, and the planar maximally filtered graph.
//!
//! The two spanning trees reuse the clustering engine from [`crate::hclust`]:
//! at every merge the link added to the tree is the pair of original
//! elements with the highest correlation across the two merging clusters,
//! and the companion filtered matrix is exactly the one the corresponding
//! clustering produces (bit for bit, same code path).

use serde::{Deserialize, Serialize};

use crate::error::{CorrError, Result};
use crate::hclust::{self, FilteredCorrelationMatrix, Linkage};
use crate::linalg::CorrelationMatrix;
use crate::planarity;
use crate::Scalar;

/// Kind of correlation-based graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    Mst,
    Almst,
    Pmfg,
}

impl GraphKind {
    pub fn tag(&self) -> &'static str {
        match self {
            GraphKind::Mst => "mst",
            GraphKind::Almst => "almst",
            GraphKind::Pmfg => "pmfg",
        }
    }
}

/// Weighted undirected edge with an optional bootstrap value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge<T> {
    pub i: usize,
    pub j: usize,
    pub weight: T,
    pub bootstrap: Option<f64>,
}

/// A correlation-based graph (MST, ALMST or PMFG).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationGraph<T> {
    pub n: usize,
    pub kind: GraphKind,
    pub edges: Vec<GraphEdge<T>>,
    pub vertex_labels: Vec<String>,
}

impl<T: Scalar> CorrelationGraph<T> {
    /// Normalized (min, max) edge pairs, sorted; the topology without
    /// weights.
    pub fn edge_set(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|ed| (ed.i.min(ed.j), ed.i.max(ed.j)))
            .collect();
        e.sort_unstable();
        e
    }

    pub fn set_vertex_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n {
            return Err(CorrError::DimensionMismatch(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.vertex_labels = labels;
        Ok(())
    }

    pub fn set_bootstrap_values(&mut self, values: &[f64]) -> Result<()> {
        if values.len() != self.edges.len() {
            return Err(CorrError::DimensionMismatch(format!(
                "{} bootstrap values for {} edges",
                values.len(),
                self.edges.len()
            )));
        }
        for (e, &v) in self.edges.iter_mut().zip(values) {
            e.bootstrap = Some(v);
        }
        Ok(())
    }

    fn is_spanning_tree(&self) -> bool {
        if self.edges.len() != self.n.saturating_sub(1) {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.i), find(&mut parent, e.j));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn spanning_tree<T: Scalar>(
    c: &CorrelationMatrix<T>,
    linkage: Linkage,
    kind: GraphKind,
) -> Result<(CorrelationGraph<T>, FilteredCorrelationMatrix<T>)> {
    let merges = hclust::agglomerate(c, linkage)?;
    let edges = merges
        .iter()
        .map(|m| GraphEdge {
            i: m.max_link.0,
            j: m.max_link.1,
            weight: c.values()[(m.max_link.0, m.max_link.1)],
            bootstrap: None,
        })
        .collect();
    let dendro = hclust::dendrogram_from_merges(c.n(), &merges, linkage)?;
    let filtered = hclust::filtered_from_dendrogram(&dendro)?;
    let g = CorrelationGraph {
        n: c.n(),
        kind,
        edges,
        vertex_labels: default_labels(c.n()),
    };
    debug_assert!(g.is_spanning_tree());
    Ok((g, filtered))
}

/// Maximum-correlation spanning tree plus the single-linkage filtered
/// matrix it is associated with.
pub fn mst<T: Scalar>(
    c: &CorrelationMatrix<T>,
) -> Result<(CorrelationGraph<T>, FilteredCorrelationMatrix<T>)> {
    spanning_tree(c, Linkage::Single, GraphKind::Mst)
}

/// Average linkage minimum spanning tree plus the average-linkage filtered
/// matrix. At each merge the inter-component link is the pair of elements
/// with the highest original correlation between the two components; other
/// link choices would leave the clustering unchanged but give a different
/// tree.
pub fn almst<T: Scalar>(
    c: &CorrelationMatrix<T>,
) -> Result<(CorrelationGraph<T>, FilteredCorrelationMatrix<T>)> {
    spanning_tree(c, Linkage::Average, GraphKind::Almst)
}

/// Planar maximally filtered graph: edges inserted in descending
/// correlation order whenever the result still embeds in the plane,
/// stopping at the 3(n-2) edges of a maximal planar graph.
pub fn pmfg<T: Scalar>(c: &CorrelationMatrix<T>) -> Result<CorrelationGraph<T>> {
    let n = c.n();
    if n < 3 {
        return Err(CorrError::DimensionTooSmall { needed: 3, got: n });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    // Descending correlation; ties lexicographic on (i, j).
    pairs.sort_by(|&(ai, aj), &(bi, bj)| {
        c.values()[(bi, bj)]
            .partial_cmp(&c.values()[(ai, aj)])
            .expect("finite correlations")
            .then((ai, aj).cmp(&(bi, bj)))
    });
    let target = 3 * (n - 2);
    let mut accepted: Vec<(usize, usize)> = Vec::with_capacity(target);
    for &(i, j) in &pairs {
        if accepted.len() == target {
            break;
        }
        // Euler bound: a planar graph never exceeds 3n - 6 edges, so the
        // candidate count below stays within the target.
        accepted.push((i, j));
        if !planarity::is_planar(n, &accepted) {
            accepted.pop();
        }
    }
    let edges = accepted
        .into_iter()
        .map(|(i, j)| GraphEdge {
            i,
            j,
            weight: c.values()[(i, j)],
            bootstrap: None,
        })
        .collect();
    Ok(CorrelationGraph {
        n,
        kind: GraphKind::Pmfg,
        edges,
        vertex_labels: default_labels(n),
    })
}

/// Planarity probe used by the PMFG construction: would the graph stay
/// planar with `candidate` added?
pub fn is_planar_with(n: usize, edges: &[(usize, usize)], candidate: (usize, usize)) -> bool {
    let mut all: Vec<(usize, usize)> = edges.to_vec();
    all.push(candidate);
    planarity::is_planar(n, &all)
}

/// Build a graph of the requested kind (the PMFG has no companion matrix).
pub fn build<T: Scalar>(
    c: &CorrelationMatrix<T>,
    kind: GraphKind,
) -> Result<(CorrelationGraph<T>, Option<FilteredCorrelationMatrix<T>>)> {
    match kind {
        GraphKind::Mst => mst(c).map(|(g, f)| (g, Some(f))),
        GraphKind::Almst => almst(c).map(|(g, f)| (g, Some(f))),
        GraphKind::Pmfg => pmfg(c).map(|g| (g, None)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hclust::slca;
    use crate::linalg::Matrix;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn corr(n: usize, upper: &[f64]) -> CorrelationMatrix<f64> {
        let mut m = Matrix::identity(n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().unwrap();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        CorrelationMatrix::new(m).unwrap()
    }

    fn random_corr(n: usize, seed: u64) -> CorrelationMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = 3 * n;
        let rows: Vec<Vec<f64>> = (0..t)
            .map(|_| (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let dm = crate::linalg::DataMatrix::new(
            Matrix::from_rows(&rows).unwrap(),
            (0..n).map(|i| i.to_string()).collect(),
        )
        .unwrap();
        crate::linalg::pearson_correlation(&dm).unwrap()
    }

    /// Independent maximum-spanning-tree oracle (Kruskal on sorted edges).
    fn kruskal_max(c: &CorrelationMatrix<f64>) -> Vec<(usize, usize)> {
        let n = c.n();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
        pairs.sort_by(|&(ai, aj), &(bi, bj)| {
            c.values()[(bi, bj)]
                .partial_cmp(&c.values()[(ai, aj)])
                .unwrap()
                .then((ai, aj).cmp(&(bi, bj)))
        });
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut out = Vec::new();
        for (i, j) in pairs {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
                out.push((i, j));
            }
        }
        out.sort_unstable();
        out
    }

    #[test]
    fn two_vertex_mst() {
        let c = corr(2, &[0.42]);
        let (g, f) = mst(&c).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].weight, 0.42);
        assert_eq!(f.values.values()[(0, 1)], 0.42);
    }

    #[test]
    fn mst_matches_kruskal_oracle_on_fixture() {
        let c = crate::io::tests_fixture_nyse10();
        let (g, _) = mst(&c).unwrap();
        assert_eq!(g.edges.len(), 9);
        assert_eq!(g.edge_set(), kruskal_max(&c));
        // Contains the strongest link with its weight.
        assert!(g
            .edges
            .iter()
            .any(|e| e.i.min(e.j) == 3 && e.i.max(e.j) == 4 && e.weight == 0.664));
    }

    #[test]
    fn mst_filtered_matrix_is_slca_bit_for_bit() {
        let c = crate::io::tests_fixture_nyse10();
        let (_, f_mst) = mst(&c).unwrap();
        let (_, f_slca) = slca(&c).unwrap();
        assert_eq!(f_mst.values.values(), f_slca.values.values());
    }

    #[test]
    fn almst_three_vertices() {
        // correlations: (0,1)=0.9, (0,2)=0.5, (1,2)=0.1
        let c = corr(3, &[0.9, 0.5, 0.1]);
        let (g, _) = almst(&c).unwrap();
        let mut es = g.edge_set();
        es.sort_unstable();
        assert_eq!(es, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn almst_equals_mst_on_fixture() {
        let c = crate::io::tests_fixture_nyse10();
        let (gm, _) = mst(&c).unwrap();
        let (ga, fa) = almst(&c).unwrap();
        assert_eq!(gm.edge_set(), ga.edge_set());
        let (_, f_alca) = crate::hclust::alca(&c).unwrap();
        assert_eq!(fa.values.values(), f_alca.values.values());
    }

    #[test]
    fn pmfg_counts_and_contains_mst() {
        let c = crate::io::tests_fixture_nyse10();
        let g = pmfg(&c).unwrap();
        assert_eq!(g.edges.len(), 24); // 3(N-2) with N=10
        let (m, _) = mst(&c).unwrap();
        let pmfg_set = g.edge_set();
        for e in m.edge_set() {
            assert!(pmfg_set.contains(&e), "MST edge {e:?} missing from PMFG");
        }
    }

    #[test]
    fn pmfg_on_four_vertices_is_complete() {
        let c = corr(4, &[0.5, 0.4, 0.3, 0.2, 0.1, 0.05]);
        let g = pmfg(&c).unwrap();
        assert_eq!(g.edges.len(), 6); // K4 is planar
    }

    #[test]
    fn is_planar_with_detects_kuratowski_edges() {
        // K5 minus one edge is planar; the completing edge is rejected.
        let mut k5_minus: Vec<(usize, usize)> = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                if (i, j) != (3, 4) {
                    k5_minus.push((i, j));
                }
            }
        }
        assert!(!is_planar_with(5, &k5_minus, (3, 4)));
        // K3,3 minus one edge likewise.
        let mut k33_minus = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if (i, j) != (2, 2) {
                    k33_minus.push((i, 3 + j));
                }
            }
        }
        assert!(!is_planar_with(6, &k33_minus, (2, 5)));
        // Tree plus a chord stays planar.
        let tree = vec![(0, 1), (1, 2), (2, 3), (3, 4)];
        assert!(is_planar_with(5, &tree, (0, 4)));
    }

    #[test]
    fn mst_is_maximal_by_exhaustive_enumeration() {
        // All spanning trees of K_n for n <= 6 via Prüfer sequences.
        fn prufer_to_tree(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
            let mut degree = vec![1usize; n];
            for &s in seq {
                degree[s] += 1;
            }
            let mut edges = Vec::new();
            let mut seq = seq.to_vec();
            loop {
                let leaf = match (0..n).find(|&v| degree[v] == 1) {
                    Some(l) => l,
                    None => break,
                };
                if seq.is_empty() {
                    break;
                }
                let s = seq.remove(0);
                edges.push((leaf.min(s), leaf.max(s)));
                degree[leaf] -= 1;
                degree[s] -= 1;
            }
            let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
            edges.push((rest[0], rest[1]));
            edges
        }
        for seed in 0..10 {
            let n = 5;
            let c = random_corr(n, 500 + seed);
            let (g, _) = mst(&c).unwrap();
            let weight: f64 = g.edges.iter().map(|e| e.weight).sum();
            let mut best = f64::NEG_INFINITY;
            for code in 0..n.pow((n - 2) as u32) {
                let mut seq = Vec::new();
                let mut c2 = code;
                for _ in 0..(n - 2) {
                    seq.push(c2 % n);
                    c2 /= n;
                }
                let tree = prufer_to_tree(&seq, n);
                let w: f64 = tree.iter().map(|&(i, j)| c.values()[(i, j)]).sum();
                best = best.max(w);
            }
            assert!(
                (weight - best).abs() < 1e-12,
                "seed {seed}: mst weight {weight} vs best {best}"
            );
        }
    }

    #[test]
    fn pmfg_contains_mst_randomized() {
        for seed in 0..30 {
            let n = 4 + (seed as usize % 9); // 4..=12
            let c = random_corr(n, 900 + seed);
            let g = pmfg(&c).unwrap();
            assert_eq!(g.edges.len(), 3 * (n - 2));
            let (m, _) = mst(&c).unwrap();
            let ps = g.edge_set();
            for e in m.edge_set() {
                assert!(ps.contains(&e), "seed {seed}: MST edge {e:?} not in PMFG");
            }
        }
    }
}
