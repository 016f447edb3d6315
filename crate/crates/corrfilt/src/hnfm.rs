//! Hierarchically nested factor model: one independent factor per
//! dendrogram node, loadings chosen so the model correlation matrix
//! reproduces the filtered ultrametric matrix of the tree, plus Gaussian
//! and Student-t samplers.
//!
//! For a tree with all merge correlations non-negative the root loading is
//! sqrt(rho_root) and every other node carries sqrt(rho - rho_parent). A
//! negative root correlation is supported when the root has exactly two
//! branches and |rho_root| stays below every other merge correlation: the
//! two branches load the root factor with opposite signs. Any other
//! negative structure is rejected.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Open01, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CorrError, Result};
use crate::hclust::Dendrogram;
use crate::linalg::{CorrelationMatrix, DataMatrix, Matrix};
use crate::{cast, Scalar};

/// Leaves that load the root factor negatively (the complement loads it
/// positively). Present only for a negative root correlation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSplit {
    pub negative_leaves: Vec<usize>,
}

/// A hierarchically nested factor model tied to a dendrogram.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HnfmSpec<T> {
    pub dendrogram: Dendrogram<T>,
    /// Loading magnitude per internal node, aligned with `dendrogram.nodes()`.
    pub gamma: Vec<T>,
    /// Idiosyncratic loading per leaf.
    pub eta: Vec<T>,
    pub root_sign_split: Option<SignSplit>,
    /// Student-t tail parameter for the heavy-tailed sampler.
    pub mu: Option<T>,
}

impl<T: Scalar> HnfmSpec<T> {
    pub fn n_leaves(&self) -> usize {
        self.dendrogram.n_leaves()
    }

    /// Sign of the root loading for a leaf (+1 or -1).
    pub fn root_sign(&self, leaf: usize) -> T {
        match &self.root_sign_split {
            Some(split) if split.negative_leaves.contains(&leaf) => -T::one(),
            _ => T::one(),
        }
    }

    pub fn to_json(&self) -> Result<String>
    where
        T: Serialize,
    {
        serde_json::to_string_pretty(self)
            .map_err(|e| CorrError::InvalidParameter(format!("serialize factor model: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self>
    where
        T: for<'de> Deserialize<'de>,
    {
        serde_json::from_str(s)
            .map_err(|e| CorrError::ParseError {
                row: 0,
                message: format!("factor model json: {e}"),
            })
    }
}

/// Derive the factor model of a dendrogram.
pub fn hnfm_from_dendrogram<T: Scalar>(d: &Dendrogram<T>) -> Result<HnfmSpec<T>> {
    let n = d.n_leaves();
    let n_int = d.n_internal();
    let root = d.root_id();
    let rho_root = d.nodes()[root - n].correlation;
    let parents = d.parents();

    for (k, node) in d.nodes().iter().enumerate() {
        if n + k != root && node.correlation < T::zero() {
            return Err(CorrError::UnsupportedNegativeStructure(format!(
                "internal node {} has negative merge correlation {}",
                n + k,
                node.correlation
            )));
        }
    }

    let mut gamma = vec![T::zero(); n_int];
    let mut split = None;
    if rho_root >= T::zero() {
        gamma[root - n] = rho_root.sqrt();
    } else {
        let root_children = &d.nodes()[root - n].children;
        if root_children.len() != 2 {
            return Err(CorrError::UnsupportedNegativeStructure(format!(
                "negative root correlation with {} root branches (need exactly 2)",
                root_children.len()
            )));
        }
        let abs_root = rho_root.abs();
        // every merge under the root must dominate |rho_root|
        for (k, node) in d.nodes().iter().enumerate() {
            if n + k != root && node.correlation <= abs_root {
                return Err(CorrError::UnsupportedNegativeStructure(format!(
                    "|root correlation| {} not below merge correlation {} of node {}",
                    abs_root,
                    node.correlation,
                    n + k
                )));
            }
        }
        gamma[root - n] = abs_root.sqrt();
        // the first branch loads the root factor negatively
        let first_child = root_children[0];
        let negative_leaves = if first_child < n {
            vec![first_child]
        } else {
            d.leaf_sets()[first_child - n].clone()
        };
        split = Some(SignSplit { negative_leaves });
    }

    let abs_root = rho_root.abs();
    for k in 0..n_int {
        let id = n + k;
        if id == root {
            continue;
        }
        let parent = parents[id].expect("non-root internal node has a parent");
        let parent_rho = if parent == root {
            abs_root
        } else {
            d.nodes()[parent - n].correlation
        };
        let diff = d.nodes()[k].correlation - parent_rho;
        debug_assert!(diff >= -T::epsilon());
        gamma[k] = diff.max(T::zero()).sqrt();
    }

    // eta_i = sqrt(1 - sum of squared loadings along the genealogy)
    let mut eta = vec![T::zero(); n];
    for leaf in 0..n {
        let mut acc = T::zero();
        let mut cur = parents[leaf];
        while let Some(v) = cur {
            acc += gamma[v - n] * gamma[v - n];
            cur = parents[v];
        }
        eta[leaf] = (T::one() - acc).max(T::zero()).sqrt();
    }

    Ok(HnfmSpec {
        dendrogram: d.clone(),
        gamma,
        eta,
        root_sign_split: split,
        mu: None,
    })
}

/// Model correlation matrix of the factor model: entry (i, j) sums the
/// squared loadings of the factors shared by leaves i and j, the root term
/// carrying the product of the two leaves' root signs.
pub fn model_correlation<T: Scalar>(spec: &HnfmSpec<T>) -> Result<CorrelationMatrix<T>> {
    let d = &spec.dendrogram;
    let n = d.n_leaves();
    let root = d.root_id();
    let parents = d.parents();
    // cumulative squared loadings from the root down to each node
    let mut cum = vec![T::zero(); d.n_internal()];
    for k in (0..d.n_internal()).rev() {
        let id = n + k;
        let own = spec.gamma[k] * spec.gamma[k];
        cum[k] = match parents[id] {
            Some(p) => cum[p - n] + own,
            None => own,
        };
    }
    let sets = d.leaf_sets();
    let mut m = Matrix::identity(n);
    for (k, node) in d.nodes().iter().enumerate() {
        let child_sets: Vec<Vec<usize>> = node
            .children
            .iter()
            .map(|&ch| if ch < n { vec![ch] } else { sets[ch - n].clone() })
            .collect();
        let id = n + k;
        for a in 0..child_sets.len() {
            for b in (a + 1)..child_sets.len() {
                for &i in &child_sets[a] {
                    for &j in &child_sets[b] {
                        let v = if id == root {
                            let root_sq = spec.gamma[k] * spec.gamma[k];
                            let signed =
                                spec.root_sign(i) * spec.root_sign(j) * root_sq;
                            cum[k] - root_sq + signed
                        } else {
                            cum[k]
                        };
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
            }
        }
    }
    CorrelationMatrix::new(m)
}

/// Per-leaf signed factor loadings, as (internal node index, coefficient).
fn leaf_loadings<T: Scalar>(spec: &HnfmSpec<T>) -> Vec<Vec<(usize, T)>> {
    let d = &spec.dendrogram;
    let n = d.n_leaves();
    let root_k = d.root_id() - n;
    let parents = d.parents();
    (0..n)
        .map(|leaf| {
            let mut loads = Vec::new();
            let mut cur = parents[leaf];
            while let Some(v) = cur {
                let k = v - n;
                let coef = if k == root_k {
                    spec.root_sign(leaf) * spec.gamma[k]
                } else {
                    spec.gamma[k]
                };
                loads.push((k, coef));
                cur = parents[v];
            }
            loads
        })
        .collect()
}

fn simulate_rows<T, R, F>(
    spec: &HnfmSpec<T>,
    t_len: usize,
    rng: &mut R,
    mut row_scale: F,
) -> Result<DataMatrix<T>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> T,
{
    if t_len < 2 {
        return Err(CorrError::DimensionTooSmall {
            needed: 2,
            got: t_len,
        });
    }
    let n = spec.n_leaves();
    let n_int = spec.dendrogram.n_internal();
    let loads = leaf_loadings(spec);
    let mut values = Matrix::zeros(t_len, n);
    let mut factors = vec![T::zero(); n_int];
    for r in 0..t_len {
        for f in factors.iter_mut() {
            *f = StandardNormal.sample(rng);
        }
        let scale = row_scale(rng);
        for i in 0..n {
            let eps: T = StandardNormal.sample(rng);
            let mut x = spec.eta[i] * eps;
            for &(k, coef) in &loads[i] {
                x += coef * factors[k];
            }
            values[(r, i)] = x * scale;
        }
    }
    DataMatrix::new(values, spec.dendrogram.leaf_labels().to_vec())
}

/// Draw `t_len` independent Gaussian records from factor model; the
/// population correlation equals [`model_correlation`].
pub fn simulate_gaussian<T, R>(
    spec: &HnfmSpec<T>,
    t_len: usize,
    rng: &mut R,
) -> Result<DataMatrix<T>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
    R: Rng + ?Sized,
{
    simulate_rows(spec, t_len, rng, |_| T::one())
}

/// Draw `t_len` records with multivariate Student-t dependence: one shared
/// scale per record multiplies all factors and idiosyncratic terms, so
/// each marginal is an exact t with `mu` degrees of freedom, normalized to
/// unit variance (the squared scale has unit mean).
pub fn simulate_student<T, R>(
    spec: &HnfmSpec<T>,
    t_len: usize,
    rng: &mut R,
) -> Result<DataMatrix<T>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
    Exp1: Distribution<T>,
    Open01: Distribution<T>,
    R: Rng + ?Sized,
{
    let mu = spec
        .mu
        .ok_or_else(|| CorrError::InvalidParameter("factor model has no mu set".into()))?;
    let two = cast::<T>(2.0);
    if mu <= two {
        return Err(CorrError::InvalidMu(mu.to_f64().unwrap_or(f64::NAN)));
    }
    let gamma_dist = Gamma::new(mu / two, T::one())
        .map_err(|e| CorrError::InvalidParameter(format!("gamma sampler: {e}")))?;
    let half_num = (mu - two) / two;
    simulate_rows(spec, t_len, rng, |rng| {
        let g: T = gamma_dist.sample(rng);
        (half_num / g).sqrt()
    })
}

/// One draw of the shared volatility scale used by the Student sampler
/// (exposed for verification of its unit-second-moment normalization).
pub fn sample_student_scale<T, R>(mu: T, rng: &mut R) -> Result<T>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
    Exp1: Distribution<T>,
    Open01: Distribution<T>,
    R: Rng + ?Sized,
{
    let two = cast::<T>(2.0);
    if mu <= two {
        return Err(CorrError::InvalidMu(mu.to_f64().unwrap_or(f64::NAN)));
    }
    let gamma_dist = Gamma::new(mu / two, T::one())
        .map_err(|e| CorrError::InvalidParameter(format!("gamma sampler: {e}")))?;
    let g: T = gamma_dist.sample(rng);
    Ok(((mu - two) / (two * g)).sqrt())
}
