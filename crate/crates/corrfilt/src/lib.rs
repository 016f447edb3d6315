//! Filtering of sample correlation matrices of multivariate time series.
//!
//! The crate covers the full pipeline: Pearson estimation, average- and
//! single-linkage hierarchical clustering with the implied ultrametric
//! filtered matrices, correlation-based networks (MST, ALMST, PMFG),
//! bootstrap validation of tree nodes and graph links, hierarchically
//! nested factor models derived from dendrograms (Gaussian and Student-t
//! simulation), Kullback-Leibler distances between correlation structures
//! together with their model-independent Wishart expectations, shrinkage
//! and spectral (random-matrix) filters, and the stability-information
//! evaluation protocol that compares filters against the ideal reference
//! point.
//!
//! Numeric kernels are generic over the scalar type through [`Scalar`]
//! (any `num_traits::Float`, in practice `f32` or `f64`); the `*64`
//! aliases below are the concrete types used by the CLI and tests.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, NumAssign};

pub mod bootstrap;
pub mod error;
pub mod evaluation;
pub mod filters;
pub mod hclust;
pub mod hnfm;
pub mod io;
pub mod kl;
pub mod linalg;
pub mod networks;
mod planarity;
pub mod special;

pub use error::{CorrError, Result};

/// Scalar type the numeric kernels are generic over.
pub trait Scalar:
    Float + NumAssign + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Float + NumAssign + Sum<Self> + Debug + Display + Send + Sync + 'static
{
}

/// Cast an `f64` constant into the working scalar type.
///
/// Panics only if the scalar type cannot represent finite `f64` values at
/// all, which no supported type does.
pub(crate) fn cast<T: Scalar>(x: f64) -> T {
    T::from(x).expect("finite constant representable in scalar type")
}

pub type Matrix64 = linalg::Matrix<f64>;
pub type DataMatrix64 = linalg::DataMatrix<f64>;
pub type CorrelationMatrix64 = linalg::CorrelationMatrix<f64>;
pub type SymmetricEigen64 = linalg::SymmetricEigen<f64>;
pub type Dendrogram64 = hclust::Dendrogram<f64>;
pub type FilteredCorrelationMatrix64 = hclust::FilteredCorrelationMatrix<f64>;
pub type CorrelationGraph64 = networks::CorrelationGraph<f64>;
pub type HnfmSpec64 = hnfm::HnfmSpec<f64>;
pub type StudentParams64 = kl::StudentParams<f64>;
pub type Filter64 = filters::Filter<f64>;
pub type EvaluationReport64 = evaluation::EvaluationReport<f64>;
