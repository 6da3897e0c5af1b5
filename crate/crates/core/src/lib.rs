//! Multivariate analysis in the duality-diagram formalism.
//!
//! A [`Triplet`] `(X, Q, D)` pairs an n×p data matrix with a metric `Q` on
//! the variables and a metric `D` on the individuals. Principal component
//! analysis, correspondence analysis and PCA on instrumental variables are
//! all eigen-analyses of such a triplet ([`methods`]); diagrams on the same
//! individuals are compared with RV coefficients and summarized by STATIS
//! ([`comparison`]).
//!
//! Mahalanobis-metric PCA needs no dedicated constructor: pass
//! `Q = S⁻¹` (the inverse covariance, e.g. `spd_power(&s, -1.0)`).

pub mod comparison;
pub mod error;
pub mod linalg;
pub mod methods;
#[cfg(feature = "random")]
pub mod random;
pub mod triplet;

pub use comparison::{
    coefficient_matrices, covv, interstructure, operator_eigen, rv, statis, DiagramCollection,
    OperatorEigen, StatisBasis, StatisResult,
};
pub use error::{Error, Result};
pub use linalg::{psd_sqrt, spd_check, spd_factor, spd_power, sym_eigen, Matrix, SpdMatrix, SymEigen};
pub use methods::{
    ca_chi2, ca_triplet, column_coordinates, pca_triplet, pcaiv, principal_components,
    uniform_weights, CaTriplet, ContingencyTable, PcaivResult,
};
pub use triplet::{center_columns, center_columns_uniform, DiagramEigen, Triplet};
