//! Classical analyses expressed as triplets: principal component analysis,
//! correspondence analysis and PCA with respect to instrumental variables.

mod ca;
mod pca;
mod pcaiv;

pub use ca::{ca_chi2, ca_triplet, CaTriplet, ContingencyTable};
pub use pca::{column_coordinates, pca_triplet, principal_components, uniform_weights, VAR_TOL};
pub use pcaiv::{pcaiv, PcaivResult, COND_TOL, EIGENGAP_TOL};
