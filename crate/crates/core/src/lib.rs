//! Form Laplacians on singular spaces: spectra on metric graphs, metric cones
//! and triangulated manifolds, minmax upper-bound certificates, and exact
//! intersection homology for the Hodge cross-check.

pub mod error;
pub mod linalg;
pub mod mesh;
pub mod minmax;
pub mod cone;
pub mod graph;
pub mod io;
pub mod spectrum;
pub mod strata;

pub use error::{Error, Result};
pub use spectrum::{kernel_dimension, Eigenvalue, SolverInfo, SpectralResult};
