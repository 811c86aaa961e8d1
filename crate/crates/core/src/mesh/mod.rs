//! Whitney-form discretization of the form Laplacian on triangulated spaces.

pub mod cochain;
pub mod complex;
pub mod generators;
pub mod quotient;
pub mod whitney;

pub use cochain::{apply_relative_bc, build_complex, CochainSystem};
pub use complex::{LengthOverride, StratifiedComplex};
pub use quotient::{
    empirical_rayleigh, harmonic_dim, hodge_assemble, kernel_basis, kernel_dim, project_off_kernel, quotient_eigenpairs,
    quotient_spectrum, quotient_spectrum_with, QuotientOptions,
};
