//! Constructive eigenvalue upper bounds from bump-form box families.

pub mod bounds;
pub mod bump;

pub use crate::mesh::quotient::empirical_rayleigh;
pub use bounds::{bilipschitz_envelope, certificate, dyadic_level, weyl_fit, RayleighCertificate, WeylFit};
pub use bump::{box_family, bump_profile, bump_profile_with, BoxFamily, BumpProfile, QuotientConvention};
