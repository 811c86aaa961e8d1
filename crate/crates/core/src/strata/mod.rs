//! Stratifications, perversities and exact intersection homology, with the
//! cross-check against harmonic-form dimensions.

pub mod crosscheck;
pub mod homology;
pub mod ih;
pub mod perversity;
pub mod stratify;

pub use crosscheck::{hodge_cross_check, hodge_cross_check_with, CrossCheckOptions, CrossCheckReport, CrossCheckSpace, DegreeCheck};
pub use homology::{reduced_betti, simplicial_betti};
pub use ih::{allowable, ih_betti, ih_betti_relative, IHResult};
pub use perversity::{gm_perversity, Perversity};
pub use stratify::stratify_multiconical;
