//! Exact cohomology rings of torus bundles over products of homogeneous
//! spaces, a decision procedure for isomorphism of degree-2 generated graded
//! rings, and numerical curvature checks for shrinking-fiber metrics.

pub mod catalog;
pub mod certify;
pub mod error;
pub mod graded_ring;
pub mod groebner;
pub mod gysin;
pub mod homgeo;
pub mod iso;
pub mod linalg;
pub mod poly;

pub use catalog::{Family, FamilySpec};
pub use certify::{Certificate, CertifyConfig, CertifyError, Check};
pub use error::{CatalogError, GeoError, IsoError, RingError};
pub use graded_ring::{
    find_relations, mult_map, Generator, GradedRingPresentation, MultMap, RingClass,
};
pub use gysin::{
    check_primitive, circle_quotient, torus_quotient, BundleSpec, CircleQuotient, OddVanishing,
    TorusQuotient,
};
pub use homgeo::{Decomposition, LieAlgebraSpec, MetricFamily};
pub use iso::{cube_zero_locus, iso_decide, CubeZeroLocus, IsoDecision, IsoReport};
pub use poly::{Monomial, Poly, Q};
