//! Isomorphism of graded rings generated in degree 2, decided through the
//! cube-zero locus and small polynomial systems.

mod decide;
pub mod locus;
pub mod solve;

pub use decide::{
    induced_map_wellformed, iso_decide, IsoDecision, IsoReport, Refutation, Shape, ShapeOutcome,
    WellFormedness,
};
pub use locus::{cube_zero_locus, CubeZeroLocus, LocusComponent, LocusSignature};
pub use solve::{solve_small_system, SystemOutcome, UnitCertificate};
