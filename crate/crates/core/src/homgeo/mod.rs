//! Numerical geometry of `G / H_rho` with the fiber-shrinking metrics `g_t`.

pub mod bounds;
pub mod curvature;
pub mod decomposition;
pub mod diameter;
pub mod lie;
pub mod metric;

use std::sync::Arc;

use serde::Serialize;

pub use bounds::{admissible_pair, bracket_norm_bound, sec_bounds, Plane, SecBounds};
pub use curvature::{
    curvature_operator, curvature_operator_min_eig, curvature_tensor, ricci, ricci_min,
    CurvatureOperator, EigenWitness, RicciReport,
};
pub use decomposition::{build_decomposition, Decomposition, HomogeneousLayout, Isotropy};
pub use diameter::{
    covering_radius, covering_radius_brute_force, diameter_upper_bound, DiameterBound,
};
pub use lie::{su_basis, Factor, LieAlgebraSpec};
pub use metric::{shrink_parameter, MetricFamily, SecTerms, SplitClosedForms, SplitPair};

use crate::error::GeoError;

/// How much work a curvature report does.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReportOptions {
    pub samples: usize,
    pub refine_steps: usize,
    pub seed: u64,
    /// Assemble and diagonalize the curvature operator on 2-vectors.
    pub operator: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureRecord {
    pub t: f64,
    pub min_sec: f64,
    pub max_sec: f64,
    pub min_plane: Plane,
    pub max_plane: Plane,
    pub ricci_min: f64,
    pub ricci_direction: Vec<f64>,
    pub lambda_min: Option<f64>,
    pub lambda_residual: Option<f64>,
    pub diameter: f64,
    pub lambda_min_d2: Option<f64>,
}

pub fn curvature_record(
    decomp: &Arc<Decomposition>,
    t: f64,
    opts: &ReportOptions,
) -> Result<CurvatureRecord, GeoError> {
    let mf = MetricFamily::new(Arc::clone(decomp), t)?;
    let bounds = sec_bounds(&mf, opts.samples, opts.refine_steps, opts.seed);
    let ric = ricci(&mf)?;
    let d = diameter_upper_bound(&decomp.algebra)?.value;
    let eig = if opts.operator {
        Some(curvature_operator_min_eig(&mf)?)
    } else {
        None
    };
    Ok(CurvatureRecord {
        t,
        min_sec: bounds.min.value,
        max_sec: bounds.max.value,
        min_plane: bounds.min,
        max_plane: bounds.max,
        ricci_min: ric.min,
        ricci_direction: ric.direction,
        lambda_min: eig.as_ref().map(|e| e.value),
        lambda_residual: eig.as_ref().map(|e| e.residual),
        diameter: d,
        lambda_min_d2: eig.as_ref().map(|e| e.value * d * d),
    })
}
