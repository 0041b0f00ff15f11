//! Curvature tensor, curvature operator on 2-vectors, and Ricci form.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use super::metric::MetricFamily;
use crate::error::GeoError;

/// Residual bound for the symmetric eigenproblem.
pub const EIGEN_TOL: f64 = 1e-8;

/// `R(X,Y,Z,W)` with `R(X,Y,Y,X) = <R(X,Y)Y,X>_t`, by polarization of the
/// biquadratic form `k(X,Y)`.
pub fn curvature_tensor(
    mf: &MetricFamily,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<f64, GeoError> {
    for v in [x, y, z, w] {
        mf.check_tangent(v)?;
    }
    Ok(tensor_unchecked(mf, x, y, z, w))
}

/// The `s t` coefficient of `k(X + s W, Y + t Z)`, via four evaluations at `s, t = +-1`.
fn mixed(
    mf: &MetricFamily,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    w: &DVector<f64>,
) -> f64 {
    let xp = x + w;
    let xm = x - w;
    let yp = y + z;
    let ym = y - z;
    (mf.quartic(&xp, &yp) - mf.quartic(&xp, &ym) - mf.quartic(&xm, &yp) + mf.quartic(&xm, &ym))
        / 4.0
}

pub(crate) fn tensor_unchecked(
    mf: &MetricFamily,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    w: &DVector<f64>,
) -> f64 {
    (mixed(mf, x, y, z, w) - mixed(mf, x, y, w, z)) / 6.0
}

#[derive(Clone, Debug)]
pub struct CurvatureOperator {
    /// Index pairs `(i, j)`, `i < j`, of the wedge basis `e_i ^ e_j`.
    pub pairs: Vec<(usize, usize)>,
    /// `M[(ij),(kl)] = R(e_i, e_j, e_l, e_k)` in the frame of the metric family.
    pub matrix: DMatrix<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenWitness {
    pub value: f64,
    /// Coordinates in the basis the matrix was assembled in.
    pub vector: Vec<f64>,
    pub residual: f64,
}

pub fn curvature_operator(mf: &MetricFamily) -> CurvatureOperator {
    let n = mf.tangent_dim();
    let frame: Vec<DVector<f64>> = (0..n).map(|i| mf.frame().column(i).into_owned()).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let m = pairs.len();
    let entries: Vec<(usize, usize, f64)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|a| {
            let (i, j) = pairs[a];
            let frame = &frame;
            let pairs = &pairs;
            (a..m).map(move |b| {
                let (k, l) = pairs[b];
                (
                    a,
                    b,
                    tensor_unchecked(mf, &frame[i], &frame[j], &frame[l], &frame[k]),
                )
            })
        })
        .collect();
    let mut matrix = DMatrix::zeros(m, m);
    for (a, b, v) in entries {
        matrix[(a, b)] = v;
        matrix[(b, a)] = v;
    }
    CurvatureOperator { pairs, matrix }
}

/// Minimum eigenpair of a symmetric matrix with its residual `|M v - lambda v|`.
pub fn min_eigen(matrix: &DMatrix<f64>) -> Result<EigenWitness, GeoError> {
    let eig = SymmetricEigen::new(matrix.clone());
    let (idx, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(GeoError::EigenFailure { residual: f64::NAN })?;
    let v = eig.eigenvectors.column(idx).into_owned();
    let residual = (matrix * &v - &v * value).norm();
    if residual.is_nan() || residual > EIGEN_TOL * matrix.amax().max(1.0) {
        return Err(GeoError::EigenFailure { residual });
    }
    Ok(EigenWitness {
        value,
        vector: v.iter().copied().collect(),
        residual,
    })
}

impl CurvatureOperator {
    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn symmetry_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    pub fn min_eigen(&self) -> Result<EigenWitness, GeoError> {
        min_eigen(&self.matrix)
    }

    /// Rayleigh quotient of a 2-vector given in wedge coordinates.
    pub fn rayleigh(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        v.dot(&(&self.matrix * &v)) / v.norm_squared()
    }
}

pub fn curvature_operator_min_eig(mf: &MetricFamily) -> Result<EigenWitness, GeoError> {
    curvature_operator(mf).min_eigen()
}

#[derive(Clone, Debug, Serialize)]
pub struct RicciReport {
    pub min: f64,
    /// Minimizing unit direction in frame coordinates.
    pub direction: Vec<f64>,
    pub trace: f64,
    #[serde(skip)]
    pub matrix: DMatrix<f64>,
}

/// Ricci form `Ric(X,X) = sum_i k(X, e_i)` in the frame of the metric family.
pub fn ricci(mf: &MetricFamily) -> Result<RicciReport, GeoError> {
    let n = mf.tangent_dim();
    let frame: Vec<DVector<f64>> = (0..n).map(|i| mf.frame().column(i).into_owned()).collect();
    let q = |v: &DVector<f64>| frame.iter().map(|e| mf.quartic(v, e)).sum::<f64>();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries: Vec<(usize, usize, f64)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let v = if a == b {
                q(&frame[a])
            } else {
                (q(&(&frame[a] + &frame[b])) - q(&(&frame[a] - &frame[b]))) / 4.0
            };
            (a, b, v)
        })
        .collect();
    let mut matrix = DMatrix::zeros(n, n);
    for (a, b, v) in entries {
        matrix[(a, b)] = v;
        matrix[(b, a)] = v;
    }
    let w = min_eigen(&matrix)?;
    Ok(RicciReport {
        min: w.value,
        direction: w.vector,
        trace: matrix.trace(),
        matrix,
    })
}

pub fn ricci_min(mf: &MetricFamily) -> Result<f64, GeoError> {
    Ok(ricci(mf)?.min)
}

/// Independent curvature of the base from the Levi-Civita connection of the
/// left-invariant metric on `G` and the submersion `G -> G / H_rho`.
pub mod oracle {
    use super::*;

    /// `nabla_X Y = 1/2 ([X,Y] - ad*_X Y - ad*_Y X)` on left-invariant fields.
    pub fn connection(mf: &MetricFamily, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        (mf.bracket(x, y) - mf.ad_star(x, y) - mf.ad_star(y, x)) * 0.5
    }

    /// `<R(X,Y)Z, W>_t` on `G` with `R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]`.
    pub fn group_tensor(
        mf: &MetricFamily,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        let yz = connection(mf, y, z);
        let xz = connection(mf, x, z);
        let r =
            connection(mf, x, &yz) - connection(mf, y, &xz) - connection(mf, &mf.bracket(x, y), z);
        mf.inner(&r, w)
    }

    /// `A_X Y = 1/2 [X,Y]_{h_rho}` for horizontal `X, Y`.
    pub fn integrability(mf: &MetricFamily, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        mf.ph() * mf.bracket(x, y) * 0.5
    }

    /// Base tensor for horizontal arguments.
    pub fn base_tensor(
        mf: &MetricFamily,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        let a = |u: &DVector<f64>, v: &DVector<f64>| integrability(mf, u, v);
        group_tensor(mf, x, y, z, w) - 2.0 * mf.inner(&a(x, y), &a(z, w))
            + mf.inner(&a(y, z), &a(x, w))
            - mf.inner(&a(x, z), &a(y, w))
    }
}
