//! The family `<X,Y>_t = <X_m1,Y_m1> + t^2 <X_m2,Y_m2> + t^2 <X_h,Y_h>` and
//! the sectional-curvature form of `G / H_rho` it induces.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::decomposition::Decomposition;
use crate::error::GeoError;

/// Relative tolerance for "vector lies in a subspace".
pub const SUBSPACE_TOL: f64 = 1e-10;

pub fn shrink_parameter(t: f64) -> Result<f64, GeoError> {
    if t.is_nan() || t <= 0.0 {
        return Err(GeoError::NonpositiveT { t });
    }
    if t > 1.0 {
        return Err(GeoError::TAboveOne { t });
    }
    Ok(t)
}

#[derive(Clone, Debug)]
pub struct MetricFamily {
    pub decomp: Arc<Decomposition>,
    t: f64,
    t2: f64,
    p1: DMatrix<f64>,
    p2: DMatrix<f64>,
    ph: DMatrix<f64>,
    frame: DMatrix<f64>,
}

/// The four terms of the sectional-curvature form, each evaluated directly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SecTerms {
    /// `|ad*_X Y + ad*_Y X|_t^2`
    pub a: f64,
    /// `<ad*_X X, ad*_Y Y>_t`
    pub b: f64,
    /// `|[X,Y]_m|_t^2`
    pub c: f64,
    /// `-1/2 (<[[X,Y],Y],X>_t + <[[Y,X],X],Y>_t)`
    pub d: f64,
}

impl SecTerms {
    /// `a - b - 3/4 c + d`, the combination with unit weight on `a`.
    pub fn as_displayed(&self) -> f64 {
        self.a - self.b - 0.75 * self.c + self.d
    }

    /// `1/4 a - b - 3/4 c + d`, the Levi-Civita curvature `<R(X,Y)Y,X>_t`.
    pub fn curvature(&self) -> f64 {
        0.25 * self.a - self.b - 0.75 * self.c + self.d
    }
}

/// Split tangent vectors `X^t = X1 + X2 / t` with `X1 in m1`, `X2 in m2`.
#[derive(Clone, Debug)]
pub struct SplitPair {
    pub x1: DVector<f64>,
    pub x2: DVector<f64>,
    pub y1: DVector<f64>,
    pub y2: DVector<f64>,
}

/// Closed forms of the four terms in the split variables, plus the
/// resulting closed forms for the curvature.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SplitClosedForms {
    pub terms: SecTerms,
    /// Combination of `terms` with unit weight on `a`.
    pub displayed: f64,
    /// `(1 - t^2)|[X1,Y1]|^2 + (3/4 (t^2 + 1/t^2) - 3/2)|[X1,Y2] - [X2,Y1]|^2`.
    pub displayed_lower_bound: f64,
    /// `|[X1,Y1]|^2 - 3/4 t^2 |[X1,Y1]_m2|^2 + t^2/4 |[X1,Y2] + [X2,Y1]|^2`.
    pub levi_civita: f64,
}

impl MetricFamily {
    pub fn new(decomp: Arc<Decomposition>, t: f64) -> Result<Self, GeoError> {
        let t = shrink_parameter(t)?;
        let p1 = decomp.p1();
        let p2 = decomp.p2();
        let ph = decomp.ph();
        let mut cols: Vec<DVector<f64>> = decomp.m1.column_iter().map(|c| c.into_owned()).collect();
        cols.extend(decomp.m2.column_iter().map(|c| c.into_owned() / t));
        let frame = DMatrix::from_columns(&cols);
        Ok(MetricFamily {
            decomp,
            t,
            t2: t * t,
            p1,
            p2,
            ph,
            frame,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.decomp.dim()
    }

    pub fn tangent_dim(&self) -> usize {
        self.frame.ncols()
    }

    /// `<.,.>_t`-orthonormal basis of `m1 + m2` as columns (`m1` first).
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn p1(&self) -> &DMatrix<f64> {
        &self.p1
    }

    pub fn p2(&self) -> &DMatrix<f64> {
        &self.p2
    }

    pub fn ph(&self) -> &DMatrix<f64> {
        &self.ph
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.decomp.algebra.bracket(x, y)
    }

    /// `f_r`: identity on `m1`, multiplication by `r` on `m2 + h_rho`.
    pub fn rescale(&self, r: f64, v: &DVector<f64>) -> DVector<f64> {
        let v1 = &self.p1 * v;
        &v1 + (v - &v1) * r
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let x1 = &self.p1 * x;
        let y1 = &self.p1 * y;
        let m1 = x1.dot(&y1);
        m1 + self.t2 * (x.dot(y) - m1)
    }

    pub fn norm_sq(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x)
    }

    /// `ad_X^{*_t} Y = f_{1/t^2}(-[X, f_{t^2} Y])`.
    pub fn ad_star(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let fy = self.rescale(self.t2, y);
        let br = self.bracket(x, &fy);
        self.rescale(1.0 / self.t2, &(-br))
    }

    pub fn ad_star_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            m.set_column(j, &self.ad_star(x, &e));
        }
        m
    }

    pub fn check_tangent(&self, x: &DVector<f64>) -> Result<(), GeoError> {
        if x.len() != self.dim() {
            return Err(GeoError::WrongLength {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let residual = (&self.ph * x).norm();
        if residual > SUBSPACE_TOL * x.norm().max(1.0) {
            return Err(GeoError::NotTangent { residual });
        }
        Ok(())
    }

    fn check_in(
        &self,
        x: &DVector<f64>,
        proj: &DMatrix<f64>,
        space: &'static str,
    ) -> Result<(), GeoError> {
        if x.len() != self.dim() {
            return Err(GeoError::WrongLength {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let residual = (x - proj * x).norm();
        if residual > SUBSPACE_TOL * x.norm().max(1.0) {
            return Err(GeoError::WrongSubspace { space, residual });
        }
        Ok(())
    }

    pub fn sec_terms(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<SecTerms, GeoError> {
        self.check_tangent(x)?;
        self.check_tangent(y)?;
        Ok(self.terms_unchecked(x, y))
    }

    pub(crate) fn terms_unchecked(&self, x: &DVector<f64>, y: &DVector<f64>) -> SecTerms {
        let axy = self.ad_star(x, y);
        let ayx = self.ad_star(y, x);
        let s = &axy + &ayx;
        let a = self.norm_sq(&s);
        let b = self.inner(&self.ad_star(x, x), &self.ad_star(y, y));
        let br = self.bracket(x, y);
        let bm = &br - &self.ph * &br;
        let c = self.norm_sq(&bm);
        let d = -0.5
            * (self.inner(&self.bracket(&br, y), x) + self.inner(&self.bracket(&(-&br), x), y));
        SecTerms { a, b, c, d }
    }

    /// Unnormalized `<R(X,Y)Y,X>_t` for tangent `X, Y`.
    pub fn sec_quadrilinear(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64, GeoError> {
        Ok(self.sec_terms(x, y)?.curvature())
    }

    pub(crate) fn quartic(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.terms_unchecked(x, y).curvature()
    }

    /// Sectional curvature of the plane spanned by `X, Y`.
    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64, GeoError> {
        let k = self.sec_quadrilinear(x, y)?;
        let area = self.norm_sq(x) * self.norm_sq(y) - self.inner(x, y).powi(2);
        Ok(k / area)
    }

    /// Tangent vector with coordinates `u` in [`Self::frame`].
    pub fn from_frame(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.frame * u
    }

    /// `X^t = X1 + X2 / t`.
    pub fn assemble(&self, v1: &DVector<f64>, v2: &DVector<f64>) -> DVector<f64> {
        v1 + v2 / self.t
    }

    /// Inverse of [`Self::assemble`].
    pub fn split(&self, x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (&self.p1 * x, (&self.p2 * x) * self.t)
    }

    pub fn check_split(&self, s: &SplitPair) -> Result<(), GeoError> {
        self.check_in(&s.x1, &self.p1, "m1")?;
        self.check_in(&s.y1, &self.p1, "m1")?;
        self.check_in(&s.x2, &self.p2, "m2")?;
        self.check_in(&s.y2, &self.p2, "m2")?;
        let xx = s.x1.norm_squared() + s.x2.norm_squared();
        let yy = s.y1.norm_squared() + s.y2.norm_squared();
        let xy = s.x1.dot(&s.y1) + s.x2.dot(&s.y2);
        let residual = (xx - 1.0).abs().max((yy - 1.0).abs()).max(xy.abs());
        if residual > SUBSPACE_TOL {
            return Err(GeoError::NotOrthonormal { residual });
        }
        Ok(())
    }

    /// Closed forms of the terms in the split variables.
    pub fn split_closed_forms(&self, s: &SplitPair) -> Result<SplitClosedForms, GeoError> {
        self.check_split(s)?;
        let t2 = self.t2;
        let b11 = self.bracket(&s.x1, &s.y1);
        let b11_m2 = &self.p2 * &b11;
        let p = self.bracket(&s.x1, &s.y2);
        let q = self.bracket(&s.x2, &s.y1);
        let pp = p.norm_squared();
        let qq = q.norm_squared();
        let pq = p.dot(&q);
        let n11 = b11.norm_squared();
        let n11_m2 = b11_m2.norm_squared();
        let s2 = (self.t - 1.0 / self.t).powi(2);
        let terms = SecTerms {
            a: s2 * (pp + qq - 2.0 * pq),
            b: -s2 * pq,
            c: t2 * n11_m2 + (pp + qq + 2.0 * pq) / t2,
            d: n11 + 0.5 * (1.0 + 1.0 / t2) * (pp + qq + 2.0 * pq),
        };
        let diff = (&p - &q).norm_squared();
        let sum = (&p + &q).norm_squared();
        Ok(SplitClosedForms {
            terms,
            displayed: n11 - 0.75 * t2 * n11_m2 + (t2 + 0.75 / t2 - 1.5) * diff + t2 * pq,
            displayed_lower_bound: (1.0 - t2) * n11 + (0.75 * (t2 + 1.0 / t2) - 1.5) * diff,
            levi_civita: n11 - 0.75 * t2 * n11_m2 + 0.25 * t2 * sum,
        })
    }

    /// Terms evaluated directly at `X^t, Y^t`.
    pub fn split_terms(&self, s: &SplitPair) -> Result<SecTerms, GeoError> {
        self.check_split(s)?;
        let x = self.assemble(&s.x1, &s.x2);
        let y = self.assemble(&s.y1, &s.y2);
        self.sec_terms(&x, &y)
    }

    /// Normal-homogeneous form `1/4 |[X,Y]_m|^2 + |[X,Y]_h|^2` (bi-invariant norms).
    pub fn normal_homogeneous_form(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let br = self.bracket(x, y);
        let bh = &self.ph * &br;
        0.25 * (&br - &bh).norm_squared() + bh.norm_squared()
    }
}
