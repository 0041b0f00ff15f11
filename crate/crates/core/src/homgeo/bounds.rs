//! Random orthonormal planes and extremal curvature search.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::lie::LieAlgebraSpec;
use super::metric::{MetricFamily, SplitPair};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Haar-random orthonormal pair in `R^n` (Gram-Schmidt on Gaussians).
pub fn orthonormal_pair(rng: &mut impl Rng, n: usize) -> (DVector<f64>, DVector<f64>) {
    let u = gaussian(rng, n).normalize();
    let mut v = gaussian(rng, n);
    v -= &u * u.dot(&v);
    (u, v.normalize())
}

/// Random `<.,.>_t`-orthonormal pair of tangent vectors, split into parts.
pub fn admissible_pair(mf: &MetricFamily, rng: &mut impl Rng) -> SplitPair {
    let (u, v) = orthonormal_pair(rng, mf.tangent_dim());
    let (x1, x2) = mf.split(&mf.from_frame(&u));
    let (y1, y2) = mf.split(&mf.from_frame(&v));
    SplitPair { x1, x2, y1, y2 }
}

#[derive(Clone, Debug, Serialize)]
pub struct Plane {
    /// Orthonormal frame coordinates of the two spanning vectors.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub value: f64,
}

impl Plane {
    fn new(u: &DVector<f64>, v: &DVector<f64>, value: f64) -> Self {
        Plane {
            u: u.iter().copied().collect(),
            v: v.iter().copied().collect(),
            value,
        }
    }

    /// Re-evaluates the sectional curvature from the stored vectors.
    pub fn reevaluate(&self, mf: &MetricFamily) -> f64 {
        let u = DVector::from_column_slice(&self.u);
        let v = DVector::from_column_slice(&self.v);
        plane_value(mf, &u, &v)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SecBounds {
    pub min: Plane,
    pub max: Plane,
    pub samples: usize,
    pub refine_steps: usize,
}

fn plane_value(mf: &MetricFamily, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    mf.quartic(&mf.from_frame(u), &mf.from_frame(v))
}

/// Matrix of `v -> k(X, v)` in frame coordinates.
fn jacobi_matrix(mf: &MetricFamily, u: &DVector<f64>) -> DMatrix<f64> {
    let n = mf.tangent_dim();
    let x = mf.from_frame(u);
    let cols: Vec<DVector<f64>> = (0..n).map(|i| mf.frame().column(i).into_owned()).collect();
    let diag: Vec<f64> = cols.iter().map(|e| mf.quartic(&x, e)).collect();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        for j in i + 1..n {
            let v = (mf.quartic(&x, &(&cols[i] + &cols[j])) - diag[i] - diag[j]) / 2.0;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Extremal eigenvector of `m` restricted to the complement of `u`.
fn extremal_orthogonal(m: &DMatrix<f64>, u: &DVector<f64>, maximize: bool) -> DVector<f64> {
    let n = u.len();
    let proj = DMatrix::identity(n, n) - u * u.transpose();
    let bound = m.amax() * n as f64 + 1.0;
    let shift = if maximize { -2.0 * bound } else { 2.0 * bound };
    // push the u direction away from the end of the spectrum we are after
    let pm = &proj * m * &proj + u * u.transpose() * shift;
    let eig = SymmetricEigen::new(pm);
    let pick = eig
        .eigenvalues
        .iter()
        .enumerate()
        .reduce(|a, b| if (b.1 > a.1) == maximize { b } else { a })
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut v = eig.eigenvectors.column(pick).into_owned();
    v -= u * u.dot(&v);
    v.normalize()
}

/// Alternating Jacobi-operator refinement of a plane.
fn refine(
    mf: &MetricFamily,
    mut u: DVector<f64>,
    mut v: DVector<f64>,
    steps: usize,
    maximize: bool,
) -> Plane {
    let mut best = plane_value(mf, &u, &v);
    for _ in 0..steps {
        let nv = extremal_orthogonal(&jacobi_matrix(mf, &u), &u, maximize);
        let val = plane_value(mf, &u, &nv);
        let improved = if maximize { val > best } else { val < best };
        if !improved {
            break;
        }
        best = val;
        v = nv;
        std::mem::swap(&mut u, &mut v);
    }
    Plane::new(&u, &v, plane_value(mf, &u, &v))
}

/// Extremal sectional curvatures from random planes, the best few refined.
pub fn sec_bounds(mf: &MetricFamily, samples: usize, refine_steps: usize, seed: u64) -> SecBounds {
    let samples = samples.max(1);
    let mut r = rng(seed);
    let planes: Vec<(DVector<f64>, DVector<f64>)> = (0..samples)
        .map(|_| orthonormal_pair(&mut r, mf.tangent_dim()))
        .collect();
    let values: Vec<f64> = planes
        .par_iter()
        .map(|(u, v)| plane_value(mf, u, v))
        .collect();
    let mut order: Vec<usize> = (0..samples).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let starts = 4.min(samples);
    let pick = |idx: &[usize], maximize: bool| -> Plane {
        idx.par_iter()
            .map(|&i| {
                refine(
                    mf,
                    planes[i].0.clone(),
                    planes[i].1.clone(),
                    refine_steps,
                    maximize,
                )
            })
            .collect::<Vec<_>>()
            .into_iter()
            .reduce(|a, b| {
                if (b.value > a.value) == maximize {
                    b
                } else {
                    a
                }
            })
            .expect("at least one start")
    };
    let min = pick(&order[..starts], false);
    let max = pick(&order[samples - starts..], true);
    SecBounds {
        min,
        max,
        samples,
        refine_steps,
    }
}

/// Largest `|[X,Y]|^2` over orthonormal `X, Y` in the algebra found by
/// alternating top singular vectors of `ad`.
pub fn bracket_norm_bound(g: &LieAlgebraSpec, restarts: usize, steps: usize, seed: u64) -> f64 {
    let n = g.dim();
    let mut r = rng(seed);
    let starts: Vec<DVector<f64>> = (0..restarts.max(1))
        .map(|_| gaussian(&mut r, n).normalize())
        .collect();
    starts
        .par_iter()
        .map(|x0| {
            let mut x = x0.clone();
            let mut best = 0.0f64;
            for _ in 0..steps.max(1) {
                let ad = g.ad(&x);
                let y = extremal_orthogonal(&(ad.transpose() * &ad), &x, true);
                let val = g.bracket(&x, &y).norm_squared();
                if val <= best * (1.0 + 1e-15) {
                    best = best.max(val);
                    break;
                }
                best = val;
                x = y;
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}
