//! Reductive splitting `g = h_rho + m2 + m1` for `G / H_rho`, where
//! `K = H x T` and `H_rho` is the graph of a homomorphism `rho: H -> T`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::lie::{Factor, LieAlgebraSpec, STRUCTURE_TOL};
use crate::error::GeoError;

/// Isotropy inside one `su(n)` factor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Isotropy {
    /// `s(u(1) + ... + u(1))`.
    MaximalTorus,
    /// `s(u(n_1) + u(n_2) + ...)` along consecutive diagonal blocks.
    BlockDiagonal(Vec<usize>),
}

impl Isotropy {
    fn parts(&self, n: usize) -> Vec<usize> {
        match self {
            Isotropy::MaximalTorus => (0..n).collect(),
            Isotropy::BlockDiagonal(sizes) => {
                let mut out = Vec::new();
                for (p, &s) in sizes.iter().enumerate() {
                    out.extend(std::iter::repeat_n(p, s));
                }
                out
            }
        }
    }
}

/// Which subgroup is divided out.
#[derive(Clone, Debug)]
pub struct HomogeneousLayout {
    /// One entry per `su` factor, in order.
    pub isotropy: Vec<Isotropy>,
    /// Index (among the algebra's factors) of the torus carrying the fiber.
    pub fiber_block: usize,
    /// `weights[j][b][k]`: coefficient of the diagonal character `Im X_kk` of
    /// the `b`-th `su` factor in the `j`-th fiber coordinate of `rho_*`.
    pub weights: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub algebra: Arc<LieAlgebraSpec>,
    /// Orthonormal basis of `h` (before twisting), as columns.
    pub h: DMatrix<f64>,
    pub fiber: DMatrix<f64>,
    /// `rho_*` in the bases `h` and `fiber` (rows: fiber coordinates).
    pub rho: DMatrix<f64>,
    pub h_rho: DMatrix<f64>,
    pub m2: DMatrix<f64>,
    pub m1: DMatrix<f64>,
    pub residuals: Vec<(String, f64)>,
}

/// Gram-Schmidt on columns; fails on rank drop.
fn orthonormalize(cols: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>, GeoError> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(cols.ncols());
    for c in cols.column_iter() {
        let mut v = c.into_owned();
        for _ in 0..2 {
            for u in &out {
                let p = u.dot(&v);
                v -= u * p;
            }
        }
        let n = v.norm();
        if n < 1e-9 {
            return Err(GeoError::DimensionMismatch {
                what: format!("{what} is rank deficient"),
            });
        }
        out.push(v / n);
    }
    if out.is_empty() {
        return Ok(DMatrix::zeros(cols.nrows(), 0));
    }
    Ok(DMatrix::from_columns(&out))
}

fn columns_from(dim: usize, idx: &[usize]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        m[(i, c)] = 1.0;
    }
    m
}

pub fn build_decomposition(
    algebra: Arc<LieAlgebraSpec>,
    layout: &HomogeneousLayout,
) -> Result<Decomposition, GeoError> {
    let n = algebra.dim();
    let su_blocks: Vec<usize> = algebra
        .blocks()
        .iter()
        .enumerate()
        .filter(|(_, b)| matches!(b.factor, Factor::Su(_)))
        .map(|(i, _)| i)
        .collect();
    if layout.isotropy.len() != su_blocks.len() {
        return Err(GeoError::DimensionMismatch {
            what: format!(
                "{} isotropy entries for {} su factors",
                layout.isotropy.len(),
                su_blocks.len()
            ),
        });
    }
    let fiber_block = algebra
        .blocks()
        .get(layout.fiber_block)
        .filter(|b| matches!(b.factor, Factor::Torus(_)))
        .ok_or_else(|| GeoError::DimensionMismatch {
            what: format!("factor {} is not a torus", layout.fiber_block),
        })?;
    let fiber_idx: Vec<usize> = fiber_block.range().collect();
    if layout.weights.len() != fiber_idx.len() {
        return Err(GeoError::DimensionMismatch {
            what: format!(
                "{} weight rows for a fiber of rank {}",
                layout.weights.len(),
                fiber_idx.len()
            ),
        });
    }

    // isotropy basis: Cartan elements plus root pairs inside a diagonal block
    let mut h_idx = Vec::new();
    for (s, &b) in su_blocks.iter().enumerate() {
        let block = &algebra.blocks()[b];
        let Factor::Su(m) = block.factor else {
            unreachable!()
        };
        let parts = layout.isotropy[s].parts(m);
        if parts.len() != m {
            return Err(GeoError::DimensionMismatch {
                what: format!("isotropy partition of su({m})"),
            });
        }
        h_idx.extend(block.offset..block.offset + m - 1);
        let mut a = block.offset + m - 1;
        for j in 0..m {
            for k in j + 1..m {
                if parts[j] == parts[k] {
                    h_idx.push(a);
                    h_idx.push(a + 1);
                }
                a += 2;
            }
        }
    }
    let h = columns_from(n, &h_idx);
    let fiber = columns_from(n, &fiber_idx);

    // rho_* on each h basis vector through the diagonal characters
    let mut rho: DMatrix<f64> = DMatrix::zeros(fiber_idx.len(), h_idx.len());
    for (j, row) in layout.weights.iter().enumerate() {
        if row.len() != su_blocks.len() {
            return Err(GeoError::DimensionMismatch {
                what: format!("weight row {j} has {} blocks", row.len()),
            });
        }
        for (s, &b) in su_blocks.iter().enumerate() {
            let block = &algebra.blocks()[b];
            let w = &row[s];
            if w.len() != block.matrices[0].nrows() {
                return Err(GeoError::DimensionMismatch {
                    what: format!("weight vector of block {s}"),
                });
            }
            for &weight in w {
                if (weight - weight.round()).abs() > STRUCTURE_TOL {
                    return Err(GeoError::WeightNotIntegral { weight });
                }
            }
            for (c, &i) in h_idx.iter().enumerate() {
                if !block.range().contains(&i) {
                    continue;
                }
                let e = &block.matrices[i - block.offset];
                rho[(j, c)] = w.iter().enumerate().map(|(k, wk)| wk * e[(k, k)].im).sum();
            }
        }
    }

    // rho must kill [h, h]
    let mut hom: f64 = 0.0;
    for a in 0..h_idx.len() {
        for b in a + 1..h_idx.len() {
            let br = algebra.bracket(&h.column(a).into_owned(), &h.column(b).into_owned());
            let coords = h.transpose() * &br;
            if (&h * &coords - &br).amax() > STRUCTURE_TOL {
                return Err(GeoError::DimensionMismatch {
                    what: "isotropy is not a subalgebra".into(),
                });
            }
            hom = hom.max((&rho * coords).amax());
        }
    }
    if hom > STRUCTURE_TOL {
        return Err(GeoError::NotHomomorphism { residual: hom });
    }

    let h_rho = orthonormalize(&h + &fiber * &rho, "h_rho")?;
    let m2 = orthonormalize(&fiber - &h * rho.transpose(), "m2")?;
    let k_idx: Vec<usize> = {
        let mut v: Vec<usize> = h_idx.iter().chain(&fiber_idx).copied().collect();
        v.sort_unstable();
        v
    };
    let m1_idx: Vec<usize> = (0..n).filter(|i| k_idx.binary_search(i).is_err()).collect();
    let m1 = columns_from(n, &m1_idx);

    let mut d = Decomposition {
        algebra,
        h,
        fiber,
        rho,
        h_rho,
        m2,
        m1,
        residuals: Vec::new(),
    };
    d.residuals = d.bracket_residuals();
    if let Some((which, residual)) = d
        .residuals
        .iter()
        .find(|(w, r)| w != SYMMETRIC_PAIR && *r > STRUCTURE_TOL)
    {
        return Err(GeoError::BracketInclusion {
            which: which.clone(),
            residual: *residual,
        });
    }
    let ortho = d.orthogonality_residual();
    if ortho > STRUCTURE_TOL {
        return Err(GeoError::NotOrthonormal { residual: ortho });
    }
    Ok(d)
}

/// The inclusion that holds only when `G/K` is a symmetric pair. It is
/// reported, not enforced.
pub const SYMMETRIC_PAIR: &str = "[m1,m1] in k";

fn projector(b: &DMatrix<f64>) -> DMatrix<f64> {
    b * b.transpose()
}

impl Decomposition {
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Dimension of `m1 + m2`, the tangent space of `G / H_rho`.
    pub fn tangent_dim(&self) -> usize {
        self.m1.ncols() + self.m2.ncols()
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.h_rho.ncols(), self.m2.ncols(), self.m1.ncols())
    }

    pub fn p1(&self) -> DMatrix<f64> {
        projector(&self.m1)
    }

    pub fn p2(&self) -> DMatrix<f64> {
        projector(&self.m2)
    }

    pub fn ph(&self) -> DMatrix<f64> {
        projector(&self.h_rho)
    }

    /// Whether `[m1, m1] in k` holds, as it does for products of projective planes.
    pub fn is_symmetric_pair(&self) -> bool {
        self.residuals
            .iter()
            .any(|(w, r)| w == SYMMETRIC_PAIR && *r <= STRUCTURE_TOL)
    }

    /// `k = h_rho + m2` as columns.
    pub fn k(&self) -> DMatrix<f64> {
        let mut cols: Vec<DVector<f64>> =
            self.h_rho.column_iter().map(|c| c.into_owned()).collect();
        cols.extend(self.m2.column_iter().map(|c| c.into_owned()));
        DMatrix::from_columns(&cols)
    }

    /// `max |B^T B - I|` over the stacked bases, including cross terms.
    pub fn orthogonality_residual(&self) -> f64 {
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for b in [&self.h_rho, &self.m2, &self.m1] {
            cols.extend(b.column_iter().map(|c| c.into_owned()));
        }
        if cols.len() != self.dim() {
            return f64::INFINITY;
        }
        let b = DMatrix::from_columns(&cols);
        (b.transpose() * b - DMatrix::identity(self.dim(), self.dim())).amax()
    }

    fn inclusion(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, target: Option<&DMatrix<f64>>) -> f64 {
        let g = &self.algebra;
        let mut worst: f64 = 0.0;
        for x in a.column_iter() {
            let x = x.into_owned();
            for y in b.column_iter() {
                let br = g.bracket(&x, &y.into_owned());
                let r = match target {
                    Some(t) => (&br - t * (t.transpose() * &br)).amax(),
                    None => br.amax(),
                };
                worst = worst.max(r);
            }
        }
        worst
    }

    /// Residuals of the bracket relations the curvature formulas rely on.
    pub fn bracket_residuals(&self) -> Vec<(String, f64)> {
        let k = self.k();
        vec![
            (
                "[m1,m2] in m1".into(),
                self.inclusion(&self.m1, &self.m2, Some(&self.m1)),
            ),
            ("[k,k] in k".into(), self.inclusion(&k, &k, Some(&k))),
            (
                "[m2,m2] = 0".into(),
                self.inclusion(&self.m2, &self.m2, None),
            ),
            (
                SYMMETRIC_PAIR.into(),
                self.inclusion(&self.m1, &self.m1, Some(&k)),
            ),
            (
                "[h_rho,m1] in m1".into(),
                self.inclusion(&self.h_rho, &self.m1, Some(&self.m1)),
            ),
            (
                "[h_rho,m2] in m2".into(),
                self.inclusion(&self.h_rho, &self.m2, Some(&self.m2)),
            ),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e_like(weights: [f64; 2]) -> Decomposition {
        let g = Arc::new(LieAlgebraSpec::direct_sum(&[
            Factor::Su(3),
            Factor::Torus(1),
        ]));
        let layout = HomogeneousLayout {
            isotropy: vec![Isotropy::BlockDiagonal(vec![1, 2])],
            fiber_block: 1,
            weights: vec![vec![vec![weights[0], weights[1], 0.0]]],
        };
        build_decomposition(g, &layout).unwrap()
    }

    #[test]
    fn trivial_rho_keeps_h_and_fiber() {
        let d = e_like([0.0, 0.0]);
        assert_eq!(d.dims(), (4, 1, 4));
        assert!((&d.h_rho - &d.h).amax() < 1e-15);
        assert!((&d.m2 - &d.fiber).amax() < 1e-15);
    }

    #[test]
    fn twisted_rho_gives_orthogonal_splitting() {
        let d = e_like([3.0, 0.0]);
        assert_eq!(d.tangent_dim(), 5);
        assert!(d.orthogonality_residual() < 1e-14);
        assert!(d.residuals.iter().all(|(_, r)| *r < 1e-14));
    }

    #[test]
    fn rejects_fractional_and_non_homomorphic_weights() {
        let g = Arc::new(LieAlgebraSpec::direct_sum(&[
            Factor::Su(3),
            Factor::Torus(1),
        ]));
        let mut layout = HomogeneousLayout {
            isotropy: vec![Isotropy::BlockDiagonal(vec![1, 2])],
            fiber_block: 1,
            weights: vec![vec![vec![0.5, 0.0, 0.0]]],
        };
        assert!(matches!(
            build_decomposition(g.clone(), &layout),
            Err(GeoError::WeightNotIntegral { .. })
        ));
        // Im X_22 does not vanish on the su(2) sitting in slots 1, 2
        layout.weights = vec![vec![vec![0.0, 1.0, 0.0]]];
        assert!(matches!(
            build_decomposition(g, &layout),
            Err(GeoError::NotHomomorphism { .. })
        ));
    }
}
