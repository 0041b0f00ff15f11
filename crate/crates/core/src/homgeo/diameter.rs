//! Upper bound on `diam(G, <.,.>)` from covering radii of maximal-torus lattices.
//!
//! Every element of a compact connected group is conjugate into a maximal
//! torus, and conjugation fixes the distance to the identity, so the
//! diameter is at most the covering radius of the torus's kernel lattice.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::lie::{Factor, LieAlgebraSpec};
use crate::error::GeoError;

#[derive(Clone, Debug, Serialize)]
pub struct DiameterBound {
    pub value: f64,
    /// `(factor label, covering radius)`.
    pub factors: Vec<(String, f64)>,
}

/// Lattice `{ X in t : exp X = 1 }` of `su(n)`'s diagonal torus, as columns in
/// the orthonormal Cartan coordinates: images of `2 pi i (E_kk - E_{k+1,k+1})`.
pub fn su_torus_lattice(n: usize) -> DMatrix<f64> {
    let g = LieAlgebraSpec::su(n);
    let block = &g.blocks()[0];
    let mut cols = Vec::new();
    for k in 0..n - 1 {
        let mut m = super::lie::CMatrix::zeros(n, n);
        m[(k, k)] = nalgebra::Complex::new(0.0, 2.0 * std::f64::consts::PI);
        m[(k + 1, k + 1)] = nalgebra::Complex::new(0.0, -2.0 * std::f64::consts::PI);
        let full = g.coordinates_of(0, &m);
        cols.push(DVector::from_iterator(
            n - 1,
            (0..n - 1).map(|i| full[block.offset + i]),
        ));
    }
    DMatrix::from_columns(&cols)
}

/// Covering radius of a lattice of rank at most 2 (basis as columns).
pub fn covering_radius(basis: &DMatrix<f64>) -> Result<f64, GeoError> {
    match basis.ncols() {
        0 => Ok(0.0),
        1 => Ok(basis.column(0).norm() / 2.0),
        2 => {
            let (b1, b2) =
                lagrange_reduce(basis.column(0).into_owned(), basis.column(1).into_owned());
            // with |b1.b2| <= |b1|^2/2 and b1.b2 >= 0 the triangle (0, b1, b2)
            // is non-obtuse, hence a Delaunay cell whose circumradius is the answer
            let b2 = if b1.dot(&b2) < 0.0 { -b2 } else { b2 };
            let a = b1.norm();
            let b = b2.norm();
            let c = (&b1 - &b2).norm();
            let area2 = (a * a * b * b - b1.dot(&b2).powi(2)).sqrt();
            Ok(a * b * c / (2.0 * area2))
        }
        r => Err(GeoError::UnsupportedFactor {
            factor: format!("lattice of rank {r}"),
        }),
    }
}

fn lagrange_reduce(mut b1: DVector<f64>, mut b2: DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    loop {
        if b2.norm_squared() < b1.norm_squared() {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = b1.dot(&b2) / b1.norm_squared();
        if mu.abs() <= 0.5 + 1e-12 {
            return (b1, b2);
        }
        let mu = mu.round();
        b2 -= &b1 * mu;
    }
}

/// Grid search over the fundamental parallelogram for the point farthest
/// from the lattice, followed by successive zooms around the best cell.
pub fn covering_radius_brute_force(basis: &DMatrix<f64>, grid: usize, zooms: usize) -> f64 {
    let r = basis.ncols();
    let dist = |p: &DVector<f64>| -> f64 {
        let mut best = f64::INFINITY;
        let range = -3i32..=3;
        let mut visit = |c: &[i32]| {
            let mut q = p.clone();
            for (k, &ck) in c.iter().enumerate() {
                q -= basis.column(k) * f64::from(ck);
            }
            best = best.min(q.norm());
        };
        match r {
            1 => range.clone().for_each(|i| visit(&[i])),
            2 => range
                .clone()
                .for_each(|i| range.clone().for_each(|j| visit(&[i, j]))),
            _ => unimplemented!("brute force only for rank <= 2"),
        }
        best
    };
    let point = |s: &[f64]| -> DVector<f64> {
        let mut p = DVector::zeros(basis.nrows());
        for (k, &sk) in s.iter().enumerate() {
            p += basis.column(k) * sk;
        }
        p
    };
    let mut center = vec![0.5; r];
    let mut width = 1.0;
    let mut best = 0.0;
    for _ in 0..=zooms {
        let step = width / grid as f64;
        let mut arg = center.clone();
        let mut idx = vec![0usize; r];
        loop {
            let s: Vec<f64> = idx
                .iter()
                .zip(&center)
                .map(|(&i, &c)| c - width / 2.0 + step * i as f64)
                .collect();
            let d = dist(&point(&s));
            if d > best {
                best = d;
                arg = s;
            }
            let mut k = 0;
            while k < r {
                idx[k] += 1;
                if idx[k] <= grid {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == r {
                break;
            }
        }
        center = arg;
        width = 4.0 * step;
    }
    best
}

pub fn factor_covering_radius(f: &Factor) -> Result<f64, GeoError> {
    match *f {
        Factor::Torus(r) => Ok(std::f64::consts::PI * (r as f64).sqrt()),
        Factor::Su(n) if n <= 3 => covering_radius(&su_torus_lattice(n)),
        Factor::Su(_) => Err(GeoError::UnsupportedFactor { factor: f.label() }),
    }
}

/// `sqrt(sum of squared factor covering radii)`.
pub fn diameter_upper_bound(g: &LieAlgebraSpec) -> Result<DiameterBound, GeoError> {
    let mut factors = Vec::new();
    let mut sum = 0.0;
    for b in g.blocks() {
        let r = factor_covering_radius(&b.factor)?;
        sum += r * r;
        factors.push((b.factor.label(), r));
    }
    Ok(DiameterBound {
        value: sum.sqrt(),
        factors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circles_and_squares() {
        let circle = DMatrix::from_column_slice(1, 1, &[2.0 * PI]);
        assert!((covering_radius(&circle).unwrap() - PI).abs() < 1e-15);
        let square = DMatrix::from_column_slice(2, 2, &[2.0 * PI, 0.0, 0.0, 2.0 * PI]);
        assert!((covering_radius(&square).unwrap() - PI * 2f64.sqrt()).abs() < 1e-14);
        assert!((covering_radius_brute_force(&square, 40, 8) - PI * 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn su3_radius_matches_brute_force() {
        let l = su_torus_lattice(3);
        let exact = covering_radius(&l).unwrap();
        assert!((exact - 2.0 * PI * (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((covering_radius_brute_force(&l, 60, 10) - exact).abs() < 1e-6);
    }

    #[test]
    fn skewed_basis_is_reduced_first() {
        let l = su_torus_lattice(3);
        let skew =
            DMatrix::from_columns(&[l.column(0).into_owned(), l.column(1) + l.column(0) * 3.0]);
        assert!((covering_radius(&skew).unwrap() - covering_radius(&l).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_su() {
        let g = LieAlgebraSpec::su(4);
        assert!(matches!(
            diameter_upper_bound(&g),
            Err(GeoError::UnsupportedFactor { .. })
        ));
    }
}
