//! Compact Lie algebras given by structure constants in an orthonormal basis
//! of a bi-invariant inner product.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::GeoError;

pub type CMatrix = DMatrix<Complex<f64>>;

/// Structural tolerance for Jacobi and ad-invariance.
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `su(n)` with `<X,Y> = -Re tr(XY)`.
    Su(usize),
    /// `R^r` with the integer lattice `2 pi Z^r` (product of unit circles).
    Torus(usize),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match *self {
            Factor::Su(n) => n * n - 1,
            Factor::Torus(r) => r,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            Factor::Su(n) => format!("su({n})"),
            Factor::Torus(r) => format!("t^{r}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FactorBlock {
    pub factor: Factor,
    pub offset: usize,
    /// Matrix of each basis vector, for `su` factors.
    pub matrices: Vec<CMatrix>,
}

impl FactorBlock {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.factor.dim()
    }
}

#[derive(Clone, Debug)]
pub struct LieAlgebraSpec {
    dim: usize,
    blocks: Vec<FactorBlock>,
    /// `[e_i, e_j] = sum c e_k` stored as `(i, j, k, c)` for every ordered pair.
    structure: Vec<(usize, usize, usize, f64)>,
}

/// Orthonormal basis of `su(n)`: the Cartan elements
/// `i diag(1,..,1,-k,0,..) / sqrt(k(k+1))`, then for each `j < k` the pair
/// `(E_jk - E_kj)/sqrt 2`, `i (E_jk + E_kj)/sqrt 2`.
pub fn su_basis(n: usize) -> Vec<CMatrix> {
    let i = Complex::new(0.0, 1.0);
    let mut out = Vec::new();
    for k in 1..n {
        let s = ((k * (k + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for j in 0..k {
            m[(j, j)] = i / s;
        }
        m[(k, k)] = i * (-(k as f64)) / s;
        out.push(m);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..n {
        for k in j + 1..n {
            let mut a = CMatrix::zeros(n, n);
            a[(j, k)] = Complex::new(r, 0.0);
            a[(k, j)] = Complex::new(-r, 0.0);
            out.push(a);
            let mut b = CMatrix::zeros(n, n);
            b[(j, k)] = i * r;
            b[(k, j)] = i * r;
            out.push(b);
        }
    }
    out
}

/// `-Re tr(XY)`.
pub fn killing_form(x: &CMatrix, y: &CMatrix) -> f64 {
    -(x * y).trace().re
}

impl LieAlgebraSpec {
    pub fn su(n: usize) -> Self {
        Self::direct_sum(&[Factor::Su(n)])
    }

    pub fn torus(r: usize) -> Self {
        Self::direct_sum(&[Factor::Torus(r)])
    }

    pub fn direct_sum(factors: &[Factor]) -> Self {
        let mut blocks = Vec::new();
        let mut structure = Vec::new();
        let mut offset = 0;
        for f in factors {
            let matrices = match *f {
                Factor::Su(n) => su_basis(n),
                Factor::Torus(_) => Vec::new(),
            };
            for (a, ea) in matrices.iter().enumerate() {
                for (b, eb) in matrices.iter().enumerate() {
                    if a == b {
                        continue;
                    }
                    let br = ea * eb - eb * ea;
                    for (c, ec) in matrices.iter().enumerate() {
                        let v = killing_form(&br, ec);
                        if v.abs() > 1e-14 {
                            structure.push((offset + a, offset + b, offset + c, v));
                        }
                    }
                }
            }
            blocks.push(FactorBlock {
                factor: f.clone(),
                offset,
                matrices,
            });
            offset += f.dim();
        }
        LieAlgebraSpec {
            dim: offset,
            blocks,
            structure,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[FactorBlock] {
        &self.blocks
    }

    pub fn structure(&self) -> &[(usize, usize, usize, f64)] {
        &self.structure
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim);
        for &(i, j, k, c) in &self.structure {
            let xi = x[i];
            if xi != 0.0 {
                out[k] += c * xi * y[j];
            }
        }
        out
    }

    /// Matrix of `ad_x`.
    pub fn ad(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(i, j, k, c) in &self.structure {
            m[(k, j)] += c * x[i];
        }
        m
    }

    pub fn unit(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    /// Max over basis triples of the cyclic sum in the Jacobi identity.
    pub fn jacobi_residual(&self) -> f64 {
        let basis: Vec<_> = (0..self.dim).map(|i| self.unit(i)).collect();
        let mut worst: f64 = 0.0;
        for block in &self.blocks {
            let r = block.range();
            for i in r.clone() {
                for j in i + 1..r.end {
                    let eij = self.bracket(&basis[i], &basis[j]);
                    for k in j + 1..r.end {
                        let a = self.bracket(&eij, &basis[k]);
                        let b = self.bracket(&self.bracket(&basis[j], &basis[k]), &basis[i]);
                        let c = self.bracket(&self.bracket(&basis[k], &basis[i]), &basis[j]);
                        worst = worst.max((a + b + c).amax());
                    }
                }
            }
        }
        worst
    }

    /// Max of `|<[e_i,e_j],e_k> + <e_j,[e_i,e_k]>|`; zero iff every `ad` is skew.
    pub fn ad_invariance_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            let a = self.ad(&self.unit(i));
            worst = worst.max((&a + a.transpose()).amax());
        }
        worst
    }

    pub fn validate(&self) -> Result<(), GeoError> {
        let residual = self.jacobi_residual();
        if residual > STRUCTURE_TOL {
            return Err(GeoError::NotJacobi { residual });
        }
        let residual = self.ad_invariance_residual();
        if residual > STRUCTURE_TOL {
            return Err(GeoError::NotAdInvariant { residual });
        }
        Ok(())
    }

    /// Coordinates of a matrix of the `b`-th factor in its orthonormal basis.
    pub fn coordinates_of(&self, b: usize, m: &CMatrix) -> DVector<f64> {
        let block = &self.blocks[b];
        let mut v = DVector::zeros(self.dim);
        for (a, e) in block.matrices.iter().enumerate() {
            v[block.offset + a] = killing_form(m, e);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su_dimensions_and_residuals() {
        for n in [2, 3] {
            let g = LieAlgebraSpec::su(n);
            assert_eq!(g.dim(), n * n - 1);
            assert!(g.jacobi_residual() <= 1e-14);
            assert!(g.ad_invariance_residual() <= 1e-14);
            g.validate().unwrap();
        }
    }

    #[test]
    fn basis_is_orthonormal() {
        let b = su_basis(3);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((killing_form(x, y) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bracket_is_orthogonal_to_arguments() {
        let g = LieAlgebraSpec::su(3);
        for i in 0..8 {
            for j in 0..8 {
                let br = g.bracket(&g.unit(i), &g.unit(j));
                assert!(br.dot(&g.unit(j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn torus_is_abelian() {
        let g = LieAlgebraSpec::torus(2);
        assert!(g.structure().is_empty());
        assert_eq!(g.bracket(&g.unit(0), &g.unit(1)).amax(), 0.0);
    }
}
