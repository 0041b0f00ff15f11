//! The projective set of degree-2 classes whose cube vanishes.

use std::sync::Arc;

use num::{One, Zero};
use serde_json::{json, Value};

use crate::error::IsoError;
use crate::graded_ring::GradedRingPresentation;
use crate::groebner::{gcd, groebner, specialize_last, Budget, Order};
use crate::iso::solve::{
    only_in, rational_roots, squarefree, uni_divrem, univariate_coeffs, univariate_poly,
};
use crate::linalg::kernel;
use crate::poly::{Monomial, Poly, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum LocusComponent {
    /// A rational point; the first nonzero coordinate is 1.
    Point { coords: Vec<Q> },
    /// Irrational points of one affine chart: the first nonzero coordinate is
    /// `chart` (set to 1) and the following coordinates solve `ideal`.
    Family {
        chart: usize,
        ideal: Vec<Poly>,
        count: usize,
    },
    /// The projectivization of a linear subspace, `sum equation_i c_i = 0`.
    Subspace {
        equation: Vec<Q>,
        basis: Vec<Vec<Q>>,
    },
}

impl LocusComponent {
    /// Whether the rational class with these coordinates lies on the component.
    pub fn contains(&self, omega: &[Q]) -> bool {
        match self {
            LocusComponent::Point { coords } => {
                let Some(lead) = omega.iter().find(|x| !x.is_zero()) else {
                    return false;
                };
                omega.iter().zip(coords).all(|(x, c)| *x == c * lead)
            }
            LocusComponent::Subspace { equation, .. } => omega
                .iter()
                .zip(equation)
                .fold(Q::zero(), |acc, (x, e)| acc + x * e)
                .is_zero(),
            LocusComponent::Family { .. } => false,
        }
    }

    pub fn capacity(&self) -> usize {
        match self {
            LocusComponent::Point { .. } => 1,
            LocusComponent::Family { count, .. } => *count,
            LocusComponent::Subspace { basis, .. } => basis.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LocusSignature {
    /// Isolated points counted over C.
    pub isolated: usize,
    /// Projective dimensions of linear components.
    pub linear: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CubeZeroLocus {
    pub ring: Arc<GradedRingPresentation>,
    /// Coordinates of `omega^3` as cubic forms in the coefficients of `omega`.
    pub equations: Vec<Poly>,
    pub common_factor: Poly,
    pub components: Vec<LocusComponent>,
}

impl CubeZeroLocus {
    pub fn signature(&self) -> LocusSignature {
        let mut isolated = 0;
        let mut linear = Vec::new();
        for c in &self.components {
            match c {
                LocusComponent::Point { .. } => isolated += 1,
                LocusComponent::Family { count, .. } => isolated += count,
                LocusComponent::Subspace { basis, .. } => linear.push(basis.len() - 1),
            }
        }
        linear.sort();
        LocusSignature { isolated, linear }
    }

    /// Number of points when the locus is finite.
    pub fn size(&self) -> Option<usize> {
        let s = self.signature();
        s.linear.is_empty().then_some(s.isolated)
    }

    pub fn points(&self) -> Vec<&Vec<Q>> {
        self.components
            .iter()
            .filter_map(|c| match c {
                LocusComponent::Point { coords } => Some(coords),
                _ => None,
            })
            .collect()
    }

    /// Degree-2 class with the given coordinates, as a linear form.
    pub fn format_point(&self, coords: &[Q]) -> String {
        let basis = self
            .ring
            .degree_basis(2)
            .expect("degree 2 is within the truncation");
        let p = Poly::from_terms(
            self.ring.ngens(),
            basis.into_iter().zip(coords.iter().cloned()),
        );
        self.ring.format(&p)
    }

    pub fn describe(&self) -> Vec<String> {
        let names = self.ring.names();
        self.components
            .iter()
            .map(|c| match c {
                LocusComponent::Point { coords } => self.format_point(coords),
                LocusComponent::Family {
                    chart,
                    ideal,
                    count,
                } => {
                    let vars: Vec<String> = (0..names.len() - chart - 1)
                        .map(|i| format!("t{}", i + 1))
                        .collect();
                    let eqs: Vec<String> = ideal.iter().map(|p| p.format(&vars)).collect();
                    let mut lead = vec!["0".to_string(); names.len()];
                    lead[*chart] = "1".into();
                    for (i, v) in vars.iter().enumerate() {
                        lead[chart + 1 + i] = v.clone();
                    }
                    format!(
                        "{count} points ({}) with {}",
                        lead.join(", "),
                        eqs.join(", ")
                    )
                }
                LocusComponent::Subspace { equation, .. } => {
                    let lin = self.format_point(equation);
                    format!("line {{{lin} = 0}}")
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let s = self.signature();
        json!({
            "isolated_points": s.isolated,
            "linear_components": s.linear,
            "components": self.describe(),
        })
    }

    /// Coordinates of `omega^3` for `omega` with the given degree-2 coordinates.
    pub fn cube(&self, omega: &[Q]) -> Vec<Q> {
        self.equations.iter().map(|f| f.eval(omega)).collect()
    }
}

/// Cubic forms `F_k(c)` with `(sum c_i b_i)^3 = sum_k F_k(c) e_k` in degree 6.
pub fn cube_equations(ring: &GradedRingPresentation) -> Result<Vec<Poly>, IsoError> {
    let b2 = ring.degree_basis(2)?;
    let g = b2.len();
    let dim6 = ring.betti(6)?;
    let mut eqs = vec![Poly::zero(g); dim6];
    for i in 0..g {
        for j in i..g {
            for k in j..g {
                let prod = b2[i].mul(&b2[j]).mul(&b2[k]);
                let coords = ring.coordinates(&Poly::monomial(prod, Q::one()), 6)?;
                let mult = multinomial(i, j, k);
                let mut e = vec![0u32; g];
                e[i] += 1;
                e[j] += 1;
                e[k] += 1;
                let m = Monomial(e);
                for (eq, c) in eqs.iter_mut().zip(coords) {
                    eq.add_term(m.clone(), c * Q::from_integer(mult.into()));
                }
            }
        }
    }
    Ok(eqs)
}

fn multinomial(i: usize, j: usize, k: usize) -> i64 {
    if i == j && j == k {
        1
    } else if i == j || j == k {
        3
    } else {
        6
    }
}

pub fn cube_zero_locus(ring: &Arc<GradedRingPresentation>) -> Result<CubeZeroLocus, IsoError> {
    if let Some(gen) = ring.generators().iter().find(|g| g.degree != 2) {
        return Err(IsoError::NotDegreeTwoGenerated {
            name: gen.name.clone(),
            degree: gen.degree,
        });
    }
    let equations = cube_equations(ring)?;
    let g = ring.betti(2)?;
    let nonzero: Vec<&Poly> = equations.iter().filter(|p| !p.is_zero()).collect();
    if nonzero.is_empty() {
        return Err(IsoError::InfiniteLocus {
            component: "every class cubes to zero".into(),
        });
    }
    let mut common = nonzero[0].primitive_integer();
    for f in &nonzero[1..] {
        common = gcd(&common, f)?;
    }
    let cdeg = common.total_degree().unwrap_or(0);
    if cdeg >= 2 {
        let names: Vec<String> = (0..g).map(|i| format!("c{}", i + 1)).collect();
        return Err(IsoError::InfiniteLocus {
            component: common.format(&names),
        });
    }
    let residual: Vec<Poly> = nonzero
        .iter()
        .map(|f| crate::groebner::divide_exact(f, &common).expect("gcd divides"))
        .collect();

    let mut components = Vec::new();
    let mut subspace_eq: Option<Vec<Q>> = None;
    if cdeg == 1 {
        let eq: Vec<Q> = (0..g).map(|i| common.coeff(&Monomial::var(g, i))).collect();
        let basis = kernel(std::slice::from_ref(&eq), g);
        subspace_eq = Some(eq.clone());
        components.push(LocusComponent::Subspace {
            equation: eq,
            basis,
        });
    }

    for chart in 0..g {
        let m = g - chart - 1;
        let images: Vec<Poly> = (0..g)
            .map(|i| match i.cmp(&chart) {
                std::cmp::Ordering::Less => Poly::zero(m),
                std::cmp::Ordering::Equal => Poly::one(m),
                std::cmp::Ordering::Greater => Poly::var(m, i - chart - 1),
            })
            .collect();
        let system: Vec<Poly> = residual.iter().map(|f| f.substitute(&images)).collect();
        let (points, families) = solve_zero_dim(&system, m)?;
        let on_line = |pt: &[Q]| {
            subspace_eq.as_ref().is_some_and(|eq| {
                let full = chart_point(pt, chart, g);
                eq.iter()
                    .zip(&full)
                    .map(|(a, b)| a * b)
                    .sum::<Q>()
                    .is_zero()
            })
        };
        for pt in points {
            if !on_line(&pt) {
                components.push(LocusComponent::Point {
                    coords: chart_point(&pt, chart, g),
                });
            }
        }
        for (ideal, count) in families {
            let mut count = count;
            if subspace_eq.is_some() {
                let lin = common.substitute(&images);
                let mut with = ideal.clone();
                with.push(lin);
                count -= count_points(&with, m)?;
            }
            if count > 0 {
                components.push(LocusComponent::Family {
                    chart,
                    ideal,
                    count,
                });
            }
        }
    }
    Ok(CubeZeroLocus {
        ring: Arc::clone(ring),
        equations,
        common_factor: common,
        components,
    })
}

fn chart_point(pt: &[Q], chart: usize, g: usize) -> Vec<Q> {
    let mut full = vec![Q::zero(); g];
    full[chart] = Q::one();
    for (i, x) in pt.iter().enumerate() {
        full[chart + 1 + i] = x.clone();
    }
    full
}

/// Irrational points as an ideal in all variables plus its point count.
pub type PointFamily = (Vec<Poly>, usize);

/// Rational points and irrational families of a zero-dimensional system.
/// Families are returned as ideals in all `m` variables with their number
/// of distinct complex points.
pub fn solve_zero_dim(
    system: &[Poly],
    m: usize,
) -> Result<(Vec<Vec<Q>>, Vec<PointFamily>), IsoError> {
    let system: Vec<Poly> = system.iter().filter(|p| !p.is_zero()).cloned().collect();
    if system.iter().any(Poly::is_constant) {
        return Ok((vec![], vec![]));
    }
    if m == 0 {
        return Ok((vec![vec![]], vec![]));
    }
    if system.is_empty() {
        return Err(IsoError::InfiniteLocus {
            component: "an entire affine chart".into(),
        });
    }
    let gb = groebner(&system, Order::Lex, false, Budget::default())?;
    if gb.is_unit() {
        return Ok((vec![], vec![]));
    }
    let last = m - 1;
    let Some(uni) = gb.polys.iter().find(|p| only_in(p, last)) else {
        return Err(IsoError::InfiniteLocus {
            component: "a curve inside an affine chart".into(),
        });
    };
    let sf = squarefree(&univariate_coeffs(uni, last));
    let roots = rational_roots(&sf)?;
    let mut rest = sf.clone();
    for r in &roots {
        let (q, _) = uni_divrem(&rest, &[-r.clone(), Q::one()]);
        rest = q;
    }
    let mut points = Vec::new();
    let mut families = Vec::new();
    for r in &roots {
        let sub: Vec<Poly> = gb.polys.iter().map(|p| specialize_last(p, r)).collect();
        let (pts, fams) = solve_zero_dim(&sub, m - 1)?;
        for mut p in pts {
            p.push(r.clone());
            points.push(p);
        }
        let lift: Vec<usize> = (0..m - 1).collect();
        for (ideal, count) in fams {
            let mut lifted: Vec<Poly> = ideal.iter().map(|p| p.reindex(m, &lift)).collect();
            lifted.push(&Poly::var(m, last) - &Poly::constant(m, r.clone()));
            families.push((lifted, count));
        }
    }
    if crate::iso::solve::uni_degree(&rest) > 0 {
        let mut ideal = gb.polys.clone();
        ideal.push(univariate_poly(&rest, m, last));
        let gbf = groebner(&ideal, Order::Lex, false, Budget::default())?;
        let count = count_points(&gbf.polys, m)?;
        if count > 0 {
            families.push((gbf.polys, count));
        }
    }
    Ok((points, families))
}

/// Number of distinct complex points of a zero-dimensional ideal.
pub fn count_points(ideal: &[Poly], m: usize) -> Result<usize, IsoError> {
    let ideal: Vec<Poly> = ideal.iter().filter(|p| !p.is_zero()).cloned().collect();
    if ideal.iter().any(Poly::is_constant) {
        return Ok(0);
    }
    if m == 0 {
        return Ok(1);
    }
    let mut radical = ideal.clone();
    for var in 0..m {
        // put `var` last so that the lex basis contains its eliminant
        let mut perm: Vec<usize> = (0..m).filter(|&i| i != var).collect();
        perm.push(var);
        let mut inv = vec![0; m];
        for (pos, &v) in perm.iter().enumerate() {
            inv[v] = pos;
        }
        let permuted: Vec<Poly> = ideal.iter().map(|p| p.reindex(m, &inv)).collect();
        let gb = groebner(&permuted, Order::Lex, false, Budget::default())?;
        if gb.is_unit() {
            return Ok(0);
        }
        let Some(uni) = gb.polys.iter().find(|p| only_in(p, m - 1)) else {
            return Err(IsoError::InfiniteLocus {
                component: "positive-dimensional family".into(),
            });
        };
        let sf = squarefree(&univariate_coeffs(uni, m - 1));
        radical.push(univariate_poly(&sf, m, var));
    }
    let gb = groebner(&radical, Order::GrevLex, false, Budget::default())?;
    if gb.is_unit() {
        return Ok(0);
    }
    let lms = gb.leading_monomials();
    let mut bound = vec![0u32; m];
    for (v, b) in bound.iter_mut().enumerate() {
        *b = lms
            .iter()
            .filter(|lm| lm.0.iter().enumerate().all(|(i, e)| i == v || *e == 0))
            .map(|lm| lm.0[v])
            .min()
            .expect("zero-dimensional ideals have a pure power for every variable");
    }
    let mut count = 0;
    let mut e = vec![0u32; m];
    loop {
        let mono = Monomial(e.clone());
        if !lms.iter().any(|lm| lm.divides(&mono)) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == m {
                return Ok(count);
            }
            e[k] += 1;
            if e[k] < bound[k] {
                break;
            }
            e[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn counts_conjugate_points() {
        let n: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let p = |s: &str| parse_poly(s, &n).unwrap();
        // a^2 = 2 with b = a: two points, both irrational
        assert_eq!(count_points(&[p("a^2 - 2"), p("b - a")], 2).unwrap(), 2);
        // double root counted once
        assert_eq!(count_points(&[p("a^2"), p("b")], 2).unwrap(), 1);
        let (pts, fams) = solve_zero_dim(&[p("a^2 - 2"), p("b^2 - 1"), p("a*b - a")], 2).unwrap();
        assert!(pts.is_empty());
        assert_eq!(fams.iter().map(|f| f.1).sum::<usize>(), 2);
    }

    #[test]
    fn cp2_cube_locus_is_a_point() {
        let r = Arc::new(GradedRingPresentation::cp2_power(&["z"], 6).unwrap());
        let l = cube_zero_locus(&r);
        // z^3 = 0 identically in CP^2: the cube map vanishes
        assert!(matches!(
            l,
            Err(IsoError::Ring(_)) | Err(IsoError::InfiniteLocus { .. })
        ));
    }
}
