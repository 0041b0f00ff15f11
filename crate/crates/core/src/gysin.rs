//! Even cohomology of principal circle and torus bundles via the Gysin
//! sequence: `H^even(P) = H(B) / (e)` and `H^{2k+1}(P) = ker(e: H^{2k} -> H^{2k+2})`
//! for a base concentrated in even degrees.

use std::sync::Arc;

use num::{BigInt, One, Signed, Zero};
use serde::Serialize;

use crate::error::RingError;
use crate::graded_ring::{mult_map, GradedRingPresentation, MultMap, RingClass};
use crate::linalg::smith_invariants;
use crate::poly::{Poly, Q};

/// Which odd degrees of the total space must vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OddVanishing {
    /// Injectivity of `e` in every degree `d` with `d + 2 <= T`.
    Strict,
    /// Injectivity only for `d + 1 <= n`, so `H^odd(P)` vanishes through degree `n`.
    Through(u32),
    /// No requirement; kernels are reported as odd Betti numbers.
    Report,
}

#[derive(Clone, Debug)]
pub struct CircleQuotient {
    pub total: Arc<GradedRingPresentation>,
    /// Base generator removed by the linear Euler relation, if any.
    pub eliminated: Option<usize>,
    /// Image of each base generator as a polynomial in the total's generators.
    pub projection: Vec<Poly>,
    pub mult_maps: Vec<MultMap>,
}

impl CircleQuotient {
    /// `(2k+1, dim ker e|H^{2k})` for every computed `k`.
    pub fn odd_betti(&self) -> Vec<(u32, usize)> {
        self.mult_maps
            .iter()
            .map(|m| (m.source_degree + 1, m.kernel.len()))
            .collect()
    }
}

/// Quotient of the base by one degree-2 class. The total's presentation is
/// truncated at `output_truncation` (at most the base truncation).
pub fn circle_quotient(
    e: &RingClass,
    policy: OddVanishing,
    output_truncation: u32,
) -> Result<CircleQuotient, RingError> {
    let base = &e.ring;
    if e.degree != 2 {
        return Err(RingError::NotDegreeTwo { degree: e.degree });
    }
    if e.is_zero() {
        return Err(RingError::ZeroClass);
    }
    if let Some(g) = base.generators().iter().find(|g| g.degree % 2 == 1) {
        return Err(RingError::OddBase {
            name: g.name.clone(),
        });
    }
    let t = base.truncation();
    if output_truncation > t {
        return Err(RingError::DegreeOutOfRange {
            degree: output_truncation,
            truncation: t,
        });
    }

    let mut mult_maps = Vec::new();
    let mut d = 0;
    while d + 2 <= t {
        let m = mult_map(e, d)?;
        let required = match policy {
            OddVanishing::Strict => true,
            OddVanishing::Through(n) => d < n,
            OddVanishing::Report => false,
        };
        if required && !m.is_injective() {
            let k = base.lift(&m.kernel[0], d)?;
            return Err(RingError::NotInjective {
                degree: d,
                kernel: base.format(&k),
            });
        }
        mult_maps.push(m);
        d += 2;
    }

    let lin = e.to_poly();
    let n = base.ngens();
    let choice = eliminable_generator(&lin, n);
    let (gens, rels, projection, eliminated) = match choice {
        Some(i) => {
            let ci = lin.coeff(&crate::poly::Monomial::var(n, i));
            let keep: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let mut index = vec![0; n];
            for (new, &old) in keep.iter().enumerate() {
                index[old] = new;
            }
            let m = n - 1;
            let mut projection = Vec::with_capacity(n);
            for j in 0..n {
                if j == i {
                    let mut img = Poly::zero(m);
                    for &k in &keep {
                        let ck = lin.coeff(&crate::poly::Monomial::var(n, k));
                        if !ck.is_zero() {
                            img.add_term(crate::poly::Monomial::var(m, index[k]), -(ck / &ci));
                        }
                    }
                    projection.push(img);
                } else {
                    projection.push(Poly::var(m, index[j]));
                }
            }
            let gens = keep.iter().map(|&k| base.generators()[k].clone()).collect();
            let rels = base
                .relations()
                .iter()
                .map(|r| r.substitute(&projection))
                .collect();
            (gens, rels, projection, Some(i))
        }
        None => {
            let mut rels = base.relations().to_vec();
            rels.push(lin.clone());
            let projection = (0..n).map(|j| Poly::var(n, j)).collect();
            (base.generators().to_vec(), rels, projection, None)
        }
    };
    let raw = GradedRingPresentation::new(gens, rels, t)?;
    let minimal = raw.minimal_relations();
    let total = GradedRingPresentation::new(raw.generators().to_vec(), minimal, t)?
        .truncated(output_truncation)?;
    Ok(CircleQuotient {
        total: Arc::new(total),
        eliminated,
        projection,
        mult_maps,
    })
}

/// Highest-index generator with a unit coefficient, else the highest with any
/// nonzero coefficient. `None` if the class has no linear term.
fn eliminable_generator(lin: &Poly, n: usize) -> Option<usize> {
    let coeff = |i: usize| lin.coeff(&crate::poly::Monomial::var(n, i));
    (0..n)
        .rev()
        .find(|&i| coeff(i).abs().is_one())
        .or_else(|| (0..n).rev().find(|&i| !coeff(i).is_zero()))
}

/// A base ring plus integer Euler classes on its degree-2 generators.
#[derive(Clone, Debug)]
pub struct BundleSpec {
    pub base: Arc<GradedRingPresentation>,
    /// One integer vector per circle factor, indexed by the base's degree-2
    /// generators in declaration order. Class `k` is read in the quotient by
    /// classes `0..k`.
    pub euler_classes: Vec<Vec<i64>>,
    pub final_truncation: u32,
}

#[derive(Clone, Debug)]
pub struct TorusQuotient {
    pub stages: Vec<CircleQuotient>,
    pub total: Arc<GradedRingPresentation>,
    /// Odd Betti numbers of the total space reported by the last stage.
    pub odd_betti: Vec<(u32, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageSummary {
    pub eliminated: Option<String>,
    pub ranks: Vec<(u32, usize, usize)>,
    pub betti: Vec<usize>,
}

impl TorusQuotient {
    pub fn summaries(&self, base: &GradedRingPresentation) -> Vec<StageSummary> {
        let mut names = base.names();
        let mut out = Vec::new();
        for s in &self.stages {
            let eliminated = s.eliminated.map(|i| names[i].clone());
            if let Some(i) = s.eliminated {
                names.remove(i);
            }
            out.push(StageSummary {
                eliminated,
                ranks: s
                    .mult_maps
                    .iter()
                    .map(|m| (m.source_degree, m.rank, m.source_dim()))
                    .collect(),
                betti: s.total.betti_numbers(),
            });
        }
        out
    }
}

/// Degree-2 generator indices of the base; these index the Euler lattice.
pub fn degree_two_generators(base: &GradedRingPresentation) -> Vec<usize> {
    base.generators()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.degree == 2)
        .map(|(i, _)| i)
        .collect()
}

/// Whether `e` stays primitive modulo the span of `earlier`, i.e. whether
/// `earlier` together with `e` extends to a lattice basis.
pub fn check_primitive(earlier: &[Vec<i64>], e: &[i64]) -> Result<bool, RingError> {
    let mut rows: Vec<Vec<BigInt>> = earlier
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    rows.push(e.iter().map(|&x| BigInt::from(x)).collect());
    let inv = smith_invariants(&rows);
    if inv.len() < rows.len() {
        return Err(RingError::ZeroClass);
    }
    Ok(inv.iter().all(|d| d.is_one()))
}

pub fn torus_quotient(spec: &BundleSpec) -> Result<TorusQuotient, RingError> {
    let base = &spec.base;
    let lattice = degree_two_generators(base);
    if base.betti(2)? != lattice.len() {
        return Err(RingError::NotInBaseLattice { index: 0 });
    }
    let n = base.ngens();
    let mut ring = Arc::clone(base);
    let mut projection: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
    let mut stages = Vec::new();
    let last = spec.euler_classes.len().saturating_sub(1);
    for (k, class) in spec.euler_classes.iter().enumerate() {
        if class.len() != lattice.len() {
            return Err(RingError::NotInBaseLattice { index: k });
        }
        if !check_primitive(&spec.euler_classes[..k], class)? {
            let lin = lattice_form(base, &lattice, class);
            return Err(RingError::NotPrimitive {
                index: k,
                class: base.format(&lin),
            });
        }
        let lin = lattice_form(base, &lattice, class).substitute(&projection);
        let e = ring.class_in_degree(&lin, 2)?;
        let (policy, out_t) = if k == last {
            (OddVanishing::Report, spec.final_truncation)
        } else {
            (
                OddVanishing::Through(spec.final_truncation.saturating_sub(1)),
                ring.truncation(),
            )
        };
        let stage = circle_quotient(&e, policy, out_t)?;
        projection = projection
            .iter()
            .map(|p| p.substitute(&stage.projection))
            .collect();
        ring = Arc::clone(&stage.total);
        stages.push(stage);
    }
    let odd_betti = stages
        .last()
        .map(|s| {
            s.odd_betti()
                .into_iter()
                .filter(|(d, _)| *d <= spec.final_truncation)
                .collect()
        })
        .unwrap_or_default();
    Ok(TorusQuotient {
        stages,
        total: ring,
        odd_betti,
    })
}

fn lattice_form(base: &GradedRingPresentation, lattice: &[usize], class: &[i64]) -> Poly {
    let mut p = Poly::zero(base.ngens());
    for (&i, &c) in lattice.iter().zip(class) {
        p.add_term(
            crate::poly::Monomial::var(base.ngens(), i),
            Q::from_integer(BigInt::from(c)),
        );
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_quotient_of_cp2() {
        let cp = Arc::new(GradedRingPresentation::cp2_power(&["z"], 6).unwrap());
        let e = cp.generator_class(0).unwrap();
        let q = circle_quotient(&e, OddVanishing::Report, 4).unwrap();
        assert_eq!(q.total.betti_numbers(), vec![1, 0, 0, 0, 0]);
        assert_eq!(q.odd_betti(), vec![(1, 0), (3, 0), (5, 1)]);
    }

    #[test]
    fn strict_policy_rejects_kernels() {
        let cp = Arc::new(GradedRingPresentation::cp2_power(&["z"], 6).unwrap());
        let e = cp.generator_class(0).unwrap();
        assert!(matches!(
            circle_quotient(&e, OddVanishing::Strict, 6),
            Err(RingError::NotInjective { degree: 4, .. })
        ));
    }

    #[test]
    fn primitivity() {
        assert!(check_primitive(&[], &[1, 1, 0]).unwrap());
        assert!(!check_primitive(&[], &[2, 4, 0]).unwrap());
        assert!(check_primitive(&[vec![1, 1, 1, 1, 0]], &[1, 0, 2, 0, 1]).unwrap());
        assert!(!check_primitive(&[vec![1, 0]], &[1, 2]).unwrap());
        assert_eq!(
            check_primitive(&[vec![1, 2]], &[2, 4]),
            Err(RingError::ZeroClass)
        );
    }
}
