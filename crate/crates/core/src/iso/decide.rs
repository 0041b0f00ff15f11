use std::sync::Arc;

use num::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::IsoError;
use crate::graded_ring::GradedRingPresentation;
use crate::groebner::Budget;
use crate::iso::locus::{cube_zero_locus, CubeZeroLocus, LocusComponent};
use crate::iso::solve::{solve_small_system, SystemOutcome, UnitCertificate};
use crate::linalg::rank;
use crate::poly::{Monomial, Poly, Q};

/// Target component index for each source generator.
pub type Shape = Vec<usize>;

#[derive(Clone, Debug)]
pub enum ShapeOutcome {
    Refuted(UnitCertificate),
    Consistent {
        witness: Option<Vec<Vec<Q>>>,
        basis: Vec<Poly>,
    },
}

#[derive(Clone, Debug)]
pub enum IsoDecision {
    Iso {
        shape: Shape,
        /// Images of the source generators in target degree-2 coordinates
        /// (column `j` is the image of generator `j`), when rational.
        matrix: Option<Vec<Vec<Q>>>,
        /// Lex basis describing all maps of this shape.
        basis: Vec<Poly>,
        transcript: Option<Vec<String>>,
    },
    NotIso {
        reason: Refutation,
    },
    Unknown {
        reason: String,
    },
}

#[derive(Clone, Debug)]
pub enum Refutation {
    Betti {
        source: Vec<usize>,
        target: Vec<usize>,
    },
    Locus {
        source: String,
        target: String,
    },
    Shapes(Vec<(Shape, UnitCertificate)>),
}

#[derive(Clone, Debug)]
pub struct IsoReport {
    pub decision: IsoDecision,
    /// `(source, target)` isolated-point counts over C.
    pub locus_sizes: Option<(usize, usize)>,
    pub locus_signatures: Option<(String, String)>,
    pub shapes_tried: usize,
    pub unknown_names: Vec<String>,
}

impl IsoReport {
    pub fn result_tag(&self) -> &'static str {
        match self.decision {
            IsoDecision::Iso { .. } => "iso",
            IsoDecision::NotIso { .. } => "not-iso",
            IsoDecision::Unknown { .. } => "unknown",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "result": self.result_tag(),
            "locus_sizes": self.locus_sizes.map(|(a, b)| vec![a, b]),
            "locus_signatures": self.locus_signatures.clone().map(|(a, b)| vec![a, b]),
            "shapes_tried": self.shapes_tried,
        });
        let names = &self.unknown_names;
        match &self.decision {
            IsoDecision::Iso {
                shape,
                matrix,
                basis,
                transcript,
            } => {
                v["certificate"] = json!({
                    "shape": shape,
                    "matrix": matrix.as_ref().map(|m| m.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()),
                    "system_basis": basis.iter().map(|p| p.format(names)).collect::<Vec<_>>(),
                    "transcript": transcript,
                });
            }
            IsoDecision::NotIso { reason } => {
                v["refutation"] = match reason {
                    Refutation::Betti { source, target } => {
                        json!({"kind": "betti", "source": source, "target": target})
                    }
                    Refutation::Locus { source, target } => {
                        json!({"kind": "locus", "source": source, "target": target})
                    }
                    Refutation::Shapes(list) => json!({
                        "kind": "shapes",
                        "certificates": list.iter().map(|(s, c)| json!({
                            "shape": s,
                            "verified": c.verify(),
                            "cofactor_terms": c.size(),
                        })).collect::<Vec<_>>(),
                    }),
                };
            }
            IsoDecision::Unknown { reason } => {
                v["reason"] = json!(reason);
            }
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WellFormedness {
    /// Every source relation maps into the target ideal.
    Ok {
        transcript: Vec<String>,
    },
    Failure {
        relation: String,
        residue: String,
    },
    NotInvertible,
}

/// Checks that `x_j -> sum_i matrix[i][j] t_i` defines an isomorphism
/// through degree 6: invertible on degree 2 and every source relation
/// vanishes in the target.
pub fn induced_map_wellformed(
    source: &GradedRingPresentation,
    target: &GradedRingPresentation,
    matrix: &[Vec<Q>],
) -> Result<WellFormedness, IsoError> {
    let g = source.ngens();
    let tb = target.degree_basis(2)?;
    if matrix.len() != tb.len() || matrix.iter().any(|r| r.len() != g) || tb.len() != g {
        return Err(IsoError::BadMatrix { expected: g });
    }
    if rank(matrix, g) < g {
        return Ok(WellFormedness::NotInvertible);
    }
    let n = target.ngens();
    let images: Vec<Poly> = (0..g)
        .map(|j| {
            Poly::from_terms(
                n,
                tb.iter()
                    .zip(matrix)
                    .map(|(m, row)| (m.clone(), row[j].clone())),
            )
        })
        .collect();
    let mut transcript = Vec::new();
    for rel in source.relations() {
        let img = rel.substitute(&images);
        let d = source.relation_degree(rel);
        let coords = target.coordinates(&img, d)?;
        if coords.iter().any(|c| !c.is_zero()) {
            let residue = target.lift(&coords, d)?;
            return Ok(WellFormedness::Failure {
                relation: source.format(rel),
                residue: target.format(&residue),
            });
        }
        transcript.push(format!("{} -> 0", source.format(rel)));
    }
    Ok(WellFormedness::Ok { transcript })
}

/// The identity map of a ring onto itself, with the locus component of each generator.
fn identity_decision(
    ring: &GradedRingPresentation,
    locus: &CubeZeroLocus,
) -> Result<Option<IsoDecision>, IsoError> {
    let g = ring.ngens();
    let columns: Vec<Vec<Q>> = (0..g)
        .map(|j| ring.coordinates(&ring.var(j), 2))
        .collect::<Result<_, _>>()?;
    let matrix: Vec<Vec<Q>> = (0..g)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let mut shape = Vec::with_capacity(g);
    for col in &columns {
        let Some(k) = locus.components.iter().position(|c| c.contains(col)) else {
            return Ok(None);
        };
        shape.push(k);
    }
    match induced_map_wellformed(ring, ring, &matrix)? {
        WellFormedness::Ok { transcript } => Ok(Some(IsoDecision::Iso {
            shape,
            matrix: Some(matrix),
            basis: vec![],
            transcript: Some(transcript),
        })),
        _ => Ok(None),
    }
}

fn check_degree_two(r: &GradedRingPresentation) -> Result<(), IsoError> {
    if let Some(gen) = r.generators().iter().find(|g| g.degree != 2) {
        return Err(IsoError::NotDegreeTwoGenerated {
            name: gen.name.clone(),
            degree: gen.degree,
        });
    }
    Ok(())
}

fn signature_string(l: &CubeZeroLocus) -> String {
    let s = l.signature();
    if s.linear.is_empty() {
        format!("{} points", s.isolated)
    } else {
        format!(
            "{} points + linear components of dimension {:?}",
            s.isolated, s.linear
        )
    }
}

/// Decides whether `source` and `target` (truncated at 6, generated in
/// degree 2) are isomorphic over C.
pub fn iso_decide(
    source: &Arc<GradedRingPresentation>,
    target: &Arc<GradedRingPresentation>,
) -> Result<IsoReport, IsoError> {
    check_degree_two(source)?;
    check_degree_two(target)?;
    let mut report = IsoReport {
        decision: IsoDecision::Unknown {
            reason: String::new(),
        },
        locus_sizes: None,
        locus_signatures: None,
        shapes_tried: 0,
        unknown_names: vec![],
    };
    let top = source.truncation().min(target.truncation());
    let bs: Vec<usize> = (0..=top)
        .map(|d| source.betti(d))
        .collect::<Result<_, _>>()?;
    let bt: Vec<usize> = (0..=top)
        .map(|d| target.betti(d))
        .collect::<Result<_, _>>()?;
    if bs != bt {
        report.decision = IsoDecision::NotIso {
            reason: Refutation::Betti {
                source: bs,
                target: bt,
            },
        };
        return Ok(report);
    }
    let g = source.ngens();
    if source.betti(2)? != g || target.betti(2)? != target.ngens() {
        return Err(IsoError::NotDegreeTwoGenerated {
            name: "linear relation".into(),
            degree: 2,
        });
    }
    for (j, gen) in source.generators().iter().enumerate() {
        let cube = source.var(j).pow(3);
        if !source.is_zero_in_ring(&cube)? {
            return Err(IsoError::ScopeViolation {
                name: gen.name.clone(),
            });
        }
    }
    let (ls, lt) = match (cube_zero_locus(source), cube_zero_locus(target)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(IsoError::InfiniteLocus { component }), _)
        | (_, Err(IsoError::InfiniteLocus { component })) => {
            report.decision = IsoDecision::Unknown {
                reason: format!("nonlinear positive-dimensional locus: {component}"),
            };
            return Ok(report);
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    report.locus_sizes = Some((ls.signature().isolated, lt.signature().isolated));
    report.locus_signatures = Some((signature_string(&ls), signature_string(&lt)));
    if ls.signature() != lt.signature() {
        report.decision = IsoDecision::NotIso {
            reason: Refutation::Locus {
                source: signature_string(&ls),
                target: signature_string(&lt),
            },
        };
        return Ok(report);
    }

    if source == target {
        if let Some(d) = identity_decision(source, &lt)? {
            report.decision = d;
            return Ok(report);
        }
    }

    let shapes = enumerate_shapes(&lt.components, g);
    report.shapes_tried = shapes.len();
    let outcomes: Vec<Result<(ShapeOutcome, Vec<String>), IsoError>> = shapes
        .par_iter()
        .map(|s| solve_shape(source, target, &lt.components, s))
        .collect();
    let mut refutations = Vec::new();
    for (shape, out) in shapes.iter().zip(outcomes) {
        let (out, names) = match out {
            Ok(x) => x,
            Err(IsoError::DegreeBudgetExceeded { reason }) => {
                report.decision = IsoDecision::Unknown {
                    reason: format!("shape {shape:?}: {reason}"),
                };
                return Ok(report);
            }
            Err(e) => return Err(e),
        };
        match out {
            ShapeOutcome::Refuted(cert) => {
                if !cert.verify() {
                    report.decision = IsoDecision::Unknown {
                        reason: format!("certificate for shape {shape:?} failed re-verification"),
                    };
                    return Ok(report);
                }
                refutations.push((shape.clone(), cert));
            }
            ShapeOutcome::Consistent { witness, basis } => {
                let transcript = match &witness {
                    Some(m) => match induced_map_wellformed(source, target, m)? {
                        WellFormedness::Ok { transcript } => Some(transcript),
                        other => {
                            report.decision = IsoDecision::Unknown {
                                reason: format!("witness for shape {shape:?} failed: {other:?}"),
                            };
                            return Ok(report);
                        }
                    },
                    None => None,
                };
                report.unknown_names = names;
                report.decision = IsoDecision::Iso {
                    shape: shape.clone(),
                    matrix: witness,
                    basis,
                    transcript,
                };
                return Ok(report);
            }
        }
    }
    report.decision = IsoDecision::NotIso {
        reason: Refutation::Shapes(refutations),
    };
    Ok(report)
}

/// All assignments of source generators to target components, in lex order,
/// using each rational point at most once and no component beyond its capacity.
fn enumerate_shapes(components: &[LocusComponent], g: usize) -> Vec<Shape> {
    fn rec(
        comps: &[LocusComponent],
        g: usize,
        cur: &mut Vec<usize>,
        used: &mut Vec<usize>,
        out: &mut Vec<Shape>,
    ) {
        if cur.len() == g {
            out.push(cur.clone());
            return;
        }
        for (c, comp) in comps.iter().enumerate() {
            if used[c] < comp.capacity() {
                used[c] += 1;
                cur.push(c);
                rec(comps, g, cur, used, out);
                cur.pop();
                used[c] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    rec(
        components,
        g,
        &mut Vec::new(),
        &mut vec![0; components.len()],
        &mut out,
    );
    out
}

enum Slot {
    Scale(usize),
    Family { scale: usize, coords: Vec<usize> },
    Span(Vec<usize>),
}

fn solve_shape(
    source: &GradedRingPresentation,
    target: &GradedRingPresentation,
    comps: &[LocusComponent],
    shape: &Shape,
) -> Result<(ShapeOutcome, Vec<String>), IsoError> {
    let g = source.ngens();
    let mut names = Vec::new();
    let mut slots = Vec::new();
    for (j, &c) in shape.iter().enumerate() {
        match &comps[c] {
            LocusComponent::Point { .. } => {
                slots.push(Slot::Scale(names.len()));
                names.push(format!("l{}", j + 1));
            }
            LocusComponent::Family { chart, .. } => {
                let scale = names.len();
                names.push(format!("l{}", j + 1));
                let coords = (0..g - chart - 1)
                    .map(|k| {
                        names.push(format!("t{}_{}", j + 1, k + 1));
                        names.len() - 1
                    })
                    .collect();
                slots.push(Slot::Family { scale, coords });
            }
            LocusComponent::Subspace { basis, .. } => {
                let idx = (0..basis.len())
                    .map(|k| {
                        names.push(format!("m{}_{}", j + 1, k + 1));
                        names.len() - 1
                    })
                    .collect();
                slots.push(Slot::Span(idx));
            }
        }
    }
    let nu = names.len();
    let var = |i: usize| Poly::var(nu, i);
    let konst = |c: &Q| Poly::constant(nu, c.clone());
    // phi[i][j]: coefficient of target basis element i in the image of x_j
    let mut phi = vec![vec![Poly::zero(nu); g]; g];
    let mut side = Vec::new();
    for (j, (&c, slot)) in shape.iter().zip(&slots).enumerate() {
        match (&comps[c], slot) {
            (LocusComponent::Point { coords }, Slot::Scale(l)) => {
                for i in 0..g {
                    phi[i][j] = &var(*l) * &konst(&coords[i]);
                }
            }
            (LocusComponent::Family { chart, ideal, .. }, Slot::Family { scale, coords }) => {
                phi[*chart][j] = var(*scale);
                for (k, &t) in coords.iter().enumerate() {
                    phi[chart + 1 + k][j] = &var(*scale) * &var(t);
                }
                let images: Vec<Poly> = coords.iter().map(|&t| var(t)).collect();
                for p in ideal {
                    side.push(p.substitute(&images));
                }
            }
            (LocusComponent::Subspace { basis, .. }, Slot::Span(idx)) => {
                for (b, &m) in basis.iter().zip(idx) {
                    for i in 0..g {
                        phi[i][j] = &phi[i][j] + &(&var(m) * &konst(&b[i]));
                    }
                }
            }
            _ => unreachable!("slots follow the shape"),
        }
    }
    let mut equations = side;
    equations.extend(relation_equations(source, target, &phi, nu)?);
    let det = poly_det(&phi, nu);
    let out = solve_small_system(&equations, &[det], Budget::default())?;
    let result = match out {
        SystemOutcome::Inconsistent(cert) => ShapeOutcome::Refuted(cert),
        SystemOutcome::Consistent { basis, witness } => {
            let matrix = witness.map(|w| {
                phi.iter()
                    .map(|row| row.iter().map(|p| p.eval(&w)).collect())
                    .collect::<Vec<Vec<Q>>>()
            });
            let mut all = vec!["u".to_string()];
            all.extend(names.iter().cloned());
            return Ok((
                ShapeOutcome::Consistent {
                    witness: matrix,
                    basis: basis.polys,
                },
                all,
            ));
        }
    };
    let mut all = vec!["u".to_string()];
    all.extend(names);
    Ok((result, all))
}

/// Target coordinates of the image of every source relation, as polynomials
/// in the unknowns.
fn relation_equations(
    source: &GradedRingPresentation,
    target: &GradedRingPresentation,
    phi: &[Vec<Poly>],
    nu: usize,
) -> Result<Vec<Poly>, IsoError> {
    let g = source.ngens();
    let n = target.ngens();
    let tb = target.degree_basis(2)?;
    let total = nu + n;
    let up: Vec<usize> = (0..nu).collect();
    let images: Vec<Poly> = (0..g)
        .map(|j| {
            let mut p = Poly::zero(total);
            for (i, m) in tb.iter().enumerate() {
                let mut e = vec![0; total];
                for (k, x) in m.0.iter().enumerate() {
                    e[nu + k] = *x;
                }
                p = &p + &(&phi[i][j].reindex(total, &up) * &Poly::monomial(Monomial(e), Q::one()));
            }
            p
        })
        .collect();
    let mut eqs = Vec::new();
    for rel in source.relations() {
        let d = source.relation_degree(rel);
        let img = rel.substitute(&images);
        let mut by_target: std::collections::BTreeMap<Monomial, Poly> =
            std::collections::BTreeMap::new();
        for (m, c) in img.terms() {
            let tm = Monomial(m.0[nu..].to_vec());
            let um = Monomial(m.0[..nu].to_vec());
            by_target
                .entry(tm)
                .or_insert_with(|| Poly::zero(nu))
                .add_term(um, c.clone());
        }
        let dim = target.betti(d)?;
        let mut coords = vec![Poly::zero(nu); dim];
        for (tm, coef) in by_target {
            let nf = target.coordinates(&Poly::monomial(tm, Q::one()), d)?;
            for (acc, x) in coords.iter_mut().zip(nf) {
                if !x.is_zero() {
                    *acc = &*acc + &coef.scale(&x);
                }
            }
        }
        eqs.extend(coords.into_iter().filter(|p| !p.is_zero()));
    }
    Ok(eqs)
}

fn poly_det(m: &[Vec<Poly>], nu: usize) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one(nu);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Poly::zero(nu);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &poly_det(&minor, nu);
        acc = if j % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}
