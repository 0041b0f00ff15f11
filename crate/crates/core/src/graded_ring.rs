//! Truncated graded-commutative rings given by generators and homogeneous
//! relations, with exact per-degree normal forms.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::RingError;
use crate::linalg::Echelon;
use crate::poly::{monomials_of_degree, parse_poly, Monomial, Poly, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: u32) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }
}

#[derive(Clone, Debug)]
struct Piece {
    /// All monomials of this degree in increasing lex order.
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    ideal: Echelon,
    /// Non-pivot columns, lex-largest first.
    basis: Vec<usize>,
}

impl Piece {
    fn vector_of(&self, p: &Poly) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.monomials.len()];
        for (m, c) in p.terms() {
            v[self.index[m]] = c.clone();
        }
        v
    }
}

/// Generators of positive degree, homogeneous relations, and a truncation
/// degree `T`. Only degrees `0..=T` are represented.
#[derive(Clone, Debug)]
pub struct GradedRingPresentation {
    generators: Vec<Generator>,
    relations: Vec<Poly>,
    truncation: u32,
    pieces: Vec<Piece>,
}

impl PartialEq for GradedRingPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators
            && self.relations == other.relations
            && self.truncation == other.truncation
    }
}

impl Eq for GradedRingPresentation {}

impl GradedRingPresentation {
    pub fn new(
        generators: Vec<Generator>,
        relations: Vec<Poly>,
        truncation: u32,
    ) -> Result<Self, RingError> {
        let mut seen = HashSet::new();
        for g in &generators {
            if g.degree == 0 {
                return Err(RingError::DegreeZeroGenerator {
                    name: g.name.clone(),
                });
            }
            if !seen.insert(g.name.clone()) {
                return Err(RingError::DuplicateGenerator {
                    name: g.name.clone(),
                });
            }
        }
        let names: Vec<String> = generators.iter().map(|g| g.name.clone()).collect();
        let weights: Vec<u32> = generators.iter().map(|g| g.degree).collect();
        let mut rel_degrees = Vec::with_capacity(relations.len());
        let mut kept = Vec::with_capacity(relations.len());
        for r in relations {
            assert_eq!(
                r.nvars(),
                generators.len(),
                "relation lives in a different polynomial ring"
            );
            if r.is_zero() {
                continue;
            }
            let Some(d) = r.homogeneous_degree(&weights) else {
                return Err(RingError::NotHomogeneous {
                    relation: r.format(&names),
                });
            };
            if d == 0 {
                return Err(RingError::DegreeZeroRelation {
                    relation: r.format(&names),
                });
            }
            if d > truncation {
                return Err(RingError::AboveTruncation {
                    relation: r.format(&names),
                    degree: d,
                    truncation,
                });
            }
            rel_degrees.push(d);
            kept.push(r);
        }

        let mut pieces = Vec::with_capacity(truncation as usize + 1);
        for d in 0..=truncation {
            let monomials = monomials_of_degree(&weights, d);
            let index: HashMap<Monomial, usize> = monomials
                .iter()
                .enumerate()
                .map(|(i, m)| (m.clone(), i))
                .collect();
            let mut ideal = Echelon::new(monomials.len());
            for (r, &rd) in kept.iter().zip(&rel_degrees) {
                if rd > d {
                    continue;
                }
                for m in monomials_of_degree(&weights, d - rd) {
                    let prod = r.mul_monomial(&m, &Q::one());
                    let mut v = vec![Q::zero(); monomials.len()];
                    for (k, c) in prod.terms() {
                        v[index[k]] = c.clone();
                    }
                    ideal.insert(v);
                }
            }
            let mut basis = ideal.free_columns();
            basis.reverse();
            pieces.push(Piece {
                monomials,
                index,
                ideal,
                basis,
            });
        }
        Ok(GradedRingPresentation {
            generators,
            relations: kept,
            truncation,
            pieces,
        })
    }

    /// Parses the line format produced by [`GradedRingPresentation::to_text`].
    pub fn from_text(text: &str) -> Result<Self, RingError> {
        let mut gens = Vec::new();
        let mut rels: Vec<(usize, String)> = Vec::new();
        let mut trunc: Option<u32> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |reason: String| RingError::Parse {
                line: lineno + 1,
                reason,
            };
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match kw {
                "gen" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(perr("expected `gen <name> <degree>`".into()));
                    }
                    let deg = parts[1]
                        .parse()
                        .map_err(|_| perr(format!("bad degree `{}`", parts[1])))?;
                    gens.push(Generator::new(parts[0], deg));
                }
                "rel" => rels.push((lineno + 1, rest.trim().to_string())),
                "trunc" => {
                    trunc = Some(
                        rest.trim()
                            .parse()
                            .map_err(|_| perr(format!("bad truncation `{rest}`")))?,
                    );
                }
                other => return Err(perr(format!("unknown keyword `{other}`"))),
            }
        }
        let names: Vec<String> = gens.iter().map(|g| g.name.clone()).collect();
        let mut relations = Vec::new();
        for (line, r) in rels {
            relations.push(parse_poly(&r, &names).map_err(|e| RingError::Parse {
                line,
                reason: e.reason,
            })?);
        }
        let truncation = trunc.ok_or(RingError::Parse {
            line: 0,
            reason: "missing `trunc` line".into(),
        })?;
        GradedRingPresentation::new(gens, relations, truncation)
    }

    pub fn to_text(&self) -> String {
        let names = self.names();
        let mut out = String::new();
        for g in &self.generators {
            out.push_str(&format!("gen {} {}\n", g.name, g.degree));
        }
        out.push_str(&format!("trunc {}\n", self.truncation));
        for r in &self.relations {
            out.push_str(&format!("rel {}\n", r.format_explicit(&names)));
        }
        out
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn relations(&self) -> &[Poly] {
        &self.relations
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree).collect()
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn relation_degree(&self, r: &Poly) -> u32 {
        r.homogeneous_degree(&self.weights()).unwrap_or(0)
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly::var(self.ngens(), i)
    }

    pub fn parse(&self, s: &str) -> Result<Poly, RingError> {
        parse_poly(s, &self.names()).map_err(|e| RingError::Parse {
            line: 0,
            reason: e.reason,
        })
    }

    pub fn format(&self, p: &Poly) -> String {
        p.format(&self.names())
    }

    fn piece(&self, d: u32) -> Result<&Piece, RingError> {
        self.pieces
            .get(d as usize)
            .ok_or(RingError::DegreeOutOfRange {
                degree: d,
                truncation: self.truncation,
            })
    }

    pub fn betti(&self, d: u32) -> Result<usize, RingError> {
        Ok(self.piece(d)?.basis.len())
    }

    /// Dimensions in degrees `0..=T`.
    pub fn betti_numbers(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.basis.len()).collect()
    }

    /// Standard monomials of degree `d`, lex-largest first.
    pub fn degree_basis(&self, d: u32) -> Result<Vec<Monomial>, RingError> {
        let p = self.piece(d)?;
        Ok(p.basis.iter().map(|&c| p.monomials[c].clone()).collect())
    }

    /// Coordinates of `p` (assumed of degree `d`) in the degree basis.
    pub fn coordinates(&self, p: &Poly, d: u32) -> Result<Vec<Q>, RingError> {
        let piece = self.piece(d)?;
        let weights = self.weights();
        if let Some((m, _)) = p.terms().find(|(m, _)| m.weighted_degree(&weights) != d) {
            return Err(RingError::NotHomogeneous {
                relation: format!(
                    "{} (term {} outside degree {d})",
                    self.format(p),
                    m.format(&self.names())
                ),
            });
        }
        let mut v = piece.vector_of(p);
        piece.ideal.reduce(&mut v);
        Ok(piece.basis.iter().map(|&c| v[c].clone()).collect())
    }

    /// Whether `p` lies in the ideal. Terms above the truncation vanish.
    pub fn is_zero_in_ring(&self, p: &Poly) -> Result<bool, RingError> {
        let weights = self.weights();
        let mut by_degree: HashMap<u32, Poly> = HashMap::new();
        for (m, c) in p.terms() {
            let d = m.weighted_degree(&weights);
            if d > self.truncation {
                continue;
            }
            by_degree
                .entry(d)
                .or_insert_with(|| Poly::zero(self.ngens()))
                .add_term(m.clone(), c.clone());
        }
        for (d, part) in by_degree {
            if self.coordinates(&part, d)?.iter().any(|c| !c.is_zero()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Polynomial with the given coordinates in the degree-`d` basis.
    pub fn lift(&self, coords: &[Q], d: u32) -> Result<Poly, RingError> {
        let piece = self.piece(d)?;
        if coords.len() != piece.basis.len() {
            return Err(RingError::WrongLength {
                expected: piece.basis.len(),
                got: coords.len(),
            });
        }
        Ok(Poly::from_terms(
            self.ngens(),
            piece
                .basis
                .iter()
                .zip(coords)
                .map(|(&c, x)| (piece.monomials[c].clone(), x.clone())),
        ))
    }

    pub fn class(self: &Arc<Self>, p: &Poly) -> Result<RingClass, RingError> {
        let d = p
            .homogeneous_degree(&self.weights())
            .ok_or_else(|| RingError::NotHomogeneous {
                relation: self.format(p),
            })?;
        self.class_in_degree(p, d)
    }

    pub fn class_in_degree(self: &Arc<Self>, p: &Poly, d: u32) -> Result<RingClass, RingError> {
        let coords = self.coordinates(p, d)?;
        Ok(RingClass {
            ring: Arc::clone(self),
            degree: d,
            coords,
        })
    }

    pub fn class_from_coords(
        self: &Arc<Self>,
        coords: Vec<Q>,
        d: u32,
    ) -> Result<RingClass, RingError> {
        let n = self.betti(d)?;
        if coords.len() != n {
            return Err(RingError::WrongLength {
                expected: n,
                got: coords.len(),
            });
        }
        Ok(RingClass {
            ring: Arc::clone(self),
            degree: d,
            coords,
        })
    }

    pub fn generator_class(self: &Arc<Self>, i: usize) -> Result<RingClass, RingError> {
        self.class(&self.var(i))
    }

    /// A minimal homogeneous generating set of the relation ideal (through
    /// the truncation). Each degree's new relations are in reduced echelon
    /// form with leading coefficient 1 on the lex-largest monomial.
    pub fn minimal_relations(&self) -> Vec<Poly> {
        let weights = self.weights();
        let n = self.ngens();
        let mut minimal: Vec<(u32, Poly)> = Vec::new();
        for d in 1..=self.truncation {
            let piece = &self.pieces[d as usize];
            let ncols = piece.monomials.len();
            let rev = |c: usize| ncols - 1 - c;
            let mut generated = Echelon::new(ncols);
            for (rd, r) in &minimal {
                for m in monomials_of_degree(&weights, d - rd) {
                    let mut v = vec![Q::zero(); ncols];
                    for (k, c) in r.mul_monomial(&m, &Q::one()).terms() {
                        v[rev(piece.index[k])] = c.clone();
                    }
                    generated.insert(v);
                }
            }
            let mut fresh = Echelon::new(ncols);
            for row in &piece.ideal.rows {
                let mut v = vec![Q::zero(); ncols];
                for (c, x) in row.iter().enumerate() {
                    v[rev(c)] = x.clone();
                }
                generated.reduce(&mut v);
                fresh.insert(v);
            }
            for row in fresh.rows {
                let p = Poly::from_terms(
                    n,
                    row.into_iter()
                        .enumerate()
                        .map(|(c, x)| (piece.monomials[rev(c)].clone(), x)),
                );
                minimal.push((d, p));
            }
        }
        minimal.into_iter().map(|(_, p)| p).collect()
    }

    /// Same ring, truncated lower. Relations above the new bound are dropped.
    pub fn truncated(&self, truncation: u32) -> Result<Self, RingError> {
        let weights = self.weights();
        let rels = self
            .relations
            .iter()
            .filter(|r| {
                r.homogeneous_degree(&weights)
                    .is_some_and(|d| d <= truncation)
            })
            .cloned()
            .collect();
        GradedRingPresentation::new(self.generators.clone(), rels, truncation)
    }

    pub fn with_relations(&self, extra: impl IntoIterator<Item = Poly>) -> Result<Self, RingError> {
        let mut rels = self.relations.clone();
        rels.extend(extra);
        GradedRingPresentation::new(self.generators.clone(), rels, self.truncation)
    }

    pub fn renamed(&self, names: &[&str]) -> Result<Self, RingError> {
        assert_eq!(names.len(), self.ngens());
        let gens = self
            .generators
            .iter()
            .zip(names)
            .map(|(g, n)| Generator::new(*n, g.degree))
            .collect();
        GradedRingPresentation::new(gens, self.relations.clone(), self.truncation)
    }

    /// Tensor product of presentations, truncated at the smaller bound.
    pub fn tensor(&self, other: &Self) -> Result<Self, RingError> {
        let n1 = self.ngens();
        let n = n1 + other.ngens();
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        let left: Vec<usize> = (0..n1).collect();
        let right: Vec<usize> = (n1..n).collect();
        let truncation = self.truncation.min(other.truncation);
        let mut rels: Vec<Poly> = self.relations.iter().map(|r| r.reindex(n, &left)).collect();
        rels.extend(other.relations.iter().map(|r| r.reindex(n, &right)));
        let weights: Vec<u32> = gens.iter().map(|g| g.degree).collect();
        rels.retain(|r| {
            r.homogeneous_degree(&weights)
                .is_some_and(|d| d <= truncation)
        });
        GradedRingPresentation::new(gens, rels, truncation)
    }

    /// Cohomology of `S^n` (one generator `z` with `z^2 = 0`), truncated.
    pub fn sphere(name: &str, n: u32, truncation: u32) -> Result<Self, RingError> {
        let z = Poly::var(1, 0);
        let rels = if 2 * n <= truncation {
            vec![&z * &z]
        } else {
            vec![]
        };
        GradedRingPresentation::new(vec![Generator::new(name, n)], rels, truncation)
    }

    /// Cohomology of a product of complex projective planes `z_i^3 = 0`.
    pub fn cp2_power(names: &[&str], truncation: u32) -> Result<Self, RingError> {
        let n = names.len();
        let gens = names.iter().map(|s| Generator::new(*s, 2)).collect();
        let rels = (0..n)
            .map(|i| Poly::var(n, i).pow(3))
            .filter(|_| 6 <= truncation)
            .collect();
        GradedRingPresentation::new(gens, rels, truncation)
    }
}

impl fmt::Display for GradedRingPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// An element of one homogeneous piece, in the standard-monomial basis.
#[derive(Clone, Debug)]
pub struct RingClass {
    pub ring: Arc<GradedRingPresentation>,
    pub degree: u32,
    pub coords: Vec<Q>,
}

impl PartialEq for RingClass {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring)
            && self.degree == other.degree
            && self.coords == other.coords
    }
}

fn same_ring(a: &Arc<GradedRingPresentation>, b: &Arc<GradedRingPresentation>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl RingClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn to_poly(&self) -> Poly {
        self.ring
            .lift(&self.coords, self.degree)
            .expect("class coordinates match their ring")
    }

    /// Product in the truncated ring. Products above `T` are rejected.
    pub fn multiply(&self, other: &RingClass) -> Result<RingClass, RingError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(RingError::RingMismatch);
        }
        let d = self.degree + other.degree;
        if d > self.ring.truncation {
            return Err(RingError::DegreeOutOfRange {
                degree: d,
                truncation: self.ring.truncation,
            });
        }
        let p = &self.to_poly() * &other.to_poly();
        self.ring.class_in_degree(&p, d)
    }

    pub fn add(&self, other: &RingClass) -> Result<RingClass, RingError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(RingError::RingMismatch);
        }
        if self.degree != other.degree {
            return Err(RingError::NotHomogeneous {
                relation: "sum of classes of different degree".into(),
            });
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(RingClass {
            ring: Arc::clone(&self.ring),
            degree: self.degree,
            coords,
        })
    }

    pub fn scale(&self, c: &Q) -> RingClass {
        RingClass {
            ring: Arc::clone(&self.ring),
            degree: self.degree,
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn format(&self) -> String {
        self.ring.format(&self.to_poly())
    }
}

/// Multiplication by a fixed class from degree `source_degree` to
/// `source_degree + deg(class)`, written in the two degree bases.
#[derive(Clone, Debug)]
pub struct MultMap {
    pub source_degree: u32,
    pub target_degree: u32,
    /// `matrix[i][j]`: coefficient of target basis element `i` in the image of source basis element `j`.
    pub matrix: Vec<Vec<Q>>,
    pub rank: usize,
    /// Basis of the kernel in source coordinates.
    pub kernel: Vec<Vec<Q>>,
}

impl MultMap {
    pub fn is_injective(&self) -> bool {
        self.kernel.is_empty()
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.len()
    }
}

pub fn mult_map(class: &RingClass, source_degree: u32) -> Result<MultMap, RingError> {
    let ring = &class.ring;
    let target_degree = source_degree + class.degree;
    let src = ring.degree_basis(source_degree)?;
    let tgt_dim = ring.betti(target_degree)?;
    let e = class.to_poly();
    let mut columns = Vec::with_capacity(src.len());
    for m in &src {
        let p = &Poly::monomial(m.clone(), Q::one()) * &e;
        columns.push(ring.coordinates(&p, target_degree)?);
    }
    let matrix: Vec<Vec<Q>> = (0..tgt_dim)
        .map(|i| columns.iter().map(|c| c[i].clone()).collect())
        .collect();
    let kernel = crate::linalg::kernel(&matrix, src.len());
    let rank = src.len() - kernel.len();
    Ok(MultMap {
        source_degree,
        target_degree,
        matrix,
        rank,
        kernel,
    })
}

/// Relations of the given degree among the listed generators, as an
/// echelonized basis (leading coefficient 1 on the lex-largest monomial).
pub fn find_relations(
    ring: &GradedRingPresentation,
    generators: &[usize],
    degree: u32,
) -> Result<Vec<Poly>, RingError> {
    let n = ring.ngens();
    let all_weights = ring.weights();
    let sub_weights: Vec<u32> = generators.iter().map(|&i| all_weights[i]).collect();
    let mut formal: Vec<Monomial> = monomials_of_degree(&sub_weights, degree)
        .into_iter()
        .map(|m| {
            let mut e = vec![0; n];
            for (k, &i) in generators.iter().enumerate() {
                e[i] += m.0[k];
            }
            Monomial(e)
        })
        .collect();
    formal.sort();
    formal.reverse();
    let images: Vec<Vec<Q>> = formal
        .iter()
        .map(|m| ring.coordinates(&Poly::monomial(m.clone(), Q::one()), degree))
        .collect::<Result<_, _>>()?;
    let dim = ring.betti(degree)?;
    let matrix: Vec<Vec<Q>> = (0..dim)
        .map(|i| images.iter().map(|c| c[i].clone()).collect())
        .collect();
    let ker = crate::linalg::kernel(&matrix, formal.len());
    let echelon = Echelon::from_rows(formal.len(), ker);
    Ok(echelon
        .rows
        .iter()
        .map(|row| {
            Poly::from_terms(
                n,
                formal.iter().zip(row).map(|(m, c)| (m.clone(), c.clone())),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    #[test]
    fn cp2_power_betti() {
        let r = GradedRingPresentation::cp2_power(&["a", "b"], 8).unwrap();
        assert_eq!(r.betti_numbers(), vec![1, 0, 2, 0, 3, 0, 2, 0, 1]);
    }

    #[test]
    fn sphere_product_kunneth() {
        let s = GradedRingPresentation::sphere("u", 3, 8).unwrap();
        let cp = GradedRingPresentation::cp2_power(&["a"], 8).unwrap();
        let t = cp.tensor(&s).unwrap();
        assert_eq!(t.betti_numbers(), vec![1, 0, 1, 1, 1, 1, 0, 1, 0]);
    }

    #[test]
    fn text_roundtrip() {
        let r = GradedRingPresentation::cp2_power(&["x1", "x2"], 6)
            .unwrap()
            .with_relations([
                parse_poly("x1^2*x2 - 2*x1*x2^2", &["x1".into(), "x2".into()]).unwrap(),
            ])
            .unwrap();
        let back = GradedRingPresentation::from_text(&r.to_text()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.betti_numbers(), r.betti_numbers());
    }

    #[test]
    fn rejects_inhomogeneous_and_out_of_range() {
        let n = 2;
        let bad = &Poly::var(n, 0) + &Poly::var(n, 1).pow(2);
        let gens = vec![Generator::new("a", 2), Generator::new("b", 2)];
        assert!(matches!(
            GradedRingPresentation::new(gens.clone(), vec![bad], 6),
            Err(RingError::NotHomogeneous { .. })
        ));
        let high = Poly::var(n, 0).pow(4);
        assert!(matches!(
            GradedRingPresentation::new(gens, vec![high], 6),
            Err(RingError::AboveTruncation { .. })
        ));
    }

    #[test]
    fn multiplication_respects_relations() {
        let r = Arc::new(GradedRingPresentation::cp2_power(&["a", "b"], 8).unwrap());
        let a = r.generator_class(0).unwrap();
        let b = r.generator_class(1).unwrap();
        let a2 = a.multiply(&a).unwrap();
        assert!(a2.multiply(&a).unwrap().is_zero());
        let ab = a.multiply(&b).unwrap();
        assert!(!ab.is_zero());
        let top = a2.multiply(&b).unwrap().multiply(&b).unwrap();
        assert_eq!(top.coords, vec![q(1)]);
        assert!(a2.multiply(&a2).unwrap().is_zero());
        let other = Arc::new(GradedRingPresentation::cp2_power(&["c"], 8).unwrap());
        let c = other.generator_class(0).unwrap();
        assert_eq!(a.multiply(&c), Err(RingError::RingMismatch));
    }
}
