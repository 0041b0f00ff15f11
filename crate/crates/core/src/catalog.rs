//! The two bundle families and their sphere products. Topology and geometry
//! read their integer data from the same functions.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{CatalogError, RingError};
use crate::graded_ring::{Generator, GradedRingPresentation};
use crate::gysin::{torus_quotient, BundleSpec, TorusQuotient};
use crate::homgeo::{
    build_decomposition, Decomposition, Factor, HomogeneousLayout, Isotropy, LieAlgebraSpec,
};
use crate::poly::{Poly, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// 22-dimensional, over `(CP^2)^5` with fiber `T^2`.
    E { alpha: i64 },
    /// 13-dimensional, over the product of two flag manifolds with fiber `S^1`.
    M { a: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FamilySpec {
    pub family: Family,
    pub sphere: Option<u32>,
}

/// Euler classes of the `E` family on `z1..z5`.
pub fn e_alpha_classes(alpha: i64) -> [[i64; 5]; 2] {
    [[1, 1, 1, 1, 0], [1, 0, alpha, 0, 1]]
}

/// Euler class of the `M` family on `x1, y1, x2, y2`.
pub fn m_a_class(a: i64) -> [i64; 4] {
    [a, 1, 0, -1]
}

pub const E_BASE_NAMES: [&str; 5] = ["z1", "z2", "z3", "z4", "z5"];
pub const E_NAMES: [&str; 3] = ["x1", "x2", "x3"];
pub const M_BASE_NAMES: [&str; 4] = ["x1", "y1", "x2", "y2"];
pub const SPHERE_NAME: &str = "z";

/// Truncation of the bases; the total spaces are reported through degree 6.
pub const BASE_TRUNCATION: u32 = 8;
pub const FINAL_TRUNCATION: u32 = 6;

/// `H*(SU(3)/T^2 x SU(3)/T^2)` in Borel's presentation.
pub fn flag_pair_ring(truncation: u32) -> Result<GradedRingPresentation, RingError> {
    let names: Vec<String> = M_BASE_NAMES.iter().map(|s| s.to_string()).collect();
    let rels = [
        "x1^2 + x1*y1 + y1^2",
        "x1^2*y1 + x1*y1^2",
        "x2^2 + x2*y2 + y2^2",
        "x2^2*y2 + x2*y2^2",
    ]
    .iter()
    .map(|s| crate::poly::parse_poly(s, &names).expect("static relation parses"))
    .collect();
    let gens = M_BASE_NAMES.iter().map(|s| Generator::new(*s, 2)).collect();
    GradedRingPresentation::new(gens, rels, truncation)
}

impl FamilySpec {
    pub fn e(alpha: i64) -> Result<Self, CatalogError> {
        if alpha < 1 {
            return Err(CatalogError::NonpositiveAlpha { alpha });
        }
        Ok(FamilySpec {
            family: Family::E { alpha },
            sphere: None,
        })
    }

    pub fn m(a: i64) -> Self {
        FamilySpec {
            family: Family::M { a },
            sphere: None,
        }
    }

    pub fn with_sphere(self, n: u32) -> Result<Self, CatalogError> {
        if n <= 1 {
            return Err(CatalogError::SphereTooSmall { n });
        }
        Ok(FamilySpec {
            sphere: Some(n),
            ..self
        })
    }

    pub fn label(&self) -> String {
        let base = match self.family {
            Family::E { alpha } => format!("E_{alpha}"),
            Family::M { a } => format!("M_{a}"),
        };
        match self.sphere {
            Some(n) => format!("{base} x S^{n}"),
            None => base,
        }
    }

    /// Real dimension of the bundle total space, excluding any sphere factor.
    pub fn dimension(&self) -> usize {
        match self.family {
            Family::E { .. } => 22,
            Family::M { .. } => 13,
        }
    }

    pub fn euler_vectors(&self) -> Vec<Vec<i64>> {
        match self.family {
            Family::E { alpha } => e_alpha_classes(alpha).iter().map(|v| v.to_vec()).collect(),
            Family::M { a } => vec![m_a_class(a).to_vec()],
        }
    }

    pub fn bundle_spec(&self) -> Result<BundleSpec, CatalogError> {
        let base = match self.family {
            Family::E { .. } => GradedRingPresentation::cp2_power(&E_BASE_NAMES, BASE_TRUNCATION)?,
            Family::M { .. } => flag_pair_ring(BASE_TRUNCATION)?,
        };
        Ok(BundleSpec {
            base: Arc::new(base),
            euler_classes: self.euler_vectors(),
            final_truncation: FINAL_TRUNCATION,
        })
    }

    /// Cohomology through degree 6, with the sphere factor tensored in.
    pub fn cohomology(&self) -> Result<FamilyCohomology, CatalogError> {
        let spec = self.bundle_spec()?;
        let quotient = torus_quotient(&spec)?;
        let mut ring = (*quotient.total).clone();
        if let Family::E { .. } = self.family {
            ring = ring.renamed(&E_NAMES)?;
        }
        let bundle_ring = Arc::new(ring.clone());
        if let Some(n) = self.sphere {
            ring = ring.tensor(&GradedRingPresentation::sphere(
                SPHERE_NAME,
                n,
                FINAL_TRUNCATION,
            )?)?;
        }
        Ok(FamilyCohomology {
            spec,
            quotient,
            bundle_ring,
            ring: Arc::new(ring),
        })
    }

    /// Group and isotropy data. The weights are the Euler-class vectors read
    /// as coefficients of diagonal characters. A sphere factor is ignored.
    pub fn geometry_layout(&self) -> (LieAlgebraSpec, HomogeneousLayout) {
        match self.family {
            Family::E { .. } => {
                let mut factors = vec![Factor::Su(3); 5];
                factors.push(Factor::Torus(2));
                let weights = self
                    .euler_vectors()
                    .iter()
                    .map(|row| row.iter().map(|&w| vec![w as f64, 0.0, 0.0]).collect())
                    .collect();
                let layout = HomogeneousLayout {
                    isotropy: vec![Isotropy::BlockDiagonal(vec![1, 2]); 5],
                    fiber_block: 5,
                    weights,
                };
                (LieAlgebraSpec::direct_sum(&factors), layout)
            }
            Family::M { .. } => {
                let factors = [Factor::Su(3), Factor::Su(3), Factor::Torus(1)];
                let weights = self
                    .euler_vectors()
                    .iter()
                    .map(|row| {
                        row.chunks(2)
                            .map(|c| vec![c[0] as f64, c[1] as f64, 0.0])
                            .collect()
                    })
                    .collect();
                let layout = HomogeneousLayout {
                    isotropy: vec![Isotropy::MaximalTorus; 2],
                    fiber_block: 2,
                    weights,
                };
                (LieAlgebraSpec::direct_sum(&factors), layout)
            }
        }
    }

    pub fn geometry(&self) -> Result<Arc<Decomposition>, CatalogError> {
        let (g, layout) = self.geometry_layout();
        g.validate()?;
        let d = build_decomposition(Arc::new(g), &layout)?;
        if d.tangent_dim() != self.dimension() {
            return Err(crate::error::GeoError::DimensionMismatch {
                what: format!("tangent dimension {} for {}", d.tangent_dim(), self.label()),
            }
            .into());
        }
        Ok(Arc::new(d))
    }
}

/// Reads a bundle spec. Lines are `base cp2^<n>`, `base flag-pair`, or an
/// inline presentation (`gen`/`trunc`/`rel` lines), plus one `euler <ints>`
/// line per circle and an optional `final <degree>` (default 6).
pub fn parse_bundle_spec(text: &str) -> Result<BundleSpec, CatalogError> {
    let mut named: Option<GradedRingPresentation> = None;
    let mut inline = String::new();
    let mut euler = Vec::new();
    let mut final_truncation = FINAL_TRUNCATION;
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let err = |reason: String| CatalogError::Spec {
            line: k + 1,
            reason,
        };
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match kw {
            "" => {}
            "base" => {
                let rest = rest.trim();
                named = Some(if rest == "flag-pair" {
                    flag_pair_ring(BASE_TRUNCATION)?
                } else if let Some(n) = rest.strip_prefix("cp2^") {
                    let n: usize = n.parse().map_err(|_| err(format!("bad power `{n}`")))?;
                    let names: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
                    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
                    GradedRingPresentation::cp2_power(&refs, BASE_TRUNCATION)?
                } else {
                    return Err(err(format!("unknown base `{rest}`")));
                });
            }
            "euler" => euler.push(
                rest.split_whitespace()
                    .map(|w| w.parse().map_err(|_| err(format!("bad integer `{w}`"))))
                    .collect::<Result<Vec<i64>, _>>()?,
            ),
            "final" => {
                final_truncation = rest
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad degree `{rest}`")))?
            }
            "gen" | "rel" | "trunc" => {
                inline.push_str(line);
                inline.push('\n');
            }
            other => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }
    let base = match (named, inline.is_empty()) {
        (Some(b), true) => b,
        (None, false) => GradedRingPresentation::from_text(&inline)?,
        (Some(_), false) => {
            return Err(CatalogError::Spec {
                line: 0,
                reason: "both a named and an inline base".into(),
            })
        }
        (None, true) => {
            return Err(CatalogError::Spec {
                line: 0,
                reason: "no base".into(),
            })
        }
    };
    if euler.is_empty() {
        return Err(CatalogError::Spec {
            line: 0,
            reason: "no euler classes".into(),
        });
    }
    Ok(BundleSpec {
        base: Arc::new(base),
        euler_classes: euler,
        final_truncation,
    })
}

/// Inverse of [`parse_bundle_spec`], with the base written inline.
pub fn bundle_spec_text(spec: &BundleSpec) -> String {
    let mut out = spec.base.to_text();
    for e in &spec.euler_classes {
        let ws: Vec<String> = e.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("euler {}\n", ws.join(" ")));
    }
    out.push_str(&format!("final {}\n", spec.final_truncation));
    out
}

/// Group factors, isotropy and weights, one item per line.
pub fn layout_text(g: &LieAlgebraSpec, layout: &HomogeneousLayout) -> String {
    let mut out = String::new();
    for b in g.blocks() {
        out.push_str(&format!("factor {}\n", b.factor.label()));
    }
    for (i, iso) in layout.isotropy.iter().enumerate() {
        let desc = match iso {
            Isotropy::MaximalTorus => "maximal-torus".to_string(),
            Isotropy::BlockDiagonal(s) => {
                let s: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                format!("blocks {}", s.join(" "))
            }
        };
        out.push_str(&format!("isotropy {i} {desc}\n"));
    }
    out.push_str(&format!("fiber {}\n", layout.fiber_block));
    for (j, row) in layout.weights.iter().enumerate() {
        for (b, w) in row.iter().enumerate() {
            let w: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("weight {j} {b} {}\n", w.join(" ")));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct FamilyCohomology {
    pub spec: BundleSpec,
    pub quotient: TorusQuotient,
    /// The bundle's own ring with reporting names.
    pub bundle_ring: Arc<GradedRingPresentation>,
    /// Including the sphere factor, if any.
    pub ring: Arc<GradedRingPresentation>,
}

/// `(a^2-1) x1^2 + (2a-1) x1 y1 + x2^2 + a x1 x2 + y1 x2` on `x1, y1, x2`.
pub fn r_a_formula(a: i64) -> Poly {
    let names: Vec<String> = ["x1", "y1", "x2"].iter().map(|s| s.to_string()).collect();
    let mut p = Poly::zero(3);
    let mono = |s: &str| crate::poly::parse_poly(s, &names).unwrap();
    let terms = [
        (a * a - 1, "x1^2"),
        (2 * a - 1, "x1*y1"),
        (1, "x2^2"),
        (a, "x1*x2"),
        (1, "y1*x2"),
    ];
    for (c, m) in terms {
        p = &p + &mono(m).scale(&Q::from_integer(c.into()));
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e_betti() {
        for alpha in 1..=4 {
            let c = FamilySpec::e(alpha).unwrap().cohomology().unwrap();
            assert_eq!(c.ring.betti_numbers(), vec![1, 0, 3, 0, 6, 0, 5]);
        }
    }

    #[test]
    fn m_betti_and_r_a() {
        for a in 0..=5 {
            let c = FamilySpec::m(a).cohomology().unwrap();
            let r = r_a_formula(a);
            assert!(c.ring.is_zero_in_ring(&r).unwrap(), "a = {a}");
            let b = c.ring.betti_numbers();
            assert_eq!(&b[..5], &[1, 0, 3, 0, 4]);
            assert_eq!(b[6], if a <= 1 { 3 } else { 2 }, "a = {a}");
        }
    }

    #[test]
    fn bundle_spec_round_trip() {
        let spec = FamilySpec::e(3).unwrap().bundle_spec().unwrap();
        let text = bundle_spec_text(&spec);
        let back = parse_bundle_spec(&text).unwrap();
        assert_eq!(*back.base, *spec.base);
        assert_eq!(back.euler_classes, spec.euler_classes);
        let named = parse_bundle_spec("base cp2^5\neuler 1 1 1 1 0\neuler 1 0 3 0 1\n").unwrap();
        assert_eq!(*named.base, *spec.base);
        assert!(matches!(
            parse_bundle_spec("base cp2^5\n"),
            Err(CatalogError::Spec { .. })
        ));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(
            FamilySpec::e(0),
            Err(CatalogError::NonpositiveAlpha { alpha: 0 })
        );
        assert!(matches!(
            FamilySpec::m(2).with_sphere(1),
            Err(CatalogError::SphereTooSmall { n: 1 })
        ));
    }
}
