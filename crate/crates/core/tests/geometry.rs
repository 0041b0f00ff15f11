use std::sync::{Arc, OnceLock};

use nalgebra::DVector;
use proptest::prelude::*;

use hombundle_core::homgeo::bounds::{gaussian, rng};
use hombundle_core::homgeo::curvature::oracle;
use hombundle_core::homgeo::{
    curvature_operator, curvature_tensor, ricci, sec_bounds, Decomposition, LieAlgebraSpec,
    MetricFamily,
};
use hombundle_core::FamilySpec;

fn e1() -> Arc<Decomposition> {
    static D: OnceLock<Arc<Decomposition>> = OnceLock::new();
    D.get_or_init(|| FamilySpec::e(1).unwrap().geometry().unwrap())
        .clone()
}

fn m2() -> Arc<Decomposition> {
    static D: OnceLock<Arc<Decomposition>> = OnceLock::new();
    D.get_or_init(|| FamilySpec::m(2).geometry().unwrap())
        .clone()
}

fn family(which: bool, t: f64) -> MetricFamily {
    MetricFamily::new(if which { e1() } else { m2() }, t).unwrap()
}

fn tangent(mf: &MetricFamily, seed: u64, k: usize) -> Vec<DVector<f64>> {
    let mut r = rng(seed);
    (0..k)
        .map(|_| mf.from_frame(&gaussian(&mut r, mf.tangent_dim())))
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn dimensions() {
    assert_eq!(e1().tangent_dim(), 22);
    assert_eq!(m2().tangent_dim(), 13);
    let (h, m2_dim, m1) = m2().dims();
    assert_eq!(m2_dim + m1, 13);
    assert_eq!(h + 13, m2().dim());
}

#[test]
fn structure_constants_are_a_lie_algebra() {
    for g in [
        LieAlgebraSpec::su(3),
        LieAlgebraSpec::su(4),
        e1().algebra.as_ref().clone(),
    ] {
        assert!(g.jacobi_residual() < 1e-12);
        assert!(g.ad_invariance_residual() < 1e-12);
    }
}

#[test]
fn abelian_factor_brackets_vanish() {
    let g = LieAlgebraSpec::torus(3);
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(g.bracket(&g.unit(i), &g.unit(j)).norm(), 0.0);
        }
    }
}

#[test]
fn adjoint_is_minus_ad_at_t_one() {
    let mf = family(true, 1.0);
    let mut r = rng(11);
    for _ in 0..20 {
        let x = gaussian(&mut r, mf.dim());
        let y = gaussian(&mut r, mf.dim());
        let d = mf.ad_star(&x, &y) + mf.bracket(&x, &y);
        assert!(d.norm() < 1e-12);
    }
}

#[test]
fn ricci_trace_is_scalar_curvature() {
    for which in [true, false] {
        let mf = family(which, 0.4);
        let rep = ricci(&mf).unwrap();
        let n = mf.tangent_dim();
        let e: Vec<_> = (0..n).map(|i| mf.frame().column(i).into_owned()).collect();
        let mut scal = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    scal += curvature_tensor(&mf, &e[i], &e[j], &e[j], &e[i]).unwrap();
                }
            }
        }
        assert!(close(rep.trace, scal, 1e-9), "{} vs {scal}", rep.trace);
        assert!(close(rep.matrix.trace(), scal, 1e-9));
    }
}

#[test]
fn nonnegative_at_t_one_with_reproducible_witness() {
    let mf = family(false, 1.0);
    let a = sec_bounds(&mf, 200, 10, 9);
    let b = sec_bounds(&mf, 200, 10, 9);
    assert!(a.min.value >= -1e-9);
    assert_eq!(a.min.value, b.min.value);
    assert_eq!(a.min.u, b.min.u);
    assert!(close(a.min.reevaluate(&mf), a.min.value, 1e-9));
    assert!(close(a.max.reevaluate(&mf), a.max.value, 1e-9));
}

#[test]
fn operator_is_symmetric() {
    let mf = family(false, 0.5);
    let op = curvature_operator(&mf);
    assert_eq!(op.dim(), 13 * 12 / 2);
    assert!(op.symmetry_residual() < 1e-9);
}

#[test]
fn oracle_agrees_at_t_one_normal_homogeneous() {
    let mf = family(true, 1.0);
    let v = tangent(&mf, 4, 2);
    let k = mf.sec_quadrilinear(&v[0], &v[1]).unwrap();
    assert!(close(k, mf.normal_homogeneous_form(&v[0], &v[1]), 1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjoint_identity(seed in any::<u64>(), t in 0.05f64..=1.0, which in any::<bool>()) {
        let mf = family(which, t);
        let mut r = rng(seed);
        let x = gaussian(&mut r, mf.dim());
        let y = gaussian(&mut r, mf.dim());
        let z = gaussian(&mut r, mf.dim());
        let lhs = mf.inner(&mf.ad_star(&x, &y), &z);
        let rhs = mf.inner(&y, &mf.bracket(&x, &z));
        prop_assert!(close(lhs, rhs, 1e-9), "{lhs} vs {rhs}");
    }

    #[test]
    fn tensor_symmetries(seed in any::<u64>(), t in 0.05f64..=1.0, which in any::<bool>()) {
        let mf = family(which, t);
        let v = tangent(&mf, seed, 4);
        let r = |a: usize, b: usize, c: usize, d: usize| {
            curvature_tensor(&mf, &v[a], &v[b], &v[c], &v[d]).unwrap()
        };
        let base = r(0, 1, 2, 3);
        prop_assert!(close(base, -r(1, 0, 2, 3), 1e-8));
        prop_assert!(close(base, -r(0, 1, 3, 2), 1e-8));
        prop_assert!(close(base, r(2, 3, 0, 1), 1e-8));
        let bianchi = base + r(1, 2, 0, 3) + r(2, 0, 1, 3);
        prop_assert!(bianchi.abs() <= 1e-8 * base.abs().max(1.0));
    }

    #[test]
    fn polarized_tensor_matches_connection_oracle(
        seed in any::<u64>(),
        t in 0.05f64..=1.0,
        which in any::<bool>(),
    ) {
        let mf = family(which, t);
        let v = tangent(&mf, seed, 4);
        let ours = curvature_tensor(&mf, &v[0], &v[1], &v[2], &v[3]).unwrap();
        let theirs = oracle::base_tensor(&mf, &v[0], &v[1], &v[2], &v[3]);
        prop_assert!(close(ours, theirs, 1e-8), "{ours} vs {theirs}");
    }

    #[test]
    fn sectional_is_scale_invariant(seed in any::<u64>(), s in 0.1f64..10.0) {
        let mf = family(false, 0.3);
        let v = tangent(&mf, seed, 2);
        let k1 = mf.sectional(&v[0], &v[1]).unwrap();
        let k2 = mf.sectional(&(&v[0] * s), &(&v[1] + &v[0] * s)).unwrap();
        prop_assert!(close(k1, k2, 1e-8));
    }
}
