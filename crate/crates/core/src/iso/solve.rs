//! Consistency of small polynomial systems over Q, with exact certificates.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::IsoError;
use crate::groebner::{groebner, specialize_last, Budget, GroebnerBasis, Order};
use crate::poly::{Monomial, Poly, Q};

/// `sum cofactors[i] * inputs[i] = 1`, so the inputs have no common zero.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitCertificate {
    pub inputs: Vec<Poly>,
    pub cofactors: Vec<Poly>,
}

impl UnitCertificate {
    /// Re-expands the combination exactly.
    pub fn verify(&self) -> bool {
        let n = self.inputs.first().map_or(0, Poly::nvars);
        let mut sum = Poly::zero(n);
        for (c, f) in self.cofactors.iter().zip(&self.inputs) {
            sum = &sum + &(c * f);
        }
        sum == Poly::one(n)
    }

    pub fn size(&self) -> usize {
        self.cofactors.iter().map(Poly::num_terms).sum()
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        json!({
            "inputs": self.inputs.iter().map(|p| p.format(names)).collect::<Vec<_>>(),
            "cofactors": self.cofactors.iter().map(|p| p.format(names)).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub enum SystemOutcome {
    Inconsistent(UnitCertificate),
    Consistent {
        /// Lex basis (with the auxiliary variable first if one was added).
        basis: GroebnerBasis,
        /// A rational solution in the original variables, when one was found.
        witness: Option<Vec<Q>>,
    },
}

impl SystemOutcome {
    pub fn is_consistent(&self) -> bool {
        matches!(self, SystemOutcome::Consistent { .. })
    }
}

/// Decides whether `equations = 0` has a solution over C with every
/// polynomial in `nonvanishing` nonzero. The nonvanishing condition is
/// encoded with one auxiliary variable `u` (placed first): `u * prod - 1`.
pub fn solve_small_system(
    equations: &[Poly],
    nonvanishing: &[Poly],
    budget: Budget,
) -> Result<SystemOutcome, IsoError> {
    let n = equations
        .first()
        .or(nonvanishing.first())
        .map_or(0, Poly::nvars);
    let mut inputs: Vec<Poly>;
    let shift: Vec<usize> = (1..=n).collect();
    let aux = !nonvanishing.is_empty();
    if aux {
        inputs = equations.iter().map(|p| p.reindex(n + 1, &shift)).collect();
        let mut prod = Poly::one(n + 1);
        for f in nonvanishing {
            prod = &prod * &f.reindex(n + 1, &shift);
        }
        inputs.push(&(&Poly::var(n + 1, 0) * &prod) - &Poly::one(n + 1));
    } else {
        inputs = equations.to_vec();
    }
    inputs.retain(|p| !p.is_zero());
    let nv = if aux { n + 1 } else { n };
    if inputs.is_empty() {
        return Ok(SystemOutcome::Consistent {
            basis: GroebnerBasis {
                nvars: nv,
                order: Order::Lex,
                polys: vec![],
                cofactors: None,
            },
            witness: Some(vec![Q::zero(); n]),
        });
    }
    let quick = groebner(&inputs, Order::GrevLex, false, budget)?;
    if quick.is_unit() {
        let tracked = groebner(&inputs, Order::GrevLex, true, budget)?;
        let cofactors = tracked.cofactors.expect("tracking was requested").remove(0);
        let cert = UnitCertificate { inputs, cofactors };
        debug_assert!(cert.verify());
        return Ok(SystemOutcome::Inconsistent(cert));
    }
    let lex = groebner(&inputs, Order::Lex, false, budget)?;
    let mut calls = 0usize;
    let point = find_point(&lex.polys, nv, budget, &mut calls)?;
    let witness = point.and_then(|p| {
        let orig: Vec<Q> = if aux { p[1..].to_vec() } else { p.clone() };
        let ok = equations.iter().all(|f| f.eval(&orig).is_zero())
            && nonvanishing.iter().all(|f| !f.eval(&orig).is_zero());
        ok.then_some(orig)
    });
    Ok(SystemOutcome::Consistent {
        basis: lex,
        witness,
    })
}

const TRIAL_VALUES: [i64; 7] = [1, 2, -1, 3, -2, 0, 5];
const MAX_POINT_CALLS: usize = 400;

/// A rational point of the variety, searching the last variable first.
pub fn find_point(
    polys: &[Poly],
    nvars: usize,
    budget: Budget,
    calls: &mut usize,
) -> Result<Option<Vec<Q>>, IsoError> {
    *calls += 1;
    if *calls > MAX_POINT_CALLS {
        return Ok(None);
    }
    let polys: Vec<Poly> = polys.iter().filter(|p| !p.is_zero()).cloned().collect();
    if polys.iter().any(|p| p.is_constant()) {
        return Ok(None);
    }
    if nvars == 0 {
        return Ok(Some(vec![]));
    }
    if polys.is_empty() {
        return Ok(Some(vec![Q::one(); nvars]));
    }
    let gb = groebner(&polys, Order::Lex, false, budget)?;
    if gb.is_unit() {
        return Ok(None);
    }
    let last = nvars - 1;
    let uni = gb.polys.iter().find(|p| only_in(p, last));
    let candidates: Vec<Q> = match uni {
        Some(p) => rational_roots(&univariate_coeffs(p, last))?,
        None => TRIAL_VALUES
            .iter()
            .map(|&v| Q::from_integer(v.into()))
            .collect(),
    };
    for c in candidates {
        let sub: Vec<Poly> = gb.polys.iter().map(|p| specialize_last(p, &c)).collect();
        if let Some(mut pt) = find_point(&sub, nvars - 1, budget, calls)? {
            pt.push(c);
            return Ok(Some(pt));
        }
    }
    Ok(None)
}

pub(crate) fn only_in(p: &Poly, var: usize) -> bool {
    !p.is_constant()
        && p.terms()
            .all(|(m, _)| m.0.iter().enumerate().all(|(i, e)| i == var || *e == 0))
}

/// Dense coefficients `c[k]` of `x_var^k`.
pub fn univariate_coeffs(p: &Poly, var: usize) -> Vec<Q> {
    let deg = p.terms().map(|(m, _)| m.0[var]).max().unwrap_or(0) as usize;
    let mut c = vec![Q::zero(); deg + 1];
    for (m, x) in p.terms() {
        c[m.0[var] as usize] += x;
    }
    c
}

pub fn univariate_poly(coeffs: &[Q], nvars: usize, var: usize) -> Poly {
    let mut p = Poly::zero(nvars);
    for (k, c) in coeffs.iter().enumerate() {
        let mut e = vec![0; nvars];
        e[var] = k as u32;
        p.add_term(Monomial(e), c.clone());
    }
    p
}

fn trim(mut c: Vec<Q>) -> Vec<Q> {
    while c.len() > 1 && c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    c
}

pub fn uni_degree(c: &[Q]) -> usize {
    c.iter().rposition(|x| !x.is_zero()).unwrap_or(0)
}

pub fn uni_divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let b = trim(b.to_vec());
    let db = uni_degree(&b);
    let lb = b[db].clone();
    let mut r = trim(a.to_vec());
    if uni_degree(&r) < db || r.iter().all(Zero::is_zero) {
        return (vec![Q::zero()], r);
    }
    let mut q = vec![Q::zero(); uni_degree(&r) - db + 1];
    while !r.iter().all(Zero::is_zero) && uni_degree(&r) >= db {
        let dr = uni_degree(&r);
        let f = &r[dr] / &lb;
        for k in 0..=db {
            let t = &f * &b[k];
            r[dr - db + k] -= t;
        }
        q[dr - db] = f;
        r = trim(r);
    }
    (q, r)
}

pub fn uni_gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.iter().all(Zero::is_zero) {
        let (_, r) = uni_divrem(&x, &y);
        x = y;
        y = r;
    }
    let d = uni_degree(&x);
    let lead = x[d].clone();
    if lead.is_zero() {
        return x;
    }
    x.iter().map(|c| c / &lead).collect()
}

pub fn uni_derivative(a: &[Q]) -> Vec<Q> {
    if a.len() <= 1 {
        return vec![Q::zero()];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Q::from_integer(BigInt::from(k)))
        .collect()
}

/// Monic squarefree part.
pub fn squarefree(a: &[Q]) -> Vec<Q> {
    let a = trim(a.to_vec());
    if uni_degree(&a) == 0 {
        return vec![Q::one()];
    }
    let g = uni_gcd(&a, &uni_derivative(&a));
    let (q, _) = uni_divrem(&a, &g);
    let d = uni_degree(&q);
    let lead = q[d].clone();
    q.iter().map(|c| c / &lead).collect()
}

const MAX_ROOT_SEARCH: u64 = 1_000_000_000_000;

/// Distinct rational roots, increasing.
pub fn rational_roots(coeffs: &[Q]) -> Result<Vec<Q>, IsoError> {
    let a = trim(coeffs.to_vec());
    if uni_degree(&a) == 0 {
        return Ok(vec![]);
    }
    let a = squarefree(&a);
    let mut den = BigInt::one();
    for c in &a {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = a.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    let mut roots = Vec::new();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
    if low > 0 {
        roots.push(Q::zero());
    }
    let ints = &ints[low..];
    if ints.len() > 1 {
        let a0 = ints[0].abs();
        let an = ints[ints.len() - 1].abs();
        let bound = |x: &BigInt| x.to_u64().filter(|v| *v <= MAX_ROOT_SEARCH);
        let (Some(p0), Some(pn)) = (bound(&a0), bound(&an)) else {
            return Err(IsoError::DegreeBudgetExceeded {
                reason: "coefficients too large for the rational root search".into(),
            });
        };
        for p in divisors(p0) {
            for q in divisors(pn) {
                for s in [1i64, -1] {
                    let r = Q::new(BigInt::from(p) * s, BigInt::from(q));
                    if roots.contains(&r) {
                        continue;
                    }
                    let v = ints
                        .iter()
                        .rev()
                        .fold(Q::zero(), |acc, c| acc * &r + Q::from_integer(c.clone()));
                    if v.is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, q, q_frac};

    #[test]
    fn roots_of_products() {
        // (2x - 1)(x + 3)(x^2 + 1)
        let c = vec![q(-3), q(5), q(-1), q(5), q(2)];
        assert_eq!(rational_roots(&c).unwrap(), vec![q(-3), q_frac(1, 2)]);
        assert_eq!(rational_roots(&[q(0), q(0), q(1)]).unwrap(), vec![q(0)]);
    }

    #[test]
    fn squarefree_part() {
        // (x-1)^2 (x+2)
        let c = vec![q(2), q(-3), q(0), q(1)];
        assert_eq!(squarefree(&c), vec![q(-2), q(1), q(1)]);
    }

    #[test]
    fn consistent_and_inconsistent() {
        let n: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        let p = |s: &str| parse_poly(s, &n).unwrap();
        let out = solve_small_system(&[p("a^2 - 4"), p("a*b - 2")], &[p("b")], Budget::default())
            .unwrap();
        match out {
            SystemOutcome::Consistent {
                witness: Some(w), ..
            } => {
                assert_eq!(&w[0] * &w[0], q(4));
                assert_eq!(&w[0] * &w[1], q(2));
            }
            other => panic!("{other:?}"),
        }
        let out = solve_small_system(&[p("a*b")], &[p("a"), p("b")], Budget::default()).unwrap();
        match out {
            SystemOutcome::Inconsistent(cert) => assert!(cert.verify()),
            other => panic!("{other:?}"),
        }
    }
}
