//! Buchberger's algorithm over Q with optional cofactor tracking, plus the
//! elimination-based helpers used by the locus and shape solvers.

use std::cmp::Ordering;

use num::{One, Zero};

use crate::error::IsoError;
use crate::poly::{Monomial, Poly, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// First variable largest.
    Lex,
    GrevLex,
}

impl Order {
    pub fn cmp(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            Order::Lex => a.0.cmp(&b.0),
            Order::GrevLex => {
                let da = a.total_degree();
                let db = b.total_degree();
                da.cmp(&db).then_with(|| {
                    for (x, y) in a.0.iter().zip(&b.0).rev() {
                        if x != y {
                            return y.cmp(x);
                        }
                    }
                    Ordering::Equal
                })
            }
        }
    }
}

/// Terms in increasing order; the leading term is last.
type Terms = Vec<(Monomial, Q)>;

fn to_terms(p: &Poly, order: Order) -> Terms {
    let mut t: Terms = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    t.sort_by(|a, b| order.cmp(&a.0, &b.0));
    t
}

fn to_poly(nvars: usize, t: &Terms) -> Poly {
    Poly::from_terms(nvars, t.iter().cloned())
}

/// `p - c * m * g`.
fn sub_mul(p: &Terms, c: &Q, m: &Monomial, g: &Terms, order: Order) -> Terms {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let mut i = 0;
    let mut j = 0;
    while i < p.len() || j < g.len() {
        if j == g.len() {
            out.push(p[i].clone());
            i += 1;
            continue;
        }
        let gm = g[j].0.mul(m);
        if i == p.len() {
            out.push((gm, -(c * &g[j].1)));
            j += 1;
            continue;
        }
        match order.cmp(&p[i].0, &gm) {
            Ordering::Less => {
                out.push(p[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push((gm, -(c * &g[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let v = &p[i].1 - c * &g[j].1;
                if !v.is_zero() {
                    out.push((gm, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn scale_terms(t: &mut Terms, c: &Q) {
    for (_, x) in t.iter_mut() {
        *x *= c;
    }
}

#[derive(Clone, Debug)]
struct Elem {
    poly: Terms,
    /// Cofactors with respect to the inputs.
    cof: Option<Vec<Terms>>,
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_basis: usize,
    pub max_degree: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_basis: 4000,
            max_degree: 40,
        }
    }
}

/// A reduced Groebner basis, or `[1]` for the unit ideal.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub nvars: usize,
    pub order: Order,
    pub polys: Vec<Poly>,
    /// `polys[k] = sum_i cofactors[k][i] * inputs[i]`, when tracked.
    pub cofactors: Option<Vec<Vec<Poly>>>,
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant() && !self.polys[0].is_zero()
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        let g: Vec<Terms> = self.polys.iter().map(|q| to_terms(q, self.order)).collect();
        let elems: Vec<Elem> = g.into_iter().map(|poly| Elem { poly, cof: None }).collect();
        let (r, _) = reduce_full(&to_terms(p, self.order), None, &elems, self.order);
        to_poly(self.nvars, &r)
    }

    pub fn contains(&self, p: &Poly) -> bool {
        self.reduce(p).is_zero()
    }

    /// Leading monomials of the basis.
    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.polys
            .iter()
            .map(|p| {
                to_terms(p, self.order)
                    .last()
                    .expect("basis elements are nonzero")
                    .0
                    .clone()
            })
            .collect()
    }
}

fn reduce_full(
    f: &Terms,
    f_cof: Option<&Vec<Terms>>,
    basis: &[Elem],
    order: Order,
) -> (Terms, Option<Vec<Terms>>) {
    let mut p = f.clone();
    let mut rem: Terms = Vec::new();
    let mut cof = f_cof.cloned();
    while let Some((lm, lc)) = p.last().cloned() {
        let divisor = basis
            .iter()
            .find(|g| g.poly.last().is_some_and(|(gm, _)| gm.divides(&lm)));
        match divisor {
            Some(g) => {
                let (gm, gc) = g.poly.last().unwrap();
                let c = &lc / gc;
                let m = gm.quotient_of(&lm);
                p = sub_mul(&p, &c, &m, &g.poly, order);
                if let (Some(cf), Some(gcf)) = (cof.as_mut(), g.cof.as_ref()) {
                    for (a, b) in cf.iter_mut().zip(gcf) {
                        *a = sub_mul(a, &c, &m, b, order);
                    }
                }
            }
            None => {
                p.pop();
                rem.push((lm, lc));
            }
        }
    }
    rem.reverse();
    (rem, cof)
}

/// Groebner basis of the ideal generated by `inputs`.
pub fn groebner(
    inputs: &[Poly],
    order: Order,
    track: bool,
    budget: Budget,
) -> Result<GroebnerBasis, IsoError> {
    let nvars = inputs.first().map_or(0, Poly::nvars);
    let n_in = inputs.len();
    let mut basis: Vec<Elem> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();

    let unit_cof = |i: usize| -> Vec<Terms> {
        (0..n_in)
            .map(|k| {
                if k == i {
                    vec![(Monomial::one(nvars), Q::one())]
                } else {
                    Vec::new()
                }
            })
            .collect()
    };

    let add = |basis: &mut Vec<Elem>,
               pairs: &mut Vec<(usize, usize)>,
               mut e: Elem|
     -> Result<bool, IsoError> {
        let lc = e.poly.last().unwrap().1.clone();
        let inv = lc.recip();
        scale_terms(&mut e.poly, &inv);
        if let Some(cf) = e.cof.as_mut() {
            for c in cf.iter_mut() {
                scale_terms(c, &inv);
            }
        }
        let lm = e.poly.last().unwrap().0.clone();
        if lm.total_degree() > budget.max_degree {
            return Err(IsoError::DegreeBudgetExceeded {
                reason: format!("leading degree {}", lm.total_degree()),
            });
        }
        let unit = lm.is_one();
        let k = basis.len();
        for i in 0..k {
            pairs.push((i, k));
        }
        basis.push(e);
        if basis.len() > budget.max_basis {
            return Err(IsoError::DegreeBudgetExceeded {
                reason: format!("basis size {}", basis.len()),
            });
        }
        Ok(unit)
    };

    for (i, p) in inputs.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let t = to_terms(p, order);
        let cof = track.then(|| unit_cof(i));
        let (r, rc) = reduce_full(&t, cof.as_ref(), &basis, order);
        if r.is_empty() {
            continue;
        }
        if add(&mut basis, &mut pairs, Elem { poly: r, cof: rc })? {
            return Ok(finish(nvars, order, basis, true));
        }
    }

    let mut done: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    while !pairs.is_empty() {
        // normal selection strategy
        let lcm_of = |b: &Vec<Elem>, (i, j): (usize, usize)| {
            b[i].poly
                .last()
                .unwrap()
                .0
                .lcm(&b[j].poly.last().unwrap().0)
        };
        let mut best = 0;
        for k in 1..pairs.len() {
            if order.cmp(&lcm_of(&basis, pairs[k]), &lcm_of(&basis, pairs[best])) == Ordering::Less
            {
                best = k;
            }
        }
        let (i, j) = pairs.swap_remove(best);
        done.insert((i, j));
        let mi = basis[i].poly.last().unwrap().0.clone();
        let mj = basis[j].poly.last().unwrap().0.clone();
        if mi.is_coprime(&mj) {
            continue;
        }
        let l = mi.lcm(&mj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].poly.last().unwrap().0.divides(&l)
                && done.contains(&(i.min(k), i.max(k)))
                && done.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let ui = mi.quotient_of(&l);
        let uj = mj.quotient_of(&l);
        let zero: Terms = Vec::new();
        let s = sub_mul(
            &sub_mul(&zero, &-Q::one(), &ui, &basis[i].poly, order),
            &Q::one(),
            &uj,
            &basis[j].poly,
            order,
        );
        let s_cof = if track {
            let ci = basis[i].cof.as_ref().unwrap();
            let cj = basis[j].cof.as_ref().unwrap();
            Some(
                ci.iter()
                    .zip(cj)
                    .map(|(a, b)| {
                        sub_mul(
                            &sub_mul(&zero, &-Q::one(), &ui, a, order),
                            &Q::one(),
                            &uj,
                            b,
                            order,
                        )
                    })
                    .collect(),
            )
        } else {
            None
        };
        let (r, rc) = reduce_full(&s, s_cof.as_ref(), &basis, order);
        if r.is_empty() {
            continue;
        }
        if add(&mut basis, &mut pairs, Elem { poly: r, cof: rc })? {
            return Ok(finish(nvars, order, basis, true));
        }
    }
    Ok(finish(nvars, order, basis, false))
}

fn finish(nvars: usize, order: Order, basis: Vec<Elem>, unit: bool) -> GroebnerBasis {
    if unit {
        let e = basis.into_iter().last().unwrap();
        return GroebnerBasis {
            nvars,
            order,
            polys: vec![Poly::one(nvars)],
            cofactors: e
                .cof
                .map(|cf| vec![cf.iter().map(|t| to_poly(nvars, t)).collect()]),
        };
    }
    // minimal basis: drop elements whose leading monomial is divisible by another's
    let lms: Vec<Monomial> = basis
        .iter()
        .map(|e| e.poly.last().unwrap().0.clone())
        .collect();
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let redundant = (0..basis.len())
            .any(|j| j != i && lms[j].divides(&lms[i]) && (lms[j] != lms[i] || j < i));
        if !redundant {
            keep.push(i);
        }
    }
    let minimal: Vec<Elem> = keep.iter().map(|&i| basis[i].clone()).collect();
    // tail reduction
    let mut reduced = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Elem> = minimal
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != k)
            .map(|(_, e)| e.clone())
            .collect();
        let e = &minimal[k];
        let (lm, lc) = e.poly.last().unwrap().clone();
        let tail: Terms = e.poly[..e.poly.len() - 1].to_vec();
        let tail_cof_input = e.cof.clone();
        // reduce the tail only; the leading term stays
        let (rt, _) = reduce_full(&tail, None, &others, order);
        let mut poly = rt;
        poly.push((lm, lc));
        reduced.push(Elem {
            poly,
            cof: tail_cof_input,
        });
    }
    let mut polys: Vec<(Monomial, Poly)> = reduced
        .iter()
        .map(|e| (e.poly.last().unwrap().0.clone(), to_poly(nvars, &e.poly)))
        .collect();
    polys.sort_by(|a, b| order.cmp(&a.0, &b.0));
    GroebnerBasis {
        nvars,
        order,
        polys: polys.into_iter().map(|(_, p)| p).collect(),
        cofactors: None,
    }
}

/// Exact quotient `a / b` in `Q[x]`, if `b` divides `a`.
pub fn divide_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    let order = Order::Lex;
    let bt = to_terms(b, order);
    let (lm_b, lc_b) = bt.last()?.clone();
    let mut p = to_terms(a, order);
    let mut quo = Poly::zero(a.nvars());
    while let Some((lm, lc)) = p.last().cloned() {
        if !lm_b.divides(&lm) {
            return None;
        }
        let c = &lc / &lc_b;
        let m = lm_b.quotient_of(&lm);
        p = sub_mul(&p, &c, &m, &bt, order);
        quo.add_term(m, c);
    }
    Some(quo)
}

/// Greatest common divisor in `Q[x]`, scaled to a primitive integer
/// polynomial. Uses `gcd = f g / lcm` with the lcm obtained by eliminating
/// an auxiliary variable from `t f, (1 - t) g`.
pub fn gcd(f: &Poly, g: &Poly) -> Result<Poly, IsoError> {
    if f.is_zero() {
        return Ok(g.primitive_integer());
    }
    if g.is_zero() {
        return Ok(f.primitive_integer());
    }
    if f.is_constant() || g.is_constant() {
        return Ok(Poly::one(f.nvars()));
    }
    let n = f.nvars();
    let shift: Vec<usize> = (1..=n).collect();
    let fe = f.reindex(n + 1, &shift);
    let ge = g.reindex(n + 1, &shift);
    let t = Poly::var(n + 1, 0);
    let one_minus_t = &Poly::one(n + 1) - &t;
    let gb = groebner(
        &[&t * &fe, &one_minus_t * &ge],
        Order::Lex,
        false,
        Budget::default(),
    )?;
    let lcm = gb
        .polys
        .iter()
        .filter(|p| p.terms().all(|(m, _)| m.0[0] == 0))
        .min_by_key(|p| p.total_degree())
        .expect("intersection of principal ideals is nonzero");
    let back: Vec<usize> = std::iter::once(0).chain(0..n).collect();
    let lcm = drop_first_var(lcm, n, &back);
    let prod = f * g;
    let q = divide_exact(&prod, &lcm).expect("lcm divides the product");
    Ok(q.primitive_integer())
}

fn drop_first_var(p: &Poly, n: usize, _map: &[usize]) -> Poly {
    Poly::from_terms(
        n,
        p.terms()
            .map(|(m, c)| (Monomial(m.0[1..].to_vec()), c.clone())),
    )
}

/// Substitutes a value for the last variable and drops it.
pub fn specialize_last(p: &Poly, value: &Q) -> Poly {
    let n = p.nvars();
    let mut out = Poly::zero(n - 1);
    for (m, c) in p.terms() {
        let e = m.0[n - 1] as usize;
        out.add_term(
            Monomial(m.0[..n - 1].to_vec()),
            c * num::pow(value.clone(), e),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn names(n: usize) -> Vec<String> {
        (0..n)
            .map(|i| ["x", "y", "z", "w"][i].to_string())
            .collect()
    }

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, &names(n)).unwrap()
    }

    #[test]
    fn textbook_basis() {
        // Cox-Little-O'Shea: x^3 - 2xy, x^2 y - 2y^2 + x under grlex
        let gb = groebner(
            &[p("x^3 - 2*x*y", 2), p("x^2*y - 2*y^2 + x", 2)],
            Order::GrevLex,
            false,
            Budget::default(),
        )
        .unwrap();
        let expect = [p("x^2", 2), p("x*y", 2), p("y^2 - 1/2*x", 2)];
        assert_eq!(gb.polys.len(), 3);
        for e in &expect {
            assert!(gb.contains(e));
        }
    }

    #[test]
    fn unit_certificate_recombines() {
        let inputs = [p("x*y - 1", 2), p("x", 2)];
        let gb = groebner(&inputs, Order::GrevLex, true, Budget::default()).unwrap();
        assert!(gb.is_unit());
        let cof = &gb.cofactors.unwrap()[0];
        let mut sum = Poly::zero(2);
        for (c, f) in cof.iter().zip(&inputs) {
            sum = &sum + &(c * f);
        }
        assert_eq!(sum, Poly::one(2));
    }

    #[test]
    fn gcd_examples() {
        let f = p("x^2*y - x*y^2", 2);
        let g = p("x^2 - y^2", 2);
        assert_eq!(gcd(&f, &g).unwrap(), p("x - y", 2));
        assert_eq!(gcd(&p("x + 1", 2), &p("y", 2)).unwrap(), Poly::one(2));
        let h = p("x*y + z^2", 3);
        let a = &h * &p("x - z", 3);
        let b = &h * &p("y + 2*z", 3);
        assert_eq!(gcd(&a, &b).unwrap(), h);
    }

    #[test]
    fn exact_division() {
        let a = p("x^2 - y^2", 2);
        assert_eq!(divide_exact(&a, &p("x - y", 2)).unwrap(), p("x + y", 2));
        assert!(divide_exact(&a, &p("x - 2*y", 2)).is_none());
    }
}
