//! Sparse multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector. The derived ordering is lexicographic with the first
/// variable largest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weighted_degree(&self, weights: &[u32]) -> u32 {
        self.0.iter().zip(weights).map(|(e, w)| e * w).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    pub fn format(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (i, e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(names[i].clone()),
                _ => parts.push(format!("{}^{}", names[i], e)),
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Poly::monomial(Monomial::one(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Poly::monomial(Monomial::var(nvars, i), Q::one())
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let nvars = m.nvars();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { nvars, terms }
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Poly::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(n, i), c.clone());
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in increasing lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// The common weighted degree of all terms, if homogeneous.
    pub fn homogeneous_degree(&self, weights: &[u32]) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weighted_degree(weights));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Lex-largest term.
    pub fn lex_leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, e) in point.iter().zip(&m.0) {
                if *e > 0 {
                    t *= num::pow(x.clone(), *e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes `images[i]` for variable `i`. All images share one ring.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|p| vec![Poly::one(p.nvars), p.clone()])
            .collect();
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, e) in m.0.iter().enumerate() {
                let e = *e as usize;
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e];
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embeds into `nvars` variables, sending variable `i` to `map[i]`.
    pub fn reindex(&self, nvars: usize, map: &[usize]) -> Poly {
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Scales so that the lex-leading coefficient is one.
    pub fn lex_monic(&self) -> Poly {
        match self.lex_leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Scales to coprime integer coefficients with positive lex-leading term.
    pub fn primitive_integer(&self) -> Poly {
        let Some((_, lead)) = self.lex_leading() else {
            return self.clone();
        };
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = num::integer::lcm(den, c.denom().clone());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let n = c.numer() * (&den / c.denom());
            num_gcd = num::integer::gcd(num_gcd, n);
        }
        let mut s = Q::new(den, num_gcd);
        if lead.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    pub fn format(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.format(names);
            if m.is_one() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{}*{}", a, mono));
            }
        }
        out
    }

    /// Like [`Poly::format`] but every coefficient is written out, `1*x1^3`.
    pub fn format_explicit(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&format!("{}*{}", c.abs(), m.format(names)));
        }
        out
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("v{i}")).collect();
        f.write_str(&self.format(&names))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse polynomial `{input}`: {reason}")]
pub struct ParsePolyError {
    pub input: String,
    pub reason: String,
}

/// Parses sums of terms such as `x1^2*x3 - 3/2*x1*x3^2 + 2`.
pub fn parse_poly(input: &str, names: &[String]) -> Result<Poly, ParsePolyError> {
    let err = |reason: &str| ParsePolyError {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let n = names.len();
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(err("empty"));
    }
    let mut pieces: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && !(i > 0 && compact[..i].ends_with('^')) {
            if !cur.is_empty() {
                pieces.push((neg, std::mem::take(&mut cur)));
            } else if i > 0 {
                return Err(err("dangling sign"));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(err("dangling sign"));
    }
    pieces.push((neg, cur));

    let mut out = Poly::zero(n);
    for (neg, piece) in pieces {
        let mut coeff = Q::one();
        let mut exps = vec![0u32; n];
        for factor in piece.split('*') {
            if factor.is_empty() {
                return Err(err("empty factor"));
            }
            if factor.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                let c: Q = parse_rational(factor).ok_or_else(|| err("bad coefficient"))?;
                coeff *= c;
                continue;
            }
            let (name, exp) = match factor.split_once('^') {
                Some((a, b)) => (a, b.parse::<u32>().map_err(|_| err("bad exponent"))?),
                None => (factor, 1),
            };
            let idx = names
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| err(&format!("unknown generator `{name}`")))?;
            exps[idx] += exp;
        }
        if neg {
            coeff = -coeff;
        }
        out.add_term(Monomial(exps), coeff);
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Option<Q> {
    match s.split_once('/') {
        Some((a, b)) => {
            let d: BigInt = b.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(a.parse().ok()?, d))
        }
        None => Some(Q::from_integer(s.parse().ok()?)),
    }
}

/// All exponent vectors of the given weighted degree, in increasing lex order.
pub fn monomials_of_degree(weights: &[u32], degree: u32) -> Vec<Monomial> {
    fn rec(weights: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == weights.len() {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let w = weights[i];
        let max = left.checked_div(w).unwrap_or(0);
        for e in 0..=max {
            cur.push(e);
            rec(weights, i + 1, left - e * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(
        weights,
        0,
        degree,
        &mut Vec::with_capacity(weights.len()),
        &mut out,
    );
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_and_format_roundtrip() {
        let n = names(&["x1", "x2", "x3"]);
        let p = parse_poly("x1^2*x3 + 2*x1*x3^2", &n).unwrap();
        assert_eq!(p.format(&n), "x1^2*x3 + 2*x1*x3^2");
        assert_eq!(p.format_explicit(&n), "1*x1^2*x3 + 2*x1*x3^2");
        let r = parse_poly("-3/2*x2 + 1 - x1", &n).unwrap();
        assert_eq!(r.format(&n), "-x1 - 3/2*x2 + 1");
        assert_eq!(parse_poly(&r.format_explicit(&n), &n).unwrap(), r);
    }

    #[test]
    fn parse_rejects_unknown_names() {
        let n = names(&["x1"]);
        assert!(parse_poly("y^2", &n).is_err());
        assert!(parse_poly("x1 +", &n).is_err());
    }

    #[test]
    fn substitution_composes() {
        let n = 2;
        let x = Poly::var(n, 0);
        let y = Poly::var(n, 1);
        let p = &(&x * &x) - &y;
        let s = p.substitute(&[&x + &y, y.clone()]);
        let expect = &(&(&x * &x) + &(&x * &y).scale(&q(2))) + &(&(&y * &y) - &y);
        assert_eq!(s, expect);
    }

    #[test]
    fn monomial_enumeration_counts() {
        assert_eq!(monomials_of_degree(&[2, 2, 2], 6).len(), 10);
        assert_eq!(monomials_of_degree(&[2, 3], 6).len(), 2);
        assert_eq!(monomials_of_degree(&[2, 3], 5).len(), 1);
        assert_eq!(monomials_of_degree(&[2, 2], 3).len(), 0);
    }
}
