//! Sparse multivariate polynomials over the rationals.
//!
//! The "variables" of a polynomial are [`Kernel`]s: plain symbols or an
//! elementary function applied to a canonical [`Expr`]. Exponential kernels are
//! kept merged, so a monomial carries at most one `exp(..)` factor and always
//! with exponent one (`exp(a) * exp(b)` is stored as `exp(a + b)`).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Expr, Func, Rational, Symbol};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Kernel {
    Var(Symbol),
    Apply(Func, Expr),
}

impl Kernel {
    pub(crate) fn is_exp(&self) -> bool {
        matches!(self, Kernel::Apply(Func::Exp, _))
    }

    pub(crate) fn is_function(&self) -> bool {
        matches!(self, Kernel::Apply(..))
    }

    pub(crate) fn depends_on(&self, v: &Symbol) -> bool {
        match self {
            Kernel::Var(s) => s == v,
            Kernel::Apply(_, arg) => arg.depends_on(v),
        }
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Kernel::Var(s) => {
                out.insert(s.clone());
            }
            Kernel::Apply(_, arg) => arg.collect_vars(out),
        }
    }
}

/// A power product of kernels, sorted ascending by kernel, exponents > 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Monomial(Vec<(Kernel, u32)>);

impl Monomial {
    pub(crate) fn one() -> Self {
        Monomial(Vec::new())
    }

    pub(crate) fn from_kernel(k: Kernel, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(k, e)])
        }
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn factors(&self) -> &[(Kernel, u32)] {
        &self.0
    }

    pub(crate) fn has_exp(&self) -> bool {
        self.0.iter().any(|(k, _)| k.is_exp())
    }

    pub(crate) fn degree_in(&self, k: &Kernel) -> u32 {
        self.0
            .binary_search_by(|(kk, _)| kk.cmp(k))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// Removes every power of `k`.
    pub(crate) fn without(&self, k: &Kernel) -> Monomial {
        Monomial(self.0.iter().filter(|(kk, _)| kk != k).cloned().collect())
    }

    /// Lowers the exponent of `k` by one. `k` must be present.
    pub(crate) fn lowered(&self, k: &Kernel) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len());
        for (kk, e) in &self.0 {
            if kk == k {
                if *e > 1 {
                    out.push((kk.clone(), e - 1));
                }
            } else {
                out.push((kk.clone(), *e));
            }
        }
        Monomial(out)
    }

    pub(crate) fn mul(&self, other: &Monomial) -> Monomial {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out).merge_exps()
    }

    pub(crate) fn pow(&self, e: u32) -> Monomial {
        if e == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(k, x)| (k.clone(), x * e)).collect()).merge_exps()
    }

    /// Collapses all exponential factors into a single `exp(sum)` factor.
    fn merge_exps(self) -> Monomial {
        let n_exp = self.0.iter().filter(|(k, _)| k.is_exp()).count();
        if n_exp == 0 || (n_exp == 1 && self.0.iter().all(|(k, e)| !k.is_exp() || *e == 1)) {
            return self;
        }
        let mut arg = Expr::zero();
        let mut rest = Vec::with_capacity(self.0.len());
        for (k, e) in self.0 {
            match k {
                Kernel::Apply(Func::Exp, a) => arg = &arg + &(&a * &Expr::from(e as i64)),
                other => rest.push((other, e)),
            }
        }
        if !arg.is_exact_zero() {
            let k = Kernel::Apply(Func::Exp, arg);
            let pos = rest.partition_point(|(kk, _)| *kk < k);
            rest.insert(pos, (k, 1));
        }
        Monomial(rest)
    }

    pub(crate) fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().all(|(k, e)| other.degree_in(k) >= *e)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub(crate) fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(other.0.len());
        for (k, e) in &other.0 {
            let d = e - self.degree_in(k);
            if d > 0 {
                out.push((k.clone(), d));
            }
        }
        Monomial(out)
    }

    /// Pure lexicographic order, the greatest kernel being most significant.
    pub(crate) fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let mut ia = self.0.iter().rev();
        let mut ib = other.0.iter().rev();
        loop {
            match (ia.next(), ib.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((ka, ea)), Some((kb, eb))) => match ka.cmp(kb).then(ea.cmp(eb)) {
                    Ordering::Equal => continue,
                    o => return o,
                },
            }
        }
    }

    pub(crate) fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub(crate) fn constant(c: Rational) -> Self {
        Poly::term(Monomial::one(), c)
    }

    pub(crate) fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub(crate) fn kernel(k: Kernel) -> Self {
        Poly::term(Monomial::from_kernel(k, 1), Rational::one())
    }

    pub(crate) fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub(crate) fn len(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    pub(crate) fn constant_value(&self) -> Option<&Rational> {
        match self.terms.len() {
            0 => None,
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then_some(c)
            }
            _ => None,
        }
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.is_zero() || self.constant_value().is_some()
    }

    pub(crate) fn has_exp(&self) -> bool {
        self.terms.keys().any(Monomial::has_exp)
    }

    pub(crate) fn has_function(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.factors().iter().any(|(k, _)| k.is_function()))
    }

    pub(crate) fn kernels(&self) -> BTreeSet<Kernel> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(k, _)| k.clone()))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
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

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let (mut out, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub(crate) fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub(crate) fn mul_term(&self, m: &Monomial, c: &Rational) -> Poly {
        let mut out = Poly::zero();
        if c.is_zero() {
            return out;
        }
        let merges = m.has_exp() && self.has_exp();
        for (mm, cc) in &self.terms {
            if merges {
                out.add_term(mm.mul(m), cc * c);
            } else {
                // No collisions are possible without exponential merging.
                out.terms.insert(mm.mul(m), cc * c);
            }
        }
        out
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub(crate) fn pow(&self, e: u32) -> Poly {
        if e == 0 {
            return Poly::one();
        }
        if self.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return Poly::term(m.pow(e), num_traits::pow(c.clone(), e as usize));
        }
        let mut base = self.clone();
        let mut acc = Poly::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub(crate) fn leading_lex(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(b.0))
    }

    /// Scales so that the lexicographically leading coefficient is one.
    pub(crate) fn monic(&self) -> Poly {
        match self.leading_lex() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Scales to integer coefficients without a common factor, which keeps
    /// pseudo-remainder sequences from growing rational coefficients.
    pub(crate) fn integer_primitive(&self) -> Poly {
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = self.scale(&Rational::from_integer(den));
        let g = ints
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
        if g.is_zero() || g.is_one() {
            ints
        } else {
            ints.scale(&Rational::new(BigInt::one(), g))
        }
    }

    /// Coefficients in `Q[keep]` of `self` viewed as a polynomial in the
    /// kernels outside `keep`.
    fn coefficients_over(&self, keep: &BTreeSet<Kernel>) -> Vec<Poly> {
        let mut by_rest: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (mut kept, mut rest) = (Vec::new(), Vec::new());
            for f in m.factors() {
                if keep.contains(&f.0) {
                    kept.push(f.clone());
                } else {
                    rest.push(f.clone());
                }
            }
            by_rest
                .entry(Monomial(rest))
                .or_insert_with(Poly::zero)
                .add_term(Monomial(kept), c.clone());
        }
        by_rest.into_values().collect()
    }

    pub(crate) fn max_kernel(&self) -> Option<Kernel> {
        self.terms
            .keys()
            .filter_map(|m| m.factors().last().map(|(k, _)| k))
            .max()
            .cloned()
    }

    pub(crate) fn degree_in(&self, k: &Kernel) -> u32 {
        self.terms.keys().map(|m| m.degree_in(k)).max().unwrap_or(0)
    }

    pub(crate) fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `k`.
    pub(crate) fn coeffs_in(&self, k: &Kernel) -> Vec<Poly> {
        let deg = self.degree_in(k) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let d = m.degree_in(k) as usize;
            out[d].add_term(m.without(k), c.clone());
        }
        out
    }

    fn coeff_of_degree(&self, k: &Kernel, d: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.degree_in(k) == d {
                out.add_term(m.without(k), c.clone());
            }
        }
        out
    }

    /// Exact division. Returns `None` when `divisor` does not divide `self`.
    pub(crate) fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if let Some(c) = divisor.constant_value() {
            return Some(self.scale(&c.recip()));
        }
        if divisor.len() == 1 {
            let (dm, dc) = divisor.terms.iter().next().unwrap();
            let inv = dc.recip();
            let mut out = Poly::zero();
            for (m, c) in &self.terms {
                if !dm.divides(m) {
                    return None;
                }
                out.terms.insert(dm.quotient_of(m), c * &inv);
            }
            return Some(out);
        }
        let (lm, lc) = divisor.leading_lex().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading_lex().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&rm) {
                return None;
            }
            let tm = lm.quotient_of(&rm);
            let tc = rc / &lc;
            rem = rem.sub(&divisor.mul_term(&tm, &tc));
            quot.add_term(tm, tc);
        }
        Some(quot)
    }

    /// Sparse pseudo-remainder of `self` by `g` with respect to `k`.
    fn prem(&self, g: &Poly, k: &Kernel) -> Poly {
        let dg = g.degree_in(k);
        let lcg = g.coeff_of_degree(k, dg);
        let mut r = self.clone();
        while !r.is_zero() {
            let dr = r.degree_in(k);
            if dr < dg {
                break;
            }
            let lcr = r.coeff_of_degree(k, dr);
            let shift = Monomial::from_kernel(k.clone(), dr - dg);
            let sub = lcr.mul_term(&shift, &Rational::one()).mul(g);
            r = r.mul(&lcg).sub(&sub);
        }
        r
    }

    fn content_in(&self, k: &Kernel) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs_in(k) {
            if c.is_zero() {
                continue;
            }
            acc = gcd(&acc, &c);
            if acc.is_one() {
                break;
            }
        }
        acc
    }

    fn primitive_part(&self, k: &Kernel) -> Poly {
        let c = self.content_in(k);
        self.exact_div(&c)
            .expect("content always divides its polynomial")
    }
}

fn monomial_gcd(single: &Poly, other: &Poly) -> Poly {
    let (m, _) = single.terms.iter().next().unwrap();
    let mut out = Vec::new();
    for (k, e) in m.factors() {
        let min = other
            .terms
            .keys()
            .map(|mm| mm.degree_in(k))
            .min()
            .unwrap_or(0)
            .min(*e);
        if min > 0 {
            out.push((k.clone(), min));
        }
    }
    Poly::term(Monomial(out), Rational::one())
}

/// Greatest common divisor over Q, normalized to be monic in lex order.
///
/// Kernels are treated as independent indeterminates, so callers must not pass
/// polynomials with exponential factors (those do not form a free polynomial
/// ring under merging).
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a.len() == 1 {
        return monomial_gcd(a, b);
    }
    if b.len() == 1 {
        return monomial_gcd(b, a);
    }
    // A common divisor only involves kernels present in both. Over those,
    // the monomials in the remaining kernels are a free basis, so the gcd is
    // the gcd of the coefficients with respect to them.
    let (ka, kb) = (a.kernels(), b.kernels());
    if ka != kb {
        let common: BTreeSet<Kernel> = ka.intersection(&kb).cloned().collect();
        if common.is_empty() {
            return Poly::one();
        }
        let mut parts = a.coefficients_over(&common);
        parts.extend(b.coefficients_over(&common));
        parts.sort_by_key(Poly::len);
        let mut g = Poly::zero();
        for p in &parts {
            g = gcd(&g, p);
            if g.is_one() {
                break;
            }
        }
        return g;
    }
    let v = match (a.max_kernel(), b.max_kernel()) {
        (Some(x), Some(y)) => x.max(y),
        _ => return Poly::one(),
    };
    let (da, db) = (a.degree_in(&v), b.degree_in(&v));
    if da == 0 {
        return gcd(a, &b.content_in(&v));
    }
    if db == 0 {
        return gcd(&a.content_in(&v), b);
    }
    let ca = a.content_in(&v);
    let cb = b.content_in(&v);
    let c = gcd(&ca, &cb);
    let mut f = a
        .exact_div(&ca)
        .expect("content divides")
        .integer_primitive();
    let mut g = b
        .exact_div(&cb)
        .expect("content divides")
        .integer_primitive();
    if f.degree_in(&v) < g.degree_in(&v) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = f.prem(&g, &v);
        if r.is_zero() {
            break;
        }
        if r.degree_in(&v) == 0 {
            g = Poly::one();
            break;
        }
        f = g;
        g = r.primitive_part(&v).integer_primitive();
    }
    let g = if g.is_constant() {
        Poly::one()
    } else {
        g.primitive_part(&v)
    };
    g.mul(&c).monic()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(s: &str) -> Poly {
        Poly::kernel(Kernel::Var(Symbol::new(s)))
    }

    fn int(i: i64) -> Poly {
        Poly::constant(Rational::from_integer(i.into()))
    }

    #[test]
    fn gcd_of_shared_linear_factor() {
        let x = var("x");
        let y = var("y");
        let f = x.add(&y);
        let a = f.mul(&x.sub(&int(1)));
        let b = f
            .mul(&y.add(&int(2)))
            .scale(&Rational::new(3.into(), 2.into()));
        assert_eq!(gcd(&a, &b), f.monic());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let x = var("x");
        let y = var("y");
        let a = x.mul(&x).add(&int(1));
        let b = x.add(&y);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_with_monomial() {
        let x = var("x");
        let y = var("y");
        let a = x.mul(&x).mul(&y);
        let b = x.mul(&y).add(&x.mul(&x));
        assert_eq!(gcd(&a, &b), x);
    }

    #[test]
    fn exact_division_detects_non_divisibility() {
        let x = var("x");
        let y = var("y");
        let p = x.add(&y).mul(&x.sub(&y));
        assert_eq!(p.exact_div(&x.add(&y)), Some(x.sub(&y)));
        assert_eq!(p.exact_div(&x.add(&int(1))), None);
    }

    #[test]
    fn exp_factors_merge() {
        let x = Expr::var("x");
        let ex = Kernel::Apply(Func::Exp, x.clone());
        let emx = Kernel::Apply(Func::Exp, -&x);
        let m = Monomial::from_kernel(ex.clone(), 1).mul(&Monomial::from_kernel(emx, 1));
        assert!(m.is_one());
        let sq = Monomial::from_kernel(ex, 1).pow(2);
        assert_eq!(sq.factors().len(), 1);
        assert_eq!(sq.factors()[0].1, 1);
    }
}
