//! Symbolic expressions over exact rationals.
//!
//! An [`Expr`] is always kept in canonical form: a reduced quotient of two
//! polynomials whose indeterminates are variables and elementary-function
//! applications (`exp`, `log`, `sin`, `cos`) of canonical arguments. For the
//! rational fragment this form is unique, so structural equality decides
//! equality of rational functions. Expressions are immutable and cheap to
//! clone.
//!
//! Transcendental identities (such as `sin(u)^2 + cos(u)^2 = 1`) are not part
//! of the canonical form. [`Expr::is_zero`] falls back to seeded numerical
//! sampling for those and reports [`ZeroTest::ProbablyZero`] rather than a
//! definite answer.

mod parse;
pub(crate) mod poly;
mod print;

use std::borrow::Borrow;
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, EvalError, ParseError};
use poly::{Kernel, Monomial, Poly};

pub use print::Node;

/// Exact rational numbers used for all coefficients.
pub type Rational = num_rational::BigRational;

/// A variable name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::new(s)
    }
}

/// Elementary functions. Declared in name order, which is the canonical order
/// of function applications.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Cos,
    Exp,
    Log,
    Sin,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            _ => None,
        }
    }

    fn eval(self, x: f64) -> Result<f64, EvalError> {
        let y = match self {
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Sin => x.sin(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(EvalError::Domain(format!("log of nonpositive value {x}")));
                }
                x.ln()
            }
        };
        if y.is_finite() {
            Ok(y)
        } else {
            Err(EvalError::Domain(format!(
                "{}({x}) is not finite",
                self.name()
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Fraction {
    num: Poly,
    den: Poly,
}

/// A canonical symbolic expression.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Fraction>);

/// Outcome of a zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroTest {
    /// The canonical form is the zero constant.
    Zero,
    /// The canonical form is nonzero but contains transcendental kernels, and
    /// every numerical sample vanished.
    ProbablyZero,
    NonZero,
}

impl ZeroTest {
    pub fn is_zero_or_probable(self) -> bool {
        !matches!(self, ZeroTest::NonZero)
    }
}

static DEFAULT_SEED: AtomicU64 = AtomicU64::new(0x5eed_1a3b_da00_0001);

/// Sets the seed used by [`Expr::is_zero`] for numerical sampling.
pub fn set_default_seed(seed: u64) {
    DEFAULT_SEED.store(seed, AtomicOrdering::Relaxed);
}

pub fn default_seed() -> u64 {
    DEFAULT_SEED.load(AtomicOrdering::Relaxed)
}

/// Configuration of the probabilistic part of zero testing.
///
/// The sample points for an expression are derived from the seed and the
/// expression itself, so verdicts do not depend on evaluation order.
#[derive(Clone, Debug)]
pub struct ZeroTester {
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_attempts: usize,
}

impl Default for ZeroTester {
    fn default() -> Self {
        ZeroTester {
            samples: 8,
            seed: default_seed(),
            tolerance: 1e-9,
            max_attempts: 200,
        }
    }
}

impl ZeroTester {
    pub fn test(&self, e: &Expr) -> ZeroTest {
        if e.is_exact_zero() {
            return ZeroTest::Zero;
        }
        if !e.has_function() {
            return ZeroTest::NonZero;
        }
        let vars = e.free_vars();
        let mut hasher = DefaultHasher::new();
        e.hash(&mut hasher);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ hasher.finish());
        let mut ok = 0;
        let mut attempts = 0;
        while ok < self.samples && attempts < self.max_attempts {
            attempts += 1;
            let point: HashMap<&Symbol, f64> = vars
                .iter()
                .map(|v| {
                    let n: i64 = rng.gen_range(-24..=24);
                    let d: i64 = rng.gen_range(1..=8);
                    (v, n as f64 / d as f64)
                })
                .collect();
            let lookup = |s: &Symbol| point.get(s).copied();
            if !matches!(eval_poly(&e.0.den, &lookup), Ok((d, _)) if d.abs() > 1e-12) {
                continue;
            }
            match eval_poly(&e.0.num, &lookup) {
                Ok((v, scale)) => {
                    if v.abs() > self.tolerance * scale.max(1.0) {
                        return ZeroTest::NonZero;
                    }
                    ok += 1;
                }
                Err(_) => continue,
            }
        }
        if ok >= self.samples {
            ZeroTest::ProbablyZero
        } else {
            ZeroTest::NonZero
        }
    }
}

type KernelValues<'a> = HashMap<&'a Kernel, f64>;

fn eval_kernel(k: &Kernel, lookup: &dyn Fn(&Symbol) -> Option<f64>) -> Result<f64, EvalError> {
    match k {
        Kernel::Var(s) => lookup(s).ok_or_else(|| EvalError::Unbound(s.to_string())),
        Kernel::Apply(f, a) => f.eval(a.eval_with(lookup)?),
    }
}

/// Returns the value and the sum of absolute values of the terms.
fn eval_poly(p: &Poly, lookup: &dyn Fn(&Symbol) -> Option<f64>) -> Result<(f64, f64), EvalError> {
    let mut cache: KernelValues = HashMap::new();
    let mut sum = 0.0;
    let mut abs = 0.0;
    for (m, c) in p.terms() {
        let mut t = c.to_f64().unwrap_or(f64::NAN);
        for (k, e) in m.factors() {
            let v = match cache.get(k) {
                Some(v) => *v,
                None => {
                    let v = eval_kernel(k, lookup)?;
                    cache.insert(k, v);
                    v
                }
            };
            t *= v.powi(*e as i32);
        }
        sum += t;
        abs += t.abs();
    }
    if sum.is_finite() {
        Ok((sum, abs))
    } else {
        Err(EvalError::Domain("non-finite value".into()))
    }
}

impl Fraction {
    fn reduce(num: Poly, den: Poly) -> Fraction {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Fraction {
                num,
                den: Poly::one(),
            };
        }
        if let Some(c) = den.constant_value() {
            let inv = c.recip();
            return Fraction {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let (mut num, mut den) = (num, den);
        if !num.has_exp() && !den.has_exp() {
            let g = poly::gcd(&num, &den);
            if !g.is_one() {
                num = num.exact_div(&g).expect("gcd divides numerator");
                den = den.exact_div(&g).expect("gcd divides denominator");
            }
        }
        if den.len() == 1 && den.has_exp() {
            let (m, c) = den
                .terms()
                .next()
                .map(|(m, c)| (m.clone(), c.clone()))
                .unwrap();
            let mut rest = Monomial::one();
            let mut inv_exp = Monomial::one();
            for (k, e) in m.factors() {
                match k {
                    Kernel::Apply(Func::Exp, a) => {
                        inv_exp = Monomial::from_kernel(Kernel::Apply(Func::Exp, -a), 1);
                    }
                    _ => rest = rest.mul(&Monomial::from_kernel(k.clone(), *e)),
                }
            }
            num = num.mul_term(&inv_exp, &Rational::one());
            den = Poly::term(rest, c);
        }
        if let Some(c) = den.constant_value() {
            let inv = c.recip();
            return Fraction {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let lc = den.leading_lex().map(|(_, c)| c.clone()).unwrap();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Fraction { num, den }
    }
}

impl Expr {
    fn from_parts(num: Poly, den: Poly) -> Expr {
        Expr(Arc::new(Fraction::reduce(num, den)))
    }

    pub(crate) fn from_poly(p: Poly) -> Expr {
        Expr(Arc::new(Fraction {
            num: p,
            den: Poly::one(),
        }))
    }

    pub fn zero() -> Expr {
        Expr::from_poly(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::from_poly(Poly::one())
    }

    pub fn int(i: i64) -> Expr {
        Expr::rational(Rational::from_integer(BigInt::from(i)))
    }

    pub fn rational(r: Rational) -> Expr {
        Expr::from_poly(Poly::constant(r))
    }

    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::rational(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn var(name: &str) -> Expr {
        Expr::symbol(&Symbol::new(name))
    }

    pub fn symbol(s: &Symbol) -> Expr {
        Expr::from_poly(Poly::kernel(Kernel::Var(s.clone())))
    }

    /// Applies an elementary function, folding the trivial constant cases.
    pub fn apply(f: Func, arg: Expr) -> Expr {
        if arg.is_exact_zero() {
            return match f {
                Func::Exp | Func::Cos => Expr::one(),
                Func::Sin => Expr::zero(),
                Func::Log => Expr::from_poly(Poly::kernel(Kernel::Apply(f, arg))),
            };
        }
        if f == Func::Log && arg.as_rational().is_some_and(|r| r.is_one()) {
            return Expr::zero();
        }
        Expr::from_poly(Poly::kernel(Kernel::Apply(f, arg)))
    }

    pub fn exp(&self) -> Expr {
        Expr::apply(Func::Exp, self.clone())
    }

    pub fn log(&self) -> Expr {
        Expr::apply(Func::Log, self.clone())
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::apply(Func::Cos, self.clone())
    }

    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse::parse(text)
    }

    pub fn is_exact_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.den.is_one() && self.0.num.is_one()
    }

    /// The value of a constant expression.
    pub fn as_rational(&self) -> Option<Rational> {
        if !self.0.den.is_one() {
            return None;
        }
        if self.0.num.is_zero() {
            return Some(Rational::zero());
        }
        self.0.num.constant_value().cloned()
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .map(|r| r.to_integer())
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    /// No denominator and no function kernels.
    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_one() && !self.0.num.has_function()
    }

    /// Whether the canonical form has a nonconstant denominator.
    pub fn has_denominator(&self) -> bool {
        !self.0.den.is_one()
    }

    pub fn has_function(&self) -> bool {
        self.0.num.has_function() || self.0.den.has_function()
    }

    pub fn numerator(&self) -> Expr {
        Expr::from_poly(self.0.num.clone())
    }

    pub fn denominator(&self) -> Expr {
        Expr::from_poly(self.0.den.clone())
    }

    /// Number of terms of the numerator.
    pub fn term_count(&self) -> usize {
        self.0.num.len()
    }

    /// Total degree of the numerator, counting function kernels as variables.
    pub fn degree(&self) -> u32 {
        self.0.num.total_degree()
    }

    pub fn pow(&self, e: i64) -> Expr {
        if e >= 0 {
            let e = e as u32;
            if self.0.den.is_one() {
                return Expr::from_poly(self.0.num.pow(e));
            }
            Expr::from_parts(self.0.num.pow(e), self.0.den.pow(e))
        } else {
            assert!(!self.is_exact_zero(), "negative power of zero");
            let e = e.unsigned_abs() as u32;
            Expr::from_parts(self.0.den.pow(e), self.0.num.pow(e))
        }
    }

    pub fn checked_div(&self, other: &Expr) -> Option<Expr> {
        if other.is_exact_zero() {
            return None;
        }
        if other.0.den.is_one() && self.0.den.is_one() {
            if let Some(c) = other.0.num.constant_value() {
                return Some(Expr::from_poly(self.0.num.scale(&c.recip())));
            }
        }
        Some(Expr::from_parts(
            self.0.num.mul(&other.0.den),
            self.0.den.mul(&other.0.num),
        ))
    }

    pub(crate) fn collect_vars(&self, out: &mut BTreeSet<Symbol>) {
        for p in [&self.0.num, &self.0.den] {
            for k in p.kernels() {
                k.collect_vars(out);
            }
        }
    }

    /// Every variable occurring in the expression, including inside function
    /// arguments.
    pub fn free_vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn depends_on(&self, v: &Symbol) -> bool {
        [&self.0.num, &self.0.den].iter().any(|p| {
            p.terms()
                .any(|(m, _)| m.factors().iter().any(|(k, _)| k.depends_on(v)))
        })
    }

    /// Applies the derivation that sends each variable `s` to `d(s)` (zero
    /// when `d` returns `None`), extended by the Leibniz and chain rules.
    pub fn derivation<F>(&self, d: &F) -> Expr
    where
        F: Fn(&Symbol) -> Option<Expr>,
    {
        if self.0.den.is_one() {
            return derive_poly(&self.0.num, d);
        }
        let dn = derive_poly(&self.0.num, d);
        let dd = derive_poly(&self.0.den, d);
        if dn.is_exact_zero() && dd.is_exact_zero() {
            return Expr::zero();
        }
        let num = self.numerator();
        let den = self.denominator();
        (&(&dn * &den) - &(&num * &dd)) / den.pow(2)
    }

    /// Partial derivative with respect to `v`, every other symbol held fixed.
    pub fn pdiff(&self, v: &Symbol) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        self.derivation(&|s: &Symbol| (s == v).then(Expr::one))
    }

    /// Simultaneous substitution. Rejects binding sets with a dependency cycle.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, Error> {
        if let Some(cycle) = find_cycle(bindings) {
            return Err(Error::CyclicSubstitution(
                cycle.iter().map(|s| s.to_string()).collect(),
            ));
        }
        Ok(self.substitute_unchecked(bindings))
    }

    /// Simultaneous substitution without the cycle check.
    pub(crate) fn substitute_unchecked(&self, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
        if bindings.is_empty() || !bindings.keys().any(|v| self.depends_on(v)) {
            return self.clone();
        }
        let num = subst_poly(&self.0.num, bindings);
        if self.0.den.is_one() {
            return num;
        }
        let den = subst_poly(&self.0.den, bindings);
        num.checked_div(&den)
            .expect("substitution produced a zero denominator")
    }

    /// Evaluates at a rational point as an IEEE double.
    pub fn eval(&self, point: &BTreeMap<Symbol, Rational>) -> Result<f64, EvalError> {
        let values: HashMap<&Symbol, f64> = point
            .iter()
            .map(|(k, v)| (k, v.to_f64().unwrap_or(f64::NAN)))
            .collect();
        self.eval_with(&|s: &Symbol| values.get(s).copied())
    }

    pub(crate) fn eval_with(
        &self,
        lookup: &dyn Fn(&Symbol) -> Option<f64>,
    ) -> Result<f64, EvalError> {
        let (n, _) = eval_poly(&self.0.num, lookup)?;
        if self.0.den.is_one() {
            return Ok(n);
        }
        let (d, _) = eval_poly(&self.0.den, lookup)?;
        if d == 0.0 {
            return Err(EvalError::Domain("division by zero".into()));
        }
        Ok(n / d)
    }

    /// Zero test with the default [`ZeroTester`].
    pub fn is_zero(&self) -> ZeroTest {
        ZeroTester::default().test(self)
    }

    /// Antiderivative with respect to `v` for polynomial expressions.
    pub fn integrate(&self, v: &Symbol) -> Option<Expr> {
        if !self.0.den.is_one() {
            return None;
        }
        let kv = Kernel::Var(v.clone());
        let mut out = Poly::zero();
        for (m, c) in self.0.num.terms() {
            if m.factors()
                .iter()
                .any(|(k, _)| k.is_function() && k.depends_on(v))
            {
                return None;
            }
            let e = m.degree_in(&kv);
            let mono = m.mul(&Monomial::from_kernel(kv.clone(), 1));
            let coef = c / Rational::from_integer(BigInt::from(e + 1));
            out.add_assign(&Poly::term(mono, coef));
        }
        Some(Expr::from_poly(out))
    }

    /// Splits `self = a * v + b` with `a`, `b` free of `v`, if `self` is
    /// affine in `v`.
    pub fn affine_in(&self, v: &Symbol) -> Option<(Expr, Expr)> {
        let a = self.pdiff(v);
        if a.is_exact_zero() || a.depends_on(v) {
            return None;
        }
        let b = self - &(&a * &Expr::symbol(v));
        if b.depends_on(v) {
            return None;
        }
        Some((a, b))
    }

    /// Canonical tree view used for printing.
    pub fn to_node(&self) -> Node {
        print::to_node(self)
    }
}

fn find_cycle(bindings: &BTreeMap<Symbol, Expr>) -> Option<Vec<Symbol>> {
    let deps: BTreeMap<&Symbol, Vec<&Symbol>> = bindings
        .iter()
        .map(|(k, e)| {
            let vars = e.free_vars();
            (k, bindings.keys().filter(|b| vars.contains(*b)).collect())
        })
        .collect();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&Symbol, u8> = BTreeMap::new();
    fn visit<'a>(
        v: &'a Symbol,
        deps: &BTreeMap<&'a Symbol, Vec<&'a Symbol>>,
        state: &mut BTreeMap<&'a Symbol, u8>,
        stack: &mut Vec<&'a Symbol>,
    ) -> Option<Vec<Symbol>> {
        match state.get(v) {
            Some(2) => return None,
            Some(1) => {
                let start = stack.iter().position(|s| *s == v).unwrap_or(0);
                return Some(stack[start..].iter().map(|s| (*s).clone()).collect());
            }
            _ => {}
        }
        state.insert(v, 1);
        stack.push(v);
        for w in deps.get(v).into_iter().flatten() {
            if let Some(c) = visit(w, deps, state, stack) {
                return Some(c);
            }
        }
        stack.pop();
        state.insert(v, 2);
        None
    }
    for v in bindings.keys() {
        let mut stack = Vec::new();
        if let Some(c) = visit(v, &deps, &mut state, &mut stack) {
            return Some(c);
        }
    }
    None
}

fn kernel_derivative<F>(k: &Kernel, d: &F) -> Option<Expr>
where
    F: Fn(&Symbol) -> Option<Expr>,
{
    match k {
        Kernel::Var(s) => d(s).filter(|e| !e.is_exact_zero()),
        Kernel::Apply(f, a) => {
            let da = a.derivation(d);
            if da.is_exact_zero() {
                return None;
            }
            Some(match f {
                // The exponential kernel itself stays in the monomial.
                Func::Exp => da,
                Func::Log => da.checked_div(a).expect("log of zero"),
                Func::Sin => &a.cos() * &da,
                Func::Cos => -&(&a.sin() * &da),
            })
        }
    }
}

fn derive_poly<F>(p: &Poly, d: &F) -> Expr
where
    F: Fn(&Symbol) -> Option<Expr>,
{
    let mut cache: HashMap<&Kernel, Option<Expr>> = HashMap::new();
    let mut acc = Poly::zero();
    let mut rest = Expr::zero();
    for (m, c) in p.terms() {
        for (k, e) in m.factors() {
            let dk = cache.entry(k).or_insert_with(|| kernel_derivative(k, d));
            let Some(dk) = dk else { continue };
            let (mono, coef) = if k.is_exp() {
                (m.clone(), c.clone())
            } else {
                (m.lowered(k), c * Rational::from_integer(BigInt::from(*e)))
            };
            if dk.0.den.is_one() {
                acc.add_assign(&dk.0.num.mul_term(&mono, &coef));
            } else {
                rest = &rest + &(&Expr::from_poly(Poly::term(mono, coef)) * &*dk);
            }
        }
    }
    let acc = Expr::from_poly(acc);
    if rest.is_exact_zero() {
        acc
    } else {
        &acc + &rest
    }
}

/// Substitutes into a polynomial over a common denominator: terms are
/// grouped by the denominator powers they pick up, each group is summed with
/// plain polynomial arithmetic and the result is reduced once. Falls back to
/// term-by-term rational arithmetic when a denominator involves `exp`.
fn subst_poly(p: &Poly, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
    let mut cache: HashMap<&Kernel, Option<Expr>> = HashMap::new();
    for (m, _) in p.terms() {
        for (k, _) in m.factors() {
            cache.entry(k).or_insert_with(|| match k {
                Kernel::Var(s) => bindings.get(s).cloned(),
                Kernel::Apply(f, a) => {
                    let b = a.substitute_unchecked(bindings);
                    (b != *a).then(|| Expr::apply(*f, b))
                }
            });
        }
    }
    if cache.values().flatten().any(|r| r.0.den.has_exp()) {
        return subst_poly_termwise(p, bindings);
    }
    // Distinct denominators and, per replaced kernel, its denominator slot.
    let mut dens: Vec<&Poly> = Vec::new();
    let mut slot: HashMap<&Kernel, usize> = HashMap::new();
    for (k, r) in &cache {
        if let Some(r) = r {
            if !r.0.den.is_one() {
                let i = match dens.iter().position(|d| **d == r.0.den) {
                    Some(i) => i,
                    None => {
                        dens.push(&r.0.den);
                        dens.len() - 1
                    }
                };
                slot.insert(*k, i);
            }
        }
    }
    let mut num_pow: HashMap<(&Kernel, u32), Poly> = HashMap::new();
    let mut groups: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut keep = Monomial::one();
        let mut t = Poly::one();
        let mut powers = vec![0u32; dens.len()];
        for (k, e) in m.factors() {
            match &cache[k] {
                None => keep = keep.mul(&Monomial::from_kernel(k.clone(), *e)),
                Some(r) => {
                    let np = num_pow.entry((k, *e)).or_insert_with(|| r.0.num.pow(*e));
                    t = t.mul(np);
                    if let Some(&i) = slot.get(k) {
                        powers[i] += e;
                    }
                }
            }
        }
        let t = t.mul_term(&keep, c);
        groups
            .entry(powers)
            .or_insert_with(Poly::zero)
            .add_assign(&t);
    }
    let den_of = |powers: &[u32]| {
        powers
            .iter()
            .zip(&dens)
            .filter(|(e, _)| **e > 0)
            .fold(Poly::one(), |acc, (e, d)| acc.mul(&d.pow(*e)))
    };
    if groups.len() == 1 {
        let (powers, num) = groups.into_iter().next().unwrap();
        return Expr::from_parts(num, den_of(&powers));
    }
    let group_dens: Vec<Poly> = groups.keys().map(|k| den_of(k)).collect();
    let mut lcm = Poly::one();
    for d in &group_dens {
        if d.is_one() {
            continue;
        }
        let g = poly::gcd(&lcm, d);
        lcm = lcm.mul(&d.exact_div(&g).expect("gcd divides"));
    }
    let mut num = Poly::zero();
    for (part, d) in groups.values().zip(&group_dens) {
        let scale = lcm.exact_div(d).expect("denominator divides the lcm");
        num.add_assign(&part.mul(&scale));
    }
    Expr::from_parts(num, lcm)
}

fn subst_poly_termwise(p: &Poly, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
    let mut cache: HashMap<&Kernel, Option<Expr>> = HashMap::new();
    let mut unchanged = Poly::zero();
    let mut out = Expr::zero();
    for (m, c) in p.terms() {
        let mut keep = Monomial::one();
        let mut changed: Vec<(Expr, u32)> = Vec::new();
        for (k, e) in m.factors() {
            let repl = cache.entry(k).or_insert_with(|| match k {
                Kernel::Var(s) => bindings.get(s).cloned(),
                Kernel::Apply(f, a) => {
                    let b = a.substitute_unchecked(bindings);
                    (b != *a).then(|| Expr::apply(*f, b))
                }
            });
            match repl {
                Some(r) => changed.push((r.clone(), *e)),
                None => keep = keep.mul(&Monomial::from_kernel(k.clone(), *e)),
            }
        }
        if changed.is_empty() {
            unchanged.add_assign(&Poly::term(keep, c.clone()));
        } else {
            let mut t = Expr::from_poly(Poly::term(keep, c.clone()));
            for (r, e) in changed {
                t = &t * &r.pow(e as i64);
            }
            out = &out + &t;
        }
    }
    &Expr::from_poly(unchanged) + &out
}

fn add(a: &Expr, b: &Expr) -> Expr {
    if a.is_exact_zero() {
        return b.clone();
    }
    if b.is_exact_zero() {
        return a.clone();
    }
    let (fa, fb) = (&*a.0, &*b.0);
    if fa.den.is_one() && fb.den.is_one() {
        return Expr::from_poly(fa.num.add(&fb.num));
    }
    if fa.den == fb.den {
        return Expr::from_parts(fa.num.add(&fb.num), fa.den.clone());
    }
    Expr::from_parts(
        fa.num.mul(&fb.den).add(&fb.num.mul(&fa.den)),
        fa.den.mul(&fb.den),
    )
}

fn mul(a: &Expr, b: &Expr) -> Expr {
    if a.is_exact_zero() || b.is_exact_zero() {
        return Expr::zero();
    }
    let (fa, fb) = (&*a.0, &*b.0);
    if fa.den.is_one() && fb.den.is_one() {
        return Expr::from_poly(fa.num.mul(&fb.num));
    }
    Expr::from_parts(fa.num.mul(&fb.num), fa.den.mul(&fb.den))
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &'a Expr) -> Expr {
        add(self, rhs)
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &'a Expr) -> Expr {
        add(self, &-rhs)
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &'a Expr) -> Expr {
        mul(self, rhs)
    }
}

impl<'a> Div<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn div(self, rhs: &'a Expr) -> Expr {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr(Arc::new(Fraction {
            num: self.0.num.neg(),
            den: self.0.den.clone(),
        }))
    }
}

macro_rules! owned_binop {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &'a Expr) -> Expr { (&self).$m(rhs) }
        }
        impl<'a> $tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { self.$m(&rhs) }
        }
    )*};
}

owned_binop!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Poly::zero();
        let mut rest = Expr::zero();
        for e in iter {
            if e.0.den.is_one() {
                acc.add_assign(&e.0.num);
            } else {
                rest = &rest + &e;
            }
        }
        &Expr::from_poly(acc) + &rest
    }
}

impl From<i64> for Expr {
    fn from(i: i64) -> Expr {
        Expr::int(i)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::rational(r)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Expr {
        Expr::symbol(s)
    }
}

impl FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Expr, ParseError> {
        Expr::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_node(), f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn additive_identity_and_lowest_terms() {
        assert_eq!(p("x + 0"), p("x"));
        assert_eq!(p("2/4 * u"), &Expr::ratio(1, 2) * &p("u"));
    }

    #[test]
    fn pdiff_basics() {
        let x = Symbol::new("x");
        let u = Symbol::new("u");
        let ux = Symbol::new("u_x");
        assert_eq!(p("x^2").pdiff(&x), p("2*x"));
        assert_eq!(p("exp(u)").pdiff(&u), p("exp(u)"));
        assert_eq!(p("x*u_x").pdiff(&ux), p("x"));
        assert_eq!(p("log(x)").pdiff(&x), p("1/x"));
        assert_eq!(p("sin(x^2)").pdiff(&x), p("2*x*cos(x^2)"));
        assert_eq!(p("3").pdiff(&x), Expr::zero());
    }

    #[test]
    fn substitution() {
        let mut m = BTreeMap::new();
        m.insert(Symbol::new("u_xx"), p("f"));
        assert_eq!(p("u_xx - f").substitute(&m).unwrap(), Expr::zero());
        assert_eq!(p("x + u").substitute(&BTreeMap::new()).unwrap(), p("x + u"));
        let mut m = BTreeMap::new();
        m.insert(Symbol::new("u"), p("x + 1"));
        assert_eq!(p("u^2").substitute(&m).unwrap(), p("x^2 + 2*x + 1"));
    }

    #[test]
    fn substitution_is_simultaneous_and_rejects_cycles() {
        let mut m = BTreeMap::new();
        m.insert(Symbol::new("x"), p("y + 1"));
        m.insert(Symbol::new("y"), p("2"));
        assert_eq!(p("x*y").substitute(&m).unwrap(), p("2*y + 2"));
        m.insert(Symbol::new("y"), p("x"));
        assert!(matches!(
            p("x").substitute(&m),
            Err(Error::CyclicSubstitution(_))
        ));
        let mut m = BTreeMap::new();
        m.insert(Symbol::new("u"), p("u + 1"));
        assert!(p("u").substitute(&m).is_err());
    }

    #[test]
    fn zero_tests() {
        assert_eq!(p("x - x").is_zero(), ZeroTest::Zero);
        assert_eq!(p("x + 1").is_zero(), ZeroTest::NonZero);
        assert_eq!(
            p("sin(u)^2 + cos(u)^2 - 1").is_zero(),
            ZeroTest::ProbablyZero
        );
        assert_eq!(p("sin(u)^2 + cos(u)^2").is_zero(), ZeroTest::NonZero);
        assert_eq!(p("log(x^2) - 2*log(x)").is_zero(), ZeroTest::ProbablyZero);
    }

    #[test]
    fn evaluation() {
        let mut pt = BTreeMap::new();
        pt.insert(Symbol::new("x"), Rational::from_integer(2.into()));
        pt.insert(Symbol::new("u"), Rational::from_integer(3.into()));
        assert_eq!(p("x*u").eval(&pt).unwrap(), 6.0);
        assert_eq!(p("exp(0)").eval(&BTreeMap::new()).unwrap(), 1.0);
        let mut pt = BTreeMap::new();
        pt.insert(Symbol::new("x"), Rational::new(1.into(), 2.into()));
        assert_eq!(p("x^2").eval(&pt).unwrap(), 0.25);
        assert!(matches!(p("y").eval(&pt), Err(EvalError::Unbound(_))));
        let mut pt = BTreeMap::new();
        pt.insert(Symbol::new("x"), Rational::from_integer((-1).into()));
        assert!(matches!(p("log(x)").eval(&pt), Err(EvalError::Domain(_))));
    }

    #[test]
    fn rational_functions_cancel() {
        assert_eq!(p("(x^2 - 1)/(x - 1)"), p("x + 1"));
        assert_eq!(p("x*u/x"), p("u"));
        assert_eq!(p("1/x + 1/y"), p("(x + y)/(x*y)"));
        assert_eq!(p("(2*x + 2)/(4*y)"), p("(x + 1)/(2*y)"));
    }

    #[test]
    fn exponentials_merge() {
        assert_eq!(p("exp(x)*exp(-x)"), Expr::one());
        assert_eq!(p("exp(x)^2"), p("exp(2*x)"));
        assert_eq!(p("1/exp(x)"), p("exp(-x)"));
        assert_eq!(p("exp(x)*exp(1)"), p("exp(x + 1)"));
    }

    #[test]
    fn integration_inverts_pdiff_on_polynomials() {
        let u = Symbol::new("u");
        let e = p("3*u^2*x + u*x^2 + 7");
        let i = e.integrate(&u).unwrap();
        assert_eq!(i.pdiff(&u), e);
        assert!(p("sin(u)").integrate(&u).is_none());
    }

    #[test]
    fn affine_split() {
        let ux = Symbol::new("u_x");
        let (a, b) = p("u - x*u_x").affine_in(&ux).unwrap();
        assert_eq!(a, p("-x"));
        assert_eq!(b, p("u"));
        assert!(p("u_x^2").affine_in(&ux).is_none());
    }
}
