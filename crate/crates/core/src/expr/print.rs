use std::fmt;

use num_traits::{One, Signed};

use super::poly::{Kernel, Monomial, Poly};
use super::{Expr, Func, Rational, Symbol};

/// Tree view of a canonical expression.
///
/// Variants are declared in canonical order: constants < variables < powers <
/// products < sums < function applications. Sum and product children are
/// sorted by this order, so the derived `Ord` is the documented total order on
/// nodes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rational),
    Var(Symbol),
    Pow(Box<Node>, i64),
    Mul(Vec<Node>),
    Add(Vec<Node>),
    Func(Func, Box<Node>),
}

fn kernel_node(k: &Kernel) -> Node {
    match k {
        Kernel::Var(s) => Node::Var(s.clone()),
        Kernel::Apply(f, a) => Node::Func(*f, Box::new(to_node(a))),
    }
}

fn term_node(m: &Monomial, c: &Rational) -> Node {
    let mut factors: Vec<Node> = m
        .factors()
        .iter()
        .map(|(k, e)| {
            let b = kernel_node(k);
            if *e == 1 {
                b
            } else {
                Node::Pow(Box::new(b), *e as i64)
            }
        })
        .collect();
    if factors.is_empty() {
        return Node::Num(c.clone());
    }
    if !c.is_one() {
        factors.push(Node::Num(c.clone()));
    }
    if factors.len() == 1 {
        return factors.pop().unwrap();
    }
    factors.sort();
    Node::Mul(factors)
}

fn poly_node(p: &Poly) -> Node {
    let mut terms: Vec<Node> = p.terms().map(|(m, c)| term_node(m, c)).collect();
    match terms.len() {
        0 => Node::Num(Rational::from_integer(0.into())),
        1 => terms.pop().unwrap(),
        _ => {
            terms.sort();
            Node::Add(terms)
        }
    }
}

fn invert(node: Node, coef: &mut Rational, out: &mut Vec<Node>) {
    match node {
        Node::Num(c) => *coef /= c,
        Node::Pow(b, e) => out.push(Node::Pow(b, -e)),
        Node::Mul(fs) => {
            for f in fs {
                invert(f, coef, out);
            }
        }
        other => out.push(Node::Pow(Box::new(other), -1)),
    }
}

pub(super) fn to_node(e: &Expr) -> Node {
    let num = poly_node(&e.0.num);
    if e.0.den.is_one() {
        return num;
    }
    let mut coef = Rational::one();
    let mut factors = Vec::new();
    match num {
        Node::Num(c) => coef = c,
        Node::Mul(fs) => {
            for f in fs {
                match f {
                    Node::Num(c) => coef *= c,
                    other => factors.push(other),
                }
            }
        }
        other => factors.push(other),
    }
    invert(poly_node(&e.0.den), &mut coef, &mut factors);
    if !coef.is_one() {
        factors.push(Node::Num(coef));
    }
    if factors.len() == 1 {
        return factors.pop().unwrap();
    }
    factors.sort();
    Node::Mul(factors)
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

fn is_atomic(n: &Node) -> bool {
    match n {
        Node::Var(_) | Node::Func(..) => true,
        Node::Num(r) => r.is_integer() && !r.is_negative(),
        _ => false,
    }
}

fn fmt_base(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if is_atomic(n) {
        write!(f, "{n}")
    } else {
        write!(f, "({n})")
    }
}

fn fmt_power(b: &Node, e: i64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    fmt_base(b, f)?;
    if e != 1 {
        write!(f, "^{e}")?;
    }
    Ok(())
}

fn fmt_factor(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match n {
        Node::Add(_) => write!(f, "({n})"),
        _ => write!(f, "{n}"),
    }
}

/// Writes a product, optionally dropping the sign of its coefficient.
fn fmt_product(factors: &[Node], abs: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut coef = Rational::one();
    let mut numer = Vec::new();
    let mut denom = Vec::new();
    for n in factors {
        match n {
            Node::Num(c) => coef = c.clone(),
            Node::Pow(b, e) if *e < 0 => denom.push((b.as_ref(), -e)),
            other => numer.push(other),
        }
    }
    if coef.is_negative() {
        if !abs {
            f.write_str("-")?;
        }
        coef = -coef;
    }
    let mut first = true;
    if !coef.is_one() || (numer.is_empty()) {
        if numer.is_empty() && coef.is_one() {
            f.write_str("1")?;
        } else {
            fmt_rational(&coef, f)?;
        }
        first = false;
    }
    for n in numer {
        if !first {
            f.write_str("*")?;
        }
        fmt_factor(n, f)?;
        first = false;
    }
    if denom.is_empty() {
        return Ok(());
    }
    f.write_str("/")?;
    if denom.len() == 1 {
        let (b, e) = denom[0];
        return fmt_power(b, e, f);
    }
    f.write_str("(")?;
    for (i, (b, e)) in denom.iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        fmt_power(b, *e, f)?;
    }
    f.write_str(")")
}

fn is_negative_term(n: &Node) -> bool {
    match n {
        Node::Num(r) => r.is_negative(),
        Node::Mul(fs) => fs
            .iter()
            .any(|x| matches!(x, Node::Num(r) if r.is_negative())),
        _ => false,
    }
}

fn fmt_abs_term(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match n {
        Node::Num(r) => fmt_rational(&r.abs(), f),
        Node::Mul(fs) => fmt_product(fs, true, f),
        other => write!(f, "{other}"),
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(r) => fmt_rational(r, f),
            Node::Var(s) => write!(f, "{s}"),
            Node::Func(func, arg) => write!(f, "{}({arg})", func.name()),
            Node::Pow(b, e) if *e < 0 => {
                f.write_str("1/")?;
                fmt_power(b, -e, f)
            }
            Node::Pow(b, e) => fmt_power(b, *e, f),
            Node::Mul(fs) => fmt_product(fs, false, f),
            Node::Add(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{t}")?;
                    } else if is_negative_term(t) {
                        f.write_str(" - ")?;
                        fmt_abs_term(t, f)?;
                    } else {
                        f.write_str(" + ")?;
                        write!(f, "{t}")?;
                    }
                }
                Ok(())
            }
        }
    }
}
