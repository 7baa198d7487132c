//! Canonical rational expressions: parsing, normal forms, differentiation
//! and the exact/probabilistic zero test.

use jetprolong::{Expr, Symbol, ZeroTest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = Expr::parse("(x + 1)^2 - x^2 - 2*x")?;
    println!("(x + 1)^2 - x^2 - 2*x  =  {a}");

    let r = Expr::parse("(x^2 - y^2)/(x - y)")?;
    println!("(x^2 - y^2)/(x - y)    =  {r}");

    let f = Expr::parse("exp(x)*exp(-x) + sin(u)^2")?;
    println!("exp(x)*exp(-x) + sin(u)^2  =  {f}");
    println!("d/du                     =  {}", f.pdiff(&Symbol::new("u")));

    // sin^2 + cos^2 - 1 has no canonical zero form, only a numerical one.
    let pyth = Expr::parse("sin(u)^2 + cos(u)^2 - 1")?;
    match pyth.is_zero() {
        ZeroTest::Zero => println!("sin^2 + cos^2 - 1: exactly zero"),
        ZeroTest::ProbablyZero => println!("sin^2 + cos^2 - 1: zero at every sampled point"),
        ZeroTest::NonZero => println!("sin^2 + cos^2 - 1: nonzero"),
    }

    let p = Expr::parse("3*x^2*u + u^3")?;
    let u = Symbol::new("u");
    println!(
        "integral of {p} in u  =  {}",
        p.integrate(&u).expect("polynomial")
    );
    Ok(())
}
