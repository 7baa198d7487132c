//! Why mu must satisfy the compatibility condition: for a non-closed scalar
//! mu the recursive prolongation depends on the order of differentiation.

use jetprolong::prolong::{prolong_mu, verify_path_independence};
use jetprolong::{Error, JetSpec, MuForm, PathCheck, PointVectorField};

fn main() -> jetprolong::Result<()> {
    let spec = JetSpec::new(&["x", "t"], &["u"], 2)?;
    let x = PointVectorField::parse(&spec, &["0", "0"], &["1"])?;

    let bad = MuForm::parse_scalar(&spec, &["u", "0"])?;
    println!("mu = u dx, closed: {}", bad.d_closed(&spec)?);
    for m in verify_path_independence(&x, &bad, 2)? {
        println!("  {m}");
    }
    match prolong_mu(&x, &bad, 2, PathCheck::Verify) {
        Err(e @ Error::InconsistentMu { .. }) => println!("  verified prolongation refused: {e}"),
        other => println!("  unexpected: {other:?}"),
    }

    let good = MuForm::parse_scalar(&spec, &["u_x", "u_t"])?;
    println!("mu = u_x dx + u_t dt, closed: {}", good.d_closed(&spec)?);
    println!(
        "  mismatches: {}",
        verify_path_independence(&x, &good, 2)?.len()
    );
    Ok(())
}
