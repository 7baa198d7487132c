//! Standard, lambda- and mu-prolongations of point vector fields.

use jetprolong::cli::format_prolongation;
use jetprolong::prolong::{prolong_lambda, prolong_mu, prolong_standard};
use jetprolong::{JetSpec, MuForm, PathCheck, PointVectorField};

fn main() -> jetprolong::Result<()> {
    let spec = JetSpec::new(&["x"], &["u"], 3)?;
    let scaling = PointVectorField::parse(&spec, &["x"], &["u"])?;
    println!("X = x d/dx + u d/du");
    println!(
        "  standard: {}",
        format_prolongation(&spec, &prolong_standard(&scaling, 3)?)
    );

    let x = PointVectorField::parse(&spec, &["0"], &["1"])?;
    let lambda = spec.parse("u")?;
    println!("X = d/du, lambda = u");
    println!(
        "  lambda:   {}",
        format_prolongation(&spec, &prolong_lambda(&x, &lambda, 3)?)
    );

    // With mu = lambda dx the mu-prolongation is the lambda-prolongation.
    let mu = MuForm::scalar(vec![lambda]);
    println!(
        "  mu:       {}",
        format_prolongation(&spec, &prolong_mu(&x, &mu, 3, PathCheck::Trust)?)
    );

    // Two independent variables, a closed mu = D(x u).
    let spec2 = JetSpec::new(&["x", "t"], &["u"], 2)?;
    let y = PointVectorField::parse(&spec2, &["1", "0"], &["u"])?;
    let mu2 = MuForm::parse_scalar(&spec2, &["u + x*u_x", "x*u_t"])?;
    let p = prolong_mu(&y, &mu2, 2, PathCheck::Verify)?;
    println!("X = d/dx + u d/du on (x, t), mu = D(xu)");
    println!("  mu:       {}", format_prolongation(&spec2, &p));
    Ok(())
}
