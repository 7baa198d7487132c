//! u_xx = (1 + x^2) u has no useful point symmetry in d/du, but d/du is a
//! lambda-symmetry with lambda = x.

use jetprolong::symmetry::{check_symmetry, SymmetryKind};
use jetprolong::{DifferentialEquation, JetSpec, PointVectorField};

fn main() -> jetprolong::Result<()> {
    let spec = JetSpec::new(&["x"], &["u"], 2)?;
    let eq = DifferentialEquation::parse(&spec, &[("u_xx", "(1 + x^2)*u")])?;
    let x = PointVectorField::parse(&spec, &["0"], &["1"])?;

    let standard = check_symmetry(&x, &eq, &SymmetryKind::Standard)?;
    println!("standard symmetry: {}", standard.verdict);
    for r in &standard.residuals {
        println!("  residual: {r}");
    }

    let lambda = check_symmetry(&x, &eq, &SymmetryKind::Lambda(spec.parse("x")?))?;
    println!("lambda-symmetry with lambda = x: {}", lambda.verdict);
    println!("  Y = {}", lambda.prolongation.describe(&spec));
    Ok(())
}
