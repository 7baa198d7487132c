//! Gauge structure: potentials of closed scalar forms, Darboux derivatives
//! of unipotent gauge functions and the e^Phi equivalence of prolongations.

use jetprolong::compat::{
    darboux_derivative, maurer_cartan_check, scalar_potential, verify_gauge_equivalence_scalar,
    GaugeFunction,
};
use jetprolong::{ExprMatrix, JetSpec, MuForm, PointVectorField};

fn main() -> jetprolong::Result<()> {
    let spec = JetSpec::new(&["x", "t"], &["u"], 2)?;
    let mu = MuForm::parse_scalar(&spec, &["2*x*u + x^2*u_x", "x^2*u_t + 1"])?;
    println!("potential of mu: {}", scalar_potential(&spec, &mu)?);

    let spec2 = JetSpec::new(&["x", "t"], &["u", "v"], 1)?;
    let gamma = ExprMatrix::from_rows(vec![
        vec![spec2.parse("1")?, spec2.parse("x*u + v^2")?],
        vec![spec2.parse("0")?, spec2.parse("1")?],
    ])?;
    let g = GaugeFunction::new(gamma, None)?;
    let lambda = darboux_derivative(&spec2, &g)?;
    for (i, l) in lambda.components().iter().enumerate() {
        println!("Lambda_{} = {l}", spec2.independent(i));
    }
    println!(
        "Darboux derivative is flat: {}",
        maurer_cartan_check(&spec2, &lambda)?.verdict
    );

    let ode = JetSpec::new(&["x"], &["u"], 3)?;
    let x = PointVectorField::parse(&ode, &["x"], &["u^2"])?;
    for phi in ["u*x", "x^3", "u"] {
        let r = verify_gauge_equivalence_scalar(&x, &ode.parse(phi)?, 3)?;
        println!("e^Phi equivalence, Phi = {phi}: {}", r.verdict);
    }
    Ok(())
}
