//! Compatibility of matrix-valued and scalar mu forms.

use jetprolong::compat::{
    maurer_cartan_check, maurer_cartan_check_on_equation, maurer_cartan_two_form,
    two_form_coefficient,
};
use jetprolong::{DifferentialEquation, ExprMatrix, JetSpec, MuForm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = JetSpec::new(&["x", "t"], &["u", "v"], 1)?;
    let m = |rows: [[&str; 2]; 2]| {
        ExprMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|e| spec.parse(e).unwrap()).collect())
                .collect(),
        )
    };
    // Two constant nilpotent matrices that do not commute.
    let mu = MuForm::matrix(vec![
        m([["0", "1"], ["0", "0"]])?,
        m([["0", "0"], ["1", "0"]])?,
    ])?;
    let check = maurer_cartan_check(&spec, &mu)?;
    println!("constant pair: {}", check.verdict);
    for ((i, k), r) in &check.residuals {
        println!("  R_{}{} = {r}", spec.independent(*i), spec.independent(*k));
    }
    let grid = maurer_cartan_two_form(&spec, &mu)?;
    println!(
        "  as a two-form, entry (0, 0): {}",
        grid[0][0].display(&spec)
    );
    println!(
        "  coefficient of dx^dt: {}",
        two_form_coefficient(&grid, 0, 1)
    );

    // mu = u_t dx is flat only on solutions of u_t = 0.
    let scalar = JetSpec::new(&["x", "t"], &["u"], 2)?;
    let mu = MuForm::parse_scalar(&scalar, &["u_t", "0"])?;
    let eq = DifferentialEquation::parse(&scalar, &[("u_t", "0")])?;
    println!(
        "mu = u_t dx: globally {}",
        maurer_cartan_check(&scalar, &mu)?.verdict
    );
    println!(
        "             on u_t = 0: {}",
        maurer_cartan_check_on_equation(&mu, &eq)?.verdict
    );
    Ok(())
}
