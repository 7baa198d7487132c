//! On the invariant set of X (where the characteristic and its total
//! derivatives vanish) the mu-prolongation agrees with the standard one.

use jetprolong::prolong::difference_terms;
use jetprolong::symmetry::{coincide_on_invariant_set, Coincidence};
use jetprolong::{JetSpec, MuForm, PointVectorField};

fn main() -> jetprolong::Result<()> {
    let spec = JetSpec::new(&["x"], &["u"], 3)?;
    let x = PointVectorField::parse(&spec, &["1"], &["x*u"])?;
    let mu = MuForm::parse_scalar(&spec, &["u^2 + x"])?;

    let d = difference_terms(&x, &mu, 3)?;
    for (k, f) in &d.terms {
        println!("F_{:3} = {}", spec.index_suffix(k), f[0]);
    }
    println!(
        "recursion agrees with subtraction: {:?}",
        d.recursion_verdict()
    );

    let r = coincide_on_invariant_set(&x, &mu, 3)?;
    for (k, v) in &r.solutions {
        println!("on I_X: {k} = {v}");
    }
    match r.outcome {
        Coincidence::Tested(v) => println!("difference terms vanish on I_X: {v}"),
        Coincidence::Vacuous => println!("I_X is empty"),
        Coincidence::Unverifiable(why) => println!("could not solve: {why}"),
    }

    // Q = 1 has an empty invariant set.
    let y = PointVectorField::parse(&spec, &["0"], &["1"])?;
    println!(
        "X = d/du: {:?}",
        coincide_on_invariant_set(&y, &mu, 3)?.outcome
    );
    Ok(())
}
