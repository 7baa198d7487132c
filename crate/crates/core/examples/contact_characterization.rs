//! A prolonged field Y preserves the contact module (up to the mu term) and
//! its commutator with the total derivative pairs with contact forms as
//! lambda times the pairing with Y.

use jetprolong::jet::{contact_form, in_contact_module, interior_product, lie_derivative};
use jetprolong::prolong::{prolong_lambda, prolong_standard};
use jetprolong::symmetry::{characterization_check, CharacterizationKind};
use jetprolong::{JetSpec, PointVectorField};

fn main() -> jetprolong::Result<()> {
    let spec = JetSpec::new(&["x"], &["u"], 3)?;
    let x = PointVectorField::parse(&spec, &["x*u"], &["u^2 + x"])?;
    let lambda = spec.parse("x*u")?;

    let y = prolong_lambda(&x, &lambda, 3)?;
    let mu = jetprolong::OneForm::horizontal(std::slice::from_ref(&lambda));
    for c in spec.coordinates(2) {
        let theta = contact_form(&spec, &c)?;
        let w = lie_derivative(&spec, &y, &theta).add(&mu.scale(&interior_product(&y, &theta)));
        println!(
            "L_Y theta_{} + (Y.theta) mu in contact module: {}",
            spec.coord_name(&c),
            in_contact_module(&spec, &w)
        );
    }
    let (v, _) = characterization_check(&spec, &y, &CharacterizationKind::Lambda(lambda))?;
    println!("commutator characterization (lambda): {v}");

    let s = prolong_standard(&x, 3)?;
    let (v, _) = characterization_check(&spec, &s, &CharacterizationKind::Standard)?;
    println!("commutator characterization (standard): {v}");

    // Breaking the top coefficient destroys both properties.
    let mut broken = s.clone();
    let top = spec.jet_coord(&"u_xxx".into()).expect("coordinate");
    broken.set_psi(top.clone(), broken.psi(&top) + spec.parse("u")?);
    let (v, _) = characterization_check(&spec, &broken, &CharacterizationKind::Standard)?;
    let theta = contact_form(&spec, &spec.jet_coord(&"u_xx".into()).expect("coordinate"))?;
    println!(
        "perturbed field: commutator {v}, contact membership {}",
        in_contact_module(&spec, &lie_derivative(&spec, &broken, &theta))
    );
    Ok(())
}
