//! Jet coordinates, total derivatives and contact forms.

use jetprolong::jet::{contact_form, differential, in_contact_module};
use jetprolong::{JetSpec, OneForm};

fn main() -> jetprolong::Result<()> {
    let spec = JetSpec::new(&["x", "t"], &["u"], 2)?;
    let names: Vec<String> = spec
        .coordinates(2)
        .iter()
        .map(|c| spec.coord_name(c))
        .collect();
    println!("coordinates of J^2: {}", names.join(", "));

    let f = spec.parse("x*u*u_t")?;
    println!("D_x({f}) = {}", spec.total_derivative(&f, 0));
    println!("D_t({f}) = {}", spec.total_derivative(&f, 1));

    let c = spec.jet_coord(&"u_x".into()).expect("jet coordinate");
    let theta = contact_form(&spec, &c)?;
    println!("contact form for u_x: {}", theta.display(&spec));

    // df - (D_x f) dx - (D_t f) dt is a combination of contact forms.
    let df = differential(&spec, &spec.parse("x*u")?);
    let horizontal = OneForm::horizontal(&[
        spec.total_derivative(&spec.parse("x*u")?, 0),
        spec.total_derivative(&spec.parse("x*u")?, 1),
    ]);
    let vertical = df.sub(&horizontal);
    println!(
        "d(xu) - D(xu): {}  in contact module: {}",
        vertical.display(&spec),
        in_contact_module(&spec, &vertical)
    );
    Ok(())
}
