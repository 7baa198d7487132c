//! Point symmetries of the heat equation u_t = u_xx, checked on the
//! solution manifold.

use jetprolong::symmetry::{check_symmetry, SymmetryKind};
use jetprolong::{DifferentialEquation, JetSpec, PointVectorField};

fn main() -> jetprolong::Result<()> {
    let spec = JetSpec::new(&["x", "t"], &["u"], 2)?;
    let heat = DifferentialEquation::parse(&spec, &[("u_t", "u_xx")])?;
    let candidates = [
        ("d/dx", ["1", "0"], "0"),
        ("d/dt", ["0", "1"], "0"),
        ("x d/dx + 2t d/dt", ["x", "2*t"], "0"),
        ("2t d/dx - xu d/du", ["2*t", "0"], "-x*u"),
        (
            "4xt d/dx + 4t^2 d/dt - (x^2 + 2t) u d/du",
            ["4*x*t", "4*t^2"],
            "-(x^2 + 2*t)*u",
        ),
        ("x d/dx", ["x", "0"], "0"),
    ];
    for (name, xi, phi) in candidates {
        let x = PointVectorField::parse(&spec, &xi, &[phi])?;
        let r = check_symmetry(&x, &heat, &SymmetryKind::Standard)?;
        let res: Vec<String> = r
            .residuals
            .iter()
            .filter(|e| !e.is_exact_zero())
            .map(|e| e.to_string())
            .collect();
        println!("{name:45} {}  {}", r.verdict, res.join(", "));
    }
    Ok(())
}
