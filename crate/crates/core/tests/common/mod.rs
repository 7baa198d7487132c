//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use jetprolong::jet::Basis;
use jetprolong::{Expr, ExprMatrix, JetSpec, JetVectorField, MuForm, OneForm, PointVectorField};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coefficient(rng: &mut ChaCha8Rng) -> Expr {
    let c = rng.gen_range(1..=3);
    Expr::int(if rng.gen_bool(0.5) { c } else { -c })
}

/// Sum of up to `max_terms` monomials of total degree `<= degree` in `vars`.
/// May be zero.
pub fn poly(rng: &mut ChaCha8Rng, vars: &[Expr], degree: usize, max_terms: usize) -> Expr {
    let terms = rng.gen_range(1..=max_terms);
    let mut out = Expr::zero();
    for _ in 0..terms {
        let mut m = coefficient(rng);
        let d = rng.gen_range(0..=degree);
        for _ in 0..d {
            if let Some(v) = vars.choose(rng) {
                m = &m * v;
            }
        }
        out = &out + &m;
    }
    out
}

/// Like [`poly`] but never zero.
pub fn nonzero_poly(rng: &mut ChaCha8Rng, vars: &[Expr], degree: usize, max_terms: usize) -> Expr {
    loop {
        let p = poly(rng, vars, degree, max_terms);
        if !p.is_exact_zero() {
            return p;
        }
    }
}

/// Independent and dependent variables as expressions.
pub fn base_vars(spec: &JetSpec) -> Vec<Expr> {
    let mut v: Vec<Expr> = (0..spec.p()).map(|i| spec.x(i)).collect();
    v.extend((0..spec.q()).map(|a| spec.coord_expr(&spec.base_coord(a))));
    v
}

/// All coordinates of `J^order` as expressions, base variables included.
pub fn jet_vars(spec: &JetSpec, order: usize) -> Vec<Expr> {
    let mut v: Vec<Expr> = (0..spec.p()).map(|i| spec.x(i)).collect();
    v.extend(spec.coordinates(order).iter().map(|c| spec.coord_expr(c)));
    v
}

pub fn spec(p: usize, q: usize, n: usize) -> JetSpec {
    let ind = ["x", "t"];
    let dep = ["u", "v", "w"];
    JetSpec::new(&ind[..p], &dep[..q], n).unwrap()
}

/// A point field with polynomial coefficients of degree `<= 2`.
pub fn point_field(rng: &mut ChaCha8Rng, spec: &JetSpec) -> PointVectorField {
    let vars = base_vars(spec);
    let xi = (0..spec.p()).map(|_| poly(rng, &vars, 2, 3)).collect();
    let phi = (0..spec.q()).map(|_| poly(rng, &vars, 2, 3)).collect();
    PointVectorField::new(spec, xi, phi).unwrap()
}

/// `(D_1 Φ, ..., D_p Φ)` for a random polynomial `Φ` on `(x, u)`.
pub fn exact_lambda(rng: &mut ChaCha8Rng, spec: &JetSpec) -> (Expr, Vec<Expr>) {
    let phi = poly(rng, &base_vars(spec), 2, 3);
    let l = (0..spec.p())
        .map(|i| spec.total_derivative(&phi, i))
        .collect();
    (phi, l)
}

/// A random `q×q` matrix-valued form; not flat in general.
pub fn matrix_mu(rng: &mut ChaCha8Rng, spec: &JetSpec) -> MuForm {
    let vars = base_vars(spec);
    let q = spec.q();
    let comps = (0..spec.p())
        .map(|_| {
            let mut m = ExprMatrix::zero(q);
            for r in 0..q {
                for c in 0..q {
                    if rng.gen_bool(0.5) {
                        m.set(r, c, poly(rng, &vars, 1, 2));
                    }
                }
            }
            m
        })
        .collect();
    MuForm::matrix(comps).unwrap()
}

/// Upper triangular with unit diagonal and polynomial entries above it.
pub fn unipotent(rng: &mut ChaCha8Rng, spec: &JetSpec, q: usize) -> ExprMatrix {
    let vars = base_vars(spec);
    let mut m = ExprMatrix::identity(q);
    for r in 0..q {
        for c in r + 1..q {
            m.set(r, c, poly(rng, &vars, 2, 3));
        }
    }
    m
}

/// A jet-space field with polynomial components over `J^order`.
pub fn jet_field(rng: &mut ChaCha8Rng, spec: &JetSpec, order: usize) -> JetVectorField {
    let vars = jet_vars(spec, order);
    let mut y = JetVectorField::zero(spec.p(), order);
    for i in 0..spec.p() {
        y.xi[i] = poly(rng, &vars, 2, 2);
    }
    for c in spec.coordinates(order) {
        y.set_psi(c, poly(rng, &vars, 2, 2));
    }
    y
}

/// A one-form on `J^order` with random polynomial coefficients.
pub fn one_form(rng: &mut ChaCha8Rng, spec: &JetSpec, order: usize) -> OneForm {
    let vars = jet_vars(spec, order);
    let mut w = OneForm::zero();
    for i in 0..spec.p() {
        if rng.gen_bool(0.7) {
            w.add_term(Basis::Dx(i), &poly(rng, &vars, 2, 2));
        }
    }
    for c in spec.coordinates(order) {
        if rng.gen_bool(0.5) {
            w.add_term(Basis::Du(c), &poly(rng, &vars, 2, 2));
        }
    }
    w
}
