//! Maurer–Cartan compatibility of `μ`, scalar potentials, Darboux
//! derivatives and scalar gauge equivalence.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{Basis, JetCoord, JetSpec, TwoForm};
use crate::matrix::ExprMatrix;
use crate::prolong::{prolong_lambda, prolong_standard, MuForm, PointVectorField};
use crate::symmetry::DifferentialEquation;
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq)]
pub struct MaurerCartanCheck {
    /// `R_ik = D_i Λ_k − D_k Λ_i + [Λ_i, Λ_k]` for `i < k`.
    pub residuals: BTreeMap<(usize, usize), ExprMatrix>,
    pub verdict: Verdict,
}

fn canonical_mu(spec: &JetSpec, mu: &MuForm) -> Result<Vec<ExprMatrix>> {
    mu.check_fits(spec)?;
    Ok(mu
        .components()
        .iter()
        .map(|m| m.map(|e| spec.canonicalize_names(e)))
        .collect())
}

fn mc_residuals(spec: &JetSpec, l: &[ExprMatrix]) -> BTreeMap<(usize, usize), ExprMatrix> {
    let mut out = BTreeMap::new();
    for i in 0..l.len() {
        for k in i + 1..l.len() {
            let di_lk = l[k].map(|e| spec.total_derivative(e, i));
            let dk_li = l[i].map(|e| spec.total_derivative(e, k));
            out.insert((i, k), di_lk.sub(&dk_li).add(&l[i].commutator(&l[k])));
        }
    }
    out
}

pub fn maurer_cartan_check(spec: &JetSpec, mu: &MuForm) -> Result<MaurerCartanCheck> {
    let l = canonical_mu(spec, mu)?;
    let residuals = mc_residuals(spec, &l);
    let verdict = residuals.values().map(ExprMatrix::vanishes).collect();
    Ok(MaurerCartanCheck { residuals, verdict })
}

/// The same residuals, each restricted to the solution manifold of `Δ`.
pub fn maurer_cartan_check_on_equation(
    mu: &MuForm,
    eq: &DifferentialEquation,
) -> Result<MaurerCartanCheck> {
    let spec = eq.spec();
    let l = canonical_mu(spec, mu)?;
    let mut residuals = BTreeMap::new();
    for (key, r) in mc_residuals(spec, &l) {
        let rows = r
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .map(|e| eq.restrict(e, None))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        residuals.insert(key, ExprMatrix::from_rows(rows)?);
    }
    let verdict = residuals.values().map(ExprMatrix::vanishes).collect();
    Ok(MaurerCartanCheck { residuals, verdict })
}

/// `Dμ + ½[μ, μ]` as a `q×q` grid of two-forms, accumulated over all ordered
/// pairs `(i, k)` with `Dμ = Σ D_i Λ_k dx^i ∧ dx^k` and
/// `[μ, μ] = Σ [Λ_i, Λ_k] dx^i ∧ dx^k`.
pub fn maurer_cartan_two_form(spec: &JetSpec, mu: &MuForm) -> Result<Vec<Vec<TwoForm>>> {
    let l = canonical_mu(spec, mu)?;
    let q = mu.q();
    let half = Expr::ratio(1, 2);
    let mut grid = vec![vec![TwoForm::zero(); q]; q];
    for i in 0..l.len() {
        for k in 0..l.len() {
            let d = l[k].map(|e| spec.total_derivative(e, i));
            let br = l[i].commutator(&l[k]).scale(&half);
            for (a, row) in grid.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate() {
                    let c = d.get(a, b) + br.get(a, b);
                    cell.add_wedge(Basis::Dx(i), Basis::Dx(k), &c);
                }
            }
        }
    }
    Ok(grid)
}

/// Coefficient matrix of `dx^i ∧ dx^k` in a grid from [`maurer_cartan_two_form`].
pub fn two_form_coefficient(grid: &[Vec<TwoForm>], i: usize, k: usize) -> ExprMatrix {
    ExprMatrix::from_rows(
        grid.iter()
            .map(|row| {
                row.iter()
                    .map(|w| w.coeff(&Basis::Dx(i), &Basis::Dx(k)))
                    .collect()
            })
            .collect(),
    )
    .expect("grid is square")
}

/// Finds `Φ` with `D_i Φ = λ_i` for a closed polynomial scalar `μ`.
///
/// Each stage inverts one total derivative on polynomials: the highest jet
/// coordinate `w` with a derivative in slot `i` must enter affinely with a
/// coefficient of lower order, and `∫ coeff d(w − e_i)` is split off. What
/// remains must be free of jet coordinates and is integrated in `x^i`. The
/// result is always checked by direct differentiation.
pub fn scalar_potential(spec: &JetSpec, mu: &MuForm) -> Result<Expr> {
    mu.check_fits(spec)?;
    let lambda: Vec<Expr> = mu
        .scalar_components()
        .ok_or_else(|| Error::Dimension("scalar potential needs q = 1".into()))?
        .iter()
        .map(|e| spec.canonicalize_names(e))
        .collect();
    for l in &lambda {
        if !l.is_polynomial() || l.has_function() {
            return Err(Error::NonPolynomial(l.to_string()));
        }
    }
    for i in 0..lambda.len() {
        for k in i + 1..lambda.len() {
            let r = &spec.total_derivative(&lambda[k], i) - &spec.total_derivative(&lambda[i], k);
            if !r.is_exact_zero() {
                return Err(Error::NotClosed {
                    i: spec.independent(i).to_string(),
                    k: spec.independent(k).to_string(),
                    residual: r.to_string(),
                });
            }
        }
    }
    let mut phi = Expr::zero();
    for (i, l) in lambda.iter().enumerate() {
        let h = l - &spec.total_derivative(&phi, i);
        phi = &phi + &inverse_total_derivative(spec, &h, i)?;
    }
    for (i, l) in lambda.iter().enumerate() {
        if !Verdict::vanishes(&(&spec.total_derivative(&phi, i) - l)).holds() {
            return Err(Error::NoPotentialFound(format!(
                "candidate {phi} fails D_{} check",
                spec.independent(i)
            )));
        }
    }
    Ok(phi)
}

fn inverse_total_derivative(spec: &JetSpec, h: &Expr, i: usize) -> Result<Expr> {
    let mut g = h.clone();
    let mut out = Expr::zero();
    let cap = 16 * (spec.order_of(h) + 2) * (h.term_count() + 1);
    for _ in 0..cap {
        let coords: Vec<JetCoord> = g
            .free_vars()
            .iter()
            .filter_map(|v| spec.jet_coord(v))
            .collect();
        let Some(w) = coords.iter().max().cloned() else {
            let tail = g
                .integrate(spec.independent(i))
                .ok_or_else(|| Error::NonPolynomial(g.to_string()))?;
            return Ok(&out + &tail);
        };
        let no_preimage = || {
            Error::NoPotentialFound(format!(
                "{h} is not a total {}-derivative",
                spec.independent(i)
            ))
        };
        let v = JetCoord::new(w.dep, w.index.decremented(i).ok_or_else(no_preimage)?);
        let wsym = spec.coord_symbol(&w);
        let (a, _) = g.affine_in(&wsym).ok_or_else(no_preimage)?;
        if spec.order_of(&a) >= w.order() {
            return Err(no_preimage());
        }
        let term = a
            .integrate(&spec.coord_symbol(&v))
            .ok_or_else(|| Error::NonPolynomial(a.to_string()))?;
        g = &g - &spec.total_derivative(&term, i);
        out = &out + &term;
    }
    Err(Error::NoPotentialFound(format!(
        "integration of {h} in {} did not terminate",
        spec.independent(i)
    )))
}

/// A `GL(q)`-valued function with a known inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeFunction {
    matrix: ExprMatrix,
    inverse: ExprMatrix,
}

impl GaugeFunction {
    /// Accepts `γ` with an explicit inverse (checked) or, when none is given,
    /// a unipotent triangular `γ` whose inverse is computed.
    pub fn new(matrix: ExprMatrix, inverse: Option<ExprMatrix>) -> Result<Self> {
        let inverse = match inverse {
            Some(inv) => {
                if inv.size() != matrix.size() {
                    return Err(Error::InvalidGauge("inverse has the wrong size".into()));
                }
                let prod = matrix.mul(&inv).sub(&ExprMatrix::identity(matrix.size()));
                if !prod.vanishes().holds() {
                    return Err(Error::InvalidGauge(format!(
                        "gamma * inverse - I = {prod}, not zero"
                    )));
                }
                inv
            }
            None => matrix.unipotent_inverse().ok_or_else(|| {
                Error::InvalidGauge(
                    "matrix is not unipotent triangular; supply an explicit inverse".into(),
                )
            })?,
        };
        Ok(GaugeFunction { matrix, inverse })
    }

    /// The scalar gauge `e^Φ`.
    pub fn exp(phi: &Expr) -> Self {
        GaugeFunction {
            matrix: ExprMatrix::scalar(phi.exp()),
            inverse: ExprMatrix::scalar((-phi).exp()),
        }
    }

    pub fn matrix(&self) -> &ExprMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &ExprMatrix {
        &self.inverse
    }
}

/// `Λ_i = γ⁻¹ D_i γ`.
pub fn darboux_derivative(spec: &JetSpec, g: &GaugeFunction) -> Result<MuForm> {
    let m = g.matrix.map(|e| spec.canonicalize_names(e));
    let inv = g.inverse.map(|e| spec.canonicalize_names(e));
    MuForm::matrix(
        (0..spec.p())
            .map(|i| inv.mul(&m.map(|e| spec.total_derivative(e, i))))
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeCheck {
    /// `e^Φ Ψ_k(A) − Ψ_k(B)` for `k = 0..=n`.
    pub residuals: Vec<Expr>,
    pub verdict: Verdict,
}

/// Compares the λ-prolongation of `X` with `λ = D_x Φ` against the standard
/// prolongation of the generalized field `e^Φ X`.
pub fn verify_gauge_equivalence_scalar(
    x: &PointVectorField,
    phi: &Expr,
    n: usize,
) -> Result<GaugeCheck> {
    let s = x.spec();
    if s.p() != 1 || s.q() != 1 {
        return Err(Error::NotScalarOde { p: s.p(), q: s.q() });
    }
    let phi = s.canonicalize_names(phi);
    let e = phi.exp();
    let a = prolong_lambda(x, &s.total_derivative(&phi, 0), n)?;
    let b = prolong_standard(&x.scaled(&e), n)?;
    let residuals: Vec<Expr> = s
        .coordinates(n)
        .iter()
        .map(|c| &(&e * &a.psi(c)) - &b.psi(c))
        .collect();
    Ok(GaugeCheck {
        verdict: Verdict::all_vanish(&residuals),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &JetSpec, rows: &[&[&str]]) -> ExprMatrix {
        ExprMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|t| s.parse(t).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_counterexample() {
        let s = JetSpec::new(&["x", "t"], &["u", "v"], 1).unwrap();
        let mu = MuForm::matrix(vec![
            m(&s, &[&["0", "1"], &["0", "0"]]),
            m(&s, &[&["0", "0"], &["1", "0"]]),
        ])
        .unwrap();
        let r = maurer_cartan_check(&s, &mu).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.residuals[&(0, 1)], m(&s, &[&["1", "0"], &["0", "-1"]]));
        let grid = maurer_cartan_two_form(&s, &mu).unwrap();
        assert_eq!(two_form_coefficient(&grid, 0, 1), r.residuals[&(0, 1)]);

        let same = m(&s, &[&["1", "2"], &["3", "4"]]);
        let mu = MuForm::matrix(vec![same.clone(), same]).unwrap();
        assert_eq!(
            maurer_cartan_check(&s, &mu).unwrap().verdict,
            Verdict::Holds
        );
    }

    #[test]
    fn scalar_case_is_closedness() {
        let s = JetSpec::new(&["x", "t"], &["u"], 2).unwrap();
        let mu = MuForm::parse_scalar(&s, &["u_x", "u_t"]).unwrap();
        assert_eq!(
            maurer_cartan_check(&s, &mu).unwrap().verdict,
            Verdict::Holds
        );
        let mu = MuForm::parse_scalar(&s, &["u", "0"]).unwrap();
        assert_eq!(
            maurer_cartan_check(&s, &mu).unwrap().verdict,
            Verdict::Fails
        );
    }

    #[test]
    fn on_equation_compatibility() {
        let s = JetSpec::new(&["x", "t"], &["u"], 1).unwrap();
        let mu = MuForm::parse_scalar(&s, &["u_t", "0"]).unwrap();
        assert_eq!(
            maurer_cartan_check(&s, &mu).unwrap().verdict,
            Verdict::Fails
        );
        let eq = DifferentialEquation::parse(&s, &[("u_t", "0")]).unwrap();
        assert_eq!(
            maurer_cartan_check_on_equation(&mu, &eq).unwrap().verdict,
            Verdict::Holds
        );
    }

    #[test]
    fn potentials() {
        let s = JetSpec::new(&["x", "t"], &["u"], 2).unwrap();
        let mu = MuForm::parse_scalar(&s, &["u_x", "u_t"]).unwrap();
        assert_eq!(scalar_potential(&s, &mu).unwrap(), s.parse("u").unwrap());
        let zero = MuForm::zero(2, 1);
        assert_eq!(scalar_potential(&s, &zero).unwrap(), Expr::zero());
        let s1 = JetSpec::new(&["x"], &["u"], 1).unwrap();
        let dx = MuForm::parse_scalar(&s1, &["1"]).unwrap();
        assert_eq!(scalar_potential(&s1, &dx).unwrap(), s1.parse("x").unwrap());

        let phi = s.parse("x*u^2 + t*u_x + x^2*t").unwrap();
        let l: Vec<Expr> = (0..2).map(|i| s.total_derivative(&phi, i)).collect();
        let got = scalar_potential(&s, &MuForm::scalar(l)).unwrap();
        assert_eq!(got, phi);

        assert!(matches!(
            scalar_potential(&s, &MuForm::parse_scalar(&s, &["u", "0"]).unwrap()),
            Err(Error::NotClosed { .. })
        ));
        assert!(matches!(
            scalar_potential(&s1, &MuForm::parse_scalar(&s1, &["exp(x)"]).unwrap()),
            Err(Error::NonPolynomial(_))
        ));
        assert!(matches!(
            scalar_potential(&s1, &MuForm::parse_scalar(&s1, &["u_x^2"]).unwrap()),
            Err(Error::NoPotentialFound(_))
        ));
        assert!(matches!(
            scalar_potential(&s1, &MuForm::parse_scalar(&s1, &["u"]).unwrap()),
            Err(Error::NoPotentialFound(_))
        ));
    }

    #[test]
    fn darboux_derivatives() {
        let s = JetSpec::new(&["x"], &["u", "v"], 1).unwrap();
        let id = GaugeFunction::new(ExprMatrix::identity(2), None).unwrap();
        assert!(darboux_derivative(&s, &id).unwrap().is_exact_zero());

        let g = GaugeFunction::new(m(&s, &[&["1", "u"], &["0", "1"]]), None).unwrap();
        let mu = darboux_derivative(&s, &g).unwrap();
        assert_eq!(*mu.component(0), m(&s, &[&["0", "u_x"], &["0", "0"]]));

        let s1 = JetSpec::new(&["x", "t"], &["u"], 1).unwrap();
        let phi = s1.parse("x*u + t").unwrap();
        let mu = darboux_derivative(&s1, &GaugeFunction::exp(&phi)).unwrap();
        for i in 0..2 {
            assert_eq!(mu.component(i).get(0, 0), &s1.total_derivative(&phi, i));
        }
        assert!(GaugeFunction::new(m(&s, &[&["2", "0"], &["0", "1"]]), None).is_err());
        let inv = m(&s, &[&["1/2", "0"], &["0", "1"]]);
        assert!(GaugeFunction::new(m(&s, &[&["2", "0"], &["0", "1"]]), Some(inv)).is_ok());
    }

    #[test]
    fn scalar_gauge_equivalence() {
        let s = JetSpec::new(&["x"], &["u"], 3).unwrap();
        let du = PointVectorField::parse(&s, &["0"], &["1"]).unwrap();
        for phi in ["0", "x", "u*x"] {
            let r = verify_gauge_equivalence_scalar(&du, &s.parse(phi).unwrap(), 3).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{phi}: {:?}", r.residuals);
        }
        let x = PointVectorField::parse(&s, &["x*u"], &["u^2 + x"]).unwrap();
        let r = verify_gauge_equivalence_scalar(&x, &s.parse("x^2*u - u").unwrap(), 3).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }
}
