//! Standard, λ- and μ-prolongations of point vector fields.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::{d_closed, JetCoord, JetSpec, JetVectorField, MultiIndex};
use crate::matrix::ExprMatrix;
use crate::verdict::Verdict;

/// `X = ξ^i ∂_i + φ^a ∂_a`.
///
/// With `generalized` off, the coefficients may depend only on `x` and `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVectorField {
    spec: JetSpec,
    xi: Vec<Expr>,
    phi: Vec<Expr>,
    generalized: bool,
}

impl PointVectorField {
    pub fn new(spec: &JetSpec, xi: Vec<Expr>, phi: Vec<Expr>) -> Result<Self> {
        Self::build(spec, xi, phi, false)
    }

    /// A field whose coefficients may depend on derivative coordinates.
    pub fn generalized(spec: &JetSpec, xi: Vec<Expr>, phi: Vec<Expr>) -> Result<Self> {
        Self::build(spec, xi, phi, true)
    }

    fn build(spec: &JetSpec, xi: Vec<Expr>, phi: Vec<Expr>, generalized: bool) -> Result<Self> {
        if xi.len() != spec.p() || phi.len() != spec.q() {
            return Err(Error::Dimension(format!(
                "field needs {} xi and {} phi components, got {} and {}",
                spec.p(),
                spec.q(),
                xi.len(),
                phi.len()
            )));
        }
        let xi: Vec<Expr> = xi.iter().map(|e| spec.canonicalize_names(e)).collect();
        let phi: Vec<Expr> = phi.iter().map(|e| spec.canonicalize_names(e)).collect();
        if !generalized {
            if let Some(bad) = xi.iter().chain(&phi).find(|e| spec.has_derivatives(e)) {
                return Err(Error::NotPointField(bad.to_string()));
            }
        }
        Ok(PointVectorField {
            spec: spec.clone(),
            xi,
            phi,
            generalized,
        })
    }

    /// Parses coefficient strings in the coordinates of `spec`.
    pub fn parse(spec: &JetSpec, xi: &[&str], phi: &[&str]) -> Result<Self> {
        let xi = xi
            .iter()
            .map(|s| spec.parse(s))
            .collect::<Result<Vec<_>>>()?;
        let phi = phi
            .iter()
            .map(|s| spec.parse(s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(spec, xi, phi)
    }

    pub fn spec(&self) -> &JetSpec {
        &self.spec
    }

    pub fn xi(&self) -> &[Expr] {
        &self.xi
    }

    pub fn phi(&self) -> &[Expr] {
        &self.phi
    }

    pub fn is_generalized(&self) -> bool {
        self.generalized
    }

    /// Multiplies every coefficient by `f`; the result is generalized.
    pub fn scaled(&self, f: &Expr) -> PointVectorField {
        PointVectorField {
            spec: self.spec.clone(),
            xi: self.xi.iter().map(|e| e * f).collect(),
            phi: self.phi.iter().map(|e| e * f).collect(),
            generalized: true,
        }
    }

    /// `Q^a = φ^a − u^a_i ξ^i`.
    pub fn characteristic(&self) -> Vec<Expr> {
        let s = &self.spec;
        (0..s.q())
            .map(|a| {
                let mut q = self.phi[a].clone();
                for i in 0..s.p() {
                    q = &q - &(&s.coord_expr(&s.base_coord(a).incremented(i)) * &self.xi[i]);
                }
                q
            })
            .collect()
    }
}

/// `μ = Λ_i dx^i` with each `Λ_i` a `q×q` matrix; `q = 1` is the scalar
/// form `λ_i dx^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MuForm {
    components: Vec<ExprMatrix>,
}

impl MuForm {
    pub fn zero(p: usize, q: usize) -> Self {
        MuForm {
            components: vec![ExprMatrix::zero(q); p],
        }
    }

    pub fn scalar(lambda: Vec<Expr>) -> Self {
        MuForm {
            components: lambda.into_iter().map(ExprMatrix::scalar).collect(),
        }
    }

    pub fn matrix(components: Vec<ExprMatrix>) -> Result<Self> {
        let q = components.first().map(ExprMatrix::size).unwrap_or(0);
        if q == 0 || components.iter().any(|m| m.size() != q) {
            return Err(Error::Dimension(
                "mu components must be nonempty square matrices of one size".into(),
            ));
        }
        Ok(MuForm { components })
    }

    /// Parses scalar components in the coordinates of `spec`.
    pub fn parse_scalar(spec: &JetSpec, lambda: &[&str]) -> Result<Self> {
        let l = lambda
            .iter()
            .map(|s| spec.parse(s))
            .collect::<Result<Vec<_>>>()?;
        let mu = MuForm::scalar(l);
        mu.check_fits(spec)?;
        Ok(mu)
    }

    pub fn p(&self) -> usize {
        self.components.len()
    }

    pub fn q(&self) -> usize {
        self.components[0].size()
    }

    pub fn is_scalar(&self) -> bool {
        self.q() == 1
    }

    pub fn component(&self, i: usize) -> &ExprMatrix {
        &self.components[i]
    }

    pub fn components(&self) -> &[ExprMatrix] {
        &self.components
    }

    /// `λ_i` when `q = 1`.
    pub fn scalar_components(&self) -> Option<Vec<Expr>> {
        self.is_scalar().then(|| {
            self.components
                .iter()
                .map(|m| m.get(0, 0).clone())
                .collect()
        })
    }

    pub fn is_exact_zero(&self) -> bool {
        self.components.iter().all(ExprMatrix::is_exact_zero)
    }

    pub fn check_fits(&self, spec: &JetSpec) -> Result<()> {
        if self.p() != spec.p() || self.q() != spec.q() {
            return Err(Error::Dimension(format!(
                "mu has p = {}, q = {} but the jet space has p = {}, q = {}",
                self.p(),
                self.q(),
                spec.p(),
                spec.q()
            )));
        }
        Ok(())
    }

    /// `Dμ = 0`; only defined for scalar forms.
    pub fn d_closed(&self, spec: &JetSpec) -> Result<Verdict> {
        let l = self.scalar_components().ok_or_else(|| {
            Error::Dimension("d_closed needs a scalar mu; use the Maurer-Cartan check".into())
        })?;
        Ok(d_closed(spec, &l))
    }

    pub fn nabla<'a>(&'a self, spec: &'a JetSpec, i: usize) -> NablaOperator<'a> {
        NablaOperator { spec, mu: self, i }
    }
}

/// `∇_i = I D_i + Λ_i` acting on `q`-vectors.
pub struct NablaOperator<'a> {
    spec: &'a JetSpec,
    mu: &'a MuForm,
    i: usize,
}

impl NablaOperator<'_> {
    pub fn apply(&self, v: &[Expr]) -> Vec<Expr> {
        let lv = self.mu.component(self.i).mul_vec(v);
        v.iter()
            .zip(lv)
            .map(|(e, l)| &self.spec.total_derivative(e, self.i) + &l)
            .collect()
    }

    /// `(∇_i)^a_b` applied to a scalar: `δ^a_b D_i f + (Λ_i)^a_b f`.
    pub fn entry(&self, a: usize, b: usize, f: &Expr) -> Expr {
        let l = self.mu.component(self.i).get(a, b) * f;
        if a == b {
            &self.spec.total_derivative(f, self.i) + &l
        } else {
            l
        }
    }
}

/// Whether μ-prolongations verify that the result does not depend on the
/// order in which multi-index slots are incremented.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PathCheck {
    /// Follow the canonical path only; the caller vouches for compatibility.
    #[default]
    Trust,
    /// When compatibility cannot be confirmed, compare every one-step route
    /// to every coefficient and fail on disagreement.
    Verify,
}

/// `Ψ^a_J` stored per multi-index as a `q`-vector.
type Table = BTreeMap<MultiIndex, Vec<Expr>>;

/// Fills `Ψ_K` for `0 < |K| <= n` along the canonical path from `Ψ_∅ = φ`.
fn build_table<F>(spec: &JetSpec, phi: &[Expr], n: usize, step: F) -> Table
where
    F: Fn(&Table, &MultiIndex, usize) -> Vec<Expr>,
{
    let mut table = Table::new();
    table.insert(spec.empty_index(), phi.to_vec());
    for k in spec.multi_indices_upto(n).into_iter().skip(1) {
        let i = k.last_slot().expect("nonempty index");
        let pred = k.decremented(i).expect("slot is nonzero");
        let v = step(&table, &pred, i);
        table.insert(k, v);
    }
    table
}

/// Compares each `Ψ_K` with every one-step route into it.
fn path_mismatches<F>(spec: &JetSpec, table: &Table, with_canonical: bool, step: F) -> Vec<String>
where
    F: Fn(&Table, &MultiIndex, usize) -> Vec<Expr>,
{
    let mut bad = Vec::new();
    for (k, psi) in table {
        let last = k.last_slot();
        for i in 0..spec.p() {
            if (!with_canonical && Some(i) == last) || k.get(i) == 0 {
                continue;
            }
            let pred = k.decremented(i).unwrap();
            let alt = step(table, &pred, i);
            for (a, (x, y)) in psi.iter().zip(&alt).enumerate() {
                if !Verdict::vanishes(&(x - y)).holds() {
                    bad.push(format!(
                        "{} via {}: {} vs {}",
                        spec.coord_name(&JetCoord::new(a, k.clone())),
                        spec.independent(i),
                        x,
                        y
                    ));
                }
            }
        }
    }
    bad
}

fn table_to_field(spec: &JetSpec, xi: &[Expr], table: Table, n: usize) -> JetVectorField {
    let mut y = JetVectorField::zero(spec.p(), n);
    y.xi = xi.to_vec();
    for (k, v) in table {
        for (a, e) in v.into_iter().enumerate() {
            y.set_psi(JetCoord::new(a, k.clone()), e);
        }
    }
    y
}

fn field_to_table(spec: &JetSpec, y: &JetVectorField) -> Table {
    spec.multi_indices_upto(y.order)
        .into_iter()
        .map(|k| {
            let v = (0..spec.q())
                .map(|a| y.psi(&JetCoord::new(a, k.clone())))
                .collect();
            (k, v)
        })
        .collect()
}

fn u_at(spec: &JetSpec, a: usize, j: &MultiIndex, m: usize) -> Expr {
    spec.coord_expr(&JetCoord::new(a, j.incremented(m)))
}

fn require_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidJetSpec(
            "prolongation order must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `Ψ^a_{J,i} = D_i Ψ^a_J − u^a_{J,m} D_i ξ^m`.
pub fn prolong_standard(x: &PointVectorField, n: usize) -> Result<JetVectorField> {
    require_order(n)?;
    let s = x.spec();
    let dxi: Vec<Vec<Expr>> = (0..s.p())
        .map(|i| x.xi().iter().map(|e| s.total_derivative(e, i)).collect())
        .collect();
    let step = |t: &Table, j: &MultiIndex, i: usize| -> Vec<Expr> {
        t[j].iter()
            .enumerate()
            .map(|(a, psi)| {
                let mut out = s.total_derivative(psi, i);
                for (m, d) in dxi[i].iter().enumerate() {
                    if !d.is_exact_zero() {
                        out = &out - &(&u_at(s, a, j, m) * d);
                    }
                }
                out
            })
            .collect()
    };
    Ok(table_to_field(
        s,
        x.xi(),
        build_table(s, x.phi(), n, step),
        n,
    ))
}

/// `Ψ_{k+1} = (D_x + λ) Ψ_k − u_{k+1} (D_x + λ) ξ` for scalar ODEs.
pub fn prolong_lambda(x: &PointVectorField, lambda: &Expr, n: usize) -> Result<JetVectorField> {
    require_order(n)?;
    let s = x.spec();
    if s.p() != 1 || s.q() != 1 {
        return Err(Error::NotScalarOde { p: s.p(), q: s.q() });
    }
    let lambda = s.canonicalize_names(lambda);
    let dl = |e: &Expr| &s.total_derivative(e, 0) + &(&lambda * e);
    let dl_xi = dl(&x.xi()[0]);
    let mut y = JetVectorField::zero(1, n);
    y.xi = x.xi().to_vec();
    let mut psi = x.phi()[0].clone();
    y.set_psi(s.base_coord(0), psi.clone());
    let mut coord = s.base_coord(0);
    for _ in 0..n {
        let next = coord.incremented(0);
        psi = &dl(&psi) - &(&s.coord_expr(&next) * &dl_xi);
        y.set_psi(next.clone(), psi.clone());
        coord = next;
    }
    Ok(y)
}

fn scalar_mu(s: &JetSpec, mu: &MuForm) -> Result<Vec<Expr>> {
    mu.check_fits(s)?;
    Ok(mu
        .scalar_components()
        .expect("q = 1 checked by check_fits")
        .iter()
        .map(|e| s.canonicalize_names(e))
        .collect())
}

/// `Ψ_{J,i} = (D_i + λ_i) Ψ_J − u_{J,m} (D_i + λ_i) ξ^m` for `q = 1`.
pub fn prolong_mu_scalar(
    x: &PointVectorField,
    mu: &MuForm,
    n: usize,
    check: PathCheck,
) -> Result<JetVectorField> {
    require_order(n)?;
    let s = x.spec();
    let lambda = scalar_mu(s, mu)?;
    let dl = |e: &Expr, i: usize| &s.total_derivative(e, i) + &(&lambda[i] * e);
    let dl_xi: Vec<Vec<Expr>> = (0..s.p())
        .map(|i| x.xi().iter().map(|e| dl(e, i)).collect())
        .collect();
    let step = |t: &Table, j: &MultiIndex, i: usize| -> Vec<Expr> {
        let mut out = dl(&t[j][0], i);
        for (m, d) in dl_xi[i].iter().enumerate() {
            if !d.is_exact_zero() {
                out = &out - &(&u_at(s, 0, j, m) * d);
            }
        }
        vec![out]
    };
    let table = build_table(s, x.phi(), n, step);
    if check == PathCheck::Verify && !d_closed(s, &lambda).holds() {
        let bad = path_mismatches(s, &table, false, step);
        if !bad.is_empty() {
            return Err(Error::InconsistentMu(bad.join("; ")));
        }
    }
    Ok(table_to_field(s, x.xi(), table, n))
}

/// `Ψ^a_{J,i} = (∇_i)^a_b Ψ^b_J − u^b_{J,m} (∇_i)^a_b ξ^m` with
/// `∇_i = I D_i + Λ_i`.
pub fn prolong_mu_vector(
    x: &PointVectorField,
    mu: &MuForm,
    n: usize,
    check: PathCheck,
) -> Result<JetVectorField> {
    require_order(n)?;
    let s = x.spec();
    mu.check_fits(s)?;
    let mu = MuForm {
        components: mu
            .components()
            .iter()
            .map(|m| m.map(|e| s.canonicalize_names(e)))
            .collect(),
    };
    let q = s.q();
    let step = |t: &Table, j: &MultiIndex, i: usize| -> Vec<Expr> {
        let nabla = mu.nabla(s, i);
        let mut out = nabla.apply(&t[j]);
        for (a, o) in out.iter_mut().enumerate() {
            for b in 0..q {
                for m in 0..s.p() {
                    let nx = nabla.entry(a, b, &x.xi()[m]);
                    if !nx.is_exact_zero() {
                        *o = &*o - &(&u_at(s, b, j, m) * &nx);
                    }
                }
            }
        }
        out
    };
    let table = build_table(s, x.phi(), n, step);
    if check == PathCheck::Verify && s.p() > 1 {
        let flat = crate::compat::maurer_cartan_check(s, &mu)?.verdict;
        if !flat.holds() {
            let bad = path_mismatches(s, &table, false, step);
            if !bad.is_empty() {
                return Err(Error::InconsistentMu(bad.join("; ")));
            }
        }
    }
    Ok(table_to_field(s, x.xi(), table, n))
}

/// Dispatches to the scalar or vector μ-prolongation by the size of `μ`.
pub fn prolong_mu(
    x: &PointVectorField,
    mu: &MuForm,
    n: usize,
    check: PathCheck,
) -> Result<JetVectorField> {
    if mu.is_scalar() {
        prolong_mu_scalar(x, mu, n, check)
    } else {
        prolong_mu_vector(x, mu, n, check)
    }
}

/// Lists every coefficient for which some one-step route disagrees with the
/// canonical value.
pub fn verify_path_independence(
    x: &PointVectorField,
    mu: &MuForm,
    n: usize,
) -> Result<Vec<String>> {
    let s = x.spec();
    let y = prolong_mu(x, mu, n, PathCheck::Trust)?;
    let table = field_to_table(s, &y);
    Ok(path_mismatches(
        s,
        &table,
        true,
        |t: &Table, j: &MultiIndex, i: usize| one_step(x, mu, &t[j], j, i),
    ))
}

/// One step of the vector μ-recursion, shared by path verification.
fn one_step(
    x: &PointVectorField,
    mu: &MuForm,
    psi: &[Expr],
    j: &MultiIndex,
    i: usize,
) -> Vec<Expr> {
    let s = x.spec();
    let nabla = mu.nabla(s, i);
    let mut out = nabla.apply(psi);
    for (a, o) in out.iter_mut().enumerate() {
        for b in 0..s.q() {
            for m in 0..s.p() {
                *o = &*o - &(&u_at(s, b, j, m) * &nabla.entry(a, b, &x.xi()[m]));
            }
        }
    }
    out
}

/// `F^a_J = Ψ^a_J(μ) − Φ^a_J` together with, for scalar `μ`, the residuals
/// between the subtraction and the recursion
/// `F_{J,i} = (D_i + λ_i) F_J + λ_i D_J Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceTerms {
    pub terms: BTreeMap<MultiIndex, Vec<Expr>>,
    pub recursion_residuals: Option<BTreeMap<MultiIndex, Expr>>,
}

impl DifferenceTerms {
    pub fn recursion_verdict(&self) -> Option<Verdict> {
        self.recursion_residuals
            .as_ref()
            .map(|r| Verdict::all_vanish(r.values()))
    }
}

pub fn difference_terms(x: &PointVectorField, mu: &MuForm, n: usize) -> Result<DifferenceTerms> {
    let s = x.spec();
    let deformed = field_to_table(s, &prolong_mu(x, mu, n, PathCheck::Trust)?);
    let standard = field_to_table(s, &prolong_standard(x, n)?);
    let terms: BTreeMap<MultiIndex, Vec<Expr>> = deformed
        .iter()
        .map(|(k, v)| {
            let f = v.iter().zip(&standard[k]).map(|(a, b)| a - b).collect();
            (k.clone(), f)
        })
        .collect();
    let recursion_residuals = match mu.scalar_components() {
        None => None,
        Some(lambda) => {
            let lambda: Vec<Expr> = lambda.iter().map(|e| s.canonicalize_names(e)).collect();
            let q = x.characteristic().remove(0);
            let mut rec: BTreeMap<MultiIndex, Expr> = BTreeMap::new();
            rec.insert(s.empty_index(), Expr::zero());
            let mut residuals = BTreeMap::new();
            for k in s.multi_indices_upto(n).into_iter().skip(1) {
                let i = k.last_slot().unwrap();
                let j = k.decremented(i).unwrap();
                let fj = &rec[&j];
                let next = &(&s.total_derivative(fj, i) + &(&lambda[i] * fj))
                    + &(&lambda[i] * &s.total_derivative_multi(&q, &j));
                residuals.insert(k.clone(), &terms[&k][0] - &next);
                rec.insert(k, next);
            }
            Some(residuals)
        }
    };
    Ok(DifferenceTerms {
        terms,
        recursion_residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode(n: usize) -> JetSpec {
        JetSpec::new(&["x"], &["u"], n).unwrap()
    }

    fn psi(s: &JetSpec, y: &JetVectorField, name: &str) -> String {
        y.psi(&s.jet_coord(&name.into()).unwrap()).to_string()
    }

    #[test]
    fn standard_scaling_field() {
        let s = ode(2);
        let x = PointVectorField::parse(&s, &["x"], &["u"]).unwrap();
        let y = prolong_standard(&x, 2).unwrap();
        assert_eq!(psi(&s, &y, "u"), "u");
        assert_eq!(psi(&s, &y, "u_x"), "0");
        assert_eq!(psi(&s, &y, "u_xx"), "-u_xx");
    }

    #[test]
    fn standard_translation_and_vertical() {
        let s = JetSpec::new(&["x", "t"], &["u", "v"], 3).unwrap();
        let x = PointVectorField::parse(&s, &["1", "0"], &["0", "0"]).unwrap();
        assert!(prolong_standard(&x, 3).unwrap().psi.is_empty());

        let s = ode(1);
        let x = PointVectorField::parse(&s, &["0"], &["x*u^2 + sin(x)"]).unwrap();
        let y = prolong_standard(&x, 1).unwrap();
        let expect = s.parse("u^2 + cos(x) + 2*x*u*u_x").unwrap();
        assert_eq!(y.psi(&s.jet_coord(&"u_x".into()).unwrap()), expect);
    }

    #[test]
    fn lambda_prolongations() {
        let s = ode(2);
        let x = PointVectorField::parse(&s, &["0"], &["1"]).unwrap();
        let y = prolong_lambda(&x, &s.parse("u").unwrap(), 2).unwrap();
        assert_eq!(psi(&s, &y, "u"), "1");
        assert_eq!(psi(&s, &y, "u_x"), "u");
        assert_eq!(psi(&s, &y, "u_xx"), "u_x + u^2");

        let y = prolong_lambda(&x, &s.parse("x").unwrap(), 2).unwrap();
        assert_eq!(psi(&s, &y, "u_xx"), "1 + x^2");

        let x2 = PointVectorField::parse(&s, &["x"], &["u"]).unwrap();
        assert_eq!(
            prolong_lambda(&x2, &Expr::zero(), 2).unwrap(),
            prolong_standard(&x2, 2).unwrap()
        );

        let pde = JetSpec::new(&["x", "t"], &["u"], 2).unwrap();
        let x3 = PointVectorField::parse(&pde, &["0", "0"], &["1"]).unwrap();
        assert_eq!(
            prolong_lambda(&x3, &Expr::zero(), 2),
            Err(Error::NotScalarOde { p: 2, q: 1 })
        );
    }

    #[test]
    fn scalar_mu_constant_form() {
        let s = JetSpec::new(&["x", "t"], &["u"], 2).unwrap();
        let x = PointVectorField::parse(&s, &["0", "0"], &["1"]).unwrap();
        let mu = MuForm::parse_scalar(&s, &["c", "0"]).unwrap();
        let y = prolong_mu_scalar(&x, &mu, 2, PathCheck::Verify).unwrap();
        assert_eq!(psi(&s, &y, "u_x"), "c");
        assert_eq!(psi(&s, &y, "u_t"), "0");
        assert_eq!(psi(&s, &y, "u_xx"), "c^2");
        assert_eq!(psi(&s, &y, "u_xt"), "0");
        assert_eq!(psi(&s, &y, "u_tt"), "0");
        assert!(verify_path_independence(&x, &mu, 2).unwrap().is_empty());
    }

    #[test]
    fn inconsistent_mu_is_detected() {
        let s = JetSpec::new(&["x", "t"], &["u"], 2).unwrap();
        let x = PointVectorField::parse(&s, &["0", "0"], &["1"]).unwrap();
        let mu = MuForm::parse_scalar(&s, &["u", "0"]).unwrap();
        assert_eq!(mu.d_closed(&s).unwrap(), Verdict::Fails);
        assert!(matches!(
            prolong_mu_scalar(&x, &mu, 2, PathCheck::Verify),
            Err(Error::InconsistentMu(_))
        ));
        assert!(prolong_mu_scalar(&x, &mu, 2, PathCheck::Trust).is_ok());
        assert!(!verify_path_independence(&x, &mu, 2).unwrap().is_empty());
    }

    #[test]
    fn scalar_mu_reduces_to_lambda_at_p1() {
        let s = ode(3);
        let x = PointVectorField::parse(&s, &["x*u"], &["u^2 + x"]).unwrap();
        let l = s.parse("u*u_x + x").unwrap();
        let mu = MuForm::scalar(vec![l.clone()]);
        assert_eq!(
            prolong_mu_scalar(&x, &mu, 3, PathCheck::Trust).unwrap(),
            prolong_lambda(&x, &l, 3).unwrap()
        );
        assert_eq!(
            prolong_mu_vector(&x, &mu, 3, PathCheck::Trust).unwrap(),
            prolong_lambda(&x, &l, 3).unwrap()
        );
    }

    #[test]
    fn vector_mu_diagonal() {
        let s = JetSpec::new(&["x"], &["u", "v"], 1).unwrap();
        let x = PointVectorField::parse(&s, &["0"], &["1", "0"]).unwrap();
        let lx = ExprMatrix::from_rows(vec![
            vec![Expr::var("c"), Expr::zero()],
            vec![Expr::zero(), Expr::zero()],
        ])
        .unwrap();
        let mu = MuForm::matrix(vec![lx]).unwrap();
        let y = prolong_mu_vector(&x, &mu, 1, PathCheck::Verify).unwrap();
        assert_eq!(psi(&s, &y, "u_x"), "c");
        assert_eq!(psi(&s, &y, "v_x"), "0");
        let zero = MuForm::zero(1, 2);
        assert_eq!(
            prolong_mu_vector(&x, &zero, 1, PathCheck::Verify).unwrap(),
            prolong_standard(&x, 1).unwrap()
        );
    }

    #[test]
    fn difference_terms_for_vertical_field() {
        let s = ode(3);
        let x = PointVectorField::parse(&s, &["0"], &["1"]).unwrap();
        let mu = MuForm::parse_scalar(&s, &["u"]).unwrap();
        let d = difference_terms(&x, &mu, 3).unwrap();
        assert_eq!(d.terms[&s.unit_index(0)], vec![s.parse("u").unwrap()]);
        assert_eq!(d.terms[&s.empty_index()], vec![Expr::zero()]);
        assert_eq!(d.recursion_verdict(), Some(Verdict::Holds));

        let zero = difference_terms(&x, &MuForm::zero(1, 1), 3).unwrap();
        assert!(zero.terms.values().flatten().all(Expr::is_exact_zero));
    }

    #[test]
    fn point_field_validation() {
        let s = ode(2);
        assert!(matches!(
            PointVectorField::parse(&s, &["u_x"], &["0"]),
            Err(Error::NotPointField(_))
        ));
        assert!(PointVectorField::generalized(
            &s,
            vec![s.parse("u_x").unwrap()],
            vec![Expr::zero()]
        )
        .is_ok());
        assert!(matches!(
            PointVectorField::parse(&s, &["0", "1"], &["0"]),
            Err(Error::Dimension(_))
        ));
        let x = PointVectorField::parse(&s, &["x"], &["u"]).unwrap();
        assert_eq!(x.characteristic(), vec![s.parse("u - x*u_x").unwrap()]);
    }
}
