//! One- and two-forms in the coordinate basis `{dx^i, du^a_J}`.

use std::collections::BTreeMap;
use std::fmt;

use super::{JetCoord, JetSpec, JetVectorField, VarKind};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::verdict::Verdict;

/// A basis one-form. All `dx^i` sort before all `du^a_J`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Basis {
    Dx(usize),
    Du(JetCoord),
}

impl Basis {
    pub fn name(&self, spec: &JetSpec) -> String {
        match self {
            Basis::Dx(i) => format!("d{}", spec.independent(*i)),
            Basis::Du(c) => format!("d{}", spec.coord_name(c)),
        }
    }

    fn pair(&self, y: &JetVectorField) -> Expr {
        match self {
            Basis::Dx(i) => y.xi(*i).clone(),
            Basis::Du(c) => y.psi(c),
        }
    }
}

fn insert_nonzero<K: Ord>(map: &mut BTreeMap<K, Expr>, k: K, v: Expr) {
    if v.is_exact_zero() {
        map.remove(&k);
    } else {
        map.insert(k, v);
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OneForm {
    coeffs: BTreeMap<Basis, Expr>,
}

impl OneForm {
    pub fn zero() -> Self {
        OneForm::default()
    }

    pub fn basis(b: Basis) -> Self {
        OneForm::zero().with(b, Expr::one())
    }

    pub fn dx(i: usize) -> Self {
        Self::basis(Basis::Dx(i))
    }

    pub fn du(c: JetCoord) -> Self {
        Self::basis(Basis::Du(c))
    }

    /// `λ_i dx^i`.
    pub fn horizontal(coeffs: &[Expr]) -> Self {
        let mut w = OneForm::zero();
        for (i, c) in coeffs.iter().enumerate() {
            w.add_term(Basis::Dx(i), c);
        }
        w
    }

    pub fn with(mut self, b: Basis, c: Expr) -> Self {
        insert_nonzero(&mut self.coeffs, b, c);
        self
    }

    pub fn coeff(&self, b: &Basis) -> Expr {
        self.coeffs.get(b).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &Expr)> {
        self.coeffs.iter()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Whether every coefficient vanishes.
    pub fn vanishes(&self) -> Verdict {
        Verdict::all_vanish(self.coeffs.values())
    }

    pub fn add_term(&mut self, b: Basis, c: &Expr) {
        let v = &self.coeff(&b) + c;
        insert_nonzero(&mut self.coeffs, b, v);
    }

    pub fn add(&self, other: &OneForm) -> OneForm {
        let mut out = self.clone();
        for (b, c) in &other.coeffs {
            out.add_term(b.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &OneForm) -> OneForm {
        self.add(&other.scale(&Expr::int(-1)))
    }

    pub fn scale(&self, f: &Expr) -> OneForm {
        let mut out = OneForm::zero();
        for (b, c) in &self.coeffs {
            insert_nonzero(&mut out.coeffs, b.clone(), c * f);
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> OneForm {
        let mut out = OneForm::zero();
        for (b, c) in &self.coeffs {
            insert_nonzero(&mut out.coeffs, b.clone(), f(c));
        }
        out
    }

    pub fn wedge(&self, other: &OneForm) -> TwoForm {
        let mut out = TwoForm::zero();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                out.add_wedge(a.clone(), b.clone(), &(ca * cb));
            }
        }
        out
    }

    pub fn display(&self, spec: &JetSpec) -> FormDisplay {
        FormDisplay {
            terms: self
                .coeffs
                .iter()
                .map(|(b, c)| (b.name(spec), c.clone()))
                .collect(),
        }
    }
}

/// A two-form stored on ordered pairs `(a, b)` with `a < b`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TwoForm {
    coeffs: BTreeMap<(Basis, Basis), Expr>,
}

impl TwoForm {
    pub fn zero() -> Self {
        TwoForm::default()
    }

    /// Adds `c · a ∧ b`, reordering the pair if needed.
    pub fn add_wedge(&mut self, a: Basis, b: Basis, c: &Expr) {
        use std::cmp::Ordering::*;
        let (key, c) = match a.cmp(&b) {
            Equal => return,
            Less => ((a, b), c.clone()),
            Greater => ((b, a), -c),
        };
        let v = &self.coeff(&key.0, &key.1) + &c;
        insert_nonzero(&mut self.coeffs, key, v);
    }

    /// Coefficient of `a ∧ b` (antisymmetric in the arguments).
    pub fn coeff(&self, a: &Basis, b: &Basis) -> Expr {
        if a < b {
            self.coeffs
                .get(&(a.clone(), b.clone()))
                .cloned()
                .unwrap_or_else(Expr::zero)
        } else if a > b {
            -self.coeff(b, a)
        } else {
            Expr::zero()
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Basis, Basis), &Expr)> {
        self.coeffs.iter()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &TwoForm) -> TwoForm {
        let mut out = self.clone();
        for ((a, b), c) in &other.coeffs {
            out.add_wedge(a.clone(), b.clone(), c);
        }
        out
    }

    pub fn scale(&self, f: &Expr) -> TwoForm {
        let mut out = TwoForm::zero();
        for (k, c) in &self.coeffs {
            insert_nonzero(&mut out.coeffs, k.clone(), c * f);
        }
        out
    }

    /// `Y ⌟ (a ∧ b) = (Y ⌟ a) b − (Y ⌟ b) a`.
    pub fn interior(&self, y: &JetVectorField) -> OneForm {
        let mut out = OneForm::zero();
        for ((a, b), c) in &self.coeffs {
            out.add_term(b.clone(), &(c * &a.pair(y)));
            out.add_term(a.clone(), &-(c * &b.pair(y)));
        }
        out
    }

    pub fn display(&self, spec: &JetSpec) -> FormDisplay {
        FormDisplay {
            terms: self
                .coeffs
                .iter()
                .map(|((a, b), c)| (format!("{}^{}", a.name(spec), b.name(spec)), c.clone()))
                .collect(),
        }
    }
}

pub struct FormDisplay {
    terms: Vec<(String, Expr)>,
}

impl fmt::Display for FormDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (basis, c)) in self.terms.iter().enumerate() {
            let neg = c.term_count() == 1 && c.to_string().starts_with('-');
            let mag = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if mag.is_one() {
                write!(f, "{basis}")?;
            } else if mag.term_count() == 1 {
                write!(f, "{mag}*{basis}")?;
            } else {
                write!(f, "({mag})*{basis}")?;
            }
        }
        Ok(())
    }
}

/// `df` over the coordinates present in `f`. Auxiliary symbols are treated
/// as constants.
pub fn differential(spec: &JetSpec, f: &Expr) -> OneForm {
    let mut out = OneForm::zero();
    for s in f.free_vars() {
        let b = match spec.classify(&s) {
            VarKind::Independent(i) => Basis::Dx(i),
            VarKind::Jet(c) => Basis::Du(c),
            VarKind::Auxiliary => continue,
        };
        out.add_term(b, &f.pdiff(&s));
    }
    out
}

/// `d(Σ c_β dβ) = Σ dc_β ∧ dβ`.
pub fn exterior_derivative(spec: &JetSpec, w: &OneForm) -> TwoForm {
    let mut out = TwoForm::zero();
    for (b, c) in w.terms() {
        for (a, dc) in differential(spec, c).terms() {
            out.add_wedge(a.clone(), b.clone(), dc);
        }
    }
    out
}

/// `Y ⌟ ω`. Components of `Y` above its order count as zero.
pub fn interior_product(y: &JetVectorField, w: &OneForm) -> Expr {
    w.terms().map(|(b, c)| c * &b.pair(y)).sum()
}

/// `𝓛_Y ω = Y ⌟ dω + d(Y ⌟ ω)`.
pub fn lie_derivative(spec: &JetSpec, y: &JetVectorField, w: &OneForm) -> OneForm {
    exterior_derivative(spec, w)
        .interior(y)
        .add(&differential(spec, &interior_product(y, w)))
}

/// `ϑ^a_J = du^a_J − u^a_{J,i} dx^i`, defined for `|J| <= n − 1`.
pub fn contact_form(spec: &JetSpec, c: &JetCoord) -> Result<OneForm> {
    if c.order() + 1 > spec.order() {
        return Err(Error::TopOrderContactForm {
            order: spec.order(),
        });
    }
    let mut w = OneForm::du(c.clone());
    for i in 0..spec.p() {
        w.add_term(Basis::Dx(i), &-spec.coord_expr(&c.incremented(i)));
    }
    Ok(w)
}

/// `ω = Σ c_J ϑ_J + Σ h_i dx^i + Σ r_K du_K` with `|J| <= n − 1` and
/// `|K| >= n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactDecomposition {
    pub contact: BTreeMap<JetCoord, Expr>,
    pub horizontal: Vec<Expr>,
    pub top: BTreeMap<JetCoord, Expr>,
}

impl ContactDecomposition {
    pub fn reconstruct(&self, spec: &JetSpec) -> OneForm {
        let mut w = OneForm::horizontal(&self.horizontal);
        for (c, k) in &self.contact {
            let theta = contact_form(spec, c).expect("contact part below top order");
            w = w.add(&theta.scale(k));
        }
        for (c, r) in &self.top {
            w.add_term(Basis::Du(c.clone()), r);
        }
        w
    }

    /// Everything that is not a contact component.
    pub fn residuals(&self) -> impl Iterator<Item = &Expr> {
        self.horizontal.iter().chain(self.top.values())
    }
}

/// Rewrites each `du^a_J` with `|J| <= n − 1` as `ϑ^a_J + u^a_{J,i} dx^i`.
pub fn contact_decomposition(spec: &JetSpec, w: &OneForm) -> ContactDecomposition {
    let mut horizontal = vec![Expr::zero(); spec.p()];
    let mut contact = BTreeMap::new();
    let mut top = BTreeMap::new();
    for (b, c) in w.terms() {
        match b {
            Basis::Dx(i) => horizontal[*i] = &horizontal[*i] + c,
            Basis::Du(jc) if jc.order() < spec.order() => {
                for (i, h) in horizontal.iter_mut().enumerate() {
                    *h = &*h + &(c * &spec.coord_expr(&jc.incremented(i)));
                }
                contact.insert(jc.clone(), c.clone());
            }
            Basis::Du(jc) => {
                top.insert(jc.clone(), c.clone());
            }
        }
    }
    ContactDecomposition {
        contact,
        horizontal,
        top,
    }
}

/// Membership in the module generated by the contact forms `ϑ^a_J`.
pub fn in_contact_module(spec: &JetSpec, w: &OneForm) -> Verdict {
    Verdict::all_vanish(contact_decomposition(spec, w).residuals())
}

/// Membership of a `q`-vector of one-forms in the module generated by the
/// vector contact forms over matrix functions; decided componentwise.
pub fn in_vector_contact_module(spec: &JetSpec, eta: &[OneForm]) -> Verdict {
    eta.iter().map(|w| in_contact_module(spec, w)).collect()
}

/// `D_i λ_j − D_j λ_i = 0` for all `i < j`.
pub fn d_closed(spec: &JetSpec, lambda: &[Expr]) -> Verdict {
    let mut v = Verdict::Holds;
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            let r = &spec.total_derivative(&lambda[j], i) - &spec.total_derivative(&lambda[i], j);
            v = v.and(Verdict::vanishes(&r));
        }
    }
    v
}
