use std::collections::BTreeMap;

use super::{JetCoord, JetSpec, VarKind};
use crate::expr::{Expr, Symbol};

/// `Y = ξ^i ∂_i + Ψ^a_J ∂_a^J` on `J^n M`. Components not stored are zero,
/// as are all components on coordinates of order above `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetVectorField {
    pub xi: Vec<Expr>,
    pub psi: BTreeMap<JetCoord, Expr>,
    pub order: usize,
}

impl JetVectorField {
    pub fn zero(p: usize, order: usize) -> Self {
        JetVectorField {
            xi: vec![Expr::zero(); p],
            psi: BTreeMap::new(),
            order,
        }
    }

    /// The coordinate field `∂/∂x^i`.
    pub fn d_x(p: usize, i: usize, order: usize) -> Self {
        let mut y = Self::zero(p, order);
        y.xi[i] = Expr::one();
        y
    }

    /// The coordinate field `∂/∂u^a_J`.
    pub fn d_u(p: usize, c: JetCoord, order: usize) -> Self {
        let mut y = Self::zero(p, order);
        y.set_psi(c, Expr::one());
        y
    }

    /// The order-`order` truncation of the total derivative `D_i`:
    /// `∂_i + Σ_{|J| <= order} u^a_{J,i} ∂_a^J`.
    pub fn total_derivative_field(spec: &JetSpec, i: usize, order: usize) -> Self {
        let mut y = Self::d_x(spec.p(), i, order);
        for c in spec.coordinates(order) {
            let next = spec.coord_expr(&c.incremented(i));
            y.set_psi(c, next);
        }
        y
    }

    pub fn p(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self, i: usize) -> &Expr {
        &self.xi[i]
    }

    pub fn psi(&self, c: &JetCoord) -> Expr {
        if c.order() > self.order {
            return Expr::zero();
        }
        self.psi.get(c).cloned().unwrap_or_else(Expr::zero)
    }

    pub fn set_psi(&mut self, c: JetCoord, e: Expr) {
        if e.is_exact_zero() {
            self.psi.remove(&c);
        } else {
            self.psi.insert(c, e);
        }
    }

    /// Every component `Ψ^a_J` with `|J| <= order`, zeros included.
    pub fn components(&self, spec: &JetSpec) -> Vec<(JetCoord, Expr)> {
        spec.coordinates(self.order)
            .into_iter()
            .map(|c| {
                let e = self.psi(&c);
                (c, e)
            })
            .collect()
    }

    /// `Y(e)`, applying `Y` as a first-order derivation.
    pub fn apply(&self, spec: &JetSpec, e: &Expr) -> Expr {
        e.derivation(&|s: &Symbol| match spec.classify(s) {
            VarKind::Independent(i) => Some(self.xi[i].clone()),
            VarKind::Jet(c) => self
                .psi
                .get(&c)
                .filter(|_| c.order() <= self.order)
                .cloned(),
            VarKind::Auxiliary => None,
        })
    }

    pub fn scale(&self, f: &Expr) -> Self {
        JetVectorField {
            xi: self.xi.iter().map(|x| x * f).collect(),
            psi: self
                .psi
                .iter()
                .map(|(c, e)| (c.clone(), e * f))
                .filter(|(_, e)| !e.is_exact_zero())
                .collect(),
            order: self.order,
        }
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let sign = Expr::int(sign);
        let order = self.order.max(other.order);
        let mut out = JetVectorField {
            xi: self
                .xi
                .iter()
                .zip(&other.xi)
                .map(|(a, b)| a + &(b * &sign))
                .collect(),
            psi: BTreeMap::new(),
            order,
        };
        let keys: std::collections::BTreeSet<&JetCoord> =
            self.psi.keys().chain(other.psi.keys()).collect();
        for c in keys {
            let v = &self.psi(c) + &(&other.psi(c) * &sign);
            out.set_psi(c.clone(), v);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    /// Renders `ξ` and `Ψ` components, skipping zeros.
    pub fn describe(&self, spec: &JetSpec) -> String {
        let mut parts = Vec::new();
        for (i, x) in self.xi.iter().enumerate() {
            if !x.is_exact_zero() {
                parts.push(format!("xi.{} = {x}", spec.independent(i)));
            }
        }
        for (c, e) in &self.psi {
            parts.push(format!("psi.{} = {e}", spec.coord_name(c)));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("; ")
        }
    }
}
