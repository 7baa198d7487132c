//! Equations in solved form, restriction to the solution manifold, and
//! symmetry verdicts.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, Symbol};
use crate::jet::{contact_form, interior_product, JetCoord, JetSpec, JetVectorField, MultiIndex};
use crate::prolong::{
    difference_terms, prolong_lambda, prolong_mu, prolong_standard, MuForm, PathCheck,
    PointVectorField,
};
use crate::verdict::Verdict;

/// A determined system `u^a_{J*_a} = f^a`, one equation per dependent
/// variable.
#[derive(Clone, Debug, PartialEq)]
pub struct DifferentialEquation {
    spec: JetSpec,
    equations: Vec<(JetCoord, Expr)>,
}

fn is_derivative_of(c: &JetCoord, lead: &JetCoord) -> bool {
    c.dep == lead.dep && c.index.checked_sub(&lead.index).is_some()
}

impl DifferentialEquation {
    /// Validates that every dependent variable has exactly one equation,
    /// leading orders do not exceed the jet order, and no right-hand side
    /// contains a leading coordinate or one of its derivatives.
    pub fn new(spec: &JetSpec, equations: Vec<(JetCoord, Expr)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (lead, _) in &equations {
            if lead.dep >= spec.q() || lead.index.p() != spec.p() {
                return Err(Error::InvalidEquation(
                    "leading coordinate outside the jet space".into(),
                ));
            }
            if lead.order() > spec.order() {
                return Err(Error::InvalidEquation(format!(
                    "leading coordinate {} exceeds the jet order {}",
                    spec.coord_name(lead),
                    spec.order()
                )));
            }
            if !seen.insert(lead.dep) {
                return Err(Error::InvalidEquation(format!(
                    "two equations for {}",
                    spec.dependent(lead.dep)
                )));
            }
        }
        if seen.len() != spec.q() {
            return Err(Error::InvalidEquation(format!(
                "need one equation per dependent variable ({} given, {} required)",
                seen.len(),
                spec.q()
            )));
        }
        let equations: Vec<(JetCoord, Expr)> = equations
            .into_iter()
            .map(|(l, f)| (l, spec.canonicalize_names(&f)))
            .collect();
        for (lead, f) in &equations {
            for s in f.free_vars() {
                if let Some(c) = spec.jet_coord(&s) {
                    if let Some((l, _)) = equations.iter().find(|(l, _)| is_derivative_of(&c, l)) {
                        return Err(Error::InvalidEquation(format!(
                            "right-hand side of {} contains {}, a derivative of the leading coordinate {}",
                            spec.coord_name(lead),
                            s,
                            spec.coord_name(l)
                        )));
                    }
                }
            }
        }
        Ok(DifferentialEquation {
            spec: spec.clone(),
            equations,
        })
    }

    /// Parses `(leading, rhs)` pairs such as `("u_xx", "(1 + x^2)*u")`.
    pub fn parse(spec: &JetSpec, equations: &[(&str, &str)]) -> Result<Self> {
        let mut eqs = Vec::new();
        for (lhs, rhs) in equations {
            let lead = spec.jet_coord(&Symbol::new(lhs.trim())).ok_or_else(|| {
                Error::InvalidEquation(format!("`{}` is not a jet coordinate", lhs.trim()))
            })?;
            eqs.push((lead, spec.parse(rhs)?));
        }
        Self::new(spec, eqs)
    }

    pub fn spec(&self) -> &JetSpec {
        &self.spec
    }

    pub fn equations(&self) -> &[(JetCoord, Expr)] {
        &self.equations
    }

    /// `u^a_{J*} − f^a` for each equation.
    pub fn residual_functions(&self) -> Vec<Expr> {
        self.equations
            .iter()
            .map(|(l, f)| &self.spec.coord_expr(l) - f)
            .collect()
    }

    fn leading_for(&self, c: &JetCoord) -> Option<(&JetCoord, MultiIndex)> {
        self.equations.iter().find_map(|(l, _)| {
            c.index
                .checked_sub(&l.index)
                .filter(|_| c.dep == l.dep)
                .map(|k| (l, k))
        })
    }

    fn rhs(&self, lead: &JetCoord) -> &Expr {
        &self.equations.iter().find(|(l, _)| l == lead).unwrap().1
    }

    /// Replaces every leading coordinate and derivative of one by its value
    /// on the solution manifold. `depth` bounds how many derivatives of a
    /// leading coordinate may be taken; `None` picks a bound from the orders
    /// involved.
    pub fn restrict(&self, e: &Expr, depth: Option<usize>) -> Result<Expr> {
        let e = self.spec.canonicalize_names(e);
        let depth = depth.unwrap_or_else(|| {
            let min_lead = self
                .equations
                .iter()
                .map(|(l, _)| l.order())
                .min()
                .unwrap_or(0);
            let max_f = self
                .equations
                .iter()
                .map(|(_, f)| self.spec.order_of(f))
                .max()
                .unwrap_or(0);
            self.spec.order_of(&e).saturating_sub(min_lead) * max_f.max(1)
        });
        let r = Restrictor {
            eq: self,
            depth,
            memo: RefCell::new(HashMap::new()),
            active: RefCell::new(BTreeSet::new()),
        };
        r.reduce(&e)
    }
}

struct Restrictor<'a> {
    eq: &'a DifferentialEquation,
    depth: usize,
    memo: RefCell<HashMap<JetCoord, Expr>>,
    active: RefCell<BTreeSet<JetCoord>>,
}

impl Restrictor<'_> {
    fn reduce(&self, e: &Expr) -> Result<Expr> {
        let spec = &self.eq.spec;
        let mut bindings = BTreeMap::new();
        for s in e.free_vars() {
            if let Some(c) = spec.jet_coord(&s) {
                if self.eq.leading_for(&c).is_some() {
                    bindings.insert(s, self.value(&c)?);
                }
            }
        }
        Ok(e.substitute_unchecked(&bindings))
    }

    /// Reduced value of `u^a_{J*+K}`, built as `D_i` of the value at
    /// `J* + K − e_i` along the canonical path.
    fn value(&self, c: &JetCoord) -> Result<Expr> {
        if let Some(v) = self.memo.borrow().get(c) {
            return Ok(v.clone());
        }
        let spec = &self.eq.spec;
        let (lead, k) = self.eq.leading_for(c).expect("caller checked");
        if k.order() > self.depth {
            return Err(Error::SubstitutionClosure(format!(
                "{} needs {} derivatives of {}, beyond the depth {}",
                spec.coord_name(c),
                k.order(),
                spec.coord_name(lead),
                self.depth
            )));
        }
        if !self.active.borrow_mut().insert(c.clone()) {
            return Err(Error::SubstitutionClosure(format!(
                "{} depends on itself through the equations",
                spec.coord_name(c)
            )));
        }
        let raw = match k.last_slot() {
            None => self.eq.rhs(lead).clone(),
            Some(i) => {
                let pred = JetCoord::new(c.dep, c.index.decremented(i).unwrap());
                spec.total_derivative(&self.value(&pred)?, i)
            }
        };
        let v = self.reduce(&raw)?;
        self.active.borrow_mut().remove(c);
        self.memo.borrow_mut().insert(c.clone(), v.clone());
        Ok(v)
    }
}

/// `Δ`-restriction as a free function.
pub fn restrict_to_solution_manifold(
    e: &Expr,
    eq: &DifferentialEquation,
    depth: Option<usize>,
) -> Result<Expr> {
    eq.restrict(e, depth)
}

/// `Q^a = φ^a − u^a_i ξ^i`.
pub fn characteristic(x: &PointVectorField) -> Vec<Expr> {
    x.characteristic()
}

/// `D_J Q^a` for `|J| < n`, grouped by multi-index then dependent index.
pub fn invariant_set_relations(x: &PointVectorField, n: usize) -> Vec<Expr> {
    let s = x.spec();
    let q = x.characteristic();
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for j in s.multi_indices_upto(n - 1) {
        for qa in &q {
            out.push(s.total_derivative_multi(qa, &j));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymmetryKind {
    Standard,
    Lambda(Expr),
    Mu(MuForm),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryCheck {
    /// `Y(u^a_{J*} − f^a)` restricted to the solution manifold, per equation.
    pub residuals: Vec<Expr>,
    pub verdict: Verdict,
    pub prolongation: JetVectorField,
}

/// Prolongs `X` to the order of `Δ` by the given rule and checks tangency to
/// the solution manifold.
pub fn check_symmetry(
    x: &PointVectorField,
    eq: &DifferentialEquation,
    kind: &SymmetryKind,
) -> Result<SymmetryCheck> {
    let n = eq.spec().order();
    let y = match kind {
        SymmetryKind::Standard => prolong_standard(x, n)?,
        SymmetryKind::Lambda(l) => prolong_lambda(x, l, n)?,
        SymmetryKind::Mu(mu) => prolong_mu(x, mu, n, PathCheck::Verify)?,
    };
    let residuals = eq
        .residual_functions()
        .iter()
        .map(|r| eq.restrict(&y.apply(eq.spec(), r), None))
        .collect::<Result<Vec<_>>>()?;
    Ok(SymmetryCheck {
        verdict: Verdict::all_vanish(&residuals),
        residuals,
        prolongation: y,
    })
}

/// `[Y, D̂_i]` on the coordinates up to the order of `Y`, where `D̂_i` is the
/// total derivative truncated one order above `Y`. With this ordering a
/// λ-prolongation satisfies `[Y, D̂_x] ⌟ ϑ = λ (Y ⌟ ϑ)`.
pub fn commutator_with_total_derivative(
    spec: &JetSpec,
    y: &JetVectorField,
    i: usize,
) -> JetVectorField {
    let mut out = JetVectorField::zero(spec.p(), y.order);
    for (j, xi) in y.xi.iter().enumerate() {
        out.xi[j] = -spec.total_derivative(xi, i);
    }
    for c in spec.coordinates(y.order) {
        let v = &y.psi(&c.incremented(i)) - &spec.total_derivative(&y.psi(&c), i);
        out.set_psi(c, v);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum CharacterizationKind {
    Standard,
    /// Scalar ODEs only.
    Lambda(Expr),
}

/// Checks `[Y, D̂_i] ⌟ ϑ^a_J = λ_i (Y ⌟ ϑ^a_J)` for every contact generator
/// with `|J| <= n − 1`, with `λ = 0` for the standard kind.
pub fn characterization_check(
    spec: &JetSpec,
    y: &JetVectorField,
    kind: &CharacterizationKind,
) -> Result<(Verdict, Vec<Expr>)> {
    let lambda = match kind {
        CharacterizationKind::Standard => vec![Expr::zero(); spec.p()],
        CharacterizationKind::Lambda(l) => {
            if spec.p() != 1 || spec.q() != 1 {
                return Err(Error::NotScalarOde {
                    p: spec.p(),
                    q: spec.q(),
                });
            }
            vec![spec.canonicalize_names(l)]
        }
    };
    let sn = spec.with_order(y.order);
    let mut residuals = Vec::new();
    for (i, li) in lambda.iter().enumerate() {
        let comm = commutator_with_total_derivative(spec, y, i);
        for c in sn.coordinates(y.order.saturating_sub(1)) {
            let theta = contact_form(&sn, &c)?;
            residuals.push(&interior_product(&comm, &theta) - &(li * &interior_product(y, &theta)));
        }
    }
    Ok((Verdict::all_vanish(&residuals), residuals))
}

/// Outcome of comparing μ- and standard prolongations on `I_X`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", content = "detail", rename_all = "kebab-case")]
pub enum Coincidence {
    /// The difference terms were tested on the solved invariant set.
    Tested(Verdict),
    /// `I_X` is empty: some relation is a nonzero constant.
    Vacuous,
    /// A relation could not be solved for any jet coordinate.
    Unverifiable(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoincidenceReport {
    pub outcome: Coincidence,
    /// Solved relations `u^a_J = ...` used for substitution.
    pub solutions: BTreeMap<Symbol, Expr>,
    /// `F^a_J` after substitution, for every coordinate up to order `n`.
    pub residuals: Vec<(JetCoord, Expr)>,
}

fn close_solutions(sol: &mut BTreeMap<Symbol, Expr>) -> bool {
    for _ in 0..=sol.len() {
        let next: BTreeMap<Symbol, Expr> = sol
            .iter()
            .map(|(k, v)| (k.clone(), v.substitute_unchecked(sol)))
            .collect();
        if next == *sol {
            return true;
        }
        *sol = next;
    }
    false
}

/// Solves `D_J Q^a = 0` for leading jet coordinates one relation at a time
/// and tests whether every `F^a_J` vanishes under the solution.
pub fn coincide_on_invariant_set(
    x: &PointVectorField,
    mu: &MuForm,
    n: usize,
) -> Result<CoincidenceReport> {
    let s = x.spec();
    let mut solutions: BTreeMap<Symbol, Expr> = BTreeMap::new();
    let unverifiable = |msg: String, solutions| CoincidenceReport {
        outcome: Coincidence::Unverifiable(msg),
        solutions,
        residuals: Vec::new(),
    };
    for rel in invariant_set_relations(x, n) {
        let r = rel.substitute_unchecked(&solutions);
        if r.is_exact_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(CoincidenceReport {
                outcome: Coincidence::Vacuous,
                solutions,
                residuals: Vec::new(),
            });
        }
        let mut coords: Vec<JetCoord> = r
            .free_vars()
            .iter()
            .filter_map(|v| s.jet_coord(v))
            .collect();
        coords.sort();
        let solved = coords.iter().rev().find_map(|c| {
            let sym = s.coord_symbol(c);
            let (a, b) = r.affine_in(&sym)?;
            Some((sym, (-b).checked_div(&a)?))
        });
        let Some((sym, val)) = solved else {
            return Ok(unverifiable(
                format!("relation {r} = 0 is not linear in any jet coordinate"),
                solutions,
            ));
        };
        let single: BTreeMap<Symbol, Expr> = [(sym.clone(), val.clone())].into();
        for v in solutions.values_mut() {
            *v = v.substitute_unchecked(&single);
        }
        solutions.insert(sym, val);
    }
    if !close_solutions(&mut solutions) {
        return Ok(unverifiable(
            "solved relations do not close".into(),
            solutions,
        ));
    }
    let diff = difference_terms(x, mu, n)?;
    let mut residuals = Vec::new();
    for (k, f) in &diff.terms {
        for (a, fa) in f.iter().enumerate() {
            residuals.push((
                JetCoord::new(a, k.clone()),
                fa.substitute_unchecked(&solutions),
            ));
        }
    }
    let verdict = Verdict::all_vanish(residuals.iter().map(|(_, e)| e));
    Ok(CoincidenceReport {
        outcome: Coincidence::Tested(verdict),
        solutions,
        residuals,
    })
}
