//! Jet spaces: coordinates, multi-indices and total derivatives.

mod field;
mod forms;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Expr, Symbol};

pub use field::JetVectorField;
pub use forms::{
    contact_decomposition, contact_form, d_closed, differential, exterior_derivative,
    in_contact_module, in_vector_contact_module, interior_product, lie_derivative, Basis,
    ContactDecomposition, OneForm, TwoForm,
};

/// Derivative counts per independent variable. Ordered by total order first,
/// then so that earlier-declared variables come first: `∅ < x < t < xx < xt < tt`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn empty(p: usize) -> Self {
        MultiIndex(vec![0; p])
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        MultiIndex(counts)
    }

    /// The index with a single derivative in slot `i`.
    pub fn unit(p: usize, i: usize) -> Self {
        Self::empty(p).incremented(i)
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn p(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// `(J, i)`: one more derivative in slot `i`.
    pub fn incremented(&self, i: usize) -> Self {
        let mut c = self.0.clone();
        c[i] += 1;
        MultiIndex(c)
    }

    pub fn decremented(&self, i: usize) -> Option<Self> {
        let mut c = self.0.clone();
        if c[i] == 0 {
            return None;
        }
        c[i] -= 1;
        Some(MultiIndex(c))
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` when every slot of `other` is at most that of `self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Last step of the canonical path: the highest nonzero slot.
    ///
    /// The canonical path to `J` takes all steps in slot 0 first, then slot 1,
    /// and so on, so `J` is reached from `J - e_last`.
    pub fn last_slot(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c > 0)
    }

    /// Slots in canonical-path order, with multiplicity.
    pub fn path(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
            .collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The coordinate `u^a_J`. Sorted by multi-index, then dependent index.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct JetCoord {
    pub index: MultiIndex,
    pub dep: usize,
}

impl JetCoord {
    pub fn new(dep: usize, index: MultiIndex) -> Self {
        JetCoord { index, dep }
    }

    pub fn order(&self) -> usize {
        self.index.order()
    }

    pub fn incremented(&self, i: usize) -> Self {
        JetCoord::new(self.dep, self.index.incremented(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarKind {
    Independent(usize),
    Jet(JetCoord),
    Auxiliary,
}

#[derive(Debug)]
struct SpecInner {
    independent: Vec<Symbol>,
    dependent: Vec<Symbol>,
    order: usize,
}

/// The jet space `J^n M` with named coordinates.
#[derive(Clone, Debug)]
pub struct JetSpec(Arc<SpecInner>);

impl PartialEq for JetSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.independent == other.0.independent
            && self.0.dependent == other.0.dependent
            && self.0.order == other.0.order
    }
}

impl Eq for JetSpec {}

fn valid_base_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

impl JetSpec {
    /// Names must be alphanumeric (no `_`), pairwise distinct, and no
    /// independent name may be a prefix of another so that jet names decode
    /// uniquely.
    pub fn new(independent: &[&str], dependent: &[&str], order: usize) -> Result<Self> {
        if independent.is_empty() || dependent.is_empty() || order == 0 {
            return Err(Error::InvalidJetSpec(
                "need at least one independent variable, one dependent variable and order >= 1"
                    .into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for name in independent.iter().chain(dependent) {
            if !valid_base_name(name) {
                return Err(Error::InvalidJetSpec(format!(
                    "`{name}` is not a valid variable name (letters and digits, starting with a letter)"
                )));
            }
            if !seen.insert(*name) {
                return Err(Error::InvalidJetSpec(format!("`{name}` declared twice")));
            }
        }
        for a in independent {
            for b in independent {
                if a != b && b.starts_with(a) {
                    return Err(Error::InvalidJetSpec(format!(
                        "independent name `{a}` is a prefix of `{b}`; jet names would be ambiguous"
                    )));
                }
            }
        }
        Ok(JetSpec(Arc::new(SpecInner {
            independent: independent.iter().map(|s| Symbol::new(s)).collect(),
            dependent: dependent.iter().map(|s| Symbol::new(s)).collect(),
            order,
        })))
    }

    pub fn p(&self) -> usize {
        self.0.independent.len()
    }

    pub fn q(&self) -> usize {
        self.0.dependent.len()
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn with_order(&self, order: usize) -> JetSpec {
        JetSpec(Arc::new(SpecInner {
            independent: self.0.independent.clone(),
            dependent: self.0.dependent.clone(),
            order,
        }))
    }

    pub fn independent(&self, i: usize) -> &Symbol {
        &self.0.independent[i]
    }

    pub fn dependent(&self, a: usize) -> &Symbol {
        &self.0.dependent[a]
    }

    pub fn independent_index(&self, name: &str) -> Option<usize> {
        self.0.independent.iter().position(|s| s.as_str() == name)
    }

    pub fn dependent_index(&self, name: &str) -> Option<usize> {
        self.0.dependent.iter().position(|s| s.as_str() == name)
    }

    pub fn x(&self, i: usize) -> Expr {
        Expr::symbol(self.independent(i))
    }

    pub fn empty_index(&self) -> MultiIndex {
        MultiIndex::empty(self.p())
    }

    pub fn unit_index(&self, i: usize) -> MultiIndex {
        MultiIndex::unit(self.p(), i)
    }

    /// `u^a` itself.
    pub fn base_coord(&self, a: usize) -> JetCoord {
        JetCoord::new(a, self.empty_index())
    }

    pub fn index_suffix(&self, index: &MultiIndex) -> String {
        let mut s = String::new();
        for (i, &c) in index.counts().iter().enumerate() {
            for _ in 0..c {
                s.push_str(self.independent(i).as_str());
            }
        }
        s
    }

    pub fn coord_name(&self, c: &JetCoord) -> String {
        let base = self.dependent(c.dep).as_str();
        if c.index.is_empty() {
            base.to_string()
        } else {
            format!("{base}_{}", self.index_suffix(&c.index))
        }
    }

    pub fn coord_symbol(&self, c: &JetCoord) -> Symbol {
        Symbol::new(&self.coord_name(c))
    }

    pub fn coord_expr(&self, c: &JetCoord) -> Expr {
        Expr::var(&self.coord_name(c))
    }

    /// Decodes a suffix such as `xtx` into counts, in any letter order.
    fn decode_suffix(&self, mut s: &str) -> Option<MultiIndex> {
        let mut counts = vec![0u32; self.p()];
        if s.is_empty() {
            return None;
        }
        while !s.is_empty() {
            let i = self
                .0
                .independent
                .iter()
                .position(|x| s.starts_with(x.as_str()))?;
            counts[i] += 1;
            s = &s[self.independent(i).as_str().len()..];
        }
        Some(MultiIndex(counts))
    }

    pub fn classify(&self, s: &Symbol) -> VarKind {
        let name = s.as_str();
        if let Some(i) = self.independent_index(name) {
            return VarKind::Independent(i);
        }
        if let Some(a) = self.dependent_index(name) {
            return VarKind::Jet(self.base_coord(a));
        }
        if let Some((base, suffix)) = name.split_once('_') {
            if let (Some(a), Some(index)) = (self.dependent_index(base), self.decode_suffix(suffix))
            {
                return VarKind::Jet(JetCoord::new(a, index));
            }
        }
        VarKind::Auxiliary
    }

    pub fn jet_coord(&self, s: &Symbol) -> Option<JetCoord> {
        match self.classify(s) {
            VarKind::Jet(c) => Some(c),
            _ => None,
        }
    }

    /// All coordinates `u^a_J` with `|J| <= max_order`, in coordinate order.
    pub fn coordinates(&self, max_order: usize) -> Vec<JetCoord> {
        let mut out = Vec::new();
        for k in 0..=max_order {
            for index in self.multi_indices(k) {
                for a in 0..self.q() {
                    out.push(JetCoord::new(a, index.clone()));
                }
            }
        }
        out
    }

    /// Multi-indices of exact order `k`, ascending.
    pub fn multi_indices(&self, k: usize) -> Vec<MultiIndex> {
        fn fill(p: usize, slot: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if slot + 1 == p {
                cur.push(left);
                out.push(MultiIndex(cur.clone()));
                cur.pop();
                return;
            }
            for c in (0..=left).rev() {
                cur.push(c);
                fill(p, slot + 1, left - c, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        fill(self.p(), 0, k as u32, &mut Vec::new(), &mut out);
        out
    }

    /// Multi-indices with `|J| <= max_order`, ascending.
    pub fn multi_indices_upto(&self, max_order: usize) -> Vec<MultiIndex> {
        (0..=max_order)
            .flat_map(|k| self.multi_indices(k))
            .collect()
    }

    /// Parses an expression and renames jet variables to their canonical
    /// spelling, so `u_tx` becomes `u_xt` when `x` is declared first.
    pub fn parse(&self, text: &str) -> Result<Expr> {
        let e = Expr::parse(text)?;
        Ok(self.canonicalize_names(&e))
    }

    pub fn canonicalize_names(&self, e: &Expr) -> Expr {
        let renames: BTreeMap<Symbol, Expr> = e
            .free_vars()
            .into_iter()
            .filter_map(|s| {
                let c = self.jet_coord(&s)?;
                let canon = self.coord_name(&c);
                (canon != s.as_str()).then(|| (s, Expr::var(&canon)))
            })
            .collect();
        e.substitute_unchecked(&renames)
    }

    /// Highest jet order among the variables of `e` (0 if none).
    pub fn order_of(&self, e: &Expr) -> usize {
        e.free_vars()
            .iter()
            .filter_map(|s| self.jet_coord(s).map(|c| c.order()))
            .max()
            .unwrap_or(0)
    }

    /// Whether `e` depends on any jet coordinate of order at least 1.
    pub fn has_derivatives(&self, e: &Expr) -> bool {
        self.order_of(e) > 0
    }

    /// `D_i e = ∂_i e + Σ u^a_{J,i} ∂e/∂u^a_J`, summed over the coordinates
    /// present in `e`; no truncation is applied.
    pub fn total_derivative(&self, e: &Expr, i: usize) -> Expr {
        e.derivation(&|s: &Symbol| match self.classify(s) {
            VarKind::Independent(j) => (i == j).then(Expr::one),
            VarKind::Jet(c) => Some(self.coord_expr(&c.incremented(i))),
            VarKind::Auxiliary => None,
        })
    }

    /// `D_J e` along the canonical path.
    pub fn total_derivative_multi(&self, e: &Expr, index: &MultiIndex) -> Expr {
        index
            .path()
            .into_iter()
            .fold(e.clone(), |acc, i| self.total_derivative(&acc, i))
    }
}

impl fmt::Display for JetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[Symbol]| v.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "J^{}(x: {}; u: {})",
            self.order(),
            join(&self.0.independent),
            join(&self.0.dependent)
        )
    }
}
