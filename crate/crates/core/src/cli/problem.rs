//! The declarative problem file.
//!
//! ```text
//! # comment
//! [jet]
//! independent = x
//! dependent = u
//! order = 2
//!
//! [field X]
//! xi.x = 0
//! phi.u = 1
//!
//! [mu L]
//! lambda.x = x
//!
//! [equation E]
//! u_xx = (1 + x^2)*u
//!
//! [task lam]
//! op = check-symmetry
//! field = X
//! equation = E
//! kind = lambda
//! lambda = x
//! ```
//!
//! Matrix-valued entries (`Lambda.x`, gauge `matrix`, `inverse`) are written
//! row by row: `a, b; c, d`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::compat::GaugeFunction;
use crate::expr::Expr;
use crate::jet::JetSpec;
use crate::matrix::ExprMatrix;
use crate::prolong::{MuForm, PointVectorField};
use crate::symmetry::DifferentialEquation;

/// An input error located at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ProblemError {}

/// How a field is prolonged.
#[derive(Clone, Debug, PartialEq)]
pub enum Deformation {
    Standard,
    Lambda(Expr),
    /// A declared `[mu NAME]`.
    Mu(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operation {
    Prolong {
        field: String,
        kind: Deformation,
        order: usize,
        path_check: bool,
    },
    CheckSymmetry {
        field: String,
        equation: String,
        kind: Deformation,
    },
    CheckCompat {
        mu: String,
        equation: Option<String>,
    },
    Potential {
        mu: String,
    },
    Darboux {
        gauge: String,
    },
    GaugeCheck {
        field: String,
        phi: Expr,
        order: usize,
    },
    Coincidence {
        field: String,
        mu: String,
        order: usize,
    },
    DifferenceTerms {
        field: String,
        mu: String,
        order: usize,
    },
    Characterization {
        field: String,
        kind: Deformation,
        order: usize,
    },
}

impl Operation {
    pub fn name(&self) -> &'static str {
        match self {
            Operation::Prolong { .. } => "prolong",
            Operation::CheckSymmetry { .. } => "check-symmetry",
            Operation::CheckCompat { .. } => "check-compat",
            Operation::Potential { .. } => "potential",
            Operation::Darboux { .. } => "darboux",
            Operation::GaugeCheck { .. } => "gauge-check",
            Operation::Coincidence { .. } => "coincidence",
            Operation::DifferenceTerms { .. } => "difference-terms",
            Operation::Characterization { .. } => "characterization",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub id: String,
    pub op: Operation,
}

#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub spec: JetSpec,
    pub fields: BTreeMap<String, PointVectorField>,
    pub mus: BTreeMap<String, MuForm>,
    pub equations: BTreeMap<String, DifferentialEquation>,
    pub gauges: BTreeMap<String, GaugeFunction>,
    pub tasks: Vec<Task>,
}

/// A `key = value` line with the column where the value starts.
#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    key: String,
    key_col: usize,
    value: String,
    value_col: usize,
}

#[derive(Debug)]
struct Section {
    line: usize,
    kind: String,
    name: Option<String>,
    entries: Vec<Entry>,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, ProblemError> {
    Err(ProblemError {
        line,
        column,
        message: message.into(),
    })
}

fn sections(text: &str) -> Result<Vec<Section>, ProblemError> {
    let mut out: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(inner) = rest.strip_suffix(']') else {
                return err(line, indent + 1, "section header must end with `]`");
            };
            let mut parts = inner.split_whitespace();
            let kind = parts.next().unwrap_or("").to_string();
            let name = parts.next().map(str::to_string);
            if parts.next().is_some() {
                return err(line, indent + 1, "section header takes at most one name");
            }
            out.push(Section {
                line,
                kind,
                name,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(section) = out.last_mut() else {
            return err(line, indent + 1, "entry outside of any section");
        };
        let Some(eq) = content.find('=') else {
            return err(line, indent + 1, "expected `key = value`");
        };
        let key = content[..eq].trim().to_string();
        let after = &content[eq + 1..];
        let value_col = eq + 2 + (after.len() - after.trim_start().len());
        section.entries.push(Entry {
            line,
            key,
            key_col: indent + 1,
            value: after.trim().to_string(),
            value_col: value_col.min(content.len().max(1)),
        });
    }
    Ok(out)
}

fn expr_at(spec: &JetSpec, text: &str, line: usize, col: usize) -> Result<Expr, ProblemError> {
    spec.parse(text).map_err(|e| {
        let column = match &e {
            crate::Error::Parse(p) => col + p.column() - 1,
            _ => col,
        };
        ProblemError {
            line,
            column,
            message: e.to_string(),
        }
    })
}

fn entry_expr(spec: &JetSpec, e: &Entry) -> Result<Expr, ProblemError> {
    expr_at(spec, &e.value, e.line, e.value_col)
}

/// Splits `a, b; c, d` into rows of `(text, column)`.
fn matrix_at(spec: &JetSpec, e: &Entry) -> Result<ExprMatrix, ProblemError> {
    let mut rows = Vec::new();
    let mut offset = 0;
    for row in e.value.split(';') {
        let mut cells = Vec::new();
        let mut cell_off = offset;
        for cell in row.split(',') {
            let lead = cell.len() - cell.trim_start().len();
            cells.push(expr_at(
                spec,
                cell.trim(),
                e.line,
                e.value_col + cell_off + lead,
            )?);
            cell_off += cell.len() + 1;
        }
        rows.push(cells);
        offset += row.len() + 1;
    }
    ExprMatrix::from_rows(rows).or_else(|x| err(e.line, e.value_col, x.to_string()))
}

fn parse_num<T: FromStr>(e: &Entry) -> Result<T, ProblemError> {
    e.value.parse().or_else(|_| {
        err(
            e.line,
            e.value_col,
            format!("`{}` is not a valid number", e.value),
        )
    })
}

fn parse_bool(e: &Entry) -> Result<bool, ProblemError> {
    match e.value.as_str() {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        other => err(
            e.line,
            e.value_col,
            format!("expected true or false, got `{other}`"),
        ),
    }
}

fn names(e: &Entry) -> Vec<String> {
    e.value
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_jet(s: &Section) -> Result<JetSpec, ProblemError> {
    let (mut ind, mut dep, mut order) = (None, None, None);
    for e in &s.entries {
        match e.key.as_str() {
            "independent" => ind = Some(names(e)),
            "dependent" => dep = Some(names(e)),
            "order" => order = Some(parse_num::<usize>(e)?),
            other => return err(e.line, e.key_col, format!("unknown key `{other}` in [jet]")),
        }
    }
    let (Some(ind), Some(dep), Some(order)) = (ind, dep, order) else {
        return err(s.line, 1, "[jet] needs independent, dependent and order");
    };
    let ind: Vec<&str> = ind.iter().map(String::as_str).collect();
    let dep: Vec<&str> = dep.iter().map(String::as_str).collect();
    JetSpec::new(&ind, &dep, order).or_else(|e| err(s.line, 1, e.to_string()))
}

/// `prefix.name` keys, resolved against `names` by `lookup`.
fn indexed(
    e: &Entry,
    prefix: &str,
    lookup: impl Fn(&str) -> Option<usize>,
) -> Result<Option<usize>, ProblemError> {
    let Some(rest) = e.key.strip_prefix(prefix).and_then(|r| r.strip_prefix('.')) else {
        return Ok(None);
    };
    match lookup(rest) {
        Some(i) => Ok(Some(i)),
        None => err(
            e.line,
            e.key_col,
            format!("`{rest}` is not declared in [jet]"),
        ),
    }
}

fn parse_field(spec: &JetSpec, s: &Section) -> Result<PointVectorField, ProblemError> {
    let mut xi = vec![Expr::zero(); spec.p()];
    let mut phi = vec![Expr::zero(); spec.q()];
    let mut generalized = false;
    for e in &s.entries {
        if e.key == "generalized" {
            generalized = parse_bool(e)?;
        } else if let Some(i) = indexed(e, "xi", |n| spec.independent_index(n))? {
            xi[i] = entry_expr(spec, e)?;
        } else if let Some(a) = indexed(e, "phi", |n| spec.dependent_index(n))? {
            phi[a] = entry_expr(spec, e)?;
        } else {
            return err(
                e.line,
                e.key_col,
                format!("unknown key `{}` in [field]", e.key),
            );
        }
    }
    let r = if generalized {
        PointVectorField::generalized(spec, xi, phi)
    } else {
        PointVectorField::new(spec, xi, phi)
    };
    r.or_else(|x| err(s.line, 1, x.to_string()))
}

fn parse_mu(spec: &JetSpec, s: &Section) -> Result<MuForm, ProblemError> {
    let mut scalar: Option<Vec<Expr>> = None;
    let mut matrix: Option<Vec<ExprMatrix>> = None;
    for e in &s.entries {
        if let Some(i) = indexed(e, "lambda", |n| spec.independent_index(n))? {
            if matrix.is_some() {
                return err(e.line, e.key_col, "cannot mix lambda and Lambda entries");
            }
            scalar.get_or_insert_with(|| vec![Expr::zero(); spec.p()])[i] = entry_expr(spec, e)?;
        } else if let Some(i) = indexed(e, "Lambda", |n| spec.independent_index(n))? {
            if scalar.is_some() {
                return err(e.line, e.key_col, "cannot mix lambda and Lambda entries");
            }
            let m = matrix_at(spec, e)?;
            if m.size() != spec.q() {
                return err(
                    e.line,
                    e.value_col,
                    format!("Lambda must be {q}x{q}", q = spec.q()),
                );
            }
            matrix.get_or_insert_with(|| vec![ExprMatrix::zero(spec.q()); spec.p()])[i] = m;
        } else {
            return err(
                e.line,
                e.key_col,
                format!("unknown key `{}` in [mu]", e.key),
            );
        }
    }
    let mu = match (scalar, matrix) {
        (Some(l), _) => MuForm::scalar(l),
        (None, Some(m)) => MuForm::matrix(m).or_else(|x| err(s.line, 1, x.to_string()))?,
        (None, None) => MuForm::zero(spec.p(), spec.q()),
    };
    mu.check_fits(spec)
        .or_else(|x| err(s.line, 1, x.to_string()))?;
    Ok(mu)
}

fn parse_equation(spec: &JetSpec, s: &Section) -> Result<DifferentialEquation, ProblemError> {
    let mut eqs = Vec::new();
    for e in &s.entries {
        let Some(lead) = spec.jet_coord(&e.key.as_str().into()) else {
            return err(
                e.line,
                e.key_col,
                format!("`{}` is not a jet coordinate", e.key),
            );
        };
        eqs.push((lead, entry_expr(spec, e)?));
    }
    DifferentialEquation::new(spec, eqs).or_else(|x| err(s.line, 1, x.to_string()))
}

fn parse_gauge(spec: &JetSpec, s: &Section) -> Result<GaugeFunction, ProblemError> {
    let (mut matrix, mut inverse, mut exp) = (None, None, None);
    for e in &s.entries {
        match e.key.as_str() {
            "matrix" => matrix = Some(matrix_at(spec, e)?),
            "inverse" => inverse = Some(matrix_at(spec, e)?),
            "exp" => exp = Some(entry_expr(spec, e)?),
            other => {
                return err(
                    e.line,
                    e.key_col,
                    format!("unknown key `{other}` in [gauge]"),
                )
            }
        }
    }
    let g = match (matrix, exp) {
        (Some(m), None) => GaugeFunction::new(m, inverse),
        (None, Some(phi)) if inverse.is_none() && spec.q() == 1 => Ok(GaugeFunction::exp(&phi)),
        _ => {
            return err(
                s.line,
                1,
                "[gauge] needs either `matrix` (with optional `inverse`) or, for q = 1, `exp`",
            )
        }
    };
    let g = g.or_else(|x| err(s.line, 1, x.to_string()))?;
    if g.matrix().size() != spec.q() {
        return err(s.line, 1, format!("gauge must be {q}x{q}", q = spec.q()));
    }
    Ok(g)
}

struct TaskArgs<'a> {
    section: &'a Section,
    map: BTreeMap<&'a str, &'a Entry>,
}

impl<'a> TaskArgs<'a> {
    fn take(&mut self, key: &str) -> Option<&'a Entry> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<&'a Entry, ProblemError> {
        match self.take(key) {
            Some(e) => Ok(e),
            None => err(self.section.line, 1, format!("task needs `{key}`")),
        }
    }
}

struct Declared<'a> {
    spec: &'a JetSpec,
    fields: &'a BTreeMap<String, PointVectorField>,
    mus: &'a BTreeMap<String, MuForm>,
    equations: &'a BTreeMap<String, DifferentialEquation>,
    gauges: &'a BTreeMap<String, GaugeFunction>,
}

fn reference<T>(
    e: &Entry,
    what: &str,
    table: &BTreeMap<String, T>,
) -> Result<String, ProblemError> {
    if table.contains_key(&e.value) {
        Ok(e.value.clone())
    } else {
        err(
            e.line,
            e.value_col,
            format!("undeclared {what} `{}`", e.value),
        )
    }
}

fn parse_task(d: &Declared, s: &Section) -> Result<Task, ProblemError> {
    let Some(id) = s.name.clone() else {
        return err(s.line, 1, "[task] needs a name");
    };
    let mut map = BTreeMap::new();
    for e in &s.entries {
        if map.insert(e.key.as_str(), e).is_some() {
            return err(e.line, e.key_col, format!("duplicate key `{}`", e.key));
        }
    }
    let mut a = TaskArgs { section: s, map };
    let op_entry = a.required("op")?;
    let order = |a: &mut TaskArgs| -> Result<usize, ProblemError> {
        match a.take("order") {
            Some(e) => {
                let n: usize = parse_num(e)?;
                if n == 0 {
                    return err(e.line, e.value_col, "order must be at least 1");
                }
                Ok(n)
            }
            None => Ok(d.spec.order()),
        }
    };
    let field = |a: &mut TaskArgs| reference(a.required("field")?, "field", d.fields);
    let mu = |a: &mut TaskArgs| reference(a.required("mu")?, "mu", d.mus);
    let kind = |a: &mut TaskArgs| -> Result<Deformation, ProblemError> {
        let k = a.take("kind");
        let name = k.map(|e| e.value.as_str()).unwrap_or("standard");
        match name {
            "standard" => Ok(Deformation::Standard),
            "lambda" => Ok(Deformation::Lambda(entry_expr(
                d.spec,
                a.required("lambda")?,
            )?)),
            "mu" => Ok(Deformation::Mu(reference(a.required("mu")?, "mu", d.mus)?)),
            other => {
                let e = k.unwrap();
                err(
                    e.line,
                    e.value_col,
                    format!("unknown kind `{other}` (standard, lambda or mu)"),
                )
            }
        }
    };
    let op = match op_entry.value.as_str() {
        "prolong" => Operation::Prolong {
            field: field(&mut a)?,
            kind: kind(&mut a)?,
            order: order(&mut a)?,
            path_check: match a.take("path-check") {
                Some(e) => parse_bool(e)?,
                None => false,
            },
        },
        "check-symmetry" => Operation::CheckSymmetry {
            field: field(&mut a)?,
            equation: reference(a.required("equation")?, "equation", d.equations)?,
            kind: kind(&mut a)?,
        },
        "check-compat" => Operation::CheckCompat {
            mu: mu(&mut a)?,
            equation: match a.take("equation") {
                Some(e) => Some(reference(e, "equation", d.equations)?),
                None => None,
            },
        },
        "potential" => Operation::Potential { mu: mu(&mut a)? },
        "darboux" => Operation::Darboux {
            gauge: reference(a.required("gauge")?, "gauge", d.gauges)?,
        },
        "gauge-check" => Operation::GaugeCheck {
            field: field(&mut a)?,
            phi: entry_expr(d.spec, a.required("phi")?)?,
            order: order(&mut a)?,
        },
        "coincidence" => Operation::Coincidence {
            field: field(&mut a)?,
            mu: mu(&mut a)?,
            order: order(&mut a)?,
        },
        "difference-terms" => Operation::DifferenceTerms {
            field: field(&mut a)?,
            mu: mu(&mut a)?,
            order: order(&mut a)?,
        },
        "characterization" => {
            let field = field(&mut a)?;
            let kind = kind(&mut a)?;
            if matches!(kind, Deformation::Mu(_)) {
                return err(
                    s.line,
                    1,
                    "characterization supports kind standard or lambda",
                );
            }
            Operation::Characterization {
                field,
                kind,
                order: order(&mut a)?,
            }
        }
        other => {
            return err(
                op_entry.line,
                op_entry.value_col,
                format!("unknown task kind `{other}`"),
            )
        }
    };
    if let Some((k, e)) = a.map.iter().next() {
        return err(
            e.line,
            e.key_col,
            format!("unexpected key `{k}` for op {}", op.name()),
        );
    }
    Ok(Task { id, op })
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, ProblemError> {
        let secs = sections(text)?;
        let Some(first) = secs.first() else {
            return err(1, 1, "empty problem file; expected a [jet] section");
        };
        if first.kind != "jet" {
            return err(first.line, 1, "the first section must be [jet]");
        }
        let spec = parse_jet(first)?;
        let mut file = ProblemFile {
            spec: spec.clone(),
            fields: BTreeMap::new(),
            mus: BTreeMap::new(),
            equations: BTreeMap::new(),
            gauges: BTreeMap::new(),
            tasks: Vec::new(),
        };
        let mut task_sections = Vec::new();
        for s in &secs[1..] {
            let name = || -> Result<String, ProblemError> {
                s.name
                    .clone()
                    .map_or_else(|| err(s.line, 1, format!("[{}] needs a name", s.kind)), Ok)
            };
            let dup = |exists: bool, n: &str| {
                if exists {
                    err(s.line, 1, format!("`{n}` declared twice"))
                } else {
                    Ok(())
                }
            };
            match s.kind.as_str() {
                "field" => {
                    let n = name()?;
                    dup(file.fields.contains_key(&n), &n)?;
                    file.fields.insert(n, parse_field(&spec, s)?);
                }
                "mu" => {
                    let n = name()?;
                    dup(file.mus.contains_key(&n), &n)?;
                    file.mus.insert(n, parse_mu(&spec, s)?);
                }
                "equation" => {
                    let n = name()?;
                    dup(file.equations.contains_key(&n), &n)?;
                    file.equations.insert(n, parse_equation(&spec, s)?);
                }
                "gauge" => {
                    let n = name()?;
                    dup(file.gauges.contains_key(&n), &n)?;
                    file.gauges.insert(n, parse_gauge(&spec, s)?);
                }
                "task" => task_sections.push(s),
                "jet" => return err(s.line, 1, "only one [jet] section is allowed"),
                other => return err(s.line, 2, format!("unknown section `{other}`")),
            }
        }
        let declared = Declared {
            spec: &spec,
            fields: &file.fields,
            mus: &file.mus,
            equations: &file.equations,
            gauges: &file.gauges,
        };
        let mut tasks = Vec::new();
        for s in task_sections {
            let t = parse_task(&declared, s)?;
            if tasks.iter().any(|x: &Task| x.id == t.id) {
                return err(s.line, 1, format!("task `{}` declared twice", t.id));
            }
            tasks.push(t);
        }
        file.tasks = tasks;
        Ok(file)
    }
}
