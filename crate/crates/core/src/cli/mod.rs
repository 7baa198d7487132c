//! Batch frontend: problem files, task execution and reports.

mod problem;
mod report;

use std::time::Instant;

use rayon::prelude::*;

pub use problem::{Deformation, Operation, ProblemError, ProblemFile, Task};
pub use report::{Report, ReportVerdict, TaskRecord};

use crate::compat::{
    darboux_derivative, maurer_cartan_check, maurer_cartan_check_on_equation, scalar_potential,
    verify_gauge_equivalence_scalar, MaurerCartanCheck,
};
use crate::error::Result;
use crate::expr::{set_default_seed, Expr};
use crate::jet::{JetSpec, JetVectorField};
use crate::prolong::{difference_terms, prolong_lambda, prolong_mu, prolong_standard, PathCheck};
use crate::symmetry::{
    characterization_check, check_symmetry, coincide_on_invariant_set, CharacterizationKind,
    Coincidence, SymmetryKind,
};
use crate::verdict::Verdict;

pub const DEFAULT_SEED: u64 = 20_240_501;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: u64,
    /// Count probably-pass and vacuous-pass as failures.
    pub strict: bool,
    /// Run tasks on the rayon pool; the report keeps file order.
    pub parallel: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: DEFAULT_SEED,
            strict: false,
            parallel: false,
        }
    }
}

/// `(label, Ψ^a_J)` for every coordinate up to the order of `y`, labelled
/// `Ψ`, `Ψ_x`, `Ψ_xx`, ... (with `^v` after `Ψ` when there are several
/// dependent variables).
pub fn prolongation_components(spec: &JetSpec, y: &JetVectorField) -> Vec<(String, Expr)> {
    spec.coordinates(y.order)
        .into_iter()
        .map(|c| {
            let mut label = String::from("Ψ");
            if spec.q() > 1 {
                label.push('^');
                label.push_str(spec.dependent(c.dep).as_str());
            }
            if !c.index.is_empty() {
                label.push('_');
                label.push_str(&spec.index_suffix(&c.index));
            }
            let e = y.psi(&c);
            (label, e)
        })
        .collect()
}

/// `Ψ: u; Ψ_x: 0; Ψ_xx: -u_xx`.
pub fn format_prolongation(spec: &JetSpec, y: &JetVectorField) -> String {
    prolongation_components(spec, y)
        .iter()
        .map(|(l, e)| format!("{l}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

struct Outcome {
    verdict: ReportVerdict,
    residuals: Vec<String>,
    output: Vec<String>,
}

fn from_verdict(v: Verdict) -> ReportVerdict {
    match v {
        Verdict::Holds => ReportVerdict::Pass,
        Verdict::ProbablyHolds => ReportVerdict::ProbablyPass,
        Verdict::Fails => ReportVerdict::Fail,
    }
}

fn nonzero<'a>(es: impl IntoIterator<Item = &'a Expr>) -> Vec<String> {
    es.into_iter()
        .filter(|e| !e.is_exact_zero())
        .map(Expr::to_string)
        .collect()
}

fn mc_outcome(spec: &JetSpec, mc: &MaurerCartanCheck, mut output: Vec<String>) -> Outcome {
    for ((i, k), r) in &mc.residuals {
        output.push(format!(
            "R_{}{} = {r}",
            spec.independent(*i),
            spec.independent(*k)
        ));
    }
    Outcome {
        verdict: from_verdict(mc.verdict),
        residuals: nonzero(mc.residuals.values().flat_map(|m| m.entries())),
        output,
    }
}

fn prolong_with(
    file: &ProblemFile,
    field: &str,
    kind: &Deformation,
    order: usize,
    check: PathCheck,
) -> Result<JetVectorField> {
    let x = &file.fields[field];
    match kind {
        Deformation::Standard => prolong_standard(x, order),
        Deformation::Lambda(l) => prolong_lambda(x, l, order),
        Deformation::Mu(m) => prolong_mu(x, &file.mus[m], order, check),
    }
}

fn execute(file: &ProblemFile, op: &Operation) -> Result<Outcome> {
    let spec = &file.spec;
    let pass = |output| Outcome {
        verdict: ReportVerdict::Pass,
        residuals: Vec::new(),
        output,
    };
    Ok(match op {
        Operation::Prolong {
            field,
            kind,
            order,
            path_check,
        } => {
            let check = if *path_check {
                PathCheck::Verify
            } else {
                PathCheck::Trust
            };
            let y = prolong_with(file, field, kind, *order, check)?;
            pass(vec![format_prolongation(spec, &y)])
        }
        Operation::CheckSymmetry {
            field,
            equation,
            kind,
        } => {
            let kind = match kind {
                Deformation::Standard => SymmetryKind::Standard,
                Deformation::Lambda(l) => SymmetryKind::Lambda(l.clone()),
                Deformation::Mu(m) => SymmetryKind::Mu(file.mus[m].clone()),
            };
            let r = check_symmetry(&file.fields[field], &file.equations[equation], &kind)?;
            Outcome {
                verdict: from_verdict(r.verdict),
                residuals: nonzero(&r.residuals),
                output: vec![format_prolongation(spec, &r.prolongation)],
            }
        }
        Operation::CheckCompat { mu, equation } => {
            let mu = &file.mus[mu];
            let mc = match equation {
                None => maurer_cartan_check(spec, mu)?,
                Some(e) => maurer_cartan_check_on_equation(mu, &file.equations[e])?,
            };
            mc_outcome(spec, &mc, Vec::new())
        }
        Operation::Potential { mu } => {
            let phi = scalar_potential(spec, &file.mus[mu])?;
            pass(vec![format!("Phi = {phi}")])
        }
        Operation::Darboux { gauge } => {
            let mu = darboux_derivative(spec, &file.gauges[gauge])?;
            let output = mu
                .components()
                .iter()
                .enumerate()
                .map(|(i, m)| format!("Lambda_{} = {m}", spec.independent(i)))
                .collect();
            mc_outcome(spec, &maurer_cartan_check(spec, &mu)?, output)
        }
        Operation::GaugeCheck { field, phi, order } => {
            let r = verify_gauge_equivalence_scalar(&file.fields[field], phi, *order)?;
            Outcome {
                verdict: from_verdict(r.verdict),
                residuals: nonzero(&r.residuals),
                output: Vec::new(),
            }
        }
        Operation::Coincidence { field, mu, order } => {
            let r = coincide_on_invariant_set(&file.fields[field], &file.mus[mu], *order)?;
            let mut output: Vec<String> = r
                .solutions
                .iter()
                .map(|(k, v)| format!("{k} = {v}"))
                .collect();
            let verdict = match &r.outcome {
                Coincidence::Tested(v) => from_verdict(*v),
                Coincidence::Vacuous => {
                    output.push("invariant set is empty".into());
                    ReportVerdict::VacuousPass
                }
                Coincidence::Unverifiable(why) => {
                    output.push(why.clone());
                    ReportVerdict::Unverifiable
                }
            };
            Outcome {
                verdict,
                residuals: nonzero(r.residuals.iter().map(|(_, e)| e)),
                output,
            }
        }
        Operation::DifferenceTerms { field, mu, order } => {
            let d = difference_terms(&file.fields[field], &file.mus[mu], *order)?;
            let mut output = Vec::new();
            for (k, f) in &d.terms {
                for (a, e) in f.iter().enumerate() {
                    let c = crate::jet::JetCoord::new(a, k.clone());
                    output.push(format!("F[{}] = {e}", spec.coord_name(&c)));
                }
            }
            let verdict = d.recursion_verdict().unwrap_or(Verdict::Holds);
            Outcome {
                verdict: from_verdict(verdict),
                residuals: nonzero(d.recursion_residuals.iter().flat_map(|r| r.values())),
                output,
            }
        }
        Operation::Characterization { field, kind, order } => {
            let y = prolong_with(file, field, kind, *order, PathCheck::Trust)?;
            let ck = match kind {
                Deformation::Lambda(l) => CharacterizationKind::Lambda(l.clone()),
                _ => CharacterizationKind::Standard,
            };
            let (v, residuals) = characterization_check(spec, &y, &ck)?;
            Outcome {
                verdict: from_verdict(v),
                residuals: nonzero(&residuals),
                output: Vec::new(),
            }
        }
    })
}

fn run_task(file: &ProblemFile, task: &Task) -> TaskRecord {
    let start = Instant::now();
    let (verdict, residuals, output, message) = match execute(file, &task.op) {
        Ok(o) => (o.verdict, o.residuals, o.output, None),
        Err(e) => (
            ReportVerdict::Fail,
            Vec::new(),
            Vec::new(),
            Some(e.to_string()),
        ),
    };
    TaskRecord {
        id: task.id.clone(),
        operation: task.op.name().to_string(),
        verdict,
        residuals,
        output,
        message,
        duration: start.elapsed(),
    }
}

/// Executes every task of `file`, in order.
pub fn run(file: &ProblemFile, options: &RunOptions) -> Report {
    set_default_seed(options.seed);
    let tasks = if options.parallel {
        file.tasks.par_iter().map(|t| run_task(file, t)).collect()
    } else {
        file.tasks.iter().map(|t| run_task(file, t)).collect()
    };
    Report {
        seed: options.seed,
        strict: options.strict,
        tasks,
    }
}

/// Runs a single prolongation of a declared field.
pub fn show_prolongation(
    file: &ProblemFile,
    field: &str,
    kind: Deformation,
    order: usize,
    path_check: bool,
    options: &RunOptions,
) -> Report {
    let task = Task {
        id: format!("prolong-{field}"),
        op: Operation::Prolong {
            field: field.to_string(),
            kind,
            order,
            path_check,
        },
    };
    let single = ProblemFile {
        tasks: vec![task],
        ..file.clone()
    };
    run(&single, options)
}
