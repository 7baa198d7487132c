use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportVerdict {
    Pass,
    Fail,
    ProbablyPass,
    VacuousPass,
    Unverifiable,
}

impl ReportVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportVerdict::Pass => "pass",
            ReportVerdict::Fail => "fail",
            ReportVerdict::ProbablyPass => "probably-pass",
            ReportVerdict::VacuousPass => "vacuous-pass",
            ReportVerdict::Unverifiable => "unverifiable",
        }
    }

    /// Whether this verdict makes the run fail.
    pub fn is_failure(self, strict: bool) -> bool {
        match self {
            ReportVerdict::Pass => false,
            ReportVerdict::ProbablyPass | ReportVerdict::VacuousPass => strict,
            ReportVerdict::Fail | ReportVerdict::Unverifiable => true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskRecord {
    pub id: String,
    pub operation: String,
    pub verdict: ReportVerdict,
    /// Nonzero residuals in canonical text.
    pub residuals: Vec<String>,
    pub output: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// Shown in the text report only, so the JSON stays reproducible.
    #[serde(skip)]
    pub duration: Duration,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub seed: u64,
    pub strict: bool,
    pub tasks: Vec<TaskRecord>,
}

impl Report {
    pub fn failed(&self) -> bool {
        self.tasks.iter().any(|t| t.verdict.is_failure(self.strict))
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.tasks {
            let _ = writeln!(
                s,
                "[{}] {} ({}) {:.2} ms",
                t.verdict.as_str(),
                t.id,
                t.operation,
                t.duration.as_secs_f64() * 1e3
            );
            for o in &t.output {
                let _ = writeln!(s, "  {o}");
            }
            for r in &t.residuals {
                let _ = writeln!(s, "  residual: {r}");
            }
            if let Some(m) = &t.message {
                let _ = writeln!(s, "  error: {m}");
            }
        }
        let count = |v: ReportVerdict| self.tasks.iter().filter(|t| t.verdict == v).count();
        let _ = writeln!(
            s,
            "{} tasks: {} pass, {} fail, {} probably-pass, {} vacuous-pass, {} unverifiable (seed {}{})",
            self.tasks.len(),
            count(ReportVerdict::Pass),
            count(ReportVerdict::Fail),
            count(ReportVerdict::ProbablyPass),
            count(ReportVerdict::VacuousPass),
            count(ReportVerdict::Unverifiable),
            self.seed,
            if self.strict { ", strict" } else { "" }
        );
        s
    }
}
