use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use jetprolong::cli::{self, Deformation, Operation, ProblemFile, Report, RunOptions, Task};

#[derive(Parser)]
#[command(
    name = "jetprolong",
    version,
    about = "Prolongations and lambda/mu-symmetries on jet spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for probabilistic zero tests.
    #[arg(long, global = true, default_value_t = cli::DEFAULT_SEED)]
    seed: u64,
    /// Treat probably-pass and vacuous-pass as failures.
    #[arg(long, global = true)]
    strict: bool,
    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Prolongation order (defaults to the order in [jet]).
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Verify path independence of mu-prolongations.
    #[arg(long, global = true)]
    path_check: bool,
    /// Run tasks in parallel (report order is kept).
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Standard,
    Lambda,
    Mu,
}

#[derive(Args)]
struct KindArgs {
    #[arg(long, value_enum, default_value_t = Kind::Standard)]
    kind: Kind,
    /// Expression for kind = lambda.
    #[arg(long)]
    lambda: Option<String>,
    /// Declared mu form for kind = mu.
    #[arg(long)]
    mu: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the prolongation of a declared field.
    Prolong {
        file: PathBuf,
        #[arg(long)]
        field: String,
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Check whether a field is a (lambda-, mu-) symmetry of an equation.
    CheckSymmetry {
        file: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long)]
        equation: String,
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Maurer-Cartan check of a mu form, optionally on an equation.
    CheckCompat {
        file: PathBuf,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        equation: Option<String>,
    },
    /// Scalar potential of a closed scalar mu form.
    Potential {
        file: PathBuf,
        #[arg(long)]
        mu: String,
    },
    /// Darboux derivative of a declared gauge function.
    Darboux {
        file: PathBuf,
        #[arg(long)]
        gauge: String,
    },
    /// Check the exp(phi) gauge equivalence for a field.
    GaugeCheck {
        file: PathBuf,
        #[arg(long)]
        field: String,
        #[arg(long)]
        phi: String,
    },
    /// Run every task of a problem file.
    RunFile { file: PathBuf },
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn load(path: &Path) -> Result<ProblemFile, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    ProblemFile::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn declared<T>(
    map: &std::collections::BTreeMap<String, T>,
    what: &str,
    name: &str,
) -> Result<String, String> {
    if map.contains_key(name) {
        Ok(name.to_string())
    } else {
        Err(format!("undeclared {what} `{name}`"))
    }
}

fn deformation(file: &ProblemFile, k: &KindArgs) -> Result<Deformation, String> {
    Ok(match k.kind {
        Kind::Standard => Deformation::Standard,
        Kind::Lambda => {
            let s = k.lambda.as_deref().ok_or("--kind lambda needs --lambda")?;
            Deformation::Lambda(file.spec.parse(s).map_err(|e| format!("--lambda: {e}"))?)
        }
        Kind::Mu => {
            let m = k.mu.as_deref().ok_or("--kind mu needs --mu")?;
            Deformation::Mu(declared(&file.mus, "mu", m)?)
        }
    })
}

fn build(cli: &Cli) -> Result<(ProblemFile, Option<Operation>), String> {
    let file = match &cli.command {
        Command::Prolong { file, .. }
        | Command::CheckSymmetry { file, .. }
        | Command::CheckCompat { file, .. }
        | Command::Potential { file, .. }
        | Command::Darboux { file, .. }
        | Command::GaugeCheck { file, .. }
        | Command::RunFile { file } => load(file)?,
    };
    let order = match cli.order {
        Some(0) => return Err("--order must be at least 1".into()),
        Some(n) => n,
        None => file.spec.order(),
    };
    let op = match &cli.command {
        Command::Prolong { field, kind, .. } => Some(Operation::Prolong {
            field: declared(&file.fields, "field", field)?,
            kind: deformation(&file, kind)?,
            order,
            path_check: cli.path_check,
        }),
        Command::CheckSymmetry {
            field,
            equation,
            kind,
            ..
        } => Some(Operation::CheckSymmetry {
            field: declared(&file.fields, "field", field)?,
            equation: declared(&file.equations, "equation", equation)?,
            kind: deformation(&file, kind)?,
        }),
        Command::CheckCompat { mu, equation, .. } => Some(Operation::CheckCompat {
            mu: declared(&file.mus, "mu", mu)?,
            equation: match equation {
                Some(e) => Some(declared(&file.equations, "equation", e)?),
                None => None,
            },
        }),
        Command::Potential { mu, .. } => Some(Operation::Potential {
            mu: declared(&file.mus, "mu", mu)?,
        }),
        Command::Darboux { gauge, .. } => Some(Operation::Darboux {
            gauge: declared(&file.gauges, "gauge", gauge)?,
        }),
        Command::GaugeCheck { field, phi, .. } => Some(Operation::GaugeCheck {
            field: declared(&file.fields, "field", field)?,
            phi: file.spec.parse(phi).map_err(|e| format!("--phi: {e}"))?,
            order,
        }),
        Command::RunFile { .. } => None,
    };
    Ok((file, op))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut file, op) = match build(&cli) {
        Ok(x) => x,
        Err(e) => return input_error(e),
    };
    if let Some(op) = op {
        file.tasks = vec![Task {
            id: op.name().to_string(),
            op,
        }];
    }
    let options = RunOptions {
        seed: cli.seed,
        strict: cli.strict,
        parallel: cli.parallel,
    };
    let report: Report = cli::run(&file, &options);
    print!("{}", report.to_text());
    if let Some(path) = &cli.json {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            return input_error(format!("{}: {e}", path.display()));
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
