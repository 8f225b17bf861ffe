//! Command-line driver for the benchmark studies.
//!
//! Reproduces the convergence, cost and DOF tables for the coupled 3D-1D
//! benchmark, solves single levels with either solver path, and exports
//! assembled systems for external inspection. Identical configurations
//! produce byte-identical artifacts except for the wall-time column of
//! the cost table.

use std::fmt;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use stilt::bench::{
    compute_errors, run_convergence, run_cost_study, run_dof_check, BenchmarkData, CostOptions,
    OutFormat,
};
use stilt::saddle::{assemble, BilinearForm, BlockSaddleSystem, Discretization, FormulationKind};
use stilt::solve::{minres, solve_direct, BlockDiagPrecond, MultiplierBlock};
use stilt::{Error, Result};

/// Saddle-point studies for elliptic problems coupling a 3D domain to an
/// embedded 1D segment through Lagrange multipliers.
#[derive(Parser, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[command(name = "stilt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Command {
    /// Error convergence study: direct solves across a level range.
    Convergence(ConvergenceArgs),
    /// Cost study: MinRes iterations and preconditioned condition numbers.
    Cost(CostArgs),
    /// Solve one level and write its error record as JSON.
    Solve(SolveArgs),
    /// Compare generated space dimensions against the reference table.
    DofCheck(DofCheckArgs),
    /// Assemble one system and export its matrix and right-hand side.
    ExportSystem(ExportArgs),
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ConvergenceArgs {
    /// Formulation to study.
    #[arg(long, value_enum)]
    formulation: FormulationArg,
    /// Inclusive level range, written a..b, a..=b or a.
    #[arg(long, default_value = "1..5")]
    levels: LevelRange,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CostArgs {
    /// Restrict the study to one formulation (default: all three).
    #[arg(long, value_enum)]
    formulation: Option<FormulationArg>,
    /// Inclusive level range, written a..b, a..=b or a.
    #[arg(long, default_value = "1..4")]
    levels: LevelRange,
    /// Relative residual target of the MinRes solves.
    #[arg(long, default_value_t = 1e-8)]
    rtol: f64,
    /// Multiplier preconditioner block.
    #[arg(long, value_enum, default_value = "fractional")]
    precond: PrecondArg,
    /// Highest level at which condition numbers are estimated.
    #[arg(long, default_value_t = 4)]
    kappa_max_level: u32,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SolveArgs {
    /// Formulation to solve.
    #[arg(long, value_enum)]
    formulation: FormulationArg,
    /// Refinement level.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=6))]
    level: u32,
    /// Solver path.
    #[arg(long, value_enum, default_value = "direct")]
    solver: SolverArg,
    /// Preconditioner for the minres solver.
    #[arg(long, value_enum, default_value = "fractional")]
    precond: PrecondArg,
    /// Relative residual target of the minres solver.
    #[arg(long, default_value_t = 1e-8)]
    rtol: f64,
    /// Bilinear form: the convergence studies use stiffness, the cost
    /// study full. The manufactured-solution errors are only meaningful
    /// for stiffness.
    #[arg(long, value_enum, default_value = "stiffness")]
    form: FormArg,
    /// Export the assembled system (Matrix Market matrix plus RHS).
    #[arg(long)]
    dump_matrices: bool,
    /// Write the multiplier pencil eigenvalues, one per line.
    #[arg(long)]
    dump_eigenvalues: bool,
    /// Write the minres residual history, one value per line.
    #[arg(long)]
    dump_residuals: bool,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DofCheckArgs {
    /// Inclusive level range, written a..b, a..=b or a.
    #[arg(long, default_value = "1..5")]
    levels: LevelRange,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ExportArgs {
    /// Formulation to assemble.
    #[arg(long, value_enum)]
    formulation: FormulationArg,
    /// Refinement level.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=6))]
    level: u32,
    /// Bilinear form of the primal block.
    #[arg(long, value_enum, default_value = "stiffness")]
    form: FormArg,
    #[command(flatten)]
    output: OutputOpts,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OutputOpts {
    /// Directory receiving the output artifacts.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Output formats; repeat the flag or comma-separate values.
    #[arg(long = "format", value_enum, value_delimiter = ',')]
    format: Vec<FormatArg>,
    /// Worker threads for independent levels of a study; the flag wins
    /// over the STILT_THREADS environment variable.
    #[arg(long, env = "STILT_THREADS", default_value_t = 1)]
    threads: usize,
}

impl OutputOpts {
    /// Requested formats, or `default` when none were given.
    fn formats_or(&self, default: &[OutFormat]) -> Vec<OutFormat> {
        if self.format.is_empty() {
            default.to_vec()
        } else {
            self.format.iter().map(|f| f.out()).collect()
        }
    }
}

const ALL_FORMATS: [OutFormat; 3] = [OutFormat::Csv, OutFormat::Json, OutFormat::Markdown];

/// Inclusive refinement-level range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct LevelRange {
    start: u32,
    end: u32,
}

impl LevelRange {
    fn iter(self) -> RangeInclusive<u32> {
        self.start..=self.end
    }
}

impl FromStr for LevelRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = match s.split_once("..=") {
            Some(parts) => parts,
            None => match s.split_once("..") {
                Some(parts) => parts,
                None => (s, s),
            },
        };
        let bad = |_| format!("invalid level range '{s}': expected a..b, a..=b or a");
        let start: u32 = a.trim().parse().map_err(bad)?;
        let end: u32 = b.trim().parse().map_err(bad)?;
        if start < 1 || end > 6 || start > end {
            return Err(format!(
                "level range '{s}' must satisfy 1 <= a <= b <= 6"
            ));
        }
        Ok(LevelRange { start, end })
    }
}

impl fmt::Display for LevelRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
enum FormulationArg {
    /// P1 multiplier on the inclusion surface.
    #[value(name = "coupled-2d")]
    #[serde(rename = "coupled-2d")]
    Coupled2d,
    /// P1 multiplier on the centreline.
    #[value(name = "coupled-1d")]
    #[serde(rename = "coupled-1d")]
    Coupled1d,
    /// P0 multiplier on the cut tetrahedra with a jump stabilization.
    #[value(name = "stabilized")]
    #[serde(rename = "stabilized")]
    Stabilized,
}

impl FormulationArg {
    fn kind(self) -> FormulationKind {
        match self {
            FormulationArg::Coupled2d => FormulationKind::Coupled2D,
            FormulationArg::Coupled1d => FormulationKind::Coupled1D,
            FormulationArg::Stabilized => FormulationKind::Stabilized1D,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormatArg {
    Csv,
    Json,
    Md,
}

impl FormatArg {
    fn out(self) -> OutFormat {
        match self {
            FormatArg::Csv => OutFormat::Csv,
            FormatArg::Json => OutFormat::Json,
            FormatArg::Md => OutFormat::Markdown,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SolverArg {
    /// Schur complement or null-space factorization.
    Direct,
    /// Block-preconditioned MinRes.
    Minres,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum PrecondArg {
    /// Block Riesz map with a fractional (or stabilized L2) multiplier block.
    #[value(alias = "riesz")]
    Fractional,
    /// No preconditioning.
    Identity,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FormArg {
    /// Pure stiffness primal blocks.
    Stiffness,
    /// Full H1 primal blocks (stiffness plus mass).
    Full,
}

impl FormArg {
    fn form(self) -> BilinearForm {
        match self {
            FormArg::Stiffness => BilinearForm::StiffnessOnly,
            FormArg::Full => BilinearForm::FullH1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Convergence(args) => run_convergence_cmd(args),
        Command::Cost(args) => run_cost_cmd(args),
        Command::Solve(args) => run_solve_cmd(args),
        Command::DofCheck(args) => run_dof_check_cmd(args),
        Command::ExportSystem(args) => run_export_cmd(args),
    }
}

/// Writes `content` to `dir/name`, creating the directory if needed.
fn write_text(dir: &Path, name: &str, content: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let path = dir.join(name);
    fs::write(&path, content).map_err(|e| Error::io(path.display().to_string(), e))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run_convergence_cmd(args: ConvergenceArgs) -> Result<ExitCode> {
    let data = BenchmarkData::new();
    let kind = args.formulation.kind();
    let (table, any_failed) = run_convergence(kind, args.levels.iter(), &data, args.output.threads);
    for fmt in args.output.formats_or(&ALL_FORMATS) {
        let name = format!("convergence_{}.{}", kind.name(), fmt.extension());
        write_text(&args.output.out_dir, &name, &table.emit(fmt))?;
    }
    print!("{}", table.to_markdown());
    Ok(if any_failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_cost_cmd(args: CostArgs) -> Result<ExitCode> {
    let data = BenchmarkData::new();
    let kinds: Vec<FormulationKind> = match args.formulation {
        Some(f) => vec![f.kind()],
        None => vec![
            FormulationKind::Coupled2D,
            FormulationKind::Coupled1D,
            FormulationKind::Stabilized1D,
        ],
    };
    let opts = CostOptions {
        rtol: args.rtol,
        kappa_max_level: args.kappa_max_level,
        identity_precond: args.precond == PrecondArg::Identity,
        ..CostOptions::default()
    };
    let (table, any_failed) = run_cost_study(&kinds, args.levels.iter(), &data, &opts);
    for fmt in args.output.formats_or(&ALL_FORMATS) {
        let name = format!("cost.{}", fmt.extension());
        write_text(&args.output.out_dir, &name, &table.emit(fmt))?;
    }
    print!("{}", table.to_markdown());
    Ok(if any_failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_solve_cmd(args: SolveArgs) -> Result<ExitCode> {
    let data = BenchmarkData::new();
    let kind = args.formulation.kind();
    let disc = Discretization::new(kind, args.level)?;
    let sys = assemble(&disc, args.form.form(), &data.problem())?;
    let dir = &args.output.out_dir;

    let mut report = None;
    let x = match args.solver {
        SolverArg::Direct => solve_direct(&sys)?,
        SolverArg::Minres => {
            let red = sys.reduce();
            let apply_k = |v: &[f64]| {
                let mut y = vec![0.0; red.dim()];
                red.apply(v, &mut y);
                y
            };
            let precond = match args.precond {
                PrecondArg::Fractional => Some(BlockDiagPrecond::build(&disc, &sys)?),
                PrecondArg::Identity => None,
            };
            let apply_pinv: Box<dyn Fn(&[f64]) -> Vec<f64> + '_> = match &precond {
                Some(p) => Box::new(move |r: &[f64]| p.apply_inverse(r)),
                None => Box::new(|r: &[f64]| r.to_vec()),
            };
            let (xr, rep) = minres(&apply_k, &apply_pinv, &red.rhs, args.rtol, 5000);
            if args.dump_residuals {
                let text: String = rep
                    .residual_history
                    .iter()
                    .map(|r| format!("{r:e}\n"))
                    .collect();
                let name = format!("residuals_{}_l{}.txt", kind.name(), args.level);
                write_text(dir, &name, &text)?;
            }
            report = Some(rep);
            red.expand(&sys, &xr)
        }
    };

    if args.dump_matrices {
        let sub = dir.join(format!("system_{}_l{}", kind.name(), args.level));
        sys.export(&sub)?;
        eprintln!("wrote {}", sub.display());
    }
    if args.dump_eigenvalues {
        let precond = BlockDiagPrecond::build(&disc, &sys)?;
        match precond.multiplier_block() {
            MultiplierBlock::Fractional(op) => {
                let text: String = op.eigenvalues().iter().map(|m| format!("{m:e}\n")).collect();
                let name = format!("eigenvalues_{}_l{}.txt", kind.name(), args.level);
                write_text(dir, &name, &text)?;
            }
            MultiplierBlock::L2PlusStab { .. } => {
                eprintln!("note: the stabilized multiplier block has no spectral pencil; no eigenvalues written");
            }
        }
    }

    let errors = compute_errors(&disc, &x)?;
    let constraint = sys.constraint_residual(&x);
    let record = serde_json::json!({
        "formulation": kind.name(),
        "level": args.level,
        "solver": match args.solver { SolverArg::Direct => "direct", SolverArg::Minres => "minres" },
        "dofs": sys.dim(),
        "constraint_residual": constraint,
        "errors": errors,
        "minres": report,
    });
    let mut text = serde_json::to_string_pretty(&record)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    text.push('\n');
    let name = format!("solve_{}_l{}.json", kind.name(), args.level);
    write_text(dir, &name, &text)?;

    println!(
        "{} level {}: {} dofs, |u|_H1 error {:.4e}, |w|_H1 error {:.4e}, constraint residual {:.2e}",
        kind.name(),
        args.level,
        sys.dim(),
        errors.u_h1,
        errors.w_h1,
        constraint
    );
    if let Some(rep) = &report {
        println!(
            "minres: {} iterations, converged = {}",
            rep.iterations, rep.converged
        );
        if !rep.converged {
            return Ok(ExitCode::from(2));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_dof_check_cmd(args: DofCheckArgs) -> Result<ExitCode> {
    let table = run_dof_check(args.levels.iter())?;
    for fmt in args
        .output
        .formats_or(&[OutFormat::Csv, OutFormat::Markdown])
    {
        let name = format!("dof.{}", fmt.extension());
        write_text(&args.output.out_dir, &name, &table.emit(fmt))?;
    }
    print!("{}", table.to_markdown());
    Ok(if table.all_match() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run_export_cmd(args: ExportArgs) -> Result<ExitCode> {
    let data = BenchmarkData::new();
    let kind = args.formulation.kind();
    let disc = Discretization::new(kind, args.level)?;
    let sys: BlockSaddleSystem = assemble(&disc, args.form.form(), &data.problem())?;
    let sub = args
        .output
        .out_dir
        .join(format!("system_{}_l{}", kind.name(), args.level));
    sys.export(&sub)?;
    println!(
        "exported {} level {} ({} dofs) to {}",
        kind.name(),
        args.level,
        sys.dim(),
        sub.display()
    );
    Ok(ExitCode::SUCCESS)
}
