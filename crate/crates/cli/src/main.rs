mod statefile;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sepcrit::criteria::{self, corollary_preset, Corollary, CriterionParams, Cut, EvalOptions};
use sepcrit::exec::Execution;
use sepcrit::qmat::{permute_systems, DensityMatrix};
use sepcrit::realign::{GSpec, MapOptions, PairMapKind};
use sepcrit::states::{self, NoiseFamily};
use sepcrit::sweep::{self, Detector, SweepOptions, Table};

/// Realignment-based separability criteria.
///
/// Exit codes: 0 when a command ran, 2 when `eval` detected entanglement,
/// 1 on any error.
#[derive(Parser)]
#[command(name = "sepcrit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one criterion on a state file and print the result as JSON.
    Eval(EvalArgs),
    /// Locate the white-noise threshold of a criterion on a state family.
    Sweep(SweepArgs),
    /// Recompute a reference table and compare against the published values.
    Reproduce(ReproduceArgs),
    /// Write a seeded random state file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    Ccnr,
    Zr,
    Ppt,
    Thm21,
    Hr,
    Thm31,
}

#[derive(Args)]
struct DetectorArgs {
    #[arg(long, value_enum)]
    criterion: CriterionArg,
    /// Bipartite split after subsystem k (bipartite criteria).
    #[arg(long, default_value_t = 1)]
    cut: usize,
    /// Subsystem pair for hr/thm31, as letters (`B,C`) or 0-based indices (`1,2`).
    #[arg(long, value_parser = parse_pair, default_value = "A,B")]
    pair: (usize, usize),
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    alpha: f64,
    /// Size of G; inferred from the file when `--g` names one.
    #[arg(long)]
    ell: Option<usize>,
    /// `identity` (ℓα² I), `ones` (α² E) or a JSON file `{ "re": [..], "im": [..] }`.
    #[arg(long, default_value = "identity")]
    g: String,
    /// Reorder subsystems before evaluating: new subsystem i is old subsystem perm[i].
    #[arg(long, value_delimiter = ',', value_parser = parse_index)]
    perm: Option<Vec<usize>>,
    /// Run single-threaded.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    state: PathBuf,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Skip the density-matrix checks on the input.
    #[arg(long)]
    no_validate: bool,
    /// For hr/thm31: try every ordered pair and report the largest margin.
    #[arg(long)]
    all_pairs: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Tiles,
    Shifts,
    Ghz,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Perturbation of the GHZ family.
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Bisection tolerance on p.
    #[arg(long, default_value_t = sweep::DEFAULT_BISECT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = sweep::DEFAULT_GRID_POINTS)]
    grid: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ReproduceArgs {
    /// `table1`, `table2` or `example21`.
    which: Table,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenType {
    RandomSeparable,
    RandomDensity,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long = "type", value_enum)]
    kind: GenType,
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// Number of product terms (random-separable).
    #[arg(long, default_value_t = 10)]
    terms: usize,
    /// Rank (random-density); full rank by default.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_index(s: &str) -> Result<usize, String> {
    let s = s.trim();
    if let Ok(i) = s.parse::<usize>() {
        return Ok(i);
    }
    match s.as_bytes() {
        [c] if c.is_ascii_alphabetic() => Ok((c.to_ascii_uppercase() - b'A') as usize),
        _ => Err(format!("`{s}` is neither an index nor a subsystem letter")),
    }
}

fn parse_index_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(parse_index).collect()
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    match parse_index_list(s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(format!("expected two subsystems, got `{s}`")),
    }
}

impl DetectorArgs {
    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            map: MapOptions {
                execution: self.execution(),
                ..MapOptions::default()
            },
            ..EvalOptions::default()
        }
    }

    fn params(&self) -> Result<CriterionParams> {
        let preset = match self.g.as_str() {
            "identity" => Some(Corollary::ScaledIdentity),
            "ones" => Some(Corollary::ScaledOnes),
            _ => None,
        };
        if let Some(variant) = preset {
            return Ok(corollary_preset(
                variant,
                self.alpha,
                self.ell.unwrap_or(1),
            )?);
        }
        let g = statefile::read_matrix(self.g.as_ref())?;
        if let Some(ell) = self.ell {
            if ell != g.rows() {
                bail!(
                    "--ell {ell} does not match the {}x{} G in {}",
                    g.rows(),
                    g.rows(),
                    self.g
                );
            }
        }
        Ok(CriterionParams::new(
            self.alpha,
            g.rows(),
            GSpec::Explicit(g),
        )?)
    }

    fn detector(&self) -> Result<Detector> {
        let cut = Cut(self.cut);
        let pair = self.pair;
        Ok(match self.criterion {
            CriterionArg::Ccnr => Detector::Ccnr { cut },
            CriterionArg::Zr => Detector::Zr { cut },
            CriterionArg::Ppt => Detector::Ppt { cut },
            CriterionArg::Hr => Detector::Hr { pair },
            CriterionArg::Thm21 => Detector::Theorem21 {
                cut,
                params: self.params()?,
            },
            CriterionArg::Thm31 => Detector::Theorem31 {
                pair,
                params: self.params()?,
            },
        })
    }

    fn arrange(&self, rho: DensityMatrix) -> Result<DensityMatrix> {
        Ok(match &self.perm {
            Some(perm) => permute_systems(&rho, perm)?,
            None => rho,
        })
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_eval(args: &EvalArgs) -> Result<ExitCode> {
    let rho = statefile::read(&args.state, !args.no_validate)?;
    let det = &args.detector;
    let rho = det.arrange(rho)?;
    let opts = det.eval_options();
    let result = if args.all_pairs {
        let kind = match det.criterion {
            CriterionArg::Hr => PairMapKind::Realign,
            CriterionArg::Thm31 => PairMapKind::Augmented(det.params()?),
            other => bail!("--all-pairs applies to hr and thm31, not {other:?}"),
        };
        criteria::multipartite_all_pairs(&rho, &kind, &opts)?
    } else {
        det.detector()?.evaluate_with(&rho, &opts)?
    };
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &result)?;
    writeln!(out)?;
    Ok(if result.detected {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode> {
    let family = match (args.family, args.epsilon) {
        (FamilyArg::Ghz, Some(eps)) => NoiseFamily::ghz(eps)?,
        (FamilyArg::Ghz, None) => bail!("--family ghz needs --epsilon"),
        (_, Some(_)) => bail!("--epsilon only applies to --family ghz"),
        (FamilyArg::Tiles, None) => NoiseFamily::tiles(),
        (FamilyArg::Shifts, None) => NoiseFamily::shifts(),
    };
    let det = &args.detector;
    let family = NoiseFamily::new(det.arrange(family.base().clone())?, family.label());
    if args.tol.is_nan() || args.tol <= 0.0 {
        bail!("--tol must be positive");
    }
    let opts = SweepOptions {
        grid_points: args.grid,
        bisect_tol: args.tol,
        execution: det.execution(),
        eval: det.eval_options(),
    };
    let report = sweep::find_threshold_with(&family, &det.detector()?, &opts)?;
    let mut out = output(None)?;
    match args.format {
        Format::Csv => report.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_reproduce(args: &ReproduceArgs) -> Result<ExitCode> {
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let opts = SweepOptions {
        execution,
        eval: EvalOptions {
            map: MapOptions {
                execution,
                ..MapOptions::default()
            },
            ..EvalOptions::default()
        },
        ..SweepOptions::default()
    };
    let report = sweep::reproduce_table_with(args.which, &opts)?;
    let mut out = output(args.out.as_ref())?;
    match args.format {
        Format::Csv => report.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    let misses = report
        .rows
        .iter()
        .filter(|r| r.within_tolerance == Some(false))
        .count();
    eprintln!(
        "{} rows, {misses} outside tolerance {:.0e}",
        report.rows.len(),
        report.tolerance
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode> {
    if args.dims.is_empty() || args.dims.contains(&0) {
        bail!("--dims must list positive subsystem dimensions");
    }
    let rho = match args.kind {
        GenType::RandomSeparable => states::random_separable(&args.dims, args.terms, args.seed)?,
        GenType::RandomDensity => {
            let d: usize = args.dims.iter().product();
            states::random_density(d, args.rank.unwrap_or(d), args.seed)?
                .with_dims(args.dims.clone())?
        }
    };
    let mut out = output(args.out.as_ref())?;
    statefile::write(&rho, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
