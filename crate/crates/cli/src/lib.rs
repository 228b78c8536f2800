//! Command-line driver for `plp`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use plp_core::format::{parse_polyhedron, write_polyhedron, FORMAT_VERSION};
use plp_core::minimize::minimize;
use plp_core::oracle::{fm_hull, fourier_motzkin, generate, poly_equal, run_bench, BenchConfig, GeneratorParams};
use plp_core::plp::{audit, hull, project, PlpSolution, SolveOptions};
use plp_core::{Error, Polyhedron};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_CONSISTENCY: i32 = 3;

/// Largest region count for which `--audit` checks pairwise overlap.
const AUDIT_OVERLAP_LIMIT: usize = 40;

#[derive(Debug, Parser)]
#[command(name = "plp", version = FORMAT_VERSION, about = "Exact polyhedral projection and convex hull by parametric linear programming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eliminate variables from a polyhedron.
    Project(ProjectArgs),
    /// Closed convex hull of two polyhedra.
    Hull(HullArgs),
    /// Remove redundant constraints.
    Minimize {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-7)]
        threshold: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time projections of random instances.
    Bench(BenchArgs),
    /// Print a random instance.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 1)]
    initial_points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-7)]
    threshold: f64,
    /// Compare against the Fourier-Motzkin oracle.
    #[arg(long)]
    check_oracle: bool,
    /// Recompute every region exactly and report discrepancies.
    #[arg(long)]
    audit: bool,
    #[arg(long)]
    dump_regions: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Reserved; the driver is single-threaded.
    #[arg(long)]
    threads: Option<usize>,
}

impl SolveArgs {
    fn options(&self) -> anyhow::Result<SolveOptions> {
        if self.threshold.is_nan() || self.threshold <= 0.0 {
            bail!(Usage(format!("threshold must be positive, got {}", self.threshold)));
        }
        Ok(SolveOptions {
            threshold: self.threshold,
            initial_points: self.initial_points,
            seed: self.seed,
            ..SolveOptions::default()
        })
    }
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[arg(long)]
    input: PathBuf,
    /// Variables to eliminate, 1-based and comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    eliminate: Vec<usize>,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Debug, Args)]
struct HullArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    cn: usize,
    #[arg(long)]
    vn: usize,
    #[arg(long)]
    pr: f64,
    #[arg(long, default_value_t = 0.0)]
    d: f64,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    oracle: bool,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    cn: usize,
    #[arg(long)]
    vn: usize,
    #[arg(long, default_value_t = 0.0)]
    d: f64,
    #[arg(long, default_value_t = 0.5)]
    pr: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

#[derive(Debug)]
struct Mismatch(String);

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Mismatch {}

fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return EXIT_USAGE;
        }
        if cause.is::<Mismatch>() {
            return EXIT_CONSISTENCY;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::EmptyPolyhedron | Error::NoInterior => EXIT_EMPTY,
                Error::Consistency(_) | Error::SingularBasis | Error::IterationLimit => EXIT_CONSISTENCY,
                _ => EXIT_USAGE,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_USAGE;
        }
    }
    EXIT_CONSISTENCY
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn read_polyhedron(path: &Path) -> anyhow::Result<Polyhedron> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_polyhedron(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Project(args) => run_project(args),
        Command::Hull(args) => run_hull(args),
        Command::Minimize {
            file,
            threshold,
            output,
        } => {
            let p = read_polyhedron(&file)?;
            let m = minimize(&p, threshold)?;
            emit(&write_polyhedron(&m), output.as_deref())
        }
        Command::Bench(args) => {
            let cfg = BenchConfig {
                constraints: args.cn,
                variables: args.vn,
                projection_ratio: args.pr,
                density: args.d,
                instances: args.instances,
                repeats: args.repeats,
                seed: args.seed,
                oracle: args.oracle,
                solve: SolveOptions {
                    seed: args.seed,
                    ..SolveOptions::default()
                },
            };
            let report = run_bench(&cfg)?;
            emit(
                &format!(
                    "config cn={} vn={} pr={} d={}\n{report}\n",
                    args.cn, args.vn, args.pr, args.d
                ),
                None,
            )?;
            if report.oracle_unequal > 0 {
                bail!(Mismatch(format!(
                    "{} instances differ from the oracle",
                    report.oracle_unequal
                )));
            }
            Ok(())
        }
        Command::Gen(args) => {
            let params = GeneratorParams {
                constraints: args.cn,
                variables: args.vn,
                projection_ratio: args.pr,
                density: args.d,
                seed: args.seed,
            };
            let p = generate(&params)?;
            let elim: Vec<String> = params.eliminated().iter().map(|j| (j + 1).to_string()).collect();
            let text = format!(
                "# cn={} vn={} pr={} d={} seed={}\n# eliminate {}\n{}",
                args.cn,
                args.vn,
                args.pr,
                args.d,
                args.seed,
                elim.join(","),
                write_polyhedron(&p)
            );
            emit(&text, args.output.as_deref())
        }
    }
}

fn finish(
    sol: &PlpSolution,
    solve: &SolveArgs,
    oracle: impl FnOnce() -> plp_core::Result<Polyhedron>,
) -> anyhow::Result<()> {
    let out = sol.polyhedron()?;
    if let Some(path) = &solve.dump_regions {
        fs::write(path, sol.dump_regions()).with_context(|| format!("writing {}", path.display()))?;
    }
    emit(&write_polyhedron(&out), solve.output.as_deref())?;
    eprintln!("regions: {}", sol.num_regions());
    if solve.audit {
        let report = audit(sol, AUDIT_OVERLAP_LIMIT)?;
        eprintln!("audit: {} regions checked", report.regions_checked);
        for d in &report.discrepancies {
            eprintln!("audit: {d}");
        }
        if !report.is_clean() {
            bail!(Mismatch(format!(
                "audit found {} discrepancies",
                report.discrepancies.len()
            )));
        }
    }
    if solve.check_oracle {
        match oracle() {
            Ok(expected) => {
                let verdict = poly_equal(&expected, &out);
                if verdict.equal {
                    eprintln!("oracle: equal");
                } else {
                    if let Some(s) = &verdict.witness {
                        eprintln!("oracle: separated by row {} at {:?}", s.direction, s.point);
                    }
                    bail!(Mismatch("result differs from the Fourier-Motzkin oracle".into()));
                }
            }
            Err(Error::OracleLimit(msg)) => eprintln!("oracle: skipped ({msg})"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(())
}

fn run_project(args: ProjectArgs) -> anyhow::Result<()> {
    let opts = args.solve.options()?;
    let p = read_polyhedron(&args.input)?;
    let mut elim = Vec::with_capacity(args.eliminate.len());
    for &j in &args.eliminate {
        if j == 0 || j > p.dim() {
            bail!(Usage(format!("variable {j} is outside 1..={}", p.dim())));
        }
        elim.push(j - 1);
    }
    let sol = project(&p, &elim, &opts)?;
    finish(&sol, &args.solve, || fourier_motzkin(&p, &elim))
}

fn run_hull(args: HullArgs) -> anyhow::Result<()> {
    let opts = args.solve.options()?;
    let a = read_polyhedron(&args.a)?;
    let b = read_polyhedron(&args.b)?;
    if a.dim() != b.dim() {
        bail!(Usage(format!("dimensions differ: {} and {}", a.dim(), b.dim())));
    }
    let sol = hull(&a, &b, &opts)?;
    finish(&sol, &args.solve, || fm_hull(&a, &b))
}
