//! The `grasspos` command line. [`run`] returns the process exit status:
//! 0 pass, 1 verification failure, 2 usage or input error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use grasspos_core::samplers::{Sample, SamplerKind, SamplerSpec, DEFAULT_ENTRY_BOUND};
use grasspos_core::tp_flow::{FlowConfig, FlowContext};
use grasspos_core::verify::{run_inclusion_suite, suite_sample, verify_closure, verify_theorem_with, SuiteReport};
use grasspos_core::{classify, plucker_vector, Error, IndexSet, Rational, Subspace, DEFAULT_TOLERANCE};
use rayon::prelude::*;

use crate::matrix_text::{format_matrix, parse_matrix, ModeRequest, ParsedMatrix};
use crate::report::{self, Destination, FlowSummary, Format};

/// Environment variable naming the directory reports go to when `--output`
/// is absent.
pub const OUT_DIR_ENV: &str = "GRASSPOS_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "grasspos", version, about = "Positivity tests and flows on real Grassmannians")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the Plücker coordinates of the row space of a matrix file.
    Plucker(MatrixArgs),
    /// Classify the row space of a matrix file.
    Classify(ClassifyArgs),
    /// Iterate the flow toward its fixed subspace and report the trace.
    Flow(FlowArgs),
    /// Certify a positive start: flow, convergence and path check.
    Verify(FlowArgs),
    /// Run the inclusion suite on a seeded battery.
    Suite(SuiteArgs),
    /// Generate a subspace and print its generator matrix.
    Sample(SampleArgs),
    /// Flow a coordinate subspace for decreasing times and check positivity.
    Closure(ClosureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeFlag {
    Exact,
    Float,
}

#[derive(Debug, Args)]
struct ModeArgs {
    /// Arithmetic backend; by default exact unless the input has decimals.
    #[arg(long, value_enum)]
    mode: Option<ModeFlag>,
    /// Relative zero tolerance in floating mode.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
}

impl ModeArgs {
    fn request(&self) -> ModeRequest {
        match self.mode {
            None => ModeRequest::Auto,
            Some(ModeFlag::Exact) => ModeRequest::Exact,
            Some(ModeFlag::Float) => ModeRequest::Float,
        }
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Report path; defaults to $GRASSPOS_OUT_DIR/<command>.<ext>, else stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct MatrixArgs {
    file: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    file: PathBuf,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerFlag {
    Vandermonde,
    Coordinate,
    #[value(alias = "random_rational")]
    RandomRational,
    #[value(alias = "flowed_coordinate")]
    FlowedCoordinate,
    #[value(alias = "mixed_sign")]
    MixedSign,
}

#[derive(Debug, Args)]
struct SamplerArgs {
    #[arg(long, value_enum)]
    sampler: Option<SamplerFlag>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Vandermonde nodes, e.g. `1,2` or `1/2,3`.
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<String>>,
    /// Index set for coordinate samplers, e.g. `1,3`.
    #[arg(long, value_delimiter = ',')]
    set: Option<Vec<usize>>,
    /// Flow time for the flowed-coordinate sampler.
    #[arg(long, default_value_t = 0.1)]
    r: f64,
    #[arg(long, default_value_t = DEFAULT_ENTRY_BOUND)]
    entry_bound: i64,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Matrix file whose row space is the start.
    #[arg(long, conflicts_with = "sampler")]
    start_file: Option<PathBuf>,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[arg(long, default_value_t = 0.1)]
    r_step: f64,
    #[arg(long, default_value_t = 1e-9)]
    epsilon: f64,
    #[arg(long, default_value_t = 200)]
    n_max: usize,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; the report does not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// JSON sampler spec; replaces the sampler flags.
    #[arg(long, conflicts_with = "sampler")]
    config: Option<PathBuf>,
    /// Also write the effective JSON spec here.
    #[arg(long)]
    spec_out: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClosureArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    set: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.1, 0.01])]
    r_list: Vec<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

/// How a command ended when it did not pass.
#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Verification(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArguments(_)
            | Error::RankDeficient { .. }
            | Error::ModeMismatch(_)
            | Error::SizeLimit(_)
            | Error::PreconditionViolation(_) => Failure::Usage(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("grasspos: {f}");
            f.code()
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let out_dir = out_dir.as_deref();
    match command {
        Command::Plucker(a) => cmd_plucker(a, out_dir),
        Command::Classify(a) => cmd_classify(a, out_dir),
        Command::Flow(a) => cmd_flow(a, out_dir),
        Command::Verify(a) => cmd_verify(a, out_dir),
        Command::Suite(a) => cmd_suite(a, out_dir),
        Command::Sample(a) => cmd_sample(a, out_dir),
        Command::Closure(a) => cmd_closure(a, out_dir),
    }
}

fn write(content: &str, explicit: Option<&Path>, out_dir: Option<&Path>, stem: &str, format: Format) -> Outcome {
    let dest = Destination::resolve(explicit, out_dir, stem, format);
    report::emit(content, &dest).map_err(|e| Failure::Usage(format!("cannot write report: {e}")))
}

enum Start {
    Exact(Subspace<Rational>),
    Float(Subspace<f64>),
}

fn read_subspace(path: &Path, mode: &ModeArgs) -> Result<Start, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let parsed = parse_matrix(&text, mode.request()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(match parsed {
        ParsedMatrix::Exact(m) => Start::Exact(Subspace::with_tolerance(m, mode.tolerance)?),
        ParsedMatrix::Float(m) => Start::Float(Subspace::with_tolerance(m, mode.tolerance)?),
    })
}

fn check_shape(n: Option<usize>, k: Option<usize>, actual_n: usize, actual_k: usize) -> Outcome {
    if n.is_some_and(|n| n != actual_n) || k.is_some_and(|k| k != actual_k) {
        return Err(Failure::Usage(format!(
            "start has N = {actual_n}, k = {actual_k}, which does not match --n/--k"
        )));
    }
    Ok(())
}

fn sampler_spec(n: Option<usize>, k: Option<usize>, s: &SamplerArgs) -> Result<SamplerSpec, Failure> {
    let (Some(n), Some(k)) = (n, k) else {
        return Err(Failure::Usage("--n and --k are required with --sampler".into()));
    };
    let set = s.set.as_ref().map(|v| IndexSet::new(v.clone(), n)).transpose()?;
    let kind = match s.sampler.ok_or_else(|| Failure::Usage("give --start-file or --sampler".into()))? {
        SamplerFlag::Vandermonde => SamplerKind::Vandermonde { nodes: s.nodes.clone() },
        SamplerFlag::Coordinate => SamplerKind::Coordinate { set },
        SamplerFlag::RandomRational => SamplerKind::RandomRational { entry_bound: s.entry_bound },
        SamplerFlag::FlowedCoordinate => SamplerKind::FlowedCoordinate { set, r: s.r },
        SamplerFlag::MixedSign => SamplerKind::MixedSign { entry_bound: s.entry_bound },
    };
    Ok(SamplerSpec { n, k, seed: s.seed, kind })
}

fn flow_start(a: &FlowArgs) -> Result<Start, Failure> {
    if a.mode.mode == Some(ModeFlag::Exact) {
        return Err(Failure::Usage("flow requires floating mode".into()));
    }
    let start = match &a.start_file {
        Some(path) => read_subspace(path, &a.mode)?,
        None => match sampler_spec(a.n, a.k, &a.sampler)?.generate()? {
            Sample::Exact(e) => Start::Exact(e),
            Sample::Flowed(p) => Start::Float(p.subspace),
        },
    };
    let (n, k) = match &start {
        Start::Exact(e) => (e.n(), e.k()),
        Start::Float(e) => (e.n(), e.k()),
    };
    check_shape(a.n, a.k, n, k)?;
    Ok(start)
}

fn flow_config(a: &FlowArgs) -> Result<FlowConfig, Failure> {
    let cfg = FlowConfig { r_step: a.r_step, epsilon: a.epsilon, n_max: a.n_max };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_plucker(a: MatrixArgs, out_dir: Option<&Path>) -> Outcome {
    let line = match read_subspace(&a.file, &a.mode)? {
        Start::Exact(e) => plucker_line(&plucker_vector(&e)),
        Start::Float(e) => plucker_line(&plucker_vector(&e)),
    };
    let dest = Destination::resolve(a.output.as_deref(), out_dir, "plucker", Format::Json);
    let dest = match dest {
        Destination::File(p) if a.output.is_none() => Destination::File(p.with_extension("txt")),
        other => other,
    };
    report::emit(&line, &dest).map_err(|e| Failure::Usage(format!("cannot write report: {e}")))
}

fn plucker_line<S: grasspos_core::Scalar>(p: &grasspos_core::PluckerVector<S>) -> String {
    let parts: Vec<String> = p.entries().map(|(set, c)| format!("{set}:{c}")).collect();
    format!("{}\n", parts.join(" "))
}

fn cmd_classify(a: ClassifyArgs, out_dir: Option<&Path>) -> Outcome {
    let c = match read_subspace(&a.file, &a.mode)? {
        Start::Exact(e) => classify(&e)?,
        Start::Float(e) => classify(&e)?,
    };
    let content = match a.out.format {
        Format::Json => report::to_json(&c),
        Format::Csv => report::classification_csv(&c),
    };
    write(&content, a.out.output.as_deref(), out_dir, "classify", a.out.format)
}

fn cmd_flow(a: FlowArgs, out_dir: Option<&Path>) -> Outcome {
    let cfg = flow_config(&a)?;
    let start = flow_start(&a)?;
    let run = match &start {
        Start::Exact(e) => FlowContext::new(e.ambient())?.run_plucker(&plucker_vector(e).to_f64(), e.ambient(), &cfg)?,
        Start::Float(e) => FlowContext::new(e.ambient())?.run(e, &cfg)?,
    };
    let content = match a.out.format {
        Format::Json => report::to_json(&FlowSummary::from(&run.trace)),
        Format::Csv => report::trace_csv(&run.trace),
    };
    write(&content, a.out.output.as_deref(), out_dir, "flow", a.out.format)?;
    if let Some(step) = run.contact {
        return Err(Failure::Verification(format!(
            "boundary contact at step {} (margin {:e})",
            step.n, step.min_margin
        )));
    }
    if run.trace.converged_at.is_none() {
        return Err(Failure::Verification(format!(
            "no convergence to epsilon {:e} within {} steps",
            cfg.epsilon, cfg.n_max
        )));
    }
    Ok(())
}

fn cmd_verify(a: FlowArgs, out_dir: Option<&Path>) -> Outcome {
    let cfg = flow_config(&a)?;
    let start = flow_start(&a)?;
    let cert = match &start {
        Start::Exact(e) => verify_theorem_with(&FlowContext::new(e.ambient())?, e, &cfg)?,
        Start::Float(e) => verify_theorem_with(&FlowContext::new(e.ambient())?, e, &cfg)?,
    };
    let content = match a.out.format {
        Format::Json => report::to_json(&cert),
        Format::Csv => report::certificate_csv(&cert),
    };
    write(&content, a.out.output.as_deref(), out_dir, "verify", a.out.format)?;
    if cert.verdict.pass {
        Ok(())
    } else {
        Err(Failure::Verification(cert.verdict.reason))
    }
}

/// The inclusion suite spread over `jobs` threads; same report as the
/// sequential run.
pub fn parallel_suite(n: usize, k: usize, samples: usize, seed: u64, jobs: usize) -> Result<SuiteReport, Error> {
    if jobs <= 1 {
        return run_inclusion_suite(n, k, samples, seed);
    }
    // validates the arguments before spawning anything
    run_inclusion_suite(n, k, 1, seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let outcomes = pool.install(|| (0..samples).into_par_iter().map(|i| suite_sample(n, k, seed, i)).collect());
    Ok(SuiteReport::assemble(n, k, seed, outcomes))
}

fn cmd_suite(a: SuiteArgs, out_dir: Option<&Path>) -> Outcome {
    let report = parallel_suite(a.n, a.k, a.samples, a.seed, a.jobs)?;
    let content = match a.out.format {
        Format::Json => report::to_json(&report),
        Format::Csv => report::suite_csv(&report),
    };
    write(&content, a.out.output.as_deref(), out_dir, "suite", a.out.format)?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{} suite failures", report.failures.len())))
    }
}

fn cmd_sample(a: SampleArgs, out_dir: Option<&Path>) -> Outcome {
    let spec = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<SamplerSpec>(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => sampler_spec(a.n, a.k, &a.sampler)?,
    };
    if let Some(path) = &a.spec_out {
        report::emit(&report::to_json(&spec), &Destination::File(path.clone()))
            .map_err(|e| Failure::Usage(format!("cannot write spec: {e}")))?;
    }
    let text = match spec.generate()? {
        Sample::Exact(e) => format_matrix(e.rows()),
        Sample::Flowed(p) => format_matrix(p.subspace.rows()),
    };
    let dest = match (&a.output, out_dir) {
        (Some(p), _) => Destination::File(p.clone()),
        (None, Some(dir)) => Destination::File(dir.join("sample.txt")),
        (None, None) => Destination::Stdout,
    };
    report::emit(&text, &dest).map_err(|e| Failure::Usage(format!("cannot write report: {e}")))
}

fn cmd_closure(a: ClosureArgs, out_dir: Option<&Path>) -> Outcome {
    let set = IndexSet::new(a.set.clone(), a.n)?;
    let report = verify_closure(&set, a.n, &a.r_list)?;
    let content = match a.out.format {
        Format::Json => report::to_json(&report),
        Format::Csv => report::closure_csv(&report),
    };
    write(&content, a.out.output.as_deref(), out_dir, "closure", a.out.format)?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Verification("closure check failed".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_suite_matches_sequential() {
        let seq = run_inclusion_suite(4, 2, 24, 5).unwrap();
        let par = parallel_suite(4, 2, 24, 5, 4).unwrap();
        assert_eq!(report::to_json(&seq), report::to_json(&par));
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["grasspos", "suite", "--n", "4"]), 2);
        assert_eq!(run(["grasspos", "suite", "--n", "4", "--k", "2", "--samples", "0"]), 2);
        assert_eq!(run(["grasspos", "bogus"]), 2);
    }

    #[test]
    fn error_classes() {
        assert_eq!(Failure::from(Error::ModeMismatch("x")).code(), 2);
        assert_eq!(Failure::from(Error::HypothesisNotMet("x".into())).code(), 1);
        assert_eq!(Failure::from(Error::RankDeficient { expected: 2, found: 1 }).code(), 2);
    }
}
