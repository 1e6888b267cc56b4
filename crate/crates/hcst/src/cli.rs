//! The `hcst` command line.
//!
//! Exit codes: 0 on success, 2 for usage errors and invalid parameters,
//! 1 for I/O and data errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hcst_core::analytics::{frequency_difference_by_stage, reuse_interval_cdf_by_stage};
use hcst_core::sim::compare_policies;
use hcst_core::{
    binarize_labels, train_binary, train_multioutput, CacheConfig, Classifier, Dataset, KernelCache, KernelKind,
    KernelParams, Policy, SolverConfig,
};

use crate::report::{self, SolverStats, StatsReport};
use crate::workload::{self, TwoPhase};
use crate::{load_dataset, model_file, read_file, trace_file, write_file, Error};

#[derive(Debug, Parser)]
#[command(name = "hcst", version, about = "SVM training with adaptive kernel-row caching")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model from a LIBSVM dataset.
    Train(TrainArgs),
    /// Predict labels for a LIBSVM dataset.
    Predict(PredictArgs),
    /// Replay a trace under cache policies and the offline optimum.
    Simulate(SimulateArgs),
    /// Reuse-interval and frequency-difference statistics of a trace.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic trace.
    GenTrace(GenTraceArgs),
}

#[derive(Debug, Args)]
pub struct CacheArgs {
    /// Cache capacity in kernel rows.
    #[arg(short = 'm', long = "capacity", default_value_t = 512)]
    pub capacity: usize,
    /// Checkpoint spacing factor; checkpoints every round(lambda*m/q) iterations.
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    /// Replacement and kernel workers.
    #[arg(long, env = "KCACHE_WORKERS", default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Kernel: linear, gaussian or sigmoid (or 0, 2, 3).
    #[arg(short = 't', long = "kernel", default_value = "gaussian")]
    pub kernel: KernelKind,
    /// Kernel gamma [default: 1/dimension].
    #[arg(short = 'g', long)]
    pub gamma: Option<f64>,
    /// Sigmoid offset.
    #[arg(short = 'r', long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub coef0: f64,
    /// Regularization C.
    #[arg(short = 'c', long = "cost", default_value_t = 1.0)]
    pub c: f64,
    /// Termination tolerance.
    #[arg(short = 'e', long = "epsilon", default_value_t = 1e-3)]
    pub eps: f64,
    /// Cache policy: none, lru, lfu, lat, efu or hcst.
    #[arg(long = "cache", default_value = "hcst")]
    pub policy: Policy,
    #[command(flatten)]
    pub cache: CacheArgs,
    /// New working-set members per iteration.
    #[arg(short = 'q', default_value_t = 64)]
    pub q: usize,
    /// Stages for the per-stage hit ratios.
    #[arg(long, default_value_t = 4)]
    pub stages: usize,
    /// Declared dimension (may only exceed the largest feature index).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Write the access trace here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write stats JSON here instead of standard output.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    pub data: PathBuf,
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub data: PathBuf,
    pub model: PathBuf,
    /// Write one predicted label per line here instead of standard output.
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub trace: PathBuf,
    /// Comma-separated policies, or `all`.
    #[arg(long = "cache", default_value = "all")]
    pub policies: String,
    #[command(flatten)]
    pub cache: CacheArgs,
    /// Write the comparison CSV here instead of standard output.
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub stages: usize,
    /// Capacity the reuse-interval levels are relative to.
    #[arg(short = 'm', long = "capacity", default_value_t = 512)]
    pub capacity: u64,
    /// Write the stage CDF CSV here.
    #[arg(long)]
    pub cdf: Option<PathBuf>,
    /// Write the frequency-difference CSV here.
    #[arg(long)]
    pub diff: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraceKind {
    Zipf,
    TwoPhase,
}

#[derive(Debug, Args)]
pub struct GenTraceArgs {
    #[arg(long, value_enum, default_value_t = TraceKind::Zipf)]
    pub kind: TraceKind,
    #[arg(long, default_value_t = 10_000)]
    pub items: usize,
    /// Zipf accesses (the first phase for two-phase traces).
    #[arg(long, default_value_t = 100_000)]
    pub accesses: usize,
    #[arg(long, default_value_t = 1.2)]
    pub exponent: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Capacity the two-phase loop is sized against.
    #[arg(short = 'm', long = "capacity", default_value_t = 512)]
    pub capacity: usize,
    /// Passes over the loop in the second phase.
    #[arg(long, default_value_t = 50)]
    pub cycles: usize,
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cache_config(policy: Policy, q: usize, args: &CacheArgs) -> CacheConfig {
    CacheConfig::new(policy, args.capacity, q)
        .with_lambda(args.lambda)
        .with_workers(args.workers)
}

fn train(args: &TrainArgs) -> Result<(), Error> {
    let mut ds: Dataset = load_dataset(&args.data)?;
    if let Some(d) = args.dim {
        ds = ds.with_dim(d)?;
    }
    let gamma = args.gamma.unwrap_or(1.0 / ds.dim().max(1) as f64);
    let params = KernelParams::new(args.kernel, gamma, args.coef0, args.c)?;
    let solver = SolverConfig::new(params)
        .with_q(args.q)
        .with_eps(args.eps)
        .with_workers(args.cache.workers);
    solver.validate()?;
    let cache_cfg = cache_config(args.policy, args.q, &args.cache).with_trace(args.trace.is_some());
    let mut cache = KernelCache::new(cache_cfg.clone(), ds.len())?;
    eprintln!(
        "hcst: kernel={} gamma={gamma} C={} q={} policy={} capacity={} lambda={} N_c={} workers={}",
        params.kind,
        params.c,
        args.q,
        cache_cfg.policy,
        cache_cfg.capacity,
        cache_cfg.lambda,
        cache_cfg.checkpoint_interval(),
        cache_cfg.workers
    );

    let labels = ds.distinct_labels();
    let (classifier, stats, solvers) = match labels.as_slice() {
        [] | [_] => return Err(hcst_core::Error::DegenerateLabels.into()),
        [pos, neg] => {
            let y = binarize_labels(&ds, *pos)?;
            let out = train_binary(&ds, &y, &solver, &mut cache)?;
            if !out.converged {
                eprintln!(
                    "hcst: warning: stopped after {} iterations without converging",
                    out.iterations
                );
            }
            let clf = Classifier::Binary {
                model: out.model,
                labels: [*pos, *neg],
            };
            (clf, out.stats, Vec::new())
        }
        _ => {
            let run = train_multioutput(&ds, &solver, &mut cache)?;
            for (label, err) in &run.skipped {
                eprintln!("hcst: warning: skipped label {label}: {err}");
            }
            let solvers = run
                .runs
                .iter()
                .map(|r| SolverStats::new(r.label, r.output.iterations, r.output.converged, &r.output.stats))
                .collect();
            (run.classifier(), run.stats, solvers)
        }
    };

    write_file(&args.model, &model_file::write_model(&classifier))?;
    if let Some(path) = &args.trace {
        let trace = cache.take_trace().expect("trace recording was enabled");
        write_file(path, &trace_file::write_trace(&trace))?;
    }
    let mut rep = StatsReport::new(&cache_cfg, &stats, args.stages.max(1));
    rep.solvers = solvers;
    emit(args.stats.as_deref(), &rep.to_json())
}

fn predict(args: &PredictArgs) -> Result<(), Error> {
    let ds = load_dataset(&args.data)?;
    let clf = model_file::parse_model(&read_file(&args.model)?)?;
    let predicted = clf.predict_all(ds.instances());
    let correct = predicted.iter().zip(ds.labels()).filter(|(p, l)| p == l).count();
    eprintln!(
        "hcst: accuracy = {:.4}% ({correct}/{})",
        100.0 * correct as f64 / ds.len() as f64,
        ds.len()
    );
    let text: String = predicted.iter().map(|p| format!("{p}\n")).collect();
    emit(args.output.as_deref(), &text)
}

fn parse_policies(spec: &str) -> Result<Vec<Policy>, Error> {
    if spec.eq_ignore_ascii_case("all") {
        return Ok(Policy::ALL.to_vec());
    }
    spec.split(',')
        .map(|p| p.trim().parse::<Policy>().map_err(Error::from))
        .collect()
}

fn simulate(args: &SimulateArgs) -> Result<(), Error> {
    let trace = trace_file::parse_trace(&read_file(&args.trace)?)?;
    let policies = parse_policies(&args.policies)?;
    let cfg = cache_config(Policy::Hcst, trace.q, &args.cache);
    cfg.validate()?;
    eprintln!(
        "hcst: capacity={} q={} lambda={} N_c={} workers={}",
        cfg.capacity,
        trace.q,
        cfg.lambda,
        cfg.checkpoint_interval(),
        cfg.workers
    );
    let rows = compare_policies(&trace, &policies, cfg.capacity, cfg.lambda, cfg.workers)?;
    emit(args.out.as_deref(), &report::comparison_csv(&rows))
}

fn analyze(args: &AnalyzeArgs) -> Result<(), Error> {
    let trace = trace_file::parse_trace(&read_file(&args.trace)?)?;
    let cdf = reuse_interval_cdf_by_stage(&trace, args.stages, args.capacity)?;
    if cdf.iter().all(|s| s.cumulative.is_none()) {
        eprintln!("hcst: warning: trace has no repeated accesses");
    }
    let cdf_text = report::cdf_csv(&cdf);
    let diff_text = if args.stages >= 2 {
        Some(report::difference_csv(&frequency_difference_by_stage(
            &trace,
            args.stages,
        )?))
    } else {
        eprintln!("hcst: frequency differences need at least 2 stages; skipped");
        None
    };
    match (&args.cdf, &args.diff) {
        (None, None) => {
            print!("{cdf_text}");
            if let Some(d) = diff_text {
                print!("\n{d}");
            }
            Ok(())
        }
        (cdf_path, diff_path) => {
            emit(cdf_path.as_deref(), &cdf_text)?;
            match diff_text {
                Some(d) => emit(diff_path.as_deref(), &d),
                None => Ok(()),
            }
        }
    }
}

fn gen_trace(args: &GenTraceArgs) -> Result<(), Error> {
    let trace = match args.kind {
        TraceKind::Zipf => workload::zipf_trace(args.items, args.accesses, args.exponent, args.seed)?,
        TraceKind::TwoPhase => workload::two_phase_trace(TwoPhase {
            items: args.items,
            capacity: args.capacity,
            phase_a: args.accesses,
            cycles: args.cycles,
            exponent: args.exponent,
            seed: args.seed,
        })?,
    };
    emit(args.out.as_deref(), &trace_file::write_trace(&trace))
}

pub fn execute(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => analyze(a),
        Command::GenTrace(a) => gen_trace(a),
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Core(hcst_core::Error::InvalidParameter(_)) => 2,
        _ => 1,
    }
}

/// Parse `argv` (program name first), run the command and return the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("hcst: error: {e}");
            exit_code(&e)
        }
    }
}
