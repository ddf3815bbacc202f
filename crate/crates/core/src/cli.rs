//! Command-line front end: `lifting <subcommand> [flags]`.
//!
//! Exit codes: 0 on success, 1 when a run fails, 2 for invalid flags.

use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{gen_outlier_data, run_fit1d, run_fit2d, run_robust, ExperimentConfig};
use crate::lifting::KnotSequence;
use crate::loss::LossSpec;
use crate::nn::{gradient_check, Dense, Layer, Lifting, Network, Tensor2};
use crate::output_lifting::{brute_force_solve, build_cost_matrix, solve_closed_form};
use crate::rng::CounterRng;
use crate::simplex::{barycentric, grid_triangulation, locate_simplex, mesh_diameter, read_mesh, write_mesh};

/// Gradient checks pass at or below this relative error.
pub const GRADCHECK_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "lifting", version, about = "Lifting layers: experiments and utilities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit sin(x) from 50 samples with a Lift-Net and a ReLU network.
    Fit1d(Fit1dArgs),
    /// Fit cos(x2 sin x1) with networks and vector-valued lifting splines.
    Fit2d(Fit2dArgs),
    /// Robust regression with outliers: lifted convex solution vs direct fits.
    Robust(RobustArgs),
    /// Re-run an experiment from a resolved config sidecar.
    Rerun(RerunArgs),
    /// Compare back-propagated gradients with central differences.
    Gradcheck(GradcheckArgs),
    /// Describe a simplicial mesh read from file or built on a grid.
    Meshinfo(MeshinfoArgs),
    /// Build the output-lifting cost matrix and its optimal assignment.
    Costmatrix(CostmatrixArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// PRNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// SGD learning rate.
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    lr: f64,
    /// SGD momentum, in [0, 1).
    #[arg(long, default_value_t = 0.9, value_parser = unit_interval)]
    momentum: f64,
    /// Mini-batch size.
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u64).range(1..))]
    batch_size: u64,
    /// L2 weight decay.
    #[arg(long, default_value_t = 1e-4, value_parser = nonnegative)]
    weight_decay: f64,
    /// Output directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct Fit1dArgs {
    #[command(flatten)]
    train: TrainArgs,
    /// Training epochs.
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    epochs: u64,
    /// Knots of the Lift-Net on [0, 2 pi].
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    knots: u64,
    /// Hidden units of the ReLU network.
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u64).range(1..))]
    hidden: u64,
    /// Training samples.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    samples: u64,
    /// Epochs at which network checkpoints are saved.
    #[arg(long, value_delimiter = ',', default_value = "25,75,200,2000")]
    checkpoints: Vec<usize>,
}

#[derive(Debug, Args)]
struct Fit2dArgs {
    #[command(flatten)]
    train: TrainArgs,
    /// Training epochs.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    epochs: u64,
    /// Lifting knots per coordinate on [0, 2 pi].
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    knots: u64,
    /// Width of the hidden ReLU layer.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    hidden: u64,
    /// Training grid points per axis.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    grid: u64,
    /// Epochs at which network checkpoints are saved.
    #[arg(long, value_delimiter = ',', default_value = "25,75,200")]
    checkpoints: Vec<usize>,
}

#[derive(Debug, Args)]
struct RobustArgs {
    /// PRNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples, including outliers.
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(2..))]
    samples: u64,
    /// Fraction of samples replaced by outliers, in [0, 1).
    #[arg(long, default_value_t = 0.4, value_parser = unit_interval)]
    outlier_fraction: f64,
    /// Standard deviation of the inlier noise.
    #[arg(long, default_value_t = 0.02, value_parser = nonnegative)]
    noise: f64,
    /// Input knots on [0, 1].
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    knots_x: u64,
    /// Output knots on [0, 1].
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    knots_y: u64,
    /// Truncation radius of the loss.
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    truncation: f64,
    /// Gradient-descent iterations of each direct fit.
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    iterations: u64,
    /// Learning rate of the direct fits.
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    lr: f64,
    /// Momentum of the direct fits, in [0, 1).
    #[arg(long, default_value_t = 0.9, value_parser = unit_interval)]
    momentum: f64,
    /// Standard deviation of the Gaussian initial weights.
    #[arg(long, default_value_t = 0.1, value_parser = nonnegative)]
    init_sigma: f64,
    /// Number of direct fits from different initial weights.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    restarts: u64,
    /// Output directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RerunArgs {
    /// Config sidecar written by a previous run.
    config: PathBuf,
    /// Output directory; defaults to the one recorded in the sidecar.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Arch {
    /// fc -> fc
    Linear,
    /// fc -> relu -> fc
    Relu,
    /// fc -> maxout(2) -> fc
    Maxout,
    /// standard lifting -> fc
    Lift1d,
    /// coordinate-wise lifting -> fc -> relu -> fc on 2-D inputs
    Lift2d,
    /// fc -> scaled lifting -> fc
    Scaled,
    /// fc -> relu -> fc on 1-D inputs
    Std1d,
    /// fc -> fc -> relu -> fc on 2-D inputs
    Std2d,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    /// Network architecture.
    #[arg(long, value_enum, default_value_t = Arch::Lift2d)]
    arch: Arch,
    /// PRNG seed of the first trial.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent trials with seeds seed, seed + 1, ...
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Samples per trial.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    batch: u64,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    step: f64,
}

#[derive(Debug, Args)]
struct MeshinfoArgs {
    /// Mesh file to read; without it a Kuhn grid mesh is built.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Grid vertices per axis.
    #[arg(long, default_value_t = 11, value_parser = clap::value_parser!(u64).range(2..))]
    grid: u64,
    /// Grid dimension.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=6))]
    dim: u64,
    /// Lower grid bound on every axis.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lower: f64,
    /// Upper grid bound on every axis.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    upper: f64,
    /// Point to locate, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    locate: Option<Vec<f64>>,
    /// Write the mesh to this file.
    #[arg(long)]
    write: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LossArg {
    Squared,
    Absolute,
    Truncated,
}

#[derive(Debug, Args)]
struct CostmatrixArgs {
    /// CSV file of `x,y` samples; without it outlier data is generated.
    #[arg(long)]
    data: Option<PathBuf>,
    /// PRNG seed for generated data.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Generated samples.
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Outlier fraction of generated data, in [0, 1).
    #[arg(long, default_value_t = 0.4, value_parser = unit_interval)]
    outlier_fraction: f64,
    /// Inlier noise of generated data.
    #[arg(long, default_value_t = 0.02, value_parser = nonnegative)]
    noise: f64,
    /// Input knots spanning the data's x-range.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(2..))]
    knots_x: u64,
    /// Output knots on [y-min, y-max].
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    knots_y: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    y_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    y_max: f64,
    /// Loss on the output knots.
    #[arg(long, value_enum, default_value_t = LossArg::Truncated)]
    loss: LossArg,
    /// Truncation radius of the truncated linear loss.
    #[arg(long, default_value_t = 0.1, value_parser = positive)]
    truncation: f64,
    /// Cross-check the closed form against exhaustive search.
    #[arg(long)]
    verify: bool,
    /// Output directory.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

fn number(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|e| e.to_string())
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 && v.is_finite() { Ok(v) } else { Err(format!("{v} is not positive")) }
}

fn nonnegative(s: &str) -> std::result::Result<f64, String> {
    let v = number(s)?;
    if v >= 0.0 && v.is_finite() { Ok(v) } else { Err(format!("{v} is negative")) }
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    let v = number(s)?;
    if (0.0..1.0).contains(&v) { Ok(v) } else { Err(format!("{v} is outside [0, 1)")) }
}

/// A failure tagged with the library operation that raised it.
struct Failure {
    operation: &'static str,
    error: Error,
}

trait Context<T> {
    fn during(self, operation: &'static str) -> std::result::Result<T, Failure>;
}

impl<T> Context<T> for Result<T> {
    fn during(self, operation: &'static str) -> std::result::Result<T, Failure> {
        self.map_err(|error| Failure { operation, error })
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `argv` (program name first) and runs the selected subcommand.
pub fn parse_and_dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            if !e.to_string().contains("Usage:") {
                eprintln!("\n{}", usage_for(args.get(1).and_then(|a| a.to_str())));
            }
            return 2;
        }
    };
    let outcome = match cli.command {
        Command::Fit1d(a) => fit1d(a),
        Command::Fit2d(a) => fit2d(a),
        Command::Robust(a) => robust(a),
        Command::Rerun(a) => rerun(a),
        Command::Gradcheck(a) => gradcheck(a),
        Command::Meshinfo(a) => meshinfo(a),
        Command::Costmatrix(a) => costmatrix(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure { operation, error }) => {
            eprintln!("error: {operation} failed: {error}");
            1
        }
    }
}

fn usage_for(subcommand: Option<&str>) -> clap::builder::StyledStr {
    let mut cmd = Cli::command();
    cmd.build();
    match subcommand.and_then(|name| cmd.find_subcommand_mut(name)) {
        Some(sub) => sub.render_usage(),
        None => cmd.render_usage(),
    }
}

fn apply_train(cfg: &mut ExperimentConfig, t: TrainArgs) {
    cfg.seed = t.seed;
    cfg.learning_rate = t.lr;
    cfg.momentum = t.momentum;
    cfg.batch_size = t.batch_size as usize;
    cfg.weight_decay = t.weight_decay;
    cfg.output_dir = Some(t.out);
}

fn fit1d(a: Fit1dArgs) -> Outcome {
    let mut cfg = ExperimentConfig::fit1d();
    apply_train(&mut cfg, a.train);
    cfg.epochs = a.epochs as usize;
    cfg.knots = a.knots as usize;
    cfg.hidden = a.hidden as usize;
    cfg.samples = a.samples as usize;
    cfg.checkpoint_epochs = a.checkpoints;
    execute(cfg)
}

fn fit2d(a: Fit2dArgs) -> Outcome {
    let mut cfg = ExperimentConfig::fit2d();
    apply_train(&mut cfg, a.train);
    cfg.epochs = a.epochs as usize;
    cfg.knots = a.knots as usize;
    cfg.hidden = a.hidden as usize;
    cfg.samples = a.grid as usize;
    cfg.checkpoint_epochs = a.checkpoints;
    execute(cfg)
}

fn robust(a: RobustArgs) -> Outcome {
    let cfg = ExperimentConfig {
        seed: a.seed,
        samples: a.samples as usize,
        outlier_fraction: a.outlier_fraction,
        noise: a.noise,
        knots: a.knots_x as usize,
        output_knots: a.knots_y as usize,
        truncation: a.truncation,
        epochs: a.iterations as usize,
        batch_size: a.samples as usize,
        learning_rate: a.lr,
        momentum: a.momentum,
        init_sigma: a.init_sigma,
        restarts: a.restarts as usize,
        output_dir: Some(a.out),
        ..ExperimentConfig::robust()
    };
    execute(cfg)
}

fn rerun(a: RerunArgs) -> Outcome {
    let text = fs::read_to_string(&a.config).map_err(Error::from).during("read config sidecar")?;
    let mut cfg = ExperimentConfig::from_text(&text).during("experiments::ExperimentConfig::from_text")?;
    if let Some(out) = a.out {
        cfg.output_dir = Some(out);
    }
    execute(cfg)
}

fn execute(cfg: ExperimentConfig) -> Outcome {
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("runs"));
    let (summary, files) = match cfg.experiment.as_str() {
        "fit1d" => {
            let r = run_fit1d(&cfg).during("experiments::run_fit1d")?;
            (r.summary(), r.write_outputs(&cfg, &dir).during("experiments::Fit1dReport::write_outputs")?)
        }
        "fit2d" => {
            let r = run_fit2d(&cfg).during("experiments::run_fit2d")?;
            (r.summary(), r.write_outputs(&cfg, &dir).during("experiments::Fit2dReport::write_outputs")?)
        }
        "robust" => {
            let r = run_robust(&cfg).during("experiments::run_robust")?;
            (r.summary(), r.write_outputs(&cfg, &dir).during("experiments::RobustReport::write_outputs")?)
        }
        other => {
            return Err(Failure { operation: "dispatch", error: Error::Config(format!("unknown experiment {other}")) })
        }
    };
    for (k, v) in summary {
        println!("{k:<28} {v}");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(0)
}

fn gradcheck_network(arch: Arch, rng: &mut CounterRng) -> Network {
    let sym = || KnotSequence::symmetric(1.5, 5).expect("valid knots");
    let build = |inputs, layers| Network::new(inputs, layers).expect("consistent widths");
    match arch {
        Arch::Linear => build(2, vec![
            Layer::Dense(Dense::init_uniform(2, 3, true, rng)),
            Layer::Dense(Dense::init_uniform(3, 1, true, rng)),
        ]),
        Arch::Relu => build(2, vec![
            Layer::Dense(Dense::init_uniform(2, 4, true, rng)),
            Layer::Relu,
            Layer::Dense(Dense::init_uniform(4, 1, true, rng)),
        ]),
        Arch::Maxout => build(2, vec![
            Layer::Dense(Dense::init_uniform(2, 4, true, rng)),
            Layer::Maxout { group: 2 },
            Layer::Dense(Dense::init_uniform(2, 1, true, rng)),
        ]),
        Arch::Lift1d => Network::lift_net_1d(KnotSequence::uniform(-1.0, 1.0, 8).expect("valid knots"), rng),
        Arch::Lift2d => Network::lift_net(2, KnotSequence::uniform(-1.0, 1.0, 20).expect("valid knots"), 20, rng),
        Arch::Scaled => build(2, vec![
            Layer::Dense(Dense::init_uniform(2, 4, true, rng)),
            Layer::Lifting(Lifting::scaled(sym())),
            Layer::Dense(Dense::init_uniform(16, 1, true, rng)),
        ]),
        Arch::Std1d => Network::std_net_1d(9, rng),
        Arch::Std2d => Network::std_net(2, 40, 20, rng),
    }
}

fn gradcheck(a: GradcheckArgs) -> Outcome {
    let mut worst = 0.0f64;
    for trial in 0..a.trials {
        let seed = a.seed.wrapping_add(trial);
        let mut rng = CounterRng::new(seed);
        let mut net = gradcheck_network(a.arch, &mut rng);
        let (rows, cols) = (a.batch as usize, net.input_width());
        let x = Tensor2::from_vec(rows, cols, (0..rows * cols).map(|_| rng.uniform_range(-0.9, 0.9)).collect())
            .during("nn::Tensor2::from_vec")?;
        let y = Tensor2::from_vec(rows, 1, (0..rows).map(|_| rng.uniform_range(-1.0, 1.0)).collect())
            .during("nn::Tensor2::from_vec")?;
        let report = gradient_check(&mut net, &x, &y, &LossSpec::squared(), a.step).during("nn::gradient_check")?;
        println!(
            "seed {seed}: max relative error {:.3e} over {} parameters ({} retries)",
            report.max_relative_error, report.parameters_checked, report.retries
        );
        worst = worst.max(report.max_relative_error);
    }
    let pass = worst <= GRADCHECK_TOLERANCE;
    println!("max relative error {worst:.3e} ({})", if pass { "pass" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}

fn meshinfo(a: MeshinfoArgs) -> Outcome {
    let tri = match &a.mesh {
        Some(path) => {
            let file = fs::File::open(path).map_err(Error::from).during("open mesh file")?;
            read_mesh(BufReader::new(file)).during("simplex::read_mesh")?
        }
        None => {
            let axis = KnotSequence::uniform(a.lower, a.upper, a.grid as usize).during("lifting::KnotSequence::uniform")?;
            grid_triangulation(&vec![axis; a.dim as usize]).during("simplex::grid_triangulation")?
        }
    };
    println!("dimension  {}", tri.dim());
    println!("vertices   {}", tri.vertex_count());
    println!("simplices  {}", tri.simplex_count());
    println!("diameter   {}", mesh_diameter(&tri));
    println!("grid       {}", if tri.grid_knots().is_some() { "yes" } else { "no" });
    if let Some(point) = &a.locate {
        let index = locate_simplex(point, &tri).during("simplex::locate_simplex")?;
        let bc = barycentric(point, &tri, index).during("simplex::barycentric")?;
        println!("simplex    {index} {:?}", tri.simplex(index));
        println!("weights    {:?}", bc.lambdas);
    }
    if let Some(path) = &a.write {
        let file = fs::File::create(path).map_err(Error::from).during("create mesh file")?;
        write_mesh(&tri, std::io::BufWriter::new(file)).during("simplex::write_mesh")?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.chars().next().is_some_and(|c| c.is_alphabetic())) {
            continue;
        }
        let bad = |m: String| Error::Parse { line: i + 1, message: m };
        let (x, y) = line.split_once(',').ok_or_else(|| bad("expected `x,y`".into()))?;
        let x: f64 = x.trim().parse().map_err(|e| bad(format!("{e}")))?;
        let y: f64 = y.trim().parse().map_err(|e| bad(format!("{e}")))?;
        out.push((x, y));
    }
    Ok(out)
}

fn costmatrix(a: CostmatrixArgs) -> Outcome {
    let samples = match &a.data {
        Some(path) => read_samples(path).during("read samples")?,
        None => {
            gen_outlier_data(a.samples as usize, a.outlier_fraction, a.noise, a.seed)
                .during("experiments::gen_outlier_data")?
                .samples
        }
    };
    let (lo, hi) = if a.data.is_some() {
        samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &(x, _)| (l.min(x), h.max(x)))
    } else {
        (0.0, 1.0)
    };
    let knots_x = KnotSequence::uniform(lo, hi, a.knots_x as usize).during("lifting::KnotSequence::uniform")?;
    let knots_y = KnotSequence::uniform(a.y_min, a.y_max, a.knots_y as usize).during("lifting::KnotSequence::uniform")?;
    let loss = match a.loss {
        LossArg::Squared => LossSpec::squared(),
        LossArg::Absolute => LossSpec::absolute(),
        LossArg::Truncated => LossSpec::truncated_linear(a.truncation).during("loss::LossSpec::truncated_linear")?,
    };
    let cost = build_cost_matrix(&samples, &knots_x, &knots_y, &loss).during("output_lifting::build_cost_matrix")?;
    let theta = solve_closed_form(&cost);
    println!("samples    {}", samples.len());
    println!("shape      {} x {}", cost.matrix().rows(), cost.matrix().cols());
    println!("objective  {}", cost.objective(&theta));
    if a.verify {
        let reference = brute_force_solve(&cost);
        let same = reference == theta;
        println!("verified   {}", if same { "closed form matches exhaustive search" } else { "MISMATCH" });
        if !same {
            return Ok(1);
        }
    }

    let mut sidecar = String::new();
    let _ = writeln!(sidecar, "data = {}", a.data.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
    for (k, v) in [
        ("seed", a.seed.to_string()),
        ("samples", a.samples.to_string()),
        ("outlier_fraction", a.outlier_fraction.to_string()),
        ("noise", a.noise.to_string()),
        ("knots_x", a.knots_x.to_string()),
        ("knots_y", a.knots_y.to_string()),
        ("y_min", a.y_min.to_string()),
        ("y_max", a.y_max.to_string()),
        ("loss", format!("{:?}", a.loss).to_lowercase()),
        ("truncation", a.truncation.to_string()),
    ] {
        let _ = writeln!(sidecar, "{k} = {v}");
    }
    let hash: String = Sha256::digest(sidecar.as_bytes()).iter().take(6).map(|b| format!("{b:02x}")).collect();
    fs::create_dir_all(&a.out).map_err(Error::from).during("create output directory")?;
    let write = |stem: &str, bytes: &[u8]| -> Result<PathBuf> {
        let path = a.out.join(format!("{stem}-{hash}.{}", if stem.ends_with("config") { "txt" } else { "csv" }));
        fs::write(&path, bytes)?;
        Ok(path)
    };
    let mut buf = Vec::new();
    cost.write_csv(&mut buf).during("output_lifting::CostMatrix::write_csv")?;
    let c = write("costmatrix-cost", &buf).during("write cost matrix")?;
    buf.clear();
    theta.write_csv(&mut buf).during("output_lifting::AssignmentMatrix::write_csv")?;
    let t = write("costmatrix-assignment", &buf).during("write assignment")?;
    let s = write("costmatrix-config", sidecar.as_bytes()).during("write config sidecar")?;
    for p in [c, t, s] {
        println!("wrote {}", p.display());
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> i32 {
        parse_and_dispatch(std::iter::once("lifting").chain(args.iter().copied()))
    }

    #[test]
    fn flag_errors_exit_2() {
        assert_eq!(run(&["fit1d", "--epochs", "0"]), 2);
        assert_eq!(run(&["fit1d", "--momentum", "1"]), 2);
        assert_eq!(run(&["fit1d", "--bogus"]), 2);
        assert_eq!(run(&["nonsense"]), 2);
        assert_eq!(run(&[]), 2);
        assert_eq!(run(&["gradcheck", "--arch", "unknown"]), 2);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(run(&["--help"]), 0);
        assert_eq!(run(&["fit1d", "--help"]), 0);
    }

    #[test]
    fn gradcheck_architectures_pass() {
        for arch in ["linear", "relu", "maxout", "lift1d", "lift2d", "scaled", "std1d", "std2d"] {
            assert_eq!(run(&["gradcheck", "--arch", arch, "--trials", "2"]), 0, "{arch}");
        }
    }

    #[test]
    fn runtime_errors_exit_1() {
        assert_eq!(run(&["meshinfo", "--mesh", "/nonexistent/mesh.txt"]), 1);
        assert_eq!(run(&["meshinfo", "--locate", "5,5"]), 1);
        assert_eq!(run(&["rerun", "/nonexistent/config.txt"]), 1);
    }
}
