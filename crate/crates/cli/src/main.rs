//! `horpca` command-line front end.
//!
//! Exit codes: 0 on success (including solver runs that stop at the
//! iteration cap), 1 on IO, format or numerical failures, 2 on usage errors.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use horpca::harness::{
    core_tensor, corrupt, corrupt_within, default_params, estimate_rank, gen_low_rank,
    parse_sweep_spec, rel_error, run_sweep, sample_mask, write_records_csv, CorruptionSpec,
    SynthSpec,
};
use horpca::solvers::{parse_key_values, solve, Model};
use horpca::tensor::io::{load_mask, load_tensor, save_mask, save_tensor};
use horpca::tensor::{DenseTensor, Shape};
use horpca::{Error, Problem, SolverConfig, Tensor};

#[derive(Parser)]
#[command(name = "horpca", version, about = "Higher-order robust PCA for dense tensors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a random tensor with exact multilinear ranks.
    Gen {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add sparse uniform corruption to a tensor.
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        rho_n: f64,
        /// Corruption magnitude M; values are drawn from U(-M, M).
        #[arg(long, default_value_t = 1.0)]
        magnitude: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Draw the corrupted entries from this mask's observed set only.
        #[arg(long)]
        within: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the corruption tensor.
        #[arg(long)]
        out_e: Option<PathBuf>,
    },
    /// Sample a uniformly random observation mask.
    Mask {
        #[arg(long, value_delimiter = ',', conflicts_with = "like", required_unless_present = "like")]
        dims: Option<Vec<usize>>,
        /// Take the shape from an existing tensor file.
        #[arg(long)]
        like: Option<PathBuf>,
        #[arg(long)]
        rho_o: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover the low-rank and sparse parts of a tensor.
    Solve(Box<SolveArgs>),
    /// Estimate the Tucker rank from normalized singular values.
    Rank {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
    },
    /// Extract a Tucker core and factors at the given ranks.
    Core {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        ranks: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Write factor i to `<prefix><i>.dtf` as an order-2 tensor.
        #[arg(long)]
        factors: Option<String>,
    },
    /// Run a grid of synthetic recovery experiments.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Print shape and norms of a tensor or mask file.
    Info {
        file: PathBuf,
        /// Reference tensor for a relative error.
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// One of s, s-adp, m, sp, mp, c, tucker.
    #[arg(long)]
    model: String,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out_x: Option<PathBuf>,
    #[arg(long)]
    out_e: Option<PathBuf>,
    /// Residual history CSV.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

/// Configuration keys as flags; dotted keys become `--continuation-lambda0`.
#[derive(Args)]
struct Overrides {
    #[arg(long)]
    lambda1: Option<String>,
    #[arg(long)]
    lambda_star: Option<String>,
    #[arg(long)]
    mode_weights: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    continuation_lambda0: Option<String>,
    #[arg(long)]
    continuation_lambda_bar: Option<String>,
    #[arg(long)]
    continuation_factor: Option<String>,
    #[arg(long)]
    continuation_ratio: Option<String>,
    #[arg(long)]
    continuation_alpha: Option<String>,
    #[arg(long, alias = "ranks")]
    target_ranks: Option<String>,
    #[arg(long)]
    mu_schedule_initial: Option<String>,
    #[arg(long)]
    mu_schedule_factor: Option<String>,
    #[arg(long)]
    mu_schedule_period: Option<String>,
    #[arg(long)]
    mu_schedule_floor: Option<String>,
    #[arg(long)]
    tol_adal: Option<String>,
    #[arg(long)]
    tol_fista: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("lambda1", &self.lambda1),
            ("lambda_star", &self.lambda_star),
            ("mode_weights", &self.mode_weights),
            ("mu", &self.mu),
            ("eta", &self.eta),
            ("continuation.lambda0", &self.continuation_lambda0),
            ("continuation.lambda_bar", &self.continuation_lambda_bar),
            ("continuation.factor", &self.continuation_factor),
            ("continuation.ratio", &self.continuation_ratio),
            ("continuation.alpha", &self.continuation_alpha),
            ("target_ranks", &self.target_ranks),
            ("mu_schedule.initial", &self.mu_schedule_initial),
            ("mu_schedule.factor", &self.mu_schedule_factor),
            ("mu_schedule.period", &self.mu_schedule_period),
            ("mu_schedule.floor", &self.mu_schedule_floor),
            ("tol_adal", &self.tol_adal),
            ("tol_fista", &self.tol_fista),
            ("max_iters", &self.max_iters),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Runtime(format!("{}: {e}", path.display()))
}

fn verb_name(c: &Command) -> &'static str {
    match c {
        Command::Gen { .. } => "gen",
        Command::Corrupt { .. } => "corrupt",
        Command::Mask { .. } => "mask",
        Command::Solve(_) => "solve",
        Command::Rank { .. } => "rank",
        Command::Core { .. } => "core",
        Command::Sweep { .. } => "sweep",
        Command::Info { .. } => "info",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let verb = verb_name(&cli.command);
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            cmd.build();
            let usage = cmd
                .find_subcommand_mut(verb)
                .map(|c| c.render_usage().to_string())
                .unwrap_or_default();
            eprintln!("error: {msg}\n\n{usage}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<Tensor, Failure> {
    load_tensor(path).map_err(with_path(path))
}

fn write(x: &Tensor, path: &Path) -> Result<(), Failure> {
    save_tensor(x, path).map_err(with_path(path))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { dims, ranks, seed, out } => {
            let spec = SynthSpec::new(&dims, &ranks, seed).map_err(usage)?;
            write(&gen_low_rank::<f64>(&spec)?, &out)
        }
        Command::Corrupt { input, rho_n, magnitude, seed, within, out, out_e } => {
            if !(0.0..=1.0).contains(&rho_n) {
                return Err(usage(format!("--rho-n {rho_n} is not a fraction in [0, 1]")));
            }
            if !(magnitude.is_finite() && magnitude >= 0.0) {
                return Err(usage(format!("--magnitude {magnitude} must be a nonnegative number")));
            }
            let x = read(&input)?;
            let spec = CorruptionSpec { rho_n, magnitude, seed };
            let (b, e) = match within {
                Some(path) => corrupt_within(&x, &spec, &load_mask(&path).map_err(with_path(&path))?)?,
                None => corrupt(&x, &spec)?,
            };
            write(&b, &out)?;
            if let Some(path) = out_e {
                write(&e, &path)?;
            }
            Ok(())
        }
        Command::Mask { dims, like, rho_o, seed, out } => {
            if !(0.0..=1.0).contains(&rho_o) {
                return Err(usage(format!("--rho-o {rho_o} is not a fraction in [0, 1]")));
            }
            let shape = match (dims, like) {
                (Some(d), _) => Shape::new(d).map_err(usage)?,
                (None, Some(path)) => read(&path)?.shape().clone(),
                (None, None) => return Err(usage("one of --dims or --like is required")),
            };
            let mask = sample_mask(&shape, rho_o, seed)?;
            save_mask(&mask, &out).map_err(with_path(&out))
        }
        Command::Solve(args) => cmd_solve(*args),
        Command::Rank { input, threshold } => {
            if !(threshold > 0.0 && threshold < 1.0) {
                return Err(usage(format!("--threshold {threshold} must lie in (0, 1)")));
            }
            let r = estimate_rank(&read(&input)?, threshold)?;
            println!("{}", join(&r, ","));
            Ok(())
        }
        Command::Core { input, ranks, out, factors } => {
            let x = read(&input)?;
            if ranks.len() != x.shape().order() {
                return Err(usage(format!(
                    "--ranks has {} entries for an order-{} tensor",
                    ranks.len(),
                    x.shape().order()
                )));
            }
            if let Some((i, (&r, &d))) = ranks.iter().zip(x.dims()).enumerate().find(|(_, (&r, &d))| r == 0 || r > d) {
                return Err(usage(format!("rank {r} out of range for mode {i} of size {d}")));
            }
            let (g, us) = core_tensor(&x, &ranks)?;
            write(&g, &out)?;
            if let Some(prefix) = factors {
                for (i, u) in us.iter().enumerate() {
                    let t = DenseTensor::from_vec(Shape::new(vec![u.rows(), u.cols()])?, u.as_slice().to_vec())?;
                    write(&t, Path::new(&format!("{prefix}{i}.dtf")))?;
                }
            }
            println!("dims={} fro={:e}", join(g.dims(), "x"), g.fro_norm());
            Ok(())
        }
        Command::Sweep { spec, out, jobs } => {
            let text = fs::read_to_string(&spec).map_err(|e| Failure::Runtime(format!("{}: {e}", spec.display())))?;
            let spec = parse_sweep_spec(&text).map_err(usage)?;
            spec.validate().map_err(usage)?;
            if jobs == 0 {
                return Err(usage("--jobs must be at least 1"));
            }
            let records = run_sweep(&spec, jobs)?;
            let file = File::create(&out).map_err(|e| Failure::Runtime(format!("{}: {e}", out.display())))?;
            let mut w = BufWriter::new(file);
            write_records_csv(&records, &mut w)?;
            w.flush()?;
            let ok = records.iter().filter(|r| r.success()).count();
            let failed = records.iter().filter(|r| r.error.is_some()).count();
            println!("cells={} success={ok} errors={failed}", records.len());
            Ok(())
        }
        Command::Info { file, reference } => cmd_info(&file, reference.as_deref()),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    let model: Model = args.model.parse().map_err(usage)?;
    let adaptive = args.model.trim() == "s-adp";
    let b = read(&args.input)?;
    let mask = match &args.mask {
        Some(path) => Some(load_mask(path).map_err(with_path(path))?),
        None => None,
    };
    let p = Problem::new(b, mask)?;

    let mut c: SolverConfig = default_params(&p, model);
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        let pairs = parse_key_values(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        c.apply(&pairs).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        c.model = model;
    }
    for (k, v) in args.overrides.pairs() {
        c.set(k, v).map_err(usage)?;
    }
    if adaptive && c.mode_weights.is_none() {
        return Err(usage("model s-adp requires --mode-weights"));
    }
    if model.needs_ranks() && c.target_ranks.is_none() {
        return Err(usage(format!("model {} requires --ranks", model.code())));
    }
    c.validate(p.shape()).map_err(usage)?;

    let r = match solve(&p, &c) {
        Ok(r) => r,
        Err(e @ (Error::MaskNotSupported | Error::MaskRequired)) => return Err(usage(e)),
        Err(e) => {
            println!("status=error");
            return Err(e.into());
        }
    };
    if let Some(path) = &args.out_x {
        write(&r.x, path)?;
    }
    if let Some(path) = &args.out_e {
        write(&r.e, path)?;
    }
    if let Some(path) = &args.report {
        let file = File::create(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        r.write_history_csv(&mut w)?;
        w.flush()?;
    }
    println!("iters={} status={} primal={:e}", r.iterations, r.status, r.final_primal());
    Ok(())
}

fn cmd_info(file: &Path, reference: Option<&Path>) -> Result<(), Failure> {
    let mut magic = [0u8; 4];
    {
        use std::io::Read;
        File::open(file)
            .and_then(|mut f| f.read_exact(&mut magic))
            .map_err(|e| Failure::Runtime(format!("{}: {e}", file.display())))?;
    }
    if &magic == b"DMK1" {
        let m = load_mask(file).map_err(with_path(file))?;
        println!(
            "kind=mask dims={} observed={} fraction={}",
            join(m.shape().dims(), "x"),
            m.len(),
            m.fraction()
        );
        return Ok(());
    }
    let x = read(file)?;
    print!(
        "kind=tensor dims={} fro={:e} l1={:e} max_abs={:e} nnz={}",
        join(x.dims(), "x"),
        x.fro_norm(),
        x.l1_norm(),
        x.max_abs(),
        x.count_nonzero()
    );
    if let Some(path) = reference {
        let x0 = read(path)?;
        match rel_error(&x, &x0) {
            Ok(e) => print!(" rel_err={e:e}"),
            Err(e) => {
                println!();
                return Err(e.into());
            }
        }
    }
    println!();
    Ok(())
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}
