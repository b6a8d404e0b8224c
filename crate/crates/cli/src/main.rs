use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use lowrank::baselines::{run_baseline, BaselineConfig};
use lowrank::bench::{self, lrmat, SvalOptions, TableStudy};
use lowrank::image::{compare_methods, read_pgm, reconstruct_image, write_pgm, Sweep};
use lowrank::matgen::{generate, SpectrumKind, SpectrumSpec};
use lowrank::{eod_abe_power, Algorithm, BasisConfig, GaussianSampler, LowRankError, PowerConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "lowrank",
    version,
    about = "Randomized low-rank decompositions with automatic rank detection"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Seed for test matrices and sketches.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Stopping precision of the adaptive method [default: 1e-10, or 1e-3 for images].
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Columns per Gaussian block of the adaptive method.
    #[arg(long, global = true, default_value_t = lowrank::basis::DEFAULT_BLOCKSIZE)]
    blocksize: usize,
    /// Power iterations.
    #[arg(long, global = true, default_value_t = 0)]
    tau: usize,
    /// Output path (stdout when omitted, where that makes sense).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Global {
    fn epsilon_or(&self, default: f64) -> f64 {
        self.epsilon.unwrap_or(default)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an LRMAT1 matrix and write its factors.
    Decompose(DecomposeArgs),
    /// Write a generated test matrix as LRMAT1.
    Generate(MatrixArgs),
    /// Accuracy and timing table on strictly rank-deficient matrices.
    Bench(BenchArgs),
    /// Singular-value estimates of every method as plot data.
    Svals(SvalsArgs),
    /// Monte Carlo check of the expected-error bound.
    Bound(BoundArgs),
    /// Low-rank reconstruction of a binary PGM image.
    Reconstruct(ReconstructArgs),
}

#[derive(Args)]
struct DecomposeArgs {
    /// LRMAT1 input file.
    input: PathBuf,
    /// Algorithm name (eod_abe or a baseline).
    #[arg(long, default_value = "eod_abe")]
    algorithm: String,
    /// Sampling size, required by the fixed-size baselines.
    #[arg(long)]
    d: Option<usize>,
    /// Compare diagonals against the largest seen instead of the raw value.
    #[arg(long)]
    relative: bool,
    /// Upper bound on the adaptive basis size.
    #[arg(long)]
    max_cols: Option<usize>,
}

#[derive(Args, Clone)]
struct MatrixArgs {
    /// Matrix family: low_rank_plus_noise, devils_stairs, fast_decay, slow_decay, strict_rank_deficient.
    #[arg(long, default_value = "strict_rank_deficient")]
    matrix: String,
    #[arg(long, default_value_t = 300)]
    n: usize,
    /// Rank parameter for low_rank_plus_noise and strict_rank_deficient.
    #[arg(long)]
    r: Option<usize>,
    /// Noise level for low_rank_plus_noise.
    #[arg(long)]
    alpha: Option<f64>,
    /// Read the matrix description from a key = value file instead.
    #[arg(long, conflicts_with_all = ["matrix", "n", "r", "alpha"])]
    config: Option<PathBuf>,
}

impl MatrixArgs {
    fn spec(&self, seed: u64) -> anyhow::Result<SpectrumSpec> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(SpectrumSpec::from_config(&text)?);
        }
        let mut kind: SpectrumKind = self.matrix.parse()?;
        match &mut kind {
            SpectrumKind::LowRankPlusNoise { r, alpha_noise, .. } => {
                *r = self.r.unwrap_or(*r);
                *alpha_noise = self.alpha.unwrap_or(*alpha_noise);
            }
            SpectrumKind::StrictRankDeficient { r } => {
                *r = self.r.unwrap_or(self.n * 2 / 5);
            }
            _ if self.r.is_some() || self.alpha.is_some() => {
                bail!(usage(format!("--r/--alpha do not apply to {}", kind.name())));
            }
            _ => {}
        }
        let spec = SpectrumSpec::new(kind, self.n, seed);
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Matrix orders, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "400")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 0.4)]
    rank_ratio: f64,
    #[arg(long, default_value_t = 0.35)]
    d_ratio: f64,
    /// Power iteration counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    taus: Vec<usize>,
    /// Seeds as `a..b` (inclusive) or a comma list.
    #[arg(long, default_value = "1..5", value_parser = parse_seeds)]
    seeds: Seeds,
    /// Also print per-cell medians to stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct SvalsArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Baseline sampling size and cap on the adaptive basis [default: n / 5].
    #[arg(long)]
    d: Option<usize>,
    /// Power iteration counts [default: the global --tau].
    #[arg(long, value_delimiter = ',')]
    taus: Vec<usize>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Target rank of the bound.
    #[arg(long = "rank", default_value_t = 20)]
    rank: usize,
    #[arg(long, default_value_t = 30)]
    d: usize,
    #[arg(long, default_value_t = 50)]
    trials: usize,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Binary PGM input.
    input: PathBuf,
    /// Run every method at the selected d and write a CSV report.
    #[arg(long)]
    compare: bool,
    /// Additional d grid `d_min:d_max:step` for the comparison.
    #[arg(long, requires = "compare")]
    sweep: Option<Sweep>,
    /// Power iteration counts for the comparison [default: the global --tau].
    #[arg(long, value_delimiter = ',')]
    taus: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad seed '{t}'"));
    let seeds = match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (parse(a)?, parse(b.trim_start_matches('='))?);
            if b < a {
                return Err(format!("empty seed range '{s}'"));
            }
            (a..=b).collect()
        }
        None => s.split(',').map(parse).collect::<Result<Vec<_>, _>>()?,
    };
    Ok(Seeds(seeds))
}

/// An argument combination rejected after parsing.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> Usage {
    Usage(msg.into())
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn decompose(g: &Global, args: &DecomposeArgs) -> anyhow::Result<()> {
    let algorithm = Algorithm::from_name(&args.algorithm)
        .ok_or_else(|| usage(format!("unknown algorithm '{}'", args.algorithm)))?;
    let a = lrmat::load(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let dec = match algorithm {
        Algorithm::EodAbe => {
            let mut cfg = BasisConfig::new(g.epsilon_or(1e-10), g.blocksize.min(a.cols().max(1)));
            if args.relative {
                cfg = cfg.relative();
            }
            if let Some(m) = args.max_cols {
                cfg = cfg.with_max_cols(m);
            }
            eod_abe_power(&a, &mut GaussianSampler::new(g.seed), &cfg, PowerConfig::new(g.tau))?
        }
        Algorithm::ReferenceSvd => bench::reference_svd(&a, args.d.unwrap_or(a.rows().min(a.cols())))?,
        alg => {
            let d = args.d.ok_or_else(|| usage(format!("{alg} needs --d")))?;
            run_baseline(alg, &a, &BaselineConfig::new(d, g.tau, g.seed))?
        }
    };
    println!("detected rank: {}", dec.rank);
    println!("relative error: {:e}", bench::rel_err(&a, &dec)?);
    if let Some(prefix) = &g.out {
        for (suffix, m) in [("u", &dec.u), ("d", &dec.d), ("v", &dec.v)] {
            let path = factor_path(prefix, suffix);
            lrmat::save(&path, m).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// `<prefix>.<factor>.lrmat`
fn factor_path(prefix: &Path, factor: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(format!(".{factor}.lrmat"));
    PathBuf::from(name)
}

fn generate_cmd(g: &Global, args: &MatrixArgs) -> anyhow::Result<()> {
    let spec = args.spec(g.seed)?;
    let path = g.out.as_ref().ok_or_else(|| usage("generate needs --out"))?;
    let m = generate(&spec)?;
    lrmat::save(path, &m.a).with_context(|| format!("writing {}", path.display()))?;
    eprint!("{}", spec.to_config());
    Ok(())
}

fn bench_cmd(g: &Global, args: &BenchArgs) -> anyhow::Result<()> {
    let mut study = TableStudy::new(
        args.n.clone(),
        args.rank_ratio,
        args.d_ratio,
        args.taus.clone(),
        args.seeds.0.clone(),
    );
    study.epsilon = g.epsilon_or(study.epsilon);
    study.blocksize = g.blocksize;
    let records = bench::run_table_study(&study)?;
    let mut w = output(g.out.as_deref())?;
    bench::write_csv(&mut w, &records)?;
    w.flush()?;
    if args.summary {
        let sci = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.2e}"));
        for c in bench::summarize(&records) {
            let size = c.d.map_or("adaptive".to_string(), |d| format!("d={d}"));
            eprintln!(
                "{:<15} n={} {size:<9} tau={} runs={} failed={} median={} range=[{}, {}] time={}s",
                c.algorithm.name(),
                c.n,
                c.tau,
                c.runs,
                c.failures,
                sci(c.median_rel_err),
                sci(c.min_rel_err),
                sci(c.max_rel_err),
                sci(c.median_wall_time_s),
            );
        }
    }
    let failed = records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed; see the status column", records.len());
    }
    Ok(())
}

fn svals_cmd(g: &Global, args: &SvalsArgs) -> anyhow::Result<()> {
    let spec = args.matrix.spec(g.seed)?;
    let taus = if args.taus.is_empty() {
        vec![g.tau]
    } else {
        args.taus.clone()
    };
    let mut opts = SvalOptions::new(taus, args.d.unwrap_or((spec.n / 5).max(1)));
    opts.epsilon = g.epsilon_or(opts.epsilon);
    opts.blocksize = g.blocksize;
    opts.seed = g.seed;
    let study = bench::run_sval_study(&spec, &opts)?;
    let mut w = output(g.out.as_deref())?;
    study.write_csv(&mut w)?;
    w.flush()?;
    for (tau, rank) in &study.eod_ranks {
        eprintln!("eod_abe tau={tau}: detected rank {rank}");
    }
    Ok(())
}

fn bound_cmd(g: &Global, args: &BoundArgs) -> anyhow::Result<()> {
    let spec = args.matrix.spec(g.seed)?;
    let c = bench::check_bound(&spec, args.rank, args.d, g.tau, args.trials, g.seed)?;
    let mut w = output(g.out.as_deref())?;
    writeln!(w, "r = {}", c.r)?;
    writeln!(w, "d = {}", c.d)?;
    writeln!(w, "tau = {}", c.tau)?;
    writeln!(w, "alpha = {:e}", c.alpha)?;
    writeln!(w, "tail_energy = {:e}", c.tail_energy)?;
    writeln!(w, "bound_value = {:e}", c.bound_value)?;
    writeln!(w, "mean_observed_err = {:e}", c.mean_observed_err)?;
    writeln!(w, "n_trials = {}", c.n_trials)?;
    writeln!(w, "holds = {}", c.holds())?;
    w.flush()?;
    Ok(())
}

fn reconstruct_cmd(g: &Global, args: &ReconstructArgs) -> anyhow::Result<()> {
    let img = read_pgm(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let epsilon = g.epsilon_or(1e-3);
    if args.compare {
        let taus = if args.taus.is_empty() {
            vec![g.tau]
        } else {
            args.taus.clone()
        };
        let records = compare_methods(&img, epsilon, &taus, g.seed, args.sweep)?;
        let mut w = output(g.out.as_deref())?;
        bench::write_csv(&mut w, &records)?;
        w.flush()?;
        return Ok(());
    }
    let path = g
        .out
        .as_ref()
        .ok_or_else(|| usage("reconstruct needs --out (or --compare)"))?;
    let (out, report) = reconstruct_image(&img, epsilon, g.tau, g.seed)?;
    write_pgm(&out, path).with_context(|| format!("writing {}", path.display()))?;
    println!("selected d: {}", report.selected_d);
    println!("relative error: {:e}", report.rel_err);
    println!("psnr: {:.2} dB", report.psnr);
    println!("wall time: {:.3} s", report.wall_time_s);
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    if g.blocksize == 0 {
        bail!(usage("--blocksize must be positive"));
    }
    match &cli.command {
        Command::Decompose(a) => decompose(g, a),
        Command::Generate(a) => generate_cmd(g, a),
        Command::Bench(a) => bench_cmd(g, a),
        Command::Svals(a) => svals_cmd(g, a),
        Command::Bound(a) => bound_cmd(g, a),
        Command::Reconstruct(a) => reconstruct_cmd(g, a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<LowRankError>() {
        Some(e) if e.is_numeric() => EXIT_NUMERIC,
        Some(LowRankError::Config(_)) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
