//! Command-line front end.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use magicvec_core::state::reduced_density_matrix;
use magicvec_core::{
    mana_fast, mana_mixed, mana_naive, mc_sre, rand_haar_state, sre_fast, sre_naive, sre_q1, CircuitSpec,
    DensityMatrix, ManaResult, SamplerConfig, SreResult, StateVector,
};
use serde_json::json;

use crate::bench::{self, Suite};
use crate::format::{self, human_bytes};
use crate::report::RunReport;
use crate::runtime::{resolve_workers, ThreadPool};

#[derive(Debug, Parser)]
#[command(name = "magicvec", version, about = "Stabilizer Renyi entropy and mana of dense qudit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a random brick-wall circuit state to an MVEC file.
    GenState(GenArgs),
    /// Describe an MVEC or MRHO file.
    Info(InfoArgs),
    /// Exact stabilizer Renyi entropy of a qubit state.
    Sre(SreArgs),
    /// Monte-Carlo estimate of M_2 by thermodynamic integration.
    SreMc(SreMcArgs),
    /// Mana of a pure qutrit state.
    Mana(ManaArgs),
    /// Mana of a qutrit density matrix.
    ManaMixed(ManaMixedArgs),
    /// Runtime scaling table for the fast sweeps.
    Bench(BenchArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GenState(_) => "gen-state",
            Command::Info(_) => "info",
            Command::Sre(_) => "sre",
            Command::SreMc(_) => "sre-mc",
            Command::Mana(_) => "mana",
            Command::ManaMixed(_) => "mana-mixed",
            Command::Bench(_) => "bench",
        }
    }

    pub fn json(&self) -> bool {
        match self {
            Command::GenState(a) => a.json,
            Command::Info(a) => a.json,
            Command::Sre(a) => a.json,
            Command::SreMc(a) => a.json,
            Command::Mana(a) => a.json,
            Command::ManaMixed(a) => a.json,
            Command::Bench(a) => a.json,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Local dimension (2 for qubits, 3 for qutrits).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    /// Brick-wall layers; 0 gives |0...0>.
    #[arg(long, default_value_t = 0)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub json: bool,
}

/// A state read from `--in` or generated from circuit flags.
#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long = "in", conflicts_with_all = ["n", "depth"])]
    pub input: Option<PathBuf>,
    /// Sites of a generated brick-wall state.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    /// Circuit seed (also the sampler seed for sre-mc unless overridden).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SreMethod {
    Fast,
    Naive,
    Q1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ManaMethod {
    Fast,
    Naive,
}

#[derive(Debug, Args)]
pub struct SreArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long, value_enum, default_value_t = SreMethod::Fast)]
    pub method: SreMethod,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SreMcArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Number of beta grid points (odd, >= 3).
    #[arg(long, default_value_t = 11)]
    pub grid: usize,
    /// Samples per beta.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Burn-in steps per chain [default: 10 N].
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Bits re-randomized per proposal.
    #[arg(long, default_value_t = 1)]
    pub move_width: usize,
    /// Sampler seed [default: --seed].
    #[arg(long)]
    pub sampler_seed: Option<u64>,
    /// Also compute the exact M_2 and the absolute error.
    #[arg(long)]
    pub exact: bool,
    /// Per-beta CSV: beta,mean_f,var_f,accept_rate.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Error-vs-samples CSV: n_samples,abs_error (implies --exact).
    #[arg(long)]
    pub convergence: Option<PathBuf>,
    /// Sample counts for --convergence.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
    pub convergence_samples: Vec<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ManaArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_enum, default_value_t = ManaMethod::Fast)]
    pub method: ManaMethod,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Suppress the progress indicator.
    #[arg(long)]
    pub quiet: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ManaMixedArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Keep the first N_A sites of the pure state.
    #[arg(long, conflicts_with = "rho")]
    pub keep: Option<usize>,
    /// Read the density matrix from an MRHO file.
    #[arg(long, conflicts_with_all = ["input", "n", "depth"])]
    pub rho: Option<PathBuf>,
    /// Write the density matrix used to an MRHO file.
    #[arg(long)]
    pub save_rho: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "sre")]
    pub suite: String,
    /// Inclusive site range, e.g. 10..14 [default: 10..14 for sre, 5..8 for mana].
    #[arg(long)]
    pub n_range: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

/// What a command produced: a JSON report and its human-readable form.
pub struct Outcome {
    pub report: RunReport,
    pub text: String,
}

pub fn run(command: &Command) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let mut out = match command {
        Command::GenState(a) => gen_state(a),
        Command::Info(a) => info(a),
        Command::Sre(a) => sre(a),
        Command::SreMc(a) => sre_mc(a),
        Command::Mana(a) => mana(a),
        Command::ManaMixed(a) => mana_mixed_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    }?;
    out.report.wall_seconds = start.elapsed().as_secs_f64();
    Ok(out)
}

fn load_or_generate(args: &StateArgs, local_dim: usize, report: &mut RunReport) -> anyhow::Result<StateVector> {
    let psi = match (&args.input, args.n) {
        (Some(path), _) => {
            report.inputs.file = Some(path.display().to_string());
            format::load_state(path)?
        }
        (None, Some(n)) => {
            let depth = args.depth.unwrap_or(0);
            report.inputs.depth = Some(depth);
            report.inputs.seed = Some(args.seed);
            rand_haar_state(&CircuitSpec::new(n, depth, local_dim, args.seed))?
        }
        (None, None) => bail!("give a state with --in FILE or generate one with --n N [--depth T --seed S]"),
    };
    report.inputs.sites = Some(psi.sites());
    report.inputs.local_dim = Some(psi.local_dim());
    report.mem_bytes = psi.byte_size();
    Ok(psi)
}

fn gen_state(a: &GenArgs) -> anyhow::Result<Outcome> {
    let psi = rand_haar_state(&CircuitSpec::new(a.n, a.depth, a.d, a.seed))?;
    format::save_state(&a.out, &psi)?;
    let mut report = RunReport::new("gen-state");
    report.inputs.sites = Some(a.n);
    report.inputs.local_dim = Some(a.d);
    report.inputs.depth = Some(a.depth);
    report.inputs.seed = Some(a.seed);
    report.inputs.file = Some(a.out.display().to_string());
    report.mem_bytes = psi.byte_size();
    report.workers = 1;
    report.set("dim", psi.len()).set("norm_sqr", psi.norm_sqr());
    let text = format!(
        "wrote {}: N={} d={} dim={} mem={}",
        a.out.display(),
        a.n,
        a.d,
        psi.len(),
        human_bytes(psi.byte_size())
    );
    Ok(Outcome { report, text })
}

fn info(a: &InfoArgs) -> anyhow::Result<Outcome> {
    let mut magic = [0u8; 4];
    {
        use std::io::Read;
        File::open(&a.input)
            .and_then(|mut f| f.read_exact(&mut magic))
            .with_context(|| format!("reading {}", a.input.display()))?;
    }
    let mut report = RunReport::new("info");
    report.inputs.file = Some(a.input.display().to_string());
    report.workers = 1;
    let text = if &magic == format::STATE_MAGIC {
        let psi = format::load_state(&a.input)?;
        report.inputs.sites = Some(psi.sites());
        report.inputs.local_dim = Some(psi.local_dim());
        report.mem_bytes = psi.byte_size();
        report
            .set("kind", "state")
            .set("dim", psi.len())
            .set("norm_sqr", psi.norm_sqr());
        format!(
            "{}: state vector, N={} d={} dim={} norm^2={:.12} mem={}",
            a.input.display(),
            psi.sites(),
            psi.local_dim(),
            psi.len(),
            psi.norm_sqr(),
            human_bytes(psi.byte_size())
        )
    } else if &magic == format::RHO_MAGIC {
        let rho = format::load_density(&a.input)?;
        report.inputs.sites = Some(rho.sites());
        report.inputs.local_dim = Some(rho.local_dim());
        report.mem_bytes = rho.byte_size();
        let tr = rho.trace();
        report
            .set("kind", "density_matrix")
            .set("dim", rho.dim())
            .set("trace_re", tr.re)
            .set("trace_im", tr.im);
        format!(
            "{}: density matrix, N={} d={} dim={} trace={:.12} mem={}",
            a.input.display(),
            rho.sites(),
            rho.local_dim(),
            rho.dim(),
            tr.re,
            human_bytes(rho.byte_size())
        )
    } else {
        bail!("{}: not an MVEC or MRHO file", a.input.display());
    };
    Ok(Outcome { report, text })
}

fn sre_report(report: &mut RunReport, r: &SreResult) -> String {
    report.set("m_q", r.m_q).set("lost_norm", r.lost_norm);
    format!("M_{}={}  lost_norm={:e}", r.q, r.m_q, r.lost_norm)
}

fn sre(a: &SreArgs) -> anyhow::Result<Outcome> {
    let mut report = RunReport::new("sre");
    let psi = load_or_generate(&a.state, 2, &mut report)?;
    let workers = resolve_workers(a.workers)?;
    let pool = ThreadPool::new(workers);
    report.workers = workers;
    let r = match a.method {
        SreMethod::Fast => sre_fast(&psi, a.q, &pool)?,
        SreMethod::Naive => {
            report.workers = 1;
            sre_naive(&psi, a.q)?
        }
        SreMethod::Q1 => sre_q1(&psi, &pool)?,
    };
    report.inputs.q = Some(r.q);
    report.inputs.method = Some(format!("{:?}", a.method).to_lowercase());
    let text = sre_report(&mut report, &r);
    Ok(Outcome { report, text })
}

fn write_csv(path: &Path, header: &str, rows: impl IntoIterator<Item = String>) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{row}")?;
    }
    w.flush()?;
    Ok(())
}

fn sre_mc(a: &SreMcArgs) -> anyhow::Result<Outcome> {
    let mut report = RunReport::new("sre-mc");
    let psi = load_or_generate(&a.state, 2, &mut report)?;
    let workers = resolve_workers(a.workers)?;
    let pool = ThreadPool::new(workers);
    report.workers = workers;
    let cfg = SamplerConfig {
        grid_points: a.grid,
        samples_per_beta: a.samples,
        burn_in: a.burn_in,
        seed: a.sampler_seed.unwrap_or(a.state.seed),
        epsilon: a.epsilon,
        move_width: a.move_width,
    };
    report.inputs.q = Some(2.0);
    report.inputs.sampler = Some(json!({
        "grid_points": cfg.grid_points,
        "samples_per_beta": cfg.samples_per_beta,
        "burn_in": cfg.burn_in_for(psi.sites()),
        "seed": cfg.seed,
        "epsilon": cfg.epsilon,
        "move_width": cfg.move_width,
    }));

    let r = mc_sre(&psi, &cfg, &pool)?;
    report
        .set("m2_hat", r.m2_hat)
        .set("stderr", r.stderr)
        .set("integral", r.integral)
        .set("epsilon_amplification", r.epsilon_amplification)
        .set("per_beta_means", r.per_beta_means.clone())
        .set("per_beta_variance", r.per_beta_variance.clone())
        .set("acceptance_rates", r.acceptance_rates.clone())
        .set("tau_int", r.tau_int.clone());
    let mut text = format!("M_2~{} +/- {}  (L={}, n_S={})", r.m2_hat, r.stderr, cfg.grid_points, cfg.samples_per_beta);

    if let Some(path) = &a.curve {
        let rows = (0..r.betas.len()).map(|l| {
            format!(
                "{},{},{},{}",
                r.betas[l], r.per_beta_means[l], r.per_beta_variance[l], r.acceptance_rates[l]
            )
        });
        write_csv(path, "beta,mean_f,var_f,accept_rate", rows)?;
    }

    if a.exact || a.convergence.is_some() {
        let exact = sre_fast(&psi, 2.0, &pool)?.m_q;
        report.set("exact_m2", exact).set("abs_error", (r.m2_hat - exact).abs());
        let _ = write!(text, "\nexact M_2={exact}  abs_error={:e}", (r.m2_hat - exact).abs());
        if let Some(path) = &a.convergence {
            let mut rows = Vec::new();
            for &n_s in &a.convergence_samples {
                let c = mc_sre(&psi, &SamplerConfig { samples_per_beta: n_s, ..cfg }, &pool)?;
                rows.push((n_s, (c.m2_hat - exact).abs()));
            }
            report.set(
                "convergence",
                rows.iter().map(|(n, e)| json!({"n_samples": n, "abs_error": e})).collect::<Vec<_>>(),
            );
            write_csv(path, "n_samples,abs_error", rows.iter().map(|(n, e)| format!("{n},{e}")))?;
        }
    }
    Ok(Outcome { report, text })
}

fn mana_report(report: &mut RunReport, r: &ManaResult) -> String {
    report.set("mana", r.mana).set("wigner_norm_defect", r.wigner_norm_defect);
    format!("mana={}  wigner_norm_defect={:e}", r.mana, r.wigner_norm_defect)
}

fn mana(a: &ManaArgs) -> anyhow::Result<Outcome> {
    let mut report = RunReport::new("mana");
    let psi = load_or_generate(&a.state, 3, &mut report)?;
    let workers = resolve_workers(a.workers)?;
    let mut pool = ThreadPool::new(workers);
    if !a.quiet {
        pool = pool.with_progress("mana");
    }
    report.workers = workers;
    report.inputs.method = Some(format!("{:?}", a.method).to_lowercase());
    let r = match a.method {
        ManaMethod::Fast => mana_fast(&psi, &pool)?,
        ManaMethod::Naive => {
            report.workers = 1;
            mana_naive(&psi)?
        }
    };
    let text = mana_report(&mut report, &r);
    Ok(Outcome { report, text })
}

fn mana_mixed_cmd(a: &ManaMixedArgs) -> anyhow::Result<Outcome> {
    let mut report = RunReport::new("mana-mixed");
    report.workers = 1;
    let rho: DensityMatrix = if let Some(path) = &a.rho {
        report.inputs.file = Some(path.display().to_string());
        let rho = format::load_density(path)?;
        report.inputs.sites = Some(rho.sites());
        report.inputs.local_dim = Some(rho.local_dim());
        rho
    } else {
        let psi = load_or_generate(&a.state, 3, &mut report)?;
        let keep = a.keep.unwrap_or(psi.sites());
        if keep == 0 || keep > psi.sites() {
            bail!("--keep must be between 1 and {}", psi.sites());
        }
        report.inputs.keep = Some(keep);
        reduced_density_matrix(&psi, &(0..keep).collect::<Vec<_>>())?
    };
    report.mem_bytes = rho.byte_size();
    if let Some(path) = &a.save_rho {
        format::save_density(path, &rho)?;
    }
    let r = mana_mixed(&rho)?;
    let text = mana_report(&mut report, &r);
    Ok(Outcome { report, text })
}

fn bench_cmd(a: &BenchArgs) -> anyhow::Result<Outcome> {
    let suite: Suite = a.suite.parse()?;
    let default_range = match suite {
        Suite::Sre => "10..14",
        Suite::Mana => "5..8",
    };
    let range = bench::parse_range(a.n_range.as_deref().unwrap_or(default_range))?;
    let workers = resolve_workers(a.workers)?;
    let rows = bench::run(suite, range, a.reps, &ThreadPool::new(workers))?;
    if let Some(path) = &a.csv {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        bench::write_csv(&mut w, &rows)?;
        w.flush()?;
    }
    let mut report = RunReport::new("bench");
    report.workers = workers;
    report.inputs.method = Some(a.suite.clone());
    report.set(
        "rows",
        rows.iter()
            .map(|r| json!({"n": r.sites, "seconds": r.seconds, "ratio": r.ratio, "target_ratio": r.target_ratio}))
            .collect::<Vec<_>>(),
    );
    let mut text = format!("{:>4} {:>12} {:>8} {:>8}", "N", "seconds", "ratio", "target");
    for r in &rows {
        let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.2}"));
        let _ = write!(text, "\n{:>4} {:>12.6} {:>8} {:>8}", r.sites, r.seconds, opt(r.ratio), opt(r.target_ratio));
    }
    Ok(Outcome { report, text })
}
