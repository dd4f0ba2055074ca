use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tvstat::features::{add_noise, extract_jpsd_features, frame_signal, kernel_graph, zscore, EdgeRule};
use tvstat::filtering::{apply_filter, random_filter, TapKind};
use tvstat::graph::{gen_erdos_renyi, gen_watts_strogatz};
use tvstat::harmonic::{inverse_jft, jft};
use tvstat::io::{
    filter_to_json, graph_to_json, parse_config_json, parse_filter_json, parse_graph_json, parse_layout_json,
    parse_manifest_json, read_signal, read_text, write_features_csv, write_jpsd_csv, write_signal,
};
use tvstat::jpsd::{gbm, gwm_with_gain, WindowGain};
use tvstat::rng::{child_rng, derive_seed};
use tvstat::sim::{sweep, write_sweep_csv, Method, SweepAxis};
use tvstat::stationarity::{synthesize_jwss, SynthesisMode};
use tvstat::translation::joint_translate;
use tvstat::{Error, JointBasis, Result, WeightedGraph, WindowBank};

/// Joint time-vertex signal processing: transforms, filters, JWSS synthesis,
/// JPSD estimation and experiment sweeps.
#[derive(Parser, Debug)]
#[command(name = "tvstat", version)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print a short summary of each step to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graph generation.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Joint Fourier transform and its inverse.
    #[command(subcommand)]
    Transform(TransformCmd),
    /// Joint translation by `upsilon` time steps and `theta` graph steps.
    Translate(TranslateArgs),
    /// JFIR filter generation and application.
    #[command(subcommand)]
    Filter(FilterCmd),
    /// Joint wide-sense stationary process synthesis.
    #[command(subcommand)]
    Jwss(JwssCmd),
    /// Joint power spectral density estimation.
    #[command(subcommand)]
    Jpsd(JpsdCmd),
    /// Monte-Carlo experiments.
    #[command(subcommand)]
    Sim(SimCmd),
    /// Feature extraction from multichannel recordings.
    #[command(subcommand)]
    Features(FeaturesCmd),
}

#[derive(Subcommand, Debug)]
enum GraphCmd {
    /// Draw a random connected graph and write it as JSON.
    Gen(GraphGenArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Kind {
    Er,
    Ws,
}

#[derive(Args, Debug)]
struct GraphGenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of vertices.
    #[arg(long)]
    n: usize,
    /// Edge probability (ER).
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Ring degree, even (WS).
    #[arg(long, default_value_t = 4)]
    k_ring: usize,
    /// Rewiring probability (WS).
    #[arg(long, default_value_t = 0.3)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum TransformCmd {
    /// Forward transform; the output is complex, so use a `.tvsg` path.
    Jft(TransformArgs),
    /// Inverse transform.
    Ijft(TransformArgs),
}

#[derive(Args, Debug)]
struct TransformArgs {
    /// Graph JSON.
    #[arg(long)]
    graph: PathBuf,
    /// Input signal, CSV (N rows x M columns) or TVSG.
    #[arg(long)]
    signal: PathBuf,
    /// Output signal; `.tvsg` writes binary, anything else CSV (real only).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    /// Time shift.
    #[arg(long, allow_hyphen_values = true)]
    upsilon: i64,
    /// Graph shift.
    #[arg(long, allow_hyphen_values = true)]
    theta: i64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum FilterCmd {
    /// Draw random taps, scaled so the peak response on the graph is one.
    Gen(FilterGenArgs),
    /// Filter a signal.
    Apply(FilterApplyArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Taps {
    Complex,
    Real,
}

#[derive(Args, Debug)]
struct FilterGenArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Signal length the response is normalized on.
    #[arg(long)]
    m: usize,
    /// Number of time taps.
    #[arg(long)]
    l1: usize,
    /// Number of graph taps.
    #[arg(long)]
    l2: usize,
    #[arg(long, value_enum, default_value_t = Taps::Complex)]
    taps: Taps,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct FilterApplyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Filter JSON.
    #[arg(long)]
    filter: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum JwssCmd {
    /// Filter white noise into `q` realizations.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    filter: PathBuf,
    /// Signal length.
    #[arg(long)]
    m: usize,
    /// Number of realizations.
    #[arg(long, default_value_t = 1)]
    q: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for `x_<i>.csv` (with --real) or `x_<i>.tvsg`.
    #[arg(long)]
    out_dir: PathBuf,
    /// Use the conjugate-symmetrized response so realizations are real.
    #[arg(long)]
    real: bool,
    /// Also write the true JPSD as CSV.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum JpsdCmd {
    /// Estimate the JPSD from one or more realizations.
    Estimate(EstimateArgs),
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MethodArg {
    Gbm,
    Gwm,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum GainArg {
    Spectral,
    Scalar,
    Raw,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    graph: PathBuf,
    /// Realization file; repeat for several.
    #[arg(long, required = true)]
    signal: Vec<PathBuf>,
    /// Time window length (GWM; default min(32, M)).
    #[arg(long = "L")]
    window_len: Option<usize>,
    /// Time window hop (GWM; default L / 2).
    #[arg(long)]
    hop: Option<usize>,
    /// Number of graph windows (GWM).
    #[arg(long, default_value_t = 5)]
    k2: usize,
    /// Heat-kernel bandwidth of the graph windows (GWM; default rho_G / 10).
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Window gain compensation (GWM).
    #[arg(long, value_enum, default_value_t = GainArg::Spectral, conflicts_with = "raw_gwm")]
    gain: GainArg,
    /// Literal windowed average without compensation; same as `--gain raw`.
    #[arg(long)]
    raw_gwm: bool,
    /// Seed for the graph window centres (GWM).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JPSD CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum SimCmd {
    /// Run an experiment for every value on one axis and write a CSV table.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Experiment config JSON; omitted fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// One of q, degrees, window_geometry.
    #[arg(long)]
    axis: String,
    /// Overrides the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's estimator.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Fill the wall_time_s column (makes the output nondeterministic).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand, Debug)]
enum FeaturesCmd {
    /// Frame each recording, estimate its JPSD and write a feature table.
    Build(FeaturesArgs),
}

#[derive(Args, Debug)]
struct FeaturesArgs {
    /// Manifest JSON; relative paths inside it are resolved against its directory.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value_t = 150.0)]
    frame_ms: f64,
    /// Add white Gaussian noise at this SNR before framing.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Kernel scale.
    #[arg(long, default_value_t = 5.1)]
    gamma: f64,
    /// Kernel weight on the layout's global pairs.
    #[arg(long, default_value_t = 2.0)]
    kappa_global: f64,
    /// Kernel weight on all other pairs.
    #[arg(long, default_value_t = 1.0)]
    kappa_local: f64,
    /// Keep only each channel's k nearest neighbours (plus global pairs).
    #[arg(long)]
    knn: Option<usize>,
    /// Skip the per-column z-score.
    #[arg(long)]
    no_zscore: bool,
    /// Seed for the added noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
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
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error kind=InvalidParameterError msg={e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command, cli.verbose) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error kind={} msg={}", e.kind(), e.to_string().replace('\n', " "));
            ExitCode::from(if e.is_numeric() { 2 } else { 1 })
        }
    }
}

fn run(command: Command, verbose: bool) -> Result<()> {
    let log = |msg: String| {
        if verbose {
            eprintln!("{msg}");
        }
    };
    match command {
        Command::Graph(GraphCmd::Gen(a)) => {
            let g = match a.kind {
                Kind::Er => gen_erdos_renyi(a.n, a.p, a.seed)?,
                Kind::Ws => gen_watts_strogatz(a.n, a.k_ring, a.beta, a.seed)?,
            };
            write_text(&a.out, &graph_to_json(&g)?)?;
            log(format!("graph: {} vertices, {} edges", g.n_vertices(), g.edge_count()));
        }
        Command::Transform(cmd) => {
            let (a, forward) = match cmd {
                TransformCmd::Jft(a) => (a, true),
                TransformCmd::Ijft(a) => (a, false),
            };
            let x = read_signal(&a.signal)?;
            let jb = load_basis(&a.graph, x.n_times())?;
            let y = if forward { jft(&jb, &x)? } else { inverse_jft(&jb, &x)? };
            write_signal(&a.out, &y)?;
        }
        Command::Translate(a) => {
            let x = read_signal(&a.signal)?;
            let jb = load_basis(&a.graph, x.n_times())?;
            write_signal(&a.out, &joint_translate(&jb, &x, a.upsilon, a.theta)?)?;
        }
        Command::Filter(FilterCmd::Gen(a)) => {
            let jb = load_basis(&a.graph, a.m)?;
            let kind = match a.taps {
                Taps::Complex => TapKind::Complex,
                Taps::Real => TapKind::Real,
            };
            let spec = random_filter(a.l1, a.l2, kind, &jb, &mut child_rng(a.seed, &[]))?;
            write_text(&a.out, &filter_to_json(&spec)?)?;
        }
        Command::Filter(FilterCmd::Apply(a)) => {
            let spec = parse_filter_json(&read_text(&a.filter)?)?;
            let x = read_signal(&a.signal)?;
            let jb = load_basis(&a.graph, x.n_times())?;
            write_signal(&a.out, &apply_filter(&spec, &jb, &x)?)?;
        }
        Command::Jwss(JwssCmd::Synth(a)) => {
            let spec = parse_filter_json(&read_text(&a.filter)?)?;
            let jb = load_basis(&a.graph, a.m)?;
            let mode = if a.real { SynthesisMode::Real } else { SynthesisMode::Complex };
            let (xs, truth) = synthesize_jwss(&spec, &jb, a.q, a.seed, mode)?;
            fs::create_dir_all(&a.out_dir)?;
            let ext = if a.real { "csv" } else { "tvsg" };
            for (i, x) in xs.iter().enumerate() {
                write_signal(&a.out_dir.join(format!("x_{i}.{ext}")), x)?;
            }
            if let Some(path) = &a.truth {
                write_text(path, &write_jpsd_csv(&jb, &truth)?)?;
            }
            log(format!("jwss: wrote {} realizations to {}", xs.len(), a.out_dir.display()));
        }
        Command::Jpsd(JpsdCmd::Estimate(a)) => estimate(a)?,
        Command::Sim(SimCmd::Sweep(a)) => {
            let mut cfg = match &a.config {
                Some(p) => parse_config_json(&read_text(p)?)?,
                None => Default::default(),
            };
            if let Some(t) = a.trials {
                cfg.trials = t;
            }
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            if let Some(m) = a.method {
                cfg.method = match m {
                    MethodArg::Gbm => Method::Gbm,
                    MethodArg::Gwm => Method::Gwm,
                };
            }
            let axis: SweepAxis = a.axis.parse()?;
            let rows = sweep(&cfg, axis)?;
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf, a.timing)?;
            fs::write(&a.out, buf)?;
            log(format!("sweep: {} rows", rows.len()));
        }
        Command::Features(FeaturesCmd::Build(a)) => build_features(a, &log)?,
    }
    Ok(())
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let xs = a.signal.iter().map(|p| read_signal(p)).collect::<Result<Vec<_>>>()?;
    let (n, m) = xs[0].shape();
    if let Some((i, x)) = xs.iter().enumerate().find(|(_, x)| x.shape() != (n, m)) {
        return Err(Error::Geometry(format!(
            "realization {i} is {}x{}, realization 0 is {n}x{m}",
            x.n_vertices(),
            x.n_times()
        )));
    }
    let g = load_graph(&a.graph)?;
    if g.n_vertices() != n {
        return Err(Error::Geometry(format!(
            "signals have {n} vertices, graph has {}",
            g.n_vertices()
        )));
    }
    let jb = JointBasis::from_graph(&g, m)?;
    let theta = match a.method {
        MethodArg::Gbm => gbm(&xs, &jb)?,
        MethodArg::Gwm => {
            let len = a.window_len.unwrap_or(m.min(32));
            let hop = a.hop.unwrap_or((len / 2).max(1));
            let bandwidth = a.bandwidth.unwrap_or(jb.graph().rho() / 10.0);
            let bank = WindowBank::joint(&g, jb.graph(), m, len, hop, a.k2, bandwidth, a.seed)?;
            let gain = match (a.raw_gwm, a.gain) {
                (true, _) | (_, GainArg::Raw) => WindowGain::Raw,
                (_, GainArg::Spectral) => WindowGain::Spectral,
                (_, GainArg::Scalar) => WindowGain::Scalar,
            };
            gwm_with_gain(&xs, &jb, &bank, gain)?
        }
    };
    write_text(&a.out, &write_jpsd_csv(&jb, &theta)?)
}

fn build_features(a: FeaturesArgs, log: &dyn Fn(String)) -> Result<()> {
    let manifest = parse_manifest_json(&read_text(&a.manifest)?)?;
    let base = a.manifest.parent().unwrap_or(Path::new("."));
    let layout = parse_layout_json(&read_text(&base.join(&manifest.layout))?)?;
    let rule = match a.knn {
        Some(k) => EdgeRule::Knn(k),
        None => EdgeRule::All,
    };
    let g = kernel_graph(&layout, a.gamma, a.kappa_global, a.kappa_local, rule)?;
    let mut samples = Vec::with_capacity(manifest.samples.len());
    let mut labels = Vec::with_capacity(manifest.samples.len());
    for (i, s) in manifest.samples.iter().enumerate() {
        let x = read_signal(&base.join(&s.path))?;
        if !x.is_real() {
            return Err(Error::Parse(format!("{}: recordings must be real", s.path)));
        }
        if x.n_vertices() != layout.len() {
            return Err(Error::Geometry(format!(
                "{} has {} channels, layout has {}",
                s.path,
                x.n_vertices(),
                layout.len()
            )));
        }
        let raw = add_noise(&x.real_part(), a.snr_db, derive_seed(a.seed, &[i as u64]))?;
        samples.push(frame_signal(&raw, a.frame_ms, manifest.rate_hz)?);
        labels.push(s.label.clone());
    }
    let m = samples[0][0].n_times();
    let jb = JointBasis::from_graph(&g, m)?;
    let mut fm = extract_jpsd_features(&samples, labels, &jb)?;
    if !a.no_zscore {
        fm = zscore(&fm)?;
    }
    write_text(&a.out, &write_features_csv(&fm)?)?;
    log(format!("features: {} samples x {} features", fm.n_samples(), fm.n_features()));
    Ok(())
}

fn load_graph(path: &Path) -> Result<WeightedGraph> {
    parse_graph_json(&read_text(path)?)
}

fn load_basis(graph: &Path, m: usize) -> Result<JointBasis> {
    JointBasis::from_graph(&load_graph(graph)?, m)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

