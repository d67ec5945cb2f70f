//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on computation errors
//! (reported as a JSON object on stderr).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::json;

use crate::beta::{multiscale_rows, MultiscaleParams, ScaleGrid, DEFAULT_K};
use crate::construction::{
    build_graph, build_stopping_state, coverage_report, verify_whitney, whitney_decompose, StoppingParams,
    StoppingState, WhitneyDomain, WhitneyOptions, DEFAULT_LEVELS,
};
use crate::curvature::{curvature_exact, curvature_local, curvature_mc, LocalRegion, DEFAULT_TUPLE_CAP};
use crate::error::{Error, Result};
use crate::harness::{
    contrast_experiment, lipschitz_ladder, simplex_search_check, verify_global_bound,
    verify_pointwise_bound, ContrastConfig, DEFAULT_K1,
};
use crate::integrands::{symmetrize, Integrand, IntegrandKind};
use crate::measure::{self, Ball, DiscreteMeasure, GraphSpec};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "MENGERLAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "mengerlab", version, about = "Discrete Menger curvature, β-numbers and Lipschitz-graph construction")]
struct Cli {
    /// Worker threads (falls back to MENGERLAB_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a point cloud as CSV.
    Generate(GenerateArgs),
    /// Per-scale β-numbers and densities.
    Beta(BetaArgs),
    /// Discrete integral Menger curvature.
    Curvature(CurvatureArgs),
    /// Evaluate both sides of a curvature-controls-flatness inequality.
    Verify(VerifyArgs),
    /// Run the stopping-time construction and build the graph map.
    Construct(ConstructArgs),
    /// Per-point partition labels.
    Classify(ClassifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum GenKind {
    Segment,
    PlanePatch,
    LipschitzGraph,
    Sphere,
    FourCornerCantor,
    CantorProduct,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Intrinsic dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Ambient dimension (defaults to n + 1).
    #[arg(long)]
    ambient: Option<usize>,
    #[arg(long, default_value_t = 3)]
    depth: u32,
    #[arg(long, default_value_t = 100)]
    n_points: usize,
    /// Grid points per side for plane patches.
    #[arg(long, default_value_t = 10)]
    per_side: usize,
    /// Fourier coefficients of a Lipschitz graph, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.2")]
    coeffs: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    half_width: f64,
    /// Standard deviation of isotropic Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InputArgs {
    #[arg(long, value_parser = existing_file)]
    input: PathBuf,
    /// Intrinsic dimension.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct BetaArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, conflicts_with = "all_points", required_unless_present = "all_points")]
    x_index: Option<usize>,
    #[arg(long)]
    all_points: bool,
    /// Scale grid `min:max:count`.
    #[arg(long, default_value = "0.01:1:16")]
    scales: ScaleGrid,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    #[arg(long, default_value_t = 2.0)]
    k0: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CurvatureArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "k1")]
    integrand: IntegrandKind,
    /// Exponent (defaults to the kind's natural exponent).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, conflicts_with = "mc")]
    exact: bool,
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Restrict to the local region `x_id:t:kappa`.
    #[arg(long)]
    local: Option<String>,
    /// Average over argument permutations.
    #[arg(long)]
    symmetrize: bool,
    #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
    cap: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Experiment {
    Pointwise,
    Global,
    Contrast,
    Simplex,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    experiment: Experiment,
    /// Input measure; the contrast experiment uses generated data without it.
    #[arg(long, value_parser = existing_file)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, default_value = "k1")]
    integrand: IntegrandKind,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    x_index: usize,
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: f64,
    #[arg(long, default_value_t = DEFAULT_K1)]
    k1: f64,
    #[arg(long, default_value_t = 2.0)]
    k0: f64,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    #[arg(long, default_value = "0.01:1:16")]
    scales: ScaleGrid,
    /// Run the Lipschitz-graph ladder instead of segment vs. Cantor.
    #[arg(long)]
    ladder: bool,
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TUPLE_CAP)]
    cap: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StoppingArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: f64,
    /// Number of grid levels below the top scale.
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    scales: usize,
    /// Density threshold (defaults to a dimension-dependent value).
    #[arg(long)]
    lambda_delta: Option<f64>,
}

impl StoppingArgs {
    fn params(&self) -> Result<StoppingParams> {
        let mut p = StoppingParams::new(self.epsilon, self.alpha, self.k)?;
        p.levels = self.scales;
        p.lambda_delta = self.lambda_delta;
        Ok(p)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DomainArg {
    Support,
    Ball12,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    stopping: StoppingArgs,
    #[arg(long, value_enum, default_value = "support")]
    domain: DomainArg,
    #[arg(long, default_value_t = 1e-6)]
    coverage_tol: f64,
    /// Samples per axis of the graph grid.
    #[arg(long, default_value_t = 101)]
    graph_samples: usize,
    #[arg(long)]
    output_state: Option<PathBuf>,
    #[arg(long)]
    output_graph: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    stopping: StoppingArgs,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn existing_file(s: &str) -> std::result::Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.is_file() {
        Ok(p)
    } else {
        Err(format!("input file '{s}' does not exist"))
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = cli.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()));
    let result = match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Error::BadParams(format!("cannot start {t} worker threads: {e}"))),
        },
        None => dispatch(cli.command),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            2
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Beta(a) => beta(a),
        Command::Curvature(a) => curvature(a),
        Command::Verify(a) => verify(a),
        Command::Construct(a) => construct(a),
        Command::Classify(a) => classify(a),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn load(a: &InputArgs) -> Result<DiscreteMeasure> {
    measure::read_csv(&a.input, a.n)
}

fn integrand(kind: IntegrandKind, p: Option<f64>, n: usize) -> Result<Integrand> {
    match p {
        Some(p) => Integrand::new(kind, p),
        None => Ok(Integrand::with_default_exponent(kind, n)),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    let ambient = a.ambient.unwrap_or(a.n + 1);
    let mu = match a.kind {
        GenKind::Segment => measure::segment(a.n_points, ambient)?,
        GenKind::PlanePatch => measure::plane_patch(a.n, ambient, a.per_side)?,
        GenKind::LipschitzGraph => {
            let spec = GraphSpec { coeffs: a.coeffs, n: a.n, ambient, half_width: a.half_width, n_points: a.n_points };
            measure::lipschitz_graph(&spec, a.seed)?
        }
        GenKind::Sphere => measure::sphere(a.n, a.n_points, a.seed)?,
        GenKind::FourCornerCantor => measure::four_corner_cantor(a.depth)?,
        GenKind::CantorProduct => measure::cantor_product(a.n, a.depth)?,
    };
    let mu = if a.noise > 0.0 { measure::add_noise(&mu, a.noise, a.seed)? } else { mu };
    let w = sink(a.output.as_deref())?;
    measure::write_csv_to(&mu, w)
}

fn beta(a: BetaArgs) -> Result<()> {
    let mu = load(&a.input)?;
    let ids: Vec<usize> = match a.x_index {
        Some(i) if i >= mu.len() => return Err(Error::IndexOutOfRange { index: i, len: mu.len() }),
        Some(i) => vec![i],
        None => (0..mu.len()).collect(),
    };
    let params = MultiscaleParams { k: a.k, p: a.p, lambda: a.lambda, k0: a.k0 };
    let mut w = csv::Writer::from_writer(sink(a.output.as_deref())?);
    w.write_record(["point_id", "t", "beta", "delta", "delta_tilde", "indicator"])?;
    for i in ids {
        for r in multiscale_rows(&mu, mu.point(i), &a.scales, params)? {
            w.write_record([
                i.to_string(),
                r.t.to_string(),
                r.beta.to_string(),
                r.delta.to_string(),
                r.delta_tilde.to_string(),
                (r.indicator as u8).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_local(arg: &str, mu: &DiscreteMeasure) -> Result<LocalRegion> {
    let bad = || Error::BadParams(format!("local region '{arg}' is not of the form x_id:t:kappa"));
    let parts: Vec<&str> = arg.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let id: usize = parts[0].parse().map_err(|_| bad())?;
    let t: f64 = parts[1].parse().map_err(|_| bad())?;
    let kappa: f64 = parts[2].parse().map_err(|_| bad())?;
    if id >= mu.len() {
        return Err(Error::IndexOutOfRange { index: id, len: mu.len() });
    }
    LocalRegion::new(mu.point(id).clone(), t, kappa)
}

fn curvature(a: CurvatureArgs) -> Result<()> {
    let mu = load(&a.input)?;
    let f = integrand(a.integrand, a.p, mu.intrinsic_dim())?;
    let use_mc = a.mc && !a.exact;
    let est = if a.symmetrize {
        let s = symmetrize(f, mu.intrinsic_dim())?;
        match (&a.local, use_mc) {
            (Some(l), _) => curvature_local(&mu, &s, &parse_local(l, &mu)?, a.cap)?,
            (None, true) => curvature_mc(&mu, &s, a.samples, a.seed)?,
            (None, false) => curvature_exact(&mu, &s, a.cap)?,
        }
    } else {
        match (&a.local, use_mc) {
            (Some(l), _) => curvature_local(&mu, &f, &parse_local(l, &mu)?, a.cap)?,
            (None, true) => curvature_mc(&mu, &f, a.samples, a.seed)?,
            (None, false) => curvature_exact(&mu, &f, a.cap)?,
        }
    };
    write_json(&est, a.output.as_deref())
}

fn verify(a: VerifyArgs) -> Result<()> {
    let load_input = || -> Result<DiscreteMeasure> {
        let path = a.input.as_ref().ok_or_else(|| Error::BadParams("this experiment needs --input".into()))?;
        measure::read_csv(path, a.n)
    };
    let f = integrand(a.integrand, a.p, a.n)?;
    let out = a.output.as_deref();
    match a.experiment {
        Experiment::Pointwise => {
            let mu = load_input()?;
            let x = mu.points().get(a.x_index).ok_or(Error::IndexOutOfRange { index: a.x_index, len: mu.len() })?;
            let r = verify_pointwise_bound(&mu, &f, x, a.t, a.k, a.k1, a.lambda, a.cap)?;
            write_json(&r, out)
        }
        Experiment::Global => {
            let mu = load_input()?;
            let params = MultiscaleParams { k: a.k, p: f.p, lambda: a.lambda, k0: a.k0 };
            write_json(&verify_global_bound(&mu, &f, params, &a.scales, a.cap)?, out)
        }
        Experiment::Contrast => {
            let config = ContrastConfig {
                integrand: f,
                k: a.k,
                k0: a.k0,
                lambda: a.lambda,
                grid: a.scales.clone(),
                cap: a.cap,
                mc_samples: 1_000_000,
                seed: a.seed,
            };
            if a.ladder {
                let config = ContrastConfig { lambda: 0.0, ..config };
                let seeds: Vec<u64> = (a.seed..a.seed + a.seeds).collect();
                let report = lipschitz_ladder(&[0.0, 0.1, 0.2, 0.4], 40, &seeds, &config)?;
                return write_json(&report, out);
            }
            let measures = match a.input {
                Some(_) => vec![("input".to_string(), load_input()?)],
                None => vec![
                    ("segment".to_string(), measure::segment(256, 2)?),
                    ("four_corner_cantor".to_string(), measure::four_corner_cantor(4)?),
                ],
            };
            let entries = contrast_experiment(&measures, &config)?;
            write_json(&json!({ "experiment": "contrast", "config": config, "entries": entries }), out)
        }
        Experiment::Simplex => {
            let mu = load_input()?;
            let x = mu.points().get(a.x_index).ok_or(Error::IndexOutOfRange { index: a.x_index, len: mu.len() })?;
            if !(a.t > 0.0) {
                return Err(Error::BadParams(format!("ball radius must be positive, got {}", a.t)));
            }
            let r = simplex_search_check(&mu, &Ball { center: x.clone(), radius: a.t }, a.lambda)?;
            write_json(&json!({ "experiment": "simplex", "config": { "x_index": a.x_index, "t": a.t, "lambda": a.lambda }, "report": r }), out)
        }
    }
}

fn point_rows(state: &StoppingState) -> Vec<serde_json::Value> {
    (0..state.measure.len())
        .map(|i| {
            json!({
                "point_id": i,
                "label": state.labels[i].as_str(),
                "h": state.h[i],
                "d": if state.d[i].is_finite() { json!(state.d[i]) } else { json!(null) },
                "min_s_scale": state.min_s_scale(i).map(|e| state.scales[e]),
            })
        })
        .collect()
}

fn construct(a: ConstructArgs) -> Result<()> {
    let mu = load(&a.stopping.input)?;
    let state = build_stopping_state(&mu, &a.stopping.params()?)?;
    let domain = match a.domain {
        DomainArg::Support => WhitneyDomain::Support,
        DomainArg::Ball12 => WhitneyDomain::Ball12,
    };
    let cubes = whitney_decompose(&state, &WhitneyOptions { domain });
    let check = verify_whitney(&state, &cubes);
    let graph = build_graph(&state, &cubes)?;
    let coverage = coverage_report(&state, &graph, a.coverage_tol);
    let summary = json!({
        "params": {
            "epsilon": state.epsilon, "alpha": state.alpha, "k": state.k, "lambda_delta": state.lambda_delta,
        },
        "normalization": state.normalization,
        "reference_basis": state.reference.basis().iter().copied().collect::<Vec<_>>(),
        "scales": state.scales,
        "label_masses": coverage.label_masses,
        "whitney": check,
        "cubes": cubes,
        "coverage": coverage,
        "points": point_rows(&state),
    });
    if let Some(path) = &a.output_graph {
        write_graph_csv(&state, &graph, a.graph_samples, path)?;
    }
    write_json(&summary, a.output_state.as_deref())
}

/// Samples `A` on a regular grid over the bounding box of the projected
/// support (normalized coordinates). Undefined values are left empty.
fn write_graph_csv(
    state: &StoppingState,
    graph: &crate::construction::GraphFunction,
    samples: usize,
    path: &Path,
) -> Result<()> {
    let n = state.reference.dim();
    let m = state.measure.ambient_dim() - n;
    let coords: Vec<DVector<f64>> = state.measure.points().iter().map(|x| state.plane_coords(x)).collect();
    let lo: Vec<f64> = (0..n).map(|k| coords.iter().map(|c| c[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..n).map(|k| coords.iter().map(|c| c[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let samples = samples.max(2);
    let total = samples
        .checked_pow(n as u32)
        .filter(|&t| t <= 10_000_000)
        .ok_or_else(|| Error::BadParams(format!("{samples}^{n} graph samples is too many")))?;
    let mut w = csv::Writer::from_writer(sink(Some(path))?);
    let header: Vec<String> = (0..n).map(|k| format!("u{k}")).chain((0..m).map(|k| format!("a{k}"))).collect();
    w.write_record(&header)?;
    for idx in 0..total {
        let mut rest = idx;
        let u = DVector::from_iterator(
            n,
            (0..n).map(|k| {
                let j = rest % samples;
                rest /= samples;
                lo[k] + (hi[k] - lo[k]) * j as f64 / (samples - 1) as f64
            }),
        );
        let mut row: Vec<String> = u.iter().map(|v| v.to_string()).collect();
        match graph.value_coords(&u) {
            Ok(v) => row.extend(v.iter().map(|x| x.to_string())),
            Err(Error::OutOfDomain) => row.extend(std::iter::repeat_n(String::new(), m)),
            Err(e) => return Err(e),
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn classify(a: ClassifyArgs) -> Result<()> {
    let mu = load(&a.stopping.input)?;
    let state = build_stopping_state(&mu, &a.stopping.params()?)?;
    let mut w = csv::Writer::from_writer(sink(a.output.as_deref())?);
    w.write_record(["point_id", "label", "h", "d"])?;
    for i in 0..state.measure.len() {
        w.write_record([i.to_string(), state.labels[i].as_str().to_string(), state.h[i].to_string(), state.d[i].to_string()])?;
    }
    w.flush()?;
    Ok(())
}
