//! Command-line front end.

pub mod bench;
pub mod experiment;
pub mod sidecar;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::amoeba::{AmoebaGrower, AmoebaParams, RadiusNorm};
use crate::amoeba_morph::PilotGranularity;
use crate::canny::HighThreshold;
use crate::detector::{run_detector, DetectorKind, DetectorParams};
use crate::edge_map::{BinaryEdgeMap, EdgeMap, GroundTruth};
use crate::error::{Error, Result};
use crate::eval::{evaluate, ThresholdSampling, DEFAULT_FOM_ALPHA};
use crate::filters::gaussian_blur;
use crate::img::{read_image, write_image, Image};
use crate::io_util::atomic_write;
use crate::noise::{
    make_circle_image, NoiseKind, NoiseSpec, DEFAULT_CIRCLE_RADIUS, DEFAULT_CIRCLE_SIZE,
    DEFAULT_INNER_LEVEL, DEFAULT_OUTER_LEVEL,
};
use crate::VERSION;

use experiment::{run_sweep, SweepGrid};

#[derive(Debug, Parser)]
#[command(name = "morphamoeba", version, about = "Morphological amoeba edge detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the circle benchmark image and its ground-truth mask.
    Generate(GenerateArgs),
    /// Add seeded Gaussian or impulse noise to an image.
    Corrupt(CorruptArgs),
    /// Run one detector and write its edge map.
    Detect(DetectArgs),
    /// Score an edge map against a ground-truth mask.
    Eval(EvalArgs),
    /// Run a detector x noise level x parameter grid on the circle benchmark.
    Sweep(SweepArgs),
    /// Time the detectors against the amoeba radius.
    Bench(BenchArgs),
    /// Overlay one pixel's amoeba on the image.
    AmoebaDump(AmoebaDumpArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CircleArgs {
    #[arg(long, default_value_t = DEFAULT_CIRCLE_SIZE)]
    pub size: usize,
    #[arg(long, default_value_t = DEFAULT_OUTER_LEVEL)]
    pub outer: f64,
    #[arg(long, default_value_t = DEFAULT_INNER_LEVEL)]
    pub inner: f64,
    #[arg(long = "circle-radius", default_value_t = DEFAULT_CIRCLE_RADIUS)]
    pub circle_radius: f64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub circle: CircleArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth mask (255 on edge pixels).
    #[arg(long)]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_noise_kind)]
    pub noise: NoiseKind,
    /// Sigma for Gaussian noise, probability for impulse noise.
    #[arg(long)]
    pub level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// CSV log that receives one metadata line per call.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long, default_value_t = crate::amoeba::DEFAULT_RADIUS)]
    pub r: f64,
    #[arg(long, default_value_t = crate::amoeba::DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value_t = crate::amoeba_morph::DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = crate::amoeba_morph::DEFAULT_BETA1)]
    pub beta1: f64,
    #[arg(long, default_value_t = crate::amoeba_morph::DEFAULT_BETA2)]
    pub beta2: f64,
    #[arg(long, default_value_t = 1)]
    pub se_radius: usize,
    #[arg(long, default_value_t = crate::filters::DEFAULT_WINDOW_HALF_WIDTH)]
    pub window_n: usize,
    #[arg(long, default_value_t = crate::filters::DEFAULT_TRIM_ALPHA)]
    pub trim_alpha: f64,
    #[arg(long, default_value_t = crate::filters::DEFAULT_PILOT_SIGMA)]
    pub pilot_sigma: f64,
    /// chebyshev or euclidean
    #[arg(long, default_value = "chebyshev", value_parser = parse_norm)]
    pub norm: RadiusNorm,
    /// composite or elementary
    #[arg(long, default_value = "composite", value_parser = parse_granularity)]
    pub granularity: PilotGranularity,
    #[arg(long, default_value_t = crate::canny::DEFAULT_BLUR_SIGMA)]
    pub canny_sigma: f64,
    #[arg(long, default_value_t = crate::canny::DEFAULT_LOW_RATIO)]
    pub canny_low_ratio: f64,
    /// Percentile of nonzero suppressed magnitudes used as the high threshold.
    #[arg(long, default_value_t = crate::canny::DEFAULT_HIGH_PERCENTILE)]
    pub canny_high_percentile: f64,
    /// Absolute high threshold; overrides the percentile.
    #[arg(long)]
    pub canny_high: Option<f64>,
}

impl ParamArgs {
    pub fn to_params(&self) -> DetectorParams {
        DetectorParams {
            r: self.r,
            lambda: self.lambda,
            beta: self.beta,
            beta1: self.beta1,
            beta2: self.beta2,
            se_radius: self.se_radius,
            window_n: self.window_n,
            trim_alpha: self.trim_alpha,
            pilot_sigma: self.pilot_sigma,
            norm: self.norm,
            granularity: self.granularity,
            canny_sigma: self.canny_sigma,
            canny_low_ratio: self.canny_low_ratio,
            canny_high: match self.canny_high {
                Some(t) => HighThreshold::Fixed(t),
                None => HighThreshold::Percentile(self.canny_high_percentile),
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_detector)]
    pub detector: DetectorKind,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Edge map scaled to 0..=255 for viewing.
    #[arg(long)]
    pub out: PathBuf,
    /// Full-precision edge map; defaults to OUT with a `.edges` extension.
    #[arg(long)]
    pub raw: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Edge map: a raster written by `detect`, or a PGM.
    #[arg(long)]
    pub edges: PathBuf,
    /// Ground-truth mask PGM; nonzero pixels are edges.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value_t = DEFAULT_FOM_ALPHA)]
    pub alpha: f64,
    /// auto, exhaustive, quantiles:N or fixed:t1,t2,...
    #[arg(long, default_value = "auto", value_parser = parse_sampling)]
    pub sampling: ThresholdSampling,
    /// Summary CSV (fom, threshold, auc).
    #[arg(long)]
    pub out: PathBuf,
    /// ROC points CSV.
    #[arg(long)]
    pub roc: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_detector, required = true)]
    pub detectors: Vec<DetectorKind>,
    #[arg(long, value_parser = parse_noise_kind)]
    pub noise: NoiseKind,
    #[arg(long, value_delimiter = ',', required = true)]
    pub levels: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "7")]
    pub radii: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub lambdas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub betas: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub replicates: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "auto", value_parser = parse_sampling)]
    pub sampling: ThresholdSampling,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub circle: CircleArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Image to time on; defaults to the circle benchmark with 20% impulse noise.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,9,11")]
    pub radii: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AmoebaDumpArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: usize,
    #[arg(long)]
    pub y: usize,
    #[arg(long, default_value_t = crate::amoeba::DEFAULT_RADIUS)]
    pub r: f64,
    #[arg(long, default_value_t = crate::amoeba::DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value = "chebyshev", value_parser = parse_norm)]
    pub norm: RadiusNorm,
    /// Blur applied to form the pilot; 0 grows on the image itself.
    #[arg(long, default_value_t = crate::filters::DEFAULT_PILOT_SIGMA)]
    pub pilot_sigma: f64,
    /// Dump the original amoeba instead of the modified one.
    #[arg(long)]
    pub original: bool,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_detector(s: &str) -> std::result::Result<DetectorKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_noise_kind(s: &str) -> std::result::Result<NoiseKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_norm(s: &str) -> std::result::Result<RadiusNorm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_sampling(s: &str) -> std::result::Result<ThresholdSampling, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_granularity(s: &str) -> std::result::Result<PilotGranularity, String> {
    match s.to_ascii_lowercase().as_str() {
        "composite" => Ok(PilotGranularity::Composite),
        "elementary" => Ok(PilotGranularity::Elementary),
        other => Err(format!("unknown granularity {other:?}")),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, A>(args: I) -> Result<()>
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    run(Cli::parse_from(args))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Corrupt(a) => cmd_corrupt(&a),
        Command::Detect(a) => cmd_detect(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::AmoebaDump(a) => cmd_amoeba_dump(&a),
    }
}

fn circle(c: &CircleArgs) -> Result<(Image<f64>, GroundTruth)> {
    make_circle_image(c.size, c.outer, c.inner, c.circle_radius)
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let (image, truth) = circle(&a.circle)?;
    write_image(&image, &a.out)?;
    write_image(&truth.edge_mask.to_image::<f64>(), &a.truth)?;
    println!(
        "wrote {}x{} benchmark ({} edge pixels)",
        image.width(),
        image.height(),
        truth.count()
    );
    Ok(())
}

pub fn cmd_corrupt(a: &CorruptArgs) -> Result<()> {
    let spec = NoiseSpec {
        kind: a.noise,
        level: a.level,
        seed: a.seed,
    };
    let image: Image<f64> = read_image(&a.input)?;
    let noisy = spec.apply(&image)?;
    write_image(&noisy, &a.out)?;
    if let Some(log) = &a.log {
        let mut wtr = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        wtr.write_record([
            "corrupt",
            &a.input.display().to_string(),
            &a.out.display().to_string(),
            spec.kind.as_str(),
            &spec.level.to_string(),
            &spec.seed.to_string(),
            VERSION,
        ])?;
        let line = wtr
            .into_inner()
            .map_err(|e| Error::InvalidParameter(format!("CSV buffer: {e}")))?;
        append_atomic(log, &line)?;
    }
    Ok(())
}

fn append_atomic(path: &Path, extra: &[u8]) -> Result<()> {
    let mut bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(Error::io(path, e)),
    };
    bytes.extend_from_slice(extra);
    atomic_write(path, &bytes)
}

pub fn cmd_detect(a: &DetectArgs) -> Result<()> {
    let params = a.params.to_params();
    params.validate_for(a.detector)?;
    let image: Image<f64> = read_image(&a.input)?;
    let start = Instant::now();
    let edges = run_detector(a.detector, &image, &params)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    write_image(&edges.normalized_for_display(), &a.out)?;
    let raw = a.raw.clone().unwrap_or_else(|| a.out.with_extension("edges"));
    sidecar::write(&edges, &raw)?;
    println!("detector={} wall_ms={wall_ms:.3}", a.detector);
    Ok(())
}

fn read_edge_map(path: &Path) -> Result<EdgeMap<f64>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        EdgeMap::new(crate::img::decode_pgm(&bytes)?)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::MalformedImage(format!("{} is not text", path.display())))?;
        sidecar::decode(&text)
    }
}

pub fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let edges = read_edge_map(&a.edges)?;
    let truth_img: Image<f64> = read_image(&a.truth)?;
    let truth = GroundTruth::new(BinaryEdgeMap::from_image(&truth_img));
    let report = evaluate(&edges, &truth, a.alpha, &a.sampling)?;

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["edges", "truth", "alpha", "threshold", "fom", "auc", "version"])?;
    wtr.write_record([
        a.edges.display().to_string(),
        a.truth.display().to_string(),
        a.alpha.to_string(),
        report.fom_threshold.to_string(),
        report.fom.to_string(),
        report.auc().to_string(),
        VERSION.to_string(),
    ])?;
    atomic_write(&a.out, &into_bytes(wtr)?)?;

    if let Some(roc) = &a.roc {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["threshold", "p_f", "p_d"])?;
        for p in &report.roc.points {
            wtr.write_record([
                p.threshold.map(|t| t.to_string()).unwrap_or_default(),
                p.p_f.to_string(),
                p.p_d.to_string(),
            ])?;
        }
        atomic_write(roc, &into_bytes(wtr)?)?;
    }
    println!(
        "fom={:.6} threshold={} auc={:.6}",
        report.fom,
        report.fom_threshold,
        report.auc()
    );
    Ok(())
}

fn into_bytes(wtr: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    wtr.into_inner()
        .map_err(|e| Error::InvalidParameter(format!("CSV buffer: {e}")))
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let grid = SweepGrid {
        detectors: a.detectors.clone(),
        noise_kind: a.noise,
        levels: a.levels.clone(),
        radii: a.radii.clone(),
        lambdas: a.lambdas.clone(),
        betas: a.betas.clone(),
        replicates: a.replicates,
        global_seed: a.seed,
        base: a.params.to_params(),
    };
    for cell in grid.cells() {
        cell.params.validate_for(cell.detector)?;
        cell.noise.validate()?;
    }
    let (clean, truth) = circle(&a.circle)?;
    let work = || run_sweep(&grid, &clean, &truth, &a.sampling, &a.out);
    let computed = match a.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    println!(
        "{} cells, {} computed, written to {}",
        grid.cells().len(),
        computed,
        a.out.display()
    );
    Ok(())
}

/// The timing image used when `bench` gets no input: the default circle
/// benchmark with 20% impulse noise.
pub fn default_bench_image(seed: u64) -> Result<Image<f64>> {
    let (clean, _) = make_circle_image::<f64>(
        DEFAULT_CIRCLE_SIZE,
        DEFAULT_OUTER_LEVEL,
        DEFAULT_INNER_LEVEL,
        DEFAULT_CIRCLE_RADIUS,
    )?;
    NoiseSpec::impulse(0.2, seed).apply(&clean)
}

pub fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let image = match &a.input {
        Some(p) => read_image(p)?,
        None => default_bench_image(a.seed)?,
    };
    let report = bench::run_bench(&image, &a.radii, a.runs, &a.params.to_params())?;
    atomic_write(&a.out, &bench::bench_csv(&report)?)?;
    for fit in &report.fits {
        println!(
            "{}: a={:.6} ms, max residual {:.1}%; affine a={:.6} b={:.3} ms, max residual {:.1}%; increasing={}",
            fit.detector,
            fit.a,
            100.0 * fit.max_residual,
            fit.affine.0,
            fit.affine.1,
            100.0 * fit.affine_max_residual,
            fit.strictly_increasing
        );
    }
    Ok(())
}

pub fn cmd_amoeba_dump(a: &AmoebaDumpArgs) -> Result<()> {
    let image: Image<f64> = read_image(&a.input)?;
    let center = crate::img::PixelCoord::new(a.x, a.y);
    image.check_coord(center)?;
    let params = AmoebaParams::new(a.lambda, a.r)?.with_norm(a.norm);
    let pilot = if a.pilot_sigma > 0.0 {
        gaussian_blur(&image, a.pilot_sigma)?
    } else {
        image.clone()
    };
    let mut grower = AmoebaGrower::new(&pilot, params);
    let mut members = Vec::new();
    if a.original {
        grower.original(a.x, a.y, &mut members);
    } else {
        grower.modified(a.x, a.y, &mut members);
    }
    let mut overlay = image.map(|v| v / 2.0);
    for &i in &members {
        let i = i as usize;
        overlay.set(i % image.width(), i / image.width(), 255.0);
    }
    write_image(&overlay, &a.out)?;
    println!("amoeba at ({}, {}) has {} members", a.x, a.y, members.len());
    Ok(())
}
