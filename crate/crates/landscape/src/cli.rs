//! Subcommands of the `landscape` binary.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use landscape_core::aas::{cross_validate, CvOptions, CvReport, CvScheme, ErtTable, SelectorKind, SelectorParams};
use landscape_core::ela::compute_all;
use landscape_core::fitmap::{knn_cloud, multichannel, pca_map, rasterize_2d, reduce_mean};
use landscape_core::preprocess::{preprocess_pipeline, Encoding, ProcessedDesign};
use landscape_core::sampling::{
    create_initial_design_with, default_sample_size, evaluate_design, Design, SamplingStrategy,
};
use landscape_core::space::{builtin_problem, BuiltinFunction, Problem, SearchSpace};
use log::info;
use serde::Serialize;

use crate::config::{FitmapMode, RunConfig};
use crate::design_csv::{self, ProblemRef};
use crate::error::{Error, Result};
use crate::features_io::{self, Labels};
use crate::{fitmap_io, joe_kuo, performance, processed_csv, space_json};

#[derive(Debug, Parser)]
#[command(name = "landscape", version, about = "Landscape features, fitness maps and algorithm-selection evaluation")]
pub struct Cli {
    /// TOML run configuration; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw an initial design over a search space.
    Sample(SampleArgs),
    /// Evaluate a design on its built-in problem.
    Evaluate(EvaluateArgs),
    /// Run the preprocessing pipeline and export the numeric design.
    Preprocess(PreprocessArgs),
    /// Compute the ELA feature sets of one or more evaluated designs.
    Features(FeaturesArgs),
    /// Export fitness maps or a nearest-neighbor point cloud.
    Fitmap(FitmapArgs),
    /// Cross-validate a selector against single-best and virtual-best baselines.
    Aas(AasArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Uniform,
    #[value(name = "lhs", alias = "latin_hypercube")]
    Lhs,
    Sobol,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EncodingArg {
    None,
    #[value(name = "one_hot", alias = "one-hot")]
    OneHot,
    Target,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Raw2d,
    Pca,
    PcaFunc,
    Mc,
    Rmc,
    Cloud,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    #[value(name = "leave_iid_out", alias = "leave-iid-out")]
    LeaveIidOut,
    #[value(name = "leave_fid_out", alias = "leave-fid-out")]
    LeaveFidOut,
    #[value(name = "leave_group_out", alias = "leave-group-out")]
    LeaveGroupOut,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Knn,
    #[value(name = "nearest_centroid", alias = "nearest-centroid")]
    NearestCentroid,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// `builtin:<function>:d<D>[:i<iid>]` or a search-space JSON file.
    pub space: String,
    /// Sample size (default 50 per dimension).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub design: PathBuf,
    /// `builtin:<function>:d<D>[:i<iid>]`; defaults to the problem recorded
    /// when the design was sampled.
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EncodingFlags {
    #[arg(long, value_enum)]
    pub encoding: Option<EncodingArg>,
    /// Target-encoding smoothing strength.
    #[arg(long)]
    pub smoothing: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    pub design: PathBuf,
    #[command(flatten)]
    pub encoding: EncodingFlags,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[arg(required = true)]
    pub designs: Vec<PathBuf>,
    #[command(flatten)]
    pub encoding: EncodingFlags,
    /// Seed of the information-content tour start.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Instance labels for a single design without a built-in problem.
    #[arg(long)]
    pub fid: Option<String>,
    #[arg(long)]
    pub iid: Option<String>,
    /// `.json` writes the flat feature object (one design only); anything
    /// else writes a CSV with one row per design.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitmapArgs {
    pub design: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Neighbors per point in cloud mode.
    #[arg(long)]
    pub k: Option<usize>,
    /// Column pair of the raw2d map.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub columns: Option<Vec<usize>>,
    #[command(flatten)]
    pub encoding: EncodingFlags,
    /// Output stem; files are named `<stem>_<channel>.pgm` or `<stem>_cloud.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AasArgs {
    /// Feature CSV with `fid,iid[,group]` leading columns.
    pub features: PathBuf,
    /// Performance CSV `fid,iid,algorithm,run,evaluations,success,budget`.
    pub performance: PathBuf,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub cost_sensitive: Option<bool>,
    /// Evaluations charged per selection for computing the features.
    #[arg(long)]
    pub feature_cost: Option<u64>,
    /// Imputation factor for unsolved cells: budget * runs * penalty.
    #[arg(long)]
    pub penalty: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

impl From<StrategyArg> for SamplingStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Uniform => SamplingStrategy::Uniform,
            StrategyArg::Lhs => SamplingStrategy::LatinHypercube,
            StrategyArg::Sobol => SamplingStrategy::Sobol,
        }
    }
}

impl From<EncodingArg> for Encoding {
    fn from(e: EncodingArg) -> Self {
        match e {
            EncodingArg::None => Encoding::None,
            EncodingArg::OneHot => Encoding::OneHot,
            EncodingArg::Target => Encoding::Target,
        }
    }
}

impl From<ModeArg> for FitmapMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Raw2d => FitmapMode::Raw2d,
            ModeArg::Pca => FitmapMode::Pca,
            ModeArg::PcaFunc => FitmapMode::PcaFunc,
            ModeArg::Mc => FitmapMode::Mc,
            ModeArg::Rmc => FitmapMode::Rmc,
            ModeArg::Cloud => FitmapMode::Cloud,
        }
    }
}

impl From<SchemeArg> for CvScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::LeaveIidOut => CvScheme::LeaveIidOut,
            SchemeArg::LeaveFidOut => CvScheme::LeaveFidOut,
            SchemeArg::LeaveGroupOut => CvScheme::LeaveGroupOut,
        }
    }
}

impl From<KindArg> for SelectorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Knn => SelectorKind::Knn,
            KindArg::NearestCentroid => SelectorKind::NearestCentroid,
        }
    }
}

/// Search space and, for built-in sources, the problem.
pub fn parse_source(source: &str) -> Result<(Arc<SearchSpace>, Option<Problem>)> {
    match source.strip_prefix("builtin:") {
        Some(rest) => {
            let problem = parse_builtin(rest)?;
            Ok((problem.space.clone(), Some(problem)))
        }
        None => Ok((Arc::new(space_json::read(Path::new(source))?), None)),
    }
}

fn parse_builtin(spec: &str) -> Result<Problem> {
    let bad = || Error::Usage(format!("expected builtin:<function>:d<D>[:i<iid>], got builtin:{spec}"));
    let mut parts = spec.split(':');
    let function = BuiltinFunction::from_name(parts.next().ok_or_else(bad)?)?;
    let dim: usize = parts
        .next()
        .and_then(|p| p.strip_prefix('d'))
        .and_then(|p| p.parse().ok())
        .ok_or_else(bad)?;
    let iid: u64 = match parts.next() {
        Some(p) => p.strip_prefix('i').and_then(|p| p.parse().ok()).ok_or_else(bad)?,
        None => 0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(builtin_problem(function, iid, dim)?)
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn encoding_of(flags: &EncodingFlags, cfg: &RunConfig) -> (Encoding, f64) {
    (
        flags.encoding.map(Encoding::from).unwrap_or(cfg.preprocess.encoding),
        flags.smoothing.unwrap_or(cfg.preprocess.smoothing),
    )
}

fn processed(path: &Path, flags: &EncodingFlags, cfg: &RunConfig) -> Result<(ProcessedDesign, Option<ProblemRef>)> {
    let (design, problem) = design_csv::read(path, None)?;
    if !design.is_evaluated() {
        return Err(Error::format(path, "design has no objective values; run `evaluate` first"));
    }
    let (encoding, smoothing) = encoding_of(flags, cfg);
    let pd = preprocess_pipeline(&design, encoding, smoothing).map_err(|e| Error::format(path, e))?;
    Ok((pd, problem))
}

/// Runs one command and returns the paths it wrote.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cfg = load_config(cli.config.as_deref())?;
    match &cli.command {
        Command::Sample(a) => sample(a, &cfg),
        Command::Evaluate(a) => evaluate(a),
        Command::Preprocess(a) => preprocess(a, &cfg),
        Command::Features(a) => features(a, &cfg),
        Command::Fitmap(a) => fitmap(a, &cfg),
        Command::Aas(a) => aas(a, &cfg),
    }
}

fn sample(a: &SampleArgs, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (space, problem) = parse_source(&a.space)?;
    let n = a.n.or(cfg.sample.n).unwrap_or_else(|| default_sample_size(space.dim()));
    let strategy = a.strategy.map(SamplingStrategy::from).unwrap_or(cfg.sample.strategy);
    let seed = a.seed.unwrap_or(cfg.seed);
    info!("sampling {n} points ({}) over {} variables, seed {seed}", strategy.name(), space.dim());
    let design: Design = create_initial_design_with(space.clone(), n, strategy, seed, joe_kuo::for_dim(space.dim()))?;
    design_csv::write(&a.out, &design, problem.as_ref().and_then(ProblemRef::of).as_ref())?;
    Ok(vec![a.out.clone(), design_csv::meta_path(&a.out)])
}

fn evaluate(a: &EvaluateArgs) -> Result<Vec<PathBuf>> {
    let (design, recorded) = design_csv::read(&a.design, None)?;
    let problem = match (&a.problem, &recorded) {
        (Some(src), _) => parse_source(src)?
            .1
            .ok_or_else(|| Error::Usage(format!("{src} is not a built-in problem")))?,
        (None, Some(r)) => r.build()?,
        (None, None) => {
            return Err(Error::Usage(format!(
                "{} has no recorded problem; pass --problem builtin:<function>:d<D>[:i<iid>]",
                a.design.display()
            )))
        }
    };
    if problem.space.as_ref() != design.space() {
        return Err(Error::Usage(format!(
            "the search space of {} does not match problem {}",
            a.design.display(),
            problem.fid
        )));
    }
    info!("evaluating {} points on {}/{}", design.n(), problem.fid, problem.iid);
    let evaluated = evaluate_design(&problem, &design)?;
    design_csv::write(&a.out, &evaluated, ProblemRef::of(&problem).as_ref())?;
    Ok(vec![a.out.clone(), design_csv::meta_path(&a.out)])
}

fn preprocess(a: &PreprocessArgs, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (pd, _) = processed(&a.design, &a.encoding, cfg)?;
    processed_csv::write(&a.out, &pd)?;
    Ok(vec![a.out.clone(), design_csv::sidecar_path(&a.out, ".provenance.json")])
}

fn features(a: &FeaturesArgs, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    if a.designs.len() > 1 && (a.fid.is_some() || a.iid.is_some()) {
        return Err(Error::Usage("--fid/--iid need a single design".into()));
    }
    let as_json = a.out.extension().is_some_and(|e| e == "json");
    if as_json && a.designs.len() > 1 {
        return Err(Error::Usage("JSON output holds one design; use a .csv path for several".into()));
    }
    let seed = a.seed.unwrap_or(cfg.seed);
    let (encoding, _) = encoding_of(&a.encoding, cfg);
    let mut rows = Vec::with_capacity(a.designs.len());
    for path in &a.designs {
        let (pd, problem) = processed(path, &a.encoding, cfg)?;
        let fv = compute_all(&pd, &cfg.features.ela, seed).map_err(|e| Error::format(path, e))?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let labels = Labels {
            fid: a.fid.clone().or(problem.as_ref().map(|p| p.function.clone())).unwrap_or(stem),
            iid: a
                .iid
                .clone()
                .or(problem.as_ref().map(|p| p.iid.to_string()))
                .unwrap_or_else(|| "0".into()),
            encoding: encoding.name().to_string(),
        };
        info!("{}: {} of {} features defined", path.display(), fv.defined(), fv.len());
        rows.push((labels, fv));
    }
    if as_json {
        features_io::write_json(&a.out, &rows[0].1, &rows[0].0)?;
    } else {
        crate::write_file(&a.out, features_io::to_csv(&rows)?.as_bytes())?;
    }
    Ok(vec![a.out.clone()])
}

fn fitmap(a: &FitmapArgs, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let (pd, _) = processed(&a.design, &a.encoding, cfg)?;
    let mode = a.mode.map(FitmapMode::from).unwrap_or(cfg.fitmap.mode);
    let resolution = a.resolution.unwrap_or(cfg.fitmap.resolution);
    let k = a.k.unwrap_or(cfg.fitmap.k);
    let stem = match a.out.extension() {
        Some(e) if e == "pgm" || e == "csv" => a.out.with_extension(""),
        _ => a.out.clone(),
    };
    let named = |suffix: &str| {
        let base = stem.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        stem.with_file_name(format!("{base}_{suffix}"))
    };
    let mut written = Vec::new();
    let fail = |e: landscape_core::Error| Error::format(&a.design, e);
    match mode {
        FitmapMode::Raw2d => {
            let cols = match a.columns.as_deref() {
                Some([i, j]) => (*i, *j),
                _ => (0, 1),
            };
            let map = rasterize_2d(&pd, cols, resolution).map_err(fail)?;
            let path = named(&format!("c{}_{}.pgm", cols.0, cols.1));
            fitmap_io::write_pgm(&path, &map)?;
            written.push(path);
        }
        FitmapMode::Pca | FitmapMode::PcaFunc => {
            let with_y = mode == FitmapMode::PcaFunc;
            let map = pca_map(&pd, with_y, resolution).map_err(fail)?;
            let path = named(if with_y { "pca_func.pgm" } else { "pca.pgm" });
            fitmap_io::write_pgm(&path, &map)?;
            written.push(path);
        }
        FitmapMode::Mc => {
            let stack = multichannel(&pd, resolution).map_err(fail)?;
            for (map, (i, j)) in stack.channels.iter().zip(&stack.pairs) {
                let path = named(&format!("c{i}_{j}.pgm"));
                fitmap_io::write_pgm(&path, map)?;
                written.push(path);
            }
        }
        FitmapMode::Rmc => {
            let map = reduce_mean(&multichannel(&pd, resolution).map_err(fail)?).map_err(fail)?;
            let path = named("rmc.pgm");
            fitmap_io::write_pgm(&path, &map)?;
            written.push(path);
        }
        FitmapMode::Cloud => {
            let cloud = knn_cloud(&pd, k).map_err(fail)?;
            let path = named("cloud.csv");
            crate::write_file(&path, fitmap_io::cloud_to_csv(&cloud, pd.dim()).as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    gap_closure_formula: &'static str,
    #[serde(flatten)]
    report: &'a CvReport,
}

fn aas(a: &AasArgs, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let fm = features_io::read_csv(&a.features)?;
    let records = performance::read(&a.performance)?;
    let table = ErtTable::from_records(&records).map_err(|e| Error::format(&a.performance, e))?;
    let params = SelectorParams {
        kind: a.kind.map(SelectorKind::from).unwrap_or(cfg.aas.kind),
        k: a.k.unwrap_or(cfg.aas.k),
        cost_sensitive: a.cost_sensitive.unwrap_or(cfg.aas.cost_sensitive),
    };
    let options = CvOptions {
        penalty: a.penalty.unwrap_or(cfg.aas.penalty),
        feature_cost: a.feature_cost.unwrap_or(cfg.aas.feature_cost),
    };
    let scheme = a.scheme.map(CvScheme::from).unwrap_or(cfg.aas.scheme);
    let report = cross_validate(&fm, &table, scheme, params, options)?;
    info!(
        "{}: SBS {} mean {:.3}, VBS mean {:.3}, model mean {:.3}",
        scheme.name(),
        report.sbs,
        report.pooled.sbs_mean,
        report.pooled.vbs_mean,
        report.pooled.model_mean
    );
    let doc = ReportDoc {
        gap_closure_formula: "(sbs_mean - model_mean) / (sbs_mean - vbs_mean)",
        report: &report,
    };
    let text = serde_json::to_string_pretty(&doc).expect("report serializes");
    crate::write_file(&a.out, format!("{text}\n").as_bytes())?;
    Ok(vec![a.out.clone()])
}
