//! Command-line front end: `synth`, `featurize`, `train`, `predict`,
//! `evaluate`, `cv`, `gridsearch` and `compare`.
//!
//! Summaries go to standard output; artifacts are written only to `--out`
//! paths. Exit codes: 0 success, 1 usage, 2 data or format, 3 numeric.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifier::{BaseConfig, BaseKind};
use crate::crossval::{crossval_strategies, CvReport};
use crate::dataset::Dataset;
use crate::error::Error;
use crate::grid::{grid_search, train_final, Grid};
use crate::hier::{train_hier, HierModel};
use crate::kmer::{featurize_batch, KmerConfig, Normalization};
use crate::label::{parse_label, HierLabel};
use crate::logreg::LogRegConfig;
use crate::metrics::hier_metrics;
use crate::seqio::{parse_fasta, read_feature_csv, write_fasta, write_feature_csv};
use crate::strategy::Strategy;
use crate::svm::SvmConfig;
use crate::synth::{self, generate, SynthSpec};
use crate::taxonomy::Taxonomy;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_COST: f64 = 8.0;
pub const DEFAULT_GAMMA: f64 = 16.0;

#[derive(Parser, Debug)]
#[command(name = "tehier", version, about = "Hierarchical classification of transposable elements")]
pub struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a labeled synthetic FASTA.
    Synth(SynthArgs),
    /// Convert FASTA to a k-mer feature CSV.
    Featurize(FeaturizeArgs),
    /// Train a hierarchical model on a labeled feature CSV.
    Train(TrainArgs),
    /// Predict labels for a FASTA or feature CSV.
    Predict(PredictArgs),
    /// Score predictions against true labels.
    Evaluate(EvaluateArgs),
    /// Stratified k-fold cross-validation.
    Cv(CvArgs),
    /// Grid search over SVM cost and gamma.
    Gridsearch(GridArgs),
    /// Cross-validate every base classifier and strategy pair.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum NormArg {
    Raw,
    Freq,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BaseArg {
    Svm,
    Logreg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Nllcpn,
    Lcpnb,
}

impl From<BaseArg> for BaseKind {
    fn from(b: BaseArg) -> Self {
        match b {
            BaseArg::Svm => BaseKind::Svm,
            BaseArg::Logreg => BaseKind::LogReg,
        }
    }
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Nllcpn => Strategy::Nllcpn,
            StrategyArg::Lcpnb => Strategy::Lcpnb,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct FeatureOpts {
    /// Comma-separated k values.
    #[arg(long, default_value = "2,3,4")]
    pub kmers: String,
    #[arg(long, value_enum, default_value = "freq")]
    pub norm: NormArg,
}

#[derive(Args, Debug, Clone)]
pub struct BaseOpts {
    #[arg(long, value_enum, default_value = "svm")]
    pub base: BaseArg,
    /// SVM cost (default 8).
    #[arg(long = "C")]
    pub cost: Option<f64>,
    /// RBF kernel width (default 16).
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// pgsb, repbase, wicker, or a taxonomy TSV path.
    #[arg(long, default_value = "pgsb")]
    pub taxonomy: String,
    #[arg(long, default_value_t = 100)]
    pub per_node: usize,
    /// Length or inclusive range `MIN-MAX`.
    #[arg(long, default_value = "500")]
    pub length: String,
    #[arg(long, default_value_t = 0.9)]
    pub separability: f64,
    #[arg(long, default_value_t = 0.15)]
    pub internal: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub features: FeatureOpts,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Labeled feature CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub features: FeatureOpts,
    #[command(flatten)]
    pub base: BaseOpts,
    /// `wicker` or a taxonomy TSV; defaults to the closure of the labels.
    #[arg(long)]
    pub taxonomy: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// FASTA or feature CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "lcpnb")]
    pub strategy: StrategyArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Prediction CSV with `id,predicted_label` columns.
    #[arg(long)]
    pub pred: PathBuf,
    /// `id,label` CSV, labeled feature CSV, or labeled FASTA.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CvArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub features: FeatureOpts,
    #[command(flatten)]
    pub base: BaseOpts,
    #[arg(long, value_enum, default_value = "lcpnb")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub features: FeatureOpts,
    /// Preset (`desk`, `standard`) or JSON file `{"c": [..], "gamma": [..]}`.
    #[arg(long, default_value = "desk")]
    pub grid: String,
    #[arg(long, value_enum, default_value = "lcpnb")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid report CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also train on all data with the selected cell and save the model.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub features: FeatureOpts,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "svm,logreg")]
    pub bases: Vec<BaseArg>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "nllcpn,lcpnb")]
    pub strategies: Vec<StrategyArg>,
    #[arg(long = "C")]
    pub cost: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(Error::Io(e))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Run(Error::Csv(e))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut summary = Vec::new();
    let outcome = pool.install(|| dispatch(cli.command, &mut summary));
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(&summary).and_then(|_| stdout.flush());
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Synth(a) => cmd_synth(a, out),
        Command::Featurize(a) => cmd_featurize(a, out),
        Command::Train(a) => cmd_train(a, out),
        Command::Predict(a) => cmd_predict(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Cv(a) => cmd_cv(a, out),
        Command::Gridsearch(a) => cmd_gridsearch(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    }
}

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Usage(msg.into()))
}

fn seed_of(seed: Option<u64>, out: &mut dyn Write) -> CliResult<u64> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    writeln!(out, "seed: {seed}")?;
    Ok(seed)
}

fn open(path: &Path) -> CliResult<File> {
    File::open(path).map_err(|e| Failure::Run(Error::format(format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Run(Error::format(format!("{}: {e}", path.display()))))
}

fn read_text(path: &Path) -> CliResult<String> {
    let mut s = String::new();
    open(path)?.read_to_string(&mut s)?;
    Ok(s)
}

fn kmer_config(opts: &FeatureOpts) -> CliResult<KmerConfig> {
    let ks = opts
        .kmers
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .or_else(|_| usage(format!("--kmers expects comma-separated integers, got {:?}", opts.kmers)))?;
    let norm = match opts.norm {
        NormArg::Raw => Normalization::RawCounts,
        NormArg::Freq => Normalization::RelativeFrequency,
    };
    KmerConfig::new(ks, norm).or_else(|e| usage(e.to_string()))
}

fn base_config(kind: BaseKind, cost: Option<f64>, gamma: Option<f64>, seed: u64) -> CliResult<BaseConfig> {
    let cfg = match kind {
        BaseKind::Svm => BaseConfig::Svm(SvmConfig {
            cost: cost.unwrap_or(DEFAULT_COST),
            gamma: gamma.unwrap_or(DEFAULT_GAMMA),
            seed,
            ..SvmConfig::default()
        }),
        BaseKind::LogReg => {
            if cost.is_some() || gamma.is_some() {
                return usage("--C and --gamma apply only to --base svm");
            }
            BaseConfig::LogReg(LogRegConfig {
                seed,
                ..LogRegConfig::default()
            })
        }
    };
    cfg.validate().or_else(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn load_dataset(path: &Path, opts: &FeatureOpts) -> CliResult<Dataset> {
    let config = kmer_config(opts)?;
    Ok(Dataset::from_feature_csv(open(path)?, &config)?)
}

fn load_taxonomy(spec: &str) -> CliResult<Taxonomy> {
    Ok(match spec {
        "pgsb" => synth::pgsb_taxonomy(),
        "repbase" => synth::repbase_taxonomy(),
        "wicker" => Taxonomy::wicker(),
        path => Taxonomy::read(open(Path::new(path))?)?,
    })
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), fmt6)
}

fn cmd_synth(a: SynthArgs, out: &mut dyn Write) -> CliResult<()> {
    let seed = seed_of(a.seed, out)?;
    let length = match a.length.split_once('-') {
        Some((lo, hi)) => (lo.trim().parse(), hi.trim().parse()),
        None => (a.length.trim().parse(), a.length.trim().parse()),
    };
    let length = match length {
        (Ok(lo), Ok(hi)) => (lo, hi),
        _ => return usage(format!("--length expects N or MIN-MAX, got {:?}", a.length)),
    };
    let spec = SynthSpec {
        taxonomy: load_taxonomy(&a.taxonomy)?,
        per_node: a.per_node,
        length,
        separability: a.separability,
        internal_fraction: a.internal,
        seed,
    };
    spec.validate().or_else(|e| usage(e.to_string()))?;
    let seqs = generate(&spec)?;
    let mut sink = create(&a.out)?;
    write_fasta(&mut sink, &seqs, 80)?;
    sink.flush()?;
    writeln!(
        out,
        "wrote {} sequences over {} classes to {}",
        seqs.len(),
        spec.taxonomy.len(),
        a.out.display()
    )?;
    Ok(())
}

fn cmd_featurize(a: FeaturizeArgs, out: &mut dyn Write) -> CliResult<()> {
    let config = kmer_config(&a.features)?;
    let seqs = parse_fasta(open(&a.input)?)?;
    let residues: Vec<&str> = seqs.iter().map(|s| s.residues.as_str()).collect();
    let rows: Vec<_> = featurize_batch(&residues, &config)
        .into_iter()
        .zip(seqs.iter().map(|s| s.label.clone()))
        .collect();
    let mut sink = create(&a.out)?;
    write_feature_csv(&mut sink, &config, &rows)?;
    sink.flush()?;
    writeln!(
        out,
        "featurized {} sequences ({}) to {}",
        rows.len(),
        config.fingerprint(),
        a.out.display()
    )?;
    Ok(())
}

fn cmd_train(a: TrainArgs, out: &mut dyn Write) -> CliResult<()> {
    let seed = seed_of(a.seed, out)?;
    let base = base_config(a.base.base.into(), a.base.cost, a.base.gamma, seed)?;
    let data = load_dataset(&a.input, &a.features)?;
    let taxonomy = match &a.taxonomy {
        Some(t) => load_taxonomy(t)?,
        None => data.taxonomy()?,
    };
    let model = train_hier(&data.points, &data.labels, &taxonomy, &data.kmer_config, &base)?;
    let mut sink = create(&a.out)?;
    model.save(&mut sink)?;
    sink.flush()?;
    writeln!(
        out,
        "trained {} local classifiers on {} samples; model written to {}",
        taxonomy.parent_nodes().len() - model.untrained_nodes().len(),
        data.len(),
        a.out.display()
    )?;
    Ok(())
}

/// Number of feature columns in a CSV header, excluding a trailing label.
fn feature_columns(text: &str) -> CliResult<usize> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers()?;
    let n = header.len();
    Ok(if header.get(n.saturating_sub(1)).map(str::trim) == Some("label") {
        n - 1
    } else {
        n
    })
}

fn cmd_predict(a: PredictArgs, out: &mut dyn Write) -> CliResult<()> {
    let model = HierModel::load(open(&a.model)?)?;
    let text = read_text(&a.input)?;
    let strategy: Strategy = a.strategy.into();
    let (ids, predicted) = if text.trim_start().starts_with('>') {
        let seqs = parse_fasta(text.as_bytes())?;
        let predicted = model.predict_sequences(strategy, &seqs)?;
        (seqs.into_iter().map(|s| s.id).collect::<Vec<_>>(), predicted)
    } else {
        let config = model.kmer_config();
        let width = feature_columns(&text)?;
        if width != config.dimension() {
            return Err(Error::Fingerprint {
                model: config.fingerprint(),
                given: format!("{width} features"),
            }
            .into());
        }
        let rows = read_feature_csv(text.as_bytes(), config)?;
        let xs: Vec<_> = rows.into_iter().map(|(x, _)| x).collect();
        let predicted = model.predict_features(strategy, config, &xs)?;
        ((1..=xs.len()).map(|i| i.to_string()).collect(), predicted)
    };
    let mut w = csv::Writer::from_writer(create(&a.out)?);
    w.write_record(["id", "predicted_label"])?;
    for (id, label) in ids.iter().zip(&predicted) {
        w.write_record([id.as_str(), &label.to_string()])?;
    }
    w.flush()?;
    writeln!(out, "predicted {} records with {strategy}; written to {}", predicted.len(), a.out.display())?;
    Ok(())
}

fn parse_cell_label(text: &str, row: usize) -> CliResult<HierLabel> {
    parse_label(text.trim()).map_err(|e| Failure::Run(Error::format(format!("row {row}: {e}"))))
}

/// Read `(id, label)` pairs from an id/label CSV (label column named
/// `label` or `predicted_label`), a labeled feature CSV (ids are row
/// numbers), or a labeled FASTA.
fn read_id_labels(path: &Path) -> CliResult<Vec<(String, HierLabel)>> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('>') {
        return parse_fasta(text.as_bytes())?
            .into_iter()
            .map(|s| match s.label {
                Some(l) => Ok((s.id, l)),
                None => Err(Failure::Run(Error::format(format!("sequence {} has no label", s.id)))),
            })
            .collect();
    }
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let find = |name: &str| header.iter().position(|h| h.trim() == name);
    let label_col = find("label")
        .or_else(|| find("predicted_label"))
        .ok_or_else(|| Failure::Run(Error::format(format!("{}: no label column", path.display()))))?;
    let id_col = find("id");
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = i + 2;
        let id = match id_col {
            Some(c) => rec.get(c).unwrap_or("").trim().to_string(),
            None => (i + 1).to_string(),
        };
        out.push((id, parse_cell_label(rec.get(label_col).unwrap_or(""), row)?));
    }
    Ok(out)
}

fn cmd_evaluate(a: EvaluateArgs, out: &mut dyn Write) -> CliResult<()> {
    let pred = read_id_labels(&a.pred)?;
    let truth = read_id_labels(&a.truth)?;
    let truth_by_id: std::collections::HashMap<&str, &HierLabel> = truth.iter().map(|(i, l)| (i.as_str(), l)).collect();
    if truth_by_id.len() != truth.len() {
        return Err(Error::format("truth file has duplicate ids").into());
    }
    let mut pairs = Vec::with_capacity(pred.len());
    for (id, p) in &pred {
        let t = truth_by_id
            .get(id.as_str())
            .ok_or_else(|| Failure::Run(Error::format(format!("prediction id {id} has no true label"))))?;
        pairs.push((p.clone(), (*t).clone()));
    }
    let taxonomy = Taxonomy::build_from_labels(pairs.iter().flat_map(|(p, t)| [p, t]))?;
    let m = hier_metrics(&pairs, &taxonomy)?;
    writeln!(out, "samples: {}", m.samples)?;
    writeln!(out, "hP: {}\nhR: {}\nhF: {}", fmt6(m.hp), fmt6(m.hr), fmt6(m.hf))?;
    for (l, f) in m.per_level.iter().enumerate() {
        writeln!(out, "hF_L{}: {}", l + 1, fmt_opt(*f))?;
    }
    if let Some(path) = &a.out {
        let mut w = csv::Writer::from_writer(create(path)?);
        let mut header = vec!["hP".to_string(), "hR".into(), "hF".into()];
        header.extend((1..=m.per_level.len()).map(|l| format!("hF_L{l}")));
        w.write_record(&header)?;
        let mut row = vec![fmt6(m.hp), fmt6(m.hr), fmt6(m.hf)];
        row.extend(m.per_level.iter().map(|f| fmt_opt(*f)));
        w.write_record(&row)?;
        w.flush()?;
    }
    Ok(())
}

fn write_cv_report<W: Write>(sink: W, reports: &[CvReport], levels: usize) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink);
    let mut header: Vec<String> = ["fold", "strategy", "base", "hP", "hR", "hF"].map(String::from).to_vec();
    header.extend((1..=levels).map(|l| format!("hF_L{l}")));
    w.write_record(&header)?;
    for r in reports {
        for (i, m) in r.folds.iter().enumerate() {
            let mut row = vec![(i + 1).to_string(), r.strategy.to_string(), r.base.to_string(), fmt6(m.hp), fmt6(m.hr), fmt6(m.hf)];
            row.extend((0..levels).map(|l| fmt_opt(m.per_level.get(l).copied().flatten())));
            w.write_record(&row)?;
        }
        let mean_levels = r.mean_level_f();
        let mut row = vec![
            "mean".to_string(),
            r.strategy.to_string(),
            r.base.to_string(),
            fmt6(r.mean_hp()),
            fmt6(r.mean_hr()),
            fmt6(r.mean_hf()),
        ];
        row.extend((0..levels).map(|l| fmt_opt(mean_levels.get(l).copied().flatten())));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn check_folds(folds: usize, n: usize) -> CliResult<()> {
    if folds < 2 {
        return usage("--folds must be at least 2");
    }
    if folds > n {
        return Err(Error::contract(format!("cannot split {n} samples into {folds} folds")).into());
    }
    Ok(())
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn cmd_cv(a: CvArgs, out: &mut dyn Write) -> CliResult<()> {
    let seed = seed_of(a.seed, out)?;
    let base = base_config(a.base.base.into(), a.base.cost, a.base.gamma, seed)?;
    let data = load_dataset(&a.input, &a.features)?;
    check_folds(a.folds, data.len())?;
    let taxonomy = data.taxonomy()?;
    let reports = crossval_strategies(&data, &taxonomy, &[a.strategy.into()], &base, a.folds, seed)?;
    let r = &reports[0];
    print_warnings(&r.warnings);
    writeln!(
        out,
        "{} + {}, {} folds: hP {} hR {} hF {} (std {})",
        r.base,
        r.strategy,
        a.folds,
        fmt6(r.mean_hp()),
        fmt6(r.mean_hr()),
        fmt6(r.mean_hf()),
        fmt6(r.std_hf())
    )?;
    if let Some(path) = &a.out {
        write_cv_report(create(path)?, &reports, taxonomy.max_depth())?;
    }
    Ok(())
}

fn cmd_gridsearch(a: GridArgs, out: &mut dyn Write) -> CliResult<()> {
    let seed = seed_of(a.seed, out)?;
    let mut grid = if Path::new(&a.grid).is_file() {
        Grid::from_json(open(Path::new(&a.grid))?, seed)?
    } else {
        Grid::preset(&a.grid, seed).or_else(|e| usage(e.to_string()))?
    };
    grid.folds = a.folds;
    grid.strategy = a.strategy.into();
    let data = load_dataset(&a.input, &a.features)?;
    check_folds(a.folds, data.len())?;
    let taxonomy = data.taxonomy()?;
    let template = SvmConfig {
        seed,
        ..SvmConfig::default()
    };
    let result = grid_search(&data, &taxonomy, &grid, &template)?;
    for cell in &result.cells {
        writeln!(
            out,
            "C={} gamma={} mean_hF={} std_hF={}",
            cell.c,
            cell.gamma,
            fmt_opt(cell.mean_hf),
            fmt_opt(cell.std_hf)
        )?;
    }
    for cell in result.failed() {
        eprintln!("warning: cell C={} gamma={} failed: {:?}", cell.c, cell.gamma, cell.status);
    }
    match result.selected {
        Some((c, g)) => writeln!(out, "selected: C={c} gamma={g}")?,
        None => writeln!(out, "selected: none")?,
    }
    if let Some(path) = &a.out {
        let mut sink = create(path)?;
        result.write_csv(&mut sink)?;
        sink.flush()?;
    }
    if let Some(path) = &a.model_out {
        let model = train_final(&data, &taxonomy, &result, &template)?;
        let mut sink = create(path)?;
        model.save(&mut sink)?;
        sink.flush()?;
    } else if result.selected.is_none() {
        return Err(Error::contract("no viable cell").into());
    }
    Ok(())
}

fn cmd_compare(a: CompareArgs, out: &mut dyn Write) -> CliResult<()> {
    let seed = seed_of(a.seed, out)?;
    if a.bases.is_empty() || a.strategies.is_empty() {
        return usage("--bases and --strategies must not be empty");
    }
    let data = load_dataset(&a.input, &a.features)?;
    check_folds(a.folds, data.len())?;
    let taxonomy = data.taxonomy()?;
    let strategies: Vec<Strategy> = a.strategies.iter().map(|&s| s.into()).collect();

    let mut rows = Vec::new();
    for &b in &a.bases {
        let kind: BaseKind = b.into();
        let (cost, gamma) = match kind {
            BaseKind::Svm => (a.cost, a.gamma),
            BaseKind::LogReg => (None, None),
        };
        let base = base_config(kind, cost, gamma, seed)?;
        match crossval_strategies(&data, &taxonomy, &strategies, &base, a.folds, seed) {
            Ok(reports) => {
                print_warnings(&reports[0].warnings);
                for r in reports {
                    rows.push((kind, r.strategy, Some((r.mean_hf(), r.std_hf()))));
                }
            }
            Err(e @ (Error::Numeric(_) | Error::DegenerateData(_))) => {
                eprintln!("warning: {kind} failed: {e}");
                rows.extend(strategies.iter().map(|&s| (kind, s, None)));
            }
            Err(e) => return Err(e.into()),
        }
    }

    for (base, strategy, v) in &rows {
        match v {
            Some((m, s)) => writeln!(out, "{base} + {strategy}: hF {} (std {})", fmt6(*m), fmt6(*s))?,
            None => writeln!(out, "{base} + {strategy}: failed")?,
        }
    }
    if let Some(path) = &a.out {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["base", "strategy", "hF_mean", "hF_std"])?;
        for (base, strategy, v) in &rows {
            let (m, s) = match v {
                Some((m, s)) => (fmt6(*m), fmt6(*s)),
                None => ("failed".to_string(), "failed".to_string()),
            };
            w.write_record([base.to_string(), strategy.to_string(), m, s])?;
        }
        w.flush()?;
    }
    Ok(())
}
