//! The `graphmix` command line. Exit codes: 0 success, 1 domain error,
//! 2 usage error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use crate::data::{
    dataset_stats, encode_node_features, parse_tudataset, read_mixed_sample, write_mixed_sample, FeatureEncoding,
    SourceRef, TuDatasetFiles,
};
use crate::error::{Error, Result};
use crate::graph::{check_linear_independence, feature_vocabulary, FeatureBasis, GraphDataset};
use crate::mixer::{mix_labels, mix_pair, sample_lambda_distinguishable, BetaParams, MixedSample};
use crate::plot::{emit_plot_data, PlotKind};
use crate::recovery::{intrusion_audit, recover_pair, recovery_mode_for, RecoveryMode, RECOVERY_TOL};
use crate::rng::stream;
use crate::trainer::{
    cross_validate_with, export_embeddings, fold_split, run_sweep, save_checkpoint, stratified_folds,
    train_single_with, write_curve_csv, write_sweep_csv, DataSource, SweepAxis, TrainConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "graphmix",
    version,
    about = "Invertible graph mixup: datasets, mixing, recovery, training"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct DatasetArgs {
    /// Directory holding the TUDataset files.
    dir: PathBuf,
    /// Dataset name, the NAME in NAME_A.txt.
    name: String,
    /// Node feature encoding: labels or degree. Defaults to labels when
    /// node labels exist.
    #[arg(long)]
    encoding: Option<FeatureEncoding>,
}

impl DatasetArgs {
    fn load(&self) -> Result<(GraphDataset, FeatureEncoding)> {
        let parsed = parse_tudataset(&TuDatasetFiles::new(&self.dir, &self.name))?;
        let enc = self.encoding.unwrap_or_else(|| FeatureEncoding::auto(&parsed));
        Ok((encode_node_features(&parsed, enc)?, enc))
    }
}

#[derive(Args, Debug, Clone)]
struct ConfigOverrides {
    /// Output directory.
    #[arg(long, default_value = "graphmix-out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config epoch count.
    #[arg(long)]
    epochs: Option<usize>,
    /// Overrides the number of folds.
    #[arg(long)]
    folds: Option<usize>,
    /// Overrides the number of runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Overrides the augmentation kind.
    #[arg(long)]
    augment: Option<crate::augment::AugmentKind>,
    /// Overrides the dataset directory (requires --name).
    #[arg(long, requires = "name")]
    data: Option<PathBuf>,
    /// Overrides the dataset name (requires --data).
    #[arg(long, requires = "data")]
    name: Option<String>,
    /// Suppresses per-epoch log lines.
    #[arg(long)]
    quiet: bool,
}

impl ConfigOverrides {
    fn apply(&self, path: &Path) -> Result<TrainConfig> {
        let mut cfg = TrainConfig::load(path)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(e) = self.epochs {
            cfg.epochs = e;
        }
        if let Some(f) = self.folds {
            cfg.folds = f;
        }
        if let Some(r) = self.runs {
            cfg.runs = r;
        }
        if let Some(k) = self.augment {
            cfg.augment.kind = k;
        }
        if let (Some(dir), Some(name)) = (&self.data, &self.name) {
            cfg.data = Some(DataSource {
                dir: dir.clone(),
                name: name.clone(),
                encoding: cfg.data.as_ref().and_then(|d| d.encoding),
            });
        }
        cfg.validate()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dataset statistics, compared with published figures for known benchmarks.
    Stats {
        #[command(flatten)]
        dataset: DatasetArgs,
        /// Also write the statistics as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Mixes one pair of graphs and writes it with a sidecar holding the ratio and label.
    Mix {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// First Beta parameter of the mixing ratio.
        #[arg(long, default_value_t = 20.0)]
        alpha: f64,
        /// Second Beta parameter of the mixing ratio.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Indices of the two source graphs (0-based); random when omitted.
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        pair: Option<Vec<usize>>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// File prefix of the mixed graph.
        #[arg(long, default_value = "MIXED")]
        prefix: String,
    },
    /// Recovers the source pair of a mixed graph written by `mix`.
    Recover {
        /// The NAME_mix.json sidecar, or a directory holding exactly one.
        mixed: PathBuf,
        #[arg(long, default_value_t = RECOVERY_TOL)]
        tol: f64,
    },
    /// Mixes random pairs and checks for label conflicts and recovery failures.
    Audit {
        #[command(flatten)]
        dataset: DatasetArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Checks whether the feature vocabulary (or the coefficient set) is linearly independent.
    CheckIndependence {
        #[command(flatten)]
        dataset: DatasetArgs,
    },
    /// Trains one model on a stratified split and saves metrics, checkpoint and embeddings.
    Train {
        /// JSON training configuration.
        config: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Repeated stratified k-fold cross-validation.
    Cv {
        /// JSON training configuration.
        config: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Cross-validates every cell of a Beta or depth sweep.
    Sweep {
        /// JSON training configuration used as the base of every cell.
        config: PathBuf,
        /// beta or layers.
        #[arg(long)]
        axis: SweepAxis,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Writes CSV and SVG for a metrics CSV, a sweep CSV, or `beta` densities.
    Plot {
        /// A metrics CSV (epoch,train_loss,val_acc), a sweep CSV, or the word `beta`.
        input: String,
        /// Output path; .csv and .svg are written next to each other.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Runs the command line with `argv[0]` being the program name.
pub fn run_command(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_command_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run_command`] writing to the given streams.
pub fn run_command_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Data(format!("writing output: {e}"))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Stats { dataset, json } => {
            let (ds, _) = dataset.load()?;
            let report = dataset_stats(&ds);
            write!(out, "{}", report.to_text()).map_err(io_err)?;
            if let Some(p) = json {
                std::fs::write(&p, serde_json::to_string_pretty(&report)?)
                    .map_err(|e| Error::Io { path: p, source: e })?;
            }
            Ok(())
        }
        Command::Mix {
            dataset,
            seed,
            alpha,
            beta,
            pair,
            out: dir,
            prefix,
        } => {
            let params = BetaParams::new(alpha, beta)?;
            let (ds, enc) = dataset.load()?;
            let mut rng = stream(seed, &[]);
            let (i, j) = match pair {
                Some(p) => (p[0], p[1]),
                None => (rng.random_range(0..ds.len()), rng.random_range(0..ds.len())),
            };
            for k in [i, j] {
                if k >= ds.len() {
                    return Err(Error::Config(format!(
                        "graph index {k} outside 0..{} of {}",
                        ds.len(),
                        dataset.name
                    )));
                }
            }
            let lambda = sample_lambda_distinguishable(params, RECOVERY_TOL, &mut rng);
            let (a, b) = (&ds.items[i], &ds.items[j]);
            let sample = MixedSample {
                graph: mix_pair(&a.graph, &b.graph, lambda)?,
                label: mix_labels(&a.label, &b.label, lambda)?,
                lambda,
                source_ids: (i, j),
            };
            let basis = feature_vocabulary(&ds)?;
            let source_dir = std::fs::canonicalize(&dataset.dir).unwrap_or(dataset.dir.clone());
            write_mixed_sample(
                &dir,
                &prefix,
                &sample,
                basis.vocabulary,
                Some(SourceRef {
                    dir: source_dir,
                    name: dataset.name.clone(),
                    encoding: enc,
                }),
            )?;
            writeln!(
                out,
                "mixed graphs {i} and {j} of {} with lambda {lambda}: {} nodes, label {:?}",
                dataset.name,
                sample.graph.num_nodes(),
                sample.label.probs()
            )
            .map_err(io_err)?;
            writeln!(out, "wrote {}", crate::data::sidecar_path(&dir, &prefix).display()).map_err(io_err)?;
            Ok(())
        }
        Command::Recover { mixed, tol } => recover_command(&mixed, tol, out),
        Command::Audit {
            dataset,
            trials,
            seed,
            alpha,
            beta,
            json,
        } => {
            let params = BetaParams::new(alpha, beta)?;
            let (ds, _) = dataset.load()?;
            let report = intrusion_audit(&ds, trials, params, &mut stream(seed, &[]))?;
            writeln!(out, "dataset:            {}", report.dataset).map_err(io_err)?;
            writeln!(out, "recovery mode:      {}", mode_name(report.mode)).map_err(io_err)?;
            writeln!(out, "trials:             {}", report.trials).map_err(io_err)?;
            writeln!(out, "identical pairs:    {}", report.identical_pairs).map_err(io_err)?;
            writeln!(out, "label collisions:   {}", report.collisions).map_err(io_err)?;
            writeln!(out, "recovery failures:  {}", report.recovery_failures).map_err(io_err)?;
            if let Some(f) = &report.first_failure {
                writeln!(out, "first failure:      {f}").map_err(io_err)?;
            }
            writeln!(
                out,
                "result:             {}",
                if report.passed() { "PASS" } else { "FAIL" }
            )
            .map_err(io_err)?;
            if let Some(p) = json {
                std::fs::write(&p, serde_json::to_string_pretty(&report)?)
                    .map_err(|e| Error::Io { path: p, source: e })?;
            }
            if report.passed() {
                Ok(())
            } else if report.assumption_violated {
                Err(Error::Data(format!(
                    "{}: neither the feature vocabulary nor the coefficient set is linearly independent",
                    dataset.name
                )))
            } else {
                Err(Error::Data(format!("{}: audit failed", dataset.name)))
            }
        }
        Command::CheckIndependence { dataset } => {
            let (ds, _) = dataset.load()?;
            let basis = feature_vocabulary(&ds)?;
            let v = check_linear_independence(&basis.vocabulary);
            writeln!(
                out,
                "vocabulary: {} distinct nonzero vectors, rank {}, {}",
                basis.vocabulary.len(),
                v.rank,
                if v.independent { "independent" } else { "dependent" }
            )
            .map_err(io_err)?;
            if !v.independent {
                let t = basis.coefficients_independent();
                writeln!(
                    out,
                    "coefficient set: {} distinct matrices, rank {}, {}",
                    basis.coefficient_set().len(),
                    t.rank,
                    if t.independent { "independent" } else { "dependent" }
                )
                .map_err(io_err)?;
            }
            writeln!(out, "recovery mode: {}", mode_name(recovery_mode_for(&basis))).map_err(io_err)?;
            Ok(())
        }
        Command::Train { config, overrides } => {
            let cfg = overrides.apply(&config)?;
            let ds = load_config_data(&cfg, &config)?;
            create_dir(&overrides.out)?;
            let folds = stratified_folds(&ds.class_indices(), cfg.folds, &mut stream(cfg.seed, &[0]))?;
            let (tr, va) = fold_split(&folds, 0);
            let quiet = overrides.quiet;
            let result = train_single_with(
                &ds.subset(&tr),
                &ds.subset(&va),
                &cfg,
                &mut stream(cfg.seed, &[0, 0]),
                &mut |r| {
                    if !quiet {
                        let _ = writeln!(
                            out,
                            "epoch {:>4}  train_loss {:.6}  val_acc {:.4}",
                            r.epoch, r.train_loss, r.val_acc
                        );
                    }
                },
            )?;
            let dir = &overrides.out;
            write_curve_csv(&result.epochs, &dir.join("metrics.csv"))?;
            save_checkpoint(&result.model, &result.params, &dir.join("model.json"))?;
            export_embeddings(&result.model, &result.params, &ds, &dir.join("embeddings.csv"))?;
            let last = result.epochs.last().expect("epochs validated positive");
            writeln!(
                out,
                "final train_loss {:.6}  val_acc {:.4}; wrote metrics.csv, model.json, embeddings.csv to {}",
                last.train_loss,
                last.val_acc,
                dir.display()
            )
            .map_err(io_err)?;
            Ok(())
        }
        Command::Cv { config, overrides } => {
            let cfg = overrides.apply(&config)?;
            let ds = load_config_data(&cfg, &config)?;
            create_dir(&overrides.out)?;
            let quiet = overrides.quiet;
            let epochs = cfg.epochs;
            let log = cross_validate_with(&ds, &cfg, &mut |run, fold, r| {
                if !quiet && r.epoch + 1 == epochs {
                    let _ = writeln!(out, "run {run} fold {fold}: final val_acc {:.4}", r.val_acc);
                }
            })?;
            log.write_csv(&overrides.out.join("metrics.csv"))?;
            log.write_summary(&overrides.out.join("summary.json"))?;
            writeln!(
                out,
                "{} {}: accuracy {:.4} ± {:.4} (best epoch), {:.4} ± {:.4} (final epoch) over {} runs",
                ds.name,
                cfg.augment.kind.name(),
                log.mean,
                log.std,
                log.final_mean,
                log.final_std,
                cfg.runs
            )
            .map_err(io_err)?;
            Ok(())
        }
        Command::Sweep {
            config,
            axis,
            overrides,
        } => {
            let cfg = overrides.apply(&config)?;
            let ds = load_config_data(&cfg, &config)?;
            create_dir(&overrides.out)?;
            let rows = run_sweep(&ds, &cfg, axis, &mut |row| {
                let _ = writeln!(
                    out,
                    "{} {} {}: {:.4} ± {:.4}",
                    row.dataset, row.method, row.setting, row.mean, row.std
                );
            })?;
            let csv = overrides.out.join("sweep.csv");
            write_sweep_csv(&rows, &csv)?;
            let files = emit_plot_data(PlotKind::SweepBars, Some(&csv), &csv)?;
            writeln!(out, "wrote {} and {}", files.csv.display(), files.svg.display()).map_err(io_err)?;
            Ok(())
        }
        Command::Plot { input, out: target } => {
            let (kind, path) = if input == "beta" {
                (PlotKind::BetaDensity, None)
            } else {
                let p = PathBuf::from(&input);
                let header = std::fs::read_to_string(&p)
                    .map_err(|e| Error::Io {
                        path: p.clone(),
                        source: e,
                    })?
                    .lines()
                    .next()
                    .unwrap_or_default()
                    .to_string();
                let kind = if header.split(',').any(|h| h.trim() == "method") {
                    PlotKind::SweepBars
                } else {
                    PlotKind::LossCurve
                };
                (kind, Some(p))
            };
            let files = emit_plot_data(kind, path.as_deref(), &target)?;
            writeln!(out, "wrote {} and {}", files.csv.display(), files.svg.display()).map_err(io_err)?;
            Ok(())
        }
    }
}

fn mode_name(mode: Option<RecoveryMode>) -> &'static str {
    match mode {
        Some(RecoveryMode::Independent) => "independent vocabulary",
        Some(RecoveryMode::Basis) => "basis coefficients",
        None => "none (independence assumption violated)",
    }
}

fn load_config_data(cfg: &TrainConfig, path: &Path) -> Result<GraphDataset> {
    let src = cfg.data.as_ref().ok_or_else(|| {
        Error::Config(format!(
            "{}: no \"data\" section and no --data/--name flags",
            path.display()
        ))
    })?;
    src.load()
}

fn locate_sidecar(path: &Path) -> Result<(PathBuf, String)> {
    let file = if path.is_dir() {
        let entries = std::fs::read_dir(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let found: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.to_string_lossy().ends_with("_mix.json"))
            .collect();
        match found.as_slice() {
            [one] => one.clone(),
            [] => return Err(Error::MissingFile(path.join("*_mix.json"))),
            _ => {
                return Err(Error::Config(format!(
                    "{}: several mixed graphs; pass the sidecar file",
                    path.display()
                )))
            }
        }
    } else {
        path.to_path_buf()
    };
    let fname = file
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = fname
        .strip_suffix("_mix.json")
        .ok_or_else(|| Error::Config(format!("{}: expected a NAME_mix.json sidecar", file.display())))?
        .to_string();
    let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok((dir, name))
}

fn recover_command(path: &Path, tol: f64, out: &mut dyn Write) -> Result<()> {
    let (dir, name) = locate_sidecar(path)?;
    let (mixed, side) = read_mixed_sample(&dir, &name)?;
    let source = match &side.source {
        Some(s) => {
            let parsed = parse_tudataset(&TuDatasetFiles::new(&s.dir, &s.name))?;
            Some(encode_node_features(&parsed, s.encoding)?)
        }
        None => None,
    };
    let (basis, mode) = match &source {
        Some(ds) => {
            let basis = feature_vocabulary(ds)?;
            let mode = recovery_mode_for(&basis).ok_or_else(|| {
                Error::Data(format!(
                    "{}: source features violate the independence assumption",
                    ds.name
                ))
            })?;
            (basis, mode)
        }
        None => (
            FeatureBasis::from_vocabulary(side.vocabulary.clone(), side.feature_dim)?,
            RecoveryMode::Independent,
        ),
    };
    let rec = recover_pair(&mixed, &basis, mode, tol)
        .map_err(|e| Error::Data(format!("{}: {e}", crate::data::sidecar_path(&dir, &name).display())))?;
    match rec.lambda {
        Some(l) => writeln!(out, "lambda: {l} (sidecar {})", side.lambda).map_err(io_err)?,
        None => writeln!(out, "lambda: undetermined, both sources identical").map_err(io_err)?,
    }
    for (tag, g) in [("A", &rec.graph_a), ("B", &rec.graph_b)] {
        writeln!(out, "graph {tag}: {} nodes, {} edges", g.num_nodes(), g.num_edges()).map_err(io_err)?;
    }
    if let Some(ds) = &source {
        let (i, j) = side.source_ids;
        let (a, b) = match (ds.items.get(i), ds.items.get(j)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Data(format!("{}: source ids ({i}, {j}) out of range", ds.name))),
        };
        if rec.matches(&a.graph, &b.graph, side.lambda, 1e-9) {
            writeln!(out, "matches sources {i} and {j} of {}", ds.name).map_err(io_err)?;
        } else {
            return Err(Error::InconsistentRecovery(format!(
                "recovered pair differs from sources {i} and {j} of {}",
                ds.name
            )));
        }
    }
    Ok(())
}
