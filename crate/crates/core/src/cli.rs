//! The `qoc` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 basis target
//! unreachable.

use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataio::{self, MnistDataset, TabularColumn};
use crate::encoders::{CategoryDictionary, Encoder, EncodingScheme};
use crate::geometry::{self, packs, GenerationConfig, GeometryError, SetKind, UnitVectorSet};
use crate::nn::{self, Optimizer, TrainConfig};
use crate::plane::{self, PlaneMode};
use crate::qsoftmax::CoordinateMatrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_UNREACHABLE: i32 = 3;

/// Learning rate used by `train-mnist` unless `--lr` is given.
pub const DEFAULT_LEARNING_RATE: f64 = 0.003;

#[derive(Debug, Parser)]
#[command(
    name = "qoc",
    version,
    about = "Quasi-orthonormal and spherical-code encodings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for a quasiorthonormal basis and write it as a qoc-basis file.
    GenBasis(GenBasisArgs),
    /// Convert a spherical-code pack or qoc-basis file between basis and code form.
    Convert(ConvertArgs),
    /// Encode one CSV column into a numeric matrix.
    Encode(EncodeArgs),
    /// Decode a numeric matrix back into labels.
    Decode(DecodeArgs),
    /// Train the MNIST classifier with a one-hot, QOE or spherical head.
    TrainMnist(TrainArgs),
    /// Sample a disk, apply a plane softmax and write both point clouds.
    GeometryDemo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct GenBasisArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub count: usize,
    /// Largest allowed |q_i . q_j|.
    #[arg(long)]
    pub max_dot: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 4000)]
    pub max_iterations: usize,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetForm {
    Basis,
    Code,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    /// A whitespace-separated pack (needs --dim and --count) or a qoc-basis file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub to: SetForm,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    Ordinal,
    Onehot,
    Binary,
    Basen,
    Hash,
    Qoe,
    Spherical,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeName,
    /// Base for `basen`.
    #[arg(long, default_value_t = 3)]
    pub base: u32,
    /// Balanced digits for `basen`.
    #[arg(long)]
    pub balanced: bool,
    /// Bits for `hash`.
    #[arg(long, default_value_t = 16)]
    pub bits: u32,
    /// Offset for `ordinal`.
    #[arg(long, default_value_t = 1)]
    pub offset: i64,
    /// qoc-basis file for `qoe` (kind=basis) and `spherical` (kind=code).
    #[arg(long)]
    pub basis_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub column: String,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Encoded matrix; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dictionary file; defaults to `<out>.dict`.
    #[arg(long)]
    pub dict_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Matrix written by `encode`.
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub dict: PathBuf,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    /// Name of the decoded column; derived from the matrix header by default.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainScheme {
    Onehot,
    Qoe,
    Sphere,
}

impl fmt::Display for TrainScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrainScheme::Onehot => "onehot",
            TrainScheme::Qoe => "qoe",
            TrainScheme::Sphere => "sphere",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizerName {
    Sgd,
    Adam,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum, default_value_t = TrainScheme::Onehot)]
    pub scheme: TrainScheme,
    /// Output dimension: 4 or 7 for `qoe`, 3 or >= 5 for `sphere`.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Use this qoc-basis file for the head instead of a built-in set.
    #[arg(long)]
    pub basis_file: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    /// Additional epochs to report, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eval_epochs: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep only the first N train and N test samples.
    #[arg(long)]
    pub subset: Option<usize>,
    /// Write the results CSV here as well as to stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Lay the report out as rows=epochs, columns=accuracies.
    #[arg(long)]
    pub report_pivot: bool,
    /// MNIST directory; defaults to $QOC_DATA_DIR, then ./data/mnist.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_LEARNING_RATE)]
    pub lr: f64,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 64)]
    pub hidden: usize,
    #[arg(long, default_value_t = 0.2)]
    pub dropout: f64,
    #[arg(long, value_enum, default_value_t = OptimizerName::Adam)]
    pub optimizer: OptimizerName,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = PlaneMode::Ortho)]
    pub mode: PlaneMode,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 6.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Marks an error as a usage problem (exit 1) rather than a data problem.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Maps an error to its exit code.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(GeometryError::TargetUnreachable { .. }) = cause.downcast_ref() {
            return EXIT_UNREACHABLE;
        }
    }
    EXIT_DATA
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Errors go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenBasis(a) => gen_basis(a),
        Command::Convert(a) => convert(a),
        Command::Encode(a) => encode(a),
        Command::Decode(a) => decode(a),
        Command::TrainMnist(a) => train_mnist(a),
        Command::GeometryDemo(a) => geometry_demo(a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_set_file(path: &Path) -> Result<UnitVectorSet> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    geometry::read_set(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))
}

fn write_set_to(set: &UnitVectorSet, path: Option<&Path>) -> Result<()> {
    let mut out = output(path)?;
    geometry::write_set(set, &mut out)?;
    out.flush()?;
    Ok(())
}

fn gen_basis(a: GenBasisArgs) -> Result<()> {
    let config = GenerationConfig {
        max_iterations: a.max_iterations,
        restarts: a.restarts,
        ..GenerationConfig::new(a.dim, a.count, a.max_dot, a.seed)
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    let started = Instant::now();
    let set = geometry::generate_basis(&config)?;
    let report = set.validate(a.max_dot);
    write_set_to(&set, a.out.as_deref())?;
    eprintln!("{report} elapsed={:.2?}", started.elapsed());
    if a.out.is_some() {
        println!("{report}");
    }
    Ok(())
}

fn convert(a: ConvertArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let set = if text.trim_start().starts_with("qoc-basis") {
        geometry::read_set(text.as_bytes())?
    } else {
        let (dim, count) = match (a.dim, a.count) {
            (Some(d), Some(c)) => (d, c),
            _ => return Err(usage("a pack needs --dim and --count")),
        };
        geometry::load_pack(&text, dim, count)
            .with_context(|| format!("loading pack {}", a.input.display()))?
    };
    let converted = match (a.to, set.kind()) {
        (SetForm::Basis, SetKind::SphericalCode) => geometry::code_to_basis(&set)?,
        (SetForm::Code, SetKind::QuasiorthonormalBasis) => geometry::basis_to_code(&set)?,
        _ => set,
    };
    write_set_to(&converted, a.out.as_deref())?;
    eprintln!(
        "{} {} vectors in dim {}: {}",
        converted.kind(),
        converted.len(),
        converted.dim(),
        converted.validate(1.0)
    );
    Ok(())
}

fn scheme_from_args(s: &SchemeArgs) -> Result<EncodingScheme> {
    let set_file = |kind: SetKind| -> Result<UnitVectorSet> {
        let path = s
            .basis_file
            .as_deref()
            .ok_or_else(|| usage(format!("scheme {:?} needs --basis-file", s.scheme)))?;
        let set = read_set_file(path)?;
        if set.kind() != kind {
            bail!(
                "{} holds a {}, expected a {kind}",
                path.display(),
                set.kind()
            );
        }
        Ok(set)
    };
    Ok(match s.scheme {
        SchemeName::Ordinal => EncodingScheme::Ordinal { offset: s.offset },
        SchemeName::Onehot => EncodingScheme::OneHot,
        SchemeName::Binary => EncodingScheme::Binary,
        SchemeName::Basen => EncodingScheme::BaseN {
            base: s.base,
            balanced: s.balanced,
        },
        SchemeName::Hash => EncodingScheme::Hash { bits: s.bits },
        SchemeName::Qoe => EncodingScheme::Qoe(set_file(SetKind::QuasiorthonormalBasis)?),
        SchemeName::Spherical => EncodingScheme::Spherical(set_file(SetKind::SphericalCode)?),
    })
}

fn column_header(column: &str, dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("{column}_{i}")).collect()
}

fn encode(a: EncodeArgs) -> Result<()> {
    let scheme = scheme_from_args(&a.scheme)?;
    let column = dataio::read_csv_column(&a.csv, &a.column)?;
    let dict = CategoryDictionary::fit(&column.values)?;
    let encoder = Encoder::new(dict, scheme)?;
    let matrix = encoder.encode_column(&column.values)?;
    let header = column_header(&a.column, encoder.output_dim());
    let mut out = output(a.out.as_deref())?;
    dataio::write_matrix(&mut out, &matrix, &header)?;
    out.flush()?;
    let dict_path = match (&a.dict_out, &a.out) {
        (Some(p), _) => p.clone(),
        (None, Some(o)) => {
            let mut p = o.clone().into_os_string();
            p.push(".dict");
            PathBuf::from(p)
        }
        (None, None) => return Err(usage("--dict-out is required when writing to stdout")),
    };
    let file =
        File::create(&dict_path).with_context(|| format!("creating {}", dict_path.display()))?;
    encoder.dictionary().write(BufWriter::new(file))?;
    eprintln!(
        "encoded {} rows, {} labels, {} -> {} columns",
        matrix.len(),
        encoder.dictionary().len(),
        encoder.scheme(),
        encoder.output_dim()
    );
    Ok(())
}

fn decode(a: DecodeArgs) -> Result<()> {
    let scheme = scheme_from_args(&a.scheme)?;
    let file = File::open(&a.dict).with_context(|| format!("opening {}", a.dict.display()))?;
    let dict = CategoryDictionary::read(BufReader::new(file))?;
    let encoder = Encoder::new(dict, scheme)?;
    let (header, matrix) = dataio::read_matrix_csv(&a.csv)?;
    if header.len() != encoder.output_dim() {
        bail!(
            "{} has {} columns, {} expects {}",
            a.csv.display(),
            header.len(),
            encoder.scheme(),
            encoder.output_dim()
        );
    }
    let values = encoder.decode_column(&matrix)?;
    let name = a.column.unwrap_or_else(|| {
        let first = header.first().map(String::as_str).unwrap_or("label");
        match first.rsplit_once('_') {
            Some((stem, idx)) if idx.chars().all(|c| c.is_ascii_digit()) => stem.to_owned(),
            _ => first.to_owned(),
        }
    });
    let mut out = output(a.out.as_deref())?;
    dataio::write_column(&mut out, &TabularColumn { name, values })?;
    out.flush()?;
    Ok(())
}

/// The ten-row coordinate matrix used for a `train-mnist` head.
pub fn mnist_head(
    scheme: TrainScheme,
    dim: Option<usize>,
    basis_file: Option<&Path>,
) -> Result<CoordinateMatrix> {
    const CLASSES: usize = 10;
    let set = if let Some(path) = basis_file {
        let set = read_set_file(path)?;
        if let Some(d) = dim {
            if d != set.dim() {
                return Err(usage(format!(
                    "--dim {d} disagrees with {} (dim {})",
                    path.display(),
                    set.dim()
                )));
            }
        }
        set
    } else {
        match (scheme, dim) {
            (TrainScheme::Onehot, None | Some(CLASSES)) => UnitVectorSet::standard_basis(CLASSES)?,
            (TrainScheme::Onehot, Some(d)) => {
                return Err(usage(format!("onehot uses dim 10, not {d}")))
            }
            (TrainScheme::Qoe, Some(7)) => geometry::code_to_basis(&packs::seven_dim_56())?,
            (TrainScheme::Qoe, Some(4)) => geometry::code_to_basis(&packs::four_dim_24())?,
            (TrainScheme::Qoe, Some(d)) if d >= CLASSES => UnitVectorSet::standard_basis(d)?,
            (TrainScheme::Sphere, Some(3)) => packs::three_dim_10(),
            (TrainScheme::Sphere, Some(4)) => packs::four_dim_24(),
            (TrainScheme::Sphere, Some(d)) if 2 * d >= CLASSES => {
                geometry::basis_to_code(&UnitVectorSet::standard_basis(d)?)?
            }
            (_, d) => {
                return Err(usage(format!(
                    "no built-in {scheme} set for dim {d:?}; pass --basis-file"
                )))
            }
        }
    };
    if set.len() < CLASSES {
        bail!(
            "the head needs {CLASSES} vectors, the set has {}",
            set.len()
        );
    }
    Ok(CoordinateMatrix::from_set(&set.truncated(CLASSES)?))
}

fn data_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(MnistDataset::default_dir)
        .unwrap_or_else(|| PathBuf::from("data/mnist"))
}

/// One row of the `train-mnist` report; accuracies are percentages.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scheme: String,
    pub dim: usize,
    pub epochs: usize,
    pub train_acc: f64,
    pub test_acc: f64,
}

pub fn write_report<W: Write>(out: W, rows: &[ReportRow], pivot: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if pivot {
        let label = rows
            .first()
            .map(|r| format!("{}-{}", r.scheme, r.dim))
            .unwrap_or_default();
        w.write_record([
            "epochs".to_owned(),
            format!("{label} train"),
            format!("{label} test"),
        ])?;
        for r in rows {
            w.write_record([
                r.epochs.to_string(),
                fmt_pct(r.train_acc),
                fmt_pct(r.test_acc),
            ])?;
        }
    } else {
        w.write_record(["scheme", "dim", "epochs", "train_acc", "test_acc"])?;
        for r in rows {
            w.write_record([
                r.scheme.clone(),
                r.dim.to_string(),
                r.epochs.to_string(),
                fmt_pct(r.train_acc),
                fmt_pct(r.test_acc),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn fmt_pct(x: f64) -> String {
    format!("{x:.4}")
}

fn train_mnist(a: TrainArgs) -> Result<()> {
    let q = mnist_head(a.scheme, a.dim, a.basis_file.as_deref())?;
    let mut checkpoints: Vec<usize> = a
        .eval_epochs
        .iter()
        .copied()
        .filter(|&e| e < a.epochs)
        .collect();
    if a.eval_epochs.iter().any(|&e| e == 0 || e > a.epochs) {
        return Err(usage(format!("--eval-epochs must lie in 1..={}", a.epochs)));
    }
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let config = TrainConfig {
        epochs: a.epochs,
        batch_size: a.batch_size,
        learning_rate: a.lr,
        seed: a.seed,
        runs: a.runs,
        hidden: a.hidden,
        dropout: a.dropout,
        optimizer: match a.optimizer {
            OptimizerName::Sgd => Optimizer::Sgd,
            OptimizerName::Adam => Optimizer::adam(),
        },
        checkpoints,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    if !(0.0..1.0).contains(&a.dropout) {
        return Err(usage("--dropout must lie in [0, 1)"));
    }
    let dir = data_dir(a.data_dir);
    let started = Instant::now();
    let data = MnistDataset::load(&dir, a.subset)
        .with_context(|| format!("loading MNIST from {}", dir.display()))?;
    eprintln!(
        "loaded {} train / {} test samples from {}",
        data.train_labels.len(),
        data.test_labels.len(),
        dir.display()
    );
    let report = nn::train(&q, &data, &config)?;
    for (run, m) in report.runs.iter().enumerate() {
        eprintln!(
            "run {run} seed {}: train {:.2}% test {:.2}%",
            nn::run_seed(a.seed, run),
            100.0 * m.train_accuracy,
            100.0 * m.test_accuracy
        );
    }
    eprintln!("elapsed {:.2?}", started.elapsed());
    let rows: Vec<ReportRow> = report
        .mean
        .checkpoints
        .iter()
        .map(|c| ReportRow {
            scheme: a.scheme.to_string(),
            dim: q.cols(),
            epochs: c.epoch,
            train_acc: 100.0 * c.train_accuracy,
            test_acc: 100.0 * c.test_accuracy,
        })
        .collect();
    if let Some(path) = &a.report {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_report(BufWriter::new(file), &rows, a.report_pivot)?;
    }
    write_report(io::stdout().lock(), &rows, a.report_pivot)
}

fn geometry_demo(a: DemoArgs) -> Result<()> {
    if !(a.radius > 0.0 && a.radius.is_finite()) {
        return Err(usage("--radius must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let points = plane::sample(a.mode, a.samples, a.radius, &mut rng);
    let header: Vec<String> = ["x", "y", "out_x", "out_y"].map(String::from).to_vec();
    let matrix: Vec<Vec<f64>> = points
        .iter()
        .map(|p| vec![p.x, p.y, p.out_x, p.out_y])
        .collect();
    let mut out = output(a.out.as_deref())?;
    dataio::write_matrix(&mut out, &matrix, &header).map_err(|e| anyhow!(e))?;
    out.flush()?;
    Ok(())
}
