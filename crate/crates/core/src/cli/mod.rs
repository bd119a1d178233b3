//! The `mpep` command line.
//!
//! Every command resolves its parameters from flags, then an optional flat
//! config file, then defaults, and writes the resolved values as `# key =
//! value` header lines (CSV) or a `config` object (JSON) ahead of the data.

pub mod settings;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::quantum::{window_lower_limit, window_upper_limit, Fidelity};
use crate::simulator::{format_significant, run_campaign, CriteriaToggle, MissingPathPolicy, SimulationConfig};
use crate::stats::{
    average_entangled_path_length, decision_tables, mean_path_fidelity, mean_path_probability, std_path_fidelity,
    std_path_fidelity_narrow_approx, std_path_probability, std_path_probability_narrow_approx, CriteriaConfig,
    DecisionTable, EdgeMoments, EntangledMassMode, PathFidelityPdf, PathParameterPdf, PathProbabilityPdf,
};
use settings::{parse_config, FloatList, IntList, IntRange, Settings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParameterKind {
    Fidelity,
    Probability,
}

impl std::str::FromStr for ParameterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fidelity" => Ok(ParameterKind::Fidelity),
            "probability" => Ok(ParameterKind::Probability),
            other => Err(Error::InvalidParameter(format!("unknown kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for ParameterKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ParameterKind::Fidelity => "fidelity",
            ParameterKind::Probability => "probability",
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "mpep", version, about = "Multipath entanglement purification analysis and simulation")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads (default: all available).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Flat `key = value` file; explicit flags win over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density curves of path fidelity or path probability.
    Pdf(PdfArgs),
    /// Mean and standard deviation of path parameters against path length.
    Moments(MomentsArgs),
    /// Boundaries of the useful purification window.
    Window(WindowArgs),
    /// Decision tables of both criteria over (l0, d).
    CriteriaTable(CriteriaTableArgs),
    /// Monte Carlo comparison of the distribution protocols.
    Simulate(SimulateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Pdf(_) => "pdf",
            Command::Moments(_) => "moments",
            Command::Window(_) => "window",
            Command::CriteriaTable(_) => "criteria-table",
            Command::Simulate(_) => "simulate",
        }
    }
}

#[derive(Debug, Args)]
pub struct PdfArgs {
    #[arg(long, value_enum)]
    pub kind: Option<ParameterKind>,
    /// Path lengths, e.g. `1-6` or `1,2,4`.
    #[arg(long)]
    pub lengths: Option<IntList>,
    /// Lower end of the uniform edge distribution.
    #[arg(long)]
    pub min: Option<f64>,
    /// Evenly spaced grid points per curve, before adding interval boundaries.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, value_enum)]
    pub kind: Option<ParameterKind>,
    /// Mean edge values; the edge distribution is uniform on `[2 mean - 1, 1]`.
    #[arg(long)]
    pub means: Option<FloatList>,
    #[arg(long)]
    pub lengths: Option<IntList>,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CriteriaTableArgs {
    #[arg(long)]
    pub f_min: Option<f64>,
    #[arg(long)]
    pub p_min: Option<f64>,
    /// Memory coherence time (default `1 / p_min`).
    #[arg(long)]
    pub tau_m: Option<f64>,
    #[arg(long)]
    pub l0: Option<IntRange>,
    #[arg(long)]
    pub d: Option<IntRange>,
    /// `as_written` or `renormalized`.
    #[arg(long)]
    pub mass_mode: Option<EntangledMassMode>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub nodes: Option<u32>,
    #[arg(long)]
    pub edges: Option<u64>,
    #[arg(long)]
    pub f_min: Option<f64>,
    #[arg(long)]
    pub p_min: Option<f64>,
    /// Number of sampled source/destination pairs.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub l0_max: Option<u32>,
    #[arg(long)]
    pub tau_m: Option<f64>,
    /// `both`, `fidelity`, `availability` or `none`.
    #[arg(long)]
    pub criteria: Option<CriteriaToggle>,
    #[arg(long)]
    pub mass_mode: Option<EntangledMassMode>,
    /// `fall_back_to_basic` or `exclude`.
    #[arg(long)]
    pub missing_path: Option<MissingPathPolicy>,
    #[arg(long)]
    pub max_attempts: Option<u32>,
}

/// Resolved output destination and format plus the metadata header.
struct Output {
    path: Option<PathBuf>,
    format: OutputFormat,
    config: Vec<(String, String)>,
    generated_at: u64,
}

impl Output {
    fn header(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.config {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s.push_str(&format!("# generated_at = {}\n", self.generated_at));
        s
    }

    fn render(&self, csv: &str, data: Value) -> String {
        match self.format {
            OutputFormat::Csv => format!("{}{csv}", self.header()),
            OutputFormat::Json => {
                let config: serde_json::Map<String, Value> =
                    self.config.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
                let doc = json!({ "config": config, "generated_at": self.generated_at, "data": data });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
            }
        }
    }

    fn extension(&self) -> &'static str {
        match self.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    /// `<stem>_<suffix>.<ext>` next to the requested output path.
    fn sibling(&self, suffix: &str) -> Option<PathBuf> {
        let path = self.path.as_ref()?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Some(path.with_file_name(format!("{stem}_{suffix}.{}", self.extension())))
    }

    fn write_to(path: Option<&Path>, content: &str) -> Result<()> {
        match path {
            Some(p) => fs::write(p, content).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(content.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

fn fmt(x: f64) -> String {
    format_significant(x)
}

fn check_min(kind: ParameterKind, min: f64) -> Result<()> {
    let lowest = match kind {
        ParameterKind::Fidelity => 0.5,
        ParameterKind::Probability => 0.0,
    };
    let ok = match kind {
        ParameterKind::Fidelity => min >= lowest && min < 1.0,
        ParameterKind::Probability => min > lowest && min < 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what: "min",
            value: min,
            min: lowest,
            max: 1.0,
        })
    }
}

/// Even grid over `[lo, hi]` merged with `extra` points, ascending, deduplicated.
fn grid_with(lo: f64, hi: f64, points: usize, extra: &[f64]) -> Vec<f64> {
    let mut xs: Vec<f64> = if points < 2 {
        vec![lo, hi]
    } else {
        (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect()
    };
    xs.extend(extra.iter().copied().filter(|x| (lo..=hi).contains(x)));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn cmd_pdf(args: &PdfArgs, settings: &mut Settings) -> Result<(String, Value)> {
    let kind = settings.get("kind", args.kind, ParameterKind::Fidelity)?;
    let lengths = settings.get("lengths", args.lengths.clone(), IntList((1..=6).collect()))?;
    let min = settings.get("min", args.min, 0.5)?;
    let points = settings.get("points", args.points, 201)?;
    check_min(kind, min)?;

    let mut csv = String::from("l,x,density\n");
    let mut curves = Vec::new();
    for &l in &lengths.0 {
        let (support, breakpoints, density): (_, _, Box<dyn Fn(f64) -> f64>) = match kind {
            ParameterKind::Fidelity => {
                let pdf = PathFidelityPdf::new(l, min)?;
                (pdf.support(), pdf.breakpoints(), Box::new(move |x| pdf.density(x)))
            }
            ParameterKind::Probability => {
                let pdf = PathProbabilityPdf::new(l, min)?;
                (pdf.support(), pdf.breakpoints(), Box::new(move |x| pdf.density(x)))
            }
        };
        let xs = grid_with(support.0, support.1, points, &breakpoints);
        let ys: Vec<f64> = xs.iter().map(|&x| density(x)).collect();
        for (x, y) in xs.iter().zip(&ys) {
            csv.push_str(&format!("{l},{},{}\n", fmt(*x), fmt(*y)));
        }
        curves.push(json!({ "l": l, "x": xs, "density": ys }));
    }
    Ok((csv, json!({ "kind": kind.to_string(), "curves": curves })))
}

fn cmd_moments(args: &MomentsArgs, settings: &mut Settings) -> Result<(String, Value)> {
    let kind = settings.get("kind", args.kind, ParameterKind::Fidelity)?;
    let means = settings.get("means", args.means.clone(), FloatList(vec![0.75, 0.85, 0.95, 1.0]))?;
    let lengths = settings.get("lengths", args.lengths.clone(), IntList((1..=20).collect()))?;

    let mut csv = String::from("edge_mean,l,mean,std,std_narrow\n");
    let mut rows = Vec::new();
    let mut l_avg = Vec::new();
    for &m in &means.0 {
        let edge = EdgeMoments::uniform_with_mean(m)?;
        if kind == ParameterKind::Fidelity && m > 0.5 {
            l_avg.push(json!({ "edge_mean": m, "l_avg": average_entangled_path_length(edge)?.to_string() }));
        }
        for &l in &lengths.0 {
            let (mean, std, narrow) = match kind {
                ParameterKind::Fidelity => (
                    mean_path_fidelity(l, edge)?.value(),
                    std_path_fidelity(l, edge)?,
                    std_path_fidelity_narrow_approx(l, edge)?,
                ),
                ParameterKind::Probability => (
                    mean_path_probability(l, edge)?,
                    std_path_probability(l, edge)?,
                    std_path_probability_narrow_approx(l, edge)?,
                ),
            };
            csv.push_str(&format!("{},{l},{},{},{}\n", fmt(m), fmt(mean), fmt(std), fmt(narrow)));
            rows.push(json!({ "edge_mean": m, "l": l, "mean": mean, "std": std, "std_narrow": narrow }));
        }
    }
    Ok((csv, json!({ "kind": kind.to_string(), "rows": rows, "average_entangled_length": l_avg })))
}

fn cmd_window(args: &WindowArgs, settings: &mut Settings) -> Result<(String, Value)> {
    let points = settings.get("points", args.points, 101)?;
    if points < 2 {
        return Err(Error::InvalidParameter("window needs at least two points".into()));
    }
    let mut csv = String::from("f1,lower,upper\n");
    let mut rows = Vec::new();
    for i in 0..points {
        let f1 = 0.5 + 0.5 * i as f64 / (points - 1) as f64;
        let f = Fidelity::new(f1)?;
        let lower = f1 - window_upper_limit(f)?;
        let upper = f1 - window_lower_limit(f)?;
        csv.push_str(&format!("{},{},{}\n", fmt(f1), fmt(lower), fmt(upper)));
        rows.push(json!({ "f1": f1, "lower": lower, "upper": upper }));
    }
    Ok((csv, Value::Array(rows)))
}

fn table_csv(table: &DecisionTable) -> String {
    let mut csv = String::from("l0");
    for d in table.d_range.clone() {
        csv.push_str(&format!(",d={d}"));
    }
    csv.push('\n');
    for (l0, row) in table.rows() {
        csv.push_str(&l0.to_string());
        for &e in row {
            csv.push_str(if e { ",1" } else { ",0" });
        }
        csv.push('\n');
    }
    csv
}

fn table_json(table: &DecisionTable) -> Value {
    let width = table.d_range.clone().count();
    let rows: Vec<Value> = table
        .rows()
        .enumerate()
        .map(|(i, (l0, row))| {
            json!({
                "l0": l0,
                "satisfied": row,
                "lhs": &table.values[i * width..(i + 1) * width],
            })
        })
        .collect();
    json!({ "d": table.d_range.clone().collect::<Vec<_>>(), "rows": rows })
}

struct CriteriaTableRun {
    cfg: CriteriaConfig,
    l0: IntRange,
    d: IntRange,
}

fn resolve_criteria_table(args: &CriteriaTableArgs, settings: &mut Settings) -> Result<CriteriaTableRun> {
    let f_min = settings.get("f_min", args.f_min, 0.9)?;
    let p_min = settings.get("p_min", args.p_min, 0.7)?;
    let tau_m = settings.get_optional("tau_m", args.tau_m)?.unwrap_or(1.0 / p_min);
    settings.record("tau_m", &tau_m);
    let l0 = settings.get("l0", args.l0, IntRange { start: 1, end: 10 })?;
    let d = settings.get("d", args.d, IntRange { start: 0, end: 5 })?;
    let mass_mode = settings.get("mass_mode", args.mass_mode, EntangledMassMode::AsWritten)?;
    if l0.start == 0 {
        return Err(Error::InvalidParameter("l0 must start at 1 or above".into()));
    }
    let cfg = CriteriaConfig::with_tau(f_min, p_min, tau_m)?.with_mass_mode(mass_mode);
    Ok(CriteriaTableRun { cfg, l0, d })
}

fn resolve_simulation(args: &SimulateArgs, settings: &mut Settings, seed: u64) -> Result<SimulationConfig> {
    let defaults = SimulationConfig::default();
    let nodes = settings.get("nodes", args.nodes, defaults.nodes)?;
    let edges = settings.get("edges", args.edges, defaults.edges)?;
    let fidelity_min = settings.get("f_min", args.f_min, defaults.fidelity_min)?;
    let probability_min = settings.get("p_min", args.p_min, defaults.probability_min)?;
    let num_sd_samples = settings.get("samples", args.samples, defaults.num_sd_samples)?;
    let l0_max = settings.get("l0_max", args.l0_max, defaults.l0_max)?;
    let tau_m = settings.get_optional("tau_m", args.tau_m)?.unwrap_or(1.0 / probability_min);
    settings.record("tau_m", &tau_m);
    let criteria = settings.get("criteria", args.criteria, defaults.criteria)?;
    let mass_mode = settings.get("mass_mode", args.mass_mode, defaults.mass_mode)?;
    let missing_path = settings.get("missing_path", args.missing_path, defaults.missing_path)?;
    let max_pair_attempts = settings.get("max_attempts", args.max_attempts, defaults.max_pair_attempts)?;
    let cfg = SimulationConfig {
        nodes,
        edges,
        seed,
        fidelity_min,
        probability_min,
        num_sd_samples,
        l0_max,
        tau_m: Some(tau_m),
        criteria,
        mass_mode,
        missing_path,
        max_pair_attempts,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Runs the parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => Default::default(),
    };
    let mut settings = Settings::new(file);
    let command = cli.command.name();
    let declared: Option<String> = settings.get_optional("command", None)?;
    if let Some(declared) = declared {
        if declared != command {
            return Err(Error::InvalidParameter(format!(
                "config file is for `{declared}`, not `{command}`"
            )));
        }
    }
    settings.record("command", &command);
    let seed = settings.get("seed", cli.seed, 1u64)?;
    let format = settings.get("format", cli.format, OutputFormat::Csv)?;
    let out_from_file: Option<String> = settings.get_optional("out", None)?;
    let path = cli.out.clone().or(out_from_file.map(PathBuf::from));

    enum Plan {
        Single(String, Value),
        Tables(CriteriaTableRun),
        Simulate(SimulationConfig),
    }
    let plan = match &cli.command {
        Command::Pdf(a) => {
            let (csv, data) = cmd_pdf(a, &mut settings)?;
            Plan::Single(csv, data)
        }
        Command::Moments(a) => {
            let (csv, data) = cmd_moments(a, &mut settings)?;
            Plan::Single(csv, data)
        }
        Command::Window(a) => {
            let (csv, data) = cmd_window(a, &mut settings)?;
            Plan::Single(csv, data)
        }
        Command::CriteriaTable(a) => Plan::Tables(resolve_criteria_table(a, &mut settings)?),
        Command::Simulate(a) => Plan::Simulate(resolve_simulation(a, &mut settings, seed)?),
    };
    let output = Output {
        path,
        format,
        config: settings.finish()?,
        generated_at: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };

    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                return Err(Error::InvalidParameter("--threads must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        builder
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start worker threads: {e}")))?
    };

    pool.install(|| match plan {
        Plan::Single(csv, data) => {
            Output::write_to(output.path.as_deref(), &output.render(&csv, data))
        }
        Plan::Tables(run) => {
            let (fidelity, availability) = decision_tables(&run.cfg, run.l0.start..=run.l0.end, run.d.start..=run.d.end)?;
            for (suffix, table) in [("fidelity", &fidelity), ("availability", &availability)] {
                let content = output.render(&table_csv(table), table_json(table));
                match output.sibling(suffix) {
                    Some(p) => Output::write_to(Some(&p), &content)?,
                    None => Output::write_to(None, &format!("# table = {suffix}\n{content}"))?,
                }
            }
            Ok(())
        }
        Plan::Simulate(cfg) => {
            let report = run_campaign(&cfg)?;
            for row in &report.rows {
                eprintln!(
                    "l0 = {:>2}  n = {:>5}  basic = {}  mpep = {}  chosen = {}",
                    row.l0,
                    row.n,
                    fmt(row.basic_mean),
                    row.mpep_mean.map(fmt).unwrap_or_else(|| "-".into()),
                    fmt(row.chosen_mean)
                );
            }
            let data = serde_json::to_value(&report).expect("serializable");
            Output::write_to(output.path.as_deref(), &output.render(&report.to_csv(), data))
        }
    })
}

/// Parses `args`, runs, and maps the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_VALIDATION
            }
        }
    }
}
