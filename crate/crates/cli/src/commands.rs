//! Subcommand definitions and their implementations.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{Map, Value};

use netgrowth::curve::{fit_avg_degree_curve_with, CurveFitOptions, CurveForm, CurvePoint};
use netgrowth::experiments::{
    self, facebook_tracking, model_i_sweep, model_ii_tracking, occupy_tracking, ModelISweepConfig, ModelISweepRow,
    TrackingConfig, TrackingReport, DEFAULT_BASE_SEED,
};
use netgrowth::models::{
    self, invert_model_ii, simulate_model_i_with, simulate_model_ii_with, BaselineParams, InitialWiring,
    InversionConventions, ModelIIParams, ModelIParams,
};
use netgrowth::powerlaw::{self, fit_exponent_with, CandidateGrid, FitOptions};
use netgrowth::stream::replay::{replay, SnapshotSchedule};
use netgrowth::stream::report::{self, AnalysisOptions};
use netgrowth::stream::{shuffle_events, EventLog, ParseOptions, ShuffleScope};

use crate::output::{self, OutputSet, Provenance};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
    #[error(transparent)]
    Core(#[from] netgrowth::Error),
}

type CliResult<T = ()> = Result<T, CliError>;

fn io_err(context: impl std::fmt::Display) -> impl FnOnce(io::Error) -> CliError {
    let context = context.to_string();
    move |source| CliError::Io { context, source }
}

/// Growing-network simulation, exponent fitting and event-stream analysis.
#[derive(Debug, Parser)]
#[command(name = "netgrowth", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a growth model and write its event log (TSV).
    Generate(GenerateArgs),
    /// Replay an event log; write trajectory and degree-distribution CSVs.
    Analyze(AnalyzeArgs),
    /// Fit a power-law exponent to samples or to a log's final degrees (JSON).
    FitExponent(FitExponentArgs),
    /// Fit `a + c n^b` to an average-degree trajectory (JSON).
    FitAvgdeg(FitAvgdegArgs),
    /// Per-window Z/R/I/H event counts and ratios of an event log (CSV).
    Classify(ClassifyArgs),
    /// Randomly permute an event log, keeping its timestamp sequence (TSV).
    Shuffle(ShuffleArgs),
    /// Closed-form average degree, edge fractions and NZ at sizes 2^i (CSV).
    Predict(PredictArgs),
    /// Model II parameters that produce a given (a, b, c) curve (JSON on stdout).
    Invert(InvertArgs),
    /// Run a named experiment end to end.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Model1,
    Model2,
    BarabasiAlbert,
    Dorogovtsev,
    Vazquez,
    Copying,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RateModel {
    Model1,
    Model2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WiringArg {
    MeanField,
    Isolated,
}

impl From<WiringArg> for InitialWiring {
    fn from(w: WiringArg) -> Self {
        match w {
            WiringArg::MeanField => InitialWiring::MeanField,
            WiringArg::Isolated => InitialWiring::Isolated,
        }
    }
}

/// Model parameters: a JSON file and/or flags; flags win.
#[derive(Debug, Args)]
struct ParamArgs {
    /// JSON object with parameter fields (`p`, `q`, `r`, `s`, `N0`, `H0`, `m`, `c_rate`, `u`, `q_copy`).
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    n0: Option<usize>,
    #[arg(long)]
    h0: Option<usize>,
    /// Edges per new node (Barabási-Albert).
    #[arg(long)]
    m: Option<usize>,
    /// Edges per step (Dorogovtsev).
    #[arg(long)]
    c_rate: Option<usize>,
    /// Triangle-closing probability (Vázquez).
    #[arg(long)]
    u: Option<f64>,
    /// Link-copying probability (copying model).
    #[arg(long)]
    q_copy: Option<f64>,
}

impl ParamArgs {
    fn object(&self) -> CliResult<Map<String, Value>> {
        let mut map = match &self.params {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(io_err(path.display()))?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(CliError::Usage(format!("{}: expected a JSON object", path.display()))),
                    Err(e) => return Err(CliError::Usage(format!("{}: {e}", path.display()))),
                }
            }
            None => Map::new(),
        };
        let mut put = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                map.insert(key.to_string(), v);
            }
        };
        put("p", self.p.map(Value::from));
        put("q", self.q.map(Value::from));
        put("r", self.r.map(Value::from));
        put("s", self.s.map(Value::from));
        put("N0", self.n0.map(Value::from));
        put("H0", self.h0.map(Value::from));
        put("m", self.m.map(Value::from));
        put("c_rate", self.c_rate.map(Value::from));
        put("u", self.u.map(Value::from));
        put("q_copy", self.q_copy.map(Value::from));
        Ok(map)
    }

    fn decode<T: serde::de::DeserializeOwned>(map: Map<String, Value>, what: &str) -> CliResult<T> {
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Usage(format!("{what} parameters: {e}")))
    }

    fn model_i(&self) -> CliResult<ModelIParams<f64>> {
        let params: ModelIParams<f64> = Self::decode(self.object()?, "model1")?;
        params.validate()?;
        Ok(params)
    }

    fn model_ii(&self) -> CliResult<ModelIIParams<f64>> {
        let params: ModelIIParams<f64> = Self::decode(self.object()?, "model2")?;
        params.validate()?;
        Ok(params)
    }

    fn baseline(&self, variant: &str) -> CliResult<BaselineParams> {
        let mut map = self.object()?;
        map.insert("variant".into(), Value::from(variant));
        let params: BaselineParams = Self::decode(map, variant)?;
        params.validate()?;
        Ok(params)
    }

    fn rate_model(&self, model: RateModel) -> CliResult<ModelIIParams<f64>> {
        match model {
            RateModel::Model1 => Ok(self.model_i()?.into()),
            RateModel::Model2 => self.model_ii(),
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelKind,
    #[command(flatten)]
    params: ParamArgs,
    /// Node target (step count for the Vázquez model).
    #[arg(long)]
    target: usize,
    #[arg(long, default_value_t = DEFAULT_BASE_SEED)]
    seed: u64,
    /// Initial wiring of the N0 start nodes (Model I/II).
    #[arg(long, value_enum, default_value_t = WiringArg::MeanField)]
    init: WiringArg,
    /// Output TSV [default: $NETGROWTH_OUT_DIR/events.tsv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Smallest tail size considered for the threshold.
    #[arg(long, default_value_t = powerlaw::DEFAULT_MIN_TAIL)]
    min_tail: usize,
    /// KS distance from the optimum that admits a threshold into the estimate set.
    #[arg(long, default_value_t = powerlaw::DEFAULT_KS_WINDOW)]
    ks_window: f64,
}

impl FitArgs {
    fn options(&self, grid: CandidateGrid) -> CliResult<FitOptions<f64>> {
        if self.min_tail < 2 {
            return Err(CliError::Usage("--min-tail must be at least 2".into()));
        }
        if !(self.ks_window >= 0.0) {
            return Err(CliError::Usage("--ks-window must be nonnegative".into()));
        }
        Ok(FitOptions { min_tail: self.min_tail, ks_window: self.ks_window, grid })
    }
}

#[derive(Debug, Args)]
struct StreamInput {
    /// Event log TSV.
    #[arg(long)]
    input: PathBuf,
    /// Reject logs whose timestamps decrease.
    #[arg(long)]
    strict: bool,
}

impl StreamInput {
    fn read(&self) -> CliResult<EventLog> {
        let file = fs::File::open(&self.input).map_err(io_err(self.input.display()))?;
        let log = EventLog::read_tsv(BufReader::new(file), ParseOptions { strict: self.strict })
            .map_err(|e| CliError::Data(format!("{}: {e}", self.input.display())))?;
        if log.is_empty() {
            return Err(CliError::Data(format!("{}: no events", self.input.display())));
        }
        Ok(log)
    }

    fn stem(&self) -> String {
        self.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "events".into())
    }
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: StreamInput,
    /// First snapshot exponent: snapshots at n = 2^i for i >= this.
    #[arg(long, default_value_t = 5)]
    from: u32,
    #[command(flatten)]
    fit: FitArgs,
    /// Ratio between consecutive log-bin edges.
    #[arg(long, default_value_t = powerlaw::DEFAULT_BIN_BASE)]
    bin_base: f64,
    /// Output directory [default: $NETGROWTH_OUT_DIR or .].
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output file prefix [default: input file stem].
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Debug, Args)]
struct FitExponentArgs {
    /// Whitespace-separated positive samples; `#` starts a comment.
    #[arg(long)]
    input: PathBuf,
    /// Treat the input as an event log and fit its final degree distribution.
    #[arg(long)]
    events: bool,
    #[command(flatten)]
    fit: FitArgs,
    /// Evaluate at most this many geometrically spaced thresholds (0: every distinct value).
    #[arg(long, default_value_t = 0)]
    grid_size: usize,
    /// Output JSON [default: $NETGROWTH_OUT_DIR/exponent_fit.json].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitAvgdegArgs {
    /// CSV with `n` and `avg_degree` columns (for example a trajectory CSV).
    #[arg(long)]
    input: PathBuf,
    /// Ignore rows with n below this.
    #[arg(long, default_value_t = 0.0)]
    min_n: f64,
    /// Fit `c n^b` with `a` pinned at zero.
    #[arg(long)]
    pure_power: bool,
    /// Output JSON [default: $NETGROWTH_OUT_DIR/avgdeg_fit.json].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    input: StreamInput,
    #[arg(long, default_value_t = 5)]
    from: u32,
    /// Output CSV [default: $NETGROWTH_OUT_DIR/<stem>.ratios.csv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ShuffleArgs {
    #[command(flatten)]
    input: StreamInput,
    #[arg(long, default_value_t = DEFAULT_BASE_SEED)]
    seed: u64,
    /// Permute edge events only; node-only events keep their positions.
    #[arg(long)]
    edges_only: bool,
    /// Output TSV [default: $NETGROWTH_OUT_DIR/<stem>.shuffled.tsv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long, value_enum)]
    model: RateModel,
    #[command(flatten)]
    params: ParamArgs,
    /// Largest size evaluated.
    #[arg(long, default_value_t = 1 << 17)]
    n_max: u64,
    /// First size exponent.
    #[arg(long, default_value_t = 5)]
    from: u32,
    /// Output CSV [default: $NETGROWTH_OUT_DIR/prediction.csv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InvertArgs {
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    #[arg(long, allow_negative_numbers = true)]
    b: f64,
    #[arg(long, allow_negative_numbers = true)]
    c: f64,
    /// Total per-node growth rate D = p + q + 2r.
    #[arg(long, default_value_t = 0.1)]
    rate: f64,
    #[arg(long, default_value_t = 2)]
    h0: usize,
    /// Random-edge rate.
    #[arg(long)]
    r: f64,
    /// Also write the JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Recipe {
    /// Degree-exponent medians over the Model I homophily grid.
    Fig9,
    /// Estimated vs calculated growth exponent over the Model I homophily grid.
    Fig10,
    /// Model II with the Occupy parameter set against its measured curve.
    OccupyFit,
    /// Model II with the Facebook parameter set against its measured curve.
    FacebookFit,
}

#[derive(Debug, Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    recipe: Recipe,
    /// Number of seeds [default: recipe's own].
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_BASE_SEED)]
    base_seed: u64,
    /// Node target [default: recipe's own].
    #[arg(long)]
    target: Option<usize>,
    /// Start size for the Model I grid [default: recipe's own].
    #[arg(long)]
    n0: Option<usize>,
    /// Output directory [default: $NETGROWTH_OUT_DIR or .].
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze(a),
        Command::FitExponent(a) => fit_exponent(a),
        Command::FitAvgdeg(a) => fit_avgdeg(a),
        Command::Classify(a) => classify(a),
        Command::Shuffle(a) => shuffle(a),
        Command::Predict(a) => predict(a),
        Command::Invert(a) => invert(a),
        Command::Reproduce(a) => reproduce(a),
    }
}

fn require_input(path: &Path) -> CliResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("input file {} does not exist", path.display())))
    }
}

fn commit(out: OutputSet) -> CliResult {
    for path in out.commit().map_err(io_err("renaming outputs"))? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn write_output(out: &mut OutputSet, path: &Path, header: Option<&str>, body: &[u8]) -> CliResult {
    out.write(path, header, body).map_err(io_err(path.display()))
}

fn tsv_bytes(log: &EventLog) -> Vec<u8> {
    let mut buf = Vec::new();
    log.write_tsv(&mut buf).expect("writing to memory");
    buf
}

fn generate(args: GenerateArgs) -> CliResult {
    let wiring = InitialWiring::from(args.init);
    let log = match args.model {
        ModelKind::Model1 => simulate_model_i_with(&args.params.model_i()?, args.target, args.seed, wiring)?,
        ModelKind::Model2 => simulate_model_ii_with(&args.params.model_ii()?, args.target, args.seed, wiring)?,
        ModelKind::BarabasiAlbert => args.params.baseline("barabasi_albert")?.simulate(args.target, args.seed)?,
        ModelKind::Dorogovtsev => args.params.baseline("dorogovtsev")?.simulate(args.target, args.seed)?,
        ModelKind::Vazquez => args.params.baseline("vazquez")?.simulate(args.target, args.seed)?,
        ModelKind::Copying => args.params.baseline("copying")?.simulate(args.target, args.seed)?,
    };
    let path = output::resolve(args.out.as_deref(), "events.tsv");
    let provenance = Provenance::new(Some(args.seed));
    let mut out = OutputSet::new();
    write_output(&mut out, &path, Some(&provenance.comment()), &tsv_bytes(&log))?;
    commit(out)
}

fn analyze(args: AnalyzeArgs) -> CliResult {
    require_input(&args.input.input)?;
    if !(args.bin_base > 1.0) {
        return Err(CliError::Usage("--bin-base must exceed 1".into()));
    }
    let opts = AnalysisOptions {
        schedule: SnapshotSchedule::PowersOfTwo { from: args.from },
        fit: args.fit.options(CandidateGrid::AllDistinct)?,
        bin_base: args.bin_base,
    };
    let log = args.input.read()?;
    let analysis = report::analyze(&log.events, &opts)?;
    let dir = args.out_dir.unwrap_or_else(output::default_dir);
    let prefix = args.prefix.unwrap_or_else(|| args.input.stem());
    let provenance = Provenance::new(None).comment();

    let mut trajectory = Vec::new();
    report::write_trajectory_csv(&mut trajectory, &analysis).expect("writing to memory");
    let mut distribution = Vec::new();
    report::write_distribution_csv(&mut distribution, &analysis).expect("writing to memory");

    let mut out = OutputSet::new();
    write_output(&mut out, &dir.join(format!("{prefix}.trajectory.csv")), Some(&provenance), &trajectory)?;
    write_output(&mut out, &dir.join(format!("{prefix}.distribution.csv")), Some(&provenance), &distribution)?;
    commit(out)
}

fn read_samples(path: &Path) -> CliResult<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(io_err(path.display()))?;
    let mut samples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let data = line.split('#').next().unwrap_or("");
        for field in data.split(|c: char| c.is_whitespace() || c == ',').filter(|f| !f.is_empty()) {
            let value: f64 = field
                .parse()
                .map_err(|_| CliError::Data(format!("{}:{}: not a number: {field:?}", path.display(), idx + 1)))?;
            samples.push(value);
        }
    }
    Ok(samples)
}

fn fit_exponent(args: FitExponentArgs) -> CliResult {
    require_input(&args.input)?;
    let grid = match args.grid_size {
        0 => CandidateGrid::AllDistinct,
        k => CandidateGrid::LogSpacedTail(k),
    };
    let opts = args.fit.options(grid)?;
    let report = if args.events {
        let log = StreamInput { input: args.input.clone(), strict: false }.read()?;
        let series = replay(&log.events, SnapshotSchedule::default())?;
        powerlaw::fit_degree_histogram(&series.final_snapshot.degree_histogram, &opts)?
    } else {
        fit_exponent_with(&read_samples(&args.input)?, &opts)?
    };
    let (set_min, set_max) = report.alpha_set_range();

    #[derive(Serialize)]
    struct Body<'a> {
        alpha_set_min: f64,
        alpha_set_max: f64,
        #[serde(flatten)]
        report: &'a netgrowth::ExponentFitReport<f64>,
    }
    let body = Body { alpha_set_min: set_min, alpha_set_max: set_max, report: &report };
    let path = output::resolve(args.out.as_deref(), "exponent_fit.json");
    let mut out = OutputSet::new();
    write_output(&mut out, &path, None, output::to_json(&Provenance::new(None), body).as_bytes())?;
    commit(out)
}

fn read_curve_points(path: &Path, min_n: f64) -> CliResult<Vec<CurvePoint<f64>>> {
    let text = fs::read_to_string(path).map_err(io_err(path.display()))?;
    let data_err = |line: usize, msg: String| CliError::Data(format!("{}:{line}: {msg}", path.display()));
    let mut rows = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (header_line, header) = rows.next().ok_or_else(|| data_err(0, "empty file".into()))?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| data_err(header_line + 1, format!("missing column {name:?}")))
    };
    let (n_col, d_col) = (find("n")?, find("avg_degree")?);
    let mut points = Vec::new();
    for (idx, line) in rows {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let value = |col: usize| -> CliResult<f64> {
            let field = fields.get(col).copied().unwrap_or("");
            field.parse().map_err(|_| data_err(idx + 1, format!("not a number: {field:?}")))
        };
        let (n, d) = (value(n_col)?, value(d_col)?);
        if n >= min_n {
            points.push(CurvePoint::new(n, d));
        }
    }
    Ok(points)
}

fn fit_avgdeg(args: FitAvgdegArgs) -> CliResult {
    require_input(&args.input)?;
    let points = read_curve_points(&args.input, args.min_n)?;
    let form = if args.pure_power { CurveForm::PurePower } else { CurveForm::Offset };
    let curve = fit_avg_degree_curve_with(&points, &CurveFitOptions { form, ..CurveFitOptions::default() })?;

    #[derive(Serialize)]
    struct Body {
        form: CurveForm,
        a: f64,
        b: f64,
        c: f64,
        ln_c: f64,
        rmse: f64,
        b_unconstrained: bool,
        iterations: usize,
        points: usize,
    }
    let body = Body {
        form,
        a: curve.a,
        b: curve.b,
        c: curve.c,
        ln_c: curve.ln_c(),
        rmse: curve.rmse,
        b_unconstrained: curve.b_unconstrained,
        iterations: curve.iterations,
        points: points.len(),
    };
    let path = output::resolve(args.out.as_deref(), "avgdeg_fit.json");
    let mut out = OutputSet::new();
    write_output(&mut out, &path, None, output::to_json(&Provenance::new(None), body).as_bytes())?;
    commit(out)
}

fn classify(args: ClassifyArgs) -> CliResult {
    require_input(&args.input.input)?;
    let log = args.input.read()?;
    let series = replay(&log.events, SnapshotSchedule::PowersOfTwo { from: args.from })?;
    let mut body = Vec::new();
    report::write_ratio_csv(&mut body, &series).expect("writing to memory");
    let path = output::resolve(args.out.as_deref(), &format!("{}.ratios.csv", args.input.stem()));
    let mut out = OutputSet::new();
    write_output(&mut out, &path, Some(&Provenance::new(None).comment()), &body)?;
    if series.tagged_events > 0 {
        println!(
            "tag agreement: {} of {} tagged events ({} mismatches)",
            series.tagged_events - series.tag_mismatches,
            series.tagged_events,
            series.tag_mismatches
        );
    }
    commit(out)
}

fn shuffle(args: ShuffleArgs) -> CliResult {
    require_input(&args.input.input)?;
    let log = args.input.read()?;
    let scope = if args.edges_only { ShuffleScope::EdgesOnly } else { ShuffleScope::All };
    let shuffled = EventLog { header: Default::default(), events: shuffle_events(&log.events, args.seed, scope) };
    let path = output::resolve(args.out.as_deref(), &format!("{}.shuffled.tsv", args.input.stem()));
    let mut out = OutputSet::new();
    write_output(&mut out, &path, Some(&Provenance::new(Some(args.seed)).comment()), &tsv_bytes(&shuffled))?;
    commit(out)
}

fn predict(args: PredictArgs) -> CliResult {
    let params = args.params.rate_model(args.model)?;
    if args.from >= 63 || args.n_max < (1u64 << args.from) {
        return Err(CliError::Usage("--n-max must be at least 2^from".into()));
    }
    let curve = models::model_ii_curve_params(&params);
    let nz = models::predicted_nz_fraction(&params);
    let mut body = String::new();
    writeln!(body, "# curve a={} b={} c={}", curve.a, curve.b, curve.c).unwrap();
    writeln!(body, "n,t,avg_degree,fraction_R,fraction_I,fraction_H,nz").unwrap();
    let mut exp = args.from;
    while exp < 63 && (1u64 << exp) <= args.n_max {
        let n = (1u64 << exp) as f64;
        exp += 1;
        if n < params.n0 as f64 {
            continue;
        }
        let t = models::time_at_size(&params, n);
        let fr = models::predicted_edge_fractions_model_ii(&params, t);
        let d = models::predicted_avg_degree_model_ii(&params, n);
        writeln!(body, "{n},{t},{d},{},{},{},{nz}", fr.random, fr.influence, fr.homophily).unwrap();
    }
    let path = output::resolve(args.out.as_deref(), "prediction.csv");
    let mut out = OutputSet::new();
    write_output(&mut out, &path, Some(&Provenance::new(None).comment()), body.as_bytes())?;
    commit(out)
}

/// Rounds to 12 significant digits, removing binary noise such as
/// `0.0020000000000000018` from derived rates.
fn tidy(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn invert(args: InvertArgs) -> CliResult {
    let conv = InversionConventions { total_rate: args.rate, h0: args.h0, r: args.r };
    let params = invert_model_ii(args.a, args.b, args.c, &conv)?;
    let tidy_params = ModelIIParams {
        p: tidy(params.p),
        q: tidy(params.q),
        r: tidy(params.r),
        s: tidy(params.s),
        ..params
    };
    let text = output::to_json(&Provenance::new(None), tidy_params);
    print!("{text}");
    if let Some(path) = &args.out {
        let mut out = OutputSet::new();
        write_output(&mut out, path, None, text.as_bytes())?;
        commit(out)?;
    }
    Ok(())
}

fn reproduce(args: ReproduceArgs) -> CliResult {
    if args.seeds == Some(0) {
        return Err(CliError::Usage("--seeds must be positive".into()));
    }
    let dir = args.out_dir.clone().unwrap_or_else(output::default_dir);
    match args.recipe {
        Recipe::Fig9 | Recipe::Fig10 => {
            let mut cfg = ModelISweepConfig { fit_exponents: args.recipe == Recipe::Fig9, ..Default::default() };
            if let Some(k) = args.seeds {
                cfg.seeds = experiments::seeds(args.base_seed, k);
            } else {
                cfg.seeds = experiments::seeds(args.base_seed, cfg.seeds.len());
            }
            cfg.target_n = args.target.unwrap_or(cfg.target_n);
            cfg.n0 = args.n0.unwrap_or(cfg.n0);
            let rows = model_i_sweep(&cfg)?;
            let provenance = Provenance::new(Some(args.base_seed));
            if args.recipe == Recipe::Fig9 {
                write_fig9(&dir, &provenance, &rows)
            } else {
                write_fig10(&dir, &provenance, &rows)
            }
        }
        Recipe::OccupyFit | Recipe::FacebookFit => {
            let (name, mut cfg) = match args.recipe {
                Recipe::OccupyFit => ("occupy_fit", occupy_tracking()),
                _ => ("facebook_fit", facebook_tracking()),
            };
            if args.n0.is_some() {
                return Err(CliError::Usage("--n0 is fixed by the parameter set of this recipe".into()));
            }
            cfg.seeds = experiments::seeds(args.base_seed, args.seeds.unwrap_or(cfg.seeds.len()));
            cfg.target_n = args.target.unwrap_or(cfg.target_n);
            let report = model_ii_tracking(&cfg)?;
            write_tracking(&dir, name, &Provenance::new(Some(args.base_seed)), &cfg, &report)
        }
    }
}

fn write_fig10(dir: &Path, provenance: &Provenance, rows: &[ModelISweepRow]) -> CliResult {
    let mut body = String::from("s,calculated_b,estimated_b,diff,a,c,rmse\n");
    println!("{:>8} {:>13} {:>12} {:>8}", "s", "calculated_b", "estimated_b", "diff");
    for row in rows {
        let est = &row.estimated;
        let diff = est.b - row.calculated_b;
        writeln!(body, "{},{},{},{},{},{},{}", row.s, row.calculated_b, est.b, diff, est.a, est.c, est.rmse).unwrap();
        println!("{:>8} {:>13.4} {:>12.4} {:>8.4}", row.s, row.calculated_b, est.b, diff);
    }
    let mut out = OutputSet::new();
    write_output(&mut out, &dir.join("fig10.csv"), Some(&provenance.comment()), body.as_bytes())?;
    write_output(&mut out, &dir.join("fig10_avg_degree.csv"), Some(&provenance.comment()), avg_degree_csv(rows).as_bytes())?;
    commit(out)
}

fn avg_degree_csv(rows: &[ModelISweepRow]) -> String {
    let mut body = String::from("s,n,avg_degree,avg_degree_sd,nz,runs\n");
    for row in rows {
        for m in &row.mean {
            writeln!(body, "{},{},{},{},{},{}", row.s, m.n, m.avg_degree, m.avg_degree_sd, m.nz, m.runs).unwrap();
        }
    }
    body
}

fn write_fig9(dir: &Path, provenance: &Provenance, rows: &[ModelISweepRow]) -> CliResult {
    let mut body = String::from("s,n,median_alpha_opt,min_alpha_opt,max_alpha_opt,fitted_runs\n");
    println!("{:>8} {:>8} {:>10}", "s", "n", "median_a");
    for row in rows {
        for a in &row.alpha {
            writeln!(body, "{},{},{},{},{},{}", row.s, a.target_n, a.median, a.min, a.max, a.fitted_runs).unwrap();
            println!("{:>8} {:>8} {:>10.4}", row.s, a.target_n, a.median);
        }
    }
    let mut out = OutputSet::new();
    write_output(&mut out, &dir.join("fig9.csv"), Some(&provenance.comment()), body.as_bytes())?;
    write_output(&mut out, &dir.join("fig9_avg_degree.csv"), Some(&provenance.comment()), avg_degree_csv(rows).as_bytes())?;
    commit(out)
}

fn write_tracking(
    dir: &Path,
    name: &str,
    provenance: &Provenance,
    cfg: &TrackingConfig,
    report: &TrackingReport,
) -> CliResult {
    let mut tracking = String::from("n,simulated_avg_degree,reference_avg_degree,relative_error\n");
    for t in &report.tracking {
        writeln!(tracking, "{},{},{},{}", t.n, t.simulated, t.reference, t.relative_error).unwrap();
    }
    let mut trajectory = String::from("target_n,n,avg_degree,avg_degree_sd,nz,timestamp,median_alpha_opt\n");
    for m in &report.mean {
        let alpha = report.alpha.iter().find(|a| a.target_n == m.target_n).map(|a| a.median.to_string());
        writeln!(
            trajectory,
            "{},{},{},{},{},{},{}",
            m.target_n,
            m.n,
            m.avg_degree,
            m.avg_degree_sd,
            m.nz,
            m.timestamp,
            alpha.unwrap_or_default()
        )
        .unwrap();
    }
    let mut fractions = String::from(
        "target_n,timestamp,fraction_R,predicted_R,fraction_H,predicted_H,window_fraction_R,window_fraction_H\n",
    );
    for f in &report.fractions {
        writeln!(
            fractions,
            "{},{},{},{},{},{},{},{}",
            f.target_n,
            f.timestamp,
            f.random,
            f.predicted_random,
            f.homophily,
            f.predicted_homophily,
            f.window_random,
            f.window_homophily
        )
        .unwrap();
    }

    #[derive(Serialize)]
    struct Summary<'a> {
        params: &'a ModelIIParams<f64>,
        seeds: usize,
        target_n: usize,
        predicted: &'a netgrowth::AvgDegreeCurve64,
        reference: &'a netgrowth::AvgDegreeCurve64,
        refit: &'a netgrowth::AvgDegreeCurve64,
        max_relative_error: f64,
        final_nz: f64,
        predicted_nz: f64,
        skipped_homophily: u64,
        tag_mismatches: u64,
    }
    let max_relative_error = report.tracking.iter().map(|t| t.relative_error.abs()).fold(0.0, f64::max);
    let summary = Summary {
        params: &cfg.params,
        seeds: cfg.seeds.len(),
        target_n: cfg.target_n,
        predicted: &report.predicted,
        reference: &report.reference,
        refit: &report.refit,
        max_relative_error,
        final_nz: report.final_nz,
        predicted_nz: report.predicted_nz,
        skipped_homophily: report.skipped_homophily,
        tag_mismatches: report.tag_mismatches,
    };
    println!(
        "refit a={:.4} b={:.4} c={:.5} (reference a={} b={} c={}); max relative error {:.3}; NZ {:.4} vs {:.4}",
        report.refit.a,
        report.refit.b,
        report.refit.c,
        report.reference.a,
        report.reference.b,
        report.reference.c,
        max_relative_error,
        report.final_nz,
        report.predicted_nz
    );

    let comment = provenance.comment();
    let mut out = OutputSet::new();
    write_output(&mut out, &dir.join(format!("{name}.json")), None, output::to_json(provenance, summary).as_bytes())?;
    write_output(&mut out, &dir.join(format!("{name}_tracking.csv")), Some(&comment), tracking.as_bytes())?;
    write_output(&mut out, &dir.join(format!("{name}_trajectory.csv")), Some(&comment), trajectory.as_bytes())?;
    write_output(&mut out, &dir.join(format!("{name}_fractions.csv")), Some(&comment), fractions.as_bytes())?;
    commit(out)
}
