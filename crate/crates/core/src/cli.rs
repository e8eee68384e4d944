//! Batch command-line interface.
//!
//! Every run writes its CSV artifacts plus `<command>.manifest.json` into
//! `--out-dir`. Each CSV starts with a `# manifest: <file>` line naming that
//! manifest. Output depends only on the inputs and flags, so a repeated run
//! reproduces every byte.
//!
//! Failures print one line to stderr,
//! `error: kind=<kind> code=<code> message="<text>"`, and exit with `code`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::attribution::{
    contributions, portfolio_returns, rolling_attribution, write_reports_csv, MeasureSpec,
    RiskMeasure, RiskReport,
};
use crate::drawdown::mdd_distribution;
use crate::error::CedError;
use crate::optimizer::{
    efficient_frontier, minimize_ced, Constraints, LpStatus, OptResult, ScenarioSet,
};
use crate::portfolio::{
    fixed_mix, risk_parity, ParityOptions, ParitySpec, RebalancePolicy, MONTHLY, QUARTERLY,
};
use crate::riskmeasures::ConfidenceLevel;
use crate::simulation::{
    kappa_risk_correlation, kappa_sweep, regime_switching_ar1, simulate_scenarios,
    two_asset_study, Ar1Params, InitialCondition, ScenarioAsset, SweepConfig, TwoAssetConfig,
};
use crate::timeseries::{load_csv, periods_to_cumulative_path, AssetPanel, PathMode, SeriesKind};

/// Relative `--input` paths are resolved against this directory when set.
pub const DATA_DIR_ENV: &str = "CED_DATA_DIR";

#[derive(Debug, Parser)]
#[command(name = "ced", version, about = "Drawdown risk analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rolling-window maximum drawdowns per asset.
    Mdd(MddArgs),
    /// Volatility, ES and CED per asset and for the weighted portfolio.
    Risk(RiskArgs),
    /// Euler risk contributions, static or rolling.
    Attribute(AttributeArgs),
    /// Minimum-CED portfolio over a scenario set.
    Optimize(OptimizeArgs),
    /// AR(1) Monte-Carlo studies.
    Simulate {
        #[command(subcommand)]
        study: SimulateCommand,
    },
    /// Rolling risk-parity portfolio.
    Parity(ParityArgs),
    /// Fixed-mix portfolio with periodic rebalancing.
    Fixedmix(FixedMixArgs),
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// Vol, ES and CED of one AR(1) series per kappa.
    Sweep(SweepArgs),
    /// Contributions in a two-asset AR(1) portfolio, raw and residual-only.
    TwoAsset(TwoAssetArgs),
    /// Correlation of rolling fitted kappa with rolling risk.
    KappaCorr(KappaCorrArgs),
}

#[derive(Debug, Clone, Args)]
struct Output {
    /// Directory receiving the CSV artifacts and the manifest.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
struct Input {
    /// `date,<asset>...` CSV.
    #[arg(long)]
    input: PathBuf,
    /// Whether the input columns hold prices or period returns.
    #[arg(long, default_value = "prices")]
    kind: SeriesKind,
}

#[derive(Debug, Clone, Args)]
struct MddArgs {
    #[command(flatten)]
    input: Input,
    /// Window length in path points.
    #[arg(long)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    step: usize,
    #[arg(long, default_value = "additive")]
    mode: PathMode,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct RiskArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Drawdown window in path points.
    #[arg(long, default_value_t = 125)]
    window: usize,
    /// Periods per year used to annualize volatility.
    #[arg(long, default_value_t = 252.0)]
    annualization: f64,
    /// Portfolio weights; equal weights when omitted.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct AttributeArgs {
    #[command(flatten)]
    input: Input,
    /// vol, es, ced or all.
    #[arg(long, default_value = "all")]
    measure: String,
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 125)]
    window: usize,
    #[arg(long, default_value_t = 252.0)]
    annualization: f64,
    /// Trailing periods per report; the whole sample when omitted.
    #[arg(long)]
    lookback: Option<usize>,
    /// Periods between rolling reports.
    #[arg(long, default_value_t = 21)]
    step: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct OptimizeArgs {
    /// Scenario CSV `scenario_id,period,<asset>...`.
    #[arg(long, conflicts_with = "simulate")]
    scenarios: Option<PathBuf>,
    /// Generate AR(1) scenarios instead of reading them.
    #[arg(long)]
    simulate: bool,
    /// Simulated asset `kappa:annual_vol:annual_drift`; repeatable.
    #[arg(long = "asset", default_values = ["0.43:0.184:0.06", "0.35:0.055:0.03"])]
    assets: Vec<String>,
    #[arg(long, default_value_t = 50)]
    n_scenarios: usize,
    #[arg(long, default_value_t = 10)]
    periods: usize,
    #[arg(long, default_value_t = 252.0)]
    annualization: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Lower bound on the mean per-period portfolio return.
    #[arg(long, conflicts_with = "frontier")]
    min_return: Option<f64>,
    /// Comma-separated return targets; one optimization per target.
    #[arg(long, value_delimiter = ',')]
    frontier: Option<Vec<f64>>,
    /// Allow negative weights.
    #[arg(long)]
    long_short: bool,
    /// Drop the full-investment constraint.
    #[arg(long)]
    no_budget: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4,0.5")]
    kappas: Vec<f64>,
    /// Innovation standard deviation per period.
    #[arg(long, default_value_t = 0.01)]
    sigma_eps: f64,
    #[arg(long, default_value_t = 10_000)]
    length: usize,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 125)]
    window: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Start from zero and discard this many periods instead of drawing the
    /// first value from the stationary law.
    #[arg(long)]
    burnin: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct TwoAssetArgs {
    #[arg(long, default_value_t = 0.43)]
    kappa_e: f64,
    #[arg(long, default_value_t = 0.35)]
    kappa_b: f64,
    #[arg(long, default_value_t = 0.184)]
    vol_e: f64,
    #[arg(long, default_value_t = 0.055)]
    vol_b: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.6,0.4")]
    weights: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    length: usize,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, default_value_t = 126)]
    window: usize,
    #[arg(long, default_value_t = 252.0)]
    annualization: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    burnin: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct KappaCorrArgs {
    /// Returns CSV to analyse; a regime-switching simulation when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "prices")]
    kind: SeriesKind,
    /// Input column to analyse.
    #[arg(long)]
    column: Option<String>,
    /// Regime kappas of the simulation, cycled in order.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.6")]
    kappas: Vec<f64>,
    #[arg(long, default_value_t = 126)]
    regime_len: usize,
    /// Stationary per-period sd, shared by all regimes.
    #[arg(long, default_value_t = 0.01)]
    sd: f64,
    #[arg(long, default_value_t = 100_000)]
    length: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Returns per rolling block.
    #[arg(long, default_value_t = 126)]
    window: usize,
    /// Drawdown window inside each block, in path points.
    #[arg(long, default_value_t = 21)]
    mdd_window: usize,
    #[arg(long, default_value_t = 21)]
    step: usize,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct ParityArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "vol")]
    measure: RiskMeasure,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Trailing estimation window in years.
    #[arg(long, default_value_t = 3.0)]
    window_years: f64,
    #[arg(long, default_value_t = 252.0)]
    annualization: f64,
    /// monthly, quarterly or a period count.
    #[arg(long, default_value = "monthly")]
    rebalance: String,
    /// Drawdown window for CED, in path points.
    #[arg(long, default_value_t = 125)]
    mdd_window: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Args)]
struct FixedMixArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, value_delimiter = ',')]
    weights: Vec<f64>,
    /// monthly, quarterly or a period count.
    #[arg(long, default_value = "monthly")]
    rebalance: String,
    #[command(flatten)]
    output: Output,
}

/// Failure classes with their exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Io,
    Parse,
    Precondition,
    Solver,
}

impl ErrorKind {
    pub fn code(self) -> i32 {
        match self {
            ErrorKind::Usage => 2,
            ErrorKind::Io => 3,
            ErrorKind::Parse => 4,
            ErrorKind::Precondition => 5,
            ErrorKind::Solver => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::Io => "io",
            ErrorKind::Parse => "parse",
            ErrorKind::Precondition => "precondition",
            ErrorKind::Solver => "solver",
        }
    }
}

#[derive(Debug)]
struct CliError {
    kind: ErrorKind,
    message: String,
}

impl CliError {
    fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }
}

impl From<CedError> for CliError {
    fn from(e: CedError) -> Self {
        let kind = match &e {
            CedError::Io { .. } => ErrorKind::Io,
            CedError::Csv(c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => ErrorKind::Io,
            CedError::Csv(_)
            | CedError::Parse { .. }
            | CedError::NonPositivePrice { .. }
            | CedError::NonFinite { .. }
            | CedError::UnorderedTimestamps { .. } => ErrorKind::Parse,
            CedError::Solver(_) => ErrorKind::Solver,
            _ => ErrorKind::Precondition,
        };
        Self::new(kind, e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Progress goes to `stdout`, the error line to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments")
                .trim_start_matches("error: ");
            return report(stderr, &CliError::new(ErrorKind::Usage, first));
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => report(stderr, &e),
    }
}

fn report(stderr: &mut dyn Write, e: &CliError) -> i32 {
    let message = e.message.replace(['\n', '\r'], " ");
    let _ = writeln!(
        stderr,
        "error: kind={} code={} message={}",
        e.kind.name(),
        e.kind.code(),
        json_string(&message)
    );
    e.kind.code()
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Flat key/value record written next to the artifacts of a run.
struct Manifest {
    command: String,
    entries: Vec<(String, String)>,
    artifacts: Vec<String>,
}

impl Manifest {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            entries: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn file_name(&self) -> String {
        format!("{}.manifest.json", self.command.replace(' ', "-"))
    }

    fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    fn render(&self) -> String {
        let mut lines = vec![
            ("command".to_string(), self.command.clone()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ];
        lines.extend(self.entries.iter().cloned());
        lines.push(("artifacts".to_string(), self.artifacts.join(",")));
        let body: Vec<String> = lines
            .iter()
            .map(|(k, v)| format!("  {}: {}", json_string(k), json_string(v)))
            .collect();
        format!("{{\n{}\n}}\n", body.join(",\n"))
    }
}

fn list<T: ToString>(values: &[T]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Artifacts are rendered in memory and written together with the manifest
/// once the whole command has succeeded.
struct Artifacts {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(
        &mut self,
        manifest: &mut Manifest,
        name: &str,
        body: impl FnOnce(&mut Vec<u8>) -> crate::Result<()>,
    ) -> CliResult<()> {
        let mut buf = format!("# manifest: {}\n", manifest.file_name()).into_bytes();
        body(&mut buf)?;
        manifest.artifacts.push(name.to_string());
        self.files.push((name.to_string(), buf));
        Ok(())
    }

    fn commit(self, manifest: &Manifest, stdout: &mut dyn Write) -> CliResult<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| CedError::io(&self.dir, e))?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = self.dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| CedError::io(&path, e))?;
            written.push(path);
        }
        let path = self.dir.join(manifest.file_name());
        std::fs::write(&path, manifest.render()).map_err(|e| CedError::io(&path, e))?;
        written.push(path);
        for p in written {
            let _ = writeln!(stdout, "wrote {}", p.display());
        }
        Ok(())
    }
}

fn csv_rows(out: &mut Vec<u8>, header: &[String], rows: &[Vec<String>]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| CedError::io("<csv>", e))?;
    Ok(())
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn resolve_input(path: &Path) -> PathBuf {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

struct Loaded {
    panel: AssetPanel,
    columns: Vec<Vec<f64>>,
    path: PathBuf,
    kind: SeriesKind,
}

impl Loaded {
    fn date(&self, period: usize) -> String {
        self.panel.return_dates(self.kind)[period].to_string()
    }

    fn record(&self, m: &mut Manifest) {
        m.set("input", self.path.display())
            .set("kind", kind_name(self.kind))
            .set("assets", self.panel.names.join(","))
            .set("dropped_rows", self.panel.dropped_rows);
    }
}

fn kind_name(kind: SeriesKind) -> &'static str {
    match kind {
        SeriesKind::Prices => "prices",
        SeriesKind::Returns => "returns",
    }
}

fn load(input: &Input) -> CliResult<Loaded> {
    let path = resolve_input(&input.input);
    let panel = load_csv(&path)?;
    let columns = panel
        .period_returns(input.kind)?
        .into_iter()
        .map(|s| s.into_values())
        .collect();
    Ok(Loaded {
        panel,
        columns,
        path,
        kind: input.kind,
    })
}

fn alpha(value: f64) -> CliResult<ConfidenceLevel> {
    Ok(ConfidenceLevel::new(value)?)
}

fn weights_or_equal(weights: Option<Vec<f64>>, n: usize) -> CliResult<Vec<f64>> {
    let w = weights.unwrap_or_else(|| vec![1.0 / n as f64; n]);
    if w.len() != n {
        return Err(CliError::new(
            ErrorKind::Precondition,
            format!("{} weights for {} assets", w.len(), n),
        ));
    }
    Ok(w)
}

fn rebalance_periods(text: &str) -> CliResult<usize> {
    match text {
        "monthly" => Ok(MONTHLY),
        "quarterly" => Ok(QUARTERLY),
        "daily" => Ok(1),
        other => other.parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| {
            CliError::new(
                ErrorKind::Usage,
                format!("rebalance must be monthly, quarterly, daily or a positive count, got `{other}`"),
            )
        }),
    }
}

fn init(burnin: Option<usize>) -> InitialCondition {
    burnin.map_or(InitialCondition::Stationary, InitialCondition::Burnin)
}

fn execute(command: Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Mdd(a) => cmd_mdd(a, stdout),
        Command::Risk(a) => cmd_risk(a, stdout),
        Command::Attribute(a) => cmd_attribute(a, stdout),
        Command::Optimize(a) => cmd_optimize(a, stdout),
        Command::Simulate { study } => match study {
            SimulateCommand::Sweep(a) => cmd_sweep(a, stdout),
            SimulateCommand::TwoAsset(a) => cmd_two_asset(a, stdout),
            SimulateCommand::KappaCorr(a) => cmd_kappa_corr(a, stdout),
        },
        Command::Parity(a) => cmd_parity(a, stdout),
        Command::Fixedmix(a) => cmd_fixedmix(a, stdout),
    }
}

fn cmd_mdd(a: MddArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let data = load(&a.input)?;
    let mut rows = Vec::new();
    for (name, col) in data.panel.names.iter().zip(&data.columns) {
        let series = crate::timeseries::PeriodReturnSeries::new(col.clone())?;
        let path = periods_to_cumulative_path(&series, a.mode)?;
        let sample = mdd_distribution(&path, a.window, a.step)?;
        for w in &sample.windows {
            rows.push(vec![
                name.clone(),
                w.window_start.to_string(),
                w.drawdown.peak_index.to_string(),
                w.drawdown.trough_index.to_string(),
                w.drawdown.value.to_string(),
            ]);
        }
    }
    let mut m = Manifest::new("mdd");
    data.record(&mut m);
    m.set("window", a.window)
        .set("step", a.step)
        .set("mode", match a.mode {
            PathMode::Additive => "additive",
            PathMode::Compound => "compound",
        });
    let mut out = Artifacts::new(&a.output.out_dir);
    let header = strings(&["asset", "window_start", "peak_index", "trough_index", "mdd"]);
    out.add(&mut m, "mdd.csv", |buf| csv_rows(buf, &header, &rows))?;
    out.commit(&m, stdout)
}

fn cmd_risk(a: RiskArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let data = load(&a.input)?;
    let alpha_v = alpha(a.alpha)?;
    let w = weights_or_equal(a.weights, data.columns.len())?;
    let specs = [
        MeasureSpec::Volatility {
            periods_per_year: a.annualization,
        },
        MeasureSpec::ExpectedShortfall { alpha: alpha_v },
        MeasureSpec::Ced {
            alpha: alpha_v,
            window: a.window,
            step: 1,
        },
    ];
    let port = portfolio_returns(&data.columns, &w);
    let mut rows = Vec::new();
    for (name, col) in data
        .panel
        .names
        .iter()
        .chain(std::iter::once(&"portfolio".to_string()))
        .zip(data.columns.iter().chain(std::iter::once(&port)))
    {
        let mut row = vec![name.clone()];
        for spec in &specs {
            row.push(spec.risk(col)?.to_string());
        }
        rows.push(row);
    }
    let header = strings(&["asset", "volatility", "es", "ced"]);
    let _ = writeln!(stdout, "{}", header.join(","));
    for r in &rows {
        let _ = writeln!(stdout, "{}", r.join(","));
    }
    let mut m = Manifest::new("risk");
    data.record(&mut m);
    m.set("alpha", a.alpha)
        .set("window", a.window)
        .set("annualization", a.annualization)
        .set("weights", list(&w));
    let mut out = Artifacts::new(&a.output.out_dir);
    out.add(&mut m, "risk.csv", |buf| csv_rows(buf, &header, &rows))?;
    out.commit(&m, stdout)
}

fn measure_specs(
    measure: &str,
    alpha_v: ConfidenceLevel,
    window: usize,
    annualization: f64,
) -> CliResult<Vec<MeasureSpec>> {
    let measures: Vec<RiskMeasure> = if measure == "all" {
        RiskMeasure::ALL.to_vec()
    } else {
        vec![measure
            .parse()
            .map_err(|e: CedError| CliError::new(ErrorKind::Usage, e.to_string()))?]
    };
    Ok(measures
        .into_iter()
        .map(|m| match m {
            RiskMeasure::Volatility => MeasureSpec::Volatility {
                periods_per_year: annualization,
            },
            RiskMeasure::ExpectedShortfall => MeasureSpec::ExpectedShortfall { alpha: alpha_v },
            RiskMeasure::Ced => MeasureSpec::Ced {
                alpha: alpha_v,
                window,
                step: 1,
            },
        })
        .collect())
}

fn cmd_attribute(a: AttributeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let data = load(&a.input)?;
    let w = weights_or_equal(a.weights, data.columns.len())?;
    let specs = measure_specs(&a.measure, alpha(a.alpha)?, a.window, a.annualization)?;
    let t = data.columns[0].len();
    let mut m = Manifest::new("attribute");
    data.record(&mut m);
    m.set("measure", &a.measure)
        .set("alpha", a.alpha)
        .set("window", a.window)
        .set("annualization", a.annualization)
        .set("weights", list(&w))
        .set(
            "lookback",
            a.lookback.map_or("all".to_string(), |l| l.to_string()),
        )
        .set("step", a.step);
    let mut out = Artifacts::new(&a.output.out_dir);
    for spec in &specs {
        let labelled: Vec<(String, RiskReport)> = match a.lookback {
            None => vec![(data.date(t - 1), contributions(&data.columns, &w, spec)?)],
            Some(lookback) => rolling_attribution(&data.columns, &w, spec, lookback, a.step)?
                .into_iter()
                .map(|d| (data.date(d.end - 1), d.report))
                .collect(),
        };
        let refs: Vec<(String, &RiskReport)> =
            labelled.iter().map(|(d, r)| (d.clone(), r)).collect();
        let name = format!("attribution_{}.csv", spec.measure().tag());
        let names = data.panel.names.clone();
        out.add(&mut m, &name, |buf| write_reports_csv(buf, &names, &refs))?;
    }
    out.commit(&m, stdout)
}

fn parse_asset(spec: &str, annualization: f64) -> CliResult<ScenarioAsset> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Vec<f64> = parts.iter().filter_map(|p| p.trim().parse().ok()).collect();
    if parts.len() != 3 || nums.len() != 3 {
        return Err(CliError::new(
            ErrorKind::Usage,
            format!("asset must be kappa:annual_vol:annual_drift, got `{spec}`"),
        ));
    }
    Ok(ScenarioAsset {
        params: Ar1Params::from_annual_vol(nums[0], nums[1], annualization)?,
        drift: nums[2] / annualization,
    })
}

fn cmd_optimize(a: OptimizeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let alpha_v = alpha(a.alpha)?;
    let mut m = Manifest::new("optimize");
    let mut out = Artifacts::new(&a.output.out_dir);
    let (set, names) = match (&a.scenarios, a.simulate) {
        (Some(path), false) => {
            let path = resolve_input(path);
            let text = std::fs::read_to_string(&path).map_err(|e| CedError::io(&path, e))?;
            m.set("scenarios", path.display());
            ScenarioSet::parse_csv(&text)?
        }
        (None, true) => {
            let assets = a
                .assets
                .iter()
                .map(|s| parse_asset(s, a.annualization))
                .collect::<CliResult<Vec<_>>>()?;
            let set = simulate_scenarios(&assets, a.n_scenarios, a.periods, a.seed)?;
            let names: Vec<String> = (0..assets.len()).map(|i| format!("asset{i}")).collect();
            m.set("simulated_assets", a.assets.join(" "))
                .set("n_scenarios", a.n_scenarios)
                .set("periods", a.periods)
                .set("annualization", a.annualization)
                .set("seed", a.seed);
            out.add(&mut m, "scenarios.csv", |buf| set.write_csv(&mut *buf, &names))?;
            (set, names)
        }
        _ => {
            return Err(CliError::new(
                ErrorKind::Usage,
                "pass exactly one of --scenarios or --simulate",
            ))
        }
    };
    let constraints = Constraints {
        budget: !a.no_budget,
        long_only: !a.long_short,
        min_return: a.min_return,
    };
    m.set("alpha", a.alpha)
        .set("budget", constraints.budget)
        .set("long_only", constraints.long_only)
        .set(
            "min_return",
            a.min_return.map_or("none".to_string(), |v| v.to_string()),
        );
    let results: Vec<(String, OptResult)> = match &a.frontier {
        Some(targets) => {
            m.set("frontier", list(targets));
            let res = efficient_frontier(&set, alpha_v, &constraints, targets)?;
            targets.iter().map(|t| t.to_string()).zip(res).collect()
        }
        None => {
            let res = minimize_ced(&set, alpha_v, &constraints)?;
            if res.status != LpStatus::Optimal {
                return Err(CliError::new(
                    ErrorKind::Solver,
                    format!("linear program ended with status {}", res.status),
                ));
            }
            vec![(
                a.min_return.map_or("none".to_string(), |v| v.to_string()),
                res,
            )]
        }
    };
    let mut header = strings(&["target", "status", "ced", "iterations"]);
    header.extend(names.iter().map(|n| format!("w_{n}")));
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|(target, r)| {
            let mut row = vec![
                target.clone(),
                r.status.to_string(),
                r.objective.to_string(),
                r.iterations.to_string(),
            ];
            if r.status == LpStatus::Optimal {
                row.extend(r.weights.iter().map(|w| w.to_string()));
            } else {
                row.extend(r.weights.iter().map(|_| String::new()));
            }
            row
        })
        .collect();
    out.add(&mut m, "optimize.csv", |buf| csv_rows(buf, &header, &rows))?;
    out.commit(&m, stdout)
}

fn cmd_sweep(a: SweepArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let cfg = SweepConfig {
        sigma_eps: a.sigma_eps,
        length: a.length,
        alpha: alpha(a.alpha)?,
        window: a.window,
        init: init(a.burnin),
    };
    let rows = kappa_sweep(&a.kappas, &cfg, a.seed)?;
    let mut m = Manifest::new("simulate sweep");
    m.set("kappas", list(&a.kappas))
        .set("sigma_eps", a.sigma_eps)
        .set("length", a.length)
        .set("alpha", a.alpha)
        .set("window", a.window)
        .set("seed", a.seed)
        .set("burnin", a.burnin.map_or("none".to_string(), |b| b.to_string()));
    let header = strings(&["kappa", "volatility", "es", "ced"]);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.kappa.to_string(),
                r.volatility.to_string(),
                r.es.to_string(),
                r.ced.to_string(),
            ]
        })
        .collect();
    let mut out = Artifacts::new(&a.output.out_dir);
    out.add(&mut m, "sweep.csv", |buf| csv_rows(buf, &header, &body))?;
    out.commit(&m, stdout)
}

fn cmd_two_asset(a: TwoAssetArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let [w_e, w_b] = a.weights[..] else {
        return Err(CliError::new(ErrorKind::Usage, "two-asset needs exactly two weights"));
    };
    let cfg = TwoAssetConfig {
        kappa_e: a.kappa_e,
        kappa_b: a.kappa_b,
        vol_e: a.vol_e,
        vol_b: a.vol_b,
        weights: [w_e, w_b],
        length: a.length,
        alpha: alpha(a.alpha)?,
        window: a.window,
        periods_per_year: a.annualization,
        init: init(a.burnin),
    };
    let study = two_asset_study(&cfg, a.seed)?;
    let mut m = Manifest::new("simulate two-asset");
    m.set("kappa_e", a.kappa_e)
        .set("kappa_b", a.kappa_b)
        .set("vol_e", a.vol_e)
        .set("vol_b", a.vol_b)
        .set("weights", list(&a.weights))
        .set("length", a.length)
        .set("alpha", a.alpha)
        .set("window", a.window)
        .set("annualization", a.annualization)
        .set("seed", a.seed)
        .set("burnin", a.burnin.map_or("none".to_string(), |b| b.to_string()));
    let header = strings(&["series", "measure", "asset", "weight", "mrc", "rc", "frc"]);
    let mut rows = Vec::new();
    for (series, reports) in [("raw", &study.raw), ("residual", &study.residual)] {
        for r in reports {
            for (asset, c) in ["E", "B"].iter().zip(&r.assets) {
                rows.push(vec![
                    series.to_string(),
                    r.measure.tag().to_string(),
                    asset.to_string(),
                    c.weight.to_string(),
                    c.mrc.to_string(),
                    c.rc.to_string(),
                    c.frc.to_string(),
                ]);
            }
        }
    }
    let fit_header = strings(&["asset", "kappa", "sigma_eps", "std_error"]);
    let fit_rows: Vec<Vec<String>> = ["E", "B"]
        .iter()
        .zip(&study.fits)
        .map(|(n, f)| {
            vec![
                n.to_string(),
                f.kappa.to_string(),
                f.sigma_eps.to_string(),
                f.std_error.to_string(),
            ]
        })
        .collect();
    let mut out = Artifacts::new(&a.output.out_dir);
    out.add(&mut m, "two_asset.csv", |buf| csv_rows(buf, &header, &rows))?;
    out.add(&mut m, "two_asset_fits.csv", |buf| {
        csv_rows(buf, &fit_header, &fit_rows)
    })?;
    out.commit(&m, stdout)
}

fn cmd_kappa_corr(a: KappaCorrArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let mut m = Manifest::new("simulate kappa-corr");
    let series = match &a.input {
        Some(input) => {
            let data = load(&Input {
                input: input.clone(),
                kind: a.kind,
            })?;
            let idx = match &a.column {
                None => 0,
                Some(name) => data
                    .panel
                    .names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| {
                        CliError::new(ErrorKind::Precondition, format!("no column `{name}`"))
                    })?,
            };
            data.record(&mut m);
            m.set("column", &data.panel.names[idx]);
            data.columns[idx].clone()
        }
        None => {
            m.set("kappas", list(&a.kappas))
                .set("regime_len", a.regime_len)
                .set("sd", a.sd)
                .set("length", a.length)
                .set("seed", a.seed);
            regime_switching_ar1(&a.kappas, a.regime_len, a.sd, a.length, a.seed)?
        }
    };
    let c = kappa_risk_correlation(&series, a.window, a.mdd_window, a.step, alpha(a.alpha)?)?;
    m.set("window", a.window)
        .set("mdd_window", a.mdd_window)
        .set("step", a.step)
        .set("alpha", a.alpha);
    let header = strings(&["measure", "correlation", "windows"]);
    let rows: Vec<Vec<String>> = [("vol", c.vol), ("es", c.es), ("ced", c.ced)]
        .iter()
        .map(|(n, v)| vec![n.to_string(), v.to_string(), c.windows.to_string()])
        .collect();
    let mut out = Artifacts::new(&a.output.out_dir);
    out.add(&mut m, "kappa_corr.csv", |buf| csv_rows(buf, &header, &rows))?;
    out.commit(&m, stdout)
}

fn cmd_parity(a: ParityArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let data = load(&a.input)?;
    let alpha_v = alpha(a.alpha)?;
    let spec = measure_specs(a.measure.tag(), alpha_v, a.mdd_window, a.annualization)?[0];
    if !(a.window_years > 0.0) {
        return Err(CliError::new(ErrorKind::Precondition, "window-years must be positive"));
    }
    let parity = ParitySpec {
        measure: spec,
        estimation_window: (a.window_years * a.annualization).round() as usize,
        rebalance: rebalance_periods(&a.rebalance)?,
    };
    let history = risk_parity(&data.columns, &parity, &ParityOptions::default())?;
    let unconverged = history
        .dates
        .iter()
        .filter(|d| !d.solution.converged)
        .count();
    let mut m = Manifest::new("parity");
    data.record(&mut m);
    m.set("measure", a.measure)
        .set("alpha", a.alpha)
        .set("estimation_window", parity.estimation_window)
        .set("rebalance", parity.rebalance)
        .set("mdd_window", a.mdd_window)
        .set("annualization", a.annualization)
        .set("tolerance", ParityOptions::default().tolerance)
        .set("unconverged_dates", unconverged);

    let mut header = strings(&["date", "period", "converged", "fallback", "iterations", "residual"]);
    header.extend(data.panel.names.iter().map(|n| format!("w_{n}")));
    let rows: Vec<Vec<String>> = history
        .dates
        .iter()
        .map(|d| {
            let s = &d.solution;
            let mut row = vec![
                data.date(d.period),
                d.period.to_string(),
                s.converged.to_string(),
                s.fallback.to_string(),
                s.iterations.to_string(),
                s.residual.to_string(),
            ];
            row.extend(s.weights.iter().map(|w| w.to_string()));
            row
        })
        .collect();
    let ret_header = strings(&["date", "return", "nav"]);
    let ret_rows: Vec<Vec<String>> = history
        .portfolio
        .returns
        .iter()
        .zip(&history.portfolio.nav)
        .enumerate()
        .map(|(p, (r, nav))| vec![data.date(history.first + p), r.to_string(), nav.to_string()])
        .collect();
    let mut out = Artifacts::new(&a.output.out_dir);
    out.add(&mut m, "parity_weights.csv", |buf| csv_rows(buf, &header, &rows))?;
    out.add(&mut m, "parity_returns.csv", |buf| {
        csv_rows(buf, &ret_header, &ret_rows)
    })?;
    out.commit(&m, stdout)?;
    if unconverged > 0 {
        let _ = writeln!(
            stdout,
            "warning: {unconverged} rebalance dates did not reach the parity tolerance"
        );
    }
    Ok(())
}

fn cmd_fixedmix(a: FixedMixArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let data = load(&a.input)?;
    let policy = RebalancePolicy::new(a.weights.clone(), rebalance_periods(&a.rebalance)?)?;
    let res = fixed_mix(&data.columns, &policy)?;
    let mut m = Manifest::new("fixedmix");
    data.record(&mut m);
    m.set("weights", list(&a.weights))
        .set("rebalance", policy.frequency());
    let mut header = strings(&["date", "return", "nav"]);
    header.extend(data.panel.names.iter().map(|n| format!("w_{n}")));
    let rows: Vec<Vec<String>> = (0..res.returns.len())
        .map(|t| {
            let mut row = vec![data.date(t), res.returns[t].to_string(), res.nav[t].to_string()];
            row.extend(res.weights[t].iter().map(|w| w.to_string()));
            row
        })
        .collect();
    let mut out = Artifacts::new(&a.output.out_dir);
    out.add(&mut m, "fixedmix.csv", |buf| csv_rows(buf, &header, &rows))?;
    out.commit(&m, stdout)
}
