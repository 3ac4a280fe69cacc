//! Command-line front end. The binary is a thin wrapper over [`run`].

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::Error;
use crate::mc::{mc_price, McConfig};
use crate::pricing::{atm_price_asymptotic, price, Flavor, OptionSpec};
use crate::scaling::{a_infinity, scaled_params, AveragingGrid, MarketParams};
use crate::tables::Table;
use crate::variational::{mgf_log_limit, rate_j, VariationalConfig};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "asian-ld", version, about = "Large-deviation pricing of discretely sampled Asian options")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price one option, or a strike sweep.
    Price(PriceArgs),
    /// Regenerate a benchmark table.
    Table(TableArgs),
    /// Evaluate the normalised rate function J(x/S0, rho).
    Rate(RateArgs),
    /// Evaluate the limiting log-MGF of the average.
    Mgf(MgfArgs),
    /// Monte Carlo price next to the asymptotic one.
    Mc(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptType {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptStyle {
    Fixed,
    Floating,
}

/// Scenario fields; flags override values read from `--config`.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub maturity: Option<f64>,
    #[arg(long)]
    pub strike: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Number of fixings (default 250).
    #[arg(long)]
    pub n: Option<usize>,
    /// Fixing interval (default maturity / n).
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "type", value_enum)]
    #[serde(rename = "type")]
    pub kind: Option<OptType>,
    #[arg(long, value_enum)]
    pub style: Option<OptStyle>,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON file with scenario fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Strike (or kappa) sweep `lo:hi:steps`.
    #[arg(long)]
    pub sweep: Option<Sweep>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(value_parser = ["fmw7", "smallvol", "discrete"])]
    pub name: String,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long)]
    pub x_ratio: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
    /// Also report I = J / (2 beta).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Sweep of x/S0, `lo:hi:steps`.
    #[arg(long)]
    pub sweep: Option<Sweep>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct MgfArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub s0: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: f64,
    /// Sweep of theta, `lo:hi:steps`.
    #[arg(long, allow_hyphen_values = true)]
    pub sweep: Option<Sweep>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = McConfig::default().seed)]
    pub seed: u64,
    /// Disable antithetic pairing.
    #[arg(long)]
    pub plain: bool,
    #[command(flatten)]
    pub common: Common,
}

/// Inclusive grid `lo:hi:steps` with `steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl std::str::FromStr for Sweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected lo:hi:steps, got {s:?}"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
        let steps = parts[2].trim().parse::<usize>().map_err(|e| format!("{:?}: {e}", parts[2]))?;
        if steps == 0 {
            return Err("steps must be at least 1".into());
        }
        Ok(Sweep { lo: num(parts[0])?, hi: num(parts[1])?, steps })
    }
}

impl Sweep {
    pub fn points(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / self.steps as f64)
            .collect()
    }
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Convergence(_) => EXIT_CONVERGENCE,
            Error::Domain(_) | Error::Regime(_) => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, message: msg.into() }
}

/// A resolved pricing input.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub market: MarketParams,
    pub grid: AveragingGrid,
    pub spec: OptionSpec,
}

impl ScenarioArgs {
    fn overlay(self, base: ScenarioArgs) -> ScenarioArgs {
        ScenarioArgs {
            s0: self.s0.or(base.s0),
            r: self.r.or(base.r),
            q: self.q.or(base.q),
            sigma: self.sigma.or(base.sigma),
            maturity: self.maturity.or(base.maturity),
            strike: self.strike.or(base.strike),
            kappa: self.kappa.or(base.kappa),
            n: self.n.or(base.n),
            tau: self.tau.or(base.tau),
            kind: self.kind.or(base.kind),
            style: self.style.or(base.style),
        }
    }

    fn load(self, config: Option<&PathBuf>) -> Result<ScenarioArgs, CliError> {
        match config {
            None => Ok(self),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
                let base: ScenarioArgs = serde_json::from_str(&text)
                    .map_err(|e| usage(format!("bad config {}: {e}", path.display())))?;
                Ok(self.overlay(base))
            }
        }
    }

    /// Fills defaults and validates. `level` overrides the strike or kappa.
    pub fn resolve(&self, level: Option<f64>) -> Result<Scenario, CliError> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| usage(format!("missing --{name}")));
        let market = MarketParams::new(
            need(self.s0, "s0")?,
            self.r.unwrap_or(0.0),
            self.q.unwrap_or(0.0),
            need(self.sigma, "sigma")?,
        )?;
        let n = self.n.unwrap_or(250);
        let grid = match (self.tau, self.maturity) {
            (Some(tau), None) => AveragingGrid::new(n, tau)?,
            (None, Some(t)) => AveragingGrid::from_maturity(n, t)?,
            (Some(tau), Some(t)) => {
                if (tau * n as f64 - t).abs() > 1e-12 * t.max(1.0) {
                    return Err(usage(format!("--tau {tau} with --n {n} does not give --maturity {t}")));
                }
                AveragingGrid::new(n, tau)?
            }
            (None, None) => return Err(usage("give --maturity or --tau")),
        };
        let flavor = match self.kind.unwrap_or(OptType::Call) {
            OptType::Call => Flavor::Call,
            OptType::Put => Flavor::Put,
        };
        let spec = match self.style.unwrap_or(OptStyle::Fixed) {
            OptStyle::Fixed => {
                if self.kappa.is_some() {
                    return Err(usage("--kappa applies to floating-strike options"));
                }
                OptionSpec::fixed(flavor, level.or(self.strike).ok_or_else(|| usage("missing --strike"))?)
            }
            OptStyle::Floating => {
                if self.strike.is_some() {
                    return Err(usage("--strike applies to fixed-strike options"));
                }
                OptionSpec::floating(flavor, level.or(self.kappa).ok_or_else(|| usage("missing --kappa"))?)
            }
        };
        Ok(Scenario { market, grid, spec })
    }
}

/// One output cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:?}"),
            Cell::Int(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) if x.is_finite() => serde_json::json!(x),
            Cell::Num(x) => serde_json::Value::String(format!("{x}")),
            Cell::Int(x) => serde_json::json!(x),
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

pub type Record = Vec<(&'static str, Cell)>;

/// CSV with a header row, or one JSON object per line.
pub fn render(records: &[Record], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            if let Some(first) = records.first() {
                let header: Vec<&str> = first.iter().map(|(k, _)| *k).collect();
                let _ = writeln!(out, "{}", header.join(","));
            }
            for r in records {
                let row: Vec<String> = r.iter().map(|(_, c)| c.csv()).collect();
                let _ = writeln!(out, "{}", row.join(","));
            }
        }
        Format::Json => {
            for r in records {
                let obj: serde_json::Map<String, serde_json::Value> =
                    r.iter().map(|(k, c)| (k.to_string(), c.json())).collect();
                let _ = writeln!(out, "{}", serde_json::Value::Object(obj));
            }
        }
    }
    out
}

fn opt(x: Option<f64>) -> Cell {
    x.map(Cell::Num).unwrap_or(Cell::Empty)
}

fn scenario_cells(s: &Scenario) -> Record {
    let sp = scaled_params(&s.market, &s.grid);
    vec![
        ("s0", Cell::Num(s.market.spot)),
        ("r", Cell::Num(s.market.rate)),
        ("q", Cell::Num(s.market.dividend)),
        ("sigma", Cell::Num(s.market.sigma)),
        ("maturity", Cell::Num(s.grid.maturity())),
        ("n", Cell::Int(s.grid.n as u64)),
        ("tau", Cell::Num(s.grid.tau)),
        ("style", Cell::Text(if s.spec.kappa().is_some() { "floating" } else { "fixed" }.into())),
        ("type", Cell::Text(match s.spec.flavor { Flavor::Call => "call", Flavor::Put => "put" }.into())),
        ("strike", opt(s.spec.strike())),
        ("kappa", opt(s.spec.kappa())),
        ("beta", Cell::Num(sp.beta)),
        ("rho", Cell::Num(sp.rho)),
    ]
}

fn price_cmd(args: PriceArgs) -> Result<Vec<Record>, CliError> {
    let scenario = args.scenario.load(args.common.config.as_ref())?;
    let levels: Vec<Option<f64>> = match args.sweep {
        Some(s) => s.points().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let mut out = Vec::new();
    for level in levels {
        let s = scenario.resolve(level)?;
        let res = price(&s.spec, &s.market, &s.grid)?;
        let mut rec = scenario_cells(&s);
        rec.extend([
            ("regime", Cell::Text(res.regime.to_string())),
            ("sigma_ln", Cell::Num(res.implied_ln_vol)),
            ("sigma_n", Cell::Num(res.implied_n_vol)),
            ("price", Cell::Num(res.price)),
            ("decay_rate", opt(res.decay_rate)),
        ]);
        out.push(rec);
    }
    Ok(out)
}

fn table_cmd(args: TableArgs) -> Result<Vec<Record>, CliError> {
    let table = Table::parse(&args.name).ok_or_else(|| usage(format!("unknown table {}", args.name)))?;
    let mut out = Vec::new();
    for case in table.cases() {
        let res = case.price()?;
        out.push(vec![
            ("scenario", Cell::Text(case.label.into())),
            ("r", Cell::Num(case.rate)),
            ("maturity", Cell::Num(case.maturity)),
            ("s0", Cell::Num(case.spot)),
            ("strike", Cell::Num(case.strike)),
            ("sigma", Cell::Num(case.sigma)),
            ("n", Cell::Int(case.n as u64)),
            ("regime", Cell::Text(res.regime.to_string())),
            ("sigma_ln", Cell::Num(res.implied_ln_vol)),
            ("price", Cell::Num(res.price)),
            ("published", Cell::Num(case.reference)),
            ("abs_err", Cell::Num((res.price - case.reference).abs())),
            ("comparison", opt(case.comparison)),
        ]);
    }
    Ok(out)
}

fn rate_cmd(args: RateArgs) -> Result<Vec<Record>, CliError> {
    let xs = match (args.x_ratio, args.sweep) {
        (Some(x), None) => vec![x],
        (None, Some(s)) => s.points(),
        _ => return Err(usage("give exactly one of --x-ratio or --sweep")),
    };
    let mut out = Vec::new();
    for x in xs {
        let v = rate_j(x, args.rho, &VariationalConfig::default())?;
        let mut rec: Record = vec![
            ("x_ratio", Cell::Num(x)),
            ("rho", Cell::Num(args.rho)),
            ("j", Cell::Num(v.value)),
            ("branch", Cell::Text(v.branch.to_string())),
            ("root", Cell::Num(v.root)),
            ("residual", Cell::Num(v.residual)),
        ];
        if let Some(beta) = args.beta {
            if !(beta > 0.0) {
                return Err(usage("--beta must be positive"));
            }
            rec.push(("i", Cell::Num(v.value / (2.0 * beta))));
        }
        out.push(rec);
    }
    Ok(out)
}

fn mgf_cmd(args: MgfArgs) -> Result<Vec<Record>, CliError> {
    let thetas = match (args.theta, args.sweep) {
        (Some(t), None) => vec![t],
        (None, Some(s)) => s.points(),
        _ => return Err(usage("give exactly one of --theta or --sweep")),
    };
    let mut out = Vec::new();
    for theta in thetas {
        let v = mgf_log_limit(theta, args.s0, args.beta, args.rho)?;
        out.push(vec![
            ("theta", Cell::Num(theta)),
            ("s0", Cell::Num(args.s0)),
            ("beta", Cell::Num(args.beta)),
            ("rho", Cell::Num(args.rho)),
            ("lambda", Cell::Num(v)),
        ]);
    }
    Ok(out)
}

fn mc_cmd(args: McArgs) -> Result<Vec<Record>, CliError> {
    let s = args.scenario.load(args.common.config.as_ref())?.resolve(None)?;
    let cfg = McConfig {
        paths: args.paths,
        seed: args.seed,
        antithetic: !args.plain,
        ..McConfig::default()
    };
    let est = mc_price(&s.spec, &s.market, &s.grid, &cfg)?;
    let asymptotic = price(&s.spec, &s.market, &s.grid)?;
    let mut rec = scenario_cells(&s);
    rec.extend([
        ("mc_price", Cell::Num(est.mean)),
        ("mc_stderr", Cell::Num(est.stderr)),
        ("paths", Cell::Int(est.paths as u64)),
        ("seed", Cell::Int(args.seed)),
        ("elapsed", Cell::Num(est.elapsed)),
        ("price", Cell::Num(asymptotic.price)),
        ("regime", Cell::Text(asymptotic.regime.to_string())),
    ]);
    if let Some(k) = s.spec.strike() {
        let rho = scaled_params(&s.market, &s.grid).rho;
        if (k / a_infinity(s.market.spot, rho)).ln().abs() < crate::pricing::ATM_LOG_THRESHOLD {
            rec.push(("atm_asymptotic", Cell::Num(atm_price_asymptotic(&s.market, &s.grid, s.spec.flavor))));
        }
    }
    Ok(vec![rec])
}

/// Executes a parsed command and returns its rendered output.
pub fn execute(cli: Cli) -> Result<String, CliError> {
    let (records, format) = match cli.command {
        Command::Price(a) => {
            let f = a.common.format;
            (price_cmd(a)?, f)
        }
        Command::Table(a) => {
            let f = a.format;
            (table_cmd(a)?, f)
        }
        Command::Rate(a) => {
            let f = a.format;
            (rate_cmd(a)?, f)
        }
        Command::Mgf(a) => {
            let f = a.format;
            (mgf_cmd(a)?, f)
        }
        Command::Mc(a) => {
            let f = a.common.format;
            (mc_cmd(a)?, f)
        }
    };
    Ok(render(&records, format))
}

/// Parses `args`, runs, prints and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // through the print macros so test capture sees it
            if e.use_stderr() {
                eprint!("{e}");
                return EXIT_USAGE;
            }
            print!("{e}");
            return 0;
        }
    };
    match execute(cli) {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Result<String, CliError> {
        let mut full = vec!["asian-ld"];
        full.extend_from_slice(args);
        execute(Cli::try_parse_from(full).map_err(|e| usage(e.to_string()))?)
    }

    #[test]
    fn sweep_parsing() {
        let s: Sweep = "0.5:1.5:4".parse().unwrap();
        assert_eq!(s.points(), vec![0.5, 0.75, 1.0, 1.25, 1.5]);
        assert!("1:2".parse::<Sweep>().is_err());
        assert!("1:2:0".parse::<Sweep>().is_err());
    }

    #[test]
    fn price_scenario_one_csv() {
        let out = exec(&["price", "--s0", "2", "--r", "0.02", "--sigma", "0.1", "--maturity", "1", "--strike", "2"]).unwrap();
        let mut lines = out.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
        assert_eq!(col("regime"), "ITM");
        assert_eq!(col("n"), "250");
        let p: f64 = col("price").parse().unwrap();
        assert!((p - 0.05599).abs() < 1e-5);
        assert_eq!(col("decay_rate"), "");
    }

    #[test]
    fn json_records_and_infinity() {
        let out = exec(&["mgf", "--theta", "0.5", "--beta", "0.5", "--rho", "0", "--format", "json"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["lambda"], "inf");
        let out = exec(&["mgf", "--sweep", "-1:0:2", "--beta", "0.5", "--rho", "0"]).unwrap();
        assert_eq!(out.lines().count(), 4);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exec(&["rate", "--x-ratio", "-1", "--rho", "0"]).unwrap_err().code, EXIT_USAGE);
        assert_eq!(exec(&["price", "--s0", "1", "--sigma", "0.2"]).unwrap_err().code, EXIT_USAGE);
        assert_eq!(run(["asian-ld", "bogus"]), EXIT_USAGE);
        assert_eq!(
            exec(&["price", "--s0", "1", "--sigma", "0.2", "--maturity", "1", "--kappa", "1"]).unwrap_err().code,
            EXIT_USAGE
        );
    }

    #[test]
    fn table_rows() {
        let out = exec(&["table", "smallvol"]).unwrap();
        assert_eq!(out.lines().count(), 10);
    }

    #[test]
    fn config_overlay() {
        let dir = std::env::temp_dir().join(format!("asian-ld-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.json");
        std::fs::write(&path, r#"{"s0": 2, "r": 0.02, "sigma": 0.1, "maturity": 1, "strike": 2.5}"#).unwrap();
        let p = path.to_str().unwrap();
        let a = exec(&["price", "--config", p, "--format", "json"]).unwrap();
        let b = exec(&["price", "--config", p, "--strike", "2", "--format", "json"]).unwrap();
        let a: serde_json::Value = serde_json::from_str(a.trim()).unwrap();
        let b: serde_json::Value = serde_json::from_str(b.trim()).unwrap();
        assert_eq!(a["strike"], 2.5);
        assert_eq!(a["regime"], "OTM");
        assert_eq!(b["strike"], 2.0);
        std::fs::write(&path, r#"{"s0": 2, "spot": 3}"#).unwrap();
        assert_eq!(exec(&["price", "--config", p]).unwrap_err().code, EXIT_USAGE);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn floating_price_and_mc() {
        let out = exec(&[
            "mc", "--s0", "1", "--sigma", "0.2", "--tau", "0.01", "--n", "100", "--style", "floating",
            "--kappa", "1", "--paths", "2000", "--format", "json",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["regime"], "ATM");
        assert_eq!(v["paths"], 2000);
    }
}
