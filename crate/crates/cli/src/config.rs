//! Experiment configuration: defaults, then the `--config` file, then flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use perc_lab::engine::DEFAULT_CELL_BUDGET;
use perc_lab::estimators::DEFAULT_FIT_MIN_LEVEL;
use perc_lab::witness::WitnessCase;
use perc_lab::{SeqSpec, Windows};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Dims,
    Classify,
    Generate,
    Render,
    Measure,
    Survival,
    Boxdim,
    Witness,
    Sweep,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Dims => "dims",
            Command::Classify => "classify",
            Command::Generate => "generate",
            Command::Render => "render",
            Command::Measure => "measure",
            Command::Survival => "survival",
            Command::Boxdim => "boxdim",
            Command::Witness => "witness",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Pgm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Dims,
    Classify,
    Measure,
    Survival,
    Boxdim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    P,
    A,
    Depth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum CaseArg {
    NonIntegerDimZeroMeasure,
    IntegerDimZeroMeasure,
    PositiveMeasure,
    SghdtUnion,
}

impl From<CaseArg> for WitnessCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::NonIntegerDimZeroMeasure => WitnessCase::NonIntegerDimZeroMeasure,
            CaseArg::IntegerDimZeroMeasure => WitnessCase::IntegerDimZeroMeasure,
            CaseArg::PositiveMeasure => WitnessCase::PositiveMeasure,
            CaseArg::SghdtUnion => WitnessCase::SghdtUnion,
        }
    }
}

/// `lo:hi:count`, `count` evenly spaced points including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.hi } else { self.lo + step * i as f64 }).collect()
    }
}

impl TryFrom<String> for Grid {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || format!("grid must be lo:hi:count, got {s:?}");
        let [lo, hi, count] = parts[..] else { return Err(bad()) };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        if !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(format!("grid needs finite lo <= hi, got {s:?}"));
        }
        if count < 2 {
            return Err(format!("grid count must be >= 2, got {count}"));
        }
        Ok(Grid { lo, hi, count })
    }
}

impl From<Grid> for String {
    fn from(g: Grid) -> String {
        format!("{}:{}:{}", g.lo, g.hi, g.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    pub r: Option<f64>,
    #[serde(default)]
    pub l: f64,
    #[serde(default = "default_case")]
    pub case: CaseArg,
    #[serde(default = "default_terms")]
    pub terms: u32,
    /// Sampling depth of the Monte Carlo cross-check.
    #[serde(default = "default_witness_depth")]
    pub depth: u32,
    /// Run the Monte Carlo measure cross-check with `replicates` replicates.
    #[serde(default)]
    pub estimate: bool,
}

fn default_case() -> CaseArg {
    CaseArg::SghdtUnion
}

fn default_terms() -> u32 {
    8
}

fn default_witness_depth() -> u32 {
    8
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            r: None,
            l: 0.0,
            case: default_case(),
            terms: default_terms(),
            depth: default_witness_depth(),
            estimate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub quantity: Option<Quantity>,
    #[serde(default = "default_param")]
    pub param: SweepParam,
    pub grid: Option<Grid>,
}

fn default_param() -> SweepParam {
    SweepParam::P
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { quantity: None, param: default_param(), grid: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// The fully resolved run description, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub command: Option<Command>,
    pub seq: Option<SeqSpec>,
    pub n: u32,
    pub m: u32,
    pub depth: u32,
    pub seed: u64,
    pub cell_budget: u64,
    pub replicates: Option<usize>,
    pub windows: Windows,
    pub fit_levels: Option<[u32; 2]>,
    /// Level rendered by `render`; defaults to `depth`.
    pub level: Option<u32>,
    pub witness: WitnessConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            command: None,
            seq: None,
            n: 1,
            m: 2,
            depth: 8,
            seed: 0,
            cell_budget: DEFAULT_CELL_BUDGET,
            replicates: None,
            windows: Windows::default(),
            fit_levels: None,
            level: None,
            witness: WitnessConfig::default(),
            sweep: SweepConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

/// Flags; each sets the config field of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Sequence family: mfp, table1_family1, table1_family2, example1, explicit.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Explicit sequence prefix, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub prefix: Option<Vec<f64>>,
    /// Explicit sequence value after the prefix (default: repeat the last value).
    #[arg(long)]
    pub tail: Option<f64>,
    /// Example1 exponents as JSON, e.g. '{"kind":"geometric_gap","a":0.5}'.
    #[arg(long)]
    pub exponents: Option<String>,
    /// Accept sequences that are not non-decreasing.
    #[arg(long)]
    pub lenient: bool,

    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    /// Construction depth K.
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cell_budget: Option<u64>,
    /// Replicates (surviving replicates for boxdim).
    #[arg(long, visible_alias = "replicates")]
    pub reps: Option<usize>,

    /// Window for limits over k, as lo:hi.
    #[arg(long)]
    pub k_window: Option<String>,
    /// Window for the Assouad limsup over t, as lo:hi.
    #[arg(long)]
    pub t_window: Option<String>,
    #[arg(long)]
    pub k_cap: Option<u64>,

    /// Box-count fit levels, as lo:hi.
    #[arg(long)]
    pub fit_levels: Option<String>,
    /// Level to render.
    #[arg(long)]
    pub level: Option<u32>,

    /// Witness target dimension.
    #[arg(long)]
    pub r: Option<f64>,
    /// Witness target measure.
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub case: Option<CaseArg>,
    /// Union terms J for integer dimensions.
    #[arg(long)]
    pub terms: Option<u32>,
    #[arg(long)]
    pub witness_depth: Option<u32>,
    /// Run the witness measure cross-check.
    #[arg(long)]
    pub estimate: bool,

    #[arg(long)]
    pub quantity: Option<Quantity>,
    #[arg(long)]
    pub param: Option<SweepParam>,
    /// Sweep grid lo:hi:count over `--param`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Shorthand for `--param p --grid ...`.
    #[arg(long, conflicts_with_all = ["grid", "a_grid"])]
    pub p_grid: Option<String>,
    /// Shorthand for `--param a --grid ...`.
    #[arg(long, conflicts_with_all = ["grid", "p_grid"])]
    pub a_grid: Option<String>,

    /// Output file; written atomically. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
}

fn set(map: &mut Map<String, Value>, key: &str, v: Option<Value>) {
    if let Some(v) = v {
        map.insert(key.into(), v);
    }
}

fn pair(s: &str, what: &str) -> Result<Value, CliError> {
    let bad = || CliError::Config(format!("{what} must be lo:hi, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
    Ok(json!([lo, hi]))
}

impl Flags {
    /// The flags as a partial config document.
    fn to_value(&self) -> Result<Value, CliError> {
        let mut seq = Map::new();
        set(&mut seq, "kind", self.family.clone().map(Value::from));
        set(&mut seq, "p", self.p.map(Value::from));
        set(&mut seq, "a", self.a.map(Value::from));
        set(&mut seq, "prefix", self.prefix.clone().map(Value::from));
        set(&mut seq, "tail", self.tail.map(Value::from));
        if let Some(e) = &self.exponents {
            let v: Value = serde_json::from_str(e)
                .map_err(|err| CliError::Config(format!("--exponents is not valid JSON: {err}")))?;
            seq.insert("exponents".into(), v);
        }
        if self.lenient {
            seq.insert("strict".into(), Value::Bool(false));
        }

        let mut root = Map::new();
        if !seq.is_empty() {
            root.insert("seq".into(), Value::Object(seq));
        }
        set(&mut root, "n", self.n.map(Value::from));
        set(&mut root, "m", self.m.map(Value::from));
        set(&mut root, "depth", self.depth.map(Value::from));
        set(&mut root, "seed", self.seed.map(Value::from));
        set(&mut root, "cell_budget", self.cell_budget.map(Value::from));
        set(&mut root, "replicates", self.reps.map(Value::from));
        set(&mut root, "level", self.level.map(Value::from));
        if let Some(f) = &self.fit_levels {
            root.insert("fit_levels".into(), pair(f, "--fit-levels")?);
        }

        let mut windows = Map::new();
        if let Some(w) = &self.k_window {
            windows.insert("k".into(), pair(w, "--k-window")?);
        }
        if let Some(w) = &self.t_window {
            windows.insert("t".into(), pair(w, "--t-window")?);
        }
        set(&mut windows, "k_cap", self.k_cap.map(Value::from));
        if !windows.is_empty() {
            root.insert("windows".into(), Value::Object(windows));
        }

        let mut witness = Map::new();
        set(&mut witness, "r", self.r.map(Value::from));
        set(&mut witness, "l", self.l.map(Value::from));
        set(&mut witness, "case", self.case.map(|c| serde_json::to_value(c).expect("enum serializes")));
        set(&mut witness, "terms", self.terms.map(Value::from));
        set(&mut witness, "depth", self.witness_depth.map(Value::from));
        if self.estimate {
            witness.insert("estimate".into(), Value::Bool(true));
        }
        if !witness.is_empty() {
            root.insert("witness".into(), Value::Object(witness));
        }

        let mut sweep = Map::new();
        set(&mut sweep, "quantity", self.quantity.map(|q| serde_json::to_value(q).expect("enum serializes")));
        set(&mut sweep, "param", self.param.map(|p| serde_json::to_value(p).expect("enum serializes")));
        set(&mut sweep, "grid", self.grid.clone().map(Value::from));
        if let Some(g) = &self.p_grid {
            sweep.insert("param".into(), json!("p"));
            sweep.insert("grid".into(), Value::from(g.clone()));
        }
        if let Some(g) = &self.a_grid {
            sweep.insert("param".into(), json!("a"));
            sweep.insert("grid".into(), Value::from(g.clone()));
        }
        if !sweep.is_empty() {
            root.insert("sweep".into(), Value::Object(sweep));
        }

        let mut output = Map::new();
        set(&mut output, "path", self.out.as_ref().map(|p| Value::from(p.to_string_lossy().into_owned())));
        set(&mut output, "format", self.format.map(|f| serde_json::to_value(f).expect("enum serializes")));
        if !output.is_empty() {
            root.insert("output".into(), Value::Object(output));
        }
        Ok(Value::Object(root))
    }
}

/// Recursive object merge; `top` wins. A `seq` in `top` that names a new
/// `kind` replaces the whole sequence.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                let replace_seq =
                    k == "seq" && v.get("kind").is_some() && b.get("seq").and_then(|s| s.get("kind")) != v.get("kind");
                match b.get_mut(&k) {
                    Some(slot) if !replace_seq => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

fn read_config(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
    if !v.is_object() {
        return Err(CliError::Config(format!("config {} must be a JSON object", path.display())));
    }
    Ok(v)
}

/// Resolves defaults ← config file ← flags, then fills command-dependent defaults.
/// `command` is `None` for `run`, which takes it from the file.
pub fn resolve(command: Option<Command>, flags: &Flags) -> Result<Config, CliError> {
    let mut doc = serde_json::to_value(Config::default()).expect("config serializes");
    if let Some(path) = &flags.config {
        merge(&mut doc, read_config(path)?);
    }
    merge(&mut doc, flags.to_value()?);
    if let Some(c) = command {
        doc["command"] = serde_json::to_value(c).expect("enum serializes");
    }
    let mut cfg: Config = serde_json::from_value(doc).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
    let command = cfg.command.ok_or_else(|| CliError::Config("config does not name a command".into()))?;
    cfg.fill_defaults(command);
    cfg.check(command)?;
    Ok(cfg)
}

impl Config {
    pub fn command(&self) -> Command {
        self.command.expect("resolved config names a command")
    }

    fn fill_defaults(&mut self, command: Command) {
        let quantity = (command == Command::Sweep).then_some(self.sweep.quantity).flatten();
        let boxdim = command == Command::Boxdim || quantity == Some(Quantity::Boxdim);
        let sampled = matches!(command, Command::Measure | Command::Survival | Command::Boxdim)
            || (command == Command::Witness && self.witness.estimate)
            || matches!(quantity, Some(Quantity::Measure | Quantity::Survival | Quantity::Boxdim));
        if sampled && self.replicates.is_none() {
            self.replicates = Some(if boxdim { 20 } else { 1000 });
        }
        if boxdim && self.fit_levels.is_none() {
            self.fit_levels = Some([DEFAULT_FIT_MIN_LEVEL, self.depth]);
        }
        if command == Command::Render && self.level.is_none() {
            self.level = Some(self.depth);
        }
        if self.output.format.is_none() {
            self.output.format = Some(match command {
                Command::Render => Format::Pgm,
                Command::Sweep => Format::Csv,
                _ => Format::Json,
            });
        }
    }

    fn check(&self, command: Command) -> Result<(), CliError> {
        let format = self.output.format.expect("filled");
        let allowed: &[Format] = match command {
            Command::Render => &[Format::Pgm],
            Command::Sweep => &[Format::Csv],
            Command::Measure | Command::Survival => &[Format::Json, Format::Csv],
            _ => &[Format::Json],
        };
        if !allowed.contains(&format) {
            return Err(CliError::Config(format!("{} cannot write format {:?}", command.as_str(), format)));
        }
        if format == Format::Pgm && self.output.path.is_none() {
            return Err(CliError::Config("render needs --out".into()));
        }
        if command != Command::Witness && self.seq.is_none() {
            return Err(CliError::Config(format!(
                "{} needs a sequence (--family and its parameters, or `seq` in the config)",
                command.as_str()
            )));
        }
        if command == Command::Witness && self.witness.r.is_none() {
            return Err(CliError::Config("witness needs --r".into()));
        }
        if command == Command::Sweep {
            if self.sweep.quantity.is_none() {
                return Err(CliError::Config("sweep needs --quantity".into()));
            }
            if self.sweep.grid.is_none() {
                return Err(CliError::Config("sweep needs --grid, --p-grid or --a-grid".into()));
            }
        }
        Ok(())
    }
}
