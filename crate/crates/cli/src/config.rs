use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qubit_capacity::{ChannelSpec, Family, ParamFamily, ShannonMode, SqueezedShift};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Capacity,
    Vertical,
    Horizontal,
    Shannon,
    Crossing,
    Ellipse,
    Reproduce,
    CheckCp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Tolerance classes used by `reproduce`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub value: f64,
    pub coord: f64,
    pub prob: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            value: 5e-5,
            coord: 5e-3,
            prob: 5e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budget {
    /// Objective evaluations per local simplex search.
    pub max_evals: Option<usize>,
    pub random_starts: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CrossingFamily {
    Stretched,
    Squeezed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingSpec {
    pub family: CrossingFamily,
    pub mu: f64,
    #[serde(default)]
    pub lo: Option<f64>,
    #[serde(default)]
    pub hi: Option<f64>,
    #[serde(default = "default_crossing_tol")]
    pub tol: f64,
    #[serde(default)]
    pub shift_convention: SqueezedShift,
}

fn default_crossing_tol() -> f64 {
    1e-7
}

impl CrossingSpec {
    pub fn family(&self) -> ParamFamily {
        match self.family {
            CrossingFamily::Stretched => ParamFamily::Stretched { mu: self.mu },
            CrossingFamily::Squeezed => ParamFamily::Squeezed {
                mu: self.mu,
                convention: self.shift_convention,
            },
        }
    }

    /// The bracket, defaulting to the whole admissible parameter window.
    pub fn bracket(&self) -> (f64, f64) {
        let (lo, hi) = match self.family {
            CrossingFamily::Stretched => (self.mu, self.mu.sqrt()),
            CrossingFamily::Squeezed => (0.0, self.mu),
        };
        (self.lo.unwrap_or(lo), self.hi.unwrap_or(hi))
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// One invocation, as read from `--config` or assembled from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    #[serde(default)]
    pub channel: Option<ChannelSpec>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub crossing: Option<CrossingSpec>,
    #[serde(default)]
    pub shannon_mode: ShannonMode,
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        RunConfig {
            task,
            channel: None,
            seed: DEFAULT_SEED,
            format: None,
            out: None,
            tolerances: Tolerances::default(),
            budget: Budget::default(),
            samples: None,
            crossing: None,
            shannon_mode: ShannonMode::default(),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(match self.task {
            Task::Ellipse => Format::Csv,
            _ => Format::Json,
        })
    }

    pub fn channel_spec(&self) -> Result<&ChannelSpec, CliError> {
        self.channel
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("task {:?} needs a channel", self.task)))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qcap",
    version,
    about = "Classical capacities of qubit channels in Bloch form"
)]
pub struct Cli {
    #[command(subcommand)]
    pub task: Option<Command>,

    /// Read the run configuration from a JSON file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Objective evaluations allowed per local search.
    #[arg(long, global = true)]
    pub max_evals: Option<usize>,
    #[arg(long, global = true)]
    pub random_starts: Option<usize>,
    #[arg(long, global = true)]
    pub value_tol: Option<f64>,
    #[arg(long, global = true)]
    pub coord_tol: Option<f64>,
    #[arg(long, global = true)]
    pub prob_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Holevo capacity over ensembles of up to four states.
    Capacity(ChannelArgs),
    /// Capacity restricted to the vertical line through the poles.
    Vertical(ChannelArgs),
    /// Capacity restricted to equiprobable horizontal pairs.
    Horizontal(ChannelArgs),
    /// Single-letter Shannon capacity.
    Shannon {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Search three inputs with a three-outcome POVM instead.
        #[arg(long)]
        trine: bool,
    },
    /// Parameter where the vertical and horizontal capacities meet.
    Crossing(CrossingArgs),
    /// Image of the x-z great circle and of the optimal ensemble.
    Ellipse {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Recompute every published value and compare.
    Reproduce,
    /// Choi-matrix test for complete positivity.
    CheckCp(ChannelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Identity,
    #[value(alias = "depolarizing")]
    ShiftedDepolarizing,
    AmplitudeDamping,
    Stretched,
    Squeezed,
    Qc,
    Cq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShiftName {
    OneMinusMu,
    NorthPoleFixed,
}

impl From<ShiftName> for SqueezedShift {
    fn from(s: ShiftName) -> Self {
        match s {
            ShiftName::OneMinusMu => SqueezedShift::OneMinusMu,
            ShiftName::NorthPoleFixed => SqueezedShift::NorthPoleFixed,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ChannelArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub t2: Option<f64>,
    #[arg(long)]
    pub t3: Option<f64>,
    /// Diagonal of Λ, as l1,l2,l3.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    /// Shift vector, as t1,t2,t3.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub shift: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub squeeze_shift: Option<ShiftName>,
}

#[derive(Debug, Clone, Args)]
pub struct CrossingArgs {
    #[arg(long, value_enum)]
    pub family: CrossingFamily,
    #[arg(long)]
    pub mu: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hi: Option<f64>,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub squeeze_shift: Option<ShiftName>,
}

fn need(name: &str, v: Option<f64>) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Config(format!("--{name} is required for this family")))
}

fn triple(name: &str, v: &[f64]) -> Result<[f64; 3], CliError> {
    v.try_into()
        .map_err(|_| CliError::Config(format!("--{name} takes exactly three values")))
}

impl ChannelArgs {
    pub fn spec(&self) -> Result<ChannelSpec, CliError> {
        if let Some(family) = self.family {
            if self.lambda.is_some() || self.shift.is_some() {
                return Err(CliError::Config(
                    "--family cannot be combined with --lambda/--shift".into(),
                ));
            }
            let f = match family {
                FamilyName::Identity => Family::Identity,
                FamilyName::ShiftedDepolarizing => Family::ShiftedDepolarizing {
                    mu: need("mu", self.mu)?,
                },
                FamilyName::AmplitudeDamping => Family::AmplitudeDamping {
                    mu: need("mu", self.mu)?,
                },
                FamilyName::Stretched => Family::Stretched {
                    mu: need("mu", self.mu)?,
                    s: need("s", self.s)?,
                },
                FamilyName::Squeezed => Family::Squeezed {
                    mu: need("mu", self.mu)?,
                    q: need("q", self.q)?,
                    shift_convention: self.squeeze_shift.map(Into::into).unwrap_or_default(),
                },
                FamilyName::Qc => Family::Qc {
                    t3: need("t3", self.t3)?,
                    mu: need("mu", self.mu)?,
                },
                FamilyName::Cq => Family::Cq {
                    t1: need("t1", self.t1)?,
                    t2: need("t2", self.t2)?,
                    t3: need("t3", self.t3)?,
                    mu: need("mu", self.mu)?,
                },
            };
            return Ok(ChannelSpec::Family(f));
        }
        match (&self.lambda, &self.shift) {
            (Some(l), s) => Ok(ChannelSpec::Raw {
                lambda: triple("lambda", l)?,
                shift: match s {
                    Some(s) => triple("shift", s)?,
                    None => [0.0; 3],
                },
            }),
            (None, _) => Err(CliError::Config(
                "give either --family or --lambda [--shift]".into(),
            )),
        }
    }
}

impl CrossingArgs {
    fn spec(&self) -> CrossingSpec {
        CrossingSpec {
            family: self.family,
            mu: self.mu,
            lo: self.lo,
            hi: self.hi,
            tol: self.tol,
            shift_convention: self.squeeze_shift.map(Into::into).unwrap_or_default(),
        }
    }
}

impl Cli {
    /// Merges the config file (if any), the subcommand and the global flags.
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, &self.task) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either --config or a task, not both".into(),
                ));
            }
            (Some(path), None) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            (None, None) => return Err(CliError::Config("no task given; see --help".into())),
            (None, Some(cmd)) => from_command(cmd)?,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.format.is_some() {
            cfg.format = self.format;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.max_evals.is_some() {
            cfg.budget.max_evals = self.max_evals;
        }
        if self.random_starts.is_some() {
            cfg.budget.random_starts = self.random_starts;
        }
        if let Some(v) = self.value_tol {
            cfg.tolerances.value = v;
        }
        if let Some(v) = self.coord_tol {
            cfg.tolerances.coord = v;
        }
        if let Some(v) = self.prob_tol {
            cfg.tolerances.prob = v;
        }
        validate(&cfg)?;
        Ok(cfg)
    }
}

fn from_command(cmd: &Command) -> Result<RunConfig, CliError> {
    let with_channel = |task, args: &ChannelArgs| -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::new(task);
        cfg.channel = Some(args.spec()?);
        Ok(cfg)
    };
    Ok(match cmd {
        Command::Capacity(a) => with_channel(Task::Capacity, a)?,
        Command::Vertical(a) => with_channel(Task::Vertical, a)?,
        Command::Horizontal(a) => with_channel(Task::Horizontal, a)?,
        Command::CheckCp(a) => with_channel(Task::CheckCp, a)?,
        Command::Shannon { channel, trine } => {
            let mut cfg = with_channel(Task::Shannon, channel)?;
            if *trine {
                cfg.shannon_mode = ShannonMode::Trine;
            }
            cfg
        }
        Command::Ellipse { channel, samples } => {
            let mut cfg = with_channel(Task::Ellipse, channel)?;
            cfg.samples = Some(*samples);
            cfg
        }
        Command::Crossing(a) => {
            let mut cfg = RunConfig::new(Task::Crossing);
            cfg.crossing = Some(a.spec());
            cfg
        }
        Command::Reproduce => RunConfig::new(Task::Reproduce),
    })
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let t = &cfg.tolerances;
    if [t.value, t.coord, t.prob]
        .iter()
        .any(|v| !v.is_finite() || *v < 0.0)
    {
        return Err(CliError::Config(
            "tolerances must be finite and nonnegative".into(),
        ));
    }
    if cfg.budget.max_evals == Some(0) {
        return Err(CliError::Config("--max-evals must be positive".into()));
    }
    match cfg.task {
        Task::Crossing => {
            let c = cfg.crossing.as_ref().ok_or_else(|| {
                CliError::Config("crossing task needs a \"crossing\" section".into())
            })?;
            let (lo, hi) = c.bracket();
            if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less)
                || c.tol.is_nan()
                || c.tol <= 0.0
            {
                return Err(CliError::Config(format!(
                    "bad crossing bracket [{lo}, {hi}] or tolerance {}",
                    c.tol
                )));
            }
        }
        Task::Reproduce => {}
        Task::Ellipse => {
            cfg.channel_spec()?;
            if cfg.samples.unwrap_or(64) < 16 {
                return Err(CliError::Config("ellipse needs at least 16 samples".into()));
            }
        }
        _ => {
            cfg.channel_spec()?;
        }
    }
    Ok(())
}
