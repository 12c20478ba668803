use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use weaklab_core::limits::Metric;

/// CLI preset name and the bundled scenario it loads.
pub const PRESETS: [(&str, &str); 6] = [
    ("spin-sz", "spin_sz"),
    ("spin-splus-sminus", "spin_splus_sminus"),
    ("spin-flipped", "spin_flipped"),
    ("eigenvalue-zero", "eigenvalue_zero"),
    ("nested-mzi", "nested_mzi_presence"),
    ("compare-limits", "compare_limits_demo"),
];

pub fn preset_scenario(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(cli, _)| *cli == name).map(|(_, corpus)| *corpus)
}

#[derive(Debug, Parser)]
#[command(name = "weaklab", version, about = "Weak values, weak limits and weak traces of pre- and post-selected systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment on a scenario file or a bundled preset.
    Run {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Analytic weak value and the pointer-based estimate.
    Weakvalue {
        #[command(flatten)]
        input: Input,
        /// Operator to measure; defaults to the scenario's observable.
        #[arg(long)]
        observable: Option<String>,
    },
    /// A g -> 0 metric over a g range, with its fitted order.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        observable: Option<String>,
        /// Defaults to the scenario's metric, else continuity.
        #[arg(long, value_enum)]
        metric: Option<MetricArg>,
    },
    /// Per-arm weak traces over a g range.
    Trace {
        #[command(flatten)]
        input: Input,
        /// Comma-separated arm labels; defaults to the scenario's arms.
        #[arg(long, value_delimiter = ',')]
        arms: Option<Vec<String>>,
    },
    /// Primary / secondary presence of each arm.
    Presence {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',')]
        arms: Option<Vec<String>>,
    },
    /// Weak value along the g -> 0 and spread -> infinity routes.
    CompareLimits {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        observable: Option<String>,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Weakvalue { .. } => "weakvalue",
            Experiment::Sweep { .. } => "sweep",
            Experiment::Trace { .. } => "trace",
            Experiment::Presence { .. } => "presence",
            Experiment::CompareLimits { .. } => "compare-limits",
        }
    }

    pub fn input(&self) -> &Input {
        match self {
            Experiment::Weakvalue { input, .. }
            | Experiment::Sweep { input, .. }
            | Experiment::Trace { input, .. }
            | Experiment::Presence { input, .. }
            | Experiment::CompareLimits { input, .. } => input,
        }
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["file", "preset"])))]
pub struct Input {
    /// Scenario file (`.scn`).
    pub file: Option<PathBuf>,
    /// Bundled scenario to run instead of a file.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS.map(|(cli, _)| cli)))]
    pub preset: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub g_min: Option<f64>,
    #[arg(long)]
    pub g_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Input {
    pub fn overrides_range(&self) -> bool {
        self.g_min.is_some() || self.g_max.is_some() || self.points.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Continuity,
    Derail,
    FirstOrderResidual,
    OverlapDeficit,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Continuity => Metric::Continuity,
            MetricArg::Derail => Metric::Derail,
            MetricArg::FirstOrderResidual => Metric::FirstOrderResidual,
            MetricArg::OverlapDeficit => Metric::OverlapDeficit,
        }
    }
}
