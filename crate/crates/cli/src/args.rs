use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Symbolic regression under a graph-complexity budget, linear baselines and
/// symbolic analysis of the resulting formulas.
///
/// MODEL arguments accept a model JSON file, a reference model name
/// (`b1`..`b4`, `sr1`..`sr4`, or e.g. "SR Model 4"), or an inline formula.
#[derive(Debug, Parser)]
#[command(name = "symreg", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Directory holding DEMO_J.csv, BMX_J.csv and DXX_J.csv
    #[arg(long, global = true, env = "NHANES_DATA_DIR")]
    pub data_dir: Option<PathBuf>,

    /// Directory for output files and run manifests
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    /// Seed for the train/test split and the search
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// `key = value` file of search settings and `train_fraction`
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Fraction of the cohort used for training (overrides the config file)
    #[arg(long, global = true)]
    pub train_fraction: Option<f64>,
}

/// Search settings that override the config file.
#[derive(Debug, Args, Clone, Default)]
pub struct SearchArgs {
    /// Population size
    #[arg(long)]
    pub population_size: Option<usize>,

    /// Number of generations
    #[arg(long)]
    pub generations: Option<usize>,

    /// Complexity budget (defaults to 3, 4, 13, 17 for problems 1..4)
    #[arg(long)]
    pub max_complexity: Option<usize>,

    /// Selection mode: scalar or pareto
    #[arg(long)]
    pub mode: Option<String>,

    /// Parsimony coefficient (default 1e-4 times the target variance)
    #[arg(long)]
    pub parsimony: Option<f64>,

    /// Comma-separated operators, e.g. add,sub,mul,div,sqrt
    #[arg(long)]
    pub operators: Option<String>,

    /// Any search setting as KEY=VALUE; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    /// Suppress per-generation progress on stderr
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble the cohort and write descriptive statistics
    Stats,

    /// Fit linear baseline N (1..4) on the seeded split
    FitBaseline {
        /// Baseline number, 1..4
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
    },

    /// Run the budgeted search for problem 1..4, or `custom` on a CSV
    Evolve {
        /// 1, 2, 3, 4 or custom
        problem: String,

        /// Input CSV for the custom problem
        #[arg(long)]
        csv: Option<PathBuf>,

        /// Comma-separated input columns for the custom problem
        #[arg(long)]
        features: Option<String>,

        /// Comma-separated categorical columns of the custom CSV
        #[arg(long)]
        categorical: Option<String>,

        /// Target column for the custom problem
        #[arg(long, default_value = "y")]
        target: String,

        #[command(flatten)]
        search: SearchArgs,
    },

    /// Evaluate a model at a point or over a CSV
    Eval {
        model: String,

        /// Point as NAME=VALUE,...; categories by label, e.g. GENDER=Female
        #[arg(long)]
        at: Option<String>,

        /// CSV to evaluate row by row
        #[arg(long)]
        csv: Option<PathBuf>,

        /// Target column of the CSV; reports R2 and MSE on stderr
        #[arg(long)]
        target: Option<String>,

        /// Write the result here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Differentiate a model
    Diff {
        model: String,

        /// Variable to differentiate by
        #[arg(long)]
        wrt: String,

        /// Substitute these values into the derivative
        #[arg(long)]
        at: Option<String>,

        /// Print `slope intercept` when the result is affine in --wrt
        #[arg(long)]
        affine: bool,

        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Expand a model into a sum of products
    Expand {
        model: String,

        /// List one term per line instead of a formula
        #[arg(long)]
        terms: bool,

        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Simplify a model
    Simplify {
        model: String,

        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Print the graph-edge complexity of a model
    Complexity { model: String },

    /// Tabulate a model (or its derivative) along one variable
    Sweep {
        model: String,

        /// Variable to sweep
        #[arg(long)]
        wrt: String,

        /// Interval as LO:HI
        #[arg(long, allow_hyphen_values = true)]
        range: String,

        /// Number of grid points
        #[arg(long, default_value_t = 200)]
        steps: usize,

        /// Values of the other variables
        #[arg(long)]
        at: Option<String>,

        /// Sweep the derivative with respect to --wrt instead of the model
        #[arg(long)]
        derivative: bool,

        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// List subexpressions, or split a sum into f and g
    Modules {
        model: String,

        /// Deepest path to list
        #[arg(long, default_value_t = 3)]
        depth: usize,

        /// Path of the sum to split, e.g. 1.1
        #[arg(long, requires = "f_path")]
        split: Option<String>,

        /// Path of f inside the model, e.g. 1.1.0.0.1
        #[arg(long, requires = "split")]
        f_path: Option<String>,

        /// CSV on which to evaluate f and g (writes an f,g,label scatter)
        #[arg(long, requires = "split")]
        csv: Option<PathBuf>,

        /// Label column for the scatter
        #[arg(long, default_value = "GENDER")]
        label: String,

        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Write the lowered interaction graph as Graphviz DOT
    Dot {
        model: String,

        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Stats, four baselines and four searches over several seeds
    Reproduce {
        /// Comma-separated seeds
        #[arg(long, default_value = "0,1,2,3,4")]
        seeds: String,

        /// Skip the searches
        #[arg(long)]
        baselines_only: bool,

        #[command(flatten)]
        search: SearchArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Stats => "stats",
            Command::FitBaseline { .. } => "fit-baseline",
            Command::Evolve { .. } => "evolve",
            Command::Eval { .. } => "eval",
            Command::Diff { .. } => "diff",
            Command::Expand { .. } => "expand",
            Command::Simplify { .. } => "simplify",
            Command::Complexity { .. } => "complexity",
            Command::Sweep { .. } => "sweep",
            Command::Modules { .. } => "modules",
            Command::Dot { .. } => "dot",
            Command::Reproduce { .. } => "reproduce",
        }
    }
}
