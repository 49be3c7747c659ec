use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GpError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Tournament on penalized fitness.
    Scalar,
    /// Tournament on nondomination rank, then crowding distance.
    Pareto,
}

impl FromStr for SelectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "scalar" => Ok(SelectionMode::Scalar),
            "pareto" => Ok(SelectionMode::Pareto),
            other => Err(format!("unknown mode `{other}` (expected scalar or pareto)")),
        }
    }
}

impl SelectionMode {
    pub fn name(self) -> &'static str {
        match self {
            SelectionMode::Scalar => "scalar",
            SelectionMode::Pareto => "pareto",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub p_crossover: f64,
    pub p_subtree_mutation: f64,
    pub p_point_mutation: f64,
    pub p_constant_jitter: f64,
    pub p_reproduction: f64,
    pub max_complexity: usize,
    /// `None` means `1e-4 * Var(target)`.
    pub parsimony_coefficient: Option<f64>,
    pub init_max_depth: usize,
    pub elitism_count: usize,
    pub constant_range: (f64, f64),
    pub seed: u64,
    pub mode: SelectionMode,
    pub target_fitness: Option<f64>,
    /// Hard cap on tree size; variable-free subtrees cost no edges and
    /// would otherwise grow without bound.
    pub max_nodes: usize,
    /// Largest jitter scale; each jitter picks `jitter_sigma * 10^-k`, k in 0..=3.
    pub jitter_sigma: f64,
    /// Refit the outer scale and offset of the best model by least squares.
    pub refit: bool,
    /// Score every candidate after its optimal outer scale and offset.
    pub linear_scaling: bool,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            population_size: 1000,
            generations: 100,
            tournament_size: 5,
            p_crossover: 0.7,
            p_subtree_mutation: 0.12,
            p_point_mutation: 0.08,
            p_constant_jitter: 0.08,
            p_reproduction: 0.02,
            max_complexity: 17,
            parsimony_coefficient: None,
            init_max_depth: 4,
            elitism_count: 2,
            constant_range: (-5.0, 5.0),
            seed: 0,
            mode: SelectionMode::Scalar,
            target_fitness: None,
            max_nodes: 64,
            jitter_sigma: 0.1,
            refit: false,
            linear_scaling: false,
        }
    }
}

pub const CONFIG_KEYS: [&str; 20] = [
    "population_size",
    "generations",
    "tournament_size",
    "p_crossover",
    "p_subtree_mutation",
    "p_point_mutation",
    "p_constant_jitter",
    "p_reproduction",
    "max_complexity",
    "parsimony_coefficient",
    "init_max_depth",
    "elitism_count",
    "constant_range",
    "seed",
    "mode",
    "target_fitness",
    "max_nodes",
    "jitter_sigma",
    "refit",
    "linear_scaling",
];

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, GpError> {
    v.trim()
        .parse()
        .map_err(|_| GpError::InvalidConfig(format!("`{key}`: cannot parse `{v}`")))
}

fn optional(key: &str, v: &str) -> Result<Option<f64>, GpError> {
    match v.trim() {
        "" | "none" | "auto" => Ok(None),
        s => num(key, s).map(Some),
    }
}

fn boolean(key: &str, v: &str) -> Result<bool, GpError> {
    match v.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(GpError::InvalidConfig(format!(
            "`{key}`: expected a boolean, got `{v}`"
        ))),
    }
}

impl GpConfig {
    pub fn validate(&self) -> Result<(), GpError> {
        let bad = |m: String| Err(GpError::InvalidConfig(m));
        let ps = [
            self.p_crossover,
            self.p_subtree_mutation,
            self.p_point_mutation,
            self.p_constant_jitter,
            self.p_reproduction,
        ];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("operator probabilities must lie in [0, 1]".into());
        }
        let sum: f64 = ps.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return bad(format!("operator probabilities sum to {sum}, not 1"));
        }
        if self.tournament_size < 1 || self.population_size < self.tournament_size {
            return bad("need population_size >= tournament_size >= 1".into());
        }
        if self.max_complexity < 1 {
            return bad("max_complexity must be at least 1".into());
        }
        if self.elitism_count >= self.population_size {
            return bad("elitism_count must be below population_size".into());
        }
        if self.init_max_depth < 1 {
            return bad("init_max_depth must be at least 1".into());
        }
        if self.max_nodes < 1 {
            return bad("max_nodes must be at least 1".into());
        }
        let (lo, hi) = self.constant_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return bad(format!("constant_range [{lo}, {hi}] must be finite with lo < hi"));
        }
        if let Some(p) = self.parsimony_coefficient {
            if !(p.is_finite() && p >= 0.0) {
                return bad("parsimony_coefficient must be finite and >= 0".into());
            }
        }
        if !(self.jitter_sigma.is_finite() && self.jitter_sigma >= 0.0) {
            return bad("jitter_sigma must be finite and >= 0".into());
        }
        Ok(())
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), GpError> {
        let k = key.trim();
        match k {
            "population_size" => self.population_size = num(k, value)?,
            "generations" => self.generations = num(k, value)?,
            "tournament_size" => self.tournament_size = num(k, value)?,
            "p_crossover" => self.p_crossover = num(k, value)?,
            "p_subtree_mutation" => self.p_subtree_mutation = num(k, value)?,
            "p_point_mutation" => self.p_point_mutation = num(k, value)?,
            "p_constant_jitter" => self.p_constant_jitter = num(k, value)?,
            "p_reproduction" => self.p_reproduction = num(k, value)?,
            "max_complexity" => self.max_complexity = num(k, value)?,
            "parsimony_coefficient" => self.parsimony_coefficient = optional(k, value)?,
            "init_max_depth" => self.init_max_depth = num(k, value)?,
            "elitism_count" => self.elitism_count = num(k, value)?,
            "constant_range" => {
                let v = value.trim().trim_start_matches('[').trim_end_matches(']');
                let (lo, hi) = v
                    .split_once(',')
                    .ok_or_else(|| GpError::InvalidConfig(format!("`{k}`: expected lo,hi, got `{value}`")))?;
                self.constant_range = (num(k, lo)?, num(k, hi)?);
            }
            "seed" => self.seed = num(k, value)?,
            "mode" => self.mode = value.parse().map_err(GpError::InvalidConfig)?,
            "target_fitness" => self.target_fitness = optional(k, value)?,
            "max_nodes" => self.max_nodes = num(k, value)?,
            "jitter_sigma" => self.jitter_sigma = num(k, value)?,
            "refit" => self.refit = boolean(k, value)?,
            "linear_scaling" => self.linear_scaling = boolean(k, value)?,
            _ => return Err(GpError::InvalidConfig(format!("unknown key `{k}`"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), GpError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| GpError::InvalidConfig(format!("line {}: expected key = value", i + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let opt = |o: Option<f64>| o.map_or("none".to_string(), |v| v.to_string());
        let _ = writeln!(s, "population_size = {}", self.population_size);
        let _ = writeln!(s, "generations = {}", self.generations);
        let _ = writeln!(s, "tournament_size = {}", self.tournament_size);
        let _ = writeln!(s, "p_crossover = {}", self.p_crossover);
        let _ = writeln!(s, "p_subtree_mutation = {}", self.p_subtree_mutation);
        let _ = writeln!(s, "p_point_mutation = {}", self.p_point_mutation);
        let _ = writeln!(s, "p_constant_jitter = {}", self.p_constant_jitter);
        let _ = writeln!(s, "p_reproduction = {}", self.p_reproduction);
        let _ = writeln!(s, "max_complexity = {}", self.max_complexity);
        let _ = writeln!(s, "parsimony_coefficient = {}", opt(self.parsimony_coefficient));
        let _ = writeln!(s, "init_max_depth = {}", self.init_max_depth);
        let _ = writeln!(s, "elitism_count = {}", self.elitism_count);
        let _ = writeln!(
            s,
            "constant_range = {},{}",
            self.constant_range.0, self.constant_range.1
        );
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "mode = {}", self.mode.name());
        let _ = writeln!(s, "target_fitness = {}", opt(self.target_fitness));
        let _ = writeln!(s, "max_nodes = {}", self.max_nodes);
        let _ = writeln!(s, "jitter_sigma = {}", self.jitter_sigma);
        let _ = writeln!(s, "refit = {}", self.refit);
        let _ = writeln!(s, "linear_scaling = {}", self.linear_scaling);
        s
    }
}
