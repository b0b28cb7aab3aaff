//! Run configuration: a TOML file whose every field has a default, so an
//! empty file is a valid (if useless) config. Command-line flags are applied
//! on top.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use roadnet::centrality::ClosenessDirection;
use roadnet::graph::ComponentNotion;
use roadnet::spatial::{FunctionKind, KdeMode, DEFAULT_BANDWIDTH_M, DEFAULT_CELL_M};
use roadnet::stats::MwMode;
use roadnet::IndexKind;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Centrality,
    Kde,
    Csr,
    Stats,
    Attack,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Centrality, Stage::Kde, Stage::Csr, Stage::Stats, Stage::Attack];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Centrality => "centrality",
            Stage::Kde => "kde",
            Stage::Csr => "csr",
            Stage::Stats => "stats",
            Stage::Attack => "attack",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Root seed; every stochastic stage derives its own stream from it.
    pub seed: u64,
    pub output_dir: PathBuf,
    pub stages: Vec<Stage>,
    pub input: InputConfig,
    /// Generate the elongated synthetic network instead of reading files.
    pub demo: Option<DemoConfig>,
    pub centrality: CentralityConfig,
    pub kde: KdeConfig,
    pub csr: CsrConfig,
    pub stats: StatsConfig,
    pub attack: AttackConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            output_dir: PathBuf::from("roadnet-out"),
            stages: Stage::ALL.to_vec(),
            input: InputConfig::default(),
            demo: None,
            centrality: CentralityConfig::default(),
            kde: KdeConfig::default(),
            csr: CsrConfig::default(),
            stats: StatsConfig::default(),
            attack: AttackConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    /// Label of the whole network in outputs; `network` when unset.
    pub name: Option<String>,
    pub nodes: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub routes: Option<PathBuf>,
    /// Zone polygons, `.json` or the plain text format.
    pub zones: Option<PathBuf>,
    /// Treat every edge as a two-way street.
    pub undirected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemoConfig {
    pub cols: usize,
    pub rows: usize,
    pub spacing_m: f64,
    pub corridors: usize,
    pub corridor_factor: f64,
    pub jitter: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            cols: 120,
            rows: 24,
            spacing_m: 100.0,
            corridors: 3,
            corridor_factor: 0.5,
            jitter: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CentralityConfig {
    pub closeness_direction: ClosenessDirection,
    pub normalize_degree: bool,
    pub normalize_closeness: bool,
    pub normalize_betweenness: bool,
    pub normalize_load: bool,
}

impl Default for CentralityConfig {
    fn default() -> Self {
        let d = roadnet::centrality::CentralityOptions::default();
        CentralityConfig {
            closeness_direction: d.closeness_direction,
            normalize_degree: d.normalize_degree,
            normalize_closeness: d.normalize_closeness,
            normalize_betweenness: d.normalize_betweenness,
            normalize_load: d.normalize_load,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KdeConfig {
    pub bandwidth_m: f64,
    pub cell_m: f64,
    pub weight_indices: Vec<IndexKind>,
    pub mode: KdeMode,
    pub hotspot_percentile: f64,
}

impl Default for KdeConfig {
    fn default() -> Self {
        KdeConfig {
            bandwidth_m: DEFAULT_BANDWIDTH_M,
            cell_m: DEFAULT_CELL_M,
            weight_indices: vec![IndexKind::Closeness, IndexKind::Betweenness, IndexKind::Load],
            mode: KdeMode::Weighted,
            hotspot_percentile: 95.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CsrConfig {
    pub kinds: Vec<FunctionKind>,
    pub n_sims: usize,
    /// Largest distance of the grid; derived from the intensity when absent.
    pub r_max_m: Option<f64>,
    pub r_steps: usize,
    pub m_reference: usize,
    pub inside_threshold: f64,
}

impl Default for CsrConfig {
    fn default() -> Self {
        let d = roadnet::spatial::CsrOptions::default();
        CsrConfig {
            kinds: vec![FunctionKind::G, FunctionKind::F],
            n_sims: d.n_sims,
            r_max_m: None,
            r_steps: d.r_steps,
            m_reference: d.m_reference,
            inside_threshold: d.inside_threshold,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsConfig {
    /// Zone name pairs for location tests; all pairs of zones when empty.
    pub compare: Vec<(String, String)>,
    pub mw_mode: MwMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StrategyName {
    Index(IndexKind),
    Random,
    /// Key into `attack.node_lists`.
    List(String),
}

impl FromStr for StrategyName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("random") {
            return Ok(StrategyName::Random);
        }
        if let Some(name) = s.strip_prefix("list:") {
            return Ok(StrategyName::List(name.to_string()));
        }
        s.parse::<IndexKind>()
            .map(StrategyName::Index)
            .map_err(|_| format!("unknown attack strategy '{s}' (an index name, 'random' or 'list:<name>')"))
    }
}

impl TryFrom<String> for StrategyName {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<StrategyName> for String {
    fn from(s: StrategyName) -> String {
        s.to_string()
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyName::Index(k) => write!(f, "{k}"),
            StrategyName::Random => f.write_str("random"),
            StrategyName::List(name) => write!(f, "list:{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackConfig {
    pub strategies: Vec<StrategyName>,
    pub replicates: usize,
    pub grid_step: f64,
    pub component: ComponentNotion,
    /// Named removal orders, one `node_id` per row.
    pub node_lists: BTreeMap<String, PathBuf>,
}

impl Default for AttackConfig {
    fn default() -> Self {
        let mut strategies: Vec<StrategyName> = [
            IndexKind::Betweenness,
            IndexKind::Load,
            IndexKind::Bus,
            IndexKind::Degree,
            IndexKind::Closeness,
        ]
        .into_iter()
        .map(StrategyName::Index)
        .collect();
        strategies.push(StrategyName::Random);
        AttackConfig {
            strategies,
            replicates: roadnet::robustness::DEFAULT_REPLICATES,
            grid_step: roadnet::robustness::DEFAULT_GRID_STEP,
            component: ComponentNotion::Weak,
            node_lists: BTreeMap::new(),
        }
    }
}

fn absolute(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::validation(format!("config: {e}")))
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| e.context(path.display().to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(v) = p {
                *v = absolute(base, v);
            }
        };
        fix(&mut self.input.nodes);
        fix(&mut self.input.edges);
        fix(&mut self.input.routes);
        fix(&mut self.input.zones);
        for p in self.attack.node_lists.values_mut() {
            *p = absolute(base, p);
        }
        self.output_dir = absolute(base, &self.output_dir);
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn has_stage(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }

    /// Input files named by the config, with a label for each.
    pub fn input_files(&self) -> Vec<(String, PathBuf)> {
        let mut files = Vec::new();
        if self.demo.is_none() {
            for (label, p) in [
                ("nodes", &self.input.nodes),
                ("edges", &self.input.edges),
                ("routes", &self.input.routes),
                ("zones", &self.input.zones),
            ] {
                if let Some(p) = p {
                    files.push((label.to_string(), p.clone()));
                }
            }
        }
        for (name, p) in &self.attack.node_lists {
            files.push((format!("node_list.{name}"), p.clone()));
        }
        files
    }

    /// Checks everything that can be checked before touching data.
    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |msg: String| Err(Failure::validation(msg));
        if self.stages.is_empty() {
            return bad("no stages requested".into());
        }
        match &self.demo {
            Some(d) => {
                if d.cols < 2 || d.rows < 2 || d.cols < 4 * d.rows {
                    return bad(format!("demo grid {}x{} needs at least 2 rows and cols >= 4 x rows", d.cols, d.rows));
                }
                if !(d.spacing_m > 0.0) {
                    return bad("demo spacing_m must be positive".into());
                }
            }
            None => {
                if self.input.nodes.is_none() {
                    return bad("input.nodes is required".into());
                }
                if self.input.edges.is_none() {
                    return bad("input.edges is required".into());
                }
            }
        }
        for (label, p) in self.input_files() {
            if !p.is_file() {
                return bad(format!("{label} file not found: {}", p.display()));
            }
        }
        let positive = |name: &str, v: f64| -> Result<(), Failure> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Failure::validation(format!("{name} must be positive, got {v}")))
            }
        };
        if self.has_stage(Stage::Kde) {
            positive("kde.bandwidth_m", self.kde.bandwidth_m)?;
            positive("kde.cell_m", self.kde.cell_m)?;
            if !(self.kde.hotspot_percentile > 0.0 && self.kde.hotspot_percentile < 100.0) {
                return bad("kde.hotspot_percentile must lie in (0, 100)".into());
            }
            if self.kde.weight_indices.is_empty() {
                return bad("kde.weight_indices is empty".into());
            }
        }
        if self.has_stage(Stage::Csr) {
            if self.csr.kinds.is_empty() {
                return bad("csr.kinds is empty".into());
            }
            if self.csr.n_sims < 19 {
                return bad(format!("csr.n_sims must be at least 19, got {}", self.csr.n_sims));
            }
            if self.csr.r_steps == 0 {
                return bad("csr.r_steps must be positive".into());
            }
            if let Some(r) = self.csr.r_max_m {
                positive("csr.r_max_m", r)?;
            }
            if !(self.csr.inside_threshold > 0.0 && self.csr.inside_threshold <= 1.0) {
                return bad("csr.inside_threshold must lie in (0, 1]".into());
            }
            if self.csr.m_reference < 100 {
                return bad("csr.m_reference must be at least 100".into());
            }
        }
        if self.has_stage(Stage::Attack) {
            if self.attack.strategies.is_empty() {
                return bad("attack.strategies is empty".into());
            }
            if self.attack.replicates == 0 {
                return bad("attack.replicates must be positive".into());
            }
            roadnet::robustness::fraction_grid(self.attack.grid_step)
                .map_err(|e| Failure::validation(format!("attack.grid_step: {e}")))?;
            for s in &self.attack.strategies {
                if let StrategyName::List(name) = s {
                    if !self.attack.node_lists.contains_key(name) {
                        return bad(format!("attack strategy '{s}' has no entry in attack.node_lists"));
                    }
                }
            }
        }
        Ok(())
    }
}
