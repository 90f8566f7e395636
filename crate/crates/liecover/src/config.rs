//! Run configuration in a flat `key = value` text format.
//!
//! Grammar, one item per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := "#" any*
//! entry   := key "=" value
//! key     := segment ("." segment)*      segment := [a-z_]+
//! value   := any* (surrounding whitespace trimmed)
//! list    := number ("," number)*
//! ```
//!
//! Keys (defaults in brackets):
//!
//! | key | value |
//! |-----|-------|
//! | `group` | `torus1`, `torus2` or `su2` [`torus1`] |
//! | `symbol.family` | `heat`, `polynomial` or `subgaussian` [`heat`] |
//! | `symbol.t` | heat time [1] |
//! | `symbol.beta` | polynomial order, must exceed the group dimension [n + 2] |
//! | `symbol.omega`, `symbol.gamma` | subgaussian parameters [1, 1] |
//! | `truncation` | weight cutoff Λ > 1 [12] |
//! | `grid.resolution` | quadrature resolution ≥ 2 [64] |
//! | `lambda.sweep` | weights in (1, Λ] [2, 4] |
//! | `eps.grid` | positive radii [0.6, 0.5, 0.4] |
//! | `cover.cloud_size` | points per sampled cloud [1024] |
//! | `cover.slack` | multiplier on the bracket's upper side, ≥ 1 [1] |
//! | `seed` | unsigned 64-bit seed [0] |
//! | `output.dir` | artifact directory [`out`] |
//! | `bounds.convention` | `relative` or `absolute` [`relative`] |
//!
//! Family parameters are only accepted for their own family. Keys may appear
//! in any order but at most once.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use liecover_core::bounds::ConstantConvention;
use liecover_core::{GroupId, SymbolFamily};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub group: GroupId,
    pub family: SymbolFamily,
    pub truncation: f64,
    pub grid_resolution: usize,
    pub lambda_sweep: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub cloud_size: usize,
    pub slack: f64,
    pub seed: u64,
    pub output_dir: String,
    pub convention: ConstantConvention,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            group: GroupId::Torus1,
            family: SymbolFamily::Heat { t: 1.0 },
            truncation: 12.0,
            grid_resolution: 64,
            lambda_sweep: vec![2.0, 4.0],
            eps_grid: vec![0.6, 0.5, 0.4],
            cloud_size: 1024,
            slack: 1.0,
            seed: 0,
            output_dir: "out".into(),
            convention: ConstantConvention::RelativeToTrace,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid { line: Option<usize>, message: String },
}

const KEYS: &[&str] = &[
    "group",
    "symbol.family",
    "symbol.t",
    "symbol.beta",
    "symbol.omega",
    "symbol.gamma",
    "truncation",
    "grid.resolution",
    "lambda.sweep",
    "eps.grid",
    "cover.cloud_size",
    "cover.slack",
    "seed",
    "output.dir",
    "bounds.convention",
];

fn valid_key(key: &str) -> bool {
    !key.is_empty()
        && key
            .split('.')
            .all(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_lowercase() || c == '_'))
}

struct Entries {
    values: BTreeMap<&'static str, (usize, String)>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.values.remove(key)
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Result<Option<(usize, T)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(|x| Some((line, x)))
                .map_err(|_| ConfigError::Parse { line, message: format!("{key}: expected {what}, got `{v}`") }),
        }
    }

    fn list(&mut self, key: &str) -> Result<Option<(usize, Vec<f64>)>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map(|x| Some((line, x)))
                .map_err(|_| ConfigError::Parse { line, message: format!("{key}: expected a comma-separated list of numbers, got `{v}`") }),
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut values: BTreeMap<&'static str, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| ConfigError::Parse { line, message: format!("expected `key = value`, got `{t}`") })?;
        let k = k.trim();
        if !valid_key(k) {
            return Err(ConfigError::Parse { line, message: format!("malformed key `{k}`") });
        }
        let key = *KEYS
            .iter()
            .find(|x| **x == k)
            .ok_or_else(|| ConfigError::Parse { line, message: format!("unknown key `{k}`") })?;
        if let Some((first, _)) = values.get(key) {
            return Err(ConfigError::Parse { line, message: format!("duplicate key `{k}` (first set on line {first})") });
        }
        values.insert(key, (line, v.trim().to_string()));
    }
    let mut e = Entries { values };
    let mut cfg = RunConfig::default();
    let mut lines: BTreeMap<&str, usize> = BTreeMap::new();

    if let Some((line, v)) = e.take("group") {
        cfg.group = GroupId::from_name(&v)
            .ok_or_else(|| ConfigError::Parse { line, message: format!("unknown group `{v}` (torus1, torus2, su2)") })?;
        lines.insert("group", line);
    }
    let n = cfg.group.dimension() as f64;
    let family = match e.take("symbol.family") {
        None => "heat".to_string(),
        Some((line, v)) => {
            lines.insert("symbol.family", line);
            v
        }
    };
    let allowed: &[&str] = match family.as_str() {
        "heat" => &["symbol.t"],
        "polynomial" => &["symbol.beta"],
        "subgaussian" => &["symbol.omega", "symbol.gamma"],
        other => {
            return Err(ConfigError::Parse {
                line: lines.get("symbol.family").copied().unwrap_or(0),
                message: format!("unknown symbol family `{other}` (heat, polynomial, subgaussian)"),
            })
        }
    };
    for key in ["symbol.t", "symbol.beta", "symbol.omega", "symbol.gamma"] {
        if !allowed.contains(&key) {
            if let Some((line, _)) = e.values.get(key) {
                return Err(ConfigError::Parse { line: *line, message: format!("`{key}` does not apply to the {family} family") });
            }
        }
    }
    let mut param = |key: &'static str, default: f64| -> Result<f64, ConfigError> {
        Ok(match e.number::<f64>(key, "a number")? {
            Some((line, v)) => {
                lines.insert(key, line);
                v
            }
            None => default,
        })
    };
    cfg.family = match family.as_str() {
        "heat" => SymbolFamily::Heat { t: param("symbol.t", 1.0)? },
        "polynomial" => SymbolFamily::Polynomial { beta: param("symbol.beta", n + 2.0)? },
        _ => SymbolFamily::Subgaussian { omega: param("symbol.omega", 1.0)?, gamma: param("symbol.gamma", 1.0)? },
    };
    if let Some((line, v)) = e.number::<f64>("truncation", "a number")? {
        cfg.truncation = v;
        lines.insert("truncation", line);
    }
    if let Some((line, v)) = e.number::<usize>("grid.resolution", "a positive integer")? {
        cfg.grid_resolution = v;
        lines.insert("grid.resolution", line);
    }
    if let Some((line, v)) = e.list("lambda.sweep")? {
        cfg.lambda_sweep = v;
        lines.insert("lambda.sweep", line);
    }
    if let Some((line, v)) = e.list("eps.grid")? {
        cfg.eps_grid = v;
        lines.insert("eps.grid", line);
    }
    if let Some((line, v)) = e.number::<usize>("cover.cloud_size", "a positive integer")? {
        cfg.cloud_size = v;
        lines.insert("cover.cloud_size", line);
    }
    if let Some((line, v)) = e.number::<f64>("cover.slack", "a number")? {
        cfg.slack = v;
        lines.insert("cover.slack", line);
    }
    if let Some((_, v)) = e.number::<u64>("seed", "an unsigned 64-bit integer")? {
        cfg.seed = v;
    }
    if let Some((line, v)) = e.take("output.dir") {
        if v.is_empty() {
            return Err(ConfigError::Parse { line, message: "output.dir must not be empty".into() });
        }
        cfg.output_dir = v;
    }
    if let Some((line, v)) = e.take("bounds.convention") {
        cfg.convention = ConstantConvention::from_name(&v)
            .ok_or_else(|| ConfigError::Parse { line, message: format!("unknown convention `{v}` (relative, absolute)") })?;
    }
    validate_at(&cfg, &lines)?;
    Ok(cfg)
}

/// Check every field against the preconditions of the operations it feeds.
pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    validate_at(cfg, &BTreeMap::new())
}

fn validate_at(cfg: &RunConfig, lines: &BTreeMap<&str, usize>) -> Result<(), ConfigError> {
    let fail = |key: &str, message: String| ConfigError::Invalid { line: lines.get(key).copied(), message };
    let n = cfg.group.dimension() as f64;
    let finite_pos = |v: f64| v > 0.0 && v.is_finite();
    match cfg.family {
        SymbolFamily::Heat { t } if !finite_pos(t) => return Err(fail("symbol.t", format!("symbol.t = {t} must be positive"))),
        SymbolFamily::Polynomial { beta } if !(beta > n && beta.is_finite()) => {
            return Err(fail(
                "symbol.beta",
                format!("symbol.beta = {beta} must exceed the dimension {n} of {}", cfg.group.name()),
            ))
        }
        SymbolFamily::Subgaussian { omega, .. } if !finite_pos(omega) => {
            return Err(fail("symbol.omega", format!("symbol.omega = {omega} must be positive")))
        }
        SymbolFamily::Subgaussian { gamma, .. } if !finite_pos(gamma) => {
            return Err(fail("symbol.gamma", format!("symbol.gamma = {gamma} must be positive")))
        }
        SymbolFamily::Custom => return Err(fail("symbol.family", "custom symbols cannot be configured".into())),
        _ => {}
    }
    if !(cfg.truncation > 1.0 && cfg.truncation.is_finite()) {
        return Err(fail("truncation", format!("truncation = {} must exceed 1", cfg.truncation)));
    }
    if cfg.grid_resolution < 2 {
        return Err(fail("grid.resolution", format!("grid.resolution = {} must be at least 2", cfg.grid_resolution)));
    }
    if cfg.lambda_sweep.is_empty() {
        return Err(fail("lambda.sweep", "lambda.sweep must not be empty".into()));
    }
    if let Some(l) = cfg.lambda_sweep.iter().find(|l| !(**l > 1.0 && **l <= cfg.truncation)) {
        return Err(fail("lambda.sweep", format!("λ = {l} outside (1, {}]", cfg.truncation)));
    }
    if cfg.eps_grid.is_empty() {
        return Err(fail("eps.grid", "eps.grid must not be empty".into()));
    }
    if let Some(e) = cfg.eps_grid.iter().find(|e| !finite_pos(**e)) {
        return Err(fail("eps.grid", format!("ε = {e} must be positive")));
    }
    if cfg.cloud_size == 0 {
        return Err(fail("cover.cloud_size", "cover.cloud_size must be positive".into()));
    }
    if !(cfg.slack >= 1.0 && cfg.slack.is_finite()) {
        return Err(fail("cover.slack", format!("cover.slack = {} must be at least 1", cfg.slack)));
    }
    if cfg.output_dir.trim().is_empty() || cfg.output_dir.trim() != cfg.output_dir || cfg.output_dir.contains('\n') {
        return Err(fail("output.dir", "output.dir must be a non-empty single-line value without surrounding spaces".into()));
    }
    Ok(())
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Canonical text: every key, fixed order, shortest round-trip numbers.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "group = {}", cfg.group.name());
    match cfg.family {
        SymbolFamily::Heat { t } => {
            let _ = writeln!(s, "symbol.family = heat\nsymbol.t = {t}");
        }
        SymbolFamily::Polynomial { beta } => {
            let _ = writeln!(s, "symbol.family = polynomial\nsymbol.beta = {beta}");
        }
        SymbolFamily::Subgaussian { omega, gamma } => {
            let _ = writeln!(s, "symbol.family = subgaussian\nsymbol.omega = {omega}\nsymbol.gamma = {gamma}");
        }
        SymbolFamily::Custom => {
            let _ = writeln!(s, "symbol.family = custom");
        }
    }
    let _ = writeln!(s, "truncation = {}", cfg.truncation);
    let _ = writeln!(s, "grid.resolution = {}", cfg.grid_resolution);
    let _ = writeln!(s, "lambda.sweep = {}", list(&cfg.lambda_sweep));
    let _ = writeln!(s, "eps.grid = {}", list(&cfg.eps_grid));
    let _ = writeln!(s, "cover.cloud_size = {}", cfg.cloud_size);
    let _ = writeln!(s, "cover.slack = {}", cfg.slack);
    let _ = writeln!(s, "seed = {}", cfg.seed);
    let _ = writeln!(s, "output.dir = {}", cfg.output_dir);
    let _ = writeln!(s, "bounds.convention = {}", cfg.convention.name());
    s
}

/// SHA-256 of the canonical text, lowercase hex.
pub fn config_hash(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(serialize_config(cfg).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// The canonical text as `key → value` pairs.
pub fn config_echo(cfg: &RunConfig) -> BTreeMap<String, String> {
    serialize_config(cfg)
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
