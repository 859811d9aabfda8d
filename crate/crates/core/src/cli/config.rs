//! Declarative scenario configuration: TOML files and the distribution
//! string syntax shared with command-line flags.
//!
//! Distributions are written `uniform(0,1)`, `beta(3,2)`,
//! `truncnormal(0.6,0.15,0,1)`, or
//! `empirical(path=prices.csv,column=winning_price,delimiter=,header=true)`.
//! Unknown config keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::bidders::AlgorithmKind;
use crate::coordination::MechanismSpec;
use crate::data_ingest::{load_price_pool, ColumnSelector, PoolStats};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::simulator::ScenarioConfig;

/// On-disk configuration tree.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub label: Option<String>,
    /// "iid", "non-iid", or "real"; defaults from the value spec shape.
    #[serde(default)]
    pub setting: Option<String>,
    pub n_bidders: usize,
    pub horizon: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub base_seed: u64,
    /// One entry (i.i.d.) or `n_bidders` entries.
    pub values: Vec<String>,
    pub outside: String,
    #[serde(default)]
    pub outside_scale: Option<String>,
    /// Scenarios to run; defaults to ["independent", "highest-value"].
    #[serde(default)]
    pub mechanisms: Option<Vec<String>>,
    #[serde(default = "default_algorithm")]
    pub algorithm: String,
    /// Off-schedule learning rate override (the built-in schedule is 1/sqrt(T)).
    #[serde(default)]
    pub alpha_override: Option<f64>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_replications() -> usize {
    100
}

fn default_algorithm() -> String {
    "md-ros".into()
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub trace: Option<String>,
    #[serde(default)]
    pub summary: Option<String>,
    #[serde(default)]
    pub long: Option<String>,
    /// Trajectory subsampling stride; 0 means every ⌈T/1000⌉-th round.
    #[serde(default)]
    pub subsample: usize,
}

/// A fully resolved configuration: specs constructed, pools loaded.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub label: String,
    pub setting: String,
    pub scenario: ScenarioConfig,
    pub mechanisms: Vec<MechanismSpec>,
    pub output: OutputConfig,
    /// The declarative form, embedded into summary outputs for auditability.
    pub echo: serde_json::Value,
    pub pool_stats: Option<PoolStats>,
}

/// Parse a TOML config file and resolve it. Relative `empirical` paths are
/// taken relative to the config file's directory.
pub fn load_config(path: &Path) -> Result<ResolvedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    let file: ConfigFile = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    resolve_config(&file, path.parent().unwrap_or(Path::new(".")))
}

pub fn resolve_config(file: &ConfigFile, base_dir: &Path) -> Result<ResolvedConfig> {
    let mut pool_stats = None;
    let mut parse = |s: &str| -> Result<DistributionSpec> {
        let (spec, stats) = parse_distribution_in(s, base_dir)?;
        if stats.is_some() {
            pool_stats = stats;
        }
        Ok(spec)
    };

    let value_specs: Vec<DistributionSpec> =
        file.values.iter().map(|s| parse(s)).collect::<Result<_>>()?;
    let outside_spec = parse(&file.outside)?;
    let outside_scale = file.outside_scale.as_deref().map(&mut parse).transpose()?;

    let algorithm = parse_algorithm(&file.algorithm)?;
    let mechanisms = match &file.mechanisms {
        Some(list) if !list.is_empty() => {
            list.iter().map(|m| parse_mechanism(m)).collect::<Result<Vec<_>>>()?
        }
        _ => vec![MechanismSpec::Independent, MechanismSpec::HighestValue],
    };

    let setting = file.setting.clone().unwrap_or_else(|| {
        if pool_stats.is_some() {
            "real".into()
        } else if value_specs.len() > 1 {
            "non-iid".into()
        } else {
            "iid".into()
        }
    });

    let scenario = ScenarioConfig {
        n_bidders: file.n_bidders,
        horizon: file.horizon,
        value_specs,
        outside_spec,
        outside_scale,
        mechanism: mechanisms[0].clone(),
        algorithm,
        mirror_map: None,
        alpha_override: file.alpha_override,
        replications: file.replications,
        base_seed: file.base_seed,
    };
    scenario.validate()?;

    Ok(ResolvedConfig {
        label: file.label.clone().unwrap_or_else(|| "scenario".into()),
        setting,
        scenario,
        mechanisms,
        output: file.output.clone(),
        echo: serde_json::to_value(file).expect("config serializes"),
        pool_stats,
    })
}

/// Parse a distribution string (paths relative to the working directory).
pub fn parse_distribution(s: &str) -> Result<DistributionSpec> {
    Ok(parse_distribution_in(s, Path::new("."))?.0)
}

fn parse_distribution_in(s: &str, base_dir: &Path) -> Result<(DistributionSpec, Option<PoolStats>)> {
    let s = s.trim();
    let (name, args) = split_call(s)?;
    match name {
        "uniform" => {
            let v = numeric_args(args, 2, s)?;
            Ok((DistributionSpec::uniform(v[0], v[1])?, None))
        }
        "beta" => {
            let v = numeric_args(args, 2, s)?;
            Ok((DistributionSpec::beta(v[0], v[1])?, None))
        }
        "truncnormal" => {
            let v = numeric_args(args, 4, s)?;
            Ok((DistributionSpec::trunc_normal(v[0], v[1], v[2], v[3])?, None))
        }
        "empirical" => {
            let kv = keyword_args(args, s)?;
            let path_str = kv
                .iter()
                .find(|(k, _)| k == "path")
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Config(format!("empirical needs path=...: {s}")))?;
            let mut path = PathBuf::from(&path_str);
            if path.is_relative() {
                path = base_dir.join(path);
            }
            let column = kv
                .iter()
                .find(|(k, _)| k == "column")
                .map(|(_, v)| match v.parse::<usize>() {
                    Ok(i) => ColumnSelector::Index(i),
                    Err(_) => ColumnSelector::Name(v.clone()),
                })
                .unwrap_or(ColumnSelector::Index(0));
            let delimiter = kv
                .iter()
                .find(|(k, _)| k == "delimiter")
                .map(|(_, v)| match v.as_str() {
                    "tab" => Ok('\t'),
                    v if v.chars().count() == 1 => Ok(v.chars().next().unwrap()),
                    other => Err(Error::Config(format!("bad delimiter '{other}'"))),
                })
                .transpose()?
                .unwrap_or(',');
            let header = kv
                .iter()
                .find(|(k, _)| k == "header")
                .map(|(_, v)| match v.as_str() {
                    "true" => Ok(true),
                    "false" => Ok(false),
                    other => Err(Error::Config(format!("bad header flag '{other}'"))),
                })
                .transpose()?
                .unwrap_or(true);
            for (k, _) in &kv {
                if !matches!(k.as_str(), "path" | "column" | "delimiter" | "header") {
                    return Err(Error::Config(format!("unknown empirical key '{k}' in {s}")));
                }
            }
            let pool = load_price_pool(&path, &column, delimiter, header, None)?;
            let stats = pool.stats();
            Ok((DistributionSpec::empirical(pool.normalized)?, Some(stats)))
        }
        other => Err(Error::Config(format!(
            "unknown distribution '{other}' (expected uniform, beta, truncnormal, empirical)"
        ))),
    }
}

pub fn parse_mechanism(s: &str) -> Result<MechanismSpec> {
    let s = s.trim();
    match s {
        "independent" => return Ok(MechanismSpec::Independent),
        "highest-value" => return Ok(MechanismSpec::HighestValue),
        "all-truthful" => return Ok(MechanismSpec::AllTruthful),
        _ => {}
    }
    let (name, args) = split_call(s)?;
    match name {
        "fixed-multiplier-all" => {
            let v = numeric_args(args, 1, s)?;
            Ok(MechanismSpec::FixedMultiplierAll(v[0]))
        }
        "scale-top-k" => {
            let v = numeric_args(args, 2, s)?;
            if v[0].fract() != 0.0 || v[0] < 1.0 {
                return Err(Error::Config(format!("scale-top-k needs integer k >= 1: {s}")));
            }
            Ok(MechanismSpec::ScaleTopK { k: v[0] as usize, lambda0: v[1] })
        }
        other => Err(Error::Config(format!("unknown mechanism '{other}'"))),
    }
}

pub fn parse_algorithm(s: &str) -> Result<AlgorithmKind> {
    let s = s.trim();
    match s {
        "md-ros" => return Ok(AlgorithmKind::MdRos),
        "truthful" => return Ok(AlgorithmKind::Truthful),
        "trigger-overbid" => return Ok(AlgorithmKind::TriggerOverbid),
        _ => {}
    }
    let (name, args) = split_call(s)?;
    match name {
        "fixed-multiplier" => {
            let v = numeric_args(args, 1, s)?;
            if !(v[0] > 0.0) {
                return Err(Error::Config(format!("fixed-multiplier needs lambda0 > 0: {s}")));
            }
            Ok(AlgorithmKind::FixedMultiplier(v[0]))
        }
        other => Err(Error::Config(format!("unknown algorithm '{other}'"))),
    }
}

fn split_call(s: &str) -> Result<(&str, &str)> {
    let open = s
        .find('(')
        .ok_or_else(|| Error::Config(format!("expected name(args...), got '{s}'")))?;
    if !s.ends_with(')') {
        return Err(Error::Config(format!("missing closing parenthesis in '{s}'")));
    }
    Ok((&s[..open], &s[open + 1..s.len() - 1]))
}

fn numeric_args(args: &str, want: usize, ctx: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
    if parts.len() != want {
        return Err(Error::Config(format!(
            "'{ctx}' expects {want} numeric arguments, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad numeric argument '{p}' in '{ctx}'")))
        })
        .collect()
}

fn keyword_args(args: &str, ctx: &str) -> Result<Vec<(String, String)>> {
    args.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in '{ctx}', got '{p}'")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

/// Build a ScenarioConfig directly from flag-style pieces (used by `check`
/// and `verify`).
#[allow(clippy::too_many_arguments)]
pub fn scenario_from_parts(
    n_bidders: usize,
    horizon: usize,
    value_specs: Vec<DistributionSpec>,
    outside_spec: DistributionSpec,
    outside_scale: Option<DistributionSpec>,
    algorithm: AlgorithmKind,
    replications: usize,
    base_seed: u64,
) -> Result<ScenarioConfig> {
    let cfg = ScenarioConfig {
        n_bidders,
        horizon,
        value_specs,
        outside_spec,
        outside_scale,
        mechanism: MechanismSpec::Independent,
        algorithm,
        mirror_map: None,
        alpha_override: None,
        replications,
        base_seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Shared entropy map constructor for callers building custom scenarios.
pub fn entropy_map() -> Arc<crate::mirror_map::EntropyMap> {
    Arc::new(crate::mirror_map::EntropyMap)
}
