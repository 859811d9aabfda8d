//! Built-in scenario library: the eight benchmark configurations with their
//! published coalition-total targets (utility I, utility C, value I, value C,
//! all normalized by T).

use crate::bidders::AlgorithmKind;
use crate::coordination::MechanismSpec;
use crate::data_ingest::PricePool;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::simulator::ScenarioConfig;

/// Default seed for built-in scenarios.
pub const DEFAULT_SEED: u64 = 20250817;

#[derive(Debug, Clone)]
pub struct BuiltinRow {
    pub label: &'static str,
    pub setting: &'static str,
    pub n_bidders: usize,
    pub horizon: usize,
    pub replications: usize,
    /// Published targets: utility (I), utility (C), value (I), value (C).
    pub target_cells: [f64; 4],
    pub real_data: bool,
}

pub const SYNTHETIC_LABELS: [&str; 6] =
    ["fig-i1", "fig-i2", "fig-i3", "fig-ni1", "fig-ni2", "fig-ni3"];

pub const ALL_LABELS: [&str; 8] = [
    "fig-i1",
    "fig-i2",
    "fig-i3",
    "fig-ni1",
    "fig-ni2",
    "fig-ni3",
    "fig-real-k4",
    "fig-real-k5",
];

pub fn builtin_row(label: &str) -> Result<BuiltinRow> {
    let row = match label {
        "fig-i1" => BuiltinRow {
            label: "fig-i1",
            setting: "iid",
            n_bidders: 2,
            horizon: 4000,
            replications: 100,
            target_cells: [-0.011, 0.220, 0.643, 0.666],
            real_data: false,
        },
        "fig-i2" => BuiltinRow {
            label: "fig-i2",
            setting: "iid",
            n_bidders: 4,
            horizon: 4000,
            replications: 100,
            target_cells: [-0.077, 0.302, 0.774, 0.800],
            real_data: false,
        },
        "fig-i3" => BuiltinRow {
            label: "fig-i3",
            setting: "iid",
            n_bidders: 3,
            horizon: 4000,
            replications: 100,
            target_cells: [-0.049, 0.153, 0.712, 0.748],
            real_data: false,
        },
        "fig-ni1" => BuiltinRow {
            label: "fig-ni1",
            setting: "non-iid",
            n_bidders: 2,
            horizon: 10000,
            replications: 100,
            target_cells: [0.049, 0.219, 0.715, 0.718],
            real_data: false,
        },
        "fig-ni2" => BuiltinRow {
            label: "fig-ni2",
            setting: "non-iid",
            n_bidders: 3,
            horizon: 20000,
            replications: 100,
            target_cells: [-0.014, 0.258, 0.619, 0.633],
            real_data: false,
        },
        "fig-ni3" => BuiltinRow {
            label: "fig-ni3",
            setting: "non-iid",
            n_bidders: 5,
            horizon: 20000,
            replications: 100,
            target_cells: [-0.062, 0.619, 0.814, 0.819],
            real_data: false,
        },
        "fig-real-k4" => BuiltinRow {
            label: "fig-real-k4",
            setting: "real",
            n_bidders: 4,
            horizon: 20000,
            replications: 100,
            target_cells: [-0.040, 0.155, 0.620, 0.928],
            real_data: true,
        },
        "fig-real-k5" => BuiltinRow {
            label: "fig-real-k5",
            setting: "real",
            n_bidders: 5,
            horizon: 20000,
            replications: 100,
            target_cells: [-0.065, 0.172, 0.608, 0.958],
            real_data: true,
        },
        other => {
            return Err(Error::Config(format!(
                "unknown scenario label '{other}' (known: {})",
                ALL_LABELS.join(", ")
            )))
        }
    };
    Ok(row)
}

fn synthetic_specs(label: &str) -> Result<(Vec<DistributionSpec>, DistributionSpec)> {
    let u = DistributionSpec::uniform;
    let b = DistributionSpec::beta;
    let tn = DistributionSpec::trunc_normal;
    Ok(match label {
        "fig-i1" => (vec![u(0.0, 1.0)?], u(0.0, 0.9)?),
        "fig-i2" => (vec![u(0.0, 1.0)?], u(0.0, 1.0)?),
        "fig-i3" => (vec![u(0.0, 1.0)?], b(3.0, 2.0)?),
        "fig-ni1" => (vec![b(2.0, 5.0)?, b(5.0, 2.0)?], u(0.2, 0.8)?),
        "fig-ni2" => (
            vec![b(2.0, 6.0)?, tn(0.6, 0.15, 0.0, 1.0)?, tn(0.4, 0.2, 0.0, 1.0)?],
            b(3.0, 5.0)?,
        ),
        "fig-ni3" => (
            vec![
                u(0.2, 0.8)?,
                b(4.0, 3.0)?,
                b(6.0, 2.0)?,
                tn(0.5, 0.1, 0.0, 1.0)?,
                tn(0.7, 0.12, 0.0, 1.0)?,
            ],
            b(2.0, 8.0)?,
        ),
        other => return Err(Error::Config(format!("'{other}' has no synthetic spec"))),
    })
}

/// Construct the scenario for a built-in label. Real-data rows need a loaded
/// price pool.
pub fn builtin_scenario(
    label: &str,
    seed: u64,
    pool: Option<&PricePool>,
) -> Result<(ScenarioConfig, BuiltinRow)> {
    let row = builtin_row(label)?;
    let (value_specs, outside_spec, outside_scale) = if row.real_data {
        let pool = pool.ok_or_else(|| {
            Error::Config(format!("scenario '{label}' needs a winning-price dataset (--data)"))
        })?;
        let (emp, scale) = crate::data_ingest::outside_spec_from_pool(pool)?;
        let values = crate::data_ingest::value_spec_from_pool(pool)?;
        (vec![values], emp, Some(scale))
    } else {
        let (values, outside) = synthetic_specs(label)?;
        (values, outside, None)
    };

    let cfg = ScenarioConfig {
        n_bidders: row.n_bidders,
        horizon: row.horizon,
        value_specs,
        outside_spec,
        outside_scale,
        mechanism: MechanismSpec::Independent,
        algorithm: AlgorithmKind::MdRos,
        mirror_map: None,
        alpha_override: None,
        replications: row.replications,
        base_seed: seed,
    };
    cfg.validate()?;
    Ok((cfg, row))
}
