//! Scenario execution: T-round runs, paired independent/coordinated
//! replications on shared draws, and aggregation with confidence intervals.
//!
//! Draw-order contract (the reproducibility and pairing anchor): each round
//! derives its streams from `(base_seed, run, round, role)` and consumes, in
//! order, the bidder values 1..N from the `VALUES` stream, the outside bid
//! from `OUTSIDE`, then the scale factor from `SCALE` when configured.
//! Mechanisms never touch the streams, so scenarios run on identical draws.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::assumption::EstimateWithCI;
use crate::auction::run_round;
use crate::bidders::{AlgorithmKind, BidderState};
use crate::coordination::{produce_bids, MechanismSpec};
use crate::distributions::{sample, DistributionSpec, RandomStream, StreamId, StreamRole};
use crate::error::{Error, Result};
use crate::mirror_map::MirrorMap;

/// Full description of one scenario: who bids, how, against what, for how
/// long, and under which mechanism.
#[derive(Clone)]
pub struct ScenarioConfig {
    pub n_bidders: usize,
    pub horizon: usize,
    /// Length 1 (all bidders i.i.d. from it) or `n_bidders` (one law each).
    pub value_specs: Vec<DistributionSpec>,
    pub outside_spec: DistributionSpec,
    /// Optional multiplicative scale on the outside bid (real-data setup).
    pub outside_scale: Option<DistributionSpec>,
    pub mechanism: MechanismSpec,
    pub algorithm: AlgorithmKind,
    /// Mirror map for the auto-bidder; `None` means the entropy map.
    pub mirror_map: Option<Arc<dyn MirrorMap>>,
    /// Off-schedule learning rate; `None` means 1/√T.
    pub alpha_override: Option<f64>,
    pub replications: usize,
    pub base_seed: u64,
}

impl fmt::Debug for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScenarioConfig")
            .field("n_bidders", &self.n_bidders)
            .field("horizon", &self.horizon)
            .field("value_specs", &self.value_specs)
            .field("outside_spec", &self.outside_spec)
            .field("outside_scale", &self.outside_scale)
            .field("mechanism", &self.mechanism)
            .field("algorithm", &self.algorithm)
            .field("mirror_map", &self.mirror_map.as_ref().map(|m| m.name()))
            .field("alpha_override", &self.alpha_override)
            .field("replications", &self.replications)
            .field("base_seed", &self.base_seed)
            .finish()
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bidders < 1 {
            return Err(Error::Config("n_bidders must be >= 1".into()));
        }
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.replications < 1 {
            return Err(Error::Config("replications must be >= 1".into()));
        }
        if self.value_specs.len() != 1 && self.value_specs.len() != self.n_bidders {
            return Err(Error::Config(format!(
                "values must list 1 or n_bidders={} distributions, got {}",
                self.n_bidders,
                self.value_specs.len()
            )));
        }
        for spec in &self.value_specs {
            let (lo, hi) = spec.support_bounds();
            if lo < 0.0 || hi > 1.0 {
                return Err(Error::Config(format!(
                    "value distribution {} has support [{lo},{hi}] outside [0,1]",
                    spec.describe()
                )));
            }
        }
        if let Some(scale) = &self.outside_scale {
            let (lo, _) = scale.support_bounds();
            if lo < 1.0 {
                return Err(Error::Config(format!(
                    "outside_scale {} must have support >= 1",
                    scale.describe()
                )));
            }
        }
        if let Some(a) = self.alpha_override {
            if !(a > 0.0) {
                return Err(Error::Config(format!("alpha_override must be > 0, got {a}")));
            }
        }
        Ok(())
    }

    pub fn with_mechanism(&self, mechanism: MechanismSpec) -> Self {
        let mut cfg = self.clone();
        cfg.mechanism = mechanism;
        cfg
    }

    pub fn with_algorithm(&self, algorithm: AlgorithmKind) -> Self {
        let mut cfg = self.clone();
        cfg.algorithm = algorithm;
        cfg
    }

    fn build_states(&self) -> Result<Vec<BidderState>> {
        let one = || -> Result<BidderState> {
            Ok(match self.algorithm {
                AlgorithmKind::MdRos => match &self.mirror_map {
                    Some(map) => {
                        BidderState::md_ros_with(map.clone(), self.horizon, self.alpha_override)?
                    }
                    None => BidderState::md_ros_with(
                        Arc::new(crate::mirror_map::EntropyMap),
                        self.horizon,
                        self.alpha_override,
                    )?,
                },
                AlgorithmKind::Truthful => BidderState::truthful(),
                AlgorithmKind::TriggerOverbid => BidderState::trigger_overbid(),
                AlgorithmKind::FixedMultiplier(l0) => BidderState::fixed_multiplier(l0),
            })
        };
        (0..self.n_bidders).map(|_| one()).collect()
    }

    fn value_spec(&self, bidder: usize) -> &DistributionSpec {
        if self.value_specs.len() == 1 {
            &self.value_specs[0]
        } else {
            &self.value_specs[bidder]
        }
    }
}

/// Short scenario tag used in traces and summaries.
pub fn scenario_tag(mechanism: &MechanismSpec) -> String {
    match mechanism {
        MechanismSpec::Independent => "I".into(),
        MechanismSpec::HighestValue => "C".into(),
        other => other.tag(),
    }
}

/// Everything recorded from one run: per-round per-bidder columns plus
/// cumulative series. Flat layout, index `[t * n_bidders + i]`.
#[derive(Debug, Clone)]
pub struct MetricsSeries {
    pub scenario: String,
    pub run_index: u64,
    pub n_bidders: usize,
    pub horizon: usize,
    pub values: Vec<f64>,
    pub bids: Vec<f64>,
    pub active: Vec<bool>,
    pub won: Vec<bool>,
    pub payments: Vec<f64>,
    pub utilities: Vec<f64>,
    /// Multiplier the bidder used in the round (before the update).
    pub lambdas: Vec<f64>,
    pub cum_utility: Vec<f64>,
    pub cum_value: Vec<f64>,
    /// Coalition value of each round: Σᵢ vᵢ·xᵢ.
    pub round_value: Vec<f64>,
    pub final_lambdas: Vec<f64>,
    pub clamp_events: u64,
}

impl MetricsSeries {
    #[inline]
    pub fn idx(&self, t: usize, i: usize) -> usize {
        t * self.n_bidders + i
    }

    pub fn totals(&self) -> RunTotals {
        let n = self.n_bidders;
        let last = self.horizon - 1;
        let per_bidder_utility: Vec<f64> =
            (0..n).map(|i| self.cum_utility[self.idx(last, i)]).collect();
        let per_bidder_value: Vec<f64> =
            (0..n).map(|i| self.cum_value[self.idx(last, i)]).collect();
        RunTotals {
            total_utility: per_bidder_utility.iter().sum(),
            total_value: per_bidder_value.iter().sum(),
            per_bidder_utility,
            per_bidder_value,
            final_lambdas: self.final_lambdas.clone(),
            clamp_events: self.clamp_events,
        }
    }
}

/// Final totals of one run (unnormalized sums over rounds).
#[derive(Debug, Clone)]
pub struct RunTotals {
    pub per_bidder_utility: Vec<f64>,
    pub per_bidder_value: Vec<f64>,
    pub total_utility: f64,
    pub total_value: f64,
    pub final_lambdas: Vec<f64>,
    pub clamp_events: u64,
}

/// Per-scenario aggregate over replications; totals normalized by T.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryStats {
    pub mechanism: String,
    pub algorithm: String,
    pub replications: usize,
    pub horizon: usize,
    pub total_utility: EstimateWithCI,
    pub total_value: EstimateWithCI,
    pub per_bidder_utility: Vec<EstimateWithCI>,
    pub per_bidder_value: Vec<EstimateWithCI>,
    pub clamp_events: u64,
}

/// Subsampled cumulative trajectories with CI bands, for plot-ready export.
#[derive(Debug, Clone)]
pub struct TrajectoryBands {
    pub scenario: String,
    /// 1-based round numbers of the sample points.
    pub t_points: Vec<usize>,
    pub metrics: Vec<String>,
    /// `[metric][point]`, flattened row-major.
    pub mean: Vec<f64>,
    pub half_width_95: Vec<f64>,
}

impl TrajectoryBands {
    pub fn at(&self, metric: usize, point: usize) -> (f64, f64) {
        let k = metric * self.t_points.len() + point;
        (self.mean[k], self.half_width_95[k])
    }
}

/// Result of a replication sweep for one scenario.
#[derive(Debug, Clone)]
pub struct ReplicationOutcome {
    pub stats: SummaryStats,
    pub totals: Vec<RunTotals>,
    pub bands: TrajectoryBands,
}

/// Execute T rounds under `cfg`, deterministically in
/// `(cfg.base_seed, run_index)`.
pub fn run_once(cfg: &ScenarioConfig, run_index: u64) -> Result<MetricsSeries> {
    cfg.validate()?;
    let n = cfg.n_bidders;
    let t_max = cfg.horizon;
    let mut states = cfg.build_states()?;

    let cells = t_max * n;
    let mut series = MetricsSeries {
        scenario: scenario_tag(&cfg.mechanism),
        run_index,
        n_bidders: n,
        horizon: t_max,
        values: Vec::with_capacity(cells),
        bids: Vec::with_capacity(cells),
        active: Vec::with_capacity(cells),
        won: Vec::with_capacity(cells),
        payments: Vec::with_capacity(cells),
        utilities: Vec::with_capacity(cells),
        lambdas: Vec::with_capacity(cells),
        cum_utility: Vec::with_capacity(cells),
        cum_value: Vec::with_capacity(cells),
        round_value: Vec::with_capacity(t_max),
        final_lambdas: Vec::new(),
        clamp_events: 0,
    };

    let mut cum_u = vec![0.0f64; n];
    let mut cum_v = vec![0.0f64; n];
    let mut values = vec![0.0f64; n];

    for t in 0..t_max {
        let round = t as u64;
        let mut vstream = RandomStream::derive(
            cfg.base_seed,
            StreamId { run: run_index, round, role: StreamRole::VALUES },
        );
        for (i, v) in values.iter_mut().enumerate() {
            *v = sample(cfg.value_spec(i), &mut vstream);
        }
        let mut ostream = RandomStream::derive(
            cfg.base_seed,
            StreamId { run: run_index, round, role: StreamRole::OUTSIDE },
        );
        let mut outside = sample(&cfg.outside_spec, &mut ostream);
        if let Some(scale_spec) = &cfg.outside_scale {
            let mut sstream = RandomStream::derive(
                cfg.base_seed,
                StreamId { run: run_index, round, role: StreamRole::SCALE },
            );
            outside *= sample(scale_spec, &mut sstream);
        }

        let (bids, active) = produce_bids(&cfg.mechanism, &values, &states);
        let outcome = run_round(&values, &bids, outside);

        for i in 0..n {
            cum_u[i] += outcome.utilities[i];
            cum_v[i] += if outcome.won[i] { values[i] } else { 0.0 };
            series.values.push(values[i]);
            series.bids.push(bids[i]);
            series.active.push(active[i]);
            series.won.push(outcome.won[i]);
            series.payments.push(outcome.payments[i]);
            series.utilities.push(outcome.utilities[i]);
            series.lambdas.push(states[i].lambda());
            series.cum_utility.push(cum_u[i]);
            series.cum_value.push(cum_v[i]);
        }
        series.round_value.push(outcome.coalition_value());

        for i in 0..n {
            states[i].observe(bids[i], outcome.won[i], outcome.payments[i], values[i]);
        }
    }

    series.final_lambdas = states.iter().map(|s| s.lambda()).collect();
    series.clamp_events = states.iter().map(|s| s.clamp_events()).sum();
    Ok(series)
}

/// Run the independent and coordinated scenarios on identical draws.
/// Algorithms are deterministic given feedback, so the pairing is exact.
pub fn run_paired(cfg: &ScenarioConfig, run_index: u64) -> Result<(MetricsSeries, MetricsSeries)> {
    let independent = run_once(&cfg.with_mechanism(MechanismSpec::Independent), run_index)?;
    let coordinated = run_once(&cfg.with_mechanism(MechanismSpec::HighestValue), run_index)?;
    Ok((independent, coordinated))
}

/// Default trajectory subsampling: every ⌈T/1000⌉-th round.
pub fn default_subsample(horizon: usize) -> usize {
    horizon.div_ceil(1000)
}

fn band_metric_names(n: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(2 * n + 2);
    for i in 0..n {
        names.push(format!("bidder{}_cum_utility", i + 1));
    }
    for i in 0..n {
        names.push(format!("bidder{}_cum_value", i + 1));
    }
    names.push("total_cum_utility".into());
    names.push("total_cum_value".into());
    names
}

/// Extract the band sample of one run at the grid points (flattened
/// `[metric][point]`).
fn band_sample(series: &MetricsSeries, t_points: &[usize]) -> Vec<f64> {
    let n = series.n_bidders;
    let mut out = Vec::with_capacity((2 * n + 2) * t_points.len());
    for i in 0..n {
        for &tp in t_points {
            out.push(series.cum_utility[series.idx(tp - 1, i)]);
        }
    }
    for i in 0..n {
        for &tp in t_points {
            out.push(series.cum_value[series.idx(tp - 1, i)]);
        }
    }
    for &tp in t_points {
        let t = tp - 1;
        out.push((0..n).map(|i| series.cum_utility[series.idx(t, i)]).sum());
    }
    for &tp in t_points {
        let t = tp - 1;
        out.push((0..n).map(|i| series.cum_value[series.idx(t, i)]).sum());
    }
    out
}

/// Run `m >= 2` independent replications of `cfg` (run indices 1..=m) and
/// aggregate normalized totals with 95% CIs. `subsample_every = 0` picks the
/// default grid.
pub fn run_replications(
    cfg: &ScenarioConfig,
    m: usize,
    subsample_every: usize,
) -> Result<ReplicationOutcome> {
    cfg.validate()?;
    if m < 2 {
        return Err(Error::Precondition(format!(
            "replication aggregation needs M >= 2 for confidence intervals, got {m}"
        )));
    }
    let every = if subsample_every == 0 { default_subsample(cfg.horizon) } else { subsample_every };
    let mut t_points: Vec<usize> = (1..=cfg.horizon).filter(|t| t % every == 0).collect();
    if t_points.last() != Some(&cfg.horizon) {
        t_points.push(cfg.horizon);
    }

    let per_run: Vec<(RunTotals, Vec<f64>)> = (1..=m as u64)
        .into_par_iter()
        .map(|run| {
            let series = run_once(cfg, run)?;
            Ok((series.totals(), band_sample(&series, &t_points)))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(aggregate(cfg, per_run, t_points))
}

fn aggregate(
    cfg: &ScenarioConfig,
    per_run: Vec<(RunTotals, Vec<f64>)>,
    t_points: Vec<usize>,
) -> ReplicationOutcome {
    let m = per_run.len();
    let n = cfg.n_bidders;
    let t_norm = cfg.horizon as f64;

    let collect = |f: &dyn Fn(&RunTotals) -> f64| -> EstimateWithCI {
        let xs: Vec<f64> = per_run.iter().map(|(tot, _)| f(tot) / t_norm).collect();
        EstimateWithCI::from_samples(&xs)
    };

    let stats = SummaryStats {
        mechanism: cfg.mechanism.tag(),
        algorithm: cfg.algorithm.tag(),
        replications: m,
        horizon: cfg.horizon,
        total_utility: collect(&|t| t.total_utility),
        total_value: collect(&|t| t.total_value),
        per_bidder_utility: (0..n)
            .map(|i| collect(&move |t: &RunTotals| t.per_bidder_utility[i]))
            .collect(),
        per_bidder_value: (0..n)
            .map(|i| collect(&move |t: &RunTotals| t.per_bidder_value[i]))
            .collect(),
        clamp_events: per_run.iter().map(|(t, _)| t.clamp_events).sum(),
    };

    let metrics = band_metric_names(n);
    let cells = metrics.len() * t_points.len();
    let mut sum = vec![0.0f64; cells];
    let mut sum_sq = vec![0.0f64; cells];
    for (_, sample) in &per_run {
        debug_assert_eq!(sample.len(), cells);
        for (k, x) in sample.iter().enumerate() {
            sum[k] += x;
            sum_sq[k] += x * x;
        }
    }
    let mut mean = vec![0.0f64; cells];
    let mut half = vec![0.0f64; cells];
    for k in 0..cells {
        let est = EstimateWithCI::from_moments(sum[k], sum_sq[k], m);
        mean[k] = est.mean;
        half[k] = est.half_width_95;
    }

    ReplicationOutcome {
        stats,
        totals: per_run.into_iter().map(|(t, _)| t).collect(),
        bands: TrajectoryBands {
            scenario: scenario_tag(&cfg.mechanism),
            t_points,
            metrics,
            mean,
            half_width_95: half,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assumption::estimate_delta;

    fn base_config() -> ScenarioConfig {
        ScenarioConfig {
            n_bidders: 2,
            horizon: 200,
            value_specs: vec![DistributionSpec::uniform(0.0, 1.0).unwrap()],
            outside_spec: DistributionSpec::uniform(0.0, 0.9).unwrap(),
            outside_scale: None,
            mechanism: MechanismSpec::Independent,
            algorithm: AlgorithmKind::MdRos,
            mirror_map: None,
            alpha_override: None,
            replications: 4,
            base_seed: 1234,
        }
    }

    #[test]
    fn truthful_single_bidder_utility_never_negative() {
        let mut cfg = base_config();
        cfg.n_bidders = 1;
        cfg.algorithm = AlgorithmKind::Truthful;
        let series = run_once(&cfg, 1).unwrap();
        for u in &series.utilities {
            assert!(*u >= 0.0, "truthful second-price utility went negative: {u}");
        }
    }

    #[test]
    fn coordinated_winner_carries_the_highest_value() {
        let cfg = base_config().with_mechanism(MechanismSpec::HighestValue);
        let series = run_once(&cfg, 2).unwrap();
        for t in 0..series.horizon {
            let row: Vec<f64> =
                (0..series.n_bidders).map(|i| series.values[series.idx(t, i)]).collect();
            let vmax = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if series.round_value[t] > 0.0 {
                assert_eq!(series.round_value[t], vmax);
            }
        }
    }

    #[test]
    fn reruns_are_bit_identical() {
        let cfg = base_config();
        let a = run_once(&cfg, 3).unwrap();
        let b = run_once(&cfg, 3).unwrap();
        assert_eq!(a.bids.len(), b.bids.len());
        for k in 0..a.bids.len() {
            assert_eq!(a.bids[k].to_bits(), b.bids[k].to_bits());
            assert_eq!(a.utilities[k].to_bits(), b.utilities[k].to_bits());
            assert_eq!(a.lambdas[k].to_bits(), b.lambdas[k].to_bits());
        }
    }

    #[test]
    fn paired_single_bidder_scenarios_coincide() {
        let mut cfg = base_config();
        cfg.n_bidders = 1;
        let (i, c) = run_paired(&cfg, 5).unwrap();
        let (ti, tc) = (i.totals(), c.totals());
        assert_eq!(ti.total_utility.to_bits(), tc.total_utility.to_bits());
        assert_eq!(ti.total_value.to_bits(), tc.total_value.to_bits());
    }

    #[test]
    fn distinct_runs_differ() {
        let cfg = base_config();
        let a = run_once(&cfg, 1).unwrap();
        let b = run_once(&cfg, 2).unwrap();
        assert_ne!(a.values[0].to_bits(), b.values[0].to_bits());
    }

    #[test]
    fn replications_reject_m_below_two() {
        let cfg = base_config();
        assert!(run_replications(&cfg, 1, 0).is_err());
        let out = run_replications(&cfg, 2, 0).unwrap();
        assert!(out.stats.total_utility.half_width_95.is_finite());
        assert_eq!(out.totals.len(), 2);
    }

    #[test]
    fn per_bidder_totals_sum_to_coalition_totals() {
        let cfg = base_config().with_mechanism(MechanismSpec::HighestValue);
        let series = run_once(&cfg, 7).unwrap();
        let tot = series.totals();
        let sum_u: f64 = tot.per_bidder_utility.iter().sum();
        assert_eq!(sum_u.to_bits(), tot.total_utility.to_bits());
    }

    #[test]
    fn dual_variable_descends_under_coordination() {
        // HighestValue + MdRos with Δ > 0: over active rounds the mean dual
        // step is at most −αΔ/N within noise.
        let mut cfg = base_config();
        cfg.n_bidders = 4;
        cfg.horizon = 2000;
        cfg.outside_spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
        cfg.mechanism = MechanismSpec::HighestValue;

        let mut s = RandomStream::from_seed(99);
        let delta =
            estimate_delta(&cfg.value_specs, &cfg.outside_spec, 4, 200_000, &mut s).unwrap();
        assert!(delta.mean > 0.0);

        let alpha = 1.0 / (cfg.horizon as f64).sqrt();
        let mut steps = Vec::new();
        for run in 1..=20u64 {
            let series = run_once(&cfg, run).unwrap();
            for t in 0..series.horizon - 1 {
                for i in 0..series.n_bidders {
                    if series.active[series.idx(t, i)] {
                        let y0 = series.lambdas[series.idx(t, i)].ln();
                        let y1 = series.lambdas[series.idx(t + 1, i)].ln();
                        steps.push(y1 - y0);
                    }
                }
            }
        }
        let est = EstimateWithCI::from_samples(&steps);
        let bound = -alpha * delta.mean / cfg.n_bidders as f64;
        let se = est.half_width_95 / 1.96;
        assert!(
            est.mean <= bound + 3.0 * se,
            "mean dual step {} vs bound {bound} (3se = {})",
            est.mean,
            3.0 * se
        );
    }

    #[test]
    fn bands_land_on_the_grid() {
        let cfg = base_config();
        let out = run_replications(&cfg, 3, 50).unwrap();
        assert_eq!(out.bands.t_points, vec![50, 100, 150, 200]);
        assert_eq!(out.bands.metrics.len(), 2 * cfg.n_bidders + 2);
        assert_eq!(
            out.bands.mean.len(),
            out.bands.metrics.len() * out.bands.t_points.len()
        );
    }

    #[test]
    fn config_validation_catches_bad_shapes() {
        let mut cfg = base_config();
        cfg.value_specs = vec![
            DistributionSpec::uniform(0.0, 1.0).unwrap(),
            DistributionSpec::uniform(0.0, 1.0).unwrap(),
            DistributionSpec::uniform(0.0, 1.0).unwrap(),
        ];
        assert!(cfg.validate().is_err());

        let mut cfg = base_config();
        cfg.value_specs = vec![DistributionSpec::uniform(0.0, 1.5).unwrap()];
        assert!(cfg.validate().is_err(), "value support above 1 must be rejected");

        let mut cfg = base_config();
        cfg.outside_scale = Some(DistributionSpec::uniform(0.5, 2.0).unwrap());
        assert!(cfg.validate().is_err(), "scale support below 1 must be rejected");
    }
}
