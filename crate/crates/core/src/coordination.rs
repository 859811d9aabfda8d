//! Coordination mechanisms: how the coalition turns realized values and
//! bidder states into the round's bid vector.
//!
//! Independent lets every bidder run its algorithm. HighestValue silences
//! everyone except the realized-argmax bidder. The remaining variants form a
//! fixed comparison family for the "any coordination mechanism" value-ceiling
//! checks: quantifying over all mechanisms is impossible, so the artifact
//! ships natural baselines instead of overclaiming.

use crate::bidders::BidderState;

#[derive(Debug, Clone, PartialEq)]
pub enum MechanismSpec {
    /// Every bidder submits its algorithm's bid.
    Independent,
    /// Only the highest-value bidder submits its algorithm's bid; the rest
    /// bid exactly 0 and are marked silenced.
    HighestValue,
    /// The mechanism overrides every bidder to truthful bids.
    AllTruthful,
    /// Every bidder bids (1 + 1/λ₀)·value with a frozen shared multiplier.
    FixedMultiplierAll(f64),
    /// Nobody is silenced: the k highest-value bidders bid with multiplier
    /// λ₀, the rest bid truthfully.
    ScaleTopK { k: usize, lambda0: f64 },
}

impl MechanismSpec {
    pub fn tag(&self) -> String {
        match self {
            MechanismSpec::Independent => "independent".into(),
            MechanismSpec::HighestValue => "highest-value".into(),
            MechanismSpec::AllTruthful => "all-truthful".into(),
            MechanismSpec::FixedMultiplierAll(l) => format!("fixed-multiplier-all({l})"),
            MechanismSpec::ScaleTopK { k, lambda0 } => format!("scale-top-k({k},{lambda0})"),
        }
    }
}

/// Produce the round's bids and the active mask. A silenced bidder (mask
/// false) submits exactly 0; its `observe` must later be called with
/// `own_bid_submitted = 0`.
pub fn produce_bids(
    mech: &MechanismSpec,
    values: &[f64],
    states: &[BidderState],
) -> (Vec<f64>, Vec<bool>) {
    let n = values.len();
    assert!(n >= 1, "coalition must be nonempty");
    assert_eq!(n, states.len(), "values and states length mismatch");

    match mech {
        MechanismSpec::Independent => {
            let bids = (0..n).map(|i| states[i].next_bid(values[i])).collect();
            (bids, vec![true; n])
        }
        MechanismSpec::HighestValue => {
            let star = argmax(values);
            let mut bids = vec![0.0; n];
            let mut active = vec![false; n];
            bids[star] = states[star].next_bid(values[star]);
            active[star] = true;
            (bids, active)
        }
        MechanismSpec::AllTruthful => (values.to_vec(), vec![true; n]),
        MechanismSpec::FixedMultiplierAll(lambda0) => {
            assert!(*lambda0 > 0.0, "fixed multiplier requires lambda0 > 0");
            let mult = 1.0 + 1.0 / lambda0;
            let bids = values.iter().map(|v| mult * v).collect();
            (bids, vec![true; n])
        }
        MechanismSpec::ScaleTopK { k, lambda0 } => {
            assert!(*lambda0 > 0.0, "scale-top-k requires lambda0 > 0");
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|a, b| values[*b].total_cmp(&values[*a]).then(a.cmp(b)));
            let mult = 1.0 + 1.0 / lambda0;
            let mut bids = values.to_vec();
            for &i in order.iter().take((*k).min(n)) {
                bids[i] = mult * values[i];
            }
            (bids, vec![true; n])
        }
    }
}

/// Lowest-index argmax, consistent with the auction's tie rule.
fn argmax(xs: &[f64]) -> usize {
    let mut best = 0usize;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if *x > xs[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{sample, DistributionSpec, RandomStream};

    fn md_states(n: usize) -> Vec<BidderState> {
        (0..n).map(|_| BidderState::md_ros(4000)).collect()
    }

    #[test]
    fn highest_value_silences_everyone_else() {
        let states = md_states(3);
        let (bids, active) = produce_bids(&MechanismSpec::HighestValue, &[0.2, 0.9, 0.5], &states);
        assert_eq!(active, vec![false, true, false]);
        assert_eq!(bids[0], 0.0);
        assert_eq!(bids[2], 0.0);
        assert!((bids[1] - 1.8).abs() < 1e-15);
    }

    #[test]
    fn independent_keeps_everyone_active() {
        let states = md_states(3);
        let (bids, active) = produce_bids(&MechanismSpec::Independent, &[0.2, 0.9, 0.5], &states);
        assert_eq!(active, vec![true, true, true]);
        let want = [0.4, 1.8, 1.0];
        for (b, w) in bids.iter().zip(want) {
            assert!((b - w).abs() < 1e-15);
        }
    }

    #[test]
    fn trigger_overbidders_bid_the_bound_once_silenced() {
        let mut states: Vec<BidderState> =
            (0..2).map(|_| BidderState::trigger_overbid()).collect();
        let values = [0.2, 0.9];
        let (bids, active) = produce_bids(&MechanismSpec::HighestValue, &values, &states);
        for i in 0..2 {
            states[i].observe(bids[i], false, 0.0, values[i]);
        }
        assert!(!active[0]);
        // Bidder 0 was silenced; next time it is selected it bids B = 1.
        let (bids, _) = produce_bids(&MechanismSpec::HighestValue, &[0.3, 0.1], &states);
        assert_eq!(bids[0], 1.0);
    }

    #[test]
    fn silenced_md_bidder_keeps_its_multiplier() {
        let mut states = md_states(2);
        let values = [0.1, 0.8];
        let (bids, _) = produce_bids(&MechanismSpec::HighestValue, &values, &states);
        states[0].observe(bids[0], false, 0.0, values[0]);
        assert_eq!(states[0].lambda(), 1.0);
    }

    #[test]
    fn single_bidder_mechanisms_coincide() {
        let states = md_states(1);
        let (a, ma) = produce_bids(&MechanismSpec::Independent, &[0.6], &states);
        let (b, mb) = produce_bids(&MechanismSpec::HighestValue, &[0.6], &states);
        assert_eq!(a, b);
        assert_eq!(ma, mb);
    }

    #[test]
    fn scale_top_k_boosts_only_the_top_values() {
        let states = md_states(4);
        let values = [0.1, 0.9, 0.5, 0.7];
        let mech = MechanismSpec::ScaleTopK { k: 2, lambda0: 1.0 };
        let (bids, active) = produce_bids(&mech, &values, &states);
        assert!(active.iter().all(|a| *a));
        assert!((bids[1] - 1.8).abs() < 1e-15);
        assert!((bids[3] - 1.4).abs() < 1e-15);
        assert_eq!(bids[0], 0.1);
        assert_eq!(bids[2], 0.5);
    }

    #[test]
    fn activation_frequency_is_one_over_n() {
        // i.i.d. values: each bidder is the active one with probability 1/N.
        let n = 4;
        let rounds = 20_000;
        let spec = DistributionSpec::uniform(0.0, 1.0).unwrap();
        let states = md_states(n);
        let mut s = RandomStream::from_seed(77);
        let mut counts = vec![0usize; n];
        for _ in 0..rounds {
            let values: Vec<f64> = (0..n).map(|_| sample(&spec, &mut s)).collect();
            let (_, active) = produce_bids(&MechanismSpec::HighestValue, &values, &states);
            assert_eq!(active.iter().filter(|a| **a).count(), 1);
            counts[active.iter().position(|a| *a).unwrap()] += 1;
        }
        let p = 1.0 / n as f64;
        let sigma = (p * (1.0 - p) / rounds as f64).sqrt();
        for (i, c) in counts.iter().enumerate() {
            let freq = *c as f64 / rounds as f64;
            assert!((freq - p).abs() <= 3.0 * sigma, "bidder {i} active at {freq}");
        }
    }
}
