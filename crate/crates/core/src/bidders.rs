//! Bidder algorithms: the mirror-descent RoS auto-bidder, the truthful
//! bidder, the trigger-overbidding adversary, and a fixed-multiplier bidder.
//!
//! Every algorithm weakly overbids (bid ≥ value). States carry only the
//! sufficient statistics each algorithm needs — the multiplier for the
//! auto-bidder, the trigger flag for the adversary — the simulator records
//! full traces separately.

use std::fmt;
use std::sync::Arc;

use crate::distributions::VALUE_BOUND;
use crate::error::Result;
use crate::mirror_map::{md_update, validate_map, EntropyMap, MirrorMap, LAMBDA_MAX, LAMBDA_MIN};

/// Which bidding rule a state runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmKind {
    /// Mirror-descent auto-bidder: bid (1 + 1/λ)·v, λ updated from realized
    /// utility.
    MdRos,
    /// Always bid the value.
    Truthful,
    /// Bid the value until ever silenced (a past submitted bid of 0), then
    /// bid the maximum B forever.
    TriggerOverbid,
    /// Bid (1 + 1/λ₀)·v with a frozen multiplier.
    FixedMultiplier(f64),
}

impl AlgorithmKind {
    pub fn tag(&self) -> String {
        match self {
            AlgorithmKind::MdRos => "md-ros".into(),
            AlgorithmKind::Truthful => "truthful".into(),
            AlgorithmKind::TriggerOverbid => "trigger-overbid".into(),
            AlgorithmKind::FixedMultiplier(l) => format!("fixed-multiplier({l})"),
        }
    }
}

/// One bidder's algorithm state.
#[derive(Clone)]
pub struct BidderState {
    algorithm: AlgorithmKind,
    map: Arc<dyn MirrorMap>,
    lambda: f64,
    alpha: f64,
    ever_bid_zero: bool,
    clamp_events: u64,
}

impl fmt::Debug for BidderState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BidderState")
            .field("algorithm", &self.algorithm)
            .field("map", &self.map.name())
            .field("lambda", &self.lambda)
            .field("alpha", &self.alpha)
            .field("ever_bid_zero", &self.ever_bid_zero)
            .field("clamp_events", &self.clamp_events)
            .finish()
    }
}

impl BidderState {
    /// Mirror-descent auto-bidder with the entropy map, λ₁ = 1 and the
    /// horizon-matched learning rate α = 1/√T.
    pub fn md_ros(horizon: usize) -> Self {
        BidderState::md_ros_with(Arc::new(EntropyMap), horizon, None)
            .expect("entropy map always registers")
    }

    /// Mirror-descent auto-bidder with a caller-supplied map. The map is
    /// property-tested at registration. `alpha_override` departs from the
    /// 1/√T schedule and is exposed only for off-schedule experiments.
    pub fn md_ros_with(
        map: Arc<dyn MirrorMap>,
        horizon: usize,
        alpha_override: Option<f64>,
    ) -> Result<Self> {
        validate_map(map.as_ref())?;
        let alpha = alpha_override.unwrap_or(1.0 / (horizon.max(1) as f64).sqrt());
        Ok(BidderState {
            algorithm: AlgorithmKind::MdRos,
            map,
            lambda: 1.0,
            alpha,
            ever_bid_zero: false,
            clamp_events: 0,
        })
    }

    pub fn truthful() -> Self {
        BidderState::stateless(AlgorithmKind::Truthful)
    }

    pub fn trigger_overbid() -> Self {
        BidderState::stateless(AlgorithmKind::TriggerOverbid)
    }

    pub fn fixed_multiplier(lambda0: f64) -> Self {
        assert!(lambda0 > 0.0, "fixed multiplier requires lambda0 > 0");
        BidderState::stateless(AlgorithmKind::FixedMultiplier(lambda0))
    }

    fn stateless(algorithm: AlgorithmKind) -> Self {
        BidderState {
            algorithm,
            map: Arc::new(EntropyMap),
            lambda: 1.0,
            alpha: 1.0,
            ever_bid_zero: false,
            clamp_events: 0,
        }
    }

    pub fn algorithm(&self) -> AlgorithmKind {
        self.algorithm
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ever_bid_zero(&self) -> bool {
        self.ever_bid_zero
    }

    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    /// The bid this bidder's algorithm produces for `value`. Always ≥ value
    /// (weak overbidding).
    pub fn next_bid(&self, value: f64) -> f64 {
        assert!(
            (0.0..=VALUE_BOUND).contains(&value),
            "value {value} outside [0, {VALUE_BOUND}]"
        );
        match self.algorithm {
            AlgorithmKind::MdRos => (1.0 + 1.0 / self.lambda) * value,
            AlgorithmKind::Truthful => value,
            AlgorithmKind::TriggerOverbid => {
                if self.ever_bid_zero {
                    VALUE_BOUND
                } else {
                    value
                }
            }
            AlgorithmKind::FixedMultiplier(l0) => (1.0 + 1.0 / l0) * value,
        }
    }

    /// Feed back one round's outcome. `own_bid_submitted` is the bid that
    /// actually entered the auction (0 when the mechanism silenced this
    /// bidder). Realized utility g = value·x − payment; a silenced round has
    /// g = 0, leaving the multiplier unchanged.
    pub fn observe(&mut self, own_bid_submitted: f64, won: bool, payment: f64, value: f64) {
        assert!(won || payment == 0.0, "losing bidder cannot pay (payment = {payment})");
        match self.algorithm {
            AlgorithmKind::MdRos => {
                let g = if won { value - payment } else { 0.0 };
                let next = md_update(self.map.as_ref(), self.lambda, g, self.alpha);
                if next == LAMBDA_MIN || next == LAMBDA_MAX {
                    self.clamp_events += 1;
                }
                self.lambda = next;
            }
            AlgorithmKind::TriggerOverbid => {
                if own_bid_submitted == 0.0 {
                    self.ever_bid_zero = true;
                }
            }
            AlgorithmKind::Truthful | AlgorithmKind::FixedMultiplier(_) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn md_ros_bid_doubles_value_at_unit_multiplier() {
        let b = BidderState::md_ros(4000);
        assert_eq!(b.next_bid(0.4), 0.8);
        assert!((b.alpha() - 1.0 / 4000f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.lambda(), 1.0);
    }

    #[test]
    fn triggered_adversary_bids_the_bound() {
        let mut b = BidderState::trigger_overbid();
        assert_eq!(b.next_bid(0.3), 0.3);
        b.observe(0.0, false, 0.0, 0.3);
        assert!(b.ever_bid_zero());
        assert_eq!(b.next_bid(0.3), 1.0);
        // The flag is monotone: later nonzero bids do not reset it.
        b.observe(1.0, true, 0.4, 0.5);
        assert!(b.ever_bid_zero());
    }

    #[test]
    fn truthful_bids_value() {
        let b = BidderState::truthful();
        assert_eq!(b.next_bid(0.55), 0.55);
    }

    #[test]
    fn md_ros_observe_updates_multiplier() {
        // won with value 0.6, payment 0.4 at α = 0.1: g = 0.2, λ' = exp(−0.02).
        let mut b =
            BidderState::md_ros_with(Arc::new(EntropyMap), 100, Some(0.1)).unwrap();
        b.observe(1.2, true, 0.4, 0.6);
        assert!((b.lambda() - 0.9801986733067553).abs() < 1e-12, "{}", b.lambda());
    }

    #[test]
    fn silenced_round_leaves_multiplier_unchanged() {
        let mut b = BidderState::md_ros(4000);
        b.observe(0.0, false, 0.0, 0.9);
        assert_eq!(b.lambda(), 1.0);
    }

    #[test]
    fn replaying_a_trace_reproduces_lambda_exactly() {
        let feedback = [
            (0.8, true, 0.3, 0.4),
            (0.0, false, 0.0, 0.7),
            (1.5, true, 0.9, 0.8),
            (0.2, false, 0.0, 0.1),
        ];
        let run = || {
            let mut b = BidderState::md_ros(1000);
            for (bid, won, pay, v) in feedback {
                b.observe(bid, won, pay, v);
            }
            b.lambda()
        };
        assert_eq!(run().to_bits(), run().to_bits());
    }

    #[test]
    #[should_panic(expected = "outside")]
    fn next_bid_rejects_out_of_range_value() {
        BidderState::truthful().next_bid(1.5);
    }

    #[test]
    #[should_panic(expected = "losing bidder cannot pay")]
    fn observe_rejects_payment_without_win() {
        BidderState::md_ros(10).observe(1.0, false, 0.5, 0.5);
    }

    proptest! {
        #[test]
        fn every_algorithm_weakly_overbids(
            value in 0.0f64..=1.0,
            lambda0 in 1e-3f64..1e3,
            triggered in proptest::bool::ANY,
        ) {
            let mut states = vec![
                BidderState::md_ros(4000),
                BidderState::truthful(),
                BidderState::trigger_overbid(),
                BidderState::fixed_multiplier(lambda0),
            ];
            if triggered {
                states[2].observe(0.0, false, 0.0, value);
            }
            for s in &states {
                prop_assert!(s.next_bid(value) >= value);
            }
        }
    }
}
