//! One round of the second-price auction: a coalition's bid vector against an
//! outside bid, resolved into allocation, payments, and utilities.

/// Everything one auction round produced. Competing bids are recorded for all
/// bidders (not only the winner) because the trace schema exports them.
#[derive(Debug, Clone)]
pub struct RoundOutcome {
    pub values: Vec<f64>,
    pub bids: Vec<f64>,
    pub outside_bid: f64,
    /// d_i = max(outside bid, highest bid among the other coalition members).
    pub competing: Vec<f64>,
    pub won: Vec<bool>,
    pub payments: Vec<f64>,
    pub utilities: Vec<f64>,
    /// Index of the winning coalition bidder, if the coalition won at all.
    pub winner: Option<usize>,
}

impl RoundOutcome {
    /// Coalition value of the round: Σᵢ vᵢ·xᵢ.
    pub fn coalition_value(&self) -> f64 {
        match self.winner {
            Some(i) => self.values[i],
            None => 0.0,
        }
    }
}

/// Resolve one round.
///
/// Allocation follows x = I{bid ≥ competing}. Ties are deterministic: a
/// coalition bidder beats the outside bid at equality, and among coalition
/// bidders tied at the maximal bid the lowest index wins, with only the
/// winner's flag set so at most one bidder wins.
pub fn run_round(values: &[f64], bids: &[f64], outside_bid: f64) -> RoundOutcome {
    let n = values.len();
    assert_eq!(n, bids.len(), "values and bids length mismatch: {} vs {}", n, bids.len());
    assert!(n >= 1, "auction needs at least one coalition bidder");
    assert!(outside_bid >= 0.0, "outside bid must be nonnegative");
    assert!(bids.iter().all(|b| *b >= 0.0), "bids must be nonnegative");

    // Highest and second-highest coalition bids, tie to the lowest index.
    let mut top = 0usize;
    for (i, b) in bids.iter().enumerate().skip(1) {
        if *b > bids[top] {
            top = i;
        }
    }
    let mut second = 0.0f64;
    for (i, b) in bids.iter().enumerate() {
        if i != top && *b > second {
            second = *b;
        }
    }

    let competing: Vec<f64> = (0..n)
        .map(|i| if i == top { outside_bid.max(second) } else { outside_bid.max(bids[top]) })
        .collect();

    let mut won = vec![false; n];
    let mut payments = vec![0.0; n];
    let mut utilities = vec![0.0; n];
    let winner = if bids[top] >= competing[top] {
        won[top] = true;
        payments[top] = competing[top];
        utilities[top] = values[top] - competing[top];
        Some(top)
    } else {
        None
    };

    RoundOutcome {
        values: values.to_vec(),
        bids: bids.to_vec(),
        outside_bid,
        competing,
        won,
        payments,
        utilities,
        winner,
    }
}
