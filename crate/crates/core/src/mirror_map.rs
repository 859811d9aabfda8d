//! Legendre mirror maps and the multiplier update, in both the dual
//! (y-space) closed form and a derivative-free numeric argmin used as an
//! independent oracle for the first-order-condition derivation.

use crate::error::{Error, Result};

/// Multiplier clamp range. The theory lets λ → 0 (bids → ∞); at B = 1,
/// λ = 1e-9 already yields bids ≥ 1e9, behaviorally identical to ∞ against
/// bounded outside bids, while keeping h′ finite. Clamp hits are counted by
/// the bidder state and surfaced in run summaries.
pub const LAMBDA_MIN: f64 = 1e-9;
pub const LAMBDA_MAX: f64 = 1e9;

/// A Legendre mirror map on (0, ∞): strictly convex `h` whose derivative is a
/// strictly increasing bijection onto all of ℝ.
pub trait MirrorMap: Send + Sync {
    fn h(&self, lambda: f64) -> f64;
    fn h_prime(&self, lambda: f64) -> f64;
    fn h_prime_inverse(&self, y: f64) -> f64;
    fn name(&self) -> &'static str {
        "custom"
    }
}

/// The entropy map h(λ) = λ log λ − λ, for which the multiplier update is the
/// multiplicative rule λ′ = λ·exp(−αg).
#[derive(Debug, Clone, Copy, Default)]
pub struct EntropyMap;

impl MirrorMap for EntropyMap {
    fn h(&self, lambda: f64) -> f64 {
        lambda * lambda.ln() - lambda
    }
    fn h_prime(&self, lambda: f64) -> f64 {
        lambda.ln()
    }
    fn h_prime_inverse(&self, y: f64) -> f64 {
        y.exp()
    }
    fn name(&self) -> &'static str {
        "entropy"
    }
}

/// Bregman divergence D_h(λ, μ) = h(λ) − h(μ) − h′(μ)(λ − μ).
pub fn bregman(map: &dyn MirrorMap, lambda: f64, mu: f64) -> f64 {
    map.h(lambda) - map.h(mu) - map.h_prime(mu) * (lambda - mu)
}

/// One multiplier step: λ′ = h′⁻¹(h′(λ) − α·g), clamped to
/// `[LAMBDA_MIN, LAMBDA_MAX]`.
pub fn md_update(map: &dyn MirrorMap, lambda: f64, g: f64, alpha: f64) -> f64 {
    assert!(
        lambda.is_finite() && g.is_finite() && alpha.is_finite(),
        "md_update requires finite inputs: lambda={lambda}, g={g}, alpha={alpha}"
    );
    assert!(lambda > 0.0 && alpha > 0.0, "md_update requires lambda > 0 and alpha > 0");
    let y_next = map.h_prime(lambda) - alpha * g;
    map.h_prime_inverse(y_next).clamp(LAMBDA_MIN, LAMBDA_MAX)
}

/// Reference implementation of the same step as a bounded one-dimensional
/// minimization of αgλ + D_h(λ, λ_t) over λ > 0.
///
/// Exists purely as an independent oracle: it never evaluates
/// `h_prime_inverse`, so agreement with [`md_update`] checks the first-order
/// condition α·g + h′(λ′) − h′(λ) = 0 rather than restating it. A golden
/// section pass brackets the basin; bisection on a centered finite-difference
/// gradient then polishes the argmin well below 1e-9 absolute error.
/// A minimizer at the clamp boundary is returned clamped.
pub fn md_update_argmin(map: &dyn MirrorMap, lambda: f64, g: f64, alpha: f64) -> f64 {
    assert!(
        lambda.is_finite() && g.is_finite() && alpha.is_finite(),
        "md_update_argmin requires finite inputs"
    );
    assert!(lambda > 0.0 && alpha > 0.0);
    let objective = |x: f64| alpha * g * x + bregman(map, x, lambda);

    // Golden section on s = ln λ. The objective is strictly convex in λ with
    // a unique minimizer, hence unimodal in s. Stops while the bracket is
    // still wide enough that the finite-difference gradient at its ends is
    // far above float noise; the bisection below does the precision work.
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let (mut a, mut b) = (LAMBDA_MIN.ln(), LAMBDA_MAX.ln());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c.exp()), objective(d.exp()));
    for _ in 0..35 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d.exp());
        }
    }

    // Polish: bisect the sign of the finite-difference gradient.
    let fd_grad = |x: f64| {
        let hstep = 6e-6 * x.max(1e-9);
        (objective(x + hstep) - objective(x - hstep)) / (2.0 * hstep)
    };
    let (mut lo, mut hi) = (a.exp(), b.exp());
    if fd_grad(lo) >= 0.0 {
        // Objective already increasing at the lower edge: minimizer at or
        // below it, clamp.
        return if lo <= LAMBDA_MIN * (1.0 + 1e-6) { LAMBDA_MIN } else { lo };
    }
    if fd_grad(hi) <= 0.0 {
        return if hi >= LAMBDA_MAX * (1.0 - 1e-6) { LAMBDA_MAX } else { hi };
    }
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if fd_grad(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 * hi {
            break;
        }
    }
    (0.5 * (lo + hi)).clamp(LAMBDA_MIN, LAMBDA_MAX)
}

/// Registration gate for mirror maps. Property-tests the Legendre definition
/// on deterministic grids; maps whose derivative is not an increasing
/// bijection onto ℝ (e.g. the quadratic map, whose h′ only covers (0, ∞))
/// are rejected.
pub fn validate_map(map: &dyn MirrorMap) -> Result<()> {
    // h' strictly increasing across the clamp range.
    let mut prev = f64::NEG_INFINITY;
    for k in 0..=180 {
        let lambda = 10f64.powf(-9.0 + 18.0 * k as f64 / 180.0);
        let y = map.h_prime(lambda);
        if !y.is_finite() {
            return Err(Error::MapRejected(format!("h'({lambda:.3e}) is not finite")));
        }
        if y <= prev {
            return Err(Error::MapRejected(format!(
                "h' is not strictly increasing near lambda = {lambda:.3e}"
            )));
        }
        prev = y;
    }

    // Round trip h'^{-1}(h'(λ)) = λ to 1e-12 relative on [1e-6, 1e6].
    for k in 0..=120 {
        let lambda = 10f64.powf(-6.0 + 12.0 * k as f64 / 120.0);
        let round = map.h_prime_inverse(map.h_prime(lambda));
        if !(round.is_finite() && ((round - lambda) / lambda).abs() <= 1e-12) {
            return Err(Error::MapRejected(format!(
                "h'^-1(h'({lambda:.3e})) = {round:.17e}, round trip exceeds 1e-12 relative"
            )));
        }
    }

    // Surjectivity onto ℝ: negative and positive targets must be reachable
    // from (0, ∞). This is what rules out h(λ) = λ²/2.
    for y in [-32.0, -8.0, -1.0, 0.0, 1.0, 8.0, 32.0] {
        let lambda = map.h_prime_inverse(y);
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::MapRejected(format!(
                "h'^-1({y}) = {lambda}, not a positive real; h' is not onto ℝ"
            )));
        }
        let back = map.h_prime(lambda);
        if (back - y).abs() > 1e-9 * y.abs().max(1.0) {
            return Err(Error::MapRejected(format!(
                "h'(h'^-1({y})) = {back}, inverse inconsistent"
            )));
        }
    }

    // Bregman nonnegativity on a deterministic pair grid.
    let grid: Vec<f64> = (0..16).map(|k| 10f64.powf(-6.0 + 12.0 * k as f64 / 15.0)).collect();
    for &l in &grid {
        for &m in &grid {
            let d = bregman(map, l, m);
            if d < -1e-9 {
                return Err(Error::MapRejected(format!(
                    "Bregman divergence D_h({l:.3e}, {m:.3e}) = {d:.3e} < 0"
                )));
            }
        }
    }
    Ok(())
}
