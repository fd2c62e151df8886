//! Direct construction of the optimal symmetric triple for channels that
//! commute with the reflection `x ↦ −x`.
//!
//! The triple is the north pole with probability `p` and the pair
//! `(±sin θ, 0, cos θ)` with `(1−p)/2` each. Its average lies on the z axis,
//! and at the optimum all three outputs sit at the same relative-entropy
//! distance from the average output. For each `θ` that condition fixes `p`;
//! the remaining scalar problem in `θ` is solved by scan and golden section.

use super::{chi_weighted, CapacityResult};
use crate::bloch::{relative_entropy, BlochVector};
use crate::channel::QubitChannel;
use crate::error::{Error, Result};
use crate::optimize::{bisect, golden_max};

const P_EDGE: f64 = 1e-12;
const THETA_GRID: usize = 400;

fn triple(p: f64, theta: f64) -> [(f64, BlochVector); 3] {
    let (s, c) = theta.sin_cos();
    let side = 0.5 * (1.0 - p);
    [
        (p, BlochVector::NORTH),
        (side, BlochVector::new(s, 0.0, c)),
        (side, BlochVector::new(-s, 0.0, c)),
    ]
}

/// Probability of the north pole that makes the pole and the side states
/// equidistant from the average output, if such a `p` exists in `(0, 1)`.
fn equidistant_p(channel: &QubitChannel, theta: f64) -> Option<f64> {
    let north = channel.apply(BlochVector::NORTH);
    let side = channel.apply(BlochVector::in_xz_plane(theta));
    let gap = |p: f64| {
        let avg = channel.apply(BlochVector::new(0.0, 0.0, p + (1.0 - p) * theta.cos()));
        let d_pole = relative_entropy(north, avg);
        let d_side = relative_entropy(side, avg);
        if d_pole.is_infinite() && d_side.is_infinite() {
            return f64::NAN;
        }
        d_pole - d_side
    };
    bisect(gap, P_EDGE, 1.0 - P_EDGE, 1e-15)
}

fn chi_on_curve(channel: &QubitChannel, theta: f64) -> f64 {
    match equidistant_p(channel, theta) {
        Some(p) => chi_weighted(channel, &triple(p, theta)),
        None => f64::NEG_INFINITY,
    }
}

/// Best symmetric triple through the north pole.
///
/// When the best polar angle is `θ = π` the pair collapses onto the south
/// pole and the result is the vertical two-state ensemble.
pub fn symmetric_triple_solve(channel: &QubitChannel) -> Result<CapacityResult> {
    use std::f64::consts::PI;
    let lo = PI / THETA_GRID as f64;
    let h = (PI - lo) / THETA_GRID as f64;
    let mut evals = 0usize;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..=THETA_GRID {
        let v = chi_on_curve(channel, lo + h * i as f64);
        evals += 1;
        if v.is_finite() && best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (i, _) = best.ok_or(Error::NoTripleSolution)?;
    let a = (lo + h * (i as f64 - 1.0)).max(lo);
    let b = (lo + h * (i as f64 + 1.0)).min(PI);
    let opt = golden_max(|t| chi_on_curve(channel, t), a, b, 1e-11, 500);
    evals += opt.evals;
    let theta = opt.x;
    let p = equidistant_p(channel, theta).ok_or(Error::NoTripleSolution)?;
    CapacityResult::assemble(channel, triple(p, theta), evals)
}
