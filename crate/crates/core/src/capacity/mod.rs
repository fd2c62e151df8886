//! The Holevo χ quantity and its maximization.
//!
//! `χ(E) = S[Φ(ρ̄)] − Σ_j π_j S[Φ(ρ_j)]` for an ensemble `E = {π_j, ρ_j}` with
//! average `ρ̄`. The capacity is the supremum of χ over ensembles; the
//! restricted variants fix the geometry of the inputs (vertical pair,
//! horizontal pair, at most `n` states, a symmetric triple).

mod search;
mod triple;

use serde::{Deserialize, Serialize};

use crate::bloch::{entropy, relative_entropy, BlochVector};
use crate::channel::{fibonacci_sphere, QubitChannel, SqueezedShift};
use crate::ensemble::{Ensemble, MERGE_DISTANCE};
use crate::error::{Error, Result};
use crate::optimize::{golden_max, scan_then_golden_max};

pub use search::{optimize_global, optimize_n_state, GlobalCapacity, SearchConfig, StateSpace};
pub use triple::symmetric_triple_solve;

/// Members with normalized probability below this are dropped from reported
/// ensembles.
pub const PRUNE_PROB: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub value: f64,
    pub ensemble: Ensemble,
    pub avg_output: BlochVector,
    pub equidistance_residual: f64,
    pub evaluations: usize,
}

impl CapacityResult {
    /// Assembles a result from raw weighted states: prunes, merges states
    /// closer than [`MERGE_DISTANCE`], puts the ensemble in canonical form and
    /// recomputes every derived field from it.
    pub(crate) fn assemble(
        channel: &QubitChannel,
        weighted: impl IntoIterator<Item = (f64, BlochVector)>,
        evaluations: usize,
    ) -> Result<Self> {
        let ensemble = Ensemble::from_weights(weighted, PRUNE_PROB)?.merged(MERGE_DISTANCE);
        let ensemble = canonical_form(channel, &ensemble);
        Ok(CapacityResult::from_ensemble(
            channel,
            ensemble,
            evaluations,
        ))
    }

    pub fn from_ensemble(channel: &QubitChannel, ensemble: Ensemble, evaluations: usize) -> Self {
        let value = chi(channel, &ensemble);
        let avg_output = channel.apply(ensemble.average());
        let mut r = CapacityResult {
            value,
            ensemble,
            avg_output,
            equidistance_residual: 0.0,
            evaluations,
        };
        r.equidistance_residual = equidistance_check(channel, &r);
        r
    }

    pub fn effective_size(&self) -> usize {
        self.ensemble.effective_size()
    }
}

/// Canonical ordering of an ensemble. For channels symmetric about the z
/// axis the ensemble is first rotated about z so that the member farthest
/// from the axis lies in the x ≥ 0 half of the x-z plane.
fn canonical_form(channel: &QubitChannel, ensemble: &Ensemble) -> Ensemble {
    let e = ensemble.canonicalized();
    if !channel.is_axially_symmetric() {
        return e;
    }
    let transverse = |w: BlochVector| w.x.hypot(w.y);
    let anchor = e
        .members()
        .iter()
        .map(|m| m.w)
        .fold(None::<BlochVector>, |best, w| match best {
            Some(b) if transverse(b) >= transverse(w) - 1e-12 => Some(b),
            _ => Some(w),
        });
    match anchor {
        Some(a) if transverse(a) > 1e-12 => {
            let angle = -a.y.atan2(a.x);
            e.map_states(|w| w.rotate_z(angle)).canonicalized()
        }
        _ => e,
    }
}

/// χ for weighted states given directly, without building an [`Ensemble`].
/// Weights must be nonnegative and sum to one.
pub(crate) fn chi_weighted(channel: &QubitChannel, weighted: &[(f64, BlochVector)]) -> f64 {
    let mut avg = BlochVector::ORIGIN;
    let mut mean_entropy = 0.0;
    for &(p, w) in weighted {
        let out = channel.apply(w);
        avg = avg + p * out;
        mean_entropy += p * entropy(out);
    }
    entropy(avg) - mean_entropy
}

/// Holevo χ of `ensemble` sent through `channel`, in bits.
pub fn chi(channel: &QubitChannel, ensemble: &Ensemble) -> f64 {
    let weighted: Vec<_> = ensemble.members().iter().map(|m| (m.p, m.w)).collect();
    chi_weighted(channel, &weighted)
}

/// Maximum of χ over `{(p, (0,0,1)), (1−p, (0,0,−1))}`.
pub fn optimize_vertical(channel: &QubitChannel) -> CapacityResult {
    let f = |p: f64| {
        chi_weighted(
            channel,
            &[(p, BlochVector::NORTH), (1.0 - p, BlochVector::SOUTH)],
        )
    };
    let opt = golden_max(f, 0.0, 1.0, 1e-12, 500);
    CapacityResult::assemble(
        channel,
        [
            (opt.x, BlochVector::NORTH),
            (1.0 - opt.x, BlochVector::SOUTH),
        ],
        opt.evals,
    )
    .expect("vertical pair weights are a valid distribution")
}

fn horizontal_pair(z: f64) -> [BlochVector; 2] {
    let x = (1.0 - z * z).max(0.0).sqrt();
    [BlochVector::new(x, 0.0, z), BlochVector::new(-x, 0.0, z)]
}

/// Maximum of χ over equiprobable pairs `(±√(1−z²), 0, z)`.
pub fn optimize_horizontal(channel: &QubitChannel) -> CapacityResult {
    let f = |z: f64| {
        let [a, b] = horizontal_pair(z);
        chi_weighted(channel, &[(0.5, a), (0.5, b)])
    };
    let opt = scan_then_golden_max(f, -1.0, 1.0, 200, 1e-12);
    let [a, b] = horizontal_pair(opt.x);
    CapacityResult::assemble(channel, [(0.5, a), (0.5, b)], opt.evals)
        .expect("horizontal pair weights are a valid distribution")
}

/// A one-parameter family of channels, as used for crossing searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamFamily {
    /// Stretched channels at fixed `mu`, parametrized by `s`.
    Stretched { mu: f64 },
    /// Squeezed channels at fixed `mu`, parametrized by `q`.
    Squeezed { mu: f64, convention: SqueezedShift },
}

impl ParamFamily {
    pub fn at(&self, param: f64) -> Result<QubitChannel> {
        match *self {
            ParamFamily::Stretched { mu } => QubitChannel::stretched(mu, param),
            ParamFamily::Squeezed { mu, convention } => {
                QubitChannel::squeezed_with(mu, param, convention)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub param: f64,
    pub vertical: CapacityResult,
    pub horizontal: CapacityResult,
}

/// Bisects on the family parameter for the point where `C_V = C_H`.
pub fn find_crossing<F>(family: F, lo: f64, hi: f64, tol: f64) -> Result<Crossing>
where
    F: Fn(f64) -> Result<QubitChannel>,
{
    let gap = |x: f64| -> Result<f64> {
        let ch = family(x)?;
        Ok(optimize_vertical(&ch).value - optimize_horizontal(&ch).value)
    };
    let (mut a, mut b) = (lo, hi);
    let (g_lo, g_hi) = (gap(a)?, gap(b)?);
    if g_lo.signum() == g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    let mut ga = g_lo;
    while b - a > tol {
        let m = 0.5 * (a + b);
        let gm = gap(m)?;
        if gm == 0.0 {
            a = m;
            b = m;
            break;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    let param = 0.5 * (a + b);
    let ch = family(param)?;
    Ok(Crossing {
        param,
        vertical: optimize_vertical(&ch),
        horizontal: optimize_horizontal(&ch),
    })
}

/// Largest deviation of `H[Φ(ρ_i), Φ(ρ*)]` from the claimed capacity over
/// the members of the result's ensemble. `+∞` on a support violation.
pub fn equidistance_check(channel: &QubitChannel, result: &CapacityResult) -> f64 {
    let avg = channel.apply(result.ensemble.average());
    result
        .ensemble
        .members()
        .iter()
        .map(|m| (relative_entropy(channel.apply(m.w), avg) - result.value).abs())
        .fold(0.0, f64::max)
}

/// `max_γ H[Φ(γ), Φ(ρ*)] − value` over `grid` quasi-uniform pure states.
/// Positive excess means `ρ*` is not the optimal average input.
pub fn divergence_radius_check(
    channel: &QubitChannel,
    result: &CapacityResult,
    grid: usize,
) -> f64 {
    assert!(
        grid >= 100,
        "divergence radius grid needs at least 100 points"
    );
    let avg = channel.apply(result.ensemble.average());
    fibonacci_sphere(grid)
        .map(|g| relative_entropy(channel.apply(g), avg))
        .fold(f64::NEG_INFINITY, f64::max)
        - result.value
}
